//! The `landau` command-line front end.
//!
//! Every command builds one [`OutputEnvelope`]. JSON output prints the
//! envelope with full double precision; CSV output prints the command's
//! rows rounded to `--decimals` places. Warnings always go to stderr as
//! well as into the envelope.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::extremal::{extremal_f, peak_of_profile, profile_h0, sample_profile, sharpness_witness};
use crate::oracle::{audit_identities, OracleReport};
use crate::radii::{radii_table, solve_rho, RadiiResult, TableRow};
use crate::series::{margin, ClassSpec, SumStart};
use crate::specfun::{dilog, lerch_phi, SumResult, ToleranceConfig};
use crate::tables::{self, all_discrepancies, compare, published_table, ComparedRow, Consistency};

pub const SCHEMA_VERSION: &str = "1.0";

/// Samples for `plotdata` span `[0, PLOT_X_MAX]`.
pub const PLOT_X_MAX: f64 = 0.99;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

const K_NOTE: &str = "in faithful summation mode the series starts at n = 2 for every k, so k does not affect rho or R";

#[derive(Debug, Parser)]
#[command(
    name = "landau",
    version,
    about = "Sharp univalence and schlicht-disc radii for bounded harmonic mappings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Univalence radius rho and schlicht radius R for one class.
    Radii {
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// A published reference table or a custom parameter grid.
    Table {
        /// Published table to reproduce.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), conflicts_with = "grid", required_unless_present = "grid")]
        table: Option<u8>,
        /// Custom grid, e.g. "w0h;alpha=0:1:0.25;M=1".
        #[arg(long)]
        grid: Option<String>,
        /// Summation start for GkH rows.
        #[arg(long, value_enum, default_value_t = SumStartArg::Faithful)]
        sum_start: SumStartArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Non-injectivity witness for the extremal map on D_r.
    Sharpness {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sampled profile, margin, or disk radii for plotting.
    Plotdata {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, value_enum)]
        what: PlotWhat,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate the Lerch transcendent or the dilogarithm.
    Specfun {
        #[arg(long = "fn", value_enum)]
        function: SpecialFn,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check every closed form against brute-force summation.
    Audit {
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    P0h,
    W0h,
    Gkh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumStartArg {
    Faithful,
    Class,
}

impl From<SumStartArg> for SumStart {
    fn from(s: SumStartArg) -> Self {
        match s {
            SumStartArg::Faithful => SumStart::Faithful,
            SumStartArg::Class => SumStart::Class,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotWhat {
    Profile,
    Margin,
    Disks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecialFn {
    Lerch,
    Dilog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassArgs {
    #[arg(long, value_enum)]
    pub class: ClassKind,
    /// Bound M in |f| < M.
    #[arg(long = "M", default_value_t = 1.0, allow_negative_numbers = true)]
    #[serde(rename = "M")]
    pub m: f64,
    /// Required for w0h and gkh.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = SumStartArg::Faithful)]
    pub sum_start: SumStartArg,
}

impl ClassArgs {
    pub fn to_spec(&self) -> Result<ClassSpec> {
        let alpha = || {
            self.alpha.ok_or_else(|| {
                Error::Domain(format!(
                    "--alpha is required for --class {}",
                    kind_name(self.class)
                ))
            })
        };
        match self.class {
            ClassKind::P0h => ClassSpec::p0h(self.m),
            ClassKind::W0h => ClassSpec::w0h(self.m, alpha()?),
            ClassKind::Gkh => ClassSpec::gkh(self.m, alpha()?, self.k, self.sum_start.into()),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output format; plotdata defaults to csv, everything else to json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Decimal places for CSV values (round half to even).
    #[arg(long, default_value_t = 4)]
    pub decimals: usize,
    /// Absolute truncation tolerance for series.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
}

impl OutputArgs {
    fn config(&self) -> Result<ToleranceConfig> {
        let cfg = match self.tol {
            Some(t) => ToleranceConfig::default().with_abs_tol(t),
            None => ToleranceConfig::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn kind_name(k: ClassKind) -> &'static str {
    match k {
        ClassKind::P0h => "p0h",
        ClassKind::W0h => "w0h",
        ClassKind::Gkh => "gkh",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputEnvelope {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub warnings: Vec<String>,
}

/// A finished command: its envelope, its CSV rendering, and whether it
/// reports a failure (only `audit` can).
#[derive(Debug, Clone)]
pub struct Outcome {
    pub envelope: OutputEnvelope,
    pub csv: Csv,
    pub failed: bool,
}

/// Rows of already rendered CSV fields.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Fixed-point rendering with round-half-even on the exact binary value,
/// without a sign on zero.
pub fn fmt_fixed(x: f64, decimals: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn param(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn class_fields(c: &ClassSpec) -> Vec<String> {
    let (k, start) = match *c {
        ClassSpec::GkH { k, sum_start, .. } => (k.to_string(), sum_start.to_string()),
        _ => (String::new(), String::new()),
    };
    vec![
        c.kind().to_string(),
        c.m().to_string(),
        param(c.alpha()),
        k,
        start,
    ]
}

const CLASS_HEADER: [&str; 5] = ["class", "M", "alpha", "k", "sum_start"];

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable payload")
}

fn envelope(
    command: &'static str,
    inputs: Value,
    results: Value,
    warnings: Vec<String>,
) -> OutputEnvelope {
    OutputEnvelope {
        schema_version: SCHEMA_VERSION,
        command,
        inputs,
        results,
        warnings,
    }
}

/// Discrepancies of every published cell belonging to `class`.
fn published_warnings(class: &ClassSpec, row: &TableRow) -> Vec<String> {
    let mut out = Vec::new();
    for id in 1..=3u8 {
        let Ok(published) = published_table(id, SumStart::Faithful) else {
            continue;
        };
        for p in published.iter().filter(|p| same_cell(&p.class, class)) {
            for c in compare(id, std::slice::from_ref(p), std::slice::from_ref(row)) {
                out.extend(c.discrepancies.iter().map(|d| d.warning()));
            }
        }
    }
    out
}

fn same_cell(published: &ClassSpec, class: &ClassSpec) -> bool {
    match (*published, *class) {
        (
            ClassSpec::GkH { m, alpha, k, .. },
            ClassSpec::GkH {
                m: m2,
                alpha: a2,
                k: k2,
                ..
            },
        ) => m == m2 && alpha == a2 && k == k2,
        (p, c) => p == c,
    }
}

fn class_notes(class: &ClassSpec) -> Vec<String> {
    match *class {
        ClassSpec::GkH {
            sum_start: SumStart::Faithful,
            ..
        } => vec![K_NOTE.to_string()],
        _ => Vec::new(),
    }
}

fn cmd_radii(class: &ClassArgs, output: &OutputArgs) -> Result<Outcome> {
    let spec = class.to_spec()?;
    let cfg = output.config()?;
    let res: RadiiResult = solve_rho(&spec, &cfg)?;
    let row = TableRow::from(res);
    let warnings = published_warnings(&spec, &row);
    let mut results = to_value(&res);
    results["notes"] = to_value(&class_notes(&spec));

    let d = output.decimals;
    let mut csv = Csv::new(&[&CLASS_HEADER[..], &["rho", "R", "residual", "method"]].concat());
    let mut fields = class_fields(&spec);
    fields.extend([
        fmt_fixed(res.rho, d),
        fmt_fixed(res.radius, d),
        fmt_fixed(res.residual, d),
        method_name(&row).to_string(),
    ]);
    csv.rows.push(fields);
    Ok(Outcome {
        envelope: envelope(
            "radii",
            json!({ "class": class, "output": output }),
            results,
            warnings,
        ),
        csv,
        failed: false,
    })
}

fn method_name(row: &TableRow) -> &'static str {
    match row.method {
        crate::radii::Method::ClosedForm => "closed_form",
        crate::radii::Method::RootSolve => "root_solve",
    }
}

/// Values of one grid key: an inclusive range `a:b:step` or a comma list.
fn parse_values(key: &str, spec: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| Error::Domain(format!("bad grid values for {key}: {what} in {spec:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(s));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step.is_nan() || step <= 0.0 || !a.is_finite() || !b.is_finite() || b < a {
            return Err(bad("need step > 0 and stop >= start"));
        }
        let n = ((b - a) / step + 1e-9).floor();
        if n > 1e6 {
            return Err(bad("too many grid points"));
        }
        // Round to 12 places so 0.1 steps land on the intended decimals.
        Ok((0..=n as usize)
            .map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12)
            .collect())
    } else {
        spec.split(',').map(num).collect()
    }
}

/// Parses `kind;key=values;...`; keys become loops, outermost first.
pub fn parse_grid(grid: &str, default_start: SumStart) -> Result<Vec<ClassSpec>> {
    let mut parts = grid.split(';').map(str::trim).filter(|s| !s.is_empty());
    let kind = parts
        .next()
        .ok_or_else(|| Error::domain("empty grid"))?
        .to_ascii_lowercase();
    let allowed: &[&str] = match kind.as_str() {
        "p0h" => &["M"],
        "w0h" => &["M", "alpha"],
        "gkh" => &["M", "alpha", "k", "sum_start"],
        other => return Err(Error::Domain(format!("unknown class {other:?} in grid"))),
    };
    let mut axes: Vec<(String, Vec<f64>)> = Vec::new();
    let mut start = default_start;
    for part in parts {
        let (key, values) = part
            .split_once('=')
            .ok_or_else(|| Error::Domain(format!("grid entry {part:?} is not key=values")))?;
        let key = match key.trim() {
            "m" => "M",
            k => k,
        };
        if !allowed.contains(&key) {
            return Err(Error::Domain(format!(
                "key {key:?} is not valid for {kind}"
            )));
        }
        if axes.iter().any(|(k, _)| k == key) || (key == "sum_start" && start != default_start) {
            return Err(Error::Domain(format!("duplicate grid key {key:?}")));
        }
        if key == "sum_start" {
            start = match values.trim() {
                "faithful" => SumStart::Faithful,
                "class" => SumStart::Class,
                other => return Err(Error::Domain(format!("unknown sum_start {other:?}"))),
            };
            continue;
        }
        axes.push((key.to_string(), parse_values(key, values)?));
    }
    for key in allowed.iter().filter(|k| **k != "sum_start") {
        if !axes.iter().any(|(k, _)| k == key) {
            let default = match *key {
                "M" | "k" => 1.0,
                _ => return Err(Error::Domain(format!("grid for {kind} needs {key}"))),
            };
            axes.push((key.to_string(), vec![default]));
        }
    }

    let mut combos: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for (key, values) in &axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |&v| {
                    let mut c = c.clone();
                    c.push((key.clone(), v));
                    c
                })
            })
            .collect();
    }
    combos
        .into_iter()
        .map(|c| {
            let get = |k: &str| {
                c.iter()
                    .find(|(key, _)| key == k)
                    .map(|(_, v)| *v)
                    .unwrap_or(0.0)
            };
            match kind.as_str() {
                "p0h" => ClassSpec::p0h(get("M")),
                "w0h" => ClassSpec::w0h(get("M"), get("alpha")),
                _ => {
                    let k = get("k");
                    if k.fract() != 0.0 || !(1.0..=f64::from(u32::MAX)).contains(&k) {
                        return Err(Error::Domain(format!(
                            "k must be a positive integer, got {k}"
                        )));
                    }
                    ClassSpec::gkh(get("M"), get("alpha"), k as u32, start)
                }
            }
        })
        .collect()
}

fn cmd_table(
    table: Option<u8>,
    grid: Option<&str>,
    start: SumStart,
    output: &OutputArgs,
) -> Result<Outcome> {
    let cfg = output.config()?;
    let rows: Vec<ComparedRow> = match (table, grid) {
        (Some(id), _) => tables::reproduce_table(id, start, &cfg)?,
        (None, Some(g)) => {
            let specs = parse_grid(g, start)?;
            let computed = radii_table(&specs, &cfg)?;
            computed.iter().map(lookup_published).collect()
        }
        (None, None) => return Err(Error::domain("table needs --table or --grid")),
    };

    let mut warnings: Vec<String> = rows
        .iter()
        .flat_map(|r| r.discrepancies.iter().map(|d| d.warning()))
        .collect();
    if rows.iter().any(|r| !class_notes(&r.row.class).is_empty()) {
        warnings.push(format!("note: {K_NOTE}"));
    }

    let d = output.decimals;
    let mut csv = Csv::new(
        &[
            &CLASS_HEADER[..],
            &[
                "rho",
                "R",
                "residual",
                "method",
                "published_rho",
                "published_R",
                "consistency",
            ],
        ]
        .concat(),
    );
    for r in &rows {
        let mut fields = class_fields(&r.row.class);
        let published = |x: f64| {
            if x.is_nan() {
                String::new()
            } else {
                fmt_fixed(x, tables::PUBLISHED_DECIMALS)
            }
        };
        fields.extend([
            fmt_fixed(r.row.rho, d),
            fmt_fixed(r.row.radius, d),
            fmt_fixed(r.row.residual, d),
            method_name(&r.row).to_string(),
            published(r.published_rho),
            published(r.published_r),
            consistency_name(r),
        ]);
        csv.rows.push(fields);
    }
    let results = json!({
        "decimals": d,
        "rows": rows.iter().map(row_value).collect::<Vec<_>>(),
    });
    let inputs = json!({ "table": table, "grid": grid, "sum_start": start, "output": output });
    Ok(Outcome {
        envelope: envelope("table", inputs, results, warnings),
        csv,
        failed: false,
    })
}

fn row_value(r: &ComparedRow) -> Value {
    let mut v = to_value(r);
    if r.published_rho.is_nan() {
        v["consistency"] = Value::from("unpublished");
    }
    v
}

fn consistency_name(r: &ComparedRow) -> String {
    if r.published_rho.is_nan() {
        "unpublished".to_string()
    } else {
        r.consistency.as_str().to_string()
    }
}

/// Compares a grid row with its published cell, if there is one.
fn lookup_published(row: &TableRow) -> ComparedRow {
    for id in 1..=3u8 {
        let Ok(published) = published_table(id, SumStart::Faithful) else {
            continue;
        };
        if let Some(p) = published.iter().find(|p| same_cell(&p.class, &row.class)) {
            return compare(id, std::slice::from_ref(p), std::slice::from_ref(row))
                .pop()
                .expect("one row in, one row out");
        }
    }
    ComparedRow {
        row: *row,
        published_rho: f64::NAN,
        published_r: f64::NAN,
        consistency: Consistency::MatchesPublished,
        discrepancies: Vec::new(),
    }
}

fn cmd_sharpness(class: &ClassArgs, r: f64, output: &OutputArgs) -> Result<Outcome> {
    let spec = class.to_spec()?;
    let cfg = output.config()?;
    let w = sharpness_witness(&spec, r, &cfg)?;
    let f1 = extremal_f(&spec, Complex64::new(w.x1, 0.0), &cfg)?;
    let f2 = extremal_f(&spec, Complex64::new(w.x2, 0.0), &cfg)?;
    let image_gap = (f1 - f2).norm();
    let mut results = to_value(&w);
    results["F_x1"] = json!([f1.re, f1.im]);
    results["F_x2"] = json!([f2.re, f2.im]);
    results["image_gap"] = Value::from(image_gap);

    let d = output.decimals;
    let mut csv = Csv::new(
        &[
            &CLASS_HEADER[..],
            &["r", "rho", "x1", "x2", "gap", "image_gap", "second_zero"],
        ]
        .concat(),
    );
    let mut fields = class_fields(&spec);
    fields.extend([
        fmt_fixed(w.r, d),
        fmt_fixed(w.rho, d),
        fmt_fixed(w.x1, d),
        fmt_fixed(w.x2, d),
        format!("{:e}", w.gap),
        format!("{image_gap:e}"),
        w.second_zero.map(|z| fmt_fixed(z, d)).unwrap_or_default(),
    ]);
    csv.rows.push(fields);
    let inputs = json!({ "class": class, "r": r, "output": output });
    Ok(Outcome {
        envelope: envelope("sharpness", inputs, results, Vec::new()),
        csv,
        failed: false,
    })
}

fn cmd_plotdata(
    class: &ClassArgs,
    what: PlotWhat,
    points: usize,
    output: &OutputArgs,
) -> Result<Outcome> {
    let spec = class.to_spec()?;
    let cfg = output.config()?;
    if points < 2 && what != PlotWhat::Disks {
        return Err(Error::domain("--points must be >= 2"));
    }
    let d = output.decimals;
    let (results, csv) = match what {
        PlotWhat::Profile => {
            let samples = sample_profile(&spec, points, PLOT_X_MAX, &cfg)?;
            let peak = peak_of_profile(&spec, &cfg)?;
            let peak_value = profile_h0(&spec, peak, &cfg)?;
            let mut csv = Csv::new(&["x", "h0"]);
            csv.rows.extend(
                samples
                    .iter()
                    .map(|s| vec![fmt_fixed(s.x, d), fmt_fixed(s.value, d)]),
            );
            let results = json!({
                "samples": samples,
                "peak": { "x": peak, "value": peak_value },
            });
            (results, csv)
        }
        PlotWhat::Margin => {
            let denom = (points - 1) as f64;
            let samples = (0..points)
                .map(|i| {
                    let r = PLOT_X_MAX * i as f64 / denom;
                    margin(&spec, r, &cfg).map(|j| (r, j))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut csv = Csv::new(&["r", "J"]);
            csv.rows.extend(
                samples
                    .iter()
                    .map(|&(r, j)| vec![fmt_fixed(r, d), fmt_fixed(j, d)]),
            );
            let results = json!({
                "samples": samples.iter().map(|&(r, j)| json!({ "r": r, "J": j })).collect::<Vec<_>>(),
            });
            (results, csv)
        }
        PlotWhat::Disks => {
            let res = solve_rho(&spec, &cfg)?;
            let mut csv = Csv::new(&["rho", "R"]);
            csv.rows
                .push(vec![fmt_fixed(res.rho, d), fmt_fixed(res.radius, d)]);
            (json!({ "rho": res.rho, "R": res.radius }), csv)
        }
    };
    let inputs = json!({ "class": class, "what": what, "points": points, "output": output });
    Ok(Outcome {
        envelope: envelope("plotdata", inputs, results, Vec::new()),
        csv,
        failed: false,
    })
}

fn cmd_specfun(
    function: SpecialFn,
    z: f64,
    s: u32,
    a: f64,
    output: &OutputArgs,
) -> Result<Outcome> {
    let cfg = output.config()?;
    let res: SumResult = match function {
        SpecialFn::Lerch => lerch_phi(z, s, a, &cfg)?,
        SpecialFn::Dilog => dilog(z, &cfg)?,
    };
    let d = output.decimals;
    let mut csv = Csv::new(&["fn", "z", "s", "a", "value", "tail_bound", "terms_used"]);
    let (s_field, a_field) = match function {
        SpecialFn::Lerch => (s.to_string(), a.to_string()),
        SpecialFn::Dilog => (String::new(), String::new()),
    };
    csv.rows.push(vec![
        match function {
            SpecialFn::Lerch => "lerch".to_string(),
            SpecialFn::Dilog => "dilog".to_string(),
        },
        z.to_string(),
        s_field,
        a_field,
        fmt_fixed(res.value, d),
        format!("{:e}", res.tail_bound),
        res.terms_used.to_string(),
    ]);
    let inputs = match function {
        SpecialFn::Lerch => json!({ "fn": function, "z": z, "s": s, "a": a, "output": output }),
        SpecialFn::Dilog => json!({ "fn": function, "z": z, "output": output }),
    };
    Ok(Outcome {
        envelope: envelope("specfun", inputs, to_value(&res), Vec::new()),
        csv,
        failed: false,
    })
}

fn cmd_audit(output: &OutputArgs) -> Result<Outcome> {
    let cfg = output.config()?;
    let reports: Vec<OracleReport> = audit_identities(&cfg);
    let discrepancies = all_discrepancies(&cfg)?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    let warnings = discrepancies.iter().map(|d| d.warning()).collect();

    let mut csv = Csv::new(&["name", "lhs", "rhs", "abs_diff", "tolerance", "passed"]);
    for r in &reports {
        csv.rows.push(vec![
            csv_quote(&r.name),
            format!("{:e}", r.lhs),
            format!("{:e}", r.rhs),
            format!("{:e}", r.abs_diff),
            format!("{:e}", r.tolerance),
            r.passed.to_string(),
        ]);
    }
    let results = json!({
        "total": reports.len(),
        "failed": failed,
        "reports": reports,
        "formula_inconsistent_cells": discrepancies,
    });
    Ok(Outcome {
        envelope: envelope("audit", json!({ "output": output }), results, warnings),
        csv,
        failed: failed > 0,
    })
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => EXIT_USAGE,
        Error::Budget { .. } => EXIT_BUDGET,
        Error::Row { source, .. } => exit_code(source),
        Error::Bracket(_) | Error::RouteMismatch { .. } => EXIT_FAILURE,
    }
}

/// Runs one parsed command, writing to the given streams; returns the
/// process exit status.
pub fn run(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let (outcome, output) = match &cli.command {
        Command::Radii { class, output } => (cmd_radii(class, output), output),
        Command::Table {
            table,
            grid,
            sum_start,
            output,
        } => (
            cmd_table(*table, grid.as_deref(), (*sum_start).into(), output),
            output,
        ),
        Command::Sharpness { class, r, output } => (cmd_sharpness(class, *r, output), output),
        Command::Plotdata {
            class,
            what,
            points,
            output,
        } => (cmd_plotdata(class, *what, *points, output), output),
        Command::Specfun {
            function,
            z,
            s,
            a,
            output,
        } => (cmd_specfun(*function, *z, *s, *a, output), output),
        Command::Audit { output } => (cmd_audit(output), output),
    };
    let default_format = match cli.command {
        Command::Plotdata { .. } => Format::Csv,
        _ => Format::Json,
    };
    match outcome {
        Ok(o) => {
            for w in &o.envelope.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let text = match output.format.unwrap_or(default_format) {
                Format::Json => {
                    let mut s =
                        serde_json::to_string_pretty(&o.envelope).expect("serializable envelope");
                    s.push('\n');
                    s
                }
                Format::Csv => o.csv.render(),
            };
            if out
                .write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return EXIT_FAILURE;
            }
            if o.failed {
                let _ = writeln!(err, "error: audit reported failures");
                EXIT_FAILURE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point of the `landau` binary.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    run(
        cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_formatting_rounds_half_even() {
        assert_eq!(fmt_fixed(0.125, 2), "0.12");
        assert_eq!(fmt_fixed(0.375, 2), "0.38");
        assert_eq!(fmt_fixed(2.5, 0), "2");
        assert_eq!(fmt_fixed(-0.00001, 4), "0.0000");
        assert_eq!(fmt_fixed(-0.5, 4), "-0.5000");
        assert_eq!(fmt_fixed(0.324_768_1, 4), "0.3248");
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("w0h;alpha=0:1:0.25;M=1", SumStart::Faithful).unwrap();
        let alphas: Vec<_> = g.iter().map(|c| c.alpha().unwrap()).collect();
        assert_eq!(alphas, [0.0, 0.25, 0.5, 0.75, 1.0]);

        let g = parse_grid("gkh;M=1,2;alpha=0:0.3:0.1;k=2", SumStart::Class).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g[3], ClassSpec::gkh(1.0, 0.3, 2, SumStart::Class).unwrap());
        assert_eq!(g[4].m(), 2.0);

        let g = parse_grid("p0h;M=1,1.5,2", SumStart::Faithful).unwrap();
        assert_eq!(g.len(), 3);

        for bad in [
            "",
            "xyz;M=1",
            "w0h;M=1",
            "p0h;alpha=1",
            "p0h;M=1:0:1",
            "p0h;M=a",
            "gkh;alpha=0;k=1.5",
            "p0h;M=-1",
        ] {
            assert!(parse_grid(bad, SumStart::Faithful).is_err(), "{bad}");
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::domain("x")), EXIT_USAGE);
        let budget = Error::Budget {
            what: "t",
            limit: 1,
            last_bound: 1.0,
        };
        assert_eq!(exit_code(&budget), EXIT_BUDGET);
        let row = Error::Row {
            row: 0,
            label: "x".into(),
            source: Box::new(budget),
        };
        assert_eq!(exit_code(&row), EXIT_BUDGET);
    }
}
