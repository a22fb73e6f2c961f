//! Acceptance checks; one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use landau::extremal::{extremal_f, peak_of_profile, profile_h0, sharpness_witness};
use landau::oracle::audit_identities;
use landau::radii::{rho1, schlicht_r, solve_rho};
use landau::series::margin;
use landau::tables::{all_discrepancies, cell_label, reproduce_table};
use landau::{ClassSpec, Error, SumStart, ToleranceConfig};
use num_complex::Complex64;

const TABLE_TOL: f64 = 5e-4;
const COROLLARY_TOL: f64 = 1e-10;
const AUDIT_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-10;
const ROOT_STEP: f64 = 1e-6;
const COVER_TOL: f64 = 1e-10;
const SEPARATION_MIN: f64 = 1e-6;
const IMAGE_GAP_TOL: f64 = 1e-9;
const PEAK_TOL: f64 = 1e-8;
const LIMIT_ALPHA: f64 = 1e-6;
const LIMIT_TOL: f64 = 1e-4;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn grid() -> Vec<ClassSpec> {
    let mut g: Vec<ClassSpec> = [1.0, 1.5, 2.0]
        .iter()
        .map(|&m| ClassSpec::p0h(m).unwrap())
        .collect();
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        for m in [1.0, 1.5] {
            g.push(ClassSpec::w0h(m, alpha).unwrap());
        }
    }
    for alpha in [0.0, 0.5, 0.8] {
        g.push(ClassSpec::gkh(1.0, alpha, 1, SumStart::Faithful).unwrap());
    }
    g
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn timed<F: FnOnce() -> Outcome>(limit: Option<Duration>, f: F) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        o.detail
            .push_str(&format!("; {elapsed:?} (limit {limit:?})"));
        if elapsed >= limit {
            o.passed = false;
        }
    }
    o
}

fn criterion_1() -> Outcome {
    let expected = [(1.0, 0.3247), (1.5, 0.1603), (2.0, 0.0934)];
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (m, t) in expected {
        match rho1(m) {
            Ok(v) => worst = worst.max((v - t).abs()),
            Err(_) => ok = false,
        }
    }
    Outcome {
        passed: ok && worst <= TABLE_TOL,
        detail: format!("max |rho1 - table| = {worst:.2e} (tol {TABLE_TOL:e})"),
    }
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut worst_table: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    for (m, t) in [(1.0, 0.2819), (1.5, 0.2075)] {
        match solve_rho(&ClassSpec::w0h(m, 0.0).unwrap(), &cfg()) {
            Ok(r) => {
                worst_table = worst_table.max((r.rho - t).abs());
                worst_closed = worst_closed.max((r.rho - PI / (8.0 * m + PI)).abs());
            }
            Err(_) => ok = false,
        }
    }
    Outcome {
        passed: ok && worst_table <= TABLE_TOL && worst_closed <= COROLLARY_TOL,
        detail: format!(
            "max |rho - table| = {worst_table:.2e} (tol {TABLE_TOL:e}), max |rho - pi/(8M+pi)| = {worst_closed:.2e} (tol {COROLLARY_TOL:e})"
        ),
    }
}

fn cell_key(table: u8, column: &str, label: &str) -> String {
    format!("T{table} {column} ({label})")
}

fn criterion_3() -> Outcome {
    let flagged = match all_discrepancies(&cfg()) {
        Ok(d) => d,
        Err(e) => {
            return Outcome {
                passed: false,
                detail: format!("error: {e}"),
            }
        }
    };
    let warnings_ok = flagged.iter().all(|d| {
        let w = d.warning();
        w.contains(&format!("formula {:.4}", d.formula))
            && w.contains(&format!("table {:.4}", d.published))
    });
    let got: BTreeSet<String> = flagged
        .iter()
        .map(|d| cell_key(d.table, d.column, &d.label))
        .collect();

    // |formula - table| for every published cell, from the reproduced rows.
    let mut diffs = BTreeMap::new();
    for id in 1..=3u8 {
        for row in reproduce_table(id, SumStart::Faithful, &cfg()).expect("table reproduces") {
            let label = cell_label(id, &row.row.class);
            diffs.insert(
                cell_key(id, "rho", &label),
                (row.row.rho - row.published_rho).abs(),
            );
            diffs.insert(
                cell_key(id, "R", &label),
                (row.row.radius - row.published_r).abs(),
            );
        }
    }
    let by_rule: BTreeSet<String> = diffs
        .iter()
        .filter(|(_, d)| **d > TABLE_TOL)
        .map(|(k, _)| k.clone())
        .collect();

    // Cells named by the criterion: Table 1 R, Table 2 alpha=1 rows, all of Table 3.
    let mut named = BTreeSet::new();
    for m in ["1.0", "1.5", "2.0"] {
        named.insert(cell_key(1, "R", &format!("M={m}")));
    }
    for m in ["1.0", "1.5"] {
        for col in ["rho", "R"] {
            named.insert(cell_key(2, col, &format!("alpha=1, M={m}")));
        }
    }
    for k in 1..=3 {
        for a in ["0.0", "0.5", "0.8"] {
            for col in ["rho", "R"] {
                named.insert(cell_key(3, col, &format!("k={k}, alpha={a}")));
            }
        }
    }
    let within_band: Vec<String> = named
        .difference(&got)
        .map(|k| {
            format!(
                "{k} |diff| = {:.1e}",
                diffs.get(k).copied().unwrap_or(f64::NAN)
            )
        })
        .collect();
    let named_ok = named
        .difference(&got)
        .all(|k| diffs.get(k).is_some_and(|d| *d <= TABLE_TOL));
    let extra: Vec<&String> = got.difference(&named).collect();
    let t1 = flagged
        .iter()
        .find(|d| d.table == 1 && d.column == "R" && d.label == "M=1.0")
        .map(|d| d.warning())
        .unwrap_or_default();
    Outcome {
        passed: warnings_ok && got == by_rule && named_ok,
        detail: format!(
            "{} cells flagged by the |diff| > {TABLE_TOL:e} rule; named but within tolerance: {within_band:?}; flagged beyond the named list: {extra:?}; e.g. \"{t1}\"",
            got.len()
        ),
    }
}

fn criterion_4() -> Outcome {
    let reports = audit_identities(&cfg());
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.as_str())
        .collect();
    let loose: Vec<&str> = reports
        .iter()
        .filter(|r| r.tolerance > AUDIT_TOL)
        .map(|r| r.name.as_str())
        .collect();
    let families = [
        "phi-log-identity",
        "partial-fraction-reconstruct",
        "partial-fraction-max",
        "lerch-majorant-vs-direct",
        "margin-vs-direct @ W0H(alpha=1",
    ];
    let missing: Vec<&str> = families
        .iter()
        .copied()
        .filter(|f| !reports.iter().any(|r| r.name.starts_with(f)))
        .collect();
    let phi = reports
        .iter()
        .filter(|r| r.name.starts_with("phi-log-identity"))
        .count();
    Outcome {
        passed: failed.is_empty() && loose.is_empty() && missing.is_empty() && phi == 19,
        detail: format!(
            "{} reports, {} failed, {} above {AUDIT_TOL:e}, {phi} phi-log points, missing families {missing:?}",
            reports.len(),
            failed.len(),
            loose.len()
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for c in grid() {
        let ok = solve_rho(&c, &cfg()).and_then(|r| {
            let j = margin(&c, r.rho, &cfg())?;
            worst = worst.max(j.abs());
            let left = margin(&c, r.rho - ROOT_STEP, &cfg())?;
            let right = margin(&c, r.rho + ROOT_STEP, &cfg())?;
            Ok(j.abs() <= RESIDUAL_TOL && left > 0.0 && right < 0.0)
        });
        if !matches!(ok, Ok(true)) {
            bad.push(c.to_string());
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: format!("max |J(rho)| = {worst:.2e} (tol {RESIDUAL_TOL:e}), sign step {ROOT_STEP:e}, failures {bad:?}"),
    }
}

fn criterion_6() -> Outcome {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for c in grid() {
        let ok = solve_rho(&c, &cfg()).and_then(|r| {
            let s = schlicht_r(&c, r.rho, &cfg())?;
            let h = profile_h0(&c, r.rho, &cfg())?;
            worst = worst.max((s - h).abs());
            Ok((s - h).abs() <= COVER_TOL && s > 0.0 && r.radius > 0.0)
        });
        if !matches!(ok, Ok(true)) {
            bad.push(c.to_string());
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: format!("max |R - h0(rho)| = {worst:.2e} (tol {COVER_TOL:e}), failures {bad:?}"),
    }
}

fn criterion_7() -> Outcome {
    let mut bad = Vec::new();
    let mut worst_gap: f64 = 0.0;
    let mut min_sep = f64::INFINITY;
    for c in grid() {
        let ok = solve_rho(&c, &cfg()).and_then(|res| {
            let r = (res.rho + 0.1).min(0.95);
            let w = sharpness_witness(&c, r, &cfg())?;
            let f1 = extremal_f(&c, Complex64::new(w.x1, 0.0), &cfg())?;
            let f2 = extremal_f(&c, Complex64::new(w.x2, 0.0), &cfg())?;
            let gap = (f1 - f2).norm();
            worst_gap = worst_gap.max(gap);
            min_sep = min_sep.min(w.x1 - w.x2);
            let refused = matches!(
                sharpness_witness(&c, res.rho, &cfg()),
                Err(Error::Domain(_))
            );
            Ok(gap <= IMAGE_GAP_TOL && w.x1 - w.x2 >= SEPARATION_MIN && refused)
        });
        if !matches!(ok, Ok(true)) {
            bad.push(c.to_string());
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: format!(
            "max |F(x1) - F(x2)| = {worst_gap:.2e} (tol {IMAGE_GAP_TOL:e}), min separation {min_sep:.3e} (min {SEPARATION_MIN:e}), failures {bad:?}"
        ),
    }
}

fn criterion_7_cli() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_landau"))
        .args(["sharpness", "--class", "p0h", "--M", "1", "--r"])
        .arg(rho1(1.0).unwrap().to_string())
        .output()
        .expect("run landau");
    Outcome {
        passed: out.status.code() == Some(2),
        detail: format!(
            "`landau sharpness --r rho` exit code {:?} (expected 2)",
            out.status.code()
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for c in grid() {
        match (peak_of_profile(&c, &cfg()), solve_rho(&c, &cfg())) {
            (Ok(p), Ok(r)) => {
                worst = worst.max((p - r.rho).abs());
                if (p - r.rho).abs() > PEAK_TOL {
                    bad.push(c.to_string());
                }
            }
            _ => bad.push(c.to_string()),
        }
    }
    Outcome {
        passed: bad.is_empty(),
        detail: format!("max |peak - rho| = {worst:.2e} (tol {PEAK_TOL:e}), failures {bad:?}"),
    }
}

fn criterion_9() -> Outcome {
    match solve_rho(&ClassSpec::w0h(1.0, LIMIT_ALPHA).unwrap(), &cfg()) {
        Ok(r) => {
            let d = (r.rho - PI / (8.0 + PI)).abs();
            Outcome {
                passed: d <= LIMIT_TOL,
                detail: format!(
                    "|rho(alpha={LIMIT_ALPHA:e}) - pi/(8+pi)| = {d:.2e} (tol {LIMIT_TOL:e})"
                ),
            }
        }
        Err(e) => Outcome {
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn criterion_10() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_landau"))
            .args(["table", "--table", "2", "--format", "csv"])
            .output()
            .expect("run landau")
    };
    let a = run();
    let b = run();
    let ok =
        a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    let lf_only = !a.stdout.contains(&b'\r');
    Outcome {
        passed: ok && lf_only,
        detail: format!(
            "{} bytes, identical = {}, LF only = {lf_only}",
            a.stdout.len(),
            a.stdout == b.stdout
        ),
    }
}

fn main() {
    let ms = Duration::from_millis;
    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 table 1 rho column", timed(Some(ms(1)), criterion_1)),
        ("2 table 2 alpha=0 rho", timed(Some(ms(10)), criterion_2)),
        ("3 table discrepancy flags", timed(None, criterion_3)),
        ("4 identity audit", timed(Some(ms(2000)), criterion_4)),
        ("5 root residuals", timed(Some(ms(1000)), criterion_5)),
        ("6 covering consistency", timed(None, criterion_6)),
        ("7 sharpness witnesses", timed(Some(ms(1000)), criterion_7)),
        (
            "7 sharpness precondition (cli)",
            timed(None, criterion_7_cli),
        ),
        ("8 peak identity", timed(None, criterion_8)),
        ("9 limit continuity", timed(None, criterion_9)),
        ("10 csv determinism", timed(None, criterion_10)),
    ];
    let mut failures = 0;
    for (name, o) in &criteria {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", o.detail);
        if !o.passed {
            failures += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
