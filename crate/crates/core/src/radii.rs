//! Univalence radius `rho` and schlicht-disc radius `R` for each class.
//!
//! `rho` is the zero of the margin `J`, found by bisection; for `P0H` the
//! closed form `1 − exp(−π/(8M²))` is returned instead, with the bisection
//! kept as a cross-check. `R = π/(4M)·rho − S(rho)` is the peak value of
//! the extremal profile.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bisect::bisect_sign_change;
use crate::error::{Error, Result};
use crate::series::{majorant, margin, ClassSpec, SumStart};
use crate::specfun::{dilog, ToleranceConfig};

/// Largest `|J(rho)|` accepted for a solved root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;
/// Bisection stops once the bracket is this narrow.
pub const BRACKET_WIDTH_TOL: f64 = 1e-14;
/// Upper end of the search interval; `J` diverges at `r = 1`.
pub const BRACKET_UPPER: f64 = 1.0 - 1e-9;
/// Closed-form and numeric routes may differ by at most this much.
pub const ROUTE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    RootSolve,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiiResult {
    pub class: ClassSpec,
    pub rho: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    /// `|J(rho)|`, evaluated for both methods.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub method: Method,
}

/// One row of a radii table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub class: ClassSpec,
    pub rho: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub residual: f64,
    pub method: Method,
}

impl From<RadiiResult> for TableRow {
    fn from(r: RadiiResult) -> Self {
        Self {
            class: r.class,
            rho: r.rho,
            radius: r.radius,
            residual: r.residual,
            method: r.method,
        }
    }
}

fn check_m(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("M must be > 0, got {m}")))
    }
}

/// `rho = 1 − exp(−π/(8M²))` for `P0H(M)`.
pub fn rho1(m: f64) -> Result<f64> {
    check_m(m)?;
    Ok(-(-PI / (8.0 * m * m)).exp_m1())
}

/// Covering radius of `P0H(M)`: the profile peak
/// `π/(4M)·rho − 2M(rho + (1 − rho) ln(1 − rho))` at `rho = rho1(M)`,
/// which simplifies to `π/(4M) − 2M(1 − exp(−π/(8M²)))`.
pub fn r1(m: f64) -> Result<f64> {
    let rho = rho1(m)?;
    Ok(PI / (4.0 * m) - 2.0 * m * rho)
}

/// `π/(4M) + 2M − (π/(2M) + 2M) exp(−π/(8M²))`, the value of
/// `π/(4M)·x + 2M(x + (1 − x) ln(1 − x))` at `rho1(M)`.
///
/// That profile has the opposite sign on the majorant and is increasing
/// on `[0, 1)`, so this is not a covering radius; it is kept only to label
/// reference-table discrepancies.
pub fn r1_plus_variant(m: f64) -> Result<f64> {
    check_m(m)?;
    let e = (-PI / (8.0 * m * m)).exp();
    Ok(PI / (4.0 * m) + 2.0 * m - (PI / (2.0 * m) + 2.0 * m) * e)
}

/// `R = π/(4M)·rho − S(rho)`.
pub fn schlicht_r(class: &ClassSpec, rho: f64, cfg: &ToleranceConfig) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::domain(format!(
            "schlicht radius needs 0 < rho < 1, got {rho}"
        )));
    }
    Ok(class.linear_term() * rho - majorant(class, rho, cfg)?)
}

/// Closed-form `rho` where one exists: `W0H` and `GkH` at `alpha = 0`.
pub fn corollary_rho_closed(class: &ClassSpec) -> Option<f64> {
    match *class {
        ClassSpec::W0H { m, alpha: 0.0 } => Some(PI / (8.0 * m + PI)),
        ClassSpec::GkH {
            m,
            alpha,
            k,
            sum_start,
        } if alpha == 0.0 && (k == 1 || sum_start == SumStart::Faithful) => {
            let s = PI + 8.0 * m;
            Some(1.0 - (32.0 * m * s).sqrt() / (2.0 * s))
        }
        _ => None,
    }
}

/// Closed-form `R` matching [`corollary_rho_closed`].
pub fn corollary_r_closed(class: &ClassSpec) -> Option<f64> {
    let rho = corollary_rho_closed(class)?;
    let m = class.m();
    match class {
        ClassSpec::W0H { .. } => Some(PI / (4.0 * m) + 2.0 * (8.0 * m / (PI + 8.0 * m)).ln()),
        ClassSpec::GkH { .. } => {
            let q = 1.0 - rho;
            Some(PI / (4.0 * m) * rho - 2.0 * rho * rho / q)
        }
        ClassSpec::P0H { .. } => None,
    }
}

/// Closed-form `R` for `W0H(1)`: `(π/(4M) + 2)·rho − 2 Li₂(rho)`, accurate
/// to half of `abs_tol`.
pub fn w0h_one_r(m: f64, rho: f64, cfg: &ToleranceConfig) -> Result<f64> {
    check_m(m)?;
    let li2 = dilog(rho, &cfg.with_abs_tol(0.25 * cfg.abs_tol))?.value;
    Ok((PI / (4.0 * m) + 2.0) * rho - 2.0 * li2)
}

fn bisect_margin(class: &ClassSpec, cfg: &ToleranceConfig) -> Result<crate::bisect::Bracketed> {
    let j0 = margin(class, 0.0, cfg)?;
    if j0 <= 0.0 {
        return Err(Error::Bracket(format!(
            "margin at r = 0 is {j0}, expected > 0"
        )));
    }
    bisect_sign_change(
        "margin bisection",
        0.0,
        BRACKET_UPPER,
        BRACKET_WIDTH_TOL,
        cfg.max_iters,
        |r| margin(class, r, cfg),
    )
}

/// Solves `J(rho) = 0` and evaluates `R` at the root.
pub fn solve_rho(class: &ClassSpec, cfg: &ToleranceConfig) -> Result<RadiiResult> {
    class.validate()?;
    cfg.validate()?;
    let b = bisect_margin(class, cfg)?;
    let numeric = b.root;

    let (rho, method) = match *class {
        ClassSpec::P0H { m } => {
            let closed = rho1(m)?;
            let diff = (closed - numeric).abs();
            if diff > ROUTE_TOL {
                return Err(Error::RouteMismatch {
                    what: "rho (closed form vs bisection)",
                    lhs: closed,
                    rhs: numeric,
                    diff,
                });
            }
            (closed, Method::ClosedForm)
        }
        _ => {
            if let Some(closed) = corollary_rho_closed(class) {
                let diff = (closed - numeric).abs();
                if diff > ROUTE_TOL {
                    return Err(Error::RouteMismatch {
                        what: "rho (alpha = 0 closed form vs bisection)",
                        lhs: closed,
                        rhs: numeric,
                        diff,
                    });
                }
            }
            (numeric, Method::RootSolve)
        }
    };

    let residual = margin(class, rho, cfg)?.abs();
    if method == Method::RootSolve && residual > ROOT_RESIDUAL_TOL {
        return Err(Error::Bracket(format!(
            "residual |J(rho)| = {residual:e} exceeds {ROOT_RESIDUAL_TOL:e} at rho = {rho}"
        )));
    }

    let radius = match *class {
        ClassSpec::P0H { m } => {
            let closed = r1(m)?;
            let series = schlicht_r(class, rho, cfg)?;
            let diff = (closed - series).abs();
            if diff > ROUTE_TOL {
                return Err(Error::RouteMismatch {
                    what: "R (closed form vs majorant)",
                    lhs: closed,
                    rhs: series,
                    diff,
                });
            }
            closed
        }
        _ => schlicht_r(class, rho, cfg)?,
    };

    Ok(RadiiResult {
        class: *class,
        rho,
        radius,
        residual,
        bracket: (b.lo, b.hi),
        iterations: b.iterations,
        method,
    })
}

/// One row per class in `grid`, in grid order.
pub fn radii_table(grid: &[ClassSpec], cfg: &ToleranceConfig) -> Result<Vec<TableRow>> {
    if grid.is_empty() {
        return Err(Error::domain("radii table needs a nonempty grid"));
    }
    grid.iter()
        .enumerate()
        .map(|(row, class)| {
            solve_rho(class, cfg)
                .map(TableRow::from)
                .map_err(|e| Error::Row {
                    row,
                    label: class.to_string(),
                    source: Box::new(e),
                })
        })
        .collect()
}
