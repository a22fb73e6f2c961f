//! Brute-force reference sums and the closed-form identity audit.
//!
//! Nothing in the summation half of this module calls into `specfun` or
//! `series`: coefficients are recomputed here, powers come from `powi`
//! instead of running products, and accumulation uses an error-free
//! TwoSum cascade instead of the Neumaier sum used elsewhere.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::profile_slope;
use crate::radii::{corollary_r_closed, corollary_rho_closed, r1, rho1, schlicht_r, w0h_one_r};
use crate::series::{
    majorant, margin, partial_fraction_split, ClassSpec, CoeffRule, SumStart, Weight,
};
use crate::specfun::{dilog, lerch_phi, SumResult, ToleranceConfig};

/// Tolerance every closed-form audit must meet.
pub const AUDIT_TOL: f64 = 1e-10;
/// Tolerance for the exact rational partial-fraction identity.
pub const PARTIAL_FRACTION_TOL: f64 = 1e-14;
/// Term budget of the reference sums.
pub const ORACLE_MAX_TERMS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        Self {
            name: name.into(),
            lhs,
            rhs,
            abs_diff,
            tolerance,
            passed: abs_diff <= tolerance,
        }
    }
}

/// Error-free transformation `a + b = s + e`.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

fn reference_coefficient(class: &ClassSpec, start: u64, n: u64) -> f64 {
    if n < start {
        return 0.0;
    }
    let nf = n as f64;
    match *class {
        ClassSpec::P0H { m } => 2.0 * m / nf / (nf - 1.0),
        ClassSpec::W0H { alpha, .. } => 2.0 / (alpha * nf * nf + (1.0 - alpha) * nf),
        ClassSpec::GkH { alpha, .. } => 2.0 / (1.0 + alpha * (nf - 1.0)),
    }
}

/// Direct sum of a nonnegative series `Σ_{n≥start} c(n) w_n(r)` with
/// `c` nonincreasing.
pub fn oracle_series<C>(
    coeff: C,
    start: u64,
    weight: Weight,
    r: f64,
    target_tol: f64,
) -> Result<SumResult>
where
    C: Fn(u64) -> f64,
{
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!(
            "oracle sum needs 0 <= r < 1, got {r}"
        )));
    }
    if target_tol.is_nan() || target_tol <= 0.0 {
        return Err(Error::domain("oracle sum needs target_tol > 0"));
    }
    let (mut s, mut e) = (0.0, 0.0);
    let mut last = f64::INFINITY;
    for i in 0..ORACLE_MAX_TERMS {
        let n = start + i as u64;
        let nf = n as f64;
        let c = coeff(n);
        let (term, q) = match weight {
            Weight::Derivative => (c * nf * r.powi((n - 1) as i32), r * (nf + 1.0) / nf),
            Weight::Power => (c * r.powi(n as i32), r),
        };
        let (s2, err) = two_sum(s, term);
        s = s2;
        e += err;
        if term == 0.0 {
            return Ok(SumResult {
                value: s + e,
                tail_bound: 0.0,
                terms_used: i + 1,
            });
        }
        if q < 1.0 {
            let bound = term * q / (1.0 - q);
            last = bound;
            if bound <= target_tol {
                return Ok(SumResult {
                    value: s + e,
                    tail_bound: bound,
                    terms_used: i + 1,
                });
            }
        }
    }
    Err(Error::Budget {
        what: "oracle sum",
        limit: ORACLE_MAX_TERMS,
        last_bound: last,
    })
}

/// Reference value of `Σ c_n w_n(r)` for a class's coefficient rule.
pub fn oracle_sum(rule: &CoeffRule, weight: Weight, r: f64, target_tol: f64) -> Result<SumResult> {
    let class = rule.class;
    let start = rule.start_index.max(2);
    oracle_series(
        |n| reference_coefficient(&class, start, n),
        start,
        weight,
        r,
        target_tol,
    )
}

/// `π/(4M)`, the Schwarz-lemma lower bound on `λ_f(0)`.
pub fn schwarz_lambda_lower(m: f64) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::domain(format!("M must be > 0, got {m}")));
    }
    Ok(PI / (4.0 * m))
}

fn z_grid() -> impl Iterator<Item = f64> {
    (1..=19).map(|i| f64::from(i) / 20.0)
}

fn r_grid() -> impl Iterator<Item = f64> {
    (1..=9).map(|i| f64::from(i) / 10.0)
}

const AUDIT_ALPHAS: [f64; 6] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5];

fn audit_classes() -> Vec<ClassSpec> {
    let mut v = vec![ClassSpec::P0H { m: 1.0 }, ClassSpec::P0H { m: 2.0 }];
    v.extend(
        AUDIT_ALPHAS
            .iter()
            .map(|&alpha| ClassSpec::W0H { m: 1.0, alpha }),
    );
    v.extend([0.0, 0.5, 0.8].iter().map(|&alpha| ClassSpec::GkH {
        m: 1.0,
        alpha,
        k: 1,
        sum_start: SumStart::Faithful,
    }));
    v.push(ClassSpec::GkH {
        m: 1.0,
        alpha: 0.5,
        k: 3,
        sum_start: SumStart::Class,
    });
    v
}

/// Pushes a report, or a failed one carrying the error text.
fn record(out: &mut Vec<OracleReport>, name: String, tol: f64, pair: Result<(f64, f64)>) {
    match pair {
        Ok((lhs, rhs)) => out.push(OracleReport::new(name, lhs, rhs, tol)),
        Err(e) => out.push(OracleReport {
            name: format!("{name} [error: {e}]"),
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_diff: f64::INFINITY,
            tolerance: tol,
            passed: false,
        }),
    }
}

/// Runs every identity check; failures are reported, never thrown.
pub fn audit_identities(cfg: &ToleranceConfig) -> Vec<OracleReport> {
    let mut out = Vec::new();
    let tight = cfg.abs_tol.min(1e-13);

    for z in z_grid() {
        let reference = -(-z).ln_1p() / z;
        record(
            &mut out,
            format!("phi-log-identity @ z={z}"),
            AUDIT_TOL,
            lerch_phi(z, 1, 1.0, cfg).map(|p| (p.value, reference)),
        );
    }
    for z in z_grid() {
        let reference = (-(-z).ln_1p() - z) / (z * z);
        record(
            &mut out,
            format!("phi-shift-identity @ z={z}"),
            AUDIT_TOL,
            lerch_phi(z, 1, 2.0, cfg).map(|p| (p.value, reference)),
        );
    }
    for z in z_grid() {
        let pair = dilog(z, cfg).and_then(|d| Ok((d.value, z * lerch_phi(z, 2, 1.0, cfg)?.value)));
        record(
            &mut out,
            format!("dilog-lerch-identity @ z={z}"),
            AUDIT_TOL,
            pair,
        );
    }

    for i in 0..10 {
        let alpha = f64::from(i) / 10.0;
        let mut worst = (0u64, 0.0f64, 0.0f64, 0.0f64);
        let mut failure = None;
        for n in 2..=10_000u64 {
            match partial_fraction_split(n, alpha) {
                Ok((a, b)) => {
                    let nf = n as f64;
                    let exact = 2.0 / (nf * (alpha * nf + 1.0 - alpha));
                    let diff = (a - b - exact).abs();
                    if [2, 3, 7, 100, 10_000].contains(&n) {
                        out.push(OracleReport::new(
                            format!("partial-fraction-reconstruct @ n={n}, alpha={alpha}"),
                            a - b,
                            exact,
                            PARTIAL_FRACTION_TOL,
                        ));
                    }
                    if diff >= worst.3 {
                        worst = (n, a - b, exact, diff);
                    }
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        let name = format!(
            "partial-fraction-max @ alpha={alpha}, n<=10000 (worst n={})",
            worst.0
        );
        match failure {
            None => out.push(OracleReport::new(
                name,
                worst.1,
                worst.2,
                PARTIAL_FRACTION_TOL,
            )),
            Some(e) => record(&mut out, name, PARTIAL_FRACTION_TOL, Err(e)),
        }
    }

    for alpha in [0.25, 0.5, 0.75] {
        let class = ClassSpec::W0H { m: 1.0, alpha };
        let rule = CoeffRule::for_class(class);
        for rho in r_grid() {
            let pair = majorant(&class, rho, cfg)
                .and_then(|s| Ok((s, oracle_sum(&rule, Weight::Power, rho, tight)?.value)));
            record(
                &mut out,
                format!("lerch-majorant-vs-direct @ alpha={alpha}, rho={rho}"),
                AUDIT_TOL,
                pair,
            );
        }
    }

    for class in audit_classes() {
        let rule = CoeffRule::for_class(class);
        for r in r_grid() {
            let pair = margin(&class, r, cfg).and_then(|j| {
                let direct = oracle_sum(&rule, Weight::Derivative, r, tight)?.value;
                Ok((j, class.linear_term() - direct))
            });
            record(
                &mut out,
                format!("margin-vs-direct @ {class}, r={r}"),
                AUDIT_TOL,
                pair,
            );
            let pair = majorant(&class, r, cfg)
                .and_then(|s| Ok((s, oracle_sum(&rule, Weight::Power, r, tight)?.value)));
            record(
                &mut out,
                format!("majorant-vs-direct @ {class}, r={r}"),
                AUDIT_TOL,
                pair,
            );
        }
        record(
            &mut out,
            format!("schwarz-constant @ {class}"),
            0.0,
            margin(&class, 0.0, cfg).and_then(|j| Ok((j, schwarz_lambda_lower(class.m())?))),
        );
    }

    for alpha in [0.25, 0.5, 0.75] {
        let class = ClassSpec::W0H { m: 1.0, alpha };
        let rule = CoeffRule::for_class(class);
        for x in r_grid() {
            let pair = profile_slope(&class, x, cfg).and_then(|s| {
                let direct = oracle_sum(&rule, Weight::Derivative, x, tight)?.value;
                Ok((s, class.linear_term() - direct))
            });
            record(
                &mut out,
                format!("profile-slope-lerch-vs-direct @ alpha={alpha}, x={x}"),
                AUDIT_TOL,
                pair,
            );
        }
    }

    for m in [1.0, 1.5, 2.0] {
        let class = ClassSpec::P0H { m };
        let rule = CoeffRule::for_class(class);
        let pair = rho1(m).and_then(|rho| {
            let direct = oracle_sum(&rule, Weight::Derivative, rho, tight)?.value;
            Ok((class.linear_term() - direct, 0.0))
        });
        record(
            &mut out,
            format!("rho1-closed-form-zero @ M={m}"),
            AUDIT_TOL,
            pair,
        );
        let pair = rho1(m).and_then(|rho| {
            let direct = oracle_sum(&rule, Weight::Power, rho, tight)?.value;
            Ok((r1(m)?, class.linear_term() * rho - direct))
        });
        record(
            &mut out,
            format!("r1-closed-form-vs-direct @ M={m}"),
            AUDIT_TOL,
            pair,
        );
    }

    let closed_classes = [
        ClassSpec::W0H { m: 1.0, alpha: 0.0 },
        ClassSpec::W0H { m: 1.5, alpha: 0.0 },
        ClassSpec::GkH {
            m: 1.0,
            alpha: 0.0,
            k: 1,
            sum_start: SumStart::Faithful,
        },
    ];
    for class in closed_classes {
        let rule = CoeffRule::for_class(class);
        let Some(rho) = corollary_rho_closed(&class) else {
            continue;
        };
        let pair = oracle_sum(&rule, Weight::Derivative, rho, tight)
            .map(|d| (class.linear_term() - d.value, 0.0));
        record(
            &mut out,
            format!("alpha0-closed-rho-zero @ {class}"),
            AUDIT_TOL,
            pair,
        );
        let pair = oracle_sum(&rule, Weight::Power, rho, tight).map(|s| {
            let closed = corollary_r_closed(&class).expect("closed R accompanies closed rho");
            (closed, class.linear_term() * rho - s.value)
        });
        record(
            &mut out,
            format!("alpha0-closed-R-vs-direct @ {class}"),
            AUDIT_TOL,
            pair,
        );
        let pair = schlicht_r(&class, rho, cfg).map(|r| {
            (
                r,
                corollary_r_closed(&class).expect("closed R accompanies closed rho"),
            )
        });
        record(
            &mut out,
            format!("alpha0-closed-R-vs-majorant @ {class}"),
            AUDIT_TOL,
            pair,
        );
    }

    for m in [1.0, 1.5] {
        let class = ClassSpec::W0H { m, alpha: 1.0 };
        let rule = CoeffRule::for_class(class);
        for rho in r_grid() {
            let pair = w0h_one_r(m, rho, cfg).and_then(|closed| {
                let s = oracle_sum(&rule, Weight::Power, rho, tight)?.value;
                Ok((closed, class.linear_term() * rho - s))
            });
            record(
                &mut out,
                format!("dilog-R-vs-direct @ M={m}, rho={rho}"),
                AUDIT_TOL,
                pair,
            );
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sanity() {
        // Σ_{n≥2} (1/n)·n·r^{n−1} = r/(1 − r)
        let s = oracle_series(|n| 1.0 / n as f64, 2, Weight::Derivative, 0.5, 1e-14).unwrap();
        assert!((s.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reference_sums() {
        let rule = CoeffRule::for_class(ClassSpec::W0H { m: 1.0, alpha: 0.5 });
        let s = oracle_sum(&rule, Weight::Power, 0.3, 1e-15).unwrap();
        assert!((s.value - 0.071_033_856_571_831_12).abs() < 1e-15);

        let rule = CoeffRule::for_class(ClassSpec::P0H { m: 1.0 });
        let s = oracle_sum(&rule, Weight::Power, 0.5, 1e-15).unwrap();
        let expected = 2.0 * (0.5 + 0.5 * 0.5f64.ln());
        assert!((s.value - expected).abs() < 1e-15);
        assert!((s.value - 0.3068528).abs() < 5e-8);
    }

    #[test]
    fn oracle_domain_and_budget() {
        let rule = CoeffRule::for_class(ClassSpec::P0H { m: 1.0 });
        assert!(oracle_sum(&rule, Weight::Power, 1.0, 1e-12).is_err());
        assert!(oracle_sum(&rule, Weight::Power, 0.5, 0.0).is_err());
        let g = CoeffRule::for_class(ClassSpec::GkH {
            m: 1.0,
            alpha: 0.0,
            k: 1,
            sum_start: SumStart::Faithful,
        });
        assert!(oracle_sum(&g, Weight::Derivative, 0.999_999_99, 1e-12)
            .unwrap_err()
            .is_budget());
    }

    #[test]
    fn schwarz_constant() {
        assert_eq!(
            schwarz_lambda_lower(1.0).unwrap(),
            std::f64::consts::FRAC_PI_4
        );
        assert_eq!(
            schwarz_lambda_lower(2.0).unwrap(),
            std::f64::consts::FRAC_PI_8
        );
        assert!((schwarz_lambda_lower(PI / 4.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(schwarz_lambda_lower(0.0).is_err());
    }

    #[test]
    fn audit_names_and_reports() {
        let reports = audit_identities(&ToleranceConfig::default());
        for r in &reports {
            assert_eq!(r.passed, r.abs_diff <= r.tolerance, "{}", r.name);
        }
        let phi = reports
            .iter()
            .find(|r| r.name == "phi-log-identity @ z=0.5")
            .unwrap();
        assert!(phi.abs_diff < 1e-11 && phi.passed);
        let pf = reports
            .iter()
            .find(|r| r.name == "partial-fraction-reconstruct @ n=7, alpha=0.3")
            .unwrap();
        assert!(pf.abs_diff < 1e-14 && pf.passed);
        let lm = reports
            .iter()
            .find(|r| r.name == "lerch-majorant-vs-direct @ alpha=0.5, rho=0.3")
            .unwrap();
        assert!(lm.passed);
        let failed: Vec<_> = reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| &r.name)
            .collect();
        assert!(failed.is_empty(), "failed: {failed:?}");
    }
}
