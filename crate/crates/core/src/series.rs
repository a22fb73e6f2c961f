//! Coefficient bounds for the three mapping classes and the two series
//! built from them:
//!
//! * the margin `J(r) = π/(4M) − Σ_{n≥2} c_n n r^{n−1}`, whose unique zero
//!   in `(0, 1)` is the univalence radius;
//! * the majorant `S(ρ) = Σ_{n≥2} c_n ρⁿ`, subtracted from `π/(4M)·ρ` to
//!   get the schlicht-disc radius.
//!
//! Here `c_n` bounds `|a_n| + |b_n|`. Closed forms are used wherever the
//! sums reduce to logarithms, the dilogarithm or the Lerch transcendent;
//! everything else is summed directly with a truncation bound.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{self, dilog, lerch_phi, log1m, sum_ratio_bounded, ToleranceConfig};

/// `|α − 1|` below which the `1/(1 − α)` forms are replaced by the
/// dilogarithm forms.
pub const ALPHA_ONE_TOL: f64 = 1e-8;

/// The `Φ(x, 1, (1 − α)/α)` forms cancel terms of size `1/((1 − α)x)`, so
/// they are used only while `(1 − α)·x` (majorant: `1 − α`) stays above
/// this gap; closer to `α = 1` the series is summed directly.
pub const LERCH_FORM_MIN_GAP: f64 = 1e-2;

/// Where the `G_H^k(α, 1)` coefficient sums begin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumStart {
    /// Sum from `n = 2` for every `k`; the radii do not depend on `k`.
    #[default]
    Faithful,
    /// Sum from `n = k + 1`, where the class's coefficient bound applies.
    Class,
}

impl fmt::Display for SumStart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SumStart::Faithful => f.write_str("faithful"),
            SumStart::Class => f.write_str("class"),
        }
    }
}

/// One of the three harmonic mapping classes with its parameters.
///
/// `m` is the bound `|f| < M`; `alpha` and `k` are the class parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum ClassSpec {
    P0H {
        #[serde(rename = "M")]
        m: f64,
    },
    W0H {
        #[serde(rename = "M")]
        m: f64,
        alpha: f64,
    },
    GkH {
        #[serde(rename = "M")]
        m: f64,
        alpha: f64,
        k: u32,
        sum_start: SumStart,
    },
}

fn check_m(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("M must be > 0, got {m}")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must be >= 0, got {alpha}")))
    }
}

impl ClassSpec {
    pub fn p0h(m: f64) -> Result<Self> {
        check_m(m)?;
        Ok(ClassSpec::P0H { m })
    }

    pub fn w0h(m: f64, alpha: f64) -> Result<Self> {
        check_m(m)?;
        check_alpha(alpha)?;
        Ok(ClassSpec::W0H { m, alpha })
    }

    pub fn gkh(m: f64, alpha: f64, k: u32, sum_start: SumStart) -> Result<Self> {
        check_m(m)?;
        check_alpha(alpha)?;
        if k < 1 {
            return Err(Error::domain("k must be >= 1"));
        }
        Ok(ClassSpec::GkH {
            m,
            alpha,
            k,
            sum_start,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ClassSpec::P0H { m } => check_m(m),
            ClassSpec::W0H { m, alpha } => check_m(m).and(check_alpha(alpha)),
            ClassSpec::GkH { m, alpha, k, .. } => {
                check_m(m)?;
                check_alpha(alpha)?;
                if k < 1 {
                    return Err(Error::domain("k must be >= 1"));
                }
                Ok(())
            }
        }
    }

    pub fn m(&self) -> f64 {
        match *self {
            ClassSpec::P0H { m } | ClassSpec::W0H { m, .. } | ClassSpec::GkH { m, .. } => m,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            ClassSpec::P0H { .. } => None,
            ClassSpec::W0H { alpha, .. } | ClassSpec::GkH { alpha, .. } => Some(alpha),
        }
    }

    pub fn k(&self) -> Option<u32> {
        match *self {
            ClassSpec::GkH { k, .. } => Some(k),
            _ => None,
        }
    }

    /// Short kind tag used on the command line and in CSV output.
    pub fn kind(&self) -> &'static str {
        match self {
            ClassSpec::P0H { .. } => "p0h",
            ClassSpec::W0H { .. } => "w0h",
            ClassSpec::GkH { .. } => "gkh",
        }
    }

    /// `π/(4M)`, the lower bound on `λ_f(0)` and the linear coefficient of
    /// every margin and profile.
    pub fn linear_term(&self) -> f64 {
        PI / (4.0 * self.m())
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ClassSpec::P0H { m } => write!(f, "P0H(M={m})"),
            ClassSpec::W0H { m, alpha } => write!(f, "W0H(alpha={alpha}, M={m})"),
            ClassSpec::GkH {
                m,
                alpha,
                k,
                sum_start,
            } => write!(f, "GkH(k={k}, alpha={alpha}, M={m}, start={sum_start})"),
        }
    }
}

/// The coefficient bound of a class together with the first index at
/// which it is nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoeffRule {
    pub class: ClassSpec,
    pub start_index: u64,
}

impl CoeffRule {
    pub fn for_class(class: ClassSpec) -> Self {
        let start_index = match class {
            ClassSpec::GkH {
                k,
                sum_start: SumStart::Class,
                ..
            } => u64::from(k).max(1) + 1,
            _ => 2,
        };
        Self { class, start_index }
    }
}

/// Sharp bound on `|a_n| + |b_n|` (zero below the rule's start index).
pub fn coeff_bound(rule: &CoeffRule, n: u64) -> f64 {
    if n < rule.start_index || n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    match rule.class {
        ClassSpec::P0H { m } => 2.0 * m / (nf * (nf - 1.0)),
        ClassSpec::W0H { alpha, .. } => 2.0 / (nf * (alpha * nf + 1.0 - alpha)),
        ClassSpec::GkH { alpha, .. } => 2.0 / (1.0 + (nf - 1.0) * alpha),
    }
}

/// Which weight multiplies `c_n` in a coefficient series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// `n r^{n−1}`, the margin series.
    Derivative,
    /// `rⁿ`, the majorant series.
    Power,
}

/// Direct summation of `Σ_{n ≥ start} c_n w_n(r)`.
///
/// Every rule in this crate has `c_n` nonincreasing in `n` from its start
/// index, so the term ratio is at most `r` for the power weight and
/// `r (n + 1)/n` for the derivative weight.
pub fn direct_sum(
    rule: &CoeffRule,
    weight: Weight,
    r: f64,
    cfg: &ToleranceConfig,
) -> Result<specfun::SumResult> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!("series needs 0 <= r < 1, got {r}")));
    }
    let start = rule.start_index.max(2);
    let mut pow = match weight {
        Weight::Derivative => r.powi((start - 1) as i32),
        Weight::Power => r.powi(start as i32),
    };
    match weight {
        Weight::Derivative => sum_ratio_bounded(
            "coefficient series",
            cfg,
            |i| {
                let n = start + i as u64;
                if i > 0 {
                    pow *= r;
                }
                coeff_bound(rule, n) * n as f64 * pow
            },
            |i| {
                let n = (start + i as u64) as f64;
                r * (n + 1.0) / n
            },
        ),
        Weight::Power => sum_ratio_bounded(
            "coefficient series",
            cfg,
            |i| {
                if i > 0 {
                    pow *= r;
                }
                coeff_bound(rule, start + i as u64) * pow
            },
            |_| r,
        ),
    }
}

/// How a `W0H` coefficient series is evaluated for a given `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum W0hBranch {
    Zero,
    BelowOne,
    One,
    AboveOne,
}

pub(crate) fn w0h_branch(alpha: f64) -> W0hBranch {
    if alpha == 0.0 {
        W0hBranch::Zero
    } else if (alpha - 1.0).abs() < ALPHA_ONE_TOL {
        W0hBranch::One
    } else if alpha < 1.0 {
        W0hBranch::BelowOne
    } else {
        W0hBranch::AboveOne
    }
}

fn check_unit(name: &str, r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} needs 0 <= r < 1, got {r}")))
    }
}

/// Margin `J(r) = π/(4M) − Σ_{n≥2} c_n n r^{n−1}`.
pub fn margin(class: &ClassSpec, r: f64, cfg: &ToleranceConfig) -> Result<f64> {
    class.validate()?;
    check_unit("margin", r)?;
    let lam = class.linear_term();
    if r == 0.0 {
        return Ok(lam);
    }
    match *class {
        ClassSpec::P0H { m } => Ok(lam + 2.0 * m * log1m(r)?),
        ClassSpec::W0H { alpha, .. } => match w0h_branch(alpha) {
            W0hBranch::Zero => Ok(lam - 2.0 * r / (1.0 - r)),
            W0hBranch::One => Ok(lam + 2.0 * log1m(r)? / r + 2.0),
            W0hBranch::BelowOne | W0hBranch::AboveOne => {
                // Σ_{n≥2} r^{n−1}/(αn + 1 − α) = Φ(r, 1, 1/α)/α − 1
                let inner = cfg.with_abs_tol(0.5 * cfg.abs_tol * alpha);
                let phi = lerch_phi(r, 1, 1.0 / alpha, &inner)?;
                Ok(lam - 2.0 * (phi.value / alpha - 1.0))
            }
        },
        ClassSpec::GkH { .. } => {
            let rule = CoeffRule::for_class(*class);
            Ok(lam - direct_sum(&rule, Weight::Derivative, r, cfg)?.value)
        }
    }
}

/// Majorant `S(ρ) = Σ_{n≥2} c_n ρⁿ`, always the positive series value,
/// accurate to half of `abs_tol`.
pub fn majorant(class: &ClassSpec, rho: f64, cfg: &ToleranceConfig) -> Result<f64> {
    class.validate()?;
    check_unit("majorant", rho)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    let half = cfg.with_abs_tol(0.5 * cfg.abs_tol);
    match *class {
        ClassSpec::P0H { m } => Ok(2.0 * m * (rho + (1.0 - rho) * log1m(rho)?)),
        ClassSpec::W0H { alpha, .. } => match w0h_branch(alpha) {
            W0hBranch::Zero => Ok(2.0 * (-log1m(rho)? - rho)),
            W0hBranch::One => {
                Ok(2.0 * (dilog(rho, &cfg.with_abs_tol(0.25 * cfg.abs_tol))?.value - rho))
            }
            W0hBranch::BelowOne if 1.0 - alpha >= LERCH_FORM_MIN_GAP => {
                let scale = 2.0 / (1.0 - alpha);
                let inner = cfg.with_abs_tol(0.5 * half.abs_tol / scale);
                let a = (1.0 - alpha) / alpha;
                let phi = lerch_phi(rho, 1, a, &inner)?;
                Ok(scale * (alpha / (1.0 - alpha) + rho * (alpha - 1.0) - log1m(rho)? - phi.value))
            }
            // Ill-conditioned near α = 1; above 1 the Lerch parameter
            // (1 − α)/α would be negative.
            W0hBranch::BelowOne | W0hBranch::AboveOne => {
                let rule = CoeffRule::for_class(*class);
                Ok(direct_sum(&rule, Weight::Power, rho, &half)?.value)
            }
        },
        ClassSpec::GkH { .. } => {
            let rule = CoeffRule::for_class(*class);
            Ok(direct_sum(&rule, Weight::Power, rho, &half)?.value)
        }
    }
}

/// Splits `2/(n(αn + 1 − α))` into `2/((1 − α)n) − 2α/((1 − α)(αn + 1 − α))`.
pub fn partial_fraction_split(n: u64, alpha: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::domain(format!(
            "partial_fraction_split needs n >= 2, got {n}"
        )));
    }
    check_alpha(alpha)?;
    if (alpha - 1.0).abs() < ALPHA_ONE_TOL {
        return Err(Error::domain(
            "partial fraction split is singular at alpha = 1",
        ));
    }
    let nf = n as f64;
    let first = 2.0 / ((1.0 - alpha) * nf);
    let second = 2.0 * alpha / ((1.0 - alpha) * (alpha * nf + 1.0 - alpha));
    Ok((first, second))
}
