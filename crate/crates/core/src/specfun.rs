//! Real special functions with rigorous truncation bounds.
//!
//! Every series here has positive terms whose consecutive ratio is bounded
//! by some `q < 1` from a known index on, so the remainder after the last
//! included term `t_N` is at most `t_N * q / (1 - q)`. Summation stops as
//! soon as that bound drops to `abs_tol`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerances and budgets shared by all numerics in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceConfig {
    /// Absolute target for series truncation bounds.
    pub abs_tol: f64,
    /// Relative bracket width at which the witness bisections stop.
    pub rel_tol: f64,
    /// Maximum number of series terms per evaluation.
    pub max_terms: usize,
    /// Maximum number of bisection steps per root or level search.
    pub max_iters: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_terms: 10_000_000,
            max_iters: 200,
        }
    }
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_terms: usize, max_iters: usize) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_terms,
            max_iters,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::domain(format!(
                "abs_tol must be > 0, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::domain(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::domain("max_terms must be >= 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::domain("max_iters must be >= 1"));
        }
        Ok(())
    }

    /// Same budgets, different absolute tolerance.
    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }
}

/// A truncated series value with an enclosure radius for the full sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumResult {
    pub value: f64,
    /// The exact infinite sum lies in `[value - tail_bound, value + tail_bound]`.
    pub tail_bound: f64,
    pub terms_used: usize,
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums `term(0) + term(1) + ...` where every term is non-negative and,
/// for all `j >= i`, `term(j + 1) <= ratio(i) * term(j)`.
///
/// Stops when the geometric remainder bound is at most `cfg.abs_tol`.
pub(crate) fn sum_ratio_bounded<T, Q>(
    what: &'static str,
    cfg: &ToleranceConfig,
    mut term: T,
    ratio: Q,
) -> Result<SumResult>
where
    T: FnMut(usize) -> f64,
    Q: Fn(usize) -> f64,
{
    let mut acc = CompensatedSum::default();
    let mut last_bound = f64::INFINITY;
    for i in 0..cfg.max_terms {
        let t = term(i);
        acc.add(t);
        let q = ratio(i);
        if t == 0.0 {
            // Non-negative terms dominated by a zero term vanish identically.
            return Ok(SumResult {
                value: acc.value(),
                tail_bound: 0.0,
                terms_used: i + 1,
            });
        }
        if q < 1.0 {
            let bound = t * q / (1.0 - q);
            last_bound = bound;
            if bound <= cfg.abs_tol {
                return Ok(SumResult {
                    value: acc.value(),
                    tail_bound: bound,
                    terms_used: i + 1,
                });
            }
        }
    }
    Err(Error::Budget {
        what,
        limit: cfg.max_terms,
        last_bound,
    })
}

/// Lerch transcendent `Φ(z, s, a) = Σ_{k≥0} z^k / (k + a)^s` for real
/// `0 <= z < 1`, integer `s >= 1` and `a > 0`.
pub fn lerch_phi(z: f64, s: u32, a: f64, cfg: &ToleranceConfig) -> Result<SumResult> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::domain(format!(
            "lerch_phi needs 0 <= z < 1, got z = {z}"
        )));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("lerch_phi needs a > 0, got a = {a}")));
    }
    if s == 0 {
        return Err(Error::domain("lerch_phi needs s >= 1"));
    }
    let s = s as i32;
    let mut zk = 1.0;
    sum_ratio_bounded(
        "lerch_phi",
        cfg,
        |k| {
            if k > 0 {
                zk *= z;
            }
            zk / (k as f64 + a).powi(s)
        },
        // (k+a)^s / (k+1+a)^s < 1, so consecutive ratios never exceed z.
        |_| z,
    )
}

/// Dilogarithm `Li₂(z) = Σ_{n≥1} zⁿ / n²` for real `0 <= z <= 1`.
///
/// At `z = 1` the geometric bound is useless; the remainder after `N`
/// terms lies in `[1/(N+1), 1/N]`, so the midpoint of that interval is
/// added and half its width becomes the bound.
pub fn dilog(z: f64, cfg: &ToleranceConfig) -> Result<SumResult> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::domain(format!(
            "dilog needs 0 <= z <= 1, got z = {z}"
        )));
    }
    if z == 0.0 {
        return Ok(SumResult {
            value: 0.0,
            tail_bound: 0.0,
            terms_used: 1,
        });
    }
    if z == 1.0 {
        // 1/(2N(N+1)) <= abs_tol
        let n = (0.5 / cfg.abs_tol).sqrt().ceil().max(1.0);
        if n > cfg.max_terms as f64 {
            return Err(Error::Budget {
                what: "dilog",
                limit: cfg.max_terms,
                last_bound: 1.0 / (2.0 * cfg.max_terms as f64 * (cfg.max_terms as f64 + 1.0)),
            });
        }
        let n = n as usize;
        let mut acc = CompensatedSum::default();
        // Smallest terms first.
        for k in (1..=n).rev() {
            let k = k as f64;
            acc.add(1.0 / (k * k));
        }
        let nf = n as f64;
        let lower = 1.0 / (nf + 1.0);
        let upper = 1.0 / nf;
        acc.add(0.5 * (lower + upper));
        return Ok(SumResult {
            value: acc.value(),
            tail_bound: 0.5 * (upper - lower),
            terms_used: n,
        });
    }
    let mut zn = 1.0;
    sum_ratio_bounded(
        "dilog",
        cfg,
        |i| {
            zn *= z;
            let n = (i + 1) as f64;
            zn / (n * n)
        },
        |_| z,
    )
}

/// `ln(1 - z)` for `0 <= z < 1`, accurate to machine precision near zero.
pub fn log1m(z: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::domain(format!(
            "log1m needs 0 <= z < 1, got z = {z}"
        )));
    }
    Ok((-z).ln_1p())
}
