//! Extremal maps, their real profiles and sharpness witnesses.
//!
//! Each extremal map has the form `F(z) = π/(4M)·z − Σ_{n≥2} c_n zⁿ` with
//! `c_n` the class's coefficient bound. On `[0, 1)` it reduces to the real
//! profile `h0(x) = π/(4M)·x − S(x)`, whose slope is the margin `J(x)`.
//! `h0` rises on `[0, rho]`, falls after, and peaks at `h0(rho) = R`;
//! a level set of `h0` straddling `rho` gives two points with equal image.

use num_complex::Complex64;
use serde::Serialize;

use crate::bisect::bisect_sign_change;
use crate::error::{Error, Result};
use crate::radii::{BRACKET_UPPER, BRACKET_WIDTH_TOL};
use crate::series::{
    coeff_bound, direct_sum, majorant, w0h_branch, ClassSpec, CoeffRule, W0hBranch, Weight,
    LERCH_FORM_MIN_GAP,
};
use crate::specfun::{lerch_phi, log1m, CompensatedSum, ToleranceConfig};

/// A witness must satisfy `|h0(x1) − h0(x2)| <= WITNESS_GAP_TOL`.
pub const WITNESS_GAP_TOL: f64 = 1e-10;
/// `r` must exceed the computed peak by this much before a witness is
/// attempted; `rho` itself is only known to about this accuracy.
pub const WITNESS_MIN_EXCESS: f64 = 1e-9;

/// Two distinct points of `D_r` with (numerically) equal image under the
/// extremal map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub r: f64,
    /// Point on the falling branch, `rho < x1 < r`.
    pub x1: f64,
    /// Point on the rising branch, `0 < x2 < rho`.
    pub x2: f64,
    pub gap: f64,
    /// Profile peak used as `rho`.
    pub rho: f64,
    /// Zero of `h0` past the peak, when it had to clip `x1`.
    pub second_zero: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub x: f64,
    pub value: f64,
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} needs 0 <= x < 1, got {x}")))
    }
}

/// Real profile `h0(x) = π/(4M)·x − S(x)` on `[0, 1)`.
///
/// For `P0H` this is `π/(4M)·x − 2M(x + (1 − x) ln(1 − x))`.
pub fn profile_h0(class: &ClassSpec, x: f64, cfg: &ToleranceConfig) -> Result<f64> {
    check_unit("profile", x)?;
    Ok(class.linear_term() * x - majorant(class, x, cfg)?)
}

/// `h0'(x)`, differentiated from the profile's own representation.
///
/// The `W0H` branch with `0 < α < 1` uses
/// `π/(4M) + 2 + 2/((1 − α)x) − (2/(αx)) Φ(x, 1, (1 − α)/α)`, which shares
/// nothing with the `Φ(r, 1, 1/α)` form of the margin.
pub fn profile_slope(class: &ClassSpec, x: f64, cfg: &ToleranceConfig) -> Result<f64> {
    class.validate()?;
    check_unit("profile slope", x)?;
    let lam = class.linear_term();
    if x == 0.0 {
        return Ok(lam);
    }
    match *class {
        ClassSpec::P0H { m } => Ok(lam + 2.0 * m * log1m(x)?),
        ClassSpec::W0H { alpha, .. } => match w0h_branch(alpha) {
            W0hBranch::Zero => Ok(lam - 2.0 * x / (1.0 - x)),
            W0hBranch::One => Ok(lam + 2.0 + 2.0 * log1m(x)? / x),
            W0hBranch::BelowOne if (1.0 - alpha) * x >= LERCH_FORM_MIN_GAP => {
                let scale = 2.0 / (alpha * x);
                let inner = cfg.with_abs_tol(0.5 * cfg.abs_tol / scale);
                let phi = lerch_phi(x, 1, (1.0 - alpha) / alpha, &inner)?;
                Ok(lam + 2.0 + 2.0 / ((1.0 - alpha) * x) - scale * phi.value)
            }
            W0hBranch::BelowOne | W0hBranch::AboveOne => {
                let rule = CoeffRule::for_class(*class);
                Ok(lam - direct_sum(&rule, Weight::Derivative, x, cfg)?.value)
            }
        },
        ClassSpec::GkH { .. } => {
            let rule = CoeffRule::for_class(*class);
            Ok(lam - direct_sum(&rule, Weight::Derivative, x, cfg)?.value)
        }
    }
}

/// The extremal map `F(z)` for `|z| < 1`.
///
/// `P0H` uses the closed form with the principal logarithm; the other
/// classes sum `Σ c_n zⁿ` directly, with remainder at most
/// `c_N |z|^N · |z|/(1 − |z|)` kept below a quarter of `abs_tol` so the
/// real-axis values stay within `abs_tol` of the closed-form profile.
pub fn extremal_f(class: &ClassSpec, z: Complex64, cfg: &ToleranceConfig) -> Result<Complex64> {
    class.validate()?;
    let modulus = z.norm();
    if modulus.is_nan() || modulus >= 1.0 {
        return Err(Error::domain(format!(
            "extremal map needs |z| < 1, got |z| = {modulus}"
        )));
    }
    let lam = class.linear_term();
    if z == Complex64::new(0.0, 0.0) {
        return Ok(z);
    }
    match *class {
        ClassSpec::P0H { m } => {
            let one = Complex64::new(1.0, 0.0);
            let w = one - z;
            Ok(z * lam - (z + w * w.ln()) * (2.0 * m))
        }
        _ => {
            let rule = CoeffRule::for_class(*class);
            let mut re = CompensatedSum::default();
            let mut im = CompensatedSum::default();
            let start = rule.start_index.max(2);
            let mut pow = z.powu(start as u32);
            let mut pow_abs = modulus.powi(start as i32);
            let mut last_bound = f64::INFINITY;
            for n in (start..).take(cfg.max_terms) {
                let c = coeff_bound(&rule, n);
                let t = pow * c;
                re.add(t.re);
                im.add(t.im);
                let bound = c * pow_abs * modulus / (1.0 - modulus);
                last_bound = bound;
                if bound <= 0.25 * cfg.abs_tol {
                    let s = Complex64::new(re.value(), im.value());
                    return Ok(z * lam - s);
                }
                pow *= z;
                pow_abs *= modulus;
            }
            Err(Error::Budget {
                what: "extremal map series",
                limit: cfg.max_terms,
                last_bound,
            })
        }
    }
}

/// Taylor coefficients `[F(0), F'(0), F''(0)/2!, ...]` of the extremal map
/// up to order `n_max`.
pub fn extremal_coefficients(class: &ClassSpec, n_max: u64) -> Vec<f64> {
    let rule = CoeffRule::for_class(*class);
    (0..=n_max)
        .map(|n| match n {
            0 => 0.0,
            1 => class.linear_term(),
            _ => -coeff_bound(&rule, n),
        })
        .collect()
}

/// Maximiser of `h0` on `[0, 1)`, the zero of [`profile_slope`].
pub fn peak_of_profile(class: &ClassSpec, cfg: &ToleranceConfig) -> Result<f64> {
    class.validate()?;
    let b = bisect_sign_change(
        "profile peak",
        0.0,
        BRACKET_UPPER,
        BRACKET_WIDTH_TOL,
        cfg.max_iters,
        |x| profile_slope(class, x, cfg),
    )?;
    Ok(b.root)
}

/// Builds `x1 > rho > x2` in `D_r` with `h0(x1) = h0(x2)`.
///
/// `x1 = rho + ε` with `ε = (r − rho)/2`, unless that point already lies
/// past the second zero `r*` of `h0`, in which case `ε = (r* − rho)/2`.
/// `x2` is the matching level on the rising branch.
pub fn sharpness_witness(class: &ClassSpec, r: f64, cfg: &ToleranceConfig) -> Result<Witness> {
    class.validate()?;
    if r.is_nan() || r > 1.0 {
        return Err(Error::domain(format!(
            "witness radius must be <= 1, got {r}"
        )));
    }
    let rho = peak_of_profile(class, cfg)?;
    if r <= rho + WITNESS_MIN_EXCESS {
        return Err(Error::domain(format!(
            "no witness for r = {r}: the extremal map is univalent on D_r for r <= rho = {rho}"
        )));
    }
    let peak = profile_h0(class, rho, cfg)?;

    let mut x1 = rho + 0.5 * (r - rho);
    let mut level = profile_h0(class, x1, cfg)?;
    let mut second_zero = None;
    if level <= 0.0 {
        let z = bisect_sign_change(
            "profile second zero",
            rho,
            x1,
            cfg.rel_tol * x1,
            cfg.max_iters,
            |x| profile_h0(class, x, cfg),
        )?;
        x1 = rho + 0.5 * (z.root - rho);
        level = profile_h0(class, x1, cfg)?;
        second_zero = Some(z.root);
    }
    if !(level > 0.0 && level < peak) {
        return Err(Error::Bracket(format!(
            "profile level {level} at x1 = {x1} is not inside (0, {peak})"
        )));
    }

    let b = bisect_sign_change(
        "witness level",
        0.0,
        rho,
        (cfg.rel_tol * rho).max(f64::EPSILON * rho),
        cfg.max_iters,
        |x| Ok(level - profile_h0(class, x, cfg)?),
    )?;
    let x2 = b.root;
    let gap = (profile_h0(class, x2, cfg)? - level).abs();
    if gap > WITNESS_GAP_TOL {
        return Err(Error::RouteMismatch {
            what: "witness level match",
            lhs: level,
            rhs: level + gap,
            diff: gap,
        });
    }
    Ok(Witness {
        r,
        x1,
        x2,
        gap,
        rho,
        second_zero,
    })
}

/// `points` evenly spaced samples of `h0` on `[0, x_max]`.
pub fn sample_profile(
    class: &ClassSpec,
    points: usize,
    x_max: f64,
    cfg: &ToleranceConfig,
) -> Result<Vec<ProfileSample>> {
    check_unit("profile sampling", x_max)?;
    sample_grid(points, x_max)
        .map(|x| profile_h0(class, x, cfg).map(|value| ProfileSample { x, value }))
        .collect()
}

pub(crate) fn sample_grid(points: usize, x_max: f64) -> impl Iterator<Item = f64> {
    let denom = points.saturating_sub(1).max(1) as f64;
    (0..points).map(move |i| x_max * i as f64 / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radii::{rho1, solve_rho};
    use crate::series::SumStart;
    use std::f64::consts::PI;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn profile_at_origin_vanishes() {
        for c in [
            ClassSpec::p0h(1.0).unwrap(),
            ClassSpec::w0h(1.0, 0.3).unwrap(),
            ClassSpec::gkh(1.0, 0.5, 2, SumStart::Class).unwrap(),
        ] {
            assert_eq!(profile_h0(&c, 0.0, &cfg()).unwrap(), 0.0);
            assert_eq!(
                extremal_f(&c, Complex64::new(0.0, 0.0), &cfg())
                    .unwrap()
                    .norm(),
                0.0
            );
        }
    }

    #[test]
    fn p0h_profile_values() {
        let c = ClassSpec::p0h(1.0).unwrap();
        // 0.2π/4 − 2(0.2 + 0.8 ln 0.8), 30-digit reference.
        let v = profile_h0(&c, 0.2, &cfg()).unwrap();
        assert!((v - 0.114_109_314_782_225_2).abs() < 1e-15);
        let f = extremal_f(&c, Complex64::new(0.2, 0.0), &cfg()).unwrap();
        assert!((f.re - v).abs() < 1e-15 && f.im == 0.0);
        let peak = profile_h0(&c, rho1(1.0).unwrap(), &cfg()).unwrap();
        assert!((peak - 0.135_861_976_709_002_74).abs() < 1e-14);
    }

    #[test]
    fn w0h_one_complex_value() {
        // π/4·z − Σ_{n≥2} 2 zⁿ/n² at z = 0.3i, summed term by term here.
        let c = ClassSpec::w0h(1.0, 1.0).unwrap();
        let z = Complex64::new(0.0, 0.3);
        let mut expected = z * (PI / 4.0);
        let mut pow = z * z;
        for n in 2..200u32 {
            expected -= pow * (2.0 / f64::from(n * n));
            pow *= z;
        }
        let got = extremal_f(&c, z, &cfg()).unwrap();
        assert!((got - expected).norm() < 2e-12);
    }

    #[test]
    fn extremal_domain() {
        let c = ClassSpec::w0h(1.0, 0.5).unwrap();
        assert!(extremal_f(&c, Complex64::new(0.6, 0.8), &cfg()).is_err());
        assert!(profile_h0(&c, 1.0, &cfg()).is_err());
    }

    #[test]
    fn peaks_match_roots() {
        let p = peak_of_profile(&ClassSpec::p0h(1.0).unwrap(), &cfg()).unwrap();
        assert!((p - 0.324_768_093_344_222_8).abs() < 1e-12);
        let w = peak_of_profile(&ClassSpec::w0h(1.0, 0.0).unwrap(), &cfg()).unwrap();
        assert!((w - PI / (8.0 + PI)).abs() < 1e-12);
        let g = peak_of_profile(
            &ClassSpec::gkh(1.0, 0.0, 1, SumStart::Faithful).unwrap(),
            &cfg(),
        )
        .unwrap();
        assert!((g - 0.152_633_373_399_368_6).abs() < 1e-12);
        let half = ClassSpec::w0h(1.5, 0.5).unwrap();
        let a = peak_of_profile(&half, &cfg()).unwrap();
        let b = solve_rho(&half, &cfg()).unwrap().rho;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn witness_for_p0h() {
        let c = ClassSpec::p0h(1.0).unwrap();
        let rho = rho1(1.0).unwrap();
        let w = sharpness_witness(&c, rho + 0.1, &cfg()).unwrap();
        assert!((w.x1 - (rho + 0.05)).abs() < 1e-12);
        assert!(w.x2 > 0.0 && w.x2 < rho);
        assert!(w.gap <= WITNESS_GAP_TOL);
        assert!(w.second_zero.is_none());
        assert!(matches!(
            sharpness_witness(&c, rho, &cfg()),
            Err(Error::Domain(_))
        ));
        assert!(sharpness_witness(&c, 1.5, &cfg()).is_err());
    }

    #[test]
    fn witness_for_w0h_one() {
        let c = ClassSpec::w0h(1.0, 1.0).unwrap();
        let w = sharpness_witness(&c, 0.7, &cfg()).unwrap();
        assert!((w.x1 - 0.602_591_992_2).abs() < 1e-9);
        assert!(w.x2 < 0.5051);
        assert!(w.gap <= WITNESS_GAP_TOL);
    }

    #[test]
    fn witness_clips_at_second_zero() {
        // P0H(M=1): h0(1) = π/4 − 2 < 0, so r = 1 sends ρ + (1 − ρ)/2 past r*.
        let c = ClassSpec::p0h(1.0).unwrap();
        let w = sharpness_witness(&c, 1.0, &cfg()).unwrap();
        let z = w.second_zero.expect("x1 must be clipped");
        assert!(profile_h0(&c, z, &cfg()).unwrap().abs() < 1e-9);
        assert!((w.x1 - (w.rho + 0.5 * (z - w.rho))).abs() < 1e-15);
        assert!(w.gap <= WITNESS_GAP_TOL);
    }

    #[test]
    fn coefficients_meet_the_bounds() {
        let c = ClassSpec::gkh(1.0, 0.5, 1, SumStart::Faithful).unwrap();
        let coeffs = extremal_coefficients(&c, 6);
        assert_eq!(coeffs[0], 0.0);
        assert_eq!(coeffs[1], PI / 4.0);
        let rule = CoeffRule::for_class(c);
        for n in 2..=6u64 {
            assert_eq!(coeffs[n as usize].abs(), coeff_bound(&rule, n));
        }
    }
}
