//! Closed-form exponent bounds, predictions and derived constants.
//!
//! Everything here is a pure function of its arguments. Irrational constants
//! are computed from their integer expressions at call time rather than typed
//! in as decimals.
//!
//! Notation: `xi` is the LFPP parameter, `lam` a candidate value of the
//! distance exponent at `xi`, `gamma` the LQG parameter and `d` a candidate
//! LQG dimension.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Knot of the piecewise bounds, `1/sqrt(6)`, where the exponent is known to be `1/6`.
pub fn xi_knot() -> f64 {
    1.0 / 6f64.sqrt()
}

/// `sqrt(8/3)`, the LQG parameter whose dimension is known to be 4.
pub fn gamma_knot() -> f64 {
    (8.0f64 / 3.0).sqrt()
}

/// Slope of the linear branch, `sqrt(5/2) - 1/sqrt(6)`.
fn linear_slope() -> f64 {
    2.5f64.sqrt() - xi_knot()
}

/// Offset of the linear branch, `(sqrt(15) - 2) / 6`.
fn linear_offset() -> f64 {
    (15f64.sqrt() - 2.0) / 6.0
}

fn linear_branch(xi: f64) -> f64 {
    linear_slope() * xi - linear_offset()
}

fn check_xi(xi: f64) -> Result<()> {
    if xi.is_finite() && xi >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain("xi", xi, "[0, inf)"))
    }
}

fn check_gamma_closed(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma <= 2.0 {
        Ok(())
    } else {
        Err(Error::domain("gamma", gamma, "(0, 2]"))
    }
}

fn check_gamma_open(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 2.0 {
        Ok(())
    } else {
        Err(Error::domain("gamma", gamma, "(0, 2)"))
    }
}

fn check_d(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("d", d, "(0, inf)"))
    }
}

/// Lower bound for the distance exponent.
pub fn lambda_lower(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    Ok(if xi <= xi_knot() {
        linear_branch(xi).max(-xi * xi / 2.0)
    } else {
        (0.25 - xi * xi / 2.0).max(-0.5)
    })
}

/// Lower bound strengthened by the constraint `lambda >= 0`, which holds for
/// the annulus-crossing variant of the exponent.
pub fn lambda_lower_nonneg(xi: f64) -> Result<f64> {
    Ok(lambda_lower(xi)?.max(0.0))
}

/// Upper bound for the distance exponent.
pub fn lambda_upper(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    Ok(if xi <= xi_knot() {
        (0.25 - xi * xi / 2.0).min(2f64.sqrt() * xi)
    } else {
        linear_branch(xi).min(1.0)
    })
}

/// Watabiki's dimension prediction.
pub fn watabiki_d(gamma: f64) -> Result<f64> {
    check_gamma_closed(gamma)?;
    let g2 = gamma * gamma;
    Ok(1.0 + g2 / 4.0 + 0.25 * ((4.0 + g2).powi(2) + 16.0 * g2).sqrt())
}

/// Extension of Watabiki's prediction to all `xi`: `min(xi^2, 1)`.
pub fn watabiki_lambda_ext(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    Ok((xi * xi).min(1.0))
}

/// The alternative guess `min(xi / sqrt(6), 1)`.
pub fn dg_guess_lambda(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    Ok((xi / 6f64.sqrt()).min(1.0))
}

/// Dimension corresponding to the alternative guess, `2 + gamma^2/2 + gamma/sqrt(6)`.
pub fn dg_guess_d(gamma: f64) -> Result<f64> {
    check_gamma_closed(gamma)?;
    Ok(2.0 + gamma * gamma / 2.0 + gamma / 6f64.sqrt())
}

fn d_linear_branch(gamma: f64) -> f64 {
    (12.0 - 6f64.sqrt() * gamma + 3.0 * 10f64.sqrt() * gamma + 3.0 * gamma * gamma)
        / (4.0 + 15f64.sqrt())
}

fn d_quadratic_branch(gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    (4.0 + g2 + (16.0 + 2.0 * g2 + g2 * g2).sqrt()) / 3.0
}

/// `2 gamma^2 / (4 + gamma^2 - sqrt(16 + gamma^4))`, rewritten through the
/// conjugate so the vanishing denominator at small `gamma` cancels exactly:
/// `(4 + gamma^2 + sqrt(16 + gamma^4)) / 4`.
fn d_small_gamma_branch(gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    (4.0 + g2 + (16.0 + g2 * g2).sqrt()) / 4.0
}

fn d_lower_formula(gamma: f64) -> f64 {
    if gamma <= gamma_knot() {
        d_linear_branch(gamma).max(d_small_gamma_branch(gamma))
    } else {
        d_quadratic_branch(gamma)
    }
}

fn d_upper_formula(gamma: f64) -> f64 {
    if gamma <= gamma_knot() {
        d_quadratic_branch(gamma).min(2.0 + gamma * gamma / 2.0 + 2f64.sqrt() * gamma)
    } else {
        d_linear_branch(gamma)
    }
}

/// Lower bound for the LQG dimension, `gamma` in `(0, 2)`.
pub fn d_lower(gamma: f64) -> Result<f64> {
    check_gamma_open(gamma)?;
    Ok(d_lower_formula(gamma))
}

/// Upper bound for the LQG dimension, `gamma` in `(0, 2)`.
pub fn d_upper(gamma: f64) -> Result<f64> {
    check_gamma_open(gamma)?;
    Ok(d_upper_formula(gamma))
}

/// One-sided limits `gamma -> 2^-` of `(d_lower, d_upper)`.
pub fn d_bounds_at_two() -> (f64, f64) {
    (d_lower_formula(2.0), d_upper_formula(2.0))
}

/// Background charge `Q = 2/gamma + gamma/2`.
pub fn background_charge(gamma: f64) -> f64 {
    2.0 / gamma + gamma / 2.0
}

/// Exponent at `xi = gamma/d` implied by dimension `d`: `1 - (gamma/d) Q`.
pub fn lambda_from_gamma(gamma: f64, d: f64) -> Result<f64> {
    check_gamma_closed(gamma)?;
    check_d(d)?;
    Ok(1.0 - gamma / d * background_charge(gamma))
}

/// Threshold `sqrt(2 + 2 lam + xi^2) - xi` balancing the two terms of the path split.
pub fn alpha_star(xi: f64, lam: f64) -> Result<f64> {
    let radicand = 2.0 + 2.0 * lam + xi * xi;
    if !(radicand >= 0.0) {
        return Err(Error::domain("2 + 2 lam + xi^2", radicand, "[0, inf)"));
    }
    Ok(radicand.sqrt() - xi)
}

/// Exponent bounding the `xi_tilde`-length of a near-geodesic for `xi`.
pub fn length_compare_exponent(xi: f64, xi_tilde: f64, lam: f64) -> Result<f64> {
    check_xi(xi_tilde)?;
    if xi_tilde > xi {
        return Err(Error::domain("xi_tilde", xi_tilde, "[0, xi]"));
    }
    Ok(lam - (xi - xi_tilde) * alpha_star(xi, lam)?)
}

/// Upper bound for the geodesic dimension given `lam = lambda(xi)`.
pub fn g_upper(xi: f64, lam: f64) -> Result<f64> {
    Ok(1.0 - lam + xi * alpha_star(xi, lam)?)
}

/// Heuristic bound for the Euclidean dimension of LQG geodesics, i.e.
/// [`g_upper`] at `xi = gamma/d` with `lam` from [`lambda_from_gamma`].
pub fn geodesic_gamma_bound(gamma: f64, d: f64) -> Result<f64> {
    check_gamma_closed(gamma)?;
    check_d(d)?;
    let xi = gamma / d;
    let lam = lambda_from_gamma(gamma, d)?;
    g_upper(xi, lam)
}

/// `Q(xi) = (1 - lam) / xi`.
pub fn q_of(xi: f64, lam: f64) -> Result<f64> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::domain("xi", xi, "(0, inf)"));
    }
    Ok((1.0 - lam) / xi)
}

/// Central charge `c = 25 - 6 Q^2`.
pub fn c_of(xi: f64, lam: f64) -> Result<f64> {
    let q = q_of(xi, lam)?;
    Ok(25.0 - 6.0 * q * q)
}

/// Interval of `xi` on which the extended Watabiki prediction is contradicted by the upper bound.
pub fn contradiction_interval() -> (f64, f64) {
    let left = 2.5f64.sqrt() - (2.0f64 / 3.0).sqrt();
    let right = (4.0 + 15f64.sqrt()) / (2f64.sqrt() * (3.0 * 5f64.sqrt() - 3f64.sqrt()));
    (left, right)
}

/// Below this `xi` the background charge is strictly decreasing.
pub fn q_mono_threshold() -> f64 {
    (2.0 - (113.0 - 8.0 * 15f64.sqrt()).sqrt() / 6.0).sqrt()
}

/// Closed-form quantities tabulated at one `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub xi: f64,
    pub lambda_lower: f64,
    pub lambda_upper: f64,
    pub lambda_watabiki_ext: f64,
    pub lambda_dg_guess: f64,
    pub alpha_star_at_lower: f64,
    pub g_upper_at_lower: f64,
    /// `None` at `xi = 0`, where Q diverges.
    pub q_at_lower: Option<f64>,
    pub q_at_upper: Option<f64>,
    pub c_at_lower: Option<f64>,
    pub c_at_upper: Option<f64>,
}

impl BoundsRow {
    pub fn at(xi: f64) -> Result<Self> {
        Self::with_lower(xi, lambda_lower)
    }

    /// Row whose lower bound also includes `lambda >= 0`.
    pub fn at_nonneg(xi: f64) -> Result<Self> {
        Self::with_lower(xi, lambda_lower_nonneg)
    }

    fn with_lower(xi: f64, lower: fn(f64) -> Result<f64>) -> Result<Self> {
        let lo = lower(xi)?;
        let hi = lambda_upper(xi)?;
        let (q_at_lower, q_at_upper, c_at_lower, c_at_upper) = if xi > 0.0 {
            (
                Some(q_of(xi, lo)?),
                Some(q_of(xi, hi)?),
                Some(c_of(xi, lo)?),
                Some(c_of(xi, hi)?),
            )
        } else {
            (None, None, None, None)
        };
        Ok(BoundsRow {
            xi,
            lambda_lower: lo,
            lambda_upper: hi,
            lambda_watabiki_ext: watabiki_lambda_ext(xi)?,
            lambda_dg_guess: dg_guess_lambda(xi)?,
            alpha_star_at_lower: alpha_star(xi, lo)?,
            g_upper_at_lower: g_upper(xi, lo)?,
            q_at_lower,
            q_at_upper,
            c_at_lower,
            c_at_upper,
        })
    }
}

/// Closed-form quantities tabulated at one `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub gamma: f64,
    pub d_lower: f64,
    pub d_upper: f64,
    pub d_watabiki: f64,
    pub d_dg_guess: f64,
    /// `gamma / d_upper`
    pub xi_of_gamma_lower: f64,
    /// `gamma / d_lower`
    pub xi_of_gamma_upper: f64,
    /// Geodesic dimension bound maximised over `d` in `[d_lower, d_upper]`;
    /// the bound decreases in `d`, so this is its value at `d_lower`.
    pub geodesic_dim_bound: f64,
}

impl GammaRow {
    pub fn at(gamma: f64) -> Result<Self> {
        let lo = d_lower(gamma)?;
        let hi = d_upper(gamma)?;
        Ok(GammaRow {
            gamma,
            d_lower: lo,
            d_upper: hi,
            d_watabiki: watabiki_d(gamma)?,
            d_dg_guess: dg_guess_d(gamma)?,
            xi_of_gamma_lower: gamma / hi,
            xi_of_gamma_upper: gamma / lo,
            geodesic_dim_bound: geodesic_gamma_bound(gamma, lo)?,
        })
    }
}

/// Which relation a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InequalityKind {
    /// Secant slope exceeds `alpha_star(xi, lam(xi))`.
    UpperDifferential,
    /// `lam + xi^2/2` decreases.
    Monotonicity,
    /// Secant slope exceeds 2 in absolute value.
    Lipschitz,
    /// Value outside `[-1/2, 1]`.
    Range,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: InequalityKind,
    pub xi_tilde: f64,
    pub xi: f64,
    /// How far the relation is broken; always positive.
    pub margin: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

impl InequalityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn of_kind(&self, kind: InequalityKind) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.kind == kind)
    }
}

/// Relative slack below which an inequality counts as satisfied. Several
/// candidate functions meet the relations with equality on whole intervals.
pub const INEQUALITY_TOLERANCE: f64 = 1e-9;

/// Checks a candidate exponent function against the upper differential
/// inequality, the monotonicity of `lam + xi^2/2`, 2-Lipschitz continuity and
/// the a priori range, over every pair of points of a sorted grid.
pub fn check_differential_inequalities<F>(lam_fn: F, xi_grid: &[f64]) -> Result<InequalityReport>
where
    F: Fn(f64) -> f64,
{
    for (i, w) in xi_grid.windows(2).enumerate() {
        if !(w[0] <= w[1]) {
            return Err(Error::UnsortedGrid(i + 1));
        }
    }
    if let Some(&first) = xi_grid.first() {
        check_xi(first)?;
    }

    let values: Vec<f64> = xi_grid.iter().map(|&x| lam_fn(x)).collect();
    let mut report = InequalityReport::default();
    let tol = INEQUALITY_TOLERANCE;

    for (j, (&xi, &lam)) in xi_grid.iter().zip(&values).enumerate() {
        if lam < -0.5 - tol || lam > 1.0 + tol {
            let margin = (-0.5 - lam).max(lam - 1.0);
            report.violations.push(Violation {
                kind: InequalityKind::Range,
                xi_tilde: xi,
                xi,
                margin,
            });
        }
        let alpha = alpha_star(xi, lam).unwrap_or(f64::NAN);
        for (&xt, &lt) in xi_grid[..j].iter().zip(&values[..j]) {
            let gap = xi - xt;
            if gap <= 0.0 {
                continue;
            }
            report.pairs_checked += 1;
            let secant = (lam - lt) / gap;

            let excess = secant - alpha;
            if excess.is_nan() || excess > tol * (1.0 + alpha.abs()) {
                report.violations.push(Violation {
                    kind: InequalityKind::UpperDifferential,
                    xi_tilde: xt,
                    xi,
                    margin: excess,
                });
            }

            let drop = (lt + xt * xt / 2.0) - (lam + xi * xi / 2.0);
            if drop > tol {
                report.violations.push(Violation {
                    kind: InequalityKind::Monotonicity,
                    xi_tilde: xt,
                    xi,
                    margin: drop,
                });
            }

            let steep = (lam - lt).abs() - 2.0 * gap;
            if steep > tol * (1.0 + gap) {
                report.violations.push(Violation {
                    kind: InequalityKind::Lipschitz,
                    xi_tilde: xt,
                    xi,
                    margin: steep,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= TOL * (1.0 + b.abs())
    }

    #[test]
    fn lambda_bounds_at_named_points() {
        let k = xi_knot();
        assert!(close(lambda_lower(k).unwrap(), 1.0 / 6.0));
        assert!(close(lambda_upper(k).unwrap(), 1.0 / 6.0));
        assert_eq!(lambda_lower(0.0).unwrap(), 0.0);
        assert_eq!(lambda_upper(0.0).unwrap(), 0.0);
        assert!(close(lambda_lower(0.2).unwrap(), -0.02));
        assert!(close(lambda_upper(0.2).unwrap(), 0.23));
        assert!(matches!(lambda_lower(-0.1), Err(Error::Domain { .. })));
        assert!(lambda_upper(-1e-12).is_err());
    }

    #[test]
    fn branch_values_at_point_two() {
        // hand evaluation of the two competing branches
        let a = (2.5f64).sqrt() - 1.0 / 6f64.sqrt();
        let b = (15f64.sqrt() - 2.0) / 6.0;
        assert!((a - 1.172_890_5).abs() < 1e-6);
        assert!((b - 0.312_164).abs() < 1e-6);
        assert!(a * 0.2 - b < -0.02);
    }

    #[test]
    fn bounds_clamp_to_a_priori_range() {
        assert_eq!(lambda_upper(10.0).unwrap(), 1.0);
        assert_eq!(lambda_lower(10.0).unwrap(), -0.5);
        assert_eq!(lambda_lower_nonneg(0.1).unwrap(), 0.0);
        assert_eq!(lambda_lower_nonneg(0.3).unwrap(), lambda_lower(0.3).unwrap());
    }

    #[test]
    fn watabiki_values() {
        assert!(close(watabiki_d(gamma_knot()).unwrap(), 4.0));
        assert!(close(watabiki_d(2f64.sqrt()).unwrap(), 1.5 + 68f64.sqrt() / 4.0));
        assert!(close(watabiki_d(2.0).unwrap(), 2.0 + 2.0 * 2f64.sqrt()));
        assert!(watabiki_d(0.0).is_err());
        assert!(watabiki_d(2.0001).is_err());
        assert!(close(watabiki_lambda_ext(1.0 / 3f64.sqrt()).unwrap(), 1.0 / 3.0));
        assert_eq!(dg_guess_lambda(0.0).unwrap(), 0.0);
        assert!(close(dg_guess_d(gamma_knot()).unwrap(), 4.0));
    }

    #[test]
    fn d_bounds_at_named_points() {
        let g = gamma_knot();
        assert!(close(d_lower(g).unwrap(), 4.0));
        assert!(close(d_upper(g).unwrap(), 4.0));
        let first = (15.0 - 6f64.sqrt() + 3.0 * 10f64.sqrt()) / (4.0 + 15f64.sqrt());
        let second = 2.0 / (5.0 - 17f64.sqrt());
        assert!(close(d_lower(1.0).unwrap(), first.max(second)));
        assert!((d_lower(1.0).unwrap() - 2.799_109_596_534).abs() < 1e-9);
        let (lo2, hi2) = d_bounds_at_two();
        let expect = (24.0 - 2.0 * 6f64.sqrt() + 6.0 * 10f64.sqrt()) / (4.0 + 15f64.sqrt());
        assert!(close(hi2, expect));
        assert!(hi2 > watabiki_d(2.0).unwrap());
        assert!(hi2 - watabiki_d(2.0).unwrap() < 0.008);
        assert!(lo2 < hi2);
        assert!(d_lower(2.0).is_err());
        assert!(d_upper(0.0).is_err());
    }

    #[test]
    fn conjugate_branch_matches_naive_form_away_from_zero() {
        for &g in &[0.5, 1.0, 1.5] {
            let g2: f64 = g * g;
            let naive = 2.0 * g2 / (4.0 + g2 - (16.0 + g2 * g2).sqrt());
            assert!(close(d_small_gamma_branch(g), naive));
        }
        assert!((d_small_gamma_branch(1e-9) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_from_gamma_cases() {
        assert!(close(lambda_from_gamma(gamma_knot(), 4.0).unwrap(), 1.0 / 6.0));
        assert!(close(lambda_from_gamma(2.0, 4.0).unwrap(), 0.0));
        assert!(close(lambda_from_gamma(1.0, 2.5).unwrap(), 0.0));
        assert!(lambda_from_gamma(1.0, 0.0).is_err());
        assert!(lambda_from_gamma(1.0, -1.0).is_err());
    }

    #[test]
    fn alpha_star_cases() {
        assert!(close(alpha_star(xi_knot(), 1.0 / 6.0).unwrap(), 2.5f64.sqrt() - xi_knot()));
        assert!(close(alpha_star(0.0, 0.0).unwrap(), 2f64.sqrt()));
        assert!(close(alpha_star(1.0, 1.0).unwrap(), 5f64.sqrt() - 1.0));
        assert!(alpha_star(0.0, -1.5).is_err());
        assert!(alpha_star(0.1, 0.0).unwrap() > 0.0);
    }

    #[test]
    fn length_compare_cases() {
        for &lam in &[-0.3, 0.0, 0.4] {
            assert_eq!(length_compare_exponent(0.7, 0.7, lam).unwrap(), lam);
        }
        let v = length_compare_exponent(xi_knot(), 0.0, 1.0 / 6.0).unwrap();
        assert!(close(v, 1.0 / 3.0 - 15f64.sqrt() / 6.0));
        assert!((v + 0.312_164).abs() < 1e-6);
        assert!(close(length_compare_exponent(1.0, 0.0, 0.0).unwrap(), -(3f64.sqrt() - 1.0)));
        assert!(length_compare_exponent(0.3, 0.4, 0.0).is_err());
    }

    #[test]
    fn g_upper_cases() {
        let v = g_upper(xi_knot(), 1.0 / 6.0).unwrap();
        assert!(close(v, (4.0 + 15f64.sqrt()) / 6.0));
        assert!((v - 1.31216).abs() < 1e-5);
        assert_eq!(g_upper(0.0, 0.0).unwrap(), 1.0);
        let x = 2.0 - 2.5f64.sqrt();
        let w = g_upper(x, lambda_lower(x).unwrap()).unwrap();
        assert!(close(w, 2.0 * 10f64.sqrt() - 5.0));
        assert!((w - 1.3246).abs() < 1e-4);
    }

    #[test]
    fn geodesic_gamma_bound_cases() {
        let v = geodesic_gamma_bound(gamma_knot(), 4.0).unwrap();
        assert!(close(v, (4.0 + 15f64.sqrt()) / 6.0));
        let (g, d) = (2f64.sqrt(), 3.5);
        let via_g = g_upper(g / d, lambda_from_gamma(g, d).unwrap()).unwrap();
        assert!(close(geodesic_gamma_bound(g, d).unwrap(), via_g));
        // xi = 0.4, Q = 2.5, lam = 0: 0.4 (2.5 - 0.4 + sqrt(2.16))
        assert!(close(geodesic_gamma_bound(1.0, 2.5).unwrap(), 0.4 * (2.1 + 2.16f64.sqrt())));
        assert!(geodesic_gamma_bound(1.0, 0.0).is_err());
    }

    #[test]
    fn q_and_c_cases() {
        let q = q_of(xi_knot(), 1.0 / 6.0).unwrap();
        assert!(close(q, 5.0 * 6f64.sqrt() / 6.0));
        assert!(close(q, background_charge(gamma_knot())));
        assert!(c_of(xi_knot(), 1.0 / 6.0).unwrap().abs() < 1e-9);
        let x = 1.0 / 3f64.sqrt();
        assert!(close(q_of(x, 1.0 / 3.0).unwrap(), (4.0f64 / 3.0).sqrt()));
        assert!(close(c_of(x, 1.0 / 3.0).unwrap(), 17.0));
        assert_eq!(q_of(0.5, 1.0).unwrap(), 0.0);
        assert_eq!(c_of(0.5, 1.0).unwrap(), 25.0);
        assert!(q_of(0.0, 0.0).is_err());
    }

    #[test]
    fn named_constants() {
        let (a, b) = contradiction_interval();
        assert!((a - 0.7646).abs() < 5e-5);
        assert!((b - 1.1187).abs() < 5e-5);
        assert!((q_mono_threshold() - 0.70044).abs() < 5e-6);
        // the upper bound is already below xi^2 inside the interval
        assert!(lambda_upper(0.8).unwrap() < 0.64);
        assert!((lambda_upper(0.8).unwrap() - 0.626_147).abs() < 1e-5);
    }

    #[test]
    fn rows_echo_scalar_functions() {
        let row = BoundsRow::at(xi_knot()).unwrap();
        assert!(close(row.lambda_lower, 1.0 / 6.0));
        assert!(close(row.lambda_upper, 1.0 / 6.0));
        assert!(row.c_at_lower.unwrap().abs() < 1e-9);
        let zero = BoundsRow::at(0.0).unwrap();
        assert!(zero.q_at_lower.is_none());
        let grow = GammaRow::at(gamma_knot() - 1e-15).unwrap();
        assert!((grow.d_lower - 4.0).abs() < 1e-9 && (grow.d_upper - 4.0).abs() < 1e-9);
        assert!(GammaRow::at(2.0).is_err());
    }

    #[test]
    fn inequality_checker_rejects_unsorted_grid() {
        let r = check_differential_inequalities(|x| x, &[0.0, 0.2, 0.1]);
        assert!(matches!(r, Err(Error::UnsortedGrid(2))));
    }

    #[test]
    fn constant_zero_has_no_monotonicity_violations() {
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.01).collect();
        let rep = check_differential_inequalities(|_| 0.0, &grid).unwrap();
        assert_eq!(rep.of_kind(InequalityKind::Monotonicity).count(), 0);
        assert!(rep.is_clean());
    }

    #[test]
    fn range_violations_are_reported() {
        let rep = check_differential_inequalities(|_| 1.5, &[0.0, 0.5]).unwrap();
        assert_eq!(rep.of_kind(InequalityKind::Range).count(), 2);
    }
}
