//! Exponent estimation from per-scale Monte-Carlo output.
//!
//! Each observable is summarised per scale by a quantile (the median by
//! default), then regressed on `log(1/eps)`. With `x = log(1/eps)` a quantity
//! behaving like `eps^lambda` has slope `-lambda`, while vertex counts that
//! grow like `eps^-g` have slope `+g`; [`Target::exponent_from_slope`] applies
//! the sign so that every estimate reports the exponent directly.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::analytic::length_compare_exponent;
use crate::engine::{CensusResult, CrossingResult};
use crate::field::{SamplerKind, MAX_LEVEL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Crossing distance, `D ~ eps^lambda`.
    Lambda,
    /// Geodesic vertex count, `#P ~ eps^-g`.
    G,
    /// Low-value vertex count, `N ~ eps^-c`.
    Census,
}

impl Target {
    pub fn exponent_from_slope(self, slope: f64) -> f64 {
        match self {
            Target::Lambda => -slope,
            Target::G | Target::Census => slope,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::Lambda => "lambda",
            Target::G => "g",
            Target::Census => "census",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub xi_list: Vec<f64>,
    pub k_list: Vec<u32>,
    pub replicates: usize,
    pub sampler: SamplerKind,
    pub master_seed: u64,
    /// Per-scale summary quantile in `[0, 1]`.
    pub quantile: f64,
    /// Tolerance for the distance and geodesic exponent checks.
    pub slack_lambda: f64,
    /// Tolerance for the census exponent check.
    pub slack_census: f64,
    /// Scales below this level are summarised but left out of fits.
    pub min_k: u32,
}

impl ExperimentPlan {
    pub const DEFAULT_QUANTILE: f64 = 0.5;
    pub const DEFAULT_SLACK_LAMBDA: f64 = 0.15;
    pub const DEFAULT_SLACK_CENSUS: f64 = 0.3;
    pub const DEFAULT_MIN_K: u32 = 4;

    /// Plan with default quantile, slacks and minimum fitting scale.
    pub fn new(
        xi_list: Vec<f64>,
        k_list: Vec<u32>,
        replicates: usize,
        sampler: SamplerKind,
        master_seed: u64,
    ) -> Result<Self> {
        let plan = ExperimentPlan {
            xi_list,
            k_list,
            replicates,
            sampler,
            master_seed,
            quantile: Self::DEFAULT_QUANTILE,
            slack_lambda: Self::DEFAULT_SLACK_LAMBDA,
            slack_census: Self::DEFAULT_SLACK_CENSUS,
            min_k: Self::DEFAULT_MIN_K,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&xi) = self.xi_list.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return Err(Error::domain("xi", xi, "[0, inf)"));
        }
        if self.k_list.len() < 3 {
            return Err(Error::InvalidPlan(format!(
                "need at least 3 scales, got {}",
                self.k_list.len()
            )));
        }
        if self.k_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPlan("scale levels must be strictly increasing".into()));
        }
        if let Some(&k) = self.k_list.iter().find(|&&k| k > MAX_LEVEL) {
            return Err(Error::InvalidPlan(format!("level {k} exceeds {MAX_LEVEL}")));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidPlan("replicates must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.quantile) {
            return Err(Error::domain("quantile", self.quantile, "[0, 1]"));
        }
        for (name, v) in [("slack_lambda", self.slack_lambda), ("slack_census", self.slack_census)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(name, v, "[0, inf)"));
            }
        }
        Ok(())
    }
}

/// Ordinary least-squares line through `(log(1/eps), log observable)` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero with exactly collinear points.
    pub stderr: f64,
    pub r_squared: f64,
}

impl LogLogFit {
    pub fn exponent(&self, target: Target) -> f64 {
        target.exponent_from_slope(self.slope)
    }
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LogLogFit> {
    let n = points.len();
    if n < 3 {
        return Err(Error::DegenerateFit(n));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidPlan("non-finite regression point".into()));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 1e-12 * (1.0 + mx * mx)) {
        return Err(Error::DegenerateFit(n));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    let r_squared = if syy > 0.0 {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(LogLogFit {
        slope,
        intercept,
        stderr,
        r_squared,
    })
}

/// Type-7 (linear interpolation) sample quantile; `values` need not be sorted.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    Some(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleSummary {
    pub level: u32,
    pub value: f64,
    pub replicates: usize,
    pub used_in_fit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingEstimate {
    pub target: Target,
    /// Parameter the estimate belongs to (`xi`, or `alpha` for census fits).
    pub parameter: f64,
    pub exponent: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub intercept: f64,
    pub per_scale_summary: Vec<ScaleSummary>,
}

/// Replicate values of one observable at one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleCell {
    pub level: u32,
    pub values: Vec<f64>,
}

fn summarise(plan: &ExperimentPlan, parameter: f64, cells: &[ScaleCell]) -> Result<Vec<ScaleSummary>> {
    plan.k_list
        .iter()
        .map(|&k| {
            let have: Vec<f64> = cells
                .iter()
                .filter(|c| c.level == k)
                .flat_map(|c| c.values.iter().copied())
                .collect();
            if have.len() < plan.replicates {
                return Err(Error::MissingCell {
                    xi: parameter,
                    k,
                    have: have.len(),
                    need: plan.replicates,
                });
            }
            Ok(ScaleSummary {
                level: k,
                value: quantile(&have, plan.quantile).expect("nonempty cell"),
                replicates: have.len(),
                used_in_fit: k >= plan.min_k,
            })
        })
        .collect()
}

fn fit_summary(target: Target, parameter: f64, mut summary: Vec<ScaleSummary>) -> Result<ScalingEstimate> {
    for s in &mut summary {
        s.used_in_fit &= s.value > 0.0 && s.value.is_finite();
    }
    let points: Vec<(f64, f64)> = summary
        .iter()
        .filter(|s| s.used_in_fit)
        .map(|s| (s.level as f64 * LN_2, s.value.ln()))
        .collect();
    let fit = fit_loglog(&points)?;
    Ok(ScalingEstimate {
        target,
        parameter,
        exponent: fit.exponent(target),
        stderr: fit.stderr,
        r_squared: fit.r_squared,
        intercept: fit.intercept,
        per_scale_summary: summary,
    })
}

/// Fits one observable given its per-scale replicate values.
pub fn estimate_exponent(
    plan: &ExperimentPlan,
    target: Target,
    parameter: f64,
    cells: &[ScaleCell],
) -> Result<ScalingEstimate> {
    plan.validate()?;
    fit_summary(target, parameter, summarise(plan, parameter, cells)?)
}

fn cells_by_xi<F>(plan: &ExperimentPlan, results: &[CrossingResult], value: F) -> Vec<(f64, Vec<ScaleCell>)>
where
    F: Fn(&CrossingResult) -> f64,
{
    plan.xi_list
        .iter()
        .map(|&xi| {
            let mut by_k: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
            for r in results.iter().filter(|r| r.xi.to_bits() == xi.to_bits()) {
                by_k.entry(r.level).or_default().push(value(r));
            }
            let cells = by_k
                .into_iter()
                .map(|(level, values)| ScaleCell { level, values })
                .collect();
            (xi, cells)
        })
        .collect()
}

/// Distance exponent per `xi` in the plan, from the per-scale quantile of crossing distances.
pub fn estimate_lambda(plan: &ExperimentPlan, results: &[CrossingResult]) -> Result<Vec<ScalingEstimate>> {
    cells_by_xi(plan, results, |r| r.distance)
        .iter()
        .map(|(xi, cells)| estimate_exponent(plan, Target::Lambda, *xi, cells))
        .collect()
}

/// Geodesic dimension per `xi`, from the per-scale quantile of geodesic vertex counts.
pub fn estimate_g(plan: &ExperimentPlan, results: &[CrossingResult]) -> Result<Vec<ScalingEstimate>> {
    cells_by_xi(plan, results, |r| r.vertex_count as f64)
        .iter()
        .map(|(xi, cells)| estimate_exponent(plan, Target::G, *xi, cells))
        .collect()
}

/// Growth exponent of the census count at threshold `alpha`.
///
/// Scales whose summary count is zero are excluded from the fit (they stay in
/// the summary with `used_in_fit = false`); fewer than three usable scales is
/// reported as [`Error::InsufficientSignal`].
pub fn estimate_census_exponent(
    plan: &ExperimentPlan,
    alpha: f64,
    results: &[CensusResult],
) -> Result<ScalingEstimate> {
    plan.validate()?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain("alpha", alpha, "(0, inf)"));
    }
    let mut by_k: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for r in results.iter().filter(|r| r.alpha.to_bits() == alpha.to_bits()) {
        by_k.entry(r.level).or_default().push(r.count as f64);
    }
    let cells: Vec<ScaleCell> = by_k
        .into_iter()
        .map(|(level, values)| ScaleCell { level, values })
        .collect();
    let summary = summarise(plan, alpha, &cells)?;
    let usable = summary
        .iter()
        .filter(|s| s.used_in_fit && s.value > 0.0)
        .count();
    if usable < 3 {
        return Err(Error::InsufficientSignal { usable });
    }
    fit_summary(Target::Census, alpha, summary)
}

/// Census acceptance: fitted exponent at most `2 - alpha^2/2 + slack`.
pub fn census_within_bound(plan: &ExperimentPlan, estimate: &ScalingEstimate) -> bool {
    let alpha = estimate.parameter;
    estimate.exponent <= 2.0 - alpha * alpha / 2.0 + plan.slack_census
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthComparisonReport {
    pub xi: f64,
    pub xi_tilde: f64,
    pub lambda_hat: f64,
    /// Fitted decay exponent of the `xi_tilde`-length of `xi`-geodesics.
    pub fitted_exponent: f64,
    pub stderr: f64,
    pub bound_exponent: f64,
    pub slack: f64,
    /// `fitted_exponent - (bound_exponent - slack)`; nonnegative means the check passes.
    pub margin: f64,
    pub passes: bool,
}

/// Compares the decay of `L^{xi_tilde}` along `xi`-geodesics with the exponent
/// `lambda - (xi - xi_tilde) alpha*` predicted by the length comparison bound.
///
/// `cells` holds, per scale, the `xi_tilde`-lengths of the `xi`-geodesics.
pub fn length_comparison_check(
    plan: &ExperimentPlan,
    xi: f64,
    xi_tilde: f64,
    lambda_hat: f64,
    cells: &[ScaleCell],
) -> Result<LengthComparisonReport> {
    let bound_exponent = length_compare_exponent(xi, xi_tilde, lambda_hat)?;
    let fit = estimate_exponent(plan, Target::Lambda, xi, cells)?;
    let slack = plan.slack_lambda;
    let margin = fit.exponent - (bound_exponent - slack);
    Ok(LengthComparisonReport {
        xi,
        xi_tilde,
        lambda_hat,
        fitted_exponent: fit.exponent,
        stderr: fit.stderr,
        bound_exponent,
        slack,
        margin,
        passes: margin >= 0.0,
    })
}
