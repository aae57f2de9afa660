//! Exponent fits over a finished run, written as CSV tables.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use lfpp_core::analytic::{g_upper, lambda_lower, lambda_upper};
use lfpp_core::engine::CensusResult;
use lfpp_core::scaling::{
    census_within_bound, estimate_census_exponent, estimate_exponent, length_comparison_check,
    ExperimentPlan, ScaleCell, ScalingEstimate, Target,
};
use lfpp_core::Error as CoreError;
use serde::{Deserialize, Serialize};

use crate::format::{round_sig, ser_opt_sig, ser_sig};
use crate::simulate::{CensusRecord, CrossingRecord, RunData};
use crate::tables::{write_csv, CsvRow};

pub const ESTIMATES_FILE: &str = "estimates.csv";
pub const LENGTH_COMPARE_FILE: &str = "length_compare.csv";
pub const CENSUS_ESTIMATES_FILE: &str = "census_estimates.csv";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    #[serde(serialize_with = "ser_sig")]
    pub xi: f64,
    #[serde(serialize_with = "ser_sig")]
    pub lambda_hat: f64,
    #[serde(serialize_with = "ser_sig")]
    pub lambda_stderr: f64,
    #[serde(serialize_with = "ser_sig")]
    pub lambda_r2: f64,
    #[serde(serialize_with = "ser_sig")]
    pub g_hat: f64,
    #[serde(serialize_with = "ser_sig")]
    pub g_stderr: f64,
    #[serde(serialize_with = "ser_sig")]
    pub g_r2: f64,
    #[serde(serialize_with = "ser_sig")]
    pub lambda_lower: f64,
    #[serde(serialize_with = "ser_sig")]
    pub lambda_upper: f64,
    /// Geodesic dimension bound at `lambda_lower`, where it is largest.
    #[serde(serialize_with = "ser_sig")]
    pub g_upper: f64,
    pub in_lambda_band: bool,
    pub in_g_band: bool,
}

impl CsvRow for EstimateRow {
    const HEADER: &'static [&'static str] = &[
        "xi",
        "lambda_hat",
        "lambda_stderr",
        "lambda_r2",
        "g_hat",
        "g_stderr",
        "g_r2",
        "lambda_lower",
        "lambda_upper",
        "g_upper",
        "in_lambda_band",
        "in_g_band",
    ];
}

impl EstimateRow {
    /// Band membership uses the plan's `slack_lambda` on both exponents.
    pub fn new(lambda: &ScalingEstimate, g: &ScalingEstimate, slack: f64) -> Result<Self> {
        let xi = lambda.parameter;
        let lo = lambda_lower(xi)?;
        let hi = lambda_upper(xi)?;
        let g_hi = g_upper(xi, lo)?;
        Ok(EstimateRow {
            xi: round_sig(xi),
            lambda_hat: round_sig(lambda.exponent),
            lambda_stderr: round_sig(lambda.stderr),
            lambda_r2: round_sig(lambda.r_squared),
            g_hat: round_sig(g.exponent),
            g_stderr: round_sig(g.stderr),
            g_r2: round_sig(g.r_squared),
            lambda_lower: round_sig(lo),
            lambda_upper: round_sig(hi),
            g_upper: round_sig(g_hi),
            in_lambda_band: lambda.exponent >= lo - slack && lambda.exponent <= hi + slack,
            in_g_band: g.exponent >= 1.0 - slack && g.exponent <= g_hi + slack,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthCompareRow {
    #[serde(serialize_with = "ser_sig")]
    pub xi: f64,
    #[serde(serialize_with = "ser_sig")]
    pub xi_tilde: f64,
    #[serde(serialize_with = "ser_sig")]
    pub lambda_hat: f64,
    #[serde(serialize_with = "ser_sig")]
    pub fitted_exponent: f64,
    #[serde(serialize_with = "ser_sig")]
    pub stderr: f64,
    #[serde(serialize_with = "ser_sig")]
    pub bound_exponent: f64,
    #[serde(serialize_with = "ser_sig")]
    pub slack: f64,
    #[serde(serialize_with = "ser_sig")]
    pub margin: f64,
    pub passes: bool,
}

impl CsvRow for LengthCompareRow {
    const HEADER: &'static [&'static str] = &[
        "xi",
        "xi_tilde",
        "lambda_hat",
        "fitted_exponent",
        "stderr",
        "bound_exponent",
        "slack",
        "margin",
        "passes",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    #[serde(serialize_with = "ser_sig")]
    pub alpha: f64,
    /// Empty when too few scales have nonzero counts.
    #[serde(serialize_with = "ser_opt_sig")]
    pub exponent: Option<f64>,
    #[serde(serialize_with = "ser_opt_sig")]
    pub stderr: Option<f64>,
    #[serde(serialize_with = "ser_opt_sig")]
    pub r2: Option<f64>,
    /// `2 - alpha^2 / 2`
    #[serde(serialize_with = "ser_sig")]
    pub bound: f64,
    #[serde(serialize_with = "ser_sig")]
    pub slack: f64,
    pub within_bound: Option<bool>,
    pub note: String,
}

impl CsvRow for CensusRow {
    const HEADER: &'static [&'static str] = &[
        "alpha",
        "exponent",
        "stderr",
        "r2",
        "bound",
        "slack",
        "within_bound",
        "note",
    ];
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EstimateReport {
    pub estimates: Vec<EstimateRow>,
    pub length_compare: Vec<LengthCompareRow>,
    pub census: Vec<CensusRow>,
}

fn cells<'a, F>(records: impl Iterator<Item = &'a CrossingRecord>, value: F) -> Vec<ScaleCell>
where
    F: Fn(&CrossingRecord) -> Option<f64>,
{
    let mut by_k: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for r in records {
        if let Some(v) = value(r) {
            by_k.entry(r.k).or_default().push(v);
        }
    }
    by_k.into_iter()
        .map(|(level, values)| ScaleCell { level, values })
        .collect()
}

fn at_xi(crossings: &[CrossingRecord], xi: f64) -> impl Iterator<Item = &CrossingRecord> {
    crossings.iter().filter(move |r| r.xi.to_bits() == xi.to_bits())
}

/// Distance and geodesic dimension fits for one `xi`.
pub fn fit_xi(plan: &ExperimentPlan, crossings: &[CrossingRecord], xi: f64) -> Result<(ScalingEstimate, ScalingEstimate)> {
    let lambda = estimate_exponent(plan, Target::Lambda, xi, &cells(at_xi(crossings, xi), |r| Some(r.distance)))
        .with_context(|| format!("distance fit at xi = {xi}"))?;
    let g = estimate_exponent(plan, Target::G, xi, &cells(at_xi(crossings, xi), |r| Some(r.vertex_count as f64)))
        .with_context(|| format!("geodesic fit at xi = {xi}"))?;
    Ok((lambda, g))
}

/// Length comparison for `xi_tilde <= xi`, using the re-evaluated lengths of the `xi`-geodesics.
pub fn compare_lengths(
    plan: &ExperimentPlan,
    crossings: &[CrossingRecord],
    xi: f64,
    xi_tilde: f64,
    lambda_hat: f64,
) -> Result<LengthCompareRow> {
    let c = cells(at_xi(crossings, xi), |r| r.length_at(xi_tilde));
    let r = length_comparison_check(plan, xi, xi_tilde, lambda_hat, &c)
        .with_context(|| format!("length comparison at xi = {xi}, xi_tilde = {xi_tilde}"))?;
    Ok(LengthCompareRow {
        xi: round_sig(r.xi),
        xi_tilde: round_sig(r.xi_tilde),
        lambda_hat: round_sig(r.lambda_hat),
        fitted_exponent: round_sig(r.fitted_exponent),
        stderr: round_sig(r.stderr),
        bound_exponent: round_sig(r.bound_exponent),
        slack: round_sig(r.slack),
        margin: round_sig(r.margin),
        passes: r.passes,
    })
}

pub fn census_row(plan: &ExperimentPlan, records: &[CensusRecord], alpha: f64) -> Result<CensusRow> {
    let results: Vec<CensusResult> = records.iter().map(CensusResult::from).collect();
    let bound = round_sig(2.0 - alpha * alpha / 2.0);
    let slack = round_sig(plan.slack_census);
    match estimate_census_exponent(plan, alpha, &results) {
        Ok(est) => Ok(CensusRow {
            alpha: round_sig(alpha),
            exponent: Some(round_sig(est.exponent)),
            stderr: Some(round_sig(est.stderr)),
            r2: Some(round_sig(est.r_squared)),
            bound,
            slack,
            within_bound: Some(census_within_bound(plan, &est)),
            note: String::new(),
        }),
        Err(e @ CoreError::InsufficientSignal { .. }) => Ok(CensusRow {
            alpha: round_sig(alpha),
            exponent: None,
            stderr: None,
            r2: None,
            bound,
            slack,
            within_bound: None,
            note: e.to_string(),
        }),
        Err(e) => Err(e).with_context(|| format!("census fit at alpha = {alpha}")),
    }
}

/// Fits everything the run recorded.
pub fn estimate_run(run: &RunData) -> Result<EstimateReport> {
    let plan = run.plan.experiment()?;
    let mut report = EstimateReport::default();
    for &xi in &plan.xi_list {
        let (lambda, g) = fit_xi(&plan, &run.crossings, xi)?;
        report.estimates.push(EstimateRow::new(&lambda, &g, plan.slack_lambda)?);
        for &xi_tilde in run.plan.multi_xi.iter().filter(|&&t| t <= xi) {
            report
                .length_compare
                .push(compare_lengths(&plan, &run.crossings, xi, xi_tilde, lambda.exponent)?);
        }
    }
    for &alpha in &run.plan.census_alpha {
        report.census.push(census_row(&plan, &run.census, alpha)?);
    }
    Ok(report)
}

pub fn write_report(dir: &Path, report: &EstimateReport) -> Result<()> {
    write_csv(&dir.join(ESTIMATES_FILE), &report.estimates)?;
    write_csv(&dir.join(LENGTH_COMPARE_FILE), &report.length_compare)?;
    write_csv(&dir.join(CENSUS_ESTIMATES_FILE), &report.census)
}
