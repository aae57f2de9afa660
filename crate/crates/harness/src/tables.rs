//! Tabulation of the closed-form bounds and CSV input/output.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use lfpp_core::analytic::{gamma_knot, xi_knot, BoundsRow, GammaRow};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::format::{round_sig, ser_opt_sig, ser_sig};

/// A CSV row type with a fixed header.
pub trait CsvRow: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
}

/// Writes the header and rows; an empty slice yields a header-only file.
pub fn write_csv<T: CsvRow>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(T::HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn read_csv<T: CsvRow>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != T::HEADER {
        bail!("{}: unexpected header {:?}", path.display(), header);
    }
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaCsvRow {
    #[serde(serialize_with = "ser_sig")]
    pub xi: f64,
    #[serde(serialize_with = "ser_sig")]
    pub lambda_lower: f64,
    #[serde(serialize_with = "ser_sig")]
    pub lambda_upper: f64,
    #[serde(serialize_with = "ser_sig")]
    pub lambda_watabiki_ext: f64,
    #[serde(serialize_with = "ser_sig")]
    pub lambda_dg_guess: f64,
    #[serde(serialize_with = "ser_sig")]
    pub alpha_star_at_lower: f64,
    #[serde(serialize_with = "ser_sig")]
    pub g_upper_at_lower: f64,
    #[serde(serialize_with = "ser_opt_sig")]
    pub q_at_lower: Option<f64>,
    #[serde(serialize_with = "ser_opt_sig")]
    pub q_at_upper: Option<f64>,
    #[serde(serialize_with = "ser_opt_sig")]
    pub c_at_lower: Option<f64>,
    #[serde(serialize_with = "ser_opt_sig")]
    pub c_at_upper: Option<f64>,
}

impl CsvRow for LambdaCsvRow {
    const HEADER: &'static [&'static str] = &[
        "xi",
        "lambda_lower",
        "lambda_upper",
        "lambda_watabiki_ext",
        "lambda_dg_guess",
        "alpha_star_at_lower",
        "g_upper_at_lower",
        "q_at_lower",
        "q_at_upper",
        "c_at_lower",
        "c_at_upper",
    ];
}

impl From<BoundsRow> for LambdaCsvRow {
    fn from(r: BoundsRow) -> Self {
        LambdaCsvRow {
            xi: round_sig(r.xi),
            lambda_lower: round_sig(r.lambda_lower),
            lambda_upper: round_sig(r.lambda_upper),
            lambda_watabiki_ext: round_sig(r.lambda_watabiki_ext),
            lambda_dg_guess: round_sig(r.lambda_dg_guess),
            alpha_star_at_lower: round_sig(r.alpha_star_at_lower),
            g_upper_at_lower: round_sig(r.g_upper_at_lower),
            q_at_lower: r.q_at_lower.map(round_sig),
            q_at_upper: r.q_at_upper.map(round_sig),
            c_at_lower: r.c_at_lower.map(round_sig),
            c_at_upper: r.c_at_upper.map(round_sig),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaCsvRow {
    #[serde(serialize_with = "ser_sig")]
    pub gamma: f64,
    #[serde(serialize_with = "ser_sig")]
    pub d_lower: f64,
    #[serde(serialize_with = "ser_sig")]
    pub d_upper: f64,
    #[serde(serialize_with = "ser_sig")]
    pub d_watabiki: f64,
    #[serde(serialize_with = "ser_sig")]
    pub d_dg_guess: f64,
    #[serde(serialize_with = "ser_sig")]
    pub xi_of_gamma_lower: f64,
    #[serde(serialize_with = "ser_sig")]
    pub xi_of_gamma_upper: f64,
    #[serde(serialize_with = "ser_sig")]
    pub geodesic_dim_bound: f64,
}

impl CsvRow for GammaCsvRow {
    const HEADER: &'static [&'static str] = &[
        "gamma",
        "d_lower",
        "d_upper",
        "d_watabiki",
        "d_dg_guess",
        "xi_of_gamma_lower",
        "xi_of_gamma_upper",
        "geodesic_dim_bound",
    ];
}

impl From<GammaRow> for GammaCsvRow {
    fn from(r: GammaRow) -> Self {
        GammaCsvRow {
            gamma: round_sig(r.gamma),
            d_lower: round_sig(r.d_lower),
            d_upper: round_sig(r.d_upper),
            d_watabiki: round_sig(r.d_watabiki),
            d_dg_guess: round_sig(r.d_dg_guess),
            xi_of_gamma_lower: round_sig(r.xi_of_gamma_lower),
            xi_of_gamma_upper: round_sig(r.xi_of_gamma_upper),
            geodesic_dim_bound: round_sig(r.geodesic_dim_bound),
        }
    }
}

/// `lo, lo + step, ...` up to `hi`, plus any `knots` inside `[lo, hi]`.
///
/// Points are computed as `lo + i * step`, not accumulated. An empty range
/// (`hi < lo`) gives no points.
pub fn grid(lo: f64, hi: f64, step: f64, knots: &[f64]) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) {
        bail!("range bounds must be finite");
    }
    if !(step > 0.0 && step.is_finite()) {
        bail!("step must be positive, got {step}");
    }
    if hi < lo {
        return Ok(Vec::new());
    }
    let tol = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut pts: Vec<f64> = (0..=count).map(|i| lo + i as f64 * step).filter(|&x| x <= hi + tol).collect();
    for &k in knots {
        if k >= lo - tol && k <= hi + tol && !pts.iter().any(|&p| (p - k).abs() <= tol) {
            pts.push(k);
        }
    }
    // a knot within tolerance of a grid point replaces it, so the knot is hit exactly
    for &k in knots {
        for p in pts.iter_mut() {
            if (*p - k).abs() <= tol {
                *p = k;
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    Ok(pts)
}

pub fn lambda_table(xis: &[f64]) -> Result<Vec<LambdaCsvRow>> {
    xis.iter()
        .map(|&xi| Ok(BoundsRow::at(xi)?.into()))
        .collect()
}

pub fn gamma_table(gammas: &[f64]) -> Result<Vec<GammaCsvRow>> {
    gammas
        .iter()
        .map(|&g| Ok(GammaRow::at(g).with_context(|| format!("gamma = {g}"))?.into()))
        .collect()
}

pub fn xi_knots() -> Vec<f64> {
    vec![xi_knot()]
}

pub fn gamma_knots() -> Vec<f64> {
    vec![gamma_knot()]
}
