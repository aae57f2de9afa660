use serde::{Deserialize, Serialize};

use super::{FieldSample, GridSpec, SamplerKind};
use crate::{Error, Result};

/// Default bound on `max - min` of per-vertex variances.
pub const DEFAULT_UNIFORMITY_BOUND: f64 = 2.0;

/// Largest separation, as a fraction of the unit square, used for covariance lags.
const MAX_LAG_DISTANCE: f64 = 0.125;
const MIN_LAG_STEPS: usize = 4;
/// Roughly this many vertices per side are tracked for variance summaries.
const VARIANCE_PROBES_PER_SIDE: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovariancePoint {
    pub lag_steps: usize,
    pub distance: f64,
    pub covariance: f64,
    pub pairs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldStats {
    pub spec: GridSpec,
    pub sampler_kind: SamplerKind,
    pub replicate_count: usize,
    pub center_variance: f64,
    pub variance_min: f64,
    pub variance_median: f64,
    pub variance_max: f64,
    /// `variance_max - variance_min` over probed vertices off the boundary.
    pub variance_spread: f64,
    pub uniformity_bound: f64,
    pub uniform: bool,
    pub covariance: Vec<CovariancePoint>,
    /// Slope of covariance against `log(distance)`; needs at least two lags.
    pub covariance_slope: Option<f64>,
    /// Fewer than two replicates: variances are reported as zero.
    pub degenerate: bool,
}

struct LagAccumulator {
    steps: usize,
    anchors: Vec<(usize, usize)>,
    sum_prod: f64,
    sum_a: f64,
    sum_b: f64,
    count: u64,
}

/// Streaming accumulator behind [`validate_field`]; holds no samples.
pub struct FieldStatsAccumulator {
    spec: GridSpec,
    kind: Option<SamplerKind>,
    replicates: usize,
    probes: Vec<usize>,
    interior: Vec<bool>,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    center: usize,
    center_sum: f64,
    center_sum_sq: f64,
    lags: Vec<LagAccumulator>,
    uniformity_bound: f64,
}

impl FieldStatsAccumulator {
    pub fn new(spec: GridSpec) -> Self {
        Self::with_uniformity_bound(spec, DEFAULT_UNIFORMITY_BOUND)
    }

    pub fn with_uniformity_bound(spec: GridSpec, uniformity_bound: f64) -> Self {
        let n = spec.n_per_side();
        let stride = ((n - 1) / (VARIANCE_PROBES_PER_SIDE - 1)).max(1);
        let mut probes = Vec::new();
        let mut interior = Vec::new();
        for j in (0..n).step_by(stride) {
            for i in (0..n).step_by(stride) {
                probes.push(spec.index(i, j));
                interior.push(i > 0 && j > 0 && i + 1 < n && j + 1 < n);
            }
        }

        // lags 4, 8, 16, ... grid steps up to 1/8; anchors in the middle half
        let cells = spec.cells_per_side();
        let mut lags = Vec::new();
        let mut steps = MIN_LAG_STEPS;
        while steps as f64 * spec.epsilon() <= MAX_LAG_DISTANCE + 1e-12 && steps <= cells {
            let lo = cells / 4;
            let hi = 3 * cells / 4;
            let anchor_stride = (steps / 2).max(1);
            let mut anchors = Vec::new();
            let mut a = lo;
            while a + steps <= hi {
                let mut b = lo;
                while b <= hi {
                    anchors.push((a, b));
                    b += anchor_stride;
                }
                a += anchor_stride;
            }
            lags.push(LagAccumulator {
                steps,
                anchors,
                sum_prod: 0.0,
                sum_a: 0.0,
                sum_b: 0.0,
                count: 0,
            });
            steps *= 2;
        }

        let count = probes.len();
        FieldStatsAccumulator {
            spec,
            kind: None,
            replicates: 0,
            probes,
            interior,
            sum: vec![0.0; count],
            sum_sq: vec![0.0; count],
            center: spec.center_index(),
            center_sum: 0.0,
            center_sum_sq: 0.0,
            lags,
            uniformity_bound,
        }
    }

    pub fn push(&mut self, sample: &FieldSample) -> Result<()> {
        if sample.spec != self.spec {
            return Err(Error::MixedSamples(format!(
                "grid {:?} differs from {:?}",
                sample.spec, self.spec
            )));
        }
        match self.kind {
            None => self.kind = Some(sample.sampler_kind),
            Some(k) if k != sample.sampler_kind => {
                return Err(Error::MixedSamples(format!(
                    "sampler {} differs from {k}",
                    sample.sampler_kind
                )))
            }
            _ => {}
        }
        self.replicates += 1;
        let v = &sample.values;
        for (p, &idx) in self.probes.iter().enumerate() {
            self.sum[p] += v[idx];
            self.sum_sq[p] += v[idx] * v[idx];
        }
        self.center_sum += v[self.center];
        self.center_sum_sq += v[self.center] * v[self.center];
        let spec = self.spec;
        for lag in &mut self.lags {
            for &(a, b) in &lag.anchors {
                // horizontal and vertical pairs from the same anchor
                let z = v[spec.index(a, b)];
                let h = v[spec.index(a + lag.steps, b)];
                let w = v[spec.index(b, a)];
                let u = v[spec.index(b, a + lag.steps)];
                lag.sum_prod += z * h + w * u;
                lag.sum_a += z + w;
                lag.sum_b += h + u;
                lag.count += 2;
            }
        }
        Ok(())
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    fn variance(&self, sum: f64, sum_sq: f64) -> f64 {
        let r = self.replicates as f64;
        if self.replicates < 2 {
            return 0.0;
        }
        ((sum_sq - sum * sum / r) / (r - 1.0)).max(0.0)
    }

    pub fn finish(&self) -> FieldStats {
        let degenerate = self.replicates < 2;
        let variances: Vec<f64> = self
            .sum
            .iter()
            .zip(&self.sum_sq)
            .map(|(&s, &q)| self.variance(s, q))
            .collect();
        let mut sorted = variances.clone();
        sorted.sort_by(f64::total_cmp);
        let interior: Vec<f64> = variances
            .iter()
            .zip(&self.interior)
            .filter(|(_, &inside)| inside)
            .map(|(&v, _)| v)
            .collect();
        let spread = if interior.is_empty() {
            0.0
        } else {
            interior.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                - interior.iter().copied().fold(f64::INFINITY, f64::min)
        };

        let covariance: Vec<CovariancePoint> = self
            .lags
            .iter()
            .filter(|l| l.count > 0 && !degenerate)
            .map(|l| {
                let c = l.count as f64;
                CovariancePoint {
                    lag_steps: l.steps,
                    distance: l.steps as f64 * self.spec.epsilon(),
                    covariance: l.sum_prod / c - (l.sum_a / c) * (l.sum_b / c),
                    pairs: l.count,
                }
            })
            .collect();
        let covariance_slope = if covariance.len() >= 2 {
            let pts: Vec<(f64, f64)> = covariance
                .iter()
                .map(|p| (p.distance.ln(), p.covariance))
                .collect();
            Some(ols_slope(&pts))
        } else {
            None
        };

        FieldStats {
            spec: self.spec,
            sampler_kind: self.kind.unwrap_or(SamplerKind::Supplied),
            replicate_count: self.replicates,
            center_variance: self.variance(self.center_sum, self.center_sum_sq),
            variance_min: sorted.first().copied().unwrap_or(0.0),
            variance_median: median(&sorted),
            variance_max: sorted.last().copied().unwrap_or(0.0),
            variance_spread: spread,
            uniformity_bound: self.uniformity_bound,
            uniform: !degenerate && spread <= self.uniformity_bound,
            covariance,
            covariance_slope,
            degenerate,
        }
    }
}

fn median(sorted: &[f64]) -> f64 {
    match sorted.len() {
        0 => 0.0,
        n if n % 2 == 1 => sorted[n / 2],
        n => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Variance and covariance summary of replicate fields sharing one grid and sampler.
pub fn validate_field(samples: &[FieldSample]) -> Result<FieldStats> {
    let first = samples
        .first()
        .ok_or_else(|| Error::MixedSamples("no samples given".into()))?;
    let mut acc = FieldStatsAccumulator::new(first.spec);
    for s in samples {
        acc.push(s)?;
    }
    Ok(acc.finish())
}
