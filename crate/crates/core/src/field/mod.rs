//! Approximate circle-average fields on the dyadic grid of the unit square.
//!
//! Three samplers share one output type:
//!
//! * [`SamplerKind::ExactDgff`]: zero-boundary discrete GFF on a padded box,
//!   drawn exactly through the sine eigenbasis of the Dirichlet Laplacian.
//! * [`SamplerKind::Fourier`]: stationary log-correlated field on a torus,
//!   synthesised from a `1/|q|` amplitude spectrum cut off at `|q| = 1/eps`.
//! * [`SamplerKind::Layered`]: sum of independent bilinearly interpolated
//!   white-noise layers, one per dyadic scale.
//!
//! Every emitted field is shifted to have zero mean over the unit square. A
//! global shift `c` multiplies all LFPP lengths by `exp(xi c)`, so it cancels
//! from every log-log slope.

mod dst;
mod exact;
mod fourier;
mod io;
mod layered;
mod validate;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use exact::ExactDgff;
pub use fourier::{calibrate_fourier_c0, FourierField, DEFAULT_FOURIER_C0};
pub use io::{read_field, write_field, FieldMetadata, FIELD_MAGIC};
pub use layered::{layer_contributions, LayeredField};
pub use validate::{validate_field, CovariancePoint, FieldStats, FieldStatsAccumulator};

/// Largest supported scale level.
pub const MAX_LEVEL: u32 = 14;

/// Dyadic grid `S^eps` of the unit square with `eps = 2^-level`.
///
/// Vertex `(i, j)` sits at `(i eps, j eps)` and has row-major index `j n + i`,
/// so column `i = 0` is the left boundary and row `j = 0` the top row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    level: u32,
    padding_factor: f64,
}

impl GridSpec {
    pub const DEFAULT_PADDING: f64 = 1.0;

    pub fn new(level: u32, padding_factor: f64) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::InvalidGrid(format!(
                "level {level} exceeds the maximum {MAX_LEVEL}"
            )));
        }
        if !(padding_factor >= 0.0 && padding_factor.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "padding factor {padding_factor} must be finite and nonnegative"
            )));
        }
        Ok(GridSpec {
            level,
            padding_factor,
        })
    }

    /// Grid at `level` with the default padding of one unit on each side.
    pub fn with_level(level: u32) -> Result<Self> {
        Self::new(level, Self::DEFAULT_PADDING)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn padding_factor(&self) -> f64 {
        self.padding_factor
    }

    /// Number of grid cells along one side of the unit square, `2^level`.
    pub fn cells_per_side(&self) -> usize {
        1usize << self.level
    }

    pub fn n_per_side(&self) -> usize {
        self.cells_per_side() + 1
    }

    pub fn vertex_count(&self) -> usize {
        self.n_per_side() * self.n_per_side()
    }

    pub fn epsilon(&self) -> f64 {
        1.0 / self.cells_per_side() as f64
    }

    /// Padding expressed in grid cells; always at least one.
    pub fn pad_cells(&self) -> usize {
        ((self.padding_factor * self.cells_per_side() as f64).round() as usize).max(1)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n_per_side() + i
    }

    /// `(i, j)` of a row-major index.
    pub fn coords(&self, index: usize) -> (usize, usize) {
        let n = self.n_per_side();
        (index % n, index / n)
    }

    pub fn position(&self, index: usize) -> (f64, f64) {
        let (i, j) = self.coords(index);
        let eps = self.epsilon();
        (i as f64 * eps, j as f64 * eps)
    }

    pub fn center_index(&self) -> usize {
        let c = self.cells_per_side() / 2;
        self.index(c, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    ExactDgff,
    Fourier,
    Layered,
    /// Values provided directly by the caller.
    Supplied,
}

impl SamplerKind {
    pub fn code(self) -> u8 {
        match self {
            SamplerKind::ExactDgff => 0,
            SamplerKind::Fourier => 1,
            SamplerKind::Layered => 2,
            SamplerKind::Supplied => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => SamplerKind::ExactDgff,
            1 => SamplerKind::Fourier,
            2 => SamplerKind::Layered,
            3 => SamplerKind::Supplied,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::ExactDgff => "exact_dgff",
            SamplerKind::Fourier => "fourier",
            SamplerKind::Layered => "layered",
            SamplerKind::Supplied => "supplied",
        }
    }
}

impl std::fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact_dgff" => Ok(SamplerKind::ExactDgff),
            "fourier" => Ok(SamplerKind::Fourier),
            "layered" => Ok(SamplerKind::Layered),
            other => Err(Error::InvalidPlan(format!("unknown sampler '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    ZeroDomainMean,
    /// Caller-supplied values, left as given.
    None,
}

/// One realisation of the field on `S^eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub spec: GridSpec,
    /// Row-major `n x n` values.
    pub values: Vec<f64>,
    pub sampler_kind: SamplerKind,
    pub seed: u64,
    pub normalization: Normalization,
}

impl FieldSample {
    /// Wraps caller-provided values without normalising them.
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.vertex_count() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                spec.vertex_count(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite field value {bad}")));
        }
        Ok(FieldSample {
            spec,
            values,
            sampler_kind: SamplerKind::Supplied,
            seed: 0,
            normalization: Normalization::None,
        })
    }

    /// Constant field on the grid at `level` (no padding semantics needed).
    pub fn constant(level: u32, value: f64) -> Result<Self> {
        let spec = GridSpec::with_level(level)?;
        Self::from_values(spec, vec![value; spec.vertex_count()])
    }

    pub(crate) fn normalized(
        spec: GridSpec,
        mut values: Vec<f64>,
        sampler_kind: SamplerKind,
        seed: u64,
    ) -> Self {
        subtract_mean(&mut values);
        FieldSample {
            spec,
            values,
            sampler_kind,
            seed,
            normalization: Normalization::ZeroDomainMean,
        }
    }

    pub fn n_per_side(&self) -> usize {
        self.spec.n_per_side()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.spec.index(i, j)]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Reflection across the diagonal, `(i, j) -> (j, i)`.
    pub fn transposed(&self) -> FieldSample {
        let n = self.n_per_side();
        let mut values = vec![0.0; self.values.len()];
        for j in 0..n {
            for i in 0..n {
                values[i * n + j] = self.values[j * n + i];
            }
        }
        FieldSample {
            values,
            ..self.clone()
        }
    }

    /// Same field plus a constant; normalisation is dropped.
    pub fn shifted(&self, c: f64) -> FieldSample {
        FieldSample {
            values: self.values.iter().map(|v| v + c).collect(),
            normalization: Normalization::None,
            ..self.clone()
        }
    }
}

fn subtract_mean(values: &mut [f64]) {
    if values.is_empty() {
        return;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter_mut().for_each(|v| *v -= mean);
    // one refinement pass removes the rounding left by the first subtraction
    let residual = values.iter().sum::<f64>() / values.len() as f64;
    values.iter_mut().for_each(|v| *v -= residual);
}

/// Sampler tuning shared by all kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Additive variance offset of the Fourier sampler.
    pub fourier_c0: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            fourier_c0: DEFAULT_FOURIER_C0,
        }
    }
}

/// A sampler prepared for one grid; reusable across seeds and threads.
pub enum FieldSampler {
    ExactDgff(ExactDgff),
    Fourier(FourierField),
    Layered(LayeredField),
}

impl FieldSampler {
    pub fn new(kind: SamplerKind, spec: GridSpec, config: &SamplerConfig) -> Result<Self> {
        Ok(match kind {
            SamplerKind::ExactDgff => FieldSampler::ExactDgff(ExactDgff::new(spec)?),
            SamplerKind::Fourier => FieldSampler::Fourier(FourierField::new(spec, config.fourier_c0)),
            SamplerKind::Layered => FieldSampler::Layered(LayeredField::new(spec)),
            SamplerKind::Supplied => {
                return Err(Error::InvalidPlan("supplied fields have no sampler".into()))
            }
        })
    }

    pub fn kind(&self) -> SamplerKind {
        match self {
            FieldSampler::ExactDgff(_) => SamplerKind::ExactDgff,
            FieldSampler::Fourier(_) => SamplerKind::Fourier,
            FieldSampler::Layered(_) => SamplerKind::Layered,
        }
    }

    pub fn spec(&self) -> GridSpec {
        match self {
            FieldSampler::ExactDgff(s) => s.spec(),
            FieldSampler::Fourier(s) => s.spec(),
            FieldSampler::Layered(s) => s.spec(),
        }
    }

    pub fn sample(&self, seed: u64) -> FieldSample {
        match self {
            FieldSampler::ExactDgff(s) => s.sample(seed),
            FieldSampler::Fourier(s) => s.sample(seed),
            FieldSampler::Layered(s) => s.sample(seed),
        }
    }

    /// Rough `(shared, per_sample)` bytes for a sampler of `kind` on `spec`,
    /// computed without building it: the sampler's own tables, and the
    /// working memory of one `sample` call.
    pub fn memory_estimate(kind: SamplerKind, spec: GridSpec) -> Result<(usize, usize)> {
        let f64s = std::mem::size_of::<f64>();
        let n2 = spec.vertex_count();
        let side = spec.cells_per_side() + 2 * spec.pad_cells();
        Ok(match kind {
            SamplerKind::ExactDgff => {
                if spec.n_per_side() > exact::EXACT_MAX_N_PER_SIDE {
                    return Err(Error::GridTooLarge {
                        n_per_side: spec.n_per_side(),
                        max: exact::EXACT_MAX_N_PER_SIDE,
                    });
                }
                (side * side * f64s, 3 * side * side * f64s)
            }
            // one mode record per torus point bounds the mode table
            SamplerKind::Fourier => (side * side * 3 * f64s, (side + 2) * side * 2 * f64s + n2 * f64s),
            SamplerKind::Layered => (n2 * f64s, 2 * n2 * f64s),
            SamplerKind::Supplied => {
                return Err(Error::InvalidPlan("supplied fields have no sampler".into()))
            }
        })
    }

    /// Rough peak working memory of one `sample` call, in bytes.
    pub fn working_bytes(&self) -> usize {
        match self {
            FieldSampler::ExactDgff(s) => s.working_bytes(),
            FieldSampler::Fourier(s) => s.working_bytes(),
            FieldSampler::Layered(s) => s.working_bytes(),
        }
    }
}

pub fn sample_exact_dgff(spec: GridSpec, seed: u64) -> Result<FieldSample> {
    Ok(ExactDgff::new(spec)?.sample(seed))
}

pub fn sample_fourier(spec: GridSpec, seed: u64) -> FieldSample {
    FourierField::new(spec, DEFAULT_FOURIER_C0).sample(seed)
}

pub fn sample_layered(spec: GridSpec, seed: u64) -> FieldSample {
    LayeredField::new(spec).sample(seed)
}
