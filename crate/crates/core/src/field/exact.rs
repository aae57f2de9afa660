use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use super::dst::Dst1;
use super::{FieldSample, GridSpec, SamplerKind};
use crate::{rng, Error, Result};

/// Largest `n_per_side` accepted by the exact sampler.
pub const EXACT_MAX_N_PER_SIDE: usize = 513;

/// Zero-boundary discrete GFF on the padded box `[-p, 1 + p]^2`, restricted to
/// the unit square.
///
/// The covariance is `2 pi (4 I - A)^{-1}` on the interior vertices of the
/// box, `A` the nearest-neighbour adjacency. With this normalisation the
/// variance grows like `log(1/eps)`. Samples are drawn exactly in the sine
/// eigenbasis of the Dirichlet Laplacian, which costs two fast sine
/// transforms per sample instead of a dense factorisation.
pub struct ExactDgff {
    spec: GridSpec,
    /// Interior vertices per side of the padded box.
    m: usize,
    /// Interior index of the unit square's column `i = 0`.
    offset: usize,
    dst: Dst1,
    /// `2 pi / mu_ab` for each eigenpair, row-major in `(a, b)`.
    green_weights: Vec<f64>,
}

impl ExactDgff {
    pub fn new(spec: GridSpec) -> Result<Self> {
        let n = spec.n_per_side();
        if n > EXACT_MAX_N_PER_SIDE {
            return Err(Error::GridTooLarge {
                n_per_side: n,
                max: EXACT_MAX_N_PER_SIDE,
            });
        }
        let pad = spec.pad_cells();
        let m = spec.cells_per_side() + 2 * pad - 1;
        let mut planner = FftPlanner::new();
        let dst = Dst1::new(m, &mut planner);
        let angle = PI / (m + 1) as f64;
        let cosines: Vec<f64> = (1..=m).map(|a| (angle * a as f64).cos()).collect();
        let mut green_weights = Vec::with_capacity(m * m);
        for ca in &cosines {
            for cb in &cosines {
                green_weights.push(2.0 * PI / (4.0 - 2.0 * ca - 2.0 * cb));
            }
        }
        Ok(ExactDgff {
            spec,
            m,
            offset: pad - 1,
            dst,
            green_weights,
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    /// Interior vertices per side of the padded box.
    pub fn padded_side(&self) -> usize {
        self.m
    }

    pub fn working_bytes(&self) -> usize {
        3 * self.m * self.m * std::mem::size_of::<f64>()
    }

    pub fn sample(&self, seed: u64) -> FieldSample {
        let mut rng = rng::stream(seed);
        let noise: Vec<f64> = (0..self.m * self.m)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let values = self.field_from_noise(&noise);
        FieldSample::normalized(self.spec, values, SamplerKind::ExactDgff, seed)
    }

    /// Maps i.i.d. standard normal eigen-coefficients (row-major in mode
    /// indices) to the unnormalised field on the unit square.
    pub fn field_from_noise(&self, noise: &[f64]) -> Vec<f64> {
        let m = self.m;
        let n = self.spec.n_per_side();
        assert_eq!(noise.len(), m * m, "noise must have one entry per eigenmode");
        let basis_norm = 2.0 / (m + 1) as f64;

        let mut coeffs: Vec<f64> = noise
            .iter()
            .zip(&self.green_weights)
            .map(|(z, g)| z * g.sqrt() * basis_norm)
            .collect();
        // along the second mode index: coeffs[a][y]
        self.dst.transform_rows(&mut coeffs, m);

        // keep only the rows y of the unit square, laid out as [y][a]
        let mut rows = vec![0.0; n * m];
        for j in 0..n {
            let y = self.offset + j;
            for a in 0..m {
                rows[j * m + a] = coeffs[a * m + y];
            }
        }
        drop(coeffs);
        self.dst.transform_rows(&mut rows, n);

        let mut values = vec![0.0; n * n];
        for j in 0..n {
            values[j * n..(j + 1) * n]
                .copy_from_slice(&rows[j * m + self.offset..j * m + self.offset + n]);
        }
        values
    }

    /// `w^T C w` for the covariance `C` restricted to the unit square, with
    /// `w` given row-major on the `n x n` grid.
    pub fn quadratic_form(&self, w: &[f64]) -> f64 {
        let m = self.m;
        let n = self.spec.n_per_side();
        assert_eq!(w.len(), n * n);
        // embed as [x][y] on the padded interior
        let mut data = vec![0.0; m * m];
        for j in 0..n {
            for i in 0..n {
                data[(self.offset + i) * m + self.offset + j] = w[j * n + i];
            }
        }
        self.dst.transform_rows(&mut data, m);
        let mut t = vec![0.0; m * m];
        for x in 0..m {
            for b in 0..m {
                t[b * m + x] = data[x * m + b];
            }
        }
        self.dst.transform_rows(&mut t, m);
        let norm = 2.0 / (m + 1) as f64;
        // t is [b][a]; the weights are symmetric in (a, b)
        t.iter()
            .zip(&self.green_weights)
            .map(|(c, g)| g * (c * norm).powi(2))
            .sum()
    }

    /// Variance of the unnormalised field at the centre vertex.
    pub fn center_variance(&self) -> f64 {
        let mut w = vec![0.0; self.spec.vertex_count()];
        w[self.spec.center_index()] = 1.0;
        self.quadratic_form(&w)
    }

    /// Variance of the centre value after subtracting the domain mean.
    pub fn normalized_center_variance(&self) -> f64 {
        self.quadratic_form(&centered_probe(self.spec))
    }
}

/// Weights `e_center - 1/N` turning a field into its mean-normalised centre value.
pub(crate) fn centered_probe(spec: GridSpec) -> Vec<f64> {
    let count = spec.vertex_count();
    let mut w = vec![-1.0 / count as f64; count];
    w[spec.center_index()] += 1.0;
    w
}
