use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::exact::{centered_probe, ExactDgff};
use super::{FieldSample, GridSpec, SamplerKind};
use crate::rng;

/// Calibrated variance offset: with this value the mean-normalised centre
/// variance of the Fourier sampler equals that of the exact sampler at
/// level 5 (default padding). Reproduced by [`calibrate_fourier_c0`].
pub const DEFAULT_FOURIER_C0: f64 = 0.230_184_286_008_806_8;

/// Level at which the Fourier sampler is matched to the exact sampler.
pub const CALIBRATION_LEVEL: u32 = 5;

#[derive(Debug, Clone, Copy)]
struct Mode {
    slot: usize,
    kx: usize,
    /// Unscaled spectral weight `2 pi / (L^2 |q|^2)`.
    raw_weight: f64,
}

/// Stationary log-correlated field on a torus of side `1 + 2p`.
///
/// Wavenumbers `kappa / L`, in cycles per unit length, between 1 and `1/eps`
/// carry variance proportional to `1/|q|^2` with `q = 2 pi kappa / L`; the
/// zero mode is excluded. The total
/// variance is scaled to exactly `log(1/eps) + c0`.
pub struct FourierField {
    spec: GridSpec,
    /// Torus points per side.
    mt: usize,
    offset: usize,
    modes: Vec<Mode>,
    /// Torus row index for each occupied slot.
    slot_rows: Vec<usize>,
    scale: f64,
    fft: Arc<dyn Fft<f64>>,
}

impl FourierField {
    pub fn new(spec: GridSpec, c0: f64) -> Self {
        let pad = spec.pad_cells();
        let mt = spec.cells_per_side() + 2 * pad;
        let eps = spec.epsilon();
        let side = mt as f64 * eps;
        let f_max = 1.0 / eps;
        let signed = |u: usize| -> f64 {
            if u <= mt / 2 {
                u as f64
            } else {
                u as f64 - mt as f64
            }
        };

        let mut modes = Vec::new();
        let mut slot_rows = Vec::new();
        for ky in 0..mt {
            let mut occupied = false;
            for kx in 0..mt {
                let q = 2.0 * PI / side * signed(kx).hypot(signed(ky));
                // band limits are in cycles per unit length
                if (1.0..=f_max).contains(&(q / (2.0 * PI))) {
                    if !occupied {
                        slot_rows.push(ky);
                        occupied = true;
                    }
                    modes.push(Mode {
                        slot: slot_rows.len() - 1,
                        kx,
                        raw_weight: 2.0 * PI / (side * side * q * q),
                    });
                }
            }
        }

        let raw_total: f64 = modes.iter().map(|m| m.raw_weight).sum();
        let target = (1.0 / eps).ln() + c0;
        let scale = if raw_total > 0.0 && target > 0.0 {
            target / raw_total
        } else {
            0.0
        };
        let fft = FftPlanner::new().plan_fft_inverse(mt);
        FourierField {
            spec,
            mt,
            offset: pad,
            modes,
            slot_rows,
            scale,
            fft,
        }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn working_bytes(&self) -> usize {
        (self.slot_rows.len() + 2) * self.mt * std::mem::size_of::<Complex<f64>>()
            + self.spec.vertex_count() * std::mem::size_of::<f64>()
    }

    /// Marginal variance before mean normalisation.
    pub fn marginal_variance(&self) -> f64 {
        self.modes.iter().map(|m| m.raw_weight).sum::<f64>() * self.scale
    }

    /// Covariance of the unnormalised field between vertices `dx`, `dy` grid steps apart.
    pub fn covariance_at(&self, dx: usize, dy: usize) -> f64 {
        let mt = self.mt as f64;
        self.modes
            .iter()
            .map(|m| {
                let ky = self.slot_rows[m.slot] as f64;
                let phase = 2.0 * PI * (m.kx as f64 * dx as f64 + ky * dy as f64) / mt;
                m.raw_weight * self.scale * phase.cos()
            })
            .sum()
    }

    pub fn sample(&self, seed: u64) -> FieldSample {
        let mt = self.mt;
        let n = self.spec.n_per_side();
        let mut rng = rng::stream(seed);
        let zero = Complex::new(0.0, 0.0);

        let mut rows = vec![zero; self.slot_rows.len() * mt];
        for m in &self.modes {
            let amp = (m.raw_weight * self.scale).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            rows[m.slot * mt + m.kx] = Complex::new(amp * re, amp * im);
        }
        let mut scratch = vec![zero; self.fft.get_inplace_scratch_len()];
        for row in rows.chunks_exact_mut(mt) {
            self.fft.process_with_scratch(row, &mut scratch);
        }

        let mut values = vec![0.0; n * n];
        let mut column = vec![zero; mt];
        for i in 0..n {
            let x = self.offset + i;
            column.iter_mut().for_each(|c| *c = zero);
            for (slot, &ky) in self.slot_rows.iter().enumerate() {
                column[ky] = rows[slot * mt + x];
            }
            self.fft.process_with_scratch(&mut column, &mut scratch);
            for j in 0..n {
                values[j * n + i] = column[self.offset + j].re;
            }
        }
        FieldSample::normalized(self.spec, values, SamplerKind::Fourier, seed)
    }

    /// `w^T C w` for the unnormalised covariance restricted to the unit square.
    pub fn quadratic_form(&self, w: &[f64]) -> f64 {
        self.raw_quadratic_form(w) * self.scale
    }

    fn raw_quadratic_form(&self, w: &[f64]) -> f64 {
        let mt = self.mt;
        let n = self.spec.n_per_side();
        assert_eq!(w.len(), n * n);
        let zero = Complex::new(0.0, 0.0);
        let mut grid = vec![zero; mt * mt];
        for j in 0..n {
            for i in 0..n {
                grid[(self.offset + j) * mt + self.offset + i] = Complex::new(w[j * n + i], 0.0);
            }
        }
        let mut scratch = vec![zero; self.fft.get_inplace_scratch_len()];
        for row in grid.chunks_exact_mut(mt) {
            self.fft.process_with_scratch(row, &mut scratch);
        }
        let mut column = vec![zero; mt];
        let mut power = vec![0.0; mt * mt];
        for kx in 0..mt {
            for y in 0..mt {
                column[y] = grid[y * mt + kx];
            }
            self.fft.process_with_scratch(&mut column, &mut scratch);
            for ky in 0..mt {
                power[ky * mt + kx] = column[ky].norm_sqr();
            }
        }
        self.modes
            .iter()
            .map(|m| m.raw_weight * power[self.slot_rows[m.slot] * mt + m.kx])
            .sum()
    }

    /// Variance of the centre value after subtracting the domain mean.
    pub fn normalized_center_variance(&self) -> f64 {
        self.quadratic_form(&centered_probe(self.spec))
    }
}

/// Solves for the variance offset `c0` that makes the mean-normalised centre
/// variance of the Fourier sampler equal to the exact sampler's at
/// [`CALIBRATION_LEVEL`]. Both variances are exact quadratic forms, so no
/// Monte-Carlo is involved.
pub fn calibrate_fourier_c0() -> f64 {
    let spec = GridSpec::with_level(CALIBRATION_LEVEL).expect("calibration grid is valid");
    let exact = ExactDgff::new(spec)
        .expect("calibration grid is within the exact cap")
        .normalized_center_variance();
    let raw = FourierField::new(spec, 0.0);
    let probe = centered_probe(spec);
    let total: f64 = raw.modes.iter().map(|m| m.raw_weight).sum();
    let normalized = raw.raw_quadratic_form(&probe);
    exact * total / normalized - (1.0 / spec.epsilon()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_calibration_constant_is_reproducible() {
        let c0 = calibrate_fourier_c0();
        assert!((c0 - DEFAULT_FOURIER_C0).abs() < 1e-9, "c0 = {c0:.16}");
    }

    #[test]
    fn calibrated_centre_variances_agree_at_calibration_level() {
        let spec = GridSpec::with_level(CALIBRATION_LEVEL).unwrap();
        let f = FourierField::new(spec, DEFAULT_FOURIER_C0).normalized_center_variance();
        let e = ExactDgff::new(spec).unwrap().normalized_center_variance();
        assert!((f - e).abs() < 1e-9);
    }

    #[test]
    fn marginal_variance_is_log_inverse_eps_plus_c0() {
        for k in 3..=9 {
            let s = FourierField::new(GridSpec::with_level(k).unwrap(), DEFAULT_FOURIER_C0);
            let expect = (1u64 << k) as f64;
            assert!((s.marginal_variance() - (expect.ln() + DEFAULT_FOURIER_C0)).abs() < 1e-9);
            assert!((s.covariance_at(0, 0) - s.marginal_variance()).abs() < 1e-9);
        }
    }

    #[test]
    fn covariance_decays_like_negative_log_distance() {
        let spec = GridSpec::with_level(9).unwrap();
        let s = FourierField::new(spec, DEFAULT_FOURIER_C0);
        let pts: Vec<(f64, f64)> = [4usize, 8, 16, 32, 64]
            .iter()
            .map(|&lag| ((lag as f64 * spec.epsilon()).ln(), s.covariance_at(lag, 0)))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((-1.2..=-0.8).contains(&slope), "slope {slope}");
    }

    #[test]
    fn coarse_levels_without_modes_give_zero_field() {
        let s = FourierField::new(GridSpec::with_level(0).unwrap(), DEFAULT_FOURIER_C0);
        assert_eq!(s.mode_count(), 0);
        assert!(s.sample(3).values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn quadratic_form_of_point_mass_is_marginal_variance() {
        let spec = GridSpec::with_level(4).unwrap();
        let s = FourierField::new(spec, DEFAULT_FOURIER_C0);
        let mut w = vec![0.0; spec.vertex_count()];
        w[7] = 1.0;
        // |sum_x w_x e^{iqx}|^2 counts each mode once
        assert!((s.quadratic_form(&w) - s.marginal_variance()).abs() < 1e-9);
    }
}
