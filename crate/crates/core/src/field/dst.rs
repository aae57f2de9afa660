use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Unnormalised type-I discrete sine transform of length `m`,
/// `S[k] = sum_{j=1}^{m} x[j] sin(pi k j / (m + 1))` for `k = 1..=m`,
/// computed through a complex FFT of length `2(m + 1)`.
///
/// Two real rows share one complex transform: the odd extension of a real
/// sequence has a purely imaginary spectrum, so packing `a + i b` separates
/// cleanly into `S_a = -Im(Z) / 2` and `S_b = Re(Z) / 2`.
pub(crate) struct Dst1 {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Dst1 {
    pub(crate) fn new(m: usize, planner: &mut FftPlanner<f64>) -> Self {
        let fft = planner.plan_fft_forward(2 * (m + 1));
        Dst1 { m, fft }
    }

    pub(crate) fn buffer(&self) -> Vec<Complex<f64>> {
        vec![Complex::new(0.0, 0.0); 2 * (self.m + 1)]
    }

    pub(crate) fn scratch(&self) -> Vec<Complex<f64>> {
        vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()]
    }

    /// Transforms `a` and `b` (each of length `m`) into `out_a` and `out_b`.
    pub(crate) fn transform_pair(
        &self,
        a: &[f64],
        b: &[f64],
        out_a: &mut [f64],
        out_b: &mut [f64],
        buf: &mut [Complex<f64>],
        scratch: &mut [Complex<f64>],
    ) {
        let m = self.m;
        let n = 2 * (m + 1);
        buf[0] = Complex::new(0.0, 0.0);
        buf[m + 1] = Complex::new(0.0, 0.0);
        for j in 0..m {
            let v = Complex::new(a[j], b[j]);
            buf[j + 1] = v;
            buf[n - j - 1] = -v;
        }
        self.fft.process_with_scratch(buf, scratch);
        for k in 0..m {
            let z = buf[k + 1];
            out_a[k] = -z.im / 2.0;
            out_b[k] = z.re / 2.0;
        }
    }

    /// Transforms every row of a row-major `rows x m` matrix in place.
    pub(crate) fn transform_rows(&self, data: &mut [f64], rows: usize) {
        let m = self.m;
        let mut buf = self.buffer();
        let mut scratch = self.scratch();
        let zeros = vec![0.0; m];
        let mut out_a = vec![0.0; m];
        let mut out_b = vec![0.0; m];
        let mut r = 0;
        while r < rows {
            if r + 1 < rows {
                let (head, tail) = data.split_at_mut((r + 1) * m);
                let a = &mut head[r * m..];
                let b = &mut tail[..m];
                self.transform_pair(a, b, &mut out_a, &mut out_b, &mut buf, &mut scratch);
                a.copy_from_slice(&out_a);
                b.copy_from_slice(&out_b);
            } else {
                let a = &mut data[r * m..(r + 1) * m];
                self.transform_pair(a, &zeros, &mut out_a, &mut out_b, &mut buf, &mut scratch);
                a.copy_from_slice(&out_a);
            }
            r += 2;
        }
    }
}
