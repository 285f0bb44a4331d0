use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Unnormalised 3D FFT on a row-major `[n0][n1][n2]` buffer, done axis by axis.
pub(crate) struct Fft3 {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = dims.map(|n| planner.plan_fft_forward(n));
        let inverse = dims.map(|n| planner.plan_fft_inverse(n));
        Self {
            dims,
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform including the `1/N` normalisation.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let s = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [n0, n1, n2] = self.dims;
        debug_assert_eq!(data.len(), n0 * n1 * n2);
        // Last axis is contiguous.
        plans[2].process(data);

        let mut line = vec![Complex64::new(0.0, 0.0); n1.max(n0)];
        for i in 0..n0 {
            for l in 0..n2 {
                for j in 0..n1 {
                    line[j] = data[(i * n1 + j) * n2 + l];
                }
                plans[1].process(&mut line[..n1]);
                for j in 0..n1 {
                    data[(i * n1 + j) * n2 + l] = line[j];
                }
            }
        }
        let stride = n1 * n2;
        for jl in 0..stride {
            for i in 0..n0 {
                line[i] = data[i * stride + jl];
            }
            plans[0].process(&mut line[..n0]);
            for i in 0..n0 {
                data[i * stride + jl] = line[i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_circular_convolution() {
        let dims = [4, 6, 5];
        let n: usize = dims.iter().product();
        let a: Vec<Complex64> = (0..n).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64).cos())).collect();
        let b: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 / (1.0 + i as f64), 0.1 * i as f64)).collect();
        let fft = Fft3::new(dims);

        let mut x = a.clone();
        fft.forward(&mut x);
        fft.inverse(&mut x);
        for (u, v) in x.iter().zip(&a) {
            assert!((u - v).norm() < 1e-12);
        }

        let (mut fa, mut fb) = (a.clone(), b.clone());
        fft.forward(&mut fa);
        fft.forward(&mut fb);
        let mut prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
        fft.inverse(&mut prod);
        let idx = |i: usize, j: usize, l: usize| (i * dims[1] + j) * dims[2] + l;
        let (i, j, l) = (1, 4, 2);
        let mut direct = Complex64::new(0.0, 0.0);
        for p in 0..dims[0] {
            for q in 0..dims[1] {
                for r in 0..dims[2] {
                    let s = idx((i + dims[0] - p) % dims[0], (j + dims[1] - q) % dims[1], (l + dims[2] - r) % dims[2]);
                    direct += a[idx(p, q, r)] * b[s];
                }
            }
        }
        assert!((prod[idx(i, j, l)] - direct).norm() < 1e-10);
    }
}
