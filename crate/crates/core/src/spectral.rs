//! Trigonometric interpolation and spectral differentiation on uniform
//! periodic grids.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::Vec3;

/// Normalized DFT coefficients `c_k = (1/N) Σ x_j e^{-i k θ_j}`.
pub(crate) fn dft(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Real Fourier coefficients of a scalar periodic sample list on `[0, 2π)`:
/// `x(θ) = a0 + Σ_{k=1}^{K} a_k cos kθ + b_k sin kθ`. Returns `(a0, a, b)`
/// with `a[k-1]`, `b[k-1]` for frequency `k`.
pub(crate) fn real_coefficients(samples: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let n = samples.len();
    let c = dft(samples);
    let kmax = n / 2;
    let mut a = Vec::with_capacity(kmax);
    let mut b = Vec::with_capacity(kmax);
    for (k, ck) in c.iter().enumerate().take(kmax + 1).skip(1) {
        if n % 2 == 0 && k == kmax {
            // Nyquist mode: cosine only, so the interpolant stays real.
            a.push(ck.re);
            b.push(0.0);
        } else {
            a.push(2.0 * ck.re);
            b.push(-2.0 * ck.im);
        }
    }
    (c[0].re, a, b)
}

/// Derivative with respect to θ ∈ [0, 2π) of the trigonometric interpolant
/// of `samples`, evaluated at the sample nodes.
pub(crate) fn derivative(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut c = dft(samples);
    for (k, ck) in c.iter_mut().enumerate() {
        let freq = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        if n % 2 == 0 && k == n / 2 {
            *ck = Complex64::new(0.0, 0.0);
        } else {
            *ck *= Complex64::new(0.0, freq);
        }
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut c);
    c.iter().map(|z| z.re).collect()
}

/// Componentwise spectral derivative of a periodic vector field.
pub(crate) fn derivative_vec(samples: &[Vec3]) -> Vec<Vec3> {
    let comp = |i: usize| derivative(&samples.iter().map(|v| v[i]).collect::<Vec<_>>());
    let (dx, dy, dz) = (comp(0), comp(1), comp(2));
    (0..samples.len())
        .map(|j| Vec3::new(dx[j], dy[j], dz[j]))
        .collect()
}
