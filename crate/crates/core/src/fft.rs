//! Thin helpers over rustfft: circle evaluation, sample fitting and
//! linear convolution of coefficient arrays.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized transform. `inverse` uses the `e^{+2πijk/m}` kernel.
pub fn transform(buf: &mut [C64], inverse: bool) {
    if buf.len() <= 1 {
        return;
    }
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        let plan = if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        };
        plan.process(buf);
    });
}

/// Values of `Σ c_k z^{jmin+k}` at `z_s = rho·e^{i(phase + 2πs/m)}`, s = 0..m.
pub fn eval_on_circle(jmin: i64, coeffs: &[C64], m: usize, rho: f64, phase: f64) -> Vec<C64> {
    let mut bins = vec![C64::new(0.0, 0.0); m];
    if coeffs.is_empty() {
        return bins;
    }
    let mi = m as i64;
    // ρ^j computed incrementally from a start value; fine for the moderate
    // windows used here, but guard against underflow to keep NaNs out.
    let mut w = C64::from_polar(rho.powi(jmin as i32), phase * jmin as f64);
    let step = C64::from_polar(rho, phase);
    for (k, c) in coeffs.iter().enumerate() {
        let j = jmin + k as i64;
        let bin = j.rem_euclid(mi) as usize;
        bins[bin] += c * w;
        w *= step;
        if k % 256 == 255 {
            // re-anchor to limit drift in the running product
            let jj = j + 1;
            w = C64::from_polar(rho.powf(jj as f64), phase * jj as f64);
        }
    }
    transform(&mut bins, true);
    bins
}

/// Discrete Fourier coefficients of m samples on the unit circle:
/// returns `a` with `a[k] ≈ c_j` for `j ≡ k (mod m)`, already divided by m.
pub fn fit_samples(samples: &[C64]) -> Vec<C64> {
    let mut buf = samples.to_vec();
    transform(&mut buf, false);
    let inv = 1.0 / samples.len() as f64;
    for b in buf.iter_mut() {
        *b *= inv;
    }
    buf
}

/// Coefficient of exponent `j` from a fitted spectrum of length m.
#[inline]
pub fn spectral_coeff(spec: &[C64], j: i64) -> C64 {
    let m = spec.len() as i64;
    spec[j.rem_euclid(m) as usize]
}

/// Linear convolution by zero-padded transforms; direct sum for tiny inputs.
pub fn convolve(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 32 {
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let size = n.next_power_of_two();
    let mut fa = vec![C64::new(0.0, 0.0); size];
    let mut fb = vec![C64::new(0.0, 0.0); size];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    transform(&mut fa, false);
    transform(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    transform(&mut fa, true);
    let inv = 1.0 / size as f64;
    fa.truncate(n);
    for x in fa.iter_mut() {
        *x *= inv;
    }
    fa
}

/// Equispaced unit-circle nodes.
pub fn circle_nodes(m: usize, rho: f64, phase: f64) -> Vec<C64> {
    (0..m)
        .map(|s| C64::from_polar(rho, phase + 2.0 * PI * s as f64 / m as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_eval_matches_direct_sum() {
        let coeffs: Vec<C64> = (0..7).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let jmin = -3;
        let m = 8;
        let (rho, phase) = (0.7, 0.3);
        let vals = eval_on_circle(jmin, &coeffs, m, rho, phase);
        for (s, z) in circle_nodes(m, rho, phase).into_iter().enumerate() {
            let direct: C64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * z.powi(jmin as i32 + k as i32))
                .sum();
            assert!((vals[s] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn convolution_both_paths_agree() {
        let a: Vec<C64> = (0..100).map(|k| C64::new((k as f64).sin(), 0.5)).collect();
        let b: Vec<C64> = (0..40).map(|k| C64::new(1.0, (k as f64).cos())).collect();
        let fast = convolve(&a, &b);
        let mut slow = vec![C64::new(0.0, 0.0); 139];
        for i in 0..100 {
            for j in 0..40 {
                slow[i + j] += a[i] * b[j];
            }
        }
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).norm() < 1e-10);
        }
    }
}
