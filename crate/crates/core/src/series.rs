//! Scalar and vector Laurent polynomials with dense coefficient windows,
//! equispaced boundary samples, and spectral rationalization of boundary data.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Coefficients of ζ^{-1} at or below this size are treated as absent.
pub const RESIDUE_GATE: f64 = 1e-14;
/// Default tolerance for [`rationalize_boundary_map`].
pub const DEFAULT_FIT_TOL: f64 = 1e-8;
/// Default largest |exponent| kept by [`rationalize_boundary_map`].
pub const DEFAULT_MAX_WINDOW: usize = 256;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `p(ζ) = Σ_{j=jmin}^{jmin+len-1} c_j ζ^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PolyJson", try_from = "PolyJson")]
pub struct LaurentPoly {
    jmin: i64,
    coeffs: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    jmin: i64,
    coeffs: Vec<[f64; 2]>,
}

impl From<LaurentPoly> for PolyJson {
    fn from(p: LaurentPoly) -> Self {
        PolyJson {
            jmin: p.jmin,
            coeffs: p.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<PolyJson> for LaurentPoly {
    type Error = Error;
    fn try_from(j: PolyJson) -> Result<Self> {
        if j.coeffs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        Ok(LaurentPoly::new(
            j.jmin,
            j.coeffs.into_iter().map(|[re, im]| C64::new(re, im)).collect(),
        ))
    }
}

impl LaurentPoly {
    pub fn new(jmin: i64, coeffs: Vec<C64>) -> Self {
        let mut p = LaurentPoly { jmin, coeffs };
        p.trim_exact();
        p
    }

    pub fn zero() -> Self {
        LaurentPoly { jmin: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(0, vec![c])
    }

    pub fn monomial(j: i64, c: C64) -> Self {
        Self::new(j, vec![c])
    }

    /// Build from `(exponent, coefficient)` pairs; repeated exponents add.
    pub fn from_terms(terms: &[(i64, C64)]) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![ZERO; (hi - lo + 1) as usize];
        for &(j, c) in terms {
            coeffs[(j - lo) as usize] += c;
        }
        Self::new(lo, coeffs)
    }

    fn trim_exact(&mut self) {
        while self.coeffs.last() == Some(&ZERO) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| **c == ZERO).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.jmin = 0;
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.jmin += lead as i64;
        }
    }

    /// Drop coefficients with modulus ≤ `tol` from both ends of the window.
    pub fn trimmed(&self, tol: f64) -> Self {
        let keep = |c: &C64| c.norm() > tol;
        let Some(first) = self.coeffs.iter().position(keep) else {
            return Self::zero();
        };
        let last = self.coeffs.iter().rposition(keep).unwrap();
        Self::new(self.jmin + first as i64, self.coeffs[first..=last].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn jmin(&self) -> i64 {
        self.jmin
    }

    pub fn jmax(&self) -> i64 {
        self.jmin + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: i64) -> C64 {
        let k = j - self.jmin;
        if k < 0 || k >= self.coeffs.len() as i64 {
            ZERO
        } else {
            self.coeffs[k as usize]
        }
    }

    /// Horner evaluation, positive and negative parts separately.
    pub fn eval(&self, z: C64) -> Result<C64> {
        if self.is_zero() {
            return Ok(ZERO);
        }
        if self.jmin < 0 && z == ZERO {
            return Err(Error::Domain("evaluation at 0 with negative exponents".into()));
        }
        let mut pos = ZERO;
        for j in (self.jmin.max(0)..=self.jmax()).rev() {
            pos = pos * z + self.coeff(j);
        }
        if self.jmin > 0 {
            pos *= z.powi(self.jmin as i32);
        }
        let mut neg = ZERO;
        if self.jmin < 0 {
            let w = z.inv();
            for k in (1..=-self.jmin).rev() {
                neg = neg * w + self.coeff(-k);
            }
            neg *= w;
        }
        Ok(pos + neg)
    }

    /// Values on `m` equispaced points of the circle `|ζ| = rho`, rotated by `phase`.
    pub fn eval_circle(&self, m: usize, rho: f64, phase: f64) -> Vec<C64> {
        fft::eval_on_circle(self.jmin, &self.coeffs, m, rho, phase)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.jmin, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiply by ζ^k.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { jmin: self.jmin + k, coeffs: self.coeffs.clone() }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (self.jmin + k as i64) as f64)
            .collect();
        Self::new(self.jmin - 1, coeffs)
    }

    /// `q` with `q' = p` and, when no negative powers arise, `q(0) = 0`.
    pub fn antiderivative_from_zero(&self) -> Result<Antiderivative<LaurentPoly>> {
        let r = self.coeff(-1);
        if r.norm() > RESIDUE_GATE {
            return Err(Error::Residue(r.norm()));
        }
        if self.is_zero() {
            return Ok(Antiderivative { value: Self::zero(), base_point_excluded: false });
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let j = self.jmin + k as i64;
                if j == -1 {
                    ZERO
                } else {
                    c / (j + 1) as f64
                }
            })
            .collect();
        let value = Self::new(self.jmin + 1, coeffs);
        let base_point_excluded = value.jmin < 0;
        Ok(Antiderivative { value, base_point_excluded })
    }

    pub fn mul_poly(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::new(self.jmin + other.jmin, fft::convolve(&self.coeffs, &other.coeffs))
    }

    /// Max modulus over `m` samples of the circle `|ζ| = rho`.
    pub fn sup_on_circle(&self, m: usize, rho: f64) -> f64 {
        self.eval_circle(m, rho, 0.0).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

/// Result of [`LaurentPoly::antiderivative_from_zero`]; negative powers in the
/// primitive make `q(0)` undefined, which pipeline callers must refuse.
#[derive(Clone, Debug, PartialEq)]
pub struct Antiderivative<T> {
    pub value: T,
    pub base_point_excluded: bool,
}

impl<T> Antiderivative<T> {
    /// The primitive, or an error when the base point is not in its domain.
    pub fn require_base_point(self) -> Result<T> {
        if self.base_point_excluded {
            Err(Error::Domain("primitive has a pole at the base point".into()))
        } else {
            Ok(self.value)
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let lo = self.jmin.min(o.jmin);
        let hi = self.jmax().max(o.jmax());
        let mut coeffs = vec![ZERO; (hi - lo + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.jmin - lo) as usize + k] += c;
        }
        for (k, c) in o.coeffs.iter().enumerate() {
            coeffs[(o.jmin - lo) as usize + k] += c;
        }
        LaurentPoly::new(lo, coeffs)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        self + &(-o)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        self.mul_poly(o)
    }
}

/// An ordered list of `n` Laurent polynomials, i.e. a map into ℂⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "VectorJson", try_from = "VectorJson")]
pub struct VectorLaurent {
    comps: Vec<LaurentPoly>,
}

#[derive(Serialize, Deserialize)]
struct VectorJson {
    n: usize,
    components: Vec<LaurentPoly>,
}

impl From<VectorLaurent> for VectorJson {
    fn from(v: VectorLaurent) -> Self {
        VectorJson { n: v.comps.len(), components: v.comps }
    }
}

impl TryFrom<VectorJson> for VectorLaurent {
    type Error = Error;
    fn try_from(j: VectorJson) -> Result<Self> {
        if j.n != j.components.len() {
            return Err(Error::Dimension(j.n, j.components.len()));
        }
        VectorLaurent::new(j.components)
    }
}

impl VectorLaurent {
    pub fn new(comps: Vec<LaurentPoly>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::Domain("vector Laurent polynomial needs n ≥ 1".into()));
        }
        Ok(VectorLaurent { comps })
    }

    pub fn zeros(n: usize) -> Self {
        VectorLaurent { comps: vec![LaurentPoly::zero(); n] }
    }

    /// Constant map with value `v`.
    pub fn constant(v: &[C64]) -> Self {
        VectorLaurent { comps: v.iter().map(|c| LaurentPoly::constant(*c)).collect() }
    }

    /// `p(ζ)·v` for a scalar polynomial and a constant vector.
    pub fn from_scalar(p: &LaurentPoly, v: &[C64]) -> Self {
        VectorLaurent { comps: v.iter().map(|c| p.scale(*c)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[LaurentPoly] {
        &self.comps
    }

    pub fn comp(&self, k: usize) -> &LaurentPoly {
        &self.comps[k]
    }

    pub fn jmin(&self) -> i64 {
        self.comps.iter().filter(|p| !p.is_zero()).map(|p| p.jmin()).min().unwrap_or(0)
    }

    pub fn jmax(&self) -> i64 {
        self.comps.iter().filter(|p| !p.is_zero()).map(|p| p.jmax()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: C64) -> Result<Vec<C64>> {
        self.comps.iter().map(|p| p.eval(z)).collect()
    }

    /// Component-major samples on a circle: `out[k][s]`.
    pub fn eval_circle(&self, m: usize, rho: f64, phase: f64) -> Vec<Vec<C64>> {
        self.comps.iter().map(|p| p.eval_circle(m, rho, phase)).collect()
    }

    /// Point-major samples on a circle: `out[s][k]`.
    pub fn eval_circle_points(&self, m: usize, rho: f64, phase: f64) -> Vec<Vec<C64>> {
        transpose(&self.eval_circle(m, rho, phase))
    }

    pub fn derivative(&self) -> Self {
        VectorLaurent { comps: self.comps.iter().map(|p| p.derivative()).collect() }
    }

    pub fn antiderivative_from_zero(&self) -> Result<Antiderivative<VectorLaurent>> {
        let parts = self
            .comps
            .iter()
            .map(|p| p.antiderivative_from_zero())
            .collect::<Result<Vec<_>>>()?;
        let base_point_excluded = parts.iter().any(|a| a.base_point_excluded);
        Ok(Antiderivative {
            value: VectorLaurent { comps: parts.into_iter().map(|a| a.value).collect() },
            base_point_excluded,
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        VectorLaurent { comps: self.comps.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn shift(&self, k: i64) -> Self {
        VectorLaurent { comps: self.comps.iter().map(|p| p.shift(k)).collect() }
    }

    /// Multiply every component by a scalar polynomial.
    pub fn mul_scalar(&self, p: &LaurentPoly) -> Self {
        VectorLaurent { comps: self.comps.iter().map(|q| q.mul_poly(p)).collect() }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.dim() != o.dim() {
            return Err(Error::Dimension(self.dim(), o.dim()));
        }
        Ok(VectorLaurent { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(C64::new(-1.0, 0.0)))
    }

    pub fn trimmed(&self, tol: f64) -> Self {
        VectorLaurent { comps: self.comps.iter().map(|p| p.trimmed(tol)).collect() }
    }

    /// Largest Euclidean norm over `m` samples of `|ζ| = rho`.
    pub fn sup_on_circle(&self, m: usize, rho: f64) -> f64 {
        self.eval_circle_points(m, rho, 0.0).iter().map(|v| norm(v)).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Hermitian Euclidean norm of a complex vector.
pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn transpose(rows: &[Vec<C64>]) -> Vec<Vec<C64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = rows[0].len();
    (0..m).map(|s| rows.iter().map(|r| r[s]).collect()).collect()
}

/// Equispaced samples on 𝕋 of a map into ℂ^dim, optionally carrying ξ-Taylor
/// coefficients `k = 0..=degree` of a two-variable map `(ζ, ξ) ↦ Σ a_k(ζ) ξ^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryGrid {
    m: usize,
    dim: usize,
    degree: usize,
    data: Vec<C64>,
}

impl BoundaryGrid {
    fn check_m(m: usize) -> Result<()> {
        if m < 16 || !m.is_power_of_two() {
            return Err(Error::Domain(format!("sample count {m} must be a power of two ≥ 16")));
        }
        Ok(())
    }

    /// Plain samples `f(ζ_s)`, ζ_s = e^{2πis/m}.
    pub fn from_fn(m: usize, dim: usize, f: impl Fn(C64) -> Vec<C64>) -> Result<Self> {
        Self::from_taylor_fn(m, dim, 0, |z| vec![f(z)])
    }

    /// Samples of the ξ-Taylor coefficients `f(ζ_s)[k]`, k = 0..=degree.
    pub fn from_taylor_fn(
        m: usize,
        dim: usize,
        degree: usize,
        f: impl Fn(C64) -> Vec<Vec<C64>>,
    ) -> Result<Self> {
        Self::check_m(m)?;
        let mut data = vec![ZERO; (degree + 1) * m * dim];
        for (s, z) in fft::circle_nodes(m, 1.0, 0.0).into_iter().enumerate() {
            let t = f(z);
            if t.len() != degree + 1 {
                return Err(Error::Dimension(degree + 1, t.len()));
            }
            for (k, v) in t.iter().enumerate() {
                if v.len() != dim {
                    return Err(Error::Dimension(dim, v.len()));
                }
                for (c, x) in v.iter().enumerate() {
                    if !x.is_finite() {
                        return Err(Error::Domain("non-finite boundary sample".into()));
                    }
                    data[(k * m + s) * dim + c] = *x;
                }
            }
        }
        Ok(BoundaryGrid { m, dim, degree, data })
    }

    /// Raw constructor; `data` is laid out as `[(k·m + s)·dim + c]`.
    pub fn from_samples(m: usize, dim: usize, degree: usize, data: Vec<C64>) -> Result<Self> {
        Self::check_m(m)?;
        if data.len() != (degree + 1) * m * dim {
            return Err(Error::Dimension((degree + 1) * m * dim, data.len()));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite boundary sample".into()));
        }
        Ok(BoundaryGrid { m, dim, degree, data })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn node(&self, s: usize) -> C64 {
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI * s as f64 / self.m as f64)
    }

    /// Taylor coefficient `k` at sample `s`.
    pub fn taylor(&self, k: usize, s: usize) -> &[C64] {
        let o = (k * self.m + s) * self.dim;
        &self.data[o..o + self.dim]
    }

    /// Plain value at sample `s` (coefficient 0).
    pub fn value(&self, s: usize) -> &[C64] {
        self.taylor(0, s)
    }

    /// Evaluate the two-variable map at sample `s` and a point ξ.
    pub fn eval_xi(&self, s: usize, xi: C64) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        let mut p = C64::new(1.0, 0.0);
        for k in 0..=self.degree {
            for (o, x) in out.iter_mut().zip(self.taylor(k, s)) {
                *o += x * p;
            }
            p *= xi;
        }
        out
    }

    fn channel(&self, k: usize, c: usize) -> Vec<C64> {
        (0..self.m).map(|s| self.taylor(k, s)[c]).collect()
    }
}

/// Output of [`rationalize_boundary_map`]: `η̃(ζ, ξ) = Σ_k B_k(ζ) ξ^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rationalized {
    pub terms: Vec<VectorLaurent>,
    pub sup_err: f64,
    pub window: usize,
}

impl Rationalized {
    pub fn eval(&self, z: C64, xi: C64) -> Result<Vec<C64>> {
        let dim = self.terms[0].dim();
        let mut out = vec![ZERO; dim];
        let mut p = C64::new(1.0, 0.0);
        for b in &self.terms {
            for (o, x) in out.iter_mut().zip(b.eval(z)?) {
                *o += x * p;
            }
            p *= xi;
        }
        Ok(out)
    }

    /// Most negative exponent over all terms (0 when none is negative).
    pub fn min_exponent(&self) -> i64 {
        self.terms.iter().map(|t| t.jmin()).min().unwrap_or(0).min(0)
    }
}

/// Fit each ξ-coefficient of `g` by a symmetric Laurent window, choosing the
/// smallest window whose refined-grid sup-error estimate meets `tol`.
///
/// The estimate compares the truncated fit with the full trigonometric
/// interpolant on a 2× refined ζ-grid and sums the coefficient errors over the
/// ξ-degree, which bounds the error on 𝕋 × D̄.
pub fn rationalize_boundary_map(g: &BoundaryGrid, tol: f64, max_window: usize) -> Result<Rationalized> {
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let m = g.m;
    let spectra: Vec<Vec<Vec<C64>>> = (0..=g.degree)
        .map(|k| (0..g.dim).map(|c| fft::fit_samples(&g.channel(k, c))).collect())
        .collect();
    let cap = max_window.min(m / 2 - 1);
    let estimate = |w: usize| -> f64 {
        // tail Σ_{w<|j|≤m/2} c_j ζ^j sampled at 2m points, per ξ-coefficient
        let mut total = 0.0;
        for spec_k in &spectra {
            let mut sq = vec![0.0; 2 * m];
            for spec in spec_k {
                let half = (m / 2) as i64;
                let lo = -half;
                let coeffs: Vec<C64> = (lo..half)
                    .map(|j| if j.unsigned_abs() as usize > w { fft::spectral_coeff(spec, j) } else { ZERO })
                    .collect();
                let vals = fft::eval_on_circle(lo, &coeffs, 2 * m, 1.0, 0.0);
                for (a, v) in sq.iter_mut().zip(vals) {
                    *a += v.norm_sqr();
                }
            }
            total += sq.into_iter().fold(0.0, f64::max).sqrt();
        }
        total
    };
    let build = |w: usize| -> Vec<VectorLaurent> {
        spectra
            .iter()
            .map(|spec_k| {
                let comps = spec_k
                    .iter()
                    .map(|spec| {
                        let wi = w as i64;
                        LaurentPoly::new(-wi, (-wi..=wi).map(|j| fft::spectral_coeff(spec, j)).collect())
                            .trimmed(0.0)
                    })
                    .collect();
                VectorLaurent { comps }
            })
            .collect()
    };
    let top = estimate(cap);
    if top > tol {
        return Err(Error::Approximation { tol, window: cap, best: top });
    }
    // bisection on the window; the tail estimate is monotone up to rounding
    let (mut lo, mut hi, mut best) = (-1i64, cap as i64, top);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let e = estimate(mid as usize);
        if e <= tol {
            hi = mid;
            best = e;
        } else {
            lo = mid;
        }
    }
    let hi = hi as usize;
    Ok(Rationalized { terms: build(hi), sup_err: best, window: hi })
}

/// Trigonometric interpolant of samples on 𝕋, window |j| < m/2.
pub fn trig_interpolant(samples: &[C64]) -> LaurentPoly {
    let half = (samples.len() / 2) as i64;
    let spec = fft::fit_samples(samples);
    LaurentPoly::new(1 - half, (1 - half..half).map(|j| fft::spectral_coeff(&spec, j)).collect())
}

/// Winding number about 0 of a closed sampled curve.
pub fn winding_number(vals: &[C64]) -> i64 {
    let mut total = 0.0;
    for k in 0..vals.len() {
        let (a, b) = (vals[k], vals[(k + 1) % vals.len()]);
        total += (b / a).arg();
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

/// Scalar convenience wrapper: fit plain samples on 𝕋 by a Laurent window.
pub fn fit_scalar(samples: &[C64], tol: f64, max_window: usize) -> Result<(LaurentPoly, f64)> {
    let g = BoundaryGrid::from_samples(samples.len(), 1, 0, samples.to_vec())?;
    let r = rationalize_boundary_map(&g, tol, max_window)?;
    Ok((r.terms[0].comps[0].clone(), r.sup_err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn monomial_and_symmetric_values() {
        let p = LaurentPoly::monomial(2, c(1.0, 0.0));
        assert_eq!(p.eval(c(2.0, 0.0)).unwrap(), c(4.0, 0.0));
        let q = LaurentPoly::from_terms(&[(-1, c(1.0, 0.0)), (1, c(1.0, 0.0))]);
        assert!(q.eval(c(0.0, 1.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn eval_handles_purely_negative_windows() {
        let p = LaurentPoly::from_terms(&[(-5, c(2.0, 0.0)), (-3, c(0.0, 1.0))]);
        let z = c(0.4, -0.9);
        let direct = c(2.0, 0.0) * z.powi(-5) + c(0.0, 1.0) * z.powi(-3);
        assert!((p.eval(z).unwrap() - direct).norm() < 1e-12 * direct.norm());
        let r = LaurentPoly::from_terms(&[(3, c(1.0, 1.0)), (4, c(-1.0, 0.0))]);
        let direct = c(1.0, 1.0) * z.powi(3) - z.powi(4);
        assert!((r.eval(z).unwrap() - direct).norm() < 1e-14);
    }

    #[test]
    fn evaluation_at_zero_with_pole_is_refused() {
        let p = LaurentPoly::from_terms(&[(-1, c(1.0, 0.0))]);
        assert!(matches!(p.eval(c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn constant_vector_evaluates_to_itself() {
        let v = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)];
        let p = VectorLaurent::constant(&v);
        assert_eq!(p.eval(c(0.3, 0.7)).unwrap(), v.to_vec());
    }

    #[test]
    fn antiderivative_examples() {
        let one = LaurentPoly::constant(c(1.0, 0.0));
        assert_eq!(one.antiderivative_from_zero().unwrap().value, LaurentPoly::monomial(1, c(1.0, 0.0)));
        let p = LaurentPoly::monomial(4, c(5.0, 0.0));
        assert_eq!(p.antiderivative_from_zero().unwrap().value, LaurentPoly::monomial(5, c(1.0, 0.0)));
        let q = LaurentPoly::monomial(-2, c(1.0, 0.0)).antiderivative_from_zero().unwrap();
        assert!(q.base_point_excluded);
        assert_eq!(q.value, LaurentPoly::monomial(-1, c(-1.0, 0.0)));
        assert!(q.require_base_point().is_err());
        let r = LaurentPoly::monomial(-1, c(1e-3, 0.0));
        assert!(matches!(r.antiderivative_from_zero(), Err(Error::Residue(_))));
    }

    #[test]
    fn rationalize_exact_monomial_and_constant() {
        let g = BoundaryGrid::from_taylor_fn(64, 1, 1, |z| vec![vec![c(0.0, 0.0)], vec![z]]).unwrap();
        let r = rationalize_boundary_map(&g, 1e-8, 256).unwrap();
        assert!(r.terms[0].comp(0).trimmed(1e-14).is_zero());
        let b1 = r.terms[1].comp(0).trimmed(1e-14);
        assert_eq!(b1.jmin(), 1);
        assert_eq!(b1.jmax(), 1);
        assert!((b1.coeff(1) - 1.0).norm() < 1e-14);
        assert!(r.sup_err < 1e-13);

        let k = BoundaryGrid::from_fn(32, 1, |_| vec![c(3.0, 0.0)]).unwrap();
        let r = rationalize_boundary_map(&k, 1e-8, 256).unwrap();
        assert_eq!(r.window, 0);
        assert!((r.terms[0].comp(0).coeff(0) - 3.0).norm() < 1e-14);
    }

    #[test]
    fn rationalize_exponential_matches_factorial_tail() {
        // independent oracle: smallest k with Σ_{j>k} 1/j! ≤ 1e-8
        let mut fact = vec![1.0f64];
        for j in 1..40 {
            fact.push(fact[j - 1] * j as f64);
        }
        let tail = |k: usize| (k + 1..40).map(|j| 1.0 / fact[j]).sum::<f64>();
        let k_oracle = (0..40).find(|&k| tail(k) <= 1e-8).unwrap();

        let g = BoundaryGrid::from_taylor_fn(128, 1, 2, |z| {
            vec![vec![c(0.0, 0.0)], vec![c(0.0, 0.0)], vec![z.exp()]]
        })
        .unwrap();
        let r = rationalize_boundary_map(&g, 1e-8, 256).unwrap();
        let b2 = r.terms[2].comp(0).trimmed(1e-15);
        assert_eq!(r.window, k_oracle);
        assert_eq!(b2.jmax() as usize, k_oracle);
        for j in 0..=k_oracle {
            assert!((b2.coeff(j as i64) - 1.0 / fact[j]).norm() < 1e-13);
        }
    }

    #[test]
    fn rough_data_reports_approximation_error() {
        let g = BoundaryGrid::from_fn(64, 1, |z| vec![c(if z.im >= 0.0 { 1.0 } else { -1.0 }, 0.0)]).unwrap();
        assert!(matches!(rationalize_boundary_map(&g, 1e-8, 256), Err(Error::Approximation { .. })));
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(BoundaryGrid::from_fn(12, 1, |_| vec![c(0.0, 0.0)]).is_err());
        assert!(BoundaryGrid::from_fn(8, 1, |_| vec![c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let v = VectorLaurent::new(vec![
            LaurentPoly::from_terms(&[(-2, c(1.0, 2.0)), (3, c(0.5, 0.0))]),
            LaurentPoly::constant(c(0.0, -1.0)),
        ])
        .unwrap();
        let s = v.to_json().unwrap();
        assert!(s.contains("\"n\":2"));
        assert!(s.contains("\"jmin\":-2"));
        assert_eq!(VectorLaurent::from_json(&s).unwrap(), v);
    }
}
