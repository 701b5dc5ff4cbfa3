//! The null quadric 𝔄 = {z ∈ ℂⁿ : Σ z_j² = 0}: the bilinear form Θ, the
//! spinor map π: ℂ² → 𝔄 ⊂ ℂ³, the frame parametrization ψ_{(u,v,w)} and
//! continuous lifts of disc maps through π and ψ.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::series::{self, norm, LaurentPoly, VectorLaurent};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Θ(z, w) = Σ z_j w_j, no conjugation.
pub fn theta(z: &[C64], w: &[C64]) -> Result<C64> {
    if z.len() != w.len() {
        return Err(Error::Dimension(z.len(), w.len()));
    }
    Ok(theta_unchecked(z, w))
}

#[inline]
pub fn theta_unchecked(z: &[C64], w: &[C64]) -> C64 {
    z.iter().zip(w).map(|(a, b)| a * b).sum()
}

/// A nonzero point of the null quadric.
#[derive(Clone, Debug, PartialEq)]
pub struct NullVector(Vec<C64>);

impl NullVector {
    pub fn new(v: Vec<C64>) -> Result<Self> {
        if v.len() < 3 {
            return Err(Error::Domain(format!("null vectors need n ≥ 3, got {}", v.len())));
        }
        let n2 = norm(&v).powi(2);
        if n2 == 0.0 {
            return Err(Error::Domain("zero vector is not in the punctured quadric".into()));
        }
        let q = theta_unchecked(&v, &v).norm();
        if q > 1e-10 * n2 {
            return Err(Error::Domain(format!("Θ(v,v) = {q:e} is not null")));
        }
        Ok(NullVector(v))
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `u − i·v` for orthonormal real vectors: the null direction whose real
    /// form traces the disc `ℜ(ξ·(u − iv)) = ℜξ·u + ℑξ·v`.
    pub fn from_real_pair(u: &[f64], v: &[f64]) -> Result<Self> {
        Self::new(u.iter().zip(v).map(|(a, b)| C64::new(*a, -b)).collect())
    }
}

/// π(u, v) = (u² − v², 2uv, −i(u² + v²)).
#[inline]
pub fn spinor_pi(u: C64, v: C64) -> [C64; 3] {
    let (u2, v2) = (u * u, v * v);
    [u2 - v2, 2.0 * u * v, -I * (u2 + v2)]
}

/// Polarization of π: π(a + b) = π(a) + 2·π̂(a, b) + π(b).
#[inline]
pub fn spinor_pi_hat(a: [C64; 2], b: [C64; 2]) -> [C64; 3] {
    [
        a[0] * b[0] - a[1] * b[1],
        a[0] * b[1] + a[1] * b[0],
        -I * (a[0] * b[0] + a[1] * b[1]),
    ]
}

/// One preimage of a null vector in ℂ³ under π (the other is its negative).
pub fn spinor_sqrt(f: &[C64]) -> [C64; 2] {
    let u2 = (f[0] + I * f[2]) * 0.5;
    let v2 = (I * f[2] - f[0]) * 0.5;
    if u2.norm() >= v2.norm() {
        let u = u2.sqrt();
        if u == ZERO {
            return [ZERO, ZERO];
        }
        [u, f[1] / (2.0 * u)]
    } else {
        let v = v2.sqrt();
        [f[1] / (2.0 * v), v]
    }
}

/// Square-root channels tracked along sampled paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    SqrtA = 0,
    SqrtHalfIOverB = 1,
    SqrtC = 2,
    SqrtR = 3,
}

/// Continuous branch selection: each new root is the sign closest to the
/// previous one on its channel, which is continuous as long as consecutive
/// samples turn by less than π/2.
#[derive(Clone, Debug, Default)]
pub struct BranchTracker {
    last: [Option<C64>; 4],
    spinor: Option<[C64; 2]>,
}

impl BranchTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// √x on the given channel; principal branch on first use.
    pub fn sqrt(&mut self, ch: Channel, x: C64) -> C64 {
        let mut r = x.sqrt();
        if let Some(prev) = self.last[ch as usize] {
            if (r - prev).norm() > (r + prev).norm() {
                r = -r;
            }
        }
        self.last[ch as usize] = Some(r);
        r
    }

    /// Sign of a spinor chosen closest to the previously tracked spinor.
    pub fn align_spinor(&mut self, s: [C64; 2]) -> [C64; 2] {
        let mut s = s;
        if let Some(p) = self.spinor {
            let d_plus = (s[0] - p[0]).norm_sqr() + (s[1] - p[1]).norm_sqr();
            let d_minus = (s[0] + p[0]).norm_sqr() + (s[1] + p[1]).norm_sqr();
            if d_minus < d_plus {
                s = [-s[0], -s[1]];
            }
        }
        self.spinor = Some(s);
        s
    }
}

/// Three null vectors with the pairings a = Θ(v,w), b = Θ(u,w), c = Θ(u,v).
#[derive(Clone, Debug)]
pub struct FrameTriple {
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub w: Vec<C64>,
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl FrameTriple {
    pub fn new(u: &NullVector, v: &NullVector, w: &NullVector) -> Result<Self> {
        let (u, v, w) = (u.as_slice(), v.as_slice(), w.as_slice());
        if u.len() != v.len() || u.len() != w.len() {
            return Err(Error::Dimension(u.len(), v.len().max(w.len())));
        }
        let a = theta_unchecked(v, w);
        let b = theta_unchecked(u, w);
        let c = theta_unchecked(u, v);
        let (nu, nv, nw) = (norm(u), norm(v), norm(w));
        for (name, x, s) in [("a", a, nv * nw), ("b", b, nu * nw), ("c", c, nu * nv)] {
            if x.norm() < 1e-8 * s {
                return Err(Error::DegenerateFrame(format!("|{name}| = {:e}", x.norm())));
            }
        }
        Ok(FrameTriple { u: u.to_vec(), v: v.to_vec(), w: w.to_vec(), a, b, c })
    }
}

pub type Mat3 = [[C64; 3]; 3];
pub type Mat2 = [[C64; 2]; 2];

fn det3(m: &Mat3) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inv3(m: &Mat3) -> Option<Mat3> {
    let d = det3(m);
    if d.norm() == 0.0 || !d.is_finite() {
        return None;
    }
    let mut r = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (i1, i2) = ((j + 1) % 3, (j + 2) % 3);
            let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
            r[i][j] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) / d;
        }
    }
    Some(r)
}

/// The matrices A(a,b,c) and B(a,b) of the frame parametrization, with the
/// roots √a and √(i/(2b)) taken from the tracker.
pub fn frame_matrices(t: &FrameTriple, br: &mut BranchTracker) -> Result<(Mat3, Mat2)> {
    let (a, b, c) = (t.a, t.b, t.c);
    let am = [
        [1.0 / a, ZERO, -I / a],
        [-I / b, 1.0 / b, ZERO],
        [ZERO, -I / c, 1.0 / c],
    ];
    if det3(&am).norm() == 0.0 {
        return Err(Error::DegenerateFrame("det A = 0".into()));
    }
    let ra = br.sqrt(Channel::SqrtA, a);
    let rk = br.sqrt(Channel::SqrtHalfIOverB, I / (2.0 * b));
    let bm = [[1.0 / ra, ZERO], [I * rk, -rk]];
    Ok((am, bm))
}

pub fn det_a(t: &FrameTriple) -> C64 {
    let am = [
        [1.0 / t.a, ZERO, -I / t.a],
        [-I / t.b, 1.0 / t.b, ZERO],
        [ZERO, -I / t.c, 1.0 / t.c],
    ];
    det3(&am)
}

/// Precomputed ψ_{(u,v,w)} for repeated evaluation.
#[derive(Clone, Debug)]
pub struct PsiFrame {
    pub triple: FrameTriple,
    pub a_mat: Mat3,
    pub a_inv: Mat3,
    pub b_mat: Mat2,
}

impl PsiFrame {
    pub fn new(t: FrameTriple, br: &mut BranchTracker) -> Result<Self> {
        let (a_mat, b_mat) = frame_matrices(&t, br)?;
        let a_inv = inv3(&a_mat).ok_or_else(|| Error::DegenerateFrame("A not invertible".into()))?;
        Ok(PsiFrame { triple: t, a_mat, a_inv, b_mat })
    }

    /// ψ(s, t) = αu + βv + γw with (α, β, γ) = π((s, t)·B)·A⁻¹.
    pub fn eval(&self, s: C64, tp: C64) -> Vec<C64> {
        let b = &self.b_mat;
        let x = [s * b[0][0] + tp * b[1][0], s * b[0][1] + tp * b[1][1]];
        let p = spinor_pi(x[0], x[1]);
        let mut coef = [ZERO; 3];
        for (j, c) in coef.iter_mut().enumerate() {
            *c = (0..3).map(|i| p[i] * self.a_inv[i][j]).sum();
        }
        let t = &self.triple;
        (0..t.u.len()).map(|k| coef[0] * t.u[k] + coef[1] * t.v[k] + coef[2] * t.w[k]).collect()
    }

    /// A preimage (s, t) of a null vector in span{u, v, w}.
    pub fn invert(&self, x: &[C64]) -> [C64; 2] {
        let t = &self.triple;
        // Θ-pairings give a 3×3 system for the frame coordinates
        let m = [[ZERO, t.c, t.b], [t.c, ZERO, t.a], [t.b, t.a, ZERO]];
        let rhs = [theta_unchecked(x, &t.u), theta_unchecked(x, &t.v), theta_unchecked(x, &t.w)];
        let mi = inv3(&m).expect("pairing matrix of a valid frame is invertible");
        let coef: Vec<C64> = (0..3).map(|i| (0..3).map(|j| mi[i][j] * rhs[j]).sum()).collect();
        let mut y = [ZERO; 3];
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = (0..3).map(|i| coef[i] * self.a_mat[i][j]).sum();
        }
        let sp = spinor_sqrt(&y);
        self.unmix(sp)
    }

    /// (s, t) with (s, t)·B = sp.
    fn unmix(&self, sp: [C64; 2]) -> [C64; 2] {
        let b = &self.b_mat;
        let t = sp[1] / b[1][1];
        let s = (sp[0] - t * b[1][0]) / b[0][0];
        [s, t]
    }
}

/// ψ_{(u,v,w)}(s, t) for a frame triple.
pub fn psi_param(t: &FrameTriple, br: &mut BranchTracker, s: C64, tp: C64) -> Result<Vec<C64>> {
    Ok(PsiFrame::new(t.clone(), br)?.eval(s, tp))
}

fn sample_count(f: &VectorLaurent, samples: usize) -> usize {
    let span = (f.jmax() - f.jmin().min(0) + 1).max(1) as usize;
    (4 * span).max(samples).max(16).next_power_of_two()
}

fn fit_components(vals: &[[C64; 2]], scale: f64) -> Result<VectorLaurent> {
    // keep the full resolvable window, then drop round-off coefficients
    let comps = (0..2)
        .map(|k| {
            let ch: Vec<C64> = vals.iter().map(|s| s[k]).collect();
            series::trig_interpolant(&ch).trimmed(1e-15 * scale)
        })
        .collect();
    VectorLaurent::new(comps)
}

/// Continuous lift h: D̄ → ℂ²_* of a disc map f into 𝔄 ⊂ ℂ³ with π∘h = f.
///
/// The root is tracked along the unit circle, fitted spectrally and then
/// verified on concentric circles.
pub fn spinor_lift_disc(f: &VectorLaurent, samples: usize) -> Result<VectorLaurent> {
    if f.dim() != 3 {
        return Err(Error::Dimension(3, f.dim()));
    }
    let m = sample_count(f, samples);
    let pts = f.eval_circle_points(m, 1.0, 0.0);
    let sup = pts.iter().map(|p| norm(p)).fold(0.0, f64::max);
    let inf = pts.iter().map(|p| norm(p)).fold(f64::INFINITY, f64::min);
    if sup == 0.0 || inf < 1e-6 * sup {
        return Err(Error::Lift(format!("map approaches the branch point (min {inf:e})")));
    }
    let resid = pts.iter().map(|p| theta_unchecked(p, p).norm()).fold(0.0, f64::max);
    if resid > 1e-8 * sup * sup {
        return Err(Error::Lift(format!("map leaves the quadric (Θ residual {resid:e})")));
    }
    let mut br = BranchTracker::new();
    let vals: Vec<[C64; 2]> = pts.iter().map(|p| br.align_spinor(spinor_sqrt(p))).collect();
    let first = vals[0];
    let closing = br.align_spinor(first);
    if closing != first {
        return Err(Error::Lift("lift is not single-valued along the circle".into()));
    }
    let h = fit_components(&vals, sup.sqrt())?;
    verify_lift(&h, f, sup, |hv| spinor_pi(hv[0], hv[1]).to_vec())?;
    Ok(h)
}

fn verify_lift(h: &VectorLaurent, f: &VectorLaurent, sup: f64, fwd: impl Fn(&[C64]) -> Vec<C64>) -> Result<()> {
    if h.jmin() < 0 {
        let neg: f64 = h.comps().iter().map(|p| (p.jmin()..0).map(|j| p.coeff(j).norm()).sum::<f64>()).sum();
        if neg > 1e-9 * sup.sqrt() {
            return Err(Error::Lift(format!("lift is not holomorphic (negative mass {neg:e})")));
        }
    }
    let h = VectorLaurent::new(h.comps().iter().map(|p| {
        let lo = p.jmin().max(0);
        LaurentPoly::new(lo, (lo..=p.jmax().max(lo)).map(|j| p.coeff(j)).collect())
    }).collect())?;
    let m = sample_count(f, 64).max(sample_count(&h, 64));
    let mut worst = 0.0f64;
    for rho in [1.0, 0.75, 0.5, 0.25, 0.0] {
        let hp = h.eval_circle_points(m, rho, 0.0);
        let fp = f.eval_circle_points(m, rho, 0.0);
        for (a, b) in hp.iter().zip(&fp) {
            let g = fwd(a);
            let d: Vec<C64> = g.iter().zip(b).map(|(x, y)| x - y).collect();
            worst = worst.max(norm(&d));
        }
    }
    if worst > 1e-6 * sup {
        return Err(Error::Fit(worst / sup));
    }
    Ok(())
}

/// Lift of f: D̄ → 𝔄_* through the moving frame ψ_{(u, v, f(ζ))}, i.e.
/// h with ψ_{f(ζ)}(h(ζ)) = f(ζ).
///
/// With w = f(ζ) the frame coordinates of f are (0, 0, 1), so
/// (s, t)·B = ±ρ where π(ρ) = (0, −i/c, 1/c) is constant and only the roots
/// √a, √(i/(2b)) vary; these are tracked along the circle.
pub fn lift_via_psi(f: &VectorLaurent, u: &NullVector, v: &NullVector, samples: usize) -> Result<VectorLaurent> {
    let n = f.dim();
    if u.dim() != n || v.dim() != n {
        return Err(Error::Dimension(n, u.dim()));
    }
    let m = sample_count(f, samples);
    let pts = f.eval_circle_points(m, 1.0, 0.0);
    let sup = pts.iter().map(|p| norm(p)).fold(0.0, f64::max);
    let scale = sup * norm(u.as_slice()).max(norm(v.as_slice()));
    let mut min_theta = f64::INFINITY;
    // interior samples as well: the nondegeneracy is required on all of D̄
    for rho in [1.0, 0.8, 0.6, 0.4, 0.2, 0.0] {
        for p in f.eval_circle_points(m, rho, 0.0) {
            let tu = theta_unchecked(u.as_slice(), &p).norm();
            let tv = theta_unchecked(v.as_slice(), &p).norm();
            min_theta = min_theta.min(tu).min(tv);
        }
    }
    if min_theta < 1e-6 * scale {
        return Err(Error::Nondegeneracy(min_theta));
    }
    let c = theta_unchecked(u.as_slice(), v.as_slice());
    let rho = spinor_sqrt(&[ZERO, -I / c, 1.0 / c]);
    let mut br = BranchTracker::new();
    let mut vals = Vec::with_capacity(m);
    for p in &pts {
        let a = theta_unchecked(v.as_slice(), p);
        let b = theta_unchecked(u.as_slice(), p);
        let ra = br.sqrt(Channel::SqrtA, a);
        let rk = br.sqrt(Channel::SqrtHalfIOverB, I / (2.0 * b));
        // (s, t)·B = ρ with B = [[1/√a, 0], [i√k, −√k]]
        let t = -rho[1] / rk;
        let s = ra * (rho[0] - t * I * rk);
        vals.push([s, t]);
    }
    let mut check = BranchTracker::new();
    let a0 = theta_unchecked(v.as_slice(), &pts[0]);
    let b0 = theta_unchecked(u.as_slice(), &pts[0]);
    let _ = check.sqrt(Channel::SqrtA, a0);
    let mut closing = br.clone();
    if (closing.sqrt(Channel::SqrtA, a0) - check.sqrt(Channel::SqrtA, a0)).norm() > 1e-9 * a0.norm().sqrt()
        || (closing.sqrt(Channel::SqrtHalfIOverB, I / (2.0 * b0))
            - check.sqrt(Channel::SqrtHalfIOverB, I / (2.0 * b0)))
        .norm()
            > 1e-9 / b0.norm().sqrt()
    {
        return Err(Error::Lift("frame roots are not single-valued along the circle".into()));
    }
    let h = fit_components(&vals, 1.0)?;
    let (uu, vv) = (u.as_slice().to_vec(), v.as_slice().to_vec());
    verify_lift_psi(&h, f, &uu, &vv, sup)?;
    Ok(h)
}

/// Evaluate ψ_{(u,v,w)}(h) with w = the point itself, branches tracked.
pub fn psi_forward(u: &[C64], v: &[C64], w: &[C64], h: [C64; 2], br: &mut BranchTracker) -> Result<Vec<C64>> {
    let t = FrameTriple {
        u: u.to_vec(),
        v: v.to_vec(),
        w: w.to_vec(),
        a: theta_unchecked(v, w),
        b: theta_unchecked(u, w),
        c: theta_unchecked(u, v),
    };
    Ok(PsiFrame::new(t, br)?.eval(h[0], h[1]))
}

fn verify_lift_psi(h: &VectorLaurent, f: &VectorLaurent, u: &[C64], v: &[C64], sup: f64) -> Result<()> {
    let m = sample_count(f, 64).max(sample_count(h, 64));
    let mut worst = 0.0f64;
    for rho in [1.0, 0.7, 0.4] {
        let hp = h.eval_circle_points(m, rho, 0.0);
        let fp = f.eval_circle_points(m, rho, 0.0);
        let mut br = BranchTracker::new();
        for (a, b) in hp.iter().zip(&fp) {
            let g = psi_forward(u, v, b, [a[0], a[1]], &mut br)?;
            // ψ depends on the root branches only through an overall sign of h
            let d: Vec<C64> = g.iter().zip(b).map(|(x, y)| x - y).collect();
            worst = worst.max(norm(&d));
        }
    }
    if worst > 1e-6 * sup {
        return Err(Error::Fit(worst / sup));
    }
    Ok(())
}

/// Convenience: π applied to a spinor-valued polynomial, exactly in coefficients.
pub fn pi_poly(h: &VectorLaurent) -> VectorLaurent {
    let (a, b) = (h.comp(0), h.comp(1));
    let a2 = a * a;
    let b2 = b * b;
    let ab = a * b;
    VectorLaurent::new(vec![&a2 - &b2, ab.scale(C64::new(2.0, 0.0)), (&a2 + &b2).scale(-I)])
        .expect("three components")
}

/// π̂ applied to two spinor-valued polynomials.
pub fn pi_hat_poly(g: &VectorLaurent, h: &VectorLaurent) -> VectorLaurent {
    let (a0, a1) = (g.comp(0), g.comp(1));
    let (b0, b1) = (h.comp(0), h.comp(1));
    let p00 = a0 * b0;
    let p11 = a1 * b1;
    let p01 = &(a0 * b1) + &(a1 * b0);
    VectorLaurent::new(vec![&p00 - &p11, p01, (&p00 + &p11).scale(-I)]).expect("three components")
}

/// Residual of the scalar quadratic form, relative to the squared norm.
pub fn null_residual(v: &[C64]) -> f64 {
    let n2 = norm(v).powi(2);
    if n2 == 0.0 {
        0.0
    } else {
        theta_unchecked(v, v).norm() / n2
    }
}
