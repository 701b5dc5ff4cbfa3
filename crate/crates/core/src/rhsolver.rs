//! Approximate Riemann–Hilbert problems for null discs.
//!
//! Given a null disc F and attached boundary discs κ(ζ, ξ) = F(ζ) + μ(ζ, ξ),
//! the solution G = F(0) + ∫ f_N is built from a high-frequency correction
//! whose ξ-argument is c·ζ^{2N+1}: on 𝕋 the boundary of G then sweeps the
//! attached discs while G stays close to F inside.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::nullquad::{spinor_lift_disc, spinor_sqrt, theta_unchecked, BranchTracker, Channel, NullVector};
use crate::series::{self, norm, rationalize_boundary_map, BoundaryGrid, LaurentPoly, Rationalized, VectorLaurent};
use crate::weierstrass::NullDisc;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Arc I = {|arg ζ − center| ≤ half_width} carrying the size function, and
/// its neighborhood U = {|arg ζ − center| ≤ u_half_width, |ζ| ≥ u_rho}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcRegion {
    pub center: f64,
    pub half_width: f64,
    pub u_half_width: f64,
    pub u_rho: f64,
}

impl ArcRegion {
    fn offset(&self, t: f64) -> f64 {
        let d = (t - self.center).rem_euclid(2.0 * PI);
        if d > PI {
            d - 2.0 * PI
        } else {
            d
        }
    }

    pub fn in_arc(&self, t: f64) -> bool {
        self.offset(t).abs() <= self.half_width
    }

    pub fn in_u_sector(&self, t: f64) -> bool {
        self.offset(t).abs() <= self.u_half_width
    }
}

/// Direction data of the constant-direction problem.
#[derive(Clone, Debug, PartialEq)]
pub enum Directions {
    /// κ = F + r·σ·u with null u, v and Θ(u, v) ≠ 0.
    Complex { u: NullVector, v: NullVector },
    /// ℜκ = ℜF + r·(ℜσ·u + ℑσ·v) for orthonormal real u, v.
    Real { u: Vec<f64>, v: Vec<f64> },
}

impl Directions {
    pub fn dim(&self) -> usize {
        match self {
            Directions::Complex { u, .. } => u.dim(),
            Directions::Real { u, .. } => u.len(),
        }
    }

    /// The null vector ũ with κ = F + rσ·ũ.
    pub fn tilde_u(&self) -> Vec<C64> {
        match self {
            Directions::Complex { u, .. } => u.as_slice().to_vec(),
            Directions::Real { u, v } => u.iter().zip(v).map(|(a, b)| C64::new(*a, -b)).collect(),
        }
    }

    /// The two legs used for nondegeneracy reporting, as complex vectors.
    pub fn legs(&self) -> (Vec<C64>, Vec<C64>) {
        match self {
            Directions::Complex { u, v } => (u.as_slice().to_vec(), v.as_slice().to_vec()),
            Directions::Real { u, v } => (
                u.iter().map(|x| C64::new(*x, 0.0)).collect(),
                v.iter().map(|x| C64::new(*x, 0.0)).collect(),
            ),
        }
    }

    fn z_candidates(&self, hint: Option<&Vec<C64>>) -> Vec<Vec<C64>> {
        let n = self.dim();
        let mut out = Vec::new();
        if let Some(h) = hint {
            out.push(h.clone());
        }
        match self {
            Directions::Complex { v, .. } => out.push(v.as_slice().to_vec()),
            Directions::Real { u, v } => {
                out.push(u.iter().zip(v).map(|(a, b)| C64::new(*a, *b)).collect());
                for k in 0..n {
                    let mut e = vec![ZERO; n];
                    e[k] = C64::new(1.0, 0.0);
                    out.push(e);
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        match self {
            Directions::Complex { u, v } => {
                let c = theta_unchecked(u.as_slice(), v.as_slice());
                if c.norm() < 1e-8 * norm(u.as_slice()) * norm(v.as_slice()) {
                    return Err(Error::DegenerateFrame("Θ(u, v) = 0".into()));
                }
            }
            Directions::Real { u, v } => {
                let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                if u.len() != v.len() {
                    return Err(Error::Dimension(u.len(), v.len()));
                }
                if (d(u, u) - 1.0).abs() > 1e-10 || (d(v, v) - 1.0).abs() > 1e-10 || d(u, v).abs() > 1e-10 {
                    return Err(Error::DegenerateFrame("real directions must be orthonormal".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RhMode {
    /// σ is a family of null discs in ℂ³; μ(ζ, ξ) = σ(ζ, r(ζ)ξ).
    Spinor3,
    /// σ is scalar; μ(ζ, ξ) = r(ζ)σ(ζ, ξ)·ũ.
    ConstantDirection(Directions),
}

#[derive(Clone, Debug)]
pub struct RhProblem {
    pub center: NullDisc,
    /// size function samples, dimension 1, values ≥ 0
    pub r: BoundaryGrid,
    /// ξ-Taylor samples of σ with σ(ζ, 0) = 0
    pub sigma: BoundaryGrid,
    pub mode: RhMode,
    pub eps: f64,
    pub rho0: f64,
    pub arc: Option<ArcRegion>,
    /// measure distances between real parts
    pub real_form: bool,
}

impl RhProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::Config { field: "eps".into(), msg: "must be positive".into() });
        }
        if !(self.rho0 > 0.0 && self.rho0 < 1.0) {
            return Err(Error::Config { field: "rho0".into(), msg: format!("{} is not in (0, 1)", self.rho0) });
        }
        if self.r.dim() != 1 || self.r.m() != self.sigma.m() {
            return Err(Error::Dimension(1, self.r.dim()));
        }
        for s in 0..self.r.m() {
            let x = self.r.value(s)[0];
            if x.re < -1e-14 || x.im.abs() > 1e-12 {
                return Err(Error::Domain(format!("size function must be real and ≥ 0, got {x}")));
            }
        }
        if self.sigma.degree() < 1 {
            return Err(Error::Domain("σ needs ξ-degree ≥ 1".into()));
        }
        let sup0 = (0..self.sigma.m()).map(|s| norm(self.sigma.taylor(0, s))).fold(0.0, f64::max);
        if sup0 > 1e-12 {
            return Err(Error::Domain("σ(ζ, 0) must vanish".into()));
        }
        match &self.mode {
            RhMode::Spinor3 => {
                if self.center.dim() != 3 || self.sigma.dim() != 3 {
                    return Err(Error::Dimension(3, self.center.dim().max(self.sigma.dim())));
                }
            }
            RhMode::ConstantDirection(d) => {
                d.validate()?;
                if self.sigma.dim() != 1 || d.dim() != self.center.dim() {
                    return Err(Error::Dimension(self.center.dim(), d.dim()));
                }
                if d.dim() < 3 {
                    return Err(Error::Dimension(3, d.dim()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub n_cap: usize,
    /// first N of the doubling schedule; raised to the pole-free threshold
    pub n_start: Option<usize>,
    pub c_grid: usize,
    /// skip the search and use (N, c index)
    pub pin: Option<(usize, usize)>,
    pub fit_tol: f64,
    pub max_window: usize,
    pub grid: usize,
    pub radii: usize,
    pub xi_samples: usize,
    /// relative floor for min ‖G′‖
    pub gate: f64,
    /// magnitude of the optional random perturbation of the center's spinor
    pub perturb: f64,
    pub seed: u64,
    pub z_hint: Option<Vec<[f64; 2]>>,
}

/// Boundary-data fit used by the solvers. Compactly supported size functions
/// are smooth but not analytic, so their trigonometric tails decay slowly.
pub const FIT_TOL: f64 = 1e-6;
pub const MAX_WINDOW: usize = 511;

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            n_cap: 4096,
            n_start: None,
            c_grid: 64,
            pin: None,
            fit_tol: FIT_TOL,
            max_window: MAX_WINDOW,
            grid: 512,
            radii: 64,
            xi_samples: 128,
            gate: 1e-6,
            perturb: 0.0,
            seed: 0,
            z_hint: None,
        }
    }
}

/// Measured conditions: s₁ boundary-to-circle, s₂ interior-to-disc, s₃ 𝒞¹.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhReport {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub rho_prime: f64,
    pub eps: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagRow {
    pub n: usize,
    pub c_index: usize,
    pub c: [f64; 2],
    pub s1: f64,
    pub s2: Option<f64>,
    pub s3: Option<f64>,
    pub rho_prime: Option<f64>,
    pub gated: bool,
    pub wall_ms: f64,
}

pub fn diagnostics_csv(rows: &[DiagRow]) -> String {
    let mut out = String::from("N,c_index,c_re,c_im,s1,s2,s3,rho_prime,gated,wall_ms\n");
    let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{:e},{:e},{:e},{},{},{},{},{:.3}\n",
            r.n,
            r.c_index,
            r.c[0],
            r.c[1],
            r.s1,
            opt(r.s2),
            opt(r.s3),
            opt(r.rho_prime),
            r.gated,
            r.wall_ms
        ));
    }
    out
}

#[derive(Clone, Debug)]
pub struct RhSolution {
    pub g: NullDisc,
    pub rho_prime: f64,
    pub n_used: usize,
    pub c_index: usize,
    pub c_used: C64,
    pub report: RhReport,
    pub window: usize,
    pub fit_err: f64,
    /// min over D̄ of |Θ(u, F′)| and |Θ(v, F′)| (constant direction only)
    pub nondegeneracy: Option<(f64, f64)>,
    /// winding of ζ ↦ ∂σ/∂ξ(ζ, 0) on the support (scalar σ only)
    pub winding: Option<i64>,
    pub diagnostics: Vec<DiagRow>,
}

// ---------------------------------------------------------------- discs κ

/// κ(ζ, ξ) = F(ζ) + Σ_{k≥1} C_k(ζ) ξ^k restricted to circle nodes.
struct KappaNodes {
    m: usize,
    base: Vec<Vec<C64>>,
    coef: Vec<Vec<Vec<C64>>>,
}

/// Boundary data fitted once so κ can be sampled on any node count.
struct Kappa {
    r: LaurentPoly,
    sigma: Vec<VectorLaurent>,
    dir: Option<Vec<C64>>,
    spinor: bool,
}

impl Kappa {
    fn new(p: &RhProblem) -> Result<Self> {
        let m = p.r.m();
        let rs: Vec<C64> = (0..m).map(|s| p.r.value(s)[0]).collect();
        let r = series::trig_interpolant(&rs);
        let mut sigma = Vec::new();
        for k in 1..=p.sigma.degree() {
            let comps = (0..p.sigma.dim())
                .map(|c| {
                    let ch: Vec<C64> = (0..m).map(|s| p.sigma.taylor(k, s)[c]).collect();
                    series::trig_interpolant(&ch)
                })
                .collect();
            sigma.push(VectorLaurent::new(comps)?);
        }
        let (dir, spinor) = match &p.mode {
            RhMode::Spinor3 => (None, true),
            RhMode::ConstantDirection(d) => (Some(d.tilde_u()), false),
        };
        Ok(Kappa { r, sigma, dir, spinor })
    }

    fn affine(&self) -> bool {
        self.sigma.len() == 1
    }

    fn nodes(&self, center: &NullDisc, m: usize) -> KappaNodes {
        let base = center.eval_circle(m, 1.0, 0.0);
        let r: Vec<f64> = self.r.eval_circle(m, 1.0, 0.0).into_iter().map(|x| x.re.max(0.0)).collect();
        let sig: Vec<Vec<Vec<C64>>> = self.sigma.iter().map(|s| s.eval_circle_points(m, 1.0, 0.0)).collect();
        let mut coef = Vec::with_capacity(m);
        for s in 0..m {
            let mut cs = Vec::with_capacity(self.sigma.len());
            for (k, sk) in sig.iter().enumerate() {
                let v = &sk[s];
                let c: Vec<C64> = match &self.dir {
                    None => {
                        let f = r[s].powi(k as i32 + 1);
                        v.iter().map(|x| x * f).collect()
                    }
                    Some(u) => u.iter().map(|x| x * v[0] * r[s]).collect(),
                };
                cs.push(c);
            }
            coef.push(cs);
        }
        let _ = self.spinor;
        KappaNodes { m, base, coef }
    }
}

impl KappaNodes {
    fn point(&self, s: usize, xi: C64) -> Vec<C64> {
        let mut out = self.base[s].clone();
        let mut p = xi;
        for c in &self.coef[s] {
            for (o, x) in out.iter_mut().zip(c) {
                *o += x * p;
            }
            p *= xi;
        }
        out
    }
}

impl KappaNodes {
    /// κ(ζ_s, ξ) and ∂κ/∂ξ.
    fn point_and_derivative(&self, s: usize, xi: C64) -> (Vec<C64>, Vec<C64>) {
        let mut val = self.base[s].clone();
        let mut der = vec![ZERO; val.len()];
        let mut p = C64::new(1.0, 0.0);
        for (k, c) in self.coef[s].iter().enumerate() {
            for ((o, d), x) in val.iter_mut().zip(der.iter_mut()).zip(c) {
                *d += x * p * (k + 1) as f64;
                *o += x * p * xi;
            }
            p *= xi;
        }
        (val, der)
    }
}

fn real_vec(v: &[C64]) -> Vec<f64> {
    v.iter().map(|c| c.re).collect()
}

fn dist_real(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn dist_c(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Distance from x to the segment [a, b] in a real vector space.
fn seg_dist(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut ab2 = 0.0;
    let mut t = 0.0;
    for k in 0..x.len() {
        let d = b[k] - a[k];
        ab2 += d * d;
        t += (x[k] - a[k]) * d;
    }
    let t = if ab2 > 0.0 { (t / ab2).clamp(0.0, 1.0) } else { 0.0 };
    (0..x.len()).map(|k| (x[k] - a[k] - t * (b[k] - a[k])).powi(2)).sum::<f64>().sqrt()
}

fn flatten(v: &[C64], real: bool) -> Vec<f64> {
    if real {
        real_vec(v)
    } else {
        v.iter().flat_map(|c| [c.re, c.im]).collect()
    }
}

struct Measure<'a> {
    kn: &'a KappaNodes,
    affine: bool,
    real: bool,
    xi_samples: usize,
    /// warm-started distances below this skip the global search
    slack: f64,
}

impl Measure<'_> {
    fn polyline(&self, s: usize) -> Vec<Vec<f64>> {
        let q = self.xi_samples;
        (0..q)
            .map(|k| flatten(&self.kn.point(s, C64::from_polar(1.0, 2.0 * PI * k as f64 / q as f64)), self.real))
            .collect()
    }

    fn to_polyline(&self, x: &[f64], s: usize) -> f64 {
        let pl = self.polyline(s);
        let q = pl.len();
        (0..q).map(|k| seg_dist(x, &pl[k], &pl[(k + 1) % q])).fold(f64::INFINITY, f64::min)
    }

    /// dist(x, κ(ζ_s, 𝕋))
    fn to_circle(&self, x: &[C64], s: usize) -> f64 {
        if self.affine && !self.real {
            let (w, v) = self.rel(x, s);
            let vv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            if vv == 0.0 {
                return norm(&w);
            }
            let t: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum::<C64>() / vv;
            let xi = if t.norm() > 0.0 { t / t.norm() } else { C64::new(1.0, 0.0) };
            return w.iter().zip(&v).map(|(a, b)| (a - xi * b).norm_sqr()).sum::<f64>().sqrt();
        }
        self.to_polyline(&flatten(x, self.real), s)
    }

    fn rel(&self, x: &[C64], s: usize) -> (Vec<C64>, Vec<C64>) {
        let w: Vec<C64> = x.iter().zip(&self.kn.base[s]).map(|(a, b)| a - b).collect();
        (w, self.kn.coef[s][0].clone())
    }

    /// dist(x, κ(ζ_s, D̄)); `warm` is the minimizing ξ of a neighboring node
    /// and is updated in place.
    fn to_disc(&self, x: &[C64], s: usize, warm: &mut Option<C64>) -> f64 {
        if self.affine {
            let (w, v) = self.rel(x, s);
            if !self.real {
                let vv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
                if vv == 0.0 {
                    return norm(&w);
                }
                let mut t: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum::<C64>() / vv;
                if t.norm() > 1.0 {
                    t /= t.norm();
                }
                return w.iter().zip(&v).map(|(a, b)| (a - t * b).norm_sqr()).sum::<f64>().sqrt();
            }
            // ℜ(ξV) = a·ℜV − b·ℑV for ξ = a + ib
            let wr = real_vec(&w);
            let e1: Vec<f64> = v.iter().map(|c| c.re).collect();
            let e2: Vec<f64> = v.iter().map(|c| -c.im).collect();
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            let (g11, g12, g22) = (dot(&e1, &e1), dot(&e1, &e2), dot(&e2, &e2));
            let (b1, b2) = (dot(&e1, &wr), dot(&e2, &wr));
            let det = g11 * g22 - g12 * g12;
            let scale = g11 + g22;
            if scale == 0.0 {
                return norm_r(&wr);
            }
            if det > 1e-14 * scale * scale {
                let a = (g22 * b1 - g12 * b2) / det;
                let b = (g11 * b2 - g12 * b1) / det;
                if a * a + b * b <= 1.0 {
                    let res: Vec<f64> = (0..wr.len()).map(|k| wr[k] - a * e1[k] - b * e2[k]).collect();
                    return norm_r(&res);
                }
            }
            return self.to_polyline(&flatten(x, true), s);
        }
        let xf = flatten(x, self.real);
        if let Some(w) = *warm {
            let (d, xi) = self.newton(&xf, s, w);
            if d < self.slack {
                *warm = Some(xi);
                return d;
            }
        }
        // coarse polar search, then Gauss–Newton in ξ = a + ib
        let q = (self.xi_samples / 8).max(16);
        let mut best = (dist_real(&xf, &flatten(&self.kn.base[s], self.real)), ZERO);
        for ring in 1..=4 {
            let rad = ring as f64 / 4.0;
            for k in 0..q {
                let xi = C64::from_polar(rad, 2.0 * PI * k as f64 / q as f64);
                let d = dist_real(&xf, &flatten(&self.kn.point(s, xi), self.real));
                if d < best.0 {
                    best = (d, xi);
                }
            }
        }
        let (d, xi) = self.newton(&xf, s, best.1);
        *warm = Some(xi);
        d
    }

    fn newton(&self, xf: &[f64], s: usize, start: C64) -> (f64, C64) {
        let mut xi = start;
        let mut best = (dist_real(xf, &flatten(&self.kn.point(s, xi), self.real)), xi);
        for _ in 0..8 {
            let (val, dxi) = self.kn.point_and_derivative(s, xi);
            let res: Vec<f64> = flatten(&val, self.real).iter().zip(xf).map(|(a, b)| a - b).collect();
            let ja = flatten(&dxi, self.real);
            let ib: Vec<C64> = dxi.iter().map(|c| c * C64::new(0.0, 1.0)).collect();
            let jb = flatten(&ib, self.real);
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            let (g11, g12, g22) = (dot(&ja, &ja), dot(&ja, &jb), dot(&jb, &jb));
            let (b1, b2) = (dot(&ja, &res), dot(&jb, &res));
            let det = g11 * g22 - g12 * g12;
            if !(det > 1e-300) {
                break;
            }
            let da = (g22 * b1 - g12 * b2) / det;
            let db = (g11 * b2 - g12 * b1) / det;
            let mut next = xi - C64::new(da, db);
            if next.norm() > 1.0 {
                next /= next.norm();
            }
            let d = dist_real(xf, &flatten(&self.kn.point(s, next), self.real));
            if d >= best.0 {
                break;
            }
            best = (d, next);
            xi = next;
        }
        best
    }
}

fn norm_r(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn node_count(g: &NullDisc, grid: usize) -> usize {
    let deg = (g.primitive().jmax() + 1).max(1) as usize;
    grid.max(2 * deg).next_power_of_two().min(1 << 16).max(grid.next_power_of_two())
}

/// Shared verification machinery for one problem.
struct Verifier {
    kappa: Kappa,
    f: NullDisc,
    eps: f64,
    rho0: f64,
    arc: Option<ArcRegion>,
    real: bool,
    grid: usize,
    radii: usize,
    xi_samples: usize,
}

impl Verifier {
    fn new(p: &RhProblem, grid: usize, radii: usize, xi_samples: usize) -> Result<Self> {
        Ok(Verifier {
            kappa: Kappa::new(p)?,
            f: p.center.clone(),
            eps: p.eps,
            rho0: p.rho0,
            arc: p.arc,
            real: p.real_form,
            grid: grid.max(512),
            radii: radii.max(64),
            xi_samples: xi_samples.max(128),
        })
    }

    fn nodes(&self, g: &NullDisc) -> KappaNodes {
        self.kappa.nodes(&self.f, node_count(g, self.grid))
    }

    fn measure<'a>(&self, kn: &'a KappaNodes) -> Measure<'a> {
        Measure { kn, affine: self.kappa.affine(), real: self.real, xi_samples: self.xi_samples, slack: 0.25 * self.eps }
    }

    fn s1(&self, g: &NullDisc, kn: &KappaNodes) -> f64 {
        let ms = self.measure(kn);
        let pts = g.eval_circle(kn.m, 1.0, 0.0);
        pts.iter().enumerate().map(|(s, x)| ms.to_circle(x, s)).fold(0.0, f64::max)
    }

    fn ring_dist(&self, g: &NullDisc, kn: &KappaNodes, rho: f64) -> f64 {
        let ms = self.measure(kn);
        let pts = g.eval_circle(kn.m, rho, 0.0);
        let mut warm = None;
        pts.iter().enumerate().map(|(s, x)| ms.to_disc(x, s, &mut warm)).fold(0.0, f64::max)
    }

    fn s2(&self, g: &NullDisc, kn: &KappaNodes, rho_prime: f64) -> f64 {
        (0..self.radii)
            .map(|j| rho_prime + (1.0 - rho_prime) * j as f64 / self.radii as f64)
            .map(|rho| self.ring_dist(g, kn, rho))
            .fold(0.0, f64::max)
    }

    /// Sup of max(‖G − F‖, ‖G′ − F′‖) over (D̄ ∖ U) ∪ ρ′D̄, read off the
    /// boundary of that region (the deviation is holomorphic).
    fn s3(&self, g: &NullDisc, rho_prime: f64) -> f64 {
        let m = node_count(g, self.grid);
        let dev = |rho: f64, keep: &dyn Fn(f64) -> bool| -> f64 {
            let gv = g.eval_circle(m, rho, 0.0);
            let fv = self.f.eval_circle(m, rho, 0.0);
            let gd = g.phi.eval_circle_points(m, rho, 0.0);
            let fd = self.f.phi.eval_circle_points(m, rho, 0.0);
            let mut worst = 0.0f64;
            for s in 0..m {
                let t = 2.0 * PI * s as f64 / m as f64;
                if !keep(t) {
                    continue;
                }
                let d0 = if self.real { dist_real(&real_vec(&gv[s]), &real_vec(&fv[s])) } else { dist_c(&gv[s], &fv[s]) };
                let d1 = dist_c(&gd[s], &fd[s]);
                worst = worst.max(d0).max(d1);
            }
            worst
        };
        let mut worst = dev(rho_prime, &|_| true);
        if let Some(a) = self.arc {
            worst = worst.max(dev(a.u_rho, &|_| true));
            for j in 0..=16 {
                let rho = a.u_rho + (1.0 - a.u_rho) * j as f64 / 16.0;
                worst = worst.max(dev(rho, &|t| !a.in_u_sector(t)));
            }
        }
        worst
    }

    /// Smallest ρ′ on a 64-point grid of [ρ₀, 1) meeting condition ii).
    fn select_rho_prime(&self, g: &NullDisc, kn: &KappaNodes) -> (f64, f64) {
        let k = 64;
        let grid: Vec<f64> = (0..k).map(|j| self.rho0 + (1.0 - self.rho0) * j as f64 / k as f64).collect();
        if self.kappa.r.coeffs().iter().all(|c| *c == ZERO) {
            // point "discs": condition ii) only holds up to the radial grid step
            let last = grid[k - 1];
            return (last, self.s2(g, kn, last));
        }
        let d: Vec<f64> = grid.iter().map(|&r| self.ring_dist(g, kn, r)).collect();
        let mut suffix = vec![0.0f64; k + 1];
        for j in (0..k).rev() {
            suffix[j] = suffix[j + 1].max(d[j]);
        }
        for j in 0..k {
            if suffix[j] < self.eps {
                let s2 = self.s2(g, kn, grid[j]);
                if s2 < self.eps {
                    return (grid[j], s2);
                }
            }
        }
        let last = grid[k - 1];
        (last, self.s2(g, kn, last))
    }

    fn report(&self, g: &NullDisc, rho_prime: f64) -> RhReport {
        let kn = self.nodes(g);
        let s1 = self.s1(g, &kn);
        let s2 = self.s2(g, &kn, rho_prime);
        let s3 = self.s3(g, rho_prime);
        let eps = self.eps;
        RhReport { s1, s2, s3, rho_prime, eps, pass: s1 < eps && s2 < eps && s3 < eps }
    }
}

/// Measure conditions i)–iii) for a candidate G at a given ρ′.
pub fn verify_rh_conditions(g: &NullDisc, p: &RhProblem, rho_prime: f64, grid: usize) -> Result<RhReport> {
    p.validate()?;
    if !(rho_prime > 0.0 && rho_prime < 1.0) {
        return Err(Error::Domain(format!("ρ′ = {rho_prime} not in (0, 1)")));
    }
    let v = Verifier::new(p, grid, 64, 128)?;
    Ok(v.report(g, rho_prime))
}

/// Smallest ρ′ on the 64-grid of [ρ₀, 1) for which condition ii) holds, and
/// the report there.
pub fn select_rho_prime(g: &NullDisc, p: &RhProblem, grid: usize) -> Result<RhReport> {
    p.validate()?;
    let v = Verifier::new(p, grid, 64, 128)?;
    let kn = v.nodes(g);
    let (rho, _) = v.select_rho_prime(g, &kn);
    Ok(v.report(g, rho))
}

// ------------------------------------------------------------- the lifts

/// Taylor coefficients in ξ (degree ≤ cap) of a map sampled on |ξ| = 1 after
/// a tracked square root; `None` values of `sqrt` are impossible here.
fn xi_sqrt_series(
    eval: &dyn Fn(C64) -> Vec<C64>,
    root: &dyn Fn(&[C64], &mut BranchTracker) -> Vec<C64>,
    q: usize,
    cap: usize,
    tol: f64,
) -> Result<Vec<Vec<C64>>> {
    let mut br = BranchTracker::new();
    let nodes = fft::circle_nodes(q, 1.0, 0.0);
    let vals: Vec<Vec<C64>> = nodes.iter().map(|x| root(&eval(*x), &mut br)).collect();
    let closing = root(&eval(nodes[0]), &mut br);
    if dist_c(&closing, &vals[0]) > 1e-9 * (1.0 + norm(&vals[0])) {
        return Err(Error::NoLift("square root is not single-valued in ξ".into()));
    }
    let dim = vals[0].len();
    let mut out = vec![vec![ZERO; dim]; cap + 1];
    let mut tail = 0.0f64;
    for c in 0..dim {
        let ch: Vec<C64> = vals.iter().map(|v| v[c]).collect();
        let spec = fft::fit_samples(&ch);
        for (k, x) in spec.iter().enumerate() {
            if k <= cap {
                out[k][c] = *x;
            } else {
                tail += x.norm();
            }
        }
    }
    if tail > tol {
        return Err(Error::Approximation { tol, window: cap, best: tail });
    }
    while out.len() > 1 && out.last().map(|v| norm(v) == 0.0).unwrap_or(false) {
        out.pop();
    }
    Ok(out)
}

/// Align the sign of per-node Taylor data continuously along 𝕋.
fn align_along_circle(data: &mut [Vec<Vec<C64>>], full_support: bool) -> Result<()> {
    let flat = |v: &Vec<Vec<C64>>| -> Vec<C64> { v.iter().flatten().copied().collect() };
    let mut prev: Option<Vec<C64>> = None;
    for d in data.iter_mut() {
        let cur = flat(d);
        let n = norm(&cur);
        if n == 0.0 {
            continue;
        }
        if let Some(p) = &prev {
            let plus: f64 = cur.iter().zip(p).map(|(a, b)| (a - b).norm_sqr()).sum();
            let minus: f64 = cur.iter().zip(p).map(|(a, b)| (a + b).norm_sqr()).sum();
            if minus < plus {
                for v in d.iter_mut() {
                    for x in v.iter_mut() {
                        *x = -*x;
                    }
                }
            }
        }
        prev = Some(flat(d));
    }
    if full_support {
        let first = flat(&data[0]);
        let last = prev.unwrap_or_default();
        let plus: f64 = first.iter().zip(&last).map(|(a, b)| (a - b).norm_sqr()).sum();
        let minus: f64 = first.iter().zip(&last).map(|(a, b)| (a + b).norm_sqr()).sum();
        if minus < plus {
            return Err(Error::NoLift("the root changes sign around 𝕋".into()));
        }
    }
    Ok(())
}

/// η(ζ, ξ) sampled as ξ-Taylor data on the problem grid, then rationalized.
fn rationalize_eta(p: &RhProblem, s_factor: Option<&[C64]>, cfg: &SolveConfig) -> Result<Rationalized> {
    let m = p.r.m();
    let d = p.sigma.degree();
    let q = 64usize;
    let cap = 24usize;
    let mut data: Vec<Vec<Vec<C64>>> = Vec::with_capacity(m);
    let mut full = true;
    let mut scale = 0.0f64;
    for s in 0..m {
        let rr = p.r.value(s)[0].re.max(0.0);
        if rr == 0.0 {
            full = false;
            let dim = if s_factor.is_some() { 1 } else { 2 };
            data.push(vec![vec![ZERO; dim]]);
            continue;
        }
        let sq = rr.sqrt();
        // σ₂(ζ_s, x) = Σ k σ_k x^{k−1}
        let sigma2 = |x: C64| -> Vec<C64> {
            let mut out = vec![ZERO; p.sigma.dim()];
            let mut pw = C64::new(1.0, 0.0);
            for k in 1..=d {
                for (o, v) in out.iter_mut().zip(p.sigma.taylor(k, s)) {
                    *o += v * pw * k as f64;
                }
                pw *= x;
            }
            out
        };
        let taylor = match s_factor {
            None => {
                // η = √r·ς(ζ, rξ), π∘ς = σ₂
                let root = |v: &[C64], br: &mut BranchTracker| -> Vec<C64> {
                    let h = br.align_spinor(spinor_sqrt(v));
                    vec![h[0] * sq, h[1] * sq]
                };
                if d == 1 {
                    vec![root(&sigma2(ZERO), &mut BranchTracker::new())]
                } else {
                    xi_sqrt_series(&|x| sigma2(x * rr), &root, q, cap, cfg.fit_tol)?
                }
            }
            Some(sf) => {
                // β = s·√(r·σ₂(ζ, ξ))
                let sv = sf[s];
                let root = |v: &[C64], br: &mut BranchTracker| -> Vec<C64> { vec![sv * br.sqrt(Channel::SqrtR, v[0] * rr)] };
                if d == 1 {
                    vec![root(&sigma2(ZERO), &mut BranchTracker::new())]
                } else {
                    xi_sqrt_series(&|x| sigma2(x), &root, q, cap, cfg.fit_tol)?
                }
            }
        };
        for t in &taylor {
            scale = scale.max(norm(t));
        }
        if norm(&taylor[0]) < 1e-12 * (1.0 + scale) {
            return Err(Error::NoLift(format!("∂σ/∂ξ vanishes at node {s}")));
        }
        data.push(taylor);
    }
    align_along_circle(&mut data, full)?;
    let deg = data.iter().map(|t| t.len()).max().unwrap_or(1) - 1;
    let dim = data.iter().map(|t| t[0].len()).max().unwrap_or(1);
    let mut flat = vec![ZERO; (deg + 1) * m * dim];
    for (s, t) in data.iter().enumerate() {
        for (k, v) in t.iter().enumerate() {
            for (c, x) in v.iter().enumerate() {
                flat[(k * m + s) * dim + c] = *x;
            }
        }
    }
    let grid = BoundaryGrid::from_samples(m, dim, deg, flat)?;
    rationalize_boundary_map(&grid, cfg.fit_tol * (1.0 + scale), cfg.max_window)
}

/// Σ_k c^k B_k(ζ) ζ^{N + k(2N+1)}·√c·√(2N+1)
fn correction(eta: &Rationalized, n: usize, c: C64) -> VectorLaurent {
    let amp = c.sqrt() * ((2 * n + 1) as f64).sqrt();
    let dim = eta.terms[0].dim();
    let mut out = VectorLaurent::zeros(dim);
    let mut ck = C64::new(1.0, 0.0);
    for (k, b) in eta.terms.iter().enumerate() {
        let shift = n as i64 + k as i64 * (2 * n as i64 + 1);
        let term = b.shift(shift).scale(ck * amp);
        out = out.add(&term).expect("same dimension");
        ck *= c;
    }
    out
}

fn c_node(k: usize, total: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * k as f64 / total as f64)
}

/// Doubling schedule starting at the pole-free threshold.
fn n_schedule(eta: &Rationalized, cfg: &SolveConfig) -> Vec<usize> {
    let pole_free = (-eta.min_exponent()).max(0) as usize;
    let mut n = cfg.n_start.unwrap_or(8).max(pole_free).max(1);
    let mut out = Vec::new();
    while n <= cfg.n_cap {
        out.push(n);
        n *= 2;
    }
    if out.is_empty() {
        out.push(pole_free.max(1));
    }
    out
}

fn min_norm_ratio(phi: &VectorLaurent) -> f64 {
    let m = (4 * (phi.jmax() - phi.jmin().min(0) + 1).max(16) as usize).next_power_of_two().min(1 << 16);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for j in 0..=16 {
        let rho = 1.0 - j as f64 / 16.0;
        let pts = if rho == 0.0 { vec![phi.eval(ZERO).unwrap_or_default()] } else { phi.eval_circle_points(m, rho, 0.0) };
        for p in pts {
            let n = norm(&p);
            lo = lo.min(n);
            hi = hi.max(n);
        }
    }
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

struct Search<'a> {
    ver: Verifier,
    cfg: &'a SolveConfig,
    eps: f64,
}

impl Search<'_> {
    /// Walk (N asc, c asc) and return the first verified candidate.
    fn run(
        &self,
        schedule: &[usize],
        build: &dyn Fn(usize, C64) -> Result<NullDisc>,
    ) -> Result<(NullDisc, usize, usize, RhReport, Vec<DiagRow>)> {
        let mut rows = Vec::new();
        let mut best: Option<(f64, usize, usize)> = None;
        let cands: Vec<(usize, usize)> = match self.cfg.pin {
            Some((n, ci)) => vec![(n, ci)],
            None => schedule.iter().flat_map(|&n| (0..self.cfg.c_grid).map(move |ci| (n, ci))).collect(),
        };
        let mut gated_all_at: Option<usize> = None;
        let mut current_n = 0;
        let mut gated_count = 0;
        for (n, ci) in cands {
            if n != current_n {
                if current_n != 0 && gated_count == self.cfg.c_grid {
                    gated_all_at = Some(current_n);
                }
                current_n = n;
                gated_count = 0;
            }
            let t0 = Instant::now();
            let c = c_node(ci, self.cfg.c_grid);
            let g = build(n, c)?;
            let kn = self.ver.nodes(&g);
            let s1 = self.ver.s1(&g, &kn);
            let mut row = DiagRow {
                n,
                c_index: ci,
                c: [c.re, c.im],
                s1,
                s2: None,
                s3: None,
                rho_prime: None,
                gated: false,
                wall_ms: 0.0,
            };
            if best.map(|b| s1 < b.0).unwrap_or(true) {
                best = Some((s1, n, ci));
            }
            if s1 < self.eps || self.cfg.pin.is_some() {
                if min_norm_ratio(&g.phi) < self.cfg.gate {
                    row.gated = true;
                    gated_count += 1;
                } else {
                    let (rho, s2) = self.ver.select_rho_prime(&g, &kn);
                    let s3 = self.ver.s3(&g, rho);
                    row.s2 = Some(s2);
                    row.s3 = Some(s3);
                    row.rho_prime = Some(rho);
                    let rep = RhReport { s1, s2, s3, rho_prime: rho, eps: self.eps, pass: s1 < self.eps && s2 < self.eps && s3 < self.eps };
                    row.wall_ms = t0.elapsed().as_secs_f64() * 1e3;
                    rows.push(row);
                    if rep.pass || self.cfg.pin.is_some() {
                        return Ok((g, n, ci, rep, rows));
                    }
                    continue;
                }
            } else if min_norm_ratio(&g.phi) < self.cfg.gate {
                row.gated = true;
                gated_count += 1;
            }
            row.wall_ms = t0.elapsed().as_secs_f64() * 1e3;
            rows.push(row);
        }
        if current_n != 0 && gated_count == self.cfg.c_grid {
            gated_all_at = Some(current_n);
        }
        if let Some(n) = gated_all_at {
            return Err(Error::GeneralPosition(n as f64));
        }
        let (s1, n, ci) = best.unwrap_or((f64::INFINITY, 0, 0));
        Err(Error::BudgetExhausted(format!("best s1 = {s1:e} at N = {n}, c index {ci} (ε = {})", self.eps)))
    }
}

fn random_spinor_poly(rng: &mut ChaCha8Rng, delta: f64) -> VectorLaurent {
    let comps = (0..2)
        .map(|_| {
            LaurentPoly::new(0, (0..3).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * delta).collect())
        })
        .collect();
    VectorLaurent::new(comps).expect("two components")
}

/// Lemma-3.1 solver for families of null discs in ℂ³.
pub fn solve_rh3(p: &RhProblem, cfg: &SolveConfig) -> Result<RhSolution> {
    p.validate()?;
    if p.mode != RhMode::Spinor3 {
        return Err(Error::Precondition("solve_rh3 needs a spinor problem".into()));
    }
    let mut h = match &p.center.spinor {
        Some(h) => h.clone(),
        None => spinor_lift_disc(&p.center.phi, 256)?,
    };
    if cfg.perturb > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        h = h.add(&random_spinor_poly(&mut rng, cfg.perturb))?;
    }
    let eta = rationalize_eta(p, None, cfg)?;
    let schedule = n_schedule(&eta, cfg);
    let base = p.center.base.clone();
    let ver = Verifier::new(p, cfg.grid, cfg.radii, cfg.xi_samples)?;
    let search = Search { ver, cfg, eps: p.eps };
    let build = |n: usize, c: C64| -> Result<NullDisc> {
        let hn = h.add(&correction(&eta, n, c))?;
        NullDisc::from_spinor(hn, base.clone())
    };
    let (g, n, ci, report, diagnostics) = search.run(&schedule, &build)?;
    Ok(RhSolution {
        g,
        rho_prime: report.rho_prime,
        n_used: n,
        c_index: ci,
        c_used: c_node(ci, cfg.c_grid),
        report,
        window: eta.window,
        fit_err: eta.sup_err,
        nondegeneracy: None,
        winding: None,
        diagnostics,
    })
}

/// Polynomial pieces of the frame-free assembly for one auxiliary vector z.
struct FramePieces {
    /// D = e·Θ(z,z) − 2pq
    d: LaurentPoly,
    /// X = e·z − p·ũ − q·F′
    x: VectorLaurent,
}

fn frame_pieces(fp: &VectorLaurent, ut: &[C64], z: &[C64]) -> FramePieces {
    let dot = |v: &[C64]| -> LaurentPoly {
        let mut acc = LaurentPoly::zero();
        for (k, c) in fp.comps().iter().enumerate() {
            acc = &acc + &c.scale(v[k]);
        }
        acc
    };
    let e = dot(ut);
    let p = dot(z);
    let q = theta_unchecked(z, ut);
    let zz = theta_unchecked(z, z);
    let d = &e.scale(zz) - &p.scale(2.0 * q);
    let comps = (0..ut.len())
        .map(|k| {
            let a = &e.scale(z[k]) - &p.scale(ut[k]);
            &a - &fp.comp(k).scale(q)
        })
        .collect();
    FramePieces { d, x: VectorLaurent::new(comps).expect("nonempty") }
}

/// Lemma-3.3 solver: attached discs in a constant null direction.
///
/// The correction is assembled without an explicit ψ-frame: with
/// e = Θ(ũ,F′), p = Θ(z,F′), q = Θ(z,ũ) the map
/// f = F′ + Q·ũ + P·X, X = e·z − p·ũ − q·F′, Q = −P²D/2
/// is null for every scalar P, and P = √c·√(2N+1)·ζ^N·β̃ with β² = −2μ₂/D
/// makes ∫Q·ũ follow μ(ζ, cζ^{2N+1})·ũ.
pub fn solve_rhn(p: &RhProblem, cfg: &SolveConfig) -> Result<RhSolution> {
    p.validate()?;
    let dirs = match &p.mode {
        RhMode::ConstantDirection(d) => d.clone(),
        RhMode::Spinor3 => return Err(Error::Precondition("solve_rhn needs a constant-direction problem".into())),
    };
    let fp = p.center.phi.clone();
    let ut = dirs.tilde_u();
    let (lu, lv) = dirs.legs();
    let nondeg = nondegeneracy_values(&fp, &lu, &lv);
    let m = p.r.m();
    let hint: Option<Vec<C64>> = cfg.z_hint.as_ref().map(|v| v.iter().map(|c| C64::new(c[0], c[1])).collect());
    let mut best: Option<(usize, f64, FramePieces, Rationalized)> = None;
    let mut min_d = 0.0f64;
    for z in dirs.z_candidates(hint.as_ref()) {
        let pieces = frame_pieces(&fp, &ut, &z);
        let dv = pieces.d.eval_circle(m, 1.0, 0.0);
        let dmin = dv.iter().map(|x| x.norm()).fold(f64::INFINITY, f64::min);
        let dmax = dv.iter().map(|x| x.norm()).fold(0.0, f64::max);
        min_d = min_d.max(dmin);
        if dmax == 0.0 || dmin < 1e-6 * dmax.max(1e-300) || dmin < 1e-12 {
            continue;
        }
        let mut br = BranchTracker::new();
        let sv: Vec<C64> = dv.iter().map(|x| br.sqrt(Channel::SqrtC, -2.0 / x)).collect();
        let eta = match rationalize_eta(p, Some(&sv), cfg) {
            Ok(e) => e,
            Err(Error::NoLift(_)) | Err(Error::Approximation { .. }) => continue,
            Err(e) => return Err(e),
        };
        let xv = pieces.x.eval_circle_points(m, 1.0, 0.0);
        let cross = xv.iter().zip(&sv).map(|(x, s)| norm(x) * s.norm()).fold(0.0, f64::max);
        let better = match &best {
            None => true,
            Some((w, c, _, _)) => eta.window < *w || (eta.window == *w && cross < *c),
        };
        if better {
            best = Some((eta.window, cross, pieces, eta));
        }
    }
    let (_, _, pieces, eta) = best.ok_or(Error::Nondegeneracy(min_d))?;
    let winding = {
        let vals: Vec<C64> = (0..m).map(|s| p.sigma.taylor(1, s)[0]).collect();
        let rr: Vec<f64> = (0..m).map(|s| p.r.value(s)[0].re).collect();
        if rr.iter().all(|x| *x > 0.0) {
            Some(series::winding_number(&vals))
        } else {
            None
        }
    };
    let schedule = n_schedule(&eta, cfg);
    let base = p.center.base.clone();
    let ver = Verifier::new(p, cfg.grid, cfg.radii, cfg.xi_samples)?;
    let search = Search { ver, cfg, eps: p.eps };
    let build = |n: usize, c: C64| -> Result<NullDisc> {
        let pn = correction(&eta, n, c).comp(0).clone();
        let q = (&(&pn * &pn) * &pieces.d).scale(C64::new(-0.5, 0.0));
        let comps = (0..fp.dim())
            .map(|k| {
                let a = fp.comp(k) + &q.scale(ut[k]);
                &a + &(&pn * pieces.x.comp(k))
            })
            .collect();
        NullDisc::new(VectorLaurent::new(comps)?, base.clone())
    };
    let (g, n, ci, report, diagnostics) = search.run(&schedule, &build)?;
    Ok(RhSolution {
        g,
        rho_prime: report.rho_prime,
        n_used: n,
        c_index: ci,
        c_used: c_node(ci, cfg.c_grid),
        report,
        window: eta.window,
        fit_err: eta.sup_err,
        nondegeneracy: Some(nondeg),
        winding,
        diagnostics,
    })
}

/// min over a grid of D̄ of |Θ(u, F′)| and |Θ(v, F′)|.
pub fn nondegeneracy_values(fp: &VectorLaurent, u: &[C64], v: &[C64]) -> (f64, f64) {
    let m = (4 * (fp.jmax() + 1).max(16) as usize).next_power_of_two().min(1 << 16);
    let (mut a, mut b) = (f64::INFINITY, f64::INFINITY);
    for j in 0..=8 {
        let rho = 1.0 - j as f64 / 8.0;
        for x in fp.eval_circle_points(m, rho, 0.0) {
            a = a.min(theta_unchecked(u, &x).norm());
            b = b.min(theta_unchecked(v, &x).norm());
        }
    }
    (a, b)
}

/// Dispatch on the problem mode.
pub fn solve(p: &RhProblem, cfg: &SolveConfig) -> Result<RhSolution> {
    match p.mode {
        RhMode::Spinor3 => solve_rh3(p, cfg),
        RhMode::ConstantDirection(_) => solve_rhn(p, cfg),
    }
}

// ------------------------------------------------------ c by φ-averages

/// Outcome of the average test for the chosen constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AverageChoice {
    pub index: usize,
    pub single: f64,
    pub double: f64,
    pub passed: bool,
}

/// Pick a candidate whose average of φ along G(I) is at most the average of
/// φ over κ(I × 𝕋) plus ε; the arg-min is returned (unpassed) otherwise.
pub fn select_c_by_average(
    candidates: &[(C64, NullDisc)],
    phi_fn: &dyn Fn(&[C64]) -> f64,
    kappa: &dyn Fn(C64, C64) -> Vec<C64>,
    arc: Option<(f64, f64)>,
    eps: f64,
    samples: usize,
) -> Result<AverageChoice> {
    if candidates.is_empty() {
        return Err(Error::Precondition("no candidates".into()));
    }
    let m = samples.max(16);
    let inside = |t: f64| match arc {
        None => true,
        Some((c, w)) => {
            let d = (t - c).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d) <= w
        }
    };
    let dt = 1.0 / m as f64;
    let mut double = 0.0;
    for j in 0..m {
        let t = 2.0 * PI * j as f64 / m as f64;
        if !inside(t) {
            continue;
        }
        let z = C64::from_polar(1.0, t);
        let mut inner = 0.0;
        for k in 0..m {
            inner += phi_fn(&kappa(z, C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)));
        }
        double += inner * dt * dt;
    }
    let mut best = AverageChoice { index: 0, single: f64::INFINITY, double, passed: false };
    for (i, (_, g)) in candidates.iter().enumerate() {
        let pts = g.eval_circle(m, 1.0, 0.0);
        let single: f64 = (0..m)
            .filter(|j| inside(2.0 * PI * *j as f64 / m as f64))
            .map(|j| phi_fn(&pts[j]) * dt)
            .sum();
        if single <= double + eps {
            return Ok(AverageChoice { index: i, single, double, passed: true });
        }
        if single < best.single {
            best = AverageChoice { index: i, single, double, passed: false };
        }
    }
    Ok(best)
}

// --------------------------------------------------- coefficient lemma

/// sup over 64 z on 𝕋 and 64 c on 𝕋 of
/// |∫₀^z cNζ^{N−1}μ₂(ζ, cζ^N)dζ − μ(z, cz^N)| for μ = Σ_{k≥1} A_k(ζ)ξ^k,
/// computed exactly in coefficients.
pub fn lemma_estimate(a: &[LaurentPoly], n: usize) -> Result<f64> {
    let nn = n as i64;
    let grid = 64;
    let mut worst = 0.0f64;
    for ci in 0..grid {
        let c = c_node(ci, grid);
        let mut diff = LaurentPoly::zero();
        let mut ck = c;
        for (idx, ak) in a.iter().enumerate() {
            let k = idx as i64 + 1;
            // ∫ k c^k N A_k ζ^{kN−1} − c^k A_k z^{kN}
            let integrand = ak.shift(k * nn - 1).scale(ck * (k * nn) as f64);
            let prim = integrand.antiderivative_from_zero()?.require_base_point()?;
            let direct = ak.shift(k * nn).scale(ck);
            diff = &diff + &(&prim - &direct);
            ck *= c;
        }
        for v in diff.eval_circle(grid, 1.0, 0.0) {
            worst = worst.max(v.norm());
        }
    }
    Ok(worst)
}
