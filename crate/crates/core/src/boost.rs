//! Boundary tiling, the Riemann–Hilbert push that grows intrinsic distance at
//! a Pythagorean sup-norm cost, and its iteration with harmonic step sizes.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{intrinsic_distance_phi, DiscMesh};
use crate::nullquad::{spinor_lift_disc, spinor_pi, spinor_sqrt};
use crate::presets::smooth_step;
use crate::rhsolver::{solve_rh3, solve_rhn, Directions, RhMode, RhProblem, RhReport, SolveConfig};
use crate::series::{trig_interpolant, BoundaryGrid, LaurentPoly, VectorLaurent};
use crate::weierstrass::{flux_loop, Domain, ImmersionDisc, NullDisc};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const TAU: f64 = 2.0 * PI;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit(a: &[f64]) -> Option<Vec<f64>> {
    let n = dot(a, a).sqrt();
    (n > 1e-12).then(|| a.iter().map(|x| x / n).collect())
}

/// F and 𝔜 on 𝕋 at arbitrary angles.
struct BoundaryPair {
    prim: VectorLaurent,
    offset: Vec<f64>,
    target: Vec<LaurentPoly>,
}

impl BoundaryPair {
    fn new(imm: &ImmersionDisc, y: &BoundaryGrid) -> Result<Self> {
        if imm.domain != Domain::Disc {
            return Err(Error::Domain("boundary tiling needs a disc".into()));
        }
        if y.dim() != imm.dim() {
            return Err(Error::Dimension(imm.dim(), y.dim()));
        }
        let prim = imm.phi.antiderivative_from_zero()?.require_base_point()?;
        let p0 = prim.eval(imm.base_point())?;
        let offset = imm.base.iter().zip(&p0).map(|(b, p)| b - p.re).collect();
        let target = (0..y.dim())
            .map(|c| trig_interpolant(&(0..y.m()).map(|s| C64::new(y.value(s)[c].re, 0.0)).collect::<Vec<_>>()))
            .collect();
        Ok(BoundaryPair { prim, offset, target })
    }

    fn f(&self, t: f64) -> Vec<f64> {
        let z = C64::from_polar(1.0, t);
        let v = self.prim.eval(z).expect("𝕋 avoids the origin");
        v.iter().zip(&self.offset).map(|(a, b)| a.re + b).collect()
    }

    fn y(&self, t: f64) -> Vec<f64> {
        let z = C64::from_polar(1.0, t);
        self.target.iter().map(|p| p.eval(z).expect("𝕋 avoids the origin").re).collect()
    }

    fn f_circle(&self, m: usize) -> Vec<Vec<f64>> {
        self.prim
            .eval_circle_points(m, 1.0, 0.0)
            .into_iter()
            .map(|v| v.iter().zip(&self.offset).map(|(a, b)| a.re + b).collect())
            .collect()
    }

    fn y_circle(&self, m: usize) -> Vec<Vec<f64>> {
        let comps: Vec<Vec<C64>> = self.target.iter().map(|p| p.eval_circle(m, 1.0, 0.0)).collect();
        (0..m).map(|s| comps.iter().map(|c| c[s].re).collect()).collect()
    }

    /// Diameters of F and 𝔜 over [a, b] and sup ‖F(p) − 𝔜(q)‖ there.
    fn oscillation(&self, a: f64, b: f64, k: usize) -> (f64, f64, f64) {
        let ts: Vec<f64> = (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect();
        let fs: Vec<Vec<f64>> = ts.iter().map(|&t| self.f(t)).collect();
        let ys: Vec<Vec<f64>> = ts.iter().map(|&t| self.y(t)).collect();
        let (mut of, mut oy, mut cross) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..k {
            for j in 0..k {
                if j > i {
                    of = of.max(dist(&fs[i], &fs[j]));
                    oy = oy.max(dist(&ys[i], &ys[j]));
                }
                cross = cross.max(dist(&fs[i], &ys[j]));
            }
        }
        (of, oy, cross)
    }
}

/// Arcs [t_j, t_{j+1}] covering 𝕋 (t_0 = 0, t_l = 2π) on which F and 𝔜
/// oscillate less than ε₀.
#[derive(Clone, Debug)]
pub struct BoundaryTiling {
    pub l: usize,
    pub corners: Vec<f64>,
    pub target: BoundaryGrid,
    pub eps0: f64,
    pub osc_f: Vec<f64>,
    pub osc_y: Vec<f64>,
    /// sup over the arc of ‖F(p) − 𝔜(q)‖
    pub delta_arc: Vec<f64>,
}

impl BoundaryTiling {
    pub fn corner_points(&self) -> Vec<C64> {
        self.corners.iter().map(|&t| C64::from_polar(1.0, t)).collect()
    }

    fn end(&self, j: usize) -> f64 {
        if j + 1 < self.l {
            self.corners[j + 1]
        } else {
            TAU
        }
    }

    pub fn width(&self, j: usize) -> f64 {
        self.end(j) - self.corners[j]
    }

    pub fn arc_of(&self, t: f64) -> usize {
        let t = t.rem_euclid(TAU);
        self.corners.partition_point(|&c| c <= t).saturating_sub(1)
    }

    /// Smooth partition of unity subordinate to the arcs: the weight of arc j
    /// ramps across each corner over `ramp_fraction` of the shorter
    /// neighbor. Returns (arc, weight) pairs with positive weight.
    pub fn partition(&self, t: f64, ramp_fraction: f64) -> Vec<(usize, f64)> {
        let t = t.rem_euclid(TAU);
        let l = self.l;
        let half = |j: usize| 0.5 * ramp_fraction * self.width(j).min(self.width((j + l - 1) % l));
        let j = self.arc_of(t);
        let (a, b) = (self.corners[j], self.end(j));
        let (ha, hb) = (half(j), half((j + 1) % l));
        if t - a < ha {
            let w = smooth_step((t - a + ha) / (2.0 * ha));
            vec![(j, w), ((j + l - 1) % l, 1.0 - w)]
        } else if b - t < hb {
            let w = smooth_step((t - b + hb) / (2.0 * hb));
            vec![(j, 1.0 - w), ((j + 1) % l, w)]
        } else {
            vec![(j, 1.0)]
        }
    }
}

pub fn tile_boundary(f: &ImmersionDisc, y: &BoundaryGrid, eps0: f64) -> Result<BoundaryTiling> {
    if !(eps0 > 0.0) {
        return Err(Error::Config { field: "eps0".into(), msg: "must be positive".into() });
    }
    let bp = BoundaryPair::new(f, y)?;
    let m = y.m().max(256);
    let (fc, yc) = (bp.f_circle(m), bp.y_circle(m));
    let scale = fc.iter().chain(&yc).map(|p| dot(p, p).sqrt()).fold(1.0, f64::max);
    let gap = fc.iter().zip(&yc).map(|(a, b)| dist(a, b)).fold(f64::INFINITY, f64::min);
    if gap < 1e-9 * scale {
        return Err(Error::Precondition(format!("F − 𝔜 vanishes on 𝕋 (min ‖F − 𝔜‖ = {gap:e})")));
    }
    let k = 24;
    let ok = |a: f64, b: f64| {
        let (of, oy, _) = bp.oscillation(a, b, k);
        of < eps0 && oy < eps0
    };
    let step = TAU / m as f64;
    let mut corners = vec![0.0];
    let mut a = 0.0;
    loop {
        if ok(a, TAU) {
            break;
        }
        if !ok(a, a + step) {
            return Err(Error::Oscillation(eps0));
        }
        let (mut lo, mut hi) = (a + step, TAU);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if ok(a, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        a = lo;
        corners.push(a);
        if corners.len() > 1 << 14 {
            return Err(Error::Oscillation(eps0));
        }
    }
    let l = corners.len().max(3);
    let equal: Vec<f64> = (0..l).map(|j| TAU * j as f64 / l as f64).collect();
    if (0..l).all(|j| ok(equal[j], TAU * (j + 1) as f64 / l as f64)) {
        corners = equal;
    } else {
        while corners.len() < 3 {
            // split the widest arc; sub-arcs inherit the bound
            let ends: Vec<f64> = corners.iter().skip(1).copied().chain([TAU]).collect();
            let (j, _) = corners
                .iter()
                .zip(&ends)
                .map(|(a, b)| b - a)
                .enumerate()
                .fold((0, 0.0), |acc, (i, w)| if w > acc.1 { (i, w) } else { acc });
            corners.insert(j + 1, 0.5 * (corners[j] + ends[j]));
        }
    }
    let l = corners.len();
    let mut tiling = BoundaryTiling {
        l,
        corners,
        target: y.clone(),
        eps0,
        osc_f: vec![0.0; l],
        osc_y: vec![0.0; l],
        delta_arc: vec![0.0; l],
    };
    for j in 0..l {
        let (of, oy, d) = bp.oscillation(tiling.corners[j], tiling.end(j), k);
        tiling.osc_f[j] = of;
        tiling.osc_y[j] = oy;
        tiling.delta_arc[j] = d;
    }
    Ok(tiling)
}

/// d_j = d_{j−1} + c/j and δ_j² = δ_{j−1}² + c²/j² with c = √(6(ε² − δ₀²))/π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostSchedule {
    pub d0: f64,
    pub delta0: f64,
    pub eps: f64,
    pub c: f64,
}

impl BoostSchedule {
    pub fn new(d0: f64, delta0: f64, eps: f64) -> Result<Self> {
        if !(delta0 > 0.0 && delta0 < eps) {
            return Err(Error::Config { field: "delta0".into(), msg: format!("need 0 < δ₀ < ε, got δ₀ = {delta0}, ε = {eps}") });
        }
        if !(d0 > 0.0) {
            return Err(Error::Config { field: "d0".into(), msg: "must be positive".into() });
        }
        Ok(BoostSchedule { d0, delta0, eps, c: (6.0 * (eps * eps - delta0 * delta0)).sqrt() / PI })
    }

    pub fn eta(&self, j: usize) -> f64 {
        self.c / j as f64
    }

    pub fn d(&self, j: usize) -> f64 {
        (1..=j).fold(self.d0, |d, k| d + self.eta(k))
    }

    pub fn delta(&self, j: usize) -> f64 {
        (1..=j).fold(self.delta0, |d: f64, k| (d * d + self.eta(k).powi(2)).sqrt())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    /// per-arc oscillation bound of the tiling
    pub eps0: f64,
    /// the ε of each inner Riemann–Hilbert solve; the (a)-tolerance is twice it
    pub rh_eps: f64,
    pub rho0: f64,
    pub gain_floor: f64,
    /// share of the shorter neighboring arc used by each corner ramp
    pub ramp_fraction: f64,
    /// boundary samples carrying the disc data
    pub grid: usize,
    /// push planes ⊥ F − 𝔜 at every boundary node instead of per arc
    pub pointwise: bool,
    pub mesh_min_r: usize,
    pub mesh_min_a: usize,
    pub solve: SolveConfig,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            eps0: 0.5,
            rh_eps: 0.02,
            rho0: 0.9,
            gain_floor: 0.5,
            ramp_fraction: 0.5,
            grid: 1024,
            pointwise: false,
            mesh_min_r: 32,
            mesh_min_a: 256,
            solve: SolveConfig { c_grid: 8, ..SolveConfig::default() },
        }
    }
}

/// Measurements of one push.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostReport {
    pub arcs: usize,
    /// general-position translation applied before tiling
    pub shift: Vec<f64>,
    pub delta: f64,
    pub eta: f64,
    pub sup_dev_before: f64,
    pub sup_dev: f64,
    pub bound_a: f64,
    pub tol_a: f64,
    pub d: f64,
    pub dist_before: f64,
    pub dist_after: f64,
    pub gain: f64,
    pub gain_floor: f64,
    pub flux_delta: f64,
    pub rh: Option<RhReport>,
    pub n_used: usize,
    pub c_index: usize,
    pub mesh: (usize, usize),
    /// the shortest mesh path from p₀ to 𝕋 on the pushed surface
    pub escape_path: Vec<[f64; 2]>,
}

impl BoostReport {
    pub fn pass_a(&self) -> bool {
        self.sup_dev < self.bound_a
    }

    pub fn pass_b(&self) -> bool {
        self.gain >= self.gain_floor * self.eta
    }
}

pub struct BoostOutcome {
    pub f: NullDisc,
    pub report: BoostReport,
}

/// Distance from p₀ to 𝕋 on a mesh resolving φ, with the mesh size.
pub(crate) fn measured_distance(phi: &VectorLaurent, mesh: &DiscMesh, p0: C64) -> Result<(f64, Vec<[f64; 2]>)> {
    let v = nearest_vertex(mesh, p0);
    let r = intrinsic_distance_phi(phi, mesh, v)?;
    Ok((r.distance, r.points.iter().map(|z| [z.re, z.im]).collect()))
}

fn nearest_vertex(mesh: &DiscMesh, p0: C64) -> usize {
    let interior = mesh.vertices.len() - mesh.n_a;
    (0..interior).min_by(|&a, &b| (mesh.vertices[a] - p0).norm().total_cmp(&(mesh.vertices[b] - p0).norm())).unwrap_or(0)
}

/// Boundary real values of a null disc and of 𝔜 on m points.
fn boundary_dev(g: &NullDisc, y: &[LaurentPoly], m: usize) -> (f64, f64) {
    let gs = g.real_circle(m, 1.0);
    let comps: Vec<Vec<C64>> = y.iter().map(|p| p.eval_circle(m, 1.0, 0.0)).collect();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (s, p) in gs.iter().enumerate() {
        let d = p.iter().enumerate().map(|(c, x)| (x - comps[c][s].re).powi(2)).sum::<f64>().sqrt();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (lo, hi)
}

pub(crate) fn circle_samples(g: &NullDisc) -> usize {
    (8 * (g.phi.jmax().max(0) as usize + 2)).max(1024).next_power_of_two().min(1 << 16)
}

/// A null disc carrying its spinor when n = 3.
pub fn null_disc_of(imm: &ImmersionDisc) -> Result<NullDisc> {
    let base: Vec<C64> = imm.eval(ZERO)?.into_iter().map(|x| C64::new(x, 0.0)).collect();
    if imm.dim() == 3 {
        let h = spinor_lift_disc(&imm.phi, 256)?;
        NullDisc::from_spinor(h, base)
    } else {
        NullDisc::new(imm.phi.clone(), base)
    }
}

/// Unit normal direction used for the general-position translation.
fn generic_direction(g: &NullDisc) -> Vec<f64> {
    let n = g.dim();
    let mut e = vec![0.0; n];
    e[n - 1] = 1.0;
    if n != 3 {
        return e;
    }
    let mut acc = [0.0; 3];
    for p in g.phi.eval_circle_points(64, 1.0, 0.0) {
        let (a, b): (Vec<f64>, Vec<f64>) = p.iter().map(|c| (c.re, c.im)).unzip();
        let cr = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        for k in 0..3 {
            acc[k] += cr[k];
        }
    }
    unit(&acc).unwrap_or(e)
}

/// Orthonormal (u, v) ⊥ x, as close as possible to the seed pair.
fn push_pair(x: &[f64], seed: (&[f64], &[f64])) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    let xh = unit(x)?;
    let proj = |a: &[f64]| -> Vec<f64> {
        let k = dot(a, &xh);
        a.iter().zip(&xh).map(|(p, q)| p - k * q).collect()
    };
    let mut cands: Vec<Vec<f64>> = vec![proj(seed.0), proj(seed.1)];
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        cands.push(proj(&e));
    }
    let u = cands.iter().find_map(|c| unit(c))?;
    let v = cands.iter().skip(1).find_map(|c| {
        let k = dot(c, &u);
        unit(&c.iter().zip(&u).map(|(p, q)| p - k * q).collect::<Vec<_>>())
    })?;
    // keep the seed's orientation
    let o = dot(&u, seed.0) * dot(&v, seed.1) - dot(&u, seed.1) * dot(&v, seed.0);
    let sgn = if o < 0.0 { -1.0 } else { 1.0 };
    Some((u, v.into_iter().map(|x| sgn * x).collect()))
}

fn hermitian(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Orientation of the first plane: ũ = u − iv as Hermitian-orthogonal to F′
/// as possible.
fn orient(u: Vec<f64>, v: Vec<f64>, fp: &[C64]) -> (Vec<f64>, Vec<f64>) {
    let w = |s: f64| -> Vec<C64> { u.iter().zip(&v).map(|(p, q)| C64::new(*p, -s * q)).collect() };
    if hermitian(fp, &w(-1.0)).norm() < hermitian(fp, &w(1.0)).norm() {
        let v = v.iter().map(|x| -x).collect();
        (u, v)
    } else {
        (u, v)
    }
}

/// Per-arc push planes ⊥ the arc mean of F − 𝔜.
fn arc_planes(
    tiling: &BoundaryTiling,
    bp: &BoundaryPair,
    phi: &VectorLaurent,
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let n = phi.dim();
    let mut out: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(tiling.l);
    for j in 0..tiling.l {
        let (a, b) = (tiling.corners[j], tiling.end(j));
        let k = 33;
        let mut x = vec![0.0; n];
        for i in 0..k {
            let t = a + (b - a) * i as f64 / (k - 1) as f64;
            for (o, (p, q)) in x.iter_mut().zip(bp.f(t).iter().zip(bp.y(t))) {
                *o += (p - q) / k as f64;
            }
        }
        let pair = match out.last() {
            Some((u, v)) => push_pair(&x, (u, v)),
            None => {
                // seed with the tangent plane at the first corner
                let d = phi.eval(C64::from_polar(1.0, a))?;
                let (re, im): (Vec<f64>, Vec<f64>) = d.iter().map(|c| (c.re, -c.im)).unzip();
                let (u, v) = push_pair(&x, (&re, &im)).ok_or_else(|| Error::Precondition("degenerate push plane".into()))?;
                Some(orient(u, v, &d))
            }
        };
        out.push(pair.ok_or_else(|| Error::Precondition(format!("F − 𝔜 has zero mean on arc {j}")))?);
    }
    Ok(out)
}

/// Spinors of u_j − i·v_j, phase-aligned in sequence and then spread by a
/// linear phase in the angle so that the chain closes around 𝕋.
fn spinor_chain(planes: &[(Vec<f64>, Vec<f64>)], angles: &[f64]) -> Vec<[C64; 2]> {
    let l = planes.len();
    let mut sp: Vec<[C64; 2]> = Vec::with_capacity(l + 1);
    for j in 0..=l {
        let (u, v) = &planes[j % l];
        let w: Vec<C64> = u.iter().zip(v).map(|(a, b)| C64::new(*a, -b)).collect();
        let mut s = spinor_sqrt(&w);
        if let Some(prev) = sp.last() {
            let h = s[0] * prev[0].conj() + s[1] * prev[1].conj();
            let ph = C64::from_polar(1.0, -h.arg());
            s = [s[0] * ph, s[1] * ph];
        }
        sp.push(s);
    }
    // sp[l] is sp[0] up to the holonomy phase γ
    let h = sp[l][0] * sp[0][0].conj() + sp[l][1] * sp[0][1].conj();
    let gamma = h.arg();
    (0..l)
        .map(|j| {
            let ph = C64::from_polar(1.0, -gamma * angles[j] / TAU);
            [sp[j][0] * ph, sp[j][1] * ph]
        })
        .collect()
}

fn normalized_pi(s: [C64; 2]) -> [C64; 3] {
    let nrm = (s[0].norm_sqr() + s[1].norm_sqr()).sqrt();
    spinor_pi(s[0] / nrm, s[1] / nrm)
}

/// w(t) = u(t) − i·v(t) blended across corners through the spinor chain.
fn blended_directions(tiling: &BoundaryTiling, planes: &[(Vec<f64>, Vec<f64>)], m: usize, ramp: f64) -> Vec<[C64; 3]> {
    let spread = spinor_chain(planes, &tiling.corners);
    (0..m)
        .map(|s| {
            let t = TAU * s as f64 / m as f64;
            let mut acc = [ZERO; 2];
            for (j, w) in tiling.partition(t, ramp) {
                acc[0] += spread[j][0] * w;
                acc[1] += spread[j][1] * w;
            }
            normalized_pi(acc)
        })
        .collect()
}

/// Push planes ⊥ F − 𝔜 at every node, transported from node to node.
fn node_directions(bp: &BoundaryPair, phi: &VectorLaurent, m: usize) -> Result<Vec<[C64; 3]>> {
    let (fc, yc) = (bp.f_circle(m), bp.y_circle(m));
    let d = phi.eval(C64::new(1.0, 0.0))?;
    let (re, im): (Vec<f64>, Vec<f64>) = d.iter().map(|c| (c.re, -c.im)).unzip();
    let mut planes: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(m);
    for s in 0..m {
        let x: Vec<f64> = fc[s].iter().zip(&yc[s]).map(|(a, b)| a - b).collect();
        let seed = planes.last().map(|(u, v)| (u.clone(), v.clone())).unwrap_or((re.clone(), im.clone()));
        let (u, v) = push_pair(&x, (&seed.0, &seed.1)).ok_or_else(|| Error::Precondition(format!("F − 𝔜 vanishes at node {s}")))?;
        planes.push(if s == 0 { orient(u, v, &d) } else { (u, v) });
    }
    let angles: Vec<f64> = (0..m).map(|s| TAU * s as f64 / m as f64).collect();
    Ok(spinor_chain(&planes, &angles).into_iter().map(normalized_pi).collect())
}

pub(crate) fn flux_of(g: &NullDisc) -> Result<Vec<f64>> {
    let imm = g.real_part();
    Ok(flux_loop(&imm, 0.5, 256)?.0)
}

/// Push a null disc ≈η orthogonally to F − 𝔜 along all of 𝕋.
pub fn boost_null(
    f: &NullDisc,
    y: &BoundaryGrid,
    delta: f64,
    eta: f64,
    p0: C64,
    d: f64,
    cfg: &BoostConfig,
) -> Result<BoostOutcome> {
    if !(delta > 0.0) || !(eta >= 0.0) {
        return Err(Error::Config { field: "delta/eta".into(), msg: "need δ > 0 and η ≥ 0".into() });
    }
    if p0.norm() >= 1.0 {
        return Err(Error::Domain(format!("p₀ = {p0} is not interior")));
    }
    let n = f.dim();
    let ytrig: Vec<LaurentPoly> = (0..y.dim())
        .map(|c| trig_interpolant(&(0..y.m()).map(|s| C64::new(y.value(s)[c].re, 0.0)).collect::<Vec<_>>()))
        .collect();
    if y.dim() != n {
        return Err(Error::Dimension(n, y.dim()));
    }
    let m = circle_samples(f);
    let (lo, hi) = boundary_dev(f, &ytrig, m);
    if hi >= delta {
        return Err(Error::Precondition(format!("sup ‖F − 𝔜‖ = {hi:e} is not below δ = {delta}")));
    }
    let scale = f.real_circle(256, 1.0).iter().map(|p| dot(p, p).sqrt()).fold(1.0, f64::max);
    let mut g = f.clone();
    let mut shift = vec![0.0; n];
    if lo < 1e-9 * scale {
        let e = generic_direction(f);
        let s = 0.25 * (delta - hi);
        shift = e.iter().map(|x| x * s).collect();
        for (b, x) in g.base.iter_mut().zip(&shift) {
            *b += x;
        }
    }
    let (_, sup_before) = boundary_dev(&g, &ytrig, m);
    let imm = g.real_part();
    let tiling = tile_boundary(&imm, y, cfg.eps0)?;
    let mesh0 = DiscMesh::adapted(&g.phi, cfg.mesh_min_r, cfg.mesh_min_a)?;
    let (dist0, _) = measured_distance(&g.phi, &mesh0, p0)?;
    if !(d > 0.0 && d < dist0) {
        return Err(Error::Precondition(format!("need 0 < d < dist_F(p₀, 𝕋) = {dist0}, got d = {d}")));
    }
    let flux0 = flux_of(f)?;
    if eta == 0.0 {
        let report = BoostReport {
            arcs: tiling.l,
            shift,
            delta,
            eta,
            sup_dev_before: sup_before,
            sup_dev: sup_before,
            bound_a: delta,
            tol_a: 0.0,
            d,
            dist_before: dist0,
            dist_after: dist0,
            gain: dist0 - d,
            gain_floor: cfg.gain_floor,
            flux_delta: 0.0,
            rh: None,
            n_used: 0,
            c_index: 0,
            mesh: (mesh0.n_r, mesh0.n_a),
            escape_path: Vec::new(),
        };
        return Ok(BoostOutcome { f: g, report });
    }
    let bp = BoundaryPair::new(&imm, y)?;
    let planes = arc_planes(&tiling, &bp, &g.phi)?;
    let grid = if cfg.pointwise {
        cfg.grid.max((8 * (g.phi.jmax().max(0) as usize + 2)).next_power_of_two())
    } else {
        cfg.grid
    };
    let r = BoundaryGrid::from_fn(grid, 1, |_| vec![C64::new(eta, 0.0)])?;
    let sol = if n == 3 {
        let ws = if cfg.pointwise {
            node_directions(&bp, &g.phi, grid)?
        } else {
            blended_directions(&tiling, &planes, grid, cfg.ramp_fraction)
        };
        let mut flat = vec![ZERO; 2 * grid * 3];
        for (s, w) in ws.iter().enumerate() {
            for c in 0..3 {
                flat[(grid + s) * 3 + c] = w[c];
            }
        }
        let sigma = BoundaryGrid::from_samples(grid, 3, 1, flat)?;
        if g.spinor.is_none() {
            g = NullDisc::from_spinor(spinor_lift_disc(&g.phi, 256)?, g.base.clone())?;
        }
        let p = RhProblem { center: g.clone(), r, sigma, mode: RhMode::Spinor3, eps: cfg.rh_eps, rho0: cfg.rho0, arc: None, real_form: true };
        solve_rh3(&p, &cfg.solve)?
    } else {
        let (u, v) = planes[0].clone();
        for (pu, pv) in &planes {
            let off = dot(pu, &u).powi(2) + dot(pu, &v).powi(2) + dot(pv, &u).powi(2) + dot(pv, &v).powi(2);
            if (off - 2.0).abs() > 1e-9 {
                return Err(Error::Dimension(3, n));
            }
        }
        let sigma = BoundaryGrid::from_taylor_fn(grid, 1, 1, |_| vec![vec![ZERO], vec![C64::new(1.0, 0.0)]])?;
        let p = RhProblem {
            center: g.clone(),
            r,
            sigma,
            mode: RhMode::ConstantDirection(Directions::Real { u, v }),
            eps: cfg.rh_eps,
            rho0: cfg.rho0,
            arc: None,
            real_form: true,
        };
        solve_rhn(&p, &cfg.solve)?
    };
    let out = sol.g;
    let mesh = DiscMesh::adapted(&out.phi, cfg.mesh_min_r, cfg.mesh_min_a)?;
    let (dist_before, _) = measured_distance(&g.phi, &mesh, p0)?;
    let (dist_after, escape_path) = measured_distance(&out.phi, &mesh, p0)?;
    let (_, sup_dev) = boundary_dev(&out, &ytrig, circle_samples(&out));
    let flux1 = flux_of(&out)?;
    let flux_delta = flux0.iter().zip(&flux1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let tol_a = 2.0 * cfg.rh_eps;
    let report = BoostReport {
        arcs: tiling.l,
        shift,
        delta,
        eta,
        sup_dev_before: sup_before,
        sup_dev,
        bound_a: (delta * delta + eta * eta).sqrt() + tol_a,
        tol_a,
        d,
        dist_before,
        dist_after,
        gain: dist_after - d,
        gain_floor: cfg.gain_floor,
        flux_delta,
        rh: Some(sol.report),
        n_used: sol.n_used,
        c_index: sol.c_index,
        mesh: (mesh.n_r, mesh.n_a),
        escape_path,
    };
    if !report.pass_b() {
        return Err(Error::GainShortfall { gain: report.gain, floor: cfg.gain_floor * eta });
    }
    Ok(BoostOutcome { f: out, report })
}

/// [`boost_null`] on an immersion; the result passes the immersion checks.
pub fn boost_step(
    f: &ImmersionDisc,
    y: &BoundaryGrid,
    delta: f64,
    eta: f64,
    p0: C64,
    d: f64,
    cfg: &BoostConfig,
) -> Result<(ImmersionDisc, BoostReport)> {
    let g = null_disc_of(f)?;
    let out = boost_null(&g, y, delta, eta, p0, d, cfg)?;
    let r = out.f.real_part();
    let imm = ImmersionDisc::new(r.phi, r.base, Domain::Disc)?;
    Ok((imm, out.report))
}

/// F|𝕋 on m nodes as a real boundary grid.
pub fn boundary_grid_of(imm: &ImmersionDisc, m: usize) -> Result<BoundaryGrid> {
    let bp = BoundaryPair { prim: imm.phi.antiderivative_from_zero()?.require_base_point()?, offset: Vec::new(), target: Vec::new() };
    let p0 = bp.prim.eval(imm.base_point())?;
    let pts = bp.prim.eval_circle_points(m, 1.0, 0.0);
    let mut flat = Vec::with_capacity(m * imm.dim());
    for p in pts {
        for (c, x) in p.iter().enumerate() {
            flat.push(C64::new(imm.base[c] + x.re - p0[c].re, 0.0));
        }
    }
    BoundaryGrid::from_samples(m, imm.dim(), 0, flat)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanRow {
    pub step: usize,
    pub eta: f64,
    pub d_j: f64,
    pub delta_j: f64,
    pub measured_dist: f64,
    pub measured_sup_dev: f64,
    /// sup over 𝕋 of ‖G_j − G‖
    pub drift: f64,
    pub n_used: usize,
    pub dist_before: f64,
}

pub fn jordan_csv(rows: &[JordanRow]) -> String {
    let mut s = String::from("step,eta,d_j,delta_j,measured_dist,measured_sup_dev,drift,n_used\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{}",
            r.step, r.eta, r.d_j, r.delta_j, r.measured_dist, r.measured_sup_dev, r.drift, r.n_used
        );
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanConfig {
    pub delta0: Option<f64>,
    /// d₀ as a fraction of the initial distance
    pub d0_fraction: f64,
    pub max_steps: usize,
    pub boost: BoostConfig,
}

impl Default for JordanConfig {
    fn default() -> Self {
        JordanConfig { delta0: None, d0_fraction: 0.9, max_steps: 4, boost: BoostConfig::default() }
    }
}

pub struct JordanRun {
    pub g: NullDisc,
    pub schedule: BoostSchedule,
    pub initial_dist: f64,
    pub trace: Vec<JordanRow>,
}

/// Repeated pushes with η_j = c/j against 𝔜 = G|𝕋 until dist(p₀, 𝕋) > λ.
pub fn jordan_iterate(g: &ImmersionDisc, p0: C64, lambda: f64, eps: f64, cfg: &JordanConfig) -> Result<JordanRun> {
    let g0 = null_disc_of(g)?;
    let y = boundary_grid_of(g, cfg.boost.grid)?;
    let ytrig: Vec<LaurentPoly> = (0..y.dim())
        .map(|c| trig_interpolant(&(0..y.m()).map(|s| y.value(s)[c]).collect::<Vec<_>>()))
        .collect();
    let mesh = DiscMesh::adapted(&g0.phi, cfg.boost.mesh_min_r, cfg.boost.mesh_min_a)?;
    let (dist0, _) = measured_distance(&g0.phi, &mesh, p0)?;
    let delta0 = cfg.delta0.unwrap_or(eps / 2.0);
    let schedule = BoostSchedule::new(cfg.d0_fraction * dist0, delta0, eps)?;
    let mut cur = g0.clone();
    let mut trace = Vec::new();
    let mut dist = dist0;
    let mut j = 0;
    while dist <= lambda {
        if j == cfg.max_steps {
            let rows: Vec<String> = trace.iter().map(|r: &JordanRow| format!("{}:{:.6}", r.step, r.measured_dist)).collect();
            return Err(Error::BudgetExhausted(format!(
                "dist {dist:.6} ≤ λ = {lambda} after {j} steps (trace {})",
                rows.join(" ")
            )));
        }
        j += 1;
        let m = circle_samples(&cur);
        let (_, measured) = boundary_dev(&cur, &ytrig, m);
        // the measured deviation replaces δ_{j−1} whenever smaller; a zero
        // deviation leaves room for the general-position shift
        let sched = schedule.delta(j - 1);
        let delta = if measured > 1e-9 * sched { sched.min(measured * (1.0 + 1e-9)) } else { sched };
        let d = schedule.d(j - 1).min(0.999 * dist);
        let out = boost_null(&cur, &y, delta, schedule.eta(j), p0, d, &cfg.boost)?;
        let drift = boundary_dev_null(&out.f, &g0, circle_samples(&out.f));
        cur = out.f;
        dist = out.report.dist_after;
        trace.push(JordanRow {
            step: j,
            eta: schedule.eta(j),
            d_j: schedule.d(j),
            delta_j: schedule.delta(j),
            measured_dist: dist,
            measured_sup_dev: out.report.sup_dev,
            drift,
            n_used: out.report.n_used,
            dist_before: out.report.dist_before,
        });
    }
    Ok(JordanRun { g: cur, schedule, initial_dist: dist0, trace })
}

fn boundary_dev_null(a: &NullDisc, b: &NullDisc, m: usize) -> f64 {
    let (pa, pb) = (a.real_circle(m, 1.0), b.real_circle(m, 1.0));
    pa.iter().zip(&pb).map(|(x, y)| dist(x, y)).fold(0.0, f64::max)
}
