//! Balls, ellipsoids and their parallel domains; the push of a boundary into
//! a thin convex shell and the properness loop built from it.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::boost::{circle_samples, flux_of, jordan_iterate, measured_distance, JordanConfig};
use crate::error::{Error, Result};
use crate::geometry::DiscMesh;
use crate::nullquad::theta_unchecked;
use crate::rhsolver::{solve_rhn, Directions, RhMode, RhProblem, RhReport, SolveConfig};
use crate::series::BoundaryGrid;
use crate::weierstrass::{Domain, ImmersionDisc, NullDisc};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A strictly convex body with closed-form normals and curvatures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexDomain {
    Ball { center: Vec<f64>, radius: f64 },
    /// The inner parallel domain at distance `offset` of an axis-aligned
    /// ellipsoid; `offset` = 0 is the ellipsoid itself.
    Ellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
}

impl ConvexDomain {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let d = ConvexDomain::Ball { center, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn ellipsoid(center: Vec<f64>, semi_axes: Vec<f64>) -> Result<Self> {
        let d = ConvexDomain::Ellipsoid { center, semi_axes, offset: 0.0 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexDomain::Ball { center, radius } => {
                if center.len() < 2 {
                    return Err(Error::Dimension(2, center.len()));
                }
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Config { field: "radius".into(), msg: format!("{radius} is not positive") });
                }
            }
            ConvexDomain::Ellipsoid { center, semi_axes, offset } => {
                if center.len() < 2 || center.len() != semi_axes.len() {
                    return Err(Error::Dimension(center.len(), semi_axes.len()));
                }
                if semi_axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
                    return Err(Error::Config { field: "semi_axes".into(), msg: "must be positive".into() });
                }
                let (lo, hi) = axis_range(semi_axes);
                if !(*offset < lo * lo / hi) {
                    return Err(Error::Curvature(*offset));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.center().len()
    }

    pub fn center(&self) -> &[f64] {
        match self {
            ConvexDomain::Ball { center, .. } | ConvexDomain::Ellipsoid { center, .. } => center,
        }
    }

    /// (κ_min, κ_max) of the boundary.
    pub fn curvature_range(&self) -> (f64, f64) {
        match self {
            ConvexDomain::Ball { radius, .. } => (1.0 / radius, 1.0 / radius),
            ConvexDomain::Ellipsoid { semi_axes, offset, .. } => {
                let (lo, hi) = axis_range(semi_axes);
                // principal curvatures k map to k/(1 − t·k) along the normals
                let shift = |k: f64| k / (1.0 - offset * k);
                (shift(lo / (hi * hi)), shift(hi / (lo * lo)))
            }
        }
    }

    pub fn kappa_min(&self) -> f64 {
        self.curvature_range().0
    }

    pub fn kappa_max(&self) -> f64 {
        self.curvature_range().1
    }

    /// Signed Euclidean distance to the boundary, negative inside.
    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        match self {
            ConvexDomain::Ball { center, radius } => norm(&sub(p, center)) - radius,
            ConvexDomain::Ellipsoid { center, semi_axes, offset } => {
                ellipsoid_signed_distance(semi_axes, &sub(p, center)) + offset
            }
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.signed_distance(p) < 0.0
    }
}

fn axis_range(a: &[f64]) -> (f64, f64) {
    (a.iter().cloned().fold(f64::INFINITY, f64::min), a.iter().cloned().fold(0.0, f64::max))
}

/// Signed distance from y (ellipsoid frame) to {Σ (x_i/a_i)² = 1}. The
/// nearest point is x_i = a_i² y_i/(t + a_i²) where t is the root of
/// Σ (a_i y_i/(t + a_i²))² = 1 on (−a_min², ∞).
fn ellipsoid_signed_distance(a: &[f64], y: &[f64]) -> f64 {
    let g: f64 = a.iter().zip(y).map(|(ai, yi)| (yi / ai).powi(2)).sum::<f64>() - 1.0;
    if g == 0.0 {
        return 0.0;
    }
    let (amin, _) = axis_range(a);
    let scale = a.iter().map(|x| x * x).fold(0.0, f64::max);
    let f = |t: f64| -> f64 { a.iter().zip(y).map(|(ai, yi)| (ai * yi / (t + ai * ai)).powi(2)).sum::<f64>() - 1.0 };
    let at = |t: f64| -> Vec<f64> { a.iter().zip(y).map(|(ai, yi)| ai * ai * yi / (t + ai * ai)).collect() };
    let floor = -amin * amin;
    let min_axes: Vec<usize> = (0..a.len()).filter(|&i| a[i] == amin).collect();
    let x = if g < 0.0 && min_axes.iter().all(|&i| y[i] == 0.0) && {
        let off: f64 = (0..a.len())
            .filter(|i| !min_axes.contains(i))
            .map(|i| (a[i] * y[i] / (a[i] * a[i] - amin * amin)).powi(2))
            .sum();
        off <= 1.0
    } {
        // the root sits at the pole t = −a_min²: the nearest point leaves the
        // minimal-axis hyperplane
        let mut x: Vec<f64> = (0..a.len())
            .map(|i| if min_axes.contains(&i) { 0.0 } else { a[i] * a[i] * y[i] / (a[i] * a[i] - amin * amin) })
            .collect();
        let used: f64 = x.iter().zip(a).map(|(xi, ai)| (xi / ai).powi(2)).sum();
        x[min_axes[0]] = amin * (1.0 - used).max(0.0).sqrt();
        x
    } else {
        let (mut lo, mut hi) = if g > 0.0 {
            (0.0, norm(y) * a.iter().cloned().fold(0.0, f64::max) + scale)
        } else {
            (floor, 0.0)
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(0.5 * (lo + hi))
    };
    let d = norm(&sub(&x, y));
    if g > 0.0 {
        d
    } else {
        -d
    }
}

/// 𝒟_t: the parallel domain at inner distance t (t < 0 offsets outwards).
/// Curvature radii shift by exactly t.
pub fn parallel_domain(d: &ConvexDomain, t: f64) -> Result<ConvexDomain> {
    d.validate()?;
    if !(t < 1.0 / d.kappa_max()) {
        return Err(Error::Curvature(t));
    }
    Ok(match d {
        ConvexDomain::Ball { center, radius } => ConvexDomain::Ball { center: center.clone(), radius: radius - t },
        ConvexDomain::Ellipsoid { center, semi_axes, offset } => {
            ConvexDomain::Ellipsoid { center: center.clone(), semi_axes: semi_axes.clone(), offset: offset + t }
        }
    })
}

/// Largest distance a point between bℒ and b(ℒ_{−η}) travels when moved
/// orthogonally to the normal of ℒ without leaving ℒ_{−η}.
pub fn cap_travel_bound(eta: f64, kappa_min: f64) -> f64 {
    (2.0 * eta * eta + 2.0 * eta / kappa_min).sqrt()
}

/// Shell widths δ₀ > δ₁ > ⋯ with Σ √(2δ_j² + 2δ_j/κ_min) below `budget`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellSchedule {
    pub deltas: Vec<f64>,
    pub kappa_min: f64,
    pub budget: f64,
    /// optional interior-distance targets λ_j for the boost half of each step
    #[serde(default)]
    pub lambdas: Vec<f64>,
}

impl ShellSchedule {
    pub fn new(deltas: Vec<f64>, kappa_min: f64, budget: f64) -> Result<Self> {
        let s = ShellSchedule { deltas, kappa_min, budget, lambdas: Vec::new() };
        s.validate()?;
        Ok(s)
    }

    /// δ_j = δ₀·ratio^j for j = 0..=steps.
    pub fn geometric(delta0: f64, ratio: f64, steps: usize, kappa_min: f64, budget: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Config { field: "ratio".into(), msg: format!("{ratio} is not in (0, 1)") });
        }
        Self::new((0..=steps).map(|j| delta0 * ratio.powi(j as i32)).collect(), kappa_min, budget)
    }

    pub fn validate(&self) -> Result<()> {
        if self.deltas.len() < 2 {
            return Err(Error::Config { field: "deltas".into(), msg: "need δ₀ and at least one step".into() });
        }
        if !(self.kappa_min > 0.0) {
            return Err(Error::Config { field: "kappa_min".into(), msg: "must be positive".into() });
        }
        if self.deltas.iter().any(|d| !(*d > 0.0)) || self.deltas.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config { field: "deltas".into(), msg: "must be positive and strictly decreasing".into() });
        }
        if !self.lambdas.is_empty() && self.lambdas.len() != self.steps() {
            return Err(Error::Dimension(self.steps(), self.lambdas.len()));
        }
        let sum = self.series_sum();
        if !(sum < self.budget) {
            return Err(Error::Config {
                field: "budget".into(),
                msg: format!("Σ √(2δ_j² + 2δ_j/κ_min) = {sum} is not below {}", self.budget),
            });
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        self.deltas.len() - 1
    }

    pub fn delta(&self, j: usize) -> f64 {
        self.deltas[j]
    }

    pub fn term(&self, j: usize) -> f64 {
        cap_travel_bound(self.deltas[j], self.kappa_min)
    }

    pub fn series_sum(&self) -> f64 {
        (0..self.deltas.len()).map(|j| self.term(j)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PushConfig {
    /// RH tolerance; defaults to δ/2 so the boundary lands strictly inside the shell
    pub rh_eps: Option<f64>,
    pub rho0: f64,
    /// boundary samples of the disc data
    pub grid: usize,
    /// rings sampled for the containment and clearance checks
    pub rings: usize,
    pub mesh_min_r: usize,
    pub mesh_min_a: usize,
    pub solve: SolveConfig,
}

impl Default for PushConfig {
    fn default() -> Self {
        PushConfig {
            rh_eps: None,
            rho0: 0.9,
            grid: 1024,
            rings: 64,
            mesh_min_r: 32,
            mesh_min_a: 256,
            solve: SolveConfig { c_grid: 4, ..SolveConfig::default() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PushReport {
    /// the boundary already lay in the shell; the map was left unchanged
    pub skipped: bool,
    pub eta: f64,
    pub delta: f64,
    pub cap_center: Vec<f64>,
    /// largest angle at the center of ℒ between the cap axis and F(𝕋)
    pub cap_angle: f64,
    pub plane: (Vec<f64>, Vec<f64>),
    pub kappa_l_min: f64,
    /// √(2η² + 2η/κ_ℒ^min)
    pub bound: f64,
    pub tol: f64,
    pub sup_dev: f64,
    /// largest planar travel the attached discs allow
    pub disc_reach: f64,
    /// min over sampled D̄ ∖ K̊ of the signed distance to bℒ
    pub clearance_l: f64,
    /// min and max over 𝕋 of the distance to b𝒟
    pub gap_min: f64,
    pub gap_max: f64,
    /// max over sampled D̄ of the signed distance to b𝒟
    pub containment: f64,
    pub flux_delta: f64,
    pub rh: Option<RhReport>,
    pub n_used: usize,
    pub c_index: usize,
    pub dist_before: f64,
    pub dist_after: f64,
    pub mesh: (usize, usize),
}

impl PushReport {
    pub fn pass_a(&self) -> bool {
        self.sup_dev < self.bound + self.tol
    }

    pub fn pass_b(&self) -> bool {
        self.clearance_l > 0.0
    }

    pub fn pass_c(&self) -> bool {
        self.gap_min > 0.0 && self.gap_max < self.delta
    }

    pub fn pass_d(&self) -> bool {
        self.flux_delta < 1e-10
    }
}

fn ball_of(d: &ConvexDomain, what: &str) -> Result<(Vec<f64>, f64)> {
    match d {
        ConvexDomain::Ball { center, radius } => Ok((center.clone(), *radius)),
        ConvexDomain::Ellipsoid { .. } => {
            Err(Error::Geometry(format!("{what}: planar slices of an ellipsoid are not round; shell pushes need balls")))
        }
    }
}

/// Real values of G on the circle of radius ρ.
fn ring(g: &NullDisc, m: usize, rho: f64) -> Vec<Vec<f64>> {
    if rho == 0.0 {
        let v: Vec<f64> = g.base.iter().map(|c| c.re).collect();
        return vec![v];
    }
    g.real_circle(m, rho)
}

/// Extremes of the signed distance to `dom` over rings k_rho ≤ ρ ≤ 1.
fn sd_range(g: &NullDisc, dom: &ConvexDomain, k_rho: f64, rings: usize, m: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..=rings {
        let rho = k_rho + (1.0 - k_rho) * j as f64 / rings as f64;
        for p in ring(g, m, rho) {
            let s = dom.signed_distance(&p);
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    (lo, hi)
}

fn null_of(f: &ImmersionDisc) -> Result<NullDisc> {
    if f.domain != Domain::Disc {
        return Err(Error::Domain("shell pushes act on discs".into()));
    }
    let base: Vec<C64> = f.eval(ZERO)?.into_iter().map(|x| C64::new(x, 0.0)).collect();
    NullDisc::new(f.phi.clone(), base)
}

/// Orthonormal u, v ⊥ ν, chosen among coordinate-seeded pairs to keep
/// Θ(u − iv, F′) away from zero on 𝕋.
fn cap_plane(nu: &[f64], g: &NullDisc, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = nu.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let mut w = sub(&e, &nu.iter().map(|x| x * nu[k]).collect::<Vec<_>>());
        for b in &basis {
            let c = dot(&w, b);
            w = sub(&w, &b.iter().map(|x| x * c).collect::<Vec<_>>());
        }
        let l = norm(&w);
        if l > 1e-6 {
            basis.push(w.iter().map(|x| x / l).collect());
        }
    }
    let fp = g.phi.eval_circle_points(m, 1.0, 0.0);
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let ut: Vec<C64> = basis[i].iter().zip(&basis[j]).map(|(a, b)| C64::new(*a, -b)).collect();
            let worst = fp.iter().map(|p| theta_unchecked(&ut, p).norm()).fold(f64::INFINITY, f64::min);
            if best.map(|b| worst > b.0).unwrap_or(true) {
                best = Some((worst, i, j));
            }
        }
    }
    match best {
        Some((w, i, j)) if w > 0.0 => Ok((basis[i].clone(), basis[j].clone())),
        Some((w, _, _)) => Err(Error::Nondegeneracy(w)),
        None => Err(Error::Dimension(3, n)),
    }
}

/// One shell push: every boundary point is carried, orthogonally to the
/// normal of ℒ at a common cap center, across the planar slice of 𝒟_{δ/2}
/// through it, so that F̃(𝕋) lands in 𝒟 ∖ 𝒟̄_δ.
pub fn push_step(
    f: &ImmersionDisc,
    l: &ConvexDomain,
    d: &ConvexDomain,
    eta: f64,
    delta: f64,
    k_rho: f64,
    cfg: &PushConfig,
) -> Result<(ImmersionDisc, PushReport)> {
    let n = f.dim();
    if l.dim() != n || d.dim() != n {
        return Err(Error::Dimension(n, l.dim().max(d.dim())));
    }
    let (cl, rl) = ball_of(l, "ℒ")?;
    let (cd, rd) = ball_of(d, "𝒟")?;
    if !(eta > 0.0) {
        return Err(Error::Config { field: "eta".into(), msg: "must be positive".into() });
    }
    if !(delta > 0.0 && delta < 1.0 / d.kappa_max()) {
        return Err(Error::Config { field: "delta".into(), msg: format!("{delta} is not in (0, 1/κ_max)") });
    }
    if !(k_rho >= 0.0 && k_rho < 1.0) {
        return Err(Error::Config { field: "k_rho".into(), msg: format!("{k_rho} is not in [0, 1)") });
    }
    if norm(&sub(&cd, &cl)) + rd > rl + eta + 1e-12 * rd {
        return Err(Error::Precondition("𝒟 is not contained in ℒ_{−η}".into()));
    }
    let g = null_of(f)?;
    let m0 = circle_samples(&g);
    let (lo_l, _) = sd_range(&g, l, k_rho, cfg.rings, m0);
    let (_, hi_d) = sd_range(&g, d, k_rho, cfg.rings, m0);
    if !(lo_l > 0.0 && hi_d < 0.0) {
        return Err(Error::Precondition(format!(
            "F(D̄ ∖ K̊) must lie in 𝒟 ∖ ℒ̄ (min distance outside ℒ {lo_l:e}, max inside 𝒟 {hi_d:e})"
        )));
    }
    let kappa_l = l.kappa_min();
    let bound = cap_travel_bound(eta, kappa_l);
    let flux0 = flux_of(&g)?;
    let bnd = g.real_circle(m0, 1.0);
    let gaps: Vec<f64> = bnd.iter().map(|p| -d.signed_distance(p)).collect();
    let (gap_min0, gap_max0) = (gaps.iter().cloned().fold(f64::INFINITY, f64::min), gaps.iter().cloned().fold(0.0, f64::max));

    // cap axis: the mean direction of F(𝕋) seen from the center of ℒ
    let mut axis = vec![0.0; n];
    for p in &bnd {
        let w = sub(p, &cl);
        let l = norm(&w);
        for (a, x) in axis.iter_mut().zip(&w) {
            *a += x / l;
        }
    }
    let al = norm(&axis);
    if al < 1e-9 * bnd.len() as f64 {
        return Err(Error::Geometry("F(𝕋) surrounds the center of ℒ; no single cap holds it".into()));
    }
    let axis: Vec<f64> = axis.iter().map(|x| x / al).collect();
    let cap_center: Vec<f64> = cl.iter().zip(&axis).map(|(c, a)| c + rl * a).collect();
    let cap_angle = bnd
        .iter()
        .map(|p| {
            let w = sub(p, &cl);
            (dot(&w, &axis) / norm(&w)).clamp(-1.0, 1.0).acos()
        })
        .fold(0.0, f64::max);

    let mesh0 = DiscMesh::adapted(&g.phi, cfg.mesh_min_r, cfg.mesh_min_a)?;
    let nu: Vec<f64> = axis.iter().map(|x| -x).collect();

    if gap_min0 > 0.0 && gap_max0 < delta {
        let (dist, _) = measured_distance(&g.phi, &mesh0, ZERO)?;
        let (_, hi_all) = sd_range(&g, d, 0.0, cfg.rings, m0);
        let report = PushReport {
            skipped: true,
            eta,
            delta,
            cap_center,
            cap_angle,
            plane: (Vec::new(), Vec::new()),
            kappa_l_min: kappa_l,
            bound,
            tol: 0.0,
            sup_dev: 0.0,
            disc_reach: 0.0,
            clearance_l: lo_l,
            gap_min: gap_min0,
            gap_max: gap_max0,
            containment: hi_all,
            flux_delta: 0.0,
            rh: None,
            n_used: 0,
            c_index: 0,
            dist_before: dist,
            dist_after: dist,
            mesh: (mesh0.n_r, mesh0.n_a),
        };
        return Ok((f.clone(), report));
    }

    let (u, v) = cap_plane(&nu, &g, m0)?;
    let rho = rd - 0.5 * delta;
    let m = cfg.grid;
    let pts = g.real_circle(m, 1.0);
    let mut radius = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    let mut disc_reach = 0.0f64;
    for p in &pts {
        let w = sub(&cd, p);
        let (a, b) = (dot(&w, &u), dot(&w, &v));
        let h2 = dot(&w, &w) - a * a - b * b;
        let r2 = rho * rho - h2;
        let off = (a * a + b * b).sqrt();
        if !(r2 > 0.0) || !(r2.sqrt() > off) {
            return Err(Error::Geometry(format!(
                "boundary point at distance {} from the center of 𝒟 is not inside the slice of 𝒟_δ/2",
                norm(&w)
            )));
        }
        let rs = r2.sqrt();
        disc_reach = disc_reach.max(rs + off);
        radius.push(rs);
        beta.push(-C64::new(a, b) / rs);
    }
    if disc_reach >= bound {
        return Err(Error::Geometry(format!(
            "attached discs reach {disc_reach} ≥ √(2η² + 2η/κ) = {bound}; the cap is too wide"
        )));
    }
    // σ(ζ, ξ) = (ξ + β)/(1 + β̄ξ) − β maps the unit disc onto the slice with 0 ↦ F(ζ)
    let bmax = beta.iter().map(|b| b.norm()).fold(0.0, f64::max);
    let mut deg = 1usize;
    while bmax.powi(deg as i32) > 1e-12 && deg < 24 {
        deg += 1;
    }
    if bmax.powi(deg as i32) > 1e-8 {
        return Err(Error::Geometry(format!("F(𝕋) sits too far off the slice centers (|β| = {bmax})")));
    }
    let mut sig = vec![ZERO; (deg + 1) * m];
    for (s, b) in beta.iter().enumerate() {
        let lead = 1.0 - b.norm_sqr();
        let mut pw = C64::new(1.0, 0.0);
        for k in 1..=deg {
            sig[k * m + s] = pw * lead;
            pw *= -b.conj();
        }
    }
    let rh_eps = cfg.rh_eps.unwrap_or(0.5 * delta);
    let p = RhProblem {
        center: g.clone(),
        r: BoundaryGrid::from_samples(m, 1, 0, radius.iter().map(|x| C64::new(*x, 0.0)).collect())?,
        sigma: BoundaryGrid::from_samples(m, 1, deg, sig)?,
        mode: RhMode::ConstantDirection(Directions::Real { u: u.clone(), v: v.clone() }),
        eps: rh_eps,
        rho0: cfg.rho0,
        arc: None,
        real_form: true,
    };
    let sol = solve_rhn(&p, &cfg.solve)?;
    let out = sol.g;
    let r = out.real_part();
    let imm = ImmersionDisc::new(r.phi, r.base, Domain::Disc)?;

    let m1 = circle_samples(&out);
    let (a1, b1) = (g.real_circle(m1, 1.0), out.real_circle(m1, 1.0));
    let sup_dev = a1.iter().zip(&b1).map(|(x, y)| norm(&sub(x, y))).fold(0.0, f64::max);
    let gaps: Vec<f64> = b1.iter().map(|p| -d.signed_distance(p)).collect();
    let (clearance_l, _) = sd_range(&out, l, k_rho, cfg.rings, m1);
    let (_, hi_outer) = sd_range(&out, d, cfg.rho0, cfg.rings, m1);
    let (_, hi_inner) = sd_range(&out, d, 0.0, cfg.rings, m1);
    let flux1 = flux_of(&out)?;
    let mesh = DiscMesh::adapted(&out.phi, cfg.mesh_min_r, cfg.mesh_min_a)?;
    let (dist_before, _) = measured_distance(&g.phi, &mesh, ZERO)?;
    let (dist_after, _) = measured_distance(&out.phi, &mesh, ZERO)?;
    let report = PushReport {
        skipped: false,
        eta,
        delta,
        cap_center,
        cap_angle,
        plane: (u, v),
        kappa_l_min: kappa_l,
        bound,
        tol: rh_eps,
        sup_dev,
        disc_reach,
        clearance_l,
        gap_min: gaps.iter().cloned().fold(f64::INFINITY, f64::min),
        gap_max: gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        containment: hi_outer.max(hi_inner),
        flux_delta: flux0.iter().zip(&flux1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        rh: Some(sol.report),
        n_used: sol.n_used,
        c_index: sol.c_index,
        dist_before,
        dist_after,
        mesh: (mesh.n_r, mesh.n_a),
    };
    Ok((imm, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProperConfig {
    pub push: PushConfig,
    /// step j targets the shell of δ_{min(j + lookahead, J)}
    pub lookahead: usize,
    /// radius of the initial compact K₀
    pub k0: f64,
    pub jordan: JordanConfig,
}

impl Default for ProperConfig {
    fn default() -> Self {
        ProperConfig { push: PushConfig::default(), lookahead: 0, k0: 0.5, jordan: JordanConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProperRow {
    pub step: usize,
    pub delta_j: f64,
    pub eta: f64,
    /// shell width the push aimed at
    pub target_delta: f64,
    pub skipped: bool,
    pub gap_min: f64,
    pub gap_max: f64,
    pub dist: f64,
    pub drift: f64,
    /// √(2η² + 2η/κ_ℒ^min) + tol
    pub bound: f64,
    pub cap_angle: f64,
    pub k_radius: f64,
    pub n_used: usize,
    pub boosted: bool,
}

pub fn proper_csv(rows: &[ProperRow]) -> String {
    let mut s = String::from("step,delta_j,eta,target_delta,skipped,gap_min,gap_max,dist,drift,bound,cap_angle,k_radius,n_used,boosted\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:.12e},{:.12e},{:.12e},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{},{}",
            r.step,
            r.delta_j,
            r.eta,
            r.target_delta,
            r.skipped,
            r.gap_min,
            r.gap_max,
            r.dist,
            r.drift,
            r.bound,
            r.cap_angle,
            r.k_radius,
            r.n_used,
            r.boosted
        );
    }
    s
}

pub struct ProperRun {
    pub f: ImmersionDisc,
    pub initial_dist: f64,
    pub initial_gap: f64,
    pub trace: Vec<ProperRow>,
    pub reports: Vec<PushReport>,
    pub total_drift: f64,
}

/// Smallest radius k on a geometric grid above `prev` with G(D̄ ∖ K̊) outside b.
fn next_compact(g: &NullDisc, b: &ConvexDomain, prev: f64, m: usize) -> Result<f64> {
    let radii: Vec<f64> = (1..=80).map(|i| 1.0 - (1.0 - prev) * 2f64.powf(-(i as f64) / 4.0)).collect();
    let ok: Vec<bool> = radii
        .iter()
        .chain(std::iter::once(&1.0))
        .map(|&rho| ring(g, m, rho).iter().all(|p| b.signed_distance(p) > 0.0))
        .collect();
    if !ok[ok.len() - 1] {
        return Err(Error::Precondition("the boundary is not outside the next shell domain".into()));
    }
    let mut k = radii.len();
    while k > 0 && ok[k - 1] {
        k -= 1;
    }
    if k == radii.len() {
        return Err(Error::Geometry("no sampled compact separates the image from the shell domain".into()));
    }
    Ok(radii[k])
}

/// Alternating shell pushes and distance boosts with nested compacts K_j.
pub fn proper_iterate(
    f: &ImmersionDisc,
    d: &ConvexDomain,
    schedule: &ShellSchedule,
    p0: C64,
    cfg: &ProperConfig,
) -> Result<ProperRun> {
    schedule.validate()?;
    if p0 != ZERO {
        return Err(Error::Config { field: "p0".into(), msg: "distances are measured from the center".into() });
    }
    if !(cfg.k0 > 0.0 && cfg.k0 < 1.0) {
        return Err(Error::Config { field: "k0".into(), msg: format!("{} is not in (0, 1)", cfg.k0) });
    }
    let jn = schedule.steps();
    let g0 = null_of(f)?;
    let m0 = circle_samples(&g0);
    let b0 = parallel_domain(d, schedule.delta(0))?;
    let (lo, _) = sd_range(&g0, &b0, cfg.k0, cfg.push.rings, m0);
    if !(lo > 0.0) {
        return Err(Error::Precondition("F(D̄ ∖ K̊₀) must lie outside 𝒟_δ₀".into()));
    }
    let mesh = DiscMesh::adapted(&g0.phi, cfg.push.mesh_min_r, cfg.push.mesh_min_a)?;
    let (initial_dist, _) = measured_distance(&g0.phi, &mesh, p0)?;
    let initial_gap = g0.real_circle(m0, 1.0).iter().map(|p| -d.signed_distance(p)).fold(0.0, f64::max);
    let mut cur = f.clone();
    let mut k = cfg.k0;
    let mut trace = Vec::new();
    let mut reports = Vec::new();
    let mut total = 0.0;
    let mut dist = initial_dist;
    for j in 1..=jn {
        let l = parallel_domain(d, schedule.delta(j - 1))?;
        let eta = schedule.delta(j - 1);
        let target = schedule.delta((j + cfg.lookahead).min(jn));
        let (mut next, rep) = push_step(&cur, &l, d, eta, target, k, &cfg.push)?;
        if !rep.skipped {
            dist = rep.dist_after;
        }
        let mut drift = rep.sup_dev;
        let mut boosted = false;
        let (mut gap_min, mut gap_max) = (rep.gap_min, rep.gap_max);
        if let Some(&lambda) = schedule.lambdas.get(j - 1) {
            if dist <= lambda {
                // the boost may move the boundary by less than its margin inside the shell
                let margin = gap_min.min(schedule.delta(j) - gap_max);
                if !(margin > 0.0) {
                    return Err(Error::Precondition(format!("no room inside the shell for a boost at step {j}")));
                }
                let run = jordan_iterate(&next, p0, lambda, margin, &cfg.jordan)?;
                let r = run.g.real_part();
                let boosted_imm = ImmersionDisc::new(r.phi, r.base, Domain::Disc)?;
                let mm = circle_samples(&run.g);
                let gn = null_of(&next)?;
                let extra = gn
                    .real_circle(mm, 1.0)
                    .iter()
                    .zip(run.g.real_circle(mm, 1.0))
                    .map(|(a, b)| norm(&sub(a, &b)))
                    .fold(0.0, f64::max);
                drift += extra;
                let gaps: Vec<f64> = run.g.real_circle(mm, 1.0).iter().map(|p| -d.signed_distance(p)).collect();
                gap_min = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
                gap_max = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                dist = run.trace.last().map(|t| t.measured_dist).unwrap_or(dist);
                next = boosted_imm;
                boosted = true;
            }
        }
        let gn = null_of(&next)?;
        let bj = parallel_domain(d, schedule.delta(j))?;
        k = next_compact(&gn, &bj, k, circle_samples(&gn))?;
        total += drift;
        trace.push(ProperRow {
            step: j,
            delta_j: schedule.delta(j),
            eta,
            target_delta: target,
            skipped: rep.skipped,
            gap_min,
            gap_max,
            dist,
            drift,
            bound: rep.bound + rep.tol,
            cap_angle: rep.cap_angle,
            k_radius: k,
            n_used: rep.n_used,
            boosted,
        });
        reports.push(rep);
        cur = next;
    }
    let allowed = schedule.series_sum() + reports.iter().map(|r| r.tol).sum::<f64>();
    if total > allowed {
        let rows: Vec<String> = trace.iter().map(|r| format!("{}:{:.6}", r.step, r.drift)).collect();
        return Err(Error::BudgetExhausted(format!("total drift {total} exceeds {allowed} (trace {})", rows.join(" "))));
    }
    Ok(ProperRun { f: cur, initial_dist, initial_gap, trace, reports, total_drift: total })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_parallel_domains() {
        let d = ConvexDomain::ball(vec![0.0; 3], 1.0).unwrap();
        assert_eq!(parallel_domain(&d, 0.25).unwrap(), ConvexDomain::Ball { center: vec![0.0; 3], radius: 0.75 });
        assert_eq!(parallel_domain(&d, 0.0).unwrap(), d);
        assert_eq!(parallel_domain(&d, -0.5).unwrap(), ConvexDomain::Ball { center: vec![0.0; 3], radius: 1.5 });
        assert!(matches!(parallel_domain(&d, 1.0), Err(Error::Curvature(_))));
        let inner = parallel_domain(&d, 0.25).unwrap();
        assert_eq!(inner.kappa_min(), 1.0 / 0.75);
    }

    #[test]
    fn ellipsoid_offsets_shift_curvature_radii() {
        let e = ConvexDomain::ellipsoid(vec![0.1, 0.0, -0.2], vec![2.0, 1.0, 1.5]).unwrap();
        let (kmin, kmax) = e.curvature_range();
        assert!((kmin - 1.0 / 4.0).abs() < 1e-15 && (kmax - 2.0).abs() < 1e-15);
        for t in [-0.7, -0.1, 0.2, 0.45] {
            let p = parallel_domain(&e, t).unwrap();
            let (a, b) = p.curvature_range();
            assert!((1.0 / a - (1.0 / kmin - t)).abs() < 1e-10);
            assert!((1.0 / b - (1.0 / kmax - t)).abs() < 1e-10);
        }
        assert!(parallel_domain(&e, 0.5).is_err());
    }

    #[test]
    fn ellipsoid_distance_matches_ball_and_axes() {
        let e = ConvexDomain::ellipsoid(vec![0.0; 3], vec![1.0, 1.0, 1.0]).unwrap();
        let b = ConvexDomain::ball(vec![0.0; 3], 1.0).unwrap();
        for p in [[0.3, -0.2, 0.1], [1.5, 0.2, -0.7], [0.0, 0.0, 0.0], [0.0, 0.9, 0.0]] {
            assert!((e.signed_distance(&p) - b.signed_distance(&p)).abs() < 1e-12);
        }
        let e = ConvexDomain::ellipsoid(vec![0.0; 3], vec![3.0, 2.0, 1.0]).unwrap();
        assert!((e.signed_distance(&[5.0, 0.0, 0.0]) - 2.0).abs() < 1e-12);
        assert!((e.signed_distance(&[0.0, 0.0, 0.0]) + 1.0).abs() < 1e-12);
        assert!((e.signed_distance(&[0.0, 1.5, 0.0]) + 0.5).abs() < 1e-12);
        let inner = parallel_domain(&e, 0.2).unwrap();
        assert!((inner.signed_distance(&[5.0, 0.0, 0.0]) - 2.2).abs() < 1e-12);
    }

    #[test]
    fn schedule_gate() {
        let s = ShellSchedule::geometric(0.2, 0.5, 4, 1.0, 2.0).unwrap();
        assert_eq!(s.steps(), 4);
        assert_eq!(s.delta(4), 0.0125);
        assert!(s.series_sum() < 2.0);
        assert!(ShellSchedule::geometric(0.2, 0.5, 4, 1.0, 1.5).is_err());
        assert!(ShellSchedule::new(vec![0.2, 0.2, 0.1], 1.0, 10.0).is_err());
    }

    #[test]
    fn cap_travel_in_a_cross_section() {
        // concentric circles bℒ (radius R) and b(ℒ_{−η}); a point at height
        // R + t moved horizontally exits after √((R+η)² − (R+t)²)
        for r in [0.5, 1.0, 2.0] {
            for eta in [0.05, 0.2, 0.5] {
                let bound = cap_travel_bound(eta, 1.0 / r);
                for k in 1..20 {
                    let t = eta * k as f64 / 20.0;
                    let travel = ((r + eta).powi(2) - (r + t).powi(2)).sqrt();
                    assert!(travel < bound);
                }
            }
        }
    }
}
