//! Disc meshes and the pullback metric ds = λ|dζ|: shortest-path distance to
//! the boundary, curve lengths and the boundary injectivity gap.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::series::VectorLaurent;
use crate::weierstrass::{lambda_of, Domain, ImmersionDisc};

/// Concentric-ring mesh with a fan center: vertex 0 is ζ = 0, vertex
/// 1 + k·n_a + j sits at radii[k]·e^{2πij/n_a}.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscMesh {
    pub n_r: usize,
    pub n_a: usize,
    pub radii: Vec<f64>,
    pub vertices: Vec<C64>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<usize>,
}

pub fn triangulate_disc(n_r: usize, n_a: usize) -> Result<DiscMesh> {
    triangulate_disc_graded(n_r, n_a, 1.0)
}

/// Ring radii 1 − (1 − k/n_r)^grading; grading > 1 crowds rings near 𝕋.
pub fn triangulate_disc_graded(n_r: usize, n_a: usize, grading: f64) -> Result<DiscMesh> {
    if n_r < 4 || n_a < 16 {
        return Err(Error::Geometry(format!("mesh needs n_r ≥ 4 and n_a ≥ 16, got ({n_r}, {n_a})")));
    }
    if !(grading >= 1.0) {
        return Err(Error::Geometry(format!("grading {grading} must be ≥ 1")));
    }
    let radii: Vec<f64> = (1..=n_r).map(|k| 1.0 - (1.0 - k as f64 / n_r as f64).powf(grading)).collect();
    let mut vertices = vec![C64::new(0.0, 0.0)];
    for &r in &radii {
        for j in 0..n_a {
            vertices.push(C64::from_polar(r, 2.0 * PI * j as f64 / n_a as f64));
        }
    }
    let id = |k: usize, j: usize| 1 + k * n_a + (j % n_a);
    let mut triangles = Vec::with_capacity(n_a * (2 * n_r - 1));
    for j in 0..n_a {
        triangles.push([0, id(0, j), id(0, j + 1)]);
    }
    for k in 0..n_r - 1 {
        for j in 0..n_a {
            triangles.push([id(k, j), id(k + 1, j), id(k + 1, j + 1)]);
            triangles.push([id(k, j), id(k + 1, j + 1), id(k, j + 1)]);
        }
    }
    let boundary = (0..n_a).map(|j| id(n_r - 1, j)).collect();
    Ok(DiscMesh { n_r, n_a, radii, vertices, triangles, boundary })
}

impl DiscMesh {
    pub fn vertex(&self, k: usize, j: usize) -> usize {
        1 + k * self.n_a + (j % self.n_a)
    }

    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn min_triangle_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let (a, b, c) = (self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]);
                0.5 * ((b - a).conj() * (c - a)).im.abs()
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_angular_edge(&self) -> f64 {
        2.0 * self.radii[self.n_r - 1] * (PI / self.n_a as f64).sin()
    }

    /// A mesh resolving φ: angular and near-boundary radial spacing well
    /// below the shortest oscillation of a degree-d map.
    pub fn adapted(phi: &VectorLaurent, min_r: usize, min_a: usize) -> Result<DiscMesh> {
        let d = phi.jmax().max(1) as usize;
        let n_a = (8 * d).max(min_a).next_power_of_two().min(1 << 14);
        // graded rings: innermost spacing near 𝕋 about 1/(4d)
        let n_r = min_r.max(32);
        let target = 1.0 / (4.0 * d as f64);
        let mut grading = 1.0;
        while grading < 8.0 && (1.0 / n_r as f64).powf(grading) > target {
            grading += 0.25;
        }
        let n_r = if (1.0 / n_r as f64).powf(grading) > target {
            ((1.0 / target).powf(1.0 / grading).ceil() as usize).max(n_r)
        } else {
            n_r
        };
        triangulate_disc_graded(n_r, n_a, grading)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// λ at the midpoints of all edges of one kind, by circle evaluations.
struct EdgeWeights {
    /// center fan edges, per angle
    fan: Vec<f64>,
    /// radial edges (k, j)–(k+1, j)
    radial: Vec<Vec<f64>>,
    /// diagonal edges (k, j)–(k+1, j+1)
    diag: Vec<Vec<f64>>,
    /// ring edges (k, j)–(k, j+1)
    ring: Vec<Vec<f64>>,
}

fn lambda_circle(phi: &VectorLaurent, m: usize, rho: f64, phase: f64) -> Vec<f64> {
    phi.eval_circle_points(m, rho, phase).iter().map(|p| lambda_of(p)).collect()
}

fn edge_weights(phi: &VectorLaurent, mesh: &DiscMesh) -> EdgeWeights {
    let (n_a, n_r) = (mesh.n_a, mesh.n_r);
    let dt = 2.0 * PI / n_a as f64;
    let r0 = mesh.radii[0];
    let fan = lambda_circle(phi, n_a, r0 / 2.0, 0.0).into_iter().map(|l| l * r0).collect();
    let mut radial = Vec::with_capacity(n_r - 1);
    let mut diag = Vec::with_capacity(n_r - 1);
    for k in 0..n_r - 1 {
        let (a, b) = (mesh.radii[k], mesh.radii[k + 1]);
        radial.push(lambda_circle(phi, n_a, 0.5 * (a + b), 0.0).into_iter().map(|l| l * (b - a)).collect());
        let mid = 0.5 * (C64::new(a, 0.0) + C64::from_polar(b, dt));
        let len = (C64::from_polar(b, dt) - a).norm();
        diag.push(lambda_circle(phi, n_a, mid.norm(), mid.arg()).into_iter().map(|l| l * len).collect());
    }
    let ring = mesh
        .radii
        .iter()
        .map(|&r| {
            let len = 2.0 * r * (dt / 2.0).sin();
            lambda_circle(phi, n_a, r * (dt / 2.0).cos(), dt / 2.0).into_iter().map(|l| l * len).collect()
        })
        .collect();
    EdgeWeights { fan, radial, diag, ring }
}

/// Shortest path from `p0` to the boundary ring.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceResult {
    pub distance: f64,
    /// vertex indices from p0 to the boundary
    pub path: Vec<usize>,
    pub points: Vec<C64>,
}

pub fn intrinsic_distance(imm: &ImmersionDisc, mesh: &DiscMesh, p0: usize) -> Result<DistanceResult> {
    if imm.domain != Domain::Disc {
        return Err(Error::Geometry("distance to 𝕋 needs a disc".into()));
    }
    intrinsic_distance_phi(&imm.phi, mesh, p0)
}

/// Dijkstra over mesh edges weighted by λ(midpoint)·|edge|.
pub fn intrinsic_distance_phi(phi: &VectorLaurent, mesh: &DiscMesh, p0: usize) -> Result<DistanceResult> {
    let nv = mesh.vertices.len();
    let (n_a, n_r) = (mesh.n_a, mesh.n_r);
    if p0 >= nv || p0 > nv - n_a - 1 {
        return Err(Error::Geometry(format!("vertex {p0} is not interior")));
    }
    let w = edge_weights(phi, mesh);
    let ring_of = |v: usize| ((v - 1) / n_a, (v - 1) % n_a);
    let mut dist = vec![f64::INFINITY; nv];
    let mut prev = vec![usize::MAX; nv];
    let mut heap = BinaryHeap::new();
    dist[p0] = 0.0;
    heap.push(Item(0.0, p0));
    let mut nb: Vec<(usize, f64)> = Vec::with_capacity(8);
    let mut reached = None;
    while let Some(Item(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        if v != 0 && ring_of(v).0 == n_r - 1 {
            reached = Some(v);
            break;
        }
        nb.clear();
        if v == 0 {
            for j in 0..n_a {
                nb.push((mesh.vertex(0, j), w.fan[j]));
            }
        } else {
            let (k, j) = ring_of(v);
            let jm = (j + n_a - 1) % n_a;
            nb.push((mesh.vertex(k, j + 1), w.ring[k][j]));
            nb.push((mesh.vertex(k, jm), w.ring[k][jm]));
            if k == 0 {
                nb.push((0, w.fan[j]));
            } else {
                nb.push((mesh.vertex(k - 1, j), w.radial[k - 1][j]));
                nb.push((mesh.vertex(k - 1, jm), w.diag[k - 1][jm]));
            }
            if k + 1 < n_r {
                nb.push((mesh.vertex(k + 1, j), w.radial[k][j]));
                nb.push((mesh.vertex(k + 1, j + 1), w.diag[k][j]));
            }
        }
        for &(u, wt) in &nb {
            let nd = d + wt;
            if nd < dist[u] {
                dist[u] = nd;
                prev[u] = v;
                heap.push(Item(nd, u));
            }
        }
    }
    let end = reached.ok_or_else(|| Error::Geometry("boundary unreachable".into()))?;
    let mut path = vec![end];
    while *path.last().unwrap() != p0 {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    let points = path.iter().map(|&v| mesh.vertices[v]).collect();
    Ok(DistanceResult { distance: dist[end], path, points })
}

/// Σ λ(midpoint)·|chord|: the rule behind the Dijkstra weights.
pub fn path_metric_length(phi: &VectorLaurent, points: &[C64]) -> Result<f64> {
    let mut total = 0.0;
    for w in points.windows(2) {
        total += lambda_of(&phi.eval(0.5 * (w[0] + w[1]))?) * (w[1] - w[0]).norm();
    }
    Ok(total)
}

/// Σ‖F(z_{k+1}) − F(z_k)‖, each segment subdivided until the length changes
/// by less than 10⁻⁶ relative.
pub fn curve_length(imm: &ImmersionDisc, polyline: &[C64]) -> Result<f64> {
    for z in polyline {
        if !imm.domain.contains(*z) {
            return Err(Error::Domain(format!("{z} outside the domain")));
        }
    }
    let mut total = 0.0;
    for w in polyline.windows(2) {
        let (a, b) = (w[0], w[1]);
        let seg = |k: usize| -> Result<f64> {
            let mut prev = imm.eval(a)?;
            let mut len = 0.0;
            for i in 1..=k {
                let p = imm.eval(a + (b - a) * (i as f64 / k as f64))?;
                len += p.iter().zip(&prev).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                prev = p;
            }
            Ok(len)
        };
        let mut k = 1;
        let mut last = seg(k)?;
        loop {
            k *= 2;
            let cur = seg(k)?;
            let done = (cur - last).abs() <= 1e-6 * cur.max(1e-300) || k >= 1 << 16;
            last = cur;
            if done || cur == 0.0 {
                break;
            }
        }
        total += last;
    }
    Ok(total)
}

/// Minimum of ‖F(p) − F(q)‖ over boundary sample pairs separated by more than
/// 2π/32, with the realizing pair of angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InjectivityGap {
    pub gap: f64,
    pub pair: (f64, f64),
}

pub fn boundary_injectivity_gap(imm: &ImmersionDisc, n_samples: usize) -> Result<InjectivityGap> {
    if n_samples < 256 {
        return Err(Error::Precondition(format!("need ≥ 256 boundary samples, got {n_samples}")));
    }
    let pts: Vec<Vec<f64>> = boundary_points(imm, n_samples)?;
    Ok(gap_of_points(&pts))
}

pub fn boundary_points(imm: &ImmersionDisc, m: usize) -> Result<Vec<Vec<f64>>> {
    let q = imm.phi.antiderivative_from_zero()?.require_base_point()?;
    let p0 = q.eval(imm.base_point())?;
    Ok(q.eval_circle_points(m, 1.0, 0.0)
        .into_iter()
        .map(|v| v.iter().zip(&imm.base).zip(&p0).map(|((x, b), o)| b + (x - o).re).collect())
        .collect())
}

fn gap_of_points(pts: &[Vec<f64>]) -> InjectivityGap {
    let m = pts.len();
    let dt = 2.0 * PI / m as f64;
    let mut best = InjectivityGap { gap: f64::INFINITY, pair: (0.0, 0.0) };
    for i in 0..m {
        for j in i + 1..m {
            // cyclic separation (j − i)·2π/m must exceed 2π/32
            let k = (j - i).min(m - (j - i));
            if 32 * k <= m {
                continue;
            }
            let g = pts[i].iter().zip(&pts[j]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            if g < best.gap {
                best = InjectivityGap { gap: g, pair: (i as f64 * dt, j as f64 * dt) };
            }
        }
    }
    best
}

/// Real images F(v) of all mesh vertices, computed ring by ring.
pub fn mesh_image(imm: &ImmersionDisc, mesh: &DiscMesh) -> Result<Vec<Vec<f64>>> {
    let q = imm.phi.antiderivative_from_zero()?.require_base_point()?;
    let p0 = q.eval(imm.base_point())?;
    let shift = |v: Vec<C64>| -> Vec<f64> { v.iter().zip(&imm.base).zip(&p0).map(|((x, b), o)| b + (x - o).re).collect() };
    let mut out = vec![shift(q.eval(C64::new(0.0, 0.0))?)];
    for &r in &mesh.radii {
        out.extend(q.eval_circle_points(mesh.n_a, r, 0.0).into_iter().map(shift));
    }
    Ok(out)
}

/// ASCII OBJ of the image mesh; n > 3 is projected to the first three
/// coordinates.
pub fn obj_string(points: &[Vec<f64>], triangles: &[[usize; 3]]) -> String {
    let mut s = String::new();
    for p in points {
        let c = |k: usize| p.get(k).copied().unwrap_or(0.0);
        let _ = writeln!(s, "v {:.12e} {:.12e} {:.12e}", c(0), c(1), c(2));
    }
    for t in triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

/// CSV with header x1..xn of full image coordinates.
pub fn coords_csv(points: &[Vec<f64>]) -> String {
    let n = points.first().map(|p| p.len()).unwrap_or(0);
    let mut s = (1..=n).map(|k| format!("x{k}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    for p in points {
        s.push_str(&p.iter().map(|x| format!("{x:.12e}")).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

/// CSV of per-vertex λ.
pub fn lambda_csv(phi: &VectorLaurent, mesh: &DiscMesh) -> Result<String> {
    let mut s = String::from("vertex,re,im,lambda\n");
    for (i, z) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(s, "{i},{:.12e},{:.12e},{:.12e}", z.re, z.im, lambda_of(&phi.eval(*z)?));
    }
    Ok(s)
}

/// Extrinsic lower bound: min over boundary images of ‖F(p₀) − F(ζ)‖.
pub fn chord_lower_bound(imm: &ImmersionDisc, p0: C64, m: usize) -> Result<f64> {
    let c = imm.eval(p0)?;
    Ok(boundary_points(imm, m)?
        .iter()
        .map(|p| p.iter().zip(&c).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min))
}
