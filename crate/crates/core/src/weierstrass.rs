//! Conformal minimal discs through their Weierstrass data: F = F(p₀) + ℜ∫φ dζ
//! with φ = ∂F/∂ζ null and nowhere zero.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nullquad::{pi_poly, theta_unchecked};
use crate::series::{norm, LaurentPoly, VectorLaurent};

const NULL_TOL: f64 = 1e-8;
const IMMERSION_TOL: f64 = 1e-6;
const PERIOD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Disc,
    /// inner < |ζ| < outer
    Annulus { inner: f64, outer: f64 },
}

impl Domain {
    pub fn contains(&self, z: C64) -> bool {
        let r = z.norm();
        match *self {
            Domain::Disc => r <= 1.0 + 1e-12,
            Domain::Annulus { inner, outer } => r > inner && r < outer,
        }
    }

    /// Radii of the sample circles used by the grid checks.
    fn sample_radii(&self) -> Vec<f64> {
        match *self {
            Domain::Disc => (0..=10).map(|k| 1.0 - k as f64 / 10.0).collect(),
            Domain::Annulus { inner, outer } => (1..8).map(|k| inner + (outer - inner) * k as f64 / 8.0).collect(),
        }
    }
}

/// A conformal minimal immersion into ℝⁿ: φ = ∂F/∂ζ plus F at the base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImmersionDisc {
    pub phi: VectorLaurent,
    pub base: Vec<f64>,
    pub domain: Domain,
    #[serde(default)]
    pub base_point: [f64; 2],
}

/// Sup of |Θ(φ,φ)| and of ‖φ‖, and inf of ‖φ‖, over circles.
fn grid_stats(phi: &VectorLaurent, radii: &[f64], m: usize) -> (f64, f64, f64) {
    let (mut q, mut hi, mut lo) = (0.0f64, 0.0f64, f64::INFINITY);
    for &r in radii {
        for p in phi.eval_circle_points(m, r, 0.0) {
            q = q.max(theta_unchecked(&p, &p).norm());
            let nn = norm(&p);
            hi = hi.max(nn);
            lo = lo.min(nn);
        }
    }
    (q, hi, lo)
}

fn grid_size(phi: &VectorLaurent, grid: usize) -> usize {
    let span = (phi.jmax() - phi.jmin() + 1).max(1) as usize;
    grid.max(4 * span).max(16).next_power_of_two()
}

impl ImmersionDisc {
    /// Validated construction: null, immersed and, on an annulus, with
    /// vanishing real period.
    pub fn new(phi: VectorLaurent, base: Vec<f64>, domain: Domain) -> Result<Self> {
        let imm = Self::new_unchecked(phi, base, domain)?;
        let m = grid_size(&imm.phi, 256);
        let (q, hi, lo) = grid_stats(&imm.phi, &domain.sample_radii(), m);
        if hi == 0.0 || lo < IMMERSION_TOL * hi {
            return Err(Error::Domain(format!("Weierstrass data vanishes (min ‖φ‖ = {lo:e})")));
        }
        if q > NULL_TOL * hi * hi {
            return Err(Error::Domain(format!("Weierstrass data is not null (|Θ| = {q:e})")));
        }
        if let Domain::Annulus { .. } = domain {
            let per = imm.real_period();
            if per > 1e-10 {
                return Err(Error::Period(per));
            }
        }
        Ok(imm)
    }

    pub fn new_unchecked(phi: VectorLaurent, base: Vec<f64>, domain: Domain) -> Result<Self> {
        if phi.dim() != base.len() {
            return Err(Error::Dimension(phi.dim(), base.len()));
        }
        if let Domain::Disc = domain {
            if phi.jmin() < 0 && phi.comps().iter().any(|p| (p.jmin()..0).any(|j| p.coeff(j) != C64::new(0.0, 0.0))) {
                return Err(Error::Domain("disc data must be holomorphic at 0".into()));
            }
        }
        let base_point = match domain {
            Domain::Disc => [0.0, 0.0],
            Domain::Annulus { inner, outer } => [0.5 * (inner + outer), 0.0],
        };
        Ok(ImmersionDisc { phi, base, domain, base_point })
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base_point(&self) -> C64 {
        C64::new(self.base_point[0], self.base_point[1])
    }

    /// ‖ℜ∮φ dζ‖ over the middle circle of the annulus; zero on the disc.
    pub fn real_period(&self) -> f64 {
        let res: Vec<C64> = self.phi.comps().iter().map(|p| p.coeff(-1)).collect();
        let per: Vec<f64> = res.iter().map(|c| (C64::new(0.0, 2.0 * PI) * c).re).collect();
        per.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn eval(&self, z: C64) -> Result<Vec<f64>> {
        integrate_real_part(&self.phi, &self.base, self.domain, self.base_point(), z)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let imm: ImmersionDisc = serde_json::from_str(s)?;
        Self::new(imm.phi, imm.base, imm.domain)
    }
}

/// φ split into its ζ⁻¹ residues and the rest.
fn split_residue(phi: &VectorLaurent) -> (VectorLaurent, Vec<C64>) {
    let res: Vec<C64> = phi.comps().iter().map(|p| p.coeff(-1)).collect();
    let rest = VectorLaurent::new(
        phi.comps()
            .iter()
            .zip(&res)
            .map(|(p, r)| p - &LaurentPoly::monomial(-1, *r))
            .collect(),
    )
    .expect("nonempty");
    (rest, res)
}

/// Primitive of φ without its ζ⁻¹ part, valid off 0.
fn primitive(rest: &VectorLaurent) -> VectorLaurent {
    VectorLaurent::new(
        rest.comps()
            .iter()
            .map(|p| {
                let lo = p.jmin().min(0);
                let hi = p.jmax().max(0) + 1;
                let coeffs = (lo..=hi)
                    .map(|j| if j == 0 { C64::new(0.0, 0.0) } else { p.coeff(j - 1) / j as f64 })
                    .collect();
                LaurentPoly::new(lo, coeffs)
            })
            .collect(),
    )
    .expect("nonempty")
}

/// F(z) = base + ℜ∫_{p₀}^z φ dζ.
///
/// On an annulus the integral follows a radial segment from p₀ and then an
/// arc; a second path winding the other way must agree in real part.
pub fn integrate_real_part(phi: &VectorLaurent, base: &[f64], domain: Domain, p0: C64, z: C64) -> Result<Vec<f64>> {
    if phi.dim() != base.len() {
        return Err(Error::Dimension(phi.dim(), base.len()));
    }
    if !domain.contains(z) {
        return Err(Error::Domain(format!("{z} is outside the domain")));
    }
    match domain {
        Domain::Disc => {
            let q = phi.antiderivative_from_zero()?.require_base_point()?;
            let v = q.eval(z)?;
            let q0 = q.eval(p0)?;
            Ok(base.iter().zip(v.iter().zip(&q0)).map(|(b, (x, y))| b + (x - y).re).collect())
        }
        Domain::Annulus { .. } => {
            let (rest, res) = split_residue(phi);
            let q = primitive(&rest);
            let (qz, q0) = (q.eval(z)?, q.eval(p0)?);
            let darg = (z / p0).arg();
            let log_mod = (z.norm() / p0.norm()).ln();
            let path = |arg: f64| -> Vec<f64> {
                base.iter()
                    .enumerate()
                    .map(|(k, b)| b + (qz[k] - q0[k] + res[k] * C64::new(log_mod, arg)).re)
                    .collect()
            };
            let first = path(darg);
            let second = path(if darg >= 0.0 { darg - 2.0 * PI } else { darg + 2.0 * PI });
            let gap = first.iter().zip(&second).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if gap > PERIOD_TOL {
                return Err(Error::Period(gap));
            }
            Ok(first)
        }
    }
}

/// sup |Θ(φ,φ)| / sup ‖φ‖² over a grid of circles.
pub fn hopf_residual(imm: &ImmersionDisc, grid: usize) -> f64 {
    let m = grid_size(&imm.phi, grid);
    let (q, hi, _) = grid_stats(&imm.phi, &imm.domain.sample_radii(), m);
    if hi == 0.0 {
        0.0
    } else {
        q / (hi * hi)
    }
}

/// ℑ∮ φ dζ over |ζ| = loop_radius, one entry per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxVector(pub Vec<f64>);

/// Trapezoidal contour integral, checked against the exact residue value
/// 2π·ℜ(c₋₁).
pub fn flux_loop(imm: &ImmersionDisc, loop_radius: f64, quad_points: usize) -> Result<FluxVector> {
    flux_loop_winding(imm, loop_radius, quad_points, 1)
}

pub fn flux_loop_winding(imm: &ImmersionDisc, loop_radius: f64, quad_points: usize, winding: i32) -> Result<FluxVector> {
    if quad_points < 256 {
        return Err(Error::Precondition(format!("flux quadrature needs ≥ 256 points, got {quad_points}")));
    }
    if !imm.domain.contains(C64::new(loop_radius, 0.0)) {
        return Err(Error::Domain(format!("loop radius {loop_radius} outside the domain")));
    }
    let m = quad_points.next_power_of_two().max(grid_size(&imm.phi, 256));
    let mut out = vec![0.0; imm.dim()];
    for (k, p) in imm.phi.comps().iter().enumerate() {
        let vals = p.eval_circle(m, loop_radius, 0.0);
        // dζ = iζ dθ; Σ p(ζ_s)·ζ_s is m·ρ^0·c₋₁ up to aliasing
        let s: C64 = vals
            .iter()
            .enumerate()
            .map(|(j, v)| v * C64::from_polar(loop_radius, 2.0 * PI * j as f64 / m as f64))
            .sum();
        let integral = C64::new(0.0, 2.0 * PI / m as f64) * s * winding as f64;
        let exact = 2.0 * PI * p.coeff(-1).re * winding as f64;
        let scale = 1.0 + p.l1_norm() * loop_radius.max(1.0 / loop_radius).powi(p.jmax().abs().max(p.jmin().abs()) as i32);
        if (integral.im - exact).abs() > 1e-10 * scale {
            return Err(Error::Residue((integral.im - exact).abs()));
        }
        out[k] = integral.im;
    }
    Ok(FluxVector(out))
}

/// λ(z) with ‖dF‖ = λ(z)|dz|. Since dF = ℜ(φ dζ) and Θ(φ,φ) = 0, the real
/// and imaginary parts of φ are orthogonal of equal length ‖φ‖/√2.
pub fn conformal_factor(imm: &ImmersionDisc, z: C64) -> Result<f64> {
    Ok(norm(&imm.phi.eval(z)?) / SQRT_2)
}

/// λ from φ samples directly.
#[inline]
pub fn lambda_of(phi_val: &[C64]) -> f64 {
    norm(phi_val) / SQRT_2
}

/// A null holomorphic disc G: D̄ → ℂⁿ, G = base + ∫₀^ζ φ, optionally with a
/// spinor h (n = 3) such that φ = π∘h exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct NullDisc {
    pub phi: VectorLaurent,
    pub base: Vec<C64>,
    pub spinor: Option<VectorLaurent>,
    prim: VectorLaurent,
}

impl NullDisc {
    pub fn new(phi: VectorLaurent, base: Vec<C64>) -> Result<Self> {
        if phi.dim() != base.len() {
            return Err(Error::Dimension(phi.dim(), base.len()));
        }
        let prim = phi.antiderivative_from_zero()?.require_base_point()?;
        Ok(NullDisc { phi, base, spinor: None, prim })
    }

    /// G = base + ∫π(h); exact in coefficients.
    pub fn from_spinor(h: VectorLaurent, base: Vec<C64>) -> Result<Self> {
        if h.dim() != 2 {
            return Err(Error::Dimension(2, h.dim()));
        }
        let mut d = Self::new(pi_poly(&h), base)?;
        d.spinor = Some(h);
        Ok(d)
    }

    pub fn from_real(imm: &ImmersionDisc) -> Result<Self> {
        if imm.domain != Domain::Disc {
            return Err(Error::Domain("null discs live on the disc".into()));
        }
        Self::new(imm.phi.clone(), imm.base.iter().map(|x| C64::new(*x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// The primitive ∫₀^ζ φ (zero at the origin).
    pub fn primitive(&self) -> &VectorLaurent {
        &self.prim
    }

    pub fn eval(&self, z: C64) -> Result<Vec<C64>> {
        let v = self.prim.eval(z)?;
        Ok(v.iter().zip(&self.base).map(|(a, b)| a + b).collect())
    }

    /// G on the circle of radius ρ, point-major.
    pub fn eval_circle(&self, m: usize, rho: f64, phase: f64) -> Vec<Vec<C64>> {
        let mut pts = self.prim.eval_circle_points(m, rho, phase);
        for p in pts.iter_mut() {
            for (x, b) in p.iter_mut().zip(&self.base) {
                *x += b;
            }
        }
        pts
    }

    pub fn real_part(&self) -> ImmersionDisc {
        ImmersionDisc::new_unchecked(self.phi.clone(), self.base.iter().map(|c| c.re).collect(), Domain::Disc)
            .expect("disc data")
    }

    /// Pointwise real parts at the circle of radius ρ.
    pub fn real_circle(&self, m: usize, rho: f64) -> Vec<Vec<f64>> {
        self.eval_circle(m, rho, 0.0)
            .into_iter()
            .map(|p| p.into_iter().map(|c| c.re).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn plane() -> ImmersionDisc {
        ImmersionDisc::new(VectorLaurent::constant(&[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]), vec![0.0; 3], Domain::Disc)
            .unwrap()
    }

    pub(crate) fn catenoid() -> ImmersionDisc {
        let phi = VectorLaurent::new(vec![
            LaurentPoly::from_terms(&[(-2, c(0.5, 0.0)), (0, c(-0.5, 0.0))]),
            LaurentPoly::from_terms(&[(-2, c(0.0, 0.5)), (0, c(0.0, 0.5))]),
            LaurentPoly::monomial(-1, c(1.0, 0.0)),
        ])
        .unwrap();
        ImmersionDisc::new(phi, vec![0.0; 3], Domain::Annulus { inner: 0.2, outer: 1.0 }).unwrap()
    }

    #[test]
    fn plane_values() {
        let p = plane();
        assert_eq!(p.eval(c(1.0, 0.0)).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(p.eval(c(0.0, 0.0)).unwrap(), vec![0.0, 0.0, 0.0]);
        assert_eq!(hopf_residual(&p, 64), 0.0);
    }

    #[test]
    fn non_null_residual_is_one() {
        let p = ImmersionDisc::new_unchecked(VectorLaurent::constant(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]), vec![0.0; 3], Domain::Disc)
            .unwrap();
        assert!((hopf_residual(&p, 64) - 1.0).abs() < 1e-15);
        assert!(ImmersionDisc::new(p.phi.clone(), p.base.clone(), Domain::Disc).is_err());
    }

    #[test]
    fn spinor_data_is_null() {
        let h = VectorLaurent::new(vec![
            LaurentPoly::new(0, vec![c(0.3, 0.1), c(-1.2, 0.4), c(0.2, 0.9)]),
            LaurentPoly::new(0, vec![c(1.0, -0.5), c(0.1, 0.0), c(0.0, 0.7), c(0.3, 0.3)]),
        ])
        .unwrap();
        let imm = ImmersionDisc::new_unchecked(pi_poly(&h), vec![0.0; 3], Domain::Disc).unwrap();
        assert!(hopf_residual(&imm, 128) < 1e-12);
    }

    #[test]
    fn catenoid_flux_and_closure() {
        let cat = catenoid();
        let f = flux_loop(&cat, 0.5, 512).unwrap();
        assert!(f.0[0].abs() < 1e-12 && f.0[1].abs() < 1e-12);
        assert!((f.0[2] - 2.0 * PI).abs() < 1e-10);
        let g = flux_loop(&cat, 0.3, 512).unwrap();
        let h = flux_loop(&cat, 0.8, 512).unwrap();
        for k in 0..3 {
            assert!((g.0[k] - h.0[k]).abs() < 1e-10);
        }
        let twice = flux_loop_winding(&cat, 0.5, 512, 2).unwrap();
        assert!((twice.0[2] - 2.0 * f.0[2]).abs() < 1e-10);
        // a full turn around the core circle closes up
        let z0 = cat.eval(cat.base_point()).unwrap();
        let z1 = cat.eval(cat.base_point() * C64::from_polar(1.0, PI - 1e-12)).unwrap();
        let z2 = cat.eval(cat.base_point() * C64::from_polar(1.0, -PI + 1e-12)).unwrap();
        for k in 0..3 {
            assert!((z1[k] - z2[k]).abs() < 1e-9);
            assert!(z0[k].abs() < 1e-15);
        }
    }

    #[test]
    fn nonzero_real_period_is_refused() {
        let phi = VectorLaurent::new(vec![
            LaurentPoly::monomial(-1, c(0.0, 1.0)),
            LaurentPoly::monomial(-1, c(0.0, 0.0)),
            LaurentPoly::constant(c(1.0, 0.0)),
        ])
        .unwrap();
        let dom = Domain::Annulus { inner: 0.2, outer: 1.0 };
        assert!(matches!(ImmersionDisc::new(phi.clone(), vec![0.0; 3], dom), Err(Error::Period(_)) | Err(Error::Domain(_))));
        assert!(matches!(integrate_real_part(&phi, &[0.0; 3], dom, c(0.6, 0.0), c(-0.5, 0.1)), Err(Error::Period(_))));
    }

    #[test]
    fn disc_flux_vanishes() {
        let f = flux_loop(&plane(), 0.7, 256).unwrap();
        assert!(f.0.iter().all(|x| x.abs() < 1e-14));
    }

    fn fd_factor(imm: &ImmersionDisc, z: C64, dir: C64, h: f64) -> f64 {
        let a = imm.eval(z + dir * h).unwrap();
        let b = imm.eval(z).unwrap();
        a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt() / h
    }

    #[test]
    fn conformal_factor_matches_finite_differences() {
        let p = plane();
        // the plane disc ζ ↦ (x, −y, 0) is an isometry
        assert!((conformal_factor(&p, c(0.2, 0.1)).unwrap() - 1.0).abs() < 1e-15);
        let h = VectorLaurent::new(vec![
            LaurentPoly::new(0, vec![c(1.0, 0.0), c(0.3, 0.2)]),
            LaurentPoly::new(0, vec![c(0.1, 0.0), c(0.0, 0.5)]),
        ])
        .unwrap();
        let imm = ImmersionDisc::new(pi_poly(&h), vec![0.5, -1.0, 2.0], Domain::Disc).unwrap();
        for z in [c(0.0, 0.0), c(0.3, -0.4), c(-0.6, 0.2), c(0.1, 0.9)] {
            let lam = conformal_factor(&imm, z).unwrap();
            for dir in [c(1.0, 0.0), c(0.0, 1.0)] {
                let fd = fd_factor(&imm, z, dir, 1e-5);
                assert!((fd - lam).abs() <= 1e-3 * lam, "{fd} vs {lam}");
            }
        }
        let scaled = ImmersionDisc::new(imm.phi.scale(c(3.0, 0.0)), imm.base.clone(), Domain::Disc).unwrap();
        let z = c(0.3, 0.3);
        let r = conformal_factor(&scaled, z).unwrap() / conformal_factor(&imm, z).unwrap();
        assert!((r - 3.0).abs() < 1e-14);
    }

    #[test]
    fn branch_point_is_not_an_immersion() {
        let h = VectorLaurent::new(vec![LaurentPoly::monomial(1, c(1.0, 0.0)), LaurentPoly::zero()]).unwrap();
        assert!(ImmersionDisc::new(pi_poly(&h), vec![0.0; 3], Domain::Disc).is_err());
    }

    #[test]
    fn json_round_trip() {
        let cat = catenoid();
        let back = ImmersionDisc::from_json(&cat.to_json().unwrap()).unwrap();
        assert_eq!(back, cat);
    }

    #[test]
    fn null_disc_from_spinor() {
        let h = VectorLaurent::new(vec![LaurentPoly::constant(c(1.0, 0.0)), LaurentPoly::monomial(1, c(1.0, 0.0))]).unwrap();
        let d = NullDisc::from_spinor(h, vec![c(1.0, 0.0); 3]).unwrap();
        // π(1, ζ) = (1 − ζ², 2ζ, −i(1 + ζ²)), integrated from 0
        let z = c(0.5, 0.0);
        let g = d.eval(z).unwrap();
        assert!((g[0] - c(1.0 + 0.5 - 0.125 / 3.0, 0.0)).norm() < 1e-15);
        assert!((g[1] - c(1.25, 0.0)).norm() < 1e-15);
        assert!((g[2] - c(1.0, -(0.5 + 0.125 / 3.0))).norm() < 1e-15);
    }
}
