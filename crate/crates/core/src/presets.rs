//! Named test objects: flat discs, the catenoid annulus and the reference
//! Riemann–Hilbert problems.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::nullquad::NullVector;
use crate::rhsolver::{ArcRegion, Directions, RhMode, RhProblem};
use crate::series::{BoundaryGrid, LaurentPoly, VectorLaurent};
use crate::weierstrass::{Domain, ImmersionDisc, NullDisc};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Smooth step: 0 for x ≤ 0, 1 for x ≥ 1, flat to all orders at both ends.
pub fn smooth_step(x: f64) -> f64 {
    let f = |t: f64| if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() };
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let (a, b) = (f(x), f(1.0 - x));
        a / (a + b)
    }
}

/// Bump on 𝕋: 1 on |t − center| ≤ half_width − ramp, 0 off |t − center| < half_width.
pub fn arc_bump(t: f64, center: f64, half_width: f64, ramp: f64) -> f64 {
    let d = (t - center).rem_euclid(2.0 * PI);
    let d = d.min(2.0 * PI - d);
    smooth_step((half_width - d) / ramp)
}

/// F(ζ) = s·(ℜζ, ℑζ, 0, …) in ℝⁿ, i.e. φ = s·(1, −i, 0, …).
pub fn plane(n: usize, scale: f64) -> ImmersionDisc {
    let mut v = vec![ZERO; n];
    v[0] = C64::new(scale, 0.0);
    v[1] = C64::new(0.0, -scale);
    ImmersionDisc::new(VectorLaurent::constant(&v), vec![0.0; n], Domain::Disc).expect("plane is an immersion")
}

/// Spinor of the flat disc φ = s·(1, −i, 0): h = √s·(1, −i)/√2.
pub fn plane_spinor(scale: f64) -> VectorLaurent {
    let a = scale.sqrt() * FRAC_1_SQRT_2;
    VectorLaurent::constant(&[C64::new(a, 0.0), C64::new(0.0, -a)])
}

/// Flat disc in the x₁x₃-plane at height h on the x₃-axis: φ = s·(1, 0, −i).
pub fn vertical_disc(height: f64, scale: f64) -> ImmersionDisc {
    let v = [C64::new(scale, 0.0), ZERO, C64::new(0.0, -scale)];
    ImmersionDisc::new(VectorLaurent::constant(&v), vec![0.0, 0.0, height], Domain::Disc).expect("flat disc is an immersion")
}

pub fn plane_null(scale: f64) -> NullDisc {
    NullDisc::from_spinor(plane_spinor(scale), vec![ZERO; 3]).expect("constant spinor")
}

/// Catenoid on 0.2 < |ζ| < 1 with φ = ((ζ⁻² − 1)/2, i(ζ⁻² + 1)/2, ζ⁻¹).
pub fn catenoid() -> ImmersionDisc {
    let c = C64::new;
    let phi = VectorLaurent::new(vec![
        LaurentPoly::from_terms(&[(-2, c(0.5, 0.0)), (0, c(-0.5, 0.0))]),
        LaurentPoly::from_terms(&[(-2, c(0.0, 0.5)), (0, c(0.0, 0.5))]),
        LaurentPoly::monomial(-1, c(1.0, 0.0)),
    ])
    .expect("three components");
    ImmersionDisc::new(phi, vec![0.0; 3], Domain::Annulus { inner: 0.2, outer: 1.0 }).expect("catenoid")
}

/// Grid sample count used by the reference problems.
pub const GRID: usize = 1024;

/// Arc |arg ζ| ≤ π/4 with neighborhood |arg ζ| ≤ π/3, |ζ| ≥ 0.85.
pub fn reference_arc() -> ArcRegion {
    ArcRegion { center: 0.0, half_width: PI / 4.0, u_half_width: PI / 3.0, u_rho: 0.85 }
}

fn bump_grid(r_max: f64, arc: &ArcRegion) -> Result<BoundaryGrid> {
    let ramp = 0.4 * arc.half_width;
    BoundaryGrid::from_fn(GRID, 1, |z| vec![C64::new(r_max * arc_bump(z.arg(), arc.center, arc.half_width, ramp), 0.0)])
}

/// F′ = (1, i, 0) with attached discs ξ·r(ζ)·(1, −i, 0).
pub fn spinor_disc_problem(r_max: f64, eps: f64) -> Result<RhProblem> {
    let arc = reference_arc();
    let h = VectorLaurent::constant(&[C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)]);
    let center = NullDisc::from_spinor(h, vec![ZERO; 3])?;
    let w = vec![C64::new(1.0, 0.0), C64::new(0.0, -1.0), ZERO];
    Ok(RhProblem {
        center,
        r: bump_grid(r_max, &arc)?,
        sigma: BoundaryGrid::from_taylor_fn(GRID, 3, 1, |_| vec![vec![ZERO; 3], w.clone()])?,
        mode: RhMode::Spinor3,
        eps,
        rho0: 0.9,
        arc: Some(arc),
        real_form: false,
    })
}

/// The same discs as [`spinor_disc_problem`] posed in a constant direction:
/// u = (1, −i, 0), v = (0, 1, i), σ = ξ.
pub fn direction3_problem(r_max: f64, eps: f64) -> Result<RhProblem> {
    let arc = reference_arc();
    let h = VectorLaurent::constant(&[C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)]);
    let center = NullDisc::from_spinor(h, vec![ZERO; 3])?;
    let u = NullVector::new(vec![C64::new(1.0, 0.0), C64::new(0.0, -1.0), ZERO])?;
    let v = NullVector::new(vec![ZERO, C64::new(1.0, 0.0), C64::new(0.0, 1.0)])?;
    Ok(RhProblem {
        center,
        r: bump_grid(r_max, &arc)?,
        sigma: BoundaryGrid::from_taylor_fn(GRID, 1, 1, |_| vec![vec![ZERO], vec![C64::new(1.0, 0.0)]])?,
        mode: RhMode::ConstantDirection(Directions::Complex { u, v }),
        eps,
        rho0: 0.9,
        arc: Some(arc),
        real_form: false,
    })
}

/// n = 4: F′ = (1, i, 0, 0), u = (1, −i, 1, i), v = (1, −i, −1, i).
/// Θ(u, F′) = Θ(v, F′) = 2 and Θ(u, v) = −2.
pub fn quad4_problem(r_max: f64, eps: f64) -> Result<RhProblem> {
    let c = C64::new;
    let arc = reference_arc();
    let center = NullDisc::new(VectorLaurent::constant(&[c(1.0, 0.0), c(0.0, 1.0), ZERO, ZERO]), vec![ZERO; 4])?;
    let u = NullVector::new(vec![c(1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0)])?;
    let v = NullVector::new(vec![c(1.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0), c(0.0, 1.0)])?;
    Ok(RhProblem {
        center,
        r: bump_grid(r_max, &arc)?,
        sigma: BoundaryGrid::from_taylor_fn(GRID, 1, 1, |_| vec![vec![ZERO], vec![c(1.0, 0.0)]])?,
        mode: RhMode::ConstantDirection(Directions::Complex { u, v }),
        eps,
        rho0: 0.9,
        arc: Some(arc),
        real_form: false,
    })
}
