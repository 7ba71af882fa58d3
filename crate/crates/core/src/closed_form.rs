//! Eigenfunctions and eigenvalues known in closed form: the two equilateral
//! modes with eigenvalue `16π²/9`, the radial sector mode, the symmetric mode
//! of the right isosceles triangle, the interval tone, the sector tone with a
//! Dirichlet arc, and the two-bump trial function for superequilateral
//! triangles.
//!
//! Each mode carries the rigid motion from the frame its formula is written
//! in to the canonical isosceles pose (apex at the origin, symmetric about
//! the positive x-axis).

use std::f64::consts::{FRAC_PI_3, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{IsoscelesSpec, Point, RigidMotion, Triangle};
use crate::quadrature::{self, TriangleRule};
use crate::special_fn::{j0, j01, j1, j11};

/// Aperture limit `π/2.68` below which the radial sector mode is fundamental.
pub const SECTOR_APERTURE_LIMIT: f64 = PI / 2.68;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeDomain {
    EquilateralE,
    Sector,
    RightIsosceles,
    Disk,
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeLabel {
    U1Antisymmetric,
    U2Symmetric,
    RadialJ0,
    ChengTwoBump,
    SymmetricCosPair,
    IntervalMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
enum Formula {
    EquilateralU1,
    EquilateralU2,
    /// `J_0(j_{1,1} r / l)`.
    SectorRadial { alpha: f64, leg: f64 },
    /// `cos(√2πx) + cos(√2πy)`.
    RightIsoscelesSymmetric,
    /// `cos(πx/length)` on `[0, length]`.
    Interval { length: f64 },
    /// `J_0(j_{0,1} |z − center| / radius)`.
    DirichletArc { center: Point, radius: f64 },
}

/// An exact eigenfunction with its eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormMode {
    pub domain: ModeDomain,
    pub label: ModeLabel,
    pub eigenvalue: f64,
    /// Native frame to canonical pose.
    pub frame: RigidMotion,
    formula: Formula,
}

const A_RATE: f64 = 2.0 * PI / 3.0;

fn b_rate() -> f64 {
    2.0 * PI / 3f64.sqrt()
}

impl ClosedFormMode {
    /// Value at a point of the native frame.
    pub fn value(&self, p: Point) -> f64 {
        match self.formula {
            Formula::EquilateralU1 => {
                let a = FRAC_PI_3 * (2.0 * p[0] - 1.0);
                let b = b_rate() * p[1];
                2.0 * (a.cos() + b.cos()) * a.sin()
            }
            Formula::EquilateralU2 => {
                let a = FRAC_PI_3 * (2.0 * p[0] - 1.0);
                let b = b_rate() * p[1];
                (2.0 * a).cos() - 2.0 * a.cos() * b.cos()
            }
            Formula::SectorRadial { leg, .. } => j0(j11() * p[0].hypot(p[1]) / leg),
            Formula::RightIsoscelesSymmetric => {
                (SQRT_2 * PI * p[0]).cos() + (SQRT_2 * PI * p[1]).cos()
            }
            Formula::Interval { length } => (PI * p[0] / length).cos(),
            Formula::DirichletArc { center, radius } => {
                j0(j01() * (p[0] - center[0]).hypot(p[1] - center[1]) / radius)
            }
        }
    }

    /// Gradient at a point of the native frame.
    pub fn gradient(&self, p: Point) -> Point {
        match self.formula {
            Formula::EquilateralU1 => {
                let a = FRAC_PI_3 * (2.0 * p[0] - 1.0);
                let b = b_rate() * p[1];
                let (sa, ca) = a.sin_cos();
                [
                    2.0 * A_RATE * (-sa * sa + (ca + b.cos()) * ca),
                    -2.0 * b_rate() * b.sin() * sa,
                ]
            }
            Formula::EquilateralU2 => {
                let a = FRAC_PI_3 * (2.0 * p[0] - 1.0);
                let b = b_rate() * p[1];
                [
                    A_RATE * (-2.0 * (2.0 * a).sin() + 2.0 * a.sin() * b.cos()),
                    2.0 * b_rate() * a.cos() * b.sin(),
                ]
            }
            Formula::SectorRadial { leg, .. } => radial_gradient(p, [0.0, 0.0], j11() / leg),
            Formula::RightIsoscelesSymmetric => {
                let k = SQRT_2 * PI;
                [-k * (k * p[0]).sin(), -k * (k * p[1]).sin()]
            }
            Formula::Interval { length } => [-(PI / length) * (PI * p[0] / length).sin(), 0.0],
            Formula::DirichletArc { center, radius } => radial_gradient(p, center, j01() / radius),
        }
    }

    pub fn value_canonical(&self, p: Point) -> f64 {
        self.value(self.frame.inverse_apply(p))
    }

    pub fn gradient_canonical(&self, p: Point) -> Point {
        self.frame.apply_vector(self.gradient(self.frame.inverse_apply(p)))
    }

    /// The triangular domain in the native frame, for triangle modes.
    pub fn triangle(&self) -> Option<Triangle> {
        match self.domain {
            ModeDomain::EquilateralE => Some(equilateral_e()),
            ModeDomain::RightIsosceles => Some(IsoscelesSpec::unit(PI / 2.0).ok()?.triangle()),
            _ => None,
        }
    }
}

/// Gradient of `J_0(k |p − c|)`.
fn radial_gradient(p: Point, c: Point, k: f64) -> Point {
    let d = [p[0] - c[0], p[1] - c[1]];
    let r = d[0].hypot(d[1]);
    if r == 0.0 {
        return [0.0, 0.0];
    }
    let g = -k * j1(k * r) / r;
    [g * d[0], g * d[1]]
}

/// `E` with vertices `(0,0)`, `(1,0)`, `(1/2, √3/2)`.
pub fn equilateral_e() -> Triangle {
    Triangle::new([[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]).expect("non-degenerate")
}

/// Translate the apex `(1/2, √3/2)` to the origin, then rotate by `π/2`.
fn equilateral_frame() -> RigidMotion {
    RigidMotion {
        rotation: PI / 2.0,
        translation: [3f64.sqrt() / 2.0, -0.5],
        reflect: false,
    }
}

pub fn equilateral_eigenvalue() -> f64 {
    16.0 * PI * PI / 9.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilateralModes {
    /// Antisymmetric about `x = 1/2`.
    pub u1: ClosedFormMode,
    /// Symmetric about `x = 1/2`.
    pub u2: ClosedFormMode,
}

pub fn equilateral_modes() -> EquilateralModes {
    let make = |label, formula| ClosedFormMode {
        domain: ModeDomain::EquilateralE,
        label,
        eigenvalue: equilateral_eigenvalue(),
        frame: equilateral_frame(),
        formula,
    };
    EquilateralModes {
        u1: make(ModeLabel::U1Antisymmetric, Formula::EquilateralU1),
        u2: make(ModeLabel::U2Symmetric, Formula::EquilateralU2),
    }
}

/// Integrals of `u₁`, `u₂` and of their squared partial derivatives over `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilateralIntegrals {
    pub norm2: f64,
    pub u1x2: f64,
    pub u1y2: f64,
    pub u2x2: f64,
    pub u2y2: f64,
}

impl EquilateralIntegrals {
    /// `∫u₂,ₓ² / ∫u₂,ᵧ²`, equal to `(32π²−243)/(32π²+243)`.
    pub fn u2_ratio(&self) -> f64 {
        self.u2x2 / self.u2y2
    }
}

pub fn equilateral_integrals() -> EquilateralIntegrals {
    let s3 = 3f64.sqrt();
    let big = (32.0 * PI * PI + 243.0) / (32.0 * s3);
    let small = (32.0 * PI * PI - 243.0) / (32.0 * s3);
    EquilateralIntegrals {
        norm2: 3.0 * s3 / 8.0,
        u1x2: big,
        u1y2: small,
        u2x2: small,
        u2y2: big,
    }
}

/// The same table by degree-12 quadrature on an `n²` subdivision of `E`.
pub fn equilateral_integrals_quadrature(n: usize) -> EquilateralIntegrals {
    let m = equilateral_modes();
    let [n1, n2, u1x, u1y, u2x, u2y] = quadrature::integrate(&equilateral_e(), n, |p| {
        let (g1, g2) = (m.u1.gradient(p), m.u2.gradient(p));
        [
            m.u1.value(p).powi(2),
            m.u2.value(p).powi(2),
            g1[0] * g1[0],
            g1[1] * g1[1],
            g2[0] * g2[0],
            g2[1] * g2[1],
        ]
    });
    debug_assert!((n1 - n2).abs() < 1e-8);
    EquilateralIntegrals {
        norm2: n1,
        u1x2: u1x,
        u1y2: u1y,
        u2x2: u2x,
        u2y2: u2y,
    }
}

/// Fundamental mode `J_0(j_{1,1} r/l)` of the sector `S(α)`, valid for
/// `α < π/2.68`.
pub fn sector_neumann_mode(alpha: f64, leg: f64) -> Result<ClosedFormMode> {
    if !(alpha > 0.0 && alpha < SECTOR_APERTURE_LIMIT) {
        return Err(Error::Domain(format!(
            "sector aperture {alpha} outside (0, π/2.68): the radial mode is only known to be fundamental there"
        )));
    }
    if !(leg > 0.0) {
        return Err(Error::Domain(format!("sector radius {leg} must be positive")));
    }
    Ok(ClosedFormMode {
        domain: ModeDomain::Sector,
        label: ModeLabel::RadialJ0,
        eigenvalue: (j11() / leg).powi(2),
        frame: RigidMotion::IDENTITY,
        formula: Formula::SectorRadial { alpha, leg },
    })
}

/// `cos(√2πx) + cos(√2πy)` on `T(π/2)` with unit legs, eigenvalue `2π²`.
/// The formula is already written in canonical pose.
pub fn right_isosceles_symmetric_mode() -> ClosedFormMode {
    ClosedFormMode {
        domain: ModeDomain::RightIsosceles,
        label: ModeLabel::SymmetricCosPair,
        eigenvalue: 2.0 * PI * PI,
        frame: RigidMotion::IDENTITY,
        formula: Formula::RightIsoscelesSymmetric,
    }
}

/// Fundamental Neumann tone `(π/length)²` of an interval.
pub fn interval_neumann_tone(length: f64) -> Result<f64> {
    if !(length > 0.0) {
        return Err(Error::Domain(format!("interval length {length} must be positive")));
    }
    Ok((PI / length).powi(2))
}

pub fn interval_mode(length: f64) -> Result<ClosedFormMode> {
    Ok(ClosedFormMode {
        domain: ModeDomain::Interval,
        label: ModeLabel::IntervalMode,
        eigenvalue: interval_neumann_tone(length)?,
        frame: RigidMotion::IDENTITY,
        formula: Formula::Interval { length },
    })
}

/// Tone `(j_{0,1}/l)²` of a sector of radius `l` with Dirichlet condition on
/// its arc and none on its straight sides.
pub fn sector_dirichlet_arc_tone(l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("radius {l} must be positive")));
    }
    Ok((j01() / l).powi(2))
}

/// Mode `J_0(j_{0,1} |z − center|/l)` for [`sector_dirichlet_arc_tone`].
pub fn sector_dirichlet_arc_mode(center: Point, l: f64) -> Result<ClosedFormMode> {
    Ok(ClosedFormMode {
        domain: ModeDomain::Disk,
        label: ModeLabel::RadialJ0,
        eigenvalue: sector_dirichlet_arc_tone(l)?,
        frame: RigidMotion::IDENTITY,
        formula: Formula::DirichletArc { center, radius: l },
    })
}

/// Two-bump trial function on a superequilateral `T(α)` (canonical pose):
/// `+v₀(z − z₊)` within `D/2` of the upper vertex, `−v₀(z − z₋)` within `D/2`
/// of the lower vertex, zero elsewhere, with `v₀(z) = J_0(j_{0,1}|z|/(D/2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChengTrial {
    pub spec: IsoscelesSpec,
    /// `D/2`.
    pub radius: f64,
    /// `[z₊, z₋]`.
    pub centers: [Point; 2],
    /// `(j_{0,1}/(D/2))² = 4j_{0,1}²/D²`.
    pub rayleigh_value: f64,
}

/// Integrals making up the Rayleigh quotient of a trial function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighIntegrals {
    pub gradient_energy: f64,
    pub norm2: f64,
    pub mean: f64,
}

impl RayleighIntegrals {
    pub fn quotient(&self) -> f64 {
        self.gradient_energy / self.norm2
    }
}

pub fn cheng_trial_function(alpha: f64, leg: f64) -> Result<ChengTrial> {
    if !(alpha > FRAC_PI_3 && alpha < PI) {
        return Err(Error::Domain(format!(
            "two-bump trial function needs a superequilateral aperture in (π/3, π), got {alpha}"
        )));
    }
    let spec = IsoscelesSpec::new(alpha, leg)?;
    let d = spec.diameter();
    let (h, w) = (spec.height(), spec.half_base());
    Ok(ChengTrial {
        spec,
        radius: 0.5 * d,
        centers: [[h, w], [h, -w]],
        rayleigh_value: (2.0 * j01() / d).powi(2),
    })
}

impl ChengTrial {
    fn k(&self) -> f64 {
        j01() / self.radius
    }

    pub fn value(&self, p: Point) -> f64 {
        for (c, sign) in self.centers.iter().zip([1.0, -1.0]) {
            let r = (p[0] - c[0]).hypot(p[1] - c[1]);
            if r < self.radius {
                return sign * j0(self.k() * r);
            }
        }
        0.0
    }

    pub fn gradient(&self, p: Point) -> Point {
        for (c, sign) in self.centers.iter().zip([1.0, -1.0]) {
            let r = (p[0] - c[0]).hypot(p[1] - c[1]);
            if r < self.radius {
                let g = radial_gradient(p, *c, self.k());
                return [sign * g[0], sign * g[1]];
            }
        }
        [0.0, 0.0]
    }

    /// Rayleigh integrals over `T(α)` on an `n²` subdivision: cells inside a
    /// bump use the degree-12 rule, cells cut by a bump's circle are
    /// integrated in polar coordinates about its center, the rest vanish.
    pub fn rayleigh_by_quadrature(&self, n: usize) -> RayleighIntegrals {
        let rule = TriangleRule::degree12();
        let t = self.spec.triangle();
        let mut acc = [0.0; 3];
        for cell in quadrature::subdivide(&t, n.max(1)) {
            for (c, sign) in self.centers.iter().zip([1.0, -1.0]) {
                let k = self.k();
                let bump = |p: Point| {
                    let r = (p[0] - c[0]).hypot(p[1] - c[1]);
                    let v = sign * j0(k * r);
                    let g = radial_gradient(p, *c, k);
                    [g[0] * g[0] + g[1] * g[1], v * v, v]
                };
                let far = cell
                    .iter()
                    .map(|v| (v[0] - c[0]).hypot(v[1] - c[1]))
                    .fold(0.0, f64::max);
                let part = if far <= self.radius {
                    rule.apply(&cell, &bump)
                } else if distance_to_triangle(*c, &cell) >= self.radius {
                    [0.0; 3]
                } else {
                    quadrature::integrate_triangle_disk(&cell, *c, self.radius, bump)
                };
                for i in 0..3 {
                    acc[i] += part[i];
                }
            }
        }
        RayleighIntegrals {
            gradient_energy: acc[0],
            norm2: acc[1],
            mean: acc[2],
        }
    }
}

fn distance_to_triangle(p: Point, v: &[Point; 3]) -> f64 {
    let side = |a: Point, b: Point| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let s = [side(v[0], v[1]), side(v[1], v[2]), side(v[2], v[0])];
    if s.iter().all(|&x| x >= 0.0) || s.iter().all(|&x| x <= 0.0) {
        return 0.0;
    }
    (0..3)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % 3]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]))
                .clamp(0.0, 1.0);
            (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
        })
        .fold(f64::INFINITY, f64::min)
}

/// Rayleigh integrals of a smooth function on a triangle.
pub fn rayleigh_on_triangle<F, G>(t: &Triangle, n: usize, value: F, gradient: G) -> RayleighIntegrals
where
    F: Fn(Point) -> f64,
    G: Fn(Point) -> Point,
{
    let [e, m, s] = quadrature::integrate(t, n, |p| {
        let g = gradient(p);
        let v = value(p);
        [g[0] * g[0] + g[1] * g[1], v * v, v]
    });
    RayleighIntegrals {
        gradient_energy: e,
        norm2: m,
        mean: s,
    }
}

/// Rayleigh integrals of the radial sector mode over `S(α)`.
pub fn sector_rayleigh(mode: &ClosedFormMode) -> Option<RayleighIntegrals> {
    let Formula::SectorRadial { alpha, leg } = mode.formula else {
        return None;
    };
    let [e, m, s] = quadrature::integrate_polar_sector([0.0, 0.0], leg, -0.5 * alpha, 0.5 * alpha, |p| {
        let g = mode.gradient(p);
        let v = mode.value(p);
        [g[0] * g[0] + g[1] * g[1], v * v, v]
    });
    Some(RayleighIntegrals {
        gradient_energy: e,
        norm2: m,
        mean: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Five-point finite-difference Laplacian with step `h`.
    fn fd_laplacian<F: Fn(Point) -> f64>(f: &F, p: Point, h: f64) -> f64 {
        (f([p[0] + h, p[1]]) + f([p[0] - h, p[1]]) + f([p[0], p[1] + h]) + f([p[0], p[1] - h])
            - 4.0 * f(p))
            / (h * h)
    }

    fn fd_gradient<F: Fn(Point) -> f64>(f: &F, p: Point, h: f64) -> Point {
        [
            (f([p[0] + h, p[1]]) - f([p[0] - h, p[1]])) / (2.0 * h),
            (f([p[0], p[1] + h]) - f([p[0], p[1] - h])) / (2.0 * h),
        ]
    }

    fn interior_points(t: &Triangle, count: usize) -> Vec<Point> {
        let v = t.vertices();
        (0..count)
            .map(|i| {
                let a = 0.1 + 0.8 * ((i as f64 * 0.618_033_988_7) % 1.0);
                let b = (1.0 - a) * (0.1 + 0.8 * ((i as f64 * 0.414_213_562_3) % 1.0));
                let c = 1.0 - a - b;
                [
                    a * v[0][0] + b * v[1][0] + c * v[2][0],
                    a * v[0][1] + b * v[1][1] + c * v[2][1],
                ]
            })
            .collect()
    }

    fn check_eigen_equation(mode: &ClosedFormMode, points: &[Point]) {
        let f = |p: Point| mode.value(p);
        let scale = points.iter().map(|&p| f(p).abs()).fold(0.0, f64::max);
        for &p in points {
            let lap = fd_laplacian(&f, p, 1e-4);
            let want = -mode.eigenvalue * f(p);
            assert!(
                (lap - want).abs() <= 1e-4 * mode.eigenvalue * scale,
                "{:?} at {p:?}: Δu = {lap}, −μu = {want}",
                mode.label
            );
            let g = mode.gradient(p);
            let gf = fd_gradient(&f, p, 1e-6);
            assert!((g[0] - gf[0]).abs() < 1e-6 * mode.eigenvalue.sqrt() * scale);
            assert!((g[1] - gf[1]).abs() < 1e-6 * mode.eigenvalue.sqrt() * scale);
        }
    }

    #[test]
    fn equilateral_eigenvalue_value() {
        assert!((equilateral_eigenvalue() - 17.5460).abs() < 1e-4);
        let m = equilateral_modes();
        assert_eq!(m.u1.eigenvalue, m.u2.eigenvalue);
    }

    #[test]
    fn equilateral_pde_and_symmetry() {
        let m = equilateral_modes();
        let pts = interior_points(&equilateral_e(), 20);
        check_eigen_equation(&m.u1, &pts);
        check_eigen_equation(&m.u2, &pts);
        for &p in &pts {
            let q = [1.0 - p[0], p[1]];
            assert!((m.u1.value(q) + m.u1.value(p)).abs() < 1e-12);
            assert!((m.u2.value(q) - m.u2.value(p)).abs() < 1e-12);
        }
        for i in 0..10 {
            let y = i as f64 * 0.08;
            assert!(m.u1.value([0.5, y]).abs() < 1e-15);
        }
        // Centroid: 1 − 2cos(π/3) = 0.
        assert!(m.u2.value([0.5, 3f64.sqrt() / 6.0]).abs() < 1e-15);
    }

    #[test]
    fn equilateral_neumann_condition() {
        // Normal derivative vanishes along all three sides.
        let m = equilateral_modes();
        let s3 = 3f64.sqrt();
        let normals = [[0.0, -1.0], [s3 / 2.0, 0.5], [-s3 / 2.0, 0.5]];
        let on_side = |k: usize, s: f64| match k {
            0 => [s, 0.0],
            1 => [1.0 - 0.5 * s, s3 / 2.0 * s],
            _ => [0.5 * s, s3 / 2.0 * s],
        };
        for mode in [m.u1, m.u2] {
            for (k, n) in normals.iter().enumerate() {
                for i in 1..10 {
                    let g = mode.gradient(on_side(k, i as f64 / 10.0));
                    assert!((g[0] * n[0] + g[1] * n[1]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn equilateral_frame_maps_to_canonical() {
        let frame = equilateral_frame();
        let canon = IsoscelesSpec::unit(FRAC_PI_3).unwrap().vertices();
        let e = equilateral_e().vertices();
        for (src, dst) in [(e[2], canon[0]), (e[0], canon[1]), (e[1], canon[2])] {
            let q = frame.apply(src);
            assert!((q[0] - dst[0]).abs() < 1e-15 && (q[1] - dst[1]).abs() < 1e-15);
        }
        // u₂ is symmetric about the canonical axis, u₁ antisymmetric.
        let m = equilateral_modes();
        for &p in &[[0.3, 0.1], [0.6, -0.2], [0.8, 0.35]] {
            let q = [p[0], -p[1]];
            assert!((m.u2.value_canonical(p) - m.u2.value_canonical(q)).abs() < 1e-12);
            assert!((m.u1.value_canonical(p) + m.u1.value_canonical(q)).abs() < 1e-12);
        }
    }

    #[test]
    fn integral_table_by_quadrature() {
        let exact = equilateral_integrals();
        assert!((exact.norm2 - 0.649519).abs() < 1e-6);
        assert!((exact.u1x2 - 10.08254).abs() < 1e-4);
        assert!((exact.u2_ratio() - 0.130).abs() < 5e-4);
        let q = equilateral_integrals_quadrature(8);
        for (a, b) in [
            (q.norm2, exact.norm2),
            (q.u1x2, exact.u1x2),
            (q.u1y2, exact.u1y2),
            (q.u2x2, exact.u2x2),
            (q.u2y2, exact.u2y2),
        ] {
            assert!((a - b).abs() <= 1e-10 * b, "{a} vs {b}");
        }
        let rayleigh = (exact.u1x2 + exact.u1y2) / exact.norm2;
        assert!((rayleigh - equilateral_eigenvalue()).abs() < 1e-12);
    }

    #[test]
    fn equilateral_orthogonality_and_mean() {
        let m = equilateral_modes();
        let [cross, mean1, mean2] = quadrature::integrate(&equilateral_e(), 8, |p| {
            [m.u1.value(p) * m.u2.value(p), m.u1.value(p), m.u2.value(p)]
        });
        assert!(cross.abs() < 1e-10 && mean1.abs() < 1e-10 && mean2.abs() < 1e-10);
    }

    #[test]
    fn sector_mode() {
        let m = sector_neumann_mode(PI / 6.0, 1.0).unwrap();
        assert!((m.eigenvalue - 14.682).abs() < 1e-3);
        let m2 = sector_neumann_mode(PI / 6.0, 2.0).unwrap();
        assert!((m2.eigenvalue - m.eigenvalue / 4.0).abs() < 1e-14);
        assert!(sector_neumann_mode(PI / 2.68, 1.0).is_err());
        assert!(sector_neumann_mode(1.5, 1.0).is_err());
        // Neumann at the arc: J_0'(j11) = −J_1(j11) = 0.
        assert!(j1(j11()).abs() <= 1e-12);
        let pts: Vec<Point> = (1..20)
            .map(|i| {
                let r = 0.05 * i as f64;
                let th = 0.2 * ((i as f64 * 0.7).sin());
                [r * th.cos(), r * th.sin()]
            })
            .collect();
        check_eigen_equation(&m, &pts);
        let ri = sector_rayleigh(&m).unwrap();
        assert!(ri.mean.abs() < 1e-10 * ri.norm2.sqrt());
        assert!((ri.quotient() - m.eigenvalue).abs() < 1e-8 * m.eigenvalue);
    }

    #[test]
    fn right_isosceles_mode() {
        let m = right_isosceles_symmetric_mode();
        assert!((m.eigenvalue - 19.7392).abs() < 1e-4);
        let t = m.triangle().unwrap();
        let pts = interior_points(&t, 20);
        check_eigen_equation(&m, &pts);
        for &p in &pts {
            assert!((m.value(p) - m.value([p[0], -p[1]])).abs() <= 1e-12);
        }
        let ri = rayleigh_on_triangle(&t, 8, |p| m.value(p), |p| m.gradient(p));
        assert!(ri.mean.abs() < 1e-10 * ri.norm2.sqrt());
        assert!((ri.quotient() - m.eigenvalue).abs() < 1e-8 * m.eigenvalue);
    }

    #[test]
    fn quadrature_rayleigh_identity_equilateral() {
        let m = equilateral_modes();
        let e = equilateral_e();
        for mode in [m.u1, m.u2] {
            let ri = rayleigh_on_triangle(&e, 4, |p| mode.value(p), |p| mode.gradient(p));
            let fine = rayleigh_on_triangle(&e, 8, |p| mode.value(p), |p| mode.gradient(p));
            assert!((fine.quotient() - ri.quotient()).abs() < 1e-10);
            assert!((fine.quotient() - mode.eigenvalue).abs() < 1e-8 * mode.eigenvalue);
        }
    }

    #[test]
    fn interval_tones() {
        assert!((interval_neumann_tone(PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((interval_neumann_tone(1.0).unwrap() - PI * PI).abs() < 1e-13);
        let gx = 0.37;
        assert!((interval_neumann_tone(2.0 * gx).unwrap() - (PI / (2.0 * gx)).powi(2)).abs() < 1e-12);
        assert!(interval_neumann_tone(0.0).is_err());
        let m = interval_mode(2.0).unwrap();
        assert!(m.gradient([2.0, 0.0])[0].abs() < 1e-15);
    }

    #[test]
    fn dirichlet_arc_tone() {
        assert!((sector_dirichlet_arc_tone(1.0).unwrap() - 5.7832).abs() < 1e-4);
        let t1 = sector_dirichlet_arc_tone(1.0).unwrap();
        assert!((sector_dirichlet_arc_tone(2.0).unwrap() - t1 / 4.0).abs() < 1e-14);
        let m = sector_dirichlet_arc_mode([0.3, 0.4], 1.5).unwrap();
        assert!(m.value([0.3 + 1.5, 0.4]).abs() < 1e-12);
        assert!(m.value([0.3, 0.4 - 1.5]).abs() < 1e-12);
    }

    #[test]
    fn scaling_law() {
        for &l in &[0.5, 1.0, 3.0] {
            let s = sector_neumann_mode(0.4, l).unwrap().eigenvalue;
            assert!((s * l * l - j11().powi(2)).abs() < 1e-12);
            let a = sector_dirichlet_arc_tone(l).unwrap();
            assert!((a * l * l - j01().powi(2)).abs() < 1e-12);
            let c = cheng_trial_function(2.0, l).unwrap().rayleigh_value;
            let d = 2.0 * l * (1.0f64).sin();
            assert!((c * d * d - 4.0 * j01().powi(2)).abs() < 1e-11);
        }
    }

    #[test]
    fn cheng_structure() {
        let c = cheng_trial_function(2.0, 1.0).unwrap();
        let d = c.spec.diameter();
        assert!((c.rayleigh_value * d * d - 4.0 * j01().powi(2)).abs() < 1e-12);
        assert!((4.0 * j01().powi(2) - 23.1).abs() < 0.05);
        for i in 0..20 {
            let x = c.spec.height() * i as f64 / 20.0;
            assert_eq!(c.value([x, 0.0]), 0.0);
            let p = [x, 0.3 * x];
            assert!((c.value(p) + c.value([p[0], -p[1]])).abs() < 1e-15);
        }
        assert!(cheng_trial_function(1.0, 1.0).is_err());
    }

    #[test]
    fn cheng_rayleigh_by_quadrature() {
        let c = cheng_trial_function(2.0, 1.0).unwrap();
        let ri = c.rayleigh_by_quadrature(16);
        assert!(ri.mean.abs() < 1e-12);
        assert!(
            (ri.quotient() - c.rayleigh_value).abs() < 1e-6 * c.rayleigh_value,
            "{} vs {}",
            ri.quotient(),
            c.rayleigh_value
        );
    }
}
