//! Triangles, isosceles triangles in canonical pose, and the maps between
//! them: the diagonal map between two isosceles triangles, the radial map
//! from a sector onto an isosceles triangle, and the perpendicular stretch.
//!
//! Canonical pose for an isosceles triangle of aperture `α` and leg `l`: apex
//! at the origin, symmetric about the positive x-axis,
//! `T(α) = {0 < x < l cos(α/2), |y| < x tan(α/2)}`.

use std::f64::consts::{FRAC_PI_3, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Angle tolerance used by [`classify`].
pub const ANGLE_TOL: f64 = 1e-9;
/// Smallest aperture accepted by constructors that feed the FEM solver.
pub const FEM_MIN_APERTURE: f64 = 1e-4;

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dist(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    d[0].hypot(d[1])
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// A non-degenerate planar triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[Point; 3]", into = "[Point; 3]")]
pub struct Triangle {
    vertices: [Point; 3],
}

impl TryFrom<[Point; 3]> for Triangle {
    type Error = Error;
    fn try_from(v: [Point; 3]) -> Result<Self> {
        Triangle::new(v)
    }
}

impl From<Triangle> for [Point; 3] {
    fn from(t: Triangle) -> Self {
        t.vertices
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScalars {
    /// Diameter (longest side).
    pub d: f64,
    /// Perimeter.
    pub l: f64,
    /// Area.
    pub a: f64,
    /// Sum of squared side lengths.
    pub s2: f64,
}

impl Triangle {
    /// Rejects triangles whose area is below `1e-14·D²`.
    pub fn new(vertices: [Point; 3]) -> Result<Self> {
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Degenerate("non-finite vertex coordinate".into()));
        }
        let t = Triangle { vertices };
        let d = t.diameter();
        let area = t.signed_area().abs();
        if !(area > 1e-14 * d * d) {
            return Err(Error::Degenerate(format!(
                "area {area:.3e} too small for diameter {d:.3e}"
            )));
        }
        Ok(t)
    }

    /// Parses six comma-separated coordinates `x0,y0,x1,y1,x2,y2`.
    pub fn from_flat(coords: &[f64]) -> Result<Self> {
        if coords.len() != 6 {
            return Err(Error::InvalidArgument(format!(
                "expected 6 coordinates, got {}",
                coords.len()
            )));
        }
        Triangle::new([
            [coords[0], coords[1]],
            [coords[2], coords[3]],
            [coords[4], coords[5]],
        ])
    }

    pub fn vertices(&self) -> [Point; 3] {
        self.vertices
    }

    pub fn signed_area(&self) -> f64 {
        let [a, b, c] = self.vertices;
        0.5 * cross(sub(b, a), sub(c, a))
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Same triangle with counterclockwise vertex order.
    pub fn ccw(&self) -> Triangle {
        if self.signed_area() > 0.0 {
            *self
        } else {
            let [a, b, c] = self.vertices;
            Triangle { vertices: [a, c, b] }
        }
    }

    /// Length of the side opposite vertex `i`.
    pub fn side_opposite(&self, i: usize) -> f64 {
        dist(self.vertices[(i + 1) % 3], self.vertices[(i + 2) % 3])
    }

    /// Side lengths sorted `l₁ ≥ l₂ ≥ l₃`.
    pub fn sides_sorted(&self) -> [f64; 3] {
        let mut s = [0, 1, 2].map(|i| self.side_opposite(i));
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn diameter(&self) -> f64 {
        (0..3).map(|i| self.side_opposite(i)).fold(0.0, f64::max)
    }

    pub fn perimeter(&self) -> f64 {
        (0..3).map(|i| self.side_opposite(i)).sum()
    }

    pub fn derived_scalars(&self) -> DerivedScalars {
        let s = self.sides_sorted();
        DerivedScalars {
            d: s[0],
            l: s.iter().sum(),
            a: self.area(),
            s2: s.iter().map(|x| x * x).sum(),
        }
    }

    /// Interior angle at vertex `i`.
    pub fn angle(&self, i: usize) -> f64 {
        let p = self.vertices[i];
        let u = sub(self.vertices[(i + 1) % 3], p);
        let v = sub(self.vertices[(i + 2) % 3], p);
        cross(u, v).abs().atan2(dot(u, v))
    }

    pub fn angles(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.angle(i))
    }

    pub fn max_angle(&self) -> f64 {
        self.angles().into_iter().fold(0.0, f64::max)
    }

    pub fn map_points<F: Fn(Point) -> Point>(&self, f: F) -> Result<Triangle> {
        Triangle::new(self.vertices.map(f))
    }

    pub fn scaled(&self, factor: f64) -> Result<Triangle> {
        self.map_points(|p| [p[0] * factor, p[1] * factor])
    }

    /// Stretch by `factor` in the y direction.
    pub fn stretched_y(&self, factor: f64) -> Result<Triangle> {
        self.map_points(|p| [p[0], p[1] * factor])
    }

    /// Isosceles description and the rigid motion carrying this triangle to
    /// canonical pose, when two angles agree within [`ANGLE_TOL`].
    pub fn as_isosceles(&self) -> Option<(IsoscelesSpec, RigidMotion)> {
        let ang = self.angles();
        let apex = (0..3).find(|&i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            (ang[j] - ang[k]).abs() <= ANGLE_TOL
        })?;
        let p = self.vertices[apex];
        let b = self.vertices[(apex + 1) % 3];
        let c = self.vertices[(apex + 2) % 3];
        let leg = 0.5 * (dist(p, b) + dist(p, c));
        let spec = IsoscelesSpec {
            aperture: ang[apex],
            leg,
        };
        // Axis direction: apex towards base midpoint.
        let mid = [0.5 * (b[0] + c[0]), 0.5 * (b[1] + c[1])];
        let axis = sub(mid, p);
        let theta = axis[1].atan2(axis[0]);
        let rotate = RigidMotion {
            rotation: -theta,
            translation: [0.0, 0.0],
            reflect: false,
        };
        let motion = RigidMotion {
            translation: rotate.apply([-p[0], -p[1]]),
            ..rotate
        };
        Some((spec, motion))
    }
}

/// `x ↦ R(rotation)·F·x + translation`, with `F` the reflection `y ↦ −y`
/// when `reflect` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion {
    pub rotation: f64,
    pub translation: Point,
    pub reflect: bool,
}

impl RigidMotion {
    pub const IDENTITY: RigidMotion = RigidMotion {
        rotation: 0.0,
        translation: [0.0, 0.0],
        reflect: false,
    };

    pub fn apply(&self, p: Point) -> Point {
        let q = if self.reflect { [p[0], -p[1]] } else { p };
        let (s, c) = self.rotation.sin_cos();
        [
            c * q[0] - s * q[1] + self.translation[0],
            s * q[0] + c * q[1] + self.translation[1],
        ]
    }

    pub fn inverse_apply(&self, p: Point) -> Point {
        let q = sub(p, self.translation);
        let (s, c) = self.rotation.sin_cos();
        let r = [c * q[0] + s * q[1], -s * q[0] + c * q[1]];
        if self.reflect {
            [r[0], -r[1]]
        } else {
            r
        }
    }

    /// Rotates a gradient (covector) computed in the source frame into the target frame.
    pub fn apply_vector(&self, v: Point) -> Point {
        let q = if self.reflect { [v[0], -v[1]] } else { v };
        let (s, c) = self.rotation.sin_cos();
        [c * q[0] - s * q[1], s * q[0] + c * q[1]]
    }
}

/// An isosceles triangle `T(α)` with aperture `α` and equal sides `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoscelesSpec {
    /// Radians, in `(0, π)`.
    pub aperture: f64,
    pub leg: f64,
}

impl IsoscelesSpec {
    pub fn new(aperture: f64, leg: f64) -> Result<Self> {
        if !(aperture > 0.0 && aperture < PI) {
            return Err(Error::Domain(format!("aperture {aperture} not in (0, π)")));
        }
        if !(leg > 0.0 && leg.is_finite()) {
            return Err(Error::Domain(format!("leg {leg} must be positive")));
        }
        Ok(IsoscelesSpec { aperture, leg })
    }

    /// As [`IsoscelesSpec::new`], additionally rejecting needle apertures
    /// outside `[1e-4, π − 1e-4]`.
    pub fn new_for_fem(aperture: f64, leg: f64) -> Result<Self> {
        if !(FEM_MIN_APERTURE..=PI - FEM_MIN_APERTURE).contains(&aperture) {
            return Err(Error::Domain(format!(
                "aperture {aperture} outside the meshable range [{FEM_MIN_APERTURE}, π − {FEM_MIN_APERTURE}]"
            )));
        }
        Self::new(aperture, leg)
    }

    pub fn unit(aperture: f64) -> Result<Self> {
        Self::new(aperture, 1.0)
    }

    /// Width `l cos(α/2)` along the axis.
    pub fn height(&self) -> f64 {
        self.leg * (0.5 * self.aperture).cos()
    }

    /// Half-length `l sin(α/2)` of the side opposite the apex.
    pub fn half_base(&self) -> f64 {
        self.leg * (0.5 * self.aperture).sin()
    }

    pub fn diameter(&self) -> f64 {
        if self.aperture <= FRAC_PI_3 {
            self.leg
        } else {
            2.0 * self.half_base()
        }
    }

    /// Vertices `[apex, lower, upper]` in canonical pose (counterclockwise).
    pub fn vertices(&self) -> [Point; 3] {
        let (h, w) = (self.height(), self.half_base());
        [[0.0, 0.0], [h, -w], [h, w]]
    }

    pub fn triangle(&self) -> Triangle {
        Triangle::new(self.vertices()).expect("valid aperture gives a non-degenerate triangle")
    }

    /// Upper half `U(α)`: `[apex, base midpoint, upper vertex]` (counterclockwise).
    /// The symmetry axis is the edge from vertex 0 to vertex 1.
    pub fn upper_half(&self) -> Triangle {
        let (h, w) = (self.height(), self.half_base());
        Triangle::new([[0.0, 0.0], [h, 0.0], [h, w]]).expect("non-degenerate half triangle")
    }

    pub fn class(&self) -> TriangleClass {
        classify_aperture(self.aperture)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleClass {
    Subequilateral,
    Equilateral,
    Superequilateral,
    ScaleneOrOtherIsosceles,
}

fn classify_aperture(aperture: f64) -> TriangleClass {
    if (aperture - FRAC_PI_3).abs() <= ANGLE_TOL {
        TriangleClass::Equilateral
    } else if aperture < FRAC_PI_3 {
        TriangleClass::Subequilateral
    } else {
        TriangleClass::Superequilateral
    }
}

pub fn classify(t: &Triangle) -> TriangleClass {
    let ang = t.angles();
    if ang.iter().all(|a| (a - FRAC_PI_3).abs() <= ANGLE_TOL) {
        return TriangleClass::Equilateral;
    }
    match t.as_isosceles() {
        Some((spec, _)) => classify_aperture(spec.aperture),
        None => TriangleClass::ScaleneOrOtherIsosceles,
    }
}

/// The diagonal map `τ(x,y) = (x cos(β/2)/cos(α/2), y sin(β/2)/sin(α/2))`
/// carrying `T(α)` onto `T(β)` (equal legs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalMap {
    pub sx: f64,
    pub sy: f64,
}

impl DiagonalMap {
    pub fn apply(&self, p: Point) -> Point {
        [self.sx * p[0], self.sy * p[1]]
    }

    pub fn inverse(&self) -> DiagonalMap {
        DiagonalMap {
            sx: 1.0 / self.sx,
            sy: 1.0 / self.sy,
        }
    }

    pub fn compose(&self, then: &DiagonalMap) -> DiagonalMap {
        DiagonalMap {
            sx: self.sx * then.sx,
            sy: self.sy * then.sy,
        }
    }

    pub fn jacobian(&self) -> f64 {
        self.sx * self.sy
    }
}

pub fn tau_map(alpha: f64, beta: f64) -> Result<DiagonalMap> {
    for a in [alpha, beta] {
        if !(a > 0.0 && a < PI) {
            return Err(Error::Domain(format!("aperture {a} not in (0, π)")));
        }
    }
    Ok(DiagonalMap {
        sx: (0.5 * beta).cos() / (0.5 * alpha).cos(),
        sy: (0.5 * beta).sin() / (0.5 * alpha).sin(),
    })
}

/// `σ(r,θ) = (r ρ(θ), θ)` with `ρ(θ) = cos(α/2)/cos θ`, mapping the sector
/// `S(α)` of radius `l` onto `T(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialMap {
    pub alpha: f64,
    pub leg: f64,
}

impl RadialMap {
    pub fn rho(&self, theta: f64) -> f64 {
        (0.5 * self.alpha).cos() / theta.cos()
    }

    /// `ρ'(θ)/ρ(θ) = tan θ`.
    pub fn log_derivative(&self, theta: f64) -> f64 {
        theta.tan()
    }

    /// Polar `(r, θ)` on the sector to polar coordinates on the triangle.
    pub fn forward(&self, r: f64, theta: f64) -> (f64, f64) {
        (r * self.rho(theta), theta)
    }

    pub fn inverse(&self, r: f64, theta: f64) -> (f64, f64) {
        (r / self.rho(theta), theta)
    }

    /// Cartesian version of [`RadialMap::forward`].
    pub fn forward_xy(&self, p: Point) -> Point {
        let (r, th) = (p[0].hypot(p[1]), p[1].atan2(p[0]));
        let (r2, th2) = self.forward(r, th);
        [r2 * th2.cos(), r2 * th2.sin()]
    }

    pub fn inverse_xy(&self, p: Point) -> Point {
        let (r, th) = (p[0].hypot(p[1]), p[1].atan2(p[0]));
        let (r2, th2) = self.inverse(r, th);
        [r2 * th2.cos(), r2 * th2.sin()]
    }
}

pub fn sigma_map(alpha: f64, leg: f64) -> Result<RadialMap> {
    IsoscelesSpec::new(alpha, leg)?;
    Ok(RadialMap { alpha, leg })
}

/// Result of stretching perpendicular to the longest side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stretched {
    /// `[(0,0), (D,0), apex]` after normalization and stretching.
    pub triangle: Triangle,
    /// The stretch factor `t ≥ 1`.
    pub factor: f64,
    /// The input triangle in the same normalized frame, before stretching.
    pub normalized: Triangle,
}

/// Stretches perpendicular to the longest side until a second side reaches
/// the diameter. The longest side is placed on `[0,D]×{0}` with the apex foot
/// `a ≥ D/2` (reflecting across `x = D/2` if needed) and the apex above the axis.
pub fn stretch_to_isosceles(t: &Triangle) -> Stretched {
    let v = t.vertices();
    let longest = (0..3)
        .max_by(|&i, &j| t.side_opposite(i).total_cmp(&t.side_opposite(j)))
        .expect("three sides");
    let apex = v[longest];
    let mut p = v[(longest + 1) % 3];
    let mut q = v[(longest + 2) % 3];
    let d = dist(p, q);
    let e = sub(q, p);
    let mut a = dot(sub(apex, p), e) / d;
    if a < 0.5 * d {
        std::mem::swap(&mut p, &mut q);
        a = d - a;
    }
    let b = (cross(sub(q, p), sub(apex, p)) / d).abs();
    let h = (d * d - a * a).max(0.0).sqrt();
    let factor = (h / b).max(1.0);
    let normalized =
        Triangle::new([[0.0, 0.0], [d, 0.0], [a, b]]).expect("input is non-degenerate");
    let stretched_apex = if factor == 1.0 { [a, b] } else { [a, h] };
    let triangle =
        Triangle::new([[0.0, 0.0], [d, 0.0], stretched_apex]).expect("stretching keeps area positive");
    Stretched {
        triangle,
        factor,
        normalized,
    }
}

/// One bisect-and-stretch step: `sin(α'/2) = sin(α/2)/√2`.
pub fn bisect_stretch_step(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= FRAC_PI_3 + ANGLE_TOL) {
        return Err(Error::Domain(format!(
            "bisect-and-stretch needs 0 < α ≤ π/3, got {alpha}"
        )));
    }
    Ok(2.0 * ((0.5 * alpha).sin() / std::f64::consts::SQRT_2).asin())
}
