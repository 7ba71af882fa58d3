//! Numerical integration over triangles.
//!
//! The base rule is a fully symmetric triangle rule exact for polynomials of
//! degree 12: the collapsed (Duffy) product of two 7-point Gauss–Legendre
//! rules, averaged over the six permutations of barycentric coordinates.
//! It is applied on a uniform `n²` subdivision, with the `2n` subdivision as
//! the error estimate. Integrals of functions supported on disks are taken in
//! polar coordinates about the disk center, so the circular edge of the
//! support is resolved exactly.

use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use crate::geometry::{Point, Triangle};

/// Polynomial degree integrated exactly by [`TriangleRule::degree12`].
pub const RULE_DEGREE: usize = 12;

/// Points in barycentric coordinates; weights sum to one.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    points: Vec<([f64; 3], f64)>,
}

fn gauss_legendre_unit(order: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(order)
        .expect("order >= 2")
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect()
}

impl TriangleRule {
    pub fn degree12() -> &'static TriangleRule {
        static RULE: OnceLock<TriangleRule> = OnceLock::new();
        RULE.get_or_init(|| {
            let gl = gauss_legendre_unit(7);
            let mut base = Vec::with_capacity(gl.len() * gl.len());
            for &(u, wu) in &gl {
                for &(v, wv) in &gl {
                    // (x, y) = (u, (1-u) v) on the reference triangle of area 1/2.
                    let x = u;
                    let y = (1.0 - u) * v;
                    let w = 2.0 * wu * wv * (1.0 - u);
                    base.push(([1.0 - x - y, x, y], w));
                }
            }
            const PERMS: [[usize; 3]; 6] = [
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ];
            let points = PERMS
                .iter()
                .flat_map(|p| {
                    base.iter()
                        .map(move |&(b, w)| ([b[p[0]], b[p[1]], b[p[2]]], w / 6.0))
                })
                .collect();
            TriangleRule { points }
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[([f64; 3], f64)] {
        &self.points
    }

    /// Applies the rule on a single triangle given by its vertices.
    pub fn apply<const N: usize, F>(&self, v: &[Point; 3], f: &F) -> [f64; N]
    where
        F: Fn(Point) -> [f64; N],
    {
        let area = 0.5
            * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]))
                .abs();
        let mut acc = [0.0; N];
        for &(b, w) in &self.points {
            let p = [
                b[0] * v[0][0] + b[1] * v[1][0] + b[2] * v[2][0],
                b[0] * v[0][1] + b[1] * v[1][1] + b[2] * v[2][1],
            ];
            let val = f(p);
            for k in 0..N {
                acc[k] += w * val[k];
            }
        }
        acc.map(|a| a * area)
    }
}

/// Vertices of the `n²` congruent subtriangles of a uniform subdivision.
pub fn subdivide(t: &Triangle, n: usize) -> Vec<[Point; 3]> {
    let [a, b, c] = t.vertices();
    let nf = n as f64;
    let at = |i: usize, j: usize| {
        let (s, r) = (i as f64 / nf, j as f64 / nf);
        [
            a[0] + s * (b[0] - a[0]) + r * (c[0] - a[0]),
            a[1] + s * (b[1] - a[1]) + r * (c[1] - a[1]),
        ]
    };
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n - j {
            cells.push([at(i, j), at(i + 1, j), at(i, j + 1)]);
            if i + j + 1 < n {
                cells.push([at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
    }
    cells
}

/// `∫_t f dA` for vector-valued `f`, with the degree-12 rule on an `n²` subdivision.
pub fn integrate<const N: usize, F>(t: &Triangle, n: usize, f: F) -> [f64; N]
where
    F: Fn(Point) -> [f64; N],
{
    let rule = TriangleRule::degree12();
    let mut acc = [0.0; N];
    for cell in subdivide(t, n.max(1)) {
        let v = rule.apply(&cell, &f);
        for k in 0..N {
            acc[k] += v[k];
        }
    }
    acc
}

pub fn integrate_scalar<F: Fn(Point) -> f64>(t: &Triangle, n: usize, f: F) -> f64 {
    integrate(t, n, |p| [f(p)])[0]
}

/// An integral with the difference to the next refinement as error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
}

/// Integrates at subdivision `n` and `2n`; reports the finer value.
pub fn integrate_with_estimate<const N: usize, F>(t: &Triangle, n: usize, f: F) -> Estimate<N>
where
    F: Fn(Point) -> [f64; N],
{
    let coarse = integrate(t, n, &f);
    let fine = integrate(t, 2 * n, &f);
    let mut error = [0.0; N];
    for k in 0..N {
        error[k] = (fine[k] - coarse[k]).abs();
    }
    Estimate { value: fine, error }
}

/// `∫_{r<radius, φ0<φ<φ1} f dA` in polar coordinates about `center`.
pub fn integrate_polar_sector<const N: usize, F>(
    center: Point,
    radius: f64,
    phi0: f64,
    phi1: f64,
    f: F,
) -> [f64; N]
where
    F: Fn(Point) -> [f64; N],
{
    polar_region(center, phi0, phi1, &|_| (0.0, radius), &f)
}

const POLAR_ORDER: usize = 20;

fn polar_region<const N: usize, F, L>(
    center: Point,
    phi0: f64,
    phi1: f64,
    limits: &L,
    f: &F,
) -> [f64; N]
where
    F: Fn(Point) -> [f64; N],
    L: Fn(f64) -> (f64, f64),
{
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let gl = NODES.get_or_init(|| gauss_legendre_unit(POLAR_ORDER));
    let mut acc = [0.0; N];
    let dphi = phi1 - phi0;
    if dphi <= 0.0 {
        return acc;
    }
    for &(s, ws) in gl {
        let phi = phi0 + s * dphi;
        let (r0, r1) = limits(phi);
        if r1 <= r0 {
            continue;
        }
        let (sn, cs) = phi.sin_cos();
        let dr = r1 - r0;
        for &(t, wt) in gl {
            let r = r0 + t * dr;
            let val = f([center[0] + r * cs, center[1] + r * sn]);
            let w = ws * dphi * wt * dr * r;
            for k in 0..N {
                acc[k] += w * val[k];
            }
        }
    }
    acc
}

/// Radial interval `[r_in, r_out]` of the ray from `c` in direction `phi`
/// inside the triangle `v` (Cyrus–Beck clipping). Empty if `r_out <= r_in`.
fn ray_interval(v: &[Point; 3], c: Point, phi: f64) -> (f64, f64) {
    let d = [phi.cos(), phi.sin()];
    let orient = ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1])
        - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]))
        .signum();
    let mut lo: f64 = 0.0;
    let mut hi = f64::INFINITY;
    for i in 0..3 {
        let a = v[i];
        let b = v[(i + 1) % 3];
        // Inward normal for the given orientation.
        let n = [-(b[1] - a[1]) * orient, (b[0] - a[0]) * orient];
        let num = n[0] * (c[0] - a[0]) + n[1] * (c[1] - a[1]);
        let den = n[0] * d[0] + n[1] * d[1];
        if den.abs() < 1e-300 {
            if num < 0.0 {
                return (0.0, 0.0);
            }
            continue;
        }
        let r = -num / den;
        if den > 0.0 {
            lo = lo.max(r);
        } else {
            hi = hi.min(r);
        }
    }
    (lo, hi)
}

/// `∫_{v ∩ D(center, radius)} f dA`, exact up to the Gauss rules in `r`, `φ`.
pub fn integrate_triangle_disk<const N: usize, F>(
    v: &[Point; 3],
    center: Point,
    radius: f64,
    f: F,
) -> [f64; N]
where
    F: Fn(Point) -> [f64; N],
{
    let scale = (0..3)
        .map(|i| (v[i][0] - center[0]).hypot(v[i][1] - center[1]))
        .fold(0.0, f64::max);
    let eps = 1e-14 * scale.max(radius);
    let centroid = [
        (v[0][0] + v[1][0] + v[2][0]) / 3.0,
        (v[0][1] + v[1][1] + v[2][1]) / 3.0,
    ];
    let reference = (centroid[1] - center[1]).atan2(centroid[0] - center[0]);
    let rel = |p: Point| {
        let a = (p[1] - center[1]).atan2(p[0] - center[0]) - reference;
        (a + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI
    };

    let inside = {
        let orient = |a: Point, b: Point| {
            (b[0] - a[0]) * (center[1] - a[1]) - (b[1] - a[1]) * (center[0] - a[0])
        };
        let s = [orient(v[0], v[1]), orient(v[1], v[2]), orient(v[2], v[0])];
        s.iter().all(|&x| x > eps * scale) || s.iter().all(|&x| x < -eps * scale)
    };

    let mut breaks: Vec<f64> = Vec::new();
    for p in v {
        if (p[0] - center[0]).hypot(p[1] - center[1]) > eps {
            breaks.push(rel(*p));
        }
    }
    let (lo, hi) = if inside {
        (-std::f64::consts::PI, std::f64::consts::PI)
    } else {
        let lo = breaks.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = breaks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    // Edge–circle intersections.
    for i in 0..3 {
        let a = v[i];
        let b = v[(i + 1) % 3];
        let d = [b[0] - a[0], b[1] - a[1]];
        let m = [a[0] - center[0], a[1] - center[1]];
        let qa = d[0] * d[0] + d[1] * d[1];
        let qb = 2.0 * (m[0] * d[0] + m[1] * d[1]);
        let qc = m[0] * m[0] + m[1] * m[1] - radius * radius;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if t > 0.0 && t < 1.0 {
                breaks.push(rel([a[0] + t * d[0], a[1] + t * d[1]]));
            }
        }
    }
    breaks.push(lo);
    breaks.push(hi);
    breaks.retain(|&b| b >= lo && b <= hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let limits = |phi: f64| {
        let (r0, r1) = ray_interval(v, center, phi);
        (r0.max(0.0), r1.min(radius))
    };
    let mut acc = [0.0; N];
    for w in breaks.windows(2) {
        let part = polar_region(center, w[0] + reference, w[1] + reference, &limits, &f);
        for k in 0..N {
            acc[k] += part[k];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn rule_is_symmetric_and_normalized() {
        let rule = TriangleRule::degree12();
        let total: f64 = rule.points().iter().map(|p| p.1).sum();
        assert!((total - 1.0).abs() < 1e-14);
        // Every permutation of each point is present with the same weight.
        for &(b, w) in rule.points() {
            let swapped = [b[1], b[0], b[2]];
            assert!(rule
                .points()
                .iter()
                .any(|&(c, v)| (v - w).abs() < 1e-16
                    && c.iter().zip(swapped.iter()).all(|(x, y)| (x - y).abs() < 1e-15)));
        }
    }

    #[test]
    fn exact_for_degree_12_monomials() {
        let t = Triangle::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        for a in 0..=12u32 {
            for b in 0..=(12 - a) {
                let got = integrate_scalar(&t, 1, |p| p[0].powi(a as i32) * p[1].powi(b as i32));
                let want = factorial(a) * factorial(b) / factorial(a + b + 2);
                assert!((got - want).abs() < 1e-15 * want.max(1e-3) * 10.0, "x^{a} y^{b}: {got} vs {want}");
            }
        }
        let deg14 = integrate_scalar(&t, 1, |p| p[0].powi(14));
        let want = factorial(14) / factorial(16);
        assert!((deg14 - want).abs() > 1e-15);
    }

    #[test]
    fn subdivision_preserves_area() {
        let t = Triangle::new([[0.1, 0.2], [1.3, -0.4], [0.7, 0.9]]).unwrap();
        for n in [1, 3, 8] {
            let cells = subdivide(&t, n);
            assert_eq!(cells.len(), n * n);
            let a = integrate_scalar(&t, n, |_| 1.0);
            assert!((a - t.area()).abs() < 1e-14);
        }
    }

    #[test]
    fn disk_clipped_area() {
        // Quarter disk of radius 0.5 inside the unit right triangle.
        let v = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let a = integrate_triangle_disk(&v, [0.0, 0.0], 0.5, |_| [1.0])[0];
        assert!((a - PI * 0.25 / 4.0).abs() < 1e-14, "{a}");
        // Disk fully inside.
        let big = [[-5.0, -5.0], [5.0, -5.0], [0.0, 5.0]];
        let a = integrate_triangle_disk(&big, [0.0, -1.0], 0.7, |_| [1.0])[0];
        assert!((a - PI * 0.49).abs() < 1e-13, "{a}");
        // Triangle fully inside the disk.
        let small = [[0.1, 0.1], [0.2, 0.1], [0.1, 0.25]];
        let a = integrate_triangle_disk(&small, [0.0, 0.0], 10.0, |_| [1.0])[0];
        assert!((a - 0.5 * 0.1 * 0.15).abs() < 1e-15);
        // Circle cutting through an edge: x-moment of the part of a triangle
        // within radius 1 of a far vertex, against a fine uniform rule.
        let t = Triangle::new([[0.0, 0.0], [2.0, 0.0], [0.0, 1.5]]).unwrap();
        let exact = integrate_triangle_disk(&t.vertices(), [2.0, 0.0], 1.0, |p| [p[0] * p[1]])[0];
        let brute = integrate_scalar(&t, 400, |p| {
            if (p[0] - 2.0).hypot(p[1]) < 1.0 {
                p[0] * p[1]
            } else {
                0.0
            }
        });
        assert!((exact - brute).abs() < 1e-5, "{exact} vs {brute}");
    }

    #[test]
    fn polar_sector_area() {
        let a = integrate_polar_sector([0.0, 0.0], 2.0, -0.3, 0.3, |_| [1.0])[0];
        assert!((a - 0.6 * 2.0).abs() < 1e-14);
    }
}
