//! Structured triangle meshes.

use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geometry::{IsoscelesSpec, Point, Triangle};

pub const MAX_LEVEL: usize = 512;

/// Meshes whose largest angle exceeds a right angle by more than this are cut
/// along the altitude from the obtuse vertex.
const OBTUSE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub elements: Vec<[usize; 3]>,
    /// Vertices on the symmetry axis, when built from an isosceles description.
    pub axis_vertices: Vec<usize>,
    pub refinement_level: usize,
    /// Vertex permutation induced by reflection across the axis.
    pub mirror: Option<Vec<usize>>,
}

/// Vertex layout of a structured subdivision of `[v0, v1, v2]`: vertex `(i, j)`
/// sits at `v0 + (i/n)(v1 − v0) + (j/n)(v2 − v0)`, stored row by row in `j`.
struct Structured {
    n: usize,
    vertices: Vec<Point>,
    elements: Vec<[usize; 3]>,
}

fn row_offset(n: usize, j: usize) -> usize {
    j * (n + 1) - j * j.saturating_sub(1) / 2
}

impl Structured {
    fn new(v: [Point; 3], n: usize) -> Self {
        let nf = n as f64;
        let mut vertices = Vec::with_capacity((n + 1) * (n + 2) / 2);
        for j in 0..=n {
            for i in 0..=n - j {
                let (a, b) = (i as f64 / nf, j as f64 / nf);
                let c = 1.0 - a - b;
                vertices.push([
                    c * v[0][0] + a * v[1][0] + b * v[2][0],
                    c * v[0][1] + a * v[1][1] + b * v[2][1],
                ]);
            }
        }
        let idx = |i: usize, j: usize| row_offset(n, j) + i;
        let mut elements = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n - j {
                elements.push([idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
                if i + j + 1 < n {
                    elements.push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
                }
            }
        }
        let mut s = Structured {
            n,
            vertices,
            elements,
        };
        s.orient();
        s
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        row_offset(self.n, j) + i
    }

    fn orient(&mut self) {
        for e in &mut self.elements {
            if signed_area(&self.vertices, e) < 0.0 {
                e.swap(1, 2);
            }
        }
    }
}

fn signed_area(v: &[Point], e: &[usize; 3]) -> f64 {
    let (a, b, c) = (v[e[0]], v[e[1]], v[e[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn check_level(n: usize) -> Result<()> {
    if n == 0 || n > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "refinement level {n} outside 1..={MAX_LEVEL}"
        )));
    }
    Ok(())
}

/// Structured subdivision of `t` into `n²` congruent affine images of `t/n`.
pub fn build_mesh(t: &Triangle, n: usize) -> Result<Mesh> {
    check_level(n)?;
    let s = Structured::new(t.vertices(), n);
    Ok(Mesh {
        vertices: s.vertices,
        elements: s.elements,
        axis_vertices: Vec::new(),
        refinement_level: n,
        mirror: None,
    })
}

/// Structured mesh of `[apex, b, c]` with `|apex b| = |apex c|`: reflection
/// swaps the two barycentric indices.
fn symmetric_structured(apex: Point, b: Point, c: Point, n: usize) -> Mesh {
    let s = Structured::new([apex, b, c], n);
    let mut mirror = vec![0; s.vertices.len()];
    let mut axis = Vec::new();
    for j in 0..=n {
        for i in 0..=n - j {
            mirror[s.idx(i, j)] = s.idx(j, i);
            if i == j {
                axis.push(s.idx(i, j));
            }
        }
    }
    Mesh {
        vertices: s.vertices,
        elements: s.elements,
        axis_vertices: axis,
        refinement_level: n,
        mirror: Some(mirror),
    }
}

/// Two structured meshes of `[apex, foot, left]` and `[apex, foot, right]`
/// glued along the segment from `apex` to `foot`. Vertex `(i, j)` of one half
/// corresponds to vertex `(i, j)` of the other.
fn glued_pair(apex: Point, foot: Point, left: Point, right: Point, n: usize) -> Mesh {
    let upper = Structured::new([apex, foot, left], n);
    let lower = Structured::new([apex, foot, right], n);
    let mut vertices = upper.vertices.clone();
    let mut lower_to_global = vec![0; lower.vertices.len()];
    let mut mirror = vec![0; upper.vertices.len()];
    let mut axis = Vec::new();
    for j in 0..=n {
        for i in 0..=n - j {
            let u = upper.idx(i, j);
            let l = lower.idx(i, j);
            if j == 0 {
                lower_to_global[l] = u;
                axis.push(u);
            } else {
                lower_to_global[l] = vertices.len();
                vertices.push(lower.vertices[l]);
            }
        }
    }
    mirror.resize(vertices.len(), 0);
    for j in 0..=n {
        for i in 0..=n - j {
            let u = upper.idx(i, j);
            let l = lower_to_global[lower.idx(i, j)];
            mirror[u] = l;
            mirror[l] = u;
        }
    }
    let mut elements = upper.elements;
    elements.extend(
        lower
            .elements
            .iter()
            .map(|e| [lower_to_global[e[0]], lower_to_global[e[1]], lower_to_global[e[2]]]),
    );
    let mut mesh = Mesh {
        vertices,
        elements,
        axis_vertices: axis,
        refinement_level: n,
        mirror: Some(mirror),
    };
    mesh.orient();
    mesh
}

/// Mesh of the isosceles triangle in canonical pose, reflection compatible.
/// Apertures up to a right angle use the structured subdivision; larger ones
/// are cut along the axis into two mirrored right-angled halves.
pub fn build_isosceles_mesh(spec: &IsoscelesSpec, n: usize) -> Result<Mesh> {
    check_level(n)?;
    let [apex, b, c] = spec.vertices();
    Ok(if spec.aperture <= FRAC_PI_2 + OBTUSE_TOL {
        symmetric_structured(apex, b, c, n)
    } else {
        glued_pair(apex, [spec.height(), 0.0], c, b, n)
    })
}

/// Upper half `[apex, (h, 0), (h, w)]` of the canonical isosceles triangle;
/// the axis is the edge from the apex to `(h, 0)`.
pub fn build_half_mesh(spec: &IsoscelesSpec, n: usize) -> Result<Mesh> {
    check_level(n)?;
    let s = Structured::new(spec.upper_half().vertices(), n);
    let axis = (0..=n).map(|i| s.idx(i, 0)).collect();
    Ok(Mesh {
        vertices: s.vertices,
        elements: s.elements,
        axis_vertices: axis,
        refinement_level: n,
        mirror: None,
    })
}

/// Mesh used by the eigensolver for an arbitrary triangle, in the triangle's
/// own frame. Isosceles inputs get a reflection-compatible mesh; obtuse inputs
/// are cut along the altitude from the obtuse vertex.
pub fn solver_mesh(t: &Triangle, n: usize) -> Result<Mesh> {
    check_level(n)?;
    let v = t.vertices();
    let ang = t.angles();
    if let Some((spec, _)) = t.as_isosceles() {
        let a = (0..3)
            .find(|&i| (ang[(i + 1) % 3] - ang[(i + 2) % 3]).abs() <= crate::geometry::ANGLE_TOL)
            .unwrap_or(0);
        let (p, b, c) = (v[a], v[(a + 1) % 3], v[(a + 2) % 3]);
        return Ok(if spec.aperture <= FRAC_PI_2 + OBTUSE_TOL {
            symmetric_structured(p, b, c, n)
        } else {
            glued_pair(p, midpoint(b, c), c, b, n)
        });
    }
    let (a, max) = ang
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, x)| if x > acc.1 { (i, x) } else { acc });
    if max <= FRAC_PI_2 + OBTUSE_TOL {
        return build_mesh(t, n);
    }
    let (p, b, c) = (v[a], v[(a + 1) % 3], v[(a + 2) % 3]);
    let d = [c[0] - b[0], c[1] - b[1]];
    let s = ((p[0] - b[0]) * d[0] + (p[1] - b[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]);
    let foot = [b[0] + s * d[0], b[1] + s * d[1]];
    let mut m = glued_pair(p, foot, c, b, n);
    m.mirror = None;
    m.axis_vertices.clear();
    Ok(m)
}

fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

impl Mesh {
    fn orient(&mut self) {
        for e in &mut self.elements {
            if signed_area(&self.vertices, e) < 0.0 {
                e.swap(1, 2);
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn element_area(&self, e: usize) -> f64 {
        signed_area(&self.vertices, &self.elements[e])
    }

    pub fn area(&self) -> f64 {
        (0..self.elements.len()).map(|e| self.element_area(e)).sum()
    }

    /// Gradients of the three barycentric hat functions on element `e`.
    pub fn hat_gradients(&self, e: usize) -> [Point; 3] {
        let [a, b, c] = self.elements[e].map(|i| self.vertices[i]);
        let two_a = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let g = |p: Point, q: Point| [(p[1] - q[1]) / two_a, (q[0] - p[0]) / two_a];
        [g(b, c), g(c, a), g(a, b)]
    }

    /// Constant gradient of the piecewise-linear interpolant on element `e`.
    pub fn element_gradient(&self, e: usize, u: &[f64]) -> Point {
        let g = self.hat_gradients(e);
        let el = self.elements[e];
        let mut out = [0.0; 2];
        for k in 0..3 {
            out[0] += u[el[k]] * g[k][0];
            out[1] += u[el[k]] * g[k][1];
        }
        out
    }

    pub fn interpolate<F: Fn(Point) -> f64>(&self, f: F) -> Vec<f64> {
        self.vertices.iter().map(|&p| f(p)).collect()
    }

    /// Mesh with every vertex mapped through `f`, connectivity unchanged.
    pub fn mapped<F: Fn(Point) -> Point>(&self, f: F) -> Mesh {
        let mut m = self.clone();
        for p in &mut m.vertices {
            *p = f(*p);
        }
        m.orient();
        m
    }

    /// Plain-text listing: a vertex count line, one `x y` line per vertex,
    /// an element count line, one zero-based `a b c` line per element.
    pub fn write_ascii<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "vertices {}", self.vertices.len())?;
        for p in &self.vertices {
            writeln!(w, "{:.17e} {:.17e}", p[0], p[1])?;
        }
        writeln!(w, "elements {}", self.elements.len())?;
        for e in &self.elements {
            writeln!(w, "{} {} {}", e[0], e[1], e[2])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;
    use std::f64::consts::PI;

    fn check_conforming(m: &Mesh) {
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for e in &m.elements {
            for k in 0..3 {
                let (a, b) = (e[k], e[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        assert!(edges.values().all(|&c| c <= 2));
        // Euler characteristic of a disk: V − E + F = 1.
        let v = m.vertices.len() as i64;
        assert_eq!(v - edges.len() as i64 + m.elements.len() as i64, 1);
        for e in 0..m.elements.len() {
            assert!(m.element_area(e) > 0.0);
        }
    }

    #[test]
    fn counts() {
        let t = Triangle::new([[0.0, 0.0], [1.0, 0.2], [0.3, 0.9]]).unwrap();
        let m = build_mesh(&t, 1).unwrap();
        assert_eq!((m.elements.len(), m.vertices.len()), (1, 3));
        let m = build_mesh(&t, 4).unwrap();
        assert_eq!((m.elements.len(), m.vertices.len()), (16, 15));
        assert!(build_mesh(&t, 0).is_err());
        assert!(build_mesh(&t, 513).is_err());
    }

    #[test]
    fn area_sum_and_conformity() {
        let t = Triangle::new([[0.0, 0.0], [0.2, 1.0], [1.3, 0.1]]).unwrap();
        let m = build_mesh(&t, 64).unwrap();
        assert!((m.area() - t.area()).abs() <= 1e-13 * t.area());
        check_conforming(&m);
        let obtuse = Triangle::new([[0.0, 0.0], [2.0, 0.0], [0.7, 0.3]]).unwrap();
        let s = solver_mesh(&obtuse, 16).unwrap();
        assert!((s.area() - obtuse.area()).abs() <= 1e-13 * obtuse.area());
        check_conforming(&s);
    }

    #[test]
    fn isosceles_meshes_are_mirror_symmetric() {
        for &alpha in &[0.3, PI / 3.0, PI / 2.0, 2.0, 3.0] {
            let spec = IsoscelesSpec::unit(alpha).unwrap();
            let m = build_isosceles_mesh(&spec, 12).unwrap();
            check_conforming(&m);
            assert!((m.area() - spec.triangle().area()).abs() < 1e-13);
            let mirror = m.mirror.as_ref().unwrap();
            for (i, &j) in mirror.iter().enumerate() {
                let (p, q) = (m.vertices[i], m.vertices[j]);
                assert!((p[0] - q[0]).abs() < 1e-14 && (p[1] + q[1]).abs() < 1e-14);
                assert_eq!(mirror[j], i);
            }
            for &a in &m.axis_vertices {
                assert_eq!(mirror[a], a);
                assert!(m.vertices[a][1].abs() < 1e-14);
            }
            // The structured mesh meets the axis at every other row.
            let expected = if alpha <= FRAC_PI_2 { 7 } else { 13 };
            assert_eq!(m.axis_vertices.len(), expected);
        }
    }

    #[test]
    fn half_mesh_axis() {
        let spec = IsoscelesSpec::unit(1.2).unwrap();
        let m = build_half_mesh(&spec, 8).unwrap();
        check_conforming(&m);
        assert_eq!(m.axis_vertices.len(), 9);
        for &a in &m.axis_vertices {
            assert_eq!(m.vertices[a][1], 0.0);
        }
        assert!((2.0 * m.area() - spec.triangle().area()).abs() < 1e-14);
    }

    #[test]
    fn ascii_export() {
        let t = Triangle::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let m = build_mesh(&t, 2).unwrap();
        let mut buf = Vec::new();
        m.write_ascii(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("vertices 6\n"));
        assert!(text.contains("elements 4\n"));
        assert_eq!(text.lines().count(), 1 + 6 + 1 + 4);
    }
}
