//! Piecewise-linear stiffness and mass matrices.

use sprs::{CsMat, TriMat};

use super::mesh::Mesh;

pub type Sparse = CsMat<f64>;

#[derive(Debug, Clone)]
pub struct Matrices {
    pub stiffness: Sparse,
    pub mass: Sparse,
}

/// Stiffness `∫∇φᵢ·∇φⱼ` and consistent mass `∫φᵢφⱼ` over all vertices.
pub fn assemble(m: &Mesh) -> Matrices {
    let map: Vec<Option<usize>> = (0..m.vertex_count()).map(Some).collect();
    assemble_on(m, &map, m.vertex_count())
}

/// Assembly restricted to the vertices with `map[v] = Some(row)`; the others
/// carry an essential zero condition.
pub(crate) fn assemble_on(m: &Mesh, map: &[Option<usize>], size: usize) -> Matrices {
    let cap = 9 * m.elements.len();
    let mut k = TriMat::with_capacity((size, size), cap);
    let mut mm = TriMat::with_capacity((size, size), cap);
    for (e, el) in m.elements.iter().enumerate() {
        let area = m.element_area(e);
        let g = m.hat_gradients(e);
        for a in 0..3 {
            let Some(r) = map[el[a]] else { continue };
            for b in 0..3 {
                let Some(c) = map[el[b]] else { continue };
                k.add_triplet(r, c, area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]));
                mm.add_triplet(r, c, area / 12.0 * if a == b { 2.0 } else { 1.0 });
            }
        }
    }
    Matrices {
        stiffness: k.to_csr(),
        mass: mm.to_csr(),
    }
}

pub(crate) fn mat_vec(a: &Sparse, x: &[f64], y: &mut [f64]) {
    for (row, vec) in a.outer_iterator().enumerate() {
        y[row] = vec.iter().map(|(c, &v)| v * x[c]).sum();
    }
}

pub(crate) fn quadratic_form(a: &Sparse, x: &[f64], y: &[f64]) -> f64 {
    a.outer_iterator()
        .enumerate()
        .map(|(row, vec)| x[row] * vec.iter().map(|(c, &v)| v * y[c]).sum::<f64>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::build_mesh;
    use crate::geometry::Triangle;

    fn unit_equilateral() -> Triangle {
        Triangle::new([[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]).unwrap()
    }

    #[test]
    fn kernel_and_mass_total() {
        let t = Triangle::new([[0.1, 0.0], [1.0, 0.3], [0.4, 1.1]]).unwrap();
        let m = build_mesh(&t, 9).unwrap();
        let mats = assemble(&m);
        let ones = vec![1.0; m.vertex_count()];
        let mut y = vec![0.0; ones.len()];
        mat_vec(&mats.stiffness, &ones, &mut y);
        assert!(y.iter().all(|v| v.abs() < 1e-12));
        assert!((quadratic_form(&mats.mass, &ones, &ones) - t.area()).abs() < 1e-12);
    }

    #[test]
    fn linear_function_energy() {
        let t = unit_equilateral();
        let m = build_mesh(&t, 7).unwrap();
        let mats = assemble(&m);
        let x = m.interpolate(|p| p[0]);
        let e = quadratic_form(&mats.stiffness, &x, &x);
        assert!((e - 3f64.sqrt() / 4.0).abs() < 1e-12);
        // x is reproduced exactly, so the mass form gives ∫x².
        let exact: f64 = 3f64.sqrt() / 4.0 * (7.0 / 24.0);
        assert!((quadratic_form(&mats.mass, &x, &x) - exact).abs() < 1e-12);
    }

    #[test]
    fn symmetric_matrices() {
        let t = Triangle::new([[0.0, 0.0], [2.0, 0.0], [0.7, 0.3]]).unwrap();
        let m = build_mesh(&t, 5).unwrap();
        let mats = assemble(&m);
        for a in [&mats.stiffness, &mats.mass] {
            let dense = a.to_dense();
            for i in 0..dense.nrows() {
                for j in 0..dense.ncols() {
                    assert_eq!(dense[[i, j]], dense[[j, i]]);
                }
            }
        }
    }
}
