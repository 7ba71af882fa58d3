//! Lowest eigenpairs of `K u = μ M u` by shift-invert subspace iteration.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sprs::SymmetryCheck;
use sprs_ldl::Ldl;

use super::assembly::{mat_vec, Sparse};
use crate::error::{Error, Result};

/// Relative residual the iteration aims for.
pub(crate) const RESIDUAL_TOL: f64 = 1e-10;
/// Relative residual accepted once the iteration stops improving.
pub(crate) const RESIDUAL_ACCEPT: f64 = 1e-8;
const STAGNATION_SWEEPS: usize = 10;
const MAX_ITER: usize = 500;
const DENSE_LIMIT: usize = 200;
const SEED: u64 = 0x7472_696e;

#[derive(Debug, Clone)]
pub(crate) struct EigenPair {
    pub value: f64,
    /// Mass-normalized.
    pub vector: Vec<f64>,
    /// `‖Ku − μMu‖` in the lumped inverse-mass norm.
    pub residual: f64,
}

pub(crate) struct Pencil<'a> {
    pub stiffness: &'a Sparse,
    pub mass: &'a Sparse,
    /// Project out constants (pure Neumann problems).
    pub deflate_constants: bool,
    /// Positive shift `s`: the factored operator is `K + sM`.
    pub shift: f64,
}

impl Pencil<'_> {
    fn dim(&self) -> usize {
        self.stiffness.rows()
    }

    fn lumped(&self) -> Vec<f64> {
        self.mass
            .outer_iterator()
            .map(|row| row.iter().map(|(_, &v)| v).sum())
            .collect()
    }

    fn residual(&self, lumped: &[f64], value: f64, x: &[f64]) -> f64 {
        let n = self.dim();
        let (mut kx, mut mx) = (vec![0.0; n], vec![0.0; n]);
        mat_vec(self.stiffness, x, &mut kx);
        mat_vec(self.mass, x, &mut mx);
        (0..n)
            .map(|r| (kx[r] - value * mx[r]).powi(2) / lumped[r])
            .sum::<f64>()
            .sqrt()
    }
}

/// The `count` smallest eigenpairs (above the constant mode when deflating).
pub(crate) fn lowest(p: &Pencil, count: usize) -> Result<Vec<EigenPair>> {
    let n = p.dim();
    let available = n - usize::from(p.deflate_constants);
    if count == 0 || count > available {
        return Err(Error::InvalidArgument(format!(
            "requested {count} eigenpairs from a problem with {available} admissible modes"
        )));
    }
    if n <= DENSE_LIMIT {
        dense(p, count)
    } else {
        subspace(p, count)
    }
}

fn to_dense(a: &Sparse) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.rows(), a.cols());
    for (r, row) in a.outer_iterator().enumerate() {
        for (c, &v) in row.iter() {
            d[(r, c)] = v;
        }
    }
    d
}

/// Reduce `A z = θ B z` (B SPD, small) to a standard symmetric problem.
/// Returns ascending eigenvalues with `B`-orthonormal eigenvectors.
fn small_generalized(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Convergence("Ritz mass matrix lost definiteness".into()))?;
    let l = chol.l();
    let la = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::Convergence("singular Ritz factor".into()))?;
    let mut c = l
        .solve_lower_triangular(&la.transpose())
        .ok_or_else(|| Error::Convergence("singular Ritz factor".into()))?;
    c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let v = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, k| {
        eig.eigenvectors[(r, order[k])]
    });
    let z = l
        .transpose()
        .solve_upper_triangular(&v)
        .ok_or_else(|| Error::Convergence("singular Ritz factor".into()))?;
    Ok((values, z))
}

fn dense(p: &Pencil, count: usize) -> Result<Vec<EigenPair>> {
    let (values, z) = small_generalized(&to_dense(p.stiffness), &to_dense(p.mass))?;
    let lumped = p.lumped();
    let skip = usize::from(p.deflate_constants);
    Ok((skip..skip + count)
        .map(|k| {
            let vector: Vec<f64> = z.column(k).iter().copied().collect();
            let value = values[k];
            EigenPair {
                value,
                residual: p.residual(&lumped, value, &vector),
                vector,
            }
        })
        .collect())
}

fn subspace(p: &Pencil, count: usize) -> Result<Vec<EigenPair>> {
    let n = p.dim();
    let available = n - usize::from(p.deflate_constants);
    let block = (count + count.max(8)).min(available);
    let lumped = p.lumped();

    let shifted = p.stiffness + &p.mass.map(|v| v * p.shift);
    let ldl = Ldl::new()
        .check_symmetry(SymmetryCheck::DontCheckSymmetry)
        .numeric(shifted.view())
        .map_err(|e| Error::Convergence(format!("factorization of K + sM failed: {e:?}")))?;

    let ones = vec![1.0; n];
    let mut mass_ones = vec![0.0; n];
    mat_vec(p.mass, &ones, &mut mass_ones);
    let total: f64 = mass_ones.iter().sum();
    let deflate = |x: &mut [f64]| {
        if p.deflate_constants {
            let c = x.iter().zip(&mass_ones).map(|(a, b)| a * b).sum::<f64>() / total;
            x.iter_mut().for_each(|v| *v -= c);
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut x = DMatrix::from_fn(n, block, |_, _| rng.gen_range(-1.0..1.0));
    let mut y = DMatrix::zeros(n, block);
    let (mut ky, mut my) = (DMatrix::zeros(n, block), DMatrix::zeros(n, block));
    let mut rhs = vec![0.0; n];
    let mut worst = f64::INFINITY;
    let (mut best, mut best_at) = (f64::INFINITY, 0);

    for iteration in 0..MAX_ITER {
        for j in 0..block {
            mat_vec(p.mass, x.column(j).as_slice(), &mut rhs);
            let mut sol = ldl.solve(&rhs[..]);
            deflate(&mut sol);
            let norm = sol.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                sol.iter_mut().for_each(|v| *v /= norm);
            }
            y.set_column(j, &nalgebra::DVector::from_vec(sol));
        }
        for j in 0..block {
            mat_vec(p.stiffness, y.column(j).as_slice(), ky.column_mut(j).as_mut_slice());
            mat_vec(p.mass, y.column(j).as_slice(), my.column_mut(j).as_mut_slice());
        }
        let kr = y.transpose() * &ky;
        let mr = y.transpose() * &my;
        let kr = 0.5 * (&kr + kr.transpose());
        let mr = 0.5 * (&mr + mr.transpose());
        let (theta, z) = small_generalized(&kr, &mr)?;
        x = &y * &z;
        let kx = &ky * &z;
        let mx = &my * &z;

        let residuals: Vec<f64> = (0..count)
            .map(|i| {
                (0..n)
                    .map(|r| (kx[(r, i)] - theta[i] * mx[(r, i)]).powi(2) / lumped[r])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        worst = (0..count)
            .map(|i| residuals[i] / theta[i].abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        if worst < 0.5 * best {
            (best, best_at) = (worst, iteration);
        }
        let stalled = iteration >= best_at + STAGNATION_SWEEPS || iteration + 1 == MAX_ITER;
        if worst <= RESIDUAL_TOL || (stalled && worst <= RESIDUAL_ACCEPT) {
            log::debug!("subspace iteration converged after {} sweeps", iteration + 1);
            return Ok((0..count)
                .map(|i| EigenPair {
                    value: theta[i],
                    vector: x.column(i).iter().copied().collect(),
                    residual: residuals[i],
                })
                .collect());
        }
    }
    Err(Error::SolverNonConvergence {
        residual: worst,
        iterations: MAX_ITER,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assembly::{assemble, quadratic_form};
    use crate::fem::mesh::build_mesh;
    use crate::geometry::Triangle;

    #[test]
    fn dense_and_iterative_agree() {
        let t = Triangle::new([[0.0, 0.0], [1.0, 0.1], [0.3, 0.8]]).unwrap();
        let m = build_mesh(&t, 24).unwrap();
        let mats = assemble(&m);
        let p = Pencil {
            stiffness: &mats.stiffness,
            mass: &mats.mass,
            deflate_constants: true,
            shift: 1.0,
        };
        let it = subspace(&p, 4).unwrap();
        let de = dense(&p, 4).unwrap();
        for (a, b) in it.iter().zip(&de) {
            assert!((a.value - b.value).abs() < 1e-9 * b.value, "{} vs {}", a.value, b.value);
            let mn = quadratic_form(&mats.mass, &a.vector, &a.vector);
            assert!((mn - 1.0).abs() < 1e-10);
            assert!(a.residual <= RESIDUAL_ACCEPT * a.value);
        }
        assert!(lowest(&p, 0).is_err());
        assert!(lowest(&p, m.vertex_count()).is_err());
    }
}
