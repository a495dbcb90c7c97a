//! Root system of su(2J+1) over a diagonal Cartan subalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lie_algebra::{commutator, expansion_coefficients, GeneratorSet};
use crate::operator::{max_abs, unit_matrix, CMatrix};
use crate::spin::SpinQuantum;

/// Eigenvalues closer than this are treated as one root component.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Indices of the diagonal generators spanning the Cartan subalgebra.
/// The spin component `Jz` (index 2) is always included and is used first
/// when separating root spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanChoice {
    j: SpinQuantum,
    indices: Vec<usize>,
}

impl CartanChoice {
    pub fn new(basis: &GeneratorSet, indices: Vec<usize>) -> Result<Self> {
        let j = basis.j();
        if indices.len() != j.twice() as usize {
            return Err(Error::InvalidCartan(format!(
                "expected {} generators, got {}",
                j.twice(),
                indices.len()
            )));
        }
        if !indices.contains(&2) {
            return Err(Error::InvalidCartan("Jz (index 2) must be included".into()));
        }
        let mut seen = indices.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != indices.len() {
            return Err(Error::InvalidCartan("repeated index".into()));
        }
        for &k in &indices {
            let g = basis
                .get(k)
                .ok_or_else(|| Error::InvalidCartan(format!("index {k} out of range")))?;
            if !g.is_diagonal(1e-12) {
                return Err(Error::NonDiagonalCartan { index: k });
            }
        }
        Ok(CartanChoice { j, indices })
    }

    /// All diagonal generators of the basis, in basis order.
    pub fn standard(basis: &GeneratorSet) -> Result<Self> {
        CartanChoice::new(basis, basis.diagonal_indices())
    }

    pub fn j(&self) -> SpinQuantum {
        self.j
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    fn non_cartan(&self, len: usize) -> Vec<usize> {
        (0..len).filter(|k| !self.indices.contains(k)).collect()
    }

    fn processing_order(&self) -> Vec<usize> {
        // Jz first, the rest in the given order
        let mut order: Vec<usize> = (0..self.indices.len()).collect();
        order.sort_by_key(|&p| self.indices[p] != 2);
        order
    }
}

/// `F[m][n] = f_{cm}^n` where `[g_c, g_m] = i sum_n f_{cm}^n g_n`.
pub fn structure_constants(basis: &GeneratorSet, c: usize) -> Result<DMatrix<f64>> {
    let gens = basis.generators();
    let gc = gens.get(c).ok_or(Error::DimensionMismatch {
        expected: gens.len(),
        found: c,
    })?;
    let n = gens.len();
    let mut f = DMatrix::zeros(n, n);
    for (m, gm) in gens.iter().enumerate() {
        let coeffs = expansion_coefficients(basis, &commutator(gc, gm)?)?;
        for (k, v) in coeffs.into_iter().enumerate() {
            f[(m, k)] = v;
        }
    }
    Ok(f)
}

/// `ad[g_c]` restricted to the non-Cartan generators, one matrix per
/// Cartan generator in the order of `cartan.indices()`.
pub fn adjoint_representation(
    basis: &GeneratorSet,
    cartan: &CartanChoice,
) -> Result<Vec<DMatrix<f64>>> {
    for &k in cartan.indices() {
        if !basis.generators()[k].is_diagonal(1e-12) {
            return Err(Error::NonDiagonalCartan { index: k });
        }
    }
    let rest = cartan.non_cartan(basis.len());
    cartan
        .indices()
        .iter()
        .map(|&c| {
            let f = structure_constants(basis, c)?;
            Ok(DMatrix::from_fn(rest.len(), rest.len(), |a, b| {
                f[(rest[a], rest[b])]
            }))
        })
        .collect()
}

/// One root and its ladder operator.
#[derive(Clone, Debug)]
pub struct RootDatum {
    /// Eigenvalues of `ad[h]` for the Cartan generators, in CartanChoice order.
    pub root: Vec<f64>,
    /// `sum_k c_k g_k` with `tr(ladder^dag ladder) = J(J+1)(2J+1)/3`.
    pub ladder: CMatrix,
    /// Coefficients `c_k` over the full generator basis.
    pub coefficients: Vec<C64>,
}

impl RootDatum {
    pub fn is_positive(&self) -> bool {
        self.root
            .iter()
            .find(|v| v.abs() > CLUSTER_TOL)
            .is_some_and(|&v| v > 0.0)
    }

    /// Largest residual of `[h, ladder] = root(h) ladder` over the Cartan set.
    pub fn residual(&self, basis: &GeneratorSet, cartan: &CartanChoice) -> f64 {
        cartan
            .indices()
            .iter()
            .zip(&self.root)
            .map(|(&c, &a)| {
                let h = basis.generators()[c].matrix();
                let comm = h * &self.ladder - &self.ladder * h;
                max_abs(&(comm - &self.ladder * C64::new(a, 0.0)))
            })
            .fold(0.0, f64::max)
    }
}

/// Simultaneous eigen-operators of the adjoint action of the Cartan
/// generators. Roots are listed in descending lexicographic order.
pub fn compute_roots(basis: &GeneratorSet, cartan: &CartanChoice) -> Result<Vec<RootDatum>> {
    let ads = adjoint_representation(basis, cartan)?;
    let rest = cartan.non_cartan(basis.len());
    let n = rest.len();
    // [h, sum c_m g_m] = sum_n (i F^T c)_n g_n, and i F^T is Hermitian
    let hermitian: Vec<CMatrix> = ads
        .iter()
        .map(|f| CMatrix::from_fn(n, n, |a, b| C64::new(0.0, f[(b, a)])))
        .collect();

    let mut clusters: Vec<CMatrix> = vec![CMatrix::identity(n, n)];
    for p in cartan.processing_order() {
        let mut next = Vec::with_capacity(clusters.len());
        for v in clusters {
            if v.ncols() == 1 {
                next.push(v);
                continue;
            }
            let reduced = v.adjoint() * &hermitian[p] * &v;
            let reduced = (&reduced + reduced.adjoint()) * C64::new(0.5, 0.0);
            let eig = nalgebra::SymmetricEigen::new(reduced);
            let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let mut start = 0;
            while start < order.len() {
                let mut end = start + 1;
                while end < order.len()
                    && eig.eigenvalues[order[end]] - eig.eigenvalues[order[start]] < CLUSTER_TOL
                {
                    end += 1;
                }
                let cols: Vec<_> = order[start..end]
                    .iter()
                    .map(|&k| eig.eigenvectors.column(k).into_owned())
                    .collect();
                let u = CMatrix::from_columns(&cols);
                next.push(&v * u);
                start = end;
            }
        }
        clusters = next;
    }

    let norm = basis.j().norm_sq();
    let mut roots = Vec::with_capacity(n);
    for v in &clusters {
        let root: Vec<f64> = hermitian
            .iter()
            .map(|h| (v.column(0).adjoint() * h * v.column(0))[(0, 0)].re)
            .collect();
        if v.ncols() > 1 {
            return Err(Error::DegenerateRootSpace {
                root,
                multiplicity: v.ncols(),
            });
        }
        let mut coefficients = vec![C64::new(0.0, 0.0); basis.len()];
        for (a, &k) in rest.iter().enumerate() {
            coefficients[k] = v[(a, 0)];
        }
        let scale = coefficients
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let mut ladder = basis.combine_complex(&coefficients)?;
        let phase = leading_phase(&ladder) * scale;
        ladder /= phase;
        for z in &mut coefficients {
            *z /= phase;
        }
        debug_assert!((ladder.iter().map(|z| z.norm_sqr()).sum::<f64>() - norm).abs() < 1e-8);
        roots.push(RootDatum {
            root,
            ladder,
            coefficients,
        });
    }
    roots.sort_by(|a, b| compare_roots(&b.root, &a.root));
    Ok(roots)
}

fn compare_roots(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > CLUSTER_TOL {
            return x.total_cmp(y);
        }
    }
    std::cmp::Ordering::Equal
}

/// Unit phase of the largest-magnitude entry (first in row-major order
/// among ties).
fn leading_phase(m: &CMatrix) -> C64 {
    let big = max_abs(m);
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            if z.norm() > big * (1.0 - 1e-9) {
                return z / z.norm();
            }
        }
    }
    C64::new(1.0, 0.0)
}

/// The raising matrix of Dynkin vertex `k`: a single entry
/// `sqrt(J(J+1)(2J+1)/3)` taking `m_z = J - k` to `m_z = J - k + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimpleRootMatrix {
    pub k: usize,
    pub matrix: CMatrix,
}

pub fn simple_root_matrices(j: SpinQuantum) -> Vec<SimpleRootMatrix> {
    let d = j.dim();
    let value = C64::new(j.norm_sq().sqrt(), 0.0);
    (1..=j.twice() as usize)
        .map(|k| SimpleRootMatrix {
            k,
            matrix: unit_matrix(d, k - 1, k, value),
        })
        .collect()
}
