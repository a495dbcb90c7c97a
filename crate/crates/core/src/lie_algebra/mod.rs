//! Spin and multipole generators of su(2J+1).
//!
//! Generators are ordered by rank: the spin vector (x, y, z), then the five
//! quadrupole components, the seven octupole components, and so on up to
//! rank `2J`. Every generator is Hermitian, traceless and normalized to
//! `tr(g^2) = J(J+1)(2J+1)/3`.
//!
//! For `J = 3/2` the closed-form matrices in [`three_halves`] are returned.
//! For other `J`, rank-`d` components come from the polarization operators
//! `T_q^(d)`, obtained by lowering `(J+)^d` with `ad(J-)`, and are arranged
//! per rank as `C_1, S_1, Z, C_2, S_2, ..., C_d, S_d` where
//! `C_q ~ T_q + T_q^dag`, `S_q ~ -i (T_q - T_q^dag)` and `Z ~ T_0` with its
//! `m = J` entry positive. The signs of higher-rank components are a
//! convention of this crate.

pub mod three_halves;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::{trace_product, CMatrix, HermitianOperator};
use crate::spin::SpinQuantum;

/// Tolerance on the unit norm of coefficient vectors.
pub const COEFF_NORM_TOL: f64 = 1e-12;
/// Tolerance on the trace of operators passed to [`expansion_coefficients`].
pub const TRACE_TOL: f64 = 1e-9;

/// Raising operator `J+` in the `m = J ... -J` basis.
pub fn raising_matrix(j: SpinQuantum) -> CMatrix {
    let d = j.dim();
    let jv = j.value();
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d.saturating_sub(1) {
        // <m+1| J+ |m> with m = J - (k+1)
        let mz = jv - (k + 1) as f64;
        m[(k, k + 1)] = C64::new((jv * (jv + 1.0) - mz * (mz + 1.0)).sqrt(), 0.0);
    }
    m
}

/// `(Jx, Jy, Jz)` for spin `J`. For `J = 0` these are 1x1 zeros.
pub fn spin_matrices(j: SpinQuantum) -> [HermitianOperator; 3] {
    let jp = raising_matrix(j);
    let jm = jp.adjoint();
    let half = C64::new(0.5, 0.0);
    let jx = (&jp + &jm) * half;
    let jy = (&jp - &jm) * C64::new(0.0, -0.5);
    let diag: Vec<f64> = j.magnetic_numbers().collect();
    [
        HermitianOperator::from_hermitian_part(jx),
        HermitianOperator::from_hermitian_part(jy),
        HermitianOperator::from_diagonal(&diag),
    ]
}

/// The ordered generator basis of su(2J+1) for one `J`.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    j: SpinQuantum,
    generators: Vec<HermitianOperator>,
    names: Vec<String>,
}

impl GeneratorSet {
    pub fn j(&self) -> SpinQuantum {
        self.j
    }

    pub fn generators(&self) -> &[HermitianOperator] {
        &self.generators
    }

    pub fn get(&self, index: usize) -> Option<&HermitianOperator> {
        self.generators.get(index)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    /// Multipole rank (1 = spin vector) of the generator at `index`.
    pub fn rank_of(&self, index: usize) -> usize {
        // rank d occupies indices d^2 - 1 .. (d+1)^2 - 1
        let mut d = 1;
        while (d + 1) * (d + 1) - 1 <= index {
            d += 1;
        }
        d
    }

    /// Indices of all generators of the given rank.
    pub fn rank_indices(&self, rank: usize) -> std::ops::Range<usize> {
        (rank * rank - 1)..((rank + 1) * (rank + 1) - 1).min(self.len())
    }

    /// Indices of the diagonal generators, in basis order.
    pub fn diagonal_indices(&self) -> Vec<usize> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.is_diagonal(1e-12))
            .map(|(k, _)| k)
            .collect()
    }

    /// Gram matrix `tr(g_a g_b)`.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        self.generators
            .iter()
            .map(|a| self.generators.iter().map(|b| a.inner(b)).collect())
            .collect()
    }

    /// Complex coefficients `c_k = tr(g_k m) / norm` of an arbitrary
    /// traceless matrix (used for non-Hermitian ladder operators).
    pub fn complex_coefficients(&self, m: &CMatrix) -> Result<Vec<C64>> {
        check_dim(self.dim(), m.nrows())?;
        let norm = self.j.norm_sq();
        Ok(self
            .generators
            .iter()
            .map(|g| trace_product(g.matrix(), m) / norm)
            .collect())
    }

    /// `sum_k c_k g_k` for complex coefficients.
    pub fn combine_complex(&self, coeffs: &[C64]) -> Result<CMatrix> {
        check_dim(self.len(), coeffs.len())?;
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for (g, c) in self.generators.iter().zip(coeffs) {
            if *c != C64::new(0.0, 0.0) {
                out += g.matrix() * *c;
            }
        }
        Ok(out)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// The complete generator set for spin `J`. `J = 3/2` returns the
/// closed-form table; other values use [`general_multipole_basis`].
pub fn multipole_basis(j: SpinQuantum) -> GeneratorSet {
    if j.twice() == 3 {
        GeneratorSet {
            j,
            generators: three_halves::generators(),
            names: three_halves::NAMES.iter().map(|s| s.to_string()).collect(),
        }
    } else {
        general_multipole_basis(j)
    }
}

/// Generator set built from polarization operators for any `J`.
pub fn general_multipole_basis(j: SpinQuantum) -> GeneratorSet {
    let d = j.dim();
    let norm = j.norm_sq();
    let mut generators: Vec<HermitianOperator> = Vec::with_capacity(j.generator_count());
    let mut names = Vec::with_capacity(j.generator_count());
    if j.twice() == 0 {
        return GeneratorSet {
            j,
            generators,
            names,
        };
    }

    let spin = spin_matrices(j);
    for (op, name) in spin.iter().zip(["Jx", "Jy", "Jz"]) {
        generators.push(op.clone());
        names.push(name.to_string());
    }

    let jp = raising_matrix(j);
    let jm = jp.adjoint();
    for rank in 2..=j.twice() as usize {
        // T_q for q = rank .. 0
        let mut tensors = vec![CMatrix::zeros(d, d); rank + 1];
        let mut t = CMatrix::identity(d, d);
        for _ in 0..rank {
            t = &t * &jp;
        }
        tensors[rank] = t;
        for q in (1..=rank).rev() {
            let next = &jm * &tensors[q] - &tensors[q] * &jm;
            tensors[q - 1] = rescale_unit(next);
        }

        let mut candidates: Vec<(CMatrix, String)> = Vec::with_capacity(2 * rank + 1);
        for q in 1..=rank {
            let tq = &tensors[q];
            let c = tq + tq.adjoint();
            let s = (tq - tq.adjoint()) * C64::new(0.0, -1.0);
            candidates.push((c, format!("T{rank}c{q}")));
            candidates.push((s, format!("T{rank}s{q}")));
            if q == 1 {
                let mut z = tensors[0].clone();
                if z[(0, 0)].re < 0.0 {
                    z = -z;
                }
                candidates.push((z, format!("T{rank}z")));
            }
        }

        for (m, name) in candidates {
            let mut op = HermitianOperator::from_hermitian_part(m);
            // project out the identity and every earlier generator
            let tr = op.trace() / d as f64;
            op = &op - &HermitianOperator::identity(d).scale(tr);
            for g in &generators {
                let overlap = op.inner(g) / norm;
                op = &op - &g.scale(overlap);
            }
            let scale = (norm / op.norm_sq()).sqrt();
            generators.push(op.scale(scale));
            names.push(name);
        }
    }
    GeneratorSet {
        j,
        generators,
        names,
    }
}

fn rescale_unit(m: CMatrix) -> CMatrix {
    let n = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        m / C64::new(n, 0.0)
    } else {
        m
    }
}

/// `sum_k v_k g_k` for a real unit coefficient vector.
pub fn expand_observable(basis: &GeneratorSet, coeffs: &[f64]) -> Result<HermitianOperator> {
    check_dim(basis.len(), coeffs.len())?;
    let norm_sq: f64 = coeffs.iter().map(|v| v * v).sum();
    if (norm_sq - 1.0).abs() > COEFF_NORM_TOL {
        return Err(Error::NormalizationError { norm_sq });
    }
    let d = basis.dim();
    let mut out = HermitianOperator::zeros(d);
    for (g, &v) in basis.generators.iter().zip(coeffs) {
        if v != 0.0 {
            out = &out + &g.scale(v);
        }
    }
    Ok(out)
}

/// `v_k = tr(op g_k) / (J(J+1)(2J+1)/3)`, the inverse of
/// [`expand_observable`].
pub fn expansion_coefficients(basis: &GeneratorSet, op: &HermitianOperator) -> Result<Vec<f64>> {
    check_dim(basis.dim(), op.dim())?;
    let trace = op.trace();
    if trace.abs() > TRACE_TOL {
        return Err(Error::NotTraceless { trace });
    }
    let norm = basis.j.norm_sq();
    Ok(basis
        .generators
        .iter()
        .map(|g| op.inner(g) / norm)
        .collect())
}

/// `-i [a, b]`, Hermitian whenever `a` and `b` are.
pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    check_dim(a.dim(), b.dim())?;
    let (ma, mb) = (a.matrix(), b.matrix());
    let c = (ma * mb - mb * ma) * C64::new(0.0, -1.0);
    Ok(HermitianOperator::from_hermitian_part(c))
}
