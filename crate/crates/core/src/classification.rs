//! Unitary equivalence classes of su(2) subalgebras of su(2J+1).
//!
//! A class is labelled by the subspins `{J_l}` of the block decomposition of
//! the (2J+1)-level representation. Classes are generated from subsets of
//! the Dynkin diagram vertices `1..=2J`: a run of `l` consecutive chosen
//! vertices yields a spin-`l/2` block on `l+1` consecutive levels, and every
//! level left untouched is a singlet.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_algebra::{commutator, spin_matrices};
use crate::operator::{CMatrix, HermitianOperator};
use crate::spin::SpinQuantum;

/// Su(2) commutation residual accepted for a triple.
pub const TRIPLE_TOL: f64 = 1e-9;
/// Clustering tolerance for `O3 / f` eigenvalues.
pub const SPECTRUM_TOL: f64 = 1e-7;

/// A nonempty set of Dynkin vertices, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSubset {
    j: SpinQuantum,
    chosen: Vec<usize>,
}

impl VertexSubset {
    pub fn new(j: SpinQuantum, chosen: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut chosen: Vec<usize> = chosen.into_iter().collect();
        chosen.sort_unstable();
        chosen.dedup();
        if chosen.is_empty() {
            return Err(Error::InvalidSubset("no vertex chosen".into()));
        }
        let top = j.twice() as usize;
        if let Some(&bad) = chosen.iter().find(|&&k| k == 0 || k > top) {
            return Err(Error::InvalidSubset(format!(
                "vertex {bad} outside 1..={top}"
            )));
        }
        Ok(VertexSubset { j, chosen })
    }

    /// Subset from a bit mask, bit `k-1` selecting vertex `k`.
    pub fn from_mask(j: SpinQuantum, mask: u64) -> Result<Self> {
        VertexSubset::new(j, (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1))
    }

    pub fn j(&self) -> SpinQuantum {
        self.j
    }

    pub fn vertices(&self) -> &[usize] {
        &self.chosen
    }

    /// The mirror image under `k -> 2J + 1 - k`.
    pub fn reflected(&self) -> VertexSubset {
        let top = self.j.twice() as usize + 1;
        VertexSubset::new(self.j, self.chosen.iter().map(|k| top - k))
            .expect("reflection stays in range")
    }
}

impl fmt::Display for VertexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.chosen.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// One irreducible block: spin `twice_spin / 2` on levels
/// `start ..= start + twice_spin` (0-based, `m_z` descending).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub spin: SpinQuantum,
}

impl Block {
    pub fn levels(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.spin.dim()
    }
}

/// Blocks of a subset in level order, singlets included.
pub fn block_layout(subset: &VertexSubset) -> Vec<Block> {
    let levels = subset.j.dim();
    let mut blocks = Vec::new();
    let mut level = 0;
    while level < levels {
        // vertex k joins levels k-1 and k
        let mut end = level;
        while end + 1 < levels && subset.chosen.binary_search(&(end + 1)).is_ok() {
            end += 1;
        }
        blocks.push(Block {
            start: level,
            spin: SpinQuantum::from_twice((end - level) as u32),
        });
        level = end + 1;
    }
    blocks
}

/// Subspins `{J_l}` (descending) and the structure factor `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct IrrepDecomposition {
    j: SpinQuantum,
    subspins: Vec<SpinQuantum>,
    f: f64,
}

impl IrrepDecomposition {
    pub fn new(j: SpinQuantum, subspins: impl IntoIterator<Item = SpinQuantum>) -> Result<Self> {
        let mut subspins: Vec<SpinQuantum> = subspins.into_iter().collect();
        subspins.sort_unstable_by(|a, b| b.cmp(a));
        let f = structure_factor(&subspins, j)?;
        Ok(IrrepDecomposition { j, subspins, f })
    }

    pub fn j(&self) -> SpinQuantum {
        self.j
    }

    /// Subspins, largest first.
    pub fn subspins(&self) -> &[SpinQuantum] {
        &self.subspins
    }

    /// Subspins, smallest first.
    pub fn subspins_ascending(&self) -> Vec<SpinQuantum> {
        self.subspins.iter().rev().copied().collect()
    }

    pub fn r(&self) -> usize {
        self.subspins.len()
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    /// `"1/2+1/2"`-style label, largest first.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.subspins.iter().map(|s| s.to_string()).collect();
        parts.join("+")
    }

    fn sort_key(&self) -> (usize, Vec<std::cmp::Reverse<SpinQuantum>>) {
        (
            self.r(),
            self.subspins
                .iter()
                .map(|&s| std::cmp::Reverse(s))
                .collect(),
        )
    }
}

impl fmt::Display for IrrepDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.subspins.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Serialized form of a class, subspins smallest first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub subspins: Vec<SpinQuantum>,
    pub r: usize,
    pub f: f64,
}

impl From<&IrrepDecomposition> for ClassRecord {
    fn from(d: &IrrepDecomposition) -> Self {
        ClassRecord {
            subspins: d.subspins_ascending(),
            r: d.r(),
            f: d.f(),
        }
    }
}

/// `f = sqrt(J(J+1)(2J+1) / sum_l J_l(J_l+1)(2J_l+1))`.
pub fn structure_factor(subspins: &[SpinQuantum], j: SpinQuantum) -> Result<f64> {
    let dim: usize = subspins.iter().map(|s| s.dim()).sum();
    if dim != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            found: dim,
        });
    }
    let denom: f64 = subspins.iter().map(|s| s.norm_sq()).sum();
    if denom == 0.0 {
        return Err(Error::AllTrivialSubspins);
    }
    Ok((j.norm_sq() / denom).sqrt())
}

pub fn decompose_subset(subset: &VertexSubset) -> IrrepDecomposition {
    IrrepDecomposition::new(subset.j, block_layout(subset).into_iter().map(|b| b.spin))
        .expect("a nonempty subset has a nontrivial block")
}

/// Distinct classes of su(2J+1), ordered by `r` and then by subspins
/// (largest first).
pub fn enumerate_classes(j: SpinQuantum) -> Vec<IrrepDecomposition> {
    enumerate_classes_with_examples(j)
        .into_iter()
        .map(|(d, _)| d)
        .collect()
}

/// Distinct classes with the first subset (in bit-mask order) realizing each.
pub fn enumerate_classes_with_examples(j: SpinQuantum) -> Vec<(IrrepDecomposition, VertexSubset)> {
    let vertices = j.twice();
    assert!(vertices < 64, "J too large to enumerate vertex subsets");
    let mut classes: Vec<(IrrepDecomposition, VertexSubset)> = Vec::new();
    for mask in 1..(1u64 << vertices) {
        let subset = VertexSubset::from_mask(j, mask).expect("mask within range");
        let d = decompose_subset(&subset);
        if !classes.iter().any(|(c, _)| c.subspins == d.subspins) {
            classes.push((d, subset));
        }
    }
    classes.sort_by_key(|a| a.0.sort_key());
    classes
}

/// First subset (bit-mask order) realizing the given subspins.
pub fn subset_for_subspins(j: SpinQuantum, subspins: &[SpinQuantum]) -> Result<VertexSubset> {
    let target = IrrepDecomposition::new(j, subspins.iter().copied())?;
    enumerate_classes_with_examples(j)
        .into_iter()
        .find(|(d, _)| d.subspins == target.subspins)
        .map(|(_, s)| s)
        .ok_or_else(|| Error::InvalidSubset(format!("no vertex subset realizes {target}")))
}

/// Concrete operators `(O1, O2, O3)` of one su(2) subalgebra.
#[derive(Clone, Debug)]
pub struct Su2Triple {
    j: SpinQuantum,
    o: [HermitianOperator; 3],
    decomposition: IrrepDecomposition,
}

impl Su2Triple {
    /// Validates the commutation relations and reads the class off the
    /// spectrum of `O3`.
    pub fn from_operators(
        o1: HermitianOperator,
        o2: HermitianOperator,
        o3: HermitianOperator,
    ) -> Result<Self> {
        let dim = o1.dim();
        for op in [&o2, &o3] {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
        }
        let j = SpinQuantum::from_twice(dim as u32 - 1);
        let f = triple_factor(&o1, &o2, &o3)?;
        let subspins = subspins_from_spectrum(&o3.scale(1.0 / f).eigenvalues())?;
        let decomposition = IrrepDecomposition::new(j, subspins)?;
        Ok(Su2Triple {
            j,
            o: [o1, o2, o3],
            decomposition,
        })
    }

    pub fn j(&self) -> SpinQuantum {
        self.j
    }

    pub fn operators(&self) -> &[HermitianOperator; 3] {
        &self.o
    }

    pub fn o1(&self) -> &HermitianOperator {
        &self.o[0]
    }

    pub fn o2(&self) -> &HermitianOperator {
        &self.o[1]
    }

    pub fn o3(&self) -> &HermitianOperator {
        &self.o[2]
    }

    pub fn decomposition(&self) -> &IrrepDecomposition {
        &self.decomposition
    }

    pub fn f(&self) -> f64 {
        self.decomposition.f()
    }

    /// `O+ = O1 + i O2`.
    pub fn raising(&self) -> CMatrix {
        self.o[0].matrix() + self.o[1].matrix() * C64::new(0.0, 1.0)
    }

    /// Largest deviation from `[O3, O+-] = +-f O+-`, relative to `f`.
    pub fn residual(&self) -> f64 {
        let f = self.f();
        let plus = self.raising();
        let o3 = self.o[2].matrix();
        let comm = o3 * &plus - &plus * o3;
        crate::operator::max_abs(&(comm - &plus * C64::new(f, 0.0))) / f
    }
}

/// `f` from `-i[O1, O2] = f O3`, checking all three cyclic relations.
fn triple_factor(
    o1: &HermitianOperator,
    o2: &HermitianOperator,
    o3: &HermitianOperator,
) -> Result<f64> {
    let n3 = o3.norm_sq();
    if n3 == 0.0 {
        return Err(Error::NotAnSu2Triple {
            residual: f64::INFINITY,
        });
    }
    let c12 = commutator(o1, o2)?;
    let f = c12.inner(o3) / n3;
    if f.abs() < TRIPLE_TOL {
        return Err(Error::NotAnSu2Triple {
            residual: c12.max_abs_diff(&HermitianOperator::zeros(o1.dim())),
        });
    }
    let residual = [
        c12.max_abs_diff(&o3.scale(f)),
        commutator(o2, o3)?.max_abs_diff(&o1.scale(f)),
        commutator(o3, o1)?.max_abs_diff(&o2.scale(f)),
    ]
    .into_iter()
    .fold(0.0, f64::max)
        / f.abs();
    if residual > TRIPLE_TOL || f < 0.0 {
        return Err(Error::NotAnSu2Triple { residual });
    }
    Ok(f)
}

/// Subspins from the eigenvalues of `O3 / f`, which must be a disjoint union
/// of strings `m, m-1, ..., -m`.
pub fn subspins_from_spectrum(eigenvalues: &[f64]) -> Result<Vec<SpinQuantum>> {
    let mut twice_m: Vec<i64> = Vec::with_capacity(eigenvalues.len());
    for &e in eigenvalues {
        let t = (2.0 * e).round();
        if (2.0 * e - t).abs() > 2.0 * SPECTRUM_TOL {
            return Err(Error::NotAnSu2Triple {
                residual: (2.0 * e - t).abs() / 2.0,
            });
        }
        twice_m.push(t as i64);
    }
    twice_m.sort_unstable();
    let mut subspins = Vec::new();
    while let Some(&top) = twice_m.last() {
        if top < 0 {
            return Err(Error::NotAnSu2Triple {
                residual: top as f64 / 2.0,
            });
        }
        let mut m = top;
        while m >= -top {
            match twice_m.iter().rposition(|&x| x == m) {
                Some(p) => {
                    twice_m.remove(p);
                }
                None => return Err(Error::NotAnSu2Triple { residual: 0.5 }),
            }
            m -= 2;
        }
        subspins.push(SpinQuantum::from_twice(top as u32));
    }
    Ok(subspins)
}

/// `O_k = f (+)_l lambda_{J_l,k}` placed block-diagonally on the levels of
/// each vertex run.
pub fn build_su2_triple(subset: &VertexSubset) -> Su2Triple {
    let j = subset.j;
    let decomposition = decompose_subset(subset);
    let f = decomposition.f();
    let d = j.dim();
    let mut mats = [
        CMatrix::zeros(d, d),
        CMatrix::zeros(d, d),
        CMatrix::zeros(d, d),
    ];
    for block in block_layout(subset) {
        if block.spin.twice() == 0 {
            continue;
        }
        let local = spin_matrices(block.spin);
        for (target, op) in mats.iter_mut().zip(&local) {
            let n = block.spin.dim();
            target
                .view_mut((block.start, block.start), (n, n))
                .copy_from(&(op.matrix() * C64::new(f, 0.0)));
        }
    }
    let [a, b, c] = mats;
    Su2Triple {
        j,
        o: [
            HermitianOperator::from_hermitian_part(a),
            HermitianOperator::from_hermitian_part(b),
            HermitianOperator::from_hermitian_part(c),
        ],
        decomposition,
    }
}

/// Whether two triples realize the same class. Both are revalidated and
/// their classes are recomputed from the spectra of `O3`.
pub fn equivalence_check(a: &Su2Triple, b: &Su2Triple) -> Result<bool> {
    if a.j != b.j {
        return Err(Error::DimensionMismatch {
            expected: a.j.dim(),
            found: b.j.dim(),
        });
    }
    let mut classes = Vec::with_capacity(2);
    for t in [a, b] {
        let f = triple_factor(t.o1(), t.o2(), t.o3())?;
        let subspins = subspins_from_spectrum(&t.o3().scale(1.0 / f).eigenvalues())?;
        let d = IrrepDecomposition::new(t.j, subspins)?;
        if d.subspins != t.decomposition.subspins {
            return Err(Error::WrongClass {
                expected: t.decomposition.to_string(),
                found: d.to_string(),
            });
        }
        classes.push(d);
    }
    Ok(classes[0].subspins == classes[1].subspins)
}
