//! Exact simulation of `N` bosonic spin-`J` particles in the symmetric
//! subspace, used as ground truth for the closed-form dynamics.
//!
//! States live in the (2J+1)-mode Fock space with occupations `n_k` of the
//! levels `m_z = J - k`; a single-particle operator `A` acts collectively as
//! `sum_{mn} A_mn c_m^dag c_n`.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::classification::{
    block_layout, build_su2_triple, subset_for_subspins, Block, Su2Triple, VertexSubset,
};
use crate::coherent_dynamics::{CoherentSpec, EnsembleSpec, SqueezeTrace};
use crate::error::{Error, Result};
use crate::operator::{CMatrix, HermitianOperator};
use crate::spin::SpinQuantum;

/// Largest symmetric basis that will be built.
pub const SIZE_LIMIT: f64 = 5e6;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Occupation-number basis, ordered descending lexicographically, so the
/// first state has every particle in `m_z = J`.
#[derive(Debug, PartialEq)]
pub struct FockBasis {
    n: u32,
    modes: usize,
    occupations: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl FockBasis {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.occupations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupations.is_empty()
    }

    pub fn occupations(&self) -> &[Vec<u32>] {
        &self.occupations
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }
}

/// `C(N + 2J, 2J)` as a float, exact while it fits in 53 bits.
pub fn basis_size(n: u32, j: SpinQuantum) -> f64 {
    let k = j.twice() as u64;
    (1..=k).fold(1.0, |acc, i| acc * (n as u64 + i) as f64 / i as f64)
}

pub fn build_basis(n: u32, j: SpinQuantum) -> Result<Arc<FockBasis>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "particle number must be at least 1".into(),
        ));
    }
    let size = basis_size(n, j);
    if size > SIZE_LIMIT {
        return Err(Error::SizeLimit {
            size,
            limit: SIZE_LIMIT,
        });
    }
    let modes = j.dim();
    let mut occupations = Vec::with_capacity(size.round() as usize);
    let mut current = vec![0u32; modes];
    fill(&mut occupations, &mut current, 0, n);
    let index = occupations
        .iter()
        .enumerate()
        .map(|(i, o)| (o.clone(), i))
        .collect();
    Ok(Arc::new(FockBasis {
        n,
        modes,
        occupations,
        index,
    }))
}

fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, mode: usize, left: u32) {
    if mode + 1 == current.len() {
        current[mode] = left;
        out.push(current.clone());
        return;
    }
    for k in (0..=left).rev() {
        current[mode] = k;
        fill(out, current, mode + 1, left - k);
    }
}

/// A single-particle operator lifted to the symmetric Fock space.
#[derive(Clone, Debug)]
pub struct CollectiveOperator {
    basis: Arc<FockBasis>,
    /// Row-major sparse entries `(column, value)`.
    rows: Vec<Vec<(usize, C64)>>,
    diagonal: Option<Vec<f64>>,
}

impl CollectiveOperator {
    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    /// Diagonal values when the operator is diagonal in occupations.
    pub fn diagonal(&self) -> Option<&[f64]> {
        self.diagonal.as_deref()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        if let Some(d) = &self.diagonal {
            return d.iter().zip(v).map(|(&x, &a)| a * x).collect();
        }
        self.rows
            .par_iter()
            .with_min_len(512)
            .map(|row| row.iter().fold(ZERO, |acc, &(c, x)| acc + x * v[c]))
            .collect()
    }

    pub fn to_dense(&self) -> CMatrix {
        let d = self.basis.len();
        let mut m = CMatrix::zeros(d, d);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, x) in row {
                m[(r, c)] += x;
            }
        }
        m
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diagonal(&self) -> f64 {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| {
                row.iter()
                    .filter(move |(c, _)| *c != r)
                    .map(|(_, x)| x.norm())
            })
            .fold(0.0, f64::max)
    }
}

/// `sum_{mn} op_mn c_m^dag c_n` on the given basis.
pub fn second_quantize(
    op: &HermitianOperator,
    basis: &Arc<FockBasis>,
) -> Result<CollectiveOperator> {
    if op.dim() != basis.modes {
        return Err(Error::DimensionMismatch {
            expected: basis.modes,
            found: op.dim(),
        });
    }
    let a = op.matrix();
    let nonzero: Vec<(usize, usize, C64)> = (0..basis.modes)
        .flat_map(|m| (0..basis.modes).map(move |n| (m, n)))
        .filter(|&(m, n)| a[(m, n)] != ZERO)
        .map(|(m, n)| (m, n, a[(m, n)]))
        .collect();

    let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); basis.len()];
    let mut target = vec![0u32; basis.modes];
    for (col, occ) in basis.occupations.iter().enumerate() {
        for &(m, n, x) in &nonzero {
            if occ[n] == 0 {
                continue;
            }
            if m == n {
                rows[col].push((col, x * occ[n] as f64));
                continue;
            }
            target.copy_from_slice(occ);
            let amp = (occ[n] as f64 * (occ[m] as f64 + 1.0)).sqrt();
            target[n] -= 1;
            target[m] += 1;
            let row = basis.index[&target];
            rows[row].push((col, x * amp));
        }
    }
    for row in &mut rows {
        row.sort_by_key(|&(c, _)| c);
        row.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
    }
    let mut lifted = CollectiveOperator {
        basis: basis.clone(),
        rows,
        diagonal: None,
    };
    if lifted.max_off_diagonal() == 0.0 {
        let d = (0..basis.len())
            .map(|r| {
                lifted.rows[r]
                    .iter()
                    .find(|(c, _)| *c == r)
                    .map_or(0.0, |(_, x)| x.re)
            })
            .collect();
        lifted.diagonal = Some(d);
    }
    Ok(lifted)
}

#[derive(Clone, Debug)]
pub struct SymmetricState {
    basis: Arc<FockBasis>,
    amplitudes: Vec<C64>,
}

impl SymmetricState {
    pub fn new(basis: Arc<FockBasis>, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: amplitudes.len(),
            });
        }
        Ok(SymmetricState { basis, amplitudes })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &SymmetricState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Single-particle state `(+)_l zeta_l |theta, phi>_l` on the class blocks.
/// Weights are paired with blocks ordered by spin (largest first), ties by
/// level.
pub fn single_particle_state(
    j: SpinQuantum,
    blocks: &[Block],
    coherent: &CoherentSpec,
) -> Result<Vec<C64>> {
    if blocks.len() != coherent.zeta().len() {
        return Err(Error::DimensionMismatch {
            expected: blocks.len(),
            found: coherent.zeta().len(),
        });
    }
    let mut ordered: Vec<&Block> = blocks.iter().collect();
    ordered.sort_by(|a, b| b.spin.cmp(&a.spin).then(a.start.cmp(&b.start)));
    let (c, s) = (
        (0.5 * coherent.theta()).cos(),
        (0.5 * coherent.theta()).sin(),
    );
    let mut psi = vec![ZERO; j.dim()];
    for (block, &zeta) in ordered.into_iter().zip(coherent.zeta()) {
        let tw = block.spin.twice() as i32;
        let mut binom = 1.0;
        for k in 0..=tw {
            if k > 0 {
                binom *= (tw - k + 1) as f64 / k as f64;
            }
            let mag = binom.sqrt() * c.powi(tw - k) * s.powi(k);
            psi[block.start + k as usize] += zeta * C64::from_polar(mag, k as f64 * coherent.phi());
        }
    }
    Ok(psi)
}

/// `psi^(x)N` in the occupation basis:
/// `sqrt(N! / prod n_k!) prod psi_k^{n_k}`.
pub fn product_state(psi: &[C64], basis: &Arc<FockBasis>) -> Result<SymmetricState> {
    if psi.len() != basis.modes {
        return Err(Error::DimensionMismatch {
            expected: basis.modes,
            found: psi.len(),
        });
    }
    let n = basis.n as usize;
    let mut ln_fact = vec![0.0; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let amplitudes = basis
        .occupations
        .par_iter()
        .map(|occ| {
            let mut ln_mult = ln_fact[n];
            let mut amp = C64::new(1.0, 0.0);
            for (&k, &z) in occ.iter().zip(psi) {
                if k > 0 {
                    ln_mult -= ln_fact[k as usize];
                    amp *= z.powu(k);
                }
            }
            amp * (0.5 * ln_mult).exp()
        })
        .collect();
    SymmetricState::new(basis.clone(), amplitudes)
}

/// Everything needed to simulate one class realization at fixed `N`.
#[derive(Clone, Debug)]
pub struct OracleSystem {
    triple: Su2Triple,
    blocks: Vec<Block>,
    basis: Arc<FockBasis>,
    ops: [CollectiveOperator; 3],
}

impl OracleSystem {
    pub fn new(subset: &VertexSubset, n: u32) -> Result<Self> {
        let triple = build_su2_triple(subset);
        let blocks = block_layout(subset);
        let basis = build_basis(n, subset.j())?;
        let [a, b, c] = triple.operators();
        let ops = [
            second_quantize(a, &basis)?,
            second_quantize(b, &basis)?,
            second_quantize(c, &basis)?,
        ];
        Ok(OracleSystem {
            triple,
            blocks,
            basis,
            ops,
        })
    }

    /// System for the class of `spec`, using the first subset realizing it.
    pub fn for_spec(spec: &EnsembleSpec) -> Result<Self> {
        let d = spec.decomposition();
        let subset = subset_for_subspins(d.j(), d.subspins())?;
        let n = u32::try_from(spec.n()).map_err(|_| Error::SizeLimit {
            size: f64::INFINITY,
            limit: SIZE_LIMIT,
        })?;
        OracleSystem::new(&subset, n)
    }

    pub fn triple(&self) -> &Su2Triple {
        &self.triple
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    /// Collective `(O1, O2, O3)`.
    pub fn operators(&self) -> &[CollectiveOperator; 3] {
        &self.ops
    }

    pub fn coherent_state(&self, spec: &EnsembleSpec) -> Result<SymmetricState> {
        self.check_spec(spec)?;
        let psi = single_particle_state(self.triple.j(), &self.blocks, spec.coherent())?;
        product_state(&psi, &self.basis)
    }

    /// `O3` restricted to each nontrivial block, lifted collectively.
    pub fn block_o3(&self) -> Result<Vec<CollectiveOperator>> {
        let o3 = self.triple.o3().diagonal();
        self.blocks
            .iter()
            .filter(|b| b.spin.twice() > 0)
            .map(|b| {
                let diag: Vec<f64> = (0..o3.len())
                    .map(|k| if b.levels().contains(&k) { o3[k] } else { 0.0 })
                    .collect();
                second_quantize(&HermitianOperator::from_diagonal(&diag), &self.basis)
            })
            .collect()
    }

    fn check_spec(&self, spec: &EnsembleSpec) -> Result<()> {
        if spec.n() != self.basis.n as u64 {
            return Err(Error::DimensionMismatch {
                expected: self.basis.n as usize,
                found: spec.n() as usize,
            });
        }
        if spec.decomposition().subspins() != self.triple.decomposition().subspins() {
            return Err(Error::WrongClass {
                expected: self.triple.decomposition().to_string(),
                found: spec.decomposition().to_string(),
            });
        }
        Ok(())
    }

    /// Twisting by `O3^2` followed by the full record.
    pub fn squeezing(&self, spec: &EnsembleSpec, mu: f64) -> Result<OracleRecord> {
        let state = self.coherent_state(spec)?;
        let evolved = evolve_oat(&state, &self.ops[2], mu, self.triple.f())?;
        self.record(spec, &evolved)
    }

    /// Twisting by `sum_l (O3 restricted to block l)^2`.
    pub fn squeezing_blockwise(&self, spec: &EnsembleSpec, mu: f64) -> Result<OracleRecord> {
        let state = self.coherent_state(spec)?;
        let evolved = evolve_blockwise_oat(&state, &self.block_o3()?, mu, self.triple.f())?;
        self.record(spec, &evolved)
    }

    pub fn record(&self, spec: &EnsembleSpec, state: &SymmetricState) -> Result<OracleRecord> {
        let [o1, o2, o3] = &self.ops;
        let perp = expectation(state, o1)?;
        let c22 = variance(state, o2)?;
        let c33 = variance(state, o3)?;
        let c23 = covariance(state, o2, o3)?;
        // var(O2 cos nu - O3 sin nu) = t + p cos 2nu - q sin 2nu
        let t = 0.5 * (c22 + c33);
        let p = 0.5 * (c22 - c33);
        let q = c23;
        let r = p.hypot(q);
        let var_min = t - r;
        let nu_min = (0.5 * q.atan2(-p)).rem_euclid(std::f64::consts::PI);
        let xi2 = 2.0 * spec.weighted_spin() * var_min / (perp * perp);
        Ok(OracleRecord {
            perp,
            var_min,
            var_max: t + r,
            nu_min,
            xi2,
            c22,
            c33,
            c23,
        })
    }
}

/// Brute-force counterpart of a squeezing trace point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleRecord {
    pub perp: f64,
    pub var_min: f64,
    pub var_max: f64,
    pub nu_min: f64,
    pub xi2: f64,
    /// Second moments of `(O2, O3)`; `c23` is the symmetrized covariance.
    pub c22: f64,
    pub c33: f64,
    pub c23: f64,
}

impl OracleRecord {
    /// Variance of `O2 cos nu - O3 sin nu`.
    pub fn variance_at(&self, nu: f64) -> f64 {
        let (s, c) = nu.sin_cos();
        self.c22 * c * c + self.c33 * s * s - 2.0 * self.c23 * s * c
    }
}

/// `xi^2` is only compared where `|<O_perp>|` exceeds this fraction of its
/// starting value.
pub const XI2_PERP_FLOOR: f64 = 1e-4;

/// Absolute gaps between a closed-form trace point and the oracle; the
/// `xi^2` gap is relative to `max(1, |xi^2|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Discrepancy {
    pub perp: f64,
    pub var_min: f64,
    pub var_max: f64,
    /// `None` when the mean spin is below the floor.
    pub xi2: Option<f64>,
}

impl Discrepancy {
    pub fn new(analytic: &SqueezeTrace, oracle: &OracleRecord, perp0: f64) -> Self {
        let xi2 = (analytic.perp_expectation.abs() >= XI2_PERP_FLOOR * perp0.abs())
            .then(|| (analytic.xi2 - oracle.xi2).abs() / analytic.xi2.abs().max(1.0));
        Discrepancy {
            perp: (analytic.perp_expectation - oracle.perp).abs(),
            var_min: (analytic.var_min - oracle.var_min).abs(),
            var_max: (analytic.var_max - oracle.var_max).abs(),
            xi2,
        }
    }

    pub fn max(&self) -> f64 {
        self.perp
            .max(self.var_min)
            .max(self.var_max)
            .max(self.xi2.unwrap_or(0.0))
    }
}

/// [`OracleSystem::squeezing`] for the class of `spec`.
pub fn oracle_squeezing(spec: &EnsembleSpec, mu: f64) -> Result<OracleRecord> {
    OracleSystem::for_spec(spec)?.squeezing(spec, mu)
}

/// Coherent state of `spec` on the blocks of `subset`.
pub fn coherent_state(
    spec: &EnsembleSpec,
    subset: &VertexSubset,
    basis: &Arc<FockBasis>,
) -> Result<SymmetricState> {
    let blocks = block_layout(subset);
    let psi = single_particle_state(subset.j(), &blocks, spec.coherent())?;
    product_state(&psi, basis)
}

fn diagonal_of(op: &CollectiveOperator) -> Result<&[f64]> {
    op.diagonal().ok_or_else(|| Error::NotDiagonal {
        magnitude: op.max_off_diagonal(),
    })
}

fn same_basis(state: &SymmetricState, op: &CollectiveOperator) -> Result<()> {
    if Arc::ptr_eq(&state.basis, &op.basis) || *state.basis == *op.basis {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: state.basis.len(),
            found: op.basis.len(),
        })
    }
}

/// `exp(-i mu O3^2 / (2 f^2))` applied to a state.
pub fn evolve_oat(
    state: &SymmetricState,
    o3: &CollectiveOperator,
    mu: f64,
    f: f64,
) -> Result<SymmetricState> {
    same_basis(state, o3)?;
    let d = diagonal_of(o3)?;
    let scale = -mu / (2.0 * f * f);
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(d)
        .map(|(&a, &x)| a * C64::from_polar(1.0, scale * x * x))
        .collect();
    SymmetricState::new(state.basis.clone(), amplitudes)
}

/// `exp(-i mu sum_l O3_l^2 / (2 f^2))` for commuting diagonal block parts.
pub fn evolve_blockwise_oat(
    state: &SymmetricState,
    parts: &[CollectiveOperator],
    mu: f64,
    f: f64,
) -> Result<SymmetricState> {
    let mut energy = vec![0.0; state.basis.len()];
    for op in parts {
        same_basis(state, op)?;
        for (e, &x) in energy.iter_mut().zip(diagonal_of(op)?) {
            *e += x * x;
        }
    }
    let scale = -mu / (2.0 * f * f);
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(&energy)
        .map(|(&a, &e)| a * C64::from_polar(1.0, scale * e))
        .collect();
    SymmetricState::new(state.basis.clone(), amplitudes)
}

pub fn expectation(state: &SymmetricState, op: &CollectiveOperator) -> Result<f64> {
    same_basis(state, op)?;
    let av = op.apply(&state.amplitudes);
    Ok(state
        .amplitudes
        .iter()
        .zip(&av)
        .map(|(a, b)| a.conj() * b)
        .sum::<C64>()
        .re)
}

pub fn variance(state: &SymmetricState, op: &CollectiveOperator) -> Result<f64> {
    covariance(state, op, op)
}

/// `<(AB + BA)/2> - <A><B>` for Hermitian `A`, `B`.
pub fn covariance(
    state: &SymmetricState,
    a: &CollectiveOperator,
    b: &CollectiveOperator,
) -> Result<f64> {
    same_basis(state, a)?;
    same_basis(state, b)?;
    let psi = &state.amplitudes;
    let av = a.apply(psi);
    let bv = b.apply(psi);
    let mean = |v: &[C64]| psi.iter().zip(v).map(|(x, y)| x.conj() * y).sum::<C64>().re;
    let second: f64 = av
        .iter()
        .zip(&bv)
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .re;
    Ok(second - mean(&av) * mean(&bv))
}
