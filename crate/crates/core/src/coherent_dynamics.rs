//! Closed-form coherent-state and one-axis-twisting dynamics.
//!
//! An ensemble of `N` spin-`J` particles starts in the product state
//! `[(+)_l zeta_l |theta, phi>_l]^(x)N` built on the blocks of an su(2)
//! class `{J_l}`. Twisting is generated by `O3^2` with rescaled time `mu`
//! from the equatorial state `theta = pi/2, phi = 0`, so the mean spin points
//! along `O1` and fluctuations live in the `O2`-`O3` plane, parametrized by
//! `O_nu = O2 cos nu - O3 sin nu`.
//!
//! The weights `zeta_l` pair with the subspins in the order of
//! [`IrrepDecomposition::subspins`] (largest first). Only `|zeta_l|^2`
//! enters the closed forms.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classification::IrrepDecomposition;
use crate::error::{Error, Result};
use crate::spin::SpinQuantum;

/// Tolerance on `sum |zeta_l|^2 = 1`.
pub const ZETA_NORM_TOL: f64 = 1e-12;
/// `|<O_perp>|` below this multiple of `f N` makes `xi^2` undefined.
pub const VANISHING_PERP: f64 = 1e-12;

const EQUATOR_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CoherentSpec {
    theta: f64,
    phi: f64,
    zeta: Vec<C64>,
}

impl CoherentSpec {
    pub fn new(theta: f64, phi: f64, zeta: Vec<C64>) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidCoherentState(format!(
                "theta = {theta} outside [0, pi]"
            )));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidCoherentState(format!(
                "phi = {phi} outside [0, 2pi)"
            )));
        }
        if zeta.is_empty() {
            return Err(Error::InvalidCoherentState("no subspace weights".into()));
        }
        let norm: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > ZETA_NORM_TOL {
            return Err(Error::InvalidCoherentState(format!(
                "sum |zeta|^2 = {norm}, expected 1"
            )));
        }
        Ok(CoherentSpec { theta, phi, zeta })
    }

    /// The state `theta = pi/2, phi = 0` that seeds one-axis twisting.
    pub fn equatorial(zeta: Vec<C64>) -> Result<Self> {
        CoherentSpec::new(FRAC_PI_2, 0.0, zeta)
    }

    /// Equatorial state with real weights.
    pub fn equatorial_real(zeta: &[f64]) -> Result<Self> {
        CoherentSpec::equatorial(zeta.iter().map(|&z| C64::new(z, 0.0)).collect())
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn zeta(&self) -> &[C64] {
        &self.zeta
    }

    fn is_equatorial(&self) -> bool {
        (self.theta - FRAC_PI_2).abs() < EQUATOR_TOL && self.phi.abs() < EQUATOR_TOL
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    n: u64,
    decomposition: IrrepDecomposition,
    coherent: CoherentSpec,
}

/// One subspace with nonzero spin: `(J_l, |zeta_l|^2)`.
#[derive(Clone, Copy, Debug)]
struct Active {
    twice: u32,
    j: f64,
    p: f64,
}

impl EnsembleSpec {
    pub fn new(n: u64, decomposition: IrrepDecomposition, coherent: CoherentSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "particle number must be at least 1".into(),
            ));
        }
        if coherent.zeta.len() != decomposition.r() {
            return Err(Error::DimensionMismatch {
                expected: decomposition.r(),
                found: coherent.zeta.len(),
            });
        }
        Ok(EnsembleSpec {
            n,
            decomposition,
            coherent,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn decomposition(&self) -> &IrrepDecomposition {
        &self.decomposition
    }

    pub fn coherent(&self) -> &CoherentSpec {
        &self.coherent
    }

    pub fn f(&self) -> f64 {
        self.decomposition.f()
    }

    /// Same class and `N` with new weights.
    pub fn with_coherent(&self, coherent: CoherentSpec) -> Result<Self> {
        EnsembleSpec::new(self.n, self.decomposition.clone(), coherent)
    }

    pub fn with_n(&self, n: u64) -> Result<Self> {
        EnsembleSpec::new(n, self.decomposition.clone(), self.coherent.clone())
    }

    fn active(&self) -> impl Iterator<Item = Active> + '_ {
        self.decomposition
            .subspins()
            .iter()
            .zip(&self.coherent.zeta)
            .filter(|(s, z)| s.twice() > 0 && z.norm_sqr() > 0.0)
            .map(|(s, z)| Active {
                twice: s.twice(),
                j: s.value(),
                p: z.norm_sqr(),
            })
    }

    /// `N sum_l J_l |zeta_l|^2`, the prefactor of the squeezing parameter.
    pub fn weighted_spin(&self) -> f64 {
        self.n as f64 * self.active().map(|a| a.j * a.p).sum::<f64>()
    }

    /// Largest subspin carrying weight.
    pub fn leading_spin(&self) -> Option<SpinQuantum> {
        self.active()
            .map(|a| SpinQuantum::from_twice(a.twice))
            .max()
    }

    fn require_equatorial(&self) -> Result<()> {
        if self.coherent.is_equatorial() {
            Ok(())
        } else {
            Err(Error::InvalidCoherentState(
                "twisting dynamics start from theta = pi/2, phi = 0".into(),
            ))
        }
    }
}

/// Mean spin and transverse fluctuations at one `mu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeTrace {
    pub mu: f64,
    pub perp_expectation: f64,
    pub var_min: f64,
    pub var_max: f64,
    pub nu_min: f64,
    /// NaN where the mean spin vanishes.
    pub xi2: f64,
}

/// Extremes of `<(Delta O_nu)^2>` over `nu`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransverseFluctuation {
    pub var_min: f64,
    pub var_max: f64,
    /// In `[0, pi)`; 0 when the fluctuations are isotropic.
    pub nu_min: f64,
    pub isotropic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitResult {
    pub xi2_min: f64,
    pub mu_min: f64,
    pub iterations: usize,
}

// Integer powers, accurate near base 1 and safe for huge exponents.

/// `b^k` for integer `k`, negative bases allowed.
fn powi(b: f64, k: i64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if b == 0.0 {
        return if k > 0 { 0.0 } else { f64::INFINITY };
    }
    let mag = (k as f64 * b.abs().ln()).exp();
    if b < 0.0 && k % 2 != 0 {
        -mag
    } else {
        mag
    }
}

/// `ln cos x` for `cos x > 0`.
fn ln_cos(x: f64) -> f64 {
    let s = x.sin();
    0.5 * (-s * s).ln_1p()
}

/// `1 - cos^k x`.
fn one_minus_cos_pow(x: f64, k: i64) -> f64 {
    if x.cos() > 0.0 {
        -(k as f64 * ln_cos(x)).exp_m1()
    } else {
        1.0 - powi(x.cos(), k)
    }
}

/// The per-particle survival factor `1 - p (1 - cos^{2J} x)`.
#[derive(Clone, Copy)]
struct Bracket {
    value: f64,
    /// `ln(value)` when positive.
    ln: Option<f64>,
}

impl Bracket {
    fn new(a: Active, x: f64) -> Self {
        let loss = a.p * one_minus_cos_pow(x, a.twice as i64);
        let value = 1.0 - loss;
        let ln = (value > 0.0).then(|| (-loss).ln_1p());
        Bracket { value, ln }
    }

    fn pow(&self, k: i64) -> f64 {
        match self.ln {
            Some(l) => (k as f64 * l).exp(),
            None => powi(self.value, k),
        }
    }

    /// `1 - cos^a(x) * bracket^k`.
    fn one_minus(&self, x: f64, a: i64, k: i64) -> f64 {
        match self.ln {
            Some(l) if a == 0 => -(k as f64 * l).exp_m1(),
            Some(l) if x.cos() > 0.0 => -(a as f64 * ln_cos(x) + k as f64 * l).exp_m1(),
            _ => 1.0 - powi(x.cos(), a) * powi(self.value, k),
        }
    }
}

/// `f N sum_l J_l |zeta_l|^2`, valid for any `theta, phi`.
pub fn css_expectation_perp(spec: &EnsembleSpec) -> f64 {
    spec.f() * spec.weighted_spin()
}

/// `(f^2 N / 2) sum_l J_l |zeta_l|^2`, the same for every `nu`.
pub fn css_fluctuation(spec: &EnsembleSpec, _nu: f64) -> f64 {
    0.5 * spec.f() * spec.f() * spec.weighted_spin()
}

/// `<O1>` after twisting for `mu`.
pub fn oat_expectation_perp(spec: &EnsembleSpec, mu: f64) -> Result<f64> {
    spec.require_equatorial()?;
    let n = spec.n as i64;
    let half = 0.5 * mu;
    let total: f64 = spec
        .active()
        .map(|a| {
            let br = Bracket::new(a, half);
            a.j * a.p * powi(half.cos(), a.twice as i64 - 1) * br.pow(n - 1)
        })
        .sum();
    Ok(spec.f() * spec.n as f64 * total)
}

/// Coefficients of `<(Delta O_nu)^2> = c + p cos 2nu - q sin 2nu`.
#[derive(Clone, Copy, Debug)]
struct Harmonics {
    c: f64,
    p: f64,
    q: f64,
}

fn harmonics(spec: &EnsembleSpec, mu: f64) -> Harmonics {
    let n = spec.n as i64;
    let nf = spec.n as f64;
    let half = 0.5 * mu;
    let mut out = Harmonics {
        c: 0.0,
        p: 0.0,
        q: 0.0,
    };
    for a in spec.active() {
        let tw = a.twice as i64;
        let full = Bracket::new(a, mu);
        let br = Bracket::new(a, half);
        // J = 1/2 drops every (J - 1/2) term
        let excess = a.j - 0.5;

        let mut coef_a = 0.0;
        if n >= 2 {
            coef_a += 0.5 * a.j * (nf - 1.0) * a.p * full.one_minus(mu, 2 * (tw - 1), n - 2);
        }
        if tw > 1 {
            coef_a += 0.5 * excess * full.one_minus(mu, tw - 2, n - 1);
        }

        let mut coef_b = 0.0;
        if n >= 2 {
            coef_b += a.j * (nf - 1.0) * a.p * powi(half.cos(), 2 * tw - 2) * br.pow(n - 2);
        }
        if tw > 1 {
            coef_b += excess * powi(half.cos(), tw - 2) * br.pow(n - 1);
        }
        coef_b *= 2.0 * half.sin();

        let w = 0.5 * spec.f() * spec.f() * nf * a.j * a.p;
        out.c += w * (1.0 + coef_a);
        out.p += w * coef_a;
        out.q += w * coef_b;
    }
    out
}

/// `<(Delta O_nu)^2>` after twisting for `mu`.
pub fn oat_fluctuation(spec: &EnsembleSpec, mu: f64, nu: f64) -> Result<f64> {
    spec.require_equatorial()?;
    let h = harmonics(spec, mu);
    Ok(h.c + h.p * (2.0 * nu).cos() - h.q * (2.0 * nu).sin())
}

/// Minimum and maximum of [`oat_fluctuation`] over `nu`.
pub fn min_fluctuation(spec: &EnsembleSpec, mu: f64) -> Result<TransverseFluctuation> {
    spec.require_equatorial()?;
    let h = harmonics(spec, mu);
    let r = h.p.hypot(h.q);
    let isotropic = r <= 1e-15 * h.c.abs().max(1.0);
    let nu_min = if isotropic {
        0.0
    } else {
        (0.5 * h.q.atan2(-h.p)).rem_euclid(PI)
    };
    Ok(TransverseFluctuation {
        var_min: h.c - r,
        var_max: h.c + r,
        nu_min,
        isotropic,
    })
}

/// `xi^2 = 2 N sum_l J_l |zeta_l|^2 * min_nu var / <O_perp>^2`.
pub fn squeezing_parameter(spec: &EnsembleSpec, mu: f64) -> Result<f64> {
    let perp = oat_expectation_perp(spec, mu)?;
    check_perp(spec, perp)?;
    let fl = min_fluctuation(spec, mu)?;
    Ok(2.0 * spec.weighted_spin() * fl.var_min / (perp * perp))
}

fn check_perp(spec: &EnsembleSpec, perp: f64) -> Result<()> {
    if perp.abs() < VANISHING_PERP * spec.f() * spec.n as f64 || !perp.is_finite() {
        Err(Error::VanishingMeanSpin { perp })
    } else {
        Ok(())
    }
}

/// Full record at one `mu`.
pub fn trace(spec: &EnsembleSpec, mu: f64) -> Result<SqueezeTrace> {
    let perp = oat_expectation_perp(spec, mu)?;
    let fl = min_fluctuation(spec, mu)?;
    let xi2 = match check_perp(spec, perp) {
        Ok(()) => 2.0 * spec.weighted_spin() * fl.var_min / (perp * perp),
        Err(_) => f64::NAN,
    };
    Ok(SqueezeTrace {
        mu,
        perp_expectation: perp,
        var_min: fl.var_min,
        var_max: fl.var_max,
        nu_min: fl.nu_min,
        xi2,
    })
}

/// [`trace`] over many `mu` in parallel, in input order.
pub fn sweep(spec: &EnsembleSpec, mus: &[f64]) -> Result<Vec<SqueezeTrace>> {
    spec.require_equatorial()?;
    mus.par_iter().map(|&mu| trace(spec, mu)).collect()
}

/// `n` points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = linear_grid(a, b, n).into_iter().map(f64::exp).collect();
    if n > 1 {
        grid[0] = lo;
        grid[n - 1] = hi;
    }
    grid
}

// Single populated subspace, |zeta_l0|^2 = 1.

/// `<O1> = f J N cos^{2JN-1}(mu/2)` for all weight on one spin-`J` block.
pub fn single_subspace_expectation(f: f64, j: SpinQuantum, n: u64, mu: f64) -> f64 {
    let e = (j.twice() as u64 * n) as i64 - 1;
    f * j.value() * n as f64 * powi((0.5 * mu).cos(), e)
}

/// Fluctuation of `O_nu` for all weight on one spin-`J` block.
pub fn single_subspace_fluctuation(f: f64, j: SpinQuantum, n: u64, mu: f64, nu: f64) -> f64 {
    let jn = j.value() * n as f64;
    let e = (j.twice() as u64 * n) as i64 - 2;
    let a = one_minus_cos_pow(mu, e);
    let b = 4.0 * (0.5 * mu).sin() * powi((0.5 * mu).cos(), e);
    0.5 * f
        * f
        * jn
        * (1.0 + 0.5 * (jn - 0.5) * (a * (1.0 + (2.0 * nu).cos()) - b * (2.0 * nu).sin()))
}

/// Search options for [`find_limit_with`].
#[derive(Clone, Copy, Debug)]
pub struct LimitOptions {
    pub grid_points: usize,
    pub rel_tol: f64,
    /// Upper end of the first grid; defaults to `200 (J_1 N)^{-2/3}`.
    pub mu_hi: Option<f64>,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            grid_points: 128,
            rel_tol: 1e-6,
            mu_hi: None,
        }
    }
}

/// Minimum of `xi^2(mu)`.
pub fn find_limit(spec: &EnsembleSpec) -> Result<LimitResult> {
    find_limit_with(spec, &LimitOptions::default())
}

pub fn find_limit_with(spec: &EnsembleSpec, opts: &LimitOptions) -> Result<LimitResult> {
    spec.require_equatorial()?;
    let lead = spec.leading_spin().ok_or_else(|| {
        Error::InvalidCoherentState("no weight on a subspace with nonzero spin".into())
    })?;
    let xi = |mu: f64| squeezing_parameter(spec, mu).unwrap_or(f64::INFINITY);

    let scale = (lead.value() * spec.n as f64).powf(-2.0 / 3.0);
    let mut hi = opts.mu_hi.unwrap_or(200.0 * scale).min(PI);
    let mut lo = hi * 1e-5;
    let points = opts.grid_points.max(3);
    let (mut grid, mut values);
    let mut best;
    loop {
        grid = log_grid(lo, hi, points);
        values = grid.iter().map(|&m| xi(m)).collect::<Vec<_>>();
        best = (0..points)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .expect("nonempty grid");
        if best == points - 1 && hi < PI {
            hi = (hi * 4.0).min(PI);
        } else if best == 0 && lo > 1e-300 {
            lo *= 1e-3;
        } else {
            break;
        }
    }

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(points - 1)];
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (xi(x1), xi(x2));
    let mut iterations = 0;
    while (b - a) > opts.rel_tol * 0.5 * (a + b) && iterations < 500 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = xi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = xi(x2);
        }
        iterations += 1;
    }
    let (mut mu_min, mut xi2_min) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if values[best] < xi2_min {
        mu_min = grid[best];
        xi2_min = values[best];
    }
    if xi2_min.is_nan() || xi2_min >= 1.0 {
        return Err(Error::NoSqueezingFound { xi2_min, mu_min });
    }
    Ok(LimitResult {
        xi2_min,
        mu_min,
        iterations,
    })
}

/// Large-`N` approximation of the limit for all weight on one block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticLimit {
    pub xi2: f64,
    pub mu: f64,
}

/// `xi^2 ~ 1/(4 alpha^2) + 2 beta^2 / 3 + beta / (2 alpha^2)` at one `mu`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticPoint {
    pub xi2: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `alpha >= 10`
    pub alpha_large: bool,
    /// `beta <= 0.1`
    pub beta_small: bool,
}

/// `xi^2_min = (1/2)(3 / (2 J N))^{2/3} + 1 / (2 J N)` at
/// `mu = 12^{1/6} (J N)^{-2/3}`.
pub fn asymptotic_limit_r1(j_sub: SpinQuantum, n: u64) -> Result<AsymptoticLimit> {
    j_sub.require_nontrivial()?;
    if n < 2 {
        return Err(Error::InvalidArgument("asymptotics need N >= 2".into()));
    }
    let jn = j_sub.value() * n as f64;
    Ok(AsymptoticLimit {
        xi2: 0.5 * (1.5 / jn).powf(2.0 / 3.0) + 0.5 / jn,
        mu: 12f64.powf(1.0 / 6.0) * jn.powf(-2.0 / 3.0),
    })
}

pub fn asymptotic_xi2_r1(j_sub: SpinQuantum, n: u64, mu: f64) -> AsymptoticPoint {
    let jn = j_sub.value() * n as f64;
    let alpha = 0.5 * jn * mu;
    let beta = 0.25 * jn * mu * mu;
    let a2 = alpha * alpha;
    AsymptoticPoint {
        xi2: 0.25 / a2 + 2.0 / 3.0 * beta * beta + 0.5 * beta / a2,
        alpha,
        beta,
        alpha_large: alpha >= 10.0,
        beta_small: beta <= 0.1,
    }
}

/// Closed form for the `{1/2, 1/2}` class:
/// `xi^2 = [1 + (N-1)/4 sum_l Delta_l] / sum_l p_l (1 - 2 p_l sin^2(mu/4))^{N-1}`
/// with `Delta_l = g_l - sqrt(g_l^2 + h_l^2)`,
/// `g_l = 1 - (1 - 2 p_l sin^2(mu/2))^{N-2}` and
/// `h_l = 4 p_l sin(mu/2) (1 - 2 p_l sin^2(mu/4))^{N-2}`.
pub fn type_iii_xi(spec: &EnsembleSpec, mu: f64) -> Result<f64> {
    let subspins = spec.decomposition.subspins();
    if subspins != [SpinQuantum::HALF, SpinQuantum::HALF] {
        return Err(Error::WrongClass {
            expected: "{1/2, 1/2}".into(),
            found: spec.decomposition.to_string(),
        });
    }
    let n = spec.n as i64;
    let nf = spec.n as f64;
    let s2 = (0.5 * mu).sin();
    let s4 = (0.25 * mu).sin();
    let mut num = 1.0;
    let mut den = 0.0;
    for z in &spec.coherent.zeta {
        let p = z.norm_sqr();
        let g = 1.0 - powi(1.0 - 2.0 * p * s2 * s2, n - 2);
        let h = 4.0 * p * s2 * powi(1.0 - 2.0 * p * s4 * s4, n - 2);
        num += 0.25 * (nf - 1.0) * (g - g.hypot(h));
        den += p * powi(1.0 - 2.0 * p * s4 * s4, n - 1);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classification::{decompose_subset, VertexSubset};

    const J32: SpinQuantum = SpinQuantum::from_twice(3);

    fn spec(vertices: &[usize], zeta: &[f64], n: u64) -> EnsembleSpec {
        let d = decompose_subset(&VertexSubset::new(J32, vertices.iter().copied()).unwrap());
        EnsembleSpec::new(n, d, CoherentSpec::equatorial_real(zeta).unwrap()).unwrap()
    }

    #[test]
    fn powers() {
        assert!((powi(-2.0, 3) + 8.0).abs() < 1e-12);
        assert!((powi(-0.5, 2) - 0.25).abs() < 1e-15);
        assert_eq!(powi(0.0, 5), 0.0);
        assert_eq!(powi(0.0, 0), 1.0);
        assert!((one_minus_cos_pow(1e-4, 3) / (1.5e-8 - 8.75e-17) - 1.0).abs() < 1e-12);
        assert!((one_minus_cos_pow(3.0, 2) - (1.0 - 3f64.cos().powi(2))).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(CoherentSpec::equatorial_real(&[0.5, 0.5]).is_err());
        assert!(CoherentSpec::new(4.0, 0.0, vec![C64::new(1.0, 0.0)]).is_err());
        let d = decompose_subset(&VertexSubset::new(J32, [1, 3]).unwrap());
        let c = CoherentSpec::equatorial_real(&[1.0]).unwrap();
        assert!(matches!(
            EnsembleSpec::new(5, d.clone(), c),
            Err(Error::DimensionMismatch { .. })
        ));
        let c = CoherentSpec::equatorial_real(&[1.0, 0.0]).unwrap();
        assert!(EnsembleSpec::new(0, d, c).is_err());
    }

    #[test]
    fn css_values() {
        let s = spec(&[1, 2, 3], &[1.0], 4);
        assert_eq!(css_expectation_perp(&s), 6.0);
        assert_eq!(css_fluctuation(&s, 0.3), 3.0);
        let s = spec(&[1, 2], &[1.0, 0.0], 10);
        assert!((css_expectation_perp(&s) - 2.5f64.sqrt() * 10.0).abs() < 1e-12);
        let s = spec(&[1, 2], &[0.0, 1.0], 10);
        assert_eq!(css_expectation_perp(&s), 0.0);
        let h = 0.5f64.sqrt();
        let s = spec(&[1, 3], &[h, h], 6);
        assert!((css_fluctuation(&s, 0.0) - 7.5).abs() < 1e-12);
    }

    #[test]
    fn twisting_reduces_to_css_at_zero() {
        let s = spec(&[1, 2], &[0.8, 0.6], 8);
        assert!((oat_expectation_perp(&s, 0.0).unwrap() - css_expectation_perp(&s)).abs() < 1e-12);
        let fl = min_fluctuation(&s, 0.0).unwrap();
        assert!(fl.isotropic);
        assert!((fl.var_min - css_fluctuation(&s, 0.0)).abs() < 1e-12);
        assert!((squeezing_parameter(&s, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn type_one_mean_spin_vanishes_at_pi() {
        let s = spec(&[1, 2, 3], &[1.0], 7);
        assert!(oat_expectation_perp(&s, PI).unwrap().abs() < 1e-12);
        assert!(matches!(
            squeezing_parameter(&s, PI),
            Err(Error::VanishingMeanSpin { .. })
        ));
        assert!(trace(&s, PI).unwrap().xi2.is_nan());
    }

    #[test]
    fn minimum_bounds_nu_grid() {
        let s = spec(&[1, 3], &[0.6, 0.8], 9);
        for mu in [0.01, 0.3, 1.0, 2.5] {
            let fl = min_fluctuation(&s, mu).unwrap();
            for k in 0..360 {
                let nu = PI * k as f64 / 360.0;
                let v = oat_fluctuation(&s, mu, nu).unwrap();
                assert!(v >= fl.var_min - 1e-9 && v <= fl.var_max + 1e-9);
            }
            let at = oat_fluctuation(&s, mu, fl.nu_min).unwrap();
            assert!((at - fl.var_min).abs() < 1e-9 * fl.var_max.max(1.0));
        }
    }

    #[test]
    fn single_subspace_path_agrees() {
        for (vertices, zeta, twice) in [
            (&[1usize, 2, 3][..], &[1.0][..], 3u32),
            (&[1, 2][..], &[1.0, 0.0][..], 2),
            (&[1][..], &[1.0, 0.0, 0.0][..], 1),
        ] {
            let s = spec(vertices, zeta, 11);
            let j = SpinQuantum::from_twice(twice);
            for k in 0..40 {
                let mu = PI * k as f64 / 39.0;
                let a = oat_expectation_perp(&s, mu).unwrap();
                let b = single_subspace_expectation(s.f(), j, 11, mu);
                assert!((a - b).abs() < 1e-10);
                for nu in [0.0, 0.4, 1.3, 2.9] {
                    let a = oat_fluctuation(&s, mu, nu).unwrap();
                    let b = single_subspace_fluctuation(s.f(), j, 11, mu, nu);
                    assert!(
                        (a - b).abs() < 1e-10 * a.abs().max(1.0),
                        "mu {mu} nu {nu}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn nu_min_follows_asymptotic_angle() {
        let s = spec(&[1, 2, 3], &[1.0], 100_000);
        let mu = 5e-4;
        let alpha = asymptotic_xi2_r1(J32, 100_000, mu).alpha;
        let fl = min_fluctuation(&s, mu).unwrap();
        assert!((fl.nu_min - (FRAC_PI_2 - 0.5 * (1.0 / alpha).atan())).abs() < 1e-3);
    }

    #[test]
    fn type_one_limit() {
        let n = 100_000u64;
        let s = spec(&[1, 2, 3], &[1.0], n);
        let lim = find_limit(&s).unwrap();
        let nf = n as f64;
        let xi_ref = 0.5 * nf.powf(-2.0 / 3.0) + 1.0 / (3.0 * nf);
        let mu_ref = 2.0 / 3f64.sqrt() * nf.powf(-2.0 / 3.0);
        assert!((lim.xi2_min / xi_ref - 1.0).abs() < 0.05);
        assert!((lim.mu_min / mu_ref - 1.0).abs() < 0.05);
        let asym = asymptotic_limit_r1(J32, n).unwrap();
        assert!((asym.xi2 - xi_ref).abs() < 1e-15);
        assert!((asym.mu - mu_ref).abs() < 1e-15);
        let point = asymptotic_xi2_r1(J32, n, asym.mu);
        assert!(point.alpha_large && point.beta_small);
    }

    #[test]
    fn no_squeezing_reported() {
        // a single spin-1/2 cannot be twisted
        let s = spec(&[1], &[1.0, 0.0, 0.0], 1);
        assert!(matches!(
            find_limit(&s),
            Err(Error::NoSqueezingFound { .. })
        ));
    }

    #[test]
    fn type_iii_closed_form_class_check() {
        let s = spec(&[1, 2], &[1.0, 0.0], 10);
        assert!(matches!(
            type_iii_xi(&s, 0.1),
            Err(Error::WrongClass { .. })
        ));
        let h = 0.5f64.sqrt();
        let s = spec(&[1, 3], &[h, h], 10);
        assert!((type_iii_xi(&s, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_equatorial_rejected() {
        let d = decompose_subset(&VertexSubset::new(J32, [1, 2, 3]).unwrap());
        let c = CoherentSpec::new(0.3, 0.0, vec![C64::new(1.0, 0.0)]).unwrap();
        let s = EnsembleSpec::new(4, d, c).unwrap();
        assert_eq!(css_expectation_perp(&s), 6.0);
        assert!(oat_expectation_perp(&s, 0.1).is_err());
    }
}
