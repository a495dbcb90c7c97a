//! Scans of the squeezing limit over initial weights and particle number,
//! and power-law fits of the results.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classification::{decompose_subset, IrrepDecomposition, VertexSubset};
use crate::coherent_dynamics::{find_limit, CoherentSpec, EnsembleSpec};
use crate::error::{Error, Result};
use crate::spin::SpinQuantum;

/// How a class is named in a configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassRef {
    /// Dynkin vertices, 1-based.
    Subset(Vec<usize>),
    /// Subspins in any order.
    Subspins(Vec<SpinQuantum>),
}

impl ClassRef {
    pub fn resolve(&self, j: SpinQuantum) -> Result<IrrepDecomposition> {
        match self {
            ClassRef::Subset(v) => Ok(decompose_subset(&VertexSubset::new(j, v.iter().copied())?)),
            ClassRef::Subspins(s) => {
                let d = IrrepDecomposition::new(j, s.iter().copied())?;
                // must be realizable by some vertex subset
                crate::classification::subset_for_subspins(j, d.subspins())?;
                Ok(d)
            }
        }
    }
}

/// Where the weight `1 - |zeta_1|^2` goes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Remainder {
    /// Entirely on the second subspace.
    #[default]
    Second,
    /// Entirely on the subspace with this 0-based index (not 0).
    Index(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub j: SpinQuantum,
    pub class: ClassRef,
    /// One or more particle numbers.
    #[serde(deserialize_with = "one_or_many")]
    pub n: Vec<u64>,
    pub zeta1_sq_grid: Vec<f64>,
    #[serde(default)]
    pub remainder: Remainder,
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<u64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        One(u64),
        Many(Vec<u64>),
    }
    Ok(match Either::deserialize(d)? {
        Either::One(n) => vec![n],
        Either::Many(v) => v,
    })
}

impl ScanConfig {
    pub fn validate(&self) -> Result<IrrepDecomposition> {
        let d = self.class.resolve(self.j)?;
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(Error::InvalidArgument(
                "particle numbers must be positive".into(),
            ));
        }
        if self.zeta1_sq_grid.is_empty() {
            return Err(Error::InvalidArgument("empty |zeta_1|^2 grid".into()));
        }
        if self.zeta1_sq_grid.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidArgument(
                "|zeta_1|^2 grid values must lie in [0, 1]".into(),
            ));
        }
        if self.zeta1_sq_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "|zeta_1|^2 grid must be strictly increasing".into(),
            ));
        }
        let target = match self.remainder {
            Remainder::Second => 1,
            Remainder::Index(k) => k,
        };
        if d.r() == 1 {
            if self.zeta1_sq_grid.iter().any(|&w| w != 1.0) {
                return Err(Error::InvalidArgument(
                    "a single subspace only admits |zeta_1|^2 = 1".into(),
                ));
            }
        } else if target == 0 || target >= d.r() {
            return Err(Error::InvalidArgument(format!(
                "remainder index {target} outside 1..{}",
                d.r()
            )));
        }
        Ok(d)
    }

    fn weights(&self, r: usize, w: f64) -> Vec<f64> {
        let mut zeta = vec![0.0; r];
        zeta[0] = w.sqrt();
        if r > 1 {
            let k = match self.remainder {
                Remainder::Second => 1,
                Remainder::Index(k) => k,
            };
            zeta[k] = (1.0 - w).sqrt();
        }
        zeta
    }
}

/// Outcome of one limit search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    NoSqueezing,
    /// All weight sits on spin-0 subspaces.
    NoSpin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: u64,
    pub zeta1_sq: f64,
    pub xi2_min: Option<f64>,
    pub mu_min: Option<f64>,
    pub status: RowStatus,
}

fn limit_row(spec: &EnsembleSpec, zeta1_sq: f64) -> Result<ScanRow> {
    let base = ScanRow {
        n: spec.n(),
        zeta1_sq,
        xi2_min: None,
        mu_min: None,
        status: RowStatus::Ok,
    };
    if spec.leading_spin().is_none() {
        return Ok(ScanRow {
            status: RowStatus::NoSpin,
            ..base
        });
    }
    match find_limit(spec) {
        Ok(l) => Ok(ScanRow {
            xi2_min: Some(l.xi2_min),
            mu_min: Some(l.mu_min),
            ..base
        }),
        Err(Error::NoSqueezingFound { .. }) => Ok(ScanRow {
            status: RowStatus::NoSqueezing,
            ..base
        }),
        Err(e) => Err(e),
    }
}

/// Squeezing limit for every `(N, |zeta_1|^2)` pair, ordered by `N` then
/// `|zeta_1|^2`.
pub fn zeta_scan(config: &ScanConfig) -> Result<Vec<ScanRow>> {
    let d = config.validate()?;
    let mut ns = config.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let points: Vec<(u64, f64)> = ns
        .iter()
        .flat_map(|&n| config.zeta1_sq_grid.iter().map(move |&w| (n, w)))
        .collect();
    points
        .par_iter()
        .map(|&(n, w)| {
            let coherent = CoherentSpec::equatorial_real(&config.weights(d.r(), w))?;
            limit_row(&EnsembleSpec::new(n, d.clone(), coherent)?, w)
        })
        .collect()
}

/// Squeezing limit of one class and weight set over several `N`.
pub fn n_scan(spec: &EnsembleSpec, ns: &[u64]) -> Result<Vec<ScanRow>> {
    let zeta1_sq = spec.coherent().zeta()[0].norm_sqr();
    ns.par_iter()
        .map(|&n| limit_row(&spec.with_n(n)?, zeta1_sq))
        .collect()
}

/// `count` integers log-spaced from `lo` to `hi`.
pub fn log_spaced_n(lo: f64, hi: f64, count: usize) -> Vec<u64> {
    crate::coherent_dynamics::log_grid(lo, hi, count)
        .into_iter()
        .map(|x| x.round() as u64)
        .collect()
}

/// Power-law families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerLawModel {
    /// `c + a N^{-p} + b / N`
    OffsetPowerInverse,
    /// `a N^{-p}`
    Power,
}

impl PowerLawModel {
    pub fn names(self) -> &'static [&'static str] {
        match self {
            PowerLawModel::OffsetPowerInverse => &["c", "a", "p", "b"],
            PowerLawModel::Power => &["a", "p"],
        }
    }

    pub fn eval(self, theta: &[f64], n: f64) -> f64 {
        match self {
            PowerLawModel::OffsetPowerInverse => {
                theta[0] + theta[1] * n.powf(-theta[2]) + theta[3] / n
            }
            PowerLawModel::Power => theta[0] * n.powf(-theta[1]),
        }
    }

    fn gradient(self, theta: &[f64], n: f64) -> Vec<f64> {
        let ln = n.ln();
        match self {
            PowerLawModel::OffsetPowerInverse => {
                let t = n.powf(-theta[2]);
                vec![1.0, t, -theta[1] * ln * t, 1.0 / n]
            }
            PowerLawModel::Power => {
                let t = n.powf(-theta[1]);
                vec![t, -theta[0] * ln * t]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitParam {
    pub name: String,
    pub value: f64,
    pub std_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: PowerLawModel,
    pub params: Vec<FitParam>,
    /// `sqrt(sum of squared residuals)`.
    pub residual_norm: f64,
    pub iterations: usize,
}

impl FitResult {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn std_err(&self, name: &str) -> Option<f64> {
        self.params
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.std_err)
    }
}

const MAX_ITER: usize = 500;

/// Least-squares fit of `y(N)` to one of the power-law families.
pub fn fit_power_law(points: &[(f64, f64)], model: PowerLawModel) -> Result<FitResult> {
    if points.len() < 4 {
        return Err(Error::InvalidFitInput(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|&(n, y)| n <= 0.0 || !n.is_finite() || !y.is_finite())
    {
        return Err(Error::InvalidFitInput(
            "N must be positive and all values finite".into(),
        ));
    }
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    if ns.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidFitInput("N values must be distinct".into()));
    }

    let starts: Vec<Vec<f64>> = match model {
        PowerLawModel::Power => {
            let (a, p) = loglog(points, 0.0).unwrap_or((points[0].1, 0.5));
            vec![vec![a, p]]
        }
        PowerLawModel::OffsetPowerInverse => {
            let ymin = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let mut starts = Vec::new();
            for k in 0..20 {
                let c0 = if ymin > 0.0 {
                    ymin * k as f64 / 20.0
                } else {
                    ymin - 1.0 + k as f64 / 20.0
                };
                if let Some((a, p)) = loglog(points, c0) {
                    starts.push(vec![c0, a, p, 0.0]);
                }
            }
            if starts.is_empty() {
                starts.push(vec![0.0, 1.0, 0.5, 0.0]);
            }
            starts
        }
    };

    let mut best: Option<(Vec<f64>, f64, usize)> = None;
    let mut last_err = None;
    for start in starts {
        match levenberg_marquardt(points, model, start) {
            Ok((theta, sse, it)) => {
                if best.as_ref().is_none_or(|b| sse < b.1) {
                    best = Some((theta, sse, it));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (theta, sse, iterations) = best.ok_or_else(|| {
        last_err.unwrap_or(Error::FitDiverged {
            iterations: MAX_ITER,
        })
    })?;

    let jac = jacobian(points, model, &theta);
    let dof = points.len().saturating_sub(theta.len()).max(1) as f64;
    let cov = (jac.transpose() * &jac)
        .try_inverse()
        .map(|m| m * (sse / dof));
    let params = model
        .names()
        .iter()
        .enumerate()
        .map(|(k, name)| FitParam {
            name: name.to_string(),
            value: theta[k],
            std_err: cov.as_ref().map_or(f64::NAN, |c| c[(k, k)].max(0.0).sqrt()),
        })
        .collect();
    Ok(FitResult {
        model,
        params,
        residual_norm: sse.sqrt(),
        iterations,
    })
}

/// `ln(y - c0) = ln a - p ln N` by linear regression.
fn loglog(points: &[(f64, f64)], c0: f64) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > c0)
        .map(|&(n, y)| (n.ln(), (y - c0).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(((my - slope * mx).exp(), -slope))
}

fn jacobian(points: &[(f64, f64)], model: PowerLawModel, theta: &[f64]) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|&(n, _)| model.gradient(theta, n))
        .collect();
    DMatrix::from_fn(points.len(), theta.len(), |r, c| rows[r][c])
}

fn sse(points: &[(f64, f64)], model: PowerLawModel, theta: &[f64]) -> f64 {
    points
        .iter()
        .map(|&(n, y)| (model.eval(theta, n) - y).powi(2))
        .sum()
}

fn levenberg_marquardt(
    points: &[(f64, f64)],
    model: PowerLawModel,
    mut theta: Vec<f64>,
) -> Result<(Vec<f64>, f64, usize)> {
    let mut cost = sse(points, model, &theta);
    // residuals at rounding level of the data
    let floor = 1e-30 * points.iter().map(|p| p.1 * p.1).sum::<f64>();
    let mut lambda = 1e-3;
    for it in 1..=MAX_ITER {
        let jac = jacobian(points, model, &theta);
        let resid = DVector::from_iterator(
            points.len(),
            points.iter().map(|&(n, y)| model.eval(&theta, n) - y),
        );
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * resid;
        if cost <= floor || grad.amax() == 0.0 {
            return Ok((theta, cost, it));
        }
        loop {
            let mut a = jtj.clone();
            for k in 0..theta.len() {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let step = a.lu().solve(&(-&grad));
            let accepted = step.and_then(|step| {
                let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
                let c = sse(points, model, &trial);
                (c.is_finite() && c < cost).then_some((trial, c, step))
            });
            match accepted {
                Some((trial, c, step)) => {
                    let small = step
                        .iter()
                        .zip(&trial)
                        .all(|(s, t)| s.abs() <= 1e-14 * (t.abs() + 1e-14));
                    let flat = cost - c <= 1e-15 * cost;
                    theta = trial;
                    cost = c;
                    lambda = (lambda / 10.0).max(1e-15);
                    if small || flat {
                        return Ok((theta, cost, it));
                    }
                    break;
                }
                None => {
                    lambda *= 10.0;
                    if lambda > 1e20 {
                        // no descent direction left: a minimum
                        return Ok((theta, cost, it));
                    }
                }
            }
        }
    }
    Err(Error::FitDiverged {
        iterations: MAX_ITER,
    })
}
