//! Streaming Monte Carlo experiments.
//!
//! A run partitions `sample_count` draws over `worker_count` independent
//! [`RngStream`]s (sample i belongs to stream i mod workers), each worker
//! fills private [`BinnedEstimate`]s, and the partial results are merged in
//! worker order. Merging is elementwise counter addition -- associative,
//! commutative, identity = zero bins -- so the outcome is a pure function of
//! (config, seed, worker_count), byte-identical across schedulings.
//!
//! The X-state ensembles carry importance weights (see
//! [`crate::states::sample_xstate`]); their weighted sums ride along next to
//! the integer counters and the ratio estimate uses the delta-method
//! standard error. Unweighted ensembles keep weight 1 and both views agree
//! exactly.

use crate::chi::ChiEvaluator;
use crate::real::Prec;
use crate::states::rng::RngStream;
use crate::states::{
    is_ppt, mu_ratio, ppt_profile, sample_hs_ginibre, sample_xstate, sigma_ratio, tau_ratios,
    FieldKind,
};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Rebit4,
    Qubit4,
    RebitRetrit6,
    QubitQutrit6,
    XstateReal,
    XstateComplex,
}

impl Ensemble {
    pub fn parse(s: &str) -> Result<Ensemble> {
        Ok(match s {
            "rebit4" => Ensemble::Rebit4,
            "qubit4" => Ensemble::Qubit4,
            "rebit_retrit6" => Ensemble::RebitRetrit6,
            "qubit_qutrit6" => Ensemble::QubitQutrit6,
            "xstate_real" => Ensemble::XstateReal,
            "xstate_complex" => Ensemble::XstateComplex,
            other => {
                return Err(Error::Config(format!(
                    "unknown ensemble '{}' (expected rebit4, qubit4, rebit_retrit6, \
                     qubit_qutrit6, xstate_real, xstate_complex)",
                    other
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Ensemble::Rebit4 => "rebit4",
            Ensemble::Qubit4 => "qubit4",
            Ensemble::RebitRetrit6 => "rebit_retrit6",
            Ensemble::QubitQutrit6 => "qubit_qutrit6",
            Ensemble::XstateReal => "xstate_real",
            Ensemble::XstateComplex => "xstate_complex",
        }
    }

    pub fn weighted(&self) -> bool {
        matches!(self, Ensemble::XstateReal | Ensemble::XstateComplex)
    }

    pub fn dim(&self) -> usize {
        match self {
            Ensemble::RebitRetrit6 | Ensemble::QubitQutrit6 => 6,
            _ => 4,
        }
    }

    /// Dyson index of the separability function the binned curve is
    /// compared against (X-states use the plain power eps^d).
    pub fn default_chi_d(&self) -> Option<u32> {
        match self {
            Ensemble::Rebit4 | Ensemble::XstateReal => Some(1),
            Ensemble::Qubit4 | Ensemble::XstateComplex => Some(2),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Epsilon,
    Mu,
    Tau,
    Grid2d,
}

impl Axis {
    pub fn parse(s: &str) -> Result<Axis> {
        Ok(match s {
            "epsilon" => Axis::Epsilon,
            "mu" => Axis::Mu,
            "tau" => Axis::Tau,
            "grid2d" => Axis::Grid2d,
            other => {
                return Err(Error::Config(format!(
                    "unknown axis '{}' (expected epsilon, mu, tau, grid2d)",
                    other
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Axis::Epsilon => "epsilon",
            Axis::Mu => "mu",
            Axis::Tau => "tau",
            Axis::Grid2d => "grid2d",
        }
    }
}

/// Streaming histogram of (total, separable) counters over one axis.
#[derive(Clone, Debug, Serialize)]
pub struct BinnedEstimate {
    pub axis: Axis,
    /// bins per side (grid2d stores bin_count^2 cells, row-major)
    pub bin_count: usize,
    pub totals: Vec<u64>,
    pub separables: Vec<u64>,
    pub w_totals: Vec<f64>,
    pub w_separables: Vec<f64>,
}

impl BinnedEstimate {
    pub fn new(axis: Axis, bin_count: usize) -> Self {
        let cells = match axis {
            Axis::Grid2d => bin_count * bin_count,
            _ => bin_count,
        };
        BinnedEstimate {
            axis,
            bin_count,
            totals: vec![0; cells],
            separables: vec![0; cells],
            w_totals: vec![0.0; cells],
            w_separables: vec![0.0; cells],
        }
    }

    /// floor(v * bins), with v = 1 assigned to the last bin.
    #[inline]
    fn index(&self, v: f64) -> usize {
        let b = self.bin_count as f64;
        ((v.clamp(0.0, 1.0) * b) as usize).min(self.bin_count - 1)
    }

    #[inline]
    pub fn record(&mut self, v: f64, separable: bool, weight: f64) {
        let i = self.index(v);
        self.totals[i] += 1;
        self.w_totals[i] += weight;
        if separable {
            self.separables[i] += 1;
            self.w_separables[i] += weight;
        }
    }

    #[inline]
    pub fn record2(&mut self, v1: f64, v2: f64, separable: bool, weight: f64) {
        let i = self.index(v1) * self.bin_count + self.index(v2);
        self.totals[i] += 1;
        self.w_totals[i] += weight;
        if separable {
            self.separables[i] += 1;
            self.w_separables[i] += weight;
        }
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.bin_count as f64
    }

    pub fn total_count(&self) -> u64 {
        self.totals.iter().sum()
    }
}

/// Elementwise counter addition; shapes must match.
pub fn merge(a: &BinnedEstimate, b: &BinnedEstimate) -> Result<BinnedEstimate> {
    if a.axis != b.axis || a.bin_count != b.bin_count {
        return Err(Error::Shape(format!(
            "cannot merge {}/{} bins with {}/{}",
            a.axis.name(),
            a.bin_count,
            b.axis.name(),
            b.bin_count
        )));
    }
    let mut out = a.clone();
    for i in 0..out.totals.len() {
        out.totals[i] += b.totals[i];
        out.separables[i] += b.separables[i];
        out.w_totals[i] += b.w_totals[i];
        out.w_separables[i] += b.w_separables[i];
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ensemble: Ensemble,
    pub sample_count: u64,
    pub seed: u64,
    pub worker_count: u32,
    pub bin_count: usize,
    pub grid_bins: usize,
    pub axes: Vec<Axis>,
}

impl ExperimentConfig {
    pub fn new(ensemble: Ensemble, sample_count: u64, seed: u64) -> Self {
        let axes = match ensemble {
            Ensemble::Rebit4 | Ensemble::Qubit4 => vec![Axis::Epsilon, Axis::Mu],
            Ensemble::RebitRetrit6 | Ensemble::QubitQutrit6 => vec![Axis::Tau, Axis::Grid2d],
            _ => vec![Axis::Epsilon],
        };
        ExperimentConfig {
            ensemble,
            sample_count,
            seed,
            worker_count: 2,
            bin_count: 200,
            grid_bins: 80,
            axes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::Config("sample_count must be >= 1".into()));
        }
        if self.worker_count == 0 {
            return Err(Error::Config("worker_count must be >= 1".into()));
        }
        if self.bin_count == 0 || self.grid_bins == 0 {
            return Err(Error::Config("bin counts must be >= 1".into()));
        }
        for a in &self.axes {
            let ok = match a {
                Axis::Epsilon => true,
                Axis::Mu => self.ensemble.dim() == 4,
                Axis::Tau | Axis::Grid2d => self.ensemble.dim() == 6,
            };
            if !ok {
                return Err(Error::Config(format!(
                    "axis {} does not apply to ensemble {}",
                    a.name(),
                    self.ensemble.name()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub total: u64,
    pub separable: u64,
    pub w_total: f64,
    pub w_separable: f64,
    pub p_hat: f64,
    pub stderr: f64,
    /// fraction of samples whose partial transpose had exactly two negative
    /// eigenvalues (6x6 ensembles)
    pub neg2_fraction: Option<f64>,
    /// samples violating the empirical mu >= eps dominance (4x4 ensembles)
    pub dominance_violations: u64,
    pub bins: Vec<BinnedEstimate>,
    pub elapsed_secs: f64,
}

#[derive(Clone)]
struct WorkerPartial {
    total: u64,
    separable: u64,
    w_total: f64,
    w_separable: f64,
    w2_total: f64,
    w2_separable: f64,
    neg2: u64,
    dominance_violations: u64,
    bins: Vec<BinnedEstimate>,
}

fn run_worker(cfg: &ExperimentConfig, worker: u32) -> Result<WorkerPartial> {
    let w64 = cfg.worker_count as u64;
    let count = cfg.sample_count / w64
        + if (worker as u64) < cfg.sample_count % w64 {
            1
        } else {
            0
        };
    let mut rng = RngStream::new(cfg.seed, worker as u64);
    let mut bins: Vec<BinnedEstimate> = cfg
        .axes
        .iter()
        .map(|a| {
            let b = match a {
                Axis::Grid2d => cfg.grid_bins,
                _ => cfg.bin_count,
            };
            BinnedEstimate::new(*a, b)
        })
        .collect();
    let mut part = WorkerPartial {
        total: 0,
        separable: 0,
        w_total: 0.0,
        w_separable: 0.0,
        w2_total: 0.0,
        w2_separable: 0.0,
        neg2: 0,
        dominance_violations: 0,
        bins: Vec::new(),
    };
    for _ in 0..count {
        let (sep, weight, eps, eps2, mu, tau) = match cfg.ensemble {
            Ensemble::Rebit4 | Ensemble::Qubit4 => {
                let field = if cfg.ensemble == Ensemble::Rebit4 {
                    FieldKind::Real
                } else {
                    FieldKind::Complex
                };
                let rho = sample_hs_ginibre(field, 4, &mut rng);
                let sep = is_ppt(&rho);
                let sr = sigma_ratio(&rho)?;
                let mu = mu_ratio(&rho)?;
                if sr.eps > mu + 1e-12 {
                    part.dominance_violations += 1;
                }
                (sep, 1.0, sr.eps, None, Some(mu), None)
            }
            Ensemble::RebitRetrit6 | Ensemble::QubitQutrit6 => {
                let field = if cfg.ensemble == Ensemble::RebitRetrit6 {
                    FieldKind::Real
                } else {
                    FieldKind::Complex
                };
                let rho = sample_hs_ginibre(field, 6, &mut rng);
                let (sep, neg) = ppt_profile(&rho)?;
                if neg == 2 {
                    part.neg2 += 1;
                }
                let sr = sigma_ratio(&rho)?;
                let (_, _, tau) = tau_ratios(&rho)?;
                (sep, 1.0, sr.eps, sr.eps2, None, Some(tau))
            }
            Ensemble::XstateReal | Ensemble::XstateComplex => {
                let field = if cfg.ensemble == Ensemble::XstateReal {
                    FieldKind::Real
                } else {
                    FieldKind::Complex
                };
                let (rho, weight) = sample_xstate(field, &mut rng);
                let sep = is_ppt(&rho);
                let sr = sigma_ratio(&rho)?;
                (sep, weight, sr.eps, None, None, None)
            }
        };
        part.total += 1;
        part.w_total += weight;
        part.w2_total += weight * weight;
        if sep {
            part.separable += 1;
            part.w_separable += weight;
            part.w2_separable += weight * weight;
        }
        for b in bins.iter_mut() {
            match b.axis {
                Axis::Epsilon => b.record(eps, sep, weight),
                Axis::Mu => {
                    if let Some(m) = mu {
                        // mu is unbounded: bin min(mu, 1/mu)
                        b.record(m.min(1.0 / m), sep, weight)
                    }
                }
                Axis::Tau => {
                    if let Some(t) = tau {
                        b.record(t.min(1.0 / t), sep, weight)
                    }
                }
                Axis::Grid2d => {
                    if let Some(e2) = eps2 {
                        b.record2(eps, e2, sep, weight)
                    }
                }
            }
        }
    }
    part.bins = bins;
    Ok(part)
}

/// Runs the configured experiment. Deterministic given
/// (config, seed, worker_count); workers execute in parallel and merge in
/// worker order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = std::time::Instant::now();
    let partials: Vec<Result<WorkerPartial>> = (0..cfg.worker_count)
        .into_par_iter()
        .map(|w| run_worker(cfg, w))
        .collect();
    let mut acc: Option<WorkerPartial> = None;
    for p in partials {
        let p = p?;
        acc = Some(match acc {
            None => p,
            Some(mut a) => {
                a.total += p.total;
                a.separable += p.separable;
                a.w_total += p.w_total;
                a.w_separable += p.w_separable;
                a.w2_total += p.w2_total;
                a.w2_separable += p.w2_separable;
                a.neg2 += p.neg2;
                a.dominance_violations += p.dominance_violations;
                let merged: Result<Vec<BinnedEstimate>> = a
                    .bins
                    .iter()
                    .zip(p.bins.iter())
                    .map(|(x, y)| merge(x, y))
                    .collect();
                a.bins = merged?;
                a
            }
        });
    }
    let a = acc.expect("at least one worker");
    let (p_hat, stderr) = if cfg.ensemble.weighted() {
        let p = a.w_separable / a.w_total;
        // delta method on the ratio of weighted sums
        let var = (1.0 - 2.0 * p) * a.w2_separable + p * p * a.w2_total;
        (p, var.max(0.0).sqrt() / a.w_total)
    } else {
        let p = a.separable as f64 / a.total as f64;
        (p, (p * (1.0 - p) / a.total as f64).sqrt())
    };
    Ok(ExperimentResult {
        config: cfg.clone(),
        total: a.total,
        separable: a.separable,
        w_total: a.w_total,
        w_separable: a.w_separable,
        p_hat,
        stderr,
        neg2_fraction: match cfg.ensemble {
            Ensemble::RebitRetrit6 | Ensemble::QubitQutrit6 => {
                Some(a.neg2 as f64 / a.total as f64)
            }
            _ => None,
        },
        dominance_violations: a.dominance_violations,
        bins: a.bins,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// One row of the binned separability curve against a reference function.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualPoint {
    pub bin_center: f64,
    pub total: u64,
    pub separable: u64,
    pub p_hat: Option<f64>,
    pub chi: Option<f64>,
    pub residual: Option<f64>,
    /// totals below the floor (default 100) are flagged unreliable
    pub reliable: bool,
}

/// Per-bin empirical probability minus chi(bin center). Weighted ensembles
/// use the weighted ratio.
pub fn residual_curve<F>(
    bins: &BinnedEstimate,
    chi: F,
    reliability_floor: u64,
) -> Result<Vec<ResidualPoint>>
where
    F: Fn(f64) -> f64,
{
    if bins.axis == Axis::Grid2d {
        return Err(Error::Shape("residual curve needs a 1-d axis".into()));
    }
    let mut out = Vec::with_capacity(bins.totals.len());
    for i in 0..bins.totals.len() {
        let center = bins.bin_center(i);
        let total = bins.totals[i];
        let chi_v = chi(center);
        let p_hat = if bins.w_totals[i] > 0.0 {
            Some(bins.w_separables[i] / bins.w_totals[i])
        } else {
            None
        };
        out.push(ResidualPoint {
            bin_center: center,
            total,
            separable: bins.separables[i],
            p_hat,
            chi: Some(chi_v),
            residual: p_hat.map(|p| p - chi_v),
            reliable: total >= reliability_floor,
        });
    }
    Ok(out)
}

/// Residual curve against the ensemble's own separability function.
pub fn residual_curve_for(
    result: &ExperimentResult,
    prec: Prec,
) -> Result<Option<Vec<ResidualPoint>>> {
    let bins = match result.bins.iter().find(|b| b.axis == Axis::Epsilon) {
        Some(b) => b,
        None => return Ok(None),
    };
    let points = match result.config.ensemble {
        Ensemble::Rebit4 | Ensemble::Qubit4 => {
            let d = result.config.ensemble.default_chi_d().unwrap();
            let ev = ChiEvaluator::new(d, prec)?;
            residual_curve(bins, |e| ev.eval(&prec.f64(e)).to_f64(), 100)?
        }
        Ensemble::XstateReal => residual_curve(bins, |e| e, 100)?,
        Ensemble::XstateComplex => residual_curve(bins, |e| e * e, 100)?,
        _ => return Ok(None),
    };
    Ok(Some(points))
}

/// CSV with the fixed column order: bin_center, total, separable, p_hat,
/// chi, residual.
pub fn residual_csv(points: &[ResidualPoint]) -> String {
    let mut s = String::from("bin_center,total,separable,p_hat,chi,residual\n");
    for p in points {
        let fmt = |v: Option<f64>| v.map(|x| format!("{:.17e}", x)).unwrap_or_default();
        s.push_str(&format!(
            "{:.6},{},{},{},{},{}\n",
            p.bin_center,
            p.total,
            p.separable,
            fmt(p.p_hat),
            fmt(p.chi),
            fmt(p.residual),
        ));
    }
    s
}
