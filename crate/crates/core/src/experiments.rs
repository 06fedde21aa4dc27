//! Seeded experiment campaigns: figure reproduction, coupling-error sweeps
//! over `N`, profile-error curves and Monte-Carlo checks of the limit curve.
//!
//! Every replica seed is derived from the master seed and the `(N, replica)`
//! pair, and results are collected in index order, so reruns are
//! byte-identical regardless of thread count.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::graphon::{
    io as graph_io, sample_graph, sample_positions, Dilution, GraphSummary, GraphonKernel, InteractionGraph,
    PositionScheme, Quadrature,
};
use crate::hawkes_sim::{simulate, simulate_coupled, spatial_profile, SimOptions, SimStats, SpikeRecord};
use crate::limit_solver::{macroscopic_profile, solve_lambda, IntensityField, SolverOptions, TimeGrid};
use crate::longtime::{analyse, longtime_baseline, stationary_limit, DiscreteOperator, CRITICAL_BAND};
use crate::model::{Baseline, HawkesModel};
use crate::par;
use crate::rng::derive_seed;
use crate::stats::{self, LinearFit};

const TAG_POSITIONS: u64 = 1;
const TAG_GRAPH: u64 = 2;
const TAG_SPIKES: u64 = 3;
const TAG_QUENCHED: u64 = 4;

/// Everything needed to sample a network and solve its limit.
#[derive(Debug, Clone)]
pub struct Setup {
    pub name: String,
    pub kernel: GraphonKernel,
    pub dilution: Dilution,
    pub scheme: PositionScheme,
    pub model: HawkesModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [FigureId::Fig1, FigureId::Fig2, FigureId::Fig3, FigureId::Fig4];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(FigureId::Fig1),
            "fig2" => Ok(FigureId::Fig2),
            "fig3" => Ok(FigureId::Fig3),
            "fig4" => Ok(FigureId::Fig4),
            other => Err(Error::InvalidArgument(format!(
                "unknown figure `{other}` (expected fig1, fig2, fig3 or fig4)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
        }
    }

    fn file_stem(self) -> &'static str {
        match self {
            FigureId::Fig1 => "figure1",
            FigureId::Fig2 => "figure2",
            FigureId::Fig3 => "figure3",
            FigureId::Fig4 => "figure4",
        }
    }

    /// Default `(N, T)`.
    pub fn default_size(self) -> (usize, f64) {
        match self {
            FigureId::Fig1 | FigureId::Fig2 => (1000, 5.0),
            FigureId::Fig3 | FigureId::Fig4 => (500, 10.0),
        }
    }

    fn trace_positions(self) -> &'static [f64] {
        match self {
            FigureId::Fig2 => &[0.5, 0.75],
            _ => &[0.25, 0.5, 0.75],
        }
    }
}

impl Setup {
    /// `h = e^{−2t}`, linear rate, dense graph, positions `x_i = i/N`.
    pub fn figure(id: FigureId) -> Result<Self> {
        let (kernel, baseline) = match id {
            FigureId::Fig1 => (GraphonKernel::constant(0.5), Baseline::Affine { a: 1.0, b: 1.0 }),
            FigureId::Fig2 => (GraphonKernel::constant(0.5), Baseline::Constant(1.0)),
            FigureId::Fig3 => (GraphonKernel::p_nearest(0.1)?, Baseline::Constant(1.0)),
            FigureId::Fig4 => (GraphonKernel::product(), Baseline::Constant(1.0)),
        };
        let model = HawkesModel::linear_exponential(2.0, 1.0)?.with_baseline(baseline)?;
        Ok(Setup {
            name: id.as_str().into(),
            kernel,
            dilution: Dilution::dense(),
            scheme: PositionScheme::RegularGrid,
            model,
        })
    }

    /// `W ≡ 0`, `u0 ≡ c`: independent Poisson neurons equal to their limit.
    pub fn uncoupled(c: f64) -> Result<Self> {
        Ok(Setup {
            name: "null".into(),
            kernel: GraphonKernel::constant(0.0),
            dilution: Dilution::dense(),
            scheme: PositionScheme::RegularGrid,
            model: HawkesModel::linear_exponential(2.0, c)?,
        })
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        Ok(Setup {
            name: "config".into(),
            kernel: cfg.kernel()?,
            dilution: cfg.dilution()?,
            scheme: cfg.scheme()?,
            model: cfg.model()?,
        })
    }

    /// Positions and graph, each from its own seed derived from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<InteractionGraph> {
        let positions = sample_positions(&self.scheme, n, derive_seed(seed, &[TAG_POSITIONS]))?;
        sample_graph(&self.kernel, &positions, &self.dilution, derive_seed(seed, &[TAG_GRAPH]))
    }

    pub fn solve(&self, t_end: f64, opts: &SolverOptions) -> Result<IntensityField> {
        solve_lambda(&self.kernel, &self.model, t_end, opts)
    }

    fn describe(&self) -> serde_json::Value {
        json!({
            "name": self.name,
            "kernel": format!("{:?}", self.kernel.kind()),
            "dilution": { "rho": self.dilution.rho, "kappa": format!("{:?}", self.dilution.kappa) },
            "positions": if self.scheme.is_regular() { "regular".to_string() } else { format!("iid {:?}", self.scheme.measure()) },
            "f": self.model.rate.name(),
            "h": format!("{:?}", self.model.kernel),
            "u0": format!("{:?}", self.model.baseline),
        })
    }
}

/// `ℓ(x) = u(x) + ‖u‖₁ ‖h‖₁ρ / (1 − ‖h‖₁ρ)` for a constant kernel `W ≡ ρ` and uniform `ν`.
pub fn constant_kernel_limit(u: impl Fn(f64) -> f64 + 'static, rho: f64, h_norm1: f64) -> Result<Box<dyn Fn(f64) -> f64>> {
    let q = h_norm1 * rho;
    if !(q < 1.0) {
        return Err(Error::InvalidState(format!("‖h‖₁ρ = {q} is not subcritical")));
    }
    let quad = Quadrature::uniform(4000)?;
    let mean_u = quad.integrate(&u);
    let shift = mean_u * q / (1.0 - q);
    Ok(Box::new(move |x| u(x) + shift))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicaSeeds {
    pub graph: u64,
    pub spikes: u64,
}

impl ReplicaSeeds {
    /// Seeds of a single run outside any sweep.
    pub fn single(seed: u64) -> Self {
        ReplicaSeeds {
            graph: derive_seed(seed, &[TAG_GRAPH]),
            spikes: derive_seed(seed, &[TAG_SPIKES]),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub scenario: String,
    pub setup: Setup,
    pub ns: Vec<usize>,
    pub replicas: usize,
    pub t_end: f64,
    pub solver: SolverOptions,
    /// Time step of the spatial-profile grid.
    pub profile_dt: f64,
    pub seed: u64,
    pub sim: SimOptions,
}

impl ExperimentPlan {
    pub fn new(setup: Setup, ns: Vec<usize>, replicas: usize, t_end: f64, seed: u64) -> Self {
        ExperimentPlan {
            scenario: setup.name.clone(),
            setup,
            ns,
            replicas,
            t_end,
            solver: SolverOptions {
                cells: 100,
                ..SolverOptions::default()
            },
            profile_dt: 0.01,
            seed,
            sim: SimOptions::default(),
        }
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let mut plan = Self::new(
            Setup::from_config(cfg)?,
            cfg.run.ns.clone(),
            cfg.run.replicas,
            cfg.run.t_end,
            cfg.run.seed,
        );
        plan.solver = cfg.solver_options();
        plan.profile_dt = cfg.run.profile_dt;
        plan.sim = cfg.sim_options();
        Ok(plan)
    }

    fn validate(&self) -> Result<()> {
        if self.ns.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "a sweep needs at least 3 values of N, got {}",
                self.ns.len()
            )));
        }
        if self.replicas == 0 || !(self.t_end > 0.0) {
            return Err(Error::InvalidArgument("a sweep needs replicas >= 1 and T > 0".into()));
        }
        Ok(())
    }

    /// Fresh graph and fresh noise for replica `r` at size `n`.
    pub fn replica_seeds(&self, n: usize, r: usize) -> ReplicaSeeds {
        ReplicaSeeds {
            graph: derive_seed(self.seed, &[n as u64, r as u64, TAG_GRAPH]),
            spikes: derive_seed(self.seed, &[n as u64, r as u64, TAG_SPIKES]),
        }
    }

    /// One graph per `n` shared by all replicas; noise as in [`Self::replica_seeds`].
    pub fn quenched_seeds(&self, n: usize, r: usize) -> ReplicaSeeds {
        ReplicaSeeds {
            graph: derive_seed(self.seed, &[n as u64, TAG_QUENCHED]),
            spikes: self.replica_seeds(n, r).spikes,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let seeds: Vec<_> = self
            .ns
            .iter()
            .flat_map(|&n| {
                (0..self.replicas).map(move |r| {
                    let a = self.replica_seeds(n, r);
                    let q = self.quenched_seeds(n, r);
                    json!({ "n": n, "replica": r, "graph_seed": a.graph, "spike_seed": a.spikes, "quenched_graph_seed": q.graph })
                })
            })
            .collect();
        json!({
            "scenario": self.scenario,
            "setup": self.setup.describe(),
            "ns": self.ns,
            "replicas": self.replicas,
            "t_end": self.t_end,
            "solver": { "dt": self.solver.dt, "tol": self.solver.tol, "cells": self.solver.cells },
            "profile_dt": self.profile_dt,
            "master_seed": self.seed,
            "seeds": seeds,
        })
    }

    pub fn write_plan(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join("plan.json"), &self.to_json())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReplica {
    pub n: usize,
    pub replica: usize,
    pub mode: &'static str,
    pub graph_seed: u64,
    pub spike_seed: u64,
    /// `(1/N) Σ_i sup_t |Z_i − Z̄_i|`
    pub mean_error: f64,
    /// `max_i sup_t |Z_i − Z̄_i|`
    pub max_error: f64,
    /// `(1/N) Σ_i Δ_i(T)`
    pub mean_delta: f64,
    #[serde(skip)]
    per_neuron: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub replicas: usize,
    pub annealed_mean: f64,
    pub annealed_se: f64,
    /// `max_i` of the replica-averaged `sup_t |Z_i − Z̄_i|`.
    pub annealed_max: f64,
    pub quenched_mean: f64,
    pub quenched_se: f64,
    pub quenched_max: f64,
    pub mean_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub scenario: String,
    pub t_end: f64,
    pub seed: u64,
    pub rows: Vec<ConvergenceRow>,
    pub replicas: Vec<CouplingReplica>,
    /// Least-squares fit of `log(annealed_mean)` on `log N`.
    pub slope: LinearFit,
    pub quenched_slope: LinearFit,
    pub inversions: usize,
    pub monotone: bool,
}

impl ConvergenceTable {
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        let mut s = String::from(
            "scenario,n,replicas,t_end,master_seed,annealed_mean,annealed_se,annealed_max,quenched_mean,quenched_se,quenched_max,mean_delta\n",
        );
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{:?},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                self.scenario,
                r.n,
                r.replicas,
                self.t_end,
                self.seed,
                r.annealed_mean,
                r.annealed_se,
                r.annealed_max,
                r.quenched_mean,
                r.quenched_se,
                r.quenched_max,
                r.mean_delta
            )
            .unwrap();
        }
        write_text(&dir.join("convergence.csv"), &s)?;
        let mut s = String::from("scenario,n,replica,mode,graph_seed,spike_seed,mean_error,max_error,mean_delta\n");
        for r in &self.replicas {
            writeln!(
                s,
                "{},{},{},{},{},{},{:?},{:?},{:?}",
                self.scenario, r.n, r.replica, r.mode, r.graph_seed, r.spike_seed, r.mean_error, r.max_error, r.mean_delta
            )
            .unwrap();
        }
        write_text(&dir.join("convergence_replicas.csv"), &s)
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "scenario": self.scenario,
            "rows": self.rows,
            "slope": self.slope.slope,
            "slope_se": self.slope.slope_se,
            "quenched_slope": self.quenched_slope.slope,
            "inversions": self.inversions,
            "monotone": self.monotone,
        })
    }
}

/// Consecutive non-decreases, and whether the sequence counts as decreasing:
/// no inversion, or one whose rise stays within the larger of the two standard errors.
pub fn decreasing_trend(values: &[f64], se: &[f64]) -> (usize, bool) {
    let rises: Vec<usize> = (1..values.len()).filter(|&k| values[k] >= values[k - 1]).collect();
    let ok = match rises.as_slice() {
        [] => true,
        [k] => values[*k] - values[k - 1] <= se[*k].max(se[k - 1]),
        _ => false,
    };
    (rises.len(), ok)
}

fn coupled_replica(
    plan: &ExperimentPlan,
    field: &IntensityField,
    n: usize,
    r: usize,
    quenched: bool,
) -> Result<CouplingReplica> {
    let seeds = if quenched { plan.quenched_seeds(n, r) } else { plan.replica_seeds(n, r) };
    let graph = plan.setup.sample(n, seeds.graph)?;
    let rec = simulate_coupled(&graph, &plan.setup.model, field, plan.t_end, seeds.spikes, &plan.sim)?;
    let c = rec.coupling().expect("coupled run");
    let (mean_error, mean_delta) = rec.coupling_means().expect("coupled run");
    Ok(CouplingReplica {
        n,
        replica: r,
        mode: if quenched { "quenched" } else { "annealed" },
        graph_seed: seeds.graph,
        spike_seed: seeds.spikes,
        mean_error,
        max_error: c.sup_diff.iter().copied().max().unwrap_or(0) as f64,
        mean_delta,
        per_neuron: c.sup_diff.clone(),
    })
}

/// Coupling error `(1/N) Σ_i sup_t |Z_i − Z̄_i|` against `N`.
pub fn convergence_sweep(plan: &ExperimentPlan) -> Result<ConvergenceTable> {
    plan.validate()?;
    let field = plan.setup.solve(plan.t_end, &plan.solver)?;
    let jobs: Vec<(usize, usize, bool)> = plan
        .ns
        .iter()
        .flat_map(|&n| (0..plan.replicas).flat_map(move |r| [(n, r, false), (n, r, true)]))
        .collect();
    let results = par::map_range(jobs.len(), |k| {
        let (n, r, q) = jobs[k];
        coupled_replica(plan, &field, n, r, q)
    });
    let replicas: Vec<CouplingReplica> = results.into_iter().collect::<Result<_>>()?;

    let aggregate = |n: usize, mode: &str| {
        let reps: Vec<&CouplingReplica> = replicas.iter().filter(|c| c.n == n && c.mode == mode).collect();
        let errs: Vec<f64> = reps.iter().map(|c| c.mean_error).collect();
        let mut per_neuron = vec![0.0; n];
        for c in &reps {
            for (acc, v) in per_neuron.iter_mut().zip(&c.per_neuron) {
                *acc += *v as f64 / reps.len() as f64;
            }
        }
        let deltas: Vec<f64> = reps.iter().map(|c| c.mean_delta).collect();
        (
            stats::mean(&errs),
            if errs.len() > 1 { stats::std_error(&errs) } else { 0.0 },
            per_neuron.iter().copied().fold(0.0, f64::max),
            stats::mean(&deltas),
        )
    };
    let rows: Vec<ConvergenceRow> = plan
        .ns
        .iter()
        .map(|&n| {
            let (am, ase, amax, delta) = aggregate(n, "annealed");
            let (qm, qse, qmax, _) = aggregate(n, "quenched");
            ConvergenceRow {
                n,
                replicas: plan.replicas,
                annealed_mean: am,
                annealed_se: ase,
                annealed_max: amax,
                quenched_mean: qm,
                quenched_se: qse,
                quenched_max: qmax,
                mean_delta: delta,
            }
        })
        .collect();
    let log_n: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let fit = |ys: Vec<f64>| {
        if ys.iter().all(|&y| y > 0.0) {
            stats::linear_fit(&log_n, &ys.iter().map(|y| y.ln()).collect::<Vec<_>>())
        } else {
            LinearFit {
                slope: f64::NAN,
                intercept: f64::NAN,
                slope_se: f64::NAN,
            }
        }
    };
    let slope = fit(rows.iter().map(|r| r.annealed_mean).collect());
    let quenched_slope = fit(rows.iter().map(|r| r.quenched_mean).collect());
    let means: Vec<f64> = rows.iter().map(|r| r.annealed_mean).collect();
    let ses: Vec<f64> = rows.iter().map(|r| r.annealed_se).collect();
    let (inversions, monotone) = decreasing_trend(&means, &ses);
    Ok(ConvergenceTable {
        scenario: plan.scenario.clone(),
        t_end: plan.t_end,
        seed: plan.seed,
        rows,
        replicas,
        slope,
        quenched_slope,
        inversions,
        monotone,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileErrorRow {
    pub n: usize,
    pub replicas: usize,
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileErrorTable {
    pub scenario: String,
    pub t_end: f64,
    pub seed: u64,
    pub profile_dt: f64,
    pub rows: Vec<ProfileErrorRow>,
    /// `(n, replica, graph_seed, spike_seed, error)`
    pub replicas: Vec<(usize, usize, u64, u64, f64)>,
    pub decreasing: bool,
}

impl ProfileErrorTable {
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        let mut s = String::from("scenario,n,replicas,t_end,profile_dt,master_seed,mean_error,se\n");
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{:?},{:?},{},{:?},{:?}",
                self.scenario, r.n, r.replicas, self.t_end, self.profile_dt, self.seed, r.mean, r.se
            )
            .unwrap();
        }
        write_text(&dir.join("profile_error.csv"), &s)?;
        let mut s = String::from("scenario,n,replica,graph_seed,spike_seed,error\n");
        for (n, r, g, sp, e) in &self.replicas {
            writeln!(s, "{},{n},{r},{g},{sp},{e:?}", self.scenario).unwrap();
        }
        write_text(&dir.join("profile_error_replicas.csv"), &s)
    }
}

/// `E ∫_0^T ∫ |U_N − u| ν(dx) dt` against `N`, on regularly placed neurons.
pub fn profile_error_curve(plan: &ExperimentPlan) -> Result<ProfileErrorTable> {
    if !plan.setup.scheme.is_regular() {
        return Err(Error::InvalidArgument(
            "the profile error is defined for regularly placed neurons (x_i = i/N)".into(),
        ));
    }
    if plan.ns.is_empty() || plan.replicas == 0 {
        return Err(Error::InvalidArgument("profile error needs at least one N and one replica".into()));
    }
    let field = plan.setup.solve(plan.t_end, &plan.solver)?;
    let u = macroscopic_profile(&field, &plan.setup.kernel, &plan.setup.model)?;
    let grid = TimeGrid::new(plan.t_end, plan.profile_dt)?;
    let times: Vec<f64> = (0..grid.points()).map(|k| grid.t(k)).collect();
    let jobs: Vec<(usize, usize)> = plan.ns.iter().flat_map(|&n| (0..plan.replicas).map(move |r| (n, r))).collect();
    let results = par::map_range(jobs.len(), |k| -> Result<_> {
        let (n, r) = jobs[k];
        let seeds = plan.replica_seeds(n, r);
        let graph = plan.setup.sample(n, seeds.graph)?;
        let rec = simulate(&graph, &plan.setup.model, plan.t_end, seeds.spikes, &plan.sim)?;
        let prof = spatial_profile(&rec, &graph, &plan.setup.model, &times)?;
        Ok((n, r, seeds.graph, seeds.spikes, prof.l1_distance(&u)))
    });
    let replicas: Vec<_> = results.into_iter().collect::<Result<_>>()?;
    let rows: Vec<ProfileErrorRow> = plan
        .ns
        .iter()
        .map(|&n| {
            let errs: Vec<f64> = replicas.iter().filter(|x| x.0 == n).map(|x| x.4).collect();
            ProfileErrorRow {
                n,
                replicas: errs.len(),
                mean: stats::mean(&errs),
                se: if errs.len() > 1 { stats::std_error(&errs) } else { 0.0 },
            }
        })
        .collect();
    let decreasing = rows.windows(2).all(|w| w[1].mean < w[0].mean);
    Ok(ProfileErrorTable {
        scenario: plan.scenario.clone(),
        t_end: plan.t_end,
        seed: plan.seed,
        profile_dt: plan.profile_dt,
        rows,
        replicas,
        decreasing,
    })
}

/// Replica-averaged population rate per time bin against the ν-averaged limit curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCheck {
    pub edges: Vec<f64>,
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
    pub limit: Vec<f64>,
    /// Fraction of bins with `|mean − limit| ≤ 4 se`.
    pub within_4se: f64,
}

pub fn monte_carlo_rates(
    setup: &Setup,
    n: usize,
    t_end: f64,
    replicas: usize,
    bins: usize,
    seed: u64,
    solver: &SolverOptions,
) -> Result<RateCheck> {
    if replicas < 2 || bins == 0 {
        return Err(Error::InvalidArgument("need at least two replicas and one bin".into()));
    }
    let field = setup.solve(t_end, solver)?;
    let edges: Vec<f64> = (0..=bins).map(|k| t_end * k as f64 / bins as f64).collect();
    let plan = ExperimentPlan::new(setup.clone(), vec![n], replicas, t_end, seed);
    let rates = par::map_range(replicas, |r| -> Result<Vec<f64>> {
        let seeds = plan.replica_seeds(n, r);
        let graph = setup.sample(n, seeds.graph)?;
        Ok(simulate(&graph, &setup.model, t_end, seeds.spikes, &plan.sim)?.binned_rate(&edges))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let g = field.grid();
    let m = field.cells() as f64;
    let spatial_mean = |k: usize| field.slice(k).iter().sum::<f64>() / m;
    let mut mean = Vec::with_capacity(bins);
    let mut se = Vec::with_capacity(bins);
    let mut limit = Vec::with_capacity(bins);
    for b in 0..bins {
        let xs: Vec<f64> = rates.iter().map(|r| r[b]).collect();
        mean.push(stats::mean(&xs));
        se.push(stats::std_error(&xs));
        // Bin average of the limit curve, trapezoid on the solver grid.
        let (k0, k1) = ((edges[b] / g.dt).round() as usize, (edges[b + 1] / g.dt).round() as usize);
        let k1 = k1.min(g.steps).max(k0 + 1);
        let avg = (k0..k1).map(|k| 0.5 * (spatial_mean(k) + spatial_mean(k + 1))).sum::<f64>() / (k1 - k0) as f64;
        limit.push(avg);
    }
    let within = (0..bins).filter(|&b| (mean[b] - limit[b]).abs() <= 4.0 * se[b]).count();
    Ok(RateCheck {
        edges,
        mean,
        se,
        limit,
        within_4se: within as f64 / bins as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub neuron_id: usize,
    pub x: f64,
    /// Events in `(T − w, T]` divided by `w`.
    pub empirical_rate: f64,
    pub lambda_t: f64,
    pub ell: f64,
    pub ell_formula: Option<f64>,
    pub ell_stated: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FigureBundle {
    pub id: FigureId,
    pub n: usize,
    pub t_end: f64,
    pub seed: u64,
    pub window: f64,
    pub graph: InteractionGraph,
    pub summary: GraphSummary,
    pub record: SpikeRecord,
    pub rates: Vec<RateRow>,
    pub field: IntensityField,
    /// `(t, x, neuron_id, λ_N(t, x_i), λ(t, x_i))` at the traced positions.
    pub traces: Vec<(f64, f64, usize, f64, f64)>,
    pub meta: serde_json::Value,
}

impl FigureBundle {
    /// Writes `figureX_rates.csv`, `figureX_field.csv`, `figureX_traces.csv`,
    /// `figureX_graph.txt` and `figureX_meta.json`.
    pub fn write(&self, dir: &Path, field_stride: usize) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let stem = self.id.file_stem();
        let mut s = String::from("neuron_id,x,empirical_rate,lambda_T,ell");
        let fig1 = self.id == FigureId::Fig1;
        if fig1 {
            s.push_str(",ell_formula,ell_stated");
        }
        s.push('\n');
        for r in &self.rates {
            write!(s, "{},{:?},{:?},{:?},{:?}", r.neuron_id, r.x, r.empirical_rate, r.lambda_t, r.ell).unwrap();
            if let (Some(a), Some(b)) = (r.ell_formula, r.ell_stated) {
                write!(s, ",{a:?},{b:?}").unwrap();
            }
            s.push('\n');
        }
        write_text(&dir.join(format!("{stem}_rates.csv")), &s)?;
        self.field.write_csv(&dir.join(format!("{stem}_field.csv")), "lambda", field_stride)?;
        let mut s = String::from("t,x,neuron_id,lambda_N,lambda\n");
        for (t, x, i, a, b) in &self.traces {
            writeln!(s, "{t:?},{x:?},{i},{a:?},{b:?}").unwrap();
        }
        write_text(&dir.join(format!("{stem}_traces.csv")), &s)?;
        graph_io::save(&self.graph, &dir.join(format!("{stem}_graph.txt")))?;
        write_json(&dir.join(format!("{stem}_meta.json")), &self.meta)
    }
}

/// Simulate one figure configuration and collect everything needed to plot it.
pub fn run_figure(id: FigureId, n: usize, t_end: f64, seed: u64) -> Result<FigureBundle> {
    let setup = Setup::figure(id)?;
    let seeds = ReplicaSeeds::single(seed);
    let graph = setup.sample(n, seeds.graph)?;
    let opts = SolverOptions {
        cells: 200,
        ..SolverOptions::default()
    };
    let field = setup.solve(t_end, &opts)?;

    let quad = Quadrature::new(setup.model.measure.clone(), 400)?;
    let op = DiscreteOperator::new(&setup.kernel, &quad);
    let report = analyse(&op, &setup.model.kernel, 1e-12, CRITICAL_BAND)?;
    let u = longtime_baseline(&setup.model, &op)?;
    let ell_grid = stationary_limit(&op, &report, &u, 1e-12)?.ell;
    let ell_at = |x: f64| ell_grid[quad.cell_index(x)];

    let h1 = setup.model.kernel.l1_norm();
    let fig1 = id == FigureId::Fig1;
    let formula = if fig1 { Some(constant_kernel_limit(|x| x + 1.0, 0.5, h1)?) } else { None };
    let stated = fig1.then_some(fig1_stated as fn(f64) -> f64);

    let record = simulate(&graph, &setup.model, t_end, seeds.spikes, &SimOptions::default())?;
    let window = 1.0f64.min(t_end / 5.0);
    let rates: Vec<RateRow> = (0..n)
        .map(|i| {
            let x = graph.positions()[i];
            let ts = record.times(i);
            let recent = ts.len() - ts.partition_point(|&t| t <= t_end - window);
            RateRow {
                neuron_id: i,
                x,
                empirical_rate: recent as f64 / window,
                lambda_t: field.at(t_end, x),
                ell: ell_at(x),
                ell_formula: formula.as_ref().map(|f| f(x)),
                ell_stated: stated.map(|f| f(x)),
            }
        })
        .collect();

    let step = 0.05f64.min(t_end / 20.0);
    let trace_times: Vec<f64> = (0..=((t_end / step).round() as usize)).map(|k| (k as f64 * step).min(t_end)).collect();
    let profile = spatial_profile(&record, &graph, &setup.model, &trace_times)?;
    let mut traces = Vec::new();
    for &x in id.trace_positions() {
        let i = nearest(graph.positions(), x);
        for (k, &t) in trace_times.iter().enumerate() {
            let lam_n = setup.model.rate.eval(profile.get(k, i));
            traces.push((t, graph.positions()[i], i, lam_n, field.at(t, graph.positions()[i])));
        }
    }

    let mut meta = json!({
        "figure": id.as_str(),
        "n": n,
        "t_end": t_end,
        "seed": seed,
        "setup": setup.describe(),
        "graph": graph.summary(),
        "rate_window": window,
        "solver": { "dt": opts.dt, "cells": opts.cells, "tol": opts.tol, "iterations": field.info.as_ref().map(|i| i.iterations) },
        "longtime": report.to_json(),
        "simulation": sim_json(&record.stats, record.total_events()),
        "mean_empirical_rate": stats::mean(&rates.iter().map(|r| r.empirical_rate).collect::<Vec<_>>()),
    });
    if let (Some(f), Some(c)) = (&formula, stated) {
        let dev = |g: &dyn Fn(f64) -> f64| quad.nodes().iter().map(|&x| (ell_at(x) - g(x)).abs()).fold(0.0, f64::max);
        let (d_formula, d_stated) = (dev(f.as_ref()), dev(&c));
        meta["ell_check"] = json!({
            "formula": "u(x) + mean(u) * |h|_1 rho / (1 - |h|_1 rho) = x + 3/2",
            "stated": "x + 1/2",
            "stated_discrepancy": (f(0.0) - c(0.0)).abs() > 1e-9,
            "max_dev_solver_vs_formula": d_formula,
            "max_dev_solver_vs_stated": d_stated,
            "supported": if d_formula < d_stated { "formula" } else { "stated" },
        });
    }
    let summary = graph.summary();
    Ok(FigureBundle {
        id,
        n,
        t_end,
        seed,
        window,
        graph,
        summary,
        record,
        rates,
        field,
        traces,
        meta,
    })
}

fn fig1_stated(x: f64) -> f64 {
    x + 0.5
}

fn nearest(xs: &[f64], x: f64) -> usize {
    (0..xs.len())
        .min_by(|&a, &b| (xs[a] - x).abs().total_cmp(&(xs[b] - x).abs()))
        .unwrap_or(0)
}

fn sim_json(stats: &SimStats, total: usize) -> serde_json::Value {
    json!({
        "events": total,
        "candidates": stats.candidates,
        "acceptance_rate": stats.acceptance_rate(),
        "window_shrinks": stats.window_shrinks,
    })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json serializes");
    text.push('\n');
    write_text(path, &text)
}
