//! Exact event-driven simulation of the N-neuron process by thinning.
//!
//! Every neuron owns a unit-exponential residual clock measured against a
//! piecewise-constant dominating rate `B_i(t) ≥ λ_i(t)`. When an arrival or a
//! window change alters `B_i`, the unused residual is kept and rescaled to
//! the new rate, so no draw is wasted. An indexed min-heap holds the next wake
//! time of every neuron.
//!
//! In coupled mode each candidate `(τ, z)` with `z ~ U[0, B_i]` is shared by
//! the microscopic neuron (accepted if `z ≤ λ_i(τ)`) and by a Poisson process
//! driven by the limit intensity (accepted if `z ≤ λ(τ, x_i)`). Both processes
//! are thus built from the same Poisson measure.

mod heap;
mod profile;

use std::io::Write;
use std::path::Path;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphon::InteractionGraph;
use crate::limit_solver::IntensityField;
use crate::model::{HawkesModel, MemoryKernel};
use crate::rng::{self, Domain, StreamRng};

use heap::IndexedHeap;
pub use profile::{compensator, rescaled_gaps, spatial_profile, SpatialProfile};

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Abort once more than this many events were accepted.
    pub max_events: usize,
    /// Window length in units of the expected gap `1/B_i`.
    pub window_factor: f64,
    /// Halve a neuron's window when its rejection rate exceeds this.
    pub shrink_threshold: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            max_events: 10_000_000,
            window_factor: 10.0,
            shrink_threshold: 0.9,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SimStats {
    pub candidates: u64,
    pub accepted: u64,
    pub limit_accepted: u64,
    pub window_advances: u64,
    pub window_shrinks: u64,
}

impl SimStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.candidates == 0 {
            return 1.0;
        }
        self.accepted.max(self.limit_accepted) as f64 / self.candidates as f64
    }
}

/// Limit-driven processes `Z̄_i` and the coupling diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub limit_times: Vec<Vec<f64>>,
    /// `Δ_i(T)`: candidates accepted by exactly one of the two processes.
    pub delta: Vec<u64>,
    /// `sup_{t ≤ T} |Z_i(t) − Z̄_i(t)|`.
    pub sup_diff: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpikeRecord {
    t_end: f64,
    seed: u64,
    times: Vec<Vec<f64>>,
    coupling: Option<Coupling>,
    pub stats: SimStats,
}

impl SpikeRecord {
    pub fn new(t_end: f64, seed: u64, times: Vec<Vec<f64>>) -> Self {
        SpikeRecord {
            t_end,
            seed,
            times,
            coupling: None,
            stats: SimStats::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.times.len()
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Spike times of neuron `i`, increasing.
    pub fn times(&self, i: usize) -> &[f64] {
        &self.times[i]
    }

    pub fn counts(&self) -> Vec<usize> {
        self.times.iter().map(Vec::len).collect()
    }

    pub fn total_events(&self) -> usize {
        self.times.iter().map(Vec::len).sum()
    }

    pub fn coupling(&self) -> Option<&Coupling> {
        self.coupling.as_ref()
    }

    /// Population rate `(1/N) · #events / width` on each bin `[e_k, e_{k+1})`.
    pub fn binned_rate(&self, edges: &[f64]) -> Vec<f64> {
        let mut counts = vec![0usize; edges.len().saturating_sub(1)];
        for t in self.times.iter().flatten() {
            let k = edges.partition_point(|&e| e <= *t);
            if k >= 1 && k < edges.len() {
                counts[k - 1] += 1;
            }
        }
        counts
            .iter()
            .zip(edges.windows(2))
            .map(|(&c, w)| c as f64 / (self.n() as f64 * (w[1] - w[0])))
            .collect()
    }

    /// `(1/N) Σ_i sup_t |Z_i − Z̄_i|` and `(1/N) Σ_i Δ_i`.
    pub fn coupling_means(&self) -> Option<(f64, f64)> {
        let c = self.coupling.as_ref()?;
        let n = self.n() as f64;
        Some((
            c.sup_diff.iter().sum::<u64>() as f64 / n,
            c.delta.iter().sum::<u64>() as f64 / n,
        ))
    }

    /// `neuron_id,time`, plus a `process` column for coupled records.
    pub fn write_spikes_csv(&self, path: &Path) -> Result<()> {
        let mut out = csv_writer(path)?;
        let io = |e| Error::io(path, e);
        match &self.coupling {
            None => {
                writeln!(out, "neuron_id,time").map_err(io)?;
                for (i, ts) in self.times.iter().enumerate() {
                    for t in ts {
                        writeln!(out, "{i},{t:?}").map_err(io)?;
                    }
                }
            }
            Some(c) => {
                writeln!(out, "neuron_id,time,process").map_err(io)?;
                for (i, (ts, ls)) in self.times.iter().zip(&c.limit_times).enumerate() {
                    for t in ts {
                        writeln!(out, "{i},{t:?},micro").map_err(io)?;
                    }
                    for t in ls {
                        writeln!(out, "{i},{t:?},limit").map_err(io)?;
                    }
                }
            }
        }
        out.flush().map_err(io)
    }

    /// `neuron_id,count_micro,count_limit,delta`; the last two are empty when uncoupled.
    pub fn write_summary_csv(&self, path: &Path) -> Result<()> {
        let mut out = csv_writer(path)?;
        let io = |e| Error::io(path, e);
        writeln!(out, "neuron_id,count_micro,count_limit,delta").map_err(io)?;
        for (i, ts) in self.times.iter().enumerate() {
            match &self.coupling {
                Some(c) => writeln!(out, "{i},{},{},{}", ts.len(), c.limit_times[i].len(), c.delta[i]),
                None => writeln!(out, "{i},{},,", ts.len()),
            }
            .map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

fn csv_writer(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(std::io::BufWriter::new(file))
}

/// Simulate the network on `[0, t_end]`.
pub fn simulate(
    graph: &InteractionGraph,
    model: &HawkesModel,
    t_end: f64,
    seed: u64,
    opts: &SimOptions,
) -> Result<SpikeRecord> {
    Engine::new(graph, model, t_end, seed, opts, None)?.run()
}

/// Simulate the network together with `Z̄_i`, the Poisson processes of
/// intensity `λ(t, x_i)`, on one shared Poisson measure per neuron.
pub fn simulate_coupled(
    graph: &InteractionGraph,
    model: &HawkesModel,
    limit: &IntensityField,
    t_end: f64,
    seed: u64,
    opts: &SimOptions,
) -> Result<SpikeRecord> {
    if limit.grid().t_end < t_end * (1.0 - 1e-12) {
        return Err(Error::GridMismatch(format!(
            "limit intensity ends at {} but the simulation runs to {t_end}",
            limit.grid().t_end
        )));
    }
    let (lo, hi) = (limit.edges()[0], *limit.edges().last().unwrap());
    if let Some(x) = graph.positions().iter().find(|&&x| x < lo || x > hi) {
        return Err(Error::GridMismatch(format!(
            "position {x} lies outside the limit grid [{lo}, {hi}]"
        )));
    }
    Engine::new(graph, model, t_end, seed, opts, Some(limit))?.run()
}

#[derive(Debug, Clone, Copy)]
struct Clock {
    start: f64,
    bound: f64,
    window_end: f64,
    residual: f64,
    candidate: bool,
    scale: f64,
    tried: u32,
    rejected: u32,
}

enum Input {
    /// `S_i(at_i) = value_i`, decaying at rate `alpha` until the next arrival.
    Exponential { alpha: f64, value: Vec<f64>, at: Vec<f64> },
    /// Arrival times per neuron; entries before `head` are past the support of `h`.
    History {
        inbox: Vec<Vec<f64>>,
        head: Vec<usize>,
        support: Option<f64>,
    },
}

struct LimitState<'a> {
    field: &'a IntensityField,
    suffix: Vec<f64>,
    cell: Vec<usize>,
    times: Vec<Vec<f64>>,
    delta: Vec<u64>,
    diff: Vec<i64>,
    sup_diff: Vec<u64>,
}

impl LimitState<'_> {
    fn bound_from(&self, i: usize, t: f64) -> f64 {
        let g = self.field.grid();
        let k = ((t / g.dt).floor().max(0.0) as usize).min(g.steps);
        self.suffix[k * self.field.cells() + self.cell[i]]
    }
}

struct Engine<'a> {
    graph: &'a InteractionGraph,
    model: &'a HawkesModel,
    t_end: f64,
    seed: u64,
    opts: &'a SimOptions,
    windowed: bool,
    weight: Vec<f64>,
    input: Input,
    clocks: Vec<Clock>,
    rngs: Vec<StreamRng>,
    heap: IndexedHeap,
    times: Vec<Vec<f64>>,
    limit: Option<LimitState<'a>>,
    stats: SimStats,
    total: usize,
}

impl<'a> Engine<'a> {
    fn new(
        graph: &'a InteractionGraph,
        model: &'a HawkesModel,
        t_end: f64,
        seed: u64,
        opts: &'a SimOptions,
        limit: Option<&'a IntensityField>,
    ) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {t_end}")));
        }
        if !(opts.window_factor > 0.0) || !(opts.shrink_threshold > 0.0 && opts.shrink_threshold <= 1.0) {
            return Err(Error::InvalidArgument("window factor and shrink threshold must be positive".into()));
        }
        let n = graph.n();
        let input = match &model.kernel {
            MemoryKernel::Exponential { alpha } => Input::Exponential {
                alpha: *alpha,
                value: vec![0.0; n],
                at: vec![0.0; n],
            },
            h => Input::History {
                inbox: vec![Vec::new(); n],
                head: vec![0; n],
                support: h.support_end(),
            },
        };
        let windowed = !(model.kernel.is_nonincreasing() && model.baseline.is_time_constant());
        let limit = limit.map(|field| LimitState {
            field,
            suffix: field.suffix_max(),
            cell: graph.positions().iter().map(|&x| field.cell_of(x)).collect(),
            times: vec![Vec::new(); n],
            delta: vec![0; n],
            diff: vec![0; n],
            sup_diff: vec![0; n],
        });
        let mut rngs: Vec<StreamRng> = (0..n as u64).map(|i| rng::stream(seed, Domain::Spikes, i)).collect();
        let clocks = rngs
            .iter_mut()
            .map(|r| Clock {
                start: 0.0,
                bound: 0.0,
                window_end: 0.0,
                residual: rng::unit_exponential(r),
                candidate: false,
                scale: 1.0,
                tried: 0,
                rejected: 0,
            })
            .collect();
        let mut engine = Engine {
            graph,
            model,
            t_end,
            seed,
            opts,
            windowed,
            weight: (0..n).map(|i| graph.input_weight(i)).collect(),
            input,
            clocks,
            rngs,
            heap: IndexedHeap::new(vec![f64::INFINITY; n]),
            times: vec![Vec::new(); n],
            limit,
            stats: SimStats::default(),
            total: 0,
        };
        for i in 0..n {
            engine.rebound(i, 0.0)?;
        }
        Ok(engine)
    }

    fn run(mut self) -> Result<SpikeRecord> {
        while let Some((i, tau)) = self.heap.peek() {
            if tau >= self.t_end {
                break;
            }
            if self.clocks[i].candidate {
                self.candidate(i, tau)?;
                if self.total > self.opts.max_events {
                    let limit = self.opts.max_events;
                    return Err(Error::Explosion {
                        limit,
                        stopped_at: tau,
                        partial: Box::new(self.into_record(tau)),
                    });
                }
            } else {
                self.stats.window_advances += 1;
                self.consume(i, tau);
                self.rebound(i, tau)?;
            }
        }
        let t_end = self.t_end;
        Ok(self.into_record(t_end))
    }

    fn into_record(self, t_end: f64) -> SpikeRecord {
        let coupling = self.limit.map(|l| Coupling {
            limit_times: l.times,
            delta: l.delta,
            sup_diff: l.sup_diff,
        });
        SpikeRecord {
            t_end,
            seed: self.seed,
            times: self.times,
            coupling,
            stats: self.stats,
        }
    }

    fn candidate(&mut self, i: usize, tau: f64) -> Result<()> {
        self.stats.candidates += 1;
        let arg = self.model.baseline.eval(tau, self.graph.positions()[i]) + self.input_at(i, tau);
        let lam = self.model.rate.eval(arg);
        let bound = self.clocks[i].bound;
        if !(lam <= bound * (1.0 + 1e-9) + 1e-12) {
            return Err(Error::NonDominatable {
                neuron: i,
                time: tau,
                detail: format!("intensity {lam} exceeds the bound {bound}"),
            });
        }
        let lam_bar = self.limit.as_ref().map(|l| l.field.at_cell(tau, l.cell[i]));
        let r = &mut self.rngs[i];
        let z = r.random::<f64>() * bound;
        let fired = z <= lam;
        let fired_bar = lam_bar.is_some_and(|v| z <= v);
        self.clocks[i].residual = rng::unit_exponential(r);
        self.adapt_window(i, fired || fired_bar);
        self.rebound(i, tau)?;

        if let Some(l) = self.limit.as_mut() {
            if fired_bar {
                l.times[i].push(tau);
                l.diff[i] -= 1;
                self.stats.limit_accepted += 1;
                self.total += 1;
            }
            if fired {
                l.diff[i] += 1;
            }
            if fired != fired_bar {
                l.delta[i] += 1;
            }
            l.sup_diff[i] = l.sup_diff[i].max(l.diff[i].unsigned_abs());
        }
        if fired {
            debug_assert!(self.times[i].last().is_none_or(|&s| s < tau));
            self.times[i].push(tau);
            self.stats.accepted += 1;
            self.total += 1;
            let graph = self.graph;
            for &k in graph.out_neighbors(i) {
                let k = k as usize;
                self.arrive(k, tau);
                self.consume(k, tau);
                self.rebound(k, tau)?;
            }
        }
        Ok(())
    }

    fn adapt_window(&mut self, i: usize, accepted: bool) {
        if !self.windowed {
            return;
        }
        let c = &mut self.clocks[i];
        c.tried += 1;
        c.rejected += u32::from(!accepted);
        if c.tried >= 16 {
            if c.rejected as f64 > self.opts.shrink_threshold * c.tried as f64 && c.scale > 1e-3 {
                c.scale *= 0.5;
                self.stats.window_shrinks += 1;
            }
            c.tried = 0;
            c.rejected = 0;
        }
    }

    /// Spend the residual used up since the last rebound.
    fn consume(&mut self, i: usize, t: f64) {
        let c = &mut self.clocks[i];
        c.residual = (c.residual - c.bound * (t - c.start)).max(0.0);
        c.start = t;
    }

    /// New dominating rate from `t` on, and the matching wake time.
    fn rebound(&mut self, i: usize, t: f64) -> Result<()> {
        let window_end = if self.windowed {
            let prev = self.clocks[i].bound;
            let span = if prev > 0.0 {
                self.clocks[i].scale * self.opts.window_factor / prev
            } else {
                self.t_end
            };
            (t + span.max(1e-12 * self.t_end)).min(self.t_end)
        } else {
            self.t_end
        };
        let x = self.graph.positions()[i];
        let (u_lo, u_hi) = self.model.baseline.range_over(x, t, window_end);
        let (s_lo, s_hi) = self.input_range(i, t, window_end);
        let mut bound = self.model.rate.bound(u_lo + s_lo, u_hi + s_hi).max(0.0);
        if let Some(l) = &self.limit {
            bound = bound.max(l.bound_from(i, t));
        }
        if !bound.is_finite() {
            return Err(Error::NonDominatable {
                neuron: i,
                time: t,
                detail: format!("required bound {bound} on [{t}, {window_end}]"),
            });
        }
        let c = &mut self.clocks[i];
        c.start = t;
        c.bound = bound;
        c.window_end = window_end;
        let next = if bound > 0.0 { t + c.residual / bound } else { f64::INFINITY };
        c.candidate = next < window_end;
        let key = if c.candidate { next } else { window_end };
        self.heap.update(i, key);
        Ok(())
    }

    fn arrive(&mut self, k: usize, t: f64) {
        match &mut self.input {
            Input::Exponential { alpha, value, at } => {
                value[k] = value[k] * (-*alpha * (t - at[k])).exp() + self.weight[k];
                at[k] = t;
            }
            Input::History { inbox, .. } => inbox[k].push(t),
        }
    }

    /// `S_i(t−) = (κ_i/N) Σ_{arrivals s < t} h(t − s)`.
    fn input_at(&mut self, i: usize, t: f64) -> f64 {
        match &mut self.input {
            Input::Exponential { alpha, value, at } => value[i] * (-*alpha * (t - at[i])).exp(),
            Input::History { inbox, head, support } => {
                prune(&inbox[i], &mut head[i], *support, t);
                let h = &self.model.kernel;
                let sum: f64 = inbox[i][head[i]..]
                    .iter()
                    .take_while(|&&s| s < t)
                    .map(|&s| h.eval(t - s))
                    .sum();
                self.weight[i] * sum
            }
        }
    }

    /// `(inf, sup)` of the synaptic input over `[t0, t1]` given arrivals so far.
    fn input_range(&mut self, i: usize, t0: f64, t1: f64) -> (f64, f64) {
        match &mut self.input {
            Input::Exponential { alpha, value, at } => {
                let s = value[i] * (-*alpha * (t0 - at[i])).exp();
                (s * (-*alpha * (t1 - t0)).exp(), s)
            }
            Input::History { inbox, head, support } => {
                prune(&inbox[i], &mut head[i], *support, t0);
                let h = &self.model.kernel;
                let (lo, hi) = inbox[i][head[i]..].iter().fold((0.0, 0.0), |(lo, hi), &s| {
                    let (a, b) = h.range_over(t0 - s, t1 - s);
                    (lo + a, hi + b)
                });
                (self.weight[i] * lo, self.weight[i] * hi)
            }
        }
    }
}

fn prune(inbox: &[f64], head: &mut usize, support: Option<f64>, t: f64) {
    if let Some(end) = support {
        while *head < inbox.len() && t - inbox[*head] > end {
            *head += 1;
        }
    }
}
