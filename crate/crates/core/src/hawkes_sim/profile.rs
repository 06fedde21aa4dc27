use crate::error::{Error, Result};
use crate::graphon::InteractionGraph;
use crate::limit_solver::IntensityField;
use crate::model::{HawkesModel, MemoryKernel};
use crate::par;

use super::SpikeRecord;

/// `U_N(t, ·)` sampled on a time grid: neuron `i` holds the value of
/// `u0(t, x_i) + (κ_i/N) Σ_j ξ_ij ∫ h(t − s) dZ_j(s)` on the `i`-th of `N`
/// equal-mass cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialProfile {
    pub times: Vec<f64>,
    n: usize,
    values: Vec<f64>,
}

impl SpatialProfile {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slice(&self, k: usize) -> &[f64] {
        &self.values[k * self.n..(k + 1) * self.n]
    }

    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.values[k * self.n + i]
    }

    /// `∫ |U_N(t_k, x) − u(t_k, x)| ν(dx)`, with `u` on its own equal-mass cells.
    pub fn l1_at(&self, k: usize, u: &IntensityField) -> f64 {
        let (n, m) = (self.n, u.cells());
        let t = self.times[k];
        let row = self.slice(k);
        let (mut i, mut a, mut at, mut sum) = (0, 0, 0.0, 0.0);
        // Walk the merged partition {i/N} ∪ {a/M} in quantile coordinates.
        while i < n && a < m {
            let (ei, ea) = ((i + 1) as f64 / n as f64, (a + 1) as f64 / m as f64);
            let next = ei.min(ea);
            sum += (next - at) * (row[i] - u.at_cell(t, a)).abs();
            at = next;
            if ei <= next {
                i += 1;
            }
            if ea <= next {
                a += 1;
            }
        }
        sum
    }

    /// `∫_0^T ∫ |U_N − u| ν(dx) dt` by the trapezoid rule over the profile times.
    pub fn l1_distance(&self, u: &IntensityField) -> f64 {
        let errs: Vec<f64> = (0..self.times.len()).map(|k| self.l1_at(k, u)).collect();
        self.times
            .windows(2)
            .zip(errs.windows(2))
            .map(|(t, e)| 0.5 * (t[1] - t[0]) * (e[0] + e[1]))
            .sum()
    }
}

fn arrivals(record: &SpikeRecord, graph: &InteractionGraph, i: usize) -> Vec<f64> {
    let mut all: Vec<f64> = graph
        .in_neighbors(i)
        .iter()
        .flat_map(|&j| record.times(j as usize).iter().copied())
        .collect();
    all.sort_unstable_by(f64::total_cmp);
    all
}

/// Evaluate the input field `U_N` of a simulated record on increasing `times`.
pub fn spatial_profile(
    record: &SpikeRecord,
    graph: &InteractionGraph,
    model: &HawkesModel,
    times: &[f64],
) -> Result<SpatialProfile> {
    if record.n() != graph.n() {
        return Err(Error::InvalidArgument(format!(
            "record has {} neurons, graph has {}",
            record.n(),
            graph.n()
        )));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("profile times must increase".into()));
    }
    let n = graph.n();
    let rows = par::map_range(n, |i| {
        let s = arrivals(record, graph, i);
        let input = match &model.kernel {
            MemoryKernel::Exponential { alpha } => exponential_input(&s, *alpha, times),
            h => times.iter().map(|&t| direct_input(&s, h, t)).collect(),
        };
        let x = graph.positions()[i];
        let w = graph.input_weight(i);
        input
            .iter()
            .zip(times)
            .map(|(v, &t)| model.baseline.eval(t, x) + w * v)
            .collect::<Vec<f64>>()
    });
    let mut values = vec![0.0; n * times.len()];
    for (i, row) in rows.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            values[k * n + i] = *v;
        }
    }
    Ok(SpatialProfile {
        times: times.to_vec(),
        n,
        values,
    })
}

/// `Σ_{s < t} e^{−α(t−s)}` on each grid time, by recursion over the grid.
fn exponential_input(arrivals: &[f64], alpha: f64, times: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let (mut y, mut prev, mut p) = (0.0, f64::NEG_INFINITY, 0);
    for &t in times {
        if prev.is_finite() {
            y *= (-alpha * (t - prev)).exp();
        }
        while p < arrivals.len() && arrivals[p] < t {
            y += (-alpha * (t - arrivals[p])).exp();
            p += 1;
        }
        out.push(y);
        prev = t;
    }
    out
}

/// `Σ_{s < t} h(t − s)` over sorted arrivals, skipping those past the support.
fn direct_input(arrivals: &[f64], h: &MemoryKernel, t: f64) -> f64 {
    let lo = h.support_end().map_or(0, |end| arrivals.partition_point(|&s| s < t - end));
    let hi = arrivals.partition_point(|&s| s < t);
    arrivals[lo..hi].iter().map(|&s| h.eval(t - s)).sum()
}

/// `Λ_i(t) = ∫_0^t λ_i(s) ds` at each spike of neuron `i`.
///
/// Exact for a linear rate with exponential memory and a time-constant
/// baseline; otherwise Gauss-Legendre between consecutive arrivals.
pub fn compensator(record: &SpikeRecord, graph: &InteractionGraph, model: &HawkesModel, i: usize) -> Vec<f64> {
    let s = arrivals(record, graph, i);
    let x = graph.positions()[i];
    let w = graph.input_weight(i);
    let exact = match (&model.kernel, &model.baseline) {
        (MemoryKernel::Exponential { alpha }, b) if model.rate.is_linear() && b.is_time_constant() => Some(*alpha),
        _ => None,
    };
    let lambda = |t: f64| -> f64 {
        let input = match &model.kernel {
            MemoryKernel::Exponential { alpha } => s
                .iter()
                .take_while(|&&u| u < t)
                .map(|&u| (-alpha * (t - u)).exp())
                .sum::<f64>(),
            h => direct_input(&s, h, t),
        };
        model.rate.eval(model.baseline.eval(t, x) + w * input)
    };

    let own = record.times(i);
    let mut out = Vec::with_capacity(own.len());
    let (mut total, mut at, mut p) = (0.0, 0.0, 0);
    // Σ e^{−α(t−s)} over arrivals s ≤ t, for the exact branch.
    let mut trace = 0.0;
    for &target in own {
        while at < target {
            let next = if p < s.len() && s[p] < target { s[p] } else { target };
            total += match exact {
                Some(alpha) => {
                    let decay = (-alpha * (next - at)).exp();
                    let piece = model.baseline.eval(0.0, x) * (next - at) + w * trace * (1.0 - decay) / alpha;
                    trace *= decay;
                    piece
                }
                None => gauss(&lambda, at, next, 4),
            };
            at = next;
            while p < s.len() && s[p] <= at {
                trace += 1.0;
                p += 1;
            }
        }
        out.push(total);
    }
    out
}

/// Composite 5-point Gauss-Legendre; the nodes avoid the interval ends,
/// where the integrand jumps.
fn gauss(f: &impl Fn(f64) -> f64, a: f64, b: f64, pieces: usize) -> f64 {
    const NODES: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.236_926_885_056_189,
        0.478_628_670_499_366,
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
    ];
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * h;
            NODES
                .iter()
                .zip(WEIGHTS)
                .map(|(z, wt)| wt * f(mid + 0.5 * h * z))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

/// Gaps of the time-rescaled spike train of neuron `i`; i.i.d. `Exp(1)` under the model.
pub fn rescaled_gaps(record: &SpikeRecord, graph: &InteractionGraph, model: &HawkesModel, i: usize) -> Vec<f64> {
    let lam = compensator(record, graph, model, i);
    let mut prev = 0.0;
    lam.iter()
        .map(|&l| {
            let g = l - prev;
            prev = l;
            g
        })
        .collect()
}

#[cfg(test)]
pub(super) fn direct_profile_value(
    record: &SpikeRecord,
    graph: &InteractionGraph,
    model: &HawkesModel,
    i: usize,
    t: f64,
) -> f64 {
    let s = arrivals(record, graph, i);
    model.baseline.eval(t, graph.positions()[i]) + graph.input_weight(i) * direct_input(&s, &model.kernel, t)
}
