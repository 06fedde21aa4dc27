//! Operator norms of kernels: `‖·‖_{∞→∞}`, `‖·‖_{∞→1}` and the cut-norm bracket.

use rand::Rng;

use super::kernel::{GraphonKernel, StepKernel};
use super::measure::{PositionMeasure, Quadrature};
use crate::error::{Error, Result};
use crate::par;
use crate::rng::{self, Domain};

/// Largest number of parts the exact `∞→1` enumeration accepts.
pub const EXACT_MAX_PARTS: usize = 22;

/// `sup_x ∫ |W(x,y)| ν(dy)`: the `∞→∞` norm, attained by the row sign pattern.
pub fn norm_inf_inf(kernel: &GraphonKernel, quad: &Quadrature) -> f64 {
    let rows = par::map_range(quad.len(), |a| {
        let x = quad.nodes()[a];
        (0..quad.len()).map(|b| kernel.abs_cell_mean(x, quad, b)).sum::<f64>() * quad.weight()
    });
    rows.into_iter().fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    Exact,
    Heuristic { restarts: usize, seed: u64 },
}

impl NormMode {
    pub fn heuristic(seed: u64) -> Self {
        NormMode::Heuristic { restarts: 32, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfOneNorm {
    /// Exact value, or the best value found by local search.
    pub value: f64,
    /// Certified lower bound (the value of an explicit sign pattern).
    pub lower: f64,
    /// Certified upper bound: the exact value, or `‖W‖_{1,ν}` in heuristic mode.
    pub upper: f64,
    pub exact: bool,
    /// `‖W‖_□ ∈ [cut_lower, cut_upper]` from `‖W‖_□ ≤ ‖W‖_{∞→1} ≤ 4‖W‖_□`.
    pub cut_lower: f64,
    pub cut_upper: f64,
    pub l1: f64,
}

/// `sup_{‖g‖_∞ ≤ 1} ∫ |∫ W(x,y) g(y) ν(dy)| ν(dx)` for a step kernel.
///
/// The objective is convex in `g`, so the supremum sits on a vertex
/// `g ∈ {−1,+1}^P`. Exact mode walks all vertices in Gray-code order;
/// heuristic mode runs best-improvement sign flips from random starts.
pub fn norm_inf_one(kernel: &GraphonKernel, measure: &PositionMeasure, mode: NormMode) -> Result<InfOneNorm> {
    let step = kernel.as_step().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "∞→1 norm needs a step kernel; discretize {:?} with StepKernel::discretize first",
            kernel.kind()
        ))
    })?;
    norm_inf_one_step(&step, measure, mode)
}

pub fn norm_inf_one_step(step: &StepKernel, measure: &PositionMeasure, mode: NormMode) -> Result<InfOneNorm> {
    let problem = SignProblem::new(step, measure);
    let l1 = problem.l1();
    match mode {
        NormMode::Exact => {
            if problem.p > EXACT_MAX_PARTS {
                return Err(Error::Resource(format!(
                    "exact ∞→1 enumeration is limited to {EXACT_MAX_PARTS} parts, kernel has {}; use heuristic mode",
                    problem.p
                )));
            }
            let value = problem.exact();
            Ok(InfOneNorm {
                value,
                lower: value,
                upper: value,
                exact: true,
                cut_lower: value / 4.0,
                cut_upper: value,
                l1,
            })
        }
        NormMode::Heuristic { restarts, seed } => {
            let value = problem.local_search(restarts.max(1), seed);
            Ok(InfOneNorm {
                value,
                lower: value,
                upper: l1,
                exact: false,
                cut_lower: value / 4.0,
                cut_upper: l1,
                l1,
            })
        }
    }
}

/// `Σ_a m_a |Σ_b W_ab m_b g_b|` over sign vectors `g`.
struct SignProblem {
    p: usize,
    masses: Vec<f64>,
    /// `W_ab m_b`, row-major.
    scaled: Vec<f64>,
}

impl SignProblem {
    fn new(step: &StepKernel, measure: &PositionMeasure) -> Self {
        let p = step.parts();
        let masses = step.masses(measure);
        let mut scaled = Vec::with_capacity(p * p);
        for a in 0..p {
            for b in 0..p {
                scaled.push(step.value(a, b) * masses[b]);
            }
        }
        SignProblem { p, masses, scaled }
    }

    fn l1(&self) -> f64 {
        (0..self.p)
            .map(|a| self.masses[a] * self.scaled[a * self.p..(a + 1) * self.p].iter().map(|v| v.abs()).sum::<f64>())
            .sum()
    }

    fn row_sums(&self, g: &[f64]) -> Vec<f64> {
        (0..self.p)
            .map(|a| {
                self.scaled[a * self.p..(a + 1) * self.p]
                    .iter()
                    .zip(g)
                    .map(|(w, s)| w * s)
                    .sum()
            })
            .collect()
    }

    fn objective(&self, rows: &[f64]) -> f64 {
        rows.iter().zip(&self.masses).map(|(r, m)| m * r.abs()).sum()
    }

    fn exact(&self) -> f64 {
        // g and −g give the same value, so the last sign stays +1.
        let free = self.p - 1;
        let mut g = vec![1.0; self.p];
        let mut rows = self.row_sums(&g);
        let mut best = self.objective(&rows);
        for k in 1u64..(1u64 << free) {
            let b = k.trailing_zeros() as usize;
            g[b] = -g[b];
            let delta = 2.0 * g[b];
            for (a, r) in rows.iter_mut().enumerate() {
                *r += delta * self.scaled[a * self.p + b];
            }
            best = best.max(self.objective(&rows));
        }
        best
    }

    fn local_search(&self, restarts: usize, seed: u64) -> f64 {
        let mut rng = rng::stream(seed, Domain::Heuristic, 0);
        let mut best = f64::NEG_INFINITY;
        for r in 0..restarts {
            let mut g: Vec<f64> = if r == 0 {
                vec![1.0; self.p]
            } else {
                (0..self.p).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
            };
            let mut rows = self.row_sums(&g);
            let mut value = self.objective(&rows);
            loop {
                let mut best_flip = None;
                let mut best_value = value;
                for b in 0..self.p {
                    let delta = -2.0 * g[b];
                    let v: f64 = (0..self.p)
                        .map(|a| self.masses[a] * (rows[a] + delta * self.scaled[a * self.p + b]).abs())
                        .sum();
                    if v > best_value * (1.0 + 1e-14) + 1e-300 {
                        best_value = v;
                        best_flip = Some(b);
                    }
                }
                match best_flip {
                    Some(b) => {
                        let delta = -2.0 * g[b];
                        g[b] = -g[b];
                        for (a, r) in rows.iter_mut().enumerate() {
                            *r += delta * self.scaled[a * self.p + b];
                        }
                        value = self.objective(&rows);
                    }
                    None => break,
                }
            }
            best = best.max(value);
        }
        best
    }
}
