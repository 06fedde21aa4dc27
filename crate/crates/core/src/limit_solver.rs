//! Mean-field intensity `λ(t,x) = f(u0(t,x) + ∫ W(x,y) ∫_0^t h(t−s) λ(s,y) ds ν(dy))`
//! by Picard iteration on a time × space grid.

use std::io::Write;
use std::path::Path;

use ndarray::{Array2, ArrayView2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphon::{GraphonKernel, Quadrature};
use crate::longtime::DiscreteOperator;
use crate::model::{exp_linear_integral, HawkesModel, JumpRate, MemoryKernel};
use crate::par;

pub const MAX_PICARD_ITERATIONS: usize = 1000;

/// Uniform time grid `t_k = k Δt`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_end: f64,
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    /// `Δt` is adjusted down so that `T` is a grid point.
    pub fn new(t_end: f64, dt: f64) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) || !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time grid needs T > 0 and dt > 0, got T = {t_end}, dt = {dt}"
            )));
        }
        let steps = ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok(TimeGrid {
            t_end,
            dt: t_end / steps as f64,
            steps,
        })
    }

    #[inline]
    pub fn t(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t_end
        } else {
            k as f64 * self.dt
        }
    }

    pub fn points(&self) -> usize {
        self.steps + 1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveInfo {
    pub iterations: usize,
    pub tol: f64,
    /// Sup-norm change of the last iteration.
    pub last_change: f64,
    /// Last ratio of successive changes.
    pub last_ratio: f64,
    pub method: &'static str,
}

/// Values on a time × space grid: linear in `t`, constant on each space cell.
#[derive(Debug, Clone)]
pub struct IntensityField {
    grid: TimeGrid,
    nodes: Vec<f64>,
    edges: Vec<f64>,
    /// Time-major: `values[k * M + a]`.
    values: Vec<f64>,
    /// The argument of `f` that produced `values`, when kept.
    argument: Option<Vec<f64>>,
    pub info: Option<SolveInfo>,
}

impl IntensityField {
    pub fn new(grid: TimeGrid, nodes: Vec<f64>, edges: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let m = nodes.len();
        if edges.len() != m + 1 || values.len() != grid.points() * m {
            return Err(Error::GridMismatch(format!(
                "field with {} times and {m} cells got {} edges and {} values",
                grid.points(),
                edges.len(),
                values.len()
            )));
        }
        Ok(IntensityField {
            grid,
            nodes,
            edges,
            values,
            argument: None,
            info: None,
        })
    }

    pub fn from_fn(grid: TimeGrid, quad: &Quadrature, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.points())
            .flat_map(|k| quad.nodes().iter().map(move |&x| (k, x)))
            .map(|(k, x)| f(grid.t(k), x))
            .collect();
        IntensityField {
            grid,
            nodes: quad.nodes().to_vec(),
            edges: quad.edges().to_vec(),
            values,
            argument: None,
            info: None,
        }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn cells(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values at time index `k`, one per cell.
    pub fn slice(&self, k: usize) -> &[f64] {
        let m = self.cells();
        &self.values[k * m..(k + 1) * m]
    }

    pub fn last_slice(&self) -> &[f64] {
        self.slice(self.grid.steps)
    }

    #[inline]
    pub fn get(&self, k: usize, a: usize) -> f64 {
        self.values[k * self.cells() + a]
    }

    /// Cell containing `x` (cells are left-open).
    pub fn cell_of(&self, x: f64) -> usize {
        let k = self.edges.partition_point(|&e| e < x);
        k.clamp(1, self.cells()) - 1
    }

    /// Linear in `t` on cell `a`; constant beyond the grid ends.
    #[inline]
    pub fn at_cell(&self, t: f64, a: usize) -> f64 {
        let g = &self.grid;
        if t <= 0.0 {
            return self.get(0, a);
        }
        if t >= g.t_end {
            return self.get(g.steps, a);
        }
        let pos = t / g.dt;
        let k = (pos.floor() as usize).min(g.steps - 1);
        let w = pos - k as f64;
        let (v0, v1) = (self.get(k, a), self.get(k + 1, a));
        v0 + w * (v1 - v0)
    }

    pub fn at(&self, t: f64, x: f64) -> f64 {
        self.at_cell(t, self.cell_of(x))
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Per cell, `sup_{s ≥ t_k}` of the field: a bound on any later window.
    pub fn suffix_max(&self) -> Vec<f64> {
        let m = self.cells();
        let mut out = self.values.clone();
        for k in (0..self.grid.steps).rev() {
            for a in 0..m {
                out[k * m + a] = out[k * m + a].max(out[(k + 1) * m + a]);
            }
        }
        out
    }

    /// Stored argument of `f`, when the solver kept it.
    pub fn argument(&self) -> Option<&[f64]> {
        self.argument.as_deref()
    }

    /// `(∫ v(t,x)² ν(dx))^{1/2}` at time index `k`, cells of equal mass.
    pub fn l2_at(&self, k: usize) -> f64 {
        let s = self.slice(k);
        (s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64).sqrt()
    }

    pub fn same_grid(&self, other: &IntensityField) -> bool {
        self.grid == other.grid && self.nodes == other.nodes
    }

    /// Long-format CSV `t,x,<column>`, every `stride`-th time.
    pub fn write_csv(&self, path: &Path, column: &str, stride: usize) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "t,x,{column}").map_err(io)?;
        let stride = stride.max(1);
        let mut k = 0;
        while k <= self.grid.steps {
            let t = self.grid.t(k);
            for (a, x) in self.nodes.iter().enumerate() {
                writeln!(w, "{t},{x},{}", self.get(k, a)).map_err(io)?;
            }
            if k == self.grid.steps {
                break;
            }
            k = (k + stride).min(self.grid.steps);
        }
        w.flush().map_err(io)
    }

    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "t_end": self.grid.t_end,
            "dt": self.grid.dt,
            "steps": self.grid.steps,
            "cells": self.cells(),
            "x_min": self.nodes.first(),
            "x_max": self.nodes.last(),
            "solver": self.info,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PicardStart {
    /// `g₀ = f(u0)`
    Baseline,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub dt: f64,
    pub tol: f64,
    pub cells: usize,
    pub max_iterations: usize,
    pub start: PicardStart,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            dt: 1e-3,
            tol: 1e-9,
            cells: crate::graphon::DEFAULT_QUADRATURE_POINTS,
            max_iterations: MAX_PICARD_ITERATIONS,
            start: PicardStart::Baseline,
        }
    }
}

enum Convolution {
    /// `C_{k+1} = decay · C_k + w0 g_k + w1 g_{k+1}`: exact for piecewise-linear `g`.
    Exponential { decay: f64, w0: f64, w1: f64 },
    /// Trapezoid weights `Δt h(t_k)`.
    Trapezoid { h: Vec<f64>, dt: f64 },
}

impl Convolution {
    fn new(h: &MemoryKernel, grid: &TimeGrid) -> Self {
        let dt = grid.dt;
        match h.exponential_rate() {
            Some(alpha) => Convolution::Exponential {
                decay: (-alpha * dt).exp(),
                w0: exp_linear_integral(alpha, dt, 0.0, 1.0),
                w1: exp_linear_integral(alpha, dt, 1.0, 0.0),
            },
            None => Convolution::Trapezoid {
                h: (0..grid.points()).map(|k| h.eval(grid.t(k))).collect(),
                dt,
            },
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Convolution::Exponential { .. } => "exponential-exact",
            Convolution::Trapezoid { .. } => "trapezoid",
        }
    }

    /// `out_k = ∫_0^{t_k} h(t_k − s) g(s) ds` for one cell's time series.
    fn apply(&self, g: &[f64], out: &mut [f64]) {
        match self {
            Convolution::Exponential { decay, w0, w1 } => {
                out[0] = 0.0;
                for k in 1..g.len() {
                    out[k] = decay * out[k - 1] + w0 * g[k - 1] + w1 * g[k];
                }
            }
            Convolution::Trapezoid { h, dt } => {
                out[0] = 0.0;
                for k in 1..g.len() {
                    let mut acc = 0.5 * (h[k] * g[0] + h[0] * g[k]);
                    for j in 1..k {
                        acc += h[k - j] * g[j];
                    }
                    out[k] = acc * dt;
                }
            }
        }
    }
}

/// The discretized Picard map `F(g) = f(u0 + A (h ∗ g))`.
///
/// Fields are cell-major here (`[a * (K+1) + k]`) so each cell's time series is
/// contiguous for the convolution.
pub struct PicardMap<'a> {
    op: &'a DiscreteOperator,
    rate: &'a JumpRate,
    grid: TimeGrid,
    baseline: Vec<f64>,
    conv: Convolution,
}

impl<'a> PicardMap<'a> {
    /// `baseline(t, a)` gives `u0(t, x_a)`.
    pub fn new(
        op: &'a DiscreteOperator,
        rate: &'a JumpRate,
        h: &MemoryKernel,
        grid: TimeGrid,
        baseline: impl Fn(f64, usize) -> f64 + Sync,
    ) -> Self {
        let kp = grid.points();
        let mut base = vec![0.0; op.len() * kp];
        par::for_each_row_mut(&mut base, kp, |a, row| {
            for (k, v) in row.iter_mut().enumerate() {
                *v = baseline(grid.t(k), a);
            }
        });
        PicardMap {
            op,
            rate,
            grid,
            baseline: base,
            conv: Convolution::new(h, &grid),
        }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn initial(&self, start: PicardStart) -> Vec<f64> {
        match start {
            PicardStart::Zero => vec![0.0; self.baseline.len()],
            PicardStart::Baseline => self.baseline.iter().map(|&u| self.rate.eval(u)).collect(),
        }
    }

    /// `u0 + A (h ∗ g)`.
    pub fn argument(&self, g: &[f64]) -> Vec<f64> {
        let kp = self.grid.points();
        let mut conv = vec![0.0; g.len()];
        par::for_each_row_mut(&mut conv, kp, |a, row| self.conv.apply(&g[a * kp..(a + 1) * kp], row));
        let conv = Array2::from_shape_vec((self.op.len(), kp), conv).expect("cell-major shape");
        let mut mixed = self.op.mix(conv.view()).into_raw_vec_and_offset().0;
        for (v, u) in mixed.iter_mut().zip(&self.baseline) {
            *v += u;
        }
        mixed
    }

    /// `(argument, F(g))`.
    pub fn apply(&self, g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let arg = self.argument(g);
        let next = arg.iter().map(|&u| self.rate.eval(u)).collect();
        (arg, next)
    }

    /// Iterate to the fixed point.
    pub fn solve(&self, tol: f64, max_iterations: usize, start: PicardStart) -> Result<(Vec<f64>, Vec<f64>, SolveInfo)> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be > 0, got {tol}")));
        }
        let mut g = self.initial(start);
        let (mut prev_change, mut ratio) = (f64::NAN, f64::NAN);
        let mut confirmed = 0;
        for it in 1..=max_iterations {
            let (arg, next) = self.apply(&g);
            let mut change: f64 = 0.0;
            let mut scale: f64 = 1.0;
            for (a, b) in next.iter().zip(&g) {
                change = change.max((a - b).abs());
                scale = scale.max(a.abs());
            }
            if !change.is_finite() {
                return Err(Error::NonConvergence {
                    iterations: it,
                    last_ratio: ratio,
                    detail: "iterate became non-finite".into(),
                });
            }
            if prev_change > 0.0 {
                ratio = change / prev_change;
            }
            prev_change = change;
            g = next;
            if change < tol * scale {
                confirmed += 1;
                if confirmed == 2 {
                    let info = SolveInfo {
                        iterations: it,
                        tol,
                        last_change: change,
                        last_ratio: ratio,
                        method: self.conv.name(),
                    };
                    return Ok((g, arg, info));
                }
            } else {
                confirmed = 0;
            }
        }
        Err(Error::NonConvergence {
            iterations: max_iterations,
            last_ratio: ratio,
            detail: format!(
                "sup change {prev_change:.3e}; the memory kernel or the degree may be too large for this horizon"
            ),
        })
    }

    /// Cell-major values to a time-major field on the operator's cells.
    pub fn to_field(&self, cell_major: &[f64]) -> IntensityField {
        let (m, kp) = (self.op.len(), self.grid.points());
        let view = ArrayView2::from_shape((m, kp), cell_major).expect("cell-major shape");
        IntensityField {
            grid: self.grid,
            nodes: self.op.nodes().to_vec(),
            edges: self.op.edges().to_vec(),
            values: view.t().iter().copied().collect(),
            argument: None,
            info: None,
        }
    }
}

/// Solve for `λ` on `[0, T]` with `opts.cells` ν-equidistributed cells.
///
/// The returned field keeps the argument of `f` from the last iteration, so
/// `macroscopic_profile` returns it without recomputation.
pub fn solve_lambda(kernel: &GraphonKernel, model: &HawkesModel, t_end: f64, opts: &SolverOptions) -> Result<IntensityField> {
    let quad = Quadrature::new(model.measure.clone(), opts.cells)?;
    let op = DiscreteOperator::new(kernel, &quad);
    solve_on(&op, model, t_end, opts)
}

/// As `solve_lambda`, on a prebuilt operator.
pub fn solve_on(op: &DiscreteOperator, model: &HawkesModel, t_end: f64, opts: &SolverOptions) -> Result<IntensityField> {
    let grid = TimeGrid::new(t_end, opts.dt)?;
    let nodes = op.nodes();
    let map = PicardMap::new(op, &model.rate, &model.kernel, grid, |t, a| model.baseline.eval(t, nodes[a]));
    let (g, arg, info) = map.solve(opts.tol, opts.max_iterations, opts.start)?;
    log::debug!("limit solve: {} iterations, last change {:.3e}", info.iterations, info.last_change);
    let mut field = map.to_field(&g);
    field.argument = Some(map.to_field(&arg).values);
    field.info = Some(info);
    Ok(field)
}

/// `u(t,x) = u0(t,x) + ∫ W(x,y) ∫_0^t h(t−s) λ(s,y) ds ν(dy)` on the field's grid.
pub fn macroscopic_profile(field: &IntensityField, kernel: &GraphonKernel, model: &HawkesModel) -> Result<IntensityField> {
    let quad = Quadrature::new(model.measure.clone(), field.cells())?;
    if quad.nodes() != field.nodes() {
        return Err(Error::GridMismatch(format!(
            "field cells do not match the {}-cell grid of measure {}",
            field.cells(),
            model.measure.name()
        )));
    }
    let values = match field.argument() {
        Some(arg) => arg.to_vec(),
        None => {
            let op = DiscreteOperator::new(kernel, &quad);
            let map = PicardMap::new(&op, &model.rate, &model.kernel, field.grid(), |t, a| {
                model.baseline.eval(t, quad.nodes()[a])
            });
            let (m, kp) = (field.cells(), field.grid().points());
            let cell_major: Vec<f64> = (0..m)
                .flat_map(|a| (0..kp).map(move |k| (k, a)))
                .map(|(k, a)| field.get(k, a))
                .collect();
            map.to_field(&map.argument(&cell_major)).values
        }
    };
    IntensityField::new(field.grid(), field.nodes.clone(), field.edges.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::PositionMeasure;
    use crate::model::Baseline;

    fn fig2_lambda(t: f64) -> f64 {
        4.0 / 3.0 - (-1.5 * t).exp() / 3.0
    }

    fn opts(cells: usize, dt: f64) -> SolverOptions {
        SolverOptions {
            dt,
            cells,
            tol: 1e-10,
            ..Default::default()
        }
    }

    #[test]
    fn time_grid_hits_the_horizon() {
        let g = TimeGrid::new(5.0, 1e-3).unwrap();
        assert_eq!(g.steps, 5000);
        assert_eq!(g.t(5000), 5.0);
        let odd = TimeGrid::new(1.0, 0.3).unwrap();
        assert_eq!(odd.steps, 4);
        assert!(TimeGrid::new(0.0, 0.1).is_err());
    }

    #[test]
    fn zero_kernel_converges_to_baseline() {
        let model = HawkesModel::linear_exponential(2.0, 1.0)
            .unwrap()
            .with_baseline(Baseline::Affine { a: 1.0, b: 0.5 })
            .unwrap();
        let f = solve_lambda(&GraphonKernel::constant(0.0), &model, 1.0, &opts(10, 0.01)).unwrap();
        for k in 0..=f.grid().steps {
            for (a, x) in f.nodes().iter().enumerate() {
                assert_eq!(f.get(k, a), x + 0.5);
            }
        }
        assert_eq!(f.info.as_ref().unwrap().iterations, 2);
    }

    #[test]
    fn erdos_renyi_closed_form() {
        let model = HawkesModel::linear_exponential(2.0, 1.0).unwrap();
        let f = solve_lambda(&GraphonKernel::constant(0.5), &model, 5.0, &opts(8, 1e-3)).unwrap();
        let g = f.grid();
        let err = (0..=g.steps)
            .map(|k| (f.get(k, 3) - fig2_lambda(g.t(k))).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn trapezoid_path_matches_exponential_path() {
        let model = HawkesModel::linear_exponential(2.0, 1.0).unwrap();
        let times: Vec<f64> = (0..=3000).map(|k| k as f64 * 2e-3).collect();
        let values = times.iter().map(|t| (-2.0 * t).exp()).collect();
        let tab = HawkesModel::new(
            JumpRate::Linear,
            MemoryKernel::tabulated(times, values).unwrap(),
            Baseline::Constant(1.0),
            PositionMeasure::Uniform,
        )
        .unwrap();
        let k = GraphonKernel::constant(0.5);
        let a = solve_lambda(&k, &model, 2.0, &opts(4, 2e-3)).unwrap();
        let b = solve_lambda(&k, &tab, 2.0, &opts(4, 2e-3)).unwrap();
        assert_eq!(b.info.as_ref().unwrap().method, "trapezoid");
        let diff = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-5, "{diff}");
    }

    #[test]
    fn profile_equals_lambda_for_linear_rate() {
        let model = HawkesModel::linear_exponential(2.0, 1.0).unwrap();
        let k = GraphonKernel::product();
        let f = solve_lambda(&k, &model, 2.0, &opts(40, 1e-2)).unwrap();
        let u = macroscopic_profile(&f, &k, &model).unwrap();
        assert_eq!(u.values(), f.values());
        // Recomputed without the stored argument: one Picard step away.
        let mut bare = f.clone();
        bare.argument = None;
        let u2 = macroscopic_profile(&bare, &k, &model).unwrap();
        let diff = u2.values().iter().zip(f.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff}");
    }

    #[test]
    fn profile_grid_mismatch() {
        let model = HawkesModel::linear_exponential(2.0, 1.0).unwrap();
        let k = GraphonKernel::product();
        let f = solve_lambda(&k, &model, 1.0, &opts(10, 0.1)).unwrap();
        let mut other = model.clone();
        other.measure = PositionMeasure::power(2.0).unwrap();
        assert!(matches!(macroscopic_profile(&f, &k, &other), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn zero_kernel_profile_is_baseline() {
        let model = HawkesModel::linear_exponential(2.0, 0.7).unwrap();
        let k = GraphonKernel::constant(0.0);
        let f = solve_lambda(&k, &model, 1.0, &opts(5, 0.1)).unwrap();
        let u = macroscopic_profile(&f, &k, &model).unwrap();
        assert!(u.values().iter().all(|&v| v == 0.7));
    }

    #[test]
    fn nonlinear_rate_keeps_separate_profile() {
        let mut model = HawkesModel::linear_exponential(2.0, 1.0).unwrap();
        model.rate = JumpRate::named("sigmoid").unwrap();
        let k = GraphonKernel::constant(1.0);
        let f = solve_lambda(&k, &model, 2.0, &opts(4, 1e-2)).unwrap();
        let u = macroscopic_profile(&f, &k, &model).unwrap();
        for (l, a) in f.values().iter().zip(u.values()) {
            assert!((l - 1.0 / (1.0 + (-a).exp())).abs() < 1e-8);
        }
    }

    #[test]
    fn picard_iterates_increase_from_zero() {
        let model = HawkesModel::linear_exponential(2.0, 1.0).unwrap();
        let quad = Quadrature::uniform(20).unwrap();
        let op = DiscreteOperator::new(&GraphonKernel::product(), &quad);
        let grid = TimeGrid::new(3.0, 0.01).unwrap();
        let map = PicardMap::new(&op, &model.rate, &model.kernel, grid, |_, _| 1.0);
        let mut g = map.initial(PicardStart::Zero);
        for _ in 0..15 {
            let next = map.apply(&g).1;
            assert!(next.iter().zip(&g).all(|(a, b)| *a >= *b));
            g = next;
        }
    }

    #[test]
    fn divergence_reports_ratio() {
        let model = HawkesModel::linear_exponential(0.1, 1.0).unwrap();
        let o = SolverOptions {
            max_iterations: 5,
            ..opts(4, 0.1)
        };
        match solve_lambda(&GraphonKernel::constant(5.0), &model, 50.0, &o) {
            Err(Error::NonConvergence { iterations, last_ratio, .. }) => {
                assert_eq!(iterations, 5);
                assert!(last_ratio > 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn interpolation_contract() {
        let quad = Quadrature::uniform(4).unwrap();
        let grid = TimeGrid::new(1.0, 0.5).unwrap();
        let f = IntensityField::from_fn(grid, &quad, |t, x| t + 10.0 * x);
        assert!((f.at(0.25, 0.3) - (0.25 + 3.75)).abs() < 1e-12);
        assert_eq!(f.at(0.5, 0.25), f.get(1, 0));
        assert_eq!(f.at(7.0, 1.0), f.get(2, 3));
        assert_eq!(f.suffix_max()[0], f.get(2, 0));
    }

    #[test]
    fn csv_export() {
        let quad = Quadrature::uniform(2).unwrap();
        let grid = TimeGrid::new(1.0, 0.5).unwrap();
        let f = IntensityField::from_fn(grid, &quad, |t, _| t);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        f.write_csv(&p, "lambda", 2).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "t,x,lambda\n0,0.25,0\n0,0.75,0\n1,0.25,1\n1,0.75,1\n");
    }
}
