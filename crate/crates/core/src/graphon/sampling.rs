use rand::Rng;

use super::kernel::{GraphonKernel, StepKernel};
use super::measure::PositionMeasure;
use crate::error::{Error, Result};
use crate::par;
use crate::rng::{self, Domain};

/// How the `N` positions are laid out on `I = [0, 1]`.
#[derive(Debug, Clone)]
pub enum PositionScheme {
    /// i.i.d. draws from ν (inverse CDF), sorted ascending.
    IidSorted(PositionMeasure),
    /// `x_i = i/N` under the uniform measure.
    RegularGrid,
}

impl PositionScheme {
    pub fn measure(&self) -> PositionMeasure {
        match self {
            PositionScheme::IidSorted(m) => m.clone(),
            PositionScheme::RegularGrid => PositionMeasure::Uniform,
        }
    }

    pub fn is_regular(&self) -> bool {
        matches!(self, PositionScheme::RegularGrid)
    }
}

pub fn sample_positions(scheme: &PositionScheme, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot place zero positions".into()));
    }
    Ok(match scheme {
        PositionScheme::RegularGrid => (1..=n).map(|i| i as f64 / n as f64).collect(),
        PositionScheme::IidSorted(measure) => {
            let mut rng = rng::stream(seed, Domain::Positions, 0);
            let mut xs: Vec<f64> = (0..n).map(|_| measure.inv_cdf(rng.random())).collect();
            xs.sort_by(f64::total_cmp);
            xs
        }
    })
}

/// Per-neuron dilution prefactor `κ_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaRule {
    /// `κ_i = 1` (dense regime).
    Unit,
    /// `κ_i = 1/ρ_N` (diluted, uniformly bounded degrees).
    InverseRho,
    /// `κ_i = N / Σ_j W_N(x_i, x_j)` (unbounded degrees).
    Normalized,
    Fixed(f64),
}

/// Finite-N edge probabilities `W_N(x,y) = ρ_N min(1/ρ_N, W(x,y))` and the κ rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dilution {
    pub rho: f64,
    pub kappa: KappaRule,
}

impl Default for Dilution {
    fn default() -> Self {
        Dilution {
            rho: 1.0,
            kappa: KappaRule::Unit,
        }
    }
}

impl Dilution {
    pub fn dense() -> Self {
        Self::default()
    }

    /// `W_N ≡ ρ_N · min(1/ρ_N, W)` with `κ_i = 1/ρ_N`.
    pub fn diluted(rho: f64) -> Self {
        Dilution {
            rho,
            kappa: KappaRule::InverseRho,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "dilution rho must lie in (0, 1], got {}",
                self.rho
            )));
        }
        if let KappaRule::Fixed(k) = self.kappa {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::InvalidArgument(format!("kappa must be finite and >= 0, got {k}")));
            }
        }
        Ok(())
    }

    /// Edge probability `W_N(x, y)`; the kernel's own finite form wins when present.
    pub fn edge_probability(&self, kernel: &GraphonKernel, x: f64, y: f64) -> f64 {
        match kernel.finite_form() {
            Some(w_n) => w_n(x, y),
            None => self.rho * (1.0 / self.rho).min(kernel.eval(x, y)),
        }
    }

    fn kappa(&self, n: usize, row_probability_sum: f64) -> f64 {
        match self.kappa {
            KappaRule::Unit => 1.0,
            KappaRule::InverseRho => 1.0 / self.rho,
            KappaRule::Fixed(k) => k,
            KappaRule::Normalized => {
                if row_probability_sum > 0.0 {
                    n as f64 / row_probability_sum
                } else {
                    0.0
                }
            }
        }
    }
}

/// A sampled directed graph: edge `j → i` present iff `ξ_ij = 1`.
///
/// Stored twice in CSR form: by target (in-neighbours, the canonical layout)
/// and by source (out-neighbours, what the simulator walks after a spike).
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionGraph {
    positions: Vec<f64>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    kappa: Vec<f64>,
    seed: u64,
}

impl InteractionGraph {
    /// Build from per-row in-neighbour lists (each sorted ascending).
    pub fn from_rows(positions: Vec<f64>, rows: Vec<Vec<u32>>, kappa: Vec<f64>, seed: u64) -> Result<Self> {
        let n = positions.len();
        if rows.len() != n || kappa.len() != n {
            return Err(Error::InvalidArgument(format!(
                "graph with {n} positions got {} rows and {} kappas",
                rows.len(),
                kappa.len()
            )));
        }
        if let Some(k) = kappa.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
            return Err(Error::Model(format!("kappa must be finite and >= 0, got {k}")));
        }
        let mut in_offsets = Vec::with_capacity(n + 1);
        in_offsets.push(0);
        let mut in_sources = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for (i, row) in rows.iter().enumerate() {
            if row.windows(2).any(|w| w[0] >= w[1]) || row.last().is_some_and(|&j| j as usize >= n) {
                return Err(Error::InvalidArgument(format!(
                    "row {i} must list distinct in-neighbours in increasing order below {n}"
                )));
            }
            in_sources.extend_from_slice(row);
            in_offsets.push(in_sources.len());
        }
        let (out_offsets, out_targets) = transpose(n, &in_offsets, &in_sources);
        Ok(InteractionGraph {
            positions,
            in_offsets,
            in_sources,
            out_offsets,
            out_targets,
            kappa,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn edge_count(&self) -> usize {
        self.in_sources.len()
    }

    pub fn in_neighbors(&self, i: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[i]..self.in_offsets[i + 1]]
    }

    pub fn out_neighbors(&self, j: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[j]..self.out_offsets[j + 1]]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.in_neighbors(to).binary_search(&(from as u32)).is_ok()
    }

    /// Interaction weight `κ_i / N` applied to every input of neuron `i`.
    pub fn input_weight(&self, i: usize) -> f64 {
        self.kappa[i] / self.n() as f64
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappa.iter().copied().fold(0.0, f64::max)
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        self.in_offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Weights `κ_i ξ_ij` of the sampled graph, row-major.
    pub fn weight_matrix(&self) -> WeightMatrix {
        let n = self.n();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for &j in self.in_neighbors(i) {
                values[i * n + j as usize] = self.kappa[i];
            }
        }
        WeightMatrix { n, values }
    }

    pub fn summary(&self) -> GraphSummary {
        let degrees = self.in_degrees();
        let n = self.n();
        GraphSummary {
            n,
            edges: self.edge_count(),
            density: self.edge_count() as f64 / (n as f64 * n as f64),
            min_in_degree: degrees.iter().copied().min().unwrap_or(0),
            max_in_degree: degrees.iter().copied().max().unwrap_or(0),
            kappa_max: self.kappa_max(),
            self_loops: (0..n).filter(|&i| self.has_edge(i, i)).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GraphSummary {
    pub n: usize,
    pub edges: usize,
    pub density: f64,
    pub min_in_degree: usize,
    pub max_in_degree: usize,
    pub kappa_max: f64,
    pub self_loops: usize,
}

fn transpose(n: usize, offsets: &[usize], sources: &[u32]) -> (Vec<usize>, Vec<u32>) {
    let mut counts = vec![0usize; n + 1];
    for &j in sources {
        counts[j as usize + 1] += 1;
    }
    for k in 0..n {
        counts[k + 1] += counts[k];
    }
    let out_offsets = counts.clone();
    let mut cursor = counts;
    let mut targets = vec![0u32; sources.len()];
    for i in 0..n {
        for &j in &sources[offsets[i]..offsets[i + 1]] {
            targets[cursor[j as usize]] = i as u32;
            cursor[j as usize] += 1;
        }
    }
    (out_offsets, targets)
}

/// Sample `ξ_ij ~ Bernoulli(W_N(x_i, x_j))` independently, self-loops included.
///
/// Row `i` draws from its own stream, so rows can be sampled in parallel and
/// the result does not depend on the thread count.
pub fn sample_graph(
    kernel: &GraphonKernel,
    positions: &[f64],
    dilution: &Dilution,
    seed: u64,
) -> Result<InteractionGraph> {
    dilution.validate()?;
    let n = positions.len();
    if n == 0 {
        return Err(Error::InvalidArgument("cannot sample a graph on zero positions".into()));
    }
    let rows: Vec<Result<(Vec<u32>, f64)>> = par::map_range(n, |i| {
        let mut rng = rng::stream(seed, Domain::GraphRows, i as u64);
        let xi = positions[i];
        let mut row = Vec::new();
        let mut prob_sum = 0.0;
        for (j, &xj) in positions.iter().enumerate() {
            let p = dilution.edge_probability(kernel, xi, xj);
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Model(format!(
                    "edge probability W_N(x_{i}, x_{j}) = W_N({xi}, {xj}) = {p} is outside [0, 1]"
                )));
            }
            prob_sum += p;
            let u: f64 = rng.random();
            if u < p {
                row.push(j as u32);
            }
        }
        Ok((row, dilution.kappa(n, prob_sum)))
    });
    let mut adjacency = Vec::with_capacity(n);
    let mut kappa = Vec::with_capacity(n);
    for r in rows {
        let (row, k) = r?;
        adjacency.push(row);
        kappa.push(k);
    }
    InteractionGraph::from_rows(positions.to_vec(), adjacency, kappa, seed)
}

/// Dense `n × n` weight matrix `g_ij` of a weighted graph, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    pub n: usize,
    pub values: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "weight matrix for {n} nodes needs {} entries, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(WeightMatrix { n, values })
    }

    /// Expected graph `G_N^{(1)}`: weights `κ_i W_N(x_i, x_j)`.
    pub fn expected(kernel: &GraphonKernel, positions: &[f64], dilution: &Dilution) -> Result<Self> {
        dilution.validate()?;
        let n = positions.len();
        let mut values = Vec::with_capacity(n * n);
        for &xi in positions {
            let row: Vec<f64> = positions
                .iter()
                .map(|&xj| dilution.edge_probability(kernel, xi, xj))
                .collect();
            let k = dilution.kappa(n, row.iter().sum());
            values.extend(row.into_iter().map(|p| k * p));
        }
        Ok(WeightMatrix { n, values })
    }

    /// Deterministic graph `G_N^{(2)}`: weights `W(x_i, x_j)`.
    pub fn sampled_kernel(kernel: &GraphonKernel, positions: &[f64]) -> Self {
        let n = positions.len();
        let values = positions
            .iter()
            .flat_map(|&xi| positions.iter().map(move |&xj| kernel.eval(xi, xj)))
            .collect();
        WeightMatrix { n, values }
    }
}

/// Step graphon `W^G(u,v) = Σ g_ij 1_{B_i}(u) 1_{B_j}(v)` on the equal-mass partition of ν.
pub fn step_graphon(weights: &WeightMatrix, measure: &PositionMeasure) -> Result<GraphonKernel> {
    if weights.values.len() != weights.n * weights.n || weights.n == 0 {
        return Err(Error::InvalidArgument(format!(
            "weight matrix shape mismatch: n = {}, {} entries",
            weights.n,
            weights.values.len()
        )));
    }
    let step = StepKernel::equal_mass(measure, weights.n, weights.values.clone())?;
    Ok(GraphonKernel::step(step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::{norm_inf_inf, Quadrature};

    #[test]
    fn regular_grid_positions() {
        let xs = sample_positions(&PositionScheme::RegularGrid, 4, 99).unwrap();
        assert_eq!(xs, vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(sample_positions(&PositionScheme::RegularGrid, 1, 0).unwrap(), vec![1.0]);
        assert!(matches!(
            sample_positions(&PositionScheme::RegularGrid, 0, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn iid_positions_are_sorted_and_reproducible() {
        let scheme = PositionScheme::IidSorted(PositionMeasure::Uniform);
        let a = sample_positions(&scheme, 500, 5).unwrap();
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(a, sample_positions(&scheme, 500, 5).unwrap());
        assert_ne!(a, sample_positions(&scheme, 500, 6).unwrap());
    }

    #[test]
    fn iid_uniform_positions_pass_ks_band() {
        // KS 99% band: sup|F_n − F| ≤ 1.63/√n.
        let n = 10_000;
        let xs = sample_positions(&PositionScheme::IidSorted(PositionMeasure::Uniform), n, 2024).unwrap();
        let d = crate::stats::ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert!(d <= 1.63 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn full_and_empty_graphs() {
        let xs = sample_positions(&PositionScheme::RegularGrid, 30, 0).unwrap();
        let full = sample_graph(&GraphonKernel::constant(1.0), &xs, &Dilution::dense(), 1).unwrap();
        assert_eq!(full.edge_count(), 900);
        assert_eq!(full.summary().self_loops, 30);
        let empty = sample_graph(&GraphonKernel::constant(0.0), &xs, &Dilution::dense(), 1).unwrap();
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    fn half_density_edge_count_within_four_sigma() {
        let xs = sample_positions(&PositionScheme::RegularGrid, 1000, 0).unwrap();
        let g = sample_graph(&GraphonKernel::constant(0.5), &xs, &Dilution::dense(), 77).unwrap();
        let mean = 0.5e6;
        let sigma = (0.25e6f64).sqrt();
        assert!((g.edge_count() as f64 - mean).abs() <= 4.0 * sigma, "{}", g.edge_count());
    }

    #[test]
    fn out_of_range_probability_names_the_pair() {
        let xs = vec![0.25, 0.5];
        let k = GraphonKernel::constant(0.5).with_finite_form(std::sync::Arc::new(|x, y| x + y + 0.5));
        let err = sample_graph(&k, &xs, &Dilution::dense(), 0).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Model(_)));
        assert!(msg.contains("x_0") && msg.contains("x_1"), "{msg}");
    }

    #[test]
    fn diluted_er_weights() {
        let xs = sample_positions(&PositionScheme::RegularGrid, 200, 0).unwrap();
        let d = Dilution::diluted(0.1);
        let g = sample_graph(&GraphonKernel::constant(1.0), &xs, &d, 3).unwrap();
        assert!(g.kappa().iter().all(|&k| (k - 10.0).abs() < 1e-12));
        // κ_i W_N ≡ 1, so the expected-graph step graphon is the constant 1.
        let w = WeightMatrix::expected(&GraphonKernel::constant(1.0), &xs, &d).unwrap();
        assert!(w.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn normalized_kappa_rows() {
        let xs = sample_positions(&PositionScheme::RegularGrid, 50, 0).unwrap();
        let d = Dilution {
            rho: 1.0,
            kappa: KappaRule::Normalized,
        };
        let w = WeightMatrix::expected(&GraphonKernel::product(), &xs, &d).unwrap();
        for i in 0..50 {
            let row: f64 = w.values[i * 50..(i + 1) * 50].iter().sum();
            assert!((row / 50.0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn adjacency_views_agree() {
        let xs = sample_positions(&PositionScheme::RegularGrid, 60, 0).unwrap();
        let g = sample_graph(&GraphonKernel::product(), &xs, &Dilution::dense(), 4).unwrap();
        let mut from_out = 0;
        for j in 0..60 {
            for &i in g.out_neighbors(j) {
                assert!(g.has_edge(j, i as usize));
                from_out += 1;
            }
        }
        assert_eq!(from_out, g.edge_count());
    }

    #[test]
    fn sampling_is_independent_of_thread_count() {
        let xs = sample_positions(&PositionScheme::RegularGrid, 120, 0).unwrap();
        let k = GraphonKernel::product();
        let a = sample_graph(&k, &xs, &Dilution::dense(), 8).unwrap();
        let pool = rayon_free_single(|| sample_graph(&k, &xs, &Dilution::dense(), 8).unwrap());
        assert_eq!(a, pool);
    }

    #[cfg(feature = "parallel")]
    fn rayon_free_single<T: Send>(f: impl FnOnce() -> T + Send) -> T {
        rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
    }

    #[cfg(not(feature = "parallel"))]
    fn rayon_free_single<T: Send>(f: impl FnOnce() -> T + Send) -> T {
        f()
    }

    #[test]
    fn step_graphon_examples() {
        let nu = PositionMeasure::Uniform;
        let q = Quadrature::uniform(400).unwrap();
        let c = step_graphon(&WeightMatrix::new(1, vec![2.5]).unwrap(), &nu).unwrap();
        assert_eq!(c.eval(0.3, 0.9), 2.5);
        let id = step_graphon(&WeightMatrix::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap(), &nu).unwrap();
        assert!((norm_inf_inf(&id, &q) - 0.5).abs() < 1e-12);
        assert!(matches!(
            step_graphon(&WeightMatrix { n: 2, values: vec![1.0] }, &nu),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn empirical_edge_rate_per_class() {
        // One pair class with p = W_N = 0.3, m = 40 000 Bernoulli draws.
        let xs = sample_positions(&PositionScheme::RegularGrid, 200, 0).unwrap();
        let g = sample_graph(&GraphonKernel::constant(0.3), &xs, &Dilution::dense(), 12).unwrap();
        let m = 40_000.0;
        let rate = g.edge_count() as f64 / m;
        assert!((rate - 0.3).abs() <= 4.0 * (0.3 * 0.7 / m).sqrt(), "{rate}");
    }
}
