use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Position measure `ν` on `I = [0, 1]`, given by its CDF and inverse CDF.
#[derive(Clone, Default)]
pub enum PositionMeasure {
    /// Lebesgue measure on `[0, 1]`.
    #[default]
    Uniform,
    /// `F(x) = x^exponent`, exponent > 0.
    Power { exponent: f64 },
    Custom {
        name: String,
        cdf: ScalarFn,
        inv_cdf: ScalarFn,
    },
}

impl fmt::Debug for PositionMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositionMeasure::Uniform => write!(f, "Uniform"),
            PositionMeasure::Power { exponent } => write!(f, "Power({exponent})"),
            PositionMeasure::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl PositionMeasure {
    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "power measure exponent must be positive, got {exponent}"
            )));
        }
        Ok(PositionMeasure::Power { exponent })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            PositionMeasure::Uniform => x,
            PositionMeasure::Power { exponent } => x.powf(*exponent),
            PositionMeasure::Custom { cdf, .. } => cdf(x).clamp(0.0, 1.0),
        }
    }

    pub fn inv_cdf(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            PositionMeasure::Uniform => u,
            PositionMeasure::Power { exponent } => u.powf(1.0 / exponent),
            PositionMeasure::Custom { inv_cdf, .. } => inv_cdf(u).clamp(0.0, 1.0),
        }
    }

    /// ν-mass of the interval `(lo, hi]`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        self.cdf(hi) - self.cdf(lo)
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, PositionMeasure::Uniform)
    }

    pub fn name(&self) -> String {
        format!("{self:?}")
    }
}

/// Midpoint rule on `M` cells of equal ν-mass.
///
/// Cell `a` is `(F⁻¹(a/M), F⁻¹((a+1)/M)]` with node `F⁻¹((a+½)/M)` and
/// weight `1/M`. The same cells serve as the space grid of the limit solver
/// and as the partition behind step graphons.
#[derive(Debug, Clone)]
pub struct Quadrature {
    measure: PositionMeasure,
    nodes: Vec<f64>,
    edges: Vec<f64>,
}

pub const DEFAULT_QUADRATURE_POINTS: usize = 400;

impl Quadrature {
    pub fn new(measure: PositionMeasure, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!(
                "quadrature needs at least 2 cells, got {m}"
            )));
        }
        let mf = m as f64;
        let nodes = (0..m).map(|a| measure.inv_cdf((a as f64 + 0.5) / mf)).collect();
        let edges = (0..=m).map(|a| measure.inv_cdf(a as f64 / mf)).collect();
        Ok(Quadrature {
            measure,
            nodes,
            edges,
        })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(PositionMeasure::Uniform, m)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// The `M + 1` cell edges in position space.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.nodes.len() as f64
    }

    pub fn measure(&self) -> &PositionMeasure {
        &self.measure
    }

    /// Position-space bounds `(lo, hi)` of cell `a`.
    pub fn cell(&self, a: usize) -> (f64, f64) {
        (self.edges[a], self.edges[a + 1])
    }

    /// Index of the cell containing `x` (cells are left-open).
    pub fn cell_index(&self, x: f64) -> usize {
        cell_of_cdf(self.measure.cdf(x), self.len())
    }

    /// `∫ g dν` by the midpoint rule.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().map(|&x| g(x)).sum::<f64>() * self.weight()
    }
}

/// Cell of `u ∈ [0,1]` among `n` equal cells `((k)/n, (k+1)/n]`.
pub(crate) fn cell_of_cdf(u: f64, n: usize) -> usize {
    let k = (u * n as f64).ceil() as isize - 1;
    k.clamp(0, n as isize - 1) as usize
}
