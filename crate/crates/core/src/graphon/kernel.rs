use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::measure::{PositionMeasure, Quadrature, ScalarFn};
use crate::error::{Error, Result};
use crate::rng::{self, Domain};

pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// One factor of a separable kernel `W(x,y) = f(x) g(y)`.
#[derive(Clone)]
pub enum Profile {
    /// `scale * x^exponent`
    Power { scale: f64, exponent: f64 },
    Custom { name: String, f: ScalarFn },
}

impl Profile {
    pub fn identity() -> Self {
        Profile::Power {
            scale: 1.0,
            exponent: 1.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Power { scale, exponent } => scale * x.powf(*exponent),
            Profile::Custom { f, .. } => f(x),
        }
    }

    fn same_as(&self, other: &Profile) -> bool {
        match (self, other) {
            (
                Profile::Power { scale, exponent },
                Profile::Power {
                    scale: s2,
                    exponent: e2,
                },
            ) => scale == s2 && exponent == e2,
            (Profile::Custom { f, .. }, Profile::Custom { f: g, .. }) => Arc::ptr_eq(f, g),
            _ => false,
        }
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Power { scale, exponent } => write!(f, "{scale}*x^{exponent}"),
            Profile::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

/// Piecewise-constant kernel on a partition of `[0,1]`.
///
/// Part `k` is the interval `(bounds[k], bounds[k+1]]` (the first part also
/// contains 0); `values` is row-major `P × P`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel {
    bounds: Vec<f64>,
    values: Vec<f64>,
}

impl StepKernel {
    pub fn new(bounds: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = bounds.len().saturating_sub(1);
        if p == 0 {
            return Err(Error::InvalidArgument("step kernel needs at least one part".into()));
        }
        if values.len() != p * p {
            return Err(Error::InvalidArgument(format!(
                "step kernel with {p} parts needs {} values, got {}",
                p * p,
                values.len()
            )));
        }
        if bounds.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidArgument("step kernel bounds must be non-decreasing".into()));
        }
        Ok(StepKernel { bounds, values })
    }

    /// Partition into `n` parts of equal ν-mass (the partition `B_i` with `ν(B_i) = 1/n`).
    pub fn equal_mass(measure: &PositionMeasure, n: usize, values: Vec<f64>) -> Result<Self> {
        let bounds = (0..=n).map(|i| measure.inv_cdf(i as f64 / n as f64)).collect();
        Self::new(bounds, values)
    }

    /// Parts with the given ν-masses, laid out left to right.
    pub fn with_masses(measure: &PositionMeasure, masses: &[f64], values: Vec<f64>) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if masses.iter().any(|&m| !(m > 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "class masses must be positive and sum to 1 (sum = {total})"
            )));
        }
        let mut bounds = Vec::with_capacity(masses.len() + 1);
        bounds.push(measure.inv_cdf(0.0));
        let mut acc = 0.0;
        for (k, m) in masses.iter().enumerate() {
            acc += m;
            let u = if k + 1 == masses.len() { 1.0 } else { acc };
            bounds.push(measure.inv_cdf(u));
        }
        Self::new(bounds, values)
    }

    pub fn parts(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.parts() + b]
    }

    pub fn masses(&self, measure: &PositionMeasure) -> Vec<f64> {
        self.bounds
            .windows(2)
            .map(|w| measure.mass(w[0], w[1]))
            .collect()
    }

    pub fn part_of(&self, x: f64) -> usize {
        // First k with x <= bounds[k+1].
        let p = self.parts();
        let k = self.bounds[1..].partition_point(|&b| b < x);
        k.min(p - 1)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.value(self.part_of(x), self.part_of(y))
    }

    fn is_symmetric(&self) -> bool {
        let p = self.parts();
        (0..p).all(|a| (0..a).all(|b| self.value(a, b) == self.value(b, a)))
    }

    /// ν-weighted mean of row `x` over `(lo, hi]`.
    fn row_mean(&self, x: f64, lo: f64, hi: f64, measure: &PositionMeasure) -> f64 {
        let total = measure.mass(lo, hi);
        let a = self.part_of(x);
        if total <= 0.0 {
            return self.value(a, self.part_of(hi));
        }
        let mut acc = 0.0;
        for b in 0..self.parts() {
            let l = self.bounds[b].max(lo);
            let h = self.bounds[b + 1].min(hi);
            if h > l {
                acc += self.value(a, b) * measure.mass(l, h);
            }
        }
        acc / total
    }

    /// Common refinement of two partitions, as sorted unique bounds.
    fn merged_bounds(&self, other: &StepKernel) -> Vec<f64> {
        let mut b: Vec<f64> = self.bounds.iter().chain(&other.bounds).copied().collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// The same kernel expressed on a finer partition containing all of `self`'s bounds.
    fn refine(&self, bounds: &[f64]) -> StepKernel {
        let p = bounds.len() - 1;
        let mids: Vec<usize> = bounds
            .windows(2)
            .map(|w| self.part_of(0.5 * (w[0] + w[1])))
            .collect();
        let mut values = Vec::with_capacity(p * p);
        for &a in &mids {
            for &b in &mids {
                values.push(self.value(a, b));
            }
        }
        StepKernel {
            bounds: bounds.to_vec(),
            values,
        }
    }

    /// Cell-mean discretization of an arbitrary kernel on the quadrature cells.
    pub fn discretize(kernel: &GraphonKernel, quad: &Quadrature) -> StepKernel {
        let m = quad.len();
        let mut values = Vec::with_capacity(m * m);
        for &x in quad.nodes() {
            for b in 0..m {
                values.push(kernel.cell_mean(x, quad, b));
            }
        }
        StepKernel {
            bounds: quad.edges().to_vec(),
            values,
        }
    }
}

#[derive(Clone)]
pub enum KernelKind {
    Constant(f64),
    /// `1{d_circle(x,y) < radius}` on the circle `[0,1)`.
    PNearest { radius: f64 },
    Separable { f: Profile, g: Profile },
    /// Consecutive populations with ν-masses `α_j` and connectivity `m_ij`.
    MultiClass(StepKernel),
    /// `n` equal-mass parts; the graphon of a weighted graph.
    StepGrid(StepKernel),
    Difference(Box<GraphonKernel>, Box<GraphonKernel>),
    Custom { name: String, f: KernelFn },
}

impl fmt::Debug for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelKind::Constant(c) => write!(f, "Constant({c})"),
            KernelKind::PNearest { radius } => write!(f, "PNearest(r={radius})"),
            KernelKind::Separable { f: a, g } => write!(f, "Separable({a:?}, {g:?})"),
            KernelKind::MultiClass(s) => write!(f, "MultiClass({} classes)", s.parts()),
            KernelKind::StepGrid(s) => write!(f, "StepGrid({} parts)", s.parts()),
            KernelKind::Difference(a, b) => write!(f, "({:?}) - ({:?})", a.kind, b.kind),
            KernelKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// Optional Hölder data: `∫|W(x,y) − W(x',y)| ν(dy) ≤ C |x − x'|^ϑ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderData {
    pub exponent: f64,
    pub constant: f64,
}

/// Macroscopic interaction kernel `W(x, y) ≥ 0` on `[0,1]²`.
#[derive(Clone)]
pub struct GraphonKernel {
    kind: KernelKind,
    symmetric: bool,
    finite_form: Option<KernelFn>,
    holder: Option<HolderData>,
}

impl fmt::Debug for GraphonKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphonKernel")
            .field("kind", &self.kind)
            .field("symmetric", &self.symmetric)
            .field("finite_form", &self.finite_form.is_some())
            .field("holder", &self.holder)
            .finish()
    }
}

impl GraphonKernel {
    fn from_kind(kind: KernelKind, symmetric: bool) -> Self {
        GraphonKernel {
            kind,
            symmetric,
            finite_form: None,
            holder: None,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::from_kind(KernelKind::Constant(value), true)
    }

    pub fn p_nearest(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "P-nearest radius must lie in (0, 1/2), got {radius}"
            )));
        }
        Ok(Self::from_kind(KernelKind::PNearest { radius }, true))
    }

    pub fn separable(f: Profile, g: Profile) -> Self {
        let symmetric = f.same_as(&g);
        Self::from_kind(KernelKind::Separable { f, g }, symmetric)
    }

    /// `W(x,y) = xy`.
    pub fn product() -> Self {
        Self::separable(Profile::identity(), Profile::identity())
    }

    pub fn multi_class(
        measure: &PositionMeasure,
        matrix: Vec<f64>,
        masses: &[f64],
    ) -> Result<Self> {
        let step = StepKernel::with_masses(measure, masses, matrix)?;
        let symmetric = step.is_symmetric();
        Ok(Self::from_kind(KernelKind::MultiClass(step), symmetric))
    }

    pub fn step(step: StepKernel) -> Self {
        let symmetric = step.is_symmetric();
        Self::from_kind(KernelKind::StepGrid(step), symmetric)
    }

    pub fn custom(name: impl Into<String>, symmetric: bool, f: KernelFn) -> Self {
        Self::from_kind(
            KernelKind::Custom {
                name: name.into(),
                f,
            },
            symmetric,
        )
    }

    /// `self − other`, a signed kernel.
    pub fn minus(&self, other: &GraphonKernel) -> Self {
        Self::from_kind(
            KernelKind::Difference(Box::new(self.clone()), Box::new(other.clone())),
            self.symmetric && other.symmetric,
        )
    }

    /// Override the finite-N edge probability `W_N` used when sampling graphs.
    pub fn with_finite_form(mut self, w_n: KernelFn) -> Self {
        self.finite_form = Some(w_n);
        self
    }

    pub fn with_holder(mut self, holder: HolderData) -> Self {
        self.holder = Some(holder);
        self
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn holder(&self) -> Option<HolderData> {
        self.holder
    }

    pub(crate) fn finite_form(&self) -> Option<&KernelFn> {
        self.finite_form.as_ref()
    }

    /// Known to be nonnegative by construction (differences and custom kernels are not).
    pub fn is_nonnegative(&self) -> bool {
        match &self.kind {
            KernelKind::Constant(c) => *c >= 0.0,
            KernelKind::PNearest { .. } => true,
            KernelKind::Separable { f, g } => {
                let pos = |p: &Profile| matches!(p, Profile::Power { scale, .. } if *scale >= 0.0);
                pos(f) && pos(g)
            }
            KernelKind::MultiClass(s) | KernelKind::StepGrid(s) => s.values().iter().all(|&v| v >= 0.0),
            KernelKind::Difference(..) | KernelKind::Custom { .. } => false,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            KernelKind::Constant(c) => *c,
            KernelKind::PNearest { radius } => {
                if circle_distance(x, y) < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            KernelKind::Separable { f, g } => f.eval(x) * g.eval(y),
            KernelKind::MultiClass(s) | KernelKind::StepGrid(s) => s.eval(x, y),
            KernelKind::Difference(a, b) => a.eval(x, y) - b.eval(x, y),
            KernelKind::Custom { f, .. } => f(x, y),
        }
    }

    /// ν-mean of `W(x, ·)` over quadrature cell `b`.
    ///
    /// Exact for piecewise-constant kernels (constant, P-nearest under the
    /// uniform measure, step kernels); the midpoint value otherwise.
    pub fn cell_mean(&self, x: f64, quad: &Quadrature, b: usize) -> f64 {
        let (lo, hi) = quad.cell(b);
        match &self.kind {
            KernelKind::Constant(c) => *c,
            KernelKind::PNearest { radius } if quad.measure().is_uniform() => {
                if hi > lo {
                    arc_overlap(x, *radius, lo, hi) / (hi - lo)
                } else {
                    self.eval(x, quad.nodes()[b])
                }
            }
            KernelKind::MultiClass(s) | KernelKind::StepGrid(s) => {
                s.row_mean(x, lo, hi, quad.measure())
            }
            KernelKind::Difference(a, c) => a.cell_mean(x, quad, b) - c.cell_mean(x, quad, b),
            _ => self.eval(x, quad.nodes()[b]),
        }
    }

    /// ν-mean of `|W(x, ·)|` over cell `b` under the same rule.
    pub fn abs_cell_mean(&self, x: f64, quad: &Quadrature, b: usize) -> f64 {
        if self.is_nonnegative() {
            self.cell_mean(x, quad, b)
        } else {
            self.eval(x, quad.nodes()[b]).abs()
        }
    }

    /// Row integral `∫ W(x,y) ν(dy)`.
    pub fn row_integral(&self, x: f64, quad: &Quadrature) -> f64 {
        (0..quad.len()).map(|b| self.cell_mean(x, quad, b)).sum::<f64>() * quad.weight()
    }

    /// Piecewise-constant view, when the kernel is one.
    pub fn as_step(&self) -> Option<StepKernel> {
        match &self.kind {
            KernelKind::Constant(c) => StepKernel::new(vec![0.0, 1.0], vec![*c]).ok(),
            KernelKind::MultiClass(s) | KernelKind::StepGrid(s) => Some(s.clone()),
            KernelKind::Difference(a, b) => {
                let (sa, sb) = (a.as_step()?, b.as_step()?);
                let bounds = sa.merged_bounds(&sb);
                let (ra, rb) = (sa.refine(&bounds), sb.refine(&bounds));
                let values = ra.values.iter().zip(&rb.values).map(|(x, y)| x - y).collect();
                Some(StepKernel { bounds, values })
            }
            _ => None,
        }
    }

    /// `C_W^{(1)} = sup_x ∫W(x,y)ν(dy)` and `C_W^{(2)} = sup_x ∫W(x,y)²ν(dy)` on the grid.
    pub fn constants(&self, quad: &Quadrature) -> KernelConstants {
        let rows: Vec<(f64, f64)> = quad
            .nodes()
            .iter()
            .map(|&x| {
                let d = self.row_integral(x, quad);
                let d2 = quad.integrate(|y| self.eval(x, y).powi(2));
                (d, d2)
            })
            .collect();
        KernelConstants {
            c1: rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max),
            c2: rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Check nonnegativity on all node pairs and, when flagged, symmetry.
    pub fn validate(&self, quad: &Quadrature) -> Result<()> {
        let nodes = quad.nodes();
        for (a, &x) in nodes.iter().enumerate() {
            for &y in &nodes[..=a] {
                let wxy = self.eval(x, y);
                let wyx = self.eval(y, x);
                if !(wxy >= 0.0) || !(wyx >= 0.0) {
                    return Err(Error::Model(format!(
                        "kernel {:?} is negative or NaN at ({x}, {y})",
                        self.kind
                    )));
                }
                if self.symmetric && (wxy - wyx).abs() > 1e-12 * (1.0 + wxy.abs()) {
                    return Err(Error::Model(format!(
                        "kernel {:?} is flagged symmetric but W({x},{y}) = {wxy} != W({y},{x}) = {wyx}",
                        self.kind
                    )));
                }
            }
        }
        Ok(())
    }

    /// Empirical Hölder check on `samples` random position pairs.
    ///
    /// Pairs closer than two grid cells are skipped: below that scale the
    /// grid integral carries an `O(1/M)` error larger than the bound itself.
    pub fn check_holder(&self, quad: &Quadrature, samples: usize, seed: u64) -> Option<HolderCheck> {
        let holder = self.holder?;
        let mut rng = rng::stream(seed, Domain::SpotCheck, 0);
        let mut worst: f64 = 0.0;
        let mut violations = 0;
        for _ in 0..samples {
            let x = quad.measure().inv_cdf(rng.random());
            let x2 = quad.measure().inv_cdf(rng.random());
            if (x - x2).abs() < 2.0 / quad.len() as f64 {
                continue;
            }
            let lhs = quad.integrate(|y| (self.eval(x, y) - self.eval(x2, y)).abs());
            let rhs = holder.constant * (x - x2).abs().powf(holder.exponent);
            let ratio = lhs / rhs;
            worst = worst.max(ratio);
            if ratio > 1.0 + 1e-9 {
                violations += 1;
            }
        }
        Some(HolderCheck {
            worst_ratio: worst,
            violations,
            samples,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConstants {
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderCheck {
    /// Largest observed `lhs / (C |x−x'|^ϑ)`.
    pub worst_ratio: f64,
    pub violations: usize,
    pub samples: usize,
}

pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).abs().rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Length of `(lo, hi) ∩ {y : d_circle(x, y) < r}` for `r < 1/2`, `0 ≤ lo ≤ hi ≤ 1`.
fn arc_overlap(x: f64, r: f64, lo: f64, hi: f64) -> f64 {
    [-1.0, 0.0, 1.0]
        .iter()
        .map(|shift| {
            let a = (x - r + shift).max(lo);
            let b = (x + r + shift).min(hi);
            (b - a).max(0.0)
        })
        .sum()
}

/// Degree field `D(x) = ∫ W(x,y) ν(dy)` on the quadrature nodes.
#[derive(Debug, Clone)]
pub struct DegreeField {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    /// `C_W^{(1)} = sup_x D(x)` over the nodes.
    pub sup: f64,
}

pub fn degree_field(kernel: &GraphonKernel, quad: &Quadrature) -> DegreeField {
    let values = crate::par::map_range(quad.len(), |a| kernel.row_integral(quad.nodes()[a], quad));
    let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    DegreeField {
        nodes: quad.nodes().to_vec(),
        values,
        sup,
    }
}

impl DegreeField {
    pub fn inf(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(m: usize) -> Quadrature {
        Quadrature::uniform(m).unwrap()
    }

    #[test]
    fn constant_degree() {
        let d = degree_field(&GraphonKernel::constant(0.3), &quad(50));
        assert!(d.values.iter().all(|&v| (v - 0.3).abs() < 1e-15));
        assert!((d.sup - 0.3).abs() < 1e-15);
    }

    #[test]
    fn p_nearest_degree_is_twice_radius() {
        let k = GraphonKernel::p_nearest(0.1).unwrap();
        let d = degree_field(&k, &quad(400));
        for v in &d.values {
            assert!((v - 0.2).abs() < 1e-12, "{v}");
        }
        // Off-node evaluation too.
        assert!((k.row_integral(0.0371, &quad(400)) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn separable_identity_degree_is_half_x() {
        // ∫₀¹ x·y dy = x/2; the midpoint rule is exact for linear integrands.
        let q = quad(400);
        let d = degree_field(&GraphonKernel::product(), &q);
        for (x, v) in d.nodes.iter().zip(&d.values) {
            assert!((v - x / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_distance_wraps() {
        assert!((circle_distance(0.05, 0.95) - 0.1).abs() < 1e-15);
        assert!((circle_distance(0.3, 0.6) - 0.3).abs() < 1e-15);
        assert_eq!(circle_distance(0.2, 0.2), 0.0);
    }

    #[test]
    fn arc_overlap_matches_fine_midpoint() {
        let (x, r) = (0.03, 0.1);
        for (lo, hi) in [(0.0, 0.1), (0.1, 0.2), (0.9, 1.0), (0.12, 0.14), (0.5, 0.6)] {
            let n = 200_000;
            let fine: f64 = (0..n)
                .map(|k| {
                    let y = lo + (k as f64 + 0.5) * (hi - lo) / n as f64;
                    if circle_distance(x, y) < r { 1.0 } else { 0.0 }
                })
                .sum::<f64>()
                * (hi - lo)
                / n as f64;
            assert!((arc_overlap(x, r, lo, hi) - fine).abs() < 1e-5, "{lo} {hi}");
        }
    }

    #[test]
    fn step_kernel_lookup_and_refinement() {
        let s = StepKernel::new(vec![0.0, 0.5, 1.0], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.eval(0.5, 0.51), 2.0);
        assert_eq!(s.eval(0.0, 1.0), 2.0);
        assert_eq!(s.eval(0.7, 0.2), 3.0);
        let r = s.refine(&[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(r.eval(0.3, 0.9), 2.0);
        assert_eq!(r.parts(), 3);
    }

    #[test]
    fn step_cell_mean_is_mass_weighted() {
        let s = StepKernel::new(vec![0.0, 0.3, 1.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let k = GraphonKernel::step(s);
        let q = quad(2);
        // Cell 0 = (0, 0.5]: 0.3 of mass with value 1 for row x = 0.1.
        assert!((k.cell_mean(0.1, &q, 0) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn validation_catches_negative_and_asymmetric() {
        let q = quad(10);
        let neg = GraphonKernel::custom("neg", false, Arc::new(|x, _| x - 0.5));
        assert!(matches!(neg.validate(&q), Err(Error::Model(_))));
        let asym = GraphonKernel::custom("asym", true, Arc::new(|x, y| x * y * y));
        assert!(matches!(asym.validate(&q), Err(Error::Model(_))));
        assert!(GraphonKernel::product().validate(&q).is_ok());
        assert!(GraphonKernel::p_nearest(0.1).unwrap().is_symmetric());
    }

    #[test]
    fn holder_check_for_p_nearest() {
        let k = GraphonKernel::p_nearest(0.1).unwrap().with_holder(HolderData {
            exponent: 1.0,
            constant: 4.0,
        });
        let check = k.check_holder(&quad(2000), 200, 3).unwrap();
        assert_eq!(check.violations, 0, "{check:?}");
        assert!(GraphonKernel::constant(1.0).check_holder(&quad(10), 5, 0).is_none());
    }

    #[test]
    fn constants_of_product_kernel() {
        let c = GraphonKernel::product().constants(&quad(400));
        // sup_x x/2 and sup_x x²/3 on the grid.
        assert!((c.c1 - 0.99875 / 2.0).abs() < 1e-12);
        assert!((c.c2 - 0.99875f64.powi(2) * (1.0 / 3.0 - 1.0 / (12.0 * 400.0 * 400.0))).abs() < 1e-9);
    }
}
