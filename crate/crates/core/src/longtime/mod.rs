//! Spectral radius of `T_W`, criticality, the subcritical limit `ℓ`, the
//! exponential-kernel semigroup solution and the supercritical growth rate.

mod operator;

pub use operator::{DiscreteOperator, PRIMITIVITY_MAX_POWER};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limit_solver::{IntensityField, PicardMap, PicardStart, SolverOptions, TimeGrid};
use crate::model::{HawkesModel, JumpRate, MemoryKernel};

pub const CRITICAL_BAND: f64 = 1e-3;
pub const MAX_POWER_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criticality {
    Subcritical,
    Supercritical,
    NearCritical,
}

impl Criticality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criticality::Subcritical => "subcritical",
            Criticality::Supercritical => "supercritical",
            Criticality::NearCritical => "near-critical",
        }
    }
}

/// Perron pair of a nonnegative operator.
#[derive(Debug, Clone)]
pub struct PerronPair {
    pub r_inf: f64,
    /// Collatz–Wielandt bracket `[min, max]` of `(Av)_a / v_a`.
    pub bracket: (f64, f64),
    /// Unit discrete `L²(ν)` norm.
    pub eigenvector: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub perron: PerronPair,
    pub h_norm1: f64,
    pub product: f64,
    pub class: Criticality,
    pub band: f64,
    pub sigma_r: Option<f64>,
    pub cells: usize,
    pub primitivity_k: Option<usize>,
}

#[derive(Serialize)]
struct ReportJson {
    r_inf: f64,
    h_norm1: f64,
    product: f64,
    class: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_r: Option<f64>,
    #[serde(rename = "M")]
    m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    primitivity_k: Option<usize>,
}

impl SpectralReport {
    pub fn r_inf(&self) -> f64 {
        self.perron.r_inf
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ReportJson {
            r_inf: self.perron.r_inf,
            h_norm1: self.h_norm1,
            product: self.product,
            class: self.class.as_str(),
            sigma_r: self.sigma_r,
            m: self.cells,
            primitivity_k: self.primitivity_k,
        })
        .expect("plain struct")
    }
}

/// Power iteration for the Perron root of `A ≥ 0`.
///
/// Without a primitivity witness the iteration runs on `A + sI` (same Perron
/// vector, no other eigenvalue on the spectral circle) to avoid oscillation.
pub fn spectral_radius(op: &DiscreteOperator, tol: f64) -> Result<PerronPair> {
    if !op.is_nonnegative() {
        return Err(Error::InvalidArgument("power iteration needs a nonnegative operator".into()));
    }
    let m = op.len();
    let shift = if op.primitivity_k().is_some() { 0.0 } else { 0.5 * op.max_row_sum() };
    let mut v = vec![1.0; m];
    normalize(op, &mut v);
    let mut prev = f64::NAN;
    let mut bracket = (0.0, f64::INFINITY);
    for it in 1..=MAX_POWER_ITERATIONS {
        let av = op.apply(&v);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let mut positive = true;
        for (x, y) in v.iter().zip(&av) {
            if *x > 0.0 {
                let q = y / x;
                lo = lo.min(q);
                hi = hi.max(q);
            } else {
                positive = false;
            }
        }
        let num: f64 = v.iter().zip(&av).zip(op.masses()).map(|((x, y), w)| w * x * y).sum();
        let rayleigh = num / op.l2_norm(&v).powi(2);
        let estimate = if op.is_symmetric() { rayleigh } else { op.l2_norm(&av) / op.l2_norm(&v) };
        if positive {
            bracket = (lo, hi);
        }
        let scale = estimate.abs().max(f64::MIN_POSITIVE);
        let done = if positive {
            hi - lo <= tol * scale
        } else {
            (estimate - prev).abs() <= tol * scale
        };
        if done || estimate == 0.0 {
            let r_inf = if positive { 0.5 * (lo + hi) } else { estimate };
            return Ok(PerronPair {
                r_inf,
                bracket: if positive { bracket } else { (estimate, estimate) },
                eigenvector: v,
                iterations: it,
            });
        }
        prev = estimate;
        v = av.iter().zip(&v).map(|(y, x)| y + shift * x).collect();
        normalize(op, &mut v);
    }
    Err(Error::NonConvergence {
        iterations: MAX_POWER_ITERATIONS,
        last_ratio: f64::NAN,
        detail: format!(
            "power iteration did not settle; best Perron bracket [{}, {}]",
            bracket.0, bracket.1
        ),
    })
}

fn normalize(op: &DiscreteOperator, v: &mut [f64]) {
    let n = op.l2_norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

pub fn classify(r_inf: f64, h_norm1: f64, band: f64) -> Criticality {
    let p = r_inf * h_norm1;
    if p < 1.0 - band {
        Criticality::Subcritical
    } else if p > 1.0 + band {
        Criticality::Supercritical
    } else {
        Criticality::NearCritical
    }
}

/// Perron pair, criticality and (when supercritical) the growth rate.
pub fn analyse(op: &DiscreteOperator, kernel: &MemoryKernel, tol: f64, band: f64) -> Result<SpectralReport> {
    let perron = spectral_radius(op, tol)?;
    let h_norm1 = kernel.l1_norm();
    let class = classify(perron.r_inf, h_norm1, band);
    let sigma_r = match class {
        Criticality::Subcritical => None,
        _ => Some(growth_rate(perron.r_inf, kernel)?),
    };
    Ok(SpectralReport {
        product: perron.r_inf * h_norm1,
        perron,
        h_norm1,
        class,
        band,
        sigma_r,
        cells: op.len(),
        primitivity_k: op.primitivity_k(),
    })
}

/// Root `σ_r ≥ 0` of `r_∞ ℒ(h)(σ) = 1`.
pub fn growth_rate(r_inf: f64, kernel: &MemoryKernel) -> Result<f64> {
    let product = r_inf * kernel.l1_norm();
    if product < 1.0 - 1e-12 {
        return Err(Error::InvalidState(format!(
            "growth rate is only defined when ‖h‖₁ r_∞ ≥ 1, got {product}"
        )));
    }
    if let Some(alpha) = kernel.exponential_rate() {
        return Ok((r_inf - alpha).max(0.0));
    }
    let g = |s: f64| -> Result<f64> { Ok(r_inf * kernel.laplace(s)? - 1.0) };
    if g(0.0)? <= 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while g(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NonConvergence {
                iterations: 40,
                last_ratio: f64::NAN,
                detail: "no sign change of r ℒ(h)(σ) − 1".into(),
            });
        }
    }
    while hi - lo > 1e-8 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `u = lim u0(t, ·)` on the operator's nodes.
pub fn longtime_baseline(model: &HawkesModel, op: &DiscreteOperator) -> Result<Vec<f64>> {
    let u = model.baseline.longtime_u().ok_or_else(|| {
        Error::InvalidArgument("the baseline does not determine lim u0(t, ·); supply it explicitly".into())
    })?;
    Ok(op.nodes().iter().map(|&x| u(x)).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct StationaryLimit {
    /// `ℓ` from the direct solve.
    pub ell: Vec<f64>,
    pub neumann: Vec<f64>,
    pub neumann_terms: usize,
    pub residual_neumann: f64,
    pub residual_direct: f64,
    /// `max |ℓ_neumann − ℓ_direct|`
    pub agreement: f64,
}

/// `ℓ = Σ_k ‖h‖₁^k A^k u`, equivalently `(I − ‖h‖₁ A) ℓ = u`; both are computed.
pub fn stationary_limit(op: &DiscreteOperator, report: &SpectralReport, u: &[f64], tol: f64) -> Result<StationaryLimit> {
    if report.class != Criticality::Subcritical {
        return Err(Error::InvalidState(format!(
            "stationary limit needs a subcritical model, got {} (‖h‖₁ r_∞ = {})",
            report.class.as_str(),
            report.product
        )));
    }
    let m = op.len();
    if u.len() != m {
        return Err(Error::GridMismatch(format!("baseline has {} values for {m} cells", u.len())));
    }
    let c = report.h_norm1;
    let q = c * op.max_row_sum();
    let u_sup = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let mut neumann = u.to_vec();
    let mut term = u.to_vec();
    let mut terms = 1;
    loop {
        let tail = if q < 1.0 {
            q.powi(terms as i32) * u_sup / (1.0 - q)
        } else {
            term.iter().fold(0.0f64, |a, v| a.max(v.abs())) / (1.0 - report.product)
        };
        if tail < tol || terms > 1_000_000 {
            break;
        }
        term = op.apply(&term).into_iter().map(|v| c * v).collect();
        neumann.iter_mut().zip(&term).for_each(|(l, t)| *l += t);
        terms += 1;
    }

    let a = op.matrix();
    let system = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { 0.0 } - c * a[(i, j)]);
    let direct = system
        .lu()
        .solve(&DVector::from_column_slice(u))
        .ok_or_else(|| Error::InvalidState("I − ‖h‖₁A is singular".into()))?;
    let ell: Vec<f64> = direct.iter().copied().collect();

    let residual = |l: &[f64]| -> f64 {
        let al = op.apply(l);
        l.iter()
            .zip(u)
            .zip(&al)
            .map(|((l, u), al)| (l - u - c * al).abs())
            .fold(0.0, f64::max)
    };
    let agreement = ell.iter().zip(&neumann).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(StationaryLimit {
        residual_neumann: residual(&neumann),
        residual_direct: residual(&ell),
        ell,
        neumann,
        neumann_terms: terms,
        agreement,
    })
}

/// `(E, J) = (e^{τB}, ∫_0^τ e^{sB} ds)` by scaling and squaring.
fn exp_and_integral(b: &DMatrix<f64>, tau: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = b.nrows();
    let norm = b.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max) * tau;
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as u32 } else { 0 };
    let step = tau / 2f64.powi(squarings as i32);
    let x = b * step;
    // E = Σ X^k/k!, J = step Σ X^k/(k+1)!
    let id = DMatrix::<f64>::identity(n, n);
    let mut e = id.clone();
    let mut j = id.clone();
    let mut power = id;
    let mut fact = 1.0;
    for k in 1..=14 {
        power = &power * &x;
        fact *= k as f64;
        e += &power / fact;
        j += &power / (fact * (k + 1) as f64);
    }
    j *= step;
    for _ in 0..squarings {
        // J(2s) = J(s) + E(s) J(s)
        j = &j + &e * &j;
        e = &e * &e;
    }
    (e, j)
}

/// `λ(t) = e^{−αt} e^{tA} u0 + α ∫_0^t e^{−α(t−s)} e^{(t−s)A} u0 ds` for `h = e^{−αt}`,
/// linear rate and time-constant `u0`, stepped exactly on the grid.
pub fn exponential_case(op: &DiscreteOperator, model: &HawkesModel, t_end: f64, dt: f64) -> Result<IntensityField> {
    let alpha = model.kernel.exponential_rate().ok_or_else(|| {
        Error::InvalidArgument("the semigroup solution needs an exponential memory kernel".into())
    })?;
    if !model.rate.is_linear() || !model.baseline.is_time_constant() {
        return Err(Error::InvalidArgument(
            "the semigroup solution needs a linear rate and a time-constant baseline".into(),
        ));
    }
    let grid = TimeGrid::new(t_end, dt)?;
    let m = op.len();
    let a = op.matrix();
    let b = DMatrix::from_fn(m, m, |i, j| a[(i, j)] - if i == j { alpha } else { 0.0 });
    let (e, j) = exp_and_integral(&b, grid.dt);
    let u0 = DVector::from_iterator(m, op.nodes().iter().map(|&x| model.baseline.eval(0.0, x)));
    // λ_{k+1} = E λ_k + α J u0
    let forcing = (&j * &u0) * alpha;
    let mut values = Vec::with_capacity(grid.points() * m);
    let mut lambda = u0;
    values.extend(lambda.iter());
    for _ in 0..grid.steps {
        lambda = &e * &lambda + &forcing;
        values.extend(lambda.iter());
    }
    IntensityField::new(grid, op.nodes().to_vec(), op.edges().to_vec(), values)
}

#[derive(Debug, Clone)]
pub struct MultiClassReduction {
    pub r_inf: f64,
    pub class: Criticality,
    /// `λ̃` per time step and class.
    pub lambda: IntensityField,
    pub ell: Option<Vec<f64>>,
}

/// Class-level system `λ̃ = u0 + ∫ h(t−s) M̃ λ̃(s) ds`, `M̃ = (α_j m_ij)`.
pub fn multiclass_reduce(
    m: &[f64],
    alpha: &[f64],
    kernel: &MemoryKernel,
    u0: &[f64],
    t_end: f64,
    opts: &SolverOptions,
) -> Result<MultiClassReduction> {
    let op = DiscreteOperator::from_classes(m, alpha)?;
    if u0.len() != alpha.len() {
        return Err(Error::InvalidArgument(format!(
            "{} baseline values for {} classes",
            u0.len(),
            alpha.len()
        )));
    }
    let report = analyse(&op, kernel, 1e-12, CRITICAL_BAND)?;
    let rate = JumpRate::Linear;
    let grid = TimeGrid::new(t_end, opts.dt)?;
    let map = PicardMap::new(&op, &rate, kernel, grid, |_, a| u0[a]);
    let (g, _, info) = map.solve(opts.tol, opts.max_iterations, PicardStart::Baseline)?;
    let mut lambda = map.to_field(&g);
    lambda.info = Some(info);
    let ell = match report.class {
        Criticality::Subcritical => Some(stationary_limit(&op, &report, u0, 1e-12)?.ell),
        _ => None,
    };
    Ok(MultiClassReduction {
        r_inf: report.r_inf(),
        class: report.class,
        lambda,
        ell,
    })
}
