//! Parameters of the intensity `λ_i(t) = f(u0(t, x_i) + (κ_i/N) Σ_j ξ_ij ∫ h(t−s) dZ_j(s))`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphon::{PositionMeasure, Profile, ScalarFn};
use crate::rng::{self, Domain};

/// Number of random pairs used to spot-check a Lipschitz jump rate.
pub const LIPSCHITZ_SPOT_CHECKS: usize = 1000;

#[derive(Clone)]
pub enum JumpRate {
    /// `f(x) = x`
    Linear,
    Lipschitz {
        name: String,
        f: ScalarFn,
        lipschitz: f64,
        monotone: bool,
    },
}

impl fmt::Debug for JumpRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JumpRate::Linear => write!(f, "linear"),
            JumpRate::Lipschitz { name, lipschitz, .. } => write!(f, "{name} (L = {lipschitz})"),
        }
    }
}

impl JumpRate {
    /// A non-negative Lipschitz rate, spot-checked on random pairs in `[-range, range]`.
    pub fn lipschitz(name: impl Into<String>, f: ScalarFn, lipschitz: f64, monotone: bool) -> Result<Self> {
        let name = name.into();
        if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
            return Err(Error::Model(format!("jump rate {name}: Lipschitz constant must be finite and >= 0")));
        }
        let mut rng = rng::stream(0x5f07, Domain::SpotCheck, 1);
        let range = 50.0;
        for _ in 0..LIPSCHITZ_SPOT_CHECKS {
            let a = range * (2.0 * rng.random::<f64>() - 1.0);
            let b = range * (2.0 * rng.random::<f64>() - 1.0);
            let (fa, fb) = (f(a), f(b));
            if !(fa >= 0.0) {
                return Err(Error::Model(format!("jump rate {name} is negative at {a}: f = {fa}")));
            }
            if (fa - fb).abs() > lipschitz * (a - b).abs() * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::Model(format!(
                    "jump rate {name} breaks its Lipschitz constant {lipschitz} between {a} and {b}"
                )));
            }
            if monotone && (a - b) * (fa - fb) < -1e-12 {
                return Err(Error::Model(format!("jump rate {name} is flagged monotone but decreases between {a} and {b}")));
            }
        }
        Ok(JumpRate::Lipschitz {
            name,
            f,
            lipschitz,
            monotone,
        })
    }

    /// `linear`, `relu` (`max(x, 0)`) or `sigmoid` (`1/(1+e^{-x})`).
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "linear" => Ok(JumpRate::Linear),
            "relu" => Self::lipschitz("relu", Arc::new(|x: f64| x.max(0.0)), 1.0, true),
            "sigmoid" => Self::lipschitz("sigmoid", Arc::new(|x: f64| 1.0 / (1.0 + (-x).exp())), 0.25, true),
            other => Err(Error::Config(format!(
                "unknown jump rate `{other}` (expected linear, relu or sigmoid)"
            ))),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            JumpRate::Linear => x,
            JumpRate::Lipschitz { f, .. } => f(x),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, JumpRate::Linear)
    }

    pub fn lipschitz_constant(&self) -> f64 {
        match self {
            JumpRate::Linear => 1.0,
            JumpRate::Lipschitz { lipschitz, .. } => *lipschitz,
        }
    }

    pub fn is_monotone(&self) -> bool {
        match self {
            JumpRate::Linear => true,
            JumpRate::Lipschitz { monotone, .. } => *monotone,
        }
    }

    /// Upper bound of `f` over arguments in `[lo, hi]`.
    pub fn bound(&self, lo: f64, hi: f64) -> f64 {
        if self.is_monotone() {
            self.eval(hi)
        } else {
            self.eval(0.0) + self.lipschitz_constant() * lo.abs().max(hi.abs())
        }
    }

    pub fn name(&self) -> &str {
        match self {
            JumpRate::Linear => "linear",
            JumpRate::Lipschitz { name, .. } => name,
        }
    }
}

/// Memory kernel `h` on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub enum MemoryKernel {
    /// `h(t) = e^{−αt}`
    Exponential { alpha: f64 },
    /// Linear interpolation of `(times, values)`, zero after the last time.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
    /// `h(t) = scale (1 + t)^{−power}`
    PolyDecay { scale: f64, power: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowNorms {
    pub l1: f64,
    pub l2: f64,
    /// The window ran past the end of a tabulated kernel, which was extended by zero.
    pub truncated: bool,
}

impl MemoryKernel {
    pub fn exponential(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Model(format!("exponential kernel needs alpha > 0, got {alpha}")));
        }
        Ok(MemoryKernel::Exponential { alpha })
    }

    pub fn tabulated(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(Error::Model(
                "tabulated kernel needs at least two (time, value) pairs of equal length".into(),
            ));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) || !times.iter().all(|t| t.is_finite()) {
            return Err(Error::Model("tabulated kernel times must start at 0 and increase strictly".into()));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::Model("tabulated kernel values must be finite".into()));
        }
        Ok(MemoryKernel::Tabulated { times, values })
    }

    pub fn poly_decay(scale: f64, power: f64) -> Result<Self> {
        if !(power > 0.0 && scale.is_finite() && power.is_finite()) {
            return Err(Error::Model(format!("polynomial kernel needs power > 0, got {power}")));
        }
        Ok(MemoryKernel::PolyDecay { scale, power })
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self {
            MemoryKernel::Exponential { alpha } => (-alpha * t).exp(),
            MemoryKernel::PolyDecay { scale, power } => scale * (1.0 + t).powf(-power),
            MemoryKernel::Tabulated { times, values } => {
                let last = times.len() - 1;
                if t > times[last] {
                    return 0.0;
                }
                let k = times.partition_point(|&s| s <= t).clamp(1, last);
                let (t0, t1) = (times[k - 1], times[k]);
                let w = (t - t0) / (t1 - t0);
                values[k - 1] + w * (values[k] - values[k - 1])
            }
        }
    }

    pub fn exponential_rate(&self) -> Option<f64> {
        match self {
            MemoryKernel::Exponential { alpha } => Some(*alpha),
            _ => None,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            MemoryKernel::Exponential { .. } => true,
            MemoryKernel::PolyDecay { scale, .. } => *scale >= 0.0,
            MemoryKernel::Tabulated { values, .. } => values.iter().all(|&v| v >= 0.0),
        }
    }

    /// `sup_{t ∈ [a, b]} h(t)`.
    pub fn envelope(&self, a: f64, b: f64) -> f64 {
        self.range_over(a, b).1
    }

    /// `(inf, sup)` of `h` over `[a, b]`.
    pub fn range_over(&self, a: f64, b: f64) -> (f64, f64) {
        let a = a.max(0.0);
        let b = b.max(a);
        match self {
            MemoryKernel::Exponential { .. } | MemoryKernel::PolyDecay { .. } => {
                let (ha, hb) = (self.eval(a), self.eval(b));
                (ha.min(hb), ha.max(hb))
            }
            MemoryKernel::Tabulated { times, values } => {
                let (ha, hb) = (self.eval(a), self.eval(b));
                let (mut lo, mut hi) = (ha.min(hb), ha.max(hb));
                for (t, v) in times.iter().zip(values) {
                    if *t > a && *t < b {
                        lo = lo.min(*v);
                        hi = hi.max(*v);
                    }
                }
                if b > *times.last().unwrap() {
                    lo = lo.min(0.0);
                    hi = hi.max(0.0);
                }
                (lo, hi)
            }
        }
    }

    /// True when `h ≥ 0` never increases, so the input decays between arrivals.
    pub fn is_nonincreasing(&self) -> bool {
        match self {
            MemoryKernel::Exponential { .. } => true,
            MemoryKernel::PolyDecay { scale, .. } => *scale >= 0.0,
            MemoryKernel::Tabulated { values, .. } => {
                values.iter().all(|&v| v >= 0.0) && values.windows(2).all(|w| w[1] <= w[0])
            }
        }
    }

    /// End of the support, when finite.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            MemoryKernel::Tabulated { times, .. } => times.last().copied(),
            _ => None,
        }
    }

    /// `‖h‖_1` over `[0, ∞)`; infinite for a non-integrable polynomial tail.
    pub fn l1_norm(&self) -> f64 {
        match self {
            MemoryKernel::Exponential { alpha } => 1.0 / alpha,
            MemoryKernel::PolyDecay { scale, power } => {
                if *power > 1.0 {
                    scale.abs() / (power - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            MemoryKernel::Tabulated { times, values } => times
                .windows(2)
                .zip(values.windows(2))
                .map(|(t, v)| abs_linear_integral(t[1] - t[0], v[0], v[1]))
                .sum(),
        }
    }

    /// `(‖h‖_{[0,T],1}, ‖h‖_{[0,T],2})`; `T = ∞` is allowed.
    pub fn window_norms(&self, horizon: f64) -> Result<WindowNorms> {
        if !(horizon > 0.0) {
            return Err(Error::InvalidArgument(format!("window length must be > 0, got {horizon}")));
        }
        Ok(match self {
            MemoryKernel::Exponential { alpha } => WindowNorms {
                l1: -(-alpha * horizon).exp_m1() / alpha,
                l2: (-(-2.0 * alpha * horizon).exp_m1() / (2.0 * alpha)).sqrt(),
                truncated: false,
            },
            MemoryKernel::PolyDecay { scale, power } => WindowNorms {
                l1: scale.abs() * power_integral(*power, horizon),
                l2: scale.abs() * power_integral(2.0 * power, horizon).sqrt(),
                truncated: false,
            },
            MemoryKernel::Tabulated { times, .. } => {
                let end = *times.last().unwrap();
                let span = horizon.min(end);
                let steps = 1000usize.max(4 * times.len());
                let dt = span / steps as f64;
                let (mut l1, mut l2) = (0.0, 0.0);
                for k in 0..steps {
                    let v = self.eval((k as f64 + 0.5) * dt);
                    l1 += v.abs();
                    l2 += v * v;
                }
                WindowNorms {
                    l1: l1 * dt,
                    l2: (l2 * dt).sqrt(),
                    truncated: horizon.is_finite() && horizon > end,
                }
            }
        })
    }

    /// Laplace transform `∫_0^∞ e^{−σt} h(t) dt`.
    pub fn laplace(&self, sigma: f64) -> Result<f64> {
        if !(sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!("Laplace rate must be >= 0, got {sigma}")));
        }
        match self {
            MemoryKernel::Exponential { alpha } => Ok(1.0 / (alpha + sigma)),
            MemoryKernel::Tabulated { times, values } => {
                let mut acc = 0.0;
                for (t, v) in times.windows(2).zip(values.windows(2)) {
                    acc += (-sigma * t[0]).exp() * exp_linear_integral(sigma, t[1] - t[0], v[0], v[1]);
                }
                Ok(acc)
            }
            MemoryKernel::PolyDecay { scale, power } => {
                if sigma == 0.0 {
                    if *power <= 1.0 {
                        return Err(Error::Model(format!(
                            "Laplace transform of (1+t)^-{power} diverges at 0; use a rate > 0"
                        )));
                    }
                    return Ok(scale / (power - 1.0));
                }
                Ok(scale * poly_laplace(*power, sigma))
            }
        }
    }
}

/// `∫_0^T (1+t)^{−p} dt`
fn power_integral(p: f64, horizon: f64) -> f64 {
    if horizon.is_infinite() {
        return if p > 1.0 { 1.0 / (p - 1.0) } else { f64::INFINITY };
    }
    if (p - 1.0).abs() < 1e-12 {
        horizon.ln_1p()
    } else {
        -((1.0 - p) * horizon.ln_1p()).exp_m1() / (p - 1.0)
    }
}

/// `∫_0^τ |a + (b−a) s/τ| ds`
fn abs_linear_integral(tau: f64, a: f64, b: f64) -> f64 {
    if a * b >= 0.0 {
        0.5 * tau * (a.abs() + b.abs())
    } else {
        0.5 * tau * (a * a + b * b) / (a - b).abs()
    }
}

/// `∫_0^τ e^{−σs} (a + (b−a) s/τ) ds`
pub(crate) fn exp_linear_integral(sigma: f64, tau: f64, a: f64, b: f64) -> f64 {
    let x = sigma * tau;
    if x == 0.0 {
        return 0.5 * tau * (a + b);
    }
    let slope = (b - a) / tau;
    // (1 − e^{−x}) and 1 − e^{−x}(1 + x), the latter by series near zero.
    let e0 = -(-x).exp_m1();
    let e1 = if x < 1e-3 {
        x * x * (0.5 - x / 3.0 + x * x / 8.0)
    } else {
        e0 - x * (-x).exp()
    };
    a * e0 / sigma + slope * e1 / (sigma * sigma)
}

/// `∫_0^∞ e^{−σt} (1+t)^{−p} dt` for `σ > 0` by composite Simpson on doubling segments.
fn poly_laplace(p: f64, sigma: f64) -> f64 {
    let g = |t: f64| (-sigma * t).exp() * (1.0 + t).powf(-p);
    let mut total = 0.0;
    let (mut lo, mut width) = (0.0f64, (0.25f64).min(1.0 / sigma));
    loop {
        let hi = lo + width;
        let n = 256;
        let dx = width / n as f64;
        let mut s = g(lo) + g(hi);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * g(lo + k as f64 * dx);
        }
        total += s * dx / 3.0;
        lo = hi;
        width = (2.0 * width).min(4.0 / sigma);
        let tail = g(lo) / sigma;
        if tail <= 1e-13 * total || lo > 1e15 {
            return total;
        }
    }
}

/// Baseline input `u0(t, x)`.
#[derive(Debug, Clone)]
pub enum Baseline {
    Constant(f64),
    /// `u0 = a x + b`
    Affine { a: f64, b: f64 },
    /// `u0(t, x) = e^{−rate t} ũ(x)`
    SeparableExp { rate: f64, profile: Profile },
    /// Class values on consecutive intervals `[bounds[k], bounds[k+1])`.
    Classes { bounds: Vec<f64>, values: Vec<f64> },
}

impl Baseline {
    pub fn classes(bounds: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if bounds.len() != values.len() + 1
            || values.is_empty()
            || bounds[0] != 0.0
            || *bounds.last().unwrap() != 1.0
            || bounds.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::Model(
                "class baseline needs increasing bounds from 0 to 1, one more than values".into(),
            ));
        }
        Ok(Baseline::Classes { bounds, values })
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            Baseline::Constant(c) => *c,
            Baseline::Affine { a, b } => a * x + b,
            Baseline::SeparableExp { rate, profile } => (-rate * t).exp() * profile.eval(x),
            Baseline::Classes { bounds, values } => {
                let k = bounds.partition_point(|&b| b <= x).clamp(1, values.len());
                values[k - 1]
            }
        }
    }

    pub fn is_time_constant(&self) -> bool {
        !matches!(self, Baseline::SeparableExp { rate, .. } if *rate != 0.0)
    }

    /// `lim_{t→∞} u0(t, x)`, when the baseline determines it.
    pub fn longtime_u(&self) -> Option<Box<dyn Fn(f64) -> f64 + Send + Sync + '_>> {
        match self {
            Baseline::SeparableExp { rate, .. } if *rate != 0.0 => None,
            _ => Some(Box::new(move |x| self.eval(0.0, x))),
        }
    }

    /// `sup_{s ∈ [t0, t1]} u0(s, x)`.
    pub fn sup_over(&self, x: f64, t0: f64, t1: f64) -> f64 {
        self.range_over(x, t0, t1).1
    }

    /// `(inf, sup)` of `u0(·, x)` over `[t0, t1]`; `u0` is monotone in time.
    pub fn range_over(&self, x: f64, t0: f64, t1: f64) -> (f64, f64) {
        let (a, b) = (self.eval(t0, x), self.eval(t1, x));
        (a.min(b), a.max(b))
    }

    /// `sup_{t ≥ 0, x ∈ I} |u0|` estimated on a fine grid of positions.
    pub fn sup_abs(&self) -> f64 {
        (0..=1000)
            .map(|k| self.eval(0.0, k as f64 / 1000.0).abs())
            .fold(0.0, f64::max)
    }

    fn inf_over_space(&self) -> f64 {
        (0..=1000)
            .map(|k| self.eval(0.0, k as f64 / 1000.0))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `(f, h, u0, ν)`.
#[derive(Debug, Clone)]
pub struct HawkesModel {
    pub rate: JumpRate,
    pub kernel: MemoryKernel,
    pub baseline: Baseline,
    pub measure: PositionMeasure,
}

impl HawkesModel {
    /// Checks admissibility: a linear rate needs `h ≥ 0` and `u0 ≥ 0`.
    pub fn new(rate: JumpRate, kernel: MemoryKernel, baseline: Baseline, measure: PositionMeasure) -> Result<Self> {
        if rate.is_linear() {
            if !kernel.is_nonnegative() {
                return Err(Error::Model("a linear jump rate needs a nonnegative memory kernel".into()));
            }
            let inf = baseline.inf_over_space();
            if !(inf >= 0.0) {
                return Err(Error::Model(format!(
                    "a linear jump rate needs a nonnegative baseline, found {inf}"
                )));
            }
        }
        Ok(HawkesModel {
            rate,
            kernel,
            baseline,
            measure,
        })
    }

    /// Linear rate, `h = e^{−αt}`, `u0 ≡ c`, uniform positions.
    pub fn linear_exponential(alpha: f64, c: f64) -> Result<Self> {
        Self::new(
            JumpRate::Linear,
            MemoryKernel::exponential(alpha)?,
            Baseline::Constant(c),
            PositionMeasure::Uniform,
        )
    }

    pub fn with_baseline(mut self, baseline: Baseline) -> Result<Self> {
        self.baseline = baseline;
        Self::new(self.rate, self.kernel, self.baseline, self.measure)
    }
}
