//! TOML run configuration.
//!
//! Every table rejects unknown keys. See `docs/config-schema.md` for the
//! documented schema.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::{Dilution, GraphonKernel, KappaRule, PositionMeasure, PositionScheme, Profile};
use crate::hawkes_sim::SimOptions;
use crate::limit_solver::{PicardStart, SolverOptions};
use crate::model::{Baseline, HawkesModel, JumpRate, MemoryKernel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub model: ModelBlock,
    pub graph: GraphBlock,
    pub positions: PositionsBlock,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    /// `linear`, `relu` or `sigmoid`.
    pub f: String,
    pub h: KernelSpec,
    pub u0: BaselineSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Exp { alpha: f64 },
    Poly { scale: f64, power: f64 },
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaselineSpec {
    Constant { value: f64 },
    /// `u0 = a x + b`
    Affine { a: f64, b: f64 },
    /// `u0 = e^{−rate t} · scale · x^exponent`
    SeparableExp { rate: f64, scale: f64, exponent: f64 },
    Classes { bounds: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GraphBlock {
    pub kernel: GraphonSpec,
    #[serde(default)]
    pub dilution: DilutionSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphonSpec {
    Constant { value: f64 },
    PNearest { r: f64 },
    /// `W(x,y) = (f_scale x^f_exp)(g_scale y^g_exp)`
    Separable { f_scale: f64, f_exp: f64, g_scale: f64, g_exp: f64 },
    /// Row-major class connectivities on consecutive intervals of the given ν-masses.
    Classes { masses: Vec<f64>, matrix: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DilutionSpec {
    #[serde(default = "one")]
    pub rho: f64,
    /// `unit`, `inverse_rho`, `normalized`, or a number for a fixed prefactor.
    #[serde(default)]
    pub kappa: KappaSpec,
}

impl Default for DilutionSpec {
    fn default() -> Self {
        DilutionSpec {
            rho: 1.0,
            kappa: KappaSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum KappaSpec {
    Named(String),
    Fixed(f64),
}

impl Default for KappaSpec {
    fn default() -> Self {
        KappaSpec::Named("unit".into())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PositionsBlock {
    /// `regular` (x_i = i/N) or `iid` (sorted draws from ν).
    pub scenario: String,
    pub n: usize,
    /// Exponent `p` of `F(x) = x^p`; absent means uniform.
    #[serde(default)]
    pub measure_power: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunBlock {
    pub t_end: f64,
    pub dt: f64,
    pub cells: usize,
    pub tol: f64,
    pub seed: u64,
    pub replicas: usize,
    pub ns: Vec<usize>,
    /// Time step of the spatial-profile grid.
    pub profile_dt: f64,
    /// Simulation stops with an explosion error past this many events.
    pub max_events: usize,
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            t_end: 5.0,
            dt: 1e-3,
            cells: 400,
            tol: 1e-9,
            seed: 0,
            replicas: 20,
            ns: vec![50, 100, 200, 400, 800],
            profile_dt: 0.01,
            max_events: SimOptions::default().max_events,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: PathBuf,
    /// Time stride (in solver steps) of field CSVs.
    pub field_stride: usize,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: PathBuf::from("out"),
            field_stride: 50,
        }
    }
}

fn one() -> f64 {
    1.0
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks ranges and builds every object once, so errors surface before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let r = &self.run;
        let positive = [("run.t_end", r.t_end), ("run.dt", r.dt), ("run.tol", r.tol), ("run.profile_dt", r.profile_dt)];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config(format!("{name} must be positive, got {v}")));
        }
        if r.cells == 0 || r.replicas == 0 || r.max_events == 0 || self.positions.n == 0 || self.output.field_stride == 0 {
            return Err(Error::Config(
                "run.cells, run.replicas, run.max_events, positions.n and output.field_stride must be positive".into(),
            ));
        }
        if r.ns.contains(&0) {
            return Err(Error::Config("run.ns entries must be positive".into()));
        }
        self.model()?;
        self.kernel()?;
        self.dilution()?;
        self.scheme()?;
        Ok(())
    }

    pub fn measure(&self) -> Result<PositionMeasure> {
        match self.positions.measure_power {
            None => Ok(PositionMeasure::Uniform),
            Some(p) => PositionMeasure::power(p).map_err(field_error("positions.measure_power")),
        }
    }

    pub fn scheme(&self) -> Result<PositionScheme> {
        match self.positions.scenario.as_str() {
            "regular" => {
                if self.positions.measure_power.is_some() {
                    return Err(Error::Config(
                        "positions.measure_power requires scenario = \"iid\" (the regular grid is uniform)".into(),
                    ));
                }
                Ok(PositionScheme::RegularGrid)
            }
            "iid" => Ok(PositionScheme::IidSorted(self.measure()?)),
            other => Err(Error::Config(format!(
                "positions.scenario must be \"regular\" or \"iid\", got \"{other}\""
            ))),
        }
    }

    pub fn model(&self) -> Result<HawkesModel> {
        let m = &self.model;
        let rate = JumpRate::named(&m.f).map_err(field_error("model.f"))?;
        let kernel = match &m.h {
            KernelSpec::Exp { alpha } => MemoryKernel::exponential(*alpha),
            KernelSpec::Poly { scale, power } => MemoryKernel::poly_decay(*scale, *power),
            KernelSpec::Tabulated { times, values } => MemoryKernel::tabulated(times.clone(), values.clone()),
        }
        .map_err(field_error("model.h"))?;
        let baseline = match &m.u0 {
            BaselineSpec::Constant { value } => Ok(Baseline::Constant(*value)),
            BaselineSpec::Affine { a, b } => Ok(Baseline::Affine { a: *a, b: *b }),
            BaselineSpec::SeparableExp { rate, scale, exponent } => Ok(Baseline::SeparableExp {
                rate: *rate,
                profile: Profile::Power {
                    scale: *scale,
                    exponent: *exponent,
                },
            }),
            BaselineSpec::Classes { bounds, values } => Baseline::classes(bounds.clone(), values.clone()),
        }
        .map_err(field_error("model.u0"))?;
        HawkesModel::new(rate, kernel, baseline, self.measure()?).map_err(field_error("model"))
    }

    pub fn kernel(&self) -> Result<GraphonKernel> {
        let k = match &self.graph.kernel {
            GraphonSpec::Constant { value } => {
                if !(*value >= 0.0 && value.is_finite()) {
                    return Err(Error::Config(format!("graph.kernel.value must be >= 0, got {value}")));
                }
                GraphonKernel::constant(*value)
            }
            GraphonSpec::PNearest { r } => GraphonKernel::p_nearest(*r).map_err(field_error("graph.kernel.r"))?,
            GraphonSpec::Separable {
                f_scale,
                f_exp,
                g_scale,
                g_exp,
            } => GraphonKernel::separable(
                Profile::Power {
                    scale: *f_scale,
                    exponent: *f_exp,
                },
                Profile::Power {
                    scale: *g_scale,
                    exponent: *g_exp,
                },
            ),
            GraphonSpec::Classes { masses, matrix } => {
                GraphonKernel::multi_class(&self.measure()?, matrix.clone(), masses).map_err(field_error("graph.kernel"))?
            }
        };
        Ok(k)
    }

    pub fn dilution(&self) -> Result<Dilution> {
        let d = &self.graph.dilution;
        let kappa = match &d.kappa {
            KappaSpec::Fixed(k) => KappaRule::Fixed(*k),
            KappaSpec::Named(name) => match name.as_str() {
                "unit" => KappaRule::Unit,
                "inverse_rho" => KappaRule::InverseRho,
                "normalized" => KappaRule::Normalized,
                other => {
                    return Err(Error::Config(format!(
                        "graph.dilution.kappa must be unit, inverse_rho, normalized or a number, got \"{other}\""
                    )))
                }
            },
        };
        let dil = Dilution { rho: d.rho, kappa };
        dil.validate().map_err(field_error("graph.dilution"))?;
        Ok(dil)
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            max_events: self.run.max_events,
            ..SimOptions::default()
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            dt: self.run.dt,
            tol: self.run.tol,
            cells: self.run.cells,
            max_iterations: SolverOptions::default().max_iterations,
            start: PicardStart::Baseline,
        }
    }
}

fn field_error(field: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Config(format!("{field}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIG2: &str = r#"
schema_version = 1

[model]
f = "linear"
h = { kind = "exp", alpha = 2.0 }
u0 = { kind = "constant", value = 1.0 }

[graph]
kernel = { kind = "constant", value = 0.5 }

[positions]
scenario = "regular"
n = 1000

[run]
t_end = 5.0
seed = 7
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = RunConfig::from_toml(FIG2).unwrap();
        assert_eq!(cfg.positions.n, 1000);
        assert_eq!(cfg.run.dt, 1e-3);
        assert_eq!(cfg.dilution().unwrap(), Dilution::dense());
        assert!(cfg.scheme().unwrap().is_regular());
        assert_eq!(cfg.model().unwrap().kernel.exponential_rate(), Some(2.0));
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig::from_toml(FIG2).unwrap();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn missing_field_is_named() {
        let text = FIG2.replace("alpha = 2.0", "");
        let msg = RunConfig::from_toml(&text).unwrap_err().to_string();
        assert!(msg.contains("alpha"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = FIG2.replace("n = 1000", "n = 1000\nnn = 3");
        let msg = RunConfig::from_toml(&text).unwrap_err().to_string();
        assert!(msg.contains("nn"), "{msg}");
        let text = FIG2.replace("alpha = 2.0", "alpha = 2.0, beta = 1.0");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn bad_values_name_their_field() {
        let text = FIG2.replace("alpha = 2.0", "alpha = -1.0");
        let msg = RunConfig::from_toml(&text).unwrap_err().to_string();
        assert!(msg.contains("model.h"), "{msg}");
        let text = FIG2.replace("f = \"linear\"", "f = \"tanh\"");
        assert!(RunConfig::from_toml(&text).unwrap_err().to_string().contains("model.f"));
        let text = FIG2.replace("[graph]", "[graph]\ndilution = { rho = 0.5, kappa = \"sqrt\" }");
        assert!(RunConfig::from_toml(&text).unwrap_err().to_string().contains("kappa"));
        let text = FIG2.replace("schema_version = 1", "schema_version = 9");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn fixed_kappa_and_iid_positions() {
        let text = FIG2
            .replace("[graph]", "[graph]\ndilution = { rho = 0.25, kappa = 2.0 }")
            .replace("scenario = \"regular\"", "scenario = \"iid\"\nmeasure_power = 2.0");
        let cfg = RunConfig::from_toml(&text).unwrap();
        assert_eq!(cfg.dilution().unwrap().kappa, KappaRule::Fixed(2.0));
        assert!(!cfg.scheme().unwrap().is_regular());
    }
}
