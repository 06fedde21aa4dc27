//! Graphon kernels, W-random graphs, graphon norms and dilution diagnostics.
//!
//! Positions live on `I = [0, 1]` (`d = 1`).

mod dilution;
pub mod io;
mod kernel;
mod measure;
mod norms;
mod sampling;

pub use dilution::{check_dilution, DilutionReport, DilutionRow};
pub use kernel::{
    circle_distance, degree_field, DegreeField, GraphonKernel, HolderCheck, HolderData, KernelConstants, KernelFn,
    KernelKind, Profile, StepKernel,
};
pub use measure::{PositionMeasure, Quadrature, ScalarFn, DEFAULT_QUADRATURE_POINTS};
pub use norms::{norm_inf_inf, norm_inf_one, norm_inf_one_step, InfOneNorm, NormMode, EXACT_MAX_PARTS};
pub use sampling::{
    sample_graph, sample_positions, step_graphon, Dilution, GraphSummary, InteractionGraph, KappaRule,
    PositionScheme, WeightMatrix,
};
