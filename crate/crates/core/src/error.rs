use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("charge cutoff {cutoff} cannot represent harmonic of order {order}")]
    CutoffTooSmall { order: u32, cutoff: usize },

    #[error("matrix is not self-adjoint (relative asymmetry {asymmetry:.3e})")]
    NotSelfAdjoint { asymmetry: f64 },

    #[error("eigensolver failed to converge for a {dimension}x{dimension} matrix: {detail}")]
    EigenNoConvergence { dimension: usize, detail: String },

    #[error("at flux {flux} Φ0, n_g {ng}: {source}")]
    AtGridPoint {
        flux: f64,
        ng: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("quadrature did not reach tolerance {tolerance:.1e} (estimate {estimate:.3e}, {evaluations} evaluations)")]
    Quadrature {
        estimate: f64,
        tolerance: f64,
        evaluations: u64,
    },

    #[error("minimiser over the inductor phase is not unique for E_J={e_j} GHz, E_L={e_l} GHz, beta={beta}")]
    NonUniqueMinimizer { e_j: f64, e_l: f64, beta: f64 },

    #[error("ambiguous dressed-state assignment: best overlap {best:.4}, runner-up {runner_up:.4}")]
    AmbiguousAssignment { best: f64, runner_up: f64 },

    #[error("product dimension {dimension} exceeds the cap of {cap}")]
    DimensionOverflow { dimension: usize, cap: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("unidentifiable: {0}")]
    Unidentifiable(String),

    #[error(
        "no optimizer start converged within {max_evaluations} evaluations (best costs per start: {best_costs:?})"
    )]
    NonConvergence {
        best_costs: Vec<f64>,
        max_evaluations: usize,
    },

    #[error("degenerate regression input: {0}")]
    Degenerate(String),

    #[error("potential is flat; supercurrent extrema are undefined")]
    FlatPotential,
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Solver,
    NonConvergence,
    Unidentifiable,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_) | Error::InvalidDataset(_) | Error::CutoffTooSmall { .. } => ErrorClass::Input,
            Error::NonConvergence { .. } => ErrorClass::NonConvergence,
            Error::Unidentifiable(_) | Error::Degenerate(_) => ErrorClass::Unidentifiable,
            Error::AtGridPoint { source, .. } => source.class(),
            _ => ErrorClass::Solver,
        }
    }

    pub(crate) fn at(self, flux: f64, ng: f64) -> Error {
        Error::AtGridPoint {
            flux,
            ng,
            source: Box::new(self),
        }
    }
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {value}")))
    }
}
