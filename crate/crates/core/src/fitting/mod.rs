//! Spectrum fitting and errors-in-variables line regression.

mod dataset;
mod regression;
mod simplex;
mod spectrum_fit;

pub use dataset::{
    distance_from_half, synthesize, DatasetProvenance, SynthPlan, TransitionDataset, TransitionRecord, NEAR_HALF_WINDOW,
};
pub use regression::{
    deming_closed_form, deming_fit, inductance_and_beta, InductanceEstimate, LineFitResult, RatioPoint,
    DEFAULT_MAX_ASYMMETRY_PERCENT,
};
pub use spectrum_fit::{
    coarse_initial_guess, fit_spectrum, spectrum_cost, FitBounds, FitDiagnostics, FitOptions, FitParams, FitResult,
    PARAMETER_NAMES,
};
