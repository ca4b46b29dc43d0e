use thiserror::Error;

use crate::algebra::ExactPoly;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable: {0}")]
    UnknownVariable(String),
    #[error("binding for {0} has an identically zero denominator")]
    ZeroDenominator(String),
    #[error("nothing to eliminate: degree 0 in {0}")]
    NothingToEliminate(String),
    #[error("elimination budget exceeded")]
    EliminationBudgetExceeded { partial: Vec<ExactPoly> },
    #[error("decomposition budget exceeded")]
    DecompositionBudgetExceeded,
    #[error("degenerate polynomial")]
    DegeneratePolynomial,
    #[error("unsupported system: {0}")]
    UnsupportedSystem(String),
    #[error("unstable continuous dynamics: Re(lambda) = {0} is not negative")]
    UnstableContinuousDynamics(f64),
    #[error("no singular candidates")]
    NoSingularCandidates,
    #[error("no admissible candidate")]
    NoAdmissibleCandidate,
    #[error("requested step outside stable-consistent interval: dt = {dt} not in (0, {dt_hat})")]
    StepOutsideInterval { dt: f64, dt_hat: f64 },
    #[error("certificate refuted at dt = {dt}: max root modulus {modulus}")]
    CertificateRefuted { dt: f64, modulus: f64 },
    #[error("degenerate design matrix")]
    DegenerateDesign,
    #[error("constraint degeneracy")]
    ConstraintDegeneracy,
    #[error("diverged state")]
    DivergedState,
    #[error("ensemble degenerate")]
    EnsembleDegenerate,
    #[error("zero energy")]
    ZeroEnergy,
    #[error("integration blow-up at t = {0}")]
    IntegrationBlowUp(f64),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("zero-norm window")]
    ZeroNorm,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
