//! Uniform error envelope and exit codes.

use std::fmt;
use std::path::Path;

use serde::Serialize;
use tsi_core::Error as CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Validation = 1,
    Numerical = 2,
    Io = 3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub code: String,
    pub message: String,
    /// Offending input field, when one can be named.
    pub field: Option<String>,
    #[serde(skip)]
    pub exit: ExitCode,
}

#[derive(Serialize)]
struct Envelope<'a> {
    error: &'a CliError,
}

impl CliError {
    pub fn new(exit: ExitCode, code: &str, message: impl Into<String>, field: Option<String>) -> Self {
        Self {
            code: code.into(),
            message: message.into(),
            field,
            exit,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::new(
            ExitCode::Io,
            "Io",
            format!("{}: {err}", path.display()),
            Some(path.display().to_string()),
        )
    }

    pub fn parse(path: &Path, err: serde_path_to_error::Error<serde_json::Error>) -> Self {
        let field = err.path().to_string();
        let inner = err.into_inner();
        Self::new(
            ExitCode::Io,
            "Parse",
            format!("{}: {inner}", path.display()),
            (field != ".").then_some(field),
        )
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(ExitCode::Validation, "InvalidInput", message, None)
    }

    pub fn at(mut self, field: impl Into<String>) -> Self {
        self.field = Some(field.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&Envelope { error: self }).expect("envelope serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for CliError {}

fn core_code(err: &CoreError) -> (&'static str, ExitCode, Option<String>) {
    use CoreError::*;
    use ExitCode::{Numerical, Validation};
    let at = |dir: &tsi_core::PrimitiveDirection, k: u32| Some(format!("direction {dir}, k = {k}"));
    match err {
        NonPositiveDeterminant { .. } => ("NonPositiveDeterminant", Validation, Some("lattice".into())),
        ZeroVector => ("ZeroVector", Validation, None),
        SymmetryViolation { p, q, .. } => ("SymmetryViolation", Validation, Some(format!("modes[{p}, {q}]"))),
        ZeroMeanField => ("ZeroMeanField", Validation, Some("magnetic_field".into())),
        NonzeroMeanPotential { .. } => ("NonzeroMeanPotential", Validation, Some("electric_potential".into())),
        FluxNotQuantized { .. } => ("FluxNotQuantized", Validation, Some("magnetic_field".into())),
        HypothesisViolation { .. } => ("HypothesisViolation", Validation, None),
        InvalidInput(_) => ("InvalidInput", Validation, None),
        IncompleteCoverage { .. } => ("IncompleteCoverage", Validation, Some("table".into())),
        MissingEntry { dir, k } => ("MissingEntry", Validation, at(dir, *k)),
        NonMonotone { dir, .. } => ("NonMonotone", Numerical, Some(format!("direction {dir}"))),
        IllConditioned { dir, k, .. } => ("IllConditioned", Numerical, at(dir, *k)),
        GenericityFailure { .. } => ("GenericityFailure", Numerical, None),
        ClampViolation { dir, .. } => ("ClampViolation", Numerical, Some(format!("direction {dir}"))),
        ConvergenceFailure { .. } => ("ConvergenceFailure", Numerical, None),
        AmplitudeAsymmetry { dir, k, .. } => ("AmplitudeAsymmetry", Numerical, at(dir, *k)),
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let (code, exit, field) = core_code(&err);
        Self::new(exit, code, err.to_string(), field)
    }
}

pub type CliResult<T> = Result<T, CliError>;
