use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<Diagnostic>),
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn config(diags: Vec<Diagnostic>) -> Self {
        CliError::Config(diags)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Other(_) => 1,
        }
    }
}

impl From<finvc::Error> for CliError {
    fn from(e: finvc::Error) -> Self {
        use finvc::Error as E;
        match e {
            E::Io(_) | E::Parse(_) | E::InvalidDomain(_) | E::Shape(_) | E::InvalidClassifier(_) => {
                CliError::Input(e.to_string())
            }
            other => CliError::Other(anyhow::Error::new(other)),
        }
    }
}
