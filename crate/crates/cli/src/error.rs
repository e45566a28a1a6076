use std::fmt;

use serde_json::json;

/// Failure of a CLI run, mapped onto the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or invalid configuration.
    Config { kind: String, message: String },
    /// The numerical pipeline failed.
    Solver(qhj_core::Error),
    /// Writing the output failed.
    Output(std::io::Error),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config { kind: "InvalidConfig".into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Solver(_) | CliError::Output(_) => 3,
        }
    }

    pub fn kind(&self) -> &str {
        match self {
            CliError::Config { kind, .. } => kind,
            CliError::Solver(e) => e.kind(),
            CliError::Output(_) => "OutputError",
        }
    }

    /// One-line JSON record written to stderr.
    pub fn record(&self) -> serde_json::Value {
        let category = if self.exit_code() == 2 { "configuration" } else { "solver" };
        json!({ "error": { "kind": self.kind(), "category": category, "message": self.to_string() } })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { message, .. } => f.write_str(message),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Output(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qhj_core::Error> for CliError {
    fn from(e: qhj_core::Error) -> Self {
        use qhj_core::Error as E;
        match e {
            E::InvalidPotential(_) | E::InvalidArgument(_) | E::SelectorRequiresBStar(_) | E::NonpositiveB { .. } => {
                CliError::Config { kind: e.kind().into(), message: e.to_string() }
            }
            other => CliError::Solver(other),
        }
    }
}
