use thiserror::Error;

/// Command failure, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Convergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Convergence(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Convergence(_) => "convergence",
        }
    }

    /// One-line JSON object for standard error.
    pub fn to_line(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

impl From<asn_core::Error> for CliError {
    fn from(e: asn_core::Error) -> Self {
        use asn_core::Error as E;
        match e {
            E::InvalidParams(_) | E::Domain(_) => CliError::Usage(e.to_string()),
            E::Convergence(_) => CliError::Convergence(e.to_string()),
            E::DegenerateData(_) | E::InvalidSample(_) => CliError::Data(e.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
