use thiserror::Error;

/// Failures of the command layer.
#[derive(Debug, Error)]
pub enum CliError {
    /// Domain error from the simulation core.
    #[error(transparent)]
    Core(#[from] qudit_parity_core::Error),
    /// Could not read or write a file.
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    /// A JSON file did not parse.
    #[error("{0}: {1}")]
    Parse(String, #[source] serde_json::Error),
    /// Parsed, but the content is not acceptable.
    #[error("bad input: {0}")]
    Format(String),
    /// Conflicting or missing settings.
    #[error("configuration: {0}")]
    Config(String),
    /// A self-check on the produced artifact failed.
    #[error("self-check failed: {0}")]
    SelfCheck(String),
}
