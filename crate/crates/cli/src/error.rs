use laser_uav::Error as CoreError;
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Core { context: String, source: CoreError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn core(context: impl Into<String>, source: CoreError) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for numerical failures, 4 for
    /// uncoverable scenarios.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Core { source, .. } => match source {
                CoreError::Uncoverable => 4,
                CoreError::InvalidParameter { .. } | CoreError::WindowTooSmall { .. } | CoreError::Tabulated(_) => 2,
                CoreError::Quadrature { .. } | CoreError::Bracket { .. } | CoreError::Domain { .. } => 3,
            },
            CliError::Io(_) => 1,
        }
    }
}
