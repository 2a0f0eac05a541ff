use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

impl From<sphereflow::Error> for CliError {
    fn from(e: sphereflow::Error) -> Self {
        match e {
            sphereflow::Error::InvalidParameter { .. } | sphereflow::Error::Mismatch(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        let numerical: CliError = sphereflow::Error::NonFinite { what: "node" }.into();
        assert_eq!(numerical.exit_code(), 3);
        let config: CliError = sphereflow::Error::Mismatch("n".into()).into();
        assert_eq!(config.exit_code(), 2);
        assert_eq!(CliError::Verification("x".into()).exit_code(), 4);
    }
}
