use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{module}: {source}")]
    Numerical {
        module: &'static str,
        #[source]
        source: taulab::Error,
    },
    #[error("{0}")]
    Check(String),
    #[error("non-finite output value at {0}")]
    NonFinite(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical { .. } | CliError::NonFinite(_) => 3,
        }
    }
}

/// Tag core errors with the module that raised them.
pub trait Tag<T> {
    fn tag(self, module: &'static str) -> Result<T, CliError>;
}

impl<T> Tag<T> for taulab::Result<T> {
    fn tag(self, module: &'static str) -> Result<T, CliError> {
        self.map_err(|source| match source {
            taulab::Error::InvalidInput(_) | taulab::Error::DuplicateExponent(_) => {
                CliError::Usage(format!("{module}: {source}"))
            }
            source => CliError::Numerical { module, source },
        })
    }
}
