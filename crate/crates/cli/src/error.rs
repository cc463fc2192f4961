//! CLI error type: every failure carries the exit code documented in
//! `--help`, and library errors are folded into the right class so scripts
//! can branch on the code alone.

use std::path::Path;

/// One variant per documented exit class (success is absent — it is not an
/// error). Usage problems exit 2 to match the argument parser's own code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Flag combinations, config contradictions, out-of-range parameters.
    #[error("{0}")]
    Usage(String),
    /// Filesystem failures; the message names the path involved.
    #[error("{0}")]
    Io(String),
    /// Input files that do not conform to their documented format.
    #[error("{0}")]
    Parse(String),
    /// Numerical failure inside a computation (singular matrix, too few
    /// samples, an evolution that ran out of graph).
    #[error("{0}")]
    Numeric(String),
    /// Inputs that are individually valid but jointly degenerate.
    #[error("{0}")]
    Degenerate(String),
}

impl CliError {
    /// The process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Parse(_) => 4,
            CliError::Numeric(_) => 5,
            CliError::Degenerate(_) => 6,
        }
    }

    /// An I/O failure annotated with the path it concerns.
    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {}", path.display(), err))
    }
}

impl From<netgauss::Error> for CliError {
    fn from(err: netgauss::Error) -> Self {
        use netgauss::Error as E;
        let msg = err.to_string();
        match err {
            E::Io(_) => CliError::Io(msg),
            E::Parse { .. }
            | E::AsymmetricMatrix { .. }
            | E::NegativeWeight { .. }
            | E::NonFiniteWeight { .. }
            | E::SelfLoop { .. }
            | E::EmptyGraph
            | E::NotConnected => CliError::Parse(msg),
            E::BadSpec(_)
            | E::InvalidSetup(_)
            | E::BadTarget { .. }
            | E::BadSize { .. }
            | E::NodeOutOfRange { .. }
            | E::DimensionMismatch { .. } => CliError::Usage(msg),
            E::DegenerateResiduals => CliError::Degenerate(msg),
            E::ZeroEnergy
            | E::TooFewSamples { .. }
            | E::SingularGram
            | E::NotPositiveDefinite
            | E::SingularBlock
            | E::DisconnectedResult
            | E::TooSmall => CliError::Numeric(msg),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct_per_class() {
        let errors = [
            CliError::Usage("u".into()),
            CliError::Io("i".into()),
            CliError::Parse("p".into()),
            CliError::Numeric("n".into()),
            CliError::Degenerate("d".into()),
        ];
        let mut codes: Vec<i32> = errors.iter().map(CliError::exit_code).collect();
        codes.sort_unstable();
        codes.dedup();
        assert_eq!(codes.len(), errors.len());
        assert!(!codes.contains(&0));
    }

    #[test]
    fn library_errors_land_in_the_documented_classes() {
        assert_eq!(
            CliError::from(netgauss::Error::DegenerateResiduals).exit_code(),
            6
        );
        assert_eq!(
            CliError::from(netgauss::Error::SingularGram).exit_code(),
            5
        );
        assert_eq!(
            CliError::from(netgauss::Error::Parse {
                line: 3,
                msg: "bad".into()
            })
            .exit_code(),
            4
        );
        assert_eq!(
            CliError::from(netgauss::Error::BadSpec("rho".into())).exit_code(),
            2
        );
    }

    #[test]
    fn io_errors_name_the_path() {
        let err = CliError::io(Path::new("/no/such/file"), "not found");
        assert!(err.to_string().contains("/no/such/file"));
        assert_eq!(err.exit_code(), 3);
    }
}
