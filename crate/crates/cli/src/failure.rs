use std::fmt;
use std::path::Path;

/// Why a command stopped. Usage and I/O problems exit with 1, broken
/// mathematical invariants with 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Invariant(String),
}

impl Failure {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::Invariant(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

impl From<tropgc::Error> for Failure {
    fn from(e: tropgc::Error) -> Self {
        use tropgc::Error::*;
        match e {
            BoundarySquare { .. } | RelationViolation(_) | SplittingViolation(_) | NonIntegralLieDimension(_) => {
                Failure::Invariant(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}
