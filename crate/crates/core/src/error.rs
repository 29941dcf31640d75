use thiserror::Error;

use crate::heat_series::SeriesError;
use crate::hhl::HhlError;
use crate::linsys::LinsysError;
use crate::problem_file::ParseError;
use crate::problems::ProblemError;
use crate::specfun::SpecFunError;

/// Any failure of a run, tagged with the module it came from.
#[derive(Debug, Error)]
pub enum Error {
    #[error("specfun: {0}")]
    SpecFun(#[from] SpecFunError),
    #[error("heat-series: {0}")]
    Series(#[from] SeriesError),
    #[error("problems: {0}")]
    Problem(ProblemError),
    #[error("linsys: {0}")]
    Linsys(#[from] LinsysError),
    #[error("hhl: {0}")]
    Hhl(HhlError),
    #[error("parse: {0}")]
    Parse(ParseError),
    #[error("config: {0}")]
    Config(String),
    #[error("report: {0}")]
    Report(String),
    #[error("io: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

// Wrapped lower-level errors are re-tagged with the module that raised them.
impl From<ProblemError> for Error {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::SpecFun(e) => Error::SpecFun(e),
            ProblemError::Series(e) => Error::Series(e),
            ProblemError::Linsys(e) => Error::Linsys(e),
            other => Error::Problem(other),
        }
    }
}

impl From<HhlError> for Error {
    fn from(e: HhlError) -> Self {
        match e {
            HhlError::Linsys(e) => Error::Linsys(e),
            other => Error::Hhl(other),
        }
    }
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
