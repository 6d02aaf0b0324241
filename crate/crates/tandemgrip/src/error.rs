use std::path::PathBuf;

use tandemgrip_core::cam::CamError;
use tandemgrip_core::grasp::GraspError;
use tandemgrip_core::leadscrew::ScrewError;
use tandemgrip_core::linkage::LinkageError;
use tandemgrip_core::quantile::QuantileError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {msg}")]
    Config { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: row {row}, column {column}: {msg}")]
    Parse {
        path: PathBuf,
        /// 1-based line in the file, header included.
        row: u64,
        column: String,
        msg: String,
    },
    #[error(transparent)]
    Linkage(#[from] LinkageError),
    #[error(transparent)]
    Screw(#[from] ScrewError),
    #[error(transparent)]
    Grasp(#[from] GraspError),
    #[error(transparent)]
    Cam(#[from] CamError),
    #[error(transparent)]
    Quantile(#[from] QuantileError),
    /// Domain or geometry failure found after the output was produced.
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Numerical(String),
}

impl Error {
    /// 0 success, 2 usage/config, 3 domain or geometry, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config { .. } | Error::Io { .. } | Error::Parse { .. } => 2,
            Error::Linkage(e) => match e {
                LinkageError::GeometryInfeasible { .. } | LinkageError::NegativeY { .. } => 3,
                LinkageError::Screw(ScrewError::DenominatorNonpositive { .. }) => 3,
                _ => 2,
            },
            Error::Screw(ScrewError::DenominatorNonpositive { .. }) => 3,
            Error::Screw(_) => 2,
            Error::Grasp(e) => match e {
                GraspError::LpNumericalFailure(_) | GraspError::CalibrationDiverged { .. } => 4,
                GraspError::InvalidModel(_) | GraspError::EmptyReference => 2,
                _ => 3,
            },
            Error::Cam(e) => match e {
                CamError::SynthesisFailed(_) | CamError::PoseUnsolvable { .. } => 3,
                _ => 2,
            },
            Error::Quantile(_) => 2,
            Error::Domain(_) => 3,
            Error::Numerical(_) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
