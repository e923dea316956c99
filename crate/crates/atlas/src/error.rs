use std::path::PathBuf;
use std::process::ExitCode;

use ortho3r::classify::ClassifyError;
use ortho3r::workspace::WorkspaceError;
use ortho3r::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AtlasError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("out of family: {0}")]
    OutOfFamily(String),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl AtlasError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            AtlasError::Invalid(_) => 1,
            AtlasError::OutOfFamily(_) => 2,
            AtlasError::Io { .. } | AtlasError::Csv(_) => 3,
        })
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> AtlasError {
        let path = path.into();
        move |source| AtlasError::Io { path, source }
    }
}

impl From<ModelError> for AtlasError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::OutOfFamily(msg) => AtlasError::OutOfFamily(msg),
            other => AtlasError::Invalid(other.to_string()),
        }
    }
}

impl From<WorkspaceError> for AtlasError {
    fn from(e: WorkspaceError) -> Self {
        AtlasError::Invalid(e.to_string())
    }
}

/// Model and workspace failures; a missing signature match is handled by
/// the callers, which still report the metrics.
impl From<ClassifyError> for AtlasError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Model(m) => m.into(),
            ClassifyError::Workspace(w) => w.into(),
            other => AtlasError::Invalid(other.to_string()),
        }
    }
}
