use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("input: {0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] vaisman_core::Error),

    #[error("{}: {e}", path.display())]
    Io {
        path: std::path::PathBuf,
        e: std::io::Error,
    },
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn io_at(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.to_path_buf(),
        e,
    }
}
