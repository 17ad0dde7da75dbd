use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] patchnoise::Error),

    #[error("grid spacing {spacing:e} m does not resolve the cells; need spacing <= {required:e} m (at least {min_nodes} nodes per side)")]
    UnderResolved { spacing: f64, required: f64, min_nodes: usize },

    #[error("invalid {field}: {message}")]
    Invalid { field: &'static str, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Error {
    Error::Invalid { field, message: message.into() }
}
