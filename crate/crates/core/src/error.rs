use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A physical parameter is out of its allowed range. `field` is the
    /// dotted config path (e.g. `decay.gamma1`).
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("singular linear system (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("generator is not dissipative (max Re λ = {max_re:.3e}); no steady state")]
    NoSteadyState { max_re: f64 },

    #[error("resolvent singular at ω = {omega} MHz for velocity class {class}")]
    Resonance { omega: f64, class: usize },

    #[error("field transfer diverged (non-finite propagation over L = {length} m)")]
    Divergence { length: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unsupported quadrature order {0} (max 512)")]
    UnsupportedOrder(usize),

    /// A physics failure tagged with the sweep coordinate where it occurred.
    #[error("at {axis} = {value}: {source}")]
    AtPoint {
        axis: &'static str,
        value: f64,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by the input configuration rather than the physics.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::InvalidParameter { .. } | Error::Config(_) => true,
            Error::AtPoint { source, .. } => source.is_config_error(),
            _ => false,
        }
    }

    pub(crate) fn at(axis: &'static str, value: f64) -> impl FnOnce(Error) -> Error {
        move |e| match e {
            e @ Error::AtPoint { .. } => e,
            e => Error::AtPoint {
                axis,
                value,
                source: Box::new(e),
            },
        }
    }
}
