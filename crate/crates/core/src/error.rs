use alloc::string::String;

/// Errors raised by the inference engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input data violates a structural invariant (ids, duplicates, shapes).
    #[error("validation error: {0}")]
    Validation(String),
    /// A training or model configuration is out of range.
    #[error("configuration error: {0}")]
    Config(String),
    /// The requested (word, document) pair is not a corpus entry.
    #[error("no corpus entry for word {word} in document {doc}")]
    MissingEntry { word: usize, doc: usize },
    /// A message handed to the store is not a probability vector.
    #[error("message is not a distribution (sum = {sum}, min = {min})")]
    Unnormalized { sum: f64, min: f64 },
    /// A present word received zero predictive probability.
    #[error("zero predictive probability for word {word} in document {doc}")]
    ZeroProbability { word: usize, doc: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::Validation(alloc::format!($($arg)*))
    };
}

macro_rules! bad_config {
    ($($arg:tt)*) => {
        $crate::error::Error::Config(alloc::format!($($arg)*))
    };
}

pub(crate) use bad_config;
pub(crate) use invalid;
