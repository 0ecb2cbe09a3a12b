use thiserror::Error;

#[derive(Debug, Error)]
pub enum QfockError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Two objects that must live on the same space do not.
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    /// The requested computation exceeds the configured size bound.
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    /// A Gram block is too close to singular to factorize.
    #[error("gram factorization failed at degree {degree}: minimum eigenvalue {min_eigenvalue:e}")]
    GramFactorization { degree: usize, min_eigenvalue: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QfockError>;
