use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("invalid ring descriptor: {0}")]
    InvalidRing(String),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("invalid ring homomorphism: {0}")]
    InvalidHom(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("site error: {0}")]
    Site(String),
    #[error("sieve error: {0}")]
    Sieve(String),
    #[error("presheaf error: {0}")]
    Presheaf(String),
    #[error("no glued section: {0}")]
    Gluing(String),
    #[error("bundle error: {0}")]
    Bundle(String),
    #[error("morphism error: {0}")]
    Morphism(String),
    #[error("cocycle error: {0}")]
    Cocycle(String),
    #[error("exactness witness failed: {0}")]
    Exactness(String),
    #[error("unknown claim id `{0}`")]
    UnknownClaim(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
