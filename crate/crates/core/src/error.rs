use thiserror::Error;

use crate::laminate::LaminateDecomposition;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate frame: |a⊥·b| = {cross:e} is below {limit:e}")]
    DegenerateFrame { cross: f64, limit: f64 },

    #[error("{what} evaluated at z = {z} below its domain floor {floor}")]
    Domain { what: &'static str, z: f64, floor: f64 },

    #[error("matrix is off the det = 1 manifold (|det - 1| = {residual:e}, tol = {tol:e})")]
    OffManifold { residual: f64, tol: f64 },

    #[error("invalid slip system: {0}")]
    InvalidSlipSystem(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("required roots coincide (gap {gap:e}); limiting single-point decomposition attached")]
    DegenerateTangency {
        gap: f64,
        limit: Box<LaminateDecomposition>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
