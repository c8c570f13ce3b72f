//! BF theory on finite surface models: its BFV and Gauss-constraint double-BFV data, the
//! quantised operators, and the pointwise BF to Einstein-Hilbert numerics.

pub mod bf;
pub mod dga;
pub mod eh;
pub mod quantum;
pub mod so21;

use crate::galg::GalgError;
use crate::phase::PhaseError;
use crate::quant::QuantError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GravityError {
    #[error(transparent)]
    Galg(#[from] GalgError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Quant(#[from] QuantError),
    #[error(transparent)]
    Eh(#[from] eh::EhError),
    #[error("unknown surface model selector `{0}`")]
    Selector(String),
    #[error("pairing of `{0}` with its conjugate is degenerate on this model")]
    Pairing(String),
}
