//! Exact graded-symplectic algebra for BFV and double-BFV resolutions of nested
//! coisotropic embeddings, their formal quantisation, and a finite BF-theory instance.

pub mod bfv;
pub mod check;
pub mod dbfv;
pub mod galg;
pub mod gravity;
pub mod linalg;
pub mod phase;
pub mod quant;
