pub mod bits;
pub mod code;
pub mod dynamics;
pub mod error;
pub mod gf2;
pub mod hamiltonian;
pub mod linalg;
pub mod matrix_code;
pub mod nogo;
pub mod pauli;
pub mod search;
pub mod spectral;

pub use error::{Error, Result};
