pub mod error;
pub mod index;
pub mod localization;
pub mod oracle;
pub mod polyexp;
pub mod quadrature;
pub mod rotation;
pub mod special;
pub mod wigner;

pub use error::{Error, Result};
pub use index::MultiIndex;
