pub mod cubic;
pub mod error;
pub mod matsubara;
pub mod oracle;
pub mod qbm;
pub mod spa;
pub mod thermo;
pub mod specfun;

pub use error::{Error, Result};
