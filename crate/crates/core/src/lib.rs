//! Pseudospectral toolkit for periodic deep-water gravity waves:
//! singular-integral operators on curves, the conformal-coordinate
//! evolution system, traveling-wave construction, the focusing-NLS
//! envelope, and the sideband-instability experiment assembled from them.

pub mod error;
pub mod initdata;
pub mod modulation;
pub mod nls;
pub mod spectral;
pub mod stokes;
pub mod waterwave;

pub use error::{Error, Result};
pub use spectral::{Field, Grid};
