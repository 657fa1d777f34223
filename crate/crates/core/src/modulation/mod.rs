//! Multiscale envelope bridge between the interface evolution and the
//! envelope equation.

mod bundle;
mod slow;


pub use bundle::{cubic_remainder_rho, packet_holo_check, remainder, EnvelopeBundle, Remainder};
pub use slow::{embed, FastDerivs, ModTerm, Modulated, SlowExpr};
