//! Uncoded bit-error rate of one-dimensional constellations under symbol-wise,
//! exact bit-wise and max-log bit-wise demodulation, with enumeration of the
//! bit patterns and labelings that determine the BER of equally spaced PAM.

pub mod analytic_ber;
pub mod cli;
pub mod constellation;
pub mod demod;
pub mod error;
pub mod labeling_space;
pub mod montecarlo;
pub mod pattern_classes;
pub mod quadrature;
pub mod thresholds;
pub mod verify;

pub use error::{Error, Result};
