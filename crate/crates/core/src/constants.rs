//! CODATA 2018 exact and recommended values, SI units.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;

/// Bohr radius, m.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// One nanokelvin, K.
pub const NANOKELVIN: f64 = 1e-9;

/// One nanometre, m.
pub const NANOMETRE: f64 = 1e-9;
