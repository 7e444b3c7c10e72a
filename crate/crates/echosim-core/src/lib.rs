//! Semiclassical simulation of photon echoes in a spectrally hole-burned,
//! inhomogeneously broadened two-level medium.
//!
//! The model is the standard one-dimensional Maxwell-Bloch system in the
//! rotating frame and slowly-varying-envelope approximation. Atoms are binned
//! by detuning across the inhomogeneous line; each bin carries a Bloch vector
//! driven by the local complex Rabi envelope, and the envelope is propagated
//! through the slab in the co-moving (retarded-time) frame, sourced by the
//! macroscopic polarization of the bins.
//!
//! Spectral preparation (repumping and dummy-pulse hole burning) is modelled
//! as a static reshaping of the per-detuning population difference before the
//! pulse sequence starts. Burning a hole opens a transparency window whose
//! steep dispersion slows the group velocity by orders of magnitude; echoes
//! emitted inside the window escape reabsorption, which is the effect the
//! bundled presets are built around.
//!
//! Working units throughout: time in µs, detunings in MHz (converted to
//! angular rad/µs at the Bloch level), lengths in mm, Rabi frequencies in
//! rad/µs. Field envelopes are dimensionless complex Rabi amplitudes, so all
//! reported energies are relative quantities.

pub mod analysis;
pub mod bloch;
pub mod error;
pub mod medium;
pub mod presets;
pub mod propagation;
pub mod sequence;

/// Speed of light in mm/µs.
pub const C_MM_PER_US: f64 = 2.997_924_58e5;

/// One turn in rad; multiplies MHz detunings into angular rad/µs.
pub const TAU: f64 = std::f64::consts::TAU;
