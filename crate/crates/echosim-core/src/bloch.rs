//! Two-level dynamics of a single detuning class.
//!
//! State is the Bloch vector (u, v, w) in the rotating frame: u and v are the
//! in-phase and quadrature coherence, w the population inversion with the
//! ground state at w = −1. A complex Rabi drive Ω(t) and a fixed detuning Δ
//! precess the vector according to
//!
//!   du/dt = −Δ·v − u/T₂ + Im(Ω)·w
//!   dv/dt =  Δ·u − v/T₂ + Re(Ω)·w
//!   dw/dt = −Re(Ω)·v − Im(Ω)·u − (w + 1)/T₁
//!
//! with Δ and Ω in rad/µs. This is a rotation about B = (−Re Ω, Im Ω, Δ)
//! plus relaxation toward (0, 0, −1).
//!
//! Time stepping is classic fixed-step RK4; the caller supplies the drive at
//! the step endpoints and midpoint. Idealized instantaneous pulses and
//! drive-free evolution have closed forms used both for fast paths and as
//! integrator oracles.

use num_complex::Complex64;

/// Bloch vector (u, v, w); the coherence is c = u + i·v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl BlochVector {
    /// All population in the ground state, no coherence.
    pub const GROUND: BlochVector = BlochVector {
        u: 0.0,
        v: 0.0,
        w: -1.0,
    };

    pub fn norm(&self) -> f64 {
        (self.u * self.u + self.v * self.v + self.w * self.w).sqrt()
    }

    /// Coherence u + i·v.
    pub fn coherence(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite() && self.w.is_finite()
    }
}

/// Relaxation rates, precomputed from the lifetimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    /// 1/T₁ in 1/µs.
    pub gamma1: f64,
    /// 1/T₂ in 1/µs.
    pub gamma2: f64,
}

impl Rates {
    pub fn from_lifetimes(t1_us: f64, t2_us: f64) -> Rates {
        Rates {
            gamma1: 1.0 / t1_us,
            gamma2: 1.0 / t2_us,
        }
    }
}

/// Drive felt by one detuning class at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSample {
    /// Complex Rabi frequency (rad/µs).
    pub omega: Complex64,
    /// Detuning of this class (rad/µs, angular).
    pub detuning: f64,
}

/// Right-hand side of the Bloch equations.
#[inline]
pub fn derivative(b: BlochVector, d: DriveSample, r: Rates) -> BlochVector {
    let (re, im) = (d.omega.re, d.omega.im);
    BlochVector {
        u: -d.detuning * b.v - r.gamma2 * b.u + im * b.w,
        v: d.detuning * b.u - r.gamma2 * b.v + re * b.w,
        w: -re * b.v - im * b.u - r.gamma1 * (b.w + 1.0),
    }
}

/// One RK4 step of length `dt_us`.
///
/// `drives` holds the drive at the step start, midpoint and end; the
/// detuning must be the same in all three samples.
#[inline]
pub fn step_rk4(b: BlochVector, drives: &[DriveSample; 3], dt_us: f64, r: Rates) -> BlochVector {
    let half = 0.5 * dt_us;
    let k1 = derivative(b, drives[0], r);
    let k2 = derivative(
        BlochVector {
            u: b.u + half * k1.u,
            v: b.v + half * k1.v,
            w: b.w + half * k1.w,
        },
        drives[1],
        r,
    );
    let k3 = derivative(
        BlochVector {
            u: b.u + half * k2.u,
            v: b.v + half * k2.v,
            w: b.w + half * k2.w,
        },
        drives[1],
        r,
    );
    let k4 = derivative(
        BlochVector {
            u: b.u + dt_us * k3.u,
            v: b.v + dt_us * k3.v,
            w: b.w + dt_us * k3.w,
        },
        drives[2],
        r,
    );
    let sixth = dt_us / 6.0;
    BlochVector {
        u: b.u + sixth * (k1.u + 2.0 * (k2.u + k3.u) + k4.u),
        v: b.v + sixth * (k1.v + 2.0 * (k2.v + k3.v) + k4.v),
        w: b.w + sixth * (k1.w + 2.0 * (k2.w + k3.w) + k4.w),
    }
}

/// Instantaneous pulse of the given area and phase.
///
/// The limit of a drive Ω = (area/τ)·e^{iφ} with τ → 0: detuning and decay
/// are negligible and the vector rotates by `area_rad` about the unit axis
/// (−cos φ, sin φ, 0).
pub fn hard_pulse(b: BlochVector, area_rad: f64, phase_rad: f64) -> BlochVector {
    let (nx, ny) = (-phase_rad.cos(), phase_rad.sin());
    let (sin, cos) = (area_rad.sin(), area_rad.cos());
    let dot = nx * b.u + ny * b.v;
    // Rodrigues rotation with nz = 0
    let cross = (ny * b.w, -nx * b.w, nx * b.v - ny * b.u);
    BlochVector {
        u: b.u * cos + cross.0 * sin + nx * dot * (1.0 - cos),
        v: b.v * cos + cross.1 * sin + ny * dot * (1.0 - cos),
        w: b.w * cos + cross.2 * sin,
    }
}

/// Exact drive-free evolution over `dt_us`: the coherence precesses at the
/// detuning and decays with T₂, the inversion relaxes toward −1 with T₁.
pub fn free_evolution(b: BlochVector, detuning_rad_us: f64, dt_us: f64, r: Rates) -> BlochVector {
    let c = b.coherence()
        * Complex64::from_polar((-r.gamma2 * dt_us).exp(), detuning_rad_us * dt_us);
    BlochVector {
        u: c.re,
        v: c.im,
        w: -1.0 + (b.w + 1.0) * (-r.gamma1 * dt_us).exp(),
    }
}
