//! Input pulse trains, the spectral preparation they run against, and the
//! named analysis windows that go with them.
//!
//! A sequence is a list of pulses, each with a shape, a strength given
//! either as a pulse area or as a peak Rabi frequency, an optical phase and
//! an optional carrier detuning. The boundary drive fed into the propagator
//! is the complex sum of all pulse envelopes, in rad/µs.
//!
//! Repumping and dummy-pulse hole burning happen long before the optical
//! pulses and are carried here as static preparation state (`density_scale`,
//! `hole`) rather than as timed pulses: a sequence with a hole is a
//! slow-light run, one without is conventional.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::medium::HoleSpec;
use crate::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseShape {
    /// Constant envelope over [start, start + duration).
    Rect,
    /// Truncated Gaussian, σ = duration/10, centered in the pulse window.
    /// The ±5σ cut keeps the spectral sidelobes of the truncation edges
    /// below anything a deeply absorbing medium could let through.
    Gaussian,
}

/// Pulse strength, either integrated or peak.
///
/// For `AreaRad` the envelope is scaled so ∫Ω dt equals the requested area;
/// exact for rect, short by the negligible truncated tail mass for gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseStrength {
    AreaRad(f64),
    PeakRabiRadPerUs(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    /// Name used in reports ("data", "read", ...).
    pub label: String,
    /// Pulse window start (µs).
    pub start_us: f64,
    /// Pulse window length (µs).
    pub duration_us: f64,
    pub shape: PulseShape,
    pub strength: PulseStrength,
    /// Optical phase (rad) of the envelope at the pulse center.
    #[serde(default)]
    pub phase_rad: f64,
    /// Carrier offset from the frame center (MHz). A pulse detuned by δ
    /// drives the detuning class at Δ = δ resonantly.
    #[serde(default)]
    pub detuning_mhz: f64,
}

impl PulseSpec {
    pub fn end_us(&self) -> f64 {
        self.start_us + self.duration_us
    }

    pub fn center_us(&self) -> f64 {
        self.start_us + 0.5 * self.duration_us
    }

    /// Peak Rabi frequency (rad/µs) the strength setting works out to.
    pub fn peak_rabi(&self) -> f64 {
        match self.strength {
            PulseStrength::PeakRabiRadPerUs(p) => p,
            PulseStrength::AreaRad(a) => match self.shape {
                PulseShape::Rect => a / self.duration_us,
                PulseShape::Gaussian => {
                    let sigma = self.duration_us / 10.0;
                    a / (sigma * (TAU).sqrt())
                }
            },
        }
    }

    /// Complex envelope (rad/µs) at time `t_us`; zero outside the window.
    pub fn envelope_at(&self, t_us: f64) -> Complex64 {
        if t_us < self.start_us || t_us >= self.end_us() {
            return Complex64::ZERO;
        }
        let magnitude = match self.shape {
            PulseShape::Rect => self.peak_rabi(),
            PulseShape::Gaussian => {
                let sigma = self.duration_us / 10.0;
                let x = (t_us - self.center_us()) / sigma;
                self.peak_rabi() * (-0.5 * x * x).exp()
            }
        };
        let phase = self.phase_rad - TAU * self.detuning_mhz * (t_us - self.center_us());
        Complex64::from_polar(magnitude, phase)
    }

    pub fn validate(&self, index: usize) -> Result<(), ConfigError> {
        let field = |name: &str| format!("pulses[{index}].{name}");
        if self.label.is_empty() {
            return Err(ConfigError::new(field("label"), "must not be empty"));
        }
        if !self.start_us.is_finite() || self.start_us < 0.0 {
            return Err(ConfigError::new(
                field("start_us"),
                format!("must be finite and >= 0, got {}", self.start_us),
            ));
        }
        if !(self.duration_us > 0.0) || !self.duration_us.is_finite() {
            return Err(ConfigError::new(
                field("duration_us"),
                format!("must be finite and > 0, got {}", self.duration_us),
            ));
        }
        let strength = match self.strength {
            PulseStrength::AreaRad(a) => a,
            PulseStrength::PeakRabiRadPerUs(p) => p,
        };
        if !strength.is_finite() || strength < 0.0 {
            return Err(ConfigError::new(
                field("strength"),
                format!("must be finite and >= 0, got {strength}"),
            ));
        }
        if !self.phase_rad.is_finite() {
            return Err(ConfigError::new(field("phase_rad"), "must be finite"));
        }
        if !self.detuning_mhz.is_finite() {
            return Err(ConfigError::new(field("detuning_mhz"), "must be finite"));
        }
        Ok(())
    }
}

/// Half-open time window [t0, t1) in µs, used to slice traces for analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeWindow {
    pub t0_us: f64,
    pub t1_us: f64,
}

impl TimeWindow {
    pub fn contains(&self, t_us: f64) -> bool {
        t_us >= self.t0_us && t_us < self.t1_us
    }

    pub fn width_us(&self) -> f64 {
        self.t1_us - self.t0_us
    }
}

/// A pulse train plus its spectral preparation and named analysis windows
/// ("data", "echo1", ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    /// Schema version of the serialized document.
    #[serde(default = "default_version")]
    pub version: u32,
    pub pulses: Vec<PulseSpec>,
    /// Transparency window burned before the train starts; present on
    /// slow-light runs, absent on conventional ones.
    #[serde(default)]
    pub hole: Option<HoleSpec>,
    /// Background population left by the repump stage, as a fraction of the
    /// full line, in [0, 1].
    #[serde(default = "default_density")]
    pub density_scale: f64,
    #[serde(default)]
    pub windows: BTreeMap<String, TimeWindow>,
}

fn default_version() -> u32 {
    1
}

fn default_density() -> f64 {
    1.0
}

impl Default for SequenceSpec {
    fn default() -> Self {
        Self {
            version: default_version(),
            pulses: Vec::new(),
            hole: None,
            density_scale: default_density(),
            windows: BTreeMap::new(),
        }
    }
}

impl SequenceSpec {
    /// Boundary drive at time `t_us`: the sum of all pulse envelopes.
    pub fn envelope_at(&self, t_us: f64) -> Complex64 {
        self.pulses
            .iter()
            .map(|p| p.envelope_at(t_us))
            .fold(Complex64::ZERO, |a, b| a + b)
    }

    /// Largest peak Rabi frequency (rad/µs) of any single pulse.
    pub fn max_rabi(&self) -> f64 {
        self.pulses.iter().map(|p| p.peak_rabi()).fold(0.0, f64::max)
    }

    /// End of the last pulse window (µs); zero for an empty train.
    pub fn last_pulse_end_us(&self) -> f64 {
        self.pulses.iter().map(|p| p.end_us()).fold(0.0, f64::max)
    }

    /// Shortest pulse duration (µs), the bandwidth-limiting one.
    pub fn min_duration_us(&self) -> f64 {
        self.pulses
            .iter()
            .map(|p| p.duration_us)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn pulse(&self, label: &str) -> Option<&PulseSpec> {
        self.pulses.iter().find(|p| p.label == label)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != 1 {
            return Err(ConfigError::new(
                "version",
                format!("unsupported schema version {}, expected 1", self.version),
            ));
        }
        if self.pulses.is_empty() {
            return Err(ConfigError::new("pulses", "sequence has no pulses"));
        }
        for (i, p) in self.pulses.iter().enumerate() {
            p.validate(i)?;
        }
        let mut order: Vec<&PulseSpec> = self.pulses.iter().collect();
        order.sort_by(|a, b| a.start_us.total_cmp(&b.start_us));
        for pair in order.windows(2) {
            if pair[1].start_us < pair[0].end_us() {
                return Err(ConfigError::new(
                    "pulses",
                    format!(
                        "pulses {:?} and {:?} overlap in time",
                        pair[0].label, pair[1].label
                    ),
                ));
            }
        }
        if !self.density_scale.is_finite() || !(0.0..=1.0).contains(&self.density_scale) {
            return Err(ConfigError::new(
                "density_scale",
                format!("must lie in [0, 1], got {}", self.density_scale),
            ));
        }
        if let Some(hole) = &self.hole {
            hole.validate()?;
        }
        for (name, w) in &self.windows {
            if !(w.t1_us > w.t0_us) || !w.t0_us.is_finite() {
                return Err(ConfigError::new(
                    format!("windows.{name}"),
                    format!("window must satisfy t0 < t1, got [{}, {}]", w.t0_us, w.t1_us),
                ));
            }
        }
        Ok(())
    }
}

/// Looks up one of the bundled experiment sequences by name.
///
/// The full run bundles (medium and numerical grid included) live in
/// [`crate::presets`]; this returns just the pulse train part.
pub fn preset(name: &str) -> Result<SequenceSpec, ConfigError> {
    crate::presets::setup(name).map(|s| s.sequence)
}
