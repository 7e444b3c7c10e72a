//! Static spectral model of the storage medium.
//!
//! The medium is an inhomogeneously broadened two-level ensemble, described
//! by a uniform grid of detuning bins weighted by a Gaussian line profile and
//! a per-bin population difference n(Δ) ∈ [−1, 1]. Spectral preparation
//! (repump and dummy-pulse hole burning) reshapes n(Δ) before any light
//! propagates; the reshaped population then determines the absorption
//! spectrum, and through a Kramers-Kronig transform the dispersion and group
//! delay of the transparency window.
//!
//! Absorption is anchored, not derived from microscopic constants: the
//! pristine medium (n ≡ 1) is normalized so that α(0)·length equals the
//! configured optical depth exactly, and every prepared population scales
//! from that anchor.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, DetectionError};
use crate::TAU;

/// Uniform grid of detuning bin centers, symmetric about zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningGrid {
    /// Outermost bin center magnitude (MHz); bins span [−half_span, half_span].
    pub half_span_mhz: f64,
    /// Number of bins, at least 64.
    pub bins: usize,
}

impl DetuningGrid {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.half_span_mhz > 0.0) || !self.half_span_mhz.is_finite() {
            return Err(ConfigError::new(
                "grid.half_span_mhz",
                format!("must be finite and > 0, got {}", self.half_span_mhz),
            ));
        }
        if self.bins < 64 {
            return Err(ConfigError::new(
                "grid.bins",
                format!("need at least 64 detuning bins, got {}", self.bins),
            ));
        }
        Ok(())
    }

    /// Bin spacing in MHz.
    pub fn step_mhz(&self) -> f64 {
        2.0 * self.half_span_mhz / (self.bins as f64 - 1.0)
    }

    /// Bin center at index `i`, in MHz.
    pub fn center_mhz(&self, i: usize) -> f64 {
        -self.half_span_mhz + self.step_mhz() * i as f64
    }

    pub fn centers_mhz(&self) -> Vec<f64> {
        (0..self.bins).map(|i| self.center_mhz(i)).collect()
    }

    /// Full grid span in MHz.
    pub fn span_mhz(&self) -> f64 {
        2.0 * self.half_span_mhz
    }

    /// Index of the bin center closest to `detuning_mhz`.
    pub fn nearest_bin(&self, detuning_mhz: f64) -> usize {
        let raw = (detuning_mhz + self.half_span_mhz) / self.step_mhz();
        (raw.round().max(0.0) as usize).min(self.bins - 1)
    }
}

/// Physical description of the storage medium.
///
/// Times are in µs, detunings in MHz, lengths in mm. The optical depth is
/// the intensity depth d of the unprepared medium at line center, so weak
/// resonant light transmits exp(−d).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSpec {
    /// Slab length (mm).
    pub length_mm: f64,
    /// Resonant intensity optical depth d of the pristine medium.
    pub optical_depth: f64,
    /// FWHM of the Gaussian inhomogeneous line (MHz).
    pub inhomogeneous_fwhm_mhz: f64,
    /// Population lifetime T₁ (µs).
    pub t1_us: f64,
    /// Coherence lifetime T₂ (µs).
    pub t2_us: f64,
    pub grid: DetuningGrid,
}

impl MediumSpec {
    /// Homogeneous linewidth, FWHM in MHz, derived from T₂.
    pub fn homogeneous_fwhm_mhz(&self) -> f64 {
        1.0 / (std::f64::consts::PI * self.t2_us)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.length_mm > 0.0) {
            return Err(ConfigError::new(
                "medium.length_mm",
                format!("must be > 0, got {}", self.length_mm),
            ));
        }
        if !(self.optical_depth >= 0.0) || !self.optical_depth.is_finite() {
            return Err(ConfigError::new(
                "medium.optical_depth",
                format!("must be finite and >= 0, got {}", self.optical_depth),
            ));
        }
        if !(self.inhomogeneous_fwhm_mhz > 0.0) {
            return Err(ConfigError::new(
                "medium.inhomogeneous_fwhm_mhz",
                format!("must be > 0, got {}", self.inhomogeneous_fwhm_mhz),
            ));
        }
        if !(self.t1_us > 0.0) {
            return Err(ConfigError::new(
                "medium.t1_us",
                format!("must be > 0, got {}", self.t1_us),
            ));
        }
        if !(self.t2_us > 0.0 && self.t2_us <= 2.0 * self.t1_us) {
            return Err(ConfigError::new(
                "medium.t2_us",
                format!(
                    "must satisfy 0 < t2 <= 2*t1, got t2 = {} with t1 = {}",
                    self.t2_us, self.t1_us
                ),
            ));
        }
        self.grid.validate()?;
        if self.grid.span_mhz() < 4.0 * self.inhomogeneous_fwhm_mhz {
            return Err(ConfigError::new(
                "grid.half_span_mhz",
                format!(
                    "grid span {} MHz must cover at least 4x the inhomogeneous FWHM ({} MHz)",
                    self.grid.span_mhz(),
                    4.0 * self.inhomogeneous_fwhm_mhz
                ),
            ));
        }
        Ok(())
    }

    /// Normalized Gaussian weight of each detuning bin (sums to 1).
    pub fn inhomogeneous_weights(&self) -> Vec<f64> {
        let sigma = self.inhomogeneous_fwhm_mhz / (8.0 * std::f64::consts::LN_2).sqrt();
        let mut w: Vec<f64> = self
            .grid
            .centers_mhz()
            .iter()
            .map(|d| (-d * d / (2.0 * sigma * sigma)).exp())
            .collect();
        let total: f64 = w.iter().sum();
        for x in &mut w {
            *x /= total;
        }
        w
    }
}

/// Population difference per detuning bin after spectral preparation.
///
/// `bins[i]` is n(Δᵢ) on the medium's detuning grid; 1 is the fully pumped
/// value, 0 an emptied bin. `density_scale` records the overall prepared
/// atom-number fraction the population was built with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralPopulation {
    pub bins: Vec<f64>,
    pub density_scale: f64,
}

impl SpectralPopulation {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.density_scale) {
            return Err(ConfigError::new(
                "population.density_scale",
                format!("must lie in [0, 1], got {}", self.density_scale),
            ));
        }
        for (i, n) in self.bins.iter().enumerate() {
            if !(-1.0..=1.0).contains(n) {
                return Err(ConfigError::new(
                    format!("population.bins[{i}]"),
                    format!("population difference must lie in [-1, 1], got {n}"),
                ));
            }
        }
        Ok(())
    }
}

/// Uniformly filled population at the given prepared density.
pub fn build_population(spec: &MediumSpec, density_scale: f64) -> Result<SpectralPopulation, ConfigError> {
    spec.validate()?;
    if !(0.0..=1.0).contains(&density_scale) {
        return Err(ConfigError::new(
            "density_scale",
            format!("must lie in [0, 1], got {density_scale}"),
        ));
    }
    Ok(SpectralPopulation {
        bins: vec![density_scale; spec.grid.bins],
        density_scale,
    })
}

/// Prepared density as a function of repump intensity and duration.
///
/// The repump Rabi oscillation leaves |sin(Ω_R·t)| of the atoms in the
/// initial state, with Ω_R = `rabi_per_sqrt_intensity`·√i_r. Result is
/// clamped to [0, 1].
pub fn repump_density(
    i_r: f64,
    t_pump_us: f64,
    rabi_per_sqrt_intensity: f64,
) -> Result<f64, ConfigError> {
    if !(i_r >= 0.0) || !i_r.is_finite() {
        return Err(ConfigError::new(
            "repump.i_r",
            format!("intensity must be finite and >= 0, got {i_r}"),
        ));
    }
    if !(t_pump_us >= 0.0) {
        return Err(ConfigError::new(
            "repump.t_pump_us",
            format!("pump duration must be >= 0, got {t_pump_us}"),
        ));
    }
    Ok((rabi_per_sqrt_intensity * i_r.sqrt() * t_pump_us).sin().abs().clamp(0.0, 1.0))
}

/// Hole profile shapes. Both have unit peak at the hole center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HoleShape {
    Lorentzian,
    Gaussian,
}

/// Spectral hole burned by the dummy pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleSpec {
    /// Hole center (MHz).
    pub center_mhz: f64,
    /// Full width at half maximum of the hole profile (MHz).
    pub width_fwhm_mhz: f64,
    /// Fractional depletion at the hole center, in [0, 1].
    pub depth: f64,
    pub shape: HoleShape,
}

impl HoleSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.center_mhz.is_finite() {
            return Err(ConfigError::new(
                "hole.center_mhz",
                format!("must be finite, got {}", self.center_mhz),
            ));
        }
        if !(self.width_fwhm_mhz > 0.0) {
            return Err(ConfigError::new(
                "hole.width_fwhm_mhz",
                format!("must be > 0, got {}", self.width_fwhm_mhz),
            ));
        }
        if !(0.0..=1.0).contains(&self.depth) {
            return Err(ConfigError::new(
                "hole.depth",
                format!("must lie in [0, 1], got {}", self.depth),
            ));
        }
        Ok(())
    }

    /// Unit-peak hole profile S(Δ).
    pub fn profile(&self, detuning_mhz: f64) -> f64 {
        let x = detuning_mhz - self.center_mhz;
        match self.shape {
            HoleShape::Lorentzian => {
                let hw = self.width_fwhm_mhz / 2.0;
                hw * hw / (x * x + hw * hw)
            }
            HoleShape::Gaussian => {
                (-4.0 * std::f64::consts::LN_2 * (x / self.width_fwhm_mhz).powi(2)).exp()
            }
        }
    }
}

/// Deplete the population with a hole: n'(Δ) = n(Δ)·(1 − depth·S(Δ)).
pub fn burn_hole(
    pop: &SpectralPopulation,
    grid: &DetuningGrid,
    hole: &HoleSpec,
) -> Result<SpectralPopulation, ConfigError> {
    hole.validate()?;
    grid.validate()?;
    if hole.center_mhz.abs() > grid.half_span_mhz {
        return Err(ConfigError::new(
            "hole.center_mhz",
            format!(
                "hole center {} MHz lies outside the detuning grid (+-{} MHz)",
                hole.center_mhz, grid.half_span_mhz
            ),
        ));
    }
    if pop.bins.len() != grid.bins {
        return Err(ConfigError::new(
            "population.bins",
            format!(
                "population has {} bins but grid has {}",
                pop.bins.len(),
                grid.bins
            ),
        ));
    }
    let bins = pop
        .bins
        .iter()
        .enumerate()
        .map(|(i, n)| n * (1.0 - hole.depth * hole.profile(grid.center_mhz(i))))
        .collect();
    Ok(SpectralPopulation {
        bins,
        density_scale: pop.density_scale,
    })
}

/// Complex susceptibility of the prepared medium on the detuning grid.
///
/// By convention Im χ(Δ) is exactly the intensity absorption coefficient
/// α(Δ) in 1/mm, and Re χ is its Kramers-Kronig partner, so the group delay
/// through a slab of length l is (l/2)·d(Re χ)/dω with ω = 2π·Δ.
#[derive(Debug, Clone)]
pub struct Susceptibility {
    /// Bin centers (MHz), same layout as the medium grid.
    pub detuning_mhz: Vec<f64>,
    /// χ(Δ) with Im χ = α in 1/mm.
    pub chi: Vec<Complex64>,
    /// Set when the absorption has not decayed at the grid edges, i.e. the
    /// truncated Hilbert-transform tails are untrustworthy.
    pub tail_warning: Option<String>,
}

/// Homogeneous Lorentzian averaged over one grid bin.
///
/// L̄(x) = (1/h)·∫ over [x−h/2, x+h/2] of the unit-area Lorentzian with HWHM
/// `a`. Pointwise evaluation would under- or over-sample a line narrower
/// than the bin spacing; the bin average keeps the convolution below smooth
/// and unit-normalized for any ratio a/h, so a detuning class contributes
/// the same integrated absorption however finely the grid resolves it.
fn bin_averaged_lorentzian(x: f64, a: f64, h: f64) -> f64 {
    (((x + 0.5 * h) / a).atan() - ((x - 0.5 * h) / a).atan()) / (std::f64::consts::PI * h)
}

/// Anchor constant α₀ in 1/mm: the pristine medium (n ≡ 1) then satisfies
/// α(0)·length = optical_depth exactly. The field-polarization coupling in
/// the propagator is −α₀, which reproduces this same attenuation for pulses.
pub fn absorption_prefactor(spec: &MediumSpec) -> f64 {
    let weights = spec.inhomogeneous_weights();
    let centers = spec.grid.centers_mhz();
    let a = spec.homogeneous_fwhm_mhz() / 2.0;
    let h = spec.grid.step_mhz();
    let pristine_center: f64 = centers
        .iter()
        .zip(weights.iter())
        .map(|(&c, &g)| g * bin_averaged_lorentzian(-c, a, h))
        .sum();
    if pristine_center > 0.0 {
        spec.optical_depth / (spec.length_mm * pristine_center)
    } else {
        0.0
    }
}

/// Intensity absorption spectrum α(Δ) in 1/mm on the medium grid.
///
/// α(Δ) = α₀ · Σ_b g_b·n_b·L̄(Δ − Δ_b), the population-weighted inhomogeneous
/// distribution convolved with the bin-averaged homogeneous Lorentzian, with
/// α₀ solved so the pristine medium has α(0)·length = optical_depth exactly.
pub fn absorption_spectrum(pop: &SpectralPopulation, spec: &MediumSpec) -> Result<Vec<f64>, ConfigError> {
    if pop.bins.len() != spec.grid.bins {
        return Err(ConfigError::new(
            "population.bins",
            format!(
                "population has {} bins but grid has {}",
                pop.bins.len(),
                spec.grid.bins
            ),
        ));
    }
    let weights = spec.inhomogeneous_weights();
    let centers = spec.grid.centers_mhz();
    let a = spec.homogeneous_fwhm_mhz() / 2.0;
    let h = spec.grid.step_mhz();
    let alpha0 = absorption_prefactor(spec);

    Ok(centers
        .iter()
        .map(|&probe| {
            let acc: f64 = (0..centers.len())
                .map(|b| weights[b] * pop.bins[b] * bin_averaged_lorentzian(probe - centers[b], a, h))
                .sum();
            alpha0 * acc
        })
        .collect())
}

/// Discrete Hilbert transform on a uniform grid.
///
/// The principal value at the evaluation bin is handled by the odd-symmetric
/// midpoint rule: equidistant source pairs cancel, the skipped singular cell
/// contributes its local slope term h·f'(x).
fn hilbert_transform(step: f64, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let inv_pi = 1.0 / std::f64::consts::PI;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            if j != i {
                acc += f[j] / (j as f64 - i as f64);
            }
        }
        // Centered local slope, one-sided at the grid ends. The step h
        // cancels between the slope and the cell width.
        let local = match i {
            0 => f[1] - f[0],
            _ if i == n - 1 => f[n - 1] - f[n - 2],
            _ => 0.5 * (f[i + 1] - f[i - 1]),
        };
        out[i] = inv_pi * (acc + local);
        let _ = step; // kernel is scale invariant on a uniform grid
    }
    out
}

/// χ(Δ) of the prepared medium: Im χ = α(Δ), Re χ = H[Im χ].
pub fn susceptibility(pop: &SpectralPopulation, spec: &MediumSpec) -> Result<Susceptibility, ConfigError> {
    let alpha = absorption_spectrum(pop, spec)?;
    let re = hilbert_transform(spec.grid.step_mhz(), &alpha);
    let peak = alpha.iter().cloned().fold(0.0f64, f64::max);
    let edge = alpha[0].max(alpha[alpha.len() - 1]);
    let tail_warning = if peak > 0.0 && edge > 1e-3 * peak {
        Some(format!(
            "absorption at the grid edge is {:.2e} of the peak; Kramers-Kronig tails are truncated, widen the detuning grid",
            edge / peak
        ))
    } else {
        None
    };
    Ok(Susceptibility {
        detuning_mhz: spec.grid.centers_mhz(),
        chi: re
            .iter()
            .zip(alpha.iter())
            .map(|(&r, &a)| Complex64::new(r, a))
            .collect(),
        tail_warning,
    })
}

/// Group delay (µs) relative to vacuum for a probe at `probe_mhz`.
///
/// Evaluated from the Kramers-Kronig dispersion as (l/2)·d(Re χ)/dω with a
/// centered difference at the bin nearest the probe. Positive inside a
/// burned transparency window; zero for an empty medium.
pub fn group_delay(
    pop: &SpectralPopulation,
    spec: &MediumSpec,
    probe_mhz: f64,
) -> Result<f64, DetectionError> {
    let sus = susceptibility(pop, spec).map_err(|e| DetectionError::Domain(e.to_string()))?;
    group_delay_of(&sus, spec, probe_mhz)
}

/// Same as [`group_delay`] but reusing an already computed susceptibility.
pub fn group_delay_of(
    sus: &Susceptibility,
    spec: &MediumSpec,
    probe_mhz: f64,
) -> Result<f64, DetectionError> {
    let grid = &spec.grid;
    if probe_mhz.abs() > grid.half_span_mhz {
        return Err(DetectionError::Domain(format!(
            "probe at {probe_mhz} MHz lies outside the detuning grid (±{} MHz)",
            grid.half_span_mhz
        )));
    }
    let i = grid.nearest_bin(probe_mhz);
    if i == 0 || i == grid.bins - 1 {
        return Err(DetectionError::Domain(format!(
            "probe at {probe_mhz} MHz sits on the grid edge; the dispersion slope needs interior bins"
        )));
    }
    let slope_per_mhz = (sus.chi[i + 1].re - sus.chi[i - 1].re) / (2.0 * grid.step_mhz());
    Ok(0.5 * spec.length_mm * slope_per_mhz / TAU)
}
