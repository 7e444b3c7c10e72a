//! One-way field propagation through the discretized medium.
//!
//! Space is split into n_z cells with field nodes on the cell edges; the
//! co-moving frame removes the vacuum transit, so within one time step the
//! field at every node follows from the boundary drive and the running sum
//! of cell polarizations:
//!
//!   Ω₀ = drive(t),   Ω_{j+1} = Ω_j + i·κ·dz·P_j,
//!
//! with P_j the population-weighted coherence of cell j and κ the
//! field-polarization coupling, calibrated once per run so that a weak
//! resonant pulse through the pristine medium attenuates by exactly exp(−d).
//! Each cell is driven by the mean of its edge nodes, which makes the
//! steady transfer of a cell the Padé(1,1) approximant of its exponential
//! attenuation; the calibration inverts that approximant, so no residual of
//! the cell discretization survives at line center. Atoms advance with one
//! RK4 step per time step; across the step the polarization is linearly
//! extrapolated from its last two values, keeping the re-radiated field free
//! of the broadband staircase noise a zero-order hold would add.
//!
//! Work is parallelized over cells. Every per-cell reduction is an ordered
//! sequential sum and the node sweep is a single prefix pass, so results are
//! identical at any thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{step_rk4, BlochVector, DriveSample, Rates};
use crate::error::{ConfigError, DetectionError, PropagationError, RunError};
use crate::medium::{absorption_prefactor, MediumSpec, SpectralPopulation};
use crate::sequence::{SequenceSpec, TimeWindow};
use crate::{C_MM_PER_US, TAU};

/// Space-time discretization of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationGrid {
    /// Number of spatial cells across the medium.
    pub n_z: usize,
    /// Time step (µs).
    pub dt_us: f64,
    /// End of the simulated interval (µs), starting from 0.
    pub t_end_us: f64,
    /// Keep every k-th time sample in the recorded traces.
    pub record_stride: usize,
}

impl SimulationGrid {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_z == 0 {
            return Err(ConfigError::new("simulation.n_z", "need at least one cell"));
        }
        if !(self.dt_us > 0.0) || !self.dt_us.is_finite() {
            return Err(ConfigError::new(
                "simulation.dt_us",
                format!("must be finite and > 0, got {}", self.dt_us),
            ));
        }
        if !(self.t_end_us >= self.dt_us) || !self.t_end_us.is_finite() {
            return Err(ConfigError::new(
                "simulation.t_end_us",
                format!("must be finite and >= dt, got {}", self.t_end_us),
            ));
        }
        if self.record_stride == 0 {
            return Err(ConfigError::new(
                "simulation.record_stride",
                "must be at least 1",
            ));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end_us / self.dt_us - 1e-9).ceil() as usize
    }
}

/// Complex field envelope sampled on a uniform time grid.
///
/// Sample k sits at `t_offset_us + k·dt_us`; the offset carries the vacuum
/// transit to the recording plane, so traces taken at the input and output
/// faces share one global clock.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTrace {
    pub t_offset_us: f64,
    pub dt_us: f64,
    pub samples: Vec<Complex64>,
}

impl FieldTrace {
    pub fn time_at(&self, k: usize) -> f64 {
        self.t_offset_us + self.dt_us * k as f64
    }

    pub fn intensity(&self, k: usize) -> f64 {
        self.samples[k].norm_sqr()
    }

    /// Σ|Ω|²·dt over samples inside the window (global time).
    pub fn energy_in(&self, window: &TimeWindow) -> f64 {
        self.samples
            .iter()
            .enumerate()
            .filter(|(k, _)| window.contains(self.time_at(*k)))
            .fold(0.0, |acc, (_, s)| acc + s.norm_sqr() * self.dt_us)
    }

    pub fn total_energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr() * self.dt_us).sum()
    }

    /// Intensity-weighted mean arrival time within the window.
    pub fn centroid_us(&self, window: &TimeWindow) -> Result<f64, DetectionError> {
        let mut weight = 0.0;
        let mut moment = 0.0;
        for (k, s) in self.samples.iter().enumerate() {
            let t = self.time_at(k);
            if window.contains(t) {
                let i = s.norm_sqr();
                weight += i;
                moment += i * t;
            }
        }
        if weight <= 0.0 {
            return Err(DetectionError::NoPulse {
                t0_us: window.t0_us,
                t1_us: window.t1_us,
            });
        }
        Ok(moment / weight)
    }

    /// Time and intensity of the strongest sample within the window.
    pub fn peak_in(&self, window: &TimeWindow) -> Result<(f64, f64), DetectionError> {
        let mut best: Option<(f64, f64)> = None;
        for (k, s) in self.samples.iter().enumerate() {
            let t = self.time_at(k);
            if window.contains(t) {
                let i = s.norm_sqr();
                if best.map_or(true, |(_, bi)| i > bi) {
                    best = Some((t, i));
                }
            }
        }
        best.ok_or(DetectionError::NoPulse {
            t0_us: window.t0_us,
            t1_us: window.t1_us,
        })
    }
}

/// Bloch vectors of every detuning class in every cell.
#[derive(Debug, Clone)]
pub struct BlochField {
    /// cells[j][b]: cell j along z, detuning bin b.
    pub cells: Vec<Vec<BlochVector>>,
}

impl BlochField {
    pub fn ground(n_z: usize, bins: usize) -> BlochField {
        BlochField {
            cells: vec![vec![BlochVector::GROUND; bins]; n_z],
        }
    }
}

/// Population-weighted macroscopic coherence of one cell.
pub fn macroscopic_polarization(
    cell: &[BlochVector],
    weights: &[f64],
) -> Result<Complex64, ConfigError> {
    if cell.len() != weights.len() {
        return Err(ConfigError::new(
            "population.bins",
            format!(
                "cell has {} detuning classes but {} weights were supplied",
                cell.len(),
                weights.len()
            ),
        ));
    }
    let mut acc = Complex64::ZERO;
    for (b, w) in cell.iter().zip(weights.iter()) {
        acc += w * b.coherence();
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    /// Boundary drive as recorded at the input face.
    pub input: FieldTrace,
    /// Field at the output face; its offset is the vacuum transit.
    pub output: FieldTrace,
    /// Atomic state at t_end.
    pub final_state: BlochField,
}

/// Field-polarization coupling κ (per mm) for a run with `n_z` cells.
///
/// A weak resonant pulse sees a per-cell field attenuation of d/(4·n_z) on
/// each edge-node average, which the cell chain turns into the Padé(1,1)
/// transfer ((1−y)/(1+y))^n_z. Solving ((1−y)/(1+y))^n_z = e^(−d/2) for the
/// coupling gives the tanh correction below; with it the pristine medium
/// transmits exactly exp(−d) at line center however coarse the cell grid.
pub fn coupling_constant(medium: &MediumSpec, n_z: usize) -> f64 {
    let x = medium.optical_depth / (4.0 * n_z as f64);
    let correction = if x > 0.0 { x.tanh() / x } else { 1.0 };
    -absorption_prefactor(medium) * correction
}

/// Full cross-validation of a run configuration without executing it: the
/// per-part checks plus the couplings between them (time step against
/// the fastest precession, grid span against pulse bandwidth, windows and
/// pulses against the simulated interval).
pub fn validate_run(
    medium: &MediumSpec,
    pop: &SpectralPopulation,
    seq: &SequenceSpec,
    grid: &SimulationGrid,
) -> Result<(), ConfigError> {
    medium.validate()?;
    pop.validate()?;
    if pop.bins.len() != medium.grid.bins {
        return Err(ConfigError::new(
            "population.bins",
            format!(
                "population has {} bins but the medium grid has {}",
                pop.bins.len(),
                medium.grid.bins
            ),
        ));
    }
    seq.validate()?;
    grid.validate()?;

    // One RK4 step must stay well inside a precession period of the fastest
    // class; beyond ~0.35 rad/step the phase error stops being negligible.
    let omega_max = seq.max_rabi() + TAU * medium.grid.half_span_mhz;
    if grid.dt_us * omega_max > 0.35 {
        return Err(ConfigError::new(
            "simulation.dt_us",
            format!(
                "dt = {} us gives {:.2} rad per step at the fastest precession ({:.1} rad/us); lower dt below {:.2e} us",
                grid.dt_us,
                grid.dt_us * omega_max,
                omega_max,
                0.35 / omega_max
            ),
        ));
    }

    let min_dur = seq.min_duration_us();
    if medium.grid.span_mhz() < 4.0 / min_dur {
        return Err(ConfigError::new(
            "medium.grid.half_span_mhz",
            format!(
                "grid span {} MHz cannot hold the spectrum of a {} us pulse; need at least {} MHz",
                medium.grid.span_mhz(),
                min_dur,
                4.0 / min_dur
            ),
        ));
    }

    if seq.last_pulse_end_us() > grid.t_end_us {
        return Err(ConfigError::new(
            "simulation.t_end_us",
            format!(
                "pulses extend to {} us but the run ends at {} us",
                seq.last_pulse_end_us(),
                grid.t_end_us
            ),
        ));
    }
    for (name, w) in &seq.windows {
        if w.t1_us > grid.t_end_us + grid.dt_us {
            return Err(ConfigError::new(
                format!("windows.{name}"),
                format!(
                    "window ends at {} us but the run ends at {} us",
                    w.t1_us, grid.t_end_us
                ),
            ));
        }
    }
    Ok(())
}

/// Run the full medium response to the pulse train.
pub fn propagate(
    medium: &MediumSpec,
    pop: &SpectralPopulation,
    seq: &SequenceSpec,
    grid: &SimulationGrid,
) -> Result<PropagationResult, RunError> {
    validate_run(medium, pop, seq, grid)?;

    let bins = medium.grid.bins;
    let dz = medium.length_mm / grid.n_z as f64;
    let rates = Rates::from_lifetimes(medium.t1_us, medium.t2_us);
    let detunings: Vec<f64> = medium
        .grid
        .centers_mhz()
        .iter()
        .map(|&d| TAU * d)
        .collect();
    let weights: Vec<f64> = medium
        .inhomogeneous_weights()
        .iter()
        .zip(pop.bins.iter())
        .map(|(g, n)| g * n)
        .collect();
    let coupling = Complex64::new(0.0, coupling_constant(medium, grid.n_z) * dz);

    let mut state = BlochField::ground(grid.n_z, bins);
    let n_steps = grid.n_steps();
    let n_samples = n_steps / grid.record_stride + 1;
    let mut input = FieldTrace {
        t_offset_us: 0.0,
        dt_us: grid.dt_us * grid.record_stride as f64,
        samples: Vec::with_capacity(n_samples),
    };
    let mut output = FieldTrace {
        t_offset_us: medium.length_mm / C_MM_PER_US,
        dt_us: input.dt_us,
        samples: Vec::with_capacity(n_samples),
    };

    // reused per step: cell polarizations and their node prefix sums, for
    // the current value and the backward-difference slope
    let mut pol: Vec<Complex64> = vec![Complex64::ZERO; grid.n_z];
    let mut prev_pol: Vec<Complex64> = vec![Complex64::ZERO; grid.n_z];
    let mut node_pol: Vec<Complex64> = vec![Complex64::ZERO; grid.n_z + 1];
    let mut node_slope: Vec<Complex64> = vec![Complex64::ZERO; grid.n_z + 1];

    for step in 0..=n_steps {
        let t = grid.dt_us * step as f64;

        state
            .cells
            .par_iter()
            .map(|cell| macroscopic_polarization(cell, &weights).expect("cell layout is fixed"))
            .collect_into_vec(&mut pol);

        node_pol[0] = Complex64::ZERO;
        node_slope[0] = Complex64::ZERO;
        let slope_scale = if step == 0 { 0.0 } else { 1.0 / grid.dt_us };
        for j in 0..grid.n_z {
            node_pol[j + 1] = node_pol[j] + coupling * pol[j];
            node_slope[j + 1] =
                node_slope[j] + coupling * (pol[j] - prev_pol[j]) * slope_scale;
        }

        let boundary_now = seq.envelope_at(t);
        if step % grid.record_stride == 0 {
            let out_node = boundary_now + node_pol[grid.n_z];
            if !out_node.re.is_finite() || !out_node.im.is_finite() {
                let cell = state
                    .cells
                    .iter()
                    .position(|c| c.iter().any(|b| !b.is_finite()))
                    .unwrap_or(grid.n_z);
                return Err(PropagationError::NonFinite { step, t_us: t, cell }.into());
            }
            input.samples.push(boundary_now);
            output.samples.push(out_node);
        }

        if step == n_steps {
            break;
        }

        let boundary_mid = seq.envelope_at(t + 0.5 * grid.dt_us);
        let boundary_end = seq.envelope_at(t + grid.dt_us);
        let (node_pol_ref, node_slope_ref) = (&node_pol, &node_slope);

        state
            .cells
            .par_iter_mut()
            .enumerate()
            .for_each(|(j, cell)| {
                // drive of cell j: mean of its edge nodes, extrapolated to
                // the step midpoint and end
                let cell_pol = 0.5 * (node_pol_ref[j] + node_pol_ref[j + 1]);
                let cell_slope = 0.5 * (node_slope_ref[j] + node_slope_ref[j + 1]);
                let o0 = boundary_now + cell_pol;
                let om = boundary_mid + cell_pol + 0.5 * grid.dt_us * cell_slope;
                let o1 = boundary_end + cell_pol + grid.dt_us * cell_slope;
                for (b, atom) in cell.iter_mut().enumerate() {
                    let detuning = detunings[b];
                    let drives = [
                        DriveSample { omega: o0, detuning },
                        DriveSample { omega: om, detuning },
                        DriveSample { omega: o1, detuning },
                    ];
                    *atom = step_rk4(*atom, &drives, grid.dt_us, rates);
                }
            });

        std::mem::swap(&mut pol, &mut prev_pol);
    }

    Ok(PropagationResult {
        input,
        output,
        final_state: state,
    })
}

/// Arrival delay of the output pulse relative to vacuum transit (µs).
///
/// Both traces are cut to the same global-time window, which must contain
/// the pulse in each; the vacuum transit encoded in the trace offsets is
/// subtracted out.
pub fn measure_group_delay(
    input: &FieldTrace,
    output: &FieldTrace,
    window: &TimeWindow,
) -> Result<f64, DetectionError> {
    let c_in = input.centroid_us(window)?;
    let c_out = output.centroid_us(window)?;
    Ok(c_out - c_in - (output.t_offset_us - input.t_offset_us))
}
