//! Bundled run configurations for the echo experiments the simulator is
//! built around: the conventional/slow-light echo comparison, the group-delay
//! efficiency sweep, and the coherence and population lifetime scans.
//!
//! Each bundle fixes a medium, a pulse train with its spectral preparation,
//! and a numerical grid sized so the run resolves the fastest precession,
//! keeps the detuning-comb recurrence past the end of the trace, and finishes
//! in seconds. Hole depth and width are calibration knobs tuned for the
//! transparency and dispersion they produce, not measured quantities.

use std::collections::BTreeMap;

use crate::analysis::SweepSpec;
use crate::error::ConfigError;
use crate::medium::{
    build_population, burn_hole, DetuningGrid, HoleShape, HoleSpec, MediumSpec,
    SpectralPopulation,
};
use crate::propagation::SimulationGrid;
use crate::sequence::{PulseShape, PulseSpec, PulseStrength, SequenceSpec, TimeWindow};

/// Names accepted by [`setup`], in listing order.
pub const PRESET_NAMES: [&str; 5] = [
    "fig2_conventional",
    "fig2_slowlight",
    "fig3a_sweep_point",
    "fig4a_twopulse",
    "fig4b_threepulse",
];

/// Everything needed to run one bundled experiment.
#[derive(Debug, Clone)]
pub struct RunSetup {
    pub name: &'static str,
    pub description: &'static str,
    pub medium: MediumSpec,
    pub sequence: SequenceSpec,
    pub grid: SimulationGrid,
    /// Density scan attached to sweep-style presets.
    pub sweep: Option<SweepSpec>,
}

/// Builds the spectral population a sequence runs against: the repumped
/// background scaled by `density_scale`, with the hole burned in when the
/// sequence carries one.
pub fn population_for(
    sequence: &SequenceSpec,
    medium: &MediumSpec,
) -> Result<SpectralPopulation, ConfigError> {
    let pop = build_population(medium, sequence.density_scale)?;
    match &sequence.hole {
        Some(hole) => burn_hole(&pop, &medium.grid, hole),
        None => Ok(pop),
    }
}

fn gaussian(label: &str, start_us: f64, duration_us: f64, area_rad: f64) -> PulseSpec {
    PulseSpec {
        label: label.into(),
        start_us,
        duration_us,
        shape: PulseShape::Gaussian,
        strength: PulseStrength::AreaRad(area_rad),
        phase_rad: 0.0,
        detuning_mhz: 0.0,
    }
}

fn windows(pairs: &[(&str, f64, f64)]) -> BTreeMap<String, TimeWindow> {
    pairs
        .iter()
        .map(|(name, t0, t1)| {
            (
                name.to_string(),
                TimeWindow {
                    t0_us: *t0,
                    t1_us: *t1,
                },
            )
        })
        .collect()
}

const PI: f64 = std::f64::consts::PI;

/// Medium for the echo-enhancement comparison: an optically deep line with
/// room for a several-MHz hole.
fn fig2_medium() -> MediumSpec {
    MediumSpec {
        length_mm: 5.0,
        optical_depth: 20.0,
        inhomogeneous_fwhm_mhz: 8.0,
        t1_us: 164.0,
        t2_us: 111.0,
        grid: DetuningGrid {
            half_span_mhz: 16.0,
            bins: 441,
        },
    }
}

/// Data/read pair with the echo expected at twice the read delay.
fn fig2_sequence() -> SequenceSpec {
    SequenceSpec {
        pulses: vec![
            gaussian("data", 0.0, 1.5, PI / 2.0),
            gaussian("read", 4.6, 2.3, PI),
        ],
        windows: windows(&[("data", 0.0, 4.0), ("echo1", 9.0, 13.0)]),
        ..Default::default()
    }
}

fn fig2_grid() -> SimulationGrid {
    SimulationGrid {
        n_z: 48,
        dt_us: 3e-3,
        t_end_us: 13.0,
        record_stride: 25,
    }
}

fn fig2_hole() -> HoleSpec {
    HoleSpec {
        center_mhz: 0.0,
        width_fwhm_mhz: 4.0,
        depth: 0.93,
        shape: HoleShape::Gaussian,
    }
}

fn fig3_medium() -> MediumSpec {
    MediumSpec {
        length_mm: 5.0,
        optical_depth: 20.0,
        inhomogeneous_fwhm_mhz: 6.0,
        t1_us: 164.0,
        t2_us: 111.0,
        grid: DetuningGrid {
            half_span_mhz: 12.0,
            bins: 769,
        },
    }
}

/// Narrow hole for a microsecond-scale group delay; the long pulses keep the
/// probe spectrum inside the transparency window.
fn fig3_hole() -> HoleSpec {
    HoleSpec {
        center_mhz: 0.0,
        width_fwhm_mhz: 1.2,
        depth: 0.97,
        shape: HoleShape::Lorentzian,
    }
}

fn fig3_sequence() -> SequenceSpec {
    SequenceSpec {
        pulses: vec![
            gaussian("data", 2.0, 10.0, PI / 2.0),
            gaussian("read", 13.0, 10.0, PI),
        ],
        hole: Some(fig3_hole()),
        windows: windows(&[("data", 0.0, 13.0), ("echo1", 26.0, 32.0)]),
        ..Default::default()
    }
}

fn fig3_grid() -> SimulationGrid {
    SimulationGrid {
        n_z: 48,
        dt_us: 4e-3,
        t_end_us: 32.0,
        record_stride: 10,
    }
}

fn fig4a_setup() -> RunSetup {
    RunSetup {
        name: "fig4a_twopulse",
        description: "two-pulse echo in a thin line, base point of the coherence-time scan",
        medium: MediumSpec {
            length_mm: 5.0,
            optical_depth: 1.0,
            inhomogeneous_fwhm_mhz: 2.0,
            t1_us: 164.0,
            t2_us: 25.0,
            grid: DetuningGrid {
                half_span_mhz: 4.0,
                bins: 129,
            },
        },
        sequence: SequenceSpec {
            pulses: vec![
                gaussian("data", 0.0, 1.5, PI / 2.0),
                gaussian("read", 4.6, 2.3, PI),
            ],
            windows: windows(&[("data", 0.0, 3.5), ("echo1", 9.0, 12.5)]),
            ..Default::default()
        },
        grid: SimulationGrid {
            n_z: 16,
            dt_us: 8e-3,
            t_end_us: 13.0,
            record_stride: 5,
        },
        sweep: None,
    }
}

fn fig4b_setup() -> RunSetup {
    RunSetup {
        name: "fig4b_threepulse",
        description: "stimulated echo with split rephasing pulses, base point of the lifetime scan",
        medium: MediumSpec {
            length_mm: 5.0,
            optical_depth: 1.0,
            inhomogeneous_fwhm_mhz: 1.5,
            t1_us: 164.0,
            t2_us: 111.0,
            grid: DetuningGrid {
                half_span_mhz: 3.0,
                bins: 321,
            },
        },
        sequence: SequenceSpec {
            pulses: vec![
                gaussian("data", 0.0, 1.5, PI / 2.0),
                gaussian("write", 9.6, 2.3, PI / 2.0),
                gaussian("read", 29.6, 2.3, PI / 2.0),
            ],
            windows: windows(&[("data", 0.0, 3.5), ("echo1", 38.0, 43.5)]),
            ..Default::default()
        },
        grid: SimulationGrid {
            n_z: 16,
            dt_us: 1e-2,
            t_end_us: 44.0,
            record_stride: 4,
        },
        sweep: None,
    }
}

/// Looks up a bundled experiment by name.
pub fn setup(name: &str) -> Result<RunSetup, ConfigError> {
    match name {
        "fig2_conventional" => Ok(RunSetup {
            name: "fig2_conventional",
            description: "echo from the bare repumped line, no transparency window",
            medium: fig2_medium(),
            sequence: SequenceSpec {
                density_scale: 0.006,
                ..fig2_sequence()
            },
            grid: fig2_grid(),
            sweep: None,
        }),
        "fig2_slowlight" => Ok(RunSetup {
            name: "fig2_slowlight",
            description: "same pulse pair through a burned hole at full background density",
            medium: fig2_medium(),
            sequence: SequenceSpec {
                hole: Some(fig2_hole()),
                density_scale: 1.0,
                ..fig2_sequence()
            },
            grid: fig2_grid(),
            sweep: None,
        }),
        "fig3a_sweep_point" => Ok(RunSetup {
            name: "fig3a_sweep_point",
            description: "long-pulse echo inside a narrow hole; sweeps background density to scan group delay",
            medium: fig3_medium(),
            sequence: fig3_sequence(),
            grid: fig3_grid(),
            sweep: Some(SweepSpec {
                n_points: 5,
                density_lo: 0.35,
                density_hi: 1.0,
                hole: Some(fig3_hole()),
            }),
        }),
        "fig4a_twopulse" => Ok(fig4a_setup()),
        "fig4b_threepulse" => Ok(fig4b_setup()),
        _ => Err(ConfigError::new(
            "preset",
            format!(
                "unknown preset {name:?}; valid presets: {}",
                PRESET_NAMES.join(", ")
            ),
        )),
    }
}
