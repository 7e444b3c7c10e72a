//! On-disk run configuration and its resolution against bundled presets.

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use echosim_core::analysis::{DetectionSettings, SweepSpec};
use echosim_core::error::ConfigError;
use echosim_core::medium::MediumSpec;
use echosim_core::presets;
use echosim_core::propagation::SimulationGrid;
use echosim_core::sequence::SequenceSpec;

/// Requested artifact files, all optional. Relative paths land in the
/// directory given by `--out` when present, otherwise in the working
/// directory.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    /// Transmitted field trace (t_us, re_env, im_env, intensity).
    pub trace_csv: Option<PathBuf>,
    /// Echo report plus the predicted group delay.
    pub report_json: Option<PathBuf>,
    /// Prepared-medium susceptibility (detuning_MHz, alpha_per_mm, re_chi, im_chi).
    pub spectra_csv: Option<PathBuf>,
}

impl OutputPaths {
    fn requested(&self) -> impl Iterator<Item = &PathBuf> {
        [&self.trace_csv, &self.report_json, &self.spectra_csv]
            .into_iter()
            .flatten()
    }
}

/// A run description as stored in a JSON config file.
///
/// Exactly one of `sequence` and `preset` must be given. A preset brings its
/// own medium, simulation grid and (for sweep presets) density scan; any of
/// those given here override the preset's. An inline `sequence` requires
/// explicit `medium` and `simulation`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub medium: Option<MediumSpec>,
    pub sequence: Option<SequenceSpec>,
    pub preset: Option<String>,
    pub simulation: Option<SimulationGrid>,
    pub outputs: OutputPaths,
    /// When true, parallel commands must produce byte-identical artifacts at
    /// any thread count. The engine only uses fixed-order reductions, so this
    /// is recorded in reports rather than switching algorithms.
    pub deterministic_reduction: bool,
    /// Density scan for the `sweep` command. The scan's density and hole
    /// replace the sequence's own static preparation at every point.
    pub sweep: Option<SweepSpec>,
    /// Echo detection knobs; defaults apply when omitted.
    pub settings: Option<DetectionSettings>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            medium: None,
            sequence: None,
            preset: None,
            simulation: None,
            outputs: OutputPaths::default(),
            deterministic_reduction: true,
            sweep: None,
            settings: None,
        }
    }
}

/// A fully resolved run: preset defaults merged in, every part present.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    /// Preset name or the config file stem, for summaries and reports.
    pub label: String,
    pub medium: MediumSpec,
    pub sequence: SequenceSpec,
    pub grid: SimulationGrid,
    pub outputs: OutputPaths,
    pub deterministic_reduction: bool,
    pub sweep: Option<SweepSpec>,
    pub settings: DetectionSettings,
}

impl RunConfig {
    /// Merges the config with an optional `--preset` flag and checks the
    /// config-level invariants. Physics validation happens later, against the
    /// assembled population.
    pub fn resolve(self, preset_flag: Option<&str>, label: &str) -> Result<ResolvedRun, ConfigError> {
        let preset_name = match (preset_flag, &self.preset) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::new(
                    "preset",
                    "given both in the config file and on the command line",
                ));
            }
            (flag, field) => flag.map(str::to_owned).or_else(|| field.clone()),
        };

        let (label, medium, sequence, grid, sweep) = match (preset_name, self.sequence) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::new(
                    "sequence",
                    "exactly one of `sequence` and `preset` must be given, got both",
                ));
            }
            (None, None) => {
                return Err(ConfigError::new(
                    "sequence",
                    "exactly one of `sequence` and `preset` must be given, got neither",
                ));
            }
            (Some(name), None) => {
                let setup = presets::setup(&name)?;
                (
                    name,
                    self.medium.unwrap_or(setup.medium),
                    setup.sequence,
                    self.simulation.unwrap_or(setup.grid),
                    self.sweep.or(setup.sweep),
                )
            }
            (None, Some(sequence)) => {
                let medium = self.medium.ok_or_else(|| {
                    ConfigError::new("medium", "required when `sequence` is given inline")
                })?;
                let grid = self.simulation.ok_or_else(|| {
                    ConfigError::new("simulation", "required when `sequence` is given inline")
                })?;
                (label.to_owned(), medium, sequence, grid, self.sweep)
            }
        };

        let mut seen = BTreeSet::new();
        for path in self.outputs.requested() {
            if !seen.insert(path) {
                return Err(ConfigError::new(
                    "outputs",
                    format!("output paths must be distinct, {} is repeated", path.display()),
                ));
            }
        }

        Ok(ResolvedRun {
            label,
            medium,
            sequence,
            grid,
            outputs: self.outputs,
            deterministic_reduction: self.deterministic_reduction,
            sweep,
            settings: self.settings.unwrap_or_default(),
        })
    }
}
