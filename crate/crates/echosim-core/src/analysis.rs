//! Echo detection, retrieval efficiencies, exponential decay fits, and the
//! group-delay sweep.
//!
//! Everything here operates on recorded [`FieldTrace`]s and named time
//! windows; nothing feeds back into the propagation. Efficiencies are energy
//! ratios against the input data pulse, so they are invariant under a global
//! rescaling of the drive. Decay fits are log-linear least squares, which is
//! exact for the noiseless traces the simulator produces.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DetectionError, FitError, SweepError};
use crate::medium::{build_population, burn_hole, group_delay, HoleSpec, MediumSpec};
use crate::propagation::{propagate, FieldTrace, SimulationGrid};
use crate::sequence::{SequenceSpec, TimeWindow};

/// Knobs for peak detection on output traces.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectionSettings {
    /// A window counts as holding an echo only if its peak intensity exceeds
    /// this fraction of the input peak intensity. The simulator is noiseless
    /// but rect pulses ring, so zero is not a safe floor.
    pub noise_floor_rel: f64,
}

impl Default for DetectionSettings {
    fn default() -> Self {
        Self {
            noise_floor_rel: 1e-4,
        }
    }
}

/// One detected emission inside a named window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EchoPeak {
    pub window: String,
    /// Arrival time of the intensity maximum (µs, global time).
    pub t_peak_us: f64,
    /// Σ|Ω|²·dt over the whole window.
    pub energy: f64,
}

/// Echo bookkeeping for one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EchoReport {
    /// Detected echoes in time order. Windows whose peak stays below the
    /// noise floor are simply absent.
    pub echoes: Vec<EchoPeak>,
    /// Input energy of the data pulse, the denominator of the efficiencies.
    pub data_energy_ref: f64,
    /// Energy in the earliest echo window over `data_energy_ref`.
    pub efficiency_first: f64,
    /// Energy summed over all detected echo windows over `data_energy_ref`.
    pub efficiency_cumulative: f64,
    /// Total output energy over total input energy.
    pub transmission_total: f64,
}

/// Scans the named windows of an output trace for echoes and assembles the
/// energy ratios.
///
/// The window named `data` is special: it marks the data pulse, whose input
/// energy is the reference for both efficiencies. Every other window is
/// treated as a candidate echo window. A window with no sample above the
/// noise floor is reported empty rather than failing, since scanning past
/// the last echo is routine.
pub fn detect_echoes(
    input: &FieldTrace,
    output: &FieldTrace,
    windows: &BTreeMap<String, TimeWindow>,
    settings: &DetectionSettings,
) -> Result<EchoReport, DetectionError> {
    let mut ordered: Vec<(&str, &TimeWindow)> =
        windows.iter().map(|(n, w)| (n.as_str(), w)).collect();
    ordered.sort_by(|a, b| a.1.t0_us.total_cmp(&b.1.t0_us));
    for pair in ordered.windows(2) {
        let (first_name, first) = pair[0];
        let (second_name, second) = pair[1];
        if second.t0_us < first.t1_us {
            return Err(DetectionError::Domain(format!(
                "windows {first_name:?} and {second_name:?} overlap"
            )));
        }
    }

    let data = windows.get("data").ok_or_else(|| {
        DetectionError::Domain(
            "no window named \"data\"; the efficiency reference needs one".into(),
        )
    })?;
    let data_energy_ref = input.energy_in(data);

    let input_peak = input
        .samples
        .iter()
        .map(|s| s.norm_sqr())
        .fold(0.0f64, f64::max);
    let floor = settings.noise_floor_rel * input_peak;

    let mut echoes = Vec::new();
    let mut first_window_energy = None;
    for (name, window) in &ordered {
        if *name == "data" {
            continue;
        }
        let peak = match output.peak_in(window) {
            Ok(p) => p,
            Err(DetectionError::NoPulse { .. }) => continue,
            Err(e) => return Err(e),
        };
        if peak.1 <= floor {
            if first_window_energy.is_none() {
                first_window_energy = Some(0.0);
            }
            continue;
        }
        let energy = output.energy_in(window);
        if first_window_energy.is_none() {
            first_window_energy = Some(energy);
        }
        echoes.push(EchoPeak {
            window: (*name).to_string(),
            t_peak_us: peak.0,
            energy,
        });
    }

    let cumulative = echoes.iter().fold(0.0, |acc, e| acc + e.energy);
    let (efficiency_first, efficiency_cumulative) = if data_energy_ref > 0.0 {
        (
            first_window_energy.unwrap_or(0.0) / data_energy_ref,
            cumulative / data_energy_ref,
        )
    } else {
        (0.0, 0.0)
    };
    let total_in = input.total_energy();
    let transmission_total = if total_in > 0.0 {
        output.total_energy() / total_in
    } else {
        0.0
    };

    Ok(EchoReport {
        echoes,
        data_energy_ref,
        efficiency_first,
        efficiency_cumulative,
        transmission_total,
    })
}

/// One sample of an echo decay curve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecayPoint {
    /// Pulse delay being scanned (µs).
    pub t_us: f64,
    /// Echo intensity at that delay.
    pub intensity: f64,
}

/// Exponential decay recovered from a delay scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    /// Extrapolated intensity at zero delay.
    pub i0: f64,
    /// Decay time (µs).
    pub tau_us: f64,
    /// RMS residual of log-intensity about the fitted line.
    pub rms_residual: f64,
    /// Points actually used after dropping nonpositive intensities.
    pub n_points: usize,
}

/// Straight-line least squares, kept public because the acceptance checks
/// regress log-efficiency against group delay with it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub rms_residual: f64,
    pub n_points: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit, FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::Degenerate(format!(
            "mismatched columns: {} x values vs {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(FitError::TooFewPoints {
            needed: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx <= 0.0 {
        return Err(FitError::Degenerate("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        ss_res += r * r;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        rms_residual: (ss_res / n).sqrt(),
        n_points: xs.len(),
    })
}

/// Fits I(t) = I₀·exp(−k·t/τ) by least squares on log-intensity and returns
/// τ with the factor k divided back out.
///
/// Nonpositive intensities carry no information in log space; they are
/// dropped with a warning. At least four usable points are required, and the
/// fitted line must actually decay, otherwise τ would come out infinite or
/// negative.
pub fn fit_decay(points: &[DecayPoint], exponent_factor: f64) -> Result<FitResult, FitError> {
    if !(exponent_factor.is_finite() && exponent_factor > 0.0) {
        return Err(FitError::Degenerate(format!(
            "exponent factor must be positive, got {exponent_factor}"
        )));
    }
    for pair in points.windows(2) {
        if pair[1].t_us <= pair[0].t_us {
            return Err(FitError::Degenerate(
                "delays must be strictly increasing".into(),
            ));
        }
    }
    let usable: Vec<&DecayPoint> = points
        .iter()
        .filter(|p| p.intensity.is_finite() && p.intensity > 0.0)
        .collect();
    let dropped = points.len() - usable.len();
    if dropped > 0 {
        log::warn!("decay fit: dropping {dropped} nonpositive intensity points");
    }
    if usable.len() < 4 {
        return Err(FitError::TooFewPoints {
            needed: 4,
            got: usable.len(),
        });
    }
    let ts: Vec<f64> = usable.iter().map(|p| p.t_us).collect();
    let logs: Vec<f64> = usable.iter().map(|p| p.intensity.ln()).collect();
    let line = linear_fit(&ts, &logs)?;
    if line.slope >= 0.0 {
        return Err(FitError::Degenerate(
            "intensities do not decay with delay; no finite decay time".into(),
        ));
    }
    Ok(FitResult {
        i0: line.intercept.exp(),
        tau_us: -exponent_factor / line.slope,
        rms_residual: line.rms_residual,
        n_points: usable.len(),
    })
}

/// Two-pulse echo decay. `t` is the delay from data pulse to echo (twice the
/// data-read separation); the coherence is t old at emission, so the
/// intensity follows I ∝ exp(−2t/τ) and the fitted τ reads directly as T₂.
pub fn fit_two_pulse_decay(points: &[DecayPoint]) -> Result<FitResult, FitError> {
    fit_decay(points, 2.0)
}

/// Stimulated (three-pulse) echo decay against the storage interval, fitted
/// as a single exponential I ∝ exp(−t/τ) so τ reads directly as the
/// population lifetime.
pub fn fit_three_pulse_decay(points: &[DecayPoint]) -> Result<FitResult, FitError> {
    fit_decay(points, 1.0)
}

/// Scan of the background population density, which tunes the dispersion
/// contrast of the hole and with it the group delay.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub n_points: usize,
    pub density_lo: f64,
    pub density_hi: f64,
    /// Burned into the population at every point when present; the group
    /// delay is evaluated at its center.
    pub hole: Option<HoleSpec>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), crate::error::ConfigError> {
        use crate::error::ConfigError;
        if self.n_points == 0 {
            return Err(ConfigError::new("sweep.n_points", "need at least one point"));
        }
        for (field, v) in [
            ("sweep.density_lo", self.density_lo),
            ("sweep.density_hi", self.density_hi),
        ] {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(ConfigError::new(
                    field,
                    format!("density must lie in [0, 1], got {v}"),
                ));
            }
        }
        if self.density_hi < self.density_lo {
            return Err(ConfigError::new(
                "sweep.density_hi",
                "range is reversed: density_hi < density_lo",
            ));
        }
        if let Some(hole) = &self.hole {
            hole.validate()?;
        }
        Ok(())
    }

    fn densities(&self) -> Vec<f64> {
        if self.n_points == 1 {
            return vec![self.density_lo];
        }
        let step = (self.density_hi - self.density_lo) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|k| self.density_lo + step * k as f64)
            .collect()
    }
}

/// One sweep point, in ascending group-delay order.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub density: f64,
    pub group_delay_us: f64,
    pub efficiency_first: f64,
    pub efficiency_cumulative: f64,
    pub transmission_total: f64,
}

/// Runs the pulse sequence once per density point and tabulates echo
/// efficiency against the dispersive group delay.
///
/// Points run in parallel and are gathered in scan order, so the output is
/// deterministic regardless of scheduling; rows are then sorted by delay for
/// direct plotting.
pub fn sweep_delay_vs_efficiency(
    medium: &MediumSpec,
    sequence: &SequenceSpec,
    grid: &SimulationGrid,
    sweep: &SweepSpec,
    settings: &DetectionSettings,
) -> Result<Vec<SweepRow>, SweepError> {
    type PointError = Box<dyn std::error::Error + Send + Sync>;
    let at_point = |density: f64| -> Result<SweepRow, PointError> {
        let mut pop = build_population(medium, density)?;
        let mut probe_mhz = 0.0;
        if let Some(hole) = &sweep.hole {
            pop = burn_hole(&pop, &medium.grid, hole)?;
            probe_mhz = hole.center_mhz;
        }
        let delay = group_delay(&pop, medium, probe_mhz)?;
        let run = propagate(medium, &pop, sequence, grid)?;
        let report = detect_echoes(&run.input, &run.output, &sequence.windows, settings)?;
        Ok(SweepRow {
            density,
            group_delay_us: delay,
            efficiency_first: report.efficiency_first,
            efficiency_cumulative: report.efficiency_cumulative,
            transmission_total: report.transmission_total,
        })
    };

    sweep.validate().map_err(|e| SweepError {
        index: 0,
        density: sweep.density_lo,
        source: e.into(),
    })?;
    let mut rows: Vec<SweepRow> = sweep
        .densities()
        .into_par_iter()
        .enumerate()
        .map(|(index, density)| {
            at_point(density).map_err(|source| SweepError {
                index,
                density,
                source,
            })
        })
        .collect::<Result<_, _>>()?;
    rows.sort_by(|a, b| a.group_delay_us.total_cmp(&b.group_delay_us));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::DetuningGrid;
    use crate::sequence::{PulseShape, PulseSpec, PulseStrength};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use num_complex::Complex64;

    fn trace_of(samples: Vec<Complex64>, dt: f64) -> FieldTrace {
        FieldTrace {
            t_offset_us: 0.0,
            dt_us: dt,
            samples,
        }
    }

    fn gaussian_samples(center: f64, sigma: f64, amp: f64, dt: f64, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                let t = dt * k as f64;
                let x = (t - center) / sigma;
                Complex64::new(amp * (-0.5 * x * x).exp(), 0.0)
            })
            .collect()
    }

    fn windows(pairs: &[(&str, f64, f64)]) -> BTreeMap<String, TimeWindow> {
        pairs
            .iter()
            .map(|(n, t0, t1)| {
                (
                    n.to_string(),
                    TimeWindow {
                        t0_us: *t0,
                        t1_us: *t1,
                    },
                )
            })
            .collect()
    }

    #[test]
    fn zero_output_reports_no_echoes() {
        let dt = 0.01;
        let input = trace_of(gaussian_samples(1.0, 0.1, 1.0, dt, 400), dt);
        let output = trace_of(vec![Complex64::ZERO; 400], dt);
        let w = windows(&[("data", 0.0, 2.0), ("echo1", 2.0, 4.0)]);
        let report = detect_echoes(&input, &output, &w, &DetectionSettings::default()).unwrap();
        assert!(report.echoes.is_empty());
        assert_eq!(report.efficiency_first, 0.0);
        assert_eq!(report.efficiency_cumulative, 0.0);
        assert_eq!(report.transmission_total, 0.0);
        assert!(report.data_energy_ref > 0.0);
        // -0.0 passes the == checks above but would print as "-0" in CSVs
        assert!(report.efficiency_cumulative.is_sign_positive());
        let past_the_end = TimeWindow {
            t0_us: 99.0,
            t1_us: 100.0,
        };
        assert!(output.energy_in(&past_the_end).is_sign_positive());
    }

    #[test]
    fn synthetic_echo_with_half_the_reference_energy_gives_efficiency_half() {
        let dt = 0.005;
        let n = 1200;
        let input = trace_of(gaussian_samples(1.0, 0.1, 1.0, dt, n), dt);
        // same shape shifted into the echo window, amplitude 1/sqrt(2)
        let output = trace_of(
            gaussian_samples(4.0, 0.1, 0.5f64.sqrt(), dt, n),
            dt,
        );
        let w = windows(&[("data", 0.0, 2.5), ("echo1", 2.5, 6.0)]);
        let report = detect_echoes(&input, &output, &w, &DetectionSettings::default()).unwrap();
        assert_eq!(report.echoes.len(), 1);
        assert_eq!(report.echoes[0].window, "echo1");
        assert_abs_diff_eq!(report.echoes[0].t_peak_us, 4.0, epsilon = dt);
        assert_relative_eq!(report.efficiency_first, 0.5, max_relative = 1e-6);
        assert_relative_eq!(
            report.efficiency_cumulative,
            report.efficiency_first,
            max_relative = 1e-12
        );
    }

    #[test]
    fn efficiencies_are_invariant_under_global_rescaling() {
        let dt = 0.005;
        let n = 1200;
        let input = trace_of(gaussian_samples(1.0, 0.12, 0.8, dt, n), dt);
        let mut echo = gaussian_samples(4.0, 0.2, 0.3, dt, n);
        for (k, s) in gaussian_samples(1.05, 0.12, 0.55, dt, n).iter().enumerate() {
            echo[k] += s;
        }
        let output = trace_of(echo, dt);
        let w = windows(&[("data", 0.0, 2.5), ("echo1", 2.5, 6.0)]);
        let settings = DetectionSettings::default();
        let base = detect_echoes(&input, &output, &w, &settings).unwrap();

        let scale = 7.3;
        let input2 = trace_of(input.samples.iter().map(|s| s * scale).collect(), dt);
        let output2 = trace_of(output.samples.iter().map(|s| s * scale).collect(), dt);
        let scaled = detect_echoes(&input2, &output2, &w, &settings).unwrap();
        assert_relative_eq!(
            scaled.efficiency_first,
            base.efficiency_first,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            scaled.efficiency_cumulative,
            base.efficiency_cumulative,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            scaled.transmission_total,
            base.transmission_total,
            max_relative = 1e-12
        );
    }

    #[test]
    fn window_energies_tile_the_total_energy() {
        let dt = 0.01;
        let n = 1000;
        let mut samples = gaussian_samples(2.0, 0.3, 0.9, dt, n);
        for (k, s) in gaussian_samples(7.0, 0.5, 0.4, dt, n).iter().enumerate() {
            samples[k] += s;
        }
        let trace = trace_of(samples, dt);
        let parts = [
            TimeWindow { t0_us: 0.0, t1_us: 3.0 },
            TimeWindow { t0_us: 3.0, t1_us: 6.5 },
            TimeWindow { t0_us: 6.5, t1_us: 10.0 },
        ];
        let sum: f64 = parts.iter().map(|w| trace.energy_in(w)).sum();
        assert_relative_eq!(sum, trace.total_energy(), max_relative = 1e-9);
    }

    #[test]
    fn overlapping_windows_are_rejected() {
        let dt = 0.01;
        let input = trace_of(gaussian_samples(1.0, 0.1, 1.0, dt, 400), dt);
        let w = windows(&[("data", 0.0, 2.0), ("echo1", 1.5, 4.0)]);
        match detect_echoes(&input, &input, &w, &DetectionSettings::default()) {
            Err(DetectionError::Domain(msg)) => assert!(msg.contains("overlap")),
            other => panic!("expected overlap rejection, got {other:?}"),
        }
    }

    fn synthetic_decay(i0: f64, tau: f64, factor: f64, ts: &[f64]) -> Vec<DecayPoint> {
        ts.iter()
            .map(|&t| DecayPoint {
                t_us: t,
                intensity: i0 * (-factor * t / tau).exp(),
            })
            .collect()
    }

    #[test]
    fn two_pulse_fit_recovers_the_coherence_time() {
        let ts: Vec<f64> = (1..=8).map(|k| 5.0 * k as f64).collect();
        for tau in [25.0, 111.0] {
            let fit = fit_two_pulse_decay(&synthetic_decay(3.7, tau, 2.0, &ts)).unwrap();
            assert_relative_eq!(fit.tau_us, tau, max_relative = 1e-6);
            assert_relative_eq!(fit.i0, 3.7, max_relative = 1e-6);
            assert_eq!(fit.n_points, 8);
            assert!(fit.rms_residual < 1e-9);
        }
    }

    #[test]
    fn three_pulse_fit_recovers_the_population_lifetime() {
        let ts: Vec<f64> = (1..=6).map(|k| 20.0 * k as f64).collect();
        for tau in [158.0, 164.0] {
            let fit = fit_three_pulse_decay(&synthetic_decay(0.9, tau, 1.0, &ts)).unwrap();
            assert_relative_eq!(fit.tau_us, tau, max_relative = 1e-6);
        }
    }

    #[test]
    fn decay_fit_is_exact_across_four_decades_of_tau() {
        let ts: Vec<f64> = (1..=10).map(|k| 0.3 * k as f64).collect();
        for tau in [1.0, 10.0, 100.0, 1e4] {
            let fit = fit_decay(&synthetic_decay(1.0, tau, 2.0, &ts), 2.0).unwrap();
            assert_relative_eq!(fit.tau_us, tau, max_relative = 1e-9);
        }
    }

    #[test]
    fn nonpositive_intensities_are_dropped_not_fatal() {
        let ts: Vec<f64> = (1..=6).map(|k| 4.0 * k as f64).collect();
        let mut points = synthetic_decay(1.0, 30.0, 2.0, &ts);
        points[1].intensity = 0.0;
        points[4].intensity = -1e-9;
        let fit = fit_two_pulse_decay(&points).unwrap();
        assert_eq!(fit.n_points, 4);
        assert_relative_eq!(fit.tau_us, 30.0, max_relative = 1e-9);

        points[0].intensity = 0.0;
        match fit_two_pulse_decay(&points) {
            Err(FitError::TooFewPoints { needed: 4, got: 3 }) => {}
            other => panic!("expected too-few-points, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_decay_inputs_are_rejected() {
        let flat: Vec<DecayPoint> = (1..=5)
            .map(|k| DecayPoint {
                t_us: k as f64,
                intensity: 0.25,
            })
            .collect();
        assert!(matches!(
            fit_two_pulse_decay(&flat),
            Err(FitError::Degenerate(_))
        ));

        let two = &flat[..2];
        assert!(matches!(
            fit_two_pulse_decay(two),
            Err(FitError::TooFewPoints { .. })
        ));

        let mut shuffled = synthetic_decay(1.0, 20.0, 2.0, &[1.0, 2.0, 3.0, 4.0, 5.0]);
        shuffled.swap(1, 3);
        assert!(matches!(
            fit_two_pulse_decay(&shuffled),
            Err(FitError::Degenerate(_))
        ));

        let growing = synthetic_decay(1.0, -15.0, 2.0, &[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(matches!(
            fit_decay(&growing, 2.0),
            Err(FitError::Degenerate(_))
        ));
    }

    #[test]
    fn linear_fit_matches_a_known_line() {
        let xs: Vec<f64> = (0..6).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);

        let bent: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let bent_fit = linear_fit(&xs, &bent).unwrap();
        assert!(bent_fit.r_squared < 1.0);
        assert!(bent_fit.rms_residual > 0.0);
    }

    #[test]
    fn single_point_sweep_of_an_empty_medium_is_inert() {
        let medium = MediumSpec {
            length_mm: 5.0,
            optical_depth: 1.0,
            inhomogeneous_fwhm_mhz: 1.0,
            t1_us: 164.0,
            t2_us: 111.0,
            grid: DetuningGrid {
                half_span_mhz: 4.0,
                bins: 65,
            },
        };
        let sequence = SequenceSpec {
            pulses: vec![PulseSpec {
                label: "data".into(),
                start_us: 0.2,
                duration_us: 1.0,
                shape: PulseShape::Gaussian,
                strength: PulseStrength::AreaRad(1e-3),
                phase_rad: 0.0,
                detuning_mhz: 0.0,
            }],
            windows: windows(&[("data", 0.0, 1.6), ("echo1", 1.6, 3.0)]),
            ..Default::default()
        };
        let grid = SimulationGrid {
            n_z: 4,
            dt_us: 5e-3,
            t_end_us: 3.0,
            record_stride: 1,
        };
        let sweep = SweepSpec {
            n_points: 1,
            density_lo: 0.0,
            density_hi: 0.0,
            hole: None,
        };
        let rows = sweep_delay_vs_efficiency(
            &medium,
            &sequence,
            &grid,
            &sweep,
            &DetectionSettings::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert_abs_diff_eq!(rows[0].group_delay_us, 0.0, epsilon = 1e-12);
        assert_eq!(rows[0].efficiency_first, 0.0);
        assert_relative_eq!(rows[0].transmission_total, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn sweep_errors_carry_the_point_coordinates() {
        let sweep = SweepSpec {
            n_points: 3,
            density_lo: 0.2,
            density_hi: 0.9,
            hole: Some(HoleSpec {
                center_mhz: 0.0,
                width_fwhm_mhz: -1.0,
                depth: 0.9,
                shape: crate::medium::HoleShape::Lorentzian,
            }),
        };
        assert!(sweep.validate().is_err());
    }
}
