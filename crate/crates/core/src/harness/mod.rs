//! Threshold calibration, detection-probability estimation and the figure
//! sweeps.
//!
//! Every Monte-Carlo trial draws from its own [`RngStream`] child, indexed by
//! (experiment, point, ..., trial), and per-trial results are reduced in
//! trial order, so outputs do not depend on the worker count.
//!
//! [`RngStream`]: crate::numerics::RngStream

mod calibrate;
mod experiments;
pub mod output;
mod ramp;
mod scenario;

use serde::{Deserialize, Serialize};

pub use calibrate::{calibrate, detection_probability, h0_statistics, CalibrationSpec};
pub use experiments::{
    run_fig1, run_fig2, run_fig4, CapacityPoint, CapacitySweep, Fig4Config, Fig4Point, Fig4Result, DEFAULT_M_GRID,
};
pub use ramp::{ramp_detection, run_ramping_demo, RampConfig, RampResult, RampSchedule};
pub use scenario::{decide, simulate_trial, AttackPattern, DetectionScenario, TrialStatistic};

use crate::stats::Estimate;

/// Stream tags separating the experiments' random streams.
pub(crate) mod tags {
    pub const FIG1: u64 = 1;
    pub const FIG2: u64 = 2;
    pub const FIG4: u64 = 4;
    pub const CALIBRATE: u64 = 10;
    pub const DETECT: u64 = 11;
    pub const RAMP: u64 = 12;
}

/// One point of an experiment curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// SNR in dB, antenna count, or interval index depending on the sweep.
    pub x: f64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub series: String,
}

impl CurvePoint {
    pub fn new(x: f64, est: Estimate, series: impl Into<String>) -> Self {
        Self {
            x,
            estimate: est.mean,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            series: series.into(),
        }
    }

    pub fn as_estimate(&self) -> Estimate {
        Estimate {
            mean: self.estimate,
            ci_low: self.ci_low,
            ci_high: self.ci_high,
        }
    }
}
