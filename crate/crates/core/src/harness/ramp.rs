use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::calibrate::{calibrate, detection_probability, CalibrationSpec};
use super::scenario::{AttackPattern, DetectionScenario};
use super::{tags, CurvePoint};
use crate::channel::{receive_training, sample_links, LinkParams};
use crate::detectors::{naive_energy_statistic, DetectorId, Thresholds};
use crate::error::{Error, Result};
use crate::numerics::{PskAlphabet, RngStream};
use crate::stats::Estimate;

/// Geometric ED power ramp, in multiples of the LU pilot power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampSchedule {
    pub start_power: f64,
    pub growth_per_interval: f64,
    pub intervals: usize,
}

impl Default for RampSchedule {
    fn default() -> Self {
        Self {
            start_power: 0.1,
            growth_per_interval: 1.05,
            intervals: 96,
        }
    }
}

impl RampSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.start_power > 0.0 && self.start_power.is_finite()) {
            return Err(Error::invalid("ramp start_power must be > 0"));
        }
        if !(self.growth_per_interval > 1.0 && self.growth_per_interval.is_finite()) {
            return Err(Error::invalid("ramp growth_per_interval must be > 1"));
        }
        if self.intervals < 2 {
            return Err(Error::invalid("ramp needs at least 2 intervals"));
        }
        Ok(())
    }

    pub fn powers(&self) -> Vec<f64> {
        (0..self.intervals)
            .map(|k| self.start_power * self.growth_per_interval.powi(k as i32))
            .collect()
    }

    pub fn final_power(&self) -> f64 {
        self.start_power * self.growth_per_interval.powi(self.intervals as i32 - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampConfig {
    /// LU geometry; `p_ed` is ignored and set from the schedule.
    pub link: LinkParams,
    pub schedule: RampSchedule,
    /// Training slots (independent small-scale fading blocks) per interval
    /// of constant large-scale fading.
    pub slots_per_interval: usize,
    /// Weight of the newest interval in the BS's running estimate of β.
    pub ema_weight: f64,
    pub target_pfa: f64,
    pub calibration_trials: usize,
    pub trials: usize,
}

impl Default for RampConfig {
    fn default() -> Self {
        Self {
            link: LinkParams {
                p_lu: 10.0,
                ..Default::default()
            },
            schedule: RampSchedule::default(),
            slots_per_interval: 10,
            ema_weight: 0.5,
            target_pfa: 0.01,
            calibration_trials: 10_000,
            trials: 1_000,
        }
    }
}

impl RampConfig {
    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        self.schedule.validate()?;
        if !(self.link.p_lu > 0.0) {
            return Err(Error::invalid("ramp needs p_lu > 0"));
        }
        if self.slots_per_interval == 0 || self.trials == 0 {
            return Err(Error::invalid("slots_per_interval and trials must be >= 1"));
        }
        if !(self.ema_weight > 0.0 && self.ema_weight <= 1.0) {
            return Err(Error::invalid("ema_weight must lie in (0, 1]"));
        }
        Ok(())
    }

    fn scenario(&self, relative_ed_power: f64) -> DetectionScenario {
        let link = LinkParams {
            p_ed: relative_ed_power * self.link.p_lu,
            ..self.link
        };
        DetectionScenario::new(link, 2, 4)
    }
}

/// Per-interval detection probability of the naive energy test when the
/// BS tracks β with an exponential moving average of the received energy.
/// Each interval first folds its own slots into the estimate, then tests
/// every slot against `energy_cap·(β̂·p_lu + n0)`. `powers` are ED pilot
/// powers relative to p_lu; zero means silent.
pub fn ramp_detection(cfg: &RampConfig, energy_cap: f64, powers: &[f64], rng: &RngStream) -> Result<Vec<Estimate>> {
    cfg.validate()?;
    if powers.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
        return Err(Error::invalid("ramp powers must be finite and >= 0"));
    }
    let alphabet = PskAlphabet::qpsk();
    let k = cfg.slots_per_interval;
    let link = cfg.link;
    let per_trial: Vec<Vec<usize>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng.child(t);
            let mut beta_hat = link.beta_lu;
            let mut hits = Vec::with_capacity(powers.len());
            let mut energies = vec![0.0; k];
            for &power in powers {
                let interval = LinkParams {
                    p_ed: power * link.p_lu,
                    ..link
                };
                for e in energies.iter_mut() {
                    let (g_lu, g_ed) = sample_links(&interval, &mut rng)?;
                    let p = alphabet.sample(&mut rng);
                    let q = (power > 0.0).then(|| alphabet.sample(&mut rng));
                    let slot = receive_training(&g_lu, &g_ed, &interval, p, q, &mut rng)?;
                    *e = naive_energy_statistic(&slot, link.m)?;
                }
                let mean = energies.iter().sum::<f64>() / k as f64;
                beta_hat = (1.0 - cfg.ema_weight) * beta_hat + cfg.ema_weight * (mean - link.n0) / link.p_lu;
                let limit = energy_cap * (beta_hat * link.p_lu + link.n0);
                hits.push(energies.iter().filter(|&&e| e > limit).count());
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;
    Ok((0..powers.len())
        .map(|i| {
            let total = per_trial.iter().map(|h| h[i]).sum();
            Estimate::wilson(total, cfg.trials * k)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampResult {
    pub energy_cap: f64,
    /// ED power per interval, relative to p_lu.
    pub powers: Vec<f64>,
    pub ramp: Vec<Estimate>,
    /// A jump straight to the final power, tested against the true β.
    pub step: Estimate,
}

impl RampResult {
    pub fn curve(&self) -> Vec<CurvePoint> {
        let mut out: Vec<CurvePoint> = self
            .ramp
            .iter()
            .enumerate()
            .map(|(i, e)| CurvePoint::new(i as f64, *e, "ramp"))
            .collect();
        out.push(CurvePoint::new((self.ramp.len() - 1) as f64, self.step, "step"));
        out
    }

    pub fn ramp_max(&self) -> f64 {
        self.ramp.iter().map(|e| e.mean).fold(0.0, f64::max)
    }
}

/// Calibrates the energy cap with β known, then runs the ramp and the step
/// attack against it.
pub fn run_ramping_demo(cfg: &RampConfig, rng: &RngStream) -> Result<RampResult> {
    cfg.validate()?;
    let spec = CalibrationSpec {
        detector: DetectorId::Naive,
        target_pfa: cfg.target_pfa,
        trials: cfg.calibration_trials,
        scenario: cfg.scenario(0.0),
    };
    let energy_cap = calibrate(&spec, &rng.descend(&[tags::RAMP, 0]))?.energy_cap;
    let powers = cfg.schedule.powers();
    let ramp = ramp_detection(cfg, energy_cap, &powers, &rng.descend(&[tags::RAMP, 1]))?;
    let th = Thresholds {
        energy_cap,
        ..Thresholds::default()
    };
    let step = detection_probability(
        DetectorId::Naive,
        &th,
        &cfg.scenario(cfg.schedule.final_power()),
        AttackPattern::All,
        cfg.trials * cfg.slots_per_interval,
        &rng.descend(&[tags::RAMP, 2]),
    )?
    .as_estimate();
    Ok(RampResult {
        energy_cap,
        powers,
        ramp,
        step,
    })
}
