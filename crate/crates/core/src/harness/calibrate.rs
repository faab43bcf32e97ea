use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{decide, simulate_trial, AttackPattern, DetectionScenario, TrialStatistic};
use super::CurvePoint;
use crate::detectors::{DetectorId, Thresholds};
use crate::error::{Error, Result};
use crate::numerics::{nearest_psk_phase_distance, RngStream};
use crate::stats::{quantile, Estimate};

/// Minimum null-hypothesis trials for a calibration run.
pub const MIN_CALIBRATION_TRIALS: usize = 1_000;

const DEGENERATE_SPREAD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSpec {
    pub detector: DetectorId,
    pub target_pfa: f64,
    pub trials: usize,
    pub scenario: DetectionScenario,
}

impl CalibrationSpec {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if !(self.target_pfa > 0.0 && self.target_pfa < 1.0) {
            return Err(Error::invalid("target false-alarm probability must lie in (0, 1)"));
        }
        if self.trials < MIN_CALIBRATION_TRIALS {
            return Err(Error::invalid(format!(
                "calibration needs at least {MIN_CALIBRATION_TRIALS} trials, got {}",
                self.trials
            )));
        }
        if (self.trials as f64) * self.target_pfa < 10.0 {
            return Err(Error::invalid(format!(
                "{} trials give fewer than 10 exceedances at pfa {}",
                self.trials, self.target_pfa
            )));
        }
        Ok(())
    }
}

/// Per-trial statistics of `detector` in `trials` independent trials.
pub fn h0_statistics(
    detector: DetectorId,
    scenario: &DetectionScenario,
    attack: AttackPattern,
    trials: usize,
    rng: &RngStream,
) -> Result<Vec<TrialStatistic>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| simulate_trial(detector, scenario, attack, &mut rng.child(t)))
        .collect()
}

/// Places `spec.detector`'s thresholds at the empirical null quantiles that
/// give `spec.target_pfa`. The composite two-slot test spends half the budget
/// on the phase test and a quarter on each tail of the energy ratio. The
/// other detectors' fields keep their defaults.
pub fn calibrate(spec: &CalibrationSpec, rng: &RngStream) -> Result<Thresholds> {
    spec.validate()?;
    let stats = h0_statistics(spec.detector, &spec.scenario, AttackPattern::None, spec.trials, rng)?;
    let pfa = spec.target_pfa;
    let mut th = Thresholds::default();
    match spec.detector {
        DetectorId::Naive => {
            let e0 = spec.scenario.link.h0_energy();
            let ratios: Vec<f64> = stats
                .iter()
                .map(|s| match s {
                    TrialStatistic::Naive(e) => e / e0,
                    _ => unreachable!(),
                })
                .collect();
            th.energy_cap = quantile(&ratios, 1.0 - pfa);
        }
        DetectorId::Scheme1a => {
            let alphabet = spec.scenario.alphabet();
            let (dist, q): (Vec<f64>, Vec<f64>) = stats
                .iter()
                .map(|s| match *s {
                    TrialStatistic::Scheme1a { z_phase, q_ratio } => {
                        (nearest_psk_phase_distance(z_phase, &alphabet), q_ratio)
                    }
                    _ => unreachable!(),
                })
                .unzip();
            th.phase_delta = quantile(&dist, 1.0 - pfa / 2.0);
            th.gamma1 = quantile(&q, pfa / 4.0);
            th.gamma2 = quantile(&q, 1.0 - pfa / 4.0);
            // Noiseless nulls sit on the grid and at unit ratio up to rounding.
            if !(th.phase_delta > DEGENERATE_SPREAD)
                || !(th.gamma1 < 1.0 - DEGENERATE_SPREAD)
                || !(th.gamma2 > 1.0 + DEGENERATE_SPREAD)
            {
                return Err(Error::CalibrationInfeasible(format!(
                    "null statistics are degenerate (phase_delta {}, gamma {}..{})",
                    th.phase_delta, th.gamma1, th.gamma2
                )));
            }
        }
        DetectorId::Scheme1b => {
            let ratios: Vec<f64> = stats
                .iter()
                .map(|s| match s {
                    TrialStatistic::Scheme1b(r) => *r,
                    _ => unreachable!(),
                })
                .collect();
            th.eig_ratio = quantile(&ratios, pfa);
        }
        DetectorId::Scheme2 => {
            let obs: Vec<f64> = stats
                .iter()
                .map(|s| match s {
                    TrialStatistic::Scheme2(r) => r.unwrap_or(f64::NEG_INFINITY),
                    _ => unreachable!(),
                })
                .collect();
            let degenerate = obs.iter().filter(|r| r.is_infinite()).count() as f64 / obs.len() as f64;
            if degenerate >= pfa {
                return Err(Error::CalibrationInfeasible(format!(
                    "cooperative beamformer degenerate in {:.2}% of null trials, above the {:.2}% target",
                    100.0 * degenerate,
                    100.0 * pfa
                )));
            }
            th.coop_floor = quantile(&obs, pfa);
            if !(th.coop_floor < 1.0) {
                return Err(Error::CalibrationInfeasible(format!(
                    "null observation quantile {} is not below the agreed value",
                    th.coop_floor
                )));
            }
        }
    }
    Ok(th)
}

/// Fraction of trials in which `detector` declares the ED present, with a
/// Wilson interval. `x` of the returned point is the scenario's SNR in dB.
pub fn detection_probability(
    detector: DetectorId,
    thresholds: &Thresholds,
    scenario: &DetectionScenario,
    attack: AttackPattern,
    trials: usize,
    rng: &RngStream,
) -> Result<CurvePoint> {
    if trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    scenario.validate()?;
    let hits = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let stat = simulate_trial(detector, scenario, attack, &mut rng.child(t))?;
            Ok(decide(&stat, scenario, thresholds)?.decision.is_present() as usize)
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum();
    Ok(CurvePoint::new(
        scenario.link.snr_db(),
        Estimate::wilson(hits, trials),
        detector.as_str(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::LinkParams;
    use crate::stats::median;

    fn scenario(m: usize) -> DetectionScenario {
        DetectionScenario::new(
            LinkParams {
                m,
                p_lu: 10.0,
                p_ed: 10.0,
                ..Default::default()
            },
            4,
            4,
        )
    }

    fn spec(detector: DetectorId, pfa: f64, trials: usize) -> CalibrationSpec {
        CalibrationSpec {
            detector,
            target_pfa: pfa,
            trials,
            scenario: scenario(32),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(spec(DetectorId::Naive, 0.01, 999).validate().is_err());
        assert!(spec(DetectorId::Naive, 0.001, 5_000).validate().is_err());
        assert!(spec(DetectorId::Naive, 0.0, 5_000).validate().is_err());
        assert!(spec(DetectorId::Naive, 0.01, 1_000).validate().is_ok());
        let rng = RngStream::new(1, 0);
        assert!(matches!(
            calibrate(&spec(DetectorId::Naive, 0.01, 10), &rng),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn half_pfa_is_median() {
        let rng = RngStream::new(2, 0);
        let s = spec(DetectorId::Scheme1b, 0.5, 2_000);
        let th = calibrate(&s, &rng).unwrap();
        let stats = h0_statistics(DetectorId::Scheme1b, &s.scenario, AttackPattern::None, 2_000, &rng).unwrap();
        let ratios: Vec<f64> = stats
            .iter()
            .map(|s| match s {
                TrialStatistic::Scheme1b(r) => *r,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(th.eig_ratio, median(&ratios));

        let s = spec(DetectorId::Naive, 0.5, 2_000);
        let th = calibrate(&s, &rng).unwrap();
        // ‖y‖²/(M(βP+N0)) ~ Gamma(M, 1/M): median close to 1
        assert!((th.energy_cap - 1.0).abs() < 0.03, "{}", th.energy_cap);
    }

    #[test]
    fn noiseless_phase_calibration_is_infeasible() {
        let mut s = spec(DetectorId::Scheme1a, 0.01, 1_000);
        s.scenario.link.n0 = 0.0;
        assert!(matches!(
            calibrate(&s, &RngStream::new(3, 0)),
            Err(Error::CalibrationInfeasible(_))
        ));
    }

    #[test]
    fn degenerate_cooperative_calibration_is_infeasible() {
        let mut s = spec(DetectorId::Scheme2, 0.01, 2_000);
        s.scenario.link.p_lu = 0.01; // -20 dB
        assert!(matches!(
            calibrate(&s, &RngStream::new(4, 0)),
            Err(Error::CalibrationInfeasible(_))
        ));
    }

    #[test]
    fn null_pattern_detects_at_target_rate() {
        let rng = RngStream::new(5, 0);
        let s = spec(DetectorId::Scheme2, 0.05, 4_000);
        let th = calibrate(&s, &rng.child(0)).unwrap();
        let p = detection_probability(
            DetectorId::Scheme2,
            &th,
            &s.scenario,
            AttackPattern::None,
            4_000,
            &rng.child(1),
        )
        .unwrap();
        assert!((p.estimate - 0.05).abs() < 0.015, "{}", p.estimate);
        assert_eq!(p.x, 10.0);
        assert!(p.ci_low <= p.estimate && p.estimate <= p.ci_high);
    }
}
