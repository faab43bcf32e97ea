use serde::{Deserialize, Serialize};

use super::calibrate::{calibrate, detection_probability, CalibrationSpec};
use super::scenario::{AttackPattern, DetectionScenario};
use super::{tags, CurvePoint};
use crate::channel::LinkParams;
use crate::detectors::{DetectorId, Thresholds};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::secrecy::{ergodic_scenario, ErgodicCapacity};

pub const DEFAULT_M_GRID: [usize; 9] = [2, 4, 8, 16, 32, 64, 100, 200, 400];

/// Capacity-versus-M sweep settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacitySweep {
    pub m_grid: Vec<usize>,
    /// Geometry; `m` is overwritten by each grid value.
    pub link: LinkParams,
    /// Downlink transmit power.
    pub p_tx: f64,
    pub trials: usize,
}

impl CapacitySweep {
    pub fn validate(&self) -> Result<()> {
        if self.m_grid.is_empty() || self.m_grid.contains(&0) {
            return Err(Error::invalid("M grid must be non-empty with entries >= 1"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        if !(self.p_tx >= 0.0 && self.p_tx.is_finite()) {
            return Err(Error::invalid("p_tx must be finite and >= 0"));
        }
        self.link.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    pub m: usize,
    pub ergodic: ErgodicCapacity,
}

impl CapacityPoint {
    pub fn curve(&self) -> [CurvePoint; 3] {
        let x = self.m as f64;
        [
            CurvePoint::new(x, self.ergodic.c_lu, "c_lu"),
            CurvePoint::new(x, self.ergodic.c_ed, "c_ed"),
            CurvePoint::new(x, self.ergodic.c_sc, "c_sc"),
        ]
    }
}

fn sweep(
    cfg: &CapacitySweep,
    tag: u64,
    attack: bool,
    perfect_csi: bool,
    rng: &RngStream,
) -> Result<Vec<CapacityPoint>> {
    cfg.validate()?;
    cfg.m_grid
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let link = LinkParams { m, ..cfg.link };
            let ergodic = ergodic_scenario(
                &link,
                cfg.p_tx,
                attack,
                perfect_csi,
                cfg.trials,
                &rng.descend(&[tag, i as u64]),
            )?;
            Ok(CapacityPoint { m, ergodic })
        })
        .collect()
}

/// Passive ED, perfect CSI at the BS.
pub fn run_fig1(cfg: &CapacitySweep, rng: &RngStream) -> Result<Vec<CapacityPoint>> {
    sweep(cfg, tags::FIG1, false, true, rng)
}

/// ED contaminates the single training slot; the BS beamforms along its LS
/// estimate.
pub fn run_fig2(cfg: &CapacitySweep, rng: &RngStream) -> Result<Vec<CapacityPoint>> {
    sweep(cfg, tags::FIG2, true, false, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Config {
    pub m: usize,
    pub psk_order: usize,
    pub snr_grid_db: Vec<f64>,
    /// Trials for each calibration and for each detection point.
    pub trials: usize,
    pub target_pfa: f64,
    pub beta: f64,
    pub n0: f64,
    /// p_ed / p_lu.
    pub ed_power_ratio: f64,
    /// Slot count of the eigenvalue test.
    pub slots_1b: usize,
    pub detectors: Vec<DetectorId>,
}

impl Default for Fig4Config {
    fn default() -> Self {
        Self {
            m: 200,
            psk_order: 4,
            snr_grid_db: (0..16).map(|k| -10.0 + 2.0 * k as f64).collect(),
            trials: 10_000,
            target_pfa: 0.01,
            beta: 1.0,
            n0: 1.0,
            ed_power_ratio: 1.0,
            slots_1b: 4,
            detectors: vec![DetectorId::Scheme1a, DetectorId::Scheme1b, DetectorId::Scheme2],
        }
    }
}

impl Fig4Config {
    /// Scenario at `snr_db`, with SNR = p_lu·β/n0.
    pub fn scenario(&self, snr_db: f64) -> DetectionScenario {
        let p_lu = 10f64.powf(snr_db / 10.0) * self.n0 / self.beta;
        let link = LinkParams {
            beta_lu: self.beta,
            beta_ed: self.beta,
            p_lu,
            p_ed: p_lu * self.ed_power_ratio,
            n0: self.n0,
            m: self.m,
            rho: 0.0,
        };
        DetectionScenario::new(link, self.slots_1b, self.psk_order)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Point {
    pub snr_db: f64,
    pub detector: DetectorId,
    pub thresholds: Thresholds,
    pub detection: CurvePoint,
    /// Set when calibration was infeasible and a fallback threshold was used.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Result {
    pub points: Vec<Fig4Point>,
}

impl Fig4Result {
    pub fn curve(&self) -> Vec<CurvePoint> {
        self.points.iter().map(|p| p.detection.clone()).collect()
    }

    pub fn point(&self, detector: DetectorId, snr_db: f64) -> Option<&Fig4Point> {
        self.points
            .iter()
            .find(|p| p.detector == detector && p.snr_db == snr_db)
    }
}

/// Calibrates every detector at every SNR to the target false-alarm rate,
/// then measures its detection probability with the ED active in all slots.
///
/// When the cooperative beamformer degenerates in more null trials than the
/// false-alarm budget allows, its floor is dropped to `f64::MIN`, so only the
/// degenerate trials raise the alarm, and the point carries a note.
pub fn run_fig4(cfg: &Fig4Config, rng: &RngStream) -> Result<Fig4Result> {
    if cfg.snr_grid_db.is_empty() || cfg.detectors.is_empty() {
        return Err(Error::invalid("fig4 needs a non-empty SNR grid and detector list"));
    }
    if cfg.snr_grid_db.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("SNR grid entries must be finite"));
    }
    let mut points = Vec::with_capacity(cfg.snr_grid_db.len() * cfg.detectors.len());
    for (i, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let scenario = cfg.scenario(snr_db);
        for &detector in &cfg.detectors {
            let base = rng.descend(&[tags::FIG4, i as u64, detector as u64]);
            let spec = CalibrationSpec {
                detector,
                target_pfa: cfg.target_pfa,
                trials: cfg.trials,
                scenario,
            };
            let (thresholds, note) = match calibrate(&spec, &base.child(0)) {
                Ok(th) => (th, None),
                Err(Error::CalibrationInfeasible(msg)) if detector == DetectorId::Scheme2 => (
                    Thresholds {
                        coop_floor: f64::MIN,
                        ..Thresholds::default()
                    },
                    Some(msg),
                ),
                Err(e) => return Err(e),
            };
            let mut detection = detection_probability(
                detector,
                &thresholds,
                &scenario,
                AttackPattern::All,
                cfg.trials,
                &base.child(1),
            )?;
            detection.x = snr_db;
            points.push(Fig4Point {
                snr_db,
                detector,
                thresholds,
                detection,
                note,
            });
        }
    }
    Ok(Fig4Result { points })
}
