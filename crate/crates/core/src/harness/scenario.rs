use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{receive_training, sample_links, LinkParams, TrainingSlot};
use crate::detectors::{
    naive_energy_decide, naive_energy_statistic, scheme1a_decide, scheme1a_statistics, scheme1b_decide_ratio,
    scheme1b_matrix, scheme1b_statistic, scheme2_beamformer, scheme2_decide, scheme2_degenerate, scheme2_lu_observe,
    DetectionResult, DetectorId, Thresholds,
};
use crate::error::{Error, Result};
use crate::numerics::{PskAlphabet, RngStream};

/// Which training slots the ED transmits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AttackPattern {
    None,
    /// Every slot the detector observes.
    All,
    /// The last `k` slots only.
    Subset(usize),
}

impl AttackPattern {
    pub fn active(&self, slot: usize, total: usize) -> bool {
        match *self {
            AttackPattern::None => false,
            AttackPattern::All => true,
            AttackPattern::Subset(k) => slot + k >= total,
        }
    }
}

impl fmt::Display for AttackPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackPattern::None => f.write_str("none"),
            AttackPattern::All => f.write_str("all"),
            AttackPattern::Subset(k) => write!(f, "subset:{k}"),
        }
    }
}

impl FromStr for AttackPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(AttackPattern::None),
            "all" | "both" => Ok(AttackPattern::All),
            "one" => Ok(AttackPattern::Subset(1)),
            other => other
                .strip_prefix("subset:")
                .and_then(|k| k.parse().ok())
                .map(AttackPattern::Subset)
                .ok_or_else(|| Error::invalid(format!("unknown attack pattern '{s}'"))),
        }
    }
}

impl TryFrom<String> for AttackPattern {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AttackPattern> for String {
    fn from(a: AttackPattern) -> String {
        a.to_string()
    }
}

/// Link geometry plus the random-pilot settings shared by all detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionScenario {
    pub link: LinkParams,
    /// Slot count L for the eigenvalue test.
    pub slots: usize,
    pub psk_order: usize,
    /// Multiplier on the true n0 giving the BS's noise estimate.
    pub n0_bias: f64,
}

impl DetectionScenario {
    pub fn new(link: LinkParams, slots: usize, psk_order: usize) -> Self {
        Self {
            link,
            slots,
            psk_order,
            n0_bias: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        PskAlphabet::new(self.psk_order)?;
        if !(2..=crate::numerics::hermitian::MAX_ORDER).contains(&self.slots) {
            return Err(Error::invalid("slot count must lie in 2..=8"));
        }
        if !(self.n0_bias >= 0.0) {
            return Err(Error::invalid("n0_bias must be >= 0"));
        }
        Ok(())
    }

    pub fn slots_for(&self, detector: DetectorId) -> usize {
        match detector {
            DetectorId::Scheme1b => self.slots,
            other => other.default_slots(),
        }
    }

    pub fn alphabet(&self) -> PskAlphabet {
        PskAlphabet::new(self.psk_order).expect("validated psk order")
    }

    fn n0_estimate(&self) -> f64 {
        self.link.n0 * self.n0_bias
    }
}

/// Raw per-trial statistic, before thresholds are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialStatistic {
    /// ‖y‖²/M.
    Naive(f64),
    Scheme1a {
        z_phase: f64,
        q_ratio: f64,
    },
    /// λ₁/λ₂.
    Scheme1b(f64),
    /// LU observation; `None` when the beamformer was degenerate.
    Scheme2(Option<f64>),
}

fn draw_slots(
    scenario: &DetectionScenario,
    count: usize,
    attack: AttackPattern,
    rng: &mut RngStream,
) -> Result<(crate::numerics::ComplexVector, Vec<TrainingSlot>)> {
    let alphabet = scenario.alphabet();
    let (g_lu, g_ed) = sample_links(&scenario.link, rng)?;
    let mut slots = Vec::with_capacity(count);
    for i in 0..count {
        let p = alphabet.sample(rng);
        let q = attack.active(i, count).then(|| alphabet.sample(rng));
        slots.push(receive_training(&g_lu, &g_ed, &scenario.link, p, q, rng)?);
    }
    Ok((g_lu, slots))
}

/// Simulates one coherence block and returns `detector`'s statistic. The
/// channels stay fixed across the block's training slots; pilots and noise
/// are fresh in each slot.
pub fn simulate_trial(
    detector: DetectorId,
    scenario: &DetectionScenario,
    attack: AttackPattern,
    rng: &mut RngStream,
) -> Result<TrialStatistic> {
    let link = &scenario.link;
    let count = scenario.slots_for(detector);
    let (g_lu, slots) = draw_slots(scenario, count, attack, rng)?;
    Ok(match detector {
        DetectorId::Naive => TrialStatistic::Naive(naive_energy_statistic(&slots[0], link.m)?),
        DetectorId::Scheme1a => {
            let (z_phase, q_ratio) = scheme1a_statistics(&slots[0], &slots[1])?;
            TrialStatistic::Scheme1a { z_phase, q_ratio }
        }
        DetectorId::Scheme1b => {
            let r = scheme1b_matrix(&slots, scenario.n0_estimate(), link.m)?;
            TrialStatistic::Scheme1b(scheme1b_statistic(&r)?)
        }
        DetectorId::Scheme2 => {
            let mut bs_view = *link;
            bs_view.n0 = scenario.n0_estimate();
            let beam = scheme2_beamformer(&slots[0], &bs_view)?;
            if beam.degenerate {
                TrialStatistic::Scheme2(None)
            } else {
                // LU noise power equals the BS's.
                let r = scheme2_lu_observe(&g_lu, &beam.weights, link.m, link.n0, rng)?;
                TrialStatistic::Scheme2(Some(r))
            }
        }
    })
}

pub fn decide(stat: &TrialStatistic, scenario: &DetectionScenario, th: &Thresholds) -> Result<DetectionResult> {
    Ok(match *stat {
        TrialStatistic::Naive(e) => naive_energy_decide(e, scenario.link.h0_energy(), th.energy_cap)?,
        TrialStatistic::Scheme1a { z_phase, q_ratio } => scheme1a_decide(z_phase, q_ratio, &scenario.alphabet(), th),
        TrialStatistic::Scheme1b(ratio) => scheme1b_decide_ratio(ratio, th),
        TrialStatistic::Scheme2(Some(r)) => scheme2_decide(r, th),
        TrialStatistic::Scheme2(None) => scheme2_degenerate(),
    })
}
