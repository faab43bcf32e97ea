//! Active-eavesdropper detectors.
//!
//! Each detector is split into a pure statistic and a thresholded decision so
//! the harness can calibrate thresholds from null-hypothesis statistics.
//!
//! * naive energy test: ‖y‖²/M against a multiple of βP + N0;
//! * random-pilot two-slot test: phase of y₁ᴴy₂ against the N-PSK grid, plus
//!   the slot energy ratio ‖y₁‖²/‖y₂‖²;
//! * random-pilot eigenvalue test: λ₁/λ₂ of YᴴY/M − N0·I;
//! * cooperative test: the BS echoes a beamformed pilot that the LU should
//!   receive as 1 after 1/M scaling.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{LinkParams, TrainingSlot};
use crate::error::{Error, Result};
use crate::numerics::{
    eigenvalues_hermitian, inner_product, nearest_psk_phase_distance, sample_circular_gaussian, wrap_phase,
    ComplexVector, HermitianMatrix, PskAlphabet, RngStream,
};

/// Floor applied to λ₂ before forming the eigenvalue ratio.
pub const LAMBDA2_FLOOR: f64 = 1e-12;
/// Floor applied to the cooperative beamformer's power estimate.
pub const COOP_DENOMINATOR_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorId {
    Naive,
    Scheme1a,
    Scheme1b,
    Scheme2,
}

impl DetectorId {
    pub const ALL: [DetectorId; 4] = [
        DetectorId::Naive,
        DetectorId::Scheme1a,
        DetectorId::Scheme1b,
        DetectorId::Scheme2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DetectorId::Naive => "naive",
            DetectorId::Scheme1a => "scheme1a",
            DetectorId::Scheme1b => "scheme1b",
            DetectorId::Scheme2 => "scheme2",
        }
    }

    /// Training slots the detector consumes by default.
    pub fn default_slots(&self) -> usize {
        match self {
            DetectorId::Naive | DetectorId::Scheme2 => 1,
            DetectorId::Scheme1a => 2,
            DetectorId::Scheme1b => 4,
        }
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DetectorId::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown detector '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decision {
    EdPresent,
    EdAbsent,
}

impl Decision {
    pub fn is_present(self) -> bool {
        self == Decision::EdPresent
    }

    fn present_if(cond: bool) -> Self {
        if cond {
            Decision::EdPresent
        } else {
            Decision::EdAbsent
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub statistic: f64,
    pub auxiliary: Option<f64>,
    pub decision: Decision,
}

/// Decision thresholds for all detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Largest tolerated distance of arg(y₁ᴴy₂) from the PSK grid, radians.
    pub phase_delta: f64,
    /// Lower edge of the accepted slot-energy-ratio window.
    pub gamma1: f64,
    /// Upper edge of the accepted slot-energy-ratio window.
    pub gamma2: f64,
    /// λ₁/λ₂ above which the ED is declared absent.
    pub eig_ratio: f64,
    /// LU observation below which the ED is declared present.
    pub coop_floor: f64,
    /// Multiple of βP + N0 above which received energy flags the ED.
    pub energy_cap: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            phase_delta: 0.1,
            gamma1: 0.8,
            gamma2: 1.25,
            eig_ratio: 10.0,
            coop_floor: 0.8,
            energy_cap: 1.2,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.phase_delta,
            self.gamma1,
            self.gamma2,
            self.eig_ratio,
            self.coop_floor,
            self.energy_cap,
        ];
        if all.iter().any(|x| x.is_nan()) {
            return Err(Error::invalid("thresholds must not be NaN"));
        }
        if !(self.phase_delta > 0.0) {
            return Err(Error::invalid("phase_delta must be > 0"));
        }
        if !(self.gamma1 > 0.0 && self.gamma1 < 1.0 && 1.0 < self.gamma2) {
            return Err(Error::invalid("need 0 < gamma1 < 1 < gamma2"));
        }
        if !(self.energy_cap > 0.0) {
            return Err(Error::invalid("energy_cap must be > 0"));
        }
        if !(self.coop_floor < 1.0) {
            return Err(Error::invalid("coop_floor must be < 1"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Naive energy detector
// ---------------------------------------------------------------------------

pub fn naive_energy_statistic(slot: &TrainingSlot, m: usize) -> Result<f64> {
    if m != slot.y.len() {
        return Err(Error::invalid("m must equal the observation length"));
    }
    Ok(slot.y.norm_sqr() / m as f64)
}

pub fn naive_energy_decide(statistic: f64, beta_p_plus_n0: f64, energy_cap: f64) -> Result<DetectionResult> {
    if !(beta_p_plus_n0 > 0.0) {
        return Err(Error::invalid("reference energy must be > 0"));
    }
    Ok(DetectionResult {
        statistic,
        auxiliary: Some(statistic / beta_p_plus_n0),
        decision: Decision::present_if(statistic > energy_cap * beta_p_plus_n0),
    })
}

// ---------------------------------------------------------------------------
// Random pilots, two slots
// ---------------------------------------------------------------------------

/// (arg(y₁ᴴy₂) in [0, 2π), ‖y₁‖²/‖y₂‖²)
pub fn scheme1a_statistics(slot1: &TrainingSlot, slot2: &TrainingSlot) -> Result<(f64, f64)> {
    let e1 = slot1.y.norm_sqr();
    let e2 = slot2.y.norm_sqr();
    if e1 == 0.0 || e2 == 0.0 {
        return Err(Error::invalid("observations must have non-zero energy"));
    }
    let z = inner_product(&slot1.y, &slot2.y)?;
    Ok((wrap_phase(z.arg()), e1 / e2))
}

pub fn scheme1a_decide(z_phase: f64, q_ratio: f64, alphabet: &PskAlphabet, th: &Thresholds) -> DetectionResult {
    let off_grid = nearest_psk_phase_distance(z_phase, alphabet) > th.phase_delta;
    let unbalanced = q_ratio < th.gamma1 || q_ratio > th.gamma2;
    DetectionResult {
        statistic: z_phase,
        auxiliary: Some(q_ratio),
        decision: Decision::present_if(off_grid || unbalanced),
    }
}

// ---------------------------------------------------------------------------
// Random pilots, L slots, eigenvalue ratio
// ---------------------------------------------------------------------------

/// R = YᴴY/M − n0·I for Y = [y₁, …, y_L].
pub fn scheme1b_matrix(slots: &[TrainingSlot], n0: f64, m: usize) -> Result<HermitianMatrix> {
    if slots.len() < 2 {
        return Err(Error::invalid("eigenvalue test needs at least two slots"));
    }
    if slots.iter().any(|s| s.y.len() != m) {
        return Err(Error::invalid("all observations must have length m"));
    }
    let mut gram = vec![Complex64::new(0.0, 0.0); slots.len() * slots.len()];
    let l = slots.len();
    for i in 0..l {
        for j in i..l {
            gram[i * l + j] = inner_product(&slots[i].y, &slots[j].y)? / m as f64;
        }
    }
    Ok(HermitianMatrix::from_fn(l, |i, j| {
        if i == j {
            gram[i * l + j] - n0
        } else {
            gram[i * l + j]
        }
    }))
}

/// λ₁/λ₂ with λ₂ floored at [`LAMBDA2_FLOOR`].
pub fn scheme1b_statistic(r: &HermitianMatrix) -> Result<f64> {
    let ev = eigenvalues_hermitian(r)?;
    Ok(ev[0] / ev[1].max(LAMBDA2_FLOOR))
}

pub fn scheme1b_decide(r: &HermitianMatrix, th: &Thresholds) -> Result<DetectionResult> {
    Ok(scheme1b_decide_ratio(scheme1b_statistic(r)?, th))
}

/// ED absent iff the eigenvalue ratio exceeds `th.eig_ratio`.
pub fn scheme1b_decide_ratio(ratio: f64, th: &Thresholds) -> DetectionResult {
    DetectionResult {
        statistic: ratio,
        auxiliary: None,
        decision: Decision::present_if(ratio <= th.eig_ratio),
    }
}

// ---------------------------------------------------------------------------
// Cooperative echo
// ---------------------------------------------------------------------------

/// Downlink weights for the cooperative test. `degenerate` is set when the
/// measured signal power ‖y‖²/M − n0 was not positive; the detector then
/// reports the ED as present.
#[derive(Debug, Clone, PartialEq)]
pub struct CoopBeam {
    pub weights: ComplexVector,
    pub degenerate: bool,
}

/// w = p·conj(y)·√p_lu / max(‖y‖²/M − n0, ε), so that gᵀw/M → 1 without an
/// ED and → β_LU·p_lu/(β_LU·p_lu + β_ED·p_ed) under attack.
pub fn scheme2_beamformer(slot: &TrainingSlot, params: &LinkParams) -> Result<CoopBeam> {
    if !(params.p_lu > 0.0) {
        return Err(Error::invalid("cooperative beamformer needs p_lu > 0"));
    }
    let m = slot.y.len() as f64;
    let power = slot.y.norm_sqr() / m - params.n0;
    let degenerate = !(power > 0.0);
    let denom = power.max(COOP_DENOMINATOR_FLOOR);
    let weights = slot.y.conj().scale(slot.p * (params.p_lu.sqrt() / denom));
    Ok(CoopBeam { weights, degenerate })
}

/// Re{(gᵀw + n_lu)/M}, n_lu ~ CN(0, n0_lu) drawn from `rng`.
pub fn scheme2_lu_observe(
    g_lu: &ComplexVector,
    w: &ComplexVector,
    m: usize,
    n0_lu: f64,
    rng: &mut RngStream,
) -> Result<f64> {
    if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("beamformer must be finite"));
    }
    let mut rx = g_lu.dot(w)?;
    if n0_lu > 0.0 {
        rx += sample_circular_gaussian(rng, 1, n0_lu)?[0];
    }
    Ok(rx.re / m as f64)
}

pub fn scheme2_decide(r: f64, th: &Thresholds) -> DetectionResult {
    DetectionResult {
        statistic: r,
        auxiliary: None,
        decision: Decision::present_if(r < th.coop_floor),
    }
}

/// Result reported when the cooperative beamformer could not be formed.
pub fn scheme2_degenerate() -> DetectionResult {
    DetectionResult {
        statistic: f64::NEG_INFINITY,
        auxiliary: None,
        decision: Decision::EdPresent,
    }
}
