//! Shannon and secrecy capacities under MRT downlink beamforming.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{receive_training, sample_links, LinkParams, TrainingSlot};
use crate::error::{Error, Result};
use crate::numerics::{ComplexVector, PskAlphabet, RngStream};
use crate::stats::Estimate;

/// Capacities of one channel realization, in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityTriple {
    pub c_lu: f64,
    pub c_ed: f64,
    pub c_sc: f64,
}

impl CapacityTriple {
    pub fn new(c_lu: f64, c_ed: f64) -> Self {
        Self {
            c_lu,
            c_ed,
            c_sc: (c_lu - c_ed).max(0.0),
        }
    }
}

/// Unit-norm MRT weights conj(ĝ)/‖ĝ‖.
pub fn mrt_beamformer(g_hat: &ComplexVector) -> Result<ComplexVector> {
    let norm = g_hat.norm();
    if norm == 0.0 {
        return Err(Error::invalid("cannot beamform along a zero channel estimate"));
    }
    Ok(g_hat.conj().scale_real(1.0 / norm))
}

pub fn instantaneous_capacities(
    g_lu: &ComplexVector,
    g_ed: &ComplexVector,
    w: &ComplexVector,
    p_tx: f64,
    n0: f64,
) -> Result<CapacityTriple> {
    if (w.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("beamformer must have unit norm"));
    }
    if p_tx < 0.0 || !(n0 > 0.0) {
        return Err(Error::invalid("need p_tx >= 0 and n0 > 0"));
    }
    let snr_lu = p_tx * g_lu.dot(w)?.norm_sqr() / n0;
    let snr_ed = p_tx * g_ed.dot(w)?.norm_sqr() / n0;
    Ok(CapacityTriple::new(
        snr_lu.ln_1p() / std::f64::consts::LN_2,
        snr_ed.ln_1p() / std::f64::consts::LN_2,
    ))
}

/// Least-squares channel estimate conj(p)·y/√p_lu.
pub fn ls_estimate(slot: &TrainingSlot, params: &LinkParams) -> Result<ComplexVector> {
    if !(params.p_lu > 0.0) {
        return Err(Error::invalid("LS estimation needs p_lu > 0"));
    }
    Ok(slot.y.scale(slot.p.conj() / params.p_lu.sqrt()))
}

/// Ergodic capacities over `trials` independent realizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicCapacity {
    pub c_lu: Estimate,
    pub c_ed: Estimate,
    /// Mean of the per-realization secrecy capacity.
    pub c_sc: Estimate,
    /// max(E[C_LU] − E[C_ED], 0), reported for comparison only.
    pub c_sc_of_means: f64,
    pub trials: usize,
}

impl ErgodicCapacity {
    pub fn secrecy_ratio(&self) -> f64 {
        self.c_sc.mean / self.c_lu.mean
    }
}

/// One realization of the downlink scenario. With `perfect_csi` the BS
/// beamforms along g_LU itself; otherwise along the LS estimate from one
/// training slot, contaminated by the ED's pilot when `attack` is set.
pub fn scenario_trial(
    params: &LinkParams,
    p_tx: f64,
    attack: bool,
    perfect_csi: bool,
    rng: &mut RngStream,
) -> Result<CapacityTriple> {
    let (g_lu, g_ed) = sample_links(params, rng)?;
    let w = if perfect_csi {
        mrt_beamformer(&g_lu)?
    } else {
        let alphabet = PskAlphabet::qpsk();
        let p = alphabet.sample(rng);
        let q = attack.then(|| alphabet.sample(rng));
        let slot = receive_training(&g_lu, &g_ed, params, p, q, rng)?;
        mrt_beamformer(&ls_estimate(&slot, params)?)?
    };
    // LU and ED receivers see the same noise power as a BS antenna.
    instantaneous_capacities(&g_lu, &g_ed, &w, p_tx, params.n0)
}

pub fn ergodic_scenario(
    params: &LinkParams,
    p_tx: f64,
    attack: bool,
    perfect_csi: bool,
    trials: usize,
    rng: &RngStream,
) -> Result<ErgodicCapacity> {
    if trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    params.validate()?;
    let samples: Vec<CapacityTriple> = (0..trials as u64)
        .into_par_iter()
        .map(|t| scenario_trial(params, p_tx, attack, perfect_csi, &mut rng.child(t)))
        .collect::<Result<_>>()?;
    let pick = |f: fn(&CapacityTriple) -> f64| samples.iter().map(f).collect::<Vec<_>>();
    let c_lu = Estimate::from_samples(&pick(|c| c.c_lu));
    let c_ed = Estimate::from_samples(&pick(|c| c.c_ed));
    let c_sc = Estimate::from_samples(&pick(|c| c.c_sc));
    Ok(ErgodicCapacity {
        c_lu,
        c_ed,
        c_sc,
        c_sc_of_means: (c_lu.mean - c_ed.mean).max(0.0),
        trials,
    })
}
