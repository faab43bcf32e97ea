//! Uplink channel, noise and training-signal generation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{sample_circular_gaussian, ComplexVector, RngStream};

/// Physical parameters of one BS / LU / ED geometry. All powers linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// Large-scale fading (mean channel power) of the legitimate user.
    pub beta_lu: f64,
    /// Large-scale fading of the eavesdropper.
    pub beta_ed: f64,
    /// LU pilot power.
    pub p_lu: f64,
    /// ED pilot power when it attacks.
    pub p_ed: f64,
    /// Noise power per BS antenna. Zero means a noiseless receiver.
    pub n0: f64,
    /// BS antenna count.
    pub m: usize,
    /// Correlation coefficient of the ED channel with the LU channel.
    pub rho: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            beta_lu: 1.0,
            beta_ed: 1.0,
            p_lu: 1.0,
            p_ed: 1.0,
            n0: 1.0,
            m: 200,
            rho: 0.0,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.beta_lu, self.beta_ed, self.p_lu, self.p_ed, self.n0, self.rho]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::invalid("link parameters must be finite"));
        }
        if self.beta_lu <= 0.0 || self.beta_ed <= 0.0 {
            return Err(Error::invalid("beta_lu and beta_ed must be > 0"));
        }
        if self.p_lu < 0.0 || self.p_ed < 0.0 {
            return Err(Error::invalid("pilot powers must be >= 0"));
        }
        if self.n0 < 0.0 {
            return Err(Error::invalid("n0 must be >= 0"));
        }
        if self.m == 0 {
            return Err(Error::invalid("m must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::invalid("rho must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Expected per-antenna received energy of an LU-only pilot, βP + N0.
    pub fn h0_energy(&self) -> f64 {
        self.beta_lu * self.p_lu + self.n0
    }

    /// Uplink SNR p_lu·β_LU/n0 in dB.
    pub fn snr_db(&self) -> f64 {
        10.0 * (self.p_lu * self.beta_lu / self.n0).log10()
    }
}

/// One received uplink training observation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSlot {
    pub y: ComplexVector,
    /// LU pilot symbol.
    pub p: Complex64,
    /// ED pilot symbol, `None` when the ED was silent.
    pub q: Option<Complex64>,
}

fn check_unit(z: Complex64, name: &str) -> Result<()> {
    if (z.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "{name} must be unit modulus, |{name}| = {}",
            z.norm()
        )));
    }
    Ok(())
}

/// Draws (g_LU, g_ED). g_ED has per-element power β_ED and correlation
/// coefficient `rho` with g_LU.
pub fn sample_links(params: &LinkParams, rng: &mut RngStream) -> Result<(ComplexVector, ComplexVector)> {
    params.validate()?;
    let g_lu = sample_circular_gaussian(rng, params.m, params.beta_lu)?;
    let w = sample_circular_gaussian(rng, params.m, params.beta_ed)?;
    if params.rho == 0.0 {
        return Ok((g_lu, w));
    }
    let scale = (params.beta_ed / params.beta_lu).sqrt();
    let mix = (1.0 - params.rho * params.rho).max(0.0).sqrt();
    let g_ed = g_lu
        .scale_real(params.rho * scale)
        .add_scaled(Complex64::new(mix, 0.0), &w)?;
    Ok((g_lu, g_ed))
}

/// y = √p_lu·p·g_LU + [√p_ed·q·g_ED] + n with n ~ CN(0, n0·I).
pub fn receive_training(
    g_lu: &ComplexVector,
    g_ed: &ComplexVector,
    params: &LinkParams,
    p: Complex64,
    q: Option<Complex64>,
    rng: &mut RngStream,
) -> Result<TrainingSlot> {
    check_unit(p, "p")?;
    if let Some(q) = q {
        check_unit(q, "q")?;
    }
    if g_lu.len() != g_ed.len() {
        return Err(Error::invalid("channel length mismatch"));
    }
    let mut y = g_lu.scale(p * params.p_lu.sqrt());
    if let Some(q) = q {
        y = y.add_scaled(q * params.p_ed.sqrt(), g_ed)?;
    }
    if params.n0 > 0.0 {
        let n = sample_circular_gaussian(rng, g_lu.len(), params.n0)?;
        y = y.add_scaled(Complex64::new(1.0, 0.0), &n)?;
    }
    Ok(TrainingSlot { y, p, q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::inner_product;

    fn params(m: usize) -> LinkParams {
        LinkParams {
            m,
            n0: 0.1,
            ..LinkParams::default()
        }
    }

    #[test]
    fn validation() {
        assert!(params(4).validate().is_ok());
        assert!(LinkParams { m: 0, ..params(4) }.validate().is_err());
        assert!(LinkParams { rho: 1.5, ..params(4) }.validate().is_err());
        assert!(LinkParams {
            beta_lu: 0.0,
            ..params(4)
        }
        .validate()
        .is_err());
        assert!(LinkParams {
            n0: f64::NAN,
            ..params(4)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn independent_links_uncorrelated() {
        let p = params(10_000);
        let (g, h) = sample_links(&p, &mut RngStream::new(1, 0)).unwrap();
        let corr = inner_product(&g, &h).unwrap().norm() / (g.norm() * h.norm());
        assert!(corr < 0.05, "{corr}");
    }

    #[test]
    fn fully_correlated_links_identical() {
        let p = LinkParams { rho: 1.0, ..params(64) };
        let (g, h) = sample_links(&p, &mut RngStream::new(2, 0)).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn partial_correlation_and_power() {
        let p = LinkParams {
            rho: 0.6,
            beta_ed: 4.0,
            ..params(200_000)
        };
        let (g, h) = sample_links(&p, &mut RngStream::new(3, 0)).unwrap();
        let m = p.m as f64;
        assert!((h.norm_sqr() / m - 4.0).abs() < 0.05);
        let corr = inner_product(&g, &h).unwrap().re / (g.norm() * h.norm());
        assert!((corr - 0.6).abs() < 0.01, "{corr}");
    }

    #[test]
    fn link_power_concentrates() {
        let p = params(100_000);
        let (g, _) = sample_links(&p, &mut RngStream::new(1, 0)).unwrap();
        let e = g.norm_sqr() / p.m as f64;
        assert!((0.98..=1.02).contains(&e), "{e}");
    }

    #[test]
    fn noiseless_training_recovers_channel() {
        let p = LinkParams {
            n0: 0.0,
            p_lu: 2.0,
            ..params(16)
        };
        let mut rng = RngStream::new(4, 0);
        let (g, h) = sample_links(&p, &mut rng).unwrap();
        let pilot = Complex64::new(0.0, 1.0);
        let slot = receive_training(&g, &h, &p, pilot, None, &mut rng).unwrap();
        let back = slot.y.scale(pilot.conj() / p.p_lu.sqrt());
        for (a, b) in back.iter().zip(g.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_power_ed_matches_silent_ed() {
        let p = LinkParams {
            p_ed: 0.0,
            ..params(32)
        };
        let (g, h) = sample_links(&p, &mut RngStream::new(5, 0)).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let a = receive_training(
            &g,
            &h,
            &p,
            one,
            Some(Complex64::new(0.0, -1.0)),
            &mut RngStream::new(6, 0),
        )
        .unwrap();
        let b = receive_training(&g, &h, &p, one, None, &mut RngStream::new(6, 0)).unwrap();
        assert_eq!(a.y, b.y);
    }

    #[test]
    fn received_energy_converges() {
        let p = params(100_000);
        let mut rng = RngStream::new(7, 0);
        let (g, h) = sample_links(&p, &mut rng).unwrap();
        let slot = receive_training(&g, &h, &p, Complex64::new(1.0, 0.0), None, &mut rng).unwrap();
        let e = slot.y.norm_sqr() / p.m as f64;
        assert!((1.08..=1.12).contains(&e), "{e}");
    }

    #[test]
    fn rejects_non_unit_pilots() {
        let p = params(4);
        let (g, h) = sample_links(&p, &mut RngStream::new(1, 0)).unwrap();
        let mut rng = RngStream::new(1, 1);
        assert!(receive_training(&g, &h, &p, Complex64::new(2.0, 0.0), None, &mut rng).is_err());
        assert!(receive_training(
            &g,
            &h,
            &p,
            Complex64::new(1.0, 0.0),
            Some(Complex64::new(0.5, 0.0)),
            &mut rng
        )
        .is_err());
    }
}
