use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::rng::RngStream;
use crate::error::{Error, Result};

/// N-PSK constellation with symbols at phases 2πk/N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PskAlphabet {
    order: usize,
}

impl PskAlphabet {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::invalid(format!("PSK order must be >= 2, got {order}")));
        }
        Ok(Self { order })
    }

    pub fn qpsk() -> Self {
        Self { order: 4 }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn phase(&self, k: usize) -> f64 {
        TAU * (k % self.order) as f64 / self.order as f64
    }

    pub fn phases(&self) -> Vec<f64> {
        (0..self.order).map(|k| self.phase(k)).collect()
    }

    pub fn symbol(&self, k: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.phase(k))
    }

    /// Uniform draw from the alphabet.
    pub fn sample(&self, rng: &mut RngStream) -> Complex64 {
        self.symbol(rng.uniform_index(self.order))
    }
}

/// Wraps any phase into [0, 2π).
pub fn wrap_phase(phase: f64) -> f64 {
    let w = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Angular distance from `z_phase` to the closest constellation phase,
/// in [0, π/N].
pub fn nearest_psk_phase_distance(z_phase: f64, alphabet: &PskAlphabet) -> f64 {
    let spacing = TAU / alphabet.order() as f64;
    let offset = wrap_phase(z_phase).rem_euclid(spacing);
    offset.min(spacing - offset).clamp(0.0, PI / alphabet.order() as f64)
}
