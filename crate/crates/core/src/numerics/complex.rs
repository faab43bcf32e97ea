use std::ops::Index;

use num_complex::Complex64;

use super::rng::RngStream;
use crate::error::{Error, Result};

/// Length-M complex vector: a channel realization, a received pilot signal,
/// or a noise draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    /// Wraps `elements`, rejecting empty or non-finite input.
    pub fn new(elements: Vec<Complex64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::invalid("complex vector must have length >= 1"));
        }
        if elements.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("complex vector elements must be finite"));
        }
        Ok(Self(elements))
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// ‖a‖²
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> ComplexVector {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    pub fn scale_real(&self, factor: f64) -> ComplexVector {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    pub fn conj(&self) -> ComplexVector {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: Complex64, other: &ComplexVector) -> Result<ComplexVector> {
        check_lengths(self, other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + factor * b).collect()))
    }

    /// Unconjugated bilinear product aᵀb, the downlink response of channel
    /// `a` to beamformer `b`.
    pub fn dot(&self, other: &ComplexVector) -> Result<Complex64> {
        check_lengths(self, other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

fn check_lengths(a: &ComplexVector, b: &ComplexVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    Ok(())
}

/// aᴴb = Σ conj(aᵢ)·bᵢ
pub fn inner_product(a: &ComplexVector, b: &ComplexVector) -> Result<Complex64> {
    check_lengths(a, b)?;
    Ok(a.0.iter().zip(&b.0).map(|(x, y)| x.conj() * y).sum())
}

/// Circularly-symmetric complex Gaussian vector with `variance_per_element`
/// total power per entry (half in each of the real and imaginary parts).
pub fn sample_circular_gaussian(
    rng: &mut RngStream,
    length: usize,
    variance_per_element: f64,
) -> Result<ComplexVector> {
    if length == 0 {
        return Err(Error::invalid("length must be >= 1"));
    }
    if !(variance_per_element > 0.0) || !variance_per_element.is_finite() {
        return Err(Error::invalid(format!(
            "variance must be positive and finite, got {variance_per_element}"
        )));
    }
    let sigma = (variance_per_element / 2.0).sqrt();
    let v = (0..length)
        .map(|_| {
            let re = rng.standard_normal();
            let im = rng.standard_normal();
            Complex64::new(sigma * re, sigma * im)
        })
        .collect();
    Ok(ComplexVector(v))
}
