//! Eigen-solver for the small Hermitian matrices used by the eigenvalue-ratio
//! detector. Order 2 is solved in closed form; orders 3..=8 use cyclic
//! complex Jacobi rotations.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 8;
const HERMITIAN_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 64;

/// Dense L×L Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    order: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds from row vectors. Input within 1e-12 (relative to its largest
    /// entry) of Hermitian is symmetrized; anything further off is rejected.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let order = rows.len();
        if order == 0 || rows.iter().any(|r| r.len() != order) {
            return Err(Error::invalid("matrix must be square and non-empty"));
        }
        let scale = rows.iter().flatten().map(|z| z.norm()).fold(1.0f64, f64::max);
        for i in 0..order {
            for j in 0..order {
                let z = rows[i][j];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::invalid("matrix entries must be finite"));
                }
                if (z - rows[j][i].conj()).norm() > HERMITIAN_TOL * scale {
                    return Err(Error::invalid(format!("matrix is not Hermitian at ({i}, {j})")));
                }
            }
        }
        Ok(Self::from_fn(order, |i, j| (rows[i][j] + rows[j][i].conj()) * 0.5))
    }

    /// Builds from the upper triangle of `f`; the lower triangle is mirrored
    /// and the diagonal made real, so the result is exactly Hermitian.
    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); order * order];
        for i in 0..order {
            entries[i * order + i] = Complex64::new(f(i, i).re, 0.0);
            for j in (i + 1)..order {
                let z = f(i, j);
                entries[i * order + j] = z;
                entries[j * order + i] = z.conj();
            }
        }
        Self { order, entries }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            Complex64::new(if i == j { values[i] } else { 0.0 }, 0.0)
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.order + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Eigenvalues (descending) with matching unit eigenvectors as columns of
/// `vectors` (row-major L×L).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Complex64>,
    order: usize,
}

impl EigenDecomposition {
    pub fn vector_entry(&self, row: usize, col: usize) -> Complex64 {
        self.vectors[row * self.order + col]
    }

    /// Frobenius norm of m − VΛVᴴ.
    pub fn residual(&self, m: &HermitianMatrix) -> f64 {
        let n = self.order;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let rebuilt: Complex64 = (0..n)
                    .map(|k| self.vector_entry(i, k) * self.values[k] * self.vector_entry(j, k).conj())
                    .sum();
                acc += (m.get(i, j) - rebuilt).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

fn check_order(m: &HermitianMatrix) -> Result<()> {
    if !(2..=MAX_ORDER).contains(&m.order) {
        return Err(Error::invalid(format!(
            "eigen-solve supports orders 2..={MAX_ORDER}, got {}",
            m.order
        )));
    }
    Ok(())
}

/// All eigenvalues of `m`, sorted descending.
pub fn eigenvalues_hermitian(m: &HermitianMatrix) -> Result<Vec<f64>> {
    check_order(m)?;
    if m.order == 2 {
        let a = m.get(0, 0).re;
        let d = m.get(1, 1).re;
        let b = m.get(0, 1).norm();
        let mid = 0.5 * (a + d);
        let rad = (0.5 * (a - d)).hypot(b);
        return Ok(vec![mid + rad, mid - rad]);
    }
    Ok(eigen_decomposition(m)?.values)
}

/// Full decomposition by cyclic Jacobi sweeps.
pub fn eigen_decomposition(m: &HermitianMatrix) -> Result<EigenDecomposition> {
    check_order(m)?;
    let n = m.order;
    let mut a = m.entries.clone();
    let mut v = HermitianMatrix::identity(n).entries;
    let idx = |i: usize, j: usize| i * n + j;

    let total = m.frobenius_norm();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[idx(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[idx(p, q)];
                let babs = b.norm();
                if babs == 0.0 {
                    continue;
                }
                // Phase-align b to a real positive value, then a real rotation.
                let phase = b / babs;
                let app = a[idx(p, p)].re;
                let aqq = a[idx(q, q)].re;
                let theta = (aqq - app) / (2.0 * babs);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let vpp = Complex64::new(c, 0.0);
                let vpq = Complex64::new(s, 0.0);
                let vqp = -phase.conj() * s;
                let vqq = phase.conj() * c;

                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = akp * vpp + akq * vqp;
                    a[idx(k, q)] = akp * vpq + akq * vqq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
                    a[idx(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
                }
                a[idx(p, q)] = Complex64::new(0.0, 0.0);
                a[idx(q, p)] = Complex64::new(0.0, 0.0);
                a[idx(p, p)] = Complex64::new(a[idx(p, p)].re, 0.0);
                a[idx(q, q)] = Complex64::new(a[idx(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[idx(k, p)];
                    let vkq = v[idx(k, q)];
                    v[idx(k, p)] = vkp * vpp + vkq * vqp;
                    v[idx(k, q)] = vkp * vpq + vkq * vqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[idx(j, j)].re.total_cmp(&a[idx(i, i)].re));
    let values = order.iter().map(|&i| a[idx(i, i)].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[idx(row, col)] = v[idx(row, src)];
        }
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        order: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(
            eigenvalues_hermitian(&HermitianMatrix::identity(2)).unwrap(),
            vec![1.0, 1.0]
        );
        assert_eq!(
            eigenvalues_hermitian(&HermitianMatrix::diagonal(&[3.0, 1.0])).unwrap(),
            vec![3.0, 1.0]
        );
        let m = HermitianMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]).unwrap();
        let ev = eigenvalues_hermitian(&m).unwrap();
        assert!((ev[0] - 3.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_agrees_with_closed_form_on_2x2() {
        let m = HermitianMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]).unwrap();
        let d = eigen_decomposition(&m).unwrap();
        assert!((d.values[0] - 3.0).abs() < 1e-12 && (d.values[1] - 1.0).abs() < 1e-12);
        assert!(d.residual(&m) < 1e-12);
    }

    #[test]
    fn diagonal_order_3_unsorted() {
        let m = HermitianMatrix::diagonal(&[1.0, 5.0, -2.0]);
        assert_eq!(eigenvalues_hermitian(&m).unwrap(), vec![5.0, 1.0, -2.0]);
    }

    #[test]
    fn rejects_non_hermitian_and_bad_order() {
        let bad = HermitianMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(bad, Err(Error::InvalidArgument(_))));
        let tiny = HermitianMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 1e-14)], vec![c(1.0, 0.0), c(1.0, 0.0)]]);
        assert!(tiny.is_ok());
        assert!(eigenvalues_hermitian(&HermitianMatrix::identity(1)).is_err());
        assert!(eigenvalues_hermitian(&HermitianMatrix::identity(9)).is_err());
    }

    #[test]
    fn rank_one_outer_product() {
        // u uᴴ has a single non-zero eigenvalue ‖u‖².
        let u = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        let m = HermitianMatrix::from_fn(4, |i, j| u[i] * u[j].conj());
        let ev = eigenvalues_hermitian(&m).unwrap();
        assert!((ev[0] - 4.0).abs() < 1e-12);
        assert!(ev[1..].iter().all(|x| x.abs() < 1e-12));
    }

    fn arb_hermitian() -> impl Strategy<Value = HermitianMatrix> {
        (2usize..=8).prop_flat_map(|n| {
            prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), n * n)
                .prop_map(move |xs| HermitianMatrix::from_fn(n, |i, j| c(xs[i * n + j].0, xs[i * n + j].1)))
        })
    }

    proptest! {
        #[test]
        fn decomposition_reconstructs(m in arb_hermitian()) {
            let d = eigen_decomposition(&m).unwrap();
            let norm = m.frobenius_norm().max(1e-300);
            prop_assert!(d.residual(&m) <= 1e-9 * norm, "residual {}", d.residual(&m));
            prop_assert!(d.values.windows(2).all(|w| w[0] >= w[1]));
            let tr: f64 = d.values.iter().sum();
            prop_assert!((tr - m.trace()).abs() <= 1e-9 * norm);
        }

        #[test]
        fn gram_matrices_are_psd(xs in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 4 * 12)) {
            // YᴴY/M for L = 4 columns of length 12
            let (l, m) = (4usize, 12usize);
            let col = |k: usize, i: usize| c(xs[k * m + i].0, xs[k * m + i].1);
            let g = HermitianMatrix::from_fn(l, |a, b| {
                (0..m).map(|i| col(a, i).conj() * col(b, i)).sum::<Complex64>() / m as f64
            });
            let ev = eigenvalues_hermitian(&g).unwrap();
            prop_assert!(ev.iter().all(|&x| x >= -1e-9));
            let tr: f64 = ev.iter().sum();
            prop_assert!((tr - g.trace()).abs() <= 1e-9 * g.trace().abs().max(1e-300));
        }
    }
}
