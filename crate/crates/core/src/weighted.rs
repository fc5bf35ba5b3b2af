//! Weighted Dirichlet spaces `S_ν` on truncated Taylor coefficient vectors.
//!
//! `‖f‖²_ν = Σ |a_n|² (n+1)^{2ν}`. `ν = -1/2` is the Bergman space, `ν = 0`
//! the Hardy space and `ν = 1/2` the Dirichlet space. Every stored series is
//! a polynomial; operations that approximate an infinite object (the kernel)
//! expose the truncation tail instead of hiding it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Default truncation degree `N`.
pub const DEFAULT_DEGREE: usize = 256;

/// `(n+1)^{2ν}`, evaluated in log space.
pub fn weight(n: usize, nu: f64) -> f64 {
    (2.0 * nu * ((n + 1) as f64).ln()).exp()
}

/// `(n+1)^{ν}`, the scale of the orthonormal basis element `z^n / (n+1)^ν`.
pub fn basis_scale(n: usize, nu: f64) -> f64 {
    (nu * ((n + 1) as f64).ln()).exp()
}

/// A polynomial `Σ a_n z^n` regarded as an element of `S_ν`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedSeries {
    pub nu: f64,
    pub coeffs: Vec<Complex64>,
}

impl WeightedSeries {
    /// An empty coefficient vector is stored as the zero constant.
    pub fn new(nu: f64, coeffs: Vec<Complex64>) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            coeffs
        };
        WeightedSeries { nu, coeffs }
    }

    pub fn from_real(nu: f64, coeffs: &[f64]) -> Self {
        Self::new(nu, coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero(nu: f64, degree: usize) -> Self {
        Self::new(nu, vec![Complex64::new(0.0, 0.0); degree + 1])
    }

    /// `z^n`, stored with truncation degree `degree >= n`.
    pub fn monomial(nu: f64, n: usize, degree: usize) -> Self {
        let mut s = Self::zero(nu, degree.max(n));
        s.coeffs[n] = Complex64::new(1.0, 0.0);
        s
    }

    /// Truncation degree `N`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the highest nonzero coefficient.
    pub fn effective_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|a| *a != Complex64::new(0.0, 0.0))
    }

    pub fn with_nu(&self, nu: f64) -> Self {
        WeightedSeries {
            nu,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Zero-pads or truncates to degree `n`.
    pub fn resized(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n + 1, Complex64::new(0.0, 0.0));
        WeightedSeries { nu: self.nu, coeffs }
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        WeightedSeries {
            nu: self.nu,
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    /// `self - other` over the common padded range.
    pub fn sub(&self, other: &WeightedSeries) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        WeightedSeries { nu: self.nu, coeffs }
    }

    /// Equality after zero padding.
    pub fn padded_eq(&self, other: &WeightedSeries) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        self.nu == other.nu && (0..n).all(|i| self.coeff(i) == other.coeff(i))
    }

    /// Coordinates in the orthonormal basis `e_n = z^n / (n+1)^ν`.
    pub fn basis_coordinates(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * basis_scale(n, self.nu))
            .collect()
    }

    /// Term-wise derivative.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, a)| a * n as f64)
            .collect();
        Self::new(self.nu, coeffs)
    }
}

pub fn norm_nu_sq(f: &WeightedSeries) -> f64 {
    f.coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| a.norm_sqr() * weight(n, f.nu))
        .sum()
}

/// Rescaled before squaring so that coefficients near `1e300` do not overflow.
pub fn norm_nu(f: &WeightedSeries) -> f64 {
    let terms = || {
        f.coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a.norm() * basis_scale(n, f.nu))
    };
    let big = terms().fold(0.0, f64::max);
    if big == 0.0 || !big.is_finite() {
        return big;
    }
    big * terms().map(|t| (t / big).powi(2)).sum::<f64>().sqrt()
}

pub fn inner_product(f: &WeightedSeries, g: &WeightedSeries) -> Result<Complex64> {
    if f.nu != g.nu {
        return Err(Error::MismatchedNu {
            left: f.nu,
            right: g.nu,
        });
    }
    Ok(f.coeffs
        .iter()
        .zip(g.coeffs.iter())
        .enumerate()
        .map(|(n, (a, b))| a * b.conj() * weight(n, f.nu))
        .sum())
}

/// Horner evaluation. Outside the open disk the polynomial is still
/// evaluated, with a warning.
pub fn eval_series(f: &WeightedSeries, z: Complex64) -> Complex64 {
    if z.norm() >= 1.0 {
        log::warn!(
            "evaluating a series at |z| = {} outside the open unit disk",
            z.norm()
        );
    }
    horner(&f.coeffs, z)
}

pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub w: Complex64,
    pub nu: f64,
    pub degree: usize,
}

/// `K_w(z) = Σ conj(w)^n z^n / (n+1)^{2ν}`, truncated at `degree`.
pub fn reproducing_kernel(spec: &KernelSpec) -> Result<WeightedSeries> {
    let r = spec.w.norm();
    if r >= 1.0 || !r.is_finite() {
        return Err(Error::OutsideDisk(r));
    }
    let wbar = spec.w.conj();
    let mut power = Complex64::new(1.0, 0.0);
    let mut coeffs = Vec::with_capacity(spec.degree + 1);
    for n in 0..=spec.degree {
        coeffs.push(power / weight(n, spec.nu));
        power *= wbar;
    }
    Ok(WeightedSeries::new(spec.nu, coeffs))
}

/// `k(t) = Σ_{n ≤ terms} t^n / (n+1)^{2ν}`, the scalar series with
/// `‖K_w‖² = k(|w|²)`.
pub fn kernel_function(t: f64, nu: f64, terms: usize) -> f64 {
    let mut power = 1.0;
    let mut sum = 0.0;
    for n in 0..=terms {
        sum += power / weight(n, nu);
        power *= t;
    }
    sum
}

/// Upper bound for `Σ_{n > degree} t^n / (n+1)^{2ν}`, `0 ≤ t < 1`, from a
/// geometric majorant of the tail. `None` when the majorant diverges.
pub fn kernel_tail_bound(t: f64, nu: f64, degree: usize) -> Option<f64> {
    let first = t.powi(degree as i32 + 1) / weight(degree + 1, nu);
    // Largest ratio of consecutive tail terms.
    let growth = if nu >= 0.0 {
        1.0
    } else {
        ((degree + 3) as f64 / (degree + 2) as f64).powf(-2.0 * nu)
    };
    let ratio = t * growth;
    (ratio < 1.0).then(|| first / (1.0 - ratio))
}

/// `Σ n |a_n|²`, which equals `∫_𝔻 |f'|² dA` for the normalized area measure.
pub fn dirichlet_seminorm_sq(f: &WeightedSeries) -> f64 {
    f.coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| n as f64 * a.norm_sqr())
        .sum()
}

/// `(1/2π) ∫ |f(e^{iθ})|² dθ` by the trapezoid rule on the unit circle,
/// the limit `r → 1` of the Hardy circle means. Exact for polynomials once
/// `samples > 2N`; at least `4(N+1)` samples are required.
pub fn hardy_norm_quadrature(f: &WeightedSeries, samples: usize) -> Result<f64> {
    let required = 4 * (f.degree() + 1);
    if samples < required {
        return Err(Error::TooFewSamples { samples, required });
    }
    let sum: f64 = (0..samples)
        .map(|k| {
            let z = Complex64::from_polar(1.0, TAU * k as f64 / samples as f64);
            horner(&f.coeffs, z).norm_sqr()
        })
        .sum();
    Ok(sum / samples as f64)
}

/// `|f'(z)| (1 - |z|²)^{(3 - 2ν)/2}`, bounded on the disk for `f ∈ S_ν`
/// when `ν < 1/2`.
pub fn growth_ratio(f: &WeightedSeries, nu: f64, z: Complex64) -> Result<f64> {
    if nu >= 0.5 {
        return Err(Error::GrowthWeightOutOfRange(nu));
    }
    let r2 = z.norm_sqr();
    if r2 >= 1.0 {
        return Err(Error::OutsideDisk(r2.sqrt()));
    }
    let fp = horner(&f.derivative().coeffs, z).norm();
    Ok(fp * (1.0 - r2).powf((3.0 - 2.0 * nu) / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm_nu(&WeightedSeries::from_real(0.0, &[0.0, 1.0])), 1.0);
        let f = |nu| WeightedSeries::from_real(nu, &[1.0, 1.0]);
        assert!((norm_nu(&f(0.5)) - 3f64.sqrt()).abs() < 1e-15);
        assert!((norm_nu(&f(-0.5)) - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn weights_survive_extreme_parameters() {
        assert!(weight(10_000, 20.0).is_finite());
        assert!(weight(10_000, -20.0) > 0.0);
        assert!((weight(3, 0.5) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn inner_product_examples() {
        let z = WeightedSeries::from_real(0.5, &[0.0, 1.0]);
        assert!((inner_product(&z, &z).unwrap() - 2.0).norm() < 1e-15);
        for nu in [-1.0, 0.0, 2.5] {
            let z = WeightedSeries::from_real(nu, &[0.0, 1.0]);
            let one = WeightedSeries::from_real(nu, &[1.0]);
            assert_eq!(inner_product(&z, &one).unwrap(), c(0.0, 0.0));
        }
        let f = WeightedSeries::from_real(0.0, &[1.0, 1.0]);
        let g = WeightedSeries::from_real(0.0, &[1.0, -1.0]);
        assert_eq!(inner_product(&f, &g).unwrap(), c(0.0, 0.0));
        let h = WeightedSeries::from_real(0.5, &[1.0]);
        assert!(matches!(inner_product(&f, &h), Err(Error::MismatchedNu { .. })));
    }

    #[test]
    fn eval_examples() {
        let f = WeightedSeries::from_real(0.0, &[1.0, 1.0, 1.0]);
        assert_eq!(eval_series(&f, c(0.0, 0.0)), c(1.0, 0.0));
        let z = WeightedSeries::from_real(0.0, &[0.0, 1.0]);
        assert_eq!(eval_series(&z, c(0.5, 0.0)), c(0.5, 0.0));
        let geo = WeightedSeries::from_real(0.0, &[1.0; 51]);
        let expected = 2.0 * (1.0 - 0.5f64.powi(51));
        assert!((eval_series(&geo, c(0.5, 0.0)).re - expected).abs() < 1e-15);
        // Still defined on the circle.
        assert_eq!(eval_series(&f, c(1.0, 0.0)), c(3.0, 0.0));
    }

    #[test]
    fn kernel_examples() {
        let k = reproducing_kernel(&KernelSpec {
            w: c(0.0, 0.0),
            nu: 1.3,
            degree: 8,
        })
        .unwrap();
        assert_eq!(k.coeffs[0], c(1.0, 0.0));
        assert!(k.coeffs[1..].iter().all(|a| a.norm() == 0.0));

        let k = reproducing_kernel(&KernelSpec {
            w: c(0.5, 0.0),
            nu: 0.0,
            degree: 60,
        })
        .unwrap();
        for (n, a) in k.coeffs.iter().enumerate() {
            assert!((a - c(0.5f64.powi(n as i32), 0.0)).norm() < 1e-16);
        }
        let tail = kernel_tail_bound(0.25, 0.0, 60).unwrap();
        assert!((norm_nu_sq(&k) - 4.0 / 3.0).abs() <= tail + 1e-15);

        let outside = KernelSpec {
            w: c(0.6, 0.8),
            nu: 0.0,
            degree: 4,
        };
        assert!(matches!(reproducing_kernel(&outside), Err(Error::OutsideDisk(_))));
    }

    #[test]
    fn kernel_conjugates_w() {
        let k = reproducing_kernel(&KernelSpec {
            w: c(0.0, 0.5),
            nu: 0.0,
            degree: 2,
        })
        .unwrap();
        assert!((k.coeffs[1] - c(0.0, -0.5)).norm() < 1e-16);
    }

    #[test]
    fn tail_bound_handles_negative_nu() {
        let t = 0.81;
        for nu in [-2.0, -0.5, 0.0, 1.5] {
            let bound = kernel_tail_bound(t, nu, 200).unwrap();
            let tail = kernel_function(t, nu, 5000) - kernel_function(t, nu, 200);
            assert!(tail <= bound * (1.0 + 1e-9), "nu={nu} tail={tail} bound={bound}");
        }
    }

    #[test]
    fn dirichlet_examples() {
        for n in 1..6 {
            assert_eq!(
                dirichlet_seminorm_sq(&WeightedSeries::monomial(0.5, n, n)),
                n as f64
            );
        }
        assert_eq!(
            dirichlet_seminorm_sq(&WeightedSeries::from_real(0.5, &[3.0])),
            0.0
        );
        assert_eq!(
            dirichlet_seminorm_sq(&WeightedSeries::from_real(0.5, &[1.0, 2.0])),
            4.0
        );
    }

    #[test]
    fn hardy_examples() {
        let cases: [(&[Complex64], f64); 3] = [
            (&[c(0.0, 0.0), c(1.0, 0.0)], 1.0),
            (&[c(1.0, 0.0), c(1.0, 0.0)], 2.0),
            (&[c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)], 3.0),
        ];
        for (coeffs, expected) in cases {
            let f = WeightedSeries::new(0.0, coeffs.to_vec());
            let samples = 4 * (f.degree() + 1);
            assert!((hardy_norm_quadrature(&f, samples).unwrap() - expected).abs() < 1e-14);
        }
        let f = WeightedSeries::from_real(0.0, &[1.0, 1.0]);
        assert!(matches!(
            hardy_norm_quadrature(&f, 7),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn growth_examples() {
        let z = WeightedSeries::from_real(0.0, &[0.0, 1.0]);
        assert_eq!(growth_ratio(&z, 0.0, c(0.0, 0.0)).unwrap(), 1.0);
        let expected = 0.19f64.powf(1.5);
        assert!((growth_ratio(&z, 0.0, c(0.9, 0.0)).unwrap() - expected).abs() < 1e-15);
        let k = WeightedSeries::from_real(0.0, &[4.0]);
        assert_eq!(growth_ratio(&k, -1.0, c(0.3, 0.4)).unwrap(), 0.0);
        assert!(matches!(
            growth_ratio(&z, 0.5, c(0.0, 0.0)),
            Err(Error::GrowthWeightOutOfRange(_))
        ));
        assert!(growth_ratio(&z, 0.0, c(1.0, 0.0)).is_err());
    }
}
