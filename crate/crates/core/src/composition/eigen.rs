//! Eigenvalues of finite sections.
//!
//! Triangular sections (affine symbols) are read off the diagonal. General
//! sections go through a Hessenberg reduction followed by Wilkinson-shifted
//! QR sweeps with deflation, which is shifted simultaneous power iteration
//! in its stable form. Every returned value carries the residual of an
//! eigenvector recovered by back substitution, checked against the
//! original matrix.

use num_complex::Complex64;
use serde::Serialize;

use super::OperatorMatrix;
use crate::error::{Error, Result};

pub const MAX_EIGEN_DIMENSION: usize = 512;

/// Residual threshold for a pair to count as converged.
pub const RESIDUAL_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenEstimate {
    pub value: Complex64,
    /// `‖Mv − λv‖ / ‖v‖`.
    pub residual: f64,
    pub converged: bool,
}

/// Triangular sections return their diagonal in index order. Otherwise the
/// estimates are sorted by decreasing modulus.
pub fn truncated_eigenvalues(m: &OperatorMatrix) -> Result<Vec<EigenEstimate>> {
    if m.n == 0 || m.n > MAX_EIGEN_DIMENSION {
        return Err(Error::Dimension(m.n));
    }
    let a = Dense {
        n: m.n,
        data: m.entries.clone(),
    };
    if m.is_upper_triangular() {
        Ok(triangular_estimates(&a, &a, None))
    } else {
        let (t, z) = schur(&a)?;
        let mut out = triangular_estimates(&t, &a, Some(&z));
        out.sort_by(|x, y| y.value.norm().total_cmp(&x.value.norm()));
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Dense {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl Dense {
    pub fn identity(n: usize) -> Dense {
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Dense { n, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `G` acting on rows `k, k+1`, columns `cols`.
    fn rotate_rows(&mut self, k: usize, g: Givens, cols: std::ops::Range<usize>) {
        for j in cols {
            let (x, y) = (self.at(k, j), self.at(k + 1, j));
            *self.at_mut(k, j) = g.c.conj() * x + g.s.conj() * y;
            *self.at_mut(k + 1, j) = -g.s * x + g.c * y;
        }
    }

    /// `Gᴴ` acting on columns `k, k+1`, rows `rows`.
    fn rotate_cols(&mut self, k: usize, g: Givens, rows: std::ops::Range<usize>) {
        for i in rows {
            let (x, y) = (self.at(i, k), self.at(i, k + 1));
            *self.at_mut(i, k) = x * g.c + y * g.s;
            *self.at_mut(i, k + 1) = -x * g.s.conj() + y * g.c.conj();
        }
    }
}

/// Unitary `[[c̄, s̄], [-s, c]]` sending `(a, b)` to `(r, 0)`.
#[derive(Debug, Clone, Copy)]
struct Givens {
    c: Complex64,
    s: Complex64,
}

impl Givens {
    fn zeroing(a: Complex64, b: Complex64) -> Givens {
        let r = a.norm().hypot(b.norm());
        if r == 0.0 {
            Givens {
                c: Complex64::new(1.0, 0.0),
                s: ZERO,
            }
        } else {
            Givens { c: a / r, s: b / r }
        }
    }
}

/// Householder reduction to upper Hessenberg form; returns `(H, Q)` with
/// `A = Q H Qᴴ`.
fn hessenberg(a: &Dense) -> (Dense, Dense) {
    let n = a.n;
    let mut h = a.clone();
    let mut q = Dense::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h.at(i, k)).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0] == ZERO {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x;
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= vnorm);
        // H ← P H with P = I − 2 v vᴴ on indices k+1..n
        for j in 0..n {
            let dot: Complex64 = (0..v.len()).map(|t| v[t].conj() * h.at(k + 1 + t, j)).sum();
            for (t, vt) in v.iter().enumerate() {
                *h.at_mut(k + 1 + t, j) -= 2.0 * vt * dot;
            }
        }
        // H ← H P, Q ← Q P
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let dot: Complex64 = (0..v.len()).map(|t| m.at(i, k + 1 + t) * v[t]).sum();
                for (t, vt) in v.iter().enumerate() {
                    *m.at_mut(i, k + 1 + t) -= 2.0 * dot * vt.conj();
                }
            }
        }
        for i in k + 2..n {
            *h.at_mut(i, k) = ZERO;
        }
    }
    (h, q)
}

/// Complex Schur form `A = Z T Zᴴ`.
fn schur(a: &Dense) -> Result<(Dense, Dense)> {
    let n = a.n;
    let (mut h, mut z) = hessenberg(a);
    let max_sweeps = 60 * n.max(1);
    let mut sweeps = 0;
    let mut since_deflation = 0;
    let mut hi = n - 1;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = h.at(lo, lo - 1).norm();
            let diag = h.at(lo - 1, lo - 1).norm() + h.at(lo, lo).norm();
            let scale = if diag == 0.0 { h.frobenius() } else { diag };
            if sub <= f64::EPSILON * scale {
                *h.at_mut(lo, lo - 1) = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        sweeps += 1;
        since_deflation += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence {
                what: "composition: shifted QR",
                iterations: sweeps,
            });
        }
        let shift = if since_deflation % 11 == 0 {
            h.at(hi, hi) + 0.75 * h.at(hi, hi - 1).norm()
        } else {
            wilkinson_shift(
                h.at(hi - 1, hi - 1),
                h.at(hi - 1, hi),
                h.at(hi, hi - 1),
                h.at(hi, hi),
            )
        };
        for k in lo..=hi {
            *h.at_mut(k, k) -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let g = Givens::zeroing(h.at(k, k), h.at(k + 1, k));
            h.rotate_rows(k, g, k..n);
            *h.at_mut(k + 1, k) = ZERO;
            rotations.push(g);
        }
        for (offset, g) in rotations.into_iter().enumerate() {
            let k = lo + offset;
            h.rotate_cols(k, g, 0..(k + 2).min(hi) + 1);
            z.rotate_cols(k, g, 0..n);
        }
        for k in lo..=hi {
            *h.at_mut(k, k) += shift;
        }
    }
    Ok((h, z))
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) / 2.0;
    let disc = ((a - d) / 2.0).powi(2) + b * c;
    let root = disc.sqrt();
    let (l1, l2) = (half_tr + root, half_tr - root);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Estimates from an upper triangular `t`; eigenvectors by back
/// substitution, mapped through `basis` when `t` is a Schur factor, and
/// residuals measured against `original`.
fn triangular_estimates(t: &Dense, original: &Dense, basis: Option<&Dense>) -> Vec<EigenEstimate> {
    let n = t.n;
    let small = (f64::EPSILON * t.frobenius()).max(f64::MIN_POSITIVE);
    (0..n)
        .map(|k| {
            let value = t.at(k, k);
            let mut y = vec![ZERO; n];
            y[k] = Complex64::new(1.0, 0.0);
            for j in (0..k).rev() {
                let rhs: Complex64 = (j + 1..=k).map(|l| t.at(j, l) * y[l]).sum();
                let mut den = t.at(j, j) - value;
                if den.norm() < small {
                    den = Complex64::new(small, 0.0);
                }
                y[j] = -rhs / den;
                let big = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
                if big > 1e150 {
                    y.iter_mut().for_each(|v| *v /= big);
                }
            }
            let v = match basis {
                Some(q) => q.mul_vec(&y),
                None => y,
            };
            let av = original.mul_vec(&v);
            let num = av
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - value * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let den = v.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
            let residual = num / den;
            EigenEstimate {
                value,
                residual,
                converged: residual <= RESIDUAL_TOL,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::operator_matrix;
    use crate::moebius::MoebiusMap;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn wrap(n: usize, data: Vec<Complex64>) -> OperatorMatrix {
        OperatorMatrix {
            n,
            entries: data,
            nu: 0.0,
            lambda: c(1.0, 0.0),
            symbol: MoebiusMap::identity(),
        }
    }

    /// `Q (D + N) Qᴴ` with a random unitary `Q` and strictly upper `N`:
    /// eigenvalues are exactly `D`.
    fn similar_to(diag: &[Complex64], rng: &mut ChaCha8Rng) -> Dense {
        let n = diag.len();
        let mut t = Dense::identity(n);
        for (i, &d) in diag.iter().enumerate() {
            *t.at_mut(i, i) = d;
            for j in i + 1..n {
                *t.at_mut(i, j) = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            }
        }
        let raw = Dense {
            n,
            data: (0..n * n)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        };
        let (_, q) = hessenberg(&raw);
        // Hessenberg Q alone fixes e_0; mix in a second reflector via the Schur basis.
        let (_, q2) = schur(&raw).unwrap();
        let mut u = Dense {
            n,
            data: vec![ZERO; n * n],
        };
        for i in 0..n {
            for j in 0..n {
                *u.at_mut(i, j) = (0..n).map(|k| q.at(i, k) * q2.at(k, j)).sum();
            }
        }
        let mut out = Dense {
            n,
            data: vec![ZERO; n * n],
        };
        for i in 0..n {
            for j in 0..n {
                let mut s = ZERO;
                for k in 0..n {
                    for l in 0..n {
                        s += u.at(i, k) * t.at(k, l) * u.at(j, l).conj();
                    }
                }
                *out.at_mut(i, j) = s;
            }
        }
        out
    }

    #[test]
    fn recovers_planted_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 7, 16, 30] {
            let diag: Vec<Complex64> = (0..n)
                .map(|k| c(1.5 - 0.1 * k as f64, 0.3 * (k as f64).sin()))
                .collect();
            let a = similar_to(&diag, &mut rng);
            let est = truncated_eigenvalues(&wrap(n, a.data)).unwrap();
            assert_eq!(est.len(), n);
            let mut expected = diag.clone();
            expected.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
            for e in &expected {
                let best = est
                    .iter()
                    .map(|x| (x.value - e).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(best < 1e-9, "n={n}: missing {e}");
            }
            assert!(est.iter().all(|e| e.converged), "n={n}: {est:?}");
        }
    }

    #[test]
    fn dominant_value_matches_power_iteration() {
        // Positive matrix: Perron root is simple and dominant.
        let n = 12;
        let data: Vec<Complex64> = (0..n * n).map(|k| c(1.0 + ((k * 7) % 5) as f64, 0.0)).collect();
        let a = Dense {
            n,
            data: data.clone(),
        };
        let mut v = vec![c(1.0, 0.0); n];
        let mut rho = 0.0;
        for _ in 0..500 {
            let w = a.mul_vec(&v);
            rho = w.iter().map(|z| z.norm()).sum::<f64>() / v.iter().map(|z| z.norm()).sum::<f64>();
            let s = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
            v = w.iter().map(|z| z / s).collect();
        }
        let est = truncated_eigenvalues(&wrap(n, data)).unwrap();
        assert!((est[0].value - c(rho, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn triangular_path_is_exact() {
        let avg = MoebiusMap::real(1.0, 1.0, 0.0, 2.0).unwrap();
        let m = operator_matrix(&avg, 0.0, c(1.0, 0.0), 16).unwrap();
        let est = truncated_eigenvalues(&m).unwrap();
        for (k, e) in est.iter().enumerate() {
            assert_eq!(e.value, c(0.5f64.powi(k as i32), 0.0));
            assert!(e.converged);
        }
    }

    #[test]
    fn rotation_section_has_unimodular_diagonal() {
        let theta = 0.6;
        let m = operator_matrix(&MoebiusMap::rotation(theta), 0.0, c(1.0, 0.0), 4).unwrap();
        let est = truncated_eigenvalues(&m).unwrap();
        for (k, e) in est.iter().enumerate() {
            assert!((e.value - Complex64::from_polar(1.0, k as f64 * theta)).norm() < 1e-15);
            assert_eq!(e.residual, 0.0);
        }
    }

    #[test]
    fn scaling_lambda_scales_spectrum() {
        let hyp = MoebiusMap::real(3.0, 1.0, 1.0, 3.0).unwrap();
        let one = truncated_eigenvalues(&operator_matrix(&hyp, 0.0, c(1.0, 0.0), 24).unwrap()).unwrap();
        let two = truncated_eigenvalues(&operator_matrix(&hyp, 0.0, c(2.0, 0.0), 24).unwrap()).unwrap();
        for (a, b) in one.iter().zip(&two) {
            assert!((b.value - 2.0 * a.value).norm() < 1e-9 * a.value.norm().max(1.0));
        }
    }

    #[test]
    fn dimension_limits() {
        let m = wrap(513, vec![ZERO; 513 * 513]);
        assert!(matches!(truncated_eigenvalues(&m), Err(Error::Dimension(513))));
    }
}
