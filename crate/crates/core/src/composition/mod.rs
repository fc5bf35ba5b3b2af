//! The operator `λ C_φ : f ↦ λ (f ∘ φ)` in coordinates.

mod eigen;

pub use eigen::{truncated_eigenvalues, EigenEstimate, MAX_EIGEN_DIMENSION};

use num_complex::Complex64;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moebius::{classify, MoebiusMap};
use crate::weighted::{basis_scale, norm_nu, WeightedSeries};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Orbits stop once `|λ|^k` passes this bound.
pub const OVERFLOW_BOUND: f64 = 1e300;

/// Taylor coefficients of a symbol about 0.
#[derive(Debug, Clone)]
pub struct TruncatedMap {
    pub taylor: Vec<Complex64>,
    pub source: MoebiusMap,
}

/// Expands `(az + b)/(cz + d) = b/d - (det/(cd)) Σ_{n≥1} (-c/d)^n z^n`.
/// Exact for affine maps.
pub fn taylor_of_map(map: &MoebiusMap, degree: usize) -> Result<TruncatedMap> {
    if let Some(p) = map.pole() {
        if p.norm() <= 1.0 {
            return Err(Error::PoleInClosedDisk(p.norm()));
        }
    }
    Ok(expand(map, degree))
}

/// The expansion without the pole check. A validated self-map has its pole
/// strictly outside the closed disk, but high iterates of a map with a
/// boundary fixed point can round it onto the circle; their coefficients
/// are still accurate.
fn expand(map: &MoebiusMap, degree: usize) -> TruncatedMap {
    let [a, b, c, d] = map.coefficients();
    let mut taylor = vec![ZERO; degree + 1];
    taylor[0] = b / d;
    if map.pole().is_none() {
        if degree >= 1 {
            taylor[1] = a / d;
        }
    } else {
        let ratio = -c / d;
        let mut term = -map.det() / (c * d);
        for coeff in taylor.iter_mut().skip(1) {
            term *= ratio;
            *coeff = term;
        }
    }
    TruncatedMap { taylor, source: *map }
}

/// Product of two coefficient vectors truncated at degree `n`.
fn mul_truncated(x: &[Complex64], y: &[Complex64], n: usize) -> Vec<Complex64> {
    let support: Vec<usize> = (0..y.len().min(n + 1)).filter(|&j| y[j] != ZERO).collect();
    let mut out = vec![ZERO; n + 1];
    for (i, xi) in x.iter().enumerate().take(n + 1) {
        if *xi == ZERO {
            continue;
        }
        for &j in &support {
            if i + j > n {
                break;
            }
            out[i + j] += xi * y[j];
        }
    }
    out
}

/// `f ∘ φ` truncated at the degree of `f`, by Horner's scheme over the
/// Taylor coefficients of `φ`.
pub fn compose_series(f: &WeightedSeries, map: &MoebiusMap) -> Result<WeightedSeries> {
    map.ensure_self_map()?;
    Ok(compose_unchecked(f, map))
}

/// As [`compose_series`] without the self-map check, for iterates of a map
/// already validated.
fn compose_unchecked(f: &WeightedSeries, map: &MoebiusMap) -> WeightedSeries {
    let n = f.degree();
    let phi = expand(map, n);
    let Some(top) = f.effective_degree() else {
        return WeightedSeries::zero(f.nu, n);
    };
    let mut acc = vec![ZERO; n + 1];
    acc[0] = f.coeffs[top];
    for k in (0..top).rev() {
        acc = mul_truncated(&acc, &phi.taylor, n);
        acc[0] += f.coeffs[k];
    }
    WeightedSeries::new(f.nu, acc)
}

/// `λ (f ∘ φ)`.
pub fn apply_lambda_op(f: &WeightedSeries, map: &MoebiusMap, lambda: Complex64) -> Result<WeightedSeries> {
    Ok(compose_series(f, map)?.scaled(lambda))
}

/// The `n × n` section of `λ C_φ` in the orthonormal basis `e_j = z^j/(j+1)^ν`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub n: usize,
    /// Row-major.
    pub entries: Vec<Complex64>,
    pub nu: f64,
    pub lambda: Complex64,
    pub symbol: MoebiusMap,
}

impl OperatorMatrix {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    /// Matrix-vector product on basis coordinates.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n.min(x.len())).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Entries strictly below the diagonal are exactly zero.
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == ZERO))
    }

    pub fn rows(&self) -> Vec<&[Complex64]> {
        self.entries.chunks(self.n).collect()
    }
}

impl Serialize for OperatorMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("OperatorMatrix", 5)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("nu", &self.nu)?;
        s.serialize_field("lambda", &self.lambda)?;
        s.serialize_field("symbol", &self.symbol.to_string())?;
        s.serialize_field("entries", &self.rows())?;
        s.end()
    }
}

pub fn operator_matrix(map: &MoebiusMap, nu: f64, lambda: Complex64, n: usize) -> Result<OperatorMatrix> {
    if n == 0 {
        return Err(Error::Dimension(n));
    }
    map.ensure_self_map()?;
    let phi = taylor_of_map(map, n - 1)?;
    let scales: Vec<f64> = (0..n).map(|i| basis_scale(i, nu)).collect();
    let mut entries = vec![ZERO; n * n];
    let mut power = vec![ZERO; n];
    power[0] = Complex64::new(1.0, 0.0);
    for j in 0..n {
        for i in 0..n {
            if power[i] != ZERO {
                entries[i * n + j] = lambda * power[i] * (scales[i] / scales[j]);
            }
        }
        if j + 1 < n {
            power = mul_truncated(&power, &phi.taylor, n - 1);
        }
    }
    Ok(OperatorMatrix {
        n,
        entries,
        nu,
        lambda,
        symbol: *map,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitRecord {
    pub k: u64,
    /// `‖λ^k f∘φ_k − f‖_ν`.
    pub distance: f64,
    pub running_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit {
    pub records: Vec<OrbitRecord>,
    /// Set when the sweep stopped early because `|λ|^k` exceeded [`OVERFLOW_BOUND`].
    pub overflowed: bool,
}

impl Orbit {
    pub fn min_distance(&self) -> Option<f64> {
        self.records.last().map(|r| r.running_min)
    }
}

/// Distances `‖λ^k f∘φ_k − f‖_ν` for `k = 1..=max_iter`. Each `φ_k` is the
/// exact Möbius iterate, composed with `f` once. Rational rotations are
/// iterated modulo their period.
pub fn orbit_distances(
    f: &WeightedSeries,
    map: &MoebiusMap,
    lambda: Complex64,
    nu: f64,
    max_iter: u64,
) -> Result<Orbit> {
    if max_iter == 0 {
        return Err(Error::Config("orbit length must be at least 1".into()));
    }
    let period = classify(map)?.rotation_period;
    let f = f.with_nu(nu);
    let log_lambda = lambda.norm().ln();
    let mut records = Vec::new();
    let mut running_min = f64::INFINITY;
    let mut overflowed = false;
    for k in 1..=max_iter {
        if k as f64 * log_lambda > OVERFLOW_BOUND.ln() {
            overflowed = true;
            break;
        }
        let steps = period.map_or(k, |q| k % q);
        let image = compose_unchecked(&f, &map.iterate(steps));
        let lambda_k = lambda.powu(k as u32);
        let distance = norm_nu(&image.scaled(lambda_k).sub(&f));
        running_min = running_min.min(distance);
        records.push(OrbitRecord {
            k,
            distance,
            running_min,
        });
    }
    Ok(Orbit { records, overflowed })
}
