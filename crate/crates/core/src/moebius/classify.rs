use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

use super::fixed::{fixed_points_with, FixedPointData, Location};
use super::{ExtendedPoint, MoebiusMap, Tolerances};
use crate::error::{Error, Result};

/// Symbol families, one per row of the recurrence table plus the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Category {
    Identity,
    EllipticRationalRotation,
    EllipticIrrationalRotation,
    ParabolicAutomorphism,
    ParabolicNonAutomorphism,
    HyperbolicAutomorphism,
    HyperbolicNonAutomorphism,
    /// Interior attracting point, exterior repelling point (loxodromic, or
    /// hyperbolic with an interior attracting point).
    InteriorExterior,
    InteriorBoundary,
}

impl Category {
    pub fn is_elliptic(self) -> bool {
        matches!(
            self,
            Category::EllipticRationalRotation | Category::EllipticIrrationalRotation
        )
    }

    pub fn is_parabolic(self) -> bool {
        matches!(
            self,
            Category::ParabolicAutomorphism | Category::ParabolicNonAutomorphism
        )
    }

    pub fn has_interior_fixed_point(self) -> bool {
        self.is_elliptic() || matches!(self, Category::InteriorExterior | Category::InteriorBoundary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapClassification {
    pub category: Category,
    /// `None` only for the identity.
    pub fixed_points: Option<FixedPointData>,
    pub is_automorphism: bool,
    /// Derivative at the attracting point; at the interior point for
    /// elliptic maps, 1 for the identity.
    pub derivative_at_attractive: Complex64,
    /// Smallest `q` with `φ_q = id` for rational rotations.
    pub rotation_period: Option<u64>,
}

impl MapClassification {
    /// The real multiplier `φ'(η)` of a hyperbolic or parabolic map.
    pub fn real_multiplier(&self) -> Option<f64> {
        match self.category {
            Category::HyperbolicAutomorphism
            | Category::HyperbolicNonAutomorphism
            | Category::ParabolicAutomorphism
            | Category::ParabolicNonAutomorphism
            | Category::InteriorBoundary => Some(self.derivative_at_attractive.re),
            _ => None,
        }
    }

    pub fn attractive_point(&self) -> Option<ExtendedPoint> {
        self.fixed_points.as_ref()?.attractive_point().map(|p| p.point)
    }
}

pub fn classify(map: &MoebiusMap) -> Result<MapClassification> {
    classify_with(map, &Tolerances::default())
}

pub fn classify_with(map: &MoebiusMap, tol: &Tolerances) -> Result<MapClassification> {
    map.ensure_self_map_with(tol)?;
    let is_automorphism = map.is_automorphism_with(tol);
    if map.is_identity(tol.class) {
        return Ok(MapClassification {
            category: Category::Identity,
            fixed_points: None,
            is_automorphism: true,
            derivative_at_attractive: Complex64::new(1.0, 0.0),
            rotation_period: Some(1),
        });
    }
    let data = fixed_points_with(map, tol)?;
    let mu = data.multiplier;
    let mut rotation_period = None;

    let category = if data.double {
        let p = &data.points[0];
        if p.location != Location::Boundary {
            return Err(Error::Consistency(format!(
                "parabolic fixed point {} is not on the unit circle",
                p.point
            )));
        }
        if (p.derivative - 1.0).norm() > tol.class {
            return Err(Error::Consistency("parabolic derivative differs from 1".into()));
        }
        if is_automorphism {
            Category::ParabolicAutomorphism
        } else {
            Category::ParabolicNonAutomorphism
        }
    } else if data.attractive.is_none() {
        let (first, second) = (data.points[0].location, data.points[1].location);
        if first != Location::Interior || !second.is_outside() {
            return Err(Error::Consistency(format!(
                "elliptic fixed points at {first:?} and {second:?}"
            )));
        }
        if !is_automorphism {
            return Err(Error::Consistency("elliptic map is not an automorphism".into()));
        }
        rotation_period = rational_rotation_period(mu, tol);
        if rotation_period.is_some() {
            Category::EllipticRationalRotation
        } else {
            Category::EllipticIrrationalRotation
        }
    } else {
        let (att, other) = (&data.points[0], &data.points[1]);
        let real_positive = mu.im.abs() <= tol.class && mu.re > 0.0;
        match att.location {
            Location::Boundary => {
                if !real_positive {
                    return Err(Error::Consistency(
                        "boundary attracting point with non-positive multiplier".into(),
                    ));
                }
                match (is_automorphism, other.location) {
                    (true, Location::Boundary) => Category::HyperbolicAutomorphism,
                    (false, loc) if loc.is_outside() => Category::HyperbolicNonAutomorphism,
                    (auto, loc) => {
                        return Err(Error::Consistency(format!(
                            "hyperbolic repelling point {loc:?} with automorphism = {auto}"
                        )))
                    }
                }
            }
            Location::Interior => {
                if is_automorphism {
                    return Err(Error::Consistency(
                        "automorphism with an interior attracting point".into(),
                    ));
                }
                match other.location {
                    Location::Boundary if real_positive => Category::InteriorBoundary,
                    Location::Boundary => {
                        return Err(Error::Consistency(
                            "interior/boundary pair with non-positive multiplier".into(),
                        ))
                    }
                    Location::Interior => return Err(Error::Consistency("two interior fixed points".into())),
                    _ => Category::InteriorExterior,
                }
            }
            loc => {
                return Err(Error::Consistency(format!(
                    "attracting fixed point located at {loc:?}"
                )))
            }
        }
    };

    Ok(MapClassification {
        category,
        derivative_at_attractive: mu,
        fixed_points: Some(data),
        is_automorphism,
        rotation_period,
    })
}

/// Period `q` of a unimodular multiplier `e^{2πi p/q}`, detected via the
/// continued fraction convergents of `arg(μ) / 2π`.
fn rational_rotation_period(mu: Complex64, tol: &Tolerances) -> Option<u64> {
    let x = (mu.arg() / TAU).rem_euclid(1.0);
    let (mut h_prev, mut h) = (0.0_f64, 1.0_f64);
    let (mut k_prev, mut k) = (1.0_f64, 0.0_f64);
    let mut y = x;
    for _ in 0..64 {
        let term = y.floor();
        let (h_next, k_next) = (term * h + h_prev, term * k + k_prev);
        if k_next > tol.max_period as f64 {
            return None;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
        if (x - h / k).abs() < tol.rot {
            // p/q in lowest terms; q = 1 only for the (excluded) trivial rotation.
            return Some(k as u64);
        }
        let frac = y - term;
        if frac <= 0.0 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

/// Limit of the orbit of 0. The orbit is sampled along `z_{2^m} = φ_{2^m}(0)`
/// until two successive samples differ by less than `tol`; `max_doublings`
/// bounds `m`.
///
/// Hyperbolic and interior powers come from squaring the coefficient
/// matrix. Parabolic matrices are `λ(I + N)` with `N² = 0`, so their powers
/// are formed directly as `I + kN`; repeated squaring would cancel away
/// the `I/k` part and stall near `√ε`.
pub fn denjoy_wolff(map: &MoebiusMap, tol: f64, max_doublings: usize) -> Result<ExtendedPoint> {
    let class = classify(map)?;
    if class.category == Category::Identity || class.category.is_elliptic() {
        return Err(Error::WrongCategory {
            expected: "non-elliptic",
            got: class.category,
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let nilpotent = class.category.is_parabolic().then(|| {
        let [a, b, c, d] = map.coefficients();
        let half_trace = (a + d) / 2.0;
        [
            a / half_trace - one,
            b / half_trace,
            c / half_trace,
            d / half_trace - one,
        ]
    });
    let mut power = *map;
    let mut k = 1.0f64;
    let mut prev = zero;
    for _ in 0..max_doublings {
        let z = match nilpotent {
            // φ_k(0) = k n_b / (1 + k n_d)
            Some([_, nb, _, nd]) => {
                let den = one / k + nd;
                if den.norm() <= f64::EPSILON * (nd.norm() + 1.0 / k) {
                    return Err(Error::PoleInClosedDisk(0.0));
                }
                nb / den
            }
            None => power.eval(zero).ok_or(Error::PoleInClosedDisk(0.0))?,
        };
        if (z - prev).norm() < tol {
            return Ok(z.into());
        }
        prev = z;
        power = power.compose(&power);
        k *= 2.0;
    }
    Err(Error::NoConvergence {
        what: "moebius: Denjoy-Wolff iteration",
        iterations: max_doublings,
    })
}

/// The parameter `a` of the normal form `((2 - a) z + a) / (-a z + 2 + a)`
/// after rotating the fixed point to 1. `Re a = 0` exactly for automorphisms.
///
/// Under `σ(w) = i(1 + w)/(1 - w)` the normal form becomes the
/// translation `w -> w + i a`.
pub fn parabolic_translation_parameter(map: &MoebiusMap) -> Result<Complex64> {
    let class = classify(map)?;
    if !class.category.is_parabolic() {
        return Err(Error::WrongCategory {
            expected: "parabolic",
            got: class.category,
        });
    }
    let eta = class
        .attractive_point()
        .and_then(ExtendedPoint::finite)
        .ok_or_else(|| Error::Consistency("parabolic fixed point at infinity".into()))?;
    let zero = Complex64::new(0.0, 0.0);
    let unrotate = MoebiusMap::new(eta, zero, zero, Complex64::new(1.0, 0.0))?;
    let psi = map.conjugate_by(&unrotate);
    let [a, b, c, d] = psi.coefficients();
    let k = 4.0 / (a + d);
    let (a, b, c, d) = (a * k, b * k, c * k, d * k);
    Ok((b - c + (2.0 - a) + (d - 2.0)) / 4.0)
}
