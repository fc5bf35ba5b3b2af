use num_complex::Complex64;
use serde::Serialize;

use super::{ExtendedPoint, MoebiusMap, Tolerances};
use crate::error::{Error, Result};

/// Position of a fixed point relative to the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
    Infinity,
}

impl Location {
    pub fn of(p: ExtendedPoint, tol: f64) -> Location {
        match p {
            ExtendedPoint::Infinity => Location::Infinity,
            ExtendedPoint::Finite(z) => {
                let r = z.norm();
                if (r - 1.0).abs() <= tol {
                    Location::Boundary
                } else if r < 1.0 {
                    Location::Interior
                } else {
                    Location::Exterior
                }
            }
        }
    }

    /// Outside the closed disk, including infinity.
    pub fn is_outside(self) -> bool {
        matches!(self, Location::Exterior | Location::Infinity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub point: ExtendedPoint,
    pub location: Location,
    /// Derivative of the map at the point; at infinity, in the chart `1/z`.
    pub derivative: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointData {
    /// One point for parabolic maps, otherwise two. An attractive point is
    /// listed first; for elliptic maps the interior point is.
    pub points: Vec<FixedPoint>,
    pub double: bool,
    /// Derivative at the first-listed point.
    pub multiplier: Complex64,
    /// Index of the attracting point: the point with `|φ'| < 1`, or the
    /// single boundary point of a parabolic map.
    pub attractive: Option<usize>,
}

impl FixedPointData {
    pub fn attractive_point(&self) -> Option<&FixedPoint> {
        self.attractive.map(|i| &self.points[i])
    }
}

pub fn fixed_points(map: &MoebiusMap) -> Result<FixedPointData> {
    fixed_points_with(map, &Tolerances::default())
}

/// Solves `c z² + (d - a) z - b = 0` on the sphere.
pub fn fixed_points_with(map: &MoebiusMap, tol: &Tolerances) -> Result<FixedPointData> {
    if map.is_identity(tol.class) {
        return Err(Error::IdentityMap);
    }
    let [a, b, c, d] = map.coefficients();
    let at = |p: ExtendedPoint| -> Result<FixedPoint> {
        let derivative = match p {
            ExtendedPoint::Infinity => d / a,
            finite => map.derivative_at(finite)?,
        };
        Ok(FixedPoint {
            point: p,
            location: Location::of(p, tol.loc),
            derivative,
        })
    };

    let mut points = if map.is_affine() {
        let slope = d - a;
        if slope.norm() <= tol.class * map.scale() {
            vec![at(ExtendedPoint::Infinity)?]
        } else {
            vec![at((b / slope).into())?, at(ExtendedPoint::Infinity)?]
        }
    } else {
        let lin = d - a;
        let disc = lin * lin + 4.0 * b * c;
        if (disc / map.det()).norm() <= tol.class {
            vec![at(((a - d) / (2.0 * c)).into())?]
        } else {
            let root = disc.sqrt();
            // Pick the sign that avoids cancellation, then use Vieta.
            let s = if (lin.conj() * root).re >= 0.0 { 1.0 } else { -1.0 };
            let q = -(lin + s * root) / 2.0;
            vec![at((q / c).into())?, at((-b / q).into())?]
        }
    };

    let double = points.len() == 1;
    let attractive = if double {
        Some(0)
    } else {
        let mods = [points[0].derivative.norm(), points[1].derivative.norm()];
        let neutral = mods.iter().all(|m| (m - 1.0).abs() <= tol.class);
        if neutral {
            if outside_rank(&points[0]) > outside_rank(&points[1]) {
                points.swap(0, 1);
            }
            None
        } else {
            if mods[1] < mods[0] {
                points.swap(0, 1);
            }
            Some(0)
        }
    };
    Ok(FixedPointData {
        multiplier: points[0].derivative,
        points,
        double,
        attractive,
    })
}

fn outside_rank(p: &FixedPoint) -> f64 {
    match p.point {
        ExtendedPoint::Infinity => f64::INFINITY,
        ExtendedPoint::Finite(z) => z.norm(),
    }
}
