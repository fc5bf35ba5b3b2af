//! Linear fractional maps `z -> (az + b) / (cz + d)` on the extended plane.
//!
//! Coefficients are stored raw and never normalized to unit determinant;
//! equality between maps is projective.

mod classify;
mod fixed;

pub use classify::{
    classify, classify_with, denjoy_wolff, parabolic_translation_parameter, Category, MapClassification,
};
pub use fixed::{fixed_points, fixed_points_with, FixedPoint, FixedPointData, Location};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Numerical tolerances shared by the classification routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Discriminant, `|mu| - 1` and `Im mu` tests.
    pub class: f64,
    /// `|p| - 1` location tests and self-map slack.
    pub loc: f64,
    /// Rational rotation detection: `|theta/2pi - p/q|`.
    pub rot: f64,
    /// Largest denominator accepted for a rational rotation.
    pub max_period: u64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            class: 1e-9,
            loc: 1e-9,
            rot: 1e-12,
            max_period: 1_000_000,
        }
    }
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendedPoint {
    Finite(Complex64),
    Infinity,
}

impl ExtendedPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtendedPoint::Finite(z) => Some(z),
            ExtendedPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }
}

impl From<Complex64> for ExtendedPoint {
    fn from(z: Complex64) -> Self {
        ExtendedPoint::Finite(z)
    }
}

impl fmt::Display for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Finite(z) => write!(f, "{}", format_complex(*z)),
            ExtendedPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// A non-degenerate linear fractional map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl MoebiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let map = MoebiusMap { a, b, c, d };
        let scale = map.scale();
        let finite = [a, b, c, d].iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite || scale == 0.0 || map.det().norm() <= 1e-14 * scale * scale {
            return Err(Error::Degenerate);
        }
        Ok(map)
    }

    /// Real-coefficient convenience constructor.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    /// `z -> e^{i theta} z`.
    pub fn rotation(theta: f64) -> Self {
        MoebiusMap {
            a: Complex64::from_polar(1.0, theta),
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    /// The disk automorphism `z -> e^{i theta} (z - p) / (1 - conj(p) z)`, `|p| < 1`.
    pub fn disk_automorphism(theta: f64, p: Complex64) -> Result<Self> {
        if p.norm() >= 1.0 {
            return Err(Error::OutsideDisk(p.norm()));
        }
        let u = Complex64::from_polar(1.0, theta);
        Self::new(u, -u * p, -p.conj(), ONE)
    }

    /// Parabolic normal form `((2 - a) z + a) / (-a z + 2 + a)` with fixed point 1.
    pub fn parabolic_normal_form(a: Complex64) -> Result<Self> {
        let two = Complex64::new(2.0, 0.0);
        Self::new(two - a, a, -a, two + a)
    }

    /// Hyperbolic normal form `((1 + m) z + 1 - m) / ((1 - m) z + 1 + m)`:
    /// attractive fixed point 1 with derivative `m`, repulsive fixed point -1.
    pub fn hyperbolic_normal_form(m: f64) -> Result<Self> {
        Self::real(1.0 + m, 1.0 - m, 1.0 - m, 1.0 + m)
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }
    pub fn b(&self) -> Complex64 {
        self.b
    }
    pub fn c(&self) -> Complex64 {
        self.c
    }
    pub fn d(&self) -> Complex64 {
        self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Largest coefficient modulus; the reference scale for relative tests.
    pub fn scale(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// True when `c` vanishes relative to the other coefficients.
    pub fn is_affine(&self) -> bool {
        self.c.norm() <= 1e-15 * self.scale()
    }

    /// The point sent to infinity, `None` for affine maps.
    pub fn pole(&self) -> Option<Complex64> {
        if self.is_affine() {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    pub fn evaluate(&self, z: ExtendedPoint) -> ExtendedPoint {
        match z {
            ExtendedPoint::Infinity => {
                if self.is_affine() {
                    ExtendedPoint::Infinity
                } else {
                    ExtendedPoint::Finite(self.a / self.c)
                }
            }
            ExtendedPoint::Finite(z) => {
                let den = self.c * z + self.d;
                let den_scale = self.c.norm() * z.norm() + self.d.norm();
                if den.norm() <= f64::EPSILON * den_scale {
                    ExtendedPoint::Infinity
                } else {
                    ExtendedPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Evaluation at a finite point; `None` at the pole.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        self.evaluate(ExtendedPoint::Finite(z)).finite()
    }

    /// `self ∘ other`, the coefficient-matrix product.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let (f, g) = (self, other);
        MoebiusMap {
            a: f.a * g.a + f.b * g.c,
            b: f.a * g.b + f.b * g.d,
            c: f.c * g.a + f.d * g.c,
            d: f.c * g.b + f.d * g.d,
        }
        .rescaled()
    }

    /// Adjugate of the coefficient matrix.
    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `n`-fold composition by binary powering; `iterate(0)` is the identity.
    pub fn iterate(&self, mut n: u64) -> MoebiusMap {
        let mut acc = MoebiusMap::identity();
        let mut base = self.rescaled();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.compose(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.compose(&base);
            }
        }
        acc
    }

    /// `T⁻¹ ∘ self ∘ T`.
    pub fn conjugate_by(&self, t: &MoebiusMap) -> MoebiusMap {
        t.inverse().compose(self).compose(t)
    }

    /// Projective rescaling by a power of two so the largest coefficient
    /// has modulus in [1, 2). Exact in floating point.
    fn rescaled(self) -> MoebiusMap {
        let s = self.scale();
        if s == 0.0 || !s.is_finite() {
            return self;
        }
        let k = Complex64::new((-s.log2().floor()).exp2(), 0.0);
        MoebiusMap {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            d: self.d * k,
        }
    }

    /// Projective equality: the quadruples agree up to a nonzero complex
    /// scalar, relative tolerance `tol`.
    pub fn projectively_eq(&self, other: &MoebiusMap, tol: f64) -> bool {
        let lhs = self.coefficients();
        let rhs = other.coefficients();
        let (k, _) = lhs
            .iter()
            .enumerate()
            .map(|(i, z)| (i, z.norm()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if rhs[k].norm() <= tol * other.scale() {
            return false;
        }
        let ratio = rhs[k] / lhs[k];
        let s = other.scale();
        lhs.iter()
            .zip(rhs.iter())
            .all(|(l, r)| (r - l * ratio).norm() <= tol * s)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.projectively_eq(&MoebiusMap::identity(), tol)
    }

    /// `(ad - bc) / (cz + d)^2` at a finite non-pole point.
    pub fn derivative_at(&self, z: ExtendedPoint) -> Result<Complex64> {
        let z = z.finite().ok_or(Error::DerivativeUndefined("infinity"))?;
        let den = self.c * z + self.d;
        if den.norm() <= f64::EPSILON * (self.c.norm() * z.norm() + self.d.norm()) {
            return Err(Error::DerivativeUndefined("the pole"));
        }
        Ok(self.det() / (den * den))
    }

    /// Circle `φ(𝕋)` as `(center, radius)`:
    /// `((b d̄ - a c̄) / (|d|² - |c|²), |ad - bc| / ||d|² - |c|²|)`.
    ///
    /// Read from the coefficients rather than fitted through three image
    /// points, which crowd together for high iterates of maps with a
    /// boundary fixed point.
    pub fn image_circle(&self) -> Result<(Complex64, f64)> {
        let (cn, dn) = (self.c.norm(), self.d.norm());
        let gap = dn - cn;
        if gap.abs() <= 4.0 * f64::EPSILON * dn.max(cn) {
            return Err(Error::PoleOnCircle);
        }
        let denom = gap * (dn + cn);
        let center = (self.b * self.d.conj() - self.a * self.c.conj()) / denom;
        Ok((center, self.det().norm() / denom.abs()))
    }

    /// Membership in LFM(𝔻). Boundary-tangent images are accepted.
    pub fn is_self_map(&self) -> Result<bool> {
        self.is_self_map_with(&Tolerances::default())
    }

    pub fn is_self_map_with(&self, tol: &Tolerances) -> Result<bool> {
        let (center, radius) = self.image_circle()?;
        // A pole inside the disk sends 𝔻 to the exterior of the image circle.
        if let Some(p) = self.pole() {
            if p.norm() < 1.0 {
                return Ok(false);
            }
        }
        let at_zero = match self.eval(ZERO) {
            Some(w) => w,
            None => return Ok(false),
        };
        Ok(center.norm() + radius <= 1.0 + tol.loc && at_zero.norm() < 1.0 + tol.loc)
    }

    /// Checks membership in LFM(𝔻) and names the failing test.
    pub fn ensure_self_map(&self) -> Result<()> {
        self.ensure_self_map_with(&Tolerances::default())
    }

    pub fn ensure_self_map_with(&self, tol: &Tolerances) -> Result<()> {
        if self.is_self_map_with(tol)? {
            Ok(())
        } else {
            let (center, radius) = self.image_circle()?;
            Err(Error::NotSelfMap(format!(
                "image circle center {} radius {radius}",
                format_complex(center)
            )))
        }
    }

    /// True iff 1, i and -1 land on the unit circle.
    pub fn is_automorphism(&self) -> bool {
        self.is_automorphism_with(&Tolerances::default())
    }

    pub fn is_automorphism_with(&self, tol: &Tolerances) -> bool {
        [ONE, Complex64::i(), -ONE].iter().all(|&z| match self.eval(z) {
            Some(w) => (w.norm() - 1.0).abs() <= tol.loc,
            None => false,
        })
    }
}

impl fmt::Display for MoebiusMap {
    /// Serializes to the `a,b,c,d` literal accepted by the CLI.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            format_complex(self.a),
            format_complex(self.b),
            format_complex(self.c),
            format_complex(self.d)
        )
    }
}

/// Formats as `x`, `x+yi` or `x-yi` with round-trip precision.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}
