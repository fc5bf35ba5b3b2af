//! Table-driven recurrence verdicts for `λ C_φ` on `S_ν`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moebius::{classify_with, format_complex, Category, MapClassification, MoebiusMap, Tolerances};

/// Distance to a threshold below which a verdict is flagged as boundary.
pub const EPS_DECISION: f64 = 1e-12;

/// Number of discrete spectral points listed by default.
pub const DEFAULT_K_MAX: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    Identity,
    EllipticAutomorphism,
    /// Non-elliptic symbols with a fixed point inside the disk.
    InteriorFixedPoint,
    HyperbolicAutomorphism,
    ParabolicAutomorphism,
    HyperbolicNonAutomorphism,
    ParabolicNonAutomorphism,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bounds {
    const NONE: Bounds = Bounds {
        lower: None,
        upper: None,
    };
    const UNIT: Bounds = Bounds {
        lower: Some(1.0),
        upper: Some(1.0),
    };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceVerdict {
    pub recurrent: bool,
    pub rule: Rule,
    pub detail: String,
    /// `(1 - 2ν)/2` for the rules whose thresholds use it.
    pub gamma: Option<f64>,
    /// `φ'(η)` when real.
    pub mu: Option<f64>,
    pub bounds: Bounds,
    /// Some input sits within `EPS_DECISION` of a threshold.
    pub boundary: bool,
}

pub fn gamma(nu: f64) -> f64 {
    (1.0 - 2.0 * nu) / 2.0
}

fn near(x: f64, t: f64) -> bool {
    (x - t).abs() <= EPS_DECISION
}

/// `|λ| = 1` up to `EPS_DECISION`, and whether the match is inexact.
fn unimodular(modulus: f64) -> (bool, bool) {
    let gap = (modulus - 1.0).abs();
    (gap <= EPS_DECISION, gap > 0.0 && gap <= EPS_DECISION)
}

pub fn decide(map: &MoebiusMap, nu: f64, lambda: Complex64) -> Result<RecurrenceVerdict> {
    decide_with(map, nu, lambda, &Tolerances::default())
}

pub fn decide_with(
    map: &MoebiusMap,
    nu: f64,
    lambda: Complex64,
    tol: &Tolerances,
) -> Result<RecurrenceVerdict> {
    if lambda == Complex64::new(0.0, 0.0) || !lambda.is_finite() {
        return Err(Error::ZeroLambda);
    }
    let class = classify_with(map, tol)?;
    Ok(verdict_for(&class, nu, lambda))
}

/// The verdict for an already classified symbol.
pub fn verdict_for(class: &MapClassification, nu: f64, lambda: Complex64) -> RecurrenceVerdict {
    let modulus = lambda.norm();
    let mu_c = class.derivative_at_attractive;
    let mu_text = format_complex(mu_c);
    let eta_text = class
        .attractive_point()
        .map_or_else(|| "-".to_string(), |p| p.to_string());
    let g = gamma(nu);
    match class.category {
        Category::Identity => {
            let (on_circle, boundary) = unimodular(modulus);
            RecurrenceVerdict {
                recurrent: on_circle,
                rule: Rule::Identity,
                detail: format!(
                    "identity symbol (extension beyond the table): recurrent iff |lambda| = 1; |lambda| = {modulus}"
                ),
                gamma: None,
                mu: Some(1.0),
                bounds: Bounds::UNIT,
                boundary,
            }
        }
        Category::EllipticRationalRotation | Category::EllipticIrrationalRotation => {
            let (on_circle, boundary) = unimodular(modulus);
            RecurrenceVerdict {
                recurrent: on_circle,
                rule: Rule::EllipticAutomorphism,
                detail: format!(
                    "elliptic automorphism, mu = phi'({eta_text}) = {mu_text}: recurrent iff |lambda| = 1 for every nu; |lambda| = {modulus}"
                ),
                gamma: None,
                mu: None,
                bounds: Bounds::UNIT,
                boundary,
            }
        }
        Category::InteriorExterior | Category::InteriorBoundary => RecurrenceVerdict {
            recurrent: false,
            rule: Rule::InteriorFixedPoint,
            detail: format!(
                "non-elliptic symbol with interior fixed point {eta_text}, mu = {mu_text}: never recurrent"
            ),
            gamma: None,
            mu: (mu_c.im == 0.0).then_some(mu_c.re),
            bounds: Bounds::NONE,
            boundary: false,
        },
        Category::ParabolicNonAutomorphism => RecurrenceVerdict {
            recurrent: false,
            rule: Rule::ParabolicNonAutomorphism,
            detail: format!("parabolic non-automorphism fixing {eta_text}: never recurrent on any S_nu"),
            gamma: None,
            mu: Some(1.0),
            bounds: Bounds::NONE,
            boundary: false,
        },
        Category::ParabolicAutomorphism => {
            let (on_circle, unit_boundary) = unimodular(modulus);
            let nu_ok = nu < 0.5;
            RecurrenceVerdict {
                recurrent: nu_ok && on_circle,
                rule: Rule::ParabolicAutomorphism,
                detail: format!(
                    "parabolic automorphism fixing {eta_text}: recurrent iff nu < 1/2 and |lambda| = 1; nu = {nu}, |lambda| = {modulus}"
                ),
                gamma: Some(g),
                mu: Some(1.0),
                bounds: Bounds::UNIT,
                boundary: unit_boundary || near(nu, 0.5),
            }
        }
        Category::HyperbolicAutomorphism => {
            let mu = mu_c.re;
            let (lower, upper) = (mu.powf(g), mu.powf(-g));
            let nu_ok = nu < 0.5;
            RecurrenceVerdict {
                recurrent: nu_ok && lower < modulus && modulus < upper,
                rule: Rule::HyperbolicAutomorphism,
                detail: format!(
                    "hyperbolic automorphism, mu = phi'({eta_text}) = {mu}: recurrent iff nu < 1/2 and mu^gamma = {lower} < |lambda| < mu^-gamma = {upper}; nu = {nu}, gamma = {g}, |lambda| = {modulus}"
                ),
                gamma: Some(g),
                mu: Some(mu),
                bounds: Bounds { lower: Some(lower), upper: Some(upper) },
                boundary: near(nu, 0.5) || near(modulus, lower) || near(modulus, upper),
            }
        }
        Category::HyperbolicNonAutomorphism => {
            let mu = mu_c.re;
            let lower = mu.powf(g);
            let nu_ok = nu <= 0.5;
            RecurrenceVerdict {
                recurrent: nu_ok && modulus > lower,
                rule: Rule::HyperbolicNonAutomorphism,
                detail: format!(
                    "hyperbolic non-automorphism, mu = phi'({eta_text}) = {mu}: recurrent iff nu <= 1/2 and |lambda| > mu^gamma = {lower}; nu = {nu}, gamma = {g}, |lambda| = {modulus}"
                ),
                gamma: Some(g),
                mu: Some(mu),
                bounds: Bounds { lower: Some(lower), upper: None },
                boundary: near(nu, 0.5) || near(modulus, lower),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumFamily {
    HyperbolicNonAutoDiskPlusPoints,
    ParabolicNonAutoSpiral,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumDescription {
    pub family: SpectrumFamily,
    pub gamma: f64,
    /// `φ'(p)^{-γ}`; `None` for the spiral family, whose rate is left symbolic.
    pub disk_radius: Option<f64>,
    /// `φ'(p)^k` for `k = 0..=k_max`.
    pub discrete_points: Vec<f64>,
    pub includes_zero: bool,
}

pub fn spectrum_description(map: &MoebiusMap, nu: f64, k_max: usize) -> Result<SpectrumDescription> {
    let class = classify_with(map, &Tolerances::default())?;
    let g = gamma(nu);
    match class.category {
        Category::HyperbolicNonAutomorphism => {
            let mu = class.derivative_at_attractive.re;
            Ok(SpectrumDescription {
                family: SpectrumFamily::HyperbolicNonAutoDiskPlusPoints,
                gamma: g,
                disk_radius: Some(mu.powf(-g)),
                discrete_points: (0..=k_max).map(|k| mu.powi(k as i32)).collect(),
                includes_zero: false,
            })
        }
        Category::ParabolicNonAutomorphism => Ok(SpectrumDescription {
            family: SpectrumFamily::ParabolicNonAutoSpiral,
            gamma: g,
            disk_radius: None,
            discrete_points: Vec::new(),
            includes_zero: true,
        }),
        other => Err(Error::UnsupportedCategory(other)),
    }
}

/// Whether the described spectrum has a component that misses the unit
/// circle: an isolated zero, or a point off the circle and outside the disk.
pub fn circle_component_flag(desc: &SpectrumDescription) -> bool {
    if desc.includes_zero && desc.family == SpectrumFamily::ParabolicNonAutoSpiral {
        return true;
    }
    let radius = desc.disk_radius.unwrap_or(0.0);
    desc.discrete_points
        .iter()
        .any(|p| (p.abs() - 1.0).abs() > EPS_DECISION && p.abs() - radius > EPS_DECISION)
}
