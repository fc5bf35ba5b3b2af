#![allow(dead_code)]

use lfm_recurrence::cli::{parse_map_spec, PRESETS};
use lfm_recurrence::{Category, MoebiusMap, WeightedSeries};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn preset(name: &str) -> MoebiusMap {
    parse_map_spec(name).unwrap()
}

pub fn all_presets() -> Vec<(&'static str, MoebiusMap)> {
    PRESETS.iter().map(|(name, _)| (*name, preset(name))).collect()
}

/// Category printed next to each example map in the recurrence table.
pub fn table_category(name: &str) -> Category {
    match name {
        "hyperbolic-auto" => Category::HyperbolicAutomorphism,
        "parabolic-auto" => Category::ParabolicAutomorphism,
        "hyperbolic-nonauto" => Category::HyperbolicNonAutomorphism,
        "parabolic-nonauto" => Category::ParabolicNonAutomorphism,
        "interior-exterior" => Category::InteriorExterior,
        "interior-boundary" => Category::InteriorBoundary,
        "elliptic-irrational" => Category::EllipticIrrationalRotation,
        "elliptic-rational" => Category::EllipticRationalRotation,
        other => panic!("no table row for {other}"),
    }
}

/// Recurrence column of the table for `C_φ` alone.
pub fn table_recurrence(name: &str, nu: f64) -> bool {
    match name {
        "hyperbolic-auto" | "parabolic-auto" | "hyperbolic-nonauto" => nu < 0.5,
        "elliptic-irrational" | "elliptic-rational" => true,
        _ => false,
    }
}

/// The printed inequality regions for `λ C_φ`, coded directly. `mu` is the
/// derivative at the attracting point, known in closed form for each preset.
pub fn table_iv_reference(name: &str, nu: f64, modulus: f64) -> bool {
    let g = (1.0 - 2.0 * nu) / 2.0;
    match name {
        "elliptic-irrational" | "elliptic-rational" => modulus == 1.0,
        "hyperbolic-auto" => {
            let mu: f64 = 0.5;
            nu < 0.5 && mu.powf(g) < modulus && modulus < mu.powf((2.0 * nu - 1.0) / 2.0)
        }
        "parabolic-auto" => nu < 0.5 && modulus == 1.0,
        "hyperbolic-nonauto" => {
            let mu: f64 = 0.5;
            nu <= 0.5 && modulus > mu.powf(g)
        }
        _ => false,
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Coefficients uniform in the unit square `[0,1] × [0,1]`.
pub fn random_poly(rng: &mut ChaCha8Rng, max_degree: usize, nu: f64) -> WeightedSeries {
    let degree = rng.gen_range(0..=max_degree);
    let coeffs = (0..=degree).map(|_| c(rng.gen(), rng.gen())).collect();
    WeightedSeries::new(nu, coeffs)
}

/// Like [`random_poly`] with a nonzero coefficient of degree at least 1.
pub fn random_nonconstant_poly(rng: &mut ChaCha8Rng, max_degree: usize, nu: f64) -> WeightedSeries {
    let degree = rng.gen_range(1..=max_degree);
    let mut coeffs: Vec<Complex64> = (0..=degree).map(|_| c(rng.gen(), rng.gen())).collect();
    coeffs[degree] += c(0.1, 0.0);
    WeightedSeries::new(nu, coeffs)
}

pub fn random_disk_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn random_automorphism(rng: &mut ChaCha8Rng, radius: f64) -> MoebiusMap {
    let p = random_disk_point(rng, radius);
    MoebiusMap::disk_automorphism(rng.gen_range(0.0..std::f64::consts::TAU), p).unwrap()
}

/// Plain Horner, kept separate from the library's evaluator.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(c(0.0, 0.0), |acc, a| acc * z + a)
}
