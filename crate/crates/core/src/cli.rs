//! Parsing, presets and report rendering behind the `lfmrec` binary.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::composition::{operator_matrix, orbit_distances, truncated_eigenvalues, Orbit};
use crate::error::{Error, Result};
use crate::moebius::{classify_with, format_complex, MoebiusMap, Tolerances};
use crate::oracle::{decide_with, verdict_for, RecurrenceVerdict, Rule};
use crate::weighted::{
    eval_series, inner_product, kernel_function, kernel_tail_bound, norm_nu_sq, reproducing_kernel,
    KernelSpec, WeightedSeries, DEFAULT_DEGREE,
};

/// The example maps of the recurrence table, by name.
pub const PRESETS: [(&str, &str); 8] = [
    ("hyperbolic-auto", "3,1,1,3"),
    ("parabolic-auto", "1+1i,-1,1,-1+1i"),
    ("hyperbolic-nonauto", "1,1,0,2"),
    ("parabolic-nonauto", "0,1,-1,2"),
    ("interior-exterior", "-1,0,1,2"),
    ("interior-boundary", "1,0,-1,2"),
    (
        "elliptic-irrational",
        "0.155943694765374473454648+0.9877659459927355270691341i,0,0,1",
    ),
    ("elliptic-rational", "-0.5+0.8660254037844386467637232i,0,0,1"),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

fn parse_err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

fn parse_real(text: &str, offset: usize) -> Result<f64> {
    let bad = text
        .char_indices()
        .find(|(_, ch)| !(ch.is_ascii_digit() || matches!(ch, '.' | '+' | '-' | 'e' | 'E')));
    if let Some((i, ch)) = bad {
        return Err(parse_err(offset + i, format!("unexpected character '{ch}'")));
    }
    let value: f64 = text
        .parse()
        .map_err(|_| parse_err(offset, format!("'{text}' is not a decimal number")))?;
    if !value.is_finite() {
        return Err(parse_err(offset, "number out of range"));
    }
    Ok(value)
}

/// Complex literal `x`, `yi`, `x+yi` or `x-yi`. Positions in errors count
/// bytes from the start of `text` plus `offset`.
fn parse_complex_at(text: &str, offset: usize) -> Result<Complex64> {
    let lead = text.len() - text.trim_start().len();
    let body = text.trim();
    let offset = offset + lead;
    if body.is_empty() {
        return Err(parse_err(offset, "empty complex literal"));
    }
    let Some(imag) = body.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(body, offset)?, 0.0));
    };
    // Split at the last sign that is not leading and not an exponent sign.
    let bytes = imag.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_text, im_text, im_offset) = match split {
        Some(k) => (&imag[..k], &imag[k..], offset + k),
        None => ("", imag, offset),
    };
    let im_digits = im_text.trim_start_matches(['+', '-']);
    if im_digits.is_empty() {
        return Err(parse_err(
            im_offset + im_text.len(),
            "imaginary part needs a coefficient",
        ));
    }
    let re = if re_text.is_empty() {
        0.0
    } else {
        parse_real(re_text, offset)?
    };
    Ok(Complex64::new(re, parse_real(im_text, im_offset)?))
}

pub fn parse_complex(text: &str) -> Result<Complex64> {
    parse_complex_at(text, 0)
}

fn parse_list(text: &str) -> Result<Vec<Complex64>> {
    let mut offset = 0;
    let mut out = Vec::new();
    for part in text.split(',') {
        out.push(parse_complex_at(part, offset)?);
        offset += part.len() + 1;
    }
    Ok(out)
}

/// A preset name or four coefficients `a,b,c,d`. The map must be
/// non-degenerate and send the disk into itself.
pub fn parse_map_spec(text: &str) -> Result<MoebiusMap> {
    parse_map_spec_with(text, &Tolerances::default())
}

pub fn parse_map_spec_with(text: &str, tol: &Tolerances) -> Result<MoebiusMap> {
    let source = preset(text.trim()).unwrap_or(text);
    let coeffs = parse_list(source)?;
    if coeffs.len() != 4 {
        return Err(parse_err(
            source.len(),
            format!("expected 4 coefficients, found {}", coeffs.len()),
        ));
    }
    let map = MoebiusMap::new(coeffs[0], coeffs[1], coeffs[2], coeffs[3])?;
    map.ensure_self_map_with(tol)?;
    Ok(map)
}

/// Taylor coefficients `c0,c1,...` as complex literals.
pub fn parse_series(text: &str, nu: f64) -> Result<WeightedSeries> {
    Ok(WeightedSeries::new(nu, parse_list(text)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!(
                "unknown format '{other}', expected json or csv"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Decide,
    Orbit,
    Matrix,
    Kernel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub nu: f64,
    pub lambda: Complex64,
    /// Truncation degree `N` of series.
    pub degree: usize,
    /// Orbit length `K`.
    pub max_iter: u64,
    pub tol: f64,
    /// `None` picks the command's natural format: CSV for orbits, JSON otherwise.
    pub format: Option<Format>,
    /// Side of the finite section for `matrix`.
    pub size: usize,
    /// Kernel centre for `kernel`.
    pub w: Complex64,
    /// Test function for `orbit` and `kernel`; `z` when absent.
    pub series: Option<Vec<Complex64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            nu: 0.0,
            lambda: Complex64::new(1.0, 0.0),
            degree: DEFAULT_DEGREE,
            max_iter: 1000,
            tol: 1e-9,
            format: None,
            size: 16,
            w: Complex64::new(0.5, 0.0),
            series: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::Config("degree must be at least 1".into()));
        }
        if self.max_iter < 1 {
            return Err(Error::Config("max-iter must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if !self.nu.is_finite() {
            return Err(Error::Config("nu must be finite".into()));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            class: self.tol,
            loc: self.tol,
            ..Tolerances::default()
        }
    }

    fn test_function(&self) -> WeightedSeries {
        match &self.series {
            Some(coeffs) => WeightedSeries::new(self.nu, coeffs.clone()),
            None => WeightedSeries::monomial(self.nu, 1, 1),
        }
    }
}

/// 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

pub fn orbit_csv(orbit: &Orbit) -> String {
    let mut out = String::from("k,distance,running_min\n");
    for r in &orbit.records {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.k,
            format_real(r.distance),
            format_real(r.running_min)
        );
    }
    out
}

fn verdict_csv(v: &RecurrenceVerdict) -> String {
    let opt = |x: Option<f64>| x.map(format_real).unwrap_or_default();
    format!(
        "recurrent,rule,gamma,mu,lower,upper,boundary\n{},{:?},{},{},{},{},{}\n",
        v.recurrent,
        v.rule,
        opt(v.gamma),
        opt(v.mu),
        opt(v.bounds.lower),
        opt(v.bounds.upper),
        v.boundary
    )
}

fn json_only(cmd: Command, cfg: &RunConfig) -> Result<()> {
    match cfg.format {
        Some(Format::Csv) => Err(Error::Config(format!("{cmd:?} output is JSON only"))),
        _ => Ok(()),
    }
}

pub fn run_command(cmd: Command, map: &MoebiusMap, cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let tol = cfg.tolerances();
    match cmd {
        Command::Classify => {
            json_only(cmd, cfg)?;
            Ok(to_json(&classify_with(map, &tol)?))
        }
        Command::Decide => {
            let v = decide_with(map, cfg.nu, cfg.lambda, &tol)?;
            Ok(match cfg.format {
                Some(Format::Csv) => verdict_csv(&v),
                _ => to_json(&v),
            })
        }
        Command::Orbit => {
            let f = cfg
                .test_function()
                .resized(cfg.degree.max(cfg.test_function().degree()));
            let orbit = orbit_distances(&f, map, cfg.lambda, cfg.nu, cfg.max_iter)?;
            Ok(match cfg.format {
                Some(Format::Json) => to_json(&json!({
                    "records": orbit.records,
                    "overflowed": orbit.overflowed,
                })),
                _ => orbit_csv(&orbit),
            })
        }
        Command::Matrix => {
            json_only(cmd, cfg)?;
            let m = operator_matrix(map, cfg.nu, cfg.lambda, cfg.size)?;
            let eig = truncated_eigenvalues(&m)?;
            Ok(to_json(&json!({ "matrix": m, "eigenvalues": eig })))
        }
        Command::Kernel => {
            json_only(cmd, cfg)?;
            kernel_report(cfg)
        }
    }
}

fn kernel_report(cfg: &RunConfig) -> Result<String> {
    let k = reproducing_kernel(&KernelSpec {
        w: cfg.w,
        nu: cfg.nu,
        degree: cfg.degree,
    })?;
    let t = cfg.w.norm_sqr();
    let norm_sq = norm_nu_sq(&k);
    let truncated = kernel_function(t, cfg.nu, cfg.degree);
    let f = cfg.test_function();
    let pairing = inner_product(&f, &k)?;
    let value = eval_series(&f, cfg.w);
    Ok(to_json(&json!({
        "w": cfg.w,
        "nu": cfg.nu,
        "degree": cfg.degree,
        "coefficients": k.coeffs,
        "norm_check": {
            "norm_sq": norm_sq,
            "kernel_series": truncated,
            "difference": (norm_sq - truncated).abs(),
            "tail_bound": kernel_tail_bound(t, cfg.nu, cfg.degree),
        },
        "reproducing_check": {
            "function": f.coeffs.iter().map(|z| format_complex(*z)).collect::<Vec<_>>(),
            "inner_product": pairing,
            "value": value,
            "error": (pairing - value).norm(),
        },
    })))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub nu: f64,
    pub lambda_modulus: f64,
    pub recurrent: bool,
    pub rule: Rule,
    pub boundary: bool,
}

/// Verdicts on the `(ν, |λ|)` grid, ν-major. The symbol is classified once;
/// cells are evaluated in parallel and collected in grid order.
pub fn sweep(
    map: &MoebiusMap,
    nu_grid: &[f64],
    modulus_grid: &[f64],
    tol: &Tolerances,
) -> Result<Vec<SweepRow>> {
    if let Some(bad) = modulus_grid.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        return Err(Error::Config(format!(
            "|lambda| grid values must be positive, got {bad}"
        )));
    }
    let class = classify_with(map, tol)?;
    let cells: Vec<(f64, f64)> = nu_grid
        .iter()
        .flat_map(|&nu| modulus_grid.iter().map(move |&m| (nu, m)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(nu, m)| {
            let v = verdict_for(&class, nu, Complex64::new(m, 0.0));
            SweepRow {
                nu,
                lambda_modulus: m,
                recurrent: v.recurrent,
                rule: v.rule,
                boundary: v.boundary,
            }
        })
        .collect())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("nu,lambda_modulus,recurrent,rule,boundary\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:?},{}",
            format_real(r.nu),
            format_real(r.lambda_modulus),
            if r.recurrent { "yes" } else { "no" },
            r.rule,
            r.boundary
        );
    }
    out
}

/// `start:stop:count` (inclusive, evenly spaced) or a comma list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let start = parse_real(parts[0].trim(), 0)?;
        let stop = parse_real(parts[1].trim(), parts[0].len() + 1)?;
        let count: usize = parts[2].trim().parse().map_err(|_| {
            parse_err(
                parts[0].len() + parts[1].len() + 2,
                "grid count must be an integer",
            )
        })?;
        return Ok(linspace(start, stop, count));
    }
    let mut offset = 0;
    let mut out = Vec::new();
    for part in text.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push(parse_real(part.trim(), offset + lead)?);
        offset += part.len() + 1;
    }
    Ok(out)
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::Category;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("-1.5i").unwrap(), c(0.0, -1.5));
        assert_eq!(parse_complex(" 1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("1e-3-2.5e2i").unwrap(), c(1e-3, -250.0));
        assert_eq!(parse_complex("-0.5-0i").unwrap(), c(-0.5, -0.0));
        assert!(matches!(
            parse_complex("1+i"),
            Err(Error::Parse { position: 2, .. })
        ));
        assert!(matches!(
            parse_complex("1+2j"),
            Err(Error::Parse { position: 3, .. })
        ));
        assert!(matches!(parse_complex(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn map_spec_examples() {
        let m = parse_map_spec("3,1,1,3").unwrap();
        assert!(m.projectively_eq(&MoebiusMap::real(3.0, 1.0, 1.0, 3.0).unwrap(), 1e-15));
        let m = parse_map_spec("hyperbolic-nonauto").unwrap();
        assert!(m.projectively_eq(&MoebiusMap::real(1.0, 1.0, 0.0, 2.0).unwrap(), 1e-15));
        assert_eq!(parse_map_spec("1,1,0,0").unwrap_err(), Error::Degenerate);
        assert!(matches!(parse_map_spec("1,0.5,0,1"), Err(Error::NotSelfMap(_))));
        assert!(matches!(
            parse_map_spec("1,2,x,4"),
            Err(Error::Parse { position: 4, .. })
        ));
        assert!(matches!(parse_map_spec("1,2,3"), Err(Error::Parse { .. })));
    }

    #[test]
    fn presets_match_their_rows() {
        let expected = [
            Category::HyperbolicAutomorphism,
            Category::ParabolicAutomorphism,
            Category::HyperbolicNonAutomorphism,
            Category::ParabolicNonAutomorphism,
            Category::InteriorExterior,
            Category::InteriorBoundary,
            Category::EllipticIrrationalRotation,
            Category::EllipticRationalRotation,
        ];
        for ((name, _), cat) in PRESETS.iter().zip(expected) {
            let m = parse_map_spec(name).unwrap();
            assert_eq!(
                classify_with(&m, &Tolerances::default()).unwrap().category,
                cat,
                "{name}"
            );
        }
    }

    #[test]
    fn display_round_trips() {
        for (name, _) in PRESETS {
            let m = parse_map_spec(name).unwrap();
            let back = parse_map_spec(&m.to_string()).unwrap();
            assert!(back.projectively_eq(&m, 1e-15));
        }
    }

    #[test]
    fn command_examples() {
        let cfg = RunConfig {
            nu: 0.0,
            lambda: c(1.0, 0.0),
            ..RunConfig::default()
        };
        let out = run_command(Command::Decide, &parse_map_spec("parabolic-auto").unwrap(), &cfg).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["recurrent"], true);
        assert_eq!(v["rule"], "ParabolicAutomorphism");

        let cfg = RunConfig {
            max_iter: 5,
            ..RunConfig::default()
        };
        let out = run_command(
            Command::Orbit,
            &parse_map_spec("elliptic-rational").unwrap(),
            &cfg,
        )
        .unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "k,distance,running_min");
        assert_eq!(lines.len(), 6);
        assert!(lines[3].starts_with("3,0.0000000000000000e0,"));

        let out = run_command(
            Command::Classify,
            &parse_map_spec("0,1,-1,2").unwrap(),
            &RunConfig::default(),
        )
        .unwrap();
        assert!(out.contains("\"ParabolicNonAutomorphism\""));
    }

    #[test]
    fn matrix_and_kernel_reports() {
        let cfg = RunConfig {
            size: 4,
            ..RunConfig::default()
        };
        let out = run_command(
            Command::Matrix,
            &parse_map_spec("hyperbolic-nonauto").unwrap(),
            &cfg,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["matrix"]["n"], 4);
        assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 4);

        let cfg = RunConfig {
            degree: 64,
            w: c(0.3, 0.4),
            series: Some(vec![c(1.0, 0.0), c(0.0, 2.0)]),
            ..RunConfig::default()
        };
        let out = run_command(Command::Kernel, &MoebiusMap::identity(), &cfg).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["reproducing_check"]["error"].as_f64().unwrap() < 1e-15);
        assert_eq!(v["coefficients"].as_array().unwrap().len(), 65);

        let csv = RunConfig {
            format: Some(Format::Csv),
            ..RunConfig::default()
        };
        assert!(matches!(
            run_command(Command::Matrix, &MoebiusMap::identity(), &csv),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn config_validation() {
        let bad = RunConfig {
            tol: 0.0,
            ..RunConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = RunConfig {
            degree: 0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RunConfig {
            max_iter: 0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn sweep_examples() {
        let tol = Tolerances::default();
        let rows = sweep(
            &parse_map_spec("hyperbolic-auto").unwrap(),
            &[0.0],
            &[0.5, 1.0, 1.41, 1.42],
            &tol,
        )
        .unwrap();
        let pattern: Vec<bool> = rows.iter().map(|r| r.recurrent).collect();
        assert_eq!(pattern, vec![false, true, true, false]);

        let grid = linspace(-1.0, 2.0, 7);
        let rows = sweep(
            &parse_map_spec("parabolic-nonauto").unwrap(),
            &grid,
            &[0.5, 1.0, 3.0],
            &tol,
        )
        .unwrap();
        assert!(rows.iter().all(|r| !r.recurrent));

        for name in ["elliptic-rational", "elliptic-irrational"] {
            let rows = sweep(&parse_map_spec(name).unwrap(), &grid, &[1.0], &tol).unwrap();
            assert!(rows.iter().all(|r| r.recurrent));
        }
    }

    #[test]
    fn sweep_order_is_nu_major() {
        let rows = sweep(
            &MoebiusMap::identity(),
            &[0.0, 1.0],
            &[0.5, 1.0, 2.0],
            &Tolerances::default(),
        )
        .unwrap();
        let cells: Vec<(f64, f64)> = rows.iter().map(|r| (r.nu, r.lambda_modulus)).collect();
        assert_eq!(
            cells,
            vec![
                (0.0, 0.5),
                (0.0, 1.0),
                (0.0, 2.0),
                (1.0, 0.5),
                (1.0, 1.0),
                (1.0, 2.0)
            ]
        );
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("nu,lambda_modulus,recurrent,rule,boundary\n"));
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0.5, 2").unwrap(), vec![0.5, 2.0]);
        assert!(matches!(parse_grid("1,a"), Err(Error::Parse { position: 2, .. })));
    }
}
