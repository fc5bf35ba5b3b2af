use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lfm_recurrence::cli::{
    parse_complex, parse_grid, parse_map_spec_with, parse_series, run_command, sweep, sweep_csv, Command,
    Format, RunConfig,
};
use lfm_recurrence::Error;

#[derive(Parser)]
#[command(
    name = "lfmrec",
    version,
    about = "Recurrence of linear fractional composition operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fixed points and category of the symbol.
    Classify(Common),
    /// Recurrence verdict for lambda C_phi on S_nu.
    Decide(Common),
    /// Distances ||(lambda C_phi)^k f - f|| for k = 1..max-iter.
    Orbit(Common),
    /// Finite section of lambda C_phi and its eigenvalues.
    Matrix(Common),
    /// Reproducing kernel coefficients and norm checks.
    Kernel(Common),
    /// Verdicts over a (nu, |lambda|) grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Symbol {
    /// Coefficients "a,b,c,d" as complex literals.
    #[arg(long, conflicts_with = "preset", allow_hyphen_values = true)]
    map: Option<String>,
    /// Named example map.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    symbol: Symbol,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    nu: f64,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    lambda: String,
    #[arg(long, default_value_t = 256)]
    degree: usize,
    #[arg(long, default_value_t = 1000)]
    max_iter: u64,
    /// json or csv.
    #[arg(long)]
    format: Option<String>,
    /// Section size for `matrix`.
    #[arg(long, default_value_t = 16)]
    size: usize,
    /// Kernel centre for `kernel`.
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    w: String,
    /// Test function coefficients "c0,c1,..."; defaults to z.
    #[arg(long, allow_hyphen_values = true)]
    series: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    symbol: Symbol,
    /// "start:stop:count" or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    nu_grid: String,
    /// |lambda| values, same syntax.
    #[arg(long)]
    lambda_grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Symbol {
    fn resolve(&self, cfg: &RunConfig) -> Result<lfm_recurrence::MoebiusMap, Error> {
        let text = match (&self.map, &self.preset) {
            (Some(m), None) => m.as_str(),
            (None, Some(p)) => {
                if lfm_recurrence::cli::preset(p).is_none() {
                    return Err(Error::Config(format!("unknown preset '{p}'")));
                }
                p.as_str()
            }
            _ => {
                return Err(Error::Config(
                    "exactly one of --map or --preset is required".into(),
                ))
            }
        };
        parse_map_spec_with(text, &cfg.tolerances())
    }
}

fn config(c: &Common) -> Result<RunConfig, Error> {
    let cfg = RunConfig {
        nu: c.nu,
        lambda: parse_complex(&c.lambda)?,
        degree: c.degree,
        max_iter: c.max_iter,
        tol: c.symbol.tol,
        format: c.format.as_deref().map(str::parse::<Format>).transpose()?,
        size: c.size,
        w: parse_complex(&c.w)?,
        series: match &c.series {
            Some(s) => Some(parse_series(s, c.nu)?.coeffs),
            None => None,
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let tail = if text.ends_with('\n') { "" } else { "\n" };
            match write!(stdout, "{text}{tail}").and_then(|()| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Error::Config(format!("stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let (cmd, common) = match &cli.command {
        Cmd::Classify(c) => (Command::Classify, c),
        Cmd::Decide(c) => (Command::Decide, c),
        Cmd::Orbit(c) => (Command::Orbit, c),
        Cmd::Matrix(c) => (Command::Matrix, c),
        Cmd::Kernel(c) => (Command::Kernel, c),
        Cmd::Sweep(s) => {
            let cfg = RunConfig {
                tol: s.symbol.tol,
                ..RunConfig::default()
            };
            cfg.validate()?;
            let map = s.symbol.resolve(&cfg)?;
            let rows = sweep(
                &map,
                &parse_grid(&s.nu_grid)?,
                &parse_grid(&s.lambda_grid)?,
                &cfg.tolerances(),
            )?;
            return emit(&sweep_csv(&rows), s.out.as_ref());
        }
    };
    let cfg = config(common)?;
    // the kernel report does not depend on the symbol
    let map = match (cmd, &common.symbol.map, &common.symbol.preset) {
        (Command::Kernel, None, None) => lfm_recurrence::MoebiusMap::identity(),
        _ => common.symbol.resolve(&cfg)?,
    };
    emit(&run_command(cmd, &map, &cfg)?, common.out.as_ref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
