//! Command-line front end.
//!
//! Every failure is reported on standard error as a single line
//! `error[<CODE>]: <message>` and yields a nonzero exit status.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::fitting::fit_curve_with_uncertainty;
use crate::io::{
    load_config, parse_curve, parse_number, parse_quantity, read_report, write_curve, write_report, Quantity, Report,
    ReportEntry, ReportFormat,
};
use crate::mixture::{LayerInput, Measured, MixtureReport, PropertyMode};
use crate::model::{coefficients_for, CoefficientSource, LoadDeflectionLaw, PressureDeflectionCurve};
use crate::montecarlo::{UncertaintySpec, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::poisson::solve_poisson;
use crate::solver::{build_coefficient_table, extract_coefficients, reference_membrane, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "bulgekit", version, about = "Bulge-test analysis of thin-film membranes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic load-deflection curve for a configured membrane.
    Simulate(SimulateArgs),
    /// Fit a measured curve: residual stress and Young's modulus.
    Fit(FitArgs),
    /// Poisson's ratio from a square and a rectangular fit report.
    Poisson(PoissonArgs),
    /// Property of one unknown layer of a multilayer film.
    Mixture(MixtureArgs),
    /// Shape coefficients C1, f and alpha for one aspect ratio.
    Coeffs(CoeffsArgs),
    /// Regenerate the solver coefficient table.
    Table(TableArgs),
}

#[derive(Debug, Args)]
pub struct ReportOptions {
    /// Report format; defaults to text for `.txt` files and JSON otherwise.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args)]
pub struct MonteCarloOptions {
    /// Random seed for the uncertainty estimate.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of Monte-Carlo draws.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated pressures or `START:STOP:N`, with optional units
    /// (`Pa`, `kPa`, `mbar`, `bar`).
    #[arg(long, allow_hyphen_values = true)]
    pub pressures: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Include the bending term.
    #[arg(long)]
    pub bending: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub curve: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    /// Assumed Poisson's ratio, overriding the configuration.
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub report: ReportOptions,
    #[command(flatten)]
    pub monte_carlo: MonteCarloOptions,
}

#[derive(Debug, Args)]
pub struct PoissonArgs {
    /// JSON fit report of the square membrane.
    #[arg(long)]
    pub square: PathBuf,
    /// JSON fit report of the rectangular membrane.
    #[arg(long)]
    pub rect: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub report: ReportOptions,
    #[command(flatten)]
    pub monte_carlo: MonteCarloOptions,
}

#[derive(Debug, Args)]
pub struct MixtureArgs {
    /// biaxial_modulus, residual_stress, youngs_modulus or poisson_ratio.
    #[arg(long, default_value = "biaxial_modulus")]
    pub mode: String,
    /// Composite value `v[:u]`, e.g. `147GPa:14GPa`.
    #[arg(long, allow_hyphen_values = true)]
    pub composite: String,
    /// Known layer `name:t:value[:u]`; `t` may carry an uncertainty as
    /// `90nm+-2nm`. Repeatable.
    #[arg(long = "layer", allow_hyphen_values = true)]
    pub layers: Vec<String>,
    /// Unknown layer `name:t`.
    #[arg(long)]
    pub unknown: String,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub report: ReportOptions,
    #[command(flatten)]
    pub monte_carlo: MonteCarloOptions,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    /// Aspect ratio b/a (≥ 1).
    #[arg(long)]
    pub ratio: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: f64,
    #[arg(long, default_value = "vlassak-nix")]
    pub source: String,
    /// Recompute C1 and f with the membrane solver.
    #[arg(long)]
    pub compute: bool,
    /// Solver grid nodes per side (odd).
    #[arg(long, default_value_t = 65)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Aspect ratios, comma-separated or `START:STOP:N`.
    #[arg(long)]
    pub ratios: String,
    /// Poisson's ratios, comma-separated or `START:STOP:N`.
    #[arg(long, allow_hyphen_values = true)]
    pub nus: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 65)]
    pub grid: usize,
}

/// Parse the arguments, run the command and return the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(err, "error[USAGE]: {first}");
            return 2;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error[{}]: {message}", e.code());
            1
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Simulate(a) => simulate(a, out),
        Command::Fit(a) => fit(a, out, err),
        Command::Poisson(a) => poisson(a, out, err),
        Command::Mixture(a) => mixture(a, out, err),
        Command::Coeffs(a) => coeffs(a, out),
        Command::Table(a) => table(a, out),
    }
}

fn say(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(text)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn warn(err: &mut dyn Write, message: &str) {
    let _ = writeln!(err, "warning: {message}");
}

/// `a,b,c` or `START:STOP:N` (inclusive, evenly spaced).
pub fn parse_list(text: &str, one: impl Fn(&str) -> Result<f64>) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Usage("empty list".into()));
    }
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let start = one(parts[0])?;
        let stop = one(parts[1])?;
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("'{}' is not a count", parts[2].trim())))?;
        if n == 0 {
            return Err(Error::Usage("range needs at least one point".into()));
        }
        if n == 1 {
            return Ok(vec![start]);
        }
        return Ok((0..n)
            .map(|k| {
                if k == n - 1 {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (n - 1) as f64
                }
            })
            .collect());
    }
    if parts.len() != 1 {
        return Err(Error::Usage(format!("'{text}' is neither a list nor START:STOP:N")));
    }
    text.split(',')
        .map(|s| {
            if s.trim().is_empty() {
                Err(Error::Usage(format!("empty entry in '{text}'")))
            } else {
                one(s)
            }
        })
        .collect()
}

fn report_format(opts: &ReportOptions, path: &Path) -> Result<ReportFormat> {
    match &opts.format {
        Some(f) => f.parse(),
        None => Ok(ReportFormat::from_path(path)),
    }
}

fn spec_with(opts: &MonteCarloOptions, base: UncertaintySpec) -> UncertaintySpec {
    UncertaintySpec {
        n_samples: opts.samples.unwrap_or(base.n_samples),
        seed: opts.seed.unwrap_or(base.seed),
        ..base
    }
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let exp = load_config(&a.config)?;
    let material = exp
        .material
        .ok_or_else(|| Error::invalid("simulate needs a 'material' block in the configuration"))?;
    if a.pressures.trim().is_empty() {
        return Err(Error::Usage("--pressures is empty".into()));
    }
    let pressures = parse_list(&a.pressures, |s| parse_quantity(s, Quantity::Pressure))?;
    let law = LoadDeflectionLaw::new(&exp.geometry, &material, exp.fit_options.source, a.bending)?;
    let curve = PressureDeflectionCurve::synthesize(&law, &pressures, exp.label.clone())?;
    write_curve(&curve, &a.out)?;
    let h_max = curve.samples().last().map(|s| s.1).unwrap_or(0.0);
    say(
        out,
        format_args!(
            "wrote {} samples to {} (max deflection {:.3} um)",
            curve.len(),
            a.out.display(),
            h_max * 1e6
        ),
    )
}

fn fit(a: &FitArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut exp = load_config(&a.config)?;
    if let Some(nu) = a.nu {
        crate::model::check_poisson_ratio(nu)?;
        exp.fit_options.nu_assumed = nu;
    }
    let parsed = parse_curve(&a.curve)?;
    for w in &parsed.warnings {
        warn(err, w);
    }
    let mut curve = parsed.curve;
    if !exp.label.is_empty() {
        curve.label = exp.label.clone();
    }
    let spec = spec_with(&a.monte_carlo, exp.uncertainty);
    let result = fit_curve_with_uncertainty(&curve, &exp.geometry, &exp.fit_options, &spec)?;
    say(
        out,
        format_args!(
            "{}: sigma0 = {:.1} +- {:.1} MPa, E = {:.1} +- {:.1} GPa (nu_assumed = {}, r^2 = {:.6}, {} points)",
            result.label,
            result.sigma0 * 1e-6,
            result.u_sigma0 * 1e-6,
            result.youngs_modulus * 1e-9,
            result.u_youngs_modulus * 1e-9,
            result.nu_assumed,
            result.r_squared,
            result.points_used
        ),
    )?;
    let mut report = Report::new().with_entry(ReportEntry::Fit(result));
    report.provenance.coefficient_source = Some(exp.fit_options.source);
    report.provenance.seed = Some(spec.seed);
    report.provenance.n_samples = Some(spec.n_samples);
    report.assumptions = exp.assumptions;
    write_report(&report, &a.out, report_format(&a.report, &a.out)?)
}

fn single_fit(path: &Path) -> Result<crate::fitting::FitResult> {
    let report = read_report(path)?;
    let mut fits = report.fits();
    match (fits.next(), fits.next()) {
        (Some(f), None) => Ok(f.clone()),
        (None, _) => Err(Error::invalid(format!("{} contains no fit result", path.display()))),
        (Some(_), Some(_)) => Err(Error::invalid(format!("{} contains more than one fit result", path.display()))),
    }
}

fn poisson(a: &PoissonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let square = single_fit(&a.square)?;
    let rect = single_fit(&a.rect)?;
    let source = square.coefficient_source;
    let spec = spec_with(&a.monte_carlo, UncertaintySpec::new(DEFAULT_SAMPLES, DEFAULT_SEED));
    let r = solve_poisson(&square, &rect, source, &spec)?;
    say(
        out,
        format_args!("{}/{}: nu = {:.4} +- {:.4}", r.pair_labels.1, r.pair_labels.0, r.nu, r.delta_nu),
    )?;
    for w in &r.warnings {
        warn(err, w);
    }
    let mut report = Report::new().with_entry(ReportEntry::Poisson(r));
    report.provenance.coefficient_source = Some(source);
    report.provenance.seed = Some(spec.seed);
    report.provenance.n_samples = Some(spec.n_samples);
    write_report(&report, &a.out, report_format(&a.report, &a.out)?)
}

/// `v` or `v:u` in the unit of the mixture mode.
fn parse_measured(text: &str, mode: PropertyMode) -> Result<Measured> {
    let value = |s: &str| match mode {
        PropertyMode::PoissonRatio => parse_number(s),
        _ => parse_quantity(s, Quantity::Pressure),
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [v] => Measured::new(value(v)?, 0.0),
        [v, u] => Measured::new(value(v)?, value(u)?),
        _ => Err(Error::Usage(format!("'{text}' is not of the form v[:u]"))),
    }
}

/// `90nm` or `90nm+-2nm`.
fn parse_thickness(text: &str) -> Result<Measured> {
    match text.split_once("+-") {
        Some((t, u)) => Measured::new(parse_quantity(t, Quantity::Length)?, parse_quantity(u, Quantity::Length)?),
        None => Measured::new(parse_quantity(text, Quantity::Length)?, 0.0),
    }
}

fn parse_layer(text: &str, mode: PropertyMode) -> Result<LayerInput> {
    let parts: Vec<&str> = text.splitn(3, ':').collect();
    if parts.len() != 3 || parts[0].trim().is_empty() {
        return Err(Error::Usage(format!("layer '{text}' is not of the form name:t:value[:u]")));
    }
    Ok(LayerInput {
        name: parts[0].trim().to_string(),
        thickness: parse_thickness(parts[1])?,
        value: Some(parse_measured(parts[2], mode)?),
    })
}

fn parse_unknown(text: &str) -> Result<LayerInput> {
    match text.split_once(':') {
        Some((name, t)) if !name.trim().is_empty() => Ok(LayerInput {
            name: name.trim().to_string(),
            thickness: parse_thickness(t)?,
            value: None,
        }),
        _ => Err(Error::Usage(format!("unknown layer '{text}' is not of the form name:t"))),
    }
}

fn format_value(v: f64, mode: PropertyMode) -> String {
    match mode {
        PropertyMode::PoissonRatio => format!("{v:.4}"),
        _ if v.abs() >= 1e9 => format!("{:.2} GPa", v * 1e-9),
        _ => format!("{:.2} MPa", v * 1e-6),
    }
}

fn mixture(a: &MixtureArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mode: PropertyMode = a.mode.parse()?;
    let composite = parse_measured(&a.composite, mode)?;
    let mut layers = a
        .layers
        .iter()
        .map(|l| parse_layer(l, mode))
        .collect::<Result<Vec<_>>>()?;
    layers.push(parse_unknown(&a.unknown)?);
    let spec = spec_with(&a.monte_carlo, UncertaintySpec::new(DEFAULT_SAMPLES, DEFAULT_SEED));
    let m = MixtureReport::run(mode, composite, layers, &spec)?;
    say(
        out,
        format_args!(
            "{}: {} = {} +- {}",
            m.result.unknown_layer,
            mode,
            format_value(m.result.value, mode),
            format_value(m.result.uncertainty, mode)
        ),
    )?;
    if let Some(note) = &m.note {
        warn(err, note);
    }
    let mut report = Report::new().with_entry(ReportEntry::Mixture(m));
    report.provenance.seed = Some(spec.seed);
    report.provenance.n_samples = Some(spec.n_samples);
    write_report(&report, &a.out, report_format(&a.report, &a.out)?)
}

fn coeffs(a: &CoeffsArgs, out: &mut dyn Write) -> Result<()> {
    if a.compute {
        let config = SolverConfig::default().with_grid(a.grid);
        config.validate()?;
        let (g, m) = reference_membrane(a.ratio, a.nu)?;
        let fit = extract_coefficients(&g, &m, &config)?;
        return say(
            out,
            format_args!(
                "b/a = {}, nu = {}: c1 = {:.5}, f = {:.5} (solver, grid {}x{}, fit residual {:.2e})",
                a.ratio, a.nu, fit.c1, fit.f, config.grid_nx, config.grid_ny, fit.relative_residual
            ),
        );
    }
    let source: CoefficientSource = a.source.parse()?;
    let c = coefficients_for(a.ratio, a.nu, source)?;
    say(
        out,
        format_args!(
            "b/a = {}, nu = {}: c1 = {:.5}, f = {:.5}, alpha = {:.4e} (source {})",
            a.ratio, a.nu, c.c1, c.f, c.alpha, c.source
        ),
    )
}

fn table(a: &TableArgs, out: &mut dyn Write) -> Result<()> {
    let ratios = parse_list(&a.ratios, parse_number)?;
    let nus = parse_list(&a.nus, parse_number)?;
    let config = SolverConfig::default().with_grid(a.grid);
    let table = build_coefficient_table(&ratios, &nus, &config)?;
    table.write_csv(&a.out)?;
    say(
        out,
        format_args!("wrote {} entries to {}", table.entries().len(), a.out.display()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn lists_and_ranges() {
        let p = |s: &str| parse_quantity(s, Quantity::Pressure);
        assert_eq!(parse_list("1,2kPa,3mbar", p).unwrap(), vec![1.0, 2000.0, 300.0]);
        assert_eq!(parse_list("0:1bar:3", p).unwrap(), vec![0.0, 5e4, 1e5]);
        assert!(matches!(parse_list("", p), Err(Error::Usage(_))));
        assert!(parse_list("1,,2", p).is_err());
    }

    #[test]
    fn coeffs_prints_table_values() {
        let (code, out, _) = run_str(&["bulgekit", "coeffs", "--ratio", "1", "--nu", "0.3"]);
        assert_eq!(code, 0);
        assert!(out.contains("c1 = 3.39000"), "{out}");
    }

    #[test]
    fn errors_are_prefixed() {
        let (code, _, err) = run_str(&["bulgekit", "coeffs", "--ratio", "3", "--nu", "0.3", "--source", "ms"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error[UNSUPPORTED_RATIO]: "), "{err}");
        let (code, _, err) = run_str(&["bulgekit", "frobnicate"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error[USAGE]: "), "{err}");
    }

    #[test]
    fn layer_syntax() {
        let l = parse_layer("nitride:90nm+-2nm:212GPa:8GPa", PropertyMode::YoungsModulus).unwrap();
        assert_eq!(l.thickness.value, 90.0 * 1e-9);
        assert_eq!(l.thickness.uncertainty, 2.0 * 1e-9);
        assert_eq!(l.value.unwrap().value, 212e9);
        let l = parse_layer("n:90nm:0.29", PropertyMode::PoissonRatio).unwrap();
        assert_eq!(l.value.unwrap(), Measured::exact(0.29));
        assert!(parse_layer("n:90nm", PropertyMode::PoissonRatio).is_err());
        let u = parse_unknown("oxide:98nm").unwrap();
        assert!(u.value.is_none());
    }
}
