//! Command-line front end. This is the only module that touches files.
//!
//! Exit codes: 0 on success, 2 on user error (bad arguments, unreadable or
//! invalid input, unwritable output), 3 when the twirl fails to converge.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::family::{self, correlation_report, TwoParamState, CLASSIFY_TOL};
use crate::locc::{self, LoccError, TwirlOptions, TWIRL_TOL};
use crate::measure::{self, OptimizerConfig};
use crate::opcore::{
    self, hermiticity_residual, parse_state_json, to_state_json, DensityMatrix, RawState,
};

#[derive(Debug, Parser)]
#[command(
    name = "qudit-discord",
    version,
    about = "Discord, classical correlation and negativity of qubit-qudit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlations of a single family member from the closed forms.
    Corr(CorrArgs),
    /// CSV sweep of the closed forms along one parameter.
    Sweep(SweepArgs),
    /// Twirl a state file onto the two-parameter family.
    Twirl(TwirlArgs),
    /// Numeric discord of an arbitrary state file.
    Discord(DiscordArgs),
    /// Validation, family membership and PPT status of a state file.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct CorrArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long = "dim", default_value_t = 3)]
    pub dim: usize,
    /// Also run the measurement optimizer on the assembled state.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Param {
    Alpha,
    Beta,
    Gamma,
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::Gamma => "gamma",
        })
    }
}

/// `name=value`, e.g. `gamma=0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParam {
    pub param: Param,
    pub value: f64,
}

impl FromStr for FixedParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
        let param = Param::from_str(name.trim(), true)?;
        let value = value
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad value in {s:?}: {e}"))?;
        Ok(Self { param, value })
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "dim", default_value_t = 3)]
    pub dim: usize,
    /// Parameter held constant, as NAME=VALUE.
    #[arg(long)]
    pub fix: FixedParam,
    /// Parameter swept from --from to --to.
    #[arg(long, value_enum)]
    pub vary: Param,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TwirlArgs {
    /// Input state file.
    pub input: PathBuf,
    /// Where to write the twirled state.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the intermediate weights a_j, b, c+, c-.
    #[arg(long)]
    pub report: bool,
    #[arg(long, default_value_t = TWIRL_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct DiscordArgs {
    pub input: PathBuf,
    /// Coarse grid points in the polar angle.
    #[arg(long, default_value_t = 64)]
    pub polar: usize,
    /// Coarse grid points in the azimuth.
    #[arg(long, default_value_t = 128)]
    pub azimuthal: usize,
    /// Extra simplex refinements from seeded random directions.
    #[arg(long, default_value_t = 0)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Frobenius tolerance for recognizing family members.
    #[arg(long, default_value_t = CLASSIFY_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = CLASSIFY_TOL)]
    pub tol: f64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Convergence(LoccError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Convergence(_) => 3,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// `%.12g`-style formatting: 12 significant digits, no locale.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { "-" } else { "+" };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    trim_zeros(&format!("{:.*}", (11 - exp) as usize, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Corr(args) => cmd_corr(&args, stdout),
        Command::Sweep(args) => cmd_sweep(&args, stdout),
        Command::Twirl(args) => cmd_twirl(&args, stdout),
        Command::Discord(args) => cmd_discord(&args, stdout),
        Command::Check(args) => cmd_check(&args, stdout),
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn line(buf: &mut String, key: &str, value: impl fmt::Display) {
    buf.push_str(&format!("{key:<22}{value}\n"));
}

pub fn cmd_corr(args: &CorrArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let s = TwoParamState::new(args.dim, args.alpha, args.gamma)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let r = correlation_report(&s);
    let mut buf = String::new();
    line(&mut buf, "d", s.d());
    line(&mut buf, "alpha", fmt_num(s.alpha()));
    line(&mut buf, "beta", fmt_num(s.beta()));
    line(&mut buf, "gamma", fmt_num(s.gamma()));
    line(&mut buf, "mutual_info", fmt_num(r.mutual_info));
    line(&mut buf, "classical", fmt_num(r.classical));
    line(&mut buf, "discord", fmt_num(r.discord));
    line(&mut buf, "negativity", fmt_num(r.negativity));
    if args.numeric {
        let rho = family::build_state(&s);
        let config = OptimizerConfig {
            seed: args.seed,
            ..Default::default()
        };
        let est = measure::discord_numeric(&rho, &config);
        let neg = opcore::negativity_oracle(&rho);
        line(&mut buf, "mutual_info_numeric", fmt_num(est.mutual_info));
        line(
            &mut buf,
            "mutual_info_diff",
            format!("{:.3e}", est.mutual_info - r.mutual_info),
        );
        line(&mut buf, "classical_numeric", fmt_num(est.classical.value));
        line(
            &mut buf,
            "classical_diff",
            format!("{:.3e}", est.classical.value - r.classical),
        );
        line(&mut buf, "discord_numeric", fmt_num(est.discord));
        line(
            &mut buf,
            "discord_diff",
            format!("{:.3e}", est.discord - r.discord),
        );
        line(&mut buf, "negativity_numeric", fmt_num(neg));
        line(
            &mut buf,
            "negativity_diff",
            format!("{:.3e}", neg - r.negativity),
        );
    }
    emit(&args.out, &buf, stdout)
}

/// One grid point of a sweep; `state` is `None` outside the valid region.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub state: Option<TwoParamState>,
}

pub const SWEEP_HEADER: &str =
    "param,alpha,beta,gamma,classical,discord,mutual_info,negativity,invalid";

/// Grid of `steps` points from `from` to `to` (both included).
pub fn sweep_rows(args: &SweepArgs) -> Result<Vec<SweepRow>, CliError> {
    if args.steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    if args.fix.param == args.vary {
        return Err(CliError::Usage(format!(
            "cannot both fix and vary {}",
            args.vary
        )));
    }
    if args.dim < 3 {
        return Err(CliError::Usage("--dim must be at least 3".into()));
    }
    let outer = 2.0 * (args.dim - 2) as f64;
    let rows = (0..args.steps)
        .map(|i| {
            let x = if i + 1 == args.steps {
                args.to
            } else {
                args.from + (args.to - args.from) * i as f64 / (args.steps - 1) as f64
            };
            let mut known = [None; 3];
            known[args.fix.param as usize] = Some(args.fix.value);
            known[args.vary as usize] = Some(x);
            // Fill the missing parameter from 2(d−2)α + 3β + γ = 1.
            let (alpha, beta, gamma) = match known {
                [Some(a), Some(b), None] => (a, b, 1.0 - outer * a - 3.0 * b),
                [Some(a), None, Some(g)] => (a, (1.0 - outer * a - g) / 3.0, g),
                [None, Some(b), Some(g)] => ((1.0 - 3.0 * b - g) / outer, b, g),
                _ => unreachable!("exactly two parameters are known"),
            };
            let state = TwoParamState::new(args.dim, alpha, gamma).ok();
            SweepRow {
                param: x,
                alpha,
                beta: state.map_or(beta, |s| s.beta()),
                gamma,
                state,
            }
        })
        .collect();
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let head = [row.param, row.alpha, row.beta, row.gamma]
            .map(fmt_num)
            .join(",");
        match &row.state {
            Some(s) => {
                let r = correlation_report(s);
                let tail = [r.classical, r.discord, r.mutual_info, r.negativity]
                    .map(fmt_num)
                    .join(",");
                out.push_str(&format!("{head},{tail},0\n"));
            }
            None => out.push_str(&format!("{head},,,,,1\n")),
        }
    }
    out
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let rows = sweep_rows(args)?;
    emit(&args.out, &sweep_csv(&rows), stdout)
}

fn read_state(path: &Path) -> Result<RawState, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_state_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path) -> Result<DensityMatrix, CliError> {
    read_state(path)?
        .validate()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn cmd_twirl(args: &TwirlArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let rho = load_state(&args.input)?;
    let options = TwirlOptions {
        tolerance: args.tol,
        ..Default::default()
    };
    let report = locc::twirl_with(&rho, &options).map_err(|e| match e {
        LoccError::DidNotConverge { .. } => CliError::Convergence(e),
        other => CliError::Usage(other.to_string()),
    })?;
    if let Some(path) = &args.out {
        fs::write(path, to_state_json(&report.output)).map_err(io_err(path))?;
    }
    let mut buf = String::new();
    line(&mut buf, "d", rho.dim_b());
    line(&mut buf, "alpha", fmt_num(report.alpha));
    line(&mut buf, "gamma", fmt_num(report.gamma));
    line(
        &mut buf,
        "beta",
        fmt_num((1.0 - 2.0 * (rho.dim_b() - 2) as f64 * report.alpha - report.gamma) / 3.0),
    );
    line(&mut buf, "residual", format!("{:.3e}", report.residual));
    line(&mut buf, "passes", report.passes);
    if args.report {
        for (j, a) in (2..).zip(&report.weights.a) {
            line(&mut buf, &format!("a_{j}"), fmt_num(*a));
        }
        line(&mut buf, "b", fmt_num(report.weights.b));
        line(&mut buf, "c_plus", fmt_num(report.weights.c_plus));
        line(&mut buf, "c_minus", fmt_num(report.weights.c_minus));
    }
    emit(&None, &buf, stdout)
}

pub fn cmd_discord(args: &DiscordArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let rho = load_state(&args.input)?;
    let config = OptimizerConfig {
        polar_steps: args.polar,
        azimuthal_steps: args.azimuthal,
        random_restarts: args.restarts,
        seed: args.seed,
        ..Default::default()
    };
    let est = measure::discord_numeric(&rho, &config);
    let axis = est.classical.axis;
    let [y1, y2, y3] = axis.y();
    let mut buf = String::new();
    line(&mut buf, "d", rho.dim_b());
    line(&mut buf, "mutual_info", fmt_num(est.mutual_info));
    line(
        &mut buf,
        "classical",
        format!("{} (numeric lower bound)", fmt_num(est.classical.value)),
    );
    line(
        &mut buf,
        "discord",
        format!("{} (numeric upper bound)", fmt_num(est.discord)),
    );
    line(
        &mut buf,
        "negativity",
        fmt_num(opcore::negativity_oracle(&rho)),
    );
    line(
        &mut buf,
        "commutator_norm",
        format!("{:.3e}", opcore::commutator_condition(&rho)),
    );
    line(
        &mut buf,
        "axis",
        format!(
            "t={} y1={} y2={} y3={}",
            fmt_num(axis.t()),
            fmt_num(y1),
            fmt_num(y2),
            fmt_num(y3)
        ),
    );
    line(
        &mut buf,
        "bloch",
        format!(
            "theta={} phi={}",
            fmt_num(est.classical.theta),
            fmt_num(est.classical.phi)
        ),
    );
    if let Ok(s) = family::classify_family(&rho, args.tol) {
        let r = correlation_report(&s);
        line(
            &mut buf,
            "family",
            format!("alpha={} gamma={}", fmt_num(s.alpha()), fmt_num(s.gamma())),
        );
        line(&mut buf, "classical_closed_form", fmt_num(r.classical));
        line(&mut buf, "discord_closed_form", fmt_num(r.discord));
    }
    emit(&None, &buf, stdout)
}

pub fn cmd_check(args: &CheckArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let raw = read_state(&args.input)?;
    let m = &raw.matrix;
    let hermitian_part = (m + m.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
    let min_eigenvalue = opcore::hermitian_spectrum(&hermitian_part)
        .map(|s| s.min())
        .unwrap_or(f64::NAN);
    let mut buf = String::new();
    line(&mut buf, "dims", format!("{} {}", raw.dim_a, raw.dim_b));
    line(
        &mut buf,
        "hermiticity_residual",
        format!("{:.3e}", hermiticity_residual(m)),
    );
    line(
        &mut buf,
        "trace_residual",
        format!("{:.3e}", (m.trace().re - 1.0).hypot(m.trace().im)),
    );
    line(
        &mut buf,
        "min_eigenvalue",
        format!("{:.3e}", min_eigenvalue),
    );

    let rho = match raw.validate() {
        Ok(rho) => rho,
        Err(e) => {
            line(&mut buf, "valid", "no");
            emit(&None, &buf, stdout)?;
            return Err(CliError::Usage(format!("{}: {e}", args.input.display())));
        }
    };
    line(&mut buf, "valid", "yes");
    match family::nearest_member(&rho) {
        Ok((s, residual)) if residual <= args.tol => line(
            &mut buf,
            "family",
            format!(
                "in family (alpha={}, gamma={}) residual {:.3e}",
                fmt_num(s.alpha()),
                fmt_num(s.gamma()),
                residual
            ),
        ),
        Ok((_, residual)) => line(
            &mut buf,
            "family",
            format!("not in family, residual {residual:.3e}"),
        ),
        Err(e) => line(&mut buf, "family", format!("not in family ({e})")),
    }
    let negativity = opcore::negativity_oracle(&rho);
    if opcore::min_partial_transpose_eigenvalue(&rho) < -opcore::VALIDATION_TOL {
        line(
            &mut buf,
            "ppt",
            format!("NPT, negativity = {}", fmt_num(negativity)),
        );
    } else {
        line(&mut buf, "ppt", "PPT");
    }
    emit(&None, &buf, stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_num(5.0 / 3.0 - 3f64.log2()), "0.0817041659455");
        assert_eq!(fmt_num(123456.789), "123456.789");
        assert_eq!(fmt_num(1e-7), "1e-07");
        assert_eq!(fmt_num(-2.5e-17), "-2.5e-17");
        assert_eq!(fmt_num(1e12), "1e+12");
        assert_eq!(fmt_num(0.0001), "0.0001");
    }

    #[test]
    fn fixed_param_parsing() {
        let f: FixedParam = "gamma=0".parse().unwrap();
        assert_eq!(
            f,
            FixedParam {
                param: Param::Gamma,
                value: 0.0
            }
        );
        let f: FixedParam = "Beta = 0.05".parse().unwrap();
        assert_eq!(f.param, Param::Beta);
        assert!("gamma".parse::<FixedParam>().is_err());
        assert!("delta=1".parse::<FixedParam>().is_err());
        assert!("alpha=x".parse::<FixedParam>().is_err());
    }

    fn sweep(fix: &str, vary: Param, from: f64, to: f64, steps: usize) -> SweepArgs {
        SweepArgs {
            dim: 3,
            fix: fix.parse().unwrap(),
            vary,
            from,
            to,
            steps,
            out: None,
        }
    }

    #[test]
    fn sweep_flags_points_outside_the_region() {
        let rows = sweep_rows(&sweep("beta=0.05", Param::Gamma, 0.0, 1.0, 21)).unwrap();
        // β = 0.05 leaves γ ∈ [0, 0.85].
        for row in &rows {
            assert_eq!(row.state.is_some(), row.gamma <= 0.85 + 1e-12, "{row:?}");
        }
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with(SWEEP_HEADER));
        assert!(csv.lines().last().unwrap().ends_with(",,,,,1"));
        assert_eq!(csv.lines().count(), 22);
    }

    #[test]
    fn sweep_argument_errors() {
        assert!(sweep_rows(&sweep("gamma=0", Param::Gamma, 0.0, 0.5, 10)).is_err());
        assert!(sweep_rows(&sweep("gamma=0", Param::Alpha, 0.0, 0.5, 1)).is_err());
    }

    #[test]
    fn sweep_endpoints_are_exact() {
        let rows = sweep_rows(&sweep("gamma=0", Param::Alpha, 0.0, 0.5, 200)).unwrap();
        assert_eq!(rows.first().unwrap().param, 0.0);
        assert_eq!(rows.last().unwrap().param, 0.5);
        assert!(rows.iter().all(|r| r.state.is_some()));
    }
}
