//! Command-line front end.
//!
//! Settings come from flags and, optionally, a TOML file given with
//! `--config`; flags win. Datasets go to `--out` (or stdout when absent),
//! human summaries to stdout.
//!
//! Exit codes: 0 success, 1 invalid input or I/O failure, 2 some bosonic
//! result did not converge (the dataset is still written).

use std::f64::consts::FRAC_1_SQRT_2;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::experiments::{
    self, acceleration_for_r, creation_report, figure_sweep_spec, find_peak, linear_grid, sweep_r, CreationReport,
    FigureId, SweepRow, SweepSpec,
};
use crate::family::StateParams;
use crate::fock::Statistics;
use crate::negativity::converged_pair;
use crate::rindler::RindlerConfig;
use crate::selfcheck::{run_checks, SelfcheckOptions};

pub const SWEEP_HEADER: &str = "r_omega,N_AR,N_ARbar,n_max,tail_bound,converged";
pub const CREATION_HEADER: &str = "inertial_N,N_at_r,absolute,relative_percent,unbounded";
pub const PEAK_HEADER: &str = "r_star,N_star";

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "RINDLER_ENT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "rindler-ent",
    version,
    about = "Inertial–accelerated entanglement beyond the single-mode approximation"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandLine,
}

#[derive(Debug, Subcommand)]
enum CommandLine {
    /// N_AR and N_ARbar at a single r_omega
    Negativity(Settings),
    /// N_AR and N_ARbar over an r_omega grid
    Sweep(Settings),
    /// Maximum of N_AR over [r-lo, r-hi]
    Peak(Settings),
    /// N_AR at r against its inertial value
    Creation(Settings),
    /// Canonical dataset: fig2 (Grassman sweep), fig3 (bosonic sweep), fig4 (creation vs inertial N)
    Figure {
        id: String,
        #[command(flatten)]
        settings: Settings,
    },
    /// Proper acceleration corresponding to r_omega at a frequency
    Convert(Settings),
    /// Run the invariant suite
    Selfcheck {
        #[arg(long, hide = true)]
        inject_sign_fault: bool,
    },
}

/// Every user-settable value. Also the schema of the TOML config file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// TOML file with default settings
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Field statistics: boson | fermion
    #[arg(long)]
    pub stat: Option<String>,
    #[arg(long = "P")]
    #[serde(rename = "P")]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Weight of the R Unruh kind: decimal or `1/sqrt2`
    #[arg(long = "qR")]
    #[serde(rename = "qR")]
    pub q_r: Option<String>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long = "r-lo")]
    pub r_lo: Option<f64>,
    #[arg(long = "r-hi")]
    pub r_hi: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Bosonic convergence tolerance
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Golden-section tolerance in r
    #[arg(long)]
    pub tol: Option<f64>,
    /// Frequency in Hz
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
}

impl Settings {
    /// Field-wise `self` over `base`.
    fn over(self, base: Settings) -> Settings {
        Settings {
            config: self.config.or(base.config),
            stat: self.stat.or(base.stat),
            p: self.p.or(base.p),
            alpha: self.alpha.or(base.alpha),
            beta: self.beta.or(base.beta),
            q_r: self.q_r.or(base.q_r),
            r: self.r.or(base.r),
            r_lo: self.r_lo.or(base.r_lo),
            r_hi: self.r_hi.or(base.r_hi),
            count: self.count.or(base.count),
            epsilon: self.epsilon.or(base.epsilon),
            tol: self.tol.or(base.tol),
            omega: self.omega.or(base.omega),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Negativity,
    Sweep,
    Peak,
    Creation,
    Figure,
    Convert,
    Selfcheck,
}

/// Validated run specification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub figure: Option<String>,
    pub statistics: Option<String>,
    #[serde(rename = "P")]
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "qR")]
    pub q_r: f64,
    pub r: Option<f64>,
    pub r_lo: Option<f64>,
    pub r_hi: Option<f64>,
    pub count: Option<usize>,
    pub epsilon: f64,
    pub tol: f64,
    pub omega: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub inject_sign_fault: bool,
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::invalid(e.to_string())
    }
}

/// Parses `1/sqrt2` (exactly 1/√2) or a decimal.
pub fn parse_q_r(s: &str) -> Result<f64, String> {
    match s.trim() {
        "1/sqrt2" | "1/sqrt(2)" | "1/√2" => Ok(FRAC_1_SQRT_2),
        other => other.parse::<f64>().map_err(|_| format!("cannot parse qR '{other}'")),
    }
}

fn load_config_file(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::invalid(format!("invalid config {}: {e}", path.display())))
}

fn resolve(command: Command, figure: Option<String>, flags: Settings) -> Result<RunConfig, CliError> {
    let s = match &flags.config {
        Some(path) => {
            let file = load_config_file(path)?;
            flags.over(file)
        }
        None => flags,
    };
    let q_r = s
        .q_r
        .as_deref()
        .map(parse_q_r)
        .transpose()
        .map_err(CliError::invalid)?
        .unwrap_or(FRAC_1_SQRT_2);
    let format = match s.format.as_deref() {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => return Err(CliError::invalid(format!("unknown format '{other}' (csv | json)"))),
    };
    let defaults = experiments::caption_state();
    let rc = RunConfig {
        command,
        figure,
        statistics: s.stat,
        p: s.p.unwrap_or(defaults.p),
        alpha: s.alpha.unwrap_or(defaults.alpha),
        beta: s.beta.unwrap_or(defaults.beta),
        q_r,
        r: s.r,
        r_lo: s.r_lo,
        r_hi: s.r_hi,
        count: s.count,
        epsilon: s.epsilon.unwrap_or(experiments::DEFAULT_EPSILON),
        tol: s.tol.unwrap_or(experiments::DEFAULT_PEAK_TOL),
        omega: s.omega,
        out: s.out,
        format,
        inject_sign_fault: false,
    };
    rc.validate()?;
    Ok(rc)
}

impl RunConfig {
    fn statistics(&self) -> Result<Statistics, Error> {
        match self.statistics.as_deref() {
            Some("boson" | "bosonic") => Ok(Statistics::Boson),
            Some("fermion" | "fermionic" | "grassman") => Ok(Statistics::Fermion),
            Some(other) => Err(Error::OutOfRange(format!(
                "unknown statistics '{other}' (boson | fermion)"
            ))),
            None => Err(Error::OutOfRange("--stat is required".into())),
        }
    }

    fn params(&self) -> Result<StateParams, Error> {
        StateParams::new(self.p, self.alpha, self.beta)
    }

    fn template(&self) -> Result<RindlerConfig, Error> {
        RindlerConfig::new(self.statistics()?, 0.0, self.q_r, crate::negativity::CUTOFF_SCHEDULE[0])
    }

    fn require_r(&self) -> Result<f64, Error> {
        self.r.ok_or_else(|| Error::OutOfRange("--r is required".into()))
    }

    fn grid(&self) -> Result<Vec<f64>, Error> {
        let (Some(lo), Some(hi)) = (self.r_lo, self.r_hi) else {
            return Err(Error::OutOfRange("--r-lo and --r-hi are required".into()));
        };
        let count = self.count.unwrap_or(experiments::FIGURE_POINTS);
        if count < 2 || !(lo < hi) {
            return Err(Error::OutOfRange("need r-lo < r-hi and count ≥ 2".into()));
        }
        Ok(linear_grid(lo, hi, count, true))
    }

    /// Rejects bad input before any computation.
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.epsilon > 0.0) || !(self.tol > 0.0) {
            return Err(Error::OutOfRange("epsilon and tol must be positive".into()));
        }
        match self.command {
            Command::Negativity | Command::Creation => {
                self.params()?;
                self.template()?.with_r(self.require_r()?)?;
            }
            Command::Sweep | Command::Peak => {
                self.params()?;
                let t = self.template()?;
                for r in self.grid()? {
                    t.with_r(r)?;
                }
            }
            Command::Figure => {
                self.figure.as_deref().unwrap_or_default().parse::<FigureId>()?;
                if !experiments::FIGURE_Q_R.iter().any(|&q| (q - self.q_r).abs() < 1e-12) {
                    return Err(Error::OutOfRange(format!(
                        "figure presets cover qR ∈ {{0.85, 1/sqrt2}}, got {}",
                        self.q_r
                    )));
                }
            }
            Command::Convert => {
                let omega = self
                    .omega
                    .ok_or_else(|| Error::OutOfRange("--omega is required".into()))?;
                acceleration_for_r(self.require_r()?, omega, self.statistics()?)?;
            }
            Command::Selfcheck => {}
        }
        Ok(())
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{exp}");
    }
    let fixed = format!("{:.*}", (11 - exp) as usize, x);
    if fixed.contains('.') {
        fixed.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        fixed
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_g(r.r_omega),
            fmt_g(r.n_ar),
            fmt_g(r.n_arbar),
            r.n_max_used,
            fmt_g(r.tail_bound),
            r.converged()
        );
    }
    out
}

pub fn creation_csv(reports: &[CreationReport]) -> String {
    let mut out = String::from(CREATION_HEADER);
    out.push('\n');
    for c in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_g(c.inertial_n),
            fmt_g(c.n_at_r),
            fmt_g(c.absolute_creation),
            c.relative_percent.map(fmt_g).unwrap_or_default(),
            c.unbounded
        );
    }
    out
}

fn sweep_json(r: &SweepRow) -> Value {
    json!({
        "r_omega": r.r_omega,
        "N_AR": r.n_ar,
        "N_ARbar": r.n_arbar,
        "n_max": r.n_max_used,
        "tail_bound": r.tail_bound,
        "converged": r.converged(),
    })
}

fn creation_json(c: &CreationReport) -> Value {
    json!({
        "inertial_N": c.inertial_n,
        "N_at_r": c.n_at_r,
        "absolute": c.absolute_creation,
        "relative_percent": c.relative_percent,
        "unbounded": c.unbounded,
    })
}

fn json_document(cfg: &RunConfig, rows: Vec<Value>) -> String {
    let doc = json!({
        "meta": { "config": cfg, "version": env!("CARGO_PKG_VERSION") },
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

enum Dataset {
    Sweep(Vec<SweepRow>),
    Creation(Vec<CreationReport>),
    Peak(experiments::Peak),
}

impl Dataset {
    fn render(&self, cfg: &RunConfig) -> String {
        match (self, cfg.format) {
            (Dataset::Sweep(rows), Format::Csv) => sweep_csv(rows),
            (Dataset::Sweep(rows), Format::Json) => json_document(cfg, rows.iter().map(sweep_json).collect()),
            (Dataset::Creation(rows), Format::Csv) => creation_csv(rows),
            (Dataset::Creation(rows), Format::Json) => json_document(cfg, rows.iter().map(creation_json).collect()),
            (Dataset::Peak(p), Format::Csv) => format!("{PEAK_HEADER}\n{},{}\n", fmt_g(p.r_star), fmt_g(p.n_star)),
            (Dataset::Peak(p), Format::Json) => json_document(
                cfg,
                vec![json!({ "r_star": p.r_star, "N_star": p.n_star, "at_boundary": p.at_boundary })],
            ),
        }
    }

    fn all_converged(&self) -> bool {
        match self {
            Dataset::Sweep(rows) => rows.iter().all(SweepRow::converged),
            _ => true,
        }
    }
}

fn emit(cfg: &RunConfig, data: &Dataset, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = data.render(cfg);
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::invalid(e.to_string())),
    }
}

fn execute(cfg: &RunConfig, stdout: &mut Vec<u8>) -> Result<i32, CliError> {
    let say = |stdout: &mut Vec<u8>, line: String| {
        let _ = writeln!(stdout, "{line}");
    };
    let data = match cfg.command {
        Command::Negativity => {
            let r = cfg.require_r()?;
            let (ar, arbar) = converged_pair(&cfg.params()?, &cfg.template()?.with_r(r)?, cfg.epsilon)?;
            say(stdout, format!("N_AR = {}", fmt_g(ar.value)));
            say(stdout, format!("N_ARbar = {}", fmt_g(arbar.value)));
            let row = SweepRow {
                r_omega: r,
                n_ar: ar.value,
                n_arbar: arbar.value,
                n_max_used: ar.n_max_used.max(arbar.n_max_used),
                tail_bound: ar.tail_bound.max(arbar.tail_bound),
                converged_ar: ar.converged,
                converged_arbar: arbar.converged,
            };
            if !row.converged() {
                say(stdout, "warning: bosonic cutoff schedule exhausted".into());
            }
            if cfg.out.is_none() {
                return Ok(if row.converged() { 0 } else { 2 });
            }
            Dataset::Sweep(vec![row])
        }
        Command::Sweep => {
            let spec = SweepSpec {
                params: cfg.params()?,
                template: cfg.template()?,
                r_grid: cfg.grid()?,
                epsilon: cfg.epsilon,
            };
            Dataset::Sweep(sweep_r(&spec)?)
        }
        Command::Peak => {
            let grid = cfg.grid()?;
            let (lo, hi) = (grid[0], grid[grid.len() - 1]);
            let peak = find_peak(&cfg.params()?, &cfg.template()?, lo, hi, cfg.tol)?;
            say(stdout, format!("r_star = {}", fmt_g(peak.r_star)));
            say(stdout, format!("N_star = {}", fmt_g(peak.n_star)));
            if peak.at_boundary {
                say(stdout, "maximum on the interval boundary (no interior peak)".into());
            }
            if cfg.out.is_none() {
                return Ok(0);
            }
            Dataset::Peak(peak)
        }
        Command::Creation => {
            let rep = creation_report(&cfg.params()?, &cfg.template()?, cfg.require_r()?)?;
            say(
                stdout,
                format!("inertial N = {}, N(r) = {}", fmt_g(rep.inertial_n), fmt_g(rep.n_at_r)),
            );
            match rep.relative_percent {
                Some(p) => say(stdout, format!("relative change = {p:+.3}%")),
                None => say(
                    stdout,
                    format!("inertial state separable; unbounded = {}", rep.unbounded),
                ),
            }
            if cfg.out.is_none() {
                return Ok(0);
            }
            Dataset::Creation(vec![rep])
        }
        Command::Figure => {
            let id: FigureId = cfg.figure.as_deref().unwrap_or_default().parse()?;
            match id {
                FigureId::Fig2 | FigureId::Fig3 => Dataset::Sweep(sweep_r(&figure_sweep_spec(id, cfg.q_r)?)?),
                FigureId::Fig4 => {
                    Dataset::Creation(experiments::fig4_points()?.into_iter().map(|p| p.report).collect())
                }
            }
        }
        Command::Convert => {
            let stat = cfg.statistics()?;
            let a = acceleration_for_r(cfg.require_r()?, cfg.omega.unwrap_or_default(), stat)?;
            say(stdout, format!("a = {:.4e} m/s^2 = {:.4e} g", a.meters_per_s2, a.in_g));
            return Ok(0);
        }
        Command::Selfcheck => {
            let started = std::time::Instant::now();
            let outcomes = run_checks(SelfcheckOptions {
                inject_sign_fault: cfg.inject_sign_fault,
            });
            for c in &outcomes {
                say(
                    stdout,
                    format!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail),
                );
            }
            let failed = outcomes.iter().filter(|c| !c.passed).count();
            say(
                stdout,
                format!(
                    "{} checks, {failed} failed, {:.2} s",
                    outcomes.len(),
                    started.elapsed().as_secs_f64()
                ),
            );
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    };
    emit(cfg, &data, stdout)?;
    Ok(if data.all_converged() { 0 } else { 2 })
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = if code == 0 {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    let resolved = match cli.command {
        CommandLine::Negativity(s) => resolve(Command::Negativity, None, s),
        CommandLine::Sweep(s) => resolve(Command::Sweep, None, s),
        CommandLine::Peak(s) => resolve(Command::Peak, None, s),
        CommandLine::Creation(s) => resolve(Command::Creation, None, s),
        CommandLine::Figure { id, settings } => resolve(Command::Figure, Some(id), settings),
        CommandLine::Convert(s) => resolve(Command::Convert, None, s),
        CommandLine::Selfcheck { inject_sign_fault } => {
            resolve(Command::Selfcheck, None, Settings::default()).map(|c| RunConfig { inject_sign_fault, ..c })
        }
    };
    // summaries are buffered so the run can move onto a capped pool
    let mut summary = Vec::new();
    let outcome = resolved.and_then(|cfg| match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cfg, &mut summary)),
            Err(e) => Err(CliError::invalid(format!("thread pool: {e}"))),
        },
        None => execute(&cfg, &mut summary),
    });
    let _ = stdout.write_all(&summary);
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(0.5), "0.5");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(0.123616546352245), "0.123616546352");
        assert_eq!(fmt_g(1.5e-7), "1.5e-7");
        assert_eq!(fmt_g(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(fmt_g(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_g(9.9999999999999), "10");
        for x in [0.1236, 1.23456789012345, 2.5e-13, 1e-5, 99999.123] {
            let back: f64 = fmt_g(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11);
        }
    }

    #[test]
    fn q_r_tokens() {
        assert_eq!(parse_q_r("1/sqrt2").unwrap(), FRAC_1_SQRT_2);
        assert_eq!(parse_q_r("0.85").unwrap(), 0.85);
        assert!(parse_q_r("half").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = Settings {
            p: Some(0.1),
            alpha: Some(0.2),
            stat: Some("boson".into()),
            ..Default::default()
        };
        let flags = Settings {
            p: Some(0.4),
            ..Default::default()
        };
        let merged = flags.over(file);
        assert_eq!(merged.p, Some(0.4));
        assert_eq!(merged.alpha, Some(0.2));
        assert_eq!(merged.stat.as_deref(), Some("boson"));
    }
}
