//! `fit`, `gof` and `plot` commands.
//!
//! The binary is a thin wrapper over [`run`]; every command is also callable
//! directly with a [`RunConfig`].

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::distributions::BetaParams;
use crate::error::{Error, Result};
use crate::gof::{McMode, DEFAULT_REPLICATES, MIN_REPLICATES};
use crate::plot::{density_figure, qq_figure, Figure, DEFAULT_RESOLUTION, MIN_RESOLUTION};
use crate::portfolio::{
    analyze_portfolio, fit_tariff, parse_portfolio_csv, FitDocument, GofDocument, Locale,
    TariffHistory,
};

#[derive(Debug, Parser)]
#[command(
    name = "claimfreq",
    version,
    about = "Beta-Binomial claim frequency fits and Q-Q Monte-Carlo goodness-of-fit tests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Method-of-moments Beta fit per tariff (no simulation).
    Fit(InputArgs),
    /// Fit, Q-Q statistic and Monte-Carlo p-value per tariff.
    Gof {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Write SVG figures and their CSV series.
    Plot {
        /// Figure type.
        kind: PlotKind,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mc: McArgs,
        /// Number of grid points per density curve.
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        /// Plot these `alpha,beta` pairs instead of fitted tariffs (density only).
        #[arg(long = "params", value_name = "ALPHA,BETA")]
        params: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Portfolio CSV with header `year,tariff,contracts,affected`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Report file (fit, gof) or output directory (plot); reports default to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// `de` accepts dot thousands separators and prints decimal commas in figures.
    #[arg(long, value_enum, default_value_t = LocaleArg::En)]
    pub locale: LocaleArg,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Monte-Carlo replicates per tariff (at least 100).
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Refit parameters on each simulated sample, or keep the original fit.
    #[arg(long, value_enum, default_value_t = ModeArg::ReEstimate)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LocaleArg {
    En,
    De,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    ReEstimate,
    FixedParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Density,
    Qq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubcommandKind {
    Fit,
    Gof,
    Plot,
}

/// Everything a command needs, independent of how it was parsed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: SubcommandKind,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub replicates: usize,
    pub seed: u64,
    pub mode: McMode,
    pub locale: Locale,
    pub plot_kind: PlotKind,
    pub resolution: usize,
    pub params: Vec<BetaParams>,
}

impl RunConfig {
    pub fn new(subcommand: SubcommandKind) -> Self {
        Self {
            subcommand,
            input: None,
            output: None,
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            mode: McMode::ReEstimate,
            locale: Locale::En,
            plot_kind: PlotKind::Density,
            resolution: DEFAULT_RESOLUTION,
            params: Vec::new(),
        }
    }

    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (sub, input, mc, plot) = match cli.command {
            CommandArgs::Fit(input) => (SubcommandKind::Fit, input, None, None),
            CommandArgs::Gof { input, mc } => (SubcommandKind::Gof, input, Some(mc), None),
            CommandArgs::Plot {
                kind,
                input,
                mc,
                resolution,
                params,
            } => (
                SubcommandKind::Plot,
                input,
                Some(mc),
                Some((kind, resolution, params)),
            ),
        };
        let mut cfg = RunConfig::new(sub);
        cfg.input = input.input;
        cfg.output = input.output;
        cfg.locale = match input.locale {
            LocaleArg::En => Locale::En,
            LocaleArg::De => Locale::De,
        };
        if let Some(mc) = mc {
            cfg.replicates = mc.replicates;
            cfg.seed = mc.seed;
            cfg.mode = match mc.mode {
                ModeArg::ReEstimate => McMode::ReEstimate,
                ModeArg::FixedParams => McMode::FixedParams,
            };
        }
        if let Some((kind, resolution, params)) = plot {
            cfg.plot_kind = kind;
            cfg.resolution = resolution;
            cfg.params = params
                .iter()
                .map(|p| parse_params(p))
                .collect::<Result<_>>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let simulates = self.subcommand == SubcommandKind::Gof
            || (self.subcommand == SubcommandKind::Plot && self.plot_kind == PlotKind::Qq);
        if simulates && self.replicates < MIN_REPLICATES {
            return Err(Error::Input(format!(
                "--replicates must be at least {MIN_REPLICATES}, got {}",
                self.replicates
            )));
        }
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::Input(format!(
                "--resolution must be at least {MIN_RESOLUTION}, got {}",
                self.resolution
            )));
        }
        let needs_input = !(self.subcommand == SubcommandKind::Plot
            && self.plot_kind == PlotKind::Density
            && !self.params.is_empty());
        if needs_input && self.input.is_none() {
            return Err(Error::Input("--input is required".into()));
        }
        if !self.params.is_empty()
            && !(self.subcommand == SubcommandKind::Plot && self.plot_kind == PlotKind::Density)
        {
            return Err(Error::Input(
                "--params only applies to `plot density`".into(),
            ));
        }
        Ok(())
    }
}

fn parse_params(text: &str) -> Result<BetaParams> {
    let bad = || Error::Input(format!("--params expects `alpha,beta`, got `{text}`"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    BetaParams::new(a, b)
}

/// What a command produced. Per-tariff failures do not abort the command;
/// they are collected here and turn the exit status nonzero.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Report document, when the command produces one.
    pub report: Option<String>,
    pub files: Vec<PathBuf>,
    pub failures: Vec<Error>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.failures.is_empty())
    }
}

fn load(cfg: &RunConfig) -> Result<Vec<TariffHistory>> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Input("--input is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::Io(format!("{}: no such file", path.display())),
        _ => Error::Io(format!("{}: {e}", path.display())),
    })?;
    parse_portfolio_csv(&text, cfg.locale)
}

fn to_json<T: serde::Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<Outcome> {
    let histories = load(cfg)?;
    let mut out = Outcome::default();
    let mut tariffs = Vec::new();
    for h in &histories {
        match fit_tariff(h) {
            Ok(f) => tariffs.push(f),
            Err(e) => out.failures.push(e),
        }
    }
    out.report = Some(to_json(&FitDocument {
        command: "fit",
        tariffs,
    }));
    Ok(out)
}

pub fn cmd_gof(cfg: &RunConfig) -> Result<Outcome> {
    let histories = load(cfg)?;
    let mut out = Outcome::default();
    let mut tariffs = Vec::new();
    for r in analyze_portfolio(&histories, cfg.replicates, cfg.seed, cfg.mode) {
        match r {
            Ok(t) => tariffs.push(t),
            Err(e) => out.failures.push(e),
        }
    }
    out.report = Some(to_json(&GofDocument::new(
        cfg.replicates,
        cfg.seed,
        cfg.mode,
        tariffs,
    )));
    Ok(out)
}

fn file_stem(tariff: &str) -> String {
    tariff
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write_figure(dir: &Path, stem: &str, fig: &Figure, out: &mut Outcome) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let svg = dir.join(format!("{stem}.svg"));
    let csv = dir.join(format!("{stem}.csv"));
    std::fs::write(&svg, fig.to_svg())?;
    std::fs::write(&csv, fig.to_csv())?;
    out.files.push(svg);
    out.files.push(csv);
    Ok(())
}

fn fmt_param(x: f64) -> String {
    // integers print without a fractional part, everything else to 4 significant decimals
    if x.fract() == 0.0 {
        format!("{x}")
    } else {
        format!("{}", (x * 1e4).round() / 1e4)
    }
}

pub fn cmd_plot(cfg: &RunConfig) -> Result<Outcome> {
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut out = Outcome::default();
    match cfg.plot_kind {
        PlotKind::Density => {
            let curves: Vec<(String, BetaParams)> = if cfg.params.is_empty() {
                let mut curves = Vec::new();
                for h in &load(cfg)? {
                    match fit_tariff(h) {
                        Ok(f) => curves.push((format!("tariff {}", f.tariff), f.params())),
                        Err(e) => out.failures.push(e),
                    }
                }
                curves
            } else {
                cfg.params
                    .iter()
                    .map(|p| {
                        let label = format!(
                            "alpha = {}, beta = {}",
                            fmt_param(p.alpha()),
                            fmt_param(p.beta())
                        );
                        (label, *p)
                    })
                    .collect()
            };
            if !curves.is_empty() {
                let fig = density_figure(&curves, cfg.resolution)?;
                write_figure(&dir, "density", &fig, &mut out)?;
            }
        }
        PlotKind::Qq => {
            let histories = load(cfg)?;
            for r in analyze_portfolio(&histories, cfg.replicates, cfg.seed, cfg.mode) {
                match r {
                    Ok(t) => {
                        let qq = crate::gof::QQResult {
                            sorted_obs: t.sorted_obs.clone(),
                            quantiles: t.quantiles.clone(),
                            rho: t.rho,
                            tn: t.tn,
                            perfect_fit: t.perfect_fit,
                        };
                        let fig = qq_figure(&t.fit.tariff, &qq, Some(t.p_value), cfg.locale);
                        write_figure(
                            &dir,
                            &format!("qq_{}", file_stem(&t.fit.tariff)),
                            &fig,
                            &mut out,
                        )?;
                    }
                    Err(e) => out.failures.push(e),
                }
            }
        }
    }
    Ok(out)
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.subcommand {
        SubcommandKind::Fit => cmd_fit(cfg),
        SubcommandKind::Gof => cmd_gof(cfg),
        SubcommandKind::Plot => cmd_plot(cfg),
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let outcome = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    if let Some(report) = &outcome.report {
        let written = match (&cfg.output, cfg.subcommand) {
            (Some(path), SubcommandKind::Fit | SubcommandKind::Gof) => std::fs::write(path, report)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
            _ => stdout.write_all(report.as_bytes()).map_err(Error::from),
        };
        if let Err(e) = written {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    }
    for f in &outcome.files {
        let _ = writeln!(stderr, "wrote {}", f.display());
    }
    for e in &outcome.failures {
        let _ = writeln!(stderr, "error: {e}");
    }
    outcome.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig> {
        RunConfig::from_cli(Cli::try_parse_from(args).map_err(|e| Error::Input(e.to_string()))?)
    }

    #[test]
    fn defaults() {
        let cfg = parse(&["claimfreq", "gof", "--input", "x.csv"]).unwrap();
        assert_eq!(cfg.replicates, 10_000);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.mode, McMode::ReEstimate);
        assert_eq!(cfg.resolution, 512);
        assert_eq!(cfg.locale, Locale::En);
    }

    #[test]
    fn replicate_minimum() {
        assert!(parse(&["claimfreq", "gof", "--input", "x", "--replicates", "50"]).is_err());
        assert!(parse(&["claimfreq", "gof", "--input", "x", "--replicates", "100"]).is_ok());
    }

    #[test]
    fn resolution_minimum() {
        assert!(parse(&[
            "claimfreq",
            "plot",
            "density",
            "--input",
            "x",
            "--resolution",
            "8"
        ])
        .is_err());
    }

    #[test]
    fn params_override() {
        let cfg = parse(&[
            "claimfreq",
            "plot",
            "density",
            "--params",
            "1.2,1.6",
            "--params",
            "12,55",
        ])
        .unwrap();
        assert_eq!(cfg.params.len(), 2);
        assert_eq!(cfg.params[1], BetaParams::new(12.0, 55.0).unwrap());
        assert!(parse(&["claimfreq", "plot", "density", "--params", "1.2"]).is_err());
        assert!(parse(&["claimfreq", "plot", "density", "--params", "-1,2"]).is_err());
        assert!(parse(&["claimfreq", "plot", "qq", "--params", "1,2", "--input", "x"]).is_err());
    }

    #[test]
    fn input_required() {
        assert!(parse(&["claimfreq", "fit"]).is_err());
        assert!(parse(&["claimfreq", "plot", "density"]).is_err());
    }

    #[test]
    fn mode_and_locale_flags() {
        let cfg = parse(&[
            "claimfreq",
            "gof",
            "--input",
            "x",
            "--mode",
            "fixed-params",
            "--locale",
            "de",
        ])
        .unwrap();
        assert_eq!(cfg.mode, McMode::FixedParams);
        assert_eq!(cfg.locale, Locale::De);
    }

    #[test]
    fn param_labels() {
        assert_eq!(fmt_param(12.0), "12");
        assert_eq!(fmt_param(1.2), "1.2");
    }
}
