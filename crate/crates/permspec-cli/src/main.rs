//! `permspec` — compute, sample, and verify spectral linear statistics of
//! random permutation matrices under the Ewens(θ) distribution.
//!
//! Exit codes: 0 success, 1 runtime error (module error name on stderr),
//! 2 usage error (offending flag named on stderr).

use clap::{Args, Parser, Subcommand, ValueEnum};
use permspec::funcs::FunctionSpec;
use permspec::limitlaw::{build_levy, cf_mu, eta_normalization, sample_mu, HnSampler};
use permspec::moments::{exact_mean, exact_variance};
use permspec::montecarlo::{
    coupling_experiment, run_with_values, verify_against_enumeration, Mode, SimulationConfig,
};
use permspec::rng::replicate_rng;
use permspec::trapezoid::{build_series, classify_regime_report, Method};
use serde::Serialize;
use std::fmt::Write as _;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "permspec",
    version,
    about = "Spectral linear statistics of random permutation matrices under the Ewens distribution",
    after_help = "Function syntax: indicator:a=0,b=0.5 | trig:a0=0;cos=1,0,0.25;sin=0 | plateau:a=0.2,b=0.4,eps=0.1\n\
Indicator evaluation uses the open-interval convention f(a)=f(b)=0; the error\n\
series for indicators defaults to the fractional-part closed form, which\n\
differs from the open-convention direct sums at resonant j (j*a or j*b\n\
integral). The active convention is echoed in the output metadata.\n\
Seed precedence: --seed > PERMSPEC_SEED > 0. Config file keys (key=value per\n\
line) are merged under flags; flags win."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Direct,
    Poisson,
    ClosedForm,
}

impl MethodArg {
    fn to_method(self) -> Method {
        match self {
            Self::Direct => Method::Direct,
            Self::Poisson => Method::PoissonSummation,
            Self::ClosedForm => Method::IndicatorClosedForm,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimMode {
    Statistic,
    CycleCounts,
    Coupling,
    HN,
    MuLimit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LimitMode {
    Mu,
    Hn,
}

/// Flags shared by every subcommand; unset values fall back to the config
/// file, then to defaults.
#[derive(Args, Clone)]
struct Common {
    /// Test function, e.g. `indicator:a=0,b=0.5`
    #[arg(long, global = true)]
    function: Option<String>,
    /// Matrix size N
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Ewens parameter θ > 0
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Series horizon (defaults to n where a series is needed)
    #[arg(long, global = true)]
    jmax: Option<usize>,
    /// Number of Monte Carlo replicates
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Master seed (precedence: flag > PERMSPEC_SEED > 0)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = library default)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Coupling horizon factor (horizon = factor * n, capped at 1e7)
    #[arg(long = "horizon-factor", global = true)]
    horizon_factor: Option<f64>,
    /// Output format
    #[arg(long = "output-format", global = true, value_enum)]
    output_format: Option<OutputFormat>,
    /// Series construction method (defaults per function family)
    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,
    /// Write two-column `x y` plot files with this path prefix
    #[arg(long = "emit-plot-data", global = true)]
    emit_plot_data: Option<String>,
    /// Config file with key=value lines, merged under flags
    #[arg(long, global = true)]
    config: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Trapezoidal-error series R_j, u_j = j*R_j and running sums (CSV)
    Rj {
        #[command(flatten)]
        common: Common,
    },
    /// Exact finite-N moments of the linear statistic (JSON)
    Moments {
        #[command(flatten)]
        common: Common,
    },
    /// Sample the linear statistic (CSV `replicate,I_value`)
    Sample {
        #[command(flatten)]
        common: Common,
        /// Emit sparse cycle counts `replicate,j,alpha_j` instead
        #[arg(long = "cycle-counts")]
        cycle_counts: bool,
    },
    /// Characteristic function of the limit law on a t-grid (CSV)
    #[command(name = "limit-cf")]
    LimitCf {
        #[command(flatten)]
        common: Common,
        #[arg(long = "t-min", default_value_t = -5.0, allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long = "t-max", default_value_t = 5.0, allow_hyphen_values = true)]
        t_max: f64,
        #[arg(long = "t-step", default_value_t = 0.5)]
        t_step: f64,
    },
    /// Draws from the limit law μ or the Poissonized statistic H_N
    #[command(name = "limit-sample")]
    LimitSample {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "mu")]
        mode: LimitMode,
        /// L² truncation tolerance for μ draws
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
    },
    /// Feller-coupling experiment: E|G-H|, bound components, lemma checks
    Coupling {
        #[command(flatten)]
        common: Common,
    },
    /// Verify formulas and sampler against brute-force enumeration (n ≤ 7)
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Full simulation with empirical-law summary
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "statistic")]
        mode: SimMode,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Rj { common }
        | Command::Moments { common }
        | Command::Sample { common, .. }
        | Command::LimitCf { common, .. }
        | Command::LimitSample { common, .. }
        | Command::Coupling { common }
        | Command::Verify { common }
        | Command::Simulate { common, .. } => common,
    };

    let resolved = match Resolved::from(common) {
        Ok(r) => r,
        Err(e) => return e.exit(),
    };
    let result = match &cli.command {
        Command::Rj { .. } => cmd_rj(&resolved),
        Command::Moments { .. } => cmd_moments(&resolved),
        Command::Sample { cycle_counts, .. } => cmd_sample(&resolved, *cycle_counts),
        Command::LimitCf { t_min, t_max, t_step, .. } => {
            cmd_limit_cf(&resolved, *t_min, *t_max, *t_step)
        }
        Command::LimitSample { mode, eps, .. } => cmd_limit_sample(&resolved, *mode, *eps),
        Command::Coupling { .. } => cmd_coupling(&resolved),
        Command::Verify { .. } => cmd_verify(&resolved),
        Command::Simulate { mode, .. } => cmd_simulate(&resolved, *mode),
    };
    match result {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(e) => e.exit(),
    }
}

enum CliError {
    /// exit 2: bad invocation; the message names the offending flag
    Usage(String),
    /// exit 1: module error
    Runtime(permspec::Error),
    Io(std::io::Error),
}

impl CliError {
    fn exit(&self) -> ExitCode {
        match self {
            Self::Usage(msg) => {
                eprintln!("usage error: {msg}");
                ExitCode::from(2)
            }
            Self::Runtime(e) => {
                eprintln!("error: {}: {e}", e.name());
                ExitCode::from(1)
            }
            Self::Io(e) => {
                eprintln!("error: Io: {e}");
                ExitCode::from(1)
            }
        }
    }
}

impl From<permspec::Error> for CliError {
    fn from(e: permspec::Error) -> Self {
        Self::Runtime(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

/// Fully resolved invocation: flag > config file > PERMSPEC_SEED (seed only)
/// > default.
#[derive(Serialize, Clone)]
struct Resolved {
    function: Option<String>,
    n: Option<usize>,
    theta: f64,
    jmax: Option<usize>,
    reps: usize,
    seed: u64,
    seed_source: &'static str,
    workers: usize,
    horizon_factor: f64,
    #[serde(skip)]
    output_format: Option<OutputFormat>,
    #[serde(serialize_with = "ser_method")]
    method: Option<Method>,
    emit_plot_data: Option<String>,
    endpoint_convention: &'static str,
}

fn ser_method<S: serde::Serializer>(m: &Option<Method>, s: S) -> Result<S::Ok, S::Error> {
    match m {
        None => s.serialize_str("family-default"),
        Some(Method::Direct) => s.serialize_str("direct"),
        Some(Method::PoissonSummation) => s.serialize_str("poisson-summation"),
        Some(Method::IndicatorClosedForm) => s.serialize_str("indicator-closed-form"),
    }
}

const ENDPOINT_NOTE: &str = "evaluate: open interval f(a)=f(b)=0; indicator series: fractional-part closed form (half-open), differs at resonant j";

impl Resolved {
    fn from(c: &Common) -> Result<Self, CliError> {
        let mut config: std::collections::BTreeMap<String, String> = Default::default();
        if let Some(path) = &c.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("--config: cannot read `{path}`: {e}")))?;
            let pairs = permspec_cli::parse_config_text(&text)
                .map_err(|e| CliError::Usage(format!("--config: {e}")))?;
            config.extend(pairs);
        }

        fn pick<T: std::str::FromStr>(
            flag: Option<T>,
            config: &std::collections::BTreeMap<String, String>,
            key: &str,
        ) -> Result<Option<T>, CliError> {
            if flag.is_some() {
                return Ok(flag);
            }
            match config.get(key) {
                None => Ok(None),
                Some(raw) => raw
                    .parse::<T>()
                    .map(Some)
                    .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{raw}`"))),
            }
        }

        let function = pick(c.function.clone(), &config, "function")?;
        let n = pick(c.n, &config, "n")?;
        let theta = pick(c.theta, &config, "theta")?.unwrap_or(1.0);
        let jmax = pick(c.jmax, &config, "jmax")?;
        let reps = pick(c.reps, &config, "reps")?.unwrap_or(10_000);
        let workers = pick(c.workers, &config, "workers")?.unwrap_or(0);
        let horizon_factor = pick(c.horizon_factor, &config, "horizon-factor")?.unwrap_or(100.0);

        let (seed, seed_source) = match pick(c.seed, &config, "seed")? {
            Some(s) => (s, "flag/config"),
            None => match std::env::var("PERMSPEC_SEED") {
                Ok(raw) => match raw.parse::<u64>() {
                    Ok(s) => (s, "env PERMSPEC_SEED"),
                    Err(_) => {
                        return Err(CliError::Usage(format!(
                            "PERMSPEC_SEED: cannot parse `{raw}` as u64"
                        )))
                    }
                },
                Err(_) => (0, "default"),
            },
        };

        if !(theta > 0.0) || !theta.is_finite() {
            return Err(CliError::Usage(format!("--theta: must be positive, got {theta}")));
        }

        let method = c.method.map(MethodArg::to_method).or_else(|| {
            match config.get("method").map(String::as_str) {
                Some("direct") => Some(Method::Direct),
                Some("poisson") => Some(Method::PoissonSummation),
                Some("closed-form") => Some(Method::IndicatorClosedForm),
                _ => None,
            }
        });

        Ok(Self {
            function,
            n,
            theta,
            jmax,
            reps,
            seed,
            seed_source,
            workers,
            horizon_factor,
            output_format: c.output_format,
            method,
            emit_plot_data: c.emit_plot_data.clone(),
            endpoint_convention: ENDPOINT_NOTE,
        })
    }

    fn function_spec(&self) -> Result<FunctionSpec, CliError> {
        let raw = self
            .function
            .as_deref()
            .ok_or_else(|| CliError::Usage("--function is required for this subcommand".to_string()))?;
        FunctionSpec::parse(raw).map_err(|e| CliError::Usage(format!("--function: {e} in `{raw}`")))
    }

    fn need_n(&self) -> Result<usize, CliError> {
        self.n
            .ok_or_else(|| CliError::Usage("--n is required for this subcommand".to_string()))
    }

    fn format_or(&self, default: OutputFormat) -> OutputFormat {
        self.output_format.unwrap_or(default)
    }

    /// `# key = value` comment block echoing the fully resolved invocation.
    fn csv_metadata(&self, extra: &[(&str, String)]) -> String {
        let mut out = String::new();
        if let Some(f) = &self.function {
            let _ = writeln!(out, "# function = {f}");
        }
        let _ = writeln!(out, "# theta = {}", self.theta);
        if let Some(n) = self.n {
            let _ = writeln!(out, "# n = {n}");
        }
        if let Some(jmax) = self.jmax {
            let _ = writeln!(out, "# jmax = {jmax}");
        }
        let _ = writeln!(out, "# reps = {}", self.reps);
        let _ = writeln!(out, "# seed = {} ({})", self.seed, self.seed_source);
        let _ = writeln!(out, "# workers = {}", self.workers);
        let _ = writeln!(out, "# horizon_factor = {}", self.horizon_factor);
        let _ = writeln!(out, "# endpoint_convention = {}", self.endpoint_convention);
        for (k, v) in extra {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out
    }
}

/// 17 significant digits, bit-stable across runs.
fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Direct => "direct",
        Method::PoissonSummation => "poisson-summation",
        Method::IndicatorClosedForm => "indicator-closed-form",
    }
}

fn cmd_rj(r: &Resolved) -> Result<String, CliError> {
    let f = r.function_spec()?;
    let jmax = r
        .jmax
        .ok_or_else(|| CliError::Usage("--jmax is required for rj".to_string()))?;
    let series = build_series(&f, jmax, r.method)?;
    match r.format_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut out =
                r.csv_metadata(&[("series_method", method_name(series.method).to_string())]);
            out.push_str("j,R_j,u_j,partial_sum_jRj2\n");
            for j in 1..=jmax {
                let _ = writeln!(
                    out,
                    "{j},{},{},{}",
                    f17(series.r(j)),
                    f17(series.u(j)),
                    f17(series.partial_sum_jrj2_at(j))
                );
            }
            Ok(out)
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Row {
                j: usize,
                r_j: f64,
                u_j: f64,
                partial_sum_jrj2: f64,
            }
            #[derive(Serialize)]
            struct Out<'a> {
                metadata: &'a Resolved,
                series_method: &'static str,
                rows: Vec<Row>,
            }
            let rows = (1..=jmax)
                .map(|j| Row {
                    j,
                    r_j: series.r(j),
                    u_j: series.u(j),
                    partial_sum_jrj2: series.partial_sum_jrj2_at(j),
                })
                .collect();
            Ok(serde_json::to_string_pretty(&Out {
                metadata: r,
                series_method: method_name(series.method),
                rows,
            })
            .expect("serialize")
                + "\n")
        }
    }
}

fn cmd_moments(r: &Resolved) -> Result<String, CliError> {
    let f = r.function_spec()?;
    let n = r.need_n()?;
    let jmax = r.jmax.unwrap_or(n).max(n);
    let series = build_series(&f, jmax, r.method)?;
    let (regime, _) = classify_regime_report(&series, &f);
    #[derive(Serialize)]
    #[allow(non_snake_case)]
    struct Out<'a> {
        n: usize,
        theta: f64,
        function: String,
        integral: f64,
        exact_mean: f64,
        exact_variance: f64,
        eta_squared: f64,
        sum_Rj: f64,
        regime: String,
        metadata: &'a Resolved,
    }
    let out = Out {
        n,
        theta: r.theta,
        function: f.to_string(),
        integral: f.integral(),
        exact_mean: exact_mean(n, r.theta, &series, &f)?,
        exact_variance: exact_variance(n, r.theta, &series)?,
        eta_squared: eta_normalization(&series, r.theta, n)?.eta_sq,
        sum_Rj: series.sum_r(n),
        regime: format!("{regime:?}"),
        metadata: r,
    };
    Ok(serde_json::to_string_pretty(&out).expect("serialize") + "\n")
}

fn cmd_sample(r: &Resolved, cycle_counts: bool) -> Result<String, CliError> {
    let f = r.function_spec()?;
    let n = r.need_n()?;
    if cycle_counts {
        let table = permspec::rng::XiTable::new(r.theta, n);
        let mut out = r.csv_metadata(&[]);
        out.push_str("replicate,j,alpha_j\n");
        let mut lengths = Vec::new();
        for rep in 0..r.reps {
            let mut rng = replicate_rng(r.seed, rep as u64);
            permspec::ewens::sample_cycle_lengths_with_table(&table, n, &mut rng, &mut lengths);
            lengths.sort_unstable();
            let mut i = 0;
            while i < lengths.len() {
                let j = lengths[i];
                let mut count = 1usize;
                while i + 1 < lengths.len() && lengths[i + 1] == j {
                    count += 1;
                    i += 1;
                }
                let _ = writeln!(out, "{rep},{j},{count}");
                i += 1;
            }
        }
        return Ok(out);
    }

    let config = SimulationConfig::new(n, r.theta, f, r.reps, Mode::Statistic)
        .with_seed(r.seed)
        .with_workers(r.workers);
    let (_, values) = run_with_values(&config)?;
    let mut out = r.csv_metadata(&[]);
    out.push_str("replicate,I_value\n");
    for (rep, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{rep},{}", f17(*v));
    }
    Ok(out)
}

fn cmd_limit_cf(r: &Resolved, t_min: f64, t_max: f64, t_step: f64) -> Result<String, CliError> {
    if !(t_step > 0.0) || t_max < t_min {
        return Err(CliError::Usage(
            "--t-step must be positive and --t-max >= --t-min".into(),
        ));
    }
    let f = r.function_spec()?;
    let jmax = r.jmax.unwrap_or(1024);
    let series = build_series(&f, jmax, r.method)?;
    let law = build_levy(&series, r.theta, jmax)?;
    let mut out = r.csv_metadata(&[
        ("levy_atoms", law.atoms.len().to_string()),
        ("tail_variance_bound", f17(law.tail_variance_bound)),
    ]);
    out.push_str("t,re_cf,im_cf,exponent_tail_bound\n");
    let steps = ((t_max - t_min) / t_step).round() as usize;
    for i in 0..=steps {
        let t = t_min + i as f64 * t_step;
        let v = cf_mu(&law, t);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            f17(t),
            f17(v.re),
            f17(v.im),
            f17(v.exponent_tail_bound)
        );
    }
    Ok(out)
}

fn cmd_limit_sample(r: &Resolved, mode: LimitMode, eps: f64) -> Result<String, CliError> {
    let f = r.function_spec()?;
    let mode_str = match mode {
        LimitMode::Mu => "mu",
        LimitMode::Hn => "hn",
    };
    let mut out = r.csv_metadata(&[("mode", mode_str.to_string())]);
    match mode {
        LimitMode::Mu => {
            let jmax = r.jmax.unwrap_or(4096);
            let series = build_series(&f, jmax, r.method)?;
            let law = build_levy(&series, r.theta, jmax)?;
            for rep in 0..r.reps {
                let mut rng = replicate_rng(r.seed, rep as u64);
                let v = sample_mu(&law, eps, &mut rng)?;
                let _ = writeln!(out, "{}", f17(v));
            }
        }
        LimitMode::Hn => {
            let n = r.need_n()?;
            let series = build_series(&f, n, r.method)?;
            let sampler = HnSampler::new(&series, r.theta, n)?;
            for rep in 0..r.reps {
                let mut rng = replicate_rng(r.seed, rep as u64);
                let _ = writeln!(out, "{}", f17(sampler.draw_sparse(&mut rng)));
            }
        }
    }
    Ok(out)
}

fn cmd_coupling(r: &Resolved) -> Result<String, CliError> {
    let f = r.function_spec()?;
    let n = r.need_n()?;
    let series = build_series(&f, n, r.method)?;
    let report = coupling_experiment(
        n,
        r.theta,
        &series.u,
        r.reps,
        r.horizon_factor,
        r.seed,
        r.workers,
    )?;
    match r.format_or(OutputFormat::Json) {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                metadata: &'a Resolved,
                report: &'a permspec::montecarlo::CouplingReport,
            }
            Ok(serde_json::to_string_pretty(&Out { metadata: r, report: &report })
                .expect("serialize")
                + "\n")
        }
        OutputFormat::Csv => {
            let mut out = r.csv_metadata(&[]);
            let _ = writeln!(out, "quantity,value");
            let _ = writeln!(out, "mean_abs_diff,{}", f17(report.mean_abs_diff));
            let _ = writeln!(out, "mean_abs_diff_stderr,{}", f17(report.mean_abs_diff_stderr));
            let _ = writeln!(out, "mean_sq_diff,{}", f17(report.mean_sq_diff));
            let _ = writeln!(out, "mean_sq_diff_stderr,{}", f17(report.mean_sq_diff_stderr));
            let _ = writeln!(out, "inequality_violations,{}", report.inequality_violations);
            let _ = writeln!(out, "w_tail_bound,{}", f17(report.w_tail_bound));
            let _ = writeln!(out, "jn_chi_square,{}", f17(report.jn_chi_square));
            Ok(out)
        }
    }
}

fn cmd_verify(r: &Resolved) -> Result<String, CliError> {
    let f = r.function_spec()?;
    let n = r.need_n()?;
    let report = verify_against_enumeration(n, r.theta, &f, r.reps, r.seed)?;
    #[derive(Serialize)]
    struct Out<'a> {
        metadata: &'a Resolved,
        report: &'a permspec::montecarlo::VerificationReport,
    }
    Ok(serde_json::to_string_pretty(&Out { metadata: r, report: &report }).expect("serialize") + "\n")
}

fn cmd_simulate(r: &Resolved, mode: SimMode) -> Result<String, CliError> {
    let f = r.function_spec()?;
    let n = r.need_n()?;
    let mode = match mode {
        SimMode::Statistic => Mode::Statistic,
        SimMode::CycleCounts => Mode::CycleCounts,
        SimMode::Coupling => Mode::Coupling,
        SimMode::HN => Mode::HN,
        SimMode::MuLimit => Mode::MuLimit,
    };
    let mut config = SimulationConfig::new(n, r.theta, f, r.reps, mode)
        .with_seed(r.seed)
        .with_workers(r.workers);
    config.horizon_factor = r.horizon_factor;
    let (report, _) = run_with_values(&config)?;

    if let Some(prefix) = &r.emit_plot_data {
        let mut hist = String::new();
        for &(x, mass) in &report.histogram.bins {
            let _ = writeln!(hist, "{} {}", f17(x), f17(mass));
        }
        std::fs::write(format!("{prefix}_histogram.dat"), hist)?;
        let mut cf_re = String::new();
        let mut cf_im = String::new();
        for p in &report.cf_grid {
            let _ = writeln!(cf_re, "{} {}", f17(p.t), f17(p.re));
            let _ = writeln!(cf_im, "{} {}", f17(p.t), f17(p.im));
        }
        std::fs::write(format!("{prefix}_cf_re.dat"), cf_re)?;
        std::fs::write(format!("{prefix}_cf_im.dat"), cf_im)?;
    }

    match r.format_or(OutputFormat::Json) {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                metadata: &'a Resolved,
                report: &'a permspec::montecarlo::EmpiricalReport,
            }
            Ok(serde_json::to_string_pretty(&Out { metadata: r, report: &report })
                .expect("serialize")
                + "\n")
        }
        OutputFormat::Csv => {
            // aligned text for humans
            let mut out = r.csv_metadata(&[]);
            let _ = writeln!(out, "{:<22} {}", "replicates", report.config.replicates);
            let _ = writeln!(out, "{:<22} {}", "mean", f17(report.mean));
            let _ = writeln!(out, "{:<22} {}", "mean_stderr", f17(report.mean_stderr));
            let _ = writeln!(out, "{:<22} {}", "variance", f17(report.variance));
            let _ = writeln!(out, "{:<22} {}", "variance_stderr", f17(report.variance_stderr));
            let _ = writeln!(out, "{:<22} {}", "skewness", f17(report.skewness));
            let _ = writeln!(out, "{:<22} {}", "histogram_bins", report.histogram.bins.len());
            let _ = writeln!(out, "{:<22} {}", "histogram_lattice", report.histogram.lattice);
            Ok(out)
        }
    }
}
