//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::analysis::{build_info, AnalysisError, Overrides, SamplingConfig};
use crate::bounds::{bound_second_sup, BoundError, ErrorBound};
use crate::composite::{
    composite_estimate, composite_report_with_info, convergence_study, reference_integral, CompositeConfig,
    CompositeError, Study,
};
use crate::constants::constants;
use crate::expr::{parse, ExprNode, ParseError};
use crate::optimizer::{compare_simpson, minimize_g, Case, OptimizerError};
use crate::quad::NeumaierSum;
use crate::rules::{simpson_estimate, Interval, RuleError};

/// Environment variable overriding the sampling density (points per unit length).
pub const GRID_ENV: &str = "OPTIQUAD_GRID";

pub const STUDY_HEADER: &str = "n,h,estimate,corrected,abs_error,abs_corrected_error,bound_T4ab,bound_T1p_range,bound_T2p_sigma,bound_T2p_omega,bound_T3p_range,bound_T4p_sigma,slope_error,slope_corrected";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse expression: {0}")]
    Parse(#[from] ParseError),
    #[error("evaluation failed: {0}")]
    Rule(#[from] RuleError),
    #[error("evaluation failed: {0}")]
    Analysis(#[from] AnalysisError),
    #[error("no error bound applies: {0}")]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl From<CompositeError> for CliError {
    fn from(e: CompositeError) -> Self {
        match e {
            CompositeError::NoPanels => CliError::Usage(e.to_string()),
            CompositeError::Rule(e) => CliError::Rule(e),
            CompositeError::Analysis(e) => CliError::Analysis(e),
            CompositeError::Bound(e) => CliError::Bound(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Rule(_) | CliError::Analysis(_) => 3,
            CliError::Bound(_) => 4,
            CliError::Optimizer(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "optiquad", version, about = "Optimal closed three-point quadrature with certified error bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate an expression with the composite rule and report every applicable bound
    Integrate {
        #[command(flatten)]
        problem: Problem,
        /// Number of panels
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Re-derive the optimal knot and compare with Simpson's rule
    Derive {
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare the optimal rule with Simpson's rule on an expression
    Compare {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Convergence table over a list of panel counts
    Study {
        #[command(flatten)]
        problem: Problem,
        /// Comma-separated panel counts
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4, 8, 16, 32])]
        n: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Problem {
    /// Integrand in the variable t, e.g. "exp(-t^2)"
    #[arg(long)]
    pub expr: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Lower bound of f' on [a, b]
    #[arg(long, allow_hyphen_values = true)]
    pub gamma1: Option<f64>,
    /// Upper bound of f' on [a, b]
    #[arg(long = "Gamma1", allow_hyphen_values = true)]
    pub gamma1_upper: Option<f64>,
    /// Lower bound of f'' on [a, b]
    #[arg(long, allow_hyphen_values = true)]
    pub gamma2: Option<f64>,
    /// Upper bound of f'' on [a, b]
    #[arg(long = "Gamma2", allow_hyphen_values = true)]
    pub gamma2_upper: Option<f64>,
    /// L2 norm of f' on [a, b]
    #[arg(long = "l2-fprime")]
    pub l2_fprime: Option<f64>,
    /// L2 norm of f'' on [a, b]
    #[arg(long = "l2-fsecond")]
    pub l2_fsecond: Option<f64>,
    /// Exact value of the integral, for error columns
    #[arg(long, allow_hyphen_values = true)]
    pub reference: Option<f64>,
}

impl Problem {
    fn overrides(&self) -> Overrides {
        Overrides {
            gamma1: self.gamma1,
            gamma1_upper: self.gamma1_upper,
            gamma2: self.gamma2,
            gamma2_upper: self.gamma2_upper,
            l2_fprime: self.l2_fprime,
            l2_fsecond: self.l2_fsecond,
        }
    }

    fn resolve(&self) -> Result<(ExprNode, Interval), CliError> {
        if !(self.a < self.b) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(CliError::Usage(format!("need finite a < b, got a = {}, b = {}", self.a, self.b)));
        }
        let f = parse(&self.expr)?;
        Ok((f, Interval::new(self.a, self.b)?))
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Csv,
    JsonLines,
}

/// Human-readable number with 10 significant digits.
pub fn fmt_human(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.9e}")
    }
}

/// Shortest decimal that parses back to the same value.
pub fn fmt_exact(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl Cell {
    fn human(&self) -> String {
        match self {
            Cell::Num(x) => fmt_human(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => "-".into(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_exact(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::Int(n) => (*n).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Bool(b) => (*b).into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write(&self, format: Format, w: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(w, "{}", self.header.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(w, "{}", cells.join(","))?;
                }
            }
            Format::JsonLines => {
                for row in &self.rows {
                    let fields: Vec<String> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(k, v)| format!("{}:{}", serde_json::Value::from(*k), v.json()))
                        .collect();
                    writeln!(w, "{{{}}}", fields.join(","))?;
                }
            }
            Format::Human => {
                let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::human).collect()).collect();
                let widths: Vec<usize> = (0..self.header.len())
                    .map(|j| cells.iter().map(|r| r[j].len()).chain([self.header[j].len()]).max().unwrap_or(0))
                    .collect();
                let line = |items: Vec<&str>| -> String {
                    items
                        .iter()
                        .zip(&widths)
                        .map(|(s, w)| format!("{s:>w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                };
                writeln!(w, "{}", line(self.header.clone()))?;
                for r in &cells {
                    writeln!(w, "{}", line(r.iter().map(String::as_str).collect()))?;
                }
            }
        }
        Ok(())
    }
}

fn sampling_from_env() -> Result<SamplingConfig, CliError> {
    let mut cfg = SamplingConfig::default();
    if let Ok(v) = std::env::var(GRID_ENV) {
        cfg.points_per_unit = v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&p| p >= 2)
            .ok_or_else(|| CliError::Usage(format!("{GRID_ENV} must be an integer >= 2, got `{v}`")))?;
    }
    Ok(cfg)
}

fn bound_rows(table: &mut Table, bounds: &[ErrorBound]) {
    for b in bounds {
        table.push(vec![
            "bound".into(),
            b.tag.name().into(),
            b.value.into(),
            b.applies_to.to_string().as_str().into(),
            b.rigorous.into(),
        ]);
    }
}

fn run_integrate(problem: &Problem, n: usize, format: Format, w: &mut dyn Write) -> Result<(), CliError> {
    let (f, iv) = problem.resolve()?;
    let cfg = CompositeConfig::new(iv, n)?;
    let info = build_info(&f, &iv, &problem.overrides(), &sampling_from_env()?)?;
    let report = composite_report_with_info(&f, &cfg, &info)?;

    let mut t = Table::new(vec!["kind", "name", "value", "applies_to", "rigorous"]);
    let quantity = |name: &str, v: Cell| vec!["value".into(), name.into(), v, Cell::Empty, Cell::Empty];
    t.push(quantity("n", n.into()));
    t.push(quantity("estimate", report.estimate.into()));
    t.push(quantity("correction", report.correction.into()));
    t.push(quantity("corrected", report.corrected.into()));
    if let Some(r) = problem.reference {
        t.push(quantity("error", (r - report.estimate).into()));
        t.push(quantity("corrected_error", report.corrected.map(|c| r - c).into()));
    }
    bound_rows(&mut t, &report.bounds);
    t.write(format, w)?;
    if format == Format::Human {
        for warning in &report.info.warnings {
            writeln!(w, "warning: {warning}")?;
        }
    }
    if report.bounds.is_empty() {
        return Err(BoundError::NoApplicableBound.into());
    }
    Ok(())
}

fn case_name(c: Case) -> &'static str {
    match c {
        Case::NonPositive => "beta<=0",
        Case::Interior => "0<=beta<=1/2",
        Case::UpperHalf => "beta>=1/2",
    }
}

fn run_derive(format: Format, w: &mut dyn Write) -> Result<(), CliError> {
    let r = minimize_g()?;
    let cmp = compare_simpson();
    let mut t = Table::new(vec!["name", "value"]);
    let mut row = |name: &str, v: Cell| t.push(vec![name.into(), v]);
    row("beta_star", r.beta_star.into());
    row("g_star", r.g_star.into());
    row("case", case_name(r.case_trace.selected).into());
    row("g_inf_beta_nonpositive", r.case_trace.floor_nonpositive.into());
    row("g_inf_beta_upper", r.case_trace.floor_upper.into());
    row("stationary_point_negative", r.case_trace.stationary_points[0].into());
    row("stationary_point_positive", r.case_trace.stationary_points[1].into());
    row("curvature", r.case_trace.curvature.into());
    row("oracle_beta", r.oracle_beta.into());
    row("oracle_gap", r.oracle_gap.into());
    row("oracle_resolution", r.oracle_resolution.into());
    row("end_weight", constants().end_weight.into());
    row("mid_weight", constants().mid_weight.into());
    row("g_optimal", cmp.g_optimal.into());
    row("g_simpson", cmp.g_simpson.into());
    row("ratio", cmp.ratio().into());
    t.write(format, w)?;
    Ok(())
}

fn composite_simpson(f: &ExprNode, cfg: &CompositeConfig) -> Result<f64, RuleError> {
    let mut acc = NeumaierSum::new();
    for i in 0..cfg.n() {
        acc.add(simpson_estimate(f, &cfg.panel(i))?);
    }
    Ok(acc.value())
}

fn run_compare(problem: &Problem, n: usize, format: Format, w: &mut dyn Write) -> Result<(), CliError> {
    let (f, iv) = problem.resolve()?;
    let cfg = CompositeConfig::new(iv, n)?;
    let info = build_info(&f, &iv, &problem.overrides(), &sampling_from_env()?)?;
    let reference = match problem.reference {
        Some(r) => r,
        None => reference_integral(&f, &iv)?,
    };
    let optimal = composite_estimate(&f, &cfg)?;
    let simpson = composite_simpson(&f, &cfg)?;
    let nn = (n * n) as f64;
    let m2 = info.sup_fsecond.map(|d| d.value);
    let opt_bound = m2.and_then(|m| bound_second_sup(m, &iv).ok()).map(|b| b.value / nn);
    let simpson_bound = m2.map(|m| m * iv.length().powi(3) * constants().simpson_l1 / nn);
    let rigorous = info.sup_fsecond.is_some_and(|d| d.is_rigorous());

    let mut t = Table::new(vec!["rule", "n", "estimate", "error", "bound", "kernel_l1", "rigorous"]);
    t.push(vec![
        "optimal".into(),
        n.into(),
        optimal.into(),
        (reference - optimal).into(),
        opt_bound.into(),
        constants().optimal_l1.into(),
        rigorous.into(),
    ]);
    t.push(vec![
        "simpson".into(),
        n.into(),
        simpson.into(),
        (reference - simpson).into(),
        simpson_bound.into(),
        constants().simpson_l1.into(),
        rigorous.into(),
    ]);
    t.write(format, w)?;
    if opt_bound.is_none() {
        return Err(BoundError::NoApplicableBound.into());
    }
    Ok(())
}

fn study_table(study: &Study) -> Table {
    let header: Vec<&'static str> = STUDY_HEADER.split(',').collect();
    let mut t = Table::new(header);
    let last = study.rows.len() - 1;
    for (i, r) in study.rows.iter().enumerate() {
        let (se, sc) = if i == last {
            (study.slope_error, study.slope_corrected)
        } else {
            (None, None)
        };
        t.push(vec![
            r.n.into(),
            r.h.into(),
            r.estimate.into(),
            r.corrected.into(),
            r.abs_error.into(),
            r.abs_corrected_error.into(),
            r.bound_t4ab.into(),
            r.bound_t1p_range.into(),
            r.bound_t2p_sigma.into(),
            r.bound_t2p_omega.into(),
            r.bound_t3p_range.into(),
            r.bound_t4p_sigma.into(),
            se.into(),
            sc.into(),
        ]);
    }
    t
}

fn run_study(problem: &Problem, ns: &[usize], format: Format, w: &mut dyn Write) -> Result<(), CliError> {
    let (f, iv) = problem.resolve()?;
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::Usage("--n needs a non-empty list of positive panel counts".into()));
    }
    let reference = match problem.reference {
        Some(r) => r,
        None => reference_integral(&f, &iv)?,
    };
    let study = convergence_study(&f, &iv, ns, reference, &problem.overrides(), &sampling_from_env()?)?;
    study_table(&study).write(format, w)?;
    let no_bound = study.rows.iter().any(|r| {
        [r.bound_t4ab, r.bound_t1p_range, r.bound_t2p_sigma, r.bound_t2p_omega, r.bound_t3p_range, r.bound_t4p_sigma]
            .iter()
            .all(Option::is_none)
    });
    if no_bound {
        return Err(BoundError::NoApplicableBound.into());
    }
    Ok(())
}

/// Run a parsed command, writing the report to `stdout` or the requested file.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut buf = Vec::new();
    let (result, output) = match &cli.command {
        Command::Integrate { problem, n, out } => (run_integrate(problem, *n, out.format, &mut buf), &out.output),
        Command::Derive { out } => (run_derive(out.format, &mut buf), &out.output),
        Command::Compare { problem, n, out } => (run_compare(problem, *n, out.format, &mut buf), &out.output),
        Command::Study {
            problem,
            n,
            format,
            output,
        } => (run_study(problem, n, *format, &mut buf), output),
    };
    match output {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            file.write_all(&buf)?;
            file.flush()?;
        }
        None => {
            stdout.write_all(&buf)?;
            stdout.flush()?;
        }
    }
    result
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
