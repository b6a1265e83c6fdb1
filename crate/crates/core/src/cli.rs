//! Command-line front end: plot-ready CSV and JSON artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::functionals::stability_scan;
use crate::numeric::roots::{brent, RootOpts};
use crate::profile::{period, sample_profile, FixedPeriodFamily, Spacing};
use crate::spectra::{
    build_operator, eigen_report, floquet_theta, kernel_residuals, spectral_stability,
    FloquetFamily, OperatorKind, DEFAULT_ZERO_TOL,
};
use crate::wave_family::{
    a_minus_of_b, a_plus_of_b, boundary_b_minus, boundary_b_plus, critical_value_a, WaveParams,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CHWAVE_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for invalid input, 1 for numerical or I/O failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(e) if e.is_input_error() => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "chwave",
    version,
    about = "Periodic traveling waves of the Camassa-Holm equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanMode {
    VsA,
    VsB,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct ScanConfig {
    /// Wave speed.
    #[arg(long = "c", default_value_t = 2.0)]
    pub c: f64,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boundaries of the existence region, the fold of the period in `a`
    /// and fixed-period curves.
    Region {
        #[command(flatten)]
        config: ScanConfig,
        /// Points per curve.
        #[arg(long = "n", default_value_t = 50)]
        n: usize,
        /// Periods of the fixed-period curves (numbers or forms like 3pi/4).
        #[arg(long = "L", value_delimiter = ',', value_parser = parse_period)]
        periods: Vec<f64>,
    },
    /// Period function along a slice of constant `b` or constant `a`.
    PeriodScan {
        #[command(flatten)]
        config: ScanConfig,
        #[arg(long, value_enum)]
        mode: ScanMode,
        /// Values of `a` for `vs-b` slices.
        #[arg(long = "a", value_delimiter = ',', allow_negative_numbers = true)]
        a: Vec<f64>,
        /// Values of `b` for `vs-a` slices.
        #[arg(long = "b", value_delimiter = ',', allow_negative_numbers = true)]
        b: Vec<f64>,
        #[arg(long = "n", default_value_t = 50)]
        n: usize,
    },
    /// `E/M^2` along fixed-period families with the determinant of `P`.
    Stability {
        #[command(flatten)]
        config: ScanConfig,
        #[arg(long = "L", value_delimiter = ',', value_parser = parse_period)]
        periods: Vec<f64>,
        #[arg(long = "n", default_value_t = 40)]
        n: usize,
    },
    /// Eigenvalues of the four linearized operators.
    Spectrum {
        #[command(flatten)]
        config: ScanConfig,
        #[arg(long = "a", allow_negative_numbers = true)]
        a: f64,
        #[arg(long = "b", allow_negative_numbers = true)]
        b: f64,
        /// Collocation points.
        #[arg(long = "N", default_value_t = 256)]
        big_n: usize,
        /// Relative zero threshold.
        #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
        tol: f64,
    },
    /// Samples one period of the profile.
    Profile {
        #[command(flatten)]
        config: ScanConfig,
        #[arg(long = "a", allow_negative_numbers = true)]
        a: f64,
        #[arg(long = "b", allow_negative_numbers = true)]
        b: f64,
        #[arg(long = "n", default_value_t = 256)]
        n: usize,
    },
}

/// Accepts plain numbers and multiples of pi such as `pi`, `2pi`, `3pi/4`.
pub fn parse_period(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let value = if let Some(idx) = t.find("pi") {
        let coef = t[..idx].trim().trim_end_matches('*');
        let rest = t[idx + 2..].trim();
        let coef: f64 = if coef.is_empty() {
            1.0
        } else {
            coef.parse()
                .map_err(|_| format!("bad coefficient in {s:?}"))?
        };
        let div: f64 = if rest.is_empty() {
            1.0
        } else if let Some(d) = rest.strip_prefix('/') {
            d.trim()
                .parse()
                .map_err(|_| format!("bad divisor in {s:?}"))?
        } else {
            return Err(format!("cannot parse period {s:?}"));
        };
        coef * std::f64::consts::PI / div
    } else {
        t.parse()
            .map_err(|_| format!("cannot parse period {s:?}"))?
    };
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(format!("period {s:?} must be positive"))
    }
}

/// One CSV/JSON cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

/// A header row and data rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> CliResult<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(
                rec?.iter()
                    .map(|s| match s.parse::<f64>() {
                        Ok(v) => Cell::Num(v),
                        Err(_) => Cell::Text(s.to_string()),
                    })
                    .collect(),
            );
        }
        Ok(Self { header, rows })
    }

    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::to_json))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

fn num(v: f64) -> Cell {
    Cell::Num(v)
}

fn text(s: &str) -> Cell {
    Cell::Text(s.to_string())
}

/// Files written and lines to show the user.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub messages: Vec<String>,
}

fn check_config(config: &ScanConfig) -> CliResult<()> {
    if !(config.c > 0.0 && config.c.is_finite()) {
        return Err(CliError::Usage(format!(
            "--c must be positive, got {}",
            config.c
        )));
    }
    Ok(())
}

fn check_count(name: &str, n: usize) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::Usage(format!("{name} must be positive")));
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, contents: &str, outcome: &mut Outcome) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    outcome.files.push(path);
    Ok(())
}

fn emit_table(
    config: &ScanConfig,
    stem: &str,
    table: &Table,
    parameters: Value,
    outcome: &mut Outcome,
) -> CliResult<()> {
    match config.format {
        Format::Csv => write_file(
            &config.out,
            &format!("{stem}.csv"),
            &table.to_csv()?,
            outcome,
        ),
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": stem,
                "parameters": parameters,
                "rows": table.to_json_rows(),
            });
            write_file(
                &config.out,
                &format!("{stem}.json"),
                &serde_json::to_string_pretty(&doc)?,
                outcome,
            )
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Region { config, n, periods } => cmd_region(config, *n, periods),
        Command::PeriodScan {
            config,
            mode,
            a,
            b,
            n,
        } => cmd_period_scan(config, *mode, a, b, *n),
        Command::Stability { config, periods, n } => cmd_stability(config, periods, *n),
        Command::Spectrum {
            config,
            a,
            b,
            big_n,
            tol,
        } => cmd_spectrum(config, *a, *b, *big_n, *tol),
        Command::Profile { config, a, b, n } => cmd_profile(config, *a, *b, *n),
    }
}

fn interior_nodes(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |i| lo + (hi - lo) * i as f64 / (n + 1) as f64)
}

fn theta_a(a: f64, b: f64, c: f64) -> f64 {
    floquet_theta(&WaveParams::new(a, b, c), FloquetFamily::InA).unwrap_or(f64::NAN)
}

/// `n` points in `(0, top)` clustered geometrically towards 0, where the
/// fold approaches the peaked edge.
fn log_nodes(top: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = ((1e-4f64).ln(), (n as f64 / (n + 1) as f64).ln());
    (0..n)
        .map(|i| top * (lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}

/// Root of `theta_in_a` along a bracket where it changes sign.
fn fold_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    brent(
        f,
        lo,
        hi,
        RootOpts {
            x_tol: 1e-12,
            max_iter: 100,
        },
    )
    .ok()
}

/// Point where `dL/da` vanishes on the slice of constant `b`, located by the
/// sign change of the Floquet constant.
pub fn fold_on_slice(b: f64, c: f64, probes: usize) -> Option<f64> {
    let top = a_minus_of_b(b, c).ok()?;
    let grid = log_nodes(top, probes);
    let vals: Vec<f64> = grid.iter().map(|&a| theta_a(a, b, c)).collect();
    (1..grid.len())
        .find(|&i| vals[i - 1] < 0.0 && vals[i] > 0.0)
        .and_then(|i| fold_root(|a| theta_a(a, b, c), grid[i - 1], grid[i]))
}

/// Points where a fixed-period curve crosses the fold, probed at `n`
/// geometrically clustered values of `a`.
pub fn fold_crossings(fam: &FixedPeriodFamily, n: usize) -> crate::Result<Vec<WaveParams>> {
    let samples = fam.sample(n, Spacing::LogNearZero)?;
    let c = fam.c;
    let theta = |a: f64| match fam.params_at(a) {
        Ok(p) => theta_a(p.a, p.b, c),
        Err(_) => f64::NAN,
    };
    let vals: Vec<f64> = samples.iter().map(|p| theta_a(p.a, p.b, c)).collect();
    let mut out = Vec::new();
    for i in 1..samples.len() {
        if vals[i - 1] * vals[i] < 0.0 {
            if let Some(a) = fold_root(theta, samples[i - 1].a, samples[i].a) {
                if let Ok(p) = fam.params_at(a) {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

fn cmd_region(config: &ScanConfig, n: usize, periods: &[f64]) -> CliResult<Outcome> {
    check_config(config)?;
    check_count("--n", n)?;
    let c = config.c;
    let ac = critical_value_a(c)?;
    let nan = f64::NAN;
    let mut t = Table::new(&["curve", "period", "a", "b"]);
    for a in interior_nodes(0.0, ac, n) {
        t.push(vec![
            text("b_minus"),
            num(nan),
            num(a),
            num(boundary_b_minus(a, c)?),
        ]);
    }
    for a in interior_nodes(0.0, ac, n) {
        t.push(vec![
            text("b_plus"),
            num(nan),
            num(a),
            num(boundary_b_plus(a, c)?),
        ]);
    }
    for b in interior_nodes(-0.5 * c * c, 0.0, n) {
        t.push(vec![text("peaked"), num(nan), num(0.0), num(b)]);
    }
    t.push(vec![text("corner"), num(nan), num(ac), num(c * c / 6.0)]);

    let b_low = -(1.0 - (2.0f64 / 3.0).sqrt()) * c * c;
    let folds: Vec<(f64, f64)> = {
        use rayon::prelude::*;
        interior_nodes(b_low, 0.0, n)
            .collect::<Vec<_>>()
            .into_par_iter()
            .filter_map(|b| fold_on_slice(b, c, 32).map(|a| (a, b)))
            .collect()
    };
    for (a, b) in folds {
        t.push(vec![text("fold"), num(nan), num(a), num(b)]);
    }

    let mut crossings = Vec::new();
    for &l in periods {
        let fam = FixedPeriodFamily::new(l, c)?;
        let samples = fam.sample(n, Spacing::Uniform)?;
        for p in &samples {
            t.push(vec![text("fixed_period"), num(l), num(p.a), num(p.b)]);
        }
        let hits = fold_crossings(&fam, 2 * n)?;
        for p in &hits {
            t.push(vec![text("crossing"), num(l), num(p.a), num(p.b)]);
        }
        crossings.push(format!("L = {l:.6}: {} fold crossing(s)", hits.len()));
    }
    let mut outcome = Outcome::default();
    emit_table(
        config,
        "region",
        &t,
        json!({ "c": c, "n": n, "periods": periods }),
        &mut outcome,
    )?;
    outcome
        .messages
        .push(format!("corner at a = {ac:.12}, b = {:.12}", c * c / 6.0));
    outcome.messages.extend(crossings);
    Ok(outcome)
}

/// Range of `a` on the slice of constant `b`.
pub fn a_range_of_b(b: f64, c: f64) -> crate::Result<(f64, f64)> {
    let hi = a_minus_of_b(b, c)?;
    let lo = if b < 0.0 { 0.0 } else { a_plus_of_b(b, c)? };
    if !(lo < hi) {
        return Err(Error::NotInRegion { a: f64::NAN, b, c });
    }
    Ok((lo, hi))
}

fn cmd_period_scan(
    config: &ScanConfig,
    mode: ScanMode,
    a_vals: &[f64],
    b_vals: &[f64],
    n: usize,
) -> CliResult<Outcome> {
    check_config(config)?;
    check_count("--n", n)?;
    let c = config.c;
    let mut t = Table::new(&["a", "b", "period"]);
    match mode {
        ScanMode::VsB => {
            if a_vals.is_empty() {
                return Err(CliError::Usage("period-scan --mode vs-b needs --a".into()));
            }
            for &a in a_vals {
                let (bm, bp) = (boundary_b_minus(a, c)?, boundary_b_plus(a, c)?);
                for b in interior_nodes(bm, bp, n) {
                    t.push(vec![
                        num(a),
                        num(b),
                        num(period(&WaveParams::new(a, b, c))?),
                    ]);
                }
            }
        }
        ScanMode::VsA => {
            if b_vals.is_empty() {
                return Err(CliError::Usage("period-scan --mode vs-a needs --b".into()));
            }
            for &b in b_vals {
                let (lo, hi) = a_range_of_b(b, c)?;
                for a in interior_nodes(lo, hi, n) {
                    t.push(vec![
                        num(a),
                        num(b),
                        num(period(&WaveParams::new(a, b, c))?),
                    ]);
                }
            }
        }
    }
    let mut outcome = Outcome::default();
    let mode_name = match mode {
        ScanMode::VsA => "vs_a",
        ScanMode::VsB => "vs_b",
    };
    emit_table(
        config,
        "period_scan",
        &t,
        json!({ "c": c, "mode": mode_name, "a": a_vals, "b": b_vals, "n": n }),
        &mut outcome,
    )?;
    Ok(outcome)
}

#[derive(Debug, Serialize)]
struct CurveVerdict {
    period: f64,
    samples: usize,
    ratio_decreasing: bool,
    det_p_negative: bool,
    max_det_p_mismatch: f64,
    verdict: &'static str,
}

fn cmd_stability(config: &ScanConfig, periods: &[f64], n: usize) -> CliResult<Outcome> {
    check_config(config)?;
    check_count("--n", n)?;
    if periods.is_empty() {
        return Err(CliError::Usage(
            "stability needs at least one period via --L".into(),
        ));
    }
    let c = config.c;
    let mut t = Table::new(&[
        "period",
        "a",
        "b",
        "mass",
        "energy",
        "ratio",
        "dratio_da",
        "dratio_err",
        "det_p",
        "det_p_closed_form",
    ]);
    let mut verdicts = Vec::new();
    for &l in periods {
        let curve = stability_scan(l, c, n)?;
        for s in &curve.samples {
            t.push(vec![
                num(l),
                num(s.a),
                num(s.b),
                num(s.mass),
                num(s.energy),
                num(s.ratio),
                num(s.dratio_da),
                num(s.dratio_err),
                num(s.det_p),
                num(s.det_p_closed_form),
            ]);
        }
        let det_p_negative = curve.samples.iter().all(|s| s.det_p < 0.0);
        let mismatch = curve
            .samples
            .iter()
            .map(|s| ((s.det_p - s.det_p_closed_form) / s.det_p_closed_form).abs())
            .fold(0.0, f64::max);
        let stable = curve.is_stable();
        verdicts.push(CurveVerdict {
            period: l,
            samples: curve.samples.len(),
            ratio_decreasing: stable,
            det_p_negative,
            max_det_p_mismatch: mismatch,
            verdict: if stable && det_p_negative {
                "stable"
            } else {
                "undetermined"
            },
        });
    }
    let mut outcome = Outcome::default();
    emit_table(
        config,
        "stability",
        &t,
        json!({ "c": c, "periods": periods, "n": n }),
        &mut outcome,
    )?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "stability",
        "c": c,
        "curves": verdicts,
    });
    write_file(
        &config.out,
        "stability_summary.json",
        &serde_json::to_string_pretty(&summary)?,
        &mut outcome,
    )?;
    for v in &verdicts {
        outcome.messages.push(format!(
            "L = {:.6}: {} (E/M^2 decreasing: {}, det P < 0: {})",
            v.period, v.verdict, v.ratio_decreasing, v.det_p_negative
        ));
    }
    Ok(outcome)
}

fn cmd_spectrum(config: &ScanConfig, a: f64, b: f64, n: usize, tol: f64) -> CliResult<Outcome> {
    check_config(config)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::Usage(format!(
            "--tol must lie in (0, 1), got {tol}"
        )));
    }
    let p = WaveParams::new(a, b, config.c);
    let profile = sample_profile(&p, n.max(64))?;
    let mut outcome = Outcome::default();
    let mut reports = Map::new();
    for kind in [
        OperatorKind::LOp,
        OperatorKind::KOp,
        OperatorKind::JlOp,
        OperatorKind::JphiKOp,
    ] {
        let report = eigen_report(&build_operator(&profile, kind, n)?, tol)?;
        let mut t = Table::new(&["re", "im"]);
        for e in &report.eigenvalues {
            t.push(vec![num(e.re), num(e.im)]);
        }
        write_file(
            &config.out,
            &format!("spectrum_{}.csv", kind.name()),
            &t.to_csv()?,
            &mut outcome,
        )?;
        let mut v = serde_json::to_value(&report)?;
        if let Value::Object(m) = &mut v {
            m.remove("eigenvalues");
        }
        outcome.messages.push(format!(
            "{}: negative {}, zero {}{}",
            kind.name(),
            report.n_negative,
            report.n_zero,
            report
                .max_real_part
                .map(|r| format!(", max |Re| {r:.3e}"))
                .unwrap_or_default()
        ));
        reports.insert(kind.name().to_string(), v);
    }
    let stability = spectral_stability(&profile, n)?;
    let kernels = kernel_residuals(&profile, n)?;
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "spectrum",
        "parameters": { "a": a, "b": b, "c": config.c, "n": n, "zero_tol": tol },
        "reports": reports,
        "kernel_residuals": kernels,
        "spectral_stability": {
            "relative_real_part": stability.relative_real_part,
            "stable": stability.stable,
            "equivalence": stability.equivalence,
        },
    });
    write_file(
        &config.out,
        "spectrum.json",
        &serde_json::to_string_pretty(&summary)?,
        &mut outcome,
    )?;
    Ok(outcome)
}

fn cmd_profile(config: &ScanConfig, a: f64, b: f64, n: usize) -> CliResult<Outcome> {
    check_config(config)?;
    let p = WaveParams::new(a, b, config.c);
    let prof = sample_profile(&p, n)?;
    let mut t = Table::new(&["x", "phi", "dphi", "ddphi"]);
    for i in 0..prof.len() {
        t.push(vec![
            num(prof.x[i]),
            num(prof.phi[i]),
            num(prof.dphi[i]),
            num(prof.ddphi[i]),
        ]);
    }
    let mut outcome = Outcome::default();
    emit_table(
        config,
        "profile",
        &t,
        json!({
            "a": prof.params.a,
            "b": prof.params.b,
            "c": prof.params.c,
            "n": n,
            "period": prof.period,
            "kind": prof.kind,
            "phi_minus": prof.turning.phi_minus,
            "phi_plus": prof.turning.phi_plus,
            "warnings": prof.warnings,
        }),
        &mut outcome,
    )?;
    outcome.messages.push(format!("period {:.15}", prof.period));
    Ok(outcome)
}
