//! Pipelines behind each subcommand.

use std::io::Write;
use std::path::{Path, PathBuf};

use fracsl_core::analysis::{
    euler_lagrange_residual, oscillator_bound_suite, rayleigh_minimum_check, SuiteSettings,
};
use fracsl_core::fraccalc::identities::run_suite;
use fracsl_core::problem::validate;
use fracsl_core::ritz::{
    converge, eigenfunction_samples, max_basis_size, RitzBasis, SpectrumResult,
};
use fracsl_core::ProblemSpec;
use serde::Serialize;

use crate::error::{io_at, CliError, Result};
use crate::json::{self, BoundJson, SpectrumJson};
use crate::spec_file::SpecFile;
use crate::table::{format_float, write_columns};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

/// Discretization shared by the solver commands.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub spec_path: PathBuf,
    pub grid_n: usize,
    pub m_min: usize,
    pub m_max: usize,
    pub n_eigs: usize,
}

impl SolveConfig {
    fn check(&self) -> Result<()> {
        if self.m_max == 0 || self.grid_n < 8 * self.m_max {
            return Err(CliError::Config(format!(
                "grid-n ({}) must be at least 8 * m-max ({})",
                self.grid_n, self.m_max
            )));
        }
        if self.m_min == 0 || self.m_min > self.m_max {
            return Err(CliError::Config(format!(
                "need 1 <= m-min ({}) <= m-max ({})",
                self.m_min, self.m_max
            )));
        }
        if self.n_eigs == 0 || self.n_eigs > self.m_min {
            return Err(CliError::Config(format!(
                "need 1 <= eigs ({}) <= m-min ({})",
                self.n_eigs, self.m_min
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Solve {
        solve: SolveConfig,
        out_dir: PathBuf,
        format: Format,
    },
    OscillatorSuite {
        interval: (f64, f64),
        p0: f64,
        orders: Vec<f64>,
        j_max: usize,
        grid_n: usize,
        m_max: usize,
        out_dir: PathBuf,
        format: Format,
    },
    ValidateOps {
        grid_n: usize,
        seed: u64,
    },
    RayleighCheck {
        solve: SolveConfig,
        seed: u64,
        out_dir: Option<PathBuf>,
    },
}

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// The problem failed admissibility checks; nothing was solved.
    Diagnostics,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Diagnostics => 2,
        }
    }
}

/// Runs one command, writing human-readable lines to `out`.
pub fn run(command: &Command, out: &mut impl Write) -> Result<Status> {
    match command {
        Command::Solve {
            solve,
            out_dir,
            format,
        } => run_solve(solve, out_dir, *format, out),
        Command::OscillatorSuite {
            interval,
            p0,
            orders,
            j_max,
            grid_n,
            m_max,
            out_dir,
            format,
        } => run_suite_command(
            *interval, *p0, orders, *j_max, *grid_n, *m_max, out_dir, *format, out,
        ),
        Command::ValidateOps { grid_n, seed } => run_validate_ops(*grid_n, *seed, out),
        Command::RayleighCheck {
            solve,
            seed,
            out_dir,
        } => run_rayleigh(solve, *seed, out_dir.as_deref(), out),
    }
}

fn stdout_err(source: std::io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".into(),
        source,
    }
}

/// Loads and validates the problem; `None` after printing diagnostics.
fn load(config: &SolveConfig, out: &mut impl Write) -> Result<Option<ProblemSpec>> {
    config.check()?;
    let file = SpecFile::read(&config.spec_path)?;
    let base = config.spec_path.parent().unwrap_or(Path::new("."));
    let spec = file.resolve(base)?;
    let grid = spec.grid(config.grid_n)?;
    let validation = validate(&spec, &grid);
    if !validation.is_admissible() {
        for d in &validation.diagnostics {
            writeln!(out, "diagnostic: {d}").map_err(stdout_err)?;
        }
        return Ok(None);
    }
    if let Some(h) = validation.holder_quotient {
        writeln!(out, "advisory: Holder quotient of (sqrt w)' = {h:.3e}").map_err(stdout_err)?;
    }
    Ok(Some(spec))
}

fn solve(spec: &ProblemSpec, config: &SolveConfig) -> Result<(SpectrumResult, RitzBasis)> {
    let grid = spec.grid(config.grid_n)?;
    debug_assert!(config.m_max <= max_basis_size(&grid));
    Ok(converge(
        spec,
        &grid,
        config.n_eigs,
        config.m_min,
        config.m_max,
    )?)
}

fn run_solve(
    config: &SolveConfig,
    out_dir: &Path,
    format: Format,
    out: &mut impl Write,
) -> Result<Status> {
    let Some(spec) = load(config, out)? else {
        return Ok(Status::Diagnostics);
    };
    let (result, basis) = solve(&spec, config)?;
    std::fs::create_dir_all(out_dir).map_err(io_at(out_dir))?;
    if format.json() {
        json::write(&out_dir.join("spectrum.json"), &SpectrumJson::from(&result))?;
    }

    let eig_dir = out_dir.join("eigenfunctions");
    if format.csv() {
        std::fs::create_dir_all(&eig_dir).map_err(io_at(&eig_dir))?;
    }
    let mut rows = Vec::new();
    for n in 1..=result.eigenvalues.len() {
        let view = eigenfunction_samples(&result, &basis, n)?;
        let report = euler_lagrange_residual(&spec, &view, view.eigenvalue)?;
        if format.csv() {
            write_columns(
                &eig_dir.join(format!("y_{n}.csv")),
                basis.grid(),
                &[("y", view.y.values()), ("caputo_y", view.caputo.values())],
            )?;
        }
        let stagnation = result.stagnation[n - 1];
        writeln!(
            out,
            "n={n} lambda={} stagnation={} residual={}",
            format_float(view.eigenvalue),
            stagnation.map_or("n/a".into(), format_float),
            format_float(report.caputo.l2_norm)
        )
        .map_err(stdout_err)?;
        rows.push(ResidualRow {
            n,
            lambda: view.eigenvalue,
            residual_l2: report.caputo.l2_norm,
            residual_rl_l2: report.riemann_liouville.l2_norm,
            form_difference: report.difference_norm,
            boundary_flux: report.caputo.boundary_flux,
            constraint_gradient: report.constraint_gradient_norm,
        });
    }
    if format.csv() {
        write_rows(&out_dir.join("residuals.csv"), &rows)?;
    }
    Ok(Status::Success)
}

struct ResidualRow {
    n: usize,
    lambda: f64,
    residual_l2: f64,
    residual_rl_l2: f64,
    form_difference: f64,
    boundary_flux: f64,
    constraint_gradient: f64,
}

/// A record with a fixed header, written by [`write_rows`].
trait CsvRow {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl CsvRow for ResidualRow {
    const HEADER: &'static [&'static str] = &[
        "n",
        "lambda",
        "residual_l2",
        "residual_rl_l2",
        "form_difference",
        "boundary_flux",
        "constraint_gradient",
    ];

    fn fields(&self) -> Vec<String> {
        let floats = [
            self.lambda,
            self.residual_l2,
            self.residual_rl_l2,
            self.form_difference,
            self.boundary_flux,
            self.constraint_gradient,
        ];
        std::iter::once(self.n.to_string())
            .chain(floats.map(format_float))
            .collect()
    }
}

impl CsvRow for BoundJson {
    const HEADER: &'static [&'static str] =
        &["alpha1", "alpha2", "j", "K", "lhs", "rhs", "margin", "pass"];

    fn fields(&self) -> Vec<String> {
        vec![
            format_float(self.alpha1),
            format_float(self.alpha2),
            self.j.to_string(),
            format_float(self.k),
            format_float(self.lhs),
            format_float(self.rhs),
            format_float(self.margin),
            self.pass.to_string(),
        ]
    }
}

fn write_rows<T: CsvRow>(path: &Path, rows: &[T]) -> Result<()> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
    writer.write_record(T::HEADER).map_err(csv_err)?;
    for row in rows {
        writer.write_record(row.fields()).map_err(csv_err)?;
    }
    writer.flush().map_err(io_at(path))
}

/// Every pair `(α₁, α₂)` with `α₁ < α₂` from `orders ∪ {1}`.
pub fn order_pairs(orders: &[f64]) -> Vec<(f64, f64)> {
    let mut all: Vec<f64> = orders.iter().copied().chain([1.0]).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    let mut pairs = Vec::new();
    for (i, &lo) in all.iter().enumerate() {
        for &hi in &all[i + 1..] {
            pairs.push((lo, hi));
        }
    }
    pairs
}

#[allow(clippy::too_many_arguments)]
fn run_suite_command(
    interval: (f64, f64),
    p0: f64,
    orders: &[f64],
    j_max: usize,
    grid_n: usize,
    m_max: usize,
    out_dir: &Path,
    format: Format,
    out: &mut impl Write,
) -> Result<Status> {
    if grid_n < 8 * m_max || m_max < j_max {
        return Err(CliError::Config(format!(
            "need jmax ({j_max}) <= m-max ({m_max}) and grid-n ({grid_n}) >= 8 * m-max"
        )));
    }
    let pairs = order_pairs(orders);
    let rows =
        oscillator_bound_suite(p0, interval, &pairs, j_max, SuiteSettings { grid_n, m_max })?;
    std::fs::create_dir_all(out_dir).map_err(io_at(out_dir))?;
    let json_rows: Vec<BoundJson> = rows.iter().map(BoundJson::from).collect();
    if format.csv() {
        write_rows(&out_dir.join("bounds.csv"), &json_rows)?;
    }
    if format.json() {
        json::write(&out_dir.join("bounds.json"), &json_rows)?;
    }
    for r in &rows {
        writeln!(
            out,
            "alpha1={} alpha2={} j={} K={:.6} lhs={:.6} rhs={:.6} margin={:.6} {}",
            r.alpha1,
            r.alpha2,
            r.j,
            r.k,
            r.lhs,
            r.rhs,
            r.margin,
            if r.pass { "pass" } else { "FAIL" }
        )
        .map_err(stdout_err)?;
    }
    Ok(Status::Success)
}

fn run_validate_ops(grid_n: usize, seed: u64, out: &mut impl Write) -> Result<Status> {
    for r in run_suite(grid_n, seed)? {
        writeln!(
            out,
            "{:<26} max error {:.3e} (n={grid_n}) {:.3e} (n={}) ratio {:.2} tolerance {:.0e} {}",
            r.name,
            r.error.coarse,
            r.error.fine,
            2 * grid_n,
            r.error.ratio(),
            r.tolerance,
            if r.passed() { "pass" } else { "FAIL" }
        )
        .map_err(stdout_err)?;
    }
    Ok(Status::Success)
}

#[derive(Serialize)]
struct RayleighJson<'a> {
    lambda_first: f64,
    j_first: f64,
    i_first: f64,
    r_first: f64,
    pair_defects: &'a [f64],
    min_perturbation_gain: f64,
    trials: usize,
    stationarity: f64,
    argmin: usize,
}

fn run_rayleigh(
    config: &SolveConfig,
    seed: u64,
    out_dir: Option<&Path>,
    out: &mut impl Write,
) -> Result<Status> {
    if config.n_eigs < 2 {
        return Err(CliError::Config("rayleigh-check needs --eigs >= 2".into()));
    }
    let Some(spec) = load(config, out)? else {
        return Ok(Status::Diagnostics);
    };
    let (result, basis) = solve(&spec, config)?;
    let report = rayleigh_minimum_check(&spec, &result, &basis, seed)?;
    let lines = [
        format!("lambda_1 = {}", format_float(report.lambda_first)),
        format!(
            "R(y_1) = {}  J(y_1) = {}  I(y_1) = {}",
            format_float(report.first.r),
            format_float(report.first.j),
            format_float(report.first.i)
        ),
        format!(
            "max |R(y_n) - lambda_n| = {:.3e}",
            report.pair_defects.iter().fold(0.0f64, |m, d| m.max(*d))
        ),
        format!(
            "min R(y_1 + h eta) - R(y_1) over {} trials = {:.3e}",
            report.trials, report.min_perturbation_gain
        ),
        format!(
            "finite-difference slope at h = 0: {:.3e}",
            report.stationarity
        ),
        format!("smallest quotient at n = {}", report.argmin),
    ];
    for line in &lines {
        writeln!(out, "{line}").map_err(stdout_err)?;
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(io_at(dir))?;
        json::write(
            &dir.join("rayleigh.json"),
            &RayleighJson {
                lambda_first: report.lambda_first,
                j_first: report.first.j,
                i_first: report.first.i,
                r_first: report.first.r,
                pair_defects: &report.pair_defects,
                min_perturbation_gain: report.min_perturbation_gain,
                trials: report.trials,
                stationarity: report.stationarity,
                argmin: report.argmin,
            },
        )?;
    }
    Ok(Status::Success)
}
