//! Subcommands. Each returns the JSON document for stdout and an exit code.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tsi_core::hypotheses::HypothesisReport;
use tsi_core::invariants::build_invariant_table;
use tsi_core::reconstruct::{
    recover_fields, recover_gauge_class, roundtrip, CosineData, DirectionDiagnostics, FieldError, GaugeClass,
    RecoveryConfig,
};
use tsi_core::spectral::{landau_levels, local_maxima, smoothed_wave_trace, spectrum};
use tsi_core::{PrimitiveDirection, ScalarField};

use crate::error::{CliError, CliResult, ExitCode};
use crate::io::{self, CosineFile, OutDir, TableFile, GRID_HEADER, SPRIME_HEADER};
use crate::problem::{FieldSpec, ProblemSpec};

/// Samples per side of the B and V grid files.
const CSV_GRID: usize = 64;
/// Samples of each s'(y) curve.
const SPRIME_SAMPLES: usize = 256;

#[derive(Debug, Parser)]
#[command(name = "tsi", version, about = "Wave-trace invariants and inverse reconstruction on 2-D tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the lattice, flux, field-strength and cosine hypotheses.
    Validate(Common),
    /// Compute the invariant table.
    Forward(Common),
    /// Recover B and V from a table, with given cosines or with the gauge
    /// class recovered from the problem's B.
    Reconstruct(Common),
    /// Recover the cosines cos(a0.d) from a table and the problem's B.
    GaugeClass(Common),
    /// Lowest eigenvalues of the discretized Hamiltonian.
    Spectrum(Common),
    /// Forward table, reconstruction and error report.
    Roundtrip(Common),
    /// Smoothed wave trace of the discretized spectrum.
    Trace(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Problem file (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory; without it the main document goes to stdout only.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Quadrature points per direction, or grid side for spectrum and trace.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub cutoff: Option<i32>,
    /// Tolerance on the relative B coefficient error for roundtrip.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Directions as "m0,n0;m0,n0;...".
    #[arg(long)]
    pub directions: Option<String>,
    /// Invariant table input (reconstruct, gauge-class).
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Cosine file: written by forward, read by reconstruct.
    #[arg(long)]
    pub cosines: Option<PathBuf>,
}

pub struct Outcome {
    pub stdout: String,
    pub exit: ExitCode,
}

impl Outcome {
    fn ok<T: Serialize>(doc: &T) -> Self {
        Self {
            stdout: io::to_json(doc),
            exit: ExitCode::Ok,
        }
    }
}

pub fn parse_directions(text: &str) -> CliResult<Vec<[i32; 2]>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let bad = || CliError::usage(format!("cannot parse direction '{pair}'")).at("--directions");
            let (m, n) = pair.split_once(',').ok_or_else(bad)?;
            let m = m.trim().parse().map_err(|_| bad())?;
            let n = n.trim().parse().map_err(|_| bad())?;
            PrimitiveDirection::new(m, n).map_err(|e| CliError::from(e).at("--directions"))?;
            Ok([m, n])
        })
        .collect()
}

/// Loads the problem file and applies command-line overrides.
pub fn load_spec(args: &Common) -> CliResult<ProblemSpec> {
    let mut spec: ProblemSpec = io::read_json(&args.spec)?;
    let c = &mut spec.config;
    if let Some(k) = args.kmax {
        c.kmax = Some(k);
    }
    if let Some(cut) = args.cutoff {
        c.cutoff = cut;
    }
    if let Some(t) = args.tol {
        c.tolerance_b = t;
    }
    if let Some(d) = &args.directions {
        c.directions = Some(parse_directions(d)?);
    }
    Ok(spec)
}

fn prefixed(prefix: &'static str) -> impl Fn(tsi_core::Error) -> CliError {
    move |e| {
        let err = CliError::from(e);
        let field = match &err.field {
            Some(f) if f.starts_with("modes") => format!("{prefix}.{f}"),
            _ => prefix.to_string(),
        };
        err.at(field)
    }
}

struct Fields {
    b: ScalarField,
    v: ScalarField,
}

fn fields(spec: &ProblemSpec) -> CliResult<Fields> {
    spec.lattice().map_err(prefixed("lattice"))?;
    Ok(Fields {
        b: spec.magnetic_field().map_err(prefixed("magnetic_field"))?,
        v: spec.electric_potential().map_err(prefixed("electric_potential"))?,
    })
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a PathBuf> {
    path.as_ref()
        .ok_or_else(|| CliError::usage(format!("{flag} is required for this command")).at(flag))
}

#[derive(Serialize)]
struct ValidationDoc {
    passes: bool,
    #[serde(flatten)]
    report: HypothesisReport,
}

pub fn validate(args: &Common) -> CliResult<Outcome> {
    let spec = load_spec(args)?;
    let Fields { b, v } = fields(&spec)?;
    if v.mean() != 0.0 {
        return Err(tsi_core::Error::NonzeroMeanPotential { mean: v.mean() }.into());
    }
    let report = HypothesisReport::check(&b, &spec.a0(), &spec.hypothesis_config());
    let doc = ValidationDoc {
        passes: report.passes(),
        report,
    };
    if let Some(out) = &args.out {
        OutDir::create(out)?.write_json("validation.json", &doc)?;
    }
    let mut outcome = Outcome::ok(&doc);
    if !doc.passes {
        outcome.exit = ExitCode::Validation;
    }
    Ok(outcome)
}

pub fn forward(args: &Common) -> CliResult<Outcome> {
    let spec = load_spec(args)?;
    let Fields { b, v } = fields(&spec)?;
    let a = spec.potential()?;
    let dirs = spec.directions()?;
    let config = spec.table_config();
    let table = build_invariant_table(&a, &v, &dirs, &config)?;
    let doc = TableFile::from(&table);
    let cosines = CosineData::from_a0(&spec.a0(), b.lattice(), &dirs, config.kmax, config.cosine_floor);
    if let Some(path) = &args.cosines {
        std::fs::write(path, io::to_json(&CosineFile::from(&cosines))).map_err(|e| CliError::io(path, e))?;
    }
    if let Some(out) = &args.out {
        let dir = OutDir::create(out)?;
        dir.write_json("table.json", &doc)?;
        dir.write_json("cosines.json", &CosineFile::from(&cosines))?;
        dir.write_csv("b_grid.csv", &GRID_HEADER, io::grid_rows(&b, CSV_GRID))?;
        dir.write_csv("v_grid.csv", &GRID_HEADER, io::grid_rows(&v, CSV_GRID))?;
    }
    Ok(Outcome::ok(&doc))
}

#[derive(Serialize)]
struct Comparison {
    b: FieldError,
    v: FieldError,
}

#[derive(Serialize)]
struct ReconstructionDoc {
    magnetic_field: FieldSpec,
    electric_potential: FieldSpec,
    diagnostics: Vec<DirectionDiagnostics>,
    gauge: Option<GaugeClass>,
    /// Errors against the fields in the problem file.
    comparison: Comparison,
    warnings: Vec<String>,
}

pub fn reconstruct(args: &Common) -> CliResult<Outcome> {
    let spec = load_spec(args)?;
    let Fields { b, v } = fields(&spec)?;
    let table = io::read_json::<TableFile>(required(&args.table, "--table")?)?.to_table()?;
    let lat = b.lattice();
    let kmax = args.kmax.unwrap_or(table.kmax);
    let dirs = PrimitiveDirection::all_within(spec.config.cutoff);
    let mut warnings = table.warnings.clone();
    let (cosines, gauge) = match &args.cosines {
        Some(path) => (io::read_json::<CosineFile>(path)?.to_data()?, None),
        None => {
            let class = recover_gauge_class(&table, &b, spec.config.cov_points)?;
            if !class.relative_sign_resolved {
                warnings.push("relative orientation of the basis angles not fixed by the data".into());
            }
            (class.cosine_data(&dirs, kmax, spec.config.cosine_floor), Some(class))
        }
    };
    let config = RecoveryConfig {
        cutoff: spec.config.cutoff,
        kmax,
        grid: args.grid.unwrap_or(spec.config.cov_points),
    };
    let rec = recover_fields(&table, &cosines, lat, &config)?;
    let doc = ReconstructionDoc {
        magnetic_field: io::field_spec(&rec.b),
        electric_potential: io::field_spec(&rec.v),
        diagnostics: rec.diagnostics.clone(),
        gauge,
        comparison: Comparison {
            b: FieldError::compare(&rec.b, &b),
            v: FieldError::compare(&rec.v, &v),
        },
        warnings,
    };
    if let Some(out) = &args.out {
        let dir = OutDir::create(out)?;
        dir.write_json("reconstruction.json", &doc)?;
        dir.write_csv("sprime.csv", &SPRIME_HEADER, io::sprime_rows(&rec.sprime, SPRIME_SAMPLES))?;
        dir.write_csv("b_grid.csv", &GRID_HEADER, io::grid_rows(&rec.b, CSV_GRID))?;
        dir.write_csv("v_grid.csv", &GRID_HEADER, io::grid_rows(&rec.v, CSV_GRID))?;
    }
    Ok(Outcome::ok(&doc))
}

#[derive(Serialize)]
struct CosineValue {
    m: i64,
    n: i64,
    cosine: f64,
}

#[derive(Serialize)]
struct GaugeDoc {
    class: GaugeClass,
    cosines: Vec<CosineValue>,
}

pub fn gauge_class(args: &Common) -> CliResult<Outcome> {
    let spec = load_spec(args)?;
    let Fields { b, .. } = fields(&spec)?;
    let table = io::read_json::<TableFile>(required(&args.table, "--table")?)?.to_table()?;
    let class = recover_gauge_class(&table, &b, args.grid.unwrap_or(spec.config.cov_points))?;
    let cosines = class
        .cosines_within(b.lattice(), spec.config.gauge_radius)
        .into_iter()
        .map(|((m, n), cosine)| CosineValue { m, n, cosine })
        .collect();
    let doc = GaugeDoc { class, cosines };
    if let Some(out) = &args.out {
        OutDir::create(out)?.write_json("gauge_class.json", &doc)?;
    }
    Ok(Outcome::ok(&doc))
}

#[derive(Serialize)]
struct SpectrumDoc {
    grid: usize,
    values: Vec<f64>,
    residuals: Vec<f64>,
    /// Exact levels of the constant field with the same flux.
    landau_levels: Vec<f64>,
}

fn compute_spectrum(spec: &ProblemSpec, v: &ScalarField, grid: usize, count: usize) -> CliResult<SpectrumDoc> {
    let a = spec.potential()?;
    let r = spectrum(&a, v, grid, count)?;
    Ok(SpectrumDoc {
        grid,
        landau_levels: landau_levels(a.b0(), count),
        values: r.values,
        residuals: r.residuals,
    })
}

pub fn spectrum_cmd(args: &Common) -> CliResult<Outcome> {
    let spec = load_spec(args)?;
    let Fields { v, .. } = fields(&spec)?;
    let doc = compute_spectrum(&spec, &v, args.grid.unwrap_or(spec.config.grid), spec.config.eigenvalues)?;
    if let Some(out) = &args.out {
        OutDir::create(out)?.write_json("spectrum.json", &doc)?;
    }
    Ok(Outcome::ok(&doc))
}

#[derive(Serialize)]
struct RoundtripDoc {
    passes: bool,
    tolerance_b: f64,
    tolerance_v: f64,
    b_error: FieldError,
    v_error: FieldError,
    gauge_error: Option<f64>,
    truncation_limited: bool,
    hypotheses: HypothesisReport,
    diagnostics: Vec<DirectionDiagnostics>,
    gauge: Option<GaugeClass>,
    magnetic_field: FieldSpec,
    electric_potential: FieldSpec,
    warnings: Vec<String>,
}

pub fn roundtrip_cmd(args: &Common) -> CliResult<Outcome> {
    let mut spec = load_spec(args)?;
    if let Some(g) = args.grid {
        spec.config.cov_points = g;
    }
    let Fields { b, v } = fields(&spec)?;
    let (table, report) = roundtrip(&b, &v, spec.a0(), &spec.roundtrip_config())?;
    let (tol_b, tol_v) = (spec.config.tolerance_b, spec.config.tolerance_v);
    let passes = report.b_error.relative_l2 < tol_b && report.v_error.relative_l2 < tol_v;
    let doc = RoundtripDoc {
        passes,
        tolerance_b: tol_b,
        tolerance_v: tol_v,
        b_error: report.b_error,
        v_error: report.v_error,
        gauge_error: report.gauge_error,
        truncation_limited: report.truncation_limited,
        hypotheses: report.hypotheses,
        diagnostics: report.diagnostics,
        gauge: report.gauge,
        magnetic_field: io::field_spec(&report.b),
        electric_potential: io::field_spec(&report.v),
        warnings: report.warnings,
    };
    if let Some(out) = &args.out {
        let dir = OutDir::create(out)?;
        dir.write_json("table.json", &TableFile::from(&table))?;
        dir.write_json("roundtrip.json", &doc)?;
        dir.write_csv("b_grid.csv", &GRID_HEADER, io::grid_rows(&report.b, CSV_GRID))?;
        dir.write_csv("v_grid.csv", &GRID_HEADER, io::grid_rows(&report.v, CSV_GRID))?;
    }
    let mut outcome = Outcome::ok(&doc);
    if !passes {
        outcome.exit = ExitCode::Numerical;
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct TraceDoc {
    grid: usize,
    eigenvalues: usize,
    width: f64,
    /// Local maxima of the absolute trace.
    peaks: Vec<f64>,
    /// Lengths of the shortest lattice vectors, for comparison with `peaks`.
    lengths: Vec<f64>,
}

pub fn trace(args: &Common) -> CliResult<Outcome> {
    let spec = load_spec(args)?;
    let Fields { v, .. } = fields(&spec)?;
    let c = &spec.config;
    let grid = args.grid.unwrap_or(c.trace_grid);
    let spec_doc = compute_spectrum(&spec, &v, grid, c.trace_eigenvalues.min(grid * grid))?;
    let ts: Vec<f64> = (0..c.trace_samples)
        .map(|i| c.trace_t_max * (i + 1) as f64 / c.trace_samples as f64)
        .collect();
    let values = smoothed_wave_trace(&spec_doc.values, &ts, c.trace_width);
    let lat = spec.lattice()?;
    let mut lengths: Vec<f64> = lat
        .enumerate(c.trace_t_max)
        .into_iter()
        .map(|(m, n)| lat.point(m, n).norm())
        .collect();
    lengths.sort_by(f64::total_cmp);
    let doc = TraceDoc {
        grid,
        eigenvalues: spec_doc.values.len(),
        width: c.trace_width,
        peaks: local_maxima(&ts, &values),
        lengths,
    };
    if let Some(out) = &args.out {
        let dir = OutDir::create(out)?;
        dir.write_json("trace.json", &doc)?;
        dir.write_csv("trace.csv", &["t", "trace"], ts.iter().zip(&values).map(|(&t, &f)| vec![t, f]))?;
    }
    Ok(Outcome::ok(&doc))
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Validate(a) => validate(a),
        Command::Forward(a) => forward(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::GaugeClass(a) => gauge_class(a),
        Command::Spectrum(a) => spectrum_cmd(a),
        Command::Roundtrip(a) => roundtrip_cmd(a),
        Command::Trace(a) => trace(a),
    }
}
