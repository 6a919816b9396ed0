//! Batch front door for the library: each subcommand reads a JSON config,
//! runs one reproducible experiment and writes a report.
//!
//! Exit codes: 0 success, 2 input error, 3 invariant violation (an inequality
//! the mathematics guarantees was observed to fail, which signals an
//! implementation bug, not a counterexample). `weight classify` additionally
//! encodes its verdict: 0 consistent, 10/11/12 fails condition (1)/(2)/(3),
//! 13 inconclusive.
//!
//! Randomized experiments require `--seed`; omitting it is an error rather
//! than a silent default. Reports embed the resolved config and library
//! version; the wall clock lives in a separate header so payloads diff clean.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use ergospec::config::{
    matrix_from_spec, matrix_to_spec, LadderSpec, MatrixSpec, MeasureSpec, SystemSpec, WeightSpec,
};
use ergospec::lattice::box_iter;
use ergospec::ncsystem::{
    classical_twisted_grid, grid_sup, kronecker_decomposition, operator_spectral_coeff,
    operator_spectral_coeff_direct, read_stream, uniform_ww_sup, weighted_average,
    ergodic_average, MatrixSystem, Operator, Projection, SampleStream,
};
use ergospec::report::Report;
use ergospec::spectral::{
    affinity_with, empirical_density, point_mass, wiener_continuity, AffinityReport,
    EmpiricalDensity, QuadratureConfig,
};
use ergospec::vandercorput::{vdc_bound, vdc_bound_sweep, OperatorArray2D, VdcBoundReport};
use ergospec::weights::{
    classify_besicovitch, correlation_table, ClassifyConfig, ClassifyTolerances, CorrelationRow,
    Verdict,
};
use ergospec::{Error, Ladder, MultiIndex, Result, TorusPoint};

const EXIT_OK: i32 = 0;
const EXIT_INPUT: i32 = 2;
const EXIT_INVARIANT: i32 = 3;

/// Reproducible experiments over weighted multi-parameter ergodic averages.
#[derive(Parser)]
#[command(name = "ergospec", version, about)]
struct Cli {
    #[command(subcommand)]
    domain: Domain,
}

#[derive(Subcommand)]
enum Domain {
    /// Weight-sequence experiments.
    #[command(subcommand)]
    Weight(WeightCmd),
    /// Spectral-measure experiments.
    #[command(subcommand)]
    Spectral(SpectralCmd),
    /// Matrix dynamical-system experiments.
    #[command(subcommand)]
    System(SystemCmd),
    /// Van der Corput inequality experiments.
    #[command(subcommand)]
    Vdc(VdcCmd),
}

#[derive(Subcommand)]
enum WeightCmd {
    /// Correlation table, per-rung spectral summary and point masses.
    Analyze(CommonArgs),
    /// Screen a sequence against the bounded-Besicovitch conditions.
    Classify(CommonArgs),
}

#[derive(Subcommand)]
enum SpectralCmd {
    /// Empirical spectral density along a truncation ladder.
    Estimate(CommonArgs),
    /// Affinity of two sequences or two representable measures.
    Affinity(CommonArgs),
}

#[derive(Subcommand)]
enum SystemCmd {
    /// Weighted or plain operator averages plus the two-path coefficient check.
    Simulate(CommonArgs),
    /// Sup of twisted averages over a frequency grid along a ladder.
    #[command(name = "ww-uniform")]
    WwUniform(CommonArgs),
}

#[derive(Subcommand)]
enum VdcCmd {
    /// Evaluate the inequality on one configured array and window.
    Check(CommonArgs),
    /// Seeded campaign over random arrays, sweeping all admissible windows.
    Fuzz(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Seed for randomized parts; required whenever the config randomizes.
    #[arg(long)]
    seed: Option<u64>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::InvariantViolation(_) => EXIT_INVARIANT,
                _ => EXIT_INPUT,
            }
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.domain {
        Domain::Weight(WeightCmd::Analyze(args)) => cmd_weight_analyze(args),
        Domain::Weight(WeightCmd::Classify(args)) => cmd_weight_classify(args),
        Domain::Spectral(SpectralCmd::Estimate(args)) => cmd_spectral_estimate(args),
        Domain::Spectral(SpectralCmd::Affinity(args)) => cmd_spectral_affinity(args),
        Domain::System(SystemCmd::Simulate(args)) => cmd_system_simulate(args),
        Domain::System(SystemCmd::WwUniform(args)) => cmd_ww_uniform(args),
        Domain::Vdc(VdcCmd::Check(args)) => cmd_vdc_check(args),
        Domain::Vdc(VdcCmd::Fuzz(args)) => cmd_vdc_fuzz(args),
    }
}

fn load_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn emit<T: Serialize>(
    args: &CommonArgs,
    report: &Report<T>,
    csv_override: Option<String>,
) -> Result<()> {
    let mut text = match args.format {
        Format::Json => report.to_json()?,
        Format::Csv => match csv_override {
            Some(csv) => csv,
            None => report.payload_csv()?,
        },
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::invalid("this experiment randomizes; pass --seed"))
}

fn parse_points(raw: &[Vec<f64>], dim: usize) -> Result<Vec<TorusPoint>> {
    raw.iter()
        .map(|angles| {
            let z = TorusPoint::new(angles.clone())?;
            if z.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: z.dim() });
            }
            Ok(z)
        })
        .collect()
}

fn default_correlation_halfwidth() -> i64 {
    5
}

fn default_stability() -> f64 {
    0.05
}

// ---------------------------------------------------------------------------
// weight analyze

#[derive(Serialize, Deserialize)]
struct AnalyzeConfig {
    weight: WeightSpec,
    ladder: LadderSpec,
    #[serde(default = "default_correlation_halfwidth")]
    correlation_halfwidth: i64,
    #[serde(default = "default_stability")]
    stability_tol: f64,
    /// Atom candidates for the point-mass table.
    #[serde(default)]
    points: Vec<Vec<f64>>,
    /// Dirichlet window halfwidth; `min(256, smallest rung)` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pointmass_halfwidth: Option<i64>,
}

#[derive(Serialize)]
struct RungSummary {
    n: Vec<i64>,
    mass: f64,
    hermitian_defect: f64,
}

#[derive(Serialize)]
struct PointMassEntry {
    angles: Vec<f64>,
    /// One value per rung, top rung last.
    masses: Vec<f64>,
    top_mass: f64,
    top_imag_defect: f64,
}

#[derive(Serialize)]
struct AnalyzeResults {
    sup_norm: f64,
    appears_in_s: bool,
    hermitian_defect: f64,
    max_spread: f64,
    /// Windowed Wiener average of squared correlations at the lag box.
    wiener: f64,
    correlations: Vec<CorrelationRow>,
    rungs: Vec<RungSummary>,
    pointmass_halfwidth: i64,
    point_masses: Vec<PointMassEntry>,
}

fn pointmass_window(ladder: &Ladder, requested: Option<i64>) -> Result<i64> {
    let smallest = ladder
        .0
        .iter()
        .flat_map(|n| n.0.iter().copied())
        .min()
        .unwrap_or(1);
    let h = requested.unwrap_or(256.min(smallest.max(1)));
    if h < 1 {
        return Err(Error::invalid("point-mass halfwidth must be >= 1"));
    }
    if h > smallest {
        return Err(Error::invalid(format!(
            "point-mass halfwidth {h} exceeds the smallest ladder rung {smallest}"
        )));
    }
    Ok(h)
}

fn cmd_weight_analyze(args: &CommonArgs) -> Result<i32> {
    let config: AnalyzeConfig = load_config(&args.config)?;
    let a = config.weight.build()?;
    let ladder = config.ladder.build()?;
    let d = a.dim();
    if ladder.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: ladder.dim() });
    }
    let lag = MultiIndex::splat(d, config.correlation_halfwidth);
    let corr = correlation_table(&a, &lag, &ladder, config.stability_tol)?;
    let csv = corr.to_csv();

    let densities: Vec<EmpiricalDensity> = ladder
        .0
        .iter()
        .map(|n| empirical_density(&a, n))
        .collect::<Result<_>>()?;
    let rungs = ladder
        .0
        .iter()
        .zip(&densities)
        .map(|(n, dens)| RungSummary {
            n: n.0.clone(),
            mass: dens.mass(),
            hermitian_defect: dens.hermitian_defect(),
        })
        .collect();

    let h_pm = pointmass_window(&ladder, config.pointmass_halfwidth)?;
    let h_pm_box = MultiIndex::splat(d, h_pm);
    let mut point_masses = Vec::new();
    for z in parse_points(&config.points, d)? {
        let masses: Vec<f64> = densities
            .iter()
            .map(|dens| point_mass(dens, &z, &h_pm_box).map(|pm| pm.value))
            .collect::<Result<_>>()?;
        let top = point_mass(densities.last().expect("ladder nonempty"), &z, &h_pm_box)?;
        point_masses.push(PointMassEntry {
            angles: z.angles().to_vec(),
            masses,
            top_mass: top.value,
            top_imag_defect: top.imag_defect,
        });
    }

    let results = AnalyzeResults {
        sup_norm: a.sup_norm(),
        appears_in_s: corr.appears_in_s(),
        hermitian_defect: corr.hermitian_defect(),
        max_spread: corr.max_spread(),
        wiener: wiener_continuity(&corr, &lag)?,
        correlations: corr.to_rows(),
        rungs,
        pointmass_halfwidth: h_pm,
        point_masses,
    };
    let report = Report::new(&config, args.seed, results)?;
    emit(args, &report, Some(csv))?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// weight classify

#[derive(Serialize, Deserialize)]
struct ClassifyCmdConfig {
    weight: WeightSpec,
    ladder: LadderSpec,
    /// Candidate atom angles, one row per point.
    grid: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    peak_grid_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pointmass_halfwidth: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    correlation_halfwidth: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tolerances: Option<ClassifyTolerances>,
}

fn verdict_exit(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Consistent => EXIT_OK,
        Verdict::Fails(c) => 9 + c as i32,
        Verdict::Inconclusive(_) => 13,
    }
}

fn cmd_weight_classify(args: &CommonArgs) -> Result<i32> {
    let config: ClassifyCmdConfig = load_config(&args.config)?;
    let a = config.weight.build()?;
    let ladder = config.ladder.build()?;
    let grid = parse_points(&config.grid, a.dim())?;
    let mut cc = ClassifyConfig::new(ladder, grid);
    if let Some(v) = config.peak_grid_per_axis {
        cc.peak_grid_per_axis = v;
    }
    if let Some(v) = config.pointmass_halfwidth {
        cc.pointmass_halfwidth = v;
    }
    if let Some(v) = config.correlation_halfwidth {
        cc.correlation_halfwidth = v;
    }
    if let Some(v) = config.tolerances {
        cc.tolerances = v;
    }
    let classification = classify_besicovitch(&a, &cc)?;
    let verdict = classification.verdict;
    let report = Report::new(&config, args.seed, classification)?;
    emit(args, &report, None)?;
    Ok(verdict_exit(verdict))
}

// ---------------------------------------------------------------------------
// spectral estimate

#[derive(Serialize, Deserialize)]
struct EstimateConfig {
    weight: WeightSpec,
    ladder: LadderSpec,
    /// Coefficient box halfwidth reported from the top rung.
    #[serde(default = "default_table_halfwidth")]
    table_halfwidth: i64,
    /// Wiener-average window; the table halfwidth when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    wiener_halfwidth: Option<i64>,
    #[serde(default)]
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pointmass_halfwidth: Option<i64>,
}

fn default_table_halfwidth() -> i64 {
    3
}

#[derive(Serialize)]
struct CoeffRow {
    m: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct EstimateRung {
    n: Vec<i64>,
    mass: f64,
    hermitian_defect: f64,
    wiener: f64,
}

#[derive(Serialize)]
struct EstimateResults {
    rungs: Vec<EstimateRung>,
    table_halfwidth: i64,
    /// Coefficients of the top-rung density on the symmetric table box.
    top_coefficients: Vec<CoeffRow>,
    pointmass_halfwidth: i64,
    point_masses: Vec<PointMassEntry>,
}

fn cmd_spectral_estimate(args: &CommonArgs) -> Result<i32> {
    let config: EstimateConfig = load_config(&args.config)?;
    let a = config.weight.build()?;
    let ladder = config.ladder.build()?;
    let d = a.dim();
    if ladder.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: ladder.dim() });
    }
    if config.table_halfwidth < 0 {
        return Err(Error::invalid("table halfwidth must be >= 0"));
    }
    let wiener_h = config.wiener_halfwidth.unwrap_or(config.table_halfwidth);
    let wiener_box = MultiIndex::splat(d, wiener_h);

    let densities: Vec<EmpiricalDensity> = ladder
        .0
        .iter()
        .map(|n| empirical_density(&a, n))
        .collect::<Result<_>>()?;
    let mut rungs = Vec::with_capacity(densities.len());
    for (n, dens) in ladder.0.iter().zip(&densities) {
        rungs.push(EstimateRung {
            n: n.0.clone(),
            mass: dens.mass(),
            hermitian_defect: dens.hermitian_defect(),
            wiener: wiener_continuity(dens, &wiener_box)?,
        });
    }

    let top = densities.last().expect("ladder nonempty");
    let table = MultiIndex::splat(d, config.table_halfwidth);
    if !table.le(top.n()) {
        return Err(Error::BoxExceeded(format!(
            "table halfwidth {} exceeds the top rung {}",
            config.table_halfwidth,
            top.n()
        )));
    }
    let neg = table.neg();
    let mut top_coefficients = Vec::new();
    for m in box_iter(&neg.0, &table.0) {
        let mi = MultiIndex(m);
        let c = top.coeff(&mi);
        top_coefficients.push(CoeffRow { m: mi.0, re: c.re, im: c.im });
    }

    let h_pm = pointmass_window(&ladder, config.pointmass_halfwidth)?;
    let h_pm_box = MultiIndex::splat(d, h_pm);
    let mut point_masses = Vec::new();
    for z in parse_points(&config.points, d)? {
        let masses: Vec<f64> = densities
            .iter()
            .map(|dens| point_mass(dens, &z, &h_pm_box).map(|pm| pm.value))
            .collect::<Result<_>>()?;
        let top_pm = point_mass(top, &z, &h_pm_box)?;
        point_masses.push(PointMassEntry {
            angles: z.angles().to_vec(),
            masses,
            top_mass: top_pm.value,
            top_imag_defect: top_pm.imag_defect,
        });
    }

    let results = EstimateResults {
        rungs,
        table_halfwidth: config.table_halfwidth,
        top_coefficients,
        pointmass_halfwidth: h_pm,
        point_masses,
    };
    let report = Report::new(&config, args.seed, results)?;
    emit(args, &report, None)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// spectral affinity

#[derive(Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum AffinityCmdConfig {
    /// Finite-window cross average of two sequences against the affinity of
    /// their empirical densities.
    Sequences {
        a: WeightSpec,
        b: WeightSpec,
        #[serde(rename = "box")]
        corner: Vec<i64>,
    },
    /// Closed-form affinity of two representable measures.
    Measures { p: MeasureSpec, q: MeasureSpec },
}

#[derive(Serialize)]
struct MeasureAffinityResults {
    affinity: f64,
}

fn cmd_spectral_affinity(args: &CommonArgs) -> Result<i32> {
    let config: AffinityCmdConfig = load_config(&args.config)?;
    match &config {
        AffinityCmdConfig::Sequences { a, b, corner } => {
            let wa = a.build()?;
            let wb = b.build()?;
            let n = MultiIndex(corner.clone());
            let results: AffinityReport =
                ergospec::spectral::affinity_sequences(&wa, &wb, &n)?;
            let violated = results.violation;
            let report = Report::new(&config, args.seed, results)?;
            emit(args, &report, None)?;
            if violated {
                eprintln!("error: sequence average exceeded the affinity bound");
                return Ok(EXIT_INVARIANT);
            }
            Ok(EXIT_OK)
        }
        AffinityCmdConfig::Measures { p, q } => {
            let mp = p.build()?;
            let mq = q.build()?;
            let quad = QuadratureConfig::for_dim(mp.dim());
            let results = MeasureAffinityResults {
                affinity: affinity_with(&mp, &mq, &quad)?,
            };
            let report = Report::new(&config, args.seed, results)?;
            emit(args, &report, None)?;
            Ok(EXIT_OK)
        }
    }
}

// ---------------------------------------------------------------------------
// system simulate

#[derive(Serialize, Deserialize)]
struct SimulateConfig {
    system: SystemSpec,
    /// Element acted on; the 0,N-1 matrix unit when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<MatrixSpec>,
    /// Modulating weight; plain ergodic averages when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<WeightSpec>,
    ladder: LadderSpec,
    /// Symmetric lag box for the two-path coefficient check.
    #[serde(default = "default_coeff_halfwidth")]
    coeff_halfwidth: i64,
}

fn default_coeff_halfwidth() -> i64 {
    2
}

#[derive(Serialize)]
struct AverageRung {
    n: Vec<i64>,
    matrix: MatrixSpec,
    norm_l2: f64,
    norm_op: f64,
}

#[derive(Serialize)]
struct TwoPathCheck {
    n: Vec<i64>,
    halfwidth: i64,
    max_abs_deviation: f64,
    tolerance: f64,
    ok: bool,
}

#[derive(Serialize)]
struct SimulateResults {
    dim_matrix: usize,
    dim_params: usize,
    weighted: bool,
    averages: Vec<AverageRung>,
    two_path: TwoPathCheck,
}

fn element_from(config: &Option<MatrixSpec>, sys: &MatrixSystem) -> Result<Operator> {
    let dim = sys.dim_matrix();
    match config {
        Some(spec) => {
            let mat = matrix_from_spec(spec)?;
            if mat.nrows() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: mat.nrows() });
            }
            Operator::new(mat)
        }
        None => Operator::matrix_unit(dim, 0, dim - 1),
    }
}

fn cmd_system_simulate(args: &CommonArgs) -> Result<i32> {
    let config: SimulateConfig = load_config(&args.config)?;
    if config.system.needs_seed() {
        require_seed(args.seed)?;
    }
    let sys = config.system.build(args.seed)?;
    let x = element_from(&config.x, &sys)?;
    let ladder = config.ladder.build()?;
    let d = sys.dim_params();
    if ladder.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: ladder.dim() });
    }
    if config.coeff_halfwidth < 0 {
        return Err(Error::invalid("coefficient halfwidth must be >= 0"));
    }
    let weight = config.weight.as_ref().map(|w| w.build()).transpose()?;
    if let Some(a) = &weight {
        if a.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: a.dim() });
        }
    }

    let mut averages = Vec::with_capacity(ladder.0.len());
    for n in &ladder.0 {
        let avg = match &weight {
            Some(a) => weighted_average(&sys, &x, a, n)?,
            None => ergodic_average(&sys, &x, n)?,
        };
        averages.push(AverageRung {
            n: n.0.clone(),
            matrix: matrix_to_spec(avg.mat()),
            norm_l2: avg.norm_l2(),
            norm_op: avg.norm_op(),
        });
    }

    let top = ladder.top();
    let lag = MultiIndex::splat(d, config.coeff_halfwidth);
    let neg = lag.neg();
    let mut max_dev = 0.0f64;
    for m in box_iter(&neg.0, &lag.0) {
        let mi = MultiIndex(m);
        let fast = operator_spectral_coeff(&sys, &x, &mi, top)?;
        let slow = operator_spectral_coeff_direct(&sys, &x, &mi, top)?;
        max_dev = max_dev.max(fast.max_abs_diff(&slow));
    }
    let tolerance = 1e-10 * x.norm_op().powi(2).max(1.0);
    let ok = max_dev <= tolerance;
    let results = SimulateResults {
        dim_matrix: sys.dim_matrix(),
        dim_params: d,
        weighted: weight.is_some(),
        averages,
        two_path: TwoPathCheck {
            n: top.0.clone(),
            halfwidth: config.coeff_halfwidth,
            max_abs_deviation: max_dev,
            tolerance,
            ok,
        },
    };
    let report = Report::new(&config, args.seed, results)?;
    emit(args, &report, None)?;
    if !ok {
        eprintln!("error: spectral-coefficient paths disagree beyond tolerance");
        return Ok(EXIT_INVARIANT);
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// system ww-uniform

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ClassicalSource {
    /// Independent uniform ±1 samples, drawn fresh per rung; requires a seed.
    IidSigns,
    /// All-zero samples.
    Zero,
    /// Samples read from a stream file; rungs must fit inside its box.
    Stream { path: PathBuf },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "channel", rename_all = "snake_case")]
enum WwUniformConfig {
    /// Scalar samples on the lattice, twisted over a root-of-unity grid.
    Classical {
        source: ClassicalSource,
        ladder: LadderSpec,
        grid: Vec<usize>,
        #[serde(default = "default_decay_threshold")]
        decay_threshold: f64,
    },
    /// Matrix channel: sup over the grid of compressed twisted averages.
    Matrix {
        system: SystemSpec,
        /// Element; the identity when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<MatrixSpec>,
        ladder: LadderSpec,
        grid: Vec<usize>,
        #[serde(default = "default_decay_threshold")]
        decay_threshold: f64,
    },
}

fn default_decay_threshold() -> f64 {
    0.05
}

#[derive(Serialize)]
struct WwRung {
    n: Vec<i64>,
    sup: f64,
}

#[derive(Serialize)]
struct WwUniformResults {
    rungs: Vec<WwRung>,
    final_sup: f64,
    strictly_decreasing: bool,
    decay_threshold: f64,
    decayed: bool,
    /// Matrix channel only: the element has a nonzero Kronecker component,
    /// so the sup has no reason to vanish.
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_non_decay: Option<bool>,
    status: String,
}

fn summarize_ww(
    rungs: Vec<WwRung>,
    threshold: f64,
    expected_non_decay: Option<bool>,
) -> WwUniformResults {
    let sups: Vec<f64> = rungs.iter().map(|r| r.sup).collect();
    let final_sup = *sups.last().expect("ladder nonempty");
    let strictly_decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    let decayed = final_sup < threshold;
    let status = if decayed {
        "decayed".to_string()
    } else if expected_non_decay == Some(true) {
        "expected-non-decay".to_string()
    } else {
        "non-decaying".to_string()
    };
    WwUniformResults {
        rungs,
        final_sup,
        strictly_decreasing,
        decay_threshold: threshold,
        decayed,
        expected_non_decay,
        status,
    }
}

fn restrict_stream(full: &SampleStream, n: &MultiIndex) -> Result<SampleStream> {
    if !n.le(full.n()) {
        return Err(Error::BoxExceeded(format!(
            "rung {n} exceeds the stream box {}",
            full.n()
        )));
    }
    SampleStream::from_fn(n, |k| {
        let idx: Vec<usize> = k.iter().map(|&v| v as usize).collect();
        full.values()[idx.as_slice()]
    })
}

fn classical_rung_stream(
    source: &ClassicalSource,
    full: &Option<SampleStream>,
    n: &MultiIndex,
    seed: Option<u64>,
) -> Result<SampleStream> {
    match source {
        ClassicalSource::IidSigns => {
            let seed = require_seed(seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            SampleStream::from_fn(n, |_| {
                if rng.gen::<bool>() {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            })
        }
        ClassicalSource::Zero => SampleStream::from_fn(n, |_| Complex64::new(0.0, 0.0)),
        ClassicalSource::Stream { .. } => {
            restrict_stream(full.as_ref().expect("stream loaded"), n)
        }
    }
}

fn cmd_ww_uniform(args: &CommonArgs) -> Result<i32> {
    let config: WwUniformConfig = load_config(&args.config)?;
    let results = match &config {
        WwUniformConfig::Classical { source, ladder, grid, decay_threshold } => {
            let ladder = ladder.build()?;
            let d = ladder.dim();
            if grid.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: grid.len() });
            }
            let full = match source {
                ClassicalSource::Stream { path } => Some(read_stream(path)?),
                _ => None,
            };
            let mut rungs = Vec::with_capacity(ladder.0.len());
            for n in &ladder.0 {
                let stream = classical_rung_stream(source, &full, n, args.seed)?;
                let cells = classical_twisted_grid(&stream, grid)?;
                rungs.push(WwRung { n: n.0.clone(), sup: grid_sup(&cells) });
            }
            summarize_ww(rungs, *decay_threshold, None)
        }
        WwUniformConfig::Matrix { system, x, ladder, grid, decay_threshold } => {
            if system.needs_seed() {
                require_seed(args.seed)?;
            }
            let sys = system.build(args.seed)?;
            let dim = sys.dim_matrix();
            let element = match x {
                Some(spec) => element_from(&Some(spec.clone()), &sys)?,
                None => Operator::identity(dim),
            };
            let ladder = ladder.build()?;
            let d = sys.dim_params();
            if ladder.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: ladder.dim() });
            }
            if grid.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: grid.len() });
            }
            let e = Projection::new(Operator::identity(dim), 1e-9)?;
            let mut rungs = Vec::with_capacity(ladder.0.len());
            for n in &ladder.0 {
                let sup = uniform_ww_sup(&sys, &element, &e, n, grid)?;
                rungs.push(WwRung { n: n.0.clone(), sup });
            }
            let kron = kronecker_decomposition(&sys)?;
            let expected = kron.project_k(&element)?.norm_l2() > 1e-8;
            summarize_ww(rungs, *decay_threshold, Some(expected))
        }
    };
    let report = Report::new(&config, args.seed, results)?;
    emit(args, &report, None)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// vdc check

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ArraySpec {
    /// Every entry the identity.
    Identity {
        n: (usize, usize),
        #[serde(rename = "N")]
        dim: usize,
    },
    /// Every entry zero.
    Zero {
        n: (usize, usize),
        #[serde(rename = "N")]
        dim: usize,
    },
    /// Independent complex-Gaussian entries; requires a seed.
    Gaussian {
        n: (usize, usize),
        #[serde(rename = "N")]
        dim: usize,
    },
    /// Entries listed row-major with the first index outermost.
    Explicit {
        n: (usize, usize),
        #[serde(rename = "N")]
        dim: usize,
        entries: Vec<MatrixSpec>,
    },
}

impl ArraySpec {
    fn needs_seed(&self) -> bool {
        matches!(self, ArraySpec::Gaussian { .. })
    }

    fn build(&self, seed: Option<u64>) -> Result<OperatorArray2D> {
        match self {
            ArraySpec::Identity { n, dim } => {
                if n.0 == 0 || n.1 == 0 {
                    return Err(Error::invalid("array extents must be >= 1"));
                }
                Ok(OperatorArray2D::identity(n.0, n.1, *dim))
            }
            ArraySpec::Zero { n, dim } => {
                OperatorArray2D::from_fn(n.0, n.1, |_, _| Operator::zeros(*dim))
            }
            ArraySpec::Gaussian { n, dim } => {
                let seed = require_seed(seed)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                if n.0 == 0 || n.1 == 0 {
                    return Err(Error::invalid("array extents must be >= 1"));
                }
                Ok(OperatorArray2D::random_gaussian(&mut rng, n.0, n.1, *dim))
            }
            ArraySpec::Explicit { n, dim, entries } => {
                if entries.len() != n.0 * n.1 {
                    return Err(Error::invalid(format!(
                        "{} entries for a {} x {} array",
                        entries.len(),
                        n.0,
                        n.1
                    )));
                }
                let mut ops = Vec::with_capacity(entries.len());
                for spec in entries {
                    let mat = matrix_from_spec(spec)?;
                    if mat.nrows() != *dim {
                        return Err(Error::DimensionMismatch {
                            expected: *dim,
                            got: mat.nrows(),
                        });
                    }
                    ops.push(Operator::new(mat)?);
                }
                OperatorArray2D::new(n.0, n.1, ops)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct VdcCheckConfig {
    array: ArraySpec,
    h: (i64, i64),
}

fn cmd_vdc_check(args: &CommonArgs) -> Result<i32> {
    let config: VdcCheckConfig = load_config(&args.config)?;
    if config.array.needs_seed() {
        require_seed(args.seed)?;
    }
    let array = config.array.build(args.seed)?;
    let results: VdcBoundReport = vdc_bound(&array, config.h.0, config.h.1)?;
    let violated = results.violation;
    let report = Report::new(&config, args.seed, results)?;
    emit(args, &report, None)?;
    if violated {
        eprintln!("error: inequality violated; this signals an implementation bug");
        return Ok(EXIT_INVARIANT);
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// vdc fuzz

#[derive(Serialize, Deserialize)]
struct VdcFuzzConfig {
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default = "default_max_dim")]
    max_dim: usize,
    #[serde(default = "default_max_n")]
    max_n: (usize, usize),
}

impl Default for VdcFuzzConfig {
    fn default() -> Self {
        VdcFuzzConfig {
            trials: default_trials(),
            max_dim: default_max_dim(),
            max_n: default_max_n(),
        }
    }
}

fn default_trials() -> usize {
    1000
}

fn default_max_dim() -> usize {
    4
}

fn default_max_n() -> (usize, usize) {
    (8, 8)
}

#[derive(Serialize)]
struct FuzzResults {
    trials: usize,
    windows_checked: usize,
    violations: usize,
    /// Largest `lhs - rhs_padded` seen; negative while the inequality holds.
    worst_margin: f64,
    violation: bool,
}

fn cmd_vdc_fuzz(args: &CommonArgs) -> Result<i32> {
    let config: VdcFuzzConfig = load_config(&args.config)?;
    if config.trials == 0 {
        return Err(Error::invalid("campaign needs at least one trial"));
    }
    if config.max_dim == 0 || config.max_n.0 == 0 || config.max_n.1 == 0 {
        return Err(Error::invalid("dimensions and extents must be >= 1"));
    }
    let seed = require_seed(args.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut windows_checked = 0usize;
    let mut violations = 0usize;
    let mut worst_margin = f64::NEG_INFINITY;
    for _ in 0..config.trials {
        let dim = rng.gen_range(1..=config.max_dim);
        let n1 = rng.gen_range(1..=config.max_n.0);
        let n2 = rng.gen_range(1..=config.max_n.1);
        let array = OperatorArray2D::random_gaussian(&mut rng, n1, n2, dim);
        for rep in vdc_bound_sweep(&array) {
            windows_checked += 1;
            worst_margin = worst_margin.max(rep.lhs - rep.rhs_padded);
            if rep.violation {
                violations += 1;
            }
        }
    }
    let results = FuzzResults {
        trials: config.trials,
        windows_checked,
        violations,
        worst_margin,
        violation: violations > 0,
    };
    let violated = violations > 0;
    let report = Report::new(&config, args.seed, results)?;
    emit(args, &report, None)?;
    if violated {
        eprintln!("error: inequality violated; this signals an implementation bug");
        return Ok(EXIT_INVARIANT);
    }
    Ok(EXIT_OK)
}
