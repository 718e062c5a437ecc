//! Command-line front end: build measurement families, synthesize witnesses,
//! evaluate detection criteria, run scans, and recompute the bundled
//! reference table.
//!
//! Inputs that name measurement families or states accept either a bundled
//! name (`mum-d3`, `mum-d6`, `mum-d3-exact`, `mum-d6-exact`, `mub-d6`,
//! `rho-3x3`, `rho-6x6`, `mixed-<n>`, `max-entangled-<d>`) or a path to a
//! JSON file. Files load under the strict validation profile unless
//! `MUMW_PROFILE=fixture` is set, which admits print-precision data.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mumw::criteria::{
    coincidence_bound, coincidence_sum, detects_below, isotropic_crossing, isotropic_witness_value,
    j_index, j_threshold, max_entangled_witness_value, DetectionReport, JConvention,
};
use mumw::generators::{GeneratorBasis, SCHEME_DEFAULT, SCHEME_PAPER_D3};
use mumw::measurements::{
    build_mums, kappa_of, max_feasible_t, mub_fixture_d6, mub_to_mum, mum_exact_d3, mum_exact_d6,
    mum_fixture_d3, mum_fixture_d6, verify_mum_axioms, MubSet, MubSetData, Mum,
};
use mumw::numerics::{identity, min_eigenvalue, CVec};
use mumw::rotations::RotationSet;
use mumw::states::{
    isotropic_state, max_entangled, rho_fixture_3x3, rho_fixture_6x6, DensityMatrix,
};
use mumw::witness::{
    block_positivity_scan, build_witness_choi, build_witness_direct_with, evaluate_witness,
    route_residual, FirstFactor, Witness,
};
use mumw::{ToleranceConfig, ValidationPolicy};

#[derive(Parser)]
#[command(
    name = "mumw",
    version,
    about = "Mutually unbiased measurements and the entanglement witnesses they induce"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or validate measurement families.
    #[command(subcommand)]
    Mum(MumCommand),
    /// Synthesize entanglement witnesses.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Evaluate one detection criterion on one state (prints a JSON report).
    Eval(EvalArgs),
    /// Run all applicable criteria on one state side by side.
    Compare(CompareArgs),
    /// Parameter sweeps and sampling scans.
    #[command(subcommand)]
    Scan(ScanCommand),
    /// Recompute every bundled reference value and report pass/fail rows.
    Repro(ReproArgs),
}

#[derive(Subcommand)]
enum MumCommand {
    /// Construct a d + 1 POVM family from a partitioned operator basis.
    Build(MumBuildArgs),
    /// Load a family (bundled name or file) and print its axiom report.
    Check(MumCheckArgs),
}

#[derive(Args)]
struct MumBuildArgs {
    /// Hilbert space dimension.
    #[arg(short, long)]
    d: usize,
    /// Partition scheme for the operator basis.
    #[arg(long, default_value = SCHEME_DEFAULT)]
    scheme: String,
    /// Construction parameter; defaults to the positivity boundary t*.
    #[arg(long, conflicts_with = "kappa")]
    t: Option<f64>,
    /// Target efficiency parameter; solved for t via the closed form.
    #[arg(long)]
    kappa: Option<f64>,
    /// Output path for the family JSON [default: mum-d<d>.json].
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MumCheckArgs {
    /// Bundled name or path to a family JSON file.
    input: String,
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Build a witness from a measurement family and rotations.
    Build(WitnessBuildArgs),
}

/// Measurement family selector shared by several commands.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct FamilyArg {
    /// Measurement family: bundled name or path to JSON.
    #[arg(long)]
    mum: Option<String>,
    /// Bundled family name (mum-d3, mum-d6, mub-d6, mum-d3-exact,
    /// mum-d6-exact); alias for --mum restricted to bundled data.
    #[arg(long)]
    fixture: Option<String>,
}

impl FamilyArg {
    fn spec(&self) -> &str {
        self.mum
            .as_deref()
            .or(self.fixture.as_deref())
            .expect("clap group guarantees one selector")
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Direct,
    Choi,
}

#[derive(Clone, Copy, ValueEnum)]
enum FirstFactorArg {
    Conjugated,
    Plain,
}

impl From<FirstFactorArg> for FirstFactor {
    fn from(v: FirstFactorArg) -> Self {
        match v {
            FirstFactorArg::Conjugated => FirstFactor::Conjugated,
            FirstFactorArg::Plain => FirstFactor::Plain,
        }
    }
}

#[derive(Args)]
struct WitnessBuildArgs {
    #[command(flatten)]
    family: FamilyArg,
    /// Comma-separated ones-axis rotation angles (d = 3 families only);
    /// accepts pi fractions such as pi/3, 2pi/3, -pi/4, or plain numbers.
    #[arg(long)]
    angles: Option<String>,
    #[arg(long, value_enum, default_value_t = RouteArg::Direct)]
    route: RouteArg,
    #[arg(long, value_enum, default_value_t = FirstFactorArg::Conjugated)]
    first_factor: FirstFactorArg,
    /// Output path for the witness JSON [default: witness-d<d>.json].
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Path to a witness JSON file (the witness criterion only).
    #[arg(long, conflicts_with_all = ["mum", "fixture", "angles", "route", "first_factor"])]
    witness: Option<PathBuf>,
    /// Measurement family: bundled name or JSON path.
    #[arg(long)]
    mum: Option<String>,
    /// Bundled family name; alias for --mum restricted to bundled data.
    #[arg(long, conflicts_with = "mum")]
    fixture: Option<String>,
    /// State: bundled name or JSON path.
    #[arg(long)]
    state: String,
    /// Criterion to evaluate.
    #[arg(long, value_enum, default_value_t = CriterionArg::Witness)]
    criterion: CriterionArg,
    /// Rotation angles for the witness criterion (d = 3 families only).
    #[arg(long)]
    angles: Option<String>,
    #[arg(long, value_enum, default_value_t = RouteArg::Direct)]
    route: RouteArg,
    #[arg(long, value_enum, default_value_t = FirstFactorArg::Conjugated)]
    first_factor: FirstFactorArg,
    /// Rescale the state to unit trace before evaluating.
    #[arg(long)]
    normalize: bool,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CriterionArg {
    Witness,
    JIndex,
    Coincidence,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    family: FamilyArg,
    #[arg(long)]
    state: String,
    /// Rotation angles for the witness criterion.
    #[arg(long)]
    angles: Option<String>,
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum ScanCommand {
    /// Sweep the isotropic noise parameter and locate the detection
    /// threshold.
    Isotropic(ScanIsotropicArgs),
    /// Sample product states against a witness (block positivity check).
    Product(ScanProductArgs),
}

#[derive(Args)]
struct ScanIsotropicArgs {
    /// Hilbert space dimension (builds a family on the fly).
    #[arg(short, long)]
    d: Option<usize>,
    #[arg(long, default_value = SCHEME_DEFAULT)]
    scheme: String,
    /// Use an existing family (bundled name or JSON path) instead of -d.
    #[arg(long, conflicts_with_all = ["d", "scheme", "t", "kappa"])]
    mum: Option<String>,
    /// Construction parameter; defaults to the positivity boundary t*.
    #[arg(long, conflicts_with = "kappa")]
    t: Option<f64>,
    /// Target efficiency parameter; solved for t via the closed form.
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    alpha_min: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha_max: f64,
    /// Number of grid intervals on [alpha-min, alpha-max].
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ScanProductArgs {
    #[command(flatten)]
    family: FamilyArg,
    #[arg(long)]
    angles: Option<String>,
    #[arg(long, value_enum, default_value_t = FirstFactorArg::Conjugated)]
    first_factor: FirstFactorArg,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReproArgs {
    /// Emit the rows as JSON.
    #[arg(long)]
    json: bool,
    /// Load bundled measurement and state data from this directory
    /// (mum_d3.json, mum_d6.json, mub_d6.json, rho_3x3.json, rho_6x6.json)
    /// instead of the compiled-in copies.
    #[arg(long)]
    fixture_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Mum(MumCommand::Build(args)) => cmd_mum_build(args)?,
        Command::Mum(MumCommand::Check(args)) => cmd_mum_check(args)?,
        Command::Witness(WitnessCommand::Build(args)) => cmd_witness_build(args)?,
        Command::Eval(args) => cmd_eval(args)?,
        Command::Compare(args) => cmd_compare(args)?,
        Command::Scan(ScanCommand::Isotropic(args)) => cmd_scan_isotropic(args)?,
        Command::Scan(ScanCommand::Product(args)) => cmd_scan_product(args)?,
        Command::Repro(args) => return cmd_repro(args),
    }
    Ok(ExitCode::SUCCESS)
}

fn tolerances() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Validation profile for user-supplied files, from MUMW_PROFILE.
fn file_policy() -> Result<ValidationPolicy> {
    match std::env::var("MUMW_PROFILE") {
        Ok(v) if v == "fixture" => Ok(ValidationPolicy::Fixture),
        Ok(v) if v == "strict" => Ok(ValidationPolicy::Strict),
        Ok(v) => bail!("MUMW_PROFILE must be 'strict' or 'fixture', got '{v}'"),
        Err(_) => Ok(ValidationPolicy::Strict),
    }
}

/// Source of the bundled transcription data: compiled-in by default, a
/// directory of the same JSON files when overridden (repro --fixture-dir).
struct FixtureStore {
    dir: Option<PathBuf>,
}

impl FixtureStore {
    fn bundled() -> Self {
        Self { dir: None }
    }

    fn read(&self, name: &str) -> Result<Option<String>> {
        match &self.dir {
            None => Ok(None),
            Some(dir) => {
                let path = dir.join(name);
                Ok(Some(
                    std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?,
                ))
            }
        }
    }

    fn mum_d3(&self) -> Result<Mum> {
        Ok(match self.read("mum_d3.json")? {
            None => mum_fixture_d3()?,
            Some(text) => Mum::from_json_str(&text, &tolerances(), ValidationPolicy::Fixture)?,
        })
    }

    fn mum_d6(&self) -> Result<Mum> {
        Ok(match self.read("mum_d6.json")? {
            None => mum_fixture_d6()?,
            Some(text) => Mum::from_json_str(&text, &tolerances(), ValidationPolicy::Fixture)?,
        })
    }

    fn mub_d6(&self) -> Result<MubSet> {
        Ok(match self.read("mub_d6.json")? {
            None => mub_fixture_d6()?,
            Some(text) => {
                let data: MubSetData = serde_json::from_str(&text)?;
                MubSet::from_data(&data, &tolerances(), ValidationPolicy::Fixture)?
            }
        })
    }

    fn rho_3x3(&self) -> Result<DensityMatrix> {
        Ok(match self.read("rho_3x3.json")? {
            None => rho_fixture_3x3()?,
            Some(text) => {
                DensityMatrix::from_json_str(&text, &tolerances(), ValidationPolicy::Fixture)?
            }
        })
    }

    fn rho_6x6(&self) -> Result<DensityMatrix> {
        Ok(match self.read("rho_6x6.json")? {
            None => rho_fixture_6x6()?,
            Some(text) => {
                DensityMatrix::from_json_str(&text, &tolerances(), ValidationPolicy::Fixture)?
            }
        })
    }
}

fn load_mum(spec: &str) -> Result<Mum> {
    let store = FixtureStore::bundled();
    let mum = match spec {
        "mum-d3" => store.mum_d3()?,
        "mum-d6" => store.mum_d6()?,
        "mum-d3-exact" => mum_exact_d3()?,
        "mum-d6-exact" => mum_exact_d6()?,
        "mub-d6" => mub_to_mum(&store.mub_d6()?)?,
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading measurement family from {path}"))?;
            Mum::from_json_str(&text, &tolerances(), file_policy()?)
                .with_context(|| format!("validating measurement family from {path}"))?
        }
    };
    Ok(mum)
}

fn maximally_mixed(n: usize) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new(
        identity(n).scale(1.0 / n as f64),
        &tolerances(),
        ValidationPolicy::Strict,
    )?)
}

fn load_state(spec: &str, normalize: bool) -> Result<DensityMatrix> {
    let rho = match spec {
        "rho-3x3" => rho_fixture_3x3()?,
        "rho-6x6" => rho_fixture_6x6()?,
        name if name.starts_with("mixed-") => {
            let n: usize = name["mixed-".len()..]
                .parse()
                .with_context(|| format!("bad dimension in state name '{name}'"))?;
            maximally_mixed(n)?
        }
        name if name.starts_with("max-entangled-") => {
            let d: usize = name["max-entangled-".len()..]
                .parse()
                .with_context(|| format!("bad dimension in state name '{name}'"))?;
            max_entangled(d)?
        }
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading state from {path}"))?;
            DensityMatrix::from_json_str(&text, &tolerances(), file_policy()?)
                .with_context(|| format!("validating state from {path}"))?
        }
    };
    Ok(if normalize { rho.normalized()? } else { rho })
}

/// Parses one angle: plain number, `pi`, `2pi/3`, `-pi/4`, `0.5pi`.
fn parse_angle(s: &str) -> Result<f64> {
    let t: String = s.trim().chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        bail!("empty angle");
    }
    let lower = t.to_ascii_lowercase();
    if let Some(idx) = lower.find("pi") {
        let coeff_s = &lower[..idx];
        let rest = &lower[idx + 2..];
        let coeff: f64 = match coeff_s {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other
                .parse()
                .with_context(|| format!("bad angle coefficient in '{s}'"))?,
        };
        let divisor: f64 = if rest.is_empty() {
            1.0
        } else if let Some(den) = rest.strip_prefix('/') {
            let v: f64 = den
                .parse()
                .with_context(|| format!("bad angle divisor in '{s}'"))?;
            if v == 0.0 {
                bail!("zero divisor in angle '{s}'");
            }
            v
        } else {
            bail!("cannot parse angle '{s}'");
        };
        Ok(coeff * PI / divisor)
    } else {
        lower
            .parse()
            .with_context(|| format!("cannot parse angle '{s}'"))
    }
}

fn parse_angle_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_angle).collect()
}

fn rotations_for(mum: &Mum, angles: &Option<String>) -> Result<RotationSet> {
    match angles {
        None => Ok(RotationSet::identity(mum.d(), mum.num_povms())?),
        Some(list) => {
            if mum.d() != 3 {
                bail!("--angles builds ones-axis rotations and needs a d = 3 family");
            }
            let parsed = parse_angle_list(list)?;
            Ok(RotationSet::from_axis_angles_d3(&parsed)?)
        }
    }
}

fn synthesize(
    mum: &Mum,
    rots: &RotationSet,
    route: RouteArg,
    first_factor: FirstFactorArg,
) -> Result<Witness> {
    let w = match route {
        RouteArg::Direct => {
            build_witness_direct_with(mum, rots, first_factor.into(), &tolerances())?
        }
        RouteArg::Choi => {
            if matches!(first_factor, FirstFactorArg::Plain) {
                bail!("the choi route realizes the conjugated convention; --first-factor plain only applies to --route direct");
            }
            build_witness_choi(mum, rots, &tolerances())?
        }
    };
    Ok(w)
}

/// Solves kappa = 1/d + t^2 (1 + sqrt d)^2 (d - 1) for t.
fn solve_t_for_kappa(d: usize, kappa: f64) -> Result<f64> {
    let df = d as f64;
    let num = kappa - 1.0 / df;
    if num <= 0.0 {
        bail!("kappa must exceed 1/d = {:.6}", 1.0 / df);
    }
    Ok((num / ((1.0 + df.sqrt()).powi(2) * (df - 1.0))).sqrt())
}

fn cmd_mum_build(args: MumBuildArgs) -> Result<()> {
    let basis = GeneratorBasis::new(args.d, &args.scheme)?;
    let t_star = max_feasible_t(&basis)?;
    let t = match (args.t, args.kappa) {
        (Some(t), None) => t,
        (None, Some(kappa)) => solve_t_for_kappa(args.d, kappa)?,
        (None, None) => t_star,
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let mum = build_mums(&basis, t, &tolerances())?;
    let report = verify_mum_axioms(&mum, &tolerances());
    println!(
        "measurement family: d = {}, L = {}, scheme = {}",
        mum.d(),
        mum.num_povms(),
        args.scheme
    );
    println!("t = {t:.12} (boundary t* = {t_star:.12})");
    println!("kappa = {:.12}", mum.kappa());
    println!(
        "axioms: {} -> {}",
        report.describe(),
        if report.pass { "ok" } else { "violated" }
    );
    if !report.pass {
        bail!("axiom check failed");
    }
    let path = args
        .output
        .unwrap_or_else(|| PathBuf::from(format!("mum-d{}.json", args.d)));
    std::fs::write(&path, mum.to_json()?).with_context(|| format!("writing {path:?}"))?;
    println!("written: {}", path.display());
    Ok(())
}

fn cmd_mum_check(args: MumCheckArgs) -> Result<()> {
    let mum = load_mum(&args.input)?;
    let report = verify_mum_axioms(&mum, &tolerances());
    println!("source: {}", mum.source());
    println!(
        "d = {}, L = {}, kappa = {:.12}, recomputed = {:.12}",
        mum.d(),
        mum.num_povms(),
        mum.kappa(),
        kappa_of(&mum)?
    );
    println!(
        "axioms: {} -> {}",
        report.describe(),
        if report.pass { "ok" } else { "violated" }
    );
    if !report.pass {
        bail!("axiom check failed");
    }
    Ok(())
}

fn cmd_witness_build(args: WitnessBuildArgs) -> Result<()> {
    let mum = load_mum(args.family.spec())?;
    let rots = rotations_for(&mum, &args.angles)?;
    let w = synthesize(&mum, &rots, args.route, args.first_factor)?;
    println!("witness: {}", w.source());
    println!(
        "d = {}, L = {}, kappa = {:.12}",
        w.d(),
        w.num_povms(),
        w.kappa()
    );
    println!("trace = {:.12}", w.matrix().trace().re);
    println!("min eigenvalue = {:.12}", min_eigenvalue(w.operator())?);
    println!(
        "route residual (direct vs choi) = {:.3e}",
        route_residual(&mum, &rots, &tolerances())?
    );
    let path = args
        .output
        .unwrap_or_else(|| PathBuf::from(format!("witness-d{}.json", w.d())));
    std::fs::write(&path, w.to_json()?).with_context(|| format!("writing {path:?}"))?;
    println!("written: {}", path.display());
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let rho = load_state(&args.state, args.normalize)?;
    let report = match (
        &args.witness,
        args.mum.as_deref().or(args.fixture.as_deref()),
    ) {
        (Some(path), None) => {
            if args.criterion != CriterionArg::Witness {
                bail!("--witness only evaluates the witness criterion; pass --mum for others");
            }
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading witness from {}", path.display()))?;
            let w = Witness::from_json_str(&text, &tolerances())
                .with_context(|| format!("validating witness from {}", path.display()))?;
            DetectionReport::from_witness(&w, &rho)?
        }
        (None, Some(spec)) => {
            let mum = load_mum(spec)?;
            if args.criterion != CriterionArg::Witness && args.angles.is_some() {
                bail!("only the witness criterion uses --angles");
            }
            match args.criterion {
                CriterionArg::Witness => {
                    let rots = rotations_for(&mum, &args.angles)?;
                    let w = synthesize(&mum, &rots, args.route, args.first_factor)?;
                    DetectionReport::from_witness(&w, &rho)?
                }
                CriterionArg::JIndex => {
                    DetectionReport::from_j_index(&mum, &rho, JConvention::Conjugated)?
                }
                CriterionArg::Coincidence => DetectionReport::from_coincidence(&mum, &rho)?,
            }
        }
        (None, None) => bail!("provide --witness <path> or a family via --mum/--fixture"),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let mum = load_mum(args.family.spec())?;
    let rho = load_state(&args.state, args.normalize)?;
    let rots = rotations_for(&mum, &args.angles)?;
    let w = synthesize(&mum, &rots, RouteArg::Direct, FirstFactorArg::Conjugated)?;

    let mut reports = vec![DetectionReport::from_witness(&w, &rho)?];
    match DetectionReport::from_j_index(&mum, &rho, JConvention::Conjugated) {
        Ok(r) => reports.push(r),
        Err(e) => eprintln!("j-index unavailable: {e}"),
    }
    reports.push(DetectionReport::from_coincidence(&mum, &rho)?);

    if args.json {
        println!("{}", serde_json::to_string(&reports)?);
    } else {
        for r in &reports {
            println!(
                "{:<12} value {:+.12}  threshold {:+.12}  detected: {}",
                r.criterion, r.value, r.threshold, r.detected
            );
        }
    }
    Ok(())
}

/// Root of the line through (a, fa) and (b, fb); the isotropic witness
/// value is affine in the noise parameter, so this is exact up to float
/// noise. Falls back to the midpoint on a degenerate bracket.
fn interpolate_root(a: f64, fa: f64, b: f64, fb: f64) -> f64 {
    if fa == fb {
        0.5 * (a + b)
    } else {
        a + (b - a) * fa / (fa - fb)
    }
}

#[derive(Serialize)]
struct ScanRow {
    alpha: f64,
    value: f64,
    detected: bool,
}

#[derive(Serialize)]
struct IsotropicScan {
    d: usize,
    t: Option<f64>,
    kappa: f64,
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
    rows: Vec<ScanRow>,
    crossing_estimate: Option<f64>,
    closed_form_crossing: f64,
    bracket: Option<[f64; 2]>,
}

fn cmd_scan_isotropic(args: ScanIsotropicArgs) -> Result<()> {
    if args.steps < 2 {
        bail!("--steps must be at least 2");
    }
    if args.alpha_min.is_nan() || args.alpha_max.is_nan() || args.alpha_min >= args.alpha_max {
        bail!("--alpha-min must be below --alpha-max");
    }
    let mum = match (&args.mum, args.d) {
        (Some(spec), None) => load_mum(spec)?,
        (None, Some(d)) => {
            let basis = GeneratorBasis::new(d, &args.scheme)?;
            let t = match (args.t, args.kappa) {
                (Some(t), None) => t,
                (None, Some(kappa)) => solve_t_for_kappa(d, kappa)?,
                (None, None) => max_feasible_t(&basis)?,
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            build_mums(&basis, t, &tolerances())?
        }
        (None, None) => bail!("provide -d or --mum"),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let d = mum.d();
    let rots = RotationSet::identity(d, mum.num_povms())?;
    let w = build_witness_direct_with(&mum, &rots, FirstFactor::Conjugated, &tolerances())?;

    let mut rows = Vec::with_capacity(args.steps + 1);
    let mut found = None;
    for k in 0..=args.steps {
        let frac = k as f64 / args.steps as f64;
        let alpha = args.alpha_min + frac * (args.alpha_max - args.alpha_min);
        let value = evaluate_witness(&w, &isotropic_state(d, alpha)?)?;
        if found.is_none() {
            if let Some(&ScanRow {
                alpha: pa,
                value: pv,
                ..
            }) = rows.last()
            {
                if pv > 0.0 && value <= 0.0 {
                    found = Some(([pa, alpha], interpolate_root(pa, pv, alpha, value)));
                }
            }
        }
        rows.push(ScanRow {
            alpha,
            value,
            detected: detects_below(value, 0.0),
        });
    }
    let scan = IsotropicScan {
        d,
        t: mum.t(),
        kappa: mum.kappa(),
        alpha_min: args.alpha_min,
        alpha_max: args.alpha_max,
        steps: args.steps,
        crossing_estimate: found.map(|(_, e)| e),
        closed_form_crossing: isotropic_crossing(mum.num_povms()),
        bracket: found.map(|(b, _)| b),
        rows,
    };
    if args.json {
        println!("{}", serde_json::to_string(&scan)?);
    } else {
        println!(
            "isotropic sweep: d = {}, kappa = {:.9}, {} intervals on [{}, {}]",
            scan.d, scan.kappa, scan.steps, scan.alpha_min, scan.alpha_max
        );
        for row in &scan.rows {
            println!(
                "  alpha {:<8.6}  value {:+.12}  detected {}",
                row.alpha, row.value, row.detected
            );
        }
        match (scan.bracket, scan.crossing_estimate) {
            (Some(b), Some(e)) => {
                println!(
                    "sign change in [{:.6}, {:.6}], estimate {:.9}",
                    b[0], b[1], e
                );
            }
            _ => println!("no sign change on the grid"),
        }
        println!(
            "closed-form crossing 1/L = {:.9}",
            scan.closed_form_crossing
        );
    }
    Ok(())
}

fn cmd_scan_product(args: ScanProductArgs) -> Result<()> {
    let mum = load_mum(args.family.spec())?;
    let rots = rotations_for(&mum, &args.angles)?;
    let w = synthesize(&mum, &rots, RouteArg::Direct, args.first_factor)?;
    let report = block_positivity_scan(&w, mum.d(), mum.d(), args.samples, args.seed)?;
    if args.json {
        println!("{}", serde_json::to_string(&report)?);
    } else {
        println!(
            "product-state scan: {} samples (seed {})",
            report.samples, args.seed
        );
        println!(
            "min product expectation = {:+.12}",
            report.min_product_value
        );
        println!(
            "global min eigenvalue    = {:+.12}",
            report.global_min_eigenvalue
        );
        println!(
            "block positive within 1e-6: {}",
            report.block_positive(1e-6)
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct ReproRow {
    label: String,
    reference_value: f64,
    computed_value: Option<f64>,
    tolerance: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn run_row(
    label: &str,
    reference: f64,
    tolerance: f64,
    f: impl FnOnce() -> Result<f64>,
) -> ReproRow {
    match f() {
        Ok(v) => ReproRow {
            label: label.to_string(),
            reference_value: reference,
            computed_value: Some(v),
            tolerance,
            pass: (v - reference).abs() <= tolerance,
            note: None,
        },
        Err(e) => ReproRow {
            label: label.to_string(),
            reference_value: reference,
            computed_value: None,
            tolerance,
            pass: false,
            note: Some(format!("{e:#}")),
        },
    }
}

/// Z, X, Y eigenbases of a qubit.
fn qubit_three_mubs() -> Result<MubSet> {
    use num_complex::Complex;
    let inv = 1.0 / 2f64.sqrt();
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    let mk = |a, b| CVec::from_vec(vec![a, b]);
    Ok(MubSet::new(
        2,
        vec![
            vec![mk(one, zero), mk(zero, one)],
            vec![mk(one * inv, one * inv), mk(one * inv, -one * inv)],
            vec![mk(one * inv, i * inv), mk(one * inv, -i * inv)],
        ],
        &tolerances(),
        ValidationPolicy::Strict,
    )?)
}

fn max_entry_gap(a: &Mum, b: &Mum) -> f64 {
    let mut worst = 0.0_f64;
    for bb in 0..a.num_povms() {
        for n in 0..a.d() {
            let dev = (a.element(bb, n).matrix() - b.element(bb, n).matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0_f64, f64::max);
            worst = worst.max(dev);
        }
    }
    worst
}

/// Witness at the boundary kappa for dimension d, identity rotations.
fn boundary_witness(d: usize, cfg: &ToleranceConfig) -> Result<(Mum, Witness)> {
    let basis = GeneratorBasis::new(d, SCHEME_DEFAULT)?;
    let mum = build_mums(&basis, max_feasible_t(&basis)?, cfg)?;
    let rots = RotationSet::identity(d, d + 1)?;
    let w = build_witness_direct_with(&mum, &rots, FirstFactor::Conjugated, cfg)?;
    Ok((mum, w))
}

/// Grid-plus-interpolation estimate of the isotropic detection threshold.
fn grid_crossing(d: usize, cfg: &ToleranceConfig) -> Result<f64> {
    let (_, w) = boundary_witness(d, cfg)?;
    let steps = 200;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=steps {
        let alpha = k as f64 / steps as f64;
        let value = evaluate_witness(&w, &isotropic_state(d, alpha)?)?;
        if let Some((pa, pv)) = prev {
            if pv > 0.0 && value <= 0.0 {
                return Ok(interpolate_root(pa, pv, alpha, value));
            }
        }
        prev = Some((alpha, value));
    }
    bail!("no crossing found on [0, 1]")
}

/// Full witness value on the maximally entangled state minus the closed form.
fn max_ent_gap(d: usize, cfg: &ToleranceConfig) -> Result<f64> {
    let (mum, w) = boundary_witness(d, cfg)?;
    let full = evaluate_witness(&w, &max_entangled(d)?)?;
    Ok(full - max_entangled_witness_value(d, d + 1, mum.kappa()))
}

fn repro_rows(store: &FixtureStore) -> Vec<ReproRow> {
    let cfg = tolerances();
    let mut rows = Vec::new();

    rows.push(run_row("bundled d=3 family purity", 0.358, 2e-3, || {
        Ok(kappa_of(&store.mum_d3()?)?)
    }));

    rows.push(run_row(
        "rotated witness on bundled 3x3 state",
        -0.0017,
        5e-4,
        || {
            let mum = mum_exact_d3()?;
            let rots = RotationSet::from_axis_angles_d3(&[PI / 3.0, PI / 3.0, 0.0, 0.0])?;
            let w = build_witness_direct_with(&mum, &rots, FirstFactor::Conjugated, &cfg)?;
            Ok(evaluate_witness(&w, &store.rho_3x3()?)?)
        },
    ));

    rows.push(run_row(
        "index margin on unit-trace 3x3 state",
        -0.0085,
        1e-3,
        || {
            let mum = mum_exact_d3()?;
            let rho = store.rho_3x3()?.normalized()?;
            Ok(j_index(&mum, &rho, JConvention::Conjugated)? - j_threshold(mum.kappa()))
        },
    ));

    rows.push(run_row(
        "three-basis projective witness on bundled 6x6 state",
        0.68,
        2e-2,
        || {
            let mum = mub_to_mum(&store.mub_d6()?)?;
            let rots = RotationSet::identity(6, 3)?;
            let w = build_witness_direct_with(&mum, &rots, FirstFactor::Plain, &cfg)?;
            Ok(evaluate_witness(&w, &store.rho_6x6()?)?)
        },
    ));

    rows.push(run_row(
        "seven-POVM witness on bundled 6x6 state",
        -0.0114,
        3e-3,
        || {
            let mum = mum_exact_d6()?;
            let rots = RotationSet::identity(6, 7)?;
            let w = build_witness_direct_with(&mum, &rots, FirstFactor::Conjugated, &cfg)?;
            Ok(evaluate_witness(&w, &store.rho_6x6()?)?)
        },
    ));

    rows.push(run_row("d=3 reconstruction entry gap", 0.0, 2e-3, || {
        let basis = GeneratorBasis::new(3, SCHEME_PAPER_D3)?;
        let rebuilt = build_mums(&basis, 0.04066, &cfg)?;
        Ok(max_entry_gap(&rebuilt, &store.mum_d3()?))
    }));

    rows.push(run_row("d=6 reconstruction entry gap", 0.0, 2e-3, || {
        Ok(max_entry_gap(&mum_exact_d6()?, &store.mum_d6()?))
    }));

    for d in [2usize, 3, 4] {
        let label = format!("isotropic crossing (d={d})");
        let expected = isotropic_crossing(d + 1);
        rows.push(run_row(&label, expected, 1e-9, || grid_crossing(d, &cfg)));
    }

    for d in [2usize, 3] {
        let label = format!("maximally entangled closed-form gap (d={d})");
        rows.push(run_row(&label, 0.0, 1e-10, || max_ent_gap(d, &cfg)));
    }

    rows.push(run_row(
        "maximally entangled closed-form gap (d=6)",
        0.0,
        1e-10,
        || {
            let mum = mum_exact_d6()?;
            let rots = RotationSet::identity(6, 7)?;
            let w = build_witness_direct_with(&mum, &rots, FirstFactor::Conjugated, &cfg)?;
            let full = evaluate_witness(&w, &max_entangled(6)?)?;
            Ok(full - max_entangled_witness_value(6, 7, mum.kappa()))
        },
    ));

    rows.push(run_row(
        "witness value at isotropic crossing (d=3)",
        0.0,
        1e-9,
        || {
            let (_, w) = boundary_witness(3, &cfg)?;
            Ok(evaluate_witness(
                &w,
                &isotropic_state(3, isotropic_crossing(4))?,
            )?)
        },
    ));

    rows.push(run_row(
        "synthesis route residual (d=3)",
        0.0,
        1e-12,
        || {
            let mum = mum_exact_d3()?;
            let rots = RotationSet::from_axis_angles_d3(&[PI / 3.0, PI / 3.0, 0.0, 0.0])?;
            Ok(route_residual(&mum, &rots, &cfg)?)
        },
    ));

    rows.push(run_row(
        "coincidence saturation for unbiased qubit bases",
        2.0,
        1e-9,
        || {
            let mum = mub_to_mum(&qubit_three_mubs()?)?;
            let mut m = mumw::CMat::zeros(4, 4);
            m[(0, 0)] = num_complex::Complex::new(1.0, 0.0);
            let rho = DensityMatrix::new(m, &cfg, ValidationPolicy::Strict)?;
            let value = coincidence_sum(&mum, &rho)?;
            let bound = coincidence_bound(2, 3, 1.0);
            Ok(value - bound + 2.0)
        },
    ));

    rows.push(run_row(
        "product-state floor of rotated witness (d=3)",
        0.0,
        1e-6,
        || {
            let mum = mum_exact_d3()?;
            let rots = RotationSet::from_axis_angles_d3(&[PI / 3.0, PI / 3.0, 0.0, 0.0])?;
            let w = build_witness_direct_with(&mum, &rots, FirstFactor::Conjugated, &cfg)?;
            let scan = block_positivity_scan(&w, 3, 3, 2000, 31)?;
            Ok(scan.min_product_value.min(0.0))
        },
    ));

    rows.push(run_row(
        "isotropic closed form at alpha = 1/2 (d=3)",
        -0.024_666_666_666_667,
        1e-12,
        || Ok(isotropic_witness_value(3, 4, 0.358, 0.5)),
    ));

    rows
}

fn cmd_repro(args: ReproArgs) -> Result<ExitCode> {
    let store = FixtureStore {
        dir: args.fixture_dir,
    };
    let rows = repro_rows(&store);
    let all_pass = rows.iter().all(|r| r.pass);
    if args.json {
        println!("{}", serde_json::to_string(&rows)?);
    } else {
        println!("recomputing bundled reference values:");
        for r in &rows {
            let computed = match r.computed_value {
                Some(v) => format!("{v:+.12}"),
                None => "failed".to_string(),
            };
            println!(
                "  [{}] {:<52} computed {:>16}  reference {:+.6}  tol {:.1e}{}",
                if r.pass { "PASS" } else { "FAIL" },
                r.label,
                computed,
                r.reference_value,
                r.tolerance,
                r.note
                    .as_ref()
                    .map(|n| format!("  ({n})"))
                    .unwrap_or_default()
            );
        }
        println!(
            "{}/{} rows pass",
            rows.iter().filter(|r| r.pass).count(),
            rows.len()
        );
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
