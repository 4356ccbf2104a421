//! Command-line robust-stability analyzer for uncertain linear quantum
//! systems.
//!
//! Exit codes: 0 = certified / success, 2 = not certified / infeasible /
//! not applicable, 1 = usage or I/O error, 3 = oracle counterexample against
//! a certification.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qpopov::model::{matrix_to_rows, PlantDocument};
use qpopov::report::{
    trajectory_csv, AnalysisReport, CertificateReport, MinGammaReport, OracleReportDoc,
};
use qpopov::{
    certify, default_grid, min_gamma, popov_plot, reduce_annihilation_only, search_theta,
    spr_margin, CMatrix, Error, FrequencyGrid, PlantSpec, PopovAnalysis, ThetaPolicy,
};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_NOT_CERTIFIED: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;

const DEFAULT_THETA_MAX: f64 = 10.0;
const MIN_GAMMA_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "qpopov",
    about = "Robust mean-square stability analysis for uncertain linear quantum systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frequency-domain robustness verdict for a plant file.
    Analyze(AnalyzeArgs),
    /// Popov plot (CSV + SVG) for an annihilation-only SISO plant.
    PopovPlot(PopovPlotArgs),
    /// Synthesize and verify the Lyapunov certificate, with decay constants.
    Certificate(CertificateArgs),
    /// Bisect the smallest gamma the frequency test still certifies.
    MinGamma(MinGammaArgs),
    /// Sampled-perturbation sweep cross-checking the frequency verdict.
    Oracle(OracleArgs),
    /// Built-in optical parametric amplifier walkthrough.
    DemoOpa(DemoArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Args)]
struct CommonArgs {
    /// Plant description (JSON).
    input: PathBuf,
    /// Popov multiplier: a nonnegative number or "search".
    #[arg(long, default_value = "search")]
    theta: String,
    /// Sector bound: a positive number, "min", or omit for the plant's own.
    #[arg(long)]
    gamma: Option<String>,
    /// Number of finite grid points.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Upper end of the log tail, or "auto".
    #[arg(long, default_value = "auto")]
    omega_max: String,
    /// Output path.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Extra Hurwitz margin required of the nominal drift.
    #[arg(long, default_value_t = 0.0)]
    margin: f64,
    /// Report format for standard output.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct PopovPlotArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Emit only this format (default: SVG plus CSV next to it).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct CertificateArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct MinGammaArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of sampled perturbations.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also integrate and emit covariance-trace CSVs per sample.
    #[arg(long)]
    trajectories: bool,
}

#[derive(Args)]
struct DemoArgs {
    /// Coupling strength of the built-in amplifier.
    #[arg(long, default_value_t = 2.1)]
    kappa: f64,
    /// Where to write the Popov-plot SVG.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::PopovPlot(args) => cmd_popov_plot(args),
        Command::Certificate(args) => cmd_certificate(args),
        Command::MinGamma(args) => cmd_min_gamma(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::DemoOpa(args) => cmd_demo(args),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

type CmdResult = Result<u8, String>;

fn load_plant(path: &Path) -> Result<PlantSpec, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    qpopov::parse_plant(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_omega_max(raw: &str) -> Result<Option<f64>, String> {
    if raw == "auto" {
        return Ok(None);
    }
    raw.parse::<f64>()
        .map(Some)
        .map_err(|_| format!("--omega-max expects a number or \"auto\", got {raw}"))
}

fn build_grid(plant: &PlantSpec, common: &CommonArgs) -> Result<FrequencyGrid, String> {
    let omega_max = parse_omega_max(&common.omega_max)?;
    default_grid(plant, common.grid, omega_max).map_err(|e| e.to_string())
}

enum GammaSpec {
    Value(f64),
    Min,
}

fn parse_gamma(common: &CommonArgs, plant: &PlantSpec) -> Result<GammaSpec, String> {
    match common.gamma.as_deref() {
        None => Ok(GammaSpec::Value(plant.gamma)),
        Some("min") => Ok(GammaSpec::Min),
        Some(raw) => {
            let v: f64 = raw
                .parse()
                .map_err(|_| format!("--gamma expects a number or \"min\", got {raw}"))?;
            if v > 0.0 {
                Ok(GammaSpec::Value(v))
            } else {
                Err(format!("--gamma must be positive, got {v}"))
            }
        }
    }
}

enum ThetaSpec {
    Value(f64),
    Search,
}

fn parse_theta(common: &CommonArgs) -> Result<ThetaSpec, String> {
    match common.theta.as_str() {
        "search" => Ok(ThetaSpec::Search),
        raw => {
            let v: f64 = raw
                .parse()
                .map_err(|_| format!("--theta expects a number or \"search\", got {raw}"))?;
            if v >= 0.0 {
                Ok(ThetaSpec::Value(v))
            } else {
                Err(format!("--theta must be nonnegative, got {v}"))
            }
        }
    }
}

/// Resolves "min" gamma through the bisection, returning the gamma to run
/// the remaining analysis at (slightly above the threshold).
fn resolve_gamma(
    plant: &PlantSpec,
    spec: GammaSpec,
    theta: &ThetaSpec,
) -> Result<(f64, Option<f64>), String> {
    match spec {
        GammaSpec::Value(v) => Ok((v, None)),
        GammaSpec::Min => {
            let policy = match theta {
                ThetaSpec::Value(t) => ThetaPolicy::Fixed(*t),
                ThetaSpec::Search => ThetaPolicy::Search {
                    theta_max: DEFAULT_THETA_MAX,
                },
            };
            let res = min_gamma(plant, policy, MIN_GAMMA_TOL).map_err(|e| e.to_string())?;
            // The bisection pins gamma* on a finite grid; follow-up analyses
            // run a relative 1e-3 above it so the exact (continuum) margin
            // is safely positive.
            let run_at = if res.degenerate {
                plant.gamma
            } else {
                res.gamma_star * (1.0 + 1e-3)
            };
            Ok((run_at, Some(res.gamma_star)))
        }
    }
}

fn resolve_analysis(
    plant: &PlantSpec,
    theta: &ThetaSpec,
    gamma: f64,
    grid: &FrequencyGrid,
) -> Result<(f64, PopovAnalysis), String> {
    match theta {
        ThetaSpec::Value(t) => {
            let a = spr_margin(plant, *t, gamma, grid).map_err(|e| e.to_string())?;
            Ok((*t, a))
        }
        ThetaSpec::Search => {
            search_theta(plant, gamma, DEFAULT_THETA_MAX, grid).map_err(|e| e.to_string())
        }
    }
}

fn write_or_print(output: Option<&Path>, contents: &str) -> Result<(), String> {
    match output {
        Some(path) => {
            fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> CmdResult {
    let plant = load_plant(&args.common.input)?;
    let gamma_spec = parse_gamma(&args.common, &plant)?;
    let theta_spec = parse_theta(&args.common)?;
    let (gamma, gamma_star) = resolve_gamma(&plant, gamma_spec, &theta_spec)?;
    let grid = build_grid(&plant, &args.common)?;
    let (theta, mut analysis) = resolve_analysis(&plant, &theta_spec, gamma, &grid)?;
    // extra Hurwitz margin demanded on the nominal drift
    if args.margin > 0.0 && analysis.abscissa >= -args.margin {
        analysis.verdict = qpopov::Verdict::NotCertified;
    }

    let report = AnalysisReport::from_analysis(&analysis);
    let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    if let Some(path) = &args.common.output {
        write_or_print(Some(path), &json)?;
    }
    if matches!(args.format, Format::Json) {
        println!("{json}");
    }
    let worst = if analysis.worst_omega.is_finite() {
        format!("{:.6}", analysis.worst_omega)
    } else {
        "inf".into()
    };
    eprintln!(
        "verdict: {} (theta = {theta}, gamma = {gamma}, margin = {:.6e}, worst omega = {worst})",
        report.verdict, analysis.margin
    );
    if let Some(gs) = gamma_star {
        eprintln!("minimal certifiable gamma: {gs:.6}");
    }
    Ok(if analysis.certified() {
        EXIT_OK
    } else {
        EXIT_NOT_CERTIFIED
    })
}

fn cmd_popov_plot(args: PopovPlotArgs) -> CmdResult {
    let plant = load_plant(&args.common.input)?;
    let Some(reduction) = reduce_annihilation_only(&plant) else {
        eprintln!(
            "not applicable: the plant is not annihilation-only SISO \
             (requires M2 = 0, N2 = 0, E2 = 0 and one uncertainty channel)"
        );
        return Ok(EXIT_NOT_CERTIFIED);
    };
    let gamma_spec = parse_gamma(&args.common, &plant)?;
    let theta_spec = parse_theta(&args.common)?;
    let (gamma, _) = resolve_gamma(&plant, gamma_spec, &theta_spec)?;
    let grid = build_grid(&plant, &args.common)?;
    let theta = match theta_spec {
        ThetaSpec::Value(t) => t,
        ThetaSpec::Search => resolve_analysis(&plant, &ThetaSpec::Search, gamma, &grid)?.0,
    };
    let plot = popov_plot(&reduction, &grid, theta, gamma).map_err(|e| e.to_string())?;

    let base = args
        .common
        .output
        .clone()
        .unwrap_or_else(|| args.common.input.with_extension("svg"));
    match args.format {
        Some(Format::Csv) => write_or_print(Some(&base.with_extension("csv")), &plot.to_csv())?,
        Some(Format::Svg) => write_or_print(Some(&base.with_extension("svg")), &plot.to_svg())?,
        Some(Format::Json) => {
            return Err("popov-plot emits csv or svg".into());
        }
        None => {
            write_or_print(Some(&base.with_extension("svg")), &plot.to_svg())?;
            write_or_print(Some(&base.with_extension("csv")), &plot.to_csv())?;
        }
    }
    eprintln!(
        "popov plot: {} points, theta = {theta}, gamma = {gamma}, curve {} the allowable region",
        plot.points.len(),
        if plot.inside { "inside" } else { "outside" }
    );
    Ok(EXIT_OK)
}

fn cmd_certificate(args: CertificateArgs) -> CmdResult {
    let plant = load_plant(&args.common.input)?;
    let gamma_spec = parse_gamma(&args.common, &plant)?;
    let theta_spec = parse_theta(&args.common)?;
    let (gamma, gamma_star) = resolve_gamma(&plant, gamma_spec, &theta_spec)?;
    let grid = build_grid(&plant, &args.common)?;
    let (theta, analysis) = resolve_analysis(&plant, &theta_spec, gamma, &grid)?;
    match certify(&plant, theta, gamma) {
        Ok(cert) => {
            let report = CertificateReport::from_certificate(&cert);
            let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
            write_or_print(args.common.output.as_deref(), &json)?;
            if let Some(gs) = gamma_star {
                eprintln!("minimal certifiable gamma: {gs:.6} (running at {gamma:.6})");
            }
            eprintln!(
                "certificate: theta = {theta}, gamma = {gamma}, c1 = {:.6}, c2 = {:.6}, c3 = {:.6}",
                cert.c1, cert.c2, cert.c3
            );
            Ok(EXIT_OK)
        }
        Err(e @ Error::CertificateInfeasible(_)) => {
            eprintln!(
                "{e} (frequency margin {:.6e} at theta = {theta}, gamma = {gamma})",
                analysis.margin
            );
            Ok(EXIT_NOT_CERTIFIED)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_min_gamma(args: MinGammaArgs) -> CmdResult {
    let plant = load_plant(&args.common.input)?;
    let theta_spec = parse_theta(&args.common)?;
    let policy = match theta_spec {
        ThetaSpec::Value(t) => ThetaPolicy::Fixed(t),
        ThetaSpec::Search => ThetaPolicy::Search {
            theta_max: DEFAULT_THETA_MAX,
        },
    };
    match min_gamma(&plant, policy, MIN_GAMMA_TOL) {
        Ok(res) => {
            let report = MinGammaReport::from_result(&res);
            let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
            write_or_print(args.common.output.as_deref(), &json)?;
            eprintln!(
                "gamma_star = {:.8}{}",
                res.gamma_star,
                if res.degenerate {
                    " (degenerate: uncertainty channel inactive)"
                } else {
                    ""
                }
            );
            Ok(EXIT_OK)
        }
        Err(e @ Error::InfeasibleAtUpperBound(_)) => {
            eprintln!("{e}");
            Ok(EXIT_NOT_CERTIFIED)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_oracle(args: OracleArgs) -> CmdResult {
    let plant = load_plant(&args.common.input)?;
    let gamma_spec = parse_gamma(&args.common, &plant)?;
    let theta_spec = parse_theta(&args.common)?;
    let (gamma, _) = resolve_gamma(&plant, gamma_spec, &theta_spec)?;
    let theta = match theta_spec {
        ThetaSpec::Value(t) => t,
        ThetaSpec::Search => {
            let grid = build_grid(&plant, &args.common)?;
            resolve_analysis(&plant, &ThetaSpec::Search, gamma, &grid)?.0
        }
    };
    let report = qpopov::consistency_sweep(&plant, theta, gamma, args.samples, args.seed)
        .map_err(|e| e.to_string())?;
    let doc = OracleReportDoc::from_report(&report);
    let json = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
    write_or_print(args.common.output.as_deref(), &json)?;

    if args.trajectories {
        let stem = args
            .common
            .output
            .clone()
            .unwrap_or_else(|| args.common.input.clone());
        let n2 = 2 * plant.n;
        for (k, sample) in report.samples.iter().enumerate() {
            let traj = qpopov::covariance_trajectory(
                &plant,
                &sample.delta,
                &CMatrix::identity(n2, n2),
                20.0,
                0.01,
            )
            .map_err(|e| e.to_string())?;
            let path = stem.with_extension(format!("traj_{k}.csv"));
            fs::write(&path, trajectory_csv(&traj.times, &traj.traces))
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
        eprintln!("wrote {} trajectory CSVs", report.samples.len());
    }
    let stable = report.samples.iter().filter(|s| s.hurwitz).count();
    eprintln!(
        "oracle: verdict {}, {stable}/{} sampled loops stable, consistency: {}",
        doc.verdict,
        report.samples.len(),
        if report.consistent() {
            "consistent"
        } else {
            "counterexample found"
        }
    );
    Ok(if report.refutes_certification() {
        EXIT_COUNTEREXAMPLE
    } else {
        EXIT_OK
    })
}

fn cmd_demo(args: DemoArgs) -> CmdResult {
    let kappa = args.kappa;
    if !kappa.is_finite() || kappa <= 0.0 {
        return Err(format!("--kappa must be positive, got {kappa}"));
    }
    let plant = PlantSpec::opa(kappa);
    let gamma = plant.gamma;
    println!("optical parametric amplifier, kappa = {kappa}, gamma = {gamma}");
    println!(
        "plant document: {}",
        serde_json::to_string(&PlantDocument::from_plant(&plant)).map_err(|e| e.to_string())?
    );

    let reduction = reduce_annihilation_only(&plant).expect("built-in plant is annihilation-only");
    let a1 = reduction.a1[(0, 0)];
    println!(
        "annihilation-only reduction: A1 = {:.4}{:+.4}i (Hurwitz for every kappa > 0)",
        a1.re, a1.im
    );

    let grid = default_grid(&plant, 512, None).map_err(|e| e.to_string())?;
    let nominal = spr_margin(&plant, 0.0, gamma, &grid).map_err(|e| e.to_string())?;
    println!(
        "nominal drift abscissa: {:.4} ({})",
        nominal.abscissa,
        if nominal.hurwitz { "Hurwitz" } else { "not Hurwitz" }
    );
    println!(
        "small-gain test (theta = 0):   margin = {:+.6} -> {}",
        nominal.margin,
        verdict_word(&nominal)
    );
    let popov02 = spr_margin(&plant, 0.2, gamma, &grid).map_err(|e| e.to_string())?;
    println!(
        "Popov test (theta = 0.2):      margin = {:+.6} -> {}",
        popov02.margin,
        verdict_word(&popov02)
    );

    let mg0 =
        min_gamma(&plant, ThetaPolicy::Fixed(0.0), MIN_GAMMA_TOL).map_err(|e| e.to_string())?;
    let mg02 =
        min_gamma(&plant, ThetaPolicy::Fixed(0.2), MIN_GAMMA_TOL).map_err(|e| e.to_string())?;
    println!("minimal gamma, theta = 0:      {:.6}", mg0.gamma_star);
    println!("minimal gamma, theta = 0.2:    {:.6}", mg02.gamma_star);
    if !mg0.degenerate {
        // for this family sup |G1| = 2/kappa, so the theta = 0 test certifies
        // at the plant's own gamma exactly for kappa above this threshold
        let kappa_sg = kappa * mg0.gamma_star / gamma;
        println!(
            "small-gain certifies at gamma = {gamma} only for kappa > {kappa_sg:.4}; \
             Popov with theta = 0.2 {} kappa = {kappa}",
            if popov02.certified() {
                "already certifies"
            } else {
                "does not certify"
            }
        );
    }

    let report =
        qpopov::consistency_sweep(&plant, 0.2, gamma, 200, 0).map_err(|e| e.to_string())?;
    let stable = report.samples.iter().filter(|s| s.hurwitz).count();
    println!(
        "oracle sweep: {stable}/200 sampled perturbations stable -> {}",
        if report.consistent() {
            "consistent"
        } else {
            "counterexample found"
        }
    );
    if report.refutes_certification() {
        println!("!! certified verdict refuted by a sampled perturbation");
        return Ok(EXIT_COUNTEREXAMPLE);
    }

    let plot = popov_plot(&reduction, &grid, 0.2, gamma).map_err(|e| e.to_string())?;
    let path = args.output.unwrap_or_else(|| PathBuf::from("opa_popov.svg"));
    fs::write(&path, plot.to_svg())
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    println!(
        "wrote {} ({} points, curve {} the allowable region)",
        path.display(),
        plot.points.len(),
        if plot.inside { "inside" } else { "outside" }
    );

    if popov02.certified() {
        match certify(&plant, 0.2, gamma) {
            Ok(cert) => {
                println!(
                    "certificate: c1 = {:.4}, c2 = {:.4}, c3 = {:.4}, P1 = {:?}",
                    cert.c1,
                    cert.c2,
                    cert.c3,
                    matrix_to_rows(&cert.p.block1())
                );
            }
            Err(e) => println!("certificate synthesis: {e}"),
        }
    }
    Ok(EXIT_OK)
}

fn verdict_word(a: &PopovAnalysis) -> &'static str {
    if a.certified() {
        "certified-stable"
    } else {
        "not-certified"
    }
}
