//! Command-line front end: certification, bound evaluation, threshold
//! queries, moduli-space sweeps, metric generation, immersion energies, and
//! the validation suite.
//!
//! Output discipline: machine-readable results (JSON documents, CSV tables,
//! bare threshold values) go to stdout; human-oriented summaries go to
//! stderr, so piping stdout into other tools always yields clean data. Exit
//! codes are a stable contract:
//!
//! * `0`: success; for `certify` and `willmore` this means the certificate
//!   fired / every lower bound held;
//! * `2`: the computation succeeded but certification (or the bound check)
//!   did not go through;
//! * `1`: anything else, from flag errors to unreadable inputs.
//!
//! Sweep commands parallelize over grid points with rayon; set
//! `RAYON_NUM_THREADS` to control the pool size. Rows are computed in
//! parallel but sorted before writing, so every output is byte-identical
//! for identical flags and seeds regardless of scheduling.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::fields::ScalarField;
use crate::geometry::ConformalTorusMetric;
use crate::immersions::ImmersedTorus;
use crate::moduli::{self, ModuliPoint};
use crate::validate::{self, Scale};
use crate::{bounds, generators, geometry, immersions, Error};

/// Top-level argument grammar.
#[derive(Debug, Parser)]
#[command(
    name = "willmore",
    version,
    about = "Curvature-based certification of the Willmore conjecture on 2-tori",
    long_about = "Certifies W(F) >= 2 pi^2 for immersed 2-tori from measured \
                  conformal data: oscillation and curvature thresholds, moduli \
                  region tests, metric generators, and a validation suite.\n\n\
                  Machine-readable output goes to stdout, summaries to stderr. \
                  Set RAYON_NUM_THREADS to bound the worker pool.",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Certify a conformal metric from a field file (exit 0 certified, 2
    /// uncertified, 1 error).
    Certify(CertifyArgs),
    /// Print every applicable Willmore lower bound for a field file.
    Bound(BoundArgs),
    /// Print the curvature threshold tau(y, p) for the theorem-I rule.
    Tau(TauArgs),
    /// Print the curvature threshold sigma(V, p) for the theorem-II rule.
    Sigma(SigmaArgs),
    /// Sweep the moduli fundamental domain into a CSV of x,y,region,tau.
    ModuliMap(ModuliMapArgs),
    /// Generate a cone, cylinder, or random trigonometric metric.
    Generate(GenerateArgs),
    /// Willmore energy and lower-bound audit of an immersion file.
    Willmore(WillmoreArgs),
    /// Run the validation suite (exit 0 iff everything passes).
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct CertifyArgs {
    /// Field file (JSON: {"lattice": {...}, "grid": [n1, n2], "u": [...]}).
    field: PathBuf,
    /// Curvature integrability exponent.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// Field file to evaluate.
    field: PathBuf,
    /// Curvature integrability exponent.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Debug, Args)]
struct TauArgs {
    /// Conformal class parameter (second lattice generator height).
    #[arg(long)]
    y: f64,
    /// Curvature integrability exponent.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Debug, Args)]
struct SigmaArgs {
    /// Systole ratio V = sys(g)^2 / area(g).
    #[arg(long = "V", visible_alias = "v")]
    v: f64,
    /// Curvature integrability exponent.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Debug, Args)]
struct ModuliMapArgs {
    /// x sweep as START:STOP:COUNT (or a single value).
    #[arg(long, default_value = "0:0.5:26")]
    xs: String,
    /// y sweep as START:STOP:COUNT (or a single value).
    #[arg(long, default_value = "0.8:3:45")]
    ys: String,
    /// Curvature integrability exponent (tau column).
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Cone,
    Cylinder,
    Random,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Which generator to run.
    #[arg(long, value_enum)]
    family: Family,
    /// Where to write the field file.
    #[arg(long)]
    out: PathBuf,
    /// Grid resolution per axis.
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Lattice x (first coordinate of the second generator).
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    /// Lattice y (second coordinate of the second generator).
    #[arg(long, default_value_t = 1.0)]
    y: f64,
    /// Lattice scale (length of the first generator).
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Cone opening angle in radians (0 gives a cylinder wall).
    #[arg(long, default_value_t = PI / 6.0)]
    beta: f64,
    /// Support radius of the cone or cylinder profile.
    #[arg(long = "R", visible_alias = "r-outer", default_value_t = 0.1)]
    r_outer: f64,
    /// Steepness: R/rho for cones, H/R for cylinders.
    #[arg(long, default_value_t = std::f64::consts::E)]
    ratio: f64,
    /// Mollifier width (defaults to R/8).
    #[arg(long)]
    smoothing: Option<f64>,
    /// Fourier mode count for the random family.
    #[arg(long, default_value_t = 3)]
    modes: usize,
    /// Oscillation of the random field (max u - min u).
    #[arg(long, default_value_t = 0.2)]
    amplitude: f64,
    /// RNG seed for the random family.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Curvature integrability exponent for the printed report.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Debug, Args)]
struct WillmoreArgs {
    /// Immersion file (JSON: {"kind": "revolution", ...} or
    /// {"kind": "conformal_grid", ...}).
    immersion: PathBuf,
    /// Curvature integrability exponent.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Reduced grids and corpus sizes (the default).
    #[arg(long, conflicts_with = "full")]
    quick: bool,
    /// The acceptance-scale suite.
    #[arg(long)]
    full: bool,
    /// Run a single criterion (1..=9) instead of the whole suite.
    #[arg(long)]
    criterion: Option<usize>,
}

/// Parses `std::env::args` and runs the selected command, returning the
/// process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version surface as parse "errors"; they are the
            // only ones that exit 0.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Certify(a) => cmd_certify(&a),
        Cmd::Bound(a) => cmd_bound(&a),
        Cmd::Tau(a) => cmd_tau(&a),
        Cmd::Sigma(a) => cmd_sigma(&a),
        Cmd::ModuliMap(a) => cmd_moduli_map(&a),
        Cmd::Generate(a) => cmd_generate(&a),
        Cmd::Willmore(a) => cmd_willmore(&a),
        Cmd::Validate(a) => cmd_validate(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

/// Command bodies return the exit code on success and a printable message
/// for the generic error path (exit 1).
type CmdResult = Result<i32, String>;

fn require_p(p: f64) -> Result<(), String> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidP(p).to_string())
    }
}

fn read_metric(path: &Path) -> Result<ConformalTorusMetric, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let field: ScalarField = serde_json::from_str(&text)
        .map_err(|e| format!("{} is not a valid field file: {e}", path.display()))?;
    Ok(ConformalTorusMetric::new(field))
}

fn print_json(value: &serde_json::Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    println!("{text}");
    Ok(())
}

fn cmd_certify(args: &CertifyArgs) -> CmdResult {
    require_p(args.p)?;
    let metric = read_metric(&args.field)?;
    let report = geometry::report(&metric, args.p).map_err(|e| e.to_string())?;
    let cert = bounds::certify_report(&report).map_err(|e| e.to_string())?;
    print_json(&json!({ "report": report, "certificate": cert }))?;
    eprintln!(
        "x = {:.6}, y = {:.6}, V(g) = {:.6}, K_p = {:.6}, osc u = {:.6}",
        report.x, report.y, report.v_g, report.kp, report.osc_u
    );
    if cert.is_certified() {
        eprintln!(
            "certified by rule {} (W >= {:.9})",
            cert.rule, cert.lower_bound
        );
        Ok(0)
    } else {
        eprintln!(
            "uncertified: no rule fired; best established lower bound W >= {:.9}",
            cert.lower_bound
        );
        Ok(2)
    }
}

fn cmd_bound(args: &BoundArgs) -> CmdResult {
    require_p(args.p)?;
    let metric = read_metric(&args.field)?;
    let report = geometry::report(&metric, args.p).map_err(|e| e.to_string())?;
    let mut bounds_list = bounds::lower_bounds_from_report(&report);
    // Best first; rule names break exact ties so the order is total.
    bounds_list.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.to_string().cmp(&b.0.to_string()))
    });
    let best = bounds_list
        .first()
        .map(|(rule, value)| json!({ "rule": rule, "value": value }));
    let rows: Vec<serde_json::Value> = bounds_list
        .iter()
        .map(|(rule, value)| json!({ "rule": rule, "value": value }))
        .collect();
    print_json(&json!({ "report": report, "bounds": rows, "best": best }))?;
    for (rule, value) in &bounds_list {
        eprintln!("W >= {value:<22.12} [{rule}]");
    }
    Ok(0)
}

fn cmd_tau(args: &TauArgs) -> CmdResult {
    require_p(args.p)?;
    // Out-of-domain classes are errors, not answers: stdout carries only a
    // parseable threshold, and the guidance ("use region rules ...") belongs
    // on stderr with exit 1 like every other domain violation.
    let t = bounds::tau(args.y, args.p).map_err(|e| e.to_string())?;
    println!("{t}");
    Ok(0)
}

fn cmd_sigma(args: &SigmaArgs) -> CmdResult {
    require_p(args.p)?;
    let s = bounds::sigma(args.v, args.p).map_err(|e| e.to_string())?;
    println!("{s}");
    Ok(0)
}

/// Parses `START:STOP:COUNT` (inclusive endpoints) or a bare value.
fn parse_linspace(spec: &str, flag: &str) -> Result<Vec<f64>, String> {
    let bad = |hint: &str| format!("--{flag} {spec:?}: {hint} (expected START:STOP:COUNT)");
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, stop, count] => {
            let (a, b) = (num(start)?, num(stop)?);
            let k: usize = count
                .trim()
                .parse()
                .map_err(|_| bad("count must be a positive integer"))?;
            if k == 0 {
                return Err(bad("count must be a positive integer"));
            }
            if k == 1 {
                return Ok(vec![a]);
            }
            Ok((0..k)
                .map(|i| a + (b - a) * (i as f64) / ((k - 1) as f64))
                .collect())
        }
        _ => Err(bad("wrong number of ':' separators")),
    }
}

fn cmd_moduli_map(args: &ModuliMapArgs) -> CmdResult {
    require_p(args.p)?;
    let xs = parse_linspace(&args.xs, "xs")?;
    let ys = parse_linspace(&args.ys, "ys")?;
    let p = args.p;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for &x in &xs {
        for &y in &ys {
            // Points outside the fundamental domain are not conformal
            // classes; the sweep silently restricts to it.
            if moduli::ModuliPoint::new(x, y, 1.0).is_ok() {
                points.push((x, y));
            }
        }
    }
    let mut rows: Vec<(f64, f64, String)> = points
        .par_iter()
        .map(|&(x, y)| {
            let m = ModuliPoint::new(x, y, 1.0).expect("filtered above");
            let region = moduli::classify_region(&m);
            // tau exists above the Li-Yau line; the region rule makes the
            // threshold moot below it, so the cell stays empty there.
            let tau = match bounds::tau(y, p) {
                Ok(t) => t.to_string(),
                Err(_) => String::new(),
            };
            (x, y, format!("{x},{y},{region},{tau}"))
        })
        .collect();
    rows.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut csv = String::from("x,y,region,tau\n");
    for (_, _, line) in &rows {
        csv.push_str(line);
        csv.push('\n');
    }
    match &args.out {
        Some(path) => {
            fs::write(path, csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_generate(args: &GenerateArgs) -> CmdResult {
    require_p(args.p)?;
    let lattice =
        ModuliPoint::new(args.x, args.y, args.scale).map_err(|e| e.to_string())?;
    let metric = match args.family {
        Family::Cone | Family::Cylinder => {
            let beta = if args.family == Family::Cylinder { 0.0 } else { args.beta };
            let smoothing = args.smoothing.unwrap_or(args.r_outer / 8.0);
            let spec = generators::ConeSpec::from_ratio(
                lattice,
                args.n,
                args.n,
                args.r_outer,
                args.ratio,
                beta,
                smoothing,
            )
            .map_err(|e| e.to_string())?;
            generators::generate_cone(&spec).map_err(|e| e.to_string())?
        }
        Family::Random => generators::random_trig_metric(
            lattice,
            args.n,
            args.n,
            args.modes,
            args.amplitude,
            args.seed,
        ),
    };
    let text = serde_json::to_string_pretty(metric.u()).map_err(|e| e.to_string())?;
    fs::write(&args.out, text + "\n")
        .map_err(|e| format!("cannot write {}: {e}", args.out.display()))?;
    let report = geometry::report(&metric, args.p).map_err(|e| e.to_string())?;
    print_json(&serde_json::to_value(&report).map_err(|e| e.to_string())?)?;
    eprintln!(
        "wrote {} ({}x{} samples); K_1 = {:.6}, K_p = {:.6}, osc u = {:.6}",
        args.out.display(),
        args.n,
        args.n,
        report.k1,
        report.kp,
        report.osc_u
    );
    Ok(0)
}

fn cmd_willmore(args: &WillmoreArgs) -> CmdResult {
    require_p(args.p)?;
    let text = fs::read_to_string(&args.immersion)
        .map_err(|e| format!("cannot read {}: {e}", args.immersion.display()))?;
    let torus: ImmersedTorus = serde_json::from_str(&text)
        .map_err(|e| format!("{} is not a valid immersion file: {e}", args.immersion.display()))?;
    // The defect is measured for sampled immersions; a surface of revolution
    // is conformal by construction, so the slot stays null there.
    let defect = match &torus {
        ImmersedTorus::ConformalGrid { .. } => {
            Some(immersions::conformality_defect(&torus).map_err(|e| e.to_string())?)
        }
        ImmersedTorus::Revolution { .. } => None,
    };
    let check = immersions::verify_lower_bounds(&torus, args.p).map_err(|e| e.to_string())?;
    let mut value = serde_json::to_value(&check).map_err(|e| e.to_string())?;
    if let serde_json::Value::Object(map) = &mut value {
        map.insert("conformality_defect".into(), json!(defect));
    }
    print_json(&value)?;
    eprintln!(
        "W(F) = {:.9}; certificate rule {}; min slack over bounds {:.3e}",
        check.energy, check.certificate.rule, check.min_slack
    );
    if check.all_bounds_hold {
        Ok(0)
    } else {
        eprintln!("a lower bound exceeds the measured energy");
        Ok(2)
    }
}

fn cmd_validate(args: &ValidateArgs) -> CmdResult {
    let scale = if args.full { Scale::Full } else { Scale::Quick };
    if let Some(id) = args.criterion {
        if !(1..=validate::CRITERIA).contains(&id) {
            return Err(format!("--criterion must lie in 1..={}", validate::CRITERIA));
        }
        let result = validate::run_criterion(id, scale);
        let passed = result.passed;
        eprintln!(
            "[{}] {:2}. {} ({:.2}s): {}",
            if passed { "pass" } else { "FAIL" },
            result.id,
            result.name,
            result.seconds,
            result.detail
        );
        print_json(&serde_json::to_value(&result).map_err(|e| e.to_string())?)?;
        return Ok(if passed { 0 } else { 1 });
    }
    let summary = validate::run(scale);
    for r in &summary.results {
        eprintln!(
            "[{}] {:2}. {} ({:.2}s): {}",
            if r.passed { "pass" } else { "FAIL" },
            r.id,
            r.name,
            r.seconds,
            r.detail
        );
    }
    let failed: Vec<&str> = summary
        .results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.as_str())
        .collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {}", failed.join(", "));
    }
    print_json(&serde_json::to_value(&summary).map_err(|e| e.to_string())?)?;
    Ok(if summary.all_passed { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_parses_single_values_ranges_and_rejects_garbage() {
        assert_eq!(parse_linspace("0.3", "xs").unwrap(), vec![0.3]);
        let r = parse_linspace("0:1:5", "xs").unwrap();
        assert_eq!(r, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_linspace("2:3:1", "ys").unwrap(), vec![2.0]);
        assert!(parse_linspace("a:b:3", "xs").is_err());
        assert!(parse_linspace("0:1:0", "xs").is_err());
        assert!(parse_linspace("0:1", "xs").is_err());
    }

    #[test]
    fn help_mentions_every_subcommand() {
        use clap::CommandFactory;
        let mut help = Vec::new();
        Cli::command().write_long_help(&mut help).unwrap();
        let help = String::from_utf8(help).unwrap();
        for name in [
            "certify",
            "bound",
            "tau",
            "sigma",
            "moduli-map",
            "generate",
            "willmore",
            "validate",
        ] {
            assert!(help.contains(name), "help is missing {name}");
        }
    }

    #[test]
    fn argument_grammar_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
