use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use writhe_core::conformal::{invert_curve, osculating_circle, Circle3, Inversion};
use writhe_core::curve::{load_curve, make_preset, max_offset, CurveSpec};
use writhe_core::frenet::frenet_scan;
use writhe_core::indicatrix::{tangent_indicatrix, Sign};
use writhe_core::invariants::{calugareanu_report, self_linking, total_torsion, twist, writhe};
use writhe_core::verify::{verify, Centers, Theorem, VerifyOptions};
use writhe_core::{ClosedCurve, Error, Framing, QuadratureConfig, Rule, Vec3};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "writhe", version, about = "Writhe, twist and linking invariants of closed space curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Writhe, total torsion, principal twist, self-linking and the
    /// Lk = Wr + Tw closure of one curve.
    Invariants {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        quad: QuadArgs,
        /// Push-off distance for the ribbon; defaults to a tenth of the
        /// largest admissible offset.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
    },
    /// Runs a residual suite and reports pass/fail per residual.
    Verify {
        /// writhe_inversion, twist_mod_z, integrality, prop4, lemma1 or
        /// binormal_relation.
        theorem: String,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        inversion: InversionArgs,
        /// Pick admissible centers automatically (the default when no
        /// --center is given).
        #[arg(long)]
        auto_center: bool,
        /// Number of centers to pick automatically.
        #[arg(long)]
        centers: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance for integrated identities.
        #[arg(long, default_value_t = 1e-3)]
        residual_tol: f64,
        /// Tolerance for pointwise identities.
        #[arg(long, default_value_t = 1e-4)]
        pointwise_tol: f64,
        /// Samples for pointwise identities.
        #[arg(long, default_value_t = 2048)]
        samples: usize,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Writes plot data as CSV.
    Export {
        #[arg(value_enum)]
        what: ExportKind,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        inversion: InversionArgs,
        /// Number of samples.
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
        /// Points per osculating circle for tube-samples.
        #[arg(long, default_value_t = 16)]
        circle_points: usize,
        /// Write `<what>.csv` into this directory instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CurveArgs {
    /// Named analytic curve.
    #[arg(long, conflicts_with = "curve")]
    preset: Option<String>,
    /// JSON curve description.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Preset parameters as k=v,k=v.
    #[arg(long, requires = "preset")]
    params: Option<String>,
}

#[derive(Args)]
struct QuadArgs {
    #[arg(long, default_value_t = 512)]
    n: usize,
    /// Tolerance on the nested-grid error estimate.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 2)]
    refinement: usize,
    #[arg(long, value_enum, default_value_t = RuleArg::Trapezoid)]
    rule: RuleArg,
}

#[derive(Args)]
struct InversionArgs {
    /// Inversion center x,y,z; repeat for several centers.
    #[arg(long, allow_hyphen_values = true)]
    center: Vec<String>,
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Trapezoid,
    Simpson,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    Curve,
    Indicatrix,
    TubeSamples,
    InvertedCurve,
    Profile,
}

impl ExportKind {
    fn file_name(self) -> &'static str {
        match self {
            ExportKind::Curve => "curve.csv",
            ExportKind::Indicatrix => "indicatrix.csv",
            ExportKind::TubeSamples => "tube_samples.csv",
            ExportKind::InvertedCurve => "inverted_curve.csv",
            ExportKind::Profile => "profile.csv",
        }
    }
}

/// Failure with its exit code and an optional report to print anyway.
struct Failure {
    code: u8,
    message: String,
    report: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERICAL },
            message: e.to_string(),
            report: None,
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
        report: None,
    }
}

fn parse_params(text: &str) -> Result<BTreeMap<String, f64>, Failure> {
    text.split(',')
        .filter(|kv| !kv.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| input_error(format!("expected k=v, got `{kv}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| input_error(format!("parameter {k}: `{v}` is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn parse_point(text: &str) -> Result<Vec3, Failure> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| input_error(format!("expected x,y,z, got `{text}`")))?;
    match parts.as_slice() {
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(input_error(format!("expected x,y,z, got `{text}`"))),
    }
}

fn load(args: &CurveArgs) -> Result<ClosedCurve, Failure> {
    match (&args.preset, &args.curve) {
        (Some(name), None) => {
            let params = match &args.params {
                Some(p) => parse_params(p)?,
                None => BTreeMap::new(),
            };
            Ok(make_preset(name, &params)?)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::from(Error::ParseError(format!("{}: {e}", path.display()))))?;
            Ok(load_curve(&CurveSpec::from_json(&text)?)?)
        }
        _ => Err(input_error("exactly one of --preset or --curve is required")),
    }
}

fn config(q: &QuadArgs) -> Result<QuadratureConfig, Failure> {
    let c = QuadratureConfig {
        n: q.n,
        refinement: q.refinement,
        tol: q.tol,
        rule: match q.rule {
            RuleArg::Trapezoid => Rule::Trapezoid,
            RuleArg::Simpson => Rule::Simpson,
        },
    };
    c.validate()?;
    Ok(c)
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn cmd_invariants(curve: &CurveArgs, quad: &QuadArgs, epsilon: Option<f64>, output: Output) -> Result<String, Failure> {
    let c = load(curve)?;
    let q = config(quad)?;
    let epsilon = epsilon.unwrap_or_else(|| 0.1 * max_offset(&c).limit());
    let wr = writhe(&c, &q)?;
    let tw_omega = total_torsion(&c, &q)?;
    let principal = Framing::principal(&c);
    let tw = twist(&c, &principal, &q)?;
    let sl = self_linking(&c, epsilon, &q)?;
    let closure = calugareanu_report(&c, &principal, epsilon, &q)?;
    Ok(match output {
        Output::Json => to_json(&json!({
            "schema": "1",
            "curve": c.to_spec(q.n),
            "config": q,
            "epsilon": epsilon,
            "writhe": wr,
            "total_torsion": tw_omega,
            "twist": tw,
            "self_linking": sl,
            "calugareanu": closure,
        })),
        Output::Csv => {
            let mut out = String::from("quantity,value,estimated_error\n");
            for r in [&wr, &tw_omega, &tw] {
                writeln!(out, "{},{},{}", r.invariant, r.value, r.estimated_error).unwrap();
            }
            writeln!(out, "self_linking,{},{}", sl.lk, sl.estimated_error).unwrap();
            writeln!(out, "calugareanu_residual,{},0", closure.residual).unwrap();
            out
        }
    })
}

struct VerifyArgs<'a> {
    theorem: &'a str,
    curve: &'a CurveArgs,
    quad: &'a QuadArgs,
    inversion: &'a InversionArgs,
    auto_center: bool,
    centers: Option<usize>,
    seed: u64,
    residual_tol: f64,
    pointwise_tol: f64,
    samples: usize,
    timing: bool,
}

fn cmd_verify(a: VerifyArgs) -> Result<String, Failure> {
    let start = Instant::now();
    let theorem: Theorem = a.theorem.parse()?;
    let c = load(a.curve)?;
    let given = a.inversion.center.iter().map(|s| parse_point(s)).collect::<Result<Vec<_>, _>>()?;
    if a.auto_center && !given.is_empty() {
        return Err(input_error("--auto-center conflicts with --center"));
    }
    let mut opts = VerifyOptions::for_theorem(theorem);
    opts.config = config(a.quad)?;
    opts.radius = a.inversion.radius;
    opts.seed = a.seed;
    opts.tol = a.residual_tol;
    opts.pointwise_tol = a.pointwise_tol;
    opts.samples = a.samples;
    opts.centers = if given.is_empty() {
        Centers::Auto(a.centers.unwrap_or(theorem.default_centers()))
    } else {
        Centers::Given(given)
    };
    let mut report = verify(theorem, &c, &opts)?;
    if a.timing {
        report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    }
    let text = to_json(&report);
    if report.pass {
        Ok(text)
    } else {
        let failed: Vec<&str> = report.residuals.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
        Err(Failure {
            code: EXIT_NUMERICAL,
            message: format!("{theorem} failed: {}", failed.join(", ")),
            report: Some(serde_json::to_value(&report).expect("reports serialize")),
        })
    }
}

fn xyz_rows(header: &str, rows: impl IntoIterator<Item = (f64, Vec3)>) -> String {
    let mut out = format!("{header}\n");
    for (u, p) in rows {
        writeln!(out, "{},{},{},{}", u, p.x, p.y, p.z).unwrap();
    }
    out
}

fn cmd_export(
    what: ExportKind,
    curve: &CurveArgs,
    inversion: &InversionArgs,
    n: usize,
    sign: &str,
    circle_points: usize,
) -> Result<String, Failure> {
    let c = load(curve)?;
    if n < 3 {
        return Err(input_error(format!("--n must be at least 3, got {n}")));
    }
    Ok(match what {
        ExportKind::Curve => xyz_rows("u,x,y,z", c.grid(n).into_iter().map(|u| (u, c.position(u)))),
        ExportKind::Indicatrix => tangent_indicatrix(&c, sign.parse::<Sign>()?, n)?.to_csv(),
        ExportKind::Profile => frenet_scan(&c, n)?.to_csv(),
        ExportKind::InvertedCurve => {
            let center = match inversion.center.as_slice() {
                [one] => parse_point(one)?,
                _ => return Err(input_error("inverted-curve needs exactly one --center")),
            };
            let radius = inversion.radius.ok_or_else(|| input_error("inverted-curve needs --radius"))?;
            let img = invert_curve(&Inversion::new(center, radius)?, &c)?;
            xyz_rows("u,x,y,z", c.grid(n).into_iter().map(|u| (u, img.position(u))))
        }
        ExportKind::TubeSamples => {
            let mut out = String::from("u,theta,x,y,z\n");
            for u in c.grid(n) {
                if let Circle3::Circle { center, radius, axis } = osculating_circle(&c, u)? {
                    let e2 = (c.position(u) - center) / radius;
                    let e1 = axis.cross(&e2);
                    for k in 0..circle_points {
                        let th = std::f64::consts::TAU * k as f64 / circle_points as f64;
                        let p = center + (e2 * th.cos() + e1 * th.sin()) * radius;
                        writeln!(out, "{},{},{},{},{}", u, th, p.x, p.y, p.z).unwrap();
                    }
                }
            }
            out
        }
    })
}

fn run(cli: Cli) -> Result<(String, Option<PathBuf>), Failure> {
    match &cli.command {
        Command::Invariants {
            curve,
            quad,
            epsilon,
            output,
        } => Ok((cmd_invariants(curve, quad, *epsilon, *output)?, None)),
        Command::Verify {
            theorem,
            curve,
            quad,
            inversion,
            auto_center,
            centers,
            seed,
            residual_tol,
            pointwise_tol,
            samples,
            timing,
        } => Ok((
            cmd_verify(VerifyArgs {
                theorem,
                curve,
                quad,
                inversion,
                auto_center: *auto_center,
                centers: *centers,
                seed: *seed,
                residual_tol: *residual_tol,
                pointwise_tol: *pointwise_tol,
                samples: *samples,
                timing: *timing,
            })?,
            None,
        )),
        Command::Export {
            what,
            curve,
            inversion,
            n,
            sign,
            circle_points,
            out_dir,
        } => {
            let text = cmd_export(*what, curve, inversion, *n, sign, *circle_points)?;
            Ok((text, out_dir.as_ref().map(|d| d.join(what.file_name()))))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((text, None)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok((text, Some(path))) => {
            if let Some(dir) = path.parent() {
                if let Err(e) = std::fs::create_dir_all(dir) {
                    eprintln!("error: {}: {e}", dir.display());
                    return ExitCode::from(EXIT_INPUT);
                }
            }
            match std::fs::write(&path, text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    ExitCode::from(EXIT_INPUT)
                }
            }
        }
        Err(f) => {
            match f.report {
                Some(report) => print!("{}", to_json(&report)),
                None if f.code == EXIT_NUMERICAL => print!("{}", to_json(&json!({"schema": "1", "error": f.message}))),
                None => {}
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
