//! Command-line front end.
//!
//! JSON goes to stdout with sorted keys, CSV floats carry 17 significant
//! digits, diagnostics go to stderr. Exit codes: 0 success, 1 malformed
//! input or parameters, 2 guard or obstruction refusal, 3 numerical
//! failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::homology::{
    generator_counts, half_handle_relative_homology, relative_euler_characteristic, surgery_effect_descriptor,
    HalfHandleSpec, RelativePair, Side,
};
use crate::level::Level;
use crate::local::{
    self, find_critical_points, flow, homotopy_scan, scan_u21, transition_estimate, Domain, FlowField, LocalError,
    ModelD, ModelG, ModelParams, PointClass,
};
use crate::model::{validate, MorseDatum, PointId};
use crate::moves::random::random_datum;
use crate::moves::{
    cancel_pair, global_rearrange, normal_form, split_interior, FlagAuthority, MoveError, OracleCertificate,
    SplitAuthority, SplitCertificate,
};
use crate::oracle::{
    certify_all, certify_split, detect_closed_levels, reorder, CobordismBuild, OracleAuthority, OracleError,
    SplitVerdict,
};
use crate::table::render_table;
use crate::trace::MoveTrace;

#[derive(Parser, Debug)]
#[command(
    name = "halfhandle",
    version,
    about = "Morse calculus for cobordisms of manifolds with boundary"
)]
pub struct Cli {
    /// Seed for randomized commands.
    #[arg(long, global = true, env = "HF_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a Morse datum document.
    Check { file: PathBuf },
    /// Bring a datum to the split normal form.
    Normalize {
        file: PathBuf,
        /// Surface build certifying the splits instead of the flags.
        #[arg(long)]
        build: Option<PathBuf>,
    },
    /// Split one interior point to the boundary.
    Split {
        file: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long)]
        build: Option<PathBuf>,
    },
    /// Cancel a pair of critical points.
    Cancel {
        file: PathBuf,
        #[arg(long, num_args = 2, value_names = ["LOWER", "UPPER"])]
        pair: Vec<String>,
    },
    /// Move every point to its canonical level.
    Rearrange { file: PathBuf },
    /// Relative homology bookkeeping of a datum or a single half-handle.
    Homology {
        file: Option<PathBuf>,
        #[arg(long, value_enum, requires = "index")]
        side: Option<SideArg>,
        #[arg(long)]
        index: Option<u32>,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Print the trajectory admissibility table.
    Table {
        #[arg(long)]
        n: Option<u32>,
    },
    /// Numerical local models.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
    /// Exact surface oracle for n = 1.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Emit a random valid datum.
    Sample {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 8)]
        max_points: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FieldArg {
    #[value(name = "D")]
    D,
    #[value(name = "B")]
    B,
    #[value(name = "G")]
    G,
}

#[derive(Subcommand, Debug)]
pub enum ModelCommand {
    /// Critical points of D for a given a (or a = -delta).
    Critical {
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "delta",
            required_unless_present = "delta"
        )]
        a: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        grid_step: f64,
    },
    /// Critical inventory of the deformation family over a range of t.
    Homotopy {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        tmin: f64,
        #[arg(long, default_value_t = 1.0)]
        tmax: f64,
        #[arg(long, default_value_t = 0.001)]
        tstep: f64,
    },
    /// Minimum gradient norm of G over the transition region.
    #[command(name = "scan-u21")]
    ScanU21 {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        /// Outer scale; defaults to 10 eps.
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long, default_value_t = 0.001)]
        step: f64,
    },
    /// Integrate an ascending flow line; CSV t,x,y,F[,A].
    Flow {
        #[arg(long, value_enum)]
        field: FieldArg,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long = "T", default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.001)]
        dt: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.004)]
        delta: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Flow-line bundles of D; CSV a,traj,t,x,y,F.
    Phase {
        /// Values of a; defaults to 1, 0 and -1.
        #[arg(long, allow_hyphen_values = true)]
        a: Vec<f64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Replay a build and report every level set.
    Replay { file: PathBuf },
    /// Certify the splits of the interior 1-handles at a level.
    Certify {
        file: PathBuf,
        #[arg(long)]
        level: String,
        /// A mark on the target component.
        #[arg(long)]
        component: Option<String>,
    },
    /// Euler characteristic of the surface.
    Chi { file: PathBuf },
    /// Reorder the interior 1-handles so that every split is certified.
    Reorder { file: PathBuf },
    /// The symbolic datum of a build.
    Datum { file: PathBuf },
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
    /// The report already on stdout stands in for the error document.
    pub reported: bool,
}

impl CliError {
    fn input(kind: &str, message: impl ToString) -> Self {
        CliError {
            code: 1,
            kind: kind.to_string(),
            message: message.to_string(),
            reported: false,
        }
    }

    fn reported(kind: &str, message: impl ToString) -> Self {
        CliError {
            code: 2,
            kind: kind.to_string(),
            message: message.to_string(),
            reported: true,
        }
    }
}

fn variant_name(debug: &str) -> String {
    debug
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("Error")
        .to_string()
}

impl From<MoveError> for CliError {
    fn from(e: MoveError) -> Self {
        let name = variant_name(&format!("{e:?}"));
        CliError {
            code: 2,
            kind: if name.ends_with("Error") {
                name
            } else {
                format!("{name}Error")
            },
            message: e.to_string(),
            reported: false,
        }
    }
}

impl From<LocalError> for CliError {
    fn from(e: LocalError) -> Self {
        let code = match e {
            LocalError::InvalidParams(_) | LocalError::RegionEmpty => 1,
            _ => 3,
        };
        CliError {
            code,
            kind: format!("{}Error", variant_name(&format!("{e:?}"))),
            message: e.to_string(),
            reported: false,
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        let code = if matches!(e, OracleError::Stuck(_)) { 2 } else { 1 };
        CliError {
            code,
            kind: format!("{}Error", variant_name(&format!("{e:?}"))),
            message: e.to_string(),
            reported: false,
        }
    }
}

type CliResult = Result<(), CliError>;

/// Serializes with sorted object keys.
pub fn to_sorted_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("serializable");
    serde_json::to_string_pretty(&value).expect("value serializes")
}

fn emit<T: Serialize>(out: &mut dyn Write, v: &T) {
    let _ = writeln!(out, "{}", to_sorted_json(v));
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input("IoError", format!("{}: {e}", path.display())))
}

fn load_datum(path: &Path) -> Result<MorseDatum, CliError> {
    MorseDatum::from_json(&read(path)?).map_err(|e| CliError::input("ParseError", e))
}

fn load_build(path: &Path) -> Result<CobordismBuild, CliError> {
    Ok(CobordismBuild::from_json(&read(path)?)?)
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn datum_with_trace(datum: &MorseDatum, trace: &MoveTrace) -> Value {
    json!({
        "datum": datum.to_document(),
        "digest": datum.digest(),
        "trace": trace,
    })
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            if !e.reported {
                emit(out, &json!({ "error": e.kind, "message": e.message }));
            }
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Check { file } => {
            let d = load_datum(file)?;
            let violations = validate(&d);
            emit(out, &json!({ "violations": violations }));
            if violations.is_empty() {
                Ok(())
            } else {
                Err(CliError::reported(
                    "ValidationError",
                    format!("{} violation(s)", violations.len()),
                ))
            }
        }
        Command::Normalize { file, build } => {
            let d = load_datum(file)?;
            let authority: Box<dyn SplitAuthority> = match build {
                Some(b) => Box::new(OracleAuthority::new(load_build(b)?)),
                None => Box::new(FlagAuthority),
            };
            let nf = normal_form(&d, authority.as_ref())?;
            emit(
                out,
                &json!({
                    "decomposition": nf.decomposition,
                    "datum": nf.datum.to_document(),
                    "digest": nf.datum.digest(),
                    "trace": nf.trace,
                }),
            );
            Ok(())
        }
        Command::Split { file, point, build } => {
            let d = load_datum(file)?;
            let z = PointId::new(point.as_str());
            let cert = match build {
                None => SplitCertificate::FlagBased,
                Some(b) => oracle_certificate(&load_build(b)?, &z)?,
            };
            let mut trace = MoveTrace::new();
            let after = split_interior(&d, &z, &cert, &mut trace)?;
            emit(out, &datum_with_trace(&after, &trace));
            Ok(())
        }
        Command::Cancel { file, pair } => {
            let d = load_datum(file)?;
            let mut trace = MoveTrace::new();
            let after = cancel_pair(
                &d,
                &PointId::new(pair[0].as_str()),
                &PointId::new(pair[1].as_str()),
                &mut trace,
            )?;
            emit(out, &datum_with_trace(&after, &trace));
            Ok(())
        }
        Command::Rearrange { file } => {
            let d = load_datum(file)?;
            let mut trace = MoveTrace::new();
            let after = global_rearrange(&d, &mut trace)?;
            emit(out, &datum_with_trace(&after, &trace));
            Ok(())
        }
        Command::Homology { file, side, index, n } => homology(file.as_deref(), *side, *index, *n, out),
        Command::Table { n } => {
            if *n == Some(0) {
                return Err(CliError::input("InvalidParamsError", "n must be at least 1"));
            }
            let _ = write!(out, "{}", render_table(*n));
            Ok(())
        }
        Command::Model { command } => model(command, out),
        Command::Oracle { command } => oracle(command, out),
        Command::Sample { n, max_points } => {
            if *n == 0 {
                return Err(CliError::input("InvalidParamsError", "n must be at least 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let d = random_datum(&mut rng, *n, *max_points);
            let _ = writeln!(out, "{}", to_sorted_json(&d.to_document()));
            Ok(())
        }
    }
}

fn oracle_certificate(build: &CobordismBuild, z: &PointId) -> Result<SplitCertificate, CliError> {
    let i = z
        .as_str()
        .strip_prefix('m')
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| MoveError::BuildMismatch(format!("{z} does not name a move of the build")))?;
    let verdict = certify_all(build)
        .into_iter()
        .find(|v| v.move_index() == i)
        .ok_or_else(|| MoveError::BuildMismatch(format!("{z} is not an interior 1-handle of the build")))?;
    match verdict {
        SplitVerdict::Certified { level, reason, .. } => Ok(SplitCertificate::OracleBased(OracleCertificate {
            level,
            move_index: i,
            reason,
        })),
        SplitVerdict::Refused { refusal, .. } => Err(MoveError::Obstruction(format!(
            "split of {z} refused: {}",
            serde_json::to_string(&refusal).expect("refusal serializes")
        ))
        .into()),
    }
}

fn homology(file: Option<&Path>, side: Option<SideArg>, index: Option<u32>, n: u32, out: &mut dyn Write) -> CliResult {
    if let (Some(side), Some(k)) = (side, index) {
        let side = match side {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        };
        let spec = HalfHandleSpec::new(side, k, n).map_err(|e| CliError::input("InvalidSpecError", e))?;
        let hb = half_handle_relative_homology(spec, RelativePair::HB)
            .map_err(|e| CliError::input("InvalidSpecError", e))?;
        let cb = half_handle_relative_homology(spec, RelativePair::CB0)
            .map_err(|e| CliError::input("InvalidSpecError", e))?;
        let effect = surgery_effect_descriptor(spec).map_err(|e| CliError::input("InvalidSpecError", e))?;
        emit(out, &json!({ "spec": spec, "h_b": hb, "c_b0": cb, "surgery": effect }));
        return Ok(());
    }
    let Some(file) = file else {
        return Err(CliError::input(
            "UsageError",
            "give a datum file or --side with --index",
        ));
    };
    let d = load_datum(file)?;
    let v = validate(&d);
    if !v.is_empty() {
        return Err(MoveError::InvalidDatum(v).into());
    }
    let g = generator_counts(&d);
    emit(
        out,
        &json!({
            "generator_counts": g,
            "chi": relative_euler_characteristic(&d),
        }),
    );
    Ok(())
}

fn params_with(grid_step: f64) -> ModelParams {
    ModelParams {
        grid_step,
        ..ModelParams::default()
    }
}

fn model(cmd: &ModelCommand, out: &mut dyn Write) -> CliResult {
    match cmd {
        ModelCommand::Critical { a, delta, grid_step } => {
            if !(*grid_step > 0.0) {
                return Err(LocalError::InvalidParams("grid step must be positive".into()).into());
            }
            let a = match (a, delta) {
                (Some(a), _) => *a,
                (None, Some(d)) => -d,
                (None, None) => unreachable!("clap requires one of --a and --delta"),
            };
            let params = params_with(*grid_step);
            let scan = find_critical_points(&ModelD { a }, &Domain::new((0.0, 2.0), (-1.0, 1.0)), &params);
            if scan.nonconverged == scan.seeds {
                return Err(LocalError::NonConvergence(scan.seeds).into());
            }
            emit(out, &json!({ "a": a, "scan": scan }));
            Ok(())
        }
        ModelCommand::Homotopy {
            delta,
            tmin,
            tmax,
            tstep,
        } => {
            if !(*tstep > 0.0) || tmax < tmin || !(*delta > 0.0) {
                return Err(LocalError::InvalidParams("need delta > 0, tstep > 0 and tmin <= tmax".into()).into());
            }
            let count = ((tmax - tmin) / tstep + 1e-9).floor() as usize;
            let ts: Vec<f64> = (0..=count).map(|i| tmin + i as f64 * tstep).collect();
            let rows = homotopy_scan(*delta, &ts, &ModelParams::default());
            let summary: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "t": r.t,
                        "a": r.a,
                        "interior": r.interior(),
                        "boundary_stable": r.scan.count(PointClass::BoundaryStable),
                        "boundary_unstable": r.scan.count(PointClass::BoundaryUnstable),
                        "degenerate": r.degenerate(),
                        "points": r.scan.points,
                    })
                })
                .collect();
            emit(
                out,
                &json!({
                    "delta": delta,
                    "t0": 1.0 / (1.0 + delta),
                    "transition_estimate": transition_estimate(&rows),
                    "rows": summary,
                }),
            );
            Ok(())
        }
        ModelCommand::ScanU21 { eps, delta, eta, step } => {
            let params = ModelParams {
                eps: *eps,
                delta: *delta,
                eta: eta.unwrap_or(10.0 * eps),
                ..ModelParams::default()
            };
            params.check_scales()?;
            let scan = scan_u21(*eps, *delta, *step)?;
            emit(out, &scan);
            Ok(())
        }
        ModelCommand::Flow {
            field,
            start,
            t_end,
            dt,
            a,
            delta,
            eps,
        } => {
            let start = parse_point(start)?;
            let field = match field {
                FieldArg::D => FlowField::GradD(ModelD { a: *a }),
                FieldArg::B => FlowField::RescaledB,
                FieldArg::G => FlowField::GradG(ModelG::new(*delta, *eps)),
            };
            let path = flow(&field, start, *t_end, *dt, &local::ab_domain(), &ModelParams::default())?;
            let with_a = matches!(field, FlowField::RescaledB);
            let _ = writeln!(out, "{}", if with_a { "t,x,y,F,A" } else { "t,x,y,F" });
            for s in &path.samples {
                let mut line = format!("{},{},{},{}", f(s.t), f(s.x), f(s.y), f(s.f));
                if let Some(av) = s.a {
                    line.push(',');
                    line.push_str(&f(av));
                }
                let _ = writeln!(out, "{line}");
            }
            Ok(())
        }
        ModelCommand::Phase { a } => {
            let values = if a.is_empty() { vec![1.0, 0.0, -1.0] } else { a.clone() };
            let domain = Domain::new((0.0, 2.0), (-1.5, 1.5));
            let params = ModelParams::default();
            let _ = writeln!(out, "a,traj,t,x,y,F");
            for av in values {
                let field = FlowField::GradD(ModelD { a: av });
                let mut traj = 0;
                for x in [0.0, 0.25, 0.75, 1.25] {
                    for y in [-1.0, -0.5, -0.1, 0.1, 0.5] {
                        let path = flow(&field, [x, y], 2.0, 0.01, &domain, &params)?;
                        for s in &path.samples {
                            let _ = writeln!(out, "{},{traj},{},{},{},{}", f(av), f(s.t), f(s.x), f(s.y), f(s.f));
                        }
                        traj += 1;
                    }
                }
            }
            Ok(())
        }
    }
}

fn parse_point(s: &str) -> Result<[f64; 2], CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || CliError::input("InvalidParamsError", format!("expected x,y, got {s:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let x = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
    let y = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
    Ok([x, y])
}

fn oracle(cmd: &OracleCommand, out: &mut dyn Write) -> CliResult {
    match cmd {
        OracleCommand::Replay { file } => {
            let b = load_build(file)?;
            let states: Vec<Value> = b
                .states()
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    json!({
                        "level": b.state_level(i),
                        "components": s.components,
                        "chi": s.chi(),
                    })
                })
                .collect();
            let flags = b.flags();
            emit(
                out,
                &json!({
                    "states": states,
                    "steps": b.steps(),
                    "chi_omega": b.chi_omega(),
                    "closed_levels": detect_closed_levels(&b),
                    "omega_components": b.omega_components(),
                    "flags": {
                        "closed_sigma0": flags.closed_sigma0,
                        "closed_sigma1": flags.closed_sigma1,
                        "closed_omega": flags.closed_omega,
                    },
                    "replay_consistent": b.verify_replay(),
                }),
            );
            Ok(())
        }
        OracleCommand::Certify { file, level, component } => {
            let b = load_build(file)?;
            let level: Level = level
                .parse()
                .map_err(|e| CliError::input("InvalidParamsError", format!("level {level:?}: {e}")))?;
            let verdicts = certify_split(&b, &level, component.as_deref())?;
            let all = verdicts.iter().all(SplitVerdict::is_certified);
            emit(
                out,
                &json!({ "verdicts": verdicts, "closed_levels": detect_closed_levels(&b) }),
            );
            if all {
                Ok(())
            } else {
                Err(CliError::reported("ObstructionError", "split refused at this level"))
            }
        }
        OracleCommand::Chi { file } => {
            let b = load_build(file)?;
            let by_level: Vec<i64> = (0..=b.moves().len()).map(|i| b.chi_from_level(i)).collect();
            emit(
                out,
                &json!({
                    "chi_omega": b.chi_omega(),
                    "chi_sigma0": b.sigma0().chi(),
                    "chi_from_levels": by_level,
                }),
            );
            Ok(())
        }
        OracleCommand::Reorder { file } => {
            let b = load_build(file)?;
            let r = reorder(&b)?;
            let build: Value = serde_json::from_str(&r.build.to_json()).expect("build json");
            emit(
                out,
                &json!({
                    "order": r.order.iter().map(|i| format!("m{i}")).collect::<Vec<_>>(),
                    "verdicts": r.verdicts,
                    "build": build,
                }),
            );
            Ok(())
        }
        OracleCommand::Datum { file } => {
            let b = load_build(file)?;
            let d = b.to_datum();
            let _ = writeln!(out, "{}", to_sorted_json(&d.to_document()));
            Ok(())
        }
    }
}
