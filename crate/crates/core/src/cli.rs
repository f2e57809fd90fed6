//! Command-line front end. Exit status: 0 success, 1 verification failure,
//! 2 input error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;

use crate::controller1d::{build_schedule, parse_pairs, write_pairs, PairFile};
use crate::controllermd::{build_md, write_assignment};
use crate::error::{Error, Result};
use crate::feasibility::{
    check_measure_bound, evade, feasible_control_check, trace_to_csv, ControlVerdict, RadialPl,
};
use crate::fixedpoint::{find_crossing, CrossingProblem, LinearSection, SearchOptions};
use crate::harness::{game_run, parse_gridfn, sample_lipschitz, DriftMap, GridSpec, SampledLipschitz};
use crate::scalar::{Rational, Scalar};
use crate::sequences::{
    counting_function, gen_lattice_capped, gen_pow2, gen_power_grid, gen_remark_a, parse_seq, write_seq, PointSeq,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "lipctl", version, about = "Control and evade Lipschitz functions with point-value pairs")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Upper bound on generated points.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub cap: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a point sequence.
    Gen(GenArgs),
    /// Counting-function report of a sequence.
    Density(DensityArgs),
    /// Assign values to a sequence so that the pairs control a class.
    Control(ControlArgs),
    /// Build a radial evader for a pair file.
    Evade(EvadeArgs),
    /// Decide or sample whether a pair file controls a class.
    Verify(VerifyArgs),
    /// Boundary-crossing search for a moving map.
    Lemma {
        #[command(subcommand)]
        action: LemmaAction,
    },
    /// Play sampled Lipschitz functions against a pair file.
    Game(GameArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Lattice,
    Pow2,
    Powergrid,
    #[value(name = "remarkA")]
    RemarkA,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Radius (lattice, powergrid).
    #[arg(long = "R", default_value = "4")]
    pub radius: String,
    /// Dyadic depth (pow2).
    #[arg(long = "K", default_value_t = 4)]
    pub k: u32,
    /// Density exponent base (powergrid).
    #[arg(long, default_value = "1")]
    pub c: String,
    /// Levels (remarkA); the growth function is `2^x`.
    #[arg(long, default_value_t = 1)]
    pub levels: u32,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub nmax: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlMode {
    #[value(name = "1d")]
    OneD,
    #[value(name = "md")]
    Md,
}

#[derive(Args, Debug)]
pub struct ControlArgs {
    #[arg(long, value_enum)]
    pub mode: ControlMode,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub d: usize,
    /// Number of blocks (1d) or the Lipschitz class (md).
    #[arg(long)]
    pub j: u64,
    /// Also write the flat pair list (md).
    #[arg(long)]
    pub pairs_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvadeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub d: usize,
    /// Per-step trace table.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Exact decision (m = 1).
    #[arg(long, conflicts_with = "sampled")]
    pub exhaustive: bool,
    /// Random Lipschitz samples.
    #[arg(long)]
    pub sampled: bool,
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    pub j: u64,
    /// Support bound `[0, n]` (exhaustive).
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Args, Debug)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Grid step of the sampled functions.
    #[arg(long, default_value = "1/4")]
    pub h: String,
    /// Half-width of the sampling grid; defaults to cover the pairs.
    #[arg(long)]
    pub radius: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum LemmaAction {
    Verify(LemmaArgs),
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    /// Grid function `R^m -> R^d`; the last input is time.
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub l: f64,
    #[arg(long)]
    pub t0: f64,
    #[arg(long)]
    pub t1: f64,
    /// Add `((t - t0)/(t1 - t0)) 2l` to every output.
    #[arg(long)]
    pub drift: bool,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct GameArgs {
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub j: u64,
    /// Grid-function files to play; random samples when absent.
    #[arg(long = "fn")]
    pub functions: Vec<PathBuf>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

enum Outcome {
    Ok(String),
    Failed(String),
}

/// Parses `argv` and runs the command; returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli).and_then(|o| {
        let (text, code) = match o {
            Outcome::Ok(t) => (t, EXIT_OK),
            Outcome::Failed(t) => (t, EXIT_FAILED),
        };
        emit(cli.out.as_deref(), &text)?;
        Ok(code)
    }) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))
}

fn rational(s: &str, what: &str) -> Result<Rational> {
    Rational::decode(s).ok_or_else(|| Error::Precondition(format!("{what} must be a rational like 3 or 1/4, got {s:?}")))
}

fn load_pairs(path: &Path) -> Result<PairFile<Rational>> {
    parse_pairs(&read(path)?)
}

fn load_seq(path: &Path) -> Result<PointSeq<Rational>> {
    parse_seq(&read(path)?)
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Gen(a) => gen(a, cli.cap).map(Outcome::Ok),
        Command::Density(a) => {
            let seq = load_seq(&a.input)?;
            Ok(Outcome::Ok(counting_function(&seq, a.d, a.nmax)?.to_text()))
        }
        Command::Control(a) => control(a),
        Command::Evade(a) => evade_cmd(a),
        Command::Verify(a) => verify(a, cli.seed),
        Command::Lemma { action: LemmaAction::Verify(a) } => lemma(a),
        Command::Game(a) => game(a, cli.seed),
    }
}

fn gen(a: &GenArgs, cap: usize) -> Result<String> {
    let seq = match a.kind {
        GenKind::Lattice => {
            let r = rational(&a.radius, "--R")?;
            let r = r.to_i64().filter(|v| *v >= 0).ok_or_else(|| Error::Precondition("--R must be a nonnegative integer for lattice".into()))?;
            gen_lattice_capped(a.m, r as u64, cap)?
        }
        GenKind::Pow2 => gen_pow2(a.d, a.k, cap)?,
        GenKind::Powergrid => gen_power_grid(a.m, &rational(&a.c, "--c")?, &rational(&a.radius, "--R")?, cap)?,
        GenKind::RemarkA => {
            let growth = |x: u64| if x >= 127 { u128::MAX } else { 1u128 << x };
            gen_remark_a(a.m, a.d, &growth, a.levels, cap)?.seq
        }
    };
    Ok(write_seq(&seq))
}

fn control(a: &ControlArgs) -> Result<Outcome> {
    let seq = load_seq(&a.input)?;
    match a.mode {
        ControlMode::OneD => {
            let schedule = build_schedule(&seq, a.d, a.j)?;
            Ok(Outcome::Ok(write_pairs(&schedule.pairs(), 1, a.d)))
        }
        ControlMode::Md => {
            let assignment = build_md(&seq, a.j, a.d)?;
            assignment.check(&seq)?;
            if let Some(p) = &a.pairs_out {
                fs::write(p, write_pairs(&assignment.pairs(), seq.m(), a.d))?;
            }
            Ok(Outcome::Ok(write_assignment(&assignment)))
        }
    }
}

/// Text form of a radial curve.
pub fn write_radial<S: Scalar>(g: &RadialPl<S>) -> String {
    let mut out = String::from("# lipctl radial v1\n");
    let _ = writeln!(out, "d {} lipschitz {} count {}", g.dim(), g.lipschitz.encode(), g.breakpoints.len());
    for (t, v) in g.breakpoints.iter().zip(&g.values) {
        out.push_str(&t.encode());
        for c in v {
            let _ = write!(out, " {}", c.encode());
        }
        out.push('\n');
    }
    out
}

fn evade_cmd(a: &EvadeArgs) -> Result<Outcome> {
    let file = load_pairs(&a.input)?;
    if file.d != a.d {
        return Err(Error::DimensionMismatch { expected: a.d, found: file.d });
    }
    let (trace, g) = match evade(&file.pairs, a.d) {
        Ok(v) => v,
        Err(Error::EmptyFeasibleSet { step }) => {
            return Ok(Outcome::Failed(format!("# lipctl radial v1\n# feasible set empty at step {step}\n")))
        }
        Err(e) => return Err(e),
    };
    if let Some(p) = &a.trace {
        fs::write(p, trace_to_csv(&trace))?;
    }
    let bound = check_measure_bound(&trace);
    let lift = g.clone().lift(file.m);
    let evades = file.pairs.iter().all(|p| !p.controls_value(&crate::harness::LipschitzFn::eval(&lift, &p.x)));
    let text = write_radial(&g);
    if bound.holds() && evades {
        Ok(Outcome::Ok(text))
    } else {
        Ok(Outcome::Failed(text))
    }
}

fn verify(a: &VerifyArgs, seed: u64) -> Result<Outcome> {
    let file = load_pairs(&a.pairs)?;
    if a.exhaustive == a.sampled {
        return Err(Error::Precondition("pass exactly one of --exhaustive or --sampled".into()));
    }
    if a.exhaustive {
        return match feasible_control_check(&file.pairs, a.j, file.d, a.n)? {
            ControlVerdict::Controlled { step, index } => {
                Ok(Outcome::Ok(format!("CONTROLLED step {step} index {index}\n")))
            }
            ControlVerdict::Witness(g) => Ok(Outcome::Failed(format!("WITNESS\n{}", write_radial(&g)))),
        };
    }
    let fns = sample_class(&file, a.j, &a.sampling, seed)?;
    let report = game_run(&file.pairs, &fns)?;
    let text = report.to_text();
    Ok(if report.all_controlled() { Outcome::Ok(text) } else { Outcome::Failed(text) })
}

/// Seeded members of the class `j`-Lipschitz with `|f(0)| <= j` on a grid
/// covering the pairs.
fn sample_class(file: &PairFile<Rational>, j: u64, s: &SamplingArgs, seed: u64) -> Result<Vec<SampledLipschitz<Rational>>> {
    let h = rational(&s.h, "--h")?;
    let radius = match &s.radius {
        Some(r) => rational(r, "--radius")?,
        None => file
            .pairs
            .iter()
            .flat_map(|p| p.x.iter().map(|c| c.abs()))
            .fold(Rational::from_i128(1), |a, b| if b > a { b } else { a })
            .ceil(),
    };
    let grid = GridSpec::cube(file.m, &radius, &h)?;
    let j = Rational::from_i128(j as i128);
    (0..s.samples as u64)
        .map(|k| sample_lipschitz(&grid, file.d, &j, seed.wrapping_add(k)))
        .collect()
}

fn lemma(a: &LemmaArgs) -> Result<Outcome> {
    let f: SampledLipschitz<Rational> = parse_gridfn(&read(&a.map)?)?;
    let m = f.m();
    if m < 1 || m > f.d {
        return Err(Error::Precondition(format!("map needs 1 <= m <= d, got m={m} d={}", f.d)));
    }
    let problem = CrossingProblem { l: a.l, t0: a.t0, t1: a.t1, domain_radius: a.t0 };
    let map = DriftMap {
        base: f.to_f64(),
        section: LinearSection { m, t0: a.t0, l: a.l },
        t0: a.t0,
        t1: a.t1,
        drift: a.drift,
    };
    let mut opts = SearchOptions::for_problem(&problem);
    if let Some(t) = a.tol {
        opts.tol = t;
    }
    match find_crossing(&map, &problem, &opts) {
        Ok(c) => {
            let mut out = String::from("# lipctl crossing v1\n");
            let z: Vec<String> = c.z.iter().map(|v| format!("{v:.12e}")).collect();
            let y: Vec<String> = c.y.iter().map(|v| format!("{v:.12e}")).collect();
            let _ = writeln!(out, "z {}", z.join(" "));
            let _ = writeln!(out, "t {:.12e}", c.t);
            let _ = writeln!(out, "y {}", y.join(" "));
            let _ = writeln!(out, "radial_residual {:.6e}", c.radial_residual);
            let _ = writeln!(out, "section_residual {:.6e}", c.section_residual);
            let _ = writeln!(out, "approximate true");
            Ok(if c.within(opts.tol) { Outcome::Ok(out) } else { Outcome::Failed(out) })
        }
        Err(Error::CrossingNotFound { best }) => {
            Ok(Outcome::Failed(format!("# lipctl crossing v1\nnot_found best_displacement {best:.6e}\n")))
        }
        Err(e) => Err(e),
    }
}

fn game(a: &GameArgs, seed: u64) -> Result<Outcome> {
    let file = load_pairs(&a.pairs)?;
    let fns = if a.functions.is_empty() {
        sample_class(&file, a.j, &a.sampling, seed)?
    } else {
        a.functions.iter().map(|p| parse_gridfn(&read(p)?)).collect::<Result<Vec<_>>>()?
    };
    Ok(Outcome::Ok(game_run(&file.pairs, &fns)?.to_text()))
}
