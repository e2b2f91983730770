//! Command-line surface for the realizability toolkit: feasibility checks,
//! explicit witness states, region cross-section scans, randomized oracle
//! sweeps, inequality classification, and the embedded original-Bell
//! scenario.
//!
//! Exit codes follow one contract everywhere: 0 = feasible / all checks
//! pass, 1 = infeasible / violations found, 2 = usage or input error.

use std::path::PathBuf;
use std::process::ExitCode;

use chsh_core::inequalities::{
    bell_original, bell_setting_decide, chsh_local, classify, tl_algebraic, tsirelson,
    ClassifyReport,
};
use chsh_core::observables::{
    build_setting, setting_from_angles, BlochObservable, Branch, Setting,
};
use chsh_core::realizability::{
    decide, verify_witness, witness, Verdict, W33Choice, WitnessReport,
};
use chsh_core::sampling::{
    boundary_sweep, completeness_sweep, gram_agreement_sweep, region_hierarchy_sweep,
    soundness_sweep, tl_equivalence_sweep, union_sweep,
};
use chsh_core::CorrVec;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Quantum realizability of two-setting correlation data: decision,
/// witness construction, region scans, and verification sweeps.
#[derive(Parser)]
#[command(name = "chsh", version)]
struct Cli {
    /// Worker threads for sweeps; defaults to $CHSH_THREADS, then 1.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Interpret all angle flags as degrees instead of radians.
    #[arg(long, global = true)]
    degrees: bool,

    /// Key=value file supplying defaults for the flags of the invoked
    /// subcommand; explicit flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a correlation vector is realizable at a setting.
    Check(CheckArgs),
    /// Build and verify an explicit state realizing feasible correlations.
    Witness(WitnessArgs),
    /// Scan a two-dimensional cross-section of the correlation cube to CSV.
    Region(RegionArgs),
    /// Run a named randomized verification sweep.
    Sample(SampleArgs),
    /// Evaluate every inequality family on one correlation vector.
    Classify(ClassifyArgs),
    /// Analyze the three-direction Bell scenario embedded at perfect
    /// anticorrelation.
    Bell(BellArgs),
}

impl Cmd {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool, String> {
        match self {
            Cmd::Check(a) => a.apply(key, value),
            Cmd::Witness(a) => a.apply(key, value),
            Cmd::Region(a) => a.apply(key, value),
            Cmd::Sample(a) => a.apply(key, value),
            Cmd::Classify(a) => a.apply(key, value),
            Cmd::Bell(a) => a.apply(key, value),
        }
    }
}

/// Measurement-setting input: angles or four Bloch vectors, never both.
#[derive(Args)]
struct SettingArgs {
    /// Angle between party A's observable pair, in radians.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,

    /// Angle between party B's observable pair, in radians.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,

    /// Bloch vector x,y,z of party A's first observable.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    a1: Option<[f64; 3]>,

    /// Bloch vector x,y,z of party A's second observable.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    a2: Option<[f64; 3]>,

    /// Bloch vector x,y,z of party B's first observable.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    b1: Option<[f64; 3]>,

    /// Bloch vector x,y,z of party B's second observable.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    b2: Option<[f64; 3]>,

    /// Identity offset of A's first observable (Bloch mode only).
    #[arg(long, allow_negative_numbers = true)]
    a1_offset: Option<f64>,

    /// Identity offset of A's second observable (Bloch mode only).
    #[arg(long, allow_negative_numbers = true)]
    a2_offset: Option<f64>,

    /// Identity offset of B's first observable (Bloch mode only).
    #[arg(long, allow_negative_numbers = true)]
    b1_offset: Option<f64>,

    /// Identity offset of B's second observable (Bloch mode only).
    #[arg(long, allow_negative_numbers = true)]
    b2_offset: Option<f64>,
}

impl SettingArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool, String> {
        match key {
            "alpha" => fill(&mut self.alpha, value, parse_f64),
            "beta" => fill(&mut self.beta, value, parse_f64),
            "a1" => fill(&mut self.a1, value, parse_vec3),
            "a2" => fill(&mut self.a2, value, parse_vec3),
            "b1" => fill(&mut self.b1, value, parse_vec3),
            "b2" => fill(&mut self.b2, value, parse_vec3),
            "a1-offset" => fill(&mut self.a1_offset, value, parse_f64),
            "a2-offset" => fill(&mut self.a2_offset, value, parse_f64),
            "b1-offset" => fill(&mut self.b1_offset, value, parse_f64),
            "b2-offset" => fill(&mut self.b2_offset, value, parse_f64),
            _ => Ok(false),
        }
    }
}

/// Correlation input: the raw second-moment vector or the cube coordinates
/// of normalized observables, never both.
#[derive(Args)]
struct CorrArgs {
    /// Correlations g11,g21,g12,g22 of the normalized observables.
    #[arg(long, value_parser = parse_vec4, allow_hyphen_values = true)]
    gamma: Option<CorrVec>,

    /// Correlations C11,C21,C12,C22 of unit-norm, offset-free observables;
    /// requires angle input or explicitly normalized Bloch vectors.
    #[arg(long, value_parser = parse_vec4, allow_hyphen_values = true)]
    c: Option<CorrVec>,
}

impl CorrArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool, String> {
        match key {
            "gamma" => fill(&mut self.gamma, value, parse_vec4),
            "c" => fill(&mut self.c, value, parse_vec4),
            _ => Ok(false),
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    setting: SettingArgs,
    #[command(flatten)]
    corr: CorrArgs,
}

impl CheckArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool, String> {
        if self.setting.apply(key, value)? {
            return Ok(true);
        }
        self.corr.apply(key, value)
    }
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    setting: SettingArgs,
    #[command(flatten)]
    corr: CorrArgs,

    /// Free w33 coefficient: midpoint, lo, hi, or an explicit value inside
    /// the feasible interval.
    #[arg(long, value_parser = parse_w33, allow_hyphen_values = true)]
    w33: Option<W33Choice>,
}

impl WitnessArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool, String> {
        if self.setting.apply(key, value)? {
            return Ok(true);
        }
        if self.corr.apply(key, value)? {
            return Ok(true);
        }
        match key {
            "w33" => fill(&mut self.w33, value, parse_w33),
            _ => Ok(false),
        }
    }
}

#[derive(Args)]
struct RegionArgs {
    /// Angle between party A's observable pair, in radians.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,

    /// Angle between party B's observable pair, in radians.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,

    /// The two free axes, comma-separated, among C11,C21,C12,C22.
    #[arg(long, value_parser = parse_axes)]
    axes: Option<(Axis, Axis)>,

    /// Values pinning the two remaining axes, e.g. C21=0.5,C22=0.5.
    #[arg(long, value_parser = parse_fixed, allow_hyphen_values = true)]
    fixed: Option<FixedList>,

    /// Grid resolution per axis (at least 2).
    #[arg(long)]
    res: Option<usize>,

    /// Shared axis range lo,hi inside [-1,1].
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    range: Option<(f64, f64)>,

    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RegionArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool, String> {
        match key {
            "alpha" => fill(&mut self.alpha, value, parse_f64),
            "beta" => fill(&mut self.beta, value, parse_f64),
            "axes" => fill(&mut self.axes, value, parse_axes),
            "fixed" => fill(&mut self.fixed, value, parse_fixed),
            "res" => fill(&mut self.res, value, parse_usize),
            "range" => fill(&mut self.range, value, parse_range),
            "out" => fill(&mut self.out, value, |s| Ok(PathBuf::from(s))),
            _ => Ok(false),
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    /// Sweep to run: soundness, completeness, boundary, union,
    /// tl-equivalence, gram, or region-hierarchy.
    #[arg(long, value_parser = parse_sweep)]
    sweep: Option<SweepKind>,

    /// Sample count (ignored by region-hierarchy, which is a full grid).
    #[arg(long)]
    n: Option<u64>,

    /// Seed of the per-sample substreams.
    #[arg(long)]
    seed: Option<u64>,

    /// Search-grid resolution: gram oracle (default 201) or the
    /// region-hierarchy cube axis (default 41).
    #[arg(long)]
    grid_n: Option<usize>,

    /// Angle-grid axis size for the union family (default 64).
    #[arg(long)]
    angle_n: Option<usize>,

    /// Boundary-proximity buffer for the union family (default 0.08,
    /// matched to the 64-point angle resolution).
    #[arg(long)]
    buffer: Option<f64>,
}

impl SampleArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool, String> {
        match key {
            "sweep" => fill(&mut self.sweep, value, parse_sweep),
            "n" => fill(&mut self.n, value, parse_u64),
            "seed" => fill(&mut self.seed, value, parse_u64),
            "grid-n" => fill(&mut self.grid_n, value, parse_usize),
            "angle-n" => fill(&mut self.angle_n, value, parse_usize),
            "buffer" => fill(&mut self.buffer, value, parse_f64),
            _ => Ok(false),
        }
    }
}

#[derive(Args)]
struct ClassifyArgs {
    /// Correlation vector C11,C21,C12,C22 to classify.
    #[arg(long, value_parser = parse_vec4, allow_hyphen_values = true)]
    c: Option<CorrVec>,

    /// Also run the Gram-matrix oracle at this search resolution.
    #[arg(long)]
    gram_grid: Option<usize>,
}

impl ClassifyArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool, String> {
        match key {
            "c" => fill(&mut self.c, value, parse_vec4),
            "gram-grid" => fill(&mut self.gram_grid, value, parse_usize),
            _ => Ok(false),
        }
    }
}

#[derive(Args)]
struct BellArgs {
    /// Angle between directions a and b, in radians.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,

    /// Angle between directions b and c, in radians.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,

    /// Correlation along (a, b).
    #[arg(long, allow_negative_numbers = true)]
    c11: Option<f64>,

    /// Correlation along (a, c).
    #[arg(long, allow_negative_numbers = true)]
    c12: Option<f64>,

    /// Correlation along (b, c).
    #[arg(long, allow_negative_numbers = true)]
    c22: Option<f64>,
}

impl BellArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<bool, String> {
        match key {
            "alpha" => fill(&mut self.alpha, value, parse_f64),
            "beta" => fill(&mut self.beta, value, parse_f64),
            "c11" => fill(&mut self.c11, value, parse_f64),
            "c12" => fill(&mut self.c12, value, parse_f64),
            "c22" => fill(&mut self.c22, value, parse_f64),
            _ => Ok(false),
        }
    }
}

/// Free axes of a region scan, named by cube coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    C11,
    C21,
    C12,
    C22,
}

impl Axis {
    fn parse(s: &str) -> Result<Axis, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "C11" => Ok(Axis::C11),
            "C21" => Ok(Axis::C21),
            "C12" => Ok(Axis::C12),
            "C22" => Ok(Axis::C22),
            other => Err(format!(
                "unknown axis {other:?}; expected one of C11, C21, C12, C22"
            )),
        }
    }

    /// Slot in the frozen correlation order (g11, g21, g12, g22).
    fn index(self) -> usize {
        match self {
            Axis::C11 => 0,
            Axis::C21 => 1,
            Axis::C12 => 2,
            Axis::C22 => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Axis::C11 => "C11",
            Axis::C21 => "C21",
            Axis::C12 => "C12",
            Axis::C22 => "C22",
        }
    }
}

/// Pinned values of the non-free axes (newtype keeps the argument scalar).
#[derive(Clone, Debug)]
struct FixedList(Vec<(Axis, f64)>);

#[derive(Clone, Copy, Debug)]
enum SweepKind {
    Soundness,
    Completeness,
    Boundary,
    Union,
    TlEquivalence,
    Gram,
    RegionHierarchy,
}

fn parse_sweep(s: &str) -> Result<SweepKind, String> {
    match s {
        "soundness" => Ok(SweepKind::Soundness),
        "completeness" => Ok(SweepKind::Completeness),
        "boundary" => Ok(SweepKind::Boundary),
        "union" => Ok(SweepKind::Union),
        "tl-equivalence" => Ok(SweepKind::TlEquivalence),
        "gram" => Ok(SweepKind::Gram),
        "region-hierarchy" => Ok(SweepKind::RegionHierarchy),
        other => Err(format!(
            "unknown sweep {other:?}; expected soundness, completeness, boundary, union, \
             tl-equivalence, gram, or region-hierarchy"
        )),
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("not a finite number: {s:?}"));
    }
    Ok(v)
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("not a nonnegative integer: {s:?}"))
}

fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("not a nonnegative integer: {s:?}"))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        other => Err(format!("not a boolean: {other:?}")),
    }
}

fn parse_parts(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(format!(
            "expected {n} comma-separated numbers, got {}: {s:?}",
            parts.len()
        ));
    }
    parts.iter().map(|p| parse_f64(p)).collect()
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let v = parse_parts(s, 3)?;
    Ok([v[0], v[1], v[2]])
}

fn parse_vec4(s: &str) -> Result<CorrVec, String> {
    let v = parse_parts(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let v = parse_parts(s, 2)?;
    Ok((v[0], v[1]))
}

fn parse_axes(s: &str) -> Result<(Axis, Axis), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated axes, got {s:?}"));
    }
    let x = Axis::parse(parts[0])?;
    let y = Axis::parse(parts[1])?;
    if x == y {
        return Err(format!("the two axes must differ, got {} twice", x.name()));
    }
    Ok((x, y))
}

fn parse_fixed(s: &str) -> Result<FixedList, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| format!("expected AXIS=VALUE, got {item:?}"))?;
        out.push((Axis::parse(name)?, parse_f64(value)?));
    }
    Ok(FixedList(out))
}

fn parse_w33(s: &str) -> Result<W33Choice, String> {
    match s.trim() {
        "midpoint" => Ok(W33Choice::Midpoint),
        "lo" => Ok(W33Choice::Lo),
        "hi" => Ok(W33Choice::Hi),
        other => Ok(W33Choice::Value(parse_f64(other)?)),
    }
}

/// Config merge primitive: always validates, only fills an empty slot
/// (explicit flags win over config values).
fn fill<T>(
    slot: &mut Option<T>,
    value: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<bool, String> {
    let parsed = parse(value)?;
    if slot.is_none() {
        *slot = Some(parsed);
    }
    Ok(true)
}

fn merge_config(cli: &mut Cli) -> Result<(), String> {
    let Some(path) = cli.config.clone() else {
        return Ok(());
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            format!(
                "config line {}: expected key=value, got {raw:?}",
                lineno + 1
            )
        })?;
        let (key, value) = (key.trim(), value.trim());
        let used = match key {
            "threads" => fill(&mut cli.threads, value, parse_usize)?,
            "degrees" => {
                if parse_bool(value)? {
                    cli.degrees = true;
                }
                true
            }
            "config" => return Err("config files cannot nest another config".into()),
            _ => cli.command.apply(key, value)?,
        };
        if !used {
            return Err(format!(
                "config key {key:?} is not a flag of this subcommand"
            ));
        }
    }
    Ok(())
}

/// Top-level schema wrapper for every JSON output.
#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: u32,
    #[serde(flatten)]
    body: T,
}

/// Writes to standard output, treating a closed pipe as a normal early end
/// of the conversation rather than an error.
fn write_stdout(text: &str) -> Result<(), String> {
    use std::io::Write as _;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(format!("cannot write to standard output: {e}")),
    }
}

fn print_json<T: Serialize>(body: T) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(&Envelope { schema: 1, body })
        .map_err(|e| format!("serialization failed: {e}"))?;
    text.push('\n');
    write_stdout(&text)
}

/// Builds the measurement setting and reports whether the inputs pin
/// normalized (unit-norm, offset-free) observables, which is what the
/// `--c` correlation form requires.
fn resolve_setting(args: &SettingArgs, to_rad: f64) -> Result<(Setting, bool), String> {
    let angle_mode = args.alpha.is_some() || args.beta.is_some();
    let bloch_given = [args.a1, args.a2, args.b1, args.b2];
    let offsets = [
        args.a1_offset,
        args.a2_offset,
        args.b1_offset,
        args.b2_offset,
    ];
    let bloch_mode = bloch_given.iter().any(Option::is_some) || offsets.iter().any(Option::is_some);
    if angle_mode && bloch_mode {
        return Err("provide either --alpha/--beta or Bloch vectors, not both".into());
    }
    if angle_mode {
        let alpha = args
            .alpha
            .ok_or("--beta was given but --alpha is missing")?
            * to_rad;
        let beta = args.beta.ok_or("--alpha was given but --beta is missing")? * to_rad;
        let setting = setting_from_angles(alpha, beta).map_err(|e| e.to_string())?;
        return Ok((setting, true));
    }
    if !bloch_mode {
        return Err("a setting is required: --alpha/--beta or --a1/--a2/--b1/--b2".into());
    }
    let names = ["--a1", "--a2", "--b1", "--b2"];
    let mut vecs = [[0.0; 3]; 4];
    for (slot, (given, name)) in bloch_given.iter().zip(names).enumerate() {
        vecs[slot] =
            given.ok_or_else(|| format!("Bloch mode needs all four vectors; {name} is missing"))?;
    }
    let offs = offsets.map(|o| o.unwrap_or(0.0));
    let obs: Vec<BlochObservable> = vecs
        .iter()
        .zip(offs)
        .map(|(v, o)| BlochObservable::new(o, *v).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let normalized = vecs
        .iter()
        .all(|v| ((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() - 1.0).abs() <= 1e-12)
        && offs.iter().all(|o| o.abs() <= 1e-12);
    let setting = build_setting(obs[0], obs[1], obs[2], obs[3]).map_err(|e| e.to_string())?;
    Ok((setting, normalized))
}

fn resolve_gamma(corr: &CorrArgs, normalized: bool) -> Result<CorrVec, String> {
    match (corr.gamma, corr.c) {
        (Some(_), Some(_)) => Err("--gamma and --c are mutually exclusive".into()),
        (Some(g), None) => Ok(g),
        (None, Some(c)) => {
            if normalized {
                Ok(c)
            } else {
                Err(
                    "--c is defined only for unit-norm, offset-free observables; \
                     pass --alpha/--beta, normalize the Bloch vectors, or use --gamma"
                        .into(),
                )
            }
        }
        (None, None) => Err("correlations are required: --gamma or --c".into()),
    }
}

fn run_check(args: CheckArgs, to_rad: f64) -> Result<u8, String> {
    let (setting, normalized) = resolve_setting(&args.setting, to_rad)?;
    let gamma = resolve_gamma(&args.corr, normalized)?;
    let verdict = decide(&setting, gamma);
    let code = if verdict.feasible { 0 } else { 1 };
    print_json(verdict)?;
    Ok(code)
}

#[derive(Serialize)]
struct WitnessOut {
    /// Chosen free coefficient.
    w33: f64,
    /// Sixteen row-major [re, im] entries of the state.
    rho: Vec<[f64; 2]>,
    /// Spectrum in ascending order.
    eigenvalues: Vec<f64>,
    /// Residuals of the state against the requested correlations.
    report: WitnessReport,
    /// The feasibility verdict the construction started from.
    verdict: Verdict,
}

fn run_witness(args: WitnessArgs, to_rad: f64) -> Result<u8, String> {
    let (setting, normalized) = resolve_setting(&args.setting, to_rad)?;
    let gamma = resolve_gamma(&args.corr, normalized)?;
    let verdict = decide(&setting, gamma);
    if !verdict.feasible {
        print_json(verdict)?;
        return Ok(1);
    }
    let choice = args.w33.unwrap_or(W33Choice::Midpoint);
    let rho = witness(&setting, gamma, choice).map_err(|e| e.to_string())?;
    let report = verify_witness(&setting, gamma, &rho).map_err(|e| e.to_string())?;
    let (lo, hi) = verdict
        .w33_interval
        .expect("feasible verdicts carry the w33 interval");
    let w33 = match choice {
        W33Choice::Midpoint => 0.5 * (lo + hi),
        W33Choice::Lo => lo,
        W33Choice::Hi => hi,
        W33Choice::Value(v) => v,
    };
    let mut entries = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            let z = rho.mat().get(i, j);
            entries.push([z.re, z.im]);
        }
    }
    let mut eigenvalues = rho.herm().eigenvalues().map_err(|e| e.to_string())?;
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    print_json(WitnessOut {
        w33,
        rho: entries,
        eigenvalues,
        report,
        verdict,
    })?;
    Ok(0)
}

fn bit(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

fn run_region(args: RegionArgs, to_rad: f64) -> Result<u8, String> {
    use std::fmt::Write as _;

    let alpha = args.alpha.ok_or("--alpha is required")? * to_rad;
    let beta = args.beta.ok_or("--beta is required")? * to_rad;
    let (x_axis, y_axis) = args
        .axes
        .ok_or("--axes is required (two of C11, C21, C12, C22)")?;
    let res = args.res.unwrap_or(201);
    if res < 2 {
        return Err("--res must be at least 2".into());
    }
    let (lo, hi) = args.range.unwrap_or((-1.0, 1.0));
    // NaN bounds must fail this check too, hence not `lo >= hi`.
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err("--range must be lo,hi with lo < hi".into());
    }
    if lo < -1.0 || hi > 1.0 {
        return Err("--range must stay inside [-1,1]".into());
    }
    let mut base: CorrVec = [0.0; 4];
    let mut covered = [false; 4];
    covered[x_axis.index()] = true;
    covered[y_axis.index()] = true;
    for (axis, value) in args.fixed.map(|f| f.0).unwrap_or_default() {
        if covered[axis.index()] {
            return Err(format!(
                "{} is a free axis or already fixed; each axis appears once",
                axis.name()
            ));
        }
        if !(-1.0..=1.0).contains(&value) {
            return Err(format!(
                "fixed value {value} for {} lies outside [-1,1]",
                axis.name()
            ));
        }
        base[axis.index()] = value;
        covered[axis.index()] = true;
    }
    if let Some(missing) = [Axis::C11, Axis::C21, Axis::C12, Axis::C22]
        .into_iter()
        .find(|a| !covered[a.index()])
    {
        return Err(format!("--fixed must pin {}", missing.name()));
    }
    let setting = setting_from_angles(alpha, beta).map_err(|e| e.to_string())?;

    let span = (res - 1) as f64;
    let coord = |i: usize| ((lo * (span - i as f64) + hi * i as f64) / span).clamp(-1.0, 1.0);
    let mut out = String::with_capacity(res * res * 48);
    writeln!(
        out,
        "{},{},ours,ours_lhs,tl,chsh,tsirelson",
        x_axis.name(),
        y_axis.name()
    )
    .expect("string writes cannot fail");
    for i in 0..res {
        let x = coord(i);
        for j in 0..res {
            let y = coord(j);
            let mut c = base;
            c[x_axis.index()] = x;
            c[y_axis.index()] = y;
            let verdict = decide(&setting, c);
            let tl = tl_algebraic(c).map_err(|e| e.to_string())?;
            writeln!(
                out,
                "{x},{y},{},{},{},{},{}",
                bit(verdict.feasible),
                verdict.lhs,
                bit(tl),
                bit(chsh_local(c)),
                bit(tsirelson(c))
            )
            .expect("string writes cannot fail");
        }
    }
    match args.out {
        Some(path) => std::fs::write(&path, out)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => write_stdout(&out)?,
    }
    Ok(0)
}

fn run_sample(args: SampleArgs, threads: usize) -> Result<u8, String> {
    let sweep = args
        .sweep
        .ok_or("--sweep is required (see --help for the names)")?;
    let n = args.n.unwrap_or(1000);
    let seed = args.seed.unwrap_or(0);
    if let Some(g) = args.grid_n {
        if g < 2 {
            return Err("--grid-n must be at least 2".into());
        }
    }
    if let Some(a) = args.angle_n {
        if a < 2 {
            return Err("--angle-n must be at least 2".into());
        }
    }
    if let Some(b) = args.buffer {
        // A NaN buffer must fail this check too, hence not `b > 0.0`.
        if b.is_nan() || b <= 0.0 {
            return Err("--buffer must be positive".into());
        }
    }
    let angle_n = args.angle_n.unwrap_or(64);
    let buffer = args.buffer.unwrap_or(0.08);
    let report = match sweep {
        SweepKind::Soundness => {
            soundness_sweep(n, seed, threads, (0.05, std::f64::consts::PI - 0.05))
        }
        SweepKind::Completeness => completeness_sweep(n, seed, threads),
        SweepKind::Boundary => boundary_sweep(n, seed, threads),
        SweepKind::Union => union_sweep(n, seed, threads, angle_n, buffer),
        SweepKind::TlEquivalence => tl_equivalence_sweep(n, seed, threads),
        SweepKind::Gram => gram_agreement_sweep(n, seed, threads, args.grid_n.unwrap_or(201)),
        SweepKind::RegionHierarchy => {
            region_hierarchy_sweep(args.grid_n.unwrap_or(41), angle_n, threads, buffer)
        }
    };
    let code = if report.violations > 0 { 1 } else { 0 };
    print_json(report)?;
    Ok(code)
}

fn run_classify(args: ClassifyArgs) -> Result<u8, String> {
    let c = args.c.ok_or("--c is required")?;
    if let Some(g) = args.gram_grid {
        if g < 2 {
            return Err("--gram-grid must be at least 2".into());
        }
    }
    let report: ClassifyReport = classify(c, args.gram_grid);
    print_json(report)?;
    Ok(0)
}

#[derive(Serialize)]
struct BellOut {
    /// Realizability verdict for the embedded correlation vector
    /// (C11, -1, C12, C22).
    verdict: Verdict,
    /// Whether the three correlations satisfy |C11 - C12| <= 1 + C22.
    bell_original_ok: bool,
    /// quantum-violates-bell, consistent, or quantum-infeasible.
    classification: &'static str,
}

fn run_bell(args: BellArgs, to_rad: f64) -> Result<u8, String> {
    let alpha = args.alpha.ok_or("--alpha is required")? * to_rad;
    let beta = args.beta.ok_or("--beta is required")? * to_rad;
    let c11 = args.c11.ok_or("--c11 is required")?;
    let c12 = args.c12.ok_or("--c12 is required")?;
    let c22 = args.c22.ok_or("--c22 is required")?;
    let setting = setting_from_angles(alpha, beta).map_err(|e| e.to_string())?;
    if setting.branch != Branch::Generic {
        return Err(
            "degenerate angles: the embedded scenario needs alpha and beta away from 0 and pi"
                .into(),
        );
    }
    let verdict = bell_setting_decide(alpha, beta, c11, c12, c22).map_err(|e| e.to_string())?;
    let bell_ok = bell_original(c11, c12, c22);
    let classification = if !verdict.feasible {
        "quantum-infeasible"
    } else if bell_ok {
        "consistent"
    } else {
        "quantum-violates-bell"
    };
    let code = if verdict.feasible { 0 } else { 1 };
    print_json(BellOut {
        verdict,
        bell_original_ok: bell_ok,
        classification,
    })?;
    Ok(code)
}

fn resolve_threads(explicit: Option<usize>) -> Result<usize, String> {
    if let Some(t) = explicit {
        if t == 0 {
            return Err("--threads must be positive".into());
        }
        return Ok(t);
    }
    match std::env::var("CHSH_THREADS") {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|t| *t > 0)
            .ok_or_else(|| format!("CHSH_THREADS must be a positive integer, got {raw:?}")),
        Err(_) => Ok(1),
    }
}

fn run(mut cli: Cli) -> Result<u8, String> {
    merge_config(&mut cli)?;
    let to_rad = if cli.degrees {
        std::f64::consts::PI / 180.0
    } else {
        1.0
    };
    match cli.command {
        Cmd::Check(a) => run_check(a, to_rad),
        Cmd::Witness(a) => run_witness(a, to_rad),
        Cmd::Region(a) => run_region(a, to_rad),
        Cmd::Sample(a) => {
            let threads = resolve_threads(cli.threads)?;
            run_sample(a, threads)
        }
        Cmd::Classify(a) => run_classify(a),
        Cmd::Bell(a) => run_bell(a, to_rad),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
