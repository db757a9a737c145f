use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use knotforge::ball::Angle;
use knotforge::braid::{alexander_from_braid, presentation, BraidWord};
use knotforge::catalog::{self, KnotRecord};
use knotforge::circle_zeros::{criterion_verdict, has_odd_order_unit_zero, unit_circle_zeros_refined};
use knotforge::invariants::{
    alexander_from_seifert, knot_determinant, lt_signature, murasugi_signature, seifert_from_positive_braid,
    signature_profile_with, SeifertMatrix,
};
use knotforge::laurent::{conway_normalize, to_palindromic, LaurentPoly, PalindromicForm};
use knotforge::repspace::{deform, DeformOptions, DeformationPath, Flavor, Side};
use knotforge::{Error, Exec, DEFAULT_PRECISION_BITS};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "knotforge", version, about = "Knot invariants, unit-circle zeros and representation deformations")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Starting precision for certified arithmetic.
    #[arg(long, global = true, env = "KNOTFORGE_PRECISION_BITS")]
    precision_bits: Option<u32>,
    /// TOML file with default values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run without the thread pool.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conway-normalized Alexander polynomial.
    Alexander(Input),
    /// Zeros of the Alexander polynomial on the unit circle.
    Zeros {
        #[command(flatten)]
        input: Input,
        /// Refine isolating intervals to width 2^-bits.
        #[arg(long)]
        refine_bits: Option<u32>,
    },
    /// Coefficient criterion for an odd-order unit-circle zero.
    Criterion(Input),
    /// Levine–Tristram signature profile.
    Signature {
        #[command(flatten)]
        input: Input,
        /// Single angle, e.g. `pi`, `2pi/3` or radians.
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Continue the abelian representation at an odd-order zero.
    Deform {
        #[command(flatten)]
        input: Input,
        /// `auto` or an angle in (0, pi).
        #[arg(long, default_value = "auto")]
        theta0: String,
        /// `auto`, `upper` or `lower`.
        #[arg(long, default_value = "auto")]
        side: String,
        #[arg(long)]
        flavor: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        step_size: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Reseeds before giving up.
        #[arg(long)]
        retries: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate a catalog (the bundled one by default).
    Batch {
        catalog: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Braid word, e.g. "1 1 1" or "s1 S2".
    #[arg(long, requires = "strands", allow_hyphen_values = true)]
    braid: Option<String>,
    #[arg(long)]
    strands: Option<usize>,
    /// Seifert matrix as JSON rows.
    #[arg(long)]
    seifert: Option<String>,
    /// Symmetric coefficients a_0,…,a_d of Δ.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Name of a record in the bundled catalog.
    #[arg(long)]
    knot: Option<String>,
}

/// Defaults read from `--config`. Flags and the environment win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    precision_bits: Option<u32>,
    samples: Option<usize>,
    steps: Option<usize>,
    step_size: Option<f64>,
    seed: Option<u64>,
    retries: Option<usize>,
    flavor: Option<String>,
    refine_bits: Option<u32>,
}

struct Ctx {
    json: bool,
    precision: u32,
    exec: Exec,
    config: Config,
}

enum Source {
    Braid(BraidWord),
    Seifert(SeifertMatrix),
    Both(BraidWord, SeifertMatrix),
    Coeffs(PalindromicForm),
}

impl Input {
    fn resolve(&self) -> anyhow::Result<Source> {
        let given = [self.braid.is_some(), self.seifert.is_some(), self.coeffs.is_some(), self.knot.is_some()];
        match given.iter().filter(|g| **g).count() {
            0 => bail!("no input: pass --braid/--strands, --seifert, --coeffs or --knot"),
            1 => {}
            _ => bail!("pass exactly one of --braid, --seifert, --coeffs, --knot"),
        }
        if let Some(w) = &self.braid {
            return Ok(Source::Braid(BraidWord::parse(w, self.strands.expect("clap requires strands"))?));
        }
        if let Some(s) = &self.seifert {
            return Ok(Source::Seifert(s.parse()?));
        }
        if let Some(c) = &self.coeffs {
            let a = c
                .split([',', ' '])
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse::<BigInt>().with_context(|| format!("bad coefficient `{s}`")))
                .collect::<anyhow::Result<Vec<_>>>()?;
            return Ok(Source::Coeffs(PalindromicForm::new(a)));
        }
        let name = self.knot.as_ref().unwrap();
        let record = find_record(name)?;
        Ok(match (record.braid, record.seifert) {
            (Some(b), Some(v)) => Source::Both(b.braid()?, v),
            (Some(b), None) => Source::Braid(b.braid()?),
            (None, Some(v)) => Source::Seifert(v),
            (None, None) => unreachable!("catalog records are validated"),
        })
    }
}

fn find_record(name: &str) -> anyhow::Result<KnotRecord> {
    let records = catalog::bundled();
    records.iter().find(|r| r.name.eq_ignore_ascii_case(name)).cloned().ok_or_else(|| {
        let names: Vec<_> = records.iter().map(|r| r.name.as_str()).collect();
        anyhow!("no bundled knot `{name}` (known: {})", names.join(", "))
    })
}

impl Source {
    fn alexander(&self) -> anyhow::Result<LaurentPoly> {
        Ok(match self {
            Source::Braid(b) | Source::Both(b, _) => alexander_from_braid(b)?,
            Source::Seifert(v) => conway_normalize(&alexander_from_seifert(v))?,
            Source::Coeffs(f) => f.expand(),
        })
    }

    fn palindromic(&self) -> anyhow::Result<PalindromicForm> {
        Ok(match self {
            Source::Coeffs(f) => f.clone(),
            _ => to_palindromic(&self.alexander()?)?,
        })
    }

    fn seifert(&self) -> anyhow::Result<SeifertMatrix> {
        match self {
            Source::Seifert(v) | Source::Both(_, v) => Ok(v.clone()),
            Source::Braid(b) if b.letters().iter().all(|&l| l > 0) => Ok(seifert_from_positive_braid(b)?),
            Source::Braid(_) => bail!("signatures need a Seifert matrix or a positive braid"),
            Source::Coeffs(_) => bail!("signatures need a Seifert matrix, not coefficients"),
        }
    }

    fn braid(&self) -> anyhow::Result<&BraidWord> {
        match self {
            Source::Braid(b) | Source::Both(b, _) => Ok(b),
            _ => bail!("deformation needs a braid"),
        }
    }
}

fn emit<T: Serialize>(ctx: &Ctx, value: &T, text: impl FnOnce() -> String) -> anyhow::Result<()> {
    if ctx.json {
        write_out(&serde_json::to_string_pretty(value)?)?;
    } else {
        write_out(&text())?;
    }
    Ok(())
}

/// Writes a line to stdout; a closed pipe is not an error.
fn write_out(s: &str) -> anyhow::Result<()> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(s.as_bytes()).and_then(|_| {
        if s.ends_with('\n') { Ok(()) } else { stdout.write_all(b"\n") }
    }) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Failure of `deform` to find a path; exits with 4.
#[derive(Debug)]
struct NoPath(String);

impl std::fmt::Display for NoPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NoPath {}

#[derive(Debug)]
struct PinnedMismatch(usize);

impl std::fmt::Display for PinnedMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} catalog check(s) failed", self.0)
    }
}

impl std::error::Error for PinnedMismatch {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<NoPath>().is_some() {
        return 4;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::NotAKnot { .. } | Error::NotSeifert { .. } | Error::NotSeifertConsistent) => 2,
        Some(Error::EvenConstantTerm { .. }) => 3,
        Some(Error::NoConvergence { .. } | Error::StuckReducible { .. }) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config: Config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => Config::default(),
    };
    let precision = cli.precision_bits.or(config.precision_bits).unwrap_or(DEFAULT_PRECISION_BITS);
    if !(2..=knotforge::MAX_PRECISION_BITS).contains(&precision) {
        bail!("precision must be between 2 and {} bits", knotforge::MAX_PRECISION_BITS);
    }
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let ctx = Ctx { json: cli.json, precision, exec, config };
    match cli.command {
        Command::Alexander(input) => cmd_alexander(&ctx, &input),
        Command::Zeros { input, refine_bits } => cmd_zeros(&ctx, &input, refine_bits),
        Command::Criterion(input) => cmd_criterion(&ctx, &input),
        Command::Signature { input, at, samples, format } => cmd_signature(&ctx, &input, at, samples, format),
        Command::Deform { input, theta0, side, flavor, steps, step_size, seed, retries, format } => {
            let defaults = DeformOptions::default();
            let opts = DeformOptions {
                steps: steps.or(ctx.config.steps).unwrap_or(defaults.steps),
                step_size: step_size.or(ctx.config.step_size).unwrap_or(defaults.step_size),
                seed: seed.or(ctx.config.seed).unwrap_or(defaults.seed),
                retries: retries.or(ctx.config.retries).unwrap_or(defaults.retries),
                ..defaults
            };
            let flavor = flavor.or(ctx.config.flavor.clone()).unwrap_or_else(|| "sl2r".into()).parse::<Flavor>()?;
            cmd_deform(&ctx, &input, &theta0, &side, flavor, &opts, format)
        }
        Command::Batch { catalog, out } => cmd_batch(&ctx, catalog, out),
    }
}

fn cmd_alexander(ctx: &Ctx, input: &Input) -> anyhow::Result<()> {
    let src = input.resolve()?;
    let delta = src.alexander()?;
    if let Source::Both(_, v) = &src {
        let other = conway_normalize(&alexander_from_seifert(v))?;
        if other != delta {
            bail!("braid and Seifert inputs disagree: {delta} vs {other}");
        }
    }
    #[derive(Serialize)]
    struct Out {
        alexander: String,
        palindromic: PalindromicForm,
        #[serde(serialize_with = "as_string")]
        at_minus_one: BigInt,
    }
    let out = Out { alexander: delta.to_string(), palindromic: to_palindromic(&delta)?, at_minus_one: delta.at_minus_one() };
    emit(ctx, &out, || delta.to_string())
}

fn as_string<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn cmd_zeros(ctx: &Ctx, input: &Input, refine_bits: Option<u32>) -> anyhow::Result<()> {
    let f = input.resolve()?.palindromic()?;
    let bits = refine_bits.or(ctx.config.refine_bits).unwrap_or(knotforge::circle_zeros::DEFAULT_REFINE_BITS);
    let report = unit_circle_zeros_refined(&f, bits)?;
    emit(ctx, &report, || {
        let mut s = format!("chebyshev: {}\n", report.chebyshev);
        if report.roots.is_empty() {
            s.push_str("no zeros on the open unit circle arcs");
        }
        for r in &report.roots {
            let (a, b) = r.angle_enclosure();
            s.push_str(&format!(
                "x in [{}, {}]  multiplicity {}  ({})  t = exp(i*phi), phi in [{a:.10}, {b:.10}]\n",
                knotforge::circle_zeros::rational_string(&r.lo),
                knotforge::circle_zeros::rational_string(&r.hi),
                r.multiplicity,
                format!("{:?}", r.parity()).to_lowercase()
            ));
        }
        s.trim_end().to_string()
    })
}

fn cmd_criterion(ctx: &Ctx, input: &Input) -> anyhow::Result<()> {
    let f = input.resolve()?.palindromic()?;
    let verdict = criterion_verdict(&f)?;
    let verdict = if ctx.precision == DEFAULT_PRECISION_BITS {
        verdict
    } else {
        knotforge::circle_zeros::km_inequality_with(&f, false, ctx.precision)?
    };
    let detector = has_odd_order_unit_zero(&f)?;
    #[derive(Serialize)]
    struct Out {
        criterion: knotforge::circle_zeros::CriterionVerdict,
        odd_order_zero: bool,
        witness: Option<knotforge::circle_zeros::RootInterval>,
        /// Criterion true implies detector true.
        cross_check: bool,
    }
    let out = Out {
        cross_check: !verdict.holds || detector.is_some(),
        odd_order_zero: detector.is_some(),
        witness: detector,
        criterion: verdict,
    };
    if !out.cross_check {
        bail!("criterion holds but no odd-order zero was found");
    }
    emit(ctx, &out, || {
        let w = out.criterion.witness_j.map(|j| format!(" (witness j = {j})")).unwrap_or_default();
        format!(
            "criterion: {}{w}\nodd-order unit-circle zero: {}",
            out.criterion.holds, out.odd_order_zero
        )
    })
}

fn cmd_signature(
    ctx: &Ctx,
    input: &Input,
    at: Option<String>,
    samples: Option<usize>,
    format: Format,
) -> anyhow::Result<()> {
    let v = input.resolve()?.seifert()?;
    if let Some(at) = at {
        let angle: Angle = at.parse()?;
        let is_pi = angle.to_string() == "pi";
        let sgn = if is_pi { murasugi_signature(&v)? } else { lt_signature(&v, &angle, ctx.precision)? };
        #[derive(Serialize)]
        struct Out {
            angle: String,
            signature: i64,
            #[serde(serialize_with = "as_string")]
            det: BigInt,
        }
        let out = Out { angle: angle.to_string(), signature: sgn, det: knot_determinant(&v)? };
        return emit(ctx, &out, || sgn.to_string());
    }
    let samples = samples.or(ctx.config.samples).unwrap_or(360);
    let profile = signature_profile_with(&v, samples, ctx.exec, ctx.precision)?;
    match format {
        Format::Csv => {
            write_out(&profile.to_csv())?;
            Ok(())
        }
        Format::Json => emit(ctx, &profile, || {
            let mut s = String::new();
            for j in &profile.jumps {
                s.push_str(&format!(
                    "jump {:+} between {:.6} and {:.6} (multiplicity {})\n",
                    j.jump, j.lo, j.hi, j.multiplicity
                ));
            }
            s.push_str(&format!(
                "{} samples, {} excluded, piecewise constant: {}, jumps consistent: {}",
                profile.samples.len(),
                profile.excluded_samples.len(),
                profile.is_piecewise_constant(),
                profile.jumps_consistent()
            ));
            s
        }),
    }
}

/// Smallest-angle odd-order zero: `e^{2iθ₀}` with `2cos 2θ₀` the largest odd
/// root in `x`, refined to width `2^-48`.
fn auto_theta0(f: &PalindromicForm) -> anyhow::Result<f64> {
    let report = unit_circle_zeros_refined(f, 0)?;
    let Some(idx) = report.roots.iter().rposition(|r| r.parity() == knotforge::circle_zeros::Parity::Odd) else {
        return Err(NoPath("no odd-order zero of the Alexander polynomial on the unit circle".into()).into());
    };
    let root = report.refine_root(idx, 48);
    let (lo, hi) = root.angle_enclosure();
    Ok((lo + hi) / 4.0)
}

fn cmd_deform(
    ctx: &Ctx,
    input: &Input,
    theta0: &str,
    side: &str,
    flavor: Flavor,
    opts: &DeformOptions,
    format: Format,
) -> anyhow::Result<()> {
    let src = input.resolve()?;
    let braid = src.braid()?;
    let p = presentation(braid);
    if !p.is_knot() {
        return Err(Error::NotAKnot { components: p.components }.into());
    }
    let theta0 = if theta0.eq_ignore_ascii_case("auto") {
        auto_theta0(&to_palindromic(&alexander_from_braid(braid)?)?)?
    } else {
        theta0.parse::<Angle>()?.to_f64()
    };
    let sides = if side.eq_ignore_ascii_case("auto") { vec![Side::Upper, Side::Lower] } else { vec![side.parse()?] };
    let mut errors = Vec::new();
    let mut partial = None;
    for s in sides {
        match deform(&p, theta0, s, flavor, opts) {
            Ok(path) if !path.is_empty() => return write_path(ctx, &path, format),
            Ok(_) => errors.push(format!("{s}: empty path")),
            Err(Error::NoConvergence { step, path }) => {
                errors.push(format!("{s}: no convergence at step {step}"));
                if !path.is_empty() {
                    partial = Some(*path);
                }
            }
            Err(e @ Error::StuckReducible { .. }) => errors.push(format!("{s}: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    if let (Some(path), true) = (&partial, ctx.json) {
        write_out(&serde_json::to_string_pretty(path)?)?;
    }
    Err(NoPath(format!("no irreducible path from theta0 = {theta0}: {}", errors.join("; "))).into())
}

fn write_path(ctx: &Ctx, path: &DeformationPath, format: Format) -> anyhow::Result<()> {
    if format == Format::Csv {
        write_out(&path.to_csv())?;
        return Ok(());
    }
    emit(ctx, path, || {
        let mut s = format!(
            "{} path, side {}, theta0 = {:.12}, tau0 = {:.12}, seed {}\n",
            path.flavor, path.side, path.theta0, path.tau0, path.seed
        );
        s.push_str("tau              residual   margin\n");
        for p in &path.points {
            s.push_str(&format!("{:.12}  {:.2e}  {:.4e}\n", p.rep.tau, p.rep.residual, p.margin));
        }
        s.trim_end().to_string()
    })
}

fn cmd_batch(ctx: &Ctx, catalog_file: Option<PathBuf>, out: Option<PathBuf>) -> anyhow::Result<()> {
    let records = match &catalog_file {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            catalog::parse_catalog(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => catalog::bundled(),
    };
    let summary = catalog::run_batch(&records, ctx.exec);
    let json = serde_json::to_string_pretty(&summary)?;
    if let Some(out) = &out {
        fs::write(out, format!("{json}\n")).with_context(|| format!("writing {}", out.display()))?;
    }
    if ctx.json {
        write_out(&json)?;
    } else {
        for r in &summary.records {
            match r.summary() {
                Some(s) => write_out(&format!(
                    "{:<14} det {:>4}  sgn {:>4}  odd-order zero {:<5}  guaranteed {:<5}  {}",
                    s.name,
                    s.det.to_string(),
                    s.sgn.map(|x| x.to_string()).unwrap_or_else(|| "?".into()),
                    s.odd_order_zero,
                    s.odd_order_zero_guaranteed,
                    s.alexander
                ))?,
                None => write_out(&format!("{:<14} error", r.name()))?,
            }
        }
        for f in &summary.failures {
            write_out(&format!("FAIL {f}"))?;
        }
    }
    if !summary.is_clean() {
        return Err(PinnedMismatch(summary.failures.len()).into());
    }
    Ok(())
}
