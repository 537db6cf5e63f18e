//! `trace-lab`: deterministic front end to `tracelab-core`.
//!
//! Exit status is 0 on success, 1 when a verification fails and 2 on usage
//! errors, including inputs the library rejects.

mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use tracelab_core::ffcurve::{self, CurveField, Exp, RadiusPoint};
use tracelab_core::finite_field::{FFTower, FieldSpec};
use tracelab_core::fourier::FourierConfig;
use tracelab_core::heisenberg::{self, HeisenbergGroup, Presentation};
use tracelab_core::local_ft::{self, LocalQuotient, Mode};
use tracelab_core::selftest::{self, SelftestConfig};
use tracelab_core::slopes;
use tracelab_core::trace_datum::TraceDatum;
use tracelab_core::witt::{self, WittRing};
use tracelab_core::CycNum;

use emit::{Artifact, Table};

#[derive(Parser, Debug)]
#[command(name = "trace-lab", version, about = "Exact trace-function, Witt, Heisenberg, slope and curve-series computations")]
struct Cli {
    /// Run file of `key = value` lines; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for every randomized input; recorded in the output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the artifact here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fourier transform of a trace function on the affine line.
    Ft(FtArgs),
    /// Witt vector laws, the kernel of F − id and the trace pairing.
    Witt(WittArgs),
    /// Brute-force structure of a finite Heisenberg group.
    Heisenberg(HeisenbergArgs),
    /// Slope calculus on a direct sum of simple isocrystals.
    Slopes(SlopesArgs),
    /// Series solutions of (φ − πⁿ)x = y and sections of O(n).
    Ffcurve(FfcurveArgs),
    /// Fourier transform on a finite window of a local field.
    Localft(LocalftArgs),
    /// Runs every acceptance check.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct FtArgs {
    /// Base field as `p^n`.
    #[arg(long)]
    field: String,
    /// Level bound M.
    #[arg(long, default_value_t = 1)]
    levels: usize,
    /// Input datum (JSON). Without it a seeded random datum is used.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Transform with ψ⁻¹ instead of ψ.
    #[arg(long)]
    inverse_char: bool,
    /// Also verify inversion, orthogonality and agreement with the pipeline form.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = tracelab_core::finite_field::DEFAULT_CAPACITY)]
    capacity: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WittAction {
    Law,
    Kernel,
    Pairing,
    Report,
}

#[derive(Args, Debug)]
struct WittArgs {
    #[arg(value_enum, default_value_t = WittAction::Report)]
    action: WittAction,
    #[arg(long)]
    p: u32,
    #[arg(long)]
    n: usize,
    /// Residue field 𝔽_{p^m}.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Random samples for the ghost-component check.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 1 << 16)]
    capacity: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HeisAction {
    Report,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PresentationArg {
    Symplectic,
    Matrix,
}

#[derive(Args, Debug)]
struct HeisenbergArgs {
    #[arg(value_enum, default_value_t = HeisAction::Report)]
    action: HeisAction,
    #[arg(long)]
    q: u64,
    #[arg(long, default_value_t = 1)]
    genus: usize,
    /// Defaults to symplectic in odd characteristic and matrix otherwise.
    #[arg(long, value_enum)]
    presentation: Option<PresentationArg>,
    #[arg(long, default_value_t = heisenberg::DEFAULT_CAPACITY)]
    capacity: u64,
}

#[derive(Args, Debug)]
struct SlopesArgs {
    /// e.g. `O(1/2) (x) O(1/2) (+) dual(O(1))`
    #[arg(long)]
    expr: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CurveAction {
    Solve,
    H0,
    Negative,
    Kappa,
}

#[derive(Args, Debug)]
struct FfcurveArgs {
    #[arg(value_enum, default_value_t = CurveAction::Solve)]
    action: CurveAction,
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// Twist n of O(n); negative for `negative`.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    n: i64,
    /// Target series, e.g. `t + t*pi + w*t^(1/2)*pi^-1`.
    #[arg(long)]
    target: Option<String>,
    /// Check this preimage instead of computing one.
    #[arg(long)]
    candidate: Option<String>,
    /// π-precision I.
    #[arg(long, default_value_t = selftest::CURVE_PI_PREC)]
    prec: i64,
    /// t-precision T.
    #[arg(long, default_value_t = selftest::CURVE_T_PREC)]
    t_prec: i128,
    /// Exponent denominators stay below p^D.
    #[arg(long, default_value_t = ffcurve::DEFAULT_DENOM_BUDGET)]
    denom_budget: u32,
    /// Window for the negative-twist search.
    #[arg(long, default_value_t = 6)]
    window: usize,
    /// Radius point `a,b` with a = −log|t| and b = −log|π|, as rationals.
    #[arg(long)]
    radius: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LocalAction {
    Selftest,
    Transform,
    Metadata,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Equal,
    Mixed,
}

#[derive(Args, Debug)]
struct LocalftArgs {
    #[arg(value_enum, default_value_t = LocalAction::Selftest)]
    action: LocalAction,
    #[arg(long)]
    q: u64,
    /// `N,M` for π^{−N}O/π^M O.
    #[arg(long, default_value = "1,1")]
    window: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Equal)]
    mode: ModeArg,
    /// JSON array of values for `transform`; seeded random integers otherwise.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = local_ft::DEFAULT_CAPACITY)]
    capacity: u64,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Fewer random samples per case; every case is still visited.
    #[arg(long)]
    quick: bool,
}

/// Bad input, as opposed to a failed verification.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.into())
    }
}

type Run<T> = Result<T, Usage>;

fn main() -> ExitCode {
    let cmd = Cli::command();
    let argv = match config::merge(std::env::args_os().collect(), &cmd) {
        Ok(a) => a,
        Err(e) => e.exit(),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match execute(&cli) {
        Ok(art) => match write(&cli, &art) {
            Ok(()) if art.passed => ExitCode::SUCCESS,
            Ok(()) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn write(cli: &Cli, art: &Artifact) -> anyhow::Result<()> {
    let text = match cli.format {
        Format::Json => art.to_json(),
        Format::Csv => art.to_csv()?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Run<Artifact> {
    let seed = cli.seed;
    match &cli.command {
        Command::Ft(a) => ft(a, seed),
        Command::Witt(a) => witt_cmd(a, seed),
        Command::Heisenberg(a) => heisenberg_cmd(a, seed),
        Command::Slopes(a) => slopes_cmd(a, seed),
        Command::Ffcurve(a) => ffcurve_cmd(a, seed),
        Command::Localft(a) => localft(a, seed),
        Command::Selftest(a) => {
            let report = selftest::run(&SelftestConfig { seed, quick: a.quick });
            let passed = report.passed;
            Ok(Artifact::new("selftest", seed, passed, serde_json::to_value(&report)?))
        }
    }
}

fn read_json(path: &PathBuf) -> Run<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?)
}

// ------------------------------------------------------------------- ft

fn ft(a: &FtArgs, seed: u64) -> Run<Artifact> {
    let spec = FieldSpec::parse(&a.field)?;
    let tower = Arc::new(FFTower::with_capacity(spec, a.levels, a.capacity)?);
    let f = match &a.input {
        Some(path) => {
            let v = read_json(path)?;
            // a previous artifact can be fed back in directly
            let datum = v.pointer("/result/datum").unwrap_or(&v);
            TraceDatum::from_json(tower.clone(), datum)?
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            TraceDatum::random(tower.clone(), 1, a.levels, &mut rng)?
        }
    };
    let base = FourierConfig::standard(tower, f.max_level())?;
    let cfg = if a.inverse_char { base.inverse_char() } else { base };
    let out = cfg.ft(&f)?;

    let mut checks = Vec::new();
    if a.check {
        checks.push(cfg.inversion_check(&f)?);
        checks.push(cfg.orthogonality_check()?);
        checks.push(cfg.pipeline_check(&f)?);
    }
    let passed = checks.iter().all(|c| c.passed);
    let result = json!({
        "field": spec.to_string(),
        "levels": f.max_level(),
        "inverse_char": a.inverse_char,
        "input": if a.input.is_some() { "file" } else { "random" },
        "datum": out.to_json()?,
        "checks": checks,
    });
    let table = csv_table(&out.to_csv()?)?;
    Ok(Artifact::new("ft", seed, passed, result).with_table(table))
}

fn csv_table(text: &str) -> Run<Table> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<Result<_, _>>()?;
    Ok(Table { header, rows })
}

// ----------------------------------------------------------------- witt

fn witt_cmd(a: &WittArgs, seed: u64) -> Run<Artifact> {
    let mut result = serde_json::Map::new();
    let mut passed = true;
    if matches!(a.action, WittAction::Law | WittAction::Report) {
        let law = witt::law(a.p, a.n)?;
        let symbolic = law.verify_symbolic();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<(Vec<i64>, Vec<i64>)> = (0..a.samples)
            .map(|_| {
                let mut v = || (0..a.n).map(|_| rand::Rng::gen_range(&mut rng, -20i64..=20)).collect::<Vec<_>>();
                (v(), v())
            })
            .collect();
        let ghost = witt::ghost_oracle_check(&law, &samples);
        let terms = |k| law.polys(k).iter().map(|p| p.len()).collect::<Vec<_>>();
        passed &= symbolic.is_ok() && ghost;
        result.insert(
            "law".into(),
            json!({
                "p": a.p,
                "n": a.n,
                "sum_terms": terms(witt::LawKind::Sum),
                "prod_terms": terms(witt::LawKind::Prod),
                "symbolic": symbolic.is_ok(),
                "ghost_samples": a.samples,
                "ghost": ghost,
            }),
        );
    }
    if matches!(a.action, WittAction::Kernel | WittAction::Pairing | WittAction::Report) {
        let ring = WittRing::new(a.p, a.n, a.m)?;
        if matches!(a.action, WittAction::Kernel | WittAction::Report) {
            let k = ring.as_witt_kernel(a.capacity)?;
            passed &= k.passed;
            result.insert("kernel".into(), serde_json::to_value(k)?);
        }
        if matches!(a.action, WittAction::Pairing | WittAction::Report) {
            let pr = ring.pairing_report(a.capacity)?;
            passed &= pr.passed;
            result.insert("pairing".into(), serde_json::to_value(pr)?);
        }
    }
    Ok(Artifact::new("witt", seed, passed, Value::Object(result)))
}

// ----------------------------------------------------------- heisenberg

fn heisenberg_cmd(a: &HeisenbergArgs, seed: u64) -> Run<Artifact> {
    let pres = match a.presentation {
        Some(PresentationArg::Symplectic) => Presentation::Symplectic,
        Some(PresentationArg::Matrix) => Presentation::Matrix,
        None => heisenberg::default_presentation(a.q),
    };
    let HeisAction::Report = a.action;
    let rep = HeisenbergGroup::new(a.q, a.genus, pres)?.report(a.capacity)?;
    Ok(Artifact::new("heisenberg", seed, rep.passed, serde_json::to_value(&rep)?))
}

// --------------------------------------------------------------- slopes

fn slopes_cmd(a: &SlopesArgs, seed: u64) -> Run<Artifact> {
    let iso = slopes::parse_expr(&a.expr)?;
    let report = iso.report();
    let concave = slopes::is_concave(&iso.hn_polygon());
    let mut result = serde_json::to_value(&report)?;
    if let Value::Object(m) = &mut result {
        m.insert("expr".into(), json!(a.expr));
        m.insert("normal_form".into(), json!(iso.to_string()));
        m.insert("hn_concave".into(), json!(concave));
    }
    Ok(Artifact::new("slopes", seed, concave, result))
}

// -------------------------------------------------------------- ffcurve

fn ffcurve_cmd(a: &FfcurveArgs, seed: u64) -> Run<Artifact> {
    let cf = CurveField::new(a.q, a.denom_budget)?;
    let (passed, result) = match a.action {
        CurveAction::Solve => {
            let text = a.target.as_deref().ok_or_else(|| anyhow!("solve needs --target"))?;
            let target = cf.parse(text)?;
            let t_prec = Exp::from_integer(a.t_prec);
            if let Some(c) = &a.candidate {
                let x = cf.parse(c)?;
                let ok = cf.check_solution(&x, &target, a.n, a.prec, t_prec)?;
                let result = json!({
                    "q": a.q,
                    "n": a.n,
                    "pi_prec": a.prec,
                    "t_prec": a.t_prec,
                    "target": cf.to_wire(&target),
                    "candidate": cf.to_wire(&x),
                    "verified": ok,
                });
                return Ok(Artifact::new("ffcurve", seed, ok, result));
            }
            let sol = cf.solve_phi_pi(&target, a.n, a.prec, t_prec)?;
            let ok = cf.check_solution(&sol.preimage, &target, a.n, a.prec, t_prec)?;
            let result = json!({
                "q": a.q,
                "n": a.n,
                "pi_prec": a.prec,
                "t_prec": a.t_prec,
                "target": cf.to_wire(&target),
                "preimage": cf.to_wire(&sol.preimage),
                "preimage_text": cf.display(&sol.preimage).to_string(),
                "g_terms": sol.g_terms,
                "g_prime_terms": sol.g_prime_terms,
                "verified": ok,
            });
            (ok, result)
        }
        CurveAction::H0 => {
            let rep = cf.h0_report(a.n, a.prec)?;
            (rep.passed, serde_json::to_value(&rep)?)
        }
        CurveAction::Negative => {
            let rep = cf.h0_negative_check(a.n, a.window)?;
            (rep.passed, serde_json::to_value(&rep)?)
        }
        CurveAction::Kappa => {
            let text = a.radius.as_deref().ok_or_else(|| anyhow!("kappa needs --radius a,b"))?;
            let (ta, tb) = text.split_once(',').ok_or_else(|| anyhow!("--radius expects a,b"))?;
            let (ra, rb) = (slopes::parse_ratio(ta.trim())?, slopes::parse_ratio(tb.trim())?);
            let x = RadiusPoint::new(ra, rb)?;
            let k = ffcurve::kappa(&x);
            let k_phi = ffcurve::kappa(&x.phi(a.q));
            let ratio = k_phi / k;
            let ok = ratio.is_integer() && ratio.to_integer() == a.q as i64;
            let result = json!({
                "q": a.q,
                "kappa": slopes::fmt_ratio(k),
                "kappa_after_phi": slopes::fmt_ratio(k_phi),
                "scaled_by_q": ok,
            });
            (ok, result)
        }
    };
    Ok(Artifact::new("ffcurve", seed, passed, result))
}

// -------------------------------------------------------------- localft

fn parse_window(s: &str) -> Run<(u32, u32)> {
    let (n, m) = s.split_once(',').ok_or_else(|| anyhow!("--window expects N,M"))?;
    Ok((n.trim().parse()?, m.trim().parse()?))
}

fn localft(a: &LocalftArgs, seed: u64) -> Run<Artifact> {
    let (n, m) = parse_window(&a.window)?;
    let mode = match a.mode {
        ModeArg::Equal => Mode::EqualChar,
        ModeArg::Mixed => Mode::MixedChar,
    };
    let g = LocalQuotient::with_capacity(a.q, n, m, mode, a.capacity)?;
    let meta = serde_json::to_value(g.metadata())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let art = match a.action {
        LocalAction::Metadata => Artifact::new("localft", seed, true, json!({ "metadata": meta })),
        LocalAction::Selftest => {
            let f = g.random(&mut rng, 3);
            let double = g.double_transform_check(&f)?;
            let plancherel = g.plancherel_check(&f)?;
            let duality = g.duality_report();
            let passed = double && plancherel && duality.passed;
            let result = json!({
                "metadata": meta,
                "double_transform": double,
                "plancherel": plancherel,
                "duality": duality,
            });
            Artifact::new("localft", seed, passed, result)
        }
        LocalAction::Transform => {
            let f = match &a.input {
                Some(path) => {
                    let values: Vec<CycNum> = serde_json::from_value(read_json(path)?)?;
                    if values.len() as u64 != g.size() {
                        return Err(anyhow!("input must hold exactly {} values", g.size()).into());
                    }
                    let mut it = values.into_iter();
                    g.from_fn(|_| it.next().expect("length checked"))?
                }
                None => g.random(&mut rng, 3),
            };
            let out = g.local_ft(&f)?;
            let rows = g
                .elements()
                .map(|x| {
                    let digits = g.digits(x).iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ");
                    vec![x.to_string(), digits, f.value(x).to_string(), out.value(x).to_string()]
                })
                .collect();
            let result = json!({
                "metadata": meta,
                "input": f.values(),
                "transform": out.values(),
            });
            let header = ["element", "digits", "value", "transform"].map(String::from).to_vec();
            Artifact::new("localft", seed, true, result).with_table(Table { header, rows })
        }
    };
    Ok(art)
}
