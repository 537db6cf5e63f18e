//! The acceptance suite as plain functions, shared by the CLI and the test harness.
//!
//! Every criterion draws its randomness from its own ChaCha stream of one
//! seed, so criteria can run alone or together with identical results.
//! Reports contain no timings and serialize deterministically.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith;
use crate::error::Result;
use crate::ffcurve::{self, CurveField, Exp, RadiusPoint};
use crate::finite_field::{FFTower, FieldSpec};
use crate::fourier::FourierConfig;
use crate::heisenberg::{self, HeisenbergGroup};
use crate::local_ft::{LocalQuotient, Mode};
use crate::slopes::{self, Isocrystal};
use crate::trace_datum::{self, TraceDatum};
use crate::witt::{self, WittRing};

pub const SCHEMA: &str = "trace-lab/1";

/// Fields for the Fourier criteria.
pub const FOURIER_FIELDS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

/// Bound on `|G|` for the local transform sweep.
pub const LOCAL_FT_BOUND: u64 = 1 << 10;

/// Bound on `|W_n(𝔽_{p^m})|` for the Witt kernel and pairing sweep.
pub const WITT_BOUND: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Fewer random samples per case; the case grid is unchanged.
    pub quick: bool,
}

impl SelftestConfig {
    pub fn new(seed: u64) -> Self {
        SelftestConfig { seed, quick: false }
    }

    fn rng(&self, id: u8) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id as u64);
        rng
    }

    fn samples(&self, full: usize) -> usize {
        if self.quick {
            full.div_ceil(5)
        } else {
            full
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: Vec<String>,
}

impl CriterionResult {
    fn new(id: u8, name: &str) -> Self {
        CriterionResult {
            id,
            name: name.to_string(),
            passed: true,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.passed = false;
            // keep reports small; the first few failures identify the case
            if self.failures.len() < 8 {
                self.failures.push(what());
            }
        }
    }

    fn record_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, what),
            Err(e) => self.record(false, || format!("{}: {e}", what())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub schema: &'static str,
    pub seed: u64,
    pub quick: bool,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl SelftestReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Criteria 1 to 10 in order.
pub fn run_checks(cfg: &SelftestConfig) -> Vec<CriterionResult> {
    vec![
        fourier_inversion(cfg),
        orthogonality(cfg),
        pipeline_agreement(cfg),
        artin_schreier(cfg),
        witt_laws(cfg),
        heisenberg_structure(cfg),
        slope_calculus(cfg),
        curve_operators(cfg),
        kappa_scaling(cfg),
        local_ft_shadow(cfg),
    ]
}

/// All eleven criteria; the last reruns the first ten and compares bytes.
pub fn run(cfg: &SelftestConfig) -> SelftestReport {
    let first = run_checks(cfg);
    let mut criteria = first.clone();
    criteria.push(determinism_from(cfg, &first));
    SelftestReport {
        schema: SCHEMA,
        seed: cfg.seed,
        quick: cfg.quick,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

fn determinism_from(cfg: &SelftestConfig, first: &[CriterionResult]) -> CriterionResult {
    let mut out = CriterionResult::new(11, "determinism");
    let a = serde_json::to_vec(first).expect("serializes");
    let b = serde_json::to_vec(&run_checks(cfg)).expect("serializes");
    out.record(a == b, || "rerun with the same seed produced different bytes".into());
    out
}

fn tower(q: u64, levels: usize) -> Result<Arc<FFTower>> {
    Ok(Arc::new(FFTower::new(FieldSpec::from_order(q)?, levels)?))
}

/// Largest `m ≤ cap` with `q^m ≤ bound`.
fn max_level(q: u64, cap: usize, bound: u64) -> usize {
    (1..=cap).take_while(|&m| q.pow(m as u32) <= bound).last().unwrap_or(0)
}

// ---------------------------------------------------------------- 1 to 4

/// `ft_{ψ⁻¹}(ft_ψ(f)) = q^m·f` for 25 random data per field.
pub fn fourier_inversion(cfg: &SelftestConfig) -> CriterionResult {
    let mut out = CriterionResult::new(1, "fourier inversion");
    let mut rng = cfg.rng(1);
    for q in FOURIER_FIELDS {
        let m = max_level(q, 2, 81);
        let setup = tower(q, m).and_then(|t| Ok((t.clone(), FourierConfig::standard(t, m)?)));
        let (t, ft) = match setup {
            Ok(s) => s,
            Err(e) => {
                out.record(false, || format!("q={q}: {e}"));
                continue;
            }
        };
        for k in 0..cfg.samples(25) {
            let r = TraceDatum::random(t.clone(), 1, m, &mut rng)
                .and_then(|f| ft.inversion_check(&f))
                .map(|rep| rep.passed);
            out.record_result(r, || format!("q={q} sample={k}"));
        }
    }
    out
}

/// `ft(1) = −q^m·δ₀`.
pub fn orthogonality(_cfg: &SelftestConfig) -> CriterionResult {
    let mut out = CriterionResult::new(2, "orthogonality");
    for q in FOURIER_FIELDS {
        let m = max_level(q, 2, 81);
        let r = tower(q, m)
            .and_then(|t| FourierConfig::standard(t, m))
            .and_then(|ft| ft.orthogonality_check())
            .map(|rep| rep.passed);
        out.record_result(r, || format!("q={q}"));
    }
    out
}

/// The kernel route and the direct sum agree on 10 inputs per field.
pub fn pipeline_agreement(cfg: &SelftestConfig) -> CriterionResult {
    let mut out = CriterionResult::new(3, "kernel pipeline agreement");
    let mut rng = cfg.rng(3);
    for q in [2u64, 3, 4, 5] {
        let m = 2;
        let setup = tower(q, m).and_then(|t| Ok((t.clone(), FourierConfig::standard(t, m)?)));
        let Ok((t, ft)) = setup else {
            out.record(false, || format!("q={q}: setup failed"));
            continue;
        };
        for k in 0..cfg.samples(10) {
            let r = TraceDatum::random(t.clone(), 1, m, &mut rng)
                .and_then(|f| ft.pipeline_check(&f))
                .map(|rep| rep.passed);
            out.record_result(r, || format!("q={q} sample={k}"));
        }
    }
    out
}

/// Fiber counts of `y ↦ y^q − y` against character sums, every `t`.
pub fn artin_schreier(_cfg: &SelftestConfig) -> CriterionResult {
    let mut out = CriterionResult::new(4, "artin-schreier decomposition");
    for q in [2u64, 3, 4, 5] {
        let top = max_level(q, 3, 125);
        let Ok(t) = tower(q, top) else {
            out.record(false, || format!("q={q}: setup failed"));
            continue;
        };
        for m in 1..=top {
            let r = trace_datum::artin_schreier_identity_check(&t, m).map(|rep| rep.passed);
            out.record_result(r, || format!("q={q} m={m}"));
        }
    }
    out
}

// -------------------------------------------------------------------- 5

/// `(p, n_max)` pairs for the Witt laws.
pub const WITT_RANGE: [(u32, usize); 3] = [(2, 4), (3, 3), (5, 2)];

pub fn witt_laws(cfg: &SelftestConfig) -> CriterionResult {
    let mut out = CriterionResult::new(5, "witt laws, kernel and pairing");
    let mut rng = cfg.rng(5);
    for (p, nmax) in WITT_RANGE {
        for n in 1..=nmax {
            let law = match witt::law(p, n) {
                Ok(l) => l,
                Err(e) => {
                    out.record(false, || format!("law p={p} n={n}: {e}"));
                    continue;
                }
            };
            out.record(law.verify_symbolic().is_ok(), || format!("symbolic p={p} n={n}"));
            let samples: Vec<(Vec<i64>, Vec<i64>)> = (0..cfg.samples(20))
                .map(|_| {
                    let mut v = || (0..n).map(|_| rng.gen_range(-20i64..=20)).collect::<Vec<_>>();
                    (v(), v())
                })
                .collect();
            out.record(witt::ghost_oracle_check(&law, &samples), || format!("ghost p={p} n={n}"));
            // W_n(𝔽_{p^m}) has p^{nm} elements
            for m in 1.. {
                let Some(size) = arith::checked_pow(p as u64, (n * m) as u32, "witt").ok().filter(|&s| s <= WITT_BOUND) else {
                    break;
                };
                let _ = size;
                let r = WittRing::new(p, n, m).and_then(|ring| {
                    let k = ring.as_witt_kernel(WITT_BOUND)?;
                    let pr = ring.pairing_report(WITT_BOUND)?;
                    Ok(k.passed && pr.passed)
                });
                out.record_result(r, || format!("kernel/pairing p={p} n={n} m={m}"));
            }
        }
    }
    out
}

// -------------------------------------------------------------------- 6

pub const HEISENBERG_CASES: [(u64, usize); 5] = [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)];

pub fn heisenberg_structure(_cfg: &SelftestConfig) -> CriterionResult {
    let mut out = CriterionResult::new(6, "heisenberg structure");
    for (q, g) in HEISENBERG_CASES {
        let r = HeisenbergGroup::new(q, g, heisenberg::default_presentation(q))
            .and_then(|h| h.report(heisenberg::DEFAULT_CAPACITY))
            .map(|rep| {
                rep.passed
                    && rep.center == q
                    && rep.char_count == q.pow(2 * g as u32)
                    && (g != 1 || rep.class_count == q * q + q - 1)
            });
        out.record_result(r, || format!("q={q} g={g}"));
    }
    out
}

// -------------------------------------------------------------------- 7

/// A random expression together with its rank and degree, tracked independently.
pub fn random_slope_expr(rng: &mut impl Rng, depth: u32) -> (String, i64, i64) {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        let r = rng.gen_range(1i64..=4);
        let s = rng.gen_range(-4i64..=4);
        let g = num_integer::gcd(s, r);
        let (s, r) = (s / g, r / g);
        return (format!("O({s}/{r})"), r, s);
    }
    match rng.gen_range(0..3) {
        0 => {
            let (a, ra, da) = random_slope_expr(rng, depth - 1);
            let (b, rb, db) = random_slope_expr(rng, depth - 1);
            (format!("({a} (+) {b})"), ra + rb, da + db)
        }
        1 => {
            let (a, ra, da) = random_slope_expr(rng, depth - 1);
            let (b, rb, db) = random_slope_expr(rng, depth - 1);
            (format!("({a} (x) {b})"), ra * rb, da * rb + db * ra)
        }
        _ => {
            let (a, ra, da) = random_slope_expr(rng, depth - 1);
            (format!("dual({a})"), ra, -da)
        }
    }
}

pub fn slope_calculus(cfg: &SelftestConfig) -> CriterionResult {
    let mut out = CriterionResult::new(7, "slope calculus");
    let mut rng = cfg.rng(7);
    for k in 0..cfg.samples(200) {
        let (text, rank, deg) = random_slope_expr(&mut rng, 3);
        let (other, _, _) = random_slope_expr(&mut rng, 2);
        let r = (|| -> Result<bool> {
            let e = slopes::parse_expr(&text)?;
            let f = slopes::parse_expr(&other)?;
            let additive = e.rank() == rank
                && e.deg() == deg
                && e.direct_sum(&f).rank() == e.rank() + f.rank()
                && e.direct_sum(&f).deg() == e.deg() + f.deg();
            let ef = e.tensor(&f);
            let bilinear = ef.rank() == e.rank() * f.rank()
                && ef.deg() == e.deg() * f.rank() + f.deg() * e.rank()
                && e.direct_sum(&f).tensor(&f) == ef.direct_sum(&f.tensor(&f));
            let dual = e.dual().dual() == e && e.dual().deg() == -e.deg();
            let hn = e.hn_polygon();
            let concave = slopes::is_concave(&hn)
                && hn.last().copied().unwrap_or((0, 0)) == (e.rank(), e.deg());
            let predicates = e.predicates().iter().zip(e.pieces()).all(|(pr, pc)| {
                let d = pc.simple_degree();
                pr.h0_vanishes == (d < 0) && pr.h1_vanishes == (d > 0) && pr.h0_is_e == (d == 0)
            });
            Ok(additive && bilinear && dual && concave && predicates)
        })();
        out.record_result(r, || format!("sample={k} expr={text}"));
    }
    let half = slopes::parse_expr("O(1/2) (x) O(1/2)");
    let want = Isocrystal::from_pieces([(Ratio::from_integer(1), 4)]);
    out.record(half.map(|h| h == want).unwrap_or(false), || "O(1/2) (x) O(1/2)".into());
    out
}

// -------------------------------------------------------------------- 8

pub const CURVE_PI_PREC: i64 = 8;
pub const CURVE_T_PREC: i128 = 64;

/// A random finite target with π-degrees in `−3..=3`.
pub fn random_curve_target(cf: &CurveField, rng: &mut impl Rng) -> Result<ffcurve::LaurentApprox> {
    let q = cf.q() as i128;
    let exps = [
        Exp::from_integer(0),
        Exp::from_integer(1),
        Exp::from_integer(2),
        Exp::new(1, q),
        Exp::new(1, q * q),
        Exp::new(3, q),
    ];
    let count = rng.gen_range(1..=4);
    let field = cf.field().clone();
    let monos: Vec<_> = (0..count)
        .map(|_| {
            let i = rng.gen_range(-3i64..=3);
            let a = exps[rng.gen_range(0..exps.len())];
            let c = field.elem(1, rng.gen_range(1..field.q())).expect("nonzero index");
            (i, a, c)
        })
        .collect();
    cf.exact(monos)
}

pub fn curve_operators(cfg: &SelftestConfig) -> CriterionResult {
    let mut out = CriterionResult::new(8, "curve operators");
    let mut rng = cfg.rng(8);
    let tprec = Exp::from_integer(CURVE_T_PREC);
    for q in [2u64, 3] {
        let cf = match CurveField::new(q, ffcurve::DEFAULT_DENOM_BUDGET) {
            Ok(c) => c,
            Err(e) => {
                out.record(false, || format!("q={q}: {e}"));
                continue;
            }
        };
        for n in 1..=3i64 {
            for k in 0..cfg.samples(20) {
                let r = random_curve_target(&cf, &mut rng).and_then(|target| {
                    let sol = cf.solve_phi_pi(&target, n, CURVE_PI_PREC, tprec)?;
                    cf.check_solution(&sol.preimage, &target, n, CURVE_PI_PREC, tprec)
                });
                out.record_result(r, || format!("solve q={q} n={n} target={k}"));
            }
            let r = cf
                .h0_report(n, CURVE_PI_PREC)
                .map(|rep| rep.passed && rep.free_coefficients == n as usize);
            out.record_result(r, || format!("h0 q={q} n={n}"));
        }
        for n in [-1i64, -2] {
            let r = cf.h0_negative_check(n, 6).map(|rep| rep.passed);
            out.record_result(r, || format!("h0 q={q} n={n}"));
        }
    }
    out
}

// -------------------------------------------------------------------- 9

pub fn kappa_scaling(cfg: &SelftestConfig) -> CriterionResult {
    let mut out = CriterionResult::new(9, "kappa scaling");
    let mut rng = cfg.rng(9);
    for k in 0..cfg.samples(100) {
        let q = FOURIER_FIELDS[rng.gen_range(0..FOURIER_FIELDS.len())];
        let a = Ratio::new(rng.gen_range(1i64..=1000), rng.gen_range(1i64..=1000));
        let b = Ratio::new(rng.gen_range(1i64..=1000), rng.gen_range(1i64..=1000));
        let r = RadiusPoint::new(a, b).map(|x| {
            let lhs = ffcurve::kappa(&x.phi(q));
            // q·a·b⁻¹ by cross-multiplication, outside the Ratio type
            let num = BigInt::from(q) * a.numer() * b.denom();
            let den = BigInt::from(*a.denom()) * b.numer();
            BigInt::from(*lhs.numer()) * &den == BigInt::from(*lhs.denom()) * &num
        });
        out.record_result(r, || format!("point={k} a={a} b={b} q={q}"));
    }
    out
}

// ------------------------------------------------------------------- 10

/// Every `(q, N, M)` with `q^{N+M}` at most the bound, for the given residue cardinalities.
pub fn local_ft_cases(qs: impl IntoIterator<Item = u64>, bound: u64) -> Vec<(u64, u32, u32)> {
    let mut cases = Vec::new();
    for q in qs {
        let mut k = 0u32;
        while q.checked_pow(k).is_some_and(|s| s <= bound) {
            for n in 0..=k {
                cases.push((q, n, k - n));
            }
            k += 1;
        }
    }
    cases
}

/// Largest residue cardinality whose double transform runs on a dense random input;
/// this covers every `q` admitting a window of size two.
pub const LOCAL_FT_DENSE_MAX_Q: u64 = 32;

pub fn local_ft_shadow(cfg: &SelftestConfig) -> CriterionResult {
    let mut out = CriterionResult::new(10, "local fourier shadow");
    let mut rng = cfg.rng(10);
    let qs = (2..=LOCAL_FT_BOUND).filter(|&q| arith::prime_power(q).is_some());
    for (q, n, m) in local_ft_cases(qs, LOCAL_FT_BOUND) {
        let prime = arith::is_prime(q);
        for mode in [Mode::EqualChar, Mode::MixedChar] {
            if mode == Mode::MixedChar && !prime {
                continue;
            }
            let r = LocalQuotient::new(q, n, m, mode).and_then(|g| {
                // dense inputs cost |G|²·ord, so large residue fields get sparse ones
                let f = if q <= LOCAL_FT_DENSE_MAX_Q {
                    g.random(&mut rng, 3)
                } else {
                    g.random_sparse(&mut rng, 4, 3)
                };
                Ok(g.double_transform_check(&f)? && g.duality_report().passed)
            });
            out.record_result(r, || format!("q={q} N={n} M={m} mode={mode:?}"));
        }
    }
    out
}
