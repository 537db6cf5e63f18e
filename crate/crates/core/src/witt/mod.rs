//! Truncated p-typical Witt vectors `W_n(𝔽_{p^m})`.
//!
//! The universal sum, difference and product polynomials are solved from
//! the ghost equations over ℚ, checked for integrality and re-verified
//! symbolically, then reduced mod `p` for evaluation. Laws are shared
//! process-wide through a single-flight registry and optionally cached on
//! disk under `$TRACELAB_CACHE`.

pub mod mpoly;

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::{FFElem, FFTower, FieldSpec};
use mpoly::MPoly;

/// Environment variable naming the law cache directory.
pub const CACHE_ENV: &str = "TRACELAB_CACHE";

/// Ghost components `w_k = Σ_{i≤k} p^i x_i^{p^{k−i}}` of an integer Witt vector.
pub fn ghost(p: u32, x: &[BigInt]) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    (0..x.len())
        .map(|k| {
            (0..=k)
                .map(|i| {
                    num_traits::pow(pb.clone(), i)
                        * num_traits::pow(x[i].clone(), (p as usize).pow((k - i) as u32))
                })
                .sum()
        })
        .collect()
}

/// Integer components of the Witt vector whose ghost components are all `value`.
///
/// This is the image of `value` under `ℤ → W(ℤ)`; reducing mod `p` gives
/// the image in `W_n(𝔽_p) ≅ ℤ/pⁿ`.
pub fn integer_components(p: u32, n: usize, value: &BigInt) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    let mut comps: Vec<BigInt> = Vec::with_capacity(n);
    for k in 0..n {
        let mut rest = value.clone();
        for (i, c) in comps.iter().enumerate() {
            rest -= num_traits::pow(pb.clone(), i) * num_traits::pow(c.clone(), (p as usize).pow((k - i) as u32));
        }
        let scale = num_traits::pow(pb.clone(), k);
        debug_assert!((&rest % &scale).is_zero());
        comps.push(rest / scale);
    }
    comps
}

type ReducedPoly = Vec<(u32, Vec<u32>)>;

/// Universal laws for `W_n` at the prime `p`, in variables `x_0..x_{n-1}, y_0..y_{n-1}`.
#[derive(Debug)]
pub struct WittLaw {
    p: u32,
    n: usize,
    sum: Vec<MPoly>,
    diff: Vec<MPoly>,
    prod: Vec<MPoly>,
    sum_mod: Vec<ReducedPoly>,
    diff_mod: Vec<ReducedPoly>,
    prod_mod: Vec<ReducedPoly>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    Sum,
    Diff,
    Prod,
}

impl WittLaw {
    /// Solves and verifies the laws from scratch.
    pub fn build(p: u32, n: usize) -> Result<Self> {
        if !crate::arith::is_prime(p as u64) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::domain("Witt length must be positive"));
        }
        let sum = solve(p, n, LawKind::Sum)?;
        let diff = solve(p, n, LawKind::Diff)?;
        let prod = solve(p, n, LawKind::Prod)?;
        let law = Self::from_polys(p, n, sum, diff, prod)?;
        law.verify_symbolic()?;
        Ok(law)
    }

    fn from_polys(p: u32, n: usize, sum: Vec<MPoly>, diff: Vec<MPoly>, prod: Vec<MPoly>) -> Result<Self> {
        for (name, polys) in [("sum", &sum), ("difference", &diff), ("product", &prod)] {
            if polys.len() != n {
                return Err(Error::parse(format!("{name} law has the wrong length")));
            }
            if let Some(k) = polys.iter().position(|f| !f.is_integral()) {
                return Err(Error::Arithmetic(format!(
                    "{name} polynomial {k} for p={p} has non-integral coefficients"
                )));
            }
        }
        let red = |v: &Vec<MPoly>| v.iter().map(|f| f.reduce_mod(p)).collect();
        Ok(WittLaw {
            p,
            n,
            sum_mod: red(&sum),
            diff_mod: red(&diff),
            prod_mod: red(&prod),
            sum,
            diff,
            prod,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn polys(&self, kind: LawKind) -> &[MPoly] {
        match kind {
            LawKind::Sum => &self.sum,
            LawKind::Diff => &self.diff,
            LawKind::Prod => &self.prod,
        }
    }

    /// Ghost of each law equals the corresponding ghost operation, as polynomials over ℚ.
    pub fn verify_symbolic(&self) -> Result<()> {
        let nv = 2 * self.n;
        let xs: Vec<MPoly> = (0..self.n).map(|i| MPoly::var(nv, i)).collect();
        let ys: Vec<MPoly> = (0..self.n).map(|i| MPoly::var(nv, self.n + i)).collect();
        let gx = ghost_polys(self.p, nv, &xs);
        let gy = ghost_polys(self.p, nv, &ys);
        for kind in [LawKind::Sum, LawKind::Diff, LawKind::Prod] {
            let lhs = ghost_polys(self.p, nv, self.polys(kind));
            for k in 0..self.n {
                let rhs = combine(kind, &gx[k], &gy[k]);
                if lhs[k] != rhs {
                    return Err(Error::Arithmetic(format!(
                        "{kind:?} law fails the ghost identity in component {k}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Evaluates a law on integer vectors (test oracle mode).
    pub fn eval_int(&self, kind: LawKind, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let args: Vec<BigInt> = x.iter().chain(y).cloned().collect();
        self.polys(kind)
            .iter()
            .map(|f| f.eval_int(&args).to_integer())
            .collect()
    }

    fn eval_mod(&self, kind: LawKind, tower: &FFTower, x: &[FFElem], y: &[FFElem]) -> Vec<FFElem> {
        let polys = match kind {
            LawKind::Sum => &self.sum_mod,
            LawKind::Diff => &self.diff_mod,
            LawKind::Prod => &self.prod_mod,
        };
        let level = x[0].level();
        let args: Vec<FFElem> = x.iter().chain(y).copied().collect();
        polys
            .iter()
            .map(|f| {
                let mut acc = tower.zero(level);
                for (c, e) in f {
                    let mut m = tower.from_int(level, *c as i64);
                    for (&a, &k) in args.iter().zip(e) {
                        if k > 0 {
                            if tower.is_zero(a) {
                                m = a;
                                break;
                            }
                            m = tower.mul(m, tower.pow(a, k as i128).expect("k > 0"));
                        }
                    }
                    acc = tower.add(acc, m);
                }
                acc
            })
            .collect()
    }

    fn to_wire(&self) -> LawWire {
        let enc = |v: &Vec<MPoly>| {
            v.iter()
                .map(|f| {
                    f.terms()
                        .map(|(e, c)| MonomialWire {
                            exp: e.clone(),
                            coeff: serde_json::Number::from_string_unchecked(c.to_integer().to_string()),
                        })
                        .collect()
                })
                .collect()
        };
        LawWire {
            p: self.p,
            n: self.n,
            sum: enc(&self.sum),
            diff: enc(&self.diff),
            prod: enc(&self.prod),
        }
    }

    fn from_wire(w: LawWire) -> Result<Self> {
        let nv = 2 * w.n;
        let dec = |v: Vec<Vec<MonomialWire>>| -> Result<Vec<MPoly>> {
            v.into_iter()
                .map(|terms| {
                    let terms = terms
                        .into_iter()
                        .map(|m| {
                            if m.exp.len() != nv {
                                return Err(Error::parse("monomial with the wrong arity"));
                            }
                            let c: BigInt = m
                                .coeff
                                .to_string()
                                .parse()
                                .map_err(|_| Error::parse("non-integer law coefficient"))?;
                            Ok((m.exp, BigRational::from_integer(c)))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(MPoly::from_terms(nv, terms))
                })
                .collect()
        };
        let (sum, diff, prod) = (dec(w.sum)?, dec(w.diff)?, dec(w.prod)?);
        Self::from_polys(w.p, w.n, sum, diff, prod)
    }

    /// JSON form used by the cache: one monomial list per component and law.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_wire())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let law = Self::from_wire(serde_json::from_str(s)?)?;
        law.verify_symbolic()?;
        Ok(law)
    }
}

#[derive(Serialize, Deserialize)]
struct MonomialWire {
    exp: Vec<u32>,
    coeff: serde_json::Number,
}

#[derive(Serialize, Deserialize)]
struct LawWire {
    p: u32,
    n: usize,
    sum: Vec<Vec<MonomialWire>>,
    diff: Vec<Vec<MonomialWire>>,
    prod: Vec<Vec<MonomialWire>>,
}

fn ghost_polys(p: u32, nv: usize, xs: &[MPoly]) -> Vec<MPoly> {
    let pr = BigRational::from_integer(BigInt::from(p));
    (0..xs.len())
        .map(|k| {
            let mut acc = MPoly::zero(nv);
            for (i, x) in xs.iter().enumerate().take(k + 1) {
                let term = x.pow(p.pow((k - i) as u32)).scale(&num_traits::pow(pr.clone(), i));
                acc = acc.add(&term);
            }
            acc
        })
        .collect()
}

fn combine(kind: LawKind, a: &MPoly, b: &MPoly) -> MPoly {
    match kind {
        LawKind::Sum => a.add(b),
        LawKind::Diff => a.sub(b),
        LawKind::Prod => a.mul(b),
    }
}

fn solve(p: u32, n: usize, kind: LawKind) -> Result<Vec<MPoly>> {
    let nv = 2 * n;
    let pr = BigRational::from_integer(BigInt::from(p));
    let xs: Vec<MPoly> = (0..n).map(|i| MPoly::var(nv, i)).collect();
    let ys: Vec<MPoly> = (0..n).map(|i| MPoly::var(nv, n + i)).collect();
    let gx = ghost_polys(p, nv, &xs);
    let gy = ghost_polys(p, nv, &ys);
    let mut out: Vec<MPoly> = Vec::with_capacity(n);
    for k in 0..n {
        let mut rest = combine(kind, &gx[k], &gy[k]);
        for (i, s) in out.iter().enumerate() {
            let term = s.pow(p.pow((k - i) as u32)).scale(&num_traits::pow(pr.clone(), i));
            rest = rest.sub(&term);
        }
        let inv = BigRational::one() / num_traits::pow(pr.clone(), k);
        let s = rest.scale(&inv);
        if !s.is_integral() {
            return Err(Error::Arithmetic(format!(
                "{kind:?} polynomial {k} for p={p} is not integral"
            )));
        }
        out.push(s);
    }
    Ok(out)
}

type Slot = Arc<OnceLock<std::result::Result<Arc<WittLaw>, Error>>>;

fn registry() -> &'static Mutex<HashMap<(u32, usize), Slot>> {
    static REG: OnceLock<Mutex<HashMap<(u32, usize), Slot>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cache_path(p: u32, n: usize) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    Some(PathBuf::from(dir).join(format!("witt-law-p{p}-n{n}.json")))
}

fn load_or_build(p: u32, n: usize) -> Result<WittLaw> {
    let path = cache_path(p, n);
    if let Some(path) = &path {
        if let Ok(text) = std::fs::read_to_string(path) {
            // a stale or corrupt cache entry is rebuilt rather than trusted
            if let Ok(law) = WittLaw::from_json(&text) {
                if law.p == p && law.n == n {
                    return Ok(law);
                }
            }
        }
    }
    let law = WittLaw::build(p, n)?;
    if let Some(path) = path {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension(format!("json.{}.tmp", std::process::id()));
        std::fs::write(&tmp, law.to_json()?)?;
        std::fs::rename(&tmp, &path)?;
    }
    Ok(law)
}

/// The shared law for `(p, n)`; concurrent first calls build it once.
pub fn law(p: u32, n: usize) -> Result<Arc<WittLaw>> {
    let slot = {
        let mut reg = registry().lock().expect("law registry poisoned");
        reg.entry((p, n)).or_default().clone()
    };
    slot.get_or_init(|| load_or_build(p, n).map(Arc::new)).clone()
}

/// A Witt vector; component levels all equal the ring's field level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WittVec {
    comps: Vec<FFElem>,
}

impl WittVec {
    pub fn components(&self) -> &[FFElem] {
        &self.comps
    }
}

/// `W_n(𝔽_{p^m})`.
#[derive(Clone, Debug)]
pub struct WittRing {
    law: Arc<WittLaw>,
    field: Arc<FFTower>,
    m: usize,
}

impl WittRing {
    pub fn new(p: u32, n: usize, m: usize) -> Result<Self> {
        let field = Arc::new(FFTower::new(FieldSpec::new(p, m as u32)?, 1)?);
        Ok(WittRing {
            law: law(p, n)?,
            field,
            m,
        })
    }

    pub fn p(&self) -> u32 {
        self.law.p
    }

    pub fn n(&self) -> usize {
        self.law.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn field(&self) -> &Arc<FFTower> {
        &self.field
    }

    pub fn law(&self) -> &Arc<WittLaw> {
        &self.law
    }

    /// `p^{n m}`.
    pub fn size(&self) -> u128 {
        (self.field.size(1) as u128).pow(self.n() as u32)
    }

    pub fn from_components(&self, comps: Vec<FFElem>) -> Result<WittVec> {
        if comps.len() != self.n() {
            return Err(Error::domain(format!(
                "expected {} components, got {}",
                self.n(),
                comps.len()
            )));
        }
        if comps.iter().any(|c| c.level() != 1) {
            return Err(Error::domain("Witt components must lie in the base field"));
        }
        Ok(WittVec { comps })
    }

    fn check(&self, x: &WittVec) -> Result<()> {
        if x.comps.len() != self.n() || x.comps.iter().any(|c| c.level() != 1) {
            return Err(Error::domain("Witt vector does not belong to this ring"));
        }
        Ok(())
    }

    pub fn zero(&self) -> WittVec {
        WittVec {
            comps: vec![self.field.zero(1); self.n()],
        }
    }

    /// Teichmüller lift `[a] = (a, 0, …, 0)`.
    pub fn teichmuller(&self, a: FFElem) -> WittVec {
        let mut comps = vec![self.field.zero(1); self.n()];
        comps[0] = a;
        WittVec { comps }
    }

    pub fn one(&self) -> WittVec {
        self.teichmuller(self.field.one(1))
    }

    /// Image of an integer under `ℤ → W_n(𝔽_p) ⊂ W_n(𝔽_{p^m})`.
    pub fn from_int(&self, k: i64) -> WittVec {
        let modulus = num_traits::pow(BigInt::from(self.p()), self.n());
        let k = ((BigInt::from(k) % &modulus) + &modulus) % &modulus;
        let comps = integer_components(self.p(), self.n(), &k)
            .into_iter()
            .map(|c| {
                let r: i64 = (c % BigInt::from(self.p())).try_into().expect("residue");
                self.field.from_int(1, r)
            })
            .collect();
        WittVec { comps }
    }

    pub fn add(&self, x: &WittVec, y: &WittVec) -> Result<WittVec> {
        self.apply(LawKind::Sum, x, y)
    }

    pub fn sub(&self, x: &WittVec, y: &WittVec) -> Result<WittVec> {
        self.apply(LawKind::Diff, x, y)
    }

    pub fn mul(&self, x: &WittVec, y: &WittVec) -> Result<WittVec> {
        self.apply(LawKind::Prod, x, y)
    }

    pub fn neg(&self, x: &WittVec) -> Result<WittVec> {
        self.sub(&self.zero(), x)
    }

    fn apply(&self, kind: LawKind, x: &WittVec, y: &WittVec) -> Result<WittVec> {
        self.check(x)?;
        self.check(y)?;
        Ok(WittVec {
            comps: self.law.eval_mod(kind, &self.field, &x.comps, &y.comps),
        })
    }

    /// `x + … + x` (`k` times), `k ≥ 0`.
    pub fn mul_int(&self, x: &WittVec, k: u64) -> Result<WittVec> {
        self.mul(x, &self.from_int(k as i64))
    }

    /// Componentwise `p`-th power, raised `e` times.
    pub fn frobenius(&self, x: &WittVec, e: i64) -> WittVec {
        WittVec {
            comps: x.comps.iter().map(|&c| self.field.frobenius(c, e)).collect(),
        }
    }

    /// `(a_0, …) ↦ (0, a_0, …)`, truncated.
    pub fn verschiebung(&self, x: &WittVec) -> WittVec {
        let mut comps = Vec::with_capacity(self.n());
        comps.push(self.field.zero(1));
        comps.extend(x.comps.iter().take(self.n() - 1).copied());
        WittVec { comps }
    }

    /// `Tr_W = Σ_{i<m} F^i`, landing in `W_n(𝔽_p)`.
    pub fn trace(&self, x: &WittVec) -> Result<WittVec> {
        let mut acc = self.zero();
        for i in 0..self.m as i64 {
            acc = self.add(&acc, &self.frobenius(x, i))?;
        }
        Ok(acc)
    }

    /// Position in enumeration order, first component least significant.
    pub fn code(&self, x: &WittVec) -> u64 {
        let q = self.field.size(1);
        x.comps.iter().rev().fold(0, |acc, c| acc * q + c.index())
    }

    pub fn at(&self, mut code: u64) -> WittVec {
        let q = self.field.size(1);
        let comps = (0..self.n())
            .map(|_| {
                let c = self.field.elem(1, code % q).expect("index below q");
                code /= q;
                c
            })
            .collect();
        WittVec { comps }
    }

    /// Every element, refusing rings above `capacity`.
    pub fn elements(&self, capacity: u64) -> Result<impl Iterator<Item = WittVec> + '_> {
        let size = self.size();
        if size > capacity as u128 {
            return Err(Error::capacity(
                format!("W_{}(F_{}^{})", self.n(), self.p(), self.m),
                size,
                capacity as u128,
            ));
        }
        Ok((0..size as u64).map(move |c| self.at(c)))
    }

    /// `W_n(𝔽_p) → ℤ/pⁿ`, the inverse of [`from_int`](Self::from_int).
    pub fn prime_field_table(&self) -> HashMap<WittVec, u64> {
        let pn = (self.p() as u64).pow(self.n() as u32);
        (0..pn).map(|k| (self.from_int(k as i64), k)).collect()
    }

    /// `⟨a, b⟩ = Tr_W(a b) ∈ ℤ/pⁿ`.
    pub fn theta_pairing(&self, a: &WittVec, b: &WittVec, table: &HashMap<WittVec, u64>) -> Result<u64> {
        let t = self.trace(&self.mul(a, b)?)?;
        table
            .get(&t)
            .copied()
            .ok_or_else(|| Error::Arithmetic("Witt trace left W_n(F_p)".into()))
    }

    /// `ker(F − id)`, its cyclicity and the cokernel count.
    pub fn as_witt_kernel(&self, capacity: u64) -> Result<KernelReport> {
        let mut kernel = Vec::new();
        let mut image = HashSet::new();
        for x in self.elements(capacity)? {
            let y = self.sub(&self.frobenius(&x, 1), &x)?;
            if y == self.zero() {
                kernel.push(x);
            }
            image.insert(self.code(&y));
        }
        let size = self.size() as u64;
        let pn = (self.p() as u64).pow(self.n() as u32);
        let kernel_in_prime_field = kernel
            .iter()
            .all(|x| x.comps.iter().all(|&c| self.field.index_in_prime_field(c)));
        // cyclic: the class of 1 has additive order pⁿ inside the kernel
        let one = self.one();
        let mut order = 1u64;
        let mut acc = one.clone();
        while acc != self.zero() {
            acc = self.add(&acc, &one)?;
            order += 1;
            if order > pn {
                break;
            }
        }
        let kernel_size = kernel.len() as u64;
        let coker_size = size / image.len() as u64;
        let cyclic = kernel_size == pn && order == pn;
        Ok(KernelReport {
            p: self.p(),
            n: self.n(),
            m: self.m,
            ring_size: size,
            kernel_size,
            kernel_in_prime_field,
            cyclic,
            coker_size,
            passed: cyclic && kernel_in_prime_field && coker_size == kernel_size,
        })
    }

    /// Nondegeneracy of the theta pairing, tested against Teichmüller lifts of an 𝔽_p-basis.
    pub fn pairing_report(&self, capacity: u64) -> Result<PairingReport> {
        let table = self.prime_field_table();
        let basis: Vec<WittVec> = (0..self.m)
            .map(|j| {
                let mut c = vec![0u32; self.m];
                c[j] = 1;
                self.teichmuller(self.field.from_coeffs(1, &c).expect("basis vector"))
            })
            .collect();
        // the lifts generate the additive group
        let pn = (self.p() as u64).pow(self.n() as u32);
        let mut span = HashSet::new();
        let mut frontier = vec![self.zero()];
        span.insert(self.code(&self.zero()));
        while let Some(x) = frontier.pop() {
            for b in &basis {
                let y = self.add(&x, b)?;
                if span.insert(self.code(&y)) {
                    frontier.push(y);
                }
            }
        }
        let generates = span.len() as u128 == self.size();
        let mut degenerate = 0u64;
        for a in self.elements(capacity)? {
            if a == self.zero() {
                continue;
            }
            let mut all_zero = true;
            for b in &basis {
                if self.theta_pairing(&a, b, &table)? != 0 {
                    all_zero = false;
                    break;
                }
            }
            if all_zero {
                degenerate += 1;
            }
        }
        Ok(PairingReport {
            p: self.p(),
            n: self.n(),
            m: self.m,
            modulus: pn,
            basis_generates: generates,
            degenerate_elements: degenerate,
            passed: generates && degenerate == 0,
        })
    }
}

impl FFTower {
    /// Whether a level-1 element lies in the prime field.
    fn index_in_prime_field(&self, x: FFElem) -> bool {
        x.index() < self.p() as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub p: u32,
    pub n: usize,
    pub m: usize,
    pub ring_size: u64,
    pub kernel_size: u64,
    pub kernel_in_prime_field: bool,
    pub cyclic: bool,
    pub coker_size: u64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingReport {
    pub p: u32,
    pub n: usize,
    pub m: usize,
    pub modulus: u64,
    pub basis_generates: bool,
    pub degenerate_elements: u64,
    pub passed: bool,
}

/// Compares each law with the ghost map on integer vectors with entries in `-bound..=bound`.
pub fn ghost_oracle_check(law: &WittLaw, samples: &[(Vec<i64>, Vec<i64>)]) -> bool {
    let p = law.p;
    samples.iter().all(|(x, y)| {
        let x: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let y: Vec<BigInt> = y.iter().map(|&v| BigInt::from(v)).collect();
        let (gx, gy) = (ghost(p, &x), ghost(p, &y));
        [LawKind::Sum, LawKind::Diff, LawKind::Prod].iter().all(|&kind| {
            let z = law.eval_int(kind, &x, &y);
            let gz = ghost(p, &z);
            gz.iter().enumerate().all(|(k, g)| {
                *g == match kind {
                    LawKind::Sum => &gx[k] + &gy[k],
                    LawKind::Diff => &gx[k] - &gy[k],
                    LawKind::Prod => &gx[k] * &gy[k],
                }
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn ghost_examples() {
        assert_eq!(ghost(2, &bi(&[1, 1])), bi(&[1, 3]));
        assert_eq!(ghost(3, &bi(&[2, 0, 0])), bi(&[2, 8, 512]));
        assert_eq!(ghost(5, &bi(&[0, 0])), bi(&[0, 0]));
    }

    #[test]
    fn low_laws_by_hand() {
        let l = WittLaw::build(2, 2).unwrap();
        // S_1 = x1 + y1 - x0 y0 for p = 2
        let s1 = &l.polys(LawKind::Sum)[1];
        assert_eq!(s1.len(), 3);
        let v = l.eval_int(LawKind::Sum, &bi(&[1, 0]), &bi(&[1, 0]));
        assert_eq!(v, bi(&[2, -1]));
    }

    #[test]
    fn one_plus_one_in_w2_f2() {
        let r = WittRing::new(2, 2, 1).unwrap();
        let two = r.add(&r.one(), &r.one()).unwrap();
        let f = r.field();
        assert_eq!(two.components(), &[f.zero(1), f.one(1)]);
        assert_eq!(two, r.verschiebung(&r.one()));
    }

    #[test]
    fn integer_map_is_a_ring_map() {
        for (p, n) in [(2, 3), (3, 2)] {
            let r = WittRing::new(p, n, 1).unwrap();
            let pn = (p as i64).pow(n as u32);
            for a in 0..pn {
                for b in 0..pn {
                    let (x, y) = (r.from_int(a), r.from_int(b));
                    assert_eq!(r.add(&x, &y).unwrap(), r.from_int(a + b));
                    assert_eq!(r.mul(&x, &y).unwrap(), r.from_int(a * b));
                    assert_eq!(r.sub(&x, &y).unwrap(), r.from_int(a - b));
                }
            }
        }
    }

    #[test]
    fn teichmuller_is_multiplicative_and_fv_is_p() {
        let r = WittRing::new(2, 3, 2).unwrap();
        let f = r.field().clone();
        for a in f.elements(1) {
            for b in f.elements(1) {
                let ab = r.mul(&r.teichmuller(a), &r.teichmuller(b)).unwrap();
                assert_eq!(ab, r.teichmuller(f.mul(a, b)));
            }
        }
        for x in r.elements(1 << 12).unwrap().step_by(5) {
            let fv = r.frobenius(&r.verschiebung(&x), 1);
            assert_eq!(fv, r.mul_int(&x, 2).unwrap());
            assert_eq!(r.add(&x, &r.zero()).unwrap(), x);
        }
        assert_eq!(r.verschiebung(&r.zero()), r.zero());
    }

    #[test]
    fn kernel_examples() {
        let k = WittRing::new(2, 2, 2).unwrap().as_witt_kernel(1 << 12).unwrap();
        assert_eq!((k.kernel_size, k.passed), (4, true));
        let k = WittRing::new(3, 1, 2).unwrap().as_witt_kernel(1 << 12).unwrap();
        assert_eq!((k.kernel_size, k.passed), (3, true));
        let k = WittRing::new(3, 2, 1).unwrap().as_witt_kernel(1 << 12).unwrap();
        assert_eq!((k.kernel_size, k.ring_size, k.passed), (9, 9, true));
    }

    #[test]
    fn pairing_examples() {
        let r = WittRing::new(2, 1, 3).unwrap();
        let t = r.prime_field_table();
        let f = r.field().clone();
        for a in f.elements(1) {
            for b in f.elements(1) {
                let v = r.theta_pairing(&r.teichmuller(a), &r.teichmuller(b), &t).unwrap();
                assert_eq!(v, f.abs_trace(f.mul(a, b)) as u64);
            }
        }
        let r = WittRing::new(2, 2, 1).unwrap();
        let t = r.prime_field_table();
        // full 4x4 table on Z/4 is x*y mod 4, which is perfect
        for a in 0..4 {
            for b in 0..4 {
                let v = r.theta_pairing(&r.from_int(a), &r.from_int(b), &t).unwrap();
                assert_eq!(v, (a * b % 4) as u64);
            }
        }
        assert!(r.pairing_report(1 << 12).unwrap().passed);
    }

    #[test]
    fn cache_roundtrip() {
        let l = WittLaw::build(3, 2).unwrap();
        let back = WittLaw::from_json(&l.to_json().unwrap()).unwrap();
        for k in [LawKind::Sum, LawKind::Diff, LawKind::Prod] {
            assert_eq!(back.polys(k), l.polys(k));
        }
        assert!(WittLaw::from_json("{\"p\":3}").is_err());
    }
}
