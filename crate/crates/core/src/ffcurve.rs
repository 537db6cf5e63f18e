//! A truncated equal-characteristic model of the curve rings.
//!
//! Elements are finite sums `Σ a_i π^i` whose coefficients `a_i` are finite
//! sums `Σ c_α t^α` with `c_α ∈ 𝔽_q` and `α ∈ ℤ[1/p]`. A [`LaurentApprox`]
//! carries its own precision: the set `{π^i t^α : i ≥ I or α ≥ T}` is
//! unknown, with `None` meaning "no truncation in that direction". Every
//! operation propagates `(I, T)` as the weakest bound of its inputs.
//!
//! Frobenius `φ` raises coefficients to the `q`-th power. Coefficients are
//! in `𝔽_q`, so `φ` just multiplies t-exponents by `q`.
//!
//! The inverse of `φ − πⁿ` is assembled from two series:
//! `g(f) = Σ_k π^{kn} φ^{−(k+1)}(f)` on the part with π-degrees bounded
//! below, and `g'(h) = −Σ_k π^{−(k+1)n} φ^k(h)` on topologically nilpotent
//! terms of negative π-degree. The second one is the form that telescopes.
//! The alternative with positive π-powers is kept as
//! [`CurveField::g_prime_series_positive`] so the difference can be tested.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::{FFElem, FFTower, FieldSpec};

/// t-exponents.
pub type Exp = Ratio<i128>;

/// Default cap `D` on exponent denominators `p^D`.
pub const DEFAULT_DENOM_BUDGET: u32 = 48;

/// Advisory region tag; it selects which inverse series is meant to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    /// `B_{[0,1]}[1/π]`
    #[serde(rename = "B[0,1][1/pi]")]
    B01Inv,
    /// `B_{[1,1]}`
    #[serde(rename = "B[1,1]")]
    B11,
    /// `B_{[1,∞]}`
    #[serde(rename = "B[1,inf]")]
    B1Inf,
    /// `B_{[1,q]}`
    #[serde(rename = "B[1,q]")]
    B1q,
}

impl Region {
    /// All four rings restrict into `B_{[1,1]}`; mixing tags lands there.
    pub fn combine(self, other: Region) -> Region {
        if self == other {
            self
        } else {
            Region::B11
        }
    }
}

/// A finite perfectoid coefficient `Σ c_α t^α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PerfCoeff {
    terms: BTreeMap<Exp, FFElem>,
}

impl PerfCoeff {
    pub fn zero() -> Self {
        PerfCoeff::default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &FFElem)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// All exponents strictly positive.
    pub fn is_nilpotent(&self) -> bool {
        self.terms.keys().all(|a| a.is_positive())
    }

    /// Smallest exponent present.
    pub fn valuation(&self) -> Option<Exp> {
        self.terms.keys().next().copied()
    }
}

/// A truncated element of the curve ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentApprox {
    terms: BTreeMap<i64, PerfCoeff>,
    pi_prec: Option<i64>,
    t_prec: Option<Exp>,
    region: Region,
}

impl LaurentApprox {
    pub fn terms(&self) -> impl Iterator<Item = (&i64, &PerfCoeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: i64) -> PerfCoeff {
        self.terms.get(&i).cloned().unwrap_or_default()
    }

    pub fn pi_prec(&self) -> Option<i64> {
        self.pi_prec
    }

    pub fn t_prec(&self) -> Option<Exp> {
        self.t_prec
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn with_region(mut self, region: Region) -> Self {
        self.region = region;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.pi_prec.is_none() && self.t_prec.is_none()
    }

    /// No known nonzero term.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest π-degree among known terms.
    pub fn pi_valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Lowest t-exponent among known terms.
    pub fn t_valuation(&self) -> Option<Exp> {
        self.terms.values().filter_map(|c| c.valuation()).min()
    }

    /// Every `(i, α, c)` in increasing order.
    pub fn monomials(&self) -> impl Iterator<Item = (i64, Exp, FFElem)> + '_ {
        self.terms
            .iter()
            .flat_map(|(&i, c)| c.terms.iter().map(move |(&a, &e)| (i, a, e)))
    }
}

/// Ambient data: the coefficient field `𝔽_q` and the denominator budget.
#[derive(Clone, Debug)]
pub struct CurveField {
    field: Arc<FFTower>,
    denom_budget: u32,
}

impl CurveField {
    pub fn new(q: u64, denom_budget: u32) -> Result<Self> {
        let spec = FieldSpec::from_order(q)?;
        Ok(CurveField {
            field: Arc::new(FFTower::new(spec, 1)?),
            denom_budget,
        })
    }

    pub fn field(&self) -> &Arc<FFTower> {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn denom_budget(&self) -> u32 {
        self.denom_budget
    }

    fn max_denom(&self) -> i128 {
        (self.p() as i128).saturating_pow(self.denom_budget)
    }

    fn check_exp(&self, a: &Exp) -> Result<()> {
        let mut d = *a.denom();
        let p = self.p() as i128;
        while d % p == 0 {
            d /= p;
        }
        if d != 1 {
            return Err(Error::domain(format!(
                "exponent {a} is not in Z[1/{}]",
                self.p()
            )));
        }
        if *a.denom() > self.max_denom() {
            return Err(Error::Precision(format!(
                "exponent {a} exceeds the denominator budget p^{}",
                self.denom_budget
            )));
        }
        Ok(())
    }

    // ------------------------------------------------------------ builders

    pub fn exact(&self, monomials: impl IntoIterator<Item = (i64, Exp, FFElem)>) -> Result<LaurentApprox> {
        let mut out = LaurentApprox {
            terms: BTreeMap::new(),
            pi_prec: None,
            t_prec: None,
            region: Region::B11,
        };
        for (i, a, c) in monomials {
            self.check_exp(&a)?;
            if c.level() != 1 {
                return Err(Error::domain("coefficients must lie in F_q"));
            }
            self.push(&mut out, i, a, c);
        }
        Ok(out)
    }

    pub fn zero(&self) -> LaurentApprox {
        self.exact([]).expect("empty sum")
    }

    /// `c·t^α·π^i` with `c ∈ 𝔽_p` given as an integer.
    pub fn monomial(&self, i: i64, a: Exp, c: i64) -> Result<LaurentApprox> {
        self.exact([(i, a, self.field.from_int(1, c))])
    }

    /// Sets the precision, discarding known terms inside the unknown set.
    pub fn truncate(&self, x: &LaurentApprox, pi_prec: Option<i64>, t_prec: Option<Exp>) -> LaurentApprox {
        let mut out = x.clone();
        out.pi_prec = min_opt(x.pi_prec, pi_prec);
        out.t_prec = min_opt(x.t_prec, t_prec);
        self.normalize(&mut out);
        out
    }

    fn push(&self, x: &mut LaurentApprox, i: i64, a: Exp, c: FFElem) {
        if self.field.is_zero(c) {
            return;
        }
        let coeff = x.terms.entry(i).or_default();
        let slot = coeff.terms.entry(a).or_insert_with(|| self.field.zero(1));
        *slot = self.field.add(*slot, c);
        if self.field.is_zero(*slot) {
            coeff.terms.remove(&a);
            if coeff.terms.is_empty() {
                x.terms.remove(&i);
            }
        }
    }

    fn normalize(&self, x: &mut LaurentApprox) {
        let (ip, tp) = (x.pi_prec, x.t_prec);
        x.terms.retain(|&i, c| {
            if ip.is_some_and(|ip| i >= ip) {
                return false;
            }
            if let Some(tp) = tp {
                c.terms.retain(|a, _| *a < tp);
            }
            !c.terms.is_empty()
        });
    }

    // ---------------------------------------------------------- arithmetic

    pub fn add(&self, x: &LaurentApprox, y: &LaurentApprox) -> LaurentApprox {
        let mut out = x.clone();
        for (i, a, c) in y.monomials() {
            self.push(&mut out, i, a, c);
        }
        out.pi_prec = min_opt(x.pi_prec, y.pi_prec);
        out.t_prec = min_opt(x.t_prec, y.t_prec);
        out.region = x.region.combine(y.region);
        self.normalize(&mut out);
        out
    }

    pub fn neg(&self, x: &LaurentApprox) -> LaurentApprox {
        let mut out = x.clone();
        for c in out.terms.values_mut() {
            for v in c.terms.values_mut() {
                *v = self.field.neg(*v);
            }
        }
        out
    }

    pub fn sub(&self, x: &LaurentApprox, y: &LaurentApprox) -> LaurentApprox {
        self.add(x, &self.neg(y))
    }

    /// Multiplication by `c ∈ 𝔽_q`.
    pub fn scale(&self, x: &LaurentApprox, c: FFElem) -> LaurentApprox {
        let mut out = self.zero();
        for (i, a, e) in x.monomials() {
            self.push(&mut out, i, a, self.field.mul(c, e));
        }
        out.pi_prec = x.pi_prec;
        out.t_prec = x.t_prec;
        out.region = x.region;
        out
    }

    /// Multiplication by the exact monomial `π^k`; shifts the π-precision.
    pub fn mul_pi_pow(&self, x: &LaurentApprox, k: i64) -> LaurentApprox {
        LaurentApprox {
            terms: x.terms.iter().map(|(&i, c)| (i + k, c.clone())).collect(),
            pi_prec: x.pi_prec.map(|p| p + k),
            t_prec: x.t_prec,
            region: x.region,
        }
    }

    /// Product with precision bounds `min(I_x + v(y), I_y + v(x))`, likewise in t.
    ///
    /// A π-truncated factor times a t-truncated factor has no usable bound and
    /// is refused.
    pub fn mul(&self, x: &LaurentApprox, y: &LaurentApprox) -> Result<LaurentApprox> {
        let crosses = (x.pi_prec.is_some() && y.t_prec.is_some())
            || (x.t_prec.is_some() && y.pi_prec.is_some());
        if crosses {
            return Err(Error::Precision(
                "cannot bound the product of a pi-truncated and a t-truncated series".into(),
            ));
        }
        let mut out = self.zero();
        for (i, a, c) in x.monomials() {
            for (j, b, d) in y.monomials() {
                let e = a + b;
                self.check_exp(&e)?;
                self.push(&mut out, i + j, e, self.field.mul(c, d));
            }
        }
        let lower_pi = |z: &LaurentApprox| min_opt(z.pi_valuation(), z.pi_prec);
        let lower_t = |z: &LaurentApprox| min_opt(z.t_valuation(), z.t_prec);
        out.pi_prec = min_opt(
            bound_sum(x.pi_prec, lower_pi(y)),
            bound_sum(y.pi_prec, lower_pi(x)),
        );
        out.t_prec = min_opt(
            bound_sum(x.t_prec, lower_t(y)),
            bound_sum(y.t_prec, lower_t(x)),
        );
        out.region = x.region.combine(y.region);
        self.normalize(&mut out);
        Ok(out)
    }

    /// `φ^e`: t-exponents scale by `q^e`, π-degrees and π-precision unchanged.
    pub fn phi(&self, x: &LaurentApprox, e: i64) -> Result<LaurentApprox> {
        let factor = if e >= 0 {
            Exp::from_integer((self.q() as i128).pow(e as u32))
        } else {
            Exp::new(1, (self.q() as i128).pow((-e) as u32))
        };
        let mut out = self.zero();
        for (i, a, c) in x.monomials() {
            let b = a * factor;
            self.check_exp(&b)?;
            self.push(&mut out, i, b, c);
        }
        out.pi_prec = x.pi_prec;
        out.t_prec = x.t_prec.map(|t| t * factor);
        out.region = x.region;
        Ok(out)
    }

    /// `(φ − πⁿ)(x)`.
    pub fn apply_phi_minus_pi_n(&self, x: &LaurentApprox, n: i64) -> Result<LaurentApprox> {
        Ok(self.sub(&self.phi(x, 1)?, &self.mul_pi_pow(x, n)))
    }

    // ------------------------------------------------------- inverse series

    /// `Σ_{k<K} π^{kn} φ^{−(k+1)}(f)`, with π-precision `min(I_f, v_π(f) + K n)`.
    pub fn g_series(&self, f: &LaurentApprox, n: i64, terms: usize) -> Result<LaurentApprox> {
        check_n(n)?;
        let mut acc = self.zero();
        let mut cur = self.phi(f, -1)?;
        for k in 0..terms as i64 {
            acc = self.add(&acc, &self.mul_pi_pow(&cur, k * n));
            if (k as usize) + 1 < terms {
                cur = self.phi(&cur, -1)?;
            }
        }
        acc.pi_prec = min_opt(
            f.pi_prec,
            f.pi_valuation().map(|v| v + terms as i64 * n),
        );
        acc.t_prec = f.t_prec.map(|t| t / Exp::from_integer(self.q() as i128));
        acc.region = Region::B1q;
        self.normalize(&mut acc);
        Ok(acc)
    }

    /// `−Σ_{k<K} π^{−(k+1)n} φ^k(h)`, with t-precision `q^K·v_t(h)`.
    pub fn g_prime_series(&self, h: &LaurentApprox, n: i64, terms: usize) -> Result<LaurentApprox> {
        check_n(n)?;
        self.require_nilpotent(h)?;
        let mut acc = self.zero();
        let mut cur = h.clone();
        for k in 0..terms as i64 {
            acc = self.sub(&acc, &self.mul_pi_pow(&cur, -(k + 1) * n));
            if (k as usize) + 1 < terms {
                cur = self.phi(&cur, 1)?;
            }
        }
        let q = Exp::from_integer(self.q() as i128);
        let tail = h
            .t_valuation()
            .map(|v| v * num_traits::pow(q, terms));
        acc.t_prec = min_opt(h.t_prec.map(|t| t * q), tail);
        acc.pi_prec = h.pi_prec.map(|p| p - n);
        acc.region = Region::B1q;
        self.normalize(&mut acc);
        Ok(acc)
    }

    /// `−Σ_{k<K} π^{(k+1)n} φ^k(h)`, the positive-π-power variant.
    ///
    /// Kept exact and untruncated; `(φ − πⁿ)` of it does not return `h`.
    pub fn g_prime_series_positive(&self, h: &LaurentApprox, n: i64, terms: usize) -> Result<LaurentApprox> {
        check_n(n)?;
        self.require_nilpotent(h)?;
        let mut acc = self.zero();
        let mut cur = h.clone();
        for k in 0..terms as i64 {
            acc = self.sub(&acc, &self.mul_pi_pow(&cur, (k + 1) * n));
            cur = self.phi(&cur, 1)?;
        }
        Ok(acc)
    }

    fn require_nilpotent(&self, h: &LaurentApprox) -> Result<()> {
        if h.terms.values().all(|c| c.is_nilpotent()) {
            Ok(())
        } else {
            Err(Error::domain(
                "g' needs strictly positive t-exponents (topologically nilpotent coefficients)",
            ))
        }
    }

    /// Splits a target into the part for `g` (π-degree ≥ 0 or t-exponent ≤ 0)
    /// and the part for `g'` (negative π-degree with positive t-exponent).
    pub fn split(&self, target: &LaurentApprox) -> (LaurentApprox, LaurentApprox) {
        let mut g_part = self.zero();
        let mut h_part = self.zero();
        for (i, a, c) in target.monomials() {
            if i < 0 && a.is_positive() {
                self.push(&mut h_part, i, a, c);
            } else {
                self.push(&mut g_part, i, a, c);
            }
        }
        for part in [&mut g_part, &mut h_part] {
            part.pi_prec = target.pi_prec;
            part.t_prec = target.t_prec;
        }
        (g_part.with_region(Region::B01Inv), h_part.with_region(Region::B1Inf))
    }

    /// A preimage of `target` under `φ − πⁿ`, valid modulo `(π^I, t^T)`.
    pub fn solve_phi_pi(&self, target: &LaurentApprox, n: i64, pi_prec: i64, t_prec: Exp) -> Result<Solution> {
        check_n(n)?;
        if target.pi_prec.is_some_and(|p| p < pi_prec) || target.t_prec.is_some_and(|t| t < t_prec) {
            return Err(Error::Precision(
                "target is not known to the requested precision".into(),
            ));
        }
        let (f, h) = self.split(target);
        let k_g = match f.pi_valuation() {
            Some(v) if v < pi_prec => ((pi_prec - v) as u64).div_ceil(n as u64) as usize,
            _ => 0,
        };
        let k_h = match h.t_valuation() {
            Some(v) => {
                let q = Exp::from_integer(self.q() as i128);
                let mut k = 0usize;
                let mut cur = v;
                while cur < t_prec {
                    cur *= q;
                    k += 1;
                }
                k
            }
            None => 0,
        };
        let x_g = self.g_series(&f, n, k_g)?;
        let x_h = self.g_prime_series(&h, n, k_h)?;
        // both parts may come back exact (an empty half); the answer is only claimed on the window
        let preimage = self.truncate(&self.add(&x_g, &x_h), Some(pi_prec), Some(t_prec));
        Ok(Solution {
            preimage,
            g_terms: k_g,
            g_prime_terms: k_h,
        })
    }

    /// Whether `(φ − πⁿ)(x) − target` vanishes inside the window `i < I`, `α < T`.
    ///
    /// `x` is treated as an exact finite sum.
    pub fn check_solution(&self, x: &LaurentApprox, target: &LaurentApprox, n: i64, pi_prec: i64, t_prec: Exp) -> Result<bool> {
        let mut exact = x.clone();
        exact.pi_prec = None;
        exact.t_prec = None;
        let image = self.apply_phi_minus_pi_n(&exact, n)?;
        let mut target = target.clone();
        target.pi_prec = None;
        target.t_prec = None;
        let diff = self.sub(&image, &target);
        let ok = diff.monomials().all(|(i, a, _)| i >= pi_prec || a >= t_prec);
        Ok(ok)
    }

    /// Equality on the common window of known terms.
    pub fn eq_within(&self, x: &LaurentApprox, y: &LaurentApprox) -> bool {
        let d = self.sub(x, y);
        d.is_zero()
    }

    // ------------------------------------------------------------- H⁰ data

    /// Sections `Σ_{i<I} r_i π^i` with `r_{i+n} = φ(r_i)` and `r_0..r_{n−1}` the seeds.
    pub fn h0_basis(&self, n: i64, seeds: &[PerfCoeff], pi_prec: i64) -> Result<LaurentApprox> {
        check_n(n)?;
        if seeds.len() != n as usize {
            return Err(Error::domain(format!("expected {n} seeds, got {}", seeds.len())));
        }
        if let Some(k) = seeds.iter().position(|s| !s.is_nilpotent()) {
            return Err(Error::domain(format!("seed {k} is not topologically nilpotent")));
        }
        let mut r: Vec<LaurentApprox> = seeds
            .iter()
            .map(|s| self.coeff_series(s))
            .collect::<Result<_>>()?;
        for i in n as usize..pi_prec.max(0) as usize {
            let next = self.phi(&r[i - n as usize], 1)?;
            r.push(next);
        }
        let mut out = self.zero();
        for (i, ri) in r.iter().enumerate().take(pi_prec.max(0) as usize) {
            out = self.add(&out, &self.mul_pi_pow(ri, i as i64));
        }
        out.pi_prec = Some(pi_prec);
        self.normalize(&mut out);
        Ok(out)
    }

    fn coeff_series(&self, c: &PerfCoeff) -> Result<LaurentApprox> {
        self.exact(c.terms.iter().map(|(&a, &e)| (0, a, e)))
    }

    /// `πⁿφ(f) = f − (r_0 + … + r_{n−1}π^{n−1})` on the known window.
    pub fn h0_relation_holds(&self, f: &LaurentApprox, n: i64) -> Result<bool> {
        let mut seeds_part = self.zero();
        for (i, a, c) in f.monomials() {
            if i < n {
                self.push(&mut seeds_part, i, a, c);
            }
        }
        let lhs = self.mul_pi_pow(&self.phi(f, 1)?, n);
        let rhs = self.sub(f, &seeds_part);
        Ok(self.eq_within(&lhs, &rhs))
    }

    /// Free-coefficient count, linearity and injectivity of seeds ↦ sections.
    pub fn h0_report(&self, n: i64, pi_prec: i64) -> Result<H0Report> {
        check_n(n)?;
        let alphabet = self.nilpotent_alphabet();
        let nn = n as usize;
        let seed_tuples = tuples(alphabet.len(), nn, 4096);
        let mut sections = Vec::with_capacity(seed_tuples.len());
        let mut relation_holds = true;
        for tup in &seed_tuples {
            let seeds: Vec<PerfCoeff> = tup.iter().map(|&k| alphabet[k].clone()).collect();
            let s = self.h0_basis(n, &seeds, pi_prec)?;
            relation_holds &= self.h0_relation_holds(&s, n)?;
            sections.push((seeds, s));
        }
        let mut seen = std::collections::HashSet::new();
        let injective = sections
            .iter()
            .all(|(_, s)| seen.insert(format!("{}", Display(self, s))));
        // linearity over F_q on pairs of seed tuples
        let mut linear = true;
        let c = self.field.elements(1).last().expect("nonempty field");
        for w in sections.windows(2).take(64) {
            let (sa, fa) = (&w[0].0, &w[0].1);
            let (sb, fb) = (&w[1].0, &w[1].1);
            let sum_seeds: Vec<PerfCoeff> = sa
                .iter()
                .zip(sb)
                .map(|(x, y)| self.coeff_add(x, y, Some(c)))
                .collect();
            let lhs = self.h0_basis(n, &sum_seeds, pi_prec)?;
            let rhs = self.add(fa, &self.scale(fb, c));
            linear &= self.eq_within(&lhs, &rhs);
        }
        // seeds fix everything: changing one later coefficient breaks the relation
        let mut determined = true;
        if pi_prec > n {
            let base = &sections.last().expect("at least one section").1;
            for i in n..pi_prec {
                let bumped = self.add(
                    base,
                    &self.exact([(i, Exp::one(), self.field.one(1))])?,
                );
                determined &= !self.h0_relation_holds(&self.truncate(&bumped, Some(pi_prec), None), n)?;
            }
        }
        Ok(H0Report {
            n,
            pi_prec,
            free_coefficients: nn,
            sections_tested: sections.len(),
            relation_holds,
            injective,
            linear,
            determined_by_seeds: determined,
            passed: relation_holds && injective && linear && determined,
        })
    }

    fn coeff_add(&self, x: &PerfCoeff, y: &PerfCoeff, scale_y: Option<FFElem>) -> PerfCoeff {
        let mut out = x.clone();
        for (&a, &e) in &y.terms {
            let e = scale_y.map(|c| self.field.mul(c, e)).unwrap_or(e);
            let slot = out.terms.entry(a).or_insert_with(|| self.field.zero(1));
            *slot = self.field.add(*slot, e);
            if self.field.is_zero(*slot) {
                out.terms.remove(&a);
            }
        }
        out
    }

    /// `0, t^{1/q}, t, t + t^q` with unit coefficients.
    pub fn nilpotent_alphabet(&self) -> Vec<PerfCoeff> {
        let q = self.q() as i128;
        let one = self.field.one(1);
        let mono = |a: Exp| PerfCoeff {
            terms: BTreeMap::from([(a, one)]),
        };
        let mut both = mono(Exp::one());
        both.terms.insert(Exp::from_integer(q), one);
        vec![PerfCoeff::zero(), mono(Exp::new(1, q)), mono(Exp::one()), both]
    }

    /// No nonzero section for `n < 0`: a forcing chain plus exhaustive search on a small alphabet.
    pub fn h0_negative_check(&self, n: i64, window: usize) -> Result<NegativeReport> {
        if n >= 0 {
            return Err(Error::domain("the negative check needs n < 0"));
        }
        let m = (-n) as usize;
        let mut chain = Vec::new();
        for i in 0..window {
            if i < m {
                chain.push(format!("phi(r_{i}) = r_{} = 0, so r_{i} = 0", i as i64 + n));
            } else {
                chain.push(format!(
                    "phi(r_{i}) = r_{} = 0, so r_{i} = 0",
                    i - m
                ));
            }
        }
        let alphabet = self.nilpotent_alphabet();
        let combos = tuples(alphabet.len(), window, 1 << 16);
        let mut nonzero_solutions = 0u64;
        for tup in &combos {
            if tup.iter().all(|&k| k == 0) {
                continue;
            }
            let r: Vec<&PerfCoeff> = tup.iter().map(|&k| &alphabet[k]).collect();
            // relation r_{i+n} = φ(r_i) with r_j = 0 for j < 0, on the window
            let ok = (0..window).all(|i| {
                let j = i as i64 + n;
                let lhs = if j >= 0 { r[j as usize].clone() } else { PerfCoeff::zero() };
                self.coeff_phi(r[i]) == lhs
            });
            if ok {
                nonzero_solutions += 1;
            }
        }
        Ok(NegativeReport {
            n,
            window,
            assignments_searched: combos.len() as u64,
            nonzero_solutions,
            forcing_chain: chain,
            passed: nonzero_solutions == 0,
        })
    }

    fn coeff_phi(&self, c: &PerfCoeff) -> PerfCoeff {
        let q = Exp::from_integer(self.q() as i128);
        PerfCoeff {
            terms: c.terms.iter().map(|(&a, &e)| (a * q, e)).collect(),
        }
    }

    // -------------------------------------------------------------- text IO

    /// Parses sums like `t + 2*t^(1/2)*pi^-1 - w*pi^3`, where `w` generates `𝔽_q`.
    /// A coefficient may also be written `[c0,c1,..]` in the power basis, and
    /// `O(pi^k)` or `O(t^a)` terms set the precision, so display output reads back.
    pub fn parse(&self, s: &str) -> Result<LaurentApprox> {
        let mut out = self.zero();
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() || s == "0" {
            return Ok(out);
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        let mut depth = 0;
        for ch in s.chars() {
            match ch {
                '(' | '{' => depth += 1,
                ')' | '}' => depth -= 1,
                _ => {}
            }
            let after_caret = cur.ends_with('^');
            if (ch == '+' || ch == '-') && depth == 0 && !after_caret && !cur.is_empty() {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let (mut pi_prec, mut t_prec) = (None, None);
        for term in terms {
            let body = term.strip_prefix('+').unwrap_or(&term);
            if let Some(inner) = body.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
                let bad = || Error::parse(format!("bad precision term {term:?}"));
                match inner.split_once('^') {
                    Some(("pi", k)) => pi_prec = Some(k.parse::<i64>().map_err(|_| bad())?),
                    Some(("t", e)) => t_prec = Some(parse_exp(strip_group(e))?),
                    _ => return Err(bad()),
                }
                continue;
            }
            let (i, a, c) = self.parse_term(&term)?;
            self.check_exp(&a)?;
            self.push(&mut out, i, a, c);
        }
        if pi_prec.is_some() || t_prec.is_some() {
            out = self.truncate(&out, pi_prec, t_prec);
        }
        Ok(out)
    }

    fn parse_term(&self, term: &str) -> Result<(i64, Exp, FFElem)> {
        let bad = || Error::parse(format!("bad series term {term:?}"));
        let (neg, body) = match term.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, term.strip_prefix('+').unwrap_or(term)),
        };
        if body.is_empty() {
            return Err(bad());
        }
        let mut coeff = self.field.one(1);
        let (mut i, mut a) = (0i64, Exp::zero());
        for factor in body.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b, Some(strip_group(e))),
                None => (factor, None),
            };
            match base {
                "t" => a += exp.map(parse_exp).transpose()?.unwrap_or_else(Exp::one),
                "pi" => {
                    i += exp
                        .map(|e| e.parse::<i64>().map_err(|_| bad()))
                        .transpose()?
                        .unwrap_or(1)
                }
                "w" => {
                    let k = exp
                        .map(|e| e.parse::<i128>().map_err(|_| bad()))
                        .transpose()?
                        .unwrap_or(1);
                    let g = self.field.primitive_or_generator();
                    coeff = self.field.mul(coeff, self.field.pow(g, k)?);
                }
                vec if vec.starts_with('[') => {
                    let digits = vec
                        .strip_prefix('[')
                        .and_then(|v| v.strip_suffix(']'))
                        .filter(|_| exp.is_none())
                        .ok_or_else(bad)?
                        .split(',')
                        .map(|d| d.parse::<u32>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>>>()?;
                    coeff = self.field.mul(coeff, self.field.from_coeffs(1, &digits)?);
                }
                num => {
                    if exp.is_some() {
                        return Err(bad());
                    }
                    let k: i64 = num.parse().map_err(|_| bad())?;
                    coeff = self.field.mul(coeff, self.field.from_int(1, k));
                }
            }
        }
        if neg {
            coeff = self.field.neg(coeff);
        }
        Ok((i, a, coeff))
    }

    pub fn display<'a>(&'a self, x: &'a LaurentApprox) -> impl fmt::Display + 'a {
        Display(self, x)
    }

    pub fn to_wire(&self, x: &LaurentApprox) -> SeriesWire {
        SeriesWire {
            q: self.q(),
            terms: x
                .terms
                .iter()
                .map(|(&i, c)| {
                    (
                        i,
                        c.terms
                            .iter()
                            .map(|(a, &e)| (fmt_exp(a), self.field.coeffs(e)))
                            .collect(),
                    )
                })
                .collect(),
            pi_prec: x.pi_prec,
            t_prec: x.t_prec.as_ref().map(fmt_exp),
            region: x.region,
        }
    }
}

impl FFTower {
    /// The class of `x` in level 1, which is what `w` means in series input.
    fn primitive_or_generator(&self) -> FFElem {
        self.generator(1)
    }
}

struct Display<'a>(&'a CurveField, &'a LaurentApprox);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (cf, x) = (self.0, self.1);
        let mut first = true;
        for (i, a, c) in x.monomials() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeffs = cf.field.coeffs(c);
            let c_str = if cf.field.degree(1) == 1 {
                coeffs[0].to_string()
            } else {
                format!("[{}]", coeffs.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
            };
            write!(f, "{c_str}")?;
            if !a.is_zero() {
                write!(f, "*t^{}", fmt_exp(&a))?;
            }
            if i != 0 {
                write!(f, "*pi^{i}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(p) = x.pi_prec {
            write!(f, " + O(pi^{p})")?;
        }
        if let Some(t) = x.t_prec {
            write!(f, " + O(t^{})", fmt_exp(&t))?;
        }
        Ok(())
    }
}

fn strip_group(e: &str) -> &str {
    e.trim_start_matches(['(', '{']).trim_end_matches([')', '}'])
}

fn parse_exp(s: &str) -> Result<Exp> {
    let bad = || Error::parse(format!("bad exponent {s:?}"));
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: i128 = num.parse().map_err(|_| bad())?;
    let den: i128 = den.parse().map_err(|_| bad())?;
    if den <= 0 {
        return Err(bad());
    }
    Ok(Exp::new(num, den))
}

pub fn fmt_exp(a: &Exp) -> String {
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("({}/{})", a.numer(), a.denom())
    }
}

fn check_n(n: i64) -> Result<()> {
    if n <= 0 {
        return Err(Error::domain("n must be a positive integer"));
    }
    Ok(())
}

fn min_opt<T: Ord>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

/// `bound + lower`, or no bound when the factor is exact in that direction.
fn bound_sum<T: std::ops::Add<Output = T>>(bound: Option<T>, lower: Option<T>) -> Option<T> {
    match (bound, lower) {
        (Some(b), Some(l)) => Some(b + l),
        (Some(b), None) => Some(b),
        (None, _) => None,
    }
}

/// Index tuples of length `len` over `0..base`, at most `cap` of them.
fn tuples(base: usize, len: usize, cap: usize) -> Vec<Vec<usize>> {
    let total = (base as u128).pow(len as u32).min(cap as u128) as usize;
    (0..total)
        .map(|mut code| {
            (0..len)
                .map(|_| {
                    let d = code % base;
                    code /= base;
                    d
                })
                .collect()
        })
        .collect()
}

/// A preimage plus the number of terms used from each series.
#[derive(Clone, Debug)]
pub struct Solution {
    pub preimage: LaurentApprox,
    pub g_terms: usize,
    pub g_prime_terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H0Report {
    pub n: i64,
    pub pi_prec: i64,
    pub free_coefficients: usize,
    pub sections_tested: usize,
    pub relation_holds: bool,
    pub injective: bool,
    pub linear: bool,
    pub determined_by_seeds: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NegativeReport {
    pub n: i64,
    pub window: usize,
    pub assignments_searched: u64,
    pub nonzero_solutions: u64,
    pub forcing_chain: Vec<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesWire {
    pub q: u64,
    pub terms: Vec<(i64, Vec<(String, Vec<u32>)>)>,
    pub pi_prec: Option<i64>,
    pub t_prec: Option<String>,
    pub region: Region,
}

// ------------------------------------------------------------------ radius

/// A point recorded by `a = −log|t|` and `b = −log|π|`, both positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RadiusPoint {
    a: Ratio<i64>,
    b: Ratio<i64>,
}

impl RadiusPoint {
    pub fn new(neg_log_t: Ratio<i64>, neg_log_pi: Ratio<i64>) -> Result<Self> {
        if !neg_log_t.is_positive() || !neg_log_pi.is_positive() {
            return Err(Error::domain(
                "|t| and |pi| must lie strictly between 0 and 1",
            ));
        }
        Ok(RadiusPoint {
            a: neg_log_t,
            b: neg_log_pi,
        })
    }

    /// `|t| ↦ |t|^q`.
    pub fn phi(&self, q: u64) -> Self {
        RadiusPoint {
            a: self.a * Ratio::from_integer(q as i64),
            b: self.b,
        }
    }
}

/// `κ = log|t| / log|π|`.
pub fn kappa(x: &RadiusPoint) -> Ratio<i64> {
    x.a / x.b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: i128, d: i128) -> Exp {
        Exp::new(n, d)
    }

    #[test]
    fn phi_basics() {
        let cf = CurveField::new(2, DEFAULT_DENOM_BUDGET).unwrap();
        let x = cf.parse("t*pi").unwrap();
        assert_eq!(cf.phi(&x, 1).unwrap(), cf.parse("t^2*pi").unwrap());
        let y = cf.parse("t^3 + t^(1/2)*pi^-1").unwrap();
        assert_eq!(cf.phi(&cf.phi(&y, 1).unwrap(), -1).unwrap(), y);
        let c = cf.parse("1 + pi^2").unwrap();
        assert_eq!(cf.phi(&c, 5).unwrap(), c);
    }

    #[test]
    fn display_reads_back() {
        let cf = CurveField::new(4, DEFAULT_DENOM_BUDGET).unwrap();
        let x = cf.parse("w*t^(1/2)*pi^-1 + 3 + w^2*t^5 + O(pi^4) + O(t^(7/2))").unwrap();
        assert_eq!(x.pi_prec(), Some(4));
        let text = cf.display(&x).to_string();
        assert!(text.contains('['), "{text}");
        assert_eq!(cf.parse(&text).unwrap(), x);
        assert!(cf.parse("O(x^2)").is_err());
    }

    #[test]
    fn denominator_budget() {
        let cf = CurveField::new(2, 3).unwrap();
        let x = cf.parse("t").unwrap();
        assert!(cf.phi(&x, -3).is_ok());
        assert!(matches!(cf.phi(&x, -4), Err(Error::Precision(_))));
        assert!(cf.parse("t^(1/3)").is_err());
    }

    #[test]
    fn g_series_example() {
        let cf = CurveField::new(2, DEFAULT_DENOM_BUDGET).unwrap();
        let t = cf.parse("t").unwrap();
        let g = cf.g_series(&t, 1, 3).unwrap();
        let want = cf.parse("t^(1/2) + t^(1/4)*pi + t^(1/8)*pi^2").unwrap();
        assert_eq!(g.monomials().collect::<Vec<_>>(), want.monomials().collect::<Vec<_>>());
        assert_eq!(g.pi_prec(), Some(3));
        assert!(cf.g_series(&cf.zero(), 1, 3).unwrap().is_zero());
        // residual is exactly π^K φ^{−K}(t)
        let mut exact_g = g.clone();
        exact_g.pi_prec = None;
        let img2 = cf.apply_phi_minus_pi_n(&exact_g, 1).unwrap();
        let resid = cf.sub(&t, &img2);
        assert_eq!(resid.monomials().collect::<Vec<_>>(), vec![(3, e(1, 8), cf.field().one(1))]);
    }

    #[test]
    fn g_prime_positive_form_matches_display_but_does_not_invert() {
        let cf = CurveField::new(3, DEFAULT_DENOM_BUDGET).unwrap();
        let t = cf.parse("t").unwrap();
        let g = cf.g_prime_series_positive(&t, 1, 3).unwrap();
        assert_eq!(g, cf.parse("-t*pi - t^3*pi^2 - t^9*pi^3").unwrap());
        let back = cf.apply_phi_minus_pi_n(&g, 1).unwrap();
        assert_ne!(back, t);
        // the image has a π^2 t term, so no truncation in π recovers t
        assert!(back.monomials().any(|(i, a, _)| i == 2 && a == Exp::one()));
    }

    #[test]
    fn g_prime_inverts_up_to_t_precision() {
        let cf = CurveField::new(2, DEFAULT_DENOM_BUDGET).unwrap();
        let h = cf.parse("t*pi^-1").unwrap();
        let g = cf.g_prime_series(&h, 1, 4).unwrap();
        assert_eq!(g.t_prec(), Some(Exp::from_integer(16)));
        let ok = cf.check_solution(&g, &h, 1, 100, Exp::from_integer(16)).unwrap();
        assert!(ok);
        assert!(cf.g_prime_series(&cf.parse("1*pi^-1").unwrap(), 1, 2).is_err());
        assert!(cf.g_prime_series(&cf.zero(), 1, 3).unwrap().is_zero());
    }

    #[test]
    fn solve_examples() {
        let cf = CurveField::new(2, DEFAULT_DENOM_BUDGET).unwrap();
        let tprec = Exp::from_integer(64);
        for (s, n) in [("t + t*pi", 1), ("t^(1/2)*pi^-2 + pi^3 + 1", 2), ("t^3*pi^-1 + t", 3)] {
            let target = cf.parse(s).unwrap();
            let sol = cf.solve_phi_pi(&target, n, 8, tprec).unwrap();
            assert!(cf.check_solution(&sol.preimage, &target, n, 8, tprec).unwrap(), "{s}");
        }
        let zero = cf.solve_phi_pi(&cf.zero(), 1, 8, tprec).unwrap();
        assert!(zero.preimage.is_zero());
        let t = cf.parse("t").unwrap();
        let sol = cf.solve_phi_pi(&t, 1, 8, tprec).unwrap();
        assert_eq!(sol.g_prime_terms, 0);
        assert_eq!(sol.preimage, cf.truncate(&cf.g_series(&t, 1, 8).unwrap(), None, Some(tprec)));
        assert_eq!((sol.preimage.pi_prec(), sol.preimage.t_prec()), (Some(8), Some(tprec)));
    }

    #[test]
    fn h0_recurrence() {
        let cf = CurveField::new(2, DEFAULT_DENOM_BUDGET).unwrap();
        let t = PerfCoeff {
            terms: BTreeMap::from([(Exp::one(), cf.field().one(1))]),
        };
        let s = cf.h0_basis(1, std::slice::from_ref(&t), 4).unwrap();
        assert_eq!(s, cf.truncate(&cf.parse("t + t^2*pi + t^4*pi^2 + t^8*pi^3").unwrap(), Some(4), None));
        let s2 = cf.h0_basis(2, &[t.clone(), PerfCoeff::zero()], 5).unwrap();
        assert_eq!(s2, cf.truncate(&cf.parse("t + t^2*pi^2 + t^4*pi^4").unwrap(), Some(5), None));
        assert!(cf.h0_basis(1, &[PerfCoeff::zero()], 4).unwrap().is_zero());
        let one = PerfCoeff {
            terms: BTreeMap::from([(Exp::zero(), cf.field().one(1))]),
        };
        assert!(cf.h0_basis(1, &[one], 4).is_err());
        let rep = cf.h0_report(2, 6).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.free_coefficients, 2);
    }

    #[test]
    fn negative_slopes_have_no_sections() {
        let cf = CurveField::new(2, DEFAULT_DENOM_BUDGET).unwrap();
        let r = cf.h0_negative_check(-1, 4).unwrap();
        assert!(r.passed);
        let r = cf.h0_negative_check(-2, 6).unwrap();
        assert!(r.passed && r.assignments_searched == 4096);
        assert!(cf.h0_negative_check(1, 3).is_err());
    }

    #[test]
    fn kappa_examples() {
        let r = |a, b| Ratio::new(a, b);
        let x = RadiusPoint::new(r(1, 1), r(2, 1)).unwrap();
        assert_eq!(kappa(&x), r(1, 2));
        assert_eq!(kappa(&x.phi(2)), r(1, 1));
        let y = RadiusPoint::new(r(3, 7), r(3, 7)).unwrap();
        assert_eq!(kappa(&y), r(1, 1));
        assert!(RadiusPoint::new(r(0, 1), r(1, 1)).is_err());
    }

    #[test]
    fn multiplication_precision() {
        let cf = CurveField::new(3, DEFAULT_DENOM_BUDGET).unwrap();
        let a = cf.truncate(&cf.parse("t + pi").unwrap(), Some(4), None);
        let b = cf.parse("pi^2").unwrap();
        let ab = cf.mul(&a, &b).unwrap();
        assert_eq!(ab.pi_prec(), Some(6));
        let c = cf.truncate(&cf.parse("t").unwrap(), None, Some(Exp::from_integer(5)));
        assert!(matches!(cf.mul(&a, &c), Err(Error::Precision(_))));
        // φ is multiplicative
        let x = cf.parse("t^(1/3)*pi^-1 + 2*t").unwrap();
        let y = cf.parse("t^2 + w*pi").unwrap();
        let lhs = cf.phi(&cf.mul(&x, &y).unwrap(), 1).unwrap();
        let rhs = cf.mul(&cf.phi(&x, 1).unwrap(), &cf.phi(&y, 1).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
