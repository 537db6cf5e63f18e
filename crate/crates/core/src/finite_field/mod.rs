//! Finite fields 𝔽_{q^m}, `q = p^n`, arranged in a tower of explicit embeddings.
//!
//! Level `m` of a tower is `𝔽_p[x]/(f_m)` where `f_m` is the smallest monic
//! irreducible of degree `n·m` (see [`poly::smallest_irreducible`]). An
//! element is identified by its index `Σ c_i p^i` over the power basis, so the
//! natural enumeration order is by index. Multiplication goes through
//! discrete log tables built at construction.
//!
//! Elements do not carry a pointer to their tower; every operation is a
//! method on [`FFTower`] and checks levels.

pub mod poly;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

pub use poly::FpPoly;

/// Default bound on the size of any enumerated point set or field level.
pub const DEFAULT_CAPACITY: u64 = 1 << 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FFElem {
    level: u32,
    index: u32,
}

impl FFElem {
    pub fn level(self) -> usize {
        self.level as usize
    }

    /// Position in the enumeration of its level.
    pub fn index(self) -> u64 {
        self.index as u64
    }
}

/// A field spec `q = p^n` as written on the command line (`"p^n"` or `"p"`).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
}

impl FieldSpec {
    pub fn new(p: u32, n: u32) -> Result<Self> {
        if !arith::is_prime(p as u64) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::domain("extension degree must be positive"));
        }
        Ok(FieldSpec { p, n })
    }

    pub fn q(self) -> u64 {
        (self.p as u64).pow(self.n)
    }

    /// Resolves a prime power `q` into `p^n`.
    pub fn from_order(q: u64) -> Result<Self> {
        let (p, n) = arith::prime_power(q)
            .ok_or_else(|| Error::domain(format!("{q} is not a prime power")))?;
        Self::new(p as u32, n)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (p, n) = match s.split_once('^') {
            Some((p, n)) => (p.trim(), n.trim()),
            None => (s, "1"),
        };
        let p = p
            .parse::<u32>()
            .map_err(|_| Error::parse(format!("bad field spec {s:?}")))?;
        let n = n
            .parse::<u32>()
            .map_err(|_| Error::parse(format!("bad field spec {s:?}")))?;
        Self::new(p, n)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.n)
    }
}

#[derive(Clone, Debug)]
struct FieldLevel {
    degree: usize,
    size: u64,
    modulus: FpPoly,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// Absolute trace of each power-basis vector.
    trace_basis: Vec<u32>,
}

#[derive(Clone, Debug)]
struct Embedding {
    /// Images of the power basis `x^i` of the coarse level.
    images: Vec<u32>,
    preimage: HashMap<u32, u32>,
}

/// An immutable tower `𝔽_q ⊂ 𝔽_{q^2} ⊂ … ⊂ 𝔽_{q^M}` with compatible embeddings.
#[derive(Clone, Debug)]
pub struct FFTower {
    spec: FieldSpec,
    levels: Vec<FieldLevel>,
    embeddings: HashMap<(usize, usize), Embedding>,
    capacity: u64,
}

impl FFTower {
    /// Tower with the default moduli and capacity.
    pub fn new(spec: FieldSpec, max_level: usize) -> Result<Self> {
        Self::with_capacity(spec, max_level, DEFAULT_CAPACITY)
    }

    pub fn with_capacity(spec: FieldSpec, max_level: usize, capacity: u64) -> Result<Self> {
        let moduli = (1..=max_level)
            .map(|m| poly::smallest_irreducible(spec.n as usize * m, spec.p))
            .collect();
        Self::with_moduli(spec, moduli, capacity)
    }

    /// Tower with user-chosen moduli; `moduli[m-1]` must be monic irreducible of degree `n·m`.
    pub fn with_moduli(spec: FieldSpec, moduli: Vec<FpPoly>, capacity: u64) -> Result<Self> {
        let max_level = moduli.len();
        if max_level == 0 {
            return Err(Error::domain("a tower needs at least one level"));
        }
        let top = (spec.q() as u128).pow(max_level as u32);
        if top > capacity as u128 {
            return Err(Error::capacity(
                format!("field level {max_level} over {spec}"),
                top,
                capacity as u128,
            ));
        }
        let mut levels = Vec::with_capacity(max_level);
        for (i, f) in moduli.into_iter().enumerate() {
            let d = spec.n as usize * (i + 1);
            if poly::degree(&f) != Some(d) || f[d] != 1 {
                return Err(Error::domain(format!(
                    "modulus for level {} must be monic of degree {d}",
                    i + 1
                )));
            }
            if f.iter().any(|&c| c >= spec.p) {
                return Err(Error::domain("modulus coefficients must be reduced mod p"));
            }
            if !poly::is_irreducible(&f, spec.p) {
                return Err(Error::domain(format!(
                    "modulus for level {} is reducible",
                    i + 1
                )));
            }
            levels.push(FieldLevel::build(spec.p, f));
        }
        let mut tower = FFTower {
            spec,
            levels,
            embeddings: HashMap::new(),
            capacity,
        };
        tower.build_embeddings()?;
        Ok(tower)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn p(&self) -> u32 {
        self.spec.p
    }

    pub fn q(&self) -> u64 {
        self.spec.q()
    }

    pub fn max_level(&self) -> usize {
        self.levels.len()
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    /// `q^m`, the number of elements at level `m`.
    pub fn size(&self, level: usize) -> u64 {
        self.lvl(level).size
    }

    /// Degree of level `m` over 𝔽_p.
    pub fn degree(&self, level: usize) -> usize {
        self.lvl(level).degree
    }

    pub fn modulus(&self, level: usize) -> &[u32] {
        &self.lvl(level).modulus
    }

    fn lvl(&self, level: usize) -> &FieldLevel {
        assert!(
            level >= 1 && level <= self.levels.len(),
            "level {level} outside 1..={}",
            self.levels.len()
        );
        &self.levels[level - 1]
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        if level == 0 || level > self.levels.len() {
            return Err(Error::Level {
                level,
                bound: self.levels.len(),
            });
        }
        Ok(())
    }

    // ---------------------------------------------------------------- elements

    pub fn elem(&self, level: usize, index: u64) -> Result<FFElem> {
        self.check_level(level)?;
        if index >= self.size(level) {
            return Err(Error::domain(format!(
                "index {index} out of range for level {level}"
            )));
        }
        Ok(FFElem {
            level: level as u32,
            index: index as u32,
        })
    }

    pub fn zero(&self, level: usize) -> FFElem {
        self.lvl(level);
        FFElem {
            level: level as u32,
            index: 0,
        }
    }

    pub fn one(&self, level: usize) -> FFElem {
        self.from_int(level, 1)
    }

    /// The image of an integer in the prime field, at the given level.
    pub fn from_int(&self, level: usize, k: i64) -> FFElem {
        self.lvl(level);
        FFElem {
            level: level as u32,
            index: k.rem_euclid(self.spec.p as i64) as u32,
        }
    }

    /// The class of `x` in `𝔽_p[x]/(f_m)`.
    pub fn generator(&self, level: usize) -> FFElem {
        let lv = self.lvl(level);
        let idx = if lv.degree == 1 {
            (self.spec.p - lv.modulus[0]) % self.spec.p
        } else {
            self.spec.p
        };
        FFElem {
            level: level as u32,
            index: idx,
        }
    }

    pub fn from_coeffs(&self, level: usize, coeffs: &[u32]) -> Result<FFElem> {
        self.check_level(level)?;
        let lv = self.lvl(level);
        let reduced = poly::rem(
            &coeffs.iter().map(|c| c % self.spec.p).collect::<Vec<_>>(),
            &lv.modulus,
            self.spec.p,
        );
        Ok(FFElem {
            level: level as u32,
            index: encode(&reduced, self.spec.p),
        })
    }

    /// Coefficients over 𝔽_p, length `n·m`.
    pub fn coeffs(&self, x: FFElem) -> Vec<u32> {
        decode(x.index, self.spec.p, self.lvl(x.level()).degree)
    }

    /// All elements of a level in enumeration order.
    pub fn elements(&self, level: usize) -> impl Iterator<Item = FFElem> + '_ {
        let size = self.size(level) as u32;
        (0..size).map(move |index| FFElem {
            level: level as u32,
            index,
        })
    }

    pub fn is_zero(&self, x: FFElem) -> bool {
        x.index == 0
    }

    // -------------------------------------------------------------- arithmetic

    fn align(&self, a: FFElem, b: FFElem) -> (FFElem, FFElem) {
        if a.level == b.level {
            return (a, b);
        }
        let (la, lb) = (a.level(), b.level());
        if lb % la == 0 {
            (self.embed(a, lb).expect("divisible level"), b)
        } else if la % lb == 0 {
            (a, self.embed(b, la).expect("divisible level"))
        } else {
            panic!("levels {la} and {lb} are not nested");
        }
    }

    /// Sum; operands at nested levels are embedded into the finer one.
    pub fn add(&self, a: FFElem, b: FFElem) -> FFElem {
        let (a, b) = self.align(a, b);
        FFElem {
            level: a.level,
            index: self.add_idx(a.index, b.index, 1),
        }
    }

    pub fn sub(&self, a: FFElem, b: FFElem) -> FFElem {
        let (a, b) = self.align(a, b);
        FFElem {
            level: a.level,
            index: self.add_idx(a.index, b.index, self.spec.p - 1),
        }
    }

    pub fn neg(&self, a: FFElem) -> FFElem {
        FFElem {
            level: a.level,
            index: self.add_idx(0, a.index, self.spec.p - 1),
        }
    }

    /// `a + k·b` digitwise.
    fn add_idx(&self, a: u32, b: u32, k: u32) -> u32 {
        let p = self.spec.p;
        if p == 2 {
            return if k % 2 == 1 { a ^ b } else { a };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut w = 1u32;
        while a > 0 || b > 0 {
            let d = (a % p + k * (b % p)) % p;
            out += d * w;
            a /= p;
            b /= p;
            w = w.wrapping_mul(p);
        }
        out
    }

    pub fn mul(&self, a: FFElem, b: FFElem) -> FFElem {
        let (a, b) = self.align(a, b);
        if a.index == 0 || b.index == 0 {
            return FFElem {
                level: a.level,
                index: 0,
            };
        }
        let lv = self.lvl(a.level());
        let ord = lv.size - 1;
        let e = (lv.log[a.index as usize] as u64 + lv.log[b.index as usize] as u64) % ord;
        FFElem {
            level: a.level,
            index: lv.exp[e as usize],
        }
    }

    /// Scalar multiple by an integer.
    pub fn mul_int(&self, a: FFElem, k: i64) -> FFElem {
        let k = k.rem_euclid(self.spec.p as i64) as u32;
        FFElem {
            level: a.level,
            index: self.add_idx(0, a.index, k),
        }
    }

    pub fn inv(&self, a: FFElem) -> Result<FFElem> {
        if a.index == 0 {
            return Err(Error::Arithmetic("inverse of zero in a finite field".into()));
        }
        let lv = self.lvl(a.level());
        let ord = lv.size - 1;
        let e = (ord - lv.log[a.index as usize] as u64) % ord;
        Ok(FFElem {
            level: a.level,
            index: lv.exp[e as usize],
        })
    }

    /// `a^e`; negative exponents invert (and fail on zero).
    pub fn pow(&self, a: FFElem, e: i128) -> Result<FFElem> {
        if a.index == 0 {
            return match e.cmp(&0) {
                std::cmp::Ordering::Less => {
                    Err(Error::Arithmetic("negative power of zero".into()))
                }
                std::cmp::Ordering::Equal => Ok(self.one(a.level())),
                std::cmp::Ordering::Greater => Ok(a),
            };
        }
        let lv = self.lvl(a.level());
        let ord = (lv.size - 1) as i128;
        let e = (lv.log[a.index as usize] as i128 * e.rem_euclid(ord)).rem_euclid(ord);
        Ok(FFElem {
            level: a.level,
            index: lv.exp[e as usize],
        })
    }

    /// `x^{p^e}`; negative `e` applies the inverse Frobenius.
    pub fn frobenius(&self, x: FFElem, e: i64) -> FFElem {
        if x.index == 0 {
            return x;
        }
        let lv = self.lvl(x.level());
        let ord = lv.size - 1;
        let e = e.rem_euclid(lv.degree as i64) as u64;
        let factor = arith::pow_mod(self.spec.p as u64, e, ord);
        let k = (lv.log[x.index as usize] as u64 * factor) % ord;
        FFElem {
            level: x.level,
            index: lv.exp[k as usize],
        }
    }

    /// Absolute trace to 𝔽_p, returned as an integer in `0..p`.
    pub fn abs_trace(&self, x: FFElem) -> u32 {
        let lv = self.lvl(x.level());
        let p = self.spec.p;
        let mut idx = x.index;
        let mut acc = 0u64;
        for &t in &lv.trace_basis {
            acc += (idx % p) as u64 * t as u64;
            idx /= p;
        }
        (acc % p as u64) as u32
    }

    /// `Tr_{𝔽_{q^m}/𝔽_{q^d}}` landing at level `d`.
    pub fn rel_trace(&self, x: FFElem, to_level: usize) -> Result<FFElem> {
        let m = x.level();
        if to_level == 0 || !m.is_multiple_of(to_level) {
            return Err(Error::domain(format!(
                "level {to_level} does not divide level {m}"
            )));
        }
        let step = (self.spec.n as usize * to_level) as i64;
        let mut acc = self.zero(m);
        for i in 0..(m / to_level) as i64 {
            acc = self.add(acc, self.frobenius(x, step * i));
        }
        self.restrict(acc, to_level)
    }

    /// `N_{𝔽_{q^m}/𝔽_{q^d}}` landing at level `d`.
    pub fn rel_norm(&self, x: FFElem, to_level: usize) -> Result<FFElem> {
        let m = x.level();
        if to_level == 0 || !m.is_multiple_of(to_level) {
            return Err(Error::domain(format!(
                "level {to_level} does not divide level {m}"
            )));
        }
        let step = (self.spec.n as usize * to_level) as i64;
        let mut acc = self.one(m);
        for i in 0..(m / to_level) as i64 {
            acc = self.mul(acc, self.frobenius(x, step * i));
        }
        self.restrict(acc, to_level)
    }

    /// The Artin–Schreier map `y ↦ y^q − y`.
    pub fn artin_schreier(&self, y: FFElem) -> FFElem {
        self.sub(self.frobenius(y, self.spec.n as i64), y)
    }

    /// All `y` at the level of `t` with `y^q − y = t`, in enumeration order.
    pub fn artin_schreier_fiber(&self, t: FFElem) -> Result<Vec<FFElem>> {
        let size = self.size(t.level());
        if size > self.capacity {
            return Err(Error::capacity(
                "Artin-Schreier fiber",
                size as u128,
                self.capacity as u128,
            ));
        }
        Ok(self
            .elements(t.level())
            .filter(|&y| self.artin_schreier(y) == t)
            .collect())
    }

    // ------------------------------------------------------------- embeddings

    /// Embeds `x` into a level that its own level divides.
    pub fn embed(&self, x: FFElem, to_level: usize) -> Result<FFElem> {
        let from = x.level();
        if from == to_level {
            return Ok(x);
        }
        self.check_level(to_level)?;
        let emb = self.embeddings.get(&(from, to_level)).ok_or_else(|| {
            Error::domain(format!("level {from} does not divide level {to_level}"))
        })?;
        let p = self.spec.p;
        let mut idx = x.index;
        let mut acc = 0u32;
        for &img in &emb.images {
            let c = idx % p;
            idx /= p;
            if c != 0 {
                acc = self.add_idx(acc, img, c);
            }
        }
        Ok(FFElem {
            level: to_level as u32,
            index: acc,
        })
    }

    /// Inverse of [`embed`](Self::embed) on the image of a subfield.
    pub fn restrict(&self, x: FFElem, to_level: usize) -> Result<FFElem> {
        let from = x.level();
        if from == to_level {
            return Ok(x);
        }
        let emb = self.embeddings.get(&(to_level, from)).ok_or_else(|| {
            Error::domain(format!("level {to_level} does not divide level {from}"))
        })?;
        let idx = emb.preimage.get(&x.index).ok_or_else(|| {
            Error::domain(format!("element does not lie in the level-{to_level} subfield"))
        })?;
        Ok(FFElem {
            level: to_level as u32,
            index: *idx,
        })
    }

    /// Whether `x` lies in the image of the level-`d` subfield.
    pub fn in_subfield(&self, x: FFElem, d: usize) -> bool {
        self.restrict(x, d).is_ok()
    }

    fn eval_poly_at(&self, f: &[u32], r: FFElem) -> FFElem {
        let mut acc = self.zero(r.level());
        for &c in f.iter().rev() {
            acc = self.mul(acc, r);
            acc = self.add(acc, self.from_int(r.level(), c as i64));
        }
        acc
    }

    fn embedding_from_root(&self, coarse: usize, root: FFElem) -> Embedding {
        let degree = self.degree(coarse);
        let mut images = Vec::with_capacity(degree);
        let mut pw = self.one(root.level());
        for _ in 0..degree {
            images.push(pw.index);
            pw = self.mul(pw, root);
        }
        Embedding {
            images,
            preimage: HashMap::new(),
        }
    }

    fn build_embeddings(&mut self) -> Result<()> {
        let max = self.levels.len();
        for fine in 2..=max {
            for coarse in arith::divisors(fine).into_iter().filter(|&d| d < fine) {
                let modulus = self.levels[coarse - 1].modulus.clone();
                let first = self
                    .elements(fine)
                    .find(|&r| self.is_zero(self.eval_poly_at(&modulus, r)))
                    .ok_or_else(|| Error::domain("no root of a subfield modulus found"))?;
                let mut roots: Vec<FFElem> = (0..self.degree(coarse) as i64)
                    .map(|e| self.frobenius(first, e))
                    .collect();
                roots.sort();
                roots.dedup();
                let mut chosen = None;
                for r in roots {
                    let emb = self.embedding_from_root(coarse, r);
                    self.embeddings.insert((coarse, fine), emb);
                    let compatible = arith::divisors(coarse)
                        .into_iter()
                        .filter(|&e| e < coarse)
                        .all(|e| {
                            let g = self.generator(e);
                            let via = self
                                .embed(self.embed(g, coarse).unwrap(), fine)
                                .unwrap();
                            via == self.embed(g, fine).unwrap()
                        });
                    if compatible {
                        chosen = Some(r);
                        break;
                    }
                }
                if chosen.is_none() {
                    return Err(Error::domain(format!(
                        "no compatible embedding of level {coarse} into level {fine}"
                    )));
                }
                let preimage: HashMap<u32, u32> = self
                    .elements(coarse)
                    .map(|x| (self.embed(x, fine).unwrap().index, x.index))
                    .collect();
                if preimage.len() as u64 != self.size(coarse) {
                    return Err(Error::domain("embedding is not injective"));
                }
                self.embeddings
                    .get_mut(&(coarse, fine))
                    .expect("inserted above")
                    .preimage = preimage;
            }
        }
        Ok(())
    }

    /// Checks `emb_{a→c} = emb_{b→c} ∘ emb_{a→b}` on every basis vector, for all `a | b | c`.
    pub fn embeddings_compatible(&self) -> bool {
        let max = self.levels.len();
        for c in 1..=max {
            for b in arith::divisors(c) {
                for a in arith::divisors(b) {
                    for x in self.elements(a).take(self.degree(a) * self.spec.p as usize) {
                        let direct = self.embed(x, c).unwrap();
                        let via = self.embed(self.embed(x, b).unwrap(), c).unwrap();
                        if direct != via {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    // ------------------------------------------------------------- point sets

    /// The points of 𝔸^d over level `m`, lexicographic with the first coordinate most significant.
    pub fn enumerate_points(&self, dim: usize, level: usize) -> Result<Vec<Vec<FFElem>>> {
        let count = self.point_count(dim, level)?;
        let size = self.size(level);
        Ok((0..count)
            .map(|code| self.point_from_code(dim, level, code, size))
            .collect())
    }

    /// `q^{m·d}`, checked against the capacity bound.
    pub fn point_count(&self, dim: usize, level: usize) -> Result<u64> {
        self.check_level(level)?;
        let count = (self.size(level) as u128).pow(dim as u32);
        if count > self.capacity as u128 {
            return Err(Error::capacity(
                format!("A^{dim} over level {level}"),
                count,
                self.capacity as u128,
            ));
        }
        Ok(count as u64)
    }

    fn point_from_code(&self, dim: usize, level: usize, mut code: u64, size: u64) -> Vec<FFElem> {
        let mut pt = vec![self.zero(level); dim];
        for slot in pt.iter_mut().rev() {
            slot.index = (code % size) as u32;
            code /= size;
        }
        pt
    }

    /// Position of a point in [`enumerate_points`](Self::enumerate_points) order.
    pub fn point_code(&self, pt: &[FFElem], level: usize) -> Result<u64> {
        let size = self.size(level);
        let mut code = 0u64;
        for &x in pt {
            if x.level() != level {
                return Err(Error::domain(format!(
                    "coordinate at level {} where level {level} was expected",
                    x.level()
                )));
            }
            code = code * size + x.index as u64;
        }
        Ok(code)
    }

    pub fn point_at(&self, dim: usize, level: usize, code: u64) -> Vec<FFElem> {
        self.point_from_code(dim, level, code, self.size(level))
    }

    /// JSON form of an element: coefficient array plus `(p, n, m)` header.
    pub fn to_wire(&self, x: FFElem) -> ElemWire {
        ElemWire {
            p: self.spec.p,
            n: self.spec.n,
            m: x.level() as u32,
            coeffs: self.coeffs(x),
        }
    }

    pub fn from_wire(&self, w: &ElemWire) -> Result<FFElem> {
        if w.p != self.spec.p || w.n != self.spec.n {
            return Err(Error::domain(format!(
                "element over {}^{} given to a tower over {}",
                w.p, w.n, self.spec
            )));
        }
        self.from_coeffs(w.m as usize, &w.coeffs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElemWire {
    pub p: u32,
    pub n: u32,
    pub m: u32,
    pub coeffs: Vec<u32>,
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn decode(mut index: u32, p: u32, degree: usize) -> Vec<u32> {
    let mut out = vec![0; degree];
    for c in out.iter_mut() {
        *c = index % p;
        index /= p;
    }
    out
}

impl FieldLevel {
    fn build(p: u32, modulus: FpPoly) -> FieldLevel {
        let degree = modulus.len() - 1;
        let size = (p as u64).pow(degree as u32);
        let ord = size - 1;
        let factors = arith::prime_factors(ord);
        let primitive = (1..size)
            .map(|i| decode(i as u32, p, degree))
            .find(|g| {
                factors.iter().all(|&l| {
                    let h = poly::powmod(g, (ord / l) as u128, &modulus, p);
                    h != vec![1]
                })
            })
            .unwrap_or_else(|| vec![1]);
        let mut exp = vec![0u32; ord.max(1) as usize];
        let mut log = vec![0u32; size as usize];
        let mut cur: FpPoly = vec![1];
        for (k, slot) in exp.iter_mut().enumerate() {
            let idx = encode(&cur, p);
            *slot = idx;
            log[idx as usize] = k as u32;
            cur = poly::mulmod(&cur, &primitive, &modulus, p);
        }
        let mut lv = FieldLevel {
            degree,
            size,
            modulus,
            exp,
            log,
            trace_basis: Vec::new(),
        };
        lv.trace_basis = (0..degree)
            .map(|i| {
                let mut basis = vec![0u32; i + 1];
                basis[i] = 1;
                let mut b = poly::rem(&basis, &lv.modulus, p);
                let mut acc: FpPoly = Vec::new();
                for _ in 0..degree {
                    acc = poly::add(&acc, &b, p);
                    b = poly::powmod(&b, p as u128, &lv.modulus, p);
                }
                debug_assert!(poly::degree(&acc).unwrap_or(0) == 0);
                acc.first().copied().unwrap_or(0)
            })
            .collect();
        lv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> FFTower {
        FFTower::new(FieldSpec::new(2, 1).unwrap(), 2).unwrap()
    }

    #[test]
    fn f4_by_hand() {
        // level 2 of the F_2 tower is F_2[w]/(w^2 + w + 1)
        let t = f4();
        let w = t.generator(2);
        let w2 = t.mul(w, w);
        assert_eq!(w2, t.add(w, t.one(2)));
        assert_eq!(t.add(w, w2), t.one(2));
        assert_eq!(t.frobenius(w, 1), t.add(w, t.one(2)));
        assert_eq!(t.rel_trace(w, 1).unwrap(), t.one(1));
        assert_eq!(t.rel_trace(t.one(2), 1).unwrap(), t.zero(1));
        assert_eq!(t.abs_trace(w), 1);
    }

    #[test]
    fn prime_field_inverse_and_order() {
        let t = FFTower::new(FieldSpec::new(5, 1).unwrap(), 2).unwrap();
        let g = t.from_int(1, 2);
        assert_eq!(t.mul(g, t.inv(g).unwrap()), t.one(1));
        assert!(matches!(t.inv(t.zero(1)), Err(Error::Arithmetic(_))));
        for m in 1..=2 {
            for x in t.elements(m) {
                assert_eq!(t.pow(x, t.size(m) as i128).unwrap(), x);
            }
        }
    }

    #[test]
    fn frobenius_properties() {
        let t = FFTower::new(FieldSpec::new(3, 2).unwrap(), 2).unwrap();
        for x in t.elements(2) {
            assert_eq!(t.frobenius(x, 4), x);
            assert_eq!(t.frobenius(t.frobenius(x, 1), 2), t.frobenius(x, 3));
            assert_eq!(t.frobenius(t.frobenius(x, -1), 1), x);
        }
        for c in 0..3 {
            let c = t.from_int(2, c);
            assert_eq!(t.frobenius(c, 1), c);
        }
    }

    #[test]
    fn trace_of_subfield_element_scales() {
        let t = FFTower::new(FieldSpec::new(2, 2).unwrap(), 3).unwrap();
        for x in t.elements(1) {
            let up = t.embed(x, 3).unwrap();
            let tr = t.rel_trace(up, 1).unwrap();
            assert_eq!(tr, t.mul_int(x, 3));
        }
        assert!(matches!(
            t.rel_trace(t.one(3), 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn artin_schreier_small_fibers() {
        let t5 = FFTower::new(FieldSpec::new(5, 1).unwrap(), 1).unwrap();
        assert_eq!(t5.artin_schreier_fiber(t5.zero(1)).unwrap().len(), 5);
        assert_eq!(t5.artin_schreier_fiber(t5.one(1)).unwrap().len(), 0);
        let t = f4();
        assert_eq!(t.artin_schreier_fiber(t.generator(2)).unwrap().len(), 0);
        assert_eq!(t.artin_schreier_fiber(t.one(2)).unwrap().len(), 2);
    }

    #[test]
    fn enumeration_counts_and_order() {
        let t3 = FFTower::new(FieldSpec::new(3, 1).unwrap(), 1).unwrap();
        assert_eq!(t3.enumerate_points(1, 1).unwrap().len(), 3);
        let t2 = FFTower::new(FieldSpec::new(2, 1).unwrap(), 2).unwrap();
        let pts = t2.enumerate_points(2, 1).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1], vec![t2.zero(1), t2.one(1)]);
        assert_eq!(t2.enumerate_points(1, 2).unwrap().len(), 4);
        for (i, pt) in pts.iter().enumerate() {
            assert_eq!(t2.point_code(pt, 1).unwrap(), i as u64);
        }
        let small = FFTower::with_capacity(FieldSpec::new(2, 1).unwrap(), 2, 64).unwrap();
        assert!(matches!(
            small.enumerate_points(4, 2),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn embeddings_compose() {
        for (p, n, m) in [(2, 1, 6), (2, 2, 4), (3, 1, 4), (2, 3, 2)] {
            let t = FFTower::new(FieldSpec::new(p, n).unwrap(), m).unwrap();
            assert!(t.embeddings_compatible(), "{p}^{n} up to {m}");
            // embeddings are ring homomorphisms
            for a in t.elements(2).step_by(3) {
                for b in t.elements(2).step_by(5) {
                    let (ea, eb) = (t.embed(a, m).unwrap(), t.embed(b, m).unwrap());
                    if m % 2 == 0 {
                        assert_eq!(t.embed(t.mul(a, b), m).unwrap(), t.mul(ea, eb));
                        assert_eq!(t.embed(t.add(a, b), m).unwrap(), t.add(ea, eb));
                    }
                }
            }
        }
    }

    #[test]
    fn user_moduli_are_checked() {
        let spec = FieldSpec::new(2, 1).unwrap();
        assert!(FFTower::with_moduli(spec, vec![vec![0, 1], vec![1, 0, 1]], 1 << 10).is_err());
        let t = FFTower::with_moduli(spec, vec![vec![1, 1], vec![1, 1, 1]], 1 << 10).unwrap();
        assert_eq!(t.size(2), 4);
    }

    #[test]
    fn field_spec_parsing() {
        assert_eq!(FieldSpec::parse("5^1").unwrap(), FieldSpec { p: 5, n: 1 });
        assert_eq!(FieldSpec::parse("3^2").unwrap().q(), 9);
        assert_eq!(FieldSpec::parse("7").unwrap().q(), 7);
        assert!(FieldSpec::parse("6^1").is_err());
        assert!(FieldSpec::parse("x").is_err());
        assert_eq!(FieldSpec::from_order(8).unwrap(), FieldSpec { p: 2, n: 3 });
    }

    #[test]
    fn wire_roundtrip() {
        let t = FFTower::new(FieldSpec::new(3, 2).unwrap(), 1).unwrap();
        for x in t.elements(1) {
            assert_eq!(t.from_wire(&t.to_wire(x)).unwrap(), x);
        }
    }
}
