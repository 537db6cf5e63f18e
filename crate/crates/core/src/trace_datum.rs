//! Trace-function families on affine spaces and the function-level six-functor calculus.
//!
//! A [`TraceDatum`] on 𝔸^d with level bound `M` stores, for each level
//! `m ≤ M`, one value in ℚ(ζ_p) per point of 𝔸^d(𝔽_{q^m}), in the
//! enumeration order of [`FFTower::enumerate_points`]. Everything is
//! computed eagerly, so a datum is an immutable value.
//!
//! Levels above 1 of a character datum use `ψ ∘ Tr_{𝔽_{q^m}/𝔽_q}`. That
//! extension is a construction of this crate, validated by the Fourier
//! inversion checks rather than assumed.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::finite_field::{FFElem, FFTower, FieldSpec};

/// Which Frobenius the trace is taken against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Arithmetic,
    Geometric,
}

/// `ψ_a(x) = ζ_p^{u·Tr(a x)}`, conjugated in the geometric flavor.
#[derive(Clone, Debug)]
pub struct AdditiveCharacter {
    tower: Arc<FFTower>,
    u: u32,
    a: FFElem,
    flavor: Flavor,
}

impl AdditiveCharacter {
    /// `u` must be a unit mod `p`; `a` is taken at level 1.
    pub fn new(tower: Arc<FFTower>, u: u32, a: FFElem, flavor: Flavor) -> Result<Self> {
        let p = tower.p();
        if u.is_multiple_of(p) {
            return Err(Error::domain("character exponent u must be a unit mod p"));
        }
        if a.level() != 1 {
            return Err(Error::domain("the twist parameter a must lie in F_q"));
        }
        Ok(AdditiveCharacter {
            tower,
            u: u % p,
            a,
            flavor,
        })
    }

    /// The standard character `x ↦ ζ_p^{Tr(x)}` in the given flavor.
    pub fn standard(tower: Arc<FFTower>, flavor: Flavor) -> Self {
        let a = tower.one(1);
        AdditiveCharacter::new(tower, 1, a, flavor).expect("1 is a unit")
    }

    pub fn tower(&self) -> &Arc<FFTower> {
        &self.tower
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn a(&self) -> FFElem {
        self.a
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn is_trivial(&self) -> bool {
        self.tower.is_zero(self.a)
    }

    /// `ψ_{ab}` for `b ∈ 𝔽_q`.
    pub fn twisted(&self, b: FFElem) -> Result<Self> {
        let ab = self.tower.mul(self.a, b);
        AdditiveCharacter::new(self.tower.clone(), self.u, ab, self.flavor)
    }

    /// `ψ⁻¹`, obtained by negating `u`.
    pub fn inverse(&self) -> Self {
        let p = self.tower.p();
        AdditiveCharacter {
            u: p - self.u,
            ..self.clone()
        }
    }

    /// The other flavor (complex conjugate values).
    pub fn conjugate_flavor(&self) -> Self {
        let flavor = match self.flavor {
            Flavor::Arithmetic => Flavor::Geometric,
            Flavor::Geometric => Flavor::Arithmetic,
        };
        AdditiveCharacter {
            flavor,
            ..self.clone()
        }
    }

    /// Exponent `j` in `ψ_a(x) = ζ_p^j`, as an integer in `0..p`.
    pub fn exponent(&self, x: FFElem) -> u32 {
        let p = self.tower.p();
        let tr = self.tower.abs_trace(self.tower.mul(self.a, x));
        let e = (self.u as u64 * tr as u64 % p as u64) as u32;
        match self.flavor {
            Flavor::Arithmetic => e,
            Flavor::Geometric => (p - e) % p,
        }
    }

    pub fn eval(&self, x: FFElem) -> CycNum {
        CycNum::root_of_unity(self.tower.p() as u64, self.exponent(x) as i64)
            .expect("p is prime")
    }

    /// Like [`eval`](Self::eval) but refuses levels above `bound`.
    pub fn eval_bounded(&self, x: FFElem, bound: usize) -> Result<CycNum> {
        if x.level() > bound {
            return Err(Error::Level {
                level: x.level(),
                bound,
            });
        }
        Ok(self.eval(x))
    }
}

/// A polynomial map 𝔸^n → 𝔸^k with coefficients in 𝔽_q.
///
/// Each output coordinate is a list of terms `c·x^e` with `c` at level 1.
#[derive(Clone, Debug)]
pub struct PointMap {
    in_dim: usize,
    out_dim: usize,
    coords: Vec<Vec<(FFElem, Vec<u32>)>>,
}

impl PointMap {
    pub fn from_terms(in_dim: usize, coords: Vec<Vec<(FFElem, Vec<u32>)>>) -> Result<Self> {
        for term in coords.iter().flatten() {
            if term.0.level() != 1 {
                return Err(Error::domain("point-map coefficients must lie in F_q"));
            }
            if term.1.len() != in_dim {
                return Err(Error::domain("monomial arity does not match the source dimension"));
            }
        }
        Ok(PointMap {
            in_dim,
            out_dim: coords.len(),
            coords,
        })
    }

    pub fn identity(tower: &FFTower, dim: usize) -> Self {
        let coords = (0..dim)
            .map(|i| vec![(tower.one(1), unit_exp(dim, i, 1))])
            .collect();
        PointMap {
            in_dim: dim,
            out_dim: dim,
            coords,
        }
    }

    /// Projection 𝔸^n → 𝔸¹ onto coordinate `i`.
    pub fn projection(tower: &FFTower, dim: usize, i: usize) -> Self {
        PointMap {
            in_dim: dim,
            out_dim: 1,
            coords: vec![vec![(tower.one(1), unit_exp(dim, i, 1))]],
        }
    }

    /// The multiplication map 𝔸² → 𝔸¹, `(t, x) ↦ t·x`.
    pub fn multiplication(tower: &FFTower) -> Self {
        PointMap {
            in_dim: 2,
            out_dim: 1,
            coords: vec![vec![(tower.one(1), vec![1, 1])]],
        }
    }

    /// `x ↦ a·x` on 𝔸¹.
    pub fn scaling(a: FFElem) -> Result<Self> {
        Self::from_terms(1, vec![vec![(a, vec![1])]])
    }

    /// `x ↦ x^k` on 𝔸¹.
    pub fn power(tower: &FFTower, k: u32) -> Self {
        PointMap {
            in_dim: 1,
            out_dim: 1,
            coords: vec![vec![(tower.one(1), vec![k])]],
        }
    }

    /// 𝔸^n → 𝔸⁰.
    pub fn to_point(dim: usize) -> Self {
        PointMap {
            in_dim: dim,
            out_dim: 0,
            coords: Vec::new(),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn eval(&self, tower: &FFTower, x: &[FFElem], level: usize) -> Vec<FFElem> {
        self.coords
            .iter()
            .map(|terms| {
                let mut acc = tower.zero(level);
                for (c, exps) in terms {
                    let mut mono = tower.embed(*c, level).expect("level 1 divides every level");
                    for (&xi, &e) in x.iter().zip(exps) {
                        if e > 0 {
                            mono = tower.mul(mono, tower.pow(xi, e as i128).expect("e > 0"));
                        }
                    }
                    acc = tower.add(acc, mono);
                }
                acc
            })
            .collect()
    }
}

fn unit_exp(dim: usize, i: usize, e: u32) -> Vec<u32> {
    let mut v = vec![0; dim];
    v[i] = e;
    v
}

/// Values of a trace function at every level `1..=M`.
#[derive(Clone, Debug)]
pub struct TraceDatum {
    tower: Arc<FFTower>,
    dim: usize,
    levels: Vec<Vec<CycNum>>,
}

impl PartialEq for TraceDatum {
    fn eq(&self, other: &Self) -> bool {
        self.tower.spec() == other.tower.spec()
            && self.dim == other.dim
            && self.levels == other.levels
    }
}

impl TraceDatum {
    /// Builds a datum from a function of `(level, point)`.
    pub fn from_fn<F>(tower: Arc<FFTower>, dim: usize, max_level: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, &[FFElem]) -> Result<CycNum>,
    {
        let order = tower.p() as u64;
        tower.check_level(max_level)?;
        let mut levels = Vec::with_capacity(max_level);
        for m in 1..=max_level {
            let count = tower.point_count(dim, m)?;
            let mut vals = Vec::with_capacity(count as usize);
            for code in 0..count {
                let pt = tower.point_at(dim, m, code);
                let v = f(m, &pt)?;
                if v.order() != order {
                    return Err(Error::domain(format!(
                        "trace values must lie in Q(zeta_{order}), got order {}",
                        v.order()
                    )));
                }
                vals.push(v);
            }
            levels.push(vals);
        }
        Ok(TraceDatum { tower, dim, levels })
    }

    /// Builds a datum from explicit tables, `tables[m-1][code]`.
    pub fn from_tables(tower: Arc<FFTower>, dim: usize, tables: Vec<Vec<CycNum>>) -> Result<Self> {
        let max = tables.len();
        let mut it = tables.into_iter();
        let mut cur: Vec<CycNum> = Vec::new();
        let mut cur_level = 0;
        Self::from_fn(tower.clone(), dim, max, |m, pt| {
            if m != cur_level {
                cur = it.next().expect("one table per level");
                cur_level = m;
                if cur.len() as u64 != tower.point_count(dim, m)? {
                    return Err(Error::domain(format!("table for level {m} has the wrong length")));
                }
            }
            Ok(cur[tower.point_code(pt, m)? as usize].clone())
        })
    }

    pub fn constant(tower: Arc<FFTower>, dim: usize, max_level: usize, c: &CycNum) -> Result<Self> {
        Self::from_fn(tower, dim, max_level, |_, _| Ok(c.clone()))
    }

    pub fn zero(tower: Arc<FFTower>, dim: usize, max_level: usize) -> Result<Self> {
        let z = CycNum::zero(tower.p() as u64)?;
        Self::constant(tower, dim, max_level, &z)
    }

    pub fn one(tower: Arc<FFTower>, dim: usize, max_level: usize) -> Result<Self> {
        let o = CycNum::one(tower.p() as u64)?;
        Self::constant(tower, dim, max_level, &o)
    }

    /// The delta function at a point defined over 𝔽_q.
    pub fn delta(tower: Arc<FFTower>, max_level: usize, at: &[FFElem]) -> Result<Self> {
        let p = tower.p() as u64;
        let t = tower.clone();
        Self::from_fn(tower, at.len(), max_level, |m, pt| {
            let hit = pt
                .iter()
                .zip(at)
                .all(|(&x, &a)| t.embed(a, m).map(|a| a == x).unwrap_or(false));
            CycNum::from_integer(p, hit as i64)
        })
    }

    /// The trace function of `𝓛(ψ_a)` on 𝔸¹.
    pub fn character(psi: &AdditiveCharacter, max_level: usize) -> Result<Self> {
        Self::from_fn(psi.tower().clone(), 1, max_level, |_, pt| Ok(psi.eval(pt[0])))
    }

    /// Random values with small integer coefficients, deterministic in `rng`.
    pub fn random<R: Rng>(
        tower: Arc<FFTower>,
        dim: usize,
        max_level: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let p = tower.p() as u64;
        let len = (p - 1) as usize;
        Self::from_fn(tower, dim, max_level, |_, _| {
            let coeffs = (0..len)
                .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-4i64..=4))))
                .collect();
            CycNum::from_coeffs(p, coeffs)
        })
    }

    pub fn tower(&self) -> &Arc<FFTower> {
        &self.tower
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_level(&self) -> usize {
        self.levels.len()
    }

    /// Values at level `m` in point enumeration order.
    pub fn level(&self, m: usize) -> Result<&[CycNum]> {
        if m == 0 || m > self.levels.len() {
            return Err(Error::Level {
                level: m,
                bound: self.levels.len(),
            });
        }
        Ok(&self.levels[m - 1])
    }

    pub fn value(&self, pt: &[FFElem]) -> Result<&CycNum> {
        if pt.len() != self.dim {
            return Err(Error::domain("point has the wrong dimension"));
        }
        let m = pt.first().map(|x| x.level()).unwrap_or(1);
        let code = self.tower.point_code(pt, m)?;
        Ok(&self.level(m)?[code as usize])
    }

    /// Value at a point of 𝔸⁰ (a single number per level).
    pub fn point_value(&self, m: usize) -> Result<&CycNum> {
        if self.dim != 0 {
            return Err(Error::domain("datum is not on a point"));
        }
        Ok(&self.level(m)?[0])
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.tower.spec() != other.tower.spec() {
            return Err(Error::domain("trace data over different fields"));
        }
        if self.dim != other.dim {
            return Err(Error::domain(format!(
                "space mismatch: A^{} vs A^{}",
                self.dim, other.dim
            )));
        }
        if self.levels.len() != other.levels.len() {
            return Err(Error::domain("level bounds differ"));
        }
        Ok(())
    }

    fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(&CycNum, &CycNum) -> CycNum,
    {
        self.check_compatible(other)?;
        let levels = self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
            .collect();
        Ok(TraceDatum {
            tower: self.tower.clone(),
            dim: self.dim,
            levels,
        })
    }

    /// `(m, value) ↦ value'` on every entry.
    pub fn map_levels<F>(&self, f: F) -> Self
    where
        F: Fn(usize, &CycNum) -> CycNum,
    {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(i, vals)| vals.iter().map(|v| f(i + 1, v)).collect())
            .collect();
        TraceDatum {
            tower: self.tower.clone(),
            dim: self.dim,
            levels,
        }
    }

    /// Pointwise product.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &CycNum) -> Self {
        self.map_levels(|_, v| v * c)
    }

    /// `[k]`: multiplies every value by `(−1)^k`.
    pub fn shift(&self, k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            self.clone()
        } else {
            self.map_levels(|_, v| -v)
        }
    }

    /// `(d)`: multiplies level-`m` values by `q^{−d·m}`.
    pub fn tate_twist(&self, d: i64) -> Self {
        let q = BigInt::from(self.tower.q());
        self.map_levels(|m, v| {
            let e = d * m as i64;
            let factor = if e <= 0 {
                BigRational::from_integer(num_traits::pow(q.clone(), (-e) as usize))
            } else {
                BigRational::new(BigInt::one(), num_traits::pow(q.clone(), e as usize))
            };
            v.scale(&factor)
        })
    }

    /// Complex conjugate of every value.
    pub fn conj(&self) -> Self {
        self.map_levels(|_, v| v.conj())
    }

    /// `f^*A`: the value at `x` is `A(f(x))`.
    pub fn pullback(&self, f: &PointMap) -> Result<Self> {
        if f.out_dim() != self.dim {
            return Err(Error::domain(format!(
                "map lands in A^{} but the datum lives on A^{}",
                f.out_dim(),
                self.dim
            )));
        }
        let tower = self.tower.clone();
        Self::from_fn(tower.clone(), f.in_dim(), self.max_level(), |m, x| {
            let y = f.eval(&tower, x, m);
            let code = tower.point_code(&y, m)?;
            self.levels[m - 1]
                .get(code as usize)
                .cloned()
                .ok_or_else(|| Error::domain("map evaluates outside the enumerated space"))
        })
    }

    /// `f_!A`: the value at `y` is the sum of `A` over the 𝔽_{q^m}-fiber of `f` at `y`.
    pub fn pushforward_c(&self, f: &PointMap) -> Result<Self> {
        if f.in_dim() != self.dim {
            return Err(Error::domain(format!(
                "map starts on A^{} but the datum lives on A^{}",
                f.in_dim(),
                self.dim
            )));
        }
        let tower = &self.tower;
        let p = tower.p() as u64;
        let mut levels = Vec::with_capacity(self.max_level());
        for m in 1..=self.max_level() {
            let out_count = tower.point_count(f.out_dim(), m)?;
            let mut acc = vec![CycNum::zero(p)?; out_count as usize];
            for (code, v) in self.levels[m - 1].iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let x = tower.point_at(self.dim, m, code as u64);
                let y = f.eval(tower, &x, m);
                acc[tower.point_code(&y, m)? as usize] += v;
            }
            levels.push(acc);
        }
        Ok(TraceDatum {
            tower: self.tower.clone(),
            dim: f.out_dim(),
            levels,
        })
    }

    /// Sum of all values at level `m`.
    pub fn total(&self, m: usize) -> Result<CycNum> {
        let mut acc = CycNum::zero(self.tower.p() as u64)?;
        for v in self.level(m)? {
            acc += v;
        }
        Ok(acc)
    }

    pub fn to_wire(&self) -> DatumWire {
        let mut levels = BTreeMap::new();
        for (i, vals) in self.levels.iter().enumerate() {
            let m = i + 1;
            let rows = vals
                .iter()
                .enumerate()
                .map(|(code, v)| {
                    let pt = self
                        .tower
                        .point_at(self.dim, m, code as u64)
                        .into_iter()
                        .map(|x| self.tower.coeffs(x))
                        .collect();
                    (pt, v.clone())
                })
                .collect();
            levels.insert(m.to_string(), rows);
        }
        DatumWire {
            space: self.dim,
            q: self.tower.spec().to_string(),
            levels,
        }
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        Ok(serde_json::to_value(self.to_wire())?)
    }

    /// Reads a datum over `tower`; every level from 1 up to the largest key must be present.
    pub fn from_wire(tower: Arc<FFTower>, wire: &DatumWire) -> Result<Self> {
        let spec = FieldSpec::parse(&wire.q)?;
        if spec != tower.spec() {
            return Err(Error::domain(format!(
                "datum over {} given to a tower over {}",
                spec,
                tower.spec()
            )));
        }
        let mut parsed: BTreeMap<usize, &Vec<(Vec<Vec<u32>>, CycNum)>> = BTreeMap::new();
        for (k, rows) in &wire.levels {
            let m = k
                .parse::<usize>()
                .map_err(|_| Error::parse(format!("bad level key {k:?}")))?;
            parsed.insert(m, rows);
        }
        let max = parsed.keys().next_back().copied().unwrap_or(0);
        if max == 0 || (1..=max).any(|m| !parsed.contains_key(&m)) {
            return Err(Error::parse("levels must be 1..M without gaps"));
        }
        let mut tables = Vec::with_capacity(max);
        for m in 1..=max {
            tower.check_level(m)?;
            let count = tower.point_count(wire.space, m)? as usize;
            let mut table: Vec<Option<CycNum>> = vec![None; count];
            for (pt, v) in parsed[&m] {
                if pt.len() != wire.space {
                    return Err(Error::parse("point of the wrong dimension"));
                }
                let elems = pt
                    .iter()
                    .map(|c| tower.from_coeffs(m, c))
                    .collect::<Result<Vec<_>>>()?;
                let code = tower.point_code(&elems, m)? as usize;
                table[code] = Some(v.clone());
            }
            let table = table
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::parse(format!("level {m} is missing points")))?;
            tables.push(table);
        }
        Self::from_tables(tower, wire.space, tables)
    }

    pub fn from_json(tower: Arc<FFTower>, value: &serde_json::Value) -> Result<Self> {
        let wire: DatumWire = serde_json::from_value(value.clone())?;
        Self::from_wire(tower, &wire)
    }

    /// CSV with columns `level,point,value`; point coordinates are `;`-separated
    /// coefficient strings, and values use the display form.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["level", "point", "value"])
            .map_err(|e| Error::Io(e.to_string()))?;
        for (i, vals) in self.levels.iter().enumerate() {
            let m = i + 1;
            for (code, v) in vals.iter().enumerate() {
                let pt = self
                    .tower
                    .point_at(self.dim, m, code as u64)
                    .into_iter()
                    .map(|x| {
                        self.tower
                            .coeffs(x)
                            .iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect::<Vec<_>>()
                    .join(";");
                w.write_record([m.to_string(), pt, v.to_string()])
                    .map_err(|e| Error::Io(e.to_string()))?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatumWire {
    pub space: usize,
    pub q: String,
    pub levels: BTreeMap<String, Vec<(Vec<Vec<u32>>, CycNum)>>,
}

/// Outcome of the Artin–Schreier fiber count versus character sum comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArtinSchreierReport {
    pub q: u64,
    pub level: usize,
    pub targets: u64,
    pub passed: bool,
    /// `(t index, fiber size, character sum)` of the first mismatch.
    pub counterexample: Option<(u64, u64, String)>,
}

/// Checks `#{y : y^q − y = t} = Σ_{x∈𝔽_q} ψ(Tr_{𝔽_{q^m}/𝔽_q}(x t))` for every `t`.
pub fn artin_schreier_identity_check(tower: &Arc<FFTower>, level: usize) -> Result<ArtinSchreierReport> {
    tower.check_level(level)?;
    let size = tower.point_count(1, level)?;
    let p = tower.p() as u64;
    let psi = AdditiveCharacter::standard(tower.clone(), Flavor::Arithmetic);
    // fiber sizes by a single pass over y
    let mut fibers = vec![0u64; size as usize];
    for y in tower.elements(level) {
        fibers[tower.artin_schreier(y).index() as usize] += 1;
    }
    for t in tower.elements(level) {
        let tr = tower.rel_trace(t, 1)?;
        let mut sum = CycNum::zero(p)?;
        for x in tower.elements(1) {
            sum += &psi.eval(tower.mul(x, tr));
        }
        let count = fibers[t.index() as usize];
        let expected = CycNum::from_integer(p, count as i64)?;
        if sum != expected {
            return Ok(ArtinSchreierReport {
                q: tower.q(),
                level,
                targets: size,
                passed: false,
                counterexample: Some((t.index(), count, sum.to_string())),
            });
        }
    }
    Ok(ArtinSchreierReport {
        q: tower.q(),
        level,
        targets: size,
        passed: true,
        counterexample: None,
    })
}

/// `ψ_a`-datum values summed over a level: `q^m` when `a = 0`, else 0.
pub fn character_total(psi: &AdditiveCharacter, level: usize) -> Result<CycNum> {
    let p = psi.tower().p() as u64;
    let mut acc = CycNum::zero(p)?;
    for x in psi.tower().elements(level) {
        acc += &psi.eval(x);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(p: u32, n: u32, m: usize) -> Arc<FFTower> {
        Arc::new(FFTower::new(FieldSpec::new(p, n).unwrap(), m).unwrap())
    }

    #[test]
    fn character_basics() {
        let t = tower(5, 1, 1);
        let psi = AdditiveCharacter::standard(t.clone(), Flavor::Arithmetic);
        assert!(psi.eval(t.zero(1)).is_one());
        assert!(character_total(&psi, 1).unwrap().is_zero());
        let triv = psi.twisted(t.zero(1)).unwrap();
        assert!(triv.is_trivial());
        assert!(t.elements(1).all(|x| triv.eval(x).is_one()));
        assert!(matches!(
            psi.eval_bounded(t.one(1), 0),
            Err(Error::Level { .. })
        ));
    }

    #[test]
    fn geometric_value_on_f4() {
        let t = tower(2, 1, 2);
        let psi = AdditiveCharacter::standard(t.clone(), Flavor::Geometric);
        let d = TraceDatum::character(&psi, 2).unwrap();
        let w = t.generator(2);
        assert_eq!(*d.value(&[w]).unwrap(), CycNum::from_integer(2, -1).unwrap());
    }

    #[test]
    fn shift_and_twist() {
        let t = tower(5, 1, 2);
        let one = TraceDatum::one(t.clone(), 1, 2).unwrap();
        assert_eq!(one.shift(2), one);
        assert_eq!(one.shift(1).shift(1), one);
        let minus = one.shift(1);
        assert!(minus.level(1).unwrap().iter().all(|v| *v == CycNum::from_integer(5, -1).unwrap()));
        let tw = one.tate_twist(-1);
        assert!(tw.level(1).unwrap().iter().all(|v| *v == CycNum::from_integer(5, 5).unwrap()));
        assert!(tw.level(2).unwrap().iter().all(|v| *v == CycNum::from_integer(5, 25).unwrap()));
        assert_eq!(tw.tate_twist(1), one);
        assert_eq!(one.tate_twist(0), one);
    }

    #[test]
    fn pushforward_of_squaring() {
        let t = tower(5, 1, 1);
        let one = TraceDatum::one(t.clone(), 1, 1).unwrap();
        let sq = one.pushforward_c(&PointMap::power(&t, 2)).unwrap();
        let four = t.from_int(1, 4);
        assert_eq!(*sq.value(&[four]).unwrap(), CycNum::from_integer(5, 2).unwrap());
        assert!(sq.value(&[t.from_int(1, 2)]).unwrap().is_zero());
        let pt = one.pushforward_c(&PointMap::to_point(1)).unwrap();
        assert_eq!(*pt.point_value(1).unwrap(), CycNum::from_integer(5, 5).unwrap());
    }

    #[test]
    fn pullback_along_scaling_twists() {
        let t = tower(3, 2, 1);
        let psi = AdditiveCharacter::standard(t.clone(), Flavor::Geometric);
        let base = TraceDatum::character(&psi, 1).unwrap();
        for a in t.elements(1) {
            let pulled = base.pullback(&PointMap::scaling(a).unwrap()).unwrap();
            let direct = TraceDatum::character(&psi.twisted(a).unwrap(), 1).unwrap();
            assert_eq!(pulled, direct);
        }
    }

    #[test]
    fn tensor_of_characters_adds_parameters() {
        let t = tower(3, 1, 2);
        let psi = AdditiveCharacter::standard(t.clone(), Flavor::Arithmetic);
        let (a, b) = (t.from_int(1, 1), t.from_int(1, 2));
        let lhs = TraceDatum::character(&psi.twisted(a).unwrap(), 2)
            .unwrap()
            .tensor(&TraceDatum::character(&psi.twisted(b).unwrap(), 2).unwrap())
            .unwrap();
        let rhs = TraceDatum::character(&psi.twisted(t.add(a, b)).unwrap(), 2).unwrap();
        assert_eq!(lhs, rhs);
        let z = TraceDatum::zero(t.clone(), 1, 2).unwrap();
        assert_eq!(lhs.tensor(&z).unwrap(), z);
        let two = TraceDatum::one(t.clone(), 2, 2).unwrap();
        assert!(matches!(lhs.tensor(&two), Err(Error::Domain(_))));
    }

    #[test]
    fn artin_schreier_identity_small() {
        for (p, n, m) in [(2, 1, 2), (5, 1, 1), (3, 1, 2), (2, 2, 2)] {
            let t = tower(p, n, m);
            let r = artin_schreier_identity_check(&t, m).unwrap();
            assert!(r.passed, "{p}^{n} level {m}: {r:?}");
        }
    }

    #[test]
    fn json_and_csv_roundtrip() {
        use rand::SeedableRng;
        let t = tower(3, 1, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let d = TraceDatum::random(t.clone(), 1, 2, &mut rng).unwrap();
        let back = TraceDatum::from_json(t.clone(), &d.to_json().unwrap()).unwrap();
        assert_eq!(back, d);
        let csv = d.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 1 + 3 + 9);
        assert!(csv.starts_with("level,point,value"));
    }
}
