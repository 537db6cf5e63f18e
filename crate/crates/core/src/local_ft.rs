//! Exact Fourier analysis on finite quotients `G = π^{−N}𝒪 / π^M 𝒪` of a local field.
//!
//! Elements are digit strings for the π-powers `−N..M−1`. In equal
//! characteristic the digits lie in `𝔽_q` and add without carries. In
//! `ℚ_p` mode the digits are base-`p` digits of `a = p^N x ∈ ℤ/p^{N+M}`.
//!
//! The standard character is trivial on `𝒪` and reads the digit of `π^{−1}`.
//! The pairing is `⟨x, y⟩ = ψ(π^{N−M}·x·y)`. Without the shift `N − M` the
//! pairing is only well defined and perfect when `N = M`. The shift is
//! reported as `conductor_shift` wherever a transform is emitted.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::finite_field::{FFElem, FFTower, FieldSpec};

/// Largest `|G|` accepted by default.
pub const DEFAULT_CAPACITY: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `𝔽_q((π))`
    EqualChar,
    /// `ℚ_p`, residue field `𝔽_p`
    MixedChar,
}

#[derive(Clone, Debug)]
pub struct LocalQuotient {
    mode: Mode,
    tower: Arc<FFTower>,
    n: u32,
    m: u32,
    size: u64,
    order: u64,
    /// Digits of every element, `N + M` per element.
    digit_table: Vec<u32>,
    /// Absolute trace of each `𝔽_q` element.
    trace_table: Vec<u32>,
    /// `Tr(a·b)` for digit pairs, when `q` is small enough to tabulate.
    trace_product: Option<Vec<u16>>,
}

impl LocalQuotient {
    pub fn new(q: u64, n: u32, m: u32, mode: Mode) -> Result<Self> {
        Self::with_capacity(q, n, m, mode, DEFAULT_CAPACITY)
    }

    pub fn with_capacity(q: u64, n: u32, m: u32, mode: Mode, capacity: u64) -> Result<Self> {
        let spec = FieldSpec::from_order(q)?;
        if mode == Mode::MixedChar && spec.n != 1 {
            return Err(Error::domain("Q_p mode needs a prime residue cardinality"));
        }
        let size = crate::arith::checked_pow(q, n + m, "local quotient")?;
        if size > capacity {
            return Err(Error::capacity("local quotient", size as u128, capacity as u128));
        }
        let order = match mode {
            Mode::EqualChar => spec.p as u64,
            Mode::MixedChar => size.max(spec.p as u64),
        };
        let tower = Arc::new(FFTower::new(spec, 1)?);
        let trace_table: Vec<u32> = tower.elements(1).map(|x| tower.abs_trace(x)).collect();
        let trace_product = (q <= 256).then(|| {
            let elems: Vec<FFElem> = tower.elements(1).collect();
            elems
                .iter()
                .flat_map(|&a| elems.iter().map(move |&b| (a, b)))
                .map(|(a, b)| trace_table[tower.mul(a, b).index() as usize] as u16)
                .collect()
        });
        let mut g = LocalQuotient {
            mode,
            tower,
            n,
            m,
            size,
            order,
            digit_table: Vec::new(),
            trace_table,
            trace_product,
        };
        g.digit_table = (0..size).flat_map(|x| g.digits(x)).collect();
        Ok(g)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn q(&self) -> u64 {
        self.tower.q()
    }

    pub fn p(&self) -> u32 {
        self.tower.p()
    }

    pub fn window(&self) -> (u32, u32) {
        (self.n, self.m)
    }

    /// `|G| = q^{N+M}`.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Order of the roots of unity taken by ψ.
    pub fn char_order(&self) -> u64 {
        self.order
    }

    pub fn conductor_shift(&self) -> i64 {
        self.n as i64 - self.m as i64
    }

    /// Digits from `π^{−N}` up to `π^{M−1}`, as `𝔽_q` indices (or `ℤ/p` residues).
    pub fn digits(&self, x: u64) -> Vec<u32> {
        let q = self.q();
        let mut x = x;
        (0..self.n + self.m)
            .map(|_| {
                let d = (x % q) as u32;
                x /= q;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> u64 {
        digits.iter().rev().fold(0u64, |acc, &d| acc * self.q() + d as u64)
    }

    fn digit(&self, d: u32) -> FFElem {
        self.tower.elem(1, d as u64).expect("digit below q")
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        match self.mode {
            Mode::MixedChar => (x + y) % self.size,
            Mode::EqualChar => {
                let d: Vec<u32> = self
                    .digits(x)
                    .iter()
                    .zip(self.digits(y))
                    .map(|(&a, b)| self.tower.add(self.digit(a), self.digit(b)).index() as u32)
                    .collect();
                self.from_digits(&d)
            }
        }
    }

    pub fn neg(&self, x: u64) -> u64 {
        match self.mode {
            Mode::MixedChar => (self.size - x) % self.size,
            Mode::EqualChar => {
                let d: Vec<u32> = self
                    .digits(x)
                    .iter()
                    .map(|&a| self.tower.neg(self.digit(a)).index() as u32)
                    .collect();
                self.from_digits(&d)
            }
        }
    }

    /// Exponent `e` with `ψ(x) = ζ^e`.
    pub fn psi_exponent(&self, x: u64) -> u64 {
        match self.mode {
            Mode::MixedChar => x * (self.p() as u64).pow(self.m) % self.order,
            Mode::EqualChar => {
                if self.n == 0 {
                    return 0;
                }
                let d = self.digits(x)[self.n as usize - 1];
                self.tower.abs_trace(self.digit(d)) as u64
            }
        }
    }

    pub fn standard_character(&self, x: u64) -> CycNum {
        CycNum::root_of_unity(self.order, self.psi_exponent(x) as i64).expect("prime power order")
    }

    /// Exponent of `ψ(π^{N−M} x y)`.
    pub fn pairing_exponent(&self, x: u64, y: u64) -> u64 {
        match self.mode {
            Mode::MixedChar => ((x as u128 * y as u128) % self.order as u128) as u64,
            Mode::EqualChar => {
                let len = (self.n + self.m) as usize;
                let dx = &self.digit_table[x as usize * len..][..len];
                let dy = &self.digit_table[y as usize * len..][..len];
                // digit positions k = i + N; the π^{−1} coefficient pairs k with len − 1 − k
                let mut acc = 0u64;
                if let Some(tp) = &self.trace_product {
                    let q = self.q() as usize;
                    for k in 0..len {
                        acc += tp[dx[k] as usize * q + dy[len - 1 - k] as usize] as u64;
                    }
                    return acc % self.order;
                }
                for k in 0..len {
                    let (a, b) = (dx[k], dy[len - 1 - k]);
                    if a != 0 && b != 0 {
                        let ab = self.tower.mul(self.digit(a), self.digit(b));
                        acc += self.trace_table[ab.index() as usize] as u64;
                    }
                }
                acc % self.order
            }
        }
    }

    /// `pairing_exponent(x, y)` for every `x` at once. The pairing is additive in
    /// the base-p digits of the code of `x`, so each new digit extends the row
    /// by translates of what is already there.
    fn pairing_row(&self, y: u64) -> Vec<u32> {
        let ord = self.order as u32;
        let mut row = Vec::with_capacity(self.size as usize);
        row.push(0u32);
        let extend = |row: &mut Vec<u32>, radix: u64, t: u32| {
            let block = row.len();
            for c in 1..radix {
                let shift = ((c * t as u64) % ord as u64) as u32;
                for x in 0..block {
                    let v = row[x] + shift;
                    row.push(if v >= ord { v - ord } else { v });
                }
            }
        };
        match self.mode {
            Mode::MixedChar => {
                if self.size > 1 {
                    extend(&mut row, self.size, (y % self.order) as u32);
                }
            }
            Mode::EqualChar => {
                let p = self.p() as u64;
                let len = (self.n + self.m) as usize;
                let dy = &self.digit_table[y as usize * len..][..len];
                for k in 0..len {
                    let b = self.digit(dy[len - 1 - k]);
                    for i in 0..self.tower.degree(1) {
                        let w = self.tower.elem(1, p.pow(i as u32)).expect("basis vector");
                        let t = self.trace_table[self.tower.mul(w, b).index() as usize];
                        extend(&mut row, p, t);
                    }
                }
            }
        }
        row
    }

    pub fn elements(&self) -> std::ops::Range<u64> {
        0..self.size
    }

    // ------------------------------------------------------------ functions

    pub fn constant(&self, v: i64) -> QFun {
        QFun {
            values: vec![self.int(v); self.size as usize],
        }
    }

    pub fn delta(&self, at: u64) -> QFun {
        let mut f = self.constant(0);
        f.values[at as usize] = self.int(1);
        f
    }

    pub fn from_fn(&self, mut f: impl FnMut(u64) -> CycNum) -> Result<QFun> {
        let values = self
            .elements()
            .map(|x| f(x).lift(self.order))
            .collect::<Result<_>>()?;
        Ok(QFun { values })
    }

    /// Small random integer values in `[−bound, bound]`.
    pub fn random(&self, rng: &mut impl Rng, bound: i64) -> QFun {
        QFun {
            values: self
                .elements()
                .map(|_| self.int(rng.gen_range(-bound..=bound)))
                .collect(),
        }
    }

    /// Integer values on `support` random points, zero elsewhere.
    pub fn random_sparse(&self, rng: &mut impl Rng, support: usize, bound: i64) -> QFun {
        let mut values = vec![self.int(0); self.size as usize];
        for _ in 0..support {
            let x = rng.gen_range(0..self.size) as usize;
            values[x] = self.int(rng.gen_range(-bound..=bound));
        }
        QFun { values }
    }

    fn int(&self, v: i64) -> CycNum {
        CycNum::from_integer(self.order, v).expect("prime power order")
    }

    fn check(&self, f: &QFun) -> Result<()> {
        if f.values.len() as u64 != self.size {
            return Err(Error::domain(format!(
                "function has {} values, the group has {}",
                f.values.len(),
                self.size
            )));
        }
        Ok(())
    }

    /// `F(f)(y) = Σ_x f(x)·ψ(π^{N−M} x y)`.
    pub fn local_ft(&self, f: &QFun) -> Result<QFun> {
        self.check(f)?;
        if let Some(dense) = self.dense_of(f)? {
            let values = self
                .transform_dense(&dense)
                .into_iter()
                .map(|v| self.cyc_from_reduced(v))
                .collect();
            return Ok(QFun { values });
        }
        let vals: Vec<CycNum> = f
            .values
            .iter()
            .map(|v| v.lift(self.order))
            .collect::<Result<_>>()?;
        let ord = self.order as usize;
        let values = self
            .elements()
            .into_par_iter()
            .map(|y| {
                let row = self.pairing_row(y);
                // bucket by exponent, rotate once per bucket
                let mut buckets: Vec<Option<CycNum>> = vec![None; ord];
                for (x, v) in vals.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    let e = row[x] as usize;
                    match &mut buckets[e] {
                        Some(b) => *b += v,
                        slot => *slot = Some(v.clone()),
                    }
                }
                let mut acc = self.int(0);
                for (j, b) in buckets.into_iter().enumerate() {
                    if let Some(b) = b {
                        acc += &b.mul_root(j as i64);
                    }
                }
                acc
            })
            .collect();
        Ok(QFun { values })
    }

    /// Values as reduced integer coefficient vectors of length `ord`, if they are small integers.
    fn dense_of(&self, f: &QFun) -> Result<Option<Vec<Vec<i64>>>> {
        let ord = self.order as usize;
        let mut out = Vec::with_capacity(f.values.len());
        for v in &f.values {
            let lifted;
            let v = if v.order() == self.order {
                v
            } else {
                lifted = v.lift(self.order)?;
                &lifted
            };
            let mut dense = vec![0i64; ord];
            for (k, c) in v.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let Some(c) = c.is_integer().then(|| c.to_integer().to_i64()).flatten() else {
                    return Ok(None);
                };
                // |G|²-fold sums must stay inside i64
                if c.unsigned_abs() >= 1 << 30 {
                    return Ok(None);
                }
                dense[k] = c;
            }
            out.push(dense);
        }
        Ok(Some(out))
    }

    /// The transform on reduced dense vectors; the output is reduced as well.
    fn transform_dense(&self, g: &[Vec<i64>]) -> Vec<Vec<i64>> {
        self.transform_raw(g).into_iter().map(|v| self.reduce_dense(v)).collect()
    }

    /// The transform over `ℤ[x]/(x^ord − 1)`, before reducing to `ℤ[ζ]`.
    /// Reduction is a ring map, so it may be postponed across several transforms.
    fn transform_raw(&self, g: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let ord = self.order as usize;
        match self.mode {
            // ζ^{xy} on ℤ/p^k is a plain cyclic DFT
            Mode::MixedChar => cyclic_dft(g, 1, ord, self.p() as usize),
            Mode::EqualChar => {
                let nz: Vec<_> = g.iter().map(|v| sparse(v)).collect();
                self.elements()
                    .into_par_iter()
                    .map(|y| {
                        let row = self.pairing_row(y);
                        let mut acc = vec![0i64; ord];
                        for (x, v) in g.iter().enumerate() {
                            if nz[x].as_ref().is_some_and(|n| n.is_empty()) {
                                continue;
                            }
                            rotate_add_with(&mut acc, v, nz[x].as_deref(), row[x] as usize);
                        }
                        acc
                    })
                    .collect()
            }
        }
    }

    /// Rewrites `Σ acc[j] ζ^j` in the power basis `1, …, ζ^{φ−1}`, zero-padded.
    fn reduce_dense(&self, mut acc: Vec<i64>) -> Vec<i64> {
        let n = self.order as usize;
        let p = self.p() as usize;
        let phi = n / p * (p - 1);
        let stride = n / p;
        // ζ^d = −Σ_{j<p−1} ζ^{d − φ + j·n/p} for d ≥ φ
        for d in (phi..n).rev() {
            let c = std::mem::take(&mut acc[d]);
            if c != 0 {
                for j in 0..p - 1 {
                    acc[d - phi + j * stride] -= c;
                }
            }
        }
        acc
    }

    fn cyc_from_reduced(&self, v: Vec<i64>) -> CycNum {
        let coeffs = v.into_iter().map(|c| BigRational::from_integer(BigInt::from(c))).collect();
        CycNum::from_coeffs(self.order, coeffs).expect("prime power order")
    }

    /// `F(F(f))(z) = |G|·f(−z)`.
    pub fn double_transform_check(&self, f: &QFun) -> Result<bool> {
        self.check(f)?;
        let g = self.size as i64;
        if let Some(dense) = self.dense_of(f)? {
            let ff = self.transform_dense(&self.transform_raw(&dense));
            return Ok(self.elements().all(|z| {
                let want = &dense[self.neg(z) as usize];
                ff[z as usize].iter().zip(want).all(|(&a, &b)| a == g * b)
            }));
        }
        let ff = self.local_ft(&self.local_ft(f)?)?;
        for z in self.elements() {
            let want = f.values[self.neg(z) as usize].lift(self.order)?.scale_int(g);
            if ff.values[z as usize] != want {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `Σ|F(f)|² = |G|·Σ|f|²`.
    pub fn plancherel_check(&self, f: &QFun) -> Result<bool> {
        let norm = |h: &QFun| {
            h.values.iter().fold(self.int(0), |acc, v| {
                let v = v.lift(self.order).expect("same prime");
                acc + (&v * &v.conj())
            })
        };
        let lhs = norm(&self.local_ft(f)?);
        let rhs = norm(f).scale_int(self.size as i64);
        Ok(lhs == rhs)
    }

    /// Brute-force check that `x ↦ ψ(π^{N−M}x·−)` is an isomorphism onto the dual.
    pub fn duality_report(&self) -> DualityReport {
        let all: Vec<u64> = self.elements().collect();
        let faithful = all.par_iter().all(|&x| x == 0 || all.iter().any(|&y| self.pairing_exponent(x, y) != 0));
        // additivity in the first slot, on generators against every y
        let gens: Vec<u64> = (0..(self.n + self.m) as usize)
            .flat_map(|k| {
                let step = self.q().pow(k as u32);
                [step, step * (self.q() - 1).max(1)]
            })
            .filter(|&g| g < self.size)
            .collect::<std::collections::BTreeSet<u64>>()
            .into_iter()
            .collect();
        let ord = self.order;
        let additive = all.par_iter().all(|&y| {
            gens.iter().all(|&g| {
                gens.iter().all(|&h| {
                    (self.pairing_exponent(g, y) + self.pairing_exponent(h, y)) % ord
                        == self.pairing_exponent(self.add(g, h), y)
                })
            })
        });
        let symmetric = all
            .iter()
            .take(64)
            .all(|&x| all.iter().take(64).all(|&y| self.pairing_exponent(x, y) == self.pairing_exponent(y, x)));
        let well_defined = self.well_defined();
        let determinant_nonzero = (self.size <= 16).then(|| self.character_matrix_invertible());
        let passed = faithful && additive && symmetric && well_defined && determinant_nonzero.unwrap_or(true);
        DualityReport {
            q: self.q(),
            window: (self.n, self.m),
            mode: self.mode,
            group_order: self.size,
            pairing_entries: self.size * self.size,
            conductor_shift: self.conductor_shift(),
            faithful,
            additive,
            symmetric,
            well_defined,
            determinant_nonzero,
            passed,
        }
    }

    /// The pairing ignores digits beyond the window: `π^M 𝒪` pairs trivially with `π^{−N}𝒪`.
    fn well_defined(&self) -> bool {
        match self.mode {
            Mode::MixedChar => true,
            Mode::EqualChar => {
                // an extra digit at π^M would pair with position −1 − (N − M) − M = −N − 1, outside the window
                let len = (self.n + self.m) as i64;
                (0..len).all(|k| {
                    let partner = len - 1 - k;
                    (0..len).contains(&partner)
                })
            }
        }
    }

    /// Gaussian elimination on `[ψ(xy)]` over `ℚ(ζ)`.
    pub fn character_matrix_invertible(&self) -> bool {
        let n = self.size as usize;
        let mut a: Vec<Vec<CycNum>> = (0..n as u64)
            .map(|x| {
                (0..n as u64)
                    .map(|y| CycNum::root_of_unity(self.order, self.pairing_exponent(x, y) as i64).unwrap())
                    .collect()
            })
            .collect();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return false;
            };
            a.swap(col, piv);
            let inv = a[col][col].inv().expect("nonzero pivot");
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] * &inv;
                for c in col..n {
                    let t = &factor * &a[col][c];
                    a[r][c] = &a[r][c] - &t;
                }
            }
        }
        true
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            q: self.q(),
            window: (self.n, self.m),
            mode: self.mode,
            group_order: self.size,
            character_order: self.order,
            conductor_shift: self.conductor_shift(),
        }
    }
}

/// `X[y] = Σ_x g[x]·ζ^{s·x·y}` over `ℤ[ζ]/(ζ^ord − 1)`, radix `p` decimation in time.
///
/// Each entry is a dense coefficient vector of length `ord`; twiddles are rotations.
fn cyclic_dft(g: &[Vec<i64>], step: usize, ord: usize, p: usize) -> Vec<Vec<i64>> {
    let len = g.len();
    if len == 1 {
        return g.to_vec();
    }
    let sub_len = len / p;
    let subs: Vec<Vec<Vec<i64>>> = (0..p)
        .map(|r| {
            let part: Vec<Vec<i64>> = g.iter().skip(r).step_by(p).cloned().collect();
            cyclic_dft(&part, step * p, ord, p)
        })
        .collect();
    let nz: Vec<Vec<_>> = subs.iter().map(|s| s.iter().map(|v| sparse(v)).collect()).collect();
    (0..len)
        .map(|y| {
            let mut acc = vec![0i64; ord];
            let twiddle = step * y % ord;
            let k = y % sub_len;
            let mut e = 0;
            for (sub, nz) in subs.iter().zip(&nz) {
                rotate_add_with(&mut acc, &sub[k], nz[k].as_deref(), e);
                e += twiddle;
                if e >= ord {
                    e -= ord;
                }
            }
            acc
        })
        .collect()
}

/// Nonzero entries of `v`, when there are few enough to beat a dense pass.
fn sparse(v: &[i64]) -> Option<Vec<(usize, i64)>> {
    let nz: Vec<_> = v
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(k, &c)| (k, c))
        .collect();
    (nz.len() * 8 <= v.len()).then_some(nz)
}

fn rotate_add_with(acc: &mut [i64], v: &[i64], nz: Option<&[(usize, i64)]>, e: usize) {
    match nz {
        Some(nz) => {
            let ord = acc.len();
            for &(k, c) in nz {
                let i = k + e;
                acc[if i >= ord { i - ord } else { i }] += c;
            }
        }
        None => rotate_add(acc, v, e),
    }
}

/// `acc += ζ^e·v` for dense vectors of length `ord`.
fn rotate_add(acc: &mut [i64], v: &[i64], e: usize) {
    let ord = acc.len();
    let (lo, hi) = acc.split_at_mut(e);
    for (a, b) in hi.iter_mut().zip(v) {
        *a += b;
    }
    for (a, b) in lo.iter_mut().zip(&v[ord - e..]) {
        *a += b;
    }
}

/// A function `G → ℚ(ζ)`, indexed by element code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QFun {
    values: Vec<CycNum>,
}

impl QFun {
    pub fn values(&self) -> &[CycNum] {
        &self.values
    }

    pub fn value(&self, x: u64) -> &CycNum {
        &self.values[x as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub q: u64,
    pub window: (u32, u32),
    pub mode: Mode,
    pub group_order: u64,
    pub character_order: u64,
    pub conductor_shift: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub q: u64,
    pub window: (u32, u32),
    pub mode: Mode,
    pub group_order: u64,
    pub pairing_entries: u64,
    pub conductor_shift: i64,
    pub faithful: bool,
    pub additive: bool,
    pub symmetric: bool,
    pub well_defined: bool,
    pub determinant_nonzero: Option<bool>,
    pub passed: bool,
}
