//! Slope calculus for isocrystals, stored in Dieudonné–Manin normal form.
//!
//! An [`Isocrystal`] is a multiset of isoclinic pieces `𝓞(s/r)^{⊕k}`. The
//! simple piece `𝓞(s/r)` has rank `r` and degree `s`. Matrices are only
//! produced on demand by [`xi_matrix`].

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// `𝓞(λ)^{⊕mult}` with `λ` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Piece {
    pub slope: Rational64,
    pub mult: u64,
}

impl Piece {
    /// `r`, the denominator of the slope.
    pub fn simple_rank(&self) -> i64 {
        *self.slope.denom()
    }

    /// `s`, the numerator of the slope.
    pub fn simple_degree(&self) -> i64 {
        *self.slope.numer()
    }
}

/// A finite direct sum of isoclinic pieces, slopes decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Isocrystal {
    pieces: Vec<Piece>,
}

impl Isocrystal {
    pub fn zero() -> Self {
        Isocrystal::default()
    }

    /// `𝓞(λ)`.
    pub fn simple(slope: Rational64) -> Self {
        Self::from_pieces([(slope, 1)])
    }

    /// Collects `(slope, multiplicity)` pairs; zero multiplicities are dropped.
    pub fn from_pieces(pieces: impl IntoIterator<Item = (Rational64, u64)>) -> Self {
        let mut by_slope: BTreeMap<Rational64, u64> = BTreeMap::new();
        for (s, k) in pieces {
            if k > 0 {
                *by_slope.entry(s).or_default() += k;
            }
        }
        Isocrystal {
            pieces: by_slope
                .into_iter()
                .rev()
                .map(|(slope, mult)| Piece { slope, mult })
                .collect(),
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn rank(&self) -> i64 {
        self.pieces
            .iter()
            .map(|p| p.mult as i64 * p.simple_rank())
            .sum()
    }

    pub fn deg(&self) -> i64 {
        self.pieces
            .iter()
            .map(|p| p.mult as i64 * p.simple_degree())
            .sum()
    }

    /// `deg / rk`.
    pub fn slope(&self) -> Result<Rational64> {
        if self.is_zero() {
            return Err(Error::domain("the zero isocrystal has no slope"));
        }
        Ok(Rational64::new(self.deg(), self.rank()))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_pieces(
            self.pieces
                .iter()
                .chain(&other.pieces)
                .map(|p| (p.slope, p.mult)),
        )
    }

    pub fn dual(&self) -> Self {
        Self::from_pieces(self.pieces.iter().map(|p| (-p.slope, p.mult)))
    }

    /// `𝓞(λ) ⊗ 𝓞(μ) = 𝓞(λ+μ)^{⊕ r_λ r_μ / r_{λ+μ}}`, extended bilinearly.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                let s = a.slope + b.slope;
                let k = a.simple_rank() * b.simple_rank() / s.denom();
                out.push((s, a.mult * b.mult * k as u64));
            }
        }
        Self::from_pieces(out)
    }

    /// Vertices from `(0,0)`, one per distinct slope, slopes decreasing.
    pub fn hn_polygon(&self) -> Vec<(i64, i64)> {
        let mut v = vec![(0, 0)];
        let (mut x, mut y) = (0, 0);
        for p in &self.pieces {
            x += p.mult as i64 * p.simple_rank();
            y += p.mult as i64 * p.simple_degree();
            v.push((x, y));
        }
        v
    }

    pub fn only_positive(&self) -> bool {
        self.pieces.iter().all(|p| p.slope.is_positive())
    }

    pub fn only_negative(&self) -> bool {
        self.pieces.iter().all(|p| p.slope.is_negative())
    }

    pub fn predicates(&self) -> Vec<PiecePredicates> {
        self.pieces
            .iter()
            .map(|p| PiecePredicates {
                slope: fmt_ratio(p.slope),
                h0_vanishes: p.slope.is_negative(),
                h1_vanishes: p.slope.is_positive(),
                h0_is_e: p.slope.is_zero(),
            })
            .collect()
    }

    /// Number of freely chosen nilpotent coefficients, `Σ k·|s|`.
    ///
    /// Defined when every slope is positive, or every slope is negative (then
    /// it is computed on the dual). Slope zero is rejected.
    pub fn bc_dimension(&self) -> Result<i64> {
        if self.only_positive() || self.only_negative() {
            Ok(self
                .pieces
                .iter()
                .map(|p| p.mult as i64 * p.simple_degree().abs())
                .sum())
        } else {
            Err(Error::domain(
                "Banach-Colmez dimension needs all slopes positive or all negative",
            ))
        }
    }

    /// `Σ k·r`, the variable count attached to the rank instead of the degree.
    pub fn bc_rank_count(&self) -> i64 {
        self.rank()
    }

    pub fn report(&self) -> SlopeReport {
        let bc = self.bc_dimension().ok();
        SlopeReport {
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceWire {
                    slope: fmt_ratio(p.slope),
                    rank: p.simple_rank(),
                    degree: p.simple_degree(),
                    mult: p.mult,
                })
                .collect(),
            rank: self.rank(),
            deg: self.deg(),
            slope: self.slope().ok().map(fmt_ratio),
            hn: self.hn_polygon(),
            predicates: self.predicates(),
            only_positive: self.only_positive(),
            only_negative: self.only_negative(),
            bc_dimension: bc,
            bc_rank_count: bc.map(|_| self.bc_rank_count()),
            bc_counts_differ: bc.map(|d| d != self.bc_rank_count()),
        }
    }
}

impl fmt::Display for Isocrystal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "0");
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " (+) ")?;
            }
            write!(f, "O({})", fmt_ratio(p.slope))?;
            if p.mult > 1 {
                write!(f, "^{}", p.mult)?;
            }
        }
        Ok(())
    }
}

pub fn fmt_ratio(r: Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Whether consecutive segment slopes of a vertex list are non-increasing.
pub fn is_concave(vertices: &[(i64, i64)]) -> bool {
    vertices.windows(3).all(|w| {
        let (a, b, c) = (w[0], w[1], w[2]);
        // slope(ab) ≥ slope(bc), cross-multiplied with positive runs
        (b.1 - a.1) as i128 * (c.0 - b.0) as i128 >= (c.1 - b.1) as i128 * (b.0 - a.0) as i128
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PiecePredicates {
    pub slope: String,
    pub h0_vanishes: bool,
    pub h1_vanishes: bool,
    pub h0_is_e: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceWire {
    pub slope: String,
    pub rank: i64,
    pub degree: i64,
    pub mult: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeReport {
    pub pieces: Vec<PieceWire>,
    pub rank: i64,
    pub deg: i64,
    pub slope: Option<String>,
    pub hn: Vec<(i64, i64)>,
    pub predicates: Vec<PiecePredicates>,
    pub only_positive: bool,
    pub only_negative: bool,
    /// Degree-based count of free coefficients.
    pub bc_dimension: Option<i64>,
    /// The rank-based count, reported alongside since the two can disagree.
    pub bc_rank_count: Option<i64>,
    pub bc_counts_differ: Option<bool>,
}

// ------------------------------------------------------------------ matrices

/// An entry `c·π^e`, or zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    Zero,
    Mono { coeff: i64, pi_exp: i64 },
}

impl Entry {
    pub fn one() -> Self {
        Entry::Mono { coeff: 1, pi_exp: 0 }
    }

    fn mul(self, other: Entry) -> Entry {
        match (self, other) {
            (Entry::Mono { coeff: a, pi_exp: x }, Entry::Mono { coeff: b, pi_exp: y }) => {
                Entry::Mono {
                    coeff: a * b,
                    pi_exp: x + y,
                }
            }
            _ => Entry::Zero,
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Entry::Zero => write!(f, "0"),
            Entry::Mono { coeff, pi_exp: 0 } => write!(f, "{coeff}"),
            Entry::Mono { coeff: 1, pi_exp } => write!(f, "pi^{pi_exp}"),
            Entry::Mono { coeff: -1, pi_exp } => write!(f, "-pi^{pi_exp}"),
            Entry::Mono { coeff, pi_exp } => write!(f, "{coeff}*pi^{pi_exp}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeMatrix {
    pub r: i64,
    pub s: i64,
    pub entries: Vec<Vec<Entry>>,
}

/// The `r×r` companion-shaped matrix of `𝓞(s/r)`: ones on the superdiagonal, `π^{−s}` bottom-left.
pub fn xi_matrix(slope: Rational64) -> SlopeMatrix {
    let (s, r) = (*slope.numer(), *slope.denom());
    let n = r as usize;
    let mut entries = vec![vec![Entry::Zero; n]; n];
    for (i, row) in entries.iter_mut().enumerate().take(n - 1) {
        row[i + 1] = Entry::one();
    }
    entries[n - 1][0] = Entry::Mono { coeff: 1, pi_exp: -s };
    SlopeMatrix { r, s, entries }
}

impl SlopeMatrix {
    /// Determinant by Leibniz expansion over the nonzero pattern.
    ///
    /// Returns `None` for a zero determinant, else `(coeff, π-exponent)`; the
    /// expansion must collapse to a single monomial, which holds for `ξ`.
    pub fn determinant(&self) -> Result<Option<(i64, i64)>> {
        let n = self.entries.len();
        let mut terms: BTreeMap<i64, i64> = BTreeMap::new();
        let mut used = vec![false; n];
        self.expand(0, &mut used, Entry::one(), 1, &mut terms);
        terms.retain(|_, c| *c != 0);
        match terms.len() {
            0 => Ok(None),
            1 => Ok(terms.into_iter().next().map(|(e, c)| (c, e))),
            _ => Err(Error::Arithmetic("determinant is not a monomial".into())),
        }
    }

    fn expand(&self, row: usize, used: &mut [bool], acc: Entry, sign: i64, out: &mut BTreeMap<i64, i64>) {
        let n = self.entries.len();
        if row == n {
            if let Entry::Mono { coeff, pi_exp } = acc {
                *out.entry(pi_exp).or_default() += sign * coeff;
            }
            return;
        }
        for col in 0..n {
            if used[col] || self.entries[row][col] == Entry::Zero {
                continue;
            }
            // sign flips with the number of already-used columns to the right
            let inversions = used[col + 1..].iter().filter(|&&u| u).count();
            let s = if inversions % 2 == 0 { sign } else { -sign };
            used[col] = true;
            self.expand(row + 1, used, acc.mul(self.entries[row][col]), s, out);
            used[col] = false;
        }
    }
}

impl fmt::Display for SlopeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|e| e.to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

// ---------------------------------------------------------------- expressions

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Plus,
    Times,
    Atom,
    Dual,
    LParen,
    RParen,
    Caret,
    Num(Rational64),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let rest = &s[i..];
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if rest.starts_with("(+)") {
            out.push(Tok::Plus);
            i += 3;
        } else if rest.starts_with("(x)") {
            out.push(Tok::Times);
            i += 3;
        } else if rest.starts_with("O(") {
            out.push(Tok::Atom);
            i += 2;
        } else if rest.starts_with("dual(") {
            out.push(Tok::Dual);
            i += 5;
        } else if c == '(' {
            out.push(Tok::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Tok::RParen);
            i += 1;
        } else if c == '^' {
            out.push(Tok::Caret);
            i += 1;
        } else if c == '-' || c.is_ascii_digit() {
            let start = i;
            i += 1;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'/') {
                i += 1;
            }
            out.push(Tok::Num(parse_ratio(&s[start..i])?));
        } else {
            return Err(Error::parse(format!("unexpected {c:?} at offset {i}")));
        }
    }
    Ok(out)
}

/// Parses `s` or `s/r` with `r > 0`.
pub fn parse_ratio(s: &str) -> Result<Rational64> {
    let bad = || Error::parse(format!("bad slope {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let num: i64 = num.trim().parse().map_err(|_| bad())?;
    let den: i64 = den.trim().parse().map_err(|_| bad())?;
    if den <= 0 {
        return Err(bad());
    }
    Ok(Rational64::new(num, den))
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(format!(
                "expected {t:?}, found {:?}",
                self.peek()
            )))
        }
    }

    fn expr(&mut self) -> Result<Isocrystal> {
        let mut acc = self.term()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            acc = acc.direct_sum(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Isocrystal> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Times) {
            self.pos += 1;
            acc = acc.tensor(&self.factor()?);
        }
        Ok(acc)
    }

    /// A primary followed by any number of `^k` (k-fold direct sum).
    fn factor(&mut self) -> Result<Isocrystal> {
        let mut acc = self.primary()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let k = match self.toks.get(self.pos) {
                Some(Tok::Num(k)) if k.is_integer() && k.is_positive() => k.to_integer() as u64,
                other => return Err(Error::parse(format!("expected a positive power, found {other:?}"))),
            };
            self.pos += 1;
            acc = Isocrystal::from_pieces(acc.pieces.iter().map(|p| (p.slope, p.mult * k)));
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<Isocrystal> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Atom) => {
                self.pos += 1;
                let slope = match self.toks.get(self.pos) {
                    Some(Tok::Num(r)) => *r,
                    other => return Err(Error::parse(format!("expected a slope, found {other:?}"))),
                };
                self.pos += 1;
                self.expect(Tok::RParen)?;
                Ok(Isocrystal::simple(slope))
            }
            Some(Tok::Dual) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner.dual())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(Error::parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Evaluates expressions such as `O(1/2) (x) O(1/2) (+) dual(O(1))`; `(x)` binds tighter than `(+)`.
/// `E^k` is the k-fold direct sum, so display output parses back.
pub fn parse_expr(s: &str) -> Result<Isocrystal> {
    let mut p = Parser {
        toks: tokenize(s)?,
        pos: 0,
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::parse(format!("trailing input after token {}", p.pos)));
    }
    Ok(out)
}
