//! Exact arithmetic in the cyclotomic field ℚ(ζ_N) for prime powers `N = p^k`.
//!
//! An element is stored as its unique representative modulo the cyclotomic
//! polynomial Φ_N, a rational vector in the power basis `1, ζ, …, ζ^{φ(N)-1}`
//! with trailing zeros dropped. Equality is coefficient equality.
//!
//! Since `Φ_{p^k}(x) = Σ_{j<p} x^{j·p^{k-1}}`, the top `p^{k-1}` powers of a
//! residue modulo `x^N - 1` fold down in a single pass.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    order: u64,
    prime: u64,
    coeffs: Vec<BigRational>,
}

fn totient_of(order: u64, prime: u64) -> usize {
    (order / prime * (prime - 1)) as usize
}

fn trimmed(mut coeffs: Vec<BigRational>) -> Vec<BigRational> {
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    coeffs
}

fn check_order(order: u64) -> Result<u64> {
    match arith::prime_power(order) {
        Some((p, _)) => Ok(p),
        None => Err(Error::domain(format!(
            "cyclotomic order {order} is not a prime power"
        ))),
    }
}

impl CycNum {
    /// Builds the residue of `Σ coeffs[i] ζ^i`; any length is accepted.
    pub fn from_coeffs(order: u64, coeffs: Vec<BigRational>) -> Result<Self> {
        let prime = check_order(order)?;
        Ok(Self::reduce(order, prime, coeffs))
    }

    fn reduce(order: u64, prime: u64, coeffs: Vec<BigRational>) -> Self {
        let n = order as usize;
        let phi = totient_of(order, prime);
        let stride = n / prime as usize;
        let len = coeffs.len().min(n);
        let mut acc = vec![BigRational::zero(); len];
        for (i, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                acc[i % n] += c;
            }
        }
        for d in (phi..len).rev() {
            let c = std::mem::take(&mut acc[d]);
            if c.is_zero() {
                continue;
            }
            for j in 0..(prime as usize - 1) {
                acc[d - phi + j * stride] -= &c;
            }
        }
        acc.truncate(phi);
        CycNum {
            order,
            prime,
            coeffs: trimmed(acc),
        }
    }

    pub fn zero(order: u64) -> Result<Self> {
        Self::from_rational(order, BigRational::zero())
    }

    pub fn one(order: u64) -> Result<Self> {
        Self::from_rational(order, BigRational::one())
    }

    pub fn from_integer(order: u64, value: i64) -> Result<Self> {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(value)))
    }

    pub fn from_rational(order: u64, value: BigRational) -> Result<Self> {
        let prime = check_order(order)?;
        Ok(CycNum {
            order,
            prime,
            coeffs: trimmed(vec![value]),
        })
    }

    /// `ζ_N^j`, reduced modulo Φ_N.
    pub fn root_of_unity(order: u64, j: i64) -> Result<Self> {
        let prime = check_order(order)?;
        let e = j.rem_euclid(order as i64) as usize;
        let mut coeffs = vec![BigRational::zero(); e + 1];
        coeffs[e] = BigRational::one();
        Ok(Self::reduce(order, prime, coeffs))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Power-basis coefficients up to the last nonzero one; at most φ(N) of them.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// The rational value when the element lies in ℚ.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.coeffs.as_slice() {
            [] => Some(BigRational::zero()),
            [c] => Some(c.clone()),
            _ => None,
        }
    }

    /// Re-expresses the element in ℚ(ζ_M) for a multiple `M` of the order with the same prime.
    pub fn lift(&self, order: u64) -> Result<Self> {
        if order == self.order {
            return Ok(self.clone());
        }
        let prime = check_order(order)?;
        if prime != self.prime || !order.is_multiple_of(self.order) {
            return Err(Error::domain(format!(
                "cannot lift order {} to order {order}",
                self.order
            )));
        }
        let step = (order / self.order) as usize;
        let len = self.coeffs.len().saturating_sub(1) * step + 1;
        let mut coeffs = vec![BigRational::zero(); len.min(totient_of(order, prime))];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * step] = c.clone();
        }
        Ok(CycNum {
            order,
            prime,
            coeffs: trimmed(coeffs),
        })
    }

    fn common(&self, other: &Self) -> Result<(Self, Self)> {
        if self.prime != other.prime {
            return Err(Error::domain(format!(
                "orders {} and {} have different characteristic primes",
                self.order, other.order
            )));
        }
        let order = self.order.max(other.order);
        Ok((self.lift(order)?, other.lift(order)?))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.order == other.order {
            return Ok(self.add_same(other));
        }
        let (a, b) = self.common(other)?;
        Ok(a.add_same(&b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.order == other.order {
            return Ok(self.mul_same(other));
        }
        let (a, b) = self.common(other)?;
        Ok(a.mul_same(&b))
    }

    fn add_same(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_same(other);
        out
    }

    fn add_assign_same(&mut self, other: &Self) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), BigRational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        self.coeffs = trimmed(std::mem::take(&mut self.coeffs));
    }

    fn mul_same(&self, other: &Self) -> Self {
        if let Some(r) = self.as_rational() {
            return other.scale(&r);
        }
        if let Some(r) = other.as_rational() {
            return self.scale(&r);
        }
        let n = self.order as usize;
        let mut acc = vec![BigRational::zero(); (self.coeffs.len() + other.coeffs.len() - 1).min(n)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    acc[(i + j) % n] += a * b;
                }
            }
        }
        Self::reduce(self.order, self.prime, acc)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycNum {
            order: self.order,
            prime: self.prime,
            coeffs: trimmed(self.coeffs.iter().map(|c| c * r).collect()),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Multiplies by `ζ_N^j`; a rotation followed by one fold.
    pub fn mul_root(&self, j: i64) -> Self {
        let n = self.order as usize;
        let shift = j.rem_euclid(n as i64) as usize;
        if shift == 0 || self.is_zero() {
            return self.clone();
        }
        let mut acc = vec![BigRational::zero(); (self.coeffs.len() + shift).min(n)];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc[(i + shift) % n] = c.clone();
            }
        }
        Self::reduce(self.order, self.prime, acc)
    }

    /// The automorphism `ζ ↦ ζ^k` for `k` prime to `p`.
    pub fn galois(&self, k: i64) -> Result<Self> {
        if k.rem_euclid(self.prime as i64) == 0 {
            return Err(Error::domain(format!(
                "exponent {k} is not a unit modulo {}",
                self.order
            )));
        }
        let n = self.order as i64;
        let mut acc = vec![BigRational::zero(); n as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc[(i as i64 * k).rem_euclid(n) as usize] += c;
            }
        }
        Ok(Self::reduce(self.order, self.prime, acc))
    }

    /// Complex conjugation, `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(-1).expect("-1 is always a unit")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Arithmetic("inverse of zero".into()));
        }
        if let Some(r) = self.as_rational() {
            return Self::from_rational(self.order, r.recip());
        }
        let modulus = qpoly::cyclotomic(self.order, self.prime);
        let s = qpoly::inverse_mod(&self.coeffs, &modulus)
            .ok_or_else(|| Error::Arithmetic("element not invertible".into()))?;
        Ok(Self::reduce(self.order, self.prime, s))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.order)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_same(&base);
            }
            base = base.mul_same(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Floating point view for display only.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let v = ratio_to_f64(c);
            let angle = 2.0 * std::f64::consts::PI * i as f64 / self.order as f64;
            re += v * angle.cos();
            im += v * angle.sin();
        }
        (re, im)
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    let n: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

impl Add for &CycNum {
    type Output = CycNum;

    /// Panics when the orders have different primes; use `checked_add` to get an error instead.
    fn add(self, rhs: &CycNum) -> CycNum {
        self.checked_add(rhs).expect("incompatible cyclotomic orders")
    }
}

impl Add for CycNum {
    type Output = CycNum;

    fn add(self, rhs: CycNum) -> CycNum {
        &self + &rhs
    }
}

impl AddAssign<&CycNum> for CycNum {
    fn add_assign(&mut self, rhs: &CycNum) {
        if self.order == rhs.order {
            self.add_assign_same(rhs);
        } else {
            *self = &*self + rhs;
        }
    }
}

impl Sub for &CycNum {
    type Output = CycNum;

    fn sub(self, rhs: &CycNum) -> CycNum {
        self.checked_sub(rhs).expect("incompatible cyclotomic orders")
    }
}

impl Mul for &CycNum {
    type Output = CycNum;

    fn mul(self, rhs: &CycNum) -> CycNum {
        self.checked_mul(rhs).expect("incompatible cyclotomic orders")
    }
}

impl Mul for CycNum {
    type Output = CycNum;

    fn mul(self, rhs: CycNum) -> CycNum {
        &self * &rhs
    }
}

impl Neg for &CycNum {
    type Output = CycNum;

    fn neg(self) -> CycNum {
        CycNum {
            order: self.order,
            prime: self.prime,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;

    fn neg(self) -> CycNum {
        -&self
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "z{}^{i}", self.order)?,
                _ => write!(f, "{mag}*z{}^{i}", self.order)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum[{}]({self})", self.order)
    }
}

/// JSON form: `{"N": int, "num": [int...], "den": [int...]}` in degree order.
#[derive(Serialize, Deserialize)]
struct CycNumWire {
    #[serde(rename = "N")]
    order: u64,
    num: Vec<serde_json::Number>,
    den: Vec<serde_json::Number>,
}

fn big_to_number(b: &BigInt) -> serde_json::Number {
    b.to_string()
        .parse()
        .expect("integers are valid JSON numbers")
}

fn number_to_big(n: &serde_json::Number) -> std::result::Result<BigInt, String> {
    n.to_string()
        .parse()
        .map_err(|_| format!("expected an integer, got {n}"))
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CycNumWire {
            order: self.order,
            num: self.coeffs.iter().map(|c| big_to_number(c.numer())).collect(),
            den: self.coeffs.iter().map(|c| big_to_number(c.denom())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = CycNumWire::deserialize(deserializer)?;
        if wire.num.len() != wire.den.len() {
            return Err(D::Error::custom("num and den lengths differ"));
        }
        let mut coeffs = Vec::with_capacity(wire.num.len());
        for (n, d) in wire.num.iter().zip(&wire.den) {
            let n = number_to_big(n).map_err(D::Error::custom)?;
            let d = number_to_big(d).map_err(D::Error::custom)?;
            if d.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            coeffs.push(BigRational::new(n, d));
        }
        CycNum::from_coeffs(wire.order, coeffs).map_err(D::Error::custom)
    }
}

/// Dense polynomials over ℚ, used only for inversion modulo Φ_N.
mod qpoly {
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    pub type Poly = Vec<BigRational>;

    fn trim(p: &mut Poly) {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
    }

    pub fn cyclotomic(order: u64, prime: u64) -> Poly {
        let stride = (order / prime) as usize;
        let mut out = vec![BigRational::zero(); stride * (prime as usize - 1) + 1];
        for j in 0..prime as usize {
            out[j * stride] = BigRational::one();
        }
        out
    }

    fn sub_scaled_shift(a: &mut Poly, b: &Poly, c: &BigRational, shift: usize) {
        if a.len() < b.len() + shift {
            a.resize(b.len() + shift, BigRational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            a[i + shift] -= c * bi;
        }
    }

    fn div_rem(a: &Poly, b: &Poly) -> (Poly, Poly) {
        let mut r = a.clone();
        trim(&mut r);
        let db = b.len() - 1;
        let lead = b[db].clone();
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(db).max(1)];
        while r.len() > db && !r.is_empty() {
            let shift = r.len() - 1 - db;
            let c = r.last().unwrap() / &lead;
            sub_scaled_shift(&mut r, b, &c, shift);
            q[shift] += c;
            trim(&mut r);
        }
        (q, r)
    }

    fn mul(a: &Poly, b: &Poly) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(&mut out);
        out
    }

    fn sub(a: &Poly, b: &Poly) -> Poly {
        let mut out = a.clone();
        if out.len() < b.len() {
            out.resize(b.len(), BigRational::zero());
        }
        for (i, y) in b.iter().enumerate() {
            out[i] -= y;
        }
        trim(&mut out);
        out
    }

    /// `s` with `s·a ≡ 1 (mod m)`, or `None` if `gcd(a, m) ≠ 1`.
    pub fn inverse_mod(a: &[BigRational], m: &Poly) -> Option<Poly> {
        let mut r0 = m.clone();
        let mut r1: Poly = a.to_vec();
        trim(&mut r1);
        let mut s0: Poly = Vec::new();
        let mut s1: Poly = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, r) = div_rem(&r0, &r1);
            let s = sub(&s0, &mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.len() != 1 {
            return None;
        }
        let c = r0[0].recip();
        Some(s0.into_iter().map(|x| x * &c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn roots_of_unity_basic() {
        let z2 = CycNum::root_of_unity(2, 1).unwrap();
        assert_eq!(z2, CycNum::from_integer(2, -1).unwrap());
        assert!(CycNum::root_of_unity(5, 0).unwrap().is_one());
        let z3 = CycNum::root_of_unity(3, 1).unwrap();
        assert!(z3.pow(3).unwrap().is_one());
        assert!(!z3.pow(1).unwrap().is_one());
        assert_eq!(
            CycNum::root_of_unity(6, 1),
            Err(Error::Domain("cyclotomic order 6 is not a prime power".into()))
        );
        assert!(CycNum::root_of_unity(1, 0).is_err());
    }

    #[test]
    fn multiplicative_order_matches_gcd() {
        for &(n, j) in &[(9u64, 3i64), (8, 2), (8, 4), (25, 5), (27, 9), (4, 1)] {
            let z = CycNum::root_of_unity(n, j).unwrap();
            let ord = n / arith::gcd(n, j as u64);
            assert!(z.pow(ord as i64).unwrap().is_one());
            for d in 1..ord {
                assert!(!z.pow(d as i64).unwrap().is_one(), "n={n} j={j} d={d}");
            }
        }
    }

    #[test]
    fn field_relations() {
        let one = CycNum::one(2).unwrap();
        let z2 = CycNum::root_of_unity(2, 1).unwrap();
        assert!((&one + &z2).is_zero());

        let mut sum = CycNum::zero(5).unwrap();
        for j in 0..5 {
            sum += &CycNum::root_of_unity(5, j).unwrap();
        }
        assert!(sum.is_zero());

        let z3 = CycNum::root_of_unity(3, 1).unwrap();
        assert_eq!(z3.inv().unwrap(), CycNum::root_of_unity(3, 2).unwrap());
        assert_eq!(
            CycNum::zero(7).unwrap().inv(),
            Err(Error::Arithmetic("inverse of zero".into()))
        );
    }

    #[test]
    fn conjugation() {
        let z5 = CycNum::root_of_unity(5, 1).unwrap();
        assert_eq!(z5.conj(), CycNum::root_of_unity(5, 4).unwrap());
        let a = &CycNum::root_of_unity(3, 1).unwrap().scale_int(2) + &CycNum::one(3).unwrap();
        assert_eq!(a.conj().conj(), a);
        let seven = CycNum::from_integer(9, 7).unwrap();
        assert_eq!(seven.conj(), seven);
    }

    #[test]
    fn cyclotomic_polynomial_vanishes_at_zeta() {
        for n in [2u64, 3, 4, 5, 8, 9, 25, 27] {
            let z = CycNum::root_of_unity(n, 1).unwrap();
            let (p, _) = arith::prime_power(n).unwrap();
            let stride = n / p;
            let mut sum = CycNum::zero(n).unwrap();
            for j in 0..p {
                sum += &z.pow((j * stride) as i64).unwrap();
            }
            assert!(sum.is_zero(), "Φ_{n}(ζ) ≠ 0");
        }
    }

    #[test]
    fn mixed_orders() {
        let z4 = CycNum::root_of_unity(4, 1).unwrap();
        let z8 = CycNum::root_of_unity(8, 2).unwrap();
        assert_eq!(z4.lift(8).unwrap(), z8.checked_mul(&CycNum::one(4).unwrap()).unwrap());
        assert_eq!(z4.checked_mul(&z4).unwrap(), CycNum::from_integer(4, -1).unwrap());
        let z3 = CycNum::root_of_unity(3, 1).unwrap();
        assert!(matches!(z4.checked_add(&z3), Err(Error::Domain(_))));
        let s = z4.checked_add(&CycNum::root_of_unity(8, 1).unwrap()).unwrap();
        assert_eq!(s.order(), 8);
    }

    #[test]
    fn mul_root_agrees_with_mul() {
        let a = CycNum::from_coeffs(9, vec![int(1), int(-2), int(3), int(0), int(5)]).unwrap();
        for j in -10..10 {
            let z = CycNum::root_of_unity(9, j).unwrap();
            assert_eq!(a.mul_root(j), &a * &z);
        }
    }

    #[test]
    fn json_shape() {
        let a = CycNum::from_coeffs(3, vec![int(1), BigRational::new(2.into(), 3.into())]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"N":3,"num":[1,2],"den":[1,3]}"#);
        let back: CycNum = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let big = CycNum::from_rational(2, BigRational::from_integer(BigInt::from(10).pow(30))).unwrap();
        let s = serde_json::to_string(&big).unwrap();
        assert!(s.contains("1000000000000000000000000000000"));
        assert_eq!(serde_json::from_str::<CycNum>(&s).unwrap(), big);
    }

    #[test]
    fn display() {
        let a = CycNum::from_coeffs(5, vec![int(2), int(0), int(-1)]).unwrap();
        assert_eq!(a.to_string(), "2 - z5^2");
        assert_eq!(CycNum::zero(5).unwrap().to_string(), "0");
    }
}
