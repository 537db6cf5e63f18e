//! Dense polynomials over the prime field 𝔽_p, coefficients stored low degree first.

pub type FpPoly = Vec<u32>;

pub fn trim(a: &mut FpPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn add(a: &[u32], b: &[u32], p: u32) -> FpPoly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + y) % p;
    }
    trim(&mut out);
    out
}

pub fn sub(a: &[u32], b: &[u32], p: u32) -> FpPoly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    trim(&mut out);
    out
}

pub fn mul(a: &[u32], b: &[u32], p: u32) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p64 = p as u64;
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p64;
        }
    }
    let mut out: FpPoly = out.into_iter().map(|c| c as u32).collect();
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a nonzero polynomial `m`.
pub fn rem(a: &[u32], m: &[u32], p: u32) -> FpPoly {
    let dm = degree(m).expect("modulus must be nonzero");
    let lead_inv = crate::arith::inv_mod(m[dm] as u64, p as u64).expect("p is prime") as u32;
    let mut r: FpPoly = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = dr - dm;
        for (i, &mi) in m.iter().enumerate().take(dm + 1) {
            let t = (c as u64 * mi as u64 % p as u64) as u32;
            r[i + shift] = (r[i + shift] + p - t) % p;
        }
        trim(&mut r);
    }
    r
}

pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> FpPoly {
    rem(&mul(a, b, p), m, p)
}

pub fn powmod(base: &[u32], mut e: u128, m: &[u32], p: u32) -> FpPoly {
    let mut acc: FpPoly = vec![1];
    acc = rem(&acc, m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &b, m, p);
        }
        b = mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

pub fn gcd(a: &[u32], b: &[u32], p: u32) -> FpPoly {
    let mut x: FpPoly = a.to_vec();
    let mut y: FpPoly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = std::mem::replace(&mut y, r);
    }
    x
}

/// Rabin-style test: `f` of degree `d` is irreducible iff `gcd(f, x^{p^i} - x) = 1` for `i ≤ d/2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let d = match degree(f) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if d == 1 {
        return true;
    }
    let x: FpPoly = vec![0, 1];
    let mut frob = rem(&x, f, p);
    for _ in 1..=d / 2 {
        frob = powmod(&frob, p as u128, f, p);
        let diff = sub(&frob, &x, p);
        let g = gcd(f, &diff, p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// The monic irreducible of degree `d` whose lower coefficients, read as a
/// base-`p` integer with the constant term least significant, are smallest.
pub fn smallest_irreducible(d: usize, p: u32) -> FpPoly {
    let count = (p as u64).pow(d as u32);
    for code in 0..count {
        let mut f = vec![0u32; d + 1];
        let mut c = code;
        for coeff in f.iter_mut().take(d) {
            *coeff = (c % p as u64) as u32;
            c /= p as u64;
        }
        f[d] = 1;
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_irreducibles() {
        assert_eq!(smallest_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(smallest_irreducible(3, 2), vec![1, 1, 0, 1]);
        assert_eq!(smallest_irreducible(2, 3), vec![1, 0, 1]);
        assert_eq!(smallest_irreducible(1, 5), vec![0, 1]);
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(!is_irreducible(&[0, 0, 1], 3));
        assert!(is_irreducible(&[2, 2, 1], 3));
    }

    #[test]
    fn irreducible_count_matches_necklace_formula() {
        // number of monic irreducibles of degree 4 over F_2 is (16 - 4)/4 = 3
        let n = (0..16u32)
            .filter(|code| {
                let f: Vec<u32> = (0..4).map(|i| (code >> i) & 1).chain([1]).collect();
                is_irreducible(&f, 2)
            })
            .count();
        assert_eq!(n, 3);
        // degree 3 over F_3: (27 - 3)/3 = 8
        let n = (0..27u32)
            .filter(|code| {
                let f = vec![code % 3, code / 3 % 3, code / 9, 1];
                is_irreducible(&f, 3)
            })
            .count();
        assert_eq!(n, 8);
    }
}
