//! The Heisenberg group of a symplectic 𝔽_q-space of dimension `2g`.
//!
//! Coordinates are `(p, q, z)` with `p, q ∈ 𝔽_q^g`. In the symplectic
//! presentation `z = t` and the law is `t + t' + ½ω(w, w')` with
//! `ω((p,q),(p',q')) = p·q' − p'·q`, so `ω(e_j, f^k) = δ_j^k` for the
//! Darboux vectors `e_j = (unit_j, 0)` and `f^k = (0, unit_k)`. In the matrix
//! presentation `z = u = t + ½ p·q` and the law is `u + u' + p·q'`.
//! Characteristic 2 only has the matrix presentation.
//!
//! Structure is computed by brute force over all `q^{2g+1}` elements.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::{FFElem, FFTower, FieldSpec};

/// Default bound on `q^{2g+1}` for brute-force structure computations.
pub const DEFAULT_CAPACITY: u64 = 1 << 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Presentation {
    Symplectic,
    Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeisElem {
    pres: Presentation,
    p: Vec<FFElem>,
    q: Vec<FFElem>,
    z: FFElem,
}

impl HeisElem {
    pub fn presentation(&self) -> Presentation {
        self.pres
    }

    pub fn p(&self) -> &[FFElem] {
        &self.p
    }

    pub fn q(&self) -> &[FFElem] {
        &self.q
    }

    /// `t` in the symplectic presentation, `u` in the matrix one.
    pub fn center_coord(&self) -> FFElem {
        self.z
    }
}

#[derive(Clone, Debug)]
pub struct HeisenbergGroup {
    field: Arc<FFTower>,
    genus: usize,
    pres: Presentation,
    half: Option<FFElem>,
}

impl HeisenbergGroup {
    pub fn new(q: u64, genus: usize, pres: Presentation) -> Result<Self> {
        let spec = FieldSpec::from_order(q)?;
        let field = Arc::new(FFTower::new(spec, 1)?);
        let half = field.inv(field.from_int(1, 2)).ok();
        if pres == Presentation::Symplectic && half.is_none() {
            return Err(Error::Presentation(
                "the symplectic presentation needs 1/2, which does not exist in characteristic 2"
                    .into(),
            ));
        }
        Ok(HeisenbergGroup {
            field,
            genus,
            pres,
            half,
        })
    }

    pub fn field(&self) -> &Arc<FFTower> {
        &self.field
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn presentation(&self) -> Presentation {
        self.pres
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    /// `q^{2g+1}`.
    pub fn order(&self) -> u128 {
        (self.q() as u128).pow(2 * self.genus as u32 + 1)
    }

    pub fn elem(&self, p: Vec<FFElem>, q: Vec<FFElem>, z: FFElem) -> Result<HeisElem> {
        if p.len() != self.genus || q.len() != self.genus {
            return Err(Error::domain(format!("expected {} coordinates", self.genus)));
        }
        if p.iter().chain(&q).chain([&z]).any(|x| x.level() != 1) {
            return Err(Error::domain("Heisenberg coordinates must lie in F_q"));
        }
        Ok(HeisElem {
            pres: self.pres,
            p,
            q,
            z,
        })
    }

    pub fn identity(&self) -> HeisElem {
        let zero = self.field.zero(1);
        HeisElem {
            pres: self.pres,
            p: vec![zero; self.genus],
            q: vec![zero; self.genus],
            z: zero,
        }
    }

    fn dot(&self, a: &[FFElem], b: &[FFElem]) -> FFElem {
        a.iter()
            .zip(b)
            .fold(self.field.zero(1), |acc, (&x, &y)| self.field.add(acc, self.field.mul(x, y)))
    }

    fn vadd(&self, a: &[FFElem], b: &[FFElem]) -> Vec<FFElem> {
        a.iter().zip(b).map(|(&x, &y)| self.field.add(x, y)).collect()
    }

    fn vneg(&self, a: &[FFElem]) -> Vec<FFElem> {
        a.iter().map(|&x| self.field.neg(x)).collect()
    }

    /// `ω((p,q),(p',q')) = p·q' − p'·q`.
    pub fn omega(&self, x: &HeisElem, y: &HeisElem) -> FFElem {
        self.field
            .sub(self.dot(&x.p, &y.q), self.dot(&y.p, &x.q))
    }

    fn check(&self, x: &HeisElem) -> Result<()> {
        if x.pres != self.pres {
            return Err(Error::Presentation(format!(
                "{:?} element given to a {:?} group",
                x.pres, self.pres
            )));
        }
        if x.p.len() != self.genus || x.q.len() != self.genus {
            return Err(Error::domain("element of the wrong genus"));
        }
        Ok(())
    }

    pub fn compose(&self, x: &HeisElem, y: &HeisElem) -> Result<HeisElem> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.compose_unchecked(x, y))
    }

    fn compose_unchecked(&self, x: &HeisElem, y: &HeisElem) -> HeisElem {
        let f = &self.field;
        let cocycle = match self.pres {
            Presentation::Symplectic => f.mul(self.half.expect("odd p"), self.omega(x, y)),
            Presentation::Matrix => self.dot(&x.p, &y.q),
        };
        HeisElem {
            pres: self.pres,
            p: self.vadd(&x.p, &y.p),
            q: self.vadd(&x.q, &y.q),
            z: f.add(f.add(x.z, y.z), cocycle),
        }
    }

    pub fn inverse(&self, x: &HeisElem) -> HeisElem {
        let f = &self.field;
        let z = match self.pres {
            Presentation::Symplectic => f.neg(x.z),
            Presentation::Matrix => f.add(f.neg(x.z), self.dot(&x.p, &x.q)),
        };
        HeisElem {
            pres: self.pres,
            p: self.vneg(&x.p),
            q: self.vneg(&x.q),
            z,
        }
    }

    /// `[x, y] = x y x⁻¹ y⁻¹`.
    pub fn commutator(&self, x: &HeisElem, y: &HeisElem) -> HeisElem {
        let xy = self.compose_unchecked(x, y);
        let xyx = self.compose_unchecked(&xy, &self.inverse(x));
        self.compose_unchecked(&xyx, &self.inverse(y))
    }

    /// `u = t + ½ p·q` and back; odd characteristic only.
    pub fn change_presentation(&self, x: &HeisElem) -> Result<(HeisenbergGroup, HeisElem)> {
        self.check(x)?;
        let half = self.half.ok_or_else(|| {
            Error::Presentation("no change of presentation in characteristic 2".into())
        })?;
        let f = &self.field;
        let shift = f.mul(half, self.dot(&x.p, &x.q));
        let (pres, z) = match self.pres {
            Presentation::Symplectic => (Presentation::Matrix, f.add(x.z, shift)),
            Presentation::Matrix => (Presentation::Symplectic, f.sub(x.z, shift)),
        };
        let other = HeisenbergGroup {
            pres,
            ..self.clone()
        };
        Ok((
            other,
            HeisElem {
                pres,
                p: x.p.clone(),
                q: x.q.clone(),
                z,
            },
        ))
    }

    /// The `(g+2)×(g+2)` unitriangular matrix `[[1, p, u], [0, I, q], [0, 0, 1]]` (matrix presentation).
    pub fn to_matrix(&self, x: &HeisElem) -> Result<Vec<Vec<FFElem>>> {
        if self.pres != Presentation::Matrix {
            return Err(Error::Presentation("matrices exist in the matrix presentation".into()));
        }
        let g = self.genus;
        let f = &self.field;
        let mut mat = vec![vec![f.zero(1); g + 2]; g + 2];
        for (i, row) in mat.iter_mut().enumerate() {
            row[i] = f.one(1);
        }
        for j in 0..g {
            mat[0][1 + j] = x.p[j];
            mat[1 + j][g + 1] = x.q[j];
        }
        mat[0][g + 1] = x.z;
        Ok(mat)
    }

    pub fn from_matrix(&self, mat: &[Vec<FFElem>]) -> Result<HeisElem> {
        let g = self.genus;
        if mat.len() != g + 2 || mat.iter().any(|r| r.len() != g + 2) {
            return Err(Error::domain("matrix of the wrong size"));
        }
        let p = (0..g).map(|j| mat[0][1 + j]).collect();
        let q = (0..g).map(|j| mat[1 + j][g + 1]).collect();
        let candidate = HeisElem {
            pres: Presentation::Matrix,
            p,
            q,
            z: mat[0][g + 1],
        };
        if self.to_matrix(&candidate)? != mat {
            return Err(Error::domain("matrix is not of Heisenberg shape"));
        }
        Ok(candidate)
    }

    /// `A_λ = (λ e₁, 0, 0)`.
    pub fn a_lambda(&self, lambda: FFElem) -> Result<HeisElem> {
        self.unit_elem(lambda, true)
    }

    /// `B = (0, f¹, 0)`.
    pub fn b(&self) -> Result<HeisElem> {
        self.unit_elem(self.field.one(1), false)
    }

    /// `C_λ = (0, 0, λ)`.
    pub fn c_lambda(&self, lambda: FFElem) -> HeisElem {
        HeisElem {
            z: lambda,
            ..self.identity()
        }
    }

    fn unit_elem(&self, lambda: FFElem, in_p: bool) -> Result<HeisElem> {
        if self.genus == 0 {
            return Err(Error::domain("genus 0 has no Darboux vectors"));
        }
        let mut x = self.identity();
        if in_p {
            x.p[0] = lambda;
        } else {
            x.q[0] = lambda;
        }
        Ok(x)
    }

    // ---------------------------------------------------------- enumeration

    fn coords(&self) -> usize {
        2 * self.genus + 1
    }

    fn encode(&self, x: &HeisElem) -> u32 {
        let q = self.q() as u32;
        x.p.iter()
            .chain(&x.q)
            .chain([&x.z])
            .fold(0u32, |acc, c| acc * q + c.index() as u32)
    }

    fn decode(&self, mut code: u32) -> HeisElem {
        let q = self.q() as u32;
        let mut digits = vec![self.field.zero(1); self.coords()];
        for d in digits.iter_mut().rev() {
            *d = self.field.elem(1, (code % q) as u64).expect("digit below q");
            code /= q;
        }
        let z = digits.pop().expect("at least one coordinate");
        let q_part = digits.split_off(self.genus);
        HeisElem {
            pres: self.pres,
            p: digits,
            q: q_part,
            z,
        }
    }

    fn elements(&self, capacity: u64) -> Result<Vec<HeisElem>> {
        let n = self.order();
        if n > capacity as u128 {
            return Err(Error::capacity(
                format!("Heisenberg group over F_{} of genus {}", self.q(), self.genus),
                n,
                capacity as u128,
            ));
        }
        Ok((0..n as u32).map(|c| self.decode(c)).collect())
    }

    /// `(β e_j, 0, 0)`, `(0, β f^j, 0)`, `(0, 0, β)` for β in an 𝔽_p-basis of 𝔽_q.
    pub fn generators(&self) -> Vec<HeisElem> {
        let f = &self.field;
        let n = f.degree(1);
        let basis: Vec<FFElem> = (0..n)
            .map(|i| {
                let mut c = vec![0; n];
                c[i] = 1;
                f.from_coeffs(1, &c).expect("basis vector")
            })
            .collect();
        let mut gens = Vec::new();
        for j in 0..self.genus {
            for &b in &basis {
                let mut x = self.identity();
                x.p[j] = b;
                gens.push(x);
                let mut y = self.identity();
                y.q[j] = b;
                gens.push(y);
            }
        }
        for &b in &basis {
            gens.push(self.c_lambda(b));
        }
        gens
    }

    fn element_order(&self, x: &HeisElem) -> u64 {
        let id = self.identity();
        let mut acc = x.clone();
        let mut k = 1;
        while acc != id {
            acc = self.compose_unchecked(&acc, x);
            k += 1;
        }
        k
    }

    /// Center, commutator subgroup, width and `[A_λ, B] = C_λ`.
    pub fn commutator_data(&self, capacity: u64) -> Result<CommutatorReport> {
        let elems = self.elements(capacity)?;
        let gens = self.generators();
        let center: HashSet<u32> = elems
            .iter()
            .filter(|x| {
                gens.iter()
                    .all(|s| self.compose_unchecked(x, s) == self.compose_unchecked(s, x))
            })
            .map(|x| self.encode(x))
            .collect();
        let commutators: HashSet<u32> = elems
            .iter()
            .flat_map(|x| elems.iter().map(move |y| (x, y)))
            .map(|(x, y)| self.encode(&self.commutator(x, y)))
            .collect();
        let derived = self.generated_subgroup(&commutators);
        let expected: HashSet<u32> = self
            .field
            .elements(1)
            .map(|t| self.encode(&self.c_lambda(t)))
            .collect();
        let width_one = derived.iter().all(|c| commutators.contains(c));
        let ab_relation = if self.genus == 0 {
            true
        } else {
            let b = self.b()?;
            self.field
                .elements(1)
                .all(|l| self.commutator(&self.a_lambda(l).unwrap(), &b) == self.c_lambda(l))
        };
        let order = elems.len() as u64;
        Ok(CommutatorReport {
            order,
            center: center.len() as u64,
            commutator: derived.len() as u64,
            abelianization: order / derived.len() as u64,
            center_equals_commutator: center == derived && center == expected,
            width_one,
            ab_relation,
        })
    }

    fn generated_subgroup(&self, gens: &HashSet<u32>) -> HashSet<u32> {
        let gens: Vec<HeisElem> = gens.iter().map(|&c| self.decode(c)).collect();
        let id = self.identity();
        let mut seen = HashSet::from([self.encode(&id)]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for s in &gens {
                let y = self.compose_unchecked(&x, s);
                if seen.insert(self.encode(&y)) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Homomorphisms to ℂ^×, counted by trying every assignment on the generators.
    pub fn character_count(&self, capacity: u64) -> Result<u64> {
        let elems = self.elements(capacity)?;
        let gens = self.generators();
        let exponent = elems
            .iter()
            .map(|x| self.element_order(x))
            .fold(1u64, |acc, o| acc / crate::arith::gcd(acc, o) * o);
        let assignments = (exponent as u128).pow(gens.len() as u32);
        if assignments * elems.len() as u128 > (capacity as u128) << 10 {
            return Err(Error::capacity(
                "generator assignments for the character count",
                assignments,
                (capacity as u128) << 10,
            ));
        }
        let mut count = 0u64;
        let mut values = vec![0u64; gens.len()];
        for code in 0..assignments as u64 {
            let mut c = code;
            for v in values.iter_mut() {
                *v = c % exponent;
                c /= exponent;
            }
            if self.extends_to_character(&gens, &values, exponent) {
                count += 1;
            }
        }
        Ok(count)
    }

    fn extends_to_character(&self, gens: &[HeisElem], values: &[u64], e: u64) -> bool {
        let n = self.order() as usize;
        let mut chi: Vec<Option<u64>> = vec![None; n];
        let id = self.identity();
        chi[self.encode(&id) as usize] = Some(0);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            let cx = chi[self.encode(&x) as usize].expect("visited");
            for (s, &v) in gens.iter().zip(values) {
                let y = self.compose_unchecked(&x, s);
                let cy = (cx + v) % e;
                let slot = &mut chi[self.encode(&y) as usize];
                match *slot {
                    Some(old) if old != cy => return false,
                    Some(_) => {}
                    None => {
                        *slot = Some(cy);
                        queue.push_back(y);
                    }
                }
            }
        }
        true
    }

    /// Orbits under conjugation by the generators.
    pub fn conjugacy_classes(&self, capacity: u64) -> Result<u64> {
        let elems = self.elements(capacity)?;
        let gens = self.generators();
        let mut seen = vec![false; elems.len()];
        let mut classes = 0;
        for x in &elems {
            if seen[self.encode(x) as usize] {
                continue;
            }
            classes += 1;
            seen[self.encode(x) as usize] = true;
            let mut stack = vec![x.clone()];
            while let Some(y) = stack.pop() {
                for s in &gens {
                    let c = self.compose_unchecked(&self.compose_unchecked(s, &y), &self.inverse(s));
                    let k = self.encode(&c) as usize;
                    if !seen[k] {
                        seen[k] = true;
                        stack.push(c);
                    }
                }
            }
        }
        Ok(classes)
    }

    /// Everything in one JSON-ready report.
    pub fn report(&self, capacity: u64) -> Result<HeisenbergReport> {
        let comm = self.commutator_data(capacity)?;
        let char_count = self.character_count(capacity)?;
        let class_count = self.conjugacy_classes(capacity)?;
        let q = self.q();
        let g = self.genus as u32;
        let expected_chars = q.pow(2 * g);
        let expected_classes = q.pow(2 * g) + q - 1;
        // q^{2g} linear characters plus q − 1 of degree q^g exhaust |G|
        let degrees_ok = class_count == char_count + q - 1
            && char_count + (q - 1) * q.pow(2 * g) == comm.order;
        Ok(HeisenbergReport {
            q,
            genus: self.genus,
            presentation: self.pres,
            order: comm.order,
            center: comm.center,
            abelianization: comm.abelianization,
            char_count,
            class_count,
            width_one: comm.width_one,
            center_equals_commutator: comm.center_equals_commutator,
            ab_relation: comm.ab_relation,
            char_count_expected: expected_chars,
            class_count_expected: expected_classes,
            degree_sum_ok: degrees_ok,
            passed: comm.width_one
                && comm.center_equals_commutator
                && comm.ab_relation
                && char_count == expected_chars
                && class_count == expected_classes
                && degrees_ok,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutatorReport {
    pub order: u64,
    pub center: u64,
    pub commutator: u64,
    pub abelianization: u64,
    pub center_equals_commutator: bool,
    pub width_one: bool,
    pub ab_relation: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeisenbergReport {
    pub q: u64,
    pub genus: usize,
    pub presentation: Presentation,
    pub order: u64,
    pub center: u64,
    pub abelianization: u64,
    pub char_count: u64,
    pub class_count: u64,
    pub width_one: bool,
    pub center_equals_commutator: bool,
    pub ab_relation: bool,
    pub char_count_expected: u64,
    pub class_count_expected: u64,
    pub degree_sum_ok: bool,
    pub passed: bool,
}

/// The presentation used by default: symplectic in odd characteristic.
pub fn default_presentation(q: u64) -> Presentation {
    if q.is_multiple_of(2) {
        Presentation::Matrix
    } else {
        Presentation::Symplectic
    }
}
