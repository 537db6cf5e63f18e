//! The Fourier transform of trace functions on 𝔸¹.
//!
//! `ft(f)(t) = −Σ_{x∈𝔽_{q^m}} f(x)·ψ_m(−x t)` at level `m`, with
//! `ψ_m = ψ ∘ Tr_{𝔽_{q^m}/𝔽_q}`. The leading sign is the shift `[1]`; it is
//! never normalized away. Two independent routes are provided: the closed
//! kernel sum ([`FourierConfig::ft`]) and the pullback/tensor/pushforward
//! pipeline ([`FourierConfig::ft_via_pipeline`]).

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::finite_field::FFTower;
use crate::trace_datum::{AdditiveCharacter, Flavor, PointMap, TraceDatum};

/// A nontrivial character `ψ` together with a level bound.
///
/// Only `u` and `a` of the character are used; the kernel is always the
/// geometric one, `ψ(−x t)`.
#[derive(Clone, Debug)]
pub struct FourierConfig {
    psi: AdditiveCharacter,
    max_level: usize,
}

impl FourierConfig {
    pub fn new(psi: AdditiveCharacter, max_level: usize) -> Result<Self> {
        if psi.is_trivial() {
            return Err(Error::Config("the Fourier transform needs a nontrivial character".into()));
        }
        psi.tower().check_level(max_level)?;
        let psi = match psi.flavor() {
            Flavor::Arithmetic => psi,
            Flavor::Geometric => psi.conjugate_flavor(),
        };
        Ok(FourierConfig { psi, max_level })
    }

    /// Standard `ψ = ζ_p^{Tr}` over the tower.
    pub fn standard(tower: Arc<FFTower>, max_level: usize) -> Result<Self> {
        Self::new(AdditiveCharacter::standard(tower, Flavor::Arithmetic), max_level)
    }

    pub fn tower(&self) -> &Arc<FFTower> {
        self.psi.tower()
    }

    pub fn psi(&self) -> &AdditiveCharacter {
        &self.psi
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    /// The same transform with `ψ⁻¹`.
    pub fn inverse_char(&self) -> Self {
        FourierConfig {
            psi: self.psi.inverse(),
            max_level: self.max_level,
        }
    }

    fn check_input(&self, f: &TraceDatum) -> Result<()> {
        if f.dim() != 1 {
            return Err(Error::domain("the Fourier transform acts on data over A^1"));
        }
        if f.tower().spec() != self.tower().spec() {
            return Err(Error::domain("datum and character live over different fields"));
        }
        if f.max_level() < self.max_level {
            return Err(Error::Level {
                level: self.max_level,
                bound: f.max_level(),
            });
        }
        Ok(())
    }

    /// Closed-form kernel sum.
    pub fn ft(&self, f: &TraceDatum) -> Result<TraceDatum> {
        self.check_input(f)?;
        let tower = self.tower().clone();
        let p = tower.p() as usize;
        let mut tables = Vec::with_capacity(self.max_level);
        for m in 1..=self.max_level {
            let vals = f.level(m)?;
            let elems: Vec<_> = tower.elements(m).collect();
            let out: Vec<CycNum> = elems
                .par_iter()
                .map(|&t| {
                    // group f(x) by the exponent of ψ(−x t), then rotate once per bucket
                    let mut buckets: Vec<Option<CycNum>> = vec![None; p];
                    for (&x, v) in elems.iter().zip(vals) {
                        if v.is_zero() {
                            continue;
                        }
                        let e = self.psi.exponent(tower.neg(tower.mul(x, t))) as usize;
                        match &mut buckets[e] {
                            Some(b) => *b += v,
                            slot => *slot = Some(v.clone()),
                        }
                    }
                    let mut acc = CycNum::zero(p as u64).expect("p is prime");
                    for (j, b) in buckets.into_iter().enumerate() {
                        if let Some(b) = b {
                            acc += &b.mul_root(j as i64);
                        }
                    }
                    -acc
                })
                .collect();
            tables.push(out);
        }
        TraceDatum::from_tables(tower, 1, tables)
    }

    /// `π₁!(π₂*f ⊗ mult*𝓛(ψ))[1]` on coordinates `(t, x)` of 𝔸².
    pub fn ft_via_pipeline(&self, f: &TraceDatum) -> Result<TraceDatum> {
        self.check_input(f)?;
        let tower = self.tower().clone();
        let f = truncate(f, self.max_level)?;
        let kernel = TraceDatum::character(&self.psi.conjugate_flavor(), self.max_level)?;
        let pulled_f = f.pullback(&PointMap::projection(&tower, 2, 1))?;
        let pulled_k = kernel.pullback(&PointMap::multiplication(&tower))?;
        let product = pulled_f.tensor(&pulled_k)?;
        Ok(product
            .pushforward_c(&PointMap::projection(&tower, 2, 0))?
            .shift(1))
    }

    /// Arithmetic-flavor transform, by conjugating in and out of [`ft`](Self::ft).
    pub fn ft_arithmetic(&self, f: &TraceDatum) -> Result<TraceDatum> {
        Ok(self.ft(&f.conj())?.conj())
    }

    /// `ft_{ψ⁻¹}(ft_ψ(f))` against `f(−1)`, level by level.
    pub fn inversion_check(&self, f: &TraceDatum) -> Result<LevelReport> {
        let f = truncate(f, self.max_level)?;
        let double = self.inverse_char().ft(&self.ft(&f)?)?;
        let expected = f.tate_twist(-1);
        LevelReport::compare("inversion", &double, &expected)
    }

    /// `ft(1) = −q^m δ₀` at every level.
    pub fn orthogonality_check(&self) -> Result<LevelReport> {
        let tower = self.tower().clone();
        let one = TraceDatum::one(tower.clone(), 1, self.max_level)?;
        let delta = TraceDatum::delta(tower.clone(), self.max_level, &[tower.zero(1)])?;
        let expected = delta.tate_twist(-1).shift(1);
        LevelReport::compare("orthogonality", &self.ft(&one)?, &expected)
    }

    /// The two routes agree on `f`.
    pub fn pipeline_check(&self, f: &TraceDatum) -> Result<LevelReport> {
        LevelReport::compare("pipeline", &self.ft_via_pipeline(f)?, &self.ft(f)?)
    }

    /// `Σ_t ft(f)·conj(ft(g)) = q^m Σ_x f·conj(g)` at every level.
    pub fn plancherel_check(&self, f: &TraceDatum, g: &TraceDatum) -> Result<LevelReport> {
        let (ff, fg) = (self.ft(f)?, self.ft(g)?);
        let lhs = ff.tensor(&fg.conj())?;
        let rhs = truncate(f, self.max_level)?
            .tensor(&truncate(g, self.max_level)?.conj())?
            .tate_twist(-1);
        let mut levels = Vec::new();
        for m in 1..=self.max_level {
            levels.push((m, lhs.total(m)? == rhs.total(m)?));
        }
        Ok(LevelReport::from_levels("plancherel", levels))
    }
}

/// Restriction of a datum to levels `1..=m`.
pub fn truncate(f: &TraceDatum, m: usize) -> Result<TraceDatum> {
    if f.max_level() == m {
        return Ok(f.clone());
    }
    let tables = (1..=m)
        .map(|k| f.level(k).map(|v| v.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    TraceDatum::from_tables(f.tower().clone(), f.dim(), tables)
}

/// Pass/fail per level for one identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub check: String,
    pub levels: Vec<(usize, bool)>,
    pub passed: bool,
}

impl LevelReport {
    fn from_levels(check: &str, levels: Vec<(usize, bool)>) -> Self {
        let passed = levels.iter().all(|&(_, ok)| ok);
        LevelReport {
            check: check.to_string(),
            levels,
            passed,
        }
    }

    fn compare(check: &str, got: &TraceDatum, want: &TraceDatum) -> Result<Self> {
        if got.max_level() != want.max_level() || got.dim() != want.dim() {
            return Ok(Self::from_levels(check, vec![(0, false)]));
        }
        let levels = (1..=got.max_level())
            .map(|m| Ok((m, got.level(m)? == want.level(m)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_levels(check, levels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::FieldSpec;
    use rand::SeedableRng;

    fn cfg(p: u32, n: u32, m: usize) -> FourierConfig {
        let t = Arc::new(FFTower::new(FieldSpec::new(p, n).unwrap(), m).unwrap());
        FourierConfig::standard(t, m).unwrap()
    }

    #[test]
    fn constant_goes_to_minus_q_delta() {
        let c = cfg(5, 1, 1);
        let one = TraceDatum::one(c.tower().clone(), 1, 1).unwrap();
        let out = c.ft(&one).unwrap();
        let vals = out.level(1).unwrap();
        assert_eq!(vals[0], CycNum::from_integer(5, -5).unwrap());
        assert!(vals[1..].iter().all(|v| v.is_zero()));
    }

    #[test]
    fn delta_goes_to_minus_one() {
        let c = cfg(3, 1, 2);
        let t = c.tower().clone();
        let d = TraceDatum::delta(t.clone(), 2, &[t.zero(1)]).unwrap();
        let minus_one = TraceDatum::constant(t, 1, 2, &CycNum::from_integer(3, -1).unwrap()).unwrap();
        assert_eq!(c.ft(&d).unwrap(), minus_one);
        assert_eq!(c.ft_via_pipeline(&d).unwrap(), minus_one);
    }

    #[test]
    fn character_collapses_to_a_point() {
        // f(x) = ψ(−a x) transforms to −q·δ_{−a}
        let c = cfg(7, 1, 1);
        let t = c.tower().clone();
        let a = t.from_int(1, 3);
        let f = TraceDatum::character(&c.psi().twisted(t.neg(a)).unwrap(), 1).unwrap();
        let out = c.ft(&f).unwrap();
        let target = t.neg(a).index() as usize;
        for (i, v) in out.level(1).unwrap().iter().enumerate() {
            let want = if i == target { -7 } else { 0 };
            assert_eq!(*v, CycNum::from_integer(7, want).unwrap(), "t = {i}");
        }
    }

    #[test]
    fn trivial_character_rejected() {
        let t = Arc::new(FFTower::new(FieldSpec::new(3, 1).unwrap(), 1).unwrap());
        let psi = AdditiveCharacter::standard(t.clone(), Flavor::Arithmetic)
            .twisted(t.zero(1))
            .unwrap();
        assert!(matches!(FourierConfig::new(psi, 1), Err(Error::Config(_))));
    }

    #[test]
    fn inversion_and_plancherel_on_random_data() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (p, n, m) in [(5, 1, 1), (2, 2, 2), (3, 1, 2)] {
            let c = cfg(p, n, m);
            let f = TraceDatum::random(c.tower().clone(), 1, m, &mut rng).unwrap();
            let g = TraceDatum::random(c.tower().clone(), 1, m, &mut rng).unwrap();
            assert!(c.inversion_check(&f).unwrap().passed);
            assert!(c.plancherel_check(&f, &g).unwrap().passed);
            assert!(c.pipeline_check(&f).unwrap().passed);
            assert!(c.orthogonality_check().unwrap().passed);
        }
    }

    #[test]
    fn translation_becomes_modulation() {
        let c = cfg(3, 2, 1);
        let t = c.tower().clone();
        for a in t.elements(1) {
            let d = TraceDatum::delta(t.clone(), 1, &[a]).unwrap();
            let out = c.ft(&d).unwrap();
            for s in t.elements(1) {
                let want = -c.psi().eval(t.neg(t.mul(a, s)));
                assert_eq!(*out.value(&[s]).unwrap(), want);
            }
        }
    }
}
