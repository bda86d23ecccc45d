//! The fraction field `ℒ` of `ℛ`.
//!
//! There is no multivariate gcd here. A fraction is a numerator over a
//! positive integer times a multiset of normalized factors, where each factor
//! is primitive with leading monomial `t_0`. Sums use the multiset lcm of the
//! denominators, and reduction only trial-divides by the recorded factors.
//! In practice denominators are products of a handful of binomials like
//! `1 − q^{-1} t_{α∨}`, so this stays small.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::{GroupAlgElt, HalfLaurent};
use crate::error::{Error, Result};
use crate::roots::{Coweight, RootDatum, WeylElt};

#[derive(Clone)]
pub struct RatFun {
    rank: usize,
    num: GroupAlgElt,
    /// Positive integer part of the denominator.
    scalar: BigInt,
    factors: BTreeMap<GroupAlgElt, u32>,
}

impl RatFun {
    pub fn zero(rank: usize) -> Self {
        Self::from_r(rank, GroupAlgElt::zero())
    }

    pub fn one(rank: usize) -> Self {
        Self::from_r(rank, GroupAlgElt::one(rank))
    }

    pub fn from_r(rank: usize, num: GroupAlgElt) -> Self {
        RatFun { rank, num, scalar: BigInt::one(), factors: BTreeMap::new() }
    }

    pub fn from_scalar(rank: usize, c: HalfLaurent) -> Self {
        Self::from_r(rank, GroupAlgElt::scalar(rank, c))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `num / den`.
    pub fn new(rank: usize, num: GroupAlgElt, den: &GroupAlgElt) -> Result<Self> {
        Ok(Self::from_r(rank, num).mul(&Self::from_r(rank, den.clone()).inverse()?))
    }

    pub fn numerator(&self) -> &GroupAlgElt {
        &self.num
    }

    /// The full denominator as a single element of `ℛ`.
    pub fn denominator(&self) -> GroupAlgElt {
        let mut d = GroupAlgElt::scalar(self.rank, HalfLaurent::monomial2(0, self.scalar.clone()));
        for (f, &k) in &self.factors {
            for _ in 0..k {
                d = &d * f;
            }
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Absorb a factor into the denominator, normalizing it first.
    fn push_factor(&mut self, f: &GroupAlgElt, times: u32) {
        let (c, lam, e, g) = f.normalize_unit().expect("non-zero factor");
        let cpow = c.pow(times);
        if cpow.is_negative() {
            self.num = -&self.num;
        }
        self.scalar *= cpow.abs();
        let t = times as i64;
        self.num = self.num.mul_monomial(&(-t * lam), -e * times as i32, &BigInt::one());
        if g.as_scalar().is_some_and(|s| s.is_one()) {
            return;
        }
        *self.factors.entry(g).or_insert(0) += times;
    }

    fn reduce(self) -> Self {
        let keys: Vec<GroupAlgElt> = self.factors.keys().cloned().collect();
        self.reduce_by(keys)
    }

    /// Trial-divides the numerator only by `candidates`; every other recorded
    /// factor must already be known not to divide it.
    fn reduce_by(mut self, candidates: Vec<GroupAlgElt>) -> Self {
        if self.num.is_zero() {
            return Self::zero(self.rank);
        }
        let mut image = None;
        for f in candidates {
            loop {
                let k = self.factors[&f];
                if k == 0 || !image.get_or_insert_with(|| self.num.mod_image()).admits_divisor(&f) {
                    break;
                }
                match self.num.exact_div_prechecked(&f) {
                    Ok(q) => {
                        self.num = q;
                        image = None;
                        *self.factors.get_mut(&f).expect("present") -= 1;
                    }
                    Err(_) => break,
                }
            }
        }
        self.factors.retain(|_, k| *k > 0);
        if self.scalar.is_one() {
            return self;
        }
        let g = self.num.content().gcd(&self.scalar);
        if !g.is_one() {
            self.scalar /= &g;
            self.num = self.num.exact_div(&GroupAlgElt::scalar(self.rank, HalfLaurent::monomial2(0, g))).expect("content divides");
        }
        self
    }

    pub fn add(&self, rhs: &RatFun) -> RatFun {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let mut lcm = self.factors.clone();
        for (f, &k) in &rhs.factors {
            let e = lcm.entry(f.clone()).or_insert(0);
            *e = (*e).max(k);
        }
        let scalar = self.scalar.lcm(&rhs.scalar);
        let lift = |x: &RatFun| -> GroupAlgElt {
            let mut n = x.num.scale_int(&(&scalar / &x.scalar));
            for (f, &k) in &lcm {
                let have = x.factors.get(f).copied().unwrap_or(0);
                for _ in have..k {
                    n = &n * f;
                }
            }
            n
        };
        let num = &lift(self) + &lift(rhs);
        // Reduced numerators are coprime to their own factors, so a factor can
        // only cancel where both summands carry it to the same power.
        let shared = self.factors.iter().filter(|(f, k)| rhs.factors.get(*f) == Some(k)).map(|(f, _)| f.clone()).collect();
        RatFun { rank: self.rank, num, scalar, factors: lcm }.reduce_by(shared)
    }

    pub fn neg(&self) -> RatFun {
        RatFun { num: -&self.num, ..self.clone() }
    }

    pub fn sub(&self, rhs: &RatFun) -> RatFun {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &RatFun) -> RatFun {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(self.rank);
        }
        let mut factors = self.factors.clone();
        for (f, &k) in &rhs.factors {
            *factors.entry(f.clone()).or_insert(0) += k;
        }
        // Each numerator is coprime to its own factors, so only cross
        // cancellation is possible; do it before multiplying out.
        let (mut a, mut b) = (self.num.clone(), rhs.num.clone());
        Self::cancel(&mut a, &rhs.factors, &self.factors, &mut factors);
        Self::cancel(&mut b, &self.factors, &rhs.factors, &mut factors);
        factors.retain(|_, k| *k > 0);
        RatFun {
            rank: self.rank,
            num: &a * &b,
            scalar: &self.scalar * &rhs.scalar,
            factors,
        }
        .reduce_by(Vec::new())
    }

    fn cancel(
        num: &mut GroupAlgElt,
        theirs: &BTreeMap<GroupAlgElt, u32>,
        mine: &BTreeMap<GroupAlgElt, u32>,
        factors: &mut BTreeMap<GroupAlgElt, u32>,
    ) {
        let mut image = None;
        for (f, &k) in theirs {
            if mine.contains_key(f) {
                continue;
            }
            for _ in 0..k {
                if !image.get_or_insert_with(|| num.mod_image()).admits_divisor(f) {
                    break;
                }
                match num.exact_div_prechecked(f) {
                    Ok(q) => {
                        *num = q;
                        image = None;
                        *factors.get_mut(f).expect("recorded") -= 1;
                    }
                    Err(_) => break,
                }
            }
        }
    }

    pub fn mul_r(&self, r: &GroupAlgElt) -> RatFun {
        self.mul(&RatFun::from_r(self.rank, r.clone()))
    }

    pub fn scale(&self, c: &HalfLaurent) -> RatFun {
        self.mul_r(&GroupAlgElt::scalar(self.rank, c.clone()))
    }

    pub fn inverse(&self) -> Result<RatFun> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut num = GroupAlgElt::scalar(self.rank, HalfLaurent::monomial2(0, self.scalar.clone()));
        for (f, &k) in &self.factors {
            for _ in 0..k {
                num = &num * f;
            }
        }
        let mut out = RatFun::from_r(self.rank, num);
        out.push_factor(&self.num, 1);
        Ok(out.reduce())
    }

    pub fn div(&self, rhs: &RatFun) -> Result<RatFun> {
        Ok(self.mul(&rhs.inverse()?))
    }

    fn map_ring(&self, f: impl Fn(&GroupAlgElt) -> GroupAlgElt) -> RatFun {
        let mut out = RatFun {
            rank: self.rank,
            num: f(&self.num),
            scalar: self.scalar.clone(),
            factors: BTreeMap::new(),
        };
        for (g, &k) in &self.factors {
            out.push_factor(&f(g), k);
        }
        // `f` is a ring automorphism, so coprimality is preserved.
        out.reduce_by(Vec::new())
    }

    pub fn w_act(&self, datum: &RootDatum, w: WeylElt) -> RatFun {
        if w == WeylElt::IDENTITY {
            return self.clone();
        }
        self.map_ring(|x| x.w_act(datum, w))
    }

    pub fn iota(&self) -> RatFun {
        self.map_ring(GroupAlgElt::iota)
    }

    pub fn bar(&self) -> RatFun {
        self.map_ring(GroupAlgElt::bar)
    }

    /// Membership in `ℛ`: the quotient if the denominator divides exactly.
    pub fn to_r(&self) -> Result<GroupAlgElt> {
        let mut num = self.num.clone();
        for (f, &k) in &self.factors {
            for _ in 0..k {
                num = num.exact_div(f)?;
            }
        }
        if !self.scalar.is_one() {
            num = num.exact_div(&GroupAlgElt::scalar(self.rank, HalfLaurent::monomial2(0, self.scalar.clone())))?;
        }
        Ok(num)
    }

    pub fn is_w_invariant(&self, datum: &RootDatum) -> bool {
        (0..datum.rank()).all(|i| self.w_act(datum, datum.simple_reflection(i)) == *self)
    }

    pub fn monomial(lam: Coweight) -> RatFun {
        RatFun::from_r(lam.rank(), GroupAlgElt::monomial(lam))
    }
}

impl PartialEq for RatFun {
    fn eq(&self, other: &Self) -> bool {
        if self.factors == other.factors && self.scalar == other.scalar {
            return self.num == other.num;
        }
        self.sub(other).is_zero()
    }
}

impl Eq for RatFun {}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() && self.scalar.is_one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "[{}] / [{}", self.num, self.scalar)?;
        for (g, k) in &self.factors {
            write!(f, " * ({g})^{k}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_laws_small() {
        let d = RootDatum::build("A1", "sc").unwrap();
        let a = d.simple_coroot(0);
        let one = GroupAlgElt::one(1);
        let t = GroupAlgElt::monomial(a);
        let x = RatFun::new(1, one.clone(), &(&one - &t)).unwrap();
        let y = RatFun::new(1, t.clone(), &(&one - &t)).unwrap();
        // 1/(1-t) - t/(1-t) = 1
        assert_eq!(x.sub(&y), RatFun::one(1));
        assert_eq!(x.mul(&x.inverse().unwrap()), RatFun::one(1));
        // (1-t)/(t-1) = -1, exercising sign normalization.
        let z = RatFun::new(1, &one - &t, &(&t - &one)).unwrap();
        assert_eq!(z.to_r().unwrap(), -&one);
    }

    #[test]
    fn weyl_sum_rank_one() {
        // Σ_w w((1 − v^{-2} t_{-α∨})/(1 − t_{-α∨})) = 1 + v^{-2}
        let d = RootDatum::build("A1", "sc").unwrap();
        let a = d.simple_coroot(0);
        let one = GroupAlgElt::one(1);
        let qi = HalfLaurent::v_pow(-2);
        let f = RatFun::new(
            1,
            &one - &GroupAlgElt::monomial(-a).scale(&qi),
            &(&one - &GroupAlgElt::monomial(-a)),
        )
        .unwrap();
        let s = f.add(&f.w_act(&d, d.simple_reflection(0)));
        assert_eq!(s.to_r().unwrap(), GroupAlgElt::scalar(1, &HalfLaurent::one() + &qi));
    }

    #[test]
    fn not_divisible_is_distinct() {
        let d = RootDatum::build("A1", "sc").unwrap();
        let a = d.simple_coroot(0);
        let one = GroupAlgElt::one(1);
        let f = RatFun::new(
            1,
            &one - &GroupAlgElt::monomial(a).scale(&HalfLaurent::v_pow(-2)),
            &(&one - &GroupAlgElt::monomial(a)),
        )
        .unwrap();
        assert!(matches!(f.to_r(), Err(Error::NotDivisible)));
        assert!(matches!(RatFun::zero(1).inverse(), Err(Error::DivisionByZero)));
    }
}
