//! The group algebra `ℛ = ℤ_v[X_*]` with half-integer `v`-exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use super::HalfLaurent;
use crate::error::{Error, Result};
use crate::roots::{Coweight, RootDatum, WeylElt, MAX_RANK};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupAlgElt {
    terms: BTreeMap<Coweight, HalfLaurent>,
}

/// Monomial key for exact division: an additive total order on `X_* × ½ℤ`.
type Key = (i64, [i64; MAX_RANK], i32);

fn key_of(lam: &Coweight, e: i32) -> Key {
    let mut c = [0; MAX_RANK];
    c[..lam.rank()].copy_from_slice(lam.coords());
    (lam.coords().iter().sum(), c, e)
}


// ---- a one-variable image over F_p, used to reject divisions cheaply ----

const P: u64 = (1 << 61) - 1;
/// `t_λ ↦ z^{⟨a,λ⟩}`, `v^{1/2} ↦ g`.
const Z_WEIGHT: [i64; MAX_RANK] = [1, 3, 10, 31];
const HALF_V: u64 = 0x2545_F491_4F6C_DD1D % P;
const HALF_V_RANGE: i32 = 512;

fn mulm(a: u64, b: u64) -> u64 {
    let prod = a as u128 * b as u128;
    let r = (prod as u64 & P) + (prod >> 61) as u64;
    if r >= P {
        r - P
    } else {
        r
    }
}

fn powm(b: u64, e: i64) -> u64 {
    let (mut b, mut e) = if e < 0 { (powm(b, P as i64 - 2), -e) } else { (b, e) };
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, b);
        }
        b = mulm(b, b);
        e >>= 1;
    }
    acc
}

fn half_v_pow(e: i32) -> u64 {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| (-HALF_V_RANGE..=HALF_V_RANGE).map(|e| powm(HALF_V, e as i64)).collect());
    match t.get((e + HALF_V_RANGE) as usize) {
        Some(&x) if e.abs() <= HALF_V_RANGE => x,
        _ => powm(HALF_V, e as i64),
    }
}

fn int_mod_p(c: &BigInt) -> u64 {
    match c.to_i64() {
        Some(x) => x.rem_euclid(P as i64) as u64,
        None => c.mod_floor(&BigInt::from(P)).iter_u64_digits().next().unwrap_or(0),
    }
}

/// Image of an element of `ℛ` under a fixed ring map to `F_p[z^{±1}]`.
pub struct ModImage(BTreeMap<i64, u64>);

impl ModImage {
    /// `false` only when `d` provably does not divide the element: its image
    /// already fails to divide. Only binomial images of `d` are tested;
    /// anything else answers `true`.
    pub fn admits_divisor(&self, d: &GroupAlgElt) -> bool {
        let img = d.mod_image().0;
        if img.len() != 2 {
            return true;
        }
        let (&lo, &w) = img.first_key_value().expect("two terms");
        let (&hi, &u) = img.last_key_value().expect("two terms");
        // d ↦ z^lo (w + u z^k), so modulo d, z^k ≡ c := −w/u.
        let k = hi - lo;
        let c = mulm(P - w, powm(u, -1));
        let c_inv = powm(c, -1);
        let mut rem = vec![0u64; k as usize];
        for (&deg, &a) in &self.0 {
            let (q, r) = (deg.div_euclid(k), deg.rem_euclid(k));
            let f = if q < 0 { powm(c_inv, -q) } else { powm(c, q) };
            let slot = &mut rem[r as usize];
            *slot = (*slot + mulm(a, f)) % P;
        }
        rem.iter().all(|&x| x == 0)
    }
}

impl GroupAlgElt {
    pub fn zero() -> Self {
        GroupAlgElt { terms: BTreeMap::new() }
    }

    /// `c · t_0`.
    pub fn scalar(rank: usize, c: HalfLaurent) -> Self {
        Self::term(Coweight::zero(rank), c)
    }

    pub fn one(rank: usize) -> Self {
        Self::scalar(rank, HalfLaurent::one())
    }

    /// `t_λ`.
    pub fn monomial(lam: Coweight) -> Self {
        Self::term(lam, HalfLaurent::one())
    }

    /// `c · t_λ`.
    pub fn term(lam: Coweight, c: HalfLaurent) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(lam, c);
        }
        GroupAlgElt { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Coweight, HalfLaurent)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (lam, c) in it {
            out.add_term(lam, &c);
        }
        out
    }

    pub fn add_term(&mut self, lam: Coweight, c: &HalfLaurent) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&lam) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&lam);
                }
            }
            None => {
                self.terms.insert(lam, c.clone());
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Coweight, &HalfLaurent)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, lam: &Coweight) -> HalfLaurent {
        self.terms.get(lam).cloned().unwrap_or_default()
    }

    /// The `v`-coefficient if this element is a multiple of `t_0`.
    pub fn as_scalar(&self) -> Option<HalfLaurent> {
        match self.terms.len() {
            0 => Some(HalfLaurent::zero()),
            1 => {
                let (lam, c) = self.terms.iter().next().expect("one term");
                lam.is_zero().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &HalfLaurent) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        GroupAlgElt {
            terms: self
                .terms
                .iter()
                .map(|(l, x)| (*l, x * c))
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        self.scale(&HalfLaurent::monomial2(0, k.clone()))
    }

    /// Multiply by `t_μ`.
    pub fn shift(&self, mu: &Coweight) -> Self {
        GroupAlgElt { terms: self.terms.iter().map(|(l, x)| (*l + *mu, x.clone())).collect() }
    }

    /// Multiply by the monomial `c · v^{n/2} · t_μ`.
    pub fn mul_monomial(&self, mu: &Coweight, doubled: i32, c: &BigInt) -> Self {
        GroupAlgElt {
            terms: self
                .terms
                .iter()
                .map(|(l, x)| (*l + *mu, x.shift2(doubled).scale(c)))
                .collect(),
        }
    }

    /// `t_λ ↦ t_{wλ}`.
    pub fn w_act(&self, datum: &RootDatum, w: WeylElt) -> Self {
        if w == WeylElt::IDENTITY {
            return self.clone();
        }
        GroupAlgElt {
            terms: self.terms.iter().map(|(l, x)| (datum.weyl_act(w, l), x.clone())).collect(),
        }
    }

    /// `t_λ ↦ t_{-λ}`, fixing `v`.
    pub fn iota(&self) -> Self {
        GroupAlgElt { terms: self.terms.iter().map(|(l, x)| (-*l, x.clone())).collect() }
    }

    /// `v ↦ v^{-1}`, fixing `t_λ`.
    pub fn bar(&self) -> Self {
        GroupAlgElt { terms: self.terms.iter().map(|(l, x)| (*l, x.bar())).collect() }
    }

    /// Invariance under every simple reflection.
    pub fn is_w_invariant(&self, datum: &RootDatum) -> bool {
        (0..datum.rank()).all(|i| self.w_act(datum, datum.simple_reflection(i)) == *self)
    }

    /// Specialize `v = 1`.
    pub fn at_v_one(&self) -> BTreeMap<Coweight, BigInt> {
        self.terms
            .iter()
            .map(|(l, x)| (*l, x.at_one()))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// Whether every coefficient is a constant (no `v`).
    pub fn is_v_free(&self) -> bool {
        self.terms.values().all(|x| x.terms().iter().all(|(e, _)| *e == 0))
    }

    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, x| g.gcd(&x.content()))
    }

    fn flat(&self) -> BTreeMap<Key, (Coweight, i32, BigInt)> {
        let mut out = BTreeMap::new();
        for (lam, x) in &self.terms {
            for (e, c) in x.terms() {
                out.insert(key_of(lam, *e), (*lam, *e, c.clone()));
            }
        }
        out
    }

    /// Leading monomial `(t_λ, doubled v-exponent, coeff)` in the division order.
    pub fn leading_term(&self) -> Option<(Coweight, i32, BigInt)> {
        let mut best: Option<(Key, Coweight, i32, BigInt)> = None;
        for (lam, x) in &self.terms {
            let (e, c) = x.terms().last().expect("non-zero coefficient");
            let k = key_of(lam, *e);
            if best.as_ref().map_or(true, |b| k > b.0) {
                best = Some((k, *lam, *e, c.clone()));
            }
        }
        best.map(|(_, l, e, c)| (l, e, c))
    }

    fn exponent_box(&self) -> Option<([i64; MAX_RANK], [i64; MAX_RANK], i32, i32)> {
        let mut lo = [i64::MAX; MAX_RANK];
        let mut hi = [i64::MIN; MAX_RANK];
        let (mut vlo, mut vhi) = (i32::MAX, i32::MIN);
        for (lam, x) in &self.terms {
            for (k, &c) in lam.coords().iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
            vlo = vlo.min(x.min_exp2()?);
            vhi = vhi.max(x.max_exp2()?);
        }
        if self.terms.is_empty() {
            None
        } else {
            Some((lo, hi, vlo, vhi))
        }
    }

    /// Image under the fixed ring map to `F_p[z^{±1}]`.
    pub fn mod_image(&self) -> ModImage {
        let mut out: BTreeMap<i64, u64> = BTreeMap::new();
        for (lam, x) in &self.terms {
            let deg: i64 = lam.coords().iter().zip(Z_WEIGHT).map(|(&c, a)| a * c).sum();
            let mut acc = 0;
            for (e, c) in x.terms() {
                acc = (acc + mulm(half_v_pow(*e), int_mod_p(c))) % P;
            }
            let slot = out.entry(deg).or_insert(0);
            *slot = (*slot + acc) % P;
        }
        out.retain(|_, c| *c != 0);
        ModImage(out)
    }

    /// Exact division in `ℛ`. Fails with [`Error::NotDivisible`] when `d` does
    /// not divide `self`.
    pub fn exact_div(&self, d: &GroupAlgElt) -> Result<GroupAlgElt> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        // Fast path: monomial divisor.
        if d.terms.len() == 1 {
            let (lam, x) = d.terms.iter().next().expect("one term");
            if let Some((e, c)) = x.as_monomial() {
                let mut out = Self::zero();
                for (mu, y) in &self.terms {
                    let q = y.div_int(c).ok_or(Error::NotDivisible)?;
                    out.terms.insert(*mu - *lam, q.shift2(-e));
                }
                return Ok(out);
            }
        }
        if !self.mod_image().admits_divisor(d) {
            return Err(Error::NotDivisible);
        }
        self.exact_div_prechecked(d)
    }

    /// [`GroupAlgElt::exact_div`] without the modular rejection test, for
    /// callers that already ran it.
    pub(crate) fn exact_div_prechecked(&self, d: &GroupAlgElt) -> Result<GroupAlgElt> {
        let rank = d.terms.keys().next().expect("non-zero").rank();
        let (nlo, nhi, nvlo, nvhi) = self.exponent_box().expect("non-zero");
        let (dlo, dhi, dvlo, dvhi) = d.exponent_box().expect("non-zero");
        let (qvlo, qvhi) = (nvlo - dvlo, nvhi - dvhi);
        let dflat: Vec<(Coweight, i32, BigInt)> = d.flat().into_values().collect();
        let (dl, de, dc) = d.leading_term().expect("non-zero");

        let mut rem = self.flat();
        let mut quotient = Self::zero();
        while let Some((_, (rl, re, rc))) = rem.last_key_value().map(|(k, v)| (*k, v.clone())) {
            let (qc, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return Err(Error::NotDivisible);
            }
            let ql = rl - dl;
            let qe = re - de;
            let in_box = (0..rank).all(|k| {
                let c = ql.coords()[k];
                c >= nlo[k] - dlo[k] && c <= nhi[k] - dhi[k]
            }) && qe >= qvlo
                && qe <= qvhi;
            if !in_box {
                return Err(Error::NotDivisible);
            }
            for (tl, te, tc) in &dflat {
                let ml = *tl + ql;
                let me = te + qe;
                let k = key_of(&ml, me);
                let sub = tc * &qc;
                match rem.get_mut(&k) {
                    Some(entry) => {
                        entry.2 -= sub;
                        if entry.2.is_zero() {
                            rem.remove(&k);
                        }
                    }
                    None => {
                        rem.insert(k, (ml, me, -sub));
                    }
                }
            }
            quotient.add_term(ql, &HalfLaurent::monomial2(qe, qc));
        }
        Ok(quotient)
    }

    /// Splits off a unit: returns `(c, λ, e, f)` with `self = c · v^{e/2} t_λ · f`
    /// where `f` is primitive with leading monomial `t_0` and a positive
    /// leading coefficient.
    pub fn normalize_unit(&self) -> Option<(BigInt, Coweight, i32, GroupAlgElt)> {
        let (lam, e, lc) = self.leading_term()?;
        let mut content = self.content();
        if lc.is_negative() {
            content = -content;
        }
        let f = self.mul_monomial(&-lam, -e, &BigInt::one());
        let f = GroupAlgElt {
            terms: f
                .terms
                .into_iter()
                .map(|(l, x)| (l, x.div_int(&content).expect("content divides")))
                .collect(),
        };
        Some((content, lam, e, f))
    }

    /// Sum over the `W`-orbit representatives: `Σ_{ν ∈ Wλ} t_ν`.
    pub fn orbit_sum(datum: &RootDatum, lam: &Coweight) -> Self {
        Self::from_terms(datum.weyl_orbit(lam).into_iter().map(|n| (n, HalfLaurent::one())))
    }
}

impl fmt::Debug for GroupAlgElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupAlgElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (lam, x)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({x})*t{:?}", lam.coords())?;
        }
        Ok(())
    }
}

impl Add for &GroupAlgElt {
    type Output = GroupAlgElt;
    fn add(self, rhs: &GroupAlgElt) -> GroupAlgElt {
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (l, x) in &small.terms {
            big.add_term(*l, x);
        }
        big
    }
}

impl Sub for &GroupAlgElt {
    type Output = GroupAlgElt;
    fn sub(self, rhs: &GroupAlgElt) -> GroupAlgElt {
        let mut out = self.clone();
        for (l, x) in &rhs.terms {
            out.add_term(*l, &-x);
        }
        out
    }
}

impl Neg for &GroupAlgElt {
    type Output = GroupAlgElt;
    fn neg(self) -> GroupAlgElt {
        GroupAlgElt { terms: self.terms.iter().map(|(l, x)| (*l, -x)).collect() }
    }
}

impl Mul for &GroupAlgElt {
    type Output = GroupAlgElt;
    fn mul(self, rhs: &GroupAlgElt) -> GroupAlgElt {
        if self.is_zero() || rhs.is_zero() {
            return GroupAlgElt::zero();
        }
        let mut acc: FxHashMap<(Coweight, i32), BigInt> = FxHashMap::default();
        for (l1, x1) in &self.terms {
            for (l2, x2) in &rhs.terms {
                let l = *l1 + *l2;
                for (e1, c1) in x1.terms() {
                    for (e2, c2) in x2.terms() {
                        *acc.entry((l, e1 + e2)).or_default() += c1 * c2;
                    }
                }
            }
        }
        let mut grouped: BTreeMap<Coweight, Vec<(i32, BigInt)>> = BTreeMap::new();
        for ((l, e), c) in acc {
            if !c.is_zero() {
                grouped.entry(l).or_default().push((e, c));
            }
        }
        GroupAlgElt {
            terms: grouped
                .into_iter()
                .map(|(l, v)| (l, HalfLaurent::from_terms(v)))
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GroupAlgElt {
            type Output = GroupAlgElt;
            fn $m(self, rhs: GroupAlgElt) -> GroupAlgElt {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GroupAlgElt {
    type Output = GroupAlgElt;
    fn neg(self) -> GroupAlgElt {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (RootDatum, Coweight) {
        let d = RootDatum::build("A1", "sc").unwrap();
        let a = d.simple_coroot(0);
        (d, a)
    }

    fn t(l: Coweight) -> GroupAlgElt {
        GroupAlgElt::monomial(l)
    }

    #[test]
    fn ring_examples() {
        let (d, a) = setup();
        let one = GroupAlgElt::one(1);
        assert_eq!(&t(a) * &t(a), t(a + a));
        assert_eq!(&(&one - &t(a)) * &(&one + &t(a)), &one - &t(a + a));
        let qi = HalfLaurent::v_pow(-2);
        let x = &one - &t(a).scale(&qi);
        let y = &one - &t(-a).scale(&qi);
        let expect = &(&one - &(&t(a) + &t(-a)).scale(&qi)) + &one.scale(&HalfLaurent::v_pow(-4));
        assert_eq!(&x * &y, expect);
        assert_eq!(t(a).w_act(&d, d.simple_reflection(0)), t(-a));
        assert_eq!(one.scale(&HalfLaurent::q()).w_act(&d, d.simple_reflection(0)), one.scale(&HalfLaurent::q()));
    }

    #[test]
    fn a2_reflection() {
        let d = RootDatum::build("A2", "sc").unwrap();
        let (a1, a2) = (d.simple_coroot(0), d.simple_coroot(1));
        let x = &t(a1) + &t(a2);
        assert_eq!(x.w_act(&d, d.simple_reflection(0)), &t(-a1) + &t(a1 + a2));
    }

    #[test]
    fn involutions() {
        let (_, a) = setup();
        let x = t(a).scale(&HalfLaurent::v_pow(1));
        assert_eq!(x.iota(), t(-a).scale(&HalfLaurent::v_pow(1)));
        assert_eq!(x.bar(), t(a).scale(&HalfLaurent::v_pow(-1)));
        assert_eq!(x.iota().iota(), x);
        assert_eq!(x.bar().iota(), x.iota().bar());
    }

    #[test]
    fn symmetrize() {
        let (d, a) = setup();
        assert!((&t(a) + &t(-a)).is_w_invariant(&d));
        assert!(!t(a).is_w_invariant(&d));
    }

    #[test]
    fn division() {
        let (_, a) = setup();
        let one = GroupAlgElt::one(1);
        let q = (&one - &t(a + a)).exact_div(&(&one - &t(a))).unwrap();
        assert_eq!(q, &one + &t(a));
        let num = &one - &t(a).scale(&HalfLaurent::v_pow(-2));
        assert!(matches!(num.exact_div(&(&one - &t(a))), Err(Error::NotDivisible)));
        assert!(matches!(num.exact_div(&GroupAlgElt::zero()), Err(Error::DivisionByZero)));
        // Laurent shift in the numerator.
        let q = (&t(-a) - &t(a)).exact_div(&(&one - &t(a))).unwrap();
        assert_eq!(q, &t(-a) + &one);
    }

    #[test]
    fn unit_normalization() {
        let (_, a) = setup();
        let x = (&t(a) - &GroupAlgElt::one(1)).scale(&HalfLaurent::monomial2(3, BigInt::from(-4)));
        let (c, lam, e, f) = x.normalize_unit().unwrap();
        assert_eq!(c, BigInt::from(-4));
        assert_eq!(lam, a);
        assert_eq!(e, 3);
        assert_eq!(f, &GroupAlgElt::one(1) - &t(-a));
        assert_eq!(f.mul_monomial(&lam, e, &c), x);
    }
}
