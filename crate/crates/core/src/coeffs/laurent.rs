//! Laurent polynomials in `v` with half-integer exponents.
//!
//! Exponents are stored doubled: the pair `(n, c)` means `c · v^{n/2}`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfLaurent {
    /// Sorted by exponent, no zero coefficients.
    terms: Vec<(i32, BigInt)>,
}

impl HalfLaurent {
    pub fn zero() -> Self {
        HalfLaurent { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial2(0, BigInt::from(c))
    }

    /// `c · v^{k}` for integer `k`.
    pub fn v_pow(k: i32) -> Self {
        Self::monomial2(2 * k, BigInt::one())
    }

    /// `c · v^{n/2}`.
    pub fn monomial2(doubled_exp: i32, c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            HalfLaurent { terms: vec![(doubled_exp, c)] }
        }
    }

    /// `q = v²`.
    pub fn q() -> Self {
        Self::v_pow(2)
    }

    /// Builds from `(doubled_exp, coeff)` pairs in any order; merges duplicates.
    pub fn from_terms<I: IntoIterator<Item = (i32, BigInt)>>(it: I) -> Self {
        let mut terms: Vec<(i32, BigInt)> = it.into_iter().collect();
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<(i32, BigInt)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        HalfLaurent { terms: out }
    }

    pub fn terms(&self) -> &[(i32, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// Returns `(doubled_exp, coeff)` if this is a single term.
    pub fn as_monomial(&self) -> Option<(i32, &BigInt)> {
        match self.terms.as_slice() {
            [(e, c)] => Some((*e, c)),
            _ => None,
        }
    }

    /// Coefficient of `v^{n/2}`.
    pub fn coeff2(&self, doubled_exp: i32) -> BigInt {
        self.terms
            .binary_search_by_key(&doubled_exp, |t| t.0)
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    pub fn min_exp2(&self) -> Option<i32> {
        self.terms.first().map(|t| t.0)
    }

    pub fn max_exp2(&self) -> Option<i32> {
        self.terms.last().map(|t| t.0)
    }

    /// Multiply by `v^{n/2}`.
    pub fn shift2(&self, doubled: i32) -> Self {
        HalfLaurent {
            terms: self.terms.iter().map(|(e, c)| (e + doubled, c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        HalfLaurent {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// `v ↦ v^{-1}`.
    pub fn bar(&self) -> Self {
        HalfLaurent {
            terms: self.terms.iter().rev().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Value at `v = 1`.
    pub fn at_one(&self) -> BigInt {
        self.terms.iter().map(|t| &t.1).sum()
    }

    /// Whether every exponent is an integer power of `v` (even doubled exponent).
    pub fn is_integral_in_v(&self) -> bool {
        self.terms.iter().all(|(e, _)| e % 2 == 0)
    }

    /// Integer gcd of all coefficients (0 for the zero element).
    pub fn content(&self) -> BigInt {
        use num_integer::Integer;
        self.terms.iter().fold(BigInt::zero(), |g, (_, c)| g.gcd(c))
    }

    /// Exact division by an integer; `None` if some coefficient is not divisible.
    pub fn div_int(&self, k: &BigInt) -> Option<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            if !(c % k).is_zero() {
                return None;
            }
            terms.push((*e, c / k));
        }
        Some(HalfLaurent { terms })
    }

    pub fn leading_coeff_sign_negative(&self) -> bool {
        self.terms.last().is_some_and(|t| t.1.is_negative())
    }
}

impl fmt::Debug for HalfLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for HalfLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let (sign, abs) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let power = if e % 2 == 0 { format!("{}", e / 2) } else { format!("{e}/2") };
            match (*e, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (2, true) => write!(f, "v")?,
                (2, false) => write!(f, "{abs}*v")?,
                (_, true) => write!(f, "v^{power}")?,
                (_, false) => write!(f, "{abs}*v^{power}")?,
            }
        }
        Ok(())
    }
}

fn merge(a: &[(i32, BigInt)], b: &[(i32, BigInt)], negate_b: bool) -> Vec<(i32, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let c = if negate_b { -&b[j].1 } else { b[j].1.clone() };
            out.push((b[j].0, c));
            j += 1;
        } else {
            let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
            if !c.is_zero() {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl Add for &HalfLaurent {
    type Output = HalfLaurent;
    fn add(self, rhs: &HalfLaurent) -> HalfLaurent {
        HalfLaurent { terms: merge(&self.terms, &rhs.terms, false) }
    }
}

impl Sub for &HalfLaurent {
    type Output = HalfLaurent;
    fn sub(self, rhs: &HalfLaurent) -> HalfLaurent {
        HalfLaurent { terms: merge(&self.terms, &rhs.terms, true) }
    }
}

impl Add for HalfLaurent {
    type Output = HalfLaurent;
    fn add(self, rhs: HalfLaurent) -> HalfLaurent {
        &self + &rhs
    }
}

impl Sub for HalfLaurent {
    type Output = HalfLaurent;
    fn sub(self, rhs: HalfLaurent) -> HalfLaurent {
        &self - &rhs
    }
}

impl AddAssign<&HalfLaurent> for HalfLaurent {
    fn add_assign(&mut self, rhs: &HalfLaurent) {
        if rhs.is_zero() {
            return;
        }
        self.terms = merge(&self.terms, &rhs.terms, false);
    }
}

impl Neg for &HalfLaurent {
    type Output = HalfLaurent;
    fn neg(self) -> HalfLaurent {
        HalfLaurent { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Neg for HalfLaurent {
    type Output = HalfLaurent;
    fn neg(self) -> HalfLaurent {
        -&self
    }
}

impl Mul for &HalfLaurent {
    type Output = HalfLaurent;
    fn mul(self, rhs: &HalfLaurent) -> HalfLaurent {
        if self.is_zero() || rhs.is_zero() {
            return HalfLaurent::zero();
        }
        if let Some((e, c)) = rhs.as_monomial() {
            let mut out = self.shift2(e);
            if !c.is_one() {
                out = out.scale(c);
            }
            return out;
        }
        HalfLaurent::from_terms(
            self.terms
                .iter()
                .flat_map(|(e1, c1)| rhs.terms.iter().map(move |(e2, c2)| (e1 + e2, c1 * c2))),
        )
    }
}

impl Mul for HalfLaurent {
    type Output = HalfLaurent;
    fn mul(self, rhs: HalfLaurent) -> HalfLaurent {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(pairs: &[(i32, i64)]) -> HalfLaurent {
        HalfLaurent::from_terms(pairs.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    #[test]
    fn arithmetic() {
        let q = HalfLaurent::q();
        let one = HalfLaurent::one();
        // (q - 1)(q + 1) = q² - 1
        assert_eq!(&(&q - &one) * &(&q + &one), lp(&[(8, 1), (0, -1)]));
        assert!((&q - &q).is_zero());
        assert_eq!(HalfLaurent::v_pow(-1) * HalfLaurent::v_pow(1), one);
    }

    #[test]
    fn half_exponents_and_bar() {
        let x = lp(&[(1, 3), (-3, -2)]);
        assert_eq!(x.bar().bar(), x);
        assert_eq!(x.bar(), lp(&[(-1, 3), (3, -2)]));
        assert_eq!(&x.bar() * &HalfLaurent::q().bar(), (&x * &HalfLaurent::q()).bar());
        assert!(!x.is_integral_in_v());
        assert_eq!(x.at_one(), BigInt::from(1));
    }

    #[test]
    fn display() {
        assert_eq!(lp(&[(4, 1), (0, -1)]).to_string(), "v^2 - 1");
        assert_eq!(lp(&[(-1, 2)]).to_string(), "2*v^-1/2");
        assert_eq!(HalfLaurent::zero().to_string(), "0");
    }
}
