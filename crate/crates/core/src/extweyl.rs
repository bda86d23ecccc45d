//! The extended affine Weyl group `W̃ = X_* ⋊ W`.
//!
//! Conventions: `s_0 = t_{-α̃∨} s_{α̃}`, and the base alcove lies in the
//! negative chamber (`-1 < ⟨α, x⟩ < 0` for all `α > 0`). Affine generators are
//! indexed `0..=r`, with `0` the affine one.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::roots::{Coweight, RootDatum, WeylElt};

/// `t_λ · w`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtAffineElt {
    pub t: Coweight,
    pub w: WeylElt,
}

impl fmt::Debug for ExtAffineElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{:?}·w{}", self.t, self.w.index())
    }
}

/// `x = s_{letters[0]} ⋯ s_{letters[n-1]} · omega`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineWord {
    pub letters: Vec<usize>,
    pub omega: ExtAffineElt,
}

impl RootDatum {
    pub fn ew_identity(&self) -> ExtAffineElt {
        ExtAffineElt { t: self.zero(), w: WeylElt::IDENTITY }
    }

    pub fn translation(&self, lam: Coweight) -> ExtAffineElt {
        ExtAffineElt { t: lam, w: WeylElt::IDENTITY }
    }

    pub fn finite(&self, w: WeylElt) -> ExtAffineElt {
        ExtAffineElt { t: self.zero(), w }
    }

    pub fn check_elt(&self, x: &ExtAffineElt) -> Result<()> {
        if x.t.rank() != self.rank() || x.w.index() >= self.weyl_order() {
            return Err(Error::DatumMismatch(format!("{x:?} does not belong to {self:?}")));
        }
        Ok(())
    }

    /// `(t_λ w)(t_μ u) = t_{λ + wμ}(wu)`.
    pub fn ew_mul(&self, x: &ExtAffineElt, y: &ExtAffineElt) -> ExtAffineElt {
        ExtAffineElt { t: x.t + self.weyl_act(x.w, &y.t), w: self.weyl_mul(x.w, y.w) }
    }

    pub fn ew_inv(&self, x: &ExtAffineElt) -> ExtAffineElt {
        let wi = self.weyl_inv(x.w);
        ExtAffineElt { t: -self.weyl_act(wi, &x.t), w: wi }
    }

    /// The affine simple reflection `s_i`, `i ∈ 0..=r`.
    pub fn s_aff(&self, i: usize) -> ExtAffineElt {
        if i == 0 {
            ExtAffineElt { t: -self.coroot(self.highest_root_index()), w: self.s_highest }
        } else {
            self.finite(self.simple_reflection(i - 1))
        }
    }

    /// `l(t_λ w) = Σ_{α>0, w^{-1}α>0} |⟨α,λ⟩| + Σ_{α>0, w^{-1}α<0} |⟨α,λ⟩ + 1|`.
    pub fn length(&self, x: &ExtAffineElt) -> usize {
        let mut l: i64 = 0;
        for j in 0..self.num_pos_roots() {
            let p = self.pair(j, &x.t);
            l += if self.in_inversion_set(x.w, j) { (p + 1).abs() } else { p.abs() };
        }
        l as usize
    }

    pub fn is_right_descent(&self, x: &ExtAffineElt, i: usize) -> bool {
        self.length(&self.ew_mul(x, &self.s_aff(i))) < self.length(x)
    }

    pub fn is_left_descent(&self, x: &ExtAffineElt, i: usize) -> bool {
        self.length(&self.ew_mul(&self.s_aff(i), x)) < self.length(x)
    }

    /// Evaluate a word in affine generators.
    pub fn from_affine_word(&self, word: &[usize]) -> Result<ExtAffineElt> {
        let mut x = self.ew_identity();
        for &i in word {
            if i > self.rank() {
                return Err(Error::Parse(format!("generator s{i} out of range for rank {}", self.rank())));
            }
            x = self.ew_mul(&x, &self.s_aff(i));
        }
        Ok(x)
    }

    /// Peels the smallest-index left descent until length 0.
    pub fn reduced_word(&self, x: &ExtAffineElt) -> AffineWord {
        let mut cur = *x;
        let mut len = self.length(&cur);
        let mut letters = Vec::with_capacity(len);
        while len > 0 {
            let (i, next) = (0..=self.rank())
                .map(|i| (i, self.ew_mul(&self.s_aff(i), &cur)))
                .find(|(_, y)| self.length(y) < len)
                .expect("positive length implies a descent");
            letters.push(i);
            cur = next;
            len -= 1;
        }
        AffineWord { letters, omega: cur }
    }

    pub fn eval_word(&self, word: &AffineWord) -> ExtAffineElt {
        let x = self.from_affine_word(&word.letters).expect("letters in range");
        self.ew_mul(&x, &word.omega)
    }

    pub(crate) fn init_omega(&mut self) {
        let order = (self.cartan_t_det_abs() / crate::roots::det(self.lattice_basis()).abs()) as usize;
        let r = self.rank();
        let mut keys: Vec<Vec<i64>> = Vec::new();
        let mut elems = Vec::new();
        let mut digits = vec![0i64; r];
        'outer: loop {
            let lam = Coweight::new(&digits);
            let key = self.omega_key(&lam);
            if !keys.contains(&key) {
                let mut cur = self.translation(lam);
                loop {
                    let len = self.length(&cur);
                    if len == 0 {
                        break;
                    }
                    cur = (0..=r)
                        .map(|i| self.ew_mul(&self.s_aff(i), &cur))
                        .find(|y| self.length(y) < len)
                        .expect("descent exists");
                }
                keys.push(key);
                elems.push(cur);
                if elems.len() == order {
                    break 'outer;
                }
            }
            let mut pos = 0;
            loop {
                if pos == r {
                    break 'outer;
                }
                digits[pos] += 1;
                if digits[pos] < order as i64 {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
        assert_eq!(elems.len(), order, "fundamental group enumeration incomplete");
        self.omega = elems;
        self.omega_keys = keys;
    }

    fn cartan_t_det_abs(&self) -> i64 {
        crate::roots::det(self.cartan_matrix()).abs()
    }

    /// The length-zero elements `Ω ≅ X_*/Q∨`, identity first.
    pub fn omega_elements(&self) -> &[ExtAffineElt] {
        &self.omega
    }

    /// The `Ω`-component `ω` with `x ∈ W_aff · ω`.
    pub fn omega_part(&self, x: &ExtAffineElt) -> ExtAffineElt {
        let key = self.omega_key(&x.t);
        let i = self.omega_keys.iter().position(|k| *k == key).expect("class present");
        self.omega[i]
    }

    pub fn same_component(&self, x: &ExtAffineElt, y: &ExtAffineElt) -> bool {
        self.omega_key(&x.t) == self.omega_key(&y.t)
    }

    /// Bruhat order via right-descent recursion.
    pub fn bruhat_leq(&self, x: &ExtAffineElt, y: &ExtAffineElt) -> bool {
        if !self.same_component(x, y) {
            return false;
        }
        let (mut x, mut y) = (*x, *y);
        let (mut lx, mut ly) = (self.length(&x), self.length(&y));
        loop {
            if lx > ly {
                return false;
            }
            if lx == ly {
                return x == y;
            }
            if lx == 0 {
                // x is the Ω-part, and y lies in the same component.
                return true;
            }
            let (ys, i) = (0..=self.rank())
                .map(|i| (self.ew_mul(&y, &self.s_aff(i)), i))
                .find(|(ys, _)| self.length(ys) < ly)
                .expect("descent exists");
            let xs = self.ew_mul(&x, &self.s_aff(i));
            let lxs = self.length(&xs);
            if lxs < lx {
                x = xs;
                lx = lxs;
            }
            y = ys;
            ly -= 1;
        }
    }

    /// `W t_μ W`, sorted.
    pub fn double_coset_elements(&self, mu: &Coweight) -> Result<Vec<ExtAffineElt>> {
        if !self.is_dominant(mu) {
            return Err(Error::NotDominant(format!("{mu:?}")));
        }
        let t = self.translation(*mu);
        let mut set = BTreeSet::new();
        for a in self.weyl_elements() {
            let left = self.ew_mul(&self.finite(a), &t);
            for b in self.weyl_elements() {
                set.insert(self.ew_mul(&left, &self.finite(b)));
            }
        }
        Ok(set.into_iter().collect())
    }

    /// `w_μ = t_μ w_0`, the longest element of `W t_μ W`.
    pub fn longest_in_double_coset(&self, mu: &Coweight) -> Result<ExtAffineElt> {
        if !self.is_dominant(mu) {
            return Err(Error::NotDominant(format!("{mu:?}")));
        }
        let w0 = self.longest_element();
        let x = ExtAffineElt { t: *mu, w: w0 };
        let expected = self.weyl_len(w0) as i64 + self.two_rho_pair(mu);
        if self.length(&x) as i64 != expected {
            return Err(Error::Internal(format!("l(t_μ w_0) = {} ≠ {expected}", self.length(&x))));
        }
        Ok(x)
    }

    /// All elements of length `≤ n`, sorted by `(length, element)`.
    pub fn elements_up_to_length(&self, n: usize) -> Vec<ExtAffineElt> {
        let mut all: BTreeSet<ExtAffineElt> = self.omega.iter().copied().collect();
        let mut frontier: Vec<ExtAffineElt> = self.omega.clone();
        for l in 0..n {
            let mut next = BTreeSet::new();
            for x in &frontier {
                for i in 0..=self.rank() {
                    let y = self.ew_mul(x, &self.s_aff(i));
                    if self.length(&y) == l + 1 && !all.contains(&y) {
                        next.insert(y);
                    }
                }
            }
            all.extend(next.iter().copied());
            frontier = next.into_iter().collect();
        }
        let mut out: Vec<ExtAffineElt> = all.into_iter().collect();
        out.sort_by_key(|x| (self.length(x), *x));
        out
    }

    /// Dominant `μ` with `x ∈ W t_μ W`.
    pub fn double_coset_of(&self, x: &ExtAffineElt) -> Coweight {
        self.dominant_representative(&x.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> RootDatum {
        RootDatum::build("A1", "sc").unwrap()
    }

    #[test]
    fn group_law_examples() {
        let d = a1();
        let a = d.simple_coroot(0);
        let (s0, s) = (d.s_aff(0), d.s_aff(1));
        assert_eq!(d.ew_mul(&s0, &s), d.translation(-a));
        assert_eq!(d.ew_mul(&s, &s0), d.translation(a));
        let x = d.from_affine_word(&[1, 0, 1, 0, 0, 1]).unwrap();
        assert_eq!(d.ew_mul(&x, &d.ew_inv(&x)), d.ew_identity());
    }

    #[test]
    fn length_examples() {
        let d = a1();
        let a = d.simple_coroot(0);
        assert_eq!(d.length(&d.s_aff(0)), 1);
        assert_eq!(d.length(&d.translation(a)), 2);
        let x = ExtAffineElt { t: a, w: d.simple_reflection(0) };
        assert_eq!(d.length(&x), 3);
        assert_eq!(x, d.from_affine_word(&[1, 0, 1]).unwrap());
    }

    #[test]
    fn reduced_word_examples() {
        let d = a1();
        let w = d.reduced_word(&d.translation(d.simple_coroot(0)));
        assert_eq!(w.letters, vec![1, 0]);
        assert_eq!(w.omega, d.ew_identity());
        assert!(d.reduced_word(&d.ew_identity()).letters.is_empty());

        let ad = RootDatum::build("A1", "ad").unwrap();
        let t = ad.translation(Coweight::new(&[1]));
        assert_eq!(ad.length(&t), 1);
        let w = ad.reduced_word(&t);
        assert_eq!(w.letters.len(), 1);
        assert_ne!(w.omega, ad.ew_identity());
        assert_eq!(ad.length(&w.omega), 0);
        assert_eq!(ad.eval_word(&w), t);
    }

    #[test]
    fn bruhat_examples() {
        let d = a1();
        let s = d.s_aff(1);
        let y = d.from_affine_word(&[1, 0, 1]).unwrap();
        assert!(d.bruhat_leq(&s, &s));
        assert!(d.bruhat_leq(&s, &y));
        assert!(!d.bruhat_leq(&d.translation(d.simple_coroot(0)), &s));
    }

    #[test]
    fn double_coset_examples() {
        let d = a1();
        let a = d.simple_coroot(0);
        let dc = d.double_coset_elements(&a).unwrap();
        let mut lens: Vec<usize> = dc.iter().map(|x| d.length(x)).collect();
        lens.sort();
        assert_eq!(lens, vec![1, 2, 2, 3]);
        assert!(dc.contains(&d.s_aff(0)));
        assert_eq!(d.double_coset_elements(&d.zero()).unwrap().len(), 2);
        let w = d.longest_in_double_coset(&a).unwrap();
        assert_eq!(w, d.from_affine_word(&[1, 0, 1]).unwrap());

        let d = RootDatum::build("A2", "sc").unwrap();
        let th = d.simple_coroot(0) + d.simple_coroot(1);
        // θ∨ is regular, so the coset has |W|·|Wθ∨| = 36 elements.
        assert_eq!(d.double_coset_elements(&th).unwrap().len(), 36);
        assert_eq!(d.length(&d.longest_in_double_coset(&th).unwrap()), 7);
    }

    #[test]
    fn omega_sizes() {
        for (t, l, n) in [("A1", "ad", 2), ("A2", "ad", 3), ("A3", "ad", 4), ("D4", "ad", 4), ("B3", "ad", 2), ("G2", "ad", 1), ("A3", "sc", 1)] {
            let d = RootDatum::build(t, l).unwrap();
            assert_eq!(d.omega_elements().len(), n, "{t} {l}");
            for om in d.omega_elements() {
                assert_eq!(d.length(om), 0);
                // conjugation permutes S_aff
                for i in 0..=d.rank() {
                    let c = d.ew_mul(&d.ew_mul(om, &d.s_aff(i)), &d.ew_inv(om));
                    assert!((0..=d.rank()).any(|j| d.s_aff(j) == c));
                }
            }
        }
    }
}
