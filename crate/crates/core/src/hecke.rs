//! The affine Hecke algebra `ℋ` over `ℤ[v^{±1/2}]` in the basis `{T_x}`, `q = v²`.

use std::collections::BTreeMap;

use crate::coeffs::{GroupAlgElt, HalfLaurent};
use crate::error::{Error, Result};
use crate::extweyl::ExtAffineElt;
use crate::lincomb::lin_comb;
use crate::roots::{Coweight, RootDatum, WeylElt};

lin_comb!(
    /// Element of `ℋ` in the Iwahori–Matsumoto basis.
    HeckeElt
);

/// Hecke algebra operations for a fixed root datum.
#[derive(Clone, Copy)]
pub struct Hecke<'d> {
    pub datum: &'d RootDatum,
}

fn q() -> HalfLaurent {
    HalfLaurent::q()
}

fn q_minus_one() -> HalfLaurent {
    &HalfLaurent::q() - &HalfLaurent::one()
}

impl<'d> Hecke<'d> {
    pub fn new(datum: &'d RootDatum) -> Self {
        Hecke { datum }
    }

    pub fn one(&self) -> HeckeElt {
        HeckeElt::basis(self.datum.ew_identity())
    }

    pub fn t(&self, x: ExtAffineElt) -> HeckeElt {
        HeckeElt::basis(x)
    }

    pub fn t_s(&self, i: usize) -> HeckeElt {
        HeckeElt::basis(self.datum.s_aff(i))
    }

    fn check(&self, h: &HeckeElt) -> Result<()> {
        h.support().try_for_each(|x| self.datum.check_elt(x))
    }

    /// `h · T_{s_i}`.
    pub fn mul_s_right(&self, h: &HeckeElt, i: usize) -> HeckeElt {
        let d = self.datum;
        let s = d.s_aff(i);
        let mut out = HeckeElt::zero();
        for (x, c) in h.terms() {
            let xs = d.ew_mul(x, &s);
            if d.length(&xs) > d.length(x) {
                out.add_term(xs, c);
            } else {
                out.add_term(xs, &(c * &q()));
                out.add_term(*x, &(c * &q_minus_one()));
            }
        }
        out
    }

    /// `T_{s_i} · h`.
    pub fn mul_s_left(&self, i: usize, h: &HeckeElt) -> HeckeElt {
        let d = self.datum;
        let s = d.s_aff(i);
        let mut out = HeckeElt::zero();
        for (x, c) in h.terms() {
            let sx = d.ew_mul(&s, x);
            if d.length(&sx) > d.length(x) {
                out.add_term(sx, c);
            } else {
                out.add_term(sx, &(c * &q()));
                out.add_term(*x, &(c * &q_minus_one()));
            }
        }
        out
    }

    /// `h · T_ω` for `ω` of length zero.
    pub fn mul_omega_right(&self, h: &HeckeElt, omega: &ExtAffineElt) -> HeckeElt {
        h.map_support(|x| self.datum.ew_mul(x, omega))
    }

    pub fn mul_omega_left(&self, omega: &ExtAffineElt, h: &HeckeElt) -> HeckeElt {
        h.map_support(|x| self.datum.ew_mul(omega, x))
    }

    /// `h · T_{s_i}^{-1}`, with `T_s^{-1} = v^{-2} T_s + (v^{-2} − 1)`.
    pub fn mul_s_inv_right(&self, h: &HeckeElt, i: usize) -> HeckeElt {
        let qi = HalfLaurent::v_pow(-2);
        let mut out = self.mul_s_right(h, i).scale(&qi);
        out.add_scaled(h, &(&qi - &HalfLaurent::one()));
        out
    }

    /// `h · T_x`, peeling a reduced word of `x`.
    pub fn mul_basis_right(&self, h: &HeckeElt, x: &ExtAffineElt) -> HeckeElt {
        let word = self.datum.reduced_word(x);
        let mut cur = h.clone();
        for &i in &word.letters {
            cur = self.mul_s_right(&cur, i);
        }
        if word.omega != self.datum.ew_identity() {
            cur = self.mul_omega_right(&cur, &word.omega);
        }
        cur
    }

    pub fn mul(&self, a: &HeckeElt, b: &HeckeElt) -> HeckeElt {
        let mut out = HeckeElt::zero();
        for (y, c) in b.terms() {
            out.add_scaled(&self.mul_basis_right(a, y), c);
        }
        out
    }

    pub fn try_mul(&self, a: &HeckeElt, b: &HeckeElt) -> Result<HeckeElt> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// `h · T_x^{-1}`.
    pub fn mul_inverse_right(&self, h: &HeckeElt, x: &ExtAffineElt) -> HeckeElt {
        let d = self.datum;
        // x = s_1 ⋯ s_n ω, so T_x^{-1} = T_{ω^{-1}} T_{s_n}^{-1} ⋯ T_{s_1}^{-1}.
        let word = d.reduced_word(x);
        let mut cur = self.mul_omega_right(h, &d.ew_inv(&word.omega));
        for &i in word.letters.iter().rev() {
            cur = self.mul_s_inv_right(&cur, i);
        }
        cur
    }

    pub fn t_inverse(&self, x: &ExtAffineElt) -> HeckeElt {
        self.mul_inverse_right(&self.one(), x)
    }

    /// Ring involution `v ↦ v^{-1}`, `T_x ↦ T_{x^{-1}}^{-1}`.
    pub fn bar(&self, h: &HeckeElt) -> HeckeElt {
        let mut out = HeckeElt::zero();
        for (x, c) in h.terms() {
            let xi = self.datum.ew_inv(x);
            out.add_scaled(&self.t_inverse(&xi), &c.bar());
        }
        out
    }

    /// Anti-involution `T_x ↦ T_{x^{-1}}`, fixing `v`.
    pub fn iota(&self, h: &HeckeElt) -> HeckeElt {
        h.map_support(|x| self.datum.ew_inv(x))
    }

    /// The dominant pair `(λ_1, λ_2)` with `λ = λ_1 − λ_2` used for `Θ_λ`:
    /// `λ_2` is the dominant coweight of least height making `λ + λ_2` dominant.
    pub fn theta_decomposition(&self, lam: &Coweight) -> (Coweight, Coweight) {
        let d = self.datum;
        if d.is_dominant(lam) {
            return (*lam, d.zero());
        }
        let mut h = 1;
        loop {
            // Dominant coweights come back sorted by height then coordinates.
            for mu in d.dominant_coweights_up_to(h) {
                if d.is_dominant(&(*lam + mu)) {
                    return (*lam + mu, mu);
                }
            }
            h *= 2;
        }
    }

    /// `Θ_λ = v^{⟨2ρ, λ_2 − λ_1⟩} T_{t_{λ_1}} T_{t_{λ_2}}^{-1}` for the given split.
    pub fn theta_with(&self, lam1: &Coweight, lam2: &Coweight) -> Result<HeckeElt> {
        let d = self.datum;
        if !d.is_dominant(lam1) || !d.is_dominant(lam2) {
            return Err(Error::NotDominant(format!("{lam1:?} / {lam2:?}")));
        }
        let scale = HalfLaurent::v_pow(-(d.two_rho_pair(&(*lam1 - *lam2)) as i32));
        let h = self.mul_inverse_right(&self.t(d.translation(*lam1)), &d.translation(*lam2));
        Ok(h.scale(&scale))
    }

    pub fn theta(&self, lam: &Coweight) -> HeckeElt {
        let (a, b) = self.theta_decomposition(lam);
        self.theta_with(&a, &b).expect("decomposition is dominant")
    }

    /// `Σ c_λ t_λ ↦ Σ c_λ Θ_λ`.
    pub fn theta_of(&self, r: &GroupAlgElt) -> HeckeElt {
        let mut out = HeckeElt::zero();
        for (lam, c) in r.terms() {
            out.add_scaled(&self.theta(lam), c);
        }
        out
    }

    /// `z_μ = Σ_{λ ∈ Wμ} Θ_λ`.
    pub fn z_basis(&self, mu: &Coweight) -> Result<HeckeElt> {
        if !self.datum.is_dominant(mu) {
            return Err(Error::NotDominant(format!("{mu:?}")));
        }
        Ok(self.theta_of(&GroupAlgElt::orbit_sum(self.datum, mu)))
    }

    /// Both sides of `T_s Θ_λ = Θ_{sλ} T_s + (1−q) Θ((t_{sλ} − t_λ)/(1 − t_{−α∨}))`
    /// for the simple root `α_i`.
    pub fn bernstein_relation(&self, i: usize, lam: &Coweight) -> Result<(HeckeElt, HeckeElt)> {
        let d = self.datum;
        let s = d.simple_reflection(i);
        let slam = d.weyl_act(s, lam);
        let lhs = self.mul(&self.t_s(i + 1), &self.theta(lam));
        let num = &GroupAlgElt::monomial(slam) - &GroupAlgElt::monomial(*lam);
        let den = &GroupAlgElt::one(d.rank()) - &GroupAlgElt::monomial(-d.simple_coroot(i));
        let quotient = num.exact_div(&den)?;
        let one_minus_q = &HalfLaurent::one() - &q();
        let rhs = &self.mul_s_right(&self.theta(&slam), i + 1) + &self.theta_of(&quotient).scale(&one_minus_q);
        Ok((lhs, rhs))
    }

    pub fn bernstein_relation_check(&self, i: usize, lam: &Coweight) -> Result<bool> {
        let (l, r) = self.bernstein_relation(i, lam)?;
        Ok(l == r)
    }

    /// Commutes with every `T_s` (`s ∈ S_aff`) and every `T_ω`.
    pub fn is_central(&self, h: &HeckeElt) -> bool {
        let d = self.datum;
        (0..=d.rank()).all(|i| self.mul_s_right(h, i) == self.mul_s_left(i, h))
            && d.omega_elements()
                .iter()
                .all(|om| self.mul_omega_right(h, om) == self.mul_omega_left(om, h))
    }

    /// `T_s h = h T_s = q h` for every finite simple reflection.
    pub fn is_spherical(&self, h: &HeckeElt) -> bool {
        (1..=self.datum.rank()).all(|i| {
            let qh = h.scale(&q());
            self.mul_s_left(i, h) == qh && self.mul_s_right(h, i) == qh
        })
    }

    /// `T_W = Σ_{w ∈ W} T_w`.
    pub fn t_w_sum(&self) -> HeckeElt {
        HeckeElt::from_terms(self.datum.weyl_elements().map(|w| (self.datum.finite(w), HalfLaurent::one())))
    }

    /// `Σ c_{λ,w} Θ_λ T_w`.
    pub fn from_bernstein_basis(&self, coeffs: &BTreeMap<(Coweight, WeylElt), HalfLaurent>) -> HeckeElt {
        let mut out = HeckeElt::zero();
        for ((lam, w), c) in coeffs {
            let th = self.theta(lam);
            out.add_scaled(&self.mul_basis_right(&th, &self.datum.finite(*w)), c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> RootDatum {
        RootDatum::build("A1", "sc").unwrap()
    }

    fn lp(pairs: &[(i32, i64)]) -> HalfLaurent {
        HalfLaurent::from_terms(pairs.iter().map(|&(e, c)| (e, c.into())))
    }

    #[test]
    fn quadratic_relation() {
        let d = a1();
        let h = Hecke::new(&d);
        let ts = h.t_s(1);
        let expect = &ts.scale(&lp(&[(4, 1), (0, -1)])) + &h.one().scale(&q());
        assert_eq!(h.mul(&ts, &ts), expect);
        assert_eq!(h.mul(&ts, &h.one()), ts);
        let s_s0 = d.from_affine_word(&[1, 0]).unwrap();
        assert_eq!(h.mul(&ts, &h.t_s(0)), h.t(s_s0));
    }

    #[test]
    fn inverses() {
        let d = a1();
        let h = Hecke::new(&d);
        assert_eq!(h.t_inverse(&d.ew_identity()), h.one());
        let expect = &h.t_s(1).scale(&HalfLaurent::v_pow(-2)) + &h.one().scale(&lp(&[(-4, 1), (0, -1)]));
        assert_eq!(h.t_inverse(&d.s_aff(1)), expect);
        let x = d.from_affine_word(&[1, 0]).unwrap();
        assert_eq!(h.mul(&h.t_inverse(&x), &h.t(x)), h.one());
        assert_eq!(h.mul(&h.t(x), &h.t_inverse(&x)), h.one());
    }

    #[test]
    fn theta_examples() {
        let d = a1();
        let h = Hecke::new(&d);
        let a = d.simple_coroot(0);
        assert_eq!(h.theta(&d.zero()), h.one());
        assert_eq!(h.theta(&a), h.t(d.translation(a)).scale(&HalfLaurent::v_pow(-2)));
        assert_eq!(h.theta(&-a), h.t_inverse(&d.translation(a)).scale(&HalfLaurent::v_pow(2)));
        assert_eq!(h.mul(&h.theta(&a), &h.theta(&-a)), h.one());
    }

    #[test]
    fn theta_split_independent() {
        let d = RootDatum::build("A2", "sc").unwrap();
        let h = Hecke::new(&d);
        let a1 = d.simple_coroot(0);
        let (x, y) = h.theta_decomposition(&-a1);
        let other = h.theta_with(&(x + y), &(y + y)).unwrap();
        assert_eq!(h.theta(&-a1), other);
    }

    #[test]
    fn bernstein_examples() {
        let d = a1();
        let h = Hecke::new(&d);
        let a = d.simple_coroot(0);
        let (lhs, rhs) = h.bernstein_relation(0, &a).unwrap();
        assert_eq!(lhs, rhs);
        let qm1 = q_minus_one();
        let by_hand = &h.mul(&h.theta(&-a), &h.t_s(1)) + &(&h.one() + &h.theta(&a)).scale(&qm1);
        assert_eq!(lhs, by_hand);
        assert!(h.bernstein_relation_check(0, &d.zero()).unwrap());
    }

    #[test]
    fn center_examples() {
        let d = a1();
        let h = Hecke::new(&d);
        let a = d.simple_coroot(0);
        let z = h.z_basis(&a).unwrap();
        assert_eq!(z, &h.theta(&a) + &h.theta(&-a));
        assert!(h.is_central(&z));
        assert!(h.is_central(&h.one()));
        assert!(!h.is_central(&h.t_s(1)));
        assert_eq!(h.bar(&z), z);
        assert_eq!(h.z_basis(&d.zero()).unwrap(), h.one());
    }

    #[test]
    fn involution_examples() {
        let d = a1();
        let h = Hecke::new(&d);
        // bar(T_s) = T_s^{-1} = v^{-2}T_s + (v^{-2} − 1)T_1
        assert_eq!(h.bar(&h.t_s(1)), h.t_inverse(&d.s_aff(1)));
        let x = d.from_affine_word(&[1, 0]).unwrap();
        let y = d.from_affine_word(&[0, 1]).unwrap();
        assert_eq!(h.iota(&h.t(x)), h.t(y));
        let u = &h.t(x) + &h.t_s(0).scale(&HalfLaurent::v_pow(3));
        assert_eq!(h.bar(&h.bar(&u)), u);
    }

    #[test]
    fn braid_relations() {
        for t in ["A2", "B2", "G2", "A3"] {
            let d = RootDatum::build(t, "sc").unwrap();
            let h = Hecke::new(&d);
            for i in 0..=d.rank() {
                for j in 0..i {
                    // order of s_i s_j
                    let st = d.ew_mul(&d.s_aff(i), &d.s_aff(j));
                    let mut p = st;
                    let mut m = 1;
                    while p != d.ew_identity() && m <= 6 {
                        p = d.ew_mul(&p, &st);
                        m += 1;
                    }
                    if m > 6 {
                        continue;
                    }
                    let mut a = h.one();
                    let mut b = h.one();
                    for k in 0..m {
                        a = h.mul_s_right(&a, if k % 2 == 0 { i } else { j });
                        b = h.mul_s_right(&b, if k % 2 == 0 { j } else { i });
                    }
                    assert_eq!(a, b, "{t} braid {i},{j}");
                }
            }
        }
    }
}
