//! The universal unramified principal series `ℳ`, its generic fibre `ℳ_gen`,
//! and the intertwiners `J_w`, `K_w`, `K′_w`.
//!
//! `ℳ` has basis `1_x` (`x ∈ W̃`). `ℛ` acts on the left by
//! `t_λ · 1_x = δ^{1/2}(t_λ) 1_{t_λ x}` with `δ^{1/2}(t_λ) = v^{-⟨2ρ,λ⟩}`, and `ℋ`
//! acts on the right. Over `ℒ` the module is free on `{1_w : w ∈ W}`, and `ModGen`
//! stores coefficients in that basis.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use rustc_hash::FxHashMap;

use crate::coeffs::{GroupAlgElt, HalfLaurent, RatFun};
use crate::error::{Error, Result};
use crate::extweyl::ExtAffineElt;
use crate::hecke::{Hecke, HeckeElt};
use crate::lincomb::lin_comb;
use crate::roots::{Coweight, RootDatum, WeylElt};

lin_comb!(
    /// Finitely supported function on `W̃`, written in the basis `{1_x}`.
    ModElt
);

/// Element of `ℳ_gen`: `Σ_w c_w 1_w` with `c_w ∈ ℒ`, indexed by `WeylElt`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModGen {
    pub coeffs: Vec<RatFun>,
}

impl ModGen {
    /// `self += c · g`, touching only the support of `g`.
    pub fn add_scaled(&mut self, g: &ModGen, c: &RatFun) {
        for (o, x) in self.coeffs.iter_mut().zip(&g.coeffs) {
            if !x.is_zero() {
                *o = o.add(&x.mul(c));
            }
        }
    }

    pub fn coeff(&self, w: WeylElt) -> &RatFun {
        &self.coeffs[w.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RatFun::is_zero)
    }

    pub fn add(&self, other: &ModGen) -> ModGen {
        ModGen { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &ModGen) -> ModGen {
        ModGen { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect() }
    }

    /// Left multiplication by a scalar in `ℒ`.
    pub fn scale(&self, r: &RatFun) -> ModGen {
        ModGen { coeffs: self.coeffs.iter().map(|c| c.mul(r)).collect() }
    }
}

/// Which intertwiner family to expand against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KVariant {
    K,
    KPrime,
}

pub struct Module<'d> {
    pub datum: &'d RootDatum,
    pub hecke: Hecke<'d>,
    unit_rows: RefCell<FxHashMap<ExtAffineElt, Rc<ModElt>>>,
    k_table: RefCell<FxHashMap<(KVariant, WeylElt), Rc<ModGen>>>,
    j_basis: RefCell<FxHashMap<(usize, WeylElt), Rc<ModGen>>>,
    k_times: RefCell<FxHashMap<(KVariant, WeylElt, WeylElt), Rc<ModGen>>>,
}

fn ring_one(rank: usize) -> GroupAlgElt {
    GroupAlgElt::one(rank)
}

impl<'d> Module<'d> {
    pub fn new(datum: &'d RootDatum) -> Self {
        Module {
            datum,
            hecke: Hecke::new(datum),
            unit_rows: RefCell::default(),
            k_table: RefCell::default(),
            j_basis: RefCell::default(),
            k_times: RefCell::default(),
        }
    }

    fn rank(&self) -> usize {
        self.datum.rank()
    }

    // ---- the (ℛ, ℋ)-bimodule ℳ ----

    pub fn one_x(&self, x: ExtAffineElt) -> ModElt {
        ModElt::basis(x)
    }

    /// `1_W = Σ_{w∈W} 1_w`.
    pub fn one_w_sum(&self) -> ModElt {
        ModElt::from_terms(self.datum.weyl_elements().map(|w| (self.datum.finite(w), HalfLaurent::one())))
    }

    /// `δ^{1/2}(t_λ) = v^{-⟨2ρ,λ⟩}`.
    pub fn delta_half(&self, lam: &Coweight) -> HalfLaurent {
        HalfLaurent::v_pow(-(self.datum.two_rho_pair(lam) as i32))
    }

    /// Whether `1_x T_{s_i} = 1_{x s_i}` (no quadratic correction).
    fn rising(&self, w: WeylElt, i: usize) -> bool {
        let d = self.datum;
        if i == 0 {
            !d.maps_positive(w, d.highest_root_index())
        } else {
            d.maps_positive(w, d.simple_root_index(i - 1))
        }
    }

    pub fn act_s(&self, m: &ModElt, i: usize) -> ModElt {
        let d = self.datum;
        let s = d.s_aff(i);
        let q = HalfLaurent::q();
        let qm1 = &q - &HalfLaurent::one();
        let mut out = ModElt::zero();
        for (x, c) in m.terms() {
            let xs = d.ew_mul(x, &s);
            if self.rising(x.w, i) {
                out.add_term(xs, c);
            } else {
                out.add_term(xs, &(c * &q));
                out.add_term(*x, &(c * &qm1));
            }
        }
        out
    }

    pub fn act_omega(&self, m: &ModElt, omega: &ExtAffineElt) -> ModElt {
        m.map_support(|x| self.datum.ew_mul(x, omega))
    }

    pub fn act_basis(&self, m: &ModElt, y: &ExtAffineElt) -> ModElt {
        let word = self.datum.reduced_word(y);
        let mut cur = m.clone();
        for &i in &word.letters {
            cur = self.act_s(&cur, i);
        }
        if word.omega != self.datum.ew_identity() {
            cur = self.act_omega(&cur, &word.omega);
        }
        cur
    }

    /// `m · h`.
    pub fn act(&self, m: &ModElt, h: &HeckeElt) -> ModElt {
        let mut out = ModElt::zero();
        for (y, c) in h.terms() {
            out.add_scaled(&self.act_basis(m, y), c);
        }
        out
    }

    /// `r · m`.
    pub fn r_act(&self, r: &GroupAlgElt, m: &ModElt) -> ModElt {
        let d = self.datum;
        let mut out = ModElt::zero();
        for (lam, c) in r.terms() {
            let scale = c * &self.delta_half(lam);
            let t = d.translation(*lam);
            for (x, v) in m.terms() {
                out.add_term(d.ew_mul(&t, x), &(v * &scale));
            }
        }
        out
    }

    /// `1_1 · T_x`, memoized along right descents.
    pub fn unit_row(&self, x: &ExtAffineElt) -> Rc<ModElt> {
        if let Some(r) = self.unit_rows.borrow().get(x) {
            return r.clone();
        }
        let d = self.datum;
        let len = d.length(x);
        let row = if len == 0 {
            ModElt::basis(*x)
        } else {
            let (prev, i) = (0..=d.rank())
                .map(|i| (d.ew_mul(x, &d.s_aff(i)), i))
                .find(|(y, _)| d.length(y) < len)
                .expect("descent exists");
            self.act_s(&self.unit_row(&prev), i)
        };
        let row = Rc::new(row);
        self.unit_rows.borrow_mut().insert(*x, row.clone());
        row
    }

    /// `1_1 · h`.
    pub fn unit_times(&self, h: &HeckeElt) -> ModElt {
        let mut out = ModElt::zero();
        for (x, c) in h.terms() {
            out.add_scaled(&self.unit_row(x), c);
        }
        out
    }

    /// The unique `h` with `1_1 · h = m`, by elimination from the top length down.
    pub fn hecke_preimage(&self, m: &ModElt) -> Result<HeckeElt> {
        let d = self.datum;
        let mut rest = m.clone();
        let mut h = HeckeElt::zero();
        while let Some(x) = rest.support().copied().max_by_key(|x| (d.length(x), *x)) {
            let row = self.unit_row(&x);
            let diag = row.coeff(&x);
            let (e, c) = diag
                .as_monomial()
                .ok_or_else(|| Error::Internal(format!("non-monomial diagonal at {x:?}")))?;
            let coeff = rest
                .coeff(&x)
                .div_int(c)
                .ok_or_else(|| Error::Internal("diagonal coefficient does not divide".into()))?
                .shift2(-e);
            rest.add_scaled(&row, &-&coeff);
            if !rest.coeff(&x).is_zero() {
                return Err(Error::Internal("elimination did not clear the pivot".into()));
            }
            h.add_term(x, &coeff);
        }
        Ok(h)
    }

    /// Coefficients `c_{λ,w}` with `h = Σ c_{λ,w} Θ_λ T_w`.
    pub fn to_bernstein_basis(&self, h: &HeckeElt) -> BTreeMap<(Coweight, WeylElt), HalfLaurent> {
        let m = self.unit_times(h);
        m.terms()
            .map(|(x, c)| ((x.t, x.w), c * &HalfLaurent::v_pow(self.datum.two_rho_pair(&x.t) as i32)))
            .collect()
    }

    // ---- the generic fibre ----

    /// Coefficients in `ℛ` of `m` in the basis `{1_w}`:
    /// `1_{t_λ w} = v^{⟨2ρ,λ⟩} t_λ · 1_w`.
    pub fn to_gen_r(&self, m: &ModElt) -> Vec<GroupAlgElt> {
        let mut out = vec![GroupAlgElt::zero(); self.datum.weyl_order()];
        for (x, c) in m.terms() {
            let scale = c * &HalfLaurent::v_pow(self.datum.two_rho_pair(&x.t) as i32);
            out[x.w.index()].add_term(x.t, &scale);
        }
        out
    }

    pub fn to_gen(&self, m: &ModElt) -> ModGen {
        self.gen_from_r(self.to_gen_r(m))
    }

    fn gen_from_r(&self, v: Vec<GroupAlgElt>) -> ModGen {
        ModGen { coeffs: v.into_iter().map(|r| RatFun::from_r(self.rank(), r)).collect() }
    }

    pub fn gen_zero(&self) -> ModGen {
        ModGen { coeffs: vec![RatFun::zero(self.rank()); self.datum.weyl_order()] }
    }

    pub fn gen_basis(&self, w: WeylElt) -> ModGen {
        let mut g = self.gen_zero();
        g.coeffs[w.index()] = RatFun::one(self.rank());
        g
    }

    pub fn gen_spherical(&self) -> ModGen {
        ModGen { coeffs: vec![RatFun::one(self.rank()); self.datum.weyl_order()] }
    }

    /// `g · T_{s_i}` for a finite simple reflection (`i ∈ 1..=r`).
    pub fn gen_act_s(&self, g: &ModGen, i: usize) -> ModGen {
        let d = self.datum;
        let s = d.simple_reflection(i - 1);
        let rank = self.rank();
        let q = RatFun::from_scalar(rank, HalfLaurent::q());
        let qm1 = RatFun::from_scalar(rank, &HalfLaurent::q() - &HalfLaurent::one());
        let mut out = self.gen_zero();
        for w in d.weyl_elements() {
            let c = &g.coeffs[w.index()];
            if c.is_zero() {
                continue;
            }
            let ws = d.weyl_mul(w, s).index();
            if self.rising(w, i) {
                out.coeffs[ws] = out.coeffs[ws].add(c);
            } else {
                out.coeffs[ws] = out.coeffs[ws].add(&c.mul(&q));
                out.coeffs[w.index()] = out.coeffs[w.index()].add(&c.mul(&qm1));
            }
        }
        out
    }

    /// `g · T_u` for `u ∈ W`.
    pub fn gen_act_finite(&self, g: &ModGen, u: WeylElt) -> ModGen {
        let mut cur = g.clone();
        for i in self.datum.weyl_word(u) {
            cur = self.gen_act_s(&cur, i);
        }
        cur
    }

    /// `(g_1 | g_2) = Σ_w v^{2l(w)} ι(g_1(w)) g_2(w)`.
    pub fn pairing(&self, g1: &ModGen, g2: &ModGen) -> RatFun {
        let d = self.datum;
        let mut acc = RatFun::zero(self.rank());
        for w in d.weyl_elements() {
            let (a, b) = (&g1.coeffs[w.index()], &g2.coeffs[w.index()]);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let term = a.iota().mul(b).scale(&HalfLaurent::v_pow(2 * d.weyl_len(w) as i32));
            acc = acc.add(&term);
        }
        acc
    }

    /// The pairing on `ℳ` itself, which stays inside `ℛ`.
    pub fn pairing_r(&self, m1: &ModElt, m2: &ModElt) -> GroupAlgElt {
        let d = self.datum;
        let (a, b) = (self.to_gen_r(m1), self.to_gen_r(m2));
        let mut acc = GroupAlgElt::zero();
        for w in d.weyl_elements() {
            let (x, y) = (&a[w.index()], &b[w.index()]);
            if x.is_zero() || y.is_zero() {
                continue;
            }
            acc = &acc + &(&x.iota() * y).scale(&HalfLaurent::v_pow(2 * d.weyl_len(w) as i32));
        }
        acc
    }

    // ---- intertwiners ----

    fn simple_index_of(&self, s: WeylElt) -> Result<usize> {
        let d = self.datum;
        (0..d.rank())
            .find(|&i| d.simple_reflection(i) == s)
            .map(|i| i + 1)
            .ok_or_else(|| Error::Internal("not a simple reflection".into()))
    }

    /// `J_{s_i}(1_u) = J_{s_i}(1_1) · T_u` (`i ∈ 1..=r`).
    fn j_on_basis(&self, i: usize, u: WeylElt) -> Rc<ModGen> {
        if let Some(g) = self.j_basis.borrow().get(&(i, u)) {
            return g.clone();
        }
        let g = if u == WeylElt::IDENTITY {
            let d = self.datum;
            let rank = self.rank();
            let t = GroupAlgElt::monomial(d.simple_coroot(i - 1));
            let qi = HalfLaurent::v_pow(-2);
            let mut v = vec![GroupAlgElt::zero(); d.weyl_order()];
            v[d.simple_reflection(i - 1).index()] = (&ring_one(rank) - &t).scale(&qi);
            v[0] = t.scale(&(&HalfLaurent::one() - &qi));
            self.gen_from_r(v)
        } else {
            self.gen_act_finite(&self.j_on_basis(i, WeylElt::IDENTITY), u)
        };
        let g = Rc::new(g);
        self.j_basis.borrow_mut().insert((i, u), g.clone());
        g
    }

    /// `J_{s_i}`, `ℋ`-linear and `s_i`-semilinear.
    pub fn j_simple(&self, i: usize, g: &ModGen) -> ModGen {
        let d = self.datum;
        let s = d.simple_reflection(i - 1);
        let mut out = self.gen_zero();
        for u in d.weyl_elements() {
            let c = &g.coeffs[u.index()];
            if c.is_zero() {
                continue;
            }
            out.add_scaled(&self.j_on_basis(i, u), &c.w_act(d, s));
        }
        out
    }

    /// `J_w = J_{s_1} ∘ ⋯ ∘ J_{s_n}` along the stored reduced word.
    pub fn j_intertwiner(&self, w: WeylElt, g: &ModGen) -> ModGen {
        let mut cur = g.clone();
        for i in self.datum.weyl_word(w).into_iter().rev() {
            cur = self.j_simple(i, &cur);
        }
        cur
    }

    /// `∏_{α∈R_w} f(α∨)`.
    fn inversion_product(&self, w: WeylElt, f: impl Fn(&Coweight) -> RatFun) -> RatFun {
        let mut acc = RatFun::one(self.rank());
        for j in self.datum.inversion_set(w) {
            acc = acc.mul(&f(&self.datum.coroot(j)));
        }
        acc
    }

    fn one_minus(&self, c: HalfLaurent, lam: &Coweight) -> GroupAlgElt {
        &ring_one(self.rank()) - &GroupAlgElt::term(*lam, c)
    }

    /// `∏_{α∈R_w} 1/(1 − v^{-2} t_{α∨})`, the ratio `K_w / J_w`.
    pub fn k_over_j(&self, w: WeylElt) -> RatFun {
        self.inversion_product(w, |a| {
            RatFun::from_r(self.rank(), self.one_minus(HalfLaurent::v_pow(-2), a)).inverse().expect("non-zero")
        })
    }

    /// `∏_{α∈R_w} (1 − q^{-1} t_{α∨}) / (1 − q^{-1} t_{-α∨})`, the ratio `K′_w / K_w`.
    pub fn kprime_over_k(&self, w: WeylElt) -> RatFun {
        self.inversion_product(w, |a| {
            RatFun::new(
                self.rank(),
                self.one_minus(HalfLaurent::v_pow(-2), a),
                &self.one_minus(HalfLaurent::v_pow(-2), &-*a),
            )
            .expect("non-zero")
        })
    }

    pub fn k_simple(&self, i: usize, g: &ModGen) -> ModGen {
        let s = self.datum.simple_reflection(i - 1);
        self.j_simple(i, g).scale(&self.k_over_j(s))
    }

    /// `K_w(1_1)` or `K′_w(1_1)`, built up along `w = s · w′`.
    pub fn k_of_unit(&self, variant: KVariant, w: WeylElt) -> Rc<ModGen> {
        if let Some(g) = self.k_table.borrow().get(&(variant, w)) {
            return g.clone();
        }
        let g = match variant {
            KVariant::K => {
                if w == WeylElt::IDENTITY {
                    self.gen_basis(w)
                } else {
                    let word = self.datum.weyl_word(w);
                    let first = word[0];
                    let s = self.datum.simple_reflection(first - 1);
                    let rest = self.datum.weyl_mul(s, w);
                    self.k_simple(first, &self.k_of_unit(KVariant::K, rest))
                }
            }
            KVariant::KPrime => self.k_of_unit(KVariant::K, w).scale(&self.kprime_over_k(w)),
        };
        let g = Rc::new(g);
        self.k_table.borrow_mut().insert((variant, w), g.clone());
        g
    }

    /// `K_w(1_1) T_u`, grown one letter at a time and memoized.
    fn k_unit_times(&self, variant: KVariant, w: WeylElt, u: WeylElt) -> Rc<ModGen> {
        if u == WeylElt::IDENTITY {
            return self.k_of_unit(variant, w);
        }
        if let Some(g) = self.k_times.borrow().get(&(variant, w, u)) {
            return g.clone();
        }
        let d = self.datum;
        let last = *d.weyl_word(u).last().expect("non-identity");
        let prefix = d.weyl_mul(u, d.simple_reflection(last - 1));
        let g = Rc::new(self.gen_act_s(&self.k_unit_times(variant, w, prefix), last));
        self.k_times.borrow_mut().insert((variant, w, u), g.clone());
        g
    }

    /// Drops the memoized products `K_w(1_1) T_u`.
    pub fn forget_products(&self) {
        self.k_times.borrow_mut().clear();
    }

    fn apply_from_unit(&self, variant: KVariant, w: WeylElt, g: &ModGen) -> ModGen {
        let d = self.datum;
        let mut out = self.gen_zero();
        for u in d.weyl_elements() {
            let c = &g.coeffs[u.index()];
            if c.is_zero() {
                continue;
            }
            out.add_scaled(&self.k_unit_times(variant, w, u), &c.w_act(d, w));
        }
        out
    }

    /// `K_w(g) = Σ_u w(c_u) · K_w(1_1) T_u`.
    pub fn k_intertwiner(&self, w: WeylElt, g: &ModGen) -> ModGen {
        self.apply_from_unit(KVariant::K, w, g)
    }

    pub fn kprime_intertwiner(&self, w: WeylElt, g: &ModGen) -> ModGen {
        self.apply_from_unit(KVariant::KPrime, w, g)
    }

    /// `K_s` via the simple-reflection formula, used as an independent route.
    pub fn k_simple_reflection(&self, s: WeylElt, g: &ModGen) -> Result<ModGen> {
        Ok(self.k_simple(self.simple_index_of(s)?, g))
    }

    /// Coefficients `c_w ∈ ℒ` with `g = Σ_w c_w · X_w(1_1)`, `X ∈ {K, K′}`.
    pub fn expand_in_k_basis(&self, g: &ModGen, variant: KVariant) -> Result<Vec<RatFun>> {
        let d = self.datum;
        let mut order: Vec<WeylElt> = d.weyl_elements().collect();
        order.sort_by_key(|&w| (std::cmp::Reverse(d.weyl_len(w)), w));
        let mut rest = g.clone();
        let mut out = vec![RatFun::zero(self.rank()); d.weyl_order()];
        for (pos, &w) in order.iter().enumerate() {
            let col = self.k_of_unit(variant, w);
            let diag = col.coeff(w);
            if diag.is_zero() {
                return Err(Error::Internal(format!("zero diagonal at w{}", w.index())));
            }
            // Entries of this column at other elements of the same or greater length vanish.
            for &u in &order[..pos] {
                if !col.coeff(u).is_zero() {
                    return Err(Error::IdentityViolation(format!(
                        "K-basis matrix is not triangular: entry (w{}, w{})",
                        w.index(),
                        u.index()
                    )));
                }
            }
            if rest.coeff(w).is_zero() {
                continue;
            }
            let c = rest.coeff(w).div(diag)?;
            rest = rest.sub(&col.scale(&c));
            out[w.index()] = c;
        }
        if !rest.is_zero() {
            return Err(Error::Internal("K-basis elimination left a remainder".into()));
        }
        Ok(out)
    }

    /// The Whittaker functional: `q^{-l(w_0)} Σ_w c′_w`.
    pub fn whittaker(&self, g: &ModGen) -> Result<RatFun> {
        let d = self.datum;
        let coeffs = self.expand_in_k_basis(g, KVariant::KPrime)?;
        let mut acc = RatFun::zero(self.rank());
        for c in &coeffs {
            acc = acc.add(c);
        }
        let l0 = d.weyl_len(d.longest_element()) as i32;
        Ok(acc.scale(&HalfLaurent::v_pow(-2 * l0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(pairs: &[(i32, i64)]) -> HalfLaurent {
        HalfLaurent::from_terms(pairs.iter().map(|&(e, c)| (e, c.into())))
    }

    #[test]
    fn basis_action_examples() {
        let d = RootDatum::build("A1", "sc").unwrap();
        let m = Module::new(&d);
        let s = d.s_aff(1);
        let one = m.one_x(d.ew_identity());
        assert_eq!(m.act_s(&one, 1), m.one_x(s));
        let expect = &m.one_x(d.ew_identity()).scale(&HalfLaurent::q()) + &m.one_x(s).scale(&lp(&[(4, 1), (0, -1)]));
        assert_eq!(m.act_s(&m.one_x(s), 1), expect);
        let t = d.translation(d.simple_coroot(0));
        assert_eq!(*m.unit_row(&t), m.one_x(t));
    }

    #[test]
    fn r_action_examples() {
        let d = RootDatum::build("A1", "sc").unwrap();
        let m = Module::new(&d);
        let a = d.simple_coroot(0);
        let one = m.one_x(d.ew_identity());
        assert_eq!(
            m.r_act(&GroupAlgElt::monomial(a), &one),
            m.one_x(d.translation(a)).scale(&HalfLaurent::v_pow(-2))
        );
        assert_eq!(m.r_act(&GroupAlgElt::one(1), &one), one);

        let ad = RootDatum::build("A1", "ad").unwrap();
        let m = Module::new(&ad);
        let w = Coweight::new(&[1]);
        let one = m.one_x(ad.ew_identity());
        assert_eq!(
            m.r_act(&GroupAlgElt::monomial(w), &one),
            m.one_x(ad.translation(w)).scale(&HalfLaurent::v_pow(-1))
        );
    }

    #[test]
    fn pairing_examples() {
        let d = RootDatum::build("A2", "sc").unwrap();
        let m = Module::new(&d);
        for w in d.weyl_elements() {
            for u in d.weyl_elements() {
                let p = m.pairing(&m.gen_basis(w), &m.gen_basis(u));
                let expect = if w == u { HalfLaurent::v_pow(2 * d.weyl_len(w) as i32) } else { HalfLaurent::zero() };
                assert_eq!(p, RatFun::from_scalar(2, expect));
            }
        }
        let sph = m.gen_spherical();
        let poincare = d.poincare().to_laurent(1);
        assert_eq!(m.pairing(&sph, &sph), RatFun::from_scalar(2, poincare));
    }

    #[test]
    fn preimage_examples() {
        let d = RootDatum::build("A1", "sc").unwrap();
        let m = Module::new(&d);
        let h = Hecke::new(&d);
        for w in d.weyl_elements() {
            assert_eq!(m.hecke_preimage(&m.one_x(d.finite(w))).unwrap(), h.t(d.finite(w)));
        }
        let a = d.simple_coroot(0);
        let lhs = m.r_act(&GroupAlgElt::monomial(a), &m.one_x(d.ew_identity()));
        assert_eq!(m.hecke_preimage(&lhs).unwrap(), h.theta(&a));
    }

    #[test]
    fn rank_one_intertwiners() {
        let d = RootDatum::build("A1", "sc").unwrap();
        let m = Module::new(&d);
        let s = d.simple_reflection(0);
        let a = d.simple_coroot(0);
        let one = GroupAlgElt::one(1);
        let qi = HalfLaurent::v_pow(-2);
        let jj = m.j_simple(1, &m.j_simple(1, &m.gen_basis(WeylElt::IDENTITY)));
        let c = &(&one - &GroupAlgElt::term(a, qi.clone())) * &(&one - &GroupAlgElt::term(-a, qi));
        assert_eq!(jj, m.gen_basis(WeylElt::IDENTITY).scale(&RatFun::from_r(1, c)));
        assert_eq!(m.k_intertwiner(s, &m.gen_spherical()), m.gen_spherical());
        // diagonal entry (1 − t_{-α∨}) / (1 − q t_{-α∨})
        let diag = RatFun::new(
            1,
            &one - &GroupAlgElt::monomial(-a),
            &(&one - &GroupAlgElt::term(-a, HalfLaurent::q())),
        )
        .unwrap();
        assert_eq!(*m.k_of_unit(KVariant::K, s).coeff(s), diag);
    }

    #[test]
    fn whittaker_examples() {
        let d = RootDatum::build("A1", "sc").unwrap();
        let m = Module::new(&d);
        let a = d.simple_coroot(0);
        let w1 = m.whittaker(&m.gen_basis(WeylElt::IDENTITY)).unwrap();
        assert_eq!(w1, RatFun::from_scalar(1, HalfLaurent::v_pow(-2)));
        let g = m.gen_spherical();
        // q^{1 − l(w_0)} (1 − q^{-1} t_{-α∨}) with l(w_0) = 1
        let expect = &GroupAlgElt::one(1) - &GroupAlgElt::term(-a, HalfLaurent::v_pow(-2));
        assert_eq!(m.whittaker(&g).unwrap(), RatFun::from_r(1, expect));
    }
}
