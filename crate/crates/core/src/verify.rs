//! Identity suites over one root datum. Each suite tallies exact checks and
//! keeps a few counterexample payloads; grid points (dominant `μ`) run in
//! parallel, each task with its own KL engine merged back into the caller's
//! table.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::coeffs::{GroupAlgElt, HalfLaurent, RatFun};
use crate::error::{Error, Result};
use crate::extweyl::ExtAffineElt;
use crate::hecke::Hecke;
use crate::json;
use crate::klpoly::{KlEngine, KlTable};
use crate::module_m::{KVariant, ModGen, Module};
use crate::roots::{Coweight, RootDatum, WeylElt};
use crate::satake::{self, Satake};

const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Bernstein,
    Center,
    Intertwiners,
    Macdonald,
    Cs,
    Lk,
    Combinatorics,
    Kl,
    Freeness,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Bernstein,
        Suite::Center,
        Suite::Intertwiners,
        Suite::Macdonald,
        Suite::Cs,
        Suite::Lk,
        Suite::Combinatorics,
        Suite::Kl,
        Suite::Freeness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bernstein => "bernstein",
            Suite::Center => "center",
            Suite::Intertwiners => "intertwiners",
            Suite::Macdonald => "macdonald",
            Suite::Cs => "cs",
            Suite::Lk => "lk",
            Suite::Combinatorics => "combinatorics",
            Suite::Kl => "kl",
            Suite::Freeness => "freeness",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Bound on `⟨2ρ, μ⟩` for the μ-grid; `None` means 12 (10 for G2).
    pub max_height: Option<i64>,
    pub jobs: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_height: None, jobs: 1 }
    }
}

pub fn default_height(d: &RootDatum) -> i64 {
    if d.cartan_type().to_string().starts_with('G') {
        10
    } else {
        12
    }
}

/// Outcome of one identity over all its cases.
#[derive(Clone, Debug)]
pub struct Check {
    pub identity: String,
    pub cases: usize,
    pub failures: usize,
    pub counterexamples: Vec<Value>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "identity": self.identity,
            "cases": self.cases,
            "failures": self.failures,
            "passed": self.passed(),
            "counterexamples": self.counterexamples,
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Tally {
    checks: Vec<Check>,
}

impl Tally {
    fn slot(&mut self, identity: &str) -> &mut Check {
        let pos = match self.checks.iter().position(|c| c.identity == identity) {
            Some(p) => p,
            None => {
                self.checks.push(Check { identity: identity.to_string(), cases: 0, failures: 0, counterexamples: Vec::new() });
                self.checks.len() - 1
            }
        };
        &mut self.checks[pos]
    }

    pub fn check(&mut self, identity: &str, ok: bool, payload: impl FnOnce() -> Value) {
        let c = self.slot(identity);
        c.cases += 1;
        if !ok {
            c.failures += 1;
            if c.counterexamples.len() < MAX_COUNTEREXAMPLES {
                c.counterexamples.push(payload());
            }
        }
    }

    /// Like [`Tally::check`], but an identity-level error counts as a failure;
    /// any other error is propagated.
    pub fn check_res(&mut self, identity: &str, res: Result<bool>, payload: impl FnOnce() -> Value) -> Result<()> {
        match res {
            Ok(ok) => self.check(identity, ok, payload),
            Err(e @ (Error::IdentityViolation(_) | Error::NotDivisible)) => {
                let msg = e.to_string();
                self.check(identity, false, || json!({ "case": payload(), "error": msg }));
            }
            Err(e) => return Err(e),
        }
        Ok(())
    }

    pub fn merge(&mut self, other: Tally) {
        for c in other.checks {
            let s = self.slot(&c.identity);
            s.cases += c.cases;
            s.failures += c.failures;
            let room = MAX_COUNTEREXAMPLES.saturating_sub(s.counterexamples.len());
            s.counterexamples.extend(c.counterexamples.into_iter().take(room));
        }
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cartan_type: String,
    pub lattice: String,
    pub tally: Tally,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.tally.passed()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "cartan_type": self.cartan_type,
            "lattice": self.lattice,
            "passed": self.passed(),
            "checks": self.tally.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn run(suite: Suite, d: &RootDatum, opts: &Options, table: &mut KlTable) -> Result<SuiteReport> {
    let h = opts.max_height.unwrap_or_else(|| default_height(d));
    let tally = match suite {
        Suite::Bernstein => bernstein(d)?,
        Suite::Center => center(d, h.min(8), opts.jobs)?,
        Suite::Intertwiners => intertwiners(d)?,
        Suite::Macdonald => macdonald(d, h, opts.jobs)?,
        Suite::Cs => casselman_shalika(d, h.min(8), opts.jobs)?,
        Suite::Lk => lusztig_kato(d, h, opts.jobs, table)?,
        Suite::Combinatorics => combinatorics(d, h.min(8))?,
        Suite::Kl => kl(d, h.min(8), 8, opts.jobs, table)?,
        Suite::Freeness => freeness(d, h)?,
    };
    Ok(SuiteReport {
        suite,
        cartan_type: d.cartan_type().to_string(),
        lattice: d.lattice().to_string(),
        tally,
    })
}

fn grid<T: Send>(jobs: usize, items: &[Coweight], f: impl Fn(&Coweight) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    if jobs <= 1 {
        return items.iter().map(&f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

fn mu_json(mu: &Coweight) -> Value {
    json!({ "mu": json::coweight(mu) })
}

/// `{±ω_i∨ ∈ X_*} ∪ {±α_i∨}`.
pub fn bernstein_lambdas(d: &RootDatum) -> Vec<Coweight> {
    let mut out = Vec::new();
    for i in 0..d.rank() {
        if let Some(w) = d.fundamental_coweight(i) {
            out.extend([w, -w]);
        }
        let a = d.simple_coroot(i);
        out.extend([a, -a]);
    }
    out.sort();
    out.dedup();
    out
}

fn bernstein(d: &RootDatum) -> Result<Tally> {
    let h = Hecke::new(d);
    let mut t = Tally::default();
    let lams = bernstein_lambdas(d);
    for i in 0..d.rank() {
        for lam in &lams {
            let (lhs, rhs) = h.bernstein_relation(i, lam)?;
            t.check("T_s Θ_λ = Θ_{sλ} T_s + (1 − q) Θ((t_{sλ} − t_λ)/(1 − t_{−α∨}))", lhs == rhs, || {
                json!({ "simple": i + 1, "lambda": json::coweight(lam), "lhs": json::hecke(d, &lhs), "rhs": json::hecke(d, &rhs) })
            });
        }
    }
    for a in &lams {
        for b in &lams {
            let ok = h.mul(&h.theta(a), &h.theta(b)) == h.theta(&(*a + *b));
            t.check("Θ_λ Θ_μ = Θ_{λ+μ}", ok, || json!({ "lambda": json::coweight(a), "mu": json::coweight(b) }));
        }
    }
    Ok(t)
}

fn center(d: &RootDatum, h: i64, jobs: usize) -> Result<Tally> {
    let mus = d.dominant_coweights_up_to(h);
    let parts = grid(jobs, &mus, |mu| {
        let hk = Hecke::new(d);
        let m = Module::new(d);
        let mut t = Tally::default();
        let z = hk.z_basis(mu)?;
        t.check("z_μ commutes with every T_s and T_ω", hk.is_central(&z), || mu_json(mu));
        t.check("bar(z_μ) = z_μ", hk.bar(&z) == z, || mu_json(mu));
        let dual = d.weyl_act(d.longest_element(), &-*mu);
        t.check("ι(z_{−w_0 μ}) = z_μ", hk.iota(&hk.z_basis(&dual)?) == z, || mu_json(mu));
        let orbit = GroupAlgElt::orbit_sum(d, mu);
        let mut xs: Vec<ExtAffineElt> = (0..=d.rank()).map(|i| d.s_aff(i)).collect();
        xs.extend_from_slice(d.omega_elements());
        for x in xs {
            let v = m.one_x(x);
            t.check("1_x · z_μ = (Σ_{λ∈Wμ} t_λ) · 1_x", m.act(&v, &z) == m.r_act(&orbit, &v), || {
                json!({ "mu": json::coweight(mu), "x": json::elt(d, &x) })
            });
        }
        Ok(t)
    })?;
    Ok(merge_all(parts))
}

fn merge_all(parts: Vec<Tally>) -> Tally {
    let mut t = Tally::default();
    for p in parts {
        t.merge(p);
    }
    t
}

fn inversion_product(d: &RootDatum, w: WeylElt, f: impl Fn(&Coweight) -> RatFun) -> RatFun {
    d.inversion_set(w).into_iter().fold(RatFun::one(d.rank()), |acc, j| acc.mul(&f(&d.coroot(j))))
}

fn one_minus(d: &RootDatum, c: HalfLaurent, lam: Coweight) -> GroupAlgElt {
    &GroupAlgElt::one(d.rank()) - &GroupAlgElt::term(lam, c)
}

/// Largest `|W|` for which intertwiner identities are checked through the
/// general `ℋ`-linear extension on all pairs and all basis vectors. Above it,
/// `K_{w_1 w_2} = K_{w_1} K_{w_2}` is checked for `w_2 ∈ S` only (all pairs
/// follow by induction on `l(w_2)`), and `K_w(1_W)`, `J_w(1_W)` are composed
/// along reduced words.
pub const SMALL_WEYL: usize = 24;

/// A vector of `ℳ_gen`, kept as a scalar when it is a multiple of `1_W`.
#[derive(Clone)]
enum Image {
    Multiple(RatFun),
    General(ModGen),
}

impl Image {
    fn of(g: ModGen) -> Image {
        let c = g.coeffs[0].clone();
        if g.coeffs.iter().all(|x| *x == c) {
            Image::Multiple(c)
        } else {
            Image::General(g)
        }
    }
}

/// `X_w(1_W)` for every `w`, with `X_w = X_{s_1} ∘ X_{s_2 ⋯ s_n}` along the
/// stored reduced word and `X_s` semilinear: `X_s(c 1_W) = s(c) X_s(1_W)`.
fn spherical_images(d: &RootDatum, m: &Module, op: impl Fn(usize, &ModGen) -> ModGen) -> Vec<(WeylElt, Image)> {
    let spherical = m.gen_spherical();
    let at_s: Vec<Image> = (1..=d.rank()).map(|i| Image::of(op(i, &spherical))).collect();
    let mut ws: Vec<WeylElt> = d.weyl_elements().collect();
    ws.sort_by_key(|&w| (d.weyl_len(w), w.index()));
    let mut done: Vec<Option<Image>> = (0..ws.len()).map(|_| None).collect();
    let mut out = Vec::new();
    for w in ws {
        let img = match d.weyl_word(w).first() {
            None => Image::Multiple(RatFun::one(d.rank())),
            Some(&i) => {
                let s = d.simple_reflection(i - 1);
                let prev = done[d.weyl_mul(s, w).index()].as_ref().expect("shorter element done");
                match (prev, &at_s[i - 1]) {
                    (Image::Multiple(c), Image::Multiple(ci)) => Image::Multiple(c.w_act(d, s).mul(ci)),
                    (Image::Multiple(c), Image::General(g)) => Image::of(g.scale(&c.w_act(d, s))),
                    (Image::General(g), _) => Image::of(op(i, g)),
                }
            }
        };
        done[w.index()] = Some(img.clone());
        out.push((w, img));
    }
    out
}

fn is_multiple(img: &Image, c: &RatFun) -> bool {
    matches!(img, Image::Multiple(x) if x == c)
}

fn intertwiners(d: &RootDatum) -> Result<Tally> {
    let m = Module::new(d);
    let r = d.rank();
    let mut t = Tally::default();
    let unit = m.gen_basis(WeylElt::IDENTITY);
    let spherical = m.gen_spherical();
    let qi = HalfLaurent::v_pow(-2);
    let ws: Vec<WeylElt> = d.weyl_elements().collect();
    let small = ws.len() <= SMALL_WEYL;
    let w0 = d.longest_element();
    let simples: Vec<WeylElt> = (0..r).map(|i| d.simple_reflection(i)).collect();
    let one = RatFun::one(r);

    let basis: Vec<WeylElt> = if small {
        ws.clone()
    } else {
        let mut b = vec![WeylElt::IDENTITY, w0];
        b.extend(&simples);
        b
    };
    for i in 1..=r {
        for &u in &basis {
            let g = m.gen_basis(u);
            t.check("K_s ∘ K_s = id", m.k_simple(i, &m.k_simple(i, &g)) == g, || json!({ "s": i, "u": json::weyl(d, u) }));
        }
        let a = d.simple_coroot(i - 1);
        let c = &one_minus(d, qi.clone(), a) * &one_minus(d, qi.clone(), -a);
        let jj = m.j_simple(i, &m.j_simple(i, &unit));
        t.check("J_s² = (1 − q^{-1} t_{α∨})(1 − q^{-1} t_{−α∨})", jj == unit.scale(&RatFun::from_r(r, c)), || json!({ "s": i }));
    }

    let gk_poly = |w: WeylElt| inversion_product(d, w, |a| RatFun::from_r(r, one_minus(d, qi.clone(), *a)));
    for (w, img) in spherical_images(d, &m, |i, g| m.k_simple(i, g)) {
        t.check("K_w(1_W) = 1_W", is_multiple(&img, &one), || json!({ "w": json::weyl(d, w), "route": "reduced word" }));
    }
    for (w, img) in spherical_images(d, &m, |i, g| m.j_simple(i, g)) {
        t.check("J_w(1_W) = ∏_{α∈R_w} (1 − q^{-1} t_{α∨}) · 1_W", is_multiple(&img, &gk_poly(w)), || {
            json!({ "w": json::weyl(d, w), "route": "reduced word" })
        });
    }

    let pair_rhs = if small { ws.clone() } else { simples.clone() };
    let whittaker_unit = m.whittaker(&unit)?;
    for &w in &ws {
        let wj = || json!({ "w": json::weyl(d, w) });
        let ku = m.k_of_unit(KVariant::K, w);
        let diag = inversion_product(d, w, |a| {
            RatFun::new(r, one_minus(d, HalfLaurent::one(), -*a), &one_minus(d, HalfLaurent::q(), -*a)).expect("non-zero")
        });
        t.check("coefficient of 1_w in K_w(1_1) is ∏_{α∈R_w} (1 − t_{−α∨})/(1 − q t_{−α∨})", *ku.coeff(w) == diag, wj);
        let fw = d.finite(w);
        let tri = ws.iter().all(|&u| ku.coeff(u).is_zero() || d.bruhat_leq(&d.finite(u), &fw));
        t.check("K_w(1_1) is supported on {1_u : u ≤ w}", tri, wj);
        let gk = satake::gindikin_karpelevich(d, w);
        let cleared = gk.mul(&inversion_product(d, w, |a| RatFun::from_r(r, one_minus(d, HalfLaurent::one(), *a))));
        t.check("Gindikin–Karpelevich factor times ∏_{α∈R_w}(1 − t_{α∨}) matches J_w(1_W)", cleared == gk_poly(w), wj);
        if small {
            t.check("K_w(1_W) = 1_W", m.k_intertwiner(w, &spherical) == spherical, || json!({ "w": json::weyl(d, w), "route": "linear extension" }));
            t.check("J_w(1_W) = ∏_{α∈R_w} (1 − q^{-1} t_{α∨}) · 1_W", m.j_intertwiner(w, &spherical) == spherical.scale(&gk_poly(w)), || {
                json!({ "w": json::weyl(d, w), "route": "linear extension" })
            });
        }
        // Adjunction, with K_w(1_W) = 1_W supplied by the checks above.
        let wi = d.weyl_inv(w);
        let mut pairs: Vec<(ModGen, ModGen, ModGen, ModGen)> = vec![
            ((*m.k_of_unit(KVariant::K, wi)).clone(), unit.clone(), unit.clone(), (*ku).clone()),
            ((*m.k_of_unit(KVariant::K, wi)).clone(), spherical.clone(), unit.clone(), spherical.clone()),
            (spherical.clone(), unit.clone(), spherical.clone(), (*ku).clone()),
        ];
        if small {
            let top = m.gen_basis(w0);
            pairs.push((m.k_intertwiner(wi, &top), unit.clone(), top, (*ku).clone()));
        }
        for (k_m, m2, m1, k_m2) in &pairs {
            let lhs = m.pairing(k_m, m2).w_act(d, w);
            let rhs = m.pairing(m1, k_m2);
            t.check("w((K_{w^{-1}} m | m′)) = (m | K_w m′)", lhs == rhs, wj);
        }
        let lam = d.simple_coroot(0);
        let shifted = m.k_intertwiner(w, &unit.scale(&RatFun::monomial(lam)));
        let expect = ku.scale(&RatFun::monomial(d.weyl_act(w, &lam)));
        t.check("K_w(t_λ m) = t_{wλ} K_w(m)", shifted == expect, wj);
        let wk = m.whittaker(&m.kprime_intertwiner(w, &unit))?;
        t.check("Whittaker(K′_w m) = w(Whittaker(m))", wk == whittaker_unit.w_act(d, w), wj);
        for &w2 in &pair_rhs {
            let w12 = d.weyl_mul(w, w2);
            for (variant, name) in [(KVariant::K, "K_{w_1 w_2} = K_{w_1} K_{w_2}"), (KVariant::KPrime, "K′_{w_1 w_2} = K′_{w_1} K′_{w_2}")] {
                let inner = m.k_of_unit(variant, w2);
                let composed = match variant {
                    KVariant::K => m.k_intertwiner(w, &inner),
                    KVariant::KPrime => m.kprime_intertwiner(w, &inner),
                };
                t.check(name, composed == *m.k_of_unit(variant, w12), || {
                    json!({ "w1": json::weyl(d, w), "w2": json::weyl(d, w2) })
                });
            }
        }
        m.forget_products();
    }
    Ok(t)
}

/// Support of `(h_μ)∨` lies in `{t_ν : ν⁺ ⪯ μ}` and `t_μ` occurs.
pub fn satake_triangular(d: &RootDatum, mu: &Coweight, sat: &GroupAlgElt) -> bool {
    sat.terms().all(|(nu, _)| d.dominance_leq(&d.dominant_representative(nu), mu)) && !sat.coeff(mu).is_zero()
}

fn macdonald(d: &RootDatum, h: i64, jobs: usize) -> Result<Tally> {
    let mus = d.dominant_coweights_up_to(h);
    let l0 = d.weyl_len(d.longest_element()) as i32;
    let parts = grid(jobs, &mus, |mu| {
        let s = Satake::new(d);
        let mut t = Tally::default();
        let rep = s.satake_report(mu)?;
        t.check("(1_1 | 1_1 h_μ) equals the symmetrized closed form", rep.equal, || rep.to_json());
        t.check("(h_μ)∨ is W-invariant", rep.w_invariant, || rep.to_json());
        t.check("(h_μ)∨ is triangular in dominance order", satake_triangular(d, mu, &rep.satake_pairing), || rep.to_json());
        let barred = s.satake_transform(&s.hecke().bar(&satake::h_mu(d, mu)?));
        let expect = rep.satake_pairing.bar().scale(&HalfLaurent::v_pow(-2 * l0));
        t.check_res("(bar h)∨ = v^{-2 l(w_0)} bar(h∨)", barred.map(|b| b == expect), || mu_json(mu))?;
        let z = s.zonal_spherical(mu)?;
        t.check("zonal spherical value is W-invariant", z.is_w_invariant(d), || mu_json(mu));
        let (lhs, rhs) = satake::double_coset_identity(d, mu)?;
        t.check("W t_μ W(q) · W_μ(q^{-1}) = W(q) q^{l(t_μ)} W(q^{-1})", lhs == rhs, || mu_json(mu));
        Ok(t)
    })?;
    let mut t = merge_all(parts);
    let s = Satake::new(d);
    t.check("zonal spherical value at t_0 is 1", s.zonal_spherical(&d.zero())? == RatFun::one(d.rank()), || json!({}));
    let small: Vec<Coweight> = mus.iter().copied().filter(|m| d.two_rho_pair(m) <= 4).collect();
    let wpoly = d.poincare().to_laurent(1);
    for a in &small {
        for b in &small {
            let prod = s.hecke().mul(&satake::h_mu(d, a)?, &satake::h_mu(d, b)?);
            let lhs = s.satake_transform(&prod)?;
            let rhs = (&s.satake_of(a)? * &s.satake_of(b)?).scale(&wpoly);
            t.check("(h_λ h_μ)∨ = W(q) h_λ∨ h_μ∨", lhs == rhs, || json!({ "lambda": json::coweight(a), "mu": json::coweight(b) }));
        }
    }
    Ok(t)
}

fn casselman_shalika(d: &RootDatum, h: i64, jobs: usize) -> Result<Tally> {
    let mus = d.dominant_coweights_up_to(h);
    let parts = grid(jobs, &mus, |mu| {
        let s = Satake::new(d);
        let mut t = Tally::default();
        let res = s.casselman_shalika(mu);
        let payload = match &res {
            Ok(r) => r.to_json(),
            Err(_) => mu_json(mu),
        };
        t.check_res("v^{-l(t_μ)} Whittaker(1_W Θ_μ) = ∏_{α>0}(1 − q^{-1} t_{−α∨}) v^{-l(t_μ)} E_μ", res.map(|r| r.equal), || payload)?;
        Ok(t)
    })?;
    Ok(merge_all(parts))
}

fn engine_with<'d>(d: &'d RootDatum, table: &KlTable) -> Result<KlEngine<'d>> {
    let mut e = KlEngine::new(d);
    e.absorb(table)?;
    Ok(e)
}

fn lusztig_kato(d: &RootDatum, h: i64, jobs: usize, table: &mut KlTable) -> Result<Tally> {
    let mus = d.dominant_coweights_up_to(h);
    let shared = table.clone();
    let parts = grid(jobs, &mus, |mu| {
        let s = Satake::new(d);
        let mut kl = engine_with(d, &shared)?;
        let mut t = Tally::default();
        let rep = s.lusztig_kato(&mut kl, mu)?;
        t.check("E_μ = Σ_{λ⪯μ} q^{-l(t_μ)/2} P_{w_λ,w_μ}(q) (h_λ)∨", rep.equal, || rep.to_json());
        t.check("Σ_{λ⪯μ} q^{-l(t_μ)/2} P_{w_λ,w_μ}(q) (h_λ)∨ has v-free coefficients", rep.v_free, || rep.to_json());
        for (lam, p) in &rep.kl {
            if lam != mu {
                let bound = d.two_rho_pair(&(*mu - *lam)) - 1;
                let ok = p.degree().is_none_or(|k| 2 * k as i64 <= bound);
                t.check("deg P_{w_λ,w_μ} ≤ ⟨ρ, μ − λ⟩ − 1/2", ok, || {
                    json!({ "mu": json::coweight(mu), "lambda": json::coweight(lam), "P": p.to_string() })
                });
            }
        }
        let q1 = s.lusztig_q1(&mut kl, mu)?;
        t.check("E_μ = Σ_{λ⪯μ} P_{w_λ,w_μ}(1) Σ_{ν∈Wλ} t_ν", q1.character_match, || q1.to_json());
        t.check("P_{w_λ,w_μ}(1) = weight multiplicity (Freudenthal)", q1.multiplicity_match, || q1.to_json());
        Ok((t, kl.export()))
    })?;
    let mut t = Tally::default();
    for (part, tab) in parts {
        t.merge(part);
        table.merge(&tab)?;
    }
    Ok(t)
}

static TMP_COUNTER: AtomicUsize = AtomicUsize::new(0);

fn scratch_path() -> PathBuf {
    let n = TMP_COUNTER.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("hecke-forge-kl-{}-{n}.jsonl", std::process::id()))
}

/// Store, load and store again; the two files must be byte-identical.
pub fn cache_round_trip(d: &RootDatum, table: &KlTable) -> Result<bool> {
    let (p1, p2) = (scratch_path(), scratch_path());
    let mut a = table.clone();
    a.store(d, &p1)?;
    let mut b = KlTable::load(d, &p1)?;
    b.store(d, &p2)?;
    let same = std::fs::read(&p1)? == std::fs::read(&p2)?;
    let _ = std::fs::remove_file(&p1);
    let _ = std::fs::remove_file(&p2);
    Ok(same && a.entries().eq(b.entries()))
}

fn kl(d: &RootDatum, h: i64, max_len: usize, jobs: usize, table: &mut KlTable) -> Result<Tally> {
    let mut t = Tally::default();
    let hk = Hecke::new(d);
    let mut e = engine_with(d, table)?;
    for y in d.elements_up_to_length(max_len) {
        let c = e.cprime(&y)?;
        t.check("bar(C′_y) = C′_y", hk.bar(&c) == c, || json!({ "y": json::elt(d, &y) }));
    }
    table.merge(&e.export())?;
    let mus = d.dominant_coweights_up_to(h);
    let shared = table.clone();
    let parts = grid(jobs, &mus, |mu| {
        let mut e = engine_with(d, &shared)?;
        let mut t = Tally::default();
        let wmu = d.longest_in_double_coset(mu)?;
        for lam in d.dominant_coweights_below(mu)? {
            let p = e.kl_polynomial(&d.longest_in_double_coset(&lam)?, &wmu)?;
            for x in d.double_coset_elements(&lam)? {
                let px = e.kl_polynomial(&x, &wmu)?;
                t.check("P_{x, w_μ} = P_{w_λ, w_μ} for x ∈ W t_λ W", px == p, || {
                    json!({ "mu": json::coweight(mu), "lambda": json::coweight(&lam), "x": json::elt(d, &x) })
                });
            }
        }
        Ok((t, e.export()))
    })?;
    for (part, tab) in parts {
        t.merge(part);
        table.merge(&tab)?;
    }
    for ((x, y), p) in table.entries() {
        let (lx, ly) = (d.length(x), d.length(y));
        let ok = if x == y {
            p.is_one()
        } else {
            lx < ly && p.has_nonnegative_coeffs() && p.degree().is_some_and(|k| 2 * k < ly - lx)
        };
        t.check("P_{x,y} has non-negative coefficients and degree ≤ (l(y) − l(x) − 1)/2", ok, || {
            json!({ "x": json::elt(d, x), "y": json::elt(d, y), "P": p.to_string() })
        });
    }
    t.check_res("KL cache store/load/store is byte-exact", cache_round_trip(d, table), || json!({ "entries": table.len() }))?;
    Ok(t)
}

/// Number of affine hyperplanes `⟨α, ·⟩ = k` separating the base alcove from
/// its image under `x`, computed on a generic interior point.
pub fn hyperplane_count(d: &RootDatum, x: &ExtAffineElt) -> usize {
    // p = −ρ∨ / (ht α̃ + 1) lies in the base alcove; with S = 2ρ∨ = Σ α∨ and
    // M = 2(ht α̃ + 1), ⟨α, p⟩ = −⟨α, S⟩/M and ⟨α, x p⟩ = ⟨α, λ⟩ − ⟨α, wS⟩/M.
    let s: Coweight = d.positive_coroots().iter().fold(d.zero(), |acc, a| acc + *a);
    let m = 2 * (d.root_height(d.highest_root_index()) + 1);
    let ws = d.weyl_act(x.w, &s);
    let mut total = 0i64;
    for j in 0..d.num_pos_roots() {
        let a = -d.pair(j, &s);
        let b = m * d.pair(j, &x.t) - d.pair(j, &ws);
        total += (b.div_euclid(m) - a.div_euclid(m)).abs();
    }
    total as usize
}

/// `x ≤ y` by the subword property on the stored reduced word of `y`.
pub fn bruhat_by_subwords(d: &RootDatum, x: &ExtAffineElt, y: &ExtAffineElt) -> bool {
    let word = d.reduced_word(y);
    let n = word.letters.len();
    (0u64..1 << n).any(|mask| {
        let sub: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| word.letters[k]).collect();
        let z = d.from_affine_word(&sub).expect("letters in range");
        d.ew_mul(&z, &word.omega) == *x
    })
}

fn combinatorics(d: &RootDatum, h: i64) -> Result<Tally> {
    let mut t = Tally::default();
    let w = d.poincare();
    let l0 = d.weyl_len(d.longest_element());
    t.check("W(q) = q^{l(w_0)} W(q^{-1})", w.reversed(l0) == w, || json!({ "W": w.to_string() }));
    let count: BigInt = w.eval_one();
    t.check("W(1) = |W|", count == BigInt::from(d.weyl_order()), || json!({ "W": w.to_string() }));
    for mu in d.dominant_coweights_up_to(h) {
        let (lhs, rhs) = satake::double_coset_identity(d, &mu)?;
        t.check("W t_μ W(q) · W_μ(q^{-1}) = W(q) q^{l(t_μ)} W(q^{-1})", lhs == rhs, || mu_json(&mu));
        let n = d.double_coset_elements(&mu)?.len();
        let expect = d.weyl_order() * d.weyl_order() / d.stabilizer(&mu).len();
        t.check("|W t_μ W| = |W|² / |W_μ|", n == expect, || mu_json(&mu));
    }
    let ball = d.elements_up_to_length(6);
    for x in &ball {
        t.check("l(x) equals the number of separating affine hyperplanes", d.length(x) == hyperplane_count(d, x), || {
            json!({ "x": json::elt(d, x) })
        });
    }
    let mut e = KlEngine::new(d);
    for y in &ball {
        for x in &ball {
            if d.length(x) > d.length(y) {
                continue;
            }
            let brute = bruhat_by_subwords(d, x, y);
            let payload = || json!({ "x": json::elt(d, x), "y": json::elt(d, y), "subword": brute });
            t.check("Bruhat order by descent recursion matches subwords", d.bruhat_leq(x, y) == brute, payload);
            t.check("Bruhat order by lower intervals matches subwords", e.bruhat_leq(x, y)? == brute, payload);
        }
    }
    Ok(t)
}

fn freeness(d: &RootDatum, h: i64) -> Result<Tally> {
    let mut t = Tally::default();
    let m = Module::new(d);
    let hk = Hecke::new(d);
    for x in d.elements_up_to_length(6) {
        let row = m.unit_row(&x);
        let diag = row.coeff(&x);
        let ok = diag.as_monomial().is_some() && row.support().all(|y| *y == x || (d.length(y) < d.length(&x) && d.bruhat_leq(y, &x)));
        t.check("1_1 T_x = (monomial) 1_x + Σ_{y<x} c_y 1_y", ok, || json!({ "x": json::elt(d, &x) }));
    }
    for lam in bernstein_lambdas(d) {
        let v = m.r_act(&GroupAlgElt::monomial(lam), &m.one_x(d.ew_identity()));
        let ok = m.hecke_preimage(&v)? == hk.theta(&lam);
        t.check("1_1 Θ_λ = t_λ 1_1", ok, || json!({ "lambda": json::coweight(&lam) }));
    }
    let s = Satake::new(d);
    for mu in d.dominant_coweights_up_to(h) {
        let sat = s.satake_of(&mu)?;
        t.check("(h_μ)∨ is triangular in dominance order", satake_triangular(d, &mu, &sat), || mu_json(&mu));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_a1() {
        for lattice in ["sc", "ad"] {
            let d = RootDatum::build("A1", lattice).unwrap();
            let mut table = KlTable::new(&d);
            let opts = Options { max_height: Some(6), jobs: 1 };
            for suite in Suite::ALL {
                let rep = run(suite, &d, &opts, &mut table).unwrap();
                assert!(rep.passed(), "{}", rep.to_json());
            }
        }
    }

    #[test]
    fn hyperplanes_match_length_small() {
        let d = RootDatum::build("G2", "sc").unwrap();
        for x in d.elements_up_to_length(4) {
            assert_eq!(hyperplane_count(&d, &x), d.length(&x));
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }
}
