use hecke_forge::{Coweight, GroupAlgElt, HalfLaurent, Hecke, HeckeElt, Module, RootDatum};
use proptest::prelude::*;

const DATA: [(&str, &str); 5] = [("A1", "ad"), ("A2", "sc"), ("B2", "ad"), ("C2", "sc"), ("G2", "sc")];

fn datum(i: usize) -> RootDatum {
    RootDatum::build(DATA[i].0, DATA[i].1).unwrap()
}

fn word(d: &RootDatum, raw: &[usize]) -> HeckeElt {
    let x = d.from_affine_word(&raw.iter().map(|k| k % (d.rank() + 1)).collect::<Vec<_>>()).unwrap();
    HeckeElt::basis(x)
}

fn coweight(d: &RootDatum, raw: &[i64]) -> Coweight {
    // Raw coordinates are in the coweight basis of X_*, so any vector is valid.
    d.coweight(&raw[..d.rank()]).unwrap()
}

fn mixed(d: &RootDatum, raw: &[usize], lam: &[i64]) -> HeckeElt {
    let mut h = word(d, raw);
    h.add_scaled(&Hecke::new(d).theta(&coweight(d, lam)), &(&HalfLaurent::q() - &HalfLaurent::constant(3)));
    h
}

fn small_word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 0..5)
}

fn small_coweight() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-2i64..=2, 2)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn hecke_product_is_associative_and_theta_multiplicative(
        di in 0..DATA.len(),
        a in small_word(), b in small_word(), c in small_word(),
        l1 in small_coweight(), l2 in small_coweight(),
    ) {
        let d = datum(di);
        let h = Hecke::new(&d);
        let (x, y, z) = (mixed(&d, &a, &l1), word(&d, &b), mixed(&d, &c, &l2));
        prop_assert!(h.mul(&h.mul(&x, &y), &z) == h.mul(&x, &h.mul(&y, &z)));

        let (m1, m2) = (coweight(&d, &l1), coweight(&d, &l2));
        let sum = d.coweight(&m1.coords().iter().zip(m2.coords()).map(|(p, q)| p + q).collect::<Vec<_>>()).unwrap();
        prop_assert!(h.mul(&h.theta(&m1), &h.theta(&m2)) == h.theta(&sum));
    }

    #[test]
    fn module_actions_commute(
        di in 0..DATA.len(),
        start in small_word(), b in small_word(),
        lam in small_coweight(), mu in small_coweight(),
    ) {
        let d = datum(di);
        let module = Module::new(&d);
        let m = module.one_x(d.from_affine_word(&start.iter().map(|k| k % (d.rank() + 1)).collect::<Vec<_>>()).unwrap());
        let r = GroupAlgElt::from_terms([
            (coweight(&d, &lam), HalfLaurent::v_pow(1)),
            (coweight(&d, &mu), HalfLaurent::constant(-2)),
        ]);
        let h = mixed(&d, &b, &mu);
        let left = module.act(&module.r_act(&r, &m), &h);
        let right = module.r_act(&r, &module.act(&m, &h));
        prop_assert!(left == right);
    }
}
