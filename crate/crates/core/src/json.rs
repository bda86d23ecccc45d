//! Canonical JSON encodings.
//!
//! Coefficients in `ℤ[v^{±1/2}]` are lists of `[e, c]` with `e` the *doubled*
//! exponent of `v`, so `v^2 - 1` is `[[0, -1], [4, 1]]`. Affine elements are
//! `{"t": [...], "w": [...]}` with `w` the reduced word in `1..=r`. Key order is
//! serde_json's default (sorted), so output is byte-deterministic.

use num_bigint::BigInt;
use serde_json::{json, Map, Number, Value};

use crate::coeffs::{GroupAlgElt, HalfLaurent, IntPoly, RatFun};
use crate::error::{Error, Result};
use crate::extweyl::ExtAffineElt;
use crate::hecke::HeckeElt;
use crate::module_m::ModGen;
use crate::roots::{Coweight, RootDatum, WeylElt};

pub fn bigint(c: &BigInt) -> Value {
    Value::Number(c.to_string().parse::<Number>().expect("integer literal"))
}

pub fn parse_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.to_string().parse().map_err(|_| Error::Parse(format!("not an integer: {n}"))),
        Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        _ => Err(Error::Parse(format!("expected integer, got {v}"))),
    }
}

fn parse_i64(v: &Value) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::Parse(format!("expected small integer, got {v}")))
}

fn parse_array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("expected array, got {v}")))
}

pub fn coweight(c: &Coweight) -> Value {
    json!(c.coords())
}

pub fn parse_coweight(datum: &RootDatum, v: &Value) -> Result<Coweight> {
    let coords = parse_array(v)?.iter().map(parse_i64).collect::<Result<Vec<_>>>()?;
    datum.coweight(&coords)
}

pub fn weyl(datum: &RootDatum, w: WeylElt) -> Value {
    json!(datum.weyl_word(w))
}

pub fn parse_weyl(datum: &RootDatum, v: &Value) -> Result<WeylElt> {
    let word = parse_array(v)?
        .iter()
        .map(|x| x.as_u64().map(|k| k as usize).ok_or_else(|| Error::Parse(format!("bad generator {x}"))))
        .collect::<Result<Vec<_>>>()?;
    datum.weyl_from_word(&word)
}

pub fn elt(datum: &RootDatum, x: &ExtAffineElt) -> Value {
    json!({ "t": coweight(&x.t), "w": weyl(datum, x.w) })
}

pub fn parse_elt(datum: &RootDatum, v: &Value) -> Result<ExtAffineElt> {
    let obj = v.as_object().ok_or_else(|| Error::Parse(format!("expected element object, got {v}")))?;
    let field = |k: &str| obj.get(k).ok_or_else(|| Error::Parse(format!("element missing {k:?}")));
    Ok(ExtAffineElt { t: parse_coweight(datum, field("t")?)?, w: parse_weyl(datum, field("w")?)? })
}

pub fn laurent(c: &HalfLaurent) -> Value {
    Value::Array(c.terms().iter().map(|(e, k)| json!([e, bigint(k)])).collect())
}

pub fn parse_laurent(v: &Value) -> Result<HalfLaurent> {
    let mut terms = Vec::new();
    for t in parse_array(v)? {
        let pair = parse_array(t)?;
        if pair.len() != 2 {
            return Err(Error::Parse(format!("expected [exponent, coefficient], got {t}")));
        }
        let e = i32::try_from(parse_i64(&pair[0])?).map_err(|_| Error::Parse("exponent out of range".into()))?;
        terms.push((e, parse_bigint(&pair[1])?));
    }
    Ok(HalfLaurent::from_terms(terms))
}

/// `[[k, c_k], ...]` over the nonzero coefficients of `q^k`.
pub fn poly(p: &IntPoly) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
            .map(|(k, c)| json!([k, bigint(c)]))
            .collect(),
    )
}

pub fn parse_poly(v: &Value) -> Result<IntPoly> {
    let mut coeffs: Vec<BigInt> = Vec::new();
    for t in parse_array(v)? {
        let pair = parse_array(t)?;
        let k = pair.first().and_then(Value::as_u64).ok_or_else(|| Error::Parse(format!("bad exponent in {t}")))? as usize;
        if pair.len() != 2 || k > 1 << 16 {
            return Err(Error::Parse(format!("expected [exponent, coefficient], got {t}")));
        }
        if coeffs.len() <= k {
            coeffs.resize(k + 1, BigInt::default());
        }
        coeffs[k] = parse_bigint(&pair[1])?;
    }
    Ok(IntPoly::from_coeffs(coeffs))
}

pub fn group_alg(r: &GroupAlgElt) -> Value {
    json!({
        "terms": r.terms().map(|(lam, c)| json!({ "t": coweight(lam), "c": laurent(c) })).collect::<Vec<_>>(),
        "text": r.to_string(),
    })
}

pub fn ratfun(f: &RatFun) -> Value {
    json!({
        "numerator": group_alg(f.numerator()),
        "denominator": group_alg(&f.denominator()),
        "text": f.to_string(),
    })
}

pub fn hecke(datum: &RootDatum, h: &HeckeElt) -> Value {
    Value::Array(h.terms().map(|(x, c)| json!({ "x": elt(datum, x), "c": laurent(c) })).collect())
}

pub fn mod_gen(datum: &RootDatum, m: &ModGen) -> Value {
    let mut out = Map::new();
    for w in datum.weyl_elements() {
        let c = m.coeff(w);
        if !c.is_zero() {
            out.insert(format!("{:?}", datum.weyl_word(w)), ratfun(c));
        }
    }
    Value::Object(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let d = RootDatum::build("B2", "sc").unwrap();
        let x = d.from_affine_word(&[0, 1, 2, 0]).unwrap();
        assert_eq!(parse_elt(&d, &elt(&d, &x)).unwrap(), x);
        let c = &(&HalfLaurent::q() - &HalfLaurent::v_pow(-1)) * &HalfLaurent::monomial2(1, BigInt::from(7));
        assert_eq!(parse_laurent(&laurent(&c)).unwrap(), c);
        let big = IntPoly::from_coeffs(vec![BigInt::from(1), BigInt::from(0), "123456789012345678901234567890".parse().unwrap()]);
        let s = serde_json::to_string(&poly(&big)).unwrap();
        assert_eq!(s, "[[0,1],[2,123456789012345678901234567890]]");
        assert_eq!(parse_poly(&serde_json::from_str(&s).unwrap()).unwrap(), big);
    }
}
