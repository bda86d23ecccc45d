//! Kazhdan–Lusztig polynomials `P_{x,y}(q)` on `W̃`, the bar-invariant
//! elements `C′_y`, and a JSON-lines cache.
//!
//! Pairs are normalized by right multiplication with `ω^{-1}` so that all
//! interned elements lie in `W_aff`; elements in different `Ω`-components are
//! incomparable and get `P = 0`. Lower intervals come from the lifting
//! property `[1, sy] = [1, y] ∪ s[1, y]` for `sy > y`, and a whole column
//! `x ↦ P_{x,y}` is computed at once by the usual recursion on the
//! smallest-index left descent of `y`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use serde_json::{json, Value};

use crate::coeffs::{HalfLaurent, IntPoly};
use crate::error::{Error, Result};
use crate::extweyl::ExtAffineElt;
use crate::hecke::HeckeElt;
use crate::json;
use crate::roots::RootDatum;

const FORMAT: &str = "hecke-forge/kl-cache/1";
const UNSET: u32 = u32::MAX;

type Column = FxHashMap<u32, IntPoly>;
type Pair = (ExtAffineElt, ExtAffineElt);

/// Persistent map `(x, y) ↦ P_{x,y}` over normalized pairs, for one datum.
#[derive(Clone, Debug, PartialEq)]
pub struct KlTable {
    cartan_type: String,
    lattice: String,
    entries: BTreeMap<Pair, IntPoly>,
    /// Source line of each entry, when the table came from a file.
    lines: BTreeMap<Pair, usize>,
    dirty: bool,
}

impl KlTable {
    pub fn new(datum: &RootDatum) -> Self {
        KlTable {
            cartan_type: datum.cartan_type().to_string(),
            lattice: datum.lattice().to_string(),
            entries: BTreeMap::new(),
            lines: BTreeMap::new(),
            dirty: false,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Pair, &IntPoly)> {
        self.entries.iter()
    }

    /// Number of distinct `y` with a stored column.
    pub fn columns(&self) -> usize {
        let ys: FxHashSet<&ExtAffineElt> = self.entries.keys().map(|(_, y)| y).collect();
        ys.len()
    }

    fn matches(&self, datum: &RootDatum) -> bool {
        self.cartan_type == datum.cartan_type().to_string() && self.lattice == datum.lattice().to_string()
    }

    /// Union with another table for the same datum; overlapping entries must agree.
    pub fn merge(&mut self, other: &KlTable) -> Result<()> {
        if self.cartan_type != other.cartan_type || self.lattice != other.lattice {
            return Err(Error::DatumMismatch(format!(
                "cannot merge {} {} into {} {}",
                other.cartan_type, other.lattice, self.cartan_type, self.lattice
            )));
        }
        for (k, p) in &other.entries {
            match self.entries.get(k) {
                Some(q) if q != p => {
                    return Err(Error::IdentityViolation(format!("conflicting P for {k:?}: {q} vs {p}")));
                }
                Some(_) => {}
                None => {
                    self.entries.insert(*k, p.clone());
                    self.dirty = true;
                }
            }
        }
        Ok(())
    }

    pub fn to_json_lines(&self, datum: &RootDatum) -> String {
        let mut out = String::new();
        let header = json!({ "cartan_type": self.cartan_type, "lattice": self.lattice, "format": FORMAT });
        out.push_str(&header.to_string());
        out.push('\n');
        for ((x, y), p) in &self.entries {
            let line = json!({ "x": json::elt(datum, x), "y": json::elt(datum, y), "P": json::poly(p) });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }

    pub fn store(&mut self, datum: &RootDatum, path: &Path) -> Result<()> {
        let mut f = BufWriter::new(fs::File::create(path)?);
        f.write_all(self.to_json_lines(datum).as_bytes())?;
        f.flush()?;
        self.dirty = false;
        Ok(())
    }

    /// Parse and validate a cache file. Every entry is checked against the
    /// Bruhat order, the degree bound, positivity and column completeness.
    pub fn load(datum: &RootDatum, path: &Path) -> Result<KlTable> {
        let reader = BufReader::new(fs::File::open(path)?);
        let mut table = KlTable::new(datum);
        let mut saw_header = false;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Cache { line: lineno, msg };
            let v: Value = serde_json::from_str(&line).map_err(|e| bad(format!("malformed JSON: {e}")))?;
            if !saw_header {
                let field = |k: &str| v.get(k).and_then(Value::as_str).unwrap_or("");
                if field("format") != FORMAT {
                    return Err(bad(format!("unknown cache format {:?}", field("format"))));
                }
                if field("cartan_type") != table.cartan_type || field("lattice") != table.lattice {
                    return Err(bad(format!(
                        "cache is for {} {}, not {} {}",
                        field("cartan_type"),
                        field("lattice"),
                        table.cartan_type,
                        table.lattice
                    )));
                }
                saw_header = true;
                continue;
            }
            let get = |k: &str| v.get(k).ok_or_else(|| bad(format!("missing field {k:?}")));
            let x = json::parse_elt(datum, get("x")?).map_err(|e| bad(e.to_string()))?;
            let y = json::parse_elt(datum, get("y")?).map_err(|e| bad(e.to_string()))?;
            let p = json::parse_poly(get("P")?).map_err(|e| bad(e.to_string()))?;
            if table.entries.insert((x, y), p).is_some() {
                return Err(bad(format!("duplicate entry for ({x:?}, {y:?})")));
            }
            table.lines.insert((x, y), lineno);
        }
        if !saw_header {
            return Err(Error::Cache { line: 1, msg: "missing header".into() });
        }
        KlEngine::new(datum).absorb(&table)?;
        Ok(table)
    }
}

/// Memoized KL computations for one datum. The caller owns the engine;
/// independent engines can be merged through [`KlTable`].
pub struct KlEngine<'d> {
    datum: &'d RootDatum,
    gens: Vec<ExtAffineElt>,
    ids: FxHashMap<ExtAffineElt, u32>,
    elts: Vec<ExtAffineElt>,
    lens: Vec<u32>,
    left: Vec<Vec<u32>>,
    below: Vec<Option<Rc<FxHashSet<u32>>>>,
    cols: Vec<Option<Rc<Column>>>,
    mus: Vec<Option<Rc<Vec<(u32, BigInt)>>>>,
    dirty: bool,
}

impl<'d> KlEngine<'d> {
    pub fn new(datum: &'d RootDatum) -> Self {
        KlEngine {
            datum,
            gens: (0..=datum.rank()).map(|i| datum.s_aff(i)).collect(),
            ids: FxHashMap::default(),
            elts: Vec::new(),
            lens: Vec::new(),
            left: Vec::new(),
            below: Vec::new(),
            cols: Vec::new(),
            mus: Vec::new(),
            dirty: false,
        }
    }

    pub fn datum(&self) -> &'d RootDatum {
        self.datum
    }

    /// True once something has been computed that the last export did not see.
    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn computed_columns(&self) -> usize {
        self.cols.iter().filter(|c| c.is_some()).count()
    }

    fn intern(&mut self, x: ExtAffineElt) -> u32 {
        if let Some(&id) = self.ids.get(&x) {
            return id;
        }
        let id = self.elts.len() as u32;
        self.ids.insert(x, id);
        self.elts.push(x);
        self.lens.push(self.datum.length(&x) as u32);
        self.left.push(vec![UNSET; self.gens.len()]);
        self.below.push(None);
        self.cols.push(None);
        self.mus.push(None);
        id
    }

    fn lmul(&mut self, id: u32, i: usize) -> u32 {
        let cached = self.left[id as usize][i];
        if cached != UNSET {
            return cached;
        }
        let sx = self.datum.ew_mul(&self.gens[i], &self.elts[id as usize]);
        let sid = self.intern(sx);
        self.left[id as usize][i] = sid;
        self.left[sid as usize][i] = id;
        sid
    }

    fn len_of(&self, id: u32) -> u32 {
        self.lens[id as usize]
    }

    fn first_left_descent(&mut self, id: u32) -> Option<usize> {
        let l = self.len_of(id);
        (0..self.gens.len()).find(|&i| {
            let s = self.lmul(id, i);
            self.len_of(s) < l
        })
    }

    fn below(&mut self, y: u32) -> Rc<FxHashSet<u32>> {
        if let Some(b) = &self.below[y as usize] {
            return b.clone();
        }
        let set = match self.first_left_descent(y) {
            None => std::iter::once(y).collect(),
            Some(s) => {
                let v = self.lmul(y, s);
                let prev = self.below(v);
                let mut set: FxHashSet<u32> = (*prev).clone();
                for &z in prev.iter() {
                    let sz = self.lmul(z, s);
                    set.insert(sz);
                }
                set
            }
        };
        let rc = Rc::new(set);
        self.below[y as usize] = Some(rc.clone());
        rc
    }

    fn check_entry(&self, x: u32, y: u32, p: &IntPoly) -> std::result::Result<(), String> {
        let (lx, ly) = (self.len_of(x) as usize, self.len_of(y) as usize);
        if x == y {
            return if p.is_one() { Ok(()) } else { Err(format!("P_(y,y) = {p}, expected 1")) };
        }
        if !p.has_nonnegative_coeffs() {
            return Err(format!("negative coefficient in P = {p}"));
        }
        if !p.coeff(0).is_one() {
            return Err(format!("constant term of P = {p} is not 1"));
        }
        let bound = (ly - lx - 1) / 2;
        if p.degree().is_some_and(|d| d > bound) {
            return Err(format!("deg P = {p} exceeds (l(y) - l(x) - 1)/2 = {bound}"));
        }
        Ok(())
    }

    fn violation(&self, x: u32, y: u32, msg: String) -> Error {
        let (x, y) = (self.elts[x as usize], self.elts[y as usize]);
        Error::IdentityViolation(format!("KL polynomial for ({x:?}, {y:?}): {msg}"))
    }

    fn column(&mut self, y: u32) -> Result<Rc<Column>> {
        if let Some(c) = &self.cols[y as usize] {
            return Ok(c.clone());
        }
        let mut col = Column::default();
        match self.first_left_descent(y) {
            None => {
                col.insert(y, IntPoly::one());
            }
            Some(s) => {
                let v = self.lmul(y, s);
                let colv = self.column(v)?;
                let ly = self.len_of(y);
                let mut corrections = Vec::new();
                for (z, mu) in self.mu_list(v)?.iter() {
                    let sz = self.lmul(*z, s);
                    if self.len_of(sz) < self.len_of(*z) {
                        let shift = ((ly - self.len_of(*z)) / 2) as usize;
                        corrections.push((self.column(*z)?, shift, mu.clone()));
                    }
                }
                let below = self.below(y);
                let mut xs: Vec<u32> = below.iter().copied().collect();
                xs.sort_unstable_by_key(|&x| (std::cmp::Reverse(self.len_of(x)), x));
                for x in xs {
                    let p = if ly - self.len_of(x) <= 2 {
                        IntPoly::one()
                    } else {
                        let sx = self.lmul(x, s);
                        if self.len_of(sx) > self.len_of(x) {
                            match col.get(&sx) {
                                Some(p) => p.clone(),
                                None => return Err(self.violation(x, y, "sx missing from the lower interval".into())),
                            }
                        } else {
                            let zero = IntPoly::zero();
                            let mut p = colv.get(&sx).unwrap_or(&zero) + &colv.get(&x).unwrap_or(&zero).shift(1);
                            for (cz, shift, mu) in &corrections {
                                if let Some(pz) = cz.get(&x) {
                                    p = &p - &pz.shift(*shift).scale(mu);
                                }
                            }
                            p
                        }
                    };
                    self.check_entry(x, y, &p).map_err(|m| self.violation(x, y, m))?;
                    col.insert(x, p);
                }
            }
        }
        let rc = Rc::new(col);
        self.cols[y as usize] = Some(rc.clone());
        self.dirty = true;
        Ok(rc)
    }

    /// `z < v` with `μ(z, v) ≠ 0`, sorted by id.
    fn mu_list(&mut self, v: u32) -> Result<Rc<Vec<(u32, BigInt)>>> {
        if let Some(m) = &self.mus[v as usize] {
            return Ok(m.clone());
        }
        let col = self.column(v)?;
        let lv = self.len_of(v);
        let mut out: Vec<(u32, BigInt)> = col
            .iter()
            .filter_map(|(&z, p)| {
                let d = lv - self.len_of(z);
                if d % 2 == 0 {
                    return None;
                }
                let c = p.coeff(((d - 1) / 2) as usize);
                (!c.is_zero()).then_some((z, c))
            })
            .collect();
        out.sort_unstable_by_key(|(z, _)| *z);
        let rc = Rc::new(out);
        self.mus[v as usize] = Some(rc.clone());
        Ok(rc)
    }

    /// Normalized ids of `(x, y)`, or `None` across `Ω`-components.
    fn normalize(&mut self, x: &ExtAffineElt, y: &ExtAffineElt) -> Result<Option<(u32, u32)>> {
        let d = self.datum;
        d.check_elt(x)?;
        d.check_elt(y)?;
        if !d.same_component(x, y) {
            return Ok(None);
        }
        let oi = d.ew_inv(&d.omega_part(y));
        Ok(Some((self.intern(d.ew_mul(x, &oi)), self.intern(d.ew_mul(y, &oi)))))
    }

    pub fn bruhat_leq(&mut self, x: &ExtAffineElt, y: &ExtAffineElt) -> Result<bool> {
        Ok(match self.normalize(x, y)? {
            None => false,
            Some((xi, yi)) => self.below(yi).contains(&xi),
        })
    }

    /// `{x : x ≤ y}`, sorted.
    pub fn interval(&mut self, y: &ExtAffineElt) -> Result<Vec<ExtAffineElt>> {
        let d = self.datum;
        let (_, yi) = self.normalize(y, y)?.expect("same component");
        let omega = d.omega_part(y);
        let mut out: Vec<ExtAffineElt> =
            self.below(yi).iter().map(|&x| d.ew_mul(&self.elts[x as usize], &omega)).collect();
        out.sort();
        Ok(out)
    }

    pub fn kl_polynomial(&mut self, x: &ExtAffineElt, y: &ExtAffineElt) -> Result<IntPoly> {
        let Some((xi, yi)) = self.normalize(x, y)? else {
            return Ok(IntPoly::zero());
        };
        if !self.below(yi).contains(&xi) {
            return Ok(IntPoly::zero());
        }
        Ok(self.column(yi)?.get(&xi).cloned().unwrap_or_default())
    }

    /// Coefficient of `q^{(l(y) − l(x) − 1)/2}` in `P_{x,y}`; 0 when that
    /// exponent is not a non-negative integer.
    pub fn mu_coefficient(&mut self, x: &ExtAffineElt, y: &ExtAffineElt) -> Result<BigInt> {
        let (lx, ly) = (self.datum.length(x) as i64, self.datum.length(y) as i64);
        let d = ly - lx;
        if d <= 0 || d % 2 == 0 {
            return Ok(BigInt::zero());
        }
        Ok(self.kl_polynomial(x, y)?.coeff(((d - 1) / 2) as usize))
    }

    /// `C′_y = v^{-l(y)} Σ_{x ≤ y} P_{x,y}(v²) T_x`.
    pub fn cprime(&mut self, y: &ExtAffineElt) -> Result<HeckeElt> {
        let d = self.datum;
        let (_, yi) = self.normalize(y, y)?.expect("same component");
        let omega = d.omega_part(y);
        let col = self.column(yi)?;
        let scale = HalfLaurent::v_pow(-(self.len_of(yi) as i32));
        let mut out = HeckeElt::zero();
        for (&x, p) in col.iter() {
            let xo = d.ew_mul(&self.elts[x as usize], &omega);
            out.add_term(xo, &(&p.to_laurent(1) * &scale));
        }
        Ok(out)
    }

    /// All computed columns as a table.
    pub fn export(&mut self) -> KlTable {
        let mut table = KlTable::new(self.datum);
        for (y, col) in self.cols.iter().enumerate() {
            let Some(col) = col else { continue };
            let ye = self.elts[y];
            for (&x, p) in col.iter() {
                table.entries.insert((self.elts[x as usize], ye), p.clone());
            }
        }
        table.dirty = self.dirty;
        self.dirty = false;
        table
    }

    /// Validate a table and install its columns as memoized results.
    pub fn absorb(&mut self, table: &KlTable) -> Result<()> {
        if !table.matches(self.datum) {
            return Err(Error::DatumMismatch(format!(
                "table for {} {} used with {:?}",
                table.cartan_type, table.lattice, self.datum
            )));
        }
        let d = self.datum;
        let err = |pair: &Pair, msg: String| Error::Cache {
            line: table.lines.get(pair).copied().unwrap_or(0),
            msg: format!("entry ({:?}, {:?}): {msg}", pair.0, pair.1),
        };
        let mut by_y: BTreeMap<ExtAffineElt, Vec<(&Pair, &IntPoly)>> = BTreeMap::new();
        for (pair, p) in &table.entries {
            by_y.entry(pair.1).or_default().push((pair, p));
        }
        let identity = d.ew_identity();
        for (y, entries) in by_y {
            let first = entries[0].0;
            if d.check_elt(&y).is_err() || d.omega_part(&y) != identity {
                return Err(err(first, "y is not a normalized element of the affine Weyl group".into()));
            }
            let yi = self.intern(y);
            let below = self.below(yi);
            let mut col = Column::default();
            for (pair, p) in entries {
                let x = pair.0;
                if d.check_elt(&x).is_err() || !d.same_component(&x, &y) {
                    return Err(err(pair, "x lies outside the component of y".into()));
                }
                let xi = self.intern(x);
                if !below.contains(&xi) {
                    return Err(err(pair, format!("P = {p} is nonzero but x is not below y")));
                }
                self.check_entry(xi, yi, p).map_err(|m| err(pair, m))?;
                col.insert(xi, p.clone());
            }
            if col.len() != below.len() {
                return Err(err(first, format!("column has {} of {} entries", col.len(), below.len())));
            }
            if self.cols[yi as usize].as_deref().is_some_and(|c| *c != col) {
                return Err(err(first, "column disagrees with a computed one".into()));
            }
            self.cols[yi as usize] = Some(Rc::new(col));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::Hecke;

    fn a1() -> RootDatum {
        RootDatum::build("A1", "sc").unwrap()
    }

    #[test]
    fn rank_one_examples() {
        let d = a1();
        let mut e = KlEngine::new(&d);
        let s = d.from_affine_word(&[1]).unwrap();
        let y = d.from_affine_word(&[1, 0, 1]).unwrap();
        assert!(e.kl_polynomial(&s, &y).unwrap().is_one());
        assert!(e.kl_polynomial(&y, &y).unwrap().is_one());
        assert!(e.kl_polynomial(&y, &s).unwrap().is_zero());
        let ss0 = d.from_affine_word(&[1, 0]).unwrap();
        assert!(e.mu_coefficient(&d.ew_identity(), &ss0).unwrap().is_zero());
        assert!(e.mu_coefficient(&s, &ss0).unwrap().is_one());
        assert!(e.mu_coefficient(&s, &s).unwrap().is_zero());
    }

    #[test]
    fn cprime_small() {
        let d = a1();
        let h = Hecke::new(&d);
        let mut e = KlEngine::new(&d);
        assert_eq!(e.cprime(&d.ew_identity()).unwrap(), h.one());
        let s = d.s_aff(1);
        let expect = (&h.one() + &h.t(s)).scale(&HalfLaurent::v_pow(-1));
        assert_eq!(e.cprime(&s).unwrap(), expect);
        let y = d.from_affine_word(&[1, 0, 1]).unwrap();
        let c = e.cprime(&y).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(h.bar(&c), c);
    }

    #[test]
    fn nonconstant_polynomial_in_a2() {
        // w_μ for μ = α_1∨ + α_2∨ sits above w_0 with P_{w_0, w_μ} = 1 + q.
        let d = RootDatum::build("A2", "sc").unwrap();
        let h = Hecke::new(&d);
        let mut e = KlEngine::new(&d);
        let mu = d.coweight(&[1, 1]).unwrap();
        let wmu = d.longest_in_double_coset(&mu).unwrap();
        let w0 = d.longest_in_double_coset(&d.zero()).unwrap();
        assert_eq!(e.kl_polynomial(&w0, &wmu).unwrap(), IntPoly::from_i64(&[1, 1]));
        let c = e.cprime(&wmu).unwrap();
        assert_eq!(h.bar(&c), c);
    }

    #[test]
    fn components_are_incomparable() {
        let d = RootDatum::build("A1", "ad").unwrap();
        let mut e = KlEngine::new(&d);
        let omega = d.omega_elements()[1];
        let x = d.ew_identity();
        assert!(e.kl_polynomial(&x, &omega).unwrap().is_zero());
        assert!(e.kl_polynomial(&omega, &omega).unwrap().is_one());
        let y = d.ew_mul(&d.s_aff(1), &omega);
        assert!(e.kl_polynomial(&omega, &y).unwrap().is_one());
    }
}
