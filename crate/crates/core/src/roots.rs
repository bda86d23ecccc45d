//! Irreducible root data with a chosen cocharacter lattice `Q∨ ⊆ X_* ⊆ P∨`.
//!
//! Coweights are always stored in coordinates with respect to a basis of
//! `X_*`. Roots act on them as integer functionals. The finite Weyl group is
//! enumerated once at construction time and every element is addressed by a
//! small index into that table.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;

use crate::coeffs::IntPoly;
use crate::error::{Error, Result};

pub const MAX_RANK: usize = 4;

/// A cocharacter, in `X_*`-basis coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coweight {
    rank: u8,
    c: [i64; MAX_RANK],
}

impl Coweight {
    pub fn new(coords: &[i64]) -> Self {
        assert!(coords.len() <= MAX_RANK, "rank {} exceeds {MAX_RANK}", coords.len());
        let mut c = [0; MAX_RANK];
        c[..coords.len()].copy_from_slice(coords);
        Coweight { rank: coords.len() as u8, c }
    }

    pub fn zero(rank: usize) -> Self {
        Coweight { rank: rank as u8, c: [0; MAX_RANK] }
    }

    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn coords(&self) -> &[i64] {
        &self.c[..self.rank as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = *self;
        for x in out.c.iter_mut() {
            *x *= k;
        }
        out
    }
}

impl fmt::Debug for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl Add for Coweight {
    type Output = Coweight;
    fn add(mut self, rhs: Coweight) -> Coweight {
        debug_assert_eq!(self.rank, rhs.rank);
        for i in 0..MAX_RANK {
            self.c[i] += rhs.c[i];
        }
        self
    }
}

impl Sub for Coweight {
    type Output = Coweight;
    fn sub(mut self, rhs: Coweight) -> Coweight {
        debug_assert_eq!(self.rank, rhs.rank);
        for i in 0..MAX_RANK {
            self.c[i] -= rhs.c[i];
        }
        self
    }
}

impl Neg for Coweight {
    type Output = Coweight;
    fn neg(self) -> Coweight {
        self.scale(-1)
    }
}

impl Mul<Coweight> for i64 {
    type Output = Coweight;
    fn mul(self, rhs: Coweight) -> Coweight {
        rhs.scale(self)
    }
}

/// Element of the finite Weyl group, as an index into the datum's table.
///
/// Two indices are equal iff the matrices of the action on `X_*` are equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElt(pub(crate) u16);

impl WeylElt {
    pub const IDENTITY: WeylElt = WeylElt(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    A,
    B,
    C,
    D,
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.family {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::G => 'G',
        };
        write!(f, "{letter}{}", self.rank)
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnsupportedType(s.to_string());
        let mut chars = s.trim().chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('G') => Family::G,
            _ => return Err(bad()),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
        let ok = match family {
            Family::A => (1..=4).contains(&rank),
            Family::B | Family::C => (2..=4).contains(&rank),
            // D2 is reducible; D3 is A3 under another name and is accepted.
            Family::D => (3..=4).contains(&rank),
            Family::G => rank == 2,
        };
        if ok {
            Ok(CartanType { family, rank })
        } else {
            Err(bad())
        }
    }
}

/// How the cocharacter lattice is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeSpec {
    /// `X_* = Q∨`.
    SimplyConnected,
    /// `X_* = P∨`.
    Adjoint,
    /// Rows are a basis of `X_*` in fundamental-coweight coordinates.
    Explicit(Vec<Vec<i64>>),
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeSpec::SimplyConnected => write!(f, "sc"),
            LatticeSpec::Adjoint => write!(f, "ad"),
            LatticeSpec::Explicit(rows) => {
                write!(f, "{}", serde_json::to_string(rows).expect("matrix serializes"))
            }
        }
    }
}

impl FromStr for LatticeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sc" => Ok(LatticeSpec::SimplyConnected),
            "ad" => Ok(LatticeSpec::Adjoint),
            other => serde_json::from_str::<Vec<Vec<i64>>>(other)
                .map(LatticeSpec::Explicit)
                .map_err(|_| Error::BadLattice(format!("cannot parse lattice {other:?}"))),
        }
    }
}

pub(crate) struct WeylTable {
    /// Action on `X_*` coordinates (column convention: `λ ↦ M λ`).
    pub mats: Vec<[[i64; MAX_RANK]; MAX_RANK]>,
    pub words: Vec<Vec<u8>>,
    pub mul: Vec<u16>,
    pub inv: Vec<u16>,
    /// Bit `j` set iff `w^{-1} α_j < 0`, i.e. the set `R_w`.
    pub neg: Vec<u32>,
}

impl WeylTable {
    fn order(&self) -> usize {
        self.mats.len()
    }
}

pub struct RootDatum {
    cartan_type: CartanType,
    lattice: LatticeSpec,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    basis: Vec<Vec<i64>>,
    pos_roots: Vec<Vec<i64>>,
    root_fun: Vec<[i64; MAX_RANK]>,
    pos_coroots: Vec<Coweight>,
    simple_idx: Vec<usize>,
    highest: usize,
    two_rho: [i64; MAX_RANK],
    cartan_t_adj: Vec<Vec<i64>>,
    cartan_det: i64,
    pub(crate) weyl: WeylTable,
    pub(crate) s_highest: WeylElt,
    pub(crate) omega: Vec<crate::extweyl::ExtAffineElt>,
    pub(crate) omega_keys: Vec<Vec<i64>>,
}

impl fmt::Debug for RootDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootDatum({}, {})", self.cartan_type, self.lattice)
    }
}

impl PartialEq for RootDatum {
    fn eq(&self, other: &Self) -> bool {
        self.cartan_type == other.cartan_type && self.basis == other.basis
    }
}

fn euclidean_simple_roots(t: CartanType) -> Vec<Vec<i64>> {
    let n = t.rank;
    let unit = |dim: usize, i: usize| {
        let mut v = vec![0; dim];
        v[i] = 1;
        v
    };
    let diff = |dim: usize, i: usize, j: usize| {
        let mut v = unit(dim, i);
        v[j] -= 1;
        v
    };
    match t.family {
        Family::A => (0..n).map(|i| diff(n + 1, i, i + 1)).collect(),
        Family::B => {
            let mut r: Vec<_> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
            r.push(unit(n, n - 1));
            r
        }
        Family::C => {
            let mut r: Vec<_> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
            let mut last = unit(n, n - 1);
            last[n - 1] = 2;
            r.push(last);
            r
        }
        Family::D => {
            let mut r: Vec<_> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
            let mut last = unit(n, n - 1);
            last[n - 2] = 1;
            r.push(last);
            r
        }
        // α_1 short, α_2 long, in the plane x + y + z = 0.
        Family::G => vec![vec![1, -1, 0], vec![-2, 1, 1]],
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        _ => (0..n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor(m, 0, j))
            })
            .sum(),
    }
}

fn minor(m: &[Vec<i64>], row: usize, col: usize) -> Vec<Vec<i64>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect()
}

/// Adjugate: `m · adj(m) = det(m) · I`.
pub(crate) fn adjugate(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut adj = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[j][i] = sign * det(&minor(m, i, j));
        }
    }
    adj
}

fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    (0..n).map(|j| (0..n).map(|i| m[i][j]).collect()).collect()
}

/// Row vector times matrix.
fn row_times(v: &[i64], m: &[Vec<i64>]) -> Vec<i64> {
    let n = m[0].len();
    (0..n).map(|j| v.iter().zip(m).map(|(x, row)| x * row[j]).sum()).collect()
}

type Mat = [[i64; MAX_RANK]; MAX_RANK];

fn mat_identity(r: usize) -> Mat {
    let mut m = [[0; MAX_RANK]; MAX_RANK];
    for (i, row) in m.iter_mut().enumerate().take(r) {
        row[i] = 1;
    }
    m
}

fn mat_mul(a: &Mat, b: &Mat, r: usize) -> Mat {
    let mut out = [[0; MAX_RANK]; MAX_RANK];
    for i in 0..r {
        for j in 0..r {
            out[i][j] = (0..r).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

impl RootDatum {
    pub fn new(cartan_type: CartanType, lattice: LatticeSpec) -> Result<Self> {
        let r = cartan_type.rank;
        let eu = euclidean_simple_roots(cartan_type);
        let cartan: Vec<Vec<i64>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let num = 2 * dot(&eu[i], &eu[j]);
                        let den = dot(&eu[j], &eu[j]);
                        debug_assert_eq!(num % den, 0);
                        num / den
                    })
                    .collect()
            })
            .collect();

        // Rows of A^T are the simple coroots in fundamental-coweight coordinates.
        let cartan_t = transpose(&cartan);
        let basis = match &lattice {
            LatticeSpec::SimplyConnected => cartan_t.clone(),
            LatticeSpec::Adjoint => (0..r)
                .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
                .collect(),
            LatticeSpec::Explicit(rows) => {
                if rows.len() != r || rows.iter().any(|row| row.len() != r) {
                    return Err(Error::BadLattice(format!("basis must be {r}x{r}")));
                }
                rows.clone()
            }
        };
        let bdet = det(&basis);
        if bdet == 0 {
            return Err(Error::BadLattice("basis matrix is singular".into()));
        }
        let badj = adjugate(&basis);
        // Simple coroots in X_* coordinates: rows of A^T B^{-1}; integrality is Q∨ ⊆ X_*.
        let mut simple_coroots = Vec::with_capacity(r);
        for row in &cartan_t {
            let num = row_times(row, &badj);
            if num.iter().any(|x| x % bdet != 0) {
                return Err(Error::BadLattice(
                    "lattice does not contain the coroot lattice".into(),
                ));
            }
            simple_coroots.push(Coweight::new(&num.iter().map(|x| x / bdet).collect::<Vec<_>>()));
        }

        // ⟨α_i, λ⟩ = Σ_k λ_k B[k][i].
        let simple_fun: Vec<[i64; MAX_RANK]> = (0..r)
            .map(|i| {
                let mut f = [0; MAX_RANK];
                for k in 0..r {
                    f[k] = basis[k][i];
                }
                f
            })
            .collect();
        let reflections: Vec<Mat> = (0..r)
            .map(|i| {
                let mut m = mat_identity(r);
                for a in 0..r {
                    for b in 0..r {
                        m[a][b] -= simple_coroots[i].c[a] * simple_fun[i][b];
                    }
                }
                m
            })
            .collect();

        // Positive roots (simple-root coords) with their coroots (X_* coords).
        let mut found: HashMap<Vec<i64>, Coweight> = HashMap::new();
        let mut queue = VecDeque::new();
        for i in 0..r {
            let mut e = vec![0; r];
            e[i] = 1;
            found.insert(e.clone(), simple_coroots[i]);
            queue.push_back(e);
        }
        while let Some(root) = queue.pop_front() {
            let co = found[&root];
            for j in 0..r {
                let pairing: i64 = (0..r).map(|i| root[i] * cartan[i][j]).sum();
                let mut img = root.clone();
                img[j] -= pairing;
                if img.iter().all(|&x| x >= 0) && img.iter().any(|&x| x > 0) && !found.contains_key(&img) {
                    let co_img = apply_mat(&reflections[j], &co, r);
                    found.insert(img.clone(), co_img);
                    queue.push_back(img);
                }
            }
        }
        let mut pos_roots: Vec<Vec<i64>> = found.keys().cloned().collect();
        pos_roots.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let pos_coroots: Vec<Coweight> = pos_roots.iter().map(|a| found[a]).collect();
        let root_fun: Vec<[i64; MAX_RANK]> = pos_roots
            .iter()
            .map(|a| {
                let mut f = [0; MAX_RANK];
                for (i, &ai) in a.iter().enumerate() {
                    for k in 0..r {
                        f[k] += ai * simple_fun[i][k];
                    }
                }
                f
            })
            .collect();
        let simple_idx: Vec<usize> = (0..r)
            .map(|i| {
                pos_roots
                    .iter()
                    .position(|a| a.iter().enumerate().all(|(k, &x)| x == i64::from(k == i)))
                    .expect("simple root present")
            })
            .collect();
        let highest = pos_roots.len() - 1;
        let mut two_rho = [0; MAX_RANK];
        for f in &root_fun {
            for k in 0..r {
                two_rho[k] += f[k];
            }
        }

        let weyl = build_weyl(&reflections, &root_fun, r)?;

        let cartan_t_adj = adjugate(&cartan_t);
        let cartan_det = det(&cartan_t);

        let mut datum = RootDatum {
            cartan_type,
            lattice,
            rank: r,
            cartan,
            basis,
            pos_roots,
            root_fun,
            pos_coroots,
            simple_idx,
            highest,
            two_rho,
            cartan_t_adj,
            cartan_det,
            weyl,
            s_highest: WeylElt::IDENTITY,
            omega: Vec::new(),
            omega_keys: Vec::new(),
        };
        let hc = datum.pos_coroots[highest];
        datum.s_highest = datum.reflection_of(highest, hc);
        datum.init_omega();
        Ok(datum)
    }

    /// Parses `"A2"` and `"sc"`/`"ad"`/a JSON matrix.
    pub fn build(cartan_type: &str, lattice: &str) -> Result<Self> {
        RootDatum::new(cartan_type.parse()?, lattice.parse()?)
    }

    fn reflection_of(&self, root: usize, coroot: Coweight) -> WeylElt {
        let r = self.rank;
        let mut m = mat_identity(r);
        for a in 0..r {
            for b in 0..r {
                m[a][b] -= coroot.c[a] * self.root_fun[root][b];
            }
        }
        let idx = self
            .weyl
            .mats
            .iter()
            .position(|x| *x == m)
            .expect("reflection is in W");
        WeylElt(idx as u16)
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `cartan_matrix()[i][j] = ⟨α_i, α_j∨⟩`.
    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Basis of `X_*`, rows in fundamental-coweight coordinates.
    pub fn lattice_basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn num_pos_roots(&self) -> usize {
        self.pos_roots.len()
    }

    /// Positive roots in simple-root coordinates, ordered by height then
    /// reverse-lexicographically (so the simple roots come out as α_1..α_r).
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.pos_roots
    }

    pub fn positive_coroots(&self) -> &[Coweight] {
        &self.pos_coroots
    }

    pub fn coroot(&self, root_index: usize) -> Coweight {
        self.pos_coroots[root_index]
    }

    pub fn simple_root_index(&self, i: usize) -> usize {
        self.simple_idx[i]
    }

    pub fn simple_coroot(&self, i: usize) -> Coweight {
        self.pos_coroots[self.simple_idx[i]]
    }

    pub fn highest_root_index(&self) -> usize {
        self.highest
    }

    pub fn root_height(&self, root_index: usize) -> i64 {
        self.pos_roots[root_index].iter().sum()
    }

    pub fn zero(&self) -> Coweight {
        Coweight::zero(self.rank)
    }

    pub fn coweight(&self, coords: &[i64]) -> Result<Coweight> {
        if coords.len() != self.rank {
            return Err(Error::DatumMismatch(format!(
                "coweight has {} coordinates, datum has rank {}",
                coords.len(),
                self.rank
            )));
        }
        Ok(Coweight::new(coords))
    }

    /// `⟨α, λ⟩` for the positive root with the given index.
    pub fn pair(&self, root_index: usize, lambda: &Coweight) -> i64 {
        let f = &self.root_fun[root_index];
        (0..self.rank).map(|k| f[k] * lambda.c[k]).sum()
    }

    pub(crate) fn pair_fun(&self, f: &[i64; MAX_RANK], lambda: &Coweight) -> i64 {
        (0..self.rank).map(|k| f[k] * lambda.c[k]).sum()
    }

    pub fn pair_simple(&self, i: usize, lambda: &Coweight) -> i64 {
        self.pair(self.simple_idx[i], lambda)
    }

    /// `⟨2ρ, λ⟩`.
    pub fn two_rho_pair(&self, lambda: &Coweight) -> i64 {
        self.pair_fun(&self.two_rho, lambda)
    }

    pub fn two_rho(&self) -> &[i64] {
        &self.two_rho[..self.rank]
    }

    pub fn is_dominant(&self, lambda: &Coweight) -> bool {
        (0..self.rank).all(|i| self.pair_simple(i, lambda) >= 0)
    }

    /// Coordinates of λ in the basis of simple coroots, as `numerators / den`.
    pub(crate) fn coroot_coords(&self, lambda: &Coweight) -> (Vec<i64>, i64) {
        let p: Vec<i64> = (0..self.rank).map(|i| self.pair_simple(i, lambda)).collect();
        let num = row_times(&p, &self.cartan_t_adj);
        (num, self.cartan_det)
    }

    /// Coordinates of λ in the basis of simple coroots (exact rationals).
    pub fn simple_coroot_coords(&self, lambda: &Coweight) -> Vec<Ratio<i64>> {
        let (num, den) = self.coroot_coords(lambda);
        num.into_iter().map(|n| Ratio::new(n, den)).collect()
    }

    /// Class of λ in `X_*/Q∨`.
    pub(crate) fn omega_key(&self, lambda: &Coweight) -> Vec<i64> {
        let (num, den) = self.coroot_coords(lambda);
        num.into_iter().map(|n| n.mod_floor(&den.abs())).collect()
    }

    pub fn in_coroot_lattice(&self, lambda: &Coweight) -> bool {
        self.omega_key(lambda).iter().all(|&x| x == 0)
    }

    /// `λ ⪯ μ`: `μ − λ` is a non-negative integral combination of simple coroots.
    pub fn dominance_leq(&self, lambda: &Coweight, mu: &Coweight) -> bool {
        let (num, den) = self.coroot_coords(&(*mu - *lambda));
        num.iter().all(|&n| n % den == 0 && n / den >= 0)
    }

    /// Fundamental coweight `ω_i∨` if it lies in `X_*`.
    pub fn fundamental_coweight(&self, i: usize) -> Option<Coweight> {
        let mut e = vec![0; self.rank];
        e[i] = 1;
        let bdet = det(&self.basis);
        let num = row_times(&e, &adjugate(&self.basis));
        if num.iter().all(|x| x % bdet == 0) {
            Some(Coweight::new(&num.iter().map(|x| x / bdet).collect::<Vec<_>>()))
        } else {
            None
        }
    }

    // ---- Weyl group ----

    pub fn weyl_order(&self) -> usize {
        self.weyl.order()
    }

    pub fn weyl_elements(&self) -> impl Iterator<Item = WeylElt> {
        (0..self.weyl.order()).map(|i| WeylElt(i as u16))
    }

    pub fn simple_reflection(&self, i: usize) -> WeylElt {
        // BFS order puts s_1..s_r right after the identity.
        WeylElt((i + 1) as u16)
    }

    pub fn weyl_mul(&self, a: WeylElt, b: WeylElt) -> WeylElt {
        WeylElt(self.weyl.mul[a.index() * self.weyl.order() + b.index()])
    }

    pub fn weyl_inv(&self, a: WeylElt) -> WeylElt {
        WeylElt(self.weyl.inv[a.index()])
    }

    pub fn weyl_len(&self, a: WeylElt) -> usize {
        self.weyl.words[a.index()].len()
    }

    /// A reduced word, generator indices `1..=r`.
    pub fn weyl_word(&self, a: WeylElt) -> Vec<usize> {
        self.weyl.words[a.index()].iter().map(|&i| i as usize + 1).collect()
    }

    pub fn weyl_matrix(&self, a: WeylElt) -> Vec<Vec<i64>> {
        let m = &self.weyl.mats[a.index()];
        (0..self.rank).map(|i| m[i][..self.rank].to_vec()).collect()
    }

    pub fn weyl_from_word(&self, word: &[usize]) -> Result<WeylElt> {
        let mut w = WeylElt::IDENTITY;
        for &i in word {
            if i == 0 || i > self.rank {
                return Err(Error::Parse(format!("generator s{i} is not a finite simple reflection")));
            }
            w = self.weyl_mul(w, self.simple_reflection(i - 1));
        }
        Ok(w)
    }

    pub fn longest_element(&self) -> WeylElt {
        self.weyl_elements()
            .max_by_key(|&w| self.weyl_len(w))
            .expect("W is non-empty")
    }

    pub fn weyl_act(&self, w: WeylElt, lambda: &Coweight) -> Coweight {
        apply_mat(&self.weyl.mats[w.index()], lambda, self.rank)
    }

    /// Whether `α_j ∈ R_w`, i.e. `w^{-1} α_j < 0`.
    pub fn in_inversion_set(&self, w: WeylElt, root_index: usize) -> bool {
        self.weyl.neg[w.index()] >> root_index & 1 == 1
    }

    /// `R_w = {α > 0 : w^{-1}α < 0}` as positive-root indices.
    pub fn inversion_set(&self, w: WeylElt) -> Vec<usize> {
        (0..self.num_pos_roots())
            .filter(|&j| self.in_inversion_set(w, j))
            .collect()
    }

    /// Whether `w(α_j)` is a positive root.
    pub fn maps_positive(&self, w: WeylElt, root_index: usize) -> bool {
        !self.in_inversion_set(self.weyl_inv(w), root_index)
    }

    pub fn weyl_orbit(&self, lambda: &Coweight) -> Vec<Coweight> {
        let mut orbit: Vec<Coweight> = self.weyl_elements().map(|w| self.weyl_act(w, lambda)).collect();
        orbit.sort();
        orbit.dedup();
        orbit
    }

    pub fn stabilizer(&self, lambda: &Coweight) -> Vec<WeylElt> {
        self.weyl_elements()
            .filter(|&w| self.weyl_act(w, lambda) == *lambda)
            .collect()
    }

    /// `Σ_{w λ = λ} t^{l(w)}`; for λ = 0 this is `W(t)`.
    pub fn stabilizer_poincare(&self, lambda: &Coweight) -> IntPoly {
        let mut coeffs = vec![0i64; self.weyl_len(self.longest_element()) + 1];
        for w in self.stabilizer(lambda) {
            coeffs[self.weyl_len(w)] += 1;
        }
        IntPoly::from_i64(&coeffs)
    }

    pub fn poincare(&self) -> IntPoly {
        self.stabilizer_poincare(&self.zero())
    }

    /// The dominant element of the orbit of λ.
    pub fn dominant_representative(&self, lambda: &Coweight) -> Coweight {
        let mut cur = *lambda;
        'outer: loop {
            for i in 0..self.rank {
                let p = self.pair_simple(i, &cur);
                if p < 0 {
                    cur = cur - p * self.simple_coroot(i);
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    /// `{λ dominant : λ ⪯ μ}`, graded by `⟨2ρ, μ−λ⟩` then lexicographic.
    pub fn dominant_coweights_below(&self, mu: &Coweight) -> Result<Vec<Coweight>> {
        if !self.is_dominant(mu) {
            return Err(Error::NotDominant(format!("{mu:?}")));
        }
        // ⟨2ρ, α_i∨⟩ = 2, so Σ n_i ≤ ⟨2ρ, μ⟩ / 2.
        let budget = self.two_rho_pair(mu) / 2;
        let mut out = Vec::new();
        let mut n = vec![0i64; self.rank];
        loop {
            let mut lam = *mu;
            for (i, &k) in n.iter().enumerate() {
                lam = lam - k * self.simple_coroot(i);
            }
            if self.is_dominant(&lam) {
                out.push(lam);
            }
            // odometer over n with Σ n ≤ budget
            let mut pos = 0;
            loop {
                if pos == self.rank {
                    out.sort_by_key(|l| (self.two_rho_pair(&(*mu - *l)), *l));
                    return Ok(out);
                }
                n[pos] += 1;
                if n.iter().sum::<i64>() <= budget {
                    break;
                }
                n[pos] = 0;
                pos += 1;
            }
        }
    }

    /// All dominant coweights with `⟨2ρ, μ⟩ ≤ max_height`.
    pub fn dominant_coweights_up_to(&self, max_height: i64) -> Vec<Coweight> {
        // Dominant coweights are non-negative combinations of fundamental
        // coweights; ⟨2ρ, ω_i∨⟩ ≥ 1 bounds each coefficient.
        let r = self.rank;
        let bdet = det(&self.basis);
        let badj = adjugate(&self.basis);
        let mut out = Vec::new();
        let mut a = vec![0i64; r];
        loop {
            // λ in fundamental-coweight coords is `a`; convert to X_* coords.
            let num = row_times(&a, &badj);
            if num.iter().all(|x| x % bdet == 0) {
                let lam = Coweight::new(&num.iter().map(|x| x / bdet).collect::<Vec<_>>());
                if self.two_rho_pair(&lam) <= max_height {
                    out.push(lam);
                }
            }
            let mut pos = 0;
            loop {
                if pos == r {
                    out.sort_by_key(|l| (self.two_rho_pair(l), *l));
                    return out;
                }
                a[pos] += 1;
                if a[pos] <= max_height {
                    break;
                }
                a[pos] = 0;
                pos += 1;
            }
        }
    }
}

fn apply_mat(m: &Mat, lambda: &Coweight, r: usize) -> Coweight {
    let mut out = Coweight::zero(r);
    for i in 0..r {
        out.c[i] = (0..r).map(|j| m[i][j] * lambda.c[j]).sum();
    }
    out
}

fn build_weyl(reflections: &[Mat], root_fun: &[[i64; MAX_RANK]], r: usize) -> Result<WeylTable> {
    let mut index: HashMap<Mat, usize> = HashMap::new();
    let mut mats = vec![mat_identity(r)];
    let mut words: Vec<Vec<u8>> = vec![vec![]];
    index.insert(mat_identity(r), 0);
    // Generators first so that simple reflections get indices 1..=r.
    let mut head = 0;
    while head < mats.len() {
        let cur = mats[head];
        for (i, s) in reflections.iter().enumerate() {
            let next = mat_mul(&cur, s, r);
            if !index.contains_key(&next) {
                index.insert(next, mats.len());
                mats.push(next);
                let mut w = words[head].clone();
                w.push(i as u8);
                words.push(w);
            }
        }
        head += 1;
        if mats.len() > 50_000 {
            return Err(Error::Internal("Weyl group enumeration did not close".into()));
        }
    }
    let n = mats.len();
    let mut mul = vec![0u16; n * n];
    let mut inv = vec![0u16; n];
    for a in 0..n {
        for b in 0..n {
            let p = mat_mul(&mats[a], &mats[b], r);
            let idx = index[&p];
            mul[a * n + b] = idx as u16;
            if idx == 0 {
                inv[a] = b as u16;
            }
        }
    }
    // Functionals of all roots, for sign lookups.
    let mut root_lookup: HashMap<[i64; MAX_RANK], bool> = HashMap::new();
    for f in root_fun {
        root_lookup.insert(*f, true);
        let mut g = *f;
        for x in g.iter_mut() {
            *x = -*x;
        }
        root_lookup.insert(g, false);
    }
    let mut neg = vec![0u32; n];
    for w in 0..n {
        // (w^{-1}α)(λ) = α(w λ): functional f · M_w.
        let m = &mats[w];
        for (j, f) in root_fun.iter().enumerate() {
            let mut g = [0; MAX_RANK];
            for b in 0..r {
                g[b] = (0..r).map(|a| f[a] * m[a][b]).sum();
            }
            let positive = *root_lookup
                .get(&g)
                .ok_or_else(|| Error::Internal("Weyl image of a root is not a root".into()))?;
            if !positive {
                neg[w] |= 1 << j;
            }
        }
    }
    Ok(WeylTable { mats, words, mul, inv, neg })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(t: &str, l: &str) -> RootDatum {
        RootDatum::build(t, l).unwrap()
    }

    #[test]
    fn a1_sc_and_ad() {
        let sc = datum("A1", "sc");
        assert_eq!(sc.num_pos_roots(), 1);
        assert_eq!(sc.two_rho_pair(&sc.simple_coroot(0)), 2);
        assert_eq!(sc.pair(0, &sc.simple_coroot(0)), 2);

        let ad = datum("A1", "ad");
        let omega = Coweight::new(&[1]);
        assert_eq!(ad.simple_coroot(0), Coweight::new(&[2]));
        assert_eq!(ad.two_rho_pair(&omega), 1);
        assert_eq!(ad.pair(0, &omega), 1);
    }

    #[test]
    fn root_counts_and_rho() {
        for (t, n, w) in [
            ("A1", 1, 2),
            ("A2", 3, 6),
            ("B2", 4, 8),
            ("C2", 4, 8),
            ("G2", 6, 12),
            ("A3", 6, 24),
            ("B3", 9, 48),
            ("C3", 9, 48),
            ("D4", 12, 192),
            ("B4", 16, 384),
        ] {
            let d = datum(t, "sc");
            assert_eq!(d.num_pos_roots(), n, "{t}");
            assert_eq!(d.weyl_order(), w, "{t}");
            for i in 0..d.rank() {
                assert_eq!(d.two_rho_pair(&d.simple_coroot(i)), 2, "{t}");
                for j in 0..d.rank() {
                    assert_eq!(d.pair_simple(i, &d.simple_coroot(j)), d.cartan_matrix()[i][j]);
                }
            }
            let a = d.cartan_matrix();
            for i in 0..d.rank() {
                assert_eq!(a[i][i], 2);
                for j in 0..d.rank() {
                    if i != j {
                        assert!(a[i][j] <= 0);
                    }
                }
            }
        }
    }

    #[test]
    fn g2_has_trivial_fundamental_group() {
        let d = datum("G2", "sc");
        assert_eq!(d.num_pos_roots(), 6);
        for i in 0..2 {
            assert!(d.fundamental_coweight(i).is_some());
        }
        assert_eq!(d.omega.len(), 1);
    }

    #[test]
    fn a2_pairing_and_reflections() {
        let d = datum("A2", "sc");
        let a1 = d.simple_coroot(0);
        let a2 = d.simple_coroot(1);
        assert_eq!(d.pair_simple(0, &a2), -1);
        let s1 = d.simple_reflection(0);
        assert_eq!(d.weyl_act(s1, &a1), -a1);
        assert_eq!(d.weyl_act(s1, &a2), a1 + a2);
        assert_eq!(d.weyl_act(WeylElt::IDENTITY, &a2), a2);
    }

    #[test]
    fn dominance_examples() {
        let d = datum("A1", "sc");
        let a = d.simple_coroot(0);
        assert!(d.dominance_leq(&d.zero(), &a));
        assert!(!d.dominance_leq(&a, &d.zero()));
        let d = datum("A2", "sc");
        let (a1, a2) = (d.simple_coroot(0), d.simple_coroot(1));
        assert!(d.dominance_leq(&d.zero(), &(a1 + a2)));
        assert!(!d.dominance_leq(&a1, &a2));
    }

    #[test]
    fn dominant_below_examples() {
        let d = datum("A1", "sc");
        let a = d.simple_coroot(0);
        assert_eq!(d.dominant_coweights_below(&a).unwrap(), vec![a, d.zero()]);
        assert_eq!(d.dominant_coweights_below(&d.zero()).unwrap(), vec![d.zero()]);
        assert!(d.dominant_coweights_below(&-a).is_err());
        let d = datum("A2", "sc");
        let th = d.simple_coroot(0) + d.simple_coroot(1);
        assert_eq!(d.dominant_coweights_below(&th).unwrap(), vec![th, d.zero()]);
    }

    #[test]
    fn poincare_examples() {
        let d = datum("A1", "sc");
        assert_eq!(d.poincare(), IntPoly::from_i64(&[1, 1]));
        assert_eq!(d.stabilizer_poincare(&d.simple_coroot(0)), IntPoly::one());
        let d = datum("A2", "sc");
        assert_eq!(d.poincare(), IntPoly::from_i64(&[1, 2, 2, 1]));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RootDatum::build("E6", "sc").is_err());
        assert!(RootDatum::build("A5", "sc").is_err());
        assert!(RootDatum::build("B1", "sc").is_err());
        // ω/2 is not in P∨.
        assert!(RootDatum::build("A1", "[[2]]").is_ok());
        assert!(RootDatum::build("A1", "[[4]]").is_err());
        assert!(RootDatum::build("A2", "[[1,0],[0,0]]").is_err());
    }

    #[test]
    fn orbit_stabilizer() {
        for t in ["A2", "B2", "G2"] {
            let d = datum(t, "ad");
            for lam in d.dominant_coweights_up_to(6) {
                for w in d.weyl_elements() {
                    let x = d.weyl_act(w, &lam);
                    assert_eq!(d.weyl_orbit(&x).len() * d.stabilizer(&x).len(), d.weyl_order());
                }
            }
        }
    }
}
