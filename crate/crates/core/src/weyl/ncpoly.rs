use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::exact::{int, MPoly, Rat, RatFun, Registry};

/// Largest matrix size accepted by the Weyl-mode builders.
pub const MAX_N: usize = 4;

/// Coefficient variables shared by every noncommutative polynomial.
pub fn weyl_registry() -> &'static Arc<Registry> {
    static REG: OnceLock<Arc<Registry>> = OnceLock::new();
    REG.get_or_init(|| {
        Registry::new(&["zeta", "t", "hbar", "theta", "theta0", "theta1", "theta2", "thetat", "k"])
    })
}

/// Coefficient variable by name.
pub fn cvar(name: &str) -> RatFun {
    RatFun::from_poly(MPoly::var_named(weyl_registry(), name).expect("weyl coefficient variable"))
}

pub fn cconst(c: Rat) -> RatFun {
    RatFun::constant(weyl_registry(), c)
}

pub fn cint(n: i64) -> RatFun {
    cconst(int(n))
}

/// Generator letters. `Q < P`, and within a kind the order is by `(row, col)`,
/// which is exactly the normal order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Letter {
    Q(u8, u8),
    P(u8, u8),
    /// Abstract noncommuting position symbol.
    FreeQ,
    /// Abstract noncommuting momentum symbol.
    FreeP,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Q(i, j) => write!(f, "q[{}][{}]", i + 1, j + 1),
            Letter::P(i, j) => write!(f, "p[{}][{}]", i + 1, j + 1),
            Letter::FreeQ => write!(f, "Q"),
            Letter::FreeP => write!(f, "P"),
        }
    }
}

pub type Word = Vec<Letter>;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    /// Matrix-entry generators with `[p_ij, q_kl] = hbar δ_il δ_jk`.
    Weyl,
    /// Matrix-entry generators commuting with each other.
    Classical,
    /// Abstract letters `P`, `Q` in a free algebra.
    Free,
}

/// Noncommutative polynomial with rational-function coefficients.
#[derive(Clone)]
pub struct NCPoly {
    n: usize,
    mode: Mode,
    terms: BTreeMap<Word, RatFun>,
}

impl NCPoly {
    pub fn zero(n: usize, mode: Mode) -> NCPoly {
        NCPoly { n, mode, terms: BTreeMap::new() }
    }

    pub fn scalar(n: usize, mode: Mode, c: RatFun) -> NCPoly {
        let mut p = NCPoly::zero(n, mode);
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one(n: usize, mode: Mode) -> NCPoly {
        NCPoly::scalar(n, mode, cint(1))
    }

    pub fn letter(n: usize, mode: Mode, l: Letter) -> NCPoly {
        let mut p = NCPoly::zero(n, mode);
        p.add_term(vec![l], cint(1));
        p
    }

    pub fn q(n: usize, mode: Mode, i: usize, j: usize) -> NCPoly {
        NCPoly::letter(n, mode, Letter::Q(i as u8, j as u8))
    }

    pub fn p(n: usize, mode: Mode, i: usize, j: usize) -> NCPoly {
        NCPoly::letter(n, mode, Letter::P(i as u8, j as u8))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn terms(&self) -> &BTreeMap<Word, RatFun> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[Letter]) -> RatFun {
        self.terms.get(w).cloned().unwrap_or_else(|| RatFun::zero(weyl_registry()))
    }

    pub(crate) fn add_term(&mut self, mut w: Word, c: RatFun) {
        if c.is_zero() {
            return;
        }
        if self.mode == Mode::Classical {
            w.sort();
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    fn check(&self, other: &NCPoly) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Usage(format!("matrix size mismatch: {} vs {}", self.n, other.n)));
        }
        if self.mode != other.mode {
            return Err(Error::Usage("operands live in different algebras".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &NCPoly) -> NCPoly {
        self.check(other).expect("NCPoly operands");
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NCPoly) -> NCPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NCPoly {
        NCPoly {
            n: self.n,
            mode: self.mode,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &RatFun) -> NCPoly {
        let mut out = NCPoly::zero(self.n, self.mode);
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v.mul(c));
        }
        out
    }

    pub fn scale_rat(&self, c: &Rat) -> NCPoly {
        self.scale(&cconst(c.clone()))
    }

    /// Word concatenation product (sorted in classical mode, not normal ordered otherwise).
    pub fn mul(&self, other: &NCPoly) -> NCPoly {
        self.check(other).expect("NCPoly operands");
        let mut out = NCPoly::zero(self.n, self.mode);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, ca.mul(cb));
            }
        }
        out
    }

    /// Checked product.
    pub fn try_mul(&self, other: &NCPoly) -> Result<NCPoly> {
        self.check(other)?;
        Ok(self.mul(other))
    }

    /// Canonical form: q-letters left of p-letters, both blocks sorted.
    pub fn normal_order(&self) -> Result<NCPoly> {
        match self.mode {
            Mode::Free => Err(Error::UnsupportedMode("normal ordering is undefined for free symbols".into())),
            Mode::Classical => Ok(self.clone()),
            Mode::Weyl => {
                let hbar = cvar("hbar");
                let mut out = NCPoly::zero(self.n, self.mode);
                for (w, c) in &self.terms {
                    for (nw, counts) in normal_word(w) {
                        let mut k = RatFun::zero(weyl_registry());
                        for (pow, cnt) in counts.iter().enumerate() {
                            if *cnt != 0 {
                                k = k.add(&hbar.pow(pow as u32).scale(&int(*cnt)));
                            }
                        }
                        out.add_term(nw, c.mul(&k));
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn is_normal(&self) -> bool {
        match self.mode {
            Mode::Free => false,
            _ => self.terms.keys().all(|w| w.windows(2).all(|x| x[0] <= x[1])),
        }
    }

    /// Maps every coefficient.
    pub fn map_coeffs<F: Fn(&RatFun) -> RatFun>(&self, f: F) -> NCPoly {
        let mut out = NCPoly::zero(self.n, self.mode);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// Substitutes a rational value for a coefficient variable.
    pub fn subst_coeff(&self, name: &str, v: &Rat) -> Result<NCPoly> {
        let i = weyl_registry().index(name).ok_or_else(|| Error::Usage(format!("unknown coefficient `{name}`")))?;
        let mut out = NCPoly::zero(self.n, self.mode);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.subst_value(i, v)?);
        }
        Ok(out)
    }

    /// Same polynomial in another mode (words are kept, sorted if classical).
    pub fn with_mode(&self, mode: Mode) -> NCPoly {
        let mut out = NCPoly::zero(self.n, mode);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    /// Derivative of a classical polynomial with respect to one letter.
    pub fn classical_partial(&self, l: Letter) -> Result<NCPoly> {
        if self.mode != Mode::Classical {
            return Err(Error::UnsupportedMode("letter derivatives need classical mode".into()));
        }
        let mut out = NCPoly::zero(self.n, self.mode);
        for (w, c) in &self.terms {
            let k = w.iter().filter(|x| **x == l).count();
            if k == 0 {
                continue;
            }
            let pos = w.iter().position(|x| *x == l).unwrap();
            let mut w2 = w.clone();
            w2.remove(pos);
            out.add_term(w2, c.scale(&int(k as i64)));
        }
        Ok(out)
    }

    /// First word (in term order) whose coefficient differs between the two.
    pub fn first_difference(&self, other: &NCPoly) -> Option<(Word, RatFun, RatFun)> {
        let d = self.sub(other);
        d.terms.iter().next().map(|(w, _)| (w.clone(), self.coeff(w), other.coeff(w)))
    }
}

impl PartialEq for NCPoly {
    fn eq(&self, other: &NCPoly) -> bool {
        self.n == other.n && self.mode == other.mode && self.sub(other).is_zero()
    }
}

pub fn fmt_word(w: &[Letter]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("*")
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({c})*{}", fmt_word(w))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NCPoly[{}]({self})", self.n)
    }
}

/// Expands a word into normal-ordered words; counts are indexed by the power of hbar.
fn normal_word(w: &[Letter]) -> BTreeMap<Word, Vec<i64>> {
    // State: normal words as (q block, p block).
    let mut state: BTreeMap<(Word, Word), Vec<i64>> = BTreeMap::new();
    state.insert((Vec::new(), Vec::new()), vec![1]);
    for &x in w {
        let mut next: BTreeMap<(Word, Word), Vec<i64>> = BTreeMap::new();
        for ((qs, ps), cnt) in state {
            match x {
                Letter::P(..) => {
                    let mut ps2 = ps.clone();
                    insert_sorted(&mut ps2, x);
                    accumulate(&mut next, (qs, ps2), &cnt, 0);
                }
                Letter::Q(c, d) => {
                    for (k, pk) in ps.iter().enumerate() {
                        if let Letter::P(a, b) = *pk {
                            if a == d && b == c {
                                let mut ps2 = ps.clone();
                                ps2.remove(k);
                                accumulate(&mut next, (qs.clone(), ps2), &cnt, 1);
                            }
                        }
                    }
                    let mut qs2 = qs;
                    insert_sorted(&mut qs2, x);
                    accumulate(&mut next, (qs2, ps), &cnt, 0);
                }
                Letter::FreeP | Letter::FreeQ => unreachable!("free letter in Weyl mode"),
            }
        }
        state = next;
    }
    state
        .into_iter()
        .filter(|(_, c)| c.iter().any(|v| *v != 0))
        .map(|((mut qs, ps), c)| {
            qs.extend(ps);
            (qs, c)
        })
        .collect()
}

fn insert_sorted(v: &mut Word, x: Letter) {
    let pos = v.partition_point(|y| *y <= x);
    v.insert(pos, x);
}

fn accumulate(map: &mut BTreeMap<(Word, Word), Vec<i64>>, key: (Word, Word), cnt: &[i64], shift: usize) {
    let e = map.entry(key).or_default();
    if e.len() < cnt.len() + shift {
        e.resize(cnt.len() + shift, 0);
    }
    for (i, c) in cnt.iter().enumerate() {
        e[i + shift] += c;
    }
}

/// Normal-ordered commutator `[a, b] = ab − ba`.
pub fn commutator(a: &NCPoly, b: &NCPoly) -> Result<NCPoly> {
    a.check(b)?;
    match a.mode {
        Mode::Free => Ok(a.mul(b).sub(&b.mul(a))),
        _ => a.mul(b).sub(&b.mul(a)).normal_order(),
    }
}

/// Anticommutator `ab + ba` (not normal ordered).
pub fn anticommutator(a: &NCPoly, b: &NCPoly) -> NCPoly {
    a.mul(b).add(&b.mul(a))
}

/// Classical bracket with `{p_ab, q_cd} = δ_ad δ_bc`.
pub fn classical_bracket(f: &NCPoly, g: &NCPoly) -> Result<NCPoly> {
    f.check(g)?;
    if f.mode != Mode::Classical {
        return Err(Error::UnsupportedMode("classical bracket needs classical mode".into()));
    }
    let n = f.n;
    let mut out = NCPoly::zero(n, Mode::Classical);
    for a in 0..n {
        for b in 0..n {
            let p = Letter::P(a as u8, b as u8);
            let q = Letter::Q(b as u8, a as u8);
            let t1 = f.classical_partial(p)?.mul(&g.classical_partial(q)?);
            let t2 = f.classical_partial(q)?.mul(&g.classical_partial(p)?);
            out = out.add(&t1).sub(&t2);
        }
    }
    Ok(out)
}

/// Rectangular matrix of noncommutative polynomials.
#[derive(Clone, PartialEq)]
pub struct NCMatrix {
    rows: usize,
    cols: usize,
    n: usize,
    mode: Mode,
    entries: Vec<NCPoly>,
}

impl NCMatrix {
    pub fn zero(rows: usize, cols: usize, n: usize, mode: Mode) -> NCMatrix {
        NCMatrix { rows, cols, n, mode, entries: vec![NCPoly::zero(n, mode); rows * cols] }
    }

    pub fn identity(size: usize, n: usize, mode: Mode) -> NCMatrix {
        let mut m = NCMatrix::zero(size, size, n, mode);
        for i in 0..size {
            m.set(i, i, NCPoly::one(n, mode));
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<NCPoly>) -> Result<NCMatrix> {
        if entries.len() != rows * cols || entries.is_empty() {
            return Err(Error::Usage("matrix entry count does not match its shape".into()));
        }
        let (n, mode) = (entries[0].n, entries[0].mode);
        for e in &entries {
            if e.n != n || e.mode != mode {
                return Err(Error::Usage("matrix entries live in different algebras".into()));
            }
        }
        Ok(NCMatrix { rows, cols, n, mode, entries })
    }

    /// The matrix of momentum generators `p_ij`.
    pub fn p(n: usize, mode: Mode) -> NCMatrix {
        NCMatrix::generators(n, mode, false)
    }

    /// The matrix of position generators `q_ij`.
    pub fn q(n: usize, mode: Mode) -> NCMatrix {
        NCMatrix::generators(n, mode, true)
    }

    fn generators(n: usize, mode: Mode, is_q: bool) -> NCMatrix {
        if mode == Mode::Free {
            let l = if is_q { Letter::FreeQ } else { Letter::FreeP };
            return NCMatrix { rows: 1, cols: 1, n: 1, mode, entries: vec![NCPoly::letter(1, mode, l)] };
        }
        let mut m = NCMatrix::zero(n, n, n, mode);
        for i in 0..n {
            for j in 0..n {
                let e = if is_q { NCPoly::q(n, mode, i, j) } else { NCPoly::p(n, mode, i, j) };
                m.set(i, j, e);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn get(&self, i: usize, j: usize) -> &NCPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: NCPoly) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[NCPoly] {
        &self.entries
    }

    pub fn map<F: Fn(&NCPoly) -> NCPoly>(&self, f: F) -> NCMatrix {
        NCMatrix { entries: self.entries.iter().map(f).collect(), ..self.clone() }
    }

    pub fn try_map<F: Fn(&NCPoly) -> Result<NCPoly>>(&self, f: F) -> Result<NCMatrix> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(NCMatrix { entries, ..self.clone() })
    }

    fn check_same(&self, other: &NCMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Usage("matrix shape mismatch".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &NCMatrix) -> NCMatrix {
        self.check_same(other).expect("matrix shapes");
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect();
        NCMatrix { entries, ..self.clone() }
    }

    pub fn sub(&self, other: &NCMatrix) -> NCMatrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NCMatrix {
        self.map(|e| e.neg())
    }

    pub fn scale(&self, c: &RatFun) -> NCMatrix {
        self.map(|e| e.scale(c))
    }

    pub fn mul(&self, other: &NCMatrix) -> NCMatrix {
        self.try_mul(other).expect("matrix shapes")
    }

    pub fn try_mul(&self, other: &NCMatrix) -> Result<NCMatrix> {
        if self.cols != other.rows {
            return Err(Error::Usage(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = NCMatrix::zero(self.rows, other.cols, self.n, self.mode);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = NCPoly::zero(self.n, self.mode);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> NCPoly {
        let mut acc = NCPoly::zero(self.n, self.mode);
        for i in 0..self.rows.min(self.cols) {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    pub fn normal_order(&self) -> Result<NCMatrix> {
        self.try_map(|e| e.normal_order())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }
}

impl fmt::Debug for NCMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "NCMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                writeln!(f, "  [{i}][{j}] = {}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

/// Entrywise normal-ordered commutator `[h, X]`.
pub fn commutator_matrix(h: &NCPoly, x: &NCMatrix) -> Result<NCMatrix> {
    x.try_map(|e| commutator(h, e))
}

/// Product of `p`/`q` matrices spelled by a string such as `"qpq"`; empty is the identity.
pub fn matrix_word(n: usize, mode: Mode, spelling: &str) -> Result<NCMatrix> {
    let size = if mode == Mode::Free { 1 } else { n };
    let nn = if mode == Mode::Free { 1 } else { n };
    let mut acc = NCMatrix::identity(size, nn, mode);
    let (p, q) = (NCMatrix::p(n, mode), NCMatrix::q(n, mode));
    for ch in spelling.chars() {
        acc = match ch {
            'p' => acc.mul(&p),
            'q' => acc.mul(&q),
            _ => return Err(Error::Parse(format!("unexpected symbol `{ch}` in matrix word"))),
        };
    }
    Ok(acc)
}

/// `Tr` of a matrix word.
pub fn trace_word(n: usize, mode: Mode, spelling: &str) -> Result<NCPoly> {
    Ok(matrix_word(n, mode, spelling)?.trace())
}

/// Linear combination of matrix words.
pub fn matrix_combination(n: usize, mode: Mode, parts: &[(RatFun, &str)]) -> Result<NCMatrix> {
    let size = if mode == Mode::Free { 1 } else { n };
    let nn = if mode == Mode::Free { 1 } else { n };
    let mut acc = NCMatrix::zero(size, size, nn, mode);
    for (c, s) in parts {
        acc = acc.add(&matrix_word(n, mode, s)?.scale(c));
    }
    Ok(acc)
}

/// Linear combination of traces of matrix words.
pub fn trace_combination(n: usize, mode: Mode, parts: &[(RatFun, &str)]) -> Result<NCPoly> {
    Ok(matrix_combination(n, mode, parts)?.trace())
}

pub fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::Usage(format!("matrix size must be between 1 and {MAX_N}, got {n}")));
    }
    Ok(())
}
