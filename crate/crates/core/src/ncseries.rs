//! Truncated noncommutative power series in `X`, `Y` over `Q[eps]/(eps^2)`,
//! and the derivative-of-exponential identity
//! `e^{-X} e^{X + eps Y} = 1 + eps ((1 - e^{-ad_X})/ad_X)(Y)`
//! checked both on words and on nilpotent matrices.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::charclass::SeriesSpec;
use crate::cohring::exp_coefficients;
use crate::error::{Error, Result};
use crate::exactnum::{int, rational_to_json, Rational};

pub const DEFAULT_TRUNCATION: usize = 6;
pub const MAX_TRUNCATION: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X,
    Y,
}

pub type Word = Vec<Letter>;

/// Key of a term: whether it carries `eps`, and its word.
type Key = (bool, Word);

/// A noncommutative polynomial with words of length at most `trunc`.
/// `eps` is central with `eps^2 = 0`, tracked as a flag on each term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCPoly {
    trunc: usize,
    terms: BTreeMap<Key, Rational>,
}

impl NCPoly {
    pub fn zero(trunc: usize) -> Self {
        NCPoly { trunc, terms: BTreeMap::new() }
    }

    pub fn constant(trunc: usize, c: Rational) -> Self {
        let mut p = Self::zero(trunc);
        p.add_term((false, Vec::new()), c);
        p
    }

    pub fn one(trunc: usize) -> Self {
        Self::constant(trunc, Rational::one())
    }

    pub fn letter(trunc: usize, l: Letter) -> Self {
        let mut p = Self::zero(trunc);
        if trunc >= 1 {
            p.add_term((false, vec![l]), Rational::one());
        }
        p
    }

    pub fn x(trunc: usize) -> Self {
        Self::letter(trunc, Letter::X)
    }

    pub fn y(trunc: usize) -> Self {
        Self::letter(trunc, Letter::Y)
    }

    /// Builds a single term; words longer than `trunc` give zero.
    pub fn term(trunc: usize, eps: bool, word: &[Letter], c: Rational) -> Self {
        let mut p = Self::zero(trunc);
        if word.len() <= trunc {
            p.add_term((eps, word.to_vec()), c);
        }
        p
    }

    fn add_term(&mut self, key: Key, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn truncation(&self) -> usize {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (bool, &Word, &Rational)> {
        self.terms.iter().map(|((e, w), c)| (*e, w, c))
    }

    pub fn coeff(&self, eps: bool, word: &[Letter]) -> Rational {
        self.terms.get(&(eps, word.to_vec())).cloned().unwrap_or_else(Rational::zero)
    }

    /// True if some term has a word of exactly this length.
    pub fn has_word_of_length(&self, len: usize) -> bool {
        self.terms.keys().any(|(_, w)| w.len() == len)
    }

    fn check(&self, other: &NCPoly) -> Result<()> {
        if self.trunc == other.trunc {
            Ok(())
        } else {
            Err(Error::TruncationMismatch)
        }
    }

    pub fn checked_add(&self, other: &NCPoly) -> Result<NCPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &NCPoly) -> Result<NCPoly> {
        self.checked_add(&other.scale(&int(-1)))
    }

    pub fn checked_mul(&self, other: &NCPoly) -> Result<NCPoly> {
        self.check(other)?;
        let mut out = Self::zero(self.trunc);
        for ((ea, wa), ca) in &self.terms {
            for ((eb, wb), cb) in &other.terms {
                if (*ea && *eb) || wa.len() + wb.len() > self.trunc {
                    continue;
                }
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_term((*ea || *eb, w), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, r: &Rational) -> NCPoly {
        let mut out = Self::zero(self.trunc);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * r);
        }
        out
    }

    /// Multiplication by `eps`.
    pub fn times_epsilon(&self) -> NCPoly {
        let terms =
            self.terms.iter().filter(|((e, _), _)| !e).map(|((_, w), c)| ((true, w.clone()), c.clone())).collect();
        NCPoly { trunc: self.trunc, terms }
    }

    /// `sum_j a^j / j!`; `a` must have no plain constant term (an
    /// `eps`-constant is allowed).
    pub fn exp(&self) -> Result<NCPoly> {
        if !self.coeff(false, &[]).is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        // One extra power: an eps-constant times `trunc` letters still survives.
        let coeffs = exp_coefficients(self.trunc + 1);
        let mut sum = Self::zero(self.trunc);
        let mut power = Self::one(self.trunc);
        for c in &coeffs {
            sum = &sum + &power.scale(c);
            power = &power * self;
            if power.is_zero() {
                break;
            }
        }
        Ok(sum)
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(a: &NCPoly, b: &NCPoly) -> Result<NCPoly> {
        a.checked_mul(b)?.checked_sub(&b.checked_mul(a)?)
    }

    /// Evaluates at `X -> a`, `Y -> b`, `eps -> eps` over `Q[eps]/(eps^2)`.
    pub fn evaluate(&self, a: &Matrix, b: &Matrix) -> Result<DualMatrix> {
        if a.size() != b.size() {
            return Err(Error::InvalidArgument("matrix sizes differ".into()));
        }
        let n = a.size();
        let mut out = DualMatrix::zero(n);
        for ((eps, w), c) in &self.terms {
            let mut m = Matrix::identity(n);
            for l in w {
                m = m.mul(match l {
                    Letter::X => a,
                    Letter::Y => b,
                });
            }
            let m = m.scale(c);
            if *eps {
                out.eps = out.eps.add(&m);
            } else {
                out.re = out.re.add(&m);
            }
        }
        Ok(out)
    }
}

impl NCPoly {
    /// `{"trunc": N, "terms": [{"eps", "word", "coeff"}]}` in key order.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|((eps, w), c)| json!({"eps": eps, "word": word_string(w), "coeff": rational_to_json(c)}))
            .collect();
        json!({"trunc": self.trunc, "terms": terms})
    }
}

fn word_string(w: &[Letter]) -> String {
    w.iter().map(|l| if *l == Letter::X { 'X' } else { 'Y' }).collect()
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((eps, w), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if *eps {
                write!(f, "e")?;
            }
            write!(f, "{}", word_string(w))?;
        }
        Ok(())
    }
}

macro_rules! nc_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&NCPoly> for &NCPoly {
            type Output = NCPoly;
            fn $method(self, rhs: &NCPoly) -> NCPoly {
                self.$checked(rhs).expect("truncation orders differ")
            }
        }
    };
}

nc_binop!(Add, add, checked_add);
nc_binop!(Sub, sub, checked_sub);
nc_binop!(Mul, mul, checked_mul);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NcOp {
    Add,
    Mul,
}

pub fn nc_arith(a: &NCPoly, b: &NCPoly, op: NcOp) -> Result<NCPoly> {
    match op {
        NcOp::Add => a.checked_add(b),
        NcOp::Mul => a.checked_mul(b),
    }
}

pub fn nc_exp(a: &NCPoly) -> Result<NCPoly> {
    a.exp()
}

/// `f(ad_X)(Y) = sum_j f_j ad_X^j(Y)` truncated at word length `trunc`.
pub fn ad_series_apply(f: &[Rational], trunc: usize) -> NCPoly {
    let x = NCPoly::x(trunc);
    let mut ad = NCPoly::y(trunc);
    let mut out = NCPoly::zero(trunc);
    for c in f {
        if ad.is_zero() {
            break;
        }
        out = &out + &ad.scale(c);
        ad = NCPoly::commutator(&x, &ad).expect("same truncation");
    }
    out
}

/// `(e^{-X} e^{X + eps Y}, 1 + eps f(ad_X)(Y))` for an arbitrary series `f`.
pub fn dexp_sides_with(f: &[Rational], trunc: usize) -> Result<(NCPoly, NCPoly)> {
    let x = NCPoly::x(trunc);
    let y = NCPoly::y(trunc);
    let lhs = x.scale(&int(-1)).exp()?.checked_mul(&(&x + &y.times_epsilon()).exp()?)?;
    let rhs = &NCPoly::one(trunc) + &ad_series_apply(f, trunc).times_epsilon();
    Ok((lhs, rhs))
}

/// `e^{-X} e^{X + eps Y} - 1 - eps f(ad_X)(Y)` for an arbitrary series `f`.
pub fn dexp_residual_with(f: &[Rational], trunc: usize) -> Result<NCPoly> {
    let (lhs, rhs) = dexp_sides_with(f, trunc)?;
    lhs.checked_sub(&rhs)
}

fn check_truncation(trunc: usize) -> Result<()> {
    if (1..=MAX_TRUNCATION).contains(&trunc) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("truncation must lie in 1..={MAX_TRUNCATION}")))
    }
}

/// Both sides of the identity on words of length at most `trunc`.
pub fn dexp_sides(trunc: usize) -> Result<(NCPoly, NCPoly)> {
    check_truncation(trunc)?;
    dexp_sides_with(SeriesSpec::inv_todd(trunc).coeffs(), trunc)
}

/// Residual of the identity with `f = (1 - e^{-t})/t`; zero iff it holds
/// through word length `trunc`.
pub fn dexp_identity_check(trunc: usize) -> Result<NCPoly> {
    check_truncation(trunc)?;
    dexp_residual_with(SeriesSpec::inv_todd(trunc).coeffs(), trunc)
}

/// Dense square matrix over `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zero(n: usize) -> Self {
        Matrix { n, data: vec![Rational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix must be square".into()));
        }
        Ok(Matrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, r: &Rational) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|a| a * r).collect() }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.data
                .chunks(self.n.max(1))
                .take(self.n)
                .map(|row| Value::Array(row.iter().map(rational_to_json).collect()))
                .collect(),
        )
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.data[k * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

/// `re + eps * eps_part` with matrix entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualMatrix {
    pub re: Matrix,
    pub eps: Matrix,
}

impl DualMatrix {
    pub fn zero(n: usize) -> Self {
        DualMatrix { re: Matrix::zero(n), eps: Matrix::zero(n) }
    }

    pub fn identity(n: usize) -> Self {
        DualMatrix { re: Matrix::identity(n), eps: Matrix::zero(n) }
    }

    pub fn mul(&self, o: &DualMatrix) -> DualMatrix {
        DualMatrix { re: self.re.mul(&o.re), eps: self.re.mul(&o.eps).add(&self.eps.mul(&o.re)) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }

    pub fn to_json(&self) -> Value {
        json!({"re": self.re.to_json(), "eps": self.eps.to_json()})
    }

    /// Exact exponential of a nilpotent dual matrix: the sum stops once a
    /// power vanishes, which happens by `size()` for strictly upper
    /// triangular input.
    fn exp_nilpotent(&self) -> DualMatrix {
        let n = self.re.size();
        let mut sum = DualMatrix::identity(n);
        let mut power = DualMatrix::identity(n);
        let mut j = 0i64;
        loop {
            j += 1;
            power = power.mul(self);
            if power.is_zero() {
                return sum;
            }
            let inv = Rational::new(1.into(), j.into());
            power = DualMatrix { re: power.re.scale(&inv), eps: power.eps.scale(&inv) };
            sum = DualMatrix { re: sum.re.add(&power.re), eps: sum.eps.add(&power.eps) };
        }
    }
}

/// A strictly upper triangular rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentMatrix(Matrix);

impl NilpotentMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        let n = m.size();
        for i in 0..n {
            for j in 0..=i {
                if !m.get(i, j).is_zero() {
                    return Err(Error::NotStrictlyUpperTriangular);
                }
            }
        }
        Ok(NilpotentMatrix(m))
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }
}

/// Both sides of the identity at `X`, `Y`: `(e^{-X} e^{X + eps Y}, 1 + eps f(ad_X)(Y))`.
pub fn matrix_dexp_sides(x: &NilpotentMatrix, y: &NilpotentMatrix) -> Result<(DualMatrix, DualMatrix)> {
    let n = x.size();
    if y.size() != n {
        return Err(Error::InvalidArgument("matrix sizes differ".into()));
    }
    let (xm, ym) = (x.matrix(), y.matrix());
    let minus_x = DualMatrix { re: xm.scale(&int(-1)), eps: Matrix::zero(n) };
    let shifted = DualMatrix { re: xm.clone(), eps: ym.clone() };
    let lhs = minus_x.exp_nilpotent().mul(&shifted.exp_nilpotent());

    // ad_X raises the superdiagonal level of Y, so ad_X^{n-1}(Y) = 0.
    let f = SeriesSpec::inv_todd(n);
    let mut ad = ym.clone();
    let mut series = Matrix::zero(n);
    for c in f.coeffs() {
        if ad.is_zero() {
            break;
        }
        series = series.add(&ad.scale(c));
        ad = xm.mul(&ad).sub(&ad.mul(xm));
    }
    let rhs = DualMatrix { re: Matrix::identity(n), eps: series };
    Ok((lhs, rhs))
}

pub fn matrix_dexp_check(x: &NilpotentMatrix, y: &NilpotentMatrix) -> Result<bool> {
    let (lhs, rhs) = matrix_dexp_sides(x, y)?;
    Ok(lhs == rhs)
}
