//! Exact scalars: rationals and elements of simple extensions `Q[z]/(p(z))`.
//!
//! A [`Scalar`] is a residue class modulo a caller-supplied monic polynomial.
//! The modulus is assumed irreducible whenever inverses are requested; this is
//! not checked. Every eigenvalue field used by the harness is either `Q`
//! (modulus `z - 1`) or cyclotomic, both of which are known to be irreducible.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for a small rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(int(i)),
            None => Err(Error::Parse(format!("non-integer number {n}; write rationals as \"n/d\""))),
        },
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

/// Dense univariate polynomial helpers, ascending coefficient order.
mod poly {
    use super::Rational;
    use num_traits::Zero;

    pub fn trim(p: &mut Vec<Rational>) {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
    }

    pub fn degree(p: &[Rational]) -> Option<usize> {
        p.iter().rposition(|c| !c.is_zero())
    }

    pub fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(&mut out);
        out
    }

    pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = a.len().max(b.len());
        let mut out: Vec<Rational> = (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
                match b.get(i) {
                    Some(y) => x - y,
                    None => x,
                }
            })
            .collect();
        trim(&mut out);
        out
    }

    /// Quotient and remainder of `a` by a nonzero `b`.
    pub fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let db = degree(b).expect("division by the zero polynomial");
        let lead = b[db].clone();
        let mut rem: Vec<Rational> = a.to_vec();
        trim(&mut rem);
        if rem.len() <= db {
            return (Vec::new(), rem);
        }
        let mut quot = vec![Rational::zero(); rem.len() - db];
        for i in (db..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let c = &rem[i] / &lead;
            for j in 0..=db {
                let t = &c * &b[j];
                rem[i - db + j] -= t;
            }
            quot[i - db] = c;
        }
        rem.truncate(db);
        trim(&mut rem);
        trim(&mut quot);
        (quot, rem)
    }
}

/// A monic polynomial `p(z)` with rational coefficients, stored in ascending
/// order including the leading 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    coeffs: Vec<Rational>,
}

impl Modulus {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        let mut coeffs = coeffs;
        poly::trim(&mut coeffs);
        if coeffs.len() < 2 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        if !coeffs.last().is_some_and(One::is_one) {
            return Err(Error::InvalidModulus("polynomial must be monic".into()));
        }
        Ok(Modulus { coeffs })
    }

    /// `z - 1`, under which scalars are plain rationals.
    pub fn rational() -> Self {
        Modulus { coeffs: vec![int(-1), int(1)] }
    }

    /// The `m`-th cyclotomic polynomial, `1 <= m <= 30`.
    pub fn cyclotomic(m: u32) -> Result<Self> {
        Ok(Modulus { coeffs: cyclotomic_modulus(m)? })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_rational(&self) -> bool {
        *self == Modulus::rational()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(rational_to_json).collect())
    }

    /// Accepts a coefficient array or `{"cyclotomic": m}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Array(items) => Modulus::new(items.iter().map(rational_from_json).collect::<Result<_>>()?),
            Value::Object(map) => match map.get("cyclotomic").and_then(Value::as_u64) {
                Some(m) => Modulus::cyclotomic(m as u32),
                None => Err(Error::Parse("modulus object needs an integer \"cyclotomic\" key".into())),
            },
            other => Err(Error::Parse(format!("bad modulus {other}"))),
        }
    }

    /// Reduces an arbitrary polynomial to exactly `degree()` coefficients.
    fn reduce(&self, mut p: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree();
        if p.len() > d {
            for i in (d..p.len()).rev() {
                if p[i].is_zero() {
                    continue;
                }
                let c = std::mem::take(&mut p[i]);
                for j in 0..d {
                    let t = &c * &self.coeffs[j];
                    p[i - d + j] -= t;
                }
            }
        }
        p.resize(d, Rational::zero());
        p
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coeffs)
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, coeffs: &[Rational]) -> fmt::Result {
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let unit = abs.is_one();
        match i {
            0 => write!(f, "{abs}")?,
            _ => {
                if !unit {
                    write!(f, "{abs}*")?;
                }
                if i == 1 {
                    write!(f, "z")?;
                } else {
                    write!(f, "z^{i}")?;
                }
            }
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// The `m`-th cyclotomic polynomial as ascending coefficients, `1 <= m <= 30`.
pub fn cyclotomic_modulus(m: u32) -> Result<Vec<Rational>> {
    if !(1..=30).contains(&m) {
        return Err(Error::CyclotomicOutOfRange(m));
    }
    // z^m - 1 divided by every Phi_d with d | m, d < m.
    let mut num = vec![Rational::zero(); m as usize + 1];
    num[0] = int(-1);
    num[m as usize] = int(1);
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        let phi = cyclotomic_modulus(d)?;
        let (q, r) = poly::divrem(&num, &phi);
        debug_assert!(r.is_empty());
        num = q;
    }
    Ok(num)
}

/// An element of `Q[z]/(p(z))`.
///
/// Scalars only combine with scalars over an identical modulus. The operator
/// impls panic on a mismatch; the `checked_*` methods return
/// [`Error::ModulusMismatch`] instead.
#[derive(Clone, Debug)]
pub struct Scalar {
    modulus: Arc<Modulus>,
    coeffs: Vec<Rational>,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.modulus, &other.modulus) && self.coeffs == other.coeffs
    }
}

impl Eq for Scalar {}

pub(crate) fn same_field(a: &Arc<Modulus>, b: &Arc<Modulus>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Scalar {
    pub fn zero(modulus: &Arc<Modulus>) -> Self {
        Scalar { modulus: modulus.clone(), coeffs: vec![Rational::zero(); modulus.degree()] }
    }

    pub fn one(modulus: &Arc<Modulus>) -> Self {
        Self::from_rational(modulus, Rational::one())
    }

    pub fn from_rational(modulus: &Arc<Modulus>, r: Rational) -> Self {
        let mut s = Self::zero(modulus);
        s.coeffs[0] = r;
        s
    }

    pub fn from_int(modulus: &Arc<Modulus>, n: i64) -> Self {
        Self::from_rational(modulus, int(n))
    }

    /// A plain rational over `Q` (modulus `z - 1`).
    pub fn rational(r: Rational) -> Self {
        Self::from_rational(&Arc::new(Modulus::rational()), r)
    }

    /// Builds `c_0 + c_1 z + ...` and reduces it modulo `p`.
    pub fn from_coeffs(modulus: &Arc<Modulus>, coeffs: Vec<Rational>) -> Self {
        Scalar { modulus: modulus.clone(), coeffs: modulus.reduce(coeffs) }
    }

    /// The class of `z`.
    pub fn generator(modulus: &Arc<Modulus>) -> Self {
        Self::from_coeffs(modulus, vec![Rational::zero(), Rational::one()])
    }

    /// `zeta_m^j` inside `Q[z]/(Phi_m)`.
    pub fn root_of_unity(modulus: &Arc<Modulus>, power: u32) -> Self {
        let mut c = vec![Rational::zero(); power as usize + 1];
        c[power as usize] = Rational::one();
        Self::from_coeffs(modulus, c)
    }

    pub fn modulus(&self) -> &Arc<Modulus> {
        &self.modulus
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value if the scalar lies in the prime field.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| &self.coeffs[0])
    }

    /// Re-embeds a prime-field scalar into another field.
    pub fn embed_into(&self, modulus: &Arc<Modulus>) -> Result<Scalar> {
        if same_field(&self.modulus, modulus) {
            return Ok(self.clone());
        }
        match self.as_rational() {
            Some(r) => Ok(Scalar::from_rational(modulus, r.clone())),
            None => Err(Error::ModulusMismatch),
        }
    }

    fn check(&self, other: &Scalar) -> Result<()> {
        if same_field(&self.modulus, &other.modulus) {
            Ok(())
        } else {
            Err(Error::ModulusMismatch)
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Scalar { modulus: self.modulus.clone(), coeffs })
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Scalar { modulus: self.modulus.clone(), coeffs })
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        if self.modulus.degree() == 1 {
            return Ok(Scalar { modulus: self.modulus.clone(), coeffs: vec![&self.coeffs[0] * &other.coeffs[0]] });
        }
        Ok(Scalar::from_coeffs(&self.modulus, poly::mul(&self.coeffs, &other.coeffs)))
    }

    pub fn scale(&self, r: &Rational) -> Scalar {
        Scalar { modulus: self.modulus.clone(), coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm in `Q[z]`.
    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut a: Vec<Rational> = self.modulus.coeffs.clone();
        let mut b: Vec<Rational> = self.coeffs.clone();
        poly::trim(&mut b);
        let mut sa: Vec<Rational> = Vec::new();
        let mut sb: Vec<Rational> = vec![Rational::one()];
        while !b.is_empty() {
            let (q, r) = poly::divrem(&a, &b);
            let next = poly::sub(&sa, &poly::mul(&q, &sb));
            a = std::mem::replace(&mut b, r);
            sa = std::mem::replace(&mut sb, next);
        }
        // a = gcd(p, self) up to a unit; sa * self = a (mod p).
        if poly::degree(&a) != Some(0) {
            return Err(Error::NoInverse);
        }
        let lead = a[0].clone();
        let coeffs = sa.into_iter().map(|c| c / &lead).collect();
        Ok(Scalar::from_coeffs(&self.modulus, coeffs))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        self.checked_mul(&other.inverse()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Scalar> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Scalar::one(&self.modulus);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Canonical JSON: `"n/d"` over `Q`, `{modulus, coeffs}` otherwise.
    pub fn to_json(&self) -> Value {
        if self.modulus.is_rational() {
            return rational_to_json(&self.coeffs[0]);
        }
        json!({
            "modulus": self.modulus.to_json(),
            "coeffs": self.coeffs.iter().map(rational_to_json).collect::<Vec<_>>(),
        })
    }

    /// Parses a scalar. Rational strings (and integers) land in `field`.
    /// Object forms carry their own modulus, which must equal `field`
    /// when one is given; `{"cyclotomic": m, "power": j}` is accepted as a
    /// shorthand for `zeta_m^j`, and `{"coeffs": [...]}` alone is read in
    /// `field`.
    pub fn from_json(v: &Value, field: Option<&Arc<Modulus>>) -> Result<Scalar> {
        let pick = |own: Modulus| -> Result<Arc<Modulus>> {
            match field {
                Some(f) if **f == own => Ok(f.clone()),
                Some(_) => Err(Error::ModulusMismatch),
                None => Ok(Arc::new(own)),
            }
        };
        match v {
            Value::String(_) | Value::Number(_) => {
                let r = rational_from_json(v)?;
                let m = match field {
                    Some(f) => f.clone(),
                    None => Arc::new(Modulus::rational()),
                };
                Ok(Scalar::from_rational(&m, r))
            }
            Value::Object(map) => {
                if let Some(m) = map.get("cyclotomic") {
                    let m = m.as_u64().ok_or_else(|| Error::Parse("cyclotomic index must be an integer".into()))?;
                    let power = map.get("power").and_then(Value::as_u64).unwrap_or(1);
                    let modulus = pick(Modulus::cyclotomic(m as u32)?)?;
                    return Ok(Scalar::root_of_unity(&modulus, power as u32));
                }
                let modulus = match (map.get("modulus"), field) {
                    (Some(m), _) => pick(Modulus::from_json(m)?)?,
                    (None, Some(f)) => f.clone(),
                    (None, None) => return Err(Error::Parse("scalar object needs \"modulus\"".into())),
                };
                let coeffs = match map.get("coeffs") {
                    Some(Value::Array(items)) => items.iter().map(rational_from_json).collect::<Result<Vec<_>>>()?,
                    _ => return Err(Error::Parse("scalar object needs a \"coeffs\" array".into())),
                };
                if coeffs.len() > modulus.degree() {
                    return Err(Error::Parse(format!(
                        "scalar has {} coefficients but the modulus has degree {}",
                        coeffs.len(),
                        modulus.degree()
                    )));
                }
                Ok(Scalar::from_coeffs(&modulus, coeffs))
            }
            other => Err(Error::Parse(format!("bad scalar {other}"))),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.modulus.is_rational() {
            return write!(f, "{}", self.coeffs[0]);
        }
        write_poly(f, &self.coeffs)?;
        write!(f, " mod ({})", self.modulus)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar moduli differ")
            }
        }
        impl std::ops::$trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$checked(&rhs).expect("scalar moduli differ")
            }
        }
    };
}

scalar_binop!(Add, add, checked_add);
scalar_binop!(Sub, sub, checked_sub);
scalar_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { modulus: self.modulus.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
    }
}

pub fn scalar_inverse(a: &Scalar) -> Result<Scalar> {
    a.inverse()
}
