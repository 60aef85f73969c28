//! The Hodge-diagonal ring `Q[h_1..h_r]/(h_i^{n_i+1})` of a multiprojective
//! space, with integration against the fundamental class.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{same_field, Modulus, Rational, Scalar};

pub type Exponents = Vec<u32>;

/// Generator count, nilpotency bounds and scalar field of the ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    tops: Vec<u32>,
    field: Arc<Modulus>,
}

impl RingPresentation {
    /// `tops[i] = n_i`, so `h_i^{n_i + 1} = 0`.
    pub fn new(tops: Vec<u32>, field: Arc<Modulus>) -> Arc<Self> {
        Arc::new(RingPresentation { tops, field })
    }

    pub fn generator_count(&self) -> usize {
        self.tops.len()
    }

    pub fn tops(&self) -> &[u32] {
        &self.tops
    }

    pub fn nilpotency_orders(&self) -> Vec<u32> {
        self.tops.iter().map(|n| n + 1).collect()
    }

    pub fn dimension(&self) -> u32 {
        self.tops.iter().sum()
    }

    pub fn field(&self) -> &Arc<Modulus> {
        &self.field
    }

    pub fn top_monomial(&self) -> Exponents {
        self.tops.clone()
    }

    pub fn admits(&self, exps: &[u32]) -> bool {
        exps.len() == self.tops.len() && exps.iter().zip(&self.tops).all(|(e, n)| e <= n)
    }

    /// Every surviving monomial, in lexicographic order.
    pub fn monomial_basis(&self) -> Vec<Exponents> {
        let mut out = vec![Vec::with_capacity(self.tops.len())];
        for &n in &self.tops {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=n).map(move |e| {
                        let mut v = prefix.clone();
                        v.push(e);
                        v
                    })
                })
                .collect();
        }
        out
    }

    pub fn scalar(&self, r: Rational) -> Scalar {
        Scalar::from_rational(&self.field, r)
    }
}

fn same_presentation(a: &Arc<RingPresentation>, b: &Arc<RingPresentation>) -> bool {
    Arc::ptr_eq(a, b) || (a.tops == b.tops && same_field(&a.field, &b.field))
}

fn degree(exps: &[u32]) -> u32 {
    exps.iter().sum()
}

/// A sparse element of the ring. Terms are keyed by exponent vectors, so
/// iteration order is lexicographic.
#[derive(Clone, Debug)]
pub struct GradedElement {
    pres: Arc<RingPresentation>,
    terms: BTreeMap<Exponents, Scalar>,
}

impl PartialEq for GradedElement {
    fn eq(&self, other: &Self) -> bool {
        same_presentation(&self.pres, &other.pres) && self.terms == other.terms
    }
}

impl Eq for GradedElement {}

impl GradedElement {
    pub fn zero(pres: &Arc<RingPresentation>) -> Self {
        GradedElement { pres: pres.clone(), terms: BTreeMap::new() }
    }

    pub fn one(pres: &Arc<RingPresentation>) -> Self {
        Self::from_scalar(pres, Scalar::one(&pres.field))
    }

    pub fn from_scalar(pres: &Arc<RingPresentation>, s: Scalar) -> Self {
        let mut out = Self::zero(pres);
        out.add_term(vec![0; pres.generator_count()], s);
        out
    }

    pub fn from_rational(pres: &Arc<RingPresentation>, r: Rational) -> Self {
        Self::from_scalar(pres, pres.scalar(r))
    }

    /// `coeff * h^exps`; monomials beyond the nilpotency bounds give zero.
    pub fn monomial(pres: &Arc<RingPresentation>, exps: &[u32], coeff: Scalar) -> Result<Self> {
        if exps.len() != pres.generator_count() {
            return Err(Error::ArityMismatch { expected: pres.generator_count(), got: exps.len() });
        }
        if !same_field(coeff.modulus(), &pres.field) {
            return Err(Error::ModulusMismatch);
        }
        let mut out = Self::zero(pres);
        if pres.admits(exps) {
            out.add_term(exps.to_vec(), coeff);
        }
        Ok(out)
    }

    /// The generator `h_i`.
    pub fn generator(pres: &Arc<RingPresentation>, i: usize) -> Result<Self> {
        let r = pres.generator_count();
        if i >= r {
            return Err(Error::InvalidIndexSet(format!("generator {i} of {r}")));
        }
        let mut e = vec![0; r];
        e[i] = 1;
        Self::monomial(pres, &e, Scalar::one(&pres.field))
    }

    /// `sum_i k_i h_i`.
    pub fn linear_form(pres: &Arc<RingPresentation>, ks: &[i64]) -> Result<Self> {
        if ks.len() != pres.generator_count() {
            return Err(Error::ArityMismatch { expected: pres.generator_count(), got: ks.len() });
        }
        let mut out = Self::zero(pres);
        for (i, &k) in ks.iter().enumerate() {
            let mut e = vec![0; ks.len()];
            e[i] = 1;
            if pres.admits(&e) {
                out.add_term(e, Scalar::from_int(&pres.field, k));
            }
        }
        Ok(out)
    }

    fn add_term(&mut self, exps: Exponents, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn presentation(&self) -> &Arc<RingPresentation> {
        &self.pres
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Scalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(|| Scalar::zero(&self.pres.field))
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&vec![0; self.pres.generator_count()])
    }

    /// The homogeneous component of degree `p`.
    pub fn degree_part(&self, p: u32) -> GradedElement {
        let terms = self.terms.iter().filter(|(e, _)| degree(e) == p).map(|(e, c)| (e.clone(), c.clone())).collect();
        GradedElement { pres: self.pres.clone(), terms }
    }

    /// Largest total degree present, `None` for zero.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| degree(e)).max()
    }

    /// True when every term has total degree exactly `p`.
    pub fn is_homogeneous(&self, p: u32) -> bool {
        self.terms.keys().all(|e| degree(e) == p)
    }

    fn check(&self, other: &GradedElement) -> Result<()> {
        if same_presentation(&self.pres, &other.pres) {
            Ok(())
        } else {
            Err(Error::PresentationMismatch)
        }
    }

    pub fn checked_add(&self, other: &GradedElement) -> Result<GradedElement> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &GradedElement) -> Result<GradedElement> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &GradedElement) -> Result<GradedElement> {
        self.check(other)?;
        let mut out = Self::zero(&self.pres);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if self.pres.admits(&e) {
                    out.add_term(e, ca * cb);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Result<GradedElement> {
        if !same_field(s.modulus(), &self.pres.field) {
            return Err(Error::ModulusMismatch);
        }
        let mut out = Self::zero(&self.pres);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        Ok(out)
    }

    pub fn scale_rational(&self, r: &Rational) -> GradedElement {
        if r.is_zero() {
            return Self::zero(&self.pres);
        }
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c.scale(r))).collect();
        GradedElement { pres: self.pres.clone(), terms }
    }

    pub fn pow(&self, k: u32) -> GradedElement {
        let mut acc = Self::one(&self.pres);
        for _ in 0..k {
            acc = &acc * self;
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// Coefficient of the top monomial `h_1^{n_1} ... h_r^{n_r}`.
    pub fn integrate(&self) -> Scalar {
        self.coeff(&self.pres.top_monomial())
    }

    pub fn poincare_pair(&self, other: &GradedElement) -> Result<Scalar> {
        Ok(self.checked_mul(other)?.integrate())
    }

    /// `sum_k f_k a^k` for `a` without constant term. Only the first
    /// `dim + 1` coefficients matter since `a^{dim+1} = 0`.
    pub fn series_apply(coeffs: &[Rational], a: &GradedElement) -> Result<GradedElement> {
        if !a.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let used = coeffs.len().min(a.pres.dimension() as usize + 1);
        let mut acc = Self::zero(&a.pres);
        for f in coeffs[..used].iter().rev() {
            acc = &acc * a;
            if !f.is_zero() {
                acc.add_term(vec![0; a.pres.generator_count()], a.pres.scalar(f.clone()));
            }
        }
        Ok(acc)
    }

    /// Inverse of an element whose constant term is invertible, by the
    /// geometric series in the nilpotent element `1 - a/a_0`.
    pub fn invert_unit(&self) -> Result<GradedElement> {
        let a0 = self.constant_term();
        let a0_inv = a0.inverse().map_err(|_| Error::NotAUnit)?;
        let normalized = self.scale(&a0_inv)?;
        let u = &Self::one(&self.pres) - &normalized;
        let mut sum = Self::one(&self.pres);
        let mut power = Self::one(&self.pres);
        for _ in 0..self.pres.dimension() {
            power = &power * &u;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        sum.scale(&a0_inv)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms.iter().map(|(e, c)| json!({ "exps": e, "coeff": c.to_json() })).collect();
        json!({ "terms": terms })
    }

    /// Canonical serialized form, used for bit-exact comparisons.
    pub fn canonical_string(&self) -> String {
        self.to_json().to_string()
    }

    pub fn from_json(pres: &Arc<RingPresentation>, v: &Value) -> Result<GradedElement> {
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("graded element needs a \"terms\" array".into()))?;
        let mut out = Self::zero(pres);
        for t in terms {
            let exps: Exponents = t
                .get("exps")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("term needs an \"exps\" array".into()))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .and_then(|x| u32::try_from(x).ok())
                        .ok_or_else(|| Error::Parse(format!("bad exponent {x}")))
                })
                .collect::<Result<_>>()?;
            if !pres.admits(&exps) {
                return Err(Error::ExponentOutOfRange(exps));
            }
            let coeff = t.get("coeff").ok_or_else(|| Error::Parse("term needs a \"coeff\"".into()))?;
            out.add_term(exps, Scalar::from_json(coeff, Some(&pres.field))?);
        }
        Ok(out)
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let single = self.pres.generator_count() == 1;
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(j, &x)| {
                    let name = if single { "h".to_string() } else { format!("h{}", j + 1) };
                    if x == 1 {
                        name
                    } else {
                        format!("{name}^{x}")
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "({c})")?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "({c})*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

macro_rules! elem_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&GradedElement> for &GradedElement {
            type Output = GradedElement;
            fn $method(self, rhs: &GradedElement) -> GradedElement {
                self.$checked(rhs).expect("ring presentations differ")
            }
        }
    };
}

elem_binop!(Add, add, checked_add);
elem_binop!(Sub, sub, checked_sub);
elem_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &GradedElement {
    type Output = GradedElement;
    fn neg(self) -> GradedElement {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        GradedElement { pres: self.pres.clone(), terms }
    }
}

impl std::iter::Sum for GradedElement {
    /// Panics on an empty iterator, which has no presentation to sum in.
    fn sum<I: Iterator<Item = GradedElement>>(mut iter: I) -> Self {
        let first = iter.next().expect("sum of an empty sequence of graded elements");
        iter.fold(first, |acc, x| &acc + &x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElemOp {
    Add,
    Mul,
}

pub fn elem_arith(a: &GradedElement, b: &GradedElement, op: ElemOp) -> Result<GradedElement> {
    match op {
        ElemOp::Add => a.checked_add(b),
        ElemOp::Mul => a.checked_mul(b),
    }
}

/// Coefficients `1/k!` for `k = 0..=order`.
pub fn exp_coefficients(order: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(order + 1);
    let mut c = Rational::one();
    for k in 0..=order {
        if k > 0 {
            c /= Rational::from_integer(k.into());
        }
        out.push(c.clone());
    }
    out
}

/// `exp(a)` for `a` without constant term.
pub fn exp(a: &GradedElement) -> Result<GradedElement> {
    GradedElement::series_apply(&exp_coefficients(a.pres.dimension() as usize), a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use proptest::prelude::*;

    fn ring(tops: &[u32]) -> Arc<RingPresentation> {
        RingPresentation::new(tops.to_vec(), Arc::new(Modulus::rational()))
    }

    fn poly1(pres: &Arc<RingPresentation>, cs: &[Rational]) -> GradedElement {
        let mut out = GradedElement::zero(pres);
        for (k, c) in cs.iter().enumerate() {
            out = &out + &GradedElement::monomial(pres, &[k as u32], pres.scalar(c.clone())).unwrap();
        }
        out
    }

    #[test]
    fn truncated_products() {
        let p1 = ring(&[1]);
        let a = poly1(&p1, &[int(1), int(1)]);
        assert_eq!(elem_arith(&a, &a, ElemOp::Mul).unwrap(), poly1(&p1, &[int(1), int(2)]));

        let p2 = ring(&[2]);
        let b = poly1(&p2, &[int(1), int(1)]);
        assert_eq!(b.pow(3), poly1(&p2, &[int(1), int(3), int(3)]));

        let pp = ring(&[1, 1]);
        let h1 = GradedElement::generator(&pp, 0).unwrap();
        assert!((&h1 * &h1).is_zero());
    }

    #[test]
    fn integration() {
        let p2 = ring(&[2]);
        assert_eq!(poly1(&p2, &[int(1), int(3), int(5)]).integrate(), p2.scalar(int(5)));
        let pp = ring(&[1, 1]);
        let x = GradedElement::monomial(&pp, &[1, 1], pp.scalar(int(2))).unwrap();
        assert_eq!(x.integrate(), pp.scalar(int(2)));
        let p1 = ring(&[1]);
        assert!(GradedElement::one(&p1).integrate().is_zero());
    }

    #[test]
    fn pairing() {
        let p1 = ring(&[1]);
        let one = GradedElement::one(&p1);
        let h = GradedElement::generator(&p1, 0).unwrap();
        assert_eq!(one.poincare_pair(&h).unwrap(), p1.scalar(int(1)));
        assert!(h.poincare_pair(&h).unwrap().is_zero());
        let p2 = ring(&[2]);
        let a = poly1(&p2, &[int(1), int(1)]);
        assert_eq!(a.poincare_pair(&a).unwrap(), p2.scalar(int(1)));
    }

    #[test]
    fn pairing_matrix_is_antidiagonal_permutation() {
        for tops in [vec![3], vec![1, 1], vec![1, 2], vec![2, 1, 1]] {
            let pres = ring(&tops);
            let basis = pres.monomial_basis();
            let top = pres.top_monomial();
            for a in &basis {
                let ea = GradedElement::monomial(&pres, a, pres.scalar(int(1))).unwrap();
                let mut hits = 0;
                for b in &basis {
                    let eb = GradedElement::monomial(&pres, b, pres.scalar(int(1))).unwrap();
                    let v = ea.poincare_pair(&eb).unwrap();
                    let dual = a.iter().zip(b).zip(&top).all(|((x, y), n)| x + y == *n);
                    assert_eq!(v.is_one(), dual);
                    assert!(v.is_zero() || v.is_one());
                    hits += v.is_one() as u32;
                }
                assert_eq!(hits, 1);
            }
        }
    }

    #[test]
    fn exp_series() {
        let p1 = ring(&[1]);
        let kh = GradedElement::linear_form(&p1, &[5]).unwrap();
        assert_eq!(exp(&kh).unwrap(), poly1(&p1, &[int(1), int(5)]));
        let p2 = ring(&[2]);
        let h = GradedElement::generator(&p2, 0).unwrap();
        assert_eq!(exp(&h).unwrap(), poly1(&p2, &[int(1), int(1), rat(1, 2)]));
        let zero = GradedElement::zero(&p2);
        assert_eq!(
            GradedElement::series_apply(&[rat(7, 3), int(4)], &zero).unwrap(),
            GradedElement::from_rational(&p2, rat(7, 3))
        );
        let one = GradedElement::one(&p2);
        assert_eq!(GradedElement::series_apply(&[int(1)], &one), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn unit_inversion() {
        let p1 = ring(&[1]);
        let a = poly1(&p1, &[int(1), int(-2)]);
        assert_eq!(a.invert_unit().unwrap(), poly1(&p1, &[int(1), int(2)]));
        let b = poly1(&p1, &[int(-1), int(2)]);
        assert_eq!(b.invert_unit().unwrap(), poly1(&p1, &[int(-1), int(-2)]));
        let h = GradedElement::generator(&p1, 0).unwrap();
        assert_eq!(h.invert_unit(), Err(Error::NotAUnit));
    }

    #[test]
    fn presentation_mismatch() {
        let a = GradedElement::one(&ring(&[1]));
        let b = GradedElement::one(&ring(&[2]));
        assert_eq!(a.checked_add(&b), Err(Error::PresentationMismatch));
        assert_eq!(a.poincare_pair(&b), Err(Error::PresentationMismatch));
    }

    #[test]
    fn json_rejects_out_of_range() {
        let p1 = ring(&[1]);
        let v: Value = serde_json::from_str(r#"{"terms":[{"exps":[2],"coeff":"1"}]}"#).unwrap();
        assert_eq!(GradedElement::from_json(&p1, &v), Err(Error::ExponentOutOfRange(vec![2])));
    }

    fn arb_elem(pres: Arc<RingPresentation>) -> impl Strategy<Value = GradedElement> {
        let n = pres.monomial_basis().len();
        prop::collection::vec((-4i64..=4, 1i64..=3), n).prop_map(move |cs| {
            let mut out = GradedElement::zero(&pres);
            for (b, (num, den)) in pres.monomial_basis().iter().zip(cs) {
                out = &out + &GradedElement::monomial(&pres, b, pres.scalar(rat(num, den))).unwrap();
            }
            out
        })
    }

    fn arb_series(len: usize) -> impl Strategy<Value = Vec<Rational>> {
        prop::collection::vec((-5i64..=5, 1i64..=4), len)
            .prop_map(|cs| cs.into_iter().map(|(n, d)| rat(n, d)).collect())
    }

    fn series_product(f: &[Rational], g: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); f.len() + g.len() - 1];
        for (i, a) in f.iter().enumerate() {
            for (j, b) in g.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_elem(ring(&[1, 2])), b in arb_elem(ring(&[1, 2])), c in arb_elem(ring(&[1, 2]))) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &GradedElement::one(a.presentation()), a.clone());
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn units_invert(a in arb_elem(ring(&[2, 1]))) {
            prop_assume!(!a.constant_term().is_zero());
            let inv = a.invert_unit().unwrap();
            prop_assert_eq!(&a * &inv, GradedElement::one(a.presentation()));
        }

        #[test]
        fn series_apply_is_multiplicative(f in arb_series(5), g in arb_series(5), a in arb_elem(ring(&[2, 2]))) {
            let x = &a - &GradedElement::from_scalar(a.presentation(), a.constant_term());
            let fg = series_product(&f, &g);
            let lhs = GradedElement::series_apply(&fg, &x).unwrap();
            let rhs = &GradedElement::series_apply(&f, &x).unwrap() * &GradedElement::series_apply(&g, &x).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn json_round_trip(a in arb_elem(ring(&[1, 2]))) {
            let back = GradedElement::from_json(a.presentation(), &a.to_json()).unwrap();
            prop_assert_eq!(back.canonical_string(), a.canonical_string());
            prop_assert_eq!(back, a);
        }
    }
}
