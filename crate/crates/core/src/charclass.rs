//! Chern character, multiplicative classes and the Todd class.
//!
//! Everything here depends on a bundle only through its rank and total Chern
//! class. Symmetric functions of the formal Chern roots are reached through
//! power sums (Newton's identities); [`split_mult_class`] is the second,
//! independent route that multiplies `f(x_j)` over explicitly given roots.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::Value;

use crate::cohring::{exp_coefficients, GradedElement, RingPresentation};
use crate::error::{Error, Result};
use crate::exactnum::{int, rational_from_json, Rational};
use crate::variety::{BundleData, VarietyModel};

/// A truncated power series `f_0 + f_1 t + ... + f_d t^d` over `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSpec {
    name: String,
    coeffs: Vec<Rational>,
}

impl SeriesSpec {
    pub fn new(name: impl Into<String>, coeffs: Vec<Rational>) -> Self {
        let mut coeffs = coeffs;
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        SeriesSpec { name: name.into(), coeffs }
    }

    pub fn exp(order: usize) -> Self {
        SeriesSpec::new("exp", exp_coefficients(order))
    }

    /// `(1 - e^{-t})/t`, with coefficients `(-1)^n/(n+1)!`.
    pub fn inv_todd(order: usize) -> Self {
        let coeffs = exp_coefficients(order + 1)
            .into_iter()
            .skip(1)
            .enumerate()
            .map(|(n, c)| if n % 2 == 0 { c } else { -c })
            .collect();
        SeriesSpec::new("inv_todd", coeffs)
    }

    /// `t/(1 - e^{-t})`, the reciprocal of [`SeriesSpec::inv_todd`].
    pub fn todd(order: usize) -> Self {
        let inv = SeriesSpec::inv_todd(order).reciprocal().expect("constant term is 1");
        SeriesSpec::new("todd", inv.coeffs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Truncates or zero-pads to exactly `order + 1` coefficients.
    pub fn with_order(&self, order: usize) -> SeriesSpec {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Rational::zero());
        SeriesSpec { name: self.name.clone(), coeffs }
    }

    pub fn mul(&self, other: &SeriesSpec) -> SeriesSpec {
        let order = self.order().min(other.order());
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        SeriesSpec::new(format!("{}*{}", self.name, other.name), out)
    }

    /// `1/f` by the geometric series in `1 - f/f_0`.
    pub fn reciprocal(&self) -> Result<SeriesSpec> {
        let f0 = self.coeffs[0].clone();
        if f0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let order = self.order();
        let mut u: Vec<Rational> = self.coeffs.iter().map(|c| -(c / &f0)).collect();
        u[0] = Rational::zero();
        let u = SeriesSpec::new("u", u);
        let mut sum = SeriesSpec::new("1", vec![Rational::one()]).with_order(order);
        let mut power = sum.clone();
        for _ in 0..order {
            power = power.mul(&u);
            sum = SeriesSpec::new("", sum.coeffs.iter().zip(&power.coeffs).map(|(a, b)| a + b).collect());
        }
        let coeffs = sum.coeffs.iter().map(|c| c / &f0).collect();
        Ok(SeriesSpec::new(format!("1/({})", self.name), coeffs))
    }

    /// `log f = log(1 + u)` with `u = f - 1`, requiring `f_0 = 1`.
    pub fn log(&self) -> Result<SeriesSpec> {
        if !self.coeffs[0].is_one() {
            return Err(Error::SeriesNotNormalized);
        }
        let order = self.order();
        let mut u = self.coeffs.clone();
        u[0] = Rational::zero();
        let u = SeriesSpec::new("u", u);
        let mut out = vec![Rational::zero(); order + 1];
        let mut power = SeriesSpec::new("1", vec![Rational::one()]).with_order(order);
        for j in 1..=order {
            power = power.mul(&u);
            let w = Rational::new(if j % 2 == 1 { 1.into() } else { (-1).into() }, (j as i64).into());
            for (o, c) in out.iter_mut().zip(&power.coeffs) {
                *o += c * &w;
            }
        }
        Ok(SeriesSpec::new(format!("log({})", self.name), out))
    }

    /// Parses `{"name": "exp"|"todd"|"inv_todd"}` or `{"coeffs": [...]}`.
    /// Named series are generated to `order`.
    pub fn from_json(v: &Value, order: usize) -> Result<SeriesSpec> {
        if let Some(name) = v.get("name").and_then(Value::as_str) {
            return match name {
                "exp" => Ok(SeriesSpec::exp(order)),
                "todd" => Ok(SeriesSpec::todd(order)),
                "inv_todd" => Ok(SeriesSpec::inv_todd(order)),
                other => Err(Error::Parse(format!("unknown series {other:?}"))),
            };
        }
        match v.get("coeffs").and_then(Value::as_array) {
            Some(cs) => Ok(SeriesSpec::new("custom", cs.iter().map(rational_from_json).collect::<Result<_>>()?)),
            None => Err(Error::Parse("series needs \"name\" or \"coeffs\"".into())),
        }
    }
}

/// Power sums `p_1..p_n` of the Chern roots via Newton's identities
/// `p_k = c_1 p_{k-1} - c_2 p_{k-2} + ... + (-1)^{k-1} k c_k`.
pub fn power_sums(e: &BundleData, n: usize) -> Vec<GradedElement> {
    let mut p: Vec<GradedElement> = Vec::with_capacity(n);
    for k in 1..=n {
        let ck = e.chern_class(k as u32).scale_rational(&int(k as i64));
        let mut acc = if k % 2 == 1 { ck } else { -&ck };
        for i in 1..k {
            let term = &e.chern_class(i as u32) * &p[k - i - 1];
            acc = if i % 2 == 1 { &acc + &term } else { &acc - &term };
        }
        p.push(acc);
    }
    p
}

/// `ch(E) = rk(E) + sum_k p_k / k!`.
pub fn chern_character(e: &BundleData) -> GradedElement {
    let pres = e.presentation();
    let d = pres.dimension() as usize;
    let fact = exp_coefficients(d);
    let mut out = GradedElement::from_rational(pres, int(e.rank()));
    for (k, pk) in power_sums(e, d).iter().enumerate() {
        out = &out + &pk.scale_rational(&fact[k + 1]);
    }
    out
}

/// `c^f(E) = prod_i f(x_i) = exp(sum_k g_k p_k)` with `g = log f`.
pub fn mult_class(f: &SeriesSpec, e: &BundleData) -> Result<GradedElement> {
    if !f.coeffs()[0].is_one() {
        return Err(Error::SeriesNotNormalized);
    }
    let pres = e.presentation();
    let d = pres.dimension() as usize;
    let g = f.with_order(d).log()?;
    let mut exponent = GradedElement::zero(pres);
    for (k, pk) in power_sums(e, d).iter().enumerate() {
        exponent = &exponent + &pk.scale_rational(&g.coeffs()[k + 1]);
    }
    GradedElement::series_apply(&exp_coefficients(d), &exponent)
}

pub fn todd_class(x: &VarietyModel) -> GradedElement {
    todd_class_with(x, &SeriesSpec::todd(x.dimension() as usize)).expect("todd series has constant term 1")
}

/// Todd class computed with a caller-supplied series in place of
/// `t/(1 - e^{-t})`; used for negative controls.
pub fn todd_class_with(x: &VarietyModel, series: &SeriesSpec) -> Result<GradedElement> {
    mult_class(series, x.tangent())
}

/// `prod_j f(x_j)^{m_j}` over explicit roots of pure degree one (or zero),
/// by direct substitution. An empty root list gives `1`.
pub fn split_mult_class(
    pres: &Arc<RingPresentation>,
    f: &SeriesSpec,
    roots: &[(u32, GradedElement)],
) -> Result<GradedElement> {
    if !f.coeffs()[0].is_one() {
        return Err(Error::SeriesNotNormalized);
    }
    let mut out = GradedElement::one(pres);
    for (m, x) in roots {
        if x.presentation() != pres {
            return Err(Error::PresentationMismatch);
        }
        if !x.is_homogeneous(1) {
            return Err(Error::MalformedRoot(format!("{x} is not of pure degree 1")));
        }
        let fx = GradedElement::series_apply(f.coeffs(), x)?;
        out = &out * &fx.pow(*m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, Modulus};
    use crate::variety::{multiprojective, point, BundleData};
    use proptest::prelude::*;

    fn q() -> Arc<Modulus> {
        Arc::new(Modulus::rational())
    }

    fn poly(x: &VarietyModel, cs: &[(Vec<u32>, Rational)]) -> GradedElement {
        cs.iter().fold(GradedElement::zero(x.presentation()), |acc, (e, c)| {
            &acc + &GradedElement::monomial(x.presentation(), e, x.presentation().scalar(c.clone())).unwrap()
        })
    }

    #[test]
    fn named_series() {
        assert_eq!(SeriesSpec::inv_todd(3).coeffs(), &[int(1), rat(-1, 2), rat(1, 6), rat(-1, 24)]);
        assert_eq!(SeriesSpec::todd(4).coeffs(), &[int(1), rat(1, 2), rat(1, 12), int(0), rat(-1, 720)]);
        assert_eq!(SeriesSpec::exp(3).coeffs(), &[int(1), int(1), rat(1, 2), rat(1, 6)]);
        // log(exp t) = t
        assert_eq!(SeriesSpec::exp(5).log().unwrap().coeffs(), &[int(0), int(1), int(0), int(0), int(0), int(0)]);
    }

    #[test]
    fn power_sums_newton() {
        let p2 = multiprojective(&[2], q());
        let e = p2.line_bundle(&[1]).unwrap().direct_sum(&p2.line_bundle(&[1]).unwrap()).unwrap();
        let p = power_sums(&e, 2);
        assert_eq!(p[0], poly(&p2, &[(vec![1], int(2))]));
        assert_eq!(p[1], poly(&p2, &[(vec![2], int(2))]));

        let p3 = multiprojective(&[3], q());
        for k in -3..=3i64 {
            let p = power_sums(&p3.line_bundle(&[k]).unwrap(), 3);
            for (j, pj) in p.iter().enumerate() {
                let j = j as u32 + 1;
                assert_eq!(*pj, poly(&p3, &[(vec![j], int(k.pow(j)))]));
            }
        }
        let zero = BundleData::trivial(p3.presentation(), 0);
        assert!(power_sums(&zero, 3).iter().all(GradedElement::is_zero));
    }

    #[test]
    fn chern_characters() {
        let p2 = multiprojective(&[2], q());
        for k in -3..=3i64 {
            assert_eq!(
                chern_character(&p2.line_bundle(&[k]).unwrap()),
                poly(&p2, &[(vec![0], int(1)), (vec![1], int(k)), (vec![2], rat(k * k, 2))])
            );
        }
        let p1 = multiprojective(&[1], q());
        assert_eq!(chern_character(p1.tangent()), poly(&p1, &[(vec![0], int(1)), (vec![1], int(2))]));
        let split = p1.line_bundle(&[1]).unwrap().direct_sum(&p1.line_bundle(&[-1]).unwrap()).unwrap();
        assert_eq!(chern_character(&split), poly(&p1, &[(vec![0], int(2))]));
    }

    #[test]
    fn multiplicative_classes() {
        let p2 = multiprojective(&[2], q());
        let one_plus_t = SeriesSpec::new("1+t", vec![int(1), int(1)]);
        assert_eq!(mult_class(&one_plus_t, p2.tangent()).unwrap(), *p2.tangent().total_chern());

        let p1 = multiprojective(&[1], q());
        let inv = SeriesSpec::inv_todd(1).reciprocal().unwrap();
        assert_eq!(mult_class(&inv, p1.tangent()).unwrap(), poly(&p1, &[(vec![0], int(1)), (vec![1], int(1))]));

        let zero = BundleData::trivial(p2.presentation(), 0);
        assert_eq!(mult_class(&SeriesSpec::todd(2), &zero).unwrap(), GradedElement::one(p2.presentation()));
        assert_eq!(
            mult_class(&SeriesSpec::new("2+t", vec![int(2), int(1)]), p2.tangent()),
            Err(Error::SeriesNotNormalized)
        );
    }

    #[test]
    fn todd_classes() {
        let p1 = multiprojective(&[1], q());
        assert_eq!(todd_class(&p1), poly(&p1, &[(vec![0], int(1)), (vec![1], int(1))]));
        let p2 = multiprojective(&[2], q());
        assert_eq!(todd_class(&p2), poly(&p2, &[(vec![0], int(1)), (vec![1], rat(3, 2)), (vec![2], int(1))]));
        let pt = point(q());
        assert_eq!(todd_class(&pt), GradedElement::one(pt.presentation()));
    }

    #[test]
    fn split_roots() {
        let p1 = multiprojective(&[1], q());
        let td = split_mult_class(p1.presentation(), &SeriesSpec::todd(1), &p1.tangent_roots()).unwrap();
        assert_eq!(td, todd_class(&p1));

        let pp = multiprojective(&[1, 1], q());
        let (a, b) = (3, -2);
        let roots = vec![
            (1, GradedElement::linear_form(pp.presentation(), &[a, 0]).unwrap()),
            (1, GradedElement::linear_form(pp.presentation(), &[0, b]).unwrap()),
        ];
        let one_plus_t = SeriesSpec::new("1+t", vec![int(1), int(1)]);
        let expected =
            poly(&pp, &[(vec![0, 0], int(1)), (vec![1, 0], int(a)), (vec![0, 1], int(b)), (vec![1, 1], int(a * b))]);
        assert_eq!(split_mult_class(pp.presentation(), &one_plus_t, &roots).unwrap(), expected);
        assert_eq!(
            split_mult_class(pp.presentation(), &one_plus_t, &[]).unwrap(),
            GradedElement::one(pp.presentation())
        );
        let bad = vec![(1, GradedElement::one(pp.presentation()))];
        assert!(matches!(split_mult_class(pp.presentation(), &one_plus_t, &bad), Err(Error::MalformedRoot(_))));
    }

    fn split_bundle(x: &VarietyModel, lines: &[Vec<i64>]) -> (BundleData, Vec<(u32, GradedElement)>) {
        let mut e = BundleData::trivial(x.presentation(), 0);
        let mut roots = Vec::new();
        for l in lines {
            e = e.direct_sum(&x.line_bundle(l).unwrap()).unwrap();
            roots.push((1, GradedElement::linear_form(x.presentation(), l).unwrap()));
        }
        (e, roots)
    }

    fn arb_lines(r: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-4i64..=4, r), 1..4)
    }

    fn arb_normalized_series() -> impl Strategy<Value = SeriesSpec> {
        prop::collection::vec((-4i64..=4, 1i64..=5), 3).prop_map(|cs| {
            let mut c = vec![int(1)];
            c.extend(cs.into_iter().map(|(n, d)| rat(n, d)));
            SeriesSpec::new("random", c)
        })
    }

    proptest! {
        #[test]
        fn ch_additive(a in arb_lines(2), b in arb_lines(2)) {
            let x = multiprojective(&[1, 2], q());
            let (ea, _) = split_bundle(&x, &a);
            let (eb, _) = split_bundle(&x, &b);
            prop_assert_eq!(
                chern_character(&ea.direct_sum(&eb).unwrap()),
                &chern_character(&ea) + &chern_character(&eb)
            );
            prop_assert_eq!(chern_character(&ea).constant_term(), x.presentation().scalar(int(ea.rank())));
        }

        #[test]
        fn ch_multiplicative_on_lines(a in prop::collection::vec(-4i64..=4, 2), b in prop::collection::vec(-4i64..=4, 2)) {
            let x = multiprojective(&[2, 1], q());
            let sum: Vec<i64> = a.iter().zip(&b).map(|(s, t)| s + t).collect();
            prop_assert_eq!(
                &chern_character(&x.line_bundle(&a).unwrap()) * &chern_character(&x.line_bundle(&b).unwrap()),
                chern_character(&x.line_bundle(&sum).unwrap())
            );
        }

        #[test]
        fn mult_class_multiplicative_and_matches_roots(f in arb_normalized_series(), a in arb_lines(2), b in arb_lines(2)) {
            let x = multiprojective(&[1, 2], q());
            let (ea, ra) = split_bundle(&x, &a);
            let (eb, rb) = split_bundle(&x, &b);
            let whole = mult_class(&f, &ea.direct_sum(&eb).unwrap()).unwrap();
            prop_assert_eq!(&whole, &(&mult_class(&f, &ea).unwrap() * &mult_class(&f, &eb).unwrap()));
            let mut roots = ra;
            roots.extend(rb);
            prop_assert_eq!(whole, split_mult_class(x.presentation(), &f, &roots).unwrap());
        }
    }

    #[test]
    fn virtual_ranks_are_fine() {
        let p2 = multiprojective(&[2], q());
        let pres: &Arc<RingPresentation> = p2.presentation();
        // [O] - [O(-1)]: rank 0, c = 1/(1 - h)
        let c = (&GradedElement::one(pres) - &GradedElement::generator(pres, 0).unwrap()).invert_unit().unwrap();
        let v = BundleData::new(0, c).unwrap();
        let expected = &GradedElement::one(pres) - &chern_character(&p2.line_bundle(&[-1]).unwrap());
        assert_eq!(chern_character(&v), expected);
    }
}
