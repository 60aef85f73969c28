//! Fixed-locus data for an endomorphism `g`: eigen-split conormal bundles,
//! equivariant Chern characters and equivariant Euler classes.

use std::sync::Arc;

use serde_json::Value;

use crate::cohring::{exp, GradedElement};
use crate::error::{Error, Result};
use crate::exactnum::{same_field, Modulus, Scalar};
use crate::variety::{multiprojective, VarietyModel};

/// One eigen-line summand `L^{mult}` on which the endomorphism acts by
/// `eigenvalue`; `c1` is the first Chern class of `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenLine {
    pub eigenvalue: Scalar,
    pub c1: GradedElement,
    pub mult: u32,
}

impl EigenLine {
    pub fn new(eigenvalue: Scalar, c1: GradedElement, mult: u32) -> Result<Self> {
        if eigenvalue.is_zero() {
            return Err(Error::MalformedEigenLine("eigenvalue is zero".into()));
        }
        if !same_field(eigenvalue.modulus(), c1.presentation().field()) {
            return Err(Error::ModulusMismatch);
        }
        if !c1.is_homogeneous(1) {
            return Err(Error::MalformedEigenLine(format!("c1 = {c1} is not of pure degree 1")));
        }
        if mult == 0 {
            return Err(Error::MalformedEigenLine("multiplicity must be positive".into()));
        }
        Ok(EigenLine { eigenvalue, c1, mult })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EigenLineSum {
    summands: Vec<EigenLine>,
}

impl EigenLineSum {
    pub fn new(summands: Vec<EigenLine>) -> Self {
        EigenLineSum { summands }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn summands(&self) -> &[EigenLine] {
        &self.summands
    }

    pub fn rank(&self) -> u32 {
        self.summands.iter().map(|s| s.mult).sum()
    }

    fn check_ring(&self, x: &VarietyModel) -> Result<()> {
        if self.summands.iter().all(|s| s.c1.presentation() == x.presentation()) {
            Ok(())
        } else {
            Err(Error::PresentationMismatch)
        }
    }
}

/// A smooth component `F` of the fixed locus with the eigen-decomposition
/// of `g^*` on its conormal bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedComponent {
    variety: VarietyModel,
    conormal: EigenLineSum,
}

impl FixedComponent {
    pub fn new(variety: VarietyModel, conormal: EigenLineSum) -> Result<Self> {
        conormal.check_ring(&variety)?;
        Ok(FixedComponent { variety, conormal })
    }

    /// Like [`FixedComponent::new`], also checking the codimension in an
    /// ambient space of dimension `ambient_dim`.
    pub fn in_ambient(variety: VarietyModel, conormal: EigenLineSum, ambient_dim: u32) -> Result<Self> {
        if variety.dimension() + conormal.rank() != ambient_dim {
            return Err(Error::MalformedEigenLine(format!(
                "conormal rank {} does not match codimension {}",
                conormal.rank(),
                ambient_dim as i64 - variety.dimension() as i64
            )));
        }
        Self::new(variety, conormal)
    }

    pub fn variety(&self) -> &VarietyModel {
        &self.variety
    }

    pub fn conormal(&self) -> &EigenLineSum {
        &self.conormal
    }

    /// Parses `{"factors": [...], "modulus"?: ..., "conormal": [{lambda, c1, mult}]}`.
    pub fn from_json(v: &Value) -> Result<FixedComponent> {
        let entries = json_array(v, "conormal")?;
        let lambdas: Vec<&Value> = entries.iter().filter_map(|e| e.get("lambda")).collect();
        let variety = variety_with_field(v, &lambdas)?;
        let conormal = parse_lines(&variety, entries, "lambda")?;
        FixedComponent::new(variety, conormal)
    }
}

/// `(E, t)` restricted to a fixed component, split into eigen-lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantBundle {
    component: FixedComponent,
    lines: EigenLineSum,
}

impl EquivariantBundle {
    pub fn new(component: FixedComponent, lines: EigenLineSum) -> Result<Self> {
        lines.check_ring(&component.variety)?;
        Ok(EquivariantBundle { component, lines })
    }

    pub fn component(&self) -> &FixedComponent {
        &self.component
    }

    pub fn lines(&self) -> &EigenLineSum {
        &self.lines
    }

    /// Parses `{"factors", "modulus"?, "conormal"?: [...], "lines": [{mu, c1, mult}]}`.
    pub fn from_json(v: &Value) -> Result<EquivariantBundle> {
        let lines = json_array(v, "lines")?;
        let conormal = match v.get("conormal") {
            Some(_) => json_array(v, "conormal")?.as_slice(),
            None => &[],
        };
        let scalars: Vec<&Value> =
            lines.iter().filter_map(|e| e.get("mu")).chain(conormal.iter().filter_map(|e| e.get("lambda"))).collect();
        let variety = variety_with_field(v, &scalars)?;
        let component = FixedComponent::new(variety.clone(), parse_lines(&variety, conormal, "lambda")?)?;
        EquivariantBundle::new(component, parse_lines(&variety, lines, "mu")?)
    }
}

fn json_array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    v.get(key).and_then(Value::as_array).ok_or_else(|| Error::Parse(format!("expected a {key:?} array")))
}

/// The variety named by `factors`, over the explicit `modulus` if present,
/// else over the field of the first object-form scalar, else over `Q`.
fn variety_with_field(v: &Value, scalars: &[&Value]) -> Result<VarietyModel> {
    let field = match v.get("modulus") {
        Some(m) => Arc::new(Modulus::from_json(m)?),
        None => infer_field(scalars.iter().copied())?,
    };
    let mut spec = v.clone();
    spec.as_object_mut().ok_or_else(|| Error::Parse("expected an object".into()))?.remove("modulus");
    let rational = VarietyModel::from_json(&spec)?;
    Ok(multiprojective(rational.factors(), field))
}

/// The common field of a set of JSON scalars: the modulus of the first
/// object-form scalar (all others must agree), or `Q` if all are rational.
pub fn infer_field<'a>(values: impl IntoIterator<Item = &'a Value>) -> Result<Arc<Modulus>> {
    let mut field: Option<Arc<Modulus>> = None;
    for v in values {
        if v.is_object() {
            let s = Scalar::from_json(v, field.as_ref())?;
            field.get_or_insert_with(|| s.modulus().clone());
        }
    }
    Ok(field.unwrap_or_else(|| Arc::new(Modulus::rational())))
}

/// `c1` is either a graded element or an integer list `[k_1..k_r]` meaning
/// `sum k_i h_i`.
pub fn c1_from_json(x: &VarietyModel, v: &Value) -> Result<GradedElement> {
    match v {
        Value::Array(ks) => {
            let ks = ks
                .iter()
                .map(|k| k.as_i64().ok_or_else(|| Error::Parse(format!("bad c1 coefficient {k}"))))
                .collect::<Result<Vec<_>>>()?;
            GradedElement::linear_form(x.presentation(), &ks)
        }
        _ => GradedElement::from_json(x.presentation(), v),
    }
}

fn parse_lines(x: &VarietyModel, entries: &[Value], scalar_key: &str) -> Result<EigenLineSum> {
    let field = x.field();
    let lines = entries
        .iter()
        .map(|e| {
            let s = e.get(scalar_key).ok_or_else(|| Error::Parse(format!("eigen-line needs {scalar_key:?}")))?;
            let c1 = match e.get("c1") {
                Some(c) => c1_from_json(x, c)?,
                None => GradedElement::zero(x.presentation()),
            };
            let mult = match e.get("mult") {
                Some(m) => m
                    .as_u64()
                    .and_then(|m| u32::try_from(m).ok())
                    .ok_or_else(|| Error::Parse(format!("bad multiplicity {m}")))?,
                None => 1,
            };
            EigenLine::new(Scalar::from_json(s, Some(field))?, c1, mult)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenLineSum::new(lines))
}

/// `sum_j m_j mu_j exp(x_j)` in the ring of the fixed component.
pub fn equivariant_ch(b: &EquivariantBundle) -> GradedElement {
    let pres = b.component.variety.presentation();
    let mut out = GradedElement::zero(pres);
    for s in b.lines.summands() {
        let term = exp(&s.c1).expect("c1 has no constant term");
        let weight = s.eigenvalue.scale(&crate::exactnum::int(s.mult as i64));
        out = &out + &term.scale(&weight).expect("same field");
    }
    out
}

/// `prod_j (1 - lambda_j exp(y_j))^{m_j}`, the alternating sum of exterior
/// powers of the conormal bundle with its induced action.
pub fn equivariant_euler(c: &FixedComponent) -> GradedElement {
    let pres = c.variety.presentation();
    let one = GradedElement::one(pres);
    let mut out = one.clone();
    for s in c.conormal.summands() {
        let twisted = exp(&s.c1).expect("c1 has no constant term").scale(&s.eigenvalue).expect("same field");
        out = &out * &(&one - &twisted).pow(s.mult);
    }
    out
}

/// `det(1 - g^* | N^vee) = prod_j (1 - lambda_j)^{m_j}`.
pub fn conormal_determinant(c: &FixedComponent) -> Scalar {
    let field = c.variety.field();
    let one = Scalar::one(field);
    c.conormal
        .summands()
        .iter()
        .fold(one.clone(), |acc, s| &acc * &(&one - &s.eigenvalue).pow(s.mult as i64).expect("nonnegative power"))
}

pub fn localization_invertible(c: &FixedComponent) -> bool {
    !conormal_determinant(c).is_zero()
}

/// One diagonal block of `g = diag(alpha_0 I_{m_0}, alpha_1 I_{m_1}, ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub alpha: Scalar,
    pub mult: u32,
}

impl Block {
    pub fn new(alpha: Scalar, mult: u32) -> Self {
        Block { alpha, mult }
    }
}

/// Checks that blocks share one field, have positive multiplicities summing
/// to `n + 1`, and (unless `allow_repeats`) pairwise distinct nonzero
/// eigenvalues. Returns the common field.
pub fn validate_blocks(n: u32, blocks: &[Block], allow_repeats: bool) -> Result<Arc<Modulus>> {
    let first = blocks.first().ok_or_else(|| Error::InvalidArgument("no blocks".into()))?;
    let field = first.alpha.modulus().clone();
    if blocks.iter().any(|b| !same_field(b.alpha.modulus(), &field)) {
        return Err(Error::ModulusMismatch);
    }
    if blocks.iter().any(|b| b.mult == 0) {
        return Err(Error::InvalidArgument("block multiplicities must be positive".into()));
    }
    let total: u32 = blocks.iter().map(|b| b.mult).sum();
    if total != n + 1 {
        return Err(Error::InvalidArgument(format!("block multiplicities sum to {total}, expected {}", n + 1)));
    }
    if blocks.iter().any(|b| b.alpha.is_zero()) {
        return Err(Error::InvalidArgument("eigenvalues must be nonzero".into()));
    }
    if !allow_repeats {
        for (i, a) in blocks.iter().enumerate() {
            if blocks[..i].iter().any(|b| b.alpha == a.alpha) {
                return Err(Error::InvalidArgument(format!("eigenvalue {} repeated across blocks", a.alpha)));
            }
        }
    }
    Ok(field)
}

/// Fixed data for `g = diag(alpha_i)` on `P^n` acting on `O(k)`.
///
/// Block `i` gives `F_i = P^{m_i - 1}`, whose conormal bundle has a summand
/// `O(-1)^{m_j}` with eigenvalue `alpha_j / alpha_i` for each `j != i`; the
/// fiber of `O(k)` carries eigenvalue `alpha_i^k`. With these conventions the
/// trace on a section monomial `x^e` is `prod alpha^e`.
pub fn diagonal_pn_fixed_data(n: u32, blocks: &[Block], k: i64) -> Result<Vec<(FixedComponent, EquivariantBundle)>> {
    let field = validate_blocks(n, blocks, false)?;
    blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let f = multiprojective(&[b.mult - 1], field.clone());
            let minus_h = GradedElement::linear_form(f.presentation(), &[-1])?;
            let k_h = GradedElement::linear_form(f.presentation(), &[k])?;
            let alpha_inv = b.alpha.inverse()?;
            let conormal = blocks
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, o)| EigenLine::new(&o.alpha * &alpha_inv, minus_h.clone(), o.mult))
                .collect::<Result<Vec<_>>>()?;
            let component = FixedComponent::in_ambient(f, EigenLineSum::new(conormal), n)?;
            let lines = EigenLineSum::new(vec![EigenLine::new(b.alpha.pow(k)?, k_h, 1)?]);
            let bundle = EquivariantBundle::new(component.clone(), lines)?;
            Ok((component, bundle))
        })
        .collect()
}
