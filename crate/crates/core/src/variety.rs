//! Multiprojective spaces, bundles given by rank and total Chern class, and
//! morphisms given by explicit pullback and pushforward data.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::Value;

use crate::cohring::{Exponents, GradedElement, RingPresentation};
use crate::error::{Error, Result};
use crate::exactnum::{Modulus, Scalar};

/// A bundle remembered through its rank and total Chern class. Ranks may be
/// negative so that virtual classes are first-class values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleData {
    rank: i64,
    chern: GradedElement,
}

impl BundleData {
    pub fn new(rank: i64, chern: GradedElement) -> Result<Self> {
        if !chern.constant_term().is_one() {
            return Err(Error::ChernNotNormalized);
        }
        Ok(BundleData { rank, chern })
    }

    /// The trivial bundle of the given rank (`rank = 0` is the zero bundle).
    pub fn trivial(pres: &Arc<RingPresentation>, rank: i64) -> Self {
        BundleData { rank, chern: GradedElement::one(pres) }
    }

    pub fn rank(&self) -> i64 {
        self.rank
    }

    pub fn total_chern(&self) -> &GradedElement {
        &self.chern
    }

    /// `c_k`, the degree-`k` part of the total Chern class.
    pub fn chern_class(&self, k: u32) -> GradedElement {
        self.chern.degree_part(k)
    }

    pub fn presentation(&self) -> &Arc<RingPresentation> {
        self.chern.presentation()
    }

    pub fn direct_sum(&self, other: &BundleData) -> Result<BundleData> {
        Ok(BundleData { rank: self.rank + other.rank, chern: self.chern.checked_mul(&other.chern)? })
    }

    pub fn dual(&self) -> BundleData {
        let mut chern = GradedElement::zero(self.presentation());
        for p in 0..=self.presentation().dimension() {
            let part = self.chern.degree_part(p);
            chern = if p % 2 == 0 { &chern + &part } else { &chern - &part };
        }
        BundleData { rank: self.rank, chern }
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({ "rank": self.rank, "chern": self.chern.to_json() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BundleOp {
    Sum,
    DualOfA,
}

pub fn bundle_combine(a: &BundleData, b: &BundleData, op: BundleOp) -> Result<BundleData> {
    match op {
        BundleOp::Sum => a.direct_sum(b),
        BundleOp::DualOfA => {
            if a.presentation() != b.presentation() {
                return Err(Error::PresentationMismatch);
            }
            Ok(a.dual())
        }
    }
}

/// A product of projective spaces `P^{n_1} x ... x P^{n_r}` (the point when
/// `r = 0`) together with its tangent bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyModel {
    name: String,
    pres: Arc<RingPresentation>,
    tangent: BundleData,
}

impl VarietyModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn presentation(&self) -> &Arc<RingPresentation> {
        &self.pres
    }

    pub fn field(&self) -> &Arc<Modulus> {
        self.pres.field()
    }

    pub fn dimension(&self) -> u32 {
        self.pres.dimension()
    }

    pub fn factors(&self) -> &[u32] {
        self.pres.tops()
    }

    pub fn tangent(&self) -> &BundleData {
        &self.tangent
    }

    pub fn hyperplane(&self, i: usize) -> Result<GradedElement> {
        GradedElement::generator(&self.pres, i)
    }

    /// Chern roots of the tangent bundle in K-theory: `n_i + 1` copies of
    /// `h_i` per factor (the trivial summand from the Euler sequence has root 0).
    pub fn tangent_roots(&self) -> Vec<(u32, GradedElement)> {
        (0..self.pres.generator_count())
            .map(|i| (self.factors()[i] + 1, GradedElement::generator(&self.pres, i).expect("index in range")))
            .collect()
    }

    pub fn line_bundle(&self, ks: &[i64]) -> Result<BundleData> {
        line_bundle(self, ks)
    }

    pub fn hodge_diagonal_dims(&self) -> Vec<u64> {
        hodge_diagonal_dims(self)
    }

    /// Parses `{"factors": [...], "modulus": ...}`.
    pub fn from_json(v: &Value) -> Result<VarietyModel> {
        let factors = v
            .get("factors")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("variety needs a \"factors\" array".into()))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .ok_or_else(|| Error::Parse(format!("bad factor dimension {x}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        let modulus = match v.get("modulus") {
            Some(m) => Modulus::from_json(m)?,
            None => Modulus::rational(),
        };
        Ok(multiprojective(&factors, Arc::new(modulus)))
    }
}

pub fn multiprojective(factors: &[u32], field: Arc<Modulus>) -> VarietyModel {
    let pres = RingPresentation::new(factors.to_vec(), field);
    let mut chern = GradedElement::one(&pres);
    for (i, &n) in factors.iter().enumerate() {
        let h = GradedElement::generator(&pres, i).expect("index in range");
        let one_plus_h = &GradedElement::one(&pres) + &h;
        chern = &chern * &one_plus_h.pow(n + 1);
    }
    let name = if factors.is_empty() {
        "pt".to_string()
    } else {
        factors.iter().map(|n| format!("P{n}")).collect::<Vec<_>>().join("x")
    };
    let tangent = BundleData { rank: pres.dimension() as i64, chern };
    VarietyModel { name, pres, tangent }
}

pub fn point(field: Arc<Modulus>) -> VarietyModel {
    multiprojective(&[], field)
}

/// `O(k_1, ..., k_r)` with total Chern class `1 + sum k_i h_i`.
pub fn line_bundle(x: &VarietyModel, ks: &[i64]) -> Result<BundleData> {
    let c1 = GradedElement::linear_form(&x.pres, ks)?;
    Ok(BundleData { rank: 1, chern: &GradedElement::one(&x.pres) + &c1 })
}

/// Number of surviving monomials in each degree `0..=dim`.
pub fn hodge_diagonal_dims(x: &VarietyModel) -> Vec<u64> {
    let mut dims = vec![0u64; x.dimension() as usize + 1];
    for m in x.pres.monomial_basis() {
        dims[m.iter().sum::<u32>() as usize] += 1;
    }
    dims
}

/// A morphism `source -> target` recorded as a ring map on cohomology
/// (images of the target generators) and a linear pushforward map on the
/// source monomial basis.
#[derive(Clone, Debug)]
pub struct MorphismModel {
    source: VarietyModel,
    target: VarietyModel,
    pullback_images: Vec<GradedElement>,
    pushforward: BTreeMap<Exponents, GradedElement>,
}

impl MorphismModel {
    /// Validates shapes and the ring-map relations `f^*(h_j)^{n_j+1} = 0`.
    /// Basis monomials missing from `pushforward` map to zero.
    pub fn new(
        source: VarietyModel,
        target: VarietyModel,
        pullback_images: Vec<GradedElement>,
        pushforward: BTreeMap<Exponents, GradedElement>,
    ) -> Result<Self> {
        let r = target.pres.generator_count();
        if pullback_images.len() != r {
            return Err(Error::ArityMismatch { expected: r, got: pullback_images.len() });
        }
        for (j, img) in pullback_images.iter().enumerate() {
            if img.presentation() != source.presentation() {
                return Err(Error::PresentationMismatch);
            }
            if !img.pow(target.factors()[j] + 1).is_zero() {
                return Err(Error::InvalidMorphism(format!("image of h_{} violates its nilpotency relation", j + 1)));
            }
        }
        for (e, img) in &pushforward {
            if !source.pres.admits(e) {
                return Err(Error::ExponentOutOfRange(e.clone()));
            }
            if img.presentation() != target.presentation() {
                return Err(Error::PresentationMismatch);
            }
        }
        Ok(MorphismModel { source, target, pullback_images, pushforward })
    }

    pub fn source(&self) -> &VarietyModel {
        &self.source
    }

    pub fn target(&self) -> &VarietyModel {
        &self.target
    }

    pub fn pullback(&self, y: &GradedElement) -> Result<GradedElement> {
        if y.presentation() != self.target.presentation() {
            return Err(Error::PresentationMismatch);
        }
        let mut out = GradedElement::zero(&self.source.pres);
        for (e, c) in y.terms() {
            let mut mono = GradedElement::from_scalar(&self.source.pres, c.clone());
            for (img, &k) in self.pullback_images.iter().zip(e) {
                mono = &mono * &img.pow(k);
            }
            out = &out + &mono;
        }
        Ok(out)
    }

    pub fn pushforward(&self, x: &GradedElement) -> Result<GradedElement> {
        if x.presentation() != self.source.presentation() {
            return Err(Error::PresentationMismatch);
        }
        let mut out = GradedElement::zero(&self.target.pres);
        for (e, c) in x.terms() {
            if let Some(img) = self.pushforward.get(e) {
                out = &out + &img.scale(c)?;
            }
        }
        Ok(out)
    }

    /// `f_*(x f^*y) = f_*(x) y` on every pair of basis monomials.
    pub fn check_projection_formula(&self) -> Result<bool> {
        let one_s = Scalar::one(self.source.field());
        let one_t = Scalar::one(self.target.field());
        for xe in self.source.pres.monomial_basis() {
            let x = GradedElement::monomial(&self.source.pres, &xe, one_s.clone())?;
            let fx = self.pushforward(&x)?;
            for ye in self.target.pres.monomial_basis() {
                let y = GradedElement::monomial(&self.target.pres, &ye, one_t.clone())?;
                let lhs = self.pushforward(&(&x * &self.pullback(&y)?))?;
                if lhs != &fx * &y {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Projection of a product onto the factors listed in `keep` (in that order).
pub fn projection_morphism(x: &VarietyModel, keep: &[usize]) -> Result<MorphismModel> {
    let r = x.pres.generator_count();
    if keep.is_empty() {
        return Err(Error::InvalidIndexSet("kept factor set is empty".into()));
    }
    let mut seen = vec![false; r];
    for &i in keep {
        if i >= r {
            return Err(Error::InvalidIndexSet(format!("factor {i} out of range for {} factors", r)));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidIndexSet(format!("factor {i} repeated")));
        }
    }
    let target_factors: Vec<u32> = keep.iter().map(|&i| x.factors()[i]).collect();
    let target = multiprojective(&target_factors, x.field().clone());
    let pullback_images = keep.iter().map(|&i| GradedElement::generator(&x.pres, i)).collect::<Result<Vec<_>>>()?;
    let one = Scalar::one(x.field());
    let mut pushforward = BTreeMap::new();
    for e in x.pres.monomial_basis() {
        let fiber_top = (0..r).filter(|i| !seen[*i]).all(|i| e[i] == x.factors()[i]);
        if fiber_top {
            let kept: Vec<u32> = keep.iter().map(|&i| e[i]).collect();
            pushforward.insert(e, GradedElement::monomial(&target.pres, &kept, one.clone())?);
        }
    }
    MorphismModel::new(x.clone(), target, pullback_images, pushforward)
}

/// The inclusion of a linear `P^m` into `X = P^n`.
pub fn linear_embedding(m: u32, x: &VarietyModel) -> Result<MorphismModel> {
    let n = match x.factors() {
        [n] => *n,
        _ => return Err(Error::InvalidArgument("linear embeddings target a single projective space".into())),
    };
    if m > n {
        return Err(Error::InvalidArgument(format!("cannot embed P{m} into P{n}")));
    }
    let source = multiprojective(&[m], x.field().clone());
    let one = Scalar::one(x.field());
    let pullback_images = vec![GradedElement::generator(&source.pres, 0)?];
    let pushforward = (0..=m)
        .map(|a| Ok((vec![a], GradedElement::monomial(&x.pres, &[a + n - m], one.clone())?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    MorphismModel::new(source, x.clone(), pullback_images, pushforward)
}
