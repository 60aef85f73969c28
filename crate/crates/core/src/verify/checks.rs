//! Both sides of each identity. The left side always goes through
//! characteristic classes; the right side comes from an oracle in
//! [`super::oracle`] wherever one exists.

use std::sync::Arc;

use serde_json::Value;

use super::oracle::{binomial_poly, euler_char_oracle, koszul_class, section_trace_oracle};
use super::report::Report;
use crate::charclass::{chern_character, mult_class, split_mult_class, todd_class, todd_class_with, SeriesSpec};
use crate::cohring::{exp, GradedElement};
use crate::equivariant::{
    conormal_determinant, diagonal_pn_fixed_data, equivariant_ch, equivariant_euler, localization_invertible,
    validate_blocks, Block, EigenLine, EigenLineSum, EquivariantBundle, FixedComponent,
};
use crate::error::{Error, Result};
use crate::exactnum::{int, Modulus, Scalar};
use crate::ncseries::{dexp_sides, matrix_dexp_sides, NilpotentMatrix};
use crate::variety::{linear_embedding, multiprojective, point, projection_morphism, BundleData, VarietyModel};

/// Largest number of coordinates outside the source block for which the
/// equivariant Koszul sum (one term per subset) is expanded.
const MAX_KOSZUL_COORDS: usize = 16;

fn sum_of_lines(x: &VarietyModel, lines: &[Vec<i64>]) -> Result<BundleData> {
    lines.iter().try_fold(BundleData::trivial(x.presentation(), 0), |acc, l| acc.direct_sum(&x.line_bundle(l)?))
}

fn pieces_json(parts: &[GradedElement]) -> Value {
    Value::Array(parts.iter().map(GradedElement::to_json).collect())
}

/// `integrate(ch(E) td_X)` against `chi(X, E)` for `E` a sum of lines.
pub fn hrr_check(x: &VarietyModel, lines: &[Vec<i64>]) -> Result<Report> {
    hrr_check_with(x, lines, &SeriesSpec::todd(x.dimension() as usize))
}

/// As [`hrr_check`], with the Todd class built from `todd_series`.
pub fn hrr_check_with(x: &VarietyModel, lines: &[Vec<i64>], todd_series: &SeriesSpec) -> Result<Report> {
    let e = sum_of_lines(x, lines)?;
    let lhs = (&chern_character(&e) * &todd_class_with(x, todd_series)?).integrate();
    let rhs = Scalar::from_rational(x.field(), euler_char_oracle(x.factors(), lines)?);
    Ok(Report::compare("hrr", lhs.to_json(), rhs.to_json()))
}

/// `f_*(ch(O(k)) td_X)` against `chi(fibre part) ch(O(k_kept)) td_Y` for
/// the projection onto the factors in `keep`.
pub fn grr_projection_check(x: &VarietyModel, keep: &[usize], line: &[i64]) -> Result<Report> {
    let f = projection_morphism(x, keep)?;
    let e = x.line_bundle(line)?;
    let lhs = f.pushforward(&(&chern_character(&e) * &todd_class(x)))?;

    let y = f.target();
    let chi: crate::exactnum::Rational =
        (0..x.factors().len()).filter(|i| !keep.contains(i)).map(|i| binomial_poly(x.factors()[i], line[i])).product();
    let kept: Vec<i64> = keep.iter().map(|&i| line[i]).collect();
    let rhs = (&chern_character(&y.line_bundle(&kept)?) * &todd_class(y)).scale_rational(&chi);
    Ok(Report::compare("grr_projection", lhs.to_json(), rhs.to_json()))
}

/// `j_*(ch(O(k)) td_{P^m})` against `ch([j_* O(k)]) td_{P^n}` with the
/// K-class taken from the Koszul resolution.
pub fn grr_embedding_check(m: u32, n: u32, k: i64) -> Result<Report> {
    let y = multiprojective(&[n], Arc::new(Modulus::rational()));
    let j = linear_embedding(m, &y)?;
    let f = j.source();
    let lhs = j.pushforward(&(&chern_character(&f.line_bundle(&[k])?) * &todd_class(f)))?;

    let mut ch = GradedElement::zero(y.presentation());
    for (c, twist) in koszul_class(m, n, k)? {
        ch = &ch + &chern_character(&y.line_bundle(&[twist])?).scale_rational(&int(c));
    }
    let rhs = &ch * &todd_class(&y);
    Ok(Report::compare("grr_embedding", lhs.to_json(), rhs.to_json()))
}

fn nonnegative_twist(k: i64) -> Result<()> {
    if k < 0 {
        Err(Error::InvalidArgument(format!("twist k = {k} must be nonnegative for a section trace")))
    } else {
        Ok(())
    }
}

/// Fails with a localization error when two blocks share an eigenvalue,
/// since the conormal bundle then has an eigenvalue ratio of 1.
fn require_distinct(blocks: &[Block]) -> Result<()> {
    for (i, a) in blocks.iter().enumerate() {
        if let Some(j) = blocks[..i].iter().position(|b| b.alpha == a.alpha) {
            return Err(Error::LocalizationFailure(format!(
                "blocks {j} and {i} share eigenvalue {}, so det(1 - g^*) on the conormal bundle vanishes",
                a.alpha
            )));
        }
    }
    Ok(())
}

/// Sum over isolated fixed points of `alpha_i^k / prod_{j != i}(1 - alpha_j/alpha_i)`
/// against the trace on the monomial basis of `H^0(P^n, O(k))`.
pub fn atiyah_bott_check(n: u32, blocks: &[Block], k: i64) -> Result<Report> {
    if blocks.iter().any(|b| b.mult != 1) {
        return Err(Error::InvalidArgument("isolated fixed points need every block to have multiplicity 1".into()));
    }
    nonnegative_twist(k)?;
    let field = validate_blocks(n, blocks, true)?;
    let pt = point(field.clone());
    let zero = GradedElement::zero(pt.presentation());

    let mut lhs = Scalar::zero(&field);
    let mut notes = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        let inv = b.alpha.inverse()?;
        let conormal = blocks
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, o)| EigenLine::new(&o.alpha * &inv, zero.clone(), 1))
            .collect::<Result<Vec<_>>>()?;
        let comp = FixedComponent::in_ambient(pt.clone(), EigenLineSum::new(conormal), n)?;
        if !localization_invertible(&comp) {
            return Err(Error::LocalizationFailure(format!(
                "det(1 - d_x g) vanishes at fixed point {i}: an eigenvalue ratio equals 1"
            )));
        }
        let term = b.alpha.pow(k)?.checked_div(&conormal_determinant(&comp))?;
        notes.push(format!("fixed point {i}: {term}"));
        lhs = &lhs + &term;
    }
    let rhs = section_trace_oracle(n, blocks, k)?;
    Ok(Report::compare("atiyah_bott", lhs.to_json(), rhs.to_json()).with_notes(notes))
}

/// `sum_F integrate_F(ch(E, t) td_F / e_g)` over the fixed components of
/// `diag(alpha_i)` on `P^n`, against the section trace.
pub fn equivariant_hrr_check(n: u32, blocks: &[Block], k: i64) -> Result<Report> {
    nonnegative_twist(k)?;
    let field = validate_blocks(n, blocks, true)?;
    require_distinct(blocks)?;

    let mut lhs = Scalar::zero(&field);
    let mut notes = Vec::new();
    for (i, (comp, bundle)) in diagonal_pn_fixed_data(n, blocks, k)?.iter().enumerate() {
        if !localization_invertible(comp) {
            return Err(Error::LocalizationFailure(format!("det(1 - g^*) vanishes on component {i}")));
        }
        let inv_euler = equivariant_euler(comp).invert_unit()?;
        let term = (&(&equivariant_ch(bundle) * &todd_class(comp.variety())) * &inv_euler).integrate();
        notes.push(format!("component {i} ({}): {term}", comp.variety().name()));
        lhs = &lhs + &term;
    }
    let rhs = section_trace_oracle(n, blocks, k)?;
    Ok(Report::compare("equivariant_hrr", lhs.to_json(), rhs.to_json()).with_notes(notes))
}

/// Equivariant GRR for the inclusion of the fixed component `F_c` of block
/// `component` into `P^n`, with `E = O_{F_c}(k)` whose fibre eigenvalue is
/// `mu` (default `alpha_c^k`).
///
/// The sides are compared on every fixed component `F_l`. The left side is
/// `ch(E, t) td_F` on `F_c` and zero elsewhere. The right side restricts the
/// equivariant Koszul resolution of `F_c` to `F_l`: one term per set `S` of
/// coordinates outside block `c`, with sign `(-1)^{|S|}`, first Chern class
/// `(k - |S|) h_l` and eigenvalue `mu (alpha_l/alpha_c)^k prod_{j in S} alpha_j/alpha_l`,
/// multiplied by `td_{F_l} / e_g`.
pub fn equivariant_grr_check(
    n: u32,
    blocks: &[Block],
    component: usize,
    k: i64,
    mu: Option<&Scalar>,
) -> Result<Report> {
    let field = validate_blocks(n, blocks, true)?;
    require_distinct(blocks)?;
    let source = blocks.get(component).ok_or_else(|| {
        Error::InvalidArgument(format!("component {component} out of range for {} blocks", blocks.len()))
    })?;
    let source_weight = source.alpha.pow(k)?;
    let mu = match mu {
        Some(m) => m.embed_into(&field)?,
        None => source_weight.clone(),
    };
    if mu.is_zero() {
        return Err(Error::InvalidArgument("fibre eigenvalue must be nonzero".into()));
    }
    let rescale = mu.checked_div(&source_weight)?;
    let outside: Vec<&Scalar> = blocks
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != component)
        .flat_map(|(_, b)| std::iter::repeat_n(&b.alpha, b.mult as usize))
        .collect();
    if outside.len() > MAX_KOSZUL_COORDS {
        return Err(Error::InvalidArgument(format!(
            "at most {MAX_KOSZUL_COORDS} coordinates outside the source block"
        )));
    }

    let data = diagonal_pn_fixed_data(n, blocks, k)?;
    let mut lhs = Vec::with_capacity(data.len());
    let mut rhs = Vec::with_capacity(data.len());
    let mut notes = Vec::new();
    for (l, (comp, _)) in data.iter().enumerate() {
        if !localization_invertible(comp) {
            return Err(Error::LocalizationFailure(format!("det(1 - g^*) vanishes on component {l}")));
        }
        let f = comp.variety();
        let pres = f.presentation();
        let td = todd_class(f);

        lhs.push(if l == component {
            let c1 = GradedElement::linear_form(pres, &[k])?;
            let e = EquivariantBundle::new(comp.clone(), EigenLineSum::new(vec![EigenLine::new(mu.clone(), c1, 1)?]))?;
            &equivariant_ch(&e) * &td
        } else {
            GradedElement::zero(pres)
        });

        let alpha_l = &blocks[l].alpha;
        let alpha_l_inv = alpha_l.inverse()?;
        let base = &alpha_l.pow(k)? * &rescale;
        let mut koszul = GradedElement::zero(pres);
        for mask in 0u32..(1 << outside.len()) {
            let mut weight = base.clone();
            for (b, a) in outside.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    weight = &(&weight * *a) * &alpha_l_inv;
                }
            }
            let size = mask.count_ones() as i64;
            let term = exp(&GradedElement::linear_form(pres, &[k - size])?)?.scale(&weight)?;
            koszul = if size % 2 == 0 { &koszul + &term } else { &koszul - &term };
        }
        rhs.push(&(&koszul * &td) * &equivariant_euler(comp).invert_unit()?);
        notes.push(format!("component {l}: {}", f.name()));
    }
    Ok(Report::compare("equivariant_grr", pieces_json(&lhs), pieces_json(&rhs)).with_notes(notes))
}

/// `mult_class` through power sums against `split_mult_class` through
/// explicit roots: of `T_X` by default, or of a sum of line bundles.
pub fn todd_consistency_check(x: &VarietyModel, series: &SeriesSpec, lines: Option<&[Vec<i64>]>) -> Result<Report> {
    let series = series.with_order(x.dimension() as usize);
    let (bundle, roots) = match lines {
        None => (x.tangent().clone(), x.tangent_roots()),
        Some(ls) => {
            let roots = ls
                .iter()
                .map(|l| Ok((1, GradedElement::linear_form(x.presentation(), l)?)))
                .collect::<Result<Vec<_>>>()?;
            (sum_of_lines(x, ls)?, roots)
        }
    };
    let lhs = mult_class(&series, &bundle)?;
    let rhs = split_mult_class(x.presentation(), &series, &roots)?;
    Ok(Report::compare("todd_consistency", lhs.to_json(), rhs.to_json()))
}

/// Both sides of the derivative-of-exponential identity on words of
/// length at most `trunc`.
pub fn dexp_word_check(trunc: usize) -> Result<Report> {
    let (lhs, rhs) = dexp_sides(trunc)?;
    Ok(Report::compare("dexp", lhs.to_json(), rhs.to_json()))
}

/// The same identity evaluated on a pair of nilpotent matrices.
pub fn dexp_matrix_check(x: &NilpotentMatrix, y: &NilpotentMatrix) -> Result<Report> {
    let (lhs, rhs) = matrix_dexp_sides(x, y)?;
    Ok(Report::compare("dexp", lhs.to_json(), rhs.to_json()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use serde_json::json;

    fn q() -> Arc<Modulus> {
        Arc::new(Modulus::rational())
    }

    fn qs(n: i64, d: i64) -> Scalar {
        Scalar::from_rational(&q(), rat(n, d))
    }

    fn blocks(spec: &[(Scalar, u32)]) -> Vec<Block> {
        spec.iter().map(|(a, m)| Block::new(a.clone(), *m)).collect()
    }

    #[test]
    fn hrr_examples() {
        let p2 = multiprojective(&[2], q());
        let r = hrr_check(&p2, &[vec![1]]).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, json!("3"));
        let r = hrr_check(&multiprojective(&[1], q()), &[vec![-1]]).unwrap();
        assert_eq!((r.equal, r.lhs), (true, json!("0")));
        let r = hrr_check(&point(q()), &[vec![]]).unwrap();
        assert_eq!((r.equal, r.rhs), (true, json!("1")));
    }

    #[test]
    fn hrr_negative_control() {
        let p1 = multiprojective(&[1], q());
        let bad = SeriesSpec::new("perturbed", vec![rat(1, 1), rat(1, 3)]);
        let r = hrr_check_with(&p1, &[vec![1]], &bad).unwrap();
        assert!(!r.equal);
        assert_eq!((r.lhs, r.rhs), (json!("5/3"), json!("2")));
    }

    #[test]
    fn grr_projection_examples() {
        let x = multiprojective(&[1, 1], q());
        let two_plus_four_h = json!({"terms": [{"exps": [0], "coeff": "2"}, {"exps": [1], "coeff": "4"}]});
        let r = grr_projection_check(&x, &[0], &[1, 1]).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, two_plus_four_h);
        for a in -3..=3 {
            let r = grr_projection_check(&x, &[0], &[a, -1]).unwrap();
            assert!(r.equal);
            assert_eq!(r.lhs, json!({"terms": []}));
        }
        let r = grr_projection_check(&x, &[0], &[0, 0]).unwrap();
        assert_eq!(r.lhs, json!({"terms": [{"exps": [0], "coeff": "1"}, {"exps": [1], "coeff": "1"}]}));
        assert!(r.equal);
        assert!(grr_projection_check(&x, &[], &[0, 0]).is_err());
    }

    #[test]
    fn grr_embedding_examples() {
        let r = grr_embedding_check(1, 2, 0).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, json!({"terms": [{"exps": [1], "coeff": "1"}, {"exps": [2], "coeff": "1"}]}));
        let r = grr_embedding_check(0, 1, 0).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, json!({"terms": [{"exps": [1], "coeff": "1"}]}));
        for k in -3..=3 {
            assert!(grr_embedding_check(2, 2, k).unwrap().equal);
        }
        assert!(grr_embedding_check(3, 2, 0).is_err());
    }

    #[test]
    fn atiyah_bott_examples() {
        let b = blocks(&[(qs(1, 1), 1), (qs(2, 1), 1)]);
        let r = atiyah_bott_check(1, &b, 2).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, json!("7"));
        for a in [qs(2, 1), qs(-5, 3), qs(1, 7)] {
            let r = atiyah_bott_check(1, &blocks(&[(qs(1, 1), 1), (a, 1)]), 0).unwrap();
            assert_eq!((r.equal, r.lhs), (true, json!("1")));
        }
        let e = atiyah_bott_check(1, &blocks(&[(qs(1, 1), 1), (qs(1, 1), 1)]), 0).unwrap_err();
        assert!(matches!(e, Error::LocalizationFailure(_)));
        assert!(atiyah_bott_check(1, &b, -1).is_err());
        assert!(atiyah_bott_check(2, &blocks(&[(qs(1, 1), 2), (qs(2, 1), 1)]), 1).is_err());
    }

    #[test]
    fn equivariant_hrr_examples() {
        let b = blocks(&[(qs(1, 1), 2), (qs(2, 1), 1)]);
        let r = equivariant_hrr_check(2, &b, 1).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, json!("4"));
        assert_eq!(r.notes, vec!["component 0 (P1): -4".to_string(), "component 1 (P0): 8".to_string()]);

        // single block: alpha^k chi(P^n, O(k))
        let r = equivariant_hrr_check(2, &blocks(&[(qs(3, 1), 3)]), 2).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, json!("54"));

        // agrees with Atiyah-Bott when every block is simple
        let b = blocks(&[(qs(1, 1), 1), (qs(2, 1), 1), (qs(-1, 3), 1)]);
        for k in 0..4 {
            assert_eq!(equivariant_hrr_check(2, &b, k).unwrap().lhs, atiyah_bott_check(2, &b, k).unwrap().lhs);
        }
        let e = equivariant_hrr_check(2, &blocks(&[(qs(2, 1), 2), (qs(2, 1), 1)]), 1).unwrap_err();
        assert!(matches!(e, Error::LocalizationFailure(_)));
    }

    #[test]
    fn equivariant_grr_examples() {
        let alpha = qs(5, 1);
        let b = blocks(&[(qs(1, 1), 1), (alpha, 1)]);
        let one = qs(1, 1);
        let r = equivariant_grr_check(1, &b, 1, 0, Some(&one)).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, json!([{"terms": []}, {"terms": [{"exps": [0], "coeff": "1"}]}]));

        let b = blocks(&[(qs(1, 1), 2), (qs(2, 1), 1), (qs(-3, 1), 1)]);
        for c in 0..3 {
            for k in -2..=2 {
                assert!(equivariant_grr_check(3, &b, c, k, None).unwrap().equal, "component {c}, k {k}");
            }
        }
        // self-inclusion of the only component
        let r = equivariant_grr_check(2, &blocks(&[(qs(3, 1), 3)]), 0, 1, None).unwrap();
        assert!(r.equal);
        assert!(equivariant_grr_check(2, &b, 3, 0, None).is_err());
    }

    #[test]
    fn todd_consistency_examples() {
        for f in [vec![0], vec![1], vec![2], vec![1, 2], vec![1, 1, 1]] {
            let x = multiprojective(&f, q());
            let d = x.dimension() as usize;
            assert!(todd_consistency_check(&x, &SeriesSpec::todd(d), None).unwrap().equal);
            assert!(todd_consistency_check(&x, &SeriesSpec::exp(d), None).unwrap().equal);
        }
        let x = multiprojective(&[1, 2], q());
        let lines = [vec![1, -1], vec![2, 0], vec![-3, 1]];
        assert!(todd_consistency_check(&x, &SeriesSpec::todd(3), Some(&lines)).unwrap().equal);
        let p2 = multiprojective(&[2], q());
        let r = todd_consistency_check(&p2, &SeriesSpec::todd(2), None).unwrap();
        assert_eq!(
            r.lhs,
            json!({"terms": [{"exps": [0], "coeff": "1"}, {"exps": [1], "coeff": "3/2"}, {"exps": [2], "coeff": "1"}]})
        );
    }

    #[test]
    fn dexp_reports() {
        for n in 1..=4 {
            assert!(dexp_word_check(n).unwrap().equal);
        }
        assert!(dexp_word_check(0).is_err());
        let x = NilpotentMatrix::from_ints(&[vec![0, 1, 2], vec![0, 0, 3], vec![0, 0, 0]]).unwrap();
        let y = NilpotentMatrix::from_ints(&[vec![0, -1, 0], vec![0, 0, 5], vec![0, 0, 0]]).unwrap();
        assert!(dexp_matrix_check(&x, &y).unwrap().equal);
    }
}
