//! Reference values computed without characteristic classes: binomial
//! polynomials, monomial enumeration and Koszul K-classes.

use num_traits::{One, Zero};

use crate::equivariant::{validate_blocks, Block};
use crate::error::{Error, Result};
use crate::exactnum::{int, Rational, Scalar};

/// `binom(n + k, n)` as the polynomial `(k+1)(k+2)...(k+n)/n!` in `k`,
/// which is `chi(P^n, O(k))` for every integer `k`.
pub fn binomial_poly(n: u32, k: i64) -> Rational {
    let mut num = Rational::one();
    for j in 1..=n as i64 {
        num *= int(k + j);
        num /= int(j);
    }
    num
}

/// `chi(X, E)` for `X = prod P^{n_i}` and `E` a sum of line bundles,
/// by Kunneth and the binomial polynomial.
pub fn euler_char_oracle(factors: &[u32], lines: &[Vec<i64>]) -> Result<Rational> {
    let mut total = Rational::zero();
    for ks in lines {
        if ks.len() != factors.len() {
            return Err(Error::ArityMismatch { expected: factors.len(), got: ks.len() });
        }
        total += factors.iter().zip(ks).map(|(&n, &k)| binomial_poly(n, k)).product::<Rational>();
    }
    Ok(total)
}

/// Ordinary binomial coefficient `C(n, a)`.
pub fn binomial(n: u32, a: u32) -> i64 {
    if a > n {
        return 0;
    }
    (0..a as i64).fold(1i64, |acc, j| acc * (n as i64 - j) / (j + 1))
}

/// `[j_* O_{P^m}(k)]` in `K(P^n)` from the Koszul resolution of a linear
/// subspace, as `(coefficient, twist)` pairs: `sum_a (-1)^a C(n-m, a) O(k-a)`.
pub fn koszul_class(m: u32, n: u32, k: i64) -> Result<Vec<(i64, i64)>> {
    if m > n {
        return Err(Error::InvalidArgument(format!("cannot embed P{m} into P{n}")));
    }
    let c = n - m;
    Ok((0..=c).map(|a| (if a % 2 == 0 { 1 } else { -1 } * binomial(c, a), k - a as i64)).collect())
}

/// Trace of `g = diag(alpha)` on the monomial basis of `H^0(P^n, O(k))`:
/// the sum over exponent vectors `e` with `|e| = k` of `prod alpha^e`.
pub fn section_trace_oracle(n: u32, blocks: &[Block], k: i64) -> Result<Scalar> {
    if k < 0 {
        return Err(Error::InvalidArgument("section traces need k >= 0".into()));
    }
    let field = validate_blocks(n, blocks, true)?;
    let weights: Vec<&Scalar> = blocks.iter().flat_map(|b| std::iter::repeat_n(&b.alpha, b.mult as usize)).collect();

    fn go(weights: &[&Scalar], remaining: u32, acc: &Scalar, out: &mut Scalar) {
        match weights.split_first() {
            None => {
                if remaining == 0 {
                    *out = &*out + acc;
                }
            }
            Some((w, rest)) => {
                let mut cur = acc.clone();
                for e in 0..=remaining {
                    if e > 0 {
                        cur = &cur * *w;
                    }
                    go(rest, remaining - e, &cur, out);
                }
            }
        }
    }

    let mut out = Scalar::zero(&field);
    go(&weights, k as u32, &Scalar::one(&field), &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, Modulus};
    use std::sync::Arc;

    fn qs(r: Rational) -> Scalar {
        Scalar::rational(r)
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(euler_char_oracle(&[2], &[vec![1]]).unwrap(), int(3));
        assert_eq!(euler_char_oracle(&[1], &[vec![-1]]).unwrap(), int(0));
        assert_eq!(euler_char_oracle(&[2], &[vec![-3]]).unwrap(), int(1));
        assert_eq!(euler_char_oracle(&[], &[vec![]]).unwrap(), int(1));
        // Serre duality on P^1 x P^1: chi(O(-2,-2)) = chi(O) = 1
        assert_eq!(euler_char_oracle(&[1, 1], &[vec![-2, -2]]).unwrap(), int(1));
        assert_eq!(euler_char_oracle(&[1, 2], &[vec![1, 1], vec![0, 0]]).unwrap(), int(2 * 3 + 1));
    }

    #[test]
    fn binomial_poly_matches_counting_for_nonnegative_k() {
        for n in 0..5u32 {
            for k in 0..8i64 {
                // number of monomials of degree k in n+1 variables
                let count = binomial(n + k as u32, n);
                assert_eq!(binomial_poly(n, k), int(count));
            }
        }
    }

    #[test]
    fn koszul() {
        assert_eq!(koszul_class(1, 2, 0).unwrap(), vec![(1, 0), (-1, -1)]);
        assert_eq!(koszul_class(0, 2, 3).unwrap(), vec![(1, 3), (-2, 2), (1, 1)]);
        assert_eq!(koszul_class(2, 2, 1).unwrap(), vec![(1, 1)]);
    }

    #[test]
    fn section_traces() {
        let a = qs(int(7));
        let blocks = [Block::new(qs(int(1)), 1), Block::new(a.clone(), 1)];
        let expect = &(&Scalar::one(a.modulus()) + &a) + &(&a * &a);
        assert_eq!(section_trace_oracle(1, &blocks, 2).unwrap(), expect);

        let blocks = [Block::new(qs(int(1)), 2), Block::new(qs(int(2)), 1)];
        assert_eq!(section_trace_oracle(2, &blocks, 1).unwrap(), qs(int(4)));
        assert!(section_trace_oracle(2, &blocks, 0).unwrap().is_one());
        assert!(section_trace_oracle(2, &blocks, -1).is_err());

        let f = Arc::new(Modulus::cyclotomic(3).unwrap());
        let z = Scalar::generator(&f);
        let blocks = [Block::new(Scalar::one(&f), 1), Block::new(z.clone(), 1), Block::new(&z * &z, 1)];
        // prod 1/(1 - x z^i) = 1/(1 - x^3), so h_3(1, z, z^2) = 1 and h_2 = 0
        assert!(section_trace_oracle(2, &blocks, 3).unwrap().is_one());
        assert!(section_trace_oracle(2, &blocks, 2).unwrap().is_zero());
        assert_eq!(section_trace_oracle(2, &blocks, 6).unwrap(), Scalar::from_rational(&f, rat(1, 1)));
    }
}
