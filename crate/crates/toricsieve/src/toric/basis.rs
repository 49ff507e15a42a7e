//! Monomial bases of graded pieces of the homogeneous coordinate ring.
//! Enumeration is bounded by the positivity witness and results come in
//! graded-lex order (total degree, then exponent vector), the canonical
//! serialization order for sections.

use super::classgroup::{ClassGroup, DivisorClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// All monomials of the given class, in graded-lex order. Finiteness is
/// guaranteed by the positivity witness; its absence is an error.
pub fn monomial_basis(cg: &ClassGroup, class: &DivisorClass) -> Result<Vec<Monomial>> {
    let witness = cg.positivity_witness.as_ref().ok_or(Error::UnboundedPiece)?;
    let d = cg.grading.len();
    let weights: Vec<i64> = cg
        .grading
        .iter()
        .map(|g| witness.iter().zip(&g.free).map(|(a, b)| a * b).sum())
        .collect();
    debug_assert!(weights.iter().all(|&w| w >= 1));
    let budget: i64 = witness.iter().zip(&class.free).map(|(a, b)| a * b).sum();
    let mut out = Vec::new();
    if budget < 0 {
        return Ok(out);
    }
    let mut exps = vec![0u32; d];
    enumerate(cg, class, &weights, budget, 0, &mut exps, &mut out);
    out.sort_by_key(|m| (m.total_degree(), m.exponents.clone()));
    Ok(out)
}

fn enumerate(
    cg: &ClassGroup,
    class: &DivisorClass,
    weights: &[i64],
    budget: i64,
    var: usize,
    exps: &mut Vec<u32>,
    out: &mut Vec<Monomial>,
) {
    if var == weights.len() {
        if budget == 0 && cg.degree_of_exponents(exps) == *class {
            out.push(Monomial {
                exponents: exps.clone(),
            });
        }
        return;
    }
    let max = budget / weights[var];
    for e in 0..=max {
        exps[var] = e as u32;
        enumerate(cg, class, weights, budget - e * weights[var], var + 1, exps, out);
    }
    exps[var] = 0;
}

/// Maximal total degree over the basis of the graded piece.
pub fn standard_degree_delta(cg: &ClassGroup, class: &DivisorClass) -> Result<u32> {
    let basis = monomial_basis(cg, class)?;
    basis
        .iter()
        .map(Monomial::total_degree)
        .max()
        .ok_or(Error::EmptyPiece)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::classgroup::class_group;
    use crate::toric::fan::{product_fan, projective_space, weighted_projective};

    #[test]
    fn p2_cubics() {
        let cg = class_group(&projective_space(2)).unwrap();
        let basis = monomial_basis(&cg, &cg.line(3).unwrap()).unwrap();
        assert_eq!(basis.len(), 10);
        // graded-lex: all have total degree 3, sorted by exponent vector
        assert!(basis.windows(2).all(|w| w[0].exponents < w[1].exponents));
    }

    #[test]
    fn weighted_piece_counts() {
        // P(1,1,w): dim of the degree-(kw+l) piece is sum over i of
        // ((k-i)w + l + 1), matching f = sum z^i f_i(x, y)
        for w in [3u64, 5] {
            let cg = class_group(&weighted_projective(&[1, 1, w]).unwrap()).unwrap();
            for k in 0..3i64 {
                for l in 0..w as i64 {
                    let class = cg.line(k * w as i64 + l).unwrap();
                    let got = monomial_basis(&cg, &class).unwrap().len();
                    let expected: i64 = (0..=k).map(|i| (k - i) * w as i64 + l + 1).sum();
                    assert_eq!(got as i64, expected, "w={w} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn bidegree_counts() {
        let cg = class_group(&product_fan(1, 1)).unwrap();
        let class = cg.class_from_free(vec![2, 3]).unwrap();
        assert_eq!(monomial_basis(&cg, &class).unwrap().len(), 12);
    }

    #[test]
    fn negative_class_empty() {
        let cg = class_group(&projective_space(2)).unwrap();
        assert!(monomial_basis(&cg, &cg.line(-1).unwrap()).unwrap().is_empty());
        assert!(matches!(
            standard_degree_delta(&cg, &cg.line(-1).unwrap()),
            Err(Error::EmptyPiece)
        ));
    }

    #[test]
    fn delta_linear_growth() {
        // delta(D + kE) - delta(D + (k-1)E) is eventually constant
        let cg = class_group(&weighted_projective(&[1, 1, 3]).unwrap()).unwrap();
        let mut deltas = Vec::new();
        for k in 0..=10i64 {
            let class = cg.line(1 + 3 * k).unwrap();
            deltas.push(standard_degree_delta(&cg, &class).unwrap());
        }
        // increments from some point on are all equal
        let incs: Vec<u32> = deltas.windows(2).map(|w| w[1] - w[0]).collect();
        let tail = &incs[2..];
        assert!(tail.iter().all(|&i| i == tail[0]), "increments {incs:?}");
        // P(1,1,3), class 3k+1: the monomial x^{3k+1} realizes delta
        assert_eq!(deltas[2], 7);
    }

    #[test]
    fn multiplicativity_of_bases() {
        // product of basis monomials lands in the basis of the sum class
        let cg = class_group(&weighted_projective(&[1, 2, 3, 6]).unwrap()).unwrap();
        let c1 = cg.line(6).unwrap();
        let c2 = cg.line(7).unwrap();
        let b1 = monomial_basis(&cg, &c1).unwrap();
        let b2 = monomial_basis(&cg, &c2).unwrap();
        let sum = monomial_basis(&cg, &cg.add(&c1, &c2)).unwrap();
        for m1 in &b1 {
            for m2 in &b2 {
                let prod: Vec<u32> = m1
                    .exponents
                    .iter()
                    .zip(&m2.exponents)
                    .map(|(a, b)| a + b)
                    .collect();
                assert!(sum.iter().any(|m| m.exponents == prod));
            }
        }
    }
}
