//! Sections of graded pieces: coefficient vectors on the canonical monomial
//! basis, with evaluation at points over extension fields and formal partial
//! derivatives.

use super::basis::Monomial;
use super::classgroup::DivisorClass;
use super::variety::Variety;
use crate::error::Result;
use crate::ff::FieldElement;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub class: DivisorClass,
    pub basis: Arc<Vec<Monomial>>,
    /// Base-field coefficients aligned with the basis.
    pub coeffs: Vec<FieldElement>,
}

impl Section {
    pub fn new(variety: &Variety, class: DivisorClass, coeffs: Vec<FieldElement>) -> Result<Section> {
        let basis = variety.basis(&class)?;
        assert_eq!(coeffs.len(), basis.len(), "coefficient count != basis size");
        Ok(Section {
            class,
            basis,
            coeffs,
        })
    }

    pub fn zero(variety: &Variety, class: DivisorClass) -> Result<Section> {
        let basis = variety.basis(&class)?;
        let z = FieldElement::zero(&variety.tower.base());
        let coeffs = vec![z; basis.len()];
        Ok(Section {
            class,
            basis,
            coeffs,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(FieldElement::is_zero)
    }

    /// Evaluate at a point with coordinates over F_{q^e}; coefficients are
    /// embedded along the tower.
    pub fn evaluate(&self, variety: &Variety, coords: &[FieldElement]) -> Result<FieldElement> {
        assert_eq!(coords.len(), variety.num_vars());
        let level = variety.tower.level_of(&coords[0]);
        let desc = &coords[0].desc;
        let powers = coordinate_powers(coords, &self.basis);
        let mut acc = FieldElement::zero(desc);
        for (m, c) in self.basis.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let c_up = variety.tower.embed(c, level)?;
            acc = acc.add(&c_up.mul(&monomial_value(m, &powers)));
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to variable i; the class drops
    /// by the grading of that variable, and coefficients divisible by the
    /// characteristic vanish.
    pub fn partial_derivative(&self, variety: &Variety, i: usize) -> Result<Section> {
        let cg = &variety.class_group;
        let new_class = cg.sub(&self.class, &cg.grading[i]);
        let new_basis = variety.basis(&new_class)?;
        let index: HashMap<&[u32], usize> = new_basis
            .iter()
            .enumerate()
            .map(|(k, m)| (m.exponents.as_slice(), k))
            .collect();
        let z = FieldElement::zero(&variety.tower.base());
        let mut coeffs = vec![z; new_basis.len()];
        for (m, c) in self.basis.iter().zip(&self.coeffs) {
            let e = m.exponents[i];
            if e == 0 || c.is_zero() {
                continue;
            }
            let scaled = c.scale(e as u64 % variety.tower.p);
            if scaled.is_zero() {
                continue;
            }
            let mut exps = m.exponents.clone();
            exps[i] -= 1;
            let k = *index
                .get(exps.as_slice())
                .expect("derivative monomial lies in the shifted basis");
            coeffs[k] = coeffs[k].add(&scaled);
        }
        Ok(Section {
            class: new_class,
            basis: new_basis,
            coeffs,
        })
    }

    /// Product of sections (used as an expansion oracle in tests).
    pub fn mul(&self, variety: &Variety, other: &Section) -> Result<Section> {
        let cg = &variety.class_group;
        let sum_class = cg.add(&self.class, &other.class);
        let basis = variety.basis(&sum_class)?;
        let index: HashMap<&[u32], usize> = basis
            .iter()
            .enumerate()
            .map(|(k, m)| (m.exponents.as_slice(), k))
            .collect();
        let z = FieldElement::zero(&variety.tower.base());
        let mut coeffs = vec![z; basis.len()];
        for (m1, c1) in self.basis.iter().zip(&self.coeffs) {
            if c1.is_zero() {
                continue;
            }
            for (m2, c2) in other.basis.iter().zip(&other.coeffs) {
                if c2.is_zero() {
                    continue;
                }
                let prod: Vec<u32> = m1
                    .exponents
                    .iter()
                    .zip(&m2.exponents)
                    .map(|(a, b)| a + b)
                    .collect();
                let k = *index
                    .get(prod.as_slice())
                    .expect("product monomial lies in the sum basis");
                coeffs[k] = coeffs[k].add(&c1.mul(c2));
            }
        }
        Ok(Section {
            class: sum_class,
            basis,
            coeffs,
        })
    }
}

/// Per-coordinate power tables up to the maximal exponent in the basis.
pub fn coordinate_powers(coords: &[FieldElement], basis: &[Monomial]) -> Vec<Vec<FieldElement>> {
    let d = coords.len();
    let mut max_exp = vec![0u32; d];
    for m in basis {
        for (i, &e) in m.exponents.iter().enumerate() {
            max_exp[i] = max_exp[i].max(e);
        }
    }
    coords
        .iter()
        .zip(&max_exp)
        .map(|(c, &me)| {
            let mut powers = Vec::with_capacity(me as usize + 1);
            let mut acc = FieldElement::one(&c.desc);
            for _ in 0..=me {
                powers.push(acc.clone());
                acc = acc.mul(c);
            }
            powers
        })
        .collect()
}

pub fn monomial_value(m: &Monomial, powers: &[Vec<FieldElement>]) -> FieldElement {
    let mut acc = powers[0][0].clone(); // the constant one
    debug_assert!(!powers.is_empty());
    let mut first = true;
    for (i, &e) in m.exponents.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if first {
            acc = powers[i][e as usize].clone();
            first = false;
        } else {
            acc = acc.mul(&powers[i][e as usize]);
        }
    }
    if first {
        // constant monomial: the one of the field
        acc = FieldElement::one(&powers[0][0].desc);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Tower;

    fn p2_over(p: u64) -> Variety {
        Variety::projective(2, Tower::new(p, 1).unwrap()).unwrap()
    }

    fn section_from_ints(v: &Variety, class: DivisorClass, ints: &[u64]) -> Section {
        let base = v.tower.base();
        let coeffs = ints
            .iter()
            .map(|&c| FieldElement::from_int(&base, c))
            .collect();
        Section::new(v, class, coeffs).unwrap()
    }

    #[test]
    fn evaluate_basics() {
        let v = p2_over(2);
        let class = v.class_group.line(3).unwrap();
        let zero = Section::zero(&v, class.clone()).unwrap();
        let base = v.tower.base();
        let pt = vec![
            FieldElement::one(&base),
            FieldElement::one(&base),
            FieldElement::one(&base),
        ];
        assert!(zero.evaluate(&v, &pt).unwrap().is_zero());

        // the monomial xyz evaluates to 1 at (1,1,1)
        let basis = v.basis(&class).unwrap();
        let idx = basis
            .iter()
            .position(|m| m.exponents == vec![1, 1, 1])
            .unwrap();
        let mut ints = vec![0u64; basis.len()];
        ints[idx] = 1;
        let s = section_from_ints(&v, class, &ints);
        assert!(!s.evaluate(&v, &pt).unwrap().is_zero());
    }

    #[test]
    fn derivative_kills_characteristic() {
        // d/dx (x^2) = 2x = 0 over F_2
        let v = p2_over(2);
        let class = v.class_group.line(2).unwrap();
        let basis = v.basis(&class).unwrap();
        let idx = basis
            .iter()
            .position(|m| m.exponents == vec![2, 0, 0])
            .unwrap();
        let mut ints = vec![0u64; basis.len()];
        ints[idx] = 1;
        let s = section_from_ints(&v, class, &ints);
        let dx = s.partial_derivative(&v, 0).unwrap();
        assert!(dx.is_zero());
    }

    #[test]
    fn derivative_drops_class_by_grading() {
        let tower = Tower::new(2, 1).unwrap();
        let v = Variety::weighted(&[1, 1, 3], tower).unwrap();
        let class = v.class_group.line(7).unwrap();
        let s = Section::zero(&v, class).unwrap();
        let dz = s.partial_derivative(&v, 2).unwrap();
        assert_eq!(dz.class, v.class_group.line(4).unwrap());
    }

    #[test]
    fn product_rule_on_random_sections() {
        let v = p2_over(3);
        let c1 = v.class_group.line(1).unwrap();
        let c2 = v.class_group.line(2).unwrap();
        // a couple of fixed pseudo-random coefficient choices
        let picks: [(u64, [u64; 3], [u64; 6]); 3] = [
            (0, [1, 2, 0], [0, 1, 2, 1, 0, 2]),
            (1, [2, 2, 1], [1, 1, 0, 2, 2, 0]),
            (2, [0, 1, 1], [2, 0, 1, 0, 1, 1]),
        ];
        for (_, a, b) in picks {
            let f = section_from_ints(&v, c1.clone(), &a);
            let g = section_from_ints(&v, c2.clone(), &b);
            let fg = f.mul(&v, &g).unwrap();
            for i in 0..3 {
                let lhs = fg.partial_derivative(&v, i).unwrap();
                let df = f.partial_derivative(&v, i).unwrap();
                let dg = g.partial_derivative(&v, i).unwrap();
                let rhs_coeffs: Vec<FieldElement> = {
                    let t1 = f.mul(&v, &dg).unwrap();
                    let t2 = g.mul(&v, &df).unwrap();
                    t1.coeffs
                        .iter()
                        .zip(&t2.coeffs)
                        .map(|(x, y)| x.add(y))
                        .collect()
                };
                assert_eq!(lhs.coeffs, rhs_coeffs);
            }
        }
    }

    #[test]
    fn frobenius_equivariance_of_evaluation() {
        // f over F_q: evaluate(f, phi(coords)) = phi(evaluate(f, coords))
        let v = p2_over(2);
        let class = v.class_group.line(2).unwrap();
        let s = section_from_ints(&v, class, &[1, 0, 1, 1, 0, 1]);
        let f4 = v.tower.level(2).unwrap();
        for i in [1u64, 2, 3] {
            let coords = vec![
                FieldElement::from_index(&f4, i),
                FieldElement::from_index(&f4, (i + 1) % 4),
                FieldElement::one(&f4),
            ];
            let phi_coords: Vec<FieldElement> =
                coords.iter().map(|c| v.tower.frobenius(c, 1)).collect();
            let lhs = s.evaluate(&v, &phi_coords).unwrap();
            let rhs = v.tower.frobenius(&s.evaluate(&v, &coords).unwrap(), 1);
            assert_eq!(lhs, rhs);
        }
    }
}
