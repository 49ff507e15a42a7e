//! The class group as the cokernel of the ray-pairing map M -> Z^d, computed
//! by integer Smith normal form, together with the induced grading of the
//! homogeneous coordinate ring and a strictly positive grading functional
//! (the witness that graded pieces are finite-dimensional).

use super::fan::Fan;
use crate::error::{Error, Result};
use crate::intmat::IntMat;
use num::{BigInt, BigRational, One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass {
    pub free: Vec<i64>,
    pub torsion: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct ClassGroup {
    pub free_rank: usize,
    /// Torsion invariants m_i > 1.
    pub torsion_invariants: Vec<u64>,
    /// Canonical projection onto the free part (free_rank x d), Hermite-reduced.
    free_proj: IntMat,
    /// Rows of the Smith transform realizing each torsion component.
    torsion_proj: Vec<Vec<i128>>,
    /// Class of each variable / ray divisor.
    pub grading: Vec<DivisorClass>,
    /// Integer functional positive on every variable class, if one exists.
    pub positivity_witness: Option<Vec<i64>>,
}

pub fn class_group(fan: &Fan) -> Result<ClassGroup> {
    let d = fan.num_rays();
    let n = fan.rank;
    let a = IntMat::from_rows(
        &fan.rays
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect::<Vec<_>>(),
    );
    let s = a.smith();
    let divisors: Vec<i128> = (0..n.min(d)).map(|i| s.d[(i, i)]).collect();
    let rank = divisors.iter().filter(|&&x| x != 0).count();
    if rank != n {
        return Err(Error::TorusFactor);
    }
    let torsion_rows: Vec<(usize, i128)> = divisors
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m > 1)
        .map(|(i, &m)| (i, m))
        .collect();
    // rows of U beyond the diagonal support project onto the free part
    let free_rows: Vec<Vec<i128>> = (n..d).map(|i| s.u.row(i).to_vec()).collect();
    let free_proj = if free_rows.is_empty() {
        IntMat::zero(0, d)
    } else {
        IntMat::from_rows(&free_rows).hnf_rows()
    };
    let free_rank = free_proj.rows;
    debug_assert_eq!(free_rank, d - n);
    let torsion_invariants: Vec<u64> = torsion_rows.iter().map(|&(_, m)| m as u64).collect();
    let torsion_proj: Vec<Vec<i128>> = torsion_rows
        .iter()
        .map(|&(i, _)| s.u.row(i).to_vec())
        .collect();
    let mut cg = ClassGroup {
        free_rank,
        torsion_invariants,
        free_proj,
        torsion_proj,
        grading: Vec::new(),
        positivity_witness: None,
    };
    cg.grading = (0..d)
        .map(|i| {
            let mut e = vec![0i128; d];
            e[i] = 1;
            cg.class_of_vector(&e)
        })
        .collect();
    cg.positivity_witness = find_positive_functional(&cg.grading, cg.free_rank);
    Ok(cg)
}

impl ClassGroup {
    fn class_of_vector(&self, x: &[i128]) -> DivisorClass {
        let free = self
            .free_proj_rows()
            .map(|row| {
                let v: i128 = row.iter().zip(x).map(|(&a, &b)| a * b).sum();
                i64::try_from(v).expect("class coordinate overflow")
            })
            .collect();
        let torsion = self
            .torsion_proj
            .iter()
            .zip(&self.torsion_invariants)
            .map(|(row, &m)| {
                let v: i128 = row.iter().zip(x).map(|(&a, &b)| a * b).sum();
                v.rem_euclid(m as i128) as u64
            })
            .collect();
        DivisorClass { free, torsion }
    }

    fn free_proj_rows(&self) -> impl Iterator<Item = &[i128]> {
        (0..self.free_proj.rows).map(move |i| self.free_proj.row(i))
    }

    pub fn has_torsion(&self) -> bool {
        !self.torsion_invariants.is_empty()
    }

    pub fn zero(&self) -> DivisorClass {
        DivisorClass {
            free: vec![0; self.free_rank],
            torsion: vec![0; self.torsion_invariants.len()],
        }
    }

    pub fn add(&self, a: &DivisorClass, b: &DivisorClass) -> DivisorClass {
        DivisorClass {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&b.torsion)
                .zip(&self.torsion_invariants)
                .map(|((x, y), &m)| (x + y) % m)
                .collect(),
        }
    }

    pub fn sub(&self, a: &DivisorClass, b: &DivisorClass) -> DivisorClass {
        DivisorClass {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x - y).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&b.torsion)
                .zip(&self.torsion_invariants)
                .map(|((x, y), &m)| (x + m - y) % m)
                .collect(),
        }
    }

    pub fn scale(&self, a: &DivisorClass, k: i64) -> DivisorClass {
        DivisorClass {
            free: a.free.iter().map(|x| x * k).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&self.torsion_invariants)
                .map(|(x, &m)| ((*x as i128 * k as i128).rem_euclid(m as i128)) as u64)
                .collect(),
        }
    }

    /// Class of a monomial with the given exponents.
    pub fn degree_of_exponents(&self, exponents: &[u32]) -> DivisorClass {
        let mut acc = self.zero();
        for (i, &e) in exponents.iter().enumerate() {
            if e != 0 {
                acc = self.add(&acc, &self.scale(&self.grading[i], e as i64));
            }
        }
        acc
    }

    /// O(l) shortcut for rank-one torsion-free class groups.
    pub fn line(&self, l: i64) -> Result<DivisorClass> {
        if self.free_rank != 1 || self.has_torsion() {
            return Err(Error::Validation(
                "O(l) shorthand requires a free class group of rank 1".into(),
            ));
        }
        Ok(DivisorClass {
            free: vec![l],
            torsion: vec![],
        })
    }

    pub fn class_from_free(&self, free: Vec<i64>) -> Result<DivisorClass> {
        if free.len() != self.free_rank {
            return Err(Error::Validation(format!(
                "divisor needs {} free coordinates, got {}",
                self.free_rank,
                free.len()
            )));
        }
        Ok(DivisorClass {
            free,
            torsion: vec![0; self.torsion_invariants.len()],
        })
    }

    /// Pairing of the positivity witness with a class; a usable twist class
    /// must pair strictly positively.
    pub fn witness_pairing(&self, class: &DivisorClass) -> Result<i64> {
        let w = self
            .positivity_witness
            .as_ref()
            .ok_or(Error::UnboundedPiece)?;
        Ok(w.iter().zip(&class.free).map(|(a, b)| a * b).sum())
    }
}

/// Search for an integer functional lambda with lambda . g_i >= 1 for every
/// variable class g_i, by exact rational Fourier-Motzkin elimination.
fn find_positive_functional(grading: &[DivisorClass], rank: usize) -> Option<Vec<i64>> {
    // inequality rows: sum_j a_j x_j >= b
    let mut rows: Vec<(Vec<BigRational>, BigRational)> = grading
        .iter()
        .map(|g| {
            (
                g.free
                    .iter()
                    .map(|&c| BigRational::from(BigInt::from(c)))
                    .collect(),
                BigRational::one(),
            )
        })
        .collect();
    let mut eliminated: Vec<Vec<(Vec<BigRational>, BigRational)>> = Vec::new();
    for var in (0..rank).rev() {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zero = Vec::new();
        for (a, b) in rows {
            match a[var].cmp(&BigRational::zero()) {
                std::cmp::Ordering::Greater => pos.push((a, b)),
                std::cmp::Ordering::Less => neg.push((a, b)),
                std::cmp::Ordering::Equal => zero.push((a, b)),
            }
        }
        eliminated.push(pos.iter().chain(neg.iter()).cloned().collect());
        let mut next = zero;
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                // (ap/|ap_var|) + (an/|an_var|) eliminates the variable
                let cp = ap[var].clone();
                let cn = -an[var].clone();
                let a: Vec<BigRational> = ap
                    .iter()
                    .zip(an)
                    .map(|(x, y)| x.clone() / cp.clone() + y.clone() / cn.clone())
                    .collect();
                let b = bp.clone() / cp.clone() + bn.clone() / cn.clone();
                next.push((a, b));
            }
        }
        rows = next;
    }
    // feasibility of the variable-free system
    for (_, b) in &rows {
        if b > &BigRational::zero() {
            return None;
        }
    }
    // Back-substitute in reverse elimination order (variable 0 was eliminated
    // last, so it is assigned first); rows recorded at the elimination of
    // variable v only involve variables <= v.
    let mut lambda = vec![BigRational::zero(); rank];
    for v in 0..rank {
        let bounds = &eliminated[rank - 1 - v];
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for (a, b) in bounds {
            let mut rest = b.clone();
            for j in 0..rank {
                if j != v {
                    rest -= a[j].clone() * lambda[j].clone();
                }
            }
            let c = a[v].clone();
            let bound = rest / c.clone();
            if c > BigRational::zero() {
                // x >= bound
                lo = Some(match lo {
                    None => bound,
                    Some(l) if bound > l => bound,
                    Some(l) => l,
                });
            } else {
                hi = Some(match hi {
                    None => bound,
                    Some(h) if bound < h => bound,
                    Some(h) => h,
                });
            }
        }
        lambda[v] = match (lo, hi) {
            (Some(l), _) => l,
            (None, Some(h)) => h,
            (None, None) => BigRational::zero(),
        };
    }
    // clear denominators
    let denom_lcm = lambda
        .iter()
        .fold(BigInt::one(), |acc, x| num::integer::lcm(acc, x.denom().clone()));
    let ints: Vec<i64> = lambda
        .iter()
        .map(|x| {
            let v = x.numer() * (&denom_lcm / x.denom());
            i64::try_from(v.clone()).ok()
        })
        .collect::<Option<Vec<_>>>()?;
    // verify strict positivity on every variable class
    for g in grading {
        let pair: i128 = ints
            .iter()
            .zip(&g.free)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum();
        if pair < 1 {
            return None;
        }
    }
    Some(ints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::fan::{product_fan, projective_space, weighted_projective};

    #[test]
    fn p2_class_group() {
        let cg = class_group(&projective_space(2)).unwrap();
        assert_eq!(cg.free_rank, 1);
        assert!(cg.torsion_invariants.is_empty());
        for g in &cg.grading {
            assert_eq!(g.free, vec![1]);
        }
        assert!(cg.positivity_witness.is_some());
    }

    #[test]
    fn p1xp1_class_group() {
        let cg = class_group(&product_fan(1, 1)).unwrap();
        assert_eq!(cg.free_rank, 2);
        let frees: Vec<Vec<i64>> = cg.grading.iter().map(|g| g.free.clone()).collect();
        assert_eq!(frees, vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1]]);
    }

    #[test]
    fn p1xp2_class_group() {
        let cg = class_group(&product_fan(1, 2)).unwrap();
        assert_eq!(cg.free_rank, 2);
        assert_eq!(cg.grading.len(), 5);
    }

    #[test]
    fn weighted_gradings_match_weights() {
        for weights in [vec![1u64, 1, 3], vec![1, 1, 5], vec![1, 2, 3, 6], vec![1, 1, 2]] {
            let fan = weighted_projective(&weights).unwrap();
            let cg = class_group(&fan).unwrap();
            assert_eq!(cg.free_rank, 1);
            assert!(!cg.has_torsion());
            let grades: Vec<i64> = cg.grading.iter().map(|g| g.free[0]).collect();
            assert_eq!(
                grades,
                weights.iter().map(|&w| w as i64).collect::<Vec<_>>(),
                "weights {weights:?}"
            );
        }
    }

    #[test]
    fn exactness_relation() {
        // sum over variables of <m, ray_i> * grading[i] = 0 for basis m of M
        for fan in [projective_space(3), product_fan(2, 3), weighted_projective(&[1, 2, 3, 6]).unwrap()] {
            let cg = class_group(&fan).unwrap();
            for k in 0..fan.rank {
                let mut acc = cg.zero();
                for (i, ray) in fan.rays.iter().enumerate() {
                    acc = cg.add(&acc, &cg.scale(&cg.grading[i], ray[k]));
                }
                assert_eq!(acc, cg.zero());
            }
        }
    }

    #[test]
    fn witness_positive_on_all_variables() {
        for fan in [projective_space(2), product_fan(2, 1), weighted_projective(&[1, 1, 3]).unwrap()] {
            let cg = class_group(&fan).unwrap();
            let w = cg.positivity_witness.clone().unwrap();
            for g in &cg.grading {
                let p: i64 = w.iter().zip(&g.free).map(|(a, b)| a * b).sum();
                assert!(p >= 1);
            }
        }
    }
}
