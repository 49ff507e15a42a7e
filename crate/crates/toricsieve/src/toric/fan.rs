//! Simplicial fans: validation, face lattice, smoothness of cones, the
//! irrelevant-locus test, and the standard constructors (projective spaces,
//! weighted projective spaces, products).

use crate::error::{Error, Result};
use crate::intmat::IntMat;
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct Fan {
    /// Ambient lattice rank n.
    pub rank: usize,
    /// Primitive integer ray generators (d of them).
    pub rays: Vec<Vec<i64>>,
    /// Maximal cones as sorted ray-index lists; each has exactly n rays.
    pub max_cones: Vec<Vec<usize>>,
    /// Every face of every maximal cone (simplicial: all subsets), sorted by
    /// (dimension, ray indices). Index 0 is the trivial cone.
    pub cones: Vec<Vec<usize>>,
    /// Per cone: is the generated sublattice saturated (all elementary
    /// divisors 1)? The trivial cone is smooth.
    pub cone_smooth: Vec<bool>,
}

fn gcd64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Fan {
    pub fn new(rank: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        let d = rays.len();
        if rank == 0 || d == 0 {
            return Err(Error::FanInvalid("empty fan".into()));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != rank {
                return Err(Error::FanInvalid(format!("ray {i} has wrong dimension")));
            }
            if r.iter().all(|&x| x == 0) {
                return Err(Error::FanInvalid(format!("ray {i} is zero")));
            }
            let g = r.iter().fold(0i64, |acc, &x| gcd64(acc, x));
            if g != 1 {
                return Err(Error::FanInvalid(format!("ray {i} is not primitive")));
            }
        }
        for (i, r) in rays.iter().enumerate() {
            for (j, s) in rays.iter().enumerate().skip(i + 1) {
                if r == s {
                    return Err(Error::FanInvalid(format!("rays {i} and {j} coincide")));
                }
            }
        }
        let mut max_cones: Vec<Vec<usize>> = max_cones
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        max_cones.sort();
        max_cones.dedup();
        for c in &max_cones {
            if c.iter().any(|&i| i >= d) {
                return Err(Error::FanInvalid("cone refers to a missing ray".into()));
            }
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::FanInvalid("cone repeats a ray".into()));
            }
            if c.len() != rank {
                return Err(Error::FanInvalid(
                    "maximal cones must be full-dimensional (simplicial fan of a complete variety)"
                        .into(),
                ));
            }
            let sub = IntMat::from_rows(
                &c.iter()
                    .map(|&i| rays[i].iter().map(|&x| x as i128).collect())
                    .collect::<Vec<_>>(),
            );
            if sub.rank() != c.len() {
                return Err(Error::FanInvalid(
                    "maximal cone is not simplicial (rays dependent)".into(),
                ));
            }
        }
        // rays must span the ambient space over Q
        let all = IntMat::from_rows(
            &rays
                .iter()
                .map(|r| r.iter().map(|&x| x as i128).collect())
                .collect::<Vec<_>>(),
        );
        if all.rank() != rank {
            return Err(Error::TorusFactor);
        }
        // completeness sanity check: every facet is shared by exactly two
        // maximal cones
        if rank >= 1 {
            let mut facet_count = std::collections::HashMap::new();
            for c in &max_cones {
                for skip in 0..c.len() {
                    let facet: Vec<usize> = c
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    *facet_count.entry(facet).or_insert(0usize) += 1;
                }
            }
            for (facet, count) in facet_count {
                if count != 2 {
                    return Err(Error::FanInvalid(format!(
                        "facet {facet:?} lies in {count} maximal cones; the fan is not complete"
                    )));
                }
            }
        }
        // face lattice: all subsets of maximal cones
        let mut faces = BTreeSet::new();
        for c in &max_cones {
            let k = c.len();
            for mask in 0..(1u32 << k) {
                let face: Vec<usize> = (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| c[b]).collect();
                faces.insert(face);
            }
        }
        let mut cones: Vec<Vec<usize>> = faces.into_iter().collect();
        cones.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        let cone_smooth = cones
            .iter()
            .map(|c| {
                if c.is_empty() {
                    return true;
                }
                let sub = IntMat::from_rows(
                    &c.iter()
                        .map(|&i| rays[i].iter().map(|&x| x as i128).collect())
                        .collect::<Vec<_>>(),
                );
                sub.elementary_divisors().iter().all(|&e| e == 1)
            })
            .collect();
        Ok(Fan {
            rank,
            rays,
            max_cones,
            cones,
            cone_smooth,
        })
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    /// True when the zero pattern (true = coordinate vanishes) is the ray set
    /// of a cone, i.e. the point misses the irrelevant locus.
    pub fn is_relevant_pattern(&self, zero: &[bool]) -> bool {
        debug_assert_eq!(zero.len(), self.num_rays());
        let zero_set: Vec<usize> = (0..zero.len()).filter(|&i| zero[i]).collect();
        self.max_cones
            .iter()
            .any(|c| zero_set.iter().all(|i| c.contains(i)))
    }

    /// Index into `cones` of the cone whose rays are exactly this set.
    pub fn cone_index(&self, ray_set: &[usize]) -> Option<usize> {
        let mut key = ray_set.to_vec();
        key.sort_unstable();
        self.cones.iter().position(|c| *c == key)
    }

    /// First maximal cone (in listed order) whose ray set contains the given
    /// set; the chart U_sigma around points with that zero pattern.
    pub fn chart_for(&self, zero_set: &[usize]) -> Option<usize> {
        self.max_cones
            .iter()
            .position(|c| zero_set.iter().all(|i| c.contains(i)))
    }

    pub fn is_smooth(&self) -> bool {
        self.cone_smooth.iter().all(|&s| s)
    }
}

/// Fan of P^n: rays e_1, ..., e_n, -(e_1 + ... + e_n); all n-subsets are
/// maximal cones.
pub fn projective_space(n: usize) -> Fan {
    assert!(n >= 1);
    let mut rays = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut r = vec![0i64; n];
        r[i] = 1;
        rays.push(r);
    }
    rays.push(vec![-1i64; n]);
    let max_cones = subsets_of_size(n + 1, n);
    Fan::new(n, rays, max_cones).expect("projective space fan is valid")
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Fan of the weighted projective space P(w_0, ..., w_n), built from the
/// quotient lattice Z^{n+1} / Z(w_0, ..., w_n). Requires well-formed weights:
/// every n of the n+1 weights coprime.
pub fn weighted_projective(weights: &[u64]) -> Result<Fan> {
    let m = weights.len();
    if m < 2 || weights.iter().any(|&w| w == 0) {
        return Err(Error::IllFormedWeights);
    }
    let n = m - 1;
    for skip in 0..m {
        let g = weights
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .fold(0i64, |acc, (_, &w)| gcd64(acc, w as i64));
        if g != 1 {
            return Err(Error::IllFormedWeights);
        }
    }
    // U * w = e_0 for the weight column vector w; the quotient projection
    // drops the first coordinate of U x.
    let w_col = IntMat::from_rows(&weights.iter().map(|&w| vec![w as i128]).collect::<Vec<_>>());
    let s = w_col.smith();
    debug_assert_eq!(s.d[(0, 0)], 1, "weights have gcd 1");
    let rays: Vec<Vec<i64>> = (0..m)
        .map(|i| (1..m).map(|r| (s.u[(r, i)] * s.v[(0, 0)]) as i64).collect())
        .collect();
    for r in &rays {
        let g = r.iter().fold(0i64, |acc, &x| gcd64(acc, x));
        if g != 1 {
            return Err(Error::IllFormedWeights);
        }
    }
    let max_cones = subsets_of_size(m, n);
    Fan::new(n, rays, max_cones)
}

/// Fan of P^{n1} x P^{n2}, rays of the first factor listed first.
pub fn product_fan(n1: usize, n2: usize) -> Fan {
    assert!(n1 >= 1 && n2 >= 1);
    let f1 = projective_space(n1);
    let f2 = projective_space(n2);
    let n = n1 + n2;
    let mut rays = Vec::new();
    for r in &f1.rays {
        let mut v = r.clone();
        v.extend(std::iter::repeat(0).take(n2));
        rays.push(v);
    }
    for r in &f2.rays {
        let mut v = vec![0i64; n1];
        v.extend(r.iter().copied());
        rays.push(v);
    }
    let offset = f1.num_rays();
    let mut max_cones = Vec::new();
    for c1 in &f1.max_cones {
        for c2 in &f2.max_cones {
            let mut c = c1.clone();
            c.extend(c2.iter().map(|&i| i + offset));
            max_cones.push(c);
        }
    }
    Fan::new(n, rays, max_cones).expect("product fan is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_fan_shape() {
        let f = projective_space(2);
        assert_eq!(f.rays, vec![vec![1, 0], vec![0, 1], vec![-1, -1]]);
        assert_eq!(f.max_cones.len(), 3);
        // faces: 1 trivial + 3 rays + 3 maximal
        assert_eq!(f.cones.len(), 7);
        assert!(f.is_smooth());
    }

    #[test]
    fn p1xp1_fan_shape() {
        let f = product_fan(1, 1);
        assert_eq!(f.num_rays(), 4);
        assert_eq!(f.max_cones.len(), 4);
        assert!(f.is_smooth());
    }

    #[test]
    fn relevance_patterns() {
        let p2 = projective_space(2);
        assert!(p2.is_relevant_pattern(&[false, false, false])); // dense torus
        assert!(p2.is_relevant_pattern(&[true, true, false])); // (0,0,1)
        assert!(!p2.is_relevant_pattern(&[true, true, true])); // origin

        let p1p1 = product_fan(1, 1);
        assert!(!p1p1.is_relevant_pattern(&[true, true, false, false]));
        assert!(p1p1.is_relevant_pattern(&[true, false, true, false]));
        assert!(p1p1.is_relevant_pattern(&[false; 4]));
    }

    #[test]
    fn weighted_fans_validate() {
        let f = weighted_projective(&[1, 1, 3]).unwrap();
        assert_eq!(f.num_rays(), 3);
        assert!(!f.is_smooth());
        let f = weighted_projective(&[1, 2, 3, 6]).unwrap();
        assert_eq!(f.rank, 3);
        assert!(weighted_projective(&[2, 2, 3]).is_err()); // gcd(2,2) = 2
        assert!(weighted_projective(&[1, 1, 1]).unwrap().is_smooth());
    }

    #[test]
    fn singular_cone_detection() {
        // P(1,1,2): the cone opposite the weight-2 ray is singular
        let f = weighted_projective(&[1, 1, 2]).unwrap();
        assert!(!f.is_smooth());
        let smooth_count = f.cone_smooth.iter().filter(|&&s| s).count();
        assert!(smooth_count < f.cones.len());
        assert!(f.cone_smooth[0], "trivial cone is smooth");
    }

    #[test]
    fn incomplete_fan_rejected() {
        // only one maximal cone of P^2: facets not shared
        let rays = vec![vec![1, 0], vec![0, 1], vec![-1, -1]];
        assert!(Fan::new(2, rays, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn torus_factor_rejected() {
        // rays lie in a hyperplane of Z^2
        let err = Fan::new(2, vec![vec![1, 0], vec![-1, 0]], vec![vec![0], vec![1]]);
        assert!(err.is_err());
    }
}
