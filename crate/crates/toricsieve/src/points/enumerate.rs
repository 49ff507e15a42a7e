//! Closed-point enumeration. Points are listed one torus orbit at a time:
//! for each cone, tuples over the orbit torus are filtered to exact residue
//! degree via their Frobenius orbit, deduplicated to the lexicographically
//! smallest orbit element, and lifted to Cox coordinates by solving the
//! grading equations in the dual cyclic group.

use super::ClosedPoint;
use crate::error::{Error, Result};
use crate::ff::{FieldDescriptor, FieldElement, Tower};
use crate::intmat::IntMat;
use crate::toric::Variety;
use std::collections::VecDeque;
use std::sync::Arc;

/// Discrete-log and Frobenius tables for F_{q^e}^*. Everything is indexed by
/// the element index (base-p digit encoding of the coefficient list).
pub struct TorusData {
    pub level: usize,
    pub desc: Arc<FieldDescriptor>,
    /// N = q^e - 1.
    pub order: u64,
    /// k -> element index of g^k, where g is the canonical generator.
    pub pow: Vec<u64>,
    /// element index -> discrete log (u64::MAX marks zero).
    pub dlog: Vec<u64>,
    /// element index -> index of x^q.
    pub frob: Vec<u64>,
    /// element index -> size of the Frobenius orbit.
    pub min_deg: Vec<u32>,
}

/// Rank of an element in the canonical order (coefficient lists compared
/// low-to-high): the value of the reversed base-p digit string.
fn order_rank(idx: u64, p: u64, digits: usize) -> u64 {
    let mut v = idx;
    let mut r = 0u64;
    for _ in 0..digits {
        r = r * p + v % p;
        v /= p;
    }
    r
}

impl TorusData {
    pub fn build(tower: &Tower, e: usize, table_cap: u64) -> Result<Arc<TorusData>> {
        let desc = tower.level(e)?;
        let size = desc.order();
        if size > table_cap as u128 {
            return Err(Error::CapExceeded {
                what: format!("torus tables for F_{{q^{e}}}"),
                required: size,
                cap: table_cap as u128,
            });
        }
        let size = size as u64;
        let n = size - 1;
        let p = desc.p;
        let d = desc.degree;
        // Frobenius x -> x^q is F_p-linear: images of the power basis suffice.
        let q = tower.q();
        let basis_images: Vec<Vec<u64>> = (0..d)
            .map(|j| {
                let mut t = FieldElement::zero(&desc);
                t.coeffs[j] = 1;
                t.pow(q).coeffs
            })
            .collect();
        let mut frob = vec![0u64; size as usize];
        for idx in 0..size {
            let x = FieldElement::from_index(&desc, idx);
            let mut acc = vec![0u64; d];
            for (j, &c) in x.coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (k, &b) in basis_images[j].iter().enumerate() {
                    acc[k] = (acc[k] + c * b) % p;
                }
            }
            frob[idx as usize] = FieldElement::from_coeffs(&desc, acc).index();
        }
        // orbit sizes by walking the Frobenius permutation
        let mut min_deg = vec![0u32; size as usize];
        for start in 0..size {
            if min_deg[start as usize] != 0 {
                continue;
            }
            let mut orbit = vec![start];
            let mut cur = frob[start as usize];
            while cur != start {
                orbit.push(cur);
                cur = frob[cur as usize];
            }
            let len = orbit.len() as u32;
            for idx in orbit {
                min_deg[idx as usize] = len;
            }
        }
        // canonical generator: first element in the canonical order whose
        // multiplicative order is N
        let mut prime_factors = Vec::new();
        let mut nn = n;
        let mut f = 2u64;
        while f * f <= nn {
            if nn % f == 0 {
                prime_factors.push(f);
                while nn % f == 0 {
                    nn /= f;
                }
            }
            f += 1;
        }
        if nn > 1 {
            prime_factors.push(nn);
        }
        let mut generator = None;
        for rank in 1..size {
            let idx = order_rank(rank, p, d); // rank -> index is an involution
            let x = FieldElement::from_index(&desc, idx);
            if x.is_zero() {
                continue;
            }
            let is_gen = prime_factors.iter().all(|&l| {
                let y = x.pow(n / l);
                y != FieldElement::one(&desc)
            });
            if is_gen {
                generator = Some(x);
                break;
            }
        }
        let g = generator.ok_or_else(|| Error::Internal("no multiplicative generator".into()))?;
        let mut pow = vec![0u64; n as usize];
        let mut dlog = vec![u64::MAX; size as usize];
        let mut acc = FieldElement::one(&desc);
        for k in 0..n {
            let idx = acc.index();
            pow[k as usize] = idx;
            dlog[idx as usize] = k;
            acc = acc.mul(&g);
        }
        Ok(Arc::new(TorusData {
            level: e,
            desc,
            order: n,
            pow,
            dlog,
            frob,
            min_deg,
        }))
    }
}

/// Static combinatorics of one cone: the orbit-torus lattice and the pairing
/// matrix behind the grading equations for Cox lifts.
struct ConeOrbit {
    cone_idx: usize,
    sigma: Vec<usize>,
    free_vars: Vec<usize>,
    /// torus dimension n - dim sigma
    m: usize,
    /// m x free_vars.len(): pairings of the orbit-lattice basis with the
    /// free rays.
    w: IntMat,
}

fn cone_orbits(variety: &Variety) -> Vec<ConeOrbit> {
    let fan = &variety.fan;
    let n = fan.rank;
    let d = fan.num_rays();
    fan.cones
        .iter()
        .enumerate()
        .map(|(cone_idx, sigma)| {
            let m_basis: Vec<Vec<i128>> = if sigma.is_empty() {
                (0..n)
                    .map(|j| (0..n).map(|k| if j == k { 1 } else { 0 }).collect())
                    .collect()
            } else {
                let rows: Vec<Vec<i128>> = sigma
                    .iter()
                    .map(|&i| fan.rays[i].iter().map(|&x| x as i128).collect())
                    .collect();
                IntMat::from_rows(&rows).kernel_basis()
            };
            let free_vars: Vec<usize> = (0..d).filter(|i| !sigma.contains(i)).collect();
            let m = n - sigma.len();
            debug_assert_eq!(m_basis.len(), m);
            let w_rows: Vec<Vec<i128>> = m_basis
                .iter()
                .map(|mb| {
                    free_vars
                        .iter()
                        .map(|&i| {
                            fan.rays[i]
                                .iter()
                                .zip(mb)
                                .map(|(&r, &c)| r as i128 * c)
                                .sum()
                        })
                        .collect()
                })
                .collect();
            let w = if w_rows.is_empty() {
                IntMat::zero(0, free_vars.len())
            } else {
                IntMat::from_rows(&w_rows)
            };
            ConeOrbit {
                cone_idx,
                sigma: sigma.clone(),
                free_vars,
                m,
                w,
            }
        })
        .collect()
}

pub struct ClosedPointStream<'v> {
    variety: &'v Variety,
    orbits: Vec<ConeOrbit>,
    max_degree: usize,
    table_cap: u64,
    degree: usize,
    cone_pos: usize,
    torus: Option<Arc<TorusData>>,
    buffer: VecDeque<ClosedPoint>,
    failed: bool,
}

/// Stream of closed points of degree <= max_degree, one representative per
/// Galois orbit, ordered by (degree, cone, canonical tuple order).
pub fn enumerate_closed_points(
    variety: &Variety,
    max_degree: usize,
    table_cap: u64,
) -> Result<ClosedPointStream<'_>> {
    if variety.class_group.has_torsion() {
        return Err(Error::UnsupportedTorsion);
    }
    let q = variety.q() as u128;
    let needed = q.checked_pow(max_degree as u32).unwrap_or(u128::MAX);
    if needed > crate::ff::FIELD_ORDER_CAP {
        return Err(Error::CapExceeded {
            what: format!("closed points of degree {max_degree}"),
            required: needed,
            cap: crate::ff::FIELD_ORDER_CAP,
        });
    }
    Ok(ClosedPointStream {
        variety,
        orbits: cone_orbits(variety),
        max_degree,
        table_cap,
        degree: 0,
        cone_pos: usize::MAX,
        torus: None,
        buffer: VecDeque::new(),
        failed: false,
    })
}

/// Convenience: fully materialized point list.
pub fn collect_closed_points(
    variety: &Variety,
    max_degree: usize,
    table_cap: u64,
) -> Result<Vec<ClosedPoint>> {
    enumerate_closed_points(variety, max_degree, table_cap)?.collect()
}

impl Iterator for ClosedPointStream<'_> {
    type Item = Result<ClosedPoint>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            if let Some(p) = self.buffer.pop_front() {
                return Some(Ok(p));
            }
            // advance to the next (degree, cone) stratum
            if self.degree == 0 || self.cone_pos + 1 >= self.orbits.len() {
                if self.degree >= self.max_degree {
                    return None;
                }
                self.degree += 1;
                self.cone_pos = 0;
                match TorusData::build(&self.variety.tower, self.degree, self.table_cap) {
                    Ok(t) => self.torus = Some(t),
                    Err(e) => {
                        self.failed = true;
                        return Some(Err(e));
                    }
                }
            } else {
                self.cone_pos += 1;
            }
            let torus = self.torus.as_ref().unwrap().clone();
            let orbit = &self.orbits[self.cone_pos];
            match points_in_stratum(self.variety, &torus, orbit, self.degree) {
                Ok(points) => self.buffer.extend(points),
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

fn points_in_stratum(
    variety: &Variety,
    torus: &TorusData,
    orbit: &ConeOrbit,
    e: usize,
) -> Result<Vec<ClosedPoint>> {
    let mut out = Vec::new();
    if orbit.m == 0 {
        // the distinguished point of a full-dimensional cone is rational
        if e == 1 {
            out.push(build_point(variety, torus, orbit, &[], e)?);
        }
        return Ok(out);
    }
    let p = torus.desc.p;
    let digits = torus.desc.degree;
    let size = torus.dlog.len() as u64;
    // quick reject: a degree-e tuple needs a coordinate of degree divisible
    // by a prime power matching e; cheapest correct filter is the lcm test.
    let mut ranks = vec![1u64; orbit.m];
    loop {
        // tuple of element indices, canonical order per slot
        let idxs: Vec<u64> = ranks.iter().map(|&r| order_rank(r, p, digits)).collect();
        let mut lcm = 1u64;
        for &idx in &idxs {
            let d = torus.min_deg[idx as usize] as u64;
            lcm = lcm / gcd_u64(lcm, d) * d;
            if lcm > e as u64 {
                break;
            }
        }
        if lcm == e as u64 && is_orbit_min(torus, &idxs, e, p, digits) {
            out.push(build_point(variety, torus, orbit, &idxs, e)?);
        }
        // odometer over ranks, last slot fastest
        let mut slot = orbit.m;
        loop {
            if slot == 0 {
                return Ok(out);
            }
            slot -= 1;
            ranks[slot] += 1;
            if ranks[slot] < size {
                break;
            }
            ranks[slot] = 1;
        }
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Is the tuple the lexicographically smallest element of its Frobenius
/// orbit, comparing coordinates in the canonical element order?
fn is_orbit_min(torus: &TorusData, idxs: &[u64], e: usize, p: u64, digits: usize) -> bool {
    let rank_of = |idx: u64| order_rank(idx, p, digits);
    let mut cur: Vec<u64> = idxs.to_vec();
    for _ in 1..e {
        for v in cur.iter_mut() {
            *v = torus.frob[*v as usize];
        }
        let less = cur
            .iter()
            .zip(idxs)
            .map(|(&a, &b)| rank_of(a).cmp(&rank_of(b)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal);
        if less == std::cmp::Ordering::Less {
            return false;
        }
    }
    true
}

fn build_point(
    variety: &Variety,
    torus: &TorusData,
    orbit: &ConeOrbit,
    tuple_idxs: &[u64],
    e: usize,
) -> Result<ClosedPoint> {
    let n_mod = torus.order as i128;
    let b: Vec<i128> = tuple_idxs
        .iter()
        .map(|&idx| torus.dlog[idx as usize] as i128)
        .collect();
    let mut dlogs: Vec<i128> = if orbit.free_vars.is_empty() {
        Vec::new()
    } else if orbit.m == 0 {
        vec![0; orbit.free_vars.len()]
    } else {
        orbit
            .w
            .solve_mod(&b, n_mod)
            .ok_or_else(|| Error::Internal("grading equations unsolvable for a Cox lift".into()))?
    };
    normalize_lift(variety, orbit, &mut dlogs, n_mod);
    let desc = &torus.desc;
    let mut coords = vec![FieldElement::zero(desc); variety.num_vars()];
    for (slot, &i) in orbit.free_vars.iter().enumerate() {
        let idx = torus.pow[dlogs[slot] as usize];
        coords[i] = FieldElement::from_index(desc, idx);
    }
    let residue_witness = tuple_idxs
        .iter()
        .map(|&idx| FieldElement::from_index(desc, idx))
        .collect();
    debug_assert!(variety.is_relevant(&coords));
    Ok(ClosedPoint {
        degree: e,
        cone: orbit.cone_idx,
        coords,
        residue_witness,
    })
}

/// Scale the lift by a group element so that leading coordinates become 1
/// where the grading permits, greedily from the left. Deterministic; for
/// projective-space-like gradings this is the usual first-nonzero-one
/// normalization.
fn normalize_lift(variety: &Variety, orbit: &ConeOrbit, dlogs: &mut [i128], n_mod: i128) {
    let rank = variety.class_group.free_rank;
    if rank == 0 || dlogs.is_empty() {
        return;
    }
    let theta: Vec<Vec<i128>> = orbit
        .free_vars
        .iter()
        .map(|&i| {
            variety.class_group.grading[i]
                .free
                .iter()
                .map(|&x| x as i128)
                .collect()
        })
        .collect();
    let mut rows: Vec<Vec<i128>> = Vec::new();
    let mut rhs: Vec<i128> = Vec::new();
    for (slot, row) in theta.iter().enumerate() {
        let mut trial_rows = rows.clone();
        let mut trial_rhs = rhs.clone();
        trial_rows.push(row.clone());
        trial_rhs.push((-dlogs[slot]).rem_euclid(n_mod));
        let m = IntMat::from_rows(&trial_rows);
        if m.solve_mod(&trial_rhs, n_mod).is_some() {
            rows = trial_rows;
            rhs = trial_rhs;
        }
    }
    if rows.is_empty() {
        return;
    }
    let gamma = IntMat::from_rows(&rows)
        .solve_mod(&rhs, n_mod)
        .expect("locked normalization system is solvable");
    for (slot, row) in theta.iter().enumerate() {
        let shift: i128 = row.iter().zip(&gamma).map(|(a, g)| a * g).sum();
        dlogs[slot] = (dlogs[slot] + shift).rem_euclid(n_mod);
    }
}
