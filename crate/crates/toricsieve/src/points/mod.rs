//! Rational and closed points of a split toric variety: counting through the
//! orbit-cone decomposition, Moebius inversion into closed-point counts, and
//! explicit enumeration with Cox-coordinate lifts.

pub mod enumerate;

pub use enumerate::{
    collect_closed_points, enumerate_closed_points, ClosedPointStream, TorusData,
};

use crate::error::{Error, Result};
use crate::ff::FieldElement;
use crate::toric::Fan;

#[derive(Debug, Clone)]
pub struct ClosedPoint {
    /// Degree of the residue field over the base field.
    pub degree: usize,
    /// Index into `fan.cones` of the cone whose orbit contains the point.
    pub cone: usize,
    /// Representative Cox coordinates over F_{q^degree}; zero exactly on the
    /// rays of the cone.
    pub coords: Vec<FieldElement>,
    /// Orbit-torus coordinates generating the residue field.
    pub residue_witness: Vec<FieldElement>,
}

impl ClosedPoint {
    /// Stable identifier for reports and deduplication across runs.
    pub fn id(&self) -> String {
        let coords = self
            .coords
            .iter()
            .map(FieldElement::to_hex)
            .collect::<Vec<_>>()
            .join(":");
        format!("d{}c{}[{}]", self.degree, self.cone, coords)
    }
}

/// #X(F_{q^r}) for a complete simplicial split toric variety: each cone
/// contributes a torus (q^r - 1)^(n - dim).
pub fn count_points(fan: &Fan, q: u64, r: usize) -> u128 {
    let qr = (q as u128)
        .checked_pow(r as u32)
        .expect("q^r exceeds u128");
    let t = qr - 1;
    let mut total: u128 = 0;
    for cone in &fan.cones {
        let m = (fan.rank - cone.len()) as u32;
        let orbit = t.checked_pow(m).expect("orbit count exceeds u128");
        total = total.checked_add(orbit).expect("point count exceeds u128");
    }
    total
}

pub fn moebius(n: usize) -> i64 {
    let mut n = n;
    let mut mu = 1i64;
    let mut p = 2usize;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Closed-point counts a_e from rational-point counts N_r by Moebius
/// inversion: a_e = (1/e) * sum over m | e of mu(m) N_{e/m}. The list is
/// 1-indexed by degree (entry 0 corresponds to degree 1).
pub fn closed_point_counts(n: &[u128]) -> Result<Vec<u128>> {
    let mut a = Vec::with_capacity(n.len());
    for e in 1..=n.len() {
        let mut sum: i128 = 0;
        for m in 1..=e {
            if e % m == 0 {
                let mu = moebius(m) as i128;
                let term = i128::try_from(n[e / m - 1])
                    .map_err(|_| Error::NonIntegralCount { degree: e })?;
                sum += mu * term;
            }
        }
        if sum < 0 || sum % e as i128 != 0 {
            return Err(Error::NonIntegralCount { degree: e });
        }
        a.push((sum / e as i128) as u128);
    }
    Ok(a)
}

/// A point lies in the singular locus of X exactly when its orbit cone is not
/// smooth (the quotient construction is the only source of singularities).
pub fn singular_locus_membership(point: &ClosedPoint, fan: &Fan) -> bool {
    !fan.cone_smooth[point.cone]
}
