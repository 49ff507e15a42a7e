//! Exact arithmetic in F_p, F_q = F_{p^a} and the tower of extensions F_{q^e}.
//!
//! Elements are dense coefficient vectors over the prime field, low-to-high,
//! reduced modulo a deterministically chosen irreducible (the
//! lexicographically smallest monic one of its degree). Extensions of the base
//! field are always represented over F_p with degree a*e, so the tower is
//! uniform and the extension degree can be read off the descriptor.

pub mod embed;
pub mod modp;

use crate::error::{Error, Result};
use modp::{add_p, inv_p, mul_p, sub_p, PolyP};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Hard cap on field orders q^e; larger towers are refused with a clear error.
pub const FIELD_ORDER_CAP: u128 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    pub p: u64,
    /// Extension degree over the prime field F_p.
    pub degree: usize,
    /// Monic irreducible modulus of that degree, coefficients low-to-high.
    pub modulus: PolyP,
}

impl FieldDescriptor {
    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.degree as u32)
    }
}

/// Deterministic field construction: the modulus is the lexicographically
/// smallest monic irreducible of degree n over F_p (coefficients compared
/// low-to-high). Repeated calls agree.
pub fn make_field(p: u64, n: usize) -> Result<Arc<FieldDescriptor>> {
    if !modp::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    assert!(n >= 1, "extension degree must be at least 1");
    let order = (p as u128).checked_pow(n as u32);
    match order {
        Some(o) if o <= FIELD_ORDER_CAP => {}
        _ => {
            return Err(Error::CapExceeded {
                what: format!("field F_{{{p}^{n}}}"),
                required: order.unwrap_or(u128::MAX),
                cap: FIELD_ORDER_CAP,
            })
        }
    }
    Ok(Arc::new(FieldDescriptor {
        p,
        degree: n,
        modulus: modp::smallest_irreducible(p, n),
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub desc: Arc<FieldDescriptor>,
    /// Fixed length desc.degree, low-to-high over F_p.
    pub coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn zero(desc: &Arc<FieldDescriptor>) -> Self {
        FieldElement {
            desc: desc.clone(),
            coeffs: vec![0; desc.degree],
        }
    }

    pub fn one(desc: &Arc<FieldDescriptor>) -> Self {
        let mut coeffs = vec![0; desc.degree];
        coeffs[0] = 1 % desc.p;
        FieldElement {
            desc: desc.clone(),
            coeffs,
        }
    }

    /// Constant from an integer (reduced mod p).
    pub fn from_int(desc: &Arc<FieldDescriptor>, v: u64) -> Self {
        let mut coeffs = vec![0; desc.degree];
        coeffs[0] = v % desc.p;
        FieldElement {
            desc: desc.clone(),
            coeffs,
        }
    }

    pub fn from_coeffs(desc: &Arc<FieldDescriptor>, mut coeffs: Vec<u64>) -> Self {
        assert!(coeffs.len() <= desc.degree);
        for c in &mut coeffs {
            *c %= desc.p;
        }
        coeffs.resize(desc.degree, 0);
        FieldElement {
            desc: desc.clone(),
            coeffs,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn assert_same_field(&self, other: &FieldElement) {
        assert_eq!(
            self.desc, other.desc,
            "elements live in different field representations"
        );
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.assert_same_field(other);
        let p = self.desc.p;
        FieldElement {
            desc: self.desc.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| add_p(a, b, p))
                .collect(),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.assert_same_field(other);
        let p = self.desc.p;
        FieldElement {
            desc: self.desc.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| sub_p(a, b, p))
                .collect(),
        }
    }

    pub fn neg(&self) -> FieldElement {
        let p = self.desc.p;
        FieldElement {
            desc: self.desc.clone(),
            coeffs: self.coeffs.iter().map(|&a| sub_p(0, a, p)).collect(),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.assert_same_field(other);
        let p = self.desc.p;
        let prod = modp::poly_mul(&self.coeffs, &other.coeffs, p);
        let red = modp::poly_rem(&prod, &self.desc.modulus, p);
        FieldElement::from_coeffs(&self.desc, red)
    }

    pub fn scale(&self, c: u64) -> FieldElement {
        let p = self.desc.p;
        let c = c % p;
        FieldElement {
            desc: self.desc.clone(),
            coeffs: self.coeffs.iter().map(|&a| mul_p(a, c, p)).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut result = FieldElement::one(&self.desc);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    pub fn inv(&self) -> FieldElement {
        assert!(!self.is_zero(), "inverse of zero");
        let order = self.desc.order();
        debug_assert!(order <= FIELD_ORDER_CAP);
        self.pow((order - 2) as u64)
    }

    /// Total order on elements of one field: coefficient lists compared
    /// low-to-high, matching the modulus selection order.
    pub fn cmp_order(&self, other: &FieldElement) -> Ordering {
        self.assert_same_field(other);
        self.coeffs.cmp(&other.coeffs)
    }

    /// Index in [0, p^degree) with coefficient j as the base-p digit j.
    pub fn index(&self) -> u64 {
        let p = self.desc.p;
        let mut v = 0u64;
        for &c in self.coeffs.iter().rev() {
            v = v * p + c;
        }
        v
    }

    pub fn from_index(desc: &Arc<FieldDescriptor>, mut idx: u64) -> FieldElement {
        let p = desc.p;
        let mut coeffs = vec![0u64; desc.degree];
        for c in coeffs.iter_mut() {
            *c = idx % p;
            idx /= p;
        }
        debug_assert_eq!(idx, 0, "index out of range");
        FieldElement {
            desc: desc.clone(),
            coeffs,
        }
    }

    /// Compact dotted-hex rendering of the coefficient list, for CSV output.
    pub fn to_hex(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| format!("{c:x}"))
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// The tower of extensions of a fixed base field F_q, q = p^a, with
/// deterministic descriptors per level and a coherent embedding registry.
/// All caches take a lock only briefly; computed values are shared via Arc.
pub struct Tower {
    pub p: u64,
    pub a: usize,
    base: Arc<FieldDescriptor>,
    levels: Mutex<HashMap<usize, Arc<FieldDescriptor>>>,
    embeddings: Mutex<embed::Registry>,
    expansions: Mutex<HashMap<usize, Arc<BaseExpansion>>>,
}

impl Tower {
    pub fn new(p: u64, a: usize) -> Result<Arc<Tower>> {
        let base = make_field(p, a)?;
        let mut levels = HashMap::new();
        levels.insert(1usize, base.clone());
        Ok(Arc::new(Tower {
            p,
            a,
            base,
            levels: Mutex::new(levels),
            embeddings: Mutex::new(embed::Registry::default()),
            expansions: Mutex::new(HashMap::new()),
        }))
    }

    pub fn q(&self) -> u64 {
        (self.p as u128).pow(self.a as u32) as u64
    }

    pub fn base(&self) -> Arc<FieldDescriptor> {
        self.base.clone()
    }

    /// Descriptor of F_{q^e}, represented as a degree a*e extension of F_p.
    pub fn level(&self, e: usize) -> Result<Arc<FieldDescriptor>> {
        assert!(e >= 1);
        if let Some(d) = self.levels.lock().unwrap().get(&e) {
            return Ok(d.clone());
        }
        let d = make_field(self.p, self.a * e)?;
        self.levels.lock().unwrap().insert(e, d.clone());
        Ok(d)
    }

    /// Level of an element: e such that x lives in F_{q^e}.
    pub fn level_of(&self, x: &FieldElement) -> usize {
        assert_eq!(
            x.desc.degree % self.a,
            0,
            "element degree incompatible with the tower base"
        );
        x.desc.degree / self.a
    }

    /// x ↦ x^(q^k), the k-th power of the q-Frobenius.
    pub fn frobenius(&self, x: &FieldElement, k: usize) -> FieldElement {
        let e = self.level_of(x);
        let k = k % e;
        let q = self.q();
        let mut y = x.clone();
        for _ in 0..k {
            y = y.pow(q);
        }
        y
    }

    /// Smallest r >= 1 with x^(q^r) = x; always divides the level of x.
    pub fn minimal_degree(&self, x: &FieldElement) -> usize {
        let e = self.level_of(x);
        let q = self.q();
        let mut y = x.pow(q);
        for r in 1..=e {
            if &y == x {
                debug_assert_eq!(e % r, 0);
                return r;
            }
            y = y.pow(q);
        }
        unreachable!("x^(q^e) = x for every element of F_{{q^e}}");
    }

    /// Norm down to the base field: product over the Frobenius orbit.
    pub fn norm_to_base(&self, x: &FieldElement) -> Result<FieldElement> {
        let e = self.level_of(x);
        let q = self.q();
        let mut prod = x.clone();
        let mut y = x.clone();
        for _ in 1..e {
            y = y.pow(q);
            prod = prod.mul(&y);
        }
        self.contract(&prod)
    }

    /// Trace down to the base field: sum over the Frobenius orbit.
    pub fn trace_to_base(&self, x: &FieldElement) -> Result<FieldElement> {
        let e = self.level_of(x);
        let q = self.q();
        let mut sum = x.clone();
        let mut y = x.clone();
        for _ in 1..e {
            y = y.pow(q);
            sum = sum.add(&y);
        }
        self.contract(&sum)
    }

    /// Fixed ring embedding F_{q^r} -> F_{q^s} for r | s. Deterministic
    /// (smallest compatible root of the source modulus) and cached so that
    /// composites computed in one process agree.
    pub fn embed(&self, x: &FieldElement, target_level: usize) -> Result<FieldElement> {
        let r = self.level_of(x);
        let s = target_level;
        if r == s {
            return Ok(x.clone());
        }
        if s % r != 0 {
            return Err(Error::NotASubfield { sub: r, sup: s });
        }
        let data = {
            let mut reg = self.embeddings.lock().unwrap();
            reg.get_or_build(self, r, s)?
        };
        Ok(embed::apply(&data, x))
    }

    /// Express an element of F_{q^e} in an F_q-basis; used to view jet spaces
    /// over F_{q^e} as F_q-vector spaces of e times the length.
    pub fn base_expansion(&self, e: usize) -> Result<Arc<BaseExpansion>> {
        if let Some(b) = self.expansions.lock().unwrap().get(&e) {
            return Ok(b.clone());
        }
        let b = Arc::new(BaseExpansion::build(self, e)?);
        self.expansions.lock().unwrap().insert(e, b.clone());
        Ok(b)
    }

    /// Inverse of embedding for elements that lie in the base field.
    pub fn contract(&self, x: &FieldElement) -> Result<FieldElement> {
        let e = self.level_of(x);
        if e == 1 {
            return Ok(x.clone());
        }
        let exp = self.base_expansion(e)?;
        let coords = exp.coords(x);
        for c in coords.iter().skip(1) {
            if !c.is_zero() {
                return Err(Error::Internal(
                    "element does not lie in the base field".into(),
                ));
            }
        }
        Ok(coords[0].clone())
    }
}

/// F_q-coordinates on F_{q^e} with respect to the product basis
/// { tau^j * embed(u)^i : j < e, i < a }, where tau generates the level-e
/// representation over F_p and u generates the base field.
pub struct BaseExpansion {
    base: Arc<FieldDescriptor>,
    pub e: usize,
    a: usize,
    p: u64,
    /// Inverse of the F_p change-of-basis matrix, row-major, size (a*e)^2.
    inv: Vec<u64>,
}

impl BaseExpansion {
    fn build(tower: &Tower, e: usize) -> Result<BaseExpansion> {
        let desc = tower.level(e)?;
        let a = tower.a;
        let p = tower.p;
        let d = desc.degree;
        // embedded generator of the base field
        let u_img = if a == 1 {
            FieldElement::one(&desc)
        } else {
            let mut u = FieldElement::zero(&tower.base);
            u.coeffs[1] = 1;
            tower.embed(&u, e)?
        };
        let tau = {
            let mut t = FieldElement::zero(&desc);
            if d > 1 {
                t.coeffs[1] = 1;
            } else {
                t.coeffs[0] = 1;
            }
            t
        };
        // columns: tau^j * u_img^i, ordered j-major
        let mut cols: Vec<Vec<u64>> = Vec::with_capacity(d);
        let mut tau_pow = FieldElement::one(&desc);
        for _ in 0..e {
            let mut up = FieldElement::one(&desc);
            for _ in 0..a {
                cols.push(tau_pow.mul(&up).coeffs.clone());
                up = up.mul(&u_img);
            }
            tau_pow = tau_pow.mul(&tau);
        }
        // invert the d x d matrix over F_p (columns as given)
        let mut m = vec![0u64; d * d];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..d {
                m[i * d + j] = col[i];
            }
        }
        let inv = invert_mod_p(&m, d, p)
            .ok_or_else(|| Error::Internal("base-change matrix is singular".into()))?;
        Ok(BaseExpansion {
            base: tower.base.clone(),
            e,
            a,
            p,
            inv,
        })
    }

    /// Coordinates of x as a vector of e base-field elements.
    pub fn coords(&self, x: &FieldElement) -> Vec<FieldElement> {
        let d = self.a * self.e;
        debug_assert_eq!(x.coeffs.len(), d);
        let mut out = Vec::with_capacity(self.e);
        for j in 0..self.e {
            let mut coeffs = vec![0u64; self.a];
            for i in 0..self.a {
                let row = j * self.a + i;
                let mut acc = 0u64;
                for k in 0..d {
                    acc = add_p(acc, mul_p(self.inv[row * d + k], x.coeffs[k], self.p), self.p);
                }
                coeffs[i] = acc;
            }
            out.push(FieldElement::from_coeffs(&self.base, coeffs));
        }
        out
    }
}

/// Inverse of a d x d matrix over F_p (row-major), if invertible.
fn invert_mod_p(m: &[u64], d: usize, p: u64) -> Option<Vec<u64>> {
    let mut a = m.to_vec();
    let mut inv = vec![0u64; d * d];
    for i in 0..d {
        inv[i * d + i] = 1;
    }
    for col in 0..d {
        let pivot = (col..d).find(|&r| a[r * d + col] != 0)?;
        if pivot != col {
            for j in 0..d {
                a.swap(col * d + j, pivot * d + j);
                inv.swap(col * d + j, pivot * d + j);
            }
        }
        let pi = inv_p(a[col * d + col], p);
        for j in 0..d {
            a[col * d + j] = mul_p(a[col * d + j], pi, p);
            inv[col * d + j] = mul_p(inv[col * d + j], pi, p);
        }
        for r in 0..d {
            if r == col || a[r * d + col] == 0 {
                continue;
            }
            let f = a[r * d + col];
            for j in 0..d {
                let s = mul_p(f, a[col * d + j], p);
                a[r * d + j] = sub_p(a[r * d + j], s, p);
                let s = mul_p(f, inv[col * d + j], p);
                inv[r * d + j] = sub_p(inv[r * d + j], s, p);
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_deterministic() {
        let a = make_field(3, 2).unwrap();
        let b = make_field(3, 2).unwrap();
        assert_eq!(a, b);
        assert!(matches!(make_field(4, 1), Err(Error::NotPrime(4))));
        assert_eq!(make_field(2, 2).unwrap().modulus, vec![1, 1, 1]);
    }

    #[test]
    fn field_cap_enforced() {
        assert!(matches!(
            make_field(2, 33),
            Err(Error::CapExceeded { .. })
        ));
    }

    fn all_elements(desc: &Arc<FieldDescriptor>) -> Vec<FieldElement> {
        (0..desc.order() as u64)
            .map(|i| FieldElement::from_index(desc, i))
            .collect()
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        // exhaustive triple checks on fields of order 4, 8, 9
        for (p, n) in [(2u64, 2usize), (2, 3), (3, 2)] {
            let desc = make_field(p, n).unwrap();
            let els = all_elements(&desc);
            for x in &els {
                for y in &els {
                    assert_eq!(x.add(y), y.add(x));
                    assert_eq!(x.mul(y), y.mul(x));
                    for z in &els {
                        assert_eq!(x.add(y).add(z), x.add(&y.add(z)));
                        assert_eq!(x.mul(y).mul(z), x.mul(&y.mul(z)));
                        assert_eq!(x.mul(&y.add(z)), x.mul(y).add(&x.mul(z)));
                    }
                }
            }
        }
    }

    #[test]
    fn inverses_exhaustive() {
        // every nonzero element invertible; fields up to order 4096
        for (p, n) in [(2u64, 12usize), (3, 4), (5, 3), (7, 2), (13, 1)] {
            let desc = make_field(p, n).unwrap();
            let one = FieldElement::one(&desc);
            for i in 1..desc.order() as u64 {
                let x = FieldElement::from_index(&desc, i);
                assert_eq!(x.mul(&x.inv()), one);
            }
        }
    }

    #[test]
    fn fermat_identity() {
        // x^(q^e) = x for all elements of F_{q^e}
        let tower = Tower::new(2, 1).unwrap();
        let desc = tower.level(4).unwrap();
        for i in 0..16 {
            let x = FieldElement::from_index(&desc, i);
            assert_eq!(tower.frobenius(&x, 4), x);
        }
    }

    #[test]
    fn frobenius_on_f4_generator() {
        // under modulus t^2 + t + 1 the generator t maps to t^2 = t + 1
        let tower = Tower::new(2, 1).unwrap();
        let desc = tower.level(2).unwrap();
        let t = FieldElement::from_coeffs(&desc, vec![0, 1]);
        let expected = FieldElement::from_coeffs(&desc, vec![1, 1]);
        assert_eq!(tower.frobenius(&t, 1), expected);
    }

    #[test]
    fn frobenius_fixes_base() {
        let tower = Tower::new(3, 1).unwrap();
        let desc = tower.level(3).unwrap();
        for v in 0..3 {
            let c = FieldElement::from_int(&desc, v);
            for k in 0..5 {
                assert_eq!(tower.frobenius(&c, k), c);
            }
        }
    }

    #[test]
    fn minimal_degree_counts_f16() {
        // over F_2: 2 elements of degree 1, 2 of degree 2, 12 of degree 4
        let tower = Tower::new(2, 1).unwrap();
        let desc = tower.level(4).unwrap();
        let mut counts = HashMap::new();
        for i in 0..16 {
            let x = FieldElement::from_index(&desc, i);
            *counts.entry(tower.minimal_degree(&x)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.get(&1), Some(&2));
        assert_eq!(counts.get(&2), Some(&2));
        assert_eq!(counts.get(&4), Some(&12));
    }

    #[test]
    fn norm_orbit_product_in_base() {
        let tower = Tower::new(3, 1).unwrap();
        let desc = tower.level(2).unwrap();
        for i in 0..9 {
            let x = FieldElement::from_index(&desc, i);
            let n = tower.norm_to_base(&x).unwrap();
            assert_eq!(n.desc, tower.base());
        }
    }

    #[test]
    fn base_expansion_roundtrip() {
        let tower = Tower::new(2, 2).unwrap(); // base F_4
        let exp = tower.base_expansion(2).unwrap(); // F_16 over F_4
        let desc = tower.level(2).unwrap();
        for i in 0..16 {
            let x = FieldElement::from_index(&desc, i);
            let coords = exp.coords(&x);
            assert_eq!(coords.len(), 2);
            // reconstruct: sum coords[j] * tau^j
            let tau = FieldElement::from_coeffs(&desc, vec![0, 1, 0, 0]);
            let mut acc = FieldElement::zero(&desc);
            let mut tp = FieldElement::one(&desc);
            for c in &coords {
                let c_emb = tower.embed(c, 2).unwrap();
                acc = acc.add(&c_emb.mul(&tp));
                tp = tp.mul(&tau);
            }
            assert_eq!(acc, x);
        }
    }
}
