//! Subfield embeddings F_{q^r} -> F_{q^s}.
//!
//! The image of the source generator is a root of the source modulus in the
//! target field: the smallest such root in the coefficient-list order, subject
//! to compatibility with every embedding already committed in this registry.
//! Whenever a new map closes a triangle whose third leg is missing, the
//! composite is committed as well, so chained and direct embeddings agree
//! within a process run.

use super::{FieldDescriptor, FieldElement, Tower};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::Arc;

pub struct EmbedData {
    pub src_level: usize,
    pub dst_level: usize,
    /// Powers rho^0 .. rho^(deg_src - 1) of the chosen root, in the target.
    pub powers: Vec<FieldElement>,
}

/// Apply the embedding: x = sum x_j * g^j maps to sum x_j * rho^j.
pub fn apply(data: &EmbedData, x: &FieldElement) -> FieldElement {
    let dst = &data.powers[0].desc;
    let mut acc = FieldElement::zero(dst);
    for (j, &c) in x.coeffs.iter().enumerate() {
        if c != 0 {
            acc = acc.add(&data.powers[j].scale(c));
        }
    }
    acc
}

#[derive(Default)]
pub struct Registry {
    maps: HashMap<(usize, usize), Arc<EmbedData>>,
}

impl Registry {
    pub fn get_or_build(
        &mut self,
        tower: &Tower,
        r: usize,
        s: usize,
    ) -> Result<Arc<EmbedData>> {
        if let Some(m) = self.maps.get(&(r, s)) {
            return Ok(m.clone());
        }
        let src = tower.level(r)?;
        let dst = tower.level(s)?;
        // Lift the source modulus to the target and collect its roots there.
        let f: Vec<FieldElement> = src
            .modulus
            .iter()
            .map(|&c| FieldElement::from_int(&dst, c))
            .collect();
        let mut roots = all_roots(&dst, &f)?;
        roots.sort_by(|a, b| a.cmp_order(b));

        // Filter by committed triangles below (through t | r) and above
        // (through u with s | u).
        let keys: Vec<(usize, usize)> = self.maps.keys().copied().collect();
        for &(t, rr) in &keys {
            if rr != r || t == r {
                continue;
            }
            if let Some(upper) = self.maps.get(&(t, s)) {
                let lower = self.maps.get(&(t, r)).unwrap().clone();
                if lower.powers.len() < 2 {
                    continue; // prime-field source embeds canonically
                }
                let g_img_r = lower.powers[1].clone();
                let want = upper.powers.get(1).cloned();
                let Some(want) = want else { continue };
                roots.retain(|rho| {
                    let data = powers_of(rho, src.degree);
                    apply(
                        &EmbedData {
                            src_level: r,
                            dst_level: s,
                            powers: data.clone(),
                        },
                        &g_img_r,
                    ) == want
                });
            }
        }
        for &(ss, u) in &keys {
            if ss != s {
                continue;
            }
            if let Some(direct) = self.maps.get(&(r, u)) {
                if direct.powers.len() < 2 {
                    continue;
                }
                let above = self.maps.get(&(s, u)).unwrap().clone();
                let want = direct.powers[1].clone();
                roots.retain(|rho| apply(&above, rho) == want);
            }
        }
        let rho = roots.into_iter().next().ok_or_else(|| {
            Error::Internal("no compatible root for subfield embedding".into())
        })?;
        let data = Arc::new(EmbedData {
            src_level: r,
            dst_level: s,
            powers: powers_of(&rho, src.degree),
        });
        self.maps.insert((r, s), data.clone());

        // Commit composites so future direct queries agree with chains.
        let keys: Vec<(usize, usize)> = self.maps.keys().copied().collect();
        for (t, rr) in keys.clone() {
            if rr == r && t != r && !self.maps.contains_key(&(t, s)) {
                let lower = self.maps.get(&(t, r)).unwrap().clone();
                let powers = lower.powers.iter().map(|y| apply(&data, y)).collect();
                self.maps.insert(
                    (t, s),
                    Arc::new(EmbedData {
                        src_level: t,
                        dst_level: s,
                        powers,
                    }),
                );
            }
        }
        for (ss, u) in keys {
            if ss == s && !self.maps.contains_key(&(r, u)) {
                let above = self.maps.get(&(s, u)).unwrap().clone();
                let powers = data.powers.iter().map(|y| apply(&above, y)).collect();
                self.maps.insert(
                    (r, u),
                    Arc::new(EmbedData {
                        src_level: r,
                        dst_level: u,
                        powers,
                    }),
                );
            }
        }
        Ok(data)
    }
}

fn powers_of(rho: &FieldElement, n: usize) -> Vec<FieldElement> {
    let mut powers = Vec::with_capacity(n);
    let mut acc = FieldElement::one(&rho.desc);
    for _ in 0..n {
        powers.push(acc.clone());
        acc = acc.mul(rho);
    }
    powers
}

const BRUTE_ROOT_LIMIT: u128 = 4096;

/// All roots in the coefficient field of a monic polynomial that splits
/// completely there (the lift of an F_p-irreducible always does once the field
/// contains one root, and the root orbit under x -> x^p supplies the rest).
fn all_roots(dst: &Arc<FieldDescriptor>, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let n = f.len() - 1;
    let first = if dst.order() <= BRUTE_ROOT_LIMIT {
        let mut found = None;
        for i in 0..dst.order() as u64 {
            let x = FieldElement::from_index(dst, i);
            if eval_poly(f, &x).is_zero() {
                found = Some(x);
                break;
            }
        }
        found.ok_or_else(|| Error::Internal("modulus has no root in the target field".into()))?
    } else {
        split_one_root(dst, f.to_vec())?
    };
    let p = dst.p;
    let mut roots = vec![first.clone()];
    let mut x = first.pow(p);
    while x != first {
        roots.push(x.clone());
        x = x.pow(p);
    }
    if roots.len() != n {
        return Err(Error::Internal(
            "root orbit shorter than the source degree".into(),
        ));
    }
    Ok(roots)
}

fn eval_poly(f: &[FieldElement], x: &FieldElement) -> FieldElement {
    let mut acc = FieldElement::zero(&x.desc);
    for c in f.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Deterministic root extraction by additive-character splitting: gcds of f
/// with translates of trace polynomials T(c X) separate the roots.
fn split_one_root(dst: &Arc<FieldDescriptor>, f: Vec<FieldElement>) -> Result<FieldElement> {
    let mut f = kmonic(ktrim(f));
    loop {
        let deg = f.len() - 1;
        if deg == 1 {
            return Ok(f[0].neg());
        }
        let p = dst.p;
        let d_total = dst.degree;
        let mut split: Option<Vec<FieldElement>> = None;
        'search: for c_exp in 0..d_total {
            let c = gen_power(dst, c_exp);
            // T(cX) = sum over i of (cX)^(p^i) reduced mod f
            let cx = ktrim(vec![FieldElement::zero(dst), c]);
            let mut h = krem(&cx, &f);
            let mut t = h.clone();
            for _ in 1..d_total {
                h = kpow_mod(&h, p, &f);
                t = kadd(&t, &h);
            }
            for b in 0..p {
                let mut tb = t.clone();
                if tb.is_empty() {
                    tb = vec![FieldElement::from_int(dst, b).neg()];
                } else {
                    tb[0] = tb[0].sub(&FieldElement::from_int(dst, b));
                    tb = ktrim(tb);
                }
                let g = kgcd(&tb, &f);
                let dg = g.len().saturating_sub(1);
                if dg > 0 && dg < deg {
                    split = Some(g);
                    break 'search;
                }
            }
        }
        match split {
            Some(g) => f = kmonic(g),
            None => {
                return Err(Error::Internal(
                    "trace splitting failed on a separable polynomial".into(),
                ))
            }
        }
    }
}

fn gen_power(desc: &Arc<FieldDescriptor>, e: usize) -> FieldElement {
    let tau = if desc.degree > 1 {
        FieldElement::from_coeffs(desc, vec![0, 1])
    } else {
        FieldElement::one(desc)
    };
    tau.pow(e as u64)
}

// Small polynomial toolkit over a field, coefficients low-to-high, trimmed.

fn ktrim(mut f: Vec<FieldElement>) -> Vec<FieldElement> {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

fn kmonic(f: Vec<FieldElement>) -> Vec<FieldElement> {
    let f = ktrim(f);
    match f.last() {
        None => f,
        Some(lead) if lead.is_zero() => unreachable!(),
        Some(lead) => {
            let li = lead.inv();
            f.iter().map(|c| c.mul(&li)).collect()
        }
    }
}

fn kadd(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let n = a.len().max(b.len());
    if n == 0 {
        return vec![];
    }
    let desc = if a.is_empty() { &b[0].desc } else { &a[0].desc };
    let z = FieldElement::zero(desc);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).unwrap_or(&z);
        let y = b.get(i).unwrap_or(&z);
        out.push(x.add(y));
    }
    ktrim(out)
}

fn kmul(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let desc = &a[0].desc;
    let mut out = vec![FieldElement::zero(desc); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    ktrim(out)
}

/// Remainder modulo a monic polynomial.
fn krem(a: &[FieldElement], m: &[FieldElement]) -> Vec<FieldElement> {
    let mut r = ktrim(a.to_vec());
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - dm;
        if !lead.is_zero() {
            for (j, c) in m.iter().enumerate() {
                r[shift + j] = r[shift + j].sub(&lead.mul(c));
            }
        }
        r.pop();
        r = ktrim(r);
        if r.len() <= dm {
            break;
        }
    }
    ktrim(r)
}

fn kpow_mod(base: &[FieldElement], mut e: u64, m: &[FieldElement]) -> Vec<FieldElement> {
    let desc = &m[0].desc;
    let mut result = vec![FieldElement::one(desc)];
    let mut b = krem(base, m);
    while e > 0 {
        if e & 1 == 1 {
            result = krem(&kmul(&result, &b), m);
        }
        b = krem(&kmul(&b, &b), m);
        e >>= 1;
    }
    result
}

fn kgcd(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let mut a = ktrim(a.to_vec());
    let mut b = ktrim(b.to_vec());
    while !b.is_empty() {
        let m = kmonic(b.clone());
        let r = krem(&a, &m);
        a = b;
        b = r;
    }
    kmonic(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Tower;

    #[test]
    fn constants_embed_as_constants() {
        let tower = Tower::new(5, 1).unwrap();
        for v in 0..5 {
            let x = FieldElement::from_int(&tower.base(), v);
            let y = tower.embed(&x, 3).unwrap();
            assert_eq!(y.coeffs[0], v % 5);
            assert!(y.coeffs[1..].iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn embedding_is_a_ring_hom() {
        let tower = Tower::new(2, 1).unwrap();
        let f4 = tower.level(2).unwrap();
        for i in 0..4u64 {
            for j in 0..4u64 {
                let x = FieldElement::from_index(&f4, i);
                let y = FieldElement::from_index(&f4, j);
                let ex = tower.embed(&x, 4).unwrap();
                let ey = tower.embed(&y, 4).unwrap();
                assert_eq!(tower.embed(&x.mul(&y), 4).unwrap(), ex.mul(&ey));
                assert_eq!(tower.embed(&x.add(&y), 4).unwrap(), ex.add(&ey));
            }
        }
    }

    #[test]
    fn composite_chains_agree_with_direct() {
        // q^r -> q^{rs} -> q^{rst} equals the direct map, both insertion orders
        let tower = Tower::new(2, 1).unwrap();
        let f4 = tower.level(2).unwrap();
        for i in 0..4u64 {
            let x = FieldElement::from_index(&f4, i);
            let via = tower.embed(&tower.embed(&x, 4).unwrap(), 8).unwrap();
            let direct = tower.embed(&x, 8).unwrap();
            assert_eq!(via, direct);
        }
        // opposite query order in a fresh tower
        let tower = Tower::new(2, 1).unwrap();
        let f4 = tower.level(2).unwrap();
        for i in 0..4u64 {
            let x = FieldElement::from_index(&f4, i);
            let direct = tower.embed(&x, 8).unwrap();
            let via = tower.embed(&tower.embed(&x, 4).unwrap(), 8).unwrap();
            assert_eq!(via, direct);
        }
    }

    #[test]
    fn three_level_chain_consistency() {
        let tower = Tower::new(3, 1).unwrap();
        let f3_2 = tower.level(2).unwrap();
        for i in 0..9u64 {
            let x = FieldElement::from_index(&f3_2, i);
            let a = tower.embed(&tower.embed(&x, 4).unwrap(), 8).unwrap();
            let b = tower.embed(&x, 8).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn non_divisible_levels_rejected() {
        let tower = Tower::new(2, 1).unwrap();
        let f4 = tower.level(2).unwrap();
        let x = FieldElement::from_index(&f4, 2);
        assert!(matches!(
            tower.embed(&x, 3),
            Err(crate::error::Error::NotASubfield { sub: 2, sup: 3 })
        ));
    }

    #[test]
    fn norm_and_trace_behave_under_embedding() {
        // brute force over all of F_4 into F_16: norm gets raised to the
        // relative degree, trace gets multiplied by it
        let tower = Tower::new(2, 1).unwrap();
        let f4 = tower.level(2).unwrap();
        for i in 0..4u64 {
            let x = FieldElement::from_index(&f4, i);
            let y = tower.embed(&x, 4).unwrap();
            let nx = tower.norm_to_base(&x).unwrap();
            let ny = tower.norm_to_base(&y).unwrap();
            assert_eq!(ny, nx.mul(&nx), "norm transitivity");
            let tx = tower.trace_to_base(&x).unwrap();
            let ty = tower.trace_to_base(&y).unwrap();
            assert_eq!(ty, tx.scale(2), "trace transitivity");
        }
    }

    #[test]
    fn split_one_root_on_larger_field() {
        // force the trace-splitting path: roots of the F_2-minimal polynomial
        // of degree 13 inside F_{2^13} (order 8192 > brute limit)
        let tower = Tower::new(2, 1).unwrap();
        let f = tower.level(13).unwrap();
        let src = crate::ff::make_field(2, 13).unwrap();
        let lifted: Vec<FieldElement> = src
            .modulus
            .iter()
            .map(|&c| FieldElement::from_int(&f, c))
            .collect();
        let root = split_one_root(&f, lifted.clone()).unwrap();
        assert!(eval_poly(&lifted, &root).is_zero());
    }
}
