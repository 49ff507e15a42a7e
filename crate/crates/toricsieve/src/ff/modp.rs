//! Arithmetic mod a prime p < 2^32 and dense polynomials over F_p.
//! Used to construct field descriptors (irreducible moduli) and to reduce
//! extension-field elements.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[inline]
pub fn add_p(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_p(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mul_p(a: u64, b: u64, p: u64) -> u64 {
    // p < 2^32, so the product fits in u64
    (a * b) % p
}

pub fn pow_p(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_p(r, a, p);
        }
        a = mul_p(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv_p(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0, "inverse of zero");
    pow_p(a, p - 2, p)
}

/// Dense polynomial over F_p, coefficients low-to-high, no trailing zeros.
pub type PolyP = Vec<u64>;

pub fn poly_trim(f: &mut PolyP) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

pub fn poly_deg(f: &PolyP) -> isize {
    f.len() as isize - 1
}

pub fn poly_mul(f: &PolyP, g: &PolyP, p: u64) -> PolyP {
    if f.is_empty() || g.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = add_p(out[i + j], mul_p(a, b, p), p);
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of f modulo the monic polynomial m.
pub fn poly_rem(f: &PolyP, m: &PolyP, p: u64) -> PolyP {
    debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
    let mut r = f.clone();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (j, &c) in m.iter().enumerate() {
                let idx = shift + j;
                r[idx] = sub_p(r[idx], mul_p(lead, c, p), p);
            }
        }
        r.pop();
    }
    poly_trim(&mut r);
    r
}

pub fn poly_pow_mod(base: &PolyP, mut e: u64, m: &PolyP, p: u64) -> PolyP {
    let mut result = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_rem(&poly_mul(&result, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    result
}

pub fn poly_gcd(f: &PolyP, g: &PolyP, p: u64) -> PolyP {
    let (mut a, mut b) = (f.clone(), g.clone());
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        // make b monic for the remainder step
        let lead_inv = inv_p(*b.last().unwrap(), p);
        let monic: PolyP = b.iter().map(|&c| mul_p(c, lead_inv, p)).collect();
        let r = poly_rem(&a, &monic, p);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let li = inv_p(lead, p);
        for c in &mut a {
            *c = mul_p(*c, li, p);
        }
    }
    a
}

/// Irreducibility over F_p: x^(p^n) ≡ x mod f, and gcd(x^(p^(n/l)) - x, f) = 1
/// for every prime l dividing n.
pub fn poly_is_irreducible(f: &PolyP, p: u64) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    if f[0] == 0 {
        return false; // divisible by x
    }
    let x = vec![0u64, 1];
    // x^(p^n) via n successive p-th powers
    let mut xp = x.clone();
    let mut powers = Vec::with_capacity(n);
    for _ in 0..n {
        xp = poly_pow_mod(&xp, p, f, p);
        powers.push(xp.clone());
    }
    let mut top = powers[n - 1].clone();
    // top must equal x
    if top.len() >= 2 {
        top[1] = sub_p(top[1], 1, p);
    } else {
        top.resize(2, 0);
        top[1] = sub_p(0, 1, p);
    }
    poly_trim(&mut top);
    if !top.is_empty() {
        return false;
    }
    let mut m = n;
    let mut primes = Vec::new();
    let mut q = 2;
    while q * q <= m {
        if m % q == 0 {
            primes.push(q);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for l in primes {
        let mut h = powers[n / l - 1].clone();
        if h.len() >= 2 {
            h[1] = sub_p(h[1], 1, p);
        } else {
            h.resize(2, 0);
            h[1] = sub_p(0, 1, p);
        }
        poly_trim(&mut h);
        let g = poly_gcd(&h, f, p);
        if poly_deg(&g) != 0 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree n over F_p, where
/// candidates are compared by their low-to-high coefficient lists.
pub fn smallest_irreducible(p: u64, n: usize) -> PolyP {
    assert!(n >= 1);
    if n == 1 {
        return vec![0, 1]; // the polynomial t
    }
    // Enumerate lower coefficients (c_0, ..., c_{n-1}) in lexicographic order
    // with c_0 most significant in the comparison.
    let mut coeffs = vec![0u64; n];
    loop {
        let mut f = coeffs.clone();
        f.push(1);
        if poly_is_irreducible(&f, p) {
            return f;
        }
        // increment, rightmost coefficient fastest so that the leftmost stays
        // smallest as long as possible
        let mut i = n;
        loop {
            if i == 0 {
                unreachable!("an irreducible of every degree exists");
            }
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
        }
    }
}
