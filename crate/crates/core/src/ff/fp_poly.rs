//! Dense polynomials over the prime field Z/pZ, used only to certify moduli.
//!
//! Coefficients are stored low-to-high and kept trimmed (no trailing zeros).

pub(crate) fn mul_mod_p(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod_p(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_p(acc, base, p);
        }
        base = mul_mod_p(base, base, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod_p(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod_p(a, p - 2, p)
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo the monic-or-not nonzero `b`.
pub(crate) fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = mul_mod_p(r[dr], lead_inv, p);
        let shift = dr - db;
        for (i, &bc) in b.iter().enumerate() {
            let t = mul_mod_p(c, bc, p);
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = trim(r);
    }
    r
}

pub(crate) fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mul_mod_p(x, y, p)) % p;
        }
    }
    rem(&prod, f, p)
}

pub(crate) fn pow_mod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = rem(&[1], f, p);
    let mut b = rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, f, p);
        }
        b = mul_mod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Irreducibility over Z/pZ: `f` of degree m is irreducible iff
/// gcd(x^{p^i} - x, f) = 1 for every 1 <= i <= m/2.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    let m = f.len().saturating_sub(1);
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let x = vec![0, 1];
    let mut frob = rem(&x, &f, p);
    for _ in 1..=m / 2 {
        frob = pow_mod(&frob, p, &f, p);
        let mut diff = frob.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = gcd(&f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}
