//! Exact elements of Z[w], w a primitive p-th root of unity.
//!
//! Stored on the basis 1, w, ..., w^{p-2}; the w^{p-1} coordinate is always
//! folded away through 1 + w + ... + w^{p-1} = 0.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloInt {
    p: u64,
    coeffs: Vec<i128>,
}

impl fmt::Debug for CycloInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloInt(p={}, {:?})", self.p, self.coeffs)
    }
}

impl fmt::Display for CycloInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(i128::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl CycloInt {
    pub fn zero(p: u64) -> Self {
        assert!(p >= 2);
        CycloInt { p, coeffs: vec![0; (p - 1) as usize] }
    }

    pub fn from_int(p: u64, n: i128) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[0] = n;
        z
    }

    /// w^k.
    pub fn omega_pow(p: u64, k: u64) -> Self {
        let mut counts = vec![0u64; p as usize];
        counts[(k % p) as usize] = 1;
        Self::from_exponent_counts(p, &counts)
    }

    /// sum_k counts[k] w^k for k in 0..p.
    pub fn from_exponent_counts(p: u64, counts: &[u64]) -> Self {
        assert_eq!(counts.len() as u64, p);
        let full: Vec<i128> = counts.iter().map(|&c| c as i128).collect();
        Self::fold(p, full)
    }

    /// Folds a length-p vector on 1..w^{p-1} into canonical form.
    fn fold(p: u64, mut full: Vec<i128>) -> Self {
        let top = full.pop().expect("length p");
        for c in full.iter_mut() {
            *c -= top;
        }
        CycloInt { p, coeffs: full }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Canonical coordinates on 1, w, ..., w^{p-2}.
    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    /// The rational integer this equals, if any.
    pub fn as_integer(&self) -> Option<i128> {
        self.coeffs[1..].iter().all(|&c| c == 0).then(|| self.coeffs[0])
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        CycloInt { p: self.p, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        CycloInt { p: self.p, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Self {
        CycloInt { p: self.p, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, k: i128) -> Self {
        CycloInt { p: self.p, coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        let p = self.p as usize;
        let mut full = vec![0i128; p];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                full[(i + j) % p] += a * b;
            }
        }
        Self::fold(self.p, full)
    }

    /// Re-canonicalizes; a no-op on values built through this API.
    pub fn reduce(&self) -> Self {
        let mut full = self.coeffs.clone();
        full.push(0);
        Self::fold(self.p, full)
    }
}
