//! Polynomial gadgets phi(X) = sum A_j X^j whose values on preimage counts
//! separate n-to-1 maps from the rest.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported degree J.
pub const MAX_PHI_DEGREE: usize = 8;
const MAX_DENOMINATOR: i64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiMode {
    /// n does not divide p^m: phi(0) = phi(n) = 0, phi(p^m mod n) = 1, phi > 1 elsewhere.
    Nondivisor,
    /// n = p^k: phi(0) = phi(p^k) = 0, phi > 0 elsewhere.
    Divisor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiGadget {
    coeffs: Vec<BigRational>,
    mode: PhiMode,
    n: u64,
    p: u64,
    m: u32,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl PhiGadget {
    pub fn new(coeffs: Vec<BigRational>, mode: PhiMode, n: u64, p: u64, m: u32) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_PHI_DEGREE + 1 {
            return Err(Error::DegreeTooHigh { degree: coeffs.len().saturating_sub(1) as u64, limit: MAX_PHI_DEGREE as u64 });
        }
        if coeffs.iter().any(|a| a.denom() > &BigInt::from(MAX_DENOMINATOR)) {
            return Err(Error::InvalidParameter("phi denominators must not exceed 2^31".into()));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let q = p.checked_pow(m).ok_or(Error::InvalidParameter("p^m overflows".into()))?;
        match mode {
            PhiMode::Nondivisor if q % n == 0 => {
                return Err(Error::InvalidParameter(format!("nondivisor mode needs n={n} not dividing {q}")))
            }
            PhiMode::Divisor if !is_power_of(n, p) || n > q => {
                return Err(Error::InvalidParameter(format!("divisor mode needs n={n} = p^k <= {q}")))
            }
            _ => {}
        }
        Ok(PhiGadget { coeffs, mode, n, p, m })
    }

    /// X(X-2)^2 = X^3 - 4X^2 + 4X for 2-to-1 maps in odd characteristic.
    pub fn phi1(p: u64, m: u32) -> Result<Self> {
        Self::new(vec![int(0), int(4), int(-4), int(1)], PhiMode::Nondivisor, 2, p, m)
    }

    /// X(X-p^k)^2 = X^3 - 2p^k X^2 + p^{2k} X for p^k-to-1 maps.
    pub fn phi2(p: u64, m: u32, k: u32) -> Result<Self> {
        if k == 0 || k > m {
            return Err(Error::InvalidParameter(format!("need 1 <= k <= m, got k={k}")));
        }
        let pk = p.pow(k) as i64;
        Self::new(vec![int(0), int(pk * pk), int(-2 * pk), int(1)], PhiMode::Divisor, pk as u64, p, m)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn mode(&self) -> PhiMode {
        self.mode
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.m)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: u64) -> BigRational {
        let x = BigRational::from_integer(BigInt::from(x));
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, a| acc * &x + a)
    }

    /// The value the characterization sum must attain: 1 or 0.
    pub fn bound(&self) -> BigRational {
        match self.mode {
            PhiMode::Nondivisor => BigRational::one(),
            PhiMode::Divisor => BigRational::zero(),
        }
    }

    /// First integer X in [0, p^m] (or n itself) where the mode's pattern fails.
    pub fn violation(&self) -> Option<u64> {
        let q = self.order();
        let one = BigRational::one();
        let special = q % self.n;
        let check = |x: u64| -> bool {
            let v = self.eval(x);
            match self.mode {
                PhiMode::Nondivisor => {
                    if x == 0 || x == self.n {
                        v.is_zero()
                    } else if x == special {
                        v == one
                    } else {
                        v > one
                    }
                }
                PhiMode::Divisor => {
                    if x == 0 || x == self.n {
                        v.is_zero()
                    } else {
                        v.is_positive()
                    }
                }
            }
        };
        (0..=q).chain(std::iter::once(self.n)).find(|&x| !check(x))
    }
}

/// Whether the gadget satisfies its mode's value pattern on [0, p^m].
pub fn validate_phi(g: &PhiGadget) -> bool {
    g.violation().is_none()
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    while n > 1 && n % p == 0 {
        n /= p;
    }
    n == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corollary_gadgets_validate() {
        for (p, m) in [(3, 2), (5, 2), (3, 3), (7, 1)] {
            assert!(validate_phi(&PhiGadget::phi1(p, m).unwrap()));
            for k in 1..=m {
                assert!(validate_phi(&PhiGadget::phi2(p, m, k).unwrap()));
            }
        }
        assert!(PhiGadget::phi1(2, 3).is_err());
    }

    #[test]
    fn identity_gadget_fails_at_two() {
        let g = PhiGadget::new(vec![int(0), int(1)], PhiMode::Nondivisor, 2, 3, 2).unwrap();
        // phi(1) = 1 holds; phi(2) = 2 should be 0
        assert_eq!(g.violation(), Some(2));
        assert!(!validate_phi(&g));
    }

    #[test]
    fn rational_coefficients() {
        // phi(X) = X(X-2)^2 / 1 scaled by 1/2 breaks phi(1) = 1
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let g = PhiGadget::new(vec![int(0), int(2), int(-2), half], PhiMode::Nondivisor, 2, 3, 2).unwrap();
        assert_eq!(g.violation(), Some(1));
    }
}
