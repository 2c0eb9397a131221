//! Exact integer helpers: primality, p-adic valuation of integers, modular
//! inverses.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Miller-Rabin with the first thirteen primes as bases is deterministic for
/// every n below this bound.
const MR_BOUND: &str = "3317044064679887385961981";
const MR_WITNESSES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

pub fn miller_rabin_bound() -> BigUint {
    MR_BOUND.parse().expect("valid literal")
}

/// Deterministic primality test. Fails for inputs at or above
/// [`miller_rabin_bound`], where no proven witness set is used.
pub fn is_prime(n: &BigUint) -> Result<bool> {
    if *n >= miller_rabin_bound() {
        return Err(Error::PrimeOutOfRange(n.clone()));
    }
    let two = BigUint::from(2u32);
    if *n < two {
        return Ok(false);
    }
    for &w in &MR_WITNESSES {
        let w = BigUint::from(w);
        if *n == w {
            return Ok(true);
        }
        if (n % &w).is_zero() {
            return Ok(false);
        }
    }

    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;

    'witness: for &w in &MR_WITNESSES {
        let mut x = BigUint::from(w).modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Largest `v` with `p^v | n`, or `None` for `n = 0`.
pub fn padic_valuation(n: &BigUint, p: &BigUint) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    if *p == BigUint::from(2u32) {
        return n.trailing_zeros().map(|v| v as u32);
    }
    let mut v = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        rest = q;
        v += 1;
    }
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    let a = BigInt::from(a % m);
    let m_signed = BigInt::from(m.clone());
    let ext = a.extended_gcd(&m_signed);
    if !ext.gcd.is_one() {
        return None;
    }
    let inv = ext.x.mod_floor(&m_signed);
    inv.to_biguint()
}

pub fn pow(base: &BigUint, exp: u32) -> BigUint {
    num_traits::pow(base.clone(), exp as usize)
}
