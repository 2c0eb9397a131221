//! Factor specifications such as `2^1,2^3,2^4` or `Z/2xZ/8xZ/16`.
//!
//! A term is either `p^e` with `p` prime, or a cyclic modulus (`Z/n` or a
//! bare `n`). Moduli are split into prime powers by trial division up to
//! [`TRIAL_DIVISION_LIMIT`]; whatever is left must itself be prime, otherwise
//! the modulus has to be given pre-factored.

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rootex_core::{arith, PrimePower};

pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// Parses a factor specification into prime-power factors, in the order
/// they were written.
pub fn parse_factor_spec(spec: &str) -> Result<Vec<PrimePower>> {
    let normalized = spec.replace('×', "x");
    let terms: Vec<&str> = normalized
        .split([',', 'x', 'X', '*'])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    if terms.is_empty() {
        bail!("empty factor specification {spec:?}");
    }
    let mut factors = Vec::new();
    for term in terms {
        factors.extend(parse_term(term).with_context(|| format!("in factor {term:?}"))?);
    }
    Ok(factors)
}

fn parse_term(term: &str) -> Result<Vec<PrimePower>> {
    if let Some((p, e)) = term.split_once('^') {
        let p: BigUint = p.trim().parse().map_err(|_| anyhow!("bad prime {p:?}"))?;
        let e: u32 = e
            .trim()
            .parse()
            .map_err(|_| anyhow!("bad exponent {e:?}"))?;
        return Ok(vec![PrimePower::new(p, e)?]);
    }
    let digits = term
        .strip_prefix("Z/")
        .or_else(|| term.strip_prefix("z/"))
        .unwrap_or(term)
        .trim();
    let n: BigUint = digits
        .parse()
        .map_err(|_| anyhow!("bad modulus {digits:?}"))?;
    split_modulus(&n)
}

/// Splits `Z/n` into its primary components, smallest prime first.
pub fn split_modulus(n: &BigUint) -> Result<Vec<PrimePower>> {
    if n <= &BigUint::one() {
        bail!("modulus must be at least 2, got {n}");
    }
    let mut rest = n.clone();
    let mut out = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_LIMIT && BigUint::from(d) * BigUint::from(d) <= rest {
        let mut e = 0;
        while rest.is_multiple_of(&BigUint::from(d)) {
            rest /= d;
            e += 1;
        }
        if e > 0 {
            out.push(PrimePower::new(BigUint::from(d), e)?);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        let small = rest
            .to_u64()
            .is_some_and(|r| r <= TRIAL_DIVISION_LIMIT * TRIAL_DIVISION_LIMIT);
        if !small && !arith::is_prime(&rest)? {
            bail!("{n} has a factor above {TRIAL_DIVISION_LIMIT}; give it as prime powers");
        }
        out.push(PrimePower::new(rest, 1)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(spec: &str) -> Vec<(u64, u32)> {
        parse_factor_spec(spec)
            .unwrap()
            .iter()
            .map(|f| (f.prime().to_u64().unwrap(), f.exponent()))
            .collect()
    }

    #[test]
    fn both_notations() {
        assert_eq!(pairs("2^1,2^3,2^4"), [(2, 1), (2, 3), (2, 4)]);
        assert_eq!(pairs("Z/2xZ/8xZ/16"), [(2, 1), (2, 3), (2, 4)]);
        assert_eq!(pairs("Z/2 × Z/8"), [(2, 1), (2, 3)]);
        assert_eq!(pairs("4, 9"), [(2, 2), (3, 2)]);
    }

    #[test]
    fn composite_moduli_are_split() {
        assert_eq!(pairs("Z/12"), [(2, 2), (3, 1)]);
        assert_eq!(pairs("Z/360"), [(2, 3), (3, 2), (5, 1)]);
        assert_eq!(pairs("Z/1000003"), [(1000003, 1)]);
        // 999983 · 1000003, both prime: the cofactor test sees a prime
        assert_eq!(pairs("Z/999985999949"), [(999983, 1), (1000003, 1)]);
    }

    #[test]
    fn bad_specs() {
        for bad in ["", "4^2", "2^0", "Z/1", "Z/x", "2^a", "x,x"] {
            assert!(parse_factor_spec(bad).is_err(), "{bad}");
        }
        // product of two primes above the trial-division limit
        let n = "Z/1000036000099"; // 1000003 · 1000033
        assert!(parse_factor_spec(n).is_err());
    }
}
