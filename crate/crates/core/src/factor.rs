//! Rational-integer number theory: primality, factorisation, square roots
//! modulo primes and the Kronecker symbol.
//!
//! Factorisation is trial division followed by Pollard-Brent; primality is
//! Miller-Rabin (deterministic below 2^64).

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const TRIAL_LIMIT: u64 = 2000;
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Sieve of Eratosthenes, inclusive bound.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin; exact below 2^64, probabilistic (12 fixed bases) above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in small_primes() {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'bases: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn abs_diff(a: &BigUint, b: &BigUint) -> BigUint {
    if a > b {
        a - b
    } else {
        b - a
    }
}

/// One Pollard-Brent run with polynomial x^2 + c. Returns a proper divisor
/// or `None` when the run degenerates.
fn pollard_brent(n: &BigUint, c: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let step = |v: &BigUint| (v * v + &c) % n;
    let batch = 64u64;
    let one = BigUint::one();
    let mut y = BigUint::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut g = one.clone();
    let mut q = one.clone();
    let mut r = 1u64;
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = step(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..batch.min(r - k) {
                y = step(&y);
                q = q * abs_diff(&x, &y) % n;
            }
            g = q.gcd(n);
            k += batch;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = step(&ys);
            g = abs_diff(&x, &ys).gcd(n);
            if g != one {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn split_composite(n: &BigUint) -> BigUint {
    for k in [2u32, 3, 5, 7] {
        let root = n.nth_root(k);
        if root.pow(k) == *n {
            return root;
        }
    }
    let mut c = 1u64;
    loop {
        if let Some(f) = pollard_brent(n, c) {
            return f;
        }
        c += 1;
    }
}

/// Prime factorisation of `n >= 1` as an ordered map prime -> exponent.
pub fn factor(n: &BigUint) -> BTreeMap<BigUint, u32> {
    let mut out: BTreeMap<BigUint, u32> = BTreeMap::new();
    if n.is_zero() {
        return out;
    }
    let mut rest = n.clone();
    for &p in small_primes() {
        if rest.is_one() {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            *out.entry(BigUint::from(p)).or_default() += 1;
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            *out.entry(m).or_default() += 1;
            continue;
        }
        let f = split_composite(&m);
        let other = &m / &f;
        stack.push(f);
        stack.push(other);
    }
    out
}

pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    factor(&BigUint::from(n))
        .into_iter()
        .map(|(p, e)| (p.to_u64().expect("factor of a u64 fits"), e))
        .collect()
}

/// Distinct prime divisors of `|n|` (empty for 0 and ±1).
pub fn prime_divisors(n: &BigInt) -> Vec<BigUint> {
    if n.is_zero() {
        return Vec::new();
    }
    factor(n.magnitude()).into_keys().collect()
}

pub fn largest_prime_factor(n: &BigUint) -> Option<BigUint> {
    factor(n).into_keys().next_back()
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factor_u64(n).iter().all(|&(_, e)| e == 1)
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let mut m = n.abs();
    let p = BigInt::from(p);
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// A square root of `a` modulo an odd prime `p`, if one exists (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if p == 2 || a == 0 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    if s == 1 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Kronecker symbol (disc / p) for a prime `p`.
pub fn kronecker(disc: i64, p: u64) -> i8 {
    if p == 2 {
        if disc.rem_euclid(2) == 0 {
            return 0;
        }
        return match disc.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let a = disc.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Exact integer cube root, if `n` is a perfect cube.
pub fn exact_cbrt(n: &BigInt) -> Option<BigInt> {
    let r = n.cbrt();
    (&r * &r * &r == *n).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_sieve() {
        let sieve = primes_up_to(5000);
        for n in 0..5000u64 {
            assert_eq!(is_prime_u64(n), sieve.binary_search(&n).is_ok(), "{n}");
        }
    }

    #[test]
    fn factor_reconstructs() {
        for n in [1u64, 2, 12, 97, 1001, 788480, 86338229, 600851475143, 1_000_000_016_000_000_063] {
            let f = factor(&BigUint::from(n));
            let prod: BigUint = f.iter().map(|(p, e)| p.pow(*e)).product();
            assert_eq!(prod, BigUint::from(n));
            assert!(f.keys().all(is_probable_prime));
        }
    }

    #[test]
    fn factor_large_prime_powers() {
        let p: BigUint = "1000000007".parse().unwrap();
        let q: BigUint = "998244353".parse().unwrap();
        let n = p.pow(3) * &q;
        let f = factor(&n);
        assert_eq!(f.get(&p), Some(&3));
        assert_eq!(f.get(&q), Some(&1));
    }

    #[test]
    fn tonelli_shanks() {
        for p in primes_up_to(400).into_iter().skip(1) {
            for a in 0..p {
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!(r * r % p, a),
                    None => assert!((0..p).all(|x| x * x % p != a)),
                }
            }
        }
    }

    #[test]
    fn kronecker_small() {
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-7, 3), -1);
        assert_eq!(kronecker(-7, 7), 0);
        assert_eq!(kronecker(-20, 2), 0);
        assert_eq!(kronecker(-19, 2), -1);
        assert_eq!(kronecker(-67, 3), -1);
    }
}
