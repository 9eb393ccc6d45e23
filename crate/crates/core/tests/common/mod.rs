//! Seeded generators shared by the integration tests, plus a small
//! valuation model for totally ramified extensions of Q_3.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pp3_core::classgroup::prime_generator;
use pp3_core::frey::{j_valuation_threshold, FreyInstance};
use pp3_core::ideal::{primes_above_3, val};
use pp3_core::{FieldCtx, QuadElem};

/// Fields covering all three behaviours of 3 and both choices of `omega`.
pub const FIELDS: [u64; 9] = [2, 3, 5, 6, 7, 11, 19, 43, 67];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn field(rng: &mut impl Rng) -> FieldCtx {
    FieldCtx::new(*FIELDS.choose(rng).unwrap()).unwrap()
}

pub fn int(ctx: FieldCtx, n: i64) -> QuadElem {
    QuadElem::from_int(ctx, n)
}

pub fn elem(rng: &mut impl Rng, ctx: FieldCtx, r: i64) -> QuadElem {
    QuadElem::from_ints(ctx, rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}

pub fn nonzero_elem(rng: &mut impl Rng, ctx: FieldCtx, r: i64) -> QuadElem {
    loop {
        let x = elem(rng, ctx, r);
        if !x.is_zero() {
            return x;
        }
    }
}

/// A solution of `A a^p + B b^p = C c^3`, built either with `c = 1` and `C`
/// solved for, or with `C = 1`, `b = +-1` and `B` solved for.
pub fn frey_instance(rng: &mut impl Rng, ctx: FieldCtx, primes: &[u64], r: i64) -> FreyInstance {
    loop {
        let p = *primes.choose(rng).unwrap();
        let e = p as u32;
        let coef_a = nonzero_elem(rng, ctx, 2);
        let a = nonzero_elem(rng, ctx, r);
        let (coef_b, b, coef_c, c) = if rng.gen_bool(0.5) {
            let coef_b = nonzero_elem(rng, ctx, 2);
            let b = nonzero_elem(rng, ctx, r);
            let coef_c = &coef_a * &a.pow(e) + &coef_b * &b.pow(e);
            (coef_b, b, coef_c, int(ctx, 1))
        } else {
            let b = int(ctx, if rng.gen_bool(0.5) { 1 } else { -1 });
            let c = nonzero_elem(rng, ctx, r);
            let coef_b = (c.pow(3) - &coef_a * &a.pow(e)).checked_div(&b.pow(e)).unwrap();
            (coef_b, b, int(ctx, 1), c)
        };
        if coef_b.is_zero() || coef_c.is_zero() {
            continue;
        }
        return FreyInstance::new(coef_a, coef_b, coef_c, a, b, c, p).unwrap();
    }
}

pub fn primitive_frey_instance(
    rng: &mut impl Rng,
    ctx: FieldCtx,
    primes: &[u64],
    r: i64,
) -> FreyInstance {
    loop {
        let inst = frey_instance(rng, ctx, primes, r);
        if inst.is_primitive() {
            return inst;
        }
    }
}

fn prime_to_3(rng: &mut impl Rng, ctx: FieldCtx, r: i64) -> QuadElem {
    let s3 = primes_above_3(ctx);
    loop {
        let x = nonzero_elem(rng, ctx, r);
        if s3.iter().all(|l| val(&x, l).unwrap() == 0) {
            return x;
        }
    }
}

/// A primitive solution with every prime above 3 dividing `ab`, `C` solved
/// for with `c = 1`, and `p` above the j-valuation threshold at each prime above 3.
pub fn wk_instance(rng: &mut impl Rng, ctx: FieldCtx, primes: &[u64]) -> FreyInstance {
    let s3 = primes_above_3(ctx);
    let gens: Option<Vec<QuadElem>> = s3.iter().map(prime_generator).collect();
    loop {
        let p = *primes.choose(rng).unwrap();
        let e = p as u32;
        let u = prime_to_3(rng, ctx, 3);
        let w = prime_to_3(rng, ctx, 3);
        let (x, y) = match &gens {
            // Split with principal primes: one prime into each of a, b.
            Some(g) if g.len() == 2 && rng.gen_bool(0.5) => (
                g[0].pow(rng.gen_range(1..=2)) * &u,
                g[1].pow(rng.gen_range(1..=2)) * &w,
            ),
            Some(g) if g.len() == 1 && rng.gen_bool(0.5) => (g[0].pow(rng.gen_range(1..=3)) * &u, w),
            _ => (int(ctx, 3).pow(rng.gen_range(1..=2)) * &u, w),
        };
        let (a, b) = if rng.gen_bool(0.5) { (x, y) } else { (y, x) };
        let unit3 = |rng: &mut dyn rand::RngCore| {
            let k = *[1i64, 2, 4, 5, 7].choose(rng).unwrap();
            let s = if rng.gen_bool(0.3) { 3 } else { 1 };
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            int(ctx, sign * k * s)
        };
        let coef_a = unit3(rng);
        let coef_b = unit3(rng);
        let coef_c = &coef_a * &a.pow(e) + &coef_b * &b.pow(e);
        if coef_c.is_zero() {
            continue;
        }
        let inst = match FreyInstance::new(coef_a, coef_b, coef_c, a, b, int(ctx, 1), p) {
            Ok(i) => i,
            Err(_) => continue,
        };
        if !inst.is_primitive() {
            continue;
        }
        if s3
            .iter()
            .all(|l| (p as i64) > j_valuation_threshold(&inst, l).unwrap())
        {
            return inst;
        }
    }
}

/// `Z_3[pi]` with `pi^e = 3`. Elements are integer coordinates on
/// `1, pi, ..., pi^(e-1)`; the valuation is normalised so `v(pi) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eisenstein {
    pub e: usize,
}

impl Eisenstein {
    pub fn int(&self, n: i64) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.e];
        v[0] = n.into();
        v
    }

    pub fn pi_pow(&self, k: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.e];
        v[k % self.e] = BigInt::from(3).pow((k / self.e) as u32);
        v
    }

    pub fn add(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }

    pub fn mul(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.e];
        for (i, a) in x.iter().enumerate() {
            for (j, b) in y.iter().enumerate() {
                let k = i + j;
                let t = a * b;
                if k >= self.e {
                    out[k - self.e] += 3 * t;
                } else {
                    out[k] += t;
                }
            }
        }
        out
    }

    /// The terms `c_i pi^i` have valuations `e v_3(c_i) + i`, which are
    /// distinct, so the minimum is attained once.
    pub fn val(&self, x: &[BigInt]) -> Option<i64> {
        x.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let mut c = c.clone();
                let mut k = 0i64;
                while (&c % 3u32).is_zero() {
                    c /= 3;
                    k += 1;
                }
                self.e as i64 * k + i as i64
            })
            .min()
    }

    pub fn is_unit(&self, x: &[BigInt]) -> bool {
        self.val(x) == Some(0)
    }

    pub fn one(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.e];
        v[0] = BigInt::one();
        v
    }
}
