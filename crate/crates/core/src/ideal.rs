//! Prime ideals of `O_K`, valuations and principal-ideal factorisation.
//!
//! A prime above `p` is kept in two-generator form `<p, w - r>` where `r` is a
//! root of the minimal polynomial of `w` modulo `p` (or `<p>` when `p` is
//! inert). Valuations never touch general ideal arithmetic: after clearing
//! denominators and the `p`-content, an element can be divisible by at most
//! one of two split conjugates, so the norm carries the rest.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{BigRat, FieldCtx, QuadElem};
use crate::error::{Error, Result};
use crate::factor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitKind::Split => "split",
            SplitKind::Inert => "inert",
            SplitKind::Ramified => "ramified",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    ctx: FieldCtx,
    p: u64,
    kind: SplitKind,
    /// Image of `w` in the residue field; 0 and unused when inert.
    root: u64,
    /// 0 or 1; distinguishes the two primes above a split `p`.
    index: u8,
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ctx, self.p, self.index).cmp(&(other.ctx, other.p, other.index))
    }
}

impl PrimeIdeal {
    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn kind(&self) -> SplitKind {
        self.kind
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    /// Ramification index.
    pub fn e(&self) -> u32 {
        if self.kind == SplitKind::Ramified {
            2
        } else {
            1
        }
    }

    /// Residue degree.
    pub fn f(&self) -> u32 {
        if self.kind == SplitKind::Inert {
            2
        } else {
            1
        }
    }

    pub fn norm(&self) -> u128 {
        (self.p as u128).pow(self.f())
    }

    pub fn residue_root(&self) -> Option<u64> {
        (self.kind != SplitKind::Inert).then_some(self.root)
    }

    /// The second generator: `w - r`, or `p` itself when inert.
    pub fn second_gen(&self) -> QuadElem {
        match self.kind {
            SplitKind::Inert => QuadElem::from_int(self.ctx, self.p),
            _ => QuadElem::from_ints(self.ctx, -(self.root as i128), 1),
        }
    }

    /// Short label used in data files: `s0`, `s1`, `inert` or `ram`.
    pub fn label(&self) -> &'static str {
        match (self.kind, self.index) {
            (SplitKind::Split, 0) => "s0",
            (SplitKind::Split, _) => "s1",
            (SplitKind::Inert, _) => "inert",
            (SplitKind::Ramified, _) => "ram",
        }
    }

    /// Look a prime up by rational prime and label.
    pub fn from_label(ctx: FieldCtx, p: u64, label: &str) -> Result<PrimeIdeal> {
        let (_, primes) = splitting_type(p, ctx)?;
        primes
            .into_iter()
            .find(|q| q.label() == label)
            .ok_or_else(|| Error::Parse(format!("no prime above {p} with label {label:?} in {ctx}")))
    }

    pub fn conj(&self) -> PrimeIdeal {
        match self.kind {
            SplitKind::Split => {
                let (_, primes) = splitting_type(self.p, self.ctx).expect("p is prime");
                primes[1 - self.index as usize].clone()
            }
            _ => self.clone(),
        }
    }

    /// Valuation of `e` at this prime.
    pub fn val(&self, e: &QuadElem) -> Result<i64> {
        val(e, self)
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SplitKind::Inert => write!(f, "<{}>", self.p),
            _ if self.root == 0 => write!(f, "<{}, w>", self.p),
            _ => write!(f, "<{}, w-{}>", self.p, self.root),
        }
    }
}

fn min_poly_roots_mod(ctx: FieldCtx, p: u64) -> Vec<u64> {
    let (b, c) = ctx.omega_min_poly();
    let pi = p as i128;
    let eval = |x: u64| {
        let x = x as i128;
        (x * x + b as i128 * x + c as i128).rem_euclid(pi)
    };
    if p == 2 {
        return (0..2).filter(|&x| eval(x) == 0).collect();
    }
    let disc = (b as i128 * b as i128 - 4 * c as i128).rem_euclid(pi) as u64;
    let Some(s) = factor::sqrt_mod_prime(disc, p) else {
        return Vec::new();
    };
    let inv2 = (pi + 1) / 2;
    let mut roots: Vec<u64> = [s as i128, -(s as i128)]
        .iter()
        .map(|&sq| ((-(b as i128) + sq).rem_euclid(pi) * inv2 % pi) as u64)
        .collect();
    roots.sort_unstable();
    roots.dedup();
    debug_assert!(roots.iter().all(|&r| eval(r) == 0));
    roots
}

/// Decomposition of a rational prime in `K`, with the primes above it.
pub fn splitting_type(p: u64, ctx: FieldCtx) -> Result<(SplitKind, Vec<PrimeIdeal>)> {
    if !factor::is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let kind = match factor::kronecker(ctx.disc(), p) {
        0 => SplitKind::Ramified,
        1 => SplitKind::Split,
        _ => SplitKind::Inert,
    };
    let primes = match kind {
        SplitKind::Inert => vec![PrimeIdeal {
            ctx,
            p,
            kind,
            root: 0,
            index: 0,
        }],
        _ => {
            let roots = min_poly_roots_mod(ctx, p);
            let expected = if kind == SplitKind::Split { 2 } else { 1 };
            assert_eq!(roots.len(), expected, "root count disagrees with Kronecker symbol");
            roots
                .into_iter()
                .enumerate()
                .map(|(i, root)| PrimeIdeal {
                    ctx,
                    p,
                    kind,
                    root,
                    index: i as u8,
                })
                .collect()
        }
    };
    Ok((kind, primes))
}

pub fn primes_above(p: u64, ctx: FieldCtx) -> Result<Vec<PrimeIdeal>> {
    Ok(splitting_type(p, ctx)?.1)
}

/// The primes above 3.
pub fn primes_above_3(ctx: FieldCtx) -> Vec<PrimeIdeal> {
    primes_above(3, ctx).expect("3 is prime")
}

fn int_val(n: &BigInt, p: u64) -> Option<u32> {
    (!n.is_zero()).then(|| factor::valuation(n, p))
}

/// Exact `P`-adic valuation; an error for `e = 0`.
pub fn val(e: &QuadElem, prime: &PrimeIdeal) -> Result<i64> {
    if e.ctx() != prime.ctx {
        return Err(Error::FieldMismatch {
            left: e.ctx().d(),
            right: prime.ctx.d(),
        });
    }
    if e.is_zero() {
        return Err(Error::InfiniteValuation);
    }
    let p = prime.p;
    let den = e.denominator();
    let scaled = e.scale(&BigRat::from_integer(den.clone()));
    let (x, y) = scaled.integral_coords().expect("cleared denominators");
    let content = match (int_val(&x, p), int_val(&y, p)) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => unreachable!("nonzero element"),
    };
    let integral_val = match prime.kind {
        SplitKind::Inert => content as i64,
        SplitKind::Ramified => factor::valuation(&scaled.norm().to_integer(), p) as i64,
        SplitKind::Split => {
            let pk = BigInt::from(p).pow(content);
            let (x1, y1) = (&x / &pk, &y / &pk);
            let residue = (&x1 + &y1 * BigInt::from(prime.root)).mod_floor(&BigInt::from(p));
            if residue.is_zero() {
                let unit_part = QuadElem::from_ints(e.ctx(), x1, y1);
                content as i64 + factor::valuation(&unit_part.norm().to_integer(), p) as i64
            } else {
                content as i64
            }
        }
    };
    let den_val = factor::valuation(&den, p) as i64 * prime.e() as i64;
    Ok(integral_val - den_val)
}

/// Factorisation of a principal fractional ideal `(e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealFactorization {
    pub factors: Vec<(PrimeIdeal, i64)>,
}

impl IdealFactorization {
    pub fn support(&self) -> Vec<PrimeIdeal> {
        self.factors.iter().map(|(q, _)| q.clone()).collect()
    }

    /// `prod N(P)^v` as a rational number; equals `|N(e)|`.
    pub fn norm_product(&self) -> BigRat {
        let mut acc = BigRat::from_integer(1.into());
        for (q, v) in &self.factors {
            let n = BigRat::from_integer(BigInt::from(q.norm()));
            let mut pw = BigRat::from_integer(1.into());
            for _ in 0..v.unsigned_abs() {
                pw *= &n;
            }
            if *v < 0 {
                pw = pw.recip();
            }
            acc *= pw;
        }
        acc
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

fn to_small_prime(p: BigUint) -> Result<u64> {
    p.to_u64().ok_or_else(|| Error::PrimeTooLarge(p.to_string()))
}

/// Rational primes below every prime ideal that can divide `(e)`.
fn candidate_primes(e: &QuadElem) -> Result<BTreeSet<u64>> {
    let norm = e.norm();
    let mut out = BTreeSet::new();
    for n in [norm.numer().clone(), e.denominator()] {
        for p in factor::prime_divisors(&n) {
            out.insert(to_small_prime(p)?);
        }
    }
    Ok(out)
}

pub fn factor_principal(e: &QuadElem) -> Result<IdealFactorization> {
    if e.is_zero() {
        return Err(Error::ZeroInput("cannot factor the zero ideal".into()));
    }
    let mut factors = Vec::new();
    for p in candidate_primes(e)? {
        for q in primes_above(p, e.ctx())? {
            let v = val(e, &q)?;
            if v != 0 {
                factors.push((q, v));
            }
        }
    }
    Ok(IdealFactorization { factors })
}

fn require_nonzero_integral(items: &[(&str, &QuadElem)]) -> Result<()> {
    for (name, x) in items {
        if x.is_zero() {
            return Err(Error::ZeroInput(format!("{name} is zero")));
        }
        if !x.is_integral() {
            return Err(Error::NotIntegral(format!("{name} = {x}")));
        }
    }
    Ok(())
}

/// True iff no prime ideal divides two of `a, b, c`.
pub fn pairwise_coprime(a: &QuadElem, b: &QuadElem, c: &QuadElem) -> Result<bool> {
    require_nonzero_integral(&[("a", a), ("b", b), ("c", c)])?;
    for (x, y) in [(a, b), (a, c), (b, c)] {
        for q in factor_principal(x)?.support() {
            if val(y, &q)? > 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `T_K`: the primes dividing `3ABC`, sorted and deduplicated.
pub fn tk_set(a: &QuadElem, b: &QuadElem, c: &QuadElem) -> Result<Vec<PrimeIdeal>> {
    require_nonzero_integral(&[("A", a), ("B", b), ("C", c)])?;
    let three = QuadElem::from_int(a.ctx(), 3);
    let mut set: BTreeSet<PrimeIdeal> = BTreeSet::new();
    for x in [&three, a, b, c] {
        set.extend(factor_principal(x)?.support());
    }
    Ok(set.into_iter().collect())
}

/// Whether `P` divides `3ABC`, without factoring anything.
pub fn in_tk(prime: &PrimeIdeal, a: &QuadElem, b: &QuadElem, c: &QuadElem) -> Result<bool> {
    let prod = &(&QuadElem::from_int(a.ctx(), 3) * a) * &(b * c);
    Ok(val(&prod, prime)? > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(d: u64) -> FieldCtx {
        FieldCtx::new(d).unwrap()
    }

    fn el(ctx: FieldCtx, s: &str) -> QuadElem {
        QuadElem::parse(ctx, s).unwrap()
    }

    #[test]
    fn splitting_examples() {
        let c = k(7);
        assert_eq!(splitting_type(3, c).unwrap().0, SplitKind::Inert);
        assert_eq!(splitting_type(7, c).unwrap().0, SplitKind::Ramified);
        let (kind, primes) = splitting_type(2, c).unwrap();
        assert_eq!(kind, SplitKind::Split);
        assert_eq!(primes.len(), 2);
        assert!(primes.iter().all(|q| q.norm() == 2));
        let w = QuadElem::omega(c);
        let vals: Vec<i64> = primes.iter().map(|q| val(&w, q).unwrap()).collect();
        assert_eq!(vals.iter().sum::<i64>(), 1);
        assert!(vals.contains(&0));
        assert!(splitting_type(9, c).is_err());
    }

    #[test]
    fn valuation_examples() {
        let c = k(7);
        let lambda = &primes_above_3(c)[0];
        assert_eq!(val(&QuadElem::from_int(c, 3), lambda).unwrap(), 1);
        assert_eq!(val(&el(c, "1/9"), lambda).unwrap(), -2);
        assert!(matches!(val(&QuadElem::zero(c), lambda), Err(Error::InfiniteValuation)));
    }

    #[test]
    fn split_conjugates_can_cancel_in_norm() {
        let c = k(7);
        let w = QuadElem::omega(c);
        let quotient = w.checked_div(&w.conj()).unwrap();
        assert_eq!(quotient.norm(), BigRat::from_integer(1.into()));
        let f = factor_principal(&quotient).unwrap();
        let exps: Vec<i64> = f.factors.iter().map(|(_, v)| *v).collect();
        assert_eq!(exps.len(), 2);
        assert_eq!(exps.iter().sum::<i64>(), 0);
    }

    #[test]
    fn factor_examples() {
        let c = k(7);
        let six = factor_principal(&QuadElem::from_int(c, 6)).unwrap();
        assert_eq!(six.factors.len(), 3);
        assert!(six.factors.iter().all(|(_, v)| *v == 1));
        assert_eq!(six.norm_product(), BigRat::from_integer(36.into()));
        assert!(factor_principal(&QuadElem::one(c)).unwrap().is_empty());
        let w = factor_principal(&QuadElem::omega(c)).unwrap();
        assert_eq!(w.factors.len(), 1);
        assert_eq!(w.factors[0].0.p(), 2);
        assert_eq!(w.factors[0].1, 1);
        assert!(factor_principal(&QuadElem::zero(c)).is_err());
    }

    #[test]
    fn coprimality_examples() {
        let c = k(7);
        let i = |n: i64| QuadElem::from_int(c, n);
        assert!(pairwise_coprime(&i(1), &i(2), &i(3)).unwrap());
        assert!(!pairwise_coprime(&i(2), &i(2), &i(1)).unwrap());
        let w = QuadElem::omega(c);
        assert!(!pairwise_coprime(&w, &w.conj(), &i(2)).unwrap());
        // w and its conjugate lie over different primes above 2
        assert!(pairwise_coprime(&w, &w.conj(), &i(3)).unwrap());
        assert!(pairwise_coprime(&i(0), &i(1), &i(1)).is_err());
    }

    #[test]
    fn tk_examples() {
        let c = k(7);
        let one = QuadElem::one(c);
        let t = tk_set(&one, &one, &one).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].p(), t[0].kind()), (3, SplitKind::Inert));
        let t = tk_set(&one, &QuadElem::from_int(c, 7), &one).unwrap();
        assert_eq!(t.iter().map(|q| (q.p(), q.kind())).collect::<Vec<_>>(),
                   vec![(3, SplitKind::Inert), (7, SplitKind::Ramified)]);
        let c19 = k(19);
        let one = QuadElem::one(c19);
        let t = tk_set(&one, &QuadElem::from_int(c19, 19), &one).unwrap();
        assert_eq!(t.iter().map(|q| q.p()).collect::<Vec<_>>(), vec![3, 19]);
    }

    #[test]
    fn labels_round_trip() {
        let c = k(7);
        for p in [2, 3, 5, 7, 11] {
            for q in primes_above(p, c).unwrap() {
                assert_eq!(PrimeIdeal::from_label(c, p, q.label()).unwrap(), q);
            }
        }
        let p2 = PrimeIdeal::from_label(c, 2, "s0").unwrap();
        assert_eq!(p2.conj().label(), "s1");
    }
}
