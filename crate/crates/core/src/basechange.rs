//! Eigenvalue records for Bianchi newforms that arise by base change from
//! semistable elliptic curves over `Q`.
//!
//! If `E/Q` has conductor `d` or `3d` then its base change to `K` has level
//! `D` or `LD`, and the eigenvalue at a prime `q` of `K` is the trace of
//! Frobenius of `E` over the residue field: `a_p(E)` when `N(q) = p`, and
//! `a_p(E)^2 - 2p` when `q = (p)` is inert (`a_p^2` if `p` is bad). The
//! `pot_good` flag of a curve at the prime above 3 is `v_3(j) >= 0`, which is
//! an isogeny invariant.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Deserialize;

use crate::arith::{BigRat, FieldCtx};
use crate::error::{Error, Result};
use crate::factor::{self, primes_up_to};
use crate::hecke::HeckeField;
use crate::ideal::{primes_above, SplitKind};
use crate::newform::{Level, NewformFile, NewformRecord, NORM_LIMIT};

/// A Weierstrass model `[a1, a2, a3, a4, a6]` over `Z`, assumed minimal.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct RationalCurve {
    pub label: String,
    pub ainvs: [i64; 5],
}

impl fmt::Display for RationalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}", self.label, self.ainvs)
    }
}

impl RationalCurve {
    pub fn new(label: impl Into<String>, ainvs: [i64; 5]) -> RationalCurve {
        RationalCurve { label: label.into(), ainvs }
    }

    /// `LABEL=a1,a2,a3,a4,a6`.
    pub fn parse(s: &str) -> Result<RationalCurve> {
        let (label, coeffs) = s
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected LABEL=a1,a2,a3,a4,a6, got {s:?}")))?;
        let v: Vec<i64> = coeffs
            .split(',')
            .map(|c| c.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        let ainvs: [i64; 5] = v
            .try_into()
            .map_err(|_| Error::Parse(format!("{s:?}: need exactly five coefficients")))?;
        Ok(RationalCurve::new(label.trim(), ainvs))
    }

    /// `(c4, c6, Delta)`.
    pub fn invariants(&self) -> (BigInt, BigInt, BigInt) {
        let [a1, a2, a3, a4, a6] = self.ainvs.map(BigInt::from);
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        let c4 = &b2 * &b2 - 24 * &b4;
        let b2_cubed: BigInt = &b2 * &b2 * &b2;
        let c6 = -b2_cubed + 36 * &b2 * &b4 - 216 * &b6;
        let b2sq_b8: BigInt = &b2 * &b2 * &b8;
        let delta = -b2sq_b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
        (c4, c6, delta)
    }

    /// The conductor, provided the model is semistable (`gcd(c4, Delta) = 1`).
    pub fn semistable_conductor(&self) -> Option<u64> {
        let (c4, _, delta) = self.invariants();
        if delta.is_zero() || !c4.gcd(&delta).is_one() {
            return None;
        }
        factor::prime_divisors(&delta)
            .into_iter()
            .map(|p| p.to_u64())
            .product()
    }

    /// `a_p = p + 1 - #E(F_p)`, counting the singular point when `p` is bad.
    pub fn ap(&self, p: u64) -> i64 {
        let [a1, a2, a3, a4, a6] = self.ainvs.map(|a| a.rem_euclid(p as i64) as u64);
        let mut affine = 0u64;
        for x in 0..p {
            let lin = (a1 * x + a3) % p;
            let cub = (((x * x % p) * x) % p + a2 * x % p * x % p + a4 * x + a6) % p;
            if p == 2 {
                affine += (0..2).filter(|y| (y * y + lin * y + 2 * p - cub) % p == 0).count() as u64;
            } else {
                // y^2 + lin y = cub  <=>  (2y + lin)^2 = lin^2 + 4 cub
                let disc = (lin * lin + 4 * cub) % p;
                affine += match factor::kronecker(disc as i64, p) {
                    0 => 1,
                    1 => 2,
                    _ => 0,
                };
            }
        }
        p as i64 - affine as i64
    }

    /// `v_p(j) >= 0`.
    pub fn pot_good_at(&self, p: u64) -> bool {
        let (c4, _, delta) = self.invariants();
        if c4.is_zero() {
            return true;
        }
        3 * factor::valuation(&c4, p) as i64 >= factor::valuation(&delta, p) as i64
    }
}

/// The base-change eigenvalue at every prime of norm below the limit,
/// excluding primes above 3.
pub fn bianchi_form(
    ctx: FieldCtx,
    id: &str,
    level: Level,
    curves: &[RationalCurve],
) -> Result<NewformRecord> {
    let rep = curves
        .first()
        .ok_or_else(|| Error::Precondition(format!("form {id} has no curves")))?;
    let d = ctx.d();
    let expected = match level {
        Level::D => d,
        Level::LD => 3 * d,
    };
    for c in curves {
        match c.semistable_conductor() {
            Some(n) if n == expected => {}
            other => {
                return Err(Error::Precondition(format!(
                    "{c}: conductor {other:?}, expected semistable conductor {expected}"
                )))
            }
        }
    }
    let hecke = HeckeField::rational();
    let mut eigenvalues = BTreeMap::new();
    for p in primes_up_to(NORM_LIMIT as u64) {
        if p == 3 {
            continue;
        }
        let ap = rep.ap(p);
        for q in primes_above(p, ctx)? {
            if q.norm() >= NORM_LIMIT {
                continue;
            }
            let value = match q.kind() {
                SplitKind::Split | SplitKind::Ramified => ap,
                SplitKind::Inert if expected % p == 0 => ap * ap,
                SplitKind::Inert => ap * ap - 2 * p as i64,
            };
            eigenvalues.insert(q, hecke.from_rat(BigRat::from_integer(value.into())));
        }
    }
    Ok(NewformRecord {
        ctx,
        id: id.to_string(),
        level,
        hecke,
        eigenvalues,
        curves_at_lambda: Some(curves.iter().map(|c| c.pot_good_at(3)).collect()),
    })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSource {
    pub id: String,
    pub level: Level,
    pub curves: Vec<RationalCurve>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSource {
    pub d: u64,
    pub forms: Vec<FormSource>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSources {
    pub field: Vec<FieldSource>,
}

pub fn parse_sources(text: &str) -> Result<FixtureSources> {
    toml::from_str(text).map_err(|e| Error::Config(format!("fixture sources: {e}")))
}

/// The newform file for field `d` described by `sources`.
pub fn build_fixture(sources: &FixtureSources, d: u64) -> Result<NewformFile> {
    let ctx = FieldCtx::new(d)?;
    let field = sources
        .field
        .iter()
        .find(|f| f.d == d)
        .ok_or_else(|| Error::Config(format!("no fixture sources for d = {d}")))?;
    let forms = field
        .forms
        .iter()
        .map(|f| bianchi_form(ctx, &f.id, f.level, &f.curves))
        .collect::<Result<Vec<_>>>()?;
    Ok(NewformFile { ctx, forms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_ap(c: &RationalCurve, p: u64) -> i64 {
        let [a1, a2, a3, a4, a6] = c.ainvs;
        let p = p as i64;
        let mut n = 1;
        for x in 0..p {
            for y in 0..p {
                if (y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6)).rem_euclid(p) == 0 {
                    n += 1;
                }
            }
        }
        p + 1 - n
    }

    #[test]
    fn ap_matches_brute_force() {
        let curves = [
            RationalCurve::new("21a1", [1, 0, 0, -4, -1]),
            RationalCurve::new("19a1", [0, 1, 1, -9, -15]),
            RationalCurve::new("11a1", [0, -1, 1, -10, -20]),
        ];
        for c in &curves {
            for p in primes_up_to(60) {
                assert_eq!(c.ap(p), brute_ap(c, p), "{c} p = {p}");
            }
        }
        // 11a1: a_2 = -2, a_3 = -1, a_5 = 1, a_11 = 1
        let c = &curves[2];
        assert_eq!([2, 3, 5, 11].map(|p| c.ap(p)), [-2, -1, 1, 1]);
    }

    #[test]
    fn conductors() {
        assert_eq!(RationalCurve::new("21a1", [1, 0, 0, -4, -1]).semistable_conductor(), Some(21));
        assert_eq!(RationalCurve::new("19a1", [0, 1, 1, -9, -15]).semistable_conductor(), Some(19));
        assert_eq!(RationalCurve::new("27a1", [0, 0, 1, 0, -7]).semistable_conductor(), None);
    }

    #[test]
    fn parse_curve() {
        let c = RationalCurve::parse("21a1=1,0,0,-4,-1").unwrap();
        assert_eq!(c.ainvs, [1, 0, 0, -4, -1]);
        assert!(RationalCurve::parse("21a1=1,0,0").is_err());
    }

    #[test]
    fn inert_and_ramified_values() {
        let ctx = FieldCtx::new(7).unwrap();
        let c = RationalCurve::new("21a1", [1, 0, 0, -4, -1]);
        let f = bianchi_form(ctx, "f", Level::LD, std::slice::from_ref(&c)).unwrap();
        let get = |p: u64, label: &str| {
            let q = crate::ideal::PrimeIdeal::from_label(ctx, p, label).unwrap();
            f.eigenvalues[&q].as_rational().unwrap().clone()
        };
        let r = |n: i64| BigRat::from_integer(n.into());
        assert_eq!(get(2, "s0"), r(c.ap(2)));
        assert_eq!(get(5, "inert"), r(c.ap(5) * c.ap(5) - 10));
        assert_eq!(get(7, "ram"), r(c.ap(7)));
        assert_eq!(f.curves_at_lambda, Some(vec![false]));
        assert!(bianchi_form(ctx, "f", Level::D, &[c]).is_err());
    }
}
