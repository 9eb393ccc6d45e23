//! The S-unit equation `alpha + 1 = gamma^3` for `S` the primes above 3,
//! cube-scaling normalisation of `alpha + beta = gamma^3`, the `T_K` valuation
//! condition and the three-interval analysis of `v(mu)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::{BigRat, FieldCtx, QuadElem};
use crate::classgroup::prime_generator;
use crate::error::{Error, Result};
use crate::factor::exact_cbrt;
use crate::ideal::{factor_principal, val, PrimeIdeal, SplitKind};

/// `alpha = sign * 3^n` with `alpha + 1 = gamma^3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SUnitSolution {
    pub sign: i8,
    pub n: i64,
    pub alpha: QuadElem,
    pub gamma: QuadElem,
}

fn pow3(n: i64) -> BigRat {
    let p = BigInt::from(3).pow(n.unsigned_abs() as u32);
    if n >= 0 {
        BigRat::from_integer(p)
    } else {
        BigRat::new(BigInt::one(), p)
    }
}

/// A rational cube root of `r`, if there is one.
pub fn rational_cbrt(r: &BigRat) -> Option<BigRat> {
    if r.is_zero() {
        return Some(BigRat::zero());
    }
    let num = exact_cbrt(r.numer())?;
    let den = exact_cbrt(r.denom())?;
    Some(BigRat::new(num, den))
}

/// All `alpha = +-3^n`, `|n| <= n_max`, with `alpha + 1` a cube in `K`.
///
/// Needs `d = 1 mod 3` so that 3 is inert and the `S`-units are `+-3^n`.
/// Since `alpha + 1` is rational and `K` does not contain a primitive cube
/// root of unity, a cube root in `K` of a rational is rational, so the test
/// is a rational-cube test.
pub fn solve_alpha_plus_one(ctx: FieldCtx, n_max: u32) -> Result<Vec<SUnitSolution>> {
    if ctx.d() % 3 != 1 {
        return Err(Error::Unsupported(format!(
            "d = {} is not 1 mod 3, so 3 is not inert",
            ctx.d()
        )));
    }
    let n_max = n_max as i64;
    let mut out: Vec<SUnitSolution> = (-n_max..=n_max)
        .into_par_iter()
        .flat_map_iter(|n| {
            [1i8, -1].into_iter().filter_map(move |sign| {
                let alpha = pow3(n) * BigRat::from_integer(sign.into());
                let gamma = rational_cbrt(&(&alpha + BigRat::one()))?;
                Some(SUnitSolution {
                    sign,
                    n,
                    alpha: QuadElem::from_rat(ctx, alpha),
                    gamma: QuadElem::from_rat(ctx, gamma),
                })
            })
        })
        .collect();
    out.sort_by_key(|s| (s.n, s.sign));
    Ok(out)
}

/// `alpha + beta = gamma^3` with `v_q(beta)` in `{0, 1, 2}` and `v_q(beta) <= v_q(alpha)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedTriple {
    pub alpha: QuadElem,
    pub beta: QuadElem,
    pub gamma: QuadElem,
    pub q: PrimeIdeal,
    pub swapped: bool,
    /// The input was divided by `g^(3k)` (and `gamma` by `g^k`), `g` a generator of `q`.
    pub scale_k: i64,
}

fn generator(q: &PrimeIdeal) -> Result<QuadElem> {
    if q.kind() == SplitKind::Inert {
        return Ok(QuadElem::from_int(q.ctx(), q.p()));
    }
    prime_generator(q).ok_or_else(|| Error::Unsupported(format!("{q} is not principal")))
}

pub fn normalize_solution(
    alpha: &QuadElem,
    beta: &QuadElem,
    gamma: &QuadElem,
    q: &PrimeIdeal,
) -> Result<NormalizedTriple> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::ZeroInput("alpha and beta must be nonzero".into()));
    }
    if alpha + beta != gamma.pow(3) {
        return Err(Error::EquationNotSatisfied(format!(
            "{alpha} + {beta} != ({gamma})^3"
        )));
    }
    let g = generator(q)?;
    let (mut alpha, mut beta) = (alpha.clone(), beta.clone());
    let swapped = val(&beta, q)? > val(&alpha, q)?;
    if swapped {
        std::mem::swap(&mut alpha, &mut beta);
    }
    let k = val(&beta, q)?.div_euclid(3);
    let g3k = g.pow_i(-3 * k)?;
    Ok(NormalizedTriple {
        alpha: &alpha * &g3k,
        beta: &beta * &g3k,
        gamma: gamma * &g.pow_i(-k)?,
        q: q.clone(),
        swapped,
        scale_k: k,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionCase {
    /// `v(beta)` in `{1, 2}`, forcing `v(alpha) = v(beta)`.
    ValsEqual,
    /// `v(beta) = 0` and `beta` is not a cube.
    NonCube,
    /// `v(beta) = 0` and `beta` is a cube; reduces to `alpha + 1 = gamma^3`.
    Cube,
}

impl fmt::Display for SolutionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolutionCase::ValsEqual => "CASE1_VALS_EQUAL",
            SolutionCase::NonCube => "CASE2_NONCUBE",
            SolutionCase::Cube => "CASE3_CUBE",
        })
    }
}

pub fn case_split(t: &NormalizedTriple) -> Result<SolutionCase> {
    let vb = val(&t.beta, &t.q)?;
    let va = val(&t.alpha, &t.q)?;
    match vb {
        1 | 2 if va == vb => Ok(SolutionCase::ValsEqual),
        1 | 2 => Err(Error::Contradiction(format!(
            "v(beta) = {vb} but v(alpha) = {va}, so v(gamma^3) = {} is not a multiple of 3",
            va.min(vb)
        ))),
        0 if t.beta.cube_root().is_some() => Ok(SolutionCase::Cube),
        0 => Ok(SolutionCase::NonCube),
        _ => Err(Error::Precondition(format!("triple not normalized: v(beta) = {vb}"))),
    }
}

/// True iff for every `(alpha, beta)` some `L` in `s3` has
/// `|v_L(alpha/beta)| <= 3 v_L(3)`. Every `alpha`, `beta` must be supported on `tk`.
pub fn tk_condition(
    pairs: &[(QuadElem, QuadElem)],
    s3: &[PrimeIdeal],
    tk: &[PrimeIdeal],
) -> Result<bool> {
    for (alpha, beta) in pairs {
        for x in [alpha, beta] {
            if x.is_zero() {
                return Err(Error::NotTkUnit("zero".into()));
            }
            if let Some((q, _)) = factor_principal(x)?
                .factors
                .iter()
                .find(|(q, _)| !tk.contains(q))
            {
                return Err(Error::NotTkUnit(format!("{x} has {q} in its support")));
            }
        }
    }
    for (alpha, beta) in pairs {
        let ratio = alpha.checked_div(beta)?;
        let mut ok = false;
        for l in s3 {
            let v3 = val(&QuadElem::from_int(l.ctx(), 3), l)?;
            if val(&ratio, l)?.abs() <= 3 * v3 {
                ok = true;
                break;
            }
        }
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MuCaseResult {
    pub case_id: u8,
    pub v_j_lower_bound: i64,
    /// The bound is the exact value of `v(j)`.
    pub exact: bool,
}

/// Lower bound on `v(j) = v(mu + 27) + 3 v(mu + 3) - v(mu)` from `v(mu)` and `v(3)`.
pub fn mu_case_analysis(v_mu: i64, v_3: i64) -> Result<MuCaseResult> {
    if v_3 < 1 {
        return Err(Error::Precondition(format!("v(3) = {v_3} must be positive")));
    }
    if v_mu < 0 || v_mu > 6 * v_3 {
        return Err(Error::Precondition(format!(
            "v(mu) = {v_mu} outside [0, {}]",
            6 * v_3
        )));
    }
    Ok(if v_mu <= v_3 {
        MuCaseResult { case_id: 1, v_j_lower_bound: 0, exact: false }
    } else if v_mu <= 3 * v_3 {
        MuCaseResult { case_id: 2, v_j_lower_bound: 1, exact: false }
    } else {
        MuCaseResult { case_id: 3, v_j_lower_bound: 6 * v_3 - v_mu, exact: true }
    })
}

/// `v_L(mu + 27) + 3 v_L(mu + 3) - v_L(mu)` evaluated directly.
pub fn vlj_direct(mu: &QuadElem, l: &PrimeIdeal) -> Result<i64> {
    let ctx = mu.ctx();
    let v = |x: &QuadElem| val(x, l);
    Ok(v(&(mu + QuadElem::from_int(ctx, 27)))? + 3 * v(&(mu + QuadElem::from_int(ctx, 3)))?
        - v(mu)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionModelJ {
    /// `e^3 / d`.
    pub ratio: QuadElem,
    /// `ratio - 27`.
    pub mu: QuadElem,
    pub j: QuadElem,
}

/// `j` of `y^2 + e x y + d y = x^3`, as `r (r - 24)^3 / (r - 27)` with
/// `r = e^3 / d`, cross-checked against `(mu + 27)(mu + 3)^3 / mu`.
pub fn torsion_model_j(e: &QuadElem, d: &QuadElem) -> Result<TorsionModelJ> {
    let ctx = e.ctx();
    if d.is_zero() {
        return Err(Error::SingularCurve("d = 0".into()));
    }
    let int = |n: i64| QuadElem::from_int(ctx, n);
    let ratio = e.pow(3).checked_div(d)?;
    let mu = &ratio - int(27);
    if mu.is_zero() {
        return Err(Error::SingularCurve("e^3 = 27 d".into()));
    }
    let j = (&ratio * (&ratio - int(24)).pow(3)).checked_div(&mu)?;
    let j_mu = ((&mu + int(27)) * (&mu + int(3)).pow(3)).checked_div(&mu)?;
    debug_assert_eq!(j, j_mu);
    if j != j_mu {
        return Err(Error::Contradiction("the two j formulas disagree".into()));
    }
    Ok(TorsionModelJ { ratio, mu, j })
}

/// `(sign, n)` for a rational `+-3^n`, if it is one.
pub fn as_signed_power_of_three(r: &BigRat) -> Option<(i8, i64)> {
    if r.is_zero() {
        return None;
    }
    let sign = if r.is_negative() { -1 } else { 1 };
    let (num, den) = (r.numer().abs(), r.denom().clone());
    let three = BigInt::from(3);
    let count = |mut m: BigInt| -> Option<i64> {
        let mut k = 0;
        while !m.is_one() {
            if !(&m % &three).is_zero() {
                return None;
            }
            m /= &three;
            k += 1;
        }
        Some(k)
    };
    Some((sign, count(num)? - count(den)?))
}
