//! The Frey curve `Y^2 + 3Cc XY + C^2 B b^p Y = X^3` of a solution of
//! `A a^p + B b^p = C c^3`, its invariants, and local reduction data.

use std::collections::BTreeSet;
use std::fmt;

use crate::arith::QuadElem;
use crate::arith::FieldCtx;
use crate::classgroup::class_number;
use crate::error::{Error, Result};
use crate::factor::is_prime_u64;
use crate::ideal::{factor_principal, in_tk, pairwise_coprime, val, PrimeIdeal};

/// A validated solution `(a, b, c)` of `A a^p + B b^p = C c^3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreyInstance {
    ctx: FieldCtx,
    coef_a: QuadElem,
    coef_b: QuadElem,
    coef_c: QuadElem,
    a: QuadElem,
    b: QuadElem,
    c: QuadElem,
    p: u64,
    primitive: bool,
}

fn same_field(ctx: FieldCtx, items: &[&QuadElem]) -> Result<()> {
    for x in items {
        if x.ctx() != ctx {
            return Err(Error::FieldMismatch {
                left: ctx.d(),
                right: x.ctx().d(),
            });
        }
    }
    Ok(())
}

impl FreyInstance {
    /// Checks integrality, that `p` is prime and that the equation holds.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        coef_a: QuadElem,
        coef_b: QuadElem,
        coef_c: QuadElem,
        a: QuadElem,
        b: QuadElem,
        c: QuadElem,
        p: u64,
    ) -> Result<FreyInstance> {
        let ctx = coef_a.ctx();
        same_field(ctx, &[&coef_b, &coef_c, &a, &b, &c])?;
        for (name, x) in [
            ("A", &coef_a),
            ("B", &coef_b),
            ("C", &coef_c),
            ("a", &a),
            ("b", &b),
            ("c", &c),
        ] {
            if !x.is_integral() {
                return Err(Error::NotIntegral(format!("{name} = {x}")));
            }
        }
        for (name, x) in [("A", &coef_a), ("B", &coef_b), ("C", &coef_c)] {
            if x.is_zero() {
                return Err(Error::ZeroInput(format!("coefficient {name} is zero")));
            }
        }
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        let exp = u32::try_from(p).map_err(|_| Error::Precondition(format!("p = {p} too large")))?;
        let lhs = &coef_a * &a.pow(exp) + &coef_b * &b.pow(exp);
        let rhs = &coef_c * &c.pow(3);
        if lhs != rhs {
            return Err(Error::EquationNotSatisfied(format!(
                "A a^p + B b^p = {lhs} but C c^3 = {rhs}"
            )));
        }
        let primitive = if a.is_zero() || b.is_zero() || c.is_zero() {
            false
        } else {
            pairwise_coprime(&a, &b, &c)?
        };
        Ok(FreyInstance {
            ctx,
            coef_a,
            coef_b,
            coef_c,
            a,
            b,
            c,
            p,
            primitive,
        })
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }
    pub fn coef_a(&self) -> &QuadElem {
        &self.coef_a
    }
    pub fn coef_b(&self) -> &QuadElem {
        &self.coef_b
    }
    pub fn coef_c(&self) -> &QuadElem {
        &self.coef_c
    }
    pub fn a(&self) -> &QuadElem {
        &self.a
    }
    pub fn b(&self) -> &QuadElem {
        &self.b
    }
    pub fn c(&self) -> &QuadElem {
        &self.c
    }
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    fn exp(&self) -> u32 {
        self.p as u32
    }

    /// `(A, a) <-> (B, b)`; the equation is symmetric in the two terms.
    pub fn swapped(&self) -> FreyInstance {
        FreyInstance {
            coef_a: self.coef_b.clone(),
            coef_b: self.coef_a.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassModel {
    pub a1: QuadElem,
    pub a2: QuadElem,
    pub a3: QuadElem,
    pub a4: QuadElem,
    pub a6: QuadElem,
}

impl WeierstrassModel {
    pub fn new(coeffs: [QuadElem; 5]) -> Result<WeierstrassModel> {
        let ctx = coeffs[0].ctx();
        same_field(ctx, &coeffs.iter().collect::<Vec<_>>())?;
        let [a1, a2, a3, a4, a6] = coeffs;
        Ok(WeierstrassModel { a1, a2, a3, a4, a6 })
    }

    pub fn ctx(&self) -> FieldCtx {
        self.a1.ctx()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveInvariants {
    pub c4: QuadElem,
    pub c6: QuadElem,
    pub delta: QuadElem,
    pub j: QuadElem,
}

pub fn frey_model(inst: &FreyInstance) -> Result<WeierstrassModel> {
    if inst.a.is_zero() || inst.b.is_zero() || inst.c.is_zero() {
        return Err(Error::SingularCurve("trivial solution: abc = 0".into()));
    }
    let ctx = inst.ctx;
    let three = QuadElem::from_int(ctx, 3);
    let zero = QuadElem::zero(ctx);
    let m = WeierstrassModel {
        a1: &three * &inst.coef_c * &inst.c,
        a2: zero.clone(),
        a3: inst.coef_c.pow(2) * &inst.coef_b * inst.b.pow(inst.exp()),
        a4: zero.clone(),
        a6: zero,
    };
    if discriminant_of(&m).is_zero() {
        return Err(Error::SingularCurve("discriminant vanishes".into()));
    }
    Ok(m)
}

fn int(ctx: FieldCtx, n: i64) -> QuadElem {
    QuadElem::from_int(ctx, n)
}

/// `(b2, b4, b6, b8)`.
fn b_invariants(m: &WeierstrassModel) -> [QuadElem; 4] {
    let ctx = m.ctx();
    let (a1, a2, a3, a4, a6) = (&m.a1, &m.a2, &m.a3, &m.a4, &m.a6);
    let b2 = a1 * a1 + int(ctx, 4) * a2;
    let b4 = int(ctx, 2) * a4 + a1 * a3;
    let b6 = a3 * a3 + int(ctx, 4) * a6;
    let b8 = a1 * a1 * a6 + int(ctx, 4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    [b2, b4, b6, b8]
}

fn discriminant_of(m: &WeierstrassModel) -> QuadElem {
    let ctx = m.ctx();
    let [b2, b4, b6, b8] = b_invariants(m);
    -(&b2 * &b2 * &b8) - int(ctx, 8) * b4.pow(3) - int(ctx, 27) * &b6 * &b6
        + int(ctx, 9) * &b2 * &b4 * &b6
}

/// The universal `b`-invariant chain; works for any Weierstrass model.
pub fn invariants_from_model(m: &WeierstrassModel) -> Result<CurveInvariants> {
    let ctx = m.ctx();
    let [b2, b4, b6, _] = b_invariants(m);
    let c4 = &b2 * &b2 - int(ctx, 24) * &b4;
    let c6 = -b2.pow(3) + int(ctx, 36) * &b2 * &b4 - int(ctx, 216) * &b6;
    let delta = discriminant_of(m);
    if delta.is_zero() {
        return Err(Error::SingularCurve("discriminant vanishes".into()));
    }
    let j = c4.pow(3).checked_div(&delta)?;
    Ok(CurveInvariants { c4, c6, delta, j })
}

/// Invariants straight from the solution data:
/// `c4 = 9 C^3 c (9A a^p + B b^p)`,
/// `c6 = -27 C^4 (27 C^2 c^6 - 36 C c^3 B b^p + 8 B^2 b^2p)`,
/// `Delta = 27 A B^3 C^8 (a b^3)^p`,
/// `j = 27 C c^3 (9A a^p + B b^p)^3 / (A B^3 (a b^3)^p)`.
pub fn invariants_closed_form(inst: &FreyInstance) -> Result<CurveInvariants> {
    let ctx = inst.ctx;
    let (ca, cb, cc) = (&inst.coef_a, &inst.coef_b, &inst.coef_c);
    let ap = inst.a.pow(inst.exp());
    let bp = inst.b.pow(inst.exp());
    let c3 = inst.c.pow(3);
    let bbp = cb * &bp;
    let s = int(ctx, 9) * ca * &ap + &bbp;
    let c4 = int(ctx, 9) * cc.pow(3) * &inst.c * &s;
    let c6 = int(ctx, -27)
        * cc.pow(4)
        * (int(ctx, 27) * cc.pow(2) * c3.pow(2) - int(ctx, 36) * cc * &c3 * &bbp
            + int(ctx, 8) * bbp.pow(2));
    let ab3p = &ap * bp.pow(3);
    let delta = int(ctx, 27) * ca * cb.pow(3) * cc.pow(8) * &ab3p;
    if delta.is_zero() {
        return Err(Error::SingularCurve("discriminant vanishes".into()));
    }
    let j = (int(ctx, 27) * cc * &c3 * s.pow(3)).checked_div(&(ca * cb.pow(3) * &ab3p))?;
    Ok(CurveInvariants { c4, c6, delta, j })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReductionType {
    Good,
    Multiplicative,
    Additive,
}

impl fmt::Display for ReductionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionType::Good => "GOOD",
            ReductionType::Multiplicative => "MULTIPLICATIVE",
            ReductionType::Additive => "ADDITIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub prime: PrimeIdeal,
    pub reduction: ReductionType,
    /// Valuations of the model actually classified.
    pub v_delta: i64,
    /// `None` when `c4 = 0`.
    pub v_c4: Option<i64>,
    /// Whether the `u = 3` rescale `X = 9x, Y = 27y` was applied first.
    pub minimal_after_rescale: bool,
    pub in_tk: bool,
    pub conductor_exponent_candidates: BTreeSet<u32>,
    /// `2 + 3 v(3) + 6 v(2)`.
    pub serre_bound: u32,
}

fn val_opt(e: &QuadElem, q: &PrimeIdeal) -> Result<Option<i64>> {
    if e.is_zero() {
        Ok(None)
    } else {
        val(e, q).map(Some)
    }
}

fn v3(q: &PrimeIdeal) -> i64 {
    if q.p() == 3 {
        q.e() as i64
    } else {
        0
    }
}

pub fn serre_bound(q: &PrimeIdeal) -> u32 {
    let v2 = if q.p() == 2 { q.e() } else { 0 };
    2 + 3 * v3(q) as u32 + 6 * v2
}

/// The model `X = 9x, Y = 27y` is integral at `q` iff `v(a1) >= v(3)` and
/// `v(a3) >= 3 v(3)`.
fn rescale_is_integral(m: &WeierstrassModel, q: &PrimeIdeal) -> Result<bool> {
    let t = v3(q);
    if t == 0 {
        return Ok(false);
    }
    let ok = |e: &QuadElem, k: i64| -> Result<bool> {
        Ok(val_opt(e, q)?.is_none_or(|v| v >= k * t))
    };
    Ok(ok(&m.a1, 1)? && ok(&m.a2, 2)? && ok(&m.a3, 3)? && ok(&m.a4, 4)? && ok(&m.a6, 6)?)
}

/// Reduction type of the Frey curve at `q`, read off `v(Delta)` and `v(c4)`.
///
/// Above 3 the model is first rescaled by `u = 3` whenever that keeps it
/// integral. No Tate's algorithm: additive primes get a candidate range
/// `2..=serre_bound` rather than an exact exponent.
pub fn reduction_type(inst: &FreyInstance, q: &PrimeIdeal) -> Result<ReductionReport> {
    let m = frey_model(inst)?;
    let inv = invariants_from_model(&m)?;
    let rescale = rescale_is_integral(&m, q)?;
    let shift = if rescale { v3(q) } else { 0 };
    let v_delta = val(&inv.delta, q)? - 12 * shift;
    let v_c4 = val_opt(&inv.c4, q)?.map(|v| v - 4 * shift);
    let reduction = if v_delta == 0 {
        ReductionType::Good
    } else if v_c4 == Some(0) {
        ReductionType::Multiplicative
    } else {
        ReductionType::Additive
    };
    let bound = serre_bound(q);
    let conductor_exponent_candidates = match reduction {
        ReductionType::Good => BTreeSet::from([0]),
        ReductionType::Multiplicative => BTreeSet::from([1]),
        ReductionType::Additive if q.p() > 3 => BTreeSet::from([2]),
        ReductionType::Additive => (2..=bound).collect(),
    };
    Ok(ReductionReport {
        prime: q.clone(),
        reduction,
        v_delta,
        v_c4,
        minimal_after_rescale: rescale,
        in_tk: in_tk(q, &inst.coef_a, &inst.coef_b, &inst.coef_c)?,
        conductor_exponent_candidates,
        serre_bound: bound,
    })
}

/// Primes of `T_K` together with every prime dividing `Delta`.
pub fn relevant_primes(inst: &FreyInstance) -> Result<Vec<PrimeIdeal>> {
    let inv = invariants_closed_form(inst)?;
    let mut set: BTreeSet<PrimeIdeal> =
        crate::ideal::tk_set(&inst.coef_a, &inst.coef_b, &inst.coef_c)?
            .into_iter()
            .collect();
    set.extend(factor_principal(&inv.delta)?.support());
    Ok(set.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaConductor {
    pub candidates: BTreeSet<u32>,
    /// True when `lambda | Aa` and the roles of `(A, a)` and `(B, b)` were exchanged.
    pub swapped: bool,
}

/// Conductor exponent candidates at a prime `lambda` above 3 when `C = 1`
/// and `h_K = 1`:
/// `{0, 1}` if `lambda | Bb` and `v(B b^p) > 2e` (or the same with `A, a`),
/// `{2, 3}` if `lambda` divides none of `A a B b` and `e = 1`.
pub fn conductor_exponent_at_lambda(inst: &FreyInstance, lambda: &PrimeIdeal) -> Result<LambdaConductor> {
    if lambda.p() != 3 {
        return Err(Error::Precondition(format!("{lambda} does not lie above 3")));
    }
    if !inst.coef_c.is_one() {
        return Err(Error::Precondition("requires C = 1".into()));
    }
    if class_number(inst.ctx) != 1 {
        return Err(Error::Precondition("requires class number 1".into()));
    }
    let e = lambda.e() as i64;
    let vb = val_opt(&inst.b, lambda)?;
    let va = val_opt(&inst.a, lambda)?;
    let vbb = val(&inst.coef_b, lambda)? + vb.unwrap_or(0) * inst.p as i64;
    let vaa = val(&inst.coef_a, lambda)? + va.unwrap_or(0) * inst.p as i64;
    let (work, swapped, v_big) = if vbb > 0 {
        (inst.clone(), false, vbb)
    } else if vaa > 0 {
        (inst.swapped(), true, vaa)
    } else if e == 1 {
        return Ok(LambdaConductor {
            candidates: BTreeSet::from([2, 3]),
            swapped: false,
        });
    } else {
        return Err(Error::Unclassified(format!(
            "{lambda} ramified and coprime to AaBb"
        )));
    };
    if v_big <= 2 * e {
        return Err(Error::Unclassified(format!(
            "v(Bb^p) = {v_big} <= 2e = {}",
            2 * e
        )));
    }
    let inv = invariants_closed_form(&work)?;
    let t = v3(lambda);
    let c4_unit = val_opt(&inv.c4, lambda)? == Some(4 * t);
    let c6_unit = val_opt(&inv.c6, lambda)? == Some(6 * t);
    if !(c4_unit && c6_unit) {
        return Err(Error::Unclassified(
            "rescaled model does not have unit c4 and c6".into(),
        ));
    }
    Ok(LambdaConductor {
        candidates: BTreeSet::from([0, 1]),
        swapped,
    })
}

/// `p` must exceed this at `L` for the branch formulas to apply.
pub fn j_valuation_threshold(inst: &FreyInstance, l: &PrimeIdeal) -> Result<i64> {
    let t = v3(l);
    let va = val(&inst.coef_a, l)?;
    let vb = val(&inst.coef_b, l)?;
    let vc = val(&inst.coef_c, l)?;
    Ok([
        2 * t + va,
        vb,
        vc,
        (t + vb - va).abs(),
        (3 * t + vb - va).abs(),
        (3 * t + va - vb).abs(),
    ]
    .into_iter()
    .max()
    .unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JValuation {
    pub value: i64,
    pub p_divides_inertia: bool,
}

/// `v_L(j)` from the branch formulas at a prime `L` above 3 dividing `ab`:
/// `3v(3) + v(B/A) - p v(a)` when `L | a`, and
/// `3(3v(3) + v(A/B) - p v(b))` when `L | b`.
pub fn j_valuation_lemma(inst: &FreyInstance, l: &PrimeIdeal) -> Result<JValuation> {
    if l.p() != 3 {
        return Err(Error::Precondition(format!("{l} does not lie above 3")));
    }
    let threshold = j_valuation_threshold(inst, l)?;
    if inst.p as i64 <= threshold {
        return Err(Error::Precondition(format!(
            "p = {} does not exceed the threshold {threshold}",
            inst.p
        )));
    }
    let t = v3(l);
    let p = inst.p as i64;
    let va = val(&inst.coef_a, l)?;
    let vb = val(&inst.coef_b, l)?;
    let v_a = val_opt(&inst.a, l)?.unwrap_or(0);
    let v_b = val_opt(&inst.b, l)?.unwrap_or(0);
    let value = match (v_a > 0, v_b > 0) {
        (true, false) => 3 * t + vb - va - p * v_a,
        (false, true) => 3 * (3 * t + va - vb - p * v_b),
        (true, true) => {
            return Err(Error::Precondition(format!("{l} divides both a and b")))
        }
        (false, false) => return Err(Error::NotInWk(format!("{l} does not divide ab"))),
    };
    Ok(JValuation {
        value,
        p_divides_inertia: value < 0 && value % p != 0,
    })
}

/// `v_L(j)` computed from the invariants.
pub fn direct_j_valuation(inst: &FreyInstance, l: &PrimeIdeal) -> Result<i64> {
    let inv = invariants_from_model(&frey_model(inst)?)?;
    val(&inv.j, l)
}

/// From `A x^p + B y^p = C z` with `p = 2 mod 3`, the solution
/// `(xz, yz, z^((p+1)/3))` of `A a^p + B b^p = C c^3`.
#[allow(clippy::too_many_arguments)]
pub fn nonprimitive_from_linear(
    x: &QuadElem,
    y: &QuadElem,
    z: &QuadElem,
    coef_a: &QuadElem,
    coef_b: &QuadElem,
    coef_c: &QuadElem,
    p: u64,
) -> Result<FreyInstance> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    if p % 3 != 2 {
        return Err(Error::Unsupported(format!("p = {p} is not 2 mod 3")));
    }
    let exp = p as u32;
    if coef_a * &x.pow(exp) + coef_b * &y.pow(exp) != coef_c * z {
        return Err(Error::EquationNotSatisfied("A x^p + B y^p != C z".into()));
    }
    FreyInstance::new(
        coef_a.clone(),
        coef_b.clone(),
        coef_c.clone(),
        x * z,
        y * z,
        z.pow(((p + 1) / 3) as u32),
        p,
    )
}
