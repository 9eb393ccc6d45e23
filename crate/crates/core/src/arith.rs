//! Exact arithmetic in the imaginary quadratic field `K = Q(sqrt(-d))`.
//!
//! Elements are stored as `x + y*w` over the integral basis `{1, w}`, where
//! `w = sqrt(-d)` when `d = 1, 2 (mod 4)` and `w = (1 + sqrt(-d))/2` when
//! `d = 3 (mod 4)`. With this choice `O_K = Z[w]` and an element is integral
//! exactly when both coordinates are integers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::factor;

pub type BigRat = BigRational;

/// Which generator of the ring of integers is in use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OmegaKind {
    /// `w = sqrt(-d)`, minimal polynomial `x^2 + d`.
    Sqrt,
    /// `w = (1 + sqrt(-d))/2`, minimal polynomial `x^2 - x + (1+d)/4`.
    Half,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldCtx {
    d: u64,
    kind: OmegaKind,
}

impl FieldCtx {
    pub fn new(d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidField(format!("d = {d} must be at least 2")));
        }
        if d > (1 << 60) {
            return Err(Error::InvalidField(format!("d = {d} is too large")));
        }
        if !factor::is_squarefree(d) {
            return Err(Error::InvalidField(format!("d = {d} is not square-free")));
        }
        let kind = if d % 4 == 3 {
            OmegaKind::Half
        } else {
            OmegaKind::Sqrt
        };
        Ok(FieldCtx { d, kind })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn kind(&self) -> OmegaKind {
        self.kind
    }

    /// Field discriminant: `-d` or `-4d`.
    pub fn disc(&self) -> i64 {
        match self.kind {
            OmegaKind::Half => -(self.d as i64),
            OmegaKind::Sqrt => -4 * self.d as i64,
        }
    }

    /// `(b, c)` with `w^2 + b*w + c = 0`.
    pub fn omega_min_poly(&self) -> (i64, i64) {
        match self.kind {
            OmegaKind::Sqrt => (0, self.d as i64),
            OmegaKind::Half => (-1, (1 + self.d as i64) / 4),
        }
    }

    pub fn omega_description(&self) -> String {
        match self.kind {
            OmegaKind::Sqrt => format!("w = sqrt(-{})", self.d),
            OmegaKind::Half => format!("w = (1+sqrt(-{}))/2", self.d),
        }
    }

    fn ensure_same(&self, other: &FieldCtx) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.d,
                right: other.d,
            })
        }
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt(-{}))", self.d)
    }
}

/// An element `x + y*w` of `K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    ctx: FieldCtx,
    x: BigRat,
    y: BigRat,
}

fn rat(n: impl Into<BigInt>) -> BigRat {
    BigRat::from_integer(n.into())
}

impl QuadElem {
    pub fn new(ctx: FieldCtx, x: BigRat, y: BigRat) -> Self {
        QuadElem { ctx, x, y }
    }

    pub fn from_int(ctx: FieldCtx, n: impl Into<BigInt>) -> Self {
        QuadElem::new(ctx, rat(n), BigRat::zero())
    }

    pub fn from_rat(ctx: FieldCtx, r: BigRat) -> Self {
        QuadElem::new(ctx, r, BigRat::zero())
    }

    pub fn from_ints(ctx: FieldCtx, x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        QuadElem::new(ctx, rat(x), rat(y))
    }

    pub fn zero(ctx: FieldCtx) -> Self {
        QuadElem::from_int(ctx, 0)
    }

    pub fn one(ctx: FieldCtx) -> Self {
        QuadElem::from_int(ctx, 1)
    }

    pub fn omega(ctx: FieldCtx) -> Self {
        QuadElem::from_ints(ctx, 0, 1)
    }

    /// `sqrt(-d)` in the `{1, w}` basis.
    pub fn sqrt_neg_d(ctx: FieldCtx) -> Self {
        match ctx.kind {
            OmegaKind::Sqrt => QuadElem::omega(ctx),
            OmegaKind::Half => QuadElem::from_ints(ctx, -1, 2),
        }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn x(&self) -> &BigRat {
        &self.x
    }

    pub fn y(&self) -> &BigRat {
        &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRat> {
        self.is_rational().then_some(&self.x)
    }

    pub fn conj(&self) -> Self {
        match self.ctx.kind {
            OmegaKind::Sqrt => QuadElem::new(self.ctx, self.x.clone(), -&self.y),
            // conj(w) = 1 - w
            OmegaKind::Half => QuadElem::new(self.ctx, &self.x + &self.y, -&self.y),
        }
    }

    pub fn trace(&self) -> BigRat {
        match self.ctx.kind {
            OmegaKind::Sqrt => &self.x * rat(2),
            OmegaKind::Half => &self.x * rat(2) + &self.y,
        }
    }

    pub fn norm(&self) -> BigRat {
        let d = rat(self.ctx.d);
        match self.ctx.kind {
            OmegaKind::Sqrt => &self.x * &self.x + d * &self.y * &self.y,
            OmegaKind::Half => {
                let k = (d + rat(1)) / rat(4);
                &self.x * &self.x + &self.x * &self.y + k * &self.y * &self.y
            }
        }
    }

    /// True iff trace and norm are rational integers.
    pub fn is_integral(&self) -> bool {
        self.trace().is_integer() && self.norm().is_integer()
    }

    /// Integer coordinates when the element lies in `O_K`.
    pub fn integral_coords(&self) -> Option<(BigInt, BigInt)> {
        (self.x.is_integer() && self.y.is_integer())
            .then(|| (self.x.to_integer(), self.y.to_integer()))
    }

    /// Least positive integer `D` with `D * self` in `O_K`.
    pub fn denominator(&self) -> BigInt {
        self.x.denom().lcm(self.y.denom())
    }

    pub fn checked_add(&self, other: &QuadElem) -> Result<QuadElem> {
        self.ctx.ensure_same(&other.ctx)?;
        Ok(QuadElem::new(self.ctx, &self.x + &other.x, &self.y + &other.y))
    }

    pub fn checked_sub(&self, other: &QuadElem) -> Result<QuadElem> {
        self.ctx.ensure_same(&other.ctx)?;
        Ok(QuadElem::new(self.ctx, &self.x - &other.x, &self.y - &other.y))
    }

    pub fn checked_mul(&self, other: &QuadElem) -> Result<QuadElem> {
        self.ctx.ensure_same(&other.ctx)?;
        let (x1, y1, x2, y2) = (&self.x, &self.y, &other.x, &other.y);
        let d = rat(self.ctx.d);
        let yy = y1 * y2;
        let cross = x1 * y2 + x2 * y1;
        let (x, y) = match self.ctx.kind {
            OmegaKind::Sqrt => (x1 * x2 - d * yy, cross),
            OmegaKind::Half => {
                let k = (d + rat(1)) / rat(4);
                (x1 * x2 - k * &yy, cross + yy)
            }
        };
        Ok(QuadElem::new(self.ctx, x, y))
    }

    pub fn inv(&self) -> Result<QuadElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let c = self.conj();
        Ok(QuadElem::new(self.ctx, c.x / &n, c.y / &n))
    }

    pub fn checked_div(&self, other: &QuadElem) -> Result<QuadElem> {
        self.checked_mul(&other.inv()?)
    }

    pub fn scale(&self, r: &BigRat) -> QuadElem {
        QuadElem::new(self.ctx, &self.x * r, &self.y * r)
    }

    pub fn pow(&self, mut exp: u32) -> QuadElem {
        let mut base = self.clone();
        let mut acc = QuadElem::one(self.ctx);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Integer power; negative exponents need an invertible base.
    pub fn pow_i(&self, exp: i64) -> Result<QuadElem> {
        let mag = u32::try_from(exp.unsigned_abs())
            .map_err(|_| Error::Unsupported(format!("exponent {exp} too large")))?;
        if exp >= 0 {
            Ok(self.pow(mag))
        } else {
            Ok(self.inv()?.pow(mag))
        }
    }

    /// A cube root of `self` inside `K`, if one exists.
    ///
    /// A cube root `g` with trace `t` and norm `n` satisfies
    /// `g^3 = (t^2 - n) g - t n`, so `t` is a rational root of
    /// `t^3 - 3 n t - Tr(self)` and `g = (self + t n) / (t^2 - n)`.
    pub fn cube_root(&self) -> Option<QuadElem> {
        if let Some(r) = self.as_rational() {
            // For K != Q(sqrt(-3)) a rational with a cube root in K has one in Q.
            let num = factor::exact_cbrt(r.numer())?;
            let den = factor::exact_cbrt(r.denom())?;
            return Some(QuadElem::from_rat(self.ctx, BigRat::new(num, den)));
        }
        let norm = self.norm();
        let n = BigRat::new(
            factor::exact_cbrt(norm.numer())?,
            factor::exact_cbrt(norm.denom())?,
        );
        let tr = self.trace();
        // t = s/m turns the cubic into s^3 - 3 n m^2 s - Tr m^3 with integer coefficients.
        let m = n.denom() * tr.denom();
        let mr = rat(m.clone());
        let lin = -(rat(3) * &n * &mr * &mr);
        let cst = -(&tr * &mr * &mr * &mr);
        debug_assert!(lin.is_integer() && cst.is_integer());
        for s in integer_roots_depressed_cubic(&lin.to_integer(), &cst.to_integer()) {
            let t = BigRat::new(s, m.clone());
            let denom = &t * &t - &n;
            if denom.is_zero() {
                continue;
            }
            let g = QuadElem::new(self.ctx, &self.x + &t * &n, self.y.clone()).scale(&denom.recip());
            if g.pow(3) == *self {
                return Some(g);
            }
        }
        None
    }

    /// Parse `x+y*w`, also accepting `sqrt(-d)`/`s` for the square root and
    /// rational coefficients `p/q`.
    pub fn parse(ctx: FieldCtx, input: &str) -> Result<QuadElem> {
        parse_elem(ctx, input)
    }
}

/// Integer roots of `s^3 + p s + q`, found by exact bisection on monotone runs.
fn integer_roots_depressed_cubic(p: &BigInt, q: &BigInt) -> Vec<BigInt> {
    let f = |s: &BigInt| s * s * s + p * s + q;
    let bound = p.abs().max(q.abs()) + BigInt::one();
    let mut breaks: Vec<(BigInt, BigInt, bool)> = Vec::new();
    if !p.is_negative() {
        breaks.push((-bound.clone(), bound.clone(), true));
    } else {
        // f' = 3s^2 + p vanishes at +-sqrt(-p/3); k = floor of that.
        let k = (-p / BigInt::from(3)).sqrt();
        breaks.push((-bound.clone(), -&k - 1, true));
        breaks.push((-k.clone(), k.clone(), false));
        breaks.push((&k + 1, bound.clone(), true));
    }
    let mut roots = Vec::new();
    for (lo, hi, increasing) in breaks {
        if lo > hi {
            continue;
        }
        let (mut lo, mut hi) = (lo, hi);
        while lo <= hi {
            let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
            let v = f(&mid);
            if v.is_zero() {
                roots.push(mid);
                break;
            }
            if (v.is_negative()) == increasing {
                lo = mid + 1;
            } else {
                hi = mid - 1;
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

fn parse_rational(tok: &str) -> Option<BigRat> {
    if tok.is_empty() {
        return None;
    }
    match tok.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRat::new(n, d))
        }
        None => Some(rat(tok.parse::<BigInt>().ok()?)),
    }
}

fn parse_elem(ctx: FieldCtx, input: &str) -> Result<QuadElem> {
    let bad = |why: &str| Error::Parse(format!("{input:?}: {why}"));
    let mut s: String = input
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| if c == '\u{2212}' { '-' } else { c })
        .collect();
    for (prefix, close) in [("sqrt(-", ")"), ("\u{221a}-", ""), ("\u{221a}(-", ")")] {
        while let Some(start) = s.find(prefix) {
            let rest = &s[start + prefix.len()..];
            let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
            let after = &rest[digits.len()..];
            if !after.starts_with(close) {
                return Err(bad("malformed square root"));
            }
            if digits.parse::<u64>().ok() != Some(ctx.d) {
                return Err(bad(&format!("square root does not match d = {}", ctx.d)));
            }
            let end = start + prefix.len() + digits.len() + close.len();
            s.replace_range(start..end, "s");
        }
    }
    if s.is_empty() {
        return Err(bad("empty"));
    }
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    for (i, c) in s.chars().enumerate() {
        if (c == '+' || c == '-') && i > 0 && !cur.ends_with('*') && !cur.is_empty() {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(c);
    }
    terms.push(cur);
    let mut acc = QuadElem::zero(ctx);
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(b) => (-1, b),
            None => (1, term.strip_prefix('+').unwrap_or(&term)),
        };
        let (coeff, unit) = match body.chars().last() {
            Some(u @ ('w' | 's')) => {
                let c = body[..body.len() - 1].trim_end_matches('*');
                let c = if c.is_empty() {
                    BigRat::one()
                } else {
                    parse_rational(c).ok_or_else(|| bad("bad coefficient"))?
                };
                (c, Some(u))
            }
            _ => (parse_rational(body).ok_or_else(|| bad("bad term"))?, None),
        };
        let coeff = coeff * rat(sign);
        let basis = match unit {
            None => QuadElem::one(ctx),
            Some('w') => QuadElem::omega(ctx),
            Some(_) => QuadElem::sqrt_neg_d(ctx),
        };
        acc = &acc + &basis.scale(&coeff);
    }
    Ok(acc)
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        let ypart = if self.y.is_one() {
            "w".to_string()
        } else if (-&self.y).is_one() {
            "-w".to_string()
        } else {
            format!("{}*w", self.y)
        };
        if self.x.is_zero() {
            return write!(f, "{ypart}");
        }
        if ypart.starts_with('-') {
            write!(f, "{}{}", self.x, ypart)
        } else {
            write!(f, "{}+{}", self.x, ypart)
        }
    }
}

// Operator impls panic on mismatched fields; use the checked_* methods when
// the contexts are not known to agree.
macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: &QuadElem) -> QuadElem {
                self.$checked(rhs).expect("field contexts must agree")
            }
        }
        impl $trait<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                (&self).$checked(&rhs).expect("field contexts must agree")
            }
        }
        impl $trait<&QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: &QuadElem) -> QuadElem {
                (&self).$checked(rhs).expect("field contexts must agree")
            }
        }
        impl $trait<QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                self.$checked(&rhs).expect("field contexts must agree")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(self.ctx, -&self.x, -&self.y)
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}
