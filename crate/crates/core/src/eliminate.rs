//! Newform elimination and the exponent bound `B_K`.
//!
//! For a newform `f` and a prime `q` of good reduction,
//! `B_{f,q} = N(q) ((N(q)+1)^2 - f(T_q)^2) prod_{a in A(q)} (a - f(T_q))`
//! is divisible by every prime `p` for which the Frey curve mod `p` could
//! come from `f`. `C_f` is taken as the gcd of `|Norm(B_{f,q})|` over `q`;
//! any prime dividing the norm of the ideal sum of the `B_{f,q}` divides it,
//! so its prime divisors are a superset of the survivors.

use std::collections::BTreeMap;
use std::fmt::{self, Display, Write as _};

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::factor;
use crate::hecke::{abs_integral_norm, HeckeElem, HeckeField};
use crate::ideal::SplitKind;
use crate::newform::{Level, NewformRecord};

pub const METHOD: &str = "gcd-of-norms";
/// Irreducibility of the residual representation needs `p` above this.
pub const IRREDUCIBILITY_THRESHOLD: u64 = 20;
/// The image of inertia argument needs `p` above this.
pub const FAKE_CURVE_THRESHOLD: u64 = 24;
pub const LIFTING_SMALL_THRESHOLD: u64 = 24;

fn as_string<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `A(N)`: the integers `a` with `a^2 <= 4N` and `N + 1 - a = 0 mod 3`.
pub fn trace_set_a(n: u64) -> Vec<i64> {
    let four_n = 4 * n as u128;
    let bound = four_n.sqrt() as i64;
    (-bound..=bound)
        .filter(|&a| (n as i64 + 1 - a).rem_euclid(3) == 0)
        .collect()
}

pub fn bound_b_fq(field: &HeckeField, n: u64, ap: &HeckeElem) -> HeckeElem {
    let nn = n as i64;
    let ap_sq = field.mul(ap, ap);
    let mut acc = field.sub(&field.from_int((nn + 1) * (nn + 1)), &ap_sq);
    acc = field.mul(&field.from_int(nn), &acc);
    for a in trace_set_a(n) {
        acc = field.mul(&acc, &field.sub(&field.from_int(a), ap));
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BfqEntry {
    /// `p:label`, e.g. `2:s0`.
    pub prime: String,
    pub norm: u64,
    pub ap: String,
    pub b_fq: String,
    #[serde(serialize_with = "as_string")]
    pub abs_norm: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Surviving {
    All,
    Primes(Vec<BigUint>),
}

impl Serialize for Surviving {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Surviving::All => s.serialize_str("ALL"),
            Surviving::Primes(ps) => {
                let v: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                v.serialize(s)
            }
        }
    }
}

impl Display for Surviving {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Surviving::All => f.write_str("ALL"),
            Surviving::Primes(ps) if ps.is_empty() => f.write_str("none"),
            Surviving::Primes(ps) => {
                let v: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                f.write_str(&v.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfAggregate {
    pub c_f: BigInt,
    pub surviving: Surviving,
    pub entries: Vec<BfqEntry>,
    /// Eigenvalue keys present in the record but not used.
    pub skipped: Vec<String>,
}

fn key(q: &crate::ideal::PrimeIdeal) -> String {
    format!("{}:{}", q.p(), q.label())
}

/// `C_f` as the gcd of `|Norm(B_{f,q})|` over the usable keys. Keys above
/// ramified primes (which divide the level) and above primes in `skip` are
/// reported but not used.
pub fn aggregate_c_f(record: &NewformRecord, skip: &[u64]) -> Result<CfAggregate> {
    let mut c_f = BigInt::zero();
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for (q, ap) in &record.eigenvalues {
        if q.p() == 3 || q.kind() == SplitKind::Ramified || skip.contains(&q.p()) {
            skipped.push(key(q));
            continue;
        }
        let n = q.norm() as u64;
        let b = bound_b_fq(&record.hecke, n, ap);
        let abs_norm = abs_integral_norm(&record.hecke, &b)?;
        c_f = c_f.gcd(&abs_norm);
        entries.push(BfqEntry {
            prime: key(q),
            norm: n,
            ap: ap.to_string(),
            b_fq: b.to_string(),
            abs_norm,
        });
    }
    if entries.is_empty() {
        return Err(Error::Precondition(format!(
            "form {}: no usable eigenvalues",
            record.id
        )));
    }
    let surviving = if c_f.is_zero() {
        Surviving::All
    } else {
        Surviving::Primes(factor::prime_divisors(&c_f))
    };
    Ok(CfAggregate { c_f, surviving, entries, skipped })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InertiaOutcome {
    pub eliminated: bool,
    pub threshold: u64,
    /// `max(threshold, 24)`.
    pub conservative_threshold: u64,
}

/// Eliminates `f` for `p` above the threshold when every attached curve has
/// potentially good reduction at the prime above 3: the Frey curve has
/// potentially multiplicative reduction there, and its inertia image has
/// order divisible by `p`, while that of the attached abelian variety has
/// order at most 24.
pub fn inertia_eliminate(record: &NewformRecord, p_threshold: u64) -> Result<InertiaOutcome> {
    let curves = record.curves_at_lambda.as_ref().ok_or_else(|| {
        Error::NotApplicable(format!("form {} has no curve data at lambda", record.id))
    })?;
    if curves.is_empty() {
        return Err(Error::NotApplicable(format!(
            "form {} has an empty curve list",
            record.id
        )));
    }
    Ok(InertiaOutcome {
        eliminated: curves.iter().all(|&g| g),
        threshold: p_threshold,
        conservative_threshold: p_threshold.max(FAKE_CURVE_THRESHOLD),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EliminatedBy {
    NormBound,
    Inertia,
    None,
}

impl Display for EliminatedBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EliminatedBy::NormBound => "NORM_BOUND",
            EliminatedBy::Inertia => "INERTIA",
            EliminatedBy::None => "NONE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormReport {
    pub form_id: String,
    pub level: Level,
    pub hecke_field: String,
    pub b_fq: Vec<BfqEntry>,
    pub skipped_keys: Vec<String>,
    pub b_f: String,
    #[serde(serialize_with = "as_string")]
    pub c_f: BigInt,
    pub surviving_primes: Surviving,
    pub eliminated_by: EliminatedBy,
    /// Largest prime of `C_f`, or the inertia threshold; `f` is ruled out above it.
    pub elimination_prime: Option<u64>,
    /// Same, using the conservative inertia threshold.
    pub conservative_elimination_prime: Option<u64>,
    pub inertia: Option<InertiaOutcome>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationParams {
    pub skip_primes: Vec<u64>,
    pub inertia_threshold: u64,
}

impl Default for EliminationParams {
    fn default() -> Self {
        EliminationParams {
            skip_primes: vec![2],
            inertia_threshold: FAKE_CURVE_THRESHOLD,
        }
    }
}

pub fn eliminate_form(record: &NewformRecord, params: &EliminationParams) -> Result<FormReport> {
    let agg = aggregate_c_f(record, &params.skip_primes)?;
    let b_f = format!(
        "gcd of |Norm(B_f,q)| over {} primes",
        agg.entries.len()
    );
    let (eliminated_by, elimination_prime, conservative, inertia) = match &agg.surviving {
        Surviving::Primes(ps) => {
            let top = ps
                .last()
                .map(|p| p.to_u64().ok_or_else(|| Error::PrimeTooLarge(p.to_string())))
                .transpose()?
                .unwrap_or(1);
            (EliminatedBy::NormBound, Some(top), Some(top), None)
        }
        Surviving::All => match inertia_eliminate(record, params.inertia_threshold) {
            Ok(out) if out.eliminated => (
                EliminatedBy::Inertia,
                Some(out.threshold),
                Some(out.conservative_threshold),
                Some(out),
            ),
            Ok(out) => (EliminatedBy::None, None, None, Some(out)),
            Err(Error::NotApplicable(_)) => (EliminatedBy::None, None, None, None),
            Err(e) => return Err(e),
        },
    };
    Ok(FormReport {
        form_id: record.id.clone(),
        level: record.level,
        hecke_field: record.hecke.desc().to_string(),
        b_fq: agg.entries,
        skipped_keys: agg.skipped,
        b_f,
        c_f: agg.c_f,
        surviving_primes: agg.surviving,
        eliminated_by,
        elimination_prime,
        conservative_elimination_prime: conservative,
        inertia,
    })
}

/// Per-form work in parallel; output order follows `records`.
pub fn eliminate_forms(records: &[NewformRecord], params: &EliminationParams) -> Result<Vec<FormReport>> {
    records
        .par_iter()
        .map(|r| eliminate_form(r, params))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Structural {
    pub irreducibility: u64,
    pub fake_curve: u64,
    pub lifting_small: u64,
}

pub const STRUCTURAL: Structural = Structural {
    irreducibility: IRREDUCIBILITY_THRESHOLD,
    fake_curve: FAKE_CURVE_THRESHOLD,
    lifting_small: LIFTING_SMALL_THRESHOLD,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bound {
    pub b_k: u64,
    pub conservative_b_k: u64,
}

/// `B_K = max(ell, elimination primes)`; the conservative value also uses the
/// conservative inertia thresholds and, if asked, the structural thresholds.
pub fn aggregate_bound(forms: &[FormReport], torsion_ell: u64, include_structural: bool) -> Result<Bound> {
    let mut b_k = torsion_ell;
    let mut conservative = torsion_ell;
    for f in forms {
        match (f.eliminated_by, f.elimination_prime, f.conservative_elimination_prime) {
            (EliminatedBy::None, _, _) | (_, None, _) | (_, _, None) => {
                return Err(Error::FormNotEliminated(format!(
                    "{} (level {}, C_f = {}, surviving {})",
                    f.form_id, f.level, f.c_f, f.surviving_primes
                )))
            }
            (_, Some(p), Some(c)) => {
                b_k = b_k.max(p);
                conservative = conservative.max(c);
            }
        }
    }
    if include_structural {
        conservative = conservative
            .max(STRUCTURAL.irreducibility)
            .max(STRUCTURAL.fake_curve)
            .max(STRUCTURAL.lifting_small);
    }
    Ok(Bound { b_k, conservative_b_k: conservative })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSummary {
    pub level: Level,
    pub torsion_ell: u64,
    pub forms_found: usize,
    pub forms_expected: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EliminationReport {
    pub field_d: u64,
    pub method: &'static str,
    pub skip_primes: Vec<u64>,
    pub inertia_threshold: u64,
    pub levels: Vec<LevelSummary>,
    /// True when every level has as many forms as expected.
    pub fixture_complete: bool,
    pub per_form: Vec<FormReport>,
    pub torsion_prime_ell: u64,
    pub structural: Structural,
    #[serde(rename = "B_K")]
    pub b_k: u64,
    #[serde(rename = "conservative_B_K")]
    pub conservative_b_k: u64,
}

impl EliminationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "field Q(sqrt(-{})), method {}", self.field_d, self.method);
        let _ = writeln!(
            out,
            "skipped primes {:?}, inertia threshold {}",
            self.skip_primes, self.inertia_threshold
        );
        for l in &self.levels {
            let expected = l
                .forms_expected
                .map_or("?".to_string(), |n| n.to_string());
            let _ = writeln!(
                out,
                "level {:<3} ell {:<10} forms {}/{}",
                l.level.to_string(),
                l.torsion_ell,
                l.forms_found,
                expected
            );
        }
        let _ = writeln!(
            out,
            "{:<24} {:<5} {:>14} {:<12} {:<10} {:>6}",
            "form", "level", "C_f", "surviving", "by", "prime"
        );
        for f in &self.per_form {
            let prime = f.elimination_prime.map_or("-".to_string(), |p| p.to_string());
            let _ = writeln!(
                out,
                "{:<24} {:<5} {:>14} {:<12} {:<10} {:>6}",
                f.form_id,
                f.level.to_string(),
                f.c_f.to_string(),
                f.surviving_primes.to_string(),
                f.eliminated_by.to_string(),
                prime
            );
        }
        if !self.fixture_complete {
            let _ = writeln!(out, "note: fixture has fewer forms than expected");
        }
        let _ = writeln!(out, "torsion ell {}", self.torsion_prime_ell);
        let _ = writeln!(out, "B_K = {}", self.b_k);
        let _ = writeln!(out, "conservative B_K = {}", self.conservative_b_k);
        out
    }
}

/// Counts of forms per level in a record list.
pub fn forms_per_level(records: &[NewformRecord]) -> BTreeMap<Level, usize> {
    let mut m = BTreeMap::new();
    for r in records {
        *m.entry(r.level).or_default() += 1;
    }
    m
}
