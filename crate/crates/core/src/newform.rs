//! Newform eigenvalue files.
//!
//! ```json
//! {"field_d": 7,
//!  "forms": [{"id": "...", "level": "D" | "LD",
//!             "hecke": {"kind": "Q" | "quad" | "poly", "disc"?: int, "min_poly"?: [int]},
//!             "ap": [{"p": 2, "split": "s0" | "s1" | "inert" | "ram", "value": ["-1", ...]}],
//!             "curves_at_lambda"?: [{"pot_good": true}]}]}
//! ```
//!
//! `value` holds the coordinates of the eigenvalue over the power basis of
//! the Hecke field; `min_poly` is monic, lowest degree first. Rationals may be
//! given as integers or strings `"p/q"` and are always written back as strings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{BigRat, FieldCtx};
use crate::error::{Error, Result};
use crate::factor::is_prime_u64;
use crate::hecke::{HeckeElem, HeckeField, HeckeFieldDesc};
use crate::ideal::{PrimeIdeal, SplitKind};

/// Eigenvalues are only kept at primes of norm below this.
pub const NORM_LIMIT: u128 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    /// The prime above `d`.
    D,
    /// The prime above 3 times the prime above `d`.
    LD,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::D => "D",
            Level::LD => "LD",
        })
    }
}

impl std::str::FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Level> {
        match s {
            "D" => Ok(Level::D),
            "LD" => Ok(Level::LD),
            _ => Err(Error::Parse(format!("unknown level {s:?}; expected D or LD"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum RawRat {
    Int(i64),
    Str(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHecke {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    disc: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_poly: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAp {
    p: u64,
    split: String,
    value: Vec<RawRat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    pot_good: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawForm {
    id: String,
    level: Level,
    hecke: RawHecke,
    ap: Vec<RawAp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curves_at_lambda: Option<Vec<RawCurve>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    field_d: u64,
    forms: Vec<RawForm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewformRecord {
    pub ctx: FieldCtx,
    pub id: String,
    pub level: Level,
    pub hecke: HeckeField,
    pub eigenvalues: BTreeMap<PrimeIdeal, HeckeElem>,
    /// `pot_good` flags of the curves attached to the form, if supplied.
    pub curves_at_lambda: Option<Vec<bool>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewformFile {
    pub ctx: FieldCtx,
    pub forms: Vec<NewformRecord>,
}

fn parse_rat(raw: &RawRat, path: &str) -> Result<BigRat> {
    match raw {
        RawRat::Int(n) => Ok(BigRat::from_integer(BigInt::from(*n))),
        RawRat::Str(s) => {
            let s = s.trim();
            let (num, den) = match s.split_once('/') {
                Some((n, d)) => (n.trim(), d.trim()),
                None => (s, "1"),
            };
            let num: BigInt = num
                .parse()
                .map_err(|_| Error::schema(path, format!("not a rational: {s:?}")))?;
            let den: BigInt = den
                .parse()
                .map_err(|_| Error::schema(path, format!("not a rational: {s:?}")))?;
            if den.is_zero() {
                return Err(Error::schema(path, "zero denominator"));
            }
            Ok(BigRat::new(num, den))
        }
    }
}

fn hecke_from_raw(raw: &RawHecke, path: &str) -> Result<HeckeField> {
    let desc = match (raw.kind.as_str(), raw.disc, &raw.min_poly) {
        ("Q", None, None) => HeckeFieldDesc::Rational,
        ("quad", Some(d), None) => HeckeFieldDesc::Quadratic(d),
        ("poly", None, Some(c)) => HeckeFieldDesc::Generic(c.clone()),
        ("Q" | "quad" | "poly", _, _) => {
            return Err(Error::schema(
                path,
                format!("kind {:?} needs disc only for quad and min_poly only for poly", raw.kind),
            ))
        }
        (k, _, _) => {
            return Err(Error::schema(
                format!("{path}.kind"),
                format!("unknown kind {k:?}; expected Q, quad or poly"),
            ))
        }
    };
    HeckeField::new(desc).map_err(|e| Error::schema(path, e.to_string()))
}

fn hecke_to_raw(h: &HeckeField) -> RawHecke {
    match h.desc() {
        HeckeFieldDesc::Rational => RawHecke { kind: "Q".into(), disc: None, min_poly: None },
        HeckeFieldDesc::Quadratic(d) => RawHecke { kind: "quad".into(), disc: Some(*d), min_poly: None },
        HeckeFieldDesc::Generic(c) => RawHecke { kind: "poly".into(), disc: None, min_poly: Some(c.clone()) },
    }
}

fn prime_key(ctx: FieldCtx, ap: &RawAp, path: &str) -> Result<PrimeIdeal> {
    if !is_prime_u64(ap.p) {
        return Err(Error::schema(format!("{path}.p"), format!("{} is not prime", ap.p)));
    }
    if ap.p == 3 {
        return Err(Error::schema(format!("{path}.p"), "primes above 3 are excluded"));
    }
    let q = PrimeIdeal::from_label(ctx, ap.p, &ap.split)
        .map_err(|e| Error::schema(format!("{path}.split"), e.to_string()))?;
    if q.norm() >= NORM_LIMIT {
        return Err(Error::schema(
            format!("{path}.p"),
            format!("{q} has norm {} >= {NORM_LIMIT}", q.norm()),
        ));
    }
    Ok(q)
}

fn form_from_raw(ctx: FieldCtx, raw: &RawForm, path: &str) -> Result<NewformRecord> {
    if raw.id.trim().is_empty() {
        return Err(Error::schema(format!("{path}.id"), "empty id"));
    }
    let hecke = hecke_from_raw(&raw.hecke, &format!("{path}.hecke"))?;
    if raw.ap.is_empty() {
        return Err(Error::schema(format!("{path}.ap"), "no eigenvalues"));
    }
    let mut eigenvalues = BTreeMap::new();
    for (i, ap) in raw.ap.iter().enumerate() {
        let apath = format!("{path}.ap[{i}]");
        let q = prime_key(ctx, ap, &apath)?;
        let coords = ap
            .value
            .iter()
            .enumerate()
            .map(|(k, v)| parse_rat(v, &format!("{apath}.value[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let value = hecke
            .elem(coords)
            .map_err(|e| Error::schema(format!("{apath}.value"), e.to_string()))?;
        if let Some(a) = value.as_rational() {
            if hecke.degree() == 1 && a * a > BigRat::from_integer(BigInt::from(4 * q.norm())) {
                return Err(Error::schema(
                    format!("{apath}.value"),
                    format!("|{a}| exceeds 2 sqrt(N({q}))"),
                ));
            }
        }
        if eigenvalues.insert(q.clone(), value).is_some() {
            return Err(Error::schema(apath, format!("duplicate eigenvalue at {q}")));
        }
    }
    Ok(NewformRecord {
        ctx,
        id: raw.id.clone(),
        level: raw.level,
        hecke,
        eigenvalues,
        curves_at_lambda: raw
            .curves_at_lambda
            .as_ref()
            .map(|cs| cs.iter().map(|c| c.pot_good).collect()),
    })
}

fn rat_to_raw(r: &BigRat) -> RawRat {
    RawRat::Str(if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    })
}

fn form_to_raw(f: &NewformRecord) -> RawForm {
    RawForm {
        id: f.id.clone(),
        level: f.level,
        hecke: hecke_to_raw(&f.hecke),
        ap: f
            .eigenvalues
            .iter()
            .map(|(q, v)| RawAp {
                p: q.p(),
                split: q.label().to_string(),
                value: v.coords().iter().map(rat_to_raw).collect(),
            })
            .collect(),
        curves_at_lambda: f
            .curves_at_lambda
            .as_ref()
            .map(|cs| cs.iter().map(|&pot_good| RawCurve { pot_good }).collect()),
    }
}

/// Parses and validates a newform file; `origin` names the source in errors.
pub fn parse_newforms(text: &str, origin: &str) -> Result<NewformFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        Error::schema(
            format!("{origin}: {}", e.path()),
            format!("{inner} (line {}, column {})", inner.line(), inner.column()),
        )
    })?;
    let ctx = FieldCtx::new(raw.field_d)
        .map_err(|e| Error::schema(format!("{origin}: field_d"), e.to_string()))?;
    let mut ids = BTreeSet::new();
    let mut forms = Vec::with_capacity(raw.forms.len());
    for (i, f) in raw.forms.iter().enumerate() {
        let path = format!("{origin}: forms[{i}]");
        if !ids.insert(f.id.clone()) {
            return Err(Error::schema(format!("{path}.id"), format!("duplicate id {:?}", f.id)));
        }
        forms.push(form_from_raw(ctx, f, &path)?);
    }
    Ok(NewformFile { ctx, forms })
}

pub fn load_newforms(path: &Path) -> Result<NewformFile> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_newforms(&text, &path.display().to_string())
}

/// Pretty JSON with a trailing newline; stable under parse/emit.
pub fn emit_newforms(file: &NewformFile) -> String {
    let raw = RawFile {
        field_d: file.ctx.d(),
        forms: file.forms.iter().map(form_to_raw).collect(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("plain data serialises");
    s.push('\n');
    s
}

impl NewformRecord {
    /// Eigenvalue keys at which the bound `B_{f,q}` may be used: not above 3,
    /// not ramified, and not over any prime in `skip`.
    pub fn usable_keys<'a>(&'a self, skip: &'a [u64]) -> impl Iterator<Item = (&'a PrimeIdeal, &'a HeckeElem)> {
        self.eigenvalues.iter().filter(move |(q, _)| {
            q.p() != 3 && q.kind() != SplitKind::Ramified && !skip.contains(&q.p())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D7: &str = r#"{"field_d": 7, "forms": [{"id": "f", "level": "LD",
        "hecke": {"kind": "Q"},
        "ap": [{"p": 2, "split": "s0", "value": [-1]}, {"p": 2, "split": "s1", "value": ["-1"]},
               {"p": 7, "split": "ram", "value": ["1"]}]}]}"#;

    #[test]
    fn parses_and_round_trips() {
        let f = parse_newforms(D7, "d7").unwrap();
        assert_eq!(f.forms.len(), 1);
        assert_eq!(f.forms[0].level, Level::LD);
        assert_eq!(f.forms[0].eigenvalues.len(), 3);
        let once = emit_newforms(&f);
        let twice = emit_newforms(&parse_newforms(&once, "x").unwrap());
        assert_eq!(once, twice);
    }

    fn err_path(text: &str) -> String {
        match parse_newforms(text, "t") {
            Err(Error::Schema { path, .. }) => path,
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_large_norm() {
        let t = D7.replace(r#"{"p": 7, "split": "ram", "value": ["1"]}"#, r#"{"p": 53, "split": "s0", "value": ["1"]}"#);
        assert!(err_path(&t).contains("ap[2].p"));
    }

    #[test]
    fn rejects_lambda_and_duplicates() {
        let t = D7.replace(r#""p": 7, "split": "ram""#, r#""p": 3, "split": "inert""#);
        assert!(err_path(&t).contains("ap[2]"));
        let t = D7.replace(r#""split": "s1""#, r#""split": "s0""#);
        assert!(err_path(&t).contains("ap[1]"));
    }

    #[test]
    fn rejects_wrong_split_label_and_unknown_fields() {
        let t = D7.replace(r#""p": 7, "split": "ram""#, r#""p": 7, "split": "inert""#);
        assert!(err_path(&t).contains("ap[2].split"));
        let t = D7.replace(r#""id": "f","#, r#""id": "f", "extra": 1,"#);
        assert!(err_path(&t).contains("forms[0]"));
    }

    #[test]
    fn rejects_bad_coordinates() {
        let t = D7.replace(r#""value": [-1]"#, r#""value": [-1, 2]"#);
        assert!(err_path(&t).contains("ap[0].value"));
        let t = D7.replace(r#""value": [-1]"#, r#""value": [9]"#);
        assert!(err_path(&t).contains("ap[0].value"));
        let t = D7.replace(r#""value": [-1]"#, r#""value": ["1/0"]"#);
        assert!(err_path(&t).contains("ap[0].value[0]"));
    }

    #[test]
    fn quadratic_hecke_field() {
        let t = D7
            .replace(r#"{"kind": "Q"}"#, r#"{"kind": "quad", "disc": 5}"#)
            .replace(r#"[-1]"#, r#"["1/2", "1/2"]"#)
            .replace(r#"["-1"]"#, r#"[0, 1]"#)
            .replace(r#"["1"]"#, r#"[1, 0]"#);
        let f = parse_newforms(&t, "t").unwrap();
        assert_eq!(f.forms[0].hecke.degree(), 2);
        let again = emit_newforms(&f);
        assert!(again.contains("\"1/2\""));
        assert_eq!(emit_newforms(&parse_newforms(&again, "t").unwrap()), again);
        let bad = t.replace(r#""disc": 5"#, r#""min_poly": [1, 0, 1]"#);
        assert!(err_path(&bad).contains("hecke"));
    }
}
