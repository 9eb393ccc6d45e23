//! Arithmetic in the Hecke field `Q_f = Q[x]/(m(x))` of a newform.
//!
//! Elements are coordinate vectors over the power basis `1, x, ..., x^(n-1)`.
//! Polynomials are stored lowest degree first.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, Zero};

use crate::arith::BigRat;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HeckeFieldDesc {
    Rational,
    /// `Q(sqrt(disc))`, generator `x` with `x^2 = disc`.
    Quadratic(i64),
    /// Monic integer minimal polynomial, lowest degree first.
    Generic(Vec<i64>),
}

impl fmt::Display for HeckeFieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeckeFieldDesc::Rational => write!(f, "Q"),
            HeckeFieldDesc::Quadratic(d) => write!(f, "Q(sqrt({d}))"),
            HeckeFieldDesc::Generic(c) => write!(f, "Q[x]/({c:?})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeField {
    desc: HeckeFieldDesc,
    /// Monic modulus, lowest degree first, length `degree + 1`.
    modulus: Vec<BigRat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeElem {
    coords: Vec<BigRat>,
}

fn r(n: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(n))
}

fn is_square(n: i64) -> bool {
    n >= 0 && {
        let s = n.sqrt();
        s * s == n
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n.sqrt())
        .filter(|k| n % k == 0)
        .flat_map(|k| [k, n / k])
        .collect()
}

fn check_irreducible(coeffs: &[i64]) -> Result<()> {
    let reducible = match coeffs.len() - 1 {
        2 => is_square(coeffs[1] * coeffs[1] - 4 * coeffs[0]),
        3 => {
            let c0 = coeffs[0];
            c0 == 0
                || divisors(c0.unsigned_abs()).into_iter().any(|k| {
                    [k as i128, -(k as i128)].into_iter().any(|t| {
                        coeffs.iter().rev().fold(0i128, |acc, &c| acc * t + c as i128) == 0
                    })
                })
        }
        _ => false,
    };
    if reducible {
        return Err(Error::Precondition(format!("{coeffs:?} is reducible over Q")));
    }
    Ok(())
}

impl HeckeField {
    /// Validates the descriptor; irreducibility is checked up to degree 3.
    pub fn new(desc: HeckeFieldDesc) -> Result<HeckeField> {
        let modulus: Vec<i64> = match &desc {
            HeckeFieldDesc::Rational => vec![0, 1],
            HeckeFieldDesc::Quadratic(d) => {
                if is_square(*d) {
                    return Err(Error::Precondition(format!("{d} is a square")));
                }
                vec![-d, 0, 1]
            }
            HeckeFieldDesc::Generic(c) => {
                if c.len() < 2 || *c.last().unwrap() != 1 {
                    return Err(Error::Precondition(format!(
                        "minimal polynomial {c:?} must be monic of degree >= 1"
                    )));
                }
                check_irreducible(c)?;
                c.clone()
            }
        };
        Ok(HeckeField {
            desc,
            modulus: modulus.into_iter().map(r).collect(),
        })
    }

    pub fn rational() -> HeckeField {
        HeckeField::new(HeckeFieldDesc::Rational).expect("Q is a field")
    }

    pub fn desc(&self) -> &HeckeFieldDesc {
        &self.desc
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn elem(&self, coords: Vec<BigRat>) -> Result<HeckeElem> {
        if coords.len() != self.degree() {
            return Err(Error::Precondition(format!(
                "expected {} coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        Ok(HeckeElem { coords })
    }

    pub fn from_rat(&self, x: BigRat) -> HeckeElem {
        let mut coords = vec![BigRat::zero(); self.degree()];
        coords[0] = x;
        HeckeElem { coords }
    }

    pub fn from_int(&self, n: i64) -> HeckeElem {
        self.from_rat(r(n))
    }

    pub fn add(&self, a: &HeckeElem, b: &HeckeElem) -> HeckeElem {
        HeckeElem {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, a: &HeckeElem, b: &HeckeElem) -> HeckeElem {
        HeckeElem {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn mul(&self, a: &HeckeElem, b: &HeckeElem) -> HeckeElem {
        let n = self.degree();
        let mut prod = vec![BigRat::zero(); 2 * n - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for k in (n..prod.len()).rev() {
            let top = std::mem::take(&mut prod[k]);
            if top.is_zero() {
                continue;
            }
            for (i, m) in self.modulus[..n].iter().enumerate() {
                prod[k - n + i] -= &top * m;
            }
        }
        prod.truncate(n);
        HeckeElem { coords: prod }
    }

    /// `N(a)`: closed forms up to degree 2, resultant beyond.
    pub fn norm(&self, a: &HeckeElem) -> BigRat {
        match self.degree() {
            1 => a.coords[0].clone(),
            2 => {
                let (u, v) = (&a.coords[0], &a.coords[1]);
                let (m0, m1) = (&self.modulus[0], &self.modulus[1]);
                u * u - u * v * m1 + v * v * m0
            }
            _ => self.norm_resultant(a),
        }
    }

    /// `Res(m, g)` where `a = g(x)`; equals the norm since `m` is monic.
    pub fn norm_resultant(&self, a: &HeckeElem) -> BigRat {
        let mut g = a.coords.clone();
        while g.last().is_some_and(|c| c.is_zero()) {
            g.pop();
        }
        let n = self.degree();
        if g.is_empty() {
            return BigRat::zero();
        }
        let m = g.len() - 1;
        if m == 0 {
            return pow(&g[0], n);
        }
        let size = n + m;
        let mut rows = vec![vec![BigRat::zero(); size]; size];
        for (i, row) in rows.iter_mut().take(m).enumerate() {
            for (k, c) in self.modulus.iter().rev().enumerate() {
                row[i + k] = c.clone();
            }
        }
        for (i, row) in rows.iter_mut().skip(m).enumerate() {
            for (k, c) in g.iter().rev().enumerate() {
                row[i + k] = c.clone();
            }
        }
        determinant(rows)
    }

    /// Determinant of multiplication by `a` on the power basis.
    pub fn norm_matrix(&self, a: &HeckeElem) -> BigRat {
        let n = self.degree();
        let rows = (0..n)
            .map(|i| {
                let mut basis = vec![BigRat::zero(); n];
                basis[i] = BigRat::one();
                self.mul(a, &HeckeElem { coords: basis }).coords
            })
            .collect();
        determinant(rows)
    }
}

fn pow(x: &BigRat, n: usize) -> BigRat {
    (0..n).fold(BigRat::one(), |acc, _| acc * x)
}

fn determinant(mut m: Vec<Vec<BigRat>>) -> BigRat {
    let n = m.len();
    let mut det = BigRat::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRat::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let f = &m[row][col] / &p;
            for k in col..n {
                let t = &f * &m[col][k];
                m[row][k] -= t;
            }
        }
    }
    det
}

impl HeckeElem {
    pub fn coords(&self) -> &[BigRat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRat> {
        self.coords[1..].iter().all(|c| c.is_zero()).then(|| &self.coords[0])
    }
}

impl fmt::Display for HeckeElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => c.to_string(),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            });
        }
        if terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = terms[0].clone();
        for t in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        f.write_str(&out)
    }
}

/// `|N(a)|` as an integer, for elements known to have integral norm.
pub fn abs_integral_norm(field: &HeckeField, a: &HeckeElem) -> Result<BigInt> {
    let n = field.norm(a);
    if !n.is_integer() {
        return Err(Error::NotIntegral(format!("norm {n} of {a}")));
    }
    Ok(n.to_integer().abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(f: &HeckeField, c: &[i64]) -> HeckeElem {
        f.elem(c.iter().map(|&n| r(n)).collect()).unwrap()
    }

    #[test]
    fn quadratic_arithmetic() {
        let f = HeckeField::new(HeckeFieldDesc::Quadratic(5)).unwrap();
        let x = el(&f, &[0, 1]);
        assert_eq!(f.mul(&x, &x), el(&f, &[5, 0]));
        assert_eq!(f.norm(&el(&f, &[1, 1])), r(-4));
        assert_eq!(f.norm_resultant(&el(&f, &[1, 1])), r(-4));
        assert_eq!(f.norm_matrix(&el(&f, &[1, 1])), r(-4));
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(HeckeField::new(HeckeFieldDesc::Quadratic(4)).is_err());
        assert!(HeckeField::new(HeckeFieldDesc::Generic(vec![-2, 0, 2])).is_err());
        assert!(HeckeField::new(HeckeFieldDesc::Generic(vec![-1, 0, 1])).is_err());
        assert!(HeckeField::new(HeckeFieldDesc::Generic(vec![-2, 0, 0, 1])).is_ok());
        assert!(HeckeField::new(HeckeFieldDesc::Generic(vec![-8, 0, 0, 1])).is_err());
        assert!(HeckeField::new(HeckeFieldDesc::Generic(vec![0, 1, 1, 1])).is_err());
    }

    #[test]
    fn cubic_norm_routes_agree() {
        // x^3 - x - 1
        let f = HeckeField::new(HeckeFieldDesc::Generic(vec![-1, -1, 0, 1])).unwrap();
        for c in [[1, 0, 0], [0, 1, 0], [2, -3, 1], [5, 0, 7], [-4, 1, -1]] {
            let a = el(&f, &c);
            assert_eq!(f.norm_resultant(&a), f.norm_matrix(&a), "{c:?}");
        }
        assert_eq!(f.norm(&el(&f, &[0, 1, 0])), r(1));
    }

    #[test]
    fn display() {
        let f = HeckeField::new(HeckeFieldDesc::Quadratic(2)).unwrap();
        assert_eq!(el(&f, &[1, -3]).to_string(), "1 - 3*x");
        assert_eq!(el(&f, &[0, 0]).to_string(), "0");
    }
}
