//! Integral ideals as Z-lattices and the class number via the Minkowski bound.
//!
//! An ideal is held in Hermite normal form `[a, b + c*w]` with `c | a`,
//! `c | b` and `0 <= b < a`; its norm is `a*c`. Every ideal class contains an
//! integral ideal of norm at most `(2/pi) sqrt(|disc|)`, so listing those and
//! merging equivalent ones (`I ~ J` iff `I * conj(J)` is principal) counts the
//! classes. Principality is decided by searching the positive definite norm
//! form of the lattice, which is a finite search.

use num_integer::{Integer, Roots};

use crate::arith::{FieldCtx, OmegaKind, QuadElem};
use crate::ideal::{PrimeIdeal, SplitKind};

/// `u + v*w` with machine integers; enough for desk-scale discriminants.
type Coords = (i128, i128);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeIdeal {
    ctx: FieldCtx,
    a: i128,
    b: i128,
    c: i128,
}

fn mul_coords(ctx: FieldCtx, (u1, v1): Coords, (u2, v2): Coords) -> Coords {
    let d = ctx.d() as i128;
    match ctx.kind() {
        OmegaKind::Sqrt => (u1 * u2 - d * v1 * v2, u1 * v2 + u2 * v1),
        OmegaKind::Half => {
            let k = (1 + d) / 4;
            (u1 * u2 - k * v1 * v2, u1 * v2 + u2 * v1 + v1 * v2)
        }
    }
}

fn conj_coords(ctx: FieldCtx, (u, v): Coords) -> Coords {
    match ctx.kind() {
        OmegaKind::Sqrt => (u, -v),
        OmegaKind::Half => (u + v, -v),
    }
}

fn norm_coords(ctx: FieldCtx, x: Coords) -> i128 {
    mul_coords(ctx, x, conj_coords(ctx, x)).0
}

impl LatticeIdeal {
    /// Hermite normal form of the Z-span of `gens`; `None` if the span is not
    /// of full rank.
    pub fn from_generators(ctx: FieldCtx, gens: &[Coords]) -> Option<LatticeIdeal> {
        let mut pivot: Coords = (0, 0);
        let mut a: i128 = 0;
        for &g in gens {
            let (mut x, mut y) = (pivot, g);
            while y.1 != 0 {
                let q = x.1 / y.1;
                x = (x.0 - q * y.0, x.1 - q * y.1);
                std::mem::swap(&mut x, &mut y);
            }
            pivot = x;
            a = a.gcd(&y.0);
        }
        if pivot.1 < 0 {
            pivot = (-pivot.0, -pivot.1);
        }
        if a == 0 || pivot.1 == 0 {
            return None;
        }
        Some(LatticeIdeal {
            ctx,
            a,
            b: pivot.0.rem_euclid(a),
            c: pivot.1,
        })
    }

    pub fn unit(ctx: FieldCtx) -> LatticeIdeal {
        LatticeIdeal { ctx, a: 1, b: 0, c: 1 }
    }

    pub fn from_prime(q: &PrimeIdeal) -> LatticeIdeal {
        let ctx = q.ctx();
        let p = q.p() as i128;
        let gens: Vec<Coords> = match q.kind() {
            SplitKind::Inert => vec![(p, 0), (0, p)],
            _ => {
                let g = (-(q.residue_root().unwrap() as i128), 1);
                vec![(p, 0), (0, p), g, mul_coords(ctx, (0, 1), g)]
            }
        };
        LatticeIdeal::from_generators(ctx, &gens).expect("prime ideals have full rank")
    }

    pub fn norm(&self) -> i128 {
        self.a * self.c
    }

    fn basis(&self) -> [Coords; 2] {
        [(self.a, 0), (self.b, self.c)]
    }

    pub fn contains(&self, (u, v): Coords) -> bool {
        v % self.c == 0 && (u - (v / self.c) * self.b) % self.a == 0
    }

    fn is_ideal(&self) -> bool {
        self.basis()
            .iter()
            .all(|&g| self.contains(mul_coords(self.ctx, (0, 1), g)))
    }

    pub fn mul(&self, other: &LatticeIdeal) -> LatticeIdeal {
        let mut gens = Vec::with_capacity(4);
        for g in self.basis() {
            for h in other.basis() {
                gens.push(mul_coords(self.ctx, g, h));
            }
        }
        LatticeIdeal::from_generators(self.ctx, &gens).expect("product of nonzero ideals")
    }

    pub fn conj(&self) -> LatticeIdeal {
        let gens: Vec<Coords> = self
            .basis()
            .iter()
            .map(|&g| conj_coords(self.ctx, g))
            .collect();
        LatticeIdeal::from_generators(self.ctx, &gens).expect("conjugate of nonzero ideal")
    }

    /// A generator, if the ideal is principal.
    ///
    /// Searches `x*a + y*(b + c w)` with norm equal to `N(I)`. Writing the norm
    /// form as `A x^2 + B x y + C y^2`, `4A n = (2Ax + By)^2 + (4AC - B^2) y^2`
    /// bounds `y`, and each `y` leaves a quadratic in `x`.
    pub fn generator(&self) -> Option<QuadElem> {
        let n = self.norm();
        let [g1, g2] = self.basis();
        let qa = norm_coords(self.ctx, g1);
        let qc = norm_coords(self.ctx, g2);
        let qb = norm_coords(self.ctx, (g1.0 + g2.0, g1.1 + g2.1)) - qa - qc;
        let det = 4 * qa * qc - qb * qb;
        debug_assert!(det > 0);
        let ymax = (4 * qa * n / det).sqrt() + 1;
        for y in -ymax..=ymax {
            // qa x^2 + qb y x + (qc y^2 - n) = 0
            let disc = qb * qb * y * y - 4 * qa * (qc * y * y - n);
            if disc < 0 {
                continue;
            }
            let s = disc.sqrt();
            if s * s != disc {
                continue;
            }
            for num in [-qb * y + s, -qb * y - s] {
                if num % (2 * qa) == 0 {
                    let x = num / (2 * qa);
                    let u = x * g1.0 + y * g2.0;
                    let v = x * g1.1 + y * g2.1;
                    return Some(QuadElem::from_ints(self.ctx, u, v));
                }
            }
        }
        None
    }

    pub fn is_principal(&self) -> bool {
        self.generator().is_some()
    }

    pub fn equivalent(&self, other: &LatticeIdeal) -> bool {
        self.mul(&other.conj()).is_principal()
    }

    /// Every integral ideal of norm `n`.
    pub fn all_of_norm(ctx: FieldCtx, n: i128) -> Vec<LatticeIdeal> {
        let mut out = Vec::new();
        for c in 1..=n {
            if n % c != 0 {
                continue;
            }
            let a = n / c;
            if a % c != 0 {
                continue;
            }
            let mut b = 0;
            while b < a {
                let cand = LatticeIdeal { ctx, a, b, c };
                if cand.is_ideal() {
                    out.push(cand);
                }
                b += c;
            }
        }
        out
    }
}

/// Largest norm that must be inspected: every `n` with `n <= (2/pi) sqrt(|disc|)`.
///
/// Uses `pi > 314159/100000`, so the returned bound can only overshoot.
pub fn minkowski_norm_bound(ctx: FieldCtx) -> i128 {
    let disc = ctx.disc().unsigned_abs() as i128;
    let lhs = 4 * disc * 10_000_000_000;
    let mut n = 1;
    while (n + 1) * (n + 1) * 314_159 * 314_159 <= lhs {
        n += 1;
    }
    n
}

/// Class number `h_K` (equal to the narrow class number for imaginary `K`).
pub fn class_number(ctx: FieldCtx) -> u64 {
    let bound = minkowski_norm_bound(ctx);
    let mut reps: Vec<LatticeIdeal> = vec![LatticeIdeal::unit(ctx)];
    for n in 2..=bound {
        for ideal in LatticeIdeal::all_of_norm(ctx, n) {
            if !reps.iter().any(|r| ideal.equivalent(r)) {
                reps.push(ideal);
            }
        }
    }
    reps.len() as u64
}

/// Generator of a prime ideal, if it is principal.
pub fn prime_generator(q: &PrimeIdeal) -> Option<QuadElem> {
    LatticeIdeal::from_prime(q).generator()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::primes_above;

    fn k(d: u64) -> FieldCtx {
        FieldCtx::new(d).unwrap()
    }

    /// Independent route: count reduced primitive forms of discriminant D.
    fn reduced_form_count(disc: i64) -> u64 {
        let dd = -disc;
        let mut h = 0;
        let mut a = 1;
        while 3 * a * a <= dd {
            for b in -a + 1..=a {
                let num = b * b - disc;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c < a || (c == a && b < 0) {
                    continue;
                }
                if a.gcd(&b).gcd(&c) != 1 {
                    continue;
                }
                h += 1;
            }
            a += 1;
        }
        h
    }

    #[test]
    fn class_numbers_examples() {
        assert_eq!(class_number(k(7)), 1);
        assert_eq!(class_number(k(5)), 2);
        assert_eq!(class_number(k(67)), 1);
        for d in [19, 43, 163] {
            assert_eq!(class_number(k(d)), 1, "d = {d}");
        }
    }

    #[test]
    fn class_numbers_match_reduced_forms() {
        for d in 2..400u64 {
            let Ok(ctx) = FieldCtx::new(d) else { continue };
            if d == 3 {
                continue;
            }
            assert_eq!(class_number(ctx), reduced_form_count(ctx.disc()), "d = {d}");
        }
    }

    #[test]
    fn prime_two_non_principal_for_d5() {
        let ctx = k(5);
        let p2 = &primes_above(2, ctx).unwrap()[0];
        assert!(prime_generator(p2).is_none());
        let sq = LatticeIdeal::from_prime(p2).mul(&LatticeIdeal::from_prime(p2));
        assert_eq!(sq.norm(), 4);
        assert!(sq.is_principal());
    }

    #[test]
    fn generators_have_right_norm() {
        let ctx = k(7);
        for p in [2, 3, 7, 11] {
            for q in primes_above(p, ctx).unwrap() {
                let g = prime_generator(&q).unwrap();
                assert_eq!(g.norm().to_integer(), (q.norm() as i64).into());
                assert_eq!(q.val(&g).unwrap(), 1);
            }
        }
    }

    #[test]
    fn minkowski_bounds() {
        assert_eq!(minkowski_norm_bound(k(7)), 1);
        assert_eq!(minkowski_norm_bound(k(5)), 2);
        assert_eq!(minkowski_norm_bound(k(67)), 5);
    }
}
