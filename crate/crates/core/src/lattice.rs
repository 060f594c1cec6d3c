//! Lattice and dual-lattice algebra on the plane.
//!
//! A lattice is spanned by `e1, e2` with `det[e1; e2] > 0`. Lattice vectors are
//! addressed by integer coordinates `(m, n)` meaning `m e1 + n e2`, dual vectors
//! by `(p, q)` meaning `p e1* + q e2*`, so that `(p, q) . (m, n) = p m + q n`.

use std::fmt;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;

/// `v^perp = (-v2, v1)`.
pub fn perp(v: &Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    e1: Vec2,
    e2: Vec2,
    e1_star: Vec2,
    e2_star: Vec2,
    area: f64,
}

impl Lattice {
    pub fn new(e1: Vec2, e2: Vec2) -> Result<Self> {
        let det = e1.x * e2.y - e1.y * e2.x;
        if !(det > 0.0) {
            return Err(Error::NonPositiveDeterminant { det });
        }
        let e1_star = -perp(&e2) / det;
        let e2_star = perp(&e1) / det;
        Ok(Self {
            e1,
            e2,
            e1_star,
            e2_star,
            area: det,
        })
    }

    pub fn e1(&self) -> Vec2 {
        self.e1
    }

    pub fn e2(&self) -> Vec2 {
        self.e2
    }

    pub fn e1_star(&self) -> Vec2 {
        self.e1_star
    }

    pub fn e2_star(&self) -> Vec2 {
        self.e2_star
    }

    /// Area of the fundamental cell.
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Mean field giving one flux quantum per cell.
    pub fn unit_flux_field(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.area
    }

    pub fn point(&self, m: i64, n: i64) -> Vec2 {
        self.e1 * m as f64 + self.e2 * n as f64
    }

    pub fn dual_point(&self, p: i64, q: i64) -> Vec2 {
        self.e1_star * p as f64 + self.e2_star * q as f64
    }

    /// Cell coordinates `(s, t)` with `x = s e1 + t e2`.
    pub fn coords(&self, x: &Vec2) -> (f64, f64) {
        (self.e1_star.dot(x), self.e2_star.dot(x))
    }

    pub fn from_coords(&self, s: f64, t: f64) -> Vec2 {
        self.e1 * s + self.e2 * t
    }

    /// All nonzero lattice vectors with `|d| <= radius`, in canonical sign only
    /// (one representative of each `+-d` pair), sorted by length.
    pub fn enumerate(&self, radius: f64) -> Vec<(i64, i64)> {
        // |m| = |e1* . d| <= |e1*| radius, same for n.
        let mmax = (radius * self.e1_star.norm()).ceil() as i64;
        let nmax = (radius * self.e2_star.norm()).ceil() as i64;
        let mut out = Vec::new();
        for m in -mmax..=mmax {
            for n in -nmax..=nmax {
                if !is_canonical(m, n) {
                    continue;
                }
                if self.point(m, n).norm() <= radius {
                    out.push((m, n));
                }
            }
        }
        out.sort_by(|a, b| {
            let la = self.point(a.0, a.1).norm();
            let lb = self.point(b.0, b.1).norm();
            la.total_cmp(&lb).then(a.cmp(b))
        });
        out
    }

    /// Pairs of lattice vectors within `radius` with equal length but
    /// `d' != +-d`. An empty result means the length condition holds up to
    /// `radius`.
    pub fn length_violations(&self, radius: f64) -> Vec<LengthViolation> {
        let tol = 1e-9 * radius;
        let vectors: Vec<_> = self
            .enumerate(radius)
            .into_iter()
            .map(|(m, n)| ((m, n), self.point(m, n).norm()))
            .collect();
        let mut out = Vec::new();
        for (i, &(d, ld)) in vectors.iter().enumerate() {
            // sorted by length, so the scan can stop at the first gap
            for &(d_prime, ldp) in &vectors[i + 1..] {
                if ldp - ld > tol {
                    break;
                }
                out.push(LengthViolation {
                    d,
                    d_prime,
                    length: ld,
                });
            }
        }
        out
    }

    pub fn primitive_decompose(&self, m: i64, n: i64) -> Result<(u32, PrimitiveDirection)> {
        PrimitiveDirection::decompose(m, n)
    }

    /// Completes the direction's `delta` to a basis `(delta, delta')` of the
    /// dual lattice and returns the dual basis `(gamma, gamma')` of the lattice.
    pub fn dual_pair(&self, dir: PrimitiveDirection) -> DualPair {
        let (m0, n0) = (dir.m0 as i64, dir.n0 as i64);
        let (u, v) = smallest_bezout(m0, n0);
        // delta = (-n0, m0), delta' = (-u, -v) in dual coordinates, det = m0 u + n0 v = 1.
        let delta_prime_idx = (-u, -v);
        let gamma_idx = (-v, u);
        let gamma_prime_idx = (-m0, -n0);
        DualPair {
            delta: self.dual_point(-n0, m0),
            delta_prime: self.dual_point(delta_prime_idx.0, delta_prime_idx.1),
            gamma: self.point(gamma_idx.0, gamma_idx.1),
            gamma_prime: self.point(gamma_prime_idx.0, gamma_prime_idx.1),
            delta_prime_index: delta_prime_idx,
            gamma_index: gamma_idx,
            gamma_prime_index: gamma_prime_idx,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthViolation {
    pub d: (i64, i64),
    pub d_prime: (i64, i64),
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualPair {
    pub delta: Vec2,
    pub delta_prime: Vec2,
    pub gamma: Vec2,
    pub gamma_prime: Vec2,
    pub delta_prime_index: (i64, i64),
    pub gamma_index: (i64, i64),
    pub gamma_prime_index: (i64, i64),
}

/// Coprime `(m0, n0)` with the first nonzero entry positive. The lattice
/// vector is `d0 = m0 e1 + n0 e2`; the orthogonal dual ray is spanned by
/// `delta = -n0 e1* + m0 e2*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrimitiveDirection {
    pub m0: i32,
    pub n0: i32,
}

impl PrimitiveDirection {
    pub fn new(m0: i32, n0: i32) -> Result<Self> {
        if (m0, n0) == (0, 0) {
            return Err(Error::ZeroVector);
        }
        if gcd(m0.unsigned_abs() as u64, n0.unsigned_abs() as u64) != 1 {
            return Err(Error::InvalidInput(format!(
                "({m0}, {n0}) is not a primitive vector"
            )));
        }
        if !is_canonical(m0 as i64, n0 as i64) {
            return Err(Error::InvalidInput(format!(
                "({m0}, {n0}) is not in canonical sign"
            )));
        }
        Ok(Self { m0, n0 })
    }

    /// Splits `(m, n)` into `k >= 1` and a canonical primitive direction with
    /// `(m, n) = +-k (m0, n0)`.
    pub fn decompose(m: i64, n: i64) -> Result<(u32, Self)> {
        if (m, n) == (0, 0) {
            return Err(Error::ZeroVector);
        }
        let k = gcd(m.unsigned_abs(), n.unsigned_abs()) as i64;
        let (mut m0, mut n0) = (m / k, n / k);
        if !is_canonical(m0, n0) {
            m0 = -m0;
            n0 = -n0;
        }
        Ok((
            k as u32,
            Self {
                m0: m0 as i32,
                n0: n0 as i32,
            },
        ))
    }

    /// The canonical direction of the dual ray through `(p, q) != 0`, i.e. the
    /// direction whose `delta` is proportional to `(p, q)`.
    pub fn of_dual_index(p: i64, q: i64) -> Result<(i64, Self)> {
        if (p, q) == (0, 0) {
            return Err(Error::ZeroVector);
        }
        let g = gcd(p.unsigned_abs(), q.unsigned_abs()) as i64;
        let (p0, q0) = (p / g, q / g);
        // delta index (-n0, m0) = (p0, q0)
        let (mut m0, mut n0) = (q0, -p0);
        let mut mult = g;
        if !is_canonical(m0, n0) {
            m0 = -m0;
            n0 = -n0;
            mult = -g;
        }
        Ok((
            mult,
            Self {
                m0: m0 as i32,
                n0: n0 as i32,
            },
        ))
    }

    pub fn d0(&self, lat: &Lattice) -> Vec2 {
        lat.point(self.m0 as i64, self.n0 as i64)
    }

    pub fn delta(&self, lat: &Lattice) -> Vec2 {
        lat.dual_point(-(self.n0 as i64), self.m0 as i64)
    }

    /// Dual-lattice coordinates of `delta`.
    pub fn delta_index(&self) -> (i64, i64) {
        (-(self.n0 as i64), self.m0 as i64)
    }

    /// Dual-lattice coordinates of `p delta`.
    pub fn ray_index(&self, p: i64) -> (i64, i64) {
        let (a, b) = self.delta_index();
        (p * a, p * b)
    }

    /// Lattice coordinates of `k d0`.
    pub fn multiple(&self, k: i64) -> (i64, i64) {
        (k * self.m0 as i64, k * self.n0 as i64)
    }

    /// Integer pairing `beta . d0` for a dual index.
    pub fn pair_with(&self, (p, q): (i64, i64)) -> i64 {
        p * self.m0 as i64 + q * self.n0 as i64
    }

    /// Canonical directions with `|m0|, |n0| <= cutoff`. These are exactly the
    /// rays needed to cover all dual indices with `|p|, |q| <= cutoff`.
    pub fn all_within(cutoff: i32) -> Vec<Self> {
        let mut out = Vec::new();
        for m0 in 0..=cutoff {
            for n0 in -cutoff..=cutoff {
                if let Ok(d) = Self::new(m0, n0) {
                    out.push(d);
                }
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for PrimitiveDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m0, self.n0)
    }
}

pub fn is_canonical(m: i64, n: i64) -> bool {
    m > 0 || (m == 0 && n > 0)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid: `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
pub fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_x, mut x) = (1i64, 0i64);
    let (mut old_y, mut y) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_x, x) = (x, old_x - q * x);
        (old_y, y) = (y, old_y - q * y);
    }
    if old_r < 0 {
        (-old_r, -old_x, -old_y)
    } else {
        (old_r, old_x, old_y)
    }
}

/// Solution of `m0 u + n0 v = 1` minimizing `|u| + |v|`; ties go to the
/// lexicographically largest `(u, v)`.
fn smallest_bezout(m0: i64, n0: i64) -> (i64, i64) {
    let (g, u0, v0) = extended_gcd(m0, n0);
    debug_assert_eq!(g, 1);
    // general solution (u0 + t n0, v0 - t m0)
    let span = u0.abs() + v0.abs() + 1;
    (-span..=span)
        .map(|t| (u0 + t * n0, v0 - t * m0))
        .min_by(|a, b| {
            (a.0.abs() + a.1.abs())
                .cmp(&(b.0.abs() + b.1.abs()))
                .then(b.cmp(a))
        })
        .expect("nonempty range")
}
