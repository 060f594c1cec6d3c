//! Recovery of the extended gauge class `{cos(a0.d)}` from `I` sums and a
//! known field.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::cosines::CosineData;
use crate::error::{Error, Result};
use crate::fields::{directional, ScalarField};
use crate::invariants::{ChangeOfVariables, InvariantTable};
use crate::lattice::{Lattice, PrimitiveDirection};

/// Smallest usable first cosine coefficient of `s'`.
pub const FIRST_COEFFICIENT_FLOOR: f64 = 1e-6;
/// Largest tolerated excess of a measured cosine over 1.
pub const CLAMP_TOL: f64 = 1e-6;

/// Cosines of the two basis directions and the relative orientation of their
/// angles. Every `cos(a0.d)` follows from these.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeClass {
    pub basis: [PrimitiveDirection; 2],
    pub base_cosines: [f64; 2],
    pub first_coefficients: [f64; 2],
    /// `+1` when the two angles are taken on the same branch, `-1` otherwise.
    pub relative_sign: f64,
    /// False when no direction outside the basis carried enough data to fix
    /// `relative_sign`; the principal choice `+1` is then reported.
    pub relative_sign_resolved: bool,
    /// Mismatch on the direction used to fix the sign, if any.
    pub resolution_residual: Option<f64>,
}

impl GaugeClass {
    fn basis_coords(&self, m: i64, n: i64) -> (i64, i64) {
        let [d1, d2] = self.basis;
        let (m1, n1, m2, n2) = (d1.m0 as i64, d1.n0 as i64, d2.m0 as i64, d2.n0 as i64);
        let det = m1 * n2 - m2 * n1;
        // inverse of the unimodular matrix with columns d1, d2
        ((n2 * m - m2 * n) * det, (-n1 * m + m1 * n) * det)
    }

    fn unit(&self, sign: f64) -> [Complex64; 2] {
        let [c1, c2] = self.base_cosines;
        [
            Complex64::new(c1, (1.0 - c1 * c1).max(0.0).sqrt()),
            Complex64::new(c2, sign * (1.0 - c2 * c2).max(0.0).sqrt()),
        ]
    }

    fn propagate(&self, m: i64, n: i64, sign: f64) -> f64 {
        let (u, v) = self.basis_coords(m, n);
        let [z1, z2] = self.unit(sign);
        (z1.powi(u as i32) * z2.powi(v as i32)).re
    }

    /// `cos(a0.d)` for `d = m e1 + n e2`.
    pub fn cosine(&self, m: i64, n: i64) -> f64 {
        self.propagate(m, n, self.relative_sign)
    }

    /// All canonical lattice vectors with `0 < |d| <= radius`.
    pub fn cosines_within(&self, lat: &Lattice, radius: f64) -> BTreeMap<(i64, i64), f64> {
        lat.enumerate(radius)
            .into_iter()
            .map(|(m, n)| ((m, n), self.cosine(m, n)))
            .collect()
    }

    pub fn cosine_data(&self, dirs: &[PrimitiveDirection], kmax: u32, floor: f64) -> CosineData {
        let values = dirs
            .iter()
            .flat_map(|&dir| {
                (1..=kmax).map(move |k| {
                    let (m, n) = dir.multiple(k as i64);
                    ((dir, k), self.cosine(m, n))
                })
            })
            .collect();
        CosineData { values, floor }
    }
}

struct Measured {
    dir: PrimitiveDirection,
    first: f64,
    cosine: f64,
}

fn measure(table: &InvariantTable, b: &ScalarField, dir: PrimitiveDirection, cov_points: usize) -> Result<Option<Measured>> {
    let dd = directional(b, dir);
    if dd.is_zero() {
        return Ok(None);
    }
    let Some(entry) = table.get(dir, 1) else {
        return Ok(None);
    };
    let cov = ChangeOfVariables::build(&dd, cov_points)?;
    let first = cov.cosine_moment(1);
    if first.abs() < FIRST_COEFFICIENT_FLOOR {
        return Ok(None);
    }
    let raw = entry.i_sum / (2.0 * entry.c0 * first);
    if raw.abs() > 1.0 + CLAMP_TOL {
        return Err(Error::ClampViolation { dir, value: raw });
    }
    Ok(Some(Measured {
        dir,
        first,
        cosine: raw.clamp(-1.0, 1.0),
    }))
}

/// The extended gauge class from the `k = 1` entries of the table
/// and the known field `b`.
pub fn recover_gauge_class(table: &InvariantTable, b: &ScalarField, cov_points: usize) -> Result<GaugeClass> {
    let lat = b.lattice();
    let mut dirs = table.directions();
    dirs.sort_by(|x, y| x.d0(lat).norm().total_cmp(&y.d0(lat).norm()).then(x.cmp(y)));
    let mut measured = Vec::new();
    for dir in dirs {
        if let Some(m) = measure(table, b, dir, cov_points)? {
            measured.push(m);
        }
    }
    let det = |x: PrimitiveDirection, y: PrimitiveDirection| x.m0 as i64 * y.n0 as i64 - y.m0 as i64 * x.n0 as i64;
    let (i, j) = (0..measured.len())
        .flat_map(|i| (i + 1..measured.len()).map(move |j| (i, j)))
        .find(|&(i, j)| det(measured[i].dir, measured[j].dir).abs() == 1)
        .ok_or_else(|| Error::GenericityFailure {
            reason: format!(
                "need two directions forming a lattice basis with nonvanishing directional field and first coefficient above {FIRST_COEFFICIENT_FLOOR:e}; usable directions: [{}]",
                measured.iter().map(|m| m.dir.to_string()).collect::<Vec<_>>().join(", ")
            ),
        })?;

    let mut class = GaugeClass {
        basis: [measured[i].dir, measured[j].dir],
        base_cosines: [measured[i].cosine, measured[j].cosine],
        first_coefficients: [measured[i].first, measured[j].first],
        relative_sign: 1.0,
        relative_sign_resolved: false,
        resolution_residual: None,
    };
    let [c1, c2] = class.base_cosines;
    if (1.0 - c1 * c1) * (1.0 - c2 * c2) < 1e-24 {
        class.relative_sign_resolved = true;
        return Ok(class);
    }
    for (idx, m) in measured.iter().enumerate() {
        if idx == i || idx == j {
            continue;
        }
        let (mm, nn) = (m.dir.m0 as i64, m.dir.n0 as i64);
        let plus = class.propagate(mm, nn, 1.0);
        let minus = class.propagate(mm, nn, -1.0);
        if (plus - minus).abs() < 1e-4 {
            continue;
        }
        let (sign, residual) = if (plus - m.cosine).abs() <= (minus - m.cosine).abs() {
            (1.0, (plus - m.cosine).abs())
        } else {
            (-1.0, (minus - m.cosine).abs())
        };
        class.relative_sign = sign;
        class.relative_sign_resolved = true;
        class.resolution_residual = Some(residual);
        break;
    }
    Ok(class)
}
