//! Recovery of `B` and `V` from invariant sums and known cosines.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::cosines::CosineData;
use crate::error::{Error, Result};
use crate::fields::{directional, DirectionalData, DualIndex, MagneticPotential, ScalarField};
use crate::invariants::{AmplitudeSum, InvariantTable};
use crate::lattice::{Lattice, PrimitiveDirection, Vec2};
use crate::quad::centered_grid;
use crate::roots::invert_increasing;

/// Tolerance on `|X_+ - X_-|` relative to `max(1, |X_+|)`.
const ASYMMETRY_TOL: f64 = 1e-8;

/// `s'(y) = 1 + sum_k 2 c_k cos(2 pi k y)`, with `coeffs[k - 1] = c_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SprimeSeries {
    pub dir: PrimitiveDirection,
    pub coeffs: Vec<f64>,
}

impl SprimeSeries {
    pub fn eval(&self, y: f64) -> f64 {
        1.0 + self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| 2.0 * c * (2.0 * PI * (i + 1) as f64 * y).cos())
            .sum::<f64>()
    }

    /// Periodic remainder `e(y) = s(y) - y`, the antiderivative of `s' - 1`
    /// vanishing at `y = 0`.
    pub fn remainder(&self, y: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = (i + 1) as f64;
                c / (PI * k) * (2.0 * PI * k * y).sin()
            })
            .sum()
    }

    pub fn s_of_y(&self, y: f64) -> f64 {
        y + self.remainder(y)
    }

    pub fn samples(&self, n: usize) -> Vec<f64> {
        centered_grid(n).map(|y| self.eval(y)).collect()
    }

    pub fn min_value(&self, n: usize) -> f64 {
        centered_grid(n).map(|y| self.eval(y)).fold(f64::INFINITY, f64::min)
    }

    fn remainder_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs() / (PI * (i + 1) as f64))
            .sum()
    }

    /// `y(s)`, the inverse of `s(y)`.
    pub fn y_of_s(&self, s: f64) -> Option<f64> {
        let r = self.remainder_bound() + 1e-12;
        invert_increasing(|y| (self.s_of_y(y), self.eval(y)), s, s - r, s + r, 1e-14)
    }
}

/// `c_k = I_sum(k) / (2 c0 cos(k a0.d0))` for `k = 1..=i_values.len()`.
pub fn recover_sprime(
    dir: PrimitiveDirection,
    i_values: &[f64],
    cosines: &CosineData,
    c0: f64,
    check_points: usize,
) -> Result<SprimeSeries> {
    let coeffs = i_values
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let cosine = cosines.get(dir, (i + 1) as u32)?;
            Ok(value / (2.0 * c0 * cosine))
        })
        .collect::<Result<Vec<_>>>()?;
    let series = SprimeSeries { dir, coeffs };
    let min = series.min_value(check_points);
    if !(min > 0.0) {
        return Err(Error::NonMonotone { dir, min_derivative: min });
    }
    Ok(series)
}

/// Ray coefficients `p = 1..=pmax` of a real even 1-periodic function from
/// `n` samples on the centered grid.
fn cosine_coefficients(samples: &[f64], pmax: usize) -> Vec<f64> {
    let n = samples.len() as f64;
    (1..=pmax)
        .map(|p| {
            centered_grid(samples.len())
                .zip(samples)
                .map(|(s, v)| v * (2.0 * PI * p as f64 * s).cos())
                .sum::<f64>()
                / n
        })
        .collect()
}

/// Directional field `B_delta = b0 (1 / s'(y(s)) - 1)` sampled on `n` points
/// and analysed into `pmax` ray coefficients.
pub fn recover_directional_field(series: &SprimeSeries, b0: f64, n: usize, pmax: usize) -> Result<DirectionalData> {
    let samples = centered_grid(n)
        .map(|s| {
            let y = series.y_of_s(s).ok_or_else(|| Error::NonMonotone {
                dir: series.dir,
                min_derivative: series.min_value(4 * n),
            })?;
            Ok(b0 * (1.0 / series.eval(y) - 1.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DirectionalData::new(series.dir, b0, cosine_coefficients(&samples, pmax)))
}

/// Places each ray at `p delta`, `-p delta` for every `p` within `cutoff` and
/// sets the mean to `mean`.
pub fn assemble_field(lat: &Lattice, cutoff: i32, mean: f64, rays: &[DirectionalData]) -> Result<ScalarField> {
    let given: Vec<PrimitiveDirection> = rays.iter().map(|r| r.dir).collect();
    let missing: Vec<PrimitiveDirection> = PrimitiveDirection::all_within(cutoff)
        .into_iter()
        .filter(|d| !given.contains(d))
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteCoverage { missing });
    }
    let mut coeffs: BTreeMap<DualIndex, f64> = BTreeMap::new();
    coeffs.insert((0, 0), mean);
    for ray in rays {
        for p in 1.. {
            let (a, b) = ray.dir.ray_index(p);
            if a.abs() > cutoff as i64 || b.abs() > cutoff as i64 {
                break;
            }
            let c = ray.coeff(p);
            for idx in [(a as i32, b as i32), (-a as i32, -b as i32)] {
                let prev = coeffs.insert(idx, c);
                assert!(prev.is_none(), "two rays claim the dual index {idx:?}");
            }
        }
    }
    ScalarField::new(lat.clone(), coeffs, false)
}

/// Per-direction conditioning and consistency figures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionDiagnostics {
    pub dir: PrimitiveDirection,
    pub min_abs_cosine: f64,
    pub condition: f64,
    pub min_sprime: f64,
    /// `|c_kmax|`, the last recovered cosine coefficient of `s'`.
    pub sprime_tail: f64,
    /// Largest `|X_+ - X_-|` of the amplitude sums used for `V`.
    pub amplitude_asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredFields {
    pub b: ScalarField,
    pub v: ScalarField,
    pub sprime: Vec<SprimeSeries>,
    pub diagnostics: Vec<DirectionDiagnostics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryConfig {
    pub cutoff: i32,
    pub kmax: u32,
    pub grid: usize,
}

fn table_values<F>(table: &InvariantTable, dir: PrimitiveDirection, kmax: u32, pick: F) -> Result<Vec<f64>>
where
    F: Fn(&crate::invariants::InvariantEntry) -> f64,
{
    (1..=kmax)
        .map(|k| table.get(dir, k).map(&pick).ok_or(Error::MissingEntry { dir, k }))
        .collect()
}

/// Recovers `B` from the `I` sums.
pub fn recover_b(
    table: &InvariantTable,
    cosines: &CosineData,
    lat: &Lattice,
    config: &RecoveryConfig,
) -> Result<(ScalarField, Vec<SprimeSeries>)> {
    let b0 = lat.unit_flux_field();
    let c0 = lat.area();
    let dirs = PrimitiveDirection::all_within(config.cutoff);
    let per_dir: Vec<(SprimeSeries, DirectionalData)> = dirs
        .par_iter()
        .map(|&dir| {
            let values = table_values(table, dir, config.kmax, |e| e.i_sum)?;
            let series = recover_sprime(dir, &values, cosines, c0, 4 * config.grid)?;
            let ray = recover_directional_field(&series, b0, config.grid, config.cutoff as usize)?;
            Ok((series, ray))
        })
        .collect::<Result<_>>()?;
    let (sprime, rays): (Vec<_>, Vec<_>) = per_dir.into_iter().unzip();
    Ok((assemble_field(lat, config.cutoff, b0, &rays)?, sprime))
}

/// Ray of `V` along `dir` from the `J` sums, given the recovered potential.
pub fn recover_v_ray(
    a: &MagneticPotential,
    dir: PrimitiveDirection,
    j_values: &[f64],
    cosines: &CosineData,
    grid: usize,
    pmax: usize,
) -> Result<(DirectionalData, f64)> {
    let c0 = a.lattice().area();
    let b_dir = directional(a.field(), dir);
    let mut asymmetry: f64 = 0.0;
    let w_coeffs = j_values
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let k = (i + 1) as u32;
            let cosine = cosines.get(dir, k)?;
            let amp = AmplitudeSum::compute(a, dir, k, grid);
            let defect = amp.asymmetry();
            if defect > ASYMMETRY_TOL * amp.x_plus.norm().max(1.0) {
                return Err(Error::AmplitudeAsymmetry { dir, k, defect });
            }
            asymmetry = asymmetry.max(defect);
            Ok((j - amp.sum_from_cosine(cosine)) / (2.0 * c0 * cosine))
        })
        .collect::<Result<Vec<_>>>()?;
    let w = |y: f64| -> f64 {
        w_coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| 2.0 * c * (2.0 * PI * (i + 1) as f64 * y).cos())
            .sum()
    };
    let samples: Vec<f64> = centered_grid(grid)
        .map(|s| {
            let y = s + b_dir.potential(s);
            w(y) * (1.0 + b_dir.potential_derivative(s))
        })
        .collect();
    Ok((DirectionalData::new(dir, 0.0, cosine_coefficients(&samples, pmax)), asymmetry))
}

/// Recovers `V` (zero mean) from the `J` sums and a recovered `B`.
pub fn recover_v(
    table: &InvariantTable,
    cosines: &CosineData,
    b: &ScalarField,
    config: &RecoveryConfig,
) -> Result<(ScalarField, Vec<f64>)> {
    // J_2 depends on a0 only through the cosines, so any a0 will do.
    let a = MagneticPotential::from_field(b, Vec2::zeros())?;
    let dirs = PrimitiveDirection::all_within(config.cutoff);
    let per_dir: Vec<(DirectionalData, f64)> = dirs
        .par_iter()
        .map(|&dir| {
            let values = table_values(table, dir, config.kmax, |e| e.j_sum)?;
            recover_v_ray(&a, dir, &values, cosines, config.grid, config.cutoff as usize)
        })
        .collect::<Result<_>>()?;
    let (rays, asym): (Vec<_>, Vec<_>) = per_dir.into_iter().unzip();
    Ok((assemble_field(b.lattice(), config.cutoff, 0.0, &rays)?, asym))
}

/// `B` then `V` from the table and the cosines.
pub fn recover_fields(
    table: &InvariantTable,
    cosines: &CosineData,
    lat: &Lattice,
    config: &RecoveryConfig,
) -> Result<RecoveredFields> {
    let (b, sprime) = recover_b(table, cosines, lat, config)?;
    let (v, asym) = recover_v(table, cosines, &b, config)?;
    let diagnostics = sprime
        .iter()
        .zip(asym)
        .map(|(series, amplitude_asymmetry)| {
            let min_abs_cosine = (1..=config.kmax)
                .filter_map(|k| cosines.values.get(&(series.dir, k)))
                .map(|c| c.abs())
                .fold(f64::INFINITY, f64::min);
            DirectionDiagnostics {
                dir: series.dir,
                min_abs_cosine,
                condition: 1.0 / min_abs_cosine,
                min_sprime: series.min_value(4 * config.grid),
                sprime_tail: series.coeffs.last().map_or(0.0, |c| c.abs()),
                amplitude_asymmetry,
            }
        })
        .collect();
    Ok(RecoveredFields { b, v, sprime, diagnostics })
}
