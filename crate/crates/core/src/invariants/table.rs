use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::cov::{ChangeOfVariables, DEFAULT_COV_POINTS};
use super::directional::{i_directional, j1_directional, AmplitudeSum};
use super::raw::{i_raw, j_raw};
use crate::error::{Error, Result};
use crate::fields::{check_field_condition, directional, MagneticPotential, ScalarField};
use crate::lattice::PrimitiveDirection;

/// Cosines below this magnitude mark an entry as ill-conditioned.
pub const COSINE_FLOOR: f64 = 1e-3;

/// Relative `|X_+ - X_-|` above which the table carries a warning.
const AMPLITUDE_ASYMMETRY_WARN: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TableConfig {
    pub kmax: u32,
    pub cov_points: usize,
    /// Grid size of the raw 2-D quadrature used by spot checks.
    pub raw_grid: usize,
    /// Number of entries re-computed by raw quadrature.
    pub spot_checks: usize,
    /// Spot checks are drawn from entries with `k` at most this value.
    pub spot_check_kmax: u32,
    pub cosine_floor: f64,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            kmax: 16,
            cov_points: DEFAULT_COV_POINTS,
            raw_grid: 128,
            spot_checks: 0,
            spot_check_kmax: 3,
            cosine_floor: COSINE_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantEntry {
    pub i_sum: f64,
    pub j_sum: f64,
    pub j1_sum: f64,
    pub j2_sum: f64,
    pub c0: f64,
    pub cosine: f64,
    pub ill_conditioned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpotCheck {
    pub dir: PrimitiveDirection,
    pub k: u32,
    pub i_deviation: f64,
    pub j_deviation: f64,
    /// Largest imaginary part of the raw `±d` sums.
    pub imaginary: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantTable {
    pub entries: BTreeMap<(PrimitiveDirection, u32), InvariantEntry>,
    pub kmax: u32,
    pub cov_points: usize,
    pub spot_checks: Vec<SpotCheck>,
    pub warnings: Vec<String>,
}

impl InvariantTable {
    pub fn get(&self, dir: PrimitiveDirection, k: u32) -> Option<&InvariantEntry> {
        self.entries.get(&(dir, k))
    }

    pub fn directions(&self) -> Vec<PrimitiveDirection> {
        let mut dirs: Vec<_> = self.entries.keys().map(|(d, _)| *d).collect();
        dirs.dedup();
        dirs
    }

    pub fn flagged(&self) -> Vec<(PrimitiveDirection, u32)> {
        self.entries
            .iter()
            .filter(|(_, e)| e.ill_conditioned)
            .map(|(key, _)| *key)
            .collect()
    }
}

/// Invariant sums for every direction and `1 <= k <= kmax`, computed by the
/// directional formulas.
pub fn build_invariant_table(
    a: &MagneticPotential,
    v: &ScalarField,
    directions: &[PrimitiveDirection],
    config: &TableConfig,
) -> Result<InvariantTable> {
    if v.mean() != 0.0 {
        return Err(Error::NonzeroMeanPotential { mean: v.mean() });
    }
    let lat = a.lattice();
    let c0 = lat.area();
    let mut warnings = Vec::new();
    let flux_error = a.b0() * c0 - 2.0 * std::f64::consts::PI;
    if flux_error.abs() > 1e-9 {
        warnings.push(format!("flux differs from 2 pi by {flux_error:e}"));
    }
    let margin = check_field_condition(a.field());
    if margin <= 0.0 {
        warnings.push(format!("field condition violated, margin {margin:e}"));
    }

    let covs: Vec<ChangeOfVariables> = directions
        .par_iter()
        .map(|&dir| ChangeOfVariables::build(&directional(a.field(), dir), config.cov_points))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, u32)> = (0..directions.len())
        .flat_map(|i| (1..=config.kmax).map(move |k| (i, k)))
        .collect();
    let entries: Vec<((PrimitiveDirection, u32), (InvariantEntry, f64))> = jobs
        .par_iter()
        .map(|&(i, k)| {
            let dir = directions[i];
            let cov = &covs[i];
            let cosine = (k as f64 * a.a0().dot(&dir.d0(lat))).cos();
            let v_dir = directional(v, dir);
            let i_sum = i_directional(cov, k, cosine, c0);
            let j1_sum = j1_directional(&v_dir, cov, k, cosine, c0);
            let amp = AmplitudeSum::compute(a, dir, k, config.cov_points);
            let j2_sum = amp.sum_from_cosine(cosine);
            let entry = InvariantEntry {
                i_sum,
                j_sum: j1_sum + j2_sum,
                j1_sum,
                j2_sum,
                c0,
                cosine,
                ill_conditioned: cosine.abs() < config.cosine_floor,
            };
            ((dir, k), (entry, amp.asymmetry() / amp.x_plus.norm().max(1.0)))
        })
        .collect();
    let worst_asymmetry = entries.iter().map(|(_, (_, a))| *a).fold(0.0, f64::max);
    if worst_asymmetry > AMPLITUDE_ASYMMETRY_WARN {
        warnings.push(format!("amplitude sums differ between d and -d by {worst_asymmetry:e}"));
    }
    let entries: BTreeMap<_, _> = entries.into_iter().map(|(key, (e, _))| (key, e)).collect();
    for ((dir, k), e) in &entries {
        if e.ill_conditioned {
            warnings.push(format!("direction {dir} k={k}: |cos| = {:e} below floor", e.cosine.abs()));
        }
    }

    let candidates: Vec<(PrimitiveDirection, u32)> = entries
        .keys()
        .filter(|(_, k)| *k <= config.spot_check_kmax)
        .copied()
        .collect();
    let picks: Vec<(PrimitiveDirection, u32)> = if config.spot_checks == 0 || candidates.is_empty() {
        Vec::new()
    } else {
        let n = config.spot_checks.min(candidates.len());
        (0..n).map(|i| candidates[i * candidates.len() / n]).collect()
    };
    let spot_checks = picks
        .iter()
        .map(|&(dir, k)| {
            let (m, n) = dir.multiple(k as i64);
            let d = lat.point(m, n);
            let isum = i_raw(a, &d, config.raw_grid) + i_raw(a, &(-d), config.raw_grid);
            let jsum = j_raw(a, v, &d, config.raw_grid)?.total() + j_raw(a, v, &(-d), config.raw_grid)?.total();
            let e = entries[&(dir, k)];
            Ok(SpotCheck {
                dir,
                k,
                i_deviation: (isum.re - e.i_sum).abs(),
                j_deviation: (jsum.re - e.j_sum).abs(),
                imaginary: isum.im.abs().max(jsum.im.abs()),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(InvariantTable {
        entries,
        kmax: config.kmax,
        cov_points: config.cov_points,
        spot_checks,
        warnings,
    })
}
