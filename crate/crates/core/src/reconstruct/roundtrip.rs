use std::collections::BTreeSet;

use serde::Serialize;

use super::cosines::CosineData;
use super::fields::{recover_fields, DirectionDiagnostics, RecoveryConfig};
use super::gauge::{recover_gauge_class, GaugeClass};
use crate::error::Result;
use crate::fields::{DualIndex, MagneticPotential, ScalarField};
use crate::hypotheses::{HypothesisConfig, HypothesisReport};
use crate::invariants::{build_invariant_table, InvariantTable, TableConfig, COSINE_FLOOR, DEFAULT_COV_POINTS};
use crate::lattice::{PrimitiveDirection, Vec2};
use crate::quad::centered_grid;

/// Default number of `k` per direction: `max(16, 4 cutoff)`.
pub fn default_kmax(cutoff: i32) -> u32 {
    (4 * cutoff.max(0) as u32).max(16)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripConfig {
    pub cutoff: i32,
    pub kmax: u32,
    pub grid: usize,
    pub cosine_floor: f64,
    /// Recover the cosines from the table and `B` instead of reading them
    /// from `a0`.
    pub recover_gauge: bool,
    /// Radius for the reported gauge-class cosines.
    pub gauge_radius: f64,
    pub hypotheses: HypothesisConfig,
}

impl RoundtripConfig {
    pub fn new(cutoff: i32) -> Self {
        Self {
            cutoff,
            kmax: default_kmax(cutoff),
            grid: DEFAULT_COV_POINTS,
            cosine_floor: COSINE_FLOOR,
            recover_gauge: false,
            gauge_radius: 4.0,
            hypotheses: HypothesisConfig::default(),
        }
    }

    pub fn table_config(&self) -> TableConfig {
        TableConfig {
            kmax: self.kmax,
            cov_points: self.grid,
            cosine_floor: self.cosine_floor,
            ..TableConfig::default()
        }
    }

    pub fn recovery_config(&self) -> RecoveryConfig {
        RecoveryConfig {
            cutoff: self.cutoff,
            kmax: self.kmax,
            grid: self.grid,
        }
    }
}

/// Coefficient-space comparison of a recovered field with the truth,
/// ignoring the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldError {
    /// `||c_rec - c_true||_2 / ||c_true||_2`, or the absolute norm when the
    /// true field has no modes.
    pub relative_l2: f64,
    pub max_abs: f64,
    /// Sup-norm of the difference on a 64 x 64 grid of the cell.
    pub sup_grid: f64,
}

impl FieldError {
    pub fn compare(recovered: &ScalarField, truth: &ScalarField) -> Self {
        let keys: BTreeSet<DualIndex> = recovered
            .coeffs()
            .keys()
            .chain(truth.coeffs().keys())
            .filter(|&&k| k != (0, 0))
            .copied()
            .collect();
        let mut diff2 = 0.0;
        let mut norm2 = 0.0;
        let mut max_abs: f64 = 0.0;
        for &k in &keys {
            let d = recovered.coeff(k) - truth.coeff(k);
            diff2 += d * d;
            norm2 += truth.coeff(k).powi(2);
            max_abs = max_abs.max(d.abs());
        }
        let relative_l2 = if norm2 > 0.0 { (diff2 / norm2).sqrt() } else { diff2.sqrt() };
        let (rm, tm) = (recovered.mean(), truth.mean());
        let sup_grid = centered_grid(64)
            .flat_map(|t| centered_grid(64).map(move |s| (s, t)))
            .map(|(s, t)| ((recovered.eval_coords(s, t) - rm) - (truth.eval_coords(s, t) - tm)).abs())
            .fold(0.0, f64::max);
        Self {
            relative_l2,
            max_abs,
            sup_grid,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub b: ScalarField,
    pub v: ScalarField,
    pub diagnostics: Vec<DirectionDiagnostics>,
    pub b_error: FieldError,
    pub v_error: FieldError,
    pub gauge: Option<GaugeClass>,
    /// Largest `|cos_rec(a0.d) - cos(a0.d)|` over `|d| <= gauge_radius`.
    pub gauge_error: Option<f64>,
    pub hypotheses: HypothesisReport,
    /// Set when `s'` has not decayed below `1e-10` by `kmax` in some
    /// direction, so that truncation rather than data limits the accuracy.
    pub truncation_limited: bool,
    pub warnings: Vec<String>,
}

/// Forward table, optional gauge-class recovery, then recovery of `B` and `V`
/// with a comparison against the inputs.
pub fn roundtrip(
    b: &ScalarField,
    v: &ScalarField,
    a0: Vec2,
    config: &RoundtripConfig,
) -> Result<(InvariantTable, ReconstructionReport)> {
    let hypotheses = HypothesisReport::check(b, &a0, &config.hypotheses).into_result()?;
    let lat = b.lattice();
    let a = MagneticPotential::from_field(b, a0)?;
    let dirs = PrimitiveDirection::all_within(config.cutoff);
    let table = build_invariant_table(&a, v, &dirs, &config.table_config())?;
    let mut warnings = table.warnings.clone();

    let (cosines, gauge, gauge_error) = if config.recover_gauge {
        let class = recover_gauge_class(&table, b, config.grid)?;
        if !class.relative_sign_resolved {
            warnings.push(
                "relative orientation of the basis angles not fixed by the data; principal branch reported".into(),
            );
        }
        let err = class
            .cosines_within(lat, config.gauge_radius)
            .into_iter()
            .map(|((m, n), c)| (c - a0.dot(&lat.point(m, n)).cos()).abs())
            .fold(0.0, f64::max);
        (class.cosine_data(&dirs, config.kmax, config.cosine_floor), Some(class), Some(err))
    } else {
        (CosineData::from_a0(&a0, lat, &dirs, config.kmax, config.cosine_floor), None, None)
    };

    let recovered = recover_fields(&table, &cosines, lat, &config.recovery_config())?;
    let truncation_limited = recovered.diagnostics.iter().any(|d| d.sprime_tail > 1e-10);
    if truncation_limited {
        warnings.push(format!("s' not resolved by kmax = {}", config.kmax));
    }
    let report = ReconstructionReport {
        b_error: FieldError::compare(&recovered.b, b),
        v_error: FieldError::compare(&recovered.v, v),
        b: recovered.b,
        v: recovered.v,
        diagnostics: recovered.diagnostics,
        gauge,
        gauge_error,
        hypotheses,
        truncation_limited,
        warnings,
    };
    Ok((table, report))
}
