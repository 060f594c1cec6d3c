//! Problem definition files.

use serde::{Deserialize, Serialize};
use tsi_core::hypotheses::HypothesisConfig;
use tsi_core::invariants::{TableConfig, COSINE_FLOOR, DEFAULT_COV_POINTS};
use tsi_core::reconstruct::{default_kmax, RoundtripConfig};
use tsi_core::{Lattice, MagneticPotential, PrimitiveDirection, Result, ScalarField, Vec2};

/// A coefficient `[p, q, value]` at the dual index `p e1* + q e2*`.
pub type Mode = (i32, i32, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub e1: [f64; 2],
    pub e2: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    /// Overwrite the mean with one flux quantum per cell.
    #[serde(default)]
    pub normalize_flux: bool,
    #[serde(default)]
    pub modes: Vec<Mode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigSpec {
    pub kmax: Option<u32>,
    pub cutoff: i32,
    pub directions: Option<Vec<[i32; 2]>>,
    pub cov_points: usize,
    pub raw_grid: usize,
    pub spot_checks: usize,
    pub cosine_floor: f64,
    pub length_radius: f64,
    pub cosine_radius: f64,
    pub gauge_radius: f64,
    pub recover_gauge: bool,
    pub grid: usize,
    pub eigenvalues: usize,
    pub tolerance_b: f64,
    pub tolerance_v: f64,
    pub trace_grid: usize,
    pub trace_eigenvalues: usize,
    pub trace_width: f64,
    pub trace_t_max: f64,
    pub trace_samples: usize,
}

impl Default for ConfigSpec {
    fn default() -> Self {
        Self {
            kmax: None,
            cutoff: 2,
            directions: None,
            cov_points: DEFAULT_COV_POINTS,
            raw_grid: 128,
            spot_checks: 0,
            cosine_floor: COSINE_FLOOR,
            length_radius: 5.0,
            cosine_radius: 6.0,
            gauge_radius: 4.0,
            recover_gauge: false,
            grid: 64,
            eigenvalues: 10,
            tolerance_b: 1e-6,
            tolerance_v: 1e-4,
            trace_grid: 24,
            trace_eigenvalues: 200,
            trace_width: 0.05,
            trace_t_max: 3.0,
            trace_samples: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub lattice: LatticeSpec,
    pub magnetic_field: FieldSpec,
    #[serde(default)]
    pub electric_potential: FieldSpec,
    #[serde(default)]
    pub a0: [f64; 2],
    #[serde(default)]
    pub config: ConfigSpec,
}

impl ProblemSpec {
    pub fn lattice(&self) -> Result<Lattice> {
        let [a, b] = self.lattice.e1;
        let [c, d] = self.lattice.e2;
        Lattice::new(Vec2::new(a, b), Vec2::new(c, d))
    }

    pub fn magnetic_field(&self) -> Result<ScalarField> {
        let f = &self.magnetic_field;
        ScalarField::new(self.lattice()?, f.modes.iter().map(|&(p, q, v)| ((p, q), v)), f.normalize_flux)
    }

    pub fn electric_potential(&self) -> Result<ScalarField> {
        let f = &self.electric_potential;
        ScalarField::new(self.lattice()?, f.modes.iter().map(|&(p, q, v)| ((p, q), v)), f.normalize_flux)
    }

    pub fn a0(&self) -> Vec2 {
        Vec2::new(self.a0[0], self.a0[1])
    }

    pub fn potential(&self) -> Result<MagneticPotential> {
        MagneticPotential::from_field(&self.magnetic_field()?, self.a0())
    }

    pub fn kmax(&self) -> u32 {
        self.config.kmax.unwrap_or_else(|| default_kmax(self.config.cutoff))
    }

    pub fn directions(&self) -> Result<Vec<PrimitiveDirection>> {
        match &self.config.directions {
            Some(list) => list.iter().map(|&[m, n]| PrimitiveDirection::new(m, n)).collect(),
            None => Ok(PrimitiveDirection::all_within(self.config.cutoff)),
        }
    }

    pub fn hypothesis_config(&self) -> HypothesisConfig {
        HypothesisConfig {
            length_radius: self.config.length_radius,
            cosine_radius: self.config.cosine_radius,
            cosine_threshold: self.config.cosine_floor,
        }
    }

    pub fn table_config(&self) -> TableConfig {
        TableConfig {
            kmax: self.kmax(),
            cov_points: self.config.cov_points,
            raw_grid: self.config.raw_grid,
            spot_checks: self.config.spot_checks,
            cosine_floor: self.config.cosine_floor,
            ..TableConfig::default()
        }
    }

    pub fn roundtrip_config(&self) -> RoundtripConfig {
        RoundtripConfig {
            cutoff: self.config.cutoff,
            kmax: self.kmax(),
            grid: self.config.cov_points,
            cosine_floor: self.config.cosine_floor,
            recover_gauge: self.config.recover_gauge,
            gauge_radius: self.config.gauge_radius,
            hypotheses: self.hypothesis_config(),
        }
    }
}
