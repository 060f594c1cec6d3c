//! File formats: JSON documents for tables and reports, CSV for sampled curves.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tsi_core::invariants::{InvariantEntry, InvariantTable, SpotCheck};
use tsi_core::reconstruct::{CosineData, SprimeSeries};
use tsi_core::{PrimitiveDirection, ScalarField};

use crate::error::{CliError, CliResult};
use crate::problem::FieldSpec;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::parse(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

/// Destination for command outputs.
pub struct OutDir(pub PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> CliResult<Self> {
        fs::create_dir_all(path).map_err(|e| CliError::io(path, e))?;
        Ok(Self(path.to_path_buf()))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<PathBuf> {
        let path = self.0.join(name);
        fs::write(&path, to_json(value)).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn write_csv(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> CliResult<PathBuf> {
        let path = self.0.join(name);
        let io_err = |e: csv::Error| CliError::io(&path, e.into());
        let mut w = csv::Writer::from_path(&path).map_err(io_err)?;
        w.write_record(header).map_err(io_err)?;
        for row in rows {
            w.write_record(row.iter().map(|v| v.to_string())).map_err(io_err)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    pub m0: i32,
    pub n0: i32,
    pub k: u32,
    pub i_sum: f64,
    pub j_sum: f64,
    pub j1_sum: f64,
    pub j2_sum: f64,
    pub c0: f64,
    pub cosine: f64,
    pub ill_conditioned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpotCheckRow {
    pub m0: i32,
    pub n0: i32,
    pub k: u32,
    pub i_deviation: f64,
    pub j_deviation: f64,
    pub imaginary: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub kmax: u32,
    pub cov_points: usize,
    pub entries: Vec<TableRow>,
    #[serde(default)]
    pub spot_checks: Vec<SpotCheckRow>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl From<&InvariantTable> for TableFile {
    fn from(t: &InvariantTable) -> Self {
        Self {
            kmax: t.kmax,
            cov_points: t.cov_points,
            entries: t
                .entries
                .iter()
                .map(|(&(dir, k), e)| TableRow {
                    m0: dir.m0,
                    n0: dir.n0,
                    k,
                    i_sum: e.i_sum,
                    j_sum: e.j_sum,
                    j1_sum: e.j1_sum,
                    j2_sum: e.j2_sum,
                    c0: e.c0,
                    cosine: e.cosine,
                    ill_conditioned: e.ill_conditioned,
                })
                .collect(),
            spot_checks: t
                .spot_checks
                .iter()
                .map(|s| SpotCheckRow {
                    m0: s.dir.m0,
                    n0: s.dir.n0,
                    k: s.k,
                    i_deviation: s.i_deviation,
                    j_deviation: s.j_deviation,
                    imaginary: s.imaginary,
                })
                .collect(),
            warnings: t.warnings.clone(),
        }
    }
}

impl TableFile {
    pub fn to_table(&self) -> CliResult<InvariantTable> {
        let dir = |m0, n0, at: String| {
            PrimitiveDirection::new(m0, n0).map_err(|e| CliError::from(e).at(at))
        };
        let mut entries = BTreeMap::new();
        for (i, r) in self.entries.iter().enumerate() {
            let d = dir(r.m0, r.n0, format!("entries[{i}]"))?;
            let entry = InvariantEntry {
                i_sum: r.i_sum,
                j_sum: r.j_sum,
                j1_sum: r.j1_sum,
                j2_sum: r.j2_sum,
                c0: r.c0,
                cosine: r.cosine,
                ill_conditioned: r.ill_conditioned,
            };
            if entries.insert((d, r.k), entry).is_some() {
                return Err(CliError::usage(format!("duplicate entry for direction {d}, k = {}", r.k)).at(format!("entries[{i}]")));
            }
        }
        let spot_checks = self
            .spot_checks
            .iter()
            .enumerate()
            .map(|(i, s)| {
                Ok(SpotCheck {
                    dir: dir(s.m0, s.n0, format!("spot_checks[{i}]"))?,
                    k: s.k,
                    i_deviation: s.i_deviation,
                    j_deviation: s.j_deviation,
                    imaginary: s.imaginary,
                })
            })
            .collect::<CliResult<_>>()?;
        Ok(InvariantTable {
            entries,
            kmax: self.kmax,
            cov_points: self.cov_points,
            spot_checks,
            warnings: self.warnings.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosineRow {
    pub m0: i32,
    pub n0: i32,
    pub k: u32,
    pub cosine: f64,
}

/// `cos(k a0.d0)` per direction and multiple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosineFile {
    pub floor: f64,
    pub entries: Vec<CosineRow>,
}

impl From<&CosineData> for CosineFile {
    fn from(c: &CosineData) -> Self {
        Self {
            floor: c.floor,
            entries: c
                .values
                .iter()
                .map(|(&(dir, k), &cosine)| CosineRow {
                    m0: dir.m0,
                    n0: dir.n0,
                    k,
                    cosine,
                })
                .collect(),
        }
    }
}

impl CosineFile {
    pub fn to_data(&self) -> CliResult<CosineData> {
        let mut values = BTreeMap::new();
        for (i, r) in self.entries.iter().enumerate() {
            let at = format!("entries[{i}]");
            let d = PrimitiveDirection::new(r.m0, r.n0).map_err(|e| CliError::from(e).at(at.clone()))?;
            values.insert((d, r.k), r.cosine);
        }
        CosineData::new(values, self.floor).map_err(CliError::from)
    }
}

/// Field in the input coefficient format, ready to paste into a problem file.
pub fn field_spec(field: &ScalarField) -> FieldSpec {
    FieldSpec {
        normalize_flux: false,
        modes: field.coeffs().iter().map(|(&(p, q), &v)| (p, q, v)).collect(),
    }
}

/// Rows `s, t, x, y, value` on the `n x n` cell grid.
pub fn grid_rows(field: &ScalarField, n: usize) -> Vec<Vec<f64>> {
    let lat = field.lattice();
    let values = field.sample_grid(n);
    let coord = |j: usize| -0.5 + j as f64 / n as f64;
    (0..n * n)
        .map(|idx| {
            let (s, t) = (coord(idx / n), coord(idx % n));
            let x = lat.from_coords(s, t);
            vec![s, t, x[0], x[1], values[idx]]
        })
        .collect()
}

pub const GRID_HEADER: [&str; 5] = ["s", "t", "x", "y", "value"];

/// Rows `m0, n0, y, s'(y)` for every recovered direction.
pub fn sprime_rows(series: &[SprimeSeries], n: usize) -> Vec<Vec<f64>> {
    series
        .iter()
        .flat_map(|sp| {
            (0..n).map(move |j| {
                let y = -0.5 + j as f64 / n as f64;
                vec![sp.dir.m0 as f64, sp.dir.n0 as f64, y, sp.eval(y)]
            })
        })
        .collect()
}

pub const SPRIME_HEADER: [&str; 4] = ["m0", "n0", "y", "sprime"];
