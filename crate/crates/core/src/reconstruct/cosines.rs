use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, PrimitiveDirection, Vec2};

/// Known values of `cos(k a0.d0)` per direction and multiple.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineData {
    pub values: BTreeMap<(PrimitiveDirection, u32), f64>,
    pub floor: f64,
}

impl CosineData {
    pub fn new(values: BTreeMap<(PrimitiveDirection, u32), f64>, floor: f64) -> Result<Self> {
        if let Some(((dir, k), v)) = values.iter().find(|(_, v)| !(v.abs() <= 1.0)) {
            return Err(Error::InvalidInput(format!(
                "cosine for direction {dir} k={k} is {v}, outside [-1, 1]"
            )));
        }
        Ok(Self { values, floor })
    }

    /// Cosines of a known `a0`.
    pub fn from_a0(a0: &Vec2, lat: &Lattice, dirs: &[PrimitiveDirection], kmax: u32, floor: f64) -> Self {
        let values = dirs
            .iter()
            .flat_map(|&dir| {
                let angle = a0.dot(&dir.d0(lat));
                (1..=kmax).map(move |k| ((dir, k), (k as f64 * angle).cos()))
            })
            .collect();
        Self { values, floor }
    }

    /// The cosine for `(dir, k)`, rejecting ill-conditioned entries. A missing
    /// entry is reported as ill-conditioned with a NaN cosine.
    pub fn get(&self, dir: PrimitiveDirection, k: u32) -> Result<f64> {
        let c = self.values.get(&(dir, k)).copied().unwrap_or(f64::NAN);
        if !(c.abs() >= self.floor) {
            return Err(Error::IllConditioned {
                dir,
                k,
                cosine: c,
                floor: self.floor,
            });
        }
        Ok(c)
    }

    /// Largest violation of `cos(k a) = T_k(cos a)` over all entries.
    pub fn chebyshev_defect(&self) -> f64 {
        self.values
            .iter()
            .filter_map(|(&(dir, k), &v)| {
                let c1 = *self.values.get(&(dir, 1))?;
                Some((v - chebyshev(k, c1)).abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn check_chebyshev(&self, tol: f64) -> Result<()> {
        let defect = self.chebyshev_defect();
        if defect > tol {
            return Err(Error::InvalidInput(format!(
                "cosine table is not of the form cos(k a): Chebyshev defect {defect:e}"
            )));
        }
        Ok(())
    }
}

/// Chebyshev polynomial `T_k(x)` by the three-term recurrence.
pub fn chebyshev(k: u32, x: f64) -> f64 {
    let (mut t0, mut t1) = (1.0, x);
    if k == 0 {
        return t0;
    }
    for _ in 1..k {
        (t0, t1) = (t1, 2.0 * x * t1 - t0);
    }
    t1
}
