//! Independent check: a finite-difference discretization of the magnetic
//! Hamiltonian with magnetic-periodic boundary conditions, and its lowest
//! eigenvalues.

pub mod assemble;
pub mod eigen;
pub mod matrix;

pub use assemble::{assemble, assemble_with_gauge, cocycle_defect, DiscretizedHamiltonian, GaugeFn};
pub use eigen::{dense_eigenvalues, lowest_eigenvalues, EigenOptions, EigenResult};
pub use matrix::CsrMatrix;

use crate::error::{Error, Result};
use crate::fields::{MagneticPotential, ScalarField};

/// Lowest `count` eigenvalues of the discretization on an `n x n` grid.
pub fn spectrum(a: &MagneticPotential, v: &ScalarField, n: usize, count: usize) -> Result<EigenResult> {
    let h = assemble(a, v, n)?;
    let v_min = v.sample_grid(n).into_iter().fold(f64::INFINITY, f64::min);
    let opts = EigenOptions {
        shift: Some(v_min - 1.0),
        ..EigenOptions::default()
    };
    lowest_eigenvalues(&h.matrix, count, &opts)
}

/// `max_{i < n} |lambda_i - mu_i|`.
pub fn isospectrality_check(first: &[f64], second: &[f64], n: usize) -> Result<f64> {
    if first.len() < n || second.len() < n {
        return Err(Error::InvalidInput(format!(
            "need {n} eigenvalues, got {} and {}",
            first.len(),
            second.len()
        )));
    }
    Ok(first.iter().zip(second).take(n).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Constant-field levels `b0 (2 j + 1)`, each simple for unit flux.
pub fn landau_levels(b0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| b0.abs() * (2 * j + 1) as f64).collect()
}

/// `sum_j cos(t sqrt(lambda_j)) exp(-(width sqrt(lambda_j))^2)` on `t_grid`.
///
/// The Gaussian cutoff smooths the truncation of the spectrum; `width` is the
/// time resolution of the result.
pub fn smoothed_wave_trace(spectrum: &[f64], t_grid: &[f64], width: f64) -> Vec<f64> {
    t_grid
        .iter()
        .map(|&t| {
            spectrum
                .iter()
                .map(|&l| {
                    let k = l.max(0.0).sqrt();
                    (t * k).cos() * (-(width * k).powi(2)).exp()
                })
                .sum()
        })
        .collect()
}

/// Positions of the local maxima of `|f|` on the interior of `t_grid`.
pub fn local_maxima(t_grid: &[f64], f: &[f64]) -> Vec<f64> {
    (1..f.len().saturating_sub(1))
        .filter(|&i| f[i].abs() > f[i - 1].abs() && f[i].abs() >= f[i + 1].abs())
        .map(|i| t_grid[i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Lattice, Vec2};

    #[test]
    fn trace_basics() {
        assert!(smoothed_wave_trace(&[], &[0.0, 1.0], 0.1).iter().all(|&x| x == 0.0));
        let spec = [1.0, 4.0, 9.0];
        let at0 = smoothed_wave_trace(&spec, &[0.0], 0.2)[0];
        let g: f64 = spec.iter().map(|l: &f64| (-(0.04 * l)).exp()).sum();
        assert!((at0 - g).abs() < 1e-14);
    }

    #[test]
    fn coarse_landau_levels() {
        let lat = Lattice::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap();
        let b = ScalarField::constant(lat.clone(), lat.unit_flux_field());
        let a = MagneticPotential::from_field(&b, Vec2::zeros()).unwrap();
        let v = ScalarField::constant(lat, 0.0);
        let r = spectrum(&a, &v, 24, 3).unwrap();
        for (got, exact) in r.values.iter().zip(landau_levels(a.b0(), 3)) {
            assert!((got - exact).abs() < 0.05 * exact, "{got} vs {exact}");
        }
    }

    #[test]
    fn constant_field_trace_has_maxima_near_shortest_periods() {
        let lat = Lattice::new(Vec2::new(1.0, 0.0), Vec2::new(0.4, 1.1)).unwrap();
        let b = ScalarField::constant(lat.clone(), lat.unit_flux_field());
        let a = MagneticPotential::from_field(&b, Vec2::zeros()).unwrap();
        let h = assemble(&a, &ScalarField::constant(lat.clone(), 0.0), 24).unwrap();
        let spec: Vec<f64> = dense_eigenvalues(&h.matrix).into_iter().take(200).collect();
        let ts: Vec<f64> = (0..300).map(|i| 0.2 + 0.01 * i as f64).collect();
        let peaks = local_maxima(&ts, &smoothed_wave_trace(&spec, &ts, 0.05));
        for len in [lat.e1().norm(), lat.e2().norm()] {
            assert!(peaks.iter().any(|t| (t - len).abs() < 0.05 * len), "{len}: {peaks:?}");
        }
    }

    #[test]
    fn isospectrality_needs_enough_values() {
        assert!(isospectrality_check(&[1.0], &[1.0, 2.0], 2).is_err());
        assert_eq!(isospectrality_check(&[1.0, 2.0], &[1.5, 2.0], 2).unwrap(), 0.5);
    }
}
