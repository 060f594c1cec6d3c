use num_complex::Complex64;
use rayon::prelude::*;

use super::matrix::CsrMatrix;
use crate::error::{Error, Result};
use crate::fields::{MagneticPotential, ScalarField};
use crate::lattice::Vec2;

/// A periodic gauge function `phi`, replacing `A` by `A + grad phi`.
pub type GaugeFn<'a> = &'a (dyn Fn(&Vec2) -> f64 + Sync);

/// Finite-difference magnetic Hamiltonian on the `n x n` grid
/// `x = (i e1 + j e2) / n`, unknown `i + n j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedHamiltonian {
    pub n: usize,
    pub matrix: CsrMatrix,
}

impl DiscretizedHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Grid point of unknown `idx`.
    pub fn point(&self, a: &MagneticPotential, idx: usize) -> Vec2 {
        let (i, j) = (idx % self.n, idx / self.n);
        a.lattice().from_coords(i as f64 / self.n as f64, j as f64 / self.n as f64)
    }
}

/// Phase of `u(z + a e1 + b e2) = exp(i phase) u(z)` for `a, b` in `{-1, 0, 1}`
/// under the magnetic-periodic conditions `u(x + e_j) = exp(i A^0(e_j).x) u(x)`.
fn wrap_phase(a: &MagneticPotential, z: &Vec2, da: i64, db: i64) -> f64 {
    let lat = a.lattice();
    let (e1, e2) = (lat.e1(), lat.e2());
    let w = z + e2 * db as f64;
    da as f64 * a.linear(&e1).dot(&w) + db as f64 * a.linear(&e2).dot(z)
}

/// Product of the boundary phases around the cell, `exp(i (A^0(e1).e2 - A^0(e2).e1))`,
/// minus one.
pub fn cocycle_defect(a: &MagneticPotential) -> f64 {
    let lat = a.lattice();
    let phase = a.linear(&lat.e1()).dot(&lat.e2()) - a.linear(&lat.e2()).dot(&lat.e1());
    (Complex64::from_polar(1.0, phase) - 1.0).norm()
}

/// `-sum g^{ij} D_i D_j + V` with covariant differences along `e1/n`, `e2/n`
/// and the two diagonals, each hop carrying `exp(-i int A.dl)`.
pub fn assemble(a: &MagneticPotential, v: &ScalarField, n: usize) -> Result<DiscretizedHamiltonian> {
    assemble_with_gauge(a, v, n, None)
}

pub fn assemble_with_gauge(
    a: &MagneticPotential,
    v: &ScalarField,
    n: usize,
    gauge: Option<GaugeFn>,
) -> Result<DiscretizedHamiltonian> {
    let lat = a.lattice();
    let flux = a.b0() * lat.area();
    if (flux - 2.0 * std::f64::consts::PI).abs() > 1e-9 {
        return Err(Error::FluxNotQuantized { flux });
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("grid size {n} too small")));
    }
    let (e1, e2) = (lat.e1(), lat.e2());
    let g = nalgebra::Matrix2::new(e1.dot(&e1), e1.dot(&e2), e1.dot(&e2), e2.dot(&e2));
    let gi = g.try_inverse().expect("lattice basis is nondegenerate");
    let h2 = (n * n) as f64;
    // (step in grid units, coefficient of S(step) / h^2)
    let stencil: [((i64, i64), f64); 4] = [
        ((1, 0), gi[(0, 0)]),
        ((0, 1), gi[(1, 1)]),
        ((1, 1), 0.5 * gi[(0, 1)]),
        ((1, -1), -0.5 * gi[(0, 1)]),
    ];
    let diag = 2.0 * (gi[(0, 0)] + gi[(1, 1)]) * h2;
    let ni = n as i64;
    let coords = |i: i64, j: i64| lat.from_coords(i as f64 / n as f64, j as f64 / n as f64);
    let rows: Vec<Vec<(usize, Complex64)>> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = ((idx % n) as i64, (idx / n) as i64);
            let x = coords(i, j);
            let mut row = Vec::with_capacity(9);
            row.push((idx, Complex64::new(diag + v.eval(&x), 0.0)));
            for &((si, sj), coef) in &stencil {
                if coef == 0.0 {
                    continue;
                }
                for sign in [1i64, -1] {
                    let (ti, tj) = (i + sign * si, j + sign * sj);
                    let step = coords(sign * si, sign * sj);
                    let mut theta = a.line_integral(&x, &step);
                    if let Some(phi) = gauge {
                        theta += phi(&(x + step)) - phi(&x);
                    }
                    let (da, db) = (ti.div_euclid(ni), tj.div_euclid(ni));
                    let (ri, rj) = (ti.rem_euclid(ni), tj.rem_euclid(ni));
                    let z = coords(ri, rj);
                    let wrap = wrap_phase(a, &z, da, db);
                    let col = (ri + ni * rj) as usize;
                    row.push((col, -coef * h2 * Complex64::from_polar(1.0, wrap - theta)));
                }
            }
            row
        })
        .collect();
    Ok(DiscretizedHamiltonian {
        n,
        matrix: CsrMatrix::from_rows(rows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use std::f64::consts::PI;

    fn setup(a0: Vec2) -> (MagneticPotential, ScalarField) {
        let lat = Lattice::new(Vec2::new(1.0, 0.0), Vec2::new(0.4, 1.1)).unwrap();
        let b = ScalarField::from_cosine_modes(lat.clone(), lat.unit_flux_field(), &[((1, 0), 0.8), ((1, 1), 0.3)])
            .unwrap();
        let v = ScalarField::from_cosine_modes(lat, 0.0, &[((0, 1), 0.5)]).unwrap();
        (MagneticPotential::from_field(&b, a0).unwrap(), v)
    }

    #[test]
    fn hermitian_with_unit_cocycle() {
        let (a, v) = setup(Vec2::new(0.3, 0.7));
        assert!(cocycle_defect(&a) < 1e-12);
        let h = assemble(&a, &v, 16).unwrap();
        assert!(h.matrix.hermiticity_defect() < 1e-12 * 16.0 * 16.0);
    }

    #[test]
    fn rejects_unquantized_flux() {
        let lat = Lattice::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap();
        let b = ScalarField::constant(lat.clone(), 3.0);
        let a = MagneticPotential::from_field(&b, Vec2::zeros()).unwrap();
        let v = ScalarField::constant(lat, 0.0);
        assert!(matches!(assemble(&a, &v, 16), Err(Error::FluxNotQuantized { .. })));
    }

    #[test]
    fn gauge_covariance() {
        let (a, v) = setup(Vec2::new(0.3, 0.7));
        let lat = a.lattice().clone();
        let phi = move |x: &Vec2| {
            let (s, t) = lat.coords(x);
            0.7 * (2.0 * PI * s).sin() + 0.2 * (2.0 * PI * (s - t)).cos()
        };
        let h = assemble(&a, &v, 16).unwrap();
        let hg = assemble_with_gauge(&a, &v, 16, Some(&phi)).unwrap();
        let phases: Vec<f64> = (0..h.dim()).map(|i| phi(&h.point(&a, i))).collect();
        let conj = h.matrix.conjugated(&phases);
        assert!(conj.max_difference(&hg.matrix) < 1e-10 * 256.0);
    }

    #[test]
    fn potential_shift_moves_diagonal_only() {
        let (a, v) = setup(Vec2::zeros());
        let h = assemble(&a, &v, 16).unwrap();
        let shifted = assemble(&a, &v.with_mean(1.25), 16).unwrap();
        assert!(h.matrix.shifted(1.25).max_difference(&shifted.matrix) < 1e-12);
    }
}
