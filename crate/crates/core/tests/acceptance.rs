//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsi_core::fields::{directional, DualIndex};
use tsi_core::hypotheses::{HypothesisConfig, HypothesisReport};
use tsi_core::invariants::{
    b_term, build_invariant_table, i_directional, i_raw, m0_phase, ChangeOfVariables, InvariantTable, TableConfig,
};
use tsi_core::reconstruct::{recover_fields, recover_gauge_class, roundtrip, CosineData, RecoveryConfig, RoundtripConfig};
use tsi_core::spectral::{isospectrality_check, landau_levels, spectrum};
use tsi_core::{Error, Lattice, MagneticPotential, PrimitiveDirection, ScalarField, Vec2};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn lattice() -> Lattice {
    Lattice::new(Vec2::new(1.0, 0.0), Vec2::new(0.4, 1.1)).unwrap()
}

fn flagship_b(lat: &Lattice) -> ScalarField {
    ScalarField::from_cosine_modes(lat.clone(), lat.unit_flux_field(), &[((1, 0), 0.6), ((2, 0), 0.15), ((0, 1), 0.45)])
        .unwrap()
}

fn flagship_v(lat: &Lattice) -> ScalarField {
    ScalarField::from_cosine_modes(lat.clone(), 0.0, &[((1, 0), 0.7), ((1, -1), 0.4)]).unwrap()
}

const A0: [f64; 2] = [0.3, 0.7];
const KMAX: u32 = 32;

fn a0() -> Vec2 {
    Vec2::new(A0[0], A0[1])
}

fn flagship_table(a0: Vec2) -> InvariantTable {
    let lat = lattice();
    let a = MagneticPotential::from_field(&flagship_b(&lat), a0).unwrap();
    let config = TableConfig {
        kmax: KMAX,
        ..TableConfig::default()
    };
    build_invariant_table(&a, &flagship_v(&lat), &PrimitiveDirection::all_within(2), &config).unwrap()
}

/// Unit-flux field with random modes of total strength below `0.9 b0`.
fn random_field(rng: &mut ChaCha8Rng, lat: &Lattice) -> ScalarField {
    let b0 = lat.unit_flux_field();
    let mut modes: Vec<(DualIndex, f64)> = Vec::new();
    for _ in 0..3 {
        let idx = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        if idx == (0, 0) || modes.iter().any(|&(i, _)| i == idx || i == (-idx.0, -idx.1)) {
            continue;
        }
        modes.push((idx, rng.gen_range(-0.15..0.15) * b0));
    }
    ScalarField::from_cosine_modes(lat.clone(), b0, &modes).unwrap()
}

fn random_lattice(rng: &mut ChaCha8Rng) -> Lattice {
    let l2 = rng.gen_range(0.8..1.4);
    let angle: f64 = rng.gen_range(1.0..2.1);
    Lattice::new(Vec2::new(rng.gen_range(0.8..1.3), 0.0), Vec2::new(l2 * angle.cos(), l2 * angle.sin())).unwrap()
}

fn criterion_1() -> Outcome {
    let lat = lattice();
    let (b, v) = (flagship_b(&lat), flagship_v(&lat));
    let start = Instant::now();
    let mut config = RoundtripConfig::new(2);
    config.kmax = KMAX;
    config.hypotheses = HypothesisConfig {
        cosine_radius: 6.0,
        ..HypothesisConfig::default()
    };
    let margin = HypothesisReport::check(&b, &a0(), &config.hypotheses).field_margin;
    let (_, report) = match roundtrip(&b, &v, a0(), &config) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("round trip failed: {e}")),
    };
    let elapsed = start.elapsed();
    let (eb, ev) = (report.b_error.relative_l2, report.v_error.relative_l2);
    let setup_ok = margin > 0.3 * lat.unit_flux_field() && report.hypotheses.cosine_violations.is_empty();
    outcome(
        setup_ok && eb < 1e-6 && ev < 1e-4 && elapsed < Duration::from_secs(120),
        format!(
            "B rel err {eb:.2e} (< 1e-6), V rel err {ev:.2e} (< 1e-4), margin/b0 {:.2}, {:.1} s (< 120 s)",
            margin / lat.unit_flux_field(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let lat = lattice();
    let b = flagship_b(&lat);
    let table = flagship_table(a0());
    let class = match recover_gauge_class(&table, &b, 1024) {
        Ok(c) => c,
        Err(e) => return outcome(false, format!("recovery failed: {e}")),
    };
    let cosines = class.cosines_within(&lat, 4.0);
    let worst = cosines
        .iter()
        .map(|(&(m, n), c)| (c - a0().dot(&lat.point(m, n)).cos()).abs())
        .fold(0.0, f64::max);

    let constant = ScalarField::constant(lat.clone(), lat.unit_flux_field());
    let a = MagneticPotential::from_field(&constant, a0()).unwrap();
    let zero_v = ScalarField::constant(lat.clone(), 0.0);
    let config = TableConfig {
        kmax: 4,
        ..TableConfig::default()
    };
    let t = build_invariant_table(&a, &zero_v, &PrimitiveDirection::all_within(2), &config).unwrap();
    let guard = matches!(recover_gauge_class(&t, &constant, 256), Err(Error::GenericityFailure { .. }));
    outcome(
        worst < 1e-6 && guard && !cosines.is_empty(),
        format!(
            "max |cos| error {worst:.2e} over {} vectors with |d| <= 4 (< 1e-6); sign resolved: {}; constant-B guard fired: {guard}",
            cosines.len(),
            class.relative_sign_resolved
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cases = 24;
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let lat = random_lattice(&mut rng);
        let b = random_field(&mut rng, &lat);
        let a0 = Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let a = MagneticPotential::from_field(&b, a0).unwrap();
        let dirs = PrimitiveDirection::all_within(2);
        let dir = dirs[rng.gen_range(0..dirs.len())];
        let k: u32 = rng.gen_range(1..=3);
        let d = dir.d0(&lat) * k as f64;
        let raw = i_raw(&a, &d, 128) + i_raw(&a, &(-d), 128);
        let cov = ChangeOfVariables::build(&directional(&b, dir), 1024).unwrap();
        let c0 = lat.area();
        let reduced = i_directional(&cov, k, (a0.dot(&d)).cos(), c0);
        worst = worst.max((raw - reduced).norm() / c0);
    }
    outcome(
        worst < 1e-7,
        format!("{cases} random cases, max |I_raw(d)+I_raw(-d) - I_dir| / c0 = {worst:.2e} (< 1e-7)"),
    )
}

/// `J_k(x)` from the power series, summed in order of decreasing magnitude
/// beyond the peak term.
fn bessel_series(k: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = (1..=k).fold(1.0, |acc, j| acc * half / j as f64);
    let mut sum = term;
    for m in 1..200 {
        term *= -half * half / (m as f64 * (m + k) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// `J_k(x)` by Miller's downward recurrence normalized with
/// `J_0 + 2 sum J_{2j} = 1`.
fn bessel_recurrence(k: u32, x: f64) -> f64 {
    let start = 2 * ((k as usize).max(x as usize) + 40);
    let (mut next, mut cur) = (0.0, 1e-30);
    let mut values = vec![0.0; start + 1];
    let mut norm = 0.0;
    for j in (1..=start).rev() {
        let prev = 2.0 * j as f64 / x * cur - next;
        next = cur;
        cur = prev;
        values[j - 1] = prev;
        if (j - 1) % 2 == 0 && j - 1 > 0 {
            norm += 2.0 * prev;
        }
    }
    norm += values[0];
    values[k as usize] / norm
}

fn criterion_4() -> Outcome {
    let lat = lattice();
    let b0 = lat.unit_flux_field();
    let c0 = lat.area();
    let mut worst: f64 = 0.0;
    let mut oracle_gap: f64 = 0.0;
    for (dir, rel) in [((1, 0), 0.3), ((1, 1), 0.12), ((2, -1), 0.2)] {
        let dir = PrimitiveDirection::new(dir.0, dir.1).unwrap();
        let (p, q) = dir.ray_index(1);
        let amp = rel * b0;
        let b = ScalarField::from_cosine_modes(lat.clone(), b0, &[((p as i32, q as i32), amp)]).unwrap();
        // B_delta = 2 amp cos(2 pi s) gives A^1_delta = mu sin(2 pi s) with mu = amp / (pi b0).
        let mu = amp / (PI * b0);
        let a = MagneticPotential::from_field(&b, a0()).unwrap();
        let zero_v = ScalarField::constant(lat.clone(), 0.0);
        let config = TableConfig {
            kmax: 8,
            ..TableConfig::default()
        };
        let table = build_invariant_table(&a, &zero_v, &[dir], &config).unwrap();
        for k in 1..=8u32 {
            let x = 2.0 * PI * k as f64 * mu;
            let (js, jr) = (bessel_series(k, x), bessel_recurrence(k, x));
            oracle_gap = oracle_gap.max((js - jr).abs());
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let expected = 2.0 * c0 * (k as f64 * a0().dot(&dir.d0(&lat))).cos() * sign * js;
            worst = worst.max((table.get(dir, k).unwrap().i_sum - expected).abs());
        }
    }
    outcome(
        worst < 1e-8 && oracle_gap < 1e-12,
        format!("max |I_sum - 2c0 cos (-1)^k J_k| = {worst:.2e} (< 1e-8), k <= 8, 3 rays; series vs recurrence {oracle_gap:.1e}"),
    )
}

/// `A` and its Jacobian `J[(i, j)] = d_j A_i`, divergence and vector Laplacian,
/// from the mode list.
fn potential_derivatives(a: &MagneticPotential, x: &Vec2) -> (Vec2, [[f64; 2]; 2], f64, Vec2) {
    let h = 0.5 * a.b0();
    let mut jac = [[0.0, -h], [h, 0.0]];
    let mut div = 0.0;
    let mut lap = Vec2::zeros();
    for m in a.modes() {
        let e = Complex64::from_polar(1.0, 2.0 * PI * m.beta.dot(x));
        let c = [m.coeff.x, m.coeff.y];
        for i in 0..2 {
            for j in 0..2 {
                jac[i][j] += (c[i] * e * Complex64::new(0.0, 2.0 * PI * m.beta[j])).re;
            }
            lap[i] += (c[i] * e).re * -(2.0 * PI * m.beta.norm()).powi(2);
        }
        div += ((c[0] * m.beta.x + c[1] * m.beta.y) * e * Complex64::new(0.0, 2.0 * PI)).re;
    }
    (a.eval(x), jac, div, lap)
}

/// `b(x, y)` from its definition with `phi(x, y) = int_0^1 w.A(y + s w) ds`,
/// `w = x - y`, differentiated under the integral and integrated by
/// Gauss-Legendre on 8 panels of 24 nodes. `a0` enters through `A`.
fn b_oracle(a: &MagneticPotential, x: &Vec2, y: &Vec2) -> Complex64 {
    let w = x - y;
    let (nodes, weights) = tsi_core::quad::gauss_legendre(24);
    let panels = 8;
    let mut grad = Vec2::zeros();
    let mut lap_phi = 0.0;
    for p in 0..panels {
        for (t, wt) in nodes.iter().zip(&weights) {
            let s = (p as f64 + 0.5 * (t + 1.0)) / panels as f64;
            let wt = 0.5 * wt / panels as f64;
            let (av, jac, div, lap) = potential_derivatives(a, &(y + w * s));
            // d_j [w.A(y + s w)] = A_j + s sum_i w_i d_j A_i
            for j in 0..2 {
                grad[j] += wt * (av[j] + s * (w[0] * jac[0][j] + w[1] * jac[1][j]));
            }
            lap_phi += wt * (2.0 * s * div + s * s * w.dot(&lap));
        }
    }
    let (ax, _, div_x, _) = potential_derivatives(a, x);
    let g = grad - ax;
    Complex64::new(g.dot(&g), -(lap_phi - div_x))
}

/// `b(x, y)` by Richardson-extrapolated central differences of `m0_phase`.
fn b_finite_difference(a: &MagneticPotential, x: &Vec2, y: &Vec2) -> Complex64 {
    let phi = |z: Vec2| m0_phase(a, &z, y);
    let axis = [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
    let diff = |h: f64, e: &Vec2| {
        let (p, m, c) = (phi(x + e * h), phi(x - e * h), phi(*x));
        ((p - m) / (2.0 * h), (p - 2.0 * c + m) / (h * h))
    };
    let a_diff = |h: f64, j: usize| (a.eval(&(x + axis[j] * h))[j] - a.eval(&(x - axis[j] * h))[j]) / (2.0 * h);
    let ax = a.eval(x);
    let mut re = 0.0;
    let mut lap = 0.0;
    for (j, e) in axis.iter().enumerate() {
        let h = 1e-3;
        let (g1, l1) = diff(h, e);
        let (g2, l2) = diff(0.5 * h, e);
        let grad = (4.0 * g2 - g1) / 3.0;
        let second = (4.0 * l2 - l1) / 3.0;
        let div = (4.0 * a_diff(0.5 * h, j) - a_diff(h, j)) / 3.0;
        re += (grad - ax[j]).powi(2);
        lap += second - div;
    }
    Complex64::new(re, -lap)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let lat = lattice();
    let fields = [flagship_b(&lat), random_field(&mut rng, &lat), random_field(&mut rng, &lat)];
    let mut invariance: f64 = 0.0;
    let mut oracle_invariance: f64 = 0.0;
    let mut oracle_match: f64 = 0.0;
    let mut fd_match: f64 = 0.0;
    let point = |rng: &mut ChaCha8Rng| lat.from_coords(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    for case in 0..100 {
        let b = &fields[case % fields.len()];
        let (x, y) = (point(&mut rng), point(&mut rng));
        let pick = |rng: &mut ChaCha8Rng| Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let first = MagneticPotential::from_field(b, pick(&mut rng)).unwrap();
        let second = first.with_a0(pick(&mut rng));
        let (u, v) = (b_term(&first, &x, &y), b_term(&second, &x, &y));
        invariance = invariance.max((u - v).norm());
        let (ou, ov) = (b_oracle(&first, &x, &y), b_oracle(&second, &x, &y));
        oracle_invariance = oracle_invariance.max((ou - ov).norm());
        oracle_match = oracle_match.max((u - ou).norm() / u.norm().max(1.0));
        if case % 5 == 0 {
            let fd = b_finite_difference(&first, &x, &y);
            fd_match = fd_match.max((u - fd).norm() / u.norm().max(1.0));
        }
    }
    outcome(
        invariance < 1e-10 && oracle_invariance < 1e-10 && fd_match < 1e-6 && oracle_match < 1e-10,
        format!(
            "100 cases: a0 change moves b by {invariance:.1e} (library), {oracle_invariance:.1e} (definition with a0) (< 1e-10); \
             finite differences {fd_match:.1e} (< 1e-6); quadrature definition {oracle_match:.1e}"
        ),
    )
}

/// Largest change of any `I` or `J` entry, per entry relative to its own
/// magnitude and relative to the entry scale `2 c0`.
fn table_deviation(base: &InvariantTable, other: &InvariantTable) -> (f64, f64) {
    let mut relative: f64 = 0.0;
    let mut scaled: f64 = 0.0;
    for (key, e) in &base.entries {
        let o = &other.entries[key];
        for (x, y) in [(e.i_sum, o.i_sum), (e.j_sum, o.j_sum)] {
            let diff = (x - y).abs();
            if diff > 0.0 {
                relative = relative.max(diff / x.abs());
            }
            scaled = scaled.max(diff / (2.0 * e.c0));
        }
    }
    (relative, scaled)
}

fn criterion_6() -> Outcome {
    let lat = lattice();
    let base = flagship_table(a0());
    let shifted = flagship_table(a0() + (lat.e1_star() * 1.0 - lat.e2_star() * 2.0) * (2.0 * PI));
    let reflected = flagship_table(-a0());
    let (gauge_rel, gauge_scaled) = table_deviation(&base, &shifted);
    let (parity_rel, parity_scaled) = table_deviation(&base, &reflected);
    // The shifted a0 is itself rounded, which perturbs cos(k a0.d0) by about
    // k |a0.d0| eps; entries with small cosines cannot stay within 1e-12 of
    // themselves, so the tolerance applies on the entry scale 2 c0.
    outcome(
        gauge_scaled.max(parity_scaled) < 1e-12,
        format!(
            "{} entries; max change / 2c0: gauge {gauge_scaled:.1e}, parity {parity_scaled:.1e} (< 1e-12); \
             per-entry relative: gauge {gauge_rel:.1e}, parity {parity_rel:.1e}",
            base.entries.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let lat = lattice();
    let b0 = lat.unit_flux_field();
    let constant = ScalarField::constant(lat.clone(), b0);
    let zero_v = ScalarField::constant(lat.clone(), 0.0);
    let a_const = MagneticPotential::from_field(&constant, Vec2::zeros()).unwrap();
    let run = |a: &MagneticPotential, v: &ScalarField, n: usize, count: usize| spectrum(a, v, n, count).map(|r| r.values);

    // (a) Landau level
    let levels = landau_levels(b0, 5);
    let Ok(l64) = run(&a_const, &zero_v, 64, 5) else {
        return outcome(false, "eigensolver failed at N = 64".into());
    };
    let landau_err = (l64[0] - b0).abs() / b0;

    // (b) gauge-equivalent potentials, nonconstant B and V
    let b = flagship_b(&lat);
    let v = flagship_v(&lat);
    let a = MagneticPotential::from_field(&b, a0()).unwrap();
    let base = run(&a, &v, 64, 10).unwrap();
    let shifted = run(&a.with_a0(a0() + lat.e2_star() * (2.0 * PI)), &v, 64, 10).unwrap();
    let reflected = run(&a.with_a0(-a0()), &v, 64, 10).unwrap();
    let budget = 1e-3;
    let gauge_dev = isospectrality_check(&base, &shifted, 10).unwrap();
    let parity_dev = isospectrality_check(&base, &reflected, 10).unwrap();

    // (c) distinct extended classes
    let other = run(&a.with_a0(Vec2::new(1.0, 0.4)), &v, 64, 10).unwrap();
    let zero = run(&a.with_a0(Vec2::zeros()), &v, 64, 10).unwrap();
    let splitting = isospectrality_check(&zero, &other, 10).unwrap();

    // (d) Richardson ratio against the exact levels
    let l48 = run(&a_const, &zero_v, 48, 5).unwrap();
    let l96 = run(&a_const, &zero_v, 96, 5).unwrap();
    let ratios: Vec<f64> = (0..5).map(|i| (l48[i] - levels[i]) / (l96[i] - levels[i])).collect();
    let (rmin, rmax) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    let elapsed = start.elapsed();

    let pass = landau_err < 0.02
        && gauge_dev < budget
        && parity_dev < budget
        && splitting > 10.0 * budget
        && (3.5..=4.5).contains(&rmin)
        && (3.5..=4.5).contains(&rmax)
        && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "(a) lambda_1 off b0 by {:.3}% (< 2%); (b) gauge {gauge_dev:.1e}, parity {parity_dev:.1e} (< 1e-3); \
             (c) splitting {splitting:.3} (> 1e-2); (d) ratios {rmin:.4}..{rmax:.4} (4 +- 0.5); {:.1} s (< 300 s)",
            100.0 * landau_err,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_8() -> Outcome {
    let lat = lattice();
    let table = flagship_table(a0());
    let dirs = PrimitiveDirection::all_within(2);
    let config = RecoveryConfig {
        cutoff: 2,
        kmax: KMAX,
        grid: 1024,
    };

    // a0 with cos(a0.d0) just below the floor on direction (1, 0)
    let near = Vec2::new(0.5 * PI - 8e-4, 0.7);
    let near_cos = CosineData::from_a0(&near, &lat, &dirs, KMAX, 1e-3);
    let dir10 = PrimitiveDirection::new(1, 0).unwrap();
    let near_floor = matches!(
        recover_fields(&table, &near_cos, &lat, &config),
        Err(Error::IllConditioned { dir, k: 1, .. }) if dir == dir10
    );
    let a_near = MagneticPotential::from_field(&flagship_b(&lat), near).unwrap();
    let near_table = build_invariant_table(
        &a_near,
        &flagship_v(&lat),
        &[dir10],
        &TableConfig {
            kmax: 2,
            ..TableConfig::default()
        },
    )
    .unwrap();
    let flagged = near_table.flagged().contains(&(dir10, 1));

    // one cosine injected at zero
    let mut zeroed = CosineData::from_a0(&a0(), &lat, &dirs, KMAX, 1e-3);
    let dir11 = PrimitiveDirection::new(1, 1).unwrap();
    zeroed.values.insert((dir11, 5), 0.0);
    let injected = matches!(
        recover_fields(&table, &zeroed, &lat, &config),
        Err(Error::IllConditioned { dir, k: 5, .. }) if dir == dir11
    );

    // corrupted I sums on one direction make s' negative
    let mut corrupted = table.clone();
    let dir01 = PrimitiveDirection::new(0, 1).unwrap();
    for k in 1..=3 {
        corrupted.entries.get_mut(&(dir01, k)).unwrap().i_sum *= 40.0;
    }
    let good = CosineData::from_a0(&a0(), &lat, &dirs, KMAX, 1e-3);
    let nonmonotone = matches!(
        recover_fields(&corrupted, &good, &lat, &config),
        Err(Error::NonMonotone { dir, .. }) if dir == dir01
    );
    outcome(
        near_floor && flagged && injected && nonmonotone,
        format!(
            "|cos| = 8e-4 -> IllConditioned: {near_floor}, flagged in table: {flagged}; injected zero -> IllConditioned: {injected}; \
             corrupted table -> NonMonotone: {nonmonotone}"
        ),
    )
}

fn main() {
    // `cargo test` passes harness flags; a filter that names no criterion skips the suite.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("flagship round trip", criterion_1),
        ("gauge-class recovery", criterion_2),
        ("raw vs directional I", criterion_3),
        ("Bessel closed form", criterion_4),
        ("amplitude term", criterion_5),
        ("gauge and parity invariance", criterion_6),
        ("spectral oracle", criterion_7),
        ("degradation", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {tag} [{name}] {} ({:.1} s)",
            i + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!result.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
