use bulgekit::model::{default_table, MaterialParams, MembraneGeometry};
use bulgekit::solver::{
    build_coefficient_table, extract_coefficients, reference_membrane, solve_membrane, SolverConfig,
};
use nalgebra::{DMatrix, DVector};

/// `σ₀t∇²w = −P` on the node grid with the five-point Laplacian, solved
/// directly.
fn linear_membrane(n: usize, a: f64, b: f64, tension: f64, p: f64) -> Vec<f64> {
    let (dx, dy) = (2.0 * a / (n - 1) as f64, 2.0 * b / (n - 1) as f64);
    let m = n - 2;
    let idx = |i: usize, j: usize| (j - 1) * m + (i - 1);
    let mut k = DMatrix::<f64>::zeros(m * m, m * m);
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let r = idx(i, j);
            k[(r, r)] = 2.0 / (dx * dx) + 2.0 / (dy * dy);
            for (ii, jj, h2) in [
                (i - 1, j, dx * dx),
                (i + 1, j, dx * dx),
                (i, j - 1, dy * dy),
                (i, j + 1, dy * dy),
            ] {
                if ii >= 1 && ii <= n - 2 && jj >= 1 && jj <= n - 2 {
                    k[(r, idx(ii, jj))] = -1.0 / h2;
                }
            }
        }
    }
    let rhs = DVector::from_element(m * m, p / tension);
    let sol = k.lu().solve(&rhs).expect("nonsingular Laplacian");
    let mut w = vec![0.0; n * n];
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            w[j * n + i] = sol[idx(i, j)];
        }
    }
    w
}

#[test]
fn small_load_matches_linear_membrane() {
    let g = MembraneGeometry::new(0.5e-3, 0.5e-3, 100e-9).unwrap();
    let m = MaterialParams::new(220e9, 0.3, 420e6).unwrap();
    let tension = m.residual_stress() * g.thickness();
    let p = 0.5;
    let field = solve_membrane(&g, &m, p, &SolverConfig::default().with_grid(33)).unwrap();
    let oracle = linear_membrane(33, 0.5e-3, 0.5e-3, tension, p);
    let peak = oracle[16 * 33 + 16];
    assert!(peak < 0.01 * g.thickness(), "load is not small: h = {peak}");
    assert!(((field.center_deflection() - peak) / peak).abs() < 5e-3);
    for (w, o) in field.w.iter().zip(&oracle) {
        assert!((w - o).abs() < 5e-3 * peak);
    }
}

/// Plane-strain strip of width `2a` clamped at both edges: shooting on the
/// edge slope for a trial tension `N`, with `N` fixed by
/// `N = σ₀t + E't·ε`, `E' = E/(1−ν²)`. Returns `(x, w)` on `[−a, a]`.
fn strip_profile(a: f64, t: f64, m: &MaterialParams, p: f64, steps: usize) -> Vec<(f64, f64)> {
    let e_plane = m.youngs_modulus() / (1.0 - m.poisson_ratio().powi(2));
    let dx = 2.0 * a / steps as f64;

    // State (w, w', ∫½w'²) from x = −a with w(−a) = 0, w'(−a) = s.
    let integrate = |n: f64, s: f64| -> Vec<[f64; 3]> {
        let rhs = |y: [f64; 3]| [y[1], -p / n, 0.5 * y[1] * y[1]];
        let mut y = [0.0, s, 0.0];
        let mut out = vec![y];
        for _ in 0..steps {
            let k1 = rhs(y);
            let k2 = rhs(std::array::from_fn(|i| y[i] + 0.5 * dx * k1[i]));
            let k3 = rhs(std::array::from_fn(|i| y[i] + 0.5 * dx * k2[i]));
            let k4 = rhs(std::array::from_fn(|i| y[i] + dx * k3[i]));
            y = std::array::from_fn(|i| y[i] + dx / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
            out.push(y);
        }
        out
    };
    let bisect = |mut lo: f64, mut hi: f64, g: &dyn Fn(f64) -> f64| {
        let g_lo = g(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (g(mid) > 0.0) == (g_lo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    // The far edge must also be clamped.
    let shoot = |n: f64| {
        let s_max = 10.0 * p * a / n;
        bisect(0.0, s_max, &|s| integrate(n, s)[steps][0])
    };
    let tension_gap = |n: f64| {
        let path = integrate(n, shoot(n));
        let strain = path[steps][2] / (2.0 * a);
        n - m.residual_stress() * t - e_plane * t * strain
    };
    let n = bisect(m.residual_stress() * t, 1e6 * m.residual_stress() * t, &tension_gap);
    integrate(n, shoot(n))
        .iter()
        .enumerate()
        .map(|(k, y)| (-a + k as f64 * dx, y[0]))
        .collect()
}

#[test]
fn long_membrane_midline_matches_strip() {
    let (a, t) = (0.5e-3, 100e-9);
    let g = MembraneGeometry::new(a, 8.0 * a, t).unwrap();
    let m = MaterialParams::new(220e9, 0.3, 420e6).unwrap();
    let p = 2e3;
    let field = solve_membrane(&g, &m, p, &SolverConfig::default()).unwrap();
    let midline = field.midline();
    let steps = (midline.len() - 1) * 8;
    let strip = strip_profile(a, t, &m, p, steps);
    let peak = strip[steps / 2].1;
    assert!(peak > 10.0 * t, "not in the stretching regime: h = {peak}");
    for (k, &(x, w)) in midline.iter().enumerate() {
        let (xs, ws) = strip[k * 8];
        assert!((x - xs).abs() < 1e-12);
        assert!((w - ws).abs() < 0.01 * peak, "x = {x}: {w} vs {ws}");
    }
}

#[test]
fn coefficients_converge_with_grid() {
    let (g, m) = reference_membrane(1.0, 0.3).unwrap();
    let coarse = extract_coefficients(&g, &m, &SolverConfig::default().with_grid(33)).unwrap();
    let fine = extract_coefficients(&g, &m, &SolverConfig::default()).unwrap();
    assert!(((coarse.c1 - fine.c1) / fine.c1).abs() < 5e-3, "{} vs {}", coarse.c1, fine.c1);
    assert!(((coarse.f - fine.f) / fine.f).abs() < 5e-3, "{} vs {}", coarse.f, fine.f);
    assert!((3.29..=3.49).contains(&fine.c1), "c1 = {}", fine.c1);
    assert!((1.71..=1.89).contains(&fine.f), "f = {}", fine.f);
}

#[test]
fn bundled_table_is_monotone_in_aspect_ratio() {
    let table = default_table();
    for &nu in table.nus() {
        let c1: Vec<f64> = table.aspect_ratios().iter().map(|&r| table.interpolate(r, nu).0).collect();
        assert!(c1.windows(2).all(|w| w[1] < w[0]), "nu = {nu}: {c1:?}");
        assert!(c1.iter().all(|&c| c >= 1.99));
    }
}

#[test]
fn single_entry_table_matches_direct_extraction() {
    let config = SolverConfig::default().with_grid(33);
    let table = build_coefficient_table(&[2.0], &[0.3], &config).unwrap();
    let (g, m) = reference_membrane(2.0, 0.3).unwrap();
    let direct = extract_coefficients(&g, &m, &config).unwrap();
    let entry = table.entries()[0];
    assert_eq!(entry.c1, direct.c1);
    assert_eq!(entry.f, direct.f);
    assert!(table.provenance.contains("33x33"));
}
