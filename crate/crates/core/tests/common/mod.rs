//! Oracles and property definitions shared by the integration tests and
//! the acceptance runner.

#![allow(dead_code)]

use bulgekit::fitting::{fit_line, FitOptions, LinearizedPoint};
use bulgekit::io::BundledMembrane;
use bulgekit::mixture::{compose, decompose_unknown, decompose_with_uncertainty, LayerInput, Measured};
use bulgekit::model::{
    coefficients_for, CoefficientSource, Layer, LayerStack, LoadDeflectionLaw, MaterialParams, MembraneGeometry,
    PressureDeflectionCurve,
};
use bulgekit::montecarlo::UncertaintySpec;
use bulgekit::poisson::solve_poisson;
use bulgekit::solver::{solve_membrane, SolverConfig};
use num::{BigRational, ToPrimitive};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const PROPERTY_CASES: u32 = 1000;

pub fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

/// `P = C₁(tσ₀/a²)h + f(t/a⁴)(E/(1−ν))h³`, evaluated here rather than
/// through the library's law.
pub fn membrane_pressure(g: &MembraneGeometry, m: &MaterialParams, source: CoefficientSource, h: f64) -> f64 {
    let c = coefficients_for(g.aspect_ratio(), m.poisson_ratio(), source).unwrap();
    let (a, t) = (g.half_width(), g.thickness());
    c.c1 * t * m.residual_stress() / (a * a) * h
        + c.f * t / a.powi(4) * m.youngs_modulus() / (1.0 - m.poisson_ratio()) * h.powi(3)
}

/// Twenty deflections between 15 t and max(60 t, 0.08 a), with the
/// matching pressures.
pub fn synthetic_curve(
    g: &MembraneGeometry,
    m: &MaterialParams,
    source: CoefficientSource,
    label: &str,
) -> PressureDeflectionCurve {
    let t = g.thickness();
    let (h0, h1) = (15.0 * t, (60.0 * t).max(0.08 * g.half_width()));
    let samples = (0..20)
        .map(|k| {
            let h = h0 * (h1 / h0).powf(k as f64 / 19.0);
            (membrane_pressure(g, m, source, h), h)
        })
        .collect();
    PressureDeflectionCurve::new(samples, label).unwrap()
}

pub fn bundled_material(b: &BundledMembrane, nu: f64) -> MaterialParams {
    MaterialParams::new(b.youngs_modulus_gpa.0 * 1e9, nu, b.sigma0_mpa.0 * 1e6).unwrap()
}

/// Exact least squares in rational arithmetic.
pub fn exact_line(points: &[LinearizedPoint]) -> (f64, f64) {
    let q = |v: f64| BigRational::from_float(v).unwrap();
    let n = BigRational::from_integer(points.len().into());
    let (mut sx, mut sy, mut sxx, mut sxy) = (q(0.0), q(0.0), q(0.0), q(0.0));
    for p in points {
        let (x, y) = (q(p.x), q(p.y));
        sx += &x;
        sy += &y;
        sxx += &x * &x;
        sxy += &x * &y;
    }
    let slope = (&n * &sxy - &sx * &sy) / (&n * &sxx - &sx * &sx);
    let intercept = (&sy - &slope * &sx) / &n;
    (intercept.to_f64().unwrap(), slope.to_f64().unwrap())
}

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    })
}

fn geometry_strategy() -> impl Strategy<Value = MembraneGeometry> {
    (0.1e-3..2e-3f64, 1.0..12.0f64, 50e-9..500e-9f64, any::<bool>()).prop_map(|(a, r, t, square)| {
        let ratio = if square { 1.0 } else { r };
        MembraneGeometry::new(a, a * ratio, t).unwrap()
    })
}

fn material_strategy() -> impl Strategy<Value = MaterialParams> {
    (50e9..400e9f64, 0.0..0.45f64, 10e6..1e9f64).prop_map(|(e, nu, s)| MaterialParams::new(e, nu, s).unwrap())
}

/// Deflection → pressure → deflection, and noise-free curves refit to
/// their generating `(σ₀, E)`.
pub fn forward_inverse() -> Result<(), String> {
    runner()
        .run(&(geometry_strategy(), material_strategy(), 0.1..1e3f64), |(g, m, h_over_t)| {
            let src = CoefficientSource::VlassakNix;
            let law = LoadDeflectionLaw::new(&g, &m, src, false).unwrap();
            let h = h_over_t * g.thickness();
            let back = law.deflection(law.pressure(h)).unwrap();
            prop_assert!(rel(back, h) < 1e-10, "h {h} -> {back}");

            let curve = synthetic_curve(&g, &m, src, "p");
            let options = FitOptions {
                nu_assumed: m.poisson_ratio(),
                source: src,
                min_deflection: Some(0.0),
            };
            let fit = bulgekit::fitting::fit_curve(&curve, &g, &options).unwrap();
            prop_assert!(rel(fit.sigma0, m.residual_stress()) < 1e-6);
            prop_assert!(rel(fit.youngs_modulus, m.youngs_modulus()) < 1e-6);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn stack_strategy() -> impl Strategy<Value = (Vec<(f64, f64)>, usize, f64)> {
    (1usize..7)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((1e-9..1e-6f64, -1e9..1e9f64), n),
                0..n,
                -1e9..1e9f64,
            )
        })
}

/// Relative error of a sum, measured against the magnitude of its terms.
fn sum_scale(layers: &[Layer], total: f64) -> f64 {
    layers
        .iter()
        .map(|l| (l.thickness * l.value.unwrap_or(0.0)).abs())
        .sum::<f64>()
        / total
}

/// Filling the unknown with the decomposed value and composing returns the
/// composite; both operations ignore layer order; composites are convex
/// combinations.
pub fn compose_decompose() -> Result<(), String> {
    runner()
        .run(&stack_strategy(), |(spec, unknown, composite)| {
            let layers: Vec<Layer> = spec
                .iter()
                .enumerate()
                .map(|(i, &(t, v))| {
                    if i == unknown {
                        Layer::unknown(format!("l{i}"), t)
                    } else {
                        Layer::known(format!("l{i}"), t, v)
                    }
                })
                .collect();
            let stack = LayerStack::new(layers.clone()).unwrap();
            let value = decompose_unknown(composite, &stack).unwrap();
            let filled = stack.with_value(unknown, value);
            let back = compose(&filled).unwrap();
            let scale = sum_scale(filled.layers(), filled.total_thickness()).max(composite.abs());
            prop_assert!((back - composite).abs() <= 1e-12 * scale, "{back} vs {composite}");

            let mut reversed = layers.clone();
            reversed.reverse();
            let rstack = LayerStack::new(reversed).unwrap();
            let rvalue = decompose_unknown(composite, &rstack).unwrap();
            prop_assert!((rvalue - value).abs() <= 1e-12 * value.abs().max(scale * 1e3));

            let full: Vec<Layer> = spec.iter().enumerate().map(|(i, &(t, v))| Layer::known(format!("l{i}"), t, v)).collect();
            let c = compose(&LayerStack::new(full).unwrap()).unwrap();
            let lo = spec.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
            let hi = spec.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
            let slack = 1e-12 * lo.abs().max(hi.abs());
            prop_assert!(c >= lo - slack && c <= hi + slack);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// A square and a strip membrane of one film, fitted with ν = 0.3.
pub fn poisson_pair(
    nu_true: f64,
    thickness: f64,
    youngs_modulus: f64,
    a_square: f64,
    a_strip: f64,
) -> (bulgekit::fitting::FitResult, bulgekit::fitting::FitResult) {
    let src = CoefficientSource::VlassakNix;
    let m = MaterialParams::new(youngs_modulus, nu_true, 300e6).unwrap();
    let gs = MembraneGeometry::new(a_square, a_square, thickness).unwrap();
    let gr = MembraneGeometry::new(a_strip, 12.0 * a_strip, thickness).unwrap();
    let options = FitOptions {
        nu_assumed: 0.3,
        source: src,
        min_deflection: Some(0.0),
    };
    let fs = bulgekit::fitting::fit_curve(&synthetic_curve(&gs, &m, src, "square"), &gs, &options).unwrap();
    let fr = bulgekit::fitting::fit_curve(&synthetic_curve(&gr, &m, src, "strip"), &gr, &options).unwrap();
    (fs, fr)
}

/// The solved ν does not depend on the common thickness or modulus.
pub fn poisson_invariance() -> Result<(), String> {
    let no_mc = UncertaintySpec::new(100, 1);
    runner()
        .run(
            &(0.0..0.45f64, 0.9..1.1f64, 0.1..10.0f64, 0.3e-3..1.5e-3f64, 0.1e-3..1e-3f64),
            |(nu, t_scale, e_scale, a_sq, a_strip)| {
                let (s0, r0) = poisson_pair(nu, 150e-9, 150e9, a_sq, a_strip);
                let (s1, r1) = poisson_pair(nu, 150e-9 * t_scale, 150e9 * e_scale, a_sq, a_strip);
                let src = CoefficientSource::VlassakNix;
                let n0 = solve_poisson(&s0, &r0, src, &no_mc).unwrap().nu;
                let n1 = solve_poisson(&s1, &r1, src, &no_mc).unwrap().nu;
                prop_assert!((n0 - n1).abs() < 1e-6, "{n0} vs {n1}");
                prop_assert!((n0 - nu).abs() < 1e-4);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

fn points_strategy() -> impl Strategy<Value = Vec<LinearizedPoint>> {
    (1e6..1e9f64, 1e15..1e19f64, prop::collection::vec((1e-12..1e-8f64, -0.05..0.05f64), 3..40)).prop_map(
        |(a, b, raw)| {
            raw.into_iter()
                .map(|(x, noise)| LinearizedPoint {
                    x,
                    y: (a + b * x) * (1.0 + noise),
                })
                .collect()
        },
    )
}

/// Least squares agrees with the exact rational solution.
pub fn regression_exact() -> Result<(), String> {
    runner()
        .run(&points_strategy(), |points| {
            prop_assume!(points.iter().any(|p| p.x != points[0].x));
            let fit = fit_line(&points).unwrap();
            let (a, b) = exact_line(&points);
            let x_mean = points.iter().map(|p| p.x).sum::<f64>() / points.len() as f64;
            // The intercept is compared on the scale of the fitted values.
            let scale = a.abs().max((b * x_mean).abs());
            prop_assert!((fit.intercept - a).abs() <= 1e-10 * scale, "A {} vs {a}", fit.intercept);
            prop_assert!(rel(fit.slope, b) < 1e-10, "B {} vs {b}", fit.slope);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Largest relative deviation of `w` from its images under the symmetries
/// of the square.
pub fn square_asymmetry(field: &bulgekit::solver::DeflectionField) -> f64 {
    let n = field.nx;
    let peak = field.w.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let w = field.w_at(i, j);
            let images = [
                (n - 1 - i, j),
                (i, n - 1 - j),
                (n - 1 - i, n - 1 - j),
                (j, i),
                (n - 1 - j, i),
                (j, n - 1 - i),
                (n - 1 - j, n - 1 - i),
            ];
            for (p, q) in images {
                worst = worst.max((w - field.w_at(p, q)).abs() / peak);
            }
        }
    }
    worst
}

/// Full-domain solves of square membranes: energy never rises and the
/// deflection has the symmetry of the square.
pub fn solver_energy_and_symmetry() -> Result<(), String> {
    let mut config = SolverConfig::default().with_grid(17);
    config.symmetry_reduction = false;
    runner()
        .run(&(0.0..0.45f64, 50e6..800e6f64, 0.5..500.0f64), |(nu, s0, h_over_t)| {
            let g = MembraneGeometry::new(0.5e-3, 0.5e-3, 100e-9).unwrap();
            let m = MaterialParams::new(220e9, nu, s0).unwrap();
            let h = h_over_t * g.thickness();
            let p = membrane_pressure(&g, &m, CoefficientSource::VlassakNix, h);
            let field = solve_membrane(&g, &m, p, &config).map_err(|e| TestCaseError::fail(e.to_string()))?;
            for w in field.energy_history.windows(2) {
                prop_assert!(w[1] <= w[0], "energy rose {} -> {}", w[0], w[1]);
            }
            let last = *field.energy_history.last().unwrap();
            prop_assert!((last - field.energy).abs() <= 1e-9 * field.energy.abs().max(1e-30));
            let asym = square_asymmetry(&field);
            prop_assert!(asym < 1e-8, "asymmetry {asym}");
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Identical seeds give bit-identical Monte-Carlo results.
pub fn monte_carlo_determinism() -> Result<(), String> {
    runner()
        .run(&(any::<u64>(), 0.001..0.01f64, 0.0..0.25f64), |(seed, rel_u, nu)| {
            let spec = UncertaintySpec::new(100, seed);
            let src = CoefficientSource::VlassakNix;
            let (mut s, mut r) = poisson_pair(nu, 150e-9, 150e9, 1e-3, 0.2e-3);
            s.geometry = s
                .geometry
                .with_uncertainties(rel_u * 1e-3, rel_u * 1e-3, 0.0)
                .unwrap();
            r.geometry = r
                .geometry
                .with_uncertainties(rel_u * 0.2e-3, rel_u * 2.4e-3, 0.0)
                .unwrap();
            let p1 = solve_poisson(&s, &r, src, &spec).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let p2 = solve_poisson(&s, &r, src, &spec).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(p1.delta_nu.to_bits(), p2.delta_nu.to_bits());

            let m = MaterialParams::new(150e9, 0.3, 300e6).unwrap();
            let curve = synthetic_curve(&s.geometry, &m, src, "c");
            let opts = FitOptions::default();
            let u1 = bulgekit::fitting::propagate_uncertainty(&curve, &s.geometry, &opts, &spec)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let u2 = bulgekit::fitting::propagate_uncertainty(&curve, &s.geometry, &opts, &spec)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(u1.u_sigma0.to_bits(), u2.u_sigma0.to_bits());
            prop_assert_eq!(u1.u_youngs_modulus.to_bits(), u2.u_youngs_modulus.to_bits());

            let layers = vec![
                LayerInput {
                    name: "known".into(),
                    thickness: Measured::new(90e-9, rel_u * 90e-9).unwrap(),
                    value: Some(Measured::new(212e9, 8e9).unwrap()),
                },
                LayerInput {
                    name: "unknown".into(),
                    thickness: Measured::new(98e-9, rel_u * 98e-9).unwrap(),
                    value: None,
                },
            ];
            let composite = Measured::new(147e9, 14e9).unwrap();
            let d1 = decompose_with_uncertainty(composite, &layers, &spec).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let d2 = decompose_with_uncertainty(composite, &layers, &spec).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(d1.uncertainty.to_bits(), d2.uncertainty.to_bits());
            Ok(())
        })
        .map_err(|e| e.to_string())
}
