//! Large-deflection membrane solver.
//!
//! Minimizes the total potential energy of a clamped, prestressed
//! rectangular membrane with von Kármán strains,
//!
//! ```text
//! Π = ∫ t·[σ₀(εxx+εyy) + E/(2(1−ν²))·(εxx² + εyy² + 2ν·εxx·εyy + (1−ν)/2·γxy²)] dA − ∫ P·w dA
//! εxx = ∂u/∂x + ½(∂w/∂x)²,  εyy = ∂v/∂y + ½(∂w/∂y)²,  γxy = ∂u/∂y + ∂v/∂x + ∂w/∂x·∂w/∂y
//! ```
//!
//! and recovers the shape coefficients `C₁` and `f` from a pressure sweep.

mod discretization;
mod ncg;
mod table;

pub use discretization::MembraneProblem;
pub use ncg::{minimize, NcgOptions, NcgOutcome, QuarticObjective};
pub use table::{build_coefficient_table, CoefficientTable, TableEntry};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MaterialParams, MembraneGeometry};
use discretization::{U, V, W};

/// Discretization and minimizer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Nodes across the short side (full membrane), odd, ≥ 17.
    pub grid_nx: usize,
    /// Nodes along the long side (full membrane), odd, ≥ 17.
    pub grid_ny: usize,
    /// Per pressure step.
    pub max_iterations: usize,
    /// ‖∇Π‖ / ‖load‖ at convergence; in (0, 1e-4].
    pub gradient_tolerance: f64,
    /// Pa, solved in increasing order. Empty selects the automatic ladder.
    pub pressure_steps: Vec<f64>,
    /// Solve one quadrant with mirror conditions.
    pub symmetry_reduction: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid_nx: 65,
            grid_ny: 65,
            max_iterations: 200_000,
            gradient_tolerance: 1e-8,
            pressure_steps: Vec::new(),
            symmetry_reduction: true,
        }
    }
}

impl SolverConfig {
    pub fn with_grid(mut self, n: usize) -> Self {
        self.grid_nx = n;
        self.grid_ny = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("grid_nx", self.grid_nx), ("grid_ny", self.grid_ny)] {
            if n < 17 || n % 2 == 0 {
                return Err(Error::invalid(format!("{name} must be odd and >= 17, got {n}")));
            }
        }
        if !(self.gradient_tolerance > 0.0 && self.gradient_tolerance <= 1e-4) {
            return Err(Error::invalid(format!(
                "gradient_tolerance must lie in (0, 1e-4], got {}",
                self.gradient_tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be positive"));
        }
        if self.pressure_steps.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::invalid("pressure steps must be positive"));
        }
        if self.pressure_steps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("pressure steps must be strictly increasing"));
        }
        Ok(())
    }

    /// Short digest of the configuration, used as table provenance.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes())[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Displacement fields on the full `grid_nx × grid_ny` node grid.
///
/// Node `(i, j)` sits at `x = −a + i·dx` (short direction) and
/// `y = −b + j·dy`; arrays are row-major in `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeflectionField {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub pressure: f64,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub converged: bool,
    pub residual_norm: f64,
    pub iterations: usize,
    pub energy: f64,
    /// Energy after each accepted minimizer step of the last solve.
    pub energy_history: Vec<f64>,
}

impl DeflectionField {
    pub fn w_at(&self, i: usize, j: usize) -> f64 {
        self.w[j * self.nx + i]
    }

    pub fn center_deflection(&self) -> f64 {
        self.w_at(self.nx / 2, self.ny / 2)
    }

    /// Deflection along the short-direction line through the centre.
    pub fn midline(&self) -> Vec<(f64, f64)> {
        let j = self.ny / 2;
        let a = 0.5 * self.dx * (self.nx - 1) as f64;
        (0..self.nx).map(|i| (-a + i as f64 * self.dx, self.w_at(i, j))).collect()
    }
}

/// Working state of one discretized membrane.
struct MembraneState {
    problem: MembraneProblem,
    x: Vec<f64>,
    quarter: bool,
    full_nx: usize,
    full_ny: usize,
}

impl MembraneState {
    fn new(geometry: &MembraneGeometry, material: &MaterialParams, config: &SolverConfig) -> Self {
        let (a, b) = (geometry.half_width(), geometry.half_length());
        let mut problem = if config.symmetry_reduction {
            MembraneProblem::quarter(config.grid_nx, config.grid_ny, a, b)
        } else {
            MembraneProblem::full(config.grid_nx, config.grid_ny, a, b)
        };
        problem.thickness = geometry.thickness();
        problem.residual_stress = material.residual_stress();
        problem.youngs_modulus = material.youngs_modulus();
        problem.poisson_ratio = material.poisson_ratio();
        let x = vec![0.0; 3 * problem.nodes()];
        MembraneState {
            problem,
            x,
            quarter: config.symmetry_reduction,
            full_nx: config.grid_nx,
            full_ny: config.grid_ny,
        }
    }

    /// Rescale the current state for a new load: `w` by `ratio`, in-plane
    /// displacements by `ratio²`.
    fn rescale(&mut self, ratio: f64) {
        let n = self.problem.nodes();
        for (k, x) in self.x.iter_mut().enumerate() {
            *x *= if k >= 2 * n { ratio } else { ratio * ratio };
        }
    }

    fn solve(&mut self, pressure: f64, config: &SolverConfig, record_energy: bool) -> NcgOutcome {
        self.problem.pressure = pressure;
        let options = NcgOptions {
            max_iterations: config.max_iterations,
            tolerance: config.gradient_tolerance,
            restart_every: 0,
            precondition_every: 50,
            record_energy,
        };
        minimize(&self.problem, &mut self.x, &options)
    }

    fn field(&self, outcome: &NcgOutcome) -> DeflectionField {
        let p = &self.problem;
        let n = p.nodes();
        let (nx, ny) = (self.full_nx, self.full_ny);
        let mut w = vec![0.0; nx * ny];
        let mut u = vec![0.0; nx * ny];
        let mut v = vec![0.0; nx * ny];
        let (cx, cy) = (nx / 2, ny / 2);
        for jj in 0..ny {
            for ii in 0..nx {
                let (node, su, sv) = if self.quarter {
                    let i = ii.abs_diff(cx);
                    let j = jj.abs_diff(cy);
                    let su = if ii < cx { -1.0 } else { 1.0 };
                    let sv = if jj < cy { -1.0 } else { 1.0 };
                    (j * p.nx + i, su, sv)
                } else {
                    (jj * nx + ii, 1.0, 1.0)
                };
                let k = jj * nx + ii;
                u[k] = su * self.x[U * n + node];
                v[k] = sv * self.x[V * n + node];
                w[k] = self.x[W * n + node];
            }
        }
        DeflectionField {
            nx,
            ny,
            dx: p.dx,
            dy: p.dy,
            pressure: p.pressure,
            w,
            u,
            v,
            converged: outcome.converged,
            residual_norm: outcome.residual,
            iterations: outcome.iterations,
            energy: outcome.energy,
            energy_history: outcome.energy_history.clone(),
        }
    }
}

fn check_inputs(material: &MaterialParams, config: &SolverConfig) -> Result<()> {
    config.validate()?;
    if !(material.residual_stress() > 0.0) {
        return Err(Error::invalid("membrane solver requires a tensile residual stress"));
    }
    Ok(())
}

/// Equilibrium of the membrane under a single pressure, from rest.
///
/// A field that misses the tolerance is returned inside
/// [`Error::NotConverged`] together with its diagnostics.
pub fn solve_membrane(
    geometry: &MembraneGeometry,
    material: &MaterialParams,
    pressure: f64,
    config: &SolverConfig,
) -> Result<DeflectionField> {
    check_inputs(material, config)?;
    if !(pressure.is_finite() && pressure > 0.0) {
        return Err(Error::invalid(format!("pressure must be positive, got {pressure}")));
    }
    let mut state = MembraneState::new(geometry, material, config);
    let outcome = state.solve(pressure, config, true);
    let field = state.field(&outcome);
    if field.converged {
        Ok(field)
    } else {
        Err(Error::NotConverged { field: Box::new(field) })
    }
}

/// Rough `(C₁, f)` used only to place the automatic pressure ladder.
fn ladder_estimate(aspect_ratio: f64, nu: f64) -> (f64, f64) {
    let r2 = aspect_ratio * aspect_ratio;
    let c1 = 2.0 + 1.39 / r2;
    let f = crate::model::f_strip(nu) + (crate::model::f_square_vlassak_nix(nu) - crate::model::f_strip(nu)) / r2;
    (c1, f)
}

/// Twelve log-spaced pressures whose estimated centre deflections span
/// `h/t ∈ [0.5, 500]`.
pub fn default_pressure_ladder(geometry: &MembraneGeometry, material: &MaterialParams) -> Vec<f64> {
    let (c1, f) = ladder_estimate(geometry.aspect_ratio(), material.poisson_ratio());
    let a = geometry.half_width();
    let t = geometry.thickness();
    let linear = c1 * t * material.residual_stress() / (a * a);
    let cubic = f * t / a.powi(4) * material.biaxial_modulus();
    (0..12)
        .map(|k| {
            let h = 0.5 * t * 1000f64.powf(k as f64 / 11.0);
            linear * h + cubic * h * h * h
        })
        .collect()
}

/// Solve every pressure of the ladder in increasing order, warm-starting
/// each solve from the previous equilibrium.
pub fn solve_pressure_sweep(
    geometry: &MembraneGeometry,
    material: &MaterialParams,
    config: &SolverConfig,
) -> Result<Vec<DeflectionField>> {
    check_inputs(material, config)?;
    let pressures = if config.pressure_steps.is_empty() {
        default_pressure_ladder(geometry, material)
    } else {
        config.pressure_steps.clone()
    };
    let (c1, f) = ladder_estimate(geometry.aspect_ratio(), material.poisson_ratio());
    let a = geometry.half_width();
    let t = geometry.thickness();
    let law = crate::model::LoadDeflectionLaw {
        linear: c1 * t * material.residual_stress() / (a * a),
        cubic: f * t / a.powi(4) * material.biaxial_modulus(),
    };

    let mut state = MembraneState::new(geometry, material, config);
    let mut fields = Vec::with_capacity(pressures.len());
    let mut previous_estimate: Option<f64> = None;
    for &p in &pressures {
        let estimate = law.deflection(p)?;
        if let Some(prev) = previous_estimate {
            state.rescale(estimate / prev);
        }
        previous_estimate = Some(estimate);
        let outcome = state.solve(p, config, false);
        let field = state.field(&outcome);
        if !field.converged {
            return Err(Error::NotConverged { field: Box::new(field) });
        }
        log::debug!(
            "p = {p:.4e} Pa: h = {:.6e} m after {} iterations",
            field.center_deflection(),
            field.iterations
        );
        fields.push(field);
    }
    Ok(fields)
}

/// Shape coefficients recovered from a solver sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFit {
    pub c1: f64,
    pub f: f64,
    /// Pa/m
    pub linear: f64,
    /// Pa/m³
    pub cubic: f64,
    /// RMS relative misfit of `P = A·h + B·h³`.
    pub relative_residual: f64,
    /// `(P, h_center)` for every step.
    pub samples: Vec<(f64, f64)>,
}

/// Fit `P = A·h + B·h³` to `(P, h)` pairs, minimizing relative residuals.
/// Returns `(A, B, rms relative residual)`.
pub fn fit_cubic_law(samples: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::TooFewPoints { found: samples.len() });
    }
    // Rows r1 = h/P, r2 = h³/P with target 1; columns scaled to unit norm.
    let rows: Vec<(f64, f64)> = samples.iter().map(|&(p, h)| (h / p, h * h * h / p)).collect();
    let n1 = rows.iter().map(|r| r.0 * r.0).sum::<f64>().sqrt();
    let n2 = rows.iter().map(|r| r.1 * r.1).sum::<f64>().sqrt();
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(r1, r2) in &rows {
        let (x1, x2) = (r1 / n1, r2 / n2);
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1;
        b2 += x2;
    }
    let det = s11 * s22 - s12 * s12;
    if !(det.abs() > 1e-14) {
        return Err(Error::DegenerateAbscissa);
    }
    let a = (b1 * s22 - b2 * s12) / det / n1;
    let b = (s11 * b2 - s12 * b1) / det / n2;
    let rms = (rows.iter().map(|&(r1, r2)| (a * r1 + b * r2 - 1.0).powi(2)).sum::<f64>() / rows.len() as f64).sqrt();
    Ok((a, b, rms))
}

/// Recompute `C₁` and `f` for this geometry and material.
pub fn extract_coefficients(
    geometry: &MembraneGeometry,
    material: &MaterialParams,
    config: &SolverConfig,
) -> Result<CoefficientFit> {
    let fields = solve_pressure_sweep(geometry, material, config)?;
    let samples: Vec<(f64, f64)> = fields.iter().map(|f| (f.pressure, f.center_deflection())).collect();
    let (linear, cubic, residual) = fit_cubic_law(&samples)?;
    if residual > 0.01 {
        return Err(Error::PoorFit { residual });
    }
    let a = geometry.half_width();
    let t = geometry.thickness();
    let c1 = linear * a * a / (t * material.residual_stress());
    let f = cubic * a.powi(4) * (1.0 - material.poisson_ratio()) / (material.youngs_modulus() * t);
    Ok(CoefficientFit {
        c1,
        f,
        linear,
        cubic,
        relative_residual: residual,
        samples,
    })
}

/// Material and geometry of the reference coefficient study: 1 mm wide,
/// 100 nm thick, E = 220 GPa, σ₀ = 420 MPa (typical LPCVD nitride).
pub fn reference_membrane(aspect_ratio: f64, nu: f64) -> Result<(MembraneGeometry, MaterialParams)> {
    let a = 0.5e-3;
    Ok((
        MembraneGeometry::new(a, a * aspect_ratio, 100e-9)?,
        MaterialParams::new(220e9, nu, REFERENCE_RESIDUAL_STRESS)?,
    ))
}

/// Residual stress used by [`reference_membrane`], Pa.
pub const REFERENCE_RESIDUAL_STRESS: f64 = 420e6;
