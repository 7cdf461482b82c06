//! Finite-difference discretization of the Föppl–von Kármán membrane
//! energy on a uniform rectangular grid.
//!
//! Each grid cell is integrated with the trapezoid rule: the energy density
//! is evaluated at the four corners, where the in-plane derivatives are the
//! difference quotients along the two cell edges that meet there. The
//! scheme is invariant under the symmetries of the grid and has no
//! zero-energy checkerboard modes.
//!
//! Unknowns are stored field-major: all `u`, then all `v`, then all `w`,
//! each in row-major node order (`node = j·nx + i`, `x` along the short
//! side).

use super::ncg::QuarticObjective;

pub(crate) const U: usize = 0;
pub(crate) const V: usize = 1;
pub(crate) const W: usize = 2;

/// The discrete problem: grid, boundary conditions, material and load.
#[derive(Debug, Clone)]
pub struct MembraneProblem {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub thickness: f64,
    pub residual_stress: f64,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub pressure: f64,
    /// One flag per unknown; fixed unknowns stay at their initial value.
    pub fixed: Vec<bool>,
    /// Trapezoid weight of each node (area it represents).
    pub node_area: Vec<f64>,
}

/// Corner `k` of a cell uses x-edge `CORNER_X[k]` (0 = bottom, 1 = top)
/// and y-edge `CORNER_Y[k]` (0 = left, 1 = right).
const CORNER_X: [usize; 4] = [0, 0, 1, 1];
const CORNER_Y: [usize; 4] = [0, 1, 0, 1];

#[derive(Clone, Copy, Default)]
struct EdgeDiffs {
    /// bottom and top edge x-differences
    x: [f64; 2],
    /// left and right edge y-differences
    y: [f64; 2],
}

impl MembraneProblem {
    /// Clamped rectangle with `nx × ny` nodes spanning `2a × 2b`.
    pub fn full(nx: usize, ny: usize, half_width: f64, half_length: f64) -> Self {
        let dx = 2.0 * half_width / (nx - 1) as f64;
        let dy = 2.0 * half_length / (ny - 1) as f64;
        let mut fixed = vec![false; 3 * nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
                    for f in [U, V, W] {
                        fixed[f * nx * ny + j * nx + i] = true;
                    }
                }
            }
        }
        Self::with_boundary(nx, ny, dx, dy, fixed)
    }

    /// Quarter of a clamped rectangle, `[0, a] × [0, b]`, with mirror
    /// conditions on the two symmetry lines. `nx`, `ny` are the node counts
    /// of the equivalent full grid and must be odd.
    pub fn quarter(nx: usize, ny: usize, half_width: f64, half_length: f64) -> Self {
        let dx = 2.0 * half_width / (nx - 1) as f64;
        let dy = 2.0 * half_length / (ny - 1) as f64;
        let qx = nx.div_ceil(2);
        let qy = ny.div_ceil(2);
        let n = qx * qy;
        let mut fixed = vec![false; 3 * n];
        for j in 0..qy {
            for i in 0..qx {
                let node = j * qx + i;
                if i == qx - 1 || j == qy - 1 {
                    for f in [U, V, W] {
                        fixed[f * n + node] = true;
                    }
                }
                if i == 0 {
                    fixed[U * n + node] = true;
                }
                if j == 0 {
                    fixed[V * n + node] = true;
                }
            }
        }
        Self::with_boundary(qx, qy, dx, dy, fixed)
    }

    fn with_boundary(nx: usize, ny: usize, dx: f64, dy: f64, fixed: Vec<bool>) -> Self {
        let mut node_area = vec![0.0; nx * ny];
        let quarter_cell = 0.25 * dx * dy;
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let n00 = j * nx + i;
                for n in [n00, n00 + 1, n00 + nx, n00 + nx + 1] {
                    node_area[n] += quarter_cell;
                }
            }
        }
        MembraneProblem {
            nx,
            ny,
            dx,
            dy,
            thickness: 0.0,
            residual_stress: 0.0,
            youngs_modulus: 0.0,
            poisson_ratio: 0.0,
            pressure: 0.0,
            fixed,
            node_area,
        }
    }

    pub fn nodes(&self) -> usize {
        self.nx * self.ny
    }

    /// Half the plane-stress stiffness factor, `E / (2(1−ν²))`.
    fn half_stiffness(&self) -> f64 {
        self.youngs_modulus / (2.0 * (1.0 - self.poisson_ratio * self.poisson_ratio))
    }

    fn cell_nodes(&self, i: usize, j: usize) -> [usize; 4] {
        let n00 = j * self.nx + i;
        [n00, n00 + 1, n00 + self.nx, n00 + self.nx + 1]
    }

    fn edge_diffs(&self, field: &[f64], nodes: &[usize; 4]) -> EdgeDiffs {
        let [n00, n10, n01, n11] = *nodes;
        EdgeDiffs {
            x: [
                (field[n10] - field[n00]) / self.dx,
                (field[n11] - field[n01]) / self.dx,
            ],
            y: [
                (field[n01] - field[n00]) / self.dy,
                (field[n11] - field[n10]) / self.dy,
            ],
        }
    }

    /// Scatter edge-difference adjoints back to the cell's nodes.
    fn scatter(&self, grad: &mut [f64], nodes: &[usize; 4], adj: &EdgeDiffs) {
        let [n00, n10, n01, n11] = *nodes;
        let (ax, ay) = (adj.x, adj.y);
        grad[n00] += -ax[0] / self.dx - ay[0] / self.dy;
        grad[n10] += ax[0] / self.dx - ay[1] / self.dy;
        grad[n01] += -ax[1] / self.dx + ay[0] / self.dy;
        grad[n11] += ax[1] / self.dx + ay[1] / self.dy;
    }

    /// Total potential energy; writes the gradient (zero on fixed unknowns).
    pub fn energy_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.nodes();
        let (us, rest) = x.split_at(n);
        let (vs, ws) = rest.split_at(n);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let t = self.thickness;
        let s0 = self.residual_stress;
        let d = self.half_stiffness();
        let nu = self.poisson_ratio;
        let shear = 0.5 * (1.0 - nu);
        let wq = 0.25 * self.dx * self.dy;

        let mut total = Neumaier::default();
        for j in 0..self.ny - 1 {
            for i in 0..self.nx - 1 {
                let nodes = self.cell_nodes(i, j);
                let du = self.edge_diffs(us, &nodes);
                let dv = self.edge_diffs(vs, &nodes);
                let dw = self.edge_diffs(ws, &nodes);
                let mut au = EdgeDiffs::default();
                let mut av = EdgeDiffs::default();
                let mut aw = EdgeDiffs::default();
                let mut cell = 0.0;
                for k in 0..4 {
                    let (cx, cy) = (CORNER_X[k], CORNER_Y[k]);
                    let (ux, uy) = (du.x[cx], du.y[cy]);
                    let (vx, vy) = (dv.x[cx], dv.y[cy]);
                    let (wx, wy) = (dw.x[cx], dw.y[cy]);
                    let exx = ux + 0.5 * wx * wx;
                    let eyy = vy + 0.5 * wy * wy;
                    let gxy = uy + vx + wx * wy;
                    cell += t * (s0 * (exx + eyy)
                        + d * (exx * exx + eyy * eyy + 2.0 * nu * exx * eyy + shear * gxy * gxy));
                    let nxx = wq * t * (s0 + 2.0 * d * (exx + nu * eyy));
                    let nyy = wq * t * (s0 + 2.0 * d * (eyy + nu * exx));
                    let nxy = wq * t * 2.0 * d * shear * gxy;
                    au.x[cx] += nxx;
                    au.y[cy] += nxy;
                    av.x[cx] += nxy;
                    av.y[cy] += nyy;
                    aw.x[cx] += nxx * wx + nxy * wy;
                    aw.y[cy] += nyy * wy + nxy * wx;
                }
                total.add(wq * cell);
                self.scatter(&mut grad[..n], &nodes, &au);
                self.scatter(&mut grad[n..2 * n], &nodes, &av);
                self.scatter(&mut grad[2 * n..], &nodes, &aw);
            }
        }
        let p = self.pressure;
        for (k, (&w, &area)) in ws.iter().zip(&self.node_area).enumerate() {
            total.add(-p * area * w);
            grad[2 * n + k] -= p * area;
        }
        for (g, &f) in grad.iter_mut().zip(&self.fixed) {
            if f {
                *g = 0.0;
            }
        }
        total.sum()
    }

    /// Coefficients of `energy(x + α·d) − energy(x)` as a polynomial in α.
    pub fn line_coefficients(&self, x: &[f64], dir: &[f64]) -> [f64; 4] {
        let n = self.nodes();
        let (us, rest) = x.split_at(n);
        let (vs, ws) = rest.split_at(n);
        let (dus, rest) = dir.split_at(n);
        let (dvs, dws) = rest.split_at(n);
        let t = self.thickness;
        let s0 = self.residual_stress;
        let d = self.half_stiffness();
        let nu = self.poisson_ratio;
        let shear = 0.5 * (1.0 - nu);
        let wq = 0.25 * self.dx * self.dy;

        let mut acc = [Neumaier::default(), Neumaier::default(), Neumaier::default(), Neumaier::default()];
        for j in 0..self.ny - 1 {
            for i in 0..self.nx - 1 {
                let nodes = self.cell_nodes(i, j);
                let du = self.edge_diffs(us, &nodes);
                let dv = self.edge_diffs(vs, &nodes);
                let dw = self.edge_diffs(ws, &nodes);
                let pu = self.edge_diffs(dus, &nodes);
                let pv = self.edge_diffs(dvs, &nodes);
                let pw = self.edge_diffs(dws, &nodes);
                let mut cell = [0.0; 4];
                for k in 0..4 {
                    let (cx, cy) = (CORNER_X[k], CORNER_Y[k]);
                    let (wx, wy) = (dw.x[cx], dw.y[cy]);
                    let (qwx, qwy) = (pw.x[cx], pw.y[cy]);
                    let exx = [
                        du.x[cx] + 0.5 * wx * wx,
                        pu.x[cx] + wx * qwx,
                        0.5 * qwx * qwx,
                    ];
                    let eyy = [
                        dv.y[cy] + 0.5 * wy * wy,
                        pv.y[cy] + wy * qwy,
                        0.5 * qwy * qwy,
                    ];
                    let gxy = [
                        du.y[cy] + dv.x[cx] + wx * wy,
                        pu.y[cy] + pv.x[cx] + wx * qwy + wy * qwx,
                        qwx * qwy,
                    ];
                    let xx = square(&exx);
                    let yy = square(&eyy);
                    let xy = product(&exx, &eyy);
                    let gg = square(&gxy);
                    for p in 1..5 {
                        let mut e = d * (xx[p] + yy[p] + 2.0 * nu * xy[p] + shear * gg[p]);
                        if p <= 2 {
                            e += s0 * (exx[p] + eyy[p]);
                        }
                        cell[p - 1] += e;
                    }
                }
                for p in 0..4 {
                    acc[p].add(wq * t * cell[p]);
                }
            }
        }
        let mut load = Neumaier::default();
        for (&q, &area) in dws.iter().zip(&self.node_area) {
            load.add(area * q);
        }
        acc[0].add(-self.pressure * load.sum());
        [acc[0].sum(), acc[1].sum(), acc[2].sum(), acc[3].sum()]
    }

    /// Gauss–Newton diagonal plus the geometric-stiffness contribution,
    /// floored at a fraction of the prestress stiffness.
    pub fn diagonal(&self, x: &[f64], out: &mut [f64]) {
        let n = self.nodes();
        let (us, rest) = x.split_at(n);
        let (vs, ws) = rest.split_at(n);
        out.iter_mut().for_each(|o| *o = 0.0);
        let t = self.thickness;
        let s0 = self.residual_stress;
        let d = self.half_stiffness();
        let nu = self.poisson_ratio;
        let shear = 0.5 * (1.0 - nu);
        let wq = 0.25 * self.dx * self.dy;
        let (ix, iy) = (1.0 / self.dx, 1.0 / self.dy);

        for j in 0..self.ny - 1 {
            for i in 0..self.nx - 1 {
                let nodes = self.cell_nodes(i, j);
                let du = self.edge_diffs(us, &nodes);
                let dv = self.edge_diffs(vs, &nodes);
                let dw = self.edge_diffs(ws, &nodes);
                for k in 0..4 {
                    let (cx, cy) = (CORNER_X[k], CORNER_Y[k]);
                    let (wx, wy) = (dw.x[cx], dw.y[cy]);
                    let exx = du.x[cx] + 0.5 * wx * wx;
                    let eyy = dv.y[cy] + 0.5 * wy * wy;
                    let gxy = du.y[cy] + dv.x[cx] + wx * wy;
                    let nxx = t * (s0 + 2.0 * d * (exx + nu * eyy));
                    let nyy = t * (s0 + 2.0 * d * (eyy + nu * exx));
                    let nxy = t * 2.0 * d * shear * gxy;
                    for (local, &node) in nodes.iter().enumerate() {
                        let sx = corner_sensitivity_x(local, cx) * ix;
                        let sy = corner_sensitivity_y(local, cy) * iy;
                        if sx == 0.0 && sy == 0.0 {
                            continue;
                        }
                        out[node] += wq * t * 2.0 * d * (sx * sx + shear * sy * sy);
                        out[n + node] += wq * t * 2.0 * d * (sy * sy + shear * sx * sx);
                        let (a, b) = (wx * sx, wy * sy);
                        let c = wx * sy + wy * sx;
                        let material = t * 2.0 * d * (a * a + b * b + 2.0 * nu * a * b + shear * c * c);
                        let geometric = nxx * sx * sx + nyy * sy * sy + 2.0 * nxy * sx * sy;
                        out[2 * n + node] += wq * (material + geometric);
                    }
                }
            }
        }
        let floor_w = 1e-3 * t * s0.abs().max(1e-6 * self.youngs_modulus) * (ix * ix + iy * iy) * self.dx * self.dy;
        let floor_uv = t * 2.0 * d * shear * (ix * ix + iy * iy) * self.dx * self.dy * 1e-3;
        for (k, o) in out.iter_mut().enumerate() {
            let floor = if k >= 2 * n { floor_w } else { floor_uv };
            if !(*o > floor) {
                *o = floor;
            }
            if self.fixed[k] {
                *o = 1.0f64.max(*o);
            }
        }
    }

    /// ‖P·node_area‖ over free deflection unknowns.
    pub fn load_norm(&self) -> f64 {
        let n = self.nodes();
        self.node_area
            .iter()
            .enumerate()
            .filter(|(k, _)| !self.fixed[2 * n + k])
            .map(|(_, a)| (self.pressure * a).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// ∂(x-edge difference · dx)/∂(node value) for cell-local node `local`
/// (0 = 00, 1 = 10, 2 = 01, 3 = 11) and x-edge `edge`.
fn corner_sensitivity_x(local: usize, edge: usize) -> f64 {
    match (local, edge) {
        (0, 0) | (2, 1) => -1.0,
        (1, 0) | (3, 1) => 1.0,
        _ => 0.0,
    }
}

fn corner_sensitivity_y(local: usize, edge: usize) -> f64 {
    match (local, edge) {
        (0, 0) | (1, 1) => -1.0,
        (2, 0) | (3, 1) => 1.0,
        _ => 0.0,
    }
}

fn square(p: &[f64; 3]) -> [f64; 5] {
    product(p, p)
}

fn product(p: &[f64; 3], q: &[f64; 3]) -> [f64; 5] {
    [
        p[0] * q[0],
        p[0] * q[1] + p[1] * q[0],
        p[0] * q[2] + p[1] * q[1] + p[2] * q[0],
        p[1] * q[2] + p[2] * q[1],
        p[2] * q[2],
    ]
}

/// Compensated summation with a fixed accumulation order.
#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

impl QuarticObjective for MembraneProblem {
    fn dim(&self) -> usize {
        3 * self.nodes()
    }

    fn energy_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.energy_and_gradient(x, grad)
    }

    fn line_polynomial(&self, x: &[f64], d: &[f64]) -> [f64; 4] {
        self.line_coefficients(x, d)
    }

    fn diagonal(&self, x: &[f64], out: &mut [f64]) {
        MembraneProblem::diagonal(self, x, out)
    }

    fn gradient_scale(&self) -> f64 {
        self.load_norm()
    }
}
