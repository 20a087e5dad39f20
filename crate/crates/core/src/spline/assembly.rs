use serde::Serialize;

use super::fields::{
    compute_w0, compute_w1_quadratic, fix_w0_constant, unpack, ScalarField, VelocityPair,
};
use crate::error::Result;
use crate::geometry::Point2;
use crate::harmonic::{integrate_series, AnalyticSeries, C64};

/// Residual tolerance with closed-form derivatives.
pub const ANALYTIC_TOL: f64 = 1e-8;
/// Residual tolerance with central differences.
pub const FD_TOL: f64 = 1e-6;
pub const FD_STEP: f64 = 1e-4;

/// Velocity `(u, v, w)` polynomial in `h`:
/// `u + ... = Σ_k h^k (u_k, v_k, w_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineField {
    pairs: Vec<VelocityPair>,
    potentials: Vec<ScalarField>,
    branch: Point2,
}

impl SplineField {
    pub fn degree(&self) -> usize {
        self.pairs.len() - 1
    }

    /// `(u_k, v_k)`.
    pub fn pair(&self, k: usize) -> &VelocityPair {
        &self.pairs[k]
    }

    /// `w_k`.
    pub fn potential(&self, k: usize) -> &ScalarField {
        &self.potentials[k]
    }

    pub fn branch_point(&self) -> Point2 {
        self.branch
    }

    /// In-plane velocity pair at height `h`.
    pub fn pair_at(&self, h: f64) -> VelocityPair {
        let mut acc = self.pairs[0].clone();
        let mut hk = 1.0;
        for p in &self.pairs[1..] {
            hk *= h;
            acc = acc.add(&p.scale(hk));
        }
        acc
    }

    pub fn eval(&self, p: Point2, h: f64) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        let mut hk = 1.0;
        for (pair, w) in self.pairs.iter().zip(&self.potentials) {
            let (u, v) = pair.eval(p)?;
            out[0] += hk * u;
            out[1] += hk * v;
            out[2] += hk * w.eval(p)?;
            hk *= h;
        }
        Ok(out)
    }

    /// `d[i][j] = ∂ component_i / ∂ (x, y, h)_j`.
    pub fn derivatives(&self, p: Point2, h: f64) -> Result<[[f64; 3]; 3]> {
        let mut d = [[0.0; 3]; 3];
        for (k, (pair, w)) in self.pairs.iter().zip(&self.potentials).enumerate() {
            let hk = h.powi(k as i32);
            let dhk = if k == 0 {
                0.0
            } else {
                k as f64 * h.powi(k as i32 - 1)
            };
            let j = pair.jacobian(p)?;
            let (u, v) = pair.eval(p)?;
            let (wx, wy) = w.gradient(p)?;
            let wv = w.eval(p)?;
            d[0][0] += hk * j[0][0];
            d[0][1] += hk * j[0][1];
            d[1][0] += hk * j[1][0];
            d[1][1] += hk * j[1][1];
            d[2][0] += hk * wx;
            d[2][1] += hk * wy;
            d[0][2] += dhk * u;
            d[1][2] += dhk * v;
            d[2][2] += dhk * wv;
        }
        Ok(d)
    }

    fn fd_derivatives(&self, p: Point2, h: f64, step: f64) -> Result<[[f64; 3]; 3]> {
        let mut d = [[0.0; 3]; 3];
        let offsets = [(step, 0.0, 0.0), (0.0, step, 0.0), (0.0, 0.0, step)];
        for (j, (dx, dy, dh)) in offsets.into_iter().enumerate() {
            let a = self.eval(p + Point2::new(dx, dy), h + dh)?;
            let b = self.eval(p - Point2::new(dx, dy), h - dh)?;
            for i in 0..3 {
                d[i][j] = (a[i] - b[i]) / (2.0 * step);
            }
        }
        Ok(d)
    }
}

/// Degree-one field: `u = u0 + h u1`, `w = w0 + h w1` with constant `w1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSplineField {
    pub f1: AnalyticSeries,
    pub f0_analytic: AnalyticSeries,
    pub w1: f64,
    pub field: SplineField,
}

impl LinearSplineField {
    pub fn w0(&self) -> &ScalarField {
        self.field.potential(0)
    }
}

/// Degree-two field with constant `w2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSplineField {
    pub f2: AnalyticSeries,
    pub w2: f64,
    pub field: SplineField,
}

impl QuadraticSplineField {
    pub fn f1_pair(&self) -> &VelocityPair {
        self.field.pair(1)
    }

    pub fn f0_pair(&self) -> &VelocityPair {
        self.field.pair(0)
    }

    pub fn w0(&self) -> &ScalarField {
        self.field.potential(0)
    }

    pub fn w1(&self) -> &ScalarField {
        self.field.potential(1)
    }
}

/// `(u0, v0) + h (u1, v1)` with `u0_x + v0_y = -w1`; `w0` from `f1`,
/// vanishing at the branch point.
pub fn assemble_linear(
    f0a: &AnalyticSeries,
    f1: &AnalyticSeries,
    w1: f64,
    b: Point2,
) -> Result<LinearSplineField> {
    let w0 = fix_w0_constant(compute_w0(f1, C64::new(b.x, b.y))?, b)?;
    let field = SplineField {
        pairs: vec![unpack(f0a, w1), VelocityPair::analytic(f1.clone())],
        potentials: vec![w0, ScalarField::constant(w1)],
        branch: b,
    };
    Ok(LinearSplineField {
        f1: f1.clone(),
        f0_analytic: f0a.clone(),
        w1,
        field,
    })
}

/// Quadratic field from analytic data: `w1 = 2 Im ∫ f2 + w1_at_branch`,
/// `(u1, v1)` with divergence `-2 w2`, and `(u0, v0)` with divergence
/// `-w1` pointwise.
pub fn assemble_quadratic(
    f0a: &AnalyticSeries,
    f1a: &AnalyticSeries,
    f2: &AnalyticSeries,
    w1_at_branch: f64,
    w2: f64,
    b: Point2,
) -> Result<QuadraticSplineField> {
    let zb = C64::new(b.x, b.y);
    // W0 with Im W0 = w1
    let w_shift =
        integrate_series(f2, zb)?
            .scale(C64::new(2.0, 0.0))
            .add(&AnalyticSeries::constant(
                C64::new(0.0, w1_at_branch),
                f2.orientation(),
            ));
    let p0 = if w_shift.trimmed().max_power() == 0
        && w_shift.neg_coeffs().iter().all(|c| c.norm() == 0.0)
    {
        unpack(f0a, w1_at_branch)
    } else {
        VelocityPair::with_shift_derivative(f0a.clone(), &w_shift)?
    };
    let p1 = VelocityPair::with_divergence_shift(f1a.clone(), 2.0 * w2);
    assemble_quadratic_pairs(p0, p1, f2, w1_at_branch, w2, b)
}

/// Quadratic field from explicit `(u0, v0)` and `(u1, v1)` pairs.
pub fn assemble_quadratic_pairs(
    p0: VelocityPair,
    p1: VelocityPair,
    f2: &AnalyticSeries,
    w1_at_branch: f64,
    w2: f64,
    b: Point2,
) -> Result<QuadraticSplineField> {
    let zb = C64::new(b.x, b.y);
    let w0 = fix_w0_constant(ScalarField::from_gradient(&p1, zb)?, b)?;
    let w1 = compute_w1_quadratic(f2, zb)?.add_constant(w1_at_branch);
    let w1 = if w1.is_constant() {
        ScalarField::constant(w1_at_branch)
    } else {
        w1
    };
    let field = SplineField {
        pairs: vec![p0, p1, VelocityPair::analytic(f2.clone())],
        potentials: vec![w0, w1, ScalarField::constant(w2)],
        branch: b,
    };
    Ok(QuadraticSplineField {
        f2: f2.clone(),
        w2,
        field,
    })
}

impl From<&LinearSplineField> for QuadraticSplineField {
    fn from(l: &LinearSplineField) -> Self {
        let mut field = l.field.clone();
        field
            .pairs
            .push(VelocityPair::analytic(AnalyticSeries::zero(
                l.f1.orientation(),
            )));
        field.potentials.push(ScalarField::constant(0.0));
        QuadraticSplineField {
            f2: AnalyticSeries::zero(l.f1.orientation()),
            w2: 0.0,
            field,
        }
    }
}

/// Box in `(x, y, h)` sampled on a regular lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualGrid {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub h: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    pub nh: usize,
    pub fd_step: f64,
}

impl Default for ResidualGrid {
    /// 21 × 21 × 5 nodes on `[-1, 1]² × [0, 1]`.
    fn default() -> Self {
        Self::over([-1.0, 1.0], [-1.0, 1.0])
    }
}

impl ResidualGrid {
    pub fn over(x: [f64; 2], y: [f64; 2]) -> Self {
        Self {
            x,
            y,
            h: [0.0, 1.0],
            nx: 21,
            ny: 21,
            nh: 5,
            fd_step: FD_STEP,
        }
    }

    fn axis(r: [f64; 2], n: usize, k: usize) -> f64 {
        if n == 1 {
            r[0]
        } else {
            r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64
        }
    }

    pub fn nodes(&self) -> Vec<(Point2, f64)> {
        let mut out = Vec::with_capacity(self.nx * self.ny * self.nh);
        for k in 0..self.nh {
            for j in 0..self.ny {
                for i in 0..self.nx {
                    out.push((
                        Point2::new(
                            Self::axis(self.x, self.nx, i),
                            Self::axis(self.y, self.ny, j),
                        ),
                        Self::axis(self.h, self.nh, k),
                    ));
                }
            }
        }
        out
    }
}

/// Maximum residuals of `u_x + v_y + w_h = 0` and of
/// `(u_y - v_x, u_h - w_x, v_h - w_y) = 0` over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldResiduals {
    pub max_div: f64,
    pub max_curl: [f64; 3],
    pub fd_max_div: f64,
    pub fd_max_curl: [f64; 3],
    /// Largest gap between the closed-form and difference residuals.
    pub fd_agreement: f64,
    pub grid: ResidualGrid,
    pub tolerance_pass: bool,
}

impl FieldResiduals {
    pub fn max_analytic(&self) -> f64 {
        self.max_curl.iter().fold(self.max_div, |a, &b| a.max(b))
    }

    pub fn max_fd(&self) -> f64 {
        self.fd_max_curl
            .iter()
            .fold(self.fd_max_div, |a, &b| a.max(b))
    }
}

fn residual_vector(d: [[f64; 3]; 3]) -> [f64; 4] {
    [
        d[0][0] + d[1][1] + d[2][2],
        d[0][1] - d[1][0],
        d[0][2] - d[2][0],
        d[1][2] - d[2][1],
    ]
}

pub fn field_residuals(field: &SplineField, grid: &ResidualGrid) -> Result<FieldResiduals> {
    let mut an = [0.0f64; 4];
    let mut fd = [0.0f64; 4];
    let mut agree = 0.0f64;
    for (p, h) in grid.nodes() {
        let a = residual_vector(field.derivatives(p, h)?);
        let f = residual_vector(field.fd_derivatives(p, h, grid.fd_step)?);
        for i in 0..4 {
            an[i] = an[i].max(a[i].abs());
            fd[i] = fd[i].max(f[i].abs());
            agree = agree.max((a[i] - f[i]).abs());
        }
    }
    let max_a = an.iter().fold(0.0f64, |m, &x| m.max(x));
    let max_f = fd.iter().fold(0.0f64, |m, &x| m.max(x));
    Ok(FieldResiduals {
        max_div: an[0],
        max_curl: [an[1], an[2], an[3]],
        fd_max_div: fd[0],
        fd_max_curl: [fd[1], fd[2], fd[3]],
        fd_agreement: agree,
        grid: *grid,
        tolerance_pass: max_a < ANALYTIC_TOL && max_f < FD_TOL,
    })
}
