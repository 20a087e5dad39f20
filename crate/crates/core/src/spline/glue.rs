use std::f64::consts::PI;

use super::assembly::{assemble_quadratic_pairs, LinearSplineField, QuadraticSplineField};
use super::fields::{unpack, VelocityPair};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::harmonic::{AnalyticSeries, C64};
use crate::planar::{solve_modified, BladeSolution, SolveOptions, VelocityDistribution};

const SECANT_MAX_ITER: usize = 40;

/// An assembled section of either degree.
#[derive(Debug, Clone, PartialEq)]
pub enum SectionField {
    Linear(LinearSplineField),
    Quadratic(QuadraticSplineField),
}

impl SectionField {
    pub fn field(&self) -> &super::assembly::SplineField {
        match self {
            SectionField::Linear(l) => &l.field,
            SectionField::Quadratic(q) => &q.field,
        }
    }
}

/// Lower-blade data handed from one quadratic section to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedLowerData {
    /// `(u, v)` of the previous section at `h = 1`.
    pub lower_pair: VelocityPair,
    /// `w1` of the previous section at its branch point, plus its `w2`.
    pub w1_at_branch: f64,
    pub f2: AnalyticSeries,
    /// Branch point of the shared blade.
    pub branch: Point2,
}

/// Carries the `h = 1` trace of `first` over as the lower blade of the next
/// section. The next section's `w1` constant is `w1(B) + w2` of the first.
pub fn glue_sections(first: &SectionField, shared_branch: Point2) -> Result<GluedLowerData> {
    let q = match first {
        SectionField::Linear(_) => return Err(Error::GluingUnsupportedInLinearMode),
        SectionField::Quadratic(q) => q,
    };
    let b = q.field.branch_point();
    Ok(GluedLowerData {
        lower_pair: q.field.pair_at(1.0),
        w1_at_branch: q.w1().eval(b)? + q.w2,
        f2: q.f2.clone(),
        branch: shared_branch,
    })
}

/// Second section of a glued chain.
#[derive(Debug, Clone)]
pub struct GluedSection {
    pub field: QuadraticSplineField,
    pub upper: BladeSolution,
    /// `w` at the upper blade's branch point and `h = 1`.
    pub branch_residual: f64,
    pub iterations: usize,
}

/// `∫ (u dx + v dy)` along the unit circle from angle `a` to angle `b`.
fn arc_work(pair: &VelocityPair, a: f64, b: f64) -> Result<f64> {
    const X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let d = (b - a + PI).rem_euclid(2.0 * PI) - PI;
    let panels = 256;
    let h = d / panels as f64;
    let mut acc = 0.0;
    for j in 0..panels {
        let mid = a + h * (j as f64 + 0.5);
        for (x, w) in X.iter().zip(W) {
            let t = mid + 0.5 * h * x;
            let z = C64::from_polar(1.0, t);
            let f = pair.complex_value(Point2::new(z.re, z.im))?;
            acc += w * 0.5 * h * (f * C64::new(0.0, 1.0) * z).im;
        }
    }
    Ok(acc)
}

struct Trial {
    upper: BladeSolution,
    p1: VelocityPair,
    residual: f64,
}

/// Solves the upper blade for a trial `w2` and evaluates `w` at its branch
/// point and `h = 1`, integrating `(u1, v1)` from the lower branch point.
fn trial(
    glued: &GluedLowerData,
    upper: &VelocityDistribution,
    w2: f64,
    opts: SolveOptions,
) -> Result<Trial> {
    let shift = glued.w1_at_branch + 2.0 * w2;
    let sol = solve_modified(upper, shift, opts)?;
    let upper_pair = unpack(&sol.velocity_series()?, shift);
    let p2 = VelocityPair::analytic(glued.f2.clone());
    let p1 = upper_pair.sub(&glued.lower_pair).sub(&p2);
    let bu = sol.branch_point();
    let bl = glued.branch;
    let w0 = arc_work(&p1, bl.y.atan2(bl.x), bu.y.atan2(bu.x))?;
    Ok(Trial {
        residual: w0 + glued.w1_at_branch + w2,
        upper: sol,
        p1,
    })
}

/// Determines `w2` of the glued section from the upper blade data so that
/// `w` vanishes at the upper branch point, by secant iteration starting
/// from `w2_guess`. The field is assembled once at the converged `w2`.
pub fn solve_glued_section(
    glued: &GluedLowerData,
    upper: &VelocityDistribution,
    w2_guess: f64,
    opts: SolveOptions,
) -> Result<GluedSection> {
    if glued.f2.max_abs_coefficient() != 0.0 {
        return Err(Error::AnsatzInconsistent(
            "upper blade data cannot carry a non-constant w1".into(),
        ));
    }
    let tol = 1e-12 * (1.0 + glued.w1_at_branch.abs());
    let mut x0 = w2_guess;
    let mut t0 = trial(glued, upper, x0, opts)?;
    let found = if t0.residual.abs() < tol {
        (x0, t0, 0)
    } else {
        let mut x1 = w2_guess + 1e-3 * w2_guess.abs().max(1.0);
        let mut t1 = trial(glued, upper, x1, opts)?;
        let mut iter = 1;
        loop {
            if t1.residual.abs() < tol {
                break (x1, t1, iter);
            }
            let denom = t1.residual - t0.residual;
            if iter == SECANT_MAX_ITER || denom == 0.0 || !denom.is_finite() {
                return Err(Error::OptimizerFailed(format!(
                    "w2 of the glued section did not converge (residual {:e})",
                    t1.residual
                )));
            }
            let x2 = x1 - t1.residual * (x1 - x0) / denom;
            x0 = x1;
            x1 = x2;
            t0 = std::mem::replace(&mut t1, trial(glued, upper, x2, opts)?);
            iter += 1;
        }
    };
    let (w2, t, iterations) = found;
    let field = assemble_quadratic_pairs(
        glued.lower_pair.clone(),
        t.p1,
        &glued.f2,
        glued.w1_at_branch,
        w2,
        glued.branch,
    )?;
    let branch_residual = field.field.eval(t.upper.branch_point(), 1.0)?[2];
    Ok(GluedSection {
        field,
        upper: t.upper,
        branch_residual,
        iterations,
    })
}
