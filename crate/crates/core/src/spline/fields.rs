use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::harmonic::{integrate_series, AnalyticSeries, Orientation, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Factor `a` in the `f0` correction `i a w1 conj(z)` that makes
/// `v0 + i u0 + correction` analytic when `u0_x + v0_y = -w1`.
pub const CORRECTION_FACTOR: f64 = 0.5;
/// The same correction without the halving; kept as a negative control.
pub const UNHALVED_CORRECTION_FACTOR: f64 = 1.0;

fn to_c(p: Point2) -> C64 {
    C64::new(p.x, p.y)
}

/// Termwise antiderivative with a zero constant coefficient.
fn antiderivative(f: &AnalyticSeries) -> Result<AnalyticSeries> {
    let mut a = integrate_series(f, C64::new(1.0, 0.0))?;
    a.set_coefficient(0, C64::default());
    Ok(a.trimmed())
}

/// In-plane velocity `(u, v)` written as `v + i u = g(z) + K(z)`, with `g`
/// analytic and `K = -(conj(z) W - conj(A)) / 4` for a shift series `A`,
/// `W = A'`. The pair is curl-free and has divergence `-Im W`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityPair {
    analytic: AnalyticSeries,
    shift: Option<AnalyticSeries>,
}

impl VelocityPair {
    pub fn analytic(g: AnalyticSeries) -> Self {
        Self {
            analytic: g.trimmed(),
            shift: None,
        }
    }

    /// Pair with constant divergence `-s`.
    pub fn with_divergence_shift(g: AnalyticSeries, s: f64) -> Self {
        if s == 0.0 {
            return Self::analytic(g);
        }
        Self {
            analytic: g.trimmed(),
            shift: Some(AnalyticSeries::interior(vec![C64::default(), I * s])),
        }
    }

    /// Pair whose divergence is `-Im W` for a single-valued `A = ∫W`.
    pub fn with_shift_derivative(g: AnalyticSeries, w: &AnalyticSeries) -> Result<Self> {
        let a = antiderivative(w).map_err(|e| match e {
            Error::MultivaluedAntiderivative(r) => Error::AnsatzInconsistent(format!(
                "divergence shift has no single-valued antiderivative (residue {r:e})"
            )),
            other => other,
        })?;
        Ok(Self {
            analytic: g.trimmed(),
            shift: Some(a),
        })
    }

    pub fn analytic_part(&self) -> &AnalyticSeries {
        &self.analytic
    }

    pub fn shift(&self) -> Option<&AnalyticSeries> {
        self.shift.as_ref()
    }

    fn correction(&self, z: C64) -> C64 {
        match &self.shift {
            None => C64::default(),
            Some(a) => {
                let w = a.differentiate().eval_unchecked(z);
                -(z.conj() * w - a.eval_unchecked(z).conj()) / 4.0
            }
        }
    }

    fn check(&self, z: C64) -> Result<()> {
        self.analytic.eval(z)?;
        if let Some(a) = &self.shift {
            a.eval(z)?;
        }
        Ok(())
    }

    /// `v + i u` at `p`.
    pub fn complex_value(&self, p: Point2) -> Result<C64> {
        let z = to_c(p);
        Ok(self.analytic.eval(z)? + self.correction(z))
    }

    /// `(u, v)` at `p`.
    pub fn eval(&self, p: Point2) -> Result<(f64, f64)> {
        let f = self.complex_value(p)?;
        Ok((f.im, f.re))
    }

    /// `[[u_x, u_y], [v_x, v_y]]` from closed-form derivatives.
    pub fn jacobian(&self, p: Point2) -> Result<[[f64; 2]; 2]> {
        let z = to_c(p);
        self.check(z)?;
        let gp = self.analytic.differentiate().eval_unchecked(z);
        let (mut fx, mut fy) = (gp, I * gp);
        if let Some(a) = &self.shift {
            let w_series = a.differentiate();
            let w = w_series.eval_unchecked(z);
            let wp = w_series.differentiate().eval_unchecked(z);
            fx += -(w + z.conj() * wp - w.conj()) / 4.0;
            fy += -(-I * w + I * z.conj() * wp + I * w.conj()) / 4.0;
        }
        Ok([[fx.im, fy.im], [fx.re, fy.re]])
    }

    /// `u_x + v_y`, equal to `-Im W`.
    pub fn divergence(&self, p: Point2) -> Result<f64> {
        let z = to_c(p);
        self.check(z)?;
        Ok(match &self.shift {
            None => 0.0,
            Some(a) => -a.differentiate().eval_unchecked(z).im,
        })
    }

    pub fn add(&self, other: &VelocityPair) -> VelocityPair {
        let shift = match (&self.shift, &other.shift) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => Some(a.add(b).trimmed()),
        };
        VelocityPair {
            analytic: self.analytic.add(&other.analytic).trimmed(),
            shift,
        }
    }

    pub fn sub(&self, other: &VelocityPair) -> VelocityPair {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> VelocityPair {
        let k = C64::new(k, 0.0);
        VelocityPair {
            analytic: self.analytic.scale(k),
            shift: self.shift.as_ref().map(|a| a.scale(k)),
        }
    }
}

/// Scalar field `Im P(z) - Im(conj(z) A(z)) / 4 + c`; its gradient is the
/// pair `(P', A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    potential: AnalyticSeries,
    shift: Option<AnalyticSeries>,
    constant: f64,
}

impl ScalarField {
    pub fn constant(c: f64) -> Self {
        Self {
            potential: AnalyticSeries::zero(Orientation::Interior),
            shift: None,
            constant: c,
        }
    }

    pub fn from_potential(p: AnalyticSeries) -> Self {
        Self {
            potential: p.trimmed(),
            shift: None,
            constant: 0.0,
        }
    }

    /// Field whose gradient `(w_x, w_y)` is the given pair, with
    /// `Im P(z_ref) = 0`.
    pub fn from_gradient(pair: &VelocityPair, z_ref: C64) -> Result<Self> {
        Ok(Self {
            potential: integrate_series(pair.analytic_part(), z_ref)?.trimmed(),
            shift: pair.shift().cloned(),
            constant: 0.0,
        })
    }

    pub fn potential(&self) -> &AnalyticSeries {
        &self.potential
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    /// True when the field does not vary in the plane.
    pub fn is_constant(&self) -> bool {
        self.shift.is_none()
            && (1..=self.potential.max_power())
                .all(|k| self.potential.coefficient(k) == C64::default())
            && self
                .potential
                .neg_coeffs()
                .iter()
                .all(|c| *c == C64::default())
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = c;
        self
    }

    pub fn add_constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn eval(&self, p: Point2) -> Result<f64> {
        let z = to_c(p);
        let mut w = self.potential.eval(z)?.im + self.constant;
        if let Some(a) = &self.shift {
            w -= (z.conj() * a.eval(z)?).im / 4.0;
        }
        Ok(w)
    }

    pub fn gradient_pair(&self) -> VelocityPair {
        VelocityPair {
            analytic: self.potential.differentiate().trimmed(),
            shift: self.shift.clone(),
        }
    }

    /// `(w_x, w_y)`.
    pub fn gradient(&self, p: Point2) -> Result<(f64, f64)> {
        self.gradient_pair().eval(p)
    }

    /// `[[w_xx, w_xy], [w_yx, w_yy]]`.
    pub fn hessian(&self, p: Point2) -> Result<[[f64; 2]; 2]> {
        self.gradient_pair().jacobian(p)
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        let shift = match (&self.shift, &other.shift) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => Some(a.add(b).trimmed()),
        };
        ScalarField {
            potential: self.potential.add(&other.potential).trimmed(),
            shift,
            constant: self.constant + other.constant,
        }
    }

    pub fn scale(&self, k: f64) -> ScalarField {
        let kc = C64::new(k, 0.0);
        ScalarField {
            potential: self.potential.scale(kc),
            shift: self.shift.as_ref().map(|a| a.scale(kc)),
            constant: self.constant * k,
        }
    }
}

/// Which divergence the pair is expected to have.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "variant", content = "value", rename_all = "snake_case")]
pub enum CrVariant {
    /// `u_x + v_y = 0`.
    Classical,
    /// `u_x + v_y = -w1`.
    Modified(f64),
    /// `u_x + v_y = -2 w2`; the payload is `w2`.
    Modified2(f64),
}

impl CrVariant {
    pub fn shift(self) -> f64 {
        match self {
            CrVariant::Classical => 0.0,
            CrVariant::Modified(w1) => w1,
            CrVariant::Modified2(w2) => 2.0 * w2,
        }
    }
}

/// Max over `points` of `|u_x + v_y + shift|` and `|u_y - v_x|`, using
/// central differences with step `step`.
pub fn check_cauchy_riemann<F>(
    field: F,
    variant: CrVariant,
    points: &[Point2],
    step: f64,
) -> [f64; 2]
where
    F: Fn(Point2) -> (f64, f64),
{
    let shift = variant.shift();
    let mut out = [0.0f64; 2];
    for &p in points {
        let dx = Point2::new(step, 0.0);
        let dy = Point2::new(0.0, step);
        let (uxp, vxp) = field(p + dx);
        let (uxm, vxm) = field(p - dx);
        let (uyp, vyp) = field(p + dy);
        let (uym, vym) = field(p - dy);
        let h2 = 2.0 * step;
        let ux = (uxp - uxm) / h2;
        let vx = (vxp - vxm) / h2;
        let uy = (uyp - uym) / h2;
        let vy = (vyp - vym) / h2;
        out[0] = out[0].max((ux + vy + shift).abs());
        out[1] = out[1].max((uy - vx).abs());
    }
    out
}

/// `w0 = Im ∫ f1 dz`, zero at `z_ref`; its gradient is `(u1, v1)`.
pub fn compute_w0(f1: &AnalyticSeries, z_ref: C64) -> Result<ScalarField> {
    Ok(ScalarField::from_potential(integrate_series(f1, z_ref)?))
}

/// `w1 = 2 Im ∫ f2 dz`, zero at `z_ref`; its gradient is `(2 u2, 2 v2)`.
pub fn compute_w1_quadratic(f2: &AnalyticSeries, z_ref: C64) -> Result<ScalarField> {
    let p = integrate_series(f2, z_ref)?.scale(C64::new(2.0, 0.0));
    Ok(ScalarField::from_potential(p))
}

/// Adjusts the constant so that the field vanishes at the branch point.
pub fn fix_w0_constant(w0: ScalarField, b: Point2) -> Result<ScalarField> {
    let at_b = w0.eval(b)?;
    let c = w0.constant_term() - at_b;
    Ok(w0.with_constant(c))
}

/// `(u0, v0)` from the analytic series `g = v0 + i u0 + i a w1 conj(z)`
/// with correction factor `a`.
pub fn unpack_with_factor(g: &AnalyticSeries, w1: f64, factor: f64) -> VelocityPair {
    VelocityPair::with_divergence_shift(g.clone(), 2.0 * factor * w1)
}

/// `(u0, v0)` satisfying `u0_x + v0_y = -w1`, `u0_y = v0_x` from its
/// analytic counterpart.
pub fn unpack(g: &AnalyticSeries, w1: f64) -> VelocityPair {
    unpack_with_factor(g, w1, CORRECTION_FACTOR)
}

/// Inverse of [`unpack`]: the analytic series of a pair whose divergence
/// is the constant `-w1`.
pub fn pack(pair: &VelocityPair, w1: f64) -> Result<AnalyticSeries> {
    let expected =
        VelocityPair::with_divergence_shift(AnalyticSeries::zero(Orientation::Interior), w1);
    let matches = match (pair.shift(), expected.shift()) {
        (None, None) => true,
        (Some(a), Some(b)) => a.sub(b).max_abs_coefficient() <= 1e-14 * b.max_abs_coefficient(),
        _ => false,
    };
    if !matches {
        return Err(Error::AnsatzInconsistent(format!(
            "pair divergence is not the constant {}",
            -w1
        )));
    }
    Ok(pair.analytic_part().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[(f64, f64)]) -> AnalyticSeries {
        AnalyticSeries::interior(c.iter().map(|&(a, b)| C64::new(a, b)).collect())
    }

    fn grid() -> Vec<Point2> {
        let mut v = Vec::new();
        for i in 0..7 {
            for j in 0..7 {
                v.push(Point2::new(-0.9 + 0.3 * i as f64, -0.9 + 0.3 * j as f64));
            }
        }
        v
    }

    #[test]
    fn linear_analytic_pair() {
        // f = i z: u = x, v = -y
        let pair = VelocityPair::analytic(poly(&[(0.0, 0.0), (0.0, 1.0)]));
        let (u, v) = pair.eval(Point2::new(0.3, -0.7)).unwrap();
        assert!((u - 0.3).abs() < 1e-15 && (v - 0.7).abs() < 1e-15);
        let r = check_cauchy_riemann(
            |p| pair.eval(p).unwrap(),
            CrVariant::Classical,
            &grid(),
            1e-4,
        );
        assert!(r[0] < 1e-10 && r[1] < 1e-10);
    }

    #[test]
    fn pure_divergence_absorber() {
        let w1 = 0.7;
        let r = check_cauchy_riemann(|p| (-w1 * p.x, 0.0), CrVariant::Modified(w1), &grid(), 1e-4);
        assert!(r[0] < 1e-12 && r[1] < 1e-12);
    }

    #[test]
    fn w0_examples() {
        let z0 = C64::new(0.0, 0.0);
        let w = compute_w0(&poly(&[(0.0, 0.0), (0.0, 1.0)]), z0).unwrap();
        let p = Point2::new(0.4, -1.3);
        assert!((w.eval(p).unwrap() - (0.16 - 1.69) / 2.0).abs() < 1e-14);

        let (a, b) = (0.3, -1.1);
        let w = compute_w0(&poly(&[(a, b)]), z0).unwrap();
        assert!((w.eval(p).unwrap() - (b * p.x + a * p.y)).abs() < 1e-14);

        let w = compute_w0(&poly(&[(0.0, 0.0), (0.0, 0.0), (0.0, 1.0)]), z0).unwrap();
        let want = p.x.powi(3) / 3.0 - p.x * p.y * p.y;
        assert!((w.eval(p).unwrap() - want).abs() < 1e-14);
        let h = w.hessian(p).unwrap();
        assert!((h[0][0] + h[1][1]).abs() < 1e-13);
    }

    #[test]
    fn w1_examples() {
        let z0 = C64::new(0.0, 0.0);
        let w = compute_w1_quadratic(&poly(&[(0.0, 0.0), (0.0, 1.0)]), z0).unwrap();
        let p = Point2::new(0.4, -1.3);
        assert!((w.eval(p).unwrap() - (0.16 - 1.69)).abs() < 1e-14);
        let (a, b) = (0.25, 2.0);
        let w = compute_w1_quadratic(&poly(&[(a, b)]), z0).unwrap();
        assert!((w.eval(p).unwrap() - 2.0 * (b * p.x + a * p.y)).abs() < 1e-14);
        assert!(
            compute_w1_quadratic(&AnalyticSeries::zero(Orientation::Interior), z0)
                .unwrap()
                .is_constant()
        );
    }

    #[test]
    fn w0_rejects_residue() {
        let f = AnalyticSeries::exterior(vec![C64::default(), C64::new(1.0, 0.0)]);
        assert!(matches!(
            compute_w0(&f, C64::new(2.0, 0.0)),
            Err(Error::MultivaluedAntiderivative(_))
        ));
    }

    #[test]
    fn branch_constant() {
        let w = ScalarField::from_potential(poly(&[(0.0, 0.0), (0.0, 0.5)])).add_constant(3.0);
        // Im(0.5 i z) = x / 2
        let fixed = fix_w0_constant(w, Point2::new(0.0, 0.0)).unwrap();
        assert_eq!(fixed.constant_term(), 0.0);
        let w = compute_w0(&poly(&[(0.0, 0.0), (0.0, 1.0)]), C64::default()).unwrap();
        let b = Point2::new(1.0, 1.0);
        let fixed = fix_w0_constant(w.clone(), b).unwrap();
        assert_eq!(fixed.constant_term(), w.constant_term());
        let b = Point2::new(0.37, -2.1);
        assert!(fix_w0_constant(w, b).unwrap().eval(b).unwrap().abs() < 1e-14);
    }

    #[test]
    fn unpack_zero_series() {
        let pair = unpack(&AnalyticSeries::zero(Orientation::Interior), 2.0);
        let p = Point2::new(0.3, -0.4);
        let (u, v) = pair.eval(p).unwrap();
        assert!((u + 0.3).abs() < 1e-15 && (v - 0.4).abs() < 1e-15);
        assert_eq!(pair.divergence(p).unwrap(), -2.0);
    }

    #[test]
    fn unpack_pack_identity() {
        let g = poly(&[(0.1, 0.2), (-0.3, 0.5), (0.05, 0.0)]);
        for w1 in [0.0, 0.3, -1.0] {
            let pair = unpack(&g, w1);
            assert_eq!(pack(&pair, w1).unwrap(), g.trimmed());
            let r = check_cauchy_riemann(
                |p| pair.eval(p).unwrap(),
                CrVariant::Modified(w1),
                &grid(),
                1e-4,
            );
            assert!(r[0] < 1e-10 && r[1] < 1e-10, "{r:?}");
        }
        assert!(pack(&unpack(&g, 0.3), 0.4).is_err());
    }

    #[test]
    fn unhalved_factor_leaves_w1_residual() {
        let g = poly(&[(0.1, 0.2), (-0.3, 0.5)]);
        let w1 = 0.3;
        let pair = unpack_with_factor(&g, w1, UNHALVED_CORRECTION_FACTOR);
        let r = check_cauchy_riemann(
            |p| pair.eval(p).unwrap(),
            CrVariant::Modified(w1),
            &grid(),
            1e-4,
        );
        assert!((r[0] - w1).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn jacobian_matches_differences() {
        let g = AnalyticSeries::laurent(
            vec![C64::new(0.2, -0.1), C64::new(0.4, 0.3)],
            vec![C64::new(0.1, 0.5), C64::new(-0.2, 0.1)],
        );
        let w = AnalyticSeries::laurent(
            vec![C64::new(0.3, 0.7), C64::new(0.1, -0.2)],
            vec![C64::default(), C64::new(0.3, 0.1)],
        );
        let pair = VelocityPair::with_shift_derivative(g, &w).unwrap();
        let p = Point2::new(1.3, -0.8);
        let j = pair.jacobian(p).unwrap();
        let h = 1e-5;
        let (a, b) = (
            pair.eval(p + Point2::new(h, 0.0)).unwrap(),
            pair.eval(p - Point2::new(h, 0.0)).unwrap(),
        );
        let (c, d) = (
            pair.eval(p + Point2::new(0.0, h)).unwrap(),
            pair.eval(p - Point2::new(0.0, h)).unwrap(),
        );
        let fd = [
            [(a.0 - b.0) / (2.0 * h), (c.0 - d.0) / (2.0 * h)],
            [(a.1 - b.1) / (2.0 * h), (c.1 - d.1) / (2.0 * h)],
        ];
        for r in 0..2 {
            for s in 0..2 {
                assert!((j[r][s] - fd[r][s]).abs() < 1e-8, "{j:?} {fd:?}");
            }
        }
        let div = pair.divergence(p).unwrap();
        assert!((div - (j[0][0] + j[1][1])).abs() < 1e-13);
        assert!((j[0][1] - j[1][0]).abs() < 1e-13);
    }

    #[test]
    fn gradient_of_scalar_field_matches_differences() {
        let pair = VelocityPair::with_divergence_shift(poly(&[(0.5, -0.2), (0.1, 0.3)]), 0.8);
        let w = ScalarField::from_gradient(&pair, C64::default()).unwrap();
        let p = Point2::new(0.6, 0.2);
        let h = 1e-5;
        let wx = (w.eval(p + Point2::new(h, 0.0)).unwrap()
            - w.eval(p - Point2::new(h, 0.0)).unwrap())
            / (2.0 * h);
        let wy = (w.eval(p + Point2::new(0.0, h)).unwrap()
            - w.eval(p - Point2::new(0.0, h)).unwrap())
            / (2.0 * h);
        let (u, v) = pair.eval(p).unwrap();
        assert!((wx - u).abs() < 1e-9 && (wy - v).abs() < 1e-9);
    }
}
