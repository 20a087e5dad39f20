use std::f64::consts::PI;

use serde::Serialize;

use super::canonical::{canonical_map, CircleCorrespondence};
use super::distribution::VelocityDistribution;
use crate::error::{Error, Result};
use crate::geometry::{Contour, Point2};
use crate::harmonic::{
    analytic_from_real_boundary, AnalyticSeries, BoundarySamples, Orientation, C64,
};

const I: C64 = C64::new(0.0, 1.0);

/// Post-correction tolerance on both solvability defects.
pub const CLOSURE_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosureReport {
    /// `∮ z'(ζ) dζ` around the unit circle.
    pub closure_defect: [f64; 2],
    /// Achieved minus prescribed `ln v_inf`.
    pub vinf_defect: f64,
    pub corrected: bool,
    /// RMS of the boundary modification `λ0 + λ1 cos γ + λ2 sin γ`.
    pub correction_norm: f64,
}

impl ClosureReport {
    pub fn closure(&self) -> C64 {
        C64::new(self.closure_defect[0], self.closure_defect[1])
    }

    pub fn max_defect(&self) -> f64 {
        self.closure().norm().max(self.vinf_defect.abs())
    }

    pub fn passes(&self) -> bool {
        self.max_defect() < CLOSURE_TOL
    }
}

/// Zhukovsky function `χ = ln(dζ/dz)` on the exterior of the unit circle,
/// together with the boundary data it was built from.
#[derive(Debug, Clone)]
pub struct Zhukovsky {
    pub chi: AnalyticSeries,
    pub boundary: BoundarySamples,
}

/// Grid phase: stagnation angle `γ_a` sits midway between two nodes.
fn grid_phase(c: &CircleCorrespondence, n: usize) -> f64 {
    c.stagnation_angles().0 + PI / n as f64
}

fn log_speed_ratio(c: &CircleCorrespondence, gamma: f64) -> f64 {
    let v = c.speed_at(c.s_of_gamma(gamma)).abs();
    let w = c.canonical_speed(gamma).abs();
    v.ln() - w.ln()
}

/// Builds `χ` from `Re χ = ln V - ln |dw_c/dζ|` on the circle.
pub fn solve_zhukovsky(c: &CircleCorrespondence, n: usize) -> Result<Zhukovsky> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo {
            path: "n_boundary".into(),
            value: n,
        });
    }
    let (s_a, s_b) = c.stagnation_arcs();
    let vmax = c
        .spline()
        .knots()
        .iter()
        .map(|&s| c.speed_at(s).abs())
        .fold(0.0, f64::max);
    for s in [s_a, s_b] {
        let v = c.speed_at(s).abs();
        if v > 1e-8 * vmax {
            return Err(Error::SingularityMismatch(v));
        }
    }
    let phase = grid_phase(c, n);
    let step = 2.0 * PI / n as f64;
    let scale = c.circle_speed() + c.circulation().abs() / (2.0 * PI);
    let values = (0..n)
        .map(|k| {
            let g = phase + step * k as f64;
            if c.canonical_speed(g).abs() < 1e-9 * scale {
                // node on the second stagnation angle: average across it
                let d = 1e-3 * step;
                0.5 * (log_speed_ratio(c, g - d) + log_speed_ratio(c, g + d))
            } else {
                log_speed_ratio(c, g)
            }
        })
        .collect::<Vec<_>>();
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::SingularityMismatch(values[k]));
    }
    let boundary = BoundarySamples::with_phase(values, phase)?;
    let chi = analytic_from_real_boundary(&boundary, Orientation::Exterior);
    Ok(Zhukovsky { chi, boundary })
}

/// Solvability defects of `χ`. With `z'(ζ) = e^{-χ}`, the residue of `z'`
/// is `-χ_1 e^{-χ_0}`, and `|dw/dz|` at infinity is `V_c e^{Re χ_0}`.
pub fn closure_conditions(chi: &AnalyticSeries, c: &CircleCorrespondence) -> ClosureReport {
    let c0 = chi.coefficient(0);
    let c1 = chi.coefficient(-1);
    let residue = -c1 * (-c0).exp();
    let closure = 2.0 * PI * I * residue;
    ClosureReport {
        closure_defect: [closure.re, closure.im],
        vinf_defect: c0.re - (c.v_inf() / c.circle_speed()).ln(),
        corrected: false,
        correction_norm: 0.0,
    }
}

fn apply_lambda(chi: &AnalyticSeries, lambda: [f64; 3]) -> AnalyticSeries {
    let mut out = chi.clone();
    out.set_coefficient(0, chi.coefficient(0) + lambda[0]);
    // Re(c ζ^{-1}) on the circle is Re c cos γ + Im c sin γ
    out.set_coefficient(-1, chi.coefficient(-1) + C64::new(lambda[1], lambda[2]));
    out
}

fn residual(r: &ClosureReport) -> [f64; 3] {
    [r.closure_defect[0], r.closure_defect[1], r.vinf_defect]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut x = [0.0; 3];
    for (col, xc) in x.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *xc = det(m) / d;
    }
    Some(x)
}

#[derive(Debug, Clone)]
pub struct Quasisolution {
    pub chi: AnalyticSeries,
    pub report: ClosureReport,
    pub lambda: [f64; 3],
}

/// Restores closure and the speed at infinity by adding
/// `λ0 + λ1 cos γ + λ2 sin γ` to the boundary data of `Re χ`, solving the
/// three real conditions by damped Newton iteration.
pub fn quasisolution_correct(
    chi: &AnalyticSeries,
    c: &CircleCorrespondence,
) -> Result<Quasisolution> {
    let mut lambda = [0.0; 3];
    let mut current = closure_conditions(chi, c);
    let mut r = residual(&current);
    let mut iter = 0;
    while norm3(r) >= 1e-14 {
        if iter == NEWTON_MAX_ITER {
            return Err(Error::QuasisolutionDiverged(norm3(r)));
        }
        iter += 1;
        let trial = apply_lambda(chi, lambda);
        let e = (-trial.coefficient(0)).exp();
        let cd = current.closure();
        // columns: ∂/∂λ0, ∂/∂λ1, ∂/∂λ2 of (Re cd, Im cd, vinf)
        let d0 = -cd;
        let d1 = -2.0 * PI * I * e;
        let d2 = 2.0 * PI * e;
        let jac = [
            [d0.re, d1.re, d2.re],
            [d0.im, d1.im, d2.im],
            [1.0, 0.0, 0.0],
        ];
        let step =
            solve3(jac, [-r[0], -r[1], -r[2]]).ok_or(Error::QuasisolutionDiverged(norm3(r)))?;
        let mut t = 1.0;
        loop {
            let cand = [
                lambda[0] + t * step[0],
                lambda[1] + t * step[1],
                lambda[2] + t * step[2],
            ];
            let rep = closure_conditions(&apply_lambda(chi, cand), c);
            let rc = residual(&rep);
            if norm3(rc) < norm3(r) || t < 1e-6 {
                lambda = cand;
                current = rep;
                r = rc;
                break;
            }
            t *= 0.5;
        }
        if !norm3(r).is_finite() {
            return Err(Error::QuasisolutionDiverged(f64::INFINITY));
        }
        if iter > 2 && norm3(r) < CLOSURE_TOL * 1e-2 {
            break;
        }
    }
    let corrected = apply_lambda(chi, lambda);
    let mut report = closure_conditions(&corrected, c);
    report.corrected = true;
    report.correction_norm =
        (lambda[0] * lambda[0] + 0.5 * (lambda[1] * lambda[1] + lambda[2] * lambda[2])).sqrt();
    if !report.passes() {
        return Err(Error::QuasisolutionDiverged(report.max_defect()));
    }
    Ok(Quasisolution {
        chi: corrected,
        report,
        lambda,
    })
}

fn exp_terms(chi: &AnalyticSeries) -> usize {
    (4 * chi.neg_coeffs().len()).max(64)
}

/// `z(γ) = z_start + ∫ e^{-χ(ζ)} dζ` along the unit circle, sampled at `n`
/// equal angle steps starting from the image of the first data sample.
pub fn reconstruct_contour(
    chi: &AnalyticSeries,
    c: &CircleCorrespondence,
    n: usize,
    z_start: C64,
) -> Result<Contour> {
    let dz = chi
        .scale(C64::new(-1.0, 0.0))
        .exp_truncated(exp_terms(chi))?;
    let residue = dz.coefficient(-1);
    let mut single_valued = dz.clone();
    single_valued.set_coefficient(-1, C64::default());
    let antiderivative = crate::harmonic::integrate_series(&single_valued, C64::new(1.0, 0.0))?;

    let gamma0 = c.gamma_of_s(c.data_start());
    let origin = antiderivative.eval_unchecked(C64::from_polar(1.0, gamma0));
    let points: Vec<Point2> = (0..n)
        .map(|k| {
            let g = gamma0 + 2.0 * PI * k as f64 / n as f64;
            let z = z_start + antiderivative.eval_unchecked(C64::from_polar(1.0, g)) - origin;
            Point2::new(z.re, z.im)
        })
        .collect();
    let contour = Contour::closed(points)?;
    let gap = 2.0 * PI * residue.norm();
    let tolerance = 1e-8 * contour.perimeter();
    if gap > tolerance {
        return Err(Error::NotClosed { gap, tolerance });
    }
    Ok(contour)
}

/// A solved blade section: correspondence, corrected Zhukovsky function and
/// the reconstructed contour.
#[derive(Debug, Clone)]
pub struct BladeSolution {
    pub correspondence: CircleCorrespondence,
    pub chi_raw: AnalyticSeries,
    pub chi: AnalyticSeries,
    pub initial_report: ClosureReport,
    pub report: ClosureReport,
    pub lambda: [f64; 3],
    pub contour: Contour,
}

impl BladeSolution {
    /// `i · dw/dz` as a series in the canonical variable, i.e. `v + i u`
    /// for the in-plane velocity `(u, v)`.
    pub fn velocity_series(&self) -> Result<AnalyticSeries> {
        let c = &self.correspondence;
        let vc = c.circle_speed();
        let beta = c.beta();
        let dwc = AnalyticSeries::exterior(vec![
            -vc * C64::from_polar(1.0, -beta),
            c.circulation() / (2.0 * PI * I),
            vc * C64::from_polar(1.0, beta),
        ]);
        let terms = exp_terms(&self.chi);
        let e = self.chi.exp_truncated(terms)?;
        Ok(dwc.mul(&e, terms).scale(I))
    }

    /// Branch (stagnation) point `e^{iγ_a}` in the canonical plane.
    pub fn branch_point(&self) -> Point2 {
        let g = self.correspondence.stagnation_angles().0;
        Point2::new(g.cos(), g.sin())
    }
}

/// Options for [`solve_blade`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub n_boundary: usize,
    pub n_contour: usize,
    pub z_start: C64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            n_boundary: 256,
            n_contour: 256,
            z_start: C64::new(0.0, 0.0),
        }
    }
}

/// Full planar pipeline: potential, canonical map, Zhukovsky function,
/// quasisolution correction, contour.
pub fn solve_blade(d: &VelocityDistribution, opts: SolveOptions) -> Result<BladeSolution> {
    let correspondence = canonical_map(d)?;
    let zh = solve_zhukovsky(&correspondence, opts.n_boundary)?;
    let initial_report = closure_conditions(&zh.chi, &correspondence);
    let q = quasisolution_correct(&zh.chi, &correspondence)?;
    let contour = reconstruct_contour(&q.chi, &correspondence, opts.n_contour, opts.z_start)?;
    Ok(BladeSolution {
        correspondence,
        chi_raw: zh.chi,
        chi: q.chi,
        initial_report,
        report: q.report,
        lambda: q.lambda,
        contour,
    })
}

/// `Ṽ(s) = V(s) + w1 |s|_B`, with `|s|_B` the arc distance to the nearest
/// stagnation point.
pub fn modified_distribution(d: &VelocityDistribution, w1: f64) -> Result<VelocityDistribution> {
    if w1 == 0.0 {
        return Ok(d.clone());
    }
    let c = canonical_map(d)?;
    let (s_a, s_b) = c.stagnation_arcs();
    let l = d.total_length();
    let circ = |s: f64, b: f64| {
        let r = (s - b).rem_euclid(l);
        r.min(l - r)
    };
    let v = d
        .arc_positions()
        .iter()
        .zip(d.speeds())
        .map(|(&s, &v)| v + w1 * circ(s, s_a).min(circ(s, s_b)))
        .collect();
    d.with_speeds(v)
}

/// Modified problem for the `h = 0` data: the standard pipeline run on
/// `Ṽ = V + w1 |s|`. `w1 = 0` is the unmodified pipeline.
pub fn solve_modified(
    d: &VelocityDistribution,
    w1: f64,
    opts: SolveOptions,
) -> Result<BladeSolution> {
    solve_blade(&modified_distribution(d, w1)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hausdorff_distance;
    use crate::planar::distribution::detect_branch_indices;

    fn cylinder(m: usize, perturb: f64) -> VelocityDistribution {
        let s: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
        let v: Vec<f64> = s
            .iter()
            .map(|x| 2.0 * x.sin() + perturb * (x.cos() + (2.0 * x).sin()))
            .collect();
        let b = detect_branch_indices(&v).unwrap();
        VelocityDistribution::new(s, v, 2.0 * PI, b, 1.0, 0.0).unwrap()
    }

    fn unit_circle(n: usize) -> Contour {
        Contour::closed(
            (0..n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    Point2::new(t.cos(), t.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn cylinder_chi_vanishes() {
        let c = canonical_map(&cylinder(512, 0.0)).unwrap();
        let zh = solve_zhukovsky(&c, 256).unwrap();
        assert!(
            zh.chi.max_abs_coefficient() < 1e-7,
            "{}",
            zh.chi.max_abs_coefficient()
        );
        let rep = closure_conditions(&zh.chi, &c);
        assert!(rep.max_defect() < 1e-6);
    }

    #[test]
    fn scaling_speed_and_vinf_leaves_chi() {
        let d = cylinder(512, 0.05);
        let scaled = d
            .with_speeds(d.speeds().iter().map(|v| 3.0 * v).collect())
            .unwrap()
            .with_v_inf(3.0)
            .unwrap();
        let a = solve_zhukovsky(&canonical_map(&d).unwrap(), 128)
            .unwrap()
            .chi;
        let b = solve_zhukovsky(&canonical_map(&scaled).unwrap(), 128)
            .unwrap()
            .chi;
        assert!(a.sub(&b).max_abs_coefficient() < 1e-10);
    }

    #[test]
    fn artificial_first_coefficient_matches_quadrature() {
        let c = canonical_map(&cylinder(512, 0.0)).unwrap();
        let mut chi = solve_zhukovsky(&c, 256).unwrap().chi;
        chi.set_coefficient(-1, chi.coefficient(-1) + 0.1);
        let rep = closure_conditions(&chi, &c);
        // trapezoid quadrature of e^{-χ} i ζ dγ (spectrally exact for smooth periodic data)
        let m = 2048;
        let quad: C64 = (0..m)
            .map(|k| {
                let z = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
                (-chi.eval(z).unwrap()).exp() * I * z * (2.0 * PI / m as f64)
            })
            .sum();
        assert!(
            (rep.closure() - quad).norm() < 1e-12,
            "{:?} {quad}",
            rep.closure()
        );
        assert!(rep.closure().norm() > 0.5);
    }

    #[test]
    fn quasisolution_fixed_point_and_vinf_shift() {
        let c = canonical_map(&cylinder(512, 0.0)).unwrap();
        let chi = solve_zhukovsky(&c, 256).unwrap().chi;
        let q = quasisolution_correct(&chi, &c).unwrap();
        let q2 = quasisolution_correct(&q.chi, &c).unwrap();
        assert_eq!(q2.lambda, [0.0; 3]);
        assert_eq!(q2.chi, q.chi);

        let doubled = cylinder(512, 0.0).with_v_inf(2.0).unwrap();
        let c2 = canonical_map(&doubled).unwrap();
        let chi2 = solve_zhukovsky(&c2, 256).unwrap().chi;
        let q = quasisolution_correct(&chi2, &c2).unwrap();
        let exact = (2.0 / c2.circle_speed()).ln() - chi2.coefficient(0).re;
        assert!((q.lambda[0] - exact).abs() < 1e-14);
        assert!((q.lambda[0] - 2f64.ln()).abs() < 1e-7);
    }

    #[test]
    fn perturbed_cylinder_is_corrected() {
        let sol = solve_blade(&cylinder(1024, 0.05), SolveOptions::default()).unwrap();
        assert!(
            sol.initial_report.max_defect() > 1e-3,
            "{:?}",
            sol.initial_report
        );
        assert!(sol.report.passes());
        assert!(sol.report.correction_norm > 0.0);
    }

    #[test]
    fn cylinder_round_trip() {
        let opts = SolveOptions {
            z_start: C64::new(1.0, 0.0),
            ..Default::default()
        };
        let sol = solve_blade(&cylinder(512, 0.0), opts).unwrap();
        let h = hausdorff_distance(&sol.contour, &unit_circle(256));
        assert!(h < 1e-3, "{h}");
    }

    #[test]
    fn translation_equivariance() {
        let d = cylinder(512, 0.05);
        let a = solve_blade(&d, SolveOptions::default()).unwrap().contour;
        let b = solve_blade(
            &d,
            SolveOptions {
                z_start: C64::new(1.0, 2.0),
                ..Default::default()
            },
        )
        .unwrap()
        .contour;
        for (p, q) in a.points().iter().zip(b.points()) {
            assert!((q.x - p.x - 1.0).abs() < 1e-12 && (q.y - p.y - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn modified_reduces_to_standard_at_zero() {
        let d = cylinder(512, 0.05);
        let a = solve_blade(&d, SolveOptions::default()).unwrap();
        let b = solve_modified(&d, 0.0, SolveOptions::default()).unwrap();
        assert_eq!(a.chi, b.chi);
        assert_eq!(a.contour, b.contour);
    }

    #[test]
    fn modified_defect_scales_with_w1_and_is_corrected() {
        let d = cylinder(1024, 0.0);
        let sol = solve_modified(&d, 0.01, SolveOptions::default()).unwrap();
        let pre = sol.initial_report.max_defect();
        assert!(pre > 1e-5 && pre < 0.5, "{pre}");
        assert!(sol.report.passes());
        let sol2 = solve_modified(&d, 0.02, SolveOptions::default()).unwrap();
        let ratio = sol2.initial_report.max_defect() / pre;
        assert!((ratio - 2.0).abs() < 0.3, "{ratio}");
    }

    #[test]
    fn modified_sign_flip_conjugates_coefficients() {
        let d = cylinder(1024, 0.0);
        let plus = solve_modified(&d, 0.05, SolveOptions::default())
            .unwrap()
            .chi_raw;
        let minus = solve_modified(&d, -0.05, SolveOptions::default())
            .unwrap()
            .chi_raw;
        let diff = plus.conj_coeffs().sub(&minus).max_abs_coefficient();
        assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn modified_rejects_broken_sign_structure() {
        let d = cylinder(256, 0.0);
        assert!(matches!(
            modified_distribution(&d, 5.0),
            Err(Error::InconsistentDistribution(_))
        ));
    }
}
