//! Closed-form forward flows that produce solvable velocity distributions.
//!
//! Both generators use the same flow as the inverse solver,
//! `w = -V_c (e^{-iβ} t + e^{iβ}/t) + Γ/(2πi) log t` on the unit circle
//! `t = e^{iθ}`, so a correct inverse reproduces the generating contour.

use std::f64::consts::PI;

use crate::error::Result;
use crate::geometry::{Contour, Point2};
use crate::harmonic::C64;
use crate::planar::{detect_branch_indices, VelocityDistribution};

/// Five-point Gauss–Legendre nodes and weights on `[-1, 1]`.
const GL_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// `V(s) = 2 v_inf sin s` on `[0, 2π)`: flow past the unit circle.
pub fn cylinder_distribution(m: usize, v_inf: f64) -> Result<VelocityDistribution> {
    let s: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
    let v: Vec<f64> = s.iter().map(|x| 2.0 * v_inf * x.sin()).collect();
    let b = detect_branch_indices(&v)?;
    VelocityDistribution::new(s, v, 2.0 * PI, b, v_inf, 0.0)
}

/// Image of the circle `|ζ' - center| = radius` under `z = ζ' + a²/ζ'`.
/// The circle must enclose both critical points `±a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JoukowskiOracle {
    pub center: C64,
    pub radius: f64,
    pub a: f64,
    pub v_inf: f64,
    pub incidence: f64,
    pub circulation: f64,
}

impl JoukowskiOracle {
    pub fn new(center: C64, radius: f64, a: f64) -> Self {
        assert!(
            radius > center.norm() + a.abs(),
            "circle must enclose both critical points"
        );
        Self {
            center,
            radius,
            a,
            v_inf: 1.0,
            incidence: 0.0,
            circulation: 0.0,
        }
    }

    pub fn with_flow(mut self, v_inf: f64, incidence: f64, circulation: f64) -> Self {
        self.v_inf = v_inf;
        self.incidence = incidence;
        self.circulation = circulation;
        self
    }

    pub fn point(&self, theta: f64) -> C64 {
        let zp = self.center + self.radius * C64::from_polar(1.0, theta);
        zp + self.a * self.a / zp
    }

    /// `dz/dt` at `t = e^{iθ}`.
    pub fn map_derivative(&self, theta: f64) -> C64 {
        let zp = self.center + self.radius * C64::from_polar(1.0, theta);
        self.radius * (1.0 - self.a * self.a / (zp * zp))
    }

    fn ds_dtheta(&self, theta: f64) -> f64 {
        self.map_derivative(theta).norm()
    }

    /// Signed tangential speed along increasing `θ`.
    pub fn speed(&self, theta: f64) -> f64 {
        let vc = self.v_inf * self.radius;
        let beta = -self.incidence;
        let dphi = 2.0 * vc * (theta - beta).sin() + self.circulation / (2.0 * PI);
        dphi / self.ds_dtheta(theta)
    }

    fn arc(&self, t0: f64, t1: f64) -> f64 {
        let sub = 4;
        let h = (t1 - t0) / sub as f64;
        (0..sub)
            .map(|j| {
                let mid = t0 + h * (j as f64 + 0.5);
                GL_X.iter()
                    .zip(GL_W)
                    .map(|(x, w)| w * self.ds_dtheta(mid + 0.5 * h * x))
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .sum()
    }

    /// Contour nodes at `θ_k = 2πk/n`.
    pub fn contour(&self, n: usize) -> Result<Contour> {
        Contour::closed(
            (0..n)
                .map(|k| {
                    let z = self.point(2.0 * PI * k as f64 / n as f64);
                    Point2::new(z.re, z.im)
                })
                .collect(),
        )
    }

    /// Speed samples at `θ_k = 2πk/m`, with arc length measured from `θ = 0`.
    pub fn distribution(&self, m: usize) -> Result<VelocityDistribution> {
        let thetas: Vec<f64> = (0..=m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
        let mut s = Vec::with_capacity(m);
        let mut acc = 0.0;
        for k in 0..m {
            s.push(acc);
            acc += self.arc(thetas[k], thetas[k + 1]);
        }
        let v: Vec<f64> = thetas[..m].iter().map(|&t| self.speed(t)).collect();
        let b = detect_branch_indices(&v)?;
        VelocityDistribution::new(s, v, acc, b, self.v_inf, self.incidence)
    }

    /// Largest distance between two contour nodes.
    pub fn chord(&self, n: usize) -> f64 {
        let pts: Vec<C64> = (0..n)
            .map(|k| self.point(2.0 * PI * k as f64 / n as f64))
            .collect();
        let mut d = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                d = d.max((pts[i] - pts[j]).norm());
            }
        }
        d
    }
}
