//! Transfer of a velocity distribution onto flow past the unit circle.
//!
//! The canonical flow is
//! `w_c(ζ) = -V_c (e^{-iβ} ζ + e^{iβ}/ζ) + Γ/(2πi) log ζ`, `β = -incidence`,
//! whose boundary potential `φ_c(γ) = -2 V_c cos(γ - β) + Γγ/(2π)` grows
//! along the arc `(γ_a, γ_b)` between its stagnation angles. The circle
//! speed `V_c` is fixed by matching the potential jump across the
//! positive-speed arc of the data; the speed at infinity of the physical
//! flow is then carried by the Zhukovsky function.

use std::f64::consts::PI;

use super::distribution::{potential_and_circulation, SpeedSpline, VelocityDistribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CircleCorrespondence {
    spline: SpeedSpline,
    /// Stagnation arc positions; speed is positive on `(s_a, s_b)`, with
    /// `s_b` unwrapped so that `s_a < s_b < s_a + L`.
    s_a: f64,
    s_b: f64,
    circulation: f64,
    circle_speed: f64,
    beta: f64,
    gamma_a: f64,
    gamma_b: f64,
    v_inf: f64,
}

impl CircleCorrespondence {
    pub fn circulation(&self) -> f64 {
        self.circulation
    }

    /// `V_c`, the free-stream speed of the canonical circle flow.
    pub fn circle_speed(&self) -> f64 {
        self.circle_speed
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn v_inf(&self) -> f64 {
        self.v_inf
    }

    pub fn stagnation_angles(&self) -> (f64, f64) {
        (self.gamma_a, self.gamma_b)
    }

    pub fn stagnation_arcs(&self) -> (f64, f64) {
        (self.s_a, self.spline.wrap(self.s_b))
    }

    pub fn total_length(&self) -> f64 {
        self.spline.period()
    }

    /// First sample position of the data.
    pub fn data_start(&self) -> f64 {
        self.spline.start()
    }

    pub(crate) fn spline(&self) -> &SpeedSpline {
        &self.spline
    }

    pub fn canonical_potential(&self, gamma: f64) -> f64 {
        -2.0 * self.circle_speed * (gamma - self.beta).cos() + self.circulation * gamma / (2.0 * PI)
    }

    /// `dφ_c/dγ`, the signed canonical speed on the unit circle.
    pub fn canonical_speed(&self, gamma: f64) -> f64 {
        2.0 * self.circle_speed * (gamma - self.beta).sin() + self.circulation / (2.0 * PI)
    }

    pub fn speed_at(&self, s: f64) -> f64 {
        self.spline.value(s)
    }

    pub fn potential_at(&self, s: f64) -> f64 {
        self.spline.potential(s)
    }

    /// Circle angle in `[γ_a, γ_a + 2π)` corresponding to arc position `s`.
    pub fn gamma_of_s(&self, s: f64) -> f64 {
        let l = self.spline.period();
        let s = self.s_a + (s - self.s_a).rem_euclid(l);
        if s <= self.s_b {
            let target = self.spline.potential(s) - self.spline.potential(self.s_a);
            let base = self.canonical_potential(self.gamma_a);
            bisect(self.gamma_a, self.gamma_b, |g| {
                self.canonical_potential(g) - base - target
            })
        } else {
            let target = self.spline.potential(s) - self.spline.potential(self.s_b);
            let base = self.canonical_potential(self.gamma_b);
            bisect(self.gamma_b, self.gamma_a + 2.0 * PI, |g| {
                base + target - self.canonical_potential(g)
            })
        }
    }

    /// Arc position in `[s_a, s_a + L)` corresponding to circle angle `γ`.
    pub fn s_of_gamma(&self, gamma: f64) -> f64 {
        let g = self.gamma_a + (gamma - self.gamma_a).rem_euclid(2.0 * PI);
        let l = self.spline.period();
        if g <= self.gamma_b {
            let target = self.canonical_potential(g) - self.canonical_potential(self.gamma_a);
            let base = self.spline.potential(self.s_a);
            bisect(self.s_a, self.s_b, |s| {
                self.spline.potential(s) - base - target
            })
        } else {
            let target = self.canonical_potential(g) - self.canonical_potential(self.gamma_b);
            let base = self.spline.potential(self.s_b);
            bisect(self.s_b, self.s_a + l, |s| {
                base + target - self.spline.potential(s)
            })
        }
    }
}

/// Root of an increasing function on `[lo, hi]`.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Potential jump across the positive arc of the canonical flow with circle
/// speed `vc`.
fn canonical_positive_jump(vc: f64, circulation: f64) -> f64 {
    let theta0 = (-circulation / (4.0 * PI * vc)).clamp(-1.0, 1.0).asin();
    4.0 * vc * theta0.cos() + circulation * (PI - 2.0 * theta0) / (2.0 * PI)
}

pub fn canonical_map(d: &VelocityDistribution) -> Result<CircleCorrespondence> {
    let table = potential_and_circulation(d)?;
    let circulation = table.circulation;
    let spline = SpeedSpline::new(d);
    let l = spline.period();

    let [b0, b1] = d.branch_indices();
    let r0 = spline.root_near(b0).ok_or_else(|| {
        Error::InconsistentDistribution(format!("no speed zero next to branch sample {b0}"))
    })?;
    let r1 = spline.root_near(b1).ok_or_else(|| {
        Error::InconsistentDistribution(format!("no speed zero next to branch sample {b1}"))
    })?;
    // the positive arc starts where the speed turns positive
    let probe = |from: f64, to: f64| {
        let to = if to <= from { to + l } else { to };
        spline.value(0.5 * (from + to))
    };
    let (s_a, s_b) = if probe(r0, r1) > 0.0 {
        (r0, r1)
    } else {
        (r1, r0)
    };
    let s_b = if s_b <= s_a { s_b + l } else { s_b };

    let jump = spline.potential(s_b) - spline.potential(s_a);
    if !(jump > 0.0) {
        return Err(Error::InconsistentDistribution(
            "potential does not increase along the positive arc".into(),
        ));
    }

    // the jump is increasing in V_c (derivative 4 cos θ0)
    let lo_bound = circulation.abs() / (4.0 * PI);
    let mut lo = lo_bound;
    let mut hi = (jump / 4.0).max(lo_bound) * 2.0 + 1e-300;
    while canonical_positive_jump(hi, circulation) < jump {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::InconsistentDistribution(
                "potential range cannot be matched by the canonical flow".into(),
            ));
        }
    }
    if canonical_positive_jump(lo, circulation) > jump {
        return Err(Error::InconsistentDistribution(
            "potential range below the canonical minimum".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if canonical_positive_jump(mid, circulation) < jump {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let circle_speed = 0.5 * (lo + hi);
    let limit = 4.0 * PI * circle_speed;
    if circulation.abs() >= limit {
        return Err(Error::StagnationOffCircle {
            circulation: circulation.abs(),
            limit,
        });
    }

    let beta = -d.incidence();
    let theta0 = (-circulation / (4.0 * PI * circle_speed)).asin();
    Ok(CircleCorrespondence {
        spline,
        s_a,
        s_b,
        circulation,
        circle_speed,
        beta,
        gamma_a: beta + theta0,
        gamma_b: beta + PI - theta0,
        v_inf: d.v_inf(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cylinder_shifted(m: usize, start: usize) -> VelocityDistribution {
        let s: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
        let v = s
            .iter()
            .map(|x| 2.0 * (x + 2.0 * PI * start as f64 / m as f64).sin())
            .collect();
        let b0 = (m - start) % m;
        let b1 = (m / 2 + m - start) % m;
        VelocityDistribution::new(s, v, 2.0 * PI, [b0, b1], 1.0, 0.0).unwrap()
    }

    #[test]
    fn cylinder_identity_correspondence() {
        let c = canonical_map(&cylinder_shifted(256, 0)).unwrap();
        assert!((c.circle_speed() - 1.0).abs() < 1e-9);
        let (ga, gb) = c.stagnation_angles();
        assert!(ga.abs() < 1e-12 && (gb - PI).abs() < 1e-12);
        for k in 0..50 {
            let s = 0.1257 * k as f64;
            let g = c.gamma_of_s(s);
            assert!((g - s).abs() < 1e-6, "{s} {g}");
            assert!((c.s_of_gamma(s) - s).abs() < 1e-6);
        }
    }

    #[test]
    fn relabeled_start_rotates_correspondence() {
        let m = 256;
        let shift = 2.0 * PI * 37.0 / m as f64;
        let c = canonical_map(&cylinder_shifted(m, 37)).unwrap();
        for k in 0..40 {
            let s = 0.15 * k as f64;
            let g = c.gamma_of_s(s);
            let want = (s + shift).rem_euclid(2.0 * PI);
            let diff = (g - want).rem_euclid(2.0 * PI);
            assert!(diff.min(2.0 * PI - diff) < 1e-6, "{s}: {g} vs {want}");
        }
    }

    #[test]
    fn potential_matches_canonical_along_arc() {
        let c = canonical_map(&cylinder_shifted(512, 0)).unwrap();
        let offset = c.potential_at(0.3) - c.canonical_potential(c.gamma_of_s(0.3));
        for k in 0..60 {
            let s = 0.1 * k as f64 + 0.3;
            let g = c.gamma_of_s(s);
            let gap = c.potential_at(s) - c.canonical_potential(g) - offset;
            // potential on the negative arc is continued with +Γ per turn; Γ = 0 here
            assert!(gap.abs() < 1e-9, "{s}: {gap}");
        }
    }
}
