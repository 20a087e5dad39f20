//! Relative placement of two reconstructed contours by a translation.
//!
//! Every objective is written in terms of the offsets
//! `p1_i - p2_i + shift` between corresponding nodes.

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ruled_surface_area, Contour, Point2, RuledTriangulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftMethod {
    Lsq,
    Area,
    Lift,
}

impl std::str::FromStr for ShiftMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lsq" => Ok(ShiftMethod::Lsq),
            "area" => Ok(ShiftMethod::Area),
            "lift" => Ok(ShiftMethod::Lift),
            other => Err(Error::BadValue {
                path: "/method".into(),
                message: format!("unknown positioning method `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftVector {
    pub dx: f64,
    pub dy: f64,
    pub objective: f64,
    pub method: ShiftMethod,
}

impl ShiftVector {
    pub fn point(&self) -> Point2 {
        Point2::new(self.dx, self.dy)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("shift serializes")
    }
}

/// First `k` nodes lie on the lower surface; `v1`, `v2` are per-node speeds
/// of the two contours.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePartition {
    k: usize,
    v1: Vec<f64>,
    v2: Vec<f64>,
}

impl NodePartition {
    pub fn new(k: usize, v1: Vec<f64>, v2: Vec<f64>) -> Result<Self> {
        if v1.len() != v2.len() {
            return Err(Error::CountMismatch(v1.len(), v2.len()));
        }
        if k == 0 || k >= v1.len() {
            return Err(Error::BadValue {
                path: "/partition".into(),
                message: format!("lower node count {k} must lie in 1..{}", v1.len()),
            });
        }
        Ok(Self { k, v1, v2 })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.v1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v1.is_empty()
    }
}

/// Admissible shifts `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl ShiftBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x0.is_finite() && y0.is_finite() && x1.is_finite() && y1.is_finite())
            || x1 < x0
            || y1 < y0
        {
            return Err(Error::BadValue {
                path: "/positioning/box".into(),
                message: format!("empty or non-finite box [{x0}, {x1}] x [{y0}, {y1}]"),
            });
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    pub fn center(&self) -> Point2 {
        Point2::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn diagonal(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    fn clamp(&self, p: Point2) -> Point2 {
        Point2::new(p.x.clamp(self.x0, self.x1), p.y.clamp(self.y0, self.y1))
    }
}

fn check_counts(c1: &Contour, c2: &Contour) -> Result<()> {
    if c1.len() != c2.len() {
        return Err(Error::CountMismatch(c1.len(), c2.len()));
    }
    Ok(())
}

/// `Σ (x¹ - x² + x)² + (y¹ - y² + y)²`.
pub fn lsq_objective(c1: &Contour, c2: &Contour, shift: Point2) -> Result<f64> {
    check_counts(c1, c2)?;
    Ok(c1
        .points()
        .iter()
        .zip(c2.points())
        .map(|(&a, &b)| {
            let d = a - b + shift;
            d.x * d.x + d.y * d.y
        })
        .sum())
}

/// Closed-form minimizer of [`lsq_objective`]: the mean of `p2 - p1`.
pub fn least_squares_shift(c1: &Contour, c2: &Contour) -> Result<ShiftVector> {
    check_counts(c1, c2)?;
    let n = c1.len() as f64;
    let (sx, sy) = c1
        .points()
        .iter()
        .zip(c2.points())
        .fold((0.0, 0.0), |(sx, sy), (&a, &b)| {
            (sx + b.x - a.x, sy + b.y - a.y)
        });
    let p = Point2::new(sx / n, sy / n);
    Ok(ShiftVector {
        dx: p.x,
        dy: p.y,
        objective: lsq_objective(c1, c2, p)?,
        method: ShiftMethod::Lsq,
    })
}

/// Triangulated area of the ruled surface between `c1` at height 0 and
/// `c2` at height `spacing`.
pub fn area_objective(c1: &Contour, c2: &Contour, spacing: f64, shift: Point2) -> Result<f64> {
    check_counts(c1, c2)?;
    let t = RuledTriangulation::new(c1.clone(), c2.clone(), spacing)?;
    Ok(ruled_surface_area(&t, shift))
}

struct AreaCost<'a> {
    t: &'a RuledTriangulation,
}

impl CostFunction for AreaCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(ruled_surface_area(self.t, Point2::new(p[0], p[1])))
    }
}

fn extent(c: &Contour) -> f64 {
    let (mut lo, mut hi) = (
        Point2::new(f64::MAX, f64::MAX),
        Point2::new(f64::MIN, f64::MIN),
    );
    for p in c.points() {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (hi - lo).norm().max(f64::MIN_POSITIVE)
}

fn nelder_mead(t: &RuledTriangulation, seed: Point2, size: f64) -> Option<(Point2, f64)> {
    let simplex = vec![
        vec![seed.x, seed.y],
        vec![seed.x + size, seed.y],
        vec![seed.x, seed.y + size],
    ];
    let solver = NelderMead::new(simplex).with_sd_tolerance(1e-15).ok()?;
    let res = Executor::new(AreaCost { t }, solver)
        .configure(|s| s.max_iters(2000))
        .run()
        .ok()?;
    let state = res.state();
    let p = state.best_param.as_ref()?;
    let f = state.best_cost;
    (f.is_finite() && p[0].is_finite() && p[1].is_finite()).then(|| (Point2::new(p[0], p[1]), f))
}

/// Area-minimizing shift by derivative-free search seeded at `seed`, with a
/// brute-force grid around the seed as fallback.
pub fn minimize_area(
    c1: &Contour,
    c2: &Contour,
    spacing: f64,
    seed: Point2,
) -> Result<ShiftVector> {
    check_counts(c1, c2)?;
    let t = RuledTriangulation::new(c1.clone(), c2.clone(), spacing)?;
    let size = 1e-2 * extent(c1).max(extent(c2));
    let found = nelder_mead(&t, seed, size).or_else(|| {
        let half = 50.0 * size;
        let mut best: Option<(Point2, f64)> = None;
        for j in 0..=100 {
            for i in 0..=100 {
                let p = seed
                    + Point2::new(
                        -half + half * i as f64 / 50.0,
                        -half + half * j as f64 / 50.0,
                    );
                let f = ruled_surface_area(&t, p);
                if f.is_finite() && best.is_none_or(|(_, b)| f < b) {
                    best = Some((p, f));
                }
            }
        }
        best.and_then(|(p, _)| nelder_mead(&t, p, 0.02 * size).or(best))
    });
    let (p, f) =
        found.ok_or_else(|| Error::OptimizerFailed("ruled-surface area search diverged".into()))?;
    Ok(ShiftVector {
        dx: p.x,
        dy: p.y,
        objective: f,
        method: ShiftMethod::Area,
    })
}

/// Least-squares and area minimizers for `c1` against its copy scaled about
/// the centroid, and the distance between them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatementCheck {
    pub lsq: ShiftVector,
    pub area: ShiftVector,
    pub distance: f64,
}

pub fn verify_statement(c1: &Contour, scale: f64, spacing: f64) -> Result<StatementCheck> {
    let c2 = c1.scaled_about_centroid(scale)?;
    let lsq = least_squares_shift(c1, &c2)?;
    let area = minimize_area(c1, &c2, spacing, lsq.point())?;
    Ok(StatementCheck {
        lsq,
        area,
        distance: lsq.point().distance(area.point()),
    })
}

/// Lower nodes add `|p1 - p2 + shift| (v1 + v2)`, upper nodes subtract it.
pub fn lift_score(c1: &Contour, c2: &Contour, p: &NodePartition, shift: Point2) -> Result<f64> {
    check_counts(c1, c2)?;
    if p.len() != c1.len() {
        return Err(Error::CountMismatch(c1.len(), p.len()));
    }
    Ok(c1
        .points()
        .iter()
        .zip(c2.points())
        .enumerate()
        .map(|(i, (&a, &b))| {
            let d = (a - b + shift).norm() * (p.v1[i] + p.v2[i]);
            if i < p.k {
                d
            } else {
                -d
            }
        })
        .sum())
}

/// Maximizes [`lift_score`] over the box: grid search at step
/// `diagonal / 400`, then compass refinement. Ties go to the candidate
/// nearest the box center.
pub fn maximize_lift(
    c1: &Contour,
    c2: &Contour,
    p: &NodePartition,
    bounds: &ShiftBox,
) -> Result<ShiftVector> {
    let f = |s: Point2| lift_score(c1, c2, p, s);
    let center = bounds.center();
    let diag = bounds.diagonal();
    let step = diag / 400.0;
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        if hi == lo || step == 0.0 {
            return vec![lo];
        }
        let n = ((hi - lo) / step).ceil() as usize;
        (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .collect()
    };
    let xs = axis(bounds.x0, bounds.x1);
    let ys = axis(bounds.y0, bounds.y1);

    let mut best = (center, f(center)?);
    let scale = |v: f64| 1e-12 * v.abs().max(1.0);
    let better = |cand: (Point2, f64), cur: (Point2, f64)| {
        cand.1 > cur.1 + scale(cur.1)
            || ((cand.1 - cur.1).abs() <= scale(cur.1)
                && cand.0.distance(center) < cur.0.distance(center))
    };
    for &y in &ys {
        for &x in &xs {
            let s = Point2::new(x, y);
            let cand = (s, f(s)?);
            if better(cand, best) {
                best = cand;
            }
        }
    }

    let mut h = step;
    while h > 1e-10 * diag.max(f64::MIN_POSITIVE) {
        let mut moved = false;
        for d in [
            Point2::new(h, 0.0),
            Point2::new(-h, 0.0),
            Point2::new(0.0, h),
            Point2::new(0.0, -h),
        ] {
            let s = bounds.clamp(best.0 + d);
            let v = f(s)?;
            if v > best.1 + scale(best.1) {
                best = (s, v);
                moved = true;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    Ok(ShiftVector {
        dx: best.0.x,
        dy: best.0.y,
        objective: best.1,
        method: ShiftMethod::Lift,
    })
}
