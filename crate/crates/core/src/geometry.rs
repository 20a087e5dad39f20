//! Planar contours, the triangulated ruled strip between two stacked
//! contours, and the distance metrics used to compare reconstructions.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Sub};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// Ordered planar polyline. A closed contour has an implicit edge from the
/// last node back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    points: Vec<Point2>,
    closed: bool,
}

impl Contour {
    pub fn new(points: Vec<Point2>, closed: bool) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::DegenerateContour(format!(
                "{} points, need at least 3",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::DegenerateContour(format!("node {i} is not finite")));
        }
        let n = points.len();
        let edges = if closed { n } else { n - 1 };
        for i in 0..edges {
            if points[i] == points[(i + 1) % n] {
                return Err(Error::DegenerateContour(format!(
                    "nodes {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        Ok(Self { points, closed })
    }

    pub fn closed(points: Vec<Point2>) -> Result<Self> {
        Self::new(points, true)
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn translated(&self, by: Point2) -> Contour {
        Contour {
            points: self.points.iter().map(|&p| p + by).collect(),
            closed: self.closed,
        }
    }

    /// Vertex mean.
    pub fn centroid(&self) -> Point2 {
        let n = self.points.len() as f64;
        let sum = self.points.iter().fold(Point2::ORIGIN, |acc, &p| acc + p);
        sum * (1.0 / n)
    }

    /// Copy scaled by `factor` about the vertex mean.
    pub fn scaled_about_centroid(&self, factor: f64) -> Result<Contour> {
        let c = self.centroid();
        Contour::new(
            self.points.iter().map(|&p| c + (p - c) * factor).collect(),
            self.closed,
        )
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.points.len();
        let edges = if self.closed { n } else { n - 1 };
        (0..edges)
            .map(|i| self.points[i].distance(self.points[(i + 1) % n]))
            .sum()
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Contour> {
        let (points, _) = read_contour_csv(path.as_ref())?;
        Contour::closed(points)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// `index,x,y` with shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,x,y\n");
        for (i, p) in self.points.iter().enumerate() {
            let _ = writeln!(out, "{i},{},{}", p.x, p.y);
        }
        out
    }
}

/// Reads a contour CSV. An optional fourth column `v` carries per-node
/// speeds (used by the lift surrogate).
pub fn read_contour_csv(path: &Path) -> Result<(Vec<Point2>, Option<Vec<f64>>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_contour_csv(&text, &path.display().to_string())
}

pub fn parse_contour_csv(text: &str, origin: &str) -> Result<(Vec<Point2>, Option<Vec<f64>>)> {
    let csv_err = |line: usize, message: String| Error::Csv {
        path: origin.to_string(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| csv_err(1, "empty file".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let with_speed = match columns.as_slice() {
        ["index", "x", "y"] => false,
        ["index", "x", "y", "v"] => true,
        _ => return Err(csv_err(1, format!("unexpected header `{header}`"))),
    };
    let mut points = Vec::new();
    let mut speeds = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(csv_err(
                lineno + 1,
                format!("expected {} fields, found {}", columns.len(), fields.len()),
            ));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| csv_err(lineno + 1, format!("`{s}`: {e}")))
        };
        let index: usize = fields[0]
            .parse()
            .map_err(|e| csv_err(lineno + 1, format!("index `{}`: {e}", fields[0])))?;
        if index != points.len() {
            return Err(csv_err(
                lineno + 1,
                format!("index {index} out of sequence (expected {})", points.len()),
            ));
        }
        points.push(Point2::new(num(fields[1])?, num(fields[2])?));
        if with_speed {
            speeds.push(num(fields[3])?);
        }
    }
    Ok((points, with_speed.then_some(speeds)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcLengths {
    /// Arc length at each node, starting at 0.
    pub cumulative: Vec<f64>,
    pub perimeter: f64,
}

pub fn arc_length_table(c: &Contour) -> Result<ArcLengths> {
    let pts = c.points();
    let n = pts.len();
    let edges = if c.is_closed() { n } else { n - 1 };
    let mut cumulative = Vec::with_capacity(n);
    let mut total = 0.0;
    cumulative.push(0.0);
    for i in 0..edges {
        let len = pts[i].distance(pts[(i + 1) % n]);
        if len <= 0.0 {
            return Err(Error::DegenerateContour(format!(
                "edge {i} has zero length"
            )));
        }
        total += len;
        if i + 1 < n {
            cumulative.push(total);
        }
    }
    Ok(ArcLengths {
        cumulative,
        perimeter: total,
    })
}

/// Resamples at equal arc-length steps, keeping the start node and the
/// orientation.
pub fn resample_uniform(c: &Contour, n: usize) -> Result<Contour> {
    if n < 3 {
        return Err(Error::DegenerateContour(format!(
            "cannot resample to {n} points"
        )));
    }
    let table = arc_length_table(c)?;
    let pts = c.points();
    let m = pts.len();
    let step = if c.is_closed() {
        table.perimeter / n as f64
    } else {
        table.perimeter / (n - 1) as f64
    };
    let edge_end = |i: usize| {
        if i + 1 < m {
            table.cumulative[i + 1]
        } else {
            table.perimeter
        }
    };
    let mut out = Vec::with_capacity(n);
    let mut edge = 0;
    for k in 0..n {
        let target = (k as f64 * step).min(table.perimeter);
        while edge + 1 < m && edge_end(edge) < target {
            edge += 1;
        }
        let a = pts[edge];
        let b = pts[(edge + 1) % m];
        let start = table.cumulative[edge];
        let len = edge_end(edge) - start;
        let t = ((target - start) / len).clamp(0.0, 1.0);
        out.push(a + (b - a) * t);
    }
    Contour::new(out, c.is_closed())
}

/// Which diagonal split a strip triangle belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripSide {
    /// (lower i, lower i+1, upper i)
    Lower,
    /// (upper i, upper i+1, lower i+1)
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StripTriangle {
    pub side: StripSide,
    pub index: usize,
}

/// Triangulated ruled strip between two contours lying in parallel planes
/// `spacing` apart. Node `i` of the lower contour is joined to node `i` of
/// the upper one.
#[derive(Debug, Clone)]
pub struct RuledTriangulation {
    lower: Contour,
    upper: Contour,
    spacing: f64,
    triangles: Vec<StripTriangle>,
}

impl RuledTriangulation {
    pub fn new(lower: Contour, upper: Contour, spacing: f64) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::CountMismatch(lower.len(), upper.len()));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::BadValue {
                path: "spacing".into(),
                message: format!("{spacing} must be positive"),
            });
        }
        let n = lower.len();
        let strips = if lower.is_closed() && upper.is_closed() {
            n
        } else {
            n - 1
        };
        let triangles = (0..strips)
            .flat_map(|i| {
                [
                    StripTriangle {
                        side: StripSide::Lower,
                        index: i,
                    },
                    StripTriangle {
                        side: StripSide::Upper,
                        index: i,
                    },
                ]
            })
            .collect();
        Ok(Self {
            lower,
            upper,
            spacing,
            triangles,
        })
    }

    pub fn lower(&self) -> &Contour {
        &self.lower
    }

    pub fn upper(&self) -> &Contour {
        &self.upper
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn triangles(&self) -> &[StripTriangle] {
        &self.triangles
    }

    /// Vertex indices `(first contour node, next, opposite contour node)`.
    pub fn vertex_indices(&self, t: StripTriangle) -> [usize; 3] {
        let n = self.lower.len();
        let i = t.index;
        let j = (i + 1) % n;
        match t.side {
            StripSide::Lower => [i, j, i],
            StripSide::Upper => [i, j, j],
        }
    }
}

type P3 = [f64; 3];

fn triangle_area(a: P3, b: P3, c: P3) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let cx = u[1] * v[2] - u[2] * v[1];
    let cy = u[2] * v[0] - u[0] * v[2];
    let cz = u[0] * v[1] - u[1] * v[0];
    0.5 * (cx * cx + cy * cy + cz * cz).sqrt()
}

/// Area of the triangulated strip. The shift enters exactly as in the
/// least-squares objective: node pairs are separated in-plane by
/// `lower_i - upper_i + shift`, i.e. the upper contour is displaced by
/// `-shift`.
pub fn ruled_surface_area(t: &RuledTriangulation, shift: Point2) -> f64 {
    let lo = t.lower.points();
    let up = t.upper.points();
    let h = t.spacing;
    let lift_lo = |i: usize| [lo[i].x, lo[i].y, 0.0];
    let lift_up = |i: usize| [up[i].x - shift.x, up[i].y - shift.y, h];
    t.triangles
        .iter()
        .map(|&tri| {
            let [a, b, c] = t.vertex_indices(tri);
            match tri.side {
                StripSide::Lower => triangle_area(lift_lo(a), lift_lo(b), lift_up(c)),
                StripSide::Upper => triangle_area(lift_up(a), lift_up(b), lift_lo(c)),
            }
        })
        .sum()
}

fn directed_hausdorff(a: &[Point2], b: &[Point2]) -> f64 {
    a.iter()
        .map(|&p| {
            b.iter()
                .map(|&q| p.distance(q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between the node sets.
pub fn hausdorff_distance(a: &Contour, b: &Contour) -> f64 {
    directed_hausdorff(a.points(), b.points()).max(directed_hausdorff(b.points(), a.points()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square() -> Contour {
        Contour::closed(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    fn circle(r: f64, n: usize) -> Contour {
        Contour::closed(
            (0..n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    Point2::new(r * t.cos(), r * t.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn square_arc_lengths() {
        let t = arc_length_table(&unit_square()).unwrap();
        assert_eq!(t.cumulative, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(t.perimeter, 4.0);
    }

    #[test]
    fn triangle_arc_lengths() {
        let c = Contour::closed(vec![
            Point2::new(0.0, 0.0),
            Point2::new(3.0, 0.0),
            Point2::new(0.0, 4.0),
        ])
        .unwrap();
        let t = arc_length_table(&c).unwrap();
        assert_eq!(t.cumulative, vec![0.0, 3.0, 8.0]);
        assert_eq!(t.perimeter, 12.0);
    }

    #[test]
    fn inscribed_polygon_perimeter_tends_to_two_pi() {
        let mut last = 0.0;
        for n in [16, 64, 256, 4096] {
            let p = arc_length_table(&circle(1.0, n)).unwrap().perimeter;
            assert!(p > last && p < 2.0 * PI);
            last = p;
        }
        assert!((2.0 * PI - last).abs() < 1e-5);
    }

    #[test]
    fn rejects_repeated_nodes() {
        let err = Contour::closed(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
        ]);
        assert!(matches!(err, Err(Error::DegenerateContour(_))));
        let wrap = Contour::closed(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 0.0),
        ]);
        assert!(matches!(wrap, Err(Error::DegenerateContour(_))));
    }

    #[test]
    fn resample_square_to_eight() {
        let r = resample_uniform(&unit_square(), 8).unwrap();
        let expected = [
            (0.0, 0.0),
            (0.5, 0.0),
            (1.0, 0.0),
            (1.0, 0.5),
            (1.0, 1.0),
            (0.5, 1.0),
            (0.0, 1.0),
            (0.0, 0.5),
        ];
        for (p, (x, y)) in r.points().iter().zip(expected) {
            assert!((p.x - x).abs() < 1e-15 && (p.y - y).abs() < 1e-15, "{p:?}");
        }
    }

    #[test]
    fn resample_identity_on_uniform_contour() {
        let sq = unit_square();
        let r = resample_uniform(&sq, 4).unwrap();
        assert_eq!(r, sq);
    }

    #[test]
    fn resample_circle_stays_on_circle() {
        let r = resample_uniform(&circle(1.0, 64), 32).unwrap();
        let worst = r
            .points()
            .iter()
            .map(|p| (p.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-2, "{worst}");
    }

    #[test]
    fn prism_lateral_area() {
        let t = RuledTriangulation::new(unit_square(), unit_square(), 1.0).unwrap();
        assert_eq!(t.triangles().len(), 8);
        let a0 = ruled_surface_area(&t, Point2::ORIGIN);
        assert!((a0 - 4.0).abs() < 1e-12);
        assert!(ruled_surface_area(&t, Point2::new(10.0, 0.0)) > a0);
    }

    #[test]
    fn open_strip_drops_wrap_triangles() {
        let a = Contour::new(
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(2.0, 0.0),
            ],
            false,
        )
        .unwrap();
        let t = RuledTriangulation::new(a.clone(), a, 2.0).unwrap();
        assert_eq!(t.triangles().len(), 4);
        assert!((ruled_surface_area(&t, Point2::ORIGIN) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn concentric_circles_area_minimized_at_zero_shift() {
        let t = RuledTriangulation::new(circle(1.0, 256), circle(0.5, 256), 1.0).unwrap();
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..=100 {
            for j in 0..=100 {
                let s = Point2::new(-0.5 + 0.01 * i as f64, -0.5 + 0.01 * j as f64);
                let a = ruled_surface_area(&t, s);
                if a < best.0 {
                    best = (a, i, j);
                }
            }
        }
        assert_eq!((best.1, best.2), (50, 50));
    }

    #[test]
    fn count_mismatch() {
        let err = RuledTriangulation::new(unit_square(), circle(1.0, 5), 1.0);
        assert!(matches!(err, Err(Error::CountMismatch(4, 5))));
    }

    #[test]
    fn hausdorff_examples() {
        let c = circle(1.0, 512);
        assert_eq!(hausdorff_distance(&c, &c), 0.0);
        let d = hausdorff_distance(&c, &circle(1.1, 512));
        assert!((d - 0.1).abs() < 1e-12);

        let dense = resample_uniform(&unit_square(), 400).unwrap();
        for shift in [0.05, 0.3, 0.9] {
            let h = hausdorff_distance(&dense, &dense.translated(Point2::new(shift, 0.0)));
            assert!(
                h <= shift + 1e-12 && h >= shift / 2f64.sqrt() - 1e-12,
                "{h}"
            );
        }
    }

    #[test]
    fn csv_round_trip_and_speed_column() {
        let sq = unit_square();
        let (pts, v) = parse_contour_csv(&sq.to_csv(), "mem").unwrap();
        assert_eq!(pts, sq.points());
        assert!(v.is_none());
        let (_, v) =
            parse_contour_csv("index,x,y,v\n0,0,0,1.5\n1,1,0,2\n2,0,1,3\n", "mem").unwrap();
        assert_eq!(v.unwrap(), vec![1.5, 2.0, 3.0]);
        assert!(parse_contour_csv("i,x,y\n", "mem").is_err());
        assert!(parse_contour_csv("index,x,y\n1,0,0\n", "mem").is_err());
    }
}
