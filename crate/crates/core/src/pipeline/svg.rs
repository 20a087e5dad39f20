use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Contour, Point2};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 20.0;
const COLORS: [&str; 4] = ["#1f4e9a", "#b3261e", "#2e7d32", "#6a1b9a"];

/// Renders the contours as polylines on a fixed canvas with equal-aspect
/// autoscaling and `y` pointing up. The second contour is displaced by
/// `-shift`, matching the offsets `p1 - p2 + shift` of the positioning
/// objectives.
pub fn render_svg(contours: &[Contour], shift: Option<Point2>) -> Result<String> {
    if contours.is_empty() {
        return Err(Error::EmptyPlot);
    }
    let placed: Vec<Vec<Point2>> = contours
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let d = match (i, shift) {
                (1, Some(s)) => Point2::new(-s.x, -s.y),
                _ => Point2::new(0.0, 0.0),
            };
            let mut pts: Vec<Point2> = c.points().iter().map(|&p| p + d).collect();
            if c.is_closed() {
                pts.push(pts[0]);
            }
            pts
        })
        .collect();

    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for p in placed.iter().flatten() {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let span_x = (x1 - x0).max(f64::MIN_POSITIVE);
    let span_y = (y1 - y0).max(f64::MIN_POSITIVE);
    let scale = ((WIDTH - 2.0 * MARGIN) / span_x).min((HEIGHT - 2.0 * MARGIN) / span_y);
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let to_canvas = |p: Point2| {
        (
            0.5 * WIDTH + scale * (p.x - cx),
            0.5 * HEIGHT - scale * (p.y - cy),
        )
    };

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    for (i, pts) in placed.iter().enumerate() {
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = to_canvas(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            COLORS[i % COLORS.len()],
            coords.join(" ")
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn export_svg(
    contours: &[Contour],
    shift: Option<Point2>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let text = render_svg(contours, shift)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn circle(n: usize) -> Contour {
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

    fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
        svg.lines()
            .filter_map(|l| l.split("points=\"").nth(1))
            .map(|rest| {
                rest.trim_end_matches("\"/>")
                    .split(' ')
                    .map(|xy| {
                        let (x, y) = xy.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn single_circle_is_closed_and_stable() {
        let a = render_svg(&[circle(64)], None).unwrap();
        let b = render_svg(&[circle(64)], None).unwrap();
        assert_eq!(a, b);
        let lines = polylines(&a);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].len(), 65);
        assert_eq!(lines[0][0], lines[0][64]);
    }

    #[test]
    fn shift_translates_second_polyline() {
        let c = circle(16);
        let svg = render_svg(&[c.clone(), c], Some(Point2::new(1.0, 2.0))).unwrap();
        let lines = polylines(&svg);
        // bounding box spans 3 by 4 units; scale = 560 / 4
        let k = (HEIGHT - 2.0 * MARGIN) / 4.0;
        for (p, q) in lines[0].iter().zip(&lines[1]) {
            assert!((q.0 - p.0 + k).abs() < 2e-3);
            assert!((q.1 - p.1 - 2.0 * k).abs() < 2e-3);
        }
    }

    #[test]
    fn y_axis_points_up() {
        let c = Contour::new(
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(0.0, 1.0),
                Point2::new(1.0, 2.0),
            ],
            false,
        )
        .unwrap();
        let lines = polylines(&render_svg(&[c], None).unwrap());
        assert!(lines[0][1].1 < lines[0][0].1);
    }

    #[test]
    fn empty_list_is_an_error() {
        assert!(matches!(render_svg(&[], None), Err(Error::EmptyPlot)));
    }
}
