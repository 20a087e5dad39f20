use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::config::{determine_w1, DesignConfig, OutputFormat, PositioningConfig};
use super::svg::render_svg;
use crate::error::{Error, Result};
use crate::geometry::{Contour, Point2};
use crate::harmonic::{AnalyticSeries, Orientation, C64};
use crate::planar::{
    solve_modified, BladeSolution, ClosureReport, SolveOptions, VelocityDistribution, CLOSURE_TOL,
};
use crate::positioning::{
    least_squares_shift, maximize_lift, minimize_area, NodePartition, ShiftMethod, ShiftVector,
};
use crate::spline::{
    assemble_linear, assemble_quadratic, field_residuals, glue_sections, solve_glued_section,
    FieldResiduals, ResidualGrid, SectionField, SplineField, ANALYTIC_TOL, FD_TOL,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Tolerance on the velocity mismatch across a glued blade.
pub const GLUE_TOL: f64 = 1e-10;
/// Tolerance on the modified Cauchy–Riemann residual of `(u0, v0)`.
pub const MODIFIED_CR_TOL: f64 = 1e-10;
const BRANCH_TOL: f64 = 1e-10;
const GLUE_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Verdict {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            pass: value.is_finite() && value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlueReport {
    pub max_du: f64,
    pub max_dv: f64,
    pub w1_constant: f64,
    pub expected_w1_constant: f64,
    pub w2: f64,
    pub branch_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionReport {
    pub id: String,
    pub ok: bool,
    pub error: Option<String>,
    pub w1: Option<f64>,
    pub w2: Option<f64>,
    pub lower_closure: Option<ClosureReport>,
    pub upper_closure: Option<ClosureReport>,
    pub residuals: Option<FieldResiduals>,
    pub shift: Option<ShiftVector>,
    pub glue: Option<GlueReport>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SectionReport {
    fn failed(id: &str, e: &Error, elapsed: Duration) -> Self {
        Self {
            id: id.to_string(),
            ok: false,
            error: Some(e.to_string()),
            w1: None,
            w2: None,
            lower_closure: None,
            upper_closure: None,
            residuals: None,
            shift: None,
            glue: None,
            verdicts: Vec::new(),
            elapsed,
        }
    }

    pub fn passes(&self) -> bool {
        self.ok && self.verdicts.iter().all(|v| v.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool_version: String,
    pub degree: u8,
    pub n_boundary: usize,
    pub sections: Vec<SectionReport>,
    pub all_pass: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Everything computed for one section.
#[derive(Debug, Clone)]
pub struct SectionOutcome {
    pub report: SectionReport,
    pub lower_contour: Option<Contour>,
    pub upper_contour: Option<Contour>,
    /// Node speeds of the two contours.
    pub speeds: Option<(Vec<f64>, Vec<f64>)>,
    pub field: Option<SectionField>,
    pub upper: Option<BladeSolution>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub report: RunReport,
    pub sections: Vec<SectionOutcome>,
}

/// Residual grid in the canonical plane, clear of the unit disk where the
/// exterior series live.
pub fn pipeline_grid() -> ResidualGrid {
    ResidualGrid::over([1.5, 3.5], [-1.0, 1.0])
}

fn solve_opts(n: usize) -> SolveOptions {
    SolveOptions {
        n_boundary: n,
        n_contour: n,
        z_start: C64::new(0.0, 0.0),
    }
}

/// Speeds at the contour nodes, `|f|` on the unit circle.
pub fn node_speeds(sol: &BladeSolution, n: usize) -> Result<Vec<f64>> {
    let f = sol.velocity_series()?;
    let c = &sol.correspondence;
    let g0 = c.gamma_of_s(c.data_start());
    (0..n)
        .map(|k| {
            let g = g0 + 2.0 * PI * k as f64 / n as f64;
            Ok(f.eval(C64::from_polar(1.0, g))?.norm())
        })
        .collect()
}

/// Places the upper contour relative to the lower one.
pub fn position_contours(
    lower: &Contour,
    upper: &Contour,
    cfg: &PositioningConfig,
    speeds: Option<(Vec<f64>, Vec<f64>)>,
) -> Result<ShiftVector> {
    let lsq = least_squares_shift(lower, upper)?;
    match cfg.method {
        ShiftMethod::Lsq => Ok(lsq),
        ShiftMethod::Area => minimize_area(lower, upper, cfg.spacing, lsq.point()),
        ShiftMethod::Lift => {
            let bounds = cfg
                .bounds
                .ok_or_else(|| Error::MissingField("/positioning/box".into()))?;
            let (v1, v2) = speeds.ok_or_else(|| Error::BadValue {
                path: "/positioning/method".into(),
                message: "lift positioning needs node speeds".into(),
            })?;
            let k = cfg.partition.unwrap_or(lower.len() / 2);
            let p = NodePartition::new(k, v1, v2)?;
            maximize_lift(lower, upper, &p, &bounds)
        }
    }
}

fn closure_verdict(name: &str, r: &ClosureReport) -> Verdict {
    Verdict::new(name, r.max_defect(), CLOSURE_TOL)
}

fn residual_verdicts(r: &FieldResiduals) -> [Verdict; 2] {
    [
        Verdict::new("field_residual_analytic", r.max_analytic(), ANALYTIC_TOL),
        Verdict::new("field_residual_fd", r.max_fd(), FD_TOL),
    ]
}

/// `|u0_x + v0_y + w1|` and `|u0_y - v0_x|` from closed-form derivatives.
fn modified_cr_verdict(field: &SplineField, w1: f64) -> Result<Verdict> {
    let p0 = field.pair(0);
    let mut worst = 0.0f64;
    for (p, h) in pipeline_grid().nodes() {
        if h != 0.0 {
            continue;
        }
        let j = p0.jacobian(p)?;
        worst = worst
            .max((j[0][0] + j[1][1] + w1).abs())
            .max((j[0][1] - j[1][0]).abs());
    }
    Ok(Verdict::new(
        "modified_cauchy_riemann",
        worst,
        MODIFIED_CR_TOL,
    ))
}

fn finish(
    mut report: SectionReport,
    contours: (&Contour, &Contour),
    cfg: &PositioningConfig,
    speeds: Option<(Vec<f64>, Vec<f64>)>,
) -> Result<SectionReport> {
    report.shift = Some(position_contours(contours.0, contours.1, cfg, speeds)?);
    report.ok = true;
    Ok(report)
}

struct Solved {
    report: SectionReport,
    lower: Contour,
    speeds: (Vec<f64>, Vec<f64>),
    upper_sol: BladeSolution,
    field: SectionField,
}

fn new_report(id: &str) -> SectionReport {
    SectionReport {
        id: id.to_string(),
        ok: false,
        error: None,
        w1: None,
        w2: None,
        lower_closure: None,
        upper_closure: None,
        residuals: None,
        shift: None,
        glue: None,
        verdicts: Vec::new(),
        elapsed: Duration::ZERO,
    }
}

/// One section from its own two blades: `h = 0` lower, `h = 1` upper.
fn solve_independent(
    id: &str,
    lower: &VelocityDistribution,
    upper: &VelocityDistribution,
    w1: f64,
    w2: Option<f64>,
    n: usize,
    pos: &PositioningConfig,
) -> Result<Solved> {
    let opts = solve_opts(n);
    let upper_shift = w1 + 2.0 * w2.unwrap_or(0.0);
    let (lo, up) = std::thread::scope(|s| {
        let h = s.spawn(|| solve_modified(upper, upper_shift, opts));
        let lo = solve_modified(lower, w1, opts);
        (lo, h.join().expect("blade solve panicked"))
    });
    let (lo, up) = (lo?, up?);
    let fl = lo.velocity_series()?;
    let fu = up.velocity_series()?;
    let f1 = fu.sub(&fl);
    let b = lo.branch_point();
    let field = match w2 {
        None => SectionField::Linear(assemble_linear(&fl, &f1, w1, b)?),
        Some(w2) => {
            let f2 = AnalyticSeries::zero(Orientation::Exterior);
            SectionField::Quadratic(assemble_quadratic(&fl, &f1, &f2, w1, w2, b)?)
        }
    };
    let residuals = field_residuals(field.field(), &pipeline_grid())?;

    let mut report = new_report(id);
    report.w1 = Some(w1);
    report.w2 = w2;
    report
        .verdicts
        .push(closure_verdict("lower_closure", &lo.report));
    report
        .verdicts
        .push(closure_verdict("upper_closure", &up.report));
    report.verdicts.extend(residual_verdicts(&residuals));
    if w2.is_none() {
        report
            .verdicts
            .push(modified_cr_verdict(field.field(), w1)?);
    }
    report.lower_closure = Some(lo.report);
    report.upper_closure = Some(up.report);
    report.residuals = Some(residuals);
    let speeds = (node_speeds(&lo, n)?, node_speeds(&up, n)?);
    let report = finish(
        report,
        (&lo.contour, &up.contour),
        pos,
        Some(speeds.clone()),
    )?;
    Ok(Solved {
        report,
        lower: lo.contour,
        speeds,
        upper_sol: up,
        field,
    })
}

/// Max `|Δu|`, `|Δv|` between two pairs on the unit circle.
fn glue_mismatch(a: &SplineField, ha: f64, b: &SplineField, hb: f64) -> Result<(f64, f64)> {
    let pa = a.pair_at(ha);
    let pb = b.pair_at(hb);
    let mut du = 0.0f64;
    let mut dv = 0.0f64;
    for k in 0..GLUE_SAMPLES {
        let t = 2.0 * PI * k as f64 / GLUE_SAMPLES as f64;
        let p = Point2::new(t.cos(), t.sin());
        let (u1, v1) = pa.eval(p)?;
        let (u2, v2) = pb.eval(p)?;
        du = du.max((u1 - u2).abs());
        dv = dv.max((v1 - v2).abs());
    }
    Ok((du, dv))
}

/// A later section of a degree-2 chain: its lower blade is the previous
/// section's upper blade.
fn solve_chained(
    id: &str,
    prev: &Solved,
    upper: &VelocityDistribution,
    w2_guess: f64,
    n: usize,
    pos: &PositioningConfig,
) -> Result<Solved> {
    let prev_q = match &prev.field {
        SectionField::Quadratic(q) => q,
        SectionField::Linear(_) => return Err(Error::GluingUnsupportedInLinearMode),
    };
    let shared = prev.upper_sol.branch_point();
    let glued = glue_sections(&prev.field, shared)?;
    let g = solve_glued_section(&glued, upper, w2_guess, solve_opts(n))?;
    let residuals = field_residuals(&g.field.field, &pipeline_grid())?;
    let (du, dv) = glue_mismatch(&prev_q.field, 1.0, &g.field.field, 0.0)?;
    let b_prev = prev_q.field.branch_point();
    let expected = prev_q.w1().eval(b_prev)? + prev_q.w2;
    let w1_constant = g.field.w1().eval(shared)?;
    let glue = GlueReport {
        max_du: du,
        max_dv: dv,
        w1_constant,
        expected_w1_constant: expected,
        w2: g.field.w2,
        branch_residual: g.branch_residual,
        iterations: g.iterations,
    };

    let mut report = new_report(id);
    report.w1 = Some(glued.w1_at_branch);
    report.w2 = Some(g.field.w2);
    report
        .verdicts
        .push(closure_verdict("upper_closure", &g.upper.report));
    report.verdicts.extend(residual_verdicts(&residuals));
    report
        .verdicts
        .push(Verdict::new("glue_velocity", du.max(dv), GLUE_TOL));
    report.verdicts.push(Verdict::new(
        "glue_w1_constant",
        (w1_constant - expected).abs(),
        0.0,
    ));
    report.verdicts.push(Verdict::new(
        "upper_branch_w",
        g.branch_residual.abs(),
        BRANCH_TOL,
    ));
    report.upper_closure = Some(g.upper.report);
    report.residuals = Some(residuals);
    report.glue = Some(glue);
    let speeds = (prev.speeds.1.clone(), node_speeds(&g.upper, n)?);
    let lower = prev.upper_sol.contour.clone();
    let report = finish(
        report,
        (&lower, &g.upper.contour),
        pos,
        Some(speeds.clone()),
    )?;
    Ok(Solved {
        report,
        lower,
        speeds,
        upper_sol: g.upper,
        field: SectionField::Quadratic(g.field),
    })
}

fn outcome(id: &str, r: Result<Solved>, elapsed: Duration) -> (SectionOutcome, Option<Solved>) {
    match r {
        Ok(mut s) => {
            s.report.elapsed = elapsed;
            log::info!("section {id}: solved in {:.3} s", elapsed.as_secs_f64());
            let o = SectionOutcome {
                report: s.report.clone(),
                lower_contour: Some(s.lower.clone()),
                upper_contour: Some(s.upper_sol.contour.clone()),
                speeds: Some(s.speeds.clone()),
                field: Some(s.field.clone()),
                upper: Some(s.upper_sol.clone()),
            };
            (o, Some(s))
        }
        Err(e) => {
            log::warn!("section {id}: {e}");
            let o = SectionOutcome {
                report: SectionReport::failed(id, &e, elapsed),
                lower_contour: None,
                upper_contour: None,
                speeds: None,
                field: None,
                upper: None,
            };
            (o, None)
        }
    }
}

/// Runs every section. A failing section is reported and skipped; later
/// sections of a degree-2 chain that depend on it fail with a diagnostic.
pub fn run_pipeline(cfg: &DesignConfig) -> RunResult {
    let n = cfg.n_boundary;
    let pos = &cfg.positioning;
    let independent = |s: &super::config::SectionConfig| -> Result<Solved> {
        let w1 = determine_w1(s)?;
        let lower = s
            .lower
            .as_ref()
            .ok_or_else(|| Error::MissingField(format!("/sections/{}/lower", s.id)))?;
        let w2 = if s.degree == 2 {
            Some(s.w2.unwrap_or(0.0))
        } else {
            None
        };
        solve_independent(&s.id, lower, &s.upper, w1, w2, n, pos)
    };

    let sections: Vec<SectionOutcome> = if cfg.degree() == 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = cfg
                .sections
                .iter()
                .map(|s| {
                    scope.spawn(move || {
                        let t = Instant::now();
                        let r = independent(s);
                        (r, t.elapsed())
                    })
                })
                .collect();
            cfg.sections
                .iter()
                .zip(handles)
                .map(|(s, h)| {
                    let (r, dt) = h.join().expect("section worker panicked");
                    outcome(&s.id, r, dt).0
                })
                .collect()
        })
    } else {
        let mut out = Vec::with_capacity(cfg.sections.len());
        let mut prev: Option<Solved> = None;
        for (i, s) in cfg.sections.iter().enumerate() {
            let t = Instant::now();
            let r = if i == 0 {
                independent(s)
            } else {
                match &prev {
                    Some(p) => {
                        let guess = s.w2.or(p.report.w2).unwrap_or(0.0);
                        solve_chained(&s.id, p, &s.upper, guess, n, pos)
                    }
                    None => Err(Error::BadValue {
                        path: format!("/sections/{i}"),
                        message: "previous section of the chain failed".into(),
                    }),
                }
            };
            let (o, solved) = outcome(&s.id, r, t.elapsed());
            out.push(o);
            prev = solved;
        }
        out
    };

    let reports: Vec<SectionReport> = sections.iter().map(|o| o.report.clone()).collect();
    let all_pass = reports.iter().all(SectionReport::passes);
    RunResult {
        report: RunReport {
            tool_version: TOOL_VERSION.to_string(),
            degree: cfg.degree(),
            n_boundary: n,
            sections: reports,
            all_pass,
        },
        sections,
    }
}

/// Contour CSV with the optional speed column.
pub fn csv_with_speeds(c: &Contour, v: &[f64]) -> String {
    let mut out = String::from("index,x,y,v\n");
    for (i, (p, s)) in c.points().iter().zip(v).enumerate() {
        out.push_str(&format!("{i},{},{},{s}\n", p.x, p.y));
    }
    out
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes per-section contours, shift, residuals and plot, plus the run
/// report. Failed sections write nothing of their own.
pub fn write_artifacts(result: &RunResult, formats: &[OutputFormat], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let has = |f| formats.contains(&f);
    for s in &result.sections {
        let (Some(lo), Some(up)) = (&s.lower_contour, &s.upper_contour) else {
            continue;
        };
        let id = &s.report.id;
        if has(OutputFormat::Csv) {
            let (v1, v2) = s.speeds.as_ref().expect("solved sections carry speeds");
            write(
                &dir.join(format!("{id}_lower.csv")),
                &csv_with_speeds(lo, v1),
            )?;
            write(
                &dir.join(format!("{id}_upper.csv")),
                &csv_with_speeds(up, v2),
            )?;
        }
        if has(OutputFormat::Json) {
            if let Some(shift) = &s.report.shift {
                write(
                    &dir.join(format!("{id}_shift.json")),
                    &serde_json::to_string_pretty(shift)?,
                )?;
            }
            if let Some(r) = &s.report.residuals {
                write(
                    &dir.join(format!("{id}_residuals.json")),
                    &serde_json::to_string_pretty(r)?,
                )?;
            }
        }
        if has(OutputFormat::Svg) {
            let shift = s.report.shift.map(|v| v.point());
            write(
                &dir.join(format!("{id}.svg")),
                &render_svg(&[lo.clone(), up.clone()], shift)?,
            )?;
        }
    }
    if has(OutputFormat::Json) {
        write(&dir.join("report.json"), &result.report.to_json())?;
    }
    Ok(())
}
