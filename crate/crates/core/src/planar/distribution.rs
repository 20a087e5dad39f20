use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prescribed signed tangential speed along a blade contour.
///
/// Samples are `(s, V)` with `s` strictly increasing in `[0, L)`. The two
/// branch indices mark the samples nearest to the stagnation points; the
/// speed keeps one sign strictly between them and the opposite sign on the
/// complementary arc.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityDistribution {
    s: Vec<f64>,
    v: Vec<f64>,
    total_length: f64,
    branch_indices: [usize; 2],
    v_inf: f64,
    incidence: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VelocityDistributionJson {
    pub samples: Vec<[f64; 2]>,
    pub v_inf: f64,
    pub incidence: f64,
    pub branch_indices: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_length: Option<f64>,
}

fn inconsistent(msg: impl Into<String>) -> Error {
    Error::InconsistentDistribution(msg.into())
}

impl VelocityDistribution {
    pub fn new(
        s: Vec<f64>,
        v: Vec<f64>,
        total_length: f64,
        branch_indices: [usize; 2],
        v_inf: f64,
        incidence: f64,
    ) -> Result<Self> {
        let m = s.len();
        if m != v.len() {
            return Err(inconsistent(format!(
                "{m} arc positions but {} speeds",
                v.len()
            )));
        }
        if m < 8 {
            return Err(inconsistent(format!("{m} samples; need at least 8")));
        }
        if s.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(inconsistent("non-finite sample"));
        }
        if s[0] < 0.0 || s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(inconsistent(
                "arc positions must increase strictly from s >= 0",
            ));
        }
        if !(total_length > s[m - 1]) || !total_length.is_finite() {
            return Err(inconsistent(format!(
                "total length {total_length} must exceed the last arc position {}",
                s[m - 1]
            )));
        }
        if !(v_inf > 0.0 && v_inf.is_finite()) {
            return Err(inconsistent(format!("v_inf = {v_inf} must be positive")));
        }
        if !incidence.is_finite() {
            return Err(inconsistent("incidence must be finite"));
        }
        let [a, b] = branch_indices;
        if a >= m || b >= m || a == b {
            return Err(inconsistent(format!(
                "branch indices {branch_indices:?} invalid for {m} samples"
            )));
        }
        let d = Self {
            s,
            v,
            total_length,
            branch_indices,
            v_inf,
            incidence,
        };
        d.check_sign_structure()?;
        Ok(d)
    }

    /// Each open arc between the branch samples carries one strict sign,
    /// opposite on the two arcs.
    fn check_sign_structure(&self) -> Result<()> {
        let m = self.len();
        let [a, b] = self.branch_indices;
        let arc_sign = |from: usize, to: usize| -> Result<f64> {
            let mut sign = 0.0;
            let mut i = (from + 1) % m;
            let mut count = 0;
            while i != to {
                let v = self.v[i];
                if v == 0.0 {
                    return Err(inconsistent(format!("speed vanishes at sample {i}")));
                }
                if sign == 0.0 {
                    sign = v.signum();
                } else if v.signum() != sign {
                    return Err(inconsistent(format!(
                        "speed changes sign at sample {i} away from the branch points"
                    )));
                }
                count += 1;
                i = (i + 1) % m;
            }
            if count == 0 {
                return Err(inconsistent("an arc between branch points has no samples"));
            }
            Ok(sign)
        };
        let first = arc_sign(a, b)?;
        let second = arc_sign(b, a)?;
        if first == second {
            return Err(inconsistent("speed has the same sign on both arcs"));
        }
        Ok(())
    }

    pub fn from_json_value(j: VelocityDistributionJson) -> Result<Self> {
        let (s, v): (Vec<f64>, Vec<f64>) = j.samples.iter().map(|p| (p[0], p[1])).unzip();
        let total_length = match j.total_length {
            Some(l) => l,
            None if s.len() >= 2 => {
                let n = s.len();
                s[n - 1] + (s[n - 1] - s[n - 2])
            }
            None => return Err(inconsistent("too few samples")),
        };
        Self::new(s, v, total_length, j.branch_indices, j.v_inf, j.incidence)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_json_value(serde_json::from_str(text)?)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_value(&self) -> VelocityDistributionJson {
        VelocityDistributionJson {
            samples: self.s.iter().zip(&self.v).map(|(&s, &v)| [s, v]).collect(),
            v_inf: self.v_inf,
            incidence: self.incidence,
            branch_indices: self.branch_indices,
            total_length: Some(self.total_length),
        }
    }

    pub fn arc_positions(&self) -> &[f64] {
        &self.s
    }

    pub fn speeds(&self) -> &[f64] {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn branch_indices(&self) -> [usize; 2] {
        self.branch_indices
    }

    pub fn v_inf(&self) -> f64 {
        self.v_inf
    }

    pub fn incidence(&self) -> f64 {
        self.incidence
    }

    /// Same samples with new speeds (sign structure re-validated).
    pub fn with_speeds(&self, v: Vec<f64>) -> Result<Self> {
        Self::new(
            self.s.clone(),
            v,
            self.total_length,
            self.branch_indices,
            self.v_inf,
            self.incidence,
        )
    }

    pub fn with_v_inf(&self, v_inf: f64) -> Result<Self> {
        let mut d = self.clone();
        if !(v_inf > 0.0) {
            return Err(inconsistent(format!("v_inf = {v_inf} must be positive")));
        }
        d.v_inf = v_inf;
        Ok(d)
    }

    pub fn with_incidence(&self, incidence: f64) -> Self {
        let mut d = self.clone();
        d.incidence = incidence;
        d
    }
}

/// Periodic piecewise-cubic Hermite interpolant of the speed on possibly
/// nonuniform knots, with fourth-order five-point slopes. Its exact
/// integral serves as the potential.
#[derive(Debug, Clone)]
pub(crate) struct SpeedSpline {
    s: Vec<f64>,
    v: Vec<f64>,
    slope: Vec<f64>,
    period: f64,
    /// Integral from `s[0]` to `s[i]`; one extra entry for the full period.
    cumulative: Vec<f64>,
}

impl SpeedSpline {
    pub(crate) fn new(d: &VelocityDistribution) -> Self {
        let s = d.s.clone();
        let v = d.v.clone();
        let m = s.len();
        let period = d.total_length;
        let knot = |i: isize| -> (f64, f64) {
            let k = i.rem_euclid(m as isize) as usize;
            let wraps = i.div_euclid(m as isize) as f64;
            (s[k] + wraps * period, v[k])
        };
        // fourth-order slopes from the five-point Lagrange stencil
        let slope: Vec<f64> = (0..m as isize)
            .map(|i| {
                let (sc, _) = knot(i);
                let pts: Vec<(f64, f64)> = (-2..=2)
                    .map(|o| {
                        let (sk, vk) = knot(i + o);
                        (sk - sc, vk)
                    })
                    .collect();
                lagrange_slope_at_center(&pts)
            })
            .collect();
        let mut spline = Self {
            s,
            v,
            slope,
            period,
            cumulative: Vec::with_capacity(m + 1),
        };
        let mut acc = 0.0;
        spline.cumulative.push(0.0);
        for i in 0..m {
            acc += spline.segment_integral(i, 1.0);
            spline.cumulative.push(acc);
        }
        spline
    }

    pub(crate) fn start(&self) -> f64 {
        self.s[0]
    }

    pub(crate) fn period(&self) -> f64 {
        self.period
    }

    pub(crate) fn knots(&self) -> &[f64] {
        &self.s
    }

    fn segment_len(&self, i: usize) -> f64 {
        let m = self.s.len();
        if i + 1 < m {
            self.s[i + 1] - self.s[i]
        } else {
            self.s[0] + self.period - self.s[i]
        }
    }

    fn segment_ends(&self, i: usize) -> (f64, f64, f64, f64) {
        let j = (i + 1) % self.s.len();
        (self.v[i], self.slope[i], self.v[j], self.slope[j])
    }

    /// Integral over the first fraction `u` of segment `i`.
    fn segment_integral(&self, i: usize, u: f64) -> f64 {
        let h = self.segment_len(i);
        let (p0, m0, p1, m1) = self.segment_ends(i);
        let u2 = u * u;
        let u3 = u2 * u;
        let u4 = u3 * u;
        h * (p0 * (u - u3 + 0.5 * u4)
            + h * m0 * (0.5 * u2 - 2.0 / 3.0 * u3 + 0.25 * u4)
            + p1 * (u3 - 0.5 * u4)
            + h * m1 * (0.25 * u4 - u3 / 3.0))
    }

    fn segment_value(&self, i: usize, u: f64) -> f64 {
        let h = self.segment_len(i);
        let (p0, m0, p1, m1) = self.segment_ends(i);
        let u2 = u * u;
        let u3 = u2 * u;
        p0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + h * m0 * (u3 - 2.0 * u2 + u)
            + p1 * (3.0 * u2 - 2.0 * u3)
            + h * m1 * (u3 - u2)
    }

    /// Segment index, local fraction and number of whole periods for `s`.
    fn locate(&self, s: f64) -> (usize, f64, f64) {
        let rel = s - self.s[0];
        let wraps = (rel / self.period).floor();
        let local = self.s[0] + (rel - wraps * self.period);
        let i = match self.s.binary_search_by(|k| k.partial_cmp(&local).unwrap()) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let u = ((local - self.s[i]) / self.segment_len(i)).clamp(0.0, 1.0);
        (i, u, wraps)
    }

    pub(crate) fn value(&self, s: f64) -> f64 {
        let (i, u, _) = self.locate(s);
        self.segment_value(i, u)
    }

    /// Running integral from `s[0]`, continued across periods.
    pub(crate) fn potential(&self, s: f64) -> f64 {
        let (i, u, wraps) = self.locate(s);
        wraps * self.circulation() + self.cumulative[i] + self.segment_integral(i, u)
    }

    pub(crate) fn circulation(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub(crate) fn knot_potentials(&self) -> &[f64] {
        &self.cumulative[..self.s.len()]
    }

    /// Root of the speed near knot `i`, searched on the two adjacent
    /// segments; returned in `[s[0], s[0] + period)`.
    pub(crate) fn root_near(&self, i: usize) -> Option<f64> {
        let m = self.s.len();
        if self.v[i] == 0.0 {
            return Some(self.s[i]);
        }
        let prev = (i + m - 1) % m;
        for seg in [i, prev] {
            let a = self.segment_value(seg, 0.0);
            let b = self.segment_value(seg, 1.0);
            if a.signum() == b.signum() {
                continue;
            }
            let (mut lo, mut hi) = (0.0, 1.0);
            let (mut flo, _) = (a, b);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = self.segment_value(seg, mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-17 {
                    break;
                }
            }
            let s = self.s[seg] + 0.5 * (lo + hi) * self.segment_len(seg);
            return Some(self.wrap(s));
        }
        None
    }

    pub(crate) fn wrap(&self, s: f64) -> f64 {
        let rel = (s - self.s[0]).rem_euclid(self.period);
        self.s[0] + rel
    }
}

/// Derivative at offset 0 (the middle node) of the interpolating polynomial.
fn lagrange_slope_at_center(pts: &[(f64, f64)]) -> f64 {
    let c = pts.len() / 2;
    let t: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let mut acc = 0.0;
    for (j, &(tj, vj)) in pts.iter().enumerate() {
        let w = if j == c {
            t.iter()
                .enumerate()
                .filter(|&(k, _)| k != c)
                .map(|(_, &tk)| -1.0 / tk)
                .sum::<f64>()
        } else {
            let num: f64 = t
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j && k != c)
                .map(|(_, &tk)| -tk)
                .product();
            let den: f64 = t
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &tk)| tj - tk)
                .product();
            num / den
        };
        acc += w * vj;
    }
    acc
}

/// Indices of the samples nearest to the two sign changes of a cyclic
/// speed sequence.
pub fn detect_branch_indices(v: &[f64]) -> Result<[usize; 2]> {
    let m = v.len();
    let mut found = Vec::new();
    for i in 0..m {
        let j = (i + 1) % m;
        if v[i] == 0.0 {
            found.push(i);
        } else if v[j] != 0.0 && v[i].signum() != v[j].signum() {
            found.push(if v[i].abs() <= v[j].abs() { i } else { j });
        }
    }
    found.dedup();
    if found.len() == 2 && found[0] != found[1] {
        Ok([found[0], found[1]])
    } else {
        Err(inconsistent(format!(
            "expected exactly two sign changes, found {}",
            found.len()
        )))
    }
}

/// Potential at each sample (zero at the first sample) and the circulation
/// `Γ = ∮ V ds`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTable {
    pub s: Vec<f64>,
    pub phi: Vec<f64>,
    pub circulation: f64,
}

/// Integrates the speed along the contour. Between consecutive samples the
/// integral of the cubic Hermite interpolant is used; it equals the
/// trapezoid rule plus slope corrections that telescope over a full period,
/// so the circulation coincides with the periodic trapezoid sum.
pub fn potential_and_circulation(d: &VelocityDistribution) -> Result<PotentialTable> {
    let spline = SpeedSpline::new(d);
    let table = PotentialTable {
        s: d.s.clone(),
        phi: spline.knot_potentials().to_vec(),
        circulation: spline.circulation(),
    };
    // monotone between branch points: strict sign of V on each open arc is
    // checked at construction; confirm on the integrated table as well
    let m = d.len();
    let [a, b] = d.branch_indices;
    for (from, to) in [(a, b), (b, a)] {
        let mut i = (from + 1) % m;
        let sign = d.v[i].signum();
        while (i + 1) % m != to {
            let j = (i + 1) % m;
            let step = if j == 0 {
                table.circulation - table.phi[i]
            } else {
                table.phi[j] - table.phi[i]
            };
            if step * sign < 0.0 {
                return Err(inconsistent(format!(
                    "potential not monotone between samples {i} and {j}"
                )));
            }
            i = j;
        }
    }
    Ok(table)
}
