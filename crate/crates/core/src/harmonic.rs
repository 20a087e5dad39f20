//! Spectral tools on the unit circle: trigonometric interpolation, harmonic
//! conjugation, the Schwarz operator, and a small Laurent-series algebra for
//! the analytic functions built on top of them.
//!
//! Boundary samples live at `γ_k = phase + 2πk/n` with `n` a power of two.
//! Conjugation maps `cos kγ ↦ sin kγ` and `sin kγ ↦ -cos kγ`, constants to
//! zero. Exterior series are expanded in powers of `1/ζ`; their boundary
//! real part is obtained through `ζ ↦ 1/ζ`, so a single conjugation
//! convention serves both orientations.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Residues smaller than this (relative to the largest coefficient) are
/// treated as round-off.
pub const RESIDUE_TOL: f64 = 1e-10;

/// Values at `n` equispaced angles `γ_k = phase + 2πk/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySamples {
    values: Vec<f64>,
    phase: f64,
}

impl BoundarySamples {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_phase(values, 0.0)
    }

    pub fn with_phase(values: Vec<f64>, phase: f64) -> Result<Self> {
        let n = values.len();
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::BadSamples(format!(
                "{n} samples; need a power of two >= 8"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadSamples("non-finite sample".into()));
        }
        Ok(Self { values, phase })
    }

    /// Samples `f` on the grid.
    pub fn from_fn(n: usize, phase: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..n).map(|k| f(node_angle(n, phase, k))).collect();
        Self::with_phase(values, phase)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn angle(&self, k: usize) -> f64 {
        node_angle(self.values.len(), self.phase, k)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

pub fn node_angle(n: usize, phase: f64, k: usize) -> f64 {
    phase + 2.0 * PI * k as f64 / n as f64
}

/// Real trigonometric interpolant
/// `a_0 + Σ_{k=1}^{n/2} (a_k cos kθ + b_k sin kθ)` with `θ = γ - phase`.
/// The Nyquist sine coefficient is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub phase: f64,
}

impl TrigSeries {
    pub fn eval(&self, gamma: f64) -> f64 {
        let theta = gamma - self.phase;
        self.a
            .iter()
            .zip(&self.b)
            .enumerate()
            .rev()
            .map(|(k, (a, b))| {
                let (s, c) = (k as f64 * theta).sin_cos();
                a * c + b * s
            })
            .sum()
    }

    pub fn max_harmonic(&self) -> usize {
        self.a.len() - 1
    }
}

fn spectrum(values: &[f64]) -> Vec<C64> {
    let n = values.len();
    let mut buf: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf
}

fn inverse_real(mut spectrum: Vec<C64>) -> Vec<f64> {
    let n = spectrum.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);
    spectrum.iter().map(|c| c.re / n as f64).collect()
}

pub fn trig_fit(s: &BoundarySamples) -> TrigSeries {
    let n = s.len();
    let half = n / 2;
    let x = spectrum(s.values());
    let scale = 2.0 / n as f64;
    let mut a = vec![0.0; half + 1];
    let mut b = vec![0.0; half + 1];
    a[0] = x[0].re / n as f64;
    for k in 1..half {
        a[k] = scale * x[k].re;
        b[k] = -scale * x[k].im;
    }
    a[half] = x[half].re / n as f64;
    TrigSeries {
        a,
        b,
        phase: s.phase(),
    }
}

/// Boundary trace of the zero-mean harmonic conjugate.
pub fn conjugate_on_circle(s: &BoundarySamples) -> BoundarySamples {
    let n = s.len();
    let mut x = spectrum(s.values());
    x[0] = C64::new(0.0, 0.0);
    x[n / 2] = C64::new(0.0, 0.0);
    for (k, xk) in x.iter_mut().enumerate().skip(1) {
        if k < n / 2 {
            *xk *= -I;
        } else if k > n / 2 {
            *xk *= I;
        }
    }
    BoundarySamples {
        values: inverse_real(x),
        phase: s.phase(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Powers `ζ^k`, valid everywhere the polynomial is.
    Interior,
    /// Powers `ζ^{-k}`, valid for `|ζ| >= 1`. A finite polynomial part is
    /// allowed so that antiderivatives stay representable.
    Exterior,
}

/// Finite Laurent series `Σ_k c_k ζ^k`. `nonneg[k]` multiplies `ζ^k`,
/// `neg[k-1]` multiplies `ζ^{-k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSeries {
    orientation: Orientation,
    nonneg: Vec<C64>,
    neg: Vec<C64>,
}

impl AnalyticSeries {
    pub fn zero(orientation: Orientation) -> Self {
        Self {
            orientation,
            nonneg: vec![C64::new(0.0, 0.0)],
            neg: Vec::new(),
        }
    }

    pub fn constant(c: C64, orientation: Orientation) -> Self {
        Self {
            orientation,
            nonneg: vec![c],
            neg: Vec::new(),
        }
    }

    /// `Σ c_k ζ^k`.
    pub fn interior(coeffs: Vec<C64>) -> Self {
        let nonneg = if coeffs.is_empty() {
            vec![C64::new(0.0, 0.0)]
        } else {
            coeffs
        };
        Self {
            orientation: Orientation::Interior,
            nonneg,
            neg: Vec::new(),
        }
    }

    /// `Σ c_k ζ^{-k}`, `coeffs[0]` being the value at infinity.
    pub fn exterior(coeffs: Vec<C64>) -> Self {
        let mut it = coeffs.into_iter();
        let c0 = it.next().unwrap_or_default();
        Self {
            orientation: Orientation::Exterior,
            nonneg: vec![c0],
            neg: it.collect(),
        }
    }

    /// General Laurent series with the exterior domain.
    pub fn laurent(nonneg: Vec<C64>, neg: Vec<C64>) -> Self {
        let nonneg = if nonneg.is_empty() {
            vec![C64::new(0.0, 0.0)]
        } else {
            nonneg
        };
        let orientation = if neg.is_empty() {
            Orientation::Interior
        } else {
            Orientation::Exterior
        };
        Self {
            orientation,
            nonneg,
            neg,
        }
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn coefficient(&self, power: i64) -> C64 {
        if power >= 0 {
            self.nonneg.get(power as usize).copied().unwrap_or_default()
        } else {
            self.neg
                .get((-power - 1) as usize)
                .copied()
                .unwrap_or_default()
        }
    }

    pub fn set_coefficient(&mut self, power: i64, c: C64) {
        if power >= 0 {
            let p = power as usize;
            if p >= self.nonneg.len() {
                self.nonneg.resize(p + 1, C64::default());
            }
            self.nonneg[p] = c;
        } else {
            if self.orientation == Orientation::Interior {
                self.orientation = Orientation::Exterior;
            }
            let p = (-power - 1) as usize;
            if p >= self.neg.len() {
                self.neg.resize(p + 1, C64::default());
            }
            self.neg[p] = c;
        }
    }

    pub fn max_power(&self) -> i64 {
        self.nonneg.len() as i64 - 1
    }

    pub fn min_power(&self) -> i64 {
        -(self.neg.len() as i64)
    }

    /// Coefficients of `ζ^{-k}`, `k = 0..`, for an exterior series.
    pub fn exterior_coeffs(&self) -> Vec<C64> {
        std::iter::once(self.coefficient(0))
            .chain(self.neg.iter().copied())
            .collect()
    }

    pub fn nonneg_coeffs(&self) -> &[C64] {
        &self.nonneg
    }

    pub fn neg_coeffs(&self) -> &[C64] {
        &self.neg
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.nonneg
            .iter()
            .chain(&self.neg)
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    fn check_domain(&self, z: C64) -> Result<()> {
        if self.orientation == Orientation::Exterior
            && !self.neg.is_empty()
            && z.norm() < 1.0 - 1e-12
        {
            return Err(Error::OutsideDomain(z.norm()));
        }
        Ok(())
    }

    /// Horner evaluation, highest degree first in `ζ` and in `1/ζ`.
    pub fn eval(&self, z: C64) -> Result<C64> {
        self.check_domain(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: C64) -> C64 {
        let pos = self
            .nonneg
            .iter()
            .rev()
            .fold(C64::default(), |acc, &c| acc * z + c);
        if self.neg.is_empty() {
            return pos;
        }
        let t = z.inv();
        let neg = self
            .neg
            .iter()
            .rev()
            .fold(C64::default(), |acc, &c| acc * t + c)
            * t;
        pos + neg
    }

    /// Term-wise derivative.
    pub fn differentiate(&self) -> AnalyticSeries {
        let nonneg: Vec<C64> = self
            .nonneg
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        let mut neg = vec![C64::default(); self.neg.len() + 1];
        for (j, &c) in self.neg.iter().enumerate() {
            let k = (j + 1) as f64;
            neg[j + 1] = -c * k;
        }
        trim_trailing(&mut neg);
        let mut out = AnalyticSeries {
            orientation: self.orientation,
            nonneg,
            neg,
        };
        if out.nonneg.is_empty() {
            out.nonneg.push(C64::default());
        }
        out
    }

    pub fn derivative_at(&self, z: C64) -> Result<C64> {
        self.check_domain(z)?;
        Ok(self.differentiate().eval_unchecked(z))
    }

    pub fn scale(&self, a: C64) -> AnalyticSeries {
        AnalyticSeries {
            orientation: self.orientation,
            nonneg: self.nonneg.iter().map(|&c| c * a).collect(),
            neg: self.neg.iter().map(|&c| c * a).collect(),
        }
    }

    pub fn add(&self, other: &AnalyticSeries) -> AnalyticSeries {
        let n = self.nonneg.len().max(other.nonneg.len());
        let m = self.neg.len().max(other.neg.len());
        let nonneg = (0..n)
            .map(|k| self.coefficient(k as i64) + other.coefficient(k as i64))
            .collect();
        let neg = (1..=m)
            .map(|k| self.coefficient(-(k as i64)) + other.coefficient(-(k as i64)))
            .collect();
        let orientation = if self.orientation == Orientation::Exterior
            || other.orientation == Orientation::Exterior
        {
            Orientation::Exterior
        } else {
            Orientation::Interior
        };
        AnalyticSeries {
            orientation,
            nonneg,
            neg,
        }
    }

    pub fn sub(&self, other: &AnalyticSeries) -> AnalyticSeries {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Product truncated to powers `>= -max_neg`.
    pub fn mul(&self, other: &AnalyticSeries, max_neg: usize) -> AnalyticSeries {
        let (lo_a, hi_a) = (self.min_power(), self.max_power());
        let (lo_b, hi_b) = (other.min_power(), other.max_power());
        let lo = (lo_a + lo_b).max(-(max_neg as i64));
        let hi = hi_a + hi_b;
        let mut out = AnalyticSeries::zero(Orientation::Interior);
        if self.orientation == Orientation::Exterior || other.orientation == Orientation::Exterior {
            out.orientation = Orientation::Exterior;
        }
        for p in lo..=hi {
            let mut acc = C64::default();
            for i in lo_a..=hi_a {
                let j = p - i;
                if j >= lo_b && j <= hi_b {
                    acc += self.coefficient(i) * other.coefficient(j);
                }
            }
            if acc != C64::default() || p == 0 {
                out.set_coefficient(p, acc);
            }
        }
        out
    }

    /// `exp(self)` truncated after `terms` coefficients. The series must be
    /// one-sided: a polynomial (interior) or bounded at infinity (exterior).
    pub fn exp_truncated(&self, terms: usize) -> Result<AnalyticSeries> {
        let exterior = !self.neg.is_empty();
        if exterior && self.nonneg.iter().skip(1).any(|c| c.norm() > 0.0) {
            return Err(Error::BadSamples(
                "exponential of a two-sided Laurent series".into(),
            ));
        }
        // coefficients in the expansion variable (ζ or 1/ζ)
        let g: Vec<C64> = if exterior {
            self.exterior_coeffs()
        } else {
            self.nonneg.clone()
        };
        let terms = terms.max(1);
        let mut e = vec![C64::default(); terms];
        e[0] = g[0].exp();
        for k in 1..terms {
            let mut acc = C64::default();
            for j in 1..=k.min(g.len() - 1) {
                acc += g[j] * (j as f64) * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Ok(if exterior {
            AnalyticSeries::exterior(e)
        } else {
            AnalyticSeries::interior(e)
        })
    }

    /// Same series with exactly zero trailing coefficients removed.
    pub fn trimmed(&self) -> AnalyticSeries {
        let mut nonneg = self.nonneg.clone();
        let mut neg = self.neg.clone();
        trim_trailing(&mut nonneg);
        trim_trailing(&mut neg);
        if nonneg.is_empty() {
            nonneg.push(C64::default());
        }
        AnalyticSeries {
            orientation: self.orientation,
            nonneg,
            neg,
        }
    }

    /// Complex-conjugated coefficients, i.e. `conj(f(conj ζ))`.
    pub fn conj_coeffs(&self) -> AnalyticSeries {
        AnalyticSeries {
            orientation: self.orientation,
            nonneg: self.nonneg.iter().map(|c| c.conj()).collect(),
            neg: self.neg.iter().map(|c| c.conj()).collect(),
        }
    }
}

fn trim_trailing(v: &mut Vec<C64>) {
    while v.last().is_some_and(|c| *c == C64::default()) {
        v.pop();
    }
}

pub fn evaluate_series(f: &AnalyticSeries, z: C64) -> Result<C64> {
    f.eval(z)
}

/// Term-wise antiderivative `F` with `F(z0) = 0`.
pub fn integrate_series(f: &AnalyticSeries, z0: C64) -> Result<AnalyticSeries> {
    let residue = f.coefficient(-1);
    if residue.norm() > RESIDUE_TOL * f.max_abs_coefficient().max(1.0) {
        return Err(Error::MultivaluedAntiderivative(residue.norm()));
    }
    let mut nonneg = vec![C64::default(); f.nonneg.len() + 1];
    for (k, &c) in f.nonneg.iter().enumerate() {
        nonneg[k + 1] = c / (k + 1) as f64;
    }
    // ζ^{-k} ↦ ζ^{1-k}/(1-k) for k >= 2
    let neg: Vec<C64> = (2..=f.neg.len())
        .map(|k| f.coefficient(-(k as i64)) / (1.0 - k as f64))
        .collect();
    let mut out = AnalyticSeries {
        orientation: f.orientation,
        nonneg,
        neg,
    };
    let offset = out.eval(z0)?;
    out.nonneg[0] -= offset;
    Ok(out)
}

/// Schwarz operator: the series whose boundary real part interpolates `re`
/// and whose boundary imaginary part has zero mean. Harmonics up to
/// `n/2 - 1` are kept; the Nyquist component is dropped since its
/// conjugate vanishes on the nodes.
pub fn analytic_from_real_boundary(
    re: &BoundarySamples,
    orientation: Orientation,
) -> AnalyticSeries {
    let fit = trig_fit(re);
    let half = re.len() / 2;
    let mut coeffs = Vec::with_capacity(half);
    coeffs.push(C64::new(fit.a[0], 0.0));
    for k in 1..half {
        let rot = C64::from_polar(1.0, k as f64 * fit.phase);
        let c = match orientation {
            Orientation::Interior => C64::new(fit.a[k], -fit.b[k]) / rot,
            Orientation::Exterior => C64::new(fit.a[k], fit.b[k]) * rot,
        };
        coeffs.push(c);
    }
    match orientation {
        Orientation::Interior => AnalyticSeries::interior(coeffs),
        Orientation::Exterior => AnalyticSeries::exterior(coeffs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fit_constant() {
        let s = BoundarySamples::new(vec![1.0; 16]).unwrap();
        let f = trig_fit(&s);
        assert!((f.a[0] - 1.0).abs() < 1e-15);
        assert!(f.a.iter().skip(1).chain(&f.b).all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn fit_first_harmonic() {
        let s = BoundarySamples::from_fn(16, 0.0, f64::cos).unwrap();
        let f = trig_fit(&s);
        for k in 0..=8 {
            let want = if k == 1 { 1.0 } else { 0.0 };
            assert!(
                (f.a[k] - want).abs() < 1e-14 && f.b[k].abs() < 1e-14,
                "k={k}"
            );
        }
    }

    #[test]
    fn fit_three_harmonics_off_node() {
        let g = |t: f64| 3.0 + 2.0 * (2.0 * t).cos() - (3.0 * t).sin();
        let s = BoundarySamples::from_fn(32, 0.3, g).unwrap();
        let f = trig_fit(&s);
        assert!((f.a[0] - 3.0).abs() < 1e-13);
        for k in 0..200 {
            let t = 0.0317 * k as f64;
            assert!((f.eval(t) - g(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_reproduces_nodes() {
        let vals: Vec<f64> = (0..64).map(|k| ((k * 37 % 11) as f64).sqrt()).collect();
        let s = BoundarySamples::new(vals.clone()).unwrap();
        let f = trig_fit(&s);
        for (k, v) in vals.iter().enumerate() {
            assert!((f.eval(s.angle(k)) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(BoundarySamples::new(vec![0.0; 12]).is_err());
        assert!(BoundarySamples::new(vec![0.0; 4]).is_err());
    }

    #[test]
    fn conjugate_examples() {
        let n = 32;
        let h = conjugate_on_circle(&BoundarySamples::from_fn(n, 0.0, f64::cos).unwrap());
        for k in 0..n {
            assert!((h.values()[k] - h.angle(k).sin()).abs() < 1e-14);
        }
        let h = conjugate_on_circle(&BoundarySamples::new(vec![5.0; n]).unwrap());
        assert!(h.values().iter().all(|v| v.abs() < 1e-14));
        let h = conjugate_on_circle(
            &BoundarySamples::from_fn(n, 0.1, |t| (2.0 * t).cos() + 3.0).unwrap(),
        );
        for k in 0..n {
            let want = (2.0 * h.angle(k)).sin();
            assert!((h.values()[k] - want).abs() < 1e-13, "{k}");
        }
    }

    #[test]
    fn schwarz_examples() {
        let n = 16;
        let s = BoundarySamples::from_fn(n, 0.0, f64::cos).unwrap();
        let f = analytic_from_real_boundary(&s, Orientation::Interior);
        for k in 0..n {
            let z = C64::from_polar(1.0, s.angle(k));
            assert!((f.eval(z).unwrap() - z).norm() < 1e-14);
        }
        let zero = analytic_from_real_boundary(
            &BoundarySamples::new(vec![0.0; n]).unwrap(),
            Orientation::Exterior,
        );
        assert_eq!(zero.max_abs_coefficient(), 0.0);
    }

    #[test]
    fn exterior_schwarz_matches_boundary() {
        let g = |t: f64| 0.2 + (t).cos() * 0.3 - (2.0 * t).sin() * 0.1 + (5.0 * t).cos() * 0.01;
        for phase in [0.0, 0.7] {
            let s = BoundarySamples::from_fn(64, phase, g).unwrap();
            let f = analytic_from_real_boundary(&s, Orientation::Exterior);
            let mut im_mean = 0.0;
            for k in 0..64 {
                let z = C64::from_polar(1.0, s.angle(k));
                let v = f.eval(z).unwrap();
                assert!((v.re - g(s.angle(k))).abs() < 1e-13);
                im_mean += v.im / 64.0;
            }
            assert!(im_mean.abs() < 1e-14);
            assert!(f.coefficient(0).im.abs() < 1e-15);
        }
    }

    #[test]
    fn integrate_examples() {
        let one = AnalyticSeries::constant(c(1.0, 0.0), Orientation::Interior);
        let f = integrate_series(&one, c(0.0, 0.0)).unwrap();
        assert_eq!(f.nonneg_coeffs(), &[c(0.0, 0.0), c(1.0, 0.0)]);

        let iz = AnalyticSeries::interior(vec![c(0.0, 0.0), c(0.0, 1.0)]);
        let f = integrate_series(&iz, c(0.0, 0.0)).unwrap();
        assert_eq!(f.coefficient(2), c(0.0, 0.5));

        let p = AnalyticSeries::interior(vec![c(-2.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
        let f = integrate_series(&p, c(1.0, 0.0)).unwrap();
        assert_eq!(
            f.nonneg_coeffs(),
            &[c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
        );
    }

    #[test]
    fn integrate_rejects_residue() {
        let f = AnalyticSeries::exterior(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            integrate_series(&f, c(2.0, 0.0)),
            Err(Error::MultivaluedAntiderivative(_))
        ));
    }

    #[test]
    fn evaluate_examples() {
        let sq = AnalyticSeries::interior(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(sq.eval(c(0.0, 2.0)).unwrap(), c(-4.0, 0.0));
        let ext = AnalyticSeries::exterior(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(ext.eval(c(2.0, 0.0)).unwrap(), c(1.5, 0.0));
        assert!(matches!(
            ext.eval(c(0.5, 0.0)),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn exp_matches_pointwise() {
        let g =
            AnalyticSeries::exterior(vec![c(0.1, 0.2), c(0.3, -0.1), c(0.0, 0.05), c(0.02, 0.0)]);
        let e = g.exp_truncated(80).unwrap();
        for k in 0..17 {
            let z = C64::from_polar(1.0 + 0.1 * k as f64, 0.4 * k as f64);
            let want = g.eval(z).unwrap().exp();
            assert!((e.eval(z).unwrap() - want).norm() < 1e-13);
        }
    }

    fn arb_series(exterior: bool) -> impl Strategy<Value = AnalyticSeries> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8).prop_map(move |v| {
            let coeffs = v.into_iter().map(|(a, b)| c(a, b)).collect();
            if exterior {
                AnalyticSeries::exterior(coeffs)
            } else {
                AnalyticSeries::interior(coeffs)
            }
        })
    }

    proptest! {
        #[test]
        fn horner_matches_naive_sum(
            f in arb_series(true),
            r in 1.0f64..3.0,
            t in 0.0f64..6.3,
        ) {
            let z = C64::from_polar(r, t);
            let naive: C64 = (0..=7)
                .map(|k| f.coefficient(-(k as i64)) * z.powi(-k))
                .sum();
            let got = f.eval(z).unwrap();
            prop_assert!((got - naive).norm() <= 1e-14 * naive.norm().max(1.0));
        }

        #[test]
        fn integrate_then_differentiate(f in arb_series(false), g in arb_series(true)) {
            for s in [f, g] {
                let mut s = s;
                s.set_coefficient(-1, C64::default());
                let back = integrate_series(&s, c(1.5, 0.5)).unwrap().differentiate();
                for p in s.min_power()..=s.max_power() {
                    prop_assert!((back.coefficient(p) - s.coefficient(p)).norm() < 1e-15);
                }
            }
        }

        #[test]
        fn conjugation_twice_negates(vals in prop::collection::vec(-5.0f64..5.0, 32)) {
            let s = BoundarySamples::new(vals).unwrap();
            let twice = conjugate_on_circle(&conjugate_on_circle(&s));
            let mean = s.mean();
            // the Nyquist mode is annihilated by conjugation
            let fit = trig_fit(&s);
            for k in 0..32 {
                let nyq = fit.a[16] * (16.0 * s.angle(k)).cos();
                let want = -(s.values()[k] - mean - nyq);
                prop_assert!((twice.values()[k] - want).abs() < 1e-12);
            }
        }

        #[test]
        fn schwarz_round_trip_band_limited(
            coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 15),
            a0 in -2.0f64..2.0,
        ) {
            let g = |t: f64| a0 + coeffs.iter().enumerate()
                .map(|(k, (a, b))| a * ((k + 1) as f64 * t).cos() + b * ((k + 1) as f64 * t).sin())
                .sum::<f64>();
            let s = BoundarySamples::from_fn(32, 0.0, g).unwrap();
            for orient in [Orientation::Interior, Orientation::Exterior] {
                let f = analytic_from_real_boundary(&s, orient);
                for k in 0..32 {
                    let z = C64::from_polar(1.0, s.angle(k));
                    prop_assert!((f.eval(z).unwrap().re - s.values()[k]).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn operations_are_linear(
            u in prop::collection::vec(-1.0f64..1.0, 16),
            v in prop::collection::vec(-1.0f64..1.0, 16),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let su = BoundarySamples::new(u.clone()).unwrap();
            let sv = BoundarySamples::new(v.clone()).unwrap();
            let comb = BoundarySamples::new(
                u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect()).unwrap();
            let (hu, hv, hc) = (conjugate_on_circle(&su), conjugate_on_circle(&sv), conjugate_on_circle(&comb));
            for k in 0..16 {
                prop_assert!((hc.values()[k] - a * hu.values()[k] - b * hv.values()[k]).abs() < 1e-12);
            }
            let (fu, fv, fc) = (
                analytic_from_real_boundary(&su, Orientation::Exterior),
                analytic_from_real_boundary(&sv, Orientation::Exterior),
                analytic_from_real_boundary(&comb, Orientation::Exterior),
            );
            let lin = fu.scale(c(a, 0.0)).add(&fv.scale(c(b, 0.0)));
            for p in -7..=0 {
                prop_assert!((fc.coefficient(p) - lin.coefficient(p)).norm() < 1e-12);
            }
            let iu = integrate_series(&fu.sub(&AnalyticSeries::exterior(vec![C64::default(), fu.coefficient(-1)])), c(2.0, 0.0)).unwrap();
            let iv = integrate_series(&fv.sub(&AnalyticSeries::exterior(vec![C64::default(), fv.coefficient(-1)])), c(2.0, 0.0)).unwrap();
            let fcr = fc.sub(&AnalyticSeries::exterior(vec![C64::default(), fc.coefficient(-1)]));
            let ic = integrate_series(&fcr, c(2.0, 0.0)).unwrap();
            let ilin = iu.scale(c(a, 0.0)).add(&iv.scale(c(b, 0.0)));
            for p in -7..=1 {
                prop_assert!((ic.coefficient(p) - ilin.coefficient(p)).norm() < 1e-12);
            }
        }
    }
}
