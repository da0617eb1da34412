//! Closed-form 1-periodic test functions.
//!
//! Three families, all exactly evaluable at the rational points `k/j` the
//! trapezoidal sums visit:
//!
//! * `Indicator` — `1_{(a,b)}` with the open-interval convention
//!   `f(a) = f(b) = 0`, extended 1-periodically,
//! * `TrigPoly` — `a0 + Σ a_k cos(2πkx) + Σ b_k sin(2πkx)`,
//! * `SmoothPlateau` — a C^∞ bump that is 1 on `[a,b]` and 0 outside
//!   `(a-eps, b+eps)`, built from the standard smooth step
//!   `s(t) = ρ(t)/(ρ(t)+ρ(1-t))`, `ρ(t) = exp(-1/t)`.

use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;

/// Default maximization/integration grid for the moduli of smoothness.
pub const DEFAULT_MODULUS_GRID: usize = 1 << 14;

/// Which family a spec belongs to. The series builders and the regime
/// classifier dispatch on this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    Indicator,
    TrigPoly,
    SmoothPlateau,
}

/// A closed-form periodic test function of period 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FunctionSpec {
    /// `1_{(a,b)}` with `0 ≤ a < b ≤ 1`, endpoints excluded.
    Indicator { a: f64, b: f64 },
    /// `a0 + Σ_k cos_coeffs[k-1]·cos(2πkx) + Σ_k sin_coeffs[k-1]·sin(2πkx)`.
    TrigPoly {
        a0: f64,
        cos_coeffs: Vec<f64>,
        sin_coeffs: Vec<f64>,
    },
    /// C^∞ plateau: ≡1 on `[a,b]`, ≡0 outside `(a-eps, b+eps)`.
    SmoothPlateau { a: f64, b: f64, eps: f64 },
}

/// Smooth step ρ(t)/(ρ(t)+ρ(1-t)) with ρ(t) = exp(-1/t) for t > 0.
fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let r = (-1.0 / t).exp();
        let r1 = (-1.0 / (1.0 - t)).exp();
        r / (r + r1)
    }
}

/// Derivative of the smooth step (zero outside (0,1)).
fn smoothstep_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let r = (-1.0 / t).exp();
    let r1 = (-1.0 / (1.0 - t)).exp();
    let dr = r / (t * t);
    let dr1 = -r1 / ((1.0 - t) * (1.0 - t));
    let d = r + r1;
    (dr * r1 - r * dr1) / (d * d)
}

impl FunctionSpec {
    /// `1_{(a,b)}`: requires `0 ≤ a < b ≤ 1`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || !(0.0..1.0).contains(&a) || !(b > 0.0 && b <= 1.0) || a >= b {
            return Err(Error::InvalidFunction(format!(
                "indicator needs 0 <= a < b <= 1, got a={a}, b={b}"
            )));
        }
        Ok(Self::Indicator { a, b })
    }

    pub fn trig_poly(a0: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<Self> {
        if !a0.is_finite()
            || cos_coeffs.iter().any(|c| !c.is_finite())
            || sin_coeffs.iter().any(|c| !c.is_finite())
        {
            return Err(Error::InvalidFunction("trig coefficients must be finite".into()));
        }
        Ok(Self::TrigPoly { a0, cos_coeffs, sin_coeffs })
    }

    /// The function `cos(2πx)` — the fixed-point observable (`R_1 = 1`, all
    /// other `R_j = 0`, so `I - N∫f` counts fixed points).
    pub fn cosine() -> Self {
        Self::TrigPoly { a0: 0.0, cos_coeffs: vec![1.0], sin_coeffs: vec![] }
    }

    pub fn smooth_plateau(a: f64, b: f64, eps: f64) -> Result<Self> {
        let ok = eps > 0.0 && a - eps >= 0.0 && a > a - eps && b > a && b + eps <= 1.0;
        if !ok || !(a.is_finite() && b.is_finite() && eps.is_finite()) {
            return Err(Error::InvalidFunction(format!(
                "plateau needs 0 <= a-eps < a < b < b+eps <= 1, got a={a}, b={b}, eps={eps}"
            )));
        }
        Ok(Self::SmoothPlateau { a, b, eps })
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Indicator { .. } => Family::Indicator,
            Self::TrigPoly { .. } => Family::TrigPoly,
            Self::SmoothPlateau { .. } => Family::SmoothPlateau,
        }
    }

    /// Degree of a trigonometric polynomial (highest index with a nonzero
    /// coefficient); `None` for the other families.
    pub fn trig_degree(&self) -> Option<usize> {
        match self {
            Self::TrigPoly { cos_coeffs, sin_coeffs, .. } => {
                let dc = cos_coeffs.iter().rposition(|&c| c != 0.0).map_or(0, |i| i + 1);
                let ds = sin_coeffs.iter().rposition(|&c| c != 0.0).map_or(0, |i| i + 1);
                Some(dc.max(ds))
            }
            _ => None,
        }
    }

    /// Value of the 1-periodic extension at `x`.
    ///
    /// The indicator uses the open-interval convention: `f(a) = f(b) = 0`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let t = x - x.floor();
        match self {
            Self::Indicator { a, b } => {
                if t > *a && t < *b {
                    1.0
                } else {
                    0.0
                }
            }
            Self::TrigPoly { a0, cos_coeffs, sin_coeffs } => {
                let mut v = *a0;
                for (k, c) in cos_coeffs.iter().enumerate() {
                    if *c != 0.0 {
                        v += c * (2.0 * PI * (k + 1) as f64 * t).cos();
                    }
                }
                for (k, s) in sin_coeffs.iter().enumerate() {
                    if *s != 0.0 {
                        v += s * (2.0 * PI * (k + 1) as f64 * t).sin();
                    }
                }
                v
            }
            Self::SmoothPlateau { a, b, eps } => {
                if t >= *a && t <= *b {
                    1.0
                } else if t > a - eps && t < *a {
                    smoothstep((t - (a - eps)) / eps)
                } else if t > *b && t < b + eps {
                    smoothstep(((b + eps) - t) / eps)
                } else {
                    0.0
                }
            }
        }
    }

    /// Exact `∫₀¹ f`.
    ///
    /// Indicator → `b-a`; TrigPoly → `a0`; SmoothPlateau → adaptive
    /// quadrature of the two smooth shoulders at 1e-12 absolute tolerance.
    pub fn integral(&self) -> f64 {
        match self {
            Self::Indicator { a, b } => b - a,
            Self::TrigPoly { a0, .. } => *a0,
            Self::SmoothPlateau { a, b, eps } => {
                // plateau body is exact; each shoulder is eps * ∫₀¹ s
                let shoulder = adaptive_simpson(&smoothstep, 0.0, 1.0, 1e-13, 40);
                (b - a) + 2.0 * eps * shoulder
            }
        }
    }

    /// Derivative of the 1-periodic extension; errors for the indicator.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let t = x - x.floor();
        match self {
            Self::Indicator { .. } => Err(Error::UnsupportedFunction {
                op: "derivative",
                reason: "indicator has no derivative".into(),
            }),
            Self::TrigPoly { cos_coeffs, sin_coeffs, .. } => {
                let mut v = 0.0;
                for (k, c) in cos_coeffs.iter().enumerate() {
                    let w = 2.0 * PI * (k + 1) as f64;
                    v -= c * w * (w * t).sin();
                }
                for (k, s) in sin_coeffs.iter().enumerate() {
                    let w = 2.0 * PI * (k + 1) as f64;
                    v += s * w * (w * t).cos();
                }
                Ok(v)
            }
            Self::SmoothPlateau { a, b, eps } => {
                let v = if t > a - eps && t < *a {
                    smoothstep_deriv((t - (a - eps)) / eps) / eps
                } else if t > *b && t < b + eps {
                    -smoothstep_deriv(((b + eps) - t) / eps) / eps
                } else {
                    0.0
                };
                Ok(v)
            }
        }
    }

    /// Cosine coefficients `a_1..a_n_max` of the Fourier expansion.
    ///
    /// Exact for `TrigPoly` (zero beyond the degree) and `Indicator`
    /// (`a_n = (sin(2πnb) - sin(2πna))/(πn)`); spectrally accurate periodic
    /// quadrature for `SmoothPlateau`.
    pub fn fourier_cos_coeffs(&self, n_max: usize) -> Vec<f64> {
        assert!(n_max >= 1, "n_max must be >= 1");
        match self {
            Self::TrigPoly { cos_coeffs, .. } => {
                let mut v = vec![0.0; n_max];
                for (k, c) in cos_coeffs.iter().enumerate().take(n_max) {
                    v[k] = *c;
                }
                v
            }
            Self::Indicator { a, b } => (1..=n_max)
                .map(|n| {
                    let w = 2.0 * PI * n as f64;
                    ((w * b).sin() - (w * a).sin()) / (PI * n as f64)
                })
                .collect(),
            Self::SmoothPlateau { .. } => {
                // Periodic trapezoid rule is spectrally accurate for C^∞
                // periodic integrands; oversample far beyond n_max to keep
                // aliasing negligible.
                let m = (8 * n_max).max(4096);
                let vals: Vec<f64> = (0..m).map(|k| self.evaluate(k as f64 / m as f64)).collect();
                (1..=n_max)
                    .map(|n| {
                        let mut acc = crate::KahanSum::new();
                        for (k, v) in vals.iter().enumerate() {
                            acc.add(v * (2.0 * PI * (n * k % m) as f64 / m as f64).cos());
                        }
                        2.0 * acc.value() / m as f64
                    })
                    .collect()
            }
        }
    }

    /// Numeric modulus of smoothness (diagnostics only; grid estimate).
    pub fn modulus_of_smoothness(&self, order: ModulusOrder, delta: f64) -> Result<f64> {
        self.modulus_of_smoothness_with_grid(order, delta, DEFAULT_MODULUS_GRID)
    }

    /// As [`Self::modulus_of_smoothness`] with an explicit grid size.
    pub fn modulus_of_smoothness_with_grid(
        &self,
        order: ModulusOrder,
        delta: f64,
        grid: usize,
    ) -> Result<f64> {
        assert!(delta > 0.0, "delta must be positive");
        assert!(grid >= 8);
        const H_STEPS: usize = 16;
        match order {
            ModulusOrder::SecondDifference => {
                let mut sup: f64 = 0.0;
                for hi in 1..=H_STEPS {
                    let h = delta * hi as f64 / H_STEPS as f64;
                    for k in 0..grid {
                        let x = k as f64 / grid as f64;
                        let d = self.evaluate(x + 2.0 * h) - 2.0 * self.evaluate(x + h)
                            + self.evaluate(x);
                        sup = sup.max(d.abs());
                    }
                }
                Ok(sup)
            }
            ModulusOrder::FirstDerivative => {
                let mut sup: f64 = 0.0;
                for hi in 1..=H_STEPS {
                    let h = delta * hi as f64 / H_STEPS as f64;
                    for k in 0..grid {
                        let x = k as f64 / grid as f64;
                        let d = self.derivative(x + h)? - self.derivative(x)?;
                        sup = sup.max(d.abs());
                    }
                }
                Ok(sup)
            }
            ModulusOrder::LpDerivative(p) => {
                if !(p >= 1.0) {
                    return Err(Error::UnsupportedFunction {
                        op: "modulus_of_smoothness",
                        reason: format!("L^p modulus needs p >= 1, got {p}"),
                    });
                }
                let mut sup: f64 = 0.0;
                for hi in 1..=H_STEPS {
                    let h = delta * hi as f64 / H_STEPS as f64;
                    let mut acc = crate::KahanSum::new();
                    for k in 0..grid {
                        let x = k as f64 / grid as f64;
                        let d = (self.derivative(x + h)? - self.derivative(x)?).abs();
                        acc.add(d.powf(p));
                    }
                    sup = sup.max((acc.value() / grid as f64).powf(1.0 / p));
                }
                Ok(sup)
            }
        }
    }

    /// Parse the CLI/config text syntax, e.g. `indicator:a=0,b=0.5`,
    /// `trig:a0=0;cos=1,0,0.25;sin=0`, `plateau:a=0.2,b=0.4,eps=0.1`.
    pub fn parse(input: &str) -> Result<Self> {
        parse_function_spec(input)
    }
}

/// Which modulus of smoothness to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ModulusOrder {
    /// ω(f', δ): modulus of continuity of the derivative.
    FirstDerivative,
    /// ω₂(f, δ): second-difference modulus `sup |f(x+2h)-2f(x+h)+f(x)|`.
    SecondDifference,
    /// ω^(p)(f', δ): L^p modulus of continuity of the derivative.
    LpDerivative(f64),
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
                + rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = simpson(a, fa, b, fb, fm);
    rec(f, a, fa, b, fb, m, fm, whole, tol, depth)
}

// ---------------------------------------------------------------------------
// Text syntax
// ---------------------------------------------------------------------------

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn err(&self, expected: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, expected: expected.into() }
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn key(&mut self, name: &str) -> Result<()> {
        if self.eat(name) && self.eat("=") {
            Ok(())
        } else {
            Err(self.err(format!("`{name}=<real>`")))
        }
    }

    fn real(&mut self) -> Result<f64> {
        let rest = self.rest();
        let end = rest
            .char_indices()
            .find(|(_, c)| *c == ',' || *c == ';')
            .map_or(rest.len(), |(i, _)| i);
        let tok = &rest[..end];
        match tok.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos += end;
                Ok(v)
            }
            _ => Err(self.err("a finite real number")),
        }
    }

    fn real_list(&mut self) -> Result<Vec<f64>> {
        let mut out = vec![self.real()?];
        while self.rest().starts_with(',') {
            self.pos += 1;
            out.push(self.real()?);
        }
        Ok(out)
    }

    fn done(&self) -> Result<()> {
        if self.rest().is_empty() {
            Ok(())
        } else {
            Err(self.err("end of input"))
        }
    }
}

fn parse_function_spec(input: &str) -> Result<FunctionSpec> {
    let mut c = Cursor { s: input, pos: 0 };
    if c.eat("indicator:") {
        c.key("a")?;
        let a = c.real()?;
        if !c.eat(",") {
            return Err(c.err("`,b=<real>`"));
        }
        c.key("b")?;
        let b = c.real()?;
        c.done()?;
        FunctionSpec::indicator(a, b)
    } else if c.eat("plateau:") {
        c.key("a")?;
        let a = c.real()?;
        if !c.eat(",") {
            return Err(c.err("`,b=<real>`"));
        }
        c.key("b")?;
        let b = c.real()?;
        if !c.eat(",") {
            return Err(c.err("`,eps=<real>`"));
        }
        c.key("eps")?;
        let eps = c.real()?;
        c.done()?;
        FunctionSpec::smooth_plateau(a, b, eps)
    } else if c.eat("trig:") {
        let mut a0 = 0.0;
        let mut cos = Vec::new();
        let mut sin = Vec::new();
        let mut seen = (false, false, false);
        loop {
            if c.rest().starts_with("a0=") {
                if seen.0 {
                    return Err(c.err("each of a0/cos/sin at most once"));
                }
                c.pos += 3;
                a0 = c.real()?;
                seen.0 = true;
            } else if c.rest().starts_with("cos=") {
                if seen.1 {
                    return Err(c.err("each of a0/cos/sin at most once"));
                }
                c.pos += 4;
                cos = c.real_list()?;
                seen.1 = true;
            } else if c.rest().starts_with("sin=") {
                if seen.2 {
                    return Err(c.err("each of a0/cos/sin at most once"));
                }
                c.pos += 4;
                sin = c.real_list()?;
                seen.2 = true;
            } else {
                return Err(c.err("`a0=`, `cos=` or `sin=`"));
            }
            if c.rest().is_empty() {
                break;
            }
            if !c.eat(";") {
                return Err(c.err("`;` between trig fields"));
            }
        }
        if !(seen.0 || seen.1 || seen.2) {
            return Err(c.err("at least one of a0/cos/sin"));
        }
        FunctionSpec::trig_poly(a0, cos, sin)
    } else {
        Err(c.err("`indicator:`, `trig:` or `plateau:`"))
    }
}

impl fmt::Display for FunctionSpec {
    /// Canonical text form; parses back to an identical spec.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(xs: &[f64]) -> String {
            xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
        }
        match self {
            Self::Indicator { a, b } => write!(f, "indicator:a={a},b={b}"),
            Self::TrigPoly { a0, cos_coeffs, sin_coeffs } => {
                write!(f, "trig:a0={a0}")?;
                if !cos_coeffs.is_empty() {
                    write!(f, ";cos={}", list(cos_coeffs))?;
                }
                if !sin_coeffs.is_empty() {
                    write!(f, ";sin={}", list(sin_coeffs))?;
                }
                Ok(())
            }
            Self::SmoothPlateau { a, b, eps } => write!(f, "plateau:a={a},b={b},eps={eps}"),
        }
    }
}
