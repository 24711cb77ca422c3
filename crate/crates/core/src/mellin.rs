//! Mellin machinery: numeric transforms of test functions, the closed-form
//! multipliers of every operator, and inverse-Mellin synthesis on a
//! truncated contour.
//!
//! The multipliers realize the transform identities
//!   M{K_u f; s}  = Γ(ζ+s)/Γ(α+ζ+s) · f*(s)
//!   M{I_u f; s}  = Γ(ζ+1−s)/Γ(α+ζ+1−s) · f*(s)
//! and their hypergeometric generalizations, where the factor picks up a
//! p+1Fq+1 with the transform variable in its parameter list. The
//! generalized multipliers are normalized by the same constant as the
//! operator itself and always carry the f*(s) factor; both follow from the
//! kernel-moment identity multiplier(s) = E(x₁^{s−1}) (product side) or
//! E(x₁^{1−s}) (ratio side), which the route-equivalence checks validate
//! against direct quadrature.

use crate::density::{HyperDensityParams, TestFunction};
use crate::error::{Error, Result};
use crate::operator::{self, KoberParams};
use crate::quad::{self, Tol};
use crate::special;
use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

/// Convergence strip lower < Re(s) < upper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinStrip {
    pub lower: f64,
    pub upper: f64,
}

impl MellinStrip {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower < upper) {
            return Err(Error::domain(format!("empty Mellin strip ({lower}, {upper})")));
        }
        Ok(MellinStrip { lower, upper })
    }

    pub fn contains(&self, re_s: f64) -> bool {
        re_s > self.lower && re_s < self.upper
    }

    pub fn check(&self, s: Complex64) -> Result<()> {
        if self.contains(s.re) {
            Ok(())
        } else {
            Err(Error::Strip { re_s: s.re, lower: self.lower, upper: self.upper })
        }
    }

    fn intersect(&self, other: (f64, f64)) -> Result<Self> {
        MellinStrip::new(self.lower.max(other.0), self.upper.min(other.1))
    }

    /// Default contour abscissa: the strip midpoint, nudged inside when one
    /// side is unbounded.
    pub fn abscissa(&self) -> f64 {
        match (self.lower.is_finite(), self.upper.is_finite()) {
            (true, true) => 0.5 * (self.lower + self.upper),
            (true, false) => self.lower + 1.0,
            (false, true) => self.upper - 1.0,
            (false, false) => 1.0,
        }
    }
}

/// Which operator's Mellin multiplier to evaluate, with its parameters.
/// The hypergeometric variants carry the argument mode inside the params.
#[derive(Debug, Clone)]
pub enum MultiplierSpec {
    Kober2(KoberParams),
    Kober1(KoberParams),
    /// Generalized second kind; covers the a·x and a(1−x) argument modes.
    HyperSecond(HyperDensityParams),
    /// Generalized first kind.
    HyperFirst(HyperDensityParams),
    /// Left-sided Riemann–Liouville integral; pairs with f*(α+s).
    RlLeft { alpha: f64 },
    /// Right-sided Weyl integral as a product convolution; pairs with f*(α+s).
    WeylProduct { alpha: f64 },
    /// Generic ratio convolution against a fixed f₁: factor is f₁*(2−s).
    RatioGeneric(Arc<TestFunction>),
}

/// A multiplier value: the factor and the shift applied to the f* argument
/// (M{g; s} = factor · f*(s + shift)).
#[derive(Debug, Clone, Copy)]
pub struct MultiplierValue {
    pub factor: Complex64,
    pub fstar_shift: f64,
}

fn gamma_quot(a: Complex64, b: Complex64) -> Result<Complex64> {
    Ok((special::log_gamma(a)? - special::log_gamma(b)?).exp())
}

/// Strip of the multiplier itself (before intersecting with f*'s strip).
pub fn multiplier_strip(spec: &MultiplierSpec) -> Result<MellinStrip> {
    match spec {
        MultiplierSpec::Kober2(p) => MellinStrip::new(-p.zeta, f64::INFINITY),
        MultiplierSpec::Kober1(p) => MellinStrip::new(f64::NEG_INFINITY, p.zeta + 1.0),
        MultiplierSpec::HyperSecond(hd) => {
            MellinStrip::new(1.0 - hd.beta_lambda(), f64::INFINITY)
        }
        MultiplierSpec::HyperFirst(hd) => {
            // the moment is evaluated at 2−s and needs Re(2−s) > 1−λ
            MellinStrip::new(f64::NEG_INFINITY, 1.0 + hd.beta_lambda())
        }
        MultiplierSpec::RlLeft { alpha } => MellinStrip::new(f64::NEG_INFINITY, 1.0 - alpha),
        MultiplierSpec::WeylProduct { .. } => MellinStrip::new(0.0, f64::INFINITY),
        MultiplierSpec::RatioGeneric(f1) => {
            let (lo, hi) = f1.mellin.as_ref().map(|m| m.strip).unwrap_or(f1.mellin_strip());
            MellinStrip::new(2.0 - hi, 2.0 - lo)
        }
    }
}

/// Strip of the full identity M{g;s} = factor · f*(s+shift): the multiplier
/// strip intersected with f*'s strip shifted back.
pub fn identity_strip(spec: &MultiplierSpec, f: &TestFunction) -> Result<MellinStrip> {
    let ms = multiplier_strip(spec)?;
    let shift = fstar_shift(spec);
    let (flo, fhi) = f.mellin.as_ref().map(|m| m.strip).unwrap_or(f.mellin_strip());
    ms.intersect((flo - shift, fhi - shift))
}

fn fstar_shift(spec: &MultiplierSpec) -> f64 {
    match spec {
        MultiplierSpec::RlLeft { alpha } | MultiplierSpec::WeylProduct { alpha } => *alpha,
        _ => 0.0,
    }
}

/// The closed-form factor multiplying f*(s + shift).
pub fn multiplier(spec: &MultiplierSpec, s: Complex64) -> Result<MultiplierValue> {
    multiplier_strip(spec)?.check(s)?;
    let factor = match spec {
        MultiplierSpec::Kober2(p) => gamma_quot(s + p.zeta, s + (p.zeta + p.alpha))?,
        MultiplierSpec::Kober1(p) => {
            let w = Complex64::new(p.zeta + 1.0, 0.0) - s;
            gamma_quot(w, w + p.alpha)?
        }
        // kernel moment E(x₁^{s−1}): (Γ(α)/C) Γ(ζ+s)/Γ(α+ζ+s) · p+1Fq+1(…)
        MultiplierSpec::HyperSecond(hd) => hd.mellin_moment(s)?,
        // ratio side: E(x₁^{1−s}) = moment at 2−s, giving the ζ+1−s gammas
        MultiplierSpec::HyperFirst(hd) => hd.mellin_moment(Complex64::new(2.0, 0.0) - s)?,
        MultiplierSpec::RlLeft { alpha } => {
            let one = Complex64::new(1.0, 0.0);
            gamma_quot(one - alpha - s, one - s)?
        }
        MultiplierSpec::WeylProduct { alpha } => gamma_quot(s, s + *alpha)?,
        MultiplierSpec::RatioGeneric(f1) => {
            let arg = Complex64::new(2.0, 0.0) - s;
            match &f1.mellin {
                Some(m) => (m.f)(arg),
                None => f1.mellin_numeric_raw(arg, Tol { abs: 1e-10, rel: 1e-10 })?,
            }
        }
    };
    Ok(MultiplierValue { factor, fstar_shift: fstar_shift(spec) })
}

/// Numeric Mellin transform ∫₀^∞ x^{s−1} f(x) dx with strip checking.
pub fn mellin_numeric(f: &TestFunction, s: Complex64, tol: Tol) -> Result<Complex64> {
    let (lo, hi) = f.mellin_strip();
    if !(s.re > lo && s.re < hi) {
        return Err(Error::Strip { re_s: s.re, lower: lo, upper: hi });
    }
    f.mellin_numeric_raw(s, tol)
}

/// f*(s) through the closed form when the function carries one (and s lies
/// in its validity strip), numerically otherwise.
pub fn fstar(f: &TestFunction, s: Complex64, tol: Tol) -> Result<Complex64> {
    if let Some(m) = &f.mellin {
        if s.re > m.strip.0 && s.re < m.strip.1 {
            return Ok((m.f)(s));
        }
    }
    mellin_numeric(f, s, tol)
}

/// The operator output u ↦ g(u) behind a multiplier spec, wrapped as a test
/// function whose metadata encodes the transform strip.
pub fn operator_output(
    spec: &MultiplierSpec,
    f: Arc<TestFunction>,
    f2: Option<Arc<TestFunction>>,
    tol: Tol,
) -> Result<TestFunction> {
    use crate::density::{Decay, Support};
    let strip = identity_strip(spec, &f)?;
    let spec = spec.clone();
    let name = format!("op-output[{}]", f.name);
    let eval = move |u: f64| -> f64 {
        let r = match &spec {
            MultiplierSpec::Kober2(p) => operator::kober_second(&f, *p, u, tol),
            MultiplierSpec::Kober1(p) => operator::kober_first(&f, *p, u, tol),
            MultiplierSpec::HyperSecond(hd) => operator::hyper_second(&f, hd, u, tol),
            MultiplierSpec::HyperFirst(hd) => operator::hyper_first(&f, hd, u, tol),
            MultiplierSpec::RlLeft { alpha } => operator::rl_left(&f, *alpha, u, tol),
            MultiplierSpec::WeylProduct { alpha } => operator::weyl_right(&f, *alpha, u, tol),
            MultiplierSpec::RatioGeneric(f1) => {
                let f2 = f2.as_ref().expect("ratio spec needs f2");
                operator::ratio_density(f1, f2, u, tol)
            }
        };
        r.map(|v| v.value).unwrap_or(f64::NAN)
    };
    let decay =
        if strip.upper.is_finite() { Decay::Power(strip.upper) } else { Decay::Exponential };
    let lo_exp = if strip.lower.is_finite() { -strip.lower } else { 0.0 };
    Ok(TestFunction::new(name, eval, Support::new(0.0, f64::INFINITY), decay)
        .with_exponents(lo_exp, 0.0))
}

/// One probe of a multiplier identity check.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeCheck {
    pub s_re: f64,
    pub s_im: f64,
    pub direct_re: f64,
    pub direct_im: f64,
    pub multiplier_re: f64,
    pub multiplier_im: f64,
    pub rel_err: f64,
}

/// Report of [`verify_multiplier`].
#[derive(Debug, Clone, Serialize)]
pub struct MultiplierReport {
    pub operator: String,
    pub function: String,
    pub probes: Vec<ProbeCheck>,
    pub max_rel_err: f64,
}

/// Compares M{g(·); s} computed numerically from the operator output against
/// multiplier(s) · f*(s + shift) at each probe point.
pub fn verify_multiplier(
    spec: &MultiplierSpec,
    f: Arc<TestFunction>,
    f2: Option<Arc<TestFunction>>,
    probes: &[Complex64],
    tol: Tol,
) -> Result<MultiplierReport> {
    let strip = identity_strip(spec, &f)?;
    for s in probes {
        strip.check(*s)?;
    }
    let fstar_src: Arc<TestFunction> = match spec {
        MultiplierSpec::RatioGeneric(_) => {
            f2.clone().ok_or_else(|| Error::validation("ratio spec needs f2".to_string()))?
        }
        _ => f.clone(),
    };
    // Inner operator evaluations run a decade tighter than the outer Mellin
    // quadrature so the outer refinement never stalls on inner noise.
    let inner = tol.tighter(0.1);
    let outer = Tol { abs: (tol.abs * 100.0).max(1e-9), rel: (tol.rel * 100.0).max(1e-9) };
    let g = operator_output(spec, f.clone(), f2, inner)?;
    let mut checks = Vec::new();
    let mut max_rel: f64 = 0.0;
    for &s in probes {
        let mv = multiplier(spec, s)?;
        let rhs = mv.factor * fstar(&fstar_src, s + mv.fstar_shift, tol)?;
        let lhs = g.mellin_numeric_raw(s, outer)?;
        let rel = (lhs - rhs).norm() / rhs.norm().max(1e-300);
        max_rel = max_rel.max(rel);
        checks.push(ProbeCheck {
            s_re: s.re,
            s_im: s.im,
            direct_re: lhs.re,
            direct_im: lhs.im,
            multiplier_re: rhs.re,
            multiplier_im: rhs.im,
            rel_err: rel,
        });
    }
    Ok(MultiplierReport {
        operator: spec_label(spec),
        function: fstar_src.name.clone(),
        probes: checks,
        max_rel_err: max_rel,
    })
}

fn spec_label(spec: &MultiplierSpec) -> String {
    match spec {
        MultiplierSpec::Kober2(p) => format!("kober2(zeta={},alpha={})", p.zeta, p.alpha),
        MultiplierSpec::Kober1(p) => format!("kober1(zeta={},alpha={})", p.zeta, p.alpha),
        MultiplierSpec::HyperSecond(hd) => {
            format!("hyper2(zeta={},alpha={},mode={:?})", hd.zeta, hd.alpha, hd.hyper.mode)
        }
        MultiplierSpec::HyperFirst(hd) => {
            format!("hyper1(zeta={},alpha={},mode={:?})", hd.zeta, hd.alpha, hd.hyper.mode)
        }
        MultiplierSpec::RlLeft { alpha } => format!("rl(alpha={alpha})"),
        MultiplierSpec::WeylProduct { alpha } => format!("weyl(alpha={alpha})"),
        MultiplierSpec::RatioGeneric(f1) => format!("ratio(f1={})", f1.name),
    }
}

/// Options of the truncated-contour inverse Mellin transform.
#[derive(Debug, Clone, Copy)]
pub struct InverseMellinOpts {
    /// Contour half-length grows until a panel pair contributes less than
    /// `tail_tol` (relative); truncation error past `h_max`.
    pub h_max: f64,
    pub tail_tol: f64,
}

impl Default for InverseMellinOpts {
    fn default() -> Self {
        InverseMellinOpts { h_max: 400.0, tail_tol: 1e-8 }
    }
}

/// (1/2π) ∫_{c−iH}^{c+iH} F*(s) u^{−s} ds on a truncated contour, with H
/// grown outward until the integrand has died off.
///
/// Transforms with only algebraic decay along the contour (beta-type
/// kernels) converge too slowly for plain truncation, so once the envelope
/// is in its asymptotic regime the remaining tail is added from the
/// integration-by-parts expansion e^{−iLH}[G/(iL) + G'/(iL)²] and its
/// conjugate, valid for the real-type transforms produced here.
pub fn inverse_mellin<F>(fstar: F, c: f64, u: f64, opts: InverseMellinOpts) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(u > 0.0) {
        return Err(Error::domain(format!("u must be > 0, got {u}")));
    }
    let ln_u = u.ln();
    let integrand = |y: f64| -> Result<Complex64> {
        let s = Complex64::new(c, y);
        let v = fstar(s)?;
        Ok(v * (-(s * ln_u)).exp())
    };
    // envelope without the e^{−iyL} oscillation
    let envelope =
        |y: f64| -> Result<Complex64> { Ok(fstar(Complex64::new(c, y))? * (-c * ln_u).exp()) };
    // decay precheck: a transform that does not fall off along the contour
    // cannot be inverted by truncation
    let probe_near = envelope(5.0)?.norm().max(envelope(10.0)?.norm());
    let probe_far = envelope(40.0)?.norm();
    if !(probe_far < 0.9 * probe_near.max(1e-300)) {
        return Err(Error::Truncation { h_max: opts.h_max, tail: probe_far });
    }
    // Full oscillation period per panel where the phase turns; plain short
    // panels otherwise.
    let width = if ln_u.abs() > 0.4 {
        std::f64::consts::TAU / ln_u.abs()
    } else {
        2.0 / (1.0 + ln_u.abs())
    };
    // Panels are subdivided adaptively: near y = 0 the transform can vary
    // sharply (poles just off the contour).
    let panel_tol = Tol { abs: 0.1 * opts.tail_tol, rel: 0.1 * opts.tail_tol };
    let panel = |a: f64, b: f64| -> Result<Complex64> {
        let cell = std::cell::Cell::new(None::<Error>);
        let r = quad::adaptive_gk(
            |t| match integrand(t) {
                Ok(v) => v,
                Err(e) => {
                    cell.set(Some(e));
                    Complex64::new(0.0, 0.0)
                }
            },
            a,
            b,
            panel_tol,
        )?;
        match cell.take() {
            Some(e) => Err(e),
            None => Ok(r.value),
        }
    };
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut total = Complex64::new(0.0, 0.0);
    let mut y = 0.0f64;
    let mut small_streak = 0;
    let mut last_pair = f64::INFINITY;
    let mut prev_env = f64::INFINITY;
    while y < opts.h_max {
        let y1 = y + width;
        let pair = panel(y, y1)? + panel(-y1, -y)?;
        total += pair;
        last_pair = pair.norm();
        if last_pair < opts.tail_tol * total.norm().max(1e-30) {
            small_streak += 1;
            // three consecutive quiet pairs rule out pausing at an
            // oscillation node
            if small_streak >= 3 {
                return Ok(total.re / two_pi);
            }
        } else {
            small_streak = 0;
        }
        // Asymptotic tail (integration by parts in the envelope) once the
        // envelope decays and the phase is active.
        if y1 >= 10.0 && ln_u.abs() >= 0.05 {
            let g0 = envelope(y1)?;
            let env_norm = g0.norm();
            if env_norm < prev_env {
                let h = width / 16.0;
                let gm = envelope(y1 - h)?;
                let gp1 = envelope(y1 + h)?;
                let gp = (gp1 - gm) / (2.0 * h);
                let gpp = (gp1 - 2.0 * g0 + gm) / (h * h);
                let il = Complex64::new(0.0, ln_u);
                let il2 = il * il;
                let phase = Complex64::new(0.0, -ln_u * y1).exp();
                let t_plus = phase * (g0 / il + gp / il2 + gpp / (il2 * il));
                let third = (gpp / (il2 * il)).norm();
                if third <= opts.tail_tol * total.norm().max(1.0) {
                    let tail = 2.0 * t_plus.re;
                    return Ok((total.re + tail) / two_pi);
                }
            }
            prev_env = env_norm;
        }
        y = y1;
    }
    Err(Error::Truncation { h_max: opts.h_max, tail: last_pair })
}
