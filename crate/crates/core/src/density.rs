//! Kernel densities and test functions.
//!
//! Three kernel families drive the operators: the type-1 beta density, the
//! pathway family (bounded support for q < 1, heavy tails for q > 1, and the
//! exponential-kernel limit at q = 1), and beta densities with an appended
//! hypergeometric series. All of them, plus a handful of standard test
//! densities, are wrapped as [`TestFunction`] values carrying support, decay
//! and endpoint metadata, an optional closed-form Mellin transform, and a
//! lazily built inverse-CDF sampler.

use crate::error::{Error, Result};
use crate::quad::{self, Tol};
use crate::special::{self, gamma_ratio, ln_gamma, pfq, pfq_complex, pochhammer};
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::sync::{Arc, OnceLock};

/// Which of the two operator conventions a kernel belongs to. The second
/// kind pairs with products u = x₁x₂, the first kind with ratios u = x₂/x₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    First,
    Second,
}

// ---------------------------------------------------------------------------
// Type-1 beta
// ---------------------------------------------------------------------------

/// Shape pair (λ, α) of a type-1 beta density x^{λ−1}(1−x)^{α−1} on (0,1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta1Params {
    pub lambda: f64,
    pub alpha: f64,
}

impl Beta1Params {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        if !(lambda > 0.0) || !(alpha > 0.0) {
            return Err(Error::domain(format!(
                "beta shapes must be positive, got ({lambda}, {alpha})"
            )));
        }
        Ok(Beta1Params { lambda, alpha })
    }

    /// Kernel of the second-kind Kober operator: shapes (ζ+1, α).
    ///
    /// The two operator kinds index the same beta family with an off-by-one
    /// shift in the first shape; these constructors keep that shift in one
    /// place.
    pub fn kober_second_kernel(zeta: f64, alpha: f64) -> Result<Self> {
        if !(zeta > -1.0) {
            return Err(Error::domain(format!("second kind needs zeta > -1, got {zeta}")));
        }
        Beta1Params::new(zeta + 1.0, alpha)
    }

    /// Kernel of the first-kind Kober operator: shapes (ζ, α).
    pub fn kober_first_kernel(zeta: f64, alpha: f64) -> Result<Self> {
        if !(zeta > 0.0) {
            return Err(Error::domain(format!("first kind needs zeta > 0, got {zeta}")));
        }
        Beta1Params::new(zeta, alpha)
    }

    /// Γ(λ+α) / (Γ(λ)Γ(α)).
    pub fn norm_const(&self) -> f64 {
        gamma_ratio(&[self.lambda + self.alpha], &[self.lambda, self.alpha])
            .expect("positive shapes")
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        self.norm_const() * x.powf(self.lambda - 1.0) * (1.0 - x).powf(self.alpha - 1.0)
    }

    /// E(x^{s−1}) = Γ(λ+α)Γ(λ+s−1) / (Γ(λ)Γ(λ+α+s−1)), Re(s) > 1−λ.
    pub fn mellin_moment(&self, s: Complex64) -> Result<Complex64> {
        let l = self.lambda;
        let a = self.alpha;
        if s.re <= 1.0 - l {
            return Err(Error::Strip { re_s: s.re, lower: 1.0 - l, upper: f64::INFINITY });
        }
        let num = special::log_gamma(Complex64::new(l + a, 0.0))?
            + special::log_gamma(s + (l - 1.0))?;
        let den = special::log_gamma(Complex64::new(l, 0.0))?
            + special::log_gamma(s + (l + a - 1.0))?;
        Ok((num - den).exp())
    }
}

/// Free-function form of the type-1 beta pdf.
pub fn beta1_pdf(p: Beta1Params, x: f64) -> f64 {
    p.pdf(x)
}

// ---------------------------------------------------------------------------
// Pathway family
// ---------------------------------------------------------------------------

/// Regime of the pathway parameter q, derived from its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathwayRegime {
    /// q < 1: bounded support (0, [a(1−q)]^{−1/δ}).
    Less,
    /// q > 1: heavy-tailed on (0, ∞).
    Greater,
    /// q = 1: exponential kernel x^γ e^{−aηx^δ}.
    Limit,
}

/// Parameters (γ, δ, η, a, q) of the pathway kernel family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathwayParams {
    pub gamma: f64,
    pub delta: f64,
    pub eta: f64,
    pub a: f64,
    pub q: f64,
}

impl PathwayParams {
    /// η = 0 is admitted for q < 1 (the kernel degenerates to a plain power;
    /// the Kober reduction with α = 1 needs it); the other regimes require
    /// η > 0 and reject it in [`validate`](Self::validate).
    pub fn new(gamma: f64, delta: f64, eta: f64, a: f64, q: f64) -> Result<Self> {
        if !(delta > 0.0) || !(eta >= 0.0) || !(a > 0.0) {
            return Err(Error::domain(format!(
                "pathway needs delta, a > 0 and eta >= 0, got ({delta}, {eta}, {a})"
            )));
        }
        if !q.is_finite() || !gamma.is_finite() {
            return Err(Error::domain("pathway parameters must be finite".to_string()));
        }
        Ok(PathwayParams { gamma, delta, eta, a, q })
    }

    pub fn regime(&self) -> PathwayRegime {
        if self.q < 1.0 {
            PathwayRegime::Less
        } else if self.q > 1.0 {
            PathwayRegime::Greater
        } else {
            PathwayRegime::Limit
        }
    }

    /// Leading power of x: γ for the second-kind form, γ−1 for the first.
    pub fn exponent(&self, kind: OperatorKind) -> f64 {
        match kind {
            OperatorKind::Second => self.gamma,
            OperatorKind::First => self.gamma - 1.0,
        }
    }

    /// (exponent + 1)/δ — the shape entering every normalizing constant.
    fn sigma(&self, kind: OperatorKind) -> f64 {
        (self.exponent(kind) + 1.0) / self.delta
    }

    /// Checks positivity/normalizability for the given kind and regime.
    pub fn validate(&self, kind: OperatorKind) -> Result<()> {
        if self.regime() != PathwayRegime::Less && !(self.eta > 0.0) {
            return Err(Error::domain(format!(
                "pathway regime q = {} needs eta > 0, got {}",
                self.q, self.eta
            )));
        }
        let sigma = self.sigma(kind);
        if !(sigma > 0.0) {
            return Err(Error::domain(format!(
                "pathway kernel needs ({} + 1)/delta > 0, got {sigma}",
                match kind {
                    OperatorKind::Second => "gamma",
                    OperatorKind::First => "gamma - 1",
                }
            )));
        }
        if self.regime() == PathwayRegime::Greater {
            let beta = self.eta / (self.q - 1.0);
            if !(beta - sigma > 0.0) {
                return Err(Error::domain(format!(
                    "normalizability eta/(q-1) - sigma > 0 fails: {beta} - {sigma}"
                )));
            }
        }
        Ok(())
    }

    /// Upper support endpoint: [a(1−q)]^{−1/δ} for q < 1, ∞ otherwise.
    pub fn support_upper(&self) -> f64 {
        match self.regime() {
            PathwayRegime::Less => (self.a * (1.0 - self.q)).powf(-1.0 / self.delta),
            _ => f64::INFINITY,
        }
    }

    /// Normalizing constant of the regime, in log space.
    fn ln_norm_const(&self, kind: OperatorKind) -> Result<f64> {
        let sigma = self.sigma(kind);
        self.validate(kind)?;
        let ln = match self.regime() {
            PathwayRegime::Less => {
                let b = self.eta / (1.0 - self.q);
                self.delta.ln() + sigma * (self.a * (1.0 - self.q)).ln()
                    + special::ln_gamma_diff(b + 1.0, sigma)?
                    - ln_gamma(sigma)?
            }
            PathwayRegime::Greater => {
                let b = self.eta / (self.q - 1.0);
                self.delta.ln() + sigma * (self.a * (self.q - 1.0)).ln()
                    + special::ln_gamma_diff(b - sigma, sigma)?
                    - ln_gamma(sigma)?
            }
            PathwayRegime::Limit => {
                self.delta.ln() + sigma * (self.a * self.eta).ln() - ln_gamma(sigma)?
            }
        };
        Ok(ln)
    }

    /// Regime constant together with its q → 1 limit value
    /// c* = δ(aη)^σ / Γ(σ).
    pub fn norm_consts(&self, kind: OperatorKind) -> Result<(f64, f64)> {
        let c = self.ln_norm_const(kind)?.exp();
        let sigma = self.sigma(kind);
        let c_star =
            (self.delta.ln() + sigma * (self.a * self.eta).ln() - ln_gamma(sigma)?).exp();
        Ok((c, c_star))
    }

    /// Pathway pdf for the given kind; zero outside the support.
    pub fn pdf(&self, kind: OperatorKind, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let e = self.exponent(kind);
        let ln_c = match self.ln_norm_const(kind) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        let ln_body = match self.regime() {
            PathwayRegime::Less => {
                let t = self.a * (1.0 - self.q) * x.powf(self.delta);
                if t >= 1.0 {
                    return 0.0;
                }
                // (1−t)^{η/(1−q)} via ln1p keeps the q → 1 limit smooth.
                e * x.ln() + self.eta / (1.0 - self.q) * (-t).ln_1p()
            }
            PathwayRegime::Greater => {
                let t = self.a * (self.q - 1.0) * x.powf(self.delta);
                e * x.ln() - self.eta / (self.q - 1.0) * t.ln_1p()
            }
            PathwayRegime::Limit => e * x.ln() - self.a * self.eta * x.powf(self.delta),
        };
        (ln_c + ln_body).exp()
    }

    /// E(x^{s−1}) in closed form (beta/gamma integrals per regime).
    pub fn mellin_moment(&self, kind: OperatorKind, s: Complex64) -> Result<Complex64> {
        let e = self.exponent(kind);
        let strip_lo = -e;
        if s.re <= strip_lo {
            return Err(Error::Strip { re_s: s.re, lower: strip_lo, upper: f64::INFINITY });
        }
        let ln_c = self.ln_norm_const(kind)?;
        let z = (s + e) / self.delta; // (e + s)/δ, the −1 of x^{s−1} absorbed
        match self.regime() {
            PathwayRegime::Less => {
                let b = self.eta / (1.0 - self.q);
                let u = self.support_upper();
                // c · U^{e+s} (1/δ) B(z, b+1)
                let ln_beta = special::log_gamma(z)?
                    + special::log_gamma(Complex64::new(b + 1.0, 0.0))?
                    - special::log_gamma(z + (b + 1.0))?;
                Ok(((s + e) * u.ln() + ln_beta + ln_c - self.delta.ln()).exp())
            }
            PathwayRegime::Greater => {
                let b = self.eta / (self.q - 1.0);
                if b - z.re <= 0.0 {
                    return Err(Error::Strip {
                        re_s: s.re,
                        lower: strip_lo,
                        upper: self.delta * b - e,
                    });
                }
                let ln_beta = special::log_gamma(z)?
                    + special::log_gamma(Complex64::new(b, 0.0) - z)?
                    - Complex64::new(ln_gamma(b)?, 0.0);
                let scale = -(z * (self.a * (self.q - 1.0)).ln());
                Ok((scale + ln_beta + ln_c - self.delta.ln()).exp())
            }
            PathwayRegime::Limit => {
                let scale = -(z * (self.a * self.eta).ln());
                Ok((scale + special::log_gamma(z)? + ln_c - self.delta.ln()).exp())
            }
        }
    }
}

/// Free-function form of the pathway pdf.
pub fn pathway_pdf(p: PathwayParams, kind: OperatorKind, x: f64) -> f64 {
    p.pdf(kind, x)
}

/// Free-function form of the pathway normalizing constants.
pub fn pathway_norm_consts(p: PathwayParams, kind: OperatorKind) -> Result<(f64, f64)> {
    p.norm_consts(kind)
}

// ---------------------------------------------------------------------------
// Hypergeometric-appended beta
// ---------------------------------------------------------------------------

/// Argument placement of the appended series: a·x, a·(1−x), or one of the
/// power-exponent extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgMode {
    X,
    OneMinusX,
    PowerX,
    PowerOneMinusX,
    Mixed,
}

/// Upper/lower parameter lists of the appended pFq plus its argument layout.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub scale: f64,
    pub mode: ArgMode,
    /// (δ₁, δ₂, δ₃), required by the power modes, all > 0.
    pub exponents: Option<(f64, f64, f64)>,
}

impl HyperParams {
    pub fn new(
        upper: Vec<f64>,
        lower: Vec<f64>,
        scale: f64,
        mode: ArgMode,
        exponents: Option<(f64, f64, f64)>,
    ) -> Result<Self> {
        if upper.iter().any(|&a| !(a > 0.0)) || lower.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::domain("all pFq parameters must be positive".to_string()));
        }
        if !(scale >= 0.0) {
            return Err(Error::domain(format!("scale must be >= 0, got {scale}")));
        }
        if upper.len() > lower.len() + 1 {
            return Err(Error::Divergence { p: upper.len(), q: lower.len() });
        }
        let needs_exp = matches!(mode, ArgMode::PowerX | ArgMode::PowerOneMinusX | ArgMode::Mixed);
        match exponents {
            Some((d1, d2, d3)) => {
                if !(d1 > 0.0 && d2 > 0.0 && d3 > 0.0) {
                    return Err(Error::domain("exponents must be positive".to_string()));
                }
            }
            None if needs_exp => {
                return Err(Error::domain(format!("mode {mode:?} requires exponents")));
            }
            None => {}
        }
        let hp = HyperParams { upper, lower, scale, mode, exponents };
        if hp.upper.len() == hp.lower.len() + 1 && hp.arg_max() >= 0.999 {
            return Err(Error::Convergence {
                p: hp.upper.len(),
                q: hp.lower.len(),
                abs_z: hp.arg_max(),
            });
        }
        Ok(hp)
    }

    /// Series argument at a point of (0,1); `omx` is 1−x computed stably.
    pub fn argument(&self, x: f64, omx: f64) -> f64 {
        match self.mode {
            ArgMode::X => self.scale * x,
            ArgMode::OneMinusX => self.scale * omx,
            ArgMode::PowerX => {
                let (d1, d2, _) = self.exponents.unwrap();
                self.scale.powf(d1) * x.powf(d2)
            }
            ArgMode::PowerOneMinusX => {
                let (d1, d2, _) = self.exponents.unwrap();
                self.scale.powf(d1) * omx.powf(d2)
            }
            ArgMode::Mixed => {
                let (d1, d2, d3) = self.exponents.unwrap();
                self.scale.powf(d1) * omx.powf(d2) * x.powf(d3)
            }
        }
    }

    /// Supremum of the series argument over (0,1).
    pub fn arg_max(&self) -> f64 {
        match self.mode {
            ArgMode::X | ArgMode::OneMinusX => self.scale,
            ArgMode::PowerX | ArgMode::PowerOneMinusX => {
                let (d1, _, _) = self.exponents.unwrap();
                self.scale.powf(d1)
            }
            ArgMode::Mixed => {
                let (d1, d2, d3) = self.exponents.unwrap();
                // max of (1−x)^{δ₂} x^{δ₃} sits at x = δ₃/(δ₂+δ₃)
                let m = (d2 / (d2 + d3)).powf(d2) * (d3 / (d2 + d3)).powf(d3);
                self.scale.powf(d1) * m
            }
        }
    }

    /// Contribution of series index k to the beta-integral exponents:
    /// (power shift on x, power shift on 1−x, ln of the scale power).
    fn term_shift(&self, k: usize) -> (f64, f64, f64) {
        let kf = k as f64;
        let ln_a = if self.scale > 0.0 { self.scale.ln() } else { f64::NEG_INFINITY };
        match self.mode {
            ArgMode::X => (kf, 0.0, kf * ln_a),
            ArgMode::OneMinusX => (0.0, kf, kf * ln_a),
            ArgMode::PowerX => {
                let (d1, d2, _) = self.exponents.unwrap();
                (d2 * kf, 0.0, d1 * kf * ln_a)
            }
            ArgMode::PowerOneMinusX => {
                let (d1, d2, _) = self.exponents.unwrap();
                (0.0, d2 * kf, d1 * kf * ln_a)
            }
            ArgMode::Mixed => {
                let (d1, d2, d3) = self.exponents.unwrap();
                (d3 * kf, d2 * kf, d1 * kf * ln_a)
            }
        }
    }

    /// Series coefficient (a₁)_k…(a_p)_k / ((b₁)_k…(b_q)_k k!).
    pub fn coef(&self, k: usize) -> f64 {
        let mut c = 1.0;
        for &a in &self.upper {
            c *= pochhammer(a, k);
        }
        for &b in &self.lower {
            c /= pochhammer(b, k);
        }
        let mut kfact = 1.0;
        for i in 1..=k {
            kfact *= i as f64;
        }
        c / kfact
    }
}

/// A beta density with an appended hypergeometric factor. `kind` selects
/// between the second-kind exponent ζ and the first-kind exponent ζ−1.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperDensityParams {
    pub hyper: HyperParams,
    pub zeta: f64,
    pub alpha: f64,
    pub kind: OperatorKind,
}

impl HyperDensityParams {
    pub fn new(hyper: HyperParams, zeta: f64, alpha: f64, kind: OperatorKind) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::domain(format!("alpha must be > 0, got {alpha}")));
        }
        match kind {
            OperatorKind::Second if !(zeta > -1.0) => {
                return Err(Error::domain(format!("second kind needs zeta > -1, got {zeta}")));
            }
            OperatorKind::First if !(zeta > 0.0) => {
                return Err(Error::domain(format!("first kind needs zeta > 0, got {zeta}")));
            }
            _ => {}
        }
        let hd = HyperDensityParams { hyper, zeta, alpha, kind };
        let c = hd.norm_const()?;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!("normalizing constant {c} not positive finite")));
        }
        Ok(hd)
    }

    /// Saigo-type preset: a ₂F₁ appended with argument a(1−x).
    pub fn saigo(
        upper: (f64, f64),
        lower: f64,
        scale: f64,
        zeta: f64,
        alpha: f64,
        kind: OperatorKind,
    ) -> Result<Self> {
        let hyper = HyperParams::new(
            vec![upper.0, upper.1],
            vec![lower],
            scale,
            ArgMode::OneMinusX,
            None,
        )?;
        HyperDensityParams::new(hyper, zeta, alpha, kind)
    }

    /// First beta shape: ζ+1 for the second kind, ζ for the first.
    pub fn beta_lambda(&self) -> f64 {
        match self.kind {
            OperatorKind::Second => self.zeta + 1.0,
            OperatorKind::First => self.zeta,
        }
    }

    /// Normalizing constant C = ∫₀¹ pFq(arg) x^{λ−1}(1−x)^{α−1} dx.
    ///
    /// The plain argument modes use the closed p+1Fq+1 form; the power modes
    /// sum the series of beta integrals term by term.
    pub fn norm_const(&self) -> Result<f64> {
        let l = self.beta_lambda();
        let a = self.alpha;
        match self.hyper.mode {
            ArgMode::X | ArgMode::OneMinusX => {
                let extra = if self.hyper.mode == ArgMode::X { l } else { a };
                let mut up = self.hyper.upper.clone();
                up.push(extra);
                let mut low = self.hyper.lower.clone();
                low.push(a + l);
                let series = pfq(&up, &low, self.hyper.scale)?.value;
                Ok(gamma_ratio(&[a, l], &[a + l])? * series)
            }
            _ => self.norm_const_series(),
        }
    }

    /// Generic series route: Σ_k coef_k a_k B(λ + pₓ·k, α + p₁₋ₓ·k).
    fn norm_const_series(&self) -> Result<f64> {
        let l = self.beta_lambda();
        let a = self.alpha;
        let cap = self.hyper.arg_max();
        let mut sum = 0.0;
        let mut prev = f64::INFINITY;
        for k in 0..100_000 {
            let (px, pomx, ln_ak) = self.hyper.term_shift(k);
            if k > 0 && ln_ak == f64::NEG_INFINITY {
                return Ok(sum);
            }
            let term = self.hyper.coef(k)
                * (ln_ak + ln_gamma(l + px)? + ln_gamma(a + pomx)? - ln_gamma(l + px + a + pomx)?)
                    .exp();
            sum += term;
            let at = term.abs();
            if k > 2 && at < prev {
                let r = (at / prev).max(cap);
                if r < 1.0 && at * r / (1.0 - r) <= 1e-15 * sum.abs() {
                    return Ok(sum);
                }
            }
            prev = at;
        }
        Err(Error::NonConverged { terms: 100_000 })
    }

    /// Density value at x ∈ (0,1).
    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        self.pdf_parts(x, 1.0 - x)
    }

    /// Same as [`pdf`](Self::pdf) but with 1−x supplied exactly (the
    /// quadrature rules track endpoint distances themselves).
    pub fn pdf_parts(&self, x: f64, omx: f64) -> f64 {
        let c = self.norm_const().expect("validated at construction");
        let series = pfq(&self.hyper.upper, &self.hyper.lower, self.hyper.argument(x, omx))
            .expect("validated at construction")
            .value;
        series * x.powf(self.beta_lambda() - 1.0) * omx.powf(self.alpha - 1.0) / c
    }

    /// E(x^{s−1}); closed p+1Fq+1 forms for the plain modes, the term-wise
    /// beta series otherwise. Valid for Re(s) > 1 − λ.
    pub fn mellin_moment(&self, s: Complex64) -> Result<Complex64> {
        let l = self.beta_lambda();
        let a = self.alpha;
        if s.re <= 1.0 - l {
            return Err(Error::Strip { re_s: s.re, lower: 1.0 - l, upper: f64::INFINITY });
        }
        let c = self.norm_const()?;
        let w = s + (l - 1.0); // λ + s − 1
        match self.hyper.mode {
            ArgMode::X | ArgMode::OneMinusX => {
                let extra = if self.hyper.mode == ArgMode::X {
                    w
                } else {
                    Complex64::new(a, 0.0)
                };
                let mut up: Vec<Complex64> =
                    self.hyper.upper.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                up.push(extra);
                let mut low: Vec<Complex64> =
                    self.hyper.lower.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                low.push(w + a);
                let series =
                    pfq_complex(&up, &low, Complex64::new(self.hyper.scale, 0.0))?.value;
                let gammas = (special::log_gamma(w)? - special::log_gamma(w + a)?).exp();
                Ok(series * gammas * special::gamma(a)? / c)
            }
            _ => {
                let cap = self.hyper.arg_max();
                let mut sum = Complex64::new(0.0, 0.0);
                let mut prev = f64::INFINITY;
                for k in 0..100_000 {
                    let (px, pomx, ln_ak) = self.hyper.term_shift(k);
                    if k > 0 && ln_ak == f64::NEG_INFINITY {
                        return Ok(sum / c);
                    }
                    let ln_beta = special::log_gamma(w + px)?
                        + special::log_gamma(Complex64::new(a + pomx, 0.0))?
                        - special::log_gamma(w + px + a + pomx)?;
                    let term = (ln_beta + ln_ak).exp() * self.hyper.coef(k);
                    sum += term;
                    let at = term.norm();
                    if k > 2 && at < prev {
                        let r = (at / prev).max(cap);
                        if r < 1.0 && at * r / (1.0 - r) <= 1e-15 * sum.norm() {
                            return Ok(sum / c);
                        }
                    }
                    prev = at;
                }
                Err(Error::NonConverged { terms: 100_000 })
            }
        }
    }
}

/// Free-function form of the hypergeometric-appended density pdf.
pub fn hyper_density_pdf(p: &HyperDensityParams, x: f64) -> f64 {
    p.pdf(x)
}

/// Free-function form of its normalizing constant.
pub fn hyper_norm_const(p: &HyperDensityParams) -> Result<f64> {
    p.norm_const()
}

// ---------------------------------------------------------------------------
// TestFunction
// ---------------------------------------------------------------------------

/// Large-x behaviour of a function on an unbounded support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    Exponential,
    /// f(x) ~ x^{−p}.
    Power(f64),
    Compact,
}

/// Support interval; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub fn new(lo: f64, hi: f64) -> Self {
        Support { lo, hi }
    }
    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// Closed-form Mellin transform attached to a test function.
pub struct MellinClosedForm {
    /// Convergence strip on Re(s).
    pub strip: (f64, f64),
    pub f: Box<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
}

/// An arbitrary function f on (a subset of) (0, ∞) with the metadata the
/// operators, Mellin transforms and samplers need.
pub struct TestFunction {
    pub name: String,
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Optional form taking (x, x−lo, hi−x) so endpoint factors like
    /// (1−x)^{α−1} can be computed from the exact distances the quadrature
    /// transform provides instead of a cancellation-prone subtraction.
    eval_parts: Option<Box<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>>,
    pub support: Support,
    pub decay: Decay,
    pub is_density: bool,
    /// f(x) ~ C (x − lo)^{lo_exponent} as x → lo⁺.
    pub lo_exponent: f64,
    /// f(x) ~ C (hi − x)^{hi_exponent} as x → hi⁻ (finite hi only).
    pub hi_exponent: f64,
    pub mellin: Option<MellinClosedForm>,
    cdf_table: OnceLock<std::result::Result<CdfTable, Error>>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("support", &self.support)
            .field("decay", &self.decay)
            .field("is_density", &self.is_density)
            .finish()
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: Support,
        decay: Decay,
    ) -> Self {
        TestFunction {
            name: name.into(),
            eval: Box::new(eval),
            eval_parts: None,
            support,
            decay,
            is_density: false,
            lo_exponent: 0.0,
            hi_exponent: 0.0,
            mellin: None,
            cdf_table: OnceLock::new(),
        }
    }

    pub fn with_exponents(mut self, lo: f64, hi: f64) -> Self {
        self.lo_exponent = lo;
        self.hi_exponent = hi;
        self
    }

    pub fn with_eval_parts(
        mut self,
        f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.eval_parts = Some(Box::new(f));
        self
    }

    pub fn with_mellin(
        mut self,
        strip: (f64, f64),
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.mellin = Some(MellinClosedForm { strip, f: Box::new(f) });
        self
    }

    pub fn density(mut self) -> Self {
        self.is_density = true;
        self
    }

    /// Runs the registration checks (density normalization to 1e-8, Mellin
    /// closed form against numeric probes to 1e-8) and freezes the function
    /// behind an `Arc`.
    pub fn registered(self) -> Result<Arc<TestFunction>> {
        if self.is_density {
            let total = self.integrate_support(Tol { abs: 1e-11, rel: 1e-11 })?;
            if (total - 1.0).abs() > 1e-8 {
                return Err(Error::domain(format!(
                    "density '{}' integrates to {total}, not 1",
                    self.name
                )));
            }
        }
        if let Some(mcf) = &self.mellin {
            let (lo, hi) = mcf.strip;
            let probes: [f64; 3] = if hi.is_finite() && lo.is_finite() {
                [lo + 0.25 * (hi - lo), lo + 0.5 * (hi - lo), lo + 0.75 * (hi - lo)]
            } else if lo.is_finite() {
                [lo + 0.5, lo + 1.0, lo + 1.5]
            } else if hi.is_finite() {
                [hi - 1.5, hi - 1.0, hi - 0.5]
            } else {
                [1.0, 2.0, 3.0]
            };
            for &p in &probes {
                let s = Complex64::new(p, 0.0);
                let closed = (mcf.f)(s);
                let numeric = self.mellin_numeric_raw(s, Tol { abs: 1e-10, rel: 1e-10 })?;
                if (closed - numeric).norm() > 1e-8 * closed.norm().max(1.0) {
                    return Err(Error::domain(format!(
                        "closed-form Mellin of '{}' at s={p} gives {closed}, numeric {numeric}",
                        self.name
                    )));
                }
            }
        }
        Ok(Arc::new(self))
    }

    /// Pointwise value; zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        if !self.support.contains(x) {
            return 0.0;
        }
        (self.eval)(x)
    }

    /// Value with exact distances to the support endpoints: `da` = x − lo,
    /// `db` = hi − x (pass `f64::INFINITY` for unbounded supports).
    pub fn eval_at(&self, x: f64, da: f64, db: f64) -> f64 {
        if da <= 0.0 || db <= 0.0 || !x.is_finite() {
            return 0.0;
        }
        match &self.eval_parts {
            Some(f) => f(x, da, db),
            // lo + da reconstructs x exactly for supports starting at 0
            None => (self.eval)(self.support.lo + da),
        }
    }

    /// Convergence strip of the numeric Mellin transform, from metadata.
    pub fn mellin_strip(&self) -> (f64, f64) {
        let lower = if self.support.lo > 0.0 { f64::NEG_INFINITY } else { -self.lo_exponent };
        let upper = if self.support.hi.is_finite() {
            f64::INFINITY
        } else {
            match self.decay {
                Decay::Exponential | Decay::Compact => f64::INFINITY,
                Decay::Power(p) => p,
            }
        };
        (lower, upper)
    }

    /// ∫ x^{s−1} f(x) dx over the support, without strip checking.
    pub(crate) fn mellin_numeric_raw(&self, s: Complex64, tol: Tol) -> Result<Complex64> {
        let lo = self.support.lo;
        let hi = self.support.hi;
        let sm1 = s - 1.0;
        // x^{s−1}·f(x) assembled in log space: either factor alone can
        // overflow where the product is tame (e.g. x^{λ−1} against a very
        // negative Re(s)).
        let prod = move |x: f64, v: f64| {
            if v == 0.0 || !v.is_finite() {
                return Complex64::new(0.0, 0.0);
            }
            let e = sm1 * x.ln() + v.abs().ln();
            if e.re < -745.0 {
                return Complex64::new(0.0, 0.0);
            }
            e.exp() * v.signum()
        };
        let mut total = Complex64::new(0.0, 0.0);
        let split = if hi.is_finite() { 1.0f64.clamp(lo, hi) } else { 1.0f64.max(lo) };
        if split > lo {
            total += quad::tanh_sinh(
                |_x, da, db| {
                    let x = lo + da;
                    let db_sup = if split == hi {
                        db
                    } else if hi.is_finite() {
                        hi - x
                    } else {
                        f64::INFINITY
                    };
                    prod(x, self.eval_at(x, da, db_sup))
                },
                lo,
                split,
                tol,
            )?
            .value;
        }
        if hi.is_finite() {
            if hi > split {
                total += quad::tanh_sinh(
                    |x, _da, db| prod(x, self.eval_at(x, x - lo, db)),
                    split,
                    hi,
                    tol,
                )?
                .value;
            }
        } else {
            total += quad::tanh_sinh_upper(
                |x| prod(x, self.eval_at(x, x - lo, f64::INFINITY)),
                split,
                tol,
            )?
            .value;
        }
        Ok(total)
    }

    /// ∫ f over the support.
    pub fn integrate_support(&self, tol: Tol) -> Result<f64> {
        let lo = self.support.lo;
        let hi = self.support.hi;
        if hi.is_finite() {
            Ok(quad::tanh_sinh(|x, da, db| self.eval_at(x, da, db), lo, hi, tol)?.value)
        } else {
            let split = lo + 1.0;
            let head = quad::tanh_sinh(
                |x, da, _db| self.eval_at(x, da, f64::INFINITY),
                lo,
                split,
                tol,
            )?;
            let tail =
                quad::tanh_sinh_upper(|x| self.eval_at(x, x - lo, f64::INFINITY), split, tol)?;
            Ok(head.value + tail.value)
        }
    }

    fn table(&self) -> Result<&CdfTable> {
        if !self.is_density {
            return Err(Error::domain(format!(
                "'{}' is not a density; no sampler available",
                self.name
            )));
        }
        self.cdf_table
            .get_or_init(|| CdfTable::build(self))
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// CDF at x, absolute accuracy 1e-8.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(self.table()?.cdf(self, x))
    }

    /// Quantile via the tabulated inverse CDF (1e-10 in probability).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        Ok(self.table()?.quantile(self, u))
    }

    /// n deterministic i.i.d. draws for (seed, stream).
    pub fn sample_stream(&self, n: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
        let table = self.table()?;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let uniforms: Vec<f64> = (0..n).map(|_| open_unit(&mut rng)).collect();
        use rayon::prelude::*;
        Ok(uniforms.par_iter().map(|&u| table.quantile(self, u)).collect())
    }

    /// n draws on the default stream 0.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        self.sample_stream(n, seed, 0)
    }
}

/// Uniform draw strictly inside (0,1), 53-bit resolution.
fn open_unit(rng: &mut ChaCha12Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

// ---------------------------------------------------------------------------
// CDF table and inverse sampling
// ---------------------------------------------------------------------------

const CDF_NODES: usize = 2048;
const TAIL_MASS: f64 = 1e-12;
/// Probability-space tolerance of the inverse CDF.
const INV_TOL: f64 = 1e-10;

struct CdfTable {
    x: Vec<f64>,
    /// Normalized CDF at the nodes; cdf[0] = 0.
    cdf: Vec<f64>,
    /// Mass beyond the last node (truncated tail of unbounded supports).
    tail: f64,
    total: f64,
    /// Endpoint transform powers λ = exponent + 1.
    lo_lambda: f64,
    hi_lambda: f64,
}

impl CdfTable {
    fn build(tf: &TestFunction) -> std::result::Result<CdfTable, Error> {
        let lo = tf.support.lo;
        let seg_tol = Tol { abs: 1e-13, rel: 1e-12 };

        // Truncation point for unbounded supports: push out until the tail
        // is below TAIL_MASS.
        let (hi, tail) = if tf.support.hi.is_finite() {
            (tf.support.hi, 0.0)
        } else {
            let mut t = lo + 1.0;
            let mut tail;
            loop {
                tail = quad::tanh_sinh_upper(
                    |x| tf.eval_at(x, x - lo, f64::INFINITY),
                    t,
                    seg_tol,
                )?
                .value;
                if tail < TAIL_MASS || t > 1e300 {
                    break;
                }
                t *= 2.0;
            }
            (t, tail)
        };

        let lo_lambda = (tf.lo_exponent + 1.0).max(1e-3);
        let hi_lambda = if tf.support.hi.is_finite() {
            (tf.hi_exponent + 1.0).max(1e-3)
        } else {
            1.0
        };

        // Segment list refined where the mass sits.
        struct Seg {
            a: f64,
            b: f64,
            mass: f64,
        }
        let sup_hi = tf.support.hi;
        let seg_mass = |a: f64, b: f64| -> std::result::Result<f64, Error> {
            Ok(quad::tanh_sinh(
                |x, pa, pb| {
                    let da = if a == lo { pa } else { x - lo };
                    let db = if !sup_hi.is_finite() {
                        f64::INFINITY
                    } else if b == sup_hi {
                        pb
                    } else {
                        sup_hi - x
                    };
                    tf.eval_at(x, da, db)
                },
                a,
                b,
                seg_tol,
            )?
            .value)
        };
        let mut segs = vec![Seg { a: lo, b: hi, mass: seg_mass(lo, hi)? }];
        while segs.len() < CDF_NODES - 1 {
            let (idx, worst_mass) = segs
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.mass))
                .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap();
            if worst_mass < 1e-6 {
                break; // everything that matters is already resolved
            }
            let s = segs.swap_remove(idx);
            // Midpoint in the coordinate that linearizes the endpoint
            // behaviour: w^{1/λ} against the support edge, plain x inside.
            let m = if s.a == lo && lo_lambda != 1.0 {
                s.a + (s.b - s.a) * 0.5f64.powf(1.0 / lo_lambda)
            } else if s.b == hi && hi_lambda != 1.0 {
                s.b - (s.b - s.a) * 0.5f64.powf(1.0 / hi_lambda)
            } else {
                0.5 * (s.a + s.b)
            };
            if !(m > s.a && m < s.b) {
                // interval exhausted at machine precision
                segs.push(Seg { mass: 0.0, ..s });
                continue;
            }
            let left = seg_mass(s.a, m)?;
            let right = (s.mass - left).max(0.0);
            segs.push(Seg { a: s.a, b: m, mass: left });
            segs.push(Seg { a: m, b: s.b, mass: right });
        }
        segs.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());

        let mut x = Vec::with_capacity(segs.len() + 1);
        let mut cdf = Vec::with_capacity(segs.len() + 1);
        x.push(lo);
        cdf.push(0.0);
        let mut acc = 0.0;
        for s in &segs {
            acc += s.mass;
            x.push(s.b);
            cdf.push(acc);
        }
        let total = acc + tail;
        for v in cdf.iter_mut() {
            *v /= total;
        }
        Ok(CdfTable { x, cdf, tail: tail / total, total, lo_lambda, hi_lambda })
    }

    fn segment(&self, x: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.x.len() - 2),
        }
    }

    /// pdf with exact distances to the support edges, table-side helper.
    fn ev(&self, tf: &TestFunction, xx: f64) -> f64 {
        let da = xx - tf.support.lo;
        let db = if tf.support.hi.is_finite() { tf.support.hi - xx } else { f64::INFINITY };
        tf.eval_at(xx, da, db)
    }

    /// Local mass ∫_a^y pdf inside segment i, in the transformed coordinate
    /// when the segment touches a singular support edge.
    fn local_mass(&self, tf: &TestFunction, i: usize, y: f64) -> f64 {
        let (a, b) = (self.x[i], self.x[i + 1]);
        if i == 0 && self.lo_lambda != 1.0 {
            let lam = self.lo_lambda;
            let delta = b - a;
            let w_y = ((y - a) / delta).powf(lam);
            let db_far = if tf.support.hi.is_finite() { tf.support.hi } else { f64::INFINITY };
            quad::gl15(
                |w| {
                    let da = delta * w.powf(1.0 / lam);
                    let xx = a + da;
                    tf.eval_at(xx, da, if db_far.is_finite() { db_far - xx } else { db_far })
                        * delta
                        / lam
                        * w.powf(1.0 / lam - 1.0)
                },
                0.0,
                w_y,
            )
        } else if i + 2 == self.x.len() && self.hi_lambda != 1.0 {
            // measure from the right edge: ∫_a^y = mass(seg) − ∫_y^b
            let lam = self.hi_lambda;
            let delta = b - a;
            let v_y = ((b - y) / delta).powf(lam);
            let from_right = quad::gl15(
                |v| {
                    let db = delta * v.powf(1.0 / lam);
                    let xx = b - db;
                    tf.eval_at(xx, xx - tf.support.lo, db) * delta / lam
                        * v.powf(1.0 / lam - 1.0)
                },
                0.0,
                v_y,
            );
            (self.cdf[i + 1] - self.cdf[i]) * self.total - from_right
        } else {
            quad::gl15(|xx| self.ev(tf, xx), a, y)
        }
    }

    fn cdf(&self, tf: &TestFunction, xq: f64) -> f64 {
        if xq <= self.x[0] {
            return 0.0;
        }
        if xq >= *self.x.last().unwrap() {
            return 1.0;
        }
        let i = self.segment(xq);
        (self.cdf[i] + self.local_mass(tf, i, xq) / self.total).clamp(0.0, 1.0)
    }

    fn quantile(&self, tf: &TestFunction, u: f64) -> f64 {
        let n = self.x.len();
        let last_cdf = 1.0 - self.tail;
        if u >= last_cdf {
            return self.x[n - 1];
        }
        if u <= 0.0 {
            return self.x[0];
        }
        // locate the segment on the tabulated CDF
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cdf[mid] <= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let i = lo;
        let (a, b) = (self.x[i], self.x[i + 1]);
        let target = (u - self.cdf[i]) * self.total;
        let seg_mass = (self.cdf[i + 1] - self.cdf[i]) * self.total;

        // Newton from a linear-interpolation guess, with a bisection bracket.
        let frac = if seg_mass > 0.0 { (target / seg_mass).clamp(0.0, 1.0) } else { 0.5 };
        let mut x = a + frac * (b - a);
        let mut bracket = (a, b);
        for _ in 0..64 {
            let m = self.local_mass(tf, i, x);
            let err = m - target;
            if err.abs() <= INV_TOL * self.total {
                return x;
            }
            if err > 0.0 {
                bracket.1 = x;
            } else {
                bracket.0 = x;
            }
            let p = self.ev(tf, x);
            let step = if p > 0.0 { -err / p } else { 0.0 };
            let next = x + step;
            x = if step == 0.0 || next <= bracket.0 || next >= bracket.1 {
                0.5 * (bracket.0 + bracket.1)
            } else {
                next
            };
            if (bracket.1 - bracket.0) < f64::EPSILON * (1.0 + x.abs()) {
                return x;
            }
        }
        x
    }
}

// ---------------------------------------------------------------------------
// Kernel densities as TestFunctions
// ---------------------------------------------------------------------------

/// Type-1 beta density as a registered test function.
pub fn beta1_density(p: Beta1Params) -> Result<Arc<TestFunction>> {
    let name = format!("beta1:{},{}", p.lambda, p.alpha);
    let strip = (1.0 - p.lambda, f64::INFINITY);
    let c = p.norm_const();
    TestFunction::new(name, move |x| p.pdf(x), Support::new(0.0, 1.0), Decay::Compact)
        .with_eval_parts(move |_x, da, db| c * da.powf(p.lambda - 1.0) * db.powf(p.alpha - 1.0))
        .with_exponents(p.lambda - 1.0, p.alpha - 1.0)
        .with_mellin(strip, move |s| {
            p.mellin_moment(s).unwrap_or(Complex64::new(f64::NAN, 0.0))
        })
        .density()
        .registered()
}

/// Pathway density of the given kind as a registered test function.
pub fn pathway_density(p: PathwayParams, kind: OperatorKind) -> Result<Arc<TestFunction>> {
    p.validate(kind)?;
    let e = p.exponent(kind);
    let name = format!(
        "pathway:g={},d={},e={},a={},q={},k={}",
        p.gamma,
        p.delta,
        p.eta,
        p.a,
        p.q,
        if kind == OperatorKind::First { 1 } else { 2 }
    );
    let (support, decay, hi_exp) = match p.regime() {
        PathwayRegime::Less => (
            Support::new(0.0, p.support_upper()),
            Decay::Compact,
            p.eta / (1.0 - p.q),
        ),
        PathwayRegime::Greater => (
            Support::new(0.0, f64::INFINITY),
            Decay::Power(p.delta * p.eta / (p.q - 1.0) - e),
            0.0,
        ),
        PathwayRegime::Limit => (Support::new(0.0, f64::INFINITY), Decay::Exponential, 0.0),
    };
    let strip = (-e, f64::INFINITY);
    TestFunction::new(name, move |x| p.pdf(kind, x), support, decay)
        .with_exponents(e, hi_exp)
        .with_mellin(strip, move |s| {
            p.mellin_moment(kind, s).unwrap_or(Complex64::new(f64::NAN, 0.0))
        })
        .density()
        .registered()
}

/// Hypergeometric-appended beta density as a registered test function.
pub fn hyper_density(params: &HyperDensityParams) -> Result<Arc<TestFunction>> {
    let p = params.clone();
    let name = format!(
        "hyper:k={};zeta={};alpha={};mode={:?};a={}",
        if p.kind == OperatorKind::First { 1 } else { 2 },
        p.zeta,
        p.alpha,
        p.hyper.mode,
        p.hyper.scale
    );
    let lam = p.beta_lambda();
    let alpha = p.alpha;
    let strip = (1.0 - lam, f64::INFINITY);
    let pm = p.clone();
    let pe = p.clone();
    let c = p.norm_const()?;
    TestFunction::new(name, move |x| p.pdf(x), Support::new(0.0, 1.0), Decay::Compact)
        .with_eval_parts(move |_x, da, db| {
            let series = pfq(&pe.hyper.upper, &pe.hyper.lower, pe.hyper.argument(da, db))
                .map(|s| s.value)
                .unwrap_or(f64::NAN);
            series * da.powf(lam - 1.0) * db.powf(alpha - 1.0) / c
        })
        .with_exponents(lam - 1.0, alpha - 1.0)
        .with_mellin(strip, move |s| {
            pm.mellin_moment(s).unwrap_or(Complex64::new(f64::NAN, 0.0))
        })
        .density()
        .registered()
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

/// Built-in density/function constructors addressable by name from the CLI.
pub fn builtin_names() -> Vec<(&'static str, &'static str)> {
    vec![
        ("exp1", "unit exponential density e^{-x} on (0,inf)"),
        ("gamma:K", "gamma density x^{K-1}e^{-x}/Gamma(K)"),
        ("beta1:L,A", "type-1 beta density with shapes (L, A) on (0,1)"),
        ("uniform", "uniform density on (0,1) (= beta1:1,1)"),
        ("pareto:P", "Pareto density P x^{-P-1} on (1,inf)"),
        ("pow:P", "bare power t^P on (0,inf) (not a density)"),
        ("pathway:g=..,d=..,e=..,a=..,q=..[,k=1|2]", "pathway density"),
        (
            "hyper:up=..;low=..;a=..;mode=x|1mx|powx|pow1mx|mixed;zeta=..;alpha=..;kind=1|2[;d=d1,d2,d3]",
            "hypergeometric-appended beta density",
        ),
    ]
}

/// Resolves a density/function specification string.
pub fn resolve(spec: &str) -> Result<Arc<TestFunction>> {
    let (head, rest) = match spec.split_once(':') {
        Some((h, r)) => (h, r),
        None => (spec, ""),
    };
    match head {
        "exp1" => exp_density(),
        "uniform" => beta1_density(Beta1Params::new(1.0, 1.0)?),
        "gamma" => {
            let k: f64 = parse_num(rest, "gamma shape")?;
            gamma_density(k)
        }
        "beta1" => {
            let (l, a) = parse_pair(rest, "beta1 shapes")?;
            beta1_density(Beta1Params::new(l, a)?)
        }
        "pareto" => {
            let p: f64 = parse_num(rest, "pareto exponent")?;
            pareto_density(p)
        }
        "pow" => {
            let p: f64 = parse_num(rest, "power exponent")?;
            power_function(p)
        }
        "pathway" => {
            let (params, kind) = parse_pathway(rest)?;
            pathway_density(params, kind)
        }
        "hyper" => {
            let hd = parse_hyper(rest)?;
            hyper_density(&hd)
        }
        _ => Err(Error::validation(format!("unknown function '{spec}'"))),
    }
}

/// Unit exponential density with Mellin transform Γ(s).
pub fn exp_density() -> Result<Arc<TestFunction>> {
    TestFunction::new("exp1", |x| (-x).exp(), Support::new(0.0, f64::INFINITY), Decay::Exponential)
        .with_mellin((0.0, f64::INFINITY), |s| {
            special::log_gamma(s).map(|l| l.exp()).unwrap_or(Complex64::new(f64::NAN, 0.0))
        })
        .density()
        .registered()
}

/// Gamma density x^{k−1} e^{−x} / Γ(k).
pub fn gamma_density(k: f64) -> Result<Arc<TestFunction>> {
    if !(k > 0.0) {
        return Err(Error::domain(format!("gamma shape must be > 0, got {k}")));
    }
    let ln_gk = ln_gamma(k)?;
    TestFunction::new(
        format!("gamma:{k}"),
        move |x| ((k - 1.0) * x.ln() - x - ln_gk).exp(),
        Support::new(0.0, f64::INFINITY),
        Decay::Exponential,
    )
    .with_eval_parts(move |_x, da, _db| ((k - 1.0) * da.ln() - da - ln_gk).exp())
    .with_exponents(k - 1.0, 0.0)
    .with_mellin((1.0 - k, f64::INFINITY), move |s| {
        special::log_gamma(s + (k - 1.0))
            .map(|l| (l - ln_gk).exp())
            .unwrap_or(Complex64::new(f64::NAN, 0.0))
    })
    .density()
    .registered()
}

/// Pareto density p x^{−p−1} on (1, ∞); Mellin transform p/(p+1−s).
pub fn pareto_density(p: f64) -> Result<Arc<TestFunction>> {
    if !(p > 0.0) {
        return Err(Error::domain(format!("pareto exponent must be > 0, got {p}")));
    }
    TestFunction::new(
        format!("pareto:{p}"),
        move |x| p * x.powf(-p - 1.0),
        Support::new(1.0, f64::INFINITY),
        Decay::Power(p + 1.0),
    )
    .with_mellin((f64::NEG_INFINITY, p + 1.0), move |s| {
        p / (Complex64::new(p + 1.0, 0.0) - s)
    })
    .density()
    .registered()
}

/// Bare power t^p on (0, ∞); not a density, used for the eigenrelations.
pub fn power_function(p: f64) -> Result<Arc<TestFunction>> {
    TestFunction::new(
        format!("pow:{p}"),
        move |x| x.powf(p),
        Support::new(0.0, f64::INFINITY),
        Decay::Power(-p),
    )
    .with_exponents(p, 0.0)
    .registered()
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::validation(format!("cannot parse {what} from '{s}'")))
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::validation(format!("{what}: expected 'a,b', got '{s}'")));
    }
    Ok((parse_num(parts[0], what)?, parse_num(parts[1], what)?))
}

fn parse_pathway(s: &str) -> Result<(PathwayParams, OperatorKind)> {
    let (mut g, mut d, mut e, mut a, mut q) = (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    let mut kind = OperatorKind::Second;
    for field in s.split(',') {
        let (key, val) = field
            .split_once('=')
            .ok_or_else(|| Error::validation(format!("pathway field '{field}' is not key=value")))?;
        match key.trim() {
            "g" => g = parse_num(val, "pathway g")?,
            "d" => d = parse_num(val, "pathway d")?,
            "e" => e = parse_num(val, "pathway e")?,
            "a" => a = parse_num(val, "pathway a")?,
            "q" => q = parse_num(val, "pathway q")?,
            "k" => {
                kind = match val.trim() {
                    "1" => OperatorKind::First,
                    "2" => OperatorKind::Second,
                    other => {
                        return Err(Error::validation(format!("pathway kind '{other}'")));
                    }
                }
            }
            other => return Err(Error::validation(format!("unknown pathway field '{other}'"))),
        }
    }
    if [g, d, e, a, q].iter().any(|v| v.is_nan()) {
        return Err(Error::validation(format!("pathway spec '{s}' missing one of g,d,e,a,q")));
    }
    Ok((PathwayParams::new(g, d, e, a, q)?, kind))
}

fn parse_hyper(s: &str) -> Result<HyperDensityParams> {
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    let mut scale = f64::NAN;
    let mut mode = None;
    let mut zeta = f64::NAN;
    let mut alpha = f64::NAN;
    let mut kind = OperatorKind::Second;
    let mut exps = None;
    for field in s.split(';') {
        let (key, val) = field
            .split_once('=')
            .ok_or_else(|| Error::validation(format!("hyper field '{field}' is not key=value")))?;
        match key.trim() {
            "up" => {
                upper = val
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| parse_num(t, "hyper upper"))
                    .collect::<Result<_>>()?;
            }
            "low" => {
                lower = val
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| parse_num(t, "hyper lower"))
                    .collect::<Result<_>>()?;
            }
            "a" => scale = parse_num(val, "hyper scale")?,
            "mode" => {
                mode = Some(match val.trim() {
                    "x" => ArgMode::X,
                    "1mx" => ArgMode::OneMinusX,
                    "powx" => ArgMode::PowerX,
                    "pow1mx" => ArgMode::PowerOneMinusX,
                    "mixed" => ArgMode::Mixed,
                    other => return Err(Error::validation(format!("hyper mode '{other}'"))),
                });
            }
            "zeta" => zeta = parse_num(val, "hyper zeta")?,
            "alpha" => alpha = parse_num(val, "hyper alpha")?,
            "kind" => {
                kind = match val.trim() {
                    "1" => OperatorKind::First,
                    "2" => OperatorKind::Second,
                    other => return Err(Error::validation(format!("hyper kind '{other}'"))),
                };
            }
            "d" => {
                let parts: Vec<f64> = val
                    .split(',')
                    .map(|t| parse_num(t, "hyper exponents"))
                    .collect::<Result<_>>()?;
                if parts.len() != 3 {
                    return Err(Error::validation("hyper exponents need d=d1,d2,d3".to_string()));
                }
                exps = Some((parts[0], parts[1], parts[2]));
            }
            other => return Err(Error::validation(format!("unknown hyper field '{other}'"))),
        }
    }
    let mode = mode.ok_or_else(|| Error::validation("hyper spec missing mode".to_string()))?;
    if scale.is_nan() || zeta.is_nan() || alpha.is_nan() {
        return Err(Error::validation(format!("hyper spec '{s}' missing a, zeta or alpha")));
    }
    let hp = HyperParams::new(upper, lower, scale, mode, exps)?;
    HyperDensityParams::new(hp, zeta, alpha, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn beta1_pdf_examples() {
        let u = Beta1Params::new(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(u.pdf(0.3), 1.0, epsilon = 1e-14);
        let b = Beta1Params::new(2.0, 2.0).unwrap();
        assert_abs_diff_eq!(b.pdf(0.5), 1.5, epsilon = 1e-13);
        assert_eq!(b.pdf(1.2), 0.0);
        assert_eq!(b.pdf(-0.1), 0.0);
    }

    #[test]
    fn beta1_kernel_constructors_shift() {
        let k2 = Beta1Params::kober_second_kernel(1.0, 2.0).unwrap();
        assert_eq!((k2.lambda, k2.alpha), (2.0, 2.0));
        let k1 = Beta1Params::kober_first_kernel(1.0, 2.0).unwrap();
        assert_eq!((k1.lambda, k1.alpha), (1.0, 2.0));
        assert!(Beta1Params::kober_first_kernel(0.0, 1.0).is_err());
        assert!(Beta1Params::kober_second_kernel(-1.0, 1.0).is_err());
    }

    #[test]
    fn pathway_pdf_reduces_to_beta() {
        // q=0, a=1, δ=1, η=1, γ=1 is Beta(2,2): pdf(0.5) = 1.5
        let p = PathwayParams::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(p.pdf(OperatorKind::Second, 0.5), 1.5, epsilon = 1e-12);
        assert_eq!(p.regime(), PathwayRegime::Less);
        assert_eq!(p.support_upper(), 1.0);
    }

    #[test]
    fn pathway_limit_is_exponential() {
        let p = PathwayParams::new(0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.regime(), PathwayRegime::Limit);
        assert_abs_diff_eq!(p.pdf(OperatorKind::Second, 2.0), (-2.0f64).exp(), epsilon = 1e-13);
    }

    #[test]
    fn pathway_greater_constant() {
        // q=2, a=1, δ=1, γ=1, η=4: c₂ = Γ(4)/(Γ(2)Γ(2)) = 6, pdf(1) = 6·2^{-4}
        let p = PathwayParams::new(1.0, 1.0, 4.0, 1.0, 2.0).unwrap();
        let (c, _) = p.norm_consts(OperatorKind::Second).unwrap();
        assert_abs_diff_eq!(c, 6.0, epsilon = 1e-11);
        assert_abs_diff_eq!(p.pdf(OperatorKind::Second, 1.0), 0.375, epsilon = 1e-12);
    }

    #[test]
    fn pathway_norm_const_limits_agree() {
        // lim c₁ (q→1−) = lim c₂ (q→1+) = c*, probed at q = 1 ∓ 1e-10.
        for &(g, d, e, a) in &[(0.0, 1.0, 1.0, 1.0), (0.5, 1.5, 3.0, 2.0), (1.0, 1.0, 2.0, 0.5)] {
            let less = PathwayParams::new(g, d, e, a, 1.0 - 1e-10).unwrap();
            let greater = PathwayParams::new(g, d, e, a, 1.0 + 1e-10).unwrap();
            let (c_less, star) = less.norm_consts(OperatorKind::Second).unwrap();
            let (c_greater, star2) = greater.norm_consts(OperatorKind::Second).unwrap();
            assert_abs_diff_eq!(star, star2, epsilon = 1e-14);
            assert!((c_less - star).abs() < 1e-9 * star.max(1.0), "{c_less} vs {star}");
            assert!((c_greater - star).abs() < 1e-9 * star.max(1.0), "{c_greater} vs {star}");
        }
        // γ=0, δ=1, a=1, η=1 ⇒ c* = 1
        let p = PathwayParams::new(0.0, 1.0, 1.0, 1.0, 0.3).unwrap();
        assert_abs_diff_eq!(p.norm_consts(OperatorKind::Second).unwrap().1, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn pathway_norm_const_matches_quadrature() {
        let p = PathwayParams::new(0.5, 1.5, 3.0, 2.0, 0.5).unwrap();
        let (c, _) = p.norm_consts(OperatorKind::Second).unwrap();
        // 1/c should equal the integral of the unnormalized body
        let u = p.support_upper();
        let body = quad::tanh_sinh(
            |x, _, _| {
                let t = p.a * (1.0 - p.q) * x.powf(p.delta);
                x.powf(p.gamma) * (1.0 - t).max(0.0).powf(p.eta / (1.0 - p.q))
            },
            0.0,
            u,
            Tol::default(),
        )
        .unwrap()
        .value;
        assert_abs_diff_eq!(c, 1.0 / body, epsilon = 1e-9);
    }

    #[test]
    fn pathway_greater_normalizability_enforced() {
        // η/(q−1) − (γ+1)/δ = 1 − 2 < 0
        let p = PathwayParams::new(1.0, 1.0, 1.0, 1.0, 2.0).unwrap();
        assert!(p.validate(OperatorKind::Second).is_err());
        assert!(p.norm_consts(OperatorKind::Second).is_err());
    }

    #[test]
    fn pathway_pointwise_continuity_in_q() {
        let x = 0.7;
        for (kind, gamma) in [(OperatorKind::Second, 0.0), (OperatorKind::First, 1.0)] {
            let lim = PathwayParams::new(gamma, 1.0, 1.0, 1.0, 1.0).unwrap().pdf(kind, x);
            let mut prev_gap = f64::INFINITY;
            for &eps in &[0.1, 0.01, 0.001] {
                let below =
                    PathwayParams::new(gamma, 1.0, 1.0, 1.0, 1.0 - eps).unwrap().pdf(kind, x);
                let above =
                    PathwayParams::new(gamma, 1.0, 1.0, 1.0, 1.0 + eps).unwrap().pdf(kind, x);
                let gap = (below - lim).abs().max((above - lim).abs());
                assert!(gap < prev_gap, "gap not shrinking: {gap} vs {prev_gap}");
                prev_gap = gap;
            }
            assert!(prev_gap < 1e-3, "final gap {prev_gap}");
        }
    }

    #[test]
    fn hyper_scale_zero_reduces_to_beta() {
        let hp = HyperParams::new(vec![1.0], vec![2.0], 0.0, ArgMode::X, None).unwrap();
        let hd = HyperDensityParams::new(hp, 1.0, 2.0, OperatorKind::Second).unwrap();
        let b = Beta1Params::new(2.0, 2.0).unwrap();
        for &x in &[0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(hd.pdf(x), b.pdf(x), epsilon = 1e-12);
        }
        let c = hd.norm_const().unwrap();
        assert_abs_diff_eq!(c, gamma_ratio(&[2.0, 2.0], &[4.0]).unwrap(), epsilon = 1e-13);
    }

    #[test]
    fn hyper_exp_density_example() {
        // ₀F₀, mode x, a=1, ζ=0, α=1: pdf = e^x/(e−1) on (0,1)
        let hp = HyperParams::new(vec![], vec![], 1.0, ArgMode::X, None).unwrap();
        let hd = HyperDensityParams::new(hp, 0.0, 1.0, OperatorKind::Second).unwrap();
        let c = hd.norm_const().unwrap();
        assert_abs_diff_eq!(c, std::f64::consts::E - 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            hd.pdf(0.3),
            (0.3f64).exp() / (std::f64::consts::E - 1.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn hyper_norm_const_matches_quadrature() {
        let cases: Vec<HyperDensityParams> = vec![
            HyperDensityParams::new(
                HyperParams::new(vec![0.5, 1.5], vec![2.0], 0.6, ArgMode::OneMinusX, None)
                    .unwrap(),
                0.5,
                1.5,
                OperatorKind::First,
            )
            .unwrap(),
            HyperDensityParams::new(
                HyperParams::new(
                    vec![1.0],
                    vec![1.5],
                    0.7,
                    ArgMode::Mixed,
                    Some((1.2, 0.8, 1.4)),
                )
                .unwrap(),
                1.0,
                0.75,
                OperatorKind::Second,
            )
            .unwrap(),
            HyperDensityParams::new(
                HyperParams::new(
                    vec![2.0],
                    vec![1.0],
                    0.5,
                    ArgMode::PowerX,
                    Some((2.0, 1.5, 1.0)),
                )
                .unwrap(),
                0.25,
                2.0,
                OperatorKind::Second,
            )
            .unwrap(),
        ];
        for hd in &cases {
            let c = hd.norm_const().unwrap();
            let unnorm = quad::tanh_sinh(
                |x, da, db| {
                    let series =
                        pfq(&hd.hyper.upper, &hd.hyper.lower, hd.hyper.argument(x, db)).unwrap();
                    series.value * da.powf(hd.beta_lambda() - 1.0) * db.powf(hd.alpha - 1.0)
                },
                0.0,
                1.0,
                Tol::default(),
            )
            .unwrap()
            .value;
            assert!(
                (c - unnorm).abs() <= 1e-9 * unnorm,
                "{:?}: closed {c} vs quadrature {unnorm}",
                hd.hyper.mode
            );
        }
    }

    #[test]
    fn hyper_rejects_divergent_setups() {
        // p = q+1 with arg_max >= 1
        assert!(HyperParams::new(vec![1.0, 1.0], vec![2.0], 1.0, ArgMode::X, None).is_err());
        // p > q+1
        assert!(HyperParams::new(vec![1.0, 1.0, 1.0], vec![2.0], 0.5, ArgMode::X, None).is_err());
        // negative parameter
        assert!(HyperParams::new(vec![-1.0], vec![2.0], 0.5, ArgMode::X, None).is_err());
        // missing exponents for power mode
        assert!(HyperParams::new(vec![1.0], vec![2.0], 0.5, ArgMode::PowerX, None).is_err());
    }

    #[test]
    fn registered_densities_normalize() {
        for spec in ["exp1", "gamma:2", "beta1:2,2", "uniform", "pareto:2"] {
            let tf = resolve(spec).unwrap();
            let total = tf.integrate_support(Tol::default()).unwrap();
            assert!((total - 1.0).abs() < 1e-8, "{spec} integrates to {total}");
        }
    }

    #[test]
    fn registration_rejects_unnormalized_density() {
        let bad = TestFunction::new(
            "bad",
            |x| (-x).exp() * 2.0,
            Support::new(0.0, f64::INFINITY),
            Decay::Exponential,
        )
        .density()
        .registered();
        assert!(bad.is_err());
    }

    #[test]
    fn registration_rejects_wrong_mellin() {
        let bad = TestFunction::new(
            "badm",
            |x| (-x).exp(),
            Support::new(0.0, f64::INFINITY),
            Decay::Exponential,
        )
        .with_mellin((0.0, f64::INFINITY), |s| s) // wrong transform
        .density()
        .registered();
        assert!(bad.is_err());
    }

    #[test]
    fn cdf_basics() {
        let u = resolve("uniform").unwrap();
        assert_abs_diff_eq!(u.cdf(0.25).unwrap(), 0.25, epsilon = 1e-9);
        let b = resolve("beta1:2,2").unwrap();
        assert_abs_diff_eq!(b.cdf(0.5).unwrap(), 0.5, epsilon = 1e-9);
        let e = resolve("exp1").unwrap();
        assert_abs_diff_eq!(e.cdf(std::f64::consts::LN_2).unwrap(), 0.5, epsilon = 1e-9);
        assert_eq!(e.cdf(-1.0).unwrap(), 0.0);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for spec in ["beta1:0.5,0.5", "gamma:2", "exp1", "beta1:3,0.75"] {
            let tf = resolve(spec).unwrap();
            for &u in &[1e-6, 0.01, 0.3, 0.5, 0.9, 0.999, 1.0 - 1e-7] {
                let x = tf.quantile(u).unwrap();
                let back = tf.cdf(x).unwrap();
                assert!(
                    (back - u).abs() < 1e-8,
                    "{spec}: quantile({u}) = {x}, cdf back = {back}"
                );
            }
        }
    }

    #[test]
    fn sampler_moments() {
        let u = resolve("uniform").unwrap();
        let n = 100_000;
        let xs = u.sample(n, 42).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let band = 3.0 * (1.0 / 12.0f64).sqrt() / (n as f64).sqrt();
        assert!((mean - 0.5).abs() < band, "uniform mean {mean}");

        let b = resolve("beta1:2,2").unwrap();
        let xs = b.sample(n, 7).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        // Beta(2,2): sd = 1/√20
        let band = 3.0 * (1.0 / 20.0f64).sqrt() / (n as f64).sqrt();
        assert!((mean - 0.5).abs() < band, "beta mean {mean}");

        let e = PathwayParams::new(0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let tf = pathway_density(e, OperatorKind::Second).unwrap();
        let xs = tf.sample(n, 11).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "exp-limit mean {mean}");
    }

    #[test]
    fn sampler_is_deterministic_and_streamed() {
        let e = resolve("exp1").unwrap();
        let a = e.sample_stream(1000, 5, 0).unwrap();
        let b = e.sample_stream(1000, 5, 0).unwrap();
        let c = e.sample_stream(1000, 5, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sampler_ks_against_cdf() {
        // KS distance below the α≈0.01 line 1.63/√n for each kernel family.
        let specs = [
            "beta1:1.5,0.5",
            "gamma:2",
            "exp1",
            "pathway:g=1,d=1,e=1.5,a=1,q=0.5",
            "pathway:g=0.5,d=1,e=4,a=1,q=1.5",
        ];
        let n = 100_000;
        for spec in specs {
            let tf = resolve(spec).unwrap();
            let mut xs = tf.sample(n, 123).unwrap();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut ks: f64 = 0.0;
            for (i, &x) in xs.iter().enumerate() {
                let f = tf.cdf(x).unwrap();
                let lo = i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64;
                ks = ks.max((f - lo).abs()).max((hi - f).abs());
            }
            let threshold = 1.63 / (n as f64).sqrt();
            assert!(ks < threshold, "{spec}: KS {ks} >= {threshold}");
        }
    }

    #[test]
    fn sample_rejects_non_density() {
        let p = resolve("pow:2").unwrap();
        assert!(p.sample(10, 1).is_err());
    }

    #[test]
    fn hyper_density_sampling_works() {
        let hd = parse_hyper("up=1,2;low=2.5;a=0.5;mode=1mx;zeta=1;alpha=1.5;kind=2").unwrap();
        let tf = hyper_density(&hd).unwrap();
        let n = 20_000;
        let mut xs = tf.sample(n, 99).unwrap();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = tf.cdf(x).unwrap();
            ks = ks.max((f - i as f64 / n as f64).abs());
        }
        assert!(ks < 1.63 / (n as f64).sqrt(), "hyper KS {ks}");
    }

    #[test]
    fn registry_parses_and_rejects() {
        assert!(resolve("exp1").is_ok());
        assert!(resolve("beta1:2,2").is_ok());
        assert!(resolve("pathway:g=1,d=1,e=1,a=1,q=0.5").is_ok());
        assert!(resolve("nope").is_err());
        assert!(resolve("beta1:2").is_err());
        assert!(resolve("pathway:g=1").is_err());
    }

    #[test]
    fn mellin_strip_metadata() {
        let e = resolve("exp1").unwrap();
        assert_eq!(e.mellin_strip(), (0.0, f64::INFINITY));
        let p = resolve("pareto:2").unwrap();
        assert_eq!(p.mellin_strip().1, 3.0);
        let g = resolve("gamma:2").unwrap();
        assert_eq!(g.mellin_strip(), (-1.0, f64::INFINITY));
    }
}
