//! Quadrature evaluation of the fractional integral operators: Kober first
//! and second kind, their pathway and hypergeometric generalizations, the
//! Weyl right-sided and Riemann–Liouville left-sided integrals, and the
//! generic product/ratio Mellin convolutions.
//!
//! Every kernel integral is mapped onto (0,1) so the algebraic endpoint
//! singularities (t−u)^{α−1}, v^ζ sit at interval ends where the tanh-sinh
//! rule absorbs them; semi-infinite factors go through the rational map.
//! Operators return the plain operator value where the source defines one
//! (Kober, Weyl, Riemann–Liouville) and the density-normalized g(u) for the
//! kernel-density generalizations; the conversion constants are exposed so
//! either convention is one multiplication away.

use crate::density::{
    Decay, HyperDensityParams, OperatorKind, PathwayParams, PathwayRegime, TestFunction,
};
use crate::error::{Error, Result};
use crate::quad::{self, QuadResult, Tol};
use crate::special::{gamma_ratio, ln_gamma};

/// The pair (ζ, α) indexing a Kober operator of either kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KoberParams {
    pub zeta: f64,
    pub alpha: f64,
}

impl KoberParams {
    pub fn new(zeta: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::domain(format!("alpha must be > 0, got {alpha}")));
        }
        if !zeta.is_finite() {
            return Err(Error::domain("zeta must be finite".to_string()));
        }
        Ok(KoberParams { zeta, alpha })
    }

    fn check_second(&self) -> Result<()> {
        if !(self.zeta > -1.0) {
            return Err(Error::domain(format!(
                "second kind needs zeta > -1, got {}",
                self.zeta
            )));
        }
        Ok(())
    }

    fn check_first(&self) -> Result<()> {
        // zeta = 0 is the boundary case; it is admitted (the integral still
        // converges for integrable f) and the CLI warns about it.
        if !(self.zeta >= 0.0) {
            return Err(Error::domain(format!(
                "first kind needs zeta >= 0, got {}",
                self.zeta
            )));
        }
        Ok(())
    }
}

/// Operator evaluation: value, error estimate from the quadrature
/// refinement, and the number of integrand evaluations spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub nodes_used: usize,
}

impl OperatorResult {
    const ZERO: OperatorResult =
        OperatorResult { value: 0.0, abs_error_estimate: 0.0, nodes_used: 0 };

    fn scaled(q: QuadResult<f64>, c: f64) -> Self {
        OperatorResult {
            value: c * q.value,
            abs_error_estimate: c.abs() * q.abs_error,
            nodes_used: q.evals,
        }
    }
}

/// Density-convention constant of the second kind: g(u) = const · K_u f.
pub fn kober_second_density_const(p: KoberParams) -> Result<f64> {
    p.check_second()?;
    gamma_ratio(&[p.alpha + p.zeta + 1.0], &[p.zeta + 1.0])
}

/// Density-convention constant of the first kind: g(u) = const · I_u f.
pub fn kober_first_density_const(p: KoberParams) -> Result<f64> {
    if !(p.zeta > 0.0) {
        return Err(Error::domain(format!(
            "density constant of the first kind needs zeta > 0, got {}",
            p.zeta
        )));
    }
    gamma_ratio(&[p.zeta + p.alpha], &[p.zeta])
}

fn check_decay_at_infinity(f: &TestFunction, power_needed: f64, what: &str) -> Result<()> {
    if f.support.hi.is_finite() {
        return Ok(());
    }
    match f.decay {
        Decay::Exponential | Decay::Compact => Ok(()),
        Decay::Power(p) => {
            if p > power_needed {
                Ok(())
            } else {
                Err(Error::Decay(format!(
                    "{what}: integrand needs f ~ t^-p with p > {power_needed}, got p = {p}"
                )))
            }
        }
    }
}

/// ∫ over (xlo, xhi) ⊆ (0,1) of x^{px} (1−x)^{pq} g(x) dx, split at the
/// given interior breakpoints, with both power factors computed from the
/// exact endpoint distances.
fn beta_weighted_integral<G>(
    px: f64,
    pq: f64,
    g: G,
    xlo: f64,
    xhi: f64,
    breaks: &[f64],
    tol: Tol,
) -> Result<QuadResult<f64>>
where
    G: Fn(f64, f64, f64) -> f64,
{
    if !(xlo < xhi) {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, evals: 0 });
    }
    let mut pts = vec![xlo];
    for &b in breaks {
        if b > xlo && b < xhi {
            pts.push(b);
        }
    }
    pts.push(xhi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let piece_tol = tol.tighter(1.0 / (pts.len() - 1) as f64);
    let mut total = QuadResult { value: 0.0, abs_error: 0.0, evals: 0 };
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let r = quad::tanh_sinh(
            |x, da, db| {
                let d0 = if a == 0.0 { da } else { x };
                let d1 = if b == 1.0 { db } else { 1.0 - x };
                if d0 <= 0.0 || d1 <= 0.0 {
                    return 0.0;
                }
                let gv = g(x, d0, d1);
                if gv == 0.0 {
                    return 0.0;
                }
                d0.powf(px) * d1.powf(pq) * gv
            },
            a,
            b,
            piece_tol,
        )?;
        total.value += r.value;
        total.abs_error += r.abs_error;
        total.evals += r.evals;
    }
    Ok(total)
}

/// Kober operator of the second kind,
/// K_u f = (u^ζ/Γ(α)) ∫_u^∞ (t−u)^{α−1} t^{−ζ−α} f(t) dt,
/// evaluated as (1/Γ(α)) ∫₀¹ x^{ζ−1}(1−x)^{α−1} f(u/x) dx.
pub fn kober_second(
    f: &TestFunction,
    p: KoberParams,
    u: f64,
    tol: Tol,
) -> Result<OperatorResult> {
    p.check_second()?;
    if !(u > 0.0) {
        return Err(Error::domain(format!("u must be > 0, got {u}")));
    }
    check_decay_at_infinity(f, -p.zeta, "kober_second")?;
    // x = u/t: f's support (lo, hi) maps to x ∈ (u/hi, u/lo)
    let xlo = if f.support.hi.is_finite() { (u / f.support.hi).min(1.0) } else { 0.0 };
    let xhi = if f.support.lo > 0.0 { (u / f.support.lo).min(1.0) } else { 1.0 };
    let inv_gamma_alpha = (-ln_gamma(p.alpha)?).exp();
    let r = beta_weighted_integral(
        p.zeta - 1.0,
        p.alpha - 1.0,
        |_x, d0, _d1| f.eval(u / d0),
        xlo,
        xhi,
        &[],
        tol,
    )?;
    Ok(OperatorResult::scaled(r, inv_gamma_alpha))
}

/// Kober operator of the first kind,
/// I_u f = (u^{−ζ−α}/Γ(α)) ∫₀^u (u−v)^{α−1} v^ζ f(v) dv,
/// evaluated as (1/Γ(α)) ∫₀¹ x^ζ(1−x)^{α−1} f(ux) dx for u near f's scale
/// and directly in v when u is far above it (the x-map would squeeze f into
/// an unresolvable boundary layer and lose all relative accuracy).
pub fn kober_first(f: &TestFunction, p: KoberParams, u: f64, tol: Tol) -> Result<OperatorResult> {
    p.check_first()?;
    if !(u > 0.0) {
        return Err(Error::domain(format!("u must be > 0, got {u}")));
    }
    if u > FIRST_KIND_DIRECT_ABOVE * f.support.lo.max(1.0) {
        let r = first_kind_direct(
            f,
            u,
            u,
            p.zeta,
            p.alpha - 1.0,
            -1.0,
            -ln_gamma(p.alpha)?,
            |_x, _omx| 1.0,
            tol,
        )?;
        return Ok(OperatorResult::scaled(r, 1.0));
    }
    let xlo = (f.support.lo / u).max(0.0);
    let xhi = if f.support.hi.is_finite() { (f.support.hi / u).min(1.0) } else { 1.0 };
    let inv_gamma_alpha = (-ln_gamma(p.alpha)?).exp();
    let r = beta_weighted_integral(
        p.zeta,
        p.alpha - 1.0,
        |_x, d0, _d1| f.eval(u * d0),
        xlo,
        xhi,
        &[],
        tol,
    )?;
    Ok(OperatorResult::scaled(r, inv_gamma_alpha))
}

const FIRST_KIND_DIRECT_ABOVE: f64 = 8.0;

/// First-kind kernel integral evaluated directly in v:
/// exp(px·ln(v/u) + pq·ln((v_cap−v)/u) + cu·ln u + ln_pre) · extra(v/u, ·) · f(v)
/// over supp(f) ∩ (0, v_cap), split at f's unit scale and u/2 (`v_cap` is u
/// for the (u−v)^{α−1} kernels, the kernel support edge otherwise).
fn first_kind_direct<G>(
    f: &TestFunction,
    u: f64,
    v_cap: f64,
    px: f64,
    pq: f64,
    cu: f64,
    ln_pre: f64,
    extra: G,
    tol: Tol,
) -> Result<QuadResult<f64>>
where
    G: Fn(f64, f64) -> f64,
{
    let vlo = f.support.lo.max(0.0);
    let mut vhi = if f.support.hi.is_finite() { f.support.hi.min(v_cap) } else { v_cap };
    if !(vlo < vhi) {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, evals: 0 });
    }
    let mut pts = vec![vlo];
    if !f.support.hi.is_finite() {
        match f.decay {
            // cap the range where f has numerically died; otherwise its mass
            // occupies a microscopic window of a gigantic interval
            Decay::Exponential | Decay::Compact => {
                let mut t = (vlo + 1.0).max(1.0);
                while t < vhi && f.eval(t).abs() > 1e-300 {
                    t *= 2.0;
                }
                vhi = vhi.min(t);
            }
            // power tails carry mass at every scale: ladder of breakpoints
            Decay::Power(_) => {
                let mut b = (vlo + 1.0).max(1.0) * 10.0;
                while b < 0.5 * vhi && pts.len() < 40 {
                    pts.push(b);
                    b *= 10.0;
                }
            }
        }
    }
    for b in [vlo + 1.0, 0.5 * u] {
        if b > vlo && b < vhi {
            pts.push(b);
        }
    }
    pts.push(vhi);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    // The u-power and constant prefactors are applied after integration so
    // the node values stay O(1) and the absolute tolerance keeps meaning.
    let base = cu * u.ln() + ln_pre;
    let scale = base.exp();
    let piece_tol = tol.tighter(1.0 / (pts.len() - 1) as f64);
    let mut total = QuadResult { value: 0.0, abs_error: 0.0, evals: 0 };
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let r = quad::tanh_sinh(
            |v, da, db| {
                let dv0 = if a == vlo && vlo == 0.0 { da } else { v };
                let duv = if b == v_cap { db } else { v_cap - v };
                if dv0 <= 0.0 || duv <= 0.0 {
                    return 0.0;
                }
                let flo = if a == f.support.lo { da } else { v - f.support.lo };
                let fhi = if !f.support.hi.is_finite() {
                    f64::INFINITY
                } else if b == f.support.hi {
                    db
                } else {
                    f.support.hi - v
                };
                let fv = f.eval_at(v, flo, fhi);
                if fv == 0.0 {
                    return 0.0;
                }
                let x = v / u;
                let omx = duv / u;
                let ex = extra(x, omx);
                let m = fv * ex;
                if m == 0.0 {
                    return 0.0;
                }
                let ln_val = px * (dv0 / u).ln() + pq * omx.ln() + m.abs().ln();
                if ln_val < -745.0 || !ln_val.is_finite() {
                    return 0.0;
                }
                ln_val.exp() * m.signum()
            },
            a,
            b,
            piece_tol,
        )?;
        total.value += r.value;
        total.abs_error += r.abs_error;
        total.evals += r.evals;
    }
    total.value *= scale;
    total.abs_error *= scale;
    Ok(total)
}

/// Pathway-generalized operator of the second kind; returns the
/// density-normalized g(u) (kernel constant included).
pub fn pathway_second(
    f: &TestFunction,
    p: PathwayParams,
    u: f64,
    tol: Tol,
) -> Result<OperatorResult> {
    pathway_op(f, p, u, OperatorKind::Second, tol)
}

/// Pathway-generalized operator of the first kind (density convention).
pub fn pathway_first(
    f: &TestFunction,
    p: PathwayParams,
    u: f64,
    tol: Tol,
) -> Result<OperatorResult> {
    pathway_op(f, p, u, OperatorKind::First, tol)
}

pub(crate) fn pathway_op(
    f: &TestFunction,
    p: PathwayParams,
    u: f64,
    kind: OperatorKind,
    tol: Tol,
) -> Result<OperatorResult> {
    p.validate(kind)?;
    if !(u > 0.0) {
        return Err(Error::domain(format!("u must be > 0, got {u}")));
    }
    let (c, c_star) = p.norm_consts(kind)?;
    let e = p.exponent(kind);
    let (delta, a, q, eta) = (p.delta, p.a, p.q, p.eta);
    match (kind, p.regime()) {
        // g = c [a(1−q)]^{−γ/δ} (1/δ) ∫₀¹ y^{γ/δ−1}(1−y)^{η/(1−q)} f(L y^{−1/δ}) dy,
        // with y = (L/v)^δ and L = u[a(1−q)]^{1/δ}
        (OperatorKind::Second, PathwayRegime::Less) => {
            check_decay_at_infinity(f, -e, "pathway_second")?;
            let b = eta / (1.0 - q);
            let l = u * (a * (1.0 - q)).powf(1.0 / delta);
            let ylo = if f.support.hi.is_finite() {
                (l / f.support.hi).powf(delta).min(1.0)
            } else {
                0.0
            };
            let yhi = if f.support.lo > 0.0 {
                (l / f.support.lo).powf(delta).min(1.0)
            } else {
                1.0
            };
            let r = beta_weighted_integral(
                e / delta - 1.0,
                b,
                |_y, d0, _d1| f.eval(l * d0.powf(-1.0 / delta)),
                ylo,
                yhi,
                &[],
                tol,
            )?;
            let scale = c * (a * (1.0 - q)).powf(-e / delta) / delta;
            Ok(OperatorResult::scaled(r, scale))
        }
        // g = u^{−e−2} ∫ v^{e+1} [1−a(1−q)(v/u)^δ]^{η/(1−q)} f(v) dv (the
        // ratio Jacobian adds one power of v), mapped by w = a(1−q)(v/u)^δ:
        // g = c Q^{e+2}(1/δ) ∫₀^{w_hi} w^{(e+2)/δ−1}(1−w)^{η/(1−q)} f(uQ w^{1/δ}) dw
        (OperatorKind::First, PathwayRegime::Less) => {
            let b = eta / (1.0 - q);
            let qq = (a * (1.0 - q)).powf(-1.0 / delta);
            if u > FIRST_KIND_DIRECT_ABOVE * f.support.lo.max(1.0) {
                // direct in v: the w-map squeezes f into a boundary layer
                let r = first_kind_direct(
                    f,
                    u,
                    u * qq,
                    e + 1.0,
                    0.0,
                    -1.0,
                    c.ln(),
                    |x, _omx| {
                        let w = a * (1.0 - q) * x.powf(delta);
                        if w >= 1.0 {
                            0.0
                        } else {
                            (b * (-w).ln_1p()).exp()
                        }
                    },
                    tol,
                )?;
                return Ok(OperatorResult::scaled(r, 1.0));
            }
            let whi = if f.support.hi.is_finite() {
                (f.support.hi / (u * qq)).powf(delta).min(1.0)
            } else {
                1.0
            };
            let wlo = if f.support.lo > 0.0 {
                (f.support.lo / (u * qq)).powf(delta).min(1.0)
            } else {
                0.0
            };
            let r = beta_weighted_integral(
                (e + 2.0) / delta - 1.0,
                b,
                |_w, d0, _d1| f.eval(u * qq * d0.powf(1.0 / delta)),
                wlo,
                whi,
                &[],
                tol,
            )?;
            let scale = c * qq.powf(e + 2.0) / delta;
            Ok(OperatorResult::scaled(r, scale))
        }
        // g = c ∫₀^∞ (1/t)(u/t)^γ [1 + a(q−1)(u/t)^δ]^{−β} f(t) dt
        (OperatorKind::Second, PathwayRegime::Greater) => {
            check_decay_at_infinity(f, -e, "pathway_second")?;
            let beta = eta / (q - 1.0);
            let body = move |t: f64| {
                if t <= 0.0 {
                    return 0.0;
                }
                let fv = f.eval(t);
                if fv == 0.0 {
                    return 0.0;
                }
                let rho = u / t;
                if !rho.is_finite() {
                    return 0.0; // kernel → 0 faster than any power here
                }
                let ln_b = e * rho.ln() - beta * (a * (q - 1.0) * rho.powf(delta)).ln_1p();
                let lnv = ln_b - t.ln() + fv.abs().ln();
                if lnv < -745.0 || !lnv.is_finite() {
                    return 0.0;
                }
                lnv.exp() * fv.signum()
            };
            let r = integrate_positive_axis(f, body, &[u], tol)?;
            Ok(OperatorResult::scaled(r, c))
        }
        // g = c u^{−e−2} ∫₀^∞ v^{e+1} [1 + a(q−1)(v/u)^δ]^{−η/(q−1)} f(v) dv
        // g = c u^{−e−2} ∫₀^∞ v^{e+1} [1 + a(q−1)(v/u)^δ]^{−β} f(v) dv; the
        // u-power is applied after integration so node values stay O(1)
        (OperatorKind::First, PathwayRegime::Greater) => {
            let beta = eta / (q - 1.0);
            check_decay_at_infinity(f, e + 2.0 - delta * beta, "pathway_first")?;
            let body = move |v: f64| {
                if v <= 0.0 {
                    return 0.0;
                }
                let fv = f.eval(v);
                if fv == 0.0 {
                    return 0.0;
                }
                let rho = v / u;
                if !rho.is_finite() {
                    return 0.0;
                }
                let lnv = (e + 1.0) * v.ln()
                    - beta * (a * (q - 1.0) * rho.powf(delta)).ln_1p()
                    + fv.abs().ln();
                if lnv < -745.0 || !lnv.is_finite() {
                    return 0.0;
                }
                lnv.exp() * fv.signum()
            };
            let r = integrate_positive_axis(f, body, &[u], tol)?;
            Ok(OperatorResult::scaled(r, c * (-(e + 2.0) * u.ln()).exp()))
        }
        // g = c* u^γ ∫₀^∞ v^{−γ−1} e^{−aη(u/v)^δ} f(v) dv (second kind)
        (OperatorKind::Second, PathwayRegime::Limit) => {
            check_decay_at_infinity(f, -e, "pathway_second")?;
            let body = move |v: f64| {
                if v <= 0.0 {
                    return 0.0;
                }
                let fv = f.eval(v);
                if fv == 0.0 {
                    return 0.0;
                }
                let rho = u / v;
                if !rho.is_finite() {
                    return 0.0;
                }
                let ln_b = e * rho.ln() - a * eta * rho.powf(delta) - v.ln();
                let lnv = ln_b + fv.abs().ln();
                if lnv < -745.0 || !lnv.is_finite() {
                    return 0.0;
                }
                lnv.exp() * fv.signum()
            };
            let r = integrate_positive_axis(f, body, &[u], tol)?;
            Ok(OperatorResult::scaled(r, c_star))
        }
        // g = c* u^{−e−2} ∫₀^∞ v^{e+1} e^{−aη(v/u)^δ} f(v) dv (first kind);
        // the u-power is applied after integration
        (OperatorKind::First, PathwayRegime::Limit) => {
            let body = move |v: f64| {
                if v <= 0.0 {
                    return 0.0;
                }
                let fv = f.eval(v);
                if fv == 0.0 {
                    return 0.0;
                }
                let rho = v / u;
                if !rho.is_finite() {
                    return 0.0;
                }
                let lnv = (e + 1.0) * v.ln() - a * eta * rho.powf(delta) + fv.abs().ln();
                if lnv < -745.0 || !lnv.is_finite() {
                    return 0.0;
                }
                lnv.exp() * fv.signum()
            };
            let r = integrate_positive_axis(f, body, &[u], tol)?;
            Ok(OperatorResult::scaled(r, c_star * (-(e + 2.0) * u.ln()).exp()))
        }
    }
}

/// Integrates `body` over the intersection of (0, ∞) with f's support,
/// splitting at the support edges and the supplied scale points.
///
/// Unbounded supports are capped at f's numerical extinction (exponential
/// decay) or laddered through the decades (power decay) so the live region
/// never becomes a microscopic window of one huge interval.
fn integrate_positive_axis<F>(
    f: &TestFunction,
    body: F,
    scales: &[f64],
    tol: Tol,
) -> Result<QuadResult<f64>>
where
    F: Fn(f64) -> f64 + Copy,
{
    let lo = f.support.lo;
    let hi = f.support.hi;
    let mut total = QuadResult { value: 0.0, abs_error: 0.0, evals: 0 };
    if hi.is_finite() {
        let mut pts: Vec<f64> = scales.iter().copied().filter(|&s| s > lo && s < hi).collect();
        pts.push(lo);
        pts.push(hi);
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        let piece_tol = tol.tighter(1.0 / (pts.len() - 1) as f64);
        for w in pts.windows(2) {
            let r = quad::tanh_sinh(|x, _, _| body(x), w[0], w[1], piece_tol)?;
            total.value += r.value;
            total.abs_error += r.abs_error;
            total.evals += r.evals;
        }
    } else {
        let mut cap = f64::INFINITY;
        let mut ladder: Vec<f64> = Vec::new();
        match f.decay {
            Decay::Exponential | Decay::Compact => {
                let mut t = (lo + 1.0).max(1.0);
                while f.eval(t).abs() > 1e-300 && t < 1e300 {
                    t *= 2.0;
                }
                cap = t;
            }
            Decay::Power(_) => {
                let mut b = (lo + 1.0).max(1.0) * 10.0;
                let top = scales.iter().copied().fold(1.0f64, f64::max) * 10.0;
                while b < top && ladder.len() < 40 {
                    ladder.push(b);
                    b *= 10.0;
                }
            }
        }
        let mut pts: Vec<f64> =
            scales.iter().chain(ladder.iter()).copied().filter(|&s| s > lo && s < cap).collect();
        pts.push(lo + 1.0);
        if cap.is_finite() {
            pts.push(cap);
        }
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        let piece_tol = tol.tighter(1.0 / (pts.len() + 1) as f64);
        let head = quad::tanh_sinh(|x, _, _| body(x), lo, pts[0], piece_tol)?;
        total.value += head.value;
        total.abs_error += head.abs_error;
        total.evals += head.evals;
        for w in pts.windows(2) {
            let r = quad::tanh_sinh(|x, _, _| body(x), w[0], w[1], piece_tol)?;
            total.value += r.value;
            total.abs_error += r.abs_error;
            total.evals += r.evals;
        }
        // beyond the extinction cap the integrand carries f < 1e-300: skip
        if !cap.is_finite() {
            let tail = quad::tanh_sinh_upper(body, *pts.last().unwrap(), piece_tol)?;
            total.value += tail.value;
            total.abs_error += tail.abs_error;
            total.evals += tail.evals;
        }
    }
    Ok(total)
}

/// Hypergeometric-generalized operator of the second kind (density g(u)):
/// g = (1/C) ∫₀¹ x^{ζ−1}(1−x)^{α−1} pFq(arg(x)) f(u/x) dx.
pub fn hyper_second(
    f: &TestFunction,
    hd: &HyperDensityParams,
    u: f64,
    tol: Tol,
) -> Result<OperatorResult> {
    if hd.kind != OperatorKind::Second {
        return Err(Error::domain("hyper_second requires kind = Second".to_string()));
    }
    hyper_op(f, hd, u, None, tol)
}

/// Hypergeometric-generalized operator of the first kind (density g(u)):
/// g = (1/C) ∫₀¹ x^ζ(1−x)^{α−1} pFq(arg(x)) f(ux) dx.
pub fn hyper_first(
    f: &TestFunction,
    hd: &HyperDensityParams,
    u: f64,
    tol: Tol,
) -> Result<OperatorResult> {
    if hd.kind != OperatorKind::First {
        return Err(Error::domain("hyper_first requires kind = First".to_string()));
    }
    hyper_op(f, hd, u, None, tol)
}

/// Same as the hyper operators with the kernel series truncated at k ≤ cap;
/// pairs with the sum of shifted Kober integrals in the series-exchange
/// cross-checks.
pub fn hyper_capped(
    f: &TestFunction,
    hd: &HyperDensityParams,
    u: f64,
    cap: usize,
    tol: Tol,
) -> Result<OperatorResult> {
    hyper_op(f, hd, u, Some(cap), tol)
}

fn hyper_op(
    f: &TestFunction,
    hd: &HyperDensityParams,
    u: f64,
    cap: Option<usize>,
    tol: Tol,
) -> Result<OperatorResult> {
    if !(u > 0.0) {
        return Err(Error::domain(format!("u must be > 0, got {u}")));
    }
    if hd.kind == OperatorKind::Second {
        check_decay_at_infinity(f, -hd.zeta, "hyper_second")?;
    }
    let c = hd.norm_const()?;
    let coefs: Option<Vec<f64>> = cap.map(|k| (0..=k).map(|i| hd.hyper.coef(i)).collect());
    let series = |arg: f64| -> f64 {
        match &coefs {
            Some(cs) => {
                let mut zp = 1.0;
                let mut s = 0.0;
                for &ck in cs {
                    s += ck * zp;
                    zp *= arg;
                }
                s
            }
            None => crate::special::pfq(&hd.hyper.upper, &hd.hyper.lower, arg)
                .map(|v| v.value)
                .unwrap_or(f64::NAN),
        }
    };
    let second = hd.kind == OperatorKind::Second;
    if !second && u > FIRST_KIND_DIRECT_ABOVE * f.support.lo.max(1.0) {
        let r = first_kind_direct(
            f,
            u,
            u,
            hd.zeta,
            hd.alpha - 1.0,
            -1.0,
            -c.ln(),
            |x, omx| series(hd.hyper.argument(x, omx)),
            tol,
        )?;
        return Ok(OperatorResult::scaled(r, 1.0));
    }
    let px = if second { hd.zeta - 1.0 } else { hd.zeta };
    let (xlo, xhi) = if second {
        (
            if f.support.hi.is_finite() { (u / f.support.hi).min(1.0) } else { 0.0 },
            if f.support.lo > 0.0 { (u / f.support.lo).min(1.0) } else { 1.0 },
        )
    } else {
        (
            (f.support.lo / u).max(0.0),
            if f.support.hi.is_finite() { (f.support.hi / u).min(1.0) } else { 1.0 },
        )
    };
    let r = beta_weighted_integral(
        px,
        hd.alpha - 1.0,
        |_x, d0, d1| {
            let fv = if second { f.eval(u / d0) } else { f.eval(u * d0) };
            if fv == 0.0 {
                return 0.0;
            }
            series(hd.hyper.argument(d0, d1)) * fv
        },
        xlo,
        xhi,
        &[],
        tol,
    )?;
    Ok(OperatorResult::scaled(r, 1.0 / c))
}

/// Right-sided Weyl fractional integral of order α:
/// (1/Γ(α)) ∫_x^∞ (t−x)^{α−1} f(t) dt.
pub fn weyl_right(f: &TestFunction, alpha: f64, x: f64, tol: Tol) -> Result<OperatorResult> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be > 0, got {alpha}")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("x must be >= 0, got {x}")));
    }
    check_decay_at_infinity(f, alpha, "weyl_right")?;
    let inv_gamma_alpha = (-ln_gamma(alpha)?).exp();
    // substitute s = t − x
    let s_lo = (f.support.lo - x).max(0.0);
    let s_hi = if f.support.hi.is_finite() { f.support.hi - x } else { f64::INFINITY };
    if s_hi <= s_lo {
        return Ok(OperatorResult::ZERO);
    }
    let mid = if s_hi.is_finite() { s_hi.min(s_lo.max(x.max(1.0))) } else { s_lo.max(x.max(1.0)) };
    let mut total = QuadResult { value: 0.0, abs_error: 0.0, evals: 0 };
    if mid > s_lo {
        let r = quad::tanh_sinh(
            |s, da, _db| {
                let sd = if s_lo == 0.0 { da } else { s };
                if sd <= 0.0 {
                    return 0.0;
                }
                let fv = f.eval(x + sd);
                if fv == 0.0 {
                    return 0.0;
                }
                sd.powf(alpha - 1.0) * fv
            },
            s_lo,
            mid,
            tol,
        )?;
        total.value += r.value;
        total.abs_error += r.abs_error;
        total.evals += r.evals;
    }
    if s_hi.is_finite() {
        if s_hi > mid {
            let r = quad::tanh_sinh(
                |s, _, _| {
                    let fv = f.eval(x + s);
                    if fv == 0.0 {
                        return 0.0;
                    }
                    s.powf(alpha - 1.0) * fv
                },
                mid,
                s_hi,
                tol,
            )?;
            total.value += r.value;
            total.abs_error += r.abs_error;
            total.evals += r.evals;
        }
    } else {
        let r = quad::tanh_sinh_upper(
            |s| {
                let fv = f.eval(x + s);
                if fv == 0.0 {
                    return 0.0;
                }
                let lnv = (alpha - 1.0) * s.ln() + fv.abs().ln();
                if lnv < -745.0 || !lnv.is_finite() {
                    return 0.0;
                }
                lnv.exp() * fv.signum()
            },
            mid,
            tol,
        )?;
        total.value += r.value;
        total.abs_error += r.abs_error;
        total.evals += r.evals;
    }
    Ok(OperatorResult::scaled(total, inv_gamma_alpha))
}

/// Left-sided Riemann–Liouville fractional integral of order α:
/// (1/Γ(α)) ∫₀^x (x−v)^{α−1} f(v) dv = (x^α/Γ(α)) ∫₀¹ (1−w)^{α−1} f(xw) dw.
pub fn rl_left(f: &TestFunction, alpha: f64, x: f64, tol: Tol) -> Result<OperatorResult> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be > 0, got {alpha}")));
    }
    if !(x > 0.0) {
        return Err(Error::domain(format!("x must be > 0, got {x}")));
    }
    if x > FIRST_KIND_DIRECT_ABOVE * f.support.lo.max(1.0) {
        // fold the x^α prefactor into the nodes: the abs tolerance must
        // apply to the returned value, not to a prefactored-down integral
        let r = first_kind_direct(
            f,
            x,
            x,
            0.0,
            alpha - 1.0,
            alpha - 1.0,
            -ln_gamma(alpha)?,
            |_x, _omx| 1.0,
            tol,
        )?;
        return Ok(OperatorResult::scaled(r, 1.0));
    }
    let wlo = (f.support.lo / x).max(0.0);
    let whi = if f.support.hi.is_finite() { (f.support.hi / x).min(1.0) } else { 1.0 };
    let scale = (alpha * x.ln() - ln_gamma(alpha)?).exp();
    let r = beta_weighted_integral(
        0.0,
        alpha - 1.0,
        |_w, d0, _d1| f.eval(x * d0),
        wlo,
        whi,
        &[],
        tol,
    )?;
    Ok(OperatorResult::scaled(r, scale))
}

/// Density of the product u = x₁x₂ (product Mellin convolution):
/// g(u) = ∫ (1/x) f₁(x) f₂(u/x) dx over the support overlap.
pub fn product_density(
    f1: &TestFunction,
    f2: &TestFunction,
    u: f64,
    tol: Tol,
) -> Result<OperatorResult> {
    if !(u > 0.0) {
        return Err(Error::domain(format!("u must be > 0, got {u}")));
    }
    // x ranges over supp(f1) ∩ u/supp(f2)
    let xlo = f1
        .support
        .lo
        .max(if f2.support.hi.is_finite() { u / f2.support.hi } else { 0.0 });
    let xhi = if f2.support.lo > 0.0 {
        let cap = u / f2.support.lo;
        if f1.support.hi.is_finite() { f1.support.hi.min(cap) } else { cap }
    } else {
        f1.support.hi
    };
    if !(xlo < xhi) {
        return Ok(OperatorResult::ZERO);
    }
    let body = |x: f64, da: f64, db: f64, a: f64, b: f64| -> f64 {
        // exact distances for f1 at its own edges
        let d1lo = if a == f1.support.lo { da } else { x - f1.support.lo };
        let d1hi = if f1.support.hi.is_finite() {
            if b == f1.support.hi {
                db
            } else {
                f1.support.hi - x
            }
        } else {
            f64::INFINITY
        };
        let v1 = f1.eval_at(x, d1lo, d1hi);
        if v1 == 0.0 {
            return 0.0;
        }
        // t = u/x; distances to f2's edges via the endpoint images:
        // t − f2.lo = u(b − x)/(bx), f2.hi − t = u(x − a)/(ax)
        let t = u / x;
        let d2lo = if f2.support.lo > 0.0 && b == u / f2.support.lo {
            u * db / (b * x)
        } else {
            t - f2.support.lo
        };
        let d2hi = if f2.support.hi.is_finite() {
            if a == u / f2.support.hi {
                u * da / (a * x)
            } else {
                f2.support.hi - t
            }
        } else {
            f64::INFINITY
        };
        let v2 = f2.eval_at(t, d2lo, d2hi);
        if v2 == 0.0 {
            return 0.0;
        }
        v1 * v2 / x
    };
    piecewise_with_edges(body, xlo, xhi, &[u, 1.0], tol)
}

/// Density of the ratio u = x₂/x₁ (ratio Mellin convolution):
/// g(u) = ∫ f₁(x) f₂(ux) x dx over the support overlap.
pub fn ratio_density(
    f1: &TestFunction,
    f2: &TestFunction,
    u: f64,
    tol: Tol,
) -> Result<OperatorResult> {
    if !(u > 0.0) {
        return Err(Error::domain(format!("u must be > 0, got {u}")));
    }
    if u > FIRST_KIND_DIRECT_ABOVE && !f2.support.hi.is_finite() {
        // integrate in f2's own variable t = ux: g = ∫ f1(t/u) f2(t) t/u² dt;
        // for u far above f2's scale the x-form squeezes everything into an
        // x ~ 1/u layer whose value is only coarsely resolved
        return ratio_density_tform(f1, f2, u, tol);
    }
    // x ranges over supp(f1) ∩ supp(f2)/u
    let xlo = f1.support.lo.max(f2.support.lo / u);
    let xhi = {
        let cap = if f2.support.hi.is_finite() { f2.support.hi / u } else { f64::INFINITY };
        if f1.support.hi.is_finite() { f1.support.hi.min(cap) } else { cap }
    };
    if !(xlo < xhi) {
        return Ok(OperatorResult::ZERO);
    }
    let body = |x: f64, da: f64, db: f64, a: f64, b: f64| -> f64 {
        let d1lo = if a == f1.support.lo { da } else { x - f1.support.lo };
        let d1hi = if f1.support.hi.is_finite() {
            if b == f1.support.hi {
                db
            } else {
                f1.support.hi - x
            }
        } else {
            f64::INFINITY
        };
        let v1 = f1.eval_at(x, d1lo, d1hi);
        if v1 == 0.0 {
            return 0.0;
        }
        let t = u * x;
        let d2lo = if f2.support.lo > 0.0 && a == f2.support.lo / u {
            u * da
        } else {
            t - f2.support.lo
        };
        let d2hi = if f2.support.hi.is_finite() {
            if b == f2.support.hi / u {
                u * db
            } else {
                f2.support.hi - t
            }
        } else {
            f64::INFINITY
        };
        let v2 = f2.eval_at(t, d2lo, d2hi);
        if v2 == 0.0 {
            return 0.0;
        }
        v1 * v2 * x
    };
    piecewise_with_edges(body, xlo, xhi, &[1.0, 1.0 / u], tol)
}

/// Ratio density in f2's variable: g(u) = ∫ f₁(t/u) f₂(t) (t/u²) dt over
/// supp(f2) ∩ u·supp(f1).
fn ratio_density_tform(
    f1: &TestFunction,
    f2: &TestFunction,
    u: f64,
    tol: Tol,
) -> Result<OperatorResult> {
    let tlo = f2.support.lo.max(u * f1.support.lo);
    let thi = if f1.support.hi.is_finite() {
        let cap = u * f1.support.hi;
        if f2.support.hi.is_finite() { f2.support.hi.min(cap) } else { cap }
    } else {
        f2.support.hi
    };
    if !(tlo < thi) {
        return Ok(OperatorResult::ZERO);
    }
    // Normalize by the kernel's leading power near zero so the node values
    // stay O(1): f1(t/u) ~ C (t/u)^{λ−1} with λ = lo_exponent + 1, so the
    // integrand carries u^{λ−1} inside and the result is scaled by
    // u^{−(λ+1)} afterwards.
    let lam1 = f1.lo_exponent + 1.0;
    let inner_pow = ((lam1 - 1.0) * u.ln()).exp();
    let outer_scale = (-(lam1 + 1.0) * u.ln()).exp();
    if !inner_pow.is_finite() || outer_scale == 0.0 {
        // the density value itself is far below f64 range out here
        return Ok(OperatorResult::ZERO);
    }
    // cap at f2's numerical extinction / ladder power tails, as in
    // first_kind_direct: the mass must not shrink to a microscopic window
    // of a gigantic interval
    let mut thi = thi;
    let mut scales = vec![tlo + 1.0, u];
    if !f2.support.hi.is_finite() {
        match f2.decay {
            crate::density::Decay::Exponential | crate::density::Decay::Compact => {
                let mut t = (tlo + 1.0).max(1.0);
                while t < thi && f2.eval(t).abs() > 1e-300 {
                    t *= 2.0;
                }
                thi = thi.min(t);
            }
            crate::density::Decay::Power(_) => {
                let mut b = (tlo + 1.0).max(1.0) * 10.0;
                while b < 0.5 * thi && scales.len() < 40 {
                    scales.push(b);
                    b *= 10.0;
                }
            }
        }
    }
    let body = |t: f64, da: f64, db: f64, a: f64, b: f64| -> f64 {
        let d2lo = if a == f2.support.lo { da } else { t - f2.support.lo };
        let d2hi = if f2.support.hi.is_finite() {
            if b == f2.support.hi {
                db
            } else {
                f2.support.hi - t
            }
        } else {
            f64::INFINITY
        };
        let v2 = f2.eval_at(t, d2lo, d2hi);
        if v2 == 0.0 {
            return 0.0;
        }
        let x = t / u;
        // t/u − f1.lo = da/u at the lower image point, etc.
        let d1lo = if f1.support.lo > 0.0 && a == u * f1.support.lo {
            da / u
        } else {
            x - f1.support.lo
        };
        let d1hi = if f1.support.hi.is_finite() {
            if b == u * f1.support.hi {
                db / u
            } else {
                f1.support.hi - x
            }
        } else {
            f64::INFINITY
        };
        let v1 = f1.eval_at(x, d1lo, d1hi);
        if v1 == 0.0 {
            return 0.0;
        }
        v1 * inner_pow * v2 * t
    };
    let mut r = piecewise_with_edges(body, tlo, thi, &scales, tol)?;
    r.value *= outer_scale;
    r.abs_error_estimate *= outer_scale;
    Ok(r)
}

/// Piecewise integration over (xlo, xhi) where the integrand receives the
/// current piece bounds so it can route exact edge distances to the factors.
fn piecewise_with_edges<F>(
    body: F,
    xlo: f64,
    xhi: f64,
    scales: &[f64],
    tol: Tol,
) -> Result<OperatorResult>
where
    F: Fn(f64, f64, f64, f64, f64) -> f64 + Copy,
{
    let mut total = QuadResult { value: 0.0, abs_error: 0.0, evals: 0 };
    if xhi.is_finite() {
        let mut pts = vec![xlo];
        for &s in scales {
            if s > xlo && s < xhi {
                pts.push(s);
            }
        }
        pts.push(xhi);
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        let piece_tol = tol.tighter(1.0 / (pts.len() - 1) as f64);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let r = quad::tanh_sinh(|x, da, db| body(x, da, db, a, b), a, b, piece_tol)?;
            total.value += r.value;
            total.abs_error += r.abs_error;
            total.evals += r.evals;
        }
    } else {
        let mut pts = vec![xlo];
        for &s in scales {
            if s > xlo && s.is_finite() {
                pts.push(s);
            }
        }
        pts.push(xlo + 1.0);
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        let piece_tol = tol.tighter(1.0 / pts.len() as f64);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let r = quad::tanh_sinh(|x, da, db| body(x, da, db, a, b), a, b, piece_tol)?;
            total.value += r.value;
            total.abs_error += r.abs_error;
            total.evals += r.evals;
        }
        let last = *pts.last().unwrap();
        let r = quad::tanh_sinh_upper(
            |x| body(x, x - xlo, f64::INFINITY, last, f64::INFINITY),
            last,
            piece_tol,
        )?;
        total.value += r.value;
        total.abs_error += r.abs_error;
        total.evals += r.evals;
    }
    Ok(OperatorResult {
        value: total.value,
        abs_error_estimate: total.abs_error,
        nodes_used: total.evals,
    })
}
