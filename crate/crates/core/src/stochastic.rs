//! Monte Carlo verification of the statistical identities: each operator's
//! density-normalized output is the density of a product u = x₁x₂ or ratio
//! u = x₂/x₁ of independent draws, with x₁ from the operator's kernel. The
//! check samples u, integrates the operator output into a model CDF, and
//! gates on the one-sample Kolmogorov–Smirnov statistic at the ≈1% line
//! 1.63/√n.

use crate::density::{self, HyperDensityParams, OperatorKind, PathwayParams, TestFunction};
use crate::error::{Error, Result};
use crate::operator::{self, KoberParams};
use crate::quad::{self, Tol};
use serde::Serialize;
use std::sync::Arc;

/// Binned empirical density/CDF from Monte Carlo samples.
#[derive(Debug, Clone, Serialize)]
pub struct DensityEstimate {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub n: usize,
}

impl DensityEstimate {
    /// Bins the samples; values outside the edges are clamped into the first
    /// or last bin.
    pub fn from_samples(samples: &[f64], bin_edges: Vec<f64>) -> Result<Self> {
        if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("bin edges must be strictly increasing".to_string()));
        }
        if samples.is_empty() {
            return Err(Error::validation("empty sample".to_string()));
        }
        let mut counts = vec![0u64; bin_edges.len() - 1];
        for &x in samples {
            let idx = match bin_edges.binary_search_by(|e| e.partial_cmp(&x).unwrap()) {
                Ok(i) => i.min(counts.len() - 1),
                Err(0) => 0,
                Err(i) => (i - 1).min(counts.len() - 1),
            };
            counts[idx] += 1;
        }
        Ok(DensityEstimate { bin_edges, counts, n: samples.len() })
    }

    /// Histogram density height of bin i.
    pub fn pdf_height(&self, i: usize) -> f64 {
        let w = self.bin_edges[i + 1] - self.bin_edges[i];
        self.counts[i] as f64 / (self.n as f64 * w)
    }

    /// Empirical CDF at the right edge of bin i.
    pub fn cdf_at_edge(&self, i: usize) -> f64 {
        let c: u64 = self.counts[..=i].iter().sum();
        c as f64 / self.n as f64
    }
}

/// Which identity a verification run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremId {
    /// Second-kind Kober operator = product density with a beta(ζ+1, α) kernel.
    T1_1,
    /// First-kind Kober operator = ratio density with a beta(ζ, α) kernel.
    T2_1,
    /// Weyl integral route: product density with a beta(1, α) kernel equals
    /// Γ(α+1)·W^{−α}[t^{−α}f].
    T3_1,
    /// Ratio-convolution route: the model CDF comes from the generic ratio
    /// integral rather than the closed Kober kernel form.
    T3_2,
    Pathway2,
    Pathway1,
    Hyper2,
    Hyper1,
}

impl TheoremId {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "t1.1" | "t1ro1" | "t11" => TheoremId::T1_1,
            "t2.1" | "t21" => TheoremId::T2_1,
            "t3.1" | "t31" => TheoremId::T3_1,
            "t3.2" | "t32" => TheoremId::T3_2,
            "pathway2" => TheoremId::Pathway2,
            "pathway1" => TheoremId::Pathway1,
            "hyper2" => TheoremId::Hyper2,
            "hyper1" => TheoremId::Hyper1,
            other => return Err(Error::validation(format!("unknown theorem '{other}'"))),
        })
    }
}

/// Parameters of the kernel behind a theorem run.
#[derive(Debug, Clone)]
pub enum TheoremParams {
    Kober(KoberParams),
    Weyl { alpha: f64 },
    Pathway(PathwayParams),
    Hyper(HyperDensityParams),
}

/// Options of a verification run.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOpts {
    /// Replace the theorem's constant by 1 (negative control; the model is
    /// then not a density and the KS gate must fail).
    pub unit_constant: bool,
    pub tol: Tol,
    /// Number of model-CDF nodes over the central mass.
    pub nodes: usize,
}

impl Default for VerifyOpts {
    fn default() -> Self {
        VerifyOpts { unit_constant: false, tol: Tol { abs: 1e-9, rel: 1e-8 }, nodes: 300 }
    }
}

/// Outcome of a Monte Carlo verification run.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub theorem: TheoremId,
    pub params: serde_json::Value,
    pub n: usize,
    pub seed: u64,
    pub ks_stat: f64,
    pub ks_threshold: f64,
    pub max_pointwise_gap: f64,
    pub pass: bool,
}

/// n draws of x₁x₂ (product) or x₂/x₁ (ratio) from independent substreams
/// of the seed: x₁ on stream 0, x₂ on stream 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformOp {
    Product,
    Ratio,
}

pub fn mc_transform_sample(
    d1: &TestFunction,
    d2: &TestFunction,
    op: TransformOp,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let x1 = d1.sample_stream(n, seed, 0)?;
    let x2 = d2.sample_stream(n, seed, 1)?;
    Ok(x1
        .iter()
        .zip(&x2)
        .map(|(&a, &b)| match op {
            TransformOp::Product => a * b,
            TransformOp::Ratio => b / a,
        })
        .collect())
}

/// Supremum distance between the empirical CDF of the sample and the model
/// CDF, both one-sided deviations included.
pub fn ks_distance<F>(sample: &[f64], model_cdf: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut xs: Vec<f64> = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = model_cdf(x);
        sup = sup.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    sup
}

/// KS acceptance line at α ≈ 0.01.
pub fn ks_threshold(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

struct TheoremSetup {
    kernel: Arc<TestFunction>,
    f2: Arc<TestFunction>,
    op: TransformOp,
    /// Model density g(u) = constant × operator value.
    model: Box<dyn Fn(f64) -> Result<f64> + Sync>,
    params_json: serde_json::Value,
}

fn setup(
    theorem: TheoremId,
    params: &TheoremParams,
    f2: Arc<TestFunction>,
    opts: &VerifyOpts,
) -> Result<TheoremSetup> {
    let tol = opts.tol;
    let fm = f2.clone();
    match (theorem, params) {
        (TheoremId::T1_1, TheoremParams::Kober(p)) => {
            let p = *p;
            let kernel = density::beta1_density(density::Beta1Params::kober_second_kernel(
                p.zeta, p.alpha,
            )?)?;
            let c = if opts.unit_constant {
                1.0
            } else {
                operator::kober_second_density_const(p)?
            };
            Ok(TheoremSetup {
                kernel,
                f2,
                op: TransformOp::Product,
                model: Box::new(move |u| {
                    Ok(c * operator::kober_second(&fm, p, u, tol)?.value)
                }),
                params_json: serde_json::json!({"zeta": p.zeta, "alpha": p.alpha}),
            })
        }
        (TheoremId::T2_1, TheoremParams::Kober(p)) => {
            let p = *p;
            let kernel = density::beta1_density(density::Beta1Params::kober_first_kernel(
                p.zeta, p.alpha,
            )?)?;
            let c = if opts.unit_constant {
                1.0
            } else {
                operator::kober_first_density_const(p)?
            };
            Ok(TheoremSetup {
                kernel,
                f2,
                op: TransformOp::Ratio,
                model: Box::new(move |u| Ok(c * operator::kober_first(&fm, p, u, tol)?.value)),
                params_json: serde_json::json!({"zeta": p.zeta, "alpha": p.alpha}),
            })
        }
        (TheoremId::T3_1, TheoremParams::Weyl { alpha }) => {
            let alpha = *alpha;
            let kernel = density::beta1_density(density::Beta1Params::new(1.0, alpha)?)?;
            // model: Γ(α+1) W^{−α}[t^{−α} f₂](u), the Weyl reduction of the
            // ζ = 0 product identity
            let shifted = shift_by_power(&fm, -alpha)?;
            let c = if opts.unit_constant {
                1.0
            } else {
                crate::special::gamma(alpha + 1.0)?
            };
            Ok(TheoremSetup {
                kernel,
                f2,
                op: TransformOp::Product,
                model: Box::new(move |u| {
                    Ok(c * operator::weyl_right(&shifted, alpha, u, tol)?.value)
                }),
                params_json: serde_json::json!({"alpha": alpha}),
            })
        }
        (TheoremId::T3_2, TheoremParams::Kober(p)) => {
            // The literal kernel of the ratio representation of the
            // Riemann–Liouville integral is not normalizable, so the Monte
            // Carlo side uses a samplable beta kernel and checks the generic
            // ratio-convolution engine instead of the closed kernel form.
            let p = *p;
            let kernel = density::beta1_density(density::Beta1Params::kober_first_kernel(
                p.zeta, p.alpha,
            )?)?;
            let k2 = kernel.clone();
            let scale = if opts.unit_constant { 0.5 } else { 1.0 };
            Ok(TheoremSetup {
                kernel,
                f2,
                op: TransformOp::Ratio,
                model: Box::new(move |u| {
                    Ok(scale * operator::ratio_density(&k2, &fm, u, tol)?.value)
                }),
                params_json: serde_json::json!({"zeta": p.zeta, "alpha": p.alpha}),
            })
        }
        (TheoremId::Pathway2, TheoremParams::Pathway(p)) => {
            let p = *p;
            let kernel = density::pathway_density(p, OperatorKind::Second)?;
            let scale = if opts.unit_constant { 0.5 } else { 1.0 };
            Ok(TheoremSetup {
                kernel,
                f2,
                op: TransformOp::Product,
                model: Box::new(move |u| {
                    Ok(scale * operator::pathway_second(&fm, p, u, tol)?.value)
                }),
                params_json: serde_json::json!({
                    "gamma": p.gamma, "delta": p.delta, "eta": p.eta, "a": p.a, "q": p.q
                }),
            })
        }
        (TheoremId::Pathway1, TheoremParams::Pathway(p)) => {
            let p = *p;
            let kernel = density::pathway_density(p, OperatorKind::First)?;
            let scale = if opts.unit_constant { 0.5 } else { 1.0 };
            Ok(TheoremSetup {
                kernel,
                f2,
                op: TransformOp::Ratio,
                model: Box::new(move |u| {
                    Ok(scale * operator::pathway_first(&fm, p, u, tol)?.value)
                }),
                params_json: serde_json::json!({
                    "gamma": p.gamma, "delta": p.delta, "eta": p.eta, "a": p.a, "q": p.q
                }),
            })
        }
        (TheoremId::Hyper2, TheoremParams::Hyper(hd)) => {
            if hd.kind != OperatorKind::Second {
                return Err(Error::validation("hyper2 needs a second-kind density".to_string()));
            }
            let hd = hd.clone();
            let kernel = density::hyper_density(&hd)?;
            let scale = if opts.unit_constant { 0.5 } else { 1.0 };
            let hd2 = hd.clone();
            Ok(TheoremSetup {
                kernel,
                f2,
                op: TransformOp::Product,
                model: Box::new(move |u| {
                    Ok(scale * operator::hyper_second(&fm, &hd2, u, tol)?.value)
                }),
                params_json: serde_json::json!({
                    "zeta": hd.zeta, "alpha": hd.alpha, "scale": hd.hyper.scale,
                    "mode": format!("{:?}", hd.hyper.mode)
                }),
            })
        }
        (TheoremId::Hyper1, TheoremParams::Hyper(hd)) => {
            if hd.kind != OperatorKind::First {
                return Err(Error::validation("hyper1 needs a first-kind density".to_string()));
            }
            let hd = hd.clone();
            let kernel = density::hyper_density(&hd)?;
            let scale = if opts.unit_constant { 0.5 } else { 1.0 };
            let hd2 = hd.clone();
            Ok(TheoremSetup {
                kernel,
                f2,
                op: TransformOp::Ratio,
                model: Box::new(move |u| {
                    Ok(scale * operator::hyper_first(&fm, &hd2, u, tol)?.value)
                }),
                params_json: serde_json::json!({
                    "zeta": hd.zeta, "alpha": hd.alpha, "scale": hd.hyper.scale,
                    "mode": format!("{:?}", hd.hyper.mode)
                }),
            })
        }
        _ => Err(Error::validation(format!(
            "theorem {theorem:?} does not take these parameters"
        ))),
    }
}

/// t^{power}·f(t) as a test function (metadata shifted accordingly).
fn shift_by_power(f: &Arc<TestFunction>, power: f64) -> Result<Arc<TestFunction>> {
    let inner = f.clone();
    let decay = match f.decay {
        density::Decay::Power(p) => density::Decay::Power(p - power),
        other => other,
    };
    TestFunction::new(
        format!("t^{power}*{}", f.name),
        move |t: f64| t.powf(power) * inner.eval(t),
        f.support,
        decay,
    )
    .with_exponents(f.lo_exponent + power, f.hi_exponent)
    .registered()
}

/// Samples u per the theorem's construction, integrates the model density
/// into a CDF over the central mass, and gates on the KS statistic.
pub fn verify_theorem(
    theorem: TheoremId,
    params: &TheoremParams,
    f2: Arc<TestFunction>,
    n: usize,
    seed: u64,
    opts: &VerifyOpts,
) -> Result<VerificationReport> {
    if n < 100 {
        return Err(Error::validation(format!("need n >= 100 samples, got {n}")));
    }
    let st = setup(theorem, params, f2, opts)?;
    let mut u = mc_transform_sample(&st.kernel, &st.f2, st.op, n, seed)?;
    u.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Model CDF on empirical-quantile nodes covering the central 99.99%.
    let m = opts.nodes.max(16);
    let skip = ((n as f64) * 5e-5).ceil() as usize;
    let lo_idx = skip.min(n - 2);
    let hi_idx = n - 1 - skip.min(n - 2);
    let mut nodes: Vec<f64> = (0..m)
        .map(|j| {
            let frac = j as f64 / (m - 1) as f64;
            let idx = lo_idx + ((hi_idx - lo_idx) as f64 * frac).round() as usize;
            u[idx]
        })
        .collect();
    nodes.dedup();
    if nodes.len() < 2 {
        return Err(Error::validation("degenerate sample: all values equal".to_string()));
    }

    // cumulative model mass: head integral to the first node, then panels.
    // Tail segments span decades of u (heavy-tailed ratios), so wide
    // segments integrate and interpolate in log-u where g(e^t)e^t is tame.
    let head = quad::tanh_sinh(
        |x, da, _db| (st.model)(da.max(x)).unwrap_or(f64::NAN),
        0.0,
        nodes[0],
        opts.tol,
    )?
    .value;
    let wide = |a: f64, b: f64| b / a > 1.2;
    let mut cdf = Vec::with_capacity(nodes.len());
    cdf.push(head);
    for w in nodes.windows(2) {
        let inc = if wide(w[0], w[1]) {
            quad::gl15(
                |t| {
                    let x = t.exp();
                    (st.model)(x).unwrap_or(f64::NAN) * x
                },
                w[0].ln(),
                w[1].ln(),
            )
        } else {
            quad::gl15(|x| (st.model)(x).unwrap_or(f64::NAN), w[0], w[1])
        };
        let prev = *cdf.last().unwrap();
        cdf.push(prev + inc);
    }
    if cdf.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("model CDF evaluation failed".to_string()));
    }
    let g_at: Vec<f64> = nodes.iter().map(|&x| (st.model)(x).unwrap_or(0.0)).collect();

    // cubic Hermite interpolation of the CDF with the model density as the
    // exact slope, in log-u on wide segments
    let model_cdf = |x: f64| -> f64 {
        if x <= nodes[0] {
            // linear head fade (the mass below the first node is ~5e-5)
            return head * (x / nodes[0]).clamp(0.0, 1.0);
        }
        if x >= *nodes.last().unwrap() {
            return *cdf.last().unwrap();
        }
        let i = match nodes.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return cdf[i],
            Err(i) => i - 1,
        };
        let (y0, y1) = (cdf[i], cdf[i + 1]);
        let (t, d0, d1) = if wide(nodes[i], nodes[i + 1]) {
            let h = (nodes[i + 1] / nodes[i]).ln();
            (
                (x / nodes[i]).ln() / h,
                g_at[i] * nodes[i] * h,
                g_at[i + 1] * nodes[i + 1] * h,
            )
        } else {
            let h = nodes[i + 1] - nodes[i];
            ((x - nodes[i]) / h, g_at[i] * h, g_at[i + 1] * h)
        };
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * (t3 - t2)
    };

    let n_f = n as f64;
    let mut ks: f64 = 0.0;
    for (i, &x) in u.iter().enumerate() {
        let f = model_cdf(x);
        ks = ks.max(f - i as f64 / n_f).max((i as f64 + 1.0) / n_f - f);
    }
    let threshold = ks_threshold(n);

    // coarse histogram gap in probability units
    let bins = 64.min(nodes.len() - 1);
    let edges: Vec<f64> = (0..=bins)
        .map(|j| nodes[(j * (nodes.len() - 1)) / bins])
        .collect();
    let mut dedup_edges = edges.clone();
    dedup_edges.dedup();
    let est = DensityEstimate::from_samples(&u, dedup_edges)?;
    let mut max_gap: f64 = 0.0;
    for i in 0..est.counts.len() {
        let emp = est.counts[i] as f64 / n_f;
        let model_mass = model_cdf(est.bin_edges[i + 1]) - model_cdf(est.bin_edges[i]);
        max_gap = max_gap.max((emp - model_mass).abs());
    }

    Ok(VerificationReport {
        theorem,
        params: st.params_json,
        n,
        seed,
        ks_stat: ks,
        ks_threshold: threshold,
        max_pointwise_gap: max_gap,
        pass: ks < threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::resolve;

    #[test]
    fn ks_distance_exact_quantiles() {
        // sample at F^{-1}((i-0.5)/n) gives KS = 0.5/n by construction
        let n = 100;
        let sample: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let ks = ks_distance(&sample, |x| x.clamp(0.0, 1.0));
        assert!((ks - 0.5 / n as f64).abs() < 1e-12, "ks = {ks}");
    }

    #[test]
    fn ks_distance_uniform_vs_uniform_and_exp() {
        let u = resolve("uniform").unwrap();
        let xs = u.sample(10_000, 77).unwrap();
        let ks = ks_distance(&xs, |x| x.clamp(0.0, 1.0));
        assert!(ks < ks_threshold(10_000), "uniform self: {ks}");
        let ks_wrong = ks_distance(&xs, |x| 1.0 - (-x.max(0.0)).exp());
        assert!(ks_wrong > ks_threshold(10_000) * 10.0, "gross mismatch: {ks_wrong}");
    }

    #[test]
    fn transform_sample_moments_and_positivity() {
        let u1 = resolve("uniform").unwrap();
        let n = 100_000;
        let prod = mc_transform_sample(&u1, &u1, TransformOp::Product, n, 3).unwrap();
        let mean = prod.iter().sum::<f64>() / n as f64;
        // var(x1 x2) = E(x²)² − 1/16 = 1/9 − 1/16
        let sd = (1.0f64 / 9.0 - 1.0 / 16.0).sqrt();
        assert!((mean - 0.25).abs() < 3.0 * sd / (n as f64).sqrt(), "mean {mean}");

        let e = resolve("exp1").unwrap();
        let b = resolve("beta1:2,1").unwrap();
        let ratio = mc_transform_sample(&b, &e, TransformOp::Ratio, 10_000, 4).unwrap();
        assert!(ratio.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn transform_sample_two_seeds_consistent() {
        let b = resolve("beta1:2,2").unwrap();
        let e = resolve("exp1").unwrap();
        let n = 100_000;
        let s1 = mc_transform_sample(&b, &e, TransformOp::Product, n, 1).unwrap();
        let mut s2 = mc_transform_sample(&b, &e, TransformOp::Product, n, 2).unwrap();
        s2.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // two-sample KS via the sorted second sample as reference CDF
        let ecdf2 = |x: f64| {
            let pos = s2.partition_point(|&v| v <= x);
            pos as f64 / n as f64
        };
        let ks = ks_distance(&s1, ecdf2);
        assert!(ks < 1.63 * (2.0 / n as f64).sqrt(), "two-sample ks {ks}");
    }

    #[test]
    fn scaling_commutes_with_product_and_ratio() {
        let b = resolve("beta1:2,2").unwrap();
        let e = resolve("exp1").unwrap();
        let n = 1000;
        let x1 = b.sample_stream(n, 9, 0).unwrap();
        let x2 = e.sample_stream(n, 9, 1).unwrap();
        // λ = 2 is exact in binary arithmetic
        for i in 0..n {
            assert_eq!(x1[i] * (2.0 * x2[i]), 2.0 * (x1[i] * x2[i]));
            assert_eq!((2.0 * x2[i]) / x1[i], 2.0 * (x2[i] / x1[i]));
        }
    }

    #[test]
    fn mc_moments_match_mellin_factorization() {
        // E(u^{s−1}) = f1*(s) f2*(s) for products, f1*(2−s) f2*(s) for ratios;
        // the ratio case needs E(x₁^{1−s}) finite, hence the larger first shape
        let f1p = resolve("beta1:2,2").unwrap();
        let f1r = resolve("beta1:4,2").unwrap();
        let f2 = resolve("gamma:2").unwrap();
        let n = 200_000;
        for (op, s) in [
            (TransformOp::Product, 2.0),
            (TransformOp::Product, 3.0),
            (TransformOp::Ratio, 2.0),
            (TransformOp::Ratio, 3.0),
        ] {
            let f1 = if op == TransformOp::Product { f1p.clone() } else { f1r.clone() };
            let u = mc_transform_sample(&f1, &f2, op, n, 31).unwrap();
            let pow: Vec<f64> = u.iter().map(|&v| v.powf(s - 1.0)).collect();
            let mean = pow.iter().sum::<f64>() / n as f64;
            let var = pow.iter().map(|&p| (p - mean) * (p - mean)).sum::<f64>() / n as f64;
            let se = (var / n as f64).sqrt();
            let s_c = num_complex::Complex64::new(s, 0.0);
            let m1 = match op {
                TransformOp::Product => crate::mellin::fstar(&f1, s_c, Tol::default()).unwrap(),
                TransformOp::Ratio => {
                    crate::mellin::fstar(&f1, num_complex::Complex64::new(2.0 - s, 0.0), Tol::default())
                        .unwrap()
                }
            };
            let m2 = crate::mellin::fstar(&f2, s_c, Tol::default()).unwrap();
            let expected = (m1 * m2).re;
            assert!(
                (mean - expected).abs() < 4.0 * se,
                "{op:?} s={s}: mc {mean} vs {expected} (se {se})"
            );
        }
    }

    #[test]
    fn verify_t11_passes_and_control_fails() {
        let f2 = resolve("exp1").unwrap();
        let p = KoberParams::new(1.0, 1.0).unwrap();
        let rep = verify_theorem(
            TheoremId::T1_1,
            &TheoremParams::Kober(p),
            f2.clone(),
            100_000,
            42,
            &VerifyOpts::default(),
        )
        .unwrap();
        assert!(rep.pass, "t1.1 failed: {rep:?}");
        assert!(rep.max_pointwise_gap < 0.01);

        let control = verify_theorem(
            TheoremId::T1_1,
            &TheoremParams::Kober(p),
            f2,
            100_000,
            42,
            &VerifyOpts { unit_constant: true, ..Default::default() },
        )
        .unwrap();
        assert!(!control.pass, "negative control passed: {control:?}");
    }

    #[test]
    fn verify_t21_gamma_density() {
        let f2 = resolve("gamma:2").unwrap();
        let p = KoberParams::new(2.0, 1.5).unwrap();
        let rep = verify_theorem(
            TheoremId::T2_1,
            &TheoremParams::Kober(p),
            f2,
            100_000,
            7,
            &VerifyOpts::default(),
        )
        .unwrap();
        assert!(rep.pass, "t2.1 failed: {rep:?}");
    }

    #[test]
    fn verify_weyl_and_ratio_routes() {
        let f2 = resolve("exp1").unwrap();
        let rep = verify_theorem(
            TheoremId::T3_1,
            &TheoremParams::Weyl { alpha: 1.5 },
            f2.clone(),
            50_000,
            11,
            &VerifyOpts::default(),
        )
        .unwrap();
        assert!(rep.pass, "t3.1 failed: {rep:?}");

        let p = KoberParams::new(1.0, 0.5).unwrap();
        let rep = verify_theorem(
            TheoremId::T3_2,
            &TheoremParams::Kober(p),
            f2,
            50_000,
            13,
            &VerifyOpts::default(),
        )
        .unwrap();
        assert!(rep.pass, "t3.2 failed: {rep:?}");
    }

    #[test]
    fn verify_pathway_and_hyper() {
        let f2 = resolve("exp1").unwrap();
        let pw = PathwayParams::new(1.0, 1.0, 2.0, 1.0, 0.5).unwrap();
        let rep = verify_theorem(
            TheoremId::Pathway2,
            &TheoremParams::Pathway(pw),
            f2.clone(),
            50_000,
            17,
            &VerifyOpts::default(),
        )
        .unwrap();
        assert!(rep.pass, "pathway2 failed: {rep:?}");

        let hd = HyperDensityParams::new(
            density::HyperParams::new(vec![1.0], vec![2.0], 0.5, density::ArgMode::OneMinusX, None)
                .unwrap(),
            1.0,
            1.5,
            OperatorKind::First,
        )
        .unwrap();
        let rep = verify_theorem(
            TheoremId::Hyper1,
            &TheoremParams::Hyper(hd),
            f2,
            50_000,
            19,
            &VerifyOpts::default(),
        )
        .unwrap();
        assert!(rep.pass, "hyper1 failed: {rep:?}");
    }

    #[test]
    fn density_estimate_counts() {
        let samples = vec![0.1, 0.2, 0.6, 0.8, 1.5, -0.5];
        let est = DensityEstimate::from_samples(&samples, vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(est.counts, vec![3, 3]); // clamped outliers land in edge bins
        assert_eq!(est.n, 6);
        assert!((est.cdf_at_edge(1) - 1.0).abs() < 1e-12);
        assert!(DensityEstimate::from_samples(&samples, vec![1.0, 0.5]).is_err());
    }
}
