//! Single-time marginals of the stochastic solutions: stable Lévy motion,
//! fractional Brownian motion, linear fractional stable motion, inverse
//! stable subordinators, and their random scalings and time changes.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quad::{gauss_jacobi, gauss_legendre};
use crate::randvar::{clamp_open01, positive_stable, ScalerLaw, ScalerSampler};
use crate::rng::RandomStream;
use crate::symbols::{BernsteinFn, SymbolSpec};

/// One draw with characteristic function exp(-scale · ψ_{δ,ρ}(p)), where
/// ψ_{δ,ρ}(p) = |p|^δ (1 - iρ sign(p) tan(πδ/2)), by the
/// Chambers-Mallows-Stuck transform. δ = 2 is a centered Gaussian with
/// E[e^{ipX}] = e^{-scale p²}.
pub fn sample_stable(delta: f64, rho: f64, scale: f64, rng: &mut RandomStream) -> f64 {
    debug_assert!(delta > 0.0 && delta <= 2.0 && (-1.0..=1.0).contains(&rho));
    if scale == 0.0 {
        return 0.0;
    }
    if (delta - 2.0).abs() < 1e-14 {
        let z: f64 = StandardNormal.sample(rng);
        return (2.0 * scale).sqrt() * z;
    }
    if (delta - 1.0).abs() < 1e-14 {
        // symmetric Cauchy (ρ = 0 enforced at model construction)
        let u = clamp_open01(rng.random::<f64>());
        return scale * (std::f64::consts::PI * (u - 0.5)).tan();
    }
    let tan_half = (std::f64::consts::FRAC_PI_2 * delta).tan();
    let b = (rho * tan_half).atan() / delta;
    let s_fac = (1.0 + rho * rho * tan_half * tan_half).powf(0.5 / delta);
    let v = std::f64::consts::PI * (clamp_open01(rng.random::<f64>()) - 0.5);
    let w = -clamp_open01(rng.random::<f64>()).ln();
    let x = s_fac * (delta * (v + b)).sin() / v.cos().powf(1.0 / delta)
        * ((v - delta * (v + b)).cos() / w).powf((1.0 - delta) / delta);
    scale.powf(1.0 / delta) * x
}

/// Normalizing constant of the Mandelbrot-Van Ness kernel:
/// K_{δ,H} = (∫₀^∞ |(1+x)^{H-1/δ} - x^{H-1/δ}|^δ dx + 1/(δH))^{1/δ}.
pub fn k_delta_h(delta: f64, h: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 2.0) || !(h > 0.0 && h < 1.0) {
        return Err(Error::DomainError(format!(
            "K requires delta in (0,2], H in (0,1); got ({delta}, {h})"
        )));
    }
    Ok((mvn_kernel_integral(delta, h)? + 1.0 / (delta * h)).powf(1.0 / delta))
}

/// ∫₀^∞ |(1+x)^{H-1/δ} - x^{H-1/δ}|^δ dx (0 when H = 1/δ).
fn mvn_kernel_integral(delta: f64, h: f64) -> Result<f64> {
    let e = h - 1.0 / delta;
    if e.abs() < 1e-14 {
        return Ok(0.0);
    }
    let f = |x: f64| ((1.0 + x).powf(e) - x.powf(e)).abs().powf(delta);
    // [0,1]: geometric panels toward the x^{eδ} singularity (e < 0), plus a
    // closed-form remainder below the smallest panel
    let rule = gauss_legendre(16);
    let mut inner = 0.0;
    let mut hi = 1.0f64;
    let levels = 41;
    for _ in 0..=levels {
        let lo = 0.5 * hi;
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            inner += w * (hi - lo) * f(lo + (hi - lo) * u);
        }
        hi = lo;
    }
    if e < 0.0 {
        // below x_min the integrand is x^{eδ}(1 + O(x^{|e|}))
        let x_min = 0.5f64.powi(levels as i32 + 1);
        inner += x_min.powf(e * delta + 1.0) / (e * delta + 1.0);
    }
    // [1,∞): y = 1/x gives an analytic integrand with weight y^{δ(1-H)-1}
    let q = delta * (1.0 - h) - 1.0;
    let rule = gauss_jacobi(96, 0.0, q)?;
    let outer = rule.apply(|y| {
        let ratio = ((1.0 + y).powf(e) - 1.0) / y; // analytic at y = 0
        ratio.abs().powf(delta)
    });
    Ok(inner + outer)
}

/// Effective skewness ρ₀ of the FLSM marginal law: ρ for H > 1/δ, and
/// ρ (1/(Hδ) - I)/(1/(Hδ) + I) with I the Mandelbrot-Van Ness kernel
/// integral for H < 1/δ.
pub fn rho0(delta: f64, rho: f64, h: f64) -> Result<f64> {
    if (h - 1.0 / delta).abs() < 1e-14 {
        return Ok(rho);
    }
    if h > 1.0 / delta {
        return Ok(rho);
    }
    let i = mvn_kernel_integral(delta, h)?;
    let a = 1.0 / (h * delta);
    Ok(rho * (a - i) / (a + i))
}

/// Discretization of the Mandelbrot-Van Ness integral for one marginal.
#[derive(Debug, Clone)]
pub struct FlsmConfig {
    pub delta: f64,
    pub rho: f64,
    pub h: f64,
    /// Riemann cell width, as a fraction of t (default 1e-3).
    pub mesh_factor: f64,
    /// Truncation of the integral at -left_cutoff_factor · t (default 50).
    pub left_cutoff_factor: f64,
}

impl FlsmConfig {
    pub fn new(delta: f64, rho: f64, h: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 2.0) || !(-1.0..=1.0).contains(&rho) {
            return Err(Error::DomainError(format!(
                "FLSM requires delta in (0,2], rho in [-1,1]; got ({delta}, {rho})"
            )));
        }
        if (delta - 1.0).abs() < 1e-12 && rho != 0.0 {
            return Err(Error::ConfigError(
                "delta = 1 requires the symmetric case rho = 0".into(),
            ));
        }
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::DomainError(format!("H must lie in (0,1), got {h}")));
        }
        if (h - 1.0 / delta).abs() < 1e-12 && (delta - 2.0).abs() > 1e-12 {
            return Err(Error::ConfigError(format!(
                "H = 1/delta is excluded (delta={delta}); only delta=2, H=1/2 \
                 degenerates to Brownian motion"
            )));
        }
        Ok(FlsmConfig {
            delta,
            rho,
            h,
            mesh_factor: 1e-3,
            left_cutoff_factor: 50.0,
        })
    }

    pub fn with_mesh(mut self, mesh_factor: f64, left_cutoff_factor: f64) -> Self {
        self.mesh_factor = mesh_factor;
        self.left_cutoff_factor = left_cutoff_factor;
        self
    }
}

/// The marginal law of the discretized stochastic integral
/// Σ_j f(x_j) M(cell_j): a single stable variable whose scale and skewness
/// aggregate the independent per-cell increments. Drawing from it is
/// distributionally identical to summing the cells one by one.
#[derive(Debug, Clone)]
pub struct StableAggregate {
    pub delta: f64,
    /// Σ mesh |f_j|^δ.
    pub scale_delta: f64,
    /// effective skewness after sign-weighting the cells
    pub rho_eff: f64,
}

impl StableAggregate {
    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        if self.scale_delta == 0.0 {
            return 0.0;
        }
        sample_stable(self.delta, self.rho_eff, self.scale_delta, rng)
    }
}

/// Midpoint Riemann masses Σ mesh |f(x_j)|^δ over [lo, hi], split by the
/// sign of f.
fn cell_masses(delta: f64, mesh: f64, lo: f64, hi: f64, kern: impl Fn(f64) -> f64) -> (f64, f64) {
    if hi <= lo {
        return (0.0, 0.0);
    }
    let n = ((hi - lo) / mesh).round().max(1.0) as usize;
    let w = (hi - lo) / n as f64;
    let mut pos = 0.0f64;
    let mut neg = 0.0f64;
    for j in 0..n {
        let x = lo + (j as f64 + 0.5) * w;
        let f = kern(x);
        if f >= 0.0 {
            pos += w * f.powf(delta);
        } else {
            neg += w * (-f).powf(delta);
        }
    }
    (pos, neg)
}

fn masses_to_aggregate(delta: f64, rho: f64, pos: f64, neg: f64, k_norm: f64) -> StableAggregate {
    let total = pos + neg;
    StableAggregate {
        delta,
        scale_delta: total / k_norm.powf(delta),
        rho_eff: if total > 0.0 {
            rho * (pos - neg) / total
        } else {
            0.0
        },
    }
}

/// Marginal sampler for Y^{(δ,ρ,H)}_t built from the Riemann-sum
/// discretization of the Mandelbrot-Van Ness integral.
pub fn flsm_marginal(cfg: &FlsmConfig, t: f64) -> Result<StableAggregate> {
    if t < 0.0 {
        return Err(Error::DomainError(format!("need t >= 0, got {t}")));
    }
    let (delta, rho, h) = (cfg.delta, cfg.rho, cfg.h);
    if t == 0.0 {
        return Ok(StableAggregate {
            delta,
            scale_delta: 0.0,
            rho_eff: 0.0,
        });
    }
    if (h - 1.0 / delta).abs() < 1e-12 {
        // Brownian boundary case: the kernel degenerates to 1_{[0,t]}
        return Ok(StableAggregate {
            delta,
            scale_delta: t,
            rho_eff: rho,
        });
    }
    let e = h - 1.0 / delta;
    let k_norm = k_delta_h(delta, h)?;
    let mesh = cfg.mesh_factor * t;
    let cutoff = cfg.left_cutoff_factor * t;
    let kern = |x: f64| -> f64 {
        let a = if t - x > 0.0 { (t - x).powf(e) } else { 0.0 };
        let b = if -x > 0.0 { (-x).powf(e) } else { 0.0 };
        a - b
    };
    // bulk cells by midpoint; the cells touching the kernel singularities at
    // x = t and x = 0 get weighted rules (the integrand is a pure power there)
    let (mut pos, mut neg) = cell_masses(delta, mesh, -cutoff, -mesh, &kern);
    // beyond the cutoff the kernel is asymptotically e·t·(-x)^{e-1}; its
    // δ-th power integrates in closed form and the mass is not negligible
    // when H is close to 1 (slow tail decay)
    let tail = (e.abs() * t).powf(delta) * cutoff.powf((e - 1.0) * delta + 1.0)
        / ((1.0 - e) * delta - 1.0);
    if e > 0.0 {
        pos += tail;
    } else {
        neg += tail;
    }
    let (p2, n2) = cell_masses(delta, mesh, mesh, t - mesh, &kern);
    pos += p2;
    neg += n2;
    if e < 0.0 {
        // cell [t-mesh, t]: the (-x)_+ branch is absent, ∫ (t-x)^{eδ} dx exact
        pos += mesh.powf(delta * h) / (delta * h);
        // cell [-mesh, 0]: f = (t-x)^e - (-x)^e < 0, |f|^δ = u^{eδ} g(u) with
        // g(u) = (1 - (u/(t+u))^{|e|})^δ smooth
        let rule = gauss_jacobi(12, 0.0, e * delta)?;
        let cell: f64 = rule.apply(|v| {
            let u = mesh * v;
            (1.0 - (u / (t + u)).powf(-e)).abs().powf(delta)
        }) * mesh.powf(e * delta + 1.0);
        neg += cell;
    } else {
        // kernel bounded at both special cells: midpoint suffices
        pos += mesh * kern(t - 0.5 * mesh).abs().powf(delta);
        let f0 = kern(-0.5 * mesh);
        if f0 >= 0.0 {
            pos += mesh * f0.powf(delta);
        } else {
            neg += mesh * (-f0).powf(delta);
        }
    }
    Ok(masses_to_aggregate(delta, rho, pos, neg, k_norm))
}

/// Law of the increment Y_{t+s} - Y_s of the discretized FLSM (the
/// integrand difference is again a deterministic stable integral).
pub fn flsm_increment(cfg: &FlsmConfig, s: f64, t: f64) -> Result<StableAggregate> {
    if !(s >= 0.0 && t > 0.0) {
        return Err(Error::DomainError("need s >= 0 and t > 0".into()));
    }
    let e = cfg.h - 1.0 / cfg.delta;
    let k_norm = k_delta_h(cfg.delta, cfg.h)?;
    let span = s + t;
    let mesh = cfg.mesh_factor * t;
    let cutoff = cfg.left_cutoff_factor * span;
    let pw = |v: f64| if v > 0.0 { v.powf(e) } else { 0.0 };
    let kern = move |x: f64| pw(span - x) - pw(s - x);
    let (mut pos, mut neg) = cell_masses(cfg.delta, mesh, -cutoff, span, &kern);
    // closed-form continuation beyond the cutoff (kernel ~ e·t·(-x)^{e-1})
    let tail = (e.abs() * t).powf(cfg.delta) * cutoff.powf((e - 1.0) * cfg.delta + 1.0)
        / ((1.0 - e) * cfg.delta - 1.0);
    if e > 0.0 {
        pos += tail;
    } else {
        neg += tail;
    }
    Ok(masses_to_aggregate(cfg.delta, cfg.rho, pos, neg, k_norm))
}

/// Exact joint Gaussian draw of fractional Brownian motion on a time grid
/// via Cholesky factorization of the covariance
/// E[B^H_t B^H_s] = (t^{2H} + s^{2H} - |t-s|^{2H})/2.
pub struct FbmSampler {
    times: Vec<f64>,
    chol: DMatrix<f64>,
    zero_count: usize,
}

impl FbmSampler {
    pub fn new(h: f64, t_grid: &[f64]) -> Result<Self> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::DomainError(format!("H must lie in (0,1], got {h}")));
        }
        if t_grid.len() > 4096 {
            return Err(Error::DomainError("fBm grid capped at 4096 points".into()));
        }
        if t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid.iter().any(|&t| t < 0.0) {
            return Err(Error::DomainError(
                "fBm grid must be sorted, distinct, nonnegative".into(),
            ));
        }
        let zero_count = t_grid.iter().filter(|&&t| t == 0.0).count();
        let times: Vec<f64> = t_grid.iter().copied().filter(|&t| t > 0.0).collect();
        let n = times.len();
        let cov = DMatrix::from_fn(n, n, |i, j| {
            let (ti, tj) = (times[i], times[j]);
            0.5 * (ti.powf(2.0 * h) + tj.powf(2.0 * h) - (ti - tj).abs().powf(2.0 * h))
        });
        let chol = cov
            .cholesky()
            .ok_or_else(|| {
                Error::NumericalError("fBm covariance factorization failed".into())
            })?
            .l();
        Ok(FbmSampler {
            times,
            chol,
            zero_count,
        })
    }

    pub fn sample(&self, rng: &mut RandomStream) -> Vec<f64> {
        let n = self.times.len();
        let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let mut out = vec![0.0; self.zero_count];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..=i {
                acc += self.chol[(i, j)] * z[j];
            }
            out.push(acc);
        }
        out
    }
}

/// Exact joint fBm marginals on `t_grid`.
pub fn sample_fbm_marginal(h: f64, t_grid: &[f64], rng: &mut RandomStream) -> Result<Vec<f64>> {
    Ok(FbmSampler::new(h, t_grid)?.sample(rng))
}

/// One draw of the inverse β-stable subordinator at time t, via the marginal
/// identity E_t =d (t/S)^β with S a standard positive β-stable draw.
pub fn sample_inverse_stable_subordinator(beta: f64, t: f64, rng: &mut RandomStream) -> f64 {
    debug_assert!(beta > 0.0 && beta < 1.0 && t > 0.0);
    let s = positive_stable(beta, rng);
    (t / s).powf(beta)
}

/// A recipe for sampling the marginal X_t of a stochastic solution.
#[derive(Debug, Clone)]
pub enum ProcessModel {
    /// X_t = Y_{A t^e}: a Lévy process run at an independently scaled time.
    ScaledLevyTime {
        symbol: SymbolSpec,
        scaler: ScalerLaw,
        time_exponent: f64,
    },
    /// X_t = amplitude · A^{1/δ} Y^{(δ,ρ,H)}_t.
    ScaledFlsm {
        cfg: FlsmConfig,
        scaler: ScalerLaw,
        /// extra deterministic factor (1/√2 matches the fractional-Laplacian
        /// normalization 2^{-γ/2}|p|^γ; 1 matches the plain |p|^δ symbol)
        amplitude: f64,
    },
    /// X_t = A^{1/δ} Y^{(δ,ρ)}_t.
    ScaledStableLevy {
        delta: f64,
        rho: f64,
        scaler: ScalerLaw,
    },
    /// X_t = sqrt(A_β) B^{α/2}_t.
    Ggbm { alpha: f64, beta: f64 },
    /// X_t = Y_{E_t} with E the inverse β-stable subordinator.
    InverseSubordinated { symbol: SymbolSpec, beta: f64 },
}

/// Everything precomputed for drawing X_t at one fixed t.
pub struct MarginalSampler {
    t: f64,
    inner: MarginalImpl,
}

enum MarginalImpl {
    Zero,
    LevyTime {
        symbol: SymbolSpec,
        scaler: ScalerSampler,
        elapsed_factor: f64,
    },
    Flsm {
        marginal: StableAggregate,
        scaler: ScalerSampler,
        amplitude: f64,
    },
    StableLevy {
        delta: f64,
        rho: f64,
        scaler: ScalerSampler,
    },
    Ggbm {
        beta: f64,
        std_factor: f64,
    },
    InvSub {
        symbol: SymbolSpec,
        beta: f64,
    },
}

impl ProcessModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessModel::ScaledLevyTime { time_exponent, .. } => {
                if !(*time_exponent > 0.0) {
                    return Err(Error::DomainError(
                        "time exponent must be positive".into(),
                    ));
                }
            }
            ProcessModel::ScaledFlsm { cfg, .. } => {
                let _ = FlsmConfig::new(cfg.delta, cfg.rho, cfg.h)?;
            }
            ProcessModel::ScaledStableLevy { delta, rho, .. } => {
                if !(*delta > 0.0 && *delta <= 2.0) || !(-1.0..=1.0).contains(rho) {
                    return Err(Error::DomainError("invalid stable parameters".into()));
                }
                if (*delta - 1.0).abs() < 1e-12 && *rho != 0.0 {
                    return Err(Error::ConfigError(
                        "delta = 1 requires the symmetric case rho = 0".into(),
                    ));
                }
            }
            ProcessModel::Ggbm { alpha, beta } => {
                if !(*beta > 0.0 && *beta <= 1.0 && *alpha > 0.0 && *alpha < 2.0) {
                    return Err(Error::DomainError(format!(
                        "GGBM requires beta in (0,1], alpha in (0,2); got ({alpha}, {beta})"
                    )));
                }
            }
            ProcessModel::InverseSubordinated { beta, .. } => {
                if !(*beta > 0.0 && *beta < 1.0) {
                    return Err(Error::DomainError(format!(
                        "inverse subordinator requires beta in (0,1), got {beta}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Precompute a sampler of the marginal X_t.
    pub fn marginal_sampler(&self, t: f64) -> Result<MarginalSampler> {
        self.validate()?;
        if t < 0.0 {
            return Err(Error::DomainError(format!("need t >= 0, got {t}")));
        }
        let inner = if t == 0.0 {
            MarginalImpl::Zero
        } else {
            match self {
                ProcessModel::ScaledLevyTime {
                    symbol,
                    scaler,
                    time_exponent,
                } => MarginalImpl::LevyTime {
                    symbol: symbol.clone(),
                    scaler: ScalerSampler::new(scaler.clone())?,
                    elapsed_factor: t.powf(*time_exponent),
                },
                ProcessModel::ScaledFlsm {
                    cfg,
                    scaler,
                    amplitude,
                } => MarginalImpl::Flsm {
                    marginal: flsm_marginal(cfg, t)?,
                    scaler: ScalerSampler::new(scaler.clone())?,
                    amplitude: *amplitude,
                },
                ProcessModel::ScaledStableLevy { delta, rho, scaler } => {
                    MarginalImpl::StableLevy {
                        delta: *delta,
                        rho: *rho,
                        scaler: ScalerSampler::new(scaler.clone())?,
                    }
                }
                ProcessModel::Ggbm { alpha, beta } => MarginalImpl::Ggbm {
                    beta: *beta,
                    std_factor: t.powf(alpha / 2.0),
                },
                ProcessModel::InverseSubordinated { symbol, beta } => MarginalImpl::InvSub {
                    symbol: symbol.clone(),
                    beta: *beta,
                },
            }
        };
        Ok(MarginalSampler { t, inner })
    }
}

impl MarginalSampler {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        match &self.inner {
            MarginalImpl::Zero => 0.0,
            MarginalImpl::LevyTime {
                symbol,
                scaler,
                elapsed_factor,
            } => {
                let a = scaler.sample(rng);
                levy_increment(symbol, a * elapsed_factor, rng)
            }
            MarginalImpl::Flsm {
                marginal,
                scaler,
                amplitude,
            } => {
                let a = scaler.sample(rng);
                amplitude * a.powf(1.0 / marginal.delta) * marginal.sample(rng)
            }
            MarginalImpl::StableLevy { delta, rho, scaler } => {
                let a = scaler.sample(rng);
                a.powf(1.0 / delta) * sample_stable(*delta, *rho, self.t, rng)
            }
            MarginalImpl::Ggbm { beta, std_factor } => {
                let a = crate::randvar::sample_ml(*beta, rng);
                let z: f64 = StandardNormal.sample(rng);
                a.sqrt() * std_factor * z
            }
            MarginalImpl::InvSub { symbol, beta } => {
                let e = sample_inverse_stable_subordinator(*beta, self.t, rng);
                levy_increment(symbol, e, rng)
            }
        }
    }
}

/// One draw of X_t per the recipe.
pub fn sample_marginal(model: &ProcessModel, t: f64, rng: &mut RandomStream) -> Result<f64> {
    Ok(model.marginal_sampler(t)?.sample(rng))
}

/// A Lévy increment at elapsed time τ for a parametric symbol.
/// Bernstein-composed symbols are realized by subordination: the inner
/// process is run at an independent positive-stable time with Laplace
/// exponent x^γ.
pub fn levy_increment(symbol: &SymbolSpec, tau: f64, rng: &mut RandomStream) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    match symbol {
        SymbolSpec::Brownian { sigma2 } => {
            let z: f64 = StandardNormal.sample(rng);
            (sigma2 * tau).sqrt() * z
        }
        SymbolSpec::FractionalLaplacian { gamma } => {
            sample_stable(*gamma, 0.0, tau * 0.5f64.powf(gamma / 2.0), rng)
        }
        SymbolSpec::StableSkewed { delta, rho } => sample_stable(*delta, *rho, tau, rng),
        SymbolSpec::BernsteinComposed { inner, f } => {
            let BernsteinFn::Power { gamma } = f;
            let sub_time = tau.powf(1.0 / gamma) * positive_stable(*gamma, rng);
            levy_increment(inner, sub_time, rng)
        }
    }
}
