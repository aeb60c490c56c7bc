//! Time kernels k(t,s): evaluation, homogeneity metadata, integrability
//! checks, and time-stretchings.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{self, gauss_jacobi, gauss_legendre};
use crate::specfun::{self, appell_f3, gamma_reciprocal, ln_gamma, F3Params};

pub type Kernel2Fn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type Kernel1Fn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Monotone time-stretching g: [0,∞) → [0,∞); only the power family
/// g(τ) = τ^c is supported, which keeps ġ exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StretchFn {
    Power { c: f64 },
}

impl StretchFn {
    pub fn power(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::DomainError(format!(
                "stretch exponent must be positive, got {c}"
            )));
        }
        Ok(StretchFn::Power { c })
    }

    pub fn apply(&self, tau: f64) -> f64 {
        match self {
            StretchFn::Power { c } => tau.powf(*c),
        }
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        match self {
            StretchFn::Power { c } => c * tau.powf(c - 1.0),
        }
    }
}

/// A time kernel with family tag and parameters.
#[derive(Clone)]
pub enum KernelSpec {
    /// (t-s)^{β-1} / Γ(β), β ∈ (0,1].
    Fractional { beta: f64 },
    /// (α/(βΓ(β))) s^{α/β-1} (t^{α/β} - s^{α/β})^{β-1}, β ∈ (0,1], α ∈ (0,2).
    Ggbm { alpha: f64, beta: f64 },
    /// (a/Γ(b/a)) (t^a - s^a)^{b/a-1} t^{a-ν} s^{ν-1} F3(ν/a-1, b/a, 1, μ, b/a; 1-(s/t)^a, 1-(t/s)^a).
    SaigoMaeda { a: f64, b: f64, mu: f64, nu: f64 },
    /// k(t,s) = K(t-s) with envelope |K(t)| ≤ M t^{β-1} e^{γt}.
    Convolution {
        kfun: Kernel1Fn,
        envelope_m: f64,
        envelope_gamma: f64,
        beta: f64,
    },
    /// Arbitrary scalar-evaluable kernel; no singularity-aware guarantees.
    Custom { f: Kernel2Fn },
    /// κ_g(τ,θ) = k(g(τ), g(θ)) ġ(θ).
    Stretched {
        inner: Box<KernelSpec>,
        g: StretchFn,
    },
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Fractional { beta } => write!(f, "Fractional(beta={beta})"),
            KernelSpec::Ggbm { alpha, beta } => write!(f, "Ggbm(alpha={alpha}, beta={beta})"),
            KernelSpec::SaigoMaeda { a, b, mu, nu } => {
                write!(f, "SaigoMaeda(a={a}, b={b}, mu={mu}, nu={nu})")
            }
            KernelSpec::Convolution {
                envelope_m,
                envelope_gamma,
                beta,
                ..
            } => write!(
                f,
                "Convolution(M={envelope_m}, gamma={envelope_gamma}, beta={beta})"
            ),
            KernelSpec::Custom { .. } => write!(f, "Custom"),
            KernelSpec::Stretched { inner, g } => write!(f, "Stretched({inner:?}, {g:?})"),
        }
    }
}

pub struct AssumptionReport {
    pub k_t: f64,
    pub pass: bool,
    /// t at which the supremum was attained on the scan grid.
    pub argmax_t: f64,
}

impl KernelSpec {
    pub fn fractional(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::DomainError(format!(
                "fractional kernel requires beta in (0,1], got {beta}"
            )));
        }
        Ok(KernelSpec::Fractional { beta })
    }

    pub fn ggbm(alpha: f64, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) || !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::DomainError(format!(
                "GGBM kernel requires beta in (0,1], alpha in (0,2), got ({alpha}, {beta})"
            )));
        }
        Ok(KernelSpec::Ggbm { alpha, beta })
    }

    pub fn saigo_maeda(a: f64, b: f64, mu: f64, nu: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && mu > -1.0 && nu > (-b).max(-a * mu)) {
            return Err(Error::DomainError(format!(
                "Saigo-Maeda kernel requires a,b > 0, mu > -1, nu > max(-b, -a*mu); \
                 got (a={a}, b={b}, mu={mu}, nu={nu})"
            )));
        }
        Ok(KernelSpec::SaigoMaeda { a, b, mu, nu })
    }

    pub fn convolution(
        kfun: Kernel1Fn,
        envelope_m: f64,
        envelope_gamma: f64,
        beta: f64,
    ) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) || envelope_m < 0.0 || envelope_gamma < 0.0 {
            return Err(Error::DomainError(format!(
                "convolution kernel requires beta in (0,1] and M, gamma >= 0, \
                 got (M={envelope_m}, gamma={envelope_gamma}, beta={beta})"
            )));
        }
        Ok(KernelSpec::Convolution {
            kfun,
            envelope_m,
            envelope_gamma,
            beta,
        })
    }

    pub fn custom(f: Kernel2Fn) -> Self {
        KernelSpec::Custom { f }
    }

    /// The stretched kernel κ_g(τ,θ) = k(g(τ), g(θ)) ġ(θ). Solving with κ_g
    /// equals time-substituted solving with k: v(τ,x) = u(g(τ),x).
    pub fn stretched(self, g: StretchFn) -> Self {
        KernelSpec::Stretched {
            inner: Box::new(self),
            g,
        }
    }

    /// k(t,s) for 0 < s < t.
    pub fn eval(&self, t: f64, s: f64) -> Result<f64> {
        if !(t > 0.0 && s > 0.0 && s < t) {
            return Err(Error::DomainError(format!(
                "kernel requires 0 < s < t, got (t={t}, s={s})"
            )));
        }
        match self {
            KernelSpec::Fractional { beta } => {
                Ok((t - s).powf(beta - 1.0) * gamma_reciprocal(*beta))
            }
            KernelSpec::Ggbm { alpha, beta } => {
                let a0 = alpha / beta;
                Ok(a0 * gamma_reciprocal(*beta)
                    * s.powf(a0 - 1.0)
                    * (t.powf(a0) - s.powf(a0)).powf(beta - 1.0))
            }
            KernelSpec::SaigoMaeda { a, b, mu, nu } => {
                let theta = (s / t).powf(*a);
                let f3 = sm_f3_factor(*a, *b, *mu, *nu, theta)?;
                Ok(a * gamma_reciprocal(b / a)
                    * (t.powf(*a) - s.powf(*a)).powf(b / a - 1.0)
                    * t.powf(a - nu)
                    * s.powf(nu - 1.0)
                    * f3)
            }
            KernelSpec::Convolution { kfun, .. } => Ok(kfun(t - s)),
            KernelSpec::Custom { f } => Ok(f(t, s)),
            KernelSpec::Stretched { inner, g } => {
                Ok(inner.eval(g.apply(t), g.apply(s))? * g.derivative(s))
            }
        }
    }

    /// Degree β-1 such that k(t,ts) = t^{β-1} k(1,s), when the family knows it.
    pub fn homogeneity_degree(&self) -> Option<f64> {
        match self {
            KernelSpec::Fractional { beta } => Some(beta - 1.0),
            KernelSpec::Ggbm { alpha, .. } => Some(alpha - 1.0),
            KernelSpec::SaigoMaeda { b, .. } => Some(b - 1.0),
            KernelSpec::Convolution { .. } | KernelSpec::Custom { .. } => None,
            KernelSpec::Stretched { inner, g } => {
                let d = inner.homogeneity_degree()?;
                let StretchFn::Power { c } = g;
                Some(c * (d + 1.0) - 1.0)
            }
        }
    }

    /// Exponent of the series index: homogeneity degree + 1.
    pub fn homogeneity_exponent(&self) -> Option<f64> {
        self.homogeneity_degree().map(|d| d + 1.0)
    }

    /// Endpoint exponents (q0, q1) of k(1,σ) ~ σ^{q0} near 0 and
    /// (1-σ)^{q1} near 1, for families that know them.
    fn endpoint_exponents(&self) -> Option<(f64, f64)> {
        match self {
            KernelSpec::Fractional { beta } => Some((0.0, beta - 1.0)),
            KernelSpec::Ggbm { alpha, beta } => Some((alpha / beta - 1.0, beta - 1.0)),
            KernelSpec::SaigoMaeda { a, b, mu, nu } => {
                let q0 = (b - 1.0).min(nu - 1.0 + a * mu);
                let q1 = (b / a - 1.0).min(0.0);
                Some((q0, q1))
            }
            KernelSpec::Convolution { beta, .. } => Some((0.0, beta - 1.0)),
            KernelSpec::Custom { .. } => None,
            KernelSpec::Stretched { inner, g } => {
                let (q0, q1) = inner.endpoint_exponents()?;
                let StretchFn::Power { c } = g;
                // κ_g(1,θ) = k(1,θ^c) c θ^{c-1}; near 1, 1-θ^c ~ c(1-θ)
                Some((c * (q0 + 1.0) - 1.0, q1))
            }
        }
    }

    /// Numerical check of the integrability assumption: estimates
    /// K_T = sup_{0<t≤T} t^{α*-1/(1+ε)} ‖k(t,·)‖_{L^{1+ε}((0,t))}
    /// on a log-spaced t-grid.
    pub fn check_assumption(&self, t_max: f64, eps: f64, alpha_star: f64) -> Result<AssumptionReport> {
        if !(t_max > 0.0 && eps > 0.0 && (0.0..1.0).contains(&alpha_star)) {
            return Err(Error::DomainError(format!(
                "check_assumption requires T > 0, eps > 0, alpha_star in [0,1); \
                 got (T={t_max}, eps={eps}, alpha_star={alpha_star})"
            )));
        }
        let p = 1.0 + eps;
        let mut k_t: f64 = 0.0;
        let mut argmax = t_max;
        for &t in &quad::logspace(1e-3 * t_max, t_max, 40) {
            let norm_p = self.lp_norm_p(t, p)?;
            let v = t.powf(alpha_star - 1.0 / p) * norm_p.powf(1.0 / p);
            if !v.is_finite() {
                return Err(Error::QuadratureFailure(format!(
                    "L^{p} norm not finite at t={t}"
                )));
            }
            if v > k_t {
                k_t = v;
                argmax = t;
            }
        }
        Ok(AssumptionReport {
            k_t,
            pass: k_t.is_finite(),
            argmax_t: argmax,
        })
    }

    /// ∫_0^t |k(t,s)|^p ds.
    fn lp_norm_p(&self, t: f64, p: f64) -> Result<f64> {
        match self.endpoint_exponents() {
            Some((q0, q1)) => {
                // scale out s = tσ and put the endpoint powers into the weight
                if q0 * p <= -1.0 || q1 * p <= -1.0 {
                    return Err(Error::QuadratureFailure(format!(
                        "|k|^{p} is non-integrable (endpoint exponents {q0}, {q1})"
                    )));
                }
                let rule = gauss_jacobi(48, q1 * p, q0 * p)?;
                let val = try_apply(&rule, |sigma| {
                    let k = self.eval(t, t * sigma)?;
                    let smooth = k.abs() / (sigma.powf(q0) * (1.0 - sigma).powf(q1));
                    Ok(smooth.powf(p))
                })?;
                Ok(t * val)
            }
            None => {
                let f = |s: f64| self.eval(t, s).map(|k| k.abs().powf(p)).unwrap_or(f64::NAN);
                quad::adaptive(f, 0.0, t, 1e-7)
            }
        }
    }

    /// ∫_0^1 k(1,s) s^e ds for homogeneous kernels, with singularity-aware
    /// quadrature per family. Errors with `QuadratureFailure` when the kernel
    /// has no usable structure.
    pub(crate) fn moment_integral(&self, e: f64) -> Result<f64> {
        match self {
            KernelSpec::Fractional { beta } => {
                // (1/Γ(β)) ∫ (1-s)^{β-1} s^e ds, split at 1/2 with the
                // singular factor as Jacobi weight on each side
                let cg = gamma_reciprocal(*beta);
                let left = gauss_jacobi(48, 0.0, e)?;
                let il = 0.5f64.powf(e + 1.0)
                    * left.apply(|w| (1.0 - 0.5 * w).powf(beta - 1.0));
                let right = gauss_jacobi(48, 0.0, beta - 1.0)?;
                let ir = 0.5f64.powf(*beta) * right.apply(|v| (1.0 - 0.5 * v).powf(e));
                Ok(cg * (il + ir))
            }
            KernelSpec::Ggbm { alpha, beta } => {
                // θ = s^{α/β}: (1/Γ(β)) ∫ (1-θ)^{β-1} θ^{eβ/α} dθ
                let q = e * beta / alpha;
                let cg = gamma_reciprocal(*beta);
                let left = gauss_jacobi(48, 0.0, q)?;
                let il = 0.5f64.powf(q + 1.0)
                    * left.apply(|w| (1.0 - 0.5 * w).powf(beta - 1.0));
                let right = gauss_jacobi(48, 0.0, beta - 1.0)?;
                let ir = 0.5f64.powf(*beta) * right.apply(|v| (1.0 - 0.5 * v).powf(q));
                Ok(cg * (il + ir))
            }
            KernelSpec::SaigoMaeda { a, b, mu, nu } => sm_moment_integral(*a, *b, *mu, *nu, e),
            KernelSpec::Stretched { inner, g } => {
                // ∫ k(1,θ^c) c θ^{c-1} θ^e dθ = ∫ k(1,s) s^{e/c} ds
                let StretchFn::Power { c } = g;
                inner.moment_integral(e / c)
            }
            _ => {
                let f = |s: f64| self.eval(1.0, s).map(|k| k * s.powf(e)).unwrap_or(f64::NAN);
                quad::adaptive(f, 0.0, 1.0, 1e-10)
            }
        }
    }
}

fn try_apply(rule: &quad::Rule, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut acc = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * f(x)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Saigo-Maeda internals
// ---------------------------------------------------------------------------

/// F3(ν/a-1, b/a, 1, μ, b/a; 1-θ, 1-1/θ) for θ = (s/t)^a ∈ (0,1).
///
/// Moderate θ goes through the generic F3 single-sum; small θ, where that sum
/// needs O(1/θ) terms, uses the Mellin-residue expansion of the kernel's
/// profile function (see `sm_residue_terms`).
pub(crate) fn sm_f3_factor(a: f64, b: f64, mu: f64, nu: f64, theta: f64) -> Result<f64> {
    if (nu - a).abs() < 1e-12 {
        // α = ν/a - 1 = 0 collapses F3 to (1-y)^{-μ} = θ^μ
        return Ok(theta.powf(mu));
    }
    if theta >= SM_RESIDUE_SWITCH {
        let p = F3Params::new(nu / a - 1.0, b / a, 1.0, mu, b / a)?;
        appell_f3(&p, 1.0 - theta, 1.0 - 1.0 / theta)
    } else {
        let g = b / a;
        let h: f64 = sm_residue_terms(a, b, mu, nu)?
            .iter()
            .map(|&(c, p)| c * theta.powf(p))
            .sum();
        Ok(ln_gamma(g).exp() * theta.powf(g) * (1.0 - theta).powf(1.0 - g) * h)
    }
}

const SM_RESIDUE_SWITCH: f64 = 0.25;
const SM_RESIDUE_TERMS: usize = 120;

/// Power expansion H(θ) = Σ coef · θ^exponent of the profile
/// H(θ) = (1-θ)^{b/a-1} θ^{-b/a} F3(...) / Γ(b/a), whose Mellin transform on
/// (0,1) is m(ρ) = (ρ-1)/(ρ-ν/a) · Γ(ρ+μ-b/a)/Γ(ρ+μ). Shifting the Mellin
/// inversion contour left collects residues at ρ = ν/a and ρ = b/a-μ-j.
pub(crate) fn sm_residue_terms(a: f64, b: f64, mu: f64, nu: f64) -> Result<Vec<(f64, f64)>> {
    let g = b / a;
    let na = nu / a;
    // near pole collision the individual residues blow up; evaluate at
    // mu ± δ and average (the sum is smooth in μ, so the error is O(δ²))
    let min_gap = (0..SM_RESIDUE_TERMS)
        .map(|j| (na - (g - mu - j as f64)).abs())
        .fold(f64::INFINITY, f64::min);
    if min_gap < 1e-7 {
        let d = 3e-7;
        let lo = sm_residue_terms(a, b, mu - d, nu)?;
        let hi = sm_residue_terms(a, b, mu + d, nu)?;
        return Ok(lo
            .into_iter()
            .zip(hi)
            .map(|((c0, p0), (c1, p1))| (0.5 * (c0 + c1), 0.5 * (p0 + p1)))
            .collect());
    }
    let mut terms = Vec::with_capacity(SM_RESIDUE_TERMS + 1);
    // residue at ρ = ν/a
    let c_nu = (na - 1.0) * specfun::gamma(na + mu - g) * gamma_reciprocal(na + mu);
    terms.push((c_nu, -na));
    // residues at ρ_j = b/a - μ - j from the Γ(ρ+μ-b/a) pole ladder
    let mut fact = 1.0f64;
    for j in 0..SM_RESIDUE_TERMS {
        let jf = j as f64;
        if j > 0 {
            fact *= jf;
        }
        let rho = g - mu - jf;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let coef = (rho - 1.0) / (rho - na) * sign / fact * gamma_reciprocal(g - jf);
        terms.push((coef, -rho));
    }
    Ok(terms)
}

/// ∫_0^1 k(1,s) s^e ds for the Saigo-Maeda kernel: substitute θ = s^a, put
/// the (1-θ)^{b/a-1} factor into a Jacobi weight on [θ*, 1], and integrate
/// the tail (0, θ*] in closed form from the residue expansion.
fn sm_moment_integral(a: f64, b: f64, mu: f64, nu: f64, e: f64) -> Result<f64> {
    let g = b / a;
    let q = (nu + e) / a - 1.0;
    let ts = SM_RESIDUE_SWITCH;
    // main part on [θ*, 1]: θ = 1 - (1-θ*) v
    let rule = gauss_jacobi(96, 0.0, g - 1.0)?;
    let main = (1.0 - ts).powf(g)
        * try_apply(&rule, |v| {
            let theta = 1.0 - (1.0 - ts) * v;
            Ok(theta.powf(q) * sm_f3_factor(a, b, mu, nu, theta)?)
        })?
        * gamma_reciprocal(g);
    // tail: integrand = H(θ) θ^{q + b/a}, term-by-term power integrals
    let mut tail = 0.0;
    for &(c, p) in &sm_residue_terms(a, b, mu, nu)? {
        let pk = q + g + p + 1.0;
        if pk <= 0.0 {
            return Err(Error::QuadratureFailure(format!(
                "non-integrable moment tail exponent {pk} for e={e}"
            )));
        }
        tail += c * ts.powf(pk) / pk;
    }
    Ok(main + tail)
}

// ---------------------------------------------------------------------------
// Kernel-aware Volterra-type integration ∫_0^t k(t,s) φ(s) ds
// ---------------------------------------------------------------------------

/// A linear quadrature plan: ∫₀ᵗ k(t,s) φ(s) ds ≈ Σ w_i φ(s_i). The kernel
/// values and endpoint weights are folded into the w_i, so the same plan
/// serves any integrand φ (series evaluations, empirical characteristic
/// functions, interpolants).
pub fn volterra_plan(k: &KernelSpec, t: f64) -> Result<Vec<(f64, f64)>> {
    if !(t > 0.0) {
        return Err(Error::DomainError(format!("need t > 0, got {t}")));
    }
    let mut plan = Vec::new();
    match k {
        KernelSpec::Fractional { beta } => {
            let scale = t.powf(*beta) * gamma_reciprocal(*beta);
            // s = tσ; right half [1/2, 1] with (1-σ)^{β-1} as the weight
            let right = gauss_jacobi(48, 0.0, beta - 1.0)?;
            let pref = 0.5f64.powf(*beta) * scale;
            for (&v, &w) in right.nodes.iter().zip(&right.weights) {
                plan.push((t * (1.0 - 0.5 * v), w * pref));
            }
            // left half: geometric panels toward 0 absorb φ's fractional powers
            for (sigma, w) in panel_nodes(0.5, 42) {
                plan.push((t * sigma, w * (1.0 - sigma).powf(beta - 1.0) * scale));
            }
        }
        KernelSpec::Ggbm { alpha, beta } => {
            // θ = σ^{α/β} removes the σ = 0 endpoint singularity entirely
            let a0 = alpha / beta;
            let scale = t.powf(*alpha) * gamma_reciprocal(*beta);
            let right = gauss_jacobi(48, 0.0, beta - 1.0)?;
            let pref = 0.5f64.powf(*beta) * scale;
            for (&v, &w) in right.nodes.iter().zip(&right.weights) {
                let theta: f64 = 1.0 - 0.5 * v;
                plan.push((t * theta.powf(1.0 / a0), w * pref));
            }
            for (theta, w) in panel_nodes(0.5, 42) {
                plan.push((
                    t * theta.powf(1.0 / a0),
                    w * (1.0 - theta).powf(beta - 1.0) * scale,
                ));
            }
        }
        KernelSpec::SaigoMaeda { a, b, mu, nu } => {
            let g = b / a;
            let ts = SM_RESIDUE_SWITCH;
            let scale = t.powf(*b);
            // main [θ*,1]: Jacobi weight at θ = 1, F3 factor folded in
            let rule = gauss_jacobi(96, 0.0, g - 1.0)?;
            let pref = (1.0 - ts).powf(g) * gamma_reciprocal(g) * scale;
            for (&v, &w) in rule.nodes.iter().zip(&rule.weights) {
                let theta = 1.0 - (1.0 - ts) * v;
                let f3 = sm_f3_factor(*a, *b, *mu, *nu, theta)?;
                plan.push((
                    t * theta.powf(1.0 / a),
                    w * pref * theta.powf(nu / a - 1.0) * f3,
                ));
            }
            // tail (0,θ*]: profile H(θ) θ^{ν/a-1+b/a} from the residue
            // expansion, geometric panels plus a closed-form remainder with
            // φ frozen at the smallest node
            let terms = sm_residue_terms(*a, *b, *mu, *nu)?;
            let profile =
                |theta: f64| -> f64 { terms.iter().map(|&(c, p)| c * theta.powf(p)).sum() };
            let qpow = nu / a - 1.0 + g;
            let levels = 40;
            for (theta, w) in panel_nodes(ts, levels) {
                plan.push((
                    t * theta.powf(1.0 / a),
                    w * profile(theta) * theta.powf(qpow) * scale,
                ));
            }
            let theta_min = ts * 0.5f64.powi(levels as i32 + 1);
            let mut rem = 0.0;
            for &(c, p) in &terms {
                let pk = qpow + p + 1.0;
                if pk > 0.0 {
                    rem += c * theta_min.powf(pk) / pk;
                }
            }
            plan.push((t * theta_min.powf(1.0 / a), rem * scale));
        }
        KernelSpec::Convolution { kfun, beta, .. } => {
            // v = t - s; the envelope exponent shapes the weight at v = 0
            let half = 0.5 * t;
            let left = gauss_jacobi(64, 0.0, beta - 1.0)?;
            let pref = half.powf(*beta);
            for (&u, &w) in left.nodes.iter().zip(&left.weights) {
                let v = half * u;
                plan.push((t - v, w * pref * kfun(v) * v.powf(1.0 - beta)));
            }
            // s ∈ (0, t/2]: φ carries its own fractional structure at s → 0
            for (sigma, w) in panel_nodes(0.5, 42) {
                let s = t * sigma;
                plan.push((s, w * t * kfun(t - s)));
            }
        }
        KernelSpec::Stretched { inner, g } => {
            // ∫ k(g(t), g(s)) ġ(s) φ(s) ds = ∫ k(g(t), r) φ(g⁻¹(r)) dr
            let StretchFn::Power { c } = g;
            for (r, w) in volterra_plan(inner, g.apply(t))? {
                plan.push((r.powf(1.0 / c), w));
            }
        }
        KernelSpec::Custom { .. } => {
            // no structure known: geometric panels toward both endpoints
            for (sigma, w) in panel_nodes(0.5, 36) {
                let s = t * sigma;
                plan.push((s, w * t * k.eval(t, s)?));
                let s2 = t * (1.0 - sigma);
                plan.push((s2, w * t * k.eval(t, s2)?));
            }
        }
    }
    Ok(plan)
}

/// Σ w φ(s) over a kernel plan.
pub(crate) fn volterra_integral<F>(
    k: &KernelSpec,
    t: f64,
    phi: F,
) -> Result<num_complex::Complex64>
where
    F: Fn(f64) -> Result<num_complex::Complex64>,
{
    apply_plan(&volterra_plan(k, t)?, phi)
}

pub(crate) fn apply_plan<F>(plan: &[(f64, f64)], phi: F) -> Result<num_complex::Complex64>
where
    F: Fn(f64) -> Result<num_complex::Complex64>,
{
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for &(s, w) in plan {
        acc += phi(s)? * w;
    }
    Ok(acc)
}

/// Gauss-Legendre nodes and weights over the geometric panels
/// [x 2^{-j-1}, x 2^{-j}], j = 0..=levels.
fn panel_nodes(x: f64, levels: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(16);
    let mut out = Vec::with_capacity(16 * (levels + 1));
    let mut hi = x;
    for _ in 0..=levels {
        let lo = 0.5 * hi;
        let len = hi - lo;
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            out.push((lo + len * u, w * len));
        }
        hi = lo;
    }
    out
}
