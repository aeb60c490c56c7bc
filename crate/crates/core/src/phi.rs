//! The series Φ(t,λ) = Σ c_n(t) λⁿ attached to a time kernel: coefficient
//! recursions (general, homogeneous, Saigo-Maeda), closed forms in the
//! Mittag-Leffler family, the Volterra-equation residual, and sampled probes
//! for complete monotonicity and positive definiteness.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{apply_plan, volterra_integral, volterra_plan, KernelSpec};
use crate::quad;
use crate::specfun::{self, MLParams};

/// Tail-bound metadata (K_T, α*, ε) from the kernel integrability check,
/// valid on t ≤ t_max.
#[derive(Debug, Clone, Copy)]
pub struct TailBoundParams {
    pub k_t: f64,
    pub alpha_star: f64,
    pub eps: f64,
    pub t_max: f64,
}

impl TailBoundParams {
    /// |c_n(t)| ≤ K_T^n T^{n(1-α*)} Π_{l=1}^{n-1} (l(1-α*)(1+1/ε)+1)^{-ε/(1+ε)}.
    pub fn coeff_bound(&self, n: usize) -> f64 {
        let a = 1.0 - self.alpha_star;
        let p = -self.eps / (1.0 + self.eps);
        let mut b = (self.k_t * self.t_max.powf(a)).powi(n as i32);
        for l in 1..n {
            b *= (l as f64 * a * (1.0 + 1.0 / self.eps) + 1.0).powf(p);
        }
        b
    }

    /// Σ_{n>N} bound(n) |λ|^n, closed geometrically once the term ratio
    /// drops below 1.
    pub fn tail_bound(&self, n_from: usize, lambda_abs: f64) -> f64 {
        let mut total = 0.0;
        let mut term = self.coeff_bound(n_from + 1) * lambda_abs.powi(n_from as i32 + 1);
        let a = 1.0 - self.alpha_star;
        let p = -self.eps / (1.0 + self.eps);
        for n in (n_from + 1)..(n_from + 4000) {
            total += term;
            let ratio = self.k_t
                * self.t_max.powf(a)
                * lambda_abs
                * (n as f64 * a * (1.0 + 1.0 / self.eps) + 1.0).powf(p);
            if ratio < 1.0 {
                return total + term * ratio / (1.0 - ratio);
            }
            term *= ratio;
            if !term.is_finite() {
                return f64::INFINITY;
            }
        }
        f64::INFINITY
    }

    /// Smallest N with tail bound below `tol` on |λ| ≤ lambda_max, capped.
    pub fn suggest_truncation(&self, lambda_max: f64, tol: f64, cap: usize) -> usize {
        for n in 1..cap {
            if self.tail_bound(n, lambda_max) < tol {
                return n;
            }
        }
        cap
    }
}

/// Closed-form families for Φ.
#[derive(Debug, Clone)]
pub enum ClosedFormPhi {
    /// Φ(t,λ) = exp(λ t^e).
    Exponential,
    /// Φ(t,λ) = E_β(λ t^e).
    MittagLeffler { beta: f64 },
    /// Φ(t,λ) = Γ(λ2) E^{λ3}_{λ1,λ2}(λ t^e).
    Prabhakar { params: MLParams },
}

/// Monotone cubic (Fritsch-Carlson) interpolant.
#[derive(Debug, Clone)]
pub(crate) struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
    /// continue with the first segment's slope below xs[0] instead of
    /// clamping (used by the log-log representation, where this extends a
    /// leading power law exactly)
    extrapolate_low: bool,
}

impl Pchip {
    pub(crate) fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        assert!(n >= 2 && n == ys.len());
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut ds = vec![0.0; n];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                ds[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // one-sided endpoint slopes, clipped to preserve shape
        let end = |h0: f64, h1: f64, d0: f64, d1: f64| -> f64 {
            let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if d * d0 <= 0.0 {
                0.0
            } else if d0 * d1 < 0.0 && d.abs() > 3.0 * d0.abs() {
                3.0 * d0
            } else {
                d
            }
        };
        if n == 2 {
            ds[0] = delta[0];
            ds[1] = delta[0];
        } else {
            ds[0] = end(h[0], h[1], delta[0], delta[1]);
            ds[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Pchip {
            xs,
            ys,
            ds,
            extrapolate_low: false,
        }
    }

    pub(crate) fn with_low_extrapolation(mut self) -> Self {
        self.extrapolate_low = true;
        self
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            if self.extrapolate_low {
                return self.ys[0] + self.ds[0] * (x - self.xs[0]);
            }
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
    }

    pub(crate) fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }
}

/// Interpolant of one tabulated coefficient level. Positive levels are
/// represented in log-log coordinates, where the power-law profiles of
/// homogeneous kernels interpolate exactly; sign-changing levels fall back
/// to the plain monotone cubic.
#[derive(Debug, Clone)]
pub(crate) struct LevelInterp {
    inner: Pchip,
    log_log: bool,
    value_at_zero: f64,
}

impl LevelInterp {
    fn build(grid: &[f64], vals: &[f64]) -> Self {
        debug_assert!(grid[0] == 0.0);
        let positive = vals[1..].iter().all(|&v| v > 0.0);
        if positive && grid.len() >= 3 {
            let lx: Vec<f64> = grid[1..].iter().map(|&t| t.ln()).collect();
            let ly: Vec<f64> = vals[1..].iter().map(|&v| v.ln()).collect();
            LevelInterp {
                inner: Pchip::new(lx, ly).with_low_extrapolation(),
                log_log: true,
                value_at_zero: vals[0],
            }
        } else {
            LevelInterp {
                inner: Pchip::new(grid.to_vec(), vals.to_vec()),
                log_log: false,
                value_at_zero: vals[0],
            }
        }
    }

    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.value_at_zero;
        }
        if self.log_log {
            self.inner.eval(t.ln()).exp()
        } else {
            self.inner.eval(t)
        }
    }
}

#[derive(Debug, Clone)]
pub enum PhiMode {
    /// Φ(t,λ) = Σ ĉ_n (λ t^β)^n; `beta` is the homogeneity exponent
    /// (degree + 1).
    HomogeneousCoeffs { coeffs: Vec<f64>, beta: f64 },
    /// c_n(t) tabulated on a grid, interpolated monotone-cubically.
    GeneralCoeffs {
        t_grid: Vec<f64>,
        interps: Vec<LevelInterp>,
    },
    /// Exact closed form with time exponent e: the series argument is λ t^e.
    ClosedForm {
        family: ClosedFormPhi,
        time_exponent: f64,
    },
}

/// Truncated representation of Φ(t,λ).
#[derive(Debug, Clone)]
pub struct PhiSeries {
    pub mode: PhiMode,
    pub truncation: usize,
    pub tail_bound: Option<TailBoundParams>,
    /// tolerance that `eval` enforces on the reported truncation error
    pub eval_tol: f64,
}

pub const DEFAULT_TRUNCATION_CAP: usize = 200;

impl PhiSeries {
    /// Coefficients ĉ_n for a homogeneous kernel, from the moment-integral
    /// recursion ĉ_n = ĉ_{n-1} ∫ k(1,s) s^{β(n-1)} ds by singularity-aware
    /// quadrature.
    pub fn coeffs_homogeneous(k: &KernelSpec, n_max: usize) -> Result<PhiSeries> {
        let beta = k.homogeneity_exponent().ok_or_else(|| {
            Error::DomainError(format!("kernel {k:?} carries no homogeneity metadata"))
        })?;
        if n_max < 1 {
            return Err(Error::DomainError("need n_max >= 1".into()));
        }
        let mut coeffs = Vec::with_capacity(n_max + 1);
        coeffs.push(1.0);
        for n in 1..=n_max {
            let m = k.moment_integral(beta * (n as f64 - 1.0))?;
            coeffs.push(coeffs[n - 1] * m);
        }
        Ok(PhiSeries {
            mode: PhiMode::HomogeneousCoeffs { coeffs, beta },
            truncation: n_max,
            tail_bound: None,
            eval_tol: 1e-9,
        })
    }

    /// Coefficients for the Saigo-Maeda kernel from the closed gamma-ratio
    /// recursion (no quadrature):
    /// ĉ_n/ĉ_{n-1} = Γ(((n-1)b+ν)/a + μ)/Γ((nb+ν)/a + μ) · (n + (ν-a)/b)/n.
    pub fn coeffs_saigo_maeda(a: f64, b: f64, mu: f64, nu: f64, n_max: usize) -> Result<PhiSeries> {
        // same admissibility as the kernel constructor
        let _ = KernelSpec::saigo_maeda(a, b, mu, nu)?;
        let lam3 = 1.0 + (nu - a) / b;
        let mut coeffs = Vec::with_capacity(n_max + 1);
        coeffs.push(1.0);
        for n in 1..=n_max {
            let nf = n as f64;
            let g_prev = specfun::ln_gamma_signed(((nf - 1.0) * b + nu) / a + mu);
            let g_next = specfun::ln_gamma_signed((nf * b + nu) / a + mu);
            if g_prev.1 == 0.0 || g_next.1 == 0.0 {
                return Err(Error::DomainError(format!(
                    "gamma pole in the coefficient recursion at n={n}"
                )));
            }
            let ratio = (g_prev.0 - g_next.0).exp() * g_prev.1 * g_next.1 * ((nf - 1.0) + lam3)
                / nf;
            coeffs.push(coeffs[n - 1] * ratio);
        }
        Ok(PhiSeries {
            mode: PhiMode::HomogeneousCoeffs { coeffs, beta: b },
            truncation: n_max,
            tail_bound: None,
            eval_tol: 1e-9,
        })
    }

    /// c_n tabulated on `t_grid` by nested kernel-aware quadrature, with
    /// monotone-cubic interpolation of c_{n-1} between nodes.
    pub fn coeffs_general(k: &KernelSpec, t_grid: &[f64], n_max: usize) -> Result<PhiSeries> {
        if t_grid.len() < 4 {
            return Err(Error::DomainError("need at least 4 grid nodes".into()));
        }
        let mut grid: Vec<f64> = t_grid.to_vec();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        if grid[0] < 0.0 {
            return Err(Error::DomainError("t_grid must be nonnegative".into()));
        }
        if grid[0] > 0.0 {
            grid.insert(0, 0.0);
        }
        let mut plans = Vec::with_capacity(grid.len());
        for &t in &grid {
            plans.push(if t == 0.0 {
                None
            } else {
                Some(volterra_plan(k, t)?)
            });
        }
        let mut interps: Vec<LevelInterp> = Vec::with_capacity(n_max + 1);
        interps.push(LevelInterp::build(&grid, &vec![1.0; grid.len()]));
        for n in 1..=n_max {
            let prev = interps[n - 1].clone();
            let mut vals = vec![0.0; grid.len()];
            for (j, plan) in plans.iter().enumerate() {
                if let Some(plan) = plan {
                    let v = apply_plan(plan, |s| Ok(Complex64::new(prev.eval(s), 0.0)))?;
                    vals[j] = v.re;
                }
            }
            interps.push(LevelInterp::build(&grid, &vals));
        }
        Ok(PhiSeries {
            mode: PhiMode::GeneralCoeffs {
                t_grid: grid,
                interps,
            },
            truncation: n_max,
            tail_bound: None,
            eval_tol: 1e-9,
        })
    }

    pub fn closed_exponential() -> PhiSeries {
        PhiSeries {
            mode: PhiMode::ClosedForm {
                family: ClosedFormPhi::Exponential,
                time_exponent: 1.0,
            },
            truncation: usize::MAX,
            tail_bound: None,
            eval_tol: 1e-12,
        }
    }

    pub fn closed_mittag_leffler(beta: f64, time_exponent: f64) -> Result<PhiSeries> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::DomainError(format!(
                "closed Mittag-Leffler form requires beta in (0,1], got {beta}"
            )));
        }
        Ok(PhiSeries {
            mode: PhiMode::ClosedForm {
                family: ClosedFormPhi::MittagLeffler { beta },
                time_exponent,
            },
            truncation: usize::MAX,
            tail_bound: None,
            eval_tol: 1e-12,
        })
    }

    pub fn closed_prabhakar(params: MLParams, time_exponent: f64) -> Result<PhiSeries> {
        Ok(PhiSeries {
            mode: PhiMode::ClosedForm {
                family: ClosedFormPhi::Prabhakar { params },
                time_exponent,
            },
            truncation: usize::MAX,
            tail_bound: None,
            eval_tol: 1e-12,
        })
    }

    /// The natural closed form for a kernel family, when one exists.
    pub fn closed_for_kernel(k: &KernelSpec) -> Option<PhiSeries> {
        match k {
            KernelSpec::Fractional { beta } if *beta == 1.0 => Some(Self::closed_exponential()),
            KernelSpec::Fractional { beta } => Self::closed_mittag_leffler(*beta, *beta).ok(),
            KernelSpec::Ggbm { alpha, beta } => Self::closed_mittag_leffler(*beta, *alpha).ok(),
            KernelSpec::SaigoMaeda { a, b, mu, nu } => {
                let p = MLParams::from_saigo_maeda(*a, *b, *mu, *nu).ok()?;
                Some(PhiSeries {
                    mode: PhiMode::ClosedForm {
                        family: ClosedFormPhi::Prabhakar { params: p },
                        time_exponent: *b,
                    },
                    truncation: usize::MAX,
                    tail_bound: None,
                    eval_tol: 1e-12,
                })
            }
            KernelSpec::Stretched { inner, g } => {
                let base = Self::closed_for_kernel(inner)?;
                let crate::kernels::StretchFn::Power { c } = g;
                match base.mode {
                    PhiMode::ClosedForm {
                        family,
                        time_exponent,
                    } => Some(PhiSeries {
                        mode: PhiMode::ClosedForm {
                            family,
                            time_exponent: time_exponent * c,
                        },
                        ..base
                    }),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    pub fn with_tail_bound(mut self, tb: TailBoundParams) -> PhiSeries {
        self.tail_bound = Some(tb);
        self
    }

    pub fn with_eval_tol(mut self, tol: f64) -> PhiSeries {
        self.eval_tol = tol;
        self
    }

    /// ĉ_n of coefficient modes (homogeneous only).
    pub fn coefficients(&self) -> Option<&[f64]> {
        match &self.mode {
            PhiMode::HomogeneousCoeffs { coeffs, .. } => Some(coeffs),
            _ => None,
        }
    }

    /// Interpolated c_n(t) of the general mode.
    pub fn coefficient_at(&self, n: usize, t: f64) -> Option<f64> {
        match &self.mode {
            PhiMode::GeneralCoeffs { interps, .. } => interps.get(n).map(|p| p.eval(t)),
            PhiMode::HomogeneousCoeffs { coeffs, beta } => {
                coeffs.get(n).map(|c| c * t.powf(beta * n as f64))
            }
            _ => None,
        }
    }

    /// Φ(t, λ).
    pub fn eval(&self, t: f64, lambda: Complex64) -> Result<Complex64> {
        if t < 0.0 {
            return Err(Error::DomainError(format!("need t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        match &self.mode {
            PhiMode::ClosedForm {
                family,
                time_exponent,
            } => {
                let w = lambda * t.powf(*time_exponent);
                match family {
                    ClosedFormPhi::Exponential => Ok(w.exp()),
                    ClosedFormPhi::MittagLeffler { beta } => specfun::ml_one_param(*beta, w),
                    ClosedFormPhi::Prabhakar { params } => {
                        let g2 = specfun::gamma(params.lambda2);
                        Ok(specfun::mittag_leffler(params, w)? * g2)
                    }
                }
            }
            PhiMode::HomogeneousCoeffs { coeffs, beta } => {
                let w = lambda * t.powf(*beta);
                self.sum_with_tail_check(coeffs.iter().copied(), w)
            }
            PhiMode::GeneralCoeffs { t_grid, interps } => {
                let t_max = *t_grid.last().unwrap();
                if t > t_max * (1.0 + 1e-12) {
                    return Err(Error::DomainError(format!(
                        "t = {t} outside the tabulated range [0, {t_max}]"
                    )));
                }
                let mut sum = Complex64::new(0.0, 0.0);
                let mut w = Complex64::new(1.0, 0.0);
                let mut last: f64 = 0.0;
                let mut prev: f64 = f64::NAN;
                for p in interps {
                    let term = w * p.eval(t);
                    sum += term;
                    prev = last;
                    last = term.norm();
                    w *= lambda;
                }
                self.check_tail(last, prev, lambda.norm(), sum.norm())?;
                Ok(sum)
            }
        }
    }

    fn sum_with_tail_check(
        &self,
        coeffs: impl Iterator<Item = f64>,
        w: Complex64,
    ) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut wn = Complex64::new(1.0, 0.0);
        let mut last: f64 = 0.0;
        let mut prev: f64 = f64::NAN;
        for c in coeffs {
            let term = wn * c;
            sum += term;
            prev = last;
            last = term.norm();
            wn *= w;
        }
        self.check_tail(last, prev, w.norm(), sum.norm())?;
        Ok(sum)
    }

    /// Truncation-error control: geometric closure of the term ratio when it
    /// is already contracting, otherwise the formal coefficient bound.
    fn check_tail(&self, last: f64, prev: f64, lam_abs: f64, sum_abs: f64) -> Result<()> {
        if last == 0.0 {
            // terms underflowed: the series has fully converged
            return Ok(());
        }
        let scale = sum_abs.max(1.0);
        let ratio = if prev > 0.0 { last / prev } else { 0.0 };
        let geo = if ratio < 0.95 {
            Some(last * ratio / (1.0 - ratio))
        } else {
            None
        };
        let formal = self.tail_bound.map(|tb| tb.tail_bound(self.truncation, lam_abs));
        let est = match (geo, formal) {
            (Some(g), Some(f)) => g.min(f),
            (Some(g), None) => g,
            (None, Some(f)) => f,
            (None, None) => f64::INFINITY,
        };
        if est > self.eval_tol * scale {
            return Err(Error::TruncationError(format!(
                "estimated tail {est:.3e} exceeds tolerance at N = {}",
                self.truncation
            )));
        }
        Ok(())
    }
}

/// |Φ(t,-λ) - 1 + λ ∫₀ᵗ k(t,s) Φ(s,-λ) ds|: the defect in the Volterra
/// equation of the second kind that Φ must satisfy.
pub fn volterra_residual(
    series: &PhiSeries,
    k: &KernelSpec,
    lambda: Complex64,
    t: f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::DomainError(format!("need t > 0, got {t}")));
    }
    let lhs = series.eval(t, -lambda)?;
    let integral = volterra_integral(k, t, |s| series.eval(s, -lambda))?;
    Ok((lhs - Complex64::new(1.0, 0.0) + lambda * integral).norm())
}

pub struct CmReport {
    pub pass: bool,
    /// most negative normalized value of (-1)^n Δ_h^n f over the probe grid
    pub worst_violation: f64,
}

/// Complete-monotonicity probe: checks (-1)^n Δ_h^n f(x) ≥ -tol·|f(x)| on a
/// log grid up to x_max for n ≤ order, h adapted per x. Sampled evidence,
/// not proof.
pub fn cm_probe(
    f: impl Fn(f64) -> Result<f64>,
    x_max: f64,
    order: usize,
) -> Result<CmReport> {
    const TOL: f64 = 1e-8;
    if order < 1 || !(x_max > 0.0) {
        return Err(Error::DomainError(
            "cm_probe needs order >= 1 and x_max > 0".into(),
        ));
    }
    let binom = |n: usize, k: usize| -> f64 {
        let mut b = 1.0;
        for i in 0..k {
            b = b * (n - i) as f64 / (i + 1) as f64;
        }
        b
    };
    let mut worst = f64::INFINITY;
    for &x in &quad::logspace(x_max * 1e-3, x_max * 0.999, 40) {
        let h = 0.5 * x / order as f64;
        // forward differences of all orders from one table of f-values
        let values: Vec<f64> = (0..=order)
            .map(|k| f(x + k as f64 * h))
            .collect::<Result<_>>()?;
        let fx = values[0].abs().max(1e-300);
        for n in 0..=order {
            let mut delta = 0.0;
            for k in 0..=n {
                let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
                delta += sign * binom(n, k) * values[k];
            }
            let signed = if n % 2 == 0 { delta } else { -delta };
            worst = worst.min(signed / fx);
        }
    }
    Ok(CmReport {
        pass: worst >= -TOL,
        worst_violation: worst,
    })
}

pub struct PdReport {
    pub pass: bool,
    pub min_eigenvalue: f64,
}

/// Positive-definiteness probe: assembles [f(p_i - p_j)] and checks the
/// smallest eigenvalue of its Hermitian part (necessary Bochner condition on
/// samples).
pub fn pd_probe(f: impl Fn(f64) -> Result<Complex64>, p_grid: &[f64]) -> Result<PdReport> {
    const TOL: f64 = 1e-8;
    let n = p_grid.len();
    if n < 2 {
        return Err(Error::DomainError("pd_probe needs at least 2 nodes".into()));
    }
    let mut re = DMatrix::zeros(n, n);
    let mut im = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = f(p_grid[i] - p_grid[j])?;
            re[(i, j)] = v.re;
            im[(i, j)] = v.im;
        }
    }
    // Hermitian part
    let a = 0.5 * (&re + re.transpose());
    let b = 0.5 * (&im - im.transpose());
    // eigenvalues of A + iB (Hermitian) = eigenvalues of [[A, -B], [B, A]]
    let mut emb = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            emb[(i, j)] = a[(i, j)];
            emb[(n + i, n + j)] = a[(i, j)];
            emb[(i, n + j)] = -b[(i, j)];
            emb[(n + i, j)] = b[(i, j)];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(emb);
    let min_eig = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    let scale = (0..n).map(|i| a[(i, i)].abs()).fold(1.0f64, f64::max);
    Ok(PdReport {
        pass: min_eig >= -TOL * scale,
        min_eigenvalue: min_eig,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::StretchFn;
    use crate::specfun::gamma_reciprocal;
    use std::sync::Arc;

    fn cr(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn fractional_coeffs_match_reciprocal_gamma() {
        for &beta in &[0.5, 1.0] {
            let k = KernelSpec::fractional(beta).unwrap();
            let s = PhiSeries::coeffs_homogeneous(&k, 8).unwrap();
            let c = s.coefficients().unwrap();
            for (n, &cn) in c.iter().enumerate() {
                let want = gamma_reciprocal(n as f64 * beta + 1.0);
                assert!(
                    (cn - want).abs() < 1e-11 * want.abs(),
                    "beta={beta} n={n}: {cn} vs {want}"
                );
            }
        }
    }

    #[test]
    fn ggbm_coeffs_are_fractional_with_alpha_scaling() {
        let (alpha, beta) = (1.3, 0.65);
        let k = KernelSpec::ggbm(alpha, beta).unwrap();
        let s = PhiSeries::coeffs_homogeneous(&k, 40).unwrap();
        for (n, &cn) in s.coefficients().unwrap().iter().enumerate().take(9) {
            let want = gamma_reciprocal(n as f64 * beta + 1.0);
            assert!((cn - want).abs() < 1e-10 * want.abs(), "n={n}");
        }
        // Φ(t,λ) = E_β(t^α λ)
        let (t, lam) = (1.4, -0.8);
        let got = s.eval(t, cr(lam)).unwrap();
        let want = specfun::ml_one_param(beta, cr(lam * t.powf(alpha))).unwrap();
        assert!((got - want).norm() < 1e-9);
    }

    #[test]
    fn saigo_maeda_recursion_vs_quadrature() {
        let (a, b, mu, nu) = (1.2, 0.9, 0.4, 0.8);
        let rec = PhiSeries::coeffs_saigo_maeda(a, b, mu, nu, 8).unwrap();
        let k = KernelSpec::saigo_maeda(a, b, mu, nu).unwrap();
        let quad_route = PhiSeries::coeffs_homogeneous(&k, 8).unwrap();
        let (cr_, cq) = (rec.coefficients().unwrap(), quad_route.coefficients().unwrap());
        for n in 0..=8 {
            assert!(
                (cr_[n] - cq[n]).abs() < 1e-8 * cr_[n].abs(),
                "n={n}: {} vs {}",
                cr_[n],
                cq[n]
            );
        }
    }

    #[test]
    fn saigo_maeda_special_cases() {
        // (a=1, b=β, μ=0, ν=1): ĉ_n = 1/Γ(nβ+1)
        let beta = 0.5;
        let s = PhiSeries::coeffs_saigo_maeda(1.0, beta, 0.0, 1.0, 10).unwrap();
        for (n, &cn) in s.coefficients().unwrap().iter().enumerate() {
            let want = gamma_reciprocal(n as f64 * beta + 1.0);
            assert!((cn - want).abs() < 1e-11 * want.abs(), "n={n}");
        }
        // ν = a: ĉ_n = Γ(μ+1)/Γ(n b/a + μ + 1)
        let (a, b, mu) = (1.3, 0.9, 0.7);
        let s = PhiSeries::coeffs_saigo_maeda(a, b, mu, a, 10).unwrap();
        for (n, &cn) in s.coefficients().unwrap().iter().enumerate() {
            let want = specfun::gamma(mu + 1.0)
                * gamma_reciprocal(n as f64 * b / a + mu + 1.0);
            assert!((cn - want).abs() < 1e-10 * want.abs(), "n={n}: {cn} vs {want}");
        }
    }

    #[test]
    fn general_coeffs_fractional_power_law() {
        // c_n(t) = t^{nβ}/Γ(nβ+1), checked at the grid nodes where the table
        // is exact (between nodes the interpolant carries its own error)
        let beta = 0.5;
        let k = KernelSpec::fractional(beta).unwrap();
        let mut grid = crate::quad::logspace(1e-5, 2.0, 160);
        grid.insert(0, 0.0);
        let s = PhiSeries::coeffs_general(&k, &grid, 6).unwrap();
        for n in 1..=6 {
            for &t in grid.iter().step_by(13) {
                if t == 0.0 {
                    continue;
                }
                let got = s.coefficient_at(n, t).unwrap();
                let want = t.powf(n as f64 * beta) * gamma_reciprocal(n as f64 * beta + 1.0);
                assert!(
                    (got - want).abs() < 1e-7 * want.abs().max(1e-12),
                    "n={n}, t={t}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn phi_at_zero_is_one() {
        let k = KernelSpec::fractional(0.7).unwrap();
        let s = PhiSeries::coeffs_homogeneous(&k, 12).unwrap();
        assert_eq!(s.eval(0.0, cr(-3.0)).unwrap(), cr(1.0));
    }

    #[test]
    fn phi_eval_matches_mittag_leffler() {
        let beta = 0.6;
        let k = KernelSpec::fractional(beta).unwrap();
        let s = PhiSeries::coeffs_homogeneous(&k, 60).unwrap();
        for &(t, lam) in &[(0.5, -1.0), (1.0, -2.0), (2.0, 0.7)] {
            let got = s.eval(t, cr(lam)).unwrap();
            let want = specfun::ml_one_param(beta, cr(lam * t.powf(beta))).unwrap();
            assert!((got - want).norm() < 1e-9, "(t,λ)=({t},{lam})");
        }
    }

    #[test]
    fn volterra_residual_exponential() {
        // β = 1, λ = 1: Φ(t,-1) = e^{-t} solves the equation exactly
        let k = KernelSpec::fractional(1.0).unwrap();
        let s = PhiSeries::closed_exponential();
        for &t in &[0.3, 1.0, 2.0] {
            let r = volterra_residual(&s, &k, cr(1.0), t).unwrap();
            assert!(r < 1e-10, "t={t}: {r}");
        }
    }

    #[test]
    fn volterra_residual_fractional_half() {
        let k = KernelSpec::fractional(0.5).unwrap();
        let s = PhiSeries::closed_mittag_leffler(0.5, 0.5).unwrap();
        let r = volterra_residual(&s, &k, cr(1.0), 1.0).unwrap();
        assert!(r < 1e-7, "{r}");
    }

    #[test]
    fn stretched_kernel_series_equals_time_substitution() {
        // Fractional(β) stretched by τ^c has ĉ_n unchanged and β ↦ cβ
        let (beta, c) = (0.6, 1.8);
        let k = KernelSpec::fractional(beta)
            .unwrap()
            .stretched(StretchFn::power(c).unwrap());
        let s = PhiSeries::coeffs_homogeneous(&k, 8).unwrap();
        for (n, &cn) in s.coefficients().unwrap().iter().enumerate() {
            let want = gamma_reciprocal(n as f64 * beta + 1.0);
            assert!((cn - want).abs() < 1e-10 * want.abs(), "n={n}: {cn} vs {want}");
        }
        match &s.mode {
            PhiMode::HomogeneousCoeffs { beta: bh, .. } => {
                assert!((bh - c * beta).abs() < 1e-12)
            }
            _ => panic!(),
        }
    }

    #[test]
    fn convolution_coeff_bound_property() {
        // e^{-γt} |c_n(t)| ≤ (M Γ(β) t^β)^n / Γ(nβ+1)
        let (gam, beta) = (0.3, 0.6);
        let m_env = 1.0 / specfun::gamma(beta);
        let kf: crate::kernels::Kernel1Fn =
            Arc::new(move |v: f64| v.powf(beta - 1.0) / specfun::gamma(beta) * (gam * v).exp());
        let k = KernelSpec::convolution(kf, m_env, gam, beta).unwrap();
        let mut grid = crate::quad::logspace(1e-4, 1.5, 80);
        grid.insert(0, 0.0);
        let s = PhiSeries::coeffs_general(&k, &grid, 6).unwrap();
        for n in 0..=6 {
            for &t in &[0.2, 0.8, 1.5] {
                let cn = s.coefficient_at(n, t).unwrap();
                let bound = (m_env * specfun::gamma(beta) * t.powf(beta)).powi(n as i32)
                    * gamma_reciprocal(n as f64 * beta + 1.0);
                assert!(
                    (-gam * t).exp() * cn.abs() <= bound * (1.0 + 1e-6),
                    "n={n}, t={t}: {} vs {bound}",
                    (-gam * t).exp() * cn.abs()
                );
            }
        }
    }

    #[test]
    fn cm_probe_accepts_ml_rejects_cosine() {
        let ml = |x: f64| crate::specfun::ml_one_param(0.5, cr(-x)).map(|v| v.re);
        let rep = cm_probe(ml, 20.0, 8).unwrap();
        assert!(rep.pass, "worst violation {}", rep.worst_violation);
        let rep = cm_probe(|x| Ok(x.cos()), 6.0, 4).unwrap();
        assert!(!rep.pass);
        assert!(rep.worst_violation < -1e-3);
    }

    #[test]
    fn pd_probe_gaussian_passes_quadratic_fails() {
        let grid = crate::quad::linspace(-4.0, 4.0, 33);
        let rep = pd_probe(|p| Ok(cr((-p * p).exp())), &grid).unwrap();
        assert!(rep.pass, "min eig {}", rep.min_eigenvalue);
        let rep = pd_probe(|p| Ok(cr(1.0 + p * p)), &grid).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn truncation_error_reported_when_series_too_short() {
        let k = KernelSpec::fractional(0.5).unwrap();
        let s = PhiSeries::coeffs_homogeneous(&k, 4).unwrap();
        // |λ t^β| = 5 needs far more than 4 terms
        assert!(matches!(
            s.eval(1.0, cr(-5.0)),
            Err(Error::TruncationError(_))
        ));
    }

    #[test]
    fn tail_bound_suggests_reasonable_truncation() {
        let k = KernelSpec::fractional(0.5).unwrap();
        let rep = k.check_assumption(2.0, 0.05, 0.5).unwrap();
        let tb = TailBoundParams {
            k_t: rep.k_t,
            alpha_star: 0.5,
            eps: 0.05,
            t_max: 2.0,
        };
        let n = tb.suggest_truncation(5.0, 1e-10, DEFAULT_TRUNCATION_CAP);
        assert!(n > 5 && n <= DEFAULT_TRUNCATION_CAP, "{n}");
        // and the bound must actually dominate the true coefficients
        let s = PhiSeries::coeffs_homogeneous(&k, 12).unwrap();
        let c = s.coefficients().unwrap();
        for n in 0..=12 {
            let true_cn_t = c[n] * 2.0f64.powf(0.5 * n as f64);
            assert!(tb.coeff_bound(n) * (1.0 + 1e-9) >= true_cn_t, "n={n}");
        }
    }

    #[test]
    fn continuity_proxy_under_grid_refinement() {
        let k = KernelSpec::fractional(0.55).unwrap();
        let s = PhiSeries::coeffs_homogeneous(&k, 40).unwrap();
        let mut prev_jump = f64::INFINITY;
        for &n in &[50usize, 200, 800] {
            let ts = crate::quad::linspace(0.0, 2.0, n);
            let mut max_jump: f64 = 0.0;
            let mut last = s.eval(ts[0], cr(-1.3)).unwrap();
            for &t in &ts[1..] {
                let v = s.eval(t, cr(-1.3)).unwrap();
                max_jump = max_jump.max((v - last).norm());
                last = v;
            }
            assert!(max_jump < prev_jump);
            prev_jump = max_jump;
        }
        assert!(prev_jump < 0.08);
    }
}
