//! Quadrature rules: Gauss-Legendre, Gauss-Jacobi with algebraic endpoint
//! weights, and an adaptive panel integrator for kernels without known
//! endpoint exponents.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

/// A quadrature rule on `[0, 1]`: `∫ w(u) f(u) du ≈ Σ weights[i] f(nodes[i])`.
/// The weight function, if any, is baked into `weights`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Affine image of the rule on `[a, b]`. Only valid for rules whose
    /// weight is translation-invariant (Legendre), or when the caller
    /// accounts for the weight scaling separately.
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let len = b - a;
        Rule {
            nodes: self.nodes.iter().map(|&x| a + len * x).collect(),
            weights: self.weights.iter().map(|&w| w * len).collect(),
        }
    }
}

/// Gauss-Legendre rule on [0,1] (weight 1), by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess on [-1,1]
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n(x) and P_n'(x) by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 0.5 * w;
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[n - 1 - i] = 0.5 * w;
    }
    Rule { nodes, weights }
}

/// Gauss-Jacobi rule on [0,1] for the weight `(1-u)^alpha * u^beta`,
/// `alpha, beta > -1`, via the Golub-Welsch eigenvalue method.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rule> {
    if alpha <= -1.0 || beta <= -1.0 {
        return Err(Error::QuadratureFailure(format!(
            "non-integrable Jacobi weight exponents ({alpha}, {beta})"
        )));
    }
    assert!(n >= 1);
    // recurrence coefficients for monic Jacobi polynomials on [-1,1],
    // weight (1-x)^alpha (1+x)^beta
    let ab = alpha + beta;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    diag[0] = (beta - alpha) / (ab + 2.0);
    for (k, d) in diag.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        let denom = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
        *d = (beta * beta - alpha * alpha) / denom;
    }
    for (k, o) in off.iter_mut().enumerate() {
        let kf = (k + 1) as f64;
        let b2 = if k == 0 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab)
                / ((2.0 * kf + ab).powi(2) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0))
        };
        *o = b2.sqrt();
    }
    let mut jm = DMatrix::zeros(n, n);
    for i in 0..n {
        jm[(i, i)] = diag[i];
        if i + 1 < n {
            jm[(i, i + 1)] = off[i];
            jm[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(jm);
    // total mass on [-1,1]: 2^(a+b+1) B(a+1, b+1)
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0)
        + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (x, mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // map to [0,1]: x = 2u-1 and the weight picks up 2^-(a+b+1)
    let scale = 0.5f64.powf(ab + 1.0);
    Ok(Rule {
        nodes: pairs.iter().map(|p| 0.5 * (p.0 + 1.0)).collect(),
        weights: pairs.iter().map(|p| p.1 * scale).collect(),
    })
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `n` log-spaced points from `a` to `b` inclusive, `0 < a < b`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && a > 0.0 && b > a);
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Adaptive integration of `f` on `(a, b)` by panel doubling with geometric
/// refinement toward both endpoints. Used for kernels without endpoint
/// metadata; integrable singularities converge, non-integrable ones are
/// reported as `QuadratureFailure`.
pub fn adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let base = gauss_legendre(16);
    let eval = |lo: f64, hi: f64| base.mapped(lo, hi).apply(|x| f(x));
    let mut prev = f64::NAN;
    for level in 1..=14 {
        // geometric quarter-panels toward each endpoint; the depth grows
        // with the level so integrable endpoint singularities converge
        let depth = 6 + 4 * level;
        let mut total = 0.0;
        let len = b - a;
        let mut edges = Vec::new();
        for j in (0..=depth).rev() {
            edges.push(a + len * 0.5 * 0.25f64.powi(j as i32));
        }
        for j in 0..=depth {
            edges.push(b - len * 0.5 * 0.25f64.powi(j as i32));
        }
        let mut deepest = 0.0f64;
        for (i, w) in edges.windows(2).enumerate() {
            if w[1] > w[0] {
                let v = eval(w[0], w[1]);
                total += v;
                if i == 0 || i + 2 == edges.len() {
                    deepest = deepest.max(v.abs());
                }
            }
        }
        if !total.is_finite() {
            return Err(Error::QuadratureFailure(
                "integrand not finite on refinement".into(),
            ));
        }
        // a non-integrable endpoint keeps the deepest panels' share constant
        // under refinement while float resolution of the edges saturates
        if level >= 6 && deepest > 1e-3 * total.abs().max(1e-300) {
            return Err(Error::QuadratureFailure(format!(
                "deepest panel carries {deepest:e} of {total:e}: endpoint \
                 looks non-integrable"
            )));
        }
        if prev.is_finite() && (total - prev).abs() <= rel_tol * total.abs().max(1e-300) {
            return Ok(total);
        }
        prev = total;
    }
    Err(Error::QuadratureFailure(format!(
        "panel refinement did not converge (last estimate {prev:e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(8);
        for k in 0..=15 {
            let got = r.apply(|x| x.powi(k));
            let want = 1.0 / (k as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "x^{k}: {got} vs {want}");
        }
    }

    #[test]
    fn jacobi_reproduces_beta_moments() {
        // ∫ (1-u)^a u^b u^k du = B(a+1, b+k+1)
        let a = -0.5;
        let b = 0.3;
        let r = gauss_jacobi(12, a, b).unwrap();
        for k in 0..=8 {
            let got = r.apply(|u| u.powi(k));
            let want = (ln_gamma(a + 1.0) + ln_gamma(b + 1.0 + k as f64)
                - ln_gamma(a + b + 2.0 + k as f64))
            .exp();
            assert!(
                (got - want).abs() < 1e-13 * want,
                "moment {k}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn adaptive_handles_integrable_singularity() {
        // ∫0^1 s^-0.5 ds = 2
        let v = adaptive(|s| s.powf(-0.5), 0.0, 1.0, 1e-9).unwrap();
        assert!((v - 2.0).abs() < 1e-7, "{v}");
    }

    #[test]
    fn adaptive_rejects_non_integrable() {
        assert!(adaptive(|s| 1.0 / (1.0 - s), 0.0, 1.0, 1e-9).is_err());
    }
}
