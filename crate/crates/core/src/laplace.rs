//! Laplace-transform utilities: forward transforms by quadrature, and
//! numerical inversion by the de Hoog quotient-difference algorithm (Bromwich
//! line) and the fixed Talbot contour.
//!
//! The two inversion routes have complementary domains. Talbot needs the
//! transform to decay in the left half-plane and excels there; de Hoog only
//! samples a vertical line, so it also handles transforms that grow along
//! the negative axis (the Laplace transforms of the bounded-support scaler
//! densities in `randvar` are of that kind).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

/// ∫₀^∞ e^{-σt} g(t) dt by panel quadrature, truncated where e^{-σt} falls
/// below 1e-26. Geometric panels toward t = 0 absorb fractional powers of t.
pub fn forward_laplace(g: impl Fn(f64) -> Result<f64>, sigma: f64) -> Result<f64> {
    if sigma <= 0.0 {
        return Err(Error::DomainError(format!(
            "forward transform needs sigma > 0, got {sigma}"
        )));
    }
    let t_max = 60.0 / sigma;
    let rule = gauss_legendre(24);
    let mut acc = 0.0;
    // geometric edges 2^-42 .. 1 scaled by t_max, finer near zero
    let mut hi = t_max;
    for _ in 0..=64 {
        let lo = 0.5 * hi;
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = lo + (hi - lo) * u;
            acc += w * (hi - lo) * (-sigma * t).exp() * g(t)?;
        }
        hi = lo;
    }
    Ok(acc)
}

/// Inverse Laplace transform at `t` by the de Hoog, Knight & Stokes
/// quotient-difference accelerated Fourier series on the Bromwich line.
///
/// `f` evaluates the transform at complex s; `t_scale` should be at least the
/// largest t of interest (the series period is 2·t_scale).
pub fn invert_dehoog(
    f: &dyn Fn(Complex64) -> Result<Complex64>,
    t: f64,
    t_scale: f64,
    terms: usize,
) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::DomainError(format!("need t > 0, got {t}")));
    }
    let big_t = 2.0 * t_scale.max(t);
    let m = terms.max(8);
    let n = 2 * m + 1;
    // abscissa of the Bromwich line: exp(gamma*T) ~ 1/tol
    let tol = 1e-12f64;
    let gamma = -0.5 * tol.ln() / big_t;
    let pi = std::f64::consts::PI;

    let mut a = Vec::with_capacity(n);
    for k in 0..n {
        let s = Complex64::new(gamma, k as f64 * pi / big_t);
        let mut v = f(s)?;
        if k == 0 {
            v *= 0.5;
        }
        a.push(v);
    }

    // quotient-difference recurrence building the continued fraction
    let mut e = vec![vec![Complex64::new(0.0, 0.0); n]; m + 1];
    let mut q = vec![vec![Complex64::new(0.0, 0.0); n]; m + 1];
    for i in 0..n - 1 {
        q[1][i] = a[i + 1] / a[i];
    }
    for r in 1..=m {
        for i in 0..n - 2 * r {
            e[r][i] = q[r][i + 1] - q[r][i] + if r > 1 { e[r - 1][i + 1] } else { e[0][i + 1] };
        }
        if r < m {
            for i in 0..n - 2 * r - 1 {
                q[r + 1][i] = q[r][i + 1] * e[r][i + 1] / e[r][i];
            }
        }
    }
    let mut d = vec![Complex64::new(0.0, 0.0); 2 * m + 1];
    d[0] = a[0];
    for r in 1..=m {
        d[2 * r - 1] = -q[r][0];
        d[2 * r] = -e[r][0];
    }

    // evaluate the continued fraction at z = exp(i π t / T)
    let z = Complex64::from_polar(1.0, pi * t / big_t);
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(1.0, 0.0);
    let mut a1 = d[0];
    let mut b1 = Complex64::new(1.0, 0.0);
    for item in d.iter().skip(1) {
        let an = a1 + item * z * a2;
        let bn = b1 + item * z * b2;
        a2 = a1;
        b2 = b1;
        a1 = an;
        b1 = bn;
        // rescale to keep the recurrence in range
        let s = b1.norm().max(1e-290);
        a1 /= s;
        b1 /= s;
        a2 /= s;
        b2 /= s;
    }
    let val = a1 / b1;
    Ok((gamma * t).exp() / big_t * val.re)
}

/// Inverse Laplace transform at `t` by the fixed Talbot contour with `m`
/// nodes. Requires the transform to be analytic and decaying away from the
/// negative real axis.
pub fn invert_talbot(
    f: &dyn Fn(Complex64) -> Result<Complex64>,
    t: f64,
    m: usize,
) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::DomainError(format!("need t > 0, got {t}")));
    }
    let pi = std::f64::consts::PI;
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut acc = 0.5 * (f(Complex64::new(r, 0.0))? * (r * t).exp()).re;
    for k in 1..m {
        let theta = k as f64 * pi / m as f64;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let val = (s * t).exp() * f(s)? * Complex64::new(1.0, sigma);
        acc += val.re;
    }
    Ok(acc * r / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn forward_of_exponential() {
        // L[e^{-at}](σ) = 1/(σ+a)
        let a = 0.7;
        for &sigma in &[0.5, 1.0, 3.0] {
            let got = forward_laplace(|t| Ok((-a * t).exp()), sigma).unwrap();
            let want = 1.0 / (sigma + a);
            assert!((got - want).abs() < 1e-10 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn forward_with_algebraic_singularity() {
        // L[t^{-1/2}](σ) = sqrt(π/σ)
        let got = forward_laplace(|t| Ok(t.powf(-0.5)), 2.0).unwrap();
        let want = (std::f64::consts::PI / 2.0).sqrt();
        assert!((got - want).abs() < 5e-8 * want, "{got} vs {want}");
    }

    #[test]
    fn dehoog_inverts_simple_poles() {
        // 1/(s+1) -> e^{-t}
        let f = |s: Complex64| Ok(1.0 / (s + 1.0));
        for &t in &[0.3, 1.0, 2.5] {
            let got = invert_dehoog(&f, t, 4.0, 40).unwrap();
            assert!(
                (got - (-t).exp()).abs() < 1e-8,
                "t={t}: {got} vs {}",
                (-t).exp()
            );
        }
        // 1/s² -> t
        let f2 = |s: Complex64| Ok(1.0 / (s * s));
        let got = invert_dehoog(&f2, 1.5, 4.0, 40).unwrap();
        assert!((got - 1.5).abs() < 1e-7, "{got}");
    }

    #[test]
    fn dehoog_inverts_branch_cut_transform() {
        // s^{-1/2} -> 1/sqrt(πt)
        let f = |s: Complex64| Ok(s.powf(-0.5));
        let t = 0.8;
        let got = invert_dehoog(&f, t, 2.0, 60).unwrap();
        let want = 1.0 / (std::f64::consts::PI * t).sqrt();
        assert!((got - want).abs() < 1e-7 * want, "{got} vs {want}");
    }

    #[test]
    fn talbot_inverts_stable_subordinator_transform() {
        // exp(-s^{1/2}) -> Lévy(1/2) density t^{-3/2} e^{-1/(4t)} / (2√π)
        let f = |s: Complex64| Ok((-s.powf(0.5)).exp());
        for &t in &[0.3, 1.0, 2.0] {
            let got = invert_talbot(&f, t, 32).unwrap();
            let want =
                t.powf(-1.5) * (-1.0 / (4.0 * t)).exp() / (2.0 * std::f64::consts::PI.sqrt());
            assert!(
                (got - want).abs() < 1e-9 * want.max(1e-3),
                "t={t}: {got} vs {want}"
            );
        }
        let _ = c(0.0, 0.0);
    }

    #[test]
    fn talbot_and_dehoog_agree_on_mittag_leffler_transform() {
        // σ^{β-1}/(σ^β + λ) -> E_β(-λ t^β)
        let (beta, lam) = (0.6, 1.3);
        let f = move |s: Complex64| Ok(s.powf(beta - 1.0) / (s.powf(beta) + lam));
        for &t in &[0.5, 1.0, 1.7] {
            let via_talbot = invert_talbot(&f, t, 32).unwrap();
            let via_dehoog = invert_dehoog(&f, t, 2.0, 60).unwrap();
            let want = crate::specfun::ml_one_param(
                beta,
                Complex64::new(-lam * t.powf(beta), 0.0),
            )
            .unwrap()
            .re;
            assert!((via_talbot - want).abs() < 1e-8, "talbot t={t}: {via_talbot} vs {want}");
            assert!((via_dehoog - want).abs() < 1e-7, "dehoog t={t}: {via_dehoog} vs {want}");
        }
    }
}
