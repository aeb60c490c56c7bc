//! Continuous negative definite functions ψ: the Fourier symbols of the
//! spatial operators. Only parametric families with ψ(0) = 0 (no killing)
//! are constructible.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A Bernstein function from the power family f(x) = x^γ, γ ∈ (0,1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BernsteinFn {
    Power { gamma: f64 },
}

impl BernsteinFn {
    pub fn power(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::DomainError(format!(
                "Bernstein power exponent must lie in (0,1], got {gamma}"
            )));
        }
        Ok(BernsteinFn::Power { gamma })
    }

    /// Principal-branch evaluation on {Re z ≥ 0}.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        match self {
            BernsteinFn::Power { gamma } => z.powf(*gamma),
        }
    }

    pub fn exponent(&self) -> f64 {
        match self {
            BernsteinFn::Power { gamma } => *gamma,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec {
    /// ψ(p) = σ² p² / 2.
    Brownian { sigma2: f64 },
    /// ψ(p) = 2^{-γ/2} |p|^γ, γ ∈ (0,2].
    FractionalLaplacian { gamma: f64 },
    /// ψ(p) = |p|^δ (1 - iρ sign(p) tan(πδ/2)); δ = 1 forces ρ = 0.
    StableSkewed { delta: f64, rho: f64 },
    /// ψ = f ∘ ψ̃ for a Bernstein f.
    BernsteinComposed {
        inner: Box<SymbolSpec>,
        f: BernsteinFn,
    },
}

impl SymbolSpec {
    pub fn brownian(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(Error::DomainError(format!(
                "Brownian symbol requires sigma2 > 0, got {sigma2}"
            )));
        }
        Ok(SymbolSpec::Brownian { sigma2 })
    }

    pub fn fractional_laplacian(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 2.0) {
            return Err(Error::DomainError(format!(
                "fractional Laplacian requires gamma in (0,2], got {gamma}"
            )));
        }
        Ok(SymbolSpec::FractionalLaplacian { gamma })
    }

    pub fn stable_skewed(delta: f64, rho: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 2.0) || !(-1.0..=1.0).contains(&rho) {
            return Err(Error::DomainError(format!(
                "stable symbol requires delta in (0,2], rho in [-1,1]; got ({delta}, {rho})"
            )));
        }
        if (delta - 1.0).abs() < 1e-12 && rho != 0.0 {
            return Err(Error::ConfigError(
                "delta = 1 requires the symmetric case rho = 0".into(),
            ));
        }
        Ok(SymbolSpec::StableSkewed { delta, rho })
    }

    /// ψ := f ∘ ψ̃. The pair (ψ̃, f) is recorded so stochastic solvers can
    /// build the subordinated representation.
    pub fn compose_bernstein(self, f: BernsteinFn) -> SymbolSpec {
        SymbolSpec::BernsteinComposed {
            inner: Box::new(self),
            f,
        }
    }

    /// ψ(p).
    pub fn eval(&self, p: f64) -> Complex64 {
        match self {
            SymbolSpec::Brownian { sigma2 } => Complex64::new(0.5 * sigma2 * p * p, 0.0),
            SymbolSpec::FractionalLaplacian { gamma } => {
                Complex64::new(0.5f64.powf(gamma / 2.0) * p.abs().powf(*gamma), 0.0)
            }
            SymbolSpec::StableSkewed { delta, rho } => {
                if p == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let skew = if (delta - 2.0).abs() < 1e-15 {
                    0.0 // tan(π) = 0: the Gaussian case carries no skew
                } else {
                    rho * p.signum() * (std::f64::consts::FRAC_PI_2 * delta).tan()
                };
                p.abs().powf(*delta) * Complex64::new(1.0, -skew)
            }
            SymbolSpec::BernsteinComposed { inner, f } => f.apply(inner.eval(p)),
        }
    }

    /// Constant C with |ψ(p)| ≤ C (1 + p²) for all p.
    pub fn growth_constant(&self) -> f64 {
        match self {
            SymbolSpec::Brownian { sigma2 } => 0.5 * sigma2,
            SymbolSpec::FractionalLaplacian { gamma } => 0.5f64.powf(gamma / 2.0),
            SymbolSpec::StableSkewed { delta, rho } => {
                if (delta - 2.0).abs() < 1e-15 {
                    1.0
                } else {
                    let t = (std::f64::consts::FRAC_PI_2 * delta).tan();
                    (1.0 + rho * rho * t * t).sqrt()
                }
            }
            SymbolSpec::BernsteinComposed { inner, f } => {
                inner.growth_constant().powf(f.exponent()).max(1.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn brownian_is_half_p_squared() {
        let psi = SymbolSpec::brownian(1.0).unwrap();
        for &p in &[-2.0, 0.3, 5.0] {
            let v = psi.eval(p);
            assert!((v.re - 0.5 * p * p).abs() < 1e-15 && v.im == 0.0);
        }
    }

    #[test]
    fn fractional_laplacian_normalization() {
        let psi = SymbolSpec::fractional_laplacian(1.4).unwrap();
        let p = 2.3f64;
        let want = p.powf(1.4) / 2f64.powf(0.7);
        assert!((psi.eval(p).re - want).abs() < 1e-14);
    }

    #[test]
    fn no_killing_at_zero() {
        let syms = [
            SymbolSpec::brownian(2.0).unwrap(),
            SymbolSpec::fractional_laplacian(0.7).unwrap(),
            SymbolSpec::stable_skewed(1.5, -0.4).unwrap(),
            SymbolSpec::brownian(1.0)
                .unwrap()
                .compose_bernstein(BernsteinFn::power(0.5).unwrap()),
        ];
        for s in &syms {
            assert_eq!(s.eval(0.0).norm(), 0.0, "{s:?}");
        }
    }

    #[test]
    fn delta_one_requires_symmetric() {
        assert!(SymbolSpec::stable_skewed(1.0, 0.5).is_err());
        assert!(SymbolSpec::stable_skewed(1.0, 0.0).is_ok());
    }

    #[test]
    fn hermitian_symmetry_sampled() {
        let mut rng = crate::rng::master(3);
        let syms = [
            SymbolSpec::brownian(1.3).unwrap(),
            SymbolSpec::fractional_laplacian(1.1).unwrap(),
            SymbolSpec::stable_skewed(0.8, 0.9).unwrap(),
            SymbolSpec::stable_skewed(1.7, -0.6)
                .unwrap()
                .compose_bernstein(BernsteinFn::power(0.8).unwrap()),
        ];
        for s in &syms {
            for _ in 0..1000 {
                let p = 20.0 * (rng.random::<f64>() - 0.5);
                let d = (s.eval(-p) - s.eval(p).conj()).norm();
                assert!(d < 1e-12, "{s:?} at p={p}");
            }
        }
    }

    #[test]
    fn growth_bound_sampled() {
        let mut rng = crate::rng::master(4);
        let syms = [
            SymbolSpec::brownian(1.3).unwrap(),
            SymbolSpec::fractional_laplacian(2.0).unwrap(),
            SymbolSpec::stable_skewed(1.9, 1.0).unwrap(),
        ];
        for s in &syms {
            let c = s.growth_constant();
            for _ in 0..1000 {
                let p = 50.0 * (rng.random::<f64>() - 0.5);
                assert!(s.eval(p).norm() <= c * (1.0 + p * p) * (1.0 + 1e-12), "{s:?}");
            }
        }
    }

    #[test]
    fn bernstein_composition_powers() {
        // Brownian(1) ∘ x^γ gives |p|^{2γ}/2^γ
        let g = 0.7;
        let psi = SymbolSpec::brownian(1.0)
            .unwrap()
            .compose_bernstein(BernsteinFn::power(g).unwrap());
        let p = 1.7f64;
        let want = p.powf(2.0 * g) / 2f64.powf(g);
        assert!((psi.eval(p).re - want).abs() < 1e-13 * want);
        // identity composition
        let base = SymbolSpec::stable_skewed(1.5, 0.3).unwrap();
        let same = base.clone().compose_bernstein(BernsteinFn::power(1.0).unwrap());
        assert!((base.eval(2.0) - same.eval(2.0)).norm() < 1e-14);
        // StableSkewed(2,0) ∘ x^{1/2} at p = 2: sqrt(4) = 2
        let half = SymbolSpec::stable_skewed(2.0, 0.0)
            .unwrap()
            .compose_bernstein(BernsteinFn::power(0.5).unwrap());
        assert!((half.eval(2.0).re - 2.0).abs() < 1e-13);
        assert!(half.eval(2.0).im.abs() < 1e-14);
    }

    #[test]
    fn real_part_nonnegative() {
        let mut rng = crate::rng::master(5);
        let syms = [
            SymbolSpec::stable_skewed(0.6, 1.0).unwrap(),
            SymbolSpec::stable_skewed(1.3, -1.0)
                .unwrap()
                .compose_bernstein(BernsteinFn::power(0.6).unwrap()),
        ];
        for s in &syms {
            for _ in 0..500 {
                let p = 30.0 * (rng.random::<f64>() - 0.5);
                assert!(s.eval(p).re >= -1e-14, "{s:?} at {p}");
            }
        }
    }
}
