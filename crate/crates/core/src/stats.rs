//! Small statistics utilities: sample moments, empirical characteristic
//! functions and Laplace transforms, and the two-sample Kolmogorov-Smirnov
//! statistic used throughout the validation suites.

use num_complex::Complex64;

/// Sample mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Empirical characteristic function at `p` with a combined standard error
/// sqrt(se_re² + se_im²).
pub fn empirical_cf(samples: &[f64], p: f64) -> (Complex64, f64) {
    let n = samples.len() as f64;
    let (mut sr, mut si) = (0.0, 0.0);
    let (mut sr2, mut si2) = (0.0, 0.0);
    for &x in samples {
        let (s, c) = (p * x).sin_cos();
        sr += c;
        si += s;
        sr2 += c * c;
        si2 += s * s;
    }
    let mr = sr / n;
    let mi = si / n;
    let vr = (sr2 / n - mr * mr).max(0.0) / n;
    let vi = (si2 / n - mi * mi).max(0.0) / n;
    (Complex64::new(mr, mi), (vr + vi).sqrt())
}

/// Sample mean and standard error of e^{-λ X} per λ in the grid.
pub fn empirical_laplace(samples: &[f64], lambda_grid: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut means = Vec::with_capacity(lambda_grid.len());
    let mut ses = Vec::with_capacity(lambda_grid.len());
    for &lam in lambda_grid {
        let transformed: Vec<f64> = samples.iter().map(|&x| (-lam * x).exp()).collect();
        let (m, se) = mean_se(&transformed);
        means.push(m);
        ses.push(se);
    }
    (means, ses)
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F̂₁ - F̂₂|.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        if xa[i] <= xb[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Rejection threshold for the two-sample KS statistic at significance
/// `alpha`: c(α) sqrt((n+m)/(nm)) with c(α) = sqrt(-ln(α/2)/2).
pub fn ks_threshold(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn mean_se_constant() {
        let (m, se) = mean_se(&[2.0, 2.0, 2.0]);
        assert_eq!(m, 2.0);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn empirical_laplace_constant_samples() {
        let (m, se) = empirical_laplace(&[1.0, 1.0, 1.0], &[0.7]);
        assert!((m[0] - (-0.7f64).exp()).abs() < 1e-15);
        assert!(se[0] < 1e-12);
        let (m2, s2) = empirical_laplace(&[1.0], &[]);
        assert!(m2.is_empty() && s2.is_empty());
    }

    #[test]
    fn ks_same_distribution_small() {
        let mut rng = crate::rng::master(9);
        let a: Vec<f64> = (0..4000).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..4000).map(|_| rng.random::<f64>()).collect();
        let d = ks_statistic(&a, &b);
        assert!(d < ks_threshold(a.len(), b.len(), 1e-3), "{d}");
    }

    #[test]
    fn ks_detects_shift() {
        let mut rng = crate::rng::master(10);
        let a: Vec<f64> = (0..4000).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..4000).map(|_| rng.random::<f64>() + 0.2).collect();
        assert!(ks_statistic(&a, &b) > ks_threshold(a.len(), b.len(), 1e-3));
    }

    #[test]
    fn ecf_of_point_mass() {
        let (v, se) = empirical_cf(&[1.0; 100], 0.9);
        assert!((v - Complex64::new(0.9f64.cos(), 0.9f64.sin())).norm() < 1e-14);
        assert!(se < 1e-7);
    }
}
