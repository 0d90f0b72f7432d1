//! Thermal (geometric) pair-number statistics of single-mode squeezed vacuum.

use alloc::vec::Vec;

use crate::su11::Su11Matrix;

/// `P(n) = pⁿ(1-p)` truncated at `n_max`, with `p = μ/(1+μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberDistribution {
    pub p: f64,
    pub n_max: usize,
    pub probabilities: Vec<f64>,
    /// Untruncated mean `μ`.
    pub mean: f64,
    /// Untruncated variance `μ(μ+1)`.
    pub variance: f64,
}

impl PhotonNumberDistribution {
    pub fn from_mean(mu: f64, n_max: usize) -> Self {
        let n_max = n_max.max(1);
        let p = geometric_parameter(mu);
        let mut probabilities = Vec::with_capacity(n_max + 1);
        let mut pn = 1.0;
        for _ in 0..=n_max {
            probabilities.push(pn * (1.0 - p));
            pn *= p;
        }
        PhotonNumberDistribution { p, n_max, probabilities, mean: mu, variance: mu * (mu + 1.0) }
    }

    /// Probability of two or more pairs, `p²`.
    pub fn multi_pair(&self) -> f64 {
        self.p * self.p
    }

    /// Sum of the retained probabilities.
    pub fn truncated_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

fn geometric_parameter(mu: f64) -> f64 {
    mu / (1.0 + mu)
}

/// Mean pair number `μ = |β|²`.
pub fn pair_mean(m: &Su11Matrix) -> f64 {
    m.pair_mean()
}

pub fn photon_statistics(m: &Su11Matrix, n_max: usize) -> PhotonNumberDistribution {
    PhotonNumberDistribution::from_mean(m.pair_mean(), n_max)
}

/// Probability that two or more pairs are emitted.
pub fn multi_pair_probability(m: &Su11Matrix) -> f64 {
    let p = geometric_parameter(m.pair_mean());
    p * p
}
