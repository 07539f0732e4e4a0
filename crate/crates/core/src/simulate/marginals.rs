//! Marginal distributions used by the probability-integral-transform
//! scenarios: CDFs and their quantile functions, kept mutually
//! consistent so PIT round trips are tight.

use statrs::distribution::{Beta, Continuous, ContinuousCDF, StudentsT};

use crate::transforms::{norm_cdf, norm_pdf, norm_quantile};
use crate::{Error, Result};

/// Normal-mixture densities from the Marron-Wand test suite.
///
/// Parameters transcribed from Marron and Wand (1992), Table 1:
/// weights, means and standard deviations of each Gaussian component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwDensity {
    /// #2 skewed unimodal:
    /// 1/5 N(0,1) + 1/5 N(1/2,(2/3)^2) + 3/5 N(13/12,(5/9)^2)
    SkewedUnimodal,
    /// #3 strongly skewed: sum_{l=0..7} 1/8 N(3{(2/3)^l - 1}, (2/3)^{2l})
    StronglySkewed,
    /// #4 kurtotic unimodal: 2/3 N(0,1) + 1/3 N(0,(1/10)^2)
    KurtoticUnimodal,
    /// #5 outlier: 1/10 N(0,1) + 9/10 N(0,(1/10)^2)
    Outlier,
    /// #6 bimodal: 1/2 N(-1,(2/3)^2) + 1/2 N(1,(2/3)^2)
    Bimodal,
}

impl MwDensity {
    fn components(self) -> Vec<(f64, f64, f64)> {
        match self {
            MwDensity::SkewedUnimodal => vec![
                (0.2, 0.0, 1.0),
                (0.2, 0.5, 2.0 / 3.0),
                (0.6, 13.0 / 12.0, 5.0 / 9.0),
            ],
            MwDensity::StronglySkewed => (0..8)
                .map(|l| {
                    let r = (2.0_f64 / 3.0).powi(l);
                    (0.125, 3.0 * (r - 1.0), r)
                })
                .collect(),
            MwDensity::KurtoticUnimodal => vec![(2.0 / 3.0, 0.0, 1.0), (1.0 / 3.0, 0.0, 0.1)],
            MwDensity::Outlier => vec![(0.1, 0.0, 1.0), (0.9, 0.0, 0.1)],
            MwDensity::Bimodal => vec![(0.5, -1.0, 2.0 / 3.0), (0.5, 1.0, 2.0 / 3.0)],
        }
    }

    pub fn cdf(self, x: f64) -> f64 {
        self.components()
            .iter()
            .map(|&(w, mu, sd)| w * norm_cdf((x - mu) / sd))
            .sum()
    }

    pub fn pdf(self, x: f64) -> f64 {
        self.components()
            .iter()
            .map(|&(w, mu, sd)| w * norm_pdf((x - mu) / sd) / sd)
            .sum()
    }

    /// Quantile by bisection on the mixture CDF to 1e-10, then Newton
    /// polish.
    pub fn quantile(self, p: f64) -> f64 {
        let z = norm_quantile(p);
        let comps = self.components();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(_, mu, sd) in &comps {
            lo = lo.min(mu + sd * z);
            hi = hi.max(mu + sd * z);
        }
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..2 {
            let d = self.pdf(x);
            if d < 1e-300 {
                break;
            }
            x -= (self.cdf(x) - p) / d;
        }
        x
    }
}

/// Marginal distributions named by the simulation scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal {
    /// Asymmetric Laplace, location 0, scale 2, asymmetry 6
    /// (Kozubowski-Podgorski parametrization; the skew-Laplace reading
    /// of "parameters 2 and 6").
    SkewLaplace,
    /// Beta(3, 0.5).
    Beta3Half,
    /// Exponential with mean 1.
    ExponentialUnit,
    /// Student t with the given degrees of freedom.
    StudentT(f64),
    /// A Marron-Wand normal mixture.
    MarronWand(MwDensity),
    /// Standard Cauchy.
    Cauchy,
}

const SL_SCALE: f64 = 2.0;
const SL_KAPPA: f64 = 6.0;

impl Marginal {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Marginal::SkewLaplace => {
                let k2 = SL_KAPPA * SL_KAPPA;
                if x <= 0.0 {
                    k2 / (1.0 + k2) * (std::f64::consts::SQRT_2 * x / (SL_SCALE * SL_KAPPA)).exp()
                } else {
                    1.0 - (-std::f64::consts::SQRT_2 * SL_KAPPA * x / SL_SCALE).exp() / (1.0 + k2)
                }
            }
            Marginal::Beta3Half => Beta::new(3.0, 0.5).unwrap().cdf(x),
            Marginal::ExponentialUnit => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
            Marginal::StudentT(k) => StudentsT::new(0.0, 1.0, k).unwrap().cdf(x),
            Marginal::MarronWand(d) => d.cdf(x),
            Marginal::Cauchy => 0.5 + x.atan() / std::f64::consts::PI,
        }
    }

    /// Inverse CDF; errors unless p lies strictly inside (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::OutOfRange(p));
        }
        Ok(match *self {
            Marginal::SkewLaplace => {
                let k2 = SL_KAPPA * SL_KAPPA;
                let p0 = k2 / (1.0 + k2);
                if p <= p0 {
                    SL_SCALE * SL_KAPPA / std::f64::consts::SQRT_2 * (p * (1.0 + k2) / k2).ln()
                } else {
                    -SL_SCALE / (std::f64::consts::SQRT_2 * SL_KAPPA)
                        * ((1.0 - p) * (1.0 + k2)).ln()
                }
            }
            Marginal::Beta3Half => {
                let dist = Beta::new(3.0, 0.5).unwrap();
                let mut x = dist.inverse_cdf(p);
                for _ in 0..2 {
                    let d = dist.pdf(x);
                    if !(d > 1e-300) || !d.is_finite() {
                        break;
                    }
                    x = (x - (dist.cdf(x) - p) / d).clamp(0.0, 1.0);
                }
                x
            }
            Marginal::ExponentialUnit => -(-p).ln_1p(),
            Marginal::StudentT(k) => {
                let dist = StudentsT::new(0.0, 1.0, k).unwrap();
                let mut x = dist.inverse_cdf(p);
                for _ in 0..2 {
                    let d = dist.pdf(x);
                    if !(d > 1e-300) {
                        break;
                    }
                    x -= (dist.cdf(x) - p) / d;
                }
                x
            }
            Marginal::MarronWand(d) => d.quantile(p),
            Marginal::Cauchy => (std::f64::consts::PI * (p - 0.5)).tan(),
        })
    }
}
