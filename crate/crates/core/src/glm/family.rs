use crate::math::{exp, ln, ln_factorial, logistic, LN_2PI};

/// Bernoulli means are clamped to `[MU_CLAMP, 1 - MU_CLAMP]` before taking
/// logs so predictive log-likelihoods stay finite under quasi-separation.
pub(crate) const MU_CLAMP: f64 = 1e-12;

/// Outcome distribution together with its canonical link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Family {
    #[cfg_attr(
        feature = "serde",
        serde(rename = "gaussian", alias = "gaussian-identity")
    )]
    GaussianIdentity,
    #[cfg_attr(
        feature = "serde",
        serde(rename = "binomial", alias = "bernoulli", alias = "bernoulli-logit")
    )]
    BernoulliLogit,
    #[cfg_attr(feature = "serde", serde(rename = "poisson", alias = "poisson-log"))]
    PoissonLog,
}

impl Family {
    /// Short name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            Family::GaussianIdentity => "gaussian",
            Family::BernoulliLogit => "binomial",
            Family::PoissonLog => "poisson",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "gaussian" | "gaussian-identity" => Some(Family::GaussianIdentity),
            "binomial" | "bernoulli" | "bernoulli-logit" => Some(Family::BernoulliLogit),
            "poisson" | "poisson-log" => Some(Family::PoissonLog),
            _ => None,
        }
    }

    /// g(mu)
    pub fn link(self, mu: f64) -> f64 {
        match self {
            Family::GaussianIdentity => mu,
            Family::BernoulliLogit => ln(mu / (1.0 - mu)),
            Family::PoissonLog => ln(mu),
        }
    }

    /// g^-1(eta)
    pub fn inverse_link(self, eta: f64) -> f64 {
        match self {
            Family::GaussianIdentity => eta,
            Family::BernoulliLogit => logistic(eta),
            Family::PoissonLog => exp(eta),
        }
    }

    /// Whether `y` lies in the support of the outcome distribution.
    pub fn valid_outcome(self, y: f64) -> bool {
        match self {
            Family::GaussianIdentity => y.is_finite(),
            Family::BernoulliLogit => y == 0.0 || y == 1.0,
            Family::PoissonLog => y.is_finite() && y >= 0.0 && y == libm::trunc(y),
        }
    }

    /// Mean, derivative d mu / d eta and variance function at `eta`, with
    /// the guards IRLS needs to keep weights strictly positive.
    pub(crate) fn irls_terms(self, eta: f64) -> (f64, f64, f64) {
        match self {
            Family::GaussianIdentity => (eta, 1.0, 1.0),
            Family::BernoulliLogit => {
                let mu = logistic(eta).clamp(MU_CLAMP, 1.0 - MU_CLAMP);
                let v = mu * (1.0 - mu);
                (mu, v, v)
            }
            Family::PoissonLog => {
                let mu = exp(eta).max(f64::EPSILON);
                (mu, mu, mu)
            }
        }
    }

    pub(crate) fn initial_mean(self, y: f64) -> f64 {
        match self {
            Family::GaussianIdentity => y,
            Family::BernoulliLogit => (y + 0.5) / 2.0,
            Family::PoissonLog => y + 0.1,
        }
    }
}

/// Log-likelihood contribution of one observation with outcome `y` and
/// linear predictor `eta`. `dispersion` is the Gaussian variance and is
/// ignored by the other families.
pub fn per_obs_loglik(family: Family, y: f64, eta: f64, dispersion: f64) -> f64 {
    match family {
        Family::GaussianIdentity => {
            let r = y - eta;
            -0.5 * (LN_2PI + ln(dispersion) + r * r / dispersion)
        }
        Family::BernoulliLogit => {
            let mu = logistic(eta).clamp(MU_CLAMP, 1.0 - MU_CLAMP);
            y * ln(mu) + (1.0 - y) * ln(1.0 - mu)
        }
        Family::PoissonLog => y * eta - exp(eta) - ln_factorial(y),
    }
}
