use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::glm::{Dataset, Family};
use crate::{Error, Result};

/// Upper split of the two-split tree scenario (about the 75% normal quantile).
const TREE_UPPER_SPLIT: f64 = 0.675;

/// One simulation setting. Scenarios 1-5 have a single covariate; scenario
/// 6 has five.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub id: u8,
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn new(id: u8, n: usize, sigma: f64, seed: u64) -> Result<Self> {
        if !(1..=6).contains(&id) {
            return Err(Error::InvalidConfig(format!("unknown scenario {id}")));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("n must be positive".into()));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidConfig("sigma must be positive".into()));
        }
        Ok(ScenarioSpec { id, n, sigma, seed })
    }

    pub fn p(&self) -> usize {
        if self.id == 6 {
            5
        } else {
            1
        }
    }
}

fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Noise-free predictor of scenario `id` at covariate row `x`.
pub fn signal(id: u8, x: &[f64]) -> f64 {
    match id {
        1 => 0.5 * x[0],
        2 => ind(x[0] > 0.0),
        3 => 0.7 * x[0] + 1.4 * ind(x[0] > 0.0),
        4 => 0.6 * x[0] + 1.2 * ind(x[0] > 0.0) * x[0],
        5 => 1.0 - ind(x[0] <= 0.0) + 2.0 * ind(x[0] > TREE_UPPER_SPLIT),
        6 => {
            0.6 * x[0]
                + 1.2 * ind(x[1] > 0.0) * x[0]
                + ind(x[2] > 0.0)
                + 2.0 * ind(x[2] > 0.0 && x[3] > 0.0)
        }
        _ => panic!("unknown scenario {id}"),
    }
}

/// Population share of variance explained by the signal, from the exact
/// signal variance under standard normal covariates.
pub fn theoretical_r2(id: u8, sigma: f64) -> f64 {
    let phi0 = 1.0 / libm::sqrt(2.0 * core::f64::consts::PI); // E[x I(x>0)]
    let var = match id {
        1 | 2 => 0.25,
        3 => 0.49 + 1.96 * 0.25 + 2.0 * 0.7 * 1.4 * phi0,
        4 => 1.8 - (1.2 * phi0) * (1.2 * phi0),
        5 => {
            let pu = 0.5 * libm::erfc(TREE_UPPER_SPLIT / core::f64::consts::SQRT_2);
            // -I(x<=0) and 2 I(x>u) are disjoint events
            0.25 + 4.0 * pu * (1.0 - pu) + 2.0 * (2.0 * 0.5 * pu)
        }
        6 => 1.8 + 1.5,
        _ => f64::NAN,
    };
    var / (var + sigma * sigma)
}

/// Draws a Gaussian dataset for `spec` from `rng`: per row, the covariates
/// in order and then the error term.
pub fn generate_with<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Dataset {
    let p = spec.p();
    let mut x = alloc::vec![Vec::with_capacity(spec.n); p];
    let mut y = Vec::with_capacity(spec.n);
    let mut row = alloc::vec![0.0; p];
    for _ in 0..spec.n {
        for (j, v) in row.iter_mut().enumerate() {
            *v = rng.sample(StandardNormal);
            x[j].push(*v);
        }
        let eps: f64 = rng.sample(StandardNormal);
        y.push(signal(spec.id, &row) + spec.sigma * eps);
    }
    Dataset::new(y, x, Vec::new(), Family::GaussianIdentity).expect("simulated data is finite")
}

/// Dataset for `spec`, deterministic in `spec.seed`.
pub fn generate(spec: &ScenarioSpec) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    generate_with(spec, &mut rng)
}
