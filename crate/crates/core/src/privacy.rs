//! Noise distributions and support widths for the three mechanisms.

use rand::distributions::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Laplace density restricted to `[−s, s]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedLaplaceDist {
    pub sigma: f64,
    pub half_width: f64,
}

impl TruncatedLaplaceDist {
    pub fn new(sigma: f64, half_width: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma = {sigma} must be positive")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("half width {half_width} must be positive")));
        }
        Ok(Self { sigma, half_width })
    }

    /// Fraction of the untruncated mass on each half-line that lies in `[0, s]`.
    fn kept(&self) -> f64 {
        -(-self.half_width / self.sigma).exp_m1()
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if z <= -self.half_width {
            return 0.0;
        }
        if z >= self.half_width {
            return 1.0;
        }
        let half = -(-z.abs() / self.sigma).exp_m1() / (2.0 * self.kept());
        if z >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    /// Quantile function; `u = 0.5` maps to exactly 0.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let v = 2.0 * u - 1.0;
        let mag = -self.sigma * (-v.abs() * self.kept()).ln_1p();
        mag.min(self.half_width).copysign(v)
    }

    /// Variance of the truncated distribution.
    pub fn variance(&self) -> f64 {
        let (s, sig) = (self.half_width, self.sigma);
        let r = s / sig;
        // E[z²] = 2σ² − e^{−r}(s² + 2sσ + 2σ²)/(1 − e^{−r})
        (2.0 * sig * sig - (-r).exp() * (s * s + 2.0 * s * sig + 2.0 * sig * sig)) / self.kept()
    }
}

impl Distribution<f64> for TruncatedLaplaceDist {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.inverse_cdf(rng.gen::<f64>())
    }
}

/// Zero-mean Laplace distribution with scale `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceDist {
    pub sigma: f64,
}

impl LaplaceDist {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma = {sigma} must be positive")));
        }
        Ok(Self { sigma })
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if z < 0.0 {
            0.5 * (z / self.sigma).exp()
        } else {
            1.0 - 0.5 * (-z / self.sigma).exp()
        }
    }

    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let v = 2.0 * u - 1.0;
        if v == 0.0 {
            return 0.0;
        }
        (-self.sigma * (-v.abs()).ln_1p()).copysign(v)
    }
}

impl Distribution<f64> for LaplaceDist {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = Open01.sample(rng);
        self.inverse_cdf(u)
    }
}

/// Which count enters the logarithm of the support widths.
///
/// `Lemma` uses `mn` for the matrix and `m` for the vector mechanism;
/// `Algorithm1` uses `2mn` and `2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportVariant {
    #[default]
    Lemma,
    Algorithm1,
}

impl SupportVariant {
    pub fn count_a(self, m: usize, n: usize) -> f64 {
        let base = (m * n) as f64;
        match self {
            Self::Lemma => base,
            Self::Algorithm1 => 2.0 * base,
        }
    }

    pub fn count_b(self, m: usize) -> f64 {
        match self {
            Self::Lemma => m as f64,
            Self::Algorithm1 => 2.0 * m as f64,
        }
    }
}

impl std::str::FromStr for SupportVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma" => Ok(Self::Lemma),
            "algorithm1" => Ok(Self::Algorithm1),
            other => Err(Error::Config(format!("unknown support variant `{other}`"))),
        }
    }
}

/// Half width `Δ/ε · ln(count·(e^ε − 1)/δ + 1)` for `count` noisy entries.
pub fn support_width(sensitivity: f64, eps: f64, delta: f64, count: f64) -> f64 {
    if sensitivity == 0.0 {
        return 0.0;
    }
    sensitivity / eps * (count * eps.exp_m1() / delta).ln_1p()
}

/// `s_A` for an `m×n` constraint matrix.
pub fn support_a(delta11_a: f64, eps_a: f64, delta_a: f64, m: usize, n: usize) -> f64 {
    support_width(delta11_a, eps_a, delta_a, SupportVariant::Lemma.count_a(m, n))
}

/// `s_b` for an `m`-vector.
pub fn support_b(delta1_b: f64, eps_b: f64, delta_b: f64, m: usize) -> f64 {
    support_width(delta1_b, eps_b, delta_b, SupportVariant::Lemma.count_b(m))
}

/// Probability mass the untruncated mechanism would place outside the
/// support: `count·(e^ε − 1)/(e^{εs/Δ} − 1)`.
pub fn tail_mass(eps: f64, sensitivity: f64, s: f64, count: f64) -> f64 {
    count * eps.exp_m1() / (eps * s / sensitivity).exp_m1()
}

/// Independent generator for one trial, keyed by `(seed, grid, trial)`.
pub fn substream(seed: u64, grid: u32, trial: u32) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(grid) << 32) | u64::from(trial));
    rng
}
