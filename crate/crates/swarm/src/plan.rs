use std::collections::HashSet;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Geometric, LogNormal, Pareto};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;
use volga_core::ga::rng::seeded;

/// Average seconds one 20-generation segment took on a volunteer machine.
pub const DEFAULT_BASE_SEGMENT_DELAY: f64 = 2.906;

/// Most rejoins one volunteer can produce.
const MAX_REJOINS: usize = 64;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("invalid plan: {0}")]
    Invalid(String),
    #[error("cannot read plan {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse plan {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

fn invalid(msg: impl Into<String>) -> PlanError {
    PlanError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientProfile {
    pub client_id: String,
    /// Multiplier on the per-segment delay; 2.0 is a machine half as fast.
    pub speed_factor: f64,
    /// Seconds after swarm start at which the client loads the page.
    pub join_time: f64,
    /// Segments after which the client leaves; `None` stays to the end.
    pub leave_after: Option<u64>,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmPlan {
    pub profiles: Vec<ClientProfile>,
    /// Seconds of simulated compute per `generations_per_segment`
    /// generations at speed factor 1. Zero disables the delay.
    pub base_segment_delay: f64,
}

impl SwarmPlan {
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.profiles.is_empty() {
            return Err(invalid("plan has no profiles"));
        }
        if !(self.base_segment_delay.is_finite() && self.base_segment_delay >= 0.0) {
            return Err(invalid("base_segment_delay must be finite and non-negative"));
        }
        let mut seen = HashSet::new();
        for p in &self.profiles {
            if p.client_id.is_empty() {
                return Err(invalid("empty client_id"));
            }
            if !seen.insert(p.client_id.as_str()) {
                return Err(invalid(format!("duplicate client_id {}", p.client_id)));
            }
            if !(p.speed_factor.is_finite() && p.speed_factor > 0.0) {
                return Err(invalid(format!("{}: speed_factor must be finite and positive", p.client_id)));
            }
            if !(p.join_time.is_finite() && p.join_time >= 0.0) {
                return Err(invalid(format!("{}: join_time must be finite and non-negative", p.client_id)));
            }
            if p.leave_after == Some(0) {
                return Err(invalid(format!("{}: leave_after must be at least 1", p.client_id)));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, PlanError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| PlanError::Io {
            path: shown.clone(),
            source,
        })?;
        let plan: SwarmPlan =
            serde_json::from_str(&text).map_err(|source| PlanError::Parse { path: shown, source })?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serialization is infallible")
    }

    /// `n` identical full-time clients joining at once.
    pub fn uniform(n: usize, base_segment_delay: f64, seed: u64) -> Self {
        make_plan(n, SpeedSpec::Constant { factor: 1.0 }, ChurnSpec::None, base_segment_delay, seed)
            .expect("uniform plan is valid")
    }
}

/// Distribution of client speed factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpeedSpec {
    Constant { factor: f64 },
    /// `ln(speed) ~ Normal(ln(median), sigma)`.
    LogNormal { median: f64, sigma: f64 },
    /// Heavy tail: `P(speed > x) = (scale / x)^shape` for `x ≥ scale`.
    Pareto { scale: f64, shape: f64 },
}

impl Default for SpeedSpec {
    fn default() -> Self {
        SpeedSpec::LogNormal { median: 1.0, sigma: 0.5 }
    }
}

impl SpeedSpec {
    fn validate(&self) -> Result<(), PlanError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("speed {name} must be finite and positive, got {v}")))
            }
        };
        match *self {
            SpeedSpec::Constant { factor } => positive("factor", factor),
            SpeedSpec::LogNormal { median, sigma } => {
                positive("median", median)?;
                if sigma.is_finite() && sigma >= 0.0 {
                    Ok(())
                } else {
                    Err(invalid(format!("speed sigma must be finite and non-negative, got {sigma}")))
                }
            }
            SpeedSpec::Pareto { scale, shape } => {
                positive("scale", scale)?;
                positive("shape", shape)
            }
        }
    }

    /// Inverse CDF at `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> f64 {
        match *self {
            SpeedSpec::Constant { factor } => factor,
            SpeedSpec::LogNormal { median, sigma } => {
                let z = Normal::standard().inverse_cdf(p);
                median * (sigma * z).exp()
            }
            SpeedSpec::Pareto { scale, shape } => scale * (1.0 - p).powf(-1.0 / shape),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            SpeedSpec::Constant { factor } => factor,
            SpeedSpec::LogNormal { median, sigma } => {
                if sigma == 0.0 {
                    median
                } else {
                    LogNormal::new(median.ln(), sigma).expect("validated").sample(rng)
                }
            }
            SpeedSpec::Pareto { scale, shape } => Pareto::new(scale, shape).expect("validated").sample(rng),
        }
    }
}

/// How volunteers come and go.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChurnSpec {
    /// Everyone joins at time zero and stays until told to stop.
    #[default]
    None,
    /// Join times uniform over `[0, join_spread)` seconds; each visit
    /// lasts a geometric number of segments with the given mean; after
    /// leaving, the volunteer comes back with `rejoin_probability` under a
    /// fresh client id, up to `join_spread` seconds after its expected
    /// departure.
    Geometric {
        mean_segments: f64,
        rejoin_probability: f64,
        join_spread: f64,
    },
}

impl ChurnSpec {
    fn validate(&self) -> Result<(), PlanError> {
        match *self {
            ChurnSpec::None => Ok(()),
            ChurnSpec::Geometric {
                mean_segments,
                rejoin_probability,
                join_spread,
            } => {
                if !(mean_segments.is_finite() && mean_segments >= 1.0) {
                    return Err(invalid("churn mean_segments must be at least 1"));
                }
                if !(0.0..1.0).contains(&rejoin_probability) {
                    return Err(invalid("churn rejoin_probability must be in [0, 1)"));
                }
                if !(join_spread.is_finite() && join_spread >= 0.0) {
                    return Err(invalid("churn join_spread must be finite and non-negative"));
                }
                Ok(())
            }
        }
    }
}

fn client_id<R: Rng + ?Sized>(rng: &mut R) -> String {
    format!("{:032x}", rng.random::<u128>())
}

/// Builds a plan of `n` volunteers deterministically from `seed`.
/// With churn, rejoins add profiles beyond the first `n`.
pub fn make_plan(
    n: usize,
    speed: SpeedSpec,
    churn: ChurnSpec,
    base_segment_delay: f64,
    seed: u64,
) -> Result<SwarmPlan, PlanError> {
    if n == 0 {
        return Err(invalid("need at least one client"));
    }
    speed.validate()?;
    churn.validate()?;
    let mut rng = seeded(seed);
    let mut profiles = Vec::with_capacity(n);
    for _ in 0..n {
        let speed_factor = speed.sample(&mut rng);
        match churn {
            ChurnSpec::None => profiles.push(ClientProfile {
                client_id: client_id(&mut rng),
                speed_factor,
                join_time: 0.0,
                leave_after: None,
                rng_seed: rng.random(),
            }),
            ChurnSpec::Geometric {
                mean_segments,
                rejoin_probability,
                join_spread,
            } => {
                let stay = Geometric::new(1.0 / mean_segments).expect("validated");
                let mut join_time = rng.random::<f64>() * join_spread;
                for visit in 0..=MAX_REJOINS {
                    let segments = stay.sample(&mut rng) + 1;
                    profiles.push(ClientProfile {
                        client_id: client_id(&mut rng),
                        speed_factor,
                        join_time,
                        leave_after: Some(segments),
                        rng_seed: rng.random(),
                    });
                    if visit == MAX_REJOINS || !rng.random_bool(rejoin_probability) {
                        break;
                    }
                    let stayed = segments as f64 * base_segment_delay * speed_factor;
                    join_time += stayed + rng.random::<f64>() * join_spread;
                }
            }
        }
    }
    let plan = SwarmPlan {
        profiles,
        base_segment_delay,
    };
    plan.validate()?;
    Ok(plan)
}
