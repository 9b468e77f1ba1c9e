//! Reward-generating environments.
//!
//! Stochastic environments draw i.i.d. vectors around fixed means; adversarial
//! environments emit a sequence that is a pure function of (generator, round,
//! seed), so obliviousness is structural: the learner's actions cannot reach
//! the generator. The harness, not the environment, applies the graph's
//! observation mask — regret needs the full vectors.

use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::{keyed_f64, StreamRng};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RewardLaw<F> {
    /// 0/1 draws with the configured means.
    Bernoulli,
    /// Uniform on [mean - width, mean + width], clipped to [0, 1].
    UniformPm { width: F },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticEnv<F> {
    means: Vec<F>,
    law: RewardLaw<F>,
    best: usize,
}

impl<F: Scalar> StochasticEnv<F> {
    /// Means must lie in [0, 1] and the maximizing arm must be unique.
    pub fn new(means: Vec<F>, law: RewardLaw<F>) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::invalid("means", "need at least two arms"));
        }
        for (i, &m) in means.iter().enumerate() {
            if !(m >= F::zero() && m <= F::one()) {
                return Err(Error::invalid(
                    "means",
                    format!("mean of arm {} is {m}, outside [0, 1]", i + 1),
                ));
            }
        }
        if let RewardLaw::UniformPm { width } = law {
            if !(width >= F::zero() && width <= F::one()) {
                return Err(Error::invalid("reward law", "width outside [0, 1]"));
            }
        }
        let best = argmax(&means);
        let ties = means.iter().filter(|&&m| m == means[best]).count();
        if ties != 1 {
            return Err(Error::invalid(
                "means",
                "the maximizing arm must be unique",
            ));
        }
        Ok(Self { means, law, best })
    }

    pub fn arm_count(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[F] {
        &self.means
    }

    pub fn best_arm(&self) -> usize {
        self.best
    }

    /// Expected reward gap of `arm` against the best arm.
    pub fn gap(&self, arm: usize) -> F {
        self.means[self.best] - self.means[arm]
    }

    pub fn reward_vector(&self, rng: &mut StreamRng) -> Vec<F> {
        self.means
            .iter()
            .map(|&m| match self.law {
                RewardLaw::Bernoulli => {
                    if rng.bernoulli(m.to_f64().expect("mean fits f64")) {
                        F::one()
                    } else {
                        F::zero()
                    }
                }
                RewardLaw::UniformPm { width } => {
                    let u = F::from_f64(rng.next_f64()).expect("uniform fits scalar");
                    let two = F::one() + F::one();
                    let r = m + width * (two * u - F::one());
                    r.max(F::zero()).min(F::one())
                }
            })
            .collect()
    }
}

/// Oblivious adversarial generators. Round t's vector depends only on
/// (generator, t, seed); the `StreamRng` passed to [`Environment::reward_vector`]
/// is never touched.
#[derive(Debug, Clone, PartialEq)]
pub enum AdversarialEnv<F> {
    /// Fixed T x K matrix, row t emitted verbatim.
    Table { rows: Vec<Vec<F>> },
    /// Base means cyclically shifted one position every `period` rounds;
    /// rewards are Bernoulli draws addressed by (seed, round, arm).
    MeanSwitch {
        base_means: Vec<F>,
        period: u64,
        seed: u64,
    },
    /// Means oscillate smoothly around the base values with evenly spaced
    /// per-arm phases; rewards are Bernoulli draws addressed by
    /// (seed, round, arm).
    Drift { base_means: Vec<F>, seed: u64 },
}

/// Oscillation period of the drift generator, in rounds.
const DRIFT_PERIOD: f64 = 10_000.0;
/// Peak deviation of drifting means from their base values.
const DRIFT_AMPLITUDE: f64 = 0.25;

impl<F: Scalar> AdversarialEnv<F> {
    pub fn table(rows: Vec<Vec<F>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("reward table", "table has no rows"));
        }
        let k = rows[0].len();
        if k < 2 {
            return Err(Error::invalid("reward table", "need at least two arms"));
        }
        for (t, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::invalid(
                    "reward table",
                    format!("row {} has {} columns, expected {k}", t + 1, row.len()),
                ));
            }
            for (i, &r) in row.iter().enumerate() {
                if !(r >= F::zero() && r <= F::one()) {
                    return Err(Error::invalid(
                        "reward table",
                        format!("row {}, arm {}: value {r} outside [0, 1]", t + 1, i + 1),
                    ));
                }
            }
        }
        Ok(AdversarialEnv::Table { rows })
    }

    pub fn mean_switch(base_means: Vec<F>, period: u64, seed: u64) -> Result<Self> {
        validate_means(&base_means)?;
        if period == 0 {
            return Err(Error::invalid("switch period", "must be at least 1 round"));
        }
        Ok(AdversarialEnv::MeanSwitch {
            base_means,
            period,
            seed,
        })
    }

    pub fn drift(base_means: Vec<F>, seed: u64) -> Result<Self> {
        validate_means(&base_means)?;
        Ok(AdversarialEnv::Drift { base_means, seed })
    }

    pub fn arm_count(&self) -> usize {
        match self {
            AdversarialEnv::Table { rows } => rows[0].len(),
            AdversarialEnv::MeanSwitch { base_means, .. }
            | AdversarialEnv::Drift { base_means, .. } => base_means.len(),
        }
    }

    /// The generating means at round t (1-based). For tables this is the row
    /// itself.
    pub fn means_at(&self, t: u64) -> Result<Vec<F>> {
        match self {
            AdversarialEnv::Table { rows } => {
                let idx = usize::try_from(t - 1).expect("round fits usize");
                rows.get(idx).cloned().ok_or_else(|| {
                    Error::invalid(
                        "round",
                        format!("t={t} beyond table length {}", rows.len()),
                    )
                })
            }
            AdversarialEnv::MeanSwitch {
                base_means, period, ..
            } => {
                let k = base_means.len();
                let phase = usize::try_from((t - 1) / period).expect("phase fits usize") % k;
                Ok((0..k).map(|i| base_means[(i + phase) % k]).collect())
            }
            AdversarialEnv::Drift { base_means, seed } => {
                let k = base_means.len();
                let global = std::f64::consts::TAU * keyed_f64(*seed, "drift-phase", 0);
                Ok((0..k)
                    .map(|i| {
                        let angle = std::f64::consts::TAU
                            * (t as f64 / DRIFT_PERIOD + i as f64 / k as f64)
                            + global;
                        let base = base_means[i].to_f64().expect("mean fits f64");
                        let m = (base + DRIFT_AMPLITUDE * angle.sin()).clamp(0.0, 1.0);
                        F::from_f64(m).expect("mean fits scalar")
                    })
                    .collect())
            }
        }
    }

    /// Reward vector for round t (1-based). Pure in (self, t).
    pub fn reward_vector(&self, t: u64) -> Result<Vec<F>> {
        match self {
            AdversarialEnv::Table { .. } => self.means_at(t),
            AdversarialEnv::MeanSwitch { seed, .. } | AdversarialEnv::Drift { seed, .. } => {
                let k = self.arm_count() as u64;
                let means = self.means_at(t)?;
                Ok(means
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| {
                        let address = (t - 1) * k + i as u64;
                        let u = keyed_f64(*seed, "adv-reward", address);
                        if u < m.to_f64().expect("mean fits f64") {
                            F::one()
                        } else {
                            F::zero()
                        }
                    })
                    .collect())
            }
        }
    }
}

fn validate_means<F: Scalar>(means: &[F]) -> Result<()> {
    if means.len() < 2 {
        return Err(Error::invalid("base means", "need at least two arms"));
    }
    for (i, &m) in means.iter().enumerate() {
        if !(m >= F::zero() && m <= F::one()) {
            return Err(Error::invalid(
                "base means",
                format!("mean of arm {} is {m}, outside [0, 1]", i + 1),
            ));
        }
    }
    Ok(())
}

/// A stochastic or adversarial environment behind one interface.
#[derive(Debug, Clone, PartialEq)]
pub enum Environment<F> {
    Stochastic(StochasticEnv<F>),
    Adversarial(AdversarialEnv<F>),
}

impl<F: Scalar> Environment<F> {
    pub fn arm_count(&self) -> usize {
        match self {
            Environment::Stochastic(e) => e.arm_count(),
            Environment::Adversarial(e) => e.arm_count(),
        }
    }

    pub fn is_adversarial(&self) -> bool {
        matches!(self, Environment::Adversarial(_))
    }

    /// Full reward vector for round t (1-based). The rng argument is consumed
    /// only by stochastic draws.
    pub fn reward_vector(&self, t: u64, rng: &mut StreamRng) -> Result<Vec<F>> {
        match self {
            Environment::Stochastic(e) => Ok(e.reward_vector(rng)),
            Environment::Adversarial(e) => e.reward_vector(t),
        }
    }

    /// Best fixed arm over rounds 1..=up_to and its cumulative reward:
    /// expected (`up_to * mu*`) for stochastic environments, realized with
    /// smallest-index tie-break for adversarial ones.
    pub fn best_fixed_arm(&self, up_to: u64) -> Result<(usize, F)> {
        match self {
            Environment::Stochastic(e) => {
                Ok((e.best_arm(), F::from_count(up_to) * e.means()[e.best_arm()]))
            }
            Environment::Adversarial(e) => {
                let k = e.arm_count();
                let mut cum = vec![F::zero(); k];
                for t in 1..=up_to {
                    let row = e.reward_vector(t)?;
                    for (c, r) in cum.iter_mut().zip(row) {
                        *c += r;
                    }
                }
                let best = argmax(&cum);
                Ok((best, cum[best]))
            }
        }
    }
}

fn argmax<F: Scalar>(xs: &[F]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Reads a reward table from CSV: one row per round, K comma-separated values
/// in [0, 1], no header.
pub fn read_table_csv<F: Scalar>(path: impl AsRef<Path>) -> Result<AdversarialEnv<F>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let display = path.display().to_string();
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| Error::Csv {
                path: display.clone(),
                line: idx + 1,
                why: format!("cannot parse {:?} as a number", field.trim()),
            })?;
            row.push(F::from_f64(v).ok_or_else(|| Error::Csv {
                path: display.clone(),
                line: idx + 1,
                why: format!("value {v} not representable"),
            })?);
        }
        rows.push(row);
    }
    AdversarialEnv::table(rows)
}

/// Writes a reward table in the same CSV format the loader accepts.
pub fn write_table_csv<F: Scalar>(path: impl AsRef<Path>, rows: &[Vec<F>]) -> Result<()> {
    let mut out = String::new();
    for row in rows {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
