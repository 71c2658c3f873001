//! Randomized truncated instances and the revenue-gap machinery.
//!
//! An instance truncates the base family at random points: each bidder is
//! type A or B with fair coins; a type-A bidder is truncated at the value
//! with upper-tail quantile δ/2k, a type-B bidder at a value whose quantile
//! is drawn uniformly from [δ/2k, δ/k]. Under the conditioning event E
//! (properties P1–P5 over the deferred-decision quantile draws), exactly two
//! bidders see quantiles at most δ/k, one of each type, and the type-B one
//! sits at its atom — where any strategy must guess which is which.

use std::sync::Arc;

use rand::RngCore;
use rand_chacha::ChaCha8Rng;

use crate::distributions::{
    ProductDistribution, StronglyRegularBase, TruncatedDistribution, ValuationDistribution,
};
use crate::empirical::{learn, SampleMatrix};
use crate::myerson::{AuctionRule, BidProfile, PreparedAuction};
use crate::parallel::{map_chunks, Accumulator};
use crate::rng::{coin, trial_rng, uniform_in, unit_open_closed};
use crate::{Error, Result};

const STREAM_EVENT_E: u64 = 3;
const STREAM_GUESS: u64 = 4;
const STREAM_GAP: u64 = 5;
const STREAM_REVENUE: u64 = 6;

/// Default raw-draw budget for rejection sampling conditioned on event E.
pub const DEFAULT_REJECTION_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BidderType {
    A,
    B,
}

/// One draw from the adversarial distribution over distributions.
#[derive(Debug, Clone)]
pub struct AdversarialInstance {
    alpha: f64,
    delta: f64,
    types: Vec<BidderType>,
    /// Per-bidder truncation quantile: δ/2k for type A, the recorded uniform
    /// draw from [δ/2k, δ/k] for type B.
    truncation_quantiles: Vec<f64>,
    distributions: Vec<TruncatedDistribution>,
}

fn validate_params(k: usize, alpha: f64, delta: f64) -> Result<()> {
    if k < 2 {
        return Err(Error::domain(format!("need k >= 2 bidders, got {k}")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!(
            "delta must be in (0,1], got {delta}"
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!(
            "alpha must be in [0,1], got {alpha}"
        )));
    }
    Ok(())
}

impl AdversarialInstance {
    /// Draws bidder types and truncation points.
    pub fn sample(k: usize, alpha: f64, delta: f64, rng: &mut dyn RngCore) -> Result<Self> {
        validate_params(k, alpha, delta)?;
        let lo = delta / (2.0 * k as f64);
        let hi = delta / k as f64;
        let mut types = Vec::with_capacity(k);
        let mut quantiles = Vec::with_capacity(k);
        for _ in 0..k {
            if coin(rng) {
                types.push(BidderType::B);
                quantiles.push(uniform_in(rng, lo, hi));
            } else {
                types.push(BidderType::A);
                quantiles.push(lo);
            }
        }
        Self::from_parts(alpha, delta, types, quantiles)
    }

    /// Builds an instance from explicit coins (forced types and type-B
    /// truncation quantiles; type-A entries must carry δ/2k).
    pub fn from_parts(
        alpha: f64,
        delta: f64,
        types: Vec<BidderType>,
        truncation_quantiles: Vec<f64>,
    ) -> Result<Self> {
        let k = types.len();
        validate_params(k, alpha, delta)?;
        if truncation_quantiles.len() != k {
            return Err(Error::malformed("one truncation quantile per bidder"));
        }
        let lo = delta / (2.0 * k as f64);
        let hi = delta / k as f64;
        let base = StronglyRegularBase::new(alpha)?;
        let mut dists = Vec::with_capacity(k);
        for (ty, &q) in types.iter().zip(&truncation_quantiles) {
            let ok = match ty {
                BidderType::A => q == lo,
                BidderType::B => (lo..=hi).contains(&q),
            };
            if !ok {
                return Err(Error::domain(format!(
                    "truncation quantile {q} invalid for type {ty:?} (interval [{lo}, {hi}])"
                )));
            }
            dists.push(TruncatedDistribution::at_quantile(base, q)?);
        }
        Ok(Self {
            alpha,
            delta,
            types,
            truncation_quantiles,
            distributions: dists,
        })
    }

    pub fn k(&self) -> usize {
        self.types.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn bidder_type(&self, i: usize) -> BidderType {
        self.types[i]
    }

    pub fn truncation_quantile(&self, i: usize) -> f64 {
        self.truncation_quantiles[i]
    }

    pub fn distribution(&self, i: usize) -> &TruncatedDistribution {
        &self.distributions[i]
    }

    /// The instance as a product distribution (for the Myerson estimators).
    pub fn product(&self) -> ProductDistribution {
        ProductDistribution::new(
            self.distributions
                .iter()
                .map(|d| Arc::new(*d) as Arc<dyn ValuationDistribution>)
                .collect(),
        )
        .expect("k >= 2")
    }

    /// Closed-form upper bound R* on the optimal expected revenue.
    pub fn optimal_revenue_upper_bound(&self) -> f64 {
        r_star(self.k(), self.alpha, self.delta)
    }
}

/// (m+1) × k deferred-decision quantiles: rows 0..m−1 are the sample rounds,
/// row m is the input round.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileMatrix {
    m: usize,
    k: usize,
    data: Vec<f64>,
}

impl QuantileMatrix {
    pub fn draw(m: usize, k: usize, rng: &mut dyn RngCore) -> Self {
        let data = (0..(m + 1) * k).map(|_| unit_open_closed(rng)).collect();
        Self { m, k, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::malformed(
                "quantile matrix needs at least the input row",
            ));
        }
        let k = rows[0].len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::malformed("ragged quantile matrix"));
        }
        if rows.iter().flatten().any(|q| !(*q > 0.0 && *q <= 1.0)) {
            return Err(Error::malformed("quantiles must lie in (0, 1]"));
        }
        Ok(Self {
            m: rows.len() - 1,
            k,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sample_quantile(&self, round: usize, bidder: usize) -> f64 {
        self.data[round * self.k + bidder]
    }

    pub fn input_quantile(&self, bidder: usize) -> f64 {
        self.data[self.m * self.k + bidder]
    }

    /// Input-round valuations under an instance.
    pub fn input_values(&self, instance: &AdversarialInstance) -> Result<Vec<f64>> {
        (0..self.k)
            .map(|i| {
                instance
                    .distribution(i)
                    .quantile_to_value(self.input_quantile(i))
            })
            .collect()
    }

    /// Sample-round valuations as a k × m matrix.
    pub fn sample_values(&self, instance: &AdversarialInstance) -> Result<SampleMatrix> {
        let rows = (0..self.k)
            .map(|i| {
                (0..self.m)
                    .map(|r| {
                        instance
                            .distribution(i)
                            .quantile_to_value(self.sample_quantile(r, i))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        SampleMatrix::new(rows)
    }
}

/// Literal evaluation of properties P1–P5.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventERecord {
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
    pub p4: bool,
    pub p5: bool,
    /// The two low-quantile bidders (j, ℓ) when P1 holds.
    pub low_pair: Option<(usize, usize)>,
}

impl EventERecord {
    pub fn holds(&self) -> bool {
        self.p1 && self.p2 && self.p3 && self.p4 && self.p5
    }
}

/// Evaluates event E on one instance and one quantile matrix.
///
/// P2–P5 need the pair (j, ℓ) that P1 identifies; when P1 fails they are
/// recorded as false.
pub fn detect_event_e(
    instance: &AdversarialInstance,
    quantiles: &QuantileMatrix,
) -> Result<EventERecord> {
    if quantiles.k() != instance.k() {
        return Err(Error::malformed(format!(
            "quantile matrix has k={}, instance has k={}",
            quantiles.k(),
            instance.k()
        )));
    }
    let k = instance.k();
    let threshold_low = instance.delta / k as f64;
    let threshold_half = instance.delta / (2.0 * k as f64);

    let low: Vec<usize> = (0..k)
        .filter(|&i| quantiles.input_quantile(i) <= threshold_low)
        .collect();
    if low.len() != 2 {
        return Ok(EventERecord {
            p1: false,
            p2: false,
            p3: false,
            p4: false,
            p5: false,
            low_pair: None,
        });
    }
    let (j, l) = (low[0], low[1]);
    let p2 = quantiles.input_quantile(j) > threshold_half
        && quantiles.input_quantile(l) > threshold_half;
    let p3 = (0..quantiles.m()).all(|r| {
        quantiles.sample_quantile(r, j) > threshold_low
            && quantiles.sample_quantile(r, l) > threshold_low
    });
    let p4 = instance.bidder_type(j) != instance.bidder_type(l);
    let p5 = if p4 {
        let b = if instance.bidder_type(j) == BidderType::B {
            j
        } else {
            l
        };
        quantiles.input_quantile(b) <= instance.truncation_quantile(b)
    } else {
        false
    };
    Ok(EventERecord {
        p1: true,
        p2,
        p3,
        p4,
        p5,
        low_pair: Some((j, l)),
    })
}

/// Monte Carlo frequency of event E over all three stages of randomness:
/// (frequency, binomial standard error).
pub fn event_e_frequency(
    k: usize,
    alpha: f64,
    delta: f64,
    m: usize,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    validate_params(k, alpha, delta)?;
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    let hits: Vec<Result<u64>> = map_chunks(trials as usize, |range| {
        let mut count = 0u64;
        for t in range {
            let mut rng = trial_rng(seed, STREAM_EVENT_E, t as u64);
            let instance = AdversarialInstance::sample(k, alpha, delta, &mut rng)?;
            let matrix = QuantileMatrix::draw(m, k, &mut rng);
            if detect_event_e(&instance, &matrix)?.holds() {
                count += 1;
            }
        }
        Ok(count)
    });
    let mut total = 0u64;
    for h in hits {
        total += h?;
    }
    let p = total as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    Ok((p, se))
}

/// Allocation rule applied between the two low-quantile bidders under E.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessRule {
    /// The Bayes-optimal rule: give the item to the lower valuation.
    LowerValuation,
    /// Oracle baseline: always picks the type-B bidder.
    OracleTypeB,
    /// Symmetric coin baseline.
    UniformCoin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuessErrorReport {
    /// Fraction of conditioned trials in which the type-A bidder got the item.
    pub error_rate: f64,
    pub std_error: f64,
    pub conditioned_trials: u64,
    pub raw_trials: u64,
}

/// Error frequency of the lower-valuation guess, conditioned on event E by
/// rejection sampling with the default raw-draw budget.
pub fn bayes_guess_error(
    k: usize,
    alpha: f64,
    delta: f64,
    m: usize,
    trials: u64,
    seed: u64,
) -> Result<GuessErrorReport> {
    bayes_guess_error_with(
        k,
        alpha,
        delta,
        m,
        trials,
        seed,
        DEFAULT_REJECTION_BUDGET,
        GuessRule::LowerValuation,
    )
}

/// As [`bayes_guess_error`] with an explicit budget and guess rule.
///
/// Rejection draws a fixed per-trial protocol from one seeded stream: input
/// quantiles first (P1/P2 short-circuit), then the pair's type coins (P4),
/// the type-B truncation draw (P5), and last the 2m sample-round quantiles
/// (P3). Conditioned on acceptance this is exactly the law of E restricted
/// to the quantities the guess depends on.
#[allow(clippy::too_many_arguments)]
pub fn bayes_guess_error_with(
    k: usize,
    alpha: f64,
    delta: f64,
    m: usize,
    trials: u64,
    seed: u64,
    budget: u64,
    rule: GuessRule,
) -> Result<GuessErrorReport> {
    validate_params(k, alpha, delta)?;
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    let base = StronglyRegularBase::new(alpha)?;
    let lo = delta / (2.0 * k as f64);
    let hi = delta / k as f64;

    let mut rng: ChaCha8Rng = trial_rng(seed, STREAM_GUESS, 0);
    let mut input_q = vec![0.0f64; k];
    let mut errors = 0u64;
    let mut conditioned = 0u64;
    let mut raw = 0u64;

    while conditioned < trials {
        if raw >= budget {
            let partial_rate = if conditioned == 0 {
                f64::NAN
            } else {
                errors as f64 / conditioned as f64
            };
            return Err(Error::BudgetExceeded {
                budget,
                conditioned,
                requested: trials,
                partial_rate,
            });
        }
        raw += 1;

        for q in input_q.iter_mut() {
            *q = unit_open_closed(&mut rng);
        }
        // P1: exactly two input quantiles at most δ/k.
        let mut first = usize::MAX;
        let mut second = usize::MAX;
        let mut count = 0;
        for (i, &q) in input_q.iter().enumerate() {
            if q <= hi {
                count += 1;
                if count == 1 {
                    first = i;
                } else if count == 2 {
                    second = i;
                } else {
                    break;
                }
            }
        }
        if count != 2 {
            continue;
        }
        // P2: both above δ/2k.
        if input_q[first] <= lo || input_q[second] <= lo {
            continue;
        }
        // P4: one type A, one type B.
        let first_is_b = coin(&mut rng);
        let second_is_b = coin(&mut rng);
        if first_is_b == second_is_b {
            continue;
        }
        let (a_idx, b_idx) = if first_is_b {
            (second, first)
        } else {
            (first, second)
        };
        // P5: the type-B bidder's valuation equals its maximum, i.e. its
        // input quantile is at most the truncation draw.
        let b_trunc_q = uniform_in(&mut rng, lo, hi);
        if input_q[b_idx] > b_trunc_q {
            continue;
        }
        // P3: all sample-round quantiles of the pair above δ/k.
        let mut p3 = true;
        for _ in 0..2 * m {
            if unit_open_closed(&mut rng) <= hi {
                p3 = false;
                break;
            }
        }
        if !p3 {
            continue;
        }

        conditioned += 1;
        let v_a = base.quantile_to_value(input_q[a_idx])?;
        let v_b = base.quantile_to_value(b_trunc_q)?;
        let picked_a = match rule {
            GuessRule::LowerValuation => v_a < v_b,
            GuessRule::OracleTypeB => false,
            GuessRule::UniformCoin => coin(&mut rng),
        };
        if picked_a {
            errors += 1;
        }
    }

    let rate = errors as f64 / trials as f64;
    Ok(GuessErrorReport {
        error_rate: rate,
        std_error: (rate * (1.0 - rate) / trials as f64).sqrt(),
        conditioned_trials: conditioned,
        raw_trials: raw,
    })
}

/// Closed-form revenue-gap fraction ε(α, δ) for k bidders, by branch on the
/// position of the base monopoly quantile α^(1/(1−α)) relative to δ/2k
/// and 1/k.
pub fn epsilon_bound(alpha: f64, delta: f64, k: usize) -> Result<f64> {
    validate_params(k, alpha, delta)?;
    let e3 = (3.0_f64).exp();
    let kf = k as f64;
    if alpha == 1.0 {
        let num = 1.0 - (2.0_f64).ln();
        let denom = 96.0 * e3 * (kf / 1.0_f64.exp()).min(1.0) * kf.max(1.0_f64.exp()).ln();
        return Ok(num / denom * delta * delta);
    }
    let q_alpha = if alpha == 0.0 {
        0.0
    } else {
        alpha.powf(1.0 / (1.0 - alpha))
    };
    let lead = 1.0 - alpha * (2.0_f64).powf(1.0 - alpha);
    if q_alpha >= 1.0 / kf {
        Ok(lead / (96.0 * e3) * delta.powf(1.0 + alpha))
    } else if q_alpha > delta / (2.0 * kf) {
        Ok(lead / (96.0 * e3) * delta.powf(1.0 + alpha) / (kf * q_alpha).powf(alpha))
    } else {
        Ok(lead * (2.0_f64).powf(alpha) / (96.0 * e3) * delta)
    }
}

/// Closed-form upper bound R* on the optimal expected revenue of an
/// adversarial instance with these parameters.
pub fn r_star(k: usize, alpha: f64, delta: f64) -> f64 {
    let kf = k as f64;
    let e = 1.0_f64.exp();
    if alpha == 1.0 {
        let q_a = 1.0 / e;
        let v_star = kf.max(e).ln();
        return (kf * q_a).min(1.0) * v_star;
    }
    let q_alpha = if alpha == 0.0 {
        0.0
    } else {
        alpha.powf(1.0 / (1.0 - alpha))
    };
    let q_a = q_alpha.max(delta / (2.0 * kf));
    let lam = 1.0 - alpha;
    let v_star = ((1.0 / q_a).max(kf).powf(lam) - 1.0) / lam;
    (kf * q_a).min(1.0) * v_star
}

/// Monte Carlo expected revenue of the instance-aware Myerson auction on
/// fresh instances drawn with these parameters: (mean, standard error).
pub fn adversarial_myerson_revenue(
    k: usize,
    alpha: f64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    validate_params(k, alpha, delta)?;
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    let chunks: Vec<Result<Accumulator>> = map_chunks(trials as usize, |range| {
        let mut acc = Accumulator::default();
        for t in range {
            let mut rng = trial_rng(seed, STREAM_REVENUE, t as u64);
            let instance = AdversarialInstance::sample(k, alpha, delta, &mut rng)?;
            let market = instance.product();
            let prepared = PreparedAuction::new(AuctionRule::myerson(), &market)?;
            let bids = BidProfile::new(market.sample_profile(&mut rng))?;
            acc.push(prepared.run(&bids)?.payment);
        }
        Ok(acc)
    });
    let mut acc = Accumulator::default();
    for c in chunks {
        acc.merge(&c?);
    }
    Ok((acc.mean(), acc.std_error()))
}

/// Strategy whose virtual welfare is compared against the instance-aware
/// optimum in [`revenue_gap_experiment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapStrategy {
    /// The optimum itself (gap 0, a null check).
    InstanceAwareMyerson,
    /// Under event E, award to the lower-valuation bidder of the low pair;
    /// elsewhere play the instance-aware optimum.
    GuessLowerUnderE,
    /// Learn the empirical Myerson auction from the m sample rounds and run
    /// it on the input round.
    EmpiricalMyerson { xi_hat: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    /// Mean virtual-welfare gap (optimal minus strategy) per input.
    pub gap_mean: f64,
    pub gap_se: f64,
    /// Closed-form upper bound on the optimal revenue.
    pub r_star: f64,
    /// gap_mean / R*.
    pub gap_over_r_star: f64,
    pub trials: u64,
}

/// Estimates the expected virtual-welfare gap between the instance-aware
/// Myerson auction and a strategy, over instance, sample, and input
/// randomness.
pub fn revenue_gap_experiment(
    k: usize,
    alpha: f64,
    delta: f64,
    m: usize,
    trials: u64,
    seed: u64,
    strategy: GapStrategy,
) -> Result<GapReport> {
    validate_params(k, alpha, delta)?;
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    let chunks: Vec<Result<Accumulator>> = map_chunks(trials as usize, |range| {
        let mut acc = Accumulator::default();
        for t in range {
            let mut rng = trial_rng(seed, STREAM_GAP, t as u64);
            let instance = AdversarialInstance::sample(k, alpha, delta, &mut rng)?;
            let matrix = QuantileMatrix::draw(m, k, &mut rng);
            let values = matrix.input_values(&instance)?;
            let phi: Vec<f64> = (0..k)
                .map(|i| instance.distribution(i).virtual_value(values[i]))
                .collect::<Result<_>>()?;
            let vw_opt = phi.iter().fold(0.0_f64, |a, &b| a.max(b));

            let vw_strategy = match strategy {
                GapStrategy::InstanceAwareMyerson => vw_opt,
                GapStrategy::GuessLowerUnderE => {
                    let record = detect_event_e(&instance, &matrix)?;
                    match (record.holds(), record.low_pair) {
                        (true, Some((j, l))) => {
                            let w = if values[j] <= values[l] { j } else { l };
                            phi[w]
                        }
                        _ => vw_opt,
                    }
                }
                GapStrategy::EmpiricalMyerson { xi_hat } => {
                    let samples = matrix.sample_values(&instance)?;
                    let auction = learn(&samples, xi_hat)?;
                    let outcome = auction.run(&BidProfile::new(values.clone())?)?;
                    outcome.winner.map_or(0.0, |w| phi[w])
                }
            };
            acc.push(vw_opt - vw_strategy);
        }
        Ok(acc)
    });
    let mut acc = Accumulator::default();
    for c in chunks {
        acc.merge(&c?);
    }
    let rs = r_star(k, alpha, delta);
    Ok(GapReport {
        gap_mean: acc.mean(),
        gap_se: acc.std_error(),
        r_star: rs,
        gap_over_r_star: acc.mean() / rs,
        trials,
    })
}

/// [`revenue_gap_experiment`] against an arbitrary auction strategy given as
/// a function from (sample matrix, input bids) to an outcome. The strategy
/// sees only what an m-sample auction strategy may see; its virtual welfare
/// is scored with the instance's true virtual values.
#[allow(clippy::too_many_arguments)]
pub fn revenue_gap_experiment_fn<F>(
    k: usize,
    alpha: f64,
    delta: f64,
    m: usize,
    trials: u64,
    seed: u64,
    strategy: F,
) -> Result<GapReport>
where
    F: Fn(&SampleMatrix, &BidProfile) -> Result<crate::myerson::AuctionOutcome> + Sync,
{
    validate_params(k, alpha, delta)?;
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    let chunks: Vec<Result<Accumulator>> = map_chunks(trials as usize, |range| {
        let mut acc = Accumulator::default();
        for t in range {
            let mut rng = trial_rng(seed, STREAM_GAP, t as u64);
            let instance = AdversarialInstance::sample(k, alpha, delta, &mut rng)?;
            let matrix = QuantileMatrix::draw(m, k, &mut rng);
            let values = matrix.input_values(&instance)?;
            let phi: Vec<f64> = (0..k)
                .map(|i| instance.distribution(i).virtual_value(values[i]))
                .collect::<Result<_>>()?;
            let vw_opt = phi.iter().fold(0.0_f64, |a, &b| a.max(b));
            let samples = matrix.sample_values(&instance)?;
            let outcome = strategy(&samples, &BidProfile::new(values)?)?;
            let vw = outcome.winner.map_or(0.0, |w| phi[w]);
            acc.push(vw_opt - vw);
        }
        Ok(acc)
    });
    let mut acc = Accumulator::default();
    for c in chunks {
        acc.merge(&c?);
    }
    let rs = r_star(k, alpha, delta);
    Ok(GapReport {
        gap_mean: acc.mean(),
        gap_se: acc.std_error(),
        r_star: rs,
        gap_over_r_star: acc.mean() / rs,
        trials,
    })
}
