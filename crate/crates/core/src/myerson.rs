//! Myerson's optimal auction for known distributions.
//!
//! Revenue curves live in quantile space: R(q) = q · v(q) is the expected
//! revenue of posting the price v(q) to a single bidder. Ironing replaces a
//! revenue curve (or any sampled point set) with its least concave upper
//! bound, whose slopes are the ironed virtual values. The auction awards the
//! item to the highest nonnegative virtual bid and charges the minimum bid
//! that still wins, found by bisection so the same code path serves closed
//! forms and ironed step functions.

use std::sync::Arc;

use crate::distributions::{ProductDistribution, ValuationDistribution, Q_MIN};
use crate::parallel::{map_chunks, Accumulator};
use crate::rng::trial_rng;
use crate::{Error, Result};

/// Stream tag for valuation draws in the revenue/virtual-welfare estimators.
/// Shared by design: paired estimates must see identical profiles.
const STREAM_VALUES: u64 = 1;

/// Bid-space bisection tolerance for threshold payments.
const PAYMENT_TOL: f64 = 1e-9;

/// Expected-revenue curve of one distribution, R(q) = q · v(q).
pub struct RevenueCurve {
    dist: Arc<dyn ValuationDistribution>,
}

impl RevenueCurve {
    pub fn new(dist: Arc<dyn ValuationDistribution>) -> Self {
        Self { dist }
    }

    /// R(q) for q ∈ [0, 1]. R(0) is the limit of q·v(q): exactly 0 when the
    /// support is bounded, otherwise 0 or the finite limit as probed at the
    /// quantile floor.
    pub fn evaluate(&self, q: f64) -> Result<f64> {
        if q == 0.0 {
            if self.dist.support().1.is_finite() {
                return Ok(0.0);
            }
            let r = Q_MIN * self.dist.quantile_to_value(Q_MIN)?;
            return Ok(if r < 1e-9 { 0.0 } else { r });
        }
        Ok(q * self.dist.quantile_to_value(q)?)
    }
}

/// Piecewise-linear concave majorant of a quantile-space point set.
#[derive(Debug, Clone, PartialEq)]
pub struct IronedCurve {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl IronedCurve {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Per-segment slopes; strictly decreasing for a minimal hull.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Hull value at q, linearly interpolated (clamped to the domain).
    pub fn value_at(&self, q: f64) -> f64 {
        let bp = &self.breakpoints;
        if q <= bp[0] {
            return self.values[0];
        }
        if q >= bp[bp.len() - 1] {
            return self.values[bp.len() - 1];
        }
        let seg = self.segment_index(q);
        self.values[seg] + self.slopes[seg] * (q - bp[seg])
    }

    /// Ironed virtual value at quantile q: the slope of the segment
    /// containing q, with the right-limit convention at breakpoints.
    pub fn virtual_value_at(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::domain(format!("quantile must be in (0,1], got {q}")));
        }
        Ok(self.slopes[self.segment_index(q)])
    }

    /// Index of the segment whose half-open interval [b_i, b_{i+1}) contains
    /// q, clamped to the hull domain.
    fn segment_index(&self, q: f64) -> usize {
        let n_seg = self.slopes.len();
        let idx = self.breakpoints.partition_point(|&b| b <= q);
        idx.saturating_sub(1).min(n_seg - 1)
    }
}

/// Cross product (a − o) × (b − o); negative means a clockwise (concave) turn
/// when traversing o → a → b with increasing quantile.
pub(crate) fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Least concave upper bound of a sorted point set.
///
/// The result dominates every input point, has strictly decreasing segment
/// slopes, and every hull vertex is an input point.
pub fn iron(points: &[(f64, f64)]) -> Result<IronedCurve> {
    if points.len() < 2 {
        return Err(Error::malformed(format!(
            "ironing needs at least 2 points, got {}",
            points.len()
        )));
    }
    for w in points.windows(2) {
        if w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::malformed(format!(
                "quantiles must be strictly increasing, got {} then {}",
                w[0].0, w[1].0
            )));
        }
    }
    for &(q, r) in points {
        if !(0.0..=1.0).contains(&q) || !r.is_finite() {
            return Err(Error::malformed(format!(
                "point ({q}, {r}) outside quantile space"
            )));
        }
    }

    // Monotone chain, upper hull only. Collinear middles are popped so the
    // hull is minimal.
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }

    let breakpoints: Vec<f64> = hull.iter().map(|p| p.0).collect();
    let values: Vec<f64> = hull.iter().map(|p| p.1).collect();
    let slopes: Vec<f64> = hull
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    Ok(IronedCurve {
        breakpoints,
        values,
        slopes,
    })
}

impl IronedCurve {
    /// Rebuilds a curve from recorded parts (for the learned-auction file
    /// reader). Validates shape and concavity but does not re-iron.
    pub(crate) fn from_parts(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        slopes: Vec<f64>,
    ) -> Result<Self> {
        if breakpoints.len() < 2
            || values.len() != breakpoints.len()
            || slopes.len() + 1 != breakpoints.len()
        {
            return Err(Error::malformed("inconsistent hull record"));
        }
        if breakpoints
            .iter()
            .chain(&values)
            .chain(&slopes)
            .any(|x| !x.is_finite())
        {
            return Err(Error::malformed("hull record contains non-finite numbers"));
        }
        if breakpoints
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::malformed("hull breakpoints must increase"));
        }
        if slopes.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::malformed("hull slopes must strictly decrease"));
        }
        Ok(IronedCurve {
            breakpoints,
            values,
            slopes,
        })
    }
}

/// One bid per bidder, all nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct BidProfile {
    bids: Vec<f64>,
}

impl BidProfile {
    pub fn new(bids: Vec<f64>) -> Result<Self> {
        if bids.is_empty() {
            return Err(Error::malformed("bid profile must not be empty"));
        }
        if let Some(b) = bids.iter().find(|b| b.is_nan() || **b < 0.0) {
            return Err(Error::malformed(format!("negative bid {b}")));
        }
        Ok(Self { bids })
    }

    pub fn bids(&self) -> &[f64] {
        &self.bids
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }
}

/// How equal highest virtual bids are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    #[default]
    LowestIndex,
    HighestIndex,
}

/// Winner (if any), threshold payment, and the per-bidder virtual values at
/// the realized bids.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionOutcome {
    pub winner: Option<usize>,
    pub payment: f64,
    pub virtual_bids: Vec<f64>,
}

impl AuctionOutcome {
    fn reject(virtual_bids: Vec<f64>) -> Self {
        Self {
            winner: None,
            payment: 0.0,
            virtual_bids,
        }
    }

    /// Winner's virtual value, 0 when the item is withheld.
    pub fn winner_virtual_value(&self) -> f64 {
        self.winner.map_or(0.0, |w| self.virtual_bids[w])
    }
}

/// Picks the argmax of `score` among `eligible` indices under a tie rule.
pub(crate) fn select_winner<F>(
    n: usize,
    eligible: impl Fn(usize) -> bool,
    score: F,
    tie: TieRule,
) -> Option<usize>
where
    F: Fn(usize) -> f64,
{
    let mut best: Option<(usize, f64)> = None;
    for i in 0..n {
        if !eligible(i) {
            continue;
        }
        let s = score(i);
        best = match best {
            None => Some((i, s)),
            Some((bi, bs)) => {
                if s > bs || (s == bs && tie == TieRule::HighestIndex) {
                    Some((i, s))
                } else {
                    Some((bi, bs))
                }
            }
        };
    }
    best.map(|(i, _)| i)
}

/// Smallest b in [0, hi] with `phi(b) >= target`, to absolute tolerance
/// 1e-9 in bid space. Requires `phi` nondecreasing and `phi(hi) >= target`.
pub(crate) fn threshold_bid<F>(phi: F, target: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if phi(0.0)? >= target {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, hi);
    while hi - lo > PAYMENT_TOL {
        let mid = 0.5 * (lo + hi);
        if phi(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Runs Myerson's auction: the bidder with the highest nonnegative virtual
/// bid wins and pays the minimum bid that still (ties included) wins.
pub fn run_myerson(
    dists: &ProductDistribution,
    bids: &BidProfile,
    tie: TieRule,
) -> Result<AuctionOutcome> {
    if bids.len() != dists.k() {
        return Err(Error::malformed(format!(
            "{} bids for {} bidders",
            bids.len(),
            dists.k()
        )));
    }
    let virtual_bids: Vec<f64> = bids
        .bids()
        .iter()
        .enumerate()
        .map(|(i, &b)| dists.component(i).virtual_value(b))
        .collect::<Result<_>>()?;

    let winner = select_winner(
        dists.k(),
        |i| virtual_bids[i] >= 0.0,
        |i| virtual_bids[i],
        tie,
    );
    let Some(w) = winner else {
        return Ok(AuctionOutcome::reject(virtual_bids));
    };

    let threshold = virtual_bids
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != w)
        .map(|(_, &phi)| phi)
        .fold(0.0_f64, f64::max);
    let dist = dists.component(w);
    let payment = threshold_bid(|b| dist.virtual_value(b), threshold, bids.bids()[w])?;
    Ok(AuctionOutcome {
        winner: Some(w),
        payment,
        virtual_bids,
    })
}

/// Truthful single-item auction rules the estimators understand.
#[derive(Debug, Clone, PartialEq)]
pub enum AuctionRule {
    Myerson {
        tie: TieRule,
    },
    SecondPrice,
    /// Eager per-bidder monopoly reserves: bidders below their reserve are
    /// removed, the highest surviving bid wins.
    SecondPriceMonopolyReserves,
    /// Offers price `prices[i]` to bidder i in index order; the first
    /// acceptor buys.
    SequentialPostedPrice {
        prices: Vec<f64>,
    },
    /// Pays-bid rule. Not truthful: revenue exceeds virtual welfare, which
    /// makes it the negative control for the equivalence check.
    FirstPrice,
    AlwaysReject,
}

impl AuctionRule {
    pub fn myerson() -> Self {
        AuctionRule::Myerson {
            tie: TieRule::LowestIndex,
        }
    }
}

/// An auction rule with per-bidder constants (reserves) resolved once.
pub struct PreparedAuction<'a> {
    rule: AuctionRule,
    dists: &'a ProductDistribution,
    reserves: Vec<f64>,
}

impl<'a> PreparedAuction<'a> {
    pub fn new(rule: AuctionRule, dists: &'a ProductDistribution) -> Result<Self> {
        let reserves = match &rule {
            AuctionRule::SecondPriceMonopolyReserves => dists
                .components()
                .iter()
                .map(|d| d.quantile_to_value(d.monopoly_quantile()?))
                .collect::<Result<Vec<f64>>>()?,
            AuctionRule::SequentialPostedPrice { prices } => {
                if prices.len() != dists.k() {
                    return Err(Error::malformed(format!(
                        "{} posted prices for {} bidders",
                        prices.len(),
                        dists.k()
                    )));
                }
                prices.clone()
            }
            _ => Vec::new(),
        };
        Ok(Self {
            rule,
            dists,
            reserves,
        })
    }

    pub fn run(&self, bids: &BidProfile) -> Result<AuctionOutcome> {
        if bids.len() != self.dists.k() {
            return Err(Error::malformed(format!(
                "{} bids for {} bidders",
                bids.len(),
                self.dists.k()
            )));
        }
        let b = bids.bids();
        let virtual_bids: Vec<f64> = b
            .iter()
            .enumerate()
            .map(|(i, &bid)| self.dists.component(i).virtual_value(bid))
            .collect::<Result<_>>()?;
        let k = self.dists.k();

        let outcome = match &self.rule {
            AuctionRule::Myerson { tie } => return run_myerson(self.dists, bids, *tie),
            AuctionRule::AlwaysReject => AuctionOutcome::reject(virtual_bids),
            AuctionRule::SecondPrice => {
                let w = select_winner(k, |_| true, |i| b[i], TieRule::LowestIndex)
                    .expect("nonempty profile");
                let second = (0..k)
                    .filter(|&i| i != w)
                    .map(|i| b[i])
                    .fold(0.0_f64, f64::max);
                AuctionOutcome {
                    winner: Some(w),
                    payment: second,
                    virtual_bids,
                }
            }
            AuctionRule::FirstPrice => {
                let w = select_winner(k, |_| true, |i| b[i], TieRule::LowestIndex)
                    .expect("nonempty profile");
                AuctionOutcome {
                    winner: Some(w),
                    payment: b[w],
                    virtual_bids,
                }
            }
            AuctionRule::SecondPriceMonopolyReserves => {
                let eligible = |i: usize| b[i] >= self.reserves[i];
                match select_winner(k, eligible, |i| b[i], TieRule::LowestIndex) {
                    None => AuctionOutcome::reject(virtual_bids),
                    Some(w) => {
                        let second = (0..k)
                            .filter(|&i| i != w && eligible(i))
                            .map(|i| b[i])
                            .fold(self.reserves[w], f64::max);
                        AuctionOutcome {
                            winner: Some(w),
                            payment: second,
                            virtual_bids,
                        }
                    }
                }
            }
            AuctionRule::SequentialPostedPrice { .. } => {
                match (0..k).find(|&i| b[i] >= self.reserves[i]) {
                    None => AuctionOutcome::reject(virtual_bids),
                    Some(w) => AuctionOutcome {
                        winner: Some(w),
                        payment: self.reserves[w],
                        virtual_bids,
                    },
                }
            }
        };
        Ok(outcome)
    }
}

/// Paired Monte Carlo estimates over shared valuation draws.
#[derive(Debug, Clone, Copy)]
pub struct PairedEstimate {
    pub revenue_mean: f64,
    pub revenue_se: f64,
    pub virtual_welfare_mean: f64,
    pub virtual_welfare_se: f64,
    /// Mean and standard error of the per-trial difference
    /// payment − virtual welfare.
    pub diff_mean: f64,
    pub diff_se: f64,
    pub trials: u64,
}

/// Revenue and virtual welfare of `rule` on `trials` i.i.d. profiles, with
/// per-trial seeds derived from `seed`. Bit-identical for a fixed seed
/// regardless of worker count.
pub fn estimate_paired(
    rule: &AuctionRule,
    dists: &ProductDistribution,
    trials: u64,
    seed: u64,
) -> Result<PairedEstimate> {
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    let prepared = PreparedAuction::new(rule.clone(), dists)?;
    let chunks: Vec<Result<(Accumulator, Accumulator, Accumulator)>> =
        map_chunks(trials as usize, |range| {
            let mut rev = Accumulator::default();
            let mut vw = Accumulator::default();
            let mut diff = Accumulator::default();
            for t in range {
                let mut rng = trial_rng(seed, STREAM_VALUES, t as u64);
                let profile = BidProfile::new(dists.sample_profile(&mut rng))?;
                let outcome = prepared.run(&profile)?;
                let w = outcome.winner_virtual_value();
                rev.push(outcome.payment);
                vw.push(w);
                diff.push(outcome.payment - w);
            }
            Ok((rev, vw, diff))
        });
    let mut rev = Accumulator::default();
    let mut vw = Accumulator::default();
    let mut diff = Accumulator::default();
    for c in chunks {
        let (r, v, d) = c?;
        rev.merge(&r);
        vw.merge(&v);
        diff.merge(&d);
    }
    Ok(PairedEstimate {
        revenue_mean: rev.mean(),
        revenue_se: rev.std_error(),
        virtual_welfare_mean: vw.mean(),
        virtual_welfare_se: vw.std_error(),
        diff_mean: diff.mean(),
        diff_se: diff.std_error(),
        trials,
    })
}

/// Monte Carlo expected revenue: (mean payment, standard error).
pub fn estimate_revenue(
    rule: &AuctionRule,
    dists: &ProductDistribution,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let est = estimate_paired(rule, dists, trials, seed)?;
    Ok((est.revenue_mean, est.revenue_se))
}

/// Monte Carlo expected virtual welfare: (mean winner virtual value, standard
/// error). Shares valuation draws with [`estimate_revenue`] at equal seeds.
pub fn estimate_virtual_welfare(
    rule: &AuctionRule,
    dists: &ProductDistribution,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let est = estimate_paired(rule, dists, trials, seed)?;
    Ok((est.virtual_welfare_mean, est.virtual_welfare_se))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::StronglyRegularBase;

    fn exp_market(k: usize) -> ProductDistribution {
        ProductDistribution::iid(Arc::new(StronglyRegularBase::exponential()), k).unwrap()
    }

    #[test]
    fn iron_two_point_flat() {
        let hull = iron(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert_eq!(hull.breakpoints(), &[0.0, 1.0]);
        assert_eq!(hull.slopes(), &[0.0]);
        assert_eq!(hull.virtual_value_at(0.5).unwrap(), 0.0);
    }

    #[test]
    fn iron_drops_interior_point() {
        let pts = [(0.0, 0.0), (0.25, 0.5), (0.5, 0.6), (0.75, 0.9), (1.0, 0.0)];
        let hull = iron(&pts).unwrap();
        assert_eq!(hull.breakpoints(), &[0.0, 0.25, 0.75, 1.0]);
        let slopes = hull.slopes();
        assert!((slopes[0] - 2.0).abs() < 1e-12);
        assert!((slopes[1] - 0.8).abs() < 1e-12);
        assert!((slopes[2] + 3.6).abs() < 1e-12);
        // The dropped point sits strictly below the hull.
        assert!(hull.value_at(0.5) > 0.6);
        // Right-limit convention at the 0.25 breakpoint.
        assert!((hull.virtual_value_at(0.25).unwrap() - 0.8).abs() < 1e-12);
        assert!((hull.virtual_value_at(0.6).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn iron_concave_input_is_identity() {
        let pts = [(0.0, 0.0), (0.2, 0.8), (0.6, 1.2), (1.0, 0.3)];
        let hull = iron(&pts).unwrap();
        assert_eq!(hull.breakpoints().len(), 4);
        for (i, &(q, r)) in pts.iter().enumerate() {
            assert_eq!(hull.breakpoints()[i], q);
            assert_eq!(hull.values()[i], r);
        }
    }

    #[test]
    fn iron_rejects_malformed_input() {
        assert!(iron(&[(0.0, 0.0)]).is_err());
        assert!(iron(&[(0.5, 0.0), (0.5, 1.0)]).is_err());
        assert!(iron(&[(0.7, 0.0), (0.3, 1.0)]).is_err());
        assert!(iron(&[(0.0, 0.0), (1.5, 1.0)]).is_err());
    }

    #[test]
    fn ironed_virtual_value_domain() {
        let hull = iron(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert!(hull.virtual_value_at(0.0).is_err());
        assert!(hull.virtual_value_at(1.1).is_err());
        assert!(hull.virtual_value_at(1.0).is_ok());
    }

    #[test]
    fn myerson_two_exponential_bidders() {
        let market = exp_market(2);
        // φ(v) = v − 1: second bidder below reserve, winner pays φ⁻¹(0) = 1.
        let out = run_myerson(
            &market,
            &BidProfile::new(vec![2.0, 0.5]).unwrap(),
            TieRule::LowestIndex,
        )
        .unwrap();
        assert_eq!(out.winner, Some(0));
        assert!((out.payment - 1.0).abs() < 1e-8);

        // Both above reserve: winner pays the second bid by symmetry.
        let out = run_myerson(
            &market,
            &BidProfile::new(vec![2.0, 1.5]).unwrap(),
            TieRule::LowestIndex,
        )
        .unwrap();
        assert_eq!(out.winner, Some(0));
        assert!((out.payment - 1.5).abs() < 1e-8);
    }

    #[test]
    fn myerson_withholds_from_alpha_zero() {
        let market =
            ProductDistribution::iid(Arc::new(StronglyRegularBase::new(0.0).unwrap()), 1).unwrap();
        let out = run_myerson(
            &market,
            &BidProfile::new(vec![100.0]).unwrap(),
            TieRule::LowestIndex,
        )
        .unwrap();
        assert_eq!(out.winner, None);
        assert_eq!(out.payment, 0.0);
    }

    #[test]
    fn myerson_tie_rules() {
        let market = exp_market(2);
        let bids = BidProfile::new(vec![2.0, 2.0]).unwrap();
        let low = run_myerson(&market, &bids, TieRule::LowestIndex).unwrap();
        let high = run_myerson(&market, &bids, TieRule::HighestIndex).unwrap();
        assert_eq!(low.winner, Some(0));
        assert_eq!(high.winner, Some(1));
        // Tie-inclusive payment: both pay the tied bid.
        assert!((low.payment - 2.0).abs() < 1e-8);
        assert!((high.payment - 2.0).abs() < 1e-8);
    }

    #[test]
    fn negative_bid_rejected() {
        assert!(BidProfile::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn always_reject_estimates_zero() {
        let market = exp_market(2);
        let (mean, se) = estimate_revenue(&AuctionRule::AlwaysReject, &market, 1000, 3).unwrap();
        assert_eq!((mean, se), (0.0, 0.0));
    }

    #[test]
    fn posted_price_one_exponential_bidder() {
        let market = exp_market(1);
        let rule = AuctionRule::SequentialPostedPrice { prices: vec![1.0] };
        let (mean, se) = estimate_revenue(&rule, &market, 200_000, 7).unwrap();
        let expected = (-1.0_f64).exp();
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "posted-price revenue {mean} vs {expected} (se {se})"
        );
    }

    #[test]
    fn myerson_single_exponential_monopoly_revenue() {
        let market = exp_market(1);
        let (mean, se) = estimate_revenue(&AuctionRule::myerson(), &market, 200_000, 11).unwrap();
        let expected = (-1.0_f64).exp();
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "monopoly revenue {mean} vs {expected} (se {se})"
        );
    }

    #[test]
    fn revenue_and_virtual_welfare_share_draws() {
        let market = exp_market(2);
        let est = estimate_paired(&AuctionRule::SecondPrice, &market, 100_000, 17).unwrap();
        assert!(
            est.diff_mean.abs() <= 3.0 * est.diff_se,
            "paired equivalence violated: diff {} (se {})",
            est.diff_mean,
            est.diff_se
        );
    }

    #[test]
    fn first_price_breaks_equivalence() {
        // Negative control: a pays-bid rule is not a threshold payment rule,
        // so revenue should exceed virtual welfare detectably.
        let market = exp_market(2);
        let est = estimate_paired(&AuctionRule::FirstPrice, &market, 100_000, 19).unwrap();
        assert!(
            est.diff_mean > 3.0 * est.diff_se,
            "first-price mutation not detected: diff {} (se {})",
            est.diff_mean,
            est.diff_se
        );
    }

    #[test]
    fn estimates_are_deterministic() {
        let market = exp_market(3);
        let a = estimate_paired(&AuctionRule::myerson(), &market, 50_000, 23).unwrap();
        crate::parallel::set_threads(4);
        let b = estimate_paired(&AuctionRule::myerson(), &market, 50_000, 23).unwrap();
        crate::parallel::set_threads(0);
        assert_eq!(a.revenue_mean.to_bits(), b.revenue_mean.to_bits());
        assert_eq!(
            a.virtual_welfare_se.to_bits(),
            b.virtual_welfare_se.to_bits()
        );
    }

    #[test]
    fn revenue_curve_endpoints() {
        let curve = RevenueCurve::new(Arc::new(StronglyRegularBase::exponential()));
        assert_eq!(curve.evaluate(1.0).unwrap(), 0.0);
        assert_eq!(curve.evaluate(0.0).unwrap(), 0.0);
        // α = 0 has q·v(q) = 1 − q, whose q → 0 limit is 1.
        let curve = RevenueCurve::new(Arc::new(StronglyRegularBase::new(0.0).unwrap()));
        assert!((curve.evaluate(0.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((curve.evaluate(0.25).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn revenue_curve_concavity_spot_check() {
        use crate::rng::{trial_rng, uniform_in};
        for &alpha in &[0.0, 0.5, 1.0] {
            let curve = RevenueCurve::new(Arc::new(StronglyRegularBase::new(alpha).unwrap()));
            let mut rng = trial_rng(29, alpha.to_bits(), 0);
            for _ in 0..200 {
                let mut qs = [
                    uniform_in(&mut rng, 1e-6, 1.0),
                    uniform_in(&mut rng, 1e-6, 1.0),
                    uniform_in(&mut rng, 1e-6, 1.0),
                ];
                qs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let [a, b, c] = qs;
                if c - a < 1e-9 {
                    continue;
                }
                let t = (b - a) / (c - a);
                let chord = (1.0 - t) * curve.evaluate(a).unwrap() + t * curve.evaluate(c).unwrap();
                assert!(
                    curve.evaluate(b).unwrap() >= chord - 1e-9,
                    "alpha={alpha}: R not concave at ({a}, {b}, {c})"
                );
            }
        }
    }
}
