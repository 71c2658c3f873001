//! The m-sample empirical Myerson auction.
//!
//! Construction, per bidder: sort the m samples descending, give the j-th
//! largest the empirical quantile (2j−1)/(2m), discard the ⌊ξ̂m⌋ − 1 largest,
//! plot the revenue points (t_j, t_j·v_j) plus anchors at (0,0) and (1,0),
//! and iron. The slope of the ironed curve over the quantile interval of the
//! two samples sandwiching a bid is its empirical ironed virtual value; at a
//! retained sample the larger adjacent slope applies, bids above the largest
//! retained sample take the bid itself.

use rand::RngCore;

use crate::distributions::{ProductDistribution, ValuationDistribution};
use crate::myerson::{
    iron, select_winner, threshold_bid, AuctionOutcome, BidProfile, IronedCurve, TieRule,
};
use crate::parallel::map_chunks;
use crate::rng::trial_rng;
use crate::{Error, Result};

const STREAM_SANDWICH: u64 = 2;

/// k × m matrix of i.i.d. valuation samples, one row per bidder, each row
/// stored sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    k: usize,
    m: usize,
    rows: Vec<Vec<f64>>,
}

impl SampleMatrix {
    pub fn new(mut rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::malformed(
                "sample matrix needs at least one bidder row",
            ));
        }
        let m = rows[0].len();
        if m == 0 {
            return Err(Error::malformed("sample rows must not be empty"));
        }
        for row in &mut rows {
            if row.len() != m {
                return Err(Error::malformed(format!(
                    "ragged sample matrix: expected {m} samples per row, got {}",
                    row.len()
                )));
            }
            if let Some(v) = row
                .iter()
                .find(|v| v.is_nan() || **v < 0.0 || !v.is_finite())
            {
                return Err(Error::malformed(format!("invalid sample value {v}")));
            }
            row.sort_by(|a, b| b.partial_cmp(a).unwrap());
        }
        Ok(Self {
            k: rows.len(),
            m,
            rows,
        })
    }

    /// Draws a fresh k × m matrix from a product distribution.
    pub fn draw(dists: &ProductDistribution, m: usize, rng: &mut dyn RngCore) -> Result<Self> {
        let rows = dists
            .components()
            .iter()
            .map(|d| (0..m).map(|_| d.sample(rng)).collect())
            .collect();
        Self::new(rows)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Row i, sorted descending.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Plain-text form: header `k=<int> m=<int>`, then one whitespace-
    /// separated row per bidder.
    pub fn to_text(&self) -> String {
        let mut out = format!("k={} m={}\n", self.k, self.m);
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::parse("empty sample file"))?;
        let mut k = None;
        let mut m = None;
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("k", v)) => k = v.parse::<usize>().ok(),
                Some(("m", v)) => m = v.parse::<usize>().ok(),
                _ => return Err(Error::parse(format!("unexpected header token `{tok}`"))),
            }
        }
        let (k, m) = match (k, m) {
            (Some(k), Some(m)) => (k, m),
            _ => return Err(Error::parse("header must be `k=<int> m=<int>`")),
        };
        let mut rows = Vec::with_capacity(k);
        for _ in 0..k {
            let line = lines
                .next()
                .ok_or_else(|| Error::parse(format!("expected {k} sample rows")))?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::parse(format!("bad value `{t}`")))
                })
                .collect::<Result<_>>()?;
            if row.len() != m {
                return Err(Error::parse(format!(
                    "row has {} values, header says m={m}",
                    row.len()
                )));
            }
            rows.push(row);
        }
        Self::new(rows)
    }
}

/// Empirical revenue points for one bidder after discarding the top samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCurve {
    xi_hat: f64,
    m: usize,
    /// (empirical quantile t_j, revenue point t_j · v_j) for retained j.
    retained: Vec<(f64, f64)>,
    threshold_value: f64,
    first_retained_quantile: f64,
}

impl EmpiricalCurve {
    /// Builds the curve from one sorted-descending sample row.
    ///
    /// ⌊ξ̂m⌋ − 1 samples are discarded; ⌊ξ̂m⌋ must be in [1, m].
    pub fn build(samples_desc: &[f64], xi_hat: f64) -> Result<Self> {
        let m = samples_desc.len();
        if m < 2 {
            return Err(Error::domain(format!("need m >= 2 samples, got {m}")));
        }
        let a = (xi_hat * m as f64).floor();
        if a.is_nan() || a < 1.0 || a > m as f64 {
            return Err(Error::domain(format!(
                "floor(xi_hat * m) = {a} outside [1, {m}]; cannot define the threshold sample"
            )));
        }
        let a = a as usize;
        let two_m = 2.0 * m as f64;
        let retained: Vec<(f64, f64)> = (a..=m)
            .map(|j| {
                let t = (2 * j - 1) as f64 / two_m;
                (t, t * samples_desc[j - 1])
            })
            .collect();
        Ok(Self {
            xi_hat,
            m,
            retained,
            threshold_value: samples_desc[a - 1],
            first_retained_quantile: (2 * a - 1) as f64 / two_m,
        })
    }

    pub fn xi_hat(&self) -> f64 {
        self.xi_hat
    }

    pub fn retained(&self) -> &[(f64, f64)] {
        &self.retained
    }

    /// Largest retained sample v_{⌊ξ̂m⌋}.
    pub fn threshold_value(&self) -> f64 {
        self.threshold_value
    }

    /// ξ̄ = (2⌊ξ̂m⌋ − 1)/(2m).
    pub fn first_retained_quantile(&self) -> f64 {
        self.first_retained_quantile
    }

    /// Retained points with the (0,0) and (1,0) anchors, ready for ironing.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.retained.len() + 2);
        pts.push((0.0, 0.0));
        pts.extend_from_slice(&self.retained);
        pts.push((1.0, 0.0));
        pts
    }
}

/// Ironed empirical revenue curve of one bidder, reduced to what evaluation
/// needs: hull, the bid values at interior hull vertices (where the ironed
/// virtual value steps), the threshold sample, and the reserve.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnedBidder {
    hull: IronedCurve,
    /// Bid value at each interior hull vertex, strictly decreasing.
    jump_values: Vec<f64>,
    threshold_value: f64,
    reserve: f64,
}

impl LearnedBidder {
    fn from_hull(hull: IronedCurve, threshold_value: f64) -> Self {
        let n = hull.breakpoints().len();
        // Interior vertices exclude the (0, ·) and (1, 0) anchors; the bid
        // value at a vertex is R/q, recovered identically here and in the
        // file reader so serialization round-trips bit-for-bit.
        let jump_values: Vec<f64> = (1..n - 1)
            .map(|i| hull.values()[i] / hull.breakpoints()[i])
            .collect();
        let slopes = hull.slopes();
        let nonneg = slopes.partition_point(|s| *s >= 0.0);
        let reserve = if nonneg == 0 {
            // No segment with nonnegative slope: only the above-threshold
            // region (where the virtual value is the bid itself) can win.
            threshold_value
        } else if nonneg == slopes.len() {
            0.0
        } else {
            jump_values[nonneg - 1]
        };
        Self {
            hull,
            jump_values,
            threshold_value,
            reserve,
        }
    }

    pub fn hull(&self) -> &IronedCurve {
        &self.hull
    }

    pub fn threshold_value(&self) -> f64 {
        self.threshold_value
    }

    /// Lowest winning bid when alone: the smallest value whose empirical
    /// ironed virtual value is nonnegative.
    pub fn reserve(&self) -> f64 {
        self.reserve
    }

    /// Empirical ironed virtual value of a bid.
    pub fn virtual_value(&self, v: f64) -> f64 {
        if v > self.threshold_value {
            return v;
        }
        if v == self.threshold_value {
            return self.threshold_value;
        }
        // Count of vertex values strictly above v selects the hull segment
        // whose value interval contains v; at a vertex value the count lands
        // on the higher-value segment, which is the larger-slope rule.
        let c = self.jump_values.partition_point(|w| *w > v);
        self.hull.slopes()[c]
    }
}

/// Learned auction: one ironed empirical revenue curve per bidder.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMyersonAuction {
    bidders: Vec<LearnedBidder>,
}

/// Builds the empirical Myerson auction from a sample matrix.
/// Pure: identical inputs produce identical auctions.
pub fn learn(samples: &SampleMatrix, xi_hat: f64) -> Result<EmpiricalMyersonAuction> {
    let bidders = (0..samples.k())
        .map(|i| {
            let curve = EmpiricalCurve::build(samples.row(i), xi_hat)?;
            let hull = iron(&curve.points())?;
            Ok(LearnedBidder::from_hull(hull, curve.threshold_value()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EmpiricalMyersonAuction { bidders })
}

impl EmpiricalMyersonAuction {
    pub fn k(&self) -> usize {
        self.bidders.len()
    }

    pub fn bidder(&self, i: usize) -> &LearnedBidder {
        &self.bidders[i]
    }

    /// Empirical ironed virtual value of bidder i at bid v.
    pub fn virtual_value(&self, bidder: usize, v: f64) -> f64 {
        self.bidders[bidder].virtual_value(v)
    }

    /// Runs the learned auction: highest nonnegative empirical virtual value
    /// wins (ties to the lowest index) and pays the lowest bid that still
    /// (ties included) wins.
    pub fn run(&self, bids: &BidProfile) -> Result<AuctionOutcome> {
        if bids.len() != self.k() {
            return Err(Error::malformed(format!(
                "{} bids for {} bidders",
                bids.len(),
                self.k()
            )));
        }
        let b = bids.bids();
        let virtual_bids: Vec<f64> = (0..self.k()).map(|i| self.virtual_value(i, b[i])).collect();
        let winner = select_winner(
            self.k(),
            |i| virtual_bids[i] >= 0.0,
            |i| virtual_bids[i],
            TieRule::LowestIndex,
        );
        let Some(w) = winner else {
            return Ok(AuctionOutcome {
                winner: None,
                payment: 0.0,
                virtual_bids,
            });
        };
        let target = virtual_bids
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != w)
            .map(|(_, &phi)| phi)
            .fold(0.0_f64, f64::max);
        let payment = threshold_bid(|bid| Ok(self.virtual_value(w, bid)), target, b[w])?;
        Ok(AuctionOutcome {
            winner: Some(w),
            payment,
            virtual_bids,
        })
    }

    /// Plain-text record, one bidder per line:
    /// `bidder <i> hull q:v,... slopes s,... threshold <t> reserve <r>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, bidder) in self.bidders.iter().enumerate() {
            let hull: Vec<String> = bidder
                .hull
                .breakpoints()
                .iter()
                .zip(bidder.hull.values())
                .map(|(q, r)| format!("{}:{}", fmt17(*q), fmt17(*r)))
                .collect();
            let slopes: Vec<String> = bidder.hull.slopes().iter().map(|s| fmt17(*s)).collect();
            out.push_str(&format!(
                "bidder {} hull {} slopes {} threshold {} reserve {}\n",
                i,
                hull.join(","),
                slopes.join(","),
                fmt17(bidder.threshold_value),
                fmt17(bidder.reserve),
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut bidders = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 10
                || toks[0] != "bidder"
                || toks[2] != "hull"
                || toks[4] != "slopes"
                || toks[6] != "threshold"
                || toks[8] != "reserve"
            {
                return Err(Error::parse(format!(
                    "line {}: expected `bidder <i> hull ... slopes ... threshold <t> reserve <r>`",
                    line_no + 1
                )));
            }
            let index: usize = toks[1]
                .parse()
                .map_err(|_| Error::parse(format!("bad bidder index `{}`", toks[1])))?;
            if index != bidders.len() {
                return Err(Error::parse(format!(
                    "bidder lines out of order: expected {}, got {index}",
                    bidders.len()
                )));
            }
            let mut breakpoints = Vec::new();
            let mut values = Vec::new();
            for pair in toks[3].split(',') {
                let (q, r) = pair
                    .split_once(':')
                    .ok_or_else(|| Error::parse(format!("bad hull pair `{pair}`")))?;
                breakpoints.push(parse_f64(q)?);
                values.push(parse_f64(r)?);
            }
            let slopes: Vec<f64> = toks[5].split(',').map(parse_f64).collect::<Result<_>>()?;
            let threshold = parse_f64(toks[7])?;
            let reserve_recorded = parse_f64(toks[9])?;
            let hull = IronedCurve::from_parts(breakpoints, values, slopes)?;
            let bidder = LearnedBidder::from_hull(hull, threshold);
            if bidder.reserve != reserve_recorded {
                return Err(Error::parse(format!(
                    "recorded reserve {} disagrees with hull-derived reserve {}",
                    reserve_recorded, bidder.reserve
                )));
            }
            bidders.push(bidder);
        }
        if bidders.is_empty() {
            return Err(Error::parse("no bidder lines in auction file"));
        }
        Ok(EmpiricalMyersonAuction { bidders })
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::parse(format!("`{s}` is not a float")))
}

/// 17-significant-digit float formatting: round-trips every f64 exactly.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Empirically checks the order-statistic quantile sandwich.
///
/// Per trial, draws m samples, and for every retained order statistic
/// j ≥ ⌊ξ̂m⌋ checks that the true quantile of v_j lies within
/// [t_j/(1+γ)², t_j·(1+γ)²], t_j = (2j−1)/(2m). Returns the fraction of
/// trials with at least one violation.
pub fn verify_quantile_sandwich(
    dist: &dyn ValuationDistribution,
    m: usize,
    gamma: f64,
    xi_hat: f64,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::domain(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    if gamma * xi_hat * (m as f64) < 1.0 {
        return Err(Error::domain(format!(
            "hypothesis gamma * xi_hat * m >= 1 violated: {} * {} * {} = {}",
            gamma,
            xi_hat,
            m,
            gamma * xi_hat * m as f64
        )));
    }
    let a = (xi_hat * m as f64).floor() as usize;
    if a < 1 || a > m {
        return Err(Error::domain(format!(
            "floor(xi_hat * m) = {a} outside [1, {m}]"
        )));
    }
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }

    let factor = (1.0 + gamma) * (1.0 + gamma);
    let chunks: Vec<u64> = map_chunks(trials as usize, |range| {
        let mut failures = 0u64;
        let mut values = vec![0.0f64; m];
        for t in range {
            let mut rng = trial_rng(seed, STREAM_SANDWICH, t as u64);
            for v in values.iter_mut() {
                *v = dist.sample(&mut rng);
            }
            values.sort_by(|x, y| y.partial_cmp(x).unwrap());
            let violated = (a..=m).any(|j| {
                let t_j = (2 * j - 1) as f64 / (2.0 * m as f64);
                let q = dist.value_to_quantile(values[j - 1]);
                q < t_j / factor || q > t_j * factor
            });
            if violated {
                failures += 1;
            }
        }
        failures
    });
    Ok(chunks.iter().sum::<u64>() as f64 / trials as f64)
}
