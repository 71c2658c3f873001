//! Reproducible experiment harnesses.
//!
//! `convergence_sweep` measures how fast the empirical Myerson auction
//! approaches the optimum as the sample count grows, using common random
//! numbers: each cell evaluates the learned auction and the known-distribution
//! Myerson auction on the same fresh valuation draws and reports their ratio.
//! `lemma_suite` is the verification battery behind the `verify` subcommand.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::adversarial::{
    adversarial_myerson_revenue, bayes_guess_error_with, event_e_frequency, r_star, GuessRule,
    DEFAULT_REJECTION_BUDGET,
};
use crate::distributions::{
    parse_spec_list, ProductDistribution, StronglyRegularBase, ValuationDistribution,
};
use crate::empirical::{fmt17, learn, verify_quantile_sandwich, SampleMatrix};
use crate::myerson::{estimate_paired, AuctionRule, BidProfile, PreparedAuction};
use crate::parallel::map_chunks_with;
use crate::rng::{derive_seed, fnv1a64, trial_rng};
use crate::{Error, Result};

const STREAM_CELL_SAMPLES: u64 = 10;
const STREAM_CELL_EVAL: u64 = 11;

/// Discard-fraction policy for learning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum XiHatPolicy {
    /// ξ̂ = max(ε/k, 2/m): the proof's ε/k scale with a floor that always
    /// discards at least one sample.
    Scaled,
    Fixed(f64),
}

impl XiHatPolicy {
    pub fn resolve(&self, epsilon: f64, k: usize, m: usize) -> f64 {
        match self {
            XiHatPolicy::Scaled => (epsilon / k as f64).max(2.0 / m as f64),
            XiHatPolicy::Fixed(x) => *x,
        }
    }
}

/// Everything a sweep needs; echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: String,
    /// Distribution spec strings, one per bidder.
    pub dists: Vec<String>,
    pub m_grid: Vec<usize>,
    /// Evaluation trials per cell.
    pub trials: u64,
    pub replications: u32,
    /// Experiment-level ε feeding the scaled ξ̂ policy.
    pub epsilon: f64,
    pub xi_hat: XiHatPolicy,
    pub seed: u64,
    /// When false (the default), the CSV runtime column carries 0 so that
    /// re-runs are byte-identical; wall times still go to the JSON summary.
    pub record_runtime: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dists.is_empty() {
            return Err(Error::malformed(
                "config needs at least one distribution spec",
            ));
        }
        if self.m_grid.is_empty() {
            return Err(Error::malformed("m_grid must not be empty"));
        }
        if self.m_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::malformed("m_grid must be strictly ascending"));
        }
        if self.trials == 0 {
            return Err(Error::malformed("trials must be >= 1"));
        }
        if self.replications == 0 {
            return Err(Error::malformed("replications must be >= 1"));
        }
        for spec in &self.dists {
            crate::distributions::parse_spec(spec)?;
        }
        Ok(())
    }

    /// Canonical text form; hashes identically across runs with equal
    /// settings.
    pub fn canonical_string(&self) -> String {
        let xi = match self.xi_hat {
            XiHatPolicy::Scaled => "scaled".to_string(),
            XiHatPolicy::Fixed(x) => fmt17(x),
        };
        format!(
            "dists={}\nepsilon={}\nm_grid={}\nrecord_runtime={}\nreplications={}\nscenario={}\nseed={}\ntrials={}\nxi_hat={}\n",
            self.dists.join(";"),
            fmt17(self.epsilon),
            self.m_grid.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","),
            self.record_runtime,
            self.replications,
            self.scenario,
            self.seed,
            self.trials,
            xi,
        )
    }

    pub fn config_hash(&self) -> String {
        format!("{:016x}", fnv1a64(self.canonical_string().as_bytes()))
    }
}

/// One (m, replication) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub m: usize,
    pub replication: u32,
    /// Empirical-auction revenue over Myerson revenue on shared draws.
    pub ratio: f64,
    /// Delta-method standard error of the ratio within the cell.
    pub stderr: f64,
    /// The cell's derived seed.
    pub seed: u64,
    pub runtime_ms: u64,
}

/// Per-m aggregate over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MAggregate {
    pub m: usize,
    pub mean_ratio: f64,
    /// Standard error of the mean ratio across replications.
    pub std_error: f64,
    pub replications: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub code_version: String,
    pub cells: Vec<CellRecord>,
    pub per_m: Vec<MAggregate>,
    /// Wall-clock total; lives only in the JSON summary.
    pub total_runtime_ms: u64,
}

impl ExperimentReport {
    /// The pinned CSV: `m,replication,ratio,stderr,seed,runtime_ms`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,replication,ratio,stderr,seed,runtime_ms\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.m,
                c.replication,
                fmt17(c.ratio),
                fmt17(c.stderr),
                c.seed,
                c.runtime_ms
            ));
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the sample-complexity sweep: for each m in the grid and each
/// replication, draw a sample matrix, learn the empirical auction, and
/// evaluate its revenue against the Myerson optimum on shared fresh draws.
pub fn convergence_sweep(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let dists = parse_spec_list(&config.dists.join(","))?;
    let market = ProductDistribution::new(dists)?;
    let k = market.k();

    struct Cell {
        m: usize,
        replication: u32,
    }
    let cells: Vec<Cell> = config
        .m_grid
        .iter()
        .flat_map(|&m| (0..config.replications).map(move |r| Cell { m, replication: r }))
        .collect();

    let records: Vec<Result<CellRecord>> = map_chunks_with(cells.len(), 1, |range| {
        let idx = range.start;
        let cell = &cells[idx];
        let cell_started = Instant::now();
        let cell_seed = derive_seed(config.seed, STREAM_CELL_SAMPLES, idx as u64);

        let mut sample_rng = trial_rng(config.seed, STREAM_CELL_SAMPLES, idx as u64);
        let samples = SampleMatrix::draw(&market, cell.m, &mut sample_rng)?;
        let xi_hat = config.xi_hat.resolve(config.epsilon, k, cell.m);
        let auction = learn(&samples, xi_hat)?;
        let myerson = PreparedAuction::new(AuctionRule::myerson(), &market)?;

        // Common random numbers: both auctions see the same profiles.
        let mut sum_e = 0.0;
        let mut sum_m = 0.0;
        let mut sum_ee = 0.0;
        let mut sum_mm = 0.0;
        let mut sum_em = 0.0;
        for t in 0..config.trials {
            let mut rng = trial_rng(cell_seed, STREAM_CELL_EVAL, t);
            let profile = BidProfile::new(market.sample_profile(&mut rng))?;
            let e = auction.run(&profile)?.payment;
            let m_pay = myerson.run(&profile)?.payment;
            sum_e += e;
            sum_m += m_pay;
            sum_ee += e * e;
            sum_mm += m_pay * m_pay;
            sum_em += e * m_pay;
        }
        let n = config.trials as f64;
        let (mean_e, mean_m) = (sum_e / n, sum_m / n);
        let ratio = mean_e / mean_m;
        // Delta method for the ratio of paired means.
        let var_e = (sum_ee - n * mean_e * mean_e) / (n - 1.0);
        let var_m = (sum_mm - n * mean_m * mean_m) / (n - 1.0);
        let cov = (sum_em - n * mean_e * mean_m) / (n - 1.0);
        let var_ratio = (var_e - 2.0 * ratio * cov + ratio * ratio * var_m) / (n * mean_m * mean_m);
        let stderr = var_ratio.max(0.0).sqrt();

        Ok(CellRecord {
            m: cell.m,
            replication: cell.replication,
            ratio,
            stderr,
            seed: cell_seed,
            runtime_ms: if config.record_runtime {
                cell_started.elapsed().as_millis() as u64
            } else {
                0
            },
        })
    });
    let cells: Vec<CellRecord> = records.into_iter().collect::<Result<_>>()?;

    let per_m = config
        .m_grid
        .iter()
        .map(|&m| {
            let ratios: Vec<f64> = cells.iter().filter(|c| c.m == m).map(|c| c.ratio).collect();
            let n = ratios.len() as f64;
            let mean = ratios.iter().sum::<f64>() / n;
            let var = if ratios.len() < 2 {
                0.0
            } else {
                ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0)
            };
            MAggregate {
                m,
                mean_ratio: mean,
                std_error: (var / n).sqrt(),
                replications: ratios.len() as u32,
            }
        })
        .collect();

    Ok(ExperimentReport {
        config: config.clone(),
        config_hash: config.config_hash(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        cells,
        per_m,
        total_runtime_ms: started.elapsed().as_millis() as u64,
    })
}

/// One named verification check.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub requirement: String,
    pub trials: u64,
    pub detail: String,
}

impl LemmaCheck {
    pub fn render(&self) -> String {
        format!(
            "{} {:<34} measured={:<12.6} requires {} ({} trials) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.requirement,
            self.trials,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaSuiteReport {
    pub checks: Vec<LemmaCheck>,
}

impl LemmaSuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// The verification battery: monopoly-quantile identities, revenue =
/// virtual-welfare equivalences, the single-buyer closed form, rule
/// dominance, the eager-reserve ratio, the quantile sandwich, event-E
/// frequency, the 1/3 guessing bound, and R* dominance. Failures are
/// reported, not thrown.
pub fn lemma_suite(seed: u64) -> Result<LemmaSuiteReport> {
    let mut checks = Vec::new();
    let exp: Arc<dyn ValuationDistribution> = Arc::new(StronglyRegularBase::exponential());

    // Monopoly quantile identities.
    {
        let mut worst = 0.0_f64;
        for &alpha in &[0.1, 0.25, 0.5, 0.75, 0.9] {
            let d = StronglyRegularBase::new(alpha)?;
            let expected = alpha.powf(1.0 / (1.0 - alpha));
            worst = worst.max((d.monopoly_quantile()? - expected).abs());
        }
        worst = worst.max(
            (StronglyRegularBase::exponential().monopoly_quantile()? - (-1.0_f64).exp()).abs(),
        );
        checks.push(LemmaCheck {
            name: "monopoly_quantile_identities".into(),
            passed: worst <= 1e-9,
            measured: worst,
            requirement: "max |q - alpha^(1/(1-alpha))| <= 1e-9".into(),
            trials: 0,
            detail: String::new(),
        });
    }

    // Revenue = virtual welfare for truthful rules, paired.
    {
        let scenarios: Vec<(&str, ProductDistribution, AuctionRule)> = vec![
            (
                "1 exponential / myerson",
                ProductDistribution::iid(Arc::clone(&exp), 1)?,
                AuctionRule::myerson(),
            ),
            (
                "2 exponential / myerson",
                ProductDistribution::iid(Arc::clone(&exp), 2)?,
                AuctionRule::myerson(),
            ),
            (
                "2 exponential / second price",
                ProductDistribution::iid(Arc::clone(&exp), 2)?,
                AuctionRule::SecondPrice,
            ),
            (
                "2 exponential / second price + reserves",
                ProductDistribution::iid(Arc::clone(&exp), 2)?,
                AuctionRule::SecondPriceMonopolyReserves,
            ),
            (
                "2 exponential / posted price",
                ProductDistribution::iid(Arc::clone(&exp), 2)?,
                AuctionRule::SequentialPostedPrice {
                    prices: vec![1.0, 1.0],
                },
            ),
            (
                "3 mixed / myerson",
                ProductDistribution::new(vec![
                    Arc::new(StronglyRegularBase::new(0.25)?),
                    Arc::new(StronglyRegularBase::new(0.5)?),
                    Arc::clone(&exp),
                ])?,
                AuctionRule::myerson(),
            ),
        ];
        let trials = 200_000;
        let mut worst_z = 0.0_f64;
        let mut detail = String::new();
        for (name, market, rule) in &scenarios {
            let est = estimate_paired(rule, market, trials, derive_seed(seed, 20, 0))?;
            let z = if est.diff_se > 0.0 {
                est.diff_mean.abs() / est.diff_se
            } else {
                0.0
            };
            if z > worst_z {
                worst_z = z;
                detail = format!("worst: {name}");
            }
        }
        checks.push(LemmaCheck {
            name: "revenue_equals_virtual_welfare".into(),
            passed: worst_z <= 3.0,
            measured: worst_z,
            requirement: "|diff| <= 3 paired std errors".into(),
            trials,
            detail,
        });
    }

    // Single-buyer monopoly revenue e^{-1}.
    {
        let market = ProductDistribution::iid(Arc::clone(&exp), 1)?;
        let trials = 200_000;
        let est = estimate_paired(
            &AuctionRule::myerson(),
            &market,
            trials,
            derive_seed(seed, 21, 0),
        )?;
        let expected = (-1.0_f64).exp();
        let z = (est.revenue_mean - expected).abs() / est.revenue_se;
        checks.push(LemmaCheck {
            name: "single_buyer_monopoly_revenue".into(),
            passed: z <= 3.0,
            measured: est.revenue_mean,
            requirement: format!("= {expected:.6} within 3 std errors"),
            trials,
            detail: format!("z = {z:.2}"),
        });
    }

    // Myerson dominates the simple truthful rules.
    {
        let market = ProductDistribution::new(vec![
            Arc::new(StronglyRegularBase::new(0.5)?),
            Arc::clone(&exp),
            Arc::new(StronglyRegularBase::new(0.25)?),
        ])?;
        let trials = 200_000;
        let my = estimate_paired(
            &AuctionRule::myerson(),
            &market,
            trials,
            derive_seed(seed, 22, 0),
        )?;
        let prices: Vec<f64> = market
            .components()
            .iter()
            .map(|d| d.quantile_to_value(d.monopoly_quantile()?))
            .collect::<Result<_>>()?;
        let rules = vec![
            ("second_price", AuctionRule::SecondPrice),
            (
                "second_price_reserves",
                AuctionRule::SecondPriceMonopolyReserves,
            ),
            (
                "posted_price",
                AuctionRule::SequentialPostedPrice { prices },
            ),
        ];
        let mut worst_margin = f64::INFINITY;
        let mut detail = String::new();
        for (name, rule) in rules {
            let other = estimate_paired(&rule, &market, trials, derive_seed(seed, 22, 0))?;
            let joint_se = (my.revenue_se.powi(2) + other.revenue_se.powi(2)).sqrt();
            let margin = my.revenue_mean - other.revenue_mean + 3.0 * joint_se;
            if margin < worst_margin {
                worst_margin = margin;
                detail = format!("tightest: {name}");
            }
        }
        checks.push(LemmaCheck {
            name: "myerson_dominates_simple_rules".into(),
            passed: worst_margin >= 0.0,
            measured: worst_margin,
            requirement: "myerson >= rule - 3 joint std errors".into(),
            trials,
            detail,
        });
    }

    // Eager monopoly reserves earn at least alpha/(1+alpha) of Myerson.
    {
        let trials = 200_000;
        let mut worst = f64::INFINITY;
        let mut detail = String::new();
        for &alpha in &[0.5, 1.0] {
            let d: Arc<dyn ValuationDistribution> = Arc::new(StronglyRegularBase::new(alpha)?);
            let market = ProductDistribution::iid(d, 3)?;
            let my = estimate_paired(
                &AuctionRule::myerson(),
                &market,
                trials,
                derive_seed(seed, 23, 0),
            )?;
            let sp = estimate_paired(
                &AuctionRule::SecondPriceMonopolyReserves,
                &market,
                trials,
                derive_seed(seed, 23, 0),
            )?;
            let target = alpha / (1.0 + alpha) * my.revenue_mean;
            let joint_se = (sp.revenue_se.powi(2) + my.revenue_se.powi(2)).sqrt();
            let margin = sp.revenue_mean - target + 3.0 * joint_se;
            if margin < worst {
                worst = margin;
                detail = format!("tightest: alpha = {alpha}");
            }
        }
        checks.push(LemmaCheck {
            name: "eager_reserve_ratio".into(),
            passed: worst >= 0.0,
            measured: worst,
            requirement: "SP+reserves >= alpha/(1+alpha) * myerson - 3 se".into(),
            trials,
            detail,
        });
    }

    // Quantile sandwich at hypothesis-satisfying parameters (delta = 0.1).
    {
        let trials = 200;
        let rate = verify_quantile_sandwich(
            &StronglyRegularBase::exponential(),
            1250,
            0.5,
            0.1,
            trials,
            derive_seed(seed, 24, 0),
        )?;
        let bound = 0.1 + 3.0 * (0.1 * 0.9 / trials as f64).sqrt();
        checks.push(LemmaCheck {
            name: "quantile_sandwich".into(),
            passed: rate <= bound,
            measured: rate,
            requirement: format!("violation rate <= {bound:.4}"),
            trials,
            detail: "m=1250 gamma=0.5 xi_hat=0.1".into(),
        });
    }

    // Event-E frequency inside the bound's regime m = k/delta.
    {
        let trials = 1_000_000;
        let (freq, se) = event_e_frequency(2, 0.0, 0.5, 4, trials, derive_seed(seed, 25, 0))?;
        let bound = 0.25 / (32.0 * (3.0_f64).exp());
        checks.push(LemmaCheck {
            name: "event_e_frequency".into(),
            passed: freq >= bound - 3.0 * se,
            measured: freq,
            requirement: format!(">= {bound:.6e} - 3 se"),
            trials,
            detail: format!("k=2 delta=0.5 m=4, se = {se:.2e}"),
        });
    }

    // Bayes guessing error is 1/3 conditioned on E.
    {
        let trials = 100_000;
        let report = bayes_guess_error_with(
            2,
            0.0,
            0.5,
            2,
            trials,
            derive_seed(seed, 26, 0),
            6 * DEFAULT_REJECTION_BUDGET,
            GuessRule::LowerValuation,
        )?;
        checks.push(LemmaCheck {
            name: "bayes_guess_error_one_third".into(),
            passed: (report.error_rate - 1.0 / 3.0).abs() <= 0.01,
            measured: report.error_rate,
            requirement: "in [1/3 - 0.01, 1/3 + 0.01]".into(),
            trials,
            detail: format!("raw draws: {}", report.raw_trials),
        });
    }

    // Optimal revenue never exceeds R*.
    {
        let trials = 100_000;
        let mut worst = f64::NEG_INFINITY;
        let mut detail = String::new();
        for (i, &(k, alpha)) in [(2, 0.0), (2, 0.5), (2, 1.0), (5, 0.0), (5, 0.5), (5, 1.0)]
            .iter()
            .enumerate()
        {
            let (mean, se) = adversarial_myerson_revenue(
                k,
                alpha,
                0.5,
                trials,
                derive_seed(seed, 27, i as u64),
            )?;
            let rs = r_star(k, alpha, 0.5);
            let excess = mean - rs - 3.0 * se;
            if excess > worst {
                worst = excess;
                detail = format!("tightest: k={k} alpha={alpha} rev={mean:.4} R*={rs:.4}");
            }
        }
        checks.push(LemmaCheck {
            name: "r_star_dominance".into(),
            passed: worst <= 0.0,
            measured: worst,
            requirement: "revenue - R* - 3 se <= 0 on all instances".into(),
            trials,
            detail,
        });
    }

    Ok(LemmaSuiteReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            scenario: "test".into(),
            dists: vec!["exponential".into(), "exponential".into()],
            m_grid: vec![50, 100],
            trials: 2_000,
            replications: 3,
            epsilon: 0.1,
            xi_hat: XiHatPolicy::Scaled,
            seed: 71,
            record_runtime: false,
        }
    }

    #[test]
    fn sweep_shapes_and_determinism() {
        let config = small_config();
        let a = convergence_sweep(&config).unwrap();
        assert_eq!(a.cells.len(), 6);
        assert_eq!(a.per_m.len(), 2);
        crate::parallel::set_threads(3);
        let b = convergence_sweep(&config).unwrap();
        crate::parallel::set_threads(0);
        assert_eq!(a.to_csv(), b.to_csv());
        // Every cell carries its derived seed and a plausible ratio.
        for c in &a.cells {
            assert!(c.seed != 0);
            assert!(c.ratio > 0.0 && c.ratio <= 1.0 + 5.0 * c.stderr.max(0.05));
        }
    }

    #[test]
    fn sweep_single_cell() {
        let mut config = small_config();
        config.m_grid = vec![40];
        config.replications = 1;
        config.trials = 1;
        let report = convergence_sweep(&config).unwrap();
        assert_eq!(report.cells.len(), 1);
        assert_eq!(report.per_m.len(), 1);
        assert!(report.to_csv().lines().count() == 2);
    }

    #[test]
    fn config_validation() {
        let mut config = small_config();
        config.m_grid = vec![100, 50];
        assert!(config.validate().is_err());
        config.m_grid = vec![];
        assert!(config.validate().is_err());
        let mut config = small_config();
        config.dists = vec!["bogus".into()];
        assert!(config.validate().is_err());
    }

    #[test]
    fn config_hash_tracks_content() {
        let a = small_config();
        let mut b = small_config();
        assert_eq!(a.config_hash(), b.config_hash());
        b.seed = 72;
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn csv_header_is_pinned() {
        let report = convergence_sweep(&ExperimentConfig {
            m_grid: vec![40],
            replications: 1,
            trials: 10,
            ..small_config()
        })
        .unwrap();
        assert!(report
            .to_csv()
            .starts_with("m,replication,ratio,stderr,seed,runtime_ms\n"));
        let json = report.summary_json();
        assert!(json.contains("config_hash"));
        assert!(json.contains("code_version"));
    }

    #[test]
    fn xi_policy_resolution() {
        assert_eq!(XiHatPolicy::Scaled.resolve(0.1, 2, 10_000), 0.05);
        assert_eq!(XiHatPolicy::Scaled.resolve(0.1, 2, 10), 0.2);
        assert_eq!(XiHatPolicy::Fixed(0.25).resolve(0.1, 2, 10), 0.25);
    }

    #[test]
    fn single_sample_regime_keeps_quarter_of_optimal() {
        // With two i.i.d. regular bidders the learned auction stays above a
        // quarter of the optimum even at the smallest legal sample counts.
        let config = ExperimentConfig {
            scenario: "tiny-m-floor".into(),
            dists: vec!["exponential".into(), "exponential".into()],
            m_grid: vec![2, 4, 10],
            trials: 20_000,
            replications: 5,
            epsilon: 0.1,
            xi_hat: XiHatPolicy::Fixed(0.5),
            seed: 73,
            record_runtime: false,
        };
        let report = convergence_sweep(&config).unwrap();
        for cell in &report.cells {
            assert!(
                cell.ratio > 0.25,
                "m={} replication={} ratio {} fell below the 1/4 floor",
                cell.m,
                cell.replication,
                cell.ratio
            );
        }
    }

    #[test]
    fn single_bidder_sweep_converges() {
        let config = ExperimentConfig {
            scenario: "single-bidder".into(),
            dists: vec!["exponential".into()],
            m_grid: vec![100, 2_000],
            trials: 20_000,
            replications: 5,
            epsilon: 0.1,
            xi_hat: XiHatPolicy::Scaled,
            seed: 75,
            record_runtime: false,
        };
        let report = convergence_sweep(&config).unwrap();
        let last = report.per_m.last().unwrap();
        assert!(
            last.mean_ratio >= 0.9,
            "single-bidder ratio {} at m=2000",
            last.mean_ratio
        );
        assert!(last.mean_ratio <= 1.0 + 5.0 * last.std_error);
    }
}
