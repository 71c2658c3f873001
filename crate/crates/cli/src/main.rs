//! `myerson-lab`: auction-lab command line.
//!
//! Subcommands: `myerson-eval`, `learn`, `empirical-eval`, `sweep`,
//! `lower-bound`, `verify`. Configuration comes from a `key = value` file
//! (`--config`) plus repeatable `--set key=value` overrides; unknown keys are
//! rejected. Exit codes: 0 success, 2 config error, 3 verification failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::RngCore;

use myerson_lab::adversarial::{
    adversarial_myerson_revenue, bayes_guess_error_with, epsilon_bound, event_e_frequency, r_star,
    revenue_gap_experiment, GapStrategy, GuessRule, DEFAULT_REJECTION_BUDGET,
};
use myerson_lab::distributions::{parse_spec_list, ProductDistribution};
use myerson_lab::empirical::{fmt17, learn, EmpiricalMyersonAuction, SampleMatrix};
use myerson_lab::experiments::{convergence_sweep, lemma_suite, ExperimentConfig, XiHatPolicy};
use myerson_lab::myerson::{estimate_paired, AuctionRule, BidProfile};
use myerson_lab::rng::fnv1a64;
use myerson_lab::{parallel, Error};

/// Pinned default seed for `verify`, so the default battery is reproducible.
const VERIFY_DEFAULT_SEED: u64 = 2016;

const USAGE: &str = "\
usage: myerson-lab <subcommand> [--config <path>] [--set key=value]...
                   [--out <dir>] [--seed <u64>] [--threads <n>]

subcommands:
  myerson-eval    estimate revenue/virtual welfare of a rule on known dists
                  keys: dists, trials, rule, prices
  learn           build a learned-auction file from a sample file
                  keys: samples, xi_hat, epsilon
  empirical-eval  evaluate a learned-auction file on fresh draws or a bid file
                  keys: auction, dists, trials, bids
  sweep           sample-complexity convergence sweep (writes CSV + JSON)
                  keys: scenario, dists, m_grid, trials, replications,
                        epsilon, xi_hat, record_runtime
  lower-bound     adversarial battery: event-E frequency, 1/3 guessing
                  bound, R* dominance, revenue gap
                  keys: k, alpha, delta, m, trials, guess_trials, gap_trials,
                        budget, strategy (guess|myerson|empirical), xi_hat
  verify          run the full lemma verification suite (exit 3 on failure)

MYERSON_LAB_THREADS is the fallback for --threads.";

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: msg.into(),
        }
    }

    fn verification(msg: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: msg.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(format!("i/o error: {e}"))
    }
}

struct Invocation {
    subcommand: String,
    config: BTreeMap<String, String>,
    out_dir: PathBuf,
    seed: Option<u64>,
}

fn main() -> ExitCode {
    match run(std::env::args().skip(1).collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("myerson-lab: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(args: Vec<String>) -> Result<(), CliError> {
    let invocation = parse_args(args)?;
    match invocation.subcommand.as_str() {
        "myerson-eval" => cmd_myerson_eval(&invocation),
        "learn" => cmd_learn(&invocation),
        "empirical-eval" => cmd_empirical_eval(&invocation),
        "sweep" => cmd_sweep(&invocation),
        "lower-bound" => cmd_lower_bound(&invocation),
        "verify" => cmd_verify(&invocation),
        other => Err(CliError::config(format!(
            "unknown subcommand `{other}`\n{USAGE}"
        ))),
    }
}

fn parse_args(args: Vec<String>) -> Result<Invocation, CliError> {
    let mut iter = args.into_iter();
    let subcommand = iter
        .next()
        .ok_or_else(|| CliError::config(format!("missing subcommand\n{USAGE}")))?;
    let mut config_path: Option<PathBuf> = None;
    let mut sets: Vec<(String, String)> = Vec::new();
    let mut out_dir = PathBuf::from("runs");
    let mut seed = None;
    let mut threads: Option<usize> = None;

    while let Some(arg) = iter.next() {
        let mut value_for = |flag: &str| {
            iter.next()
                .ok_or_else(|| CliError::config(format!("{flag} needs a value")))
        };
        match arg.as_str() {
            "--config" => config_path = Some(PathBuf::from(value_for("--config")?)),
            "--set" => {
                let kv = value_for("--set")?;
                let (k, v) = kv.split_once('=').ok_or_else(|| {
                    CliError::config(format!("--set expects key=value, got `{kv}`"))
                })?;
                sets.push((k.trim().to_string(), v.trim().to_string()));
            }
            "--out" => out_dir = PathBuf::from(value_for("--out")?),
            "--seed" => {
                let v = value_for("--seed")?;
                seed = Some(v.parse::<u64>().map_err(|_| {
                    CliError::config(format!("--seed expects an unsigned integer, got `{v}`"))
                })?);
            }
            "--threads" => {
                let v = value_for("--threads")?;
                threads = Some(v.parse::<usize>().map_err(|_| {
                    CliError::config(format!("--threads expects an integer, got `{v}`"))
                })?);
            }
            "--help" | "-h" => return Err(CliError::config(USAGE.to_string())),
            other => return Err(CliError::config(format!("unknown flag `{other}`\n{USAGE}"))),
        }
    }

    if threads.is_none() {
        if let Ok(env) = std::env::var("MYERSON_LAB_THREADS") {
            threads = Some(env.parse::<usize>().map_err(|_| {
                CliError::config(format!(
                    "MYERSON_LAB_THREADS must be an integer, got `{env}`"
                ))
            })?);
        }
    }
    if let Some(n) = threads {
        parallel::set_threads(n);
    }

    let mut config = BTreeMap::new();
    if let Some(path) = &config_path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    line_no + 1
                ))
            })?;
            config.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    for (k, v) in sets {
        config.insert(k, v);
    }

    Ok(Invocation {
        subcommand,
        config,
        out_dir,
        seed,
    })
}

/// Rejects config keys outside the subcommand's vocabulary.
fn check_keys(invocation: &Invocation, allowed: &[&str]) -> Result<(), CliError> {
    for key in invocation.config.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(CliError::config(format!(
                "unknown config key `{key}` for subcommand `{}` (allowed: {})",
                invocation.subcommand,
                if allowed.is_empty() {
                    "none".to_string()
                } else {
                    allowed.join(", ")
                }
            )));
        }
    }
    Ok(())
}

fn config_hash(invocation: &Invocation) -> String {
    let mut canon = String::new();
    for (k, v) in &invocation.config {
        let _ = writeln!(canon, "{k}={v}");
    }
    format!("{:016x}", fnv1a64(canon.as_bytes()))
}

/// The run seed: the flag when given, otherwise a fresh random value that is
/// recorded in every output.
fn resolve_seed(invocation: &Invocation) -> u64 {
    invocation.seed.unwrap_or_else(|| rand::rng().next_u64())
}

fn get<'a>(invocation: &'a Invocation, key: &str) -> Option<&'a str> {
    invocation.config.get(key).map(|s| s.as_str())
}

fn require<'a>(invocation: &'a Invocation, key: &str) -> Result<&'a str, CliError> {
    get(invocation, key)
        .ok_or_else(|| CliError::config(format!("missing required config key `{key}`")))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse::<T>()
        .map_err(|_| CliError::config(format!("config key `{key}`: cannot parse `{value}`")))
}

fn opt_num<T: std::str::FromStr>(
    invocation: &Invocation,
    key: &str,
    default: T,
) -> Result<T, CliError> {
    match get(invocation, key) {
        None => Ok(default),
        Some(v) => parse_num(key, v),
    }
}

fn cmd_myerson_eval(invocation: &Invocation) -> Result<(), CliError> {
    check_keys(invocation, &["dists", "trials", "rule", "prices"])?;
    let seed = resolve_seed(invocation);
    let dists = parse_spec_list(require(invocation, "dists")?)?;
    let market = ProductDistribution::new(dists)?;
    let trials: u64 = opt_num(invocation, "trials", 100_000)?;

    let rule = match get(invocation, "rule").unwrap_or("myerson") {
        "myerson" => AuctionRule::myerson(),
        "second_price" => AuctionRule::SecondPrice,
        "second_price_reserves" => AuctionRule::SecondPriceMonopolyReserves,
        "first_price" => AuctionRule::FirstPrice,
        "reject" => AuctionRule::AlwaysReject,
        "posted" => {
            let prices: Vec<f64> = match get(invocation, "prices") {
                Some(spec) => spec
                    .split(',')
                    .map(|p| parse_num("prices", p.trim()))
                    .collect::<Result<_, _>>()?,
                None => market
                    .components()
                    .iter()
                    .map(|d| d.quantile_to_value(d.monopoly_quantile()?))
                    .collect::<Result<_, _>>()?,
            };
            AuctionRule::SequentialPostedPrice { prices }
        }
        other => {
            return Err(CliError::config(format!(
                "unknown rule `{other}` (myerson, second_price, second_price_reserves, posted, first_price, reject)"
            )))
        }
    };

    let est = estimate_paired(&rule, &market, trials, seed)?;
    println!("seed {seed}");
    println!("config_hash {}", config_hash(invocation));
    println!("trials {trials}");
    println!(
        "revenue {} stderr {}",
        fmt17(est.revenue_mean),
        fmt17(est.revenue_se)
    );
    println!(
        "virtual_welfare {} stderr {}",
        fmt17(est.virtual_welfare_mean),
        fmt17(est.virtual_welfare_se)
    );
    Ok(())
}

fn cmd_learn(invocation: &Invocation) -> Result<(), CliError> {
    check_keys(invocation, &["samples", "xi_hat", "epsilon"])?;
    let samples_path = require(invocation, "samples")?;
    let text = std::fs::read_to_string(samples_path)
        .map_err(|e| CliError::config(format!("cannot read samples {samples_path}: {e}")))?;
    let samples = SampleMatrix::from_text(&text)?;

    let xi_hat = match get(invocation, "xi_hat") {
        Some(v) => parse_num::<f64>("xi_hat", v)?,
        None => {
            let epsilon: f64 = opt_num(invocation, "epsilon", 0.1)?;
            XiHatPolicy::Scaled.resolve(epsilon, samples.k(), samples.m())
        }
    };
    let auction = learn(&samples, xi_hat)?;

    std::fs::create_dir_all(&invocation.out_dir)?;
    let out_path = invocation.out_dir.join("auction.txt");
    std::fs::write(&out_path, auction.to_text())?;
    println!("config_hash {}", config_hash(invocation));
    println!(
        "k {} m {} xi_hat {}",
        samples.k(),
        samples.m(),
        fmt17(xi_hat)
    );
    for i in 0..auction.k() {
        println!(
            "bidder {i} threshold {} reserve {}",
            fmt17(auction.bidder(i).threshold_value()),
            fmt17(auction.bidder(i).reserve())
        );
    }
    println!("wrote {}", out_path.display());
    Ok(())
}

fn cmd_empirical_eval(invocation: &Invocation) -> Result<(), CliError> {
    check_keys(invocation, &["auction", "dists", "trials", "bids"])?;
    let auction_path = require(invocation, "auction")?;
    let text = std::fs::read_to_string(auction_path)
        .map_err(|e| CliError::config(format!("cannot read auction {auction_path}: {e}")))?;
    let auction = EmpiricalMyersonAuction::from_text(&text)?;
    println!("config_hash {}", config_hash(invocation));

    if let Some(bids_path) = get(invocation, "bids") {
        let bid_text = std::fs::read_to_string(bids_path)
            .map_err(|e| CliError::config(format!("cannot read bids {bids_path}: {e}")))?;
        let mut total = 0.0;
        let mut count = 0u64;
        for (line_no, line) in bid_text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bids: Vec<f64> = line
                .split_whitespace()
                .map(|t| parse_num("bids", t))
                .collect::<Result<_, _>>()?;
            let outcome = auction.run(&BidProfile::new(bids)?)?;
            match outcome.winner {
                Some(w) => println!(
                    "profile {} winner {} payment {}",
                    line_no + 1,
                    w,
                    fmt17(outcome.payment)
                ),
                None => println!("profile {} winner none payment 0", line_no + 1),
            }
            total += outcome.payment;
            count += 1;
        }
        if count > 0 {
            println!("mean_payment {}", fmt17(total / count as f64));
        }
        return Ok(());
    }

    let dists = parse_spec_list(require(invocation, "dists")?)?;
    let market = ProductDistribution::new(dists)?;
    if market.k() != auction.k() {
        return Err(CliError::config(format!(
            "auction has {} bidders, dists specify {}",
            auction.k(),
            market.k()
        )));
    }
    let trials: u64 = opt_num(invocation, "trials", 100_000)?;
    let seed = resolve_seed(invocation);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for t in 0..trials {
        let mut rng = myerson_lab::rng::trial_rng(seed, 1, t);
        let profile = BidProfile::new(market.sample_profile(&mut rng))?;
        let payment = auction.run(&profile)?.payment;
        sum += payment;
        sum_sq += payment * payment;
    }
    let n = trials as f64;
    let mean = sum / n;
    let se = if trials > 1 {
        (((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0) / n).sqrt()
    } else {
        0.0
    };
    println!("seed {seed}");
    println!("trials {trials}");
    println!("revenue {} stderr {}", fmt17(mean), fmt17(se));
    Ok(())
}

fn cmd_sweep(invocation: &Invocation) -> Result<(), CliError> {
    check_keys(
        invocation,
        &[
            "scenario",
            "dists",
            "m_grid",
            "trials",
            "replications",
            "epsilon",
            "xi_hat",
            "record_runtime",
        ],
    )?;
    let seed = resolve_seed(invocation);
    let dists: Vec<String> =
        myerson_lab::distributions::split_top_level(require(invocation, "dists")?, ',')
            .into_iter()
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
    let m_grid: Vec<usize> = require(invocation, "m_grid")?
        .split(',')
        .map(|t| parse_num("m_grid", t.trim()))
        .collect::<Result<_, _>>()?;
    let xi_hat = match get(invocation, "xi_hat") {
        None | Some("scaled") => XiHatPolicy::Scaled,
        Some(v) => XiHatPolicy::Fixed(parse_num("xi_hat", v)?),
    };
    let config = ExperimentConfig {
        scenario: get(invocation, "scenario").unwrap_or("sweep").to_string(),
        dists,
        m_grid,
        trials: opt_num(invocation, "trials", 100_000)?,
        replications: opt_num(invocation, "replications", 20)?,
        epsilon: opt_num(invocation, "epsilon", 0.1)?,
        xi_hat,
        seed,
        record_runtime: match get(invocation, "record_runtime") {
            None => false,
            Some(v) => parse_num("record_runtime", v)?,
        },
    };
    config.validate()?;

    let report = convergence_sweep(&config)?;
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let run_dir = invocation
        .out_dir
        .join(format!("{}-{}-{:016x}", config.scenario, stamp, seed));
    std::fs::create_dir_all(&run_dir)?;
    std::fs::write(run_dir.join("results.csv"), report.to_csv())?;
    std::fs::write(run_dir.join("summary.json"), report.summary_json())?;

    println!("seed {seed}");
    println!("config_hash {}", report.config_hash);
    for agg in &report.per_m {
        println!(
            "m {:>8} mean_ratio {:.6} stderr {:.6} ({} replications)",
            agg.m, agg.mean_ratio, agg.std_error, agg.replications
        );
    }
    println!("wrote {}", run_dir.join("results.csv").display());
    println!("wrote {}", run_dir.join("summary.json").display());
    Ok(())
}

fn cmd_lower_bound(invocation: &Invocation) -> Result<(), CliError> {
    check_keys(
        invocation,
        &[
            "k",
            "alpha",
            "delta",
            "m",
            "trials",
            "guess_trials",
            "gap_trials",
            "budget",
            "strategy",
            "xi_hat",
        ],
    )?;
    let seed = resolve_seed(invocation);
    let k: usize = opt_num(invocation, "k", 2)?;
    let alpha: f64 = opt_num(invocation, "alpha", 0.0)?;
    let delta: f64 = opt_num(invocation, "delta", 0.5)?;
    let m: usize = opt_num(invocation, "m", 4)?;
    let trials: u64 = opt_num(invocation, "trials", 1_000_000)?;
    let guess_trials: u64 = opt_num(invocation, "guess_trials", 100_000)?;
    let gap_trials: u64 = opt_num(invocation, "gap_trials", 1_000_000)?;
    let budget: u64 = opt_num(invocation, "budget", 6 * DEFAULT_REJECTION_BUDGET)?;

    println!("seed {seed}");
    println!("config_hash {}", config_hash(invocation));
    println!("k {k} alpha {alpha} delta {delta} m {m}");
    let eps = epsilon_bound(alpha, delta, k)?;
    let rs = r_star(k, alpha, delta);
    println!("epsilon_bound {}", fmt17(eps));
    println!("r_star {}", fmt17(rs));

    let mut failures = 0;

    let e_bound = delta * delta / (32.0 * (3.0_f64).exp());
    let (freq, se) = event_e_frequency(k, alpha, delta, m, trials, seed)?;
    let pass = freq >= e_bound - 3.0 * se;
    println!(
        "{} event_e_frequency {} (se {}) vs bound {} [delta^2/(32e^3), valid for m <= k/delta]",
        if pass { "PASS" } else { "FAIL" },
        fmt17(freq),
        fmt17(se),
        fmt17(e_bound)
    );
    failures += u32::from(!pass);

    // The conditional error law is m-invariant, but P(E) shrinks like
    // (1 - delta/k)^(2m); cap the rejection sampler's m so the conditioned
    // trial count stays inside the raw-draw budget.
    let guess_m = m.min((k as f64 / delta).floor() as usize);
    let guess = bayes_guess_error_with(
        k,
        alpha,
        delta,
        guess_m,
        guess_trials,
        seed,
        budget,
        GuessRule::LowerValuation,
    )?;
    let pass = (guess.error_rate - 1.0 / 3.0).abs() <= 0.01;
    println!(
        "{} bayes_guess_error {} at m={} (conditioned {} / raw {}) vs 1/3 +- 0.01",
        if pass { "PASS" } else { "FAIL" },
        fmt17(guess.error_rate),
        guess_m,
        guess.conditioned_trials,
        guess.raw_trials
    );
    failures += u32::from(!pass);

    let (rev, rev_se) = adversarial_myerson_revenue(k, alpha, delta, trials.min(200_000), seed)?;
    let pass = rev <= rs + 3.0 * rev_se;
    println!(
        "{} optimal_revenue {} (se {}) <= r_star {}",
        if pass { "PASS" } else { "FAIL" },
        fmt17(rev),
        fmt17(rev_se),
        fmt17(rs)
    );
    failures += u32::from(!pass);

    let (strategy, label) = match get(invocation, "strategy").unwrap_or("guess") {
        "guess" => (GapStrategy::GuessLowerUnderE, "guess_strategy_gap"),
        "myerson" => (GapStrategy::InstanceAwareMyerson, "myerson_strategy_gap"),
        "empirical" => {
            let xi_hat: f64 = opt_num(invocation, "xi_hat", 0.25)?;
            (
                GapStrategy::EmpiricalMyerson { xi_hat },
                "empirical_strategy_gap",
            )
        }
        other => {
            return Err(CliError::config(format!(
                "unknown strategy `{other}` (guess, myerson, empirical)"
            )))
        }
    };
    let gap = revenue_gap_experiment(k, alpha, delta, m, gap_trials, seed, strategy)?;
    println!(
        "INFO {label} {} (se {}) gap/r_star {}",
        fmt17(gap.gap_mean),
        fmt17(gap.gap_se),
        fmt17(gap.gap_over_r_star)
    );

    if failures > 0 {
        return Err(CliError::verification(format!(
            "{failures} lower-bound check(s) failed"
        )));
    }
    Ok(())
}

fn cmd_verify(invocation: &Invocation) -> Result<(), CliError> {
    check_keys(invocation, &[])?;
    let seed = invocation.seed.unwrap_or(VERIFY_DEFAULT_SEED);
    println!("seed {seed}");
    let report = lemma_suite(seed)?;
    for check in &report.checks {
        println!("{}", check.render());
    }
    if report.all_passed() {
        println!("verify: all {} checks passed", report.checks.len());
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        Err(CliError::verification(format!(
            "{failed} of {} checks failed",
            report.checks.len()
        )))
    }
}
