//! Python bindings for the auction laboratory.
//!
//! Exposes the valuation distributions, ironing, Myerson evaluation, the
//! learned empirical auction, and the adversarial closed forms. Build with
//! `cargo build -p myerson-lab-py --release` and import the produced cdylib
//! as `myerson_lab_py` (see python/smoke_test.py).

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use myerson_lab::adversarial;
use myerson_lab::distributions::{
    parse_spec, ProductDistribution, StronglyRegularBase, TruncatedDistribution,
    ValuationDistribution,
};
use myerson_lab::empirical::{learn as learn_rs, EmpiricalMyersonAuction, SampleMatrix};
use myerson_lab::myerson::{
    estimate_paired, iron as iron_rs, run_myerson as run_myerson_rs, AuctionRule, BidProfile,
    IronedCurve, TieRule,
};
use myerson_lab::rng::trial_rng;

fn to_py_err(e: myerson_lab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A one-bidder valuation distribution.
#[pyclass(name = "Distribution")]
#[derive(Clone)]
struct PyDistribution {
    inner: Arc<dyn ValuationDistribution>,
    spec: String,
}

#[pymethods]
impl PyDistribution {
    /// The worst-case alpha-strongly regular base distribution.
    #[staticmethod]
    fn base(alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(StronglyRegularBase::new(alpha).map_err(to_py_err)?),
            spec: format!("base(alpha={alpha})"),
        })
    }

    /// The standard exponential (alpha = 1).
    #[staticmethod]
    fn exponential() -> Self {
        Self {
            inner: Arc::new(StronglyRegularBase::exponential()),
            spec: "exponential".into(),
        }
    }

    /// Base distribution truncated at value `h` (atom at `h`).
    #[staticmethod]
    fn truncated(alpha: f64, h: f64) -> PyResult<Self> {
        let base = StronglyRegularBase::new(alpha).map_err(to_py_err)?;
        Ok(Self {
            inner: Arc::new(TruncatedDistribution::new(base, h).map_err(to_py_err)?),
            spec: format!("truncated(alpha={alpha}, H={h})"),
        })
    }

    /// Base distribution truncated at the value with upper-tail quantile `q`.
    #[staticmethod]
    fn truncated_q(alpha: f64, q: f64) -> PyResult<Self> {
        let base = StronglyRegularBase::new(alpha).map_err(to_py_err)?;
        Ok(Self {
            inner: Arc::new(TruncatedDistribution::at_quantile(base, q).map_err(to_py_err)?),
            spec: format!("truncated_q(alpha={alpha}, q={q})"),
        })
    }

    /// Parses the config-file grammar, e.g. `truncated(alpha=0.5, H=3)`.
    #[staticmethod]
    fn parse(spec: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_spec(spec).map_err(to_py_err)?,
            spec: spec.trim().to_string(),
        })
    }

    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }

    fn cdf(&self, v: f64) -> f64 {
        self.inner.cdf(v)
    }

    fn density(&self, v: f64) -> Option<f64> {
        self.inner.density(v)
    }

    fn quantile_to_value(&self, q: f64) -> PyResult<f64> {
        self.inner.quantile_to_value(q).map_err(to_py_err)
    }

    fn value_to_quantile(&self, v: f64) -> f64 {
        self.inner.value_to_quantile(v)
    }

    fn virtual_value(&self, v: f64) -> PyResult<f64> {
        self.inner.virtual_value(v).map_err(to_py_err)
    }

    fn monopoly_quantile(&self) -> PyResult<f64> {
        self.inner.monopoly_quantile().map_err(to_py_err)
    }

    /// `n` inverse-transform samples from the deterministic stream `seed`.
    fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = trial_rng(seed, 0, 0);
        (0..n).map(|_| self.inner.sample(&mut rng)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Distribution({})", self.spec)
    }
}

fn market(py: Python<'_>, dists: &[Py<PyDistribution>]) -> PyResult<ProductDistribution> {
    let components = dists
        .iter()
        .map(|d| Arc::clone(&d.borrow(py).inner))
        .collect();
    ProductDistribution::new(components).map_err(to_py_err)
}

/// Least concave upper bound of quantile-space points.
#[pyclass(name = "IronedCurve")]
struct PyIronedCurve {
    inner: IronedCurve,
}

#[pymethods]
impl PyIronedCurve {
    #[getter]
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn slopes(&self) -> Vec<f64> {
        self.inner.slopes().to_vec()
    }

    /// Hull value at quantile q (linear interpolation).
    fn value_at(&self, q: f64) -> f64 {
        self.inner.value_at(q)
    }

    /// Ironed virtual value: segment slope at q, right-limit at breakpoints.
    fn virtual_value_at(&self, q: f64) -> PyResult<f64> {
        self.inner.virtual_value_at(q).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "IronedCurve({} breakpoints)",
            self.inner.breakpoints().len()
        )
    }
}

/// Irons a sorted point set: returns its least concave upper bound.
#[pyfunction]
fn iron(points: Vec<(f64, f64)>) -> PyResult<PyIronedCurve> {
    Ok(PyIronedCurve {
        inner: iron_rs(&points).map_err(to_py_err)?,
    })
}

/// Runs Myerson's optimal auction on one bid profile.
/// Returns (winner or None, payment, virtual_bids).
#[pyfunction]
fn run_myerson(
    py: Python<'_>,
    dists: Vec<Py<PyDistribution>>,
    bids: Vec<f64>,
) -> PyResult<(Option<usize>, f64, Vec<f64>)> {
    let market = market(py, &dists)?;
    let profile = BidProfile::new(bids).map_err(to_py_err)?;
    let outcome = run_myerson_rs(&market, &profile, TieRule::LowestIndex).map_err(to_py_err)?;
    Ok((outcome.winner, outcome.payment, outcome.virtual_bids))
}

fn rule_from_name(
    name: &str,
    market: &ProductDistribution,
    prices: Option<Vec<f64>>,
) -> PyResult<AuctionRule> {
    Ok(match name {
        "myerson" => AuctionRule::myerson(),
        "second_price" => AuctionRule::SecondPrice,
        "second_price_reserves" => AuctionRule::SecondPriceMonopolyReserves,
        "first_price" => AuctionRule::FirstPrice,
        "reject" => AuctionRule::AlwaysReject,
        "posted" => {
            let prices = match prices {
                Some(p) => p,
                None => market
                    .components()
                    .iter()
                    .map(|d| {
                        d.quantile_to_value(d.monopoly_quantile().map_err(to_py_err)?)
                            .map_err(to_py_err)
                    })
                    .collect::<PyResult<_>>()?,
            };
            AuctionRule::SequentialPostedPrice { prices }
        }
        other => return Err(PyValueError::new_err(format!("unknown rule `{other}`"))),
    })
}

/// Monte Carlo expected revenue of a rule: (mean, std_error).
#[pyfunction]
#[pyo3(signature = (rule, dists, trials, seed, prices=None))]
fn estimate_revenue(
    py: Python<'_>,
    rule: &str,
    dists: Vec<Py<PyDistribution>>,
    trials: u64,
    seed: u64,
    prices: Option<Vec<f64>>,
) -> PyResult<(f64, f64)> {
    let market = market(py, &dists)?;
    let rule = rule_from_name(rule, &market, prices)?;
    let est = estimate_paired(&rule, &market, trials, seed).map_err(to_py_err)?;
    Ok((est.revenue_mean, est.revenue_se))
}

/// Monte Carlo expected virtual welfare of a rule: (mean, std_error).
/// Shares valuation draws with `estimate_revenue` at equal seeds.
#[pyfunction]
#[pyo3(signature = (rule, dists, trials, seed, prices=None))]
fn estimate_virtual_welfare(
    py: Python<'_>,
    rule: &str,
    dists: Vec<Py<PyDistribution>>,
    trials: u64,
    seed: u64,
    prices: Option<Vec<f64>>,
) -> PyResult<(f64, f64)> {
    let market = market(py, &dists)?;
    let rule = rule_from_name(rule, &market, prices)?;
    let est = estimate_paired(&rule, &market, trials, seed).map_err(to_py_err)?;
    Ok((est.virtual_welfare_mean, est.virtual_welfare_se))
}

/// The m-sample empirical Myerson auction.
#[pyclass(name = "EmpiricalAuction")]
struct PyEmpiricalAuction {
    inner: EmpiricalMyersonAuction,
}

#[pymethods]
impl PyEmpiricalAuction {
    /// Learns the auction from per-bidder sample rows.
    #[staticmethod]
    fn learn(samples: Vec<Vec<f64>>, xi_hat: f64) -> PyResult<Self> {
        let matrix = SampleMatrix::new(samples).map_err(to_py_err)?;
        Ok(Self {
            inner: learn_rs(&matrix, xi_hat).map_err(to_py_err)?,
        })
    }

    /// Reads the plain-text learned-auction format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: EmpiricalMyersonAuction::from_text(text).map_err(to_py_err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn reserves(&self) -> Vec<f64> {
        (0..self.inner.k())
            .map(|i| self.inner.bidder(i).reserve())
            .collect()
    }

    fn thresholds(&self) -> Vec<f64> {
        (0..self.inner.k())
            .map(|i| self.inner.bidder(i).threshold_value())
            .collect()
    }

    /// Empirical ironed virtual value of bidder `i` at bid `v`.
    fn virtual_value(&self, i: usize, v: f64) -> PyResult<f64> {
        if i >= self.inner.k() {
            return Err(PyValueError::new_err(format!("bidder {i} out of range")));
        }
        Ok(self.inner.virtual_value(i, v))
    }

    /// Runs the auction: returns (winner or None, payment, virtual_bids).
    fn run(&self, bids: Vec<f64>) -> PyResult<(Option<usize>, f64, Vec<f64>)> {
        let profile = BidProfile::new(bids).map_err(to_py_err)?;
        let outcome = self.inner.run(&profile).map_err(to_py_err)?;
        Ok((outcome.winner, outcome.payment, outcome.virtual_bids))
    }

    fn __repr__(&self) -> String {
        format!("EmpiricalAuction(k={})", self.inner.k())
    }
}

/// Closed-form revenue-gap fraction for the adversarial construction.
#[pyfunction]
fn epsilon_bound(alpha: f64, delta: f64, k: usize) -> PyResult<f64> {
    adversarial::epsilon_bound(alpha, delta, k).map_err(to_py_err)
}

/// Closed-form upper bound on the optimal revenue of an adversarial instance.
#[pyfunction]
fn r_star(k: usize, alpha: f64, delta: f64) -> f64 {
    adversarial::r_star(k, alpha, delta)
}

/// Monte Carlo frequency of event E: (frequency, std_error).
#[pyfunction]
fn event_e_frequency(
    k: usize,
    alpha: f64,
    delta: f64,
    m: usize,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    adversarial::event_e_frequency(k, alpha, delta, m, trials, seed).map_err(to_py_err)
}

/// Error rate of the lower-valuation guess conditioned on event E:
/// (error_rate, conditioned_trials, raw_trials).
#[pyfunction]
#[pyo3(signature = (k, alpha, delta, m, trials, seed, budget=None))]
fn bayes_guess_error(
    k: usize,
    alpha: f64,
    delta: f64,
    m: usize,
    trials: u64,
    seed: u64,
    budget: Option<u64>,
) -> PyResult<(f64, u64, u64)> {
    let report = adversarial::bayes_guess_error_with(
        k,
        alpha,
        delta,
        m,
        trials,
        seed,
        budget.unwrap_or(adversarial::DEFAULT_REJECTION_BUDGET),
        adversarial::GuessRule::LowerValuation,
    )
    .map_err(to_py_err)?;
    Ok((
        report.error_rate,
        report.conditioned_trials,
        report.raw_trials,
    ))
}

/// Fraction of trials violating the order-statistic quantile sandwich.
#[pyfunction]
fn verify_quantile_sandwich(
    dist: PyRef<'_, PyDistribution>,
    m: usize,
    gamma: f64,
    xi_hat: f64,
    trials: u64,
    seed: u64,
) -> PyResult<f64> {
    myerson_lab::empirical::verify_quantile_sandwich(
        dist.inner.as_ref(),
        m,
        gamma,
        xi_hat,
        trials,
        seed,
    )
    .map_err(to_py_err)
}

#[pymodule]
fn myerson_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyIronedCurve>()?;
    m.add_class::<PyEmpiricalAuction>()?;
    m.add_function(wrap_pyfunction!(iron, m)?)?;
    m.add_function(wrap_pyfunction!(run_myerson, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_revenue, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_virtual_welfare, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_bound, m)?)?;
    m.add_function(wrap_pyfunction!(r_star, m)?)?;
    m.add_function(wrap_pyfunction!(event_e_frequency, m)?)?;
    m.add_function(wrap_pyfunction!(bayes_guess_error, m)?)?;
    m.add_function(wrap_pyfunction!(verify_quantile_sandwich, m)?)?;
    Ok(())
}
