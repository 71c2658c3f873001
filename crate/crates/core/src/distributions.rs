//! Valuation distributions in quantile space.
//!
//! Quantiles here are upper-tail probabilities: q(v) = 1 − F(v), so q near 0
//! means a high valuation and q = 1 maps to the support minimum. The base
//! family is parameterized by the strong-regularity coefficient α ∈ [0, 1]:
//! its virtual valuation is exactly αv − 1, interpolating between the
//! heaviest-tailed regular distribution (α = 0) and the exponential (α = 1).

use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::rng::unit_open_closed;
use crate::{Error, Result};

/// Quantile floor: quantile-space code never evaluates values below this,
/// which keeps (1/q)^(1−α) far from overflow.
pub const Q_MIN: f64 = 1e-12;

/// One-bidder valuation law exposed through CDF, density, quantile↔value
/// maps, and virtual valuation.
pub trait ValuationDistribution: Send + Sync {
    /// Support bounds; the upper bound may be `f64::INFINITY`.
    fn support(&self) -> (f64, f64);

    fn cdf(&self, v: f64) -> f64;

    /// Density of the absolutely continuous part, `None` at an atom or
    /// outside the support.
    fn density(&self, v: f64) -> Option<f64>;

    /// Value at upper-tail quantile q ∈ (0, 1].
    fn quantile_to_value(&self, q: f64) -> Result<f64>;

    /// Upper-tail quantile of a value. At an atom this includes the atom's
    /// mass, so the atom's value maps to its full purchase probability.
    fn value_to_quantile(&self, v: f64) -> f64;

    /// Virtual valuation φ(v). For the closed-form families this is exact;
    /// the default uses v − (1 − F(v))/f(v) and fails where the density
    /// vanishes.
    fn virtual_value(&self, v: f64) -> Result<f64> {
        match self.density(v) {
            Some(f) if f > 0.0 => Ok(v - (1.0 - self.cdf(v)) / f),
            Some(_) => Err(Error::Singularity(v)),
            None => Err(Error::domain(format!(
                "no density at v = {v}; virtual value needs an explicit rule"
            ))),
        }
    }

    /// Largest quantile q with φ(v(q)) ≥ 0. The default bisects on q; the
    /// closed-form families override it.
    fn monopoly_quantile(&self) -> Result<f64> {
        let nonneg =
            |q: f64| -> Result<bool> { Ok(self.virtual_value(self.quantile_to_value(q)?)? >= 0.0) };
        if nonneg(1.0)? {
            return Ok(1.0);
        }
        if !nonneg(Q_MIN)? {
            return Err(Error::NoReserve);
        }
        // Invariant: nonneg(lo), !nonneg(hi).
        let (mut lo, mut hi) = (Q_MIN, 1.0);
        for _ in 0..200 {
            if hi - lo <= 1e-12 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if nonneg(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Inverse-transform sample: draws u uniform on (0, 1] and maps it
    /// through `quantile_to_value`.
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u = unit_open_closed(rng).max(Q_MIN);
        self.quantile_to_value(u)
            .expect("u in (0,1] is always in the quantile domain")
    }
}

/// Worst-case α-strongly regular distribution on [0, ∞).
///
/// CDF 1 − (1 + (1−α)v)^(−1/(1−α)) for α < 1, 1 − e^(−v) for α = 1;
/// virtual valuation αv − 1 in both branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StronglyRegularBase {
    alpha: f64,
}

impl StronglyRegularBase {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
            return Err(Error::domain(format!(
                "alpha must be in [0,1], got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    /// The α = 1 member (standard exponential).
    pub fn exponential() -> Self {
        Self { alpha: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn is_exponential(&self) -> bool {
        self.alpha == 1.0
    }
}

impl ValuationDistribution for StronglyRegularBase {
    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn cdf(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if self.is_exponential() {
            1.0 - (-v).exp()
        } else {
            let lam = 1.0 - self.alpha;
            1.0 - (1.0 + lam * v).powf(-1.0 / lam)
        }
    }

    fn density(&self, v: f64) -> Option<f64> {
        if v < 0.0 {
            return None;
        }
        if self.is_exponential() {
            Some((-v).exp())
        } else {
            let lam = 1.0 - self.alpha;
            Some((1.0 + lam * v).powf(-(2.0 - self.alpha) / lam))
        }
    }

    fn quantile_to_value(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::domain(format!("quantile must be in (0,1], got {q}")));
        }
        if self.is_exponential() {
            Ok((1.0 / q).ln())
        } else {
            let lam = 1.0 - self.alpha;
            Ok(((1.0 / q).powf(lam) - 1.0) / lam)
        }
    }

    fn value_to_quantile(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 1.0;
        }
        if self.is_exponential() {
            (-v).exp()
        } else {
            let lam = 1.0 - self.alpha;
            (1.0 + lam * v).powf(-1.0 / lam)
        }
    }

    fn virtual_value(&self, v: f64) -> Result<f64> {
        if v < 0.0 {
            return Err(Error::domain(format!("value {v} below support")));
        }
        Ok(self.alpha * v - 1.0)
    }

    fn monopoly_quantile(&self) -> Result<f64> {
        // φ(v) = αv − 1 crosses zero at v = 1/α; in quantile space that is
        // α^(1/(1−α)), degenerating to 1/e at α = 1 and to no crossing at α = 0.
        if self.alpha == 0.0 {
            Err(Error::NoReserve)
        } else if self.is_exponential() {
            Ok((-1.0_f64).exp())
        } else {
            Ok(self.alpha.powf(1.0 / (1.0 - self.alpha)))
        }
    }
}

/// A base distribution truncated at H: identical below H, with an atom of the
/// remaining mass at H. The virtual valuation jumps from αH − 1 to H at the
/// atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedDistribution {
    base: StronglyRegularBase,
    truncation_value: f64,
    atom_quantile: f64,
}

impl TruncatedDistribution {
    pub fn new(base: StronglyRegularBase, truncation_value: f64) -> Result<Self> {
        if truncation_value.is_nan() || truncation_value <= 0.0 || !truncation_value.is_finite() {
            return Err(Error::domain(format!(
                "truncation value must be positive and finite, got {truncation_value}"
            )));
        }
        let atom_quantile = base.value_to_quantile(truncation_value);
        Ok(Self {
            base,
            truncation_value,
            atom_quantile,
        })
    }

    /// Truncates at the value whose upper-tail quantile in the base is `q`.
    pub fn at_quantile(base: StronglyRegularBase, q: f64) -> Result<Self> {
        let h = base.quantile_to_value(q)?;
        if h <= 0.0 {
            return Err(Error::domain(format!(
                "truncation quantile {q} maps to the support minimum; atom would be at 0"
            )));
        }
        Ok(Self {
            base,
            truncation_value: h,
            atom_quantile: q,
        })
    }

    pub fn base(&self) -> &StronglyRegularBase {
        &self.base
    }

    pub fn alpha(&self) -> f64 {
        self.base.alpha()
    }

    pub fn truncation_value(&self) -> f64 {
        self.truncation_value
    }

    /// Mass of the atom, 1 − F_base(H).
    pub fn atom_quantile(&self) -> f64 {
        self.atom_quantile
    }
}

impl ValuationDistribution for TruncatedDistribution {
    fn support(&self) -> (f64, f64) {
        (0.0, self.truncation_value)
    }

    fn cdf(&self, v: f64) -> f64 {
        if v >= self.truncation_value {
            1.0
        } else {
            self.base.cdf(v)
        }
    }

    fn density(&self, v: f64) -> Option<f64> {
        if v < 0.0 || v >= self.truncation_value {
            None
        } else {
            self.base.density(v)
        }
    }

    fn quantile_to_value(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::domain(format!("quantile must be in (0,1], got {q}")));
        }
        if q <= self.atom_quantile {
            Ok(self.truncation_value)
        } else {
            self.base.quantile_to_value(q)
        }
    }

    fn value_to_quantile(&self, v: f64) -> f64 {
        if v >= self.truncation_value {
            self.atom_quantile
        } else {
            self.base.value_to_quantile(v)
        }
    }

    fn virtual_value(&self, v: f64) -> Result<f64> {
        if v < 0.0 {
            return Err(Error::domain(format!("value {v} below support")));
        }
        // Below the atom the base rule applies; at the atom the virtual value
        // jumps to the value itself, and the monotone extension v covers bids
        // past the support.
        if v < self.truncation_value {
            Ok(self.alpha() * v - 1.0)
        } else {
            Ok(v)
        }
    }

    fn monopoly_quantile(&self) -> Result<f64> {
        // The atom always has φ(H) = H > 0, so the crossing is the larger of
        // the atom's quantile and the base crossing (absent at α = 0).
        let base_q = match self.base.monopoly_quantile() {
            Ok(q) => q,
            Err(Error::NoReserve) => 0.0,
            Err(e) => return Err(e),
        };
        Ok(base_q.max(self.atom_quantile))
    }
}

/// Independent product of per-bidder distributions.
#[derive(Clone)]
pub struct ProductDistribution {
    components: Vec<Arc<dyn ValuationDistribution>>,
}

impl ProductDistribution {
    pub fn new(components: Vec<Arc<dyn ValuationDistribution>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::malformed(
                "product distribution needs k >= 1 components",
            ));
        }
        Ok(Self { components })
    }

    /// k identical copies of one distribution.
    pub fn iid(dist: Arc<dyn ValuationDistribution>, k: usize) -> Result<Self> {
        Self::new((0..k).map(|_| Arc::clone(&dist)).collect())
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &Arc<dyn ValuationDistribution> {
        &self.components[i]
    }

    pub fn components(&self) -> &[Arc<dyn ValuationDistribution>] {
        &self.components
    }

    /// One independent draw per bidder.
    pub fn sample_profile(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.components.iter().map(|d| d.sample(rng)).collect()
    }
}

impl fmt::Debug for ProductDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProductDistribution(k = {})", self.k())
    }
}

/// Result of a strong-regularity grid check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegularityReport {
    pub satisfied: bool,
    pub pairs_checked: usize,
    pub pairs_skipped: usize,
}

/// Checks φ(y) − φ(x) ≥ α(y − x) on every in-support pair of the grid, with
/// tolerance 1e-9 · (1 + |φ(y)|). Out-of-support pairs are skipped and
/// counted.
pub fn verify_strong_regularity(
    dist: &dyn ValuationDistribution,
    alpha: f64,
    grid: &[(f64, f64)],
) -> RegularityReport {
    let (lo, hi) = dist.support();
    let mut checked = 0;
    let mut skipped = 0;
    let mut satisfied = true;
    for &(x, y) in grid {
        if !(y > x && x >= 0.0) || x < lo || y > hi {
            skipped += 1;
            continue;
        }
        let (phi_x, phi_y) = match (dist.virtual_value(x), dist.virtual_value(y)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                skipped += 1;
                continue;
            }
        };
        checked += 1;
        let tol = 1e-9 * (1.0 + phi_y.abs());
        if phi_y - phi_x < alpha * (y - x) - tol {
            satisfied = false;
        }
    }
    RegularityReport {
        satisfied,
        pairs_checked: checked,
        pairs_skipped: skipped,
    }
}

/// Parses one distribution spec: `base(alpha=<f>)`,
/// `truncated(alpha=<f>, H=<f>)`, `truncated_q(alpha=<f>, q=<f>)`, or
/// `exponential`.
pub fn parse_spec(spec: &str) -> Result<Arc<dyn ValuationDistribution>> {
    let s = spec.trim();
    if s == "exponential" {
        return Ok(Arc::new(StronglyRegularBase::exponential()));
    }
    let (name, args) = match s.find('(') {
        Some(open) => {
            if !s.ends_with(')') {
                return Err(Error::parse(format!("unbalanced parentheses in `{s}`")));
            }
            (&s[..open], parse_kv_args(&s[open + 1..s.len() - 1])?)
        }
        None => return Err(Error::parse(format!("unknown distribution spec `{s}`"))),
    };
    let get = |key: &str| -> Result<f64> {
        args.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::parse(format!("`{s}` is missing argument `{key}`")))
    };
    let expect_keys = |allowed: &[&str]| -> Result<()> {
        for (k, _) in &args {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::parse(format!("unknown argument `{k}` in `{s}`")));
            }
        }
        Ok(())
    };
    match name.trim() {
        "base" => {
            expect_keys(&["alpha"])?;
            Ok(Arc::new(StronglyRegularBase::new(get("alpha")?)?))
        }
        "truncated" => {
            expect_keys(&["alpha", "H"])?;
            let base = StronglyRegularBase::new(get("alpha")?)?;
            Ok(Arc::new(TruncatedDistribution::new(base, get("H")?)?))
        }
        "truncated_q" => {
            expect_keys(&["alpha", "q"])?;
            let base = StronglyRegularBase::new(get("alpha")?)?;
            Ok(Arc::new(TruncatedDistribution::at_quantile(
                base,
                get("q")?,
            )?))
        }
        other => Err(Error::parse(format!("unknown distribution `{other}`"))),
    }
}

/// Parses a comma-separated list of specs (commas inside parentheses are
/// argument separators, not list separators).
pub fn parse_spec_list(specs: &str) -> Result<Vec<Arc<dyn ValuationDistribution>>> {
    split_top_level(specs, ',')
        .into_iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_spec(&s))
        .collect()
}

fn parse_kv_args(args: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for part in args.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::parse(format!("expected key=value, got `{part}`")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("`{}` is not a number", v.trim())))?;
        out.push((k.trim().to_string(), value));
    }
    Ok(out)
}

/// Splits on `sep` at parenthesis depth zero.
pub fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            c if c == sep && depth == 0 => {
                out.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    fn base(alpha: f64) -> StronglyRegularBase {
        StronglyRegularBase::new(alpha).unwrap()
    }

    #[test]
    fn quantile_to_value_closed_forms() {
        // Full-support quantile maps to the support minimum.
        assert_eq!(base(0.0).quantile_to_value(1.0).unwrap(), 0.0);
        // (1/q) − 1 at alpha = 0.
        assert!((base(0.0).quantile_to_value(0.5).unwrap() - 1.0).abs() < 1e-15);
        // ln(1/q) at alpha = 1.
        let e_inv = (-1.0_f64).exp();
        assert!((base(1.0).quantile_to_value(e_inv).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_domain_errors() {
        assert!(base(0.5).quantile_to_value(0.0).is_err());
        assert!(base(0.5).quantile_to_value(-0.1).is_err());
        assert!(base(0.5).quantile_to_value(1.0 + 1e-12).is_err());
    }

    #[test]
    fn virtual_value_examples() {
        assert_eq!(base(0.0).virtual_value(5.0).unwrap(), -1.0);
        assert_eq!(base(1.0).virtual_value(1.0).unwrap(), 0.0);
        let tr = TruncatedDistribution::new(base(0.5), 3.0).unwrap();
        assert_eq!(tr.virtual_value(3.0).unwrap(), 3.0);
        assert_eq!(tr.virtual_value(2.0).unwrap(), 0.0);
    }

    #[test]
    fn exact_virtual_value_matches_density_formula() {
        // Dual route: αv − 1 against v − (1 − F)/f evaluated numerically.
        for &alpha in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let d = base(alpha);
            for &v in &[0.1, 0.5, 1.0, 3.0, 10.0] {
                let f = d.density(v).unwrap();
                let formula = v - (1.0 - d.cdf(v)) / f;
                let exact = d.virtual_value(v).unwrap();
                assert!(
                    (formula - exact).abs() < 1e-9 * (1.0 + exact.abs()),
                    "alpha={alpha} v={v}: {formula} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn monopoly_quantile_closed_form_and_bisection_agree() {
        for &alpha in &[0.1, 0.25, 0.5, 0.75, 0.9] {
            let d = base(alpha);
            let expected = alpha.powf(1.0 / (1.0 - alpha));
            let closed = d.monopoly_quantile().unwrap();
            assert!((closed - expected).abs() < 1e-12, "alpha={alpha}");
            // Cross-check through the trait's generic bisection path.
            struct Generic(StronglyRegularBase);
            impl ValuationDistribution for Generic {
                fn support(&self) -> (f64, f64) {
                    self.0.support()
                }
                fn cdf(&self, v: f64) -> f64 {
                    self.0.cdf(v)
                }
                fn density(&self, v: f64) -> Option<f64> {
                    self.0.density(v)
                }
                fn quantile_to_value(&self, q: f64) -> Result<f64> {
                    self.0.quantile_to_value(q)
                }
                fn value_to_quantile(&self, v: f64) -> f64 {
                    self.0.value_to_quantile(v)
                }
                fn virtual_value(&self, v: f64) -> Result<f64> {
                    self.0.virtual_value(v)
                }
            }
            let bisected = Generic(d).monopoly_quantile().unwrap();
            assert!(
                (bisected - expected).abs() < 1e-9,
                "alpha={alpha}: bisection gave {bisected}, expected {expected}"
            );
        }
        assert!((base(1.0).monopoly_quantile().unwrap() - (-1.0_f64).exp()).abs() < 1e-15);
        assert!(matches!(
            base(0.0).monopoly_quantile(),
            Err(Error::NoReserve)
        ));
    }

    #[test]
    fn truncated_monopoly_quantile_respects_atom() {
        // Atom quantile above the base crossing: the atom sets the reserve.
        let d = TruncatedDistribution::at_quantile(base(0.5), 0.5).unwrap();
        assert!((d.monopoly_quantile().unwrap() - 0.5).abs() < 1e-15);
        // Atom quantile below the base crossing q_0.5 = 0.25.
        let d = TruncatedDistribution::at_quantile(base(0.5), 0.01).unwrap();
        assert!((d.monopoly_quantile().unwrap() - 0.25).abs() < 1e-12);
        // Alpha = 0: only the atom has nonnegative virtual value.
        let d = TruncatedDistribution::at_quantile(base(0.0), 0.125).unwrap();
        assert!((d.monopoly_quantile().unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn strong_regularity_grid_checks() {
        let grid: Vec<(f64, f64)> = (0..100)
            .map(|i| {
                let x = i as f64 * 0.07;
                (x, x + 0.31)
            })
            .collect();
        assert!(verify_strong_regularity(&base(1.0), 1.0, &grid).satisfied);
        // φ ≡ −1 under alpha = 0 fails an alpha = 0.5 requirement.
        let report = verify_strong_regularity(&base(0.0), 0.5, &[(0.0, 1.0)]);
        assert!(!report.satisfied);
        // Linear slope alpha below the atom.
        let tr = TruncatedDistribution::new(base(0.5), 3.0).unwrap();
        let pairs: Vec<(f64, f64)> = (0..50)
            .map(|i| (i as f64 * 0.05, i as f64 * 0.05 + 0.1))
            .collect();
        let report = verify_strong_regularity(&tr, 0.5, &pairs);
        assert!(report.satisfied);
        // Pairs past the atom are skipped, not failed.
        let report = verify_strong_regularity(&tr, 0.5, &[(2.0, 5.0)]);
        assert_eq!(report.pairs_skipped, 1);
        assert!(report.satisfied);
    }

    #[test]
    fn sampling_forced_quantiles() {
        // u = 1 maps to the support minimum.
        assert_eq!(base(0.5).quantile_to_value(1.0).unwrap(), 0.0);
        // Inverse-transform identity at u = 1/e for the exponential.
        let u = (-1.0_f64).exp();
        assert!((base(1.0).quantile_to_value(u).unwrap() - 1.0).abs() < 1e-12);
        // Truncation clips the base draw: base value at u = 0.1 is 9 >= H = 2.
        let tr = TruncatedDistribution::new(base(0.0), 2.0).unwrap();
        assert_eq!(tr.quantile_to_value(0.1).unwrap(), 2.0);
    }

    #[test]
    fn truncation_atom_frequency() {
        let tr = TruncatedDistribution::at_quantile(base(0.5), 0.2).unwrap();
        let expected = tr.atom_quantile();
        let mut rng = trial_rng(11, 0, 0);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| tr.sample(&mut rng) == tr.truncation_value())
            .count();
        let freq = hits as f64 / n as f64;
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!(
            (freq - expected).abs() <= 4.0 * se,
            "atom frequency {freq} vs expected {expected} (se {se})"
        );
    }

    #[test]
    fn sample_distribution_matches_cdf_ks() {
        // One-sample Kolmogorov–Smirnov against the exact CDF.
        for &alpha in &[0.0, 0.5, 1.0] {
            let d = base(alpha);
            let mut rng = trial_rng(13, alpha.to_bits(), 0);
            let n = 100_000usize;
            let mut xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut dmax: f64 = 0.0;
            for (i, &x) in xs.iter().enumerate() {
                let f = d.cdf(x);
                let lo = i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64;
                dmax = dmax.max((f - lo).abs()).max((f - hi).abs());
            }
            // 1% critical value 1.63 / sqrt(n).
            assert!(
                dmax < 1.63 / (n as f64).sqrt(),
                "KS statistic {dmax} too large for alpha={alpha}"
            );
        }
    }

    #[test]
    fn parse_spec_grammar() {
        assert_eq!(parse_spec("exponential").unwrap().support().0, 0.0);
        let d = parse_spec("base(alpha=0.5)").unwrap();
        assert_eq!(d.virtual_value(2.0).unwrap(), 0.0);
        let d = parse_spec("truncated(alpha=0.5, H=3)").unwrap();
        assert_eq!(d.support().1, 3.0);
        let d = parse_spec("truncated_q(alpha=0, q=0.25)").unwrap();
        assert!((d.support().1 - 3.0).abs() < 1e-12);
        assert!(parse_spec("base(beta=1)").is_err());
        assert!(parse_spec("nope").is_err());
        let list =
            parse_spec_list("exponential, truncated(alpha=0.5, H=3), base(alpha=0.25)").unwrap();
        assert_eq!(list.len(), 3);
    }

    #[test]
    fn product_distribution_samples_independently() {
        let p = ProductDistribution::new(vec![
            Arc::new(base(1.0)) as Arc<dyn ValuationDistribution>,
            Arc::new(base(0.0)),
        ])
        .unwrap();
        let mut rng = trial_rng(5, 0, 0);
        let profile = p.sample_profile(&mut rng);
        assert_eq!(profile.len(), 2);
        assert!(profile.iter().all(|&v| v >= 0.0));
        assert!(ProductDistribution::new(vec![]).is_err());
    }
}
