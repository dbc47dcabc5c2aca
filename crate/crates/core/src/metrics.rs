//! SINR evaluation and sample statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::beamform::{BeamformerSet, NetworkBeams, Owner, PowerConfig, Scheme};
use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::topology::Point;
use crate::{SystemKind, C64};

/// Powers seen by one scheduled user, before multiplication by `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinrSample {
    /// Index into the slot's schedule.
    pub user: usize,
    pub kind: SystemKind,
    pub scheme: Scheme,
    /// `|gᴴw|²` on the user's own beam.
    pub signal_power: f64,
    /// Out-of-cluster interference.
    pub interference_power: f64,
    /// Leakage from the other beams of the user's own cluster. It enters the
    /// SINR only for RZF; for ZF it is kept as a diagnostic.
    pub intra_power: f64,
    pub sinr: f64,
}

impl SinrSample {
    /// `log₂(1 + γ)`.
    pub fn rate(&self) -> f64 {
        self.sinr.ln_1p() / std::f64::consts::LN_2
    }
}

fn projection(h: &[C64], w: &[C64]) -> f64 {
    h.iter().zip(w).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr()
}

/// Gain vector from the transmitter of `set` to `user`.
fn tx_channel(real: &ChannelRealization, set: &BeamformerSet, user: usize) -> Result<Vec<C64>> {
    let rows = set.beams.nrows();
    match set.owner {
        Owner::Bs(bs) => Ok(real.link(bs, user, rows)?.to_vec()),
        Owner::Cluster(c) => real.stacked(c, user, rows / real.bs_per_cluster()),
    }
}

fn check_kind(kind: SystemKind, beams: &NetworkBeams) -> Result<()> {
    if beams.kind != kind {
        return Err(Error::Usage(format!("beams were built for {} not {kind}", beams.kind)));
    }
    Ok(())
}

/// Per-cluster out-of-cluster interference at `user`; the entry of the
/// user's own cluster is zero.
pub fn interference_by_cluster(
    kind: SystemKind,
    real: &ChannelRealization,
    beams: &NetworkBeams,
    user: usize,
) -> Result<Vec<f64>> {
    check_kind(kind, beams)?;
    let own = real.schedule().user(user).cluster;
    let clusters = real.schedule().num_clusters();
    let mut out = vec![0.0; clusters];
    for (j, slot) in out.iter_mut().enumerate() {
        if j == own {
            continue;
        }
        for set in beams.cluster_sets(j) {
            let h = tx_channel(real, set, user)?;
            *slot += (0..set.len()).map(|i| projection(&h, set.beam(i))).sum::<f64>();
        }
    }
    Ok(out)
}

/// `I = Σ_{j≠l} Σ_beams |fᴴw|²`, summed over every beam of every other cluster.
pub fn aggregate_interference(
    kind: SystemKind,
    real: &ChannelRealization,
    beams: &NetworkBeams,
    user: usize,
) -> Result<f64> {
    Ok(interference_by_cluster(kind, real, beams, user)?.iter().sum())
}

/// Number of interfering beams summed by [`aggregate_interference`].
pub fn interference_term_count(beams: &NetworkBeams, own_cluster: usize) -> usize {
    beams
        .sets
        .iter()
        .filter(|s| beams.owner_cluster(s) != own_cluster)
        .map(BeamformerSet::len)
        .sum()
}

fn own_terms(kind: SystemKind, real: &ChannelRealization, beams: &NetworkBeams, user: usize) -> Result<(f64, f64)> {
    check_kind(kind, beams)?;
    let sched = real.schedule();
    let u = sched.user(user);
    let local = user - sched.cluster_users(u.cluster).start;
    let (own_set, own_col) = beams.locate(u.cluster, local);
    let mut signal = 0.0;
    let mut intra = 0.0;
    for set in beams.cluster_sets(u.cluster) {
        let h = tx_channel(real, set, user)?;
        for i in 0..set.len() {
            let p = projection(&h, set.beam(i));
            if std::ptr::eq(set, own_set) && i == own_col {
                signal = p;
            } else {
                intra += p;
            }
        }
    }
    Ok((signal, intra))
}

fn sample(
    kind: SystemKind,
    real: &ChannelRealization,
    beams: &NetworkBeams,
    user: usize,
    power: &PowerConfig,
    with_intra: bool,
) -> Result<SinrSample> {
    let (signal, intra) = own_terms(kind, real, beams, user)?;
    let interference = aggregate_interference(kind, real, beams, user)?;
    let rho = power.rho;
    let extra = if with_intra { rho * intra } else { 0.0 };
    Ok(SinrSample {
        user,
        kind,
        scheme: beams.scheme,
        signal_power: signal,
        interference_power: interference,
        intra_power: intra,
        sinr: rho * signal / (rho * interference + extra + 1.0),
    })
}

/// `ρ|gᴴw|² / (ρI + 1)`; in-cluster leakage is taken as nulled.
pub fn sinr_zf(
    kind: SystemKind,
    real: &ChannelRealization,
    beams: &NetworkBeams,
    user: usize,
    power: &PowerConfig,
) -> Result<SinrSample> {
    sample(kind, real, beams, user, power, false)
}

/// Like [`sinr_zf`] with the residual in-cluster leakage in the denominator.
pub fn sinr_rzf(
    kind: SystemKind,
    real: &ChannelRealization,
    beams: &NetworkBeams,
    user: usize,
    power: &PowerConfig,
) -> Result<SinrSample> {
    sample(kind, real, beams, user, power, true)
}

/// Dispatches on the scheme the beams were built with.
pub fn sinr(
    kind: SystemKind,
    real: &ChannelRealization,
    beams: &NetworkBeams,
    user: usize,
    power: &PowerConfig,
) -> Result<SinrSample> {
    match beams.scheme {
        Scheme::Zf => sinr_zf(kind, real, beams, user, power),
        Scheme::Rzf => sinr_rzf(kind, real, beams, user, power),
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleMeta {
    pub quantity: String,
    pub location: Option<Point>,
    pub config_hash: u64,
    /// First and one-past-last trial index merged into the set.
    pub seed_range: (u64, u64),
}

/// Scalar samples kept in ascending order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleSet {
    pub meta: SampleMeta,
    values: Vec<f64>,
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

impl SampleSet {
    pub fn new(quantity: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            meta: SampleMeta { quantity: quantity.into(), ..Default::default() },
            values: sorted(values),
        }
    }

    pub fn with_meta(meta: SampleMeta, values: Vec<f64>) -> Self {
        Self { meta, values: sorted(values) }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Union of the two sets; the order of the arguments does not matter.
    pub fn merge(&self, other: &SampleSet) -> SampleSet {
        let (a, b) = (&self.values, &other.values);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i].total_cmp(&b[j]).is_le() {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        let seeds = match (self.is_empty(), other.is_empty()) {
            (true, _) => other.meta.seed_range,
            (_, true) => self.meta.seed_range,
            _ => (
                self.meta.seed_range.0.min(other.meta.seed_range.0),
                self.meta.seed_range.1.max(other.meta.seed_range.1),
            ),
        };
        let mut meta = if self.meta.quantity.is_empty() { other.meta.clone() } else { self.meta.clone() };
        meta.seed_range = seeds;
        SampleSet { meta, values: out }
    }

    fn nonempty(&self) -> Result<()> {
        if self.values.is_empty() {
            Err(Error::EmptySamples)
        } else {
            Ok(())
        }
    }

    /// Fraction of samples ≤ `x`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.values.len() as f64
    }

    /// Fraction of samples ≥ `x`.
    pub fn ccdf_at(&self, x: f64) -> f64 {
        let below = self.values.partition_point(|&v| v < x);
        (self.values.len() - below) as f64 / self.values.len() as f64
    }

    /// Linear interpolation between order statistics at position `p(n−1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.nonempty()?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("quantile level must be in [0, 1], got {p}")));
        }
        let pos = p * (self.values.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let t = pos - lo as f64;
        Ok(self.values[lo] + t * (self.values[hi] - self.values[lo]))
    }

    pub fn mean(&self) -> Result<f64> {
        self.nonempty()?;
        Ok(self.values.iter().sum::<f64>() / self.values.len() as f64)
    }

    pub fn map(&self, quantity: impl Into<String>, f: impl Fn(f64) -> f64) -> SampleSet {
        let mut meta = self.meta.clone();
        meta.quantity = quantity.into();
        SampleSet::with_meta(meta, self.values.iter().map(|&v| f(v)).collect())
    }
}

/// `P(γ ≥ η)`.
pub fn coverage_probability(samples: &SampleSet, eta: f64) -> Result<f64> {
    samples.nonempty()?;
    Ok(samples.ccdf_at(eta))
}

/// Mean of `log₂(1 + γ)`.
pub fn ergodic_rate(samples: &SampleSet) -> Result<f64> {
    samples.nonempty()?;
    let total: f64 = samples.values().iter().map(|g| g.ln_1p()).sum();
    Ok(total / std::f64::consts::LN_2 / samples.len() as f64)
}

/// Nonnegative per-user weights `ψ`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UtilityWeights {
    weights: BTreeMap<usize, f64>,
}

impl UtilityWeights {
    pub fn new(weights: BTreeMap<usize, f64>) -> Result<Self> {
        if let Some((u, w)) = weights.iter().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::Domain(format!("weight of user {u} must be nonnegative, got {w}")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(users: impl IntoIterator<Item = usize>, psi: f64) -> Result<Self> {
        Self::new(users.into_iter().map(|u| (u, psi)).collect())
    }

    /// Round-robin weight `K/K_T` for every user.
    pub fn round_robin(users: impl IntoIterator<Item = usize>, k: usize, k_t: usize) -> Result<Self> {
        Self::uniform(users, k as f64 / k_t as f64)
    }

    pub fn get(&self, user: usize) -> Option<f64> {
        self.weights.get(&user).copied()
    }
}

/// `Σᵢ ψᵢ · E[log₂(1 + γᵢ)]`.
pub fn weighted_sum_rate(per_user: &BTreeMap<usize, SampleSet>, weights: &UtilityWeights) -> Result<f64> {
    per_user.iter().try_fold(0.0, |acc, (&u, s)| {
        let w = weights.get(u).ok_or(Error::MissingWeight(u))?;
        Ok(acc + w * ergodic_rate(s)?)
    })
}

/// Right-continuous ECDF: one `(value, P(X ≤ value))` per distinct sample.
pub fn empirical_cdf(samples: &SampleSet) -> Result<Vec<(f64, f64)>> {
    samples.nonempty()?;
    let v = samples.values();
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in v.iter().enumerate() {
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 = (i + 1) as f64 / n,
            _ => out.push((x, (i + 1) as f64 / n)),
        }
    }
    Ok(out)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_statistic(a: &SampleSet, b: &SampleSet) -> Result<f64> {
    a.nonempty()?;
    b.nonempty()?;
    let (x, y) = (a.values(), b.values());
    let (na, nb) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// One-sample Kolmogorov–Smirnov distance against a continuous `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let v = sorted(samples.to_vec());
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Two-sample KS critical value `c(α)·√((n+m)/(nm))`.
pub fn ks_critical(c_alpha: f64, n: usize, m: usize) -> f64 {
    c_alpha * (((n + m) as f64) / (n as f64 * m as f64)).sqrt()
}
