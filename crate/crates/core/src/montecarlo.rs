//! Trial orchestration for the probe and rate experiments.
//!
//! Every trial draws its own user placement and fading from keys derived from
//! the master seed and the trial index. Trials run on a rayon pool, results
//! are collected in trial order and then merged, so the outcome does not
//! depend on the number of workers.

use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::analytic::{interference_dist_single_beam, BeamSource, ClusterGeometryView, GammaParams};
use crate::beamform::{self, dbm_to_watts, PowerConfig, Scheme};
use crate::channel::{ChannelRealization, LinkScope, Schedule, ScheduledUser};
use crate::error::{Error, Result};
use crate::metrics::{self, SampleMeta, SampleSet, SinrSample};
use crate::rng::{Purpose, StreamKey};
use crate::topology::{build_lattice, place_users, NetworkTopology, PathLossModel, Point, UserSet};
use crate::{spatial_dof, SystemKind};

/// Environment variable capping the worker count (`0` or unset means all cores).
pub const THREADS_ENV: &str = "MIMO_DUEL_THREADS";

/// All simulation inputs, in linear units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// `C`
    pub num_clusters: usize,
    /// `B`
    pub bs_per_cluster: usize,
    /// `L` in metres.
    pub cluster_side: f64,
    /// `M`; LS-MIMO BSs carry `B·M`.
    pub antennas_per_bs: usize,
    /// `K`
    pub users_per_bs: usize,
    /// `K_T`
    pub users_per_cell: usize,
    pub alpha: f64,
    pub exclusion_radius: f64,
    /// `P_T` in watts.
    pub tx_power_w: f64,
    /// `N₀` in W/Hz.
    pub noise_density: f64,
    /// `W` in Hz.
    pub bandwidth_hz: f64,
    pub scheme: Scheme,
    pub trials: usize,
    pub seed: u64,
    /// Fixed probe location, as an offset from the centre of the centre cluster.
    pub probe: Option<Point>,
    /// Slots scheduled per user placement in rate experiments.
    pub slots_per_placement: usize,
}

impl SimulationConfig {
    /// Default network: 9 clusters of 4 cells, `K = 5` of `K_T = 60`, `M = 7` (`ζ = 9`); rate runs
    /// cover ten round-robin rounds per placement.
    pub fn table1() -> Self {
        Self {
            num_clusters: 9,
            bs_per_cluster: 4,
            cluster_side: 1000.0,
            antennas_per_bs: 7,
            users_per_bs: 5,
            users_per_cell: 60,
            alpha: 3.5,
            exclusion_radius: 10.0,
            tx_power_w: dbm_to_watts(43.0),
            noise_density: dbm_to_watts(-174.0),
            bandwidth_hz: 20e6,
            scheme: Scheme::Zf,
            trials: 10_000,
            seed: 1,
            probe: None,
            slots_per_placement: 120,
        }
    }

    /// Sets `M` so that `B(M − K) + 1 = ζ`.
    pub fn with_dof(mut self, zeta: usize) -> Result<Self> {
        let b = self.bs_per_cluster;
        if zeta == 0 || !(zeta - 1).is_multiple_of(b) {
            return Err(Error::config("dof", format!("ζ = {zeta} is not of the form B(M−K)+1 with B = {b}")));
        }
        self.antennas_per_bs = self.users_per_bs + (zeta - 1) / b;
        Ok(self)
    }

    pub fn dof(&self) -> Option<usize> {
        spatial_dof(self.bs_per_cluster, self.antennas_per_bs, self.users_per_bs)
    }

    pub fn validate(&self) -> Result<()> {
        build_lattice(self.num_clusters, self.bs_per_cluster, self.cluster_side)?;
        self.path_loss()?;
        self.power()?;
        if self.antennas_per_bs == 0 {
            return Err(Error::config("M", "antennas per BS must be positive"));
        }
        if self.users_per_bs == 0 || self.users_per_bs > self.antennas_per_bs {
            return Err(Error::config(
                "K",
                format!("need 1 ≤ K ≤ M, got K = {} and M = {}", self.users_per_bs, self.antennas_per_bs),
            ));
        }
        if self.users_per_cell == 0 || !self.users_per_cell.is_multiple_of(self.users_per_bs) {
            return Err(Error::config(
                "K_T",
                format!("K_T = {} is not a multiple of K = {}", self.users_per_cell, self.users_per_bs),
            ));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "at least one trial is required"));
        }
        if self.slots_per_placement == 0 {
            return Err(Error::config("slots", "at least one slot per placement is required"));
        }
        Ok(())
    }

    pub fn topology(&self) -> Result<NetworkTopology> {
        build_lattice(self.num_clusters, self.bs_per_cluster, self.cluster_side)
    }

    pub fn path_loss(&self) -> Result<PathLossModel> {
        PathLossModel::new(self.alpha, self.exclusion_radius)
    }

    pub fn power(&self) -> Result<PowerConfig> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::config("W", "bandwidth must be positive"));
        }
        PowerConfig::new(self.tx_power_w, self.noise_density * self.bandwidth_hz, self.users_per_bs)
    }

    /// Number of round-robin groups `K_T/K`.
    pub fn groups(&self) -> usize {
        self.users_per_cell / self.users_per_bs
    }

    /// FNV-1a over the debug rendering; stable for a given build.
    pub fn config_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in format!("{self:?}").bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h
    }
}

/// Users `{(t mod K_T/K)·K, …, +K−1}` of each cell, served in slot `t`.
pub fn round_robin_schedule(users_per_cell: usize, users_per_bs: usize, slot: usize) -> Result<Range<usize>> {
    if users_per_bs == 0 || !users_per_cell.is_multiple_of(users_per_bs) {
        return Err(Error::config(
            "K_T",
            format!("K_T = {users_per_cell} is not a multiple of K = {users_per_bs}"),
        ));
    }
    let start = (slot % (users_per_cell / users_per_bs)) * users_per_bs;
    Ok(start..start + users_per_bs)
}

/// Schedule of slot `slot` over a placement.
pub fn build_schedule(topo: &NetworkTopology, users: &UserSet, users_per_bs: usize, slot: usize) -> Result<Schedule> {
    let group = round_robin_schedule(users.users_per_cell, users_per_bs, slot)?;
    let mut out = Vec::with_capacity(topo.num_bs() * users_per_bs);
    for (g, bs) in topo.base_stations().iter().enumerate() {
        for id in group.clone() {
            let u = users.user(g, id);
            out.push(ScheduledUser {
                cluster: bs.cluster,
                cell: g,
                local_bs: bs.local,
                pos: u.pos,
                stream: (g * users.users_per_cell + id) as u64,
            });
        }
    }
    Schedule::new(out, topo.bs_per_cluster(), users_per_bs)
}

fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0)
}

const RESAMPLE_LIMIT: u64 = 8;

/// Runs `per_trial(trial, key_seed)` for `trials` trials and folds the
/// results in trial order. A trial that hits a singular channel is redrawn
/// with a fresh seed, at most a few times.
pub fn run_trials<T, F, M>(trials: usize, seed: u64, per_trial: F, init: T, mut merge: M) -> Result<T>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync,
    M: FnMut(T, T) -> T,
{
    let run = |t: u64| -> Result<T> {
        let mut attempt: u64 = 0;
        loop {
            let s = seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            match per_trial(t, s) {
                Err(Error::SingularChannel(_)) if attempt + 1 < RESAMPLE_LIMIT => attempt += 1,
                other => return other,
            }
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    let results: Vec<T> = pool.install(|| (0..trials as u64).into_par_iter().map(run).collect::<Result<Vec<_>>>())?;
    Ok(results.into_iter().fold(init, &mut merge))
}

/// Absolute probe location for an offset from the centre-cluster centre.
pub fn probe_position(topo: &NetworkTopology, offset: Point) -> Point {
    topo.cluster_center(topo.center_cluster()) + offset
}

/// Path losses from every cluster to a fixed position.
#[derive(Debug, Clone)]
pub struct ProbeGeometry {
    pub position: Point,
    pub cluster: usize,
    /// Global index of the serving BS.
    pub cell: usize,
    pub own: ClusterGeometryView,
    /// `(cluster, view)` for every other cluster.
    pub interferers: Vec<(usize, ClusterGeometryView)>,
}

impl ProbeGeometry {
    pub fn new(config: &SimulationConfig, position: Point) -> Result<Self> {
        let topo = config.topology()?;
        let model = config.path_loss()?;
        let cluster = topo.cluster_of(position);
        let view = |c: usize| -> Result<ClusterGeometryView> {
            let betas = topo
                .cluster_bs(c)
                .map(|bs| model.gain(topo.wrapped_distance(topo.bs(bs).pos, position)))
                .collect::<Result<Vec<_>>>()?;
            ClusterGeometryView::new(betas, config.antennas_per_bs)
        };
        let interferers = (0..topo.num_clusters())
            .filter(|&c| c != cluster)
            .map(|c| Ok((c, view(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { position, cluster, cell: topo.cell_of(position), own: view(cluster)?, interferers })
    }

    pub fn serving_beta(&self, topo: &NetworkTopology) -> f64 {
        self.own.betas()[self.cell - topo.cluster_bs(self.cluster).start]
    }

    /// Per-cluster interference laws, shared by both architectures.
    pub fn interference_laws(&self, kind: SystemKind, users_per_bs: usize) -> Result<Vec<GammaParams>> {
        self.interferers
            .iter()
            .map(|(_, v)| crate::analytic::cluster_interference_dist(kind, v, users_per_bs))
            .collect()
    }
}

/// One draw of the out-of-cluster interference in which every beam's power
/// comes from its single-beam law, independently across beams.
pub fn sample_beam_law_interference<R: Rng + ?Sized>(
    kind: SystemKind,
    interferers: &[ClusterGeometryView],
    users_per_bs: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut total = 0.0;
    for view in interferers {
        match kind {
            SystemKind::LsMimo => {
                for b in 0..view.bs_count() {
                    let law = interference_dist_single_beam(kind, view, BeamSource::Bs(b))?;
                    total += (0..users_per_bs).map(|_| law.sample(rng)).sum::<f64>();
                }
            }
            SystemKind::NetworkMimo => {
                let law = interference_dist_single_beam(kind, view, BeamSource::Cluster)?;
                total += (0..users_per_bs * view.bs_count()).map(|_| law.sample(rng)).sum::<f64>();
            }
        }
    }
    Ok(total)
}

/// `trials` draws of [`sample_beam_law_interference`] at a probe.
pub fn beam_law_interference_samples(
    kind: SystemKind,
    geometry: &ProbeGeometry,
    users_per_bs: usize,
    trials: usize,
    seed: u64,
) -> Result<SampleSet> {
    let views: Vec<ClusterGeometryView> = geometry.interferers.iter().map(|(_, v)| v.clone()).collect();
    let mut rng = StreamKey::new(seed, 0, 0).rng(Purpose::Auxiliary, kind as u64);
    let values = (0..trials)
        .map(|_| sample_beam_law_interference(kind, &views, users_per_bs, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSet::new(format!("{}_beam_law_interference", kind.tag()), values))
}

/// Per-kind samples at a fixed position.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProbeSamples {
    pub signal: SampleSet,
    pub interference: SampleSet,
    /// Interference broken down by source cluster, one entry per cluster.
    pub per_cluster: Vec<SampleSet>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeResult {
    pub position: Point,
    pub kinds: BTreeMap<SystemKind, ProbeSamples>,
    /// Largest `intra / signal` seen for ZF beams; zero up to rounding.
    pub max_zf_leakage: f64,
}

/// One trial's view at a probe.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub samples: Vec<SinrSample>,
    /// Per kind, per cluster interference at the probe.
    pub per_cluster: Vec<Vec<f64>>,
}

/// Fixed-location experiment: the probe takes the first scheduled slot of its
/// cell while all other users come from fresh placements.
pub fn run_probe_experiment(config: &SimulationConfig, offset: Point) -> Result<ProbeResult> {
    config.validate()?;
    let topo = config.topology()?;
    let model = config.path_loss()?;
    let power = config.power()?;
    let position = probe_position(&topo, offset);
    if topo.cluster_of(position) != topo.center_cluster() {
        return Err(Error::config("probe", format!("({}, {}) lies outside the centre cluster", offset.x, offset.y)));
    }
    model.gain(topo.wrapped_distance(topo.bs(topo.nearest_bs(position)).pos, position))?;
    let cell = topo.cell_of(position);
    let m = config.antennas_per_bs;
    let k = config.users_per_bs;
    let precoder = config.scheme.precoder(&power);
    let probe_stream = (topo.num_bs() * config.users_per_cell) as u64;
    let groups = config.groups();

    let per_trial = |trial: u64, seed: u64| -> Result<(TrialResult, f64)> {
        let key = StreamKey::new(seed, trial, 0);
        let users = place_users(&topo, config.users_per_cell, &model, &mut key.rng(Purpose::Placement, 0))?;
        let mut sched = build_schedule(&topo, &users, k, trial as usize % groups)?;
        let probe = cell * k;
        sched.replace(probe, position, probe_stream);
        let real = ChannelRealization::draw(
            &topo,
            &model,
            sched,
            config.bs_per_cluster * m,
            &LinkScope::Observed(vec![probe]),
            key,
        )?;
        let mut samples = Vec::with_capacity(2);
        let mut per_cluster = Vec::with_capacity(2);
        let mut leak: f64 = 0.0;
        for kind in SystemKind::ALL {
            let beams = beamform::build_beams(kind, precoder.as_ref(), &real, m)?;
            let s = metrics::sinr(kind, &real, &beams, probe, &power)?;
            if beams.scheme == Scheme::Zf && s.signal_power > 0.0 {
                leak = leak.max(s.intra_power / s.signal_power);
            }
            samples.push(s);
            per_cluster.push(metrics::interference_by_cluster(kind, &real, &beams, probe)?);
        }
        Ok((TrialResult { samples, per_cluster }, leak))
    };

    let (trials, leak) = run_trials(
        config.trials,
        config.seed,
        |t, s| per_trial(t, s).map(|r| (vec![r.0], r.1)),
        (Vec::with_capacity(config.trials), 0.0f64),
        |(mut acc, l), (mut next, nl)| {
            acc.append(&mut next);
            (acc, l.max(nl))
        },
    )?;

    let meta = |quantity: String| SampleMeta {
        quantity,
        location: Some(offset),
        config_hash: config.config_hash(),
        seed_range: (0, config.trials as u64),
    };
    let mut kinds = BTreeMap::new();
    for (ki, kind) in SystemKind::ALL.into_iter().enumerate() {
        let signal = trials.iter().map(|t| t.samples[ki].signal_power).collect();
        let interference = trials.iter().map(|t| t.samples[ki].interference_power).collect();
        let per_cluster = (0..topo.num_clusters())
            .map(|c| {
                SampleSet::with_meta(
                    meta(format!("{}_interference_cluster{c}", kind.tag())),
                    trials.iter().map(|t| t.per_cluster[ki][c]).collect(),
                )
            })
            .collect();
        kinds.insert(
            kind,
            ProbeSamples {
                signal: SampleSet::with_meta(meta(format!("{}_signal", kind.tag())), signal),
                interference: SampleSet::with_meta(meta(format!("{}_interference", kind.tag())), interference),
                per_cluster,
            },
        );
    }
    Ok(ProbeResult { position, kinds, max_zf_leakage: leak })
}

/// Rates of centre-cluster users per `(kind, scheme)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateResult {
    /// Instantaneous `log₂(1 + γ)` per scheduled slot.
    pub rates: BTreeMap<(SystemKind, Scheme), SampleSet>,
    /// Per-user ergodic rate: the mean of a user's instantaneous rates over
    /// the slots it was scheduled in during one placement.
    pub user_rates: BTreeMap<(SystemKind, Scheme), SampleSet>,
    pub max_zf_leakage: f64,
    /// Largest deviation of any cluster's radiated power from `B·P_T`,
    /// relative to `B·P_T`.
    pub max_power_error: f64,
}

impl RateResult {
    pub fn get(&self, kind: SystemKind, scheme: Scheme) -> Option<&SampleSet> {
        self.rates.get(&(kind, scheme))
    }

    pub fn user(&self, kind: SystemKind, scheme: Scheme) -> Option<&SampleSet> {
        self.user_rates.get(&(kind, scheme))
    }
}

/// Round-robin experiment: every trial is a placement followed by
/// `slots_per_placement` slots; all centre-cluster users are recorded for
/// both architectures and each requested scheme on shared channels.
pub fn run_rate_experiment(config: &SimulationConfig, schemes: &[Scheme]) -> Result<RateResult> {
    config.validate()?;
    if schemes.is_empty() {
        return Err(Error::config("scheme", "no beamforming scheme requested"));
    }
    let topo = config.topology()?;
    let model = config.path_loss()?;
    let power = config.power()?;
    let m = config.antennas_per_bs;
    let k = config.users_per_bs;
    let center = topo.center_cluster();
    let precoders: Vec<_> = schemes.iter().map(|s| s.precoder(&power)).collect();
    let combos: Vec<(SystemKind, usize)> =
        SystemKind::ALL.into_iter().flat_map(|kind| (0..schemes.len()).map(move |s| (kind, s))).collect();
    let nominal = config.bs_per_cluster as f64 * config.tx_power_w;
    let per_beam = power.per_beam_power(k);

    type Acc = (Vec<Vec<f64>>, Vec<Vec<f64>>, f64, f64);
    let per_trial = |trial: u64, seed: u64| -> Result<Acc> {
        let placement = StreamKey::new(seed, trial, 0);
        let users = place_users(&topo, config.users_per_cell, &model, &mut placement.rng(Purpose::Placement, 0))?;
        let mut rates = vec![Vec::new(); combos.len()];
        let mut per_user: Vec<BTreeMap<u64, (f64, usize)>> = vec![BTreeMap::new(); combos.len()];
        let mut leak: f64 = 0.0;
        let mut perr: f64 = 0.0;
        for slot in 0..config.slots_per_placement {
            let sched = build_schedule(&topo, &users, k, slot)?;
            let observed: Vec<usize> = sched.cluster_users(center).collect();
            let real = ChannelRealization::draw(
                &topo,
                &model,
                sched,
                config.bs_per_cluster * m,
                &LinkScope::Observed(observed.clone()),
                StreamKey::new(seed, trial, slot as u64 + 1),
            )?;
            for (ci, &(kind, si)) in combos.iter().enumerate() {
                let beams = beamform::build_beams(kind, precoders[si].as_ref(), &real, m)?;
                perr = perr.max((beams.cluster_power(center, per_beam) - nominal).abs() / nominal);
                for &u in &observed {
                    let s = metrics::sinr(kind, &real, &beams, u, &power)?;
                    if beams.scheme == Scheme::Zf && s.signal_power > 0.0 {
                        leak = leak.max(s.intra_power / s.signal_power);
                    }
                    let r = s.rate();
                    rates[ci].push(r);
                    let e = per_user[ci].entry(real.schedule().user(u).stream).or_insert((0.0, 0));
                    e.0 += r;
                    e.1 += 1;
                }
            }
        }
        let users = per_user.into_iter().map(|m| m.into_values().map(|(sum, n)| sum / n as f64).collect()).collect();
        Ok((rates, users, leak, perr))
    };

    let empty = vec![Vec::new(); combos.len()];
    let (rates, users, leak, perr) = run_trials(
        config.trials,
        config.seed,
        per_trial,
        (empty.clone(), empty, 0.0, 0.0),
        |(mut acc, mut uacc, l, p), (next, unext, nl, np)| {
            for (a, n) in acc.iter_mut().zip(next) {
                a.extend(n);
            }
            for (a, n) in uacc.iter_mut().zip(unext) {
                a.extend(n);
            }
            (acc, uacc, l.max(nl), p.max(np))
        },
    )?;

    let meta = |kind: SystemKind, scheme: Scheme, what: &str| SampleMeta {
        quantity: format!("{}_{}_{what}", kind.tag(), scheme.tag()),
        location: None,
        config_hash: config.config_hash(),
        seed_range: (0, config.trials as u64),
    };
    let mut out = BTreeMap::new();
    let mut user_out = BTreeMap::new();
    for (((kind, si), values), uvalues) in combos.into_iter().zip(rates).zip(users) {
        let scheme = schemes[si];
        out.insert((kind, scheme), SampleSet::with_meta(meta(kind, scheme, "rate"), values));
        user_out.insert((kind, scheme), SampleSet::with_meta(meta(kind, scheme, "user_rate"), uvalues));
    }
    Ok(RateResult { rates: out, user_rates: user_out, max_zf_leakage: leak, max_power_error: perr })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimulationConfig {
        SimulationConfig { trials: 24, slots_per_placement: 12, ..SimulationConfig::table1() }
    }

    #[test]
    fn table1_preset() {
        let c = SimulationConfig::table1();
        c.validate().unwrap();
        assert_eq!((c.num_clusters, c.bs_per_cluster, c.users_per_bs, c.users_per_cell), (9, 4, 5, 60));
        assert_eq!(c.groups(), 12);
        assert_eq!(c.dof(), Some(9));
        for (zeta, m) in [(1, 5), (5, 6), (9, 7)] {
            let d = c.clone().with_dof(zeta).unwrap();
            assert_eq!(d.antennas_per_bs, m);
            assert_eq!(d.antennas_per_bs * d.bs_per_cluster, [20, 24, 28][(zeta - 1) / 4]);
        }
        assert!(c.clone().with_dof(3).is_err());
        let bad = SimulationConfig { users_per_bs: 7, antennas_per_bs: 5, ..c.clone() };
        assert!(matches!(bad.validate(), Err(Error::Config { key, .. }) if key == "K"));
        let bad = SimulationConfig { users_per_cell: 61, ..c };
        assert!(matches!(bad.validate(), Err(Error::Config { key, .. }) if key == "K_T"));
    }

    #[test]
    fn round_robin_counts() {
        let mut seen = vec![0; 60];
        for t in 0..24 {
            let g = round_robin_schedule(60, 5, t).unwrap();
            assert_eq!(g.len(), 5);
            g.for_each(|u| seen[u] += 1);
        }
        assert!(seen.iter().all(|&c| c == 2));
        assert_eq!(round_robin_schedule(5, 5, 7).unwrap(), 0..5);
        assert!(round_robin_schedule(61, 5, 0).is_err());
    }

    #[test]
    fn run_trials_is_ordered_and_thread_independent() {
        let f = |t: u64, s: u64| Ok(vec![t ^ s]);
        let cat = |mut a: Vec<u64>, b: Vec<u64>| {
            a.extend(b);
            a
        };
        let a = run_trials(100, 7, f, Vec::new(), cat).unwrap();
        assert_eq!(a, (0..100).map(|t| t ^ 7).collect::<Vec<_>>());
        let retried = std::sync::atomic::AtomicUsize::new(0);
        let g = |t: u64, s: u64| {
            if t == 3 && s == 7 {
                retried.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                Err(Error::SingularChannel("test".into()))
            } else {
                Ok(vec![t])
            }
        };
        let b = run_trials(5, 7, g, Vec::new(), cat).unwrap();
        assert_eq!(b, vec![0, 1, 2, 3, 4]);
        assert_eq!(retried.into_inner(), 1);
    }

    #[test]
    fn probe_experiment_is_deterministic() {
        let c = small();
        let a = run_probe_experiment(&c, Point::new(15.0, 15.0)).unwrap();
        let b = run_probe_experiment(&c, Point::new(15.0, 15.0)).unwrap();
        assert_eq!(a.kinds, b.kinds);
        for s in a.kinds.values() {
            assert_eq!(s.signal.len(), 24);
            assert_eq!(s.interference.len(), 24);
            let total: f64 = s.per_cluster.iter().map(|p| p.mean().unwrap()).sum();
            assert!((total / s.interference.mean().unwrap() - 1.0).abs() < 1e-9);
        }
        assert!(a.max_zf_leakage < 1e-16, "{}", a.max_zf_leakage);
        let p = a.position;
        assert_eq!((p.x, p.y), (1515.0, 1515.0));
        assert!(run_probe_experiment(&c, Point::new(600.0, 0.0)).is_err());
    }

    #[test]
    fn rate_experiment_small() {
        let c = SimulationConfig { trials: 2, slots_per_placement: 3, ..SimulationConfig::table1() };
        let r = run_rate_experiment(&c, &[Scheme::Zf, Scheme::Rzf]).unwrap();
        assert_eq!(r.rates.len(), 4);
        for s in r.rates.values() {
            assert_eq!(s.len(), 2 * 3 * 20);
        }
        assert!(r.max_zf_leakage < 1e-16);
        assert!(r.max_power_error < 1e-12);
        let again = run_rate_experiment(&c, &[Scheme::Zf, Scheme::Rzf]).unwrap();
        assert_eq!(r.rates, again.rates);
        assert_eq!(r.user_rates, again.user_rates);
    }

    #[test]
    fn user_rates_average_over_rounds() {
        let c = SimulationConfig { trials: 1, slots_per_placement: 24, ..SimulationConfig::table1() };
        let r = run_rate_experiment(&c, &[Scheme::Zf]).unwrap();
        for kind in SystemKind::ALL {
            let inst = r.get(kind, Scheme::Zf).unwrap();
            let user = r.user(kind, Scheme::Zf).unwrap();
            assert_eq!(inst.len(), 24 * 20);
            assert_eq!(user.len(), 240);
            assert!((inst.mean().unwrap() / user.mean().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn beam_law_sampling_matches_cluster_law_means() {
        let c = SimulationConfig::table1();
        let topo = c.topology().unwrap();
        let g = ProbeGeometry::new(&c, probe_position(&topo, Point::new(15.0, 15.0))).unwrap();
        let want: f64 = g.interference_laws(SystemKind::LsMimo, 5).unwrap().iter().map(GammaParams::mean).sum();
        for kind in SystemKind::ALL {
            let s = beam_law_interference_samples(kind, &g, 5, 20_000, 3).unwrap();
            assert!((s.mean().unwrap() / want - 1.0).abs() < 0.02, "{kind}");
        }
    }

    #[test]
    fn probe_geometry_dominance() {
        let c = SimulationConfig::table1();
        let topo = c.topology().unwrap();
        let g = ProbeGeometry::new(&c, probe_position(&topo, Point::new(235.0, 235.0))).unwrap();
        assert_eq!(g.interferers.len(), 8);
        let nm = crate::analytic::signal_dist_nm(4, 7, 20, g.own.betas()).unwrap();
        let lsm = crate::analytic::signal_dist_lsm(4, 7, 20, g.serving_beta(&topo)).unwrap();
        assert!(lsm.shape > nm.shape && lsm.scale > nm.scale);
    }
}
