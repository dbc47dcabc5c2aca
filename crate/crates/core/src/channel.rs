//! Rayleigh block fading and channel-matrix assembly.
//!
//! Fading is drawn once per physical (BS, user) link with `N_t` entries, where
//! `N_t` is the largest per-BS antenna count in the comparison (`B·M` for
//! LS-MIMO). A network-MIMO BS with `M` antennas uses the first `M` entries of
//! the same link, so both architectures run on common random numbers.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{Purpose, StreamKey};
use crate::topology::{NetworkTopology, PathLossModel, Point};
use crate::{CMatrix, SystemKind, C64};

/// I.i.d. `CN(0,1)` entries: real and imaginary parts each have variance 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingBlock {
    pub entries: CMatrix,
}

pub fn draw_fading<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> FadingBlock {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let entries = CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    FadingBlock { entries }
}

fn fill_fading<R: Rng + ?Sized>(rng: &mut R, out: &mut [C64]) {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    for z in out {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = C64::new(re * scale, im * scale);
    }
}

/// A user scheduled in the current slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledUser {
    pub cluster: usize,
    /// Global index of the serving BS.
    pub cell: usize,
    /// Index of the serving BS inside its cluster.
    pub local_bs: usize,
    pub pos: Point,
    /// Identity of the physical user; selects its fading streams.
    pub stream: u64,
}

/// The `K_c = B·K` users served in each cluster during one slot, ordered by
/// serving BS and then by position in that BS's group.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub users_per_bs: usize,
    pub bs_per_cluster: usize,
    users: Vec<ScheduledUser>,
}

impl Schedule {
    /// `users` must be grouped by cluster, `B·K` per cluster, in BS order.
    pub fn new(users: Vec<ScheduledUser>, bs_per_cluster: usize, users_per_bs: usize) -> Result<Self> {
        let kc = bs_per_cluster * users_per_bs;
        if kc == 0 || !users.len().is_multiple_of(kc) {
            return Err(Error::Shape(format!(
                "{} scheduled users do not fill clusters of {kc}",
                users.len()
            )));
        }
        for (i, u) in users.iter().enumerate() {
            let (cluster, rem) = (i / kc, i % kc);
            if u.cluster != cluster || u.local_bs != rem / users_per_bs {
                return Err(Error::Shape(format!("scheduled user {i} is out of order")));
            }
        }
        Ok(Self {
            users_per_bs,
            bs_per_cluster,
            users,
        })
    }

    pub fn users_per_cluster(&self) -> usize {
        self.users_per_bs * self.bs_per_cluster
    }

    pub fn num_clusters(&self) -> usize {
        self.users.len() / self.users_per_cluster()
    }

    pub fn users(&self) -> &[ScheduledUser] {
        &self.users
    }

    pub fn user(&self, index: usize) -> &ScheduledUser {
        &self.users[index]
    }

    /// Index range (into [`Schedule::users`]) of the users of `cluster`.
    pub fn cluster_users(&self, cluster: usize) -> std::ops::Range<usize> {
        let kc = self.users_per_cluster();
        cluster * kc..(cluster + 1) * kc
    }

    /// Columns of the cluster-level channel matrix owned by BS `local`.
    pub fn owned_columns(&self, local: usize) -> std::ops::Range<usize> {
        local * self.users_per_bs..(local + 1) * self.users_per_bs
    }

    /// Replace the scheduled user at `index`, keeping its cluster and cell.
    pub fn replace(&mut self, index: usize, pos: Point, stream: u64) {
        let u = &mut self.users[index];
        u.pos = pos;
        u.stream = stream;
    }
}

/// Which links get drawn beyond the intra-cluster ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkScope {
    /// Every BS to every scheduled user.
    All,
    /// Intra-cluster links plus links from every BS to the listed users
    /// (indices into the schedule).
    Observed(Vec<usize>),
}

const STREAM_STRIDE: u64 = 1 << 32;
const NOT_DRAWN: usize = usize::MAX;

/// Small-scale fading and path loss for one slot.
///
/// Link `(bs, user)` stores the gain vector `√β·h` of length `antennas`.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    antennas: usize,
    num_bs: usize,
    bs_per_cluster: usize,
    schedule: Schedule,
    beta: Vec<f64>,
    offsets: Vec<usize>,
    data: Vec<C64>,
}

impl ChannelRealization {
    pub fn draw(
        topo: &NetworkTopology,
        model: &PathLossModel,
        schedule: Schedule,
        antennas: usize,
        scope: &LinkScope,
        key: StreamKey,
    ) -> Result<Self> {
        if antennas == 0 {
            return Err(Error::Shape("links need at least one antenna".into()));
        }
        if schedule.bs_per_cluster != topo.bs_per_cluster() || schedule.num_clusters() != topo.num_clusters() {
            return Err(Error::Shape("schedule does not match the topology".into()));
        }
        let num_bs = topo.num_bs();
        let nu = schedule.users().len();
        let mut beta = Vec::with_capacity(num_bs * nu);
        for bs in topo.base_stations() {
            for u in schedule.users() {
                beta.push(model.gain(topo.wrapped_distance(bs.pos, u.pos))?);
            }
        }

        let mut wanted = vec![false; num_bs * nu];
        for (ui, u) in schedule.users().iter().enumerate() {
            for bs in topo.cluster_bs(u.cluster) {
                wanted[bs * nu + ui] = true;
            }
        }
        match scope {
            LinkScope::All => wanted.iter_mut().for_each(|w| *w = true),
            LinkScope::Observed(list) => {
                for &ui in list {
                    if ui >= nu {
                        return Err(Error::Usage(format!("observed user {ui} is not scheduled")));
                    }
                    for bs in 0..num_bs {
                        wanted[bs * nu + ui] = true;
                    }
                }
            }
        }

        let count = wanted.iter().filter(|&&w| w).count();
        let mut offsets = vec![NOT_DRAWN; num_bs * nu];
        let mut data = vec![C64::new(0.0, 0.0); count * antennas];
        let mut next = 0;
        for bs in 0..num_bs {
            for (ui, u) in schedule.users().iter().enumerate() {
                let idx = bs * nu + ui;
                if !wanted[idx] {
                    continue;
                }
                let start = next * antennas;
                let slice = &mut data[start..start + antennas];
                let mut rng = key.rng(Purpose::Fading, bs as u64 * STREAM_STRIDE + u.stream);
                fill_fading(&mut rng, slice);
                let amp = beta[idx].sqrt();
                slice.iter_mut().for_each(|z| *z *= amp);
                offsets[idx] = start;
                next += 1;
            }
        }

        Ok(Self {
            antennas,
            num_bs,
            bs_per_cluster: topo.bs_per_cluster(),
            schedule,
            beta,
            offsets,
            data,
        })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn bs_per_cluster(&self) -> usize {
        self.bs_per_cluster
    }

    fn index(&self, bs: usize, user: usize) -> usize {
        bs * self.schedule.users().len() + user
    }

    pub fn beta(&self, bs: usize, user: usize) -> f64 {
        self.beta[self.index(bs, user)]
    }

    pub fn has_link(&self, bs: usize, user: usize) -> bool {
        self.offsets[self.index(bs, user)] != NOT_DRAWN
    }

    /// First `n` entries of the gain vector from `bs` to `user`.
    pub fn link(&self, bs: usize, user: usize, n: usize) -> Result<&[C64]> {
        if n > self.antennas {
            return Err(Error::Shape(format!(
                "{n} antennas requested but links carry {}",
                self.antennas
            )));
        }
        match self.offsets[self.index(bs, user)] {
            NOT_DRAWN => Err(Error::Usage(format!("link BS {bs} -> user {user} was not drawn"))),
            start => Ok(&self.data[start..start + n]),
        }
    }

    /// Per-BS antenna block length for `kind` with `m` antennas per
    /// network-MIMO BS.
    pub fn antennas_per_bs(&self, kind: SystemKind, m: usize) -> usize {
        kind.antennas_per_bs(self.bs_per_cluster, m)
    }

    /// LS-MIMO compound channel `G_bl`: `B·M × K_c`, column `k` is the link
    /// from BS `bs` to the `k`-th user of its cluster.
    pub fn compound_lsm(&self, bs: usize, m: usize) -> Result<CMatrix> {
        let cluster = bs / self.bs_per_cluster;
        let rows = self.bs_per_cluster * m;
        let cols = self.schedule.cluster_users(cluster);
        let mut g = CMatrix::zeros(rows, cols.len());
        for (c, ui) in cols.enumerate() {
            let v = self.link(bs, ui, rows)?;
            g.column_mut(c).iter_mut().zip(v).for_each(|(d, s)| *d = *s);
        }
        Ok(g)
    }

    /// Stacked vector `[g_{1}; …; g_{B}]` from the `B` BSs of `cluster` to
    /// `user`, `m` entries per BS.
    pub fn stacked(&self, cluster: usize, user: usize, m: usize) -> Result<Vec<C64>> {
        let mut v = Vec::with_capacity(self.bs_per_cluster * m);
        for local in 0..self.bs_per_cluster {
            v.extend_from_slice(self.link(cluster * self.bs_per_cluster + local, user, m)?);
        }
        Ok(v)
    }

    /// Network-MIMO composite channel `G_l`: `B·M × K_c`.
    pub fn composite_nm(&self, cluster: usize, m: usize) -> Result<CMatrix> {
        let cols = self.schedule.cluster_users(cluster);
        let rows = self.bs_per_cluster * m;
        let mut g = CMatrix::zeros(rows, cols.len());
        for (c, ui) in cols.enumerate() {
            let v = self.stacked(cluster, ui, m)?;
            g.column_mut(c).iter_mut().zip(&v).for_each(|(d, s)| *d = *s);
        }
        Ok(g)
    }

    /// Channel the user sees from its own serving side: the `B·M` link from
    /// its BS (LS-MIMO) or the stacked cluster vector (network MIMO).
    pub fn serving_channel(&self, kind: SystemKind, user: usize, m: usize) -> Result<Vec<C64>> {
        let u = self.schedule.user(user);
        match kind {
            SystemKind::LsMimo => Ok(self.link(u.cell, user, self.bs_per_cluster * m)?.to_vec()),
            SystemKind::NetworkMimo => self.stacked(u.cluster, user, m),
        }
    }

    /// Interference channel towards `user` from an out-of-cluster source.
    pub fn interference_channel(&self, user: usize, source: Source, kind: SystemKind, m: usize) -> Result<Vec<C64>> {
        let own = self.schedule.user(user).cluster;
        match (kind, source) {
            (SystemKind::LsMimo, Source::Bs(bs)) => {
                if bs / self.bs_per_cluster == own {
                    return Err(Error::Usage(format!("BS {bs} is inside the user's cluster")));
                }
                Ok(self.link(bs, user, self.bs_per_cluster * m)?.to_vec())
            }
            (SystemKind::NetworkMimo, Source::Cluster(j)) => {
                if j == own {
                    return Err(Error::Usage(format!("cluster {j} is the user's own cluster")));
                }
                self.stacked(j, user, m)
            }
            (kind, source) => Err(Error::Usage(format!("{source:?} is not an interference source for {kind}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Bs(usize),
    Cluster(usize),
}
