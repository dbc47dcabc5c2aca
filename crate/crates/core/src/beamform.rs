//! ZF and RZF downlink precoders.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::{CMatrix, SystemKind, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    Zf,
    Rzf,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Zf, Scheme::Rzf];

    pub fn tag(self) -> &'static str {
        match self {
            Scheme::Zf => "zf",
            Scheme::Rzf => "rzf",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Transmit power and noise in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    /// Per-BS transmit power `P_T`.
    pub tx_power_w: f64,
    /// Noise power `N₀·W`.
    pub sigma2: f64,
    /// `P_T/(K·σ²)`, the SNR carried by one beam.
    pub rho: f64,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

impl PowerConfig {
    pub fn new(tx_power_w: f64, sigma2: f64, users_per_bs: usize) -> Result<Self> {
        if !(tx_power_w > 0.0 && tx_power_w.is_finite()) {
            return Err(Error::config("P_T", "transmit power must be positive"));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::config("N0", "noise power must be positive"));
        }
        if users_per_bs == 0 {
            return Err(Error::config("K", "at least one user per BS is required"));
        }
        let rho = tx_power_w / (users_per_bs as f64 * sigma2);
        Ok(Self { tx_power_w, sigma2, rho })
    }

    /// From `P_T` in dBm, noise density in dBm/Hz and bandwidth in Hz.
    pub fn from_dbm(p_t_dbm: f64, n0_dbm_hz: f64, bandwidth_hz: f64, users_per_bs: usize) -> Result<Self> {
        if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
            return Err(Error::config("W", "bandwidth must be positive"));
        }
        Self::new(dbm_to_watts(p_t_dbm), dbm_to_watts(n0_dbm_hz) * bandwidth_hz, users_per_bs)
    }

    pub fn per_beam_power(&self, users_per_bs: usize) -> f64 {
        self.tx_power_w / users_per_bs as f64
    }

    /// Regularisation used by RZF, `1/ρ`.
    pub fn rzf_reg(&self) -> f64 {
        1.0 / self.rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Owner {
    /// Global BS index (LS-MIMO).
    Bs(usize),
    /// Cluster index (network MIMO).
    Cluster(usize),
}

/// Beams transmitted by one BS or one cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    /// One beam per column.
    pub beams: CMatrix,
    pub owner: Owner,
    pub scheme: Scheme,
    /// Column of the channel matrix (cluster-local user index) each beam serves.
    pub users: Vec<usize>,
}

impl BeamformerSet {
    pub fn beam(&self, i: usize) -> &[C64] {
        let rows = self.beams.nrows();
        &self.beams.as_slice()[i * rows..(i + 1) * rows]
    }

    pub fn len(&self) -> usize {
        self.beams.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.ncols() == 0
    }
}

pub fn normalize_columns(w: &mut CMatrix) {
    for mut col in w.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col.unscale_mut(n);
        }
    }
}

fn check_rank(r: &CMatrix, g: &CMatrix) -> Result<()> {
    let largest = g.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tol = 1e-10 * largest;
    for i in 0..r.ncols() {
        if !(r[(i, i)].norm() > tol) {
            return Err(Error::SingularChannel(format!(
                "pivot {i} is {:.3e}, below tolerance {tol:.3e}",
                r[(i, i)].norm()
            )));
        }
    }
    Ok(())
}

/// Unnormalised `G(GᴴG)⁻¹` via `G = QR`, which gives `Q·R⁻ᴴ`.
pub fn pseudo_inverse_beams(g: &CMatrix) -> Result<CMatrix> {
    let (rows, cols) = g.shape();
    if cols == 0 || rows < cols {
        return Err(Error::Shape(format!("ZF needs at least as many antennas as users, got {rows}×{cols}")));
    }
    let qr = g.clone().qr();
    let r = qr.r();
    check_rank(&r, g)?;
    let rinv_h = r
        .adjoint()
        .solve_lower_triangular(&CMatrix::identity(cols, cols))
        .ok_or_else(|| Error::SingularChannel("triangular factor is singular".into()))?;
    Ok(qr.q() * rinv_h)
}

/// Unnormalised `G(GᴴG + reg·I)⁻¹` via the QR of `[G; √reg·I]`.
pub fn regularized_beams(g: &CMatrix, reg: f64) -> Result<CMatrix> {
    if !(reg > 0.0 && reg.is_finite()) {
        return Err(Error::Domain(format!("RZF regularisation must be positive, got {reg}")));
    }
    let (rows, cols) = g.shape();
    if cols == 0 {
        return Err(Error::Shape("RZF needs at least one user".into()));
    }
    let mut aug = CMatrix::zeros(rows + cols, cols);
    aug.rows_mut(0, rows).copy_from(g);
    let s = C64::new(reg.sqrt(), 0.0);
    for i in 0..cols {
        aug[(rows + i, i)] = s;
    }
    let r = aug.qr().r();
    let y = r
        .adjoint()
        .solve_lower_triangular(&CMatrix::identity(cols, cols))
        .ok_or_else(|| Error::SingularChannel("regularised factor is singular".into()))?;
    let z = r
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::SingularChannel("regularised factor is singular".into()))?;
    Ok(g * z)
}

/// A precoder maps a `BM × K_c` channel matrix to `K_c` beams.
pub trait Precoder: Sync {
    fn scheme(&self) -> Scheme;
    fn precode(&self, g: &CMatrix) -> Result<CMatrix>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroForcing;

impl Precoder for ZeroForcing {
    fn scheme(&self) -> Scheme {
        Scheme::Zf
    }

    fn precode(&self, g: &CMatrix) -> Result<CMatrix> {
        let mut w = pseudo_inverse_beams(g)?;
        normalize_columns(&mut w);
        Ok(w)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RegularizedZeroForcing {
    pub reg: f64,
}

impl Precoder for RegularizedZeroForcing {
    fn scheme(&self) -> Scheme {
        Scheme::Rzf
    }

    fn precode(&self, g: &CMatrix) -> Result<CMatrix> {
        let mut w = regularized_beams(g, self.reg)?;
        normalize_columns(&mut w);
        Ok(w)
    }
}

impl Scheme {
    pub fn precoder(self, power: &PowerConfig) -> Box<dyn Precoder> {
        match self {
            Scheme::Zf => Box::new(ZeroForcing),
            Scheme::Rzf => Box::new(RegularizedZeroForcing { reg: power.rzf_reg() }),
        }
    }
}

fn select(precoder: &dyn Precoder, g: &CMatrix, owned: Range<usize>, owner: Owner) -> Result<BeamformerSet> {
    if owned.end > g.ncols() || owned.is_empty() {
        return Err(Error::Shape(format!("owned columns {owned:?} outside 0..{}", g.ncols())));
    }
    let w = precoder.precode(g)?;
    Ok(BeamformerSet {
        beams: w.columns(owned.start, owned.len()).into_owned(),
        owner,
        scheme: precoder.scheme(),
        users: owned.collect(),
    })
}

/// ZF beams of one LS-MIMO BS: the `owned` columns of `G_bl(G_blᴴG_bl)⁻¹`.
pub fn zf_beams_lsm(g_bl: &CMatrix, owned: Range<usize>, bs: usize) -> Result<BeamformerSet> {
    select(&ZeroForcing, g_bl, owned, Owner::Bs(bs))
}

/// ZF beams of one network-MIMO cluster for all its users.
pub fn zf_beams_nm(g_l: &CMatrix, cluster: usize) -> Result<BeamformerSet> {
    select(&ZeroForcing, g_l, 0..g_l.ncols(), Owner::Cluster(cluster))
}

/// RZF beams for all columns of `g`.
pub fn rzf_beams(g: &CMatrix, reg: f64, owner: Owner) -> Result<BeamformerSet> {
    select(&RegularizedZeroForcing { reg }, g, 0..g.ncols(), owner)
}

/// Beams of every transmitter in the network for one slot.
#[derive(Debug, Clone)]
pub struct NetworkBeams {
    pub kind: SystemKind,
    pub scheme: Scheme,
    /// Indexed by global BS (LS-MIMO) or by cluster (network MIMO).
    pub sets: Vec<BeamformerSet>,
    bs_per_cluster: usize,
    users_per_bs: usize,
}

impl NetworkBeams {
    /// Transmitters of `cluster` with their sets.
    pub fn cluster_sets(&self, cluster: usize) -> &[BeamformerSet] {
        match self.kind {
            SystemKind::LsMimo => &self.sets[cluster * self.bs_per_cluster..(cluster + 1) * self.bs_per_cluster],
            SystemKind::NetworkMimo => std::slice::from_ref(&self.sets[cluster]),
        }
    }

    /// Set and column carrying the beam of cluster-local user `local_user`
    /// in `cluster`.
    pub fn locate(&self, cluster: usize, local_user: usize) -> (&BeamformerSet, usize) {
        match self.kind {
            SystemKind::LsMimo => {
                let b = local_user / self.users_per_bs;
                (&self.sets[cluster * self.bs_per_cluster + b], local_user % self.users_per_bs)
            }
            SystemKind::NetworkMimo => (&self.sets[cluster], local_user),
        }
    }

    pub fn owner_cluster(&self, set: &BeamformerSet) -> usize {
        match set.owner {
            Owner::Bs(bs) => bs / self.bs_per_cluster,
            Owner::Cluster(c) => c,
        }
    }

    /// Total radiated power of `cluster` with `per_beam` watts on each beam.
    pub fn cluster_power(&self, cluster: usize, per_beam: f64) -> f64 {
        self.cluster_sets(cluster)
            .iter()
            .map(|s| s.beams.norm_squared() * per_beam)
            .sum()
    }
}

/// Builds the beams of every BS (LS-MIMO) or cluster (network MIMO).
pub fn build_beams(
    kind: SystemKind,
    precoder: &dyn Precoder,
    realization: &ChannelRealization,
    m: usize,
) -> Result<NetworkBeams> {
    let sched = realization.schedule();
    let b = realization.bs_per_cluster();
    let k = sched.users_per_bs;
    let sets = match kind {
        SystemKind::LsMimo => (0..realization.num_bs())
            .map(|bs| {
                let g = realization.compound_lsm(bs, m)?;
                select(precoder, &g, sched.owned_columns(bs % b), Owner::Bs(bs))
            })
            .collect::<Result<Vec<_>>>()?,
        SystemKind::NetworkMimo => (0..sched.num_clusters())
            .map(|c| {
                let g = realization.composite_nm(c, m)?;
                select(precoder, &g, 0..g.ncols(), Owner::Cluster(c))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(NetworkBeams { kind, scheme: precoder.scheme(), sets, bs_per_cluster: b, users_per_bs: k })
}

/// Worst `|g_kᴴw_i|²/‖g_k‖²` over beams of `set` and columns `k` of `g` other
/// than the beam's own user.
pub fn max_leakage(g: &CMatrix, set: &BeamformerSet) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, &own) in set.users.iter().enumerate() {
        let w = set.beams.column(i);
        for k in 0..g.ncols() {
            if k == own {
                continue;
            }
            let col = g.column(k);
            let p = col.dotc(&w).norm_sqr() / col.norm_squared();
            worst = worst.max(p);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::draw_fading;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_g(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        draw_fading(&mut rng, rows, cols).entries
    }

    fn cosine_distance(a: &[C64], b: &[C64]) -> f64 {
        let dot: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
        let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        1.0 - dot.norm() / (na * nb)
    }

    /// Independent `G (GᴴG)⁻¹` through the normal equations and an LU solve.
    fn normal_equations(g: &CMatrix) -> CMatrix {
        let gram = g.adjoint() * g;
        let inv = gram.lu().try_inverse().unwrap();
        g * inv
    }

    #[test]
    fn zf_matches_normal_equations() {
        for seed in 0..20 {
            let g = random_g(3, 2, seed);
            let set = zf_beams_nm(&g, 0).unwrap();
            let mut oracle = normal_equations(&g);
            normalize_columns(&mut oracle);
            for i in 0..2 {
                let o: Vec<C64> = oracle.column(i).iter().copied().collect();
                assert!(cosine_distance(set.beam(i), &o) < 1e-10);
            }
        }
    }

    #[test]
    fn zf_nulls_the_cluster() {
        let g = random_g(20, 20, 5);
        for b in 0..4 {
            let set = zf_beams_lsm(&g, b * 5..b * 5 + 5, b).unwrap();
            assert_eq!(set.users, (b * 5..b * 5 + 5).collect::<Vec<_>>());
            assert!(max_leakage(&g, &set) < 1e-20);
        }
        let set = zf_beams_nm(&g, 0).unwrap();
        assert!(max_leakage(&g, &set) < 1e-20);
        for col in set.beams.column_iter() {
            assert!((col.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_user_is_matched_filter() {
        let g = random_g(6, 1, 9);
        let n = g.column(0).norm();
        for set in [zf_beams_nm(&g, 0).unwrap(), rzf_beams(&g, 0.3, Owner::Cluster(0)).unwrap()] {
            for r in 0..6 {
                assert!((set.beams[(r, 0)] - g[(r, 0)] / n).norm() < 1e-12);
            }
            let gain = g.column(0).dotc(&set.beams.column(0)).norm_sqr();
            assert!((gain / (n * n) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rzf_tends_to_zf() {
        let g = random_g(24, 20, 3);
        let reg = 1e-12 * g.norm_squared();
        let zf = zf_beams_nm(&g, 0).unwrap();
        let rzf = rzf_beams(&g, reg, Owner::Cluster(0)).unwrap();
        for i in 0..20 {
            assert!(cosine_distance(zf.beam(i), rzf.beam(i)) < 1e-6);
        }
    }

    #[test]
    fn rzf_leaks() {
        let g = random_g(20, 20, 4);
        let rzf = rzf_beams(&g, 0.1, Owner::Cluster(0)).unwrap();
        assert!(max_leakage(&g, &rzf) > 0.0);
        for col in rzf.beams.column_iter() {
            assert!((col.norm() - 1.0).abs() < 1e-12);
        }
        assert!(rzf_beams(&g, 0.0, Owner::Cluster(0)).is_err());
    }

    #[test]
    fn rzf_matches_direct_inverse() {
        let g = random_g(5, 3, 8);
        let reg = 0.7;
        let gram = g.adjoint() * &g + CMatrix::identity(3, 3) * C64::new(reg, 0.0);
        let direct = &g * gram.lu().try_inverse().unwrap();
        let ours = regularized_beams(&g, reg).unwrap();
        assert!((direct - ours).norm() < 1e-12);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let mut g = random_g(4, 3, 1);
        let c0 = g.column(0).into_owned();
        g.set_column(2, &(c0 * C64::new(2.0, 0.0)));
        assert!(matches!(zf_beams_nm(&g, 0), Err(Error::SingularChannel(_))));
        assert!(matches!(zf_beams_nm(&random_g(2, 3, 1), 0), Err(Error::Shape(_))));
    }

    #[test]
    fn table1_power_arithmetic() {
        let p = PowerConfig::from_dbm(43.0, -174.0, 20e6, 5).unwrap();
        assert!((p.tx_power_w - 19.952_623_149_688_8).abs() < 1e-9);
        assert!((p.sigma2 / 7.962_143_411_069_94e-14 - 1.0).abs() < 1e-9);
        assert!((p.rho - p.tx_power_w / (5.0 * p.sigma2)).abs() < 1e-3);
        assert!(PowerConfig::new(1.0, 1.0, 0).is_err());
    }
}
