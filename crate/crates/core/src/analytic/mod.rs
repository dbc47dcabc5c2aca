//! Gamma-law approximations for signal and interference powers.
//!
//! LS-MIMO channels are isotropic, so ZF projections have exact Gamma laws.
//! Network-MIMO composite channels mix `B` path losses; their powers are
//! approximated by a single Gamma with matched first and second moments, and
//! each spatial dimension contributes the fraction `k/(B·M)` of the shape.

mod semianalytic;
pub mod special;

pub use semianalytic::{sinr_ccdf_semianalytic, InterferencePmf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SystemKind;

/// `Γ(k, θ)` with shape `k` and scale `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub shape: f64,
    pub scale: f64,
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::Domain(format!("Gamma shape must be positive, got {shape}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!("Gamma scale must be positive, got {scale}")));
        }
        Ok(Self { shape, scale })
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    /// `P(X ≤ x)`; zero for negative `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        special::reg_gamma_p(self.shape, x / self.scale).unwrap_or(f64::NAN)
    }

    /// `P(X ≥ x)`; one for `x ≤ 0`.
    pub fn ccdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        special::reg_gamma_q(self.shape, x / self.scale).unwrap_or(f64::NAN)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        use rand_distr::Distribution;
        rand_distr::Gamma::new(self.shape, self.scale)
            .expect("validated parameters")
            .sample(rng)
    }
}

/// CCDF of `p` at `x ≥ 0`.
pub fn gamma_ccdf(p: &GammaParams, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("CCDF argument must be nonnegative, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    special::reg_gamma_q(p.shape, x / p.scale)
}

/// Second-order match of a sum of independent Gammas:
/// `k = (Σkᵢθᵢ)² / Σkᵢθᵢ²`, `θ = Σkᵢθᵢ² / Σkᵢθᵢ`.
pub fn gamma_moment_match(components: &[GammaParams]) -> Result<GammaParams> {
    if components.is_empty() {
        return Err(Error::Usage("moment matching needs at least one component".into()));
    }
    let mean: f64 = components.iter().map(GammaParams::mean).sum();
    let var: f64 = components.iter().map(GammaParams::variance).sum();
    GammaParams::new(mean * mean / var, var / mean)
}

/// Path losses from the `B` BSs of one cluster to one user, with `M`
/// antennas per BS on the network-MIMO side.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterGeometryView {
    betas: Vec<f64>,
    m: usize,
}

impl ClusterGeometryView {
    pub fn new(betas: Vec<f64>, m: usize) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::Usage("cluster geometry needs at least one BS".into()));
        }
        if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(Error::Domain(format!("path loss must be positive, got {b}")));
        }
        if m == 0 {
            return Err(Error::config("M", "antennas per BS must be positive"));
        }
        Ok(Self { betas, m })
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn bs_count(&self) -> usize {
        self.betas.len()
    }

    pub fn antennas_per_bs(&self) -> usize {
        self.m
    }

    /// Total composite dimension `B·M`.
    pub fn dimension(&self) -> usize {
        self.betas.len() * self.m
    }

    /// Index of the strongest (nearest) BS.
    pub fn nearest(&self) -> usize {
        let mut best = 0;
        for (i, &b) in self.betas.iter().enumerate() {
            if b > self.betas[best] {
                best = i;
            }
        }
        best
    }

    /// `(Σβ)² / Σβ²`, the effective number of equally strong BSs, in `[1, B]`.
    pub fn effective_bs(&self) -> f64 {
        let top = self.betas[self.nearest()];
        let (s1, s2) = self.ratio_sums(top);
        (s1 * s1 / s2).min(self.betas.len() as f64)
    }

    fn ratio_sums(&self, top: f64) -> (f64, f64) {
        self.betas.iter().fold((0.0, 0.0), |(s1, s2), &b| {
            let r = b / top;
            (s1 + r, s2 + r * r)
        })
    }

    /// Moment-matched law of the composite channel power `‖g‖²`:
    /// `k = M(Σβ)²/Σβ²`, `θ = Σβ²/Σβ`.
    ///
    /// Computed in ratio form against the strongest BS so that `k ≤ B·M` and
    /// `θ ≤ max β` also hold in floating point.
    pub fn power_law(&self) -> GammaParams {
        let top = self.betas[self.nearest()];
        let (s1, s2) = self.ratio_sums(top);
        let shape = (self.m as f64 * (s1 * s1 / s2)).min(self.dimension() as f64);
        let scale = (top * (s2 / s1)).min(top);
        GammaParams { shape, scale }
    }
}

fn zf_dimension(b: usize, m: usize, kc: usize) -> Result<usize> {
    let bm = b * m;
    if kc == 0 || bm < kc {
        return Err(Error::config(
            "K",
            format!("ZF needs B·M ≥ K_c, got B·M = {bm} and K_c = {kc}"),
        ));
    }
    Ok(bm - kc + 1)
}

/// LS-MIMO ZF signal power: `Γ(BM − K_c + 1, β)` with `β` to the serving BS.
pub fn signal_dist_lsm(b: usize, m: usize, kc: usize, beta: f64) -> Result<GammaParams> {
    let dim = zf_dimension(b, m, kc)?;
    GammaParams::new(dim as f64, beta)
}

/// Network-MIMO ZF signal power: `Γ(k(BM − K_c + 1)/BM, θ)` with `(k, θ)`
/// the moment-matched law of the composite channel.
pub fn signal_dist_nm(b: usize, m: usize, kc: usize, betas: &[f64]) -> Result<GammaParams> {
    if betas.len() != b {
        return Err(Error::Shape(format!("expected {b} path losses, got {}", betas.len())));
    }
    let dim = zf_dimension(b, m, kc)?;
    let law = ClusterGeometryView::new(betas.to_vec(), m)?.power_law();
    GammaParams::new(law.shape * dim as f64 / (b * m) as f64, law.scale)
}

/// Origin of a single interfering beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamSource {
    /// Beam sent by BS `local` of the interfering cluster (LS-MIMO).
    Bs(usize),
    /// Beam sent jointly by the whole interfering cluster (network MIMO).
    Cluster,
}

/// Power one out-of-cluster beam deposits at the user:
/// LS-MIMO `Γ(1, β_m)`, network MIMO `Γ(k_ij/BM, θ_ij)`.
pub fn interference_dist_single_beam(
    kind: SystemKind,
    geometry: &ClusterGeometryView,
    source: BeamSource,
) -> Result<GammaParams> {
    match (kind, source) {
        (SystemKind::LsMimo, BeamSource::Bs(m)) => {
            let beta = *geometry
                .betas()
                .get(m)
                .ok_or_else(|| Error::Usage(format!("cluster has no BS {m}")))?;
            GammaParams::new(1.0, beta)
        }
        (SystemKind::NetworkMimo, BeamSource::Cluster) => {
            let law = geometry.power_law();
            GammaParams::new(law.shape / geometry.dimension() as f64, law.scale)
        }
        (kind, source) => Err(Error::Usage(format!("{source:?} beams do not exist in {kind}"))),
    }
}

/// Law of the total interference one cluster sends with `K` users per BS,
/// `Γ(K(Σβ)²/Σβ², Σβ²/Σβ)`. The same parameters are returned for both
/// architectures.
pub fn cluster_interference_dist(
    kind: SystemKind,
    geometry: &ClusterGeometryView,
    users_per_bs: usize,
) -> Result<GammaParams> {
    let _ = kind;
    if users_per_bs == 0 {
        return Err(Error::config("K", "at least one scheduled user per BS is required"));
    }
    let law = geometry.power_law();
    GammaParams::new(users_per_bs as f64 * geometry.effective_bs(), law.scale)
}

/// The same per-cluster law, derived along the architecture's own route:
/// LS-MIMO moment-matches the `B` per-BS `Γ(K, β_m)` terms; network MIMO sums
/// `K_c` single-beam laws sharing one scale.
pub fn cluster_interference_by_composition(
    kind: SystemKind,
    geometry: &ClusterGeometryView,
    users_per_bs: usize,
) -> Result<GammaParams> {
    if users_per_bs == 0 {
        return Err(Error::config("K", "at least one scheduled user per BS is required"));
    }
    let k = users_per_bs as f64;
    match kind {
        SystemKind::LsMimo => {
            let per_bs = (0..geometry.bs_count())
                .map(|m| {
                    let beam = interference_dist_single_beam(kind, geometry, BeamSource::Bs(m))?;
                    GammaParams::new(beam.shape * k, beam.scale)
                })
                .collect::<Result<Vec<_>>>()?;
            gamma_moment_match(&per_bs)
        }
        SystemKind::NetworkMimo => {
            let beam = interference_dist_single_beam(kind, geometry, BeamSource::Cluster)?;
            let kc = geometry.bs_count() as f64 * k;
            GammaParams::new(beam.shape * kc, beam.scale)
        }
    }
}

/// Parameter-level dominance: both the shape and the scale of `lsm` are at
/// least those of `nm`. When true, the LS-MIMO CCDF is above the network-MIMO
/// CCDF everywhere.
pub fn dominance_predicate(lsm: &GammaParams, nm: &GammaParams) -> bool {
    lsm.shape >= nm.shape && lsm.scale >= nm.scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gp(k: f64, t: f64) -> GammaParams {
        GammaParams::new(k, t).unwrap()
    }

    #[test]
    fn iid_sum_is_exact() {
        assert_eq!(gamma_moment_match(&[gp(5.0, 1.0), gp(5.0, 1.0)]).unwrap(), gp(10.0, 1.0));
    }

    #[test]
    fn equal_path_losses_give_isotropic_law() {
        let beta = 3.2e-9;
        let m = 5;
        let parts = vec![gp(m as f64, beta); 4];
        let law = gamma_moment_match(&parts).unwrap();
        assert!((law.shape - 20.0).abs() < 1e-12);
        assert!((law.scale / beta - 1.0).abs() < 1e-12);
        let view = ClusterGeometryView::new(vec![beta; 4], m).unwrap();
        assert_eq!(view.power_law(), GammaParams { shape: 20.0, scale: beta });
    }

    #[test]
    fn unequal_pair_matches_direct_moments() {
        let law = gamma_moment_match(&[gp(5.0, 1.0), gp(5.0, 0.25)]).unwrap();
        let expect_k = 5.0 * 1.25f64.powi(2) / 1.0625;
        let expect_t = 1.0625 / 1.25;
        assert!((law.shape - expect_k).abs() < 1e-12);
        assert!((law.scale - expect_t).abs() < 1e-15);
        assert!((law.mean() - 6.25).abs() < 1e-12);
        assert!((law.variance() - (5.0 + 5.0 * 0.0625)).abs() < 1e-12);
    }

    #[test]
    fn moment_match_rejects_empty() {
        assert!(gamma_moment_match(&[]).is_err());
        assert!(GammaParams::new(0.0, 1.0).is_err());
        assert!(GammaParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn lsm_signal_laws_for_the_dof_presets() {
        let beta = 1e-9;
        assert_eq!(signal_dist_lsm(4, 5, 20, beta).unwrap(), gp(1.0, beta));
        assert_eq!(signal_dist_lsm(4, 6, 20, beta).unwrap(), gp(5.0, beta));
        assert_eq!(signal_dist_lsm(4, 7, 20, beta).unwrap(), gp(9.0, beta));
        assert!(matches!(signal_dist_lsm(4, 4, 20, beta), Err(Error::Config { .. })));
    }

    #[test]
    fn nm_signal_law_reduces_to_lsm_for_equal_losses() {
        let beta = 2e-8;
        assert_eq!(signal_dist_nm(4, 6, 20, &[beta; 4]).unwrap(), signal_dist_lsm(4, 6, 20, beta).unwrap());
    }

    #[test]
    fn nm_signal_law_two_bs_example() {
        let law = signal_dist_nm(2, 5, 2, &[1.0, 0.25]).unwrap();
        let k_il = gamma_moment_match(&[gp(5.0, 1.0), gp(5.0, 0.25)]).unwrap();
        assert!((law.shape - k_il.shape * 9.0 / 10.0).abs() < 1e-12);
        assert!((law.scale - k_il.scale).abs() < 1e-15);
        assert!(signal_dist_nm(2, 5, 2, &[1.0]).is_err());
    }

    #[test]
    fn single_beam_laws() {
        let view = ClusterGeometryView::new(vec![1e-10, 3e-10, 2e-11, 5e-11], 6).unwrap();
        let lsm = interference_dist_single_beam(SystemKind::LsMimo, &view, BeamSource::Bs(1)).unwrap();
        assert_eq!(lsm, gp(1.0, 3e-10));
        let nm = interference_dist_single_beam(SystemKind::NetworkMimo, &view, BeamSource::Cluster).unwrap();
        // mean of one NM beam equals the average per-BS path loss
        let avg = view.betas().iter().sum::<f64>() / 4.0;
        assert!((nm.mean() / avg - 1.0).abs() < 1e-12);
        assert!(interference_dist_single_beam(SystemKind::LsMimo, &view, BeamSource::Cluster).is_err());
        assert!(interference_dist_single_beam(SystemKind::NetworkMimo, &view, BeamSource::Bs(0)).is_err());

        let iso = ClusterGeometryView::new(vec![4e-10; 4], 6).unwrap();
        let nm = interference_dist_single_beam(SystemKind::NetworkMimo, &iso, BeamSource::Cluster).unwrap();
        assert_eq!(nm, gp(1.0, 4e-10));
    }

    #[test]
    fn cluster_interference_is_architecture_invariant() {
        let view = ClusterGeometryView::new(vec![1e-10, 3e-10, 2e-11, 5e-11], 7).unwrap();
        let a = cluster_interference_dist(SystemKind::LsMimo, &view, 5).unwrap();
        let b = cluster_interference_dist(SystemKind::NetworkMimo, &view, 5).unwrap();
        assert_eq!(a.shape.to_bits(), b.shape.to_bits());
        assert_eq!(a.scale.to_bits(), b.scale.to_bits());
        for kind in SystemKind::ALL {
            let route = cluster_interference_by_composition(kind, &view, 5).unwrap();
            assert!((route.shape / a.shape - 1.0).abs() < 1e-12, "{kind}");
            assert!((route.scale / a.scale - 1.0).abs() < 1e-12, "{kind}");
        }
        let single = ClusterGeometryView::new(vec![7e-10], 3).unwrap();
        assert_eq!(cluster_interference_dist(SystemKind::LsMimo, &single, 5).unwrap(), gp(5.0, 7e-10));
    }

    #[test]
    fn dominance_equality_case() {
        let beta = 1e-9;
        let lsm = signal_dist_lsm(4, 7, 20, beta).unwrap();
        let nm = signal_dist_nm(4, 7, 20, &[beta; 4]).unwrap();
        assert_eq!(lsm, nm);
        assert!(dominance_predicate(&lsm, &nm));
    }

    #[test]
    fn ccdf_basics() {
        let exp = gp(1.0, 1.0);
        assert!((gamma_ccdf(&exp, 1.0).unwrap() - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert_eq!(gamma_ccdf(&exp, 0.0).unwrap(), 1.0);
        assert!(gamma_ccdf(&exp, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn moment_matching_preserves_two_moments(
            parts in prop::collection::vec((0.05..50.0f64, 1e-12..1e3f64), 1..12)
        ) {
            let comps: Vec<_> = parts.iter().map(|&(k, t)| gp(k, t)).collect();
            let law = gamma_moment_match(&comps).unwrap();
            let mean: f64 = comps.iter().map(|c| c.mean()).sum();
            let var: f64 = comps.iter().map(|c| c.variance()).sum();
            prop_assert!((law.mean() / mean - 1.0).abs() < 1e-12);
            prop_assert!((law.variance() / var - 1.0).abs() < 1e-12);
        }

        #[test]
        fn composite_shape_is_bounded(betas in prop::collection::vec(1e-12..1e-3f64, 1..9), m in 1usize..8) {
            let view = ClusterGeometryView::new(betas.clone(), m).unwrap();
            let law = view.power_law();
            prop_assert!(law.shape <= view.dimension() as f64);
            prop_assert!(law.scale <= betas.iter().cloned().fold(0.0, f64::max));
        }

        #[test]
        fn ccdf_monotone_in_all_arguments(k in 0.1..100.0f64, t in 0.01..10.0f64, x in 0.0..200.0f64) {
            let base = gp(k, t).ccdf(x);
            prop_assert!(gp(k, t).ccdf(x * 1.05 + 1e-3) <= base + 1e-14);
            prop_assert!(gp(k * 1.05, t).ccdf(x) >= base - 1e-14);
            prop_assert!(gp(k, t * 1.05).ccdf(x) >= base - 1e-14);
        }
    }
}
