//! Desk-scale multicell downlink simulator comparing LS-MIMO (each BS with
//! `B·M` antennas nulling intra-cluster interference on its own) against
//! network MIMO (the `B` BSs of a cluster jointly zero-forcing with `M`
//! antennas each).
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`] lays out the square cluster lattice on a torus, places users
//!   and evaluates path loss.
//! * [`channel`] draws Rayleigh fading per physical link and assembles the
//!   compound (one BS) and composite (whole cluster) channel matrices.
//! * [`beamform`] builds unit-norm ZF and RZF beams for both architectures.
//! * [`metrics`] evaluates SINR, aggregate interference and the sample
//!   statistics (ECDF, KS, coverage, rates).
//! * [`analytic`] holds the Gamma-law machinery: moment matching, signal and
//!   interference laws, dominance predicates and the semianalytic SINR CCDF.
//! * [`montecarlo`] wires everything into reproducible trial runs.

pub mod analytic;
pub mod beamform;
pub mod channel;
pub mod error;
pub mod metrics;
pub mod montecarlo;
pub mod rng;
pub mod topology;

pub use error::{Error, Result};

/// Complex scalar used for every channel and beam entry.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix (column-major).
pub type CMatrix = nalgebra::DMatrix<C64>;

/// The two interference mitigation architectures under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum SystemKind {
    /// Each BS has `B·M` antennas and serves its own `K` users while nulling
    /// the other `K(B−1)` users of its cluster.
    LsMimo,
    /// The `B` BSs of a cluster, `M` antennas each, jointly serve all `B·K`
    /// cluster users.
    NetworkMimo,
}

impl SystemKind {
    pub const ALL: [SystemKind; 2] = [SystemKind::LsMimo, SystemKind::NetworkMimo];

    /// Antennas installed at every BS.
    pub fn antennas_per_bs(self, bs_per_cluster: usize, m: usize) -> usize {
        match self {
            SystemKind::LsMimo => bs_per_cluster * m,
            SystemKind::NetworkMimo => m,
        }
    }

    /// Short lowercase tag used in file headers (`lsm`, `nm`).
    pub fn tag(self) -> &'static str {
        match self {
            SystemKind::LsMimo => "lsm",
            SystemKind::NetworkMimo => "nm",
        }
    }
}

impl std::fmt::Display for SystemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Spatial degrees of freedom per user, `B(M−K)+1`. Both architectures
/// expose the same value.
pub fn spatial_dof(bs_per_cluster: usize, m: usize, k: usize) -> Option<usize> {
    m.checked_sub(k).map(|excess| bs_per_cluster * excess + 1)
}
