//! Square cluster lattice on a flat torus.
//!
//! `C` clusters of side `L` tile a `√C × √C` grid; each cluster holds a
//! `√B × √B` grid of BSs sitting at the centres of their square cells. All
//! distances wrap around, so every cluster sees eight neighbours and the
//! statistics of any cluster equal those of the centre one.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseStation {
    pub cluster: usize,
    /// Index of the BS inside its cluster, row-major over the BS sub-grid.
    pub local: usize,
    pub pos: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTopology {
    num_clusters: usize,
    bs_per_cluster: usize,
    cluster_side: f64,
    clusters_per_row: usize,
    bs_per_row: usize,
    bs: Vec<BaseStation>,
}

fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Lays out the lattice. BS `local` of cluster `c` has global index
/// `c·B + local`.
pub fn build_lattice(num_clusters: usize, bs_per_cluster: usize, cluster_side: f64) -> Result<NetworkTopology> {
    let clusters_per_row = exact_sqrt(num_clusters)
        .filter(|&r| r > 0)
        .ok_or_else(|| Error::config("C", format!("{num_clusters} is not a positive perfect square")))?;
    let bs_per_row = exact_sqrt(bs_per_cluster)
        .filter(|&r| r > 0)
        .ok_or_else(|| Error::config("B", format!("{bs_per_cluster} is not a positive perfect square")))?;
    if !(cluster_side.is_finite() && cluster_side > 0.0) {
        return Err(Error::config("L", format!("cluster side must be positive, got {cluster_side}")));
    }

    let spacing = cluster_side / bs_per_row as f64;
    let mut bs = Vec::with_capacity(num_clusters * bs_per_cluster);
    for cluster in 0..num_clusters {
        let cx = (cluster % clusters_per_row) as f64 * cluster_side;
        let cy = (cluster / clusters_per_row) as f64 * cluster_side;
        for local in 0..bs_per_cluster {
            let bx = (local % bs_per_row) as f64 + 0.5;
            let by = (local / bs_per_row) as f64 + 0.5;
            bs.push(BaseStation {
                cluster,
                local,
                pos: Point::new(cx + bx * spacing, cy + by * spacing),
            });
        }
    }

    Ok(NetworkTopology {
        num_clusters,
        bs_per_cluster,
        cluster_side,
        clusters_per_row,
        bs_per_row,
        bs,
    })
}

impl NetworkTopology {
    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn bs_per_cluster(&self) -> usize {
        self.bs_per_cluster
    }

    pub fn cluster_side(&self) -> f64 {
        self.cluster_side
    }

    pub fn num_bs(&self) -> usize {
        self.bs.len()
    }

    /// Side of the torus, `√C·L`.
    pub fn world_extent(&self) -> f64 {
        self.clusters_per_row as f64 * self.cluster_side
    }

    /// Side of one square cell (`L/√B`), which is also the inter-BS spacing.
    pub fn cell_side(&self) -> f64 {
        self.cluster_side / self.bs_per_row as f64
    }

    pub fn base_stations(&self) -> &[BaseStation] {
        &self.bs
    }

    pub fn bs(&self, global: usize) -> &BaseStation {
        &self.bs[global]
    }

    pub fn bs_index(&self, cluster: usize, local: usize) -> usize {
        cluster * self.bs_per_cluster + local
    }

    /// Global indices of the BSs in `cluster`.
    pub fn cluster_bs(&self, cluster: usize) -> std::ops::Range<usize> {
        let start = cluster * self.bs_per_cluster;
        start..start + self.bs_per_cluster
    }

    pub fn cluster_origin(&self, cluster: usize) -> Point {
        Point::new(
            (cluster % self.clusters_per_row) as f64 * self.cluster_side,
            (cluster / self.clusters_per_row) as f64 * self.cluster_side,
        )
    }

    pub fn cluster_center(&self, cluster: usize) -> Point {
        let half = self.cluster_side / 2.0;
        self.cluster_origin(cluster) + Point::new(half, half)
    }

    /// The cluster in the middle of the lattice (row `⌊√C/2⌋`, column `⌊√C/2⌋`).
    pub fn center_cluster(&self) -> usize {
        let mid = self.clusters_per_row / 2;
        mid * self.clusters_per_row + mid
    }

    /// Cluster owning `p`, with `p` reduced onto the torus first.
    pub fn cluster_of(&self, p: Point) -> usize {
        let p = self.wrap(p);
        let col = ((p.x / self.cluster_side) as usize).min(self.clusters_per_row - 1);
        let row = ((p.y / self.cluster_side) as usize).min(self.clusters_per_row - 1);
        row * self.clusters_per_row + col
    }

    /// Global index of the BS whose square cell contains `p`. On the torus
    /// this is also the nearest BS.
    pub fn cell_of(&self, p: Point) -> usize {
        let cluster = self.cluster_of(p);
        let p = self.wrap(p);
        let o = self.cluster_origin(cluster);
        let cell = self.cell_side();
        let col = (((p.x - o.x) / cell) as usize).min(self.bs_per_row - 1);
        let row = (((p.y - o.y) / cell) as usize).min(self.bs_per_row - 1);
        self.bs_index(cluster, row * self.bs_per_row + col)
    }

    /// Lower-left corner of the square cell of BS `global`.
    pub fn cell_origin(&self, global: usize) -> Point {
        let half = self.cell_side() / 2.0;
        let c = self.bs[global].pos;
        Point::new(c.x - half, c.y - half)
    }

    /// Brute-force nearest BS under the wrapped metric.
    pub fn nearest_bs(&self, p: Point) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, b) in self.bs.iter().enumerate() {
            let d = self.wrapped_distance(p, b.pos);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    pub fn wrap(&self, p: Point) -> Point {
        let e = self.world_extent();
        Point::new(p.x.rem_euclid(e), p.y.rem_euclid(e))
    }

    /// Euclidean distance on the torus: each coordinate difference is reduced
    /// to `[−E/2, E/2]` before taking the norm.
    pub fn wrapped_distance(&self, a: Point, b: Point) -> f64 {
        let e = self.world_extent();
        let reduce = |d: f64| d - e * (d / e).round();
        reduce(a.x - b.x).hypot(reduce(a.y - b.y))
    }

    /// Distinct clusters sharing an edge or a corner with `cluster` under
    /// wrap-around. For a 3×3 lattice this is every other cluster.
    pub fn neighbors(&self, cluster: usize) -> Vec<usize> {
        let n = self.clusters_per_row as isize;
        let (col, row) = ((cluster % self.clusters_per_row) as isize, (cluster / self.clusters_per_row) as isize);
        let mut out = Vec::new();
        for dr in -1..=1 {
            for dc in -1..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let c = ((row + dr).rem_euclid(n) * n + (col + dc).rem_euclid(n)) as usize;
                if c != cluster && !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// `β = r^{−α}` with a minimum admissible distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub alpha: f64,
    pub exclusion_radius: f64,
}

impl PathLossModel {
    pub fn new(alpha: f64, exclusion_radius: f64) -> Result<Self> {
        if !(alpha > 2.0 && alpha.is_finite()) {
            return Err(Error::config("alpha", format!("path-loss exponent must exceed 2, got {alpha}")));
        }
        if !(exclusion_radius > 0.0 && exclusion_radius.is_finite()) {
            return Err(Error::config(
                "exclusion_radius",
                format!("must be positive, got {exclusion_radius}"),
            ));
        }
        Ok(Self {
            alpha,
            exclusion_radius,
        })
    }

    pub fn gain(&self, r: f64) -> Result<f64> {
        if !(r >= self.exclusion_radius) {
            return Err(Error::Domain(format!(
                "distance {r} m is inside the {} m exclusion radius",
                self.exclusion_radius
            )));
        }
        Ok(r.powf(-self.alpha))
    }
}

/// Free-function form of [`PathLossModel::gain`].
pub fn path_loss(model: &PathLossModel, r: f64) -> Result<f64> {
    model.gain(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct User {
    pub cluster: usize,
    /// Global index of the owning BS.
    pub cell: usize,
    /// Index among the `K_T` users of the cell.
    pub user_id: usize,
    pub pos: Point,
}

/// `K_T` users per cell. User `u` of BS `b` is stored at `b·K_T + u`.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSet {
    pub users_per_cell: usize,
    pub users: Vec<User>,
}

impl UserSet {
    pub fn user(&self, cell: usize, user_id: usize) -> &User {
        &self.users[cell * self.users_per_cell + user_id]
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }
}

/// Uniform placement of `users_per_cell` users in every square cell,
/// rejecting draws closer than the exclusion radius to the owning BS.
pub fn place_users<R: Rng + ?Sized>(
    topo: &NetworkTopology,
    users_per_cell: usize,
    model: &PathLossModel,
    rng: &mut R,
) -> Result<UserSet> {
    if users_per_cell == 0 {
        return Err(Error::config("K_T", "at least one user per cell is required"));
    }
    let side = topo.cell_side();
    if model.exclusion_radius >= side / 2.0 {
        return Err(Error::config(
            "exclusion_radius",
            format!("{} m leaves no room in a {side} m cell", model.exclusion_radius),
        ));
    }

    let mut users = Vec::with_capacity(topo.num_bs() * users_per_cell);
    for (cell, bs) in topo.base_stations().iter().enumerate() {
        let origin = topo.cell_origin(cell);
        for user_id in 0..users_per_cell {
            let pos = loop {
                let p = Point::new(
                    origin.x + side * rng.random::<f64>(),
                    origin.y + side * rng.random::<f64>(),
                );
                if topo.wrapped_distance(p, bs.pos) >= model.exclusion_radius {
                    break p;
                }
            };
            users.push(User {
                cluster: bs.cluster,
                cell,
                user_id,
                pos,
            });
        }
    }
    Ok(UserSet {
        users_per_cell,
        users,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, StreamKey};
    use proptest::prelude::*;

    fn table1() -> NetworkTopology {
        build_lattice(9, 4, 1000.0).unwrap()
    }

    #[test]
    fn table1_lattice_has_500m_spacing() {
        let t = table1();
        assert_eq!(t.num_bs(), 36);
        assert_eq!(t.world_extent(), 3000.0);
        let c = t.center_cluster();
        assert_eq!(c, 4);
        let bs: Vec<_> = t.cluster_bs(c).map(|i| t.bs(i).pos).collect();
        assert_eq!(bs[0], Point::new(1250.0, 1250.0));
        assert_eq!(t.wrapped_distance(bs[0], bs[1]), 500.0);
        assert_eq!(t.wrapped_distance(bs[0], bs[2]), 500.0);
        // nearest BS across the wrap seam is also 500 m away
        assert_eq!(t.wrapped_distance(t.bs(0).pos, t.bs(t.bs_index(2, 1)).pos), 500.0);
    }

    #[test]
    fn single_bs_sits_at_cluster_center() {
        let t = build_lattice(1, 1, 1000.0).unwrap();
        assert_eq!(t.num_bs(), 1);
        assert_eq!(t.bs(0).pos, Point::new(500.0, 500.0));
    }

    #[test]
    fn non_square_counts_are_rejected() {
        assert!(matches!(build_lattice(8, 4, 1000.0), Err(Error::Config { key, .. }) if key == "C"));
        assert!(matches!(build_lattice(9, 2, 1000.0), Err(Error::Config { key, .. }) if key == "B"));
        assert!(build_lattice(9, 4, 0.0).is_err());
    }

    #[test]
    fn every_bs_is_nearest_to_its_cell_probe_points() {
        let t = build_lattice(4, 4, 1000.0).unwrap();
        assert_eq!(t.world_extent(), 2000.0);
        assert_eq!(t.num_bs(), 16);
        for (i, b) in t.base_stations().iter().enumerate() {
            assert_eq!(t.nearest_bs(b.pos), i);
        }
        // exhaustive probe grid: the cell lookup agrees with brute force
        let n = 80;
        for iy in 0..n {
            for ix in 0..n {
                let p = Point::new((ix as f64 + 0.37) * 25.0, (iy as f64 + 0.61) * 25.0);
                assert_eq!(t.cell_of(p), t.nearest_bs(p), "{p:?}");
            }
        }
    }

    #[test]
    fn every_bs_inside_its_cluster() {
        let t = table1();
        for b in t.base_stations() {
            let o = t.cluster_origin(b.cluster);
            assert!(b.pos.x > o.x && b.pos.x < o.x + 1000.0);
            assert!(b.pos.y > o.y && b.pos.y < o.y + 1000.0);
            assert_eq!(t.cluster_of(b.pos), b.cluster);
        }
    }

    #[test]
    fn wrapped_distance_examples() {
        let t = table1();
        let a = Point::new(100.0, 0.0);
        assert_eq!(t.wrapped_distance(a, a), 0.0);
        assert!((t.wrapped_distance(a, Point::new(2900.0, 0.0)) - 200.0).abs() < 1e-9);
    }

    #[test]
    fn table1_clusters_have_eight_neighbors() {
        let t = table1();
        for c in 0..9 {
            assert_eq!(t.neighbors(c).len(), 8);
        }
    }

    #[test]
    fn path_loss_examples() {
        let m = PathLossModel::new(3.5, 1.0).unwrap();
        assert_eq!(m.gain(1.0).unwrap(), 1.0);
        assert!((m.gain(100.0).unwrap() / 1e-7 - 1.0).abs() < 1e-12);
        assert!(matches!(m.gain(0.5), Err(Error::Domain(_))));
        assert!(PathLossModel::new(2.0, 10.0).is_err());
        assert!(PathLossModel::new(3.5, 0.0).is_err());
    }

    #[test]
    fn table1_users_count_and_ownership() {
        let t = table1();
        let model = PathLossModel::new(3.5, 10.0).unwrap();
        let mut rng = StreamKey::new(1, 0, 0).rng(Purpose::Placement, 0);
        let users = place_users(&t, 60, &model, &mut rng).unwrap();
        assert_eq!(users.len(), 2160);
        for u in &users.users {
            let own = t.wrapped_distance(u.pos, t.bs(u.cell).pos);
            assert!(own >= 10.0);
            for b in t.base_stations() {
                assert!(own <= t.wrapped_distance(u.pos, b.pos) + 1e-9);
            }
            assert_eq!(t.bs(u.cell).cluster, u.cluster);
        }
    }

    #[test]
    fn placement_is_deterministic() {
        let t = table1();
        let model = PathLossModel::new(3.5, 10.0).unwrap();
        let draw = || {
            let mut rng = StreamKey::new(42, 5, 0).rng(Purpose::Placement, 0);
            place_users(&t, 60, &model, &mut rng).unwrap()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn users_are_uniform_over_the_cell() {
        let t = build_lattice(1, 1, 1000.0).unwrap();
        let model = PathLossModel::new(3.5, 10.0).unwrap();
        let mut rng = StreamKey::new(3, 0, 0).rng(Purpose::Placement, 0);
        let users = place_users(&t, 100_000, &model, &mut rng).unwrap();
        let mut bins = [0usize; 16];
        for u in &users.users {
            let bx = ((u.pos.x / 250.0) as usize).min(3);
            let by = ((u.pos.y / 250.0) as usize).min(3);
            bins[by * 4 + bx] += 1;
        }
        let expected = 100_000.0 / 16.0;
        let chi2: f64 = bins.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99.9% quantile of chi-square with 15 degrees of freedom
        assert!(chi2 < 37.70, "chi2 = {chi2}");
        for &c in &bins {
            assert!((c as f64 / expected - 1.0).abs() < 0.05);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn wrapped_distance_is_symmetric_and_bounded(
            ax in 0.0..3000.0f64, ay in 0.0..3000.0f64,
            bx in 0.0..3000.0f64, by in 0.0..3000.0f64,
        ) {
            let t = table1();
            let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
            let d = t.wrapped_distance(a, b);
            prop_assert_eq!(d, t.wrapped_distance(b, a));
            prop_assert!(d <= ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt() + 1e-9);
            prop_assert!(d <= 3000.0 * std::f64::consts::SQRT_2 / 2.0 + 1e-9);
        }

        #[test]
        fn path_loss_is_decreasing(r1 in 10.0..5000.0f64, dr in 1e-3..1000.0f64) {
            let m = PathLossModel::new(3.5, 10.0).unwrap();
            prop_assert!(m.gain(r1).unwrap() > m.gain(r1 + dr).unwrap());
        }
    }
}
