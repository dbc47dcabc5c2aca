//! End-to-end runs through the public API at small trial counts.

use mimo_duel::beamform::{build_beams, max_leakage, Scheme, ZeroForcing};
use mimo_duel::channel::{ChannelRealization, LinkScope};
use mimo_duel::metrics::ks_one_sample;
use mimo_duel::montecarlo::{
    build_schedule, run_probe_experiment, run_rate_experiment, ProbeGeometry, SimulationConfig,
};
use mimo_duel::rng::{Purpose, StreamKey};
use mimo_duel::topology::{place_users, Point};
use mimo_duel::SystemKind;

#[test]
fn zf_nulls_every_intra_cluster_user_in_both_architectures() {
    let c = SimulationConfig::table1().with_dof(1).unwrap();
    let topo = c.topology().unwrap();
    let model = c.path_loss().unwrap();
    let m = c.antennas_per_bs;
    for t in 0..5 {
        let key = StreamKey::new(3, t, 0);
        let users = place_users(&topo, c.users_per_cell, &model, &mut key.rng(Purpose::Placement, 0)).unwrap();
        let sched = build_schedule(&topo, &users, c.users_per_bs, t as usize).unwrap();
        let real = ChannelRealization::draw(&topo, &model, sched, c.bs_per_cluster * m, &LinkScope::Observed(vec![]), key)
            .unwrap();
        for kind in SystemKind::ALL {
            let beams = build_beams(kind, &ZeroForcing, &real, m).unwrap();
            for (i, set) in beams.sets.iter().enumerate() {
                let g = match kind {
                    SystemKind::LsMimo => real.compound_lsm(i, m).unwrap(),
                    SystemKind::NetworkMimo => real.composite_nm(i, m).unwrap(),
                };
                assert!(max_leakage(&g, set) < 1e-20, "{kind} transmitter {i}");
                for j in 0..set.len() {
                    let n: f64 = set.beam(j).iter().map(|z| z.norm_sqr()).sum();
                    assert!((n - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn probe_signal_laws_hold_at_moderate_trials() {
    let c = SimulationConfig { trials: 2000, ..SimulationConfig::table1() };
    let r = run_probe_experiment(&c, Point::new(15.0, 15.0)).unwrap();
    let topo = c.topology().unwrap();
    let g = ProbeGeometry::new(&c, r.position).unwrap();
    let (b, m, kc) = (c.bs_per_cluster, c.antennas_per_bs, c.bs_per_cluster * c.users_per_bs);
    let lsm = mimo_duel::analytic::signal_dist_lsm(b, m, kc, g.serving_beta(&topo)).unwrap();
    let ks = ks_one_sample(r.kinds[&SystemKind::LsMimo].signal.values(), |x| lsm.cdf(x)).unwrap();
    // 1% critical value at n = 2000
    assert!(ks < 1.63 / (2000f64).sqrt(), "KS {ks}");
    let law_mean: f64 = g.interference_laws(SystemKind::LsMimo, c.users_per_bs).unwrap().iter().map(|p| p.mean()).sum();
    for kind in SystemKind::ALL {
        let mean = r.kinds[&kind].interference.mean().unwrap();
        assert!((mean / law_mean - 1.0).abs() < 0.1, "{kind}: {mean} vs {law_mean}");
    }
}

#[test]
fn rate_experiment_is_reproducible_and_power_exact() {
    let c = SimulationConfig { trials: 3, slots_per_placement: 12, seed: 5, ..SimulationConfig::table1() };
    let a = run_rate_experiment(&c, &[Scheme::Zf, Scheme::Rzf]).unwrap();
    let b = run_rate_experiment(&c, &[Scheme::Zf, Scheme::Rzf]).unwrap();
    assert_eq!(a.rates, b.rates);
    assert!(a.max_power_error < 1e-12);
    assert!(a.max_zf_leakage < 1e-16);
    let other = run_rate_experiment(&SimulationConfig { seed: 6, ..c }, &[Scheme::Zf]).unwrap();
    assert_ne!(a.get(SystemKind::LsMimo, Scheme::Zf), other.get(SystemKind::LsMimo, Scheme::Zf));
}
