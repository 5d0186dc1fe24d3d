//! One-off robustness sweep at 10x the acceptance counts; prints the
//! worst slack seen per relation family.

use ambkit_core::ambiguity::GridSpec;
use ambkit_core::corpus;
use ambkit_core::mimo::{CorrelationKind, SteeringSpec};
use ambkit_core::rng::Lcg64;
use ambkit_core::signal::Lattice;
use ambkit_core::uncertainty::{check_heisenberg, check_lieb, run_mimo_suite, SuiteConfig};
use ambkit_core::Region;
use std::collections::BTreeMap;

fn main() {
    let lattice = Lattice::desk();
    let grid = GridSpec::centered(8.0, 257).unwrap();

    let mut worst_h = f64::INFINITY;
    for seed in 0..1000u64 {
        let x = corpus::smooth_signal(lattice, 6, seed);
        let r = check_heisenberg(&x).unwrap();
        worst_h = worst_h.min(r.slack);
    }
    println!("heisenberg, 1000 signals: min slack {worst_h:+.3e}");

    let mut worst_p4 = f64::INFINITY;
    let mut worst_p15 = f64::INFINITY;
    for seed in 0..500u64 {
        let u = corpus::smooth_signal(lattice, 6, 10_000 + seed);
        let v = corpus::smooth_signal(lattice, 6, 20_000 + seed);
        worst_p4 = worst_p4.min(check_lieb(&u, &v, 4.0, &grid).unwrap().slack);
        worst_p15 = worst_p15.min(check_lieb(&u, &v, 1.5, &grid).unwrap().slack);
    }
    println!("lieb p=4, 500 pairs: min slack {worst_p4:+.3e}");
    println!("lieb p=1.5, 500 pairs: min slack {worst_p15:+.3e}");

    let mut rng = Lcg64::new(0xabcdef);
    let mut worst_r33 = f64::INFINITY;
    let mut worst_rel = f64::INFINITY;
    for set_idx in 0..40u64 {
        let set = corpus::smooth_set(lattice, 2, 6, 60_000 + set_idx);
        let mut regions = Vec::new();
        for _ in 0..50 {
            let ct = rng.uniform(-4.0, 4.0);
            let cn = rng.uniform(-4.0, 4.0);
            let hw = rng.uniform(0.5, 2.0);
            let hh = rng.uniform(0.5, 2.0);
            regions.push(Region::Rect {
                tau_min: ct - hw,
                tau_max: ct + hw,
                nu_min: cn - hh,
                nu_max: cn + hh,
            });
        }
        for _ in 0..13 {
            regions.push(Region::Disk {
                center_tau: rng.uniform(-3.0, 3.0),
                center_nu: rng.uniform(-3.0, 3.0),
                radius: rng.uniform(1.0, 2.5),
            });
        }
        let cfg = SuiteConfig {
            grid,
            steering: SteeringSpec::new(1, 2).unwrap(),
            kind: CorrelationKind::Symmetric,
            p_list: vec![1.5, 4.0],
            regions,
            eps_list: vec![0.05, 0.4],
            tolerances: BTreeMap::new(),
        };
        let results = run_mimo_suite(&set, &cfg, None).unwrap();
        for r in results {
            if !r.satisfied {
                println!("VIOLATION set {set_idx}: {} slack {}", r.id, r.slack);
            }
            if r.id.starts_with("R3.3b") {
                worst_r33 = worst_r33.min(r.slack);
                worst_rel = worst_rel.min(r.slack / r.rhs);
            }
        }
    }
    println!("R3.3b over 2520 regions: min slack {worst_r33:+.3e} (relative {worst_rel:+.3e})");
    println!("sweep complete");
}
