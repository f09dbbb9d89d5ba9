use mdiqp::criteria::*;
use mdiqp::gf2::BitMatrix;
use mdiqp::seeding::rng_from_seed;
use std::time::Instant;

#[test]
#[ignore]
fn calibrate_iid_ks() {
    for n in [36usize, 64, 100, 144, 256, 400, 600] {
        let mut ds = Vec::new();
        for seed in 0..5u64 {
            let mut rng = rng_from_seed(1000 + seed);
            let a = BitMatrix::random(n, n, &mut rng);
            ds.push(mp_distance(&covariance_eigenvalues(&a), 1.0).unwrap());
        }
        ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!("iid n={n}: ks = {ds:.4?}");
    }
}

#[test]
#[ignore]
fn calibrate_md_architectures() {
    for (conn, d, n) in [
        (Connectivity::Grid, 4, 36),
        (Connectivity::Grid, 4, 100),
        (Connectivity::Grid, 4, 400),
        (Connectivity::Grid, 3, 100),
        (Connectivity::Grid, 2, 100),
        (Connectivity::Grid, 1, 100),
        (Connectivity::AllToAll, 2, 64),
        (Connectivity::AllToAll, 2, 256),
        (Connectivity::AllToAll, 2, 400),
        (Connectivity::AllToAll, 1, 256),
    ] {
        let t = Instant::now();
        let mut overall = 0;
        let mut mps = Vec::new();
        let cfg = CriterionConfig::default();
        for seed in 0..10u64 {
            let a = measurement_driven_architecture(conn, n, d, 7000 + seed).unwrap();
            let r = criterion1(&a, &CriterionConfig { seed, ..cfg }).unwrap();
            if r.overall {
                overall += 1;
            }
            mps.push((r.mp_distance, r.hamming_rows_pass, r.hamming_cols_pass, r.hamming_pairwise_pass, r.rank_fraction));
        }
        println!(
            "MD {conn:?} D={d} n={n}: {overall}/10 pass default cfg in {:?}",
            t.elapsed()
        );
        for m in &mps {
            println!("   mp={:.4} rows={} cols={} pair={} rank={:.3}", m.0, m.1, m.2, m.3, m.4);
        }
    }
}

#[test]
#[ignore]
fn calibrate_af_architectures() {
    for (conn, d, n) in [
        (Connectivity::Grid, 16, 100),
        (Connectivity::Grid, 16, 400),
        (Connectivity::AllToAll, 8, 64),
        (Connectivity::AllToAll, 8, 256),
        (Connectivity::AllToAll, 8, 400),
        (Connectivity::AllToAll, 12, 256),
        (Connectivity::AllToAll, 16, 256),
    ] {
        let cfg = CriterionConfig::default();
        let mut overall = 0;
        let mut detail = Vec::new();
        for seed in 0..10u64 {
            let a = ancilla_free_architecture(conn, n, d, 9000 + seed).unwrap();
            let r = criterion1(&a, &CriterionConfig { seed, ..cfg }).unwrap();
            if r.overall {
                overall += 1;
            }
            detail.push((r.mp_distance, r.hamming_rows_pass && r.hamming_cols_pass && r.hamming_pairwise_pass, r.rank_fraction));
        }
        println!("AF {conn:?} depth={d} n={n}: {overall}/10 pass; first three: {:?}", &detail[..3]);
    }
}

#[test]
#[ignore]
fn calibrate_large_timing() {
    let t = Instant::now();
    let a = measurement_driven_architecture(Connectivity::Grid, 1681, 4, 3).unwrap();
    println!("41×41 MD architecture build: {:?}", t.elapsed());
    let t = Instant::now();
    let cfg = CriterionConfig { rank_trials: 200, ..CriterionConfig::default() };
    let r = criterion1(&a, &cfg).unwrap();
    println!(
        "41×41 criterion: {:?}; mp={:.4} overall={}",
        t.elapsed(),
        r.mp_distance,
        r.overall
    );
}
