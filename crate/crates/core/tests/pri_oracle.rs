use credal_core::cones::is_mesc;
use credal_core::credal::build_credal_hrep;
use credal_core::credal::{is_coherent, oracle_vertex_points, CredalSet};
use credal_core::exactla::rat;
use credal_core::fanwalk::{verify_graph, walk};
use credal_core::pri::*;
use credal_core::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn walk_matches_oracle_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ties = 0;
    for n in 3..=5 {
        for denom in [4, 6, 12, 30] {
            for _ in 0..15 {
                let m = sample::coherent_pri(&mut rng, n, denom);
                let e = enumerate_extreme_pri(&m).unwrap();
                let oracle = oracle_vertex_points(&m.to_lower_prevision()).unwrap();
                assert_eq!(e.vertices, oracle, "{m:?}");
                ties += e.ties;
                let u = pri_universe(n);
                for c in &e.cones {
                    assert!(is_mesc(&c.generators(n), &u), "{c:?} in {m:?}");
                }
                let (lo, hi) = count_bounds(n);
                assert!(lo <= e.cones.len().into());
                assert!(hi >= e.vertices.len().into());
                if e.ties == 0 {
                    assert!(hi >= e.cones.len().into());
                    let r = verify_graph(&e.graph, n - 1);
                    assert!(r.connected && r.regular, "{r:?}");
                }
            }
        }
    }
    assert!(ties > 0, "grid models should produce some borderline ties");
}

#[test]
fn closed_form_coherence_agrees_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 3..=5 {
        for _ in 0..40 {
            let m = sample::coherent_pri(&mut rng, n, 8);
            // loosen one bound so roughly half the cases are incoherent
            let mut lower = m.lower().to_vec();
            let mut upper = m.upper().to_vec();
            let x = n / 2;
            lower[x] = (&lower[x] - rat(1, 8)).max(rat(0, 1));
            upper[0] = (&upper[0] + rat(1, 8)).min(rat(1, 1));
            let loose = PriModel::new(m.space().clone(), lower, upper).unwrap();
            for model in [&m, &loose] {
                let fast = is_coherent_pri(model);
                let slow = is_coherent(&model.to_lower_prevision()).unwrap();
                assert_eq!(fast.coherent, slow.coherent, "{model:?}");
                if let Some((lo, up)) = fast.repaired {
                    let repaired = PriModel::new(model.space().clone(), lo, up).unwrap();
                    assert!(is_coherent_pri(&repaired).coherent);
                    assert_eq!(
                        oracle_vertex_points(&repaired.to_lower_prevision()).unwrap(),
                        oracle_vertex_points(&model.to_lower_prevision()).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn natural_extension_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let m = PriModel::uniform(3, rat(1, 6), rat(1, 2)).unwrap();
    let cs = CredalSet::new(m.to_lower_prevision()).unwrap();
    for _ in 0..200 {
        let f = sample::gamble(&mut rng, 3, 6, 1);
        assert_eq!(
            natural_extension_pri(&m, &f).unwrap(),
            cs.natural_extension(&f).unwrap()
        );
    }
    for n in 3..=5 {
        for _ in 0..10 {
            let m = sample::coherent_pri(&mut rng, n, 10);
            let cs = CredalSet::new(m.to_lower_prevision()).unwrap();
            for _ in 0..20 {
                let f = sample::gamble(&mut rng, n, 4, 1);
                assert_eq!(
                    natural_extension_pri(&m, &f).unwrap(),
                    cs.natural_extension(&f).unwrap()
                );
            }
        }
    }
}

#[test]
fn generic_walk_agrees_with_rule_walk() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in 3..=4 {
        for _ in 0..10 {
            let m = sample::coherent_pri(&mut rng, n, 12);
            let rep = build_credal_hrep(&m.to_lower_prevision()).unwrap();
            let g = walk(&rep.polytope, &rep.universe, None).unwrap();
            let e = enumerate_extreme_pri(&m).unwrap();
            assert_eq!(g.vertices(), e.vertices);
        }
    }
}
