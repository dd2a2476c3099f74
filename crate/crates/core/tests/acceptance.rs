//! End-to-end checks, one numbered PASS/FAIL line each. Exits nonzero on
//! any failure.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use credal_core::chains2mono::{
    chain_cone, chain_graph, choquet, enumerate_extreme_2mono, is_strictly_supermodular,
    is_two_monotone, maximal_chains,
};
use credal_core::cones::are_adjacent;
use credal_core::credal::{
    build_credal_hrep, is_event_mesc, CredalSet, Event, EventCollection, EventMescReason, Gamble,
    LowerPrevision,
};
use credal_core::exactla::{add, int, rat, scale, Rat, RatVector};
use credal_core::fanwalk::verify_graph;
use credal_core::io::parse_model;
use credal_core::polytope::{lp_min_over, normal_cone_at, vertices_bruteforce};
use credal_core::pri::{
    cone_membership, count_bounds, enumerate_extreme_pri, induced_2mono, natural_extension_pri,
    Membership, PriEnumeration, PriModel,
};
use credal_core::sample;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn uniform() -> PriModel {
    PriModel::uniform(10, rat(1, 11), rat(1, 9)).unwrap()
}

fn wide() -> PriModel {
    PriModel::uniform(10, rat(1, 20), rat(1, 9)).unwrap()
}

fn timed_count(m: &PriModel, expected: usize) -> Outcome {
    let start = Instant::now();
    let e = enumerate_extreme_pri(m).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(
        e.vertices.len() == expected,
        format!("{} extreme points, expected {expected}", e.vertices.len()),
    )?;
    ensure(took < Duration::from_secs(30), format!("took {took:?}"))?;
    Ok(format!(
        "{} extreme points in {:.2?}",
        e.vertices.len(),
        took
    ))
}

fn uniform_pri_count() -> Outcome {
    timed_count(&uniform(), 1260)
}

fn wide_pri_count() -> Outcome {
    timed_count(&wide(), 90)
}

/// Sum of `|A|!·|B|!` over the cones, which is `n!` when the cones tile
/// the chain fan.
fn comonotone_total(e: &PriEnumeration) -> BigUint {
    e.cones.iter().map(|c| c.comonotone_cones_in()).sum()
}

fn count_bounds_attained() -> Outcome {
    let (lo, hi) = count_bounds(10);
    ensure(
        lo == BigUint::from(90u32) && hi == BigUint::from(1260u32),
        format!("count_bounds(10) = ({lo}, {hi})"),
    )?;
    let factorial: BigUint = (1..=10u32).map(BigUint::from).product();
    for (name, m, bound) in [("uniform", uniform(), &hi), ("wide", wide(), &lo)] {
        let e = enumerate_extreme_pri(&m).map_err(|e| e.to_string())?;
        ensure(e.ties == 0, format!("{name}: {} tied replacements", e.ties))?;
        ensure(
            &BigUint::from(e.cones.len()) == bound,
            format!("{name}: {} cones", e.cones.len()),
        )?;
        ensure(
            &BigUint::from(e.vertices.len()) == bound,
            format!("{name}: {} vertices", e.vertices.len()),
        )?;
        ensure(
            comonotone_total(&e) == factorial,
            format!("{name}: |A|!|B|! does not sum to 10!"),
        )?;
    }
    let e = enumerate_extreme_pri(&wide()).unwrap();
    ensure(
        e.cones
            .iter()
            .all(|c| c.above.len() == 1 && c.below.len() == 8),
        "wide: some cone is not of shape |A| = 1, |B| = 8",
    )?;
    Ok("(90, 1260); uniform attains 1260, wide attains 90".into())
}

fn pri_matches_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc4);
    let mut ties = 0;
    for n in 3..=5 {
        for i in 0..25 {
            let m = sample::coherent_pri(&mut rng, n, [4, 6, 10, 12, 30][i % 5]);
            let e = enumerate_extreme_pri(&m).map_err(|e| e.to_string())?;
            let rep = build_credal_hrep(&m.to_lower_prevision()).map_err(|e| e.to_string())?;
            let oracle = vertices_bruteforce(&rep.polytope)
                .map_err(|e| e.to_string())?
                .points();
            ensure(
                e.vertices == oracle,
                format!("n = {n}: vertex sets differ for {m:?}"),
            )?;
            ties += e.ties;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), format!("took {took:?}"))?;
    Ok(format!(
        "75 models match the oracle in {took:.2?} ({ties} tied replacements seen)"
    ))
}

fn chains_match_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc5);
    let mut strict_seen = 0;
    for n in 3..=4 {
        let factorial = (1..=n).product::<usize>();
        for i in 0..25 {
            let l = sample::two_monotone(&mut rng, n, i % 2 == 0, 3);
            ensure(
                is_two_monotone(&l),
                "sampler produced a non-2-monotone table",
            )?;
            let e = enumerate_extreme_2mono(&l);
            let rep = build_credal_hrep(&l.to_lower_prevision()).map_err(|e| e.to_string())?;
            let oracle = vertices_bruteforce(&rep.polytope)
                .map_err(|e| e.to_string())?
                .points();
            ensure(e.vertices == oracle, format!("n = {n}: vertex sets differ"))?;
            ensure(e.vertices.len() <= factorial, "more than n! vertices")?;
            if n == 3 && is_strictly_supermodular(&l) {
                strict_seen += 1;
                ensure(
                    e.vertices.len() == 6,
                    format!("strict n = 3 instance with {} vertices", e.vertices.len()),
                )?;
            }
        }
    }
    ensure(
        strict_seen > 0,
        "no strictly supermodular instance at n = 3",
    )?;
    Ok(format!(
        "50 models match the oracle; {strict_seen} strict n = 3 instances have 6 vertices"
    ))
}

fn choquet_is_lp_minimum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc6);
    for n in 3..=4 {
        for i in 0..10 {
            let l = sample::two_monotone(&mut rng, n, i % 3 == 0, 4);
            let rep = build_credal_hrep(&l.to_lower_prevision()).map_err(|e| e.to_string())?;
            let vertices = vertices_bruteforce(&rep.polytope).map_err(|e| e.to_string())?;
            for _ in 0..100 {
                let f = sample::gamble(&mut rng, n, 12, [1, 2, 3, 7][i % 4]);
                let (min, _) = lp_min_over(&vertices, &f.0).map_err(|e| e.to_string())?;
                ensure(
                    choquet(&l, &f) == min,
                    format!("choquet differs from the LP minimum for {f:?}"),
                )?;
            }
        }
    }
    Ok("2000 gambles agree exactly".into())
}

fn pri_comonotone_additivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc7);
    for (name, m) in [("uniform", uniform()), ("wide", wide())] {
        for _ in 0..100 {
            let (f, g) = sample::comonotone_pair(&mut rng, 10, 20);
            let ext = |h: &Gamble| natural_extension_pri(&m, h).map_err(|e| e.to_string());
            let lhs = ext(&(&f + &g))?;
            let rhs = ext(&f)? + ext(&g)?;
            ensure(
                lhs == rhs,
                format!("{name}: additivity fails for {f:?}, {g:?}"),
            )?;
        }
    }
    Ok("200 comonotone pairs are additive".into())
}

fn induced_two_monotone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc8);
    let mut models = 0;
    for n in 3..=5 {
        for i in 0..6 {
            let m = sample::coherent_pri(&mut rng, n, [4, 6, 12][i % 3]);
            let l = induced_2mono(&m).map_err(|e| e.to_string())?;
            ensure(
                is_two_monotone(&l),
                format!("induced table is not 2-monotone for {m:?}"),
            )?;
            for x in 0..n {
                let single = Event::singleton(x);
                ensure(l.value(single) == &m.lower()[x], format!("L({{x{x}}}) ≠ l"))?;
                ensure(
                    l.value(single.complement(n)) == &(int(1) - &m.upper()[x]),
                    format!("L(complement of x{x}) ≠ 1 − u"),
                )?;
            }
            for _ in 0..100 {
                let f = sample::gamble(&mut rng, n, 9, [1, 2, 5][i % 3]);
                let pri = natural_extension_pri(&m, &f).map_err(|e| e.to_string())?;
                ensure(
                    choquet(&l, &f) == pri,
                    format!("choquet ≠ natural extension for {f:?}"),
                )?;
            }
            models += 1;
        }
    }
    Ok(format!("{models} models, 100 gambles each"))
}

fn fan_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc9);
    let l = sample::two_monotone(&mut rng, 4, true, 3);
    let chains = chain_graph(&l);
    let r = verify_graph(&chains, 3);
    ensure(
        r.nodes == 24 && r.regular && r.connected,
        format!("chain fan: {r:?}"),
    )?;

    let pri = enumerate_extreme_pri(&uniform()).map_err(|e| e.to_string())?;
    let r = verify_graph(&pri.graph, 9);
    ensure(
        r.nodes == 1260 && r.regular && r.connected,
        format!("PRI graph: {r:?}"),
    )?;

    let cones: Vec<_> = maximal_chains(4).iter().map(|c| chain_cone(c, 4)).collect();
    for _ in 0..200 {
        let f = sample::generic_gamble(&mut rng, 4);
        let hits = cones
            .iter()
            .filter(|c| c.in_relative_interior(&f.0).unwrap())
            .count();
        ensure(
            hits == 1,
            format!("chain fan: {f:?} lies in {hits} relative interiors"),
        )?;
        let f = sample::generic_gamble(&mut rng, 10);
        let hits = pri
            .cones
            .iter()
            .filter(|c| cone_membership(c, &f) == Membership::RelativeInterior)
            .count();
        ensure(
            hits == 1,
            format!("PRI fan: {f:?} lies in {hits} relative interiors"),
        )?;
    }
    Ok("chain fan n = 4: 24 nodes, 3-regular, connected; PRI n = 10: 1260 nodes, 9-regular, connected; 200 directions covered once".into())
}

fn event_collection_gates() -> Outcome {
    let ev = |xs: &[usize]| Event::from_indices(xs.iter().map(|x| x - 1));
    let col = EventCollection::new([ev(&[1, 2]), ev(&[2, 3]), ev(&[1, 3]), Event::full(4)]);
    match is_event_mesc(&col, 4) {
        Err(EventMescReason::ContainsIndicator { event, alpha, beta }) => {
            ensure(event == ev(&[1, 2, 3]), format!("witness event {event}"))?;
            ensure(
                alpha == vec![rat(1, 2); 3] && beta == int(0),
                format!("witness {alpha:?}, {beta}"),
            )?;
        }
        other => return Err(format!("intersecting triple on four outcomes: {other:?}")),
    }

    let n = 3;
    let full = Event::full(n);
    let cone = |a: Event, b: Event| vec![a.indicator(n), b.indicator(n), full.indicator(n)];
    let mesc = |a: Event, b: Event| is_event_mesc(&EventCollection::new([a, b, full]), n).is_ok();
    for anchor in [ev(&[1, 2]), ev(&[1])] {
        let partners: Vec<Event> = (1..full.0)
            .map(Event)
            .filter(|&b| b != anchor && mesc(anchor, b))
            .collect();
        let expected = if anchor == ev(&[1, 2]) {
            vec![ev(&[1]), ev(&[2])]
        } else {
            vec![ev(&[1, 2]), ev(&[1, 3])]
        };
        ensure(
            partners == expected,
            format!("partners of {anchor}: {partners:?}"),
        )?;
        let adjacent = are_adjacent(&cone(anchor, partners[0]), &cone(anchor, partners[1]))
            .map_err(|e| e.to_string())?;
        ensure(adjacent, format!("cones on {anchor} are not adjacent"))?;
    }
    Ok("witness 1_{x1,x2,x3} = ½(sum); both adjacency pairs confirmed".into())
}

fn regression_models() -> Vec<(String, LowerPrevision)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models");
    let mut out = Vec::new();
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    names.sort();
    for path in names {
        let text = std::fs::read_to_string(&path).unwrap();
        let model = parse_model(&text).unwrap();
        if model.space().len() > 4 {
            continue;
        }
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        out.push((name, model.to_lower_prevision()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc11);
    for i in 0..3 {
        out.push((
            format!("envelope{i}"),
            sample::envelope_lower_prevision(&mut rng, 4, 4, 4),
        ));
        out.push((
            format!("pri{i}"),
            sample::coherent_pri(&mut rng, 4, 6).to_lower_prevision(),
        ));
    }
    out
}

fn normal_cone_additivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc1);
    let (mut models, mut vertices, mut checks) = (0, 0, 0);
    for (name, lp) in regression_models() {
        let Ok(cs) = CredalSet::new(lp) else {
            continue; // incoherent corpus entries
        };
        models += 1;
        let n = cs.dim();
        for v in cs
            .oracle()
            .ok_or(format!("{name}: beyond the oracle"))?
            .points()
        {
            vertices += 1;
            let cone = normal_cone_at(&cs.rep().polytope, &v).map_err(|e| e.to_string())?;
            let pick = |rng: &mut ChaCha8Rng| {
                let mut f: RatVector = vec![Rat::default(); n];
                for g in cone.generators() {
                    f = add(
                        &f,
                        &scale(&rat(rng.gen_range(0..=6), rng.gen_range(1..=3)), g),
                    );
                }
                for g in cone.lineality() {
                    f = add(&f, &scale(&rat(rng.gen_range(-6..=6), 1), g));
                }
                Gamble::new(f)
            };
            for _ in 0..20 {
                let (g, h) = (pick(&mut rng), pick(&mut rng));
                let ok = cs
                    .cone_additivity_check(&v, &g, &h)
                    .map_err(|e| e.to_string())?;
                ensure(
                    ok == Some(true),
                    format!("{name}: additivity fails at {v:?}"),
                )?;
                checks += 1;
            }
        }
    }
    Ok(format!(
        "{models} models, {vertices} vertices, {checks} pairs"
    ))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 11] = [
        (1, uniform_pri_count),
        (2, wide_pri_count),
        (3, count_bounds_attained),
        (4, pri_matches_oracle),
        (5, chains_match_oracle),
        (6, choquet_is_lp_minimum),
        (7, pri_comonotone_additivity),
        (8, induced_two_monotone),
        (9, fan_structure),
        (10, event_collection_gates),
        (11, normal_cone_additivity),
    ];
    let mut failed = BTreeMap::new();
    for (i, run) in criteria {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {i:>2}: PASS  {detail}"),
            Err(why) => {
                println!("criterion {i:>2}: FAIL  {why}");
                failed.insert(i, why);
            }
        }
    }
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
