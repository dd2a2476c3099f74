//! Seeded random instances: gambles, coherent interval models and
//! 2-monotone lower probabilities. Values live on coarse rational grids so
//! that ties and degenerate vertices show up regularly.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chains2mono::LowerProbability;
use crate::credal::{Event, Gamble, LowerPrevision, OutcomeSpace};
use crate::exactla::{int, Rat};
use crate::pri::{is_coherent_pri, PriModel};

fn grid<R: Rng>(rng: &mut R, lo: i64, hi: i64, denom: i64) -> Rat {
    Rat::new(rng.gen_range(lo..=hi).into(), denom.into())
}

/// Integer-over-`denom` values in `[-range, range]`.
pub fn gamble<R: Rng>(rng: &mut R, n: usize, range: i64, denom: i64) -> Gamble {
    Gamble::new((0..n).map(|_| grid(rng, -range, range, denom)).collect())
}

/// A gamble with pairwise distinct values.
pub fn generic_gamble<R: Rng>(rng: &mut R, n: usize) -> Gamble {
    let mut out: Vec<Rat> = Vec::with_capacity(n);
    while out.len() < n {
        let denom = rng.gen_range(1..=50);
        let v = grid(rng, -10_000, 10_000, denom);
        if !out.contains(&v) {
            out.push(v);
        }
    }
    Gamble::new(out)
}

/// Two gambles that are nondecreasing along one random ordering.
pub fn comonotone_pair<R: Rng>(rng: &mut R, n: usize, range: i64) -> (Gamble, Gamble) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut draw = || {
        let mut vals: Vec<Rat> = (0..n).map(|_| grid(rng, -range, range, 1)).collect();
        vals.sort();
        let mut g = vec![Rat::default(); n];
        for (pos, &x) in order.iter().enumerate() {
            g[x] = vals[pos].clone();
        }
        Gamble::new(g)
    };
    let f = draw();
    let g = draw();
    (f, g)
}

/// A coherent interval model around a random mass vector, tightened to
/// its reachable bounds. Denominators are multiples of `denom`.
pub fn coherent_pri<R: Rng>(rng: &mut R, n: usize, denom: i64) -> PriModel {
    let space = OutcomeSpace::numbered(n).expect("n ≥ 2");
    loop {
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=denom)).collect();
        let total: i64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        let scale = total * denom;
        let mut lower = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        for w in &weights {
            let p = Rat::new((w * denom).into(), scale.into());
            let dl = grid(rng, 0, denom / 2, denom);
            let du = grid(rng, 0, denom / 2, denom);
            lower.push((&p - dl).max(int(0)));
            upper.push((&p + du).min(int(1)));
        }
        let raw = PriModel::new(space.clone(), lower, upper).expect("bounds in order");
        let (lo, up) = is_coherent_pri(&raw)
            .repaired
            .expect("contains the mass vector");
        let model = PriModel::new(space.clone(), lo, up).expect("tightening keeps order");
        debug_assert!(is_coherent_pri(&model).coherent);
        return model;
    }
}

/// A random mass vector on the grid `1/denom`.
pub fn mass_vector<R: Rng>(rng: &mut R, n: usize, denom: i64) -> Vec<Rat> {
    loop {
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=denom)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w
                .into_iter()
                .map(|x| Rat::new(x.into(), total.into()))
                .collect();
        }
    }
}

/// Lower envelope of `points` random mass vectors, assessed on `gambles`
/// random gambles. Coherent by construction.
pub fn envelope_lower_prevision<R: Rng>(
    rng: &mut R,
    n: usize,
    points: usize,
    gambles: usize,
) -> LowerPrevision {
    let space = OutcomeSpace::numbered(n).expect("n ≥ 2");
    let ps: Vec<Vec<Rat>> = (0..points.max(1)).map(|_| mass_vector(rng, n, 6)).collect();
    let mut lp = LowerPrevision::new(space);
    for _ in 0..gambles {
        let f = gamble(rng, n, 3, 1);
        if f.is_constant() {
            continue;
        }
        let lower = ps.iter().map(|p| f.expectation(p)).min().expect("nonempty");
        lp.add_lower(f, lower).expect("lengths match");
    }
    lp
}

/// A belief function from random masses on nonempty events. With
/// `strict`, every mass is positive and the result is strictly
/// supermodular.
pub fn two_monotone<R: Rng>(
    rng: &mut R,
    n: usize,
    strict: bool,
    max_mass: i64,
) -> LowerProbability {
    let space = OutcomeSpace::numbered(n).expect("n ≥ 2");
    let size = 1usize << n;
    loop {
        let lo = if strict { 1 } else { 0 };
        let mass: Vec<i64> = (0..size)
            .map(|m| {
                if m == 0 {
                    0
                } else {
                    rng.gen_range(lo..=max_mass)
                }
            })
            .collect();
        let total: i64 = mass.iter().sum();
        if total == 0 {
            continue;
        }
        let values = (0..size as u64)
            .map(|a| {
                let s: i64 = (1..size as u64)
                    .filter(|&b| Event(b).is_subset(Event(a)))
                    .map(|b| mass[b as usize])
                    .sum();
                Rat::new(s.into(), total.into())
            })
            .collect();
        return LowerProbability::new(space, values).expect("belief functions are monotone");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains2mono::{is_comonotone, is_strictly_supermodular, is_two_monotone};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_their_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=5 {
            assert!(is_coherent_pri(&coherent_pri(&mut rng, n, 12)).coherent);
            let (f, g) = comonotone_pair(&mut rng, n, 5);
            assert!(is_comonotone(&[f, g]));
            let f = generic_gamble(&mut rng, n);
            assert!(f
                .0
                .iter()
                .enumerate()
                .all(|(i, a)| f.0[..i].iter().all(|b| a != b)));
        }
        for n in 2..=4 {
            assert!(is_two_monotone(&two_monotone(&mut rng, n, false, 3)));
            assert!(is_strictly_supermodular(&two_monotone(
                &mut rng, n, true, 3
            )));
        }
    }
}
