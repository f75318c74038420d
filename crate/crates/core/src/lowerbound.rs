//! Classical query experiment separating the translated-pair distribution
//! `D1` from the independent-pair distribution `D2`.
//!
//! The distinguisher queries `f0` at `ceil(q/2)` and `f1` at `floor(q/2)`
//! uniform points and answers `D1` iff some value appears on both sides.
//! Its advantage stays small until `q` is of order `sqrt|G|`.
//!
//! The experiment draws the pair functions lazily: a value is sampled the
//! first time its point is queried and memoized after that. This is the
//! same distribution as a fully materialized draw but costs `O(q)` per
//! trial instead of `O(|G|)`.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::oracle_gen::cubic_universe;
use crate::qsim::PairOracle;
use crate::rng::{derive_seed, rng_from_seed, TrialRng};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Wilson score interval for `successes` out of `n`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> Interval {
    if n == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        lo: (center - half).max(0.0),
        hi: (center + half).min(1.0),
    }
}

/// Point-query access to a pair `(f0, f1)`.
pub trait PairQuery {
    fn domain_size(&self) -> usize;
    fn query_point(&mut self, x: Element, b: u8) -> u64;
}

impl PairQuery for &PairOracle {
    fn domain_size(&self) -> usize {
        self.group().size()
    }

    fn query_point(&mut self, x: Element, b: u8) -> u64 {
        self.query(x, b)
    }
}

/// A pair drawn from `D1` (with translation `u`) or `D2` (without), with
/// values sampled on first query from `|G|^3` labels.
pub struct LazyPair {
    group: GroupSpec,
    translation: Option<Element>,
    universe: u128,
    values: [HashMap<usize, u64>; 2],
    rng: TrialRng,
    queries: u64,
}

impl LazyPair {
    /// `f0(x) = f1(x + u)` for a uniform `u`, `f1` uniform.
    pub fn d1(g: &GroupSpec, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let u = Element::from_index(rng.gen_range(0..g.size()));
        Self::new(g, Some(u), rng)
    }

    /// Independent uniform `f0` and `f1`.
    pub fn d2(g: &GroupSpec, seed: u64) -> Self {
        Self::new(g, None, rng_from_seed(seed))
    }

    fn new(g: &GroupSpec, translation: Option<Element>, rng: TrialRng) -> Self {
        LazyPair {
            group: g.clone(),
            translation,
            universe: cubic_universe(g),
            values: [HashMap::new(), HashMap::new()],
            rng,
            queries: 0,
        }
    }

    pub fn translation(&self) -> Option<Element> {
        self.translation
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    fn value(&mut self, side: usize, x: Element) -> u64 {
        let (rng, universe) = (&mut self.rng, self.universe);
        *self.values[side].entry(x.index()).or_insert_with(|| {
            if universe > u64::MAX as u128 {
                rng.gen()
            } else {
                rng.gen_range(0..universe as u64)
            }
        })
    }
}

impl PairQuery for LazyPair {
    fn domain_size(&self) -> usize {
        self.group.size()
    }

    fn query_point(&mut self, x: Element, b: u8) -> u64 {
        self.queries += 1;
        match self.translation {
            Some(u) if b == 0 => {
                let xu = self.group.op(x, u);
                self.value(1, xu)
            }
            Some(_) => self.value(1, x),
            None => self.value(b as usize, x),
        }
    }
}

/// Runs the cross-collision distinguisher with `q` point queries; `true`
/// means "looks like D1".
pub fn cross_collision<P: PairQuery, R: Rng + ?Sized>(mut pair: P, q: u64, rng: &mut R) -> bool {
    let n = pair.domain_size();
    let left: Vec<u64> = (0..q.div_ceil(2))
        .map(|_| pair.query_point(Element::from_index(rng.gen_range(0..n)), 0))
        .collect();
    let mut right: Vec<u64> = (0..q / 2)
        .map(|_| pair.query_point(Element::from_index(rng.gen_range(0..n)), 1))
        .collect();
    right.sort_unstable();
    left.iter().any(|v| right.binary_search(v).is_ok())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub group_order: u64,
    pub q: u64,
    pub trials: u64,
    pub seed: u64,
    pub accepted_d1: u64,
    pub accepted_d2: u64,
    pub p1: f64,
    pub p2: f64,
    pub advantage: f64,
    pub p1_interval: Interval,
    pub p2_interval: Interval,
    /// Range of `|p1 - p2|` consistent with both Wilson intervals.
    pub advantage_interval: Interval,
    pub queries_per_trial: u64,
}

/// `trials` fresh draws from each distribution. Trial `i` on `D1` draws its
/// pair from stream `4i` of `seed` and its query points from `4i + 1`; on
/// `D2` it uses streams `4i + 2` and `4i + 3`.
pub fn run_lower_bound(g: &GroupSpec, q: u64, trials: u64, seed: u64) -> Result<LowerBoundReport> {
    if !g.is_abelian_product() {
        return Err(Error::NotAbelian);
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let outcomes: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let d1 = LazyPair::d1(g, derive_seed(seed, 4 * i));
            let a = cross_collision(d1, q, &mut rng_from_seed(derive_seed(seed, 4 * i + 1)));
            let d2 = LazyPair::d2(g, derive_seed(seed, 4 * i + 2));
            let b = cross_collision(d2, q, &mut rng_from_seed(derive_seed(seed, 4 * i + 3)));
            (a, b)
        })
        .collect();
    let accepted_d1 = outcomes.iter().filter(|o| o.0).count() as u64;
    let accepted_d2 = outcomes.iter().filter(|o| o.1).count() as u64;
    let p1 = accepted_d1 as f64 / trials as f64;
    let p2 = accepted_d2 as f64 / trials as f64;
    let i1 = wilson_interval(accepted_d1, trials, Z95);
    let i2 = wilson_interval(accepted_d2, trials, Z95);
    Ok(LowerBoundReport {
        group_order: g.order(),
        q,
        trials,
        seed,
        accepted_d1,
        accepted_d2,
        p1,
        p2,
        advantage: (p1 - p2).abs(),
        p1_interval: i1,
        p2_interval: i2,
        advantage_interval: Interval {
            lo: (i1.lo - i2.hi).max(0.0).max(i2.lo - i1.hi),
            hi: (i1.hi - i2.lo).max(i2.hi - i1.lo).min(1.0),
        },
        queries_per_trial: q,
    })
}
