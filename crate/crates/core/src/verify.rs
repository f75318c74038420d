//! Numerical verification suites for the state-space identities and distance
//! bounds that the testers' analysis relies on.
//!
//! Each suite draws seeded random functions (or pairs) on the given group
//! and reports the largest deviation seen. Identities report `|lhs - rhs|`;
//! bounds report `max(0, lhs - rhs)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::group::{
    all_subgroups, irrep_table, normal_closure, normal_subgroups, GroupSpec, Irrep, Subgroup,
};
use crate::oracle_gen::{
    dist_to_per, dist_to_range, hidden_translation_pair, random_periodic, random_table,
};
use crate::qsim::{
    coset_state_prediction, fourier_sampling_distribution_general,
    fourier_sampling_distribution_pair_general, fourier_sampling_distribution_with, pair_defect,
    qft_coset_state, state_defect, superposition_distance_sq, FourierMethod, FunctionOracle,
    PairOracle, SamplingDistribution,
};
use crate::rng::{derive_seed, rng_from_seed};
use crate::Fraction;

pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub cases: u64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl LemmaCheck {
    fn new(name: &'static str, cases: u64, max_deviation: f64, tolerance: f64) -> Self {
        LemmaCheck {
            name,
            cases,
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub trials: usize,
    /// Size of the value set for random functions.
    pub values: u64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: 50,
            values: 5,
            seed: 0,
        }
    }
}

fn ratio(r: &Fraction) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Subgroups for which the identities are stated: all of them when `G` is
/// abelian, the normal ones otherwise.
pub fn checked_subgroups(g: &GroupSpec) -> Vec<Subgroup> {
    if g.is_abelian() {
        all_subgroups(g)
    } else {
        normal_subgroups(g)
    }
}

/// Probability mass on labels whose irrep is *not* trivial on `h`, i.e.
/// outside `H^perp`.
pub fn mass_outside_perp(dist: &SamplingDistribution, table: &[Irrep], h: &Subgroup) -> f64 {
    dist.mass_where(|o| !table[o.label].is_trivial_on(h))
}

/// Mass on `(rho, 1)` with `rho` trivial on `h`.
pub fn flagged_mass_in_perp(dist: &SamplingDistribution, table: &[Irrep], h: &Subgroup) -> f64 {
    dist.mass_where(|o| o.bit == Some(1) && table[o.label].is_trivial_on(h))
}

/// Per-trial maximum of `check` over `trials` seeded trials, plus the total
/// number of cases checked.
fn over_trials<F>(cfg: &VerifyConfig, salt: u64, check: F) -> Result<(u64, f64)>
where
    F: Fn(&mut crate::rng::TrialRng) -> Result<(u64, f64)> + Sync,
{
    let results: Vec<(u64, f64)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(derive_seed(cfg.seed, salt), i));
            check(&mut rng)
        })
        .collect::<Result<_>>()?;
    Ok(results
        .into_iter()
        .fold((0, 0.0), |(c, m), (ci, mi)| (c + ci, m.max(mi))))
}

/// `dist(f, g) = 1/2 || |f> - |g> ||^2`, compared exactly.
pub fn check_state_distance(g: &GroupSpec, cfg: &VerifyConfig) -> Result<LemmaCheck> {
    let (cases, dev) = over_trials(cfg, 1, |rng| {
        let a = random_table(g, cfg.values as u128, rng)?;
        let b = random_table(g, cfg.values as u128, rng)?;
        let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count() as u128;
        let dist = Fraction::new(differing, g.order() as u128);
        let half_sq = superposition_distance_sq(&a, &b) / Fraction::from(2);
        let dev = if dist == half_sq {
            0.0
        } else {
            (ratio(&dist) - ratio(&half_sq))
                .abs()
                .max(f64::MIN_POSITIVE)
        };
        Ok((1, dev))
    })?;
    Ok(LemmaCheck::new("state-distance identity", cases, dev, 0.0))
}

fn distribution(f: &FunctionOracle) -> Result<SamplingDistribution> {
    fourier_sampling_distribution_general(f)
}

/// `|| |f> - |mu^{f,H}> ||^2 = Pr[outcome outside H^perp]`, and the
/// distance bound `dist(f, Per(H)) <= 2 * defect`.
pub fn check_defect(g: &GroupSpec, cfg: &VerifyConfig) -> Result<(LemmaCheck, LemmaCheck)> {
    let subs = checked_subgroups(g);
    let table = irrep_table(g)?;
    let both: Vec<(u64, f64, f64)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(derive_seed(cfg.seed, 2), i));
            let f = FunctionOracle::new(
                g.clone(),
                random_table(g, cfg.values as u128, &mut rng)?,
                cfg.values as u128,
            )?;
            let dist = distribution(&f)?;
            let mut identity: f64 = 0.0;
            let mut bound: f64 = 0.0;
            for h in &subs {
                let defect = state_defect(g, f.table(), h)?;
                identity = identity.max((defect - mass_outside_perp(&dist, &table, h)).abs());
                let d = ratio(&dist_to_per(g, f.table(), h));
                bound = bound.max(d - 2.0 * defect);
            }
            Ok((subs.len() as u64, identity, bound.max(0.0)))
        })
        .collect::<Result<_>>()?;
    let cases = both.iter().map(|b| b.0).sum();
    let identity = both.iter().map(|b| b.1).fold(0.0, f64::max);
    let bound = both.iter().map(|b| b.2).fold(0.0, f64::max);
    Ok((
        LemmaCheck::new("defect identity", cases, identity, IDENTITY_TOL),
        LemmaCheck::new("periodic distance bound", cases, bound, IDENTITY_TOL),
    ))
}

/// `QFT |xH> = |H^perp(x)>` for every `x` and every checked normal `H`.
pub fn check_coset_states(g: &GroupSpec) -> Result<LemmaCheck> {
    let subs: Vec<Subgroup> = checked_subgroups(g)
        .into_iter()
        .filter(|h| h.is_normal())
        .collect();
    let mut cases = 0;
    let mut dev: f64 = 0.0;
    for h in &subs {
        for x in g.elements() {
            let got = qft_coset_state(g, x, h)?;
            let want = coset_state_prediction(g, x, h)?;
            for (a, b) in got.iter().zip(&want) {
                dev = dev.max((a - b).norm());
            }
            cases += 1;
        }
    }
    Ok(LemmaCheck::new(
        "coset state mapping",
        cases,
        dev,
        IDENTITY_TOL,
    ))
}

/// `|| |f,H> ||^2 = 2 Pr[(rho, 1), rho in H^perp]` and the distance bound
/// `dist(f, Range(H)) <= |H| Pr[(rho, 1), rho in H^perp]`.
pub fn check_pair(g: &GroupSpec, cfg: &VerifyConfig) -> Result<(LemmaCheck, LemmaCheck)> {
    let subs: Vec<Subgroup> = checked_subgroups(g)
        .into_iter()
        .filter(|h| h.is_normal())
        .collect();
    let table = irrep_table(g)?;
    let both: Vec<(u64, f64, f64)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(derive_seed(cfg.seed, 3), i));
            let s = cfg.values as u128;
            let f = PairOracle::new(
                g.clone(),
                random_table(g, s, &mut rng)?,
                random_table(g, s, &mut rng)?,
                s,
            )?;
            let dist = fourier_sampling_distribution_pair_general(&f)?;
            let mut identity: f64 = 0.0;
            let mut bound: f64 = 0.0;
            for h in &subs {
                let p = flagged_mass_in_perp(&dist, &table, h);
                let defect = pair_defect(g, f.f0(), f.f1(), h)?;
                identity = identity.max((defect - 2.0 * p).abs());
                let d = ratio(&dist_to_range(g, f.f0(), f.f1(), h));
                bound = bound.max(d - h.order() as f64 * p);
            }
            Ok((subs.len() as u64, identity, bound.max(0.0)))
        })
        .collect::<Result<_>>()?;
    let cases = both.iter().map(|b| b.0).sum();
    let identity = both.iter().map(|b| b.1).fold(0.0, f64::max);
    let bound = both.iter().map(|b| b.2).fold(0.0, f64::max);
    Ok((
        LemmaCheck::new("pair defect identity", cases, identity, IDENTITY_TOL),
        LemmaCheck::new("range distance bound", cases, bound, IDENTITY_TOL),
    ))
}

/// Periodic functions put no mass outside `H^perp`; translated pairs put no
/// `b = 1` mass inside it.
pub fn check_completeness_support(g: &GroupSpec, cfg: &VerifyConfig) -> Result<LemmaCheck> {
    let subs: Vec<Subgroup> = checked_subgroups(g)
        .into_iter()
        .filter(|h| h.is_normal())
        .collect();
    let table = irrep_table(g)?;
    let (cases, dev) = over_trials(cfg, 4, |rng| {
        let mut dev: f64 = 0.0;
        for h in &subs {
            let f = random_periodic(g, h, cfg.values as u128, rng)?;
            dev = dev.max(mass_outside_perp(&distribution(&f)?, &table, h));
        }
        let u = crate::group::Element::from_index(rand::Rng::gen_range(rng, 0..g.size()));
        let pair = hidden_translation_pair(g, u, cfg.values as u128, rng)?;
        let h = normal_closure(g, &[u])?;
        let dist = fourier_sampling_distribution_pair_general(&pair)?;
        dev = dev.max(flagged_mass_in_perp(&dist, &table, &h));
        Ok((subs.len() as u64 + 1, dev))
    })?;
    Ok(LemmaCheck::new(
        "completeness support",
        cases,
        dev,
        crate::qsim::SUPPORT_TOL,
    ))
}

/// Distributions sum to 1; on abelian products the character, irrep and FFT
/// routes agree entrywise.
pub fn check_distributions(
    g: &GroupSpec,
    cfg: &VerifyConfig,
) -> Result<(LemmaCheck, Option<LemmaCheck>)> {
    let abelian = g.is_abelian_product();
    let both: Vec<(f64, f64)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(derive_seed(cfg.seed, 5), i));
            let f = FunctionOracle::new(
                g.clone(),
                random_table(g, cfg.values as u128, &mut rng)?,
                cfg.values as u128,
            )?;
            let general = distribution(&f)?;
            let mut norm = (general.total() - 1.0).abs();
            let mut agree: f64 = 0.0;
            if abelian {
                let direct = fourier_sampling_distribution_with(&f, FourierMethod::Direct)?;
                let fft = fourier_sampling_distribution_with(&f, FourierMethod::Fft)?;
                norm = norm.max((direct.total() - 1.0).abs());
                for ((a, b), c) in direct
                    .probabilities()
                    .iter()
                    .zip(general.probabilities())
                    .zip(fft.probabilities())
                {
                    agree = agree.max((a - b).abs()).max((a - c).abs());
                }
            }
            Ok((norm, agree))
        })
        .collect::<Result<_>>()?;
    let cases = both.len() as u64;
    let norm = both.iter().map(|b| b.0).fold(0.0, f64::max);
    let agree = both.iter().map(|b| b.1).fold(0.0, f64::max);
    Ok((
        LemmaCheck::new("normalization", cases, norm, IDENTITY_TOL),
        abelian.then(|| LemmaCheck::new("abelian/general agreement", cases, agree, IDENTITY_TOL)),
    ))
}

/// Runs every suite on `g`.
pub fn verify_lemmas(g: &GroupSpec, cfg: &VerifyConfig) -> Result<Vec<LemmaCheck>> {
    let mut out = vec![check_state_distance(g, cfg)?];
    let (identity, bound) = check_defect(g, cfg)?;
    out.push(identity);
    out.push(bound);
    out.push(check_coset_states(g)?);
    let (identity, bound) = check_pair(g, cfg)?;
    out.push(identity);
    out.push(bound);
    out.push(check_completeness_support(g, cfg)?);
    let (norm, agree) = check_distributions(g, cfg)?;
    out.push(norm);
    out.extend(agree);
    Ok(out)
}
