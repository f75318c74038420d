//! The two Fourier-sampling testers: larger period beyond a known normal
//! subgroup `K`, and common coset range `CCR(k, t)`.
//!
//! Each tester draws its full sample count from the exact observation
//! distribution, charging one oracle query per draw, and then evaluates a pure
//! acceptance predicate on the transcript. The predicates are exposed
//! separately so synthetic transcripts can be checked, and so acceptance with
//! probability exactly 1 can be certified from a distribution's support.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{
    irrep_table, orthogonal, subgroup_close, t_generated_normal_subgroups_with_budget, GroupSpec,
    Irrep, Subgroup, DEFAULT_TUPLE_BUDGET,
};
use crate::qsim::{
    fourier_sampling_distribution, fourier_sampling_distribution_general,
    fourier_sampling_distribution_pair, outcome_json, sample, FunctionOracle, Outcome,
    OutcomeSpace, PairOracle, SamplingDistribution,
};
use crate::rng::rng_from_seed;

/// `ceil(x)`, except that values within `1e-9` relative of an integer round to
/// it, so `16 / 0.1` gives 160 rather than 161.
fn ceil_tolerant(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// `N = ceil(4 log2|G| / delta)`.
pub fn period_sample_count(group_order: u64, delta: f64) -> usize {
    ceil_tolerant(4.0 * (group_order as f64).log2() / delta)
}

/// `N = ceil(2 k t log2|G| / delta)`, with `log2|G|` taken as 1 on the trivial
/// group so that the tester still samples.
pub fn ccr_sample_count(group_order: u64, k: u64, t: u32, delta: f64) -> usize {
    let log = (group_order.max(2) as f64).log2();
    ceil_tolerant(2.0 * k as f64 * t as f64 * log / delta)
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )))
    }
}

#[derive(Clone, Debug)]
pub struct PeriodParams {
    pub delta: f64,
    /// The known normal subgroup `K`.
    pub known: Subgroup,
}

impl PeriodParams {
    pub fn new(delta: f64, known: Subgroup) -> Result<Self> {
        check_delta(delta)?;
        if !known.is_normal() {
            return Err(Error::NotNormal);
        }
        Ok(PeriodParams { delta, known })
    }
}

#[derive(Clone, Debug)]
pub struct CcrParams {
    pub delta: f64,
    pub k: u64,
    pub t: u32,
    /// Work cap for the `t`-generated subgroup enumeration.
    pub budget: u64,
}

impl CcrParams {
    /// Requires `k >= 1` and `1 <= t <= max(1, floor(log2 k))`.
    pub fn new(delta: f64, k: u64, t: u32) -> Result<Self> {
        check_delta(delta)?;
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let max_t = (63 - k.leading_zeros()).max(1);
        if t == 0 || t > max_t {
            return Err(Error::InvalidParameter(format!(
                "t must lie in 1..={max_t} for k = {k}, got {t}"
            )));
        }
        Ok(CcrParams {
            delta,
            k,
            t,
            budget: DEFAULT_TUPLE_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

/// Outcome of one tester run, with its full transcript.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub accepted: bool,
    pub space: OutcomeSpace,
    pub samples: Vec<Outcome>,
    pub n: usize,
    pub queries_used: u64,
    pub seed: u64,
    /// The subgroup that made the acceptance predicate true, if any.
    pub witness: Option<Subgroup>,
}

impl Verdict {
    /// `{accepted, N, queries_used, seed, samples, witness}`.
    pub fn to_json(&self, g: &GroupSpec) -> Value {
        json!({
            "accepted": self.accepted,
            "N": self.n,
            "queries_used": self.queries_used,
            "seed": self.seed,
            "samples": self
                .samples
                .iter()
                .map(|&o| outcome_json(g, self.space, o))
                .collect::<Vec<_>>(),
            "witness": self.witness.as_ref().map(|h| h.to_spec_string(g)),
        })
    }
}

/// Result of an acceptance predicate.
#[derive(Clone, Debug, PartialEq)]
pub struct Acceptance {
    pub accepted: bool,
    pub witness: Option<Subgroup>,
}

impl Acceptance {
    fn reject() -> Self {
        Acceptance {
            accepted: false,
            witness: None,
        }
    }
}

fn labels(samples: &[Outcome]) -> Vec<usize> {
    let mut l: Vec<usize> = samples.iter().map(|o| o.label).collect();
    l.sort_unstable();
    l.dedup();
    l
}

/// Abelian predicate: accept iff `<y_i> < K^perp` (strict). The witness is
/// `<y_i>^perp`, a subgroup strictly above `K`.
pub fn accept_check_period(
    g: &GroupSpec,
    samples: &[Outcome],
    known: &Subgroup,
) -> Result<Acceptance> {
    let ys: Vec<_> = labels(samples)
        .into_iter()
        .map(crate::group::Element::from_index)
        .collect();
    let generated = subgroup_close(g, &ys)?;
    let known_perp = orthogonal(g, known)?;
    if generated.is_proper_subgroup_of(&known_perp) {
        Ok(Acceptance {
            accepted: true,
            witness: Some(orthogonal(g, &generated)?),
        })
    } else {
        Ok(Acceptance::reject())
    }
}

/// General predicate: accept iff `∩ ker rho_i > K` (strict). The witness is
/// the kernel intersection.
pub fn accept_check_period_general(
    g: &GroupSpec,
    table: &[Irrep],
    samples: &[Outcome],
    known: &Subgroup,
) -> Result<Acceptance> {
    let mut common = Subgroup::whole(g);
    for label in labels(samples) {
        let rho = table
            .get(label)
            .ok_or_else(|| Error::InvalidParameter(format!("no irrep with index {label}")))?;
        common = common.intersection(g, rho.kernel());
    }
    if known.is_proper_subgroup_of(&common) {
        Ok(Acceptance {
            accepted: true,
            witness: Some(common),
        })
    } else {
        Ok(Acceptance::reject())
    }
}

/// Whether the outcome `label` lies in `H^perp`, i.e. is trivial on `H`.
enum LabelKind<'a> {
    Characters,
    Irreps(&'a [Irrep]),
}

impl LabelKind<'_> {
    fn trivial_on(&self, g: &GroupSpec, label: usize, h: &Subgroup) -> bool {
        match self {
            LabelKind::Characters => {
                let y = crate::group::Element::from_index(label);
                h.generators().iter().all(|&x| g.character_phase(y, x) == 0)
            }
            LabelKind::Irreps(table) => table[label].is_trivial_on(h),
        }
    }
}

/// CCR predicate: accept iff some normal `H` with `|H| <= k`, the normal
/// closure of at most `t` elements, has every `b = 1` sample outside `H^perp`.
/// The witness is the first such `H` in canonical order.
pub fn accept_check_ccr(
    g: &GroupSpec,
    space: OutcomeSpace,
    samples: &[Outcome],
    params: &CcrParams,
) -> Result<Acceptance> {
    let table;
    let kind = match space {
        OutcomeSpace::CharactersWithBit => LabelKind::Characters,
        OutcomeSpace::IrrepsWithBit => {
            table = irrep_table(g)?;
            LabelKind::Irreps(&table)
        }
        _ => {
            return Err(Error::InvalidParameter(
                "CCR samples must carry a Z2 bit".into(),
            ))
        }
    };
    let flagged: Vec<usize> = labels(
        &samples
            .iter()
            .copied()
            .filter(|o| o.bit == Some(1))
            .collect::<Vec<_>>(),
    );
    let candidates =
        t_generated_normal_subgroups_with_budget(g, params.k, params.t, params.budget)?;
    let witness = candidates
        .into_iter()
        .find(|h| flagged.iter().all(|&label| !kind.trivial_on(g, label, h)));
    Ok(Acceptance {
        accepted: witness.is_some(),
        witness,
    })
}

/// Draws `n` Fourier samples, charging one query each.
fn draw(dist: &SamplingDistribution, n: usize, seed: u64) -> Vec<Outcome> {
    let mut rng = rng_from_seed(seed);
    sample(dist, &mut rng, n)
}

fn degenerate_reject(space: OutcomeSpace, seed: u64) -> Verdict {
    Verdict {
        accepted: false,
        space,
        samples: Vec::new(),
        n: 0,
        queries_used: 0,
        seed,
        witness: None,
    }
}

/// Larger-period tester for abelian products.
///
/// When `K = G` no larger period exists and the tester rejects without
/// sampling.
pub fn test_larger_period(f: &FunctionOracle, params: &PeriodParams, seed: u64) -> Result<Verdict> {
    let g = f.group();
    if !g.is_abelian_product() {
        return Err(Error::NotAbelian);
    }
    if params.known.order() == g.order() {
        return Ok(degenerate_reject(OutcomeSpace::Characters, seed));
    }
    let n = period_sample_count(g.order(), params.delta);
    let dist = fourier_sampling_distribution(f)?;
    let before = f.queries();
    let samples = draw(&dist, n, seed);
    f.charge_superposition_queries(n as u64);
    let acc = accept_check_period(g, &samples, &params.known)?;
    Ok(Verdict {
        accepted: acc.accepted,
        space: dist.space(),
        samples,
        n,
        queries_used: f.queries() - before,
        seed,
        witness: acc.witness,
    })
}

/// Larger-period tester for any supported group, observing irrep labels.
pub fn test_larger_period_general(
    f: &FunctionOracle,
    params: &PeriodParams,
    seed: u64,
) -> Result<Verdict> {
    let g = f.group();
    if params.known.order() == g.order() {
        return Ok(degenerate_reject(OutcomeSpace::Irreps, seed));
    }
    let table = irrep_table(g)?;
    let n = period_sample_count(g.order(), params.delta);
    let dist = fourier_sampling_distribution_general(f)?;
    let before = f.queries();
    let samples = draw(&dist, n, seed);
    f.charge_superposition_queries(n as u64);
    let acc = accept_check_period_general(g, &table, &samples, &params.known)?;
    Ok(Verdict {
        accepted: acc.accepted,
        space: dist.space(),
        samples,
        n,
        queries_used: f.queries() - before,
        seed,
        witness: acc.witness,
    })
}

/// Common-coset-range tester on `G x Z2`.
pub fn test_common_coset_range(f: &PairOracle, params: &CcrParams, seed: u64) -> Result<Verdict> {
    let g = f.group();
    let n = ccr_sample_count(g.order(), params.k, params.t, params.delta);
    let dist = fourier_sampling_distribution_pair(f)?;
    let before = f.queries();
    let samples = draw(&dist, n, seed);
    f.charge_superposition_queries(n as u64);
    let acc = accept_check_ccr(g, dist.space(), &samples, params)?;
    Ok(Verdict {
        accepted: acc.accepted,
        space: dist.space(),
        samples,
        n,
        queries_used: f.queries() - before,
        seed,
        witness: acc.witness,
    })
}

/// True iff the period predicate accepts the whole support of `dist`. The
/// predicate only gets easier on subsets of outcomes, so this proves the
/// tester accepts with probability exactly 1.
pub fn certifies_period_acceptance(dist: &SamplingDistribution, known: &Subgroup) -> Result<bool> {
    let g = dist.group();
    if known.order() == g.order() {
        return Ok(false);
    }
    let support = dist.support();
    let acc = match dist.space() {
        OutcomeSpace::Characters => accept_check_period(g, &support, known)?,
        OutcomeSpace::Irreps => accept_check_period_general(g, &irrep_table(g)?, &support, known)?,
        _ => {
            return Err(Error::InvalidParameter(
                "period certificates need an unpaired distribution".into(),
            ))
        }
    };
    Ok(acc.accepted)
}

/// True iff the CCR predicate accepts the whole support of `dist`, proving
/// acceptance with probability exactly 1.
pub fn certifies_ccr_acceptance(dist: &SamplingDistribution, params: &CcrParams) -> Result<bool> {
    Ok(accept_check_ccr(dist.group(), dist.space(), &dist.support(), params)?.accepted)
}
