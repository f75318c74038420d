//! Instance generators and exact distance-to-property oracles.
//!
//! Distances are exact rationals. `Per(H)` is the set of `H`-periodic
//! functions, `Range(H)` the set of `H`-similar pairs (equal value multisets
//! on every coset of `H`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{
    minimal_overgroups, normal_closure, parse_group_spec, t_generated_normal_subgroups_with_budget,
    Element, GroupSpec, Subgroup,
};
use crate::qsim::{FunctionOracle, PairOracle};
use crate::rng::rng_from_seed;
use crate::Fraction;

/// Value universe of size `2^64`: labels are uniform `u64`s.
pub const WIDE_UNIVERSE: u128 = 1 << 64;

fn random_value<R: Rng + ?Sized>(rng: &mut R, universe: u128) -> u64 {
    if universe >= WIDE_UNIVERSE {
        rng.gen()
    } else {
        rng.gen_range(0..universe as u64)
    }
}

/// `|G|^3` when it fits below `2^64`, otherwise the wide universe.
pub fn cubic_universe(g: &GroupSpec) -> u128 {
    let n = g.order() as u128;
    (n * n * n).min(WIDE_UNIVERSE)
}

fn check_values(s_count: u128) -> Result<()> {
    if s_count == 0 {
        return Err(Error::InvalidParameter("value set must be nonempty".into()));
    }
    Ok(())
}

/// Uniform random table `G -> 0..s_count`.
pub fn random_table<R: Rng + ?Sized>(
    g: &GroupSpec,
    s_count: u128,
    rng: &mut R,
) -> Result<Vec<u64>> {
    check_values(s_count)?;
    Ok((0..g.size()).map(|_| random_value(rng, s_count)).collect())
}

/// One uniform value per left coset of `H`, so the result is `H`-periodic.
pub fn random_periodic<R: Rng + ?Sized>(
    g: &GroupSpec,
    h: &Subgroup,
    s_count: u128,
    rng: &mut R,
) -> Result<FunctionOracle> {
    check_values(s_count)?;
    let cosets = h.cosets(g);
    let values: Vec<u64> = (0..cosets.count())
        .map(|_| random_value(rng, s_count))
        .collect();
    let table = g.elements().map(|x| values[cosets.coset_of(x)]).collect();
    FunctionOracle::new(g.clone(), table, s_count)
}

/// `f(x) = index of x`.
pub fn injective_table(g: &GroupSpec) -> Vec<u64> {
    (0..g.size() as u64).collect()
}

/// Per-coset value counts, indexed by coset id.
fn coset_histograms(g: &GroupSpec, table: &[u64], h: &Subgroup) -> Vec<BTreeMap<u64, u64>> {
    let cosets = h.cosets(g);
    let mut hist = vec![BTreeMap::new(); cosets.count()];
    for x in g.elements() {
        *hist[cosets.coset_of(x)]
            .entry(table[x.index()])
            .or_insert(0) += 1;
    }
    hist
}

/// Most frequent value of a histogram; the lowest value wins ties.
fn plurality(hist: &BTreeMap<u64, u64>) -> (u64, u64) {
    let mut best = (0, 0);
    for (&v, &c) in hist {
        if c > best.1 {
            best = (v, c);
        }
    }
    best
}

/// The nearest `H`-periodic function: the plurality value on each coset.
pub fn majority_correction(g: &GroupSpec, table: &[u64], h: &Subgroup) -> Vec<u64> {
    let cosets = h.cosets(g);
    let winners: Vec<u64> = coset_histograms(g, table, h)
        .iter()
        .map(|hist| plurality(hist).0)
        .collect();
    g.elements().map(|x| winners[cosets.coset_of(x)]).collect()
}

/// `dist(f, Per(H))`, the fraction of points the majority correction changes.
pub fn dist_to_per(g: &GroupSpec, table: &[u64], h: &Subgroup) -> Fraction {
    let kept: u64 = coset_histograms(g, table, h)
        .iter()
        .map(|hist| plurality(hist).1)
        .sum();
    Fraction::new((g.order() - kept) as u128, g.order() as u128)
}

/// `dist(f, LARGER-PERIOD(K))`, minimized over the one-element extensions of
/// `K`. Every `H > K` contains one of them and distance to `Per(H)` only
/// grows with `H`, so this is the minimum over all `H > K`. `None` when
/// `K = G`, where the property is empty.
pub fn dist_to_larger_period(
    g: &GroupSpec,
    table: &[u64],
    k: &Subgroup,
) -> Result<Option<(Fraction, Subgroup)>> {
    let mut best: Option<(Fraction, Subgroup)> = None;
    for h in minimal_overgroups(g, k)? {
        let d = dist_to_per(g, table, &h);
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, h));
        }
    }
    Ok(best)
}

/// `f0(x) = f1(x u)` with `f1` uniform into `0..s_count`. The pair is
/// similar with respect to the normal closure of `u`.
pub fn hidden_translation_pair<R: Rng + ?Sized>(
    g: &GroupSpec,
    u: Element,
    s_count: u128,
    rng: &mut R,
) -> Result<PairOracle> {
    g.check(u)?;
    let f1 = random_table(g, s_count, rng)?;
    let f0 = g.elements().map(|x| f1[g.op(x, u).index()]).collect();
    PairOracle::new(g.clone(), f0, f1, s_count)
}

/// `f0` injective onto `0..|G|`, `f1` injective onto `|G|..2|G|`.
pub fn disjoint_range_pair(g: &GroupSpec) -> Result<PairOracle> {
    let n = g.order();
    let f0 = injective_table(g);
    let f1 = f0.iter().map(|&v| v + n).collect();
    PairOracle::from_tables(g.clone(), f0, f1)
}

/// `dist(f, Range(H))` on `G x Z2`: half the per-coset histogram L1 distance,
/// over `2|G|` points.
pub fn dist_to_range(g: &GroupSpec, f0: &[u64], f1: &[u64], h: &Subgroup) -> Fraction {
    let h0 = coset_histograms(g, f0, h);
    let h1 = coset_histograms(g, f1, h);
    let mut l1: u128 = 0;
    for (a, b) in h0.iter().zip(&h1) {
        for (v, &ca) in a {
            let cb = b.get(v).copied().unwrap_or(0);
            l1 += ca.abs_diff(cb) as u128;
        }
        for (v, &cb) in b {
            if !a.contains_key(v) {
                l1 += cb as u128;
            }
        }
    }
    Fraction::new(l1, 4 * g.order() as u128)
}

/// `dist(f, CCR(k, t))` with the minimizing subgroup (first in canonical
/// order on ties).
pub fn dist_to_ccr(
    g: &GroupSpec,
    f0: &[u64],
    f1: &[u64],
    k: u64,
    t: u32,
    budget: u64,
) -> Result<(Fraction, Subgroup)> {
    let mut best: Option<(Fraction, Subgroup)> = None;
    for h in t_generated_normal_subgroups_with_budget(g, k, t, budget)? {
        let d = dist_to_range(g, f0, f1, &h);
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, h));
        }
    }
    // The trivial subgroup is always a candidate.
    Ok(best.expect("candidate list contains the trivial subgroup"))
}

/// Draw from the positive distribution: uniform `f1` into `|S| = |G|^3`
/// labels and uniform `u`, with `f0(x) = f1(x + u)`. Returns the drawn `u`.
pub fn sample_d1<R: Rng + ?Sized>(g: &GroupSpec, rng: &mut R) -> Result<(PairOracle, Element)> {
    if !g.is_abelian_product() {
        return Err(Error::NotAbelian);
    }
    let u = Element::from_index(rng.gen_range(0..g.size()));
    let pair = hidden_translation_pair(g, u, cubic_universe(g), rng)?;
    Ok((pair, u))
}

/// Draw from the negative distribution: two independent uniform functions
/// into `|S| = |G|^3` labels.
pub fn sample_d2<R: Rng + ?Sized>(g: &GroupSpec, rng: &mut R) -> Result<PairOracle> {
    if !g.is_abelian_product() {
        return Err(Error::NotAbelian);
    }
    let s = cubic_universe(g);
    let f0 = random_table(g, s, rng)?;
    let f1 = random_table(g, s, rng)?;
    PairOracle::new(g.clone(), f0, f1, s)
}

/// Number of points changed for a target fraction `d`: `floor(d |G|)`,
/// snapping values within `1e-9` of an integer.
pub fn perturbation_count(g: &GroupSpec, d: f64) -> usize {
    let x = d * g.order() as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        x.floor() as usize
    }
}

/// Replaces exactly `floor(d |G|)` uniformly chosen points by fresh values
/// above every existing value. The resulting distance to any property must
/// be re-measured by the caller.
pub fn perturb_to_distance<R: Rng + ?Sized>(
    f: &FunctionOracle,
    d: f64,
    rng: &mut R,
) -> Result<FunctionOracle> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "perturbation distance must lie in [0, 1], got {d}"
        )));
    }
    let g = f.group();
    let count = perturbation_count(g, d);
    let mut table = f.table().to_vec();
    let fresh = table.iter().max().map_or(0, |&m| m + 1);
    let mut points = index::sample(rng, table.len(), count).into_vec();
    points.sort_unstable();
    for (i, p) in points.into_iter().enumerate() {
        table[p] = fresh + i as u64;
    }
    FunctionOracle::from_table(g.clone(), table)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InstanceKind {
    #[serde(rename = "periodic")]
    Periodic,
    #[serde(rename = "far-from-lp")]
    FarFromLp,
    #[serde(rename = "hidden-translation")]
    HiddenTranslation,
    #[serde(rename = "disjoint-range")]
    DisjointRange,
    #[serde(rename = "D1")]
    D1,
    #[serde(rename = "D2")]
    D2,
    #[serde(rename = "custom-table")]
    CustomTable,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 7] = [
        InstanceKind::Periodic,
        InstanceKind::FarFromLp,
        InstanceKind::HiddenTranslation,
        InstanceKind::DisjointRange,
        InstanceKind::D1,
        InstanceKind::D2,
        InstanceKind::CustomTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Periodic => "periodic",
            InstanceKind::FarFromLp => "far-from-lp",
            InstanceKind::HiddenTranslation => "hidden-translation",
            InstanceKind::DisjointRange => "disjoint-range",
            InstanceKind::D1 => "D1",
            InstanceKind::D2 => "D2",
            InstanceKind::CustomTable => "custom-table",
        }
    }

    /// Whether the instance is a pair `(f0, f1)`.
    pub fn is_pair(self) -> bool {
        matches!(
            self,
            InstanceKind::HiddenTranslation
                | InstanceKind::DisjointRange
                | InstanceKind::D1
                | InstanceKind::D2
        )
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InstanceKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown instance kind {s:?}")))
    }
}

/// Kind-specific parameters. Unset fields take defaults at generation time
/// and the resolved values are written back.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    /// Period subgroup `H` as `gens=...`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<String>,
    /// Translation `u` in element syntax.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<String>,
    /// Fraction of points to perturb.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    /// Size of the value set; `None` picks a per-kind default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceSpec {
    pub group: GroupSpec,
    pub kind: InstanceKind,
    pub params: InstanceParams,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Table {
    Single(Vec<u64>),
    Pair { f0: Vec<u64>, f1: Vec<u64> },
}

/// A generated instance with its resolved spec, ready for replay.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub spec: InstanceSpec,
    pub table: Table,
}

const DEFAULT_VALUES: u64 = 5;

fn post_check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::PostCheck(what.into()))
    }
}

impl Instance {
    /// Generates an instance from `spec`, deterministically in `spec.seed`,
    /// and verifies it against its kind with the distance oracles.
    ///
    /// `far-from-lp` starts from a random `H`-periodic function (default
    /// `H = G`, a constant) and perturbs a `distance` fraction of points
    /// (default 1, which yields an injective function).
    pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
        let g = &spec.group;
        let mut params = spec.params.clone();
        let mut rng = rng_from_seed(spec.seed);
        let table = match spec.kind {
            InstanceKind::Periodic | InstanceKind::FarFromLp => {
                let default_h = if spec.kind == InstanceKind::Periodic {
                    Subgroup::trivial(g)
                } else {
                    Subgroup::whole(g)
                };
                let h = match &params.subgroup {
                    Some(text) => Subgroup::parse(g, text)?,
                    None => default_h,
                };
                let values = params.values.unwrap_or(DEFAULT_VALUES);
                let f = random_periodic(g, &h, values as u128, &mut rng)?;
                post_check(
                    dist_to_per(g, f.table(), &h) == Fraction::from(0),
                    "periodic",
                )?;
                params.subgroup = Some(h.to_spec_string(g));
                params.values = Some(values);
                if spec.kind == InstanceKind::Periodic {
                    Table::Single(f.table().to_vec())
                } else {
                    let d = params.distance.unwrap_or(1.0);
                    let p = perturb_to_distance(&f, d, &mut rng)?;
                    let changed = f
                        .table()
                        .iter()
                        .zip(p.table())
                        .filter(|(a, b)| a != b)
                        .count();
                    post_check(changed == perturbation_count(g, d), "perturbation count")?;
                    params.distance = Some(d);
                    Table::Single(p.table().to_vec())
                }
            }
            InstanceKind::HiddenTranslation => {
                let u = match &params.translation {
                    Some(text) => g.parse_element(text)?,
                    None => Element::from_index(rng.gen_range(0..g.size())),
                };
                let values = params
                    .values
                    .map_or_else(|| cubic_universe(g), |v| v as u128);
                let pair = hidden_translation_pair(g, u, values, &mut rng)?;
                let h = normal_closure(g, &[u])?;
                post_check(
                    dist_to_range(g, pair.f0(), pair.f1(), &h) == Fraction::from(0),
                    "translation similarity",
                )?;
                params.translation = Some(g.format_element(u));
                Table::Pair {
                    f0: pair.f0().to_vec(),
                    f1: pair.f1().to_vec(),
                }
            }
            InstanceKind::DisjointRange => {
                let pair = disjoint_range_pair(g)?;
                post_check(
                    dist_to_range(g, pair.f0(), pair.f1(), &Subgroup::whole(g))
                        == Fraction::new(1, 2),
                    "disjoint ranges",
                )?;
                Table::Pair {
                    f0: pair.f0().to_vec(),
                    f1: pair.f1().to_vec(),
                }
            }
            InstanceKind::D1 => {
                let (pair, u) = sample_d1(g, &mut rng)?;
                post_check(
                    dist_to_range(g, pair.f0(), pair.f1(), &normal_closure(g, &[u])?)
                        == Fraction::from(0),
                    "translation similarity",
                )?;
                params.translation = Some(g.format_element(u));
                Table::Pair {
                    f0: pair.f0().to_vec(),
                    f1: pair.f1().to_vec(),
                }
            }
            InstanceKind::D2 => {
                let pair = sample_d2(g, &mut rng)?;
                Table::Pair {
                    f0: pair.f0().to_vec(),
                    f1: pair.f1().to_vec(),
                }
            }
            InstanceKind::CustomTable => {
                return Err(Error::InvalidParameter(
                    "custom tables are built with Instance::custom".into(),
                ))
            }
        };
        Ok(Instance {
            spec: InstanceSpec {
                params,
                ..spec.clone()
            },
            table,
        })
    }

    /// A user-supplied single function (or pair when `f1` is given).
    pub fn custom(group: GroupSpec, f0: Vec<u64>, f1: Option<Vec<u64>>) -> Result<Instance> {
        let table = match f1 {
            Some(f1) => {
                PairOracle::from_tables(group.clone(), f0.clone(), f1.clone())?;
                Table::Pair { f0, f1 }
            }
            None => {
                FunctionOracle::from_table(group.clone(), f0.clone())?;
                Table::Single(f0)
            }
        };
        Ok(Instance {
            spec: InstanceSpec {
                group,
                kind: InstanceKind::CustomTable,
                params: InstanceParams::default(),
                seed: 0,
            },
            table,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.spec.group
    }

    pub fn is_pair(&self) -> bool {
        matches!(self.table, Table::Pair { .. })
    }

    pub fn function_oracle(&self) -> Result<FunctionOracle> {
        match &self.table {
            Table::Single(t) => FunctionOracle::from_table(self.spec.group.clone(), t.clone()),
            Table::Pair { .. } => Err(Error::InvalidParameter(
                "instance is a pair, not a single function".into(),
            )),
        }
    }

    pub fn pair_oracle(&self) -> Result<PairOracle> {
        match &self.table {
            Table::Pair { f0, f1 } => {
                PairOracle::from_tables(self.spec.group.clone(), f0.clone(), f1.clone())
            }
            Table::Single(_) => Err(Error::InvalidParameter(
                "instance is a single function, not a pair".into(),
            )),
        }
    }

    /// `{group, kind, params, seed, table}`; pair tables are `{f0, f1}`.
    pub fn to_json(&self) -> Value {
        let table = match &self.table {
            Table::Single(t) => json!(t),
            Table::Pair { f0, f1 } => json!({ "f0": f0, "f1": f1 }),
        };
        json!({
            "group": self.spec.group.to_string(),
            "kind": self.spec.kind,
            "params": self.spec.params,
            "seed": self.spec.seed,
            "table": table,
        })
    }

    pub fn from_json(v: &Value) -> Result<Instance> {
        let bad = |what: &str| Error::InvalidParameter(format!("instance JSON: {what}"));
        let group = parse_group_spec(v["group"].as_str().ok_or_else(|| bad("missing group"))?)?;
        let kind: InstanceKind =
            serde_json::from_value(v["kind"].clone()).map_err(|e| bad(&e.to_string()))?;
        let params: InstanceParams = match v.get("params") {
            Some(p) if !p.is_null() => {
                serde_json::from_value(p.clone()).map_err(|e| bad(&e.to_string()))?
            }
            _ => InstanceParams::default(),
        };
        let seed = v["seed"].as_u64().unwrap_or(0);
        let as_table = |t: &Value| -> Result<Vec<u64>> {
            serde_json::from_value(t.clone()).map_err(|e| bad(&e.to_string()))
        };
        let t = &v["table"];
        let table = if t.is_array() {
            let f = as_table(t)?;
            FunctionOracle::from_table(group.clone(), f.clone())?;
            Table::Single(f)
        } else {
            let (f0, f1) = (as_table(&t["f0"])?, as_table(&t["f1"])?);
            PairOracle::from_tables(group.clone(), f0.clone(), f1.clone())?;
            Table::Pair { f0, f1 }
        };
        Ok(Instance {
            spec: InstanceSpec {
                group,
                kind,
                params,
                seed,
            },
            table,
        })
    }
}
