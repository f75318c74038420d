//! Exact observation distributions of Fourier sampling, and seeded sampling
//! from them.
//!
//! For `f : G -> S` the state before measurement is
//! `(1/|G|) sum_x sum_rho sqrt(d_rho) sum_{ij} rho(x)_{ij} |rho,i,j>|f(x)>`, so
//! observing only `rho` gives
//! `Pr[rho] = d_rho/|G|^2 sum_s sum_{ij} |sum_{x in f^-1(s)} rho(x)_{ij}|^2`.
//! For abelian products this reduces to characters,
//! `Pr[y] = 1/|G|^2 sum_s |sum_{x in f^-1(s)} chi_y(x)|^2`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use serde::Serialize;
use serde_json::{json, Value};

use super::oracle::{FunctionOracle, PairOracle};
use crate::error::{Error, Result};
use crate::group::{
    irrep_count, irrep_label, irrep_table, root_of_unity, Element, GroupSpec, Matrix,
};

/// Probabilities below this are outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Allowed deviation of the total mass from 1.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeSpace {
    /// `y` in `G^`, identified with `G`.
    Characters,
    /// Indices into [`irrep_table`].
    Irreps,
    /// `(y, b)` in `G^ x Z2`.
    CharactersWithBit,
    /// `(rho, b)`.
    IrrepsWithBit,
}

impl OutcomeSpace {
    pub fn has_bit(self) -> bool {
        matches!(
            self,
            OutcomeSpace::CharactersWithBit | OutcomeSpace::IrrepsWithBit
        )
    }
}

/// One observation. `label` is a character index (equal to the element index
/// of `y`) or an irrep index; `bit` is present for `G x Z2` sampling.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Outcome {
    pub label: usize,
    pub bit: Option<u8>,
}

impl Outcome {
    pub fn plain(label: usize) -> Self {
        Outcome { label, bit: None }
    }

    pub fn with_bit(label: usize, bit: u8) -> Self {
        Outcome {
            label,
            bit: Some(bit),
        }
    }
}

/// Renders an outcome as JSON: a character as its coordinate string, an irrep
/// as its label, a paired outcome as `[label, b]`.
pub fn outcome_json(group: &GroupSpec, space: OutcomeSpace, o: Outcome) -> Value {
    let name = match space {
        OutcomeSpace::Characters | OutcomeSpace::CharactersWithBit => {
            group.format_element(Element::from_index(o.label))
        }
        OutcomeSpace::Irreps | OutcomeSpace::IrrepsWithBit => irrep_label(group, o.label),
    };
    match o.bit {
        Some(b) => json!([name, b]),
        None => json!(name),
    }
}

/// Exact probability vector over a canonically ordered outcome space. Paired
/// outcomes `(label, b)` sit at index `2 * label + b`.
#[derive(Clone, Debug)]
pub struct SamplingDistribution {
    group: GroupSpec,
    space: OutcomeSpace,
    probabilities: Vec<f64>,
}

impl SamplingDistribution {
    fn new(group: GroupSpec, space: OutcomeSpace, probabilities: Vec<f64>) -> Self {
        let d = SamplingDistribution {
            group,
            space,
            probabilities,
        };
        debug_assert!(
            (d.total() - 1.0).abs() <= NORMALIZATION_TOL,
            "distribution mass {}",
            d.total()
        );
        d
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn space(&self) -> OutcomeSpace {
        self.space
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn outcome(&self, index: usize) -> Outcome {
        if self.space.has_bit() {
            Outcome::with_bit(index / 2, (index % 2) as u8)
        } else {
            Outcome::plain(index)
        }
    }

    pub fn index_of(&self, o: Outcome) -> usize {
        match o.bit {
            Some(b) => 2 * o.label + b as usize,
            None => o.label,
        }
    }

    pub fn probability(&self, o: Outcome) -> f64 {
        self.probabilities[self.index_of(o)]
    }

    /// Outcomes with probability at least [`SUPPORT_TOL`], in canonical order.
    pub fn support(&self) -> Vec<Outcome> {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p >= SUPPORT_TOL)
            .map(|(i, _)| self.outcome(i))
            .collect()
    }

    pub fn is_normalized(&self) -> bool {
        (self.total() - 1.0).abs() <= NORMALIZATION_TOL
            && self.probabilities.iter().all(|&p| p >= -SUPPORT_TOL)
    }

    /// Total mass on outcomes satisfying `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(Outcome) -> bool) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|&(i, _)| pred(self.outcome(i)))
            .map(|(_, &p)| p)
            .sum()
    }

    /// `[{outcome, probability}, ...]` in canonical outcome order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.probabilities
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    json!({
                        "outcome": outcome_json(&self.group, self.space, self.outcome(i)),
                        "probability": p,
                    })
                })
                .collect(),
        )
    }
}

/// `n` i.i.d. draws by inverse CDF over the canonical outcome order.
/// Entries below [`SUPPORT_TOL`] are never drawn.
pub fn sample<R: Rng + ?Sized>(d: &SamplingDistribution, rng: &mut R, n: usize) -> Vec<Outcome> {
    if n == 0 {
        return Vec::new();
    }
    let mut cumulative = Vec::with_capacity(d.len());
    let mut acc = 0.0;
    let mut last_support = 0;
    for (i, &p) in d.probabilities.iter().enumerate() {
        if p >= SUPPORT_TOL {
            acc += p;
            last_support = i;
        }
        cumulative.push(acc);
    }
    (0..n)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            let i = cumulative.partition_point(|&c| c <= u).min(last_support);
            d.outcome(i)
        })
        .collect()
}

/// Preimage classes `f^{-1}(s)` in increasing order of `s`.
fn value_classes(table: &[u64]) -> Vec<Vec<Element>> {
    let mut classes: BTreeMap<u64, Vec<Element>> = BTreeMap::new();
    for (i, &v) in table.iter().enumerate() {
        classes.entry(v).or_default().push(Element::from_index(i));
    }
    classes.into_values().collect()
}

/// Preimage classes of a pair: `(f0^{-1}(s), f1^{-1}(s))` over every value `s`.
fn pair_value_classes(f0: &[u64], f1: &[u64]) -> Vec<[Vec<Element>; 2]> {
    let mut classes: BTreeMap<u64, [Vec<Element>; 2]> = BTreeMap::new();
    for (b, table) in [f0, f1].into_iter().enumerate() {
        for (i, &v) in table.iter().enumerate() {
            classes.entry(v).or_default()[b].push(Element::from_index(i));
        }
    }
    classes.into_values().collect()
}

fn roots(g: &GroupSpec) -> Vec<Complex64> {
    (0..g.exponent())
        .map(|p| root_of_unity(p, g.exponent()))
        .collect()
}

/// Which route computes the abelian character distribution.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum FourierMethod {
    /// Character sums over each preimage class, `O(|G|^2)`.
    #[default]
    Direct,
    /// Autocorrelation `c(d) = #{x : f(x) = f(x+d)}` followed by a
    /// per-factor FFT.
    Fft,
}

/// Exact distribution of `Fourier sampling^f(G)` over `G^` for an abelian
/// product `G`.
pub fn fourier_sampling_distribution(f: &FunctionOracle) -> Result<SamplingDistribution> {
    fourier_sampling_distribution_with(f, FourierMethod::Direct)
}

pub fn fourier_sampling_distribution_with(
    f: &FunctionOracle,
    method: FourierMethod,
) -> Result<SamplingDistribution> {
    let g = f.group();
    if !g.is_abelian_product() {
        return Err(Error::NotAbelian);
    }
    f.note_simulation_read();
    let n = g.size();
    let norm = (n as f64) * (n as f64);
    let probs = match method {
        FourierMethod::Direct => {
            let classes = value_classes(f.table());
            let roots = roots(g);
            (0..n)
                .into_par_iter()
                .map(|y| {
                    let y = Element::from_index(y);
                    classes
                        .iter()
                        .map(|class| {
                            class
                                .iter()
                                .map(|&x| roots[g.character_phase(y, x) as usize])
                                .sum::<Complex64>()
                                .norm_sqr()
                        })
                        .sum::<f64>()
                        / norm
                })
                .collect()
        }
        FourierMethod::Fft => {
            let classes = value_classes(f.table());
            let mut corr = vec![Complex64::new(0.0, 0.0); n];
            for class in &classes {
                for &x in class {
                    let minus_x = g.inverse(x);
                    for &z in class {
                        corr[g.op(z, minus_x).index()] += 1.0;
                    }
                }
            }
            multidim_dft(g, &mut corr);
            corr.iter().map(|z| (z.re / norm).max(0.0)).collect()
        }
    };
    Ok(SamplingDistribution::new(
        g.clone(),
        OutcomeSpace::Characters,
        probs,
    ))
}

/// In-place `a(y) <- sum_d a(d) chi_y(d)` via one FFT per cyclic factor.
fn multidim_dft(g: &GroupSpec, data: &mut [Complex64]) {
    let factors = g.factors();
    let mut planner = FftPlanner::<f64>::new();
    let mut stride = 1usize;
    let total = data.len();
    for &n in factors.iter().rev() {
        let n = n as usize;
        if n > 1 {
            // chi_y(d) = exp(+2 pi i d y / n): the inverse (unnormalized) transform.
            let fft = planner.plan_fft(n, FftDirection::Inverse);
            let block = n * stride;
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[outer + inner + k * stride];
                    }
                    fft.process(&mut line);
                    for (k, v) in line.iter().enumerate() {
                        data[outer + inner + k * stride] = *v;
                    }
                }
            }
        }
        stride *= n;
    }
}

/// Exact distribution over irrep labels for any supported group.
pub fn fourier_sampling_distribution_general(f: &FunctionOracle) -> Result<SamplingDistribution> {
    let g = f.group();
    let table = irrep_table(g)?;
    f.note_simulation_read();
    let classes = value_classes(f.table());
    let norm = (g.order() as f64).powi(2);
    let probs = table
        .par_iter()
        .map(|rho| {
            let d = rho.dimension();
            let mass: f64 = classes
                .iter()
                .map(|class| {
                    let mut m = Matrix::zeros(d);
                    for &x in class {
                        m.add_assign(rho.matrix(x));
                    }
                    m.norm_sqr()
                })
                .sum();
            d as f64 * mass / norm
        })
        .collect();
    Ok(SamplingDistribution::new(
        g.clone(),
        OutcomeSpace::Irreps,
        probs,
    ))
}

/// Exact distribution of `Fourier sampling^f(G x Z2)`. Characters
/// `chi_(y,b)(x,c) = chi_y(x) (-1)^{bc}` for abelian products, `(rho, b)`
/// otherwise.
pub fn fourier_sampling_distribution_pair(f: &PairOracle) -> Result<SamplingDistribution> {
    if f.group().is_abelian_product() {
        pair_distribution_characters(f)
    } else {
        fourier_sampling_distribution_pair_general(f)
    }
}

fn pair_distribution_characters(f: &PairOracle) -> Result<SamplingDistribution> {
    let g = f.group();
    f.note_simulation_read();
    let n = g.size();
    let classes = pair_value_classes(f.f0(), f.f1());
    let roots = roots(g);
    let norm = 4.0 * (n as f64) * (n as f64);
    let per_label: Vec<[f64; 2]> = (0..n)
        .into_par_iter()
        .map(|y| {
            let y = Element::from_index(y);
            let mut out = [0.0; 2];
            for [c0, c1] in &classes {
                let s0: Complex64 = c0
                    .iter()
                    .map(|&x| roots[g.character_phase(y, x) as usize])
                    .sum();
                let s1: Complex64 = c1
                    .iter()
                    .map(|&x| roots[g.character_phase(y, x) as usize])
                    .sum();
                out[0] += (s0 + s1).norm_sqr();
                out[1] += (s0 - s1).norm_sqr();
            }
            [out[0] / norm, out[1] / norm]
        })
        .collect();
    Ok(SamplingDistribution::new(
        g.clone(),
        OutcomeSpace::CharactersWithBit,
        per_label.into_iter().flatten().collect(),
    ))
}

/// `(rho, b)` distribution through the irrep table, for any supported group.
pub fn fourier_sampling_distribution_pair_general(f: &PairOracle) -> Result<SamplingDistribution> {
    let g = f.group();
    let table = irrep_table(g)?;
    f.note_simulation_read();
    let classes = pair_value_classes(f.f0(), f.f1());
    let norm = 4.0 * (g.order() as f64).powi(2);
    let per_label: Vec<[f64; 2]> = table
        .par_iter()
        .map(|rho| {
            let d = rho.dimension();
            let mut out = [0.0; 2];
            for [c0, c1] in &classes {
                let mut m0 = Matrix::zeros(d);
                let mut m1 = Matrix::zeros(d);
                for &x in c0 {
                    m0.add_assign(rho.matrix(x));
                }
                for &x in c1 {
                    m1.add_assign(rho.matrix(x));
                }
                for (a, b) in m0.entries().iter().zip(m1.entries()) {
                    out[0] += (a + b).norm_sqr();
                    out[1] += (a - b).norm_sqr();
                }
            }
            [d as f64 * out[0] / norm, d as f64 * out[1] / norm]
        })
        .collect();
    debug_assert_eq!(per_label.len(), irrep_count(g));
    Ok(SamplingDistribution::new(
        g.clone(),
        OutcomeSpace::IrrepsWithBit,
        per_label.into_iter().flatten().collect(),
    ))
}
