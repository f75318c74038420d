//! State-space quantities: the coset-averaged probabilistic function
//! `mu^{f,H}`, the defects `|| |f> - |mu^{f,H}> ||^2` and `|| |f,H> ||^2`, and
//! explicit QFT images of coset states.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{irrep_table, root_of_unity, Cosets, Element, GroupSpec, Subgroup};
use crate::Fraction;

/// `mu_x(s) = |f^{-1}(s) ∩ xH| / |H|`, stored as integer multiplicities per
/// coset (so weights have denominator `|H|`).
#[derive(Clone, Debug)]
pub struct ProbFunction {
    cosets: Cosets,
    subgroup_order: u64,
    histograms: Vec<BTreeMap<u64, u64>>,
}

impl ProbFunction {
    pub fn from_table(g: &GroupSpec, table: &[u64], h: &Subgroup) -> Self {
        let cosets = h.cosets(g);
        let mut histograms = vec![BTreeMap::new(); cosets.count()];
        for x in g.elements() {
            *histograms[cosets.coset_of(x)]
                .entry(table[x.index()])
                .or_insert(0) += 1;
        }
        ProbFunction {
            cosets,
            subgroup_order: h.order(),
            histograms,
        }
    }

    pub fn subgroup_order(&self) -> u64 {
        self.subgroup_order
    }

    pub fn cosets(&self) -> &Cosets {
        &self.cosets
    }

    /// `m_x(s) = |H| mu_x(s)`.
    pub fn multiplicity(&self, x: Element, s: u64) -> u64 {
        self.histograms[self.cosets.coset_of(x)]
            .get(&s)
            .copied()
            .unwrap_or(0)
    }

    pub fn weight(&self, x: Element, s: u64) -> Fraction {
        Fraction::new(self.multiplicity(x, s) as u128, self.subgroup_order as u128)
    }

    /// Value histogram of the coset containing `x`, by increasing value.
    pub fn histogram(&self, x: Element) -> &BTreeMap<u64, u64> {
        &self.histograms[self.cosets.coset_of(x)]
    }

    pub fn coset_histograms(&self) -> &[BTreeMap<u64, u64>] {
        &self.histograms
    }

    /// `|| |h> - |mu> ||^2 = 1/|G| sum_x sum_s |delta^h_x(s) - mu_x(s)|^2` for
    /// any function `h` on the same domain.
    pub fn distance_sq_to_function(&self, table: &[u64]) -> Fraction {
        let order = self.subgroup_order as u128;
        let mut numerator: u128 = 0;
        for (i, &hx) in table.iter().enumerate() {
            let hist = self.histogram(Element::from_index(i));
            let mut hit = false;
            for (&s, &m) in hist {
                let m = m as u128;
                if s == hx {
                    hit = true;
                    numerator += (order - m) * (order - m);
                } else {
                    numerator += m * m;
                }
            }
            if !hit {
                numerator += order * order;
            }
        }
        Fraction::new(numerator, table.len() as u128 * order * order)
    }
}

fn require_normal(g: &GroupSpec, h: &Subgroup) -> Result<()> {
    if g.is_abelian() || h.is_normal() {
        Ok(())
    } else {
        Err(Error::NotNormal)
    }
}

/// `|| |f> - |mu^{f,H}> ||^2`, exact.
pub fn state_defect_exact(g: &GroupSpec, table: &[u64], h: &Subgroup) -> Result<Fraction> {
    require_normal(g, h)?;
    if table.len() != g.size() {
        return Err(Error::DomainMismatch);
    }
    Ok(ProbFunction::from_table(g, table, h).distance_sq_to_function(table))
}

pub fn state_defect(g: &GroupSpec, table: &[u64], h: &Subgroup) -> Result<f64> {
    state_defect_exact(g, table, h).map(|r| to_f64(&r))
}

/// `|| |f,H> ||^2` with `|f,H> = (|mu^{f0,H}> - |mu^{f1,H}>)/sqrt 2`, exact:
/// `1/(2|G||H|^2) sum_x sum_s (m0_x(s) - m1_x(s))^2`.
pub fn pair_defect_exact(g: &GroupSpec, f0: &[u64], f1: &[u64], h: &Subgroup) -> Result<Fraction> {
    require_normal(g, h)?;
    if f0.len() != g.size() || f1.len() != g.size() {
        return Err(Error::DomainMismatch);
    }
    let mu0 = ProbFunction::from_table(g, f0, h);
    let mu1 = ProbFunction::from_table(g, f1, h);
    let coset_size = h.order() as u128;
    let mut numerator: u128 = 0;
    for (h0, h1) in mu0.coset_histograms().iter().zip(mu1.coset_histograms()) {
        let mut per_coset: u128 = 0;
        for (s, &m0) in h0 {
            let m1 = h1.get(s).copied().unwrap_or(0);
            per_coset += (m0.abs_diff(m1) as u128).pow(2);
        }
        for (s, &m1) in h1 {
            if !h0.contains_key(s) {
                per_coset += (m1 as u128).pow(2);
            }
        }
        // Every x in the coset contributes the same sum.
        numerator += coset_size * per_coset;
    }
    Ok(Fraction::new(
        numerator,
        2 * g.order() as u128 * coset_size * coset_size,
    ))
}

pub fn pair_defect(g: &GroupSpec, f0: &[u64], f1: &[u64], h: &Subgroup) -> Result<f64> {
    pair_defect_exact(g, f0, f1, h).map(|r| to_f64(&r))
}

/// `|| |f> - |g> ||^2` for two functions on the same domain, from their
/// explicit superpositions over `(x, s)`.
pub fn superposition_distance_sq(f: &[u64], g: &[u64]) -> Fraction {
    assert_eq!(f.len(), g.len());
    let mut amplitudes: BTreeMap<(usize, u64), i64> = BTreeMap::new();
    for (x, (&a, &b)) in f.iter().zip(g).enumerate() {
        *amplitudes.entry((x, a)).or_insert(0) += 1;
        *amplitudes.entry((x, b)).or_insert(0) -= 1;
    }
    let sum: u128 = amplitudes.values().map(|&a| (a * a) as u128).sum();
    Fraction::new(sum, f.len() as u128)
}

pub(crate) fn to_f64(r: &Fraction) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Basis ordering of `QFT_G` outputs: characters `y` for abelian products,
/// `(rho, i, j)` blocks in irrep-table order otherwise.
fn uses_characters(g: &GroupSpec) -> bool {
    g.is_abelian_product()
}

/// Dense `QFT_G` matrix, rows indexed by the output basis, columns by `x`.
pub fn qft_matrix(g: &GroupSpec) -> Result<Vec<Vec<Complex64>>> {
    let n = g.size();
    let scale = 1.0 / (n as f64).sqrt();
    if uses_characters(g) {
        let e = g.exponent();
        return Ok(g
            .elements()
            .map(|y| {
                g.elements()
                    .map(|x| root_of_unity(g.character_phase(y, x), e) * scale)
                    .collect()
            })
            .collect());
    }
    let table = irrep_table(g)?;
    let mut rows = Vec::with_capacity(n);
    for rho in &table {
        let d = rho.dimension();
        let w = (d as f64).sqrt() * scale;
        for i in 0..d {
            for j in 0..d {
                rows.push(g.elements().map(|x| rho.matrix(x).get(i, j) * w).collect());
            }
        }
    }
    Ok(rows)
}

/// `QFT_G |xH>` by explicit matrix application to the coset superposition.
pub fn qft_coset_state(g: &GroupSpec, x: Element, h: &Subgroup) -> Result<Vec<Complex64>> {
    g.check(x)?;
    if !uses_characters(g) {
        require_normal(g, h)?;
    }
    let amp = 1.0 / (h.order() as f64).sqrt();
    let mut coset = vec![Complex64::new(0.0, 0.0); g.size()];
    for &k in h.elements() {
        coset[g.op(x, k).index()] = Complex64::new(amp, 0.0);
    }
    let qft = qft_matrix(g)?;
    Ok(qft
        .iter()
        .map(|row| row.iter().zip(&coset).map(|(a, b)| a * b).sum())
        .collect())
}

/// `|H^perp(x)>` written out from its definition:
/// `sqrt(|H|/|G|) sum_{y in H^perp} chi_y(x) |y>` or
/// `sqrt(|H|/|G|) sum_{rho in H^perp} |rho(x)>`.
pub fn coset_state_prediction(g: &GroupSpec, x: Element, h: &Subgroup) -> Result<Vec<Complex64>> {
    g.check(x)?;
    let scale = (h.order() as f64 / g.order() as f64).sqrt();
    if uses_characters(g) {
        let perp = crate::group::orthogonal(g, h)?;
        let mut v = vec![Complex64::new(0.0, 0.0); g.size()];
        for &y in perp.elements() {
            v[y.index()] = root_of_unity(g.character_phase(y, x), g.exponent()) * scale;
        }
        return Ok(v);
    }
    require_normal(g, h)?;
    let table = irrep_table(g)?;
    let mut v = Vec::with_capacity(g.size());
    for rho in &table {
        let d = rho.dimension();
        let in_perp = rho.is_trivial_on(h);
        let w = (d as f64).sqrt() * scale;
        for i in 0..d {
            for j in 0..d {
                v.push(if in_perp {
                    rho.matrix(x).get(i, j) * w
                } else {
                    Complex64::new(0.0, 0.0)
                });
            }
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{normal_subgroups, parse_group_spec, subgroup_close};

    fn frac(n: u128, d: u128) -> Fraction {
        Fraction::new(n, d)
    }

    #[test]
    fn periodic_function_has_zero_defect() {
        let g = GroupSpec::cyclic(6);
        let h = subgroup_close(&g, &[Element::from_index(3)]).unwrap();
        let table = vec![4, 7, 1, 4, 7, 1];
        assert_eq!(state_defect_exact(&g, &table, &h).unwrap(), frac(0, 1));
    }

    #[test]
    fn injective_on_z2_has_defect_one_half() {
        let g = GroupSpec::cyclic(2);
        let h = Subgroup::whole(&g);
        assert_eq!(state_defect_exact(&g, &[0, 1], &h).unwrap(), frac(1, 2));
    }

    #[test]
    fn weights_are_coset_proportions() {
        let g = GroupSpec::cyclic(4);
        let h = subgroup_close(&g, &[Element::from_index(2)]).unwrap();
        let mu = ProbFunction::from_table(&g, &[0, 1, 0, 2], &h);
        assert_eq!(mu.weight(Element::from_index(0), 0), frac(1, 1));
        assert_eq!(mu.weight(Element::from_index(3), 1), frac(1, 2));
        assert_eq!(mu.weight(Element::from_index(1), 2), frac(1, 2));
        assert_eq!(mu.weight(Element::from_index(1), 0), frac(0, 1));
        // H-periodic in x.
        for x in g.elements() {
            for &k in h.elements() {
                assert_eq!(mu.histogram(x), mu.histogram(g.op(x, k)));
            }
        }
    }

    #[test]
    fn pair_defect_examples() {
        let g = GroupSpec::cyclic(2);
        let whole = Subgroup::whole(&g);
        assert_eq!(
            pair_defect_exact(&g, &[0, 0], &[1, 1], &whole).unwrap(),
            frac(1, 1)
        );
        // H-similar: same multiset on the single coset.
        assert_eq!(
            pair_defect_exact(&g, &[0, 1], &[1, 0], &whole).unwrap(),
            frac(0, 1)
        );
    }

    #[test]
    fn superposition_distance_is_twice_hamming_fraction() {
        let f = [0, 1, 2, 3, 4];
        let g = [0, 1, 9, 3, 8];
        assert_eq!(superposition_distance_sq(&f, &g), frac(4, 5));
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn coset_state_examples() {
        let z4 = GroupSpec::cyclic(4);
        let v = qft_coset_state(&z4, z4.identity(), &Subgroup::trivial(&z4)).unwrap();
        assert!(v
            .iter()
            .all(|z| (z - Complex64::new(0.5, 0.0)).norm() < 1e-12));

        let h = subgroup_close(&z4, &[Element::from_index(2)]).unwrap();
        let v = qft_coset_state(&z4, z4.identity(), &h).unwrap();
        let r = 0.5f64.sqrt();
        let expected = [r, 0.0, r, 0.0].map(|re| Complex64::new(re, 0.0));
        assert!(max_diff(&v, &expected) < 1e-12);
    }

    #[test]
    fn coset_states_match_prediction() {
        for spec in ["Z12", "Z2xZ4", "D4", "Q8", "S3", "D5"] {
            let g = parse_group_spec(spec).unwrap();
            for h in normal_subgroups(&g) {
                for x in g.elements() {
                    let direct = qft_coset_state(&g, x, &h).unwrap();
                    let predicted = coset_state_prediction(&g, x, &h).unwrap();
                    assert!(max_diff(&direct, &predicted) < 1e-9, "{spec}");
                }
            }
        }
    }

    #[test]
    fn dihedral_center_coset_support() {
        let d4 = GroupSpec::dihedral(4);
        let center = subgroup_close(&d4, &[d4.parse_element("(2,0)").unwrap()]).unwrap();
        let table = irrep_table(&d4).unwrap();
        for x in d4.elements() {
            let v = qft_coset_state(&d4, x, &center).unwrap();
            let mut offset = 0;
            for rho in &table {
                let block = rho.dimension() * rho.dimension();
                let mass: f64 = v[offset..offset + block].iter().map(|z| z.norm_sqr()).sum();
                if rho.is_trivial_on(&center) {
                    assert!(mass > 1e-6);
                } else {
                    assert!(mass < 1e-12);
                }
                offset += block;
            }
        }
    }

    #[test]
    fn non_normal_subgroups_are_rejected() {
        let d4 = GroupSpec::dihedral(4);
        let h = subgroup_close(&d4, &[d4.parse_element("(0,1)").unwrap()]).unwrap();
        assert_eq!(
            qft_coset_state(&d4, d4.identity(), &h).unwrap_err(),
            Error::NotNormal
        );
        assert_eq!(
            state_defect(&d4, &[0; 8], &h).unwrap_err(),
            Error::NotNormal
        );
    }

    #[test]
    fn qft_is_unitary() {
        for spec in ["Z6", "D4", "Q8", "S3"] {
            let g = parse_group_spec(spec).unwrap();
            let m = qft_matrix(&g).unwrap();
            let n = g.size();
            for a in 0..n {
                for b in 0..n {
                    let ip: Complex64 = (0..n).map(|k| m[k][a] * m[k][b].conj()).sum();
                    let e = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - Complex64::new(e, 0.0)).norm() < 1e-12);
                }
            }
        }
    }
}
