//! Subgroups as explicit element sets: closure, orthogonals, normal closures,
//! overgroup and `t`-generated subgroup enumeration.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use super::{Element, GroupSpec};
use crate::error::{Error, Result};

/// Default cap on the work done by [`t_generated_normal_subgroups`], counted in
/// (subgroup, candidate generator) pairs examined.
pub const DEFAULT_TUPLE_BUDGET: u64 = 10_000_000;

/// A subgroup held both as a reduced generating set and as its full, sorted
/// element list.
#[derive(Clone, Debug)]
pub struct Subgroup {
    generators: Vec<Element>,
    elements: Vec<Element>,
    is_normal: bool,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Hash for Subgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.elements.hash(state);
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by size, then lexicographically by sorted elements.
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> Ordering {
        self.elements
            .len()
            .cmp(&other.elements.len())
            .then_with(|| self.elements.cmp(&other.elements))
    }
}

fn closure_elements(g: &GroupSpec, gens: &[Element]) -> Vec<Element> {
    let mut seen = vec![false; g.size()];
    let mut out = vec![g.identity()];
    seen[g.identity().index()] = true;
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(a) = queue.pop_front() {
        for &s in gens {
            let b = g.op(a, s);
            if !seen[b.index()] {
                seen[b.index()] = true;
                out.push(b);
                queue.push_back(b);
            }
        }
    }
    out.sort_unstable();
    out
}

fn contains_sorted(elements: &[Element], x: Element) -> bool {
    elements.binary_search(&x).is_ok()
}

fn compute_normality(g: &GroupSpec, generators: &[Element], elements: &[Element]) -> bool {
    if g.is_abelian() {
        return true;
    }
    g.elements().all(|c| {
        generators
            .iter()
            .all(|&h| contains_sorted(elements, g.conjugate(c, h)))
    })
}

impl Subgroup {
    /// Builds `<candidates>`, keeping only those candidates (in sorted order)
    /// that are not already generated by the earlier ones.
    pub(crate) fn from_candidates(g: &GroupSpec, candidates: &[Element]) -> Self {
        let mut cands: Vec<Element> = candidates
            .iter()
            .copied()
            .filter(|&x| x != g.identity())
            .collect();
        cands.sort_unstable();
        cands.dedup();
        let mut generators = Vec::new();
        let mut elements = vec![g.identity()];
        for x in cands {
            if !contains_sorted(&elements, x) {
                generators.push(x);
                elements = closure_elements(g, &generators);
            }
        }
        let is_normal = compute_normality(g, &generators, &elements);
        Subgroup {
            generators,
            elements,
            is_normal,
        }
    }

    pub fn trivial(g: &GroupSpec) -> Self {
        Subgroup {
            generators: Vec::new(),
            elements: vec![g.identity()],
            is_normal: true,
        }
    }

    pub fn whole(g: &GroupSpec) -> Self {
        let all: Vec<Element> = g.elements().collect();
        Self::from_candidates(g, &all)
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn is_normal(&self) -> bool {
        self.is_normal
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn contains(&self, x: Element) -> bool {
        contains_sorted(&self.elements, x)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    /// `self < other` (proper containment).
    pub fn is_proper_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.len() < other.elements.len() && self.is_subgroup_of(other)
    }

    pub fn intersection(&self, g: &GroupSpec, other: &Subgroup) -> Subgroup {
        let common: Vec<Element> = self
            .elements
            .iter()
            .copied()
            .filter(|&x| other.contains(x))
            .collect();
        Self::from_candidates(g, &common)
    }

    /// Left cosets `xH` in canonical order of their smallest element.
    pub fn cosets(&self, g: &GroupSpec) -> Cosets {
        let mut coset_of = vec![usize::MAX; g.size()];
        let mut representatives = Vec::new();
        for x in g.elements() {
            if coset_of[x.index()] != usize::MAX {
                continue;
            }
            let id = representatives.len();
            representatives.push(x);
            for &h in &self.elements {
                coset_of[g.op(x, h).index()] = id;
            }
        }
        Cosets {
            coset_of,
            representatives,
            coset_size: self.elements.len(),
        }
    }

    /// `gens=(4,0);(0,1)` style text.
    pub fn to_spec_string(&self, g: &GroupSpec) -> String {
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|&x| g.format_element(x))
            .collect();
        format!("gens={}", gens.join(";"))
    }

    /// Parses `gens=a;b;...` (the `gens=` prefix is optional) into the
    /// generated subgroup.
    pub fn parse(g: &GroupSpec, text: &str) -> Result<Subgroup> {
        let body = text.trim();
        let body = body.strip_prefix("gens=").unwrap_or(body);
        let gens = body
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| g.parse_element(s))
            .collect::<Result<Vec<_>>>()?;
        subgroup_close(g, &gens)
    }
}

/// Partition of `G` into left cosets of a subgroup.
#[derive(Clone, Debug)]
pub struct Cosets {
    coset_of: Vec<usize>,
    representatives: Vec<Element>,
    coset_size: usize,
}

impl Cosets {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    pub fn coset_of(&self, x: Element) -> usize {
        self.coset_of[x.index()]
    }

    pub fn representatives(&self) -> &[Element] {
        &self.representatives
    }

    pub fn coset_size(&self) -> usize {
        self.coset_size
    }
}

/// `<gens>`; the empty generating set gives the trivial subgroup.
pub fn subgroup_close(g: &GroupSpec, gens: &[Element]) -> Result<Subgroup> {
    for &x in gens {
        g.check(x)?;
    }
    Ok(Subgroup::from_candidates(g, gens))
}

/// `H^perp = { y : chi_y(h) = 1 for all h in H }` for abelian products.
pub fn orthogonal(g: &GroupSpec, h: &Subgroup) -> Result<Subgroup> {
    if !g.is_abelian_product() {
        return Err(Error::NotAbelian);
    }
    let perp: Vec<Element> = g
        .elements()
        .filter(|&y| h.generators().iter().all(|&x| g.character_phase(y, x) == 0))
        .collect();
    Ok(Subgroup::from_candidates(g, &perp))
}

/// Smallest normal subgroup containing `gens`.
pub fn normal_closure(g: &GroupSpec, gens: &[Element]) -> Result<Subgroup> {
    for &x in gens {
        g.check(x)?;
    }
    if g.is_abelian() {
        return Ok(Subgroup::from_candidates(g, gens));
    }
    let mut conjugates: Vec<Element> = gens
        .iter()
        .flat_map(|&x| g.elements().map(move |c| (c, x)))
        .map(|(c, x)| g.conjugate(c, x))
        .collect();
    conjugates.sort_unstable();
    conjugates.dedup();
    let mut h = Subgroup::from_candidates(g, &conjugates);
    h.is_normal = true;
    Ok(h)
}

/// One-element extensions of a normal subgroup `K`: `<K, x>` for abelian
/// products, `NormalClosure(<K, x>)` otherwise, over `x` in `G - K`.
///
/// Every normal `H > K` contains at least one of the returned subgroups.
/// Deduplicated and sorted canonically; empty when `K = G`.
pub fn minimal_overgroups(g: &GroupSpec, k: &Subgroup) -> Result<Vec<Subgroup>> {
    if !k.is_normal() {
        return Err(Error::NotNormal);
    }
    let cosets = k.cosets(g);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &x in cosets.representatives() {
        if k.contains(x) {
            continue;
        }
        let mut gens = k.generators().to_vec();
        gens.push(x);
        let h = if g.is_abelian() {
            Subgroup::from_candidates(g, &gens)
        } else {
            normal_closure(g, &gens)?
        };
        if seen.insert(h.elements.clone()) {
            out.push(h);
        }
    }
    out.sort();
    Ok(out)
}

/// Normal subgroups of order at most `k` that are normal closures of at most
/// `t` elements, in canonical order (the trivial subgroup first).
pub fn t_generated_normal_subgroups(g: &GroupSpec, k: u64, t: u32) -> Result<Vec<Subgroup>> {
    t_generated_normal_subgroups_with_budget(g, k, t, DEFAULT_TUPLE_BUDGET)
}

pub fn t_generated_normal_subgroups_with_budget(
    g: &GroupSpec,
    k: u64,
    t: u32,
    budget: u64,
) -> Result<Vec<Subgroup>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    // Any generator of an H with |H| <= k has order at most k.
    let candidates: Vec<Element> = g
        .elements()
        .filter(|&u| u != g.identity() && g.element_order(u) <= k)
        .collect();
    let mut found: HashSet<Vec<Element>> = HashSet::new();
    let trivial = Subgroup::trivial(g);
    found.insert(trivial.elements.clone());
    let mut all = vec![trivial.clone()];
    let mut frontier = vec![trivial];
    let mut work: u64 = 0;
    for _ in 0..t {
        let mut next = Vec::new();
        for h in &frontier {
            // NormalClosure(H + u) depends only on the coset uH.
            let cosets = h.cosets(g);
            let mut visited = vec![false; cosets.count()];
            for &u in &candidates {
                let c = cosets.coset_of(u);
                if visited[c] || h.contains(u) {
                    continue;
                }
                visited[c] = true;
                work += 1;
                if work > budget {
                    return Err(Error::BudgetExceeded { budget });
                }
                let mut gens = h.generators().to_vec();
                gens.push(u);
                let joined = normal_closure(g, &gens)?;
                if joined.order() <= k && found.insert(joined.elements.clone()) {
                    next.push(joined);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all.sort();
    Ok(all)
}

/// Every subgroup of `G`, built as joins of cyclic subgroups. Intended for
/// small groups.
pub fn all_subgroups(g: &GroupSpec) -> Vec<Subgroup> {
    let mut cyclic: Vec<Subgroup> = Vec::new();
    let mut seen_cyclic = HashSet::new();
    for x in g.elements() {
        let c = Subgroup::from_candidates(g, &[x]);
        if seen_cyclic.insert(c.elements.clone()) {
            cyclic.push(c);
        }
    }
    let mut found: HashSet<Vec<Element>> = HashSet::new();
    let trivial = Subgroup::trivial(g);
    found.insert(trivial.elements.clone());
    let mut all = vec![trivial.clone()];
    let mut frontier = vec![trivial];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for h in &frontier {
            for c in &cyclic {
                if c.is_subgroup_of(h) {
                    continue;
                }
                let mut gens = h.generators.clone();
                gens.extend_from_slice(&c.generators);
                let j = Subgroup::from_candidates(g, &gens);
                if found.insert(j.elements.clone()) {
                    next.push(j);
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all.sort();
    all
}

pub fn normal_subgroups(g: &GroupSpec) -> Vec<Subgroup> {
    all_subgroups(g)
        .into_iter()
        .filter(Subgroup::is_normal)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group_spec;

    fn el(g: &GroupSpec, text: &str) -> Element {
        g.parse_element(text).unwrap()
    }

    fn idx(h: &Subgroup) -> Vec<usize> {
        h.elements().iter().map(|e| e.index()).collect()
    }

    /// Closure by brute force: iterate products of everything found so far.
    fn brute_closure(g: &GroupSpec, gens: &[Element]) -> Vec<Element> {
        let mut set: HashSet<Element> = gens.iter().copied().collect();
        set.insert(g.identity());
        loop {
            let snapshot: Vec<Element> = set.iter().copied().collect();
            let before = set.len();
            for &a in &snapshot {
                set.insert(g.inverse(a));
                for &b in &snapshot {
                    set.insert(g.op(a, b));
                }
            }
            if set.len() == before {
                let mut v: Vec<Element> = set.into_iter().collect();
                v.sort();
                return v;
            }
        }
    }

    #[test]
    fn closes_cyclic_subgroups() {
        let z4 = GroupSpec::cyclic(4);
        let h = subgroup_close(&z4, &[Element::from_index(2)]).unwrap();
        assert_eq!(idx(&h), vec![0, 2]);
        assert_eq!(h.order(), 2);

        let z6 = GroupSpec::cyclic(6);
        let h = subgroup_close(&z6, &[]).unwrap();
        assert_eq!(idx(&h), vec![0]);
    }

    #[test]
    fn closes_product_subgroup() {
        let g = parse_group_spec("Z12xZ2").unwrap();
        let gens = [el(&g, "(4,0)"), el(&g, "(0,1)")];
        let h = subgroup_close(&g, &gens).unwrap();
        assert_eq!(h.order(), 6);
        assert_eq!(h.elements(), brute_closure(&g, &gens).as_slice());
        assert_eq!(h.to_spec_string(&g), "gens=(0,1);(4,0)");
        assert_eq!(Subgroup::parse(&g, "gens=(4,0);(0,1)").unwrap(), h);
    }

    #[test]
    fn rejects_out_of_range_generators() {
        let g = GroupSpec::cyclic(4);
        assert!(subgroup_close(&g, &[Element::from_index(4)]).is_err());
    }

    #[test]
    fn orthogonal_examples() {
        let z4 = GroupSpec::cyclic(4);
        let h = subgroup_close(&z4, &[Element::from_index(2)]).unwrap();
        assert_eq!(idx(&orthogonal(&z4, &h).unwrap()), vec![0, 2]);

        for spec in ["Z12", "Z2xZ6", "Z3xZ3"] {
            let g = parse_group_spec(spec).unwrap();
            let triv = Subgroup::trivial(&g);
            let whole = Subgroup::whole(&g);
            assert_eq!(orthogonal(&g, &triv).unwrap(), whole);
            assert_eq!(orthogonal(&g, &whole).unwrap(), triv);
        }

        assert_eq!(
            orthogonal(
                &GroupSpec::dihedral(4),
                &Subgroup::trivial(&GroupSpec::dihedral(4))
            ),
            Err(Error::NotAbelian)
        );
    }

    #[test]
    fn orthogonal_is_an_involution_with_complementary_order() {
        for spec in ["Z12", "Z2xZ2xZ2", "Z4xZ6"] {
            let g = parse_group_spec(spec).unwrap();
            for h in all_subgroups(&g) {
                let perp = orthogonal(&g, &h).unwrap();
                assert_eq!(h.order() * perp.order(), g.order());
                assert_eq!(orthogonal(&g, &perp).unwrap(), h);
            }
        }
    }

    #[test]
    fn normal_closure_examples() {
        let d4 = GroupSpec::dihedral(4);
        let s = el(&d4, "(0,1)");
        let h = normal_closure(&d4, &[s]).unwrap();
        let expected: Vec<Element> = ["(0,0)", "(0,1)", "(2,0)", "(2,1)"]
            .iter()
            .map(|t| el(&d4, t))
            .collect();
        assert_eq!(h.elements(), expected.as_slice());

        let s3 = GroupSpec::symmetric3();
        let h = normal_closure(&s3, &[el(&s3, "[102]")]).unwrap();
        assert_eq!(h.order(), 6);

        let g = parse_group_spec("Z12xZ2").unwrap();
        let gens = [el(&g, "(3,1)")];
        assert_eq!(
            normal_closure(&g, &gens).unwrap(),
            subgroup_close(&g, &gens).unwrap()
        );
    }

    #[test]
    fn normal_closure_is_conjugation_invariant() {
        for spec in ["D4", "D6", "S3", "Q8", "D16"] {
            let g = parse_group_spec(spec).unwrap();
            for x in g.elements() {
                let h = normal_closure(&g, &[x]).unwrap();
                assert!(h.is_normal());
                for c in g.elements() {
                    for &y in h.elements() {
                        assert!(h.contains(g.conjugate(c, y)));
                    }
                }
                assert!(h.contains(x));
            }
        }
    }

    #[test]
    fn subgroup_invariants_hold_for_all_subgroups() {
        for spec in ["Z12", "Z2xZ2xZ2", "D4", "D6", "S3", "Q8"] {
            let g = parse_group_spec(spec).unwrap();
            for h in all_subgroups(&g) {
                assert_eq!(g.order() % h.order(), 0, "Lagrange in {spec}");
                assert!(h.contains(g.identity()));
                for &a in h.elements() {
                    assert!(h.contains(g.inverse(a)));
                    for &b in h.elements() {
                        assert!(h.contains(g.op(a, b)));
                    }
                }
                let brute_normal = g
                    .elements()
                    .all(|c| h.elements().iter().all(|&y| h.contains(g.conjugate(c, y))));
                assert_eq!(h.is_normal(), brute_normal);
                assert_eq!(subgroup_close(&g, h.generators()).unwrap(), h);
            }
        }
    }

    #[test]
    fn subgroup_counts() {
        let counts = [("Z12", 6), ("Z2xZ2", 5), ("D4", 10), ("S3", 6), ("Q8", 6)];
        for (spec, n) in counts {
            let g = parse_group_spec(spec).unwrap();
            assert_eq!(all_subgroups(&g).len(), n, "{spec}");
        }
        assert_eq!(normal_subgroups(&GroupSpec::dihedral(4)).len(), 6);
        assert_eq!(normal_subgroups(&GroupSpec::quaternion8()).len(), 6);
        assert_eq!(normal_subgroups(&GroupSpec::symmetric3()).len(), 3);
    }

    #[test]
    fn overgroups_of_trivial_in_z4() {
        let z4 = GroupSpec::cyclic(4);
        let over = minimal_overgroups(&z4, &Subgroup::trivial(&z4)).unwrap();
        let sets: Vec<Vec<usize>> = over.iter().map(idx).collect();
        assert_eq!(sets, vec![vec![0, 2], vec![0, 1, 2, 3]]);
    }

    #[test]
    fn overgroups_of_trivial_in_klein_group() {
        let g = parse_group_spec("Z2xZ2").unwrap();
        let over = minimal_overgroups(&g, &Subgroup::trivial(&g)).unwrap();
        assert_eq!(over.len(), 3);
        assert!(over.iter().all(|h| h.order() == 2));
    }

    #[test]
    fn no_overgroups_of_whole_group() {
        for spec in ["Z6", "D4", "Z1"] {
            let g = parse_group_spec(spec).unwrap();
            assert!(minimal_overgroups(&g, &Subgroup::whole(&g))
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn overgroups_require_normal_subgroup() {
        let d4 = GroupSpec::dihedral(4);
        let k = subgroup_close(&d4, &[el(&d4, "(0,1)")]).unwrap();
        assert_eq!(minimal_overgroups(&d4, &k), Err(Error::NotNormal));
    }

    #[test]
    fn overgroups_are_strict_and_cover_every_larger_subgroup() {
        for spec in ["Z12", "Z2xZ2xZ2", "Z4xZ6", "Z24", "Z2xZ12"] {
            let g = parse_group_spec(spec).unwrap();
            let subs = all_subgroups(&g);
            for k in &subs {
                let over = minimal_overgroups(&g, k).unwrap();
                for h in &over {
                    assert!(k.is_proper_subgroup_of(h));
                }
                for big in subs.iter().filter(|h| k.is_proper_subgroup_of(h)) {
                    assert!(over.iter().any(|h| h.is_subgroup_of(big)));
                }
            }
        }
        for spec in ["D4", "Q8", "S3", "D6"] {
            let g = parse_group_spec(spec).unwrap();
            let normals = normal_subgroups(&g);
            for k in &normals {
                let over = minimal_overgroups(&g, k).unwrap();
                for big in normals.iter().filter(|h| k.is_proper_subgroup_of(h)) {
                    assert!(over.iter().any(|h| h.is_subgroup_of(big)));
                }
                assert!(over
                    .iter()
                    .all(|h| h.is_normal() && k.is_proper_subgroup_of(h)));
            }
        }
    }

    #[test]
    fn t_generated_examples() {
        let z8 = GroupSpec::cyclic(8);
        let subs = t_generated_normal_subgroups(&z8, 4, 1).unwrap();
        let sets: Vec<Vec<usize>> = subs.iter().map(idx).collect();
        assert_eq!(sets, vec![vec![0], vec![0, 4], vec![0, 2, 4, 6]]);

        for spec in ["Z6", "D4", "Q8"] {
            let g = parse_group_spec(spec).unwrap();
            let subs = t_generated_normal_subgroups(&g, 1, 1).unwrap();
            assert_eq!(subs, vec![Subgroup::trivial(&g)]);
        }

        let d4 = GroupSpec::dihedral(4);
        let subs = t_generated_normal_subgroups(&d4, 2, 1).unwrap();
        let expected = vec![
            Subgroup::trivial(&d4),
            subgroup_close(&d4, &[el(&d4, "(2,0)")]).unwrap(),
        ];
        assert_eq!(subs, expected);
    }

    /// Brute force over all t-tuples of elements.
    fn brute_t_generated(g: &GroupSpec, k: u64, t: u32) -> Vec<Subgroup> {
        let n = g.size();
        let mut found = HashSet::new();
        let mut out = Vec::new();
        let total = n.pow(t);
        for code in 0..total {
            let mut c = code;
            let mut gens = Vec::new();
            for _ in 0..t {
                gens.push(Element::from_index(c % n));
                c /= n;
            }
            let h = normal_closure(g, &gens).unwrap();
            if h.order() <= k && found.insert(h.elements.clone()) {
                out.push(h);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn t_generated_matches_tuple_enumeration() {
        for (spec, k, t) in [
            ("Z12", 6, 2),
            ("Z2xZ2xZ2", 4, 2),
            ("Z2xZ2xZ2", 8, 3),
            ("Z4xZ2", 8, 1),
            ("D4", 4, 2),
            ("Q8", 8, 2),
            ("S3", 6, 1),
            ("D6", 6, 2),
        ] {
            let g = parse_group_spec(spec).unwrap();
            assert_eq!(
                t_generated_normal_subgroups(&g, k, t).unwrap(),
                brute_t_generated(&g, k, t),
                "{spec} k={k} t={t}"
            );
        }
    }

    #[test]
    fn t_generated_budget_is_enforced() {
        let g = parse_group_spec("Z2xZ2xZ2xZ2").unwrap();
        assert_eq!(
            t_generated_normal_subgroups_with_budget(&g, 16, 2, 5),
            Err(Error::BudgetExceeded { budget: 5 })
        );
    }

    #[test]
    fn cosets_partition_the_group() {
        let g = GroupSpec::dihedral(4);
        for h in normal_subgroups(&g) {
            let cosets = h.cosets(&g);
            assert_eq!(cosets.count() as u64 * h.order(), g.order());
            for x in g.elements() {
                for &y in h.elements() {
                    assert_eq!(cosets.coset_of(x), cosets.coset_of(g.op(x, y)));
                }
            }
        }
    }
}
