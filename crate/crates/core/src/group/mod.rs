//! Finite groups with exact element arithmetic.
//!
//! A [`GroupSpec`] is either a product of cyclic groups `Z_{n_1} x ... x Z_{n_m}`
//! or one of the built-in non-abelian families (`D_n`, `S3`, `Q8`). Elements are
//! dense indices `0..|G|` whose numeric order coincides with the lexicographic
//! order of their coordinate tuples, so sorting indices sorts elements
//! canonically.

mod irrep;
mod subgroup;

pub(crate) use irrep::root_of_unity;
pub use irrep::{irrep_count, irrep_label, irrep_table, Irrep, Matrix};
pub use subgroup::{
    all_subgroups, minimal_overgroups, normal_closure, normal_subgroups, orthogonal,
    subgroup_close, t_generated_normal_subgroups, t_generated_normal_subgroups_with_budget, Cosets,
    Subgroup, DEFAULT_TUPLE_BUDGET,
};

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap on `|G|` accepted by [`parse_group_spec`].
pub const DEFAULT_MAX_ORDER: u64 = 1 << 24;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    AbelianProduct,
    Dihedral,
    Symmetric3,
    Quaternion8,
}

/// A group element, stored as its canonical index.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(usize);

impl Element {
    pub const fn from_index(index: usize) -> Self {
        Element(index)
    }

    pub const fn index(self) -> usize {
        self.0
    }
}

// Permutations of {0,1,2} in lexicographic order; p[i] is the image of i.
const S3_PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

// Quaternion units 1, i, j, k: product table as (unit, negate).
const Q8_UNIT_MUL: [[(usize, bool); 4]; 4] = [
    [(0, false), (1, false), (2, false), (3, false)],
    [(1, false), (0, true), (3, false), (2, true)],
    [(2, false), (3, true), (0, true), (1, false)],
    [(3, false), (2, false), (1, true), (0, true)],
];

const Q8_NAMES: [&str; 8] = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    kind: GroupKind,
    /// Cyclic factors for abelian products; `[n]` for `D_n`; empty otherwise.
    factors: Vec<u64>,
    order: u64,
    exponent: u64,
    strides: Vec<u64>,
}

/// Parses `Z<n>(xZ<n>)*`, `D<n>`, `S3` or `Q8` with the default order cap.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    parse_group_spec_with_limit(text, DEFAULT_MAX_ORDER)
}

pub fn parse_group_spec_with_limit(text: &str, max_order: u64) -> Result<GroupSpec> {
    let err = |reason: &str| Error::Parse {
        input: text.to_string(),
        reason: reason.to_string(),
    };
    let parse_n = |digits: &str| -> Result<u64> {
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("expected a positive integer"));
        }
        let n: u64 = digits.parse().map_err(|_| err("integer too large"))?;
        if n == 0 {
            return Err(err("cyclic orders must be at least 1"));
        }
        Ok(n)
    };
    let trimmed = text.trim();
    let group = match trimmed {
        "S3" => GroupSpec::symmetric3(),
        "Q8" => GroupSpec::quaternion8(),
        _ if trimmed.starts_with('D') => {
            let n = parse_n(&trimmed[1..])?;
            let order = 2 * n as u128;
            if order > max_order as u128 {
                return Err(Error::Overflow {
                    order,
                    max: max_order,
                });
            }
            GroupSpec::dihedral(n)
        }
        _ if trimmed.starts_with('Z') => {
            let mut factors = Vec::new();
            let mut order: u128 = 1;
            for part in trimmed.split('x') {
                let digits = part.strip_prefix('Z').ok_or_else(|| err("expected Z<n>"))?;
                let n = parse_n(digits)?;
                order = order.saturating_mul(n as u128);
                if order > max_order as u128 {
                    return Err(Error::Overflow {
                        order,
                        max: max_order,
                    });
                }
                factors.push(n);
            }
            GroupSpec::abelian(&factors)
        }
        _ => return Err(err("expected Z<n>(xZ<n>)*, D<n>, S3 or Q8")),
    };
    Ok(group)
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_group_spec(s)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::AbelianProduct => {
                let parts: Vec<String> = self.factors.iter().map(|n| format!("Z{n}")).collect();
                write!(f, "{}", parts.join("x"))
            }
            GroupKind::Dihedral => write!(f, "D{}", self.factors[0]),
            GroupKind::Symmetric3 => write!(f, "S3"),
            GroupKind::Quaternion8 => write!(f, "Q8"),
        }
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl GroupSpec {
    /// `Z_{n_1} x ... x Z_{n_m}`. Panics if any factor is zero.
    pub fn abelian(factors: &[u64]) -> Self {
        assert!(
            factors.iter().all(|&n| n >= 1),
            "cyclic factors must be positive"
        );
        let factors = if factors.is_empty() {
            vec![1]
        } else {
            factors.to_vec()
        };
        let order = factors.iter().product();
        let exponent = factors.iter().fold(1u64, |acc, &n| acc.lcm(&n));
        let mut strides = vec![1u64; factors.len()];
        for j in (0..factors.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * factors[j + 1];
        }
        GroupSpec {
            kind: GroupKind::AbelianProduct,
            factors,
            order,
            exponent,
            strides,
        }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::abelian(&[n])
    }

    /// Dihedral group of order `2n`, elements `r^a s^b`.
    pub fn dihedral(n: u64) -> Self {
        assert!(n >= 1, "dihedral index must be positive");
        GroupSpec {
            kind: GroupKind::Dihedral,
            factors: vec![n],
            order: 2 * n,
            exponent: n.lcm(&2),
            strides: vec![2, 1],
        }
    }

    pub fn symmetric3() -> Self {
        GroupSpec {
            kind: GroupKind::Symmetric3,
            factors: Vec::new(),
            order: 6,
            exponent: 6,
            strides: vec![1],
        }
    }

    pub fn quaternion8() -> Self {
        GroupSpec {
            kind: GroupKind::Quaternion8,
            factors: Vec::new(),
            order: 8,
            exponent: 4,
            strides: vec![1],
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn is_abelian(&self) -> bool {
        match self.kind {
            GroupKind::AbelianProduct => true,
            GroupKind::Dihedral => self.factors[0] <= 2,
            _ => false,
        }
    }

    /// True only for the abelian-product presentation, where characters are
    /// indexed by elements.
    pub fn is_abelian_product(&self) -> bool {
        self.kind == GroupKind::AbelianProduct
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `|G|` as an index bound.
    pub fn size(&self) -> usize {
        self.order as usize
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn identity(&self) -> Element {
        Element(0)
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.size()).map(Element)
    }

    pub fn check(&self, a: Element) -> Result<()> {
        if a.0 < self.size() {
            Ok(())
        } else {
            Err(Error::InvalidElement(a.0.to_string()))
        }
    }

    /// Coordinate tuple: residues for abelian products, `(a, b)` for
    /// `r^a s^b` in `D_n`, a single table index for `S3` and `Q8`.
    pub fn coords(&self, a: Element) -> Vec<u64> {
        let idx = a.0 as u64;
        match self.kind {
            GroupKind::AbelianProduct => self
                .factors
                .iter()
                .zip(&self.strides)
                .map(|(&n, &stride)| (idx / stride) % n)
                .collect(),
            GroupKind::Dihedral => vec![idx / 2, idx % 2],
            GroupKind::Symmetric3 | GroupKind::Quaternion8 => vec![idx],
        }
    }

    pub fn element(&self, coords: &[u64]) -> Result<Element> {
        let bad = || Error::InvalidElement(format!("{coords:?}"));
        match self.kind {
            GroupKind::AbelianProduct => {
                if coords.len() != self.factors.len() {
                    return Err(bad());
                }
                let mut idx = 0u64;
                for ((&x, &n), &stride) in coords.iter().zip(&self.factors).zip(&self.strides) {
                    if x >= n {
                        return Err(bad());
                    }
                    idx += x * stride;
                }
                Ok(Element(idx as usize))
            }
            GroupKind::Dihedral => match coords {
                [a, b] if *a < self.factors[0] && *b < 2 => Ok(Element((2 * a + b) as usize)),
                _ => Err(bad()),
            },
            GroupKind::Symmetric3 | GroupKind::Quaternion8 => match coords {
                [i] if *i < self.order => Ok(Element(*i as usize)),
                _ => Err(bad()),
            },
        }
    }

    /// Group product `a * b` (written additively for abelian products).
    pub fn op(&self, a: Element, b: Element) -> Element {
        match self.kind {
            GroupKind::AbelianProduct => {
                if self.factors.len() == 1 {
                    let n = self.order as usize;
                    return Element((a.0 + b.0) % n);
                }
                let mut idx = 0u64;
                for (&n, &stride) in self.factors.iter().zip(&self.strides) {
                    let x = (a.0 as u64 / stride) % n;
                    let y = (b.0 as u64 / stride) % n;
                    idx += ((x + y) % n) * stride;
                }
                Element(idx as usize)
            }
            GroupKind::Dihedral => {
                let n = self.factors[0] as usize;
                let (ra, sa) = (a.0 / 2, a.0 % 2);
                let (rb, sb) = (b.0 / 2, b.0 % 2);
                let rot = if sa == 0 {
                    (ra + rb) % n
                } else {
                    (ra + n - rb) % n
                };
                Element(2 * rot + (sa ^ sb))
            }
            GroupKind::Symmetric3 => {
                let (p, q) = (S3_PERMS[a.0], S3_PERMS[b.0]);
                let composed = [p[q[0]], p[q[1]], p[q[2]]];
                Element(S3_PERMS.iter().position(|r| *r == composed).unwrap())
            }
            GroupKind::Quaternion8 => {
                let (ua, na) = (a.0 / 2, a.0 % 2 == 1);
                let (ub, nb) = (b.0 / 2, b.0 % 2 == 1);
                let (u, neg) = Q8_UNIT_MUL[ua][ub];
                Element(2 * u + usize::from(neg ^ na ^ nb))
            }
        }
    }

    pub fn inverse(&self, a: Element) -> Element {
        match self.kind {
            GroupKind::AbelianProduct => {
                let mut idx = 0u64;
                for (&n, &stride) in self.factors.iter().zip(&self.strides) {
                    let x = (a.0 as u64 / stride) % n;
                    idx += ((n - x) % n) * stride;
                }
                Element(idx as usize)
            }
            GroupKind::Dihedral => {
                let n = self.factors[0] as usize;
                let (r, s) = (a.0 / 2, a.0 % 2);
                if s == 1 {
                    a
                } else {
                    Element(2 * ((n - r) % n))
                }
            }
            GroupKind::Symmetric3 => {
                let p = S3_PERMS[a.0];
                let mut inv = [0usize; 3];
                for (i, &pi) in p.iter().enumerate() {
                    inv[pi] = i;
                }
                Element(S3_PERMS.iter().position(|r| *r == inv).unwrap())
            }
            GroupKind::Quaternion8 => {
                // 1 and -1 are self-inverse; every other unit inverts to its negative.
                if a.0 < 2 {
                    a
                } else {
                    Element(a.0 ^ 1)
                }
            }
        }
    }

    /// `g x g^{-1}`.
    pub fn conjugate(&self, g: Element, x: Element) -> Element {
        self.op(self.op(g, x), self.inverse(g))
    }

    /// Smallest `m >= 1` with `a^m = 1`.
    pub fn element_order(&self, a: Element) -> u64 {
        if self.kind == GroupKind::AbelianProduct {
            return self
                .coords(a)
                .iter()
                .zip(&self.factors)
                .fold(1u64, |acc, (&x, &n)| acc.lcm(&(n / n.gcd(&x))));
        }
        let mut m = 1;
        let mut p = a;
        while p != self.identity() {
            p = self.op(p, a);
            m += 1;
        }
        m
    }

    /// Phase index of `chi_y(x) = exp(2 pi i sum_j x_j y_j / n_j)` as an integer
    /// in `0..exponent`, so that `chi_y(x) = exp(2 pi i phase / exponent)`.
    ///
    /// Only meaningful for abelian products.
    pub fn character_phase(&self, y: Element, x: Element) -> u64 {
        debug_assert!(self.is_abelian_product());
        let e = self.exponent as u128;
        let mut acc: u128 = 0;
        for (&n, &stride) in self.factors.iter().zip(&self.strides) {
            let xj = (x.0 as u64 / stride) % n;
            let yj = (y.0 as u64 / stride) % n;
            acc = (acc + (xj as u128 * yj as u128 % n as u128) * (e / n as u128)) % e;
        }
        acc as u64
    }

    pub fn format_element(&self, a: Element) -> String {
        match self.kind {
            GroupKind::Quaternion8 => Q8_NAMES[a.0].to_string(),
            GroupKind::Symmetric3 => {
                let p = S3_PERMS[a.0];
                format!("[{}{}{}]", p[0], p[1], p[2])
            }
            _ => {
                let c: Vec<String> = self.coords(a).iter().map(u64::to_string).collect();
                format!("({})", c.join(","))
            }
        }
    }

    /// Inverse of [`format_element`](Self::format_element); bare integers are
    /// also accepted for single-coordinate groups.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let t = text.trim();
        let bad = || Error::InvalidElement(t.to_string());
        match self.kind {
            GroupKind::Quaternion8 => {
                if let Some(i) = Q8_NAMES.iter().position(|n| *n == t) {
                    return Ok(Element(i));
                }
            }
            GroupKind::Symmetric3 => {
                if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                    let digits: Vec<usize> = inner
                        .chars()
                        .map(|c| c.to_digit(10).map(|d| d as usize))
                        .collect::<Option<_>>()
                        .ok_or_else(bad)?;
                    return S3_PERMS
                        .iter()
                        .position(|p| p[..] == digits[..])
                        .map(Element)
                        .ok_or_else(bad);
                }
            }
            _ => {}
        }
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(t);
        let coords = inner
            .split(',')
            .map(|c| c.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        self.element(&coords)
    }
}
