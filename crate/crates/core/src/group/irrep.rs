//! Closed-form irreducible unitary representation tables for abelian products,
//! dihedral groups, `S3` and `Q8`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Element, GroupKind, GroupSpec, Subgroup};
use crate::error::{Error, Result};

const KERNEL_TOL: f64 = 1e-9;

/// Dense row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Matrix {
    pub fn from_rows(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Matrix { dim, entries }
    }

    pub fn scalar(z: Complex64) -> Self {
        Matrix {
            dim: 1,
            entries: vec![z],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Matrix { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let d = self.dim;
        let mut out = Matrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                for j in 0..d {
                    out.entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &Matrix) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
    }

    pub fn conj_transpose(&self) -> Matrix {
        let d = self.dim;
        let mut out = Matrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Squared Frobenius norm.
    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(Complex64::norm_sqr).sum()
    }
}

/// `exp(2 pi i p / e)`, exact on quarter turns.
pub(crate) fn root_of_unity(p: u64, e: u64) -> Complex64 {
    let p = p % e;
    if (4 * p).is_multiple_of(e) {
        return match 4 * p / e {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * p as f64 / e as f64)
}

/// An irreducible unitary representation given by its matrix on every element.
#[derive(Clone, Debug)]
pub struct Irrep {
    label: String,
    dimension: usize,
    matrices: Vec<Matrix>,
    kernel: Subgroup,
}

impl Irrep {
    fn new(g: &GroupSpec, label: String, matrices: Vec<Matrix>) -> Self {
        let dimension = matrices[0].dim();
        let identity = Matrix::identity(dimension);
        let kernel: Vec<Element> = g
            .elements()
            .filter(|x| matrices[x.index()].max_abs_diff(&identity) < KERNEL_TOL)
            .collect();
        let kernel = Subgroup::from_candidates(g, &kernel);
        Irrep {
            label,
            dimension,
            matrices,
            kernel,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn matrix(&self, x: Element) -> &Matrix {
        &self.matrices[x.index()]
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    /// `rho` is in `H^perp`, i.e. `rho(h) = I` for every `h` in `H`.
    pub fn is_trivial_on(&self, h: &Subgroup) -> bool {
        h.generators().iter().all(|&x| self.kernel.contains(x))
    }
}

fn dihedral_one_dim_count(n: u64) -> usize {
    if n.is_multiple_of(2) {
        4
    } else {
        2
    }
}

/// Number of irreps in the table, without building it.
pub fn irrep_count(g: &GroupSpec) -> usize {
    match g.kind() {
        GroupKind::AbelianProduct => g.size(),
        GroupKind::Dihedral => {
            let n = g.factors()[0];
            dihedral_one_dim_count(n) + ((n - 1) / 2) as usize
        }
        GroupKind::Symmetric3 => 3,
        GroupKind::Quaternion8 => 5,
    }
}

/// Label of the `index`-th irrep of [`irrep_table`].
pub fn irrep_label(g: &GroupSpec, index: usize) -> String {
    match g.kind() {
        GroupKind::AbelianProduct => {
            format!("chi{}", g.format_element(Element::from_index(index)))
        }
        GroupKind::Dihedral => {
            let ones = dihedral_one_dim_count(g.factors()[0]);
            const NAMES: [&str; 4] = ["A1", "A2", "B1", "B2"];
            if index < ones {
                NAMES[index].to_string()
            } else {
                format!("E{}", index - ones + 1)
            }
        }
        GroupKind::Symmetric3 => ["triv", "sign", "std"][index].to_string(),
        GroupKind::Quaternion8 => ["A1", "Ai", "Aj", "Ak", "E"][index].to_string(),
    }
}

/// Complete table of inequivalent irreps; `sum d^2 = |G|` is checked on
/// construction.
pub fn irrep_table(g: &GroupSpec) -> Result<Vec<Irrep>> {
    let per_element: Vec<Vec<Matrix>> = match g.kind() {
        GroupKind::AbelianProduct => g
            .elements()
            .map(|y| {
                g.elements()
                    .map(|x| Matrix::scalar(root_of_unity(g.character_phase(y, x), g.exponent())))
                    .collect()
            })
            .collect(),
        GroupKind::Dihedral => dihedral_matrices(g),
        GroupKind::Symmetric3 => symmetric3_matrices(g),
        GroupKind::Quaternion8 => quaternion_matrices(),
    };
    let table: Vec<Irrep> = per_element
        .into_iter()
        .enumerate()
        .map(|(i, m)| Irrep::new(g, irrep_label(g, i), m))
        .collect();
    let dim_sum: u64 = table
        .iter()
        .map(|r| (r.dimension * r.dimension) as u64)
        .sum();
    if dim_sum != g.order() || table.len() != irrep_count(g) {
        return Err(Error::Unsupported(format!(
            "{g}: irrep dimensions do not sum to |G|"
        )));
    }
    Ok(table)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn dihedral_matrices(g: &GroupSpec) -> Vec<Vec<Matrix>> {
    let n = g.factors()[0];
    let parts = |x: Element| (g.coords(x)[0], g.coords(x)[1]);
    let sign = |b: bool| if b { -1.0 } else { 1.0 };
    let mut out = Vec::new();
    // (r -> +-1, s -> +-1) one-dimensional irreps.
    let mut one_dim: Vec<(bool, bool)> = vec![(false, false), (false, true)];
    if n.is_multiple_of(2) {
        one_dim.extend([(true, false), (true, true)]);
    }
    for (r_neg, s_neg) in one_dim {
        out.push(
            g.elements()
                .map(|x| {
                    let (a, b) = parts(x);
                    let v = sign(r_neg && a % 2 == 1) * sign(s_neg && b == 1);
                    Matrix::scalar(c(v, 0.0))
                })
                .collect(),
        );
    }
    // r^a -> diag(w^{ha}, w^{-ha}), s -> [[0,1],[1,0]].
    for h in 1..=(n - 1) / 2 {
        out.push(
            g.elements()
                .map(|x| {
                    let (a, b) = parts(x);
                    let w = root_of_unity(h * a, n);
                    let wc = w.conj();
                    let zero = c(0.0, 0.0);
                    let entries = if b == 0 {
                        vec![w, zero, zero, wc]
                    } else {
                        vec![zero, w, wc, zero]
                    };
                    Matrix::from_rows(2, entries)
                })
                .collect(),
        );
    }
    out
}

fn symmetric3_matrices(g: &GroupSpec) -> Vec<Vec<Matrix>> {
    let perm = |x: Element| -> [usize; 3] {
        // Recover the permutation by its action on the standard basis labels.
        super::S3_PERMS[x.index()]
    };
    let parity = |p: [usize; 3]| {
        let inversions = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count();
        if inversions % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    // Orthonormal basis of the plane orthogonal to (1,1,1).
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    let basis = [[1.0 / s2, -1.0 / s2, 0.0], [1.0 / s6, 1.0 / s6, -2.0 / s6]];
    let trivial = g.elements().map(|_| Matrix::scalar(c(1.0, 0.0))).collect();
    let sign = g
        .elements()
        .map(|x| Matrix::scalar(c(parity(perm(x)), 0.0)))
        .collect();
    let standard = g
        .elements()
        .map(|x| {
            let p = perm(x);
            // (P e)_k = e_{p^{-1}(k)} so that P e_i = e_{p(i)}.
            let apply = |v: [f64; 3]| {
                let mut out = [0.0; 3];
                for i in 0..3 {
                    out[p[i]] = v[i];
                }
                out
            };
            let mut entries = Vec::with_capacity(4);
            for bi in &basis {
                for bj in &basis {
                    let pv = apply(*bj);
                    let dot: f64 = bi.iter().zip(pv).map(|(a, b)| a * b).sum();
                    entries.push(c(dot, 0.0));
                }
            }
            Matrix::from_rows(2, entries)
        })
        .collect();
    vec![trivial, sign, standard]
}

fn quaternion_matrices() -> Vec<Vec<Matrix>> {
    // Element order: 1, -1, i, -i, j, -j, k, -k.
    let unit_and_sign = |idx: usize| (idx / 2, if idx % 2 == 1 { -1.0 } else { 1.0 });
    let mut out = Vec::new();
    // Trivial, then the characters whose kernels contain i, j, k respectively.
    for keep in [None, Some(1usize), Some(2), Some(3)] {
        out.push(
            (0..8)
                .map(|idx| {
                    let (u, _) = unit_and_sign(idx);
                    let v = match keep {
                        None => 1.0,
                        Some(k) if u == 0 || u == k => 1.0,
                        Some(_) => -1.0,
                    };
                    Matrix::scalar(c(v, 0.0))
                })
                .collect(),
        );
    }
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let units = [
        vec![one, zero, zero, one],
        vec![i, zero, zero, -i],
        vec![zero, one, -one, zero],
        vec![zero, i, i, zero],
    ];
    out.push(
        (0..8)
            .map(|idx| {
                let (u, s) = unit_and_sign(idx);
                Matrix::from_rows(2, units[u].iter().map(|z| z * s).collect())
            })
            .collect(),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{normal_subgroups, parse_group_spec, subgroup_close};

    const TOL: f64 = 1e-12;

    fn check_table(g: &GroupSpec) {
        let table = irrep_table(g).unwrap();
        let dims: u64 = table
            .iter()
            .map(|r| (r.dimension() * r.dimension()) as u64)
            .sum();
        assert_eq!(dims, g.order());
        for rho in &table {
            for x in g.elements() {
                let m = rho.matrix(x);
                let unit = m.mul(&m.conj_transpose());
                assert!(unit.max_abs_diff(&Matrix::identity(rho.dimension())) < TOL);
                for y in g.elements() {
                    let lhs = rho.matrix(g.op(x, y));
                    let rhs = m.mul(rho.matrix(y));
                    assert!(
                        lhs.max_abs_diff(&rhs) < TOL,
                        "{g} {}: not a homomorphism",
                        rho.label()
                    );
                }
            }
            assert!(rho.kernel().is_normal());
        }
        // Inequivalence and irreducibility via character orthogonality.
        for (a, ra) in table.iter().enumerate() {
            for (b, rb) in table.iter().enumerate() {
                let inner: Complex64 = g
                    .elements()
                    .map(|x| {
                        let ta: Complex64 =
                            (0..ra.dimension()).map(|i| ra.matrix(x).get(i, i)).sum();
                        let tb: Complex64 =
                            (0..rb.dimension()).map(|i| rb.matrix(x).get(i, i)).sum();
                        ta * tb.conj()
                    })
                    .sum::<Complex64>()
                    / g.order() as f64;
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((inner - c(expected, 0.0)).norm() < 1e-9, "{g} <{a},{b}>");
            }
        }
    }

    #[test]
    fn tables_are_homomorphisms_with_correct_dimensions() {
        for spec in [
            "Z1", "Z2", "Z12", "Z2xZ6", "Z3xZ3", "D1", "D2", "D3", "D4", "D5", "D6", "D9", "S3",
            "Q8",
        ] {
            check_table(&parse_group_spec(spec).unwrap());
        }
    }

    #[test]
    fn z2_sign_character() {
        let g = GroupSpec::cyclic(2);
        let table = irrep_table(&g).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table[1].kernel().order(), 1);
        assert_eq!(table[0].kernel().order(), 2);
    }

    #[test]
    fn dihedral_and_quaternion_shapes() {
        let d4 = irrep_table(&GroupSpec::dihedral(4)).unwrap();
        let dims: Vec<usize> = d4.iter().map(Irrep::dimension).collect();
        assert_eq!(dims, vec![1, 1, 1, 1, 2]);

        let q8 = GroupSpec::quaternion8();
        let table = irrep_table(&q8).unwrap();
        let dims: Vec<usize> = table.iter().map(Irrep::dimension).collect();
        assert_eq!(dims, vec![1, 1, 1, 1, 2]);
        assert!(table[4].kernel().is_trivial());
        for (idx, name) in [(1, "i"), (2, "j"), (3, "k")] {
            let x = q8.parse_element(name).unwrap();
            let expected = subgroup_close(&q8, &[x]).unwrap();
            assert_eq!(table[idx].kernel(), &expected);
        }
    }

    #[test]
    fn every_normal_subgroup_is_an_intersection_of_kernels() {
        for spec in ["D4", "Q8", "S3", "D6", "Z12"] {
            let g = parse_group_spec(spec).unwrap();
            let table = irrep_table(&g).unwrap();
            for h in normal_subgroups(&g) {
                let mut acc = crate::group::Subgroup::whole(&g);
                for rho in table.iter().filter(|r| r.is_trivial_on(&h)) {
                    acc = acc.intersection(&g, rho.kernel());
                }
                assert_eq!(acc, h, "{spec}");
            }
        }
    }

    #[test]
    fn labels_match_table() {
        for spec in ["Z6", "D4", "D5", "S3", "Q8"] {
            let g = parse_group_spec(spec).unwrap();
            let table = irrep_table(&g).unwrap();
            assert_eq!(table.len(), irrep_count(&g));
            for (i, rho) in table.iter().enumerate() {
                assert_eq!(rho.label(), irrep_label(&g, i));
            }
        }
    }
}
