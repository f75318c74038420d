use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};

/// Table-backed `f : G -> S`, with `S` identified with `0..universe`.
///
/// `queries` counts oracle calls in the tester's accounting model (one per
/// point query, one per Fourier-sampling run). `simulation_reads` counts the
/// full-table reads the simulator performs to compute exact distributions;
/// those are not queries.
#[derive(Debug)]
pub struct FunctionOracle {
    group: GroupSpec,
    table: Vec<u64>,
    universe: u128,
    queries: AtomicU64,
    simulation_reads: AtomicU64,
}

impl Clone for FunctionOracle {
    fn clone(&self) -> Self {
        FunctionOracle {
            group: self.group.clone(),
            table: self.table.clone(),
            universe: self.universe,
            queries: AtomicU64::new(self.queries()),
            simulation_reads: AtomicU64::new(self.simulation_reads()),
        }
    }
}

fn check_table(group: &GroupSpec, table: &[u64], universe: u128) -> Result<()> {
    if table.len() != group.size() {
        return Err(Error::DomainMismatch);
    }
    if let Some(&v) = table.iter().find(|&&v| v as u128 >= universe) {
        return Err(Error::InvalidParameter(format!(
            "value {v} outside a universe of size {universe}"
        )));
    }
    Ok(())
}

impl FunctionOracle {
    pub fn new(group: GroupSpec, table: Vec<u64>, universe: u128) -> Result<Self> {
        check_table(&group, &table, universe)?;
        Ok(FunctionOracle {
            group,
            table,
            universe,
            queries: AtomicU64::new(0),
            simulation_reads: AtomicU64::new(0),
        })
    }

    /// Universe sized to the largest value in the table.
    pub fn from_table(group: GroupSpec, table: Vec<u64>) -> Result<Self> {
        let universe = table.iter().max().map_or(1, |&m| m as u128 + 1);
        Self::new(group, table, universe)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// Raw table access for simulation and exact distance computations.
    /// Not charged as queries.
    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn value_universe_size(&self) -> u128 {
        self.universe
    }

    /// Classical point query.
    pub fn query(&self, x: Element) -> u64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.table[x.index()]
    }

    /// Charges `n` superposition queries (one per Fourier-sampling run).
    pub fn charge_superposition_queries(&self, n: u64) {
        self.queries.fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn note_simulation_read(&self) {
        self.simulation_reads
            .fetch_add(self.table.len() as u64, Ordering::Relaxed);
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn simulation_reads(&self) -> u64 {
        self.simulation_reads.load(Ordering::Relaxed)
    }

    pub fn reset_counters(&self) {
        self.queries.store(0, Ordering::Relaxed);
        self.simulation_reads.store(0, Ordering::Relaxed);
    }
}

/// A pair `(f0, f1)`, equivalently `f : G x Z2 -> S` with `f(x, b) = f_b(x)`.
#[derive(Debug)]
pub struct PairOracle {
    group: GroupSpec,
    f0: Vec<u64>,
    f1: Vec<u64>,
    universe: u128,
    queries: AtomicU64,
    simulation_reads: AtomicU64,
}

impl Clone for PairOracle {
    fn clone(&self) -> Self {
        PairOracle {
            group: self.group.clone(),
            f0: self.f0.clone(),
            f1: self.f1.clone(),
            universe: self.universe,
            queries: AtomicU64::new(self.queries()),
            simulation_reads: AtomicU64::new(self.simulation_reads()),
        }
    }
}

impl PairOracle {
    pub fn new(group: GroupSpec, f0: Vec<u64>, f1: Vec<u64>, universe: u128) -> Result<Self> {
        check_table(&group, &f0, universe)?;
        check_table(&group, &f1, universe)?;
        Ok(PairOracle {
            group,
            f0,
            f1,
            universe,
            queries: AtomicU64::new(0),
            simulation_reads: AtomicU64::new(0),
        })
    }

    pub fn from_tables(group: GroupSpec, f0: Vec<u64>, f1: Vec<u64>) -> Result<Self> {
        let universe = f0.iter().chain(&f1).max().map_or(1, |&m| m as u128 + 1);
        Self::new(group, f0, f1, universe)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn f0(&self) -> &[u64] {
        &self.f0
    }

    pub fn f1(&self) -> &[u64] {
        &self.f1
    }

    pub fn side(&self, b: u8) -> &[u64] {
        if b == 0 {
            &self.f0
        } else {
            &self.f1
        }
    }

    pub fn value_universe_size(&self) -> u128 {
        self.universe
    }

    /// Classical point query `f(x, b) = f_b(x)`.
    pub fn query(&self, x: Element, b: u8) -> u64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.side(b)[x.index()]
    }

    pub fn charge_superposition_queries(&self, n: u64) {
        self.queries.fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn note_simulation_read(&self) {
        self.simulation_reads
            .fetch_add(2 * self.f0.len() as u64, Ordering::Relaxed);
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn simulation_reads(&self) -> u64 {
        self.simulation_reads.load(Ordering::Relaxed)
    }

    pub fn reset_counters(&self) {
        self.queries.store(0, Ordering::Relaxed);
        self.simulation_reads.store(0, Ordering::Relaxed);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_point_and_superposition_queries() {
        let g = GroupSpec::cyclic(4);
        let f = FunctionOracle::from_table(g, vec![0, 1, 0, 2]).unwrap();
        assert_eq!(f.query(Element::from_index(3)), 2);
        assert_eq!(f.queries(), 1);
        f.charge_superposition_queries(1);
        assert_eq!(f.queries(), 2);
        assert_eq!(f.value_universe_size(), 3);
        f.reset_counters();
        assert_eq!(f.queries(), 0);
    }

    #[test]
    fn rejects_bad_tables() {
        let g = GroupSpec::cyclic(4);
        assert_eq!(
            FunctionOracle::from_table(g.clone(), vec![0, 1]).unwrap_err(),
            Error::DomainMismatch
        );
        assert!(FunctionOracle::new(g.clone(), vec![0, 1, 2, 3], 3).is_err());
        assert!(PairOracle::from_tables(g, vec![0; 4], vec![0; 3]).is_err());
    }

    #[test]
    fn pair_queries_read_the_right_side() {
        let g = GroupSpec::cyclic(2);
        let f = PairOracle::from_tables(g, vec![5, 6], vec![7, 8]).unwrap();
        assert_eq!(f.query(Element::from_index(1), 0), 6);
        assert_eq!(f.query(Element::from_index(0), 1), 7);
        assert_eq!(f.queries(), 2);
    }
}
