//! Sparse binary sensing matrices and their bipartite sensing graph.
//!
//! A [`SensingMatrix`] stores the graph twice, as compressed check-major and
//! variable-major adjacency. Edges are numbered in check-major order, so the
//! edges of check `m` are the contiguous range [`SensingMatrix::check_edges`];
//! [`SensingMatrix::var_edges`] maps each variable to the ids of its edges.
//! Decoders keep per-edge messages in flat arrays indexed by these ids.

mod alist;
mod construct;

use std::ops::Range;

pub use alist::{parse_alist, write_alist};
pub use construct::{expand_qc, generate_regular, parse_base_matrix, BaseMatrix, RegularParams, ShiftScaling};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SensingMatrix {
    n_checks: usize,
    n_vars: usize,
    // check-major: edges check_ptr[m]..check_ptr[m+1], edge_var[e] is the variable.
    check_ptr: Vec<usize>,
    edge_var: Vec<usize>,
    // variable-major: var_ptr[n]..var_ptr[n+1] index into var_check / var_edge.
    var_ptr: Vec<usize>,
    var_check: Vec<usize>,
    var_edge: Vec<usize>,
}

impl SensingMatrix {
    /// Builds a matrix from the variable lists N(m) of every check (0-based).
    ///
    /// Lists may be given in any order; they are sorted. Out-of-range or
    /// duplicate indices and degree-0 checks or variables are rejected.
    pub fn from_check_lists(n_vars: usize, mut checks: Vec<Vec<usize>>) -> Result<Self> {
        let n_checks = checks.len();
        if n_checks == 0 || n_vars == 0 {
            return Err(Error::InvalidMatrix(format!(
                "matrix must be non-empty, got {n_checks}x{n_vars}"
            )));
        }
        let mut var_degree = vec![0usize; n_vars];
        for (m, row) in checks.iter_mut().enumerate() {
            if row.is_empty() {
                return Err(Error::InvalidMatrix(format!("check {m} has no neighbors")));
            }
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidMatrix(format!(
                        "check {m} lists variable {} twice",
                        w[0]
                    )));
                }
            }
            if let Some(&last) = row.last() {
                if last >= n_vars {
                    return Err(Error::InvalidMatrix(format!(
                        "check {m} references variable {last}, but there are only {n_vars}"
                    )));
                }
            }
            for &n in row.iter() {
                var_degree[n] += 1;
            }
        }
        if let Some(n) = var_degree.iter().position(|&d| d == 0) {
            return Err(Error::InvalidMatrix(format!("variable {n} has no neighbors")));
        }

        let mut check_ptr = Vec::with_capacity(n_checks + 1);
        check_ptr.push(0);
        let mut edge_var = Vec::new();
        for row in &checks {
            edge_var.extend_from_slice(row);
            check_ptr.push(edge_var.len());
        }

        let mut var_ptr = Vec::with_capacity(n_vars + 1);
        var_ptr.push(0);
        for d in &var_degree {
            var_ptr.push(var_ptr.last().unwrap() + d);
        }
        let n_edges = edge_var.len();
        let mut fill = var_ptr[..n_vars].to_vec();
        let mut var_check = vec![0; n_edges];
        let mut var_edge = vec![0; n_edges];
        // Walking edges in check-major order leaves each variable's checks sorted.
        for m in 0..n_checks {
            for e in check_ptr[m]..check_ptr[m + 1] {
                let n = edge_var[e];
                var_check[fill[n]] = m;
                var_edge[fill[n]] = e;
                fill[n] += 1;
            }
        }

        Ok(SensingMatrix {
            n_checks,
            n_vars,
            check_ptr,
            edge_var,
            var_ptr,
            var_check,
            var_edge,
        })
    }

    /// Builds a matrix from the check lists M(n) of every variable (0-based).
    pub fn from_var_lists(n_checks: usize, vars: &[Vec<usize>]) -> Result<Self> {
        let mut checks = vec![Vec::new(); n_checks];
        for (n, col) in vars.iter().enumerate() {
            for &m in col {
                if m >= n_checks {
                    return Err(Error::InvalidMatrix(format!(
                        "variable {n} references check {m}, but there are only {n_checks}"
                    )));
                }
                checks[m].push(n);
            }
        }
        Self::from_check_lists(vars.len(), checks)
    }

    /// Builds a matrix from dense 0/1 rows.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let n_vars = rows.first().map_or(0, Vec::len);
        let mut checks = Vec::with_capacity(rows.len());
        for (m, row) in rows.iter().enumerate() {
            if row.len() != n_vars {
                return Err(Error::InvalidMatrix(format!(
                    "row {m} has {} entries, expected {n_vars}",
                    row.len()
                )));
            }
            let mut list = Vec::new();
            for (n, &h) in row.iter().enumerate() {
                match h {
                    0 => {}
                    1 => list.push(n),
                    other => {
                        return Err(Error::InvalidMatrix(format!(
                            "entry ({m}, {n}) is {other}; only 0 and 1 are allowed"
                        )))
                    }
                }
            }
            checks.push(list);
        }
        Self::from_check_lists(n_vars, checks)
    }

    /// Number of rows M.
    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    /// Number of columns N.
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// N(m), sorted.
    pub fn check_neighbors(&self, m: usize) -> &[usize] {
        &self.edge_var[self.check_ptr[m]..self.check_ptr[m + 1]]
    }

    /// M(n), sorted.
    pub fn var_neighbors(&self, n: usize) -> &[usize] {
        &self.var_check[self.var_ptr[n]..self.var_ptr[n + 1]]
    }

    /// Edge ids of check `m`; `edge_var(e)` gives the variable at the other end.
    pub fn check_edges(&self, m: usize) -> Range<usize> {
        self.check_ptr[m]..self.check_ptr[m + 1]
    }

    /// Edge ids of variable `n`, aligned with [`Self::var_neighbors`].
    pub fn var_edges(&self, n: usize) -> &[usize] {
        &self.var_edge[self.var_ptr[n]..self.var_ptr[n + 1]]
    }

    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    pub fn check_degree(&self, m: usize) -> usize {
        self.check_ptr[m + 1] - self.check_ptr[m]
    }

    pub fn var_degree(&self, n: usize) -> usize {
        self.var_ptr[n + 1] - self.var_ptr[n]
    }

    pub fn max_check_degree(&self) -> usize {
        (0..self.n_checks).map(|m| self.check_degree(m)).max().unwrap_or(0)
    }

    pub fn max_var_degree(&self) -> usize {
        (0..self.n_vars).map(|n| self.var_degree(n)).max().unwrap_or(0)
    }

    /// Dense 0/1 rows, mostly useful for tests and small examples.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.n_checks)
            .map(|m| {
                let mut row = vec![0u8; self.n_vars];
                for &n in self.check_neighbors(m) {
                    row[n] = 1;
                }
                row
            })
            .collect()
    }

    /// Full scan of the dual-list invariant: `n ∈ N(m) ⇔ m ∈ M(n)`, lists
    /// sorted without duplicates, all degrees at least one.
    pub fn is_consistent(&self) -> bool {
        let strictly_sorted = |s: &[usize]| s.windows(2).all(|w| w[0] < w[1]);
        let checks_ok = (0..self.n_checks).all(|m| {
            let row = self.check_neighbors(m);
            !row.is_empty()
                && strictly_sorted(row)
                && row
                    .iter()
                    .all(|&n| n < self.n_vars && self.var_neighbors(n).binary_search(&m).is_ok())
        });
        let vars_ok = (0..self.n_vars).all(|n| {
            let col = self.var_neighbors(n);
            !col.is_empty()
                && strictly_sorted(col)
                && col.iter().zip(self.var_edges(n)).all(|(&m, &e)| {
                    m < self.n_checks
                        && self.check_edges(m).contains(&e)
                        && self.edge_var[e] == n
                })
        });
        checks_ok && vars_ok
    }

    /// Number of 4-cycles: for every unordered pair of checks sharing `c`
    /// variables, adds `c choose 2`.
    pub fn count_4cycles(&self) -> u64 {
        let mut shared = vec![0u64; self.n_checks];
        let mut touched = Vec::new();
        let mut total = 0u64;
        for m in 0..self.n_checks {
            for &n in self.check_neighbors(m) {
                for &other in self.var_neighbors(n) {
                    if other > m {
                        if shared[other] == 0 {
                            touched.push(other);
                        }
                        shared[other] += 1;
                    }
                }
            }
            for other in touched.drain(..) {
                let c = shared[other];
                total += c * (c - 1) / 2;
                shared[other] = 0;
            }
        }
        total
    }

    /// Computes `y = H x` for a dense nonnegative signal.
    pub fn measure(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: x.len(),
            });
        }
        if let Some((index, &value)) = x.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::Negative {
                what: "signal entry",
                index,
                value,
            });
        }
        Ok((0..self.n_checks)
            .map(|m| self.check_neighbors(m).iter().map(|&n| x[n]).sum())
            .collect())
    }
}
