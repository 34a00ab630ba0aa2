use std::collections::HashSet;

use rand::Rng;

use super::SensingMatrix;
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed};

/// Parameters of the column-regular random construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularParams {
    pub n_vars: usize,
    pub n_checks: usize,
    pub var_degree: usize,
    pub seed: u64,
    pub avoid_4cycles: bool,
    pub max_attempts: usize,
}

impl RegularParams {
    pub fn new(n_vars: usize, n_checks: usize, var_degree: usize, seed: u64) -> Self {
        RegularParams {
            n_vars,
            n_checks,
            var_degree,
            seed,
            avoid_4cycles: false,
            max_attempts: 100,
        }
    }

    pub fn avoid_4cycles(mut self, yes: bool) -> Self {
        self.avoid_4cycles = yes;
        self
    }
}

/// Random column-regular matrix.
///
/// Columns are filled one at a time. Each column takes `var_degree` distinct
/// rows among the currently least-filled ones, ties broken at random. With
/// `avoid_4cycles`, a row is skipped when it already shares a column with a
/// row picked for the current column; if a column cannot be completed the
/// whole matrix is restarted, up to `max_attempts` times.
pub fn generate_regular(p: &RegularParams) -> Result<SensingMatrix> {
    if p.n_vars == 0 || p.n_checks == 0 {
        return Err(Error::Infeasible("matrix dimensions must be positive".into()));
    }
    if p.var_degree == 0 || p.var_degree > p.n_checks {
        return Err(Error::Infeasible(format!(
            "variable degree {} must lie in 1..={}",
            p.var_degree, p.n_checks
        )));
    }
    if p.n_vars * p.var_degree < p.n_checks {
        return Err(Error::Infeasible(format!(
            "{} edges cannot cover {} checks",
            p.n_vars * p.var_degree,
            p.n_checks
        )));
    }
    let attempts = p.max_attempts.max(1);
    for attempt in 0..attempts {
        let seed = derive_seed(p.seed, &[attempt as u64]);
        if let Some(cols) = try_place(p, seed) {
            return SensingMatrix::from_var_lists(p.n_checks, &cols);
        }
    }
    Err(Error::GirthTargetUnmet { attempts })
}

fn try_place(p: &RegularParams, seed: u64) -> Option<Vec<Vec<usize>>> {
    let mut rng = rng_from_seed(seed);
    let mut fill = vec![0usize; p.n_checks];
    // Row pairs already joined by some column; a second join closes a 4-cycle.
    let mut joined: HashSet<(usize, usize)> = HashSet::new();
    let mut cols = Vec::with_capacity(p.n_vars);
    let mut order: Vec<(usize, u64, usize)> = Vec::with_capacity(p.n_checks);

    for _ in 0..p.n_vars {
        order.clear();
        order.extend((0..p.n_checks).map(|m| (fill[m], rng.random::<u64>(), m)));
        order.sort_unstable();

        let mut picked: Vec<usize> = Vec::with_capacity(p.var_degree);
        for &(_, _, m) in &order {
            if picked.len() == p.var_degree {
                break;
            }
            if p.avoid_4cycles && picked.iter().any(|&r| joined.contains(&pair(r, m))) {
                continue;
            }
            picked.push(m);
        }
        if picked.len() < p.var_degree {
            return None;
        }
        if p.avoid_4cycles {
            for (i, &a) in picked.iter().enumerate() {
                for &b in &picked[i + 1..] {
                    joined.insert(pair(a, b));
                }
            }
        }
        for &m in &picked {
            fill[m] += 1;
        }
        picked.sort_unstable();
        cols.push(picked);
    }
    if fill.contains(&0) {
        return None;
    }
    Some(cols)
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A quasi-cyclic base matrix: `-1` marks a zero block, `s >= 0` a circulant
/// shift. `lift` is the block size the shifts were written for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub lift: usize,
    pub entries: Vec<i64>,
}

impl BaseMatrix {
    pub fn new(rows: usize, cols: usize, lift: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(BaseMatrix {
            rows,
            cols,
            lift,
            entries,
        })
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.cols + c]
    }

    /// Rewrites the shifts for lift `z`.
    pub fn rescaled(&self, z: usize, scaling: ShiftScaling) -> BaseMatrix {
        let entries = self
            .entries
            .iter()
            .map(|&s| match scaling {
                _ if s < 0 => s,
                ShiftScaling::Floor if self.lift > 0 => ((s as u128 * z as u128) / self.lift as u128) as i64,
                ShiftScaling::Floor => s,
                ShiftScaling::Modulo => s % z as i64,
            })
            .collect();
        BaseMatrix {
            rows: self.rows,
            cols: self.cols,
            lift: z,
            entries,
        }
    }
}

/// How shifts written for one lift are mapped to a smaller one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftScaling {
    /// `floor(s * z / lift)`
    Floor,
    /// `s mod z`
    Modulo,
}

impl std::str::FromStr for ShiftScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "floor" => Ok(ShiftScaling::Floor),
            "mod" | "modulo" => Ok(ShiftScaling::Modulo),
            other => Err(Error::InvalidConfig(format!("unknown shift scaling {other:?} (floor or mod)"))),
        }
    }
}

/// Parses a base-matrix file: `m_b n_b z`, then `m_b` rows of `n_b` integers.
pub fn parse_base_matrix(text: &str) -> Result<BaseMatrix> {
    let mut rows = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = rows
        .next()
        .ok_or_else(|| Error::parse(1, "empty base-matrix file"))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(hl + 1, "header must be \"m_b n_b z\""))?;
    if nums.len() != 3 || nums.contains(&0) {
        return Err(Error::parse(hl + 1, "header must be three positive integers \"m_b n_b z\""));
    }
    let (mb, nb, z) = (nums[0], nums[1], nums[2]);
    let mut entries = Vec::with_capacity(mb * nb);
    let mut last = hl + 1;
    for _ in 0..mb {
        let (i, line) = rows
            .next()
            .ok_or_else(|| Error::parse(last + 1, format!("expected {mb} base rows")))?;
        last = i + 1;
        let row = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::parse(i + 1, format!("expected an integer, found {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != nb {
            return Err(Error::parse(i + 1, format!("expected {nb} entries, found {}", row.len())));
        }
        if let Some(&bad) = row.iter().find(|&&s| s < -1 || s >= z as i64) {
            return Err(Error::parse(i + 1, format!("entry {bad} outside -1..={}", z - 1)));
        }
        entries.extend(row);
    }
    if let Some((i, _)) = rows.next() {
        return Err(Error::parse(i + 1, "trailing content after base rows"));
    }
    BaseMatrix::new(mb, nb, z, entries)
}

/// Lifts a base matrix with `z × z` circulants: block `(r, c)` with shift `s`
/// connects check `r*z + i` to variable `c*z + (i + s) mod z`.
pub fn expand_qc(base: &BaseMatrix, z: usize) -> Result<SensingMatrix> {
    if z == 0 {
        return Err(Error::InvalidMatrix("lift size must be at least 1".into()));
    }
    if let Some(&bad) = base.entries.iter().find(|&&s| s < -1 || s >= z as i64) {
        return Err(Error::InvalidMatrix(format!(
            "base entry {bad} outside -1..={}",
            z - 1
        )));
    }
    let mut checks = vec![Vec::new(); base.rows * z];
    for r in 0..base.rows {
        for c in 0..base.cols {
            let s = base.get(r, c);
            if s < 0 {
                continue;
            }
            for i in 0..z {
                checks[r * z + i].push(c * z + (i + s as usize) % z);
            }
        }
    }
    SensingMatrix::from_check_lists(base.cols * z, checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_504_has_no_4cycles() {
        let h = generate_regular(&RegularParams::new(504, 252, 3, 1).avoid_4cycles(true)).unwrap();
        assert_eq!((h.n_checks(), h.n_vars()), (252, 504));
        assert!((0..504).all(|n| h.var_degree(n) == 3));
        assert_eq!(h.count_4cycles(), 0);
        let (lo, hi) = (0..252).fold((usize::MAX, 0), |(lo, hi), m| {
            (lo.min(h.check_degree(m)), hi.max(h.check_degree(m)))
        });
        assert!(lo >= 5 && hi <= 7, "check degrees {lo}..{hi}");
        assert!(h.is_consistent());
    }

    #[test]
    fn unconstrained_placement_is_balanced() {
        let h = generate_regular(&RegularParams::new(504, 252, 3, 9)).unwrap();
        assert!((0..252).all(|m| h.check_degree(m) == 6));
    }

    #[test]
    fn girth_target_unmet_on_2x2() {
        let p = RegularParams {
            max_attempts: 5,
            ..RegularParams::new(2, 2, 2, 0).avoid_4cycles(true)
        };
        assert!(matches!(
            generate_regular(&p),
            Err(Error::GirthTargetUnmet { attempts: 5 })
        ));
    }

    #[test]
    fn infeasible_degree() {
        assert!(matches!(
            generate_regular(&RegularParams::new(10, 2, 3, 0)),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            generate_regular(&RegularParams::new(10, 2, 0, 0)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn deterministic_in_seed() {
        let p = RegularParams::new(60, 30, 3, 42).avoid_4cycles(true);
        assert_eq!(generate_regular(&p).unwrap(), generate_regular(&p).unwrap());
        let q = RegularParams { seed: 43, ..p };
        assert_ne!(generate_regular(&q).unwrap(), generate_regular(&RegularParams { seed: 42, ..q.clone() }).unwrap());
    }

    #[test]
    fn circulant_expansion() {
        let id = expand_qc(&BaseMatrix::new(1, 1, 3, vec![0]).unwrap(), 3).unwrap();
        assert_eq!(id.to_dense(), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let shift = expand_qc(&BaseMatrix::new(1, 1, 3, vec![1]).unwrap(), 3).unwrap();
        // check m connects variable (m + 1) mod 3
        assert_eq!(shift.check_neighbors(0), &[1]);
        assert_eq!(shift.check_neighbors(1), &[2]);
        assert_eq!(shift.check_neighbors(2), &[0]);
        assert!(expand_qc(&BaseMatrix::new(1, 1, 3, vec![3]).unwrap(), 3).is_err());
        assert!(expand_qc(&BaseMatrix::new(1, 1, 3, vec![-2]).unwrap(), 3).is_err());
    }

    #[test]
    fn expansion_edge_count() {
        let base = BaseMatrix::new(2, 3, 4, vec![0, -1, 2, 3, 1, -1]).unwrap();
        let h = expand_qc(&base, 4).unwrap();
        assert_eq!((h.n_checks(), h.n_vars()), (8, 12));
        assert_eq!(h.n_edges(), 4 * 4);
    }

    #[test]
    fn base_matrix_file() {
        let b = parse_base_matrix("2 2 5\n0 -1\n4 2\n").unwrap();
        assert_eq!(b.entries, vec![0, -1, 4, 2]);
        assert_eq!(b.rescaled(2, ShiftScaling::Floor).entries, vec![0, -1, 1, 0]);
        assert_eq!(b.rescaled(3, ShiftScaling::Modulo).entries, vec![0, -1, 1, 2]);
        assert!(matches!(parse_base_matrix("2 2 5\n0 -1\n5 2\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_base_matrix("2 2 5\n0 -1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_base_matrix("2 2\n"), Err(Error::Parse { line: 1, .. })));
    }
}
