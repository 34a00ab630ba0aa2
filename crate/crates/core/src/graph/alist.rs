//! The alist interchange format.
//!
//! ```text
//! N M
//! dv_max dc_max
//! <N column degrees>
//! <M row degrees>
//! <N lines: 1-based check indices of each variable, zero-padded to dv_max>
//! <M lines: 1-based variable indices of each check, zero-padded to dc_max>
//! ```
//!
//! Padding is optional on input and always written on output.

use std::fmt::Write as _;

use super::SensingMatrix;
use crate::error::{Error, Result};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line as parsed integers, with its 1-based line number.
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<i64>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let nums = raw
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i64>()
                        .map_err(|_| Error::parse(i + 1, format!("expected an integer, found {tok:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((i + 1, nums));
        }
        Err(Error::parse(self.last + 1, format!("unexpected end of input, expected {what}")))
    }
}

fn expect_len(line: usize, nums: &[i64], len: usize, what: &str) -> Result<()> {
    if nums.len() != len {
        return Err(Error::parse(
            line,
            format!("expected {len} {what}, found {}", nums.len()),
        ));
    }
    Ok(())
}

fn positive(line: usize, v: i64, what: &str) -> Result<usize> {
    if v <= 0 {
        return Err(Error::parse(line, format!("{what} must be positive, found {v}")));
    }
    Ok(v as usize)
}

/// Reads one adjacency line: `degree` indices in `1..=bound` followed by zero padding.
fn read_list(
    line: usize,
    nums: &[i64],
    degree: usize,
    max_degree: usize,
    bound: usize,
    owner: &str,
) -> Result<Vec<usize>> {
    if nums.len() < degree || nums.len() > max_degree.max(degree) {
        return Err(Error::parse(
            line,
            format!(
                "{owner} has degree {degree} but the line holds {} entries",
                nums.len()
            ),
        ));
    }
    let (list, pad) = nums.split_at(degree);
    if let Some(&bad) = pad.iter().find(|&&v| v != 0) {
        return Err(Error::parse(
            line,
            format!("degree/index mismatch: {owner} has degree {degree} but lists extra index {bad}"),
        ));
    }
    let mut out = Vec::with_capacity(degree);
    for &v in list {
        if v == 0 {
            return Err(Error::parse(
                line,
                format!("degree/index mismatch: {owner} has degree {degree} but lists fewer indices"),
            ));
        }
        if v < 0 || v as usize > bound {
            return Err(Error::parse(
                line,
                format!("index {v} out of range 1..={bound}"),
            ));
        }
        let idx = v as usize - 1;
        if out.contains(&idx) {
            return Err(Error::parse(line, format!("duplicate index {v}")));
        }
        out.push(idx);
    }
    out.sort_unstable();
    Ok(out)
}

/// Parses alist text into a [`SensingMatrix`]. Errors carry the 1-based line number.
pub fn parse_alist(text: &str) -> Result<SensingMatrix> {
    let mut lines = Lines::new(text);

    let (l, header) = lines.next_numbers("header \"N M\"")?;
    expect_len(l, &header, 2, "header values (N M)")?;
    let n_vars = positive(l, header[0], "N")?;
    let n_checks = positive(l, header[1], "M")?;

    let (l, maxes) = lines.next_numbers("\"dv_max dc_max\"")?;
    expect_len(l, &maxes, 2, "maximum degrees")?;
    let dv_max = positive(l, maxes[0], "dv_max")?;
    let dc_max = positive(l, maxes[1], "dc_max")?;

    let (l, col_deg) = lines.next_numbers("column degrees")?;
    expect_len(l, &col_deg, n_vars, "column degrees")?;
    let col_deg = col_deg
        .iter()
        .map(|&d| positive(l, d, "column degree"))
        .collect::<Result<Vec<_>>>()?;
    if let Some(d) = col_deg.iter().find(|&&d| d > dv_max || d > n_checks) {
        return Err(Error::parse(l, format!("column degree {d} exceeds dv_max {dv_max} or M")));
    }

    let (l, row_deg) = lines.next_numbers("row degrees")?;
    expect_len(l, &row_deg, n_checks, "row degrees")?;
    let row_deg = row_deg
        .iter()
        .map(|&d| positive(l, d, "row degree"))
        .collect::<Result<Vec<_>>>()?;
    if let Some(d) = row_deg.iter().find(|&&d| d > dc_max || d > n_vars) {
        return Err(Error::parse(l, format!("row degree {d} exceeds dc_max {dc_max} or N")));
    }
    if col_deg.iter().sum::<usize>() != row_deg.iter().sum::<usize>() {
        return Err(Error::parse(l, "degree sum mismatch"));
    }

    let mut var_lists = Vec::with_capacity(n_vars);
    for (n, &d) in col_deg.iter().enumerate() {
        let (l, nums) = lines.next_numbers("a column adjacency line")?;
        var_lists.push(read_list(l, &nums, d, dv_max, n_checks, &format!("variable {}", n + 1))?);
    }

    let mut check_lists = Vec::with_capacity(n_checks);
    let mut check_lines = Vec::with_capacity(n_checks);
    for (m, &d) in row_deg.iter().enumerate() {
        let (l, nums) = lines.next_numbers("a row adjacency line")?;
        check_lists.push(read_list(l, &nums, d, dc_max, n_vars, &format!("check {}", m + 1))?);
        check_lines.push(l);
    }

    // Row and column sections must describe the same matrix.
    let mut from_cols = vec![Vec::new(); n_checks];
    for (n, list) in var_lists.iter().enumerate() {
        for &m in list {
            from_cols[m].push(n);
        }
    }
    for (m, (rows, cols)) in check_lists.iter().zip(&from_cols).enumerate() {
        if rows != cols {
            return Err(Error::parse(
                check_lines[m],
                format!("check {} disagrees with the column section", m + 1),
            ));
        }
    }

    SensingMatrix::from_check_lists(n_vars, check_lists)
}

/// Writes the canonical alist form: sorted lists, exact maximum degrees,
/// zero padding, single spaces, LF endings.
pub fn write_alist(h: &SensingMatrix) -> String {
    let dv_max = h.max_var_degree();
    let dc_max = h.max_check_degree();
    let mut out = String::new();
    let join = |it: &mut dyn Iterator<Item = usize>| {
        it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    };
    writeln!(out, "{} {}", h.n_vars(), h.n_checks()).unwrap();
    writeln!(out, "{dv_max} {dc_max}").unwrap();
    writeln!(out, "{}", join(&mut (0..h.n_vars()).map(|n| h.var_degree(n)))).unwrap();
    writeln!(out, "{}", join(&mut (0..h.n_checks()).map(|m| h.check_degree(m)))).unwrap();
    for n in 0..h.n_vars() {
        let list = h.var_neighbors(n);
        let mut it = list.iter().map(|&m| m + 1).chain(std::iter::repeat_n(0, dv_max - list.len()));
        writeln!(out, "{}", join(&mut it)).unwrap();
    }
    for m in 0..h.n_checks() {
        let list = h.check_neighbors(m);
        let mut it = list.iter().map(|&n| n + 1).chain(std::iter::repeat_n(0, dc_max - list.len()));
        writeln!(out, "{}", join(&mut it)).unwrap();
    }
    out
}
