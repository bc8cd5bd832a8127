//! Sparse parity-check matrices over GF(256) and regular code construction.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf256::{Field, FieldElement};

/// Maximum number of fresh attempts (new edge placement or coefficients)
/// before construction gives up.
const MAX_CONSTRUCTION_ATTEMPTS: u64 = 64;

/// One nonzero entry of a parity-check matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CheckEntry {
    pub row: usize,
    pub col: usize,
    pub coeff: FieldElement,
}

/// A (dv, dc)-regular parity-check matrix with nonzero GF(256) coefficients.
///
/// Entries are stored in row-major order. The matrix is immutable after
/// construction and can be shared between decoders.
#[derive(Clone, Debug)]
pub struct SparseParityCheck {
    n_cols: usize,
    n_rows: usize,
    dv: usize,
    dc: usize,
    entries: Vec<CheckEntry>,
    row_ptr: Vec<usize>,
    col_edges: Vec<Vec<usize>>,
    field: Arc<Field>,
}

impl SparseParityCheck {
    /// Validates and assembles a matrix from its nonzero entries.
    ///
    /// The result must be regular: every column has the same weight and every
    /// row has the same weight. Coefficients must be nonzero and no
    /// (row, column) pair may repeat.
    pub fn from_entries(
        n_cols: usize,
        n_rows: usize,
        mut entries: Vec<CheckEntry>,
        field: Arc<Field>,
    ) -> Result<Self> {
        if n_cols == 0 || n_rows == 0 || n_rows >= n_cols {
            return Err(Error::Config(format!(
                "need 0 < rows < columns, got {n_rows} rows and {n_cols} columns"
            )));
        }
        entries.sort();
        let mut col_weight = vec![0usize; n_cols];
        let mut row_weight = vec![0usize; n_rows];
        for (i, e) in entries.iter().enumerate() {
            if e.row >= n_rows || e.col >= n_cols {
                return Err(Error::Input(format!(
                    "entry ({}, {}) outside a {n_rows}x{n_cols} matrix",
                    e.row, e.col
                )));
            }
            if e.coeff.is_zero() {
                return Err(Error::Input(format!("zero coefficient at ({}, {})", e.row, e.col)));
            }
            if i > 0 && entries[i - 1].row == e.row && entries[i - 1].col == e.col {
                return Err(Error::Input(format!("repeated entry at ({}, {})", e.row, e.col)));
            }
            col_weight[e.col] += 1;
            row_weight[e.row] += 1;
        }
        let dv = col_weight[0];
        let dc = row_weight[0];
        if dv == 0 || col_weight.iter().any(|&w| w != dv) {
            return Err(Error::Input("column weights are not uniform".into()));
        }
        if row_weight.iter().any(|&w| w != dc) {
            return Err(Error::Input("row weights are not uniform".into()));
        }

        let mut row_ptr = vec![0usize; n_rows + 1];
        for r in 0..n_rows {
            row_ptr[r + 1] = row_ptr[r] + row_weight[r];
        }
        let mut col_edges = vec![Vec::with_capacity(dv); n_cols];
        for (idx, e) in entries.iter().enumerate() {
            col_edges[e.col].push(idx);
        }

        Ok(SparseParityCheck {
            n_cols,
            n_rows,
            dv,
            dc,
            entries,
            row_ptr,
            col_edges,
            field,
        })
    }

    /// Code length N in symbols.
    pub fn n(&self) -> usize {
        self.n_cols
    }

    /// Number of parity checks M.
    pub fn m(&self) -> usize {
        self.n_rows
    }

    /// Dimension K = N - M (assumes full row rank).
    pub fn k(&self) -> usize {
        self.n_cols - self.n_rows
    }

    pub fn column_weight(&self) -> usize {
        self.dv
    }

    pub fn row_weight(&self) -> usize {
        self.dc
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n_cols as f64
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// All entries (edges), row-major.
    pub fn entries(&self) -> &[CheckEntry] {
        &self.entries
    }

    /// Edge indices (into [`entries`](Self::entries)) of row `r`.
    pub fn row_edges(&self, r: usize) -> std::ops::Range<usize> {
        self.row_ptr[r]..self.row_ptr[r + 1]
    }

    /// Edge indices of column `c`.
    pub fn col_edges(&self, c: usize) -> &[usize] {
        &self.col_edges[c]
    }

    /// H * word over GF(256).
    pub fn syndrome(&self, word: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if word.len() != self.n_cols {
            return Err(Error::Dimension(format!(
                "word has {} symbols, code length is {}",
                word.len(),
                self.n_cols
            )));
        }
        Ok((0..self.n_rows)
            .map(|r| {
                self.entries[self.row_edges(r)]
                    .iter()
                    .fold(FieldElement::ZERO, |acc, e| acc + self.field.mul(e.coeff, word[e.col]))
            })
            .collect())
    }

    pub fn is_codeword(&self, word: &[FieldElement]) -> bool {
        self.syndrome(word)
            .map(|s| s.iter().all(|v| v.is_zero()))
            .unwrap_or(false)
    }

    /// Row rank over GF(256) by dense Gaussian elimination.
    pub fn rank(&self) -> usize {
        super::encoder::row_reduce(self).pivots.len()
    }

    /// Plain-text form: an `N K dv` header, then one `row col coeff` line per
    /// entry with the coefficient as two lowercase hex digits, row-major.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 * self.entries.len() + 32);
        let _ = writeln!(out, "{} {} {}", self.n_cols, self.k(), self.dv);
        for e in &self.entries {
            let _ = writeln!(out, "{} {} {:02x}", e.row, e.col, e.coeff.0);
        }
        out
    }

    /// Parses the format written by [`to_text`](Self::to_text).
    pub fn from_text(text: &str, field: Arc<Field>) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let nums = parse_fields::<usize>(header, 3, hline)?;
        let (n, k, dv) = (nums[0], nums[1], nums[2]);
        if k >= n {
            return Err(Error::Parse {
                line: hline,
                message: format!("K={k} must be below N={n}"),
            });
        }
        let mut entries = Vec::with_capacity(n * dv);
        for (line, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `row col coeff`, got `{l}`"),
                });
            }
            let row = parts[0].parse::<usize>().map_err(|e| Error::Parse {
                line,
                message: format!("row: {e}"),
            })?;
            let col = parts[1].parse::<usize>().map_err(|e| Error::Parse {
                line,
                message: format!("col: {e}"),
            })?;
            let coeff = u8::from_str_radix(parts[2], 16).map_err(|e| Error::Parse {
                line,
                message: format!("coeff: {e}"),
            })?;
            entries.push(CheckEntry {
                row,
                col,
                coeff: FieldElement(coeff),
            });
        }
        let code = Self::from_entries(n, n - k, entries, field)?;
        if code.dv != dv {
            return Err(Error::Parse {
                line: hline,
                message: format!("header says dv={dv}, entries give {}", code.dv),
            });
        }
        Ok(code)
    }
}

fn parse_fields<T: std::str::FromStr>(s: &str, count: usize, line: usize) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != count {
        return Err(Error::Parse {
            line,
            message: format!("expected {count} fields, got {}", parts.len()),
        });
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<T>().map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Builds a (dv, dc)-regular code over the default field.
///
/// See [`build_regular_code_with_field`].
pub fn build_regular_code(n: usize, k: usize, dv: usize, seed: u64) -> Result<SparseParityCheck> {
    build_regular_code_with_field(n, k, dv, seed, Field::shared_default())
}

/// Progressive-edge-growth construction of a regular parity-check matrix.
///
/// Each new edge of a column goes to the check node farthest from that
/// column in the current Tanner graph (unreachable counts as farthest),
/// breaking ties by lowest current row degree and then at random. Row degree
/// is capped at dc = dv*N/M so the result is exactly regular. Coefficients
/// are drawn uniformly from the nonzero field elements. Placements that dead
/// end, or coefficient draws that leave the matrix rank deficient, are
/// retried with a derived seed.
pub fn build_regular_code_with_field(
    n: usize,
    k: usize,
    dv: usize,
    seed: u64,
    field: Arc<Field>,
) -> Result<SparseParityCheck> {
    if k == 0 || k >= n {
        return Err(Error::Config(format!("need N > K > 0, got N={n}, K={k}")));
    }
    let m = n - k;
    if dv == 0 || dv > m {
        return Err(Error::Config(format!("column weight {dv} invalid for {m} checks")));
    }
    if (dv * n) % m != 0 {
        return Err(Error::Config(format!(
            "dv*N = {} is not divisible by M = {m}; no regular matrix exists",
            dv * n
        )));
    }
    let dc = dv * n / m;
    if dc > n {
        return Err(Error::Config(format!("row weight {dc} exceeds N={n}")));
    }

    for attempt in 0..MAX_CONSTRUCTION_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let Some(placement) = peg_placement(n, m, dv, dc, &mut rng) else {
            continue;
        };
        for _ in 0..4 {
            let entries: Vec<CheckEntry> = placement
                .iter()
                .map(|&(row, col)| CheckEntry {
                    row,
                    col,
                    coeff: FieldElement(rng.random_range(1..=255u8)),
                })
                .collect();
            let code = SparseParityCheck::from_entries(n, m, entries, field.clone())?;
            if code.rank() == m {
                return Ok(code);
            }
        }
    }
    Err(Error::Construction(format!(
        "no full-rank ({dv},{dc})-regular placement for N={n}, M={m} after {MAX_CONSTRUCTION_ATTEMPTS} attempts"
    )))
}

fn peg_placement(
    n: usize,
    m: usize,
    dv: usize,
    dc: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<(usize, usize)>> {
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::with_capacity(dv); n];
    let mut row_cols: Vec<Vec<usize>> = vec![Vec::with_capacity(dc); m];
    let mut dist = vec![usize::MAX; m];
    let mut col_seen = vec![false; n];

    for c in 0..n {
        for _ in 0..dv {
            bfs_row_distances(c, &col_rows, &row_cols, &mut dist, &mut col_seen);
            let mut best: Vec<usize> = Vec::new();
            let mut best_key = (0usize, usize::MAX);
            for r in 0..m {
                if row_cols[r].len() >= dc || col_rows[c].contains(&r) {
                    continue;
                }
                // Farther first, then lighter rows.
                let key = (dist[r], row_cols[r].len());
                let better = key.0 > best_key.0 || (key.0 == best_key.0 && key.1 < best_key.1);
                if best.is_empty() || better {
                    best.clear();
                    best.push(r);
                    best_key = key;
                } else if key == best_key {
                    best.push(r);
                }
            }
            if best.is_empty() {
                return None;
            }
            let r = best[rng.random_range(0..best.len())];
            col_rows[c].push(r);
            row_cols[r].push(c);
        }
    }
    let mut placement: Vec<(usize, usize)> = col_rows
        .iter()
        .enumerate()
        .flat_map(|(c, rows)| rows.iter().map(move |&r| (r, c)))
        .collect();
    placement.sort_unstable();
    Some(placement)
}

/// Row distances (in check-node hops) from column `start`; unreachable rows
/// get `usize::MAX`.
fn bfs_row_distances(
    start: usize,
    col_rows: &[Vec<usize>],
    row_cols: &[Vec<usize>],
    dist: &mut [usize],
    col_seen: &mut [bool],
) {
    dist.fill(usize::MAX);
    col_seen.fill(false);
    col_seen[start] = true;
    let mut frontier: Vec<usize> = Vec::new();
    for &r in &col_rows[start] {
        if dist[r] == usize::MAX {
            dist[r] = 0;
            frontier.push(r);
        }
    }
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &r in &frontier {
            for &c in &row_cols[r] {
                if col_seen[c] {
                    continue;
                }
                col_seen[c] = true;
                for &r2 in &col_rows[c] {
                    if dist[r2] == usize::MAX {
                        dist[r2] = depth;
                        next.push(r2);
                    }
                }
            }
        }
        frontier = next;
    }
}

/// Length of the shortest cycle in the Tanner graph, or `None` if acyclic.
pub fn tanner_girth(code: &SparseParityCheck) -> Option<usize> {
    // Nodes: columns 0..n, rows n..n+m. BFS from every column.
    let n = code.n();
    let adj = |v: usize| -> Vec<usize> {
        if v < n {
            code.col_edges(v).iter().map(|&e| n + code.entries()[e].row).collect()
        } else {
            code.entries()[code.row_edges(v - n)].iter().map(|e| e.col).collect()
        }
    };
    let total = n + code.m();
    let mut best: Option<usize> = None;
    for s in 0..n {
        let mut d = vec![usize::MAX; total];
        let mut parent = vec![usize::MAX; total];
        d[s] = 0;
        let mut q = std::collections::VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for u in adj(v) {
                if d[u] == usize::MAX {
                    d[u] = d[v] + 1;
                    parent[u] = v;
                    q.push_back(u);
                } else if parent[v] != u {
                    let len = d[u] + d[v] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// Distinct rows touched by a set of columns; used by tests and diagnostics.
pub fn rows_of_columns(code: &SparseParityCheck, cols: &[usize]) -> BTreeSet<usize> {
    cols.iter()
        .flat_map(|&c| code.col_edges(c).iter().map(|&e| code.entries()[e].row))
        .collect()
}
