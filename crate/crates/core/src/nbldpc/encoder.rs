//! Systematic encoding through a one-time Gaussian elimination of H.

use crate::error::{Error, Result};
use crate::gf256::{Field, FieldElement};

use super::code::SparseParityCheck;

/// Reduced row echelon form of a parity-check matrix.
pub(crate) struct RowReduced {
    /// Dense rows, `rows[i][j]` is the reduced coefficient.
    pub rows: Vec<Vec<u8>>,
    /// Pivot column of each nonzero row, in row order.
    pub pivots: Vec<usize>,
}

pub(crate) fn row_reduce(code: &SparseParityCheck) -> RowReduced {
    let field = code.field();
    let (m, n) = (code.m(), code.n());
    let mut rows = vec![vec![0u8; n]; m];
    for e in code.entries() {
        rows[e.row][e.col] = e.coeff.0;
    }
    let mut pivots = Vec::with_capacity(m);
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = field.inv(FieldElement(rows[r][col])).expect("pivot is nonzero");
        scale_row(field, &mut rows[r], inv);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let factor = FieldElement(row[col]);
                let mul = field.mul_row(factor);
                for (dst, &src) in row.iter_mut().zip(&pivot_row) {
                    *dst ^= mul[src as usize];
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    RowReduced { rows, pivots }
}

fn scale_row(field: &Field, row: &mut [u8], by: FieldElement) {
    let mul = field.mul_row(by);
    for v in row.iter_mut() {
        *v = mul[*v as usize];
    }
}

/// A codeword of a specific code: length-N symbols with zero syndrome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword(pub Vec<FieldElement>);

impl Codeword {
    pub fn symbols(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Systematic encoder derived from H.
///
/// Columns that become pivots during elimination carry parity; the remaining
/// K columns carry the information symbols in increasing column order.
#[derive(Clone, Debug)]
pub struct Encoder {
    n: usize,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    // parity_rows[i][t]: contribution of info symbol t to parity_positions[i].
    parity_rows: Vec<Vec<FieldElement>>,
    field: std::sync::Arc<Field>,
}

impl Encoder {
    pub fn new(code: &SparseParityCheck) -> Result<Self> {
        let reduced = row_reduce(code);
        if reduced.pivots.len() < code.m() {
            return Err(Error::RankDeficient {
                rank: reduced.pivots.len(),
                rows: code.m(),
            });
        }
        let mut is_pivot = vec![false; code.n()];
        for &p in &reduced.pivots {
            is_pivot[p] = true;
        }
        let info_positions: Vec<usize> = (0..code.n()).filter(|&c| !is_pivot[c]).collect();
        // In characteristic 2: c_pivot = sum_j R[i][j] c_j over info columns.
        let parity_rows = reduced
            .rows
            .iter()
            .map(|row| info_positions.iter().map(|&j| FieldElement(row[j])).collect())
            .collect();
        Ok(Encoder {
            n: code.n(),
            info_positions,
            parity_positions: reduced.pivots,
            parity_rows,
            field: code.field().clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    /// Codeword positions holding the information symbols, in info order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn parity_positions(&self) -> &[usize] {
        &self.parity_positions
    }

    pub fn encode(&self, info: &[FieldElement]) -> Result<Codeword> {
        if info.len() != self.k() {
            return Err(Error::Dimension(format!(
                "expected {} information symbols, got {}",
                self.k(),
                info.len()
            )));
        }
        let mut word = vec![FieldElement::ZERO; self.n];
        for (&pos, &sym) in self.info_positions.iter().zip(info) {
            word[pos] = sym;
        }
        for (&pos, row) in self.parity_positions.iter().zip(&self.parity_rows) {
            word[pos] = row
                .iter()
                .zip(info)
                .fold(FieldElement::ZERO, |acc, (&h, &u)| acc + self.field.mul(h, u));
        }
        Ok(Codeword(word))
    }

    /// Reads the information symbols back out of a (decided) codeword.
    pub fn extract_info(&self, word: &[FieldElement]) -> Vec<FieldElement> {
        self.info_positions.iter().map(|&p| word[p]).collect()
    }
}

/// One-shot encoding; builds the systematic form on every call.
pub fn encode(code: &SparseParityCheck, info: &[FieldElement]) -> Result<Codeword> {
    Encoder::new(code)?.encode(info)
}
