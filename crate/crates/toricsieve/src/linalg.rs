//! Exact dense linear algebra over field elements: reduced row echelon form,
//! rank, solving, and rank tracking for incremental images. All matrices here
//! are small (jet spaces, Jacobians), so the plain Gaussian elimination is the
//! right tool.

use crate::ff::FieldElement;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut Vec<Vec<FieldElement>>) -> Vec<usize> {
    let mut pivots = Vec::new();
    if rows.is_empty() {
        return pivots;
    }
    let ncols = rows[0].len();
    let mut r = 0usize;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].inv();
        for j in c..ncols {
            rows[r][j] = rows[r][j].mul(&inv);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for j in c..ncols {
                let s = f.mul(&rows[r][j]);
                rows[i][j] = rows[i][j].sub(&s);
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    pivots
}

pub fn rank(mut rows: Vec<Vec<FieldElement>>) -> usize {
    rref(&mut rows).len()
}

/// Incremental row-space tracker: feed rows one at a time, query the rank.
pub struct RowSpace {
    rows: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new() -> Self {
        RowSpace {
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce the row against the current basis; absorb it if independent.
    /// Returns true when the rank grew.
    pub fn insert(&mut self, mut row: Vec<FieldElement>) -> bool {
        for (basis_row, &pc) in self.rows.iter().zip(&self.pivots) {
            if !row[pc].is_zero() {
                let f = row[pc].clone();
                for j in 0..row.len() {
                    let s = f.mul(&basis_row[j]);
                    row[j] = row[j].sub(&s);
                }
            }
        }
        let Some(pc) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[pc].inv();
        for x in &mut row {
            *x = x.mul(&inv);
        }
        // keep the basis reduced
        for (basis_row, _) in self.rows.iter_mut().zip(&self.pivots) {
            if !basis_row[pc].is_zero() {
                let f = basis_row[pc].clone();
                for j in 0..row.len() {
                    let s = f.mul(&row[j]);
                    basis_row[j] = basis_row[j].sub(&s);
                }
            }
        }
        self.rows.push(row);
        self.pivots.push(pc);
        true
    }

    pub fn basis(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    /// Rank of the basis restricted to the leading `k` columns.
    pub fn rank_of_leading_columns(&self, k: usize) -> usize {
        let truncated: Vec<Vec<FieldElement>> = self
            .rows
            .iter()
            .map(|r| r[..k.min(r.len())].to_vec())
            .collect();
        rank(truncated)
    }
}

impl Default for RowSpace {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{make_field, FieldElement};

    #[test]
    fn rank_over_f2() {
        let f2 = make_field(2, 1).unwrap();
        let e = |v: u64| FieldElement::from_int(&f2, v);
        let rows = vec![
            vec![e(1), e(0), e(1)],
            vec![e(0), e(1), e(1)],
            vec![e(1), e(1), e(0)],
        ];
        assert_eq!(rank(rows), 2);
    }

    #[test]
    fn rowspace_incremental_matches_batch() {
        let f3 = make_field(3, 1).unwrap();
        let e = |v: u64| FieldElement::from_int(&f3, v);
        let rows = vec![
            vec![e(1), e(2), e(0), e(1)],
            vec![e(2), e(1), e(1), e(0)],
            vec![e(0), e(0), e(1), e(1)],
            vec![e(1), e(0), e(2), e(2)],
            vec![e(2), e(2), e(2), e(2)],
        ];
        let mut space = RowSpace::new();
        for (i, row) in rows.iter().enumerate() {
            space.insert(row.clone());
            assert_eq!(space.rank(), rank(rows[..=i].to_vec()));
        }
    }
}
