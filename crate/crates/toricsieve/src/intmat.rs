//! Dense integer matrices with Smith and Hermite normal forms, kernels and
//! linear solvers over Z and Z/n. Sizes here are tiny (fans have a handful of
//! rays), so everything is written for clarity with i128 entries.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i128>,
}

/// U * A * V = D with U, V unimodular and D diagonal, d_i >= 0, d_i | d_{i+1}.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMat {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut m = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &[i128]) -> Vec<i128> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[i] += c * row[k]
    fn add_row(&mut self, i: usize, k: usize, c: i128) {
        for j in 0..self.cols {
            let v = self[(k, j)];
            self[(i, j)] += c * v;
        }
    }

    /// col[j] += c * col[k]
    fn add_col(&mut self, j: usize, k: usize, c: i128) {
        for i in 0..self.rows {
            let v = self[(i, k)];
            self[(i, j)] += c * v;
        }
    }

    fn neg_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }

    /// Smallest-|entry| nonzero position in the trailing block starting at (k, k).
    fn min_abs_nonzero(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, i128)> = None;
        for i in k..self.rows {
            for j in k..self.cols {
                let v = self[(i, j)].abs();
                if v != 0 && best.map_or(true, |(_, _, b)| v < b) {
                    best = Some((i, j, v));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    pub fn smith(&self) -> Smith {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut u = IntMat::identity(m);
        let mut v = IntMat::identity(n);
        let t = m.min(n);
        for k in 0..t {
            'outer: loop {
                let Some((pi, pj)) = a.min_abs_nonzero(k) else {
                    break;
                };
                a.swap_rows(k, pi);
                u.swap_rows(k, pi);
                a.swap_cols(k, pj);
                v.swap_cols(k, pj);
                let pivot = a[(k, k)];
                let mut dirty = false;
                for i in k + 1..m {
                    let q = a[(i, k)].div_euclid(pivot);
                    if q != 0 {
                        a.add_row(i, k, -q);
                        u.add_row(i, k, -q);
                    }
                    if a[(i, k)] != 0 {
                        dirty = true;
                    }
                }
                for j in k + 1..n {
                    let q = a[(k, j)].div_euclid(pivot);
                    if q != 0 {
                        a.add_col(j, k, -q);
                        v.add_col(j, k, -q);
                    }
                    if a[(k, j)] != 0 {
                        dirty = true;
                    }
                }
                if dirty {
                    continue;
                }
                // Row and column k are clear; enforce divisibility on the rest.
                let pivot = a[(k, k)];
                for i in k + 1..m {
                    for j in k + 1..n {
                        if a[(i, j)] % pivot != 0 {
                            a.add_row(k, i, 1);
                            u.add_row(k, i, 1);
                            continue 'outer;
                        }
                    }
                }
                if a[(k, k)] < 0 {
                    a.neg_row(k);
                    u.neg_row(k);
                }
                break;
            }
        }
        Smith { u, d: a, v }
    }

    /// Diagonal of the Smith form (length min(rows, cols)).
    pub fn elementary_divisors(&self) -> Vec<i128> {
        let s = self.smith();
        (0..self.rows.min(self.cols)).map(|i| s.d[(i, i)]).collect()
    }

    /// Rank over Q.
    pub fn rank(&self) -> usize {
        self.elementary_divisors().iter().filter(|&&d| d != 0).count()
    }

    /// Canonical row Hermite normal form of the row lattice: echelon rows with
    /// positive pivots, entries above each pivot reduced into [0, pivot).
    /// Zero rows are dropped.
    pub fn hnf_rows(&self) -> IntMat {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut pr = 0usize;
        for col in 0..n {
            if pr == m {
                break;
            }
            loop {
                let mut best: Option<(usize, i128)> = None;
                for i in pr..m {
                    let x = a[(i, col)];
                    if x != 0 && best.map_or(true, |(_, b)| x.abs() < b.abs()) {
                        best = Some((i, x));
                    }
                }
                let Some((bi, _)) = best else {
                    break;
                };
                a.swap_rows(pr, bi);
                let mut again = false;
                let pivot = a[(pr, col)];
                for i in pr + 1..m {
                    let q = a[(i, col)].div_euclid(pivot);
                    if q != 0 {
                        a.add_row(i, pr, -q);
                    }
                    if a[(i, col)] != 0 {
                        again = true;
                    }
                }
                if !again {
                    break;
                }
            }
            if a[(pr, col)] != 0 {
                if a[(pr, col)] < 0 {
                    a.neg_row(pr);
                }
                let p = a[(pr, col)];
                for i in 0..pr {
                    let q = a[(i, col)].div_euclid(p);
                    if q != 0 {
                        a.add_row(i, pr, -q);
                    }
                }
                pr += 1;
            }
        }
        let mut rows = Vec::with_capacity(pr);
        for i in 0..pr {
            rows.push(a.row(i).to_vec());
        }
        IntMat::from_rows(&rows)
    }

    /// Basis of the integer right kernel {x : A x = 0}.
    pub fn kernel_basis(&self) -> Vec<Vec<i128>> {
        let s = self.smith();
        let rank = (0..self.rows.min(self.cols))
            .filter(|&i| s.d[(i, i)] != 0)
            .count();
        (rank..self.cols)
            .map(|k| (0..self.cols).map(|i| s.v[(i, k)]).collect())
            .collect()
    }

    /// One integer solution of A x = b, if any.
    pub fn solve(&self, b: &[i128]) -> Option<Vec<i128>> {
        assert_eq!(b.len(), self.rows);
        let s = self.smith();
        let ub = s.u.mul_vec(b);
        let mut y = vec![0i128; self.cols];
        for i in 0..self.rows {
            let d = if i < self.cols { s.d[(i, i)] } else { 0 };
            if d == 0 {
                if ub[i] != 0 {
                    return None;
                }
            } else {
                if ub[i] % d != 0 {
                    return None;
                }
                y[i] = ub[i] / d;
            }
        }
        Some(s.v.mul_vec(&y))
    }

    /// One solution of A x ≡ b (mod n), n >= 1, entries returned in [0, n).
    pub fn solve_mod(&self, b: &[i128], n: i128) -> Option<Vec<i128>> {
        assert!(n >= 1);
        assert_eq!(b.len(), self.rows);
        if n == 1 {
            return Some(vec![0; self.cols]);
        }
        let s = self.smith();
        let ub = s.u.mul_vec(b);
        let mut y = vec![0i128; self.cols];
        for i in 0..self.rows {
            let d = if i < self.cols {
                s.d[(i, i)].rem_euclid(n)
            } else {
                0
            };
            let rhs = ub[i].rem_euclid(n);
            let g = gcd(d, n);
            if rhs % g != 0 {
                return None;
            }
            if i < self.cols {
                // d * y_i ≡ rhs (mod n)
                let n1 = n / g;
                let d1 = (d / g).rem_euclid(n1);
                let r1 = (rhs / g).rem_euclid(n1);
                y[i] = if n1 == 1 {
                    0
                } else {
                    (r1 * mod_inverse(d1, n1)?).rem_euclid(n1)
                };
            }
        }
        let x = s.v.mul_vec(&y);
        Some(x.into_iter().map(|v| v.rem_euclid(n)).collect())
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of a modulo n when gcd(a, n) = 1.
pub fn mod_inverse(a: i128, n: i128) -> Option<i128> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (n, a.rem_euclid(n));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn det(m: &IntMat) -> i128 {
        assert_eq!(m.rows, m.cols);
        let n = m.rows;
        if n == 0 {
            return 1;
        }
        if n == 1 {
            return m[(0, 0)];
        }
        let mut d = 0i128;
        for j in 0..n {
            let mut sub = IntMat::zero(n - 1, n - 1);
            for i in 1..n {
                let mut cj = 0;
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    sub[(i - 1, cj)] = m[(i, k)];
                    cj += 1;
                }
            }
            let s = if j % 2 == 0 { 1 } else { -1 };
            d += s * m[(0, j)] * det(&sub);
        }
        d
    }

    fn check_smith(a: &IntMat) {
        let s = a.smith();
        let uav = s.u.mul(a).mul(&s.v);
        assert_eq!(uav, s.d, "U A V != D");
        assert_eq!(det(&s.u).abs(), 1, "U not unimodular");
        assert_eq!(det(&s.v).abs(), 1, "V not unimodular");
        let t = a.rows.min(a.cols);
        for i in 0..t {
            assert!(s.d[(i, i)] >= 0);
            for j in 0..a.cols.min(a.rows) {
                if i != j {
                    // off-diagonal blocks of D vanish
                }
            }
            if i + 1 < t && s.d[(i + 1, i + 1)] != 0 {
                assert!(s.d[(i, i)] != 0, "zero before nonzero on diagonal");
                assert_eq!(s.d[(i + 1, i + 1)] % s.d[(i, i)], 0, "divisibility chain");
            }
        }
        for i in 0..a.rows {
            for j in 0..a.cols {
                if i != j {
                    assert_eq!(s.d[(i, j)], 0, "D not diagonal");
                }
            }
        }
    }

    #[test]
    fn smith_projective_plane_rays() {
        // ray matrix of the projective plane: rows (1,0), (0,1), (-1,-1)
        let a = IntMat::from_rows(&[vec![1, 0], vec![0, 1], vec![-1, -1]]);
        check_smith(&a);
        assert_eq!(a.elementary_divisors(), vec![1, 1]);
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn smith_known_form() {
        let a = IntMat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let divs = a.elementary_divisors();
        assert_eq!(divs, vec![2, 6, 12]);
        check_smith(&a);
    }

    #[test]
    fn hnf_product_gradings() {
        // left kernel basis of the P^1 x P^1 ray matrix, already echelon
        let a = IntMat::from_rows(&[vec![0, 0, 1, 1], vec![1, 1, 0, 0]]);
        let h = a.hnf_rows();
        assert_eq!(
            h,
            IntMat::from_rows(&[vec![1, 1, 0, 0], vec![0, 0, 1, 1]])
        );
    }

    #[test]
    fn kernel_and_solve() {
        let a = IntMat::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = a.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(a.mul_vec(v), vec![0, 0]);
        }
        let b = vec![6, 12];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert!(a.solve(&[1, 1]).is_none());
    }

    #[test]
    fn solve_mod_basic() {
        let a = IntMat::from_rows(&[vec![2, 0], vec![0, 3]]);
        let x = a.solve_mod(&[4, 6], 7).unwrap();
        assert_eq!((2 * x[0]).rem_euclid(7), 4);
        assert_eq!((3 * x[1]).rem_euclid(7), 6);
        // 2x ≡ 1 (mod 4) has no solution
        let a = IntMat::from_rows(&[vec![2]]);
        assert!(a.solve_mod(&[1], 4).is_none());
        assert!(a.solve_mod(&[2], 4).is_some());
    }

    #[test]
    fn mod_inverse_small() {
        for n in 2i128..50 {
            for a in 1..n {
                if gcd(a, n) == 1 {
                    let inv = mod_inverse(a, n).unwrap();
                    assert_eq!((a * inv).rem_euclid(n), 1);
                } else {
                    assert!(mod_inverse(a, n).is_none());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn smith_random(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
            let mut state = seed;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as i128 % 19) - 9
            };
            let mut a = IntMat::zero(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a[(i, j)] = next();
                }
            }
            check_smith(&a);
        }

        #[test]
        fn hnf_row_space_invariant(seed in any::<u64>()) {
            // HNF of a matrix and of a row-permuted copy agree
            let mut state = seed;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as i128 % 11) - 5
            };
            let rows: Vec<Vec<i128>> = (0..3).map(|_| (0..4).map(|_| next()).collect()).collect();
            let a = IntMat::from_rows(&rows);
            let mut perm = rows.clone();
            perm.rotate_left(1);
            let b = IntMat::from_rows(&perm);
            prop_assert_eq!(a.hnf_rows(), b.hnf_rows());
        }
    }
}
