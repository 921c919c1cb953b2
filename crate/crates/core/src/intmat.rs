//! Dense matrices over arbitrary-precision integers, plus the two integer
//! normal forms everything else is built on: Smith normal form with full
//! transform tracking, and a column-style Hermite form used for canonical
//! coset reduction.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Row-major dense integer matrix. Row and column counts may be zero;
/// degenerate shapes show up constantly (trivial groups, empty torsion).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        for r in &rows {
            if r.len() != ncols {
                return Err(Error::Dimension("ragged matrix rows".into()));
            }
        }
        Ok(IntMat { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor for literals in tests and callers that know
    /// their shape: `rows` of equal length, entries as machine integers.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().map(|&v| int(v))).collect();
        IntMat {
            rows: rows.len(),
            cols: rows.first().map_or(0, |r| r.len()),
            data,
        }
    }

    /// Same as `from_i64` but for matrices with zero rows where the column
    /// count cannot be inferred.
    pub fn from_i64_shaped(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        IntMat { rows, cols, data: entries.iter().map(|&v| int(v)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.rows, other.rows, "hstack row counts");
        let mut out = IntMat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Keep only the listed columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> IntMat {
        let mut out = IntMat::zeros(self.rows, cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    /// Top-left `r x c` submatrix.
    pub fn submatrix(&self, r: usize, c: usize) -> IntMat {
        assert!(r <= self.rows && c <= self.cols);
        let mut out = IntMat::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
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

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &Int) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + c * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &Int) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + c * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn neg_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    fn neg_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
                a.set(i, k, Int::zero());
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1).clone()
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Smith decomposition `d = u * m * v` with `u`, `v` unimodular, `d` diagonal
/// with a divisibility chain. Inverse transforms are tracked alongside so
/// callers can change basis in both directions without re-inverting.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMat,
    pub u_inv: IntMat,
    pub v: IntMat,
    pub v_inv: IntMat,
    pub d: IntMat,
    pub rank: usize,
}

impl Smith {
    pub fn diag(&self, k: usize) -> &Int {
        self.d.get(k, k)
    }

    /// Invariant factors (the non-unit, non-zero diagonal entries).
    pub fn torsion_factors(&self) -> Vec<Int> {
        (0..self.rank)
            .map(|k| self.diag(k).clone())
            .filter(|d| !d.is_one())
            .collect()
    }
}

struct SnfWork {
    a: IntMat,
    u: IntMat,
    u_inv: IntMat,
    v: IntMat,
    v_inv: IntMat,
}

impl SnfWork {
    fn swap_rows(&mut self, x: usize, y: usize) {
        self.a.swap_rows(x, y);
        self.u.swap_rows(x, y);
        self.u_inv.swap_cols(x, y);
    }

    fn swap_cols(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        self.v.swap_cols(x, y);
        self.v_inv.swap_rows(x, y);
    }

    fn add_row(&mut self, dst: usize, src: usize, c: &Int) {
        self.a.add_row(dst, src, c);
        self.u.add_row(dst, src, c);
        let neg = -c;
        self.u_inv.add_col(src, dst, &neg);
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &Int) {
        self.a.add_col(dst, src, c);
        self.v.add_col(dst, src, c);
        let neg = -c;
        self.v_inv.add_row(src, dst, &neg);
    }

    fn neg_row(&mut self, i: usize) {
        self.a.neg_row(i);
        self.u.neg_row(i);
        self.u_inv.neg_col(i);
    }

    /// Position of a minimal-absolute-value nonzero entry of the trailing
    /// submatrix starting at (k, k).
    fn min_nonzero(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in k..self.a.rows() {
            for j in k..self.a.cols() {
                let e = self.a.get(i, j);
                if e.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a.get(bi, bj).abs() <= e.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn find_nondivisible(&self, k: usize) -> Option<(usize, usize)> {
        let p = self.a.get(k, k);
        for i in k + 1..self.a.rows() {
            for j in k + 1..self.a.cols() {
                if !self.a.get(i, j).mod_floor(p).is_zero() {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Smith normal form. Returns `(u, d, v)` packed in a [`Smith`] with
/// `d = u * m * v`, `u` and `v` unimodular, diagonal entries non-negative
/// and dividing their successors.
pub fn smith_normal_form(m: &IntMat) -> Smith {
    let nr = m.rows();
    let nc = m.cols();
    let mut w = SnfWork {
        a: m.clone(),
        u: IntMat::identity(nr),
        u_inv: IntMat::identity(nr),
        v: IntMat::identity(nc),
        v_inv: IntMat::identity(nc),
    };
    let kmax = nr.min(nc);
    let mut rank = 0;
    for k in 0..kmax {
        if w.min_nonzero(k).is_none() {
            break;
        }
        loop {
            let (pi, pj) = w.min_nonzero(k).expect("nonzero pivot");
            w.swap_rows(k, pi);
            w.swap_cols(k, pj);
            let mut again = false;
            for i in k + 1..nr {
                if !w.a.get(i, k).is_zero() {
                    let q = w.a.get(i, k) / w.a.get(k, k);
                    if !q.is_zero() {
                        w.add_row(i, k, &(-q));
                    }
                    if !w.a.get(i, k).is_zero() {
                        again = true;
                    }
                }
            }
            if again {
                continue;
            }
            for j in k + 1..nc {
                if !w.a.get(k, j).is_zero() {
                    let q = w.a.get(k, j) / w.a.get(k, k);
                    if !q.is_zero() {
                        w.add_col(j, k, &(-q));
                    }
                    if !w.a.get(k, j).is_zero() {
                        again = true;
                    }
                }
            }
            if again {
                continue;
            }
            // Row and column are clean; force the divisibility chain by
            // folding any offending entry into row k and restarting.
            if let Some((i, _)) = w.find_nondivisible(k) {
                w.add_row(k, i, &Int::one());
                continue;
            }
            break;
        }
        if w.a.get(k, k).is_negative() {
            w.neg_row(k);
        }
        rank += 1;
    }
    Smith { u: w.u, u_inv: w.u_inv, v: w.v, v_inv: w.v_inv, d: w.a, rank }
}

/// Basis of the integer kernel lattice `{ x : m x = 0 }`, one column per
/// basis vector. The basis is primitive (direct summand) because it comes
/// from unimodular column transforms.
pub fn kernel_basis(m: &IntMat) -> IntMat {
    let s = smith_normal_form(m);
    let cols: Vec<usize> = (s.rank..m.cols()).collect();
    s.v.select_cols(&cols)
}

/// Some integer solution of `m x = t`, if one exists.
pub fn solve(s: &Smith, t: &[Int]) -> Option<Vec<Int>> {
    let nr = s.d.rows();
    let nc = s.d.cols();
    assert_eq!(t.len(), nr);
    let w = s.u.mul_vec(t);
    let mut y = vec![Int::zero(); nc];
    for i in 0..nr {
        if i < s.rank {
            let d = s.diag(i);
            let (q, r) = w[i].div_rem(d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !w[i].is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// Column-style Hermite form: columns of `h` are an echelon basis of the
/// column lattice of the input. Pivot `(row, col)` entries are positive,
/// pivot columns vanish above their pivot row, and entries to the *left*
/// of each pivot are reduced into `[0, pivot)`.
#[derive(Clone, Debug)]
pub struct ColHnf {
    pub h: IntMat,
    /// (pivot row, column of `h`) in increasing row order.
    pub pivots: Vec<(usize, usize)>,
}

impl ColHnf {
    /// Canonically reduce `v` modulo the column lattice: after reduction the
    /// coordinate at each pivot row lies in `[0, pivot)`. Two vectors reduce
    /// to the same result iff they differ by a lattice element.
    pub fn reduce_vec(&self, v: &[Int]) -> Vec<Int> {
        let mut out = v.to_vec();
        for &(r, c) in &self.pivots {
            let q = out[r].div_floor(self.h.get(r, c));
            if q.is_zero() {
                continue;
            }
            for i in r..out.len() {
                let d = &out[i] - &q * self.h.get(i, c);
                out[i] = d;
            }
        }
        out
    }

    /// Rows without a pivot: free directions of the quotient by the lattice.
    pub fn free_rows(&self, nrows: usize) -> Vec<usize> {
        let pivot_rows: Vec<usize> = self.pivots.iter().map(|&(r, _)| r).collect();
        (0..nrows).filter(|r| !pivot_rows.contains(r)).collect()
    }
}

pub fn col_hnf(m: &IntMat) -> ColHnf {
    let mut a = m.clone();
    let nr = a.rows();
    let nc = a.cols();
    let mut cur = 0;
    let mut pivots = Vec::new();
    for r in 0..nr {
        if cur == nc {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for j in cur..nc {
                if a.get(r, j).is_zero() {
                    continue;
                }
                match best {
                    Some(b) if a.get(r, b).abs() <= a.get(r, j).abs() => {}
                    _ => best = Some(j),
                }
            }
            let Some(b) = best else { break };
            a.swap_cols(cur, b);
            let mut again = false;
            for j in cur + 1..nc {
                if !a.get(r, j).is_zero() {
                    let q = a.get(r, j) / a.get(r, cur);
                    if !q.is_zero() {
                        a.add_col(j, cur, &(-q));
                    }
                    if !a.get(r, j).is_zero() {
                        again = true;
                    }
                }
            }
            if !again {
                break;
            }
        }
        if a.get(r, cur).is_zero() {
            continue;
        }
        if a.get(r, cur).is_negative() {
            a.neg_col(cur);
        }
        // Normalize entries left of the pivot into [0, pivot).
        for j in 0..cur {
            let q = a.get(r, j).div_floor(a.get(r, cur));
            if !q.is_zero() {
                a.add_col(j, cur, &(-q));
            }
        }
        pivots.push((r, cur));
        cur += 1;
    }
    ColHnf { h: a.submatrix(nr, cur), pivots }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_unimodular(m: &IntMat) {
        let d = m.det();
        assert!(d == Int::one() || d == -Int::one(), "det = {d}");
    }

    fn check_smith(m: &IntMat) -> Smith {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d, "d = u m v");
        assert_unimodular(&s.u);
        assert_unimodular(&s.v);
        assert_eq!(s.u.mul(&s.u_inv), IntMat::identity(m.rows()));
        assert_eq!(s.v.mul(&s.v_inv), IntMat::identity(m.cols()));
        for k in 0..s.rank.saturating_sub(1) {
            assert!(s.diag(k + 1).mod_floor(s.diag(k)).is_zero(), "divisibility chain");
        }
        for k in s.rank..m.rows().min(m.cols()) {
            assert!(s.diag(k).is_zero());
        }
        s
    }

    #[test]
    fn smith_of_gcd_row() {
        // One relation 4x + 6y: the lattice has index structure gcd(4,6) = 2.
        let m = IntMat::from_i64(&[&[4, 6]]);
        let s = check_smith(&m);
        assert_eq!(s.rank, 1);
        assert_eq!(s.diag(0), &int(2));
    }

    #[test]
    fn smith_mixes_coprime_diagonal() {
        let m = IntMat::from_i64(&[&[2, 0], &[0, 3]]);
        let s = check_smith(&m);
        assert_eq!(s.rank, 2);
        assert_eq!(s.diag(0), &int(1));
        assert_eq!(s.diag(1), &int(6));
    }

    #[test]
    fn smith_identity_fixed() {
        let m = IntMat::identity(3);
        let s = check_smith(&m);
        assert_eq!(s.rank, 3);
        assert_eq!(s.d, IntMat::identity(3));
    }

    #[test]
    fn smith_zero_and_empty() {
        let s = check_smith(&IntMat::zeros(2, 3));
        assert_eq!(s.rank, 0);
        let s = check_smith(&IntMat::zeros(0, 4));
        assert_eq!(s.rank, 0);
        let s = check_smith(&IntMat::zeros(3, 0));
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn smith_rectangular() {
        let m = IntMat::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let s = check_smith(&m);
        assert_eq!(s.rank, 3);
        // invariant factors of this classic example: 2, 2, 156
        assert_eq!(s.diag(0), &int(2));
        assert_eq!(s.diag(1), &int(2));
        assert_eq!(s.diag(2), &int(156));
    }

    #[test]
    fn kernel_of_projection() {
        // x + 2y = 0 has kernel spanned by (2, -1) up to sign.
        let m = IntMat::from_i64(&[&[1, 2]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).is_zero());
        assert_eq!(k.get(0, 0).abs(), int(2));
        assert_eq!(k.get(1, 0).abs(), int(1));
    }

    #[test]
    fn solve_hits_target_or_reports_none() {
        let m = IntMat::from_i64(&[&[2], &[3]]);
        let s = smith_normal_form(&m);
        let x = solve(&s, &[int(4), int(6)]).expect("solvable");
        assert_eq!(m.mul_vec(&x), vec![int(4), int(6)]);
        assert!(solve(&s, &[int(4), int(5)]).is_none());
    }

    #[test]
    fn hnf_reduction_is_canonical() {
        // Lattice 3Z in Z: representatives land in [0, 3).
        let h = col_hnf(&IntMat::from_i64(&[&[3]]));
        assert_eq!(h.reduce_vec(&[int(7)]), vec![int(1)]);
        assert_eq!(h.reduce_vec(&[int(-2)]), vec![int(1)]);
        assert_eq!(h.reduce_vec(&[int(0)]), vec![int(0)]);
    }

    #[test]
    fn hnf_line_in_plane() {
        // Lattice spanned by (1, 0): second coordinate is free.
        let h = col_hnf(&IntMat::from_i64(&[&[1], &[0]]));
        assert_eq!(h.pivots, vec![(0, 0)]);
        assert_eq!(h.reduce_vec(&[int(5), int(2)]), vec![int(0), int(2)]);
        assert_eq!(h.free_rows(2), vec![1]);
    }

    #[test]
    fn hnf_respects_cosets() {
        let m = IntMat::from_i64(&[&[2, 1], &[0, 3]]);
        let h = col_hnf(&m);
        // v and v + m*c reduce identically
        let v = vec![int(11), int(-4)];
        let shifted: Vec<Int> = {
            let mc = m.mul_vec(&[int(3), int(-2)]);
            v.iter().zip(&mc).map(|(a, b)| a + b).collect()
        };
        assert_eq!(h.reduce_vec(&v), h.reduce_vec(&shifted));
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(IntMat::identity(0).det(), int(1));
        assert_eq!(IntMat::from_i64(&[&[5]]).det(), int(5));
        assert_eq!(IntMat::from_i64(&[&[1, 2], &[3, 4]]).det(), int(-2));
        assert_eq!(
            IntMat::from_i64(&[&[2, 0, 1], &[1, 1, 0], &[0, 3, 1]]).det(),
            int(5)
        );
    }
}
