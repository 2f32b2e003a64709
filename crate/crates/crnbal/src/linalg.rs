//! Exact rational matrix kernel: determinants, rank, nullspaces, subspace
//! membership.
//!
//! Every balance verdict reduces to questions about the integer matrices
//! `Z`, `D`, `S` and the rational Laplacian `L`. Those questions are decided
//! here with arbitrary-precision rationals so the answers are exact yes/no
//! claims, never tolerance comparisons. Dense storage throughout; the
//! networks of interest have a few dozen complexes at most.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{to_f64, Rational};

/// Dense matrix of arbitrary-precision rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Outcome of an exact column-space membership test.
///
/// A rejection carries a separating vector `w` with `w^T M = 0` and
/// `w^T v != 0`, so both answers are independently checkable.
#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    Member { coefficients: Vec<Rational> },
    NotMember { witness: Vec<Rational> },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        RationalMatrix { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from(BigInt::from(x))).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = a * &other[(k, j)];
                    out[(i, j)] += term;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// Right-multiplies by diag(d), scaling column j by d[j].
    pub fn mul_diag(&self, d: &[Rational]) -> Self {
        assert_eq!(self.cols, d.len(), "dimension mismatch in mul_diag");
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] *= &d[j];
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Square submatrix on the given row and column index sets.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        let mut out = Self::zeros(row_idx.len(), col_idx.len());
        for (i, &r) in row_idx.iter().enumerate() {
            for (j, &c) in col_idx.iter().enumerate() {
                out[(i, j)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(to_f64).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Denominators are cleared row-wise first, so the elimination itself runs
/// over integers with exact divisions only.
pub fn determinant(m: &RationalMatrix) -> Rational {
    assert_eq!(m.rows(), m.cols(), "determinant of non-square matrix");
    let n = m.rows();
    if n == 0 {
        return Rational::one();
    }

    // Clear denominators: row i scaled by the lcm of its denominators.
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let lcm = m.row(i).iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        a.push(
            m.row(i)
                .iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect(),
        );
        scale *= lcm;
    }

    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Rational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = &t / &prev; // exact by the Bareiss identity
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det_int = if sign < 0 { -a[n - 1][n - 1].clone() } else { a[n - 1][n - 1].clone() };
    Rational::new(det_int, scale)
}

/// Reduced row echelon form together with the row-operation record `E`
/// (so `E * M = R`) and the pivot columns.
fn rref_tracked(m: &RationalMatrix) -> (RationalMatrix, RationalMatrix, Vec<usize>) {
    let mut r = m.clone();
    let mut e = RationalMatrix::identity(m.rows());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols() {
        if row == m.rows() {
            break;
        }
        let Some(p) = (row..m.rows()).find(|&i| !r[(i, col)].is_zero()) else {
            continue;
        };
        if p != row {
            for j in 0..r.cols() {
                let t = r[(p, j)].clone();
                r[(p, j)] = r[(row, j)].clone();
                r[(row, j)] = t;
            }
            for j in 0..e.cols() {
                let t = e[(p, j)].clone();
                e[(p, j)] = e[(row, j)].clone();
                e[(row, j)] = t;
            }
        }
        let inv = r[(row, col)].recip();
        for j in 0..r.cols() {
            r[(row, j)] *= &inv;
        }
        for j in 0..e.cols() {
            e[(row, j)] *= &inv;
        }
        for i in 0..m.rows() {
            if i == row || r[(i, col)].is_zero() {
                continue;
            }
            let f = r[(i, col)].clone();
            for j in 0..r.cols() {
                let t = &f * &r[(row, j)];
                r[(i, j)] -= t;
            }
            for j in 0..e.cols() {
                let t = &f * &e[(row, j)];
                e[(i, j)] -= t;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (r, e, pivots)
}

/// Exact rank.
pub fn rank(m: &RationalMatrix) -> usize {
    rref_tracked(m).2.len()
}

/// Scales a rational vector to integers with coprime entries and a positive
/// leading nonzero entry. Returns `None` for the zero vector.
pub fn integer_normalize(v: &[Rational]) -> Option<Vec<BigInt>> {
    if v.iter().all(Zero::is_zero) {
        return None;
    }
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = ints
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !gcd.is_zero() && !gcd.is_one() {
        for x in &mut ints {
            *x /= &gcd;
        }
    }
    if ints.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
        for x in &mut ints {
            *x = -x.clone();
        }
    }
    Some(ints)
}

/// Integer basis of the rational nullspace of `m`: each basis vector has
/// coprime entries and positive leading sign.
pub fn nullspace_integer_basis(m: &RationalMatrix) -> Vec<Vec<BigInt>> {
    let (r, _, pivots) = rref_tracked(m);
    let mut basis = Vec::new();
    let pivot_rows: Vec<(usize, usize)> = pivots.iter().copied().enumerate().collect();
    for free in (0..m.cols()).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); m.cols()];
        v[free] = Rational::one();
        for &(row, pcol) in &pivot_rows {
            v[pcol] = -r[(row, free)].clone();
        }
        basis.push(integer_normalize(&v).expect("free-column vector is nonzero"));
    }
    basis
}

/// Decides `v ∈ col(M)` exactly. Membership comes with coefficients `x`
/// solving `M x = v`; rejection comes with a separating vector.
pub fn in_column_space(m: &RationalMatrix, v: &[Rational]) -> Membership {
    assert_eq!(m.rows(), v.len(), "dimension mismatch in in_column_space");
    let (r, e, pivots) = rref_tracked(m);
    let c = e.mul_vec(v);
    for i in 0..m.rows() {
        if c[i].is_zero() || r.row(i).iter().any(|x| !x.is_zero()) {
            continue;
        }
        return Membership::NotMember { witness: e.row(i).to_vec() };
    }
    let mut x = vec![Rational::zero(); m.cols()];
    for (row, &pcol) in pivots.iter().enumerate() {
        x[pcol] = c[row].clone();
    }
    Membership::Member { coefficients: x }
}

/// Float-mode membership: least-squares residual of `M x = v` against a
/// relative tolerance. Returns the verdict and the residual infinity norm.
pub fn in_column_space_f64(m: &RationalMatrix, v: &[f64], tol: f64) -> (bool, f64) {
    let a = nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| to_f64(&m[(i, j)]));
    let b = nalgebra::DVector::from_column_slice(v);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-12).expect("svd solve");
    let residual = (&a * &x - &b).amax();
    let scale = 1.0 + b.amax();
    (residual <= tol * scale, residual)
}

/// Integer basis of `ker A ∩ im B`.
///
/// Vectors of the intersection are exactly `B τ` with `A B τ = 0`, so the
/// kernel of `A B` is pushed through `B` and the images reduced to an
/// independent, integer-normalized set.
pub fn intersection_basis(a: &RationalMatrix, b: &RationalMatrix) -> Vec<Vec<BigInt>> {
    assert_eq!(a.cols(), b.rows(), "dimension mismatch in intersection_basis");
    let ab = a.matmul(b);
    let taus = nullspace_integer_basis(&ab);
    if taus.is_empty() {
        return Vec::new();
    }
    let images: Vec<Vec<Rational>> = taus
        .iter()
        .map(|tau| {
            let tau: Vec<Rational> = tau.iter().cloned().map(Rational::from).collect();
            b.mul_vec(&tau)
        })
        .collect();
    independent_integer_span(&images)
}

/// Integer basis of the column space of `m`.
pub fn column_space_integer_basis(m: &RationalMatrix) -> Vec<Vec<BigInt>> {
    let cols: Vec<Vec<Rational>> = (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m[(i, j)].clone()).collect())
        .collect();
    independent_integer_span(&cols)
}

/// Reduces a spanning set to an integer-normalized basis of its span
/// (the nonzero rows of the RREF of the stacked vectors).
fn independent_integer_span(vectors: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let stacked = RationalMatrix::from_rows(vectors.to_vec());
    let (r, _, pivots) = rref_tracked(&stacked);
    (0..pivots.len())
        .filter_map(|i| integer_normalize(r.row(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rational_int;
    use proptest::prelude::*;

    fn rm(rows: &[Vec<i64>]) -> RationalMatrix {
        RationalMatrix::from_i64_rows(rows)
    }

    /// Independent determinant oracle: cofactor expansion along the first row.
    fn det_cofactor(m: &RationalMatrix) -> Rational {
        let n = m.rows();
        if n == 0 {
            return Rational::one();
        }
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut acc = Rational::zero();
        for j in 0..n {
            if m[(0, j)].is_zero() {
                continue;
            }
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = det_cofactor(&m.submatrix(&rows, &cols));
            let term = &m[(0, j)] * &minor;
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn determinant_identity_and_singular() {
        assert_eq!(determinant(&RationalMatrix::identity(3)), rational_int(1));
        assert_eq!(determinant(&rm(&[vec![2, -3], vec![-2, 3]])), rational_int(0));
    }

    #[test]
    fn determinant_with_fractions() {
        let half = rational_int(1) / rational_int(2);
        let third = rational_int(1) / rational_int(3);
        let m = RationalMatrix::from_rows(vec![
            vec![half.clone(), rational_int(2)],
            vec![third.clone(), rational_int(1)],
        ]);
        assert_eq!(determinant(&m), half - rational_int(2) * third);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&rm(&[vec![-1, 2, -1], vec![0, 0, 0]])), 1);
        assert_eq!(rank(&RationalMatrix::identity(4)), 4);
        assert_eq!(rank(&RationalMatrix::zeros(3, 2)), 0);
    }

    #[test]
    fn nullspace_of_identity_is_empty() {
        assert!(nullspace_integer_basis(&RationalMatrix::identity(3)).is_empty());
    }

    #[test]
    fn nullspace_dimension_matches_rank_defect() {
        let s = rm(&[vec![-1, 2, -1], vec![0, 0, 0]]);
        let basis = nullspace_integer_basis(&s);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let v: Vec<Rational> = v.iter().cloned().map(Rational::from).collect();
            assert!(s.mul_vec(&v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn membership_trivial_cases() {
        let m = rm(&[vec![1, 0], vec![0, 1], vec![1, 1]]);
        let zero = vec![Rational::zero(); 3];
        assert!(matches!(
            in_column_space(&m, &zero),
            Membership::Member { coefficients } if coefficients.iter().all(Zero::is_zero)
        ));
        let first_col = vec![rational_int(1), rational_int(0), rational_int(1)];
        match in_column_space(&m, &first_col) {
            Membership::Member { coefficients } => {
                assert_eq!(coefficients, vec![rational_int(1), rational_int(0)]);
            }
            _ => panic!("expected membership"),
        }
    }

    #[test]
    fn membership_rejection_carries_separating_witness() {
        let m = rm(&[vec![1], vec![0]]);
        let v = vec![rational_int(0), rational_int(1)];
        match in_column_space(&m, &v) {
            Membership::NotMember { witness } => {
                let wt_m: Rational = (0..2).map(|i| &witness[i] * &m[(i, 0)]).sum();
                let wt_v: Rational = (0..2).map(|i| &witness[i] * &v[i]).sum();
                assert!(wt_m.is_zero());
                assert!(!wt_v.is_zero());
            }
            _ => panic!("expected rejection"),
        }
    }

    #[test]
    fn float_membership_reports_residuals() {
        let m = rm(&[vec![1, 0], vec![0, 1], vec![1, 1]]);
        let (ok, residual) = in_column_space_f64(&m, &[1.0, 2.0, 3.0], 1e-9);
        assert!(ok && residual <= 1e-12);
        let (ok, residual) = in_column_space_f64(&m, &[1.0, 2.0, 3.5], 1e-9);
        assert!(!ok);
        assert!(residual > 0.1);
    }

    #[test]
    fn intersection_basis_degenerate_cases() {
        // ker Z = 0 for identity Z: empty intersection.
        let z = RationalMatrix::identity(2);
        let d = rm(&[vec![-1], vec![1]]);
        assert!(intersection_basis(&z, &d).is_empty());

        // A = 0: the intersection is all of im B.
        let a = RationalMatrix::zeros(2, 2);
        let b = rm(&[vec![1, 2], vec![0, 0]]);
        let basis = intersection_basis(&a, &b);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0], vec![BigInt::from(1), BigInt::from(0)]);
    }

    #[test]
    fn intersection_vectors_live_in_both_spaces() {
        let z = rm(&[vec![1, 0, 2], vec![1, 1, 1]]);
        let d = rm(&[vec![-1, 0, 1], vec![1, -1, 0], vec![0, 1, -1]]);
        let basis = intersection_basis(&z, &d);
        assert_eq!(basis.len(), 1);
        for sigma in &basis {
            let v: Vec<Rational> = sigma.iter().cloned().map(Rational::from).collect();
            assert!(z.mul_vec(&v).iter().all(Zero::is_zero));
            assert!(in_column_space(&d, &v).is_member());
        }
    }

    proptest! {
        // Fraction-free elimination against the cofactor-expansion oracle.
        #[test]
        fn determinant_matches_cofactor_oracle(
            entries in proptest::collection::vec((-6i64..=6, 1i64..=4), 1..=25)
        ) {
            let n = (entries.len() as f64).sqrt().floor() as usize;
            prop_assume!(n >= 1);
            let m = RationalMatrix::from_rows(
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let (p, q) = entries[i * n + j];
                                rational_int(p) / rational_int(q)
                            })
                            .collect()
                    })
                    .collect(),
            );
            prop_assert_eq!(determinant(&m), det_cofactor(&m));
        }

        #[test]
        fn nullspace_vectors_annihilate(
            rows in proptest::collection::vec(
                proptest::collection::vec(-4i64..=4, 4), 2..=4
            )
        ) {
            let m = rm(&rows);
            for v in nullspace_integer_basis(&m) {
                let v: Vec<Rational> = v.iter().cloned().map(Rational::from).collect();
                prop_assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn membership_answers_are_certified(
            rows in proptest::collection::vec(
                proptest::collection::vec(-4i64..=4, 3), 3
            ),
            v in proptest::collection::vec(-4i64..=4, 3)
        ) {
            let m = rm(&rows);
            let v: Vec<Rational> = v.into_iter().map(rational_int).collect();
            match in_column_space(&m, &v) {
                Membership::Member { coefficients } => {
                    prop_assert_eq!(m.mul_vec(&coefficients), v);
                }
                Membership::NotMember { witness } => {
                    for j in 0..m.cols() {
                        let dot: Rational =
                            (0..m.rows()).map(|i| &witness[i] * &m[(i, j)]).sum();
                        prop_assert!(dot.is_zero());
                    }
                    let dot: Rational = (0..m.rows()).map(|i| &witness[i] * &v[i]).sum();
                    prop_assert!(!dot.is_zero());
                }
            }
        }
    }
}
