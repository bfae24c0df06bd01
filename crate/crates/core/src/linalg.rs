//! Dense Householder QR and banded LU with partial pivoting.
//!
//! The local systems on each subinterval are small (n ≤ 30 or so) and dense;
//! the matching system is 4m×4m with nine nonzero diagonals.

use crate::error::{Error, Result};

const SINGULAR_FACTOR: f64 = 1e3;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    order: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(order: usize) -> Self {
        Self { order, data: vec![0.0; order * order] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                data.push(f(i, j));
            }
        }
        Self { order, data }
    }

    /// Builds a matrix from row-major data; `data.len()` must be a perfect square.
    pub fn from_row_major(order: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::DimensionMismatch { expected: order * order, got: data.len() });
        }
        Ok(Self { order, data })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.order);
        (0..self.order).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_row_norm(&self) -> f64 {
        (0..self.order).map(|i| self.row(i).iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.order + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.order + j]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Householder QR factorization of a square matrix.
///
/// Reflectors are stored below the diagonal of `qr` (with an implicit unit
/// leading entry) and R occupies the upper triangle.
#[derive(Debug, Clone)]
pub struct DenseFactor {
    order: usize,
    qr: Vec<f64>,
    betas: Vec<f64>,
    rdiag: Vec<f64>,
}

impl DenseFactor {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.order;
        assert_eq!(x.len(), n);
        // x <- Q^T x
        for k in 0..n {
            let beta = self.betas[k];
            if beta == 0.0 {
                continue;
            }
            let mut s = x[k];
            for i in k + 1..n {
                s += self.qr[i * n + k] * x[i];
            }
            s *= beta;
            x[k] -= s;
            for i in k + 1..n {
                x[i] -= s * self.qr[i * n + k];
            }
        }
        // back substitution with R
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..n {
                s -= self.qr[k * n + j] * x[j];
            }
            x[k] = s / self.rdiag[k];
        }
    }
}

/// Factors a square matrix as A = QR with Householder reflections.
///
/// Fails when a diagonal entry of R falls below `1e3·ε·max_row_norm(A)`.
pub fn qr_factor(a: &Matrix) -> Result<DenseFactor> {
    let n = a.order();
    if n == 0 {
        return Err(Error::InvalidDiscretization("empty matrix".into()));
    }
    let threshold = SINGULAR_FACTOR * f64::EPSILON * a.max_row_norm();
    let mut qr = a.data.clone();
    let mut betas = vec![0.0; n];
    let mut rdiag = vec![0.0; n];

    for k in 0..n {
        let norm = (k..n).map(|i| qr[i * n + k].powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::SingularDense { column: k });
        }
        let x0 = qr[k * n + k];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        let v0 = x0 - alpha;
        // normalize reflector so that v[k] = 1
        for i in k + 1..n {
            qr[i * n + k] /= v0;
        }
        let vnorm2 = 1.0 + (k + 1..n).map(|i| qr[i * n + k].powi(2)).sum::<f64>();
        let beta = 2.0 / vnorm2;
        betas[k] = beta;
        rdiag[k] = alpha;
        qr[k * n + k] = alpha;

        for j in k + 1..n {
            let mut s = qr[k * n + j];
            for i in k + 1..n {
                s += qr[i * n + k] * qr[i * n + j];
            }
            s *= beta;
            qr[k * n + j] -= s;
            for i in k + 1..n {
                qr[i * n + j] -= s * qr[i * n + k];
            }
        }
        if alpha.abs() < threshold {
            return Err(Error::SingularDense { column: k });
        }
    }

    Ok(DenseFactor { order: n, qr, betas, rdiag })
}

/// Truncated-SVD pseudo-inverse: singular values below
/// `rel_cutoff · σ_max` are treated as zero. Returns the pseudo-inverse and
/// the numerical rank.
pub fn pseudo_inverse(a: &Matrix, rel_cutoff: f64) -> Result<(Matrix, usize)> {
    let n = a.order();
    let m = nalgebra::DMatrix::from_row_slice(n, n, &a.data);
    let svd = nalgebra::linalg::SVD::try_new(m, true, true, f64::EPSILON, 0).ok_or_else(|| Error::InvalidDiscretization("singular value decomposition did not converge".into()))?;
    let smax = svd.singular_values.max();
    let cutoff = rel_cutoff * smax;
    let rank = svd.singular_values.iter().filter(|s| **s > cutoff).count();
    if rank == 0 {
        return Err(Error::SingularDense { column: 0 });
    }
    let pinv = svd.pseudo_inverse(cutoff).map_err(|e| Error::InvalidDiscretization(e.to_string()))?;
    Ok((Matrix::from_fn(n, |i, j| pinv[(i, j)]), rank))
}

/// Square matrix with `lower` subdiagonals and `upper` superdiagonals.
///
/// Row `i` stores columns `i - lower ..= i + upper`, so each storage column
/// is one diagonal of the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    order: usize,
    lower: usize,
    upper: usize,
    band: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(order: usize, lower: usize, upper: usize) -> Self {
        Self { order, lower, upper, band: vec![0.0; order * (lower + upper + 1)] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.lower
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.upper
    }

    pub fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.order || j >= self.order || j + self.lower < i || j > i + self.upper {
            return None;
        }
        Some(i * self.width() + (j + self.lower - i))
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        self.slot(i, j).is_some()
    }

    /// Entry (i, j); zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.band[s])
    }

    /// Sets entry (i, j). Panics if (i, j) lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band ({}, {})", self.lower, self.upper));
        self.band[s] = value;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.order);
        (0..self.order)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.order - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix::from_fn(self.order, |i, j| self.get(i, j))
    }

    /// Smallest (lower, upper) bandwidths covering the nonzero entries.
    pub fn occupied_bandwidths(&self) -> (usize, usize) {
        let mut lo = 0;
        let mut up = 0;
        for i in 0..self.order {
            for j in i.saturating_sub(self.lower)..=(i + self.upper).min(self.order - 1) {
                if self.get(i, j) != 0.0 {
                    if j < i {
                        lo = lo.max(i - j);
                    } else {
                        up = up.max(j - i);
                    }
                }
            }
        }
        (lo, up)
    }

    fn max_row_norm(&self) -> f64 {
        self.band
            .chunks(self.width())
            .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// LU factors of a banded matrix with row interchanges.
///
/// The upper factor has bandwidth `lower + upper` because pivoting can pull
/// rows up by at most `lower` positions.
#[derive(Debug, Clone)]
pub struct BandedLu {
    order: usize,
    lower: usize,
    width: usize,
    upper_rows: Vec<f64>,
    multipliers: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn factor(b: &BandedMatrix) -> Result<Self> {
        let n = b.order;
        let kl = b.lower;
        let mm = b.width();
        let threshold = SINGULAR_FACTOR * f64::EPSILON * b.max_row_norm();

        // a[i][c] holds A(i, i - kl + c); first kl rows are shifted left so
        // that a[i][0] is column 0.
        let mut a = b.band.clone();
        for i in 0..kl.min(n) {
            let shift = kl - i;
            let row = &mut a[i * mm..(i + 1) * mm];
            row.copy_within(shift.., 0);
            for v in &mut row[mm - shift..] {
                *v = 0.0;
            }
        }

        let mut multipliers = vec![0.0; n * kl.max(1)];
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut big = a[k * mm].abs();
            for i in k + 1..=last {
                if a[i * mm].abs() > big {
                    big = a[i * mm].abs();
                    p = i;
                }
            }
            pivots[k] = p;
            if big <= threshold {
                return Err(Error::SingularMatching { row: k });
            }
            if p != k {
                for c in 0..mm {
                    a.swap(k * mm + c, p * mm + c);
                }
            }
            let pivot = a[k * mm];
            for i in k + 1..=last {
                let factor = a[i * mm] / pivot;
                multipliers[k * kl + (i - k - 1)] = factor;
                for c in 1..mm {
                    a[i * mm + c - 1] = a[i * mm + c] - factor * a[k * mm + c];
                }
                a[i * mm + mm - 1] = 0.0;
            }
        }

        Ok(Self { order: n, lower: kl, width: mm, upper_rows: a, multipliers, pivots })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.order;
        let kl = self.lower;
        let mm = self.width;
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let last = (k + kl).min(n - 1);
            for i in k + 1..=last {
                x[i] -= self.multipliers[k * kl + (i - k - 1)] * x[k];
            }
        }
        for i in (0..n).rev() {
            let row = &self.upper_rows[i * mm..(i + 1) * mm];
            let mut s = x[i];
            for c in 1..mm {
                if i + c < n {
                    s -= row[c] * x[i + c];
                }
            }
            x[i] = s / row[0];
        }
        x
    }
}

/// Solves `B x = rhs` by banded LU with partial pivoting.
pub fn banded_factor_solve(b: &BandedMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != b.order() {
        return Err(Error::DimensionMismatch { expected: b.order(), got: rhs.len() });
    }
    Ok(BandedLu::factor(b)?.solve(rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn identity_solve() {
        let f = qr_factor(&Matrix::identity(5)).unwrap();
        let x = f.solve(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        for (i, v) in x.iter().enumerate() {
            assert!((v - (i + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_solve() {
        let mut a = Matrix::zeros(2);
        a[(0, 0)] = 2.0;
        a[(1, 1)] = 4.0;
        let x = qr_factor(&a).unwrap().solve(&[2.0, 4.0]);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_well_conditioned_recovers_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = Matrix::from_fn(8, |i, j| if i == j { 4.0 } else { 0.0 } + rng.gen_range(-1.0..1.0));
        let x_star: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = a.mul_vec(&x_star);
        let x = qr_factor(&a).unwrap().solve(&b);
        let err: Vec<f64> = x.iter().zip(&x_star).map(|(u, v)| u - v).collect();
        assert!(norm(&err) / norm(&x_star) <= 1e-13);
    }

    #[test]
    fn pseudo_inverse_of_rank_deficient_matrix() {
        // rank 2: third row is the sum of the first two
        let a = Matrix::from_row_major(3, vec![1.0, 2.0, 0.0, 0.0, 1.0, 1.0, 1.0, 3.0, 1.0]).unwrap();
        let (p, rank) = pseudo_inverse(&a, 1e-12).unwrap();
        assert_eq!(rank, 2);
        // A P A = A
        for c in 0..3 {
            let col: Vec<f64> = (0..3).map(|i| a[(i, c)]).collect();
            let back = a.mul_vec(&p.mul_vec(&col));
            for i in 0..3 {
                assert!((back[i] - col[i]).abs() < 1e-13);
            }
        }
        let b = [1.0, 2.0, 3.0];
        let (q, full) = pseudo_inverse(&Matrix::identity(3), 1e-12).unwrap();
        assert_eq!((full, q.mul_vec(&b)), (3, b.to_vec()));
    }

    #[test]
    fn singular_dense_reported() {
        let a = Matrix::from_fn(3, |i, j| (i + j) as f64);
        assert!(matches!(qr_factor(&a), Err(Error::SingularDense { .. })));
    }

    #[test]
    fn backward_residual_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3, 10, 25] {
            let a = Matrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = qr_factor(&a).unwrap().solve(&b);
            let r: Vec<f64> = a.mul_vec(&x).iter().zip(&b).map(|(u, v)| u - v).collect();
            let rel = norm(&r) / (a.frobenius_norm() * norm(&x) + norm(&b));
            assert!(rel <= 100.0 * f64::EPSILON, "n = {n}: {rel}");
        }
    }

    #[test]
    fn banded_identity() {
        let mut b = BandedMatrix::zeros(6, 2, 1);
        for i in 0..6 {
            b.set(i, i, 1.0);
        }
        let mut e1 = vec![0.0; 6];
        e1[0] = 1.0;
        assert_eq!(banded_factor_solve(&b, &e1).unwrap(), e1);
    }

    #[test]
    fn tridiagonal_by_hand() {
        let mut b = BandedMatrix::zeros(4, 1, 1);
        for i in 0..4 {
            b.set(i, i, 2.0);
            if i > 0 {
                b.set(i, i - 1, -1.0);
            }
            if i < 3 {
                b.set(i, i + 1, -1.0);
            }
        }
        let x = banded_factor_solve(&b, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        for (v, e) in x.iter().zip([0.8, 0.6, 0.4, 0.2]) {
            assert!((v - e).abs() < 1e-15);
        }
    }

    fn random_band(rng: &mut ChaCha8Rng, n: usize, kl: usize, ku: usize) -> BandedMatrix {
        let mut b = BandedMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                b.set(i, j, rng.gen_range(-1.0..1.0) + if i == j { 3.0 } else { 0.0 });
            }
        }
        b
    }

    #[test]
    fn nine_diagonal_matches_dense_qr() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = random_band(&mut rng, 40, 5, 3);
        let rhs: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let xb = banded_factor_solve(&b, &rhs).unwrap();
        let xd = qr_factor(&b.to_dense()).unwrap().solve(&rhs);
        let diff: Vec<f64> = xb.iter().zip(&xd).map(|(u, v)| u - v).collect();
        assert!(norm(&diff) / norm(&xd) <= 1e-12);
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // permuted identity: needs row interchanges
        let mut b = BandedMatrix::zeros(4, 1, 1);
        b.set(0, 1, 1.0);
        b.set(1, 0, 1.0);
        b.set(2, 3, 1.0);
        b.set(3, 2, 1.0);
        let x = banded_factor_solve(&b, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(x, vec![2.0, 1.0, 4.0, 3.0]);
    }

    #[test]
    fn singular_band_reported() {
        let mut b = BandedMatrix::zeros(3, 1, 1);
        b.set(0, 0, 1.0);
        b.set(1, 1, 1.0);
        assert!(matches!(banded_factor_solve(&b, &[1.0, 1.0, 1.0]), Err(Error::SingularMatching { .. })));
    }

    #[test]
    #[should_panic]
    fn set_outside_band_panics() {
        let mut b = BandedMatrix::zeros(5, 1, 1);
        b.set(0, 3, 1.0);
    }

    proptest::proptest! {
        #[test]
        fn banded_agrees_with_dense(seed in 0u64..1000, n in 5usize..200, kl in 0usize..6, ku in 0usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = random_band(&mut rng, n, kl, ku);
            let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let xb = banded_factor_solve(&b, &rhs).unwrap();
            let xd = qr_factor(&b.to_dense()).unwrap().solve(&rhs);
            let diff: Vec<f64> = xb.iter().zip(&xd).map(|(u, v)| u - v).collect();
            proptest::prop_assert!(norm(&diff) / norm(&xd) <= 1e-11);
        }
    }
}
