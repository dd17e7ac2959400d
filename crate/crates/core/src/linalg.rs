//! Exact linear algebra over ℚ: fraction-free Bareiss elimination,
//! reduced row echelon forms and null spaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type RationalMatrix = Vec<Vec<BigRational>>;

/// Reduces `rows` in place to reduced row echelon form (monic pivots) and
/// returns the pivot columns. Zero rows are dropped.
pub fn rref(rows: &mut RationalMatrix) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut().skip(c) {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Scales a rational row by the lcm of its denominators, giving an integer row
/// with the same null space.
pub fn clear_denominators(row: &[BigRational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
}

/// Fraction-free Gaussian elimination to row echelon form.
///
/// Returns the nonzero echelon rows and the pivot column of each. Every
/// division performed is exact (it divides by the previous pivot).
pub fn bareiss_echelon(mut rows: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = &pivot_row[c];
        for row in tail.iter_mut() {
            let lead = row[c].clone();
            for k in c + 1..ncols {
                let num = pivot * &row[k] - &lead * &pivot_row[k];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                row[k] = num / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = head[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Null space basis of the matrix with `ncols` columns, via Bareiss
/// elimination followed by back-substitution. The returned vectors are the
/// standard free-variable basis (one vector per non-pivot column).
pub fn nullspace(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|q| !q.is_zero()))
        .map(|r| clear_denominators(r))
        .collect();
    let (echelon, pivots) = bareiss_echelon(int_rows);
    // back-substitute to reduced form over ℚ
    let mut red: RationalMatrix = echelon
        .iter()
        .map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect())
        .collect();
    for i in (0..red.len()).rev() {
        let c = pivots[i];
        let inv = red[i][c].recip();
        for v in red[i].iter_mut().skip(c) {
            *v *= &inv;
        }
        let row_i = red[i].clone();
        for row in red.iter_mut().take(i) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&row_i).skip(c) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
    }
    let is_pivot = {
        let mut m = vec![false; ncols];
        for &c in &pivots {
            m[c] = true;
        }
        m
    };
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -red[i][f].clone();
            }
            v
        })
        .collect()
}

/// Determinant of a square rational matrix.
pub fn determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return BigRational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let pivot_row = a[c].clone();
        for row in a.iter_mut().skip(c + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot_row[c];
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                *v -= &f * pv;
            }
        }
    }
    det
}

/// Solves the square system `m·x = rhs`; `None` when singular.
pub fn solve(m: &[Vec<BigRational>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut aug: RationalMatrix = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| row.iter().cloned().chain(std::iter::once(b.clone())).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64) -> BigRational {
        BigRational::from_integer(a.into())
    }

    fn mat(rows: &[&[i64]]) -> RationalMatrix {
        rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
    }

    fn mul_vec(m: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
        m.iter()
            .map(|row| row.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    #[test]
    fn nullspace_of_rank_deficient_matrix() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 1);
        assert!(mul_vec(&m, &ns[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn determinant_and_solve() {
        let m = mat(&[&[2, 1], &[1, 3]]);
        assert_eq!(determinant(&m), q(5));
        let x = solve(&m, &[q(3), q(4)]).unwrap();
        assert_eq!(x, vec![q(1), q(1)]);
        assert!(solve(&mat(&[&[1, 2], &[2, 4]]), &[q(1), q(2)]).is_none());
    }

    proptest! {
        // Bareiss route and plain Gauss-Jordan route agree on rank and null space.
        #[test]
        fn bareiss_agrees_with_gauss_jordan(
            entries in proptest::collection::vec(-3i64..=3, 20),
            dup in 0usize..4,
        ) {
            let mut m: RationalMatrix = entries.chunks(5).map(|r| r.iter().map(|&v| q(v)).collect()).collect();
            // force rank deficiency
            let copy = m[dup].clone();
            m.push(copy.iter().map(|v| v * q(2)).collect());
            let ns = nullspace(&m, 5);
            prop_assert_eq!(ns.len(), 5 - rank(&m));
            for v in &ns {
                prop_assert!(mul_vec(&m, v).iter().all(Zero::is_zero));
            }
        }
    }
}
