//! Kernels of assembled systems in canonical form.
//!
//! The canonical basis is the reduced row echelon form of the kernel
//! vectors over ascending graded monomials: each basis polynomial has a
//! distinct lowest-order pivot monomial with coefficient 1 that no other
//! member contains. For a fixed ansatz degree this basis is unique, so two
//! kernels are equal exactly when their bases are.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg;
use crate::moments::MomentTable;
use crate::norms::NormSpec;
use crate::pde::{self, PdeSystemMatrix, SystemMeta};
use crate::polycore::{MultiIndex, Polynomial};

/// Singular values below `RANK_THRESHOLD · σ_max` count as zero.
pub const RANK_THRESHOLD: f64 = 1e-9;
/// Required ratio between the smallest retained and the largest discarded
/// singular value.
pub const MIN_SPECTRAL_GAP: f64 = 1e3;

#[derive(Clone, Debug)]
pub struct KernelBasis {
    polynomials: Vec<Polynomial>,
    rows: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
    columns: Vec<MultiIndex>,
    exact: bool,
    spectral_gap: Option<f64>,
    meta: SystemMeta,
}

impl KernelBasis {
    fn from_vectors(
        mut vectors: Vec<Vec<BigRational>>,
        matrix: &PdeSystemMatrix,
        exact: bool,
        spectral_gap: Option<f64>,
    ) -> Result<Self> {
        let pivots = linalg::rref(&mut vectors);
        let polynomials = vectors.iter().map(|v| matrix.polynomial(v)).collect::<Result<Vec<_>>>()?;
        Ok(KernelBasis {
            polynomials,
            rows: vectors,
            pivots,
            columns: matrix.columns().to_vec(),
            exact,
            spectral_gap,
            meta: matrix.meta().clone(),
        })
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.polynomials
    }

    pub fn dimension(&self) -> usize {
        self.polynomials.len()
    }

    /// True when the kernel was computed in exact arithmetic.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Singular-value gap of the approximate route; `None` when exact.
    pub fn spectral_gap(&self) -> Option<f64> {
        self.spectral_gap
    }

    pub fn meta(&self) -> &SystemMeta {
        &self.meta
    }

    pub fn degree(&self) -> u32 {
        self.meta.degree
    }

    /// Pivot monomial of each basis member.
    pub fn pivot_monomials(&self) -> Vec<MultiIndex> {
        self.pivots.iter().map(|&i| self.columns[i].clone()).collect()
    }

    /// Exact span membership.
    pub fn contains(&self, u: &Polynomial) -> bool {
        if u.nvars() != self.columns.first().map_or(u.nvars(), MultiIndex::dim) {
            return false;
        }
        if u.terms().any(|(m, _)| m.order() > self.meta.degree) {
            return false;
        }
        let mut v = u.coefficients_in(&self.columns);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p].clone();
            if !c.is_zero() {
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= &c * r;
                }
            }
        }
        v.iter().all(Zero::is_zero)
    }

    /// Whether both bases span the same space of polynomials.
    pub fn same_span(&self, other: &KernelBasis) -> bool {
        if self.columns == other.columns {
            return self.rows == other.rows;
        }
        self.dimension() == other.dimension()
            && self.polynomials.iter().all(|u| other.contains(u))
            && other.polynomials.iter().all(|u| self.contains(u))
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::json!({
            "dimension": self.dimension(),
            "basis": self.polynomials.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "norm": self.meta.norm.as_ref().map(NormSpec::to_json),
            "weight": self.meta.weight.to_string(),
            "degree": self.meta.degree,
            "system": self.meta.kind,
            "equations": self.meta.equations,
            "exact": self.exact,
        });
        if let Some(g) = self.spectral_gap {
            v["spectral_gap"] = serde_json::json!(if g.is_finite() { Some(g) } else { None });
        }
        v
    }
}

/// Kernel of an assembled system: exact elimination for exact matrices,
/// SVD with a mandatory spectral-gap check otherwise.
pub fn kernel_basis(matrix: &PdeSystemMatrix) -> Result<KernelBasis> {
    match matrix.to_exact() {
        Some(rows) => {
            let ns = linalg::nullspace(&rows, matrix.ncols());
            KernelBasis::from_vectors(ns, matrix, true, None)
        }
        None => approximate_kernel(matrix),
    }
}

fn approximate_kernel(matrix: &PdeSystemMatrix) -> Result<KernelBasis> {
    let k = matrix.ncols();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for r in matrix.rows() {
        let mut v: Vec<f64> = r.iter().map(|s| if s.is_zero() { 0.0 } else { s.value() }).collect();
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale > 0.0 {
            v.iter_mut().for_each(|x| *x /= scale);
            rows.push(v);
        }
    }
    let m = rows.len().max(k);
    let a = DMatrix::from_fn(m, k, |i, j| rows.get(i).map_or(0.0, |r| r[j]));
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.as_ref().expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let rank = sigma.iter().filter(|&&s| s > RANK_THRESHOLD * smax).count();
    let gap = match (rank.checked_sub(1).map(|i| sigma[i]), sigma.get(rank)) {
        (Some(kept), Some(&dropped)) if dropped > 0.0 => kept / dropped,
        _ => f64::INFINITY,
    };
    if gap < MIN_SPECTRAL_GAP {
        return Err(Error::AmbiguousRank { gap, required: MIN_SPECTRAL_GAP });
    }
    // null vectors as rows, then float RREF with partial pivoting
    let mut null: Vec<Vec<f64>> =
        order[rank..].iter().map(|&i| vt.row(i).iter().copied().collect()).collect();
    let pivots = float_rref(&mut null);
    debug_assert_eq!(pivots.len(), null.len());
    let vectors: Vec<Vec<BigRational>> =
        null.iter().map(|v| v.iter().map(|&x| rationalize(x, 1e-9)).collect()).collect();
    KernelBasis::from_vectors(vectors, matrix, false, Some(gap))
}

/// In-place RREF of float rows; entries below `1e-9·max` are flushed to 0.
fn float_rref(rows: &mut Vec<Vec<f64>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let scale = rows.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let best = (r..rows.len()).max_by(|&i, &j| rows[i][c].abs().total_cmp(&rows[j][c].abs())).unwrap();
        if rows[best][c].abs() <= tol {
            continue;
        }
        rows.swap(r, best);
        let p = rows[r][c];
        rows[r].iter_mut().for_each(|x| *x /= p);
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][c];
                if f != 0.0 {
                    let pivot_row = rows[r].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    for row in rows.iter_mut() {
        for x in row.iter_mut() {
            if x.abs() <= tol {
                *x = 0.0;
            }
        }
    }
    pivots
}

/// Closest fraction with denominator at most `10⁶` within `tol·max(1, |x|)`,
/// falling back to the exact binary value of `x`.
fn rationalize(x: f64, tol: f64) -> BigRational {
    if x == 0.0 {
        return BigRational::zero();
    }
    let bound = tol * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > 1_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= bound {
            return BigRational::new(BigInt::from(h1), BigInt::from(k1));
        }
        let frac = y - a;
        if frac == 0.0 {
            break;
        }
        y = 1.0 / frac;
    }
    BigRational::from_f64(x).unwrap_or_else(BigRational::zero)
}

/// Strongly harmonic polynomials of degree `≤ D` for `(norm, w dx)`.
pub fn harmonic_space(norm: &NormSpec, w: &Polynomial, degree: u32) -> Result<KernelBasis> {
    let j_list = pde::default_j_list(w, degree);
    let table = MomentTable::build(norm, *j_list.last().unwrap())?;
    harmonic_space_with(&table, w, degree)
}

/// [`harmonic_space`] with a caller-supplied moment table.
pub fn harmonic_space_with(table: &MomentTable, w: &Polynomial, degree: u32) -> Result<KernelBasis> {
    let j_list = pde::default_j_list(w, degree);
    let matrix = pde::assemble_general(w, table, &j_list, degree)?;
    kernel_basis(&matrix)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanPoint {
    pub degree: u32,
    pub dimension: usize,
    pub exact: bool,
    pub spectral_gap: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationScan {
    pub points: Vec<ScanPoint>,
    /// The last three dimensions coincide.
    pub stabilized: bool,
}

impl StabilizationScan {
    pub fn dimensions(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.dimension).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,dimension,exact,spectral_gap\n");
        for p in &self.points {
            let gap = p.spectral_gap.map_or(String::new(), |g| format!("{g:e}"));
            out.push_str(&format!("{},{},{},{}\n", p.degree, p.dimension, p.exact, gap));
        }
        out
    }
}

/// Kernel dimension for each degree in `degrees` (increasing).
pub fn stabilization_scan(norm: &NormSpec, w: &Polynomial, degrees: &[u32]) -> Result<StabilizationScan> {
    if degrees.windows(2).any(|d| d[1] <= d[0]) {
        return Err(Error::InvalidArgument("degree range must be increasing".into()));
    }
    let Some(&top) = degrees.last() else {
        return Ok(StabilizationScan { points: vec![], stabilized: false });
    };
    let table = MomentTable::build(norm, *pde::default_j_list(w, top).last().unwrap())?;
    let points = degrees
        .par_iter()
        .map(|&d| {
            let k = harmonic_space_with(&table, w, d)?;
            Ok(ScanPoint { degree: d, dimension: k.dimension(), exact: k.is_exact(), spectral_gap: k.spectral_gap() })
        })
        .collect::<Result<Vec<_>>>()?;
    let stabilized = points.len() >= 3 && points[points.len() - 3..].windows(2).all(|w| w[0].dimension == w[1].dimension);
    Ok(StabilizationScan { points, stabilized })
}

/// Check that every member satisfies the system it came from.
pub fn residuals_vanish(basis: &KernelBasis, matrix: &PdeSystemMatrix) -> Result<bool> {
    for u in basis.polynomials() {
        let r = pde::residuals(matrix, u)?;
        if r.values().any(|eq| !eq.is_empty()) {
            return Ok(false);
        }
    }
    Ok(true)
}
