//! Assembly of the mean-value PDE systems as linear maps on the coefficient
//! vector of a polynomial ansatz `u = Σ_{|β| ≤ D} c_β x^β`.
//!
//! Column `β` holds the image of `x^β` under every equation of the system,
//! expanded in monomials; one row per `(equation, output monomial)` pair. A
//! coefficient vector lies in the kernel exactly when the corresponding
//! polynomial satisfies every equation identically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{coefficient_a, MomentTable};
use crate::norms::NormSpec;
use crate::polycore::{MultiIndex, Polynomial};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    /// `Σ_{|α|=j} A_α (D^α(uw) − u D^α w) = 0` for `j` in the list.
    General,
    /// `Δu·Δʲw + 2∇u·∇Δʲw = 0`, `j = 0..=l`.
    Bose,
    /// `Δˡ(uw) − uΔˡw = 0`, `l = 1..=l_max`.
    IteratedLaplace,
}

/// Provenance of an assembled system.
#[derive(Clone, Debug)]
pub struct SystemMeta {
    pub kind: SystemKind,
    /// `None` for the Euclidean-only systems.
    pub norm: Option<NormSpec>,
    pub weight: Polynomial,
    pub degree: u32,
    /// Equation labels: `j` for the general system, `j` of `Δʲw` for Bose,
    /// `l` for the iterated Laplacian.
    pub equations: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RowTag {
    pub equation: u32,
    pub monomial: MultiIndex,
}

#[derive(Clone, Debug)]
pub struct PdeSystemMatrix {
    rows: Vec<Vec<Scalar>>,
    row_tags: Vec<RowTag>,
    columns: Vec<MultiIndex>,
    meta: SystemMeta,
}

type ColumnImage = BTreeMap<RowTag, Scalar>;

fn accumulate(image: &mut ColumnImage, equation: u32, p: &Polynomial, scale: &Scalar) {
    for (mono, c) in p.terms() {
        let tag = RowTag { equation, monomial: mono.clone() };
        let v = scale * &Scalar::from(c);
        let slot = image.entry(tag).or_insert_with(Scalar::zero);
        *slot = &*slot + &v;
    }
}

impl PdeSystemMatrix {
    fn from_columns(columns: Vec<MultiIndex>, images: Vec<ColumnImage>, meta: SystemMeta) -> Self {
        let tags: BTreeSet<RowTag> = images
            .iter()
            .flat_map(|img| img.iter().filter(|(_, v)| !v.is_zero()).map(|(t, _)| t.clone()))
            .collect();
        let row_tags: Vec<RowTag> = tags.into_iter().collect();
        let rows = row_tags
            .iter()
            .map(|t| images.iter().map(|img| img.get(t).cloned().unwrap_or_else(Scalar::zero)).collect())
            .collect();
        PdeSystemMatrix { rows, row_tags, columns, meta }
    }

    fn assemble<F>(n: usize, degree: u32, meta: SystemMeta, column: F) -> Result<Self>
    where
        F: Fn(&Polynomial) -> Result<ColumnImage> + Sync,
    {
        let columns = MultiIndex::up_to(n, degree);
        let images = columns
            .par_iter()
            .map(|beta| column(&Polynomial::monomial(beta.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_columns(columns, images, meta))
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn row_tags(&self) -> &[RowTag] {
        &self.row_tags
    }

    /// Graded monomials `x^β`, `|β| ≤ D`, in ascending order.
    pub fn columns(&self) -> &[MultiIndex] {
        &self.columns
    }

    pub fn meta(&self) -> &SystemMeta {
        &self.meta
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn is_exact(&self) -> bool {
        self.rows.iter().flatten().all(Scalar::is_exact)
    }

    /// Exact entries, if every entry is exact.
    pub fn to_exact(&self) -> Option<Vec<Vec<BigRational>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|s| s.as_exact().cloned()).collect::<Option<Vec<_>>>())
            .collect()
    }

    /// Ansatz polynomial for a coefficient vector over [`columns`](Self::columns).
    pub fn polynomial(&self, coefficients: &[BigRational]) -> Result<Polynomial> {
        let n = self.columns.first().map_or(0, MultiIndex::dim);
        Polynomial::from_terms(n, self.columns.iter().cloned().zip(coefficients.iter().cloned()))
    }

    /// Debug export: one row per line, leading with the row tag.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("equation,monomial");
        for c in &self.columns {
            write!(out, ",\"x^{c}\"").unwrap();
        }
        out.push('\n');
        for (tag, row) in self.row_tags.iter().zip(&self.rows) {
            write!(out, "{},\"{}\"", tag.equation, tag.monomial).unwrap();
            for v in row {
                match v {
                    Scalar::Exact(q) => write!(out, ",{q}").unwrap(),
                    Scalar::Approx { value, .. } => write!(out, ",{value:e}").unwrap(),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Default equation orders: every even `j` in `2..=D + deg w`, with the
/// upper end rounded up to even.
pub fn default_j_list(w: &Polynomial, degree: u32) -> Vec<u32> {
    let top = degree + w.degree();
    let top = top + top % 2;
    (2..=top.max(2)).step_by(2).collect()
}

/// The weighted system `Σ_{|α|=j} A_α (D^α(uw) − u D^α w) = 0`.
pub fn assemble_general(
    w: &Polynomial,
    table: &MomentTable,
    j_list: &[u32],
    degree: u32,
) -> Result<PdeSystemMatrix> {
    let n = table.dim();
    if w.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.nvars() });
    }
    if j_list.is_empty() {
        return Err(Error::InvalidArgument("empty equation list".into()));
    }
    let j_max = *j_list.iter().max().unwrap();
    table.ensure_order(j_max)?;
    let mut blocks = Vec::new();
    for &j in j_list {
        let mut block = Vec::new();
        for alpha in MultiIndex::of_order(n, j) {
            let a = coefficient_a(&alpha, table)?;
            if !a.is_zero() {
                let dw = w.derivative(&alpha)?;
                block.push((alpha, a, dw));
            }
        }
        blocks.push((j, block));
    }
    let meta = SystemMeta {
        kind: SystemKind::General,
        norm: Some(table.norm().clone()),
        weight: w.clone(),
        degree,
        equations: j_list.to_vec(),
    };
    PdeSystemMatrix::assemble(n, degree, meta, |u| {
        let uw = u * w;
        let mut image = ColumnImage::new();
        for (j, block) in &blocks {
            for (alpha, a, dw) in block {
                let residual = uw.derivative(alpha)? - u * dw;
                accumulate(&mut image, *j, &residual, a);
            }
        }
        Ok(image)
    })
}

/// Named specialization of [`assemble_general`] with `w = 1`.
pub fn assemble_fl(table: &MomentTable, j_list: &[u32], degree: u32) -> Result<PdeSystemMatrix> {
    assemble_general(&Polynomial::one(table.dim()), table, j_list, degree)
}

/// Euclidean system `Δu·Δʲw + 2∇u·∇(Δʲw) = 0` for `j = 0..=l`.
pub fn assemble_bose(w: &Polynomial, l: u32, degree: u32) -> Result<PdeSystemMatrix> {
    let n = w.nvars();
    let powers: Vec<Polynomial> = (0..=l).map(|j| w.laplacian_iter(j)).collect();
    let meta = SystemMeta {
        kind: SystemKind::Bose,
        norm: None,
        weight: w.clone(),
        degree,
        equations: (0..=l).collect(),
    };
    let one = Scalar::from_int(1);
    PdeSystemMatrix::assemble(n, degree, meta, |u| {
        let lap = u.laplacian();
        let mut image = ColumnImage::new();
        for (j, wj) in powers.iter().enumerate() {
            let two = Polynomial::constant(n, BigRational::from_integer(2.into()));
            let row = &lap * wj + &two * &u.grad_dot(wj)?;
            accumulate(&mut image, j as u32, &row, &one);
        }
        Ok(image)
    })
}

/// Euclidean system `Δˡ(uw) − uΔˡw = 0` for `l = 1..=l_max`.
pub fn assemble_iterated_laplace(w: &Polynomial, l_max: u32, degree: u32) -> Result<PdeSystemMatrix> {
    if l_max == 0 {
        return Err(Error::InvalidArgument("l_max must be at least 1".into()));
    }
    let n = w.nvars();
    let powers: Vec<Polynomial> = (1..=l_max).map(|l| w.laplacian_iter(l)).collect();
    let meta = SystemMeta {
        kind: SystemKind::IteratedLaplace,
        norm: None,
        weight: w.clone(),
        degree,
        equations: (1..=l_max).collect(),
    };
    let one = Scalar::from_int(1);
    PdeSystemMatrix::assemble(n, degree, meta, |u| {
        let uw = u * w;
        let mut image = ColumnImage::new();
        for (i, wl) in powers.iter().enumerate() {
            let l = i as u32 + 1;
            let row = uw.laplacian_iter(l) - u * wl;
            accumulate(&mut image, l, &row, &one);
        }
        Ok(image)
    })
}

/// Applies a system row-by-row to a concrete polynomial and returns the
/// residual of each equation; all zero iff `u` lies in the kernel. With an
/// approximate system, entries whose error interval contains zero are
/// treated as zero.
pub fn residuals(matrix: &PdeSystemMatrix, u: &Polynomial) -> Result<BTreeMap<u32, Vec<(MultiIndex, Scalar)>>> {
    if u.degree() > matrix.meta.degree {
        return Err(Error::InvalidArgument(format!(
            "candidate degree {} exceeds ansatz degree {}",
            u.degree(),
            matrix.meta.degree
        )));
    }
    let c: Vec<Scalar> = u.coefficients_in(&matrix.columns).into_iter().map(Scalar::from).collect();
    let mut out: BTreeMap<u32, Vec<(MultiIndex, Scalar)>> = BTreeMap::new();
    for eq in &matrix.meta.equations {
        out.entry(*eq).or_default();
    }
    for (tag, row) in matrix.row_tags.iter().zip(&matrix.rows) {
        let v: Scalar = row.iter().zip(&c).filter(|(_, x)| !x.is_zero()).map(|(a, x)| a * x).sum();
        if !v.admits_zero() {
            out.entry(tag.equation).or_default().push((tag.monomial.clone(), v));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{LpExponent, Polytope};

    fn p(text: &str) -> Polynomial {
        Polynomial::parse(text, 2).unwrap()
    }

    fn table(norm: LpExponent, order: u32) -> MomentTable {
        MomentTable::build(&NormSpec::lp(norm, 2).unwrap(), order).unwrap()
    }

    /// Coefficient of `x^β` in the image of `x^γ`, row block `j`, for `γ`
    /// a high enough monomial to expose one derivative.
    fn operator_coefficient(m: &PdeSystemMatrix, j: u32, gamma: [u32; 2], alpha: [u32; 2]) -> Scalar {
        let col = m.columns().iter().position(|c| c == &MultiIndex::from(gamma)).unwrap();
        let out = MultiIndex::from(gamma).checked_sub(&MultiIndex::from(alpha)).unwrap();
        let row = m.row_tags().iter().position(|t| t.equation == j && t.monomial == out).unwrap();
        // D^α x^γ = γ!/(γ−α)! x^{γ−α}
        let falling = MultiIndex::from(gamma).factorial() / out.factorial();
        &m.rows()[row][col] / &Scalar::Exact(BigRational::from_integer(falling))
    }

    #[test]
    fn column_count_is_binomial() {
        let t = table(LpExponent::finite(2), 8);
        for d in 0..=6u32 {
            let m = assemble_fl(&t, &[2], d).unwrap();
            assert_eq!(m.ncols() as u32, (d + 1) * (d + 2) / 2);
        }
    }

    #[test]
    fn cube_order_four_ratio() {
        let m = assemble_fl(&table(LpExponent::Infinity, 4), &[4], 4).unwrap();
        let pure = operator_coefficient(&m, 4, [4, 0], [4, 0]);
        let mixed = operator_coefficient(&m, 4, [2, 2], [2, 2]);
        assert_eq!(pure, Scalar::ratio(1, 5));
        assert_eq!(mixed, Scalar::ratio(2, 3));
        assert_eq!(&mixed / &pure, Scalar::ratio(10, 3));
    }

    #[test]
    fn euclidean_order_four_is_bilaplacian() {
        let m = assemble_fl(&table(LpExponent::finite(2), 4), &[4], 4).unwrap();
        let pure = operator_coefficient(&m, 4, [4, 0], [4, 0]);
        let mixed = operator_coefficient(&m, 4, [2, 2], [2, 2]);
        assert_eq!(&mixed / &pure, Scalar::from_int(2));
    }

    #[test]
    fn order_two_block_is_laplacian() {
        for norm in [LpExponent::finite(1), LpExponent::finite(3), LpExponent::Infinity] {
            let m = assemble_fl(&table(norm, 2), &[2], 3).unwrap();
            let xx = operator_coefficient(&m, 2, [2, 1], [2, 0]);
            let yy = operator_coefficient(&m, 2, [1, 2], [0, 2]);
            assert_eq!(xx, yy);
            assert!(m.row_tags().iter().all(|t| t.equation == 2));
            // harmonic cubic x³ − 3xy² is annihilated
            let r = residuals(&m, &p("x^3 - 3*x*y^2")).unwrap();
            assert!(r[&2].is_empty());
        }
    }

    #[test]
    fn odd_orders_give_zero_rows() {
        let m = assemble_fl(&table(LpExponent::finite(2), 6), &[1, 3, 5], 4).unwrap();
        assert_eq!(m.nrows(), 0);
        assert_eq!(m.ncols(), 15);
    }

    #[test]
    fn diamond_matches_l1() {
        let diamond = MomentTable::build(&NormSpec::polytope(Polytope::cross_polytope(2).unwrap()), 4).unwrap();
        let a = assemble_fl(&diamond, &[2, 4], 6).unwrap();
        let b = assemble_fl(&table(LpExponent::finite(1), 4), &[2, 4], 6).unwrap();
        assert_eq!(a.to_exact().unwrap(), b.to_exact().unwrap());
        assert_eq!(a.row_tags(), b.row_tags());
    }

    #[test]
    fn insufficient_order_is_reported() {
        let t = table(LpExponent::finite(2), 4);
        assert!(matches!(
            assemble_fl(&t, &[2, 6], 6),
            Err(Error::InsufficientOrder { required: 6, available: 4 })
        ));
    }

    #[test]
    fn bose_example_rows() {
        let w = p("2 + x");
        let m = assemble_bose(&w, 0, 2).unwrap();
        let r = residuals(&m, &p("x^2 - 3*y^2 + 4*x")).unwrap();
        assert!(r[&0].is_empty());
        assert!(!residuals(&m, &p("x^2")).unwrap()[&0].is_empty());
        // w = 1: only the Laplacian survives
        let m1 = assemble_bose(&Polynomial::one(2), 3, 3).unwrap();
        assert!(m1.row_tags().iter().all(|t| t.equation == 0));
        // Δw = 4 turns the j = 1 equation into 4Δu
        let m2 = assemble_bose(&p("x^2 + y^2 + 1"), 1, 2).unwrap();
        let r = residuals(&m2, &p("x^2")).unwrap();
        assert_eq!(r[&1], vec![(MultiIndex::zero(2), Scalar::from_int(8))]);
    }

    #[test]
    fn iterated_laplace_example() {
        let m = assemble_iterated_laplace(&p("2 + x"), 2, 2).unwrap();
        let r = residuals(&m, &p("x^2 - 3*y^2 + 4*x")).unwrap();
        assert!(r.values().all(Vec::is_empty));
        assert!(assemble_iterated_laplace(&p("1"), 0, 2).is_err());
    }

    #[test]
    fn default_j_list_rounds_up() {
        assert_eq!(default_j_list(&p("1"), 6), vec![2, 4, 6]);
        assert_eq!(default_j_list(&p("2 + x"), 2), vec![2, 4]);
        assert_eq!(default_j_list(&p("1"), 0), vec![2]);
    }

    #[test]
    fn assembly_is_deterministic_and_exact() {
        let t = table(LpExponent::Infinity, 6);
        let a = assemble_general(&p("1 + x^2"), &t, &[2, 4, 6], 4).unwrap();
        let b = assemble_general(&p("1 + x^2"), &t, &[2, 4, 6], 4).unwrap();
        assert!(a.is_exact());
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.to_csv().starts_with("equation,monomial,"));
    }

    #[test]
    fn approximate_tables_give_approximate_rows() {
        let m = assemble_fl(&table(LpExponent::finite(3), 4), &[2, 4], 4).unwrap();
        assert!(!m.is_exact());
        assert!(m.to_exact().is_none());
    }
}
