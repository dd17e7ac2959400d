//! Normalized unit-ball moments `M_α = ⨍_{B(0,1)} y^α dy` and the PDE
//! coefficients `A_α = binom(|α|, α)·M_α`.
//!
//! Three engines compute moments: the Gamma closed form for `ℓᵖ` balls
//! (exact rationals for `p ∈ {1, 2, ∞}`), exact integration over a fan
//! triangulation for polytopes, and seeded Monte Carlo as an independent
//! oracle. Moments are stored divided by the ball volume; every equation of
//! the PDE system is homogeneous in the moments of its own order, so the
//! normalization does not affect any kernel.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::norms::{LpExponent, NormKind, NormSpec, Polytope};
use crate::polycore::{factorial, MultiIndex};
use crate::sampling;
use crate::scalar::Scalar;
use crate::special::{digamma, ln_gamma, LN_GAMMA_ABS_ERROR};

fn q(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Odd double factorial `(2k − 1)!!` for even `a = 2k`.
fn odd_double_factorial(a: u32) -> BigInt {
    (1..a).step_by(2).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Normalized `ℓᵖ` moment by the Dirichlet integral
/// `M_α = Γ(1+n/p) ∏Γ((αᵢ+1)/p) / (Γ(1/p)ⁿ Γ(1+(|α|+n)/p))`.
pub fn lp_moment(p: &LpExponent, n: usize, alpha: &MultiIndex) -> Result<Scalar> {
    if alpha.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: alpha.dim() });
    }
    if let LpExponent::Finite(pp) = p {
        if *pp < BigRational::one() {
            return Err(Error::InvalidNorm(format!("p = {pp} is below 1")));
        }
    }
    if alpha.has_odd_component() {
        return Ok(Scalar::zero());
    }
    let order = alpha.order();
    let exact = match p {
        LpExponent::Infinity => Some(
            alpha
                .exponents()
                .iter()
                .fold(BigRational::one(), |acc, &a| acc / BigRational::from_integer(BigInt::from(a + 1))),
        ),
        LpExponent::Finite(pp) if *pp == BigRational::from_integer(1.into()) => {
            // n!·α! / (|α| + n)!
            Some(q(factorial(n as u32) * alpha.factorial(), factorial(order + n as u32)))
        }
        LpExponent::Finite(pp) if *pp == BigRational::from_integer(2.into()) => {
            // ∏ (αᵢ−1)!!/2^{αᵢ/2} / ∏_{k<|α|/2} (n/2 + 1 + k)
            let mut m = BigRational::one();
            for &a in alpha.exponents() {
                m *= q(odd_double_factorial(a), num_traits::pow(BigInt::from(2), (a / 2) as usize));
            }
            for k in 0..order / 2 {
                m /= q(BigInt::from(n as u32 + 2 + 2 * k), BigInt::from(2));
            }
            Some(m)
        }
        LpExponent::Finite(_) => None,
    };
    if let Some(m) = exact {
        return Ok(Scalar::Exact(m));
    }
    let pf = p.as_f64();
    let nf = n as f64;
    let ln_m = alpha.exponents().iter().map(|&a| ln_gamma((a as f64 + 1.0) / pf)).sum::<f64>()
        + ln_gamma(1.0 + nf / pf)
        - nf * ln_gamma(1.0 / pf)
        - ln_gamma(1.0 + (order as f64 + nf) / pf);
    let value = ln_m.exp();
    // n + 3 Gamma evaluations, n of them counted with weight 1 and one with weight n
    let ln_err = (2.0 * nf + 2.0) * LN_GAMMA_ABS_ERROR;
    let err = value * (ln_err.exp_m1() + 8.0 * f64::EPSILON);
    Ok(Scalar::approx(value, err))
}

/// `|B(0,1)| = (2Γ(1+1/p))ⁿ / Γ(1+n/p)`; exact for `p ∈ {1, ∞}`.
pub fn lp_volume(p: &LpExponent, n: usize) -> Scalar {
    match p {
        LpExponent::Infinity => Scalar::Exact(BigRational::from_integer(BigInt::from(2).pow(n as u32))),
        LpExponent::Finite(pp) if *pp == BigRational::from_integer(1.into()) => {
            Scalar::Exact(q(BigInt::from(2).pow(n as u32), factorial(n as u32)))
        }
        LpExponent::Finite(_) => {
            let pf = p.as_f64();
            let nf = n as f64;
            let ln_v = nf * (2f64.ln() + ln_gamma(1.0 + 1.0 / pf)) - ln_gamma(1.0 + nf / pf);
            let v = ln_v.exp();
            let err = v * (((nf + 1.0) * LN_GAMMA_ABS_ERROR).exp_m1() + 8.0 * f64::EPSILON);
            Scalar::approx(v, err)
        }
    }
}

/// Exact normalized moment of a polytope ball by fan triangulation.
pub fn polytope_moment(poly: &Polytope, alpha: &MultiIndex) -> Result<Scalar> {
    if alpha.dim() != poly.dim() {
        return Err(Error::DimensionMismatch { expected: poly.dim(), found: alpha.dim() });
    }
    // origin symmetry kills odd total order; axis symmetry kills odd components
    if alpha.order() % 2 == 1 || (poly.is_axis_symmetric() && alpha.has_odd_component()) {
        return Ok(Scalar::zero());
    }
    let integral = poly.integrate(&crate::polycore::Polynomial::monomial(alpha.clone()))?;
    Ok(Scalar::Exact(integral / poly.volume()))
}

/// Monte-Carlo normalized moment with `abs_error = 4·(standard error)`.
pub fn mc_moment(norm: &NormSpec, alpha: &MultiIndex, samples: usize, seed: u64) -> Result<Scalar> {
    if samples < 10_000 {
        return Err(Error::InvalidArgument(format!("need at least 10^4 samples, got {samples}")));
    }
    if alpha.dim() != norm.dim() {
        return Err(Error::DimensionMismatch { expected: norm.dim(), found: alpha.dim() });
    }
    let exps: Vec<i32> = alpha.exponents().iter().map(|&e| e as i32).collect();
    let origin = vec![0.0; norm.dim()];
    let sums = sampling::sample_ball(norm, &origin, 1.0, samples, seed, 0, |y| {
        let v = y.iter().zip(&exps).fold(1.0, |acc, (x, &e)| acc * x.powi(e));
        Ok((v, 1.0))
    })?;
    let k = sums.accepted as f64;
    let mean = sums.a / k;
    let var = (sums.aa / k - mean * mean).max(0.0) * k / (k - 1.0).max(1.0);
    Ok(Scalar::approx(mean, 4.0 * (var / k).sqrt()))
}

/// Normalized moments `M_α` for all `|α| ≤ max_order`.
#[derive(Clone, Debug)]
pub struct MomentTable {
    norm: NormSpec,
    max_order: u32,
    entries: BTreeMap<MultiIndex, Scalar>,
    volume: Scalar,
}

impl MomentTable {
    /// Builds the table with the engine matching the norm; `max_order`
    /// is rounded up to even.
    pub fn build(norm: &NormSpec, max_order: u32) -> Result<Self> {
        let max_order = max_order + max_order % 2;
        let n = norm.dim();
        let mut entries = BTreeMap::new();
        let volume = match norm.kind() {
            NormKind::Lp(p) => {
                for alpha in MultiIndex::up_to(n, max_order) {
                    let m = lp_moment(p, n, &alpha)?;
                    entries.insert(alpha, m);
                }
                lp_volume(p, n)
            }
            NormKind::Polytope(poly) => {
                for alpha in MultiIndex::up_to(n, max_order) {
                    let m = polytope_moment(poly, &alpha)?;
                    entries.insert(alpha, m);
                }
                Scalar::Exact(poly.volume())
            }
        };
        Ok(MomentTable { norm: norm.clone(), max_order, entries, volume })
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    pub fn dim(&self) -> usize {
        self.norm.dim()
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// Unnormalized ball volume `|B(0,1)|`.
    pub fn volume(&self) -> &Scalar {
        &self.volume
    }

    pub fn is_exact(&self) -> bool {
        self.entries.values().all(Scalar::is_exact)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.entries.iter()
    }

    pub fn moment(&self, alpha: &MultiIndex) -> Result<&Scalar> {
        if alpha.order() > self.max_order {
            return Err(Error::InsufficientOrder { required: alpha.order(), available: self.max_order });
        }
        self.entries
            .get(alpha)
            .ok_or(Error::DimensionMismatch { expected: self.dim(), found: alpha.dim() })
    }

    /// Unnormalized moment `∫_{B(0,1)} y^α dy`.
    pub fn raw_moment(&self, alpha: &MultiIndex) -> Result<Scalar> {
        Ok(self.moment(alpha)? * &self.volume)
    }

    pub fn ensure_order(&self, required: u32) -> Result<()> {
        if required > self.max_order {
            return Err(Error::InsufficientOrder { required, available: self.max_order });
        }
        Ok(())
    }

    /// Same table with every entry converted to the approximate representation.
    pub fn to_approx(&self) -> MomentTable {
        MomentTable {
            norm: self.norm.clone(),
            max_order: self.max_order,
            entries: self.entries.iter().map(|(a, m)| (a.clone(), m.to_approx())).collect(),
            volume: self.volume.to_approx(),
        }
    }

    /// Multiplies the moments of each order `j` by `factor(j)`. The result is
    /// no longer normalized; it exists to exercise the scale invariance of
    /// the PDE system (for instance, `factor = volume` recovers raw moments).
    pub fn rescaled<F: Fn(u32) -> Scalar>(&self, factor: F) -> MomentTable {
        MomentTable {
            norm: self.norm.clone(),
            max_order: self.max_order,
            entries: self.entries.iter().map(|(a, m)| (a.clone(), m * &factor(a.order()))).collect(),
            volume: self.volume.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        #[derive(Serialize)]
        struct Entry<'a> {
            alpha: &'a [u32],
            value: &'a Scalar,
        }
        let entries: Vec<Entry> =
            self.entries.iter().map(|(a, v)| Entry { alpha: a.exponents(), value: v }).collect();
        serde_json::json!({
            "norm": self.norm.to_json(),
            "max_order": self.max_order,
            "volume": self.volume,
            "entries": entries,
        })
    }
}

/// `A_α = binom(|α|, α)·M_α` (volume-normalized).
pub fn coefficient_a(alpha: &MultiIndex, table: &MomentTable) -> Result<Scalar> {
    let m = table.moment(alpha)?;
    Ok(&Scalar::Exact(BigRational::from_integer(alpha.multinomial())) * m)
}

/// `f(p) = Γ(3/p)² / (Γ(5/p)Γ(1/p))`, the ratio deciding whether the
/// order-4 operator of an `ℓᵖ` ball in the plane is a multiple of `Δ²`.
pub fn f_ratio(p: f64) -> f64 {
    assert!(p > 0.0, "f_ratio needs p > 0");
    (2.0 * ln_gamma(3.0 / p) - ln_gamma(5.0 / p) - ln_gamma(1.0 / p)).exp()
}

/// Closed form `f'(p) = f(p)·(−6Ψ(3/p) + 5Ψ(5/p) + Ψ(1/p))/p²`.
pub fn f_ratio_derivative(p: f64) -> f64 {
    f_ratio(p) * (-6.0 * digamma(3.0 / p) + 5.0 * digamma(5.0 / p) + digamma(1.0 / p)) / (p * p)
}

/// Central-difference derivative of [`f_ratio`]; `f` is analytic on
/// `p > 0`, so the stencil may step below 1.
pub fn f_ratio_derivative_numeric(p: f64) -> f64 {
    let h = 1e-4 * p;
    (f_ratio(p + h) - f_ratio(p - h)) / (2.0 * h)
}

#[derive(Clone, Debug, Serialize)]
pub struct FRatioPoint {
    pub p: f64,
    pub f: f64,
    pub derivative_numeric: f64,
    pub derivative_closed: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FRatioScan {
    pub points: Vec<FRatioPoint>,
    pub strictly_increasing: bool,
    /// Where `f` crosses `1/3`, refined by bisection; `None` if the grid
    /// does not bracket a crossing.
    pub crossing: Option<f64>,
}

pub fn f_ratio_scan(grid: &[f64]) -> FRatioScan {
    let points: Vec<FRatioPoint> = grid
        .iter()
        .map(|&p| FRatioPoint {
            p,
            f: f_ratio(p),
            derivative_numeric: f_ratio_derivative_numeric(p),
            derivative_closed: f_ratio_derivative(p),
        })
        .collect();
    let strictly_increasing = points.windows(2).all(|w| w[1].p > w[0].p && w[1].f > w[0].f);
    let third = 1.0 / 3.0;
    let crossing = points.windows(2).find(|w| (w[0].f - third) * (w[1].f - third) <= 0.0).map(|w| {
        let (mut lo, mut hi) = (w[0].p, w[1].p);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f_ratio(lo) - third) * (f_ratio(mid) - third) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-14 {
                break;
            }
        }
        0.5 * (lo + hi)
    });
    FRatioScan { points, strictly_increasing, crossing }
}

/// Order-2 symbol matrix `S` with `Sᵢᵢ = A(2eᵢ)`, `Sᵢₖ = A(eᵢ+eₖ)/2`.
pub fn symbol_matrix(table: &MomentTable) -> Result<Vec<Vec<Scalar>>> {
    table.ensure_order(2)?;
    let n = table.dim();
    let mut s = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            let mut e = vec![0; n];
            e[i] += 1;
            e[k] += 1;
            let a = coefficient_a(&MultiIndex::new(e), table)?;
            s[i][k] = if i == k { a } else { &a / &Scalar::from_int(2) };
        }
    }
    Ok(s)
}

/// Minimum eigenvalue of the order-2 symbol; errors unless strictly positive.
pub fn ellipticity_certificate(table: &MomentTable) -> Result<Scalar> {
    let s = symbol_matrix(table)?;
    let n = s.len();
    let diagonal = (0..n).all(|i| (0..n).all(|k| i == k || s[i][k].is_zero()));
    let min = if diagonal && s.iter().enumerate().all(|(i, r)| r[i].is_exact()) {
        (0..n)
            .map(|i| s[i][i].as_exact().cloned().unwrap())
            .min()
            .map(Scalar::Exact)
            .unwrap_or_else(Scalar::zero)
    } else {
        let m = DMatrix::from_fn(n, n, |i, k| s[i][k].value());
        let perturbation: f64 = s.iter().flatten().map(|x| x.abs_error().powi(2)).sum::<f64>().sqrt();
        let eig = m.clone().symmetric_eigen();
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        // Weyl: |Δλ| ≤ ‖ΔS‖₂ ≤ ‖ΔS‖_F, plus solver rounding
        let err = perturbation + 64.0 * f64::EPSILON * m.norm();
        Scalar::approx(min, err)
    };
    if !min.is_positive() {
        return Err(Error::NotElliptic { min_eigenvalue: min.to_string() });
    }
    Ok(min)
}
