//! Weighted ball means and verification of the mean-value property.
//!
//! Three independent oracles compute `⨍_{B(x,r)} u w / ⨍_{B(x,r)} w`:
//!
//! * the terminating Pizzetti series, exact whenever the moments are,
//! * exact integration over a triangulated polytope ball,
//! * seeded Monte-Carlo rejection sampling with a 4σ error bound.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::norms::{NormSpec, Polytope};
use crate::polycore::Polynomial;
use crate::sampling;
use crate::scalar::Scalar;

fn check_point(n: usize, x: &[BigRational]) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    Ok(())
}

/// `f(x + r·z)` as a polynomial in `z`.
fn rescaled_at(f: &Polynomial, x: &[BigRational], r: &BigRational) -> Result<Polynomial> {
    let n = f.nvars();
    let linear: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|k| if i == k { r.clone() } else { BigRational::zero() }).collect())
        .collect();
    f.compose_affine(x, &linear)
}

/// `⨍_{B(x,r)} f = Σ_α r^{|α|} M_α D^α f(x) / α!`, a finite sum for
/// polynomial `f`.
pub fn pizzetti_mean(f: &Polynomial, table: &MomentTable, x: &[BigRational], r: &BigRational) -> Result<Scalar> {
    check_point(table.dim(), x)?;
    if f.nvars() != table.dim() {
        return Err(Error::DimensionMismatch { expected: table.dim(), found: f.nvars() });
    }
    table.ensure_order(f.degree())?;
    // Taylor coefficients of z ↦ f(x + rz) are r^{|α|} D^α f(x) / α!
    let g = rescaled_at(f, x, r)?;
    let mut acc = Scalar::zero();
    for (alpha, c) in g.terms() {
        let m = table.moment(alpha)?;
        if !m.is_zero() {
            acc = &acc + &(m * &Scalar::from(c));
        }
    }
    Ok(acc)
}

/// `⨍ u w / ⨍ w` by two Pizzetti sums.
pub fn weighted_mean(
    u: &Polynomial,
    w: &Polynomial,
    table: &MomentTable,
    x: &[BigRational],
    r: &BigRational,
) -> Result<Scalar> {
    let den = pizzetti_mean(w, table, x, r)?;
    if !den.is_positive() {
        return Err(Error::WeightNotPositive(den.to_string()));
    }
    let num = pizzetti_mean(&(u * w), table, x, r)?;
    Ok(&num / &den)
}

/// Exact `∫_{B(x,r)} u w / ∫_{B(x,r)} w` over a polytope ball.
pub fn exact_polytope_mean(
    u: &Polynomial,
    w: &Polynomial,
    poly: &Polytope,
    x: &[BigRational],
    r: &BigRational,
) -> Result<BigRational> {
    check_point(poly.dim(), x)?;
    if !r.is_positive() {
        return Err(Error::InvalidArgument(format!("radius {r} is not positive")));
    }
    // the Jacobian r^n cancels in the ratio
    let den = poly.integrate(&rescaled_at(w, x, r)?)?;
    if den.is_zero() {
        return Err(Error::WeightNotPositive("0".into()));
    }
    let num = poly.integrate(&rescaled_at(&(u * w), x, r)?)?;
    Ok(num / den)
}

/// Monte-Carlo `⨍ u w / ⨍ w` with a delta-method 4σ bound. Fails on the
/// first accepted sample where `w ≤ 0`. `key` selects the random stream.
#[allow(clippy::too_many_arguments)]
pub fn mc_mean(
    u: &Polynomial,
    w: &Polynomial,
    norm: &NormSpec,
    x: &[f64],
    r: f64,
    samples: usize,
    seed: u64,
    key: u64,
) -> Result<Scalar> {
    if samples < 10_000 {
        return Err(Error::InvalidArgument(format!("need at least 10^4 samples, got {samples}")));
    }
    let n = norm.dim();
    for p in [u, w] {
        if p.nvars() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
        }
    }
    let (cu, cw) = (u.compile(), w.compile());
    let s = sampling::sample_ball(norm, x, r, samples, seed, key, |y| {
        let wv = cw.eval(y);
        if wv <= 0.0 || wv.is_nan() {
            return Err(Error::NonPositiveWeightSample(y.to_vec()));
        }
        Ok((cu.eval(y) * wv, wv))
    })?;
    let k = s.accepted as f64;
    let ratio = s.a / s.b;
    // Σ (aᵢ − R bᵢ)² expanded; R = A/B
    let ss = (s.aa - 2.0 * ratio * s.ab + ratio * ratio * s.bb).max(0.0);
    let mean_b = s.b / k;
    let var = ss / (k - 1.0).max(1.0);
    let se = (var / k).sqrt() / mean_b;
    Ok(Scalar::approx(ratio, 4.0 * se))
}

/// Open axis-aligned box `∏ (lo_i, hi_i)` playing the role of the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainBox {
    pub lo: Vec<BigRational>,
    pub hi: Vec<BigRational>,
}

impl DomainBox {
    pub fn new(lo: Vec<BigRational>, hi: Vec<BigRational>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::InvalidArgument("empty domain box".into()));
        }
        Ok(DomainBox { lo, hi })
    }

    /// `(−h, h)ⁿ`.
    pub fn symmetric(n: usize, h: i64) -> Self {
        let h = BigRational::from_integer(h.into());
        DomainBox { lo: vec![-h.clone(); n], hi: vec![h; n] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// The bounding cube `x + r·[−R, R]ⁿ` of the closed ball lies inside the
    /// open box.
    pub fn admits(&self, norm: &NormSpec, probe: &Probe) -> bool {
        let reach = &probe.radius * norm.extent();
        probe.radius.is_positive()
            && probe.center.len() == self.dim()
            && probe.center.iter().zip(self.lo.iter().zip(&self.hi)).all(|(c, (lo, hi))| {
                &(c - &reach) > lo && &(c + &reach) < hi
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub center: Vec<BigRational>,
    pub radius: BigRational,
}

impl Probe {
    pub fn new(center: Vec<BigRational>, radius: BigRational) -> Self {
        Probe { center, radius }
    }

    fn center_f64(&self) -> Vec<f64> {
        self.center.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// Seeded admissible probes with centers on a `1/100` grid and radii in
/// `[1/20, max_radius]` on the same grid.
pub fn random_probes(norm: &NormSpec, domain: &DomainBox, count: usize, max_radius: &BigRational, seed: u64) -> Result<Vec<Probe>> {
    use rand::Rng;
    let n = norm.dim();
    if domain.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: domain.dim() });
    }
    let hundred = BigRational::from_integer(100.into());
    let grid = |q: &BigRational| (q * &hundred).floor().to_integer().to_i64().unwrap_or(0);
    let r_hi = grid(max_radius).max(5);
    let mut rng = sampling::substream(seed, &[u64::MAX]);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::InvalidArgument("could not place admissible probes in the domain".into()));
        }
        let radius = BigRational::new(rng.random_range(5..=r_hi).into(), 100.into());
        let reach = &radius * norm.extent();
        let mut center = Vec::with_capacity(n);
        for i in 0..n {
            let lo = grid(&(&domain.lo[i] + &reach)) + 1;
            let hi = -grid(&(-(&domain.hi[i] - &reach))) - 1;
            if lo > hi {
                break;
            }
            center.push(BigRational::new(rng.random_range(lo..=hi).into(), 100.into()));
        }
        if center.len() == n {
            let probe = Probe::new(center, radius);
            if domain.admits(norm, &probe) {
                out.push(probe);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Oracle {
    /// Pizzetti series over the moment table of the norm.
    Pizzetti,
    /// Exact triangulated integration; polytope unit balls only.
    ExactPolytope,
    MonteCarlo { samples: usize, seed: u64 },
}

impl Oracle {
    pub fn name(&self) -> &'static str {
        match self {
            Oracle::Pizzetti => "pizzetti",
            Oracle::ExactPolytope => "exact",
            Oracle::MonteCarlo { .. } => "mc",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeResult {
    pub center: Vec<String>,
    pub radius: String,
    /// `u(x)`, always exact.
    pub claimed: Scalar,
    pub measured: Scalar,
    /// `|measured − claimed|`.
    pub residual: f64,
    /// Error bound reported by the oracle; zero for exact oracles.
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub candidate: String,
    pub weight: String,
    pub norm: serde_json::Value,
    pub oracle: Oracle,
    pub probes: Vec<ProbeResult>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn max_residual(&self) -> f64 {
        self.probes.iter().map(|p| p.residual).fold(0.0, f64::max)
    }
}

fn judge(claimed: &BigRational, measured: Scalar) -> (Scalar, f64, f64, bool) {
    let diff = &measured - &Scalar::from(claimed);
    let residual = diff.abs().value();
    let tolerance = measured.abs_error();
    let pass = match &diff {
        Scalar::Exact(d) => d.is_zero(),
        Scalar::Approx { .. } => diff.admits_zero(),
    };
    (measured, residual, tolerance, pass)
}

/// Checks `u(x) = ⨍_{B(x,r)} u w / ⨍ w` at every probe.
pub fn verify_strongly_harmonic(
    u: &Polynomial,
    w: &Polynomial,
    norm: &NormSpec,
    probes: &[Probe],
    oracle: Oracle,
    domain: &DomainBox,
) -> Result<VerificationReport> {
    let n = norm.dim();
    for p in [u, w] {
        if p.nvars() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
        }
    }
    if domain.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: domain.dim() });
    }
    if let Some(bad) = probes.iter().find(|p| !domain.admits(norm, p)) {
        return Err(Error::InadmissibleProbe {
            center: bad.center.iter().map(ToString::to_string).collect(),
            radius: bad.radius.to_string(),
        });
    }
    let table = match oracle {
        Oracle::Pizzetti => Some(MomentTable::build(norm, u.degree() + w.degree())?),
        _ => None,
    };
    let polytope = match oracle {
        Oracle::ExactPolytope => Some(norm.as_polytope().ok_or_else(|| {
            Error::InvalidArgument(format!("exact oracle needs a polytope unit ball, not {norm}"))
        })?),
        _ => None,
    };
    let results = probes
        .par_iter()
        .enumerate()
        .map(|(i, probe)| {
            let claimed = u.evaluate(&probe.center)?;
            let measured = match oracle {
                Oracle::Pizzetti => weighted_mean(u, w, table.as_ref().unwrap(), &probe.center, &probe.radius)?,
                Oracle::ExactPolytope => Scalar::Exact(exact_polytope_mean(
                    u,
                    w,
                    polytope.as_ref().unwrap(),
                    &probe.center,
                    &probe.radius,
                )?),
                Oracle::MonteCarlo { samples, seed } => mc_mean(
                    u,
                    w,
                    norm,
                    &probe.center_f64(),
                    probe.radius.to_f64().unwrap_or(f64::NAN),
                    samples,
                    seed,
                    i as u64,
                )?,
            };
            let (measured, residual, tolerance, pass) = judge(&claimed, measured);
            Ok(ProbeResult {
                center: probe.center.iter().map(ToString::to_string).collect(),
                radius: probe.radius.to_string(),
                claimed: Scalar::Exact(claimed),
                measured,
                residual,
                tolerance,
                pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = results.iter().all(|r| r.pass);
    Ok(VerificationReport {
        candidate: u.to_string(),
        weight: w.to_string(),
        norm: norm.to_json(),
        oracle,
        probes: results,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LevelOutcome {
    Verified { report: VerificationReport },
    Inapplicable { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct IteratedLevel {
    pub level: u32,
    pub weight: String,
    #[serde(flatten)]
    pub outcome: LevelOutcome,
}

impl IteratedLevel {
    pub fn report(&self) -> Option<&VerificationReport> {
        match &self.outcome {
            LevelOutcome::Verified { report } => Some(report),
            LevelOutcome::Inapplicable { .. } => None,
        }
    }
}

/// Points of a `5ⁿ` grid over the bounding cube that fall inside the closed
/// ball, plus the center.
fn positivity_samples(norm: &NormSpec, probe: &Probe) -> Vec<Vec<BigRational>> {
    let n = norm.dim();
    let reach = &probe.radius * norm.extent();
    let steps: Vec<BigRational> = (-2..=2).map(|k| BigRational::new(k.into(), 2.into()) * &reach).collect();
    let mut out = vec![probe.center.clone()];
    let total = 5usize.pow(n as u32);
    for code in 0..total {
        let mut d = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            d.push(steps[c % 5].clone());
            c /= 5;
        }
        let df: Vec<f64> = d.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
        let inside = match norm.gauge_exact(&d) {
            Some(g) => g <= probe.radius,
            None => norm.gauge(&df) <= probe.radius.to_f64().unwrap_or(0.0),
        };
        if inside {
            out.push(probe.center.iter().zip(&d).map(|(x, e)| x + e).collect());
        }
    }
    out
}

/// Verifies `u` against each weight `Δˡw`, `l = 0..=l_max`, in the Euclidean
/// metric. A level whose weight is not positive at the sampled points of
/// every probe ball is reported inapplicable.
pub fn iterated_weight_check(
    u: &Polynomial,
    w: &Polynomial,
    l_max: u32,
    probes: &[Probe],
    oracle: Oracle,
    domain: &DomainBox,
) -> Result<Vec<IteratedLevel>> {
    let norm = NormSpec::lp(crate::norms::LpExponent::finite(2), u.nvars())?;
    let mut out = Vec::new();
    for l in 0..=l_max {
        let wl = w.laplacian_iter(l);
        let bad = probes.iter().find_map(|p| {
            positivity_samples(&norm, p)
                .into_iter()
                .find(|y| wl.evaluate(y).map_or(true, |v| !v.is_positive()))
                .map(|y| y.iter().map(ToString::to_string).collect::<Vec<_>>())
        });
        let outcome = match bad {
            _ if wl.is_zero() => LevelOutcome::Inapplicable { reason: "weight vanishes identically".into() },
            Some(y) => LevelOutcome::Inapplicable { reason: format!("weight not positive at ({})", y.join(", ")) },
            None => LevelOutcome::Verified { report: verify_strongly_harmonic(u, &wl, &norm, probes, oracle, domain)? },
        };
        out.push(IteratedLevel { level: l, weight: wl.to_string(), outcome });
    }
    Ok(out)
}

/// Distance between two scalars in units of their combined error bounds.
pub fn sigma_distance(a: &Scalar, b: &Scalar) -> f64 {
    let d = (a.value() - b.value()).abs();
    let e = a.abs_error() + b.abs_error();
    if e == 0.0 {
        if d == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        d / e
    }
}
