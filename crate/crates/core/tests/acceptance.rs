//! Acceptance suite: one line per criterion, nonzero exit on any failure that
//! is not listed in `KNOWN_RED`.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use strongly_harmonic::kernel::{harmonic_space, kernel_basis, stabilization_scan, MIN_SPECTRAL_GAP};
use strongly_harmonic::linalg;
use strongly_harmonic::meanvalue::{
    exact_polytope_mean, iterated_weight_check, mc_mean, random_probes, verify_strongly_harmonic, weighted_mean,
    DomainBox, Oracle, Probe,
};
use strongly_harmonic::moments::{ellipticity_certificate, f_ratio, f_ratio_scan, MomentTable};
use strongly_harmonic::pde::{assemble_bose, assemble_iterated_laplace, default_j_list};
use strongly_harmonic::sampling::substream;
use strongly_harmonic::{LpExponent, MultiIndex, NormSpec, Polynomial, Polytope, Scalar};

/// Criteria that cannot hold as written; the line still prints FAIL.
/// 3: the degree-≤6 truncation of the 48-dimensional space has dimension
/// 39, because the space contains a member of degree 9.
const KNOWN_RED: &[u32] = &[3];

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn p(text: &str, n: usize) -> Polynomial {
    Polynomial::parse(text, n).unwrap()
}

fn lp(e: LpExponent, n: usize) -> NormSpec {
    NormSpec::lp(e, n).unwrap()
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn exponents() -> [(&'static str, LpExponent); 4] {
    [
        ("1", LpExponent::finite(1)),
        ("3", LpExponent::finite(3)),
        ("4", LpExponent::finite(4)),
        ("inf", LpExponent::Infinity),
    ]
}

fn eight() -> Vec<Polynomial> {
    ["1", "x", "y", "x*y", "x^2 - y^2", "x*y^2 - x^3/3", "x^2*y - y^3/3", "x*y^3 - x^3*y"]
        .iter()
        .map(|s| p(s, 2))
        .collect()
}

/// Dimension of `{u : Δu = 0, deg u ≤ D}` from the Laplacian as a matrix on
/// monomial coefficients, without any moment machinery.
fn brute_force_harmonic_dim(n: usize, d: u32) -> usize {
    let cols = MultiIndex::up_to(n, d);
    let rows_idx = MultiIndex::up_to(n, d.saturating_sub(2));
    let mut m = vec![vec![BigRational::zero(); cols.len()]; rows_idx.len()];
    for (j, beta) in cols.iter().enumerate() {
        let lap = Polynomial::monomial(beta.clone()).laplacian();
        for (mono, c) in lap.terms() {
            let i = rows_idx.iter().position(|r| r == mono).unwrap();
            m[i][j] = c.clone();
        }
    }
    linalg::nullspace(&m, cols.len()).len()
}

fn crit1() -> Outcome {
    let mut notes = Vec::new();
    for (name, e) in exponents() {
        let t = Instant::now();
        let k = harmonic_space(&lp(e, 2), &Polynomial::one(2), 6).map_err(err)?;
        let elapsed = t.elapsed();
        ensure(k.dimension() == 8, || format!("p={name}: dimension {}", k.dimension()))?;
        ensure(eight().iter().all(|u| k.contains(u)), || format!("p={name}: reference member missing"))?;
        let reference = eight();
        ensure(k.polynomials().iter().all(|u| in_span(&reference, u)), || format!("p={name}: extra member"))?;
        if matches!(name, "3" | "4") {
            let gap = k.spectral_gap().unwrap_or(0.0);
            ensure(!k.is_exact() && gap > MIN_SPECTRAL_GAP, || format!("p={name}: gap {gap:e}"))?;
            notes.push(format!("p={name} gap {gap:.1e}"));
        }
        ensure(elapsed < Duration::from_secs(10), || format!("p={name}: {elapsed:?}"))?;
    }
    Ok(format!("dim 8 for p ∈ {{1,3,4,∞}}, spans equal both ways; {}", notes.join(", ")))
}

/// `u ∈ span(list)` by comparing exact ranks of coefficient vectors.
fn in_span(list: &[Polynomial], u: &Polynomial) -> bool {
    let cols = MultiIndex::up_to(2, 6);
    let mut rows: Vec<Vec<BigRational>> = list.iter().map(|v| v.coefficients_in(&cols)).collect();
    let before = linalg::rank(&rows);
    rows.push(u.coefficients_in(&cols));
    linalg::rank(&rows) == before
}

fn crit2() -> Outcome {
    let norm = lp(LpExponent::finite(2), 2);
    let scan = stabilization_scan(&norm, &Polynomial::one(2), &[2, 3, 4, 5, 6]).map_err(err)?;
    let dims = scan.dimensions();
    let oracle: Vec<usize> = (2..=6).map(|d| brute_force_harmonic_dim(2, d)).collect();
    ensure(dims == vec![5, 7, 9, 11, 13], || format!("dims {dims:?}"))?;
    ensure(dims == oracle, || format!("oracle {oracle:?}"))?;
    ensure(!scan.stabilized, || "reported stabilized".into())?;
    Ok(format!("dims {dims:?} = brute-force Δu=0 counts, not stabilized"))
}

fn crit3() -> Outcome {
    let norm = lp(LpExponent::Infinity, 3);
    let one = Polynomial::one(3);
    let scan = stabilization_scan(&norm, &one, &[6, 7, 8, 9, 10, 11]).map_err(err)?;
    let dims = scan.dimensions();
    let isometries = BigInt::from(8) * BigInt::from(6);
    let top = p("x*y*z*(x^2 - y^2)*(x^2 - z^2)*(y^2 - z^2)", 3);
    let k9 = harmonic_space(&norm, &one, 9).map_err(err)?;
    let context = format!(
        "D=6..11 dims {dims:?}; 48 = 2^3·3! = {isometries} reached at D=9 and stable (top member of degree 9 in kernel: {})",
        k9.contains(&top)
    );
    ensure(dims[0] == 48, || format!("D=6 gives {}, not 48; {context}", dims[0]))?;
    Ok(context)
}

fn crit4() -> Outcome {
    let mut grid: Vec<f64> = (10..=100).map(|k| k as f64 / 10.0).collect();
    grid.extend([20.0, 50.0, 100.0]);
    let f2 = f_ratio(2.0);
    let f1 = f_ratio(1.0);
    ensure((f2 - 1.0 / 3.0).abs() < 1e-12, || format!("f(2) = {f2}"))?;
    ensure((f1 - 1.0 / 6.0).abs() < 1e-12, || format!("f(1) = {f1}"))?;
    let scan = f_ratio_scan(&grid);
    ensure(scan.strictly_increasing, || "not strictly increasing".into())?;
    let worst = scan.points.iter().map(|pt| (pt.derivative_numeric - pt.derivative_closed).abs()).fold(0.0, f64::max);
    ensure(worst < 1e-6, || format!("derivative mismatch {worst:e}"))?;
    Ok(format!(
        "|f(2)-1/3| = {:.1e}, |f(1)-1/6| = {:.1e}, increasing on {} points, max |f'num - f'closed| = {worst:.1e}",
        (f2 - 1.0 / 3.0).abs(),
        (f1 - 1.0 / 6.0).abs(),
        grid.len()
    ))
}

fn crit5() -> Outcome {
    let one = Polynomial::one(2);
    let dom = DomainBox::symmetric(2, 3);
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut cases: Vec<(&str, LpExponent)> = exponents().to_vec();
    cases.push(("2", LpExponent::finite(2)));
    for (i, (name, e)) in cases.into_iter().enumerate() {
        let norm = lp(e, 2);
        let k = harmonic_space(&norm, &one, 6).map_err(err)?;
        let probes = random_probes(&norm, &dom, 10, &q(1, 1), 100 + i as u64).map_err(err)?;
        let exact_moments = matches!(name, "1" | "2" | "inf");
        for u in k.polynomials() {
            let rep = verify_strongly_harmonic(u, &one, &norm, &probes, Oracle::Pizzetti, &dom).map_err(err)?;
            ensure(rep.pass, || format!("p={name}: {u} fails"))?;
            if exact_moments {
                ensure(rep.probes.iter().all(|r| r.measured.is_exact() && r.residual == 0.0), || {
                    format!("p={name}: {u} not exactly zero residual")
                })?;
            } else {
                worst = worst.max(rep.max_residual());
                ensure(rep.max_residual() <= 1e-10, || format!("p={name}: {u} residual {:e}", rep.max_residual()))?;
            }
            if matches!(name, "1" | "inf") {
                let poly = norm.as_polytope().unwrap();
                for pr in &probes {
                    let m = exact_polytope_mean(u, &one, &poly, &pr.center, &pr.radius).map_err(err)?;
                    ensure(m == u.evaluate(&pr.center).unwrap(), || format!("p={name}: polytope oracle {u}"))?;
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} basis members × 10 probes; exact for p ∈ {{1,2,∞}}, max residual {worst:.1e} for p ∈ {{3,4}}"))
}

fn crit6() -> Outcome {
    let euclid = lp(LpExponent::finite(2), 2);
    for w in ["1", "2 + x", "1 + x^2 + y^2"] {
        let w = p(w, 2);
        let d = 4;
        let l_max = default_j_list(&w, d).len() as u32;
        let bose = kernel_basis(&assemble_bose(&w, l_max - 1, d).map_err(err)?).map_err(err)?;
        let iter = kernel_basis(&assemble_iterated_laplace(&w, l_max, d).map_err(err)?).map_err(err)?;
        let general = harmonic_space(&euclid, &w, d).map_err(err)?;
        ensure(bose.polynomials() == iter.polynomials(), || format!("w={w}: bose ≠ iterated"))?;
        ensure(bose.polynomials() == general.polynomials(), || format!("w={w}: bose ≠ general"))?;
    }
    let w = p("2 + x", 2);
    let k = kernel_basis(&assemble_bose(&w, 0, 2).map_err(err)?).map_err(err)?;
    let hand = ["1", "y", "x^2 - 3*y^2 + 4*x"];
    ensure(k.dimension() == 3 && hand.iter().all(|u| k.contains(&p(u, 2))), || format!("hand oracle: {:?}", k.polynomials()))?;
    Ok("RREF bases coincide for w ∈ {1, 2+x, 1+x²+y²}; w=2+x, D=2 kernel = span{1, y, x²−3y²+4x}".into())
}

fn random_poly(rng: &mut impl rand::Rng, degree: u32, lo: i64, hi: i64) -> Polynomial {
    let terms = MultiIndex::up_to(2, degree).into_iter().map(|a| (a, BigRational::from_integer(rng.random_range(lo..=hi).into())));
    Polynomial::from_terms(2, terms).unwrap()
}

fn crit7() -> Outcome {
    use rand::Rng;
    let hexagon = Polytope::new(
        [(2, 0), (-2, 0), (1, 2), (-1, -2), (1, -2), (-1, 2)].iter().map(|&(a, b)| vec![q(a, 1), q(b, 1)]).collect(),
    )
    .unwrap();
    let norms = [
        lp(LpExponent::finite(1), 2),
        lp(LpExponent::finite(2), 2),
        lp(LpExponent::finite(3), 2),
        lp(LpExponent::Infinity, 2),
        NormSpec::polytope(hexagon),
    ];
    let mut rng = substream(7, &[0]);
    let mut hits = 0;
    let mut exact_agree = 0;
    for case in 0..50u64 {
        let norm = &norms[case as usize % norms.len()];
        let u = random_poly(&mut rng, 3, -3, 3);
        // |terms| ≤ 6 · 1.5² on the box, so w ≥ 1 there
        let w = &random_poly(&mut rng, 2, -1, 1) + &Polynomial::constant(2, q(15, 1));
        let reach_cap = q(1, 2) / norm.extent();
        let r = q(rng.random_range(10..=50), 100) * &reach_cap;
        let x = vec![q(rng.random_range(-50..=50), 100), q(rng.random_range(-50..=50), 100)];
        let table = MomentTable::build(norm, u.degree() + w.degree()).map_err(err)?;
        let exact = weighted_mean(&u, &w, &table, &x, &r).map_err(err)?;
        if let Some(poly) = norm.as_polytope() {
            let e = exact_polytope_mean(&u, &w, &poly, &x, &r).map_err(err)?;
            ensure(Scalar::Exact(e) == exact && exact.is_exact(), || format!("case {case}: polytope ≠ Pizzetti"))?;
            exact_agree += 1;
        }
        let xf: Vec<f64> = x.iter().map(|c| num_traits::ToPrimitive::to_f64(c).unwrap()).collect();
        let rf = num_traits::ToPrimitive::to_f64(&r).unwrap();
        let mc = mc_mean(&u, &w, norm, &xf, rf, 1_000_000, 7, case).map_err(err)?;
        if mc == exact {
            hits += 1;
        }
    }
    ensure(hits >= 48, || format!("only {hits}/50 bracketed"))?;
    Ok(format!("MC brackets exact mean in {hits}/50 cases; polytope = Pizzetti exactly in {exact_agree} cases"))
}

fn crit8() -> Outcome {
    let mut norms = vec![lp(LpExponent::finite(2), 2), lp(LpExponent::Infinity, 3)];
    norms.extend(exponents().into_iter().map(|(_, e)| lp(e, 2)));
    let mut parts = Vec::new();
    for norm in &norms {
        let t = MomentTable::build(norm, 2).map_err(err)?;
        let c = ellipticity_certificate(&t).map_err(err)?;
        ensure(c.is_positive(), || format!("{norm}: {c}"))?;
        parts.push(format!("{norm}: {c}"));
    }
    let exact = |e: LpExponent| ellipticity_certificate(&MomentTable::build(&lp(e, 2), 2).unwrap()).unwrap();
    ensure(exact(LpExponent::finite(2)) == Scalar::ratio(1, 4) && exact(LpExponent::finite(2)).is_exact(), || "ℓ² ≠ 1/4".into())?;
    ensure(exact(LpExponent::Infinity) == Scalar::ratio(1, 3) && exact(LpExponent::Infinity).is_exact(), || "ℓ^∞ ≠ 1/3".into())?;
    ensure(exact(LpExponent::finite(1)) == Scalar::ratio(1, 6) && exact(LpExponent::finite(1)).is_exact(), || "ℓ¹ ≠ 1/6".into())?;
    Ok(parts.join("; "))
}

fn crit9() -> Outcome {
    let euclid = lp(LpExponent::finite(2), 2);
    let dom = DomainBox::symmetric(2, 10);
    let oracle = Oracle::MonteCarlo { samples: 1_000_000, seed: 9 };
    // balls centred on (±1, ±1) with radius ≤ 1/2 avoid the zero of Δw at the origin
    let probes: Vec<Probe> = [(1, 1), (-1, 1), (3, -2), (-2, -5), (1, 0)]
        .iter()
        .zip([q(1, 2), q(1, 4), q(1, 1), q(3, 2), q(1, 2)])
        .map(|(&(a, b), r)| Probe::new(vec![q(a, 1), q(b, 1)], r))
        .collect();
    let w = p("x^4 + y^4 + 1", 2);
    let k = harmonic_space(&euclid, &w, 4).map_err(err)?;
    for u in k.polynomials() {
        let levels = iterated_weight_check(u, &w, 1, &probes, oracle, &dom).map_err(err)?;
        for level in &levels {
            let rep = level.report().ok_or_else(|| format!("level {} inapplicable for {u}", level.level))?;
            ensure(rep.pass, || format!("{u} fails at level {}", level.level))?;
        }
    }
    // a weight with a non-constant kernel member: w = 1 + x² gives span{1, y}
    let w2 = p("1 + x^2", 2);
    let k2 = harmonic_space(&euclid, &w2, 4).map_err(err)?;
    ensure(k2.contains(&p("y", 2)), || "y not in kernel for 1 + x²".into())?;
    for u in k2.polynomials() {
        let levels = iterated_weight_check(u, &w2, 1, &probes, oracle, &dom).map_err(err)?;
        ensure(levels.iter().all(|l| l.report().is_some_and(|r| r.pass)), || format!("{u} fails for 1 + x²"))?;
    }
    Ok(format!(
        "w = x⁴+y⁴+1: kernel dim {} verified for w and Δw on {} balls (MC 4σ); w = 1+x²: kernel {{1, y}} verified for Δw = 2",
        k.dimension(),
        probes.len()
    ))
}

type Criterion = (u32, &'static str, f64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "eight-dimensional spaces", 40.0, crit1),
        (2, "Euclidean contrast", 10.0, crit2),
        (3, "n=3 count", 120.0, crit3),
        (4, "f(p) analysis", 1.0, crit4),
        (5, "mean-value round trip", 30.0, crit5),
        (6, "Bose equivalence", 10.0, crit6),
        (7, "oracle concordance", 120.0, crit7),
        (8, "ellipticity certificates", 1.0, crit8),
        (9, "iterated weights", 60.0, crit9),
    ];
    let mut unexpected = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(m) if secs > budget => Err(format!("{m}; took {secs:.2}s > {budget}s")),
            o => o,
        };
        match outcome {
            Ok(m) => println!("[PASS] {id} {name} ({secs:.2}s): {m}"),
            Err(m) => {
                let known = KNOWN_RED.contains(&id);
                let tag = if known { " [known red, see notes]" } else { "" };
                println!("[FAIL] {id} {name} ({secs:.2}s){tag}: {m}");
                if !known {
                    unexpected += 1;
                }
            }
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
