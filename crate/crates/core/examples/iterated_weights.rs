//! A Euclidean mean-value polynomial for the weight `w` keeps the property
//! for `Δw`, `Δ²w`, … wherever those stay positive.

use num_rational::BigRational;
use strongly_harmonic::meanvalue::{iterated_weight_check, DomainBox, LevelOutcome, Oracle, Probe};
use strongly_harmonic::{harmonic_space, LpExponent, NormSpec, Polynomial, Result};

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn main() -> Result<()> {
    let euclid = NormSpec::lp(LpExponent::finite(2), 2)?;
    let domain = DomainBox::symmetric(2, 10);
    let probes = vec![
        Probe::new(vec![r(1, 1), r(1, 1)], r(1, 2)),
        Probe::new(vec![r(-3, 2), r(2, 1)], r(1, 1)),
        Probe::new(vec![r(0, 1), r(0, 1)], r(1, 4)),
    ];
    for w in ["1 + x^2", "x^4 + y^4 + 1", "2 + x^2 + y^4"] {
        let w = Polynomial::parse(w, 2)?;
        let basis = harmonic_space(&euclid, &w, 4)?;
        println!("w = {w}: kernel {:?}", basis.polynomials().iter().map(ToString::to_string).collect::<Vec<_>>());
        for u in basis.polynomials() {
            let oracle = Oracle::MonteCarlo { samples: 400_000, seed: 5 };
            for level in iterated_weight_check(u, &w, 2, &probes, oracle, &domain)? {
                let status = match &level.outcome {
                    LevelOutcome::Verified { report } => if report.pass { "pass".to_string() } else { "FAIL".to_string() },
                    LevelOutcome::Inapplicable { reason } => format!("inapplicable: {reason}"),
                };
                println!("    u = {u}, Δ^{} w = {}: {status}", level.level, level.weight);
            }
        }
    }
    Ok(())
}
