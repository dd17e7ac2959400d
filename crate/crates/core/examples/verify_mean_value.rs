//! Every kernel member has the mean-value property, checked by three
//! independent oracles; a non-member fails.

use num_rational::BigRational;
use strongly_harmonic::meanvalue::{random_probes, verify_strongly_harmonic, DomainBox, Oracle};
use strongly_harmonic::{harmonic_space, LpExponent, NormSpec, Polynomial, Result};

fn main() -> Result<()> {
    let one = Polynomial::one(2);
    let domain = DomainBox::symmetric(2, 2);
    let max_r = BigRational::new(1.into(), 2.into());
    for (p, oracles) in [
        ("1", vec![Oracle::Pizzetti, Oracle::ExactPolytope]),
        ("4", vec![Oracle::Pizzetti, Oracle::MonteCarlo { samples: 1_000_000, seed: 1 }]),
    ] {
        let norm = NormSpec::lp(LpExponent::parse(p)?, 2)?;
        let probes = random_probes(&norm, &domain, 5, &max_r, 3)?;
        let basis = harmonic_space(&norm, &one, 6)?;
        let mut candidates = basis.polynomials().to_vec();
        candidates.push(Polynomial::parse("x^2", 2)?);
        for oracle in oracles {
            for u in &candidates {
                let rep = verify_strongly_harmonic(u, &one, &norm, &probes, oracle, &domain)?;
                println!(
                    "l^{p} {:<8} {:<24} {} (max residual {:.1e})",
                    oracle.name(),
                    u.to_string(),
                    if rep.pass { "pass" } else { "FAIL" },
                    rep.max_residual()
                );
            }
        }
    }
    Ok(())
}
