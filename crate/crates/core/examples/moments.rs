//! Unit-ball moments for several norms, with a Monte-Carlo cross-check and
//! the order-2 ellipticity certificate.
//!
//! ```text
//! cargo run --release --example moments
//! ```

use strongly_harmonic::meanvalue::sigma_distance;
use strongly_harmonic::moments::{ellipticity_certificate, mc_moment, MomentTable};
use strongly_harmonic::{LpExponent, MultiIndex, NormSpec, Result};

fn main() -> Result<()> {
    let alphas: [MultiIndex; 3] = [[2, 0].into(), [4, 0].into(), [2, 2].into()];
    println!("{:<8} {:>26} {:>26} {:>26}   min eig", "norm", "M(2,0)", "M(4,0)", "M(2,2)");
    for p in ["1", "2", "3", "4", "inf"] {
        let norm = NormSpec::lp(LpExponent::parse(p)?, 2)?;
        let table = MomentTable::build(&norm, 4)?;
        let cells: Vec<String> = alphas.iter().map(|a| table.moment(a).map(ToString::to_string)).collect::<Result<_>>()?;
        println!(
            "{:<8} {:>26} {:>26} {:>26}   {}",
            format!("l^{p}"),
            cells[0],
            cells[1],
            cells[2],
            ellipticity_certificate(&table)?
        );
    }

    // independent estimate for a norm with irrational moments
    let l3 = NormSpec::lp(LpExponent::finite(3), 2)?;
    let exact = MomentTable::build(&l3, 4)?;
    for a in &alphas {
        let mc = mc_moment(&l3, a, 2_000_000, 42)?;
        let closed = exact.moment(a)?;
        println!("l^3 {a}: closed form {closed}  Monte Carlo {mc}  ({:.2} sigma apart)", sigma_distance(&mc, closed));
    }
    Ok(())
}
