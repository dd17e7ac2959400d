//! Three descriptions of weighted Euclidean mean-value polynomials give the
//! same kernel: the moment system, the Bose system and the
//! iterated-Laplacian system.

use strongly_harmonic::pde::{assemble_bose, assemble_iterated_laplace, default_j_list};
use strongly_harmonic::{harmonic_space, kernel_basis, LpExponent, NormSpec, Polynomial, Result};

fn main() -> Result<()> {
    let euclid = NormSpec::lp(LpExponent::finite(2), 2)?;
    for (w, d) in [("1", 4), ("2 + x", 2), ("2 + x", 4), ("1 + x^2 + y^2", 4), ("3 + x*y + y^2", 5)] {
        let w = Polynomial::parse(w, 2)?;
        let l = default_j_list(&w, d).len() as u32;
        let bose = kernel_basis(&assemble_bose(&w, l - 1, d)?)?;
        let iterated = kernel_basis(&assemble_iterated_laplace(&w, l, d)?)?;
        let general = harmonic_space(&euclid, &w, d)?;
        println!(
            "w = {w}, D = {d}: dims {} / {} / {}, coincide: {}",
            bose.dimension(),
            iterated.dimension(),
            general.dimension(),
            bose.same_span(&iterated) && bose.same_span(&general)
        );
        if bose.dimension() <= 4 {
            for u in bose.polynomials() {
                println!("    {u}");
            }
        }
    }
    Ok(())
}
