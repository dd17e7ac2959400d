//! The eight-dimensional spaces of mean-value polynomials for `ℓᵖ`,
//! `p ≠ 2`, in the plane, and the Euclidean case for contrast.

use strongly_harmonic::{harmonic_space, LpExponent, NormSpec, Polynomial, Result};

fn main() -> Result<()> {
    let one = Polynomial::one(2);
    for p in ["1", "3", "4", "inf", "2"] {
        let norm = NormSpec::lp(LpExponent::parse(p)?, 2)?;
        let basis = harmonic_space(&norm, &one, 6)?;
        let gap = basis.spectral_gap().map_or("exact".to_string(), |g| format!("svd gap {g:.1e}"));
        println!("l^{p}: dimension {} ({gap})", basis.dimension());
        for u in basis.polynomials() {
            println!("    {u}");
        }
    }
    Ok(())
}
