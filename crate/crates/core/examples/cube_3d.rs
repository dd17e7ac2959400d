//! Kernel dimension for the cube norm in three variables as the ansatz
//! degree grows. The space is finite-dimensional: it fills up at degree 9,
//! where `xyz(x²−y²)(x²−z²)(y²−z²)` appears, and has dimension
//! `48 = 2³·3!`.

use strongly_harmonic::{harmonic_space, stabilization_scan, LpExponent, NormSpec, Polynomial, Result};

fn main() -> Result<()> {
    let cube = NormSpec::lp(LpExponent::Infinity, 3)?;
    let one = Polynomial::one(3);
    let scan = stabilization_scan(&cube, &one, &(2..=11).collect::<Vec<_>>())?;
    print!("{}", scan.to_csv());
    println!("stabilized: {}", scan.stabilized);

    let top = Polynomial::parse("x*y*z*(x^2 - y^2)*(x^2 - z^2)*(y^2 - z^2)", 3)?;
    let k = harmonic_space(&cube, &one, 9)?;
    println!("degree-9 alternant in kernel: {}", k.contains(&top));
    Ok(())
}
