//! A hexagonal unit ball: exact triangulated moments, exact ball means and
//! a degree scan of the mean-value space.

use num_rational::BigRational;
use strongly_harmonic::meanvalue::{exact_polytope_mean, weighted_mean};
use strongly_harmonic::{stabilization_scan, MomentTable, NormSpec, Polynomial, Polytope, Result};

fn r(a: i64) -> BigRational {
    BigRational::from_integer(a.into())
}

fn main() -> Result<()> {
    let hexagon = Polytope::new([(2, 0), (-2, 0), (1, 2), (-1, -2), (1, -2), (-1, 2)].iter().map(|&(a, b)| vec![r(a), r(b)]).collect())?;
    println!("facets: {}, triangles: {}, area: {}", hexagon.facet_normals().len(), hexagon.simplices().len(), hexagon.volume());
    let norm = NormSpec::polytope(hexagon.clone());
    let table = MomentTable::build(&norm, 4)?;
    for (alpha, m) in table.entries().filter(|(a, m)| a.order() == 4 && !m.is_zero()) {
        println!("M{alpha} = {m}");
    }

    let u = Polynomial::parse("x^3 - x*y + 2", 2)?;
    let w = Polynomial::parse("4 + x + y^2", 2)?;
    let x = [BigRational::new(1.into(), 3.into()), BigRational::new((-1).into(), 2.into())];
    let radius = BigRational::new(2.into(), 5.into());
    let a = exact_polytope_mean(&u, &w, &hexagon, &x, &radius)?;
    let b = weighted_mean(&u, &w, &MomentTable::build(&norm, 5)?, &x, &radius)?;
    println!("weighted mean: quadrature {a}, Pizzetti {b}");

    let scan = stabilization_scan(&norm, &Polynomial::one(2), &(2..=8).collect::<Vec<_>>())?;
    print!("{}", scan.to_csv());
    println!("stabilized: {}", scan.stabilized);
    Ok(())
}
