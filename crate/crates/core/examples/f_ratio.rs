//! `f(p) = Γ(3/p)² / (Γ(5/p) Γ(1/p))` is the ratio that decides whether the
//! order-4 equation of the `ℓᵖ` ball is a multiple of `Δ²`. It increases
//! from 1/6 to 5/9 and meets 1/3 only at p = 2.

use strongly_harmonic::moments::{f_ratio, f_ratio_scan};

fn main() {
    let grid: Vec<f64> = [1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0, 100.0, 1e4].to_vec();
    let scan = f_ratio_scan(&grid);
    println!("{:>8} {:>20} {:>14} {:>14}", "p", "f(p)", "f' numeric", "f' closed");
    for pt in &scan.points {
        println!("{:>8} {:>20.16} {:>14.6e} {:>14.6e}", pt.p, pt.f, pt.derivative_numeric, pt.derivative_closed);
    }
    println!("strictly increasing: {}", scan.strictly_increasing);
    println!("crossing of 1/3 at p = {:.15}", scan.crossing.unwrap_or(f64::NAN));
    println!("limit check: f(1e6) = {:.12}, 5/9 = {:.12}", f_ratio(1e6), 5.0 / 9.0);
}
