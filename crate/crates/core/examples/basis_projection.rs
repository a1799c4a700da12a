//! Build the Dirichlet eigenbasis on an interval and a rectangle, project
//! closed-form data and reconstruct it pointwise.
//!
//! `cargo run --example basis_projection`

use std::f64::consts::PI;

use kirchhoff_heat::spectrum::{evaluate_field, gram_matrix, project_initial_data, Field, Point};
use kirchhoff_heat::{build_basis, Domain, Result};

fn main() -> Result<()> {
    let line = build_basis(Domain::interval(PI)?, 32)?;
    let parabola = |p: Point| p.x * (PI - p.x);
    let coeffs = project_initial_data(&line, &Field::Function(&parabola))?;
    println!("interval (0, pi), 32 modes");
    for (k, c) in coeffs.iter().enumerate().take(5) {
        println!("  <x(pi-x), e_{}> = {c:+.12}", k + 1);
    }
    let probe: Vec<Point> = [0.3, 1.0, PI / 2.0, 2.5]
        .iter()
        .map(|&x| Point::on_line(x))
        .collect();
    let rebuilt = evaluate_field(&line, &coeffs, &probe)?;
    for (p, u) in probe.iter().zip(&rebuilt) {
        println!("  x = {:.4}: series {u:.8}, exact {:.8}", p.x, parabola(*p));
    }

    let rect = build_basis(Domain::rectangle(PI, 2.0)?, 10)?;
    println!("rectangle (0, pi) x (0, 2), first 10 eigenvalues:");
    for (lambda, mode) in rect.lambdas().iter().zip(rect.modes()) {
        println!("  {mode:?}: {lambda:.6}");
    }
    let gram = gram_matrix(&rect);
    let off = gram
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, g)| (g - if i == j { 1.0 } else { 0.0 }).abs())
        })
        .fold(0.0, f64::max);
    println!("  max |Gram - I| = {off:.2e}");
    Ok(())
}
