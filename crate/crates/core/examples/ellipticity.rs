//! Two-sided ellipticity bounds on a sampled frequency grid, and the
//! witness reported for a symbol that degenerates on an axis.
use opsymbol::symbol::{check_ellipticity, fit_order, geometric_radii, FrequencyGrid, Symbol};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let xs = vec![vec![0.0, 0.0], vec![0.5, 0.5], vec![1.0, 0.0]];
    let grid = FrequencyGrid::default();

    for (text, alpha) in [("(1 + abs2(k))^(1/2)", 1.0), ("5", 0.0), ("(2 + normx2(x)) * (1 + abs2(k))", 2.0), ("k1", 1.0)] {
        let s = Symbol::parse(text, 2, alpha)?;
        let rep = check_ellipticity(&s, &xs, &grid)?;
        print!("{text:<36} alpha = {alpha}: elliptic = {}", rep.elliptic);
        match (rep.c1, rep.c2, &rep.witness) {
            (Some(c1), Some(c2), None) => println!(", c1 = {c1:.4}, c2 = {c2:.4}"),
            (_, _, Some(w)) => println!(", witness x = {:?}, xi = {:?}", w.x, w.xi),
            _ => println!(),
        }
    }

    let s = Symbol::parse("(1 + abs2(k))^(3/2)", 2, 3.0)?;
    let fitted = fit_order(&s, &[0.0, 0.0], &[0.6, 0.8], &geometric_radii(1e2, 1e5, 12))?;
    println!("fitted order of (1+|xi|^2)^(3/2): {fitted:.4}");
    Ok(())
}
