//! Parse a symbol, evaluate it at real and complex frequencies, and print
//! the canonical form that re-parses to the same tree.
use num_complex::Complex64;
use opsymbol::dsl::{parse_symbol, EvalPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let expr = parse_symbol("(1 + normx2(x)) * (1 + abs2(k))^(1/2) + i*k1", 2)?;
    println!("canonical: {}", expr);

    let real = expr.eval_real(&[0.5, 0.25], &[3.0, 4.0])?;
    println!("A(x, xi) at x = (0.5, 0.25), xi = (3, 4): {real}");

    let p = EvalPoint::new(vec![0.0, 0.0], vec![Complex64::new(1.0, 0.5), Complex64::new(0.0, -2.0)]);
    println!("A at a complex frequency: {}", expr.eval(&p)?);

    let reparsed = parse_symbol(&expr.to_string(), 2)?;
    println!("round trip preserves the tree: {}", reparsed == expr);

    match parse_symbol("k3 + 1", 2) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("rejected as expected: {e}"),
    }
    Ok(())
}
