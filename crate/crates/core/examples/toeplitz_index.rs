//! Kernel and cokernel dimensions of finite Toeplitz sections against the
//! winding number of the symbol, for single symbols and a direct sum.
use opsymbol::factorization::{laurent_winding, LaurentPoly};
use opsymbol::lab::{aggregate_index, numerical_index, numerical_index_block, DEFAULT_RANK_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let shift = LaurentPoly::from_real(1, &[1.0]);
    let back = LaurentPoly::from_real(-2, &[1.0, 0.0, 0.3]);
    let zero_wind = LaurentPoly::from_real(0, &[2.0, 0.5]);
    for (name, a) in [("z", &shift), ("z^-2 + 0.3", &back), ("2 + 0.5 z", &zero_wind)] {
        let e = numerical_index(a, 64, DEFAULT_RANK_TOL, 0)?;
        println!(
            "{name:<12} winding {:+}  dim ker {}  dim coker {}  index {:+}",
            laurent_winding(a)?,
            e.dim_ker,
            e.dim_coker,
            e.index
        );
    }

    let parts = [shift, back, zero_wind];
    let per = parts
        .iter()
        .enumerate()
        .map(|(k, a)| numerical_index(a, 64, DEFAULT_RANK_TOL, k))
        .collect::<Result<Vec<_>, _>>()?;
    let sum = aggregate_index(&per)?;
    let block = numerical_index_block(&parts, 64, DEFAULT_RANK_TOL, 0)?;
    println!("direct sum: aggregated index {:+}, block index {:+}", sum.total, block.index);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3 {
        let a = LaurentPoly::random_elliptic(&mut rng);
        let e = numerical_index(&a, 128, DEFAULT_RANK_TOL, 0)?;
        println!("random degree-{} symbol: index {:+} = -winding {:+}", a.coeffs.len() - 1, e.index, -laurent_winding(&a)?);
    }
    Ok(())
}
