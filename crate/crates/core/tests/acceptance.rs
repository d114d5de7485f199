//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the report reads top to bottom; exits non-zero on any failure.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use opsymbol::dsl::SymbolExpr;
use opsymbol::factorization::{
    check_fredholm_condition, factorize_stratification, laurent_winding, validate_wave_factors, winding_report,
    FactorizationOptions, LaurentPoly, WaveFactorCandidate, WaveOptions, WindingOptions,
};
use opsymbol::geometry::{build_covering, dual_cone, partition_of_unity, stratify, stratify_model, Cone, Model};
use opsymbol::lab::{
    aggregate_index, assemble_operator, assembly_convergence, assembly_grid, discretize_symbol_op, domain_partition,
    in_unit_box, locality_defect, numerical_index, numerical_index_block, paired_equivalence_suite,
    separation_ladder, torus_bump, DiscreteOperator, DiscreteSobolevSpace, PatchFamily, DEFAULT_RANK_TOL,
};
use opsymbol::lattice::LatticeGrid;
use opsymbol::symbol::Symbol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn require(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, t0: Instant) -> Result<(), String> {
    let el = t0.elapsed();
    require(el < limit, format!("took {:.2} s, limit {} s", el.as_secs_f64(), limit.as_secs()))
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn toeplitz_index() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let opts = WindingOptions::default();
    let mut windings = Vec::new();
    for i in 0..20 {
        let a = LaurentPoly::random_elliptic(&mut rng);
        require(a.coeffs.len() <= 5, format!("symbol {i} has degree {}", a.coeffs.len() - 1))?;
        let lw = laurent_winding(&a).map_err(s)?;
        // ranks compared at 128 and 256
        let idx = numerical_index(&a, 128, DEFAULT_RANK_TOL, 0).map_err(s)?;
        require(idx.index == -lw, format!("symbol {i}: index {} but winding {lw}", idx.index))?;
        let lifted = Symbol::new(a.lift_to_line().map_err(s)?, 0.0).map_err(s)?;
        let quad = winding_report(&lifted, &[0.0], &[], &opts).map_err(s)?.winding;
        require(quad.round() as i64 == lw && (quad - lw as f64).abs() < 1e-6, format!("symbol {i}: quadrature {quad}, roots {lw}"))?;
        windings.push(lw);
    }
    within(Duration::from_secs(10), t0)?;
    Ok(format!("20 symbols, windings {windings:?}, {:.2} s", t0.elapsed().as_secs_f64()))
}

fn index_additivity() -> Outcome {
    let t0 = Instant::now();
    let triple = |parts: &[LaurentPoly]| -> Result<(i64, i64, i64), String> {
        let per = parts
            .iter()
            .enumerate()
            .map(|(k, p)| numerical_index(p, 64, DEFAULT_RANK_TOL, k))
            .collect::<Result<Vec<_>, _>>()
            .map_err(s)?;
        let agg = aggregate_index(&per).map_err(s)?.total;
        let block = numerical_index_block(parts, 64, DEFAULT_RANK_TOL, 0).map_err(s)?.index;
        let w: i64 = parts.iter().map(laurent_winding).collect::<Result<Vec<_>, _>>().map_err(s)?.iter().sum();
        Ok((agg, block, -w))
    };
    let fixed = [
        LaurentPoly::from_real(0, &[-0.3, 1.0]),
        LaurentPoly::from_real(-2, &[1.0, 0.0, 0.2]),
        LaurentPoly::from_real(0, &[2.0, 0.5]),
    ];
    let (agg, block, _) = triple(&fixed)?;
    require(agg == 1 && block == 1, format!("windings (1, -2, 0): aggregated {agg}, block {block}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..10 {
        let parts: Vec<LaurentPoly> = (0..3).map(|_| LaurentPoly::random_elliptic(&mut rng)).collect();
        let (agg, block, expected) = triple(&parts)?;
        require(agg == block && agg == expected, format!("triple {i}: {agg}, {block}, expected {expected}"))?;
    }
    within(Duration::from_secs(5), t0)?;
    Ok(format!("fixed triple index +1, 10 random triples agree, {:.2} s", t0.elapsed().as_secs_f64()))
}

fn paired_equivalence() -> Outcome {
    let t0 = Instant::now();
    let cases = paired_equivalence_suite(17, 100, 50);
    let decided: Vec<_> = cases.iter().filter(|c| !c.borderline()).collect();
    require(decided.iter().all(|c| c.agrees()), "a non-borderline case disagrees")?;
    within(Duration::from_secs(5), t0)?;
    Ok(format!("{} of 100 decided, all agree, {:.2} s", decided.len(), t0.elapsed().as_secs_f64()))
}

fn wave_factor() -> Outcome {
    let t0 = Instant::now();
    let sym = Symbol::parse("(k1 + i)*(k2 + i)", 2, 2.0).map_err(s)?;
    let cand = WaveFactorCandidate::new(
        SymbolExpr::parse("(k1 + i)*(k2 + i)", 2).map_err(s)?,
        SymbolExpr::parse("1", 2).map_err(s)?,
        Cone::first_orthant(2).map_err(s)?,
        0,
        2.0,
    )
    .map_err(s)?;
    let v = validate_wave_factors(&sym, &[0.0, 0.0], &cand, &WaveOptions::default()).map_err(s)?;
    require(v.product.max_rel_error < 1e-10, format!("product error {}", v.product.max_rel_error))?;
    let neq: Vec<f64> = v.growth.fits.iter().filter(|f| f.factor == "a_neq").map(|f| f.slope).collect();
    require(neq.len() == 3 && neq.iter().all(|sl| (sl - 2.0).abs() <= 0.1), format!("a_neq slopes {neq:?}"))?;
    require(v.support.grid_points == 256, format!("support grid {}", v.support.grid_points))?;
    let leak = v.support.factors.iter().map(|f| f.leaked_fraction).fold(0.0, f64::max);
    require(leak < 1e-6, format!("leaked mass {leak:e}"))?;
    require(v.passed(), "validation did not pass")?;
    within(Duration::from_secs(5), t0)?;
    Ok(format!("slopes {neq:.3?}, leak {leak:.1e}, {:.2} s", t0.elapsed().as_secs_f64()))
}

fn fredholm_criterion() -> Outcome {
    let sym = Symbol::parse("(1 + abs2(k))^(1/2)", 2, 1.0).map_err(s)?;
    let sym3 = Symbol::parse("(1 + abs2(k))^(1/2)", 3, 1.0).map_err(s)?;
    let opts = FactorizationOptions::default();
    let mut lines = Vec::new();
    for (model, sy) in [(Model::Square, &sym), (Model::Cube, &sym3)] {
        let strat = stratify(model);
        let reports = factorize_stratification(sy, &strat, &opts, &BTreeMap::new()).map_err(s)?;
        for (s_order, pass, margin) in [(0.5, true, 0.5), (1.1, false, -0.1)] {
            let v = check_fredholm_condition(&strat, &reports, s_order, true).map_err(s)?;
            require(v.fredholm == pass, format!("{model}, s = {s_order}: fredholm = {}", v.fredholm))?;
            for st in &v.strata {
                require(
                    st.condition_met == pass && (st.margin - margin).abs() <= 1e-9,
                    format!("{model}, s = {s_order}, {}: margin {}", st.stratum, st.margin),
                )?;
            }
            lines.push(format!("{model} s={s_order}: {} strata", v.strata.len()));
        }
    }
    Ok(lines.join(", "))
}

fn cube_strata() -> Outcome {
    let counts = stratify(Model::Cube).counts_top_down();
    require(counts == vec![1, 6, 12, 8], format!("counts {counts:?}"))?;
    Ok(format!("counts {counts:?}"))
}

fn assembly() -> Outcome {
    let t0 = Instant::now();
    let strat = stratify_model("square", 2).map_err(s)?;
    let grid = assembly_grid(2, 16).map_err(s)?;
    let pou = domain_partition(&strat, 0.3, &grid).map_err(s)?;
    let sp = DiscreteSobolevSpace::lattice(grid.clone(), 0.0);
    let fam: PatchFamily = pou.centers.iter().map(|c| (c.clone(), DiscreteOperator::identity(&sp))).collect();
    let a = assemble_operator(&fam, &pou).map_err(s)?.to_dense();
    let inside: Vec<usize> = grid.points().enumerate().filter(|(_, p)| in_unit_box(p)).map(|(i, _)| i).collect();
    let a = a.select_rows(&inside).select_columns(&inside);
    let err = (a - DMatrix::<Complex64>::identity(inside.len(), inside.len())).camax();
    require(err < 1e-12, format!("identity family error {err:e}"))?;

    let sym = Symbol::parse("(1 + normx2(x))*(1 + abs2(k))^(1/2)", 2, 1.0).map_err(s)?;
    let grid = assembly_grid(2, 64).map_err(s)?;
    let table = assembly_convergence(&sym, &strat, &[0.4, 0.2, 0.1], &grid, 0.0).map_err(s)?;
    let v = table.values();
    let ok = v.windows(2).all(|w| w[1] <= 1.5 * w[0]) && v[v.len() - 1] <= v[0] / 2.0;
    require(ok && table.decreasing, format!("proxies {v:?}"))?;
    within(Duration::from_secs(60), t0)?;
    Ok(format!("identity error {err:.1e}, proxies {v:.4?} at N = 64, {:.2} s", t0.elapsed().as_secs_f64()))
}

fn locality() -> Outcome {
    let grid = LatticeGrid::new(1, 256, 0.1).map_err(s)?;
    let sp = DiscreteSobolevSpace::lattice(grid.clone(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let values: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mult = DiscreteOperator::multiplication(&values, &sp).map_err(s)?;
    let d = locality_defect(&mult, &torus_bump(&grid, &[5.0], 1.0), &torus_bump(&grid, &[9.0], 1.0)).map_err(s)?;
    require(d == 0.0, format!("multiplication defect {d:e}"))?;
    let sym = Symbol::parse("(1 + abs2(k))^(-1/2)", 1, -1.0).map_err(s)?;
    let smooth = discretize_symbol_op(&sym, &[0.0], &sp, &sp.with_order(1.0)).map_err(s)?;
    let ladder = separation_ladder(&smooth, 1.0, &[0.5, 1.0, 1.5, 2.0, 2.5]).map_err(s)?;
    let defects: Vec<f64> = ladder.iter().map(|l| l.defect).collect();
    require(defects.len() == 5 && defects.windows(2).all(|w| w[1] < w[0]), format!("ladder {defects:?}"))?;
    let shown: Vec<String> = defects.iter().map(|d| format!("{d:.2e}")).collect();
    Ok(format!("multiplication defect 0, ladder [{}]", shown.join(", ")))
}

fn partition_of_unity_check() -> Outcome {
    let strat = stratify(Model::Square);
    let mut worst = 0.0f64;
    for eps in [0.3, 0.15] {
        let cov = build_covering(&strat, eps).map_err(s)?;
        let grid = LatticeGrid::new(2, 32, 1.0 / 32.0).map_err(s)?;
        let pou = partition_of_unity(&cov, &grid).map_err(s)?;
        for p in 0..grid.len() {
            let sum: f64 = pou.f.iter().map(|f| f[p]).sum();
            worst = worst.max((sum - 1.0).abs());
        }
        for (f, g) in pou.f.iter().zip(&pou.g) {
            for p in 0..grid.len() {
                require(g[p] * f[p] == f[p], format!("eps {eps}: g f != f at point {p}"))?;
                require(!(f[p] != 0.0 && g[p] != 1.0), format!("eps {eps}: supp f meets supp (1 - g) at point {p}"))?;
            }
        }
    }
    require(worst <= 1e-12, format!("max |sum f - 1| = {worst:e}"))?;
    Ok(format!("max |sum f - 1| = {worst:.1e}"))
}

fn dual_cones() -> Outcome {
    for (name, c) in [
        ("quadrant", Cone::first_orthant(2).map_err(s)?),
        ("octant", Cone::first_orthant(3).map_err(s)?),
        ("{(1,0),(1,1)}", Cone::new(2, vec![vec![1, 0], vec![1, 1]]).map_err(s)?),
    ] {
        let dd = dual_cone(&dual_cone(&c).map_err(s)?).map_err(s)?;
        require(dd.same_cone(&c), format!("{name}: double dual differs"))?;
    }
    for m in 2..=4 {
        let c = Cone::first_orthant(m).map_err(s)?;
        let mut d: Vec<Vec<i64>> = dual_cone(&c).map_err(s)?.generators().to_vec();
        let mut g = c.generators().to_vec();
        d.sort();
        g.sort();
        require(d == g, format!("orthant in dimension {m} is not self-dual: {d:?}"))?;
    }
    Ok("double duals agree; orthants self-dual in dimensions 2 to 4".into())
}

fn main() -> ExitCode {
    type Check = (&'static str, fn() -> Outcome);
    let criteria: [Check; 10] = [
        ("Toeplitz index equals minus the winding", toeplitz_index),
        ("index additivity over direct sums", index_additivity),
        ("paired equation equivalence", paired_equivalence),
        ("quadrant wave factorization", wave_factor),
        ("Fredholm criterion on square and cube", fredholm_criterion),
        ("cube stratification (1, 6, 12, 8)", cube_strata),
        ("assembly convergence", assembly),
        ("locality defects", locality),
        ("partition of unity", partition_of_unity_check),
        ("dual cones", dual_cones),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
