use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::factorization::{winding_report, WindingOptions};
use crate::geometry::stratify_model;
use crate::lab::{
    aggregate_index, assemble_operator, assembly_convergence, assembly_grid, discretize_symbol_op, domain_partition, in_unit_box,
    locality_defect, numerical_index, numerical_index_block, paired_equivalence_suite, separation_ladder, torus_bump,
    DiscreteOperator, DiscreteSobolevSpace, LabError, PatchFamily, DEFAULT_RANK_TOL,
};
use crate::lattice::LatticeGrid;
use crate::laurent::{laurent_winding, LaurentPoly};
use crate::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Toeplitz,
    Additivity,
    Paired,
    Assembly,
    Locality,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Toeplitz, Suite::Additivity, Suite::Paired, Suite::Assembly, Suite::Locality];
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "toeplitz" => Ok(Suite::Toeplitz),
            "additivity" => Ok(Suite::Additivity),
            "paired" => Ok(Suite::Paired),
            "assembly" => Ok(Suite::Assembly),
            "locality" => Ok(Suite::Locality),
            other => Err(format!("unknown suite `{other}`")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Toeplitz => "toeplitz",
            Suite::Additivity => "additivity",
            Suite::Paired => "paired",
            Suite::Assembly => "assembly",
            Suite::Locality => "locality",
        })
    }
}

/// One case; `detail` echoes the inputs needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: String,
    pub passed: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: Vec<CaseResult>,
    pub passed: usize,
    pub failed: usize,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64, cases: Vec<CaseResult>) -> Self {
        let passed = cases.iter().filter(|c| c.passed).count();
        SuiteReport {
            suite,
            seed,
            failed: cases.len() - passed,
            passed,
            cases,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn case(name: impl Into<String>, outcome: Result<(bool, serde_json::Value), String>, inputs: serde_json::Value) -> CaseResult {
    let case = name.into();
    match outcome {
        Ok((passed, mut detail)) => {
            if let (Some(d), Some(i)) = (detail.as_object_mut(), inputs.as_object()) {
                d.extend(i.clone());
            }
            CaseResult { case, passed, detail }
        }
        Err(error) => CaseResult {
            case,
            passed: false,
            detail: json!({ "error": error, "inputs": inputs }),
        },
    }
}

fn poly_json(p: &LaurentPoly) -> serde_json::Value {
    json!({ "lo": p.lo, "coeffs": p.coeffs.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>() })
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let cases = match suite {
        Suite::Toeplitz => toeplitz_cases(seed),
        Suite::Additivity => additivity_cases(seed),
        Suite::Paired => paired_cases(seed),
        Suite::Assembly => assembly_cases(),
        Suite::Locality => locality_cases(seed),
    };
    SuiteReport::new(suite, seed, cases)
}

/// Section size of the Toeplitz suite; ranks are compared at `N` and `2N = 256`.
const TOEPLITZ_N: usize = 128;

fn toeplitz_cases(seed: u64) -> Vec<CaseResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = WindingOptions::default();
    (0..20)
        .map(|i| {
            let p = LaurentPoly::random_elliptic(&mut rng);
            let outcome = (|| {
                let lw = laurent_winding(&p).map_err(|e| e.to_string())?;
                let idx = numerical_index(&p, TOEPLITZ_N, DEFAULT_RANK_TOL, 0).map_err(|e| e.to_string())?;
                let lifted = Symbol::new(p.lift_to_line().map_err(|e| e.to_string())?, 0.0).map_err(|e| e.to_string())?;
                let quad = winding_report(&lifted, &[0.0], &[], &opts).map_err(|e| e.to_string())?.winding;
                let passed = idx.index == -lw && (quad - lw as f64).abs() < 1e-6;
                Ok((passed, json!({ "laurent_winding": lw, "quadrature_winding": quad, "index": idx.index, "dim_ker": idx.dim_ker, "dim_coker": idx.dim_coker })))
            })();
            case(format!("random symbol {i}"), outcome, json!({ "symbol": poly_json(&p), "n": TOEPLITZ_N }))
        })
        .collect()
}

fn additivity_case(name: String, parts: &[LaurentPoly], n: usize) -> CaseResult {
    let outcome = (|| {
        let per = parts
            .iter()
            .enumerate()
            .map(|(k, p)| numerical_index(p, n, DEFAULT_RANK_TOL, k))
            .collect::<Result<Vec<_>, LabError>>()
            .map_err(|e| e.to_string())?;
        let agg = aggregate_index(&per).map_err(|e| e.to_string())?;
        let block = numerical_index_block(parts, n, DEFAULT_RANK_TOL, 0).map_err(|e| e.to_string())?;
        let windings = parts.iter().map(laurent_winding).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        let expected: i64 = -windings.iter().sum::<i64>();
        let passed = agg.total == block.index && agg.total == expected;
        Ok((passed, json!({ "windings": windings, "component_indices": per.iter().map(|e| e.index).collect::<Vec<_>>(), "aggregated": agg.total, "block": block.index })))
    })();
    case(name, outcome, json!({ "symbols": parts.iter().map(poly_json).collect::<Vec<_>>(), "n": n }))
}

const ADDITIVITY_N: usize = 64;

fn additivity_cases(seed: u64) -> Vec<CaseResult> {
    let fixed = [
        LaurentPoly::from_real(0, &[-0.3, 1.0]),
        LaurentPoly::from_real(-2, &[1.0, 0.0, 0.2]),
        LaurentPoly::from_real(0, &[2.0, 0.5]),
    ];
    let mut out = vec![additivity_case("windings (1, -2, 0)".into(), &fixed, ADDITIVITY_N)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..10 {
        let parts: Vec<LaurentPoly> = (0..3).map(|_| LaurentPoly::random_elliptic(&mut rng)).collect();
        out.push(additivity_case(format!("random triple {i}"), &parts, ADDITIVITY_N));
    }
    out
}

fn paired_cases(seed: u64) -> Vec<CaseResult> {
    paired_equivalence_suite(seed, 100, 50)
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let passed = c.borderline() || c.agrees();
            CaseResult {
                case: format!("system {i}"),
                passed,
                detail: json!({ "seed": seed, "position": i, "borderline": c.borderline(), "case": c }),
            }
        })
        .collect()
}

const ASSEMBLY_SYMBOL: &str = "(1 + normx2(x))*(1 + abs2(k))^(1/2)";

fn assembly_cases() -> Vec<CaseResult> {
    let mut out = Vec::new();
    let identity = (|| {
        let strat = stratify_model("square", 2).map_err(|e| e.to_string())?;
        let grid = assembly_grid(2, 16).map_err(|e| e.to_string())?;
        let pou = domain_partition(&strat, 0.3, &grid).map_err(|e| e.to_string())?;
        let sp = DiscreteSobolevSpace::lattice(grid.clone(), 0.0);
        let fam: PatchFamily = pou.centers.iter().map(|c| (c.clone(), DiscreteOperator::identity(&sp))).collect();
        let a = assemble_operator(&fam, &pou).map_err(|e| e.to_string())?.to_dense();
        let inside: Vec<usize> = grid.points().enumerate().filter(|(_, p)| in_unit_box(p)).map(|(i, _)| i).collect();
        let a = a.select_rows(&inside).select_columns(&inside);
        let err = (a - DMatrix::<Complex64>::identity(inside.len(), inside.len())).camax();
        Ok((err < 1e-12, json!({ "max_abs_error": err })))
    })();
    out.push(case("identity family on the unit box", identity, json!({ "model": "square", "eps": 0.3, "grid_n": 16 })));
    for n in [32usize, 64] {
        let table = (|| {
            let s = Symbol::parse(ASSEMBLY_SYMBOL, 2, 1.0).map_err(|e| e.to_string())?;
            let strat = stratify_model("square", 2).map_err(|e| e.to_string())?;
            let grid = assembly_grid(2, n).map_err(|e| e.to_string())?;
            let t = assembly_convergence(&s, &strat, &[0.4, 0.2, 0.1], &grid, 0.0).map_err(|e| e.to_string())?;
            Ok((t.decreasing, json!({ "proxy": t.values() })))
        })();
        out.push(case(
            format!("decrease at N = {n}"),
            table,
            json!({ "symbol": ASSEMBLY_SYMBOL, "eps": [0.4, 0.2, 0.1], "grid_n": n }),
        ));
    }
    out
}

fn locality_cases(seed: u64) -> Vec<CaseResult> {
    let mut out = Vec::new();
    let line = (|| {
        let grid = LatticeGrid::new(1, 256, 0.1)?;
        Ok::<_, LabError>(DiscreteSobolevSpace::lattice(grid, 0.0))
    })();
    let sp = match line {
        Ok(sp) => sp,
        Err(e) => return vec![case("lattice", Err(e.to_string()), json!({}))],
    };
    let grid = sp.grid().expect("lattice space").clone();
    let f = torus_bump(&grid, &[5.0], 1.0);
    let g = torus_bump(&grid, &[9.0], 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mult = (|| {
        let op = DiscreteOperator::multiplication(&values, &sp).map_err(|e| e.to_string())?;
        let d = locality_defect(&op, &f, &g).map_err(|e| e.to_string())?;
        Ok((d == 0.0, json!({ "defect": d })))
    })();
    out.push(case("random multiplication, disjoint supports", mult, json!({ "seed": seed, "f_center": 5.0, "g_center": 9.0, "width": 1.0 })));
    let overlap = match locality_defect(&DiscreteOperator::identity(&sp), &f, &torus_bump(&grid, &[6.5], 1.0)) {
        Err(LabError::SupportOverlap { separation, required }) => Ok((true, json!({ "separation": separation, "required": required }))),
        Ok(d) => Ok((false, json!({ "unexpected_defect": d }))),
        Err(e) => Err(e.to_string()),
    };
    out.push(case("overlapping supports rejected", overlap, json!({ "f_center": 5.0, "g_center": 6.5 })));
    let ladder = (|| {
        let s = Symbol::parse("(1 + abs2(k))^(-1/2)", 1, -1.0).map_err(|e| e.to_string())?;
        let op = discretize_symbol_op(&s, &[0.0], &sp, &sp.with_order(1.0)).map_err(|e| e.to_string())?;
        let steps = separation_ladder(&op, 1.0, &[0.5, 1.0, 1.5, 2.0, 2.5]).map_err(|e| e.to_string())?;
        let passed = steps.windows(2).all(|w| w[1].defect < w[0].defect) && steps[0].defect > 0.0;
        Ok((passed, json!({ "ladder": steps })))
    })();
    out.push(case("smooth multiplier ladder", ladder, json!({ "symbol": "(1 + abs2(k))^(-1/2)", "separations": [0.5, 1.0, 1.5, 2.0, 2.5] })));
    out
}
