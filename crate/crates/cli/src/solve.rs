use sparsedisc::small_sets::SmallSetsConfig;
use sparsedisc::{
    lll_threshold, solve_all_sets, solve_big_sets, solve_small_sets, write_coloring,
    CoverageInstance, Scalar, Solution, SolveReport,
};

use crate::io::{emit, load_instance, table, to_json};
use crate::{Algo, Failure, Precision, SolveArgs};

/// `big` when every set reaches `s_big`, `small` when every set has at most
/// `s` items, `all` otherwise.
pub fn pick(inst: &CoverageInstance, k: usize, s: Option<usize>) -> Algo {
    let s_big = lll_threshold(inst.t(), k).ok();
    if s_big.is_some_and(|b| inst.min_set_size() >= b) {
        return Algo::Big;
    }
    if inst.max_set_size() <= s.unwrap_or_else(|| inst.max_set_size()) {
        Algo::Small
    } else {
        Algo::All
    }
}

fn solve_with<T: Scalar>(
    inst: &CoverageInstance,
    algo: Algo,
    k: usize,
    seed: u64,
    s: Option<usize>,
    retries: Option<usize>,
) -> Result<Solution, Failure> {
    Ok(match algo {
        Algo::Small => {
            let mut cfg = SmallSetsConfig::new(k, seed);
            cfg.max_set_size = s;
            if let Some(r) = retries {
                cfg.retry_limit = r;
            }
            solve_small_sets::<T>(inst, &cfg)?
        }
        Algo::Big => solve_big_sets(inst, k, seed)?,
        Algo::All => solve_all_sets::<T>(inst, k, seed, retries.unwrap_or(20))?,
        Algo::Auto => unreachable!("resolved by pick"),
    })
}

pub fn solve(
    inst: &CoverageInstance,
    algo: Algo,
    k: usize,
    seed: u64,
    s: Option<usize>,
    retries: Option<usize>,
    precision: Precision,
) -> Result<Solution, Failure> {
    let algo = match algo {
        Algo::Auto => pick(inst, k, s),
        a => a,
    };
    match precision {
        Precision::F64 => solve_with::<f64>(inst, algo, k, seed, s, retries),
        Precision::F32 => solve_with::<f32>(inst, algo, k, seed, s, retries),
    }
}

fn pretty(report: &SolveReport) -> String {
    let mut rows = vec![
        ("algorithm".to_string(), report.algorithm.name().to_string()),
        (
            "n, m, t, k".into(),
            format!("{}, {}, {}, {}", report.n, report.m, report.t, report.k),
        ),
        ("seed".into(), report.seed.to_string()),
        ("discrepancy".into(), report.discrepancy.to_string()),
        (
            "witness".into(),
            format!(
                "function {}, colors {} and {}",
                report.witness.function, report.witness.color_a, report.witness.color_b
            ),
        ),
        ("bound".into(), format!("{:.3}", report.bound)),
        ("certified".into(), report.certified.to_string()),
        ("retries".into(), report.retries.to_string()),
    ];
    if let Some(s) = &report.small_sets {
        rows.push(("fractional rows".into(), s.fractional_rows.to_string()));
        rows.push((
            "worst-case bound".into(),
            format!("{:.3}", s.worst_case_bound),
        ));
    }
    if let Some(b) = &report.big_sets {
        rows.push(("s_big".into(), b.s_big.to_string()));
        rows.push(("resamples".into(), b.resamples.to_string()));
    }
    if let Some(a) = &report.all_sets {
        rows.push(("s_split".into(), a.s_split.to_string()));
        rows.push(("batches".into(), a.batches.to_string()));
        rows.push((
            "small-set discrepancy".into(),
            a.small_discrepancy.to_string(),
        ));
        rows.push(("big sets rainbow".into(), a.big_sets_rainbow.to_string()));
    }
    table(&rows)
}

pub fn run(args: SolveArgs) -> Result<(), Failure> {
    let inst = load_instance(&args.input)?;
    let sol = solve(
        &inst,
        args.algo,
        args.k,
        args.seed,
        args.s,
        args.retries,
        args.precision,
    )?;
    if let Some(out) = &args.out {
        emit(Some(out), &write_coloring(&sol.coloring))?;
    }
    let json = to_json(&sol.report);
    if let Some(path) = &args.report {
        emit(Some(path), &json)?;
    }
    if args.pretty {
        print!("{}", pretty(&sol.report));
    } else if args.report.is_none() {
        print!("{json}");
    }
    if !sol.report.certified {
        return Err(Failure(format!(
            "no certified coloring after {} attempts (best discrepancy {})",
            sol.report.attempts, sol.report.discrepancy
        )));
    }
    Ok(())
}
