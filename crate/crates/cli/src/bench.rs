use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rayon::prelude::*;
use sparsedisc::instance::gen_random;
use sparsedisc::{lll_threshold, CoverageInstance};

use crate::io::emit;
use crate::solve::solve;
use crate::{Algo, Failure, Precision};

pub const HEADER: &str = "algo,n,m,t,k,seed,status,discrepancy,bound,ratio,retries,millis";

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "small")]
    algo: Vec<Algo>,
    #[arg(long, value_delimiter = ',', default_value = "100")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    t: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    k: Vec<usize>,
    /// Runs per grid cell.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[arg(long, default_value_t = 1)]
    size_min: usize,
    #[arg(long, default_value_t = 4)]
    size_max: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write 0 in the millis column so the output is reproducible.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy)]
struct Cell {
    algo: Algo,
    n: usize,
    m: usize,
    t: usize,
    k: usize,
    rep: usize,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one cell, independent of scheduling order.
fn cell_seed(base: u64, cell: &Cell) -> u64 {
    [
        cell.algo as u64,
        cell.n as u64,
        cell.m as u64,
        cell.t as u64,
        cell.k as u64,
        cell.rep as u64,
    ]
    .into_iter()
    .fold(splitmix(base), |h, v| splitmix(h ^ v))
}

fn instance(cell: &Cell, args: &BenchArgs, seed: u64) -> Result<CoverageInstance, Failure> {
    let range = match cell.algo {
        Algo::Big => {
            let s = lll_threshold(cell.t, cell.k)?;
            (s, s + args.size_max.saturating_sub(args.size_min))
        }
        _ => (args.size_min, args.size_max),
    };
    Ok(gen_random(cell.n, cell.m, cell.t, range, seed)?)
}

fn run_cell(cell: &Cell, args: &BenchArgs) -> String {
    let seed = cell_seed(args.seed_base, cell);
    let start = Instant::now();
    let outcome = instance(cell, args, seed)
        .and_then(|inst| solve(&inst, cell.algo, cell.k, seed, None, None, Precision::F64));
    let millis = if args.no_timing {
        0
    } else {
        start.elapsed().as_millis()
    };
    let algo = format!("{:?}", cell.algo).to_lowercase();
    let mut row = format!("{algo},{},{},{},{},{seed},", cell.n, cell.m, cell.t, cell.k);
    match outcome {
        Ok(sol) => {
            let r = &sol.report;
            let status = if r.certified { "ok" } else { "uncertified" };
            let _ = write!(
                row,
                "{status},{},{:.6},{:.6},{},{millis}",
                r.discrepancy,
                r.bound,
                r.ratio(),
                r.retries
            );
        }
        Err(_) => {
            let _ = write!(row, "error,,,,,{millis}");
        }
    }
    row
}

pub fn run(args: BenchArgs) -> Result<(), Failure> {
    let mut cells = Vec::new();
    for &algo in &args.algo {
        for &n in &args.n {
            for &m in &args.m {
                for &t in &args.t {
                    for &k in &args.k {
                        for rep in 0..args.seeds {
                            cells.push(Cell {
                                algo,
                                n,
                                m,
                                t,
                                k,
                                rep,
                            });
                        }
                    }
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()?;
    let rows: Vec<String> = pool.install(|| cells.par_iter().map(|c| run_cell(c, &args)).collect());
    let mut csv = String::from(HEADER);
    csv.push('\n');
    for row in rows {
        csv.push_str(&row);
        csv.push('\n');
    }
    emit(args.out.as_deref(), &csv)
}
