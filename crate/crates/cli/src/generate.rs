use std::path::PathBuf;

use clap::{Args, Subcommand};
use sparsedisc::instance::{
    gen_random, gen_random_beck_fiala, gen_random_edge_coverage, gen_random_partitions,
};
use sparsedisc::write_instance;

use crate::io::emit;
use crate::Failure;

#[derive(Subcommand)]
pub enum Kind {
    /// Hypergraph with bounded vertex degree, one function per edge.
    BeckFiala(SizedArgs),
    /// Partition matroid ranks.
    Partition(PartitionArgs),
    /// Edge coverage of random simple graphs.
    EdgeCover(EdgeArgs),
    /// Random t-sparse family.
    Random(SizedArgs),
}

#[derive(Args)]
pub struct SizedArgs {
    #[arg(long)]
    n: usize,
    /// Functions (for beck-fiala: maximum number of hyperedges).
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 1)]
    size_min: usize,
    #[arg(long, default_value_t = 4)]
    size_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PartitionArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    blocks: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EdgeArgs {
    /// Items, i.e. edges per graph.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    vertices: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(kind: Kind) -> Result<(), Failure> {
    let (inst, out) = match kind {
        Kind::BeckFiala(a) => (
            gen_random_beck_fiala(a.n, a.m, a.t, (a.size_min, a.size_max), a.seed)?,
            a.out,
        ),
        Kind::Random(a) => (
            gen_random(a.n, a.m, a.t, (a.size_min, a.size_max), a.seed)?,
            a.out,
        ),
        Kind::Partition(a) => (gen_random_partitions(a.n, a.blocks, a.m, a.seed)?, a.out),
        Kind::EdgeCover(a) => (
            gen_random_edge_coverage(a.n, a.vertices, a.m, a.seed)?,
            a.out,
        ),
    };
    emit(out.as_deref(), &write_instance(&inst))
}
