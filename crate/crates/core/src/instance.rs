//! Sparse coverage-function instances: data model, validation, generators
//! and the JSON file format.
//!
//! A coverage function is given in its dual form: a list of sets `S ⊆ [n]`,
//! one per universe element, listing the items that cover that element.
//! Then `f(T) = Σ_S min{|S ∩ T|, 1}`. The sparsity `t` of a family is the
//! largest number of sets (across all functions) any single item belongs to.

use std::fmt;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::big_sets::lll_threshold;

/// One coverage function, stored as its collection of dual sets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverageFunction {
    sets: Vec<Vec<usize>>,
}

impl CoverageFunction {
    pub fn new(sets: Vec<Vec<usize>>) -> Self {
        Self { sets }
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    fn canonicalize(&mut self) {
        for set in &mut self.sets {
            set.sort_unstable();
            set.dedup();
        }
    }
}

/// Optional provenance carried through the file format.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InstanceMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

/// A family of `m` coverage functions over items `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageInstance {
    n: usize,
    functions: Vec<CoverageFunction>,
    t: usize,
    meta: Option<InstanceMeta>,
}

/// A single broken invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoItems,
    NoFunctions,
    EmptySet {
        function: usize,
        set: usize,
    },
    DuplicateElement {
        function: usize,
        set: usize,
        item: usize,
    },
    IndexOutOfRange {
        function: usize,
        set: usize,
        item: usize,
    },
    UnsortedSet {
        function: usize,
        set: usize,
    },
    SparsityMismatch {
        cached: usize,
        actual: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoItems => write!(f, "instance has no items (n = 0)"),
            Violation::NoFunctions => write!(f, "instance has no functions (m = 0)"),
            Violation::EmptySet { function, set } => {
                write!(f, "empty set (function {function}, set {set})")
            }
            Violation::DuplicateElement {
                function,
                set,
                item,
            } => write!(
                f,
                "duplicate element in set (function {function}, set {set}, item {item})"
            ),
            Violation::IndexOutOfRange {
                function,
                set,
                item,
            } => write!(
                f,
                "index out of range (function {function}, set {set}, item {item})"
            ),
            Violation::UnsortedSet { function, set } => {
                write!(f, "unsorted set (function {function}, set {set})")
            }
            Violation::SparsityMismatch { cached, actual } => {
                write!(
                    f,
                    "cached sparsity {cached} differs from recomputed {actual}"
                )
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid instance: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("hyperedge {0} is empty")]
    EmptyHyperedge(usize),
    #[error("partition blocks overlap at item {0}")]
    OverlappingBlocks(usize),
    #[error("partition does not cover item {0}")]
    UncoveredItem(usize),
    #[error("graph is not simple: {0}")]
    NotSimple(String),
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
    #[error("instances have different item counts ({0} vs {1})")]
    MismatchedItems(usize, usize),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl CoverageInstance {
    /// Builds a canonical instance: every set is sorted and deduplicated,
    /// then all invariants are checked.
    pub fn new(n: usize, mut functions: Vec<CoverageFunction>) -> Result<Self, InstanceError> {
        for f in &mut functions {
            f.canonicalize();
        }
        let inst = Self::new_unchecked(n, functions);
        let violations = inst.validate();
        if violations.is_empty() {
            Ok(inst)
        } else {
            Err(InstanceError::Invalid(violations))
        }
    }

    /// Stores the sets exactly as given. Sparsity counts in-range indices
    /// only; use [`CoverageInstance::validate`] to inspect the result.
    pub fn new_unchecked(n: usize, functions: Vec<CoverageFunction>) -> Self {
        let t = compute_sparsity(n, &functions);
        Self {
            n,
            functions,
            t,
            meta: None,
        }
    }

    pub fn with_meta(mut self, meta: InstanceMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.functions.len()
    }

    /// Cached sparsity.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn functions(&self) -> &[CoverageFunction] {
        &self.functions
    }

    pub fn meta(&self) -> Option<&InstanceMeta> {
        self.meta.as_ref()
    }

    /// Every `(function, set index, set)` triple in order.
    pub fn all_sets(&self) -> impl Iterator<Item = (usize, usize, &[usize])> + '_ {
        self.functions.iter().enumerate().flat_map(|(i, f)| {
            f.sets
                .iter()
                .enumerate()
                .map(move |(si, s)| (i, si, s.as_slice()))
        })
    }

    pub fn num_sets(&self) -> usize {
        self.functions.iter().map(CoverageFunction::num_sets).sum()
    }

    pub fn max_set_size(&self) -> usize {
        self.all_sets().map(|(_, _, s)| s.len()).max().unwrap_or(0)
    }

    pub fn min_set_size(&self) -> usize {
        self.all_sets().map(|(_, _, s)| s.len()).min().unwrap_or(0)
    }

    /// For each item, the `(function, set)` pairs containing it.
    pub fn membership(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.n];
        for (i, si, set) in self.all_sets() {
            for &j in set {
                if j < self.n {
                    out[j].push((i, si));
                }
            }
        }
        out
    }

    /// All invariant violations, in discovery order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n == 0 {
            out.push(Violation::NoItems);
        }
        if self.functions.is_empty() {
            out.push(Violation::NoFunctions);
        }
        for (function, set, s) in self.all_sets() {
            if s.is_empty() {
                out.push(Violation::EmptySet { function, set });
                continue;
            }
            let mut seen = Vec::with_capacity(s.len());
            let mut unsorted = false;
            for (pos, &item) in s.iter().enumerate() {
                if item >= self.n {
                    out.push(Violation::IndexOutOfRange {
                        function,
                        set,
                        item,
                    });
                }
                if seen.contains(&item) {
                    out.push(Violation::DuplicateElement {
                        function,
                        set,
                        item,
                    });
                }
                seen.push(item);
                if pos > 0 && s[pos - 1] > item {
                    unsorted = true;
                }
            }
            if unsorted {
                out.push(Violation::UnsortedSet { function, set });
            }
        }
        let actual = compute_sparsity(self.n, &self.functions);
        if actual != self.t {
            out.push(Violation::SparsityMismatch {
                cached: self.t,
                actual,
            });
        }
        out
    }

    /// Concatenates the functions of several instances over the same items.
    pub fn stack(parts: Vec<CoverageInstance>) -> Result<Self, InstanceError> {
        let mut iter = parts.into_iter();
        let Some(first) = iter.next() else {
            return Err(InstanceError::Invalid(vec![Violation::NoFunctions]));
        };
        let n = first.n;
        let mut functions = first.functions;
        for p in iter {
            if p.n != n {
                return Err(InstanceError::MismatchedItems(n, p.n));
            }
            functions.extend(p.functions);
        }
        Self::new(n, functions)
    }
}

/// Free-function form of [`CoverageInstance::validate`].
pub fn validate(inst: &CoverageInstance) -> Result<(), Vec<Violation>> {
    let v = inst.validate();
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// Recomputes the sparsity from the sets.
pub fn sparsity(inst: &CoverageInstance) -> usize {
    compute_sparsity(inst.n, &inst.functions)
}

fn compute_sparsity(n: usize, functions: &[CoverageFunction]) -> usize {
    let mut count = vec![0usize; n];
    for f in functions {
        for s in &f.sets {
            for &j in s {
                if j < n {
                    count[j] += 1;
                }
            }
        }
    }
    count.into_iter().max().unwrap_or(0)
}

/// Derived size thresholds and caps for a given instance and color count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdSet {
    pub t: usize,
    pub k: usize,
    /// Functions with at most this many fractional occurrences are released
    /// from value preservation during batch rounding.
    pub drop_threshold: usize,
    /// Cap on fractional rows left by the small-sets phase, `m·k·t·s`.
    pub frac_cap: usize,
    /// Size above which the resampling algorithm guarantees rainbow sets.
    pub s_big: usize,
    /// Small/big split size for the combined algorithm.
    pub s_split: usize,
}

impl ThresholdSet {
    /// `max_set_size` is the `s` used for the fractional cap; it is clamped
    /// to at least 1, as are `t` and `k`.
    pub fn new(n: usize, m: usize, t: usize, k: usize, max_set_size: usize) -> Self {
        let t = t.max(1);
        let k = k.max(1);
        let s = max_set_size.max(1);
        Self {
            t,
            k,
            drop_threshold: 3 * t,
            frac_cap: m.max(1) * k * t * s,
            s_big: lll_threshold(t, k).unwrap_or(usize::MAX),
            s_split: split_threshold(n, t, k),
        }
    }

    pub fn for_instance(inst: &CoverageInstance, k: usize) -> Self {
        Self::new(inst.n(), inst.m(), inst.t(), k, inst.max_set_size())
    }
}

/// `⌈24·k·ln(n·t·k)⌉`, at least 1.
pub fn split_threshold(n: usize, t: usize, k: usize) -> usize {
    let ntk = (n.max(1) * t.max(1) * k.max(1)) as f64;
    let s = (24.0 * k.max(1) as f64 * ntk.ln()).ceil();
    (s as usize).max(1)
}

/// One function per hyperedge `H`, whose sets are the singletons `{i}`,
/// `i ∈ H`; then `f(T) = |T ∩ H|`.
pub fn gen_beck_fiala(
    n: usize,
    hyperedges: &[Vec<usize>],
) -> Result<CoverageInstance, InstanceError> {
    let mut functions = Vec::with_capacity(hyperedges.len());
    for (idx, h) in hyperedges.iter().enumerate() {
        if h.is_empty() {
            return Err(InstanceError::EmptyHyperedge(idx));
        }
        let mut h = h.clone();
        h.sort_unstable();
        h.dedup();
        functions.push(CoverageFunction::new(
            h.into_iter().map(|i| vec![i]).collect(),
        ));
    }
    CoverageInstance::new(n, functions)
}

/// Rank function of a partition matroid (unit capacities): one function
/// whose sets are the blocks.
pub fn gen_partition_matroid(
    n: usize,
    blocks: &[Vec<usize>],
) -> Result<CoverageInstance, InstanceError> {
    let mut owner = vec![false; n];
    for b in blocks {
        for &j in b {
            if j < n {
                if owner[j] {
                    return Err(InstanceError::OverlappingBlocks(j));
                }
                owner[j] = true;
            }
        }
    }
    if let Some(j) = owner.iter().position(|&c| !c) {
        return Err(InstanceError::UncoveredItem(j));
    }
    CoverageInstance::new(n, vec![CoverageFunction::new(blocks.to_vec())])
}

/// Edge coverage of a simple graph: items are the edges, and there is one
/// set per non-isolated vertex listing its incident edges.
pub fn gen_edge_coverage(
    num_vertices: usize,
    edges: &[(usize, usize)],
) -> Result<CoverageInstance, InstanceError> {
    let mut incident = vec![Vec::new(); num_vertices];
    let mut seen = std::collections::HashSet::new();
    for (e, &(u, v)) in edges.iter().enumerate() {
        if u == v {
            return Err(InstanceError::NotSimple(format!("self-loop at vertex {u}")));
        }
        if u >= num_vertices || v >= num_vertices {
            return Err(InstanceError::NotSimple(format!(
                "edge {e} references a vertex outside 0..{num_vertices}"
            )));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(InstanceError::NotSimple(format!("parallel edge {u}-{v}")));
        }
        incident[u].push(e);
        incident[v].push(e);
    }
    let sets = incident.into_iter().filter(|s| !s.is_empty()).collect();
    CoverageInstance::new(edges.len(), vec![CoverageFunction::new(sets)])
}

fn check_size_range(n: usize, t: usize, min: usize, max: usize) -> Result<(), InstanceError> {
    if n == 0 {
        return Err(InstanceError::Infeasible("n must be positive".into()));
    }
    if t == 0 {
        return Err(InstanceError::Infeasible("t must be positive".into()));
    }
    if min == 0 || min > max {
        return Err(InstanceError::Infeasible(format!(
            "set size range {min}..={max} is empty or contains 0"
        )));
    }
    if min > n {
        return Err(InstanceError::Infeasible(format!(
            "minimum set size {min} exceeds n = {n}"
        )));
    }
    Ok(())
}

/// Draws random sets until the per-item membership budget `t` is used up
/// (or `max_sets` sets exist). Every item ends in at most `t` sets.
fn random_sparse_sets<R: Rng>(
    n: usize,
    t: usize,
    min: usize,
    max: usize,
    max_sets: Option<usize>,
    rng: &mut R,
) -> Vec<Vec<usize>> {
    let mut capacity = vec![t; n];
    let mut sets = Vec::new();
    while max_sets.is_none_or(|cap| sets.len() < cap) {
        let eligible: Vec<usize> = (0..n).filter(|&j| capacity[j] > 0).collect();
        let mut size = rng.gen_range(min..=max);
        if eligible.len() < size {
            if eligible.len() < min {
                break;
            }
            size = eligible.len();
        }
        let mut set: Vec<usize> = sample(rng, eligible.len(), size)
            .into_iter()
            .map(|p| eligible[p])
            .collect();
        set.sort_unstable();
        for &j in &set {
            capacity[j] -= 1;
        }
        sets.push(set);
    }
    sets
}

/// A random `t`-sparse family of `m` functions with set sizes drawn from
/// `size_range`. Deterministic in `seed`.
pub fn gen_random(
    n: usize,
    m: usize,
    t: usize,
    size_range: (usize, usize),
    seed: u64,
) -> Result<CoverageInstance, InstanceError> {
    let (min, max) = size_range;
    check_size_range(n, t, min, max)?;
    if m == 0 {
        return Err(InstanceError::Infeasible("m must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = random_sparse_sets(n, t, min, max, None, &mut rng);
    let mut functions = vec![CoverageFunction::default(); m];
    for set in sets {
        functions[rng.gen_range(0..m)].sets.push(set);
    }
    Ok(
        CoverageInstance::new(n, functions)?.with_meta(InstanceMeta {
            seed: Some(seed),
            generator: Some("random".into()),
        }),
    )
}

/// Random hypergraph with at most `max_edges` hyperedges and maximum vertex
/// degree `t`, encoded through [`gen_beck_fiala`].
pub fn gen_random_beck_fiala(
    n: usize,
    max_edges: usize,
    t: usize,
    size_range: (usize, usize),
    seed: u64,
) -> Result<CoverageInstance, InstanceError> {
    let (min, max) = size_range;
    check_size_range(n, t, min, max)?;
    if max_edges == 0 {
        return Err(InstanceError::Infeasible(
            "need at least one hyperedge".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = random_sparse_sets(n, t, min, max, Some(max_edges), &mut rng);
    if edges.is_empty() {
        return Err(InstanceError::Infeasible(
            "no hyperedge fits the budget".into(),
        ));
    }
    Ok(gen_beck_fiala(n, &edges)?.with_meta(InstanceMeta {
        seed: Some(seed),
        generator: Some("beck-fiala".into()),
    }))
}

/// `m` partition matroids over `n` items, each splitting a random
/// permutation into `blocks` near-equal blocks. Sparsity is exactly `m`.
pub fn gen_random_partitions(
    n: usize,
    blocks: usize,
    m: usize,
    seed: u64,
) -> Result<CoverageInstance, InstanceError> {
    if n == 0 || blocks == 0 || blocks > n || m == 0 {
        return Err(InstanceError::Infeasible(format!(
            "need 1 <= blocks <= n and m >= 1 (n = {n}, blocks = {blocks}, m = {m})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::with_capacity(m);
    for _ in 0..m {
        let mut items: Vec<usize> = (0..n).collect();
        items.shuffle(&mut rng);
        let chunks: Vec<Vec<usize>> = (0..blocks)
            .map(|b| items[b * n / blocks..(b + 1) * n / blocks].to_vec())
            .collect();
        parts.push(gen_partition_matroid(n, &chunks)?);
    }
    Ok(CoverageInstance::stack(parts)?.with_meta(InstanceMeta {
        seed: Some(seed),
        generator: Some("partition".into()),
    }))
}

/// `m` edge-coverage functions; each assigns the `n` items to distinct
/// random edges of a simple graph on `num_vertices` vertices.
pub fn gen_random_edge_coverage(
    n: usize,
    num_vertices: usize,
    m: usize,
    seed: u64,
) -> Result<CoverageInstance, InstanceError> {
    let pairs = num_vertices * num_vertices.saturating_sub(1) / 2;
    if n == 0 || m == 0 || n > pairs {
        return Err(InstanceError::Infeasible(format!(
            "{n} edges do not fit a simple graph on {num_vertices} vertices"
        )));
    }
    let all: Vec<(usize, usize)> = (0..num_vertices)
        .flat_map(|u| (u + 1..num_vertices).map(move |v| (u, v)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::with_capacity(m);
    for _ in 0..m {
        let edges: Vec<(usize, usize)> = sample(&mut rng, all.len(), n)
            .into_iter()
            .map(|p| all[p])
            .collect();
        parts.push(gen_edge_coverage(num_vertices, &edges)?);
    }
    Ok(CoverageInstance::stack(parts)?.with_meta(InstanceMeta {
        seed: Some(seed),
        generator: Some("edge-cover".into()),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    functions: Vec<FunctionFile>,
    #[serde(default)]
    meta: Option<InstanceMeta>,
}

#[derive(Deserialize)]
struct FunctionFile {
    sets: Vec<Vec<usize>>,
}

/// Parses the JSON instance format. Sets are canonicalized (sorted and
/// deduplicated) before validation.
pub fn read_instance(text: &str) -> Result<CoverageInstance, InstanceError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let functions = file
        .functions
        .into_iter()
        .map(|f| CoverageFunction::new(f.sets))
        .collect();
    let inst = CoverageInstance::new(file.n, functions)?;
    Ok(match file.meta {
        Some(meta) => inst.with_meta(meta),
        None => inst,
    })
}

/// Canonical text form: one function per line, sets sorted ascending.
pub fn write_instance(inst: &CoverageInstance) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"n\": {},\n", inst.n));
    out.push_str("  \"functions\": [");
    for (i, f) in inst.functions.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        let sets: Vec<String> = f
            .sets
            .iter()
            .map(|s| {
                let items: Vec<String> = s.iter().map(ToString::to_string).collect();
                format!("[{}]", items.join(", "))
            })
            .collect();
        out.push_str(&format!("    {{\"sets\": [{}]}}", sets.join(", ")));
    }
    if inst.functions.is_empty() {
        out.push(']');
    } else {
        out.push_str("\n  ]");
    }
    if let Some(meta) = &inst.meta {
        let mut fields = Vec::new();
        if let Some(seed) = meta.seed {
            fields.push(format!("\"seed\": {seed}"));
        }
        if let Some(g) = &meta.generator {
            let g = serde_json::to_string(g).expect("strings serialize");
            fields.push(format!("\"generator\": {g}"));
        }
        out.push_str(&format!(",\n  \"meta\": {{{}}}", fields.join(", ")));
    }
    out.push_str("\n}\n");
    out
}
