//! Dependency graph of a set system: items are vertices, two items are
//! adjacent when some set contains both.

use std::collections::BTreeSet;

pub(crate) struct DependencyGraph {
    adj: Vec<Vec<usize>>,
}

impl DependencyGraph {
    /// Graph on the items with `active[j]`; inactive items stay isolated.
    pub(crate) fn build<'a>(
        n: usize,
        sets: impl IntoIterator<Item = &'a [usize]>,
        active: &[bool],
    ) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut members = Vec::new();
        for s in sets {
            members.clear();
            members.extend(s.iter().copied().filter(|&j| active[j]));
            for (a, &u) in members.iter().enumerate() {
                for &v in &members[a + 1..] {
                    adj[u].push(v);
                    adj[v].push(u);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Self { adj }
    }

    pub(crate) fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Repeatedly takes a minimum-degree vertex of the remaining graph
    /// (smallest index on ties) and deletes it with its neighbors.
    pub(crate) fn greedy_independent_set(&self, vertices: &[usize]) -> Vec<usize> {
        let n = self.adj.len();
        let mut alive = vec![false; n];
        for &v in vertices {
            alive[v] = true;
        }
        let mut degree = vec![0usize; n];
        let mut queue = BTreeSet::new();
        for &v in vertices {
            degree[v] = self.adj[v].iter().filter(|&&u| alive[u]).count();
            queue.insert((degree[v], v));
        }
        let mut chosen = Vec::new();
        while let Some((_, z)) = queue.pop_first() {
            chosen.push(z);
            alive[z] = false;
            let removed: Vec<usize> = self.adj[z].iter().copied().filter(|&u| alive[u]).collect();
            for &u in &removed {
                alive[u] = false;
                queue.remove(&(degree[u], u));
            }
            for &u in &removed {
                for &w in &self.adj[u] {
                    if alive[w] {
                        queue.remove(&(degree[w], w));
                        degree[w] -= 1;
                        queue.insert((degree[w], w));
                    }
                }
            }
        }
        chosen.sort_unstable();
        chosen
    }

    /// Sequential greedy coloring in index order; returns the color
    /// classes. Uses at most `max_degree + 1` classes.
    pub(crate) fn greedy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.adj.len();
        let mut color = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut used = Vec::new();
        for v in 0..n {
            used.clear();
            used.resize(classes.len() + 1, false);
            for &u in &self.adj[v] {
                if color[u] != usize::MAX && color[u] < used.len() {
                    used[color[u]] = true;
                }
            }
            let c = used.iter().position(|&b| !b).expect("a free class exists");
            if c == classes.len() {
                classes.push(Vec::new());
            }
            color[v] = c;
            classes[c].push(v);
        }
        classes
    }
}
