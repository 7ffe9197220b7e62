//! Directed dependency graph over latest-version runtime edges.

use std::collections::BTreeMap;

use crate::ecosystem::{DependencyKind, EcosystemSnapshot};
use crate::error::Error;
use crate::Result;

/// Package-level dependency graph. `forward[i]` lists what node `i` depends
/// on; `reverse` is the exact transpose (who depends on `i`). Adjacency
/// lists are sorted and deduplicated, so iteration order is canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepGraph {
    names: Vec<String>,
    index: BTreeMap<String, u32>,
    forward: Vec<Vec<u32>>,
    reverse: Vec<Vec<u32>>,
}

impl DepGraph {
    /// One node per package; one edge per (dependent, target) pair among
    /// the latest-version runtime edges, duplicates collapsed.
    pub fn build(s: &EcosystemSnapshot) -> DepGraph {
        let names: Vec<String> = s.packages.keys().cloned().collect();
        let index: BTreeMap<String, u32> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        let mut forward: Vec<Vec<u32>> = vec![Vec::new(); names.len()];
        let mut reverse: Vec<Vec<u32>> = vec![Vec::new(); names.len()];
        for e in s.latest_edges() {
            if e.kind != DependencyKind::Runtime {
                continue;
            }
            let (Some(&from), Some(&to)) = (index.get(&e.dependent), index.get(&e.target)) else {
                continue;
            };
            forward[from as usize].push(to);
            reverse[to as usize].push(from);
        }
        for adj in forward.iter_mut().chain(reverse.iter_mut()) {
            adj.sort_unstable();
            adj.dedup();
        }
        DepGraph {
            names,
            index,
            forward,
            reverse,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edge_count(&self) -> usize {
        self.forward.iter().map(Vec::len).sum()
    }

    fn node(&self, name: &str) -> Result<u32> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownPackage(name.to_string()))
    }

    /// Direct dependents: in-degree under forward edges.
    pub fn dependent_count(&self, name: &str) -> Result<usize> {
        Ok(self.reverse[self.node(name)? as usize].len())
    }

    /// Direct dependencies: out-degree.
    pub fn dependency_count(&self, name: &str) -> Result<usize> {
        Ok(self.forward[self.node(name)? as usize].len())
    }

    fn reachable_count(&self, start: u32, adjacency: &[Vec<u32>]) -> usize {
        let mut visited = vec![false; self.names.len()];
        visited[start as usize] = true;
        let mut queue = vec![start];
        let mut count = 0usize;
        while let Some(node) = queue.pop() {
            for &next in &adjacency[node as usize] {
                if !visited[next as usize] {
                    visited[next as usize] = true;
                    count += 1;
                    queue.push(next);
                }
            }
        }
        count
    }

    /// (ancestors, descendants): reachable-set sizes under reverse and
    /// forward edges, excluding the package itself. Cycles are fine — each
    /// reachable node counts once.
    pub fn transitive_counts(&self, name: &str) -> Result<(usize, usize)> {
        let node = self.node(name)?;
        Ok((
            self.reachable_count(node, &self.reverse),
            self.reachable_count(node, &self.forward),
        ))
    }

    /// Per-package row data for the graph-metrics artifact, in name order.
    pub fn metric_rows(&self) -> Vec<GraphMetrics> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let node = i as u32;
                GraphMetrics {
                    package: name.clone(),
                    dependent_count: self.reverse[i].len(),
                    transitive_dependents: self.reachable_count(node, &self.reverse),
                    dependency_count: self.forward[i].len(),
                    transitive_dependencies: self.reachable_count(node, &self.forward),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMetrics {
    pub package: String,
    pub dependent_count: usize,
    pub transitive_dependents: usize,
    pub dependency_count: usize,
    pub transitive_dependencies: usize,
}
