//! The Markov graph of a map: incidence matrix, strong components, period
//! and the transitivity classification.

use std::fmt::Write as _;

use num_integer::Integer;

use super::{MarkovPartition, PLMarkovMap};
use crate::error::{Error, Result};
use crate::graph::{kappa, TopoGraph};
use crate::logval::LogValue;

/// 0/1 covering matrix, stored as sorted rows of column indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: Vec<Vec<usize>>,
}

impl IncidenceMatrix {
    pub fn from_rows(mut rows: Vec<Vec<usize>>) -> Self {
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
        }
        IncidenceMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let n = self.dim();
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0; n];
                for &j in r {
                    d[j] = 1;
                }
                d
            })
            .collect()
    }

    /// Graphviz rendering: one node per basic interval, one arc per entry.
    pub fn to_dot(&self, partition: &MarkovPartition) -> String {
        let mut s = String::from("digraph markov {\n");
        for b in partition.intervals() {
            let _ = writeln!(s, "  \"{}\";", b.id);
        }
        for (i, r) in self.rows.iter().enumerate() {
            for &j in r {
                let _ = writeln!(s, "  \"{}\" -> \"{}\";", partition.interval(i).id, partition.interval(j).id);
            }
        }
        s.push_str("}\n");
        s
    }
}

pub fn incidence_matrix(m: &PLMarkovMap) -> IncidenceMatrix {
    IncidenceMatrix::from_rows(m.paths().iter().map(|p| p.iter().map(|s| s.interval).collect()).collect())
}

/// Strong components in reverse topological order (Tarjan, iterative).
pub fn strongly_connected_components(rows: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = rows.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if *k < rows[v].len() {
                let w = rows[v][*k];
                *k += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Whether the component has at least one internal arc.
pub(crate) fn is_nontrivial(rows: &[Vec<usize>], comp: &[usize]) -> bool {
    comp.len() > 1 || rows[comp[0]].contains(&comp[0])
}

/// Period (gcd of cycle lengths) of a nontrivial strong component, with the
/// level of each member modulo the period. Arcs go from level `l` to `l + 1`.
pub(crate) fn component_period(rows: &[Vec<usize>], comp: &[usize]) -> (usize, Vec<(usize, usize)>) {
    let n = rows.len();
    let mut member = vec![false; n];
    for &v in comp {
        member[v] = true;
    }
    let mut level = vec![usize::MAX; n];
    level[comp[0]] = 0;
    let mut queue = std::collections::VecDeque::from([comp[0]]);
    let mut g = 0usize;
    while let Some(v) = queue.pop_front() {
        for &w in &rows[v] {
            if !member[w] {
                continue;
            }
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            } else {
                let d = (level[v] + 1).abs_diff(level[w]);
                g = g.gcd(&d);
            }
        }
    }
    let g = g.max(1);
    (g, comp.iter().map(|&v| (v, level[v] % g)).collect())
}

/// SCC certificate behind [`is_transitive`]. Interval ids, not indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitivityCertificate {
    pub transitive: bool,
    pub strongly_connected: bool,
    pub cyclic_permutation: bool,
    pub components: Vec<Vec<String>>,
    /// The criterion is a theorem for trees only.
    pub heuristic: bool,
}

/// Strongly connected Markov graph that is not a single cycle.
pub fn is_transitive(m: &PLMarkovMap) -> TransitivityCertificate {
    let a = incidence_matrix(m);
    let comps = strongly_connected_components(a.rows());
    let strongly_connected = comps.len() == 1 && is_nontrivial(a.rows(), &comps[0]);
    let cyclic_permutation = strongly_connected && a.rows().iter().all(|r| r.len() == 1);
    let p = m.partition();
    TransitivityCertificate {
        transitive: strongly_connected && !cyclic_permutation,
        strongly_connected,
        cyclic_permutation,
        components: comps.iter().map(|c| c.iter().map(|&i| p.interval(i).id.clone()).collect()).collect(),
        heuristic: !m.graph().is_tree(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodDecomposition {
    pub k: usize,
    /// Class `i` is carried onto class `i + 1 mod k`.
    pub classes: Vec<Vec<usize>>,
}

pub fn period_decomposition(m: &PLMarkovMap) -> Result<PeriodDecomposition> {
    if !is_transitive(m).transitive {
        return Err(Error::domain("period decomposition needs a transitive map"));
    }
    let a = incidence_matrix(m);
    let all: Vec<usize> = (0..a.dim()).collect();
    let (k, levels) = component_period(a.rows(), &all);
    let mut classes = vec![Vec::new(); k];
    for (v, l) in levels {
        classes[l].push(v);
    }
    Ok(PeriodDecomposition { k, classes })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub transitive: bool,
    pub totally_transitive: bool,
    /// Equal to `totally_transitive`: for piecewise monotone maps total
    /// transitivity implies exactness.
    pub exact: bool,
    pub period: Option<usize>,
    pub heuristic: bool,
}

pub fn classify(m: &PLMarkovMap) -> Classification {
    let cert = is_transitive(m);
    let period = period_decomposition(m).ok().map(|d| d.k);
    let totally = cert.transitive && period == Some(1);
    Classification {
        transitive: cert.transitive,
        totally_transitive: totally,
        exact: totally,
        period,
        heuristic: cert.heuristic,
    }
}

/// Lower bounds for the entropy of pure mixing maps on a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub kappa: i64,
    /// `log 3 / kappa`.
    pub kappa_bound: LogValue,
    /// `log 3 / (kappa - 1)`, read off the horseshoe argument, which finds a
    /// loose 3-horseshoe for some iterate below `kappa`.
    pub sharpened_bound: Option<LogValue>,
}

pub fn bound_report(g: &TopoGraph) -> BoundReport {
    let k = kappa(g);
    BoundReport {
        kappa: k,
        kappa_bound: LogValue::of(3, k as u64),
        sharpened_bound: (k > 1).then(|| LogValue::of(3, (k - 1) as u64)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::catalog;
    use crate::plmap::tests::tent3;

    #[test]
    fn tent_matrix_all_ones() {
        let a = incidence_matrix(&tent3());
        assert_eq!(a.to_dense(), vec![vec![1, 1, 1]; 3]);
        let c = classify(&tent3());
        assert!(c.transitive && c.totally_transitive && c.exact);
    }

    #[test]
    fn tarjan_on_small_graphs() {
        let rows = vec![vec![1], vec![2], vec![0], vec![0, 4], vec![]];
        let mut comps = strongly_connected_components(&rows);
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3], vec![4]]);
        assert_eq!(component_period(&rows, &[0, 1, 2]).0, 3);
        let rows = vec![vec![1], vec![0, 2], vec![0]];
        assert_eq!(component_period(&rows, &[0, 1, 2]).0, 1);
    }

    #[test]
    fn bounds() {
        let b = bound_report(&catalog::sigma());
        assert_eq!(b.kappa_bound, LogValue::of(3, 4));
        let b = bound_report(&catalog::theta());
        assert_eq!(b.sharpened_bound, Some(LogValue::of(3, 4)));
        let b = bound_report(&catalog::star(5));
        assert_eq!(b.kappa_bound, LogValue::of(3, 6));
    }
}
