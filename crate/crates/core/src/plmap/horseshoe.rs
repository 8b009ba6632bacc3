//! Search for `s`-horseshoes made of runs of basic intervals.

use super::PLMarkovMap;

/// `s` interior-disjoint runs of basic intervals inside the run `j`, each
/// covering `j`. Loose when the runs leave part of `j` uncovered or some run
/// covers strictly more than `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Horseshoe {
    pub edge: usize,
    /// Basic intervals of `J`, in order along the edge.
    pub j: Vec<usize>,
    pub covers: Vec<Vec<usize>>,
    pub loose: bool,
}

pub fn loose_horseshoe_search(m: &PLMarkovMap, s: usize) -> Option<Horseshoe> {
    let p = m.partition();
    let n = m.num_intervals();
    let images: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            let mut row = vec![false; n];
            for st in m.path(i) {
                row[st.interval] = true;
            }
            row
        })
        .collect();
    let mut tight: Option<Horseshoe> = None;
    for edge in 0..p.graph().num_edges() {
        let r = p.edge_intervals(edge);
        let ids: Vec<usize> = r.collect();
        for a in 0..ids.len() {
            for b in a..ids.len() {
                let j = &ids[a..=b];
                if let Some(h) = within(&images, edge, j, s) {
                    if h.loose {
                        return Some(h);
                    }
                    tight.get_or_insert(h);
                }
            }
        }
    }
    tight
}

/// Greedy left-to-right runs inside `j` whose images contain `j`.
fn within(images: &[Vec<bool>], edge: usize, j: &[usize], s: usize) -> Option<Horseshoe> {
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut start = 0;
    while start < j.len() && runs.len() < s {
        let mut covered = vec![false; j.len()];
        let mut found = None;
        for end in start..j.len() {
            for (k, &t) in j.iter().enumerate() {
                covered[k] |= images[j[end]][t];
            }
            if covered.iter().all(|&c| c) {
                found = Some(end);
                break;
            }
        }
        let end = found?;
        runs.push(j[start..=end].to_vec());
        start = end + 1;
    }
    if runs.len() < s {
        return None;
    }
    let gap = start < j.len();
    let spills = runs.iter().any(|run| {
        run.iter().any(|&i| images[i].iter().enumerate().any(|(t, &hit)| hit && !j.contains(&t)))
    });
    Some(Horseshoe { edge, j: j.to_vec(), covers: runs, loose: gap || spills })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::tests::tent3;

    #[test]
    fn tent_horseshoe_is_tight() {
        let h = loose_horseshoe_search(&tent3(), 3).unwrap();
        assert!(!h.loose);
        assert_eq!(h.j, vec![0, 1, 2]);
        assert_eq!(h.covers, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn tent_has_no_four_horseshoe() {
        assert!(loose_horseshoe_search(&tent3(), 4).is_none());
    }
}
