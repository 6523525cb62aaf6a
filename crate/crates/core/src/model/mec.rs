use std::collections::BTreeMap;

use super::csg::{Csg, StateId};

/// A maximal end component over the joint-move graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndComponent {
    /// Sorted ascending.
    pub states: Vec<StateId>,
    /// Retained choice indices per state.
    pub choices: BTreeMap<StateId, Vec<usize>>,
    /// Some joint move of the full game leaves the component.
    pub non_terminal: bool,
}

/// Maximal end components by iterated SCC refinement.
pub fn enumerate_mecs(g: &Csg) -> Vec<EndComponent> {
    let n = g.num_states();
    let mut allowed: Vec<Vec<bool>> = (0..n).map(|s| vec![true; g.choices(s).len()]).collect();
    let mut alive = vec![true; n];
    let mut comp;
    loop {
        let adj: Vec<Vec<StateId>> = (0..n)
            .map(|s| {
                if !alive[s] {
                    return Vec::new();
                }
                let mut out: Vec<StateId> = g
                    .choices(s)
                    .iter()
                    .zip(&allowed[s])
                    .filter(|(_, ok)| **ok)
                    .flat_map(|(c, _)| c.dist.support())
                    .filter(|t| alive[*t])
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();
        comp = strongly_connected(&adj);
        let mut changed = false;
        for s in 0..n {
            if !alive[s] {
                continue;
            }
            for (k, c) in g.choices(s).iter().enumerate() {
                if allowed[s][k] && c.dist.support().any(|t| !alive[t] || comp[t] != comp[s]) {
                    allowed[s][k] = false;
                    changed = true;
                }
            }
            if !allowed[s].iter().any(|ok| *ok) {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut groups: BTreeMap<usize, Vec<StateId>> = BTreeMap::new();
    for s in (0..n).filter(|s| alive[*s]) {
        groups.entry(comp[s]).or_default().push(s);
    }
    let mut out: Vec<EndComponent> = groups
        .into_values()
        .map(|states| {
            let choices: BTreeMap<StateId, Vec<usize>> =
                states.iter().map(|&s| (s, (0..allowed[s].len()).filter(|k| allowed[s][*k]).collect())).collect();
            let non_terminal = states
                .iter()
                .any(|&s| g.choices(s).iter().any(|c| c.dist.support().any(|t| states.binary_search(&t).is_err())));
            EndComponent { states, choices, non_terminal }
        })
        .collect();
    out.sort_by(|a, b| a.states.cmp(&b.states));
    out
}

/// Tarjan's algorithm, iterative. Returns a component id per vertex.
pub(crate) fn strongly_connected(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge == 0 && index[v] == UNSEEN {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *edge < adj[v].len() {
                let w = adj[v][*edge];
                *edge += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_of_cycle_and_tail() {
        let adj = vec![vec![1], vec![2], vec![0, 3], vec![]];
        let c = strongly_connected(&adj);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[1], c[2]);
        assert_ne!(c[2], c[3]);
    }
}
