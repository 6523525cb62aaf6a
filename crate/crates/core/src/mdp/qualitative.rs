//! Graph-based qualitative analysis. `left` constrains the path, `right`
//! is the target; plain reachability passes `left` all true.

use crate::model::Mdp;

fn all_succ_in(mdp: &Mdp, s: usize, k: usize, set: &[bool]) -> bool {
    mdp.choices[s][k].dist.iter().all(|(t, _)| set[*t])
}

fn some_succ_in(mdp: &Mdp, s: usize, k: usize, set: &[bool]) -> bool {
    mdp.choices[s][k].dist.iter().any(|(t, _)| set[*t])
}

/// States that some path reaches `right` from through `left`.
fn can_reach(mdp: &Mdp, left: &[bool], right: &[bool]) -> Vec<bool> {
    let pre = mdp.predecessors();
    let mut seen: Vec<bool> = right.to_vec();
    let mut stack: Vec<usize> = (0..seen.len()).filter(|s| seen[*s]).collect();
    while let Some(t) = stack.pop() {
        for &(s, _) in &pre[t] {
            if !seen[s] && left[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
    }
    seen
}

/// Maximum probability is zero.
pub fn prob0a(mdp: &Mdp, left: &[bool], right: &[bool]) -> Vec<bool> {
    can_reach(mdp, left, right).into_iter().map(|b| !b).collect()
}

/// Minimum probability is zero.
pub fn prob0e(mdp: &Mdp, left: &[bool], right: &[bool]) -> Vec<bool> {
    // least fixpoint of states forced to reach with positive probability
    let n = mdp.num_states();
    let mut forced = right.to_vec();
    loop {
        let mut changed = false;
        for s in 0..n {
            if !forced[s] && left[s] && (0..mdp.choices[s].len()).all(|k| some_succ_in(mdp, s, k, &forced)) {
                forced[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    forced.into_iter().map(|b| !b).collect()
}

/// Maximum probability is one.
pub fn prob1e(mdp: &Mdp, left: &[bool], right: &[bool]) -> Vec<bool> {
    let n = mdp.num_states();
    let mut u = vec![true; n];
    loop {
        let mut v = right.to_vec();
        loop {
            let mut changed = false;
            for s in 0..n {
                if v[s] || !left[s] || !u[s] {
                    continue;
                }
                let ok = (0..mdp.choices[s].len()).any(|k| all_succ_in(mdp, s, k, &u) && some_succ_in(mdp, s, k, &v));
                if ok {
                    v[s] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if v == u {
            return u;
        }
        u = v;
    }
}

/// Minimum probability is one.
pub fn prob1a(mdp: &Mdp, left: &[bool], right: &[bool]) -> Vec<bool> {
    // states that can move, through left \ right, into a state where the
    // target can be avoided surely
    let zero = prob0e(mdp, left, right);
    let pre = mdp.predecessors();
    let mut bad = zero.clone();
    let mut stack: Vec<usize> = (0..bad.len()).filter(|s| bad[*s]).collect();
    while let Some(t) = stack.pop() {
        for &(s, _) in &pre[t] {
            if !bad[s] && left[s] && !right[s] {
                bad[s] = true;
                stack.push(s);
            }
        }
    }
    bad.into_iter().map(|b| !b).collect()
}

/// States from which every strategy reaches `targets` almost surely.
pub fn prob1_min_set(mdp: &Mdp, targets: &[bool]) -> Vec<bool> {
    let all = vec![true; mdp.num_states()];
    prob1a(mdp, &all, targets)
}
