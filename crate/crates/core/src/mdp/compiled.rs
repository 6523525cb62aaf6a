use crate::model::Mdp;
use crate::num::Scalar;

/// Compressed sparse layout of an MDP with probabilities in scalar type `S`.
#[derive(Clone, Debug)]
pub struct Compiled<S> {
    state_start: Vec<usize>,
    choice_start: Vec<usize>,
    succ: Vec<usize>,
    prob: Vec<S>,
}

impl<S: Scalar> Compiled<S> {
    pub fn new(mdp: &Mdp) -> Self {
        let mut state_start = Vec::with_capacity(mdp.num_states() + 1);
        let mut choice_start = Vec::with_capacity(mdp.num_choices() + 1);
        let mut succ = Vec::new();
        let mut prob = Vec::new();
        state_start.push(0);
        choice_start.push(0);
        for choices in &mdp.choices {
            for c in choices {
                for (t, p) in &c.dist {
                    succ.push(*t);
                    prob.push(S::from_rational(p));
                }
                choice_start.push(succ.len());
            }
            state_start.push(choice_start.len() - 1);
        }
        Compiled { state_start, choice_start, succ, prob }
    }

    pub fn num_states(&self) -> usize {
        self.state_start.len() - 1
    }

    pub fn num_choices(&self, s: usize) -> usize {
        self.state_start[s + 1] - self.state_start[s]
    }

    /// Expected value of `values` after taking choice `k` at `s`.
    pub fn expect(&self, s: usize, k: usize, values: &[S]) -> S {
        let c = self.state_start[s] + k;
        let mut acc = S::nil();
        for e in self.choice_start[c]..self.choice_start[c + 1] {
            acc = acc.plus(&self.prob[e].times(&values[self.succ[e]]));
        }
        acc
    }

    pub fn successors(&self, s: usize, k: usize) -> &[usize] {
        let c = self.state_start[s] + k;
        &self.succ[self.choice_start[c]..self.choice_start[c + 1]]
    }
}
