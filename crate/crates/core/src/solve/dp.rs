use rayon::prelude::*;

use super::finite::FiniteMDP;
use crate::error::{MdpError, Result};
use crate::extended::ExtendedReal;
use crate::mdp::{MarkovSlice, MarkovTable, Policy};

/// `values[t-1][s]` is `V(t, s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueTable {
    pub values: Vec<Vec<ExtendedReal>>,
}

/// `actions[t-1][s]` is the index of the chosen action in `choices(t, s)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolicyTable {
    pub actions: Vec<Vec<usize>>,
}

impl ValueTable {
    pub fn at(&self, t: usize, s: usize) -> ExtendedReal {
        self.values[t - 1][s]
    }
}

impl PolicyTable {
    pub fn at(&self, t: usize, s: usize) -> usize {
        self.actions[t - 1][s]
    }

    /// First action everywhere.
    pub fn first_actions(fm: &FiniteMDP) -> Self {
        Self { actions: fm.slices().iter().map(|s| vec![0; s.len()]).collect() }
    }

    /// Executable policy that looks the state up in each slice's cells.
    pub fn to_policy(&self, fm: &FiniteMDP) -> Policy {
        let slices = fm
            .slices()
            .iter()
            .zip(&self.actions)
            .map(|(slice, acts)| MarkovSlice {
                grid: slice.grid.clone(),
                actions: acts.iter().zip(&slice.choices).map(|(&k, cs)| cs[k].action).collect(),
            })
            .collect();
        Policy::MarkovTable(MarkovTable::new(slices).expect("tables match their grids"))
    }
}

/// `max_a [r + Σ p V']` for one state, scanning actions in index order and
/// keeping the first maximizer.
fn best_choice(fm: &FiniteMDP, t: usize, s: usize, row_values: &[ExtendedReal]) -> (ExtendedReal, usize) {
    let mut best = (ExtendedReal::NEG_INF, 0);
    for (k, c) in fm.choices(t, s).iter().enumerate() {
        let ev = c.row.map_or(ExtendedReal::ZERO, |r| row_values[r]);
        let q = c.reward + ev;
        if k == 0 || q > best.0 {
            best = (q, k);
        }
    }
    best
}

/// Backward induction with `V(T+1, ·) = 0`. Ties go to the smallest action
/// index.
pub fn value_iteration(fm: &FiniteMDP) -> (ValueTable, PolicyTable) {
    let horizon = fm.horizon();
    let mut values = vec![Vec::new(); horizon];
    let mut actions = vec![Vec::new(); horizon];
    for t in (1..=horizon).rev() {
        let slice = fm.slice(t);
        let row_values: Vec<ExtendedReal> = match values.get(t) {
            Some(next) => slice.rows.par_iter().map(|row| row.expect(next)).collect(),
            None => Vec::new(),
        };
        let (v, a): (Vec<_>, Vec<_>) =
            (0..slice.len()).into_par_iter().map(|s| best_choice(fm, t, s, &row_values)).unzip();
        values[t - 1] = v;
        actions[t - 1] = a;
    }
    (ValueTable { values }, PolicyTable { actions })
}

/// `Σ_s ν(s) V(1, s)`.
pub fn initial_value(fm: &FiniteMDP, values: &ValueTable) -> ExtendedReal {
    fm.initial().expect(&values.values[0])
}

/// Expected total reward of a deterministic Markov policy by forward
/// propagation of the state distribution. Reaching a `-inf` reward with
/// positive probability gives `-inf`.
pub fn evaluate_policy_exact(fm: &FiniteMDP, policy: &PolicyTable) -> ExtendedReal {
    let mut dist = fm.initial().to_dense(fm.slice(1).len());
    let mut total = ExtendedReal::ZERO;
    for t in 1..=fm.horizon() {
        let choices = &fm.slice(t).choices;
        for (s, &p) in dist.iter().enumerate() {
            total += choices[s][policy.at(t, s)].reward.scale(p);
        }
        if t < fm.horizon() {
            let mut next = vec![0.0; fm.slice(t + 1).len()];
            for (s, &p) in dist.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (j, q) in fm.row(t, s, policy.at(t, s)).expect("rows exist before the horizon").iter() {
                    next[j] += p * q;
                }
            }
            dist = next;
        }
    }
    total
}

/// Value of a policy from every `(t, s)` onwards.
pub fn evaluate_policy_backward(fm: &FiniteMDP, policy: &PolicyTable) -> ValueTable {
    let horizon = fm.horizon();
    let mut values: Vec<Vec<ExtendedReal>> = vec![Vec::new(); horizon];
    for t in (1..=horizon).rev() {
        let slice = fm.slice(t);
        let v = (0..slice.len())
            .map(|s| {
                let c = &slice.choices[s][policy.at(t, s)];
                let ev = c.row.map_or(ExtendedReal::ZERO, |r| slice.rows[r].expect(&values[t]));
                c.reward + ev
            })
            .collect();
        values[t - 1] = v;
    }
    ValueTable { values }
}

/// Default cap on the number of enumerated policies.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

struct Odometer {
    radices: Vec<usize>,
    shape: Vec<usize>,
}

impl Odometer {
    fn new(fm: &FiniteMDP) -> Self {
        let radices = fm.slices().iter().flat_map(|s| s.choices.iter().map(Vec::len)).collect();
        let shape = fm.slices().iter().map(|s| s.len()).collect();
        Self { radices, shape }
    }

    /// Policy number `i` in lexicographic order, earliest `(t, s)` most
    /// significant.
    fn decode(&self, mut i: u64) -> PolicyTable {
        let mut flat = vec![0; self.radices.len()];
        for (d, &r) in flat.iter_mut().zip(&self.radices).rev() {
            *d = (i % r as u64) as usize;
            i /= r as u64;
        }
        let mut actions = Vec::with_capacity(self.shape.len());
        let mut rest = &flat[..];
        for &n in &self.shape {
            actions.push(rest[..n].to_vec());
            rest = &rest[n..];
        }
        PolicyTable { actions }
    }
}

/// Exhaustive search over deterministic Markov policies.
///
/// The value is the best forward evaluation. The returned policy is the
/// lexicographically smallest among the policies that are optimal from
/// every `(t, s)`, which is the policy backward induction picks with its
/// smallest-index tie rule.
pub fn brute_force_optimal(fm: &FiniteMDP, limit: u64) -> Result<(ExtendedReal, PolicyTable)> {
    let count = fm.policy_count();
    if count > limit as f64 {
        return Err(MdpError::TooManyPolicies { count, limit });
    }
    let n = count as u64;
    let od = Odometer::new(fm);

    let sup = |a: Vec<Vec<ExtendedReal>>, b: Vec<Vec<ExtendedReal>>| -> Vec<Vec<ExtendedReal>> {
        a.into_iter().zip(b).map(|(x, y)| x.into_iter().zip(y).map(|(u, v)| u.max(v)).collect()).collect()
    };
    let (best_value, pointwise) = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = od.decode(i);
            (evaluate_policy_exact(fm, &p), evaluate_policy_backward(fm, &p).values)
        })
        .reduce_with(|(va, wa), (vb, wb)| (va.max(vb), sup(wa, wb)))
        .expect("at least one policy");

    let first = (0..n)
        .into_par_iter()
        .find_first(|&i| evaluate_policy_backward(fm, &od.decode(i)).values == pointwise)
        .expect("backward induction guarantees a uniformly optimal policy");
    Ok((best_value, od.decode(first)))
}
