//! Growth rates and the single-component normal form.

use nalgebra::DMatrix;

use super::PartialDfa;
use crate::error::{Error, Result};
use crate::spectral;

/// Tolerance for comparing growth rates against a threshold.
pub const GROWTH_TOL: f64 = 1e-9;

/// Strongly connected components of the defined-transition graph restricted
/// to `alive`, each sorted ascending; components are ordered by their
/// smallest state.
pub fn strongly_connected_components(dfa: &PartialDfa, alive: &[bool]) -> Vec<Vec<usize>> {
    // Iterative Tarjan.
    let d = dfa.states();
    let k = dfa.alphabet();
    let mut index = vec![usize::MAX; d];
    let mut low = vec![0; d];
    let mut on_stack = vec![false; d];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..d {
        if !alive[root] || index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (s, ref mut x)) = call.last_mut() {
            if *x < k {
                let sym = *x;
                *x += 1;
                if let Some(t) = dfa.next(s, sym) {
                    if !alive[t] {
                        continue;
                    }
                    if index[t] == usize::MAX {
                        index[t] = counter;
                        low[t] = counter;
                        counter += 1;
                        stack.push(t);
                        on_stack[t] = true;
                        call.push((t, 0));
                    } else if on_stack[t] {
                        low[s] = low[s].min(index[t]);
                    }
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[s]);
                }
                if low[s] == index[s] {
                    let mut comp = Vec::new();
                    loop {
                        let t = stack.pop().expect("tarjan stack");
                        on_stack[t] = false;
                        comp.push(t);
                        if t == s {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

fn block_radius(dfa: &PartialDfa, comp: &[usize]) -> f64 {
    let mut pos = vec![usize::MAX; dfa.states()];
    for (i, &s) in comp.iter().enumerate() {
        pos[s] = i;
    }
    let mut m = DMatrix::<f64>::zeros(comp.len(), comp.len());
    for (i, &s) in comp.iter().enumerate() {
        for x in 0..dfa.alphabet() {
            if let Some(t) = dfa.next(s, x) {
                if pos[t] != usize::MAX {
                    m[(i, pos[t])] += 1.0;
                }
            }
        }
    }
    spectral::spectral_radius(&m)
}

/// Components of the trimmed machine (reachable from the initial state and
/// able to reach an accepting state), each with its Perron root.
fn useful_components(dfa: &PartialDfa) -> Vec<(Vec<usize>, f64)> {
    let reach = dfa.reachable_from(dfa.initial());
    let coreach = dfa.coreachable_to(dfa.accepting());
    let alive: Vec<bool> = reach.iter().zip(&coreach).map(|(a, b)| *a && *b).collect();
    strongly_connected_components(dfa, &alive)
        .into_iter()
        .map(|c| {
            let r = block_radius(dfa, &c);
            (c, r)
        })
        .collect()
}

/// Growth rate `limsup |L(n)|^{1/n}` of the accepted language.
///
/// Unreachable states are dropped, then so are states that cannot reach an
/// accepting state. What remains has a block-triangular reduced matrix
/// whose dominant eigenvalue is the largest Perron root over its strongly
/// connected blocks; each block's dominant eigenvector extends to accepting
/// states. A finite or empty language gives 0.
pub fn growth_rate(dfa: &PartialDfa) -> f64 {
    useful_components(dfa)
        .into_iter()
        .map(|(_, r)| r)
        .fold(0.0, f64::max)
}

/// A partial DFA whose states form one strongly connected component, with
/// the initial state as the only accepting state.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SimplifiedDfa {
    dfa: PartialDfa,
    /// Always true once constructed; kept for reporting.
    pub single_component: bool,
    /// Whether states of the source machine were deleted.
    pub absorbing_removed: bool,
}

impl SimplifiedDfa {
    /// Validates the normal form.
    pub fn new(dfa: PartialDfa) -> Result<Self> {
        if dfa.accepting() != [dfa.initial()] {
            return Err(Error::NotSimplified(
                "the initial state must be the only accepting state".into(),
            ));
        }
        if dfa.transition_count() == 0 {
            return Err(Error::NotSimplified("no transitions".into()));
        }
        let all = vec![true; dfa.states()];
        if strongly_connected_components(&dfa, &all).len() != 1 {
            return Err(Error::NotSimplified("not strongly connected".into()));
        }
        Ok(SimplifiedDfa {
            dfa,
            single_component: true,
            absorbing_removed: false,
        })
    }

    pub fn dfa(&self) -> &PartialDfa {
        &self.dfa
    }

    pub fn into_inner(self) -> PartialDfa {
        self.dfa
    }
}

/// Perron root of the reduced matrix over all states of a simplified
/// machine, by shifted power iteration (independent of the dense path used
/// by [`growth_rate`]).
pub fn growth_rate_simple(dfa: &SimplifiedDfa) -> f64 {
    spectral::perron_power(&dfa.dfa.reduced_matrix().to_dmatrix())
}

/// Restricts `dfa` to one strongly connected component of growth at least
/// `target_growth` (default: the full growth rate), makes its lowest state
/// both initial and sole accepting state, and deletes every other state.
///
/// Among eligible components the one containing the lowest-numbered state
/// wins.
pub fn simplify(dfa: &PartialDfa, target_growth: Option<f64>) -> Result<SimplifiedDfa> {
    let comps = useful_components(dfa);
    let full = comps.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    if full < 1.0 - GROWTH_TOL {
        return Err(Error::ZeroGrowth);
    }
    let target = target_growth.unwrap_or(full);
    if target > full + GROWTH_TOL {
        return Err(Error::Domain(format!(
            "target growth {target} exceeds the machine's growth {full}"
        )));
    }
    let (comp, _) = comps
        .iter()
        .filter(|(_, r)| *r >= target - GROWTH_TOL && *r >= 1.0 - GROWTH_TOL)
        .min_by_key(|(c, _)| c[0])
        .expect("the component attaining the growth rate is eligible");
    let root = comp[0];
    let restricted = dfa.restrict(comp, root, &[root]);
    let mut out = SimplifiedDfa::new(restricted)?;
    out.absorbing_removed = comp.len() < dfa.states();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::block_code_dfa;

    fn c5_block() -> PartialDfa {
        block_code_dfa(
            &[vec![0, 0], vec![1, 2], vec![2, 4], vec![3, 1], vec![4, 3]],
            5,
        )
        .unwrap()
    }

    #[test]
    fn reference_growth_values() {
        let even = block_code_dfa(&[vec![0], vec![2]], 5).unwrap();
        assert!((growth_rate(&even) - 2.0).abs() < 1e-12);
        assert!((growth_rate(&c5_block()) - 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn total_one_state() {
        let m = PartialDfa::from_transitions(1, 3, 0, &[0], (0..3).map(|x| (0, x, 0))).unwrap();
        assert!((growth_rate(&m) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn unreachable_acceptance_is_empty() {
        let m = PartialDfa::from_transitions(2, 2, 0, &[1], [(0, 0, 0), (0, 1, 0)]).unwrap();
        assert_eq!(growth_rate(&m), 0.0);
    }

    #[test]
    fn rejecting_sink_does_not_count() {
        // init accepting, one step into a full-alphabet rejecting loop
        let m = PartialDfa::from_transitions(
            2,
            3,
            0,
            &[0],
            [(0, 0, 1), (1, 0, 1), (1, 1, 1), (1, 2, 1)],
        )
        .unwrap();
        assert_eq!(growth_rate(&m), 0.0);
        // and the prefix-loop case {a,b}* c
        let m =
            PartialDfa::from_transitions(2, 3, 0, &[1], [(0, 0, 0), (0, 1, 0), (0, 2, 1)]).unwrap();
        assert!((growth_rate(&m) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn simplify_fixtures() {
        let c5 = c5_block();
        let s = simplify(&c5, None).unwrap();
        assert_eq!(s.dfa().states(), 6);
        assert!(!s.absorbing_removed);
        assert!((growth_rate_simple(&s) - 5f64.sqrt()).abs() < 1e-9);

        // add a two-state rejecting chain hanging off the root
        let mut big = PartialDfa::new(8, 5, 0, &[0]).unwrap();
        for (s, x, t) in c5.transitions() {
            big.set(s, x, Some(t)).unwrap();
        }
        big.set(1, 1, Some(6)).unwrap();
        big.set(6, 0, Some(7)).unwrap();
        for x in 0..5 {
            big.set(7, x, Some(7)).unwrap();
        }
        assert!((growth_rate(&big) - 5f64.sqrt()).abs() < 1e-9);
        let s = simplify(&big, None).unwrap();
        assert_eq!(s.dfa().states(), 6);
        assert!(s.absorbing_removed);
        assert!((growth_rate(s.dfa()) - 5f64.sqrt()).abs() < 1e-9);

        let even = block_code_dfa(&[vec![0], vec![2]], 5).unwrap();
        assert_eq!(simplify(&even, None).unwrap().dfa(), &even);
    }

    #[test]
    fn simplify_rejects_finite_languages() {
        let m = PartialDfa::from_transitions(2, 2, 0, &[1], [(0, 0, 1)]).unwrap();
        assert!(matches!(simplify(&m, None), Err(Error::ZeroGrowth)));
    }

    #[test]
    fn simplified_form_is_checked() {
        let two = PartialDfa::from_transitions(2, 2, 0, &[0], [(0, 0, 1)]).unwrap();
        assert!(SimplifiedDfa::new(two).is_err());
        let acc = PartialDfa::from_transitions(1, 2, 0, &[], [(0, 0, 0)]).unwrap();
        assert!(SimplifiedDfa::new(acc).is_err());
    }

    #[test]
    fn lower_target_picks_lowest_component() {
        // component {0} grows at 1, component {1,2} at 2
        let m = PartialDfa::from_transitions(
            3,
            2,
            0,
            &[0, 1],
            [
                (0, 0, 0),
                (0, 1, 1),
                (1, 0, 2),
                (1, 1, 2),
                (2, 0, 1),
                (2, 1, 1),
            ],
        )
        .unwrap();
        let s = simplify(&m, None).unwrap();
        assert_eq!(s.dfa().states(), 2);
        let s = simplify(&m, Some(1.0)).unwrap();
        assert_eq!(s.dfa().states(), 1);
        assert!(simplify(&m, Some(3.0)).is_err());
    }
}
