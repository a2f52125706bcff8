//! Capacity bounds: block codes, reversible automata and the closed-form
//! relations between them.

mod cnf;
mod rewind;
mod search;

pub use cnf::{decode_sat_model, export_search_cnf, CnfLayout, SearchCnf};
pub use rewind::{index_digits, rewind_dfa};
pub use search::{search_reversible, search_reversible_naive, SearchOutcome};

use serde::Serialize;

use crate::automata::{growth_rate, PartialDfa};
use crate::error::{Error, Result};
use crate::graph::{power_independence, Graph, VertexTuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    AlphaRoot,
    ThetaRevLower,
    ThetaUpperFromRev,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Codewords(Vec<Vec<usize>>),
    Dfa(PartialDfa),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphId {
    pub vertices: usize,
    pub edges: usize,
}

impl GraphId {
    pub fn of(g: &Graph) -> Self {
        GraphId {
            vertices: g.n(),
            edges: g.edge_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub quantity: Quantity,
    pub value: f64,
    pub witness: Option<Witness>,
    pub n: Option<usize>,
    pub graph: GraphId,
    pub budget_used: u64,
    /// False when a budget ran out and `value` is only what was found.
    pub exact: bool,
}

/// `α(G^⊠n)^{1/n}` with the independent set as codewords.
pub fn block_lower_bound(g: &Graph, n: usize, budget: u64) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::Domain("block length must be at least 1".into()));
    }
    let res = power_independence(g, n, budget);
    let sizes = vec![g.n(); n];
    let codewords = res
        .witness
        .iter()
        .map(|&v| VertexTuple::decode(v, &sizes).map(|t| t.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        quantity: Quantity::AlphaRoot,
        value: (res.size as f64).powf(1.0 / n as f64),
        witness: Some(Witness::Codewords(codewords)),
        n: Some(n),
        graph: GraphId::of(g),
        budget_used: res.nodes,
        exact: res.exact,
    })
}

/// Reversible-capacity lower bound from a capacity estimate:
/// `Θ^{log|G| / (log|G| + log Θ)}`.
pub fn rev_lower_bound(graph_size: usize, theta: f64) -> Result<f64> {
    if graph_size < 2 {
        return Err(Error::Domain(format!("graph size {graph_size} is below 2")));
    }
    if !(theta >= 1.0 && theta.is_finite()) {
        return Err(Error::Domain(format!("capacity {theta} is below 1")));
    }
    let lg = (graph_size as f64).ln();
    let lt = theta.ln();
    Ok((lg * lt / (lg + lt)).exp())
}

/// Capacity upper bound implied by a reversible capacity value:
/// `Θ_REV^{log|G| / (log|G| - log Θ_REV)}`.
pub fn shannon_upper_from_rev(theta_rev: f64, graph_size: usize) -> Result<f64> {
    if theta_rev.is_nan() || theta_rev < 1.0 {
        return Err(Error::Domain(format!(
            "reversible capacity {theta_rev} is below 1"
        )));
    }
    if theta_rev >= graph_size as f64 {
        return Err(Error::Domain(format!(
            "reversible capacity {theta_rev} is not below the graph size {graph_size}"
        )));
    }
    let lg = (graph_size as f64).ln();
    let lr = theta_rev.ln();
    Ok((lr * lg / (lg - lr)).exp())
}

/// Smallest `i` with `|G| + i ≥ |G|^{1 + log|G| / log(1+ε)}`.
pub fn required_join_size(graph_size: usize, epsilon: f64) -> Result<u64> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Domain(format!("epsilon {epsilon} must be positive")));
    }
    if graph_size < 2 {
        return Err(Error::Domain(format!("graph size {graph_size} is below 2")));
    }
    let lg = (graph_size as f64).ln();
    let target = (lg * (1.0 + lg / epsilon.ln_1p())).exp();
    // Absorb rounding noise so exact powers are not bumped up by one.
    let needed = (target * (1.0 - 1e-12)).ceil();
    if needed > u64::MAX as f64 {
        return Err(Error::Domain("required join size overflows".into()));
    }
    Ok((needed as u64).saturating_sub(graph_size as u64))
}

/// Report for a reversible machine found by some search.
pub fn rev_report(g: &Graph, dfa: PartialDfa, budget_used: u64, exact: bool) -> BoundReport {
    BoundReport {
        quantity: Quantity::ThetaRevLower,
        value: growth_rate(&dfa),
        witness: Some(Witness::Dfa(dfa)),
        n: None,
        graph: GraphId::of(g),
        budget_used,
        exact,
    }
}

/// Report for the capacity upper bound implied by `theta_rev`.
pub fn upper_report(g: &Graph, theta_rev: f64) -> Result<BoundReport> {
    Ok(BoundReport {
        quantity: Quantity::ThetaUpperFromRev,
        value: shannon_upper_from_rev(theta_rev, g.n())?,
        witness: None,
        n: None,
        graph: GraphId::of(g),
        budget_used: 0,
        exact: true,
    })
}

/// Whether every pair of codewords has a position with distinguishable
/// symbols; the first offending pair otherwise.
pub(crate) fn check_distinguishable(g: &Graph, codewords: &[Vec<usize>]) -> Result<()> {
    for (i, a) in codewords.iter().enumerate() {
        for b in &codewords[i + 1..] {
            if a.len() != b.len() {
                return Err(Error::UnequalLengths {
                    expected: a.len(),
                    found: b.len(),
                });
            }
            let mut confusable = true;
            for (&x, &y) in a.iter().zip(b) {
                if !g.confusable(x, y)? {
                    confusable = false;
                    break;
                }
            }
            if confusable {
                return Err(Error::ConfusableCodewords(a.clone(), b.clone()));
            }
        }
    }
    Ok(())
}
