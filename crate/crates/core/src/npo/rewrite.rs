//! Word reduction by oriented operator identities.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;

use super::poly::{fmt_monomial, Letter, Monomial, Poly};
use super::problem::{NcProblem, Rule};

/// Weighted degree, then lexicographic by letter; compatible with
/// concatenation, so every oriented rule strictly decreases words.
pub fn rule_order(weights: &[u32], a: &Monomial, b: &Monomial) -> Ordering {
    let w = |m: &Monomial| m.0.iter().map(|l| weights[l.var] as u64).sum::<u64>();
    w(a).cmp(&w(b)).then_with(|| a.0.cmp(&b.0))
}

#[derive(Debug)]
pub struct RuleSet {
    rules: Vec<Rule>,
    all: Vec<usize>,
    memo: RefCell<HashMap<Monomial, Poly>>,
}

impl RuleSet {
    /// Keeps the rules whose left side dominates the right side; returns
    /// a warning for each dropped rule.
    pub fn new(rules: &[Rule], weights: &[u32], names: &[String]) -> (Self, Vec<String>) {
        let mut kept = Vec::new();
        let mut warnings = Vec::new();
        for r in rules {
            let ok = !r.lhs.0.is_empty()
                && r.rhs
                    .terms()
                    .all(|(m, _)| rule_order(weights, &r.lhs, m) == Ordering::Greater);
            if ok {
                kept.push(r.clone());
            } else {
                warnings.push(format!(
                    "rule {} -> {} is not decreasing and was dropped",
                    fmt_monomial(&r.lhs, names),
                    r.rhs.display(names)
                ));
            }
        }
        let set = RuleSet {
            all: (0..kept.len()).collect(),
            rules: kept,
            memo: RefCell::new(HashMap::new()),
        };
        (set, warnings)
    }

    pub fn for_problem(p: &NcProblem) -> (Self, Vec<String>) {
        let weights: Vec<u32> = p.variables.iter().map(|v| v.weight).collect();
        RuleSet::new(&p.rules, &weights, &p.names())
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn find(&self, m: &Monomial, order: &[usize], rightmost: bool) -> Option<(usize, usize)> {
        let positions: Box<dyn Iterator<Item = usize>> = if rightmost {
            Box::new((0..m.0.len()).rev())
        } else {
            Box::new(0..m.0.len())
        };
        for pos in positions {
            for &r in order {
                let lhs = &self.rules[r].lhs.0;
                if m.0[pos..].starts_with(lhs) {
                    return Some((r, pos));
                }
            }
        }
        None
    }

    fn apply(&self, m: &Monomial, r: usize, pos: usize) -> Poly {
        let lhs_len = self.rules[r].lhs.0.len();
        let prefix = Poly::monomial(Monomial(m.0[..pos].to_vec()));
        let suffix = Poly::monomial(Monomial(m.0[pos + lhs_len..].to_vec()));
        prefix.mul(&self.rules[r].rhs).mul(&suffix)
    }

    pub fn is_normal(&self, m: &Monomial) -> bool {
        self.find(m, &self.all, false).is_none()
    }

    pub fn reduce_monomial(&self, m: &Monomial) -> Poly {
        if let Some(p) = self.memo.borrow().get(m) {
            return p.clone();
        }
        let out = match self.find(m, &self.all, false) {
            None => Poly::monomial(m.clone()),
            Some((r, pos)) => self.reduce(&self.apply(m, r, pos)),
        };
        self.memo.borrow_mut().insert(m.clone(), out.clone());
        out
    }

    pub fn reduce(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            out = out.add(&self.reduce_monomial(m).scale(*c));
        }
        out
    }

    /// Reduction that tries rules in the given order and rewrites the
    /// rightmost match first; without memoization.
    pub fn reduce_with_priority(&self, p: &Poly, priority: &[usize]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let reduced = match self.find(m, priority, true) {
                None => Poly::monomial(m.clone()),
                Some((r, pos)) => self.reduce_with_priority(&self.apply(m, r, pos), priority),
            };
            out = out.add(&reduced.scale(*c));
        }
        out
    }

    /// Normal words of degree at most `max_degree` over `letters`, in
    /// increasing degree, then letter order.
    pub fn normal_words(&self, letters: &[Letter], max_degree: usize) -> Vec<Monomial> {
        let mut letters = letters.to_vec();
        letters.sort();
        let mut out = vec![Monomial::identity()];
        let mut layer = vec![Monomial::identity()];
        for _ in 0..max_degree {
            let mut next = Vec::new();
            for w in &layer {
                for &l in &letters {
                    let mut v = w.clone();
                    v.0.push(l);
                    if self.is_normal(&v) {
                        next.push(v);
                    }
                }
            }
            next.sort();
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(lhs: &[usize], rhs: Poly) -> Rule {
        Rule {
            lhs: Monomial(lhs.iter().map(|&v| Letter::new(v)).collect()),
            rhs,
        }
    }

    #[test]
    fn involution_and_projector() {
        // S = 0, D = 1.
        let rules = vec![
            rule(&[0, 0], Poly::one()),
            rule(&[1, 1], Poly::var(1)),
            rule(&[1, 0], Poly::var(0).mul(&Poly::var(1))),
        ];
        let names = vec!["S".to_string(), "D".to_string()];
        let (set, warnings) = RuleSet::new(&rules, &[1, 1], &names);
        assert!(warnings.is_empty());
        let ssdd = Monomial(vec![
            Letter::new(0),
            Letter::new(0),
            Letter::new(1),
            Letter::new(1),
        ]);
        assert_eq!(set.reduce_monomial(&ssdd), Poly::var(1));
        let dsd = Monomial(vec![Letter::new(1), Letter::new(0), Letter::new(1)]);
        assert_eq!(set.reduce_monomial(&dsd), Poly::var(0).mul(&Poly::var(1)));
        let words = set.normal_words(&[Letter::new(0), Letter::new(1)], 3);
        // 1, S, D, SD.
        assert_eq!(words.len(), 4);
    }

    #[test]
    fn increasing_rules_are_dropped() {
        let rules = vec![rule(&[0], Poly::var(1).mul(&Poly::var(1)))];
        let (set, warnings) = RuleSet::new(&rules, &[1, 1], &["X".into(), "Y".into()]);
        assert!(set.is_empty());
        assert_eq!(warnings.len(), 1);
        let (set, warnings) = RuleSet::new(&rules, &[3, 1], &["X".into(), "Y".into()]);
        assert_eq!(set.len(), 1);
        assert!(warnings.is_empty());
    }
}
