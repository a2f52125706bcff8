//! Problem container and the capacity problem for a graph.

use std::fmt::Write as _;

use serde::Serialize;

use super::poly::{fmt_monomial, frac, Monomial, Poly};
use crate::bounds::GraphId;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NcVariable {
    pub name: String,
    pub hermitian: bool,
    /// Weight in the elimination order used by the rewrite rules.
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub group: String,
    pub poly: Poly,
}

/// A valid operator identity `lhs = rhs` used to reduce words; `lhs` is
/// larger than every word of `rhs` in the rewrite order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Monomial,
    pub rhs: Poly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Transition operators acting by multiplication.
    Transition,
    /// Operators acting by conjugation `X ↦ U X U†`.
    Conjugation,
}

/// Orientation of the final-set closure equations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureForm {
    /// `F T F = F T`: the final set is closed under predecessors, so it is
    /// exactly the pairs that can reach the diagonal.
    #[default]
    Predecessor,
    /// `F T F = T F`: the final set is closed under successors.
    Successor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub variant: Variant,
    pub closure: ClosureForm,
    /// Adds `S T_{g,h} = T_{h,g} S` for every pair.
    pub redundant_swap: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            variant: Variant::Transition,
            closure: ClosureForm::default(),
            redundant_swap: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Metadata {
    pub graph: Option<GraphId>,
    pub variant: Option<Variant>,
    pub closure: Option<ClosureForm>,
    pub redundant_swap: bool,
    pub hermitian_only: bool,
    /// Constant added to the objective by the eigenvalue gadget; reported
    /// values subtract it.
    pub objective_shift: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NcProblem {
    pub variables: Vec<NcVariable>,
    pub equalities: Vec<Constraint>,
    pub psd: Vec<Constraint>,
    pub objective: Poly,
    pub rules: Vec<Rule>,
    pub metadata: Metadata,
}

impl NcProblem {
    pub fn new(variables: Vec<NcVariable>) -> Result<Self> {
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::Domain(format!("duplicate variable {}", v.name)));
            }
        }
        let hermitian_only = variables.iter().all(|v| v.hermitian);
        Ok(NcProblem {
            variables,
            equalities: Vec::new(),
            psd: Vec::new(),
            objective: Poly::zero(),
            rules: Vec::new(),
            metadata: Metadata {
                hermitian_only,
                ..Metadata::default()
            },
        })
    }

    pub fn hermitian_flags(&self) -> Vec<bool> {
        self.variables.iter().map(|v| v.hermitian).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn var(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.into()))
    }

    pub fn is_hermitian_only(&self) -> bool {
        self.variables.iter().all(|v| v.hermitian)
    }

    /// Equality and psd counts per group, in order of first appearance.
    pub fn group_counts(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for c in self.equalities.iter().chain(&self.psd) {
            match out.iter_mut().find(|(g, _)| *g == c.group) {
                Some((_, n)) => *n += 1,
                None => out.push((c.group.clone(), 1)),
            }
        }
        out
    }

    /// Checks that every polynomial uses declared variables, Hermitian
    /// variables carry no adjoint flags, and the Hermitian-only flag is
    /// truthful.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermitian_flags();
        let polys = self
            .equalities
            .iter()
            .chain(&self.psd)
            .map(|c| &c.poly)
            .chain([&self.objective])
            .chain(self.rules.iter().map(|r| &r.rhs));
        for p in polys {
            for (m, _) in p.terms() {
                for l in &m.0 {
                    if l.var >= herm.len() {
                        return Err(Error::UnknownVariable(format!("#{}", l.var)));
                    }
                    if l.adj && herm[l.var] {
                        return Err(Error::Domain(format!(
                            "adjoint flag on Hermitian variable {}",
                            self.variables[l.var].name
                        )));
                    }
                }
            }
        }
        if self.metadata.hermitian_only {
            if !self.is_hermitian_only() {
                return Err(Error::Domain(
                    "flagged Hermitian-only but has non-Hermitian variables".into(),
                ));
            }
            let ok = self
                .equalities
                .iter()
                .chain(&self.psd)
                .all(|c| c.poly.is_self_adjoint(&herm))
                && self.objective.is_self_adjoint(&herm);
            if !ok {
                return Err(Error::Domain(
                    "flagged Hermitian-only but has a non-self-adjoint polynomial".into(),
                ));
            }
        }
        Ok(())
    }

    /// Plain-text listing, one item per line, for golden comparisons.
    pub fn dump(&self) -> String {
        let names = self.names();
        let mut out = String::new();
        let _ = writeln!(out, "variables {}", self.variables.len());
        for v in &self.variables {
            let kind = if v.hermitian { "hermitian" } else { "general" };
            let _ = writeln!(out, "var {} {kind} weight {}", v.name, v.weight);
        }
        let _ = writeln!(out, "objective {}", self.objective.display(&names));
        if self.metadata.objective_shift != 0.0 {
            let _ = writeln!(out, "objective_shift {}", self.metadata.objective_shift);
        }
        for c in &self.equalities {
            let _ = writeln!(out, "eq[{}] {} = 0", c.group, c.poly.display(&names));
        }
        for c in &self.psd {
            let _ = writeln!(out, "psd[{}] {} >= 0", c.group, c.poly.display(&names));
        }
        for r in &self.rules {
            let _ = writeln!(
                out,
                "rule {} -> {}",
                fmt_monomial(&r.lhs, &names),
                r.rhs.display(&names)
            );
        }
        for w in &self.metadata.warnings {
            let _ = writeln!(out, "warning {w}");
        }
        out
    }
}

struct Names {
    n: usize,
}

impl Names {
    const S: usize = 0;
    const D: usize = 1;
    const F: usize = 2;

    fn left(&self, g: usize) -> usize {
        3 + g
    }

    fn right(&self, g: usize) -> usize {
        3 + self.n + g
    }

    fn pair(&self, g: usize, h: usize) -> usize {
        3 + 2 * self.n + g * self.n + h
    }
}

fn letter_poly(v: usize) -> Poly {
    Poly::var(v)
}

fn word(vars: &[usize]) -> Poly {
    vars.iter()
        .fold(Poly::one(), |acc, &v| acc.mul(&letter_poly(v)))
}

fn rule(lhs: Vec<super::poly::Letter>, rhs: Poly) -> Rule {
    Rule {
        lhs: Monomial(lhs),
        rhs,
    }
}

/// Capacity problem for `g`: variables `S, D, F`, the left and right
/// transition operators `T(g,_)`, `T(_,g)` and the pair operators
/// `T(g,h)` (named `U…` in the conjugation variant), with the constraint
/// families grouped by name.
pub fn build_capacity_problem(g: &Graph, opts: BuildOptions) -> Result<NcProblem> {
    use super::poly::Letter;
    let n = g.n();
    if n < 2 {
        return Err(Error::Domain(format!(
            "graph on {n} vertices; at least 2 are required"
        )));
    }
    let t = match opts.variant {
        Variant::Transition => "T",
        Variant::Conjugation => "U",
    };
    let ix = Names { n };
    let mut variables = vec![
        NcVariable {
            name: "S".into(),
            hermitian: true,
            weight: 1,
        },
        NcVariable {
            name: "D".into(),
            hermitian: true,
            weight: 1,
        },
        NcVariable {
            name: "F".into(),
            hermitian: true,
            weight: 1,
        },
    ];
    for v in 0..n {
        variables.push(NcVariable {
            name: format!("{t}({v},_)"),
            hermitian: false,
            weight: 1,
        });
    }
    for v in 0..n {
        variables.push(NcVariable {
            name: format!("{t}(_,{v})"),
            hermitian: false,
            weight: 1,
        });
    }
    for a in 0..n {
        for b in 0..n {
            variables.push(NcVariable {
                name: format!("{t}({a},{b})"),
                hermitian: false,
                weight: 3,
            });
        }
    }
    let mut p = NcProblem::new(variables)?;
    let herm = p.hermitian_flags();
    let adj = |q: &Poly| q.adjoint(&herm);
    let (s, d, f) = (
        letter_poly(Names::S),
        letter_poly(Names::D),
        letter_poly(Names::F),
    );
    let one = Poly::one();
    let mut eq = |group: &str, poly: Poly| {
        p.equalities.push(Constraint {
            group: group.into(),
            poly,
        });
    };

    for a in 0..n {
        for b in 0..n {
            eq(
                "commutation",
                word(&[ix.right(b), ix.left(a)]).sub(&word(&[ix.left(a), ix.right(b)])),
            );
        }
    }
    for a in 0..n {
        for b in 0..n {
            eq(
                "product",
                letter_poly(ix.pair(a, b)).sub(&word(&[ix.left(a), ix.right(b)])),
            );
        }
    }
    let sides: Vec<usize> = (0..n).flat_map(|v| [ix.left(v), ix.right(v)]).collect();
    for &x in &sides {
        let xp = letter_poly(x);
        let xpx = xp.mul(&adj(&xp)).mul(&xp);
        eq("partial_isometry", xpx.sub(&xp));
    }
    eq("involution", s.mul(&s).sub(&one));
    eq("involution", d.mul(&d).sub(&d));
    eq("involution", f.mul(&f).sub(&f));
    for v in 0..n {
        eq(
            "swap",
            s.mul(&letter_poly(ix.left(v)))
                .sub(&letter_poly(ix.right(v)).mul(&s)),
        );
    }
    if opts.redundant_swap {
        for a in 0..n {
            for b in 0..n {
                eq(
                    "swap_pair",
                    s.mul(&letter_poly(ix.pair(a, b)))
                        .sub(&letter_poly(ix.pair(b, a)).mul(&s)),
                );
            }
        }
    }
    eq("projector_commutation", s.mul(&d).sub(&d.mul(&s)));
    eq("projector_commutation", s.mul(&f).sub(&f.mul(&s)));
    eq("projector_commutation", d.mul(&f).sub(&f.mul(&d)));

    let edges: Vec<(usize, usize)> = g.edges().collect();
    let closure = |x: &Poly, proj: &Poly, form: ClosureForm| -> Poly {
        match (opts.variant, form) {
            (Variant::Transition, ClosureForm::Predecessor) => {
                proj.mul(x).mul(proj).sub(&proj.mul(x))
            }
            (Variant::Transition, ClosureForm::Successor) => proj.mul(x).mul(proj).sub(&x.mul(proj)),
            (Variant::Conjugation, ClosureForm::Predecessor) => {
                let back = adj(x).mul(proj).mul(x);
                proj.mul(&back).mul(proj).sub(&back)
            }
            (Variant::Conjugation, ClosureForm::Successor) => {
                let fwd = x.mul(proj).mul(&adj(x));
                proj.mul(&fwd).mul(proj).sub(&fwd)
            }
        }
    };
    for v in 0..n {
        // The diagonal is closed under equal steps.
        eq(
            "diagonal_closure",
            closure(&letter_poly(ix.pair(v, v)), &d, ClosureForm::Successor),
        );
    }
    for v in 0..n {
        eq(
            "final_closure",
            closure(&letter_poly(ix.pair(v, v)), &f, opts.closure),
        );
    }
    for &(a, b) in &edges {
        eq(
            "final_closure_edges",
            closure(&letter_poly(ix.pair(a, b)), &f, opts.closure),
        );
    }
    for &(a, b) in &edges {
        let x = letter_poly(ix.pair(a, b));
        let poly = match opts.variant {
            Variant::Transition => f.mul(&x).mul(&d),
            Variant::Conjugation => f.mul(&x).mul(&d).mul(&adj(&x)).mul(&f),
        };
        eq("rejection", poly);
    }

    for &x in &sides {
        let xp = letter_poly(x);
        for prod in [adj(&xp).mul(&xp), xp.mul(&adj(&xp))] {
            p.psd.push(Constraint {
                group: "contraction".into(),
                poly: prod.clone(),
            });
            p.psd.push(Constraint {
                group: "contraction".into(),
                poly: one.sub(&prod),
            });
        }
    }
    p.psd.push(Constraint {
        group: "final_contains_diagonal".into(),
        poly: f.sub(&d),
    });

    let mut sum = Poly::zero();
    for v in 0..n {
        let x = letter_poly(ix.pair(v, v));
        sum = sum.add(&x.add(&adj(&x)).scale(frac(1, 2)));
    }
    p.objective = d.mul(&sum).mul(&d);

    // Rewrite rules, each a consequence of the equalities above.
    let l = Letter::new;
    let dag = Letter::dagger;
    let (ls, ld, lf) = (l(Names::S), l(Names::D), l(Names::F));
    let rules = &mut p.rules;
    rules.push(rule(vec![ls, ls], one.clone()));
    rules.push(rule(vec![ld, ld], d.clone()));
    rules.push(rule(vec![lf, lf], f.clone()));
    rules.push(rule(vec![ld, ls], s.mul(&d)));
    rules.push(rule(vec![lf, ls], s.mul(&f)));
    rules.push(rule(vec![lf, ld], d.mul(&f)));
    for a in 0..n {
        for b in 0..n {
            let (x, y) = (ix.left(a), ix.right(b));
            rules.push(rule(vec![l(y), l(x)], word(&[x, y])));
            rules.push(rule(
                vec![dag(y), dag(x)],
                Poly::var_adj(x).mul(&Poly::var_adj(y)),
            ));
        }
    }
    for a in 0..n {
        for b in 0..n {
            let (x, y) = (ix.left(a), ix.right(b));
            rules.push(rule(vec![l(ix.pair(a, b))], word(&[x, y])));
            rules.push(rule(
                vec![dag(ix.pair(a, b))],
                Poly::var_adj(y).mul(&Poly::var_adj(x)),
            ));
        }
    }
    for v in 0..n {
        let (x, y) = (ix.left(v), ix.right(v));
        rules.push(rule(vec![l(y), ls], s.mul(&Poly::var(x))));
        rules.push(rule(vec![l(x), ls], s.mul(&Poly::var(y))));
        rules.push(rule(vec![dag(y), ls], s.mul(&Poly::var_adj(x))));
        rules.push(rule(vec![dag(x), ls], s.mul(&Poly::var_adj(y))));
    }

    p.metadata.graph = Some(GraphId::of(g));
    p.metadata.variant = Some(opts.variant);
    p.metadata.closure = Some(opts.closure);
    p.metadata.redundant_swap = opts.redundant_swap;
    p.validate()?;
    Ok(p)
}
