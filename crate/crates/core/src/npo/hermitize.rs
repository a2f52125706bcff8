//! Reduction to Hermitian variables and the eigenvalue gadget.

use num_rational::Rational64;
use num_traits::Zero;

use super::poly::{frac, imag_unit, real, Letter, Monomial, Poly};
use super::problem::{Constraint, NcProblem, NcVariable, Rule};
use crate::error::{Error, Result};

/// `(q + q†) / 2`.
pub fn hermitian_part(q: &Poly, hermitian: &[bool]) -> Poly {
    q.add(&q.adjoint(hermitian)).scale(frac(1, 2))
}

/// `(q - q†) / 2i`.
pub fn anti_hermitian_part(q: &Poly, hermitian: &[bool]) -> Poly {
    q.sub(&q.adjoint(hermitian))
        .scale(-imag_unit() * frac(1, 2))
}

/// Index map from original variables to their Hermitian replacements.
#[derive(Clone, Debug)]
pub struct PartMap {
    /// `(h, Some(a))` for a split variable, `(v, None)` for a kept one.
    pub parts: Vec<(usize, Option<usize>)>,
    /// Number of Hermitian variables after the split.
    pub len: usize,
}

impl PartMap {
    fn substitution(&self) -> impl Fn(Letter) -> Poly + '_ {
        move |l: Letter| match self.parts[l.var] {
            (v, None) => Poly::var(v),
            (h, Some(a)) => {
                let im = Poly::var(a).scale(imag_unit());
                if l.adj {
                    Poly::var(h).sub(&im)
                } else {
                    Poly::var(h).add(&im)
                }
            }
        }
    }

    pub fn apply(&self, q: &Poly) -> Poly {
        q.substitute(&self.substitution())
    }
}

fn split_variables(p: &NcProblem) -> (Vec<NcVariable>, PartMap) {
    let mut vars = Vec::new();
    let mut parts = Vec::new();
    for v in &p.variables {
        if v.hermitian {
            parts.push((vars.len(), None));
            vars.push(v.clone());
        } else {
            parts.push((vars.len(), Some(vars.len() + 1)));
            for suffix in ["h", "a"] {
                vars.push(NcVariable {
                    name: format!("{}.{suffix}", v.name),
                    hermitian: true,
                    weight: v.weight,
                });
            }
        }
    }
    let len = vars.len();
    (vars, PartMap { parts, len })
}

fn flip_letters(m: &Monomial, hermitian: &[bool]) -> Monomial {
    Monomial(
        m.0.iter()
            .map(|l| Letter {
                var: l.var,
                adj: !hermitian[l.var] && !l.adj,
            })
            .collect(),
    )
}

fn flip_poly(q: &Poly, hermitian: &[bool]) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in q.terms() {
        out.add_term(flip_letters(m, hermitian), *c);
    }
    out
}

fn general_count(m: &Monomial, hermitian: &[bool]) -> usize {
    m.0.iter().filter(|l| !hermitian[l.var]).count()
}

/// Rules over the part variables implied by `rules`, plus a note for each
/// rule that has no such translation.
fn translate_rules(p: &NcProblem, map: &PartMap) -> (Vec<Rule>, Vec<String>) {
    let herm = p.hermitian_flags();
    let names = p.names();
    let mut out = Vec::new();
    let mut notes = Vec::new();
    let pick = |m: &Monomial, part: usize| -> Monomial {
        Monomial(
            m.0.iter()
                .map(|l| match map.parts[l.var] {
                    (v, None) => Letter::new(v),
                    (h, Some(a)) => Letter::new(if part == 0 { h } else { a }),
                })
                .collect(),
        )
    };
    for r in &p.rules {
        let lhs_general = general_count(&r.lhs, &herm);
        let rhs_general: Vec<usize> = r
            .rhs
            .terms()
            .map(|(m, _)| general_count(m, &herm))
            .collect();
        let any_adj = r
            .lhs
            .0
            .iter()
            .chain(r.rhs.terms().flat_map(|(m, _)| m.0.iter()))
            .any(|l| l.adj);
        if lhs_general == 0 && rhs_general.iter().all(|&c| c == 0) {
            let mut rhs = Poly::zero();
            for (m, c) in r.rhs.terms() {
                rhs.add_term(pick(m, 0), *c);
            }
            out.push(Rule {
                lhs: pick(&r.lhs, 0),
                rhs,
            });
            continue;
        }
        if any_adj {
            // Covered by the partner rule without adjoints, if present.
            continue;
        }
        if r.lhs.0.len() == 1 && lhs_general == 1 {
            let (h, a) = match map.parts[r.lhs.0[0].var] {
                (h, Some(a)) => (h, a),
                (_, None) => unreachable!("general letter without parts"),
            };
            let sub = map.apply(&r.rhs);
            let new_herm = vec![true; map.len];
            out.push(Rule {
                lhs: Monomial(vec![Letter::new(h)]),
                rhs: hermitian_part(&sub, &new_herm),
            });
            out.push(Rule {
                lhs: Monomial(vec![Letter::new(a)]),
                rhs: anti_hermitian_part(&sub, &new_herm),
            });
            continue;
        }
        let partner = Rule {
            lhs: flip_letters(&r.lhs, &herm),
            rhs: flip_poly(&r.rhs, &herm),
        };
        if lhs_general == 1 && rhs_general.iter().all(|&c| c == 1) && p.rules.contains(&partner) {
            for part in 0..2 {
                let mut rhs = Poly::zero();
                for (m, c) in r.rhs.terms() {
                    rhs.add_term(pick(m, part), *c);
                }
                out.push(Rule {
                    lhs: pick(&r.lhs, part),
                    rhs,
                });
            }
            continue;
        }
        notes.push(format!(
            "rule {} -> {} has no Hermitian form and was dropped",
            super::poly::fmt_monomial(&r.lhs, &names),
            r.rhs.display(&names)
        ));
    }
    (out, notes)
}

/// Replaces every non-Hermitian variable `X` by Hermitian parts `X.h`,
/// `X.a` with `X = X.h + i X.a`. Equalities split into their Hermitian
/// and anti-Hermitian parts (one constraint when the other part vanishes);
/// psd constraints are substituted. A non-Hermitian objective first goes
/// through [`eigen_gadget`] with shift 0.
pub fn hermitize(p: &NcProblem) -> Result<NcProblem> {
    let herm = p.hermitian_flags();
    if !p.objective.is_self_adjoint(&herm) {
        let mut with_gadget = eigen_gadget(p, &p.objective, 0.0)?;
        with_gadget
            .metadata
            .warnings
            .push("objective is not Hermitian; replaced by its eigenvalue gadget".into());
        return hermitize(&with_gadget);
    }
    let (vars, map) = split_variables(p);
    let new_herm = vec![true; vars.len()];
    let mut out = NcProblem::new(vars)?;
    for c in &p.equalities {
        let q = map.apply(&c.poly);
        let (h, a) = (
            hermitian_part(&q, &new_herm),
            anti_hermitian_part(&q, &new_herm),
        );
        match (h.is_zero(), a.is_zero()) {
            (_, true) => out.equalities.push(Constraint {
                group: c.group.clone(),
                poly: h,
            }),
            (true, false) => out.equalities.push(Constraint {
                group: c.group.clone(),
                poly: a,
            }),
            (false, false) => {
                out.equalities.push(Constraint {
                    group: format!("{}.h", c.group),
                    poly: h,
                });
                out.equalities.push(Constraint {
                    group: format!("{}.a", c.group),
                    poly: a,
                });
            }
        }
    }
    for c in &p.psd {
        out.psd.push(Constraint {
            group: c.group.clone(),
            poly: map.apply(&c.poly),
        });
    }
    out.objective = map.apply(&p.objective);
    let (rules, notes) = translate_rules(p, &map);
    out.rules = rules;
    out.metadata = p.metadata.clone();
    out.metadata.hermitian_only = true;
    out.metadata.warnings.extend(notes);
    out.validate()?;
    Ok(out)
}

/// Adds a Hermitian variable `P` with `(M + kI) P = P²` and makes `P` the
/// objective. On any feasible point the spectrum of `P` lies in the
/// spectrum of `M + kI` together with 0, so the optimum of `P` is the
/// largest eigenvalue of `M` plus `k`; `k` is stored as the shift.
pub fn eigen_gadget(p: &NcProblem, m: &Poly, shift: f64) -> Result<NcProblem> {
    if !shift.is_finite() {
        return Err(Error::Domain(format!("shift {shift} is not finite")));
    }
    let k = Rational64::approximate_float(shift)
        .ok_or_else(|| Error::Domain(format!("shift {shift} has no rational approximation")))?;
    if m.variables().any(|v| v >= p.variables.len()) {
        return Err(Error::UnknownVariable(
            "gadget operator uses an undeclared variable".into(),
        ));
    }
    let mut name = "P".to_string();
    let mut i = 1;
    while p.index_of(&name).is_some() {
        name = format!("P{i}");
        i += 1;
    }
    let mut vars = p.variables.clone();
    let pv = vars.len();
    vars.push(NcVariable {
        name,
        hermitian: true,
        weight: 1,
    });
    let mut out = NcProblem::new(vars)?;
    out.equalities = p.equalities.clone();
    out.psd = p.psd.clone();
    out.rules = p.rules.clone();
    out.metadata = p.metadata.clone();
    let pp = Poly::var(pv);
    let shifted = m.add(&Poly::constant(real(k)));
    out.equalities.push(Constraint {
        group: "eigen_gadget".into(),
        poly: shifted.mul(&pp).sub(&pp.mul(&pp)),
    });
    out.objective = pp;
    let herm = out.hermitian_flags();
    out.metadata.hermitian_only =
        out.is_hermitian_only() && out.equalities.iter().all(|c| c.poly.is_self_adjoint(&herm));
    if !k.is_zero() {
        out.metadata.objective_shift += shift;
    }
    out.validate()?;
    Ok(out)
}
