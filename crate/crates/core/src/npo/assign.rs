//! Concrete operators for problem variables.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use serde::Serialize;

use super::problem::{NcProblem, Variant};
use crate::automata::PartialDfa;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{hermitian_eigen, perron_power, SCHUR_MAX_ITERS};
use crate::verify::PairReach;

pub type CMat = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorAssignment {
    pub dim: usize,
    pub matrices: BTreeMap<String, CMat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AssignmentReport {
    pub max_equality_residual: f64,
    /// Smallest eigenvalue over all psd constraints; infinite when there
    /// are none.
    pub min_psd_eigenvalue: f64,
    pub objective_value: f64,
}

impl OperatorAssignment {
    /// Matrices in problem order.
    pub fn ordered(&self, p: &NcProblem) -> Result<Vec<CMat>> {
        p.variables
            .iter()
            .map(|v| {
                let m = self
                    .matrices
                    .get(&v.name)
                    .ok_or_else(|| Error::UnknownVariable(format!("{} has no matrix", v.name)))?;
                if m.nrows() != self.dim || m.ncols() != self.dim {
                    return Err(Error::Dimension(format!(
                        "{} is {}x{}, expected {}",
                        v.name,
                        m.nrows(),
                        m.ncols(),
                        self.dim
                    )));
                }
                if v.hermitian && (m - m.adjoint()).norm() > HERMITIAN_TOL {
                    return Err(Error::Domain(format!("{} must be Hermitian", v.name)));
                }
                Ok(m.clone())
            })
            .collect()
    }
}

fn is_hermitian(m: &CMat) -> bool {
    (m - m.adjoint()).norm() <= HERMITIAN_TOL * (1.0 + m.norm())
}

fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Largest real eigenvalue; for Hermitian input the largest eigenvalue.
/// `NaN` when the Schur iteration fails on a matrix that is not
/// entrywise nonnegative.
pub fn top_real_eigenvalue(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if is_hermitian(m) {
        return hermitian_eigen(m).0.max();
    }
    let n = m.nrows();
    let real = if m.iter().all(|z| z.im == 0.0) {
        m.map(|z| z.re)
    } else {
        // Spectrum of [[A, -B], [B, A]] is that of m together with its conjugate.
        DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let z = m[(i % n, j % n)];
            match (i < n, j < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        })
    };
    let scale = 1e-9 * (1.0 + m.norm());
    match Schur::try_new(real.clone(), f64::EPSILON, SCHUR_MAX_ITERS) {
        Some(schur) => schur
            .complex_eigenvalues()
            .iter()
            .filter(|z| z.im.abs() <= scale)
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max),
        None if real.iter().all(|&x| x >= 0.0) => perron_power(&real),
        None => f64::NAN,
    }
}

/// Eigenvector of the largest eigenvalue of a Hermitian matrix.
pub fn top_eigenvector(m: &CMat) -> DVector<Complex64> {
    let (vals, vecs) = hermitian_eigen(m);
    vecs.column(vals.imax()).into_owned()
}

pub fn verify_assignment(p: &NcProblem, a: &OperatorAssignment) -> Result<AssignmentReport> {
    let mats = a.ordered(p)?;
    let max_equality_residual = p
        .equalities
        .iter()
        .map(|c| spectral_norm(&c.poly.evaluate(&mats, a.dim)))
        .fold(0.0, f64::max);
    let min_psd_eigenvalue = p
        .psd
        .iter()
        .map(|c| {
            let m = c.poly.evaluate(&mats, a.dim);
            if m.is_empty() {
                f64::INFINITY
            } else {
                hermitian_eigen(&m).0.min()
            }
        })
        .fold(f64::INFINITY, f64::min);
    let objective_value =
        top_real_eigenvalue(&p.objective.evaluate(&mats, a.dim)) - p.metadata.objective_shift;
    Ok(AssignmentReport {
        max_equality_residual,
        min_psd_eigenvalue,
        objective_value,
    })
}

fn real_matrix(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Operators on pairs of states of a reversible automaton over the vertex
/// set of `g`: `S` swaps the two factors, `D` projects onto equal pairs,
/// `F` onto pairs that can reach an equal pair along confusable words, and
/// the transition operators move the left, right or both factors.
/// Variables split into parts get `(X + X†)/2` and `(X - X†)/2i`.
pub fn embed_reversible_dfa(
    p: &NcProblem,
    g: &Graph,
    dfa: &PartialDfa,
) -> Result<OperatorAssignment> {
    if !dfa.is_reversible() {
        return Err(Error::NotReversible);
    }
    let n = g.n();
    if dfa.alphabet() != n {
        return Err(Error::AlphabetMismatch {
            alphabet: dfa.alphabet(),
            graph: n,
        });
    }
    let d = dfa.states();
    let reach = PairReach::compute(g, dfa)?;
    let t = match p.metadata.variant {
        Some(Variant::Conjugation) => "U",
        _ => "T",
    };
    let step: Vec<DMatrix<f64>> = (0..n)
        .map(|x| {
            let mut m = DMatrix::zeros(d, d);
            for s in 0..d {
                if let Some(u) = dfa.next(s, x) {
                    m[(u, s)] = 1.0;
                }
            }
            m
        })
        .collect();
    let id = DMatrix::<f64>::identity(d, d);
    let dim = d * d;
    let mut base: BTreeMap<String, CMat> = BTreeMap::new();
    let mut swap = DMatrix::zeros(dim, dim);
    let mut diag = DMatrix::zeros(dim, dim);
    let mut fin = DMatrix::zeros(dim, dim);
    for i in 0..d {
        for j in 0..d {
            swap[(j * d + i, i * d + j)] = 1.0;
            if i == j {
                diag[(i * d + j, i * d + j)] = 1.0;
            }
            if i == j || reach.get(i, j) {
                fin[(i * d + j, i * d + j)] = 1.0;
            }
        }
    }
    base.insert("S".into(), real_matrix(&swap));
    base.insert("D".into(), real_matrix(&diag));
    base.insert("F".into(), real_matrix(&fin));
    for x in 0..n {
        base.insert(format!("{t}({x},_)"), real_matrix(&step[x].kronecker(&id)));
        base.insert(format!("{t}(_,{x})"), real_matrix(&id.kronecker(&step[x])));
        for y in 0..n {
            base.insert(
                format!("{t}({x},{y})"),
                real_matrix(&step[x].kronecker(&step[y])),
            );
        }
    }
    let mut matrices = BTreeMap::new();
    for v in &p.variables {
        let m = if let Some(m) = base.get(&v.name) {
            m.clone()
        } else if let Some(m) = v.name.strip_suffix(".h").and_then(|b| base.get(b)) {
            (m + m.adjoint()) * Complex64::new(0.5, 0.0)
        } else if let Some(m) = v.name.strip_suffix(".a").and_then(|b| base.get(b)) {
            (m - m.adjoint()) * Complex64::new(0.0, -0.5)
        } else {
            return Err(Error::UnknownVariable(format!(
                "{} has no embedding",
                v.name
            )));
        };
        matrices.insert(v.name.clone(), m);
    }
    Ok(OperatorAssignment { dim, matrices })
}

/// The operator named `name`, rebuilt from its parts when split.
pub fn operator(a: &OperatorAssignment, name: &str) -> Result<CMat> {
    if let Some(m) = a.matrices.get(name) {
        return Ok(m.clone());
    }
    let h = a.matrices.get(&format!("{name}.h"));
    let an = a.matrices.get(&format!("{name}.a"));
    match (h, an) {
        (Some(h), Some(x)) => Ok(h + x * Complex64::new(0.0, 1.0)),
        _ => Err(Error::UnknownVariable(name.into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairSpaceValues {
    /// Largest real eigenvalue of `D (Σ_x T(x,x)) D`.
    pub diagonal: f64,
    /// Largest real eigenvalue of `Σ_{x,y} T(x,y)`.
    pub pair_sum: f64,
    /// Square root of `pair_sum`.
    pub pair_root: f64,
}

pub fn pair_space_values(
    p: &NcProblem,
    a: &OperatorAssignment,
    alphabet: usize,
) -> Result<PairSpaceValues> {
    let t = match p.metadata.variant {
        Some(Variant::Conjugation) => "U",
        _ => "T",
    };
    let d = operator(a, "D")?;
    let mut diag_sum = CMat::zeros(a.dim, a.dim);
    let mut all = CMat::zeros(a.dim, a.dim);
    for x in 0..alphabet {
        diag_sum += operator(a, &format!("{t}({x},{x})"))?;
        for y in 0..alphabet {
            all += operator(a, &format!("{t}({x},{y})"))?;
        }
    }
    let diagonal = top_real_eigenvalue(&(&d * diag_sum * &d));
    let pair_sum = top_real_eigenvalue(&all);
    Ok(PairSpaceValues {
        diagonal,
        pair_sum,
        pair_root: pair_sum.max(0.0).sqrt(),
    })
}
