//! Quantum finite automata with a unitary per symbol and accept, reject and
//! neutral projectors.
//!
//! A string `s_1 … s_n` is accepted with probability
//! `‖A · U_{s_n} N ⋯ U_{s_1} N · init‖²`: project onto the neutral space,
//! apply the symbol's unitary, and measure acceptance once at the end.
//!
//! Two measurement layouts are accepted. In the Kondacs–Watrous layout the
//! three projectors are pairwise orthogonal and sum to the identity. In the
//! final-acceptance layout `A ≤ N` and `N + R = I`; machines embedded from
//! reversible automata use it, since their initial state is both live and
//! accepting.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::automata::PartialDfa;
use crate::error::{Error, Result};
use crate::spectral::dense_spectral_radius;

pub const UNITARY_TOL: f64 = 1e-10;
pub const PROJECTOR_TOL: f64 = 1e-10;
pub const INIT_TOL: f64 = 1e-12;
/// Largest number of strings enumerated by the exhaustive paths.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;
/// Probabilities above this count as acceptance for [`growth_rate_nondet`].
pub const NONZERO_PROB: f64 = 1e-9;
/// Relative cutoff for new directions in the Krylov reductions.
const KRYLOV_TOL: f64 = 1e-9;

type CMat = DMatrix<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    KondacsWatrous,
    FinalAcceptance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Qfa {
    dim: usize,
    unitaries: Vec<CMat>,
    accept: CMat,
    reject: CMat,
    neutral: CMat,
    init: DVector<Complex64>,
    layout: Layout,
}

fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn is_projector(p: &CMat) -> bool {
    frobenius(&(p - p.adjoint())) <= PROJECTOR_TOL && frobenius(&(p * p - p)) <= PROJECTOR_TOL
}

impl Qfa {
    /// Validates the unitaries, projectors and initial vector.
    pub fn new(
        unitaries: Vec<CMat>,
        accept: CMat,
        reject: CMat,
        neutral: CMat,
        init: DVector<Complex64>,
    ) -> Result<Self> {
        let dim = init.len();
        if dim == 0 {
            return Err(Error::Dimension("the state space is empty".into()));
        }
        let square = |m: &CMat, what: &str| {
            if m.shape() == (dim, dim) {
                Ok(())
            } else {
                Err(Error::Dimension(format!(
                    "{what} is {:?}, expected {dim}x{dim}",
                    m.shape()
                )))
            }
        };
        if unitaries.is_empty() {
            return Err(Error::Domain("the alphabet is empty".into()));
        }
        let id = CMat::identity(dim, dim);
        for (s, u) in unitaries.iter().enumerate() {
            square(u, &format!("unitary {s}"))?;
            if frobenius(&(u.adjoint() * u - &id)) > UNITARY_TOL {
                return Err(Error::Domain(format!(
                    "matrix for symbol {s} is not unitary"
                )));
            }
        }
        for (p, name) in [
            (&accept, "accept"),
            (&reject, "reject"),
            (&neutral, "neutral"),
        ] {
            square(p, name)?;
            if !is_projector(p) {
                return Err(Error::Domain(format!("{name} matrix is not a projector")));
            }
        }
        if (init.norm() - 1.0).abs() > INIT_TOL {
            return Err(Error::Domain(format!(
                "initial vector has norm {}",
                init.norm()
            )));
        }
        let small = |m: CMat| frobenius(&m) <= PROJECTOR_TOL;
        let reject_disjoint = small(&reject * &accept) && small(&reject * &neutral);
        let layout = if reject_disjoint
            && small(&accept * &neutral)
            && small(&accept + &reject + &neutral - &id)
        {
            Layout::KondacsWatrous
        } else if reject_disjoint
            && small(&neutral * &accept - &accept)
            && small(&neutral + &reject - &id)
        {
            Layout::FinalAcceptance
        } else {
            return Err(Error::Domain(
                "projectors are neither an orthogonal resolution of the identity nor accept-within-neutral".into(),
            ));
        };
        Ok(Qfa {
            dim,
            unitaries,
            accept,
            reject,
            neutral,
            init,
            layout,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> usize {
        self.unitaries.len()
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn unitary(&self, s: usize) -> &CMat {
        &self.unitaries[s]
    }

    pub fn accept(&self) -> &CMat {
        &self.accept
    }

    pub fn reject(&self) -> &CMat {
        &self.reject
    }

    pub fn neutral(&self) -> &CMat {
        &self.neutral
    }

    pub fn init(&self) -> &DVector<Complex64> {
        &self.init
    }

    /// `U_s N` for every symbol.
    fn steps(&self) -> Vec<CMat> {
        self.unitaries.iter().map(|u| u * &self.neutral).collect()
    }

    fn check_symbols(&self, s: &[usize]) -> Result<()> {
        match s.iter().find(|&&x| x >= self.alphabet()) {
            Some(&x) => Err(Error::SymbolOutOfRange {
                symbol: x,
                alphabet: self.alphabet(),
            }),
            None => Ok(()),
        }
    }

    fn enumeration_size(&self, n: usize) -> Result<u128> {
        let count = (self.alphabet() as u128)
            .checked_pow(n as u32)
            .unwrap_or(u128::MAX);
        if count > ENUMERATION_BUDGET {
            return Err(Error::BudgetExceeded(count));
        }
        Ok(count)
    }
}

/// Embeds a reversible partial DFA as a permutation automaton on twice as
/// many dimensions: the first block holds the automaton's states, the
/// second is the reject space. Undefined moves are completed to a
/// permutation, pairing them in index order with free slots.
pub fn from_reversible_dfa(dfa: &PartialDfa) -> Result<Qfa> {
    if !dfa.is_reversible() {
        return Err(Error::NotReversible);
    }
    let d = dfa.states();
    let dim = 2 * d;
    let mut unitaries = Vec::with_capacity(dfa.alphabet());
    for x in 0..dfa.alphabet() {
        let mut perm = vec![usize::MAX; dim];
        let mut hit = vec![false; dim];
        for s in 0..d {
            if let Some(t) = dfa.next(s, x) {
                perm[s] = t;
                hit[t] = true;
            }
        }
        // Undefined live moves take the lowest reject slots, the reject
        // block then fills what is left.
        let mut reject_slots = d..dim;
        for s in 0..d {
            if perm[s] == usize::MAX {
                let t = reject_slots.next().expect("enough reject slots");
                perm[s] = t;
                hit[t] = true;
            }
        }
        let leftovers: Vec<usize> = (0..dim).filter(|&t| !hit[t]).collect();
        for (s, t) in (d..dim).zip(leftovers) {
            perm[s] = t;
        }
        let mut u = CMat::zeros(dim, dim);
        for (s, &t) in perm.iter().enumerate() {
            u[(t, s)] = Complex64::new(1.0, 0.0);
        }
        unitaries.push(u);
    }
    let diag = |f: &dyn Fn(usize) -> bool| {
        CMat::from_fn(dim, dim, |i, j| {
            if i == j && f(i) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    };
    let accept = diag(&|i| i < d && dfa.is_accepting(i));
    let neutral = diag(&|i| i < d);
    let reject = diag(&|i| i >= d);
    let mut init = DVector::zeros(dim);
    init[dfa.initial()] = Complex64::new(1.0, 0.0);
    Qfa::new(unitaries, accept, reject, neutral, init)
}

/// `‖A · Π (U_s N) · init‖²` for the string `s`.
pub fn accept_prob(qfa: &Qfa, s: &[usize]) -> Result<f64> {
    qfa.check_symbols(s)?;
    let mut v = qfa.init.clone();
    for &x in s {
        v = &qfa.unitaries[x] * (&qfa.neutral * v);
    }
    Ok((&qfa.accept * v).norm_squared())
}

/// Total acceptance mass over all strings of length `n`, by iterating the
/// map `ρ ↦ Σ_s (U_s N) ρ (U_s N)†` on the initial density matrix.
pub fn total_mass(qfa: &Qfa, n: usize) -> f64 {
    let steps = qfa.steps();
    let mut rho = &qfa.init * qfa.init.adjoint();
    for _ in 0..n {
        rho = steps
            .iter()
            .map(|t| t * &rho * t.adjoint())
            .fold(CMat::zeros(qfa.dim, qfa.dim), |a, b| a + b);
    }
    (&qfa.accept * rho).trace().re
}

/// Same mass by enumerating every string; the per-prefix sums form a tree
/// so the summation order is fixed.
pub fn total_mass_enumerated(qfa: &Qfa, n: usize) -> Result<f64> {
    qfa.enumeration_size(n)?;
    Ok(enumerate(qfa, &qfa.steps(), &qfa.init, n, &|p| p))
}

fn enumerate(
    qfa: &Qfa,
    steps: &[CMat],
    v: &DVector<Complex64>,
    left: usize,
    weight: &dyn Fn(f64) -> f64,
) -> f64 {
    if left == 0 {
        return weight((&qfa.accept * v).norm_squared());
    }
    steps
        .iter()
        .map(|t| enumerate(qfa, steps, &(t * v), left - 1, weight))
        .sum()
}

fn root(mass: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("length must be at least 1".into()));
    }
    Ok(mass.max(0.0).powf(1.0 / n as f64))
}

/// `(Σ_{|s|=n} accept_prob(s))^{1/n}` via the transfer operator; unlike the
/// enumeration paths it has no budget.
pub fn capacity_finite_n(qfa: &Qfa, n: usize) -> Result<f64> {
    root(total_mass(qfa, n), n)
}

/// [`capacity_finite_n`] by exhaustive enumeration.
pub fn capacity_finite_n_enumerated(qfa: &Qfa, n: usize) -> Result<f64> {
    root(total_mass_enumerated(qfa, n)?, n)
}

/// `(#{s : |s| = n, accept_prob(s) > 1e-9})^{1/n}`.
pub fn growth_rate_nondet(qfa: &Qfa, n: usize) -> Result<f64> {
    qfa.enumeration_size(n)?;
    let count = enumerate(qfa, &qfa.steps(), &qfa.init, n, &|p| {
        if p > NONZERO_PROB {
            1.0
        } else {
            0.0
        }
    });
    root(count, n)
}

/// Coordinates of a Hermitian matrix in the orthonormal basis `E_ii`,
/// `(E_ij + E_ji)/√2`, `i(E_ij − E_ji)/√2` for `i < j`.
fn hermitian_coords(h: &CMat) -> DVector<f64> {
    let d = h.nrows();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(h[(i, i)].re);
    }
    let r2 = std::f64::consts::SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            out.push(h[(i, j)].re * r2);
            out.push(-h[(i, j)].im * r2);
        }
    }
    DVector::from_vec(out)
}

fn hermitian_basis(d: usize) -> Vec<CMat> {
    let one = Complex64::new(1.0, 0.0);
    let s = 1.0 / std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = CMat::zeros(d, d);
        m[(i, i)] = one;
        out.push(m);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut re = CMat::zeros(d, d);
            re[(i, j)] = Complex64::new(s, 0.0);
            re[(j, i)] = Complex64::new(s, 0.0);
            out.push(re);
            let mut im = CMat::zeros(d, d);
            im[(i, j)] = Complex64::new(0.0, s);
            im[(j, i)] = Complex64::new(0.0, -s);
            out.push(im);
        }
    }
    out
}

/// Real matrix of the transfer map on Hermitian coordinates.
pub fn superoperator(qfa: &Qfa) -> DMatrix<f64> {
    let steps = qfa.steps();
    let basis = hermitian_basis(qfa.dim);
    let mut m = DMatrix::zeros(basis.len(), basis.len());
    for (k, b) in basis.iter().enumerate() {
        let image = steps
            .iter()
            .map(|t| t * b * t.adjoint())
            .fold(CMat::zeros(qfa.dim, qfa.dim), |a, c| a + c);
        m.set_column(k, &hermitian_coords(&image));
    }
    m
}

/// Orthonormal basis of the Krylov space of `m` started at `v`.
fn krylov(m: &DMatrix<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    let scale = v.norm();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut next = v.clone();
    while basis.len() < m.nrows() {
        let before = next.norm();
        // Two Gram–Schmidt sweeps keep the basis orthogonal.
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&next);
                next -= q * c;
            }
        }
        let after = next.norm();
        if after <= KRYLOV_TOL * before.max(scale) || after == 0.0 {
            break;
        }
        let q = next / after;
        next = m * &q;
        basis.push(q);
    }
    if basis.is_empty() {
        DMatrix::zeros(m.nrows(), 0)
    } else {
        DMatrix::from_columns(&basis)
    }
}

/// `lim_n (total mass)^{1/n}`: the largest eigenvalue modulus of the
/// transfer map restricted to the part reachable from the initial state and
/// visible to the accept projector.
pub fn capacity_spectral(qfa: &Qfa) -> f64 {
    let m = superoperator(qfa);
    let rho0 = hermitian_coords(&(&qfa.init * qfa.init.adjoint()));
    let reach = krylov(&m, &rho0);
    if reach.ncols() == 0 {
        return 0.0;
    }
    let m_reach = reach.transpose() * &m * &reach;
    let observe = reach.transpose() * hermitian_coords(&qfa.accept);
    let seen = krylov(&m_reach.transpose(), &observe);
    if seen.ncols() == 0 {
        return 0.0;
    }
    let minimal = seen.transpose() * &m_reach * &seen;
    dense_spectral_radius(&minimal)
}

#[derive(Serialize, Deserialize)]
struct QfaJson {
    dim: usize,
    unitaries: Vec<Vec<Vec<[f64; 2]>>>,
    accept: Vec<Vec<[f64; 2]>>,
    reject: Vec<Vec<[f64; 2]>>,
    neutral: Vec<Vec<[f64; 2]>>,
    init: Vec<[f64; 2]>,
}

fn rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn from_rows(dim: usize, r: &[Vec<[f64; 2]>], what: &str) -> Result<CMat> {
    if r.len() != dim || r.iter().any(|row| row.len() != dim) {
        return Err(Error::Dimension(format!("{what} must be {dim}x{dim}")));
    }
    Ok(CMat::from_fn(dim, dim, |i, j| {
        Complex64::new(r[i][j][0], r[i][j][1])
    }))
}

impl Qfa {
    pub fn to_json(&self) -> String {
        let j = QfaJson {
            dim: self.dim,
            unitaries: self.unitaries.iter().map(rows).collect(),
            accept: rows(&self.accept),
            reject: rows(&self.reject),
            neutral: rows(&self.neutral),
            init: self.init.iter().map(|z| [z.re, z.im]).collect(),
        };
        serde_json::to_string_pretty(&j).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: QfaJson = serde_json::from_str(text)?;
        if j.init.len() != j.dim {
            return Err(Error::Dimension(format!(
                "init has {} entries, expected {}",
                j.init.len(),
                j.dim
            )));
        }
        let unitaries = j
            .unitaries
            .iter()
            .enumerate()
            .map(|(s, u)| from_rows(j.dim, u, &format!("unitary {s}")))
            .collect::<Result<Vec<_>>>()?;
        Qfa::new(
            unitaries,
            from_rows(j.dim, &j.accept, "accept")?,
            from_rows(j.dim, &j.reject, "reject")?,
            from_rows(j.dim, &j.neutral, "neutral")?,
            DVector::from_iterator(j.dim, j.init.iter().map(|z| Complex64::new(z[0], z[1]))),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{block_code_dfa, growth_rate};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Rotation by π/4 with A = |0⟩⟨0|, N = |1⟩⟨1|, init |1⟩.
    fn half_rotation() -> Qfa {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = CMat::from_row_slice(2, 2, &[c(h), c(-h), c(h), c(h)]);
        let a = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let n = CMat::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]);
        let init = DVector::from_vec(vec![c(0.0), c(1.0)]);
        Qfa::new(vec![u], a, CMat::zeros(2, 2), n, init).unwrap()
    }

    fn two_letter_loop() -> PartialDfa {
        PartialDfa::from_transitions(1, 5, 0, &[0], [(0, 0, 0), (0, 2, 0)]).unwrap()
    }

    #[test]
    fn rotation_by_hand() {
        let q = half_rotation();
        assert_eq!(q.layout(), Layout::KondacsWatrous);
        assert!((accept_prob(&q, &[]).unwrap()).abs() < 1e-15);
        assert!((accept_prob(&q, &[0]).unwrap() - 0.5).abs() < 1e-15);
        // Each step keeps half the neutral amplitude: mass 2^{-n}.
        assert!((accept_prob(&q, &[0, 0]).unwrap() - 0.25).abs() < 1e-15);
        for n in 1..=6 {
            assert!((capacity_finite_n(&q, n).unwrap() - 0.5).abs() < 1e-12);
            assert!((growth_rate_nondet(&q, n).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((capacity_spectral(&q) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn embedded_loop() {
        let q = from_reversible_dfa(&two_letter_loop()).unwrap();
        assert_eq!(q.dim(), 2);
        assert_eq!(q.layout(), Layout::FinalAcceptance);
        assert_eq!(accept_prob(&q, &[0]).unwrap(), 1.0);
        assert_eq!(accept_prob(&q, &[1]).unwrap(), 0.0);
        assert_eq!(accept_prob(&q, &[2, 0, 1, 0]).unwrap(), 0.0);
        assert!((total_mass(&q, 3) - 8.0).abs() < 1e-12);
        assert!((capacity_finite_n(&q, 3).unwrap() - 2.0).abs() < 1e-12);
        assert!((growth_rate_nondet(&q, 3).unwrap() - 2.0).abs() < 1e-12);
        assert!((capacity_spectral(&q) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn embedded_block_code() {
        let words = [vec![0, 0], vec![1, 2], vec![2, 4], vec![3, 1], vec![4, 3]];
        let m = block_code_dfa(&words, 5).unwrap();
        let q = from_reversible_dfa(&m).unwrap();
        assert!(q.dim() <= 2 * m.states());
        assert!((total_mass(&q, 4) - 25.0).abs() < 1e-9);
        assert!((capacity_spectral(&q) - growth_rate(&m)).abs() < 1e-9);
        assert!((capacity_spectral(&q) - 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let m = PartialDfa::from_transitions(2, 1, 0, &[0], [(0, 0, 1), (1, 0, 1)]).unwrap();
        assert!(matches!(from_reversible_dfa(&m), Err(Error::NotReversible)));
        let q = half_rotation();
        assert!(accept_prob(&q, &[1]).is_err());
        let bad = CMat::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        assert!(Qfa::new(
            vec![bad],
            q.accept.clone(),
            q.reject.clone(),
            q.neutral.clone(),
            q.init.clone()
        )
        .is_err());
        let overlap = CMat::identity(2, 2);
        assert!(Qfa::new(
            vec![q.unitaries[0].clone()],
            overlap.clone(),
            overlap,
            q.neutral.clone(),
            q.init.clone()
        )
        .is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let q = from_reversible_dfa(&two_letter_loop()).unwrap();
        assert!(matches!(
            growth_rate_nondet(&q, 11),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(capacity_finite_n_enumerated(&q, 11).is_err());
        assert!(capacity_finite_n(&q, 60).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let q = half_rotation();
        assert_eq!(Qfa::from_json(&q.to_json()).unwrap(), q);
    }
}
