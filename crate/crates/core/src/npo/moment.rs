//! Moment relaxation of a Hermitian problem as a real semidefinite program.
//!
//! The program is stated over block matrices `Z ⪰ 0` with linear equality
//! constraints and a linear objective to maximize. A complex Hermitian
//! block `Y = A + iB` is stored as the real block `[[A, -B], [B, A]]`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::{Coeff, Letter, Monomial, Poly};
use super::problem::NcProblem;
use super::rewrite::RuleSet;
use crate::error::{Error, Result};
use crate::spectral::symmetric_eigen;

/// `(block, row, col)` with `row <= col`.
pub type EntryKey = (usize, usize, usize);
pub type LinearForm = BTreeMap<EntryKey, Rational64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Moment,
    Localizing {
        constraint: usize,
    },
    /// Diagonal block of nonnegative slots for unmatched moments.
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpBlock {
    pub kind: BlockKind,
    /// Row words of the complex block; empty for the free block.
    pub rows: Vec<Monomial>,
    /// Order of the stored real matrix.
    pub size: usize,
    pub diagonal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    pub label: String,
    pub form: LinearForm,
    pub rhs: Rational64,
}

/// A moment not matched by any entry of the moment block. Its real part
/// is `Z[pos] - Z[neg]` on the free block; same for the imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeMoment {
    pub word: Monomial,
    pub re: (usize, usize),
    pub im: Option<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Rep {
    Entry { row: usize, col: usize, conj: bool },
    Free(usize),
}

#[derive(Clone, Debug)]
pub struct MomentRelaxation {
    pub level: usize,
    pub complex: bool,
    pub basis: Vec<Monomial>,
    pub blocks: Vec<SdpBlock>,
    pub constraints: Vec<LinearConstraint>,
    pub objective: LinearForm,
    pub objective_shift: f64,
    pub free: Vec<FreeMoment>,
    pub warnings: Vec<String>,
    pub names: Vec<String>,
    hermitian: Vec<bool>,
}

fn add_to(form: &mut LinearForm, key: EntryKey, c: Rational64) {
    if c.is_zero() {
        return;
    }
    let e = form.entry(key).or_insert_with(Rational64::zero);
    *e += c;
    if e.is_zero() {
        form.remove(&key);
    }
}

fn key(block: usize, i: usize, j: usize) -> EntryKey {
    (block, i.min(j), i.max(j))
}

fn combine(a: &LinearForm, b: &LinearForm, cb: Rational64) -> LinearForm {
    let mut out = a.clone();
    for (&k, &v) in b {
        add_to(&mut out, k, v * cb);
    }
    out
}

struct Builder<'a> {
    rules: &'a RuleSet,
    hermitian: Vec<bool>,
    complex: bool,
    basis: Vec<Monomial>,
    reps: BTreeMap<Monomial, Rep>,
    free: Vec<FreeMoment>,
    free_block: usize,
    free_size: usize,
}

impl Builder<'_> {
    fn canonical(&self, w: &Monomial) -> (Monomial, bool) {
        let a = w.adjoint(&self.hermitian);
        if a < *w {
            (a, true)
        } else {
            (w.clone(), false)
        }
    }

    fn moment_rep(&mut self, canon: &Monomial) -> Rep {
        if let Some(&r) = self.reps.get(canon) {
            return r;
        }
        let palindrome = canon.adjoint(&self.hermitian) == *canon;
        let re = (self.free_size, self.free_size + 1);
        self.free_size += 2;
        let im = if self.complex && !palindrome {
            self.free_size += 2;
            Some((re.0 + 2, re.1 + 2))
        } else {
            None
        };
        self.free.push(FreeMoment {
            word: canon.clone(),
            re,
            im,
        });
        let r = Rep::Free(self.free.len() - 1);
        self.reps.insert(canon.clone(), r);
        r
    }

    fn entry_forms(&self, block: usize, n: usize, i: usize, j: usize) -> (LinearForm, LinearForm) {
        let mut re = LinearForm::new();
        let mut im = LinearForm::new();
        add_to(&mut re, key(block, i, j), Rational64::one());
        if self.complex && i != j {
            // B_ij sits at row n + i, column j.
            add_to(&mut im, key(block, n + i, j), Rational64::one());
        }
        (re, im)
    }

    /// Real and imaginary parts of the moment of `w` as linear forms.
    fn moment_forms(&mut self, w: &Monomial) -> (LinearForm, LinearForm) {
        let (canon, conj) = self.canonical(w);
        let n = self.basis.len();
        let (re, mut im) = match self.moment_rep(&canon) {
            Rep::Entry { row, col, conj: c } => {
                let (re, im) = self.entry_forms(0, n, row, col);
                (
                    re,
                    if c {
                        combine(&LinearForm::new(), &im, -Rational64::one())
                    } else {
                        im
                    },
                )
            }
            Rep::Free(k) => {
                let f = self.free[k].clone();
                let pair = |(p, q): (usize, usize)| {
                    let mut form = LinearForm::new();
                    add_to(&mut form, (self.free_block, p, p), Rational64::one());
                    add_to(&mut form, (self.free_block, q, q), -Rational64::one());
                    form
                };
                (pair(f.re), f.im.map(pair).unwrap_or_default())
            }
        };
        if conj {
            im = combine(&LinearForm::new(), &im, -Rational64::one());
        }
        (re, im)
    }

    /// Forms of the moment functional applied to a reduced polynomial.
    fn poly_forms(&mut self, p: &Poly) -> (LinearForm, LinearForm) {
        let mut re = LinearForm::new();
        let mut im = LinearForm::new();
        for (m, c) in p.terms() {
            let (mr, mi) = self.moment_forms(m);
            re = combine(&re, &mr, c.re);
            re = combine(&re, &mi, -c.im);
            im = combine(&im, &mr, c.im);
            im = combine(&im, &mi, c.re);
        }
        (re, im)
    }
}

struct ConstraintSink {
    out: Vec<LinearConstraint>,
    seen: BTreeSet<Vec<(EntryKey, Rational64)>>,
}

impl ConstraintSink {
    /// Adds `form = rhs` unless it is trivial or already present up to scale.
    fn push(&mut self, label: String, form: LinearForm, rhs: Rational64) -> Result<()> {
        if form.is_empty() {
            if rhs.is_zero() {
                return Ok(());
            }
            return Err(Error::Domain(format!(
                "relaxation is infeasible: {label} reads 0 = {rhs}"
            )));
        }
        let lead = *form.values().next().expect("nonempty");
        let normalized: Vec<(EntryKey, Rational64)> = form
            .iter()
            .map(|(&k, &v)| (k, v / lead))
            .chain(std::iter::once(((usize::MAX, 0, 0), rhs / lead)))
            .collect();
        if self.seen.insert(normalized) {
            self.out.push(LinearConstraint { label, form, rhs });
        }
        Ok(())
    }
}

/// Moment relaxation at `level` of a problem whose variables are all
/// Hermitian. Words are reduced by the problem's rules, and the moment
/// block is indexed by the normal words of degree at most `level`.
pub fn npa_moment_matrix(p: &NcProblem, level: usize) -> Result<MomentRelaxation> {
    if !p.is_hermitian_only() {
        return Err(Error::Domain(
            "moment relaxation needs Hermitian variables; hermitize first".into(),
        ));
    }
    p.validate()?;
    let hermitian = p.hermitian_flags();
    let names = p.names();
    let (rules, mut warnings) = RuleSet::for_problem(p);
    let complex = p
        .equalities
        .iter()
        .chain(&p.psd)
        .map(|c| &c.poly)
        .chain([&p.objective])
        .any(|q| !q.is_real())
        || p.rules.iter().any(|r| !r.rhs.is_real());
    let letters: Vec<Letter> = (0..p.variables.len()).map(Letter::new).collect();
    let basis = rules.normal_words(&letters, level);
    let n = basis.len();
    let scale = if complex { 2 } else { 1 };

    let mut blocks = vec![SdpBlock {
        kind: BlockKind::Moment,
        rows: basis.clone(),
        size: scale * n,
        diagonal: false,
    }];
    for (ci, c) in p.psd.iter().enumerate() {
        let half = c.poly.degree().div_ceil(2);
        if half > level {
            warnings.push(format!(
                "psd constraint {ci} ({}) has degree {} above twice the level; no localizing block",
                c.group,
                c.poly.degree()
            ));
            continue;
        }
        let rows: Vec<Monomial> = basis
            .iter()
            .filter(|w| w.degree() <= level - half)
            .cloned()
            .collect();
        blocks.push(SdpBlock {
            kind: BlockKind::Localizing { constraint: ci },
            size: scale * rows.len(),
            rows,
            diagonal: false,
        });
    }

    let mut b = Builder {
        rules: &rules,
        hermitian: hermitian.clone(),
        complex,
        basis: basis.clone(),
        reps: BTreeMap::new(),
        free: Vec::new(),
        free_block: blocks.len(),
        free_size: 0,
    };
    let mut reduced: Vec<Vec<Poly>> = vec![Vec::new(); n];
    for i in 0..n {
        let ui = basis[i].adjoint(&hermitian);
        for j in 0..n {
            let w = b.rules.reduce_monomial(&ui.concat(&basis[j]));
            if j >= i && w.len() == 1 {
                let (m, c) = w.terms().next().expect("one term");
                if *c == Coeff::one() {
                    let (canon, conj) = b.canonical(m);
                    b.reps.entry(canon).or_insert(Rep::Entry {
                        row: i,
                        col: j,
                        conj,
                    });
                }
            }
            reduced[i].push(w);
        }
    }

    let mut sink = ConstraintSink {
        out: Vec::new(),
        seen: BTreeSet::new(),
    };
    let mut norm = LinearForm::new();
    add_to(&mut norm, (0, 0, 0), Rational64::one());
    sink.push("normalization".into(), norm, Rational64::one())?;

    for (bi, block) in blocks.iter().enumerate() {
        if !complex {
            continue;
        }
        let m = block.rows.len();
        for i in 0..m {
            for j in i..m {
                let mut f = LinearForm::new();
                add_to(&mut f, key(bi, i, j), Rational64::one());
                add_to(&mut f, key(bi, m + i, m + j), -Rational64::one());
                sink.push(format!("structure[{bi}]"), f, Rational64::zero())?;
                let mut g = LinearForm::new();
                add_to(&mut g, key(bi, m + i, j), Rational64::one());
                add_to(&mut g, key(bi, m + j, i), Rational64::one());
                sink.push(format!("structure[{bi}]"), g, Rational64::zero())?;
            }
        }
    }

    for i in 0..n {
        for j in i..n {
            let (er, ei) = b.entry_forms(0, n, i, j);
            let w = reduced[i][j].clone();
            let is_rep = w.len() == 1 && {
                let (m, c) = w.terms().next().expect("one term");
                let (canon, conj) = b.canonical(m);
                *c == Coeff::one()
                    && b.reps.get(&canon)
                        == Some(&Rep::Entry {
                            row: i,
                            col: j,
                            conj,
                        })
            };
            if is_rep {
                let (m, _) = w.terms().next().expect("one term");
                if complex && i != j && m.adjoint(&hermitian) == *m {
                    sink.push("real_moment".into(), ei, Rational64::zero())?;
                }
                continue;
            }
            let (fr, fi) = b.poly_forms(&w);
            sink.push(
                "moment".into(),
                combine(&er, &fr, -Rational64::one()),
                Rational64::zero(),
            )?;
            if complex {
                sink.push(
                    "moment".into(),
                    combine(&ei, &fi, -Rational64::one()),
                    Rational64::zero(),
                )?;
            }
        }
    }

    for (bi, block) in blocks.iter().enumerate() {
        let BlockKind::Localizing { constraint } = block.kind else {
            continue;
        };
        let r = &p.psd[constraint].poly;
        let m = block.rows.len();
        for i in 0..m {
            let ui = block.rows[i].adjoint(&hermitian);
            for j in i..m {
                let w = b.rules.reduce(
                    &Poly::monomial(ui.clone())
                        .mul(r)
                        .mul(&Poly::monomial(block.rows[j].clone())),
                );
                let (fr, fi) = b.poly_forms(&w);
                let (er, ei) = b.entry_forms(bi, m, i, j);
                sink.push(
                    format!("localizing[{constraint}]"),
                    combine(&er, &fr, -Rational64::one()),
                    Rational64::zero(),
                )?;
                if complex {
                    sink.push(
                        format!("localizing[{constraint}]"),
                        combine(&ei, &fi, -Rational64::one()),
                        Rational64::zero(),
                    )?;
                }
            }
        }
    }

    for (ci, c) in p.equalities.iter().enumerate() {
        let budget = (2 * level).saturating_sub(c.poly.degree());
        for u in basis.iter() {
            let ua = Poly::monomial(u.adjoint(&hermitian));
            for v in basis.iter() {
                if u.degree() + v.degree() > budget {
                    continue;
                }
                let w = b
                    .rules
                    .reduce(&ua.mul(&c.poly).mul(&Poly::monomial(v.clone())));
                let (fr, fi) = b.poly_forms(&w);
                sink.push(format!("equality[{ci}]"), fr, Rational64::zero())?;
                if complex {
                    sink.push(format!("equality[{ci}]"), fi, Rational64::zero())?;
                }
            }
        }
    }

    let objective = b.poly_forms(&b.rules.reduce(&p.objective)).0;

    if b.free_size > 0 {
        blocks.push(SdpBlock {
            kind: BlockKind::Free,
            rows: Vec::new(),
            size: b.free_size,
            diagonal: true,
        });
    }
    let free = b.free;
    Ok(MomentRelaxation {
        level,
        complex,
        basis,
        blocks,
        constraints: sink.out,
        objective,
        objective_shift: p.metadata.objective_shift,
        free,
        warnings,
        names,
        hermitian,
    })
}

/// Numeric values of every block.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentPoint {
    pub blocks: Vec<DMatrix<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointReport {
    pub max_residual: f64,
    pub min_eigenvalue: f64,
    pub objective: f64,
}

fn to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn apply_word(
    w: &Monomial,
    mats: &[DMatrix<Complex64>],
    v: &DVector<Complex64>,
) -> DVector<Complex64> {
    let mut out = v.clone();
    for l in w.0.iter().rev() {
        out = &mats[l.var] * out;
    }
    out
}

fn realify_into(target: &mut DMatrix<f64>, y: &DMatrix<Complex64>, complex: bool) {
    let n = y.nrows();
    for i in 0..n {
        for j in 0..n {
            let z = y[(i, j)];
            target[(i, j)] = z.re;
            if complex {
                target[(n + i, n + j)] = z.re;
                target[(n + i, j)] = z.im;
                target[(i, n + j)] = -z.im;
            }
        }
    }
}

impl MomentRelaxation {
    /// The point induced by operators `mats` (one per variable, in problem
    /// order) and the state `psi`.
    pub fn point_from_operators(
        &self,
        p: &NcProblem,
        mats: &[DMatrix<Complex64>],
        psi: &DVector<Complex64>,
    ) -> Result<MomentPoint> {
        if mats.len() != self.names.len() {
            return Err(Error::Dimension(format!(
                "{} operators for {} variables",
                mats.len(),
                self.names.len()
            )));
        }
        let dim = psi.len();
        if let Some(m) = mats.iter().find(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::Dimension(format!(
                "{}x{} operator for state of length {dim}",
                m.nrows(),
                m.ncols()
            )));
        }
        let moment = |w: &Monomial| psi.dotc(&apply_word(w, mats, psi));
        let mut blocks = Vec::new();
        for block in &self.blocks {
            let mut z = DMatrix::zeros(block.size, block.size);
            match block.kind {
                BlockKind::Free => {
                    for f in &self.free {
                        let v = moment(&f.word);
                        let mut put = |(pos, neg): (usize, usize), x: f64| {
                            z[(pos, pos)] = x.max(0.0);
                            z[(neg, neg)] = (-x).max(0.0);
                        };
                        put(f.re, v.re);
                        if let Some(im) = f.im {
                            put(im, v.im);
                        }
                    }
                }
                BlockKind::Moment | BlockKind::Localizing { .. } => {
                    let r = match block.kind {
                        BlockKind::Localizing { constraint } => {
                            p.psd[constraint].poly.evaluate(mats, dim)
                        }
                        _ => DMatrix::identity(dim, dim),
                    };
                    let vecs: Vec<DVector<Complex64>> = block
                        .rows
                        .iter()
                        .map(|w| apply_word(w, mats, psi))
                        .collect();
                    let y = DMatrix::from_fn(vecs.len(), vecs.len(), |i, j| {
                        vecs[i].dotc(&(&r * &vecs[j]))
                    });
                    realify_into(&mut z, &y, self.complex);
                }
            }
            blocks.push(z);
        }
        Ok(MomentPoint { blocks })
    }

    pub fn objective_value(&self, point: &MomentPoint) -> f64 {
        self.objective
            .iter()
            .map(|(&(b, i, j), c)| to_f64(c) * point.blocks[b][(i, j)])
            .sum::<f64>()
            - self.objective_shift
    }

    /// Largest constraint residual, smallest block eigenvalue and the
    /// objective at `point`.
    pub fn check_point(&self, point: &MomentPoint) -> Result<PointReport> {
        if point.blocks.len() != self.blocks.len() {
            return Err(Error::Dimension(format!(
                "{} blocks, expected {}",
                point.blocks.len(),
                self.blocks.len()
            )));
        }
        for (z, b) in point.blocks.iter().zip(&self.blocks) {
            if z.nrows() != b.size || z.ncols() != b.size {
                return Err(Error::Dimension(format!(
                    "block of order {} expected {}",
                    z.nrows(),
                    b.size
                )));
            }
        }
        let max_residual = self
            .constraints
            .iter()
            .map(|c| {
                let lhs: f64 = c
                    .form
                    .iter()
                    .map(|(&(b, i, j), v)| to_f64(v) * point.blocks[b][(i, j)])
                    .sum();
                (lhs - to_f64(&c.rhs)).abs()
            })
            .fold(0.0, f64::max);
        let min_eigenvalue = point
            .blocks
            .iter()
            .zip(&self.blocks)
            .map(|(z, b)| {
                if b.diagonal {
                    z.diagonal().min()
                } else {
                    symmetric_eigen(z).0.min()
                }
            })
            .fold(f64::INFINITY, f64::min);
        Ok(PointReport {
            max_residual,
            min_eigenvalue,
            objective: self.objective_value(point),
        })
    }

    /// Absolute value of the largest coefficient, for diagnostics.
    pub fn max_coefficient(&self) -> f64 {
        self.constraints
            .iter()
            .flat_map(|c| c.form.values())
            .chain(self.objective.values())
            .map(|v| to_f64(&v.abs()))
            .fold(0.0, f64::max)
    }

    pub fn hermitian_flags(&self) -> &[bool] {
        &self.hermitian
    }
}
