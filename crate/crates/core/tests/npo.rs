use graphcap::automata::{block_code_dfa, growth_rate};
use graphcap::bounds::rewind_dfa;
use graphcap::npo::assign::{operator, pair_space_values, top_eigenvector, CMat};
use graphcap::npo::hermitize::{anti_hermitian_part, hermitian_part};
use graphcap::npo::poly::{frac, imag_unit, Letter, Monomial};
use graphcap::npo::problem::{Constraint, NcVariable};
use graphcap::npo::rewrite::RuleSet;
use graphcap::npo::sdpa::SdpaEntry;
use graphcap::npo::*;
use graphcap::{Graph, PartialDfa};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c5_block_code() -> PartialDfa {
    block_code_dfa(
        &[vec![0, 0], vec![1, 2], vec![2, 4], vec![3, 1], vec![4, 3]],
        5,
    )
    .unwrap()
}

fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
}

fn count(p: &NcProblem, group: &str) -> usize {
    p.equalities
        .iter()
        .chain(&p.psd)
        .filter(|c| c.group == group)
        .count()
}

#[test]
fn constraint_families_have_the_expected_sizes() {
    for g in [
        Graph::cycle(3).unwrap(),
        Graph::cycle(5).unwrap(),
        path(4),
        Graph::complete(4),
    ] {
        let (n, m) = (g.n(), g.edge_count());
        for redundant_swap in [false, true] {
            let p = build_capacity_problem(
                &g,
                BuildOptions {
                    redundant_swap,
                    ..BuildOptions::default()
                },
            )
            .unwrap();
            assert_eq!(p.variables.len(), 3 + 2 * n + n * n);
            let expected = [
                ("commutation", n * n),
                ("product", n * n),
                ("partial_isometry", 2 * n),
                ("involution", 3),
                ("swap", n),
                ("swap_pair", if redundant_swap { n * n } else { 0 }),
                ("projector_commutation", 3),
                ("diagonal_closure", n),
                ("final_closure", n),
                ("final_closure_edges", m),
                ("rejection", m),
                ("contraction", 8 * n),
                ("final_contains_diagonal", 1),
            ];
            for (group, size) in expected {
                assert_eq!(count(&p, group), size, "{group} on {n} vertices");
            }
            let total: usize = expected.iter().map(|e| e.1).sum();
            assert_eq!(p.equalities.len() + p.psd.len(), total);
        }
    }
    let c5 = build_capacity_problem(&Graph::cycle(5).unwrap(), BuildOptions::default()).unwrap();
    assert_eq!(c5.variables.len(), 38);
    let c3 = build_capacity_problem(&Graph::cycle(3).unwrap(), BuildOptions::default()).unwrap();
    assert_eq!(c3.variables.len(), 18);
}

#[test]
fn dumps_are_deterministic() {
    let g = Graph::cycle(5).unwrap();
    let a = build_capacity_problem(&g, BuildOptions::default())
        .unwrap()
        .dump();
    let b = build_capacity_problem(&g, BuildOptions::default())
        .unwrap()
        .dump();
    assert_eq!(a, b);
    let lines = a.lines().count();
    let p = build_capacity_problem(&g, BuildOptions::default()).unwrap();
    assert_eq!(
        lines,
        1 + p.variables.len() + 1 + p.equalities.len() + p.psd.len() + p.rules.len()
    );
}

fn random_cmat(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    let m = random_cmat(rng, d);
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn parts(m: &CMat) -> (CMat, CMat) {
    (
        (m + m.adjoint()) * Complex64::new(0.5, 0.0),
        (m - m.adjoint()) * Complex64::new(0.0, -0.5),
    )
}

#[test]
fn hermitized_constraints_are_the_parts_of_the_originals() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g in [Graph::cycle(3).unwrap(), path(3)] {
        let p = build_capacity_problem(&g, BuildOptions::default()).unwrap();
        let h = hermitize(&p).unwrap();
        let general = p.variables.iter().filter(|v| !v.hermitian).count();
        assert_eq!(h.variables.len(), p.variables.len() + general);
        assert!(h.variables.len() <= 2 * p.variables.len() + 1);
        assert!(h.equalities.len() + h.psd.len() <= 2 * (p.equalities.len() + p.psd.len()) + 2);
        assert!(h.metadata.hermitian_only);
        for _ in 0..5 {
            let d = 4;
            let mut orig = Vec::new();
            let mut split = Vec::new();
            for v in &p.variables {
                if v.hermitian {
                    let m = random_hermitian(&mut rng, d);
                    split.push(m.clone());
                    orig.push(m);
                } else {
                    let m = random_cmat(&mut rng, d);
                    let (a, b) = parts(&m);
                    split.push(a);
                    split.push(b);
                    orig.push(m);
                }
            }
            let mut k = 0;
            for c in &p.equalities {
                let q = c.poly.evaluate(&orig, d);
                let (qh, qa) = parts(&q);
                let next = &h.equalities[k];
                if next.group == format!("{}.h", c.group) {
                    assert!((next.poly.evaluate(&split, d) - &qh).norm() < 1e-9);
                    assert!((h.equalities[k + 1].poly.evaluate(&split, d) - &qa).norm() < 1e-9);
                    k += 2;
                } else {
                    assert_eq!(next.group, c.group);
                    let v = next.poly.evaluate(&split, d);
                    assert!((&v - &qh).norm() < 1e-9 || (&v - &qa).norm() < 1e-9);
                    assert!(qh.norm() < 1e-9 || qa.norm() < 1e-9);
                    k += 1;
                }
            }
            assert_eq!(k, h.equalities.len());
            for (c, hc) in p.psd.iter().zip(&h.psd) {
                assert!((c.poly.evaluate(&orig, d) - hc.poly.evaluate(&split, d)).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn product_parts_match_the_expansion() {
    // X, Y general; parts Xh, Xa, Yh, Ya are variables 2..6 (Hermitian).
    let herm = [false, false, true, true, true, true];
    let xy = Poly::var(0).mul(&Poly::var(1));
    let sub = xy.substitute(&|l: Letter| {
        let (h, a) = (2 + 2 * l.var, 3 + 2 * l.var);
        let im = Poly::var(a).scale(imag_unit());
        if l.adj {
            Poly::var(h).sub(&im)
        } else {
            Poly::var(h).add(&im)
        }
    });
    let (xh, xa, yh, ya) = (Poly::var(2), Poly::var(3), Poly::var(4), Poly::var(5));
    let i = Poly::constant(imag_unit());
    let half = frac(1, 2);
    let expected_h = xh
        .mul(&yh)
        .add(&yh.mul(&xh))
        .sub(&xa.mul(&ya).add(&ya.mul(&xa)))
        .add(&i.mul(&xh.mul(&ya).sub(&ya.mul(&xh))))
        .add(&i.mul(&xa.mul(&yh).sub(&yh.mul(&xa))))
        .scale(half);
    let expected_a = xh
        .mul(&ya)
        .add(&ya.mul(&xh))
        .add(&xa.mul(&yh).add(&yh.mul(&xa)))
        .sub(&i.mul(&xh.mul(&yh).sub(&yh.mul(&xh))))
        .add(&i.mul(&xa.mul(&ya).sub(&ya.mul(&xa))))
        .scale(half);
    assert_eq!(hermitian_part(&sub, &herm), expected_h);
    assert_eq!(anti_hermitian_part(&sub, &herm), expected_a);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let x = random_cmat(&mut rng, 4);
        let y = random_cmat(&mut rng, 4);
        let (xh, xa) = parts(&x);
        let (yh, ya) = parts(&y);
        let mats = vec![x.clone(), y.clone(), xh, xa, yh, ya];
        let (ph, pa) = parts(&(&x * &y));
        assert!((expected_h.evaluate(&mats, 4) - ph).norm() < 1e-10);
        assert!((expected_a.evaluate(&mats, 4) - pa).norm() < 1e-10);
    }
}

fn single_var_problem(hermitian: bool) -> NcProblem {
    NcProblem::new(vec![NcVariable {
        name: "X".into(),
        hermitian,
        weight: 1,
    }])
    .unwrap()
}

fn assignment(pairs: &[(&str, CMat)]) -> OperatorAssignment {
    OperatorAssignment {
        dim: pairs[0].1.nrows(),
        matrices: pairs
            .iter()
            .map(|(n, m)| (n.to_string(), m.clone()))
            .collect(),
    }
}

fn real(rows: usize, data: &[f64]) -> CMat {
    DMatrix::from_row_slice(rows, rows, data).map(|x| Complex64::new(x, 0.0))
}

#[test]
fn eigen_gadget_recovers_top_eigenvalues() {
    // M = I: P is a projector and the optimum is 1.
    let base = NcProblem::new(Vec::new()).unwrap();
    let p = eigen_gadget(&base, &Poly::one(), 0.0).unwrap();
    for (value, expected) in [(1.0, 1.0), (0.0, 0.0)] {
        let r = verify_assignment(&p, &assignment(&[("P", real(1, &[value]))])).unwrap();
        assert_eq!(r.max_equality_residual, 0.0);
        assert_eq!(r.objective_value, expected);
    }
    assert!(
        verify_assignment(&p, &assignment(&[("P", real(1, &[0.5]))]))
            .unwrap()
            .max_equality_residual
            > 0.2
    );

    // A non-Hermitian M with top eigenvalue 2 and eigenvector e0.
    let m = real(2, &[2.0, 1.0, 0.0, 1.0]);
    let p = eigen_gadget(&single_var_problem(false), &Poly::var(0), 0.0).unwrap();
    let pm = real(2, &[2.0, 0.0, 0.0, 0.0]);
    let r = verify_assignment(&p, &assignment(&[("X", m.clone()), ("P", pm)])).unwrap();
    assert!(r.max_equality_residual < 1e-12);
    assert!((r.objective_value - 2.0).abs() < 1e-12);

    // Negative optima, reported after removing the shift.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let d = 3;
        let h = random_hermitian(&mut rng, d) - CMat::identity(d, d) * Complex64::new(5.0, 0.0);
        let top = graphcap::spectral::hermitian_eigen(&h).0.max();
        assert!(top < 0.0);
        let shift = 8.0;
        let p = eigen_gadget(&single_var_problem(true), &Poly::var(0), shift).unwrap();
        assert_eq!(p.metadata.objective_shift, shift);
        let v = top_eigenvector(&h);
        let pm = &v * v.adjoint() * Complex64::new(top + shift, 0.0);
        let r = verify_assignment(&p, &assignment(&[("X", h.clone()), ("P", pm)])).unwrap();
        assert!(
            r.max_equality_residual < 1e-9,
            "{}",
            r.max_equality_residual
        );
        assert!((r.objective_value - top).abs() < 1e-9);

        // Every feasible point built from eigenvectors stays at or below the optimum.
        let (vals, vecs) = graphcap::spectral::hermitian_eigen(&h);
        for subset in 1u32..1 << d {
            let mut pm = CMat::zeros(d, d);
            for j in (0..d).filter(|j| subset >> j & 1 == 1) {
                let u = vecs.column(j);
                pm += u * u.adjoint() * Complex64::new(vals[j] + shift, 0.0);
            }
            let r = verify_assignment(&p, &assignment(&[("X", h.clone()), ("P", pm)])).unwrap();
            assert!(r.max_equality_residual < 1e-9);
            assert!(r.objective_value <= top + 1e-9);
        }

        // Without the shift, P = 0 is feasible and overshoots the negative optimum.
        let bare = eigen_gadget(&single_var_problem(true), &Poly::var(0), 0.0).unwrap();
        let zero = CMat::zeros(d, d);
        let r = verify_assignment(&bare, &assignment(&[("X", h), ("P", zero)])).unwrap();
        assert_eq!(r.max_equality_residual, 0.0);
        assert!(r.objective_value > top);
    }
}

#[test]
fn non_hermitian_objective_gets_the_gadget() {
    let mut p = single_var_problem(false);
    p.objective = Poly::var(0);
    let h = hermitize(&p).unwrap();
    assert_eq!(h.variables.len(), 2 + 1);
    assert!(h.equalities.len() <= 2);
    assert!(h.metadata.hermitian_only);
    assert!(h.metadata.warnings.iter().any(|w| w.contains("gadget")));
}

#[test]
fn reduction_examples_and_confluence() {
    let g = Graph::cycle(3).unwrap();
    let p = build_capacity_problem(&g, BuildOptions::default()).unwrap();
    let (rules, warnings) = RuleSet::for_problem(&p);
    assert!(warnings.is_empty(), "{warnings:?}");
    let [s, d] = [0, 1].map(Letter::new);
    let ssdd = Poly::monomial(Monomial(vec![s, s, d, d]));
    assert_eq!(rules.reduce(&ssdd), Poly::var(1));

    let h = hermitize(&p).unwrap();
    let (rules, warnings) = RuleSet::for_problem(&h);
    assert!(warnings.is_empty(), "{warnings:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = h.variables.len();
    let mut order: Vec<usize> = (0..rules.len()).collect();
    for _ in 0..300 {
        let len = rng.gen_range(1..=5);
        let w = Monomial((0..len).map(|_| Letter::new(rng.gen_range(0..n))).collect());
        let reference = rules.reduce(&Poly::monomial(w.clone()));
        order.shuffle(&mut rng);
        assert_eq!(
            rules.reduce_with_priority(&Poly::monomial(w), &order),
            reference
        );
    }
}

#[test]
fn basis_matches_a_brute_force_count() {
    let g = Graph::cycle(3).unwrap();
    let h = hermitize(&build_capacity_problem(&g, BuildOptions::default()).unwrap()).unwrap();
    let lhs: Vec<Vec<Letter>> = h.rules.iter().map(|r| r.lhs.0.clone()).collect();
    let normal = |w: &[Letter]| {
        !lhs.iter()
            .any(|l| w.windows(l.len()).any(|s| s == l.as_slice()))
    };
    let n = h.variables.len();
    let letters: Vec<Letter> = (0..n).map(Letter::new).collect();
    let mut brute = [1usize, 0, 0];
    for a in &letters {
        brute[1] += normal(&[*a]) as usize;
        for b in &letters {
            brute[2] += normal(&[*a, *b]) as usize;
        }
    }
    // 3 projectors and swaps, 6 one-sided operators with two parts each;
    // the 9 pair operators are eliminated.
    assert_eq!(brute[1], 3 + 12);
    let r1 = npa_moment_matrix(&h, 1).unwrap();
    assert_eq!(r1.basis.len(), 1 + brute[1]);
    assert_eq!(r1.blocks[0].size, 2 * r1.basis.len());
    let r2 = npa_moment_matrix(&h, 2).unwrap();
    assert_eq!(r2.basis.len(), brute.iter().sum::<usize>());
}

#[test]
fn sdpa_golden_and_round_trip() {
    let p = SdpaProblem {
        comments: Vec::new(),
        block_sizes: vec![1],
        cost: vec![1.0],
        entries: vec![
            SdpaEntry {
                matrix: 0,
                block: 1,
                row: 1,
                col: 1,
                value: 1.0,
            },
            SdpaEntry {
                matrix: 1,
                block: 1,
                row: 1,
                col: 1,
                value: 1.0,
            },
        ],
    };
    let golden = "1\n1\n1\n1.0000000000000000e0\n0 1 1 1 1.0000000000000000e0\n1 1 1 1 1.0000000000000000e0\n";
    assert_eq!(write_sdpa(&p), golden);

    let g = Graph::cycle(5).unwrap();
    let h = hermitize(&build_capacity_problem(&g, BuildOptions::default()).unwrap()).unwrap();
    let text = write_sdpa(&to_sdpa(&npa_moment_matrix(&h, 1).unwrap()));
    let again = write_sdpa(&to_sdpa(&npa_moment_matrix(&h, 1).unwrap()));
    assert_eq!(text, again);
    let parsed = parse_sdpa(&text).unwrap();
    assert_eq!(write_sdpa(&parsed), text);
    let keys: Vec<_> = parsed
        .entries
        .iter()
        .map(|e| (e.matrix, e.block, e.row, e.col))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(keys, sorted);
    assert!(parsed.entries.iter().all(|e| e.row <= e.col));
}

fn hermitized_embedding(g: &Graph, m: &PartialDfa) -> (NcProblem, OperatorAssignment) {
    let h = hermitize(&build_capacity_problem(g, BuildOptions::default()).unwrap()).unwrap();
    let a = embed_reversible_dfa(&h, g, m).unwrap();
    (h, a)
}

#[test]
fn block_code_embedding_is_feasible() {
    let g = Graph::cycle(5).unwrap();
    let m = c5_block_code();
    let root5 = 5f64.sqrt();
    for variant in [Variant::Transition, Variant::Conjugation] {
        let p = build_capacity_problem(
            &g,
            BuildOptions {
                variant,
                ..BuildOptions::default()
            },
        )
        .unwrap();
        let a = embed_reversible_dfa(&p, &g, &m).unwrap();
        let r = verify_assignment(&p, &a).unwrap();
        assert!(
            r.max_equality_residual <= 1e-9,
            "{variant:?}: {}",
            r.max_equality_residual
        );
        assert!(r.min_psd_eigenvalue >= -1e-9);
        assert!((r.objective_value - root5).abs() < 1e-9);
        let v = pair_space_values(&p, &a, 5).unwrap();
        assert!((v.diagonal - root5).abs() < 1e-9);
        assert!((v.pair_sum - 5.0).abs() < 1e-9);
        assert!((v.pair_root - root5).abs() < 1e-9);
    }
    let (h, a) = hermitized_embedding(&g, &m);
    let r = verify_assignment(&h, &a).unwrap();
    assert!(r.max_equality_residual <= 1e-9);
    assert!((r.objective_value - root5).abs() < 1e-9);
    let t = operator(&a, "T(1,2)").unwrap();
    let p = build_capacity_problem(&g, BuildOptions::default()).unwrap();
    let direct = embed_reversible_dfa(&p, &g, &m).unwrap();
    assert!((t - &direct.matrices["T(1,2)"]).norm() < 1e-12);
}

#[test]
fn pair_values_track_growth_for_other_machines() {
    let c5 = Graph::cycle(5).unwrap();
    let c7 = Graph::cycle(7).unwrap();
    let cases = [
        (
            c5.clone(),
            rewind_dfa(
                &c5,
                &[vec![0, 0], vec![1, 2], vec![2, 4], vec![3, 1], vec![4, 3]],
            )
            .unwrap(),
        ),
        (
            c7.clone(),
            rewind_dfa(&c7, &[vec![0], vec![2], vec![4]]).unwrap(),
        ),
        (
            c7,
            PartialDfa::from_transitions(1, 7, 0, &[0], [(0, 0, 0), (0, 3, 0)]).unwrap(),
        ),
    ];
    for (g, m) in cases {
        let p = build_capacity_problem(&g, BuildOptions::default()).unwrap();
        let a = embed_reversible_dfa(&p, &g, &m).unwrap();
        let r = verify_assignment(&p, &a).unwrap();
        assert!(r.max_equality_residual <= 1e-9);
        assert!(r.min_psd_eigenvalue >= -1e-9);
        let rate = growth_rate(&m);
        let v = pair_space_values(&p, &a, g.n()).unwrap();
        assert!((v.diagonal - rate).abs() < 1e-9, "{} vs {rate}", v.diagonal);
        assert!((v.pair_root - rate).abs() < 1e-9);
        // A symmetrized readout never falls below the spectral radius.
        assert!(
            r.objective_value >= rate - 1e-9,
            "{} vs {rate}: {m:?}",
            r.objective_value
        );
    }
}

#[test]
fn broken_assignments_are_detected() {
    let g = Graph::cycle(5).unwrap();
    let m = c5_block_code();
    let p = build_capacity_problem(&g, BuildOptions::default()).unwrap();
    let good = embed_reversible_dfa(&p, &g, &m).unwrap();

    let mut zero = good.clone();
    for name in ["D", "F"] {
        zero.matrices
            .insert(name.into(), CMat::zeros(good.dim, good.dim));
    }
    let r = verify_assignment(&p, &zero).unwrap();
    assert!(r.max_equality_residual <= 1e-12);
    assert!(r.min_psd_eigenvalue >= -1e-12);
    assert_eq!(r.objective_value, 0.0);

    let mut swapless = good.clone();
    swapless
        .matrices
        .insert("S".into(), CMat::identity(good.dim, good.dim));
    assert!(
        verify_assignment(&p, &swapless)
            .unwrap()
            .max_equality_residual
            > 0.5
    );

    let successor = build_capacity_problem(
        &g,
        BuildOptions {
            closure: ClosureForm::Successor,
            ..BuildOptions::default()
        },
    )
    .unwrap();
    let a = embed_reversible_dfa(&successor, &g, &m).unwrap();
    let r = verify_assignment(&successor, &a).unwrap();
    assert!(r.max_equality_residual > 0.5, "{}", r.max_equality_residual);
    let residual_of = |group: &str| {
        let mats = a.ordered(&successor).unwrap();
        successor
            .equalities
            .iter()
            .filter(|c| c.group == group)
            .map(|c| c.poly.evaluate(&mats, a.dim).norm())
            .fold(0.0, f64::max)
    };
    assert!(residual_of("final_closure_edges") > 0.5);
    assert!(residual_of("rejection") < 1e-12);

    let mut small = good.clone();
    small.matrices.insert("S".into(), CMat::identity(2, 2));
    assert!(matches!(
        verify_assignment(&p, &small),
        Err(graphcap::Error::Dimension(_))
    ));
}

#[test]
fn induced_moment_point_is_feasible() {
    let g = Graph::cycle(5).unwrap();
    let (h, a) = hermitized_embedding(&g, &c5_block_code());
    let mats = a.ordered(&h).unwrap();
    let psi = top_eigenvector(&h.objective.evaluate(&mats, a.dim));
    let relax = npa_moment_matrix(&h, 1).unwrap();
    assert!(relax.complex);
    let point = relax.point_from_operators(&h, &mats, &psi).unwrap();
    let r = relax.check_point(&point).unwrap();
    assert!(r.max_residual <= 1e-8, "{}", r.max_residual);
    assert!(r.min_eigenvalue >= -1e-8, "{}", r.min_eigenvalue);
    let direct = verify_assignment(&h, &a).unwrap().objective_value;
    assert!(
        (r.objective - direct).abs() < 1e-8,
        "{} vs {direct}",
        r.objective
    );
}

#[test]
fn level_two_point_on_a_path() {
    let g = path(3);
    let m = PartialDfa::from_transitions(1, 3, 0, &[0], [(0, 0, 0), (0, 2, 0)]).unwrap();
    let (h, a) = hermitized_embedding(&g, &m);
    let mats = a.ordered(&h).unwrap();
    let psi = top_eigenvector(&h.objective.evaluate(&mats, a.dim));
    let relax = npa_moment_matrix(&h, 2).unwrap();
    let r = relax
        .check_point(&relax.point_from_operators(&h, &mats, &psi).unwrap())
        .unwrap();
    assert!(r.max_residual <= 1e-8, "{}", r.max_residual);
    assert!(r.min_eigenvalue >= -1e-8, "{}", r.min_eigenvalue);
    assert!((r.objective - 2.0).abs() < 1e-8);
}

#[test]
fn real_problems_stay_real() {
    let mut p = NcProblem::new(vec![NcVariable {
        name: "X".into(),
        hermitian: true,
        weight: 1,
    }])
    .unwrap();
    p.psd.push(Constraint {
        group: "bound".into(),
        poly: Poly::one().sub(&Poly::var(0).mul(&Poly::var(0))),
    });
    p.objective = Poly::var(0);
    let r = npa_moment_matrix(&p, 2).unwrap();
    assert!(!r.complex);
    assert_eq!(r.basis.len(), 3);
    assert_eq!(r.blocks[0].size, 3);
    assert_eq!(r.blocks[1].size, 2);
    let sdpa = to_sdpa(&r);
    assert_eq!(sdpa.block_sizes[..2], [3, 2]);
    let x = real(1, &[1.0]);
    let psi = nalgebra::DVector::from_element(1, Complex64::new(1.0, 0.0));
    let rep = r
        .check_point(&r.point_from_operators(&p, &[x], &psi).unwrap())
        .unwrap();
    assert!(rep.max_residual < 1e-12 && rep.min_eigenvalue > -1e-12);
    assert!((rep.objective - 1.0).abs() < 1e-12);
}

fn arb_poly() -> impl Strategy<Value = Poly> {
    proptest::collection::vec(
        (
            proptest::collection::vec((0usize..3, any::<bool>()), 0..4),
            -3i64..4,
            -3i64..4,
        ),
        0..6,
    )
    .prop_map(|terms| {
        let mut p = Poly::zero();
        for (letters, re, im) in terms {
            let m = Monomial(
                letters
                    .into_iter()
                    .map(|(v, adj)| Letter {
                        var: v,
                        adj: adj && v != 0,
                    })
                    .collect(),
            );
            p.add_term(
                m,
                graphcap::npo::poly::int(re) + imag_unit() * graphcap::npo::poly::int(im),
            );
        }
        p
    })
}

proptest! {
    #[test]
    fn adjoint_is_an_involution(p in arb_poly(), q in arb_poly()) {
        let herm = [true, false, false];
        prop_assert_eq!(p.adjoint(&herm).adjoint(&herm), p.clone());
        prop_assert_eq!(p.mul(&q).adjoint(&herm), q.adjoint(&herm).mul(&p.adjoint(&herm)));
        prop_assert!(hermitian_part(&p, &herm).is_self_adjoint(&herm));
        prop_assert!(anti_hermitian_part(&p, &herm).is_self_adjoint(&herm));
        prop_assert_eq!(hermitian_part(&p, &herm).add(&anti_hermitian_part(&p, &herm).scale(imag_unit())), p);
    }
}

#[test]
fn embedding_rejects_bad_machines() {
    let g = Graph::cycle(5).unwrap();
    let p = build_capacity_problem(&g, BuildOptions::default()).unwrap();
    let merge = PartialDfa::from_transitions(2, 5, 0, &[0], [(0, 0, 0), (1, 0, 0)]).unwrap();
    assert!(matches!(
        embed_reversible_dfa(&p, &g, &merge),
        Err(graphcap::Error::NotReversible)
    ));
    let wrong = PartialDfa::from_transitions(1, 3, 0, &[0], [(0, 0, 0)]).unwrap();
    assert!(embed_reversible_dfa(&p, &g, &wrong).is_err());
}
