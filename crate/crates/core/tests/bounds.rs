use graphcap::automata::growth_rate;
use graphcap::bounds::{
    decode_sat_model, export_search_cnf, rev_lower_bound, rewind_dfa, search_reversible,
    search_reversible_naive, shannon_upper_from_rev, Witness,
};
use graphcap::graph::power_independence;
use graphcap::verify::check_code_product;
use graphcap::{Graph, PartialDfa};

const BUDGET: u64 = 50_000_000;

/// All partial injections on `d` points.
fn injections(d: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::new();
        for p in &out {
            next.push({
                let mut q = p.clone();
                q.push(None);
                q
            });
            for t in 0..d {
                if !p.contains(&Some(t)) {
                    let mut q = p.clone();
                    q.push(Some(t));
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

/// Every reversible table on exactly `d` states over `k` symbols.
fn reversible_tables(d: usize, k: usize) -> Vec<PartialDfa> {
    let inj = injections(d);
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let mut m = PartialDfa::new(d, k, 0, &[0]).unwrap();
        for (x, &i) in idx.iter().enumerate() {
            for (s, t) in inj[i].iter().enumerate() {
                m.set(s, x, *t).unwrap();
            }
        }
        out.push(m);
        let mut pos = 0;
        loop {
            if pos == k {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < inj.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn strongly_connected(m: &PartialDfa) -> bool {
    m.reachable_from(0).iter().all(|&b| b) && m.coreachable_to(&[0]).iter().all(|&b| b)
}

fn brute_force_best(g: &Graph, d: usize) -> f64 {
    let mut best = 0.0f64;
    for e in 1..=d {
        for m in reversible_tables(e, g.n()) {
            if strongly_connected(&m) && check_code_product(g, &m).unwrap().valid {
                best = best.max(growth_rate(&m));
            }
        }
    }
    best
}

fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
}

#[test]
fn search_matches_brute_force() {
    let cases = [
        (Graph::cycle(3).unwrap(), 3),
        (path(3), 3),
        (Graph::empty(2), 2),
        (Graph::complete(2), 2),
        (Graph::cycle(4).unwrap(), 2),
        (path(4), 2),
        (Graph::cycle(5).unwrap(), 2),
    ];
    for (g, d) in cases {
        let expected = brute_force_best(&g, d);
        let report = search_reversible(&g, d, BUDGET).unwrap();
        assert!(report.exact);
        assert!(
            (report.value - expected).abs() < 1e-9,
            "{g:?} d={d}: {} vs {expected}",
            report.value
        );
        let Some(Witness::Dfa(m)) = report.witness else {
            panic!("missing machine")
        };
        assert!(m.is_reversible());
        assert!(check_code_product(&g, &m).unwrap().valid);
    }
}

#[test]
fn canonical_and_naive_searches_agree() {
    let graphs = [
        Graph::cycle(3).unwrap(),
        Graph::cycle(4).unwrap(),
        path(4),
        Graph::cycle(5).unwrap(),
    ];
    for g in &graphs {
        for d in 1..=3 {
            let canonical = search_reversible(g, d, BUDGET).unwrap();
            let naive = (1..=d)
                .map(|e| search_reversible_naive(g, e, BUDGET).unwrap())
                .inspect(|o| assert!(o.exhaustive))
                .map(|o| o.growth)
                .fold(0.0, f64::max);
            assert!(canonical.exact);
            assert!((canonical.value - naive).abs() < 1e-9, "{g:?} d={d}");
        }
    }
}

#[test]
fn six_states_reach_root_five_on_c5() {
    let g = Graph::cycle(5).unwrap();
    let report = search_reversible(&g, 6, BUDGET).unwrap();
    assert!((report.value - 5f64.sqrt()).abs() < 1e-9);
    let Some(Witness::Dfa(m)) = report.witness else {
        panic!("missing machine")
    };
    assert!(check_code_product(&g, &m).unwrap().valid);
}

#[test]
fn rewind_of_c7_pair_code() {
    let c7 = Graph::cycle(7).unwrap();
    let r = power_independence(&c7, 2, BUDGET);
    assert_eq!(r.size, 10);
    let words: Vec<Vec<usize>> = r.witness.iter().map(|&v| vec![v / 7, v % 7]).collect();
    let m = rewind_dfa(&c7, &words).unwrap();
    assert!(m.is_reversible());
    assert!(check_code_product(&c7, &m).unwrap().valid);
    // Two letters plus two index digits per block.
    assert!((growth_rate(&m) - 10f64.powf(0.25)).abs() < 1e-9);
}

#[test]
fn rewind_meets_length_bound() {
    let c5 = Graph::cycle(5).unwrap();
    let fixtures: Vec<(Graph, Vec<Vec<usize>>)> = vec![
        (
            c5.clone(),
            vec![vec![0, 0], vec![1, 2], vec![2, 4], vec![3, 1], vec![4, 3]],
        ),
        (c5.clone(), vec![vec![0], vec![2]]),
        (Graph::empty(3), vec![vec![0], vec![1], vec![2]]),
        (Graph::cycle(7).unwrap(), vec![vec![0], vec![2], vec![4]]),
    ];
    for (g, words) in fixtures {
        let m = rewind_dfa(&g, &words).unwrap();
        assert!(check_code_product(&g, &m).unwrap().valid);
        let n = words[0].len() as f64;
        let count = words.len() as f64;
        let digits = (count.ln() / (g.n() as f64).ln()).ceil().max(1.0);
        let floor = count.powf(1.0 / (n + digits));
        assert!(growth_rate(&m) >= floor - 1e-9, "{words:?}");
    }
}

#[test]
fn c5_sandwich() {
    let c5 = Graph::cycle(5).unwrap();
    let theta = 5f64.sqrt();
    let rev = search_reversible(&c5, 6, BUDGET).unwrap().value;
    let lower = rev_lower_bound(5, theta).unwrap();
    assert!(lower <= rev + 1e-9);
    assert!(rev <= theta + 1e-9);
    let upper = shannon_upper_from_rev(rev, 5).unwrap();
    assert!(theta <= upper + 1e-9);
}

/// Minimal DPLL with unit propagation; returns a model over `1..=vars`.
fn solve(vars: usize, clauses: &[Vec<i64>]) -> Option<Vec<bool>> {
    fn propagate(clauses: &[Vec<i64>], val: &mut [Option<bool>]) -> bool {
        loop {
            let mut changed = false;
            for c in clauses {
                let mut unassigned = None;
                let mut free = 0;
                let mut sat = false;
                for &lit in c {
                    match val[lit.unsigned_abs() as usize] {
                        Some(b) if b == (lit > 0) => {
                            sat = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            free += 1;
                            unassigned = Some(lit);
                        }
                    }
                }
                if sat {
                    continue;
                }
                match free {
                    0 => return false,
                    1 => {
                        let lit = unassigned.unwrap();
                        val[lit.unsigned_abs() as usize] = Some(lit > 0);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }
    fn rec(clauses: &[Vec<i64>], val: &mut Vec<Option<bool>>) -> bool {
        if !propagate(clauses, val) {
            return false;
        }
        let Some(v) = (1..val.len()).find(|&v| val[v].is_none()) else {
            return true;
        };
        for b in [true, false] {
            let mut next = val.clone();
            next[v] = Some(b);
            if rec(clauses, &mut next) {
                *val = next;
                return true;
            }
        }
        false
    }
    let mut val = vec![None; vars + 1];
    rec(clauses, &mut val).then(|| val[1..].iter().map(|b| b.unwrap_or(false)).collect())
}

fn model_line(model: &[bool]) -> String {
    let lits: Vec<String> = model
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            if b {
                format!("{}", i + 1)
            } else {
                format!("-{}", i + 1)
            }
        })
        .collect();
    format!("v {} 0", lits.join(" "))
}

fn with_table(cnf: &graphcap::bounds::SearchCnf, m: &PartialDfa) -> Vec<Vec<i64>> {
    let l = cnf.layout;
    let mut clauses = cnf.clauses.clone();
    for s in 0..l.states {
        for x in 0..l.alphabet {
            for t in 0..l.states {
                let var = l.t(s, x, t);
                clauses.push(vec![if m.next(s, x) == Some(t) { var } else { -var }]);
            }
        }
    }
    clauses
}

#[test]
fn small_cnfs_decode_to_valid_codes() {
    for (g, d) in [
        (Graph::cycle(3).unwrap(), 1),
        (Graph::cycle(5).unwrap(), 1),
        (Graph::cycle(5).unwrap(), 2),
    ] {
        let cnf = export_search_cnf(&g, d).unwrap();
        let mut clauses = cnf.clauses.clone();
        let mut models = 0;
        while let Some(model) = solve(cnf.layout.num_vars(), &clauses) {
            let m = decode_sat_model(cnf.layout, &model_line(&model)).unwrap();
            assert!(m.is_reversible());
            assert!(m.transitions().any(|(s, _, _)| s == 0));
            if strongly_connected(&m) {
                assert!(check_code_product(&g, &m).unwrap().valid, "{m:?}");
            }
            models += 1;
            // Block this transition table.
            let l = cnf.layout;
            clauses.push(
                (1..=l.transition_vars() as i64)
                    .map(|v| if model[v as usize - 1] { -v } else { v })
                    .collect(),
            );
        }
        assert!(models > 0);
        if g.n() == 3 {
            // One loop on a single vertex.
            assert_eq!(models, 3);
        }
    }
}

#[test]
fn cnf_accepts_exactly_the_valid_connected_tables() {
    let g = Graph::cycle(5).unwrap();
    let cnf = export_search_cnf(&g, 2).unwrap();
    let mut seen = 0;
    for m in reversible_tables(2, 5) {
        if !strongly_connected(&m) {
            continue;
        }
        let valid = check_code_product(&g, &m).unwrap().valid;
        let sat = solve(cnf.layout.num_vars(), &with_table(&cnf, &m)).is_some();
        assert_eq!(sat, valid, "{m:?}");
        seen += 1;
    }
    assert!(seen > 100);
}

#[test]
fn cnf_accepts_the_six_state_machine() {
    let g = Graph::cycle(5).unwrap();
    let Some(Witness::Dfa(m)) = search_reversible(&g, 6, BUDGET).unwrap().witness else {
        panic!("missing machine")
    };
    let cnf = export_search_cnf(&g, m.states()).unwrap();
    assert!(solve(cnf.layout.num_vars(), &with_table(&cnf, &m)).is_some());
    let bad = PartialDfa::from_transitions(1, 5, 0, &[0], [(0, 0, 0), (0, 1, 0)]).unwrap();
    let cnf1 = export_search_cnf(&g, 1).unwrap();
    assert!(solve(cnf1.layout.num_vars(), &with_table(&cnf1, &bad)).is_none());
}
