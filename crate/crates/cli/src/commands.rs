use std::fs;
use std::path::{Path, PathBuf};

use graphcap::automata::{growth_rate, growth_rate_simple, parse_dfa, simplify, write_dfa};
use graphcap::bounds::{
    decode_sat_model, export_search_cnf, index_digits, required_join_size, rev_lower_bound,
    rewind_dfa, search_reversible, shannon_upper_from_rev, GraphId, Witness,
};
use graphcap::graph::{named_graph, parse_graph, power_independence_seeded, VertexTuple};
use graphcap::npo::assign::{pair_space_values, top_eigenvector};
use graphcap::npo::{
    build_capacity_problem, embed_reversible_dfa, hermitize, npa_moment_matrix, to_sdpa,
    verify_assignment, write_sdpa,
};
use graphcap::qfa::{self, Qfa};
use graphcap::verify::is_collision;
use graphcap::{check_code_floodfill, check_code_product, CodeVerdict, Graph, PartialDfa};
use serde_json::{json, Value};
use thiserror::Error;

use super::{
    AlphaArgs, BoundsArgs, CheckArgs, Cli, Command, DfaArg, EmbeddingArgs, GraphSource,
    NpoExportArgs, QfaArgs, RewindArgs, SatArgs, SearchArgs, SimplifyArgs,
};

/// Strong powers are materialized, so their vertex count is capped.
const MAX_POWER_VERTICES: usize = 1 << 16;
/// Residual and eigenvalue tolerance for reporting an embedding as feasible.
const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] graphcap::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Invalid,
    Budget,
    Disagreement,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Invalid => 1,
            Status::Budget => 2,
            Status::Disagreement => 3,
        }
    }
}

pub struct Outcome {
    pub json: Value,
    pub summary: String,
    pub status: Status,
}

impl Outcome {
    fn new(json: Value, summary: String, complete: bool) -> Self {
        Outcome {
            json,
            summary,
            status: if complete { Status::Ok } else { Status::Budget },
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let seed = cli.seed;
    match cli.command {
        Command::Alpha(a) => alpha(a, seed),
        Command::Growth(a) => growth(a),
        Command::Check(a) => check(a),
        Command::Simplify(a) => simplify_cmd(a),
        Command::SearchRev(a) => search_rev(a),
        Command::Rewind(a) => rewind(a, seed),
        Command::Bounds(a) => bounds(a),
        Command::SatExport(a) => sat_export(a),
        Command::QfaCapacity(a) => qfa_capacity(a),
        Command::NpoExport(a) => npo_export(a),
        Command::VerifyEmbedding(a) => verify_embedding(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_graph(name: Option<&str>, file: Option<&Path>) -> Result<Graph> {
    match (name, file) {
        (Some(name), _) => Ok(named_graph(name)?),
        (None, Some(path)) => Ok(parse_graph(&read(path)?)?),
        (None, None) => Err(CliError::Usage("a graph is required".into())),
    }
}

impl GraphSource {
    fn load(&self) -> Result<Graph> {
        load_graph(self.graph.as_deref(), self.graph_file.as_deref())
    }
}

impl DfaArg {
    fn load(&self) -> Result<PartialDfa> {
        Ok(parse_dfa(&read(&self.dfa)?)?)
    }
}

fn graph_json(g: &Graph) -> Value {
    json!(GraphId::of(g))
}

fn dfa_json(dfa: &PartialDfa) -> Value {
    json!({
        "states": dfa.states(),
        "alphabet": dfa.alphabet(),
        "initial": dfa.initial(),
        "accepting": dfa.accepting(),
        "transitions": dfa.transitions().map(|(s, x, t)| [s, x, t]).collect::<Vec<_>>(),
    })
}

fn check_alphabet(g: &Graph, dfa: &PartialDfa) -> Result<()> {
    if dfa.alphabet() != g.n() {
        return Err(graphcap::Error::AlphabetMismatch {
            alphabet: dfa.alphabet(),
            graph: g.n(),
        }
        .into());
    }
    Ok(())
}

fn power_vertices(g: &Graph, k: u32) -> Result<usize> {
    g.n()
        .checked_pow(k)
        .filter(|&v| v <= MAX_POWER_VERTICES)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "power {k} has more than {MAX_POWER_VERTICES} vertices"
            ))
        })
}

/// Two words are confusable when every position holds equal or adjacent symbols.
fn confusable(g: &Graph, a: &[usize], b: &[usize]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == y || g.has_edge(x, y))
}

struct Code {
    words: Vec<Vec<usize>>,
    exact: bool,
    nodes: u64,
}

fn max_code(g: &Graph, k: u32, budget: u64, seed: u64) -> Result<Code> {
    power_vertices(g, k)?;
    let r = power_independence_seeded(g, k as usize, budget, seed);
    let sizes = vec![g.n(); k as usize];
    let words = r
        .witness
        .iter()
        .map(|&v| VertexTuple::decode(v, &sizes).map(|t| t.0))
        .collect::<graphcap::Result<Vec<_>>>()?;
    for (i, a) in words.iter().enumerate() {
        if let Some(b) = words[i + 1..].iter().find(|b| confusable(g, a, b)) {
            return Err(CliError::Internal(format!(
                "codewords {a:?} and {b:?} are confusable"
            )));
        }
    }
    Ok(Code {
        words,
        exact: r.exact,
        nodes: r.nodes,
    })
}

fn alpha(a: AlphaArgs, seed: u64) -> Result<Outcome> {
    let g = a.graph.load()?;
    let code = max_code(&g, a.power, a.budget, seed)?;
    let size = code.words.len();
    let root = (size as f64).powf(1.0 / f64::from(a.power));
    let json = json!({
        "graph": graph_json(&g),
        "power": a.power,
        "alpha": size,
        "root": root,
        "exact": code.exact,
        "nodes": code.nodes,
        "codewords": code.words,
    });
    let tag = if code.exact {
        "exact"
    } else {
        "lower bound, budget exhausted"
    };
    Ok(Outcome::new(
        json,
        format!(
            "alpha of power {} is {size} ({tag}); root {root:.6}",
            a.power
        ),
        code.exact,
    ))
}

fn growth(a: DfaArg) -> Result<Outcome> {
    let dfa = a.load()?;
    let rate = growth_rate(&dfa);
    let simple = match simplify(&dfa, None) {
        Ok(s) => Some(growth_rate_simple(&s)),
        Err(graphcap::Error::ZeroGrowth) => None,
        Err(e) => return Err(e.into()),
    };
    let json = json!({
        "states": dfa.states(),
        "alphabet": dfa.alphabet(),
        "transitions": dfa.transition_count(),
        "reversible": dfa.is_reversible(),
        "growth": rate,
        "growth_simplified": simple,
    });
    Ok(Outcome::new(json, format!("growth rate {rate:.6}"), true))
}

fn verdict_json(v: &CodeVerdict) -> Value {
    json!({ "valid": v.valid, "witness_a": v.witness_a, "witness_b": v.witness_b })
}

fn check(a: CheckArgs) -> Result<Outcome> {
    let g = a.graph.load()?;
    let dfa = a.dfa.load()?;
    check_alphabet(&g, &dfa)?;
    let product = check_code_product(&g, &dfa)?;
    let flood = match simplify(&dfa, None) {
        Ok(s) => Some(check_code_floodfill(&g, &s)?),
        Err(graphcap::Error::ZeroGrowth) => None,
        Err(e) => return Err(e.into()),
    };
    let mut problems = Vec::new();
    for (name, v) in [("product", Some(&product)), ("flood-fill", flood.as_ref())] {
        if let Some(v) = v {
            if let Some((x, y)) = v.witness() {
                if !is_collision(&g, &dfa, x, y) {
                    problems.push(format!("{name} witness is not a collision"));
                }
            }
        }
    }
    let agree = flood.as_ref().map(|f| f.valid == product.valid);
    if agree == Some(false) {
        problems.push("checkers disagree".into());
    }
    let mut json = verdict_json(&product);
    json["product"] = verdict_json(&product);
    json["floodfill"] = flood.as_ref().map_or(Value::Null, verdict_json);
    json["agree"] = json!(agree);
    if !problems.is_empty() {
        return Ok(Outcome {
            json,
            summary: format!("error: {}", problems.join("; ")),
            status: Status::Disagreement,
        });
    }
    let summary = match (&product.witness_a, &product.witness_b) {
        (Some(x), Some(y)) => format!("not a code: {x:?} and {y:?} are confusable"),
        _ => "valid zero-error code".to_string(),
    };
    Ok(Outcome::new(json, summary, true))
}

fn simplify_cmd(a: SimplifyArgs) -> Result<Outcome> {
    let dfa = a.dfa.load()?;
    let s = simplify(&dfa, a.target_growth)?;
    let rate = growth_rate_simple(&s);
    if let Some(path) = &a.out {
        write(path, &write_dfa(s.dfa()))?;
    }
    let json = json!({
        "states_before": dfa.states(),
        "states": s.dfa().states(),
        "growth": rate,
        "dfa": dfa_json(s.dfa()),
    });
    Ok(Outcome::new(
        json,
        format!(
            "{} of {} states kept, growth {rate:.6}",
            s.dfa().states(),
            dfa.states()
        ),
        true,
    ))
}

fn search_rev(a: SearchArgs) -> Result<Outcome> {
    let g = a.graph.load()?;
    let r = search_reversible(&g, a.states as usize, a.budget)?;
    let dfa = match &r.witness {
        Some(Witness::Dfa(d)) => d.clone(),
        _ => return Err(CliError::Internal("search returned no automaton".into())),
    };
    let verdict = check_code_product(&g, &dfa)?;
    if !verdict.valid || !dfa.is_reversible() {
        return Err(CliError::Internal(
            "search returned an invalid automaton".into(),
        ));
    }
    if let Some(path) = &a.out {
        write(path, &write_dfa(&dfa))?;
    }
    let json = json!({
        "quantity": r.quantity,
        "value": r.value,
        "graph": r.graph,
        "max_states": a.states,
        "budget_used": r.budget_used,
        "exact": r.exact,
        "dfa": dfa_json(&dfa),
    });
    let tag = if r.exact {
        "exhaustive"
    } else {
        "budget exhausted"
    };
    Ok(Outcome::new(
        json,
        format!(
            "best reversible growth on {} states: {:.6} ({tag})",
            a.states, r.value
        ),
        r.exact,
    ))
}

fn parse_codewords(text: &str) -> Result<Vec<Vec<usize>>> {
    text.split(';')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| {
            w.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| CliError::Usage(format!("bad symbol {t:?}")))
                })
                .collect()
        })
        .collect()
}

fn rewind(a: RewindArgs, seed: u64) -> Result<Outcome> {
    let g = a.graph.load()?;
    let (words, complete) = match (&a.codewords, a.power) {
        (Some(text), _) => (parse_codewords(text)?, true),
        (None, Some(k)) => {
            let code = max_code(&g, k, a.budget, seed)?;
            (code.words, code.exact)
        }
        (None, None) => return Err(CliError::Usage("give --codewords or --power".into())),
    };
    let dfa = rewind_dfa(&g, &words)?;
    let valid = check_code_product(&g, &dfa)?.valid;
    let rate = growth_rate(&dfa);
    let len = words[0].len();
    let period = len + index_digits(words.len(), g.n());
    let expected = (words.len() as f64).powf(1.0 / period as f64);
    if let Some(path) = &a.out {
        write(path, &write_dfa(&dfa))?;
    }
    let json = json!({
        "graph": graph_json(&g),
        "codewords": words.len(),
        "length": len,
        "states": dfa.states(),
        "reversible": dfa.is_reversible(),
        "valid": valid,
        "growth": rate,
        "expected_growth": expected,
        "dfa": dfa_json(&dfa),
    });
    Ok(Outcome::new(
        json,
        format!(
            "rewind automaton on {} states, growth {rate:.6}",
            dfa.states()
        ),
        complete,
    ))
}

fn bounds(a: BoundsArgs) -> Result<Outcome> {
    let size = match a.graph.size {
        Some(n) => n,
        None => load_graph(a.graph.graph.as_deref(), a.graph.graph_file.as_deref())?.n(),
    };
    let mut json = json!({ "graph_size": size });
    let mut parts = Vec::new();
    if let Some(theta) = a.theta {
        let v = rev_lower_bound(size, theta)?;
        json["rev_lower"] = json!({ "theta": theta, "value": v });
        parts.push(format!("reversible capacity >= {v:.6}"));
    }
    if let Some(theta_rev) = a.theta_rev {
        let v = shannon_upper_from_rev(theta_rev, size)?;
        json["upper_from_rev"] = json!({ "theta_rev": theta_rev, "value": v });
        parts.push(format!("capacity <= {v:.6}"));
    }
    if let Some(eps) = a.epsilon {
        let v = required_join_size(size, eps)?;
        json["join_size"] = json!({ "epsilon": eps, "value": v });
        parts.push(format!("join size {v}"));
    }
    Ok(Outcome::new(json, parts.join("; "), true))
}

fn sat_export(a: SatArgs) -> Result<Outcome> {
    let g = a.graph.load()?;
    let cnf = export_search_cnf(&g, a.states as usize)?;
    if let Some(model) = &a.model {
        let dfa = decode_sat_model(cnf.layout, &read(model)?)?;
        let valid = check_code_product(&g, &dfa)?.valid;
        let rate = growth_rate(&dfa);
        let json = json!({
            "reversible": dfa.is_reversible(),
            "valid": valid,
            "growth": rate,
            "dfa": dfa_json(&dfa),
        });
        return Ok(Outcome::new(
            json,
            format!("decoded automaton, growth {rate:.6}"),
            true,
        ));
    }
    let out = a
        .out
        .as_ref()
        .ok_or_else(|| CliError::Usage("--out is required".into()))?;
    write(out, &cnf.to_dimacs())?;
    let json = json!({
        "variables": cnf.layout.num_vars(),
        "clauses": cnf.clauses.len(),
        "out": out,
    });
    Ok(Outcome::new(
        json,
        format!(
            "{} variables, {} clauses",
            cnf.layout.num_vars(),
            cnf.clauses.len()
        ),
        true,
    ))
}

fn qfa_capacity(a: QfaArgs) -> Result<Outcome> {
    let (machine, dfa_growth) = match (&a.dfa, &a.qfa) {
        (Some(path), _) => {
            let dfa = parse_dfa(&read(path)?)?;
            (qfa::from_reversible_dfa(&dfa)?, Some(growth_rate(&dfa)))
        }
        (None, Some(path)) => (Qfa::from_json(&read(path)?)?, None),
        (None, None) => return Err(CliError::Usage("give --dfa or --qfa".into())),
    };
    let spectral = qfa::capacity_spectral(&machine);
    let mut json = json!({
        "dim": machine.dim(),
        "alphabet": machine.alphabet(),
        "layout": machine.layout(),
        "capacity": spectral,
        "dfa_growth": dfa_growth,
    });
    if let Some(n) = a.length {
        let n = n as usize;
        let (value, method) = if a.enumerate {
            (
                qfa::capacity_finite_n_enumerated(&machine, n)?,
                "enumeration",
            )
        } else {
            (qfa::capacity_finite_n(&machine, n)?, "transfer")
        };
        json["finite"] = json!({ "length": n, "value": value, "method": method });
    }
    Ok(Outcome::new(
        json,
        format!("spectral capacity {spectral:.6}"),
        true,
    ))
}

fn npo_export(a: NpoExportArgs) -> Result<Outcome> {
    let g = a.graph.load()?;
    let p = build_capacity_problem(&g, a.problem.options())?;
    let h = hermitize(&p)?;
    if let Some(path) = &a.dump {
        write(path, &h.dump())?;
    }
    let relax = npa_moment_matrix(&h, a.level)?;
    let sdpa = to_sdpa(&relax);
    write(&a.out, &write_sdpa(&sdpa))?;
    let mut warnings = h.metadata.warnings.clone();
    warnings.extend(relax.warnings.iter().cloned());
    let json = json!({
        "graph": graph_json(&g),
        "variables": p.variables.len(),
        "hermitian_variables": h.variables.len(),
        "equalities": h.equalities.len(),
        "psd_constraints": h.psd.len(),
        "level": a.level,
        "basis_size": relax.basis.len(),
        "complex": relax.complex,
        "sdp_constraints": sdpa.m(),
        "block_sizes": sdpa.block_sizes,
        "objective_shift": relax.objective_shift,
        "warnings": warnings,
        "out": a.out,
    });
    Ok(Outcome::new(
        json,
        format!(
            "{} variables, basis {}, {} constraints written",
            p.variables.len(),
            relax.basis.len(),
            sdpa.m()
        ),
        true,
    ))
}

fn verify_embedding(a: EmbeddingArgs) -> Result<Outcome> {
    let g = a.graph.load()?;
    let dfa = a.dfa.load()?;
    check_alphabet(&g, &dfa)?;
    let base = build_capacity_problem(&g, a.problem.options())?;
    let p = if a.hermitize || a.level.is_some() {
        hermitize(&base)?
    } else {
        base
    };
    let assignment = embed_reversible_dfa(&p, &g, &dfa)?;
    let report = verify_assignment(&p, &assignment)?;
    let pair = pair_space_values(&p, &assignment, g.n())?;
    let mut feasible = report.max_equality_residual <= FEASIBILITY_TOL
        && report.min_psd_eigenvalue >= -FEASIBILITY_TOL;
    let mut json = json!({
        "graph": graph_json(&g),
        "dim": assignment.dim,
        "hermitian": p.is_hermitian_only(),
        "growth": growth_rate(&dfa),
        "max_equality_residual": report.max_equality_residual,
        "min_psd_eigenvalue": report.min_psd_eigenvalue,
        "objective": report.objective_value,
        "pair_space": pair,
    });
    if let Some(level) = a.level {
        let mats = assignment.ordered(&p)?;
        let psi = top_eigenvector(&p.objective.evaluate(&mats, assignment.dim));
        let relax = npa_moment_matrix(&p, level)?;
        let point = relax.point_from_operators(&p, &mats, &psi)?;
        let r = relax.check_point(&point)?;
        feasible &= r.max_residual <= FEASIBILITY_TOL && r.min_eigenvalue >= -FEASIBILITY_TOL;
        json["moment"] = json!({
            "level": level,
            "basis_size": relax.basis.len(),
            "max_residual": r.max_residual,
            "min_eigenvalue": r.min_eigenvalue,
            "objective": r.objective,
        });
    }
    json["feasible"] = json!(feasible);
    Ok(Outcome::new(
        json,
        format!(
            "{}, objective {:.6}",
            if feasible { "feasible" } else { "infeasible" },
            report.objective_value
        ),
        true,
    ))
}
