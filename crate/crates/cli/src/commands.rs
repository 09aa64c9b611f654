use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, ValueEnum};
use loccforge::analysis::{
    build_convertibility_round, is_convertible, is_reachable, lu_equivalent, ConvertibilityOutcome, SearchConfig,
    SearchMode,
};
use loccforge::io::{
    matrix_from_json, matrix_to_json, parse_json, parse_protocol, protocol_to_json, to_json_string, GroupFile,
    ProductFile, StateFile,
};
use loccforge::linalg::{commutator_norm, fidelity, operator_to_bloch, LocalOperator, ProductOperator};
use loccforge::protocol::{
    build_paper_example, simulate as run_simulation, simulate_direct, validate, verify_deterministic, DeterminismClass,
    ProbabilityRule, SimulationResult,
};
use loccforge::sampler::{
    constructed_reachable_fraction, convertible_fraction, reachable_fraction, SampleConfig, SampleReport,
};
use loccforge::seed::{build_l_state, verify_stabilizer, GroupElement, GroupMode, StabilizerReport};
use loccforge::{Class, Error, Group, Product, Tolerances, Tracked};
use serde_json::{json, Value};

use crate::input::{self, load_class, operator_arg, L_STATE};
use crate::report::{Report, Status};

type Outcome = Result<Report, String>;

fn err(e: Error) -> String {
    e.to_string()
}

fn party_arg(party: Option<usize>, parties: usize) -> Result<Option<usize>, String> {
    match party {
        None => Ok(None),
        Some(p) if p >= 1 && p <= parties => Ok(Some(p - 1)),
        Some(p) => Err(format!("party {p} out of range 1..={parties}")),
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

/// Bloch vectors for qubit parties, full Gram matrices otherwise.
fn gram_summary(grams: &[LocalOperator<f64>], tol: f64) -> Value {
    let blochs: Option<Vec<[f64; 3]>> =
        grams.iter().map(|g| operator_to_bloch(g, tol.max(1e-6)).ok().map(|b| b.to_array())).collect();
    match blochs {
        Some(b) => json!({ "bloch": b }),
        None => json!({ "grams": grams.iter().map(matrix_to_json).collect::<Vec<_>>() }),
    }
}

fn class_label(class: &Class) -> &'static str {
    if class.seed().is_some() {
        "concrete"
    } else {
        "abstract"
    }
}

#[derive(Args, Debug)]
pub struct VerifySeedArgs {
    /// Built-in seed state.
    #[arg(long, value_parser = [L_STATE], conflicts_with_all = ["state", "group"])]
    pub builtin: Option<String>,
    /// Seed state file.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Stabilizer group file.
    #[arg(long)]
    pub group: Option<PathBuf>,
}

/// Parses a group file without the closure check, so that closure failures
/// are reported rather than rejected.
fn raw_group(path: &Path, tol: f64) -> Result<Group, String> {
    let file: GroupFile = parse_json(&input::read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut elements = Vec::with_capacity(file.elements.len());
    for (element, e) in file.elements.iter().enumerate() {
        if e.factors.len() != file.party_dims.len() {
            return Err(format!(
                "{}: element {} has {} factors for {} parties",
                path.display(),
                element + 1,
                e.factors.len(),
                file.party_dims.len()
            ));
        }
        let mut factors = Vec::with_capacity(e.factors.len());
        for (party, m) in e.factors.iter().enumerate() {
            let f = matrix_from_json::<f64>(m).map_err(|e| format!("{}: {e}", path.display()))?;
            if f.dim() != file.party_dims[party] {
                return Err(format!(
                    "{}: element {}, party {} has dimension {}, expected {}",
                    path.display(),
                    element + 1,
                    party + 1,
                    f.dim(),
                    file.party_dims[party]
                ));
            }
            if !f.is_unitary(tol) {
                return Err(format!("{}: {}", path.display(), Error::NonUnitary { element, party }));
            }
            factors.push(f);
        }
        let operator = ProductOperator::new(factors).map_err(err)?;
        elements.push(GroupElement { operator, phase: loccforge::Complex::new(e.phase[0], e.phase[1]) });
    }
    Ok(Group::from_elements(file.party_dims, elements, GroupMode::Abstract))
}

fn stabilizer_payload(source: &str, report: &StabilizerReport<f64>, group: &Group, rank: Option<Vec<f64>>) -> Value {
    let elements: Vec<Value> = report
        .elements
        .iter()
        .map(|e| {
            let phase = group.element(e.index).phase;
            json!({
                "index": e.index + 1,
                "phase": [phase.re, phase.im],
                "stabilization_residual": e.stabilization_residual,
                "unitarity_residual": e.unitarity_residuals.iter().copied().fold(0.0, f64::max),
                "passed": e.passed,
            })
        })
        .collect();
    let failures: Vec<[usize; 2]> = report.closure_failures().iter().map(|&(a, b)| [a + 1, b + 1]).collect();
    json!({
        "source": source,
        "party_dims": group.party_dims(),
        "n_elements": group.len(),
        "identity_index": report.identity_index.map(|i| i + 1),
        "closure": {
            "pairs_checked": group.len() * group.len(),
            "holds": report.closure_holds(),
            "failures": failures,
        },
        "max_residual": report.elements.iter().map(|e| e.worst_residual()).fold(0.0, f64::max),
        "local_min_singular_values": rank,
        "elements": elements,
    })
}

pub fn verify_seed(a: &VerifySeedArgs, tol: Tolerances<f64>) -> Outcome {
    let (source, group, state) = match (&a.builtin, &a.state, &a.group) {
        (Some(_), _, _) => {
            let seed = build_l_state(tol.eq).map_err(err)?;
            (L_STATE.to_string(), seed.stabilizer().clone(), Some(seed.state().clone()))
        }
        (None, state, Some(group)) => {
            let g = raw_group(group, tol.eq)?;
            let s = match state {
                Some(p) => {
                    let file: StateFile = parse_json(&input::read(p)?).map_err(|e| format!("{}: {e}", p.display()))?;
                    Some(file.to_state::<f64>().map_err(|e| format!("{}: {e}", p.display()))?)
                }
                None => None,
            };
            (group.display().to_string(), g, s)
        }
        (None, _, None) => return Err("give --builtin l-state or --group FILE (with --state FILE)".into()),
    };
    let report = verify_stabilizer(&group, state.as_ref(), tol.eq).map_err(err)?;
    let rank = state.as_ref().map(|s| s.local_min_singular_values());
    let status = if report.passed() { Status::Pass } else { Status::Fail };
    Ok(Report::new("verify-seed", status, stabilizer_payload(&source, &report, &group, rank), tol))
}

#[derive(Args, Debug)]
pub struct ReachableArgs {
    /// `l-state`, `pauli:N` or a group file.
    #[arg(long)]
    pub group: String,
    /// Seed state attached to a group file.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Target operator file.
    #[arg(long)]
    pub h: Option<PathBuf>,
    /// Qubit Bloch vectors `"x,y,z; x,y,z; ..."`.
    #[arg(long, allow_hyphen_values = true)]
    pub bloch: Option<String>,
}

fn residual_table(grams: &[LocalOperator<f64>], group: &Group) -> Result<Vec<Vec<f64>>, String> {
    group
        .elements()
        .iter()
        .map(|e| grams.iter().zip(e.operator.factors()).map(|(g, s)| commutator_norm(g, s).map_err(err)).collect())
        .collect()
}

pub fn check_reachable(a: &ReachableArgs, tol: Tolerances<f64>) -> Outcome {
    let class = load_class(&a.group, a.state.as_deref(), tol)?;
    let group = class.group();
    let h = operator_arg(a.h.as_deref(), a.bloch.as_deref(), group.party_dims())?;
    let cert = is_reachable(&h, group, tol).map_err(err)?;
    let grams = h.grams();
    let mut payload = json!({
        "class": class_label(&class),
        "target": gram_summary(&grams, tol.eq),
        "residual_table": residual_table(&grams, group)?,
    });
    let status = match &cert {
        Some(c) => {
            payload["certificate"] = json!({
                "symmetry_index": c.symmetry_index + 1,
                "distinguished_party": c.distinguished_party + 1,
                "commuting_residuals": c.commuting_residuals,
            });
            Status::Pass
        }
        None => Status::NotFound,
    };
    Ok(Report::new("check-reachable", status, payload, tol))
}

#[derive(Args, Debug)]
pub struct ConvertibleArgs {
    /// `l-state`, `pauli:N` or a group file.
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Source operator file.
    #[arg(long)]
    pub g: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub bloch: Option<String>,
    /// Acting party (1-based); every party when omitted.
    #[arg(long)]
    pub party: Option<usize>,
    #[arg(long, default_value_t = SearchConfig::default().grid_step)]
    pub grid_step: f64,
    #[arg(long, default_value_t = SearchConfig::default().max_subset)]
    pub max_subset: usize,
    #[arg(long, default_value_t = SearchConfig::default().rng_seed)]
    pub rng_seed: u64,
    #[arg(long, default_value_t = SearchConfig::default().random_samples)]
    pub random_samples: usize,
    /// Use the numerical search even where a closed form applies.
    #[arg(long)]
    pub force_search: bool,
}

fn verdict(out: &ConvertibilityOutcome<f64>) -> &'static str {
    match (out.is_convertible(), out.exact) {
        (true, _) => "convertible",
        (false, true) => "exact",
        (false, false) => "search-exhausted",
    }
}

fn convertibility_entry(
    g: &Product,
    group: &Group,
    j: usize,
    out: &ConvertibilityOutcome<f64>,
    tol: Tolerances<f64>,
) -> Result<Value, String> {
    let mode = match out.mode {
        SearchMode::ClosedForm => "closed-form",
        SearchMode::Search => "search",
    };
    let mut entry = json!({
        "party": j + 1,
        "verdict": verdict(out),
        "mode": mode,
        "exact": out.exact,
        "admissible": one_based(&out.admissible),
        "evaluations": out.evaluations,
    });
    if let Some(c) = &out.certificate {
        let round = build_convertibility_round(g, c, group, tol).map_err(err)?;
        let check = validate(&round, group.party_dims(), tol.nonzero).map_err(err)?;
        entry["certificate"] = json!({
            "symmetry_indices": one_based(&c.symmetry_indices),
            "probabilities": c.probabilities,
            "target": gram_summary(std::slice::from_ref(&c.target_gram), tol.eq),
            "residual": c.residual,
            "round_completeness_residual": check.max_completeness_residual,
        });
    }
    Ok(entry)
}

pub fn check_convertible(a: &ConvertibleArgs, tol: Tolerances<f64>) -> Outcome {
    let class = load_class(&a.group, a.state.as_deref(), tol)?;
    let group = class.group();
    let g = operator_arg(a.g.as_deref(), a.bloch.as_deref(), group.party_dims())?;
    let cfg = SearchConfig {
        grid_step: a.grid_step,
        max_subset: a.max_subset,
        random_samples: a.random_samples,
        rng_seed: a.rng_seed,
        force_search: a.force_search,
        ..SearchConfig::default()
    };
    if !(cfg.grid_step > 0.0 && cfg.grid_step <= 1.0) {
        return Err(format!("--grid-step must lie in (0, 1], got {}", cfg.grid_step));
    }
    let parties: Vec<usize> = match party_arg(a.party, group.parties())? {
        Some(j) => vec![j],
        None => (0..group.parties()).collect(),
    };
    let mut results = Vec::with_capacity(parties.len());
    let mut any = false;
    let mut all_exact = true;
    for &j in &parties {
        let out = is_convertible(&g, group, j, &cfg, tol).map_err(err)?;
        any |= out.is_convertible();
        all_exact &= out.exact;
        results.push(convertibility_entry(&g, group, j, &out, tol)?);
    }
    let status = if any { Status::Pass } else { Status::NotFound };
    let label = match (any, all_exact) {
        (true, _) => "convertible",
        (false, true) => "exact",
        (false, false) => "search-exhausted",
    };
    let payload = json!({
        "class": class_label(&class),
        "source": gram_summary(&g.grams(), tol.eq),
        "verdict": label,
        "parties": results,
    });
    Ok(Report::new("check-convertible", status, payload, tol))
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Protocol tree file.
    #[arg(long)]
    pub protocol: PathBuf,
    /// Initial operator file.
    #[arg(long)]
    pub initial: PathBuf,
    /// Class of the initial state; defaults to the file's `seed` field.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Expected final state, checked leaf by leaf.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Re-run on the full state vector and compare.
    #[arg(long)]
    pub cross_check: bool,
}

fn determinism_label(c: DeterminismClass) -> &'static str {
    match c {
        DeterminismClass::AllDeterministic => "all-deterministic",
        DeterminismClass::DeterministicWithProbabilisticSteps => "deterministic-with-probabilistic-steps",
        DeterminismClass::Nondeterministic => "nondeterministic",
    }
}

fn tracked(path: &Path, class: &Arc<Class>, tol: f64) -> Result<Tracked, String> {
    let (g, _) = input::load_product(path)?;
    if g.dims() != class.party_dims() {
        return Err(format!(
            "{}: dimensions {:?} do not match the class {:?}",
            path.display(),
            g.dims(),
            class.party_dims()
        ));
    }
    Tracked::new(g, class.clone(), tol).map_err(|e| format!("{}: {e}", path.display()))
}

fn leaf_table(sim: &SimulationResult<f64>, tol: f64) -> Vec<Value> {
    sim.leaves
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let mut v = json!({
                "leaf": i + 1,
                "path": l.path.to_string(),
                "probability": l.probability,
            });
            if let Value::Object(m) = gram_summary(&l.state.grams(), tol) {
                v.as_object_mut().expect("object").extend(m);
            }
            v
        })
        .collect()
}

pub fn simulate(a: &SimulateArgs, tol: Tolerances<f64>) -> Outcome {
    let (_, seed) = input::load_product(&a.initial)?;
    let spec = a.group.clone().or(seed).ok_or("the initial file names no seed; pass --group")?;
    let class = load_class(&spec, a.state.as_deref(), tol)?;
    let initial = tracked(&a.initial, &class, tol.eq)?;
    let protocol =
        parse_protocol::<f64>(&input::read(&a.protocol)?).map_err(|e| format!("{}: {e}", a.protocol.display()))?;
    let target = a.target.as_deref().map(|p| tracked(p, &class, tol.eq)).transpose()?;

    let check = match validate(&protocol, class.party_dims(), tol.nonzero) {
        Ok(c) => c,
        Err(e @ Error::Completeness { .. }) => {
            let Error::Completeness { path, residual } = &e else { unreachable!() };
            let payload = json!({ "message": e.to_string(), "round": path, "completeness_residual": residual });
            return Ok(Report::new("simulate", Status::Fail, payload, tol));
        }
        Err(e) => return Err(err(e)),
    };
    let sim = run_simulation(&protocol, &initial, tol).map_err(err)?;
    let mut status = Status::Pass;
    let mut ordered: Vec<_> = sim.rounds.iter().collect();
    ordered.sort_by(|a, b| a.path.cmp(&b.path));
    let rounds: Vec<Value> = ordered
        .into_iter()
        .map(|r| {
            json!({
                "path": r.path.to_string(),
                "party": r.party + 1,
                "probabilities": r.probabilities,
                "deterministic": r.deterministic,
            })
        })
        .collect();
    let mut leaves = leaf_table(&sim, tol.eq);
    let mut payload = json!({
        "class": class_label(&class),
        "probability_rule": match sim.rule {
            ProbabilityRule::ExactNorm => "exact-norm",
            ProbabilityRule::GramTrace => "gram-trace",
        },
        "n_leaves": sim.leaves.len(),
        "total_probability": sim.total_probability,
        "determinism_class": determinism_label(sim.determinism_class),
        "validation": {
            "rounds": check.rounds,
            "depth": check.depth,
            "max_completeness_residual": check.max_completeness_residual,
            "trivial_rounds": check.trivial_rounds.iter().map(ToString::to_string).collect::<Vec<_>>(),
        },
        "rounds": rounds,
        "pruned": sim.pruned.iter().map(|p| json!({ "path": p.path.to_string(), "probability": p.probability })).collect::<Vec<_>>(),
    });

    if let Some(t) = &target {
        let det = verify_deterministic(&sim, t, tol.eq).map_err(err)?;
        for (leaf, (_, w)) in leaves.iter_mut().zip(&det.witnesses) {
            leaf["witness"] = json!(w.map(|i| i + 1));
        }
        let failing: Vec<usize> =
            det.witnesses.iter().enumerate().filter(|(_, (_, w))| w.is_none()).map(|(i, _)| i + 1).collect();
        let mut section = json!({ "verified": det.deterministic, "failing_leaves": failing });
        if let Some(&first) = failing.first() {
            section["message"] =
                json!(format!("leaf {first} ({}) is not LU-equivalent to the target", sim.leaves[first - 1].path));
            status = Status::Fail;
        }
        payload["target"] = section;
    }

    if a.cross_check {
        let amps = initial.amplitudes().map_err(|_| "--cross-check needs a concrete seed state".to_string())?;
        let direct = simulate_direct(&protocol, &amps, class.party_dims(), tol.nonzero).map_err(err)?;
        let mut max_dp: f64 = 0.0;
        let mut min_fid: f64 = 1.0;
        let mut matched = direct.len() == sim.leaves.len();
        for (d, l) in direct.iter().zip(&sim.leaves) {
            matched &= d.path == l.path;
            max_dp = max_dp.max((d.probability - l.probability).abs());
            min_fid = min_fid.min(fidelity(&d.amplitudes, &l.state.amplitudes().map_err(err)?));
        }
        let agrees = matched && max_dp < 1e-10 && min_fid >= 1.0 - 1e-9;
        if !agrees {
            status = Status::Fail;
        }
        payload["cross_check"] = json!({
            "leaves": direct.len(),
            "paths_match": matched,
            "max_probability_difference": max_dp,
            "min_fidelity": min_fid,
            "agrees": agrees,
        });
    }
    payload["leaves"] = Value::Array(leaves);
    Ok(Report::new("simulate", status, payload, tol))
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    /// Parameter of the example states.
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    pub x: f64,
    /// Directory receiving the initial, target, protocol and summary files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), String> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn paper_example(a: &ExampleArgs, tol: Tolerances<f64>) -> Outcome {
    let ex = build_paper_example(a.x, tol).map_err(err)?;
    let group = ex.class.group();
    let cfg = SearchConfig::default();

    let mut conv = Vec::new();
    let mut non_convertible = true;
    for j in 0..group.parties() {
        let out = is_convertible(ex.initial.g(), group, j, &cfg, tol).map_err(err)?;
        non_convertible &= !out.is_convertible() && out.exact;
        conv.push(json!({
            "party": j + 1,
            "verdict": verdict(&out),
            "admissible": one_based(&out.admissible),
        }));
    }

    let check = validate(&ex.protocol, group.party_dims(), tol.nonzero).map_err(err)?;
    let complete = check.max_completeness_residual < 1e-12;
    let sim = run_simulation(&ex.protocol, &ex.initial, tol).map_err(err)?;
    let leaves_ok = sim.leaves.len() == 4 && (sim.total_probability - 1.0).abs() < 1e-9;
    let det = verify_deterministic(&sim, &ex.target, tol.eq).map_err(err)?;
    let root = sim.rounds.iter().find(|r| r.path.0.is_empty());
    let root_split = match root.map(|r| &r.children[..]) {
        Some([Some(a), Some(b)]) => lu_equivalent(a, b, tol.eq).map_err(err)?.is_none(),
        _ => false,
    };
    let class_ok = sim.determinism_class == DeterminismClass::DeterministicWithProbabilisticSteps && root_split;

    let mut leaves = leaf_table(&sim, tol.eq);
    for (leaf, (_, w)) in leaves.iter_mut().zip(&det.witnesses) {
        leaf["witness"] = json!(w.map(|i| i + 1));
    }
    let checks = json!({
        "initial_not_convertible": { "passed": non_convertible, "parties": conv },
        "completeness": { "passed": complete, "max_residual": check.max_completeness_residual, "bound": 1e-12 },
        "leaves": { "passed": leaves_ok, "count": sim.leaves.len(), "total_probability": sim.total_probability },
        "target_reached": { "passed": det.deterministic, "witnesses": det.witnesses.iter().map(|(_, w)| w.map(|i| i + 1)).collect::<Vec<_>>() },
        "determinism_class": {
            "passed": class_ok,
            "class": determinism_label(sim.determinism_class),
            "first_round_outcomes_lu_equivalent": !root_split,
        },
    });
    let all = [non_convertible, complete, leaves_ok, det.deterministic, class_ok].iter().all(|&b| b);
    let mut payload = json!({
        "x": a.x,
        "initial": gram_summary(&ex.initial.grams(), tol.eq),
        "intermediate": gram_summary(&ex.intermediate.grams(), tol.eq),
        "target": gram_summary(&ex.target.grams(), tol.eq),
        "checks": checks,
        "leaves": leaves,
    });

    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        write_file(dir, "initial.json", &to_json_string(&ProductFile::from_operator(ex.initial.g(), Some(L_STATE))))?;
        write_file(dir, "target.json", &to_json_string(&ProductFile::from_operator(ex.target.g(), Some(L_STATE))))?;
        write_file(dir, "protocol.json", &to_json_string(&protocol_to_json(&ex.protocol)))?;
        let files = ["initial.json", "target.json", "protocol.json", "summary.json"];
        payload["files"] = json!(files.iter().map(|f| dir.join(f).display().to_string()).collect::<Vec<_>>());
        write_file(dir, "summary.json", &to_json_string(&payload))?;
    }
    let status = if all { Status::Pass } else { Status::Fail };
    Ok(Report::new("paper-example", status, payload, tol))
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    Reachable,
    Convertible,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// `l-state`, `pauli:N` or a group file.
    #[arg(long)]
    pub group: String,
    #[arg(long, value_enum, default_value_t = SampleMode::Reachable)]
    pub mode: SampleMode,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Acting party for convertible mode (1-based); any party when omitted.
    #[arg(long)]
    pub party: Option<usize>,
    /// Sample targets built to be reachable instead of Ginibre operators.
    #[arg(long)]
    pub construct_reachable: bool,
}

pub fn sample(a: &SampleArgs, tol: Tolerances<f64>) -> Outcome {
    let class = load_class(&a.group, None, tol)?;
    let group = class.group();
    let mut cfg = SampleConfig::new(group.party_dims().to_vec(), a.n, a.seed);
    cfg.tol = tol.eq;
    cfg.nz_threshold = tol.nonzero;
    cfg.validate().map_err(err)?;
    let party = party_arg(a.party, group.parties())?;
    if a.construct_reachable && a.mode != SampleMode::Reachable {
        return Err("--construct-reachable applies to reachable mode only".into());
    }
    let est = match a.mode {
        SampleMode::Reachable if a.construct_reachable => constructed_reachable_fraction(group, &cfg),
        SampleMode::Reachable => reachable_fraction(group, &cfg),
        SampleMode::Convertible => convertible_fraction(group, &cfg, party, &SearchConfig::default()),
    }
    .map_err(err)?;
    let mut payload = serde_json::to_value(SampleReport::new(&cfg, &est)).map_err(|e| e.to_string())?;
    payload["hits"] = json!(est.hits);
    payload["mode"] = json!(match a.mode {
        SampleMode::Reachable if a.construct_reachable => "constructed-reachable",
        SampleMode::Reachable => "reachable",
        SampleMode::Convertible => "convertible",
    });
    payload["party"] = json!(party.map(|j| j + 1));
    payload["party_dims"] = json!(cfg.party_dims);
    Ok(Report::new("sample", Status::Pass, payload, tol))
}
