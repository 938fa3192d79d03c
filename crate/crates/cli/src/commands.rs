use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use locver::ccbridge::{self, all_vectors, build_lf, compile_protocol, extract_protocol, BoolFunction};
use locver::harness::report::power_of_two_bound;
use locver::harness::{
    decide_nondet, run_with_rule, search, soundness_corpus, Budget, Corpus, Family, Inputs, SearchOptions,
};
use locver::lowerbound::coloring::{balanced_probe, colors_cycle, honest_certificates, CycleBank};
use locver::lowerbound::{analyze_gc, coloring_table, fooling_attack, make_blocks, odd_cycle_attack, AttackConfig, Harvest};
use locver::schemes::{BipLocal, BipTable, LocalToGlobal};
use locver::{build_scheme, Bits, Graph, Proof, Regime, Scheme, SchemeParams, StdLanguage, ViewRule};

use crate::output::{bitstring, emit, json_text, report};
use crate::{AttackArgs, BoundArg, Command, Common, CorpusArgs, Format, HarvestArg, InputsArg, Rule, SchemeArgs, Status};

pub fn run(cmd: &Command, common: &Common) -> Result<Status> {
    match cmd {
        Command::Verify { graph, proof, scheme, rule } => verify(graph, proof, scheme, *rule, common),
        Command::Prove { graph, scheme } => prove(graph, scheme, common),
        Command::Completeness { scheme, corpus } => completeness(scheme, corpus, common),
        Command::Soundness { scheme, corpus, samples } => soundness(scheme, corpus, *samples, common),
        Command::Decide { graph, scheme } => decide(graph, scheme, common),
        Command::PolReport { lang, n, bound } => pol_report(lang, n, *bound, common),
        Command::Fooling(a) => fooling(a, false, common),
        Command::OddFooling(a) => fooling(a, true, common),
        Command::BipartiteExtract { scheme, blocks, r, max_blocks } => {
            bipartite_extract(scheme, *blocks, *r, max_blocks.unwrap_or(*blocks), common)
        }
        Command::CcSim { function, n, t } => cc_sim(function, *n, *t, common),
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn out(common: &Common) -> Option<&Path> {
    common.out.as_deref()
}

/// Parses `a..b` (exclusive), `a..=b`, `a,b,c` or a single number.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    let num = |s: &str| s.trim().parse::<usize>().with_context(|| format!("bad size {s:?} in {spec:?}"));
    if let Some((a, b)) = spec.split_once("..=") {
        return Ok((num(a)?..=num(b)?).collect());
    }
    if let Some((a, b)) = spec.split_once("..") {
        return Ok((num(a)?..num(b)?).collect());
    }
    spec.split(',').map(num).collect()
}

fn load_graph(path: &Path) -> Result<Graph> {
    Graph::load(path).with_context(|| format!("reading graph {}", path.display()))
}

fn params_for<'a>(graphs: impl IntoIterator<Item = &'a Graph>, args: &SchemeArgs) -> SchemeParams {
    let mut p = SchemeParams { id_bound: 1, weight_bound: 1 };
    for g in graphs {
        let q = SchemeParams::for_graph(g);
        p.id_bound = p.id_bound.max(q.id_bound);
        p.weight_bound = p.weight_bound.max(q.weight_bound);
    }
    SchemeParams { id_bound: args.id_bound.unwrap_or(p.id_bound), weight_bound: args.weight_bound.unwrap_or(p.weight_bound) }
}

fn scheme_for<'a>(graphs: impl IntoIterator<Item = &'a Graph>, args: &SchemeArgs) -> Result<Box<dyn Scheme>> {
    Ok(build_scheme(&args.scheme, &params_for(graphs, args))?)
}

fn budget(scheme: &dyn Scheme, g: &Graph, common: &Common) -> Budget {
    let declared = Budget::declared(scheme, g);
    Budget {
        local_widths: (0, common.budget_local_bits.unwrap_or(declared.local_widths.1)),
        global_lens: (0, common.budget_global_bits.unwrap_or(declared.global_lens.1)),
    }
}

#[derive(Serialize)]
struct DecisionRow {
    node: u64,
    accept: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    scheme: String,
    accepted: bool,
    decisions: Vec<DecisionRow>,
}

fn verify(graph: &Path, proof: &Path, args: &SchemeArgs, rule: Rule, common: &Common) -> Result<Status> {
    let g = load_graph(graph)?;
    let text = fs::read_to_string(proof).with_context(|| format!("reading proof {}", proof.display()))?;
    let p = Proof::from_json(&text).with_context(|| format!("parsing proof {}", proof.display()))?;
    let scheme = scheme_for([&g], args)?;
    let rule = match rule {
        Rule::Strict => ViewRule::Strict,
        Rule::Inclusive => ViewRule::Inclusive,
    };
    let outcome = run_with_rule(scheme.as_ref(), &g, &p, rule)?;
    let rows: Vec<DecisionRow> = outcome.decisions.iter().map(|&(id, accept)| DecisionRow { node: id.0, accept }).collect();
    match common.format {
        Some(f) => {
            let full = VerifyReport { scheme: scheme.name(), accepted: outcome.accepted, decisions: rows };
            report(f, out(common), &full.decisions, &full)?;
        }
        None => {
            let mut text = String::new();
            for r in &rows {
                text += &format!("node {}: {}\n", r.node, verdict(r.accept));
            }
            text += &format!("overall: {}\n", verdict(outcome.accepted));
            emit(out(common), &text)?;
        }
    }
    Ok(status(outcome.accepted))
}

fn verdict(accept: bool) -> &'static str {
    if accept {
        "accept"
    } else {
        "reject"
    }
}

fn prove(graph: &Path, args: &SchemeArgs, common: &Common) -> Result<Status> {
    let g = load_graph(graph)?;
    let scheme = scheme_for([&g], args)?;
    match scheme.prove(&g) {
        Ok(p) => {
            emit(out(common), &(p.to_json() + "\n"))?;
            Ok(Status::Pass)
        }
        Err(e) => {
            eprintln!("{}: {e}", scheme.name());
            Ok(Status::Fail)
        }
    }
}

fn corpus(args: &CorpusArgs, seed: u64) -> Result<(Vec<Graph>, Vec<usize>)> {
    let family: Family = args.family.parse().map_err(anyhow::Error::msg)?;
    let sizes = parse_sizes(&args.n)?;
    let inputs = match args.inputs {
        InputsArg::Plain => Inputs::Plain,
        InputsArg::Selections => Inputs::Selections,
        InputsArg::EdgeMarks => Inputs::EdgeMarks,
        InputsArg::Weighted => Inputs::Weighted { count: args.count },
    };
    let mut graphs = Vec::new();
    for &n in &sizes {
        graphs.extend(Corpus::new(family, n, n, inputs).seed(seed.wrapping_add(n as u64)).generate());
    }
    Ok((graphs, sizes))
}

#[derive(Serialize)]
struct CompletenessRow {
    scheme: String,
    family: String,
    sizes: String,
    instances: usize,
    yes_instances: usize,
    failures: usize,
    pass: bool,
}

fn completeness(args: &SchemeArgs, corpus_args: &CorpusArgs, common: &Common) -> Result<Status> {
    let (graphs, _) = corpus(corpus_args, common.seed)?;
    let scheme = scheme_for(&graphs, args)?;
    let rep = locver::harness::completeness(scheme.as_ref(), &graphs)?;
    let row = CompletenessRow {
        scheme: rep.scheme.clone(),
        family: corpus_args.family.clone(),
        sizes: corpus_args.n.clone(),
        instances: graphs.len(),
        yes_instances: rep.yes_instances,
        failures: rep.failures.len(),
        pass: rep.pass,
    };
    report(common.format.unwrap_or(Format::Csv), out(common), &[row], &rep)?;
    Ok(status(rep.pass))
}

#[derive(Serialize)]
struct SoundnessRow {
    instance: usize,
    nodes: usize,
    edges: usize,
    mode: String,
    space: String,
    outcome: String,
}

fn soundness(args: &SchemeArgs, corpus_args: &CorpusArgs, samples: Option<u64>, common: &Common) -> Result<Status> {
    let (graphs, _) = corpus(corpus_args, common.seed)?;
    let scheme = scheme_for(&graphs, args)?;
    let opts = SearchOptions { sampling: samples.map(|s| (s, common.seed)), ..SearchOptions::default() };
    let s = scheme.as_ref();
    let reports = soundness_corpus(s, &graphs, |g| budget(s, g, common), &opts)?;
    let rows: Vec<SoundnessRow> = reports
        .iter()
        .enumerate()
        .map(|(i, r)| SoundnessRow {
            instance: i,
            nodes: r.instance.nodes.len(),
            edges: r.instance.edges.len(),
            mode: r.mode.to_string(),
            space: r.space.to_string(),
            outcome: if r.is_safe() { "safe" } else { "counterexample" }.into(),
        })
        .collect();
    report(common.format.unwrap_or(Format::Csv), out(common), &rows, &reports)?;
    Ok(status(reports.iter().all(|r| r.is_safe())))
}

#[derive(Serialize)]
struct DecideReport {
    scheme: String,
    exists: bool,
    mode: String,
    space: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<locver::proof::ProofFile>,
}

fn decide(graph: &Path, args: &SchemeArgs, common: &Common) -> Result<Status> {
    let g = load_graph(graph)?;
    let scheme = scheme_for([&g], args)?;
    let found = search(scheme.as_ref(), &g, &budget(scheme.as_ref(), &g, common), &SearchOptions::default())?;
    let rep = DecideReport {
        scheme: scheme.name(),
        exists: found.witness.is_some(),
        mode: found.mode.to_string(),
        space: found.space.to_string(),
        witness: found.witness.as_ref().map(Proof::to_file),
    };
    match common.format {
        Some(Format::Json) => emit(out(common), &json_text(&rep)?)?,
        Some(Format::Csv) => report(Format::Csv, out(common), &[(&rep.scheme, rep.exists, &rep.mode, &rep.space)], &rep)?,
        None => emit(out(common), &format!("{} ({} search over {} certificates)\n", verdict(rep.exists), rep.mode, rep.space))?,
    }
    Ok(status(rep.exists))
}

fn pol_report(lang: &str, n: &str, bound: BoundArg, common: &Common) -> Result<Status> {
    let lang: StdLanguage = lang.parse()?;
    let sizes = parse_sizes(n)?;
    let rows = match bound {
        BoundArg::Pow2 => locver::harness::size_report(lang, &sizes, power_of_two_bound),
        BoundArg::Max => locver::harness::size_report(lang, &sizes, |n| n as u64),
    };
    match rows {
        Ok(rows) => {
            report(common.format.unwrap_or(Format::Csv), out(common), &rows, &rows)?;
            Ok(Status::Pass)
        }
        Err(e @ locver::harness::SizeError::Chain { .. }) => {
            eprintln!("{e}");
            Ok(Status::Fail)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct AttackRow {
    scheme: String,
    variant: String,
    b: usize,
    r: usize,
    f: usize,
    g: usize,
    permutations: usize,
    accepted_instances: usize,
    outcome: String,
    spliced_cycle: String,
}

fn fooling(a: &AttackArgs, odd: bool, common: &Common) -> Result<Status> {
    let id_bound = ((a.b + 1) * (2 * a.r + 1)) as u64;
    let scheme = build_scheme(&a.scheme, &SchemeParams { id_bound, weight_bound: 1 })?;
    let cfg = AttackConfig {
        harvest: match a.harvest {
            HarvestArg::Exhaustive => Harvest::Exhaustive,
            HarvestArg::Honest => Harvest::Honest,
        },
        samples: a.samples,
        seed: common.seed,
        ..AttackConfig::new(a.b, a.r, a.f, a.g)
    };
    let rep = if odd { odd_cycle_attack(scheme.as_ref(), &cfg)? } else { fooling_attack(scheme.as_ref(), &cfg)? };
    let row = AttackRow {
        scheme: rep.scheme.clone(),
        variant: rep.variant.to_string(),
        b: a.b,
        r: a.r,
        f: a.f,
        g: a.g,
        permutations: rep.permutations,
        accepted_instances: rep.accepted_instances,
        outcome: if rep.found() { "counterexample" } else { "not_found" }.into(),
        spliced_cycle: rep
            .counterexample
            .as_ref()
            .map(|c| c.spliced_cycle.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
            .unwrap_or_default(),
    };
    report(common.format.unwrap_or(Format::Json), out(common), &[row], &rep)?;
    Ok(status(!rep.found()))
}

#[derive(Serialize)]
struct ExtractRow {
    certificate: usize,
    source: &'static str,
    arcs: usize,
    accepted_cycles: usize,
    no_odd_directed_cycle: bool,
    strongly_connected: bool,
    colors_accepted_cycles: bool,
}

#[derive(Serialize)]
struct ExtractReport<'a> {
    scheme: String,
    blocks: usize,
    r: usize,
    max_blocks: usize,
    certificates: &'a [ExtractRow],
    table_rows: usize,
    columns_distinct: bool,
}

fn bipartite_extract(name: &str, m: usize, r: usize, max_blocks: usize, common: &Common) -> Result<Status> {
    if m < 3 {
        bail!("need at least 3 blocks, got {m}");
    }
    let blocks = make_blocks(m - 1, r)?;
    let id_bound = (m * (2 * r + 1)) as u64;
    let scheme: Box<dyn Scheme> = match name {
        "bip-table" => Box::new(BipTable::new(id_bound)),
        "bip-local" => Box::new(LocalToGlobal::new(Arc::new(BipLocal), id_bound, 1)),
        other => {
            let s = build_scheme(other, &SchemeParams { id_bound, weight_bound: 1 })?;
            if s.regime() != Regime::Global {
                bail!("{other} is not a global scheme");
            }
            s
        }
    };
    let mut certs: Vec<(&'static str, Bits)> =
        honest_certificates(scheme.as_ref(), &blocks, max_blocks)?.into_iter().map(|c| ("honest", c)).collect();
    let probe_len = if m.is_multiple_of(2) { m } else { m - 1 };
    let probe: Vec<Bits> = balanced_probe(scheme.as_ref(), &blocks, probe_len)?.into_iter().map(|(_, c)| c).collect();
    certs.extend(probe.iter().cloned().map(|c| ("probe", c)));
    let bank = CycleBank::new(scheme.as_ref(), &blocks, max_blocks)?;
    let rows: Vec<ExtractRow> = certs
        .iter()
        .enumerate()
        .map(|(i, (source, c))| {
            let gc = bank.gc(c);
            let a = analyze_gc(&gc);
            let colors = a.coloring.as_ref().is_some_and(|f| gc.accepted.iter().all(|cyc| colors_cycle(f, cyc)));
            ExtractRow {
                certificate: i,
                source,
                arcs: gc.arcs.len(),
                accepted_cycles: gc.accepted.len(),
                no_odd_directed_cycle: a.no_odd_directed_cycle,
                strongly_connected: a.components_strongly_connected,
                colors_accepted_cycles: colors,
            }
        })
        .collect();
    let table = coloring_table(scheme.as_ref(), &probe, &blocks, max_blocks)?;
    let full = ExtractReport {
        scheme: scheme.name(),
        blocks: m,
        r,
        max_blocks,
        certificates: &rows,
        table_rows: table.rows.len(),
        columns_distinct: table.columns_distinct(),
    };
    report(common.format.unwrap_or(Format::Csv), out(common), &rows, &full)?;
    let ok = rows.iter().all(|r| r.no_odd_directed_cycle && r.strongly_connected && r.colors_accepted_cycles);
    Ok(status(ok && full.columns_distinct))
}

#[derive(Serialize)]
struct CcRow {
    x: String,
    y: String,
    f: bool,
    protocol: bool,
    compiled: bool,
    extracted: Option<bool>,
    agree: bool,
}

fn cc_sim(function: &str, n: usize, t: usize, common: &Common) -> Result<Status> {
    let f: BoolFunction = function.parse()?;
    let zeros = vec![false; n];
    let bound = build_lf(n, t, &zeros, &zeros)?.graph.id_bound();
    let protocol = f.protocol(n);
    let compiled = Arc::new(compile_protocol(protocol.clone(), f, bound)?);
    let extracted = if t >= 2 {
        let width = compiled.layout().width();
        Some(extract_protocol(Arc::new(LocalToGlobal::new(compiled.clone(), bound, width)), n, t)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for x in all_vectors(n) {
        for y in all_vectors(n) {
            let g = build_lf(n, t, &x, &y)?.graph;
            let truth = f.eval(&x, &y);
            let p = ccbridge::decide(protocol.as_ref(), &x, &y)?;
            let c = decide_nondet(compiled.as_ref(), &g, &Budget::declared(compiled.as_ref(), &g), &SearchOptions::default())?;
            let e = extracted.as_ref().map(|ep| ccbridge::decide(ep, &x, &y)).transpose()?;
            let agree = p == truth && c == truth && e.is_none_or(|e| e == truth);
            rows.push(CcRow { x: bitstring(&x), y: bitstring(&y), f: truth, protocol: p, compiled: c, extracted: e, agree });
        }
    }
    report(common.format.unwrap_or(Format::Csv), out(common), &rows, &rows)?;
    Ok(status(rows.iter().all(|r| r.agree)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(parse_sizes("4..7").unwrap(), vec![4, 5, 6]);
        assert_eq!(parse_sizes("4..=6").unwrap(), vec![4, 5, 6]);
        assert_eq!(parse_sizes("4,8,16").unwrap(), vec![4, 8, 16]);
        assert_eq!(parse_sizes("5").unwrap(), vec![5]);
        assert!(parse_sizes("a..3").is_err());
    }
}
