use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, ensure, Context, Result};
use bangl::distrib::{load_dataset, load_triples, run_task, Aggregation, EmbeddingStore, ModelKind};
use bangl::fock::DeltaKind;
use bangl::logic::{parse_formula, Lexicon, Sequent};
use bangl::prover::{prove as search, Derivation, SearchConfig};
use bangl::semantics::{
    compile as compile_term, evaluate, interpret_formula, SpaceAssignment, Term, Truncation, WordTensorStore,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::input::{self, is_sequent};
use crate::{LexiconArgs, Outcome, Output, SearchArgs, SpaceArgs};

fn search_config(a: &SearchArgs) -> Result<SearchConfig> {
    ensure!(
        a.timeout.is_finite() && a.timeout > 0.0,
        "--timeout must be a positive number of seconds"
    );
    Ok(SearchConfig {
        max_depth: a.max_depth,
        contraction_budget: a.contraction_budget,
        max_solutions: a.max_solutions,
        timeout: Duration::from_secs_f64(a.timeout),
    })
}

fn space(a: &SpaceArgs, delta: Option<DeltaKind>) -> Result<SpaceAssignment> {
    let dims: Vec<usize> = a
        .dims
        .split(',')
        .map(|d| d.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .context("--dims expects two integers like `2,2`")?;
    let [n, s] = dims[..] else {
        bail!("--dims expects two integers like `2,2`");
    };
    let mut sa = SpaceAssignment::new(n, s);
    sa.fulldual_cap = a.fulldual_cap;
    sa.fock_truncation = match a.truncation.as_deref() {
        None if delta == Some(DeltaKind::FullDual) => Truncation::Full,
        None => Truncation::Layer(1),
        Some("full") => Truncation::Full,
        Some(t) => match t.strip_prefix("layer:").map(str::parse::<usize>) {
            Some(Ok(l)) => Truncation::Layer(l),
            _ => bail!("--truncation expects `layer:L` or `full`, got `{t}`"),
        },
    };
    sa.validate()?;
    Ok(sa)
}

/// Derivations of the first typing that has any, with that typing.
fn find(
    text: &str,
    cfg: &SearchConfig,
    lex: &LexiconArgs,
) -> Result<(Option<Vec<String>>, Sequent, Vec<Derivation>)> {
    let input = input::read(text, lex)?;
    for s in &input.typings {
        let found = search(s, cfg)?;
        if !found.is_empty() {
            return Ok((input.words, s.clone(), found));
        }
    }
    let first = input.typings.into_iter().next().context("phrase has no typing")?;
    Ok((input.words, first, Vec::new()))
}

fn pick(found: &[Derivation], reading: usize) -> Result<&Derivation> {
    ensure!(reading >= 1, "--reading counts from 1");
    found.get(reading - 1).with_context(|| {
        format!(
            "only {} derivations found, --reading {reading} requested",
            found.len()
        )
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn no_proof(sequent: &Sequent, out: Output) -> Result<Outcome> {
    if out == Output::Json {
        println!("{}", json!({ "sequent": sequent.to_string(), "derivations": [] }));
    }
    eprintln!("no proof within bounds: {sequent}");
    Ok(Outcome::NoProof)
}

pub fn parse(text: &str, phrase: bool, lex: &LexiconArgs, out: Output) -> Result<Outcome> {
    if is_sequent(text) || phrase || lex.lexicon.is_some() {
        let input = input::read(text, lex)?;
        match out {
            Output::Json => println!(
                "{}",
                serde_json::to_string(&json!({ "sequents": input.typings }))?
            ),
            Output::Text | Output::Csv => {
                for s in &input.typings {
                    println!("{s}");
                }
            }
        }
    } else {
        let f = parse_formula(text).context("parsing formula")?;
        match out {
            Output::Json => println!("{}", serde_json::to_string(&json!({ "formula": f }))?),
            Output::Text | Output::Csv => println!("{f}"),
        }
    }
    Ok(Outcome::Found)
}

pub fn prove(text: &str, all: bool, sa: &SearchArgs, lex: &LexiconArgs, out: Output) -> Result<Outcome> {
    let cfg = search_config(sa)?;
    let (_, sequent, mut found) = find(text, &cfg, lex)?;
    if found.is_empty() {
        return no_proof(&sequent, out);
    }
    if !all {
        found.truncate(1);
    }
    match out {
        Output::Text => {
            let mut s = format!("sequent: {sequent}\n");
            for (i, d) in found.iter().enumerate() {
                writeln!(
                    s,
                    "derivation {}: contractions={} size={} height={}",
                    i + 1,
                    d.contractions(),
                    d.size(),
                    d.height()
                )?;
                s.push_str(&d.to_text());
            }
            print!("{s}");
        }
        Output::Json => {
            let ds: Vec<_> = found
                .iter()
                .map(|d| json!({ "contractions": d.contractions(), "text": d.to_text(), "tree": d }))
                .collect();
            println!("{}", json!({ "sequent": sequent.to_string(), "derivations": ds }));
        }
        Output::Csv => {
            let mut s = String::from("index,contractions,size,height\n");
            for (i, d) in found.iter().enumerate() {
                writeln!(s, "{},{},{},{}", i + 1, d.contractions(), d.size(), d.height())?;
            }
            print!("{s}");
        }
    }
    Ok(Outcome::Found)
}

fn shapes(t: &[bangl::semantics::Shape]) -> Vec<String> {
    t.iter().map(ToString::to_string).collect()
}

pub fn compile(
    text: &str,
    reading: usize,
    sa: &SearchArgs,
    space_args: &SpaceArgs,
    lex: &LexiconArgs,
    out: Output,
) -> Result<Outcome> {
    let cfg = search_config(sa)?;
    let space = space(space_args, None)?;
    let (_, sequent, found) = find(text, &cfg, lex)?;
    if found.is_empty() {
        return no_proof(&sequent, out);
    }
    let d = pick(&found, reading)?;
    let term = compile_term(d, &space)?;
    let st = term.stats();
    match out {
        Output::Text => {
            println!("sequent: {sequent}");
            println!("contractions: {}", d.contractions());
            println!("inputs: {}", shapes(&term.inputs()).join(" | "));
            println!("outputs: {}", shapes(&term.outputs()).join(" | "));
            println!(
                "nodes: cups={} deltas={} eps={} swaps={} incls={} caps={}",
                st.cups, st.deltas, st.eps, st.swaps, st.incls, st.caps
            );
            println!("term: {term}");
        }
        Output::Json => println!(
            "{}",
            json!({
                "sequent": sequent.to_string(),
                "contractions": d.contractions(),
                "inputs": shapes(&term.inputs()),
                "outputs": shapes(&term.outputs()),
                "stats": st,
                "term": term,
            })
        ),
        Output::Csv => {
            println!("sequent,contractions,cups,deltas,eps,swaps,incls,caps");
            println!(
                "{},{},{},{},{},{},{},{}",
                csv_field(&sequent.to_string()),
                d.contractions(),
                st.cups,
                st.deltas,
                st.eps,
                st.swaps,
                st.incls,
                st.caps
            );
        }
    }
    Ok(Outcome::Found)
}

pub struct EvalOptions<'a> {
    pub delta: &'a str,
    pub tensors: Option<&'a Path>,
    pub seed: u64,
    pub projections: &'a [String],
    pub reading: usize,
}

pub fn eval(
    phrase: &str,
    opts: &EvalOptions,
    sa: &SearchArgs,
    space_args: &SpaceArgs,
    lex_args: &LexiconArgs,
    out: Output,
) -> Result<Outcome> {
    ensure!(!is_sequent(phrase), "eval takes a phrase, not a sequent");
    let kind: DeltaKind = opts.delta.parse()?;
    let space = space(space_args, Some(kind))?;
    let cfg = search_config(sa)?;
    let lex = input::lexicon(lex_args)?;

    let mut store = match opts.tensors {
        Some(p) => {
            WordTensorStore::load(p, space).with_context(|| format!("loading tensors {}", p.display()))?
        }
        None => WordTensorStore::new(space),
    };
    for word in opts.projections {
        let typings = lex.lookup(word)?;
        let mut any = false;
        for f in typings {
            if store.insert_projection(word, f.clone()).is_ok() {
                any = true;
            }
        }
        ensure!(any, "--projection {word}: no typing of the form (!X)\\X");
    }

    let (words, sequent, found) = find(phrase, &cfg, lex_args)?;
    if found.is_empty() {
        return no_proof(&sequent, out);
    }
    let words = words.expect("phrase input has words");
    // only the typings in use: others may not fit the space
    let mut used = Lexicon::new(lex.atoms().clone());
    for (w, f) in words.iter().zip(&sequent.antecedent) {
        used.insert(w, f.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    store.fill_random(&used, &mut rng)?;
    let d = pick(&found, opts.reading)?;
    let term: Term = compile_term(d, &space)?;
    let inputs = store.inputs(&words, &sequent)?;
    let values = evaluate(&term, &inputs, kind, space.fulldual_cap)?;
    let shape = interpret_formula(&sequent.goal, &space)?;
    match out {
        Output::Text => {
            println!("sequent: {sequent}");
            println!("contractions: {}", d.contractions());
            println!("delta: {kind}");
            println!("shape: {shape} ({} components)", values.len());
            let vs: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            println!("values: {}", vs.join(" "));
        }
        Output::Json => println!(
            "{}",
            json!({
                "sequent": sequent.to_string(),
                "contractions": d.contractions(),
                "delta": kind.to_string(),
                "shape": shape.to_string(),
                "values": values,
            })
        ),
        Output::Csv => {
            let mut s = String::from("index,value\n");
            for (i, v) in values.iter().enumerate() {
                writeln!(s, "{i},{v}")?;
            }
            print!("{s}");
        }
    }
    Ok(Outcome::Found)
}

fn models(names: &[String], k: f64) -> Result<Vec<ModelKind>> {
    let with_k = |m: ModelKind| match m {
        ModelKind::KExt(_) => ModelKind::KExt(k),
        other => other,
    };
    if names.is_empty() {
        return Ok(ModelKind::all().into_iter().map(with_k).collect());
    }
    names
        .iter()
        .map(|n| {
            let m: ModelKind = n.trim().parse()?;
            // an explicit `k-extension:K` keeps its own weight
            Ok(if n.contains(':') { m } else { with_k(m) })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn experiment(
    embeddings: &Path,
    dataset: &Path,
    triples: &Path,
    model_names: &[String],
    k: f64,
    aggregation: Aggregation,
    csv_out: Option<&Path>,
    out: Output,
) -> Result<Outcome> {
    let kinds = models(model_names, k)?;
    let emb =
        EmbeddingStore::load_word2vec(embeddings).with_context(|| format!("{}", embeddings.display()))?;
    let entries = load_dataset(dataset).with_context(|| format!("{}", dataset.display()))?;
    let triples = load_triples(triples).with_context(|| format!("{}", triples.display()))?;
    let report = run_task(&entries, &emb, &triples, &kinds, aggregation)?;
    if let Some(p) = csv_out {
        fs::write(p, report.to_csv()).with_context(|| format!("writing {}", p.display()))?;
    }
    match out {
        Output::Text => print!("{}", report.to_table()),
        Output::Json => println!("{}", serde_json::to_string(&report)?),
        Output::Csv => print!("{}", report.to_csv()),
    }
    Ok(Outcome::Found)
}
