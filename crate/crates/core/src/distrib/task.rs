use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::compose::{compose_ellipsis, relational_verb, ModelKind, Sentence, VerbMatrix};
use super::embeddings::EmbeddingStore;
use super::stats::{cosine, spearman_rho};
use super::DistribError;

pub const DATASET_HEADER: [&str; 6] = [
    "subject1",
    "verb",
    "object",
    "subject2",
    "candidate_verb",
    "score",
];

/// One rated pair: `subject1 verb object and subject2 does too` against the
/// same sentence with `candidate` in place of `verb`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskEntry {
    pub subject1: String,
    pub verb: String,
    pub object: String,
    pub subject2: String,
    pub candidate: String,
    pub score: f64,
    /// 1-based line in the source file.
    pub line: usize,
}

/// A `(verb, subject, object)` occurrence used to build verb matrices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub verb: String,
    pub subject: String,
    pub object: String,
}

fn read(path: &Path) -> Result<String, DistribError> {
    fs::read_to_string(path).map_err(|source| DistribError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_dataset(text: &str) -> Result<Vec<TaskEntry>, DistribError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .map(|(_, l)| l.split('\t').map(str::trim).collect())
        .unwrap_or_default();
    if header != DATASET_HEADER {
        return Err(DistribError::Header {
            expected: DATASET_HEADER.join("\t"),
        });
    }
    lines
        .map(|(i, l)| {
            let cols: Vec<&str> = l.trim_end_matches('\r').split('\t').map(str::trim).collect();
            let [s1, v, o, s2, c, score] = cols.as_slice() else {
                return Err(DistribError::Malformed { line: i + 1 });
            };
            Ok(TaskEntry {
                subject1: s1.to_string(),
                verb: v.to_string(),
                object: o.to_string(),
                subject2: s2.to_string(),
                candidate: c.to_string(),
                score: score
                    .parse()
                    .map_err(|_| DistribError::Malformed { line: i + 1 })?,
                line: i + 1,
            })
        })
        .collect()
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<TaskEntry>, DistribError> {
    parse_dataset(&read(path.as_ref())?)
}

/// `verb<TAB>subject<TAB>object` lines; an optional header line is skipped.
pub fn parse_triples(text: &str) -> Result<Vec<Triple>, DistribError> {
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let l = l.trim_end_matches('\r');
        if l.trim().is_empty() || l.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = l.split('\t').map(str::trim).collect();
        let [verb, subject, object] = cols.as_slice() else {
            return Err(DistribError::Malformed { line: i + 1 });
        };
        if out.is_empty() && cols == ["verb", "subject", "object"] {
            continue;
        }
        out.push(Triple {
            verb: verb.to_string(),
            subject: subject.to_string(),
            object: object.to_string(),
        });
    }
    Ok(out)
}

pub fn load_triples(path: impl AsRef<Path>) -> Result<Vec<Triple>, DistribError> {
    parse_triples(&read(path.as_ref())?)
}

/// How entries enter the correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Aggregation {
    /// One point per dataset line.
    #[default]
    PerEntry,
    /// One point per distinct sentence pair, human scores averaged.
    Averaged,
}

/// Embeddings plus the verb matrices the dataset needs.
pub struct Task<'a> {
    emb: &'a EmbeddingStore,
    verbs: BTreeMap<String, Option<VerbMatrix>>,
}

impl<'a> Task<'a> {
    /// Builds a relational matrix for every verb or candidate of `entries`
    /// from the triples whose subject and object have vectors.
    pub fn new(emb: &'a EmbeddingStore, entries: &[TaskEntry], triples: &[Triple]) -> Self {
        let mut names: Vec<&str> = entries
            .iter()
            .flat_map(|e| [e.verb.as_str(), e.candidate.as_str()])
            .collect();
        names.sort_unstable();
        names.dedup();
        let verbs = names
            .par_iter()
            .map(|&v| {
                let pairs = triples
                    .iter()
                    .filter(|t| t.verb == v)
                    .filter_map(|t| Some((emb.get(&t.subject)?, emb.get(&t.object)?)));
                (v.to_string(), relational_verb(pairs).ok())
            })
            .collect();
        Task { emb, verbs }
    }

    pub fn verb_matrix(&self, verb: &str) -> Option<&VerbMatrix> {
        self.verbs.get(verb).and_then(Option::as_ref)
    }

    /// The ambiguous and the candidate sentence vectors under `kind`, or why
    /// the entry cannot be scored.
    pub fn sentences(&self, e: &TaskEntry, kind: ModelKind) -> Result<(Vec<f64>, Vec<f64>), String> {
        let word = |w: &str| self.emb.get(w).ok_or_else(|| format!("no vector for `{w}`"));
        let (sub1, obj, sub2) = (word(&e.subject1)?, word(&e.object)?, word(&e.subject2)?);
        let mut out = Vec::with_capacity(2);
        for v in [&e.verb, &e.candidate] {
            let verb = if kind.needs_matrix() {
                let m = self.verb_matrix(v);
                Some(m.ok_or_else(|| format!("no usable triples for verb `{v}`"))?)
            } else {
                None
            };
            let s = Sentence {
                verb,
                verb_vector: word(v)?,
                sub1,
                obj,
                sub2,
            };
            out.push(compose_ellipsis(kind, &s).map_err(|err| err.to_string())?);
        }
        let cand = out.pop().unwrap();
        Ok((out.pop().unwrap(), cand))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub model: String,
    pub rho: f64,
    pub n_entries: usize,
    pub n_skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub skipped: Vec<Skipped>,
    pub aggregation: Aggregation,
}

impl Report {
    pub fn row(&self, model: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.model == model)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("model,rho,n_entries,n_skipped\n");
        for r in &self.rows {
            writeln!(s, "{},{:.6},{},{}", r.model, r.rho, r.n_entries, r.n_skipped).unwrap();
        }
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = format!("{:<14}{:>8}{:>10}{:>10}\n", "model", "rho", "entries", "skipped");
        for r in &self.rows {
            writeln!(
                s,
                "{:<14}{:>8.3}{:>10}{:>10}",
                r.model, r.rho, r.n_entries, r.n_skipped
            )
            .unwrap();
        }
        for k in &self.skipped {
            writeln!(s, "skipped line {}: {}", k.line, k.reason).unwrap();
        }
        s
    }
}

/// Scores every entry under every model, then correlates with the human
/// scores. An entry unusable under any requested model is skipped for all,
/// so every row covers the same entries.
pub fn run_task(
    entries: &[TaskEntry],
    emb: &EmbeddingStore,
    triples: &[Triple],
    kinds: &[ModelKind],
    aggregation: Aggregation,
) -> Result<Report, DistribError> {
    let task = Task::new(emb, entries, triples);
    let scored: Vec<Result<Vec<f64>, String>> = entries
        .par_iter()
        .map(|e| {
            kinds
                .iter()
                .map(|&k| {
                    let (a, b) = task.sentences(e, k)?;
                    cosine(&a, &b).map_err(|err| format!("{k}: {err}"))
                })
                .collect()
        })
        .collect();
    let mut used: Vec<(&TaskEntry, Vec<f64>)> = Vec::new();
    let mut skipped = Vec::new();
    for (e, r) in entries.iter().zip(scored) {
        match r {
            Ok(s) => used.push((e, s)),
            Err(reason) => skipped.push(Skipped { line: e.line, reason }),
        }
    }
    if used.len() < 2 {
        return Err(DistribError::EmptyDataset {
            usable: used.len(),
            skipped: skipped.len(),
        });
    }
    let points = match aggregation {
        Aggregation::PerEntry => used.into_iter().map(|(e, s)| (e.score, s)).collect::<Vec<_>>(),
        Aggregation::Averaged => average_pairs(used),
    };
    let human: Vec<f64> = points.iter().map(|p| p.0).collect();
    let rows = kinds
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let model: Vec<f64> = points.iter().map(|p| p.1[i]).collect();
            Ok(ReportRow {
                model: k.to_string(),
                rho: spearman_rho(&model, &human)?,
                n_entries: points.len(),
                n_skipped: skipped.len(),
            })
        })
        .collect::<Result<_, DistribError>>()?;
    Ok(Report {
        rows,
        skipped,
        aggregation,
    })
}

/// Sentence pair, summed human score, entry count, model scores.
type Group<'a> = (
    (&'a str, &'a str, &'a str, &'a str, &'a str),
    f64,
    usize,
    Vec<f64>,
);

fn average_pairs(used: Vec<(&TaskEntry, Vec<f64>)>) -> Vec<(f64, Vec<f64>)> {
    let mut groups: Vec<Group> = Vec::new();
    for (e, s) in used {
        let key = (
            e.subject1.as_str(),
            e.verb.as_str(),
            e.object.as_str(),
            e.subject2.as_str(),
            e.candidate.as_str(),
        );
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => {
                g.1 += e.score;
                g.2 += 1;
            }
            None => groups.push((key, e.score, 1, s)),
        }
    }
    groups
        .into_iter()
        .map(|(_, total, n, s)| (total / n as f64, s))
        .collect()
}
