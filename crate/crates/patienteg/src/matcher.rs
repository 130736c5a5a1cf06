//! Entity linking against a terminology knowledge graph: three string
//! similarities averaged into one score, per-kind candidate selection,
//! score-stratified verification sampling, threshold selection by
//! balanced accuracy, and link-triple emission.
//!
//! All similarities operate on Unicode code points, since labels are
//! mostly Chinese.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use crate::model::{EntityKind, Iri, MedicalEntity, Triple};
use crate::ntriples::{self, NtriplesError};
use crate::vocab;

#[derive(Debug, Error)]
pub enum MatcherError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Ntriples(#[from] NtriplesError),
    #[error("terminology graph: {0}")]
    KgFormat(String),
    #[error("labels file: {0}")]
    LabelFormat(String),
    #[error("labels for {kind} contain no {missing} examples; threshold selection needs both")]
    DegenerateLabels { kind: String, missing: &'static str },
}

/// One terminology-graph entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermEntry {
    pub kg_id: String,
    pub kind: EntityKind,
    pub label: String,
}

/// A dataset entity paired with its best terminology candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchCandidate {
    pub m: MedicalEntity,
    pub entry: TermEntry,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPair {
    pub candidate: MatchCandidate,
    pub correct: bool,
}

/// Per-kind outcome row: chosen threshold, its balanced accuracy, and the
/// fraction of dataset entities that got linked.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub kind: EntityKind,
    pub threshold: f64,
    pub metric: f64,
    pub link_rate: f64,
}

fn chars(s: &str) -> Vec<char> {
    s.chars().collect()
}

fn edit_distance(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn lcs_len(a: &[char], b: &[char]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for ca in a {
        for (j, cb) in b.iter().enumerate() {
            cur[j + 1] = if ca == cb { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Levenshtein similarity: 1 − distance / max length.
pub fn lev_sim(a: &str, b: &str) -> f64 {
    let (a, b) = (chars(a), chars(b));
    let max = a.len().max(b.len());
    if max == 0 {
        return 1.0;
    }
    1.0 - edit_distance(&a, &b) as f64 / max as f64
}

/// Character grams: bigrams, or unigrams for strings shorter than two.
fn gram_set(s: &[char]) -> BTreeSet<Vec<char>> {
    if s.len() >= 2 {
        s.windows(2).map(|w| w.to_vec()).collect()
    } else {
        s.iter().map(|c| vec![*c]).collect()
    }
}

/// Jaccard similarity of the two gram sets.
pub fn jaccard_sim(a: &str, b: &str) -> f64 {
    let (ga, gb) = (gram_set(&chars(a)), gram_set(&chars(b)));
    if ga.is_empty() && gb.is_empty() {
        return 1.0;
    }
    let intersection = ga.intersection(&gb).count();
    let union = ga.union(&gb).count();
    intersection as f64 / union as f64
}

/// Longest-common-subsequence similarity: LCS length / max length.
pub fn lcs_sim(a: &str, b: &str) -> f64 {
    let (a, b) = (chars(a), chars(b));
    let max = a.len().max(b.len());
    if max == 0 {
        return 1.0;
    }
    lcs_len(&a, &b) as f64 / max as f64
}

/// The matchability score: arithmetic mean of the three similarities.
pub fn score(m: &str, e: &str) -> f64 {
    (lev_sim(m, e) + jaccard_sim(m, e) + lcs_sim(m, e)) / 3.0
}

/// Highest-scoring same-kind terminology entry; ties go to the smallest
/// kg id. None when the graph has no entry of the entity's kind.
pub fn best_candidate(m: &MedicalEntity, kg: &[TermEntry]) -> Option<MatchCandidate> {
    let mut best: Option<(f64, &TermEntry)> = None;
    for entry in kg.iter().filter(|e| e.kind == m.kind) {
        let s = score(&m.label, &entry.label);
        let better = match best {
            None => true,
            Some((bs, be)) => s > bs || (s == bs && entry.kg_id < be.kg_id),
        };
        if better {
            best = Some((s, entry));
        }
    }
    best.map(|(score, entry)| MatchCandidate { m: m.clone(), entry: entry.clone(), score })
}

/// Score-stratified sample: sort by (score, id), then take every
/// ⌈1/ratio⌉-th element starting at a seed-chosen offset.
pub fn sample_verification(
    candidates: &[MatchCandidate],
    ratio: f64,
    seed: u64,
) -> Vec<MatchCandidate> {
    assert!(ratio > 0.0 && ratio <= 1.0, "sampling ratio must be in (0, 1]");
    let mut sorted: Vec<&MatchCandidate> = candidates.iter().collect();
    sorted.sort_by(|x, y| x.score.total_cmp(&y.score).then_with(|| x.m.id.cmp(&y.m.id)));
    let step = (1.0 / ratio).ceil() as usize;
    let offset = (seed % step as u64) as usize;
    sorted
        .into_iter()
        .skip(offset)
        .step_by(step)
        .cloned()
        .collect()
}

fn class_counts(labeled: &[LabeledPair], kind: &str) -> Result<(usize, usize), MatcherError> {
    let positives = labeled.iter().filter(|l| l.correct).count();
    let negatives = labeled.len() - positives;
    if positives == 0 {
        return Err(MatcherError::DegenerateLabels { kind: kind.to_string(), missing: "positive" });
    }
    if negatives == 0 {
        return Err(MatcherError::DegenerateLabels { kind: kind.to_string(), missing: "negative" });
    }
    Ok((positives, negatives))
}

/// Balanced accuracy of the rule "link when score ≥ t":
/// (true-positive rate + true-negative rate) / 2.
pub fn threshold_metric(labeled: &[LabeledPair], t: f64) -> Result<f64, MatcherError> {
    let (positives, negatives) = class_counts(labeled, "input")?;
    let tp = labeled.iter().filter(|l| l.correct && l.candidate.score >= t).count();
    let tn = labeled.iter().filter(|l| !l.correct && l.candidate.score < t).count();
    Ok((tp as f64 / positives as f64 + tn as f64 / negatives as f64) / 2.0)
}

/// The standard selection grid: 0.05 steps from 0.05 through 0.95.
pub fn threshold_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).collect()
}

/// The grid point maximizing balanced accuracy; ties resolve to the
/// smallest threshold.
pub fn select_threshold(labeled: &[LabeledPair], grid: &[f64]) -> Result<(f64, f64), MatcherError> {
    class_counts(labeled, "input")?;
    let mut best: Option<(f64, f64)> = None;
    for &t in grid {
        let m = threshold_metric(labeled, t)?;
        if best.map_or(true, |(_, bm)| m > bm) {
            best = Some((t, m));
        }
    }
    best.ok_or_else(|| MatcherError::LabelFormat("empty threshold grid".into()))
}

/// Emit one skos:exactMatch triple per candidate at or above its kind's
/// threshold, plus a per-kind report. Kinds without a threshold are
/// skipped entirely.
pub fn apply_links(
    candidates: &[MatchCandidate],
    thresholds: &BTreeMap<EntityKind, (f64, f64)>,
) -> (Vec<Triple>, Vec<ThresholdReport>) {
    let mut triples = Vec::new();
    let mut linked: BTreeMap<EntityKind, BTreeSet<&Iri>> = BTreeMap::new();
    let mut total: BTreeMap<EntityKind, BTreeSet<&Iri>> = BTreeMap::new();
    for c in candidates {
        let Some(&(threshold, _)) = thresholds.get(&c.m.kind) else {
            continue;
        };
        total.entry(c.m.kind).or_default().insert(&c.m.id);
        if c.score >= threshold {
            linked.entry(c.m.kind).or_default().insert(&c.m.id);
            triples.push(
                Triple::new(
                    c.m.id.clone(),
                    vocab::skos_exact_match(),
                    Iri::resource(&c.entry.kg_id),
                )
                .expect("skos:exactMatch is vocabulary"),
            );
        }
    }
    let reports = thresholds
        .iter()
        .filter_map(|(&kind, &(threshold, metric))| {
            let total = total.get(&kind).map_or(0, BTreeSet::len);
            if total == 0 {
                return None;
            }
            let linked = linked.get(&kind).map_or(0, BTreeSet::len);
            Some(ThresholdReport { kind, threshold, metric, link_rate: linked as f64 / total as f64 })
        })
        .collect();
    (triples, reports)
}

/// CSV rendering of the per-kind reports, mirroring the published table
/// layout.
pub fn threshold_report_csv(reports: &[ThresholdReport]) -> String {
    let mut out = String::from("Entity type,Threshold,AUC,Link rate\n");
    for r in reports {
        out.push_str(&format!(
            "{},{:.2},{:.6},{:.6}\n",
            r.kind.name(),
            r.threshold,
            r.metric,
            r.link_rate
        ));
    }
    out
}

/// Terminology graph from CSV: header `kg_id,kind,label`.
pub fn load_kg_csv(path: &Path) -> Result<Vec<TermEntry>, MatcherError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let expected = ["kg_id", "kind", "label"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(MatcherError::KgFormat(format!(
            "expected header {expected:?}, got {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record?;
        let kind = EntityKind::from_name(record[1].trim()).ok_or_else(|| {
            MatcherError::KgFormat(format!("unknown entity kind {:?}", &record[1]))
        })?;
        let label = record[2].trim().to_string();
        if label.is_empty() {
            return Err(MatcherError::KgFormat(format!(
                "entry {:?} has an empty label",
                &record[0]
            )));
        }
        entries.push(TermEntry { kg_id: record[0].trim().to_string(), kind, label });
    }
    Ok(entries)
}

/// Terminology graph from an N-Triples file carrying rdf:type and
/// rdfs:label statements.
pub fn load_kg_ntriples(path: &Path) -> Result<Vec<TermEntry>, MatcherError> {
    let triples = ntriples::read_ntriples_file(path)?;
    let mut kinds: BTreeMap<Iri, EntityKind> = BTreeMap::new();
    let mut labels: BTreeMap<Iri, String> = BTreeMap::new();
    for t in &triples {
        if t.predicate == vocab::rdf_type() {
            if let Some(class) = t.object.as_iri() {
                if let Some(kind) =
                    EntityKind::ALL.into_iter().find(|k| vocab::entity_class(*k) == *class)
                {
                    kinds.insert(t.subject.clone(), kind);
                }
            }
        } else if t.predicate == vocab::rdfs_label() {
            if let Some(lit) = t.object.as_literal() {
                labels.insert(t.subject.clone(), lit.lexical().trim().to_string());
            }
        }
    }
    let mut entries = Vec::new();
    for (subject, kind) in kinds {
        let label = labels.remove(&subject).ok_or_else(|| {
            MatcherError::KgFormat(format!("typed entry {subject} has no label"))
        })?;
        if label.is_empty() {
            return Err(MatcherError::KgFormat(format!("entry {subject} has an empty label")));
        }
        entries.push(TermEntry { kg_id: subject.local().to_string(), kind, label });
    }
    Ok(entries)
}

/// Load a terminology graph, choosing the format by file extension.
pub fn load_kg(path: &Path) -> Result<Vec<TermEntry>, MatcherError> {
    if path.extension().is_some_and(|e| e == "nt") {
        load_kg_ntriples(path)
    } else {
        load_kg_csv(path)
    }
}

/// Expert labels from CSV: header `m_id,kg_id,correct` with 0/1 values.
pub fn load_labels_csv(path: &Path) -> Result<BTreeMap<(String, String), bool>, MatcherError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let expected = ["m_id", "kg_id", "correct"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(MatcherError::LabelFormat(format!(
            "expected header {expected:?}, got {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut labels = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let correct = match record[2].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(MatcherError::LabelFormat(format!(
                    "correct must be 0 or 1, got {other:?}"
                )))
            }
        };
        labels.insert((record[0].trim().to_string(), record[1].trim().to_string()), correct);
    }
    Ok(labels)
}

/// Join sampled candidates with the label file; unlabeled pairs drop out.
pub fn label_candidates(
    sampled: &[MatchCandidate],
    labels: &BTreeMap<(String, String), bool>,
) -> Vec<LabeledPair> {
    sampled
        .iter()
        .filter_map(|c| {
            labels
                .get(&(c.m.id.local().to_string(), c.entry.kg_id.clone()))
                .map(|&correct| LabeledPair { candidate: c.clone(), correct })
        })
        .collect()
}
