//! End-to-end orchestration: preprocess → map → temporal → match →
//! load/stats. Each stage reads and writes files under the configured
//! output directory, so running stages one at a time through the CLI
//! produces byte-identical results to one `build` run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::mapping::{self, EntityRegistry};
use crate::matcher::{self, LabeledPair, MatchCandidate};
use crate::model::{
    EntityKind, EventGraph, EventKind, Iri, MedicalEvent, RelationKind, TemporalEdge, Triple,
};
use crate::ntriples;
use crate::preprocess::{self, NormalizationConfig, RecordTable};
use crate::store::{Slot, TripleStore};
use crate::temporal::{self, PatientTimeline};
use crate::vocab;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{stage} stage ({locus}): {message}")]
    Stage { stage: &'static str, locus: String, message: String },
}

fn config_err(path: &Path, message: impl Into<String>) -> PipelineError {
    PipelineError::Config { path: path.to_path_buf(), message: message.into() }
}

fn stage_err<E: fmt::Display>(
    stage: &'static str,
    locus: impl Into<String>,
) -> impl FnOnce(E) -> PipelineError {
    let locus = locus.into();
    move |e| PipelineError::Stage { stage, locus, message: e.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemporalMode {
    Full,
    Reduced,
}

impl TemporalMode {
    pub fn name(self) -> &'static str {
        match self {
            TemporalMode::Full => "full",
            TemporalMode::Reduced => "reduced",
        }
    }

    pub fn from_name(name: &str) -> Option<TemporalMode> {
        match name {
            "full" => Some(TemporalMode::Full),
            "reduced" => Some(TemporalMode::Reduced),
            _ => None,
        }
    }
}

/// A validated pipeline configuration. All paths are resolved relative
/// to the directory containing the config file.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub tables: BTreeMap<String, PathBuf>,
    pub normalization: PathBuf,
    pub mapping: PathBuf,
    pub kg: PathBuf,
    pub labels: PathBuf,
    pub temporal_mode: TemporalMode,
    pub out: PathBuf,
    pub seed: u64,
    pub sampling_ratio: f64,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawPipelineConfig {
    tables: BTreeMap<String, String>,
    normalization: String,
    mapping: String,
    kg: String,
    labels: String,
    #[serde(default = "default_mode")]
    temporal_mode: String,
    out: String,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_ratio")]
    sampling_ratio: f64,
}

fn default_mode() -> String {
    "full".to_string()
}

fn default_ratio() -> f64 {
    1.0
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| config_err(path, e.to_string()))?;
        let raw: RawPipelineConfig =
            serde_json::from_str(&text).map_err(|e| config_err(path, e.to_string()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let resolve = |p: &str| base.join(p);
        let config = PipelineConfig {
            tables: raw.tables.iter().map(|(n, p)| (n.clone(), resolve(p))).collect(),
            normalization: resolve(&raw.normalization),
            mapping: resolve(&raw.mapping),
            kg: resolve(&raw.kg),
            labels: resolve(&raw.labels),
            temporal_mode: TemporalMode::from_name(&raw.temporal_mode).ok_or_else(|| {
                config_err(path, format!("temporalMode must be full or reduced, got {:?}", raw.temporal_mode))
            })?,
            out: resolve(&raw.out),
            seed: raw.seed,
            sampling_ratio: raw.sampling_ratio,
        };
        config.validate(path)?;
        Ok(config)
    }

    /// Check the config before any stage runs: every input path must
    /// exist and the sampling ratio must be usable.
    pub fn validate(&self, config_path: &Path) -> Result<(), PipelineError> {
        if self.tables.is_empty() {
            return Err(config_err(config_path, "tables map is empty"));
        }
        let mut inputs: Vec<(&str, &Path)> = vec![
            ("normalization", &self.normalization),
            ("mapping", &self.mapping),
            ("kg", &self.kg),
            ("labels", &self.labels),
        ];
        for (name, p) in &self.tables {
            inputs.push((name, p));
        }
        for (name, p) in inputs {
            if !p.is_file() {
                return Err(config_err(
                    config_path,
                    format!("{name} path {} does not exist", p.display()),
                ));
            }
        }
        if !(self.sampling_ratio > 0.0 && self.sampling_ratio <= 1.0) {
            return Err(config_err(config_path, "samplingRatio must be in (0, 1]"));
        }
        Ok(())
    }

    pub fn preprocessed_dir(&self) -> PathBuf {
        self.out.join("preprocessed")
    }

    pub fn preprocessed_table(&self, name: &str) -> PathBuf {
        self.preprocessed_dir().join(format!("{name}.csv"))
    }

    pub fn events_path(&self) -> PathBuf {
        self.out.join("events.nt")
    }

    pub fn temporal_path(&self) -> PathBuf {
        self.out.join("temporal.nt")
    }

    pub fn links_path(&self) -> PathBuf {
        self.out.join("links.nt")
    }

    pub fn registry_path(&self) -> PathBuf {
        self.out.join("registry.json")
    }

    pub fn threshold_report_path(&self) -> PathBuf {
        self.out.join("threshold_report.csv")
    }

    pub fn sample_path(&self) -> PathBuf {
        self.out.join("verification_sample.csv")
    }

    pub fn temporal_report_path(&self) -> PathBuf {
        self.out.join("temporal_report.csv")
    }

    pub fn stats_path(&self) -> PathBuf {
        self.out.join("stats.csv")
    }
}

/// Clean every input table and write the results under
/// `out/preprocessed/`.
pub fn run_preprocess(config: &PipelineConfig) -> Result<(), PipelineError> {
    const STAGE: &str = "preprocess";
    let norm = NormalizationConfig::load(&config.normalization)
        .map_err(stage_err(STAGE, config.normalization.display().to_string()))?;
    fs::create_dir_all(config.preprocessed_dir())
        .map_err(stage_err(STAGE, "creating the output directory"))?;
    for (name, path) in &config.tables {
        let locus = format!("table {name}");
        let table =
            RecordTable::from_csv_path(name, path).map_err(stage_err(STAGE, locus.clone()))?;
        let cleaned = preprocess::preprocess_table(&table, &norm)
            .map_err(stage_err(STAGE, locus.clone()))?;
        cleaned.write_csv(&config.preprocessed_table(name)).map_err(stage_err(STAGE, locus))?;
    }
    Ok(())
}

/// Convert the preprocessed tables to triples; write `events.nt` and the
/// entity registry.
pub fn run_map(config: &PipelineConfig) -> Result<(), PipelineError> {
    const STAGE: &str = "map";
    let mapping_config = mapping::load_mapping_config(&config.mapping)
        .map_err(stage_err(STAGE, config.mapping.display().to_string()))?;
    let mut tables = BTreeMap::new();
    for name in config.tables.keys() {
        let path = config.preprocessed_table(name);
        if !path.is_file() {
            return Err(PipelineError::Stage {
                stage: STAGE,
                locus: format!("table {name}"),
                message: format!("{} is missing; run the preprocess stage first", path.display()),
            });
        }
        let table = RecordTable::from_csv_path(name, &path)
            .map_err(stage_err(STAGE, format!("table {name}")))?;
        tables.insert(name.clone(), table);
    }
    let mut registry = EntityRegistry::new(mapping_config.entity_id_start);
    let mut triples = Vec::new();
    for map in &mapping_config.maps {
        let locus = format!("table {}", map.table);
        let table = tables.get(&map.table).ok_or_else(|| PipelineError::Stage {
            stage: STAGE,
            locus: locus.clone(),
            message: "the mapping names a table the pipeline config does not list".to_string(),
        })?;
        map.validate_columns(table).map_err(stage_err(STAGE, locus.clone()))?;
        triples.extend(
            mapping::apply_triples_map(table, map, &mut registry)
                .map_err(stage_err(STAGE, locus))?,
        );
    }
    triples.extend(registry.entity_triples());
    ntriples::write_ntriples_file(&triples, &config.events_path())
        .map_err(stage_err(STAGE, "writing events.nt"))?;
    registry.save(&config.registry_path()).map_err(stage_err(STAGE, "writing registry.json"))?;
    Ok(())
}

fn timelines(graph: &EventGraph) -> Result<Vec<PatientTimeline>, temporal::TemporalError> {
    let mut per_patient: BTreeMap<&Iri, Vec<MedicalEvent>> = BTreeMap::new();
    for event in graph.events.values() {
        per_patient.entry(&event.patient).or_default().push(event.clone());
    }
    // Patients with no events still get (empty) timelines so reports list
    // every patient.
    for id in graph.patients.keys() {
        per_patient.entry(id).or_default();
    }
    per_patient
        .into_iter()
        .map(|(patient, events)| PatientTimeline::new(patient.clone(), events))
        .collect()
}

/// Build temporal edges for every patient in `events.nt`; write
/// `temporal.nt` and the per-patient relation report.
pub fn run_temporal(config: &PipelineConfig) -> Result<(), PipelineError> {
    const STAGE: &str = "temporal";
    let triples = ntriples::read_ntriples_file(&config.events_path())
        .map_err(stage_err(STAGE, "reading events.nt"))?;
    let graph = EventGraph::from_triples(&triples).map_err(stage_err(STAGE, "decoding events"))?;
    let mut edges = Vec::new();
    let mut report = String::from("patient,relation,count\n");
    for timeline in timelines(&graph).map_err(stage_err(STAGE, "grouping timelines"))? {
        let built = match config.temporal_mode {
            TemporalMode::Full => temporal::build_full(&timeline),
            TemporalMode::Reduced => temporal::build_reduced(&timeline),
        };
        // The report shows the inferred totals, so it reads the same in
        // either mode.
        let closure = temporal::infer_closure(&built)
            .map_err(stage_err(STAGE, format!("patient {}", timeline.patient)))?;
        let counts = temporal::relation_counts(&closure);
        for rel in RelationKind::ALL {
            report.push_str(&format!(
                "{},{},{}\n",
                timeline.patient.local(),
                rel.name(),
                counts.get(&rel).copied().unwrap_or(0)
            ));
        }
        edges.extend(built);
    }
    ntriples::write_ntriples_file(&temporal::edges_to_triples(&edges), &config.temporal_path())
        .map_err(stage_err(STAGE, "writing temporal.nt"))?;
    fs::write(config.temporal_report_path(), report)
        .map_err(stage_err(STAGE, "writing temporal_report.csv"))?;
    Ok(())
}

fn write_sample_csv(sample: &[MatchCandidate], path: &Path) -> Result<(), std::io::Error> {
    let mut out = String::from("m_id,kind,m_label,kg_id,kg_label,score\n");
    for c in sample {
        out.push_str(&format!(
            "{},{},{},{},{},{:.6}\n",
            c.m.id.local(),
            c.m.kind.name(),
            c.m.label,
            c.entry.kg_id,
            c.entry.label,
            c.score
        ));
    }
    fs::write(path, out)
}

/// Link registry entities to the terminology graph; write `links.nt`,
/// the verification sample, and the threshold report.
pub fn run_match(config: &PipelineConfig) -> Result<(), PipelineError> {
    const STAGE: &str = "match";
    let registry_path = config.registry_path();
    if !registry_path.is_file() {
        return Err(PipelineError::Stage {
            stage: STAGE,
            locus: "registry.json".to_string(),
            message: format!("{} is missing; run the map stage first", registry_path.display()),
        });
    }
    let registry =
        EntityRegistry::load(&registry_path).map_err(stage_err(STAGE, "reading registry.json"))?;
    let kg = matcher::load_kg(&config.kg)
        .map_err(stage_err(STAGE, config.kg.display().to_string()))?;
    let labels = matcher::load_labels_csv(&config.labels)
        .map_err(stage_err(STAGE, config.labels.display().to_string()))?;

    let candidates: Vec<MatchCandidate> =
        registry.entities().iter().filter_map(|m| matcher::best_candidate(m, &kg)).collect();
    let sample = matcher::sample_verification(&candidates, config.sampling_ratio, config.seed);
    write_sample_csv(&sample, &config.sample_path())
        .map_err(stage_err(STAGE, "writing verification_sample.csv"))?;

    let labeled = matcher::label_candidates(&sample, &labels);
    let mut by_kind: BTreeMap<EntityKind, Vec<LabeledPair>> = BTreeMap::new();
    for pair in labeled {
        by_kind.entry(pair.candidate.m.kind).or_default().push(pair);
    }
    let grid = matcher::threshold_grid();
    let mut thresholds = BTreeMap::new();
    for (kind, pairs) in by_kind {
        let (threshold, metric) = matcher::select_threshold(&pairs, &grid)
            .map_err(stage_err(STAGE, format!("{} labels", kind.name())))?;
        thresholds.insert(kind, (threshold, metric));
    }

    let (links, reports) = matcher::apply_links(&candidates, &thresholds);
    ntriples::write_ntriples_file(&links, &config.links_path())
        .map_err(stage_err(STAGE, "writing links.nt"))?;
    fs::write(config.threshold_report_path(), matcher::threshold_report_csv(&reports))
        .map_err(stage_err(STAGE, "writing threshold_report.csv"))?;
    Ok(())
}

/// Scan loose triples for temporal edges, run closure inference, and
/// return a store holding the inputs plus everything inferred.
pub fn closure_store(triples: &[Triple]) -> Result<TripleStore, PipelineError> {
    let mut store = TripleStore::from_triples(triples);
    let mut edges = Vec::new();
    for t in triples {
        if let Some(rel) = RelationKind::from_name(t.predicate.local()) {
            if t.predicate == vocab::relation_predicate(rel) {
                if let Some(to) = t.object.as_iri() {
                    edges.push(TemporalEdge::new(t.subject.clone(), rel, to.clone()));
                }
            }
        }
    }
    let closure =
        temporal::infer_closure(&edges).map_err(stage_err("load", "temporal closure"))?;
    for t in temporal::edges_to_triples(&closure) {
        store.insert(t);
    }
    Ok(store)
}

/// Load one or more N-Triples files into a closure-completed store.
pub fn load_store(paths: &[PathBuf]) -> Result<TripleStore, PipelineError> {
    let mut triples = Vec::new();
    for path in paths {
        triples.extend(
            ntriples::read_ntriples_file(path)
                .map_err(stage_err("load", path.display().to_string()))?,
        );
    }
    closure_store(&triples)
}

/// Dataset-level counts, computed from a loaded store.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetStats {
    pub events: BTreeMap<EventKind, usize>,
    pub relations: BTreeMap<RelationKind, usize>,
    pub links: BTreeMap<EntityKind, usize>,
    pub total_triples: usize,
}

impl DatasetStats {
    pub fn from_store(store: &TripleStore) -> DatasetStats {
        let events = EventKind::ALL
            .into_iter()
            .map(|kind| {
                let n = store.count_pattern(
                    &Slot::Any,
                    &Slot::Bound(vocab::rdf_type()),
                    &Slot::Bound(vocab::event_class(kind).into()),
                );
                (kind, n)
            })
            .collect();
        let relations = RelationKind::ALL
            .into_iter()
            .map(|rel| {
                let n = store.count_pattern(
                    &Slot::Any,
                    &Slot::Bound(vocab::relation_predicate(rel)),
                    &Slot::Any,
                );
                (rel, n)
            })
            .collect();
        let mut links: BTreeMap<EntityKind, BTreeSet<Iri>> = BTreeMap::new();
        for t in store.match_pattern(&Slot::Any, &Slot::Bound(vocab::skos_exact_match()), &Slot::Any)
        {
            for kind in EntityKind::ALL {
                let typed = Triple::new(
                    t.subject.clone(),
                    vocab::rdf_type(),
                    vocab::entity_class(kind),
                )
                .expect("rdf:type is vocabulary");
                if store.contains(&typed) {
                    links.entry(kind).or_default().insert(t.subject.clone());
                }
            }
        }
        DatasetStats {
            events,
            relations,
            links: EntityKind::ALL
                .into_iter()
                .map(|k| (k, links.get(&k).map_or(0, BTreeSet::len)))
                .collect(),
            total_triples: store.len(),
        }
    }

    /// The frozen `category,name,count` layout: events by kind, relations
    /// by kind, linked entities by kind, then the total triple count.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("category,name,count\n");
        for kind in EventKind::ALL {
            out.push_str(&format!("events,{},{}\n", kind.name(), self.events[&kind]));
        }
        for rel in RelationKind::ALL {
            out.push_str(&format!("relations,{},{}\n", rel.name(), self.relations[&rel]));
        }
        for kind in EntityKind::ALL {
            out.push_str(&format!("links,{},{}\n", kind.name(), self.links[&kind]));
        }
        out.push_str(&format!("total,triples,{}\n", self.total_triples));
        out
    }
}

/// Load the three pipeline outputs, compute stats, and write `stats.csv`.
pub fn run_stats(config: &PipelineConfig) -> Result<DatasetStats, PipelineError> {
    let store =
        load_store(&[config.events_path(), config.temporal_path(), config.links_path()])?;
    let stats = DatasetStats::from_store(&store);
    fs::write(config.stats_path(), stats.to_csv())
        .map_err(stage_err("stats", "writing stats.csv"))?;
    Ok(stats)
}

/// Run every stage in order. Two runs with the same config and seed are
/// byte-identical across the whole output directory.
pub fn run_pipeline(config: &PipelineConfig) -> Result<DatasetStats, PipelineError> {
    fs::create_dir_all(&config.out).map_err(stage_err("preprocess", "creating the output directory"))?;
    run_preprocess(config)?;
    run_map(config)?;
    run_temporal(config)?;
    run_match(config)?;
    run_stats(config)
}
