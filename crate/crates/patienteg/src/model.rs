//! Typed in-memory representation of the patient event graph: IRIs,
//! literals, triples, intervals, entities, events, and temporal edges.
//!
//! All values are immutable after construction and safe to share across
//! threads. Triple emission is deterministic: identical inputs produce
//! identical ordered output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{NaiveDate, NaiveDateTime};
use thiserror::Error;

use crate::vocab::{self, Prefix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("empty local part for prefix {0}")]
    EmptyLocal(&'static str),
    #[error("literal {lexical:?} does not parse as {datatype}")]
    InvalidLiteral { lexical: String, datatype: &'static str },
    #[error("interval begin {begin} is after end {end}")]
    InvertedInterval { begin: String, end: String },
    #[error("predicate {0} is in the resource namespace")]
    ResourcePredicate(String),
    #[error("timestamp {0:?} is not an ISO date or datetime")]
    InvalidTimestamp(String),
    #[error("subject {subject} has no rdf:type triple")]
    MissingType { subject: String },
    #[error("event {subject} has no begin timestamp")]
    MissingTimestamp { subject: String },
    #[error("event {subject} has no actor typed as a patient")]
    NoPatientActor { subject: String },
    #[error("event {subject} has {count} actors typed as patients")]
    MultiplePatientActors { subject: String, count: usize },
    #[error("event {subject} actor {actor} has no entity type")]
    UntypedActor { subject: String, actor: String },
    #[error("{kind} event {subject} must have a point interval")]
    PeriodNotAllowed { subject: String, kind: String },
    #[error("unexpected object for {predicate} on {subject}")]
    UnexpectedObject { subject: String, predicate: String },
}

/// Characters that may not appear raw inside an N-Triples IRI.
fn iri_forbidden(c: char) -> bool {
    c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' | '%') || c == '\u{7f}'
}

/// Percent-encode the characters an IRI local part may not contain.
/// `%` itself is always encoded, which makes the encoding injective.
fn percent_encode(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut buf = [0u8; 4];
    for c in raw.chars() {
        if iri_forbidden(c) {
            for b in c.encode_utf8(&mut buf).as_bytes() {
                out.push('%');
                out.push_str(&format!("{b:02X}"));
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// A prefixed IRI under the fixed namespace table.
///
/// The local part is stored in encoded form, so it never contains
/// whitespace or angle brackets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri {
    prefix: Prefix,
    local: String,
}

impl Iri {
    /// A resource identifier under `peg-r`. The raw value (a primary-key
    /// cell or minted id) is percent-encoded where needed.
    pub fn resource(raw: &str) -> Iri {
        Iri { prefix: Prefix::PegR, local: percent_encode(raw) }
    }

    /// A vocabulary term. Locals are static names, never encoded.
    pub(crate) fn vocab(prefix: Prefix, local: &str) -> Iri {
        Iri { prefix, local: local.to_string() }
    }

    /// Rebuild an IRI from an already-encoded local part (parser use).
    pub fn from_encoded(prefix: Prefix, local: &str) -> Result<Iri, ModelError> {
        if local.is_empty() {
            return Err(ModelError::EmptyLocal(prefix.label()));
        }
        if local.chars().any(iri_forbidden) {
            return Err(ModelError::InvalidLiteral { lexical: local.to_string(), datatype: "iri local" });
        }
        Ok(Iri { prefix, local: local.to_string() })
    }

    /// Parse a prefixed name such as `peg-o:DiagnosisEvent`.
    pub fn parse_prefixed(name: &str) -> Option<Iri> {
        let (label, local) = name.split_once(':')?;
        let prefix = Prefix::from_label(label)?;
        if local.is_empty() {
            return None;
        }
        Iri::from_encoded(prefix, local).ok()
    }

    pub fn prefix(&self) -> Prefix {
        self.prefix
    }

    pub fn local(&self) -> &str {
        &self.local
    }

    /// The absolute form, base URI plus local part.
    pub fn absolute(&self) -> String {
        format!("{}{}", self.prefix.base(), self.local)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix.label(), self.local)
    }
}

/// Literal datatype tag. Plain strings carry no tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Datatype {
    Date,
    DateTime,
    Integer,
    Decimal,
}

impl Datatype {
    pub fn xsd_iri(self) -> &'static str {
        match self {
            Datatype::Date => "http://www.w3.org/2001/XMLSchema#date",
            Datatype::DateTime => "http://www.w3.org/2001/XMLSchema#dateTime",
            Datatype::Integer => "http://www.w3.org/2001/XMLSchema#integer",
            Datatype::Decimal => "http://www.w3.org/2001/XMLSchema#decimal",
        }
    }

    pub fn from_xsd_iri(iri: &str) -> Option<Datatype> {
        match iri {
            "http://www.w3.org/2001/XMLSchema#date" => Some(Datatype::Date),
            "http://www.w3.org/2001/XMLSchema#dateTime" => Some(Datatype::DateTime),
            "http://www.w3.org/2001/XMLSchema#integer" => Some(Datatype::Integer),
            "http://www.w3.org/2001/XMLSchema#decimal" => Some(Datatype::Decimal),
            _ => None,
        }
    }
}

/// An RDF literal: lexical form plus optional datatype.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Option<Datatype>,
}

impl Literal {
    /// A plain string literal.
    pub fn string(lexical: impl Into<String>) -> Literal {
        Literal { lexical: lexical.into(), datatype: None }
    }

    /// A typed literal. The lexical form is validated against the tag.
    pub fn typed(lexical: impl Into<String>, datatype: Datatype) -> Result<Literal, ModelError> {
        let lexical = lexical.into();
        let ok = match datatype {
            Datatype::Date => NaiveDate::parse_from_str(&lexical, "%Y-%m-%d").is_ok(),
            Datatype::DateTime => {
                NaiveDateTime::parse_from_str(&lexical, "%Y-%m-%dT%H:%M:%S").is_ok()
            }
            Datatype::Integer => lexical.parse::<i64>().is_ok(),
            Datatype::Decimal => crate::decimal::Decimal::parse(&lexical).is_ok(),
        };
        if !ok {
            return Err(ModelError::InvalidLiteral {
                lexical,
                datatype: match datatype {
                    Datatype::Date => "date",
                    Datatype::DateTime => "dateTime",
                    Datatype::Integer => "integer",
                    Datatype::Decimal => "decimal",
                },
            });
        }
        Ok(Literal { lexical, datatype: Some(datatype) })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<Datatype> {
        self.datatype
    }
}

/// Subject or object position value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            Term::Iri(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Term {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Term {
        Term::Literal(lit)
    }
}

/// One subject-predicate-object statement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    /// Build a triple, rejecting predicates in the resource namespace.
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Result<Triple, ModelError> {
        if !predicate.prefix().is_vocabulary() {
            return Err(ModelError::ResourcePredicate(predicate.to_string()));
        }
        Ok(Triple { subject, predicate, object: object.into() })
    }

    /// Internal constructor for predicates known to be vocabulary terms.
    fn vocab_stmt(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Triple {
        debug_assert!(predicate.prefix().is_vocabulary());
        Triple { subject, predicate, object: object.into() }
    }
}

/// A point in time at day or second granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Timestamp {
    Date(NaiveDate),
    DateTime(NaiveDateTime),
}

impl Timestamp {
    /// Parse an ISO date (`2012-01-01`) or datetime (`2012-01-01T08:30:00`).
    pub fn parse(text: &str) -> Result<Timestamp, ModelError> {
        if let Ok(d) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
            return Ok(Timestamp::Date(d));
        }
        if let Ok(dt) = NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S") {
            return Ok(Timestamp::DateTime(dt));
        }
        Err(ModelError::InvalidTimestamp(text.to_string()))
    }

    fn instant(&self) -> NaiveDateTime {
        match self {
            Timestamp::Date(d) => d.and_hms_opt(0, 0, 0).expect("midnight is valid"),
            Timestamp::DateTime(dt) => *dt,
        }
    }

    pub fn lexical(&self) -> String {
        match self {
            Timestamp::Date(d) => d.format("%Y-%m-%d").to_string(),
            Timestamp::DateTime(dt) => dt.format("%Y-%m-%dT%H:%M:%S").to_string(),
        }
    }

    pub fn datatype(&self) -> Datatype {
        match self {
            Timestamp::Date(_) => Datatype::Date,
            Timestamp::DateTime(_) => Datatype::DateTime,
        }
    }

    pub fn literal(&self) -> Literal {
        Literal::typed(self.lexical(), self.datatype()).expect("formatted timestamp is valid")
    }
}

impl PartialOrd for Timestamp {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Timestamp {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Chronological order; at an equal instant the day-granular value
        // sorts first so ordering stays consistent with equality.
        let granularity = |t: &Timestamp| matches!(t, Timestamp::DateTime(_));
        (self.instant(), granularity(self)).cmp(&(other.instant(), granularity(other)))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexical())
    }
}

/// A closed time interval. A point is an interval with `begin == end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    begin: Timestamp,
    end: Timestamp,
}

impl Interval {
    pub fn new(begin: Timestamp, end: Timestamp) -> Result<Interval, ModelError> {
        if begin > end {
            return Err(ModelError::InvertedInterval {
                begin: begin.lexical(),
                end: end.lexical(),
            });
        }
        Ok(Interval { begin, end })
    }

    pub fn point(at: Timestamp) -> Interval {
        Interval { begin: at, end: at }
    }

    pub fn begin(&self) -> Timestamp {
        self.begin
    }

    pub fn end(&self) -> Timestamp {
        self.end
    }

    pub fn is_point(&self) -> bool {
        self.begin == self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityKind {
    Disease,
    Drug,
    Assay,
    Surgery,
}

impl EntityKind {
    pub const ALL: [EntityKind; 4] =
        [EntityKind::Disease, EntityKind::Drug, EntityKind::Assay, EntityKind::Surgery];

    pub fn name(self) -> &'static str {
        match self {
            EntityKind::Disease => "Disease",
            EntityKind::Drug => "Drug",
            EntityKind::Assay => "Assay",
            EntityKind::Surgery => "Surgery",
        }
    }

    pub fn from_name(name: &str) -> Option<EntityKind> {
        EntityKind::ALL.iter().copied().find(|k| k.name() == name)
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Hospitalization,
    Diagnosis,
    Drug,
    Assay,
    Surgery,
}

impl EventKind {
    pub const ALL: [EventKind; 5] = [
        EventKind::Hospitalization,
        EventKind::Diagnosis,
        EventKind::Drug,
        EventKind::Assay,
        EventKind::Surgery,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EventKind::Hospitalization => "Hospitalization",
            EventKind::Diagnosis => "Diagnosis",
            EventKind::Drug => "Drug",
            EventKind::Assay => "Assay",
            EventKind::Surgery => "Surgery",
        }
    }

    /// Whether events of this kind may span a period. Diagnoses, assays and
    /// surgeries always occur at a single point.
    pub fn allows_period(self) -> bool {
        matches!(self, EventKind::Hospitalization | EventKind::Drug)
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The five temporal relations between same-patient events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationKind {
    Before,
    After,
    Concurrent,
    During,
    Overlap,
}

impl RelationKind {
    pub const ALL: [RelationKind; 5] = [
        RelationKind::Before,
        RelationKind::After,
        RelationKind::Concurrent,
        RelationKind::During,
        RelationKind::Overlap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Before => "Before",
            RelationKind::After => "After",
            RelationKind::Concurrent => "Concurrent",
            RelationKind::During => "During",
            RelationKind::Overlap => "Overlap",
        }
    }

    pub fn from_name(name: &str) -> Option<RelationKind> {
        RelationKind::ALL.iter().copied().find(|r| r.name() == name)
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A patient resource with its demographic properties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatientEntity {
    pub id: Iri,
    pub gender: String,
    pub birthday: Option<NaiveDate>,
}

/// A disease, drug, assay, or surgery resource with its surface label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedicalEntity {
    pub id: Iri,
    pub kind: EntityKind,
    pub label: String,
}

/// One medical event: what happened, to whom, with what, and when.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedicalEvent {
    pub id: Iri,
    pub kind: EventKind,
    pub patient: Iri,
    pub entities: BTreeSet<Iri>,
    pub interval: Interval,
    pub props: BTreeMap<Iri, Literal>,
}

/// A directed temporal relation between two same-patient events.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemporalEdge {
    pub from: Iri,
    pub to: Iri,
    pub rel: RelationKind,
}

impl TemporalEdge {
    pub fn new(from: Iri, rel: RelationKind, to: Iri) -> TemporalEdge {
        debug_assert!(from != to, "temporal edge endpoints must differ");
        TemporalEdge { from, to, rel }
    }
}

/// Emit the triples describing one event, in deterministic order: type,
/// patient actor, entity actors, begin, end (periods only), properties.
pub fn event_to_triples(event: &MedicalEvent) -> Vec<Triple> {
    let mut out = Vec::with_capacity(4 + event.entities.len() + event.props.len());
    out.push(Triple::vocab_stmt(
        event.id.clone(),
        vocab::rdf_type(),
        vocab::event_class(event.kind),
    ));
    out.push(Triple::vocab_stmt(
        event.id.clone(),
        vocab::sem_has_actor(),
        event.patient.clone(),
    ));
    for entity in &event.entities {
        out.push(Triple::vocab_stmt(
            event.id.clone(),
            vocab::sem_has_actor(),
            entity.clone(),
        ));
    }
    out.push(Triple::vocab_stmt(
        event.id.clone(),
        vocab::sem_has_begin_timestamp(),
        event.interval.begin().literal(),
    ));
    if !event.interval.is_point() {
        out.push(Triple::vocab_stmt(
            event.id.clone(),
            vocab::sem_has_end_timestamp(),
            event.interval.end().literal(),
        ));
    }
    for (prop, value) in &event.props {
        out.push(Triple::vocab_stmt(event.id.clone(), prop.clone(), value.clone()));
    }
    out
}

/// Emit the triples describing a patient: type, gender, optional birthday.
pub fn patient_to_triples(patient: &PatientEntity) -> Vec<Triple> {
    let mut out = vec![
        Triple::vocab_stmt(patient.id.clone(), vocab::rdf_type(), vocab::patient_class()),
        Triple::vocab_stmt(
            patient.id.clone(),
            vocab::peg_gender(),
            Literal::string(&patient.gender),
        ),
    ];
    if let Some(birthday) = patient.birthday {
        out.push(Triple::vocab_stmt(
            patient.id.clone(),
            vocab::peg_birthday(),
            Timestamp::Date(birthday).literal(),
        ));
    }
    out
}

/// Emit the triples describing a medical entity: type plus label.
pub fn entity_to_triples(entity: &MedicalEntity) -> Vec<Triple> {
    vec![
        Triple::vocab_stmt(entity.id.clone(), vocab::rdf_type(), vocab::entity_class(entity.kind)),
        Triple::vocab_stmt(entity.id.clone(), vocab::rdfs_label(), Literal::string(&entity.label)),
    ]
}

/// The typed view of a triple collection, regrouped by subject.
///
/// Decoding inverts `event_to_triples` / `entity_to_triples`: the same
/// events and entities come back out, regardless of triple order.
#[derive(Debug, Default, Clone)]
pub struct EventGraph {
    pub patients: BTreeMap<Iri, PatientEntity>,
    pub entities: BTreeMap<Iri, MedicalEntity>,
    pub events: BTreeMap<Iri, MedicalEvent>,
    pub edges: Vec<TemporalEdge>,
}

impl EventGraph {
    pub fn from_triples<'a, I>(triples: I) -> Result<EventGraph, ModelError>
    where
        I: IntoIterator<Item = &'a Triple>,
    {
        let mut by_subject: BTreeMap<&Iri, Vec<&Triple>> = BTreeMap::new();
        let mut edges = Vec::new();
        let rdf_type = vocab::rdf_type();
        for triple in triples {
            if let (Prefix::PegO, Term::Iri(to)) = (triple.predicate.prefix(), &triple.object) {
                if let Some(rel) = RelationKind::from_name(triple.predicate.local()) {
                    edges.push(TemporalEdge::new(triple.subject.clone(), rel, to.clone()));
                    continue;
                }
            }
            by_subject.entry(&triple.subject).or_default().push(triple);
        }
        edges.sort();
        edges.dedup();

        // First pass: resolve every subject's class.
        let mut types: BTreeMap<&Iri, &Iri> = BTreeMap::new();
        for (subject, stmts) in &by_subject {
            for stmt in stmts {
                if stmt.predicate == rdf_type {
                    if let Term::Iri(class) = &stmt.object {
                        types.insert(subject, class);
                    }
                }
            }
        }

        let mut graph = EventGraph { edges, ..EventGraph::default() };
        for (subject, stmts) in &by_subject {
            let class = types
                .get(subject)
                .ok_or_else(|| ModelError::MissingType { subject: subject.to_string() })?;
            if **class == vocab::patient_class() {
                graph
                    .patients
                    .insert((*subject).clone(), decode_patient(subject, stmts)?);
            } else if let Some(kind) = entity_kind_of(class) {
                graph
                    .entities
                    .insert((*subject).clone(), decode_entity(subject, kind, stmts)?);
            } else if let Some(kind) = event_kind_of(class) {
                // Events need the actor types; decoded in a second pass below.
                let _ = kind;
            } else {
                return Err(ModelError::MissingType { subject: subject.to_string() });
            }
        }
        for (subject, stmts) in &by_subject {
            if let Some(kind) = types.get(subject).and_then(|c| event_kind_of(c)) {
                let event = decode_event(subject, kind, stmts, &graph)?;
                graph.events.insert((*subject).clone(), event);
            }
        }
        Ok(graph)
    }
}

fn entity_kind_of(class: &Iri) -> Option<EntityKind> {
    EntityKind::ALL.into_iter().find(|k| vocab::entity_class(*k) == *class)
}

fn event_kind_of(class: &Iri) -> Option<EventKind> {
    EventKind::ALL.into_iter().find(|k| vocab::event_class(*k) == *class)
}

fn decode_patient(subject: &Iri, stmts: &[&Triple]) -> Result<PatientEntity, ModelError> {
    let mut gender = String::new();
    let mut birthday = None;
    for stmt in stmts {
        if stmt.predicate == vocab::peg_gender() {
            gender = literal_of(stmt)?.lexical().to_string();
        } else if stmt.predicate == vocab::peg_birthday() {
            let lex = literal_of(stmt)?.lexical().to_string();
            match Timestamp::parse(&lex)? {
                Timestamp::Date(d) => birthday = Some(d),
                Timestamp::DateTime(dt) => birthday = Some(dt.date()),
            }
        }
    }
    Ok(PatientEntity { id: subject.clone(), gender, birthday })
}

fn decode_entity(
    subject: &Iri,
    kind: EntityKind,
    stmts: &[&Triple],
) -> Result<MedicalEntity, ModelError> {
    let mut label = String::new();
    for stmt in stmts {
        if stmt.predicate == vocab::rdfs_label() {
            label = literal_of(stmt)?.lexical().to_string();
        }
    }
    Ok(MedicalEntity { id: subject.clone(), kind, label })
}

fn decode_event(
    subject: &Iri,
    kind: EventKind,
    stmts: &[&Triple],
    graph: &EventGraph,
) -> Result<MedicalEvent, ModelError> {
    let mut patients = Vec::new();
    let mut entities = BTreeSet::new();
    let mut begin = None;
    let mut end = None;
    let mut props = BTreeMap::new();
    let prop_iris = vocab::event_property_iris();
    for stmt in stmts {
        if stmt.predicate == vocab::sem_has_actor() {
            let actor = match &stmt.object {
                Term::Iri(iri) => iri,
                Term::Literal(_) => {
                    return Err(ModelError::UnexpectedObject {
                        subject: subject.to_string(),
                        predicate: stmt.predicate.to_string(),
                    })
                }
            };
            if graph.patients.contains_key(actor) {
                patients.push(actor.clone());
            } else if graph.entities.contains_key(actor) {
                entities.insert(actor.clone());
            } else {
                return Err(ModelError::UntypedActor {
                    subject: subject.to_string(),
                    actor: actor.to_string(),
                });
            }
        } else if stmt.predicate == vocab::sem_has_begin_timestamp() {
            begin = Some(Timestamp::parse(literal_of(stmt)?.lexical())?);
        } else if stmt.predicate == vocab::sem_has_end_timestamp() {
            end = Some(Timestamp::parse(literal_of(stmt)?.lexical())?);
        } else if prop_iris.contains(&stmt.predicate) {
            props.insert(stmt.predicate.clone(), literal_of(stmt)?.clone());
        }
    }
    let begin = begin.ok_or_else(|| ModelError::MissingTimestamp { subject: subject.to_string() })?;
    let interval = Interval::new(begin, end.unwrap_or(begin))?;
    if !interval.is_point() && !kind.allows_period() {
        return Err(ModelError::PeriodNotAllowed {
            subject: subject.to_string(),
            kind: kind.to_string(),
        });
    }
    if patients.is_empty() {
        return Err(ModelError::NoPatientActor { subject: subject.to_string() });
    }
    if patients.len() > 1 {
        return Err(ModelError::MultiplePatientActors {
            subject: subject.to_string(),
            count: patients.len(),
        });
    }
    Ok(MedicalEvent {
        id: subject.clone(),
        kind,
        patient: patients.into_iter().next().expect("checked length"),
        entities,
        interval,
        props,
    })
}

fn literal_of<'a>(stmt: &'a Triple) -> Result<&'a Literal, ModelError> {
    stmt.object.as_literal().ok_or_else(|| ModelError::UnexpectedObject {
        subject: stmt.subject.to_string(),
        predicate: stmt.predicate.to_string(),
    })
}
