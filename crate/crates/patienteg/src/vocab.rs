//! Fixed namespace table and the closed vocabulary of the event graph.
//!
//! Every IRI the toolkit emits lives under one of six namespaces. The table
//! is immutable; there is no mechanism for registering further prefixes.

use crate::model::{EntityKind, EventKind, Iri, RelationKind};

/// Namespace tag. Resolves to exactly one absolute base URI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prefix {
    /// Ontology vocabulary (`peg-o`).
    PegO,
    /// Resource identifiers (`peg-r`).
    PegR,
    /// Simple Event Model (`sem`).
    Sem,
    Rdf,
    Rdfs,
    Skos,
}

impl Prefix {
    /// All prefixes, in table order.
    pub const ALL: [Prefix; 6] = [
        Prefix::PegO,
        Prefix::PegR,
        Prefix::Sem,
        Prefix::Rdf,
        Prefix::Rdfs,
        Prefix::Skos,
    ];

    /// The absolute base URI this prefix expands to.
    pub fn base(self) -> &'static str {
        match self {
            Prefix::PegO => "http://peg.ecustnlplab.com/ontology#",
            Prefix::PegR => "http://peg.ecustnlplab.com/resource/",
            Prefix::Sem => "https://semanticweb.cs.vu.nl/2009/11/sem/",
            Prefix::Rdf => "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
            Prefix::Rdfs => "http://www.w3.org/2000/01/rdf-schema#",
            Prefix::Skos => "http://www.w3.org/2004/02/skos/core#",
        }
    }

    /// The short label used in prefixed names ("peg-o", "sem", ...).
    pub fn label(self) -> &'static str {
        match self {
            Prefix::PegO => "peg-o",
            Prefix::PegR => "peg-r",
            Prefix::Sem => "sem",
            Prefix::Rdf => "rdf",
            Prefix::Rdfs => "rdfs",
            Prefix::Skos => "skos",
        }
    }

    /// Look a prefix up by its short label.
    pub fn from_label(label: &str) -> Option<Prefix> {
        Prefix::ALL.iter().copied().find(|p| p.label() == label)
    }

    /// Whether this namespace holds vocabulary terms (anything but `peg-r`).
    pub fn is_vocabulary(self) -> bool {
        !matches!(self, Prefix::PegR)
    }
}

pub fn rdf_type() -> Iri {
    Iri::vocab(Prefix::Rdf, "type")
}

pub fn rdfs_label() -> Iri {
    Iri::vocab(Prefix::Rdfs, "label")
}

pub fn skos_exact_match() -> Iri {
    Iri::vocab(Prefix::Skos, "exactMatch")
}

pub fn sem_has_actor() -> Iri {
    Iri::vocab(Prefix::Sem, "hasActor")
}

pub fn sem_has_begin_timestamp() -> Iri {
    Iri::vocab(Prefix::Sem, "hasBeginTimeStamp")
}

pub fn sem_has_end_timestamp() -> Iri {
    Iri::vocab(Prefix::Sem, "hasEndTimeStamp")
}

pub fn peg_gender() -> Iri {
    Iri::vocab(Prefix::PegO, "gender")
}

pub fn peg_birthday() -> Iri {
    Iri::vocab(Prefix::PegO, "birthday")
}

pub fn peg_situation() -> Iri {
    Iri::vocab(Prefix::PegO, "situation")
}

pub fn peg_assay_result() -> Iri {
    Iri::vocab(Prefix::PegO, "assayResult")
}

pub fn peg_assay_prompt() -> Iri {
    Iri::vocab(Prefix::PegO, "assayPrompt")
}

pub fn patient_class() -> Iri {
    Iri::vocab(Prefix::PegO, "Patient")
}

/// The `peg-o` class for a medical entity kind.
pub fn entity_class(kind: EntityKind) -> Iri {
    let local = match kind {
        EntityKind::Disease => "Disease",
        EntityKind::Drug => "Drug",
        EntityKind::Assay => "Assay",
        EntityKind::Surgery => "Surgery",
    };
    Iri::vocab(Prefix::PegO, local)
}

/// The `peg-o` class for a medical event kind.
pub fn event_class(kind: EventKind) -> Iri {
    let local = match kind {
        EventKind::Hospitalization => "HospitalizationEvent",
        EventKind::Diagnosis => "DiagnosisEvent",
        EventKind::Drug => "DrugEvent",
        EventKind::Assay => "AssayEvent",
        EventKind::Surgery => "SurgeryEvent",
    };
    Iri::vocab(Prefix::PegO, local)
}

/// The `peg-o` predicate carrying a temporal relation edge.
pub fn relation_predicate(rel: RelationKind) -> Iri {
    let local = match rel {
        RelationKind::Before => "Before",
        RelationKind::After => "After",
        RelationKind::Concurrent => "Concurrent",
        RelationKind::During => "During",
        RelationKind::Overlap => "Overlap",
    };
    Iri::vocab(Prefix::PegO, local)
}

/// Event properties that may appear in `MedicalEvent::props`.
pub fn event_property_iris() -> [Iri; 3] {
    [peg_situation(), peg_assay_result(), peg_assay_prompt()]
}

/// Membership test for the closed vocabulary: every IRI the toolkit emits
/// outside `peg-r` must be in this set.
pub fn is_vocabulary_iri(iri: &Iri) -> bool {
    if iri.prefix() == Prefix::PegR {
        return false;
    }
    let local = iri.local();
    match iri.prefix() {
        Prefix::Rdf => local == "type",
        Prefix::Rdfs => local == "label",
        Prefix::Skos => local == "exactMatch",
        Prefix::Sem => matches!(
            local,
            "hasActor" | "hasBeginTimeStamp" | "hasEndTimeStamp" | "Event" | "Actor" | "Object"
        ),
        Prefix::PegO => matches!(
            local,
            "Patient"
                | "Disease"
                | "Drug"
                | "Assay"
                | "Surgery"
                | "HospitalizationEvent"
                | "DiagnosisEvent"
                | "DrugEvent"
                | "AssayEvent"
                | "SurgeryEvent"
                | "gender"
                | "birthday"
                | "situation"
                | "assayResult"
                | "assayPrompt"
                | "Before"
                | "After"
                | "Concurrent"
                | "During"
                | "Overlap"
        ),
        Prefix::PegR => false,
    }
}
