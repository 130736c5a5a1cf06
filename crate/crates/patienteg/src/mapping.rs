//! Declarative row-to-triples mapping: each table row becomes one subject
//! with a type triple plus one triple per mapped, non-empty cell. Entity
//! name cells go through a deterministic registry that mints resource ids
//! on first occurrence.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Datatype, EntityKind, Iri, Literal, MedicalEntity, ModelError, Term, Timestamp, Triple,
};
use crate::preprocess::RecordTable;
use crate::vocab::Prefix;

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("mapping config: {0}")]
    ConfigParse(#[from] serde_json::Error),
    #[error("mapping config: {0}")]
    ConfigValidation(String),
    #[error("table {table}, row {row}: required column {column:?} is empty")]
    MissingRequiredCell { table: String, row: usize, column: String },
    #[error("table {table}: primary key {pk:?} appears in conflicting rows")]
    DuplicatePrimaryKey { table: String, pk: String },
    #[error("table {table}, row {row}, column {column}: {source}")]
    CellValue { table: String, row: usize, column: String, source: ModelError },
    #[error("registry file: {0}")]
    RegistryFormat(String),
}

/// How a mapped cell becomes an object term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectKind {
    /// The cell text as a literal. `Temporal` auto-types day-granular
    /// cells as date and others as dateTime.
    Literal(LiteralShape),
    /// The cell holds another table's primary key.
    ResourceRef,
    /// The cell holds an entity name resolved through the registry.
    EntityRef(EntityKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiteralShape {
    Plain,
    Fixed(Datatype),
    Temporal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateObjectMap {
    pub column: String,
    pub predicate: Iri,
    pub object_kind: ObjectKind,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplesMap {
    pub table: String,
    pub subject_column: String,
    pub type_iri: Iri,
    pub pom: Vec<PredicateObjectMap>,
}

#[derive(Debug, Clone)]
pub struct MappingConfig {
    pub maps: Vec<TriplesMap>,
    pub entity_id_start: u64,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawMappingConfig {
    #[serde(default = "default_entity_id_start")]
    entity_id_start: u64,
    maps: Vec<RawMap>,
}

fn default_entity_id_start() -> u64 {
    1_000_000
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawMap {
    table: String,
    subject_column: String,
    #[serde(rename = "type")]
    type_name: String,
    predicate_object_maps: Vec<RawPom>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawPom {
    column: String,
    predicate: String,
    object_kind: String,
    #[serde(default)]
    datatype: Option<String>,
    #[serde(default)]
    entity_kind: Option<String>,
    #[serde(default)]
    required: bool,
}

pub fn load_mapping_config(path: &Path) -> Result<MappingConfig, MappingError> {
    mapping_config_from_json(&fs::read_to_string(path)?)
}

pub fn mapping_config_from_json(text: &str) -> Result<MappingConfig, MappingError> {
    let raw: RawMappingConfig = serde_json::from_str(text)?;
    let invalid = |msg: String| MappingError::ConfigValidation(msg);
    if raw.maps.is_empty() {
        return Err(invalid("maps list is empty".into()));
    }
    let mut maps = Vec::with_capacity(raw.maps.len());
    let mut seen_tables = BTreeMap::new();
    for m in &raw.maps {
        if seen_tables.insert(m.table.clone(), ()).is_some() {
            return Err(invalid(format!("table {:?} has more than one map", m.table)));
        }
        let type_iri = Iri::parse_prefixed(&m.type_name)
            .ok_or_else(|| invalid(format!("map {:?}: bad type IRI {:?}", m.table, m.type_name)))?;
        if type_iri.prefix() != Prefix::PegO {
            return Err(invalid(format!(
                "map {:?}: type {} is not an ontology class",
                m.table, type_iri
            )));
        }
        let mut pom = Vec::with_capacity(m.predicate_object_maps.len());
        for p in &m.predicate_object_maps {
            let predicate = Iri::parse_prefixed(&p.predicate).ok_or_else(|| {
                invalid(format!("map {:?}, column {:?}: bad predicate {:?}", m.table, p.column, p.predicate))
            })?;
            if !predicate.prefix().is_vocabulary() {
                return Err(invalid(format!(
                    "map {:?}, column {:?}: predicate {} is in the resource namespace",
                    m.table, p.column, predicate
                )));
            }
            let object_kind = match p.object_kind.as_str() {
                "literal" => {
                    let shape = match p.datatype.as_deref() {
                        None | Some("string") => LiteralShape::Plain,
                        Some("temporal") => LiteralShape::Temporal,
                        Some("date") => LiteralShape::Fixed(Datatype::Date),
                        Some("dateTime") => LiteralShape::Fixed(Datatype::DateTime),
                        Some("integer") => LiteralShape::Fixed(Datatype::Integer),
                        Some("decimal") => LiteralShape::Fixed(Datatype::Decimal),
                        Some(other) => {
                            return Err(invalid(format!(
                                "map {:?}, column {:?}: unknown datatype {other:?}",
                                m.table, p.column
                            )))
                        }
                    };
                    ObjectKind::Literal(shape)
                }
                "resourceRef" => ObjectKind::ResourceRef,
                "entityRef" => {
                    let kind_name = p.entity_kind.as_deref().ok_or_else(|| {
                        invalid(format!(
                            "map {:?}, column {:?}: entityRef needs an entityKind",
                            m.table, p.column
                        ))
                    })?;
                    let kind = EntityKind::from_name(kind_name).ok_or_else(|| {
                        invalid(format!(
                            "map {:?}, column {:?}: unknown entityKind {kind_name:?}",
                            m.table, p.column
                        ))
                    })?;
                    ObjectKind::EntityRef(kind)
                }
                other => {
                    return Err(invalid(format!(
                        "map {:?}, column {:?}: unknown objectKind {other:?}",
                        m.table, p.column
                    )))
                }
            };
            if p.entity_kind.is_some() && !matches!(object_kind, ObjectKind::EntityRef(_)) {
                return Err(invalid(format!(
                    "map {:?}, column {:?}: entityKind is only valid with entityRef",
                    m.table, p.column
                )));
            }
            pom.push(PredicateObjectMap {
                column: p.column.clone(),
                predicate,
                object_kind,
                required: p.required,
            });
        }
        maps.push(TriplesMap {
            table: m.table.clone(),
            subject_column: m.subject_column.clone(),
            type_iri,
            pom,
        });
    }
    Ok(MappingConfig { maps, entity_id_start: raw.entity_id_start })
}

impl TriplesMap {
    /// Check the map's columns against an actual table.
    pub fn validate_columns(&self, table: &RecordTable) -> Result<(), MappingError> {
        if table.name != self.table {
            return Err(MappingError::ConfigValidation(format!(
                "map {:?} applied to table {:?}",
                self.table, table.name
            )));
        }
        let check = |column: &str| {
            table.column_index(column).map(|_| ()).ok_or_else(|| {
                MappingError::ConfigValidation(format!(
                    "map {:?}: column {column:?} is not in the table",
                    self.table
                ))
            })
        };
        check(&self.subject_column)?;
        for p in &self.pom {
            check(&p.column)?;
        }
        Ok(())
    }
}

/// Deterministic label→resource-id registry. The first occurrence of a
/// (kind, label) pair mints the next counter value; reruns loading the
/// persisted registry keep every id stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityRegistry {
    next_id: u64,
    entries: BTreeMap<(EntityKind, String), String>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RegistryFile {
    next_id: u64,
    entries: Vec<RegistryEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryEntry {
    kind: String,
    id: String,
    label: String,
}

impl EntityRegistry {
    pub fn new(start_id: u64) -> EntityRegistry {
        EntityRegistry { next_id: start_id, entries: BTreeMap::new() }
    }

    /// The resource for a normalized label, minting a fresh id on first
    /// sight.
    pub fn resolve(&mut self, kind: EntityKind, label: &str) -> Iri {
        let key = (kind, label.to_string());
        let id = self.entries.entry(key).or_insert_with(|| {
            let id = self.next_id.to_string();
            self.next_id += 1;
            id
        });
        Iri::resource(id)
    }

    pub fn lookup(&self, kind: EntityKind, label: &str) -> Option<Iri> {
        self.entries.get(&(kind, label.to_string())).map(|id| Iri::resource(id))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All registered entities, ordered by (kind, label).
    pub fn entities(&self) -> Vec<MedicalEntity> {
        self.entries
            .iter()
            .map(|((kind, label), id)| MedicalEntity {
                id: Iri::resource(id),
                kind: *kind,
                label: label.clone(),
            })
            .collect()
    }

    /// Type and label triples for every registered entity.
    pub fn entity_triples(&self) -> Vec<Triple> {
        self.entities().iter().flat_map(crate::model::entity_to_triples).collect()
    }

    pub fn to_json(&self) -> String {
        let file = RegistryFile {
            next_id: self.next_id,
            entries: self
                .entries
                .iter()
                .map(|((kind, label), id)| RegistryEntry {
                    kind: kind.name().to_string(),
                    id: id.clone(),
                    label: label.clone(),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("registry serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<EntityRegistry, MappingError> {
        let file: RegistryFile = serde_json::from_str(text)?;
        let mut entries = BTreeMap::new();
        let mut ids = BTreeMap::new();
        for e in &file.entries {
            let kind = EntityKind::from_name(&e.kind).ok_or_else(|| {
                MappingError::RegistryFormat(format!("unknown entity kind {:?}", e.kind))
            })?;
            if entries.insert((kind, e.label.clone()), e.id.clone()).is_some() {
                return Err(MappingError::RegistryFormat(format!(
                    "duplicate entry for {} {:?}",
                    e.kind, e.label
                )));
            }
            if ids.insert(e.id.clone(), ()).is_some() {
                return Err(MappingError::RegistryFormat(format!("duplicate id {:?}", e.id)));
            }
            if let Ok(numeric) = e.id.parse::<u64>() {
                if numeric >= file.next_id {
                    return Err(MappingError::RegistryFormat(format!(
                        "id {:?} is not below nextId {}",
                        e.id, file.next_id
                    )));
                }
            }
        }
        Ok(EntityRegistry { next_id: file.next_id, entries })
    }

    pub fn save(&self, path: &Path) -> Result<(), MappingError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<EntityRegistry, MappingError> {
        EntityRegistry::from_json(&fs::read_to_string(path)?)
    }
}

/// Map every row of a preprocessed table to triples: a type triple plus
/// one triple per mapped non-empty cell, in row then map order. Rows may
/// share a primary key only when they differ solely in entity-name cells
/// (the result of multi-value explosion); any other collision is an error.
pub fn apply_triples_map(
    table: &RecordTable,
    map: &TriplesMap,
    registry: &mut EntityRegistry,
) -> Result<Vec<Triple>, MappingError> {
    map.validate_columns(table)?;
    let subject_idx = table.column_index(&map.subject_column).expect("validated");
    let pom_idx: Vec<usize> = map
        .pom
        .iter()
        .map(|p| table.column_index(&p.column).expect("validated"))
        .collect();
    let entity_cols: Vec<usize> = map
        .pom
        .iter()
        .zip(&pom_idx)
        .filter(|(p, _)| matches!(p.object_kind, ObjectKind::EntityRef(_)))
        .map(|(_, &i)| i)
        .collect();

    let mut out = Vec::new();
    let mut seen_pk: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (row_idx, row) in table.rows.iter().enumerate() {
        let pk = row[subject_idx].trim();
        if pk.is_empty() {
            return Err(MappingError::MissingRequiredCell {
                table: table.name.clone(),
                row: row_idx,
                column: map.subject_column.clone(),
            });
        }
        // Two rows sharing a pk must agree everywhere outside exploded
        // entity columns; they then describe one subject with several
        // participating entities.
        let fingerprint: Vec<String> = row
            .iter()
            .enumerate()
            .filter(|(i, _)| !entity_cols.contains(i))
            .map(|(_, cell)| cell.clone())
            .collect();
        match seen_pk.get(pk) {
            Some(prev) if *prev != fingerprint => {
                return Err(MappingError::DuplicatePrimaryKey {
                    table: table.name.clone(),
                    pk: pk.to_string(),
                });
            }
            Some(_) => {}
            None => {
                seen_pk.insert(pk.to_string(), fingerprint);
            }
        }

        let subject = Iri::resource(pk);
        out.push(
            Triple::new(subject.clone(), crate::vocab::rdf_type(), map.type_iri.clone())
                .expect("rdf:type is vocabulary"),
        );
        for (p, &idx) in map.pom.iter().zip(&pom_idx) {
            let cell = row[idx].trim();
            if cell.is_empty() {
                if p.required {
                    return Err(MappingError::MissingRequiredCell {
                        table: table.name.clone(),
                        row: row_idx,
                        column: p.column.clone(),
                    });
                }
                continue;
            }
            let object: Term = match &p.object_kind {
                ObjectKind::Literal(LiteralShape::Plain) => Literal::string(cell).into(),
                ObjectKind::Literal(LiteralShape::Fixed(dt)) => Literal::typed(cell, *dt)
                    .map_err(|source| MappingError::CellValue {
                        table: table.name.clone(),
                        row: row_idx,
                        column: p.column.clone(),
                        source,
                    })?
                    .into(),
                ObjectKind::Literal(LiteralShape::Temporal) => Timestamp::parse(cell)
                    .map_err(|source| MappingError::CellValue {
                        table: table.name.clone(),
                        row: row_idx,
                        column: p.column.clone(),
                        source,
                    })?
                    .literal()
                    .into(),
                ObjectKind::ResourceRef => Iri::resource(cell).into(),
                ObjectKind::EntityRef(kind) => registry.resolve(*kind, cell).into(),
            };
            out.push(
                Triple::new(subject.clone(), p.predicate.clone(), object)
                    .expect("predicate validated at load"),
            );
        }
    }
    Ok(out)
}

/// The closed-form triple count apply_triples_map must produce for a
/// table: per row, one type triple plus one per non-empty mapped cell.
pub fn expected_triple_count(table: &RecordTable, map: &TriplesMap) -> usize {
    let pom_idx: Vec<usize> = map
        .pom
        .iter()
        .filter_map(|p| table.column_index(&p.column))
        .collect();
    table
        .rows
        .iter()
        .map(|row| 1 + pom_idx.iter().filter(|&&i| !row[i].trim().is_empty()).count())
        .sum()
}
