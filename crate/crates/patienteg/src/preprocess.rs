//! Raw EMR table cleaning: qualitative-value normalization, unit
//! standardization, multi-value cell splitting, and the missing-value
//! policy. Everything is driven by a JSON normalization config so the
//! cleaning rules stay auditable.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::decimal::{Decimal, DecimalError};

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("normalization config: {0}")]
    ConfigParse(#[from] serde_json::Error),
    #[error("normalization config: {0}")]
    ConfigValidation(String),
    #[error("no table policy configured for table {0:?}")]
    MissingTablePolicy(String),
    #[error("table {table}, row {row}: expected {expected} cells, got {got}")]
    RowLength { table: String, row: usize, expected: usize, got: usize },
    #[error("table {table}, row {row}, column {column}: {value:?} is not a number but a unit conversion applies")]
    MalformedNumber { table: String, row: usize, column: String, value: String },
    #[error("table {table}, row {row}, column {column}: {source}")]
    Numeric { table: String, row: usize, column: String, source: DecimalError },
}

/// One relational source table held as strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RecordTable {
    pub fn new(
        name: impl Into<String>,
        columns: Vec<String>,
        rows: Vec<Vec<String>>,
    ) -> Result<RecordTable, PreprocessError> {
        let name = name.into();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(PreprocessError::RowLength {
                    table: name,
                    row: i,
                    expected: columns.len(),
                    got: row.len(),
                });
            }
        }
        Ok(RecordTable { name, columns, rows })
    }

    pub fn column_index(&self, column: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == column)
    }

    pub fn from_csv_path(name: &str, path: &Path) -> Result<RecordTable, PreprocessError> {
        let mut reader = csv::Reader::from_path(path)?;
        let columns: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            rows.push(record?.iter().map(str::to_string).collect());
        }
        RecordTable::new(name, columns, rows)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), PreprocessError> {
        let mut writer = csv::Writer::from_path(path)?;
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingPolicy {
    DropRow,
    KeepEmpty,
}

/// Which value column a unit conversion reads alongside its quantity and
/// unit columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitColumns {
    pub quantity: String,
    pub value: String,
    pub unit: String,
}

/// Per-table cleaning policy.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TablePolicy {
    pub required: Vec<String>,
    pub multi_value: Vec<String>,
    pub qualitative: Vec<String>,
    pub unit: Option<UnitColumns>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitRule {
    pub target: String,
    pub factor: Decimal,
}

#[derive(Debug, Clone)]
pub struct NormalizationConfig {
    qualitative: BTreeMap<String, String>,
    units: BTreeMap<(String, String), UnitRule>,
    delimiters: Vec<char>,
    pub missing: MissingPolicy,
    pub table_policies: BTreeMap<String, TablePolicy>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    qualitative: BTreeMap<String, String>,
    #[serde(default)]
    units: Vec<RawUnit>,
    #[serde(default)]
    delimiters: Vec<String>,
    missing: String,
    #[serde(default)]
    table_policies: BTreeMap<String, RawPolicy>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUnit {
    quantity: String,
    unit: String,
    target: String,
    factor: String,
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawPolicy {
    #[serde(default)]
    required: Vec<String>,
    #[serde(default)]
    multi_value: Vec<String>,
    #[serde(default)]
    qualitative: Vec<String>,
    #[serde(default)]
    unit: Option<RawUnitColumns>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUnitColumns {
    quantity: String,
    value: String,
    unit: String,
}

/// Fold a cell for qualitative lookup: trim, fullwidth parentheses to
/// ASCII, whitespace runs to a single space.
fn fold_qualitative(cell: &str) -> String {
    let mut out = String::with_capacity(cell.len());
    let mut pending_space = false;
    for c in cell.trim().chars() {
        let c = match c {
            '（' => '(',
            '）' => ')',
            c => c,
        };
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space && !out.is_empty() {
            out.push(' ');
        }
        pending_space = false;
        out.push(c);
    }
    out
}

impl NormalizationConfig {
    pub fn load(path: &Path) -> Result<NormalizationConfig, PreprocessError> {
        let text = fs::read_to_string(path)?;
        let raw: RawConfig = serde_json::from_str(&text)?;
        NormalizationConfig::from_raw(raw)
    }

    pub fn from_json(text: &str) -> Result<NormalizationConfig, PreprocessError> {
        NormalizationConfig::from_raw(serde_json::from_str(text)?)
    }

    fn from_raw(raw: RawConfig) -> Result<NormalizationConfig, PreprocessError> {
        let invalid = |msg: String| PreprocessError::ConfigValidation(msg);

        let mut qualitative = BTreeMap::new();
        for (key, value) in &raw.qualitative {
            qualitative.insert(fold_qualitative(key), value.clone());
        }
        let canonical: BTreeSet<&String> = qualitative.values().collect();
        if !qualitative.is_empty() {
            for need in ["positive", "negative"] {
                if !canonical.iter().any(|v| *v == need) {
                    return Err(invalid(format!(
                        "qualitative canonical set must include {need:?}"
                    )));
                }
            }
        }
        for value in &canonical {
            if let Some(mapped) = qualitative.get(*value) {
                if mapped != *value {
                    return Err(invalid(format!(
                        "canonical value {value:?} re-maps to {mapped:?}; normalization would not be idempotent"
                    )));
                }
            }
        }

        let mut units = BTreeMap::new();
        for u in &raw.units {
            let factor = Decimal::parse(&u.factor).map_err(|e| {
                invalid(format!("unit factor for ({}, {}): {e}", u.quantity, u.unit))
            })?;
            if factor.is_negative() || factor.is_zero() {
                return Err(invalid(format!(
                    "unit factor for ({}, {}) must be strictly positive",
                    u.quantity, u.unit
                )));
            }
            let key = (u.quantity.trim().to_string(), u.unit.trim().to_string());
            if units
                .insert(key, UnitRule { target: u.target.trim().to_string(), factor })
                .is_some()
            {
                return Err(invalid(format!(
                    "duplicate unit rule for ({}, {})",
                    u.quantity, u.unit
                )));
            }
        }
        let one = Decimal::parse("1").expect("literal");
        for ((quantity, _), rule) in &units {
            if let Some(next) = units.get(&(quantity.clone(), rule.target.clone())) {
                let identity = next.target == rule.target && next.factor == one;
                if !identity {
                    return Err(invalid(format!(
                        "unit rule for ({quantity}, {}) would re-convert the target unit; conversion must be idempotent",
                        rule.target
                    )));
                }
            }
        }

        let mut delimiters = Vec::new();
        for d in &raw.delimiters {
            let mut chars = d.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => delimiters.push(c),
                _ => return Err(invalid(format!("delimiter {d:?} must be one character"))),
            }
        }

        let missing = match raw.missing.as_str() {
            "dropRow" => MissingPolicy::DropRow,
            "keepEmpty" => MissingPolicy::KeepEmpty,
            other => return Err(invalid(format!("unknown missing policy {other:?}"))),
        };

        let mut table_policies = BTreeMap::new();
        for (table, p) in raw.table_policies {
            table_policies.insert(
                table,
                TablePolicy {
                    required: p.required,
                    multi_value: p.multi_value,
                    qualitative: p.qualitative,
                    unit: p.unit.map(|u| UnitColumns {
                        quantity: u.quantity,
                        value: u.value,
                        unit: u.unit,
                    }),
                },
            );
        }

        Ok(NormalizationConfig { qualitative, units, delimiters, missing, table_policies })
    }

    pub fn unit_rule(&self, quantity: &str, unit: &str) -> Option<&UnitRule> {
        self.units.get(&(quantity.trim().to_string(), unit.trim().to_string()))
    }
}

/// Map a qualitative surface form to its canonical value; unmapped cells
/// come back trimmed but otherwise unchanged.
pub fn normalize_qualitative(cell: &str, config: &NormalizationConfig) -> String {
    let folded = fold_qualitative(cell);
    match config.qualitative.get(&folded) {
        Some(canonical) => canonical.clone(),
        None => cell.trim().to_string(),
    }
}

/// Convert a measured value to the configured target unit; unconfigured
/// (quantity, unit) pairs pass through unchanged.
pub fn convert_unit(
    value: Decimal,
    quantity: &str,
    unit: &str,
    config: &NormalizationConfig,
) -> Result<(Decimal, String), DecimalError> {
    match config.unit_rule(quantity, unit) {
        Some(rule) => Ok((value.mul(rule.factor)?, rule.target.clone())),
        None => Ok((value, unit.trim().to_string())),
    }
}

/// Split a multi-value cell on the configured delimiters, trimming each
/// piece and dropping empties; source order is preserved.
pub fn split_multivalue(cell: &str, config: &NormalizationConfig) -> Vec<String> {
    cell.split(|c: char| config.delimiters.contains(&c))
        .map(str::trim)
        .filter(|piece| !piece.is_empty())
        .map(str::to_string)
        .collect()
}

/// Clean one table under its configured policy: trim, normalize
/// qualitative columns, convert units, explode multi-value columns, and
/// apply the missing-value policy. Row order is stable.
pub fn preprocess_table(
    table: &RecordTable,
    config: &NormalizationConfig,
) -> Result<RecordTable, PreprocessError> {
    let policy = config
        .table_policies
        .get(&table.name)
        .ok_or_else(|| PreprocessError::MissingTablePolicy(table.name.clone()))?;

    let col = |name: &str| -> Result<usize, PreprocessError> {
        table.column_index(name).ok_or_else(|| {
            PreprocessError::ConfigValidation(format!(
                "table {:?} has no column {name:?} named by its policy",
                table.name
            ))
        })
    };
    let required: Vec<usize> = policy.required.iter().map(|c| col(c)).collect::<Result<_, _>>()?;
    let multi: Vec<usize> = policy.multi_value.iter().map(|c| col(c)).collect::<Result<_, _>>()?;
    let qualitative: Vec<usize> =
        policy.qualitative.iter().map(|c| col(c)).collect::<Result<_, _>>()?;
    let unit_cols = match &policy.unit {
        Some(u) => Some((col(&u.quantity)?, col(&u.value)?, col(&u.unit)?)),
        None => None,
    };

    let mut out_rows = Vec::with_capacity(table.rows.len());
    for (row_idx, row) in table.rows.iter().enumerate() {
        let mut row: Vec<String> = row.iter().map(|c| c.trim().to_string()).collect();
        for &i in &qualitative {
            row[i] = normalize_qualitative(&row[i], config);
        }
        if let Some((qi, vi, ui)) = unit_cols {
            if let Some(rule) = config.unit_rule(&row[qi], &row[ui]) {
                let value = Decimal::parse(&row[vi]).map_err(|_| {
                    PreprocessError::MalformedNumber {
                        table: table.name.clone(),
                        row: row_idx,
                        column: table.columns[vi].clone(),
                        value: row[vi].clone(),
                    }
                })?;
                let converted = value.mul(rule.factor).map_err(|e| PreprocessError::Numeric {
                    table: table.name.clone(),
                    row: row_idx,
                    column: table.columns[vi].clone(),
                    source: e,
                })?;
                row[vi] = converted.to_string();
                row[ui] = rule.target.clone();
            }
        }

        let mut exploded = vec![row];
        for &i in &multi {
            let mut next = Vec::with_capacity(exploded.len());
            for row in exploded {
                let pieces = split_multivalue(&row[i], config);
                if pieces.is_empty() {
                    let mut kept = row.clone();
                    kept[i] = String::new();
                    next.push(kept);
                } else {
                    for piece in pieces {
                        let mut copy = row.clone();
                        copy[i] = piece;
                        next.push(copy);
                    }
                }
            }
            exploded = next;
        }

        for row in exploded {
            let missing_required = required.iter().any(|&i| row[i].is_empty());
            if missing_required && config.missing == MissingPolicy::DropRow {
                continue;
            }
            out_rows.push(row);
        }
    }

    RecordTable::new(table.name.clone(), table.columns.clone(), out_rows)
}
