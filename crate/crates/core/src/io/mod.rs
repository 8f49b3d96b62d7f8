//! Study files: a shared universe, a design of distinct budgets and one row
//! of choices per subject.
//!
//! JSON is canonical (`"schema": 1`). The CSV dialect has a header
//! `subject,budget,choice` and one row per observed (subject, budget) pair,
//! with budget members joined by `;`.

mod csv_format;
pub mod synthetic;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::altset::{AltSet, MAX_ALTERNATIVES};
use crate::model::{Alternative, ChoiceDataset, ValidationError};

pub use synthetic::{generate_synthetic_study, AttentionRule, Behavior, SyntheticSpec, SyntheticStudy};

pub const SCHEMA_VERSION: u32 = 1;

/// Ten installment bundles from an intertemporal-choice experiment.
pub const INOUE_UNIVERSE_JSON: &str = include_str!("../../data/inoue_universe.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown study format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StudyError {
    #[error("{location}: {message}")]
    Schema { location: String, message: String },
    #[error("subject {subject} ({location}): {source}")]
    Validation {
        subject: String,
        location: String,
        #[source]
        source: ValidationError,
    },
}

fn schema_error(location: impl Into<String>, message: impl Into<String>) -> StudyError {
    StudyError::Schema { location: location.into(), message: message.into() }
}

/// A universe entry is either a bare label or a label with attributes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UniverseEntry {
    Label(String),
    Detailed {
        label: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        attributes: BTreeMap<String, Value>,
    },
}

impl UniverseEntry {
    pub fn label(&self) -> &str {
        match self {
            UniverseEntry::Label(l) => l,
            UniverseEntry::Detailed { label, .. } => label,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubjectRecord {
    pub id: String,
    /// Parallel to the design; `null` marks an unobserved budget.
    pub choices: Vec<Option<String>>,
}

/// The on-disk JSON shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyFile {
    pub schema: u32,
    pub universe: Vec<UniverseEntry>,
    #[serde(default)]
    pub design: Vec<Vec<String>>,
    #[serde(default)]
    pub subjects: Vec<SubjectRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subject {
    pub id: String,
    pub data: ChoiceDataset,
    /// Design position of each observation.
    pub design_index: Vec<usize>,
}

/// A parsed and validated study.
#[derive(Clone, Debug, PartialEq)]
pub struct Study {
    pub universe: Vec<Alternative>,
    /// Opaque per-alternative metadata, indexed by id.
    pub attributes: Vec<BTreeMap<String, Value>>,
    pub design: Vec<AltSet>,
    pub subjects: Vec<Subject>,
}

impl Study {
    pub fn universe_size(&self) -> usize {
        self.universe.len()
    }

    pub fn datasets(&self) -> Vec<ChoiceDataset> {
        self.subjects.iter().map(|s| s.data.clone()).collect()
    }

    pub fn label(&self, id: usize) -> String {
        self.universe[id].display()
    }

    pub fn labels_of(&self, set: AltSet) -> Vec<String> {
        set.iter().map(|a| self.label(a)).collect()
    }

    /// Appends a subject whose observations are `(design index, choice id)`.
    pub fn push_subject(
        &mut self,
        id: impl Into<String>,
        observed: &[(usize, usize)],
    ) -> Result<(), ValidationError> {
        let raw: Vec<(Vec<usize>, usize)> =
            observed.iter().map(|&(j, c)| (self.design[j].to_vec(), c)).collect();
        let data = ChoiceDataset::validate(self.universe.clone(), raw)?;
        let design_index = observed.iter().map(|&(j, _)| j).collect();
        self.subjects.push(Subject { id: id.into(), data, design_index });
        Ok(())
    }

    pub fn to_file(&self) -> StudyFile {
        let universe = self
            .universe
            .iter()
            .zip(&self.attributes)
            .map(|(a, attrs)| {
                if attrs.is_empty() {
                    UniverseEntry::Label(a.display())
                } else {
                    UniverseEntry::Detailed { label: a.display(), attributes: attrs.clone() }
                }
            })
            .collect();
        let design = self.design.iter().map(|b| self.labels_of(*b)).collect();
        let subjects = self
            .subjects
            .iter()
            .map(|s| {
                let mut choices = vec![None; self.design.len()];
                for (i, &j) in s.design_index.iter().enumerate() {
                    choices[j] = Some(self.label(s.data.choice(i)));
                }
                SubjectRecord { id: s.id.clone(), choices }
            })
            .collect();
        StudyFile { schema: SCHEMA_VERSION, universe, design, subjects }
    }

    /// Validates a [`StudyFile`].
    pub fn from_file(file: StudyFile) -> Result<Study, StudyError> {
        if file.schema != SCHEMA_VERSION {
            return Err(schema_error(
                "schema",
                format!("unsupported schema {}, expected {SCHEMA_VERSION}", file.schema),
            ));
        }
        if file.universe.len() > MAX_ALTERNATIVES {
            return Err(schema_error(
                "universe",
                ValidationError::UniverseTooLarge { size: file.universe.len() }.to_string(),
            ));
        }
        let mut lookup = HashMap::new();
        let mut universe = Vec::new();
        let mut attributes = Vec::new();
        for (i, entry) in file.universe.into_iter().enumerate() {
            let label = entry.label().to_string();
            if label.is_empty() {
                return Err(schema_error(format!("universe[{i}]"), "empty label"));
            }
            if lookup.insert(label.clone(), i).is_some() {
                return Err(schema_error(format!("universe[{i}]"), format!("duplicate label `{label}`")));
            }
            universe.push(Alternative::new(i, label));
            attributes.push(match entry {
                UniverseEntry::Label(_) => BTreeMap::new(),
                UniverseEntry::Detailed { attributes, .. } => attributes,
            });
        }
        let mut design = Vec::new();
        let mut seen = HashMap::new();
        for (j, budget) in file.design.iter().enumerate() {
            let mut set = AltSet::EMPTY;
            for label in budget {
                let id = *lookup.get(label).ok_or_else(|| {
                    schema_error(format!("design[{j}]"), format!("unknown alternative `{label}`"))
                })?;
                set.insert(id);
            }
            if set.is_empty() {
                return Err(schema_error(format!("design[{j}]"), "empty budget"));
            }
            if let Some(first) = seen.insert(set, j) {
                return Err(schema_error(
                    format!("design[{j}]"),
                    format!("repeats design[{first}] as a set"),
                ));
            }
            design.push(set);
        }
        let mut study = Study { universe, attributes, design, subjects: Vec::new() };
        for (s, record) in file.subjects.into_iter().enumerate() {
            if record.choices.len() != study.design.len() {
                return Err(schema_error(
                    format!("subjects[{s}].choices"),
                    format!("{} entries for a design of {}", record.choices.len(), study.design.len()),
                ));
            }
            let mut observed = Vec::new();
            for (j, choice) in record.choices.iter().enumerate() {
                let Some(label) = choice else { continue };
                let location = format!("subjects[{s}].choices[{j}]");
                let Some(&c) = lookup.get(label) else {
                    return Err(StudyError::Validation {
                        subject: record.id.clone(),
                        location,
                        source: ValidationError::UnknownAlternative {
                            index: observed.len(),
                            alternative: label.clone(),
                        },
                    });
                };
                observed.push((j, c));
            }
            study.push_subject(record.id.clone(), &observed).map_err(|source| {
                let j = observation_index(&source).map(|i| observed[i].0);
                StudyError::Validation {
                    subject: record.id.clone(),
                    location: match j {
                        Some(j) => format!("subjects[{s}].choices[{j}]"),
                        None => format!("subjects[{s}]"),
                    },
                    source,
                }
            })?;
        }
        Ok(study)
    }
}

pub(crate) fn observation_index(e: &ValidationError) -> Option<usize> {
    match e {
        ValidationError::ChoiceNotInBudget { index, .. }
        | ValidationError::ConflictingDuplicateBudget { index, .. }
        | ValidationError::EmptyBudget { index }
        | ValidationError::UnknownAlternative { index, .. } => Some(*index),
        ValidationError::UniverseTooLarge { .. } | ValidationError::BadUniverse { .. } => None,
    }
}

pub fn parse_study(text: &str, format: Format) -> Result<Study, StudyError> {
    match format {
        Format::Json => {
            let file: StudyFile = serde_json::from_str(text).map_err(|e| {
                schema_error(format!("line {}, column {}", e.line(), e.column()), e.to_string())
            })?;
            Study::from_file(file)
        }
        Format::Csv => csv_format::parse(text),
    }
}

pub fn serialize_study(study: &Study, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&study.to_file()).expect("study serializes");
            s.push('\n');
            s
        }
        Format::Csv => csv_format::write(study),
    }
}

/// The bundled installment universe as a study with no design and no subjects.
pub fn inoue_universe() -> Study {
    parse_study(INOUE_UNIVERSE_JSON, Format::Json).expect("bundled universe is valid")
}

/// Wraps one dataset as a single-subject study whose design is its budgets.
pub fn study_from_dataset(id: &str, data: &ChoiceDataset) -> Study {
    Study {
        universe: data.universe().to_vec(),
        attributes: vec![BTreeMap::new(); data.universe_size()],
        design: data.observations().iter().map(|o| o.budget.members()).collect(),
        subjects: vec![Subject {
            id: id.to_string(),
            data: data.clone(),
            design_index: (0..data.len()).collect(),
        }],
    }
}
