use std::collections::{BTreeMap, HashMap};

use super::{observation_index, schema_error, Study, StudyError};
use crate::altset::{AltSet, MAX_ALTERNATIVES};
use crate::model::{Alternative, ValidationError};

const HEADER: [&str; 3] = ["subject", "budget", "choice"];

struct Row {
    line: u64,
    subject: String,
    budget: Vec<String>,
    choice: String,
}

fn read_rows(text: &str) -> Result<Vec<Row>, StudyError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| schema_error("line 1", e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(schema_error("line 1", format!("header must be `{}`", HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            schema_error(format!("line {line}"), e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize, name: &str| {
            let v = record.get(i).unwrap_or("");
            if v.is_empty() {
                Err(schema_error(format!("line {line}"), format!("empty `{name}` field")))
            } else {
                Ok(v.to_string())
            }
        };
        let subject = field(0, "subject")?;
        let budget: Vec<String> = field(1, "budget")?.split(';').map(|s| s.trim().to_string()).collect();
        if budget.iter().any(String::is_empty) {
            return Err(schema_error(format!("line {line}"), "empty label in budget"));
        }
        let choice = field(2, "choice")?;
        rows.push(Row { line, subject, budget, choice });
    }
    Ok(rows)
}

pub(super) fn parse(text: &str) -> Result<Study, StudyError> {
    let rows = read_rows(text)?;
    let mut lookup: HashMap<String, usize> = HashMap::new();
    let mut universe = Vec::new();
    for row in &rows {
        for label in row.budget.iter().chain(std::iter::once(&row.choice)) {
            if !lookup.contains_key(label) {
                if universe.len() == MAX_ALTERNATIVES {
                    return Err(schema_error(
                        format!("line {}", row.line),
                        ValidationError::UniverseTooLarge { size: MAX_ALTERNATIVES + 1 }.to_string(),
                    ));
                }
                lookup.insert(label.clone(), universe.len());
                universe.push(Alternative::new(universe.len(), label.clone()));
            }
        }
    }
    let mut design: Vec<AltSet> = Vec::new();
    let mut design_of: HashMap<AltSet, usize> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut per_subject: HashMap<String, Vec<(usize, usize, u64)>> = HashMap::new();
    for row in &rows {
        let set: AltSet = row.budget.iter().map(|l| lookup[l]).collect();
        let j = *design_of.entry(set).or_insert_with(|| {
            design.push(set);
            design.len() - 1
        });
        if !per_subject.contains_key(&row.subject) {
            order.push(row.subject.clone());
        }
        per_subject.entry(row.subject.clone()).or_default().push((j, lookup[&row.choice], row.line));
    }
    let n = universe.len();
    let mut study = Study { universe, attributes: vec![BTreeMap::new(); n], design, subjects: Vec::new() };
    for id in order {
        let mut observed: Vec<(usize, usize)> = Vec::new();
        let mut lines = Vec::new();
        let mut first: HashMap<usize, usize> = HashMap::new();
        for (j, c, line) in per_subject.remove(&id).unwrap() {
            if let Some(&prev) = first.get(&j) {
                if observed[prev].1 != c {
                    return Err(StudyError::Validation {
                        subject: id,
                        location: format!("line {line}"),
                        source: ValidationError::ConflictingDuplicateBudget {
                            index: observed.len(),
                            first: prev,
                        },
                    });
                }
                continue;
            }
            first.insert(j, observed.len());
            observed.push((j, c));
            lines.push(line);
        }
        study.push_subject(id.clone(), &observed).map_err(|source| StudyError::Validation {
            subject: id.clone(),
            location: match observation_index(&source) {
                Some(i) => format!("line {}", lines[i]),
                None => "header".to_string(),
            },
            source,
        })?;
    }
    Ok(study)
}

pub(super) fn write(study: &Study) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for s in &study.subjects {
        let mut rows: Vec<(usize, usize)> =
            s.design_index.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        rows.sort_unstable();
        for (j, i) in rows {
            let budget = study.labels_of(study.design[j]).join(";");
            w.write_record([s.id.as_str(), &budget, &study.label(s.data.choice(i))])
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("labels are UTF-8")
}

#[cfg(test)]
mod tests {
    use super::super::{parse_study, Format};
    use super::*;

    #[test]
    fn parses_rows_in_order() {
        let text = "subject,budget,choice\ns1,x;z,x\ns1,x;y;w,x\ns1,y;w,y\ns2,x;z,z\n";
        let s = parse_study(text, Format::Csv).unwrap();
        assert_eq!(s.universe_size(), 4);
        assert_eq!(s.design.len(), 3);
        assert_eq!(s.subjects.len(), 2);
        assert_eq!(s.subjects[1].design_index, vec![0]);
    }

    #[test]
    fn choice_outside_budget_reports_the_row() {
        let text = "subject,budget,choice\ns1,a;b,a\ns1,b;c,a\n";
        match parse_study(text, Format::Csv) {
            Err(StudyError::Validation { location, source, .. }) => {
                assert_eq!(location, "line 3");
                assert!(matches!(source, ValidationError::ChoiceNotInBudget { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicates() {
        let same = "subject,budget,choice\ns,a;b,a\ns,b;a,a\n";
        assert_eq!(parse_study(same, Format::Csv).unwrap().subjects[0].data.len(), 1);
        let clash = "subject,budget,choice\ns,a;b,a\ns,b;a,b\n";
        assert!(matches!(
            parse_study(clash, Format::Csv),
            Err(StudyError::Validation { source: ValidationError::ConflictingDuplicateBudget { .. }, .. })
        ));
    }

    #[test]
    fn header_is_required() {
        assert!(matches!(parse_study("a,b;c,b\n", Format::Csv), Err(StudyError::Schema { .. })));
        assert!(matches!(
            parse_study("subject,budget,choice\ns,,a\n", Format::Csv),
            Err(StudyError::Schema { .. })
        ));
    }
}
