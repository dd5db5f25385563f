//! Cohort and curriculum file parsing.
//!
//! Cohort CSV layout (header row mandatory):
//!
//! ```text
//! student_id,graduated,semesters,units,transfer_units,<course 1>,...,<course d>
//! ```
//!
//! Course columns appear in curriculum order. A grade cell holds a letter
//! grade (any case), is blank for a course not taken, or lists several
//! attempts separated by `;` which are collapsed with a [`RepeatPolicy`].
//! Marks that are not letter grades (W, I, NC, ...) become `Missing` with a
//! warning. Rows with unparseable metadata are rejected one by one; a header
//! mismatch or a duplicated student id rejects the whole file.
//!
//! The curriculum file has one `course_id,division` line per course, in
//! pathway order.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::domain::{CurriculumSpec, Division, LetterGrade, RepeatPolicy, StudentRecord};
use crate::error::{Error, Result};

pub const METADATA_COLUMNS: [&str; 5] =
    ["student_id", "graduated", "semesters", "units", "transfer_units"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestWarning {
    /// 1-based data row (the header is row 0).
    pub row: usize,
    pub column: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub records_read: usize,
    pub rejected_rows: usize,
    pub warnings: Vec<IngestWarning>,
}

impl IngestReport {
    pub fn total_rows(&self) -> usize {
        self.records_read + self.rejected_rows
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    pub repeat_policy: RepeatPolicy,
}

pub fn expected_header(spec: &CurriculumSpec) -> Vec<String> {
    METADATA_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain(spec.course_ids().map(str::to_string))
        .collect()
}

pub fn read_cohort(path: &Path, spec: &CurriculumSpec) -> Result<(Vec<StudentRecord>, IngestReport)> {
    read_cohort_with(path, spec, IngestOptions::default())
}

pub fn read_cohort_with(
    path: &Path,
    spec: &CurriculumSpec,
    opts: IngestOptions,
) -> Result<(Vec<StudentRecord>, IngestReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_cohort(file, spec, opts)
}

pub fn parse_cohort<R: Read>(
    input: R,
    spec: &CurriculumSpec,
    opts: IngestOptions,
) -> Result<(Vec<StudentRecord>, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);

    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    check_header(&header, spec)?;

    let mut records = Vec::new();
    let mut report = IngestReport::default();
    let mut ids = HashSet::new();

    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row?;
        match parse_row(&row, row_no, &header, opts, &mut report.warnings) {
            Some(rec) => {
                if !ids.insert(rec.student_id.clone()) {
                    return Err(Error::DuplicateStudent(rec.student_id));
                }
                records.push(rec);
                report.records_read += 1;
            }
            None => report.rejected_rows += 1,
        }
    }
    Ok((records, report))
}

fn check_header(header: &[String], spec: &CurriculumSpec) -> Result<()> {
    let expected = expected_header(spec);
    if header == expected.as_slice() {
        return Ok(());
    }
    if let Some(missing) = expected.iter().find(|c| !header.contains(c)) {
        return Err(Error::MissingColumn(missing.clone()));
    }
    if let Some(extra) = header.iter().skip(METADATA_COLUMNS.len()).find(|c| !spec.contains(c)) {
        return Err(Error::UnknownCourse(extra.clone()));
    }
    Err(Error::HeaderMismatch {
        expected,
        found: header.to_vec(),
    })
}

fn warn(warnings: &mut Vec<IngestWarning>, row: usize, column: &str, message: String) {
    warnings.push(IngestWarning {
        row,
        column: column.to_string(),
        message,
    });
}

fn parse_graduated(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

fn parse_amount(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0)
}

fn parse_row(
    row: &csv::StringRecord,
    row_no: usize,
    header: &[String],
    opts: IngestOptions,
    warnings: &mut Vec<IngestWarning>,
) -> Option<StudentRecord> {
    if row.len() != header.len() {
        warn(
            warnings,
            row_no,
            "",
            format!("row rejected: expected {} fields, found {}", header.len(), row.len()),
        );
        return None;
    }

    let student_id = row[0].trim().to_string();
    let graduated = parse_graduated(&row[1]);
    let semesters = row[2].trim().parse::<u32>().ok();
    let units = parse_amount(&row[3]);
    let transfer_units = parse_amount(&row[4]);

    let mut ok = true;
    if student_id.is_empty() {
        warn(warnings, row_no, "student_id", "row rejected: empty student_id".into());
        ok = false;
    }
    let checks = [
        (graduated.is_some(), 1),
        (semesters.is_some(), 2),
        (units.is_some(), 3),
        (transfer_units.is_some(), 4),
    ];
    for (valid, col) in checks {
        if !valid {
            warn(
                warnings,
                row_no,
                METADATA_COLUMNS[col],
                format!("row rejected: unparseable value {:?}", &row[col]),
            );
            ok = false;
        }
    }
    if !ok {
        return None;
    }

    let mut grades = BTreeMap::new();
    for (course, cell) in header.iter().zip(row.iter()).skip(METADATA_COLUMNS.len()) {
        let attempts: Vec<LetterGrade> = cell
            .split(';')
            .map(|mark| {
                LetterGrade::parse_symbol(mark).unwrap_or_else(|| {
                    warn(
                        warnings,
                        row_no,
                        course,
                        format!("unrecognized mark {:?} treated as missing", mark.trim()),
                    );
                    LetterGrade::Missing
                })
            })
            .collect();
        grades.insert(course.clone(), opts.repeat_policy.resolve(&attempts));
    }

    Some(StudentRecord {
        student_id,
        graduated: graduated?,
        semesters: semesters?,
        units: units?,
        transfer_units: transfer_units?,
        grades,
    })
}

/// Writes records in the cohort schema; `Missing` becomes a blank cell.
pub fn write_cohort<W: Write>(out: W, records: &[StudentRecord], spec: &CurriculumSpec) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(expected_header(spec))?;
    for r in records {
        if let Some(unknown) = r.grades.keys().find(|c| !spec.contains(c)) {
            return Err(Error::UnknownCourse(unknown.clone()));
        }
        let mut fields = vec![
            r.student_id.clone(),
            if r.graduated { "1" } else { "0" }.to_string(),
            r.semesters.to_string(),
            r.units.to_string(),
            r.transfer_units.to_string(),
        ];
        fields.extend(spec.course_ids().map(|c| r.grade(c).symbol().to_string()));
        w.write_record(&fields)?;
    }
    w.flush().map_err(|e| Error::io("<cohort output>", e))?;
    Ok(())
}

pub fn read_curriculum(path: &Path) -> Result<CurriculumSpec> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let major = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_curriculum(BufReader::new(file), major)
}

pub fn parse_curriculum<R: BufRead>(input: R, major_name: impl Into<String>) -> Result<CurriculumSpec> {
    let mut courses: Vec<(String, Division)> = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io("<curriculum>", e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (id, division) = line.split_once(',').ok_or_else(|| Error::MalformedCurriculumLine {
            line: line_no,
            content: line.to_string(),
        })?;
        let id = id.trim();
        if id.is_empty() {
            return Err(Error::MalformedCurriculumLine {
                line: line_no,
                content: line.to_string(),
            });
        }
        let division = division.parse::<Division>().map_err(|value| Error::InvalidDivision {
            line: line_no,
            value,
        })?;
        if courses.iter().any(|(c, _)| c == id) {
            return Err(Error::DuplicateCourse(id.to_string()));
        }
        courses.push((id.to_string(), division));
    }
    CurriculumSpec::new(major_name, courses)
}

pub fn write_curriculum<W: Write>(mut out: W, spec: &CurriculumSpec) -> Result<()> {
    for c in spec.courses() {
        writeln!(out, "{},{}", c.id, c.division).map_err(|e| Error::io("<curriculum output>", e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use LetterGrade::*;

    fn spec() -> CurriculumSpec {
        CurriculumSpec::new("m", [("C101", Division::Lower), ("C102", Division::Upper)]).unwrap()
    }

    const HEADER: &str = "student_id,graduated,semesters,units,transfer_units,C101,C102\n";

    fn parse(body: &str) -> Result<(Vec<StudentRecord>, IngestReport)> {
        parse_cohort(format!("{HEADER}{body}").as_bytes(), &spec(), IngestOptions::default())
    }

    #[test]
    fn direct_mapping() {
        let (recs, report) = parse("s1,1,8,120,30,A,B+\n").unwrap();
        assert_eq!(report.records_read, 1);
        assert!(report.warnings.is_empty());
        let r = &recs[0];
        assert_eq!(r.student_id, "s1");
        assert!(r.graduated);
        assert_eq!(r.semesters, 8);
        assert_eq!(r.units, 120.0);
        assert_eq!(r.transfer_units, 30.0);
        assert_eq!(r.grade("C101"), A);
        assert_eq!(r.grade("C102"), BPlus);
    }

    #[test]
    fn blank_and_unrecognized_marks() {
        let (recs, report) = parse("s1,yes,8,120,30,,e\ns2,No,3,40,0,a-,W\n").unwrap();
        assert_eq!(recs[0].grade("C101"), Missing);
        assert_eq!(recs[0].grade("C102"), Missing);
        assert!(!recs[1].graduated);
        assert_eq!(recs[1].grade("C101"), AMinus);
        assert_eq!(report.warnings.len(), 2);
        assert_eq!(report.warnings[0].row, 1);
        assert_eq!(report.warnings[0].column, "C102");
        assert!(report.warnings[0].message.contains("unrecognized mark"));
    }

    #[test]
    fn repeated_attempts_keep_best_by_default() {
        let (recs, _) = parse("s1,1,8,120,30,F;B,C;W\n").unwrap();
        assert_eq!(recs[0].grade("C101"), B);
        assert_eq!(recs[0].grade("C102"), C);
        let opts = IngestOptions { repeat_policy: RepeatPolicy::Latest };
        let (recs, _) = parse_cohort(format!("{HEADER}s1,1,8,120,30,B;F,\n").as_bytes(), &spec(), opts).unwrap();
        assert_eq!(recs[0].grade("C101"), F);
    }

    #[test]
    fn bad_metadata_rejects_row_only() {
        let (recs, report) = parse("s1,maybe,8,120,30,A,A\ns2,1,x,120,30,A,A\ns3,1,8,-5,30,A,A\ns4,0,2,10,0,F,F\ns5,1\n").unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].student_id, "s4");
        assert_eq!(report.rejected_rows, 4);
        assert_eq!(report.total_rows(), 5);
        let rejected_rows: HashSet<usize> = report.warnings.iter().map(|w| w.row).collect();
        assert_eq!(rejected_rows, [1, 2, 3, 5].into_iter().collect());
    }

    #[test]
    fn duplicate_student_rejects_file() {
        let err = parse("s1,1,8,120,30,A,A\ns1,0,8,120,30,A,A\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateStudent(id) if id == "s1"));
    }

    #[test]
    fn header_problems() {
        let no_units = "student_id,graduated,semesters,transfer_units,C101,C102\n";
        let err = parse_cohort(no_units.as_bytes(), &spec(), IngestOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(c) if c == "units"));

        let extra = "student_id,graduated,semesters,units,transfer_units,C101,C102,X9\n";
        let err = parse_cohort(extra.as_bytes(), &spec(), IngestOptions::default()).unwrap_err();
        assert!(matches!(err, Error::UnknownCourse(c) if c == "X9"));

        let swapped = "student_id,graduated,semesters,units,transfer_units,C102,C101\n";
        let err = parse_cohort(swapped.as_bytes(), &spec(), IngestOptions::default()).unwrap_err();
        assert!(matches!(err, Error::HeaderMismatch { .. }));
    }

    #[test]
    fn curriculum_parsing() {
        let spec = parse_curriculum("A,lower\nB,lower\nC,upper\n".as_bytes(), "m").unwrap();
        let pos: Vec<_> = spec.courses().iter().map(|c| c.pathway_position).collect();
        assert_eq!(pos, vec![1, 2, 3]);
        assert_eq!(spec.courses()[2].division, Division::Upper);

        let dup = parse_curriculum("A,lower\nA,upper\n".as_bytes(), "m").unwrap_err();
        assert!(matches!(dup, Error::DuplicateCourse(c) if c == "A"));

        let empty = parse_curriculum("".as_bytes(), "m").unwrap_err();
        assert_eq!(empty.to_string(), "empty curriculum");

        let bad = parse_curriculum("A,middle\n".as_bytes(), "m").unwrap_err();
        assert!(matches!(bad, Error::InvalidDivision { line: 1, .. }));
    }
}
