use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::LetterGrade;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentRecord {
    pub student_id: String,
    pub graduated: bool,
    pub semesters: u32,
    pub units: f64,
    pub transfer_units: f64,
    /// Courses absent from the map are treated as `Missing`.
    pub grades: BTreeMap<String, LetterGrade>,
}

impl StudentRecord {
    pub fn grade(&self, course_id: &str) -> LetterGrade {
        self.grades
            .get(course_id)
            .copied()
            .unwrap_or(LetterGrade::Missing)
    }
}

/// How several attempts at the same course collapse to one grade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepeatPolicy {
    /// Highest encoded grade across attempts.
    #[default]
    Best,
    /// Last attempt listed.
    Latest,
}

impl RepeatPolicy {
    pub fn resolve(self, attempts: &[LetterGrade]) -> LetterGrade {
        match self {
            RepeatPolicy::Latest => attempts.last().copied().unwrap_or(LetterGrade::Missing),
            // max_by keeps the last maximum, so compare letters ahead of
            // Missing explicitly (F and Missing share an encoding)
            RepeatPolicy::Best => attempts
                .iter()
                .copied()
                .max_by(|a, b| {
                    a.encode()
                        .total_cmp(&b.encode())
                        .then_with(|| b.is_missing().cmp(&a.is_missing()))
                })
                .unwrap_or(LetterGrade::Missing),
        }
    }
}
