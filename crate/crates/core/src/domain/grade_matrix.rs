use serde::{Deserialize, Serialize};

use super::{CurriculumSpec, LetterGrade, StudentRecord};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Encoded, F-imputed grades: one row per student, one column per course.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeMatrix {
    features: Matrix,
    columns: Vec<String>,
    row_ids: Vec<String>,
    labels: Vec<bool>,
}

impl GradeMatrix {
    /// Checks shapes and that every cell is a legal encoded grade.
    pub fn new(
        features: Matrix,
        columns: Vec<String>,
        row_ids: Vec<String>,
        labels: Vec<bool>,
    ) -> Result<Self> {
        if columns.len() != features.cols() {
            return Err(Error::DimensionMismatch {
                expected: features.cols(),
                got: columns.len(),
            });
        }
        for len in [row_ids.len(), labels.len()] {
            if len != features.rows() {
                return Err(Error::LengthMismatch {
                    expected: features.rows(),
                    got: len,
                });
            }
        }
        for (i, row) in features.iter_rows().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if LetterGrade::from_encoded(v).is_none() {
                    return Err(Error::InvalidEncodedGrade { row: i, col: j, value: v });
                }
            }
        }
        Ok(GradeMatrix {
            features,
            columns,
            row_ids,
            labels,
        })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    /// Number of students.
    pub fn n(&self) -> usize {
        self.features.rows()
    }

    /// Number of courses.
    pub fn d(&self) -> usize {
        self.features.cols()
    }

    pub fn select_rows(&self, idx: &[usize]) -> GradeMatrix {
        GradeMatrix {
            features: self.features.select_rows(idx),
            columns: self.columns.clone(),
            row_ids: idx.iter().map(|&i| self.row_ids[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> GradeMatrix {
        GradeMatrix {
            features: self.features.select_cols(idx),
            columns: idx.iter().map(|&j| self.columns[j].clone()).collect(),
            row_ids: self.row_ids.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Same grades with a different label vector.
    pub fn with_labels(&self, labels: Vec<bool>) -> Result<GradeMatrix> {
        if labels.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: labels.len(),
            });
        }
        Ok(GradeMatrix {
            labels,
            ..self.clone()
        })
    }
}

/// Encodes a cohort against a curriculum. Missing and absent courses become F.
pub fn build_matrix(records: &[StudentRecord], spec: &CurriculumSpec) -> Result<GradeMatrix> {
    if records.is_empty() {
        return Err(Error::EmptyCohort);
    }
    for r in records {
        if let Some(unknown) = r.grades.keys().find(|c| !spec.contains(c)) {
            return Err(Error::UnknownCourse(unknown.clone()));
        }
    }
    let d = spec.len();
    let mut data = Vec::with_capacity(records.len() * d);
    for r in records {
        data.extend(spec.courses().iter().map(|c| r.grade(&c.id).encode()));
    }
    Ok(GradeMatrix {
        features: Matrix::new(records.len(), d, data)?,
        columns: spec.course_ids().map(str::to_string).collect(),
        row_ids: records.iter().map(|r| r.student_id.clone()).collect(),
        labels: records.iter().map(|r| r.graduated).collect(),
    })
}

/// Restricts `m` to its `k` columns earliest on the pathway, in pathway order.
pub fn subset_first_k(m: &GradeMatrix, spec: &CurriculumSpec, k: usize) -> Result<GradeMatrix> {
    if k == 0 || k > m.d() {
        return Err(Error::InvalidArgument(format!(
            "first-k course count {k} must be in 1..={}",
            m.d()
        )));
    }
    let mut by_position = Vec::with_capacity(m.d());
    for (j, id) in m.columns().iter().enumerate() {
        let course = spec
            .get(id)
            .ok_or_else(|| Error::UnknownCourse(id.clone()))?;
        by_position.push((course.pathway_position, j));
    }
    by_position.sort_unstable();
    let idx: Vec<usize> = by_position.iter().take(k).map(|&(_, j)| j).collect();
    Ok(m.select_cols(&idx))
}
