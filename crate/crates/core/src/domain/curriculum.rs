use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Division {
    Lower,
    Upper,
}

impl Division {
    pub fn as_str(self) -> &'static str {
        match self {
            Division::Lower => "lower",
            Division::Upper => "upper",
        }
    }
}

impl fmt::Display for Division {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Division {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lower" => Ok(Division::Lower),
            "upper" => Ok(Division::Upper),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Course {
    pub id: String,
    pub division: Division,
    /// 1-based position on the graduation pathway.
    pub pathway_position: usize,
}

/// The ordered list of courses required by a major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurriculumSpec {
    pub major_name: String,
    courses: Vec<Course>,
}

impl CurriculumSpec {
    /// Builds a curriculum whose pathway order is the order of `courses`.
    pub fn new<S: Into<String>>(
        major_name: impl Into<String>,
        courses: impl IntoIterator<Item = (S, Division)>,
    ) -> Result<Self> {
        let courses = courses
            .into_iter()
            .enumerate()
            .map(|(i, (id, division))| Course {
                id: id.into(),
                division,
                pathway_position: i + 1,
            })
            .collect();
        Self::from_courses(major_name, courses)
    }

    /// Validates explicit pathway positions: ids unique, positions unique and
    /// contiguous from 1. Courses are stored in pathway order.
    pub fn from_courses(major_name: impl Into<String>, mut courses: Vec<Course>) -> Result<Self> {
        if courses.is_empty() {
            return Err(Error::EmptyCurriculum);
        }
        let mut seen = std::collections::HashSet::new();
        for c in &courses {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::DuplicateCourse(c.id.clone()));
            }
        }
        courses.sort_by_key(|c| c.pathway_position);
        for (i, c) in courses.iter().enumerate() {
            if c.pathway_position != i + 1 {
                return Err(Error::InvalidArgument(format!(
                    "pathway positions must be contiguous from 1; course {} has position {}",
                    c.id, c.pathway_position
                )));
            }
        }
        Ok(CurriculumSpec {
            major_name: major_name.into(),
            courses,
        })
    }

    /// Courses in pathway order.
    pub fn courses(&self) -> &[Course] {
        &self.courses
    }

    pub fn len(&self) -> usize {
        self.courses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.courses.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Course> {
        self.courses.iter().find(|c| c.id == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.get(id).is_some()
    }

    pub fn course_ids(&self) -> impl Iterator<Item = &str> {
        self.courses.iter().map(|c| c.id.as_str())
    }
}
