//! Shared domain types: letter grades and their numeric encoding, curricula,
//! student records and the encoded feature matrix.

mod curriculum;
mod grade;
mod grade_matrix;
mod record;

pub use curriculum::{Course, CurriculumSpec, Division};
pub use grade::{encode_grade, LetterGrade, LETTER_GRADES};
pub use grade_matrix::{build_matrix, subset_first_k, GradeMatrix};
pub use record::{RepeatPolicy, StudentRecord};
