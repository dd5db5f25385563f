//! Synthetic cohorts with a planted graduate / non-graduate split.
//!
//! Each student belongs to one of two groups. Per course, a group has a mean
//! grade on the encoded scale, a spread and a probability of never taking the
//! course. Grades are drawn from a normal, clipped to the scale and snapped to
//! the nearest letter grade. The normal's location is calibrated so that the
//! expected snapped grade equals the configured mean.

use std::path::Path;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::domain::{CurriculumSpec, Division, LetterGrade, StudentRecord, LETTER_GRADES};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, stream, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerGroup<T> {
    pub graduate: T,
    pub non_graduate: T,
}

impl<T: Copy> PerGroup<T> {
    pub fn new(graduate: T, non_graduate: T) -> Self {
        PerGroup { graduate, non_graduate }
    }

    pub fn get(&self, graduate: bool) -> T {
        if graduate {
            self.graduate
        } else {
            self.non_graduate
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dist {
    pub mean: f64,
    pub stddev: f64,
}

impl Dist {
    pub fn new(mean: f64, stddev: f64) -> Self {
        Dist { mean, stddev }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CourseParams {
    pub course_id: String,
    pub division: Division,
    /// Expected encoded grade of a student who takes the course.
    pub mean: PerGroup<f64>,
    pub stddev: f64,
    pub missing_prob: PerGroup<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    #[serde(default = "default_major")]
    pub major_name: String,
    pub n_students: usize,
    pub graduate_fraction: f64,
    /// In pathway order.
    pub courses: Vec<CourseParams>,
    pub semesters: PerGroup<Dist>,
    pub units: PerGroup<Dist>,
    pub transfer_units: PerGroup<Dist>,
    pub seed: u64,
}

fn default_major() -> String {
    "synthetic".into()
}

impl CohortSpec {
    pub fn from_json_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: CohortSpec = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidCohortSpec(format!("{}: {e}", path.display())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCohortSpec(msg));
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        let spread = |s: f64| s >= 0.0 && s.is_finite();
        if self.n_students < 2 {
            return bad(format!("n_students must be at least 2, got {}", self.n_students));
        }
        if self.courses.is_empty() {
            return bad("at least one course is required".into());
        }
        if !prob(self.graduate_fraction) {
            return bad(format!("graduate_fraction {} outside [0, 1]", self.graduate_fraction));
        }
        for c in &self.courses {
            for m in [c.mean.graduate, c.mean.non_graduate] {
                if !(-2.0..=2.0).contains(&m) {
                    return bad(format!("course {}: mean {m} outside [-2, 2]", c.course_id));
                }
            }
            if !spread(c.stddev) {
                return bad(format!("course {}: invalid stddev {}", c.course_id, c.stddev));
            }
            for p in [c.missing_prob.graduate, c.missing_prob.non_graduate] {
                if !prob(p) {
                    return bad(format!("course {}: missing_prob {p} outside [0, 1]", c.course_id));
                }
            }
        }
        for (name, d) in [
            ("semesters", self.semesters),
            ("units", self.units),
            ("transfer_units", self.transfer_units),
        ] {
            for g in [d.graduate, d.non_graduate] {
                if !(g.mean.is_finite() && g.mean >= 0.0 && spread(g.stddev)) {
                    return bad(format!("{name}: invalid distribution {g:?}"));
                }
            }
        }
        self.curriculum().map(|_| ())
    }

    pub fn curriculum(&self) -> Result<CurriculumSpec> {
        CurriculumSpec::new(
            self.major_name.clone(),
            self.courses.iter().map(|c| (c.course_id.clone(), c.division)),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCohort {
    pub records: Vec<StudentRecord>,
    pub curriculum: CurriculumSpec,
    /// Planted group per student; `true` is the graduate group.
    pub planted: Vec<bool>,
}

/// Nearest encoded letter value; midpoints go to the higher grade.
pub fn snap_to_scale(v: f64) -> LetterGrade {
    let v = v.clamp(-2.0, 2.0);
    let mut best = LetterGrade::A;
    let mut best_d = f64::INFINITY;
    // best grade first, so a tie keeps the higher grade
    for g in LETTER_GRADES {
        let d = (g.encode() - v).abs();
        if d < best_d {
            best = g;
            best_d = d;
        }
    }
    best
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Expected snapped grade of `N(location, stddev²)`.
pub fn expected_snapped(location: f64, stddev: f64) -> f64 {
    if stddev == 0.0 {
        return snap_to_scale(location).encode();
    }
    let mut values: Vec<f64> = LETTER_GRADES.iter().map(|g| g.encode()).collect();
    values.reverse();
    let mut e = 0.0;
    let mut lower_cdf = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let upper_cdf = match values.get(i + 1) {
            Some(&next) => normal_cdf(((v + next) / 2.0 - location) / stddev),
            None => 1.0,
        };
        e += v * (upper_cdf - lower_cdf);
        lower_cdf = upper_cdf;
    }
    e
}

/// Normal location whose snapped mean is `target` (bisection; the snapped
/// mean is increasing in the location).
pub fn calibrate_location(target: f64, stddev: f64) -> f64 {
    if stddev == 0.0 {
        return target;
    }
    let (mut lo, mut hi) = (-2.0 - 12.0 * stddev, 2.0 + 12.0 * stddev);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if expected_snapped(mid, stddev) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn draw(rng: &mut Rng, d: Dist) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    (d.mean + d.stddev * z).max(0.0).round()
}

pub fn generate_cohort(spec: &CohortSpec) -> Result<SyntheticCohort> {
    spec.validate()?;
    let curriculum = spec.curriculum()?;
    let locations: Vec<PerGroup<f64>> = spec
        .courses
        .iter()
        .map(|c| {
            PerGroup::new(
                calibrate_location(c.mean.graduate, c.stddev),
                calibrate_location(c.mean.non_graduate, c.stddev),
            )
        })
        .collect();

    let mut rng = rng_from_seed(derive_seed(spec.seed, stream::COHORT, 0));
    let width = spec.n_students.to_string().len().max(5);
    let mut records = Vec::with_capacity(spec.n_students);
    let mut planted = Vec::with_capacity(spec.n_students);
    for i in 0..spec.n_students {
        let graduate = rng.random::<f64>() < spec.graduate_fraction;
        let mut grades = std::collections::BTreeMap::new();
        for (c, loc) in spec.courses.iter().zip(&locations) {
            // both draws always happen so the stream layout is fixed
            let skip = rng.random::<f64>() < c.missing_prob.get(graduate);
            let z: f64 = rng.sample(StandardNormal);
            let grade = if skip {
                LetterGrade::Missing
            } else {
                snap_to_scale(loc.get(graduate) + c.stddev * z)
            };
            grades.insert(c.course_id.clone(), grade);
        }
        let semesters = draw(&mut rng, spec.semesters.get(graduate)) as u32;
        let units = draw(&mut rng, spec.units.get(graduate));
        let transfer_units = draw(&mut rng, spec.transfer_units.get(graduate));
        records.push(StudentRecord {
            student_id: format!("S{:0width$}", i + 1),
            graduated: graduate,
            semesters,
            units,
            transfer_units,
            grades,
        });
        planted.push(graduate);
    }
    Ok(SyntheticCohort {
        records,
        curriculum,
        planted,
    })
}

/// Course count of the default department.
pub const DEFAULT_COURSES: usize = 113;
/// Lower-division courses at the start of the default pathway.
pub const DEFAULT_LOWER_DIVISION: usize = 40;
/// Mean semesters a non-graduate spends in the major.
pub const DEFAULT_DROPOUT_DWELL: f64 = 4.0;

/// A 2000-student, 113-course department, 60% graduating. The first course
/// carries a planted 2.0 gap between the groups' mean grades; courses two and
/// three have 0.4, the remaining lower-division courses 0.2 and upper-division
/// courses 0.4. Non-graduates skip 5% of lower-division and 20% of
/// upper-division courses and stay about four semesters.
pub fn default_department_spec(seed: u64) -> CohortSpec {
    let courses = (1..=DEFAULT_COURSES)
        .map(|i| {
            let lower = i <= DEFAULT_LOWER_DIVISION;
            let (graduate, gap, stddev, skip) = match i {
                1 => (1.0, 2.0, 0.9, 0.05),
                2 | 3 => (0.8, 0.4, 0.9, 0.05),
                _ if lower => (0.5 + 0.1 * ((i * 7) % 6) as f64, 0.2, 0.9, 0.05),
                _ => (0.6 + 0.1 * ((i * 5) % 7) as f64, 0.4, 0.7, 0.2),
            };
            CourseParams {
                course_id: format!("C{i:03}"),
                division: if lower { Division::Lower } else { Division::Upper },
                mean: PerGroup::new(graduate, graduate - gap),
                stddev,
                missing_prob: PerGroup::new(0.0, skip),
            }
        })
        .collect();
    CohortSpec {
        major_name: "default-department".into(),
        n_students: 2000,
        graduate_fraction: 0.6,
        courses,
        semesters: PerGroup::new(Dist::new(9.0, 2.0), Dist::new(DEFAULT_DROPOUT_DWELL, 1.5)),
        units: PerGroup::new(Dist::new(125.0, 10.0), Dist::new(48.0, 18.0)),
        transfer_units: PerGroup::new(Dist::new(24.0, 18.0), Dist::new(12.0, 12.0)),
        seed,
    }
}
