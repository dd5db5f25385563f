//! Bottleneck-course ranking and per-cluster profiles.
//!
//! A course's separation is the largest absolute difference between any two
//! of its per-cluster mean grades; with two clusters it is simply the gap
//! between them. Imputed F's are part of the means.

use std::io::Write;

use serde::Serialize;

use crate::cluster::KMeansModel;
use crate::domain::{CurriculumSpec, Division, GradeMatrix, StudentRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BottleneckRow {
    pub course_id: String,
    pub division: Division,
    pub pathway_position: usize,
    pub cluster_means: Vec<f64>,
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BottleneckReport {
    /// Descending separation; ties by pathway position.
    pub rows: Vec<BottleneckRow>,
}

impl BottleneckReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let k = self.rows.first().map_or(0, |r| r.cluster_means.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["course_id".to_string(), "division".into(), "pathway_position".into()];
        header.extend((0..k).map(|j| format!("mean_cluster_{j}")));
        header.push("separation".into());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.course_id.clone(), r.division.to_string(), r.pathway_position.to_string()];
            rec.extend(r.cluster_means.iter().map(f64::to_string));
            rec.push(r.separation.to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<bottleneck output>", e))?;
        Ok(())
    }
}

fn check_model(model: &KMeansModel, n: usize, d: usize) -> Result<()> {
    if model.n() != n {
        return Err(Error::LengthMismatch { expected: n, got: model.n() });
    }
    if model.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: model.dim() });
    }
    if let Some(&a) = model.assignments.iter().find(|&&a| a >= model.k) {
        return Err(Error::ClusterIndexOutOfRange { index: a, k: model.k });
    }
    Ok(())
}

pub fn bottleneck_rank(m: &GradeMatrix, model: &KMeansModel, spec: &CurriculumSpec) -> Result<BottleneckReport> {
    check_model(model, m.n(), m.d())?;
    let k = model.k;
    let sizes = model.cluster_sizes();
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyCluster(empty));
    }

    let mut sums = vec![vec![0.0; k]; m.d()];
    for (row, &a) in m.features().iter_rows().zip(&model.assignments) {
        for (course, &v) in sums.iter_mut().zip(row) {
            course[a] += v;
        }
    }

    let mut rows = Vec::with_capacity(m.d());
    for (id, course_sums) in m.columns().iter().zip(sums) {
        let course = spec.get(id).ok_or_else(|| Error::UnknownCourse(id.clone()))?;
        let cluster_means: Vec<f64> = course_sums
            .iter()
            .zip(&sizes)
            .map(|(s, &c)| s / c as f64)
            .collect();
        let hi = cluster_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = cluster_means.iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(BottleneckRow {
            course_id: id.clone(),
            division: course.division,
            pathway_position: course.pathway_position,
            cluster_means,
            separation: hi - lo,
        });
    }
    rows.sort_by(|a, b| {
        b.separation
            .total_cmp(&a.separation)
            .then(a.pathway_position.cmp(&b.pathway_position))
    });
    Ok(BottleneckReport { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisionFilter {
    Lower,
    Any,
}

impl std::str::FromStr for DivisionFilter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lower" => Ok(DivisionFilter::Lower),
            "any" => Ok(DivisionFilter::Any),
            other => Err(format!("unknown division filter {other:?} (expected lower or any)")),
        }
    }
}

/// The `top_n` most separated courses, optionally restricted to lower division.
pub fn early_warning_features(report: &BottleneckReport, filter: DivisionFilter, top_n: usize) -> Result<Vec<String>> {
    if top_n == 0 {
        return Err(Error::InvalidArgument("top_n must be at least 1".into()));
    }
    let eligible: Vec<&BottleneckRow> = report
        .rows
        .iter()
        .filter(|r| filter == DivisionFilter::Any || r.division == Division::Lower)
        .collect();
    if top_n > eligible.len() {
        return Err(Error::InvalidArgument(format!(
            "top_n {top_n} exceeds the {} eligible courses",
            eligible.len()
        )));
    }
    Ok(eligible[..top_n].iter().map(|r| r.course_id.clone()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterStats {
    pub cluster: usize,
    pub size: usize,
    pub graduation_rate: f64,
    pub mean_semesters: f64,
    pub mean_units: f64,
    pub mean_transfer_units: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterProfile {
    pub clusters: Vec<ClusterStats>,
}

impl ClusterProfile {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "cluster",
            "size",
            "graduation_rate",
            "mean_semesters",
            "mean_units",
            "mean_transfer_units",
        ])?;
        for c in &self.clusters {
            w.write_record([
                c.cluster.to_string(),
                c.size.to_string(),
                c.graduation_rate.to_string(),
                c.mean_semesters.to_string(),
                c.mean_units.to_string(),
                c.mean_transfer_units.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<profile output>", e))?;
        Ok(())
    }

    /// The cluster with the lowest graduation rate (lowest index on ties).
    pub fn lowest_graduation(&self) -> Option<&ClusterStats> {
        self.clusters
            .iter()
            .reduce(|a, b| if b.graduation_rate < a.graduation_rate { b } else { a })
    }
}

pub fn cluster_profile(records: &[StudentRecord], model: &KMeansModel) -> Result<ClusterProfile> {
    if records.len() != model.n() {
        return Err(Error::LengthMismatch {
            expected: model.n(),
            got: records.len(),
        });
    }
    #[derive(Default, Clone)]
    struct Acc {
        n: usize,
        grads: usize,
        semesters: f64,
        units: f64,
        transfer: f64,
    }
    let mut acc = vec![Acc::default(); model.k];
    for (r, &a) in records.iter().zip(&model.assignments) {
        let s = acc
            .get_mut(a)
            .ok_or(Error::ClusterIndexOutOfRange { index: a, k: model.k })?;
        s.n += 1;
        s.grads += usize::from(r.graduated);
        s.semesters += f64::from(r.semesters);
        s.units += r.units;
        s.transfer += r.transfer_units;
    }
    let clusters = acc
        .into_iter()
        .enumerate()
        .map(|(j, a)| {
            if a.n == 0 {
                return Err(Error::EmptyCluster(j));
            }
            let n = a.n as f64;
            Ok(ClusterStats {
                cluster: j,
                size: a.n,
                graduation_rate: a.grads as f64 / n,
                mean_semesters: a.semesters / n,
                mean_units: a.units / n,
                mean_transfer_units: a.transfer / n,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ClusterProfile { clusters })
}
