//! Per-user activity distributions and the Hoerl curve `f(x) = a * b^x * x^c`.
//!
//! Fitting happens in log space, where the model is linear in
//! `(ln a, ln b, c)`:
//!
//! ```text
//! ln f(x) = ln a + x ln b + c ln x
//! ```
//!
//! so an ordinary least-squares solve gives the parameters directly with no
//! iteration or starting guess. The solve goes through an SVD of the
//! column-scaled design matrix, which keeps long rank ranges (x up to 10^5 and
//! beyond) well conditioned.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Community, UserId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityMetric {
    /// Number of tag assignments a user performed.
    TagAssignments,
    /// Number of distinct items in the user's library.
    LibrarySize,
    /// Number of distinct tags in the user's vocabulary.
    VocabularySize,
}

impl ActivityMetric {
    pub const ALL: [ActivityMetric; 3] = [
        ActivityMetric::TagAssignments,
        ActivityMetric::LibrarySize,
        ActivityMetric::VocabularySize,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActivityMetric::TagAssignments => "tag_assignments",
            ActivityMetric::LibrarySize => "library_size",
            ActivityMetric::VocabularySize => "vocabulary_size",
        }
    }
}

impl fmt::Display for ActivityMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActivityMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tag_assignments" | "assignments" | "activity" => Ok(ActivityMetric::TagAssignments),
            "library_size" | "library" => Ok(ActivityMetric::LibrarySize),
            "vocabulary_size" | "vocabulary" => Ok(ActivityMetric::VocabularySize),
            other => Err(Error::InvalidConfig(format!("unknown metric {other:?}"))),
        }
    }
}

/// Per-user metric values for every present user, ascending by user ordinal.
pub fn user_metric(c: &Community, metric: ActivityMetric) -> Vec<(UserId, u64)> {
    let counts = match metric {
        ActivityMetric::TagAssignments => Some(c.assignment_counts()),
        _ => None,
    };
    c.users()
        .iter()
        .map(|&u| {
            let v = match metric {
                ActivityMetric::TagAssignments => counts.as_ref().unwrap()[u.index()],
                ActivityMetric::LibrarySize => c.user_items(u).len(),
                ActivityMetric::VocabularySize => c.user_tags(u).len(),
            };
            (u, v as u64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankPoint {
    pub rank: u64,
    pub value: u64,
    pub user: UserId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDistribution {
    pub metric: ActivityMetric,
    pub points: Vec<RankPoint>,
}

impl RankDistribution {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ranks(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rank as f64).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value as f64).collect()
    }
}

/// Users sorted by descending metric value (ties by ascending ordinal) and
/// ranked `1..=n`.
pub fn rank_distribution(c: &Community, metric: ActivityMetric) -> Result<RankDistribution> {
    if c.is_empty() {
        return Err(Error::EmptyCommunity);
    }
    let mut values = user_metric(c, metric);
    values.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let points = values
        .into_iter()
        .enumerate()
        .map(|(i, (user, value))| RankPoint {
            rank: i as u64 + 1,
            value,
            user,
        })
        .collect();
    Ok(RankDistribution { metric, points })
}

/// Squared Pearson correlation of two equal-length sequences.
pub fn correlation_r2(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::Degenerate(format!(
            "sequence lengths differ ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Degenerate("need at least two observations".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("constant sequence".into()));
    }
    Ok(((sxy * sxy) / (sxx * syy)).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoerlParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HoerlParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let p = Self { a, b, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) || !(self.b > 0.0 && self.b.is_finite()) || !self.c.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "Hoerl parameters need a > 0, b > 0 and finite c (got {}, {}, {})",
                self.a, self.b, self.c
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        eval_hoerl(self, x)
    }
}

pub fn eval_hoerl(p: &HoerlParams, x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(x));
    }
    // evaluate through logs so b^x cannot overflow before x^c pulls it back
    Ok((p.a.ln() + x * p.b.ln() + p.c * x.ln()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: HoerlParams,
    /// Coefficient of determination of the log-space regression.
    pub r2_log: f64,
    pub n_points: usize,
}

pub fn fit_hoerl(dist: &RankDistribution) -> Result<FitReport> {
    fit_hoerl_points(&dist.ranks(), &dist.values())
}

/// Fits `(x, y)` samples with `x > 0`, `y > 0`.
pub fn fit_hoerl_points(xs: &[f64], ys: &[f64]) -> Result<FitReport> {
    if xs.len() != ys.len() {
        return Err(Error::Degenerate("x and y lengths differ".into()));
    }
    if let Some(&bad) = xs.iter().chain(ys).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Domain(bad));
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::RankDeficient(n));
    }

    let mut design = DMatrix::from_fn(n, 3, |r, col| match col {
        0 => 1.0,
        1 => xs[r],
        _ => xs[r].ln(),
    });
    let mut scale = [1.0; 3];
    for (col, s) in scale.iter_mut().enumerate() {
        let norm = design.column(col).norm();
        if norm > 0.0 {
            *s = norm;
            design.column_mut(col).unscale_mut(norm);
        }
    }
    let target = DVector::from_iterator(n, ys.iter().map(|y| y.ln()));

    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin.is_nan() || smin <= smax * 1e-10 {
        return Err(Error::RankDeficient(n));
    }
    let coef = svd.solve(&target, 0.0).map_err(|e| Error::Degenerate(e.to_string()))?;
    let ln_a = coef[0] / scale[0];
    let ln_b = coef[1] / scale[1];
    let c = coef[2] / scale[2];

    let fitted = &design * &coef;
    let mean = target.mean();
    let ss_res: f64 = (&target - &fitted).iter().map(|r| r * r).sum();
    let ss_tot: f64 = target.iter().map(|t| (t - mean) * (t - mean)).sum();
    let r2_log = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };

    Ok(FitReport {
        params: HoerlParams {
            a: ln_a.exp(),
            b: ln_b.exp(),
            c,
        },
        r2_log,
        n_points: n,
    })
}
