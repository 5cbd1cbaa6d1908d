//! Finite unions of points and closed intervals on the real line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[Option<f64>; 2]", into = "[Option<f64>; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl TryFrom<[Option<f64>; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [Option<f64>; 2]) -> Result<Self> {
        let lo = v[0].unwrap_or(f64::NEG_INFINITY);
        let hi = v[1].unwrap_or(f64::INFINITY);
        Interval::new(lo, hi)
    }
}

impl From<Interval> for [Option<f64>; 2] {
    fn from(i: Interval) -> Self {
        [
            if i.lo.is_finite() { Some(i.lo) } else { None },
            if i.hi.is_finite() { Some(i.hi) } else { None },
        ]
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::Invalid(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn whole_line() -> Self {
        Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn distance_to(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }

    pub fn distance_to_interval(&self, other: &Interval) -> f64 {
        if self.hi < other.lo {
            other.lo - self.hi
        } else if other.hi < self.lo {
            self.lo - other.hi
        } else {
            0.0
        }
    }
}

/// Canonical finite union of points and closed intervals.
///
/// Intervals are sorted and disjoint; points are sorted, distinct and not
/// inside any interval.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawSet", into = "RawSet")]
pub struct SpectrumSet {
    points: Vec<f64>,
    intervals: Vec<Interval>,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    #[serde(default)]
    points: Vec<f64>,
    #[serde(default)]
    intervals: Vec<Interval>,
}

impl From<RawSet> for SpectrumSet {
    fn from(r: RawSet) -> Self {
        SpectrumSet::new(r.points, r.intervals)
    }
}

impl From<SpectrumSet> for RawSet {
    fn from(s: SpectrumSet) -> Self {
        RawSet { points: s.points, intervals: s.intervals }
    }
}

impl SpectrumSet {
    pub fn new(points: Vec<f64>, intervals: Vec<Interval>) -> Self {
        let mut pts: Vec<f64> = points.into_iter().filter(|p| p.is_finite()).collect();
        pts.extend(intervals.iter().filter(|i| i.lo == i.hi).map(|i| i.lo));
        let mut iv: Vec<Interval> = intervals.into_iter().filter(|i| i.lo < i.hi).collect();
        iv.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(iv.len());
        for i in iv {
            match merged.last_mut() {
                Some(last) if i.lo <= last.hi => last.hi = last.hi.max(i.hi),
                _ => merged.push(i),
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.retain(|&p| !merged.iter().any(|i| i.contains(p)));
        SpectrumSet { points: pts, intervals: merged }
    }

    pub fn empty() -> Self {
        SpectrumSet::default()
    }

    pub fn whole_line() -> Self {
        SpectrumSet::new(vec![], vec![Interval::whole_line()])
    }

    pub fn from_points(points: Vec<f64>) -> Self {
        SpectrumSet::new(points, vec![])
    }

    /// `R \ (lo, hi)` for a bounded gap.
    pub fn complement_of_gap(lo: f64, hi: f64) -> Self {
        SpectrumSet::new(
            vec![],
            vec![
                Interval { lo: f64::NEG_INFINITY, hi: lo },
                Interval { lo: hi, hi: f64::INFINITY },
            ],
        )
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.distance_to(x) == 0.0
    }

    /// Distance from `x` to the set (infinite for the empty set).
    pub fn distance_to(&self, x: f64) -> f64 {
        let p = self.points.iter().map(|&p| (p - x).abs());
        let i = self.intervals.iter().map(|i| i.distance_to(x));
        p.chain(i).fold(f64::INFINITY, f64::min)
    }

    /// Distance between this set and a list of closed intervals.
    pub fn distance_to_intervals(&self, other: &[Interval]) -> f64 {
        let mut d = f64::INFINITY;
        for o in other {
            for &p in &self.points {
                d = d.min(o.distance_to(p));
            }
            for i in &self.intervals {
                d = d.min(i.distance_to_interval(o));
            }
        }
        d
    }

    pub fn distance_to_set(&self, other: &SpectrumSet) -> f64 {
        let as_intervals: Vec<Interval> = other
            .points
            .iter()
            .map(|&p| Interval::point(p))
            .chain(other.intervals.iter().copied())
            .collect();
        self.distance_to_intervals(&as_intervals)
    }

    /// Points and intervals as one list of closed intervals.
    pub fn as_intervals(&self) -> Vec<Interval> {
        let mut v: Vec<Interval> = self.points.iter().map(|&p| Interval::point(p)).collect();
        v.extend(self.intervals.iter().copied());
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        v
    }

    /// True if every point and interval of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &SpectrumSet) -> bool {
        self.points.iter().all(|&p| other.contains(p))
            && self.intervals.iter().all(|i| other.intervals.iter().any(|o| o.lo <= i.lo && i.hi <= o.hi))
    }
}
