//! Length/holonomy spectra: conjugacy-class records and sorted tables.

use crate::algebra::{circle_distance, reduce_angle};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Classes closer than this in both length and holonomy are merged.
pub const MERGE_TOL: f64 = 1e-9;

/// Allowed mismatch between `length` and `power_index × root_length`.
pub const POWER_TOL: f64 = 1e-8;

/// One conjugacy class [γ] of a hyperbolic or loxodromic element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicClass {
    pub length: f64,
    pub holonomy: f64,
    pub multiplicity: u64,
    pub primitive: bool,
    /// Length ℓ(γ₀) of the primitive root.
    pub root_length: f64,
    pub power_index: u32,
}

impl GeodesicClass {
    /// A primitive class with multiplicity one.
    pub fn primitive(length: f64, holonomy: f64) -> Self {
        Self {
            length,
            holonomy: reduce_angle(holonomy),
            multiplicity: 1,
            primitive: true,
            root_length: length,
            power_index: 1,
        }
    }

    /// The class of γ^k for a primitive γ with complex length (root_length, root_holonomy).
    pub fn power(root_length: f64, root_holonomy: f64, k: u32) -> Self {
        let kf = f64::from(k);
        Self {
            length: kf * root_length,
            holonomy: reduce_angle(kf * root_holonomy),
            multiplicity: 1,
            primitive: k == 1,
            root_length,
            power_index: k,
        }
    }

    pub fn with_multiplicity(mut self, m: u64) -> Self {
        self.multiplicity = m;
        self
    }

    /// Checks the record invariants; `row` is used in the error.
    pub fn check(&self, row: usize) -> Result<()> {
        let fail = |what: &str| {
            Err(Error::InvariantViolation {
                row,
                invariant: what.to_string(),
            })
        };
        if !(self.length.is_finite() && self.length > 0.0) {
            return fail("length > 0");
        }
        if !(self.root_length.is_finite() && self.root_length > 0.0) {
            return fail("root_length > 0");
        }
        if !(self.holonomy.is_finite() && self.holonomy > -std::f64::consts::PI && self.holonomy <= std::f64::consts::PI) {
            return fail("holonomy in (-pi, pi]");
        }
        if self.multiplicity == 0 {
            return fail("multiplicity >= 1");
        }
        if self.power_index == 0 {
            return fail("power_index >= 1");
        }
        if self.primitive != (self.power_index == 1) {
            return fail("primitive iff power_index = 1");
        }
        let expected = f64::from(self.power_index) * self.root_length;
        if (self.length - expected).abs() > POWER_TOL * self.length.max(1.0) {
            return fail("length = power_index * root_length");
        }
        Ok(())
    }

    /// Same geodesic data up to [`MERGE_TOL`], ignoring multiplicity.
    fn same_point(&self, other: &Self) -> bool {
        (self.length - other.length).abs() <= MERGE_TOL
            && circle_distance(self.holonomy, other.holonomy) <= MERGE_TOL
    }
}

/// A sorted multiset of geodesic classes up to a horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    classes: Vec<GeodesicClass>,
    systole: f64,
    horizon: f64,
    complete: bool,
}

fn class_order(a: &GeodesicClass, b: &GeodesicClass) -> std::cmp::Ordering {
    a.length
        .total_cmp(&b.length)
        .then(a.holonomy.total_cmp(&b.holonomy))
        .then(a.power_index.cmp(&b.power_index))
        .then(a.root_length.total_cmp(&b.root_length))
}

impl SpectrumTable {
    /// Validates, sorts and merges coincident classes (adding multiplicities).
    ///
    /// `systole` defaults to the minimum length, or to `horizon` for an empty
    /// table; a declared systole above the minimum length is rejected.
    pub fn new(
        classes: Vec<GeodesicClass>,
        horizon: f64,
        complete: bool,
        systole: Option<f64>,
    ) -> Result<Self> {
        for (i, c) in classes.iter().enumerate() {
            c.check(i)?;
        }
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::DomainError(format!("horizon must be finite and >= 0, got {horizon}")));
        }
        let mut sorted = classes;
        sorted.sort_by(class_order);
        let mut merged: Vec<GeodesicClass> = Vec::with_capacity(sorted.len());
        for c in sorted {
            let hit = merged
                .iter_mut()
                .rev()
                .take_while(|m| c.length - m.length <= MERGE_TOL)
                .find(|m| m.same_point(&c));
            match hit {
                Some(m) => {
                    if m.power_index != c.power_index {
                        return Err(Error::InvariantViolation {
                            row: 0,
                            invariant: format!(
                                "coincident classes at length {} disagree on power_index",
                                c.length
                            ),
                        });
                    }
                    m.multiplicity += c.multiplicity;
                }
                None => merged.push(c),
            }
        }
        let min_len = merged.first().map(|c| c.length);
        let systole = match (systole, min_len) {
            (Some(s), Some(m)) if s > m + MERGE_TOL => {
                return Err(Error::InvariantViolation {
                    row: 0,
                    invariant: format!("systole {s} exceeds minimum length {m}"),
                })
            }
            (Some(s), _) => s,
            (None, Some(m)) => m,
            (None, None) => horizon,
        };
        Ok(Self {
            classes: merged,
            systole,
            horizon,
            complete,
        })
    }

    /// An empty table that is complete up to `horizon`.
    pub fn empty(horizon: f64) -> Self {
        Self {
            classes: Vec::new(),
            systole: horizon,
            horizon,
            complete: true,
        }
    }

    /// The powers γ, γ², … of a single primitive class with complex length
    /// (length, holonomy), up to `horizon`. Complete by construction.
    pub fn cyclic(length: f64, holonomy: f64, horizon: f64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::DegenerateLength(length));
        }
        let classes = (1u32..)
            .map(|k| GeodesicClass::power(length, holonomy, k))
            .take_while(|c| c.length <= horizon)
            .collect();
        Self::new(classes, horizon, true, None)
    }

    pub fn classes(&self) -> &[GeodesicClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Minimum geodesic length η₀ (or the declared value).
    pub fn systole(&self) -> f64 {
        self.systole
    }

    /// Length bound up to which the table is asserted complete.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn max_length(&self) -> Option<f64> {
        self.classes.last().map(|c| c.length)
    }

    /// Sum of multiplicities of primitive classes.
    pub fn primitive_count(&self) -> u64 {
        self.classes
            .iter()
            .filter(|c| c.primitive)
            .map(|c| c.multiplicity)
            .sum()
    }

    /// Union of two tables; horizon and completeness take the weaker value.
    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut classes = self.classes.clone();
        classes.extend_from_slice(&other.classes);
        Self::new(
            classes,
            self.horizon.min(other.horizon),
            self.complete && other.complete,
            None,
        )
    }

    /// Classes with length ≤ y; horizon becomes min(horizon, y).
    pub fn truncated(&self, y: f64) -> Self {
        let classes: Vec<_> = self.classes.iter().copied().filter(|c| c.length <= y).collect();
        Self {
            classes,
            systole: self.systole,
            horizon: self.horizon.min(y),
            complete: self.complete,
        }
    }
}
