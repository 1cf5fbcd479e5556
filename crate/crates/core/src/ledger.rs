//! Counting comparator and fragility profiles.
//!
//! Every ordering query an algorithm makes goes through [`Ledger::compare`]
//! (or [`Ledger::compare_strict`]), which charges one unit to each of the two
//! elements involved. Oracles and verifiers use the `audit_*` family, which
//! answers the same question without touching the counters.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stable handle to one input element of a ledger session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(usize);

impl ElementId {
    /// Raw handle; validity is checked by the ledger on use.
    pub fn from_index(index: usize) -> Self {
        ElementId(index)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Role labels attached to elements when building a profile.
pub type RoleMap = BTreeMap<ElementId, String>;

/// Label given to elements missing from a supplied [`RoleMap`].
pub const UNLABELED_ROLE: &str = "unlabeled";

/// The sole gateway for ordering queries within one session.
///
/// A ledger is `Send` but not `Sync`: it may move between threads but is never
/// shared. Parallel experiments run one session per trial.
#[derive(Debug)]
pub struct Ledger<T> {
    values: Vec<T>,
    counts: Vec<u64>,
    total: u64,
    audit_total: Cell<u64>,
    phases: Vec<(String, Vec<u64>)>,
    active_phase: Option<usize>,
    log: Option<Vec<(ElementId, ElementId)>>,
}

impl<T: Ord> Ledger<T> {
    /// Opens a session over `values`; ids are returned in input order.
    pub fn new(values: Vec<T>) -> Result<(Self, Vec<ElementId>)> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = values.len();
        let ledger = Ledger {
            values,
            counts: vec![0; n],
            total: 0,
            audit_total: Cell::new(0),
            phases: Vec::new(),
            active_phase: None,
            log: None,
        };
        Ok((ledger, (0..n).map(ElementId).collect()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.values.len()).map(ElementId)
    }

    /// Resolves a raw index into an id of this session.
    pub fn id(&self, index: usize) -> Result<ElementId> {
        if index < self.values.len() {
            Ok(ElementId(index))
        } else {
            Err(Error::UnknownElement(ElementId(index)))
        }
    }

    fn check(&self, a: ElementId, b: ElementId) -> Result<()> {
        for id in [a, b] {
            if id.0 >= self.values.len() {
                return Err(Error::UnknownElement(id));
            }
        }
        if a == b {
            return Err(Error::SelfComparison(a));
        }
        Ok(())
    }

    /// Three-way payload comparison, charged to both elements.
    pub fn compare(&mut self, a: ElementId, b: ElementId) -> Result<Ordering> {
        self.check(a, b)?;
        self.charge(a, b);
        Ok(self.values[a.0].cmp(&self.values[b.0]))
    }

    /// Counted comparison under the strict total order (payload, then id).
    ///
    /// Ties are resolved by id without an extra counted comparison.
    pub fn compare_strict(&mut self, a: ElementId, b: ElementId) -> Result<Ordering> {
        Ok(self.compare(a, b)?.then(a.0.cmp(&b.0)))
    }

    /// `true` iff `a` precedes `b` in the strict total order. Counted.
    pub fn less(&mut self, a: ElementId, b: ElementId) -> Result<bool> {
        Ok(self.compare_strict(a, b)? == Ordering::Less)
    }

    /// Uncounted payload comparison for oracles.
    pub fn audit_compare(&self, a: ElementId, b: ElementId) -> Result<Ordering> {
        self.check(a, b)?;
        self.audit_total.set(self.audit_total.get() + 1);
        Ok(self.values[a.0].cmp(&self.values[b.0]))
    }

    /// Uncounted strict-order comparison; equal ids compare `Equal`.
    pub fn audit_compare_strict(&self, a: ElementId, b: ElementId) -> Result<Ordering> {
        if a == b {
            self.id(a.0)?;
            return Ok(Ordering::Equal);
        }
        Ok(self.audit_compare(a, b)?.then(a.0.cmp(&b.0)))
    }

    /// Sorts `ids` ascending in the strict order using audit comparisons only.
    pub fn audit_sorted(&self, ids: &[ElementId]) -> Result<Vec<ElementId>> {
        for &id in ids {
            if id.0 >= self.values.len() {
                return Err(Error::UnknownElement(id));
            }
        }
        let mut out = ids.to_vec();
        let audited = Cell::new(0u64);
        out.sort_by(|&a, &b| {
            audited.set(audited.get() + 1);
            self.values[a.0].cmp(&self.values[b.0]).then(a.0.cmp(&b.0))
        });
        self.audit_total.set(self.audit_total.get() + audited.get());
        Ok(out)
    }

    fn charge(&mut self, a: ElementId, b: ElementId) {
        for id in [a, b] {
            self.counts[id.0] = self.counts[id.0]
                .checked_add(1)
                .expect("fragility counter overflow");
        }
        self.total += 1;
        if let Some(p) = self.active_phase {
            let counts = &mut self.phases[p].1;
            counts[a.0] += 1;
            counts[b.0] += 1;
        }
        if let Some(log) = self.log.as_mut() {
            log.push((a, b));
        }
    }
}

impl<T> Ledger<T> {
    pub fn count(&self, id: ElementId) -> u64 {
        self.counts.get(id.0).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn audit_total(&self) -> u64 {
        self.audit_total.get()
    }

    /// Routes subsequent counted comparisons into the named phase as well.
    pub fn set_phase(&mut self, name: &str) {
        let idx = match self.phases.iter().position(|(p, _)| p == name) {
            Some(i) => i,
            None => {
                self.phases
                    .push((name.to_owned(), vec![0; self.values.len()]));
                self.phases.len() - 1
            }
        };
        self.active_phase = Some(idx);
    }

    pub fn clear_phase(&mut self) {
        self.active_phase = None;
    }

    pub fn phase_names(&self) -> impl Iterator<Item = &str> {
        self.phases.iter().map(|(p, _)| p.as_str())
    }

    /// Count charged to `id` while `phase` was active (0 for unknown phases).
    pub fn phase_count(&self, phase: &str, id: ElementId) -> u64 {
        self.phases
            .iter()
            .find(|(p, _)| p == phase)
            .and_then(|(_, c)| c.get(id.0).copied())
            .unwrap_or(0)
    }

    /// Starts logging every counted comparison pair.
    pub fn start_recording(&mut self) {
        self.log = Some(Vec::new());
    }

    /// Returns the pairs logged since the last `start_recording` and keeps
    /// recording into a fresh log.
    pub fn take_recording(&mut self) -> Vec<(ElementId, ElementId)> {
        match self.log.as_mut() {
            Some(log) => std::mem::take(log),
            None => Vec::new(),
        }
    }

    pub fn stop_recording(&mut self) -> Vec<(ElementId, ElementId)> {
        self.log.take().unwrap_or_default()
    }

    pub fn profile(&self, roles: Option<&RoleMap>) -> FragilityProfile {
        FragilityProfile::from_counts(self.counts.clone(), roles, None)
    }

    pub fn phase_profile(&self, phase: &str, roles: Option<&RoleMap>) -> Option<FragilityProfile> {
        self.phases
            .iter()
            .find(|(p, _)| p == phase)
            .map(|(p, c)| FragilityProfile::from_counts(c.clone(), roles, Some(p.clone())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleStats {
    pub population: usize,
    pub max: u64,
    pub mean: f64,
}

/// Snapshot of per-element comparison counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragilityProfile {
    pub phase: Option<String>,
    pub population: usize,
    pub sum: u64,
    pub max: u64,
    pub mean: f64,
    pub by_role: BTreeMap<String, RoleStats>,
    /// Role per element index; empty when no role map was supplied.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub roles: Vec<String>,
    pub per_element: Vec<u64>,
}

impl FragilityProfile {
    pub fn from_counts(
        per_element: Vec<u64>,
        roles: Option<&RoleMap>,
        phase: Option<String>,
    ) -> Self {
        let population = per_element.len();
        let sum: u64 = per_element.iter().sum();
        let max = per_element.iter().copied().max().unwrap_or(0);
        let mean = if population == 0 {
            0.0
        } else {
            sum as f64 / population as f64
        };
        let mut by_role = BTreeMap::new();
        let mut labels = Vec::new();
        if let Some(map) = roles {
            labels = (0..population)
                .map(|i| {
                    map.get(&ElementId(i))
                        .cloned()
                        .unwrap_or_else(|| UNLABELED_ROLE.to_owned())
                })
                .collect();
            let mut acc: BTreeMap<&str, (usize, u64, u64)> = BTreeMap::new();
            for (label, &c) in labels.iter().zip(&per_element) {
                let e = acc.entry(label.as_str()).or_default();
                e.0 += 1;
                e.1 = e.1.max(c);
                e.2 += c;
            }
            for (label, (pop, mx, s)) in acc {
                by_role.insert(
                    label.to_owned(),
                    RoleStats {
                        population: pop,
                        max: mx,
                        mean: s as f64 / pop as f64,
                    },
                );
            }
        }
        FragilityProfile {
            phase,
            population,
            sum,
            max,
            mean,
            by_role,
            roles: labels,
            per_element,
        }
    }

    pub fn get(&self, id: ElementId) -> u64 {
        self.per_element.get(id.0).copied().unwrap_or(0)
    }

    /// CSV with header `element_index,role,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("element_index,role,count\n");
        for (i, c) in self.per_element.iter().enumerate() {
            let role = self.roles.get(i).map(String::as_str).unwrap_or("");
            let _ = writeln!(out, "{i},{role},{c}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }
}
