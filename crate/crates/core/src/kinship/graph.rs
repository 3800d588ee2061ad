//! Family graphs with the default puzzle axioms baked in.
//!
//! The graph stores persons, parent edges, and spouse edges, and keeps itself
//! closed under the conventions these puzzles assume: monogamy, at most one
//! father and one mother per person, co-parents are married, a parent's
//! spouse is also a parent (no step-families), and ancestry is acyclic.
//! Operations that would force two distinct named persons together, give
//! someone a third parent, or create an ancestry cycle fail with
//! [`KinshipError::Inconsistent`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Binary-or-unknown gender, settled lazily as puzzle text pins it down.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gender {
    Male,
    Female,
    #[default]
    Unknown,
}

/// Handle to a person; stays valid across merges (lookups follow redirects).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PersonId(pub(crate) usize);

#[derive(Debug, Clone, Default)]
struct Person {
    name: Option<String>,
    gender: Gender,
    parents: Vec<PersonId>,
    children: Vec<PersonId>,
    spouses: Vec<PersonId>,
    /// When `Some`, this slot was merged away; follow the redirect.
    merged_into: Option<PersonId>,
}

/// Errors shared across the kinship engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KinshipError {
    #[error("relation word not in the supported vocabulary: {0:?}")]
    UnknownRelationWord(String),
    #[error("malformed relation phrase: {0}")]
    MalformedPossessive(String),
    #[error("no person named {0:?} in the puzzle context")]
    UnknownPerson(String),
    #[error("chain admits multiple non-equivalent readings: {0}")]
    Ambiguous(String),
    #[error("facts are inconsistent: {0}")]
    Inconsistent(String),
    #[error("no canonical name for the resolved relation: {0}")]
    VocabularyGap(String),
    #[error("puzzle contains no relation word substitutable at this level")]
    NoSubstitutableWord,
}

/// A small in-memory family graph under the default puzzle axioms.
#[derive(Debug, Clone, Default)]
pub struct FamilyGraph {
    persons: Vec<Person>,
}

impl FamilyGraph {
    pub fn new() -> FamilyGraph {
        FamilyGraph::default()
    }

    /// Adds a person; `name` is optional (placeholders along chains are
    /// unnamed). Named persons are assumed pairwise distinct.
    pub fn add_person(&mut self, name: Option<&str>, gender: Gender) -> PersonId {
        let id = PersonId(self.persons.len());
        self.persons.push(Person {
            name: name.map(str::to_string),
            gender,
            ..Person::default()
        });
        id
    }

    /// Canonical id after any merges.
    pub fn find(&self, id: PersonId) -> PersonId {
        let mut cur = id;
        while let Some(next) = self.persons[cur.0].merged_into {
            cur = next;
        }
        cur
    }

    fn live(&self, id: PersonId) -> &Person {
        &self.persons[self.find(id).0]
    }

    pub fn gender(&self, id: PersonId) -> Gender {
        self.live(id).gender
    }

    pub fn name(&self, id: PersonId) -> Option<&str> {
        self.live(id).name.as_deref()
    }

    /// Looks a person up by name.
    pub fn person_named(&self, name: &str) -> Option<PersonId> {
        (0..self.persons.len())
            .map(PersonId)
            .filter(|&p| self.find(p) == p)
            .find(|&p| self.persons[p.0].name.as_deref() == Some(name))
    }

    pub fn parents(&self, id: PersonId) -> Vec<PersonId> {
        self.canonical_list(&self.live(id).parents)
    }

    pub fn children(&self, id: PersonId) -> Vec<PersonId> {
        self.canonical_list(&self.live(id).children)
    }

    pub fn spouses(&self, id: PersonId) -> Vec<PersonId> {
        self.canonical_list(&self.live(id).spouses)
    }

    /// Persons sharing at least one parent with `id` (full siblings under the
    /// default axioms), excluding `id` itself.
    pub fn siblings(&self, id: PersonId) -> Vec<PersonId> {
        let me = self.find(id);
        let mut out = Vec::new();
        for p in self.parents(me) {
            for c in self.children(p) {
                if c != me && !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out
    }

    fn canonical_list(&self, raw: &[PersonId]) -> Vec<PersonId> {
        let mut out = Vec::new();
        for &r in raw {
            let c = self.find(r);
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    /// All live person ids.
    pub fn persons(&self) -> Vec<PersonId> {
        (0..self.persons.len())
            .map(PersonId)
            .filter(|&p| self.find(p) == p)
            .collect()
    }

    /// Constrains a person's gender; `Unknown` never overrides a known one.
    pub fn set_gender(&mut self, id: PersonId, gender: Gender) -> Result<(), KinshipError> {
        let id = self.find(id);
        let current = self.persons[id.0].gender;
        match (current, gender) {
            (_, Gender::Unknown) => Ok(()),
            (Gender::Unknown, g) => {
                self.persons[id.0].gender = g;
                Ok(())
            }
            (a, b) if a == b => Ok(()),
            (a, b) => Err(KinshipError::Inconsistent(format!(
                "{} cannot be both {a:?} and {b:?}",
                self.describe(id)
            ))),
        }
    }

    fn describe(&self, id: PersonId) -> String {
        match self.name(id) {
            Some(n) => n.to_string(),
            None => format!("person #{}", self.find(id).0),
        }
    }

    /// Records `parent` as a parent of `child`, then re-closes the axioms.
    pub fn add_parent(&mut self, parent: PersonId, child: PersonId) -> Result<(), KinshipError> {
        let (parent, child) = (self.find(parent), self.find(child));
        if parent == child {
            return Err(KinshipError::Inconsistent(format!(
                "{} cannot be their own parent",
                self.describe(parent)
            )));
        }
        if !self.persons[child.0].parents.contains(&parent) {
            self.persons[child.0].parents.push(parent);
            self.persons[parent.0].children.push(child);
        }
        self.saturate()
    }

    /// Records a (symmetric) marriage, then re-closes the axioms.
    pub fn add_spouse(&mut self, a: PersonId, b: PersonId) -> Result<(), KinshipError> {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return Err(KinshipError::Inconsistent(format!(
                "{} cannot be married to themself",
                self.describe(a)
            )));
        }
        if !self.persons[a.0].spouses.contains(&b) {
            self.persons[a.0].spouses.push(b);
            self.persons[b.0].spouses.push(a);
        }
        self.saturate()
    }

    /// Makes `a` and `b` full siblings: both acquire each other's parents,
    /// and missing parent slots are filled with shared placeholders.
    pub fn add_sibling(&mut self, a: PersonId, b: PersonId) -> Result<(), KinshipError> {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return Err(KinshipError::Inconsistent(format!(
                "{} cannot be their own sibling",
                self.describe(a)
            )));
        }
        self.ensure_both_parents(a)?;
        for p in self.parents(a) {
            self.add_parent(p, b)?;
        }
        Ok(())
    }

    /// Ensures the person has a male and a female parent, creating unnamed
    /// placeholders where missing.
    pub fn ensure_both_parents(&mut self, id: PersonId) -> Result<(), KinshipError> {
        for g in [Gender::Male, Gender::Female] {
            let has = self
                .parents(id)
                .iter()
                .any(|&p| self.gender(p) == g || self.gender(p) == Gender::Unknown);
            if !has {
                let fresh = self.add_person(None, g);
                self.add_parent(fresh, id)?;
            }
        }
        Ok(())
    }

    /// Merges `b` into `a` (same real-world person), then re-closes.
    pub fn merge(&mut self, a: PersonId, b: PersonId) -> Result<PersonId, KinshipError> {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return Ok(a);
        }
        match (&self.persons[a.0].name, &self.persons[b.0].name) {
            (Some(x), Some(y)) if x != y => {
                return Err(KinshipError::Inconsistent(format!(
                    "distinct persons {x} and {y} cannot be the same individual"
                )));
            }
            (None, Some(_)) => {
                self.persons[a.0].name = self.persons[b.0].name.clone();
            }
            _ => {}
        }
        let gb = self.persons[b.0].gender;
        self.set_gender(a, gb)?;
        let moved = self.persons[b.0].clone();
        self.persons[b.0].merged_into = Some(a);
        self.persons[a.0].parents.extend(moved.parents);
        self.persons[a.0].children.extend(moved.children);
        self.persons[a.0].spouses.extend(moved.spouses);
        self.saturate()?;
        Ok(self.find(a))
    }

    /// Re-establishes the default axioms by merging nodes they force
    /// together, until nothing changes. Fails if an axiom is violated in a
    /// way merging cannot repair.
    fn saturate(&mut self) -> Result<(), KinshipError> {
        loop {
            let mut changed = false;
            for raw in 0..self.persons.len() {
                let id = PersonId(raw);
                if self.find(id) != id {
                    continue;
                }
                // Monogamy: a person's spouses are one person.
                let spouses = self.spouses(id);
                if spouses.contains(&id) {
                    return Err(KinshipError::Inconsistent(format!(
                        "{} married to themself",
                        self.describe(id)
                    )));
                }
                if spouses.len() > 1 {
                    self.merge_pair(spouses[0], spouses[1])?;
                    changed = true;
                    break;
                }
                // At most one father and one mother.
                let parents = self.parents(id);
                if parents.contains(&id) {
                    return Err(KinshipError::Inconsistent(format!(
                        "{} is their own parent",
                        self.describe(id)
                    )));
                }
                if let Some(pair) = same_gender_pair(self, &parents) {
                    self.merge_pair(pair.0, pair.1)?;
                    changed = true;
                    break;
                }
                if parents.len() > 2 {
                    return Err(KinshipError::Inconsistent(format!(
                        "{} has more than two parents",
                        self.describe(id)
                    )));
                }
                // Co-parents are spouses.
                if parents.len() == 2 && !self.spouses(parents[0]).contains(&parents[1]) {
                    let (p0, p1) = (parents[0], parents[1]);
                    self.persons[p0.0].spouses.push(p1);
                    self.persons[p1.0].spouses.push(p0);
                    changed = true;
                    break;
                }
                // A parent's spouse is the other parent (no step-families).
                if let Some(&s) = self.spouses(id).first() {
                    let mut missing = Vec::new();
                    for c in self.children(id) {
                        if !self.parents(c).contains(&s) {
                            missing.push(c);
                        }
                    }
                    if !missing.is_empty() {
                        for c in missing {
                            self.persons[c.0].parents.push(s);
                            self.persons[s.0].children.push(c);
                        }
                        changed = true;
                        break;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.check_acyclic()
    }

    fn merge_pair(&mut self, a: PersonId, b: PersonId) -> Result<(), KinshipError> {
        self.merge(a, b).map(|_| ())
    }

    fn check_acyclic(&self) -> Result<(), KinshipError> {
        for start in self.persons() {
            let mut seen = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(n) = stack.pop() {
                for p in self.parents(n) {
                    if p == start {
                        return Err(KinshipError::Inconsistent(format!(
                            "{} is their own ancestor",
                            self.describe(start)
                        )));
                    }
                    if seen.insert(p) {
                        stack.push(p);
                    }
                }
            }
        }
        Ok(())
    }
}

fn same_gender_pair(g: &FamilyGraph, parents: &[PersonId]) -> Option<(PersonId, PersonId)> {
    for (i, &a) in parents.iter().enumerate() {
        for &b in &parents[i + 1..] {
            let (ga, gb) = (g.gender(a), g.gender(b));
            if ga != Gender::Unknown && ga == gb {
                return Some((a, b));
            }
        }
    }
    None
}
