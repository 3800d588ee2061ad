//! Chain resolution over family graphs.
//!
//! Each step of a chain may refer to a person already in the graph (every
//! structural match is explored as its own branch) or to someone not yet
//! mentioned (one fresh-completion branch, built along the word's default
//! lineage; the graph axioms merge fresh nodes into existing ones wherever
//! the relation is functional, e.g. a fresh "father" of someone whose father
//! is known). "only" qualifiers assert uniqueness: existing referents are
//! unified, and the cardinality is re-checked once the walk completes.

use std::collections::{BTreeMap, BTreeSet};

use super::chain::{AnchorRef, RelationChain};
use super::graph::{FamilyGraph, Gender, KinshipError, PersonId};
use super::words::{could_match, name_relation, CanonicalRelation, PrimitiveStep};

/// Side conditions under which a chain is resolved; all flags default off.
#[derive(Debug, Clone, Default)]
pub struct ResolveOptions {
    /// The phrase describes someone other than the anchor (pointing puzzles,
    /// "X is the ... of Y" statements), so readings whose final referent is
    /// the anchor are discarded.
    pub exclude_anchor_terminal: bool,
    /// No person along the walk may be the anchor.
    pub exclude_anchor_throughout: bool,
    /// Keep only readings whose walk passes through the anchor (the phrase
    /// retraces the anchor's own line).
    pub require_anchor_on_path: bool,
    /// The walk never visits the same person twice nor returns to the anchor.
    pub no_revisit: bool,
    /// Relation words are definite references: while any existing person
    /// matches a step, no fresh person is considered for it.
    pub definite_reference: bool,
    /// Reading overrides for polysemous words, by reading label.
    pub readings: BTreeMap<CanonicalRelation, String>,
}

/// One surviving reading of a chain: the extended graph and the referent.
#[derive(Debug, Clone)]
pub struct ResolvedBranch {
    pub graph: FamilyGraph,
    pub terminal: PersonId,
}

/// All surviving readings of a chain, plus the anchor they started from.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub branches: Vec<ResolvedBranch>,
    pub anchor: PersonId,
}

#[derive(Debug, Clone)]
struct Branch {
    graph: FamilyGraph,
    cur: PersonId,
    /// Everyone visited after the anchor, canonical at insertion time.
    path: Vec<PersonId>,
    /// Uniqueness assertions to re-check once the walk completes.
    unique: Vec<(PersonId, &'static [PrimitiveStep])>,
}

#[derive(Debug, Clone)]
struct MatchHit {
    node: PersonId,
    path: Vec<PersonId>,
    bindings: Vec<(PersonId, Gender)>,
}

fn neighbors(g: &FamilyGraph, at: PersonId, step: PrimitiveStep) -> (Vec<PersonId>, Gender) {
    match step {
        PrimitiveStep::Parent(w) => (g.parents(at), w),
        PrimitiveStep::Child(w) => (g.children(at), w),
        PrimitiveStep::Spouse(w) => (g.spouses(at), w),
        PrimitiveStep::Sibling(w) => (g.siblings(at), w),
    }
}

/// All ways of walking `steps` through existing persons, with the gender
/// commitments each way would impose on unknown-gender persons.
fn match_walk(g: &FamilyGraph, start: PersonId, steps: &[PrimitiveStep]) -> Vec<MatchHit> {
    let mut states = vec![MatchHit {
        node: g.find(start),
        path: Vec::new(),
        bindings: Vec::new(),
    }];
    for &step in steps {
        let mut next = Vec::new();
        for st in &states {
            let (nbrs, want) = neighbors(g, st.node, step);
            for n in nbrs {
                if !could_match(g.gender(n), want) {
                    continue;
                }
                let mut hit = st.clone();
                hit.node = n;
                hit.path.push(n);
                if g.gender(n) == Gender::Unknown && want != Gender::Unknown {
                    hit.bindings.push((n, want));
                }
                next.push(hit);
            }
        }
        states = next;
    }
    states
}

/// Extends the graph with fresh persons along `steps`, returning the terminal
/// and every node visited (canonical, so saturation merges show through).
pub(crate) fn build_walk(
    g: &mut FamilyGraph,
    start: PersonId,
    steps: &[PrimitiveStep],
) -> Result<(PersonId, Vec<PersonId>), KinshipError> {
    let mut cur = g.find(start);
    let mut visited = Vec::new();
    for &step in steps {
        let next = match step {
            PrimitiveStep::Parent(w) => {
                let n = g.add_person(None, w);
                g.add_parent(n, cur)?;
                n
            }
            PrimitiveStep::Child(w) => {
                let n = g.add_person(None, w);
                g.add_parent(cur, n)?;
                n
            }
            PrimitiveStep::Spouse(w) => {
                let n = g.add_person(None, w);
                g.add_spouse(cur, n)?;
                n
            }
            PrimitiveStep::Sibling(w) => {
                g.ensure_both_parents(cur)?;
                let n = g.add_person(None, w);
                for p in g.parents(cur) {
                    g.add_parent(p, n)?;
                }
                n
            }
        };
        cur = g.find(next);
        visited.push(cur);
    }
    Ok((cur, visited))
}

fn on_path(g: &FamilyGraph, path: &[PersonId], id: PersonId) -> bool {
    let id = g.find(id);
    path.iter().any(|&p| g.find(p) == id)
}

fn violates_path_rules(
    g: &FamilyGraph,
    path: &[PersonId],
    added: &[PersonId],
    anchor: PersonId,
    opts: &ResolveOptions,
) -> bool {
    let anchor = g.find(anchor);
    let mut fresh_seen: Vec<PersonId> = Vec::new();
    for &raw in added {
        let n = g.find(raw);
        if opts.exclude_anchor_throughout && n == anchor {
            return true;
        }
        if opts.no_revisit {
            if n == anchor || on_path(g, path, n) || fresh_seen.contains(&n) {
                return true;
            }
            fresh_seen.push(n);
        }
    }
    false
}

fn extend_path(branch: &mut Branch, added: &[PersonId]) {
    for &n in added {
        let c = branch.graph.find(n);
        branch.path.push(c);
    }
}

fn candidate_branch(
    base: &Branch,
    hit: &MatchHit,
    anchor: PersonId,
    opts: &ResolveOptions,
) -> Option<Branch> {
    let mut b = base.clone();
    for &(p, g) in &hit.bindings {
        b.graph.set_gender(p, g).ok()?;
    }
    if violates_path_rules(&b.graph, &b.path, &hit.path, anchor, opts) {
        return None;
    }
    extend_path(&mut b, &hit.path);
    b.cur = b.graph.find(hit.node);
    Some(b)
}

fn fresh_branch(
    base: &Branch,
    builds: &'static [PrimitiveStep],
    anchor: PersonId,
    opts: &ResolveOptions,
) -> Option<Branch> {
    let mut b = base.clone();
    let (term, visited) = build_walk(&mut b.graph, b.cur, builds).ok()?;
    if violates_path_rules(&b.graph, &b.path, &visited, anchor, opts) {
        return None;
    }
    extend_path(&mut b, &visited);
    b.cur = b.graph.find(term);
    Some(b)
}

/// Unifies every structural match of an "only X" step into a single person.
fn merged_branch(
    base: &Branch,
    hits: &[MatchHit],
    anchor: PersonId,
    opts: &ResolveOptions,
) -> Option<Branch> {
    let mut b = base.clone();
    for hit in hits {
        for &(p, g) in &hit.bindings {
            b.graph.set_gender(p, g).ok()?;
        }
    }
    let mut target = b.graph.find(hits[0].node);
    for hit in &hits[1..] {
        target = b.graph.merge(target, hit.node).ok()?;
    }
    if violates_path_rules(&b.graph, &b.path, &hits[0].path, anchor, opts) {
        return None;
    }
    extend_path(&mut b, &hits[0].path);
    b.cur = b.graph.find(target);
    Some(b)
}

fn unique_constraints_hold(b: &Branch) -> bool {
    for &(from, steps) in &b.unique {
        let mut distinct: Vec<PersonId> = Vec::new();
        for hit in match_walk(&b.graph, b.graph.find(from), steps) {
            let n = b.graph.find(hit.node);
            if !distinct.contains(&n) {
                distinct.push(n);
            }
        }
        if distinct.len() > 1 {
            return false;
        }
    }
    true
}

/// Resolves a chain over `context`, returning every reading that survives the
/// side conditions in `opts`. The context is not modified; each branch owns an
/// extended copy, and person ids from the context remain valid in it.
pub fn resolve(
    chain: &RelationChain,
    context: &FamilyGraph,
    opts: &ResolveOptions,
) -> Result<Resolution, KinshipError> {
    let mut graph = context.clone();
    let anchor = match &chain.anchor {
        AnchorRef::Named(name) => graph
            .person_named(name)
            .ok_or_else(|| KinshipError::UnknownPerson(name.clone()))?,
        AnchorRef::Speaker => graph.add_person(None, Gender::Unknown),
    };
    let mut branches = vec![Branch {
        graph,
        cur: anchor,
        path: Vec::new(),
        unique: Vec::new(),
    }];
    for step in &chain.steps {
        let label = opts.readings.get(&step.word).map(String::as_str);
        let reading = step.word.reading(label).ok_or_else(|| {
            KinshipError::VocabularyGap(format!(
                "word {:?} has no reading {:?}",
                step.word.name(),
                label
            ))
        })?;
        let mut next = Vec::new();
        for b in &branches {
            let hits = match_walk(&b.graph, b.cur, reading.matches);
            if step.only {
                let advanced = if hits.is_empty() {
                    fresh_branch(b, reading.builds, anchor, opts)
                } else {
                    merged_branch(b, &hits, anchor, opts)
                };
                if let Some(mut nb) = advanced {
                    nb.unique.push((b.graph.find(b.cur), reading.matches));
                    next.push(nb);
                }
                continue;
            }
            for hit in &hits {
                if let Some(nb) = candidate_branch(b, hit, anchor, opts) {
                    next.push(nb);
                }
            }
            if !(opts.definite_reference && !hits.is_empty()) {
                if let Some(nb) = fresh_branch(b, reading.builds, anchor, opts) {
                    next.push(nb);
                }
            }
        }
        branches = next;
        if branches.is_empty() {
            return Err(KinshipError::Inconsistent(
                "no consistent reading of the chain survives".to_string(),
            ));
        }
    }
    let mut out = Vec::new();
    for b in branches {
        let term = b.graph.find(b.cur);
        if opts.exclude_anchor_terminal && term == b.graph.find(anchor) {
            continue;
        }
        if opts.require_anchor_on_path && !on_path(&b.graph, &b.path, anchor) {
            continue;
        }
        if !unique_constraints_hold(&b) {
            continue;
        }
        out.push(ResolvedBranch {
            graph: b.graph,
            terminal: term,
        });
    }
    if out.is_empty() {
        return Err(KinshipError::Inconsistent(
            "no consistent reading of the chain survives".to_string(),
        ));
    }
    Ok(Resolution {
        branches: out,
        anchor,
    })
}

impl Resolution {
    /// The canonical name of each branch's referent relative to `relative_to`.
    pub fn branch_names(&self, relative_to: PersonId) -> Vec<Option<CanonicalRelation>> {
        self.branches
            .iter()
            .map(|b| name_relation(&b.graph, b.terminal, relative_to))
            .collect()
    }

    /// The single relation the chain denotes relative to `relative_to`.
    /// Readings that name sibling subtypes (paternal vs maternal uncle)
    /// collapse to their common supertype; anything less uniform is Ambiguous.
    pub fn name(&self, relative_to: PersonId) -> Result<CanonicalRelation, KinshipError> {
        let mut names = BTreeSet::new();
        for b in &self.branches {
            match name_relation(&b.graph, b.terminal, relative_to) {
                Some(n) => {
                    names.insert(n);
                }
                None => {
                    return Err(KinshipError::VocabularyGap(
                        "a surviving reading has no canonical name".to_string(),
                    ))
                }
            }
        }
        if names.len() == 1 {
            return Ok(names.into_iter().next().expect("non-empty"));
        }
        let widened: BTreeSet<CanonicalRelation> =
            names.iter().map(|n| n.supertype().unwrap_or(*n)).collect();
        if widened.len() == 1 {
            return Ok(widened.into_iter().next().expect("non-empty"));
        }
        Err(KinshipError::Ambiguous(
            names
                .iter()
                .map(|n| n.name())
                .collect::<Vec<_>>()
                .join(" | "),
        ))
    }
}

/// Resolves a chain and names the referent relative to the anchor.
///
/// Speaker-anchored chains ("... of my grandfather") describe someone other
/// than the speaker, as in pointing puzzles, so the speaker themself is
/// excluded as the referent; chains anchored at a named person have no such
/// restriction (the wife's husband of a married man is the man).
pub fn resolve_chain(
    chain: &RelationChain,
    context: &FamilyGraph,
) -> Result<CanonicalRelation, KinshipError> {
    let mut opts = ResolveOptions::default();
    if chain.anchor == AnchorRef::Speaker {
        opts.exclude_anchor_terminal = true;
    }
    let resolution = resolve(chain, context, &opts)?;
    resolution.name(resolution.anchor)
}
