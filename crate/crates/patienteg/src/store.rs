//! In-memory triple store with subject/predicate/object permutation
//! indexes, sized for event graphs in the tens of thousands of triples.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Iri, Term, Triple};

/// A pattern slot: bound to a concrete term or left open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot<T> {
    Bound(T),
    Any,
}

impl<T> Slot<T> {
    fn as_ref(&self) -> Option<&T> {
        match self {
            Slot::Bound(t) => Some(t),
            Slot::Any => None,
        }
    }
}

#[derive(Debug, Default, Clone)]
pub struct TripleStore {
    spo: BTreeMap<Iri, BTreeMap<Iri, BTreeSet<Term>>>,
    pos: BTreeMap<Iri, BTreeMap<Term, BTreeSet<Iri>>>,
    osp: BTreeMap<Term, BTreeMap<Iri, BTreeSet<Iri>>>,
    size: usize,
}

impl TripleStore {
    pub fn new() -> TripleStore {
        TripleStore::default()
    }

    pub fn from_triples<'a, I>(triples: I) -> TripleStore
    where
        I: IntoIterator<Item = &'a Triple>,
    {
        let mut store = TripleStore::new();
        for t in triples {
            store.insert(t.clone());
        }
        store
    }

    /// Insert one triple; duplicates are ignored. Returns whether the
    /// store grew.
    pub fn insert(&mut self, triple: Triple) -> bool {
        let Triple { subject, predicate, object } = triple;
        let added = self
            .spo
            .entry(subject.clone())
            .or_default()
            .entry(predicate.clone())
            .or_default()
            .insert(object.clone());
        if !added {
            return false;
        }
        self.pos
            .entry(predicate.clone())
            .or_default()
            .entry(object.clone())
            .or_default()
            .insert(subject.clone());
        self.osp.entry(object).or_default().entry(subject).or_default().insert(predicate);
        self.size += 1;
        true
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.spo
            .get(&t.subject)
            .and_then(|p| p.get(&t.predicate))
            .is_some_and(|o| o.contains(&t.object))
    }

    /// All triples in (subject, predicate, object) order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().flat_map(|(s, pm)| {
            pm.iter().flat_map(move |(p, os)| {
                os.iter().map(move |o| Triple {
                    subject: s.clone(),
                    predicate: p.clone(),
                    object: o.clone(),
                })
            })
        })
    }

    /// Triples matching the pattern, in deterministic index order. Each
    /// bound-slot combination routes to the index that makes the lookup
    /// a prefix scan.
    pub fn match_pattern(
        &self,
        subject: &Slot<Iri>,
        predicate: &Slot<Iri>,
        object: &Slot<Term>,
    ) -> Vec<Triple> {
        let mut out = Vec::new();
        match (subject.as_ref(), predicate.as_ref(), object.as_ref()) {
            (Some(s), Some(p), Some(o)) => {
                let t = Triple { subject: s.clone(), predicate: p.clone(), object: o.clone() };
                if self.contains(&t) {
                    out.push(t);
                }
            }
            (Some(s), Some(p), None) => {
                if let Some(os) = self.spo.get(s).and_then(|pm| pm.get(p)) {
                    out.extend(os.iter().map(|o| Triple {
                        subject: s.clone(),
                        predicate: p.clone(),
                        object: o.clone(),
                    }));
                }
            }
            (Some(s), None, None) => {
                if let Some(pm) = self.spo.get(s) {
                    for (p, os) in pm {
                        out.extend(os.iter().map(|o| Triple {
                            subject: s.clone(),
                            predicate: p.clone(),
                            object: o.clone(),
                        }));
                    }
                }
            }
            (None, Some(p), Some(o)) => {
                if let Some(ss) = self.pos.get(p).and_then(|om| om.get(o)) {
                    out.extend(ss.iter().map(|s| Triple {
                        subject: s.clone(),
                        predicate: p.clone(),
                        object: o.clone(),
                    }));
                }
            }
            (None, None, Some(o)) => {
                if let Some(sm) = self.osp.get(o) {
                    for (s, ps) in sm {
                        out.extend(ps.iter().map(|p| Triple {
                            subject: s.clone(),
                            predicate: p.clone(),
                            object: o.clone(),
                        }));
                    }
                }
            }
            (Some(s), None, Some(o)) => {
                if let Some(ps) = self.osp.get(o).and_then(|sm| sm.get(s)) {
                    out.extend(ps.iter().map(|p| Triple {
                        subject: s.clone(),
                        predicate: p.clone(),
                        object: o.clone(),
                    }));
                }
            }
            (None, Some(p), None) => {
                if let Some(om) = self.pos.get(p) {
                    for (o, ss) in om {
                        out.extend(ss.iter().map(|s| Triple {
                            subject: s.clone(),
                            predicate: p.clone(),
                            object: o.clone(),
                        }));
                    }
                }
            }
            (None, None, None) => out.extend(self.iter()),
        }
        out
    }

    /// Matching-triple count without materializing the triples.
    pub fn count_pattern(
        &self,
        subject: &Slot<Iri>,
        predicate: &Slot<Iri>,
        object: &Slot<Term>,
    ) -> usize {
        match (subject.as_ref(), predicate.as_ref(), object.as_ref()) {
            (Some(s), Some(p), Some(o)) => {
                let t = Triple { subject: s.clone(), predicate: p.clone(), object: o.clone() };
                usize::from(self.contains(&t))
            }
            (Some(s), Some(p), None) => {
                self.spo.get(s).and_then(|pm| pm.get(p)).map_or(0, BTreeSet::len)
            }
            (Some(s), None, None) => {
                self.spo.get(s).map_or(0, |pm| pm.values().map(BTreeSet::len).sum())
            }
            (None, Some(p), Some(o)) => {
                self.pos.get(p).and_then(|om| om.get(o)).map_or(0, BTreeSet::len)
            }
            (None, None, Some(o)) => {
                self.osp.get(o).map_or(0, |sm| sm.values().map(BTreeSet::len).sum())
            }
            (Some(s), None, Some(o)) => {
                self.osp.get(o).and_then(|sm| sm.get(s)).map_or(0, BTreeSet::len)
            }
            (None, Some(p), None) => {
                self.pos.get(p).map_or(0, |om| om.values().map(BTreeSet::len).sum())
            }
            (None, None, None) => self.size,
        }
    }
}
