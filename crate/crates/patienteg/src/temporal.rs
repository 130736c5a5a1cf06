//! The five temporal relations between same-patient events.
//!
//! `build_full` records every pairwise relation; `build_reduced` stores a
//! smaller set (concurrent chains and consecutive Before links between
//! point events) from which `infer_closure` recovers the full set. The
//! boundary semantics are: Before is strict (end < begin), containment is
//! inclusive on both ends, and intervals that share only a boundary
//! instant overlap.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{Interval, Iri, MedicalEvent, RelationKind, TemporalEdge, Triple};
use crate::vocab;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemporalError {
    #[error("events {a} and {b} belong to different patients")]
    CrossPatientComparison { a: String, b: String },
    #[error("edges imply both Before and After between {a} and {b}")]
    InconsistentEdges { a: String, b: String },
}

/// Point or period, per the interval's shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeType {
    Point,
    Period,
}

pub fn classify_time_type(event: &MedicalEvent) -> TimeType {
    if event.interval.is_point() {
        TimeType::Point
    } else {
        TimeType::Period
    }
}

/// The directed relation of interval `a` relative to interval `b`.
/// Checks run in a fixed precedence order, which makes the outcome total
/// and exclusive: equality, disjointness, containment, then overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalRelation {
    Concurrent,
    Before,
    After,
    /// a lies within b
    DuringForward,
    /// b lies within a
    DuringReverse,
    /// a starts within b and ends after it
    OverlapForward,
    /// b starts within a and ends after it
    OverlapReverse,
}

pub fn interval_relation(a: Interval, b: Interval) -> IntervalRelation {
    if a.begin() == b.begin() && a.end() == b.end() {
        IntervalRelation::Concurrent
    } else if a.end() < b.begin() {
        IntervalRelation::Before
    } else if b.end() < a.begin() {
        IntervalRelation::After
    } else if a.begin() >= b.begin() && a.end() <= b.end() {
        IntervalRelation::DuringForward
    } else if b.begin() >= a.begin() && b.end() <= a.end() {
        IntervalRelation::DuringReverse
    } else if b.begin() <= a.begin() && a.begin() <= b.end() && a.end() > b.end() {
        IntervalRelation::OverlapForward
    } else {
        debug_assert!(a.begin() <= b.begin() && b.begin() <= a.end() && b.end() > a.end());
        IntervalRelation::OverlapReverse
    }
}

/// The directed edges one event pair contributes: inverse pairs for
/// Before/After, both directions for Concurrent, a single directed edge
/// for During/Overlap.
pub fn relate(a: &MedicalEvent, b: &MedicalEvent) -> Result<Vec<TemporalEdge>, TemporalError> {
    if a.patient != b.patient {
        return Err(TemporalError::CrossPatientComparison {
            a: a.id.to_string(),
            b: b.id.to_string(),
        });
    }
    debug_assert!(a.id != b.id, "relate needs two distinct events");
    let edge = |from: &MedicalEvent, rel, to: &MedicalEvent| {
        TemporalEdge::new(from.id.clone(), rel, to.id.clone())
    };
    Ok(match interval_relation(a.interval, b.interval) {
        IntervalRelation::Concurrent => vec![
            edge(a, RelationKind::Concurrent, b),
            edge(b, RelationKind::Concurrent, a),
        ],
        IntervalRelation::Before => {
            vec![edge(a, RelationKind::Before, b), edge(b, RelationKind::After, a)]
        }
        IntervalRelation::After => {
            vec![edge(a, RelationKind::After, b), edge(b, RelationKind::Before, a)]
        }
        IntervalRelation::DuringForward => vec![edge(a, RelationKind::During, b)],
        IntervalRelation::DuringReverse => vec![edge(b, RelationKind::During, a)],
        IntervalRelation::OverlapForward => vec![edge(a, RelationKind::Overlap, b)],
        IntervalRelation::OverlapReverse => vec![edge(b, RelationKind::Overlap, a)],
    })
}

/// All of one patient's events, sorted by (begin, end, id).
#[derive(Debug, Clone)]
pub struct PatientTimeline {
    pub patient: Iri,
    pub events: Vec<MedicalEvent>,
}

impl PatientTimeline {
    pub fn new(patient: Iri, mut events: Vec<MedicalEvent>) -> Result<PatientTimeline, TemporalError> {
        for e in &events {
            if e.patient != patient {
                return Err(TemporalError::CrossPatientComparison {
                    a: patient.to_string(),
                    b: e.id.to_string(),
                });
            }
        }
        events.sort_by(|x, y| {
            (x.interval.begin(), x.interval.end(), &x.id)
                .cmp(&(y.interval.begin(), y.interval.end(), &y.id))
        });
        Ok(PatientTimeline { patient, events })
    }
}

fn finish(mut edges: Vec<TemporalEdge>) -> Vec<TemporalEdge> {
    edges.sort();
    edges.dedup();
    edges
}

/// Every pairwise relation, exhaustively.
pub fn build_full(timeline: &PatientTimeline) -> Vec<TemporalEdge> {
    let mut edges = Vec::new();
    for (i, a) in timeline.events.iter().enumerate() {
        for b in &timeline.events[i + 1..] {
            edges.extend(relate(a, b).expect("timeline is same-patient"));
        }
    }
    finish(edges)
}

/// The reduced construction: point events at one timestamp form a
/// concurrent chain; consecutive timestamps are linked once through their
/// smallest-id representatives; every pair involving a period is stored
/// directly. `infer_closure` on the result reproduces `build_full`.
pub fn build_reduced(timeline: &PatientTimeline) -> Vec<TemporalEdge> {
    let mut edges = Vec::new();
    let (points, periods): (Vec<&MedicalEvent>, Vec<&MedicalEvent>) = timeline
        .events
        .iter()
        .partition(|e| e.interval.is_point());

    let mut groups: BTreeMap<_, Vec<&MedicalEvent>> = BTreeMap::new();
    for p in &points {
        groups.entry(p.interval.begin()).or_default().push(p);
    }
    for members in groups.values_mut() {
        members.sort_by(|x, y| x.id.cmp(&y.id));
        for pair in members.windows(2) {
            edges.push(TemporalEdge::new(pair[0].id.clone(), RelationKind::Concurrent, pair[1].id.clone()));
            edges.push(TemporalEdge::new(pair[1].id.clone(), RelationKind::Concurrent, pair[0].id.clone()));
        }
    }
    let representatives: Vec<&MedicalEvent> = groups.values().map(|g| g[0]).collect();
    for pair in representatives.windows(2) {
        edges.push(TemporalEdge::new(pair[0].id.clone(), RelationKind::Before, pair[1].id.clone()));
        edges.push(TemporalEdge::new(pair[1].id.clone(), RelationKind::After, pair[0].id.clone()));
    }

    for (i, a) in periods.iter().enumerate() {
        for b in &periods[i + 1..] {
            edges.extend(relate(a, b).expect("timeline is same-patient"));
        }
        for p in &points {
            edges.extend(relate(a, p).expect("timeline is same-patient"));
        }
    }
    finish(edges)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins, keeping representatives deterministic.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Fixed point of the inference rules: Concurrent is symmetric and
/// transitive; Before composes with itself and with Concurrent on either
/// side; After stays the exact inverse of Before. During and Overlap pass
/// through untouched.
pub fn infer_closure(edges: &[TemporalEdge]) -> Result<Vec<TemporalEdge>, TemporalError> {
    let mut nodes: BTreeSet<&Iri> = BTreeSet::new();
    for e in edges {
        nodes.insert(&e.from);
        nodes.insert(&e.to);
    }
    let nodes: Vec<&Iri> = nodes.into_iter().collect();
    let index: BTreeMap<&Iri, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();

    let mut uf = UnionFind::new(nodes.len());
    for e in edges {
        if e.rel == RelationKind::Concurrent {
            uf.union(index[&e.from], index[&e.to]);
        }
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..nodes.len() {
        members.entry(uf.find(i)).or_default().push(i);
    }

    let mut comp_before: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for e in edges {
        let (from, to) = match e.rel {
            RelationKind::Before => (&e.from, &e.to),
            RelationKind::After => (&e.to, &e.from),
            _ => continue,
        };
        let (cf, ct) = (uf.find(index[from]), uf.find(index[to]));
        if cf == ct {
            return Err(TemporalError::InconsistentEdges {
                a: from.to_string(),
                b: to.to_string(),
            });
        }
        comp_before.entry(cf).or_default().insert(ct);
    }

    // Reachability per component over the Before DAG.
    let comps: Vec<usize> = members.keys().copied().collect();
    let mut reach: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &start in &comps {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = comp_before.get(&start).into_iter().flatten().copied().collect();
        while let Some(c) = stack.pop() {
            if c == start {
                let a = nodes[members[&start][0]];
                return Err(TemporalError::InconsistentEdges {
                    a: a.to_string(),
                    b: a.to_string(),
                });
            }
            if seen.insert(c) {
                stack.extend(comp_before.get(&c).into_iter().flatten().copied());
            }
        }
        reach.insert(start, seen);
    }

    let mut out = Vec::new();
    for (&comp, ids) in &members {
        for &i in ids {
            for &j in ids {
                if i != j {
                    out.push(TemporalEdge::new(
                        nodes[i].clone(),
                        RelationKind::Concurrent,
                        nodes[j].clone(),
                    ));
                }
            }
        }
        for &target in &reach[&comp] {
            for &i in ids {
                for &j in &members[&target] {
                    out.push(TemporalEdge::new(nodes[i].clone(), RelationKind::Before, nodes[j].clone()));
                    out.push(TemporalEdge::new(nodes[j].clone(), RelationKind::After, nodes[i].clone()));
                }
            }
        }
    }
    for e in edges {
        if matches!(e.rel, RelationKind::During | RelationKind::Overlap) {
            out.push(e.clone());
        }
    }
    Ok(finish(out))
}

/// One triple per edge: (from, relation predicate, to), sorted.
pub fn edges_to_triples(edges: &[TemporalEdge]) -> Vec<Triple> {
    let mut sorted = edges.to_vec();
    sorted.sort();
    sorted.dedup();
    sorted
        .iter()
        .map(|e| {
            Triple::new(e.from.clone(), vocab::relation_predicate(e.rel), e.to.clone())
                .expect("relation predicates are vocabulary")
        })
        .collect()
}

/// Edge totals per relation kind, for reporting.
pub fn relation_counts(edges: &[TemporalEdge]) -> BTreeMap<RelationKind, usize> {
    let mut counts = BTreeMap::new();
    for rel in RelationKind::ALL {
        counts.insert(rel, 0);
    }
    for e in edges {
        *counts.get_mut(&e.rel).expect("all kinds present") += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EventKind, Timestamp};
    use std::collections::BTreeSet;

    fn ts(s: &str) -> Timestamp {
        Timestamp::parse(s).unwrap()
    }

    fn event(id: &str, patient: &str, begin: &str, end: &str) -> MedicalEvent {
        MedicalEvent {
            id: Iri::resource(id),
            kind: if begin == end { EventKind::Diagnosis } else { EventKind::Drug },
            patient: Iri::resource(patient),
            entities: BTreeSet::new(),
            interval: Interval::new(ts(begin), ts(end)).unwrap(),
            props: BTreeMap::new(),
        }
    }

    fn edge(from: &str, rel: RelationKind, to: &str) -> TemporalEdge {
        TemporalEdge::new(Iri::resource(from), rel, Iri::resource(to))
    }

    #[test]
    fn point_before_period_is_a_before_after_pair() {
        let diag = event("213", "859", "2012-01-01", "2012-01-01");
        let drug = event("215663", "859", "2012-01-02", "2012-01-07");
        let edges = relate(&diag, &drug).unwrap();
        assert_eq!(
            edges,
            vec![
                edge("213", RelationKind::Before, "215663"),
                edge("215663", RelationKind::After, "213"),
            ]
        );
    }

    #[test]
    fn same_instant_points_are_concurrent() {
        let a = event("1", "583", "2012-10-10", "2012-10-10");
        let b = event("2", "583", "2012-10-10", "2012-10-10");
        let edges = relate(&a, &b).unwrap();
        assert_eq!(edges.len(), 2);
        assert!(edges.iter().all(|e| e.rel == RelationKind::Concurrent));
    }

    #[test]
    fn contained_point_is_during_the_period() {
        let p = event("1", "9", "2012-01-04", "2012-01-04");
        let period = event("2", "9", "2012-01-02", "2012-01-07");
        assert_eq!(relate(&p, &period).unwrap(), vec![edge("1", RelationKind::During, "2")]);
    }

    #[test]
    fn staggered_periods_overlap() {
        let late = event("1", "9", "2012-01-05", "2012-01-10");
        let early = event("2", "9", "2012-01-02", "2012-01-07");
        assert_eq!(relate(&late, &early).unwrap(), vec![edge("1", RelationKind::Overlap, "2")]);
    }

    #[test]
    fn boundary_semantics_follow_the_documented_reading() {
        let iv = |b: &str, e: &str| Interval::new(ts(b), ts(e)).unwrap();
        // Point at a period's end: containment, not overlap.
        assert_eq!(
            interval_relation(iv("2012-01-07", "2012-01-07"), iv("2012-01-02", "2012-01-07")),
            IntervalRelation::DuringForward
        );
        // Touching periods where the second continues: overlap.
        assert_eq!(
            interval_relation(iv("2012-01-01", "2012-01-05"), iv("2012-01-05", "2012-01-09")),
            IntervalRelation::OverlapReverse
        );
        // Shared begin with a longer end: containment wins over overlap.
        assert_eq!(
            interval_relation(iv("2012-01-01", "2012-01-10"), iv("2012-01-01", "2012-01-05")),
            IntervalRelation::DuringReverse
        );
        // Same-day discharge behaves as a point.
        assert_eq!(
            interval_relation(iv("2012-01-01", "2012-01-01"), iv("2012-01-01", "2012-01-01")),
            IntervalRelation::Concurrent
        );
    }

    #[test]
    fn cross_patient_comparison_is_rejected() {
        let a = event("1", "859", "2012-01-01", "2012-01-01");
        let b = event("2", "901", "2012-01-01", "2012-01-01");
        assert!(matches!(relate(&a, &b), Err(TemporalError::CrossPatientComparison { .. })));
        assert!(PatientTimeline::new(Iri::resource("859"), vec![b]).is_err());
    }

    fn timeline(events: Vec<MedicalEvent>) -> PatientTimeline {
        let patient = events[0].patient.clone();
        PatientTimeline::new(patient, events).unwrap()
    }

    #[test]
    fn full_on_two_events_is_one_inverse_pair() {
        let t = timeline(vec![
            event("213", "859", "2012-01-01", "2012-01-01"),
            event("215663", "859", "2012-01-02", "2012-01-07"),
        ]);
        let full = build_full(&t);
        assert_eq!(
            full,
            vec![
                edge("213", RelationKind::Before, "215663"),
                edge("215663", RelationKind::After, "213"),
            ]
        );
    }

    #[test]
    fn single_event_timeline_has_no_edges() {
        let t = timeline(vec![event("1", "9", "2012-01-01", "2012-01-01")]);
        assert!(build_full(&t).is_empty());
        assert!(build_reduced(&t).is_empty());
    }

    #[test]
    fn three_simultaneous_points_reduce_to_a_chain() {
        let t = timeline(vec![
            event("1", "9", "2012-10-10", "2012-10-10"),
            event("2", "9", "2012-10-10", "2012-10-10"),
            event("3", "9", "2012-10-10", "2012-10-10"),
        ]);
        let full = build_full(&t);
        assert_eq!(full.len(), 6);
        let reduced = build_reduced(&t);
        assert_eq!(reduced.len(), 4);
        assert_eq!(infer_closure(&reduced).unwrap(), full);
    }

    #[test]
    fn four_simultaneous_points_keep_six_chain_edges() {
        let t = timeline((1..=4).map(|i| event(&i.to_string(), "9", "2012-10-10", "2012-10-10")).collect());
        assert_eq!(build_full(&t).len(), 12);
        assert_eq!(build_reduced(&t).len(), 6);
    }

    #[test]
    fn distinct_point_times_chain_through_representatives() {
        let t = timeline(vec![
            event("1", "9", "2012-01-01", "2012-01-01"),
            event("2", "9", "2012-01-02", "2012-01-02"),
            event("3", "9", "2012-01-03", "2012-01-03"),
        ]);
        let reduced = build_reduced(&t);
        assert_eq!(
            reduced,
            vec![
                edge("1", RelationKind::Before, "2"),
                edge("2", RelationKind::After, "1"),
                edge("2", RelationKind::Before, "3"),
                edge("3", RelationKind::After, "2"),
            ]
        );
        let full = build_full(&t);
        assert_eq!(full.len(), 6);
        assert_eq!(infer_closure(&reduced).unwrap(), full);
    }

    #[test]
    fn point_period_pairs_are_not_reduced() {
        let t = timeline(vec![
            event("213", "859", "2012-01-01", "2012-01-01"),
            event("215663", "859", "2012-01-02", "2012-01-07"),
        ]);
        assert_eq!(build_reduced(&t), build_full(&t));
    }

    #[test]
    fn closure_composes_before_chains() {
        let input = vec![
            edge("a", RelationKind::Before, "b"),
            edge("b", RelationKind::Before, "c"),
        ];
        let closed = infer_closure(&input).unwrap();
        let expect: BTreeSet<TemporalEdge> = [
            edge("a", RelationKind::Before, "b"),
            edge("b", RelationKind::Before, "c"),
            edge("a", RelationKind::Before, "c"),
            edge("b", RelationKind::After, "a"),
            edge("c", RelationKind::After, "b"),
            edge("c", RelationKind::After, "a"),
        ]
        .into_iter()
        .collect();
        assert_eq!(closed.into_iter().collect::<BTreeSet<_>>(), expect);
    }

    #[test]
    fn closure_pushes_before_through_concurrent() {
        let input = vec![
            edge("a", RelationKind::Concurrent, "b"),
            edge("b", RelationKind::Concurrent, "a"),
            edge("b", RelationKind::Before, "c"),
        ];
        let closed = infer_closure(&input).unwrap();
        assert!(closed.contains(&edge("a", RelationKind::Before, "c")));
        assert!(closed.contains(&edge("c", RelationKind::After, "a")));
    }

    #[test]
    fn closure_of_empty_is_empty() {
        assert!(infer_closure(&[]).unwrap().is_empty());
    }

    #[test]
    fn closure_is_idempotent_on_full() {
        let t = timeline(vec![
            event("1", "9", "2012-01-01", "2012-01-01"),
            event("2", "9", "2012-01-01", "2012-01-01"),
            event("3", "9", "2012-01-04", "2012-01-04"),
            event("4", "9", "2012-01-02", "2012-01-07"),
            event("5", "9", "2012-01-05", "2012-01-10"),
        ]);
        let full = build_full(&t);
        assert_eq!(infer_closure(&full).unwrap(), full);
    }

    #[test]
    fn contradictory_edges_are_detected() {
        let input = vec![
            edge("a", RelationKind::Before, "b"),
            edge("b", RelationKind::Before, "a"),
        ];
        assert!(matches!(infer_closure(&input), Err(TemporalError::InconsistentEdges { .. })));
        let via_concurrent = vec![
            edge("a", RelationKind::Concurrent, "b"),
            edge("a", RelationKind::Before, "b"),
        ];
        assert!(matches!(
            infer_closure(&via_concurrent),
            Err(TemporalError::InconsistentEdges { .. })
        ));
    }

    #[test]
    fn during_and_overlap_pass_through_closure() {
        let input = vec![
            edge("p", RelationKind::During, "q"),
            edge("r", RelationKind::Overlap, "q"),
            edge("p", RelationKind::During, "q"),
        ];
        let closed = infer_closure(&input).unwrap();
        assert_eq!(
            closed,
            vec![
                edge("p", RelationKind::During, "q"),
                edge("r", RelationKind::Overlap, "q"),
            ]
        );
    }

    #[test]
    fn relation_triples_use_the_relation_predicate() {
        let triples = edges_to_triples(&[edge("215663", RelationKind::After, "213")]);
        assert_eq!(triples.len(), 1);
        assert_eq!(triples[0].predicate, vocab::relation_predicate(RelationKind::After));
        assert_eq!(triples[0].subject, Iri::resource("215663"));
    }

    #[test]
    fn reduction_never_exceeds_full() {
        let t = timeline(vec![
            event("1", "9", "2012-01-01", "2012-01-01"),
            event("2", "9", "2012-01-01", "2012-01-01"),
            event("3", "9", "2012-01-02", "2012-01-02"),
            event("4", "9", "2012-01-05", "2012-01-05"),
            event("5", "9", "2012-01-03", "2012-01-08"),
        ]);
        let full = build_full(&t);
        let reduced = build_reduced(&t);
        assert!(reduced.len() < full.len());
        assert_eq!(infer_closure(&reduced).unwrap(), full);
    }
}
