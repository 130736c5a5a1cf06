//! Randomized invariants: metric bounds, serialization round-trips, and
//! timestamp ordering.

use std::collections::BTreeSet;

use proptest::prelude::*;

use patienteg::matcher::{jaccard_sim, lcs_sim, lev_sim, score};
use patienteg::model::{Datatype, Iri, Literal, Term, Timestamp, Triple};
use patienteg::ntriples::{parse_ntriples, serialize_to_string};
use patienteg::vocab;

fn local_name() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9_]{0,8}"
}

// Predicates must live in a vocabulary namespace; the resource namespace
// is reserved for subjects and objects.
fn predicate() -> impl Strategy<Value = Iri> {
    prop_oneof![
        Just(vocab::rdf_type()),
        Just(vocab::rdfs_label()),
        Just(vocab::skos_exact_match()),
        Just(vocab::sem_has_actor()),
        Just(vocab::peg_gender()),
        Just(vocab::peg_situation()),
    ]
}

fn object() -> impl Strategy<Value = Term> {
    prop_oneof![
        local_name().prop_map(|l| Term::Iri(Iri::resource(&l))),
        ".{0,12}".prop_map(|s| Term::Literal(Literal::string(s))),
        any::<i64>().prop_map(|n| Term::Literal(Literal::typed(n.to_string(), Datatype::Integer).unwrap())),
    ]
}

fn triple() -> impl Strategy<Value = Triple> {
    (local_name(), predicate(), object())
        .prop_map(|(s, p, o)| Triple::new(Iri::resource(&s), p, o).unwrap())
}

fn date_parts() -> impl Strategy<Value = (i32, u32, u32)> {
    (1900..2100i32, 1..=12u32, 1..=28u32)
}

proptest! {
    #[test]
    fn metrics_stay_in_unit_range_and_are_symmetric(a in ".{0,16}", b in ".{0,16}") {
        for metric in [lev_sim, jaccard_sim, lcs_sim, score] {
            let forward = metric(&a, &b);
            prop_assert!((0.0..=1.0).contains(&forward), "{forward} out of range");
            prop_assert_eq!(forward, metric(&b, &a));
        }
        prop_assert_eq!(score(&a, &a), 1.0);
    }

    #[test]
    fn ntriples_serialization_round_trips(triples in proptest::collection::vec(triple(), 1..30)) {
        let canonical = serialize_to_string(&triples);
        let parsed = parse_ntriples(&canonical).unwrap();
        // Canonical text is a fixed point, and no triple is lost or invented.
        prop_assert_eq!(serialize_to_string(&parsed), canonical);
        let input: BTreeSet<&Triple> = triples.iter().collect();
        let output: BTreeSet<&Triple> = parsed.iter().collect();
        prop_assert_eq!(input, output);
    }

    #[test]
    fn timestamp_lexical_form_round_trips((y, m, d) in date_parts(), time in proptest::option::of((0..24u32, 0..60u32, 0..60u32))) {
        let text = match time {
            None => format!("{y:04}-{m:02}-{d:02}"),
            Some((h, mi, s)) => format!("{y:04}-{m:02}-{d:02}T{h:02}:{mi:02}:{s:02}"),
        };
        let stamp = Timestamp::parse(&text).unwrap();
        prop_assert_eq!(stamp.lexical(), text);
    }

    #[test]
    fn timestamp_order_matches_lexical_order_within_a_granularity(
        a in date_parts(), b in date_parts(), time in proptest::option::of((0..24u32, 0..60u32, 0..60u32))
    ) {
        // ISO-8601 strings of equal granularity sort chronologically.
        let render = |(y, m, d): (i32, u32, u32)| match time {
            None => format!("{y:04}-{m:02}-{d:02}"),
            Some((h, mi, s)) => format!("{y:04}-{m:02}-{d:02}T{h:02}:{mi:02}:{s:02}"),
        };
        let (ta, tb) = (render(a), render(b));
        let (sa, sb) = (Timestamp::parse(&ta).unwrap(), Timestamp::parse(&tb).unwrap());
        prop_assert_eq!(sa.cmp(&sb), ta.cmp(&tb));
    }
}
