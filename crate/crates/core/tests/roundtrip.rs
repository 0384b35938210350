mod common;

use common::roundtrip::SCHEMAS;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn check(name: &str, seed: u64) -> Result<(), TestCaseError> {
    let (_, f) = SCHEMAS.iter().find(|(n, _)| *n == name).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut rng = StdRng::seed_from_u64(seed);
    f(&mut rng, dir.path()).map_err(TestCaseError::fail)
}

macro_rules! roundtrip {
    ($($test:ident => $schema:literal),+ $(,)?) => {
        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            $(
                #[test]
                fn $test(seed in any::<u64>()) {
                    check($schema, seed)?;
                }
            )+
        }
    };
}

roundtrip! {
    pubtator_round_trips => "pubtator",
    jsonl_round_trips => "jsonl",
    conllu_round_trips => "conllu",
    mentions_round_trip => "mentions",
    statements_round_trip => "statements",
    canonical_statements_round_trip => "canonical",
    openie_triples_round_trip => "openie",
    entity_vocabulary_round_trips => "entity_vocab",
    relation_vocabulary_round_trips => "relation_vocab",
    type_constraints_round_trip => "type_constraints",
    predicate_statistics_round_trip => "predicate_statistics",
    mention_frequency_round_trips => "mention_frequency",
    extraction_statistics_round_trip => "extraction_statistics",
    complexity_report_round_trips => "complexity",
}

#[test]
fn every_schema_is_covered() {
    assert_eq!(SCHEMAS.len(), 14);
}
