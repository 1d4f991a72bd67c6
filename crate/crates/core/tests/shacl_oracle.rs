mod support;

use std::collections::BTreeSet;
use std::time::Instant;

use proptest::prelude::*;
use quill_core::rdf::{Term, Triple};
use quill_core::shacl::{derive_form_schema, validate_with, Component, Execution, FieldKind};
use rand::rngs::StdRng;
use rand::SeedableRng;
use support::shacl_oracle::{brute_force, engine_findings, random_graph, random_shapes};

#[test]
fn validate_agrees_with_brute_force() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut nonconforming = 0;
    for case in 0..1500 {
        let data = random_graph(&mut rng);
        let shapes = random_shapes(&mut rng);
        let expected = brute_force(&data, &shapes);
        let seq = validate_with(&data, &shapes, None, Execution::Sequential);
        let par = validate_with(&data, &shapes, None, Execution::Parallel);
        assert_eq!(seq, par, "case {case}: sequential and parallel differ");
        assert_eq!(seq.conforms, seq.results.is_empty());
        assert_eq!(engine_findings(&seq), expected, "case {case}\ndata: {data:#?}\nshapes: {shapes:#?}");
        nonconforming += usize::from(!seq.conforms);
    }
    // The generator must exercise both outcomes to be a meaningful oracle.
    assert!(nonconforming > 300 && nonconforming < 1400, "{nonconforming}");
    assert!(start.elapsed().as_secs() < 30);
}

#[test]
fn schema_totality_on_random_models() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..300 {
        let model = random_shapes(&mut rng);
        let schema = derive_form_schema(&model);
        for shape in model.shapes() {
            let key = shape.target_class.clone().unwrap_or_else(|| shape.iri.clone());
            let fields = schema.fields(&key).unwrap();
            assert_eq!(fields.len(), shape.properties.len());
            for (field, prop) in fields.iter().zip(&shape.properties) {
                assert_eq!(field.predicate, prop.path.predicate);
                assert_eq!(field.required, prop.min_count.unwrap_or(0) >= 1);
                assert_eq!(field.repeatable, prop.max_count.is_none_or(|m| m > 1));
                match field.kind {
                    FieldKind::Dropdown => assert!(field.options.as_ref().is_some_and(|o| !o.is_empty())),
                    FieldKind::EntityReference => assert!(field.referenced_class.is_some()),
                    FieldKind::NestedForm => assert!(field.nested_shape.is_some()),
                    _ => {}
                }
            }
        }
        assert_eq!(derive_form_schema(&model), schema);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Adding a value on a path never creates a MinCount result there.
    #[test]
    fn min_count_is_monotone(seed in any::<u64>(), subject in 0usize..8, pred in 0usize..3, lit in any::<bool>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let data = random_graph(&mut rng);
        let shapes = random_shapes(&mut rng);
        let before = validate_with(&data, &shapes, None, Execution::Sequential);
        let mut more = data.clone();
        let s = Term::iri(format!("http://oracle.test/node{subject}"));
        let p = format!("http://oracle.test/p{pred}");
        let o = if lit { Term::string("extra") } else { Term::iri("http://oracle.test/node0") };
        more.insert(Triple::new(s, Term::iri(p.clone()), o));
        let after = validate_with(&more, &shapes, None, Execution::Sequential);
        let min_count = |r: &quill_core::shacl::ValidationReport| -> BTreeSet<(Term, String)> {
            r.results
                .iter()
                .filter(|x| x.component == Component::MinCount && x.path == p)
                .map(|x| (x.focus_node.clone(), x.path.clone()))
                .collect()
        };
        prop_assert!(min_count(&after).is_subset(&min_count(&before)));
    }
}
