use std::collections::BTreeSet;
use std::path::PathBuf;

use quill_core::profile::{expand_keywords, load_profile, validate_keywords, KeywordMode, ProfileBundle};
use quill_core::rdf::{parse_turtle, Term};
use quill_core::shacl::{validate, FieldKind};
use quill_core::vocab::{cito, datacite, dcterms, fabio, frbr, literal, prism};

fn profile_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../profiles/ocdm-paratext")
}

fn shipped() -> ProfileBundle {
    load_profile(profile_dir()).unwrap_or_else(|e| panic!("{e}"))
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn shipped_profile_loads_cleanly() {
    let p = shipped();
    assert!(p.shapes.warnings().is_empty(), "{:?}", p.shapes.warnings());
    for class in [
        fabio::JOURNAL_ARTICLE,
        fabio::REVIEW_ARTICLE,
        fabio::REVIEW,
        fabio::JOURNAL,
        fabio::JOURNAL_VOLUME,
        fabio::JOURNAL_ISSUE,
        datacite::IDENTIFIER,
        cito::CITATION,
    ] {
        assert!(p.shapes.for_class(class).is_some(), "no shape for {class}");
    }
    for (class, fields) in &p.form_schema.entries {
        assert!(!fields.is_empty(), "{class} has no form fields");
    }
    assert!(p.link_types.contains(cito::REPLIES_TO));
    assert_eq!(p.vocabulary.len(), 4);
    assert_eq!(
        p.vocabulary.categories().keys().map(String::as_str).collect::<Vec<_>>(),
        [
            "ancient tradition",
            "exegetical cultures and activities",
            "exegetical products",
            "exegetical signs and layout",
        ]
    );
    assert!(p.supertypes_of(fabio::JOURNAL_VOLUME).any(|c| c == fabio::EXPRESSION));
}

#[test]
fn identifier_form_has_scheme_dropdown_and_value_text() {
    let p = shipped();
    let fields = p.form_schema.fields(datacite::IDENTIFIER).unwrap();
    let scheme = fields
        .iter()
        .find(|f| f.predicate == datacite::USES_IDENTIFIER_SCHEME)
        .unwrap();
    assert_eq!(scheme.kind, FieldKind::Dropdown);
    let options: Vec<_> = scheme.options.as_ref().unwrap().iter().map(Term::value).collect();
    assert_eq!(options, [datacite::DOI, datacite::ISSN, datacite::EISSN, datacite::ISBN]);
    let value = fields.iter().find(|f| f.predicate == literal::HAS_LITERAL_VALUE).unwrap();
    assert_eq!(value.kind, FieldKind::Text);
}

#[test]
fn article_form_contract() {
    let p = shipped();
    let fields = p.form_schema.fields(fabio::JOURNAL_ARTICLE).unwrap();
    let title = &fields[0];
    assert_eq!(title.predicate, dcterms::TITLE);
    assert_eq!(title.kind, FieldKind::Text);
    assert!(title.required && !title.repeatable);
    let part_of = fields.iter().find(|f| f.predicate == frbr::PART_OF).unwrap();
    assert_eq!(part_of.kind, FieldKind::EntityReference);
    for (class, target) in [
        (fabio::JOURNAL_ISSUE, fabio::JOURNAL_VOLUME),
        (fabio::JOURNAL_VOLUME, fabio::JOURNAL),
    ] {
        let f = p.form_schema.fields(class).unwrap();
        let part_of = f.iter().find(|f| f.predicate == frbr::PART_OF).unwrap();
        assert_eq!(part_of.kind, FieldKind::EntityReference);
        assert_eq!(part_of.referenced_class.as_deref(), Some(target));
    }
    let keywords = fields.iter().find(|f| f.predicate == prism::KEYWORD).unwrap();
    assert!(keywords.repeatable);
}

#[test]
fn form_schema_matches_golden() {
    let golden_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/ocdm-form-schema.json");
    let actual = shipped().form_schema.to_json_pretty() + "\n";
    if std::env::var_os("QUILL_BLESS").is_some() {
        std::fs::write(&golden_path, &actual).unwrap();
    }
    let expected = std::fs::read_to_string(&golden_path).unwrap();
    assert_eq!(actual, expected, "rerun with QUILL_BLESS=1 to update after an intended change");
}

#[test]
fn martis_fixture_conforms() {
    let p = shipped();
    let text = std::fs::read_to_string(profile_dir().join("examples/martis-2013.ttl")).unwrap();
    let data = parse_turtle(&text, None).unwrap();
    let report = validate(&data, &p.shapes);
    assert!(report.conforms, "{:#?}", report.results);

    let article = Term::iri("https://w3id.org/quill/data/journalarticle/1");
    let keywords: BTreeSet<String> = data
        .objects(&article, prism::KEYWORD)
        .map(|t| t.value().to_owned())
        .collect();
    assert!(validate_keywords(&keywords, &p.vocabulary).is_empty());
}

#[test]
fn sample_mapping_closure() {
    let v = shipped().vocabulary;
    assert_eq!(
        expand_keywords(&set(&["scholia"]), &v, KeywordMode::Strict).unwrap(),
        set(&["scholia", "exegetical products"])
    );
    assert_eq!(validate_keywords(&set(&["D-scholia"]), &v).len(), 1);
    assert_eq!(validate_keywords(&set(&["D-scholia"]), &v)[0].missing_category, "exegetical products");
}
