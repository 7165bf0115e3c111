use std::sync::Arc;

use acms_core::catalog;
use acms_core::classify::classify;
use acms_core::dsl::{parse, parse_expr, StructureFile};
use acms_core::expr::{CoordExpr, ExprNames};
use acms_core::report::Report;
use acms_core::residual::TolerancePolicy;
use acms_core::sampling::SamplingPlan;
use acms_core::search::builtin_families;
use acms_core::ParseErrorKind;
use proptest::prelude::*;

fn names() -> ExprNames {
    ExprNames::new(vec!["x".into(), "y".into(), "z".into()], vec!["eps".into()])
}

fn leaf() -> impl Strategy<Value = CoordExpr> {
    prop_oneof![
        prop_oneof![Just(0.0), Just(-0.0), Just(1.0), Just(-2.5), Just(1e-7), Just(3e21), -10.0..10.0f64]
            .prop_map(CoordExpr::Const),
        (0usize..3).prop_map(CoordExpr::Var),
        Just(CoordExpr::Param(0)),
    ]
}

/// Arbitrary trees, including shapes the folding constructors never build.
fn tree() -> impl Strategy<Value = CoordExpr> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        let a = || inner.clone().prop_map(Arc::new);
        prop_oneof![
            a().prop_map(CoordExpr::Neg),
            (a(), a()).prop_map(|(l, r)| CoordExpr::Add(l, r)),
            (a(), a()).prop_map(|(l, r)| CoordExpr::Sub(l, r)),
            (a(), a()).prop_map(|(l, r)| CoordExpr::Mul(l, r)),
            (a(), a()).prop_map(|(l, r)| CoordExpr::Div(l, r)),
            (a(), -4i32..6).prop_map(|(b, n)| CoordExpr::Pow(b, n)),
            a().prop_map(CoordExpr::Sin),
            a().prop_map(CoordExpr::Cos),
            a().prop_map(CoordExpr::Exp),
            a().prop_map(CoordExpr::Log),
        ]
    })
}

fn seed_texts() -> [String; 2] {
    [
        StructureFile::from_structure(&catalog::standard_darboux(1).structure).to_text(),
        StructureFile::from_family(&acms_core::search::darboux_cosymplectic_blend()).to_text(),
    ]
}

fn check_error_location(src: &str, line: usize, column: usize) -> Result<(), TestCaseError> {
    let lines: Vec<&str> = src.split('\n').collect();
    prop_assert!(line >= 1 && line <= lines.len(), "line {line} outside 1..={}", lines.len());
    let width = lines[line - 1].chars().count();
    prop_assert!(column >= 1 && column <= width + 1, "column {column} outside line of width {width}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn printed_expressions_reparse_to_the_same_tree(e in tree()) {
        let n = names();
        let text = e.display(&n).to_string();
        let back = parse_expr(&text, &n).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(back, e, "{}", text);
    }

    #[test]
    fn random_text_never_panics(src in "[a-z0-9 ,:#\\[\\]()+*/^.\\n-]{0,200}") {
        match parse(&src) {
            Ok(f) => prop_assert!(f.dim() % 2 == 1),
            Err(e) => check_error_location(&src, e.line, e.column)?,
        }
    }

    #[test]
    fn mutated_files_fail_with_located_errors(
        which in 0usize..2, pos in 0usize..600, len in 0usize..4, insert in "[a-z0-9 ,:()\\[\\]+*/^\\n-]{0,3}"
    ) {
        let base = &seed_texts()[which];
        let chars: Vec<char> = base.chars().collect();
        let at = pos % chars.len();
        let end = (at + len).min(chars.len());
        let src: String = chars[..at].iter().chain(insert.chars().collect::<Vec<_>>().iter()).chain(chars[end..].iter()).collect();
        match parse(&src) {
            Ok(f) => {
                prop_assert_eq!(f.dim(), 3);
                let reparsed = parse(&f.to_text()).unwrap();
                prop_assert_eq!(reparsed, f);
            }
            Err(e) => check_error_location(&src, e.line, e.column)?,
        }
    }
}

#[test]
fn every_catalog_entry_and_family_round_trips() {
    for e in catalog::entries() {
        let f = StructureFile::from_structure(&e.structure);
        assert_eq!(parse(&f.to_text()).unwrap(), f, "{}", e.name);
    }
    for fam in builtin_families() {
        let f = StructureFile::from_family(&fam);
        assert_eq!(parse(&f.to_text()).unwrap(), f, "{}", fam.name);
    }
}

#[test]
fn exported_files_classify_like_the_catalog() {
    let plan = SamplingPlan::new(30, 4, 0);
    let policy = TolerancePolicy::default();
    for e in catalog::entries() {
        let s = parse(&StructureFile::from_structure(&e.structure).to_text()).unwrap().to_structure().unwrap();
        let json = |s: &acms_core::structure::AcmStructure| {
            let r = classify(s, &plan, &policy).unwrap();
            let mut rep = Report::new("classify", &e.name, &plan, &policy);
            rep.classification(&r);
            rep.to_json()
        };
        assert_eq!(json(&e.structure), json(&s), "{}", e.name);
    }
}

const COSYMPLECTIC: &str = "\
name: flat
dimension: 3
coords: x, y, z
phi:
  0, -1, 0
  1, 0, 0
  0, 0, 0
xi: 0, 0, 1
eta: 0, 0, 1
g:
  1, 0, 0
  1, 0
  1
";

#[test]
fn minimal_constant_file_parses_and_evaluates() {
    let f = parse(COSYMPLECTIC).unwrap();
    assert_eq!(f.dim(), 3);
    assert_eq!(f.domain, vec![(-1.0, 1.0); 3]);
    let s = f.to_structure().unwrap();
    let r = classify(&s, &SamplingPlan::new(10, 2, 0), &TolerancePolicy::default()).unwrap();
    assert_eq!(r.axioms.max.verdict, acms_core::residual::Verdict::Holds);
}

#[test]
fn short_phi_names_the_section() {
    let src = COSYMPLECTIC.replace("  0, 0, 0\nxi", "xi");
    let e = parse(&src).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::DimensionMismatch);
    assert!(e.message.contains("`phi`"), "{}", e.message);
}

#[test]
fn undeclared_identifier_points_at_itself() {
    let src = COSYMPLECTIC.replace("coords: x, y, z", "coords: x0, x1, x2").replace("eta: 0, 0, 1", "eta: 0, sin(x0)*y, 1");
    let e = parse(&src).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier);
    let line = src.lines().nth(e.line - 1).unwrap();
    assert_eq!(&line[e.column - 1..e.column], "y");
}
