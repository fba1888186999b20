use loopspace_lab::{format_float, Assertion, Relation, ResultTable};
use proptest::prelude::*;

#[test]
fn rows_must_fit_the_header() {
    let mut t = ResultTable::new(["a", "b"]).unwrap();
    t.push_row(vec![1.0, 2.0]).unwrap();
    assert!(t.push_row(vec![1.0]).is_err());
    assert_eq!(t.rows().len(), 1);
    assert!(ResultTable::new(["a,b"]).is_err());
    assert!(ResultTable::new(["a", "a"]).is_err());
    assert!(ResultTable::new(Vec::<String>::new()).is_err());
}

#[test]
fn floats_use_shortest_roundtrip_text() {
    assert_eq!(format_float(0.1), "0.1");
    assert_eq!(format_float(1e-6), "1e-6");
    assert_eq!(format_float(2.5e20), "2.5e20");
    assert_eq!(format_float(1024.0), "1024");
    assert_eq!(format_float(f64::INFINITY), "inf");
    assert_eq!(format_float(-0.0), "-0");
}

#[test]
fn csv_errors_name_the_cell() {
    let err = ResultTable::from_csv("x,y\n1,2\n3,oops\n").unwrap_err().to_string();
    assert!(err.contains("row 1") && err.contains("`y`"), "{err}");
    assert!(ResultTable::from_csv("x,y\n1,2,3\n").is_err());
    assert!(ResultTable::from_csv("").is_err());
}

#[test]
fn per_row_assertions_report_failing_rows() {
    let a = Assertion::per_row("r", "statement", &[0.5, 1.5, 0.9, 2.0], Relation::Below, 1.0);
    assert!(!a.pass);
    assert_eq!(a.failing_rows, vec![1, 3]);
    assert_eq!(a.measured, 2.0);
    let b = Assertion::per_row("r", "statement", &[3.0, 2.0], Relation::AtLeast, 1.0);
    assert!(b.pass && b.measured == 2.0);
    assert!(!Assertion::per_row("r", "statement", &[], Relation::AtMost, 1.0).pass);
    assert!(!Assertion::new("nan", "statement", f64::NAN, Relation::AtMost, 1.0).pass);
}

#[test]
fn report_lists_each_assertion_field() {
    let mut t = ResultTable::new(["x"]).unwrap();
    t.assertions.push(Assertion::new("n", "statement", 0.5, Relation::AtMost, 1.0));
    let r = t.report_json();
    let a = &r["assertions"][0];
    for key in ["name", "paper_anchor", "measured", "bound", "pass", "relation", "failing_rows"] {
        assert!(a.get(key).is_some(), "{key}");
    }
    assert_eq!(r["pass"], true);
}

proptest! {
    #[test]
    fn format_float_roundtrips(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO | prop::num::f64::INFINITE) {
        let back: f64 = format_float(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn csv_roundtrips(rows in prop::collection::vec(prop::collection::vec(prop::num::f64::NORMAL, 3), 0..10)) {
        let mut t = ResultTable::new(["a", "b", "c"]).unwrap();
        for r in &rows {
            t.push_row(r.clone()).unwrap();
        }
        let back = ResultTable::from_csv(&t.to_csv()).unwrap();
        prop_assert_eq!(back.rows(), t.rows());
        prop_assert_eq!(back.to_csv(), t.to_csv());
    }

    #[test]
    fn csv_reader_never_panics(text in "[a-z0-9,.\\-\"\n eE]{0,200}") {
        let _ = ResultTable::from_csv(&text);
    }
}
