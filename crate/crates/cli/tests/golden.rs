mod common;

#[test]
fn golden_instances_and_reports_reproduce() {
    let problems = common::check_goldens();
    assert!(problems.is_empty(), "{problems:#?}");
}
