use dunkl_spectra::verify;

#[test]
fn acceptance_criteria() {
    let results = verify::run_all().expect("criterion ids are all valid");
    let mut all = true;
    for r in &results {
        println!("{}", r.line());
        all &= r.passed;
    }
    assert!(all, "some acceptance criteria failed");
}
