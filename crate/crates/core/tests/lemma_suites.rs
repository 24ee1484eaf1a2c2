use fnse::harness::{verify_lemmas, LemmaSuite};

#[test]
fn both_exponents_pass_with_their_own_constants() {
    let quick = |alpha| LemmaSuite {
        mutation: false,
        ..LemmaSuite::with_alpha(alpha)
    };
    let one = verify_lemmas(&quick(1.0)).unwrap();
    let other = verify_lemmas(&quick(1.25)).unwrap();
    println!("alpha = 1\n{one}\nalpha = 1.25\n{other}");
    assert!(one.passed(), "{one}");
    assert!(other.passed(), "{other}");
    assert!((one.constants.c1 - other.constants.c1).abs() > 1e-3);
    assert!((one.constants.c_grad - other.constants.c_grad).abs() > 1e-3);
}
