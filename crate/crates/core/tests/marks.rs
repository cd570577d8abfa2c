use resolve_core::marked::MarkedIdeal;
use resolve_core::{parse_polynomial, Error, Ideal};

fn ideal(gens: &[&str]) -> Ideal {
    let ns = vec!["x".to_string(), "y".to_string()];
    Ideal::new(
        2,
        gens.iter()
            .map(|g| parse_polynomial(g, &ns).unwrap())
            .collect(),
    )
}

#[test]
fn pow_matches_repeated_product() {
    let i = ideal(&["x^2", "x*y", "y^3"]);
    let mut slow = i.clone();
    for _ in 1..5 {
        slow = slow.product(&i).unwrap();
    }
    assert!(i.pow(5).unwrap().equals(&slow).unwrap());
    assert!(i.pow(0).unwrap().is_unit().unwrap());
}

#[test]
fn monomial_power_is_reduced() {
    // (x^2, y^3)^4 with mark 8 is the same marked ideal as (x^2, y^3) with mark 2
    let root = ideal(&["x^2", "y^3"]);
    let m = MarkedIdeal::new(root.pow(4).unwrap(), 8, vec![]);
    let r = m.reduced().unwrap();
    assert_eq!(r.mark, 2);
    assert!(r.ideal.equals(&root).unwrap());
    assert!(r
        .support_ideal()
        .unwrap()
        .equals(&m.support_ideal().unwrap())
        .unwrap());
}

#[test]
fn non_powers_are_left_alone() {
    for (gens, mark) in [
        (&["x^2", "x*y", "y^2"][..], 3),
        (&["x^4", "y^2"][..], 2),
        (&["x^2+y^2"][..], 2),
    ] {
        let m = MarkedIdeal::new(ideal(gens), mark, vec![]);
        let r = m.reduced().unwrap();
        assert_eq!(r.mark, mark, "{gens:?}");
        assert!(r.ideal.equals(&m.ideal).unwrap());
    }
}

#[test]
fn factorial_mark_overflow_is_its_own_error() {
    let m = MarkedIdeal::new(ideal(&["y^8"]), 8, vec![]);
    match m.coefficient_ideal() {
        Err(e @ Error::MarkCapExceeded(5040)) => assert!(e.is_exhaustion()),
        other => panic!("expected mark cap error, got {other:?}"),
    }
}
