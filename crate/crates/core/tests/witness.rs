use nrange::geometry::{BoundaryShape, ExtremeKind, SmoothnessOrder};
use nrange::maxent::scan_discontinuities;
use nrange::oracle::{search_c2_nonanalytic, witness_range};

#[test]
fn cubic_tangency_witness() {
    let w = search_c2_nonanalytic(2024, 200).expect("witness");
    assert!((w.exponent - 3.0).abs() <= 0.3, "exponent {}", w.exponent);
    let range = witness_range(&w).unwrap();

    let report = scan_discontinuities(&range).unwrap();
    let at = report
        .points
        .iter()
        .filter(|p| p.kind == ExtremeKind::RegularExposed)
        .min_by(|a, b| (a.theta - w.theta).abs().total_cmp(&(b.theta - w.theta).abs()))
        .unwrap();
    assert!((at.theta - w.theta).abs() < 1e-9);
    assert!(!at.f_inv_strong && !at.f_inv_weak);
    assert!(!at.maxent_continuous);

    let BoundaryShape::Regular(c) = range.classify().unwrap() else { panic!("degenerate witness") };
    let p = c
        .extreme_points
        .iter()
        .find(|p| (p.z - at.z).norm() < 1e-8)
        .expect("witness point classified");
    assert_eq!(p.maximal_order, Some(SmoothnessOrder::Finite(2)));
}
