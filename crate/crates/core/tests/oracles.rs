//! Values computed independently (floating-point Hermitian eigenvalues, hand
//! expansion of small determinants) and frozen here.

use knotforge::ball::Angle;
use knotforge::braid::{alexander_from_braid, presentation, BraidWord, FreeWord};
use knotforge::catalog;
use knotforge::circle_zeros::{unit_circle_zeros, Parity};
use knotforge::invariants::{lt_signature, murasugi_signature, pretzel_determinant, SeifertMatrix};
use knotforge::laurent::{to_palindromic, PalindromicForm};
use knotforge::repspace::{abelian_character, deform, slice_search, DeformOptions, Flavor, Side};
use knotforge::Exec;
use num_bigint::BigInt;

fn record_seifert(name: &str) -> SeifertMatrix {
    catalog::bundled().into_iter().find(|r| r.name == name).unwrap().seifert.unwrap()
}

#[test]
fn levine_tristram_values() {
    let angles = [0.3, 0.7, 1.0, std::f64::consts::FRAC_PI_2, 2.0, 2.5, 3.0];
    let table: [(&str, [i64; 7]); 4] = [
        ("T(2,7)", [0, -2, -2, -4, -4, -6, -6]),
        ("6_2", [0, 0, 0, 2, 2, 2, 2]),
        ("P(3,5,7)", [2, 2, 2, 2, 2, 2, 2]),
        ("5_2", [0, 0, -2, -2, -2, -2, -2]),
    ];
    for (name, expected) in table {
        let v = record_seifert(name);
        for (a, want) in angles.iter().zip(expected) {
            assert_eq!(lt_signature(&v, &Angle::Radians(*a), 128).unwrap(), want, "{name} at {a}");
        }
    }
    assert_eq!(murasugi_signature(&record_seifert("6_2")).unwrap(), 2);
}

#[test]
fn unit_circle_zero_angles() {
    // 6_2: zeros at angle ±1.3786328388751703; P(3,5,7): ±0.23625130598477054.
    for (coeffs, angle) in [(vec![-3i64, 3, -1], 1.3786328388751703), (vec![-35, 18], 0.23625130598477054)] {
        let report = unit_circle_zeros(&PalindromicForm::from_i64(&coeffs)).unwrap();
        assert_eq!(report.roots.len(), 1);
        let r = report.refine_root(0, 40);
        assert_eq!(r.parity(), Parity::Odd);
        let (lo, hi) = r.angle_enclosure();
        assert!(lo <= angle + 1e-12 && angle - 1e-12 <= hi, "{lo} {hi}");
    }
}

#[test]
fn pretzel_determinants() {
    assert_eq!(pretzel_determinant(&[3, 5, 7]).unwrap(), (true, BigInt::from(71)));
    assert_eq!(pretzel_determinant(&[-2, 3, 7]).unwrap(), (true, BigInt::from(1)));
    assert_eq!(pretzel_determinant(&[2, 3, 7]).unwrap(), (true, BigInt::from(41)));
}

#[test]
fn lehmer_braid() {
    let b = BraidWord::parse("1 2 2 1 1 2 2 2 2 2 2 2", 3).unwrap();
    let f = to_palindromic(&alexander_from_braid(&b).unwrap()).unwrap();
    assert_eq!(f, PalindromicForm::from_i64(&[1, -1, 1, 0, -1, 1]));
    assert_eq!(unit_circle_zeros(&f).unwrap().odd_roots().count(), 4);
}

#[test]
fn trefoil_path_against_trace_equations() {
    // On ⟨a, b | aba = bab⟩ irreducible slice characters have tr(ab) = 1, so
    // κ = 2τ² + 1 - τ² - 4 = τ² - 3.
    let p = presentation(&BraidWord::parse("1 1 1", 2).unwrap());
    let path = deform(&p, std::f64::consts::PI / 6.0, Side::Upper, Flavor::Sl2r, &DeformOptions::default()).unwrap();
    let ab = FreeWord::from_letters([1, 2]);
    for pt in &path.points {
        assert!((pt.character.get(&ab).unwrap() - 1.0).abs() < 1e-9);
        assert!(pt.rep.tau * pt.rep.tau - 3.0 > 0.0);
    }
    let chi0 = abelian_character(&p, path.theta0);
    assert!(path.points[0].character.distance(&chi0) < 5.0 * 2.5e-3);
}

#[test]
fn sl2r_slice_search_above_the_zero() {
    let p = presentation(&BraidWord::parse("1 1 1", 2).unwrap());
    let s = slice_search(&p, 3f64.sqrt() + 0.05, Flavor::Sl2r, 20, 7, Exec::Sequential);
    assert_eq!(s.distinct(), 1);
    let z = s.characters[0].get(&FreeWord::from_letters([1, 2])).unwrap();
    assert!((z - 1.0).abs() < 1e-8);
}
