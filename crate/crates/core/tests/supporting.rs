use std::f64::consts::PI;

use bellgraph::analysis::{bell_value_from_records, bundled_bc4_hat_table, load_measurements, Target};
use bellgraph::bell::{
    graph_bell_operator, mk_closed_form_pauli, mk_closed_form_with_phase, mk_recursive, operator_expectation,
    MeasurementSetting, SignedPauliSum,
};
use bellgraph::graph::{Graph, Preset};
use bellgraph::lhv::{lhv_max, lhv_value, LhvAssignment};
use bellgraph::pauli::PauliString;
use bellgraph::state::{pauli_expectation, StateVector};
use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRINTED_HAT: &str =
    "IIII, IYYZ, -IXXZ, IZZI, YIZY, YYXX, YXYX, YZIY, -XIZX, XYXY, XXYY, XZIX, ZIIZ, ZYYI, -ZXXI, ZZZZ";
const PRINTED_MK4: &str = "-YXXY, -YXYX, -YYXX, YYYY, -XYYX, -XYXY, -XXYY, XXXX";

fn words(list: &str) -> Vec<PauliString> {
    list.split(',').map(|w| w.trim().parse().unwrap()).collect()
}

fn printed_mk4() -> SignedPauliSum {
    SignedPauliSum::new(4, words(PRINTED_MK4).into_iter().map(|w| (0.125, w))).unwrap()
}

fn max_diff(a: &nalgebra::DMatrix<Complex64>, b: &nalgebra::DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[test]
fn printed_mk4_is_closed_form_at_zero_phase() {
    let zero = mk_closed_form_pauli(4, 0.0).unwrap();
    assert_eq!(zero, printed_mk4());
    let dense = mk_closed_form_with_phase(4, 0.0).unwrap().to_dense().unwrap();
    assert!(max_diff(&dense, &printed_mk4().to_dense().unwrap()) < 1e-15);
}

#[test]
fn printed_mk4_is_recursion_with_rotated_first_qubit() {
    let theta = -3.0 * PI / 4.0;
    let mut pairs = MeasurementSetting::xy(4).unwrap().pairs().to_vec();
    pairs[0] = ([theta.cos(), theta.sin(), 0.0], [-theta.sin(), theta.cos(), 0.0]);
    let rec = mk_recursive(&MeasurementSetting::new(pairs).unwrap()).unwrap().dense.unwrap();
    assert!(max_diff(rec.matrix(), &printed_mk4().to_dense().unwrap()) < 1e-12);
}

#[test]
fn xy_recursion_has_sixteen_irrational_terms() {
    let mk = mk_recursive(&MeasurementSetting::xy(4).unwrap()).unwrap().pauli.unwrap();
    assert_eq!(mk.len(), 16);
    let c = 1.0 / (8.0 * 2f64.sqrt());
    assert!(mk.terms().iter().all(|(k, _)| (k - c).abs() < 1e-15));
}

#[test]
fn printed_hat_list_differs_only_in_xzix() {
    let generated: Vec<String> = Target::bc4_hat()
        .unwrap()
        .stabilizer_words()
        .unwrap()
        .iter()
        .map(|w| w.to_string())
        .collect();
    let differing: Vec<String> = words(PRINTED_HAT)
        .iter()
        .map(|w| w.to_string())
        .filter(|w| !generated.contains(w))
        .collect();
    assert_eq!(differing, vec!["+XZIX"]);
}

#[test]
fn printed_hat_list_is_not_a_group() {
    let printed = words(PRINTED_HAT);
    let mut open = Vec::new();
    for a in &printed {
        for b in &printed {
            let p = a.multiply(b).unwrap();
            if !printed.contains(&p) {
                open.push(format!("{a}·{b} = {p}"));
            }
        }
    }
    assert!(!open.is_empty());
    let fixed: Vec<PauliString> = printed
        .iter()
        .map(|w| if w.to_string() == "+XZIX" { w.negate() } else { *w })
        .collect();
    for a in &fixed {
        for b in &fixed {
            assert!(fixed.contains(&a.multiply(b).unwrap()));
        }
    }
}

#[test]
fn printed_hat_state_has_negative_xzix() {
    let mut a = vec![Complex64::new(0.0, 0.0); 16];
    a[0b0000] = Complex64::new(0.5, 0.0);
    for k in [0b0110, 0b1001, 0b1111] {
        a[k] = Complex64::new(-0.5, 0.0);
    }
    let s = StateVector::new(4, a).unwrap();
    let xzix: PauliString = "XZIX".parse().unwrap();
    assert!((pauli_expectation(&xzix, &s).unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn table_with_printed_sign_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let text = std::fs::read_to_string(bundled_bc4_hat_table()).unwrap();
    std::fs::write(&path, text.replace("XZIX,-1", "XZIX,+1")).unwrap();
    let recs = load_measurements(&path, 4).unwrap();
    let e = bell_value_from_records(&recs, &Target::bc4_hat().unwrap()).unwrap_err();
    assert!(e.to_string().contains("sign mismatch: +XZIX"), "{e}");
}

#[test]
fn lc4_all_plus_assignment() {
    let op = graph_bell_operator(&Preset::Linear(4).graph().unwrap()).unwrap();
    let negative = op.terms().iter().filter(|(_, w)| w.sign() == Some(-1)).count();
    assert_eq!(negative, 2);
    assert_eq!(lhv_value(&op, &LhvAssignment::all_plus(4)).unwrap(), 12.0 / 16.0);
}

#[test]
fn mk_spectral_bound_for_random_settings() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let unit =|rng: &mut ChaCha8Rng| {
        let v: [f64; 3] = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
        let r = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        [v[0] / r, v[1] / r, v[2] / r]
    };
    for k in 0..20 {
        let n = 1 + k % 6;
        let pairs = (0..n).map(|_| (unit(&mut rng), unit(&mut rng))).collect();
        let op = mk_recursive(&MeasurementSetting::new(pairs).unwrap()).unwrap().dense.unwrap();
        let m = op.matrix();
        assert!(max_diff(m, &m.adjoint()) < 1e-12);
        let eig = SymmetricEigen::new(m.clone()).eigenvalues;
        assert!(eig.iter().all(|e| e.abs() <= 1.0 + 1e-10), "n={n}");
    }
    let xy = mk_recursive(&MeasurementSetting::xy(5).unwrap()).unwrap().dense.unwrap();
    let top = SymmetricEigen::new(xy.matrix().clone()).eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    assert!((top - 1.0).abs() < 1e-12);
}

#[test]
fn graph_states_saturate_up_to_twelve_qubits() {
    for p in [Preset::GhzComplete(12), Preset::Linear(12), Preset::Ec(10), Preset::GhzStar(11)] {
        let t = Target::from_preset(p).unwrap();
        let v = operator_expectation(&t.bell_operator().unwrap(), &t.state_vector().unwrap()).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{p:?}");
    }
}

#[test]
fn lhv_value_invariant_under_local_complementation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..12 {
        let n = rng.random_range(3..=5);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|_| rng.random::<bool>())
            .collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let v = rng.random_range(0..n);
        let h = g.local_complement(v).unwrap();
        let a = lhv_max(&graph_bell_operator(&g).unwrap(), false).unwrap();
        let b = lhv_max(&graph_bell_operator(&h).unwrap(), false).unwrap();
        assert_eq!(a.fraction, b.fraction, "{g:?} at {v}");
    }
}
