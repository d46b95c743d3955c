use tline_dce::observables;
use tline_dce::{CircuitFamily, CircuitSpec};

const FAMILIES: [CircuitFamily; 4] = [
    CircuitFamily::Lhtl1,
    CircuitFamily::Lhtl2,
    CircuitFamily::Rhtl1,
    CircuitFamily::Rhtl2,
];

fn output_energy(f: CircuitFamily, j: i64) -> f64 {
    let spec = CircuitSpec::reference(f);
    let n = observables::particle_number_analytic(&spec, j, 1e-12).unwrap().n;
    observables::mode_energy(&spec, j, n).unwrap()
}

/// Modes where LHTL1 carries the largest output energy, at τ = 1 ps.
#[test]
fn lhtl1_dominates_low_modes() {
    let dominant: Vec<i64> = (1..=100)
        .filter(|&j| {
            let e1 = output_energy(CircuitFamily::Lhtl1, j);
            FAMILIES[1..].iter().all(|&f| output_energy(f, j) < e1)
        })
        .collect();
    assert_eq!(dominant, (1..=33).collect::<Vec<_>>());
}

/// `N_j` at τ = 1 ps, evaluated independently at 40 significant digits.
#[test]
fn particle_numbers_match_high_precision_values() {
    let cases = [
        (CircuitFamily::Lhtl1, 1, 1.704_018_615_154_708_6),
        (CircuitFamily::Lhtl1, 60, 2.252_877_218_516_81e-2),
        (CircuitFamily::Lhtl2, 7, 3.854_221_318_770_439e-3),
        (CircuitFamily::Lhtl2, 100, 5.165_902_515_239_764e-2),
        (CircuitFamily::Rhtl1, 3, 6.047_516_334_727_101e-2),
        (CircuitFamily::Rhtl1, 100, 1.580_975_676_388_880_5e-2),
        (CircuitFamily::Rhtl2, 1, 5.887_694_104_350_322_5e-5),
        (CircuitFamily::Rhtl2, 100, 2.124_095_355_809_465_7e-1),
    ];
    for (f, j, expected) in cases {
        let n = observables::particle_number_analytic(&CircuitSpec::reference(f), j, 1e-12).unwrap().n;
        assert!((n - expected).abs() <= 1e-11 * expected, "{f} j={j}: {n}");
    }
}
