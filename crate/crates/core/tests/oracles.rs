//! Frozen reference values from an independent implementation of the
//! operator-valued moment-cumulant formulas (sums over non-crossing and
//! interval partitions) and of scalar F-transform composition.

use std::sync::Arc;

use num_complex::Complex64;

use opfp::algebra::{max_abs, BElement, CMat, CPMap, MatricialElement};
use opfp::laws::{dilate, CentralLaw, Distribution, MatrixModel};
use opfp::series::{
    boolean_convolve, boolean_power, free_convolve, free_power, free_sum, monotone_convolve,
};

type M2 = [[Complex64; 2]; 2];

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const FREE3_SYM: [f64; 8] = [
    0.0,
    2.500000000000001,
    0.0,
    11.166666666666673,
    0.0,
    59.722222222222264,
    0.0,
    350.0092592592595,
];
const BOOL3_SYM: [f64; 8] = [
    0.0,
    2.500000000000001,
    0.0,
    7.000000000000004,
    0.0,
    20.000000000000018,
    0.0,
    57.33333333333341,
];
const BERBER_B: [(usize, M2); 3] = [
    (
        2,
        [
            [
                c(1.025, -0.15000000000000002),
                c(-0.15000000000000005, -0.6000000000000001),
            ],
            [c(0.29999999999999993, 0.525), c(0.88, 0.060000000000000026)],
        ],
    ),
    (
        4,
        [
            [
                c(0.39346874999999987, -0.011749999999999955),
                c(0.12359999999999999, -0.32485624999999996),
            ],
            [
                c(0.1789624999999999, 0.12783749999999997),
                c(0.34356124999999993, 0.14327750000000006),
            ],
        ],
    ),
    (
        6,
        [
            [
                c(0.16282055156249997, -0.029574837499999958),
                c(0.11207751875000001, -0.13576216249999992),
            ],
            [
                c(0.13770951249999994, 0.0313333890625),
                c(0.13014603437499989, 0.06888288437500005),
            ],
        ],
    ),
];
const BERBER_BCBCB: M2 = [
    [
        c(0.05820374843749998, 0.3768916906250001),
        c(0.19148104375000002, -0.05152513437500003),
    ],
    [
        c(-0.3755232593749999, -0.18060297031249997),
        c(-0.047922353125000004, 0.23803922812499995),
    ],
];
const BOOLBER_BCBCB: M2 = [
    [
        c(0.06609684374999997, 0.1774674375),
        c(0.07849352500000002, -0.08307407500000001),
    ],
    [
        c(-0.16582864999999997, -0.06718320625),
        c(0.015978444999999994, 0.109351365),
    ],
];
const MODELS_FREE: [M2; 5] = [
    [
        [c(0.44999999999999996, 0.0), c(0.4, 0.0)],
        [c(0.4, 0.0), c(-0.25, 0.0)],
    ],
    [
        [
            c(0.467, -0.06600000000000002),
            c(-0.03200000000000003, -0.20700000000000005),
        ],
        [
            c(0.08499999999999999, 0.10950000000000001),
            c(0.25650000000000006, 0.048000000000000015),
        ],
    ],
    [
        [
            c(-0.010180000000000005, -0.07717500000000001),
            c(-0.11300500000000005, -0.11441999999999998),
        ],
        [
            c(0.07966000000000001, 0.03684500000000001),
            c(0.09692999999999999, -2.500000000011174e-06),
        ],
    ],
    [
        [
            c(-0.09703057500000002, -0.088510425),
            c(-0.023510762500000015, 0.04981832500000003),
        ],
        [
            c(0.08936136250000003, 0.0075482),
            c(-0.006859175000000007, -0.037951525000000014),
        ],
    ],
    [
        [
            c(-0.011562921000000004, 0.016287983750000002),
            c(0.004131248750000019, 0.05849352137500004),
        ],
        [
            c(-0.000554096000000006, -0.014481004500000007),
            c(-0.023081087000000014, -0.024164549749999986),
        ],
    ],
];
const MODELS_BOOLEAN: [M2; 5] = [
    [
        [c(0.44999999999999996, 0.0), c(0.4, 0.0)],
        [c(0.4, 0.0), c(-0.25, 0.0)],
    ],
    [
        [
            c(0.467, -0.06600000000000002),
            c(-0.03200000000000003, -0.20700000000000005),
        ],
        [
            c(0.08499999999999999, 0.10950000000000001),
            c(0.25650000000000006, 0.048000000000000015),
        ],
    ],
    [
        [
            c(-0.014005, -0.04979250000000001),
            c(-0.10396750000000005, -0.09430999999999999),
        ],
        [
            c(0.06493, 0.03093000000000001),
            c(0.084285, -0.012887500000000012),
        ],
    ],
    [
        [
            c(-0.07161902500000002, -0.06781353749999999),
            c(-0.01991736249999999, 0.034406650000000025),
        ],
        [
            c(0.07271010000000001, 0.0025227749999999975),
            c(-0.00380270000000001, -0.030910475000000007),
        ],
    ],
    [
        [
            c(-0.003034677999999999, 0.007426691750000003),
            c(0.0013191812500000111, 0.036474756000000004),
        ],
        [
            c(-0.0008811655000000027, -0.007219315875000002),
            c(-0.018544852250000004, -0.017004191749999998),
        ],
    ],
];
const MONO_SKEW_SKEW: [f64; 9] = [1.0, 0.0, 4.0, 4.0, 24.0, 48.0, 180.0, 468.0, 1512.0];
const MONO_BER_SEMI: [f64; 9] = [1.0, 0.0, 2.0, 0.0, 6.0, 0.0, 20.0, 0.0, 70.0];
const MONO_SEMI_BER: [f64; 9] = [1.0, 0.0, 2.0, 0.0, 6.0, 0.0, 22.0, 0.0, 90.0];

fn mat(m: &M2) -> CMat {
    CMat::from_fn(2, 2, |i, j| m[i][j])
}

fn elem(m: &M2) -> BElement {
    BElement::new(mat(m)).unwrap()
}

fn close(got: &BElement, want: &M2, tol: f64) {
    let err = max_abs(&(got.matrix() - mat(want)));
    assert!(err < tol, "deviation {err:e}\n{got:?}");
}

fn scalar_model(x: &[f64]) -> Arc<dyn Distribution> {
    let m = BElement::from_real_diag(x).into_matrix();
    Arc::new(MatrixModel::new(MatricialElement::new(x.len(), 1, m).unwrap()).unwrap())
}

fn scalar_moments(dist: &dyn Distribution, n: usize) -> Vec<f64> {
    let one = MatricialElement::identity(1, 1);
    dist.matricial_moments(&one, n)
        .unwrap()
        .iter()
        .map(|m| m.matrix()[(0, 0)].re)
        .collect()
}

fn b_and_c() -> (BElement, BElement) {
    let b = elem(&[[c(0.3, 0.0), c(0.2, 0.1)], [c(0.0, -0.4), c(0.5, 0.0)]]);
    let cc = elem(&[[c(-0.2, 0.0), c(0.1, 0.0)], [c(0.7, 0.0), c(0.0, 0.1)]]);
    (b, cc)
}

fn two_term_bernoulli() -> Arc<dyn Distribution> {
    let a1 = elem(&[[c(1.0, 0.0), c(0.5, 0.0)], [c(0.5, 0.0), c(-1.0, 0.0)]]);
    let a2 = elem(&[[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.3, 0.0)]]);
    Arc::new(CentralLaw::bernoulli(
        CPMap::averaged(vec![a1, a2]).unwrap(),
    ))
}

#[test]
fn normalized_scalar_powers() {
    let x = dilate(scalar_model(&[1.0, -1.0, 2.0, -2.0]), 1.0 / 3f64.sqrt()).unwrap();
    let free = scalar_moments(free_power(x.clone(), 3.0, 8).unwrap().as_ref(), 8);
    let triple = free_sum(
        vec![(x.clone(), 1.0), (x.clone(), 1.0), (x.clone(), 1.0)],
        8,
    )
    .unwrap();
    let free_sum_m = scalar_moments(triple.as_ref(), 8);
    let boolean = scalar_moments(boolean_power(x, 3.0, 8).unwrap().as_ref(), 8);
    for n in 1..=8 {
        assert!((free[n] - FREE3_SYM[n - 1]).abs() < 1e-10, "free order {n}");
        assert!(
            (free_sum_m[n] - FREE3_SYM[n - 1]).abs() < 1e-10,
            "free sum order {n}"
        );
        assert!(
            (boolean[n] - BOOL3_SYM[n - 1]).abs() < 1e-10,
            "boolean order {n}"
        );
    }
}

#[test]
fn two_term_bernoulli_free_square() {
    let ber = two_term_bernoulli();
    let sum = free_convolve(ber.clone(), ber, 6).unwrap();
    let (b, cc) = b_and_c();
    let one = BElement::identity(2);
    for (n, want) in &BERBER_B {
        let mut bs = vec![b.clone(); n - 1];
        bs.push(one.clone());
        close(&sum.multilinear_moment(&bs).unwrap(), want, 1e-12);
    }
    let word = [b.clone(), cc.clone(), b.clone(), cc.clone(), b.clone(), one];
    close(
        &sum.multilinear_moment(&word).unwrap(),
        &BERBER_BCBCB,
        1e-12,
    );
}

#[test]
fn two_term_bernoulli_boolean_square() {
    let ber = two_term_bernoulli();
    let sum = boolean_convolve(ber.clone(), ber, 6).unwrap();
    let (b, cc) = b_and_c();
    let word = [
        b.clone(),
        cc.clone(),
        b.clone(),
        cc,
        b,
        BElement::identity(2),
    ];
    close(
        &sum.multilinear_moment(&word).unwrap(),
        &BOOLBER_BCBCB,
        1e-12,
    );
}

#[test]
fn matrix_model_sums() {
    let y1 = [
        [c(0.5, 0.0), c(0.2, 0.0), c(0.1, 0.0), c(0.0, 0.3)],
        [c(0.2, 0.0), c(-0.4, 0.0), c(0.2, 0.0), c(0.0, 0.0)],
        [c(0.1, 0.0), c(0.2, 0.0), c(0.1, 0.0), c(-0.6, 0.0)],
        [c(0.0, -0.3), c(0.0, 0.0), c(-0.6, 0.0), c(0.2, 0.0)],
    ];
    let y2 = [
        [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.5), c(0.0, 0.0)],
        [c(0.0, 0.0), c(0.0, -0.5), c(0.3, 0.0), c(0.2, 0.0)],
        [c(0.0, 0.0), c(0.0, 0.0), c(0.2, 0.0), c(-0.3, 0.0)],
    ];
    let model = |y: &[[Complex64; 4]; 4]| -> Arc<dyn Distribution> {
        let m = CMat::from_fn(4, 4, |i, j| y[i][j]);
        Arc::new(MatrixModel::new(MatricialElement::new(2, 2, m).unwrap()).unwrap())
    };
    let (b, cc) = b_and_c();
    let alternating = [b.clone(), cc.clone(), b, cc];
    let one = BElement::identity(2);
    type Op = fn(
        Arc<dyn Distribution>,
        Arc<dyn Distribution>,
        usize,
    ) -> opfp::Result<Arc<dyn Distribution>>;
    for (op, table) in [
        (free_convolve as Op, &MODELS_FREE),
        (boolean_convolve as Op, &MODELS_BOOLEAN),
    ] {
        let sum = op(model(&y1), model(&y2), 5).unwrap();
        for n in 1..=5 {
            let mut bs = alternating[..n - 1].to_vec();
            bs.push(one.clone());
            close(&sum.multilinear_moment(&bs).unwrap(), &table[n - 1], 1e-12);
        }
    }
}

#[test]
fn scalar_monotone_compositions() {
    let skew = scalar_model(&[2.0, -1.0, -1.0]);
    let got = scalar_moments(
        monotone_convolve(skew.clone(), skew, 8).unwrap().as_ref(),
        8,
    );
    let ber: Arc<dyn Distribution> = Arc::new(CentralLaw::bernoulli(CPMap::identity(1)));
    let semi: Arc<dyn Distribution> = Arc::new(CentralLaw::semicircle(CPMap::identity(1)));
    let ber_semi = scalar_moments(
        monotone_convolve(ber.clone(), semi.clone(), 8)
            .unwrap()
            .as_ref(),
        8,
    );
    let semi_ber = scalar_moments(monotone_convolve(semi, ber, 8).unwrap().as_ref(), 8);
    for n in 0..=8 {
        assert!((got[n] - MONO_SKEW_SKEW[n]).abs() < 1e-9, "skew order {n}");
        assert!(
            (ber_semi[n] - MONO_BER_SEMI[n]).abs() < 1e-9,
            "ber-semi order {n}"
        );
        assert!(
            (semi_ber[n] - MONO_SEMI_BER[n]).abs() < 1e-9,
            "semi-ber order {n}"
        );
    }
}

#[test]
fn monotone_witness_differs_at_fourth_moment() {
    // centered scalar pairs share m4, so the witness needs a nonzero mean
    let shifted = scalar_model(&[2.0, 0.0]);
    let ber = scalar_model(&[1.0, -1.0]);
    let ab = scalar_moments(
        monotone_convolve(shifted.clone(), ber.clone(), 6)
            .unwrap()
            .as_ref(),
        6,
    );
    let ba = scalar_moments(monotone_convolve(ber, shifted, 6).unwrap().as_ref(), 6);
    let want_ab = [1.0, 1.0, 3.0, 6.0, 15.0, 35.0, 85.0];
    let want_ba = [1.0, 1.0, 3.0, 7.0, 18.0, 46.0, 119.0];
    for n in 0..=6 {
        assert!((ab[n] - want_ab[n]).abs() < 1e-9, "order {n}");
        assert!((ba[n] - want_ba[n]).abs() < 1e-9, "order {n}");
    }
}
