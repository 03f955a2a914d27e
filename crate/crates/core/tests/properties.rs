use proptest::prelude::*;
use qubit_retro::bayes::{
    bayes_residual, is_unscathed, kraus_from_choi, star_product, two_time_expectation, two_time_projector,
};
use qubit_retro::channel::{apply, is_cptp, BlochState, ChannelRep, PauliChannel, Ptm};
use qubit_retro::mat::{pauli_expand, pauli_reconstruct, CMat4, C64};
use qubit_retro::{bayesian_inverse, Error};

fn bloch() -> impl Strategy<Value = BlochState> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.0..1.0f64).prop_map(|(x, y, z, radius)| {
        let n = (x * x + y * y + z * z).sqrt().max(1e-9);
        BlochState::new([x / n * radius, y / n * radius, z / n * radius]).unwrap_or_else(|_| BlochState::maximally_mixed())
    })
}

fn pauli() -> impl Strategy<Value = PauliChannel> {
    prop::array::uniform4(0.0..1.0f64).prop_filter_map("nonzero weights", |w| {
        let sum: f64 = w.iter().sum();
        (sum > 1e-6).then(|| PauliChannel::new(w.map(|x| x / sum)).unwrap())
    })
}

/// PTM `diag(1, R1 diag(lambda) R2)` from Euler angles.
fn unital() -> impl Strategy<Value = ChannelRep> {
    (pauli(), prop::array::uniform3(0.0..6.3f64), prop::array::uniform3(0.0..6.3f64)).prop_map(|(p, a, b)| {
        let rot = |ang: [f64; 3]| {
            let (c1, s1, c2, s2, c3, s3) =
                (ang[0].cos(), ang[0].sin(), ang[1].cos(), ang[1].sin(), ang[2].cos(), ang[2].sin());
            [
                [c1 * c3 - c2 * s1 * s3, -c1 * s3 - c2 * c3 * s1, s1 * s2],
                [c3 * s1 + c1 * c2 * s3, c1 * c2 * c3 - s1 * s3, -c1 * s2],
                [s2 * s3, c3 * s2, c2],
            ]
        };
        let (r1, r2, l) = (rot(a), rot(b), p.lambda());
        let mut m = [[0.0; 4]; 4];
        m[0][0] = 1.0;
        for i in 0..3 {
            for j in 0..3 {
                m[i + 1][j + 1] = (0..3).map(|k| r1[i][k] * l[k] * r2[k][j]).sum();
            }
        }
        ChannelRep::Ptm(Ptm(m))
    })
}

fn hermitian4() -> impl Strategy<Value = CMat4> {
    prop::collection::vec(-1.0..1.0f64, 32).prop_map(|v| {
        CMat4::from_fn(|i, j| C64::new(v[4 * i + j], v[16 + 4 * i + j])).hermitian_part()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pauli_round_trip(m in hermitian4()) {
        prop_assert!(pauli_reconstruct(&pauli_expand(&m)).max_abs_diff(&m) <= 1e-12);
    }

    #[test]
    fn star_product_marginal_and_trace(ch in unital(), s in bloch()) {
        let pdm = star_product(&ch, &s);
        prop_assert!((pdm.trace() - 1.0).abs() <= 1e-10);
        prop_assert!(pdm.matrix().is_hermitian(1e-12));
        let out = apply(&ch, &s).unwrap();
        prop_assert!(pdm.later_marginal().max_abs_diff(&out.matrix()) <= 1e-12);
    }

    #[test]
    fn expectation_paths_agree(ch in unital(), s in bloch(), a in 1usize..=3, b in 1usize..=3) {
        let star = two_time_expectation(&star_product(&ch, &s), a, b).unwrap();
        let proj = two_time_projector(&s, &ch, a, b).unwrap();
        prop_assert!((star - proj).abs() <= 1e-12);
    }

    #[test]
    fn unscathed_states_keep_their_purity(p in pauli(), s in bloch()) {
        if is_unscathed(&p, &s).is_some() {
            prop_assert!((p.apply_bloch(&s).purity() - s.purity()).abs() <= 1e-12);
        }
    }

    #[test]
    fn axis_states_of_two_entry_channels_are_unscathed(q in 0.01..0.99f64, r in -1.0..1.0f64, axis in 1usize..=3) {
        let mut probs = [0.0; 4];
        probs[0] = q;
        probs[axis] = 1.0 - q;
        let mut v = [0.0; 3];
        v[axis - 1] = r;
        let p = PauliChannel::new(probs).unwrap();
        prop_assert!(is_unscathed(&p, &BlochState::new(v).unwrap()).is_some());
    }

    #[test]
    fn kraus_reproduces_channel(ch in unital(), s in bloch()) {
        let ops = kraus_from_choi(&ch.choi(), 1e-9).unwrap();
        let via_kraus = ChannelRep::Kraus(ops).apply_operator(&s.matrix());
        prop_assert!(via_kraus.max_abs_diff(&ch.apply_operator(&s.matrix())) <= 1e-9);
    }

    #[test]
    fn returned_inverses_are_certified(ch in unital(), s in bloch()) {
        match bayesian_inverse(&ch, &s, 1e-9) {
            Ok(rec) => {
                let f = rec.channel();
                prop_assert!(is_cptp(&f, 1e-9));
                prop_assert!(bayes_residual(&ch, &s, &f) <= 1e-9);
                prop_assert!(rec.report.feasible);
                prop_assert!((rec.a[(0, 0)] - 1.0).abs() <= 1e-12);
                for i in 1..4 {
                    prop_assert!(rec.a[(i, 0)].abs() <= 1e-12);
                }
            }
            Err(Error::NoInverse(_)) => {}
            Err(other) => prop_assert!(false, "unexpected error {other}"),
        }
    }
}
