use avlab::kernel::{kernel_materialize, FnKernel, ScaledKernel, SumKernel};
use avlab::processes::{exact_kernel, ProcessModel};
use avlab::theory::{
    av_stationary, block_moments, gamma_star_mo, gamma_star_no, gamma_tilde_mo, gamma_tilde_no,
    moav_ns, moav_oracle, noav_ns, noav_oracle, theoretical_av, GeneralizedAcvf, StationaryAcvf,
};
use avlab::{ScaleGrid, Variant};
use proptest::prelude::*;

const REL_TOL: f64 = 1e-10;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Every built-in model at lengths up to `max_len`, block models with all
/// block shapes that tile the length.
fn model_zoo(max_len: usize) -> Vec<(ProcessModel, usize)> {
    let mut zoo = Vec::new();
    for len in 4..=max_len {
        zoo.push((ProcessModel::ns_white_noise(), len));
        zoo.push((ProcessModel::WhiteNoise { sigma2: 1.7 }, len));
        zoo.push((
            ProcessModel::StationaryAr1 {
                phi: -0.6,
                sigma2: 0.8,
            },
            len,
        ));
        for l in (1..=len).filter(|l| len % l == 0) {
            let b = len / l;
            zoo.push((
                ProcessModel::BiasInstability {
                    sigma2: 1.3,
                    block_length: l,
                    num_blocks: b,
                },
                len,
            ));
            zoo.push((
                ProcessModel::BlockAr1 {
                    phi: 0.9,
                    sigma2: 1.0,
                    block_length: l,
                    num_blocks: b,
                },
                len,
            ));
        }
    }
    zoo
}

#[test]
fn closed_form_matches_oracle_for_all_models_up_to_48() {
    for (model, len) in model_zoo(48) {
        let k = exact_kernel(&model, len).unwrap();
        for n in ScaleGrid::dyadic(len).unwrap().iter() {
            let pairs = [
                (
                    moav_ns(&k, len, n).unwrap(),
                    moav_oracle(&k, len, n).unwrap(),
                    "moav",
                ),
                (
                    noav_ns(&k, len, n).unwrap(),
                    noav_oracle(&k, len, n).unwrap(),
                    "noav",
                ),
            ];
            for (lemma, oracle, v) in pairs {
                assert!(
                    close(lemma, oracle, REL_TOL),
                    "{model:?} T={len} n={n} {v}: {lemma} vs {oracle}"
                );
            }
        }
    }
}

#[test]
fn closed_form_matches_oracle_at_non_dyadic_windows() {
    for (model, len) in [
        (ProcessModel::ns_white_noise(), 37),
        (
            ProcessModel::BlockAr1 {
                phi: 0.7,
                sigma2: 2.0,
                block_length: 7,
                num_blocks: 5,
            },
            35,
        ),
        (
            ProcessModel::BiasInstability {
                sigma2: 1.0,
                block_length: 3,
                num_blocks: 11,
            },
            33,
        ),
    ] {
        let k = exact_kernel(&model, len).unwrap();
        for n in 1..=len / 2 {
            assert!(close(
                moav_ns(&k, len, n).unwrap(),
                moav_oracle(&k, len, n).unwrap(),
                REL_TOL
            ));
            assert!(close(
                noav_ns(&k, len, n).unwrap(),
                noav_oracle(&k, len, n).unwrap(),
                REL_TOL
            ));
        }
    }
}

#[test]
fn block_moment_route_agrees() {
    for (model, len) in model_zoo(24) {
        let k = exact_kernel(&model, len).unwrap();
        for n in ScaleGrid::dyadic(len).unwrap().iter() {
            for v in [Variant::Moav, Variant::Noav] {
                let bm = block_moments(&k, len, n, v).unwrap();
                let direct = theoretical_av(&k, len, n, v).unwrap();
                assert!(close(bm.allan_variance(), direct, REL_TOL));
                assert!(close(bm.sigma_bar() - bm.gamma_bar(), direct, REL_TOL));
            }
        }
    }
}

#[test]
fn accelerated_and_literal_generalized_autocovariances_agree() {
    for (model, len) in [
        (ProcessModel::ns_white_noise(), 40),
        (
            ProcessModel::BlockAr1 {
                phi: 0.9,
                sigma2: 1.0,
                block_length: 5,
                num_blocks: 8,
            },
            40,
        ),
        (
            ProcessModel::BiasInstability {
                sigma2: 2.0,
                block_length: 4,
                num_blocks: 10,
            },
            40,
        ),
    ] {
        let k = exact_kernel(&model, len).unwrap();
        for n in [1, 2, 3, 4, 8, 10] {
            let mo = GeneralizedAcvf::new(&k, len, n, Variant::Moav).unwrap();
            let no = GeneralizedAcvf::new(&k, len, n, Variant::Noav).unwrap();
            for h in 0..2 * n {
                assert!(close(
                    mo.gamma_tilde(h).unwrap(),
                    gamma_tilde_mo(&k, len, n, h).unwrap(),
                    1e-12
                ));
                assert!(close(
                    no.gamma_tilde(h).unwrap(),
                    gamma_tilde_no(&k, len, n, h).unwrap(),
                    1e-12
                ));
            }
            for h in 1..n {
                assert!(close(
                    mo.gamma_star(h).unwrap(),
                    gamma_star_mo(&k, len, n, h).unwrap(),
                    1e-12
                ));
                assert!(close(
                    no.gamma_star(h).unwrap(),
                    gamma_star_no(&k, len, n, h).unwrap(),
                    1e-12
                ));
            }
        }
    }
}

#[test]
fn stationary_kernels_reduce_to_the_classical_formula() {
    let len = 128;
    let mut acvfs = vec![StationaryAcvf::white_noise(2.5).unwrap()];
    for phi in [0.0, 0.5, 0.9, -0.5] {
        acvfs.push(StationaryAcvf::ar1(phi, 1.0).unwrap());
    }
    for acvf in &acvfs {
        for n in ScaleGrid::dyadic(len).unwrap().iter() {
            let classical = av_stationary(acvf, n);
            assert!(close(moav_ns(acvf, len, n).unwrap(), classical, REL_TOL));
            assert!(close(noav_ns(acvf, len, n).unwrap(), classical, REL_TOL));
            let g = GeneralizedAcvf::new(acvf, len, n, Variant::Moav).unwrap();
            for h in 0..2 * n {
                assert!(close(g.gamma_tilde(h).unwrap(), acvf.gamma(h), 1e-12));
            }
            for h in 1..n {
                assert!(close(g.gamma_star(h).unwrap(), acvf.gamma(h), 1e-12));
            }
        }
    }
}

#[test]
fn covariance_matrices_are_positive_semidefinite() {
    for (model, len) in model_zoo(64)
        .into_iter()
        .filter(|(_, len)| [16, 30, 64].contains(len))
    {
        let k = exact_kernel(&model, len).unwrap();
        let m = kernel_materialize(&k, len).unwrap();
        let min = m.symmetric_eigen().eigenvalues.min();
        assert!(min >= -1e-8, "{model:?}: smallest eigenvalue {min}");
    }
}

fn random_kernel(seed: u64, len: usize) -> FnKernel<impl Fn(usize, usize) -> f64 + Send + Sync> {
    // Γ = A Aᵀ for a pseudo-random A, so the kernel is a valid covariance.
    let mut state = seed | 1;
    let a: Vec<f64> = (0..len * len)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    FnKernel::with_domain(
        move |s, t| {
            (0..len)
                .map(|j| a[(s - 1) * len + j] * a[(t - 1) * len + j])
                .sum()
        },
        len,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn arbitrary_covariances_match_the_oracle(seed in any::<u64>(), len in 4usize..28) {
        let k = random_kernel(seed, len);
        for n in 1..=len / 2 {
            prop_assert!(close(moav_ns(&k, len, n).unwrap(), moav_oracle(&k, len, n).unwrap(), 1e-9));
            prop_assert!(close(noav_ns(&k, len, n).unwrap(), noav_oracle(&k, len, n).unwrap(), 1e-9));
        }
    }

    #[test]
    fn allan_variance_is_linear_in_the_kernel(
        a in 0.0f64..5.0,
        b in 0.0f64..5.0,
        phi in -0.95f64..0.95,
        len in 8usize..80,
    ) {
        let k1 = exact_kernel(&ProcessModel::ns_white_noise(), len).unwrap();
        let k2 = StationaryAcvf::ar1(phi, 1.0).unwrap();
        let sum = SumKernel {
            left: ScaledKernel { factor: a, inner: &k1 },
            right: ScaledKernel { factor: b, inner: &k2 },
        };
        for n in ScaleGrid::dyadic(len).unwrap().iter() {
            for v in [Variant::Moav, Variant::Noav] {
                let lhs = theoretical_av(&sum, len, n, v).unwrap();
                let rhs = a * theoretical_av(&k1, len, n, v).unwrap()
                    + b * theoretical_av(&k2, len, n, v).unwrap();
                prop_assert!(close(lhs, rhs, 1e-10));
                prop_assert!(lhs >= -1e-12);
            }
        }
    }

    #[test]
    fn moav_equals_noav_for_stationary_kernels(phi in -0.95f64..0.95, len in 4usize..300) {
        let k = StationaryAcvf::ar1(phi, 1.0).unwrap();
        for n in ScaleGrid::dyadic(len).unwrap().iter() {
            prop_assert!(close(moav_ns(&k, len, n).unwrap(), noav_ns(&k, len, n).unwrap(), REL_TOL));
        }
    }
}
