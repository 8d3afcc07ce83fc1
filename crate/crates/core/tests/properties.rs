use fragmentia::circuit::{BrickWindow, Bricking, FloquetCircuit, ReducedCircuit};
use fragmentia::clifford::TwoQubitClifford;
use fragmentia::dense::{dense_entropy_trace, StateVector};
use fragmentia::enumeration::{montecarlo_hits, montecarlo_wall_prob};
use fragmentia::gf2::{closure, Subspace};
use fragmentia::rng::stream;
use fragmentia::stabilizer::{half_cut, StabilizerTableau};
use fragmentia::walls::{
    conserved_charges, internal_subspaces, is_irreducible, is_wall, is_wall_bruteforce, two_sided_check, Side,
    WallReport,
};
use proptest::prelude::*;
use rand::Rng;

fn staircase<R: Rng>(k: usize, rng: &mut R, any: bool) -> ReducedCircuit {
    let gates = (0..=k)
        .map(|_| {
            if any {
                TwoQubitClifford::sample_any(rng)
            } else {
                TwoQubitClifford::sample_nonproduct(rng)
            }
        })
        .collect();
    ReducedCircuit::new(gates).unwrap()
}

/// Rejection-samples an irreducible left wall of width `k` from substream `seed`.
fn irreducible_wall(k: usize, seed: u64) -> ReducedCircuit {
    let mut rng = stream(seed, k as u64);
    loop {
        let rc = staircase(k, &mut rng, false);
        if is_wall(&rc, Side::Left) && is_irreducible(&rc) {
            return rc;
        }
    }
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(10_000))]

    #[test]
    fn walls_are_two_sided(seed: u64, k in 1usize..=3) {
        let rc = irreducible_wall(k, seed);
        prop_assert!(is_wall(&rc, Side::Right));
        prop_assert!(two_sided_check(&rc));
    }

    #[test]
    fn one_walls_conserve_a_single_pauli(seed: u64) {
        let rc = irreducible_wall(1, seed);
        let (gl, gr) = internal_subspaces(&rc);
        prop_assert_eq!(gl.intersection(&gr).unwrap().dim(), 1);
        let charges = conserved_charges(&rc).unwrap();
        prop_assert_eq!(charges.len(), 1);
        prop_assert_eq!(charges[0].tau, 1);
        prop_assert_eq!(charges[0].orbit[0].weight(), 1);
    }

    #[test]
    fn internal_subspaces_are_j_orthogonal(seed: u64, k in 1usize..=3) {
        let rc = irreducible_wall(k, seed);
        let (gl, gr) = internal_subspaces(&rc);
        prop_assert!(gl.is_j_orthogonal_to(&gr));
    }

    #[test]
    fn irreducible_walls_follow_the_class_pattern(seed: u64, k in 1usize..=3) {
        let rc = irreducible_wall(k, seed);
        prop_assert!(WallReport::class_pattern_holds(&rc));
    }

    #[test]
    fn detection_matches_time_iteration(seed: u64, k in 1usize..=3, any: bool, planted: bool) {
        let rc = if planted { irreducible_wall(k, seed) } else { staircase(k, &mut stream(seed, 99), any) };
        for side in [Side::Left, Side::Right] {
            prop_assert_eq!(is_wall(&rc, side), is_wall_bruteforce(&rc, side));
        }
    }
}

proptest! {
    #![proptest_config(config(2_000))]

    /// Reslicing the brickwork window into a staircase does not change which
    /// windows are walls.
    #[test]
    fn staircase_and_brickwork_agree(seed: u64, k in 1usize..=4, parity in 0usize..2, planted: bool) {
        let rc = if planted && k <= 3 { irreducible_wall(k, seed) } else { staircase(k, &mut stream(seed, 7), true) };
        let sites = k + 2;
        let brick = BrickWindow::new(rc.gates().to_vec(), parity);
        for (src, dst, side) in [(0, sites - 1, Side::Left), (sites - 1, 0, Side::Right)] {
            let reach = closure(&brick, &Subspace::sites(sites, [src]).unwrap()).unwrap();
            prop_assert_eq!(!reach.support().contains(&dst), is_wall(&rc, side));
        }
    }

    #[test]
    fn stabilizer_entropy_is_bounded_and_symmetric(seed: u64, n in 2usize..=12, p0 in 0usize..3) {
        let c = FloquetCircuit::build_realization(n, 0.0, seed, p0 as u64, Bricking::EvenFirst).unwrap();
        let mut tab = StabilizerTableau::init_zero(n).unwrap();
        for _ in 0..20 {
            tab.evolve(&c).unwrap();
            for cut in 1..n {
                let s = tab.entropy(cut).unwrap();
                prop_assert!(s <= cut.min(n - cut));
            }
        }
    }
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn dense_clifford_entropies_are_the_tableau_integers(seed: u64, n in 3usize..=8) {
        let c = FloquetCircuit::build_realization(n, 0.0, seed, 0, Bricking::EvenFirst).unwrap();
        let cut = half_cut(n);
        let exact = fragmentia::stabilizer::entropy_trace(&c, 30, cut).unwrap();
        let dense = dense_entropy_trace(&c, 30, cut).unwrap();
        for (a, b) in exact.iter().zip(&dense) {
            prop_assert!((*a as f64 - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn evolution_preserves_the_norm(seed: u64, n in 2usize..=10, p in 0.0f64..=1.0) {
        let c = FloquetCircuit::build_realization(n, p, seed, 0, Bricking::EvenFirst).unwrap();
        let mut s = StateVector::zero(n).unwrap();
        for _ in 0..1000 {
            s.evolve(&c).unwrap();
        }
        prop_assert!((s.norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn montecarlo_hits_pass_the_oracle() {
    for k in 1..=3 {
        let hits = montecarlo_hits(k, 200_000, 17);
        assert!(!hits.is_empty());
        for gates in hits {
            let rc = ReducedCircuit::new(gates).unwrap();
            assert!(is_wall_bruteforce(&rc, Side::Left) && is_wall_bruteforce(&rc, Side::Right));
        }
    }
}

#[test]
fn quadrupling_samples_halves_the_error() {
    let a = montecarlo_wall_prob(1, 100_000, 5).unwrap();
    let b = montecarlo_wall_prob(1, 400_000, 6).unwrap();
    let ratio = a.stderr / b.stderr;
    assert!((ratio - 2.0).abs() < 0.2, "stderr ratio {ratio}");
}
