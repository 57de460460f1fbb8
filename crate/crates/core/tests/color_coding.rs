mod common;

use common::small_case;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wbnsl::inversions::{
    color_restricted_solve, default_colors, ls_inversions, memo_key_bound, ColorRestrictedSolver, Coloring,
};
use wbnsl::oracle::brute_local_search;
use wbnsl::{is_valid_scored_dag, kendall_tau, Distance};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn any_coloring_gives_a_feasible_lower_bound(
        seed in any::<u64>(),
        k in 0u64..=3,
        r in 0usize..=4,
        colors in 1usize..=6,
    ) {
        let (f, tau) = small_case(seed, 6);
        let coloring = Coloring::random(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed), f.n(), colors);
        let res = color_restricted_solve(&f, &tau, k, r, &coloring);
        let opt = brute_local_search(&f, &tau, k, r, Distance::Inv).unwrap().score();
        prop_assert!(res.score() <= opt);
        prop_assert!(is_valid_scored_dag(&f, &res.dag, k).unwrap());
        prop_assert!(res.dag.witness_is_topological(&f));
        prop_assert!(kendall_tau(&tau, res.witness()).unwrap() <= r);
    }

    #[test]
    fn memo_stays_within_the_key_bound(
        seed in any::<u64>(),
        k in 0u64..=3,
        r in 0usize..=8,
        distinct in any::<bool>(),
    ) {
        let (f, tau) = small_case(seed, 7);
        let n = f.n();
        let coloring = if distinct {
            Coloring::all_distinct(n)
        } else {
            Coloring::random(&mut ChaCha8Rng::seed_from_u64(seed), n, default_colors(r))
        };
        let ell = coloring.num_colors();
        let mut solver = ColorRestrictedSolver::new(&f, &tau, k, r, &coloring);
        solver.value(k, r);
        let bound = memo_key_bound(r, ell, k);
        prop_assert!(solver.max_layer_keys() as f64 <= bound);
        prop_assert!(solver.visited_keys() as f64 <= (n + 1) as f64 * bound);
        if r >= 1 {
            prop_assert!(solver.visited_keys() as f64 <= bound);
        }
    }

    #[test]
    fn repetitions_never_hurt(seed in any::<u64>(), r in 1usize..=4) {
        let (f, tau) = small_case(seed, 6);
        let one = ls_inversions(&f, &tau, 1, r, seed, 1);
        let many = ls_inversions(&f, &tau, 1, r, seed, 4);
        prop_assert!(many.score() >= one.score());
        prop_assert_eq!(&many, &ls_inversions(&f, &tau, 1, r, seed, 4));
    }
}
