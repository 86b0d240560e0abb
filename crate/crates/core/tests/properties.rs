mod common;

macro_rules! checks {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = common::$name() {
                    panic!("{e}");
                }
            }
        )*
    };
}

checks!(
    rank_round_trip,
    sphere_sizes_sum,
    distance_is_metric,
    face_expansion,
    macwilliams_involution,
    linear_distance_is_weight,
    hamming_codes_are_perfect,
    spectrum_sums,
    spectrum_row_sums,
    spectrum_matches_empirical,
    verify_cr_idempotent,
    hull_is_coarsest,
    group_axioms,
    canonical_codes_stable,
    canonical_pairs_stable,
    aut_order_divides,
    orbit_stabilizer,
    cover_matches_brute_force,
    cover_solutions_validate,
    cliques_match_brute_force,
    cover_deterministic,
    radius_one_classes,
    classify_threads_and_resume,
    design_invariants,
);
