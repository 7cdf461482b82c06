mod common;

#[test]
fn forward_inverse_round_trip() {
    common::forward_inverse().unwrap();
}

#[test]
fn compose_decompose_identity() {
    common::compose_decompose().unwrap();
}

#[test]
fn poisson_thickness_and_modulus_invariance() {
    common::poisson_invariance().unwrap();
}

#[test]
fn regression_matches_exact_normal_equations() {
    common::regression_exact().unwrap();
}

#[test]
fn solver_energy_monotone_and_square_symmetric() {
    common::solver_energy_and_symmetry().unwrap();
}

#[test]
fn monte_carlo_is_deterministic() {
    common::monte_carlo_determinism().unwrap();
}
