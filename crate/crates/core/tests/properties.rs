mod common;

use common::*;
use proptest::prelude::*;
use qswitch::model::{bloch_rhs, build_system, lindblad_rhs};
use qswitch::pauli::{density_to_bloch, pauli_traces, BlochVector, bloch_to_density};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn bloch_density_round_trip(s in ball()) {
        bloch_round_trip(s).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn positivity_matches_ball_membership(s in cube_off_sphere()) {
        positivity_iff_inside_ball(s).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn lindblad_rhs_traceless_hermitian(spec in any_spec(), s in ball(), u in controls()) {
        generator_is_traceless_and_hermitian(spec, s, u).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn k_antisymmetric(spec in any_spec()) {
        control_generators_are_antisymmetric(spec).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn hermitian_channels_give_zero_offset(spec in hermitian_spec()) {
        hermitian_channels_have_no_offset(spec).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn bloch_and_master_equation_agree(spec in any_spec(), s in ball(), u in controls()) {
        let model = build_system(&spec).unwrap();
        let rho = bloch_to_density(&BlochVector::from_vector(s)).unwrap();
        let image = pauli_traces(&lindblad_rhs(&rho, &spec, u)).map(|z| z.re);
        let direct = bloch_rhs(&s, &model, u);
        let scale = 1.0 + direct.amax();
        prop_assert!((image - direct).amax() <= 1e-12 * scale);
    }

    #[test]
    fn physical_states_stay_in_ball(s in ball()) {
        let rho = bloch_to_density(&BlochVector::from_vector(s)).unwrap();
        prop_assert!(rho.min_eigenvalue() >= -1e-15);
        prop_assert!(density_to_bloch(&rho).unwrap().norm() <= 1.0 + 1e-15);
    }
}
