use symreg::bench::{Scenario, ScenarioId};
use symreg::selection::{global_ems, SelectionInput, SymmetriserMode};
use symreg::{delta_cover, derive_rng, ParentGroup};

/// f₃ has no exact symmetry, yet it is close to invariant under the circle
/// about its mean gradient. Measured: Trivial wins 10 to 14 of 30 seeds for
/// δ ∈ {1, π²/6} under either averaging mode, so this majority claim does not
/// hold and the test is kept out of the default run.
#[test]
#[ignore = "claim not reproduced: circles near the gradient direction win most seeds"]
fn f3_trivial_wins_majority_of_seeds() {
    let scenario = Scenario::builtin(ScenarioId::So3F3).unwrap();
    let cover = delta_cover(ParentGroup::SO3, &scenario.space, 1.0).unwrap();
    let mut trivial = 0;
    for seed in 0..30u64 {
        let mut rng = derive_rng(seed, &[1]);
        let fit = scenario.generate_data(0.5, 300, &mut rng).unwrap();
        let holdout = scenario.generate_data(0.5, 300, &mut rng).unwrap();
        let input = SelectionInput::new(&fit, &holdout, &cover).with_mode(SymmetriserMode::OrbitGrid);
        if global_ems(&input).unwrap().chosen.is_trivial() {
            trivial += 1;
        }
    }
    assert!(trivial > 15, "trivial chosen in {trivial} of 30 seeds");
}
