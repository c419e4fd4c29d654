mod common;

use common::{always_active_reward, seeded_instance, swap_arm, swap_instance};
use rmabf_core::env::synthetic_instance;
use rmabf_core::lp::{
    build_elp, build_offline_lp, elp_program, occupancy_from_solution, offline_program, solve_lp, ConfidenceModel,
    LpStatus, OccupancyForm, OccupancyLayout,
};
use rmabf_core::model::{RmabInstance, ACTIVE};

fn layout(inst: &RmabInstance, form: OccupancyForm) -> OccupancyLayout {
    OccupancyLayout {
        form,
        num_arms: inst.num_arms(),
        num_states: inst.num_states(),
    }
}

#[test]
fn offline_dimensions_for_three_arms_six_states() {
    let inst = synthetic_instance(1, 1, 0).unwrap();
    let lp = build_offline_lp(&inst);
    assert_eq!(lp.num_vars(), 36);
    assert_eq!(lp.ineq.len(), 1 + 3);
    assert_eq!(lp.eq.len(), 18 + 3);
}

#[test]
fn swap_chain_value_is_one_half() {
    let inst = swap_instance();
    // the chain alternates, so activating always earns 1 every other epoch
    let oracle = always_active_reward(&swap_arm());
    assert!((oracle - 0.5).abs() < 1e-12);
    for sol in [solve_lp(&build_offline_lp(&inst)).unwrap(), offline_program(&inst).solve().unwrap()] {
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - oracle).abs() < 1e-9);
        let occ = occupancy_from_solution(&sol, layout(&inst, OccupancyForm::StateAction)).unwrap();
        assert!((occ.state_mass(0, 0) - 0.5).abs() < 1e-9);
        assert!((occ.state_mass(0, 1) - 0.5).abs() < 1e-9);
        assert!((occ.state_action(0, 1, ACTIVE) - 0.5).abs() < 1e-9);
    }
    // activating in the rewardless state is free, so always-activate is
    // one of the optima
    let lp = build_offline_lp(&inst);
    let always = [0.0, 0.5, 0.0, 0.5];
    assert!(lp.max_violation(&always) < 1e-12);
    assert!((lp.objective_at(&always) - oracle).abs() < 1e-12);
}

#[test]
fn identical_arms_split_a_binding_budget() {
    let inst = RmabInstance::new(vec![swap_arm(), swap_arm()], 1, vec![0.5, 0.5], vec![0, 0]).unwrap();
    assert!(inst.validate().ok);
    let sol = offline_program(&inst).solve().unwrap();
    let occ = occupancy_from_solution(&sol, layout(&inst, OccupancyForm::StateAction)).unwrap();
    for n in 0..2 {
        assert!((occ.active_mass(n) - 0.5).abs() < 1e-9);
    }
}

#[test]
fn zero_width_ball_collapses_to_offline_program() {
    for seed in 0..10 {
        let inst = seeded_instance(seed, 1 + (seed as usize % 3), 2 + (seed as usize % 3));
        let offline = offline_program(&inst).solve().unwrap();
        let conf = ConfidenceModel::exact(&inst);
        let elp = elp_program(&conf, inst.budget(), inst.eta(), true);
        let decomposed = elp.solve().unwrap();
        let mono = solve_lp(&elp.to_standard_form()).unwrap();
        assert_eq!(decomposed.status, LpStatus::Optimal);
        assert!((decomposed.objective_value - offline.objective_value).abs() < 1e-6, "seed {seed}");
        assert!((mono.objective_value - offline.objective_value).abs() < 1e-6, "seed {seed}");
        let occ = occupancy_from_solution(&decomposed, layout(&inst, OccupancyForm::Transition)).unwrap();
        for n in 0..inst.num_arms() {
            assert!((occ.arm_mass(n) - 1.0).abs() <= 1e-7);
            assert!(occ.flow_residual(n, None).unwrap() <= 1e-7);
        }
    }
}

#[test]
fn floors_beyond_budget_make_the_extended_program_infeasible() {
    let inst = RmabInstance::new(vec![swap_arm(), swap_arm()], 1, vec![0.6, 0.6], vec![0, 0]).unwrap();
    assert!(!inst.validate().ok);
    let conf = ConfidenceModel::exact(&inst);
    let lp = build_elp(&conf, 1, inst.eta(), true);
    assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    assert_eq!(elp_program(&conf, 1, inst.eta(), true).solve().unwrap().status, LpStatus::Infeasible);
    // the unfair variant ignores the floors
    assert_eq!(solve_lp(&build_elp(&conf, 1, inst.eta(), false)).unwrap().status, LpStatus::Optimal);
}

#[test]
fn extended_dimensions_for_one_arm_two_states() {
    // interior bounds, so no ball row is implied by nonnegativity
    let conf = ConfidenceModel::new(
        vec![vec![[vec![0.5, 0.5], vec![0.5, 0.5]], [vec![0.5, 0.5], vec![0.5, 0.5]]]],
        vec![vec![[0.0, 0.3], [0.0, 0.6]]],
        vec![vec![[0.1, 0.1], [0.1, 0.1]]],
    )
    .unwrap();
    let lp = build_elp(&conf, 1, &[0.2], false);
    assert_eq!(lp.num_vars(), 8);
    // budget row plus 2 N S A S ball rows
    assert_eq!(lp.ineq.len(), 1 + 16);
    let fair = build_elp(&conf, 1, &[0.2], true);
    assert_eq!(fair.ineq.len(), 1 + 1 + 16);
}

#[test]
fn infeasible_solution_has_no_occupancy() {
    let inst = RmabInstance::new(vec![swap_arm(), swap_arm()], 1, vec![0.6, 0.6], vec![0, 0]).unwrap();
    let sol = offline_program(&inst).solve().unwrap();
    assert_eq!(sol.status, LpStatus::Infeasible);
    assert!(occupancy_from_solution(&sol, layout(&inst, OccupancyForm::StateAction)).is_err());
}

#[test]
fn optimism_dominates_offline_value_when_truth_is_in_the_ball() {
    for seed in 0..8 {
        let inst = seeded_instance(100 + seed, 2, 3);
        let offline = offline_program(&inst).solve().unwrap().objective_value;
        let exact = ConfidenceModel::exact(&inst);
        let s = inst.num_states();
        let p_hat = (0..inst.num_arms())
            .map(|n| (0..s).map(|st| [exact.p_hat(n, st, 0).to_vec(), exact.p_hat(n, st, 1).to_vec()]).collect())
            .collect();
        let r_hat = (0..inst.num_arms())
            .map(|n| (0..s).map(|st| [exact.r_hat(n, st, 0), exact.r_hat(n, st, 1)]).collect())
            .collect();
        let delta = vec![vec![[0.05, 0.05]; s]; inst.num_arms()];
        let conf = ConfidenceModel::new(p_hat, r_hat, delta).unwrap();
        let optimistic = elp_program(&conf, inst.budget(), inst.eta(), true).solve().unwrap();
        assert!(optimistic.objective_value >= offline - 1e-9, "seed {seed}");
    }
}

#[test]
fn identical_inputs_give_identical_solutions() {
    let inst = synthetic_instance(4, 4, 9).unwrap();
    let a = offline_program(&inst).solve().unwrap();
    let b = offline_program(&inst).solve().unwrap();
    assert_eq!(a, b);
    let conf = ConfidenceModel::exact(&inst);
    let x = build_elp(&conf, 4, inst.eta(), true);
    assert_eq!(solve_lp(&x).unwrap(), solve_lp(&x).unwrap());
}
