use std::path::{Path, PathBuf};

use goalign::alignment::{analyze, make_simulated_oracle, run_elicitation, ExitReason};
use goalign::harness::{build_trial, Manifest, Scenario, ScenarioConfig, Suite};
use goalign::pddl::{load_task, parse_atom_text, parse_domain, parse_problem, read_text};
use goalign::planner::Planner;

fn bench(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks").join(rel)
}

fn tea() -> Scenario {
    let m = Manifest::load(&bench("tea/manifest.json")).unwrap();
    Scenario::from_manifest(&m, &ScenarioConfig::default()).unwrap()
}

#[test]
fn blocksworld_has_four_schemas() {
    let d = parse_domain(&read_text(&bench("blocksworld/domain.pddl")).unwrap()).unwrap();
    let names: Vec<&str> = d.action_schemas.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, ["pick-up", "put-down", "stack", "unstack"]);
}

#[test]
fn logistics_micro_size() {
    let d = parse_domain(&read_text(&bench("logistics/domain.pddl")).unwrap()).unwrap();
    let p = parse_problem(&read_text(&bench("logistics/micro.pddl")).unwrap(), &d).unwrap();
    assert_eq!(p.objects.len(), 6);
    assert_eq!(p.init.len(), 9);
    assert!(load_task(&bench("logistics/domain.pddl"), &bench("logistics/micro.pddl")).is_ok());
}

#[test]
fn suite_instances_all_load() {
    let suite = Suite::load(&bench("suite.json")).unwrap();
    assert!(suite.instances.len() >= 5);
    for m in &suite.instances {
        Scenario::from_manifest(m, &suite.config).unwrap();
    }
}

#[test]
fn tea_expected_state_and_unachievable_set() {
    let s = tea();
    let planner = Planner::default();
    let built = build_trial(&s, 0, &planner).unwrap();
    let table = s.table();
    let id = |t: &str| table.id(&parse_atom_text(t).unwrap()).unwrap();
    let expected = built.instance.expected_state();
    assert!(expected.contains(id("(ladder-used)")));
    assert!(expected.contains(id("(tea-high-quality)")));
    assert!(expected.contains(id("(tea-made)")));

    let b = analyze(&built.instance, &planner).unwrap();
    // Climbing needs a capability the robot lacks, so grounding drops it
    // and its effect stays unreachable.
    assert_eq!(b.unachievable.to_vec(), vec![id("(ladder-used)")]);
    assert_eq!(b.p(id("(tea-made)")), 1.0);
}

#[test]
fn tea_session_asks_about_the_ladder_first() {
    let s = tea();
    let planner = Planner::default();
    let built = build_trial(&s, 0, &planner).unwrap();
    let out = run_elicitation(&built.instance, &mut make_simulated_oracle(built.hidden.clone()), &planner).unwrap();
    let first = out.transcript.first().unwrap();
    assert_eq!(s.table().render(first.fluent), "(ladder-used)");
    assert!(!first.answer);
    assert!(matches!(out.exit, ExitReason::Terminated(_)));
    assert!(out.plan().is_some());
}
