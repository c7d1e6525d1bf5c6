//! Acceptance suite. One test per criterion; each prints a PASS line with its
//! measurements (visible with `--nocapture`). Every tolerance is exact and
//! pinned here.
//!
//! 1. committee-example verdicts, symmetric and asymmetric strengths
//! 2. axiom corpus all valid, necessitation lifts included
//! 3. 500-formula tableau/oracle cross-check, zero contradictions
//! 4. transformation chain preserves every extracted witness
//! 5. branch discipline: depth bound and polynomial live-branch growth
//! 6. partition counts match the closed form

use rayon::prelude::*;

use lgdda::agents::{all_groups, Agent, Group};
use lgdda::axioms::{corpus, nec, CorpusBounds};
use lgdda::formula::{parse, subformula_closure, OuterFormula};
use lgdda::grades::{binomial, partitions, Grade};
use lgdda::kripke::{eval_designated, validate_ngdm, validate_qngdm};
use lgdda::oracle::{corpus_formula, cross_check, GenConfig, SearchBounds};
use lgdda::semantics::check;
use lgdda::tableau::{decide_formula, Mode, Outcome, TableauConfig, Verdict};
use lgdda::transforms::{filtrate, magbm_to_qngdm, ngdm_to_magbm, qngdm_to_ngdm};

fn decide(phi: &OuterFormula, mode: Mode, extract: bool) -> Verdict {
    decide_formula(phi, mode, extract, &TableauConfig::default()).expect("within resource budgets")
}

/// The shared committee hypothesis: everyone holds the funding rule at
/// strength k0, and the four members split on the two criteria at strengths
/// k1..k4.
fn committee_hypothesis(k: [u64; 5]) -> String {
    let rule = "in <-> (id & hi)";
    format!(
        "B{{Ann,{0}}} ({rule}) & B{{Bob,{0}}} ({rule}) & B{{Cath,{0}}} ({rule}) & B{{John,{0}}} ({rule}) \
         & B{{Ann,{1}}} id & B{{Bob,{2}}} hi & B{{Cath,{3}}} ~id & B{{John,{4}}} ~hi",
        k[0], k[1], k[2], k[3], k[4]
    )
}

fn committee_claims(k: [u64; 5]) {
    let hypothesis = committee_hypothesis(k);
    let [k0, k1, k2, k3, k4] = k;
    let pro_grade = (2 * k0).min(k1).min(k2) - 1;
    let con_grade = (2 * k0).min(k3 + k4) - 1;
    let disagreement = k1.min(k3) + k2.min(k4);

    let valid = |consequent: &str| {
        let phi = parse(&format!("({hypothesis}) -> ({consequent})")).unwrap();
        assert_eq!(
            decide(&phi, Mode::Valid, false).outcome,
            Outcome::Valid,
            "expected valid: {consequent} at strengths {k:?}"
        );
    };
    let invalid_with_countermodel = |consequent: &str| {
        let phi = parse(&format!("({hypothesis}) -> ({consequent})")).unwrap();
        let verdict = decide(&phi, Mode::Valid, true);
        assert_eq!(
            verdict.outcome,
            Outcome::Invalid,
            "expected invalid: {consequent} at strengths {k:?}"
        );
        let model = verdict.model.expect("countermodel extracted");
        assert!(validate_qngdm(&model).unwrap().ok());
        assert!(eval_designated(&model, &phi.clone().neg()));
        assert!(!eval_designated(&model, &parse(consequent).unwrap()));
    };

    valid(&format!("D{{Ann Bob,{pro_grade}}} in"));
    valid(&format!("D{{Cath John,{con_grade}}} ~in"));
    invalid_with_countermodel("disagree{Ann Bob,1}");
    invalid_with_countermodel("disagree{Cath John,1}");
    valid(&format!("disagree{{Ann Bob Cath John,{disagreement}}}"));
    // and the disagreement bound is tight
    let beyond = parse(&format!(
        "({hypothesis}) -> disagree{{Ann Bob Cath John,{}}}",
        disagreement + 1
    ))
    .unwrap();
    assert_eq!(decide(&beyond, Mode::Valid, false).outcome, Outcome::Invalid);
}

#[test]
fn criterion_1_committee_example() {
    committee_claims([1, 1, 1, 1, 1]);
    committee_claims([1, 2, 1, 1, 2]);
    println!("criterion 1 (committee verdicts, strengths [1,1,1,1,1] and [1,2,1,1,2]): PASS");
}

#[test]
fn criterion_2_axiom_soundness() {
    let bounds = CorpusBounds {
        agents: 3,
        max_grade: 3,
        atoms: 2,
        max_omega: 3,
        max_psi: 2,
    };
    let instances = corpus(&bounds);
    let failures: Vec<String> = instances
        .par_iter()
        .filter(|phi| decide(phi, Mode::Valid, false).outcome != Outcome::Valid)
        .map(|phi| phi.to_string())
        .collect();
    assert!(failures.is_empty(), "invalid instances: {failures:?}");

    // one necessitation lift per instance, rotating over groups and grades
    let agents: std::collections::BTreeSet<Agent> =
        (1..=3).map(|i| Agent::new(i.to_string())).collect();
    let groups = all_groups(&agents);
    let lift_failures: Vec<String> = instances
        .par_iter()
        .enumerate()
        .filter_map(|(i, phi)| {
            let lifted = nec(groups[i % groups.len()].clone(), (i % 4) as u64, phi.clone());
            (decide(&lifted, Mode::Valid, false).outcome != Outcome::Valid)
                .then(|| lifted.to_string())
        })
        .collect();
    assert!(lift_failures.is_empty(), "invalid lifts: {lift_failures:?}");
    println!(
        "criterion 2 (axiom soundness): PASS: {} instances and as many lifts all valid",
        instances.len()
    );
}

fn criterion_3_config() -> (GenConfig, SearchBounds) {
    (
        GenConfig {
            agents: 2,
            atoms: 2,
            max_grade: 2,
            max_depth: 3,
            seed: 0xC0FFEE,
            ..Default::default()
        },
        SearchBounds {
            max_worlds: 2,
            max_grade: 2,
            max_support: 2,
            budget: 20_000_000,
        },
    )
}

const CROSS_CHECK_N: usize = 500;

#[test]
fn criterion_3_oracle_cross_check() {
    let (cfg, bounds) = criterion_3_config();
    let report = cross_check(CROSS_CHECK_N, &cfg, &bounds)
        .expect("no tableau/oracle contradiction and no resource error");
    assert_eq!(report.n, CROSS_CHECK_N);
    assert_eq!(
        report.sat + report.unsat_confirmed,
        CROSS_CHECK_N,
        "every unsat verdict must be confirmed within the bounds"
    );
    println!(
        "criterion 3 (oracle cross-check): PASS: {} sat (models re-verified), {} unsat confirmed",
        report.sat, report.unsat_confirmed
    );
}

#[test]
fn criterion_4_transformation_cycle() {
    let (cfg, _) = criterion_3_config();
    let preserved: usize = (0..CROSS_CHECK_N)
        .into_par_iter()
        .map(|i| {
            let phi = corpus_formula(&cfg, i);
            let verdict = decide(&phi, Mode::Sat, true);
            let Some(model) = verdict.model else {
                return 0;
            };
            assert!(eval_designated(&model, &phi), "witness holds: {phi}");

            let filtered = filtrate(&model, &phi).expect("witness validates");
            let bound = 1usize
                .checked_shl(subformula_closure(&phi).len() as u32)
                .unwrap_or(usize::MAX);
            assert!(filtered.worlds().len() <= bound.min(model.worlds().len()));
            assert!(eval_designated(&filtered, &phi), "filtration broke {phi}");

            let strict = qngdm_to_ngdm(&filtered, &phi).expect("filtrate output validates");
            let n_groups = (1usize << strict.agents().len()) - 1;
            if n_groups > 0 {
                assert_eq!(
                    strict.worlds().len(),
                    filtered.worlds().len() * n_groups,
                    "one copy per world and group"
                );
            }
            assert!(validate_ngdm(&strict).unwrap().ok(), "repair not strict for {phi}");
            assert!(eval_designated(&strict, &phi), "repair broke {phi}");

            let states = ngdm_to_magbm(&strict).expect("strict model converts");
            assert!(check(&states, &phi), "state reading broke {phi}");

            let back = magbm_to_qngdm(&states).expect("states convert back");
            assert!(validate_qngdm(&back).unwrap().ok());
            assert!(eval_designated(&back, &phi), "return trip broke {phi}");
            1
        })
        .sum();
    assert!(preserved > 0, "corpus produced no satisfiable formulas");
    println!(
        "criterion 4 (transformation cycle): PASS: {preserved} witnesses preserved through all four transformations"
    );
}

#[test]
fn criterion_5_branch_discipline() {
    // depth bound over the cross-check corpus
    let (cfg, _) = criterion_3_config();
    let worst_slack: usize = (0..CROSS_CHECK_N)
        .into_par_iter()
        .map(|i| {
            let phi = corpus_formula(&cfg, i);
            let verdict = decide(&phi, Mode::Sat, false);
            assert!(
                verdict.stats.max_depth <= phi.modal_depth() + 1,
                "depth {} exceeds modal depth {} + 1 for {phi}",
                verdict.stats.max_depth,
                phi.modal_depth()
            );
            phi.modal_depth() + 1 - verdict.stats.max_depth
        })
        .max()
        .unwrap();

    // live-branch growth over a depth sweep: fit peak ~ size^e in log-log
    // and require a low-degree polynomial exponent
    let mut points = Vec::new();
    for depth in 1..=5usize {
        for j in 0..40usize {
            let sweep_cfg = GenConfig {
                max_depth: depth,
                seed: 0xBEEF + depth as u64,
                ..GenConfig::default()
            };
            let phi = corpus_formula(&sweep_cfg, j);
            let verdict = decide(&phi, Mode::Sat, false);
            let size = phi.node_count().max(2);
            let peak = verdict.stats.peak_branch_formulas.max(1);
            points.push(((size as f64).ln(), (peak as f64).ln()));
        }
    }
    let n = points.len() as f64;
    let (sx, sy): (f64, f64) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(
        slope <= 2.5,
        "live-branch memory grows too fast: fitted exponent {slope:.2}"
    );
    println!(
        "criterion 5 (branch discipline): PASS: depth bound held (max slack {worst_slack}), \
         live-branch growth exponent {slope:.2} over depths 1..5"
    );
}

#[test]
fn criterion_6_partition_combinatorics() {
    let mut checked = 0usize;
    for size in 1usize..=4 {
        let group = Group::new((0..size).map(|i| Agent::new(format!("a{i}")))).unwrap();
        for k in 0u64..=6 {
            let parts = partitions(Grade::Finite(k), &group).unwrap();
            assert_eq!(
                parts.len() as u64,
                binomial(k + size as u64 - 1, size as u64 - 1),
                "count off for k={k}, |J|={size}"
            );
            checked += 1;
        }
    }
    println!("criterion 6 (partition combinatorics): PASS: {checked} (k, group) pairs exact");
}
