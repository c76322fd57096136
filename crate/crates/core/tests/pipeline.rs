use std::path::PathBuf;

use phimodel::bounds::{z_closed_thm3, EntropyFactor, Side, TailQuery};
use phimodel::cli::parse_spec;
use phimodel::planner::{check_condition, plan_minimal_n, PlanOptions, Theorem};
use phimodel::process::ProcessSpec;
use phimodel::simulate::TimeGrid;
use phimodel::validate::{estimate_exceedance, estimate_sweep, ValidationConfig};

fn spec(name: &str) -> ProcessSpec {
    parse_spec(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)).unwrap()
}

fn cfg(theorem: Theorem, grid: usize, n_paths: usize) -> ValidationConfig {
    ValidationConfig {
        grid: TimeGrid::uniform(1.0, grid).unwrap(),
        n_paths,
        seed: 7,
        theorem,
        plan: PlanOptions::default(),
        n_ref: None,
    }
}

#[test]
fn planned_model_meets_its_reliability() {
    let spec = spec("wiener-kl.spec");
    let plan = plan_minimal_n(&spec, 0.5, 0.05, Theorem::T4, &PlanOptions::default()).unwrap();
    let r = estimate_exceedance(&spec, plan.n, 0.5, &cfg(Theorem::T4, 513, 2000)).unwrap();
    assert!(r.bound_valid);
    assert!(r.empirical_prob <= 0.05);
    assert!(r.dominated);
}

#[test]
fn interval_form_dominated_where_valid() {
    let spec = spec("wiener-kl.spec");
    let ns = [1usize, 2, 4, 8];
    let deltas = [2.0, 2.5, 3.0];
    let reports = estimate_sweep(&spec, &ns, &deltas, &cfg(Theorem::T7, 513, 3000)).unwrap();
    let checked: Vec<_> = reports.iter().filter(|r| r.is_checkable()).collect();
    assert!(!checked.is_empty());
    assert!(checked.iter().all(|r| r.dominated));
}

#[test]
fn approximation_error_sweep_dominated() {
    let spec = spec("wiener-kl-approx.spec");
    let reports = estimate_sweep(&spec, &[2, 4, 5, 8], &[2.5, 3.0], &cfg(Theorem::T11, 257, 2000)).unwrap();
    for r in &reports {
        if r.is_checkable() {
            assert!(r.dominated, "{r:?}");
        }
    }
    // empirical frequency is non-increasing in delta on the same paths
    for pair in reports.chunks(2) {
        assert!(pair[1].exceedances <= pair[0].exceedances);
    }
}

#[test]
fn class_two_example_plans_and_validates() {
    let spec = spec("damped-trig.spec");
    let plan = plan_minimal_n(&spec, 1.0, 0.05, Theorem::T5, &PlanOptions::default()).unwrap();
    assert!(plan.nu_achieved <= 0.05 && plan.delta_threshold.is_none());
    let c = ValidationConfig {
        grid: TimeGrid::uniform(2.0, 257).unwrap(),
        ..cfg(Theorem::T5, 257, 1000)
    };
    let r = estimate_exceedance(&spec, plan.n, 1.0, &c).unwrap();
    assert!(r.dominated);
}

#[test]
fn interval_form_equals_free_form_at_substituted_p() {
    // ClassII tag at zeta = 2: no threshold, so the identity is visible everywhere
    let spec = {
        let s = spec("wiener-kl.spec");
        let phi = phimodel::orlicz::PhiFunction::new(2.0, phimodel::orlicz::PhiClass::ClassII).unwrap();
        ProcessSpec::new(s.space, s.modulus, s.entropy, phi, s.family.clone(), None, s.xi.clone()).unwrap()
    };
    let opts = PlanOptions::default();
    for n in [5usize, 40, 300] {
        for delta in [0.4, 1.0, 2.0] {
            let c = check_condition(&spec, n, delta, Theorem::T8, None, &opts).unwrap();
            let g = c.gamma.gamma;
            let q = TailQuery::new(
                delta,
                g / delta,
                spec.modulus.beta(&spec.space),
                g,
                spec.phi,
                EntropyFactor::Limiting { alpha: spec.modulus.alpha() },
            )
            .unwrap();
            let b = z_closed_thm3(&q).unwrap().for_side(Side::Abs);
            assert!(((c.log_nu - b.log_value) / b.log_value).abs() < 1e-12);
        }
    }
    // the interval form plans a finite N where the ClassI threshold blocks it
    let plan = plan_minimal_n(&spec, 0.5, 0.05, Theorem::T8, &opts).unwrap();
    assert!(plan.n > 0);
}
