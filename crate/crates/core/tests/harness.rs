use approx::assert_relative_eq;
use rdflow::harness::output::{
    AUDIT_FILE, AUDIT_HEADER, CONFIG_FILE, PLOT_FILE, REFERENCE_FILE, SOLUTION_FILE,
};
use rdflow::harness::*;
use rdflow::mesh::Mesh1D;
use rdflow::riemann::Primitive;

fn small(name: &str, n_cells: usize) -> RunConfig {
    let mut cfg = builtin(name).unwrap();
    cfg.n_cells = n_cells;
    cfg
}

#[test]
fn builtin_configs_round_trip_through_toml() {
    for (name, _) in CASES {
        let cfg = builtin(name).unwrap();
        cfg.validate().unwrap();
        let text = cfg.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg, "{name}");
    }
}

#[test]
fn config_files_load_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("case.toml");
    let cfg = builtin("epoxy_spinel").unwrap();
    cfg.save(&path).unwrap();
    assert_eq!(RunConfig::load(&path).unwrap(), cfg);
}

#[test]
fn invalid_configs_are_configuration_errors() {
    let mut cfg = builtin("sod").unwrap();
    cfg.t_final = -1.0;
    assert_eq!(cfg.validate().unwrap_err().exit_code(), 1);
    let mut cfg = builtin("sod").unwrap();
    cfg.order = 3;
    assert_eq!(run_case(&cfg).unwrap_err().exit_code(), 1);
    assert_eq!(builtin("nope").unwrap_err().exit_code(), 1);
    assert!(RunConfig::from_toml("case = 3").is_err());
}

#[test]
fn l1_error_examples() {
    let mesh = Mesh1D::new(0.0, 2.0, 8).unwrap();
    let linear: Vec<f64> = mesh.vertices().iter().map(|x| 3.0 * x - 1.0).collect();
    assert_eq!(l1_error(&linear, &linear, &mesh).unwrap(), 0.0);
    let shifted: Vec<f64> = linear.iter().map(|v| v + 0.5).collect();
    assert_relative_eq!(
        l1_error(&shifted, &linear, &mesh).unwrap(),
        0.5 * 2.0,
        max_relative = 1e-15
    );
    let err = l1_error(&linear[1..], &linear, &mesh).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn single_phase_outputs_follow_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small("sod", 50);
    cfg.output = Some(dir.path().to_path_buf());
    let result = run_case(&cfg).unwrap();
    for f in [
        SOLUTION_FILE,
        REFERENCE_FILE,
        AUDIT_FILE,
        CONFIG_FILE,
        PLOT_FILE,
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let solution = std::fs::read_to_string(dir.path().join(SOLUTION_FILE)).unwrap();
    let mut lines = solution.lines();
    assert_eq!(lines.next(), Some("x,rho,u,p,e"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 5);
    // 17 significant digits
    let mantissa = row[1].split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    assert_eq!(solution.lines().count(), cfg.n_cells + 2);

    let audit = std::fs::read_to_string(dir.path().join(AUDIT_FILE)).unwrap();
    assert_eq!(audit.lines().next(), Some(AUDIT_HEADER));
    assert_eq!(audit.lines().count() - 1, result.steps);
    assert_eq!(result.audit.len(), result.steps);

    let plot = std::fs::read_to_string(dir.path().join(PLOT_FILE)).unwrap();
    assert!(plot.contains(SOLUTION_FILE) && plot.contains(REFERENCE_FILE));
    let saved = RunConfig::load(&dir.path().join(CONFIG_FILE)).unwrap();
    assert_eq!(saved.n_cells, 50);
}

#[test]
fn multiphase_outputs_carry_phase_columns() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small("epoxy_spinel", 60);
    cfg.output = Some(dir.path().to_path_buf());
    run_case(&cfg).unwrap();
    for f in [SOLUTION_FILE, REFERENCE_FILE] {
        let text = std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert_eq!(text.lines().next(), Some("x,rho,u,p,e,alpha1,Y1"), "{f}");
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 7);
    }
}

#[test]
fn audit_can_be_switched_off() {
    let mut cfg = small("sod", 40);
    cfg.audit = false;
    let result = run_case(&cfg).unwrap();
    assert!(result.audit.is_empty() && result.steps > 0);
}

#[test]
fn identical_configs_give_identical_files() {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let mut cfg = small("mixed_eos", 80);
            cfg.output = Some(dir.path().to_path_buf());
            run_case(&cfg).unwrap();
            let read = |f| std::fs::read(dir.path().join(f)).unwrap();
            (read(SOLUTION_FILE), read(REFERENCE_FILE), read(AUDIT_FILE))
        })
        .collect();
    assert!(runs[0] == runs[1]);
}

#[test]
fn runs_land_exactly_on_the_final_time() {
    let cfg = small("cochran_riemann", 100);
    let result = run_case(&cfg).unwrap();
    assert_eq!(result.time, cfg.t_final);
    let last = result.audit.last().unwrap();
    assert_eq!(last.time, cfg.t_final);
}

#[test]
fn step_budget_runs_the_requested_steps() {
    let cfg = small("contact_perfect_gas", 40);
    let result = run_case(&cfg).unwrap();
    assert_eq!(result.steps, 1000);
}

#[test]
fn failed_runs_flush_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = builtin("sod").unwrap();
    // two strong rarefactions drive the pressure negative near the centre
    cfg.problem = Problem::Riemann {
        eos: rdflow::eos::EosModel::perfect_gas(1.4),
        left: Primitive::new(1.0, -3.5, 0.4),
        right: Primitive::new(1.0, 3.5, 0.4),
    };
    cfg.t_final = 0.1;
    cfg.output = Some(dir.path().to_path_buf());
    let e = run_case(&cfg).unwrap_err();
    assert_eq!(e.exit_code(), 2, "{e}");
    assert!(e.to_string().contains("(step 3, t = "), "{e}");
    let audit = std::fs::read_to_string(dir.path().join(AUDIT_FILE)).unwrap();
    assert_eq!(audit.lines().count(), 1 + 2);
    assert!(dir.path().join(SOLUTION_FILE).exists());
    assert!(!dir.path().join(REFERENCE_FILE).exists());
}

#[test]
fn lsq_slope_recovers_power_laws() {
    let h = [0.1, 0.05, 0.025, 0.0125];
    let e: Vec<f64> = h.iter().map(|h: &f64| 3.0 * h.powf(1.7)).collect();
    assert_relative_eq!(lsq_slope(&h, &e).unwrap(), 1.7, max_relative = 1e-12);
    assert!(lsq_slope(&h[..1], &e[..1]).is_err());
    assert!(lsq_slope(&h, &e[1..]).is_err());
}

#[test]
fn convergence_study_needs_three_increasing_levels() {
    let cfg = builtin("acoustic_pulse").unwrap();
    assert!(convergence_study(&cfg, &[50, 100]).is_err());
    assert!(convergence_study(&cfg, &[100, 50, 200]).is_err());
    // self-convergence needs doubling levels
    assert!(convergence_study(&cfg, &[50, 100, 150]).is_err());
}

#[test]
fn density_wave_second_order_conservative() {
    let mut cfg = builtin("density_wave").unwrap();
    cfg.formulation = rdflow::euler::Formulation::Conservative;
    let report = convergence_study(&cfg, &[400, 800, 1600]).unwrap();
    assert!(!report.richardson);
    assert!(report.monotone);
    assert!(report.slope >= 1.8, "{report:?}");
}

#[test]
fn density_wave_second_order_pressure() {
    let cfg = builtin("density_wave").unwrap();
    let report = convergence_study(&cfg, &[400, 800, 1600]).unwrap();
    assert!(report.slope >= 1.8, "{report:?}");
}

#[test]
fn density_wave_first_order() {
    let mut cfg = builtin("density_wave").unwrap();
    cfg.formulation = rdflow::euler::Formulation::Conservative;
    cfg.order = 1;
    let report = convergence_study(&cfg, &[100, 200, 400]).unwrap();
    assert!((0.7..=1.2).contains(&report.slope), "{report:?}");
}

#[test]
fn density_wave_reference_is_exact_advection() {
    let cfg = builtin("density_wave").unwrap();
    let mesh = Mesh1D::new(0.0, 1.0, 20).unwrap();
    let r0 = reference_profile(&cfg, &mesh, 0.0).unwrap().unwrap();
    let r1 = reference_profile(&cfg, &mesh, 0.1).unwrap().unwrap();
    // shifted by two cells at u0 = 1
    for i in 2..=20 {
        assert_relative_eq!(r1.rho[i], r0.rho[i - 2], max_relative = 1e-12);
    }
}
