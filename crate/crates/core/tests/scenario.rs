use seiscontrol::dataset::{synth_groningen, write_density, write_extraction, write_wells};
use seiscontrol::scenario::{
    run_ensemble, run_prepared, sweep_dtc, sweep_k3, DatasetSource, Mode, Prepared, ReferencePiece, ScenarioConfig,
};
use seiscontrol::units::HOURS_PER_MONTH;
use seiscontrol::Error;

/// 1988-01 .. 1996-12 with control from 1991-12.
fn short(mode: Mode, seed: u64) -> ScenarioConfig {
    let mut c = ScenarioConfig {
        mode,
        seed,
        ..ScenarioConfig::default()
    };
    c.time.start = "1988-01".into();
    c.time.end = "1996-12".into();
    c
}

#[test]
fn series_invariants_hold() {
    for mode in [Mode::NoControl, Mode::Scenario1, Mode::Scenario2] {
        let p = Prepared::new(&short(mode, 3)).unwrap();
        let r = run_prepared(&p, 0).unwrap();
        let s = &r.series;
        assert_eq!(s.len(), p.axis.steps());
        assert_eq!(*s.cum_events.last().unwrap() as usize, r.catalog.len());

        let dt = p.axis.dt;
        let mut vol = 0.0;
        for q in &s.q_applied {
            vol -= q.iter().map(|v| v.min(0.0)).sum::<f64>() * dt / HOURS_PER_MONTH;
        }
        assert!(
            (vol - r.extracted_volume()).abs() <= 1e-9 * vol.abs(),
            "{vol} vs {}",
            r.extracted_volume()
        );

        for w in r.catalog.events.windows(2) {
            assert!(w[0].t <= w[1].t);
        }
        assert!(r
            .catalog
            .events
            .iter()
            .all(|e| e.t >= p.axis.t0() && e.t <= r.horizon.1));
    }
}

#[test]
fn each_event_counted_in_one_control_interval() {
    let p = Prepared::new(&short(Mode::Scenario1, 4)).unwrap();
    let r = run_prepared(&p, 0).unwrap();
    let dt_c = p.axis.control_period();
    let mut counted = 0;
    for rec in &r.control_log {
        let n = r
            .catalog
            .events
            .iter()
            .filter(|e| e.t >= rec.t - dt_c && e.t < rec.t)
            .count();
        assert_eq!(rec.n_events as usize, n, "at t = {}", rec.t);
        counted += n;
    }
    let first = r.control_log[0].t - dt_c;
    let last = r.control_log.last().unwrap().t;
    let inside = r.catalog.events.iter().filter(|e| e.t >= first && e.t < last).count();
    assert_eq!(counted, inside);
}

#[test]
fn applied_flux_is_a_staircase_between_samples() {
    let p = Prepared::new(&short(Mode::Scenario2, 1)).unwrap();
    let r = run_prepared(&p, 0).unwrap();
    let start = p.axis.control_start_step;
    let per = p.axis.steps_per_control;
    for k in (start..p.axis.steps()).step_by(per) {
        for s in k + 1..(k + per).min(p.axis.steps()) {
            assert_eq!(r.series.q_applied[s], r.series.q_applied[k], "step {s}");
        }
    }
    for (rec, k) in r.control_log.iter().zip((start..).step_by(per)) {
        assert_eq!(rec.q_applied, r.series.q_applied[k]);
    }
}

#[test]
fn quiet_reservoir_stays_quiet() {
    let mut c = short(Mode::Scenario1, 0);
    c.seismicity.r_star_0 = 0.0;
    c.control.reference = vec![ReferencePiece {
        from: "1988-01".into(),
        events_per_year: 0.0,
    }];
    let mut ds = synth_groningen(1).unwrap();
    ds.extraction.total.iter_mut().for_each(|f| *f = 0.0);
    let p = Prepared::with_dataset(&c, &mut ds).unwrap();
    let r = run_prepared(&p, 0).unwrap();
    assert!(r.catalog.is_empty());
    assert!(!r.control_log.is_empty());
    assert!(r.control_log.iter().all(|rec| rec.q_c.iter().all(|&q| q == 0.0)));
}

#[test]
fn lockstep_ensemble_matches_separate_runs() {
    let p = Prepared::new(&short(Mode::NoControl, 9)).unwrap();
    let ens = run_ensemble(&p, 3).unwrap();
    for run in 0..3 {
        let r = run_prepared(&p, run).unwrap();
        assert_eq!(ens.catalogs[run as usize], r.catalog);
        assert_eq!(ens.stats.terminal[run as usize] as usize, r.total_events());
    }
    assert_eq!(ens.stats, run_ensemble(&p, 3).unwrap().stats);
    assert!(matches!(run_ensemble(&p, 1), Err(Error::Config(_))));
}

#[test]
fn uncontrolled_count_variance_is_poisson() {
    let p = Prepared::new(&short(Mode::NoControl, 2)).unwrap();
    let ens = run_ensemble(&p, 200).unwrap();
    let s = &ens.stats;
    let dispersion = s.terminal_std().powi(2) / s.terminal_mean();
    assert!((0.6..1.4).contains(&dispersion), "var/mean = {dispersion}");
    assert!(s.terminal_z() < 4.0);
}

#[test]
fn halving_the_physics_step_barely_moves_the_intensity() {
    let c = short(Mode::NoControl, 0);
    let mut fine = c.clone();
    fine.time.physics_dt_hr /= 2.0;
    let a = run_prepared(&Prepared::new(&c).unwrap(), 0).unwrap().expected_events();
    let b = run_prepared(&Prepared::new(&fine).unwrap(), 0)
        .unwrap()
        .expected_events();
    assert!((a - b).abs() / b < 0.01, "{a} vs {b}");
}

#[test]
fn sweep_validation() {
    let c = short(Mode::Scenario1, 0);
    assert!(matches!(sweep_dtc(&c, &[100.0]), Err(Error::Config(_))));
    let rows = sweep_k3(&c, &[36.05]).unwrap();
    assert_eq!(rows.len(), 1);
    let rows = sweep_dtc(&c, &[HOURS_PER_MONTH, 3.0 * HOURS_PER_MONTH]).unwrap();
    assert_eq!(rows.len(), 2);
}

#[test]
fn scenario2_needs_both_roles() {
    let mut c = short(Mode::Scenario2, 0);
    let ds = synth_groningen(1).unwrap();
    c.control.producers = Some(ds.wells.iter().map(|w| w.id.clone()).collect());
    assert!(matches!(Prepared::new(&c), Err(Error::Config(_))));
    c.control.producers = Some(vec!["W99".into()]);
    assert!(matches!(Prepared::new(&c), Err(Error::Config(_))));
    c.control.producers = Some(vec!["W01".into(), "W02".into()]);
    let p = Prepared::new(&c).unwrap();
    assert_eq!(p.allocation.unwrap().w.iter().sum::<f64>(), 2.0);
}

#[test]
fn file_dataset_reproduces_the_generator() {
    let dir = tempfile::tempdir().unwrap();
    let ds = synth_groningen(1).unwrap();
    write_wells(&dir.path().join("wells.csv"), &ds.wells, &ds.shares).unwrap();
    write_extraction(&dir.path().join("extraction.csv"), &ds.extraction).unwrap();
    write_density(&dir.path().join("density.csv"), &ds.grid, &ds.density).unwrap();
    let mut c = short(Mode::NoControl, 0);
    c.dataset = DatasetSource::Files {
        grid: ds.grid_spec.clone(),
        wells: "wells.csv".into(),
        extraction: "extraction.csv".into(),
        density: "density.csv".into(),
    };
    let path = dir.path().join("scenario.toml");
    std::fs::write(&path, c.to_toml()).unwrap();
    let loaded = ScenarioConfig::load(&path).unwrap();
    let from_files = run_prepared(&Prepared::new(&loaded).unwrap(), 0).unwrap();
    let synthetic = run_prepared(&Prepared::new(&short(Mode::NoControl, 0)).unwrap(), 0).unwrap();
    let (a, b) = (from_files.expected_events(), synthetic.expected_events());
    assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");
}
