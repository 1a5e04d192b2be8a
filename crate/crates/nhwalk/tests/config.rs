use nhwalk::{CoinKind, ConfigInput, Experiment, ValidationError};
use proptest::prelude::*;

#[test]
fn minimal_file_gets_defaults() {
    let cfg = ConfigInput::from_toml("experiment = \"hn_spectrum\"\nL = 100\ng_list = [0, 0.5]\n")
        .unwrap()
        .resolve()
        .unwrap();
    assert_eq!(cfg.experiment, Experiment::HnSpectrum);
    assert_eq!(cfg.sites, Some(100));
    assert_eq!(cfg.g_list, Some(vec![0.0, 0.5]));
    assert_eq!(cfg.disorder, Some(1.0));
    assert_eq!(cfg.boundary.as_deref(), Some("periodic"));
    assert_eq!(cfg.tol, 1e-9);
    assert_eq!(cfg.realizations, 1);
}

#[test]
fn decreasing_g_list_names_the_field() {
    let err = ConfigInput::from_toml("experiment = \"hn_spectrum\"\ng_list = [0.5, 0.1]\n")
        .unwrap()
        .resolve()
        .unwrap_err();
    assert_eq!(err.field, "g_list");
    let err = ConfigInput::from_toml("experiment = \"walk_spectrum\"\ng_list = [0.5, 0.5]\n")
        .unwrap()
        .resolve()
        .unwrap_err();
    assert_eq!(err.field, "g_list");
}

#[test]
fn flags_override_file() {
    let file = ConfigInput::from_toml("experiment = \"hn_spectrum\"\nseed = 5\ng = 0.2\n").unwrap();
    let flags = ConfigInput {
        seed: Some(9),
        g_list: Some(vec![0.1, 0.3]),
        ..ConfigInput::default()
    };
    let cfg = file.overlay(flags).resolve().unwrap();
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.g_list, Some(vec![0.1, 0.3]));
}

#[test]
fn experiment_defaults() {
    let resolve = |e| {
        ConfigInput {
            experiment: Some(e),
            ..ConfigInput::default()
        }
        .resolve()
        .unwrap()
    };
    let walk = resolve(Experiment::WalkSpectrum);
    assert_eq!(walk.sites, Some(500));
    assert_eq!(walk.g_list, Some(vec![0.40, 0.45, 0.50, 0.55, 0.60]));
    assert_eq!(walk.coin, Some(CoinKind::Haar));
    assert_eq!(walk.disorder, None);
    let tm = resolve(Experiment::TmKappa);
    assert_eq!(tm.products, Some(100_000));
    assert_eq!(tm.theta_grid.as_ref().map(Vec::len), Some(129));
    assert_eq!(tm.sites, None);
    let ev = resolve(Experiment::WalkEvolve);
    assert_eq!((ev.steps, ev.sites), (Some(100), Some(202)));
    assert_eq!(resolve(Experiment::HnSpectrum).g_list.unwrap().len(), 12);
}

#[test]
fn rejections() {
    let bad = |text: &str| -> ValidationError {
        ConfigInput::from_toml(text)
            .and_then(|c| c.resolve())
            .unwrap_err()
    };
    assert_eq!(bad("experiment = \"hn_spectrum\"\nbogus = 1\n").field, "bogus");
    assert_eq!(bad("experiment = \"hn_spectrum\"\nW = -1.0\n").field, "W");
    assert_eq!(bad("experiment = \"hn_spectrum\"\nboundary = \"twisted\"\n").field, "boundary");
    assert_eq!(bad("experiment = \"hn_spectrum\"\nrealizations = 0\n").field, "realizations");
    assert_eq!(bad("experiment = \"hn_spectrum\"\ntol = 0.0\n").field, "tol");
    assert_eq!(bad("experiment = \"hn_spectrum\"\nT = 4\n").field, "T");
    assert_eq!(bad("experiment = \"tm_kappa\"\nN = 10\n").field, "N");
    assert_eq!(bad("experiment = \"tm_kappa\"\ntheta_grid = [0.0, 4.0]\n").field, "theta_grid");
    assert_eq!(bad("experiment = \"tm_kappa\"\ncoin = \"fixed\"\n").field, "coin_theta");
    assert_eq!(bad("experiment = \"walk_evolve\"\nT = 10\nL = 12\n").field, "L");
    assert_eq!(bad("experiment = \"walk_evolve\"\ng_list = [0.0, 0.1]\n").field, "g_list");
    assert_eq!(bad("experiment = \"hn_profile\"\nL = 10\nstate = 10\n").field, "state");
    assert_eq!(bad("L = 10\n").field, "experiment");
}

proptest! {
    #[test]
    fn increasing_lists_always_resolve(start in -2.0f64..2.0, steps in prop::collection::vec(1e-6f64..1.0, 1..8)) {
        let mut list = vec![start];
        for s in steps {
            let next = list.last().unwrap() + s;
            list.push(next);
        }
        let cfg = ConfigInput {
            experiment: Some(Experiment::HnSpectrum),
            g_list: Some(list.clone()),
            ..ConfigInput::default()
        }
        .resolve()
        .unwrap();
        prop_assert_eq!(cfg.g_list, Some(list));
    }

    #[test]
    fn resolved_config_round_trips_through_toml(seed in 0u64..(i64::MAX as u64), l in 2usize..5000, w in 0.0f64..10.0) {
        let cfg = ConfigInput {
            experiment: Some(Experiment::HnProfile),
            sites: Some(l),
            disorder: Some(w),
            seed: Some(seed),
            ..ConfigInput::default()
        }
        .resolve()
        .unwrap();
        let back: nhwalk::RunConfig = toml::from_str(&cfg.to_toml()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
