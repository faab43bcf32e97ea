use mimo_pls::channel::{sample_links, LinkParams};
use mimo_pls::detectors::{DetectorId, Thresholds};
use mimo_pls::harness::{
    detection_probability, run_fig1, run_fig4, AttackPattern, CapacitySweep, DetectionScenario, Fig4Config,
};
use mimo_pls::numerics::RngStream;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn small_fig4() -> Fig4Config {
    Fig4Config {
        m: 64,
        snr_grid_db: vec![-10.0, -4.0, 2.0, 8.0, 14.0, 20.0],
        trials: 2_000,
        target_pfa: 0.02,
        ..Default::default()
    }
}

#[test]
fn results_independent_of_worker_count() {
    let cfg = Fig4Config {
        snr_grid_db: vec![0.0, 10.0],
        trials: 1_000,
        ..small_fig4()
    };
    let rng = RngStream::new(11, 0);
    let one = in_pool(1, || run_fig4(&cfg, &rng).unwrap());
    let three = in_pool(3, || run_fig4(&cfg, &rng).unwrap());
    assert_eq!(one, three);

    let sweep = CapacitySweep {
        m_grid: vec![8, 32],
        link: LinkParams::default(),
        p_tx: 1.0,
        trials: 300,
    };
    assert_eq!(
        in_pool(1, || run_fig1(&sweep, &rng).unwrap()),
        in_pool(4, || run_fig1(&sweep, &rng).unwrap())
    );
}

#[test]
fn detection_nondecreasing_in_snr() {
    let res = run_fig4(&small_fig4(), &RngStream::new(12, 0)).unwrap();
    for detector in [DetectorId::Scheme1a, DetectorId::Scheme1b, DetectorId::Scheme2] {
        let curve: Vec<_> = res
            .points
            .iter()
            .filter(|p| p.detector == detector)
            .map(|p| p.detection.as_estimate())
            .collect();
        for w in curve.windows(2) {
            assert!(!w[0].significantly_above(&w[1]), "{detector}: {curve:?}");
        }
    }
    for p in res.curve() {
        assert!(p.ci_low <= p.estimate && p.estimate <= p.ci_high);
    }
}

#[test]
fn interval_width_shrinks_with_root_trials() {
    let s = DetectionScenario::new(
        LinkParams {
            m: 64,
            ..Default::default()
        },
        4,
        4,
    );
    let th = Thresholds {
        eig_ratio: 8.0,
        ..Thresholds::default()
    };
    let rng = RngStream::new(13, 0);
    let small = detection_probability(DetectorId::Scheme1b, &th, &s, AttackPattern::All, 1_000, &rng).unwrap();
    let large = detection_probability(DetectorId::Scheme1b, &th, &s, AttackPattern::All, 4_000, &rng).unwrap();
    let ratio = small.as_estimate().width() / large.as_estimate().width();
    assert!((1.7..=2.3).contains(&ratio), "{ratio}");
}

#[test]
fn channel_hardening() {
    // ‖g‖²/M has standard deviation β/√M.
    let root = RngStream::new(14, 0);
    let spread = |m: usize| {
        let params = LinkParams {
            m,
            ..Default::default()
        };
        let xs: Vec<f64> = (0..2_000)
            .map(|t| sample_links(&params, &mut root.child(t)).unwrap().0.norm_sqr() / m as f64)
            .collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
    };
    let (s16, s256) = (spread(16), spread(256));
    assert!((s16 * 4.0 - 1.0).abs() < 0.1, "{s16}");
    assert!((s256 * 16.0 - 1.0).abs() < 0.1, "{s256}");
}
