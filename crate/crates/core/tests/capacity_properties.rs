use mimo_pls::channel::LinkParams;
use mimo_pls::cli::{Command, SystemConfig};
use mimo_pls::harness::{run_fig1, run_fig2, CapacitySweep};
use mimo_pls::numerics::RngStream;
use mimo_pls::stats::Estimate;

const GRID: [usize; 3] = [16, 64, 256];

fn strictly_rising(xs: &[Estimate]) -> bool {
    xs.windows(2).all(|w| w[1].significantly_above(&w[0]))
}

#[test]
fn passive_lu_rises_while_ed_stays_flat() {
    let sweep = CapacitySweep {
        m_grid: GRID.to_vec(),
        link: LinkParams::default(),
        p_tx: 1.0,
        trials: 10_000,
    };
    let pts = run_fig1(&sweep, &RngStream::new(31, 0)).unwrap();
    let lu: Vec<Estimate> = pts.iter().map(|p| p.ergodic.c_lu).collect();
    assert!(strictly_rising(&lu), "{lu:?}");
    let ed: Vec<f64> = pts.iter().map(|p| p.ergodic.c_ed.mean).collect();
    let mean = ed.iter().sum::<f64>() / ed.len() as f64;
    assert!(ed.iter().all(|c| (c / mean - 1.0).abs() < 0.1), "{ed:?}");
    for p in &pts {
        assert!(p.ergodic.c_sc.mean >= 0.0);
    }
}

#[test]
fn active_ed_capacity_rises() {
    let sweep = CapacitySweep {
        m_grid: GRID.to_vec(),
        trials: 10_000,
        ..SystemConfig::defaults_for(Command::Fig2).capacity_sweep()
    };
    let pts = run_fig2(&sweep, &RngStream::new(32, 0)).unwrap();
    let ed: Vec<Estimate> = pts.iter().map(|p| p.ergodic.c_ed).collect();
    assert!(strictly_rising(&ed), "{ed:?}");
}
