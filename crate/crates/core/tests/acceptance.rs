//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use dragon_energetics::dataset::{table2, CollapsePolicy, Dimension};
use dragon_energetics::ecology::{feed_chain, komodo_base_mass, land_required, sheep_per_day, SheepParams};
use dragon_energetics::energetics::{basal_rate, daily_consumption, flight_energy_joules};
use dragon_energetics::feasibility::{
    build_ledger, evaluate, fire_energy, intake_energy, joules_per_lamb, FireParams, LedgerInputs,
};
use dragon_energetics::growth::{fit, grid_search_oracle, pattern_search_polish, rmse, GridBounds, GrowthModel};
use dragon_energetics::mesh::fixtures::{dragonoid, icosphere, unit_cube};
use dragon_energetics::mode::ComputationMode;
use dragon_energetics::pipeline::{run_backward, PipelineConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn paper_sheep() -> SheepParams {
    SheepParams::for_mode(ComputationMode::PaperFaithful)
}

fn metabolic_reproduction() -> Outcome {
    let full = daily_consumption(251328.27, 1.0).map_err(|e| e.to_string())?.daily_kcal.value();
    let third = daily_consumption(251328.27, 1.0 / 3.0).map_err(|e| e.to_string())?.daily_kcal.value();
    check(
        rel(full, 11_028_939.0) <= 5e-3 && rel(third, 4_595_391.0) <= 5e-3,
        format!("P_F=1: {full:.1} kcal/day, P_F=1/3: {third:.1} kcal/day"),
    )
}

fn forward_sheep_count() -> Outcome {
    let (real, ceil) = sheep_per_day(4_595_391.0, &paper_sheep()).map_err(|e| e.to_string())?;
    check(ceil == 85, format!("{real:.4} -> {ceil} sheep/day"))
}

fn backward_flight_energy() -> Outcome {
    let e = flight_energy_joules(2e6, 1.0 / 3.0).map_err(|e| e.to_string())?;
    check(rel(e, 8.99e10) <= 1e-2, format!("{e:.5e} J/day"))
}

fn fire_energy_values() -> Outcome {
    let f = FireParams::default();
    let twenty = fire_energy(20.0, &f).map_err(|e| e.to_string())?;
    let one = fire_energy(1.0, &f).map_err(|e| e.to_string())?;
    check(twenty == 4.32e8 && one == 2.16e7, format!("n=20: {twenty:e} J, n=1: {one:e} J"))
}

fn komodo_anchor() -> Outcome {
    let m = komodo_base_mass(1.0, &paper_sheep()).map_err(|e| e.to_string())?;
    check((m - 488.46).abs() < 5e-3 && rel(m, 490.0) <= 1e-2, format!("{m:.3} kg"))
}

fn backward_footprint() -> Outcome {
    let a = evaluate(&LedgerInputs::two_thousand_tonne(ComputationMode::PaperFaithful), &FireParams::default(), None)
        .map_err(|e| e.to_string())?;
    let lambs = a.verdict.lambs_required as f64;
    let acres = a.verdict.land_acres.value();
    check(
        rel(lambs, 95_571.0) <= 1e-2 && rel(acres, 34_132.0) <= 1e-2,
        format!("{lambs} lambs/day ({:.2}% off), {acres:.1} acres ({:.2}% off)", 100.0 * rel(lambs, 95_571.0), 100.0 * rel(acres, 34_132.0)),
    )
}

fn land_rule() -> Outcome {
    let acres = land_required(280.0, &paper_sheep()).map_err(|e| e.to_string())?;
    check(acres == 100.0, format!("280 sheep -> {acres} acres"))
}

fn growth_fit() -> Outcome {
    let data = table2().series(Dimension::BodyLength, CollapsePolicy::Midpoint);
    let fitted = fit(&data, None).map_err(|e| e.to_string())?;
    let grid = grid_search_oracle(&data, &GridBounds::default(), 60).map_err(|e| e.to_string())?;
    let polished = pattern_search_polish(&data, grid.model);
    let oracle = rmse(&polished.residuals(&data));
    let a = fitted.model.asymptote();
    let ts: Vec<f64> = (0..=600).map(|i| i as f64 * 0.05).collect();
    let values: Vec<f64> = ts.iter().map(|&t| fitted.model.eval(t)).collect();
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let bounded = values.iter().all(|&v| v < a);
    check(
        rel(fitted.rmse, oracle) <= 1e-2 && fitted.rmse <= 3.0 && increasing && bounded,
        format!(
            "solver rmse {:.5} m, oracle rmse {oracle:.5} m (grid {:.5}), increasing {increasing}, bounded by A={a:.3} {bounded}",
            fitted.rmse, grid.rmse
        ),
    )
}

fn mesh_volume() -> Outcome {
    let cube = unit_cube().volume().map_err(|e| e.to_string())?;
    let sphere = icosphere(3).volume().map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for mesh in [unit_cube(), icosphere(3), dragonoid()] {
        let v = mesh.volume().map_err(|e| e.to_string())?;
        for s in [0.1, 2.0, 44.35] {
            let scaled = mesh.scale_uniform(s).and_then(|m| m.volume()).map_err(|e| e.to_string())?;
            worst = worst.max(rel(scaled, s * s * s * v));
        }
    }
    check(
        (cube - 1.0).abs() <= 1e-12 && rel(sphere, 4.0 * PI / 3.0) <= 2e-2 && worst <= 1e-9,
        format!("cube {cube}, icosphere {:.3}% below 4pi/3, worst scaling error {worst:.1e}", 100.0 * rel(sphere, 4.0 * PI / 3.0)),
    )
}

fn mode_divergence() -> Outcome {
    let paper = joules_per_lamb(ComputationMode::PaperFaithful, &paper_sheep()).map_err(|e| e.to_string())?;
    let physical = joules_per_lamb(ComputationMode::Physical, &SheepParams::for_mode(ComputationMode::Physical))
        .map_err(|e| e.to_string())?;
    let ratio = physical / paper;
    let report = run_backward(&PipelineConfig::default()).map_err(|e| e.to_string())?;
    let verdict = |m| report.for_mode(m).map(|a| a.verdict.feasible);
    let (p, f) = (verdict(ComputationMode::PaperFaithful), verdict(ComputationMode::Physical));
    check(
        rel(ratio, 274.0) <= 2e-2 && p.is_some() && f.is_some() && p != f,
        format!("per-lamb ratio {ratio:.2}, feasible paper_faithful={p:?} physical={f:?}"),
    )
}

fn invariant_suites() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 256, failure_persistence: None, ..Config::default() });
    let mut passed = Vec::new();
    let mut run = |name: &str, result: Result<(), String>| {
        result.map_err(|e| format!("{name}: {e}"))?;
        passed.push(name.to_string());
        Ok::<(), String>(())
    };

    run(
        "allometric scaling",
        runner.run(&(1e-3f64..1e7), |m| {
            let ratio = basal_rate(10.0 * m).unwrap() / basal_rate(m).unwrap();
            prop_assert!(rel(ratio, 10f64.powf(0.744)) < 1e-9);
            Ok(())
        })
        .map_err(|e| e.to_string()),
    )?;
    run(
        "ledger additivity",
        runner.run(&(1.0f64..1e7, 0f64..=1.0, 0f64..1e3, 0f64..1e11, 1.0f64..3.0), |(mass, p, n, other, k)| {
            for mode in ComputationMode::ALL {
                let inputs = LedgerInputs { mass, p_flight: p, n_sheep: n, e_other: other, k, mode };
                let l = build_ledger(&inputs, &FireParams::default(), &SheepParams::for_mode(mode)).unwrap();
                prop_assert_eq!(l.e_expenditure.value(), l.e_flying.value() + l.e_fire.value() + l.e_other.value());
            }
            Ok(())
        })
        .map_err(|e| e.to_string()),
    )?;
    run(
        "ecology linearity",
        runner.run(&(1.0f64..1e9, 0.01f64..100.0), |(d, c)| {
            let p = paper_sheep();
            let (s1, _) = sheep_per_day(d, &p).unwrap();
            let (s2, _) = sheep_per_day(c * d, &p).unwrap();
            prop_assert!(rel(s2, c * s1) < 1e-12);
            prop_assert!(rel(land_required(s2, &p).unwrap(), c * land_required(s1, &p).unwrap()) < 1e-12);
            prop_assert!(rel(feed_chain(s2, &p).unwrap(), c * feed_chain(s1, &p).unwrap()) < 1e-12);
            for mode in ComputationMode::ALL {
                let s = SheepParams::for_mode(mode);
                prop_assert!(rel(intake_energy(c * s1, mode, &s).unwrap(), c * intake_energy(s1, mode, &s).unwrap()) < 1e-12);
            }
            prop_assert!(rel(fire_energy(c * s1, &FireParams::default()).unwrap(), c * fire_energy(s1, &FireParams::default()).unwrap()) < 1e-12);
            Ok(())
        })
        .map_err(|e| e.to_string()),
    )?;
    run(
        "jacobian vs finite difference",
        runner.run(&(1.0f64..100.0, 1.0f64..1e3, 0.1f64..2.0, 0.0f64..10.0), |(a, off, b, t)| {
            let m = GrowthModel::new(a, off, b).unwrap();
            let g = m.gradient(t);
            let p = m.params();
            for i in 0..3 {
                let h = 1e-6 * p[i];
                let (mut up, mut down) = (p, p);
                up[i] += h;
                down[i] -= h;
                let f = |q: [f64; 3]| GrowthModel::new(q[0], q[1], q[2]).unwrap().eval(t);
                let fd = (f(up) - f(down)) / (2.0 * h);
                prop_assert!((fd - g[i]).abs() <= 1e-6 * (1.0 + g[i].abs()), "param {} fd {} analytic {}", i, fd, g[i]);
            }
            Ok(())
        })
        .map_err(|e| e.to_string()),
    )?;
    Ok(format!("{} suites x 256 cases: {}", passed.len(), passed.join(", ")))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("metabolic reproduction", metabolic_reproduction),
        ("forward sheep count", forward_sheep_count),
        ("backward flight energy", backward_flight_energy),
        ("fire energy", fire_energy_values),
        ("komodo anchor", komodo_anchor),
        ("backward footprint, paper-faithful", backward_footprint),
        ("land rule", land_rule),
        ("growth fit vs grid oracle", growth_fit),
        ("mesh volume", mesh_volume),
        ("mode divergence", mode_divergence),
        ("invariant suites", invariant_suites),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
