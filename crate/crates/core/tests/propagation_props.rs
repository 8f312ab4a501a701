mod common;

use indoor_planner::geometry::{FloorPlan, Point2D, Rect};
use indoor_planner::optimizers::{optimize_loop, PlanningTask, Scorer, ScriptedProposer};
use indoor_planner::propagation::{coverage_fraction, pathloss, Evaluator, RadioConfig};
use proptest::prelude::*;

fn closed_form(tx: Point2D, rx: Point2D, c: &RadioConfig) -> f64 {
    let d = ((tx.x - rx.x).powi(2) + (tx.y - rx.y).powi(2)).sqrt();
    c.reference_pathloss + 10.0 * c.pathloss_exponent * (d.max(c.reference_distance) / c.reference_distance).log10()
}

fn radio() -> impl Strategy<Value = RadioConfig> {
    (20.0..60.0f64, 0.5..2.0f64, 1.5..4.5f64).prop_map(|(pl0, d0, n)| RadioConfig {
        frequency_mhz: 2400.0,
        reference_pathloss: pl0,
        reference_distance: d0,
        pathloss_exponent: n,
    })
}

fn point_in(w: f64, h: f64) -> impl Strategy<Value = Point2D> {
    (0.05..w - 0.05, 0.05..h - 0.05).prop_map(|(x, y)| Point2D::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn no_walls_is_closed_form(tx in point_in(50.0, 30.0), rx in point_in(50.0, 30.0), c in radio()) {
        let plan = common::empty_room(50.0, 30.0);
        let got = pathloss(tx, rx, &plan, &c);
        prop_assert!((got - closed_form(tx, rx, &c)).abs() < 1e-9);
    }

    #[test]
    fn each_wall_adds_its_attenuation(
        losses in prop::collection::vec(0.5..30.0f64, 0..6),
        ty in 0.5..9.5f64,
        ry in 0.5..9.5f64,
    ) {
        let mut plan = FloorPlan::new(Rect::new(Point2D::new(0.0, 0.0), 20.0, 10.0));
        for (i, a) in losses.iter().enumerate() {
            let name = format!("m{i}");
            plan.add_material(&name, *a);
            let x = 2.0 + 2.0 * i as f64;
            plan.add_wall(Point2D::new(x, 0.0), Point2D::new(x, 10.0), &name, 0.1);
        }
        let c = RadioConfig::default();
        let (tx, rx) = (Point2D::new(1.0, ty), Point2D::new(19.0, ry));
        let expected = closed_form(tx, rx, &c) + losses.iter().sum::<f64>();
        prop_assert!((pathloss(tx, rx, &plan, &c) - expected).abs() < 1e-9);
    }

    #[test]
    fn coverage_monotone_in_threshold(ap in point_in(10.0, 10.0), t1 in 40.0..90.0f64, dt in 0.0..30.0f64) {
        let plan = common::split_room();
        let Ok(grid) = Evaluator::new(&plan, RadioConfig::default(), 0.5).unwrap().grid(&[ap]) else {
            return Ok(());
        };
        let lo = coverage_fraction(&grid, t1).coverage_fraction;
        let hi = coverage_fraction(&grid, t1 + dt).coverage_fraction;
        prop_assert!(lo <= hi);
    }

    #[test]
    fn coverage_monotone_in_ap_count(
        aps in prop::collection::vec(point_in(10.0, 10.0), 1..4),
        extra in point_in(10.0, 10.0),
        t in 45.0..75.0f64,
    ) {
        let plan = common::split_room();
        let ev = Evaluator::new(&plan, RadioConfig::default(), 0.5).unwrap();
        let mut more = aps.clone();
        more.push(extra);
        let (Ok(a), Ok(b)) = (ev.grid(&aps), ev.grid(&more)) else {
            return Ok(());
        };
        prop_assert!(coverage_fraction(&a, t).coverage_fraction <= coverage_fraction(&b, t).coverage_fraction);
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!(y <= x);
        }
    }

    #[test]
    fn walls_never_lower_pathloss(
        ap in point_in(10.0, 10.0),
        a in point_in(10.0, 10.0),
        b in point_in(10.0, 10.0),
        loss in 0.5..25.0f64,
    ) {
        let before = common::empty_room(10.0, 10.0);
        let mut after = before.clone();
        after.add_material("extra", loss);
        after.add_wall(a, b, "extra", 0.1);
        let c = RadioConfig::default();
        let (Ok(g0), Ok(g1)) = (
            Evaluator::new(&before, c, 0.5).unwrap().grid(&[ap]),
            Evaluator::new(&after, c, 0.5).unwrap().grid(&[ap]),
        ) else {
            return Ok(());
        };
        for (x, y) in g0.values.iter().zip(&g1.values) {
            prop_assert!(y >= x);
        }
    }

    #[test]
    fn trace_best_coverage_never_drops(script in prop::collection::vec(prop::collection::vec(point_in(10.0, 10.0), 1..3), 1..8)) {
        let mut task = PlanningTask::new(common::split_room(), 1.0, 55.0, 2, script.len());
        task.cell_size = 0.5;
        let scorer = Scorer::new(&task).unwrap();
        let trace = optimize_loop(&task, &mut ScriptedProposer::new(script).unwrap(), &scorer).unwrap();
        let seq = trace.best_coverage_sequence();
        prop_assert!(seq.windows(2).all(|w| w[0] <= w[1]));
        for (r, s) in trace.records().iter().zip(&seq) {
            prop_assert_eq!(r.best_coverage, *s);
        }
        let best = trace.best_step().map_or(0.0, |s| s.feedback.coverage());
        prop_assert_eq!(best, *seq.last().unwrap());
    }
}
