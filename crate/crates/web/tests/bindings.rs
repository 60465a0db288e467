use idle_otto::{cycle, EngineParams, RegimeLabel};
use idle_otto_web::{efficiency_distribution_json, observables_json, tur_curve_json, work_map_json, MAX_MAP_POINTS};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn work_map_matches_library() {
    let v = parse(&work_map_json(2.0, 3.0, 4.0, 0.5, 10.0, 5).unwrap());
    let w = v["mean_w"].as_array().unwrap();
    let r = v["regime"].as_array().unwrap();
    assert_eq!(w.len(), 25);
    assert_eq!(r.len(), 25);
    // Row-major over (Tc, Th): index 1 is Tc = 0.5, Th = 2.875.
    let p = EngineParams::new(2.0, 3.0, 4.0, 0.5, 2.875).unwrap();
    assert_eq!(w[1].as_f64().unwrap(), cycle::mean_work(&p).total);
    let names = v["regime_names"].as_array().unwrap();
    for label in RegimeLabel::ALL {
        assert_eq!(names[label.code() as usize], label.name());
    }
}

#[test]
fn work_map_rejects_bad_input() {
    assert!(work_map_json(2.0, 3.0, 4.0, 0.5, 10.0, MAX_MAP_POINTS + 1).is_err());
    assert!(work_map_json(2.0, 3.0, 4.0, -1.0, 10.0, 5).unwrap_err().contains("Tc"));
    assert!(work_map_json(2.0, 3.0, 3.0, 0.5, 10.0, 5).is_err());
}

#[test]
fn efficiency_distribution_is_normalized() {
    let v = parse(&efficiency_distribution_json(1.5, 3.0, 4.0, 5.0, 20.0).unwrap());
    let probs = v["eta_scaled"]["probability"].as_array().unwrap();
    let total: f64 = probs.iter().map(|p| p.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-14);
    let values = v["eta_scaled"]["value"].as_array().unwrap();
    let mean: f64 = values
        .iter()
        .zip(probs)
        .map(|(x, p)| x.as_f64().unwrap() * p.as_f64().unwrap())
        .sum();
    assert!((mean - v["eta_th"].as_f64().unwrap()).abs() < 1e-12);
    assert_eq!(v["regime"], "engine");
}

#[test]
fn efficiency_distribution_reports_undefined() {
    let e = efficiency_distribution_json(0.0, 3.0, 4.0, 3.0, 4.0).unwrap_err();
    assert!(e.contains("undefined"), "{e}");
}

#[test]
fn tur_curve_stays_above_bound() {
    let v = parse(&tur_curve_json(2.0, 3.0, 4.0, 20.0, 0.01, 19.0, 100).unwrap());
    let obs = v["observed"].as_array().unwrap();
    let bound = v["bound"].as_array().unwrap();
    assert_eq!(obs.len(), 100);
    for (o, b) in obs.iter().zip(bound) {
        if let (Some(o), Some(b)) = (o.as_f64(), b.as_f64()) {
            assert!(o >= b);
        }
    }
    assert!(tur_curve_json(2.0, 3.0, 4.0, 20.0, 0.0, 19.0, 100).is_err());
}

#[test]
fn observables_round_trip() {
    let v = parse(&observables_json(2.0, 3.0, 4.0, 1.0, 5.0).unwrap());
    let p = EngineParams::new(2.0, 3.0, 4.0, 1.0, 5.0).unwrap();
    assert_eq!(v["mean_w"].as_f64().unwrap(), cycle::observables(&p).mean_w);
    assert_eq!(v["regime"], "Engine");
}
