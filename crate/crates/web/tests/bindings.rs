use slfvs_web::{dual_genealogy_json, lr_pair_json, pu_curve_json};

#[test]
fn genealogy_has_nodes_and_summary() {
    let out = dual_genealogy_json(100, 1.0, 1.0, 0.5, "0, 0.3", 3).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["summary"]["start_points"].as_array().unwrap().len(), 2);
    assert!(v["genealogy"]["nodes"].as_array().unwrap().len() >= 2);
}

#[test]
fn genealogy_rejects_bad_points() {
    assert!(dual_genealogy_json(100, 1.0, 1.0, 0.5, "0,x", 3).is_err());
    assert!(dual_genealogy_json(100, 1.0, 1.0, 0.5, "", 3).is_err());
}

#[test]
fn pu_curve_has_one_point_per_impact() {
    let out = pu_curve_json(50, 1.0, 4, 5, 0.2, 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 4);
    assert_eq!(pts[3]["upsilon"], 1.0);
}

#[test]
fn lr_pair_grid_and_order() {
    let out = lr_pair_json(2.0 / 3.0, 4.0 / 3.0, 0.0, 0.0, 0.5, 0.002, 9).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let (t, l, r) = (v["t"].as_array().unwrap(), v["l"].as_array().unwrap(), v["r"].as_array().unwrap());
    assert_eq!(t.len(), 251);
    assert_eq!(l.len(), t.len());
    for (a, b) in l.iter().zip(r) {
        assert!(a.as_f64().unwrap() <= b.as_f64().unwrap() + 1e-12);
    }
    assert!(lr_pair_json(0.5, -1.0, 0.0, 0.0, 0.5, 0.01, 9).is_err());
}
