use slfvs_core::model::*;
use slfvs_core::ModelParams;
use slfvs_core::RadiusMeasure;
use slfvs_core::SimError;

fn params(n: u64, alpha: f64, mu: RadiusMeasure) -> ModelParams {
    ModelParams::new(n, alpha, 1.0, mu, 0).unwrap()
}

#[test]
fn zeta_for_unit_delta() {
    let c = params(1000, 1.0, RadiusMeasure::delta(1.0).unwrap()).limit_constants();
    assert!((c.zeta - 2.0 / 3.0).abs() < 1e-15);
    assert!((c.xi2_paper - 4.0 / 9.0).abs() < 1e-15);
    assert!((c.xi2_derived - 4.0 / 3.0).abs() < 1e-15);
}

#[test]
fn no_selection_no_drift() {
    let mu: RadiusMeasure = "atoms:(0.3,0.5),(2.0,1.5)".parse().unwrap();
    assert_eq!(params(50, 0.0, mu).limit_constants().zeta, 0.0);
}

#[test]
fn selection_probability_examples() {
    let d = RadiusMeasure::delta(1.0).unwrap();
    assert!((params(10000, 1.0, d.clone()).selection_probability() - 0.01).abs() < 1e-15);
    assert_eq!(params(100, 0.0, d.clone()).selection_probability(), 0.0);
    assert_eq!(params(4, 2.0, d.clone()).selection_probability(), 1.0);
    assert!(ModelParams::new(4, 2.5, 1.0, d, 0).is_err());
}

#[test]
fn per_point_rate_examples() {
    let d = RadiusMeasure::delta(1.0).unwrap();
    assert_eq!(params(1, 0.0, d.clone()).per_point_event_rate(), 2.0);
    assert_eq!(params(1000, 0.0, d).per_point_event_rate(), 2000.0);
    let mix: RadiusMeasure = "atoms:(0.5,1.0),(0.5,2.0)".parse().unwrap();
    assert_eq!(params(1, 0.0, mix).per_point_event_rate(), 3.0);
}

#[test]
fn homogeneity_in_weights() {
    let mu: RadiusMeasure = "atoms:(0.25,0.5),(0.75,1.25)".parse().unwrap();
    let p = params(400, 1.5, mu.clone());
    let c = p.limit_constants();
    for k in [0.5, 2.0, 8.0] {
        let q = params(400, 1.5, mu.scaled(k).unwrap());
        let ck = q.limit_constants();
        assert_eq!(ck.zeta, c.zeta * k);
        assert_eq!(ck.xi2_paper, c.xi2_paper * k);
        assert_eq!(ck.xi2_derived, c.xi2_derived * k);
        assert_eq!(q.selection_probability(), p.selection_probability());
    }
}

#[test]
fn rejects_bad_parameters() {
    let d = RadiusMeasure::delta(1.0).unwrap();
    assert!(ModelParams::new(0, 1.0, 1.0, d.clone(), 0).is_err());
    assert!(ModelParams::new(10, -1.0, 1.0, d.clone(), 0).is_err());
    assert!(ModelParams::new(10, 1.0, 0.0, d.clone(), 0).is_err());
    assert!(ModelParams::new(10, 1.0, 1.5, d, 0).is_err());
    assert!(RadiusMeasure::delta(0.0).is_err());
    assert!(RadiusMeasure::new(vec![]).is_err());
    assert!("atoms:(1.0,-2)".parse::<RadiusMeasure>().is_err());
    assert!("uniform:1".parse::<RadiusMeasure>().is_err());
}

#[test]
fn mu_syntax_round_trips() {
    for s in ["delta:1", "atoms:(0.5,1),(0.5,2)"] {
        let mu: RadiusMeasure = s.parse().unwrap();
        assert_eq!(mu.to_string().parse::<RadiusMeasure>().unwrap(), mu);
    }
    let mu: RadiusMeasure = "atoms:(0.5,1.0),(0.5,2.0)".parse().unwrap();
    assert_eq!(mu.moment(1), 1.5);
    assert_eq!(mu.max_radius(), 2.0);
}

#[test]
fn config_file_parsing() {
    let text =
        "# stage\nn = 100\nalpha=2\nmu = atoms:(0.5,1.0),(0.5,2.0)\n\nseed = 42 # trailing\n";
    let cfg = ConfigMap::parse(text).unwrap();
    let p = ModelParams::from_config(&cfg, &ModelParams::default()).unwrap();
    assert_eq!(p.n, 100);
    assert_eq!(p.alpha, 2.0);
    assert_eq!(p.upsilon, 1.0);
    assert_eq!(p.seed, 42);
    assert_eq!(p.mu.atoms().len(), 2);

    assert!(matches!(
        ConfigMap::parse("n 100"),
        Err(SimError::Config { line: 1, .. })
    ));
    assert!(ConfigMap::parse("n=1\nn=2").is_err());
    let cfg = ConfigMap::parse("n = many").unwrap();
    assert!(ModelParams::from_config(&cfg, &ModelParams::default()).is_err());
}
