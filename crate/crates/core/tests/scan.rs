use proptest::prelude::*;

use rydberg_eit::error::Error;
use rydberg_eit::scan::*;

#[test]
fn grids() {
    assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
    assert_eq!(parse_grid("2.5").unwrap(), vec![2.5]);
    assert_eq!(parse_grid("1:9:1").unwrap(), vec![1.0]);
    assert_eq!(parse_grid("1, -2,3e-1").unwrap(), vec![1.0, -2.0, 0.3]);
    for bad in ["", "a", "0:1", "0:1:x", "0:1:0", "1,,2", "inf"] {
        assert!(matches!(parse_grid(bad), Err(Error::Config(_))), "{bad}");
    }
}

proptest! {
    #[test]
    fn linear_grid_endpoints(a in -10.0f64..10.0, b in -10.0f64..10.0, n in 2usize..50) {
        let g = parse_grid(&format!("{a}:{b}:{n}")).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert_eq!(g[0], a);
        prop_assert!((g[n - 1] - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }
}

#[test]
fn config_json() {
    let c = ScanConfig { state: Some(56), omega_p2: "0:1:5".into(), delta3_grid: Some("-1,1".into()), ..Default::default() };
    assert_eq!(ScanConfig::from_json(&c.to_json()).unwrap(), c);
    let d = ScanConfig::from_json(r#"{"omega-c": 2.0, "max-steps": 7}"#).unwrap();
    assert_eq!((d.omega_c, d.max_steps), (Some(2.0), 7));
    assert!(matches!(ScanConfig::from_json(r#"{"omega_c": 2.0}"#), Err(Error::Config(_))));
    assert!(matches!(ScanConfig::from_json(r#"{"route": "fast"}"#).unwrap().points(), Err(Error::Config(_))));
    assert!(ScanConfig { state: Some(47), ..Default::default() }.points().is_err());
    assert!(ScanConfig { omega_p2: "-1".into(), ..Default::default() }.points().is_err());
    assert!(ScanConfig { tol: 0.0, ..Default::default() }.points().is_err());
}

#[test]
fn point_order() {
    let c = ScanConfig {
        states: Some(vec![61, 46]),
        omega_p2: "1,0".into(),
        delta3_grid: Some("1,-1".into()),
        ..Default::default()
    };
    let keys: Vec<_> = c.points().unwrap().iter().map(|p| (p.state.unwrap(), p.atom.delta3, p.atom.intensity())).collect();
    assert_eq!(keys.len(), 8);
    assert_eq!(keys[0], (46, -1.0, 0.0));
    assert_eq!(keys[1], (46, -1.0, 1.0));
    assert_eq!(keys[2].1, 1.0);
    assert_eq!(keys[7], (61, 1.0, 1.0));
}

#[test]
fn csv_layout_and_determinism() {
    let c = ScanConfig { state: Some(50), omega_p2: "0:2:5".into(), delta3_grid: Some("0.2,1".into()), ..Default::default() };
    let one = run_scan(&ScanConfig { threads: Some(1), ..c.clone() }).unwrap();
    let four = run_scan(&ScanConfig { threads: Some(4), ..c.clone() }).unwrap();
    let csv = rows_to_csv(&c, &one);
    assert_eq!(csv, rows_to_csv(&c, &four));
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# config: "));
    assert_eq!(lines[1], COLUMNS.join(","));
    assert_eq!(lines.len(), 2 + 10);
    for l in &lines[2..] {
        assert_eq!(l.split(',').count(), 36);
        assert!(l.ends_with(",ok"), "{l}");
    }
    assert_eq!(config_from_csv(&csv).unwrap(), c);
    assert!(config_from_csv("a,b\n1,2\n").is_err());
}

#[test]
fn number_format() {
    assert_eq!(fmt_num(-0.0), fmt_num(0.0));
    assert_eq!(fmt_num(1.0), "1.00000000000e0");
    assert_eq!(fmt_num(-1234.5), "-1.23450000000e3");
    assert_eq!(fmt_num(f64::NAN), "NaN");
}

#[test]
fn failed_points_are_flagged_rows() {
    let c = ScanConfig { state: Some(61), omega_p2: "0.2,8".into(), max_steps: 1, ..Default::default() };
    let rows = run_scan(&c).unwrap();
    assert_eq!(rows.len(), 2);
    let bad = rows.iter().find(|r| r.flagged()).expect("a flagged row");
    assert!(bad.status.starts_with("flagged"));
    assert!(bad.s.is_nan() && bad.v13.re.is_nan());
    let csv = rows_to_csv(&c, &rows);
    assert!(csv.lines().last().unwrap().contains("NaN"));
}

#[test]
fn figure_configs() {
    for (f, n) in [(Figure::Fig2, 4 * 26), (Figure::Fig3, 81), (Figure::Fig4, 3 * 26)] {
        let pts = f.config().points().unwrap();
        assert_eq!(pts.len(), n, "{}", f.name());
        assert_eq!(f.name().parse::<Figure>().unwrap(), f);
    }
    assert!("fig5".parse::<Figure>().is_err());
}

#[test]
fn slope_and_truncation() {
    let s = rydberg_eit::params::StatePreset::lookup(50).unwrap();
    let slope = third_order_slope(&s.atom(), &s.interaction()).unwrap();
    assert!((slope + 5.1764).abs() < 1e-3, "{slope}");
    let (full, trunc) = truncated_chi(&s.atom().with_intensity(1e-3)).unwrap();
    assert!((full - trunc).norm() < 1e-4 * full.norm());
}
