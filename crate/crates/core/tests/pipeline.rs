use direx::copulas::{copula_cdf, copula_sample, sklar_transform, CopulaModel, JointModel};
use direx::detector::{detect, DetectionConfig, Label, Mode};
use direx::directions::classical_directions;
use direx::io::{load_csv, save_csv};
use direx::margins::std_normal_quantile;
use direx::random::{open_unit, seeded};
use direx::sample::Sample;
use direx::stats::{kendall_tau, ks_critical_1pct, ks_statistic};

/// Empirical copula of a sample against the model on a 20 x 20 grid.
#[test]
fn empirical_copula_matches_model() {
    for c in [
        CopulaModel::gumbel(3.1378).unwrap(),
        CopulaModel::frank(-8.0).unwrap(),
        CopulaModel::gaussian(0.6).unwrap(),
    ] {
        let pts = copula_sample(&c, 50_000, 8).unwrap();
        let mut sup = 0.0f64;
        for i in 1..20 {
            for j in 1..20 {
                let (a, b) = (i as f64 / 20.0, j as f64 / 20.0);
                let emp =
                    pts.iter().filter(|p| p[0] <= a && p[1] <= b).count() as f64 / pts.len() as f64;
                sup = sup.max((emp - copula_cdf(&c, a, b).unwrap()).abs());
            }
        }
        assert!(sup <= 0.01, "{c:?}: sup {sup}");
    }
}

#[test]
fn flood_model_margins_and_dependence() {
    let j = JointModel::flood_default();
    let s = j.sample(5000, 21).unwrap();
    for (k, m) in j.marginals.iter().enumerate() {
        let col: Vec<f64> = s.column(k).collect();
        let d = ks_statistic(&col, |x| m.cdf(x));
        assert!(d < ks_critical_1pct(col.len()), "column {k}: KS {d}");
    }
    let q: Vec<f64> = s.column(0).collect();
    let v: Vec<f64> = s.column(1).collect();
    let l: Vec<f64> = s.column(2).collect();
    assert!((kendall_tau(&q, &v) - 0.6813).abs() < 0.02);
    assert!(kendall_tau(&q, &l).abs() < 0.04);
}

#[test]
fn sklar_transform_of_uniforms_has_model_margins() {
    let j = JointModel::flood_default();
    let mut rng = seeded(4);
    let u: Vec<[f64; 3]> = (0..4000)
        .map(|_| {
            [
                open_unit(&mut rng),
                open_unit(&mut rng),
                open_unit(&mut rng),
            ]
        })
        .collect();
    let s = sklar_transform(&j, &u).unwrap();
    for (k, m) in j.marginals.iter().enumerate() {
        let col: Vec<f64> = s.column(k).collect();
        assert!(ks_statistic(&col, |x| m.cdf(x)) < ks_critical_1pct(col.len()));
    }
}

/// Five correlated Gaussian columns, 415 rows, every sign-pattern direction.
#[test]
fn five_dimensional_detection() {
    let mut rng = seeded(415);
    let mut data = Vec::new();
    for _ in 0..415 {
        let common = std_normal_quantile(open_unit(&mut rng));
        for k in 0..5 {
            let own = std_normal_quantile(open_unit(&mut rng));
            data.push(10.0 * k as f64 + common + 0.7 * own);
        }
    }
    let s = Sample::from_flat(data, 5).unwrap();
    let catalog = classical_directions(5).unwrap();
    assert_eq!(catalog.len(), 32);
    for nd in catalog.entries() {
        let mut prev = 0;
        for alpha in [0.02, 0.05, 0.1, 0.2] {
            for mode in [Mode::Survival, Mode::Distribution] {
                let det = detect(
                    &s,
                    &DetectionConfig::new(alpha, nd.direction.clone()).with_mode(mode),
                )
                .unwrap();
                assert_eq!(det.labels.len(), 415);
                if mode == Mode::Survival {
                    let upper = det.count(Label::Upper);
                    assert!(upper >= prev, "{}: upper set shrank as alpha grew", nd.name);
                    prev = upper;
                }
            }
        }
    }
}

#[test]
fn csv_file_roundtrip_keeps_names_and_bits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let s = JointModel::flood_default().sample(100, 2).unwrap();
    save_csv(&s, &path).unwrap();
    let back = load_csv(&path).unwrap();
    assert_eq!(back.column_names(), s.column_names());
    assert!(back
        .as_flat()
        .iter()
        .zip(s.as_flat())
        .all(|(a, b)| a.to_bits() == b.to_bits()));
}
