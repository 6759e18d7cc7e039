use huffguard::synth::{FrameSource, SyntheticSpec};

#[test]
fn stationary_cluster_means_match_within_three_sigma() {
    let spec = SyntheticSpec {
        frames: 5000,
        ..SyntheticSpec::default()
    };
    let stream = spec.generate().unwrap();
    for (k, cluster) in spec.clusters.iter().enumerate() {
        let members: Vec<&Vec<f64>> = stream
            .rows
            .iter()
            .zip(&stream.sources)
            .filter(|(_, s)| **s == FrameSource::Background(k))
            .map(|(r, _)| &r.values)
            .collect();
        let n = members.len() as f64;
        assert!(n > 500.0);
        for d in 0..spec.dim {
            let mean = members.iter().map(|v| v[d]).sum::<f64>() / n;
            assert!(
                (mean - cluster.mean[d]).abs() <= 3.0 * cluster.spread / n.sqrt(),
                "cluster {k} dim {d}"
            );
        }
    }
}

#[test]
fn drift_moves_the_means() {
    let spec = SyntheticSpec {
        frames: 2000,
        drift_rate: 1e-3,
        anomaly_fraction: 0.0,
        ..SyntheticSpec::default()
    };
    let stream = spec.generate().unwrap();
    let k0 = |range: std::ops::Range<usize>| -> Vec<f64> {
        let rows: Vec<_> = range
            .filter(|&t| stream.sources[t] == FrameSource::Background(0))
            .map(|t| &stream.rows[t].values)
            .collect();
        (0..spec.dim)
            .map(|d| rows.iter().map(|v| v[d]).sum::<f64>() / rows.len() as f64)
            .collect()
    };
    let (early, late) = (k0(0..300), k0(1700..2000));
    let shift: f64 = early
        .iter()
        .zip(&late)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!((shift - 1.7).abs() < 0.2, "{shift}");
}
