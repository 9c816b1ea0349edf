use arnoldi_agg::markov::uniformise;
use arnoldi_agg::models::catalog::{
    gene_expression_initial, gene_expression_network, lotka_volterra_network,
};
use arnoldi_agg::models::{builtin, enumerate_state_space, MatrixKind, ModelMatrix};

fn generator_rows_vanish(m: &arnoldi_agg::models::Model) {
    let ModelMatrix::Generator(q) = &m.matrix else {
        panic!("expected a generator")
    };
    for i in 0..q.n() {
        assert!(
            q.row_sum(i).abs() <= 1e-9,
            "row {i} sums to {}",
            q.row_sum(i)
        );
        let (cols, vals) = q.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if j != i {
                assert!(v >= 0.0);
            }
        }
    }
    let (p, _) = m.stochastic(None).unwrap();
    for i in 0..p.n() {
        assert!((p.row_sum(i) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn lotka_volterra_catalog_entry() {
    let m = builtin("lotka-volterra", None).unwrap();
    assert_eq!(m.state_count(), 10_201);
    let rate = m.descriptor.uniformisation_rate.unwrap();
    assert_eq!(rate.round(), 2078.0);
    generator_rows_vanish(&m);
}

#[test]
fn workstation_cluster_catalog_entry() {
    let m = builtin("workstation-cluster", None).unwrap();
    assert_eq!(m.state_count(), 15_540);
    let rate = m.descriptor.uniformisation_rate.unwrap();
    assert_eq!((rate * 100.0).round() / 100.0, 50.08);
    generator_rows_vanish(&m);
}

#[test]
fn gene_expression_generator_is_valid() {
    let m = builtin("gene-expression:2", None).unwrap();
    generator_rows_vanish(&m);
    let net = gene_expression_network(2).unwrap();
    let space = enumerate_state_space(&net, &gene_expression_initial(2)).unwrap();
    assert_eq!(space.len(), m.state_count());
}

#[test]
fn enumeration_is_deterministic() {
    let net = lotka_volterra_network(15).unwrap();
    let a = enumerate_state_space(&net, &[1, 1]).unwrap();
    let b = enumerate_state_space(&net, &[1, 1]).unwrap();
    assert_eq!(a, b);
    for i in 0..a.len() {
        assert_eq!(a.index_of(a.state(i)), Some(i));
    }
}

#[test]
fn export_and_ingest_round_trip() {
    let m = builtin("lotka-volterra:8", None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    m.export(dir.path()).unwrap();
    let back = arnoldi_agg::models::ingest(
        "copy",
        &dir.path().join("model.mtx"),
        MatrixKind::Auto,
        m.descriptor.uniformisation_rate,
    )
    .unwrap();
    assert_eq!(back.descriptor.kind, MatrixKind::Generator);
    let (p1, _) = m.stochastic(None).unwrap();
    let (p2, _) = back.stochastic(None).unwrap();
    assert_eq!(p1, p2);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("model.json")).unwrap())
            .unwrap();
    assert_eq!(json["state_count"], m.state_count());
}

#[test]
fn rsvp_ingest_uses_the_published_rate_for_generators() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.mtx");
    std::fs::write(
        &path,
        "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 -3\n1 2 3\n2 1 20\n2 2 -20\n",
    )
    .unwrap();
    let r = builtin("rsvp-ingest", Some(&path)).unwrap();
    assert_eq!(r.descriptor.uniformisation_rate, Some(30.01));
    let ModelMatrix::Generator(q) = &r.matrix else {
        panic!()
    };
    let (_, lambda) = uniformise(q, Some(30.01)).unwrap();
    assert_eq!(lambda, 30.01);
}
