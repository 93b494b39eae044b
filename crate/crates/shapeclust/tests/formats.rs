//! Round trips through every on-disk format.

use std::fs;

use shapeclust::formats::{self, Dataset};
use shapeclust_core::curve::simulate_shape_classes;
use shapeclust_core::{Curve, CurveSet, GramMatrix, GramMode, PointSet, ShapeClass, ShapeSimOptions, Template};

fn shapes() -> CurveSet {
    let classes = [
        ShapeClass {
            template: Template::Circle,
            noise: 0.1,
        },
        ShapeClass {
            template: Template::Rose { petals: 3 },
            noise: 0.1,
        },
    ];
    simulate_shape_classes(
        &classes,
        2,
        &ShapeSimOptions {
            samples: 20,
            nuisance: true,
        },
        3,
    )
    .unwrap()
}

#[test]
fn curve_set_json_round_trip() {
    let set = shapes();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    formats::write_dataset(&Dataset::Curves(set.clone()), &p, Some(3)).unwrap();
    match formats::read_dataset(&p).unwrap() {
        Dataset::Curves(back) => assert_eq!(back, set),
        Dataset::Points(_) => panic!("read back as points"),
    }
}

#[test]
fn curve_directory_round_trip() {
    let set = shapes();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("curves");
    formats::write_curve_dir(&set, &p).unwrap();
    assert!(p.join("manifest.csv").exists());
    assert_eq!(formats::read_curve_dir(&p).unwrap(), set);
    assert!(matches!(formats::read_dataset(&p).unwrap(), Dataset::Curves(_)));
}

#[test]
fn curve_directory_with_headers_and_no_labels() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("manifest.csv"),
        "file,closed,label\na.csv,false,\nb.csv,true,\n",
    )
    .unwrap();
    fs::write(dir.path().join("a.csv"), "x,y\n0,0\n1,0\n2,1\n").unwrap();
    fs::write(dir.path().join("b.csv"), "# square\n0,0\n1,0\n1,1\n0,1\n").unwrap();
    let set = formats::read_curve_dir(dir.path()).unwrap();
    assert_eq!(set.len(), 2);
    assert_eq!(set.truth_labels(), None);
    assert!(!set.curves()[0].is_closed());
    assert!(set.curves()[1].is_closed());
    assert_eq!(set.curves()[1].id(), "b");

    fs::write(dir.path().join("manifest.csv"), "a.csv,false,0\nb.csv,true,\n").unwrap();
    assert!(formats::read_curve_dir(dir.path()).is_err());
}

#[test]
fn point_set_round_trip() {
    let set = PointSet::new(2, vec![0.5, -1.0, 1.0 / 3.0, 2.0, 7.0, 1e-300], Some(vec![0, 0, 1])).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("pts.json");
    formats::write_dataset(&Dataset::Points(set.clone()), &p, None).unwrap();
    match formats::read_dataset(&p).unwrap() {
        Dataset::Points(back) => assert_eq!(back, set),
        Dataset::Curves(_) => panic!("read back as curves"),
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = [
        (
            "a.json",
            r#"{"p":2,"curves":[{"id":"x","closed":false,"points":[[0,0],[1]]}]}"#,
        ),
        ("b.json", r#"{"p":2,"points":[[0,0],[1,1,1]]}"#),
        ("c.json", r#"{"something":1}"#),
        ("d.json", "not json"),
    ];
    for (name, body) in bad {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        assert!(formats::read_dataset(&p).is_err(), "{name}");
    }
    let g = dir.path().join("g.csv");
    fs::write(&g, "1,0\n0\n").unwrap();
    assert!(formats::read_gram(&g).is_err());
    fs::write(&g, "1,2\n3,1\n").unwrap();
    assert!(formats::read_gram(&g).is_err(), "asymmetric");
}

#[test]
fn gram_without_sidecar_gets_default_ids() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.csv");
    fs::write(&g, "1,0.5\n0.5,1\n").unwrap();
    let m = formats::read_gram(&g).unwrap();
    assert_eq!(m.ids(), ["0", "1"]);
    assert_eq!(m.get(0, 1), 0.5);
}

#[test]
fn gram_with_awkward_values_reloads_exactly() {
    let n = 4;
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = if i == j {
                1.0
            } else {
                ((i + 1) * (j + 1)) as f64 / 7.0 * std::f64::consts::PI * 1e-5
            };
            e[i * n + j] = v;
        }
    }
    let g = GramMatrix::new(n, e, GramMode::Euclidean, (0..n).map(|i| format!("p{i}")).collect()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.csv");
    formats::write_gram(&g, &p, Default::default()).unwrap();
    assert_eq!(formats::read_gram(&p).unwrap(), g);
}

#[test]
fn open_and_closed_curves_keep_their_flag() {
    let open = Curve::open("o", 2, vec![0.0, 0.0, 1.0, 0.0, 2.0, 1.0]).unwrap();
    let closed = Curve::closed("c", 2, vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0]).unwrap();
    let set = CurveSet::new(vec![open, closed], Some(vec![0, 1])).unwrap();
    let json = formats::curves_to_json(&set, None);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    fs::write(&p, json).unwrap();
    let Dataset::Curves(back) = formats::read_dataset(&p).unwrap() else {
        panic!()
    };
    assert_eq!(back, set);
}
