use gpisgrasp::io::{load_mesh, obj_string, parse_obj, parse_xyz, write_obj, xyz_string, FormatError};
use gpisgrasp::core::mesh::TriMesh;
use gpisgrasp::core::Vec3;
use proptest::prelude::*;

const CUBE: &str = "\
# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
";

fn flip(text: &str) -> String {
    text.lines()
        .map(|l| {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.first() == Some(&"f") {
                format!("f {} {} {}", t[1], t[3], t[2])
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn unit_cube_loads_with_unit_volume() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cube.obj");
    std::fs::write(&p, CUBE).unwrap();
    let m = load_mesh(&p).unwrap();
    assert_eq!(m.vertices.len(), 8);
    assert_eq!(m.triangles.len(), 12);
    assert!((m.signed_volume() - 1.0).abs() < 1e-9);
}

#[test]
fn inward_cube_is_flipped() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cube.obj");
    std::fs::write(&p, flip(CUBE)).unwrap();
    assert!(parse_obj(&flip(CUBE), "x").unwrap().signed_volume() < 0.0);
    let m = load_mesh(&p).unwrap();
    assert!((m.signed_volume() - 1.0).abs() < 1e-9);
}

#[test]
fn open_mesh_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("open.obj");
    let open: String = CUBE.lines().take(CUBE.lines().count() - 1).collect::<Vec<_>>().join("\n");
    std::fs::write(&p, open).unwrap();
    assert!(matches!(load_mesh(&p), Err(FormatError::Mesh { .. })));
}

#[test]
fn quads_slashes_and_negative_indices() {
    let m = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1/1 2/2/2 3/3/3 4/4/4\nf -4 -2 -1\n", "q").unwrap();
    assert_eq!(m.triangles, vec![[0, 1, 2], [0, 2, 3], [0, 2, 3]]);
}

#[test]
fn syntax_errors_name_the_line() {
    match parse_obj("v 0 0 0\nv 1 zero 0\n", "bad.obj") {
        Err(FormatError::Syntax { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    match parse_obj("v 0 0 0\nf 1 2 3\n", "bad.obj") {
        Err(FormatError::Syntax { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    match parse_xyz("1 2 3\n\n# c\n1 2\n", "c.xyz") {
        Err(FormatError::Syntax { line, .. }) => assert_eq!(line, 4),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn written_obj_reloads_identically() {
    let cube = TriMesh::cuboid(Vec3::new(1.0, 2.0, 3.0));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.obj");
    write_obj(&p, &cube).unwrap();
    let back = load_mesh(&p).unwrap();
    assert_eq!(back.vertices, cube.vertices);
    assert_eq!(back.triangles, cube.triangles);
    assert_eq!(obj_string(&back), obj_string(&cube));
}

proptest! {
    #[test]
    fn xyz_round_trip_is_exact(pts in prop::collection::vec(prop::array::uniform3(-1e9..1e9f64), 0..50)) {
        let pts: Vec<Vec3> = pts.iter().map(|a| Vec3::new(a[0], a[1], a[2])).collect();
        prop_assert_eq!(parse_xyz(&xyz_string(&pts), "p").unwrap(), pts);
    }
}
