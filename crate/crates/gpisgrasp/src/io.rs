//! Text file formats: ASCII OBJ meshes and `x y z` point clouds.

use std::fmt::Write as _;
use std::path::Path;

use gpisgrasp_core::mesh::TriMesh;
use gpisgrasp_core::Vec3;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: line {line}: {message}")]
    Syntax { path: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Mesh {
        path: String,
        #[source]
        source: gpisgrasp_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    std::fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_f64(tok: Option<&str>, what: &str) -> Result<f64, String> {
    let tok = tok.ok_or_else(|| format!("missing {what}"))?;
    let v: f64 = tok.parse().map_err(|_| format!("bad number {tok:?} for {what}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite {what}"))
    }
}

/// Parse OBJ text. Only `v` and `f` records matter; polygons are fanned into
/// triangles and `v/vt/vn` index forms and negative indices are accepted.
/// The result is raw: no watertightness or orientation check.
pub fn parse_obj(text: &str, origin: &str) -> Result<TriMesh, FormatError> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let syntax = |message: String| FormatError::Syntax {
            path: origin.into(),
            line: n + 1,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("v") => {
                let mut c = [0.0; 3];
                for (k, v) in c.iter_mut().enumerate() {
                    *v = parse_f64(toks.next(), ["x", "y", "z"][k]).map_err(syntax)?;
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for t in toks {
                    let head = t.split('/').next().unwrap_or("");
                    let i: i64 = head.parse().map_err(|_| syntax(format!("bad face index {t:?}")))?;
                    let resolved = if i > 0 {
                        i - 1
                    } else if i < 0 {
                        vertices.len() as i64 + i
                    } else {
                        return Err(syntax("face index 0".into()));
                    };
                    if resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(syntax(format!("face index {i} out of range")));
                    }
                    idx.push(resolved as usize);
                }
                if idx.len() < 3 {
                    return Err(syntax("face needs at least 3 vertices".into()));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(TriMesh::new(vertices, triangles))
}

/// Load a ground-truth mesh: parsed, checked closed, wound outward.
pub fn load_mesh(path: &Path) -> Result<TriMesh, FormatError> {
    let origin = path.display().to_string();
    parse_obj(&read(path)?, &origin)?
        .into_closed()
        .map_err(|source| FormatError::Mesh { path: origin, source })
}

pub fn obj_string(mesh: &TriMesh) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

pub fn write_obj(path: &Path, mesh: &TriMesh) -> Result<(), FormatError> {
    write_text(path, &obj_string(mesh))
}

/// One `x y z` point per line; blank lines and `#` comments are skipped.
pub fn parse_xyz(text: &str, origin: &str) -> Result<Vec<Vec3>, FormatError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| FormatError::Syntax {
            path: origin.into(),
            line: n + 1,
            message,
        };
        let mut toks = line.split_whitespace();
        let mut c = [0.0; 3];
        for (k, v) in c.iter_mut().enumerate() {
            *v = parse_f64(toks.next(), ["x", "y", "z"][k]).map_err(syntax)?;
        }
        if toks.next().is_some() {
            return Err(syntax("expected exactly three numbers".into()));
        }
        out.push(Vec3::new(c[0], c[1], c[2]));
    }
    Ok(out)
}

pub fn load_xyz(path: &Path) -> Result<Vec<Vec3>, FormatError> {
    parse_xyz(&read(path)?, &path.display().to_string())
}

pub fn xyz_string(points: &[Vec3]) -> String {
    let mut s = String::new();
    for p in points {
        let _ = writeln!(s, "{} {} {}", p.x, p.y, p.z);
    }
    s
}

pub fn write_xyz(path: &Path, points: &[Vec3]) -> Result<(), FormatError> {
    write_text(path, &xyz_string(points))
}
