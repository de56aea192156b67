//! OBJ, ASCII PLY and CSV writers for sampled surfaces.

use std::fmt::Write;

use isominimal::isogeom::{Vec3, Vec4};
use isominimal::weierstrass::{Sample, SurfaceGrid};
use isominimal::Complex;
use thiserror::Error;

use crate::job::Field;

#[derive(Debug, Error, PartialEq)]
pub enum ExportError {
    #[error("no regular samples to export")]
    AllSingular,
}

/// Two triangles per grid cell whose corners are all regular, as 0-based
/// indices; `(i, j) → (i+1, j) → (i+1, j+1)` and `(i, j) → (i+1, j+1) → (i, j+1)`.
pub fn triangles(grid: &SurfaceGrid) -> Result<Vec<[usize; 3]>, ExportError> {
    if grid.regular_samples().next().is_none() {
        return Err(ExportError::AllSingular);
    }
    let (n1, n2) = grid.shape();
    let idx = |i: usize, j: usize| i * n2 + j;
    let mut out = Vec::with_capacity(2 * (n1 - 1) * (n2 - 1));
    for i in 0..n1 - 1 {
        for j in 0..n2 - 1 {
            let quad = [idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)];
            if quad.iter().all(|&k| grid.samples[k].regular) {
                out.push([quad[0], quad[1], quad[2]]);
                out.push([quad[0], quad[2], quad[3]]);
            }
        }
    }
    Ok(out)
}

pub fn obj(grid: &SurfaceGrid) -> Result<String, ExportError> {
    let tris = triangles(grid)?;
    let (n1, n2) = grid.shape();
    let mut s = String::new();
    let _ = writeln!(s, "# isominimal surface {n1}x{n2}");
    for sample in &grid.samples {
        let p = sample.position;
        let _ = writeln!(s, "v {} {} {}", p.x, p.y, p.z);
    }
    for t in tris {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    Ok(s)
}

fn vector_columns(name: &str) -> [String; 3] {
    [format!("{name}_x"), format!("{name}_y"), format!("{name}_z")]
}

/// Extra per-vertex columns beyond the position.
fn columns(fields: &[Field]) -> Vec<String> {
    let mut cols = Vec::new();
    for f in fields {
        match f {
            Field::Position => {}
            Field::Nm => cols.extend(vector_columns("nm")),
            Field::Xi => cols.extend(vector_columns("xi")),
            Field::K => cols.push("K".to_string()),
            Field::H => cols.push("H".to_string()),
        }
    }
    cols
}

fn values(s: &Sample, fields: &[Field]) -> Vec<f64> {
    let mut v = Vec::new();
    let push3 = |v: &mut Vec<f64>, p: Vec3| v.extend(p.to_array());
    for f in fields {
        match f {
            Field::Position => {}
            Field::Nm => push3(&mut v, s.n_m),
            Field::Xi => push3(&mut v, s.xi),
            Field::K => v.push(s.k),
            Field::H => v.push(s.h),
        }
    }
    v
}

/// ASCII PLY with double-precision vertex properties `x y z` and one property
/// per extra field.
pub fn ply(grid: &SurfaceGrid, fields: &[Field]) -> Result<String, ExportError> {
    let tris = triangles(grid)?;
    let mut s = String::new();
    let _ = writeln!(s, "ply\nformat ascii 1.0\ncomment isominimal surface");
    let _ = writeln!(s, "element vertex {}", grid.samples.len());
    for c in ["x", "y", "z"].iter().map(|c| c.to_string()).chain(columns(fields)) {
        let _ = writeln!(s, "property double {c}");
    }
    let _ = writeln!(s, "element face {}\nproperty list uchar int vertex_indices\nend_header", tris.len());
    for sample in &grid.samples {
        let p = sample.position;
        let mut row = vec![p.x, p.y, p.z];
        row.extend(values(sample, fields));
        let text: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", text.join(" "));
    }
    for t in tris {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    Ok(s)
}

/// 17 significant digits: reads back to the same bits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `u,v` then the selected fields, one row per sample in grid order. With the
/// default fields the header is `u,v,x,y,z,K,H`.
pub fn csv(grid: &SurfaceGrid, fields: &[Field]) -> Result<String, ExportError> {
    if grid.regular_samples().next().is_none() {
        return Err(ExportError::AllSingular);
    }
    let mut header = vec!["u".to_string(), "v".to_string()];
    if fields.contains(&Field::Position) {
        header.extend(["x", "y", "z"].map(String::from));
    }
    header.extend(columns(fields));
    let mut s = header.join(",");
    s.push('\n');
    for sample in &grid.samples {
        let (u, v) = sample.params;
        let mut row = vec![u, v];
        if fields.contains(&Field::Position) {
            row.extend(sample.position.to_array());
        }
        row.extend(values(sample, fields));
        let text: Vec<String> = row.into_iter().map(num).collect();
        s.push_str(&text.join(","));
        s.push('\n');
    }
    Ok(s)
}

/// `u,v,x1,x2,x3,x4` rows of a sampled four-dimensional surface.
pub fn csv4(params: &[(f64, f64)], points: &[(Complex, Vec4)]) -> String {
    let mut s = String::from("u,v,x1,x2,x3,x4\n");
    for ((u, v), (_, x)) in params.iter().zip(points) {
        let row: Vec<String> = [*u, *v].into_iter().chain(x.0).map(num).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use isominimal::expr::{parse_expr, Params};
    use isominimal::weierstrass::{sample_surface, Domain, PhiCurve, SamplingOptions};

    fn plane(nu: usize, nv: usize) -> SurfaceGrid {
        // φ = (1, i, 0): x = (u, −v, 0).
        let e = |s: &str| parse_expr::<&str>(s, &[]).unwrap();
        let phi = PhiCurve::new([e("1"), e("i"), e("0")], &Params::new()).unwrap();
        let domain = Domain::rect((0.0, 1.0), (0.0, 1.0), nu, nv).unwrap();
        sample_surface(&phi, &domain, Complex::new(0.0, 0.0), Vec3::default(), 0.0, &SamplingOptions::default()).unwrap()
    }

    #[test]
    fn two_by_two_grid() {
        let text = obj(&plane(2, 2)).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4);
        let faces: Vec<&str> = text.lines().filter(|l| l.starts_with("f ")).collect();
        assert_eq!(faces, ["f 1 3 4", "f 1 4 2"]);
    }

    #[test]
    fn faces_are_consistently_wound() {
        let g = plane(4, 3);
        let tris = triangles(&g).unwrap();
        assert_eq!(tris.len(), 2 * 3 * 2);
        for t in tris {
            let [a, b, c] = t.map(|k| g.samples[k].position);
            let n = (b - a).cross(c - a);
            assert!(n.z < 0.0, "{t:?}");
        }
    }

    #[test]
    fn ply_header_counts() {
        let text = ply(&plane(3, 3), &[Field::Position, Field::K]).unwrap();
        assert!(text.starts_with("ply\nformat ascii 1.0\n"));
        assert!(text.contains("element vertex 9\n"));
        assert!(text.contains("property double K\n"));
        assert!(text.contains("element face 8\n"));
        let body = text.split("end_header\n").nth(1).unwrap();
        assert_eq!(body.lines().count(), 9 + 8);
    }

    #[test]
    fn csv_reads_back_bitwise() {
        let g = plane(5, 4);
        let text = csv(&g, &[Field::Position, Field::K, Field::H]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("u,v,x,y,z,K,H"));
        for (line, s) in lines.zip(&g.samples) {
            let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
            let want = [s.params.0, s.params.1, s.position.x, s.position.y, s.position.z, s.k, s.h];
            assert_eq!(v.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), want.map(f64::to_bits));
        }
    }
}
