//! File formats: CSV for curves, Darboux fields, elastica and boundary
//! trajectories (17 significant digits), ASCII OBJ for meshes, JSON sidecars
//! through serde. All writers are deterministic byte-for-byte for identical
//! inputs.

use crate::bjorling::ComplexStrip;
use crate::boundary::BoundaryTrajectory;
use crate::elastica::ElasticaSolution;
use crate::geom::curve::ArcCurve;
use crate::geom::darboux::DarbouxField;
use crate::geom::mesh::TriMesh;
use crate::{Error, Result, Vec3};
use std::io::{BufRead, Write};

/// 17 significant digits, enough to round-trip any f64.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_arc_curve_csv<W: Write>(curve: &ArcCurve, mut w: W) -> Result<()> {
    writeln!(w, "s,x,y,z,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau")?;
    for q in &curve.samples {
        let cols: Vec<String> = [
            q.s,
            q.position.x,
            q.position.y,
            q.position.z,
            q.tangent.x,
            q.tangent.y,
            q.tangent.z,
            q.normal.x,
            q.normal.y,
            q.normal.z,
            q.binormal.x,
            q.binormal.y,
            q.binormal.z,
            q.kappa,
            q.tau,
        ]
        .iter()
        .map(|v| fmt(*v))
        .collect();
        writeln!(w, "{}", cols.join(","))?;
    }
    Ok(())
}

pub fn write_darboux_csv<W: Write>(field: &DarbouxField, mut w: W) -> Result<()> {
    writeln!(w, "s,kg,kn,tg,theta")?;
    for q in &field.samples {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt(q.s),
            fmt(q.kappa_g),
            fmt(q.kappa_n),
            fmt(q.tau_g),
            fmt(q.theta)
        )?;
    }
    Ok(())
}

pub fn write_elastica_csv<W: Write>(sol: &ElasticaSolution, mut w: W) -> Result<()> {
    writeln!(w, "s,kg,kgp")?;
    for q in &sol.samples {
        writeln!(w, "{},{},{}", fmt(q.s), fmt(q.kappa_g), fmt(q.kappa_g_prime))?;
    }
    Ok(())
}

pub fn write_boundary_csv<W: Write>(traj: &BoundaryTrajectory, mut w: W) -> Result<()> {
    writeln!(w, "s,kg,kgp,tg")?;
    for q in &traj.states {
        writeln!(
            w,
            "{},{},{},{}",
            fmt(q.s),
            fmt(q.kappa_g),
            fmt(q.kappa_g_prime),
            fmt(q.tau_g)
        )?;
    }
    Ok(())
}

/// Strip CSV: one row per node, complex components split into re/im columns.
pub fn write_strip_csv<W: Write>(strip: &ComplexStrip, mut w: W) -> Result<()> {
    writeln!(
        w,
        "s,t,re_Cx,im_Cx,re_Cy,im_Cy,re_Cz,im_Cz,re_kappa,im_kappa,re_tau,im_tau"
    )?;
    for it in 0..strip.rows.len() {
        for is in 0..=strip.ns {
            let z = strip.z_at(is, it);
            let n = &strip.rows[it][is];
            let cols = [
                z.re, z.im, n.c.x.re, n.c.x.im, n.c.y.re, n.c.y.im, n.c.z.re, n.c.z.im,
                n.kappa.re, n.kappa.im, n.tau.re, n.tau.im,
            ];
            let line: Vec<String> = cols.iter().map(|v| fmt(*v)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
    }
    Ok(())
}

/// ASCII OBJ with v/f records, 1-based indices.
pub fn write_obj<W: Write>(mesh: &TriMesh, mut w: W) -> Result<()> {
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", fmt(v.x), fmt(v.y), fmt(v.z))?;
    }
    for f in &mesh.faces {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

/// Minimal OBJ reader: v and f records, extra vertex data ignored, polygon
/// faces fan-triangulated.
pub fn read_obj<R: BufRead>(r: R) -> Result<TriMesh> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let mut coord = [0.0f64; 3];
                for c in &mut coord {
                    *c = parts
                        .next()
                        .ok_or_else(|| Error::Parse(format!("line {}: short v record", lineno + 1)))?
                        .parse()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
                }
                vertices.push(Vec3::new(coord[0], coord[1], coord[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|tok| {
                        let first = tok.split('/').next().unwrap_or(tok);
                        first
                            .parse::<usize>()
                            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
                    })
                    .collect::<Result<Vec<usize>>>()?;
                if idx.len() < 3 {
                    return Err(Error::Parse(format!("line {}: short f record", lineno + 1)));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0] - 1, idx[k] - 1, idx[k + 1] - 1]);
                }
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, faces)
}

/// Serialize any serde value as pretty JSON with a trailing newline.
pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(format!("json serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::curve::{frenet_reconstruct, Frame};
    use proptest::prelude::*;

    #[test]
    fn obj_round_trip_preserves_topology() {
        let m = TriMesh::disk(1.0, 3, 12);
        let mut buf = Vec::new();
        write_obj(&m, &mut buf).unwrap();
        let back = read_obj(std::io::BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(back.vertices.len(), m.vertices.len());
        assert_eq!(back.faces, m.faces);
        assert_eq!(back.boundary_loops.len(), 1);
    }

    #[test]
    fn curve_csv_shape() {
        let c = frenet_reconstruct(|_| 1.0, |_| 0.0, 1.0, 0.1, &Frame::canonical()).unwrap();
        let mut buf = Vec::new();
        write_arc_curve_csv(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "s,x,y,z,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau"
        );
        assert_eq!(text.lines().count(), c.samples.len() + 1);
        // deterministic bytes
        let mut buf2 = Vec::new();
        write_arc_curve_csv(&c, &mut buf2).unwrap();
        assert_eq!(text.as_bytes(), buf2.as_slice());
    }

    proptest! {
        #[test]
        fn fmt_round_trips_f64(x in -1e12f64..1e12) {
            let s = super::fmt(x);
            let back: f64 = s.parse().unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
