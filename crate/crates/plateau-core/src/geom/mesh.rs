//! Triangle meshes with boundary, structured meshing of parametric patches,
//! and discrete curvature estimators (angle defect, cotangent Laplacian).

use super::patch::ParamPatch;
use crate::{Error, Result, Vec3};
use std::collections::HashMap;

/// Oriented manifold-with-boundary triangle mesh.
#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    /// Ordered vertex cycles, one per boundary component, traversed in the
    /// orientation induced by the faces (surface on the left of the walk).
    pub boundary_loops: Vec<Vec<usize>>,
}

impl TriMesh {
    /// Build a mesh and verify orientable manifold-with-boundary connectivity.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let a = f[k];
                let b = f[(k + 1) % 3];
                if a >= nv || b >= nv {
                    return Err(Error::Topology(format!(
                        "face {fi} references vertex out of range"
                    )));
                }
                if a == b {
                    return Err(Error::Topology(format!("face {fi} is degenerate")));
                }
                if directed.insert((a, b), fi).is_some() {
                    return Err(Error::Topology(format!(
                        "directed edge ({a}, {b}) used twice; mesh is non-manifold or unoriented"
                    )));
                }
            }
        }
        // every undirected edge carries one or two directed copies
        for (&(a, b), _) in directed.iter() {
            let twins = directed.contains_key(&(b, a));
            let _ = twins; // boundary edges simply lack the twin
            let _ = (a, b);
        }
        // boundary loops: directed edges without a twin, walked head-to-tail
        let mut next: HashMap<usize, usize> = HashMap::new();
        for (&(a, b), _) in directed.iter() {
            if !directed.contains_key(&(b, a)) {
                if next.insert(a, b).is_some() {
                    return Err(Error::Topology(format!(
                        "boundary branches at vertex {a}; mesh is non-manifold"
                    )));
                }
            }
        }
        let mut visited: HashMap<usize, bool> = HashMap::new();
        let mut loops = Vec::new();
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        for start in starts {
            if *visited.get(&start).unwrap_or(&false) {
                continue;
            }
            let mut cycle = vec![start];
            visited.insert(start, true);
            let mut cur = next[&start];
            while cur != start {
                cycle.push(cur);
                visited.insert(cur, true);
                cur = *next.get(&cur).ok_or_else(|| {
                    Error::Topology("open boundary walk; mesh is not manifold-with-boundary".into())
                })?;
            }
            loops.push(cycle);
        }
        Ok(TriMesh {
            vertices,
            faces,
            boundary_loops: loops,
        })
    }

    pub fn edge_count(&self) -> usize {
        let mut edges: std::collections::HashSet<(usize, usize)> = Default::default();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_loops.iter().any(|l| l.contains(&v))
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f];
        0.5 * (self.vertices[b] - self.vertices[a])
            .cross(&(self.vertices[c] - self.vertices[a]))
            .norm()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// Area-weighted vertex normals from face orientation.
    pub fn vertex_normals(&self) -> Vec<Vec3> {
        let mut normals = vec![Vec3::zeros(); self.vertices.len()];
        for f in &self.faces {
            let n = (self.vertices[f[1]] - self.vertices[f[0]])
                .cross(&(self.vertices[f[2]] - self.vertices[f[0]]));
            for &v in f {
                normals[v] += n;
            }
        }
        for n in &mut normals {
            let len = n.norm();
            if len > 0.0 {
                *n /= len;
            }
        }
        normals
    }

    /// Fan-triangulated flat disk fixture in the z = 0 plane (CCW from +z).
    pub fn disk(radius: f64, rings: usize, segments: usize) -> Self {
        let mut vertices = vec![Vec3::zeros()];
        let mut faces = Vec::new();
        for ring in 1..=rings {
            let r = radius * ring as f64 / rings as f64;
            for k in 0..segments {
                let t = std::f64::consts::TAU * k as f64 / segments as f64;
                vertices.push(Vec3::new(r * t.cos(), r * t.sin(), 0.0));
            }
        }
        let idx = |ring: usize, k: usize| -> usize {
            if ring == 0 {
                0
            } else {
                1 + (ring - 1) * segments + (k % segments)
            }
        };
        for k in 0..segments {
            faces.push([0, idx(1, k), idx(1, k + 1)]);
        }
        for ring in 1..rings {
            for k in 0..segments {
                let (a, b) = (idx(ring, k), idx(ring, k + 1));
                let (c, d) = (idx(ring + 1, k), idx(ring + 1, k + 1));
                faces.push([a, c, d]);
                faces.push([a, d, b]);
            }
        }
        TriMesh::new(vertices, faces).expect("disk fixture is manifold")
    }

    /// Octant of the unit sphere, subdivided `level` times from a single
    /// spherical triangle; the K -> 1 refinement fixture.
    pub fn sphere_octant(level: usize) -> Self {
        let mut tris = vec![[Vec3::x(), Vec3::y(), Vec3::z()]];
        for _ in 0..level {
            let mut next = Vec::with_capacity(tris.len() * 4);
            for [a, b, c] in tris {
                let ab = (a + b).normalize();
                let bc = (b + c).normalize();
                let ca = (c + a).normalize();
                next.push([a, ab, ca]);
                next.push([ab, b, bc]);
                next.push([ca, bc, c]);
                next.push([ab, bc, ca]);
            }
            tris = next;
        }
        let mut vertices: Vec<Vec3> = Vec::new();
        let mut faces = Vec::new();
        let mut lookup: HashMap<(i64, i64, i64), usize> = HashMap::new();
        let key = |p: Vec3| -> (i64, i64, i64) {
            let q = 1e9;
            ((p.x * q).round() as i64, (p.y * q).round() as i64, (p.z * q).round() as i64)
        };
        for t in tris {
            let mut f = [0usize; 3];
            for (i, p) in t.iter().enumerate() {
                let k = key(*p);
                let id = *lookup.entry(k).or_insert_with(|| {
                    vertices.push(*p);
                    vertices.len() - 1
                });
                f[i] = id;
            }
            faces.push(f);
        }
        TriMesh::new(vertices, faces).expect("octant fixture is manifold")
    }

    /// Flat rectangular plate with square holes punched out; the
    /// multi-boundary planar fixture. `holes` <= 2.
    pub fn holed_plate(n: usize, holes: usize) -> Self {
        assert!(n >= 8 && holes <= 2);
        let h = 1.0 / n as f64;
        let in_hole = |i: usize, j: usize| -> bool {
            let boxes: &[(usize, usize)] = match holes {
                0 => &[],
                1 => &[(n / 2, n / 2)],
                _ => &[(n / 4, n / 2), (3 * n / 4, n / 2)],
            };
            boxes.iter().any(|&(ci, cj)| {
                let r = n / 8;
                i >= ci - r && i < ci + r && j >= cj - r && j < cj + r
            })
        };
        let mut id = vec![usize::MAX; (n + 1) * (n + 1)];
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        let vid = |i: usize, j: usize, id: &mut Vec<usize>, vertices: &mut Vec<Vec3>| {
            let k = j * (n + 1) + i;
            if id[k] == usize::MAX {
                id[k] = vertices.len();
                vertices.push(Vec3::new(i as f64 * h, j as f64 * h, 0.0));
            }
            id[k]
        };
        for j in 0..n {
            for i in 0..n {
                if in_hole(i, j) {
                    continue;
                }
                let a = vid(i, j, &mut id, &mut vertices);
                let b = vid(i + 1, j, &mut id, &mut vertices);
                let c = vid(i + 1, j + 1, &mut id, &mut vertices);
                let d = vid(i, j + 1, &mut id, &mut vertices);
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        TriMesh::new(vertices, faces).expect("plate fixture is manifold")
    }
}

/// Structured triangulation of a patch domain with `nu` x `nv` vertices.
/// When the patch is v-periodic the seam row is identified, producing an
/// annulus-type mesh. Boundary loops come out positively oriented with
/// respect to the patch normal.
pub fn mesh_from_patch(patch: &dyn ParamPatch, nu: usize, nv: usize) -> Result<TriMesh> {
    if nu < 2 || nv < 2 {
        return Err(Error::precondition(format!(
            "need nu, nv >= 2 vertices per side, got {nu} x {nv}"
        )));
    }
    let d = patch.domain();
    let rows = if d.v_periodic { nv - 1 } else { nv };
    let mut vertices = Vec::with_capacity(nu * rows);
    for j in 0..rows {
        let v = d.v.0 + d.v_span() * j as f64 / (nv - 1) as f64;
        for i in 0..nu {
            let u = d.u.0 + d.u_span() * i as f64 / (nu - 1) as f64;
            vertices.push(patch.position(u, v));
        }
    }
    let vid = |i: usize, j: usize| -> usize { (j % rows) * nu + i };
    let mut faces = Vec::new();
    let jmax = if d.v_periodic { rows } else { nv - 1 };
    for j in 0..jmax {
        for i in 0..nu - 1 {
            let a = vid(i, j);
            let b = vid(i + 1, j);
            let c = vid(i + 1, j + 1);
            let e = vid(i, j + 1);
            let area = |x: usize, y: usize, z: usize| -> f64 {
                0.5 * (vertices[y] - vertices[x])
                    .cross(&(vertices[z] - vertices[x]))
                    .norm()
            };
            let cell = j * (nu - 1) + i;
            if area(a, b, c) < 1e-14 || area(a, c, e) < 1e-14 {
                return Err(Error::MeshingError { cell });
            }
            faces.push([a, b, c]);
            faces.push([a, c, e]);
        }
    }
    TriMesh::new(vertices, faces)
}

/// Per-vertex discrete curvature estimates.
#[derive(Debug, Clone, Copy)]
pub struct VertexCurvature {
    pub h: f64,
    pub k: f64,
    /// Boundary vertices are excluded from the angle-defect normalization.
    pub boundary: bool,
}

fn triangle_angle(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let u = (b - a).normalize();
    let v = (c - a).normalize();
    u.dot(&v).clamp(-1.0, 1.0).acos()
}

fn cot_angle(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    // cotangent of the angle at a
    let u = b - a;
    let v = c - a;
    let cross = u.cross(&v).norm();
    if cross < 1e-300 {
        0.0
    } else {
        u.dot(&v) / cross
    }
}

/// Mixed Voronoi area of Meyer et al., with the obtuse-triangle fallbacks.
fn mixed_area(mesh: &TriMesh, v: usize, vertex_faces: &[Vec<usize>]) -> f64 {
    let mut area = 0.0;
    for &f in &vertex_faces[v] {
        let face = mesh.faces[f];
        let li = face.iter().position(|&x| x == v).unwrap();
        let p = mesh.vertices[face[li]];
        let q = mesh.vertices[face[(li + 1) % 3]];
        let r = mesh.vertices[face[(li + 2) % 3]];
        let ang_p = triangle_angle(p, q, r);
        let ang_q = triangle_angle(q, r, p);
        let ang_r = triangle_angle(r, p, q);
        let tri = 0.5 * (q - p).cross(&(r - p)).norm();
        let half_pi = std::f64::consts::FRAC_PI_2;
        if ang_p > half_pi {
            area += tri / 2.0;
        } else if ang_q > half_pi || ang_r > half_pi {
            area += tri / 4.0;
        } else {
            area += 0.125
                * ((q - p).norm_squared() * cot_angle(r, p, q)
                    + (r - p).norm_squared() * cot_angle(q, r, p));
        }
    }
    area
}

/// Angle-defect Gaussian curvature and cotangent mean curvature per vertex.
/// K uses the 2 pi defect over the mixed Voronoi area at interior vertices;
/// boundary vertices are flagged and report k = 0. H is the magnitude of the
/// cotangent mean-curvature vector with sign resolved against the outward
/// vertex normal from the face orientation.
pub fn discrete_curvatures(mesh: &TriMesh) -> Result<Vec<VertexCurvature>> {
    let nv = mesh.vertices.len();
    let mut vertex_faces = vec![Vec::new(); nv];
    for (fi, f) in mesh.faces.iter().enumerate() {
        for &v in f {
            vertex_faces[v].push(fi);
        }
    }
    // cotangent weights per undirected edge
    let mut cot: HashMap<(usize, usize), f64> = HashMap::new();
    for f in &mesh.faces {
        for k in 0..3 {
            let a = f[k];
            let b = f[(k + 1) % 3];
            let opp = f[(k + 2) % 3];
            let w = cot_angle(mesh.vertices[opp], mesh.vertices[a], mesh.vertices[b]);
            *cot.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
        }
    }
    let normals = mesh.vertex_normals();
    let boundary: Vec<bool> = (0..nv).map(|v| mesh.is_boundary_vertex(v)).collect();

    let mut out = Vec::with_capacity(nv);
    for v in 0..nv {
        if vertex_faces[v].is_empty() {
            return Err(Error::Topology(format!("isolated vertex {v}")));
        }
        let area = mixed_area(mesh, v, &vertex_faces);
        // angle sum around v
        let mut angle_sum = 0.0;
        for &f in &vertex_faces[v] {
            let face = mesh.faces[f];
            let li = face.iter().position(|&x| x == v).unwrap();
            angle_sum += triangle_angle(
                mesh.vertices[face[li]],
                mesh.vertices[face[(li + 1) % 3]],
                mesh.vertices[face[(li + 2) % 3]],
            );
        }
        let k = if boundary[v] {
            0.0
        } else {
            (std::f64::consts::TAU - angle_sum) / area
        };
        // cotangent Laplacian
        let mut lap = Vec3::zeros();
        let mut neighbors: Vec<usize> = Vec::new();
        for &f in &vertex_faces[v] {
            for &w in &mesh.faces[f] {
                if w != v && !neighbors.contains(&w) {
                    neighbors.push(w);
                }
            }
        }
        for w in neighbors {
            let c = cot[&(v.min(w), v.max(w))];
            lap += c * (mesh.vertices[w] - mesh.vertices[v]);
        }
        lap *= 0.5 / area;
        let h_mag = 0.5 * lap.norm();
        // Delta X = -2 H nu with our second-form sign (sphere with outward
        // normal has H < 0), so H picks up a minus against the normal.
        let h = if lap.dot(&normals[v]) >= 0.0 { -h_mag } else { h_mag };
        out.push(VertexCurvature {
            h,
            k,
            boundary: boundary[v],
        });
    }
    Ok(out)
}

/// Exact discrete Gauss-Bonnet bookkeeping for a mesh with boundary.
#[derive(Debug, Clone, Copy)]
pub struct GaussBonnetReport {
    /// Sum of interior angle defects: the discrete total Gaussian curvature.
    pub interior_defect: f64,
    /// Discrete total geodesic curvature, signed by the crate convention
    /// (a flat disk boundary totals -2 pi).
    pub boundary_turning: f64,
    pub two_pi_chi: f64,
    /// interior_defect - boundary_turning - two_pi_chi
    pub residual: f64,
}

pub fn discrete_gauss_bonnet(mesh: &TriMesh) -> Result<GaussBonnetReport> {
    let nv = mesh.vertices.len();
    let mut angle_sum = vec![0.0; nv];
    for f in &mesh.faces {
        for k in 0..3 {
            let a = f[k];
            angle_sum[a] += triangle_angle(
                mesh.vertices[a],
                mesh.vertices[f[(k + 1) % 3]],
                mesh.vertices[f[(k + 2) % 3]],
            );
        }
    }
    let mut interior_defect = 0.0;
    let mut boundary_turning = 0.0;
    for v in 0..nv {
        if mesh.is_boundary_vertex(v) {
            // exterior angle pi - angle sum; total geodesic curvature carries
            // the opposite sign under kappa_g = T'.n with outward n
            boundary_turning -= std::f64::consts::PI - angle_sum[v];
        } else {
            interior_defect += std::f64::consts::TAU - angle_sum[v];
        }
    }
    let two_pi_chi = std::f64::consts::TAU * mesh.euler_characteristic() as f64;
    Ok(GaussBonnetReport {
        interior_defect,
        boundary_turning,
        two_pi_chi,
        residual: interior_defect - boundary_turning - two_pi_chi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::patch::{ConformalHelicoidPatch, PlanarAnnulusPatch};

    struct Square;
    impl ParamPatch for Square {
        fn domain(&self) -> super::super::patch::Domain {
            super::super::patch::Domain {
                u: (0.0, 1.0),
                v: (0.0, 1.0),
                v_periodic: false,
            }
        }
        fn position(&self, u: f64, v: f64) -> Vec3 {
            Vec3::new(u, v, 0.0)
        }
    }

    #[test]
    fn unit_square_two_by_two() {
        let m = mesh_from_patch(&Square, 2, 2).unwrap();
        assert_eq!(m.faces.len(), 2);
        assert_eq!(m.euler_characteristic(), 1);
        assert_eq!(m.boundary_loops.len(), 1);
    }

    #[test]
    fn grid_counts_rejected() {
        assert!(mesh_from_patch(&Square, 1, 4).is_err());
    }

    #[test]
    fn annulus_topology_with_seam() {
        let p = PlanarAnnulusPatch::new(1.0, 2.0).unwrap();
        let m = mesh_from_patch(&p, 8, 33).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.boundary_loops.len(), 2);
    }

    #[test]
    fn helicoid_annulus_topology() {
        let p = ConformalHelicoidPatch::from_radii(1.0, 1.0, 2.0).unwrap();
        let m = mesh_from_patch(&p, 10, 41).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.boundary_loops.len(), 2);
    }

    #[test]
    fn planar_mesh_has_zero_curvatures() {
        let m = TriMesh::disk(1.0, 6, 24);
        let curv = discrete_curvatures(&m).unwrap();
        for c in curv.iter().filter(|c| !c.boundary) {
            assert!(c.h.abs() < 1e-12, "H = {}", c.h);
            assert!(c.k.abs() < 1e-12, "K = {}", c.k);
        }
    }

    #[test]
    fn sphere_octant_k_converges_to_one_at_first_order() {
        let mut errs = Vec::new();
        for level in [3usize, 4, 5] {
            let m = TriMesh::sphere_octant(level);
            let curv = discrete_curvatures(&m).unwrap();
            let interior: Vec<&VertexCurvature> =
                curv.iter().filter(|c| !c.boundary).collect();
            let mean_k =
                interior.iter().map(|c| c.k).sum::<f64>() / interior.len() as f64;
            errs.push((mean_k - 1.0).abs());
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "errors {errs:?}");
        // order >= 1 between the two finest levels (h halves each level)
        let order = (errs[1] / errs[2]).log2();
        assert!(order >= 0.9, "observed K order {order:.2}, errors {errs:?}");
    }

    #[test]
    fn discrete_gauss_bonnet_is_exact_everywhere() {
        let fixtures: Vec<TriMesh> = vec![
            TriMesh::disk(1.0, 5, 17),
            mesh_from_patch(&PlanarAnnulusPatch::new(0.5, 2.0).unwrap(), 7, 29).unwrap(),
            TriMesh::holed_plate(16, 2),
            TriMesh::sphere_octant(3),
            mesh_from_patch(&ConformalHelicoidPatch::from_radii(1.0, 1.0, 2.0).unwrap(), 9, 25)
                .unwrap(),
        ];
        for (i, m) in fixtures.iter().enumerate() {
            let gb = discrete_gauss_bonnet(m).unwrap();
            assert!(
                gb.residual.abs() <= 1e-10,
                "fixture {i}: residual {:.3e}",
                gb.residual
            );
        }
    }

    #[test]
    fn holed_plate_has_three_loops_and_chi_minus_one() {
        let m = TriMesh::holed_plate(16, 2);
        assert_eq!(m.boundary_loops.len(), 3);
        assert_eq!(m.euler_characteristic(), -1);
    }

    #[test]
    fn non_manifold_is_rejected() {
        // two triangles sharing an edge with the same orientation
        let vertices = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
        ];
        let faces = vec![[0, 1, 2], [0, 1, 3]];
        match TriMesh::new(vertices, faces) {
            Err(Error::Topology(_)) => {}
            other => panic!("expected topology error, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_cell_reports_index() {
        struct Pinched;
        impl ParamPatch for Pinched {
            fn domain(&self) -> super::super::patch::Domain {
                super::super::patch::Domain {
                    u: (0.0, 1.0),
                    v: (0.0, 1.0),
                    v_periodic: false,
                }
            }
            fn position(&self, u: f64, v: f64) -> Vec3 {
                // collapses the v-direction at u >= 0.5
                let w = if u < 0.5 { v } else { 0.0 };
                Vec3::new(u, w, 0.0)
            }
        }
        match mesh_from_patch(&Pinched, 5, 5) {
            Err(Error::MeshingError { .. }) => {}
            other => panic!("expected meshing error, got {other:?}"),
        }
    }

    #[test]
    fn catenoid_mesh_mean_curvature_shrinks_linearly() {
        // catenoid r = cosh z sampled as a chart; |H| <= C h under refinement
        struct Catenoid;
        impl ParamPatch for Catenoid {
            fn domain(&self) -> super::super::patch::Domain {
                super::super::patch::Domain {
                    u: (-0.8, 0.8),
                    v: (0.0, std::f64::consts::TAU),
                    v_periodic: true,
                }
            }
            fn position(&self, u: f64, v: f64) -> Vec3 {
                Vec3::new(u.cosh() * v.cos(), u.cosh() * v.sin(), u)
            }
        }
        let mut sup = Vec::new();
        for n in [16usize, 32, 64] {
            let m = mesh_from_patch(&Catenoid, n + 1, 2 * n + 1).unwrap();
            let curv = discrete_curvatures(&m).unwrap();
            let worst = curv
                .iter()
                .filter(|c| !c.boundary)
                .map(|c| c.h.abs())
                .fold(0.0f64, f64::max);
            sup.push(worst);
        }
        assert!(
            sup[2] < sup[1] && sup[1] < sup[0],
            "catenoid |H| not decreasing: {sup:?}"
        );
        let c_h = sup[2] / (0.8 / 32.0);
        assert!(c_h.is_finite());
    }
}
