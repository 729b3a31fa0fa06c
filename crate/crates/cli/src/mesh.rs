//! Wavefront OBJ export of placed tetrahedra.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use tetrapack::cluster::Cluster;
use tetrapack::packing::{enumerate_neighbors, Coset, LatticeBasis, LatticeCoords};
use tetrapack::verify::fmt_sig;
use tetrapack::Vec3;

/// One named tetrahedron in the export.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshObject {
    pub name: String,
    pub vertices: [Vec3; 4],
}

/// The origin cluster followed by every translate within `radius`, in the
/// neighbor enumeration order. Each cluster contributes its tetrahedra in
/// cluster order.
pub fn packing_objects(cluster: &Cluster<f64>, basis: &LatticeBasis<f64>, radius: f64) -> Vec<MeshObject> {
    let tetra = cluster.tetrahedra();
    let negated = cluster.negated().tetrahedra();
    let mut placements = vec![(Coset::Positive, LatticeCoords::ORIGIN, Vec3::zeros())];
    if radius > 0.0 {
        placements.extend(enumerate_neighbors(basis, radius).into_iter().map(|n| (n.coset, n.coords, n.offset)));
    }
    let mut out = Vec::new();
    for (coset, coords, w) in placements {
        let source = match coset {
            Coset::Positive => &tetra,
            Coset::Negative => &negated,
        };
        for (t, tet) in source.iter().enumerate() {
            out.push(MeshObject {
                name: format!("cluster{}[{}]_t{}", coset.sign(), coords, t),
                vertices: tet.vertices.map(|p| p + w),
            });
        }
    }
    out
}

/// Faces of a tetrahedron as vertex-index triples, counter-clockwise seen
/// from outside.
fn outward_faces(v: &[Vec3; 4]) -> [[usize; 3]; 4] {
    let mut faces = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];
    for (opposite, f) in faces.iter_mut().enumerate() {
        let n = (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]);
        if n.dot(v[opposite] - v[f[0]]) > 0.0 {
            f.swap(1, 2);
        }
    }
    faces
}

pub fn write_obj(objects: &[MeshObject]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# tetrapack mesh: {} tetrahedra", objects.len());
    for (k, o) in objects.iter().enumerate() {
        let _ = writeln!(s, "o {}", o.name);
        for p in &o.vertices {
            let _ = writeln!(s, "v {} {} {}", fmt_sig(p.x), fmt_sig(p.y), fmt_sig(p.z));
        }
        let base = 4 * k + 1;
        for f in outward_faces(&o.vertices) {
            let _ = writeln!(s, "f {} {} {}", base + f[0], base + f[1], base + f[2]);
        }
    }
    s
}

/// Object name, vertices and triangles with object-local indices.
pub type ParsedObject = (String, Vec<Vec3>, Vec<[usize; 3]>);

/// Reads back objects written by [`write_obj`]: named objects, vertices
/// and triangle faces.
pub fn parse_obj(text: &str) -> Result<Vec<ParsedObject>> {
    let mut vertices = Vec::new();
    let mut objects: Vec<(String, Vec<usize>, Vec<[usize; 3]>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("o") => objects.push((it.collect::<Vec<_>>().join(" "), Vec::new(), Vec::new())),
            Some("v") => {
                let c: Vec<f64> = it
                    .map(|t| t.parse())
                    .collect::<Result<_, _>>()
                    .with_context(|| format!("line {}: bad vertex", i + 1))?;
                if c.len() != 3 {
                    bail!("line {}: vertex needs 3 coordinates", i + 1);
                }
                vertices.push(Vec3::from_f64(c[0], c[1], c[2]));
                if let Some(o) = objects.last_mut() {
                    o.1.push(vertices.len() - 1);
                }
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|t| t.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .with_context(|| format!("line {}: bad face", i + 1))?;
                let [a, b, c] = idx[..] else {
                    bail!("line {}: only triangles are supported", i + 1);
                };
                let Some(o) = objects.last_mut() else {
                    bail!("line {}: face outside an object", i + 1);
                };
                o.2.push([a - 1, b - 1, c - 1]);
            }
            _ => {}
        }
    }
    Ok(objects
        .into_iter()
        .map(|(name, vi, faces)| {
            let first = vi.first().copied().unwrap_or(0);
            let verts = vi.iter().map(|&i| vertices[i]).collect();
            let faces = faces.iter().map(|f| f.map(|i| i - first)).collect();
            (name, verts, faces)
        })
        .collect())
}

/// Volume enclosed by a closed triangle mesh; positive for outward
/// orientation.
pub fn mesh_volume(vertices: &[Vec3], faces: &[[usize; 3]]) -> f64 {
    faces
        .iter()
        .map(|f| vertices[f[0]].dot(vertices[f[1]].cross(vertices[f[2]])) / 6.0)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use tetrapack::cluster::{build_cluster, SwivelParams};
    use tetrapack::verify::sym_basis;

    #[test]
    fn single_cluster_round_trip() {
        let cluster = build_cluster(SwivelParams::new(0.02, -0.05).unwrap(), 1).unwrap();
        let objects = packing_objects(&cluster, &sym_basis(), 0.0);
        assert_eq!(objects.len(), 9);
        let parsed = parse_obj(&write_obj(&objects)).unwrap();
        assert_eq!(parsed.len(), 9);
        for ((name, verts, faces), o) in parsed.iter().zip(&objects) {
            assert_eq!(name, &o.name);
            assert_eq!(faces.len(), 4);
            assert!((mesh_volume(verts, faces) - 8.0 / 3.0).abs() < 1e-9);
            for (p, q) in verts.iter().zip(o.vertices) {
                assert!(p.approx_eq(q, 1e-9));
            }
        }
    }
}
