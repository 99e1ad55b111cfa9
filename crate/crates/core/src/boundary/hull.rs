//! Floating-point convex hulls in up to three dimensions.
//!
//! Points are first reduced to their affine span; the hull is then built in
//! that span (interval, monotone chain, or Quickhull) and lifted
//! back. Facets of lower-dimensional hulls include the two-sided slabs of
//! the orthogonal complement, so every hull is an H-polytope in R^k.

use std::collections::{HashMap, HashSet};

use super::directions::{orthogonal_complement, orthogonalize};

#[derive(Clone, Debug)]
pub(crate) struct HullFacet {
    pub normal: Vec<f64>,
    pub offset: f64,
    /// Input indices of the points on this facet.
    pub points: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct Hull {
    /// Input indices of hull vertices.
    pub vertices: Vec<usize>,
    pub facets: Vec<HullFacet>,
    pub affine_dim: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Length scale used to turn relative tolerances into absolute ones.
pub(crate) fn extent(points: &[Vec<f64>]) -> f64 {
    let k = points.first().map_or(0, |p| p.len());
    let mut s: f64 = 0.0;
    for i in 0..k {
        let lo = points.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
        s = s.max(hi - lo).max(lo.abs()).max(hi.abs());
    }
    s.max(1e-300)
}

/// Greedy affine basis: the anchor index and orthonormal spanning directions.
fn affine_basis(points: &[Vec<f64>], tol: f64) -> (usize, Vec<Vec<f64>>, Vec<usize>) {
    let k = points[0].len();
    let anchor = (0..points.len())
        .min_by(|&a, &b| points[a].partial_cmp(&points[b]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    let p0 = &points[anchor];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut chosen = vec![anchor];
    while basis.len() < k {
        let mut best = (0.0, usize::MAX);
        for (i, p) in points.iter().enumerate() {
            let mut w = sub(p, p0);
            for u in &basis {
                let c = dot(&w, u);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
            let dist = norm(&w);
            if dist > best.0 {
                best = (dist, i);
            }
        }
        if best.0 <= tol {
            break;
        }
        let dir = sub(&points[best.1], p0);
        match orthogonalize(&dir, &basis) {
            Some(u) => {
                basis.push(u);
                chosen.push(best.1);
            }
            None => break,
        }
    }
    (anchor, basis, chosen)
}

pub(crate) fn convex_hull(points: &[Vec<f64>], rel_tol: f64) -> Hull {
    assert!(!points.is_empty(), "hull of empty point set");
    let k = points[0].len();
    assert!(k <= 3, "hull supports dimension at most 3");
    let scale = extent(points);
    let tol = rel_tol * scale;
    let (anchor, basis, chosen) = affine_basis(points, tol);
    let r = basis.len();
    let p0 = points[anchor].clone();
    let local: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let w = sub(p, &p0);
            basis.iter().map(|u| dot(&w, u)).collect()
        })
        .collect();

    let (vertices, local_facets) = match r {
        0 => (vec![anchor], Vec::new()),
        1 => hull_1d(&local),
        2 => hull_2d(&local, tol),
        _ => hull_3d(&local, &chosen, tol),
    };

    let mut facets: Vec<HullFacet> = local_facets
        .into_iter()
        .map(|(nu, off, pts)| {
            let mut normal = vec![0.0; k];
            for (j, u) in basis.iter().enumerate() {
                for (ni, ui) in normal.iter_mut().zip(u) {
                    *ni += nu[j] * ui;
                }
            }
            let offset = off + dot(&normal, &p0);
            HullFacet {
                normal,
                offset,
                points: pts,
            }
        })
        .collect();
    if r < k {
        for w in orthogonal_complement(&basis, k) {
            let off = dot(&w, &p0);
            let neg: Vec<f64> = w.iter().map(|x| -x).collect();
            facets.push(HullFacet {
                normal: w,
                offset: off,
                points: vertices.clone(),
            });
            facets.push(HullFacet {
                normal: neg,
                offset: -off,
                points: vertices.clone(),
            });
        }
    }
    Hull {
        vertices,
        facets,
        affine_dim: r,
    }
}

type LocalFacets = Vec<(Vec<f64>, f64, Vec<usize>)>;

fn hull_1d(local: &[Vec<f64>]) -> (Vec<usize>, LocalFacets) {
    let (mut lo, mut hi) = (0, 0);
    for (i, p) in local.iter().enumerate() {
        if p[0] < local[lo][0] {
            lo = i;
        }
        if p[0] > local[hi][0] {
            hi = i;
        }
    }
    let facets = vec![
        (vec![-1.0], -local[lo][0], vec![lo]),
        (vec![1.0], local[hi][0], vec![hi]),
    ];
    (vec![lo, hi], facets)
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; output counterclockwise.
fn hull_2d(local: &[Vec<f64>], tol: f64) -> (Vec<usize>, LocalFacets) {
    let mut idx: Vec<usize> = (0..local.len()).collect();
    idx.sort_by(|&a, &b| {
        local[a][0]
            .total_cmp(&local[b][0])
            .then(local[a][1].total_cmp(&local[b][1]))
    });
    let mut chain: Vec<usize> = Vec::with_capacity(2 * idx.len());
    let keep = |chain: &Vec<usize>, p: usize| -> bool {
        let n = chain.len();
        if n < 2 {
            return true;
        }
        let (o, a) = (&local[chain[n - 2]], &local[chain[n - 1]]);
        let b = &local[p];
        // left turn by more than the tolerance times the base length
        let base = norm(&sub(b, o)).max(1e-300);
        cross2(o, a, b) > tol * base
    };
    for &p in &idx {
        while !keep(&chain, p) {
            chain.pop();
        }
        chain.push(p);
    }
    let lower_len = chain.len() + 1;
    for &p in idx.iter().rev().skip(1) {
        while chain.len() >= lower_len && !keep(&chain, p) {
            chain.pop();
        }
        chain.push(p);
    }
    chain.pop();
    let n = chain.len();
    let mut facets = Vec::with_capacity(n);
    for i in 0..n {
        let a = chain[i];
        let b = chain[(i + 1) % n];
        let e = sub(&local[b], &local[a]);
        let len = norm(&e);
        let nu = vec![e[1] / len, -e[0] / len];
        let off = dot(&nu, &local[a]).max(dot(&nu, &local[b]));
        facets.push((nu, off, vec![a, b]));
    }
    (chain, facets)
}

#[derive(Clone)]
struct Tri {
    v: [usize; 3],
    n: [f64; 3],
    off: f64,
}

fn tri(local: &[Vec<f64>], a: usize, b: usize, c: usize) -> Tri {
    let (pa, pb, pc) = (&local[a], &local[b], &local[c]);
    let u = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
    let w = [pc[0] - pa[0], pc[1] - pa[1], pc[2] - pa[2]];
    let mut n = [
        u[1] * w[2] - u[2] * w[1],
        u[2] * w[0] - u[0] * w[2],
        u[0] * w[1] - u[1] * w[0],
    ];
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt().max(1e-300);
    for x in &mut n {
        *x /= len;
    }
    let off = [pa, pb, pc]
        .iter()
        .map(|p| n[0] * p[0] + n[1] * p[1] + n[2] * p[2])
        .fold(f64::NEG_INFINITY, f64::max);
    Tri { v: [a, b, c], n, off }
}

fn height(t: &Tri, p: &[f64]) -> f64 {
    t.n[0] * p[0] + t.n[1] * p[1] + t.n[2] * p[2] - t.off
}

/// Quickhull seeded by the affinely independent points `seed`. Each face
/// keeps the points above it; the farthest such point is added next and its
/// visible region is grown by adjacency, so the horizon is always a single
/// loop of edges shared by a visible and a hidden face.
fn hull_3d(local: &[Vec<f64>], seed: &[usize], tol: f64) -> (Vec<usize>, LocalFacets) {
    let [a, b, c, d] = [seed[0], seed[1], seed[2], seed[3]];
    let centroid: Vec<f64> = (0..3)
        .map(|i| (local[a][i] + local[b][i] + local[c][i] + local[d][i]) / 4.0)
        .collect();
    let mut faces: Vec<Option<Tri>> = Vec::new();
    let mut outside: Vec<Vec<usize>> = Vec::new();
    let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();

    fn add_face(
        faces: &mut Vec<Option<Tri>>,
        outside: &mut Vec<Vec<usize>>,
        edge_face: &mut HashMap<(usize, usize), usize>,
        t: Tri,
    ) -> usize {
        let id = faces.len();
        for e in 0..3 {
            edge_face.insert((t.v[e], t.v[(e + 1) % 3]), id);
        }
        faces.push(Some(t));
        outside.push(Vec::new());
        id
    }

    let mut first = Vec::new();
    for (x, y, z) in [(a, b, c), (a, b, d), (a, c, d), (b, c, d)] {
        let mut t = tri(local, x, y, z);
        if height(&t, &centroid) > 0.0 {
            t = tri(local, x, z, y);
        }
        first.push(add_face(&mut faces, &mut outside, &mut edge_face, t));
    }
    for p in (0..local.len()).filter(|i| !seed[..4].contains(i)) {
        if let Some(&f) = first
            .iter()
            .find(|&&f| height(faces[f].as_ref().expect("live face"), &local[p]) > tol)
        {
            outside[f].push(p);
        }
    }

    let mut pending: Vec<usize> = first;
    while let Some(f0) = pending.pop() {
        if faces[f0].is_none() || outside[f0].is_empty() {
            continue;
        }
        let t0 = faces[f0].as_ref().expect("live face");
        let p = *outside[f0]
            .iter()
            .max_by(|&&i, &&j| height(t0, &local[i]).total_cmp(&height(t0, &local[j])).then(j.cmp(&i)))
            .expect("nonempty outside set");
        let pt = &local[p];

        // grow the visible region from f0 across shared edges
        let mut visible = vec![f0];
        let mut seen: HashSet<usize> = HashSet::from([f0]);
        let mut i = 0;
        while i < visible.len() {
            let v = faces[visible[i]].as_ref().expect("live face").v;
            for e in 0..3 {
                let nb = edge_face[&(v[(e + 1) % 3], v[e])];
                if !seen.contains(&nb) && height(faces[nb].as_ref().expect("live face"), pt) > tol {
                    seen.insert(nb);
                    visible.push(nb);
                }
            }
            i += 1;
        }
        // absorb hidden neighbors that would make a new face fold inwards
        let horizon = loop {
            let mut horizon: Vec<(usize, usize)> = Vec::new();
            let mut folded: Vec<usize> = Vec::new();
            for &f in &visible {
                let v = faces[f].as_ref().expect("live face").v;
                for e in 0..3 {
                    let (x, y) = (v[e], v[(e + 1) % 3]);
                    let nb = edge_face[&(y, x)];
                    if seen.contains(&nb) {
                        continue;
                    }
                    let w = faces[nb].as_ref().expect("live face").v;
                    let z = w.iter().copied().find(|&q| q != x && q != y).expect("triangle");
                    if height(&tri(local, x, y, p), &local[z]) > tol {
                        folded.push(nb);
                    } else {
                        horizon.push((x, y));
                    }
                }
            }
            if folded.is_empty() {
                break horizon;
            }
            for nb in folded {
                if seen.insert(nb) {
                    visible.push(nb);
                }
            }
        };

        let mut orphans: Vec<usize> = Vec::new();
        for &f in &visible {
            let t = faces[f].take().expect("live face");
            for e in 0..3 {
                let key = (t.v[e], t.v[(e + 1) % 3]);
                if edge_face.get(&key) == Some(&f) {
                    edge_face.remove(&key);
                }
            }
            orphans.append(&mut outside[f]);
        }
        let mut created = Vec::with_capacity(horizon.len());
        for (x, y) in horizon {
            let t = tri(local, x, y, p);
            created.push(add_face(&mut faces, &mut outside, &mut edge_face, t));
        }
        for q in orphans {
            if q == p {
                continue;
            }
            if let Some(&f) = created
                .iter()
                .find(|&&f| height(faces[f].as_ref().expect("live face"), &local[q]) > tol)
            {
                outside[f].push(q);
            }
        }
        pending.extend(created.iter().copied().filter(|&f| !outside[f].is_empty()));
    }

    let tris: Vec<Tri> = faces.into_iter().flatten().collect();
    let mut vertices: Vec<usize> = tris.iter().flat_map(|t| t.v).collect();
    vertices.sort_unstable();
    vertices.dedup();

    // merge edge-adjacent coplanar triangles into facets
    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (ti, t) in tris.iter().enumerate() {
        for e in 0..3 {
            edge_owner.insert((t.v[e], t.v[(e + 1) % 3]), ti);
        }
    }
    let mut parent: Vec<usize> = (0..tris.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (ti, t) in tris.iter().enumerate() {
        for e in 0..3 {
            if let Some(&tj) = edge_owner.get(&(t.v[(e + 1) % 3], t.v[e])) {
                let s = &tris[tj];
                let dn = ((s.n[0] - t.n[0]).powi(2)
                    + (s.n[1] - t.n[1]).powi(2)
                    + (s.n[2] - t.n[2]).powi(2))
                .sqrt();
                if dn < 1e-9 && (s.off - t.off).abs() <= tol.max(1e-15) {
                    let (ri, rj) = (find(&mut parent, ti), find(&mut parent, tj));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
    }
    let mut merged: LocalFacets = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for (ti, t) in tris.iter().enumerate() {
        let root = find(&mut parent, ti);
        match slot.get(&root) {
            Some(&fi) => {
                merged[fi].1 = merged[fi].1.max(t.off);
                merged[fi].2.extend_from_slice(&t.v);
            }
            None => {
                slot.insert(root, merged.len());
                let rt = &tris[root];
                merged.push((rt.n.to_vec(), rt.off.max(t.off), t.v.to_vec()));
            }
        }
    }
    for f in &mut merged {
        f.2.sort_unstable();
        f.2.dedup();
    }
    (vertices, merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_contains(points: &[Vec<f64>], hull: &Hull, tol: f64) {
        for f in &hull.facets {
            for p in points {
                assert!(dot(&f.normal, p) <= f.offset + tol, "{p:?} violates {f:?}");
            }
        }
    }

    #[test]
    fn square_with_interior() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![0.5, 0.5],
            vec![0.5, 0.0],
        ];
        let h = convex_hull(&pts, 1e-12);
        assert_eq!(h.affine_dim, 2);
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.facets.len(), 4);
        check_contains(&pts, &h, 1e-12);
    }

    #[test]
    fn cube_corners_and_center() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vec![
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            ]);
        }
        pts.push(vec![0.0, 0.0, 0.0]);
        let h = convex_hull(&pts, 1e-12);
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        check_contains(&pts, &h, 1e-12);
    }

    #[test]
    fn flat_points_in_3d() {
        let pts = vec![
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![0.2, 0.2, 1.0],
        ];
        let h = convex_hull(&pts, 1e-12);
        assert_eq!(h.affine_dim, 2);
        assert_eq!(h.vertices.len(), 3);
        // three edges plus the two-sided slab
        assert_eq!(h.facets.len(), 5);
        check_contains(&pts, &h, 1e-12);
    }

    #[test]
    fn random_sphere_points() {
        use rand::Rng;
        let mut rng = crate::random::rng_for(3, "hull-test", 0);
        let pts: Vec<Vec<f64>> = (0..400)
            .map(|_| {
                let v: Vec<f64> = (0..3).map(|_| rng.random::<f64>() - 0.5).collect();
                let n = norm(&v);
                v.into_iter().map(|x| x / n).collect()
            })
            .collect();
        let h = convex_hull(&pts, 1e-12);
        assert_eq!(h.vertices.len(), 400);
        check_contains(&pts, &h, 1e-10);
    }

    #[test]
    fn lattice_on_cube_faces() {
        let mut pts = Vec::new();
        let g = |i: usize| -1.0 + 2.0 * i as f64 / 9.0;
        for i in 0..10 {
            for j in 0..10 {
                for s in [-1.0, 1.0] {
                    pts.push(vec![s, g(i), g(j)]);
                    pts.push(vec![g(i), s, g(j)]);
                    pts.push(vec![g(i), g(j), s]);
                }
            }
        }
        let h = convex_hull(&pts, 1e-12);
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        check_contains(&pts, &h, 1e-12);
    }

    #[test]
    fn coplanar_cap_over_sphere() {
        use rand::Rng;
        let mut rng = crate::random::rng_for(4, "hull-test", 0);
        let mut pts: Vec<Vec<f64>> = (0..600)
            .map(|_| {
                let v: Vec<f64> = (0..3).map(|_| rng.random::<f64>() - 0.5).collect();
                let n = norm(&v);
                v.into_iter().map(|x| x / n).collect()
            })
            .collect();
        // a dense planar patch cutting the sphere
        for _ in 0..400 {
            let (x, y): (f64, f64) = (rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6));
            pts.push(vec![x, y, 0.8]);
        }
        let h = convex_hull(&pts, 1e-12);
        check_contains(&pts, &h, 1e-10);
        assert!(h.facets.iter().all(|f| f.offset > 0.0));
    }
}
