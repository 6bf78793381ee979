//! Tensor collocation grids on the closed unit cube and Kuhn–Tucker
//! simplicial meshes of its dyadic partitions (and of the cube's boundary).
//!
//! Grid points are stored in lexicographic order with the first coordinate
//! most significant. Simplex vertices are also kept as integer lattice
//! coordinates in units of `2^-k`, so mapping reference nodes onto grid nodes
//! never goes through floating point.

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use itertools::Itertools;

use crate::error::{invalid, Error, Result};

/// Tolerance used when deciding whether a coordinate sits on a cube face.
pub const FACE_TOL: f64 = 1e-12;

/// A point of the closed unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::OutsideAmbient(coords));
        }
        Ok(Point(coords))
    }

    pub(crate) fn from_vec(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// True when at least one coordinate equals 0 or 1.
    pub fn on_boundary(&self) -> bool {
        self.0.iter().any(|&c| c == 0.0 || c == 1.0)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Level, order and dimension of a structured grid `G_{k,r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub k: u32,
    pub r: usize,
    pub d: usize,
}

impl GridSpec {
    pub fn new(k: u32, r: usize, d: usize) -> Result<Self> {
        if r < 2 {
            return invalid(format!("order r = {r} must be >= 2"));
        }
        if d < 2 {
            return invalid(format!("dimension d = {d} must be >= 2"));
        }
        if k > 20 {
            return invalid(format!("level k = {k} is too large"));
        }
        Ok(GridSpec { k, r, d })
    }

    /// Number of dyadic intervals per axis, `2^k`.
    pub fn cells_per_axis(&self) -> usize {
        1usize << self.k
    }

    /// Points per axis, `2^k (r-1) + 1`.
    pub fn per_axis(&self) -> usize {
        self.cells_per_axis() * (self.r - 1) + 1
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.cells_per_axis() * (self.r - 1)) as f64
    }

    pub fn m_tilde(&self) -> usize {
        self.per_axis().pow(self.d as u32)
    }

    pub fn m_bar(&self) -> usize {
        let n = self.per_axis();
        n.pow(self.d as u32) - (n - 2).pow(self.d as u32)
    }

    /// Coordinate of per-axis node `j`.
    pub fn coord(&self, j: usize) -> f64 {
        j as f64 / (self.per_axis() - 1) as f64
    }

    /// Lexicographic linear index of a per-axis multi-index.
    pub fn linear_index(&self, multi: &[usize]) -> usize {
        let n = self.per_axis();
        multi.iter().fold(0, |acc, &j| acc * n + j)
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let n = self.per_axis();
        let mut out = vec![0; self.d];
        for a in (0..self.d).rev() {
            out[a] = idx % n;
            idx /= n;
        }
        out
    }
}

/// The tensor grid `G_{k,r}` of the closed unit cube.
#[derive(Debug, Clone)]
pub struct TensorGrid {
    spec: GridSpec,
    points: Vec<Point>,
}

impl TensorGrid {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn m_tilde(&self) -> usize {
        self.points.len()
    }

    pub fn per_axis(&self) -> usize {
        self.spec.per_axis()
    }

    /// Samples a function at every grid point, in grid order.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        self.points.iter().map(|p| f(p.coords())).collect()
    }
}

/// Builds `G_{k,r}` with per-axis coordinates `j 2^-k / (r-1)`.
pub fn interior_grid(k: u32, r: usize, d: usize) -> Result<TensorGrid> {
    let spec = GridSpec::new(k, r, d)?;
    let n = spec.per_axis();
    let points = (0..spec.m_tilde())
        .map(|idx| {
            let multi = spec.multi_index(idx);
            Point::from_vec(multi.iter().map(|&j| spec.coord(j)).collect())
        })
        .collect::<Vec<_>>();
    debug_assert_eq!(points.len(), n.pow(d as u32));
    Ok(TensorGrid { spec, points })
}

/// The boundary part of `G_{k,r}`, kept in parent order.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    spec: GridSpec,
    points: Vec<Point>,
    parent_indices: Vec<usize>,
    lookup: Vec<Option<usize>>,
}

impl BoundaryGrid {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn m_bar(&self) -> usize {
        self.points.len()
    }

    /// Index into the parent tensor grid of each boundary point.
    pub fn parent_indices(&self) -> &[usize] {
        &self.parent_indices
    }

    /// Boundary index of a parent-grid index, if that node is on the boundary.
    pub fn boundary_index(&self, parent: usize) -> Option<usize> {
        self.lookup.get(parent).copied().flatten()
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        self.points.iter().map(|p| f(p.coords())).collect()
    }
}

pub fn boundary_grid(k: u32, r: usize, d: usize) -> Result<BoundaryGrid> {
    let spec = GridSpec::new(k, r, d)?;
    let n = spec.per_axis();
    let mut points = Vec::with_capacity(spec.m_bar());
    let mut parent_indices = Vec::with_capacity(spec.m_bar());
    let mut lookup = vec![None; spec.m_tilde()];
    for (idx, slot) in lookup.iter_mut().enumerate() {
        let multi = spec.multi_index(idx);
        if multi.iter().any(|&j| j == 0 || j == n - 1) {
            *slot = Some(points.len());
            parent_indices.push(idx);
            points.push(Point::from_vec(multi.iter().map(|&j| spec.coord(j)).collect()));
        }
    }
    Ok(BoundaryGrid {
        spec,
        points,
        parent_indices,
        lookup,
    })
}

/// Which set a mesh triangulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    Domain,
    Boundary,
}

/// A `(d-1)`-face of the unit cube: `x[axis] == side`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub axis: usize,
    pub side: u8,
}

/// Affine map from the reference simplex onto a mesh simplex, written in the
/// chart coordinates `chart` (all axes for the domain, the free axes of the
/// face for the boundary).
#[derive(Debug, Clone)]
pub struct AffineMap {
    chart: Vec<usize>,
    origin: Vec<f64>,
    // column i is v_{i+1} - v_0 restricted to the chart, row-major n x n
    matrix: Vec<f64>,
    inverse: Vec<f64>,
    det: f64,
}

impl AffineMap {
    fn new(chart: Vec<usize>, vertices: &[Vec<f64>]) -> Result<Self> {
        let n = chart.len();
        let origin = vertices[0].clone();
        let mut matrix = vec![0.0; n * n];
        for (row, &axis) in chart.iter().enumerate() {
            for col in 0..n {
                matrix[row * n + col] = vertices[col + 1][axis] - origin[axis];
            }
        }
        let m = Mat::<f64>::from_fn(n, n, |i, j| matrix[i * n + j]);
        let lu = m.partial_piv_lu();
        let det = m.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Singular("degenerate simplex".into()));
        }
        let inv = lu.inverse();
        let mut inverse = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                inverse[i * n + j] = inv[(i, j)];
            }
        }
        Ok(AffineMap {
            chart,
            origin,
            matrix,
            inverse,
            det,
        })
    }

    pub fn reference_dim(&self) -> usize {
        self.chart.len()
    }

    pub fn chart(&self) -> &[usize] {
        &self.chart
    }

    pub fn jacobian_det(&self) -> f64 {
        self.det
    }

    /// `F_T(xi)` in ambient coordinates.
    pub fn forward(&self, xi: &[f64]) -> Vec<f64> {
        let n = self.chart.len();
        let mut x = self.origin.clone();
        for (row, &axis) in self.chart.iter().enumerate() {
            x[axis] += (0..n).map(|c| self.matrix[row * n + c] * xi[c]).sum::<f64>();
        }
        x
    }

    /// `F_T^{-1}(x)`; ambient coordinates off the chart are ignored.
    pub fn inverse(&self, x: &[f64]) -> Vec<f64> {
        let n = self.chart.len();
        let rhs: Vec<f64> = self.chart.iter().map(|&a| x[a] - self.origin[a]).collect();
        (0..n)
            .map(|i| (0..n).map(|j| self.inverse[i * n + j] * rhs[j]).sum())
            .collect()
    }
}

/// One Kuhn–Tucker simplex of a dyadic cube (or of a dyadic face square).
#[derive(Debug, Clone)]
pub struct Simplex {
    pub cube_index: Vec<usize>,
    /// Ordering of the chart axes, `t[perm[0]] <= t[perm[1]] <= ...`, in
    /// indices local to the chart.
    pub perm: Vec<usize>,
    pub face: Option<Face>,
    lattice: Vec<Vec<i64>>,
    vertices: Vec<Point>,
    affine: AffineMap,
}

impl Simplex {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Vertices in ambient lattice units of `2^-k`.
    pub fn lattice_vertices(&self) -> &[Vec<i64>] {
        &self.lattice
    }

    pub fn affine(&self) -> &AffineMap {
        &self.affine
    }

    pub fn reference_dim(&self) -> usize {
        self.affine.reference_dim()
    }

    pub fn volume(&self) -> f64 {
        let n = self.reference_dim();
        self.affine.det.abs() / (1..=n).product::<usize>() as f64
    }

    /// Barycentric coordinates `(1 - sum xi, xi_1, ..., xi_n)`.
    pub fn barycentric(&self, x: &[f64]) -> Vec<f64> {
        let xi = self.affine.inverse(x);
        let mut out = Vec::with_capacity(xi.len() + 1);
        out.push(1.0 - xi.iter().sum::<f64>());
        out.extend(xi);
        out
    }
}

/// Kuhn–Tucker triangulation of the level-`k` dyadic partition of the cube
/// or of its boundary.
#[derive(Debug, Clone)]
pub struct SimplicialMesh {
    pub k: u32,
    pub d: usize,
    pub ambient: Ambient,
    simplices: Vec<Simplex>,
    perms: Vec<Vec<usize>>,
}

impl SimplicialMesh {
    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn reference_dim(&self) -> usize {
        match self.ambient {
            Ambient::Domain => self.d,
            Ambient::Boundary => self.d - 1,
        }
    }

    /// Expected simplex count for this mesh kind.
    pub fn expected_count(k: u32, d: usize, ambient: Ambient) -> usize {
        let fact = |n: usize| (1..=n).product::<usize>();
        match ambient {
            Ambient::Domain => fact(d) * (1usize << (k as usize * d)),
            Ambient::Boundary => 2 * d * fact(d - 1) * (1usize << (k as usize * (d - 1))),
        }
    }
}

fn faces(d: usize) -> Vec<Face> {
    (0..d)
        .flat_map(|axis| [0u8, 1].map(|side| Face { axis, side }))
        .collect()
}

fn lexicographic_rank(perm: &[usize]) -> usize {
    let n = perm.len();
    let mut rank = 0;
    let mut fact = (1..n).product::<usize>();
    for i in 0..n {
        let smaller = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count();
        rank += smaller * fact;
        if i + 1 < n {
            fact /= n - 1 - i;
        }
    }
    rank
}

/// Vertices (chart-local lattice offsets) of the Kuhn simplex
/// `{t[perm[0]] <= ... <= t[perm[n-1]]}` of the unit cube.
fn kuhn_offsets(perm: &[usize]) -> Vec<Vec<i64>> {
    let n = perm.len();
    let mut current = vec![0i64; n];
    let mut out = vec![current.clone()];
    for &axis in perm.iter().rev() {
        current[axis] = 1;
        out.push(current.clone());
    }
    out
}

pub fn kuhn_tucker_mesh(k: u32, d: usize, ambient: Ambient) -> Result<SimplicialMesh> {
    if d < 2 {
        return invalid(format!("dimension d = {d} must be >= 2"));
    }
    if k > 16 {
        return invalid(format!("level k = {k} is too large"));
    }
    let cells = 1usize << k;
    let h = 1.0 / cells as f64;
    let top = cells as i64;
    let n_ref = match ambient {
        Ambient::Domain => d,
        Ambient::Boundary => d - 1,
    };
    let perms: Vec<Vec<usize>> = (0..n_ref).permutations(n_ref).collect();
    let charts: Vec<(Option<Face>, Vec<usize>)> = match ambient {
        Ambient::Domain => vec![(None, (0..d).collect())],
        Ambient::Boundary => faces(d)
            .into_iter()
            .map(|f| (Some(f), (0..d).filter(|&a| a != f.axis).collect()))
            .collect(),
    };
    let mut simplices = Vec::with_capacity(SimplicialMesh::expected_count(k, d, ambient));
    for (face, chart) in charts {
        for cube in (0..n_ref).map(|_| 0..cells).multi_cartesian_product() {
            for perm in &perms {
                let lattice: Vec<Vec<i64>> = kuhn_offsets(perm)
                    .into_iter()
                    .map(|off| {
                        let mut v = vec![0i64; d];
                        if let Some(f) = face {
                            v[f.axis] = if f.side == 0 { 0 } else { top };
                        }
                        for (c, &axis) in chart.iter().enumerate() {
                            v[axis] = cube[c] as i64 + off[c];
                        }
                        v
                    })
                    .collect();
                let coords: Vec<Vec<f64>> = lattice
                    .iter()
                    .map(|v| v.iter().map(|&c| c as f64 * h).collect())
                    .collect();
                let affine = AffineMap::new(chart.clone(), &coords)?;
                simplices.push(Simplex {
                    cube_index: cube.clone(),
                    perm: perm.clone(),
                    face,
                    lattice,
                    vertices: coords.into_iter().map(Point::from_vec).collect(),
                    affine,
                });
            }
        }
    }
    Ok(SimplicialMesh {
        k,
        d,
        ambient,
        simplices,
        perms,
    })
}

/// Deterministic owner simplex of `p`.
///
/// The cube is chosen with half-open intervals `[(j-1)2^-k, j 2^-k)`, the
/// top face folded into the last cube. The permutation is the stable
/// ascending sort of the local coordinates, so ties resolve to the
/// lexicographically smallest permutation. On the boundary, the first face
/// (ordered by axis, then side 0 before 1) containing `p` owns it.
pub fn locate_simplex(mesh: &SimplicialMesh, p: &[f64]) -> Result<usize> {
    if p.len() != mesh.d {
        return Err(Error::DimensionMismatch {
            expected: mesh.d,
            got: p.len(),
        });
    }
    if p.iter().any(|&c| !(-FACE_TOL..=1.0 + FACE_TOL).contains(&c)) {
        return Err(Error::OutsideAmbient(p.to_vec()));
    }
    let cells = 1usize << mesh.k;
    let fact = (1..=mesh.reference_dim()).product::<usize>();
    let (offset, chart): (usize, Vec<usize>) = match mesh.ambient {
        Ambient::Domain => (0, (0..mesh.d).collect()),
        Ambient::Boundary => {
            let (pos, face) = faces(mesh.d)
                .into_iter()
                .enumerate()
                .find(|(_, f)| {
                    let target = if f.side == 0 { 0.0 } else { 1.0 };
                    (p[f.axis] - target).abs() <= FACE_TOL
                })
                .ok_or_else(|| Error::OutsideAmbient(p.to_vec()))?;
            let per_face = cells.pow((mesh.d - 1) as u32) * fact;
            (
                pos * per_face,
                (0..mesh.d).filter(|&a| a != face.axis).collect(),
            )
        }
    };
    let mut cube_lin = 0;
    let mut local = Vec::with_capacity(chart.len());
    for &axis in &chart {
        let scaled = p[axis].clamp(0.0, 1.0) * cells as f64;
        let j = (scaled.floor() as usize).min(cells - 1);
        cube_lin = cube_lin * cells + j;
        local.push(scaled - j as f64);
    }
    let mut perm: Vec<usize> = (0..chart.len()).collect();
    perm.sort_by(|&a, &b| local[a].total_cmp(&local[b]));
    let id = offset + cube_lin * fact + lexicographic_rank(&perm);
    debug_assert_eq!(mesh.simplices[id].perm, perm);
    debug_assert_eq!(mesh.perms[lexicographic_rank(&perm)], perm);
    Ok(id)
}
