//! Lagrange interpolation on Kuhn–Tucker meshes.
//!
//! [`interpolate`] builds the continuous piecewise polynomial `S*_k(f)` from
//! samples on `G_{k,r}`; [`boundary_interpolate`] builds its boundary
//! counterpart from samples on the boundary grid. Both store, for every
//! simplex, the sample values at the grid nodes in its closure, so values on
//! shared faces coincide by construction.
//!
//! The quadrature routines at the bottom compute continuous norms of such
//! interpolants; they exist to check the discrete norms against.

use std::sync::Arc;

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

use crate::error::{invalid, Error, Result};
use crate::geometry::{locate_simplex, Ambient, BoundaryGrid, SimplicialMesh, TensorGrid};
use crate::quadrature::{GaussLegendre, SimplexRule};

/// Multi-indices of `dim` variables with total degree `<= deg`, ordered by
/// degree and then with larger leading exponents first.
pub fn multi_indices(dim: usize, deg: usize) -> Vec<Vec<usize>> {
    fn fill(dim: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == dim - 1 {
            let used: usize = prefix.iter().sum();
            let mut v = prefix.clone();
            v.push(total - used);
            out.push(v);
            return;
        }
        let used: usize = prefix.iter().sum();
        for a in (0..=total - used).rev() {
            prefix.push(a);
            fill(dim, total, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=deg {
        fill(dim, total, &mut Vec::new(), &mut out);
    }
    out
}

/// Lagrange basis of `P_r` (total degree `r - 1`) on the reference simplex,
/// attached to the lattice nodes `alpha / (r - 1)`.
#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    r: usize,
    dim: usize,
    nodes: Vec<Vec<usize>>,
    exponents: Vec<Vec<usize>>,
    // coeffs[m * n + j]: coefficient of monomial m in basis function j
    coeffs: Vec<f64>,
}

impl ReferenceBasis {
    pub fn order(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Lattice multi-indices of the nodes.
    pub fn node_indices(&self) -> &[Vec<usize>] {
        &self.nodes
    }

    pub fn node_coords(&self) -> Vec<Vec<f64>> {
        let s = (self.r - 1) as f64;
        self.nodes
            .iter()
            .map(|a| a.iter().map(|&v| v as f64 / s).collect())
            .collect()
    }

    /// Values of all basis functions at `xi`.
    pub fn eval_all(&self, xi: &[f64]) -> Vec<f64> {
        let n = self.len();
        let monos: Vec<f64> = self
            .exponents
            .iter()
            .map(|e| e.iter().zip(xi).map(|(&p, &x)| x.powi(p as i32)).product())
            .collect();
        (0..n)
            .map(|j| (0..n).map(|m| self.coeffs[m * n + j] * monos[m]).sum())
            .collect()
    }

    /// `sum_j values[j] phi_j(xi)`.
    pub fn combine(&self, values: &[f64], xi: &[f64]) -> f64 {
        self.eval_all(xi).iter().zip(values).map(|(p, v)| p * v).sum()
    }
}

/// Builds the Lagrange basis by inverting the node/monomial Vandermonde
/// matrix.
pub fn reference_basis(r: usize, dim: usize) -> Result<ReferenceBasis> {
    if !(2..=6).contains(&r) {
        return invalid(format!("order r = {r} outside the supported range 2..=6"));
    }
    if !(1..=3).contains(&dim) {
        return invalid(format!("reference dimension {dim} outside 1..=3"));
    }
    let nodes = multi_indices(dim, r - 1);
    let exponents = nodes.clone();
    let n = nodes.len();
    let s = (r - 1) as f64;
    let vander = Mat::<f64>::from_fn(n, n, |i, m| {
        exponents[m]
            .iter()
            .zip(&nodes[i])
            .map(|(&p, &a)| (a as f64 / s).powi(p as i32))
            .product()
    });
    let inv = vander.partial_piv_lu().inverse();
    let mut coeffs: Vec<f64> = vec![0.0; n * n];
    for m in 0..n {
        for j in 0..n {
            coeffs[m * n + j] = inv[(m, j)];
        }
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Singular("Vandermonde system".into()));
    }
    Ok(ReferenceBasis {
        r,
        dim,
        nodes,
        exponents,
        coeffs,
    })
}

/// Continuous piecewise polynomial stored as per-simplex nodal values.
#[derive(Debug, Clone)]
pub struct PiecewisePoly {
    mesh: Arc<SimplicialMesh>,
    basis: ReferenceBasis,
    nodal_values: Vec<f64>,
}

impl PiecewisePoly {
    pub fn mesh(&self) -> &SimplicialMesh {
        &self.mesh
    }

    pub fn basis(&self) -> &ReferenceBasis {
        &self.basis
    }

    /// Nodal values of simplex `id`, in basis node order.
    pub fn nodal_values(&self, id: usize) -> &[f64] {
        let n = self.basis.len();
        &self.nodal_values[id * n..(id + 1) * n]
    }

    /// Value at reference coordinates `xi` of simplex `id`.
    pub fn eval_reference(&self, id: usize, xi: &[f64]) -> f64 {
        self.basis.combine(self.nodal_values(id), xi)
    }

    /// Value of simplex `id`'s polynomial at the ambient point `p`, without
    /// checking that `p` belongs to the simplex.
    pub fn eval_in_simplex(&self, id: usize, p: &[f64]) -> f64 {
        let xi = self.mesh.simplices()[id].affine().inverse(p);
        self.eval_reference(id, &xi)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> PiecewisePoly {
        PiecewisePoly {
            mesh: Arc::clone(&self.mesh),
            basis: self.basis.clone(),
            nodal_values: self.nodal_values.iter().map(|&v| f(v)).collect(),
        }
    }
}

fn check_compat(spec_k: u32, spec_r: usize, spec_d: usize, mesh: &SimplicialMesh, basis: &ReferenceBasis) -> Result<()> {
    if mesh.k != spec_k || mesh.d != spec_d {
        return Err(Error::ShapeMismatch(format!(
            "mesh (k={}, d={}) does not match grid (k={spec_k}, d={spec_d})",
            mesh.k, mesh.d
        )));
    }
    if basis.order() != spec_r || basis.dim() != mesh.reference_dim() {
        return Err(Error::ShapeMismatch(format!(
            "basis (r={}, dim={}) does not match grid order {spec_r} / mesh dim {}",
            basis.order(),
            basis.dim(),
            mesh.reference_dim()
        )));
    }
    Ok(())
}

/// Ambient grid multi-index of node `alpha` of a simplex with lattice
/// vertices `lattice` (units `2^-k`), in units of the grid spacing.
fn node_grid_index(lattice: &[Vec<i64>], alpha: &[usize], r: usize) -> Vec<usize> {
    let d = lattice[0].len();
    (0..d)
        .map(|a| {
            let base = (r as i64 - 1) * lattice[0][a];
            let off: i64 = alpha
                .iter()
                .enumerate()
                .map(|(i, &al)| al as i64 * (lattice[i + 1][a] - lattice[0][a]))
                .sum();
            (base + off) as usize
        })
        .collect()
}

/// `S*_k(f)` from samples of `f` on `grid`.
pub fn interpolate(
    samples: &[f64],
    grid: &TensorGrid,
    mesh: &Arc<SimplicialMesh>,
    basis: &ReferenceBasis,
) -> Result<PiecewisePoly> {
    let spec = grid.spec();
    if samples.len() != grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} samples for a grid of {} points",
            samples.len(),
            grid.len()
        )));
    }
    if mesh.ambient != Ambient::Domain {
        return invalid("interpolate needs a domain mesh");
    }
    check_compat(spec.k, spec.r, spec.d, mesh, basis)?;
    let mut nodal_values = Vec::with_capacity(mesh.len() * basis.len());
    for s in mesh.simplices() {
        for alpha in basis.node_indices() {
            let multi = node_grid_index(s.lattice_vertices(), alpha, spec.r);
            nodal_values.push(samples[spec.linear_index(&multi)]);
        }
    }
    Ok(PiecewisePoly {
        mesh: Arc::clone(mesh),
        basis: basis.clone(),
        nodal_values,
    })
}

/// `S̄_k(g)` from samples of `g` on the boundary grid.
pub fn boundary_interpolate(
    samples: &[f64],
    grid: &BoundaryGrid,
    mesh: &Arc<SimplicialMesh>,
    basis: &ReferenceBasis,
) -> Result<PiecewisePoly> {
    let spec = grid.spec();
    if samples.len() != grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} samples for a boundary grid of {} points",
            samples.len(),
            grid.len()
        )));
    }
    if mesh.ambient != Ambient::Boundary {
        return invalid("boundary_interpolate needs a boundary mesh");
    }
    check_compat(spec.k, spec.r, spec.d, mesh, basis)?;
    let mut nodal_values = Vec::with_capacity(mesh.len() * basis.len());
    for s in mesh.simplices() {
        for alpha in basis.node_indices() {
            let multi = node_grid_index(s.lattice_vertices(), alpha, spec.r);
            let parent = spec.linear_index(&multi);
            let b = grid
                .boundary_index(parent)
                .ok_or_else(|| Error::ShapeMismatch("boundary node not in boundary grid".into()))?;
            nodal_values.push(samples[b]);
        }
    }
    Ok(PiecewisePoly {
        mesh: Arc::clone(mesh),
        basis: basis.clone(),
        nodal_values,
    })
}

/// Value of `pp` at `p`, using the owner simplex of [`locate_simplex`].
pub fn eval(pp: &PiecewisePoly, p: &[f64]) -> Result<f64> {
    let id = locate_simplex(&pp.mesh, p)?;
    Ok(pp.eval_in_simplex(id, p))
}

/// `(sum_T int_T |pp - f|^tau)^{1/tau}` with a collapsed Gauss rule of
/// `order` points per direction on each simplex.
pub fn quad_error_lp(
    pp: &PiecewisePoly,
    f: impl Fn(&[f64]) -> f64,
    tau: f64,
    order: usize,
) -> Result<f64> {
    if !(tau >= 1.0) || !tau.is_finite() {
        return invalid(format!("exponent tau = {tau} must be finite and >= 1"));
    }
    let rule = SimplexRule::collapsed(pp.mesh.reference_dim(), order)?;
    let basis_at: Vec<Vec<f64>> = rule.points.iter().map(|xi| pp.basis.eval_all(xi)).collect();
    let mut total = 0.0;
    for (id, s) in pp.mesh.simplices().iter().enumerate() {
        let vals = pp.nodal_values(id);
        let jac = s.affine().jacobian_det().abs();
        let mut acc = 0.0;
        for ((xi, w), phi) in rule.points.iter().zip(&rule.weights).zip(&basis_at) {
            let v: f64 = phi.iter().zip(vals).map(|(a, b)| a * b).sum();
            let x = s.affine().forward(xi);
            acc += w * (v - f(&x)).abs().powf(tau);
        }
        total += acc * jac;
    }
    Ok(total.powf(1.0 / tau))
}

/// Continuous `L_tau` norm of `pp` by simplex quadrature.
pub fn quad_norm_lp(pp: &PiecewisePoly, tau: f64, order: usize) -> Result<f64> {
    quad_error_lp(pp, |_| 0.0, tau, order)
}

/// Max of `|pp - f|` over a fixed lattice of `per_edge + 1` points per edge
/// (plus barycenter) in each simplex.
pub fn sampled_sup_error(pp: &PiecewisePoly, f: impl Fn(&[f64]) -> f64, per_edge: usize) -> f64 {
    let dim = pp.mesh.reference_dim();
    let mut refs: Vec<Vec<f64>> = multi_indices(dim, per_edge.max(1))
        .into_iter()
        .map(|a| a.iter().map(|&v| v as f64 / per_edge.max(1) as f64).collect())
        .collect();
    refs.push(vec![1.0 / (dim + 1) as f64; dim]);
    let basis_at: Vec<Vec<f64>> = refs.iter().map(|xi| pp.basis.eval_all(xi)).collect();
    let mut worst: f64 = 0.0;
    for (id, s) in pp.mesh.simplices().iter().enumerate() {
        let vals = pp.nodal_values(id);
        for (xi, phi) in refs.iter().zip(&basis_at) {
            let v: f64 = phi.iter().zip(vals).map(|(a, b)| a * b).sum();
            let x = s.affine().forward(xi);
            worst = worst.max((v - f(&x)).abs());
        }
    }
    worst
}

/// Gauss points per direction on each panel-pair square.
const H12_GAUSS: usize = 8;
/// Maximum dyadic refinement depth toward the singular set.
const H12_MAX_LEVEL: usize = 14;

#[derive(Clone, Copy)]
enum Singular {
    None,
    Diagonal,
    Point(f64, f64),
}

struct Panel {
    id: usize,
    a: [f64; 2],
    b: [f64; 2],
    len: f64,
}

/// Intrinsic `H^{1/2}` seminorm of a boundary interpolant on `∂(0,1)^2`:
/// `(∫∫ |g(z) - g(z')|^2 / |z - z'|^2 dz dz')^{1/2}`.
///
/// Panel pairs are integrated with tensor Gauss rules; squares touching the
/// diagonal (same panel) or a shared vertex are refined dyadically. The
/// refinement depth grows until two successive totals agree to `tol`.
pub fn quad_h12_seminorm(bpp: &PiecewisePoly, tol: f64) -> Result<f64> {
    let mesh = bpp.mesh();
    if mesh.d != 2 || mesh.ambient != Ambient::Boundary {
        return invalid("the H^1/2 quadrature oracle supports boundary meshes of the unit square only");
    }
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    let panels: Vec<Panel> = mesh
        .simplices()
        .iter()
        .enumerate()
        .map(|(id, s)| {
            let v = s.vertices();
            let a = [v[0].coords()[0], v[0].coords()[1]];
            let b = [v[1].coords()[0], v[1].coords()[1]];
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            Panel { id, a, b, len }
        })
        .collect();
    let gs = GaussLegendre::new(H12_GAUSS)?;
    let gt = GaussLegendre::new(H12_GAUSS + 1)?;
    let same = |x: [f64; 2], y: [f64; 2]| x[0] == y[0] && x[1] == y[1];
    let classify = |p: &Panel, q: &Panel| -> Singular {
        if p.id == q.id {
            return Singular::Diagonal;
        }
        for (sp, pp) in [(0.0, p.a), (1.0, p.b)] {
            for (tq, qq) in [(0.0, q.a), (1.0, q.b)] {
                if same(pp, qq) {
                    return Singular::Point(sp, tq);
                }
            }
        }
        Singular::None
    };
    let total_at = |level: usize| -> f64 {
        let mut total = 0.0;
        for p in &panels {
            for q in &panels {
                let sing = classify(p, q);
                total += pair_integral(bpp, p, q, sing, (0.0, 1.0, 0.0, 1.0), level, &gs, &gt)
                    * p.len
                    * q.len;
            }
        }
        total
    };
    let mut prev = total_at(0);
    for level in 1..=H12_MAX_LEVEL {
        let cur = total_at(level);
        if (cur - prev).abs() <= tol * cur.abs() || (cur == 0.0 && prev == 0.0) {
            return Ok(cur.max(0.0).sqrt());
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!(
        "H^1/2 seminorm not within tol {tol} after {H12_MAX_LEVEL} refinement levels"
    )))
}

#[allow(clippy::too_many_arguments)]
fn pair_integral(
    bpp: &PiecewisePoly,
    p: &Panel,
    q: &Panel,
    sing: Singular,
    square: (f64, f64, f64, f64),
    depth: usize,
    gs: &GaussLegendre,
    gt: &GaussLegendre,
) -> f64 {
    let (s0, s1, t0, t1) = square;
    let touches = match sing {
        Singular::None => false,
        Singular::Diagonal => s0 < t1 && t0 < s1,
        Singular::Point(ss, tt) => (s0..=s1).contains(&ss) && (t0..=t1).contains(&tt),
    };
    if touches && depth > 0 {
        let sm = 0.5 * (s0 + s1);
        let tm = 0.5 * (t0 + t1);
        return [
            (s0, sm, t0, tm),
            (sm, s1, t0, tm),
            (s0, sm, tm, t1),
            (sm, s1, tm, t1),
        ]
        .into_iter()
        .map(|sq| pair_integral(bpp, p, q, sing, sq, depth - 1, gs, gt))
        .sum();
    }
    let mut acc = 0.0;
    for (&us, &ws) in gs.nodes.iter().zip(&gs.weights) {
        let s = s0 + (s1 - s0) * us;
        let zs = [p.a[0] + s * (p.b[0] - p.a[0]), p.a[1] + s * (p.b[1] - p.a[1])];
        let gz = bpp.eval_reference(p.id, &[s]);
        for (&ut, &wt) in gt.nodes.iter().zip(&gt.weights) {
            let t = t0 + (t1 - t0) * ut;
            let zt = [q.a[0] + t * (q.b[0] - q.a[0]), q.a[1] + t * (q.b[1] - q.a[1])];
            let dist2 = (zs[0] - zt[0]).powi(2) + (zs[1] - zt[1]).powi(2);
            if dist2 == 0.0 {
                continue;
            }
            let diff = gz - bpp.eval_reference(q.id, &[t]);
            acc += ws * wt * diff * diff / dist2;
        }
    }
    acc * (s1 - s0) * (t1 - t0)
}
