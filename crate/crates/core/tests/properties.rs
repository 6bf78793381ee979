use std::sync::Arc;

use proptest::prelude::*;

use consistent_pinns::adnet::{init, param_jacobian, Architecture};
use consistent_pinns::experiments::{make_problem, read_csv, table_csv, ProblemId, ResultRow};
use consistent_pinns::geometry::{
    boundary_grid, interior_grid, kuhn_tucker_mesh, locate_simplex, Ambient, Point,
};
use consistent_pinns::interp::{boundary_interpolate, eval, interpolate, reference_basis};
use consistent_pinns::loss::{CollocationData, FieldOracle, LossVariant};
use consistent_pinns::norms::{discrete_h12_norm, discrete_lp, kernel_row_max, SampledField};
use consistent_pinns::optim::PseudoInverse;
use consistent_pinns::rates::{expected_rate, measure_rate, NormKind, RateQuery, SmoothnessClass};
use faer::Mat;

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn boundary_sites(k: u32, d: usize) -> Vec<Point> {
    boundary_grid(k, 2, d).unwrap().points().to_vec()
}

fn field_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

#[test]
fn grid_counts_by_enumeration() {
    for k in 0..=2u32 {
        for r in 2..=4usize {
            for d in 2..=3usize {
                let n = (1usize << k) * (r - 1) + 1;
                let grid = interior_grid(k, r, d).unwrap();
                assert_eq!(grid.len(), n.pow(d as u32));
                let on_bnd = grid.points().iter().filter(|p| p.on_boundary()).count();
                let b = boundary_grid(k, r, d).unwrap();
                assert_eq!(b.len(), n.pow(d as u32) - (n - 2).pow(d as u32));
                assert_eq!(b.len(), on_bnd);
            }
        }
    }
}

#[test]
fn mesh_volumes_partition_the_cube() {
    for d in 2..=3 {
        for k in 0..=2 {
            let mesh = kuhn_tucker_mesh(k, d, Ambient::Domain).unwrap();
            let total: f64 = mesh.simplices().iter().map(|s| s.volume()).sum();
            assert!((total - 1.0).abs() < 1e-12, "d={d} k={k}: {total}");
        }
    }
}

#[test]
fn node_incidence_matches_polynomial_dimension() {
    for d in 2..=3 {
        for r in 2..=4 {
            let k = 1;
            let grid = interior_grid(k, r, d).unwrap();
            let mesh = kuhn_tucker_mesh(k, d, Ambient::Domain).unwrap();
            for s in mesh.simplices() {
                let count = grid
                    .points()
                    .iter()
                    .filter(|p| s.barycentric(p.coords()).iter().all(|&b| b >= -1e-12))
                    .count();
                assert_eq!(count, binom(r - 1 + d, d), "d={d} r={r}");
            }
        }
    }
}

#[test]
fn kernel_row_bound_scales_with_lambda() {
    for d in 2..=3usize {
        let scaled = |k: u32| {
            let sites = boundary_sites(k, d);
            let m = sites.len() as f64;
            kernel_row_max(&sites, d).unwrap() / m.powf(1.0 / (d as f64 - 1.0))
        };
        let base = scaled(1);
        let top = if d == 2 { 5 } else { 4 };
        for k in 2..=top {
            assert!(scaled(k) <= 2.0 * base, "d={d} k={k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn located_simplex_contains_point(x in 0.0f64..=1.0, y in 0.0f64..=1.0, z in 0.0f64..=1.0, k in 0u32..4) {
        for (d, p) in [(2, vec![x, y]), (3, vec![x, y, z])] {
            let mesh = kuhn_tucker_mesh(k, d, Ambient::Domain).unwrap();
            let id = locate_simplex(&mesh, &p).unwrap();
            let bary = mesh.simplices()[id].barycentric(&p);
            prop_assert!(bary.iter().all(|&b| (-1e-12..=1.0 + 1e-12).contains(&b)));
        }
    }

    #[test]
    fn trace_of_interpolant_is_boundary_interpolant(
        t in 0.0f64..=1.0,
        face in 0usize..4,
        c in prop::array::uniform4(-2.0f64..2.0),
        r in 2usize..4,
    ) {
        let (k, d) = (2, 2);
        let v = |p: &[f64]| (c[0] * p[0]).sin() + c[1] * p[1] * p[1] + c[2] * p[0] * p[1] + c[3];
        let grid = interior_grid(k, r, d).unwrap();
        let bgrid = boundary_grid(k, r, d).unwrap();
        let mesh = Arc::new(kuhn_tucker_mesh(k, d, Ambient::Domain).unwrap());
        let bmesh = Arc::new(kuhn_tucker_mesh(k, d, Ambient::Boundary).unwrap());
        let pp = interpolate(&grid.sample(v), &grid, &mesh, &reference_basis(r, d).unwrap()).unwrap();
        let bpp = boundary_interpolate(&bgrid.sample(v), &bgrid, &bmesh, &reference_basis(r, d - 1).unwrap()).unwrap();
        let p = match face {
            0 => [0.0, t],
            1 => [1.0, t],
            2 => [t, 0.0],
            _ => [t, 1.0],
        };
        prop_assert!((eval(&pp, &p).unwrap() - eval(&bpp, &p).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn discrete_lp_is_a_norm(
        a in field_strategy(12),
        b in field_strategy(12),
        s in -5.0f64..5.0,
        tau in prop::sample::select(vec![1.0, 1.1, 1.2, 2.0, 3.5, f64::INFINITY]),
    ) {
        let sites = boundary_sites(2, 2)[..12].to_vec();
        let fa = SampledField::new(sites.clone(), a.clone()).unwrap();
        let fb = SampledField::new(sites.clone(), b.clone()).unwrap();
        let sum = fa.with_values(a.iter().zip(&b).map(|(x, y)| x + y).collect()).unwrap();
        let scaled = fa.with_values(a.iter().map(|x| s * x).collect()).unwrap();
        let na = discrete_lp(&fa, tau).unwrap();
        prop_assert!((discrete_lp(&scaled, tau).unwrap() - s.abs() * na).abs() <= 1e-12 * (1.0 + na * s.abs()));
        prop_assert!(discrete_lp(&sum, tau).unwrap() <= na + discrete_lp(&fb, tau).unwrap() + 1e-12);
    }

    #[test]
    fn discrete_h12_is_a_norm(a in field_strategy(16), b in field_strategy(16), s in -5.0f64..5.0) {
        let sites = boundary_sites(2, 2);
        let fa = SampledField::new(sites.clone(), a.clone()).unwrap();
        let fb = SampledField::new(sites.clone(), b.clone()).unwrap();
        let sum = fa.with_values(a.iter().zip(&b).map(|(x, y)| x + y).collect()).unwrap();
        let scaled = fa.with_values(a.iter().map(|x| s * x).collect()).unwrap();
        let na = discrete_h12_norm(&fa, 2).unwrap();
        prop_assert!((discrete_h12_norm(&scaled, 2).unwrap() - s.abs() * na).abs() <= 1e-12 * (1.0 + na * s.abs()));
        prop_assert!(discrete_h12_norm(&sum, 2).unwrap() <= na + discrete_h12_norm(&fb, 2).unwrap() + 1e-12);
    }

    #[test]
    fn holder_monotonicity(a in field_strategy(20), t1 in 1.0f64..4.0, t2 in 1.0f64..4.0) {
        let sites = boundary_sites(3, 2)[..20].to_vec();
        let f = SampledField::new(sites, a).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let a = discrete_lp(&f, lo).unwrap();
        prop_assert!(a <= discrete_lp(&f, hi).unwrap() * (1.0 + 1e-12));
        prop_assert!(discrete_lp(&f, hi).unwrap() <= discrete_lp(&f, f64::INFINITY).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn losses_vanish_only_at_zero_residuals(site in 0usize..25, bump in prop::sample::select(vec![-1e-3, 1e-3, 0.5])) {
        let p = make_problem(ProblemId::Exp2);
        let exact = CollocationData::uniform(5, 2, |x| p.f(x), |x| p.g(x)).unwrap();
        let variants = [
            LossVariant::OriginalWeighted { lambda: 16.0 },
            LossVariant::ConsistentTau { tau: 1.1 },
            LossVariant::ConsistentTau { tau: 2.0 },
            LossVariant::LStar,
        ];
        let res = exact.residuals(&p);
        for v in &variants {
            prop_assert!(v.evaluate(&res, &exact).unwrap() < 1e-20);
        }
        let mut shifted = exact.clone();
        shifted.interior.values[site] += bump;
        let res = shifted.residuals(&p);
        for v in &variants {
            prop_assert!(v.evaluate(&res, &shifted).unwrap() > 0.0);
        }
        let mut shifted = exact.clone();
        shifted.boundary.values[site % 16] += bump;
        let res = shifted.residuals(&p);
        for v in &variants {
            prop_assert!(v.evaluate(&res, &shifted).unwrap() > 0.0);
        }
    }

    #[test]
    fn rates_monotone(s in 2.0f64..5.0, ds in 0.0f64..2.0, p in 1.0f64..2.0, dp in 0.0f64..0.5, d in 2usize..4) {
        let norms = [NormKind::C, NormKind::Lp(1.5), NormKind::H1, NormKind::HMinus1, NormKind::H12Boundary];
        prop_assume!(s > d as f64 / p);
        for norm in norms {
            let rate = |s: f64, p: f64| {
                let class = SmoothnessClass::new(s, p, f64::INFINITY, d).unwrap();
                expected_rate(&RateQuery { norm, class }).unwrap().exponent
            };
            // larger s, and smaller 1/p (larger p), never lower the rate
            prop_assert!(rate(s + ds, p) >= rate(s, p) - 1e-15);
            prop_assert!(rate(s, (p + dp).min(2.0)) >= rate(s, p) - 1e-15);
        }
    }

    #[test]
    fn hminus1_rate_independent_of_large_p(s in 2.0f64..5.0, p in 2.0f64..50.0, d in 2usize..5) {
        let delta = 1.0 / (0.5 + 1.0 / d as f64);
        prop_assume!(p >= delta && s > d as f64 / p);
        let class = SmoothnessClass::new(s, p, f64::INFINITY, d).unwrap();
        let r = expected_rate(&RateQuery { norm: NormKind::HMinus1, class }).unwrap();
        prop_assert!((r.exponent - s / d as f64).abs() < 1e-14);
    }

    #[test]
    fn geometric_errors_give_their_slope(c in 0.1f64..10.0, order in 0.5f64..4.0) {
        let errs: Vec<(u32, f64)> = (2..6).map(|k| (k, c * 2f64.powf(-order * k as f64))).collect();
        prop_assert!((measure_rate(&errs).unwrap() - order).abs() < 1e-10);
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(
        (1usize..5000, 1usize..500, prop::sample::select(vec!["original", "weighted", "consistent-gamma", "consistent-l2"]),
         0u64..1000, 0.0f64..1.0, 0.0f64..1e6, 0.0f64..1e4),
        1..8,
    )) {
        let rows: Vec<ResultRow> = rows
            .into_iter()
            .map(|(m_tilde, m_bar, loss, seed, rel_h1_error, final_loss, wall_s)| ResultRow {
                m_tilde, m_bar, loss: loss.into(), seed, rel_h1_error, final_loss, wall_s,
            })
            .collect();
        prop_assert_eq!(read_csv(table_csv(&rows).unwrap().as_bytes()).unwrap(), rows);
    }

    #[test]
    fn network_jets_and_jacobians_are_deterministic(seed in 0u64..1000, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let arch = Architecture::new(2, 2, 4).unwrap();
        let (a, b) = (init(arch, seed), init(arch, seed));
        let (ja, jb) = (a.eval_jet2(&[x, y]).unwrap(), b.eval_jet2(&[x, y]).unwrap());
        prop_assert_eq!(ja.value.to_bits(), jb.value.to_bits());
        prop_assert_eq!(ja.lap.to_bits(), jb.lap.to_bits());
        let p = make_problem(ProblemId::Exp1);
        let data = CollocationData::uniform(3, 2, |q| p.f(q), |q| p.g(q)).unwrap();
        let v = LossVariant::ConsistentTau { tau: 2.0 };
        let (ma, mb) = (param_jacobian(&a, &data, &v).unwrap(), param_jacobian(&b, &data, &v).unwrap());
        prop_assert!(ma == mb);
        prop_assert_eq!(a.value(&[x, y]).to_bits(), b.value(&[x, y]).to_bits());
    }

    #[test]
    fn pseudo_inverse_is_identity_on_retained_space(entries in prop::collection::vec(-1.0f64..1.0, 24)) {
        // G = AᵀA with A 4x6 has rank at most 4
        let a = Mat::from_fn(4, 6, |i, j| entries[i * 6 + j]);
        let g = a.transpose() * &a;
        let pinv = PseudoInverse::new(&g, 1e-10).unwrap();
        prop_assert!(pinv.rank() <= 4);
        for k in 0..pinv.rank() {
            let u: Vec<f64> = (0..6).map(|i| pinv.basis[(i, k)]).collect();
            let gu: Vec<f64> = (0..6).map(|i| (0..6).map(|j| g[(i, j)] * u[j]).sum()).collect();
            let back = pinv.apply(&gu);
            for i in 0..6 {
                prop_assert!((back[i] - u[i]).abs() <= 1e-8);
            }
        }
    }
}
