use orbitkit::algebra::{spin_cover_check, OrbitClass, DEFAULT_TOL};
use orbitkit::klein::{edge_prism_point, pi2, square_fiber_points, square_region_violation, KleinError, PrismRegion};
use orbitkit::moment::{containment, haar_orbit_samples, monte_carlo_volume_ratio, orbit_samples, sample_rng};
use orbitkit::moment::{singular_value_polytopes, verify_singular};
use orbitkit::{
    classify, hull, intersect, moment_polytope, mu_t, ratio, weyl_group, weyl_orbit, CartanPoint, ExactFacet,
    ExactPolytope, Rational, TwoForm,
};
use rand::Rng;

use crate::commands::{parse_lambda, unit3};
use crate::report::{RunReport, UsageError};
use crate::{Sampling, Suite};

fn q(n: i64) -> Rational {
    ratio(n, 1)
}

fn exact(p: [i64; 3]) -> CartanPoint<Rational> {
    CartanPoint::new(q(p[0]), q(p[1]), q(p[2]))
}

fn facets_equal(p: &ExactPolytope, signs: &[[i64; 3]], offset: i64) -> bool {
    let want: Vec<ExactFacet> = signs.iter().map(|s| ExactFacet::canonical(s.map(q), q(offset))).collect();
    p.facets().len() == want.len() && want.iter().all(|f| p.facets().contains(f))
}

const EVEN: [[i64; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];

/// Representatives of every orbit type plus a generic weight.
const AGS_WEIGHTS: [[f64; 3]; 9] = [
    [1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0],
    [0.0, 0.0, 1.0],
    [1.0, 1.0, 2.0],
    [1.0, -1.0, 2.0],
    [2.0, 1.0, 2.0],
    [1.0, 0.0, 1.0],
    [2.0, -1.0, 2.0],
    [1.0, 0.5, 2.0],
];

pub fn run(suite: Suite, s: &Sampling, lambda: Option<&str>, t0: f64) -> Result<RunReport, UsageError> {
    let name = format!("verify {}", clap::ValueEnum::to_possible_value(&suite).expect("named").get_name());
    let mut r = RunReport::new(name);
    r.param("seed", s.seed);
    match suite {
        Suite::Prop16 => {
            let hp = hull(&orbit_array(&exact([1, 1, 1]))).map_err(|e| UsageError(e.to_string()))?;
            let hm = hull(&orbit_array(&exact([1, -1, 1]))).map_err(|e| UsageError(e.to_string()))?;
            let minus_signs = EVEN.map(|s| s.map(|c| -c));
            r.metric("plus_facets", hp.facets().len()).metric("minus_facets", hm.facets().len());
            r.check("plus_exact", facets_equal(&hp, &minus_signs, 1));
            r.check("minus_exact", facets_equal(&hm, &EVEN, 1));
        }
        Suite::Octahedron => {
            let h = hull(&orbit_array(&exact([0, 0, 1]))).map_err(|e| UsageError(e.to_string()))?;
            let signs: Vec<[i64; 3]> =
                (0..8).map(|k| [1 - 2 * (k & 1), 1 - 2 * ((k >> 1) & 1), 1 - 2 * ((k >> 2) & 1)]).collect();
            r.metric("vertices", h.vertices().len()).metric("facets", h.facets().len());
            r.check("facets_exact", facets_equal(&h, &signs, 1));
        }
        Suite::Intersection => {
            let plus = moment_polytope(&exact([1, 1, 1]));
            let minus = moment_polytope(&exact([1, -1, 1]));
            let oct = moment_polytope(&exact([0, 0, 1]));
            let i = intersect(&plus, &minus).map_err(|e| UsageError(e.to_string()))?;
            r.metric("vertices", i.vertices().len()).metric("facets", i.facets().len());
            r.check("equals_octahedron", i.same_as(&oct));
        }
        Suite::Ags => {
            let n = s.n.unwrap_or(10_000);
            let tol = s.tol.unwrap_or(1e-9);
            r.param("n", n).param("tol", tol);
            let mut worst = f64::NEG_INFINITY;
            let mut all = true;
            for (k, l) in AGS_WEIGHTS.iter().enumerate() {
                let lambda = CartanPoint::from_array(*l);
                let rep = containment(&moment_polytope(&lambda), &haar_orbit_samples(&lambda, n, s.seed + k as u64), tol);
                worst = worst.max(rep.max_violation);
                all &= rep.pass;
            }
            let generic = CartanPoint::from_array(AGS_WEIGHTS[8]);
            let cloud = hull(&orbit_samples(&generic, n, s.seed).arrays()).map_err(|e| UsageError(e.to_string()))?;
            let ratio = monte_carlo_volume_ratio(&cloud, &moment_polytope(&generic), 100_000, s.seed);
            r.metric("weights", AGS_WEIGHTS.len()).metric("max_violation", worst).metric("volume_ratio", ratio);
            r.check("contained", all).check("volume_ok", ratio >= 0.99);
        }
        Suite::Singular => {
            let n = s.n.unwrap_or(1000);
            let tol = s.tol.unwrap_or(1e-9);
            let l = parse_lambda(lambda.unwrap_or("1,1/2,2"))?;
            r.param("n", n).param("tol", tol).param("lambda", l.to_f64().to_array());
            let lf = l.to_f64();
            let mut worst = f64::NEG_INFINITY;
            let mut failures = 0;
            for i in 1..=3 {
                for (k, w) in weyl_group().iter().enumerate() {
                    match verify_singular(&lf, i, w, n, s.seed + (24 * i + k) as u64, tol) {
                        Ok(rep) => worst = worst.max(rep.max_violation),
                        Err(_) => failures += 1,
                    }
                }
            }
            let family = singular_value_polytopes(&l);
            let poly = moment_polytope(&l);
            let covered = poly
                .facets()
                .iter()
                .filter(|f| {
                    let tight: Vec<[Rational; 3]> =
                        poly.vertices().iter().filter(|v| f.slack(v) == q(0)).cloned().collect();
                    let face = hull(&tight).expect("facet vertices");
                    family.iter().any(|s| s.polytope.same_as(&face))
                })
                .count();
            r.metric("max_violation", worst).metric("failures", failures).metric("polytopes", family.len());
            r.metric("facets_covered", covered).metric("facets", poly.facets().len());
            r.check("contained", failures == 0).check("facets_ok", covered == poly.facets().len());
        }
        Suite::SpinCover => {
            let n = s.n.unwrap_or(100);
            let tol = s.tol.unwrap_or(1e-12);
            r.param("n", n).param("tol", tol);
            let mut rng = sample_rng(s.seed, 0);
            let worst = (0..n)
                .map(|_| spin_cover_check(rng.random_range(0.0..4.0 * std::f64::consts::PI)).discrepancy)
                .fold(0.0, f64::max);
            let full = spin_cover_check(2.0 * std::f64::consts::PI);
            let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
            let so6 = (0..36).map(|k| (full.so6_action[(k / 6, k % 6)] - delta(k / 6, k % 6)).abs()).fold(0.0, f64::max);
            let su4 = (0..16).map(|k| (full.su4_element[(k / 4, k % 4)] + delta(k / 4, k % 4)).norm()).fold(0.0, f64::max);
            r.metric("max_discrepancy", worst).metric("so6_identity_deviation", so6).metric("su4_minus_identity_deviation", su4);
            r.check("discrepancy_ok", worst < tol).check("loop_ok", so6 < tol && su4 < tol);
        }
        Suite::EdgePrism => {
            let n = s.n.unwrap_or(10_000);
            let tol = s.tol.unwrap_or(1e-12);
            r.param("n", n).param("tol", tol).param("t0", t0);
            let region = PrismRegion::new(t0);
            let (mut worst, mut outside) = (0f64, 0usize);
            for k in 0..n as u64 {
                let mut rng = sample_rng(s.seed, k);
                let abc = unit3(&mut rng);
                let dirs = unit3(&mut rng);
                let t = rng.random_range(0.0..=t0);
                let p = edge_prism_point(abc, dirs, t).map_err(|e| UsageError(e.to_string()))?;
                worst = worst.max((p.x - p.y - abc[0] * p.z - abc[0] * (3.0 + t)).abs());
                outside += usize::from(!region.contains(&p));
            }
            r.metric("max_identity_residual", worst).metric("outside_region", outside);
            r.check("identity_ok", worst < tol).check("region_ok", outside == 0);
        }
        Suite::Square => {
            let n = s.n.unwrap_or(10_000);
            let tol = s.tol.unwrap_or(1e-9);
            r.param("n", n).param("tol", tol).param("t", t0);
            let outer = moment_polytope(&CartanPoint::new(t0, t0, 1.0 + t0));
            let (mut worst_region, mut worst_identity, mut worst_orbit) = (f64::NEG_INFINITY, 0f64, f64::NEG_INFINITY);
            for k in 0..n as u64 {
                let mut rng = sample_rng(s.seed, k);
                let (u, p, q) = (unit3(&mut rng), unit3(&mut rng), unit3(&mut rng));
                let img = square_fiber_points(u, p, q, t0).map_err(|e| UsageError(e.to_string()))?;
                worst_region = worst_region.max(square_region_violation(&img, t0));
                worst_orbit = worst_orbit.max(outer.max_violation(&img.to_array()));
                worst_identity = worst_identity
                    .max((img.x + img.y - p[0] * (1.0 + t0 + img.z)).abs())
                    .max((img.x - img.y - q[0] * (1.0 + t0 - img.z)).abs());
            }
            r.metric("max_region_violation", worst_region)
                .metric("max_polytope_violation", worst_orbit)
                .metric("max_identity_residual", worst_identity);
            r.check("region_ok", worst_region <= tol)
                .check("polytope_ok", worst_orbit <= tol)
                .check("identity_ok", worst_identity <= tol);
        }
        Suite::F3Segments => {
            let n = s.n.unwrap_or(99);
            r.param("n", n);
            let (mut wrong_class, mut wrong_image) = (0, 0);
            for k in 1..=n {
                let b = k as f64 / (n + 1) as f64;
                let listed = [
                    (TwoForm::from_terms(&[(1, 2, -1.0), (5, 6, 1.0), (3, 4, -b)]), OrbitClass::F3Plus, [-1.0, -b, 1.0]),
                    (TwoForm::from_terms(&[(1, 2, 1.0), (5, 6, -1.0), (3, 4, -b)]), OrbitClass::F3Plus, [1.0, -b, -1.0]),
                    (TwoForm::from_terms(&[(1, 2, 1.0), (5, 6, 1.0), (3, 4, -b)]), OrbitClass::F3Minus, [1.0, -b, 1.0]),
                    (TwoForm::from_terms(&[(1, 2, -1.0), (5, 6, -1.0), (3, 4, -b)]), OrbitClass::F3Minus, [-1.0, -b, -1.0]),
                ];
                for (form, class, image) in listed {
                    wrong_class += usize::from(classify(&form, DEFAULT_TOL).ok() != Some(class));
                    wrong_image += usize::from(mu_t(&form).to_array() != image);
                }
            }
            let wall = TwoForm::from_terms(&[(1, 2, -1.0), (5, 6, 1.0)]);
            let wall_ok = classify(&wall, DEFAULT_TOL).ok() == Some(OrbitClass::F3Zero)
                && pi2(&wall) == Err(KleinError::DegenerateOrientation);
            let f = TwoForm::from_terms(&[(1, 4, 1.0), (2, 3, 1.0)]);
            let midpoint_ok = mu_t(&f) == CartanPoint::origin()
                && mu_t(&(f + TwoForm::basis(5, 6))) == CartanPoint::new(0.0, 0.0, 1.0);
            r.metric("forms", 4 * n).metric("wrong_class", wrong_class).metric("wrong_image", wrong_image);
            r.check("classes_ok", wrong_class == 0)
                .check("images_ok", wrong_image == 0)
                .check("wall_refuses_orientation", wall_ok)
                .check("midpoint_ok", midpoint_ok);
        }
    }
    Ok(r)
}

fn orbit_array(p: &CartanPoint<Rational>) -> Vec<[Rational; 3]> {
    weyl_orbit(p).iter().map(CartanPoint::to_array).collect()
}
