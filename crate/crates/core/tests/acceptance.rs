//! Acceptance criteria. Each prints one PASS/FAIL line; the process exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use orbitkit::algebra::{spin_cover_check, DEFAULT_TOL};
use orbitkit::iwasawa::{scan_complex, scan_k, scan_k_intersection};
use orbitkit::klein::{edge_prism_point, PrismRegion, DEFAULT_PRISM_T0};
use orbitkit::moment::{
    containment, haar_orbit_samples, haar_rotation, monte_carlo_volume_ratio, orbit_samples, sample_rng,
    singular_value_polytopes, verify_singular,
};
use orbitkit::weyl::stabilizer;
use orbitkit::{
    canonical_triple, classify, conjugate, hull, intersect, moment_polytope, ratio, weyl_group, weyl_orbit,
    CartanPoint, ExactFacet, ExactPolytope, Rational, TwoForm,
};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(index: usize, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = out.pass && in_time;
    println!(
        "{} {:>2} {}: {} [{:.2?} of {:.0?}{}]",
        if pass { "PASS" } else { "FAIL" },
        index,
        title,
        out.detail,
        elapsed,
        budget,
        if in_time { "" } else { ", over budget" },
    );
    pass
}

fn q(n: i64) -> Rational {
    ratio(n, 1)
}

fn exact_point(p: [i64; 3]) -> CartanPoint<Rational> {
    CartanPoint::new(q(p[0]), q(p[1]), q(p[2]))
}

fn same_facets(p: &ExactPolytope, want: &[ExactFacet]) -> bool {
    p.facets().len() == want.len() && want.iter().all(|f| p.facets().contains(f))
}

fn signed_facets(signs: &[[i64; 3]], offset: i64) -> Vec<ExactFacet> {
    signs.iter().map(|s| ExactFacet::canonical(s.map(q), q(offset))).collect()
}

fn prop16() -> Outcome {
    // x+y+z ≥ −1 family for 𝒫⁺, x+y+z ≤ 1 family for 𝒫⁻
    let even = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
    let plus: Vec<[Rational; 3]> = weyl_orbit(&exact_point([1, 1, 1])).iter().map(CartanPoint::to_array).collect();
    let minus: Vec<[Rational; 3]> = weyl_orbit(&exact_point([1, -1, 1])).iter().map(CartanPoint::to_array).collect();
    let hp = hull(&plus).unwrap();
    let hm = hull(&minus).unwrap();
    let want_plus = signed_facets(&even.map(|s| s.map(|c| -c)), 1);
    let want_minus = signed_facets(&even, 1);
    let primitive = hp.facets().iter().chain(hm.facets()).all(|f| {
        f.normal.iter().all(|c| c.is_integer() && (c.numer().clone() == 1.into() || c.numer().clone() == (-1).into()))
            && f.offset == q(1)
    });
    Outcome {
        pass: same_facets(&hp, &want_plus) && same_facets(&hm, &want_minus) && primitive,
        detail: format!("{} + {} facets, primitive normals with offset 1", hp.facets().len(), hm.facets().len()),
    }
}

fn octahedron() -> Outcome {
    let pts: Vec<[Rational; 3]> = weyl_orbit(&exact_point([0, 0, 1])).iter().map(CartanPoint::to_array).collect();
    let h = hull(&pts).unwrap();
    let mut signs = Vec::new();
    for a in [-1, 1] {
        for b in [-1, 1] {
            for c in [-1, 1] {
                signs.push([a, b, c]);
            }
        }
    }
    let want = signed_facets(&signs, 1);
    Outcome {
        pass: pts.len() == 6 && same_facets(&h, &want),
        detail: format!("{} vertices, {} facets of |x|+|y|+|z| ≤ 1", h.vertices().len(), h.facets().len()),
    }
}

fn tetrahedra_intersection() -> Outcome {
    let plus = moment_polytope(&exact_point([1, 1, 1]));
    let minus = moment_polytope(&exact_point([1, -1, 1]));
    let oct = moment_polytope(&exact_point([0, 0, 1]));
    let a = intersect(&plus, &minus).unwrap();
    let b = intersect(&minus, &plus).unwrap();
    Outcome {
        pass: a.same_as(&oct) && b.same_as(&oct),
        detail: format!("intersection has {} vertices, {} facets; equals the octahedron exactly", a.vertices().len(), a.facets().len()),
    }
}

fn ags() -> Outcome {
    let lambdas = [
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
    let n = 100_000;
    let mut worst = f64::NEG_INFINITY;
    let mut all = true;
    for (k, l) in lambdas.iter().enumerate() {
        let lambda = CartanPoint::from_array(*l);
        let poly = moment_polytope(&lambda);
        let cloud = haar_orbit_samples(&lambda, n, 7 + k as u64);
        let r = containment(&poly, &cloud, 1e-9);
        worst = worst.max(r.max_violation);
        all &= r.pass;
    }
    let generic = CartanPoint::new(1.0, 0.5, 2.0);
    let poly = moment_polytope(&generic);
    let cloud = orbit_samples(&generic, n, 99);
    let cloud_hull = hull(&cloud.arrays()).unwrap();
    let ratio = monte_carlo_volume_ratio(&cloud_hull, &poly, 200_000, 5);
    let haar_only = hull(&haar_orbit_samples(&generic, n, 99).arrays()).unwrap();
    let haar_ratio = haar_only.volume() / poly.volume();
    Outcome {
        pass: all && ratio >= 0.99,
        detail: format!(
            "{} weights × {n} samples, max violation {worst:.2e}; hull volume ratio {ratio:.4} (Haar points alone {haar_ratio:.4})",
            lambdas.len()
        ),
    }
}

fn singular_values() -> Outcome {
    let lambda = CartanPoint::new(1.0, 0.5, 2.0);
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    let mut runs = 0;
    for i in 1..=3 {
        for (k, w) in weyl_group().iter().enumerate() {
            match verify_singular(&lambda, i, w, 10_000, (i * 100 + k) as u64, 1e-9) {
                Ok(r) => worst = worst.max(r.max_violation),
                Err(_) => ok = false,
            }
            runs += 1;
        }
    }
    let exact = CartanPoint::new(q(1), ratio(1, 2), q(2));
    let family = singular_value_polytopes(&exact);
    let poly = moment_polytope(&exact);
    let mut sorted_family: Vec<Vec<[Rational; 3]>> = family
        .iter()
        .map(|s| {
            let mut v = s.polytope.vertices().to_vec();
            v.sort();
            v
        })
        .collect();
    sorted_family.sort();
    let covered = poly
        .facets()
        .iter()
        .filter(|f| {
            let mut tight: Vec<[Rational; 3]> =
                poly.vertices().iter().filter(|v| f.slack(v) == q(0)).cloned().collect();
            tight.sort();
            sorted_family.binary_search(&tight).is_ok()
        })
        .count();
    Outcome {
        pass: ok && covered == poly.facets().len(),
        detail: format!(
            "{runs} (i,w) pairs × 10000 samples, max violation {worst:.2e}; {covered}/{} facets among {} polytopes",
            poly.facets().len(),
            family.len()
        ),
    }
}

fn edge_prism() -> Outcome {
    let region = PrismRegion::new(DEFAULT_PRISM_T0);
    let mut worst: f64 = 0.0;
    let mut outside = 0;
    let n = 10_000;
    let unit = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let v: [f64; 3] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let s: f64 = v.iter().map(|c| c * c).sum();
        if s > 1e-4 && s <= 1.0 {
            let n = s.sqrt();
            break v.map(|c| c / n);
        }
    };
    for k in 0..n {
        let mut rng = sample_rng(2024, k);
        let abc = unit(&mut rng);
        let dirs = unit(&mut rng);
        let t = rng.random_range(0.0..=DEFAULT_PRISM_T0);
        let p = edge_prism_point(abc, dirs, t).unwrap();
        worst = worst.max((p.x - p.y - abc[0] * p.z - abc[0] * (3.0 + t)).abs());
        if !region.contains(&p) {
            outside += 1;
        }
    }
    Outcome {
        pass: worst < 1e-12 && outside == 0,
        detail: format!("{n} draws, max |x−y−az−a(3+t)| = {worst:.2e}, {outside} outside the prism region"),
    }
}

fn spin_cover() -> Outcome {
    let mut rng = sample_rng(12, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let theta = rng.random_range(0.0..4.0 * std::f64::consts::PI);
        worst = worst.max(spin_cover_check(theta).discrepancy);
    }
    let full = spin_cover_check(2.0 * std::f64::consts::PI);
    let so6_dev = (full.so6_action - nalgebra::Matrix6::identity()).amax();
    let su4_dev = (full.su4_element + nalgebra::Matrix4::identity()).map(|z| z.norm()).max();
    Outcome {
        pass: worst < 1e-12 && full.discrepancy < 1e-12 && so6_dev < 1e-12 && su4_dev < 1e-12,
        detail: format!("max discrepancy {worst:.2e}; at 2π |Γ−I| = {so6_dev:.1e}, |U+I| = {su4_dev:.1e}"),
    }
}

fn complex_structures() -> Outcome {
    let (_, r) = scan_complex(100_000, 31, 1e-6).unwrap();
    Outcome {
        pass: r.pass,
        detail: format!(
            "family of {} max N {:.1e}, Hausdorff {:.2e} (grid {:.2e}); vertex {:?} off edge; Haar accepted {} (max dist {:.1e}, nearest rejected {:.2e}); perturbed accepted {}/{} (max dist {:.1e})",
            r.family_points,
            r.family_max_nijenhuis,
            r.family_hausdorff,
            r.grid_resolution,
            r.vertex.to_array(),
            r.haar_accepted,
            r.haar_max_distance,
            r.haar_min_rejected_distance,
            r.perturbed_accepted,
            r.perturbed,
            r.perturbed_max_distance
        ),
    }
}

fn product_structures() -> Outcome {
    let (_, k) = scan_k(10_000, 41).unwrap();
    let (_, kk) = scan_k_intersection(10_000, 43).unwrap();
    Outcome {
        pass: k.pass && kk.pass,
        detail: format!(
            "K: {}/{} closed, max violation {:.1e}, controls rejected {}/{}; K∩K′: {}/{} doubly closed, max segment distance {:.1e}, controls rejected {}/{}",
            k.accepted, k.n, k.max_violation, k.controls_rejected, k.controls, kk.accepted, kk.n, kk.max_violation,
            kk.controls_rejected, kk.controls
        ),
    }
}

fn classification() -> Outcome {
    let rows = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0],
        [0.0, 0.0, 1.0],
        [1.0, 1.0, 2.0],
        [1.0, -1.0, 2.0],
        [2.0, 1.0, 2.0],
        [1.0, 0.0, 1.0],
        [1.0, 0.5, 2.0],
    ];
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    for k in 0..1000u64 {
        let mut rng = sample_rng(77, k);
        let form = if k % 2 == 0 {
            TwoForm::new(core::array::from_fn(|_| rng.random_range(-2.0..2.0))).unwrap()
        } else {
            TwoForm::from_cartan(&CartanPoint::from_array(rows[(k as usize / 2) % rows.len()]))
        };
        let r = haar_rotation(&mut rng);
        let moved = conjugate(&form, &r);
        if classify(&form, DEFAULT_TOL) != classify(&moved, DEFAULT_TOL) {
            mismatches += 1;
        }
        let a = canonical_triple(&form, DEFAULT_TOL).unwrap();
        let b = canonical_triple(&moved, DEFAULT_TOL).unwrap();
        worst = worst.max(a.max_abs_diff(&b));
    }
    let order = weyl_group().len();
    let mut sizes: Vec<usize> = [[0.0, 0.0, 0.0]]
        .iter()
        .chain(rows.iter())
        .map(|p| {
            let p = CartanPoint::from_array(*p);
            let s = 24 / stabilizer(&p).len();
            assert_eq!(s, weyl_orbit(&p).len());
            s
        })
        .collect();
    sizes.sort();
    sizes.dedup();
    Outcome {
        pass: mismatches == 0 && worst < 1e-8 && order == 24 && sizes == [1, 4, 6, 12, 24],
        detail: format!("{mismatches} class mismatches, max triple drift {worst:.1e}; |W| = {order}; orbit sizes {sizes:?}"),
    }
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(1, "tetrahedron facets", s(1), prop16),
        run(2, "octahedron facets", s(1), octahedron),
        run(3, "tetrahedra intersection", s(1), tetrahedra_intersection),
        run(4, "AGS containment and volume", s(60), ags),
        run(5, "singular values of the toric moment map", s(60), singular_values),
        run(6, "edge prism identity", s(5), edge_prism),
        run(7, "spin double cover", s(1), spin_cover),
        run(8, "integrable complex structures", s(120), complex_structures),
        run(9, "closed product structures", s(30), product_structures),
        run(10, "classification equivariance", s(5), classification),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
