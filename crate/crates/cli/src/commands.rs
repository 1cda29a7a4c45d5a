use std::fs;
use std::path::Path;

use orbitkit::algebra::AlgebraError;
use orbitkit::iwasawa::{
    mixed_classes_over, mixed_pair, scan_complex, scan_k, scan_k_intersection, InvariantOCS, InvariantOPS,
    IwasawaError, MixedSource,
};
use orbitkit::klein::{edge_prism_point, square_fiber_points, square_region, square_region_violation, PrismRegion};
use orbitkit::moment::{containment, orbit_samples, sample_rng, singular_value_polytopes};
use orbitkit::polytope::{facets_json, write_off};
use orbitkit::{
    canonical_triple, classify as classify_form, moment_polytope, ratio, CartanPoint, ExactCartanPoint,
    SampleCloud, SimplePlaneForm, TwoForm,
};
use rand::Rng;
use serde_json::{json, Value};

use crate::report::{RunReport, UsageError};
use crate::{IwasawaKind, KleinKind, MixedWhich, Sampling};

type Outcome = Result<RunReport, UsageError>;

/// Parses `"x,y,z"` with integer, decimal or `p/q` entries into exact rationals.
pub fn parse_lambda(s: &str) -> Result<ExactCartanPoint, UsageError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(UsageError(format!("--lambda expects x,y,z, got {s:?}")));
    }
    let c: Vec<_> = parts.iter().map(|p| parse_rational(p)).collect::<Result<_, _>>()?;
    Ok(CartanPoint::new(c[0].clone(), c[1].clone(), c[2].clone()))
}

fn parse_rational(s: &str) -> Result<orbitkit::Rational, UsageError> {
    let bad = || UsageError(format!("not a number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(ratio(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 12 {
        return Err(bad());
    }
    let digits: i64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = 10i64.pow(frac.len() as u32);
    Ok(ratio(if neg { -digits } else { digits }, den))
}

pub fn read_form(path: &Path) -> Result<TwoForm, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str, report: &mut RunReport) -> Result<(), UsageError> {
    fs::write(path, contents).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    report.artifact(path);
    Ok(())
}

fn write_cloud(path: Option<&Path>, cloud: &SampleCloud, report: &mut RunReport) -> Result<(), UsageError> {
    if let Some(p) = path {
        write(p, &cloud.to_csv_string(), report)?;
    }
    Ok(())
}

fn region_json(facets: &[([f64; 3], f64)]) -> Value {
    Value::Array(facets.iter().map(|(n, d)| json!({"normal": n, "offset": d, "sense": "le"})).collect())
}

pub fn classify(path: &Path, tol: f64) -> Outcome {
    let form = read_form(path)?;
    let mut r = RunReport::new("classify");
    r.param("form", path.display().to_string()).param("tol", tol);
    let class = match classify_form(&form, tol) {
        Ok(c) => c,
        Err(AlgebraError::AmbiguousClass { coarser }) => {
            r.metric("ambiguous", true);
            coarser
        }
        Err(e) => return Err(UsageError(e.to_string())),
    };
    let c = canonical_triple(&form, tol).map_err(|e| UsageError(e.to_string()))?;
    r.metric("class", class).metric("canonical", c.to_array()).metric("stabilizer_dim", class.stabilizer_dim());
    Ok(r)
}

pub fn polytope(lambda: &str, off: Option<&Path>, facets: Option<&Path>) -> Outcome {
    let l = parse_lambda(lambda)?;
    let p = moment_polytope(&l);
    let mut r = RunReport::new("polytope");
    r.param("lambda", lambda);
    r.metric("dim", p.dim())
        .metric("vertices", p.vertices().len())
        .metric("facets", p.facets().len())
        .metric("edges", p.edges().len());
    if p.dim() == 3 {
        let chi = p.euler_characteristic();
        r.metric("euler_characteristic", chi).check("euler_ok", chi == 2);
    }
    if let Some(path) = off {
        write(path, &write_off(&p), &mut r)?;
    }
    if let Some(path) = facets {
        write(path, &serde_json::to_string_pretty(&facets_json(&p))?, &mut r)?;
    }
    Ok(r)
}

pub fn sample(lambda: &str, s: &Sampling, out: Option<&Path>) -> Outcome {
    let l = parse_lambda(lambda)?.to_f64();
    let n = s.n.unwrap_or(10_000);
    let tol = s.tol.unwrap_or(1e-9);
    let cloud = orbit_samples(&l, n, s.seed);
    let rep = containment(&moment_polytope(&l), &cloud, tol);
    let mut r = RunReport::new("sample");
    r.param("lambda", lambda).param("n", n).param("seed", s.seed).param("tol", tol);
    r.metric("max_violation", rep.max_violation).metric("points", rep.n).check("contained", rep.pass);
    write_cloud(out, &cloud, &mut r)?;
    Ok(r)
}

pub fn unit3<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let s: f64 = v.iter().map(|c| c * c).sum();
        if s > 1e-4 && s <= 1.0 {
            let n = s.sqrt();
            return v.map(|c| c / n);
        }
    }
}

pub fn klein(which: KleinKind, s: &Sampling, t0: f64, out: Option<&Path>, facets: Option<&Path>) -> Outcome {
    if !(t0 > 0.0) {
        return Err(UsageError("--t0 must be positive".into()));
    }
    let n = s.n.unwrap_or(10_000);
    let mut r = RunReport::new(match which {
        KleinKind::EdgePrism => "klein edge-prism",
        KleinKind::Square => "klein square",
    });
    r.param("n", n).param("seed", s.seed).param("t0", t0);
    let mut points = Vec::with_capacity(n);
    let region = match which {
        KleinKind::EdgePrism => {
            let prism = PrismRegion::new(t0);
            let tol = s.tol.unwrap_or(1e-12);
            let (mut worst, mut outside) = (0f64, 0usize);
            for k in 0..n as u64 {
                let mut rng = sample_rng(s.seed, k);
                let abc = unit3(&mut rng);
                let dirs = unit3(&mut rng);
                let t = rng.random_range(0.0..=t0);
                let p = edge_prism_point(abc, dirs, t).map_err(|e| UsageError(e.to_string()))?;
                worst = worst.max((p.x - p.y - abc[0] * p.z - abc[0] * (3.0 + t)).abs());
                outside += usize::from(!prism.contains(&p));
                points.push(p);
            }
            r.param("tol", tol).metric("max_identity_residual", worst).metric("outside_region", outside);
            r.check("identity_ok", worst < tol).check("region_ok", outside == 0);
            prism.facets()
        }
        KleinKind::Square => {
            let tol = s.tol.unwrap_or(1e-9);
            let mut worst = f64::NEG_INFINITY;
            for k in 0..n as u64 {
                let mut rng = sample_rng(s.seed, k);
                let (u, p, q) = (unit3(&mut rng), unit3(&mut rng), unit3(&mut rng));
                let img = square_fiber_points(u, p, q, t0).map_err(|e| UsageError(e.to_string()))?;
                worst = worst.max(square_region_violation(&img, t0));
                points.push(img);
            }
            r.param("tol", tol).metric("max_violation", worst).check("region_ok", worst <= tol);
            square_region(t0)
        }
    };
    let cloud = SampleCloud { seed: s.seed, source: format!("{} t0={t0}", r.command), points };
    write_cloud(out, &cloud, &mut r)?;
    if let Some(path) = facets {
        write(path, &serde_json::to_string_pretty(&region_json(&region))?, &mut r)?;
    }
    Ok(r)
}

fn scan_error(e: IwasawaError) -> UsageError {
    UsageError(e.to_string())
}

pub fn iwasawa(
    sub: IwasawaKind,
    s: &Sampling,
    out: Option<&Path>,
    facets: Option<&Path>,
    which: MixedWhich,
    manual: Option<(&Path, &Path)>,
) -> Outcome {
    let n = s.n.unwrap_or(10_000);
    let mut r = RunReport::new(match sub {
        IwasawaKind::ScanComplex => "iwasawa scan-complex",
        IwasawaKind::ScanK => "iwasawa scan-k",
        IwasawaKind::ScanKk => "iwasawa scan-kk",
        IwasawaKind::Mixed => "iwasawa mixed",
    });
    match sub {
        IwasawaKind::ScanComplex => {
            let tol = s.tol.unwrap_or(1e-6);
            r.param("n", n).param("seed", s.seed).param("tol", tol);
            let (cloud, rep) = scan_complex(n, s.seed, tol).map_err(scan_error)?;
            r.pass = rep.pass;
            r.metrics.extend(as_metrics(&rep));
            write_cloud(out, &cloud, &mut r)?;
        }
        IwasawaKind::ScanK | IwasawaKind::ScanKk => {
            r.param("n", n).param("seed", s.seed);
            let (cloud, rep) = if matches!(sub, IwasawaKind::ScanK) {
                scan_k(n, s.seed)
            } else {
                scan_k_intersection(n, s.seed)
            }
            .map_err(scan_error)?;
            r.pass = rep.pass;
            r.metrics.extend(as_metrics(&rep));
            write_cloud(out, &cloud, &mut r)?;
        }
        IwasawaKind::Mixed => {
            if let Some((ocs, plane)) = manual {
                r.param("ocs", ocs.display().to_string()).param("plane_form", plane.display().to_string());
                let j = InvariantOCS::from_form(&read_form(ocs)?).map_err(scan_error)?;
                let p = SimplePlaneForm::new(read_form(plane)?, 1e-9).map_err(|e| UsageError(e.to_string()))?;
                match mixed_pair(&j, &InvariantOPS::from_plane(&p), 1.0) {
                    Ok(form) => {
                        r.metric("form", form).metric("image", orbitkit::mu_t(&form).to_array());
                    }
                    Err(e @ IwasawaError::IncompatiblePair(_)) => {
                        r.metric("error", e.to_string()).check("compatible", false);
                    }
                    Err(e) => return Err(scan_error(e)),
                }
                return Ok(r);
            }
            let source = match which {
                MixedWhich::K => MixedSource::K,
                MixedWhich::Kk => MixedSource::KIntersection,
            };
            r.param("n", n).param("seed", s.seed).param("which", format!("{which:?}").to_lowercase());
            let (cloud, rep) = mixed_classes_over(n, s.seed, source).map_err(scan_error)?;
            r.pass = rep.pass;
            let mut m = as_metrics(&rep);
            m.remove("region");
            r.metrics.extend(m);
            r.metric("region_facets", rep.region.len());
            write_cloud(out, &cloud, &mut r)?;
            if let Some(path) = facets {
                write(path, &serde_json::to_string_pretty(&region_json(&rep.region))?, &mut r)?;
            }
        }
    }
    Ok(r)
}

fn as_metrics(rep: &impl serde::Serialize) -> serde_json::Map<String, Value> {
    match serde_json::to_value(rep).expect("report serializes") {
        Value::Object(m) => m,
        _ => unreachable!("reports are structs"),
    }
}

const TABLE: [(&str, [i64; 3]); 8] = [
    ("generic", [1, 0, 2]),
    ("p_plus", [1, 1, 1]),
    ("p_minus", [1, -1, 1]),
    ("grassmannian", [0, 0, 1]),
    ("f1", [1, 1, 2]),
    ("f2", [1, -1, 2]),
    ("f3_plus", [2, 1, 2]),
    ("f3_minus", [2, -1, 2]),
];

pub fn export(dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| UsageError(format!("{}: {e}", dir.display())))?;
    let mut r = RunReport::new("export");
    r.param("out", dir.display().to_string());
    for (name, l) in TABLE {
        let mut lambda = CartanPoint::new(ratio(l[0], 1), ratio(l[1], 1), ratio(l[2], 1));
        if name == "generic" {
            lambda.y = ratio(1, 2);
        }
        let p = moment_polytope(&lambda);
        write(&dir.join(format!("{name}.off")), &write_off(&p), &mut r)?;
        write(&dir.join(format!("{name}.facets.json")), &serde_json::to_string_pretty(&facets_json(&p))?, &mut r)?;
    }
    let generic = CartanPoint::new(ratio(1, 1), ratio(1, 2), ratio(2, 1));
    let family = singular_value_polytopes(&generic);
    for (k, s) in family.iter().enumerate() {
        write(&dir.join(format!("singular_{k:02}_nu{}.off", s.i)), &write_off(&s.polytope), &mut r)?;
    }
    let prism = PrismRegion::new(1.0);
    write(&dir.join("edge_prism.facets.json"), &serde_json::to_string_pretty(&region_json(&prism.facets()))?, &mut r)?;
    write(&dir.join("square.facets.json"), &serde_json::to_string_pretty(&region_json(&square_region(1.0)))?, &mut r)?;
    r.metric("polytopes", TABLE.len()).metric("singular_polytopes", family.len());
    Ok(r)
}
