use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::scalar::Scalar;

use super::{Facet, Polytope};

/// Renders the polytope in OFF format.
///
/// Exact coordinates are multiplied by the least common denominator, which
/// is recorded in a `# scale` comment; floats are written with 17
/// significant digits.
pub fn write_off<T: Scalar>(p: &Polytope<T>) -> String {
    let mut out = String::from("OFF\n");
    let coords: Vec<String> = if T::EXACT {
        let exact: Vec<num_rational::BigRational> = p
            .vertices()
            .iter()
            .flat_map(|v| v.iter().map(Scalar::to_rational))
            .collect();
        let den = exact.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let _ = writeln!(out, "# scale 1/{den}");
        exact
            .iter()
            .map(|c| (c.numer() * (&den / c.denom())).to_string())
            .collect()
    } else {
        p.vertices()
            .iter()
            .flat_map(|v| v.iter().map(|c| format!("{:.16e}", c.to_f64_lossy())))
            .collect()
    };
    let faces: Vec<&Vec<usize>> = if p.dim() >= 2 { p.faces().iter().collect() } else { Vec::new() };
    let _ = writeln!(out, "{} {} 0", p.vertices().len(), faces.len());
    for c in coords.chunks(3) {
        let _ = writeln!(out, "{} {} {}", c[0], c[1], c[2]);
    }
    for f in faces {
        let idx: Vec<String> = f.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{} {}", f.len(), idx.join(" "));
    }
    out
}

fn facet_value<T: Scalar>(f: &Facet<T>, sense: &str) -> serde_json::Value {
    serde_json::json!({
        "normal": f.normal.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        "offset": f.offset.to_json(),
        "sense": sense,
    })
}

/// JSON array of `{normal, offset, sense}` records: `"le"` for facet
/// inequalities followed by `"eq"` for affine-hull equations.
pub fn facets_json<T: Scalar>(p: &Polytope<T>) -> serde_json::Value {
    let mut out: Vec<serde_json::Value> =
        p.facets().iter().map(|f| facet_value(f, "le")).collect();
    out.extend(p.affine_hull().iter().map(|f| facet_value(f, "eq")));
    serde_json::Value::Array(out)
}
