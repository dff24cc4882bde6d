//! JSON and CSV encodings of the core objects.
//!
//! Rationals are always strings `"p/q"` (or `"p"` for integers); floats never
//! appear on exact paths. Every top-level document carries
//! [`SCHEMA_VERSION`].

use anyhow::{anyhow, bail, Context, Result};
use dualpoly::bounds::Bracket;
use dualpoly::circuits::{CircuitDesc, CircuitStats, Gate, GateKind, Wire};
use dualpoly::mixture::ProductMixture;
use dualpoly::orth::{Monomial, OrthResult};
use dualpoly::rational::{parse_q, to_pq};
use dualpoly::{Domain, FnTable, Q};
use serde_json::{json, Value};

/// Version of every JSON document this crate writes.
pub const SCHEMA_VERSION: &str = "dualpoly/1";

/// `"p/q"`.
pub fn rat(x: &Q) -> Value {
    Value::String(to_pq(x))
}

/// Parses a `"p/q"` string.
pub fn parse_rat(v: &Value) -> Result<Q> {
    let s = v.as_str().ok_or_else(|| anyhow!("expected a \"p/q\" string, got {v}"))?;
    Ok(parse_q(s)?)
}

/// `{"lo": "p/q", "hi": "p/q"}`.
pub fn bracket(b: &Bracket) -> Value {
    json!({ "lo": rat(&b.lo), "hi": rat(&b.hi) })
}

/// Domain descriptor.
pub fn domain(d: &Domain) -> Value {
    match d {
        Domain::Hypercube(n) => json!({ "kind": "hypercube", "n": n }),
        Domain::Grid { lo, hi } => json!({ "kind": "grid", "lo": lo, "hi": hi }),
        Domain::Slice { base, lo, hi } => json!({ "kind": "slice", "base": domain(base), "lo": lo, "hi": hi }),
    }
}

fn int_vec(v: &Value) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| anyhow!("expected an integer array"))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| anyhow!("expected an integer, got {x}")))
        .collect()
}

/// Parses a domain descriptor.
pub fn parse_domain(v: &Value) -> Result<Domain> {
    match v["kind"].as_str() {
        Some("hypercube") => Ok(Domain::Hypercube(v["n"].as_u64().context("hypercube needs n")? as usize)),
        Some("grid") => Ok(Domain::Grid { lo: int_vec(&v["lo"])?, hi: int_vec(&v["hi"])? }),
        Some("slice") => Ok(Domain::Slice {
            base: Box::new(parse_domain(&v["base"])?),
            lo: v["lo"].as_i64().context("slice needs lo")?,
            hi: v["hi"].as_i64().context("slice needs hi")?,
        }),
        other => bail!("unknown domain kind {other:?}"),
    }
}

/// `{"domain": ..., "entries": [[point, "p/q"], ...]}` (non-zero entries only).
pub fn table(f: &FnTable) -> Value {
    let entries: Vec<Value> = f.iter().map(|(p, v)| json!([p, rat(v)])).collect();
    json!({ "domain": domain(f.domain()), "entries": entries })
}

/// Parses a table document.
pub fn parse_table(v: &Value) -> Result<FnTable> {
    let dom = parse_domain(&v["domain"])?;
    let mut entries = Vec::new();
    for e in v["entries"].as_array().context("table needs entries")? {
        let pair = e.as_array().filter(|a| a.len() == 2).ok_or_else(|| anyhow!("entry must be [point, value]"))?;
        entries.push((int_vec(&pair[0])?, parse_rat(&pair[1])?));
    }
    Ok(FnTable::from_entries(dom, entries)?)
}

/// `{"dim": n, "terms": [{"coef": "p/q", "factors": [table, ...]}, ...]}`.
pub fn mixture(m: &ProductMixture) -> Value {
    let terms: Vec<Value> = m
        .terms()
        .iter()
        .map(|t| json!({ "coef": rat(&t.coef), "factors": t.factors.iter().map(table).collect::<Vec<_>>() }))
        .collect();
    json!({ "dim": m.dim(), "terms": terms })
}

/// Parses a mixture document.
pub fn parse_mixture(v: &Value) -> Result<ProductMixture> {
    let mut m = ProductMixture::new(v["dim"].as_u64().context("mixture needs dim")? as usize);
    for t in v["terms"].as_array().context("mixture needs terms")? {
        let factors = t["factors"].as_array().context("term needs factors")?.iter().map(parse_table).collect::<Result<_>>()?;
        m.push(parse_rat(&t["coef"])?, factors)?;
    }
    Ok(m)
}

/// `[[exponents], "p/q"]` pairs.
pub fn polynomial(p: &[(Monomial, Q)]) -> Value {
    Value::Array(p.iter().map(|(m, c)| json!([m.exponents, rat(c)])).collect())
}

/// Orthogonal content as `{"kind": ..., "value": ...}`.
pub fn orth(o: &OrthResult) -> Value {
    match o {
        OrthResult::Finite { value, witness } => json!({ "kind": "exact", "value": value, "witness": witness.exponents }),
        OrthResult::Infinite => json!({ "kind": "infinite" }),
        OrthResult::AtLeast(_) => json!({ "kind": "at_least", "value": o.lower_bound() }),
    }
}

fn wire(w: &Wire) -> Value {
    match *w {
        Wire::Const(b) => json!({ "const": b }),
        Wire::Lit { var, positive } => json!({ "var": var, "positive": positive }),
        Wire::Gate(g) => json!({ "gate": g }),
    }
}

fn parse_wire(v: &Value) -> Result<Wire> {
    if let Some(b) = v.get("const") {
        return Ok(Wire::Const(b.as_bool().context("const must be a boolean")?));
    }
    if let Some(g) = v.get("gate") {
        return Ok(Wire::Gate(g.as_u64().context("gate must be an index")? as usize));
    }
    let var = v["var"].as_u64().context("wire needs const, gate or var")? as usize;
    Ok(Wire::Lit { var, positive: v["positive"].as_bool().unwrap_or(true) })
}

/// Circuit statistics.
pub fn stats(s: &CircuitStats) -> Value {
    json!({
        "size": s.size,
        "depth": s.depth,
        "bottom_fan_in": s.bottom_fan_in,
        "max_fan_in": s.max_fan_in,
        "monotone": s.monotone,
        "top": s.top.map(GateKind::name),
    })
}

/// Circuit document: typed gate list plus recomputed statistics.
pub fn circuit(c: &CircuitDesc) -> Value {
    let gates: Vec<Value> = c
        .gates
        .iter()
        .map(|g| json!({ "kind": g.kind.name(), "inputs": g.inputs.iter().map(wire).collect::<Vec<_>>() }))
        .collect();
    json!({ "inputs": c.inputs, "gates": gates, "output": wire(&c.output), "stats": stats(&c.stats()) })
}

/// Parses and validates a circuit document (the `stats` field is ignored and
/// recomputed on demand).
pub fn parse_circuit(v: &Value) -> Result<CircuitDesc> {
    let mut gates = Vec::new();
    for g in v["gates"].as_array().context("circuit needs gates")? {
        let kind = match g["kind"].as_str() {
            Some("AND") | Some("and") => GateKind::And,
            Some("OR") | Some("or") => GateKind::Or,
            other => bail!("unknown gate kind {other:?}"),
        };
        let inputs = g["inputs"].as_array().context("gate needs inputs")?.iter().map(parse_wire).collect::<Result<_>>()?;
        gates.push(Gate { kind, inputs });
    }
    let c = CircuitDesc {
        inputs: v["inputs"].as_u64().context("circuit needs inputs")? as usize,
        gates,
        output: parse_wire(&v["output"])?,
    };
    c.validate()?;
    Ok(c)
}

/// Reads a `+1/-1` (or rational) matrix from CSV text without a header row.
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<Q>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(rec.iter().map(|s| parse_q(s).map_err(anyhow::Error::from)).collect::<Result<Vec<_>>>()?);
    }
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        bail!("matrix CSV must be non-empty and rectangular");
    }
    Ok(rows)
}

/// Writes a rational matrix as CSV.
pub fn matrix_csv(m: &[Vec<Q>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in m {
        w.write_record(row.iter().map(to_pq))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Writes a table as CSV with one column per coordinate plus `value`.
pub fn table_csv(f: &FnTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (0..f.dim()).map(|i| format!("x{i}")).collect();
    header.push("value".into());
    w.write_record(&header)?;
    for (p, v) in f.iter() {
        let mut rec: Vec<String> = p.iter().map(ToString::to_string).collect();
        rec.push(to_pq(v));
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dualpoly::circuits::mp;
    use dualpoly::rational::{q, qr};

    #[test]
    fn table_roundtrip() {
        let f = FnTable::from_fn(Domain::uniform_box(2, 2).at_most(3), |x| qr(x[0] - x[1], 3));
        let back = parse_table(&table(&f)).unwrap();
        assert_eq!(back, f);
        assert_eq!(table(&f)["entries"][0][1], json!("-1/3"));
    }

    #[test]
    fn mixture_and_circuit_roundtrip() {
        let mut m = ProductMixture::new(1);
        m.push(qr(1, 2), vec![FnTable::univariate(&[q(1)])]).unwrap();
        assert_eq!(parse_mixture(&mixture(&m)).unwrap(), m);
        let c = mp(2, 2).unwrap();
        let v = circuit(&c);
        assert_eq!(v["stats"]["depth"], json!(2));
        assert_eq!(parse_circuit(&v).unwrap(), c);
    }

    #[test]
    fn csv_matrices() {
        let m = parse_matrix_csv("1,-1\n-1, 1\n").unwrap();
        assert_eq!(m[0][1], q(-1));
        assert_eq!(parse_matrix_csv(&matrix_csv(&m).unwrap()).unwrap(), m);
        assert!(parse_matrix_csv("1,1\n1\n").is_err());
    }
}
