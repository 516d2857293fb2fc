//! Trace CSV format.
//!
//! ```text
//! # wavecauchy-trace v1, kind=disk, R=1, a=, b=, N_b=4, t_min=-1, t_max=1, N_t=3, provenance=exact
//! s_index,t_index,x,y,nu_x,nu_y,t,dnu_u
//! 0,0,1.0000000000000000e0,...
//! ```
//!
//! Rows run over boundary samples (outer) and times (inner). Geometry is
//! regenerated from the header and checked against every row; quadrature
//! weights are not stored.

use std::io::Write;

use wavecauchy_core::domain::Domain;
use wavecauchy_core::synth::{BoundaryTrace, Provenance, TimeGrid};

pub const MAGIC: &str = "wavecauchy-trace v1";
pub const COLUMNS: [&str; 8] = ["s_index", "t_index", "x", "y", "nu_x", "nu_y", "t", "dnu_u"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: u64,
    pub message: String,
}

fn fail<T>(line: u64, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

/// 17 significant digits: every `f64` round-trips.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn provenance_tag(p: &Provenance) -> String {
    match p {
        Provenance::Exact => "exact".into(),
        Provenance::Fd => "fd".into(),
        Provenance::Noisy { rel_level, sigma, seed, rng } => {
            format!("noisy;rel_level={};sigma={};seed={seed};rng={rng}", num(*rel_level), num(*sigma))
        }
    }
}

pub fn header(trace: &BoundaryTrace) -> String {
    let (kind, r, a, b) = match trace.domain {
        Domain::Disk { radius } => ("disk", num(radius), String::new(), String::new()),
        Domain::Rectangle { a, b } => ("rect", String::new(), num(a), num(b)),
    };
    format!(
        "# {MAGIC}, kind={kind}, R={r}, a={a}, b={b}, N_b={}, t_min={}, t_max={}, N_t={}, provenance={}",
        trace.n_boundary(),
        num(trace.times.t_min),
        num(trace.times.t_max),
        trace.times.n,
        provenance_tag(&trace.provenance)
    )
}

pub fn write_trace<W: Write>(trace: &BoundaryTrace, out: W) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "{}", header(trace))?;
    writeln!(out, "{}", COLUMNS.join(","))?;
    for (j, p) in trace.samples.iter().enumerate() {
        for (k, v) in trace.row(j).iter().enumerate() {
            writeln!(
                out,
                "{j},{k},{},{},{},{},{},{}",
                num(p.x),
                num(p.y),
                num(p.nu_x),
                num(p.nu_y),
                num(trace.times.time(k)),
                num(*v)
            )?;
        }
    }
    out.flush()
}

struct Header {
    domain: Domain,
    n_b: usize,
    times: TimeGrid,
    provenance: Provenance,
}

fn parse_header(line: &str) -> Result<Header, ParseError> {
    let body = match line.strip_prefix('#').map(str::trim) {
        Some(b) if b.starts_with(MAGIC) => &b[MAGIC.len()..],
        _ => return fail(1, format!("expected header starting with `# {MAGIC}`")),
    };
    let mut fields = std::collections::HashMap::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((k, v)) = part.split_once('=') else {
            return fail(1, format!("malformed header field `{part}`"));
        };
        fields.insert(k.trim(), v.trim());
    }
    let get = |k: &str| fields.get(k).copied().ok_or(ParseError { line: 1, message: format!("header lacks `{k}`") });
    let real = |k: &str| -> Result<f64, ParseError> {
        get(k)?.parse::<f64>().map_err(|_| ParseError { line: 1, message: format!("header field `{k}` is not a number") })
    };
    let count = |k: &str| -> Result<usize, ParseError> {
        get(k)?.parse::<usize>().map_err(|_| ParseError { line: 1, message: format!("header field `{k}` is not a count") })
    };
    let domain = match get("kind")? {
        "disk" => Domain::disk(real("R")?),
        "rect" => Domain::rectangle(real("a")?, real("b")?),
        other => return fail(1, format!("unknown domain kind `{other}`")),
    }
    .map_err(|e| ParseError { line: 1, message: e.to_string() })?;
    let times = TimeGrid::new(real("t_min")?, real("t_max")?, count("N_t")?).map_err(|e| ParseError { line: 1, message: e.to_string() })?;
    let provenance = parse_provenance(get("provenance")?)?;
    Ok(Header { domain, n_b: count("N_b")?, times, provenance })
}

fn parse_provenance(tag: &str) -> Result<Provenance, ParseError> {
    let mut parts = tag.split(';');
    match parts.next() {
        Some("exact") => Ok(Provenance::Exact),
        Some("fd") => Ok(Provenance::Fd),
        Some("noisy") => {
            let kv: std::collections::HashMap<_, _> = parts.filter_map(|p| p.split_once('=')).collect();
            let bad = || ParseError { line: 1, message: format!("malformed provenance `{tag}`") };
            Ok(Provenance::Noisy {
                rel_level: kv.get("rel_level").and_then(|v| v.parse().ok()).ok_or_else(bad)?,
                sigma: kv.get("sigma").and_then(|v| v.parse().ok()).ok_or_else(bad)?,
                seed: kv.get("seed").and_then(|v| v.parse().ok()).ok_or_else(bad)?,
                rng: kv.get("rng").ok_or_else(bad)?.to_string(),
            })
        }
        _ => fail(1, format!("unknown provenance `{tag}`")),
    }
}

pub fn read_trace(text: &str) -> Result<BoundaryTrace, ParseError> {
    let first = text.lines().next().unwrap_or("");
    let head = parse_header(first)?;
    let samples = head.domain.boundary_samples(head.n_b).map_err(|e| ParseError { line: 1, message: e.to_string() })?;
    let n_t = head.times.n;
    let expected = head.n_b * n_t;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).has_headers(true).from_reader(text.as_bytes());
    let columns = reader.headers().map_err(|e| ParseError { line: 2, message: e.to_string() })?.clone();
    if columns.iter().collect::<Vec<_>>() != COLUMNS {
        return fail(2, format!("expected columns `{}`", COLUMNS.join(",")));
    }
    let scale = head.domain.diameter().max(head.times.t_max.abs()).max(head.times.t_min.abs());
    let tol = 1e-9 * scale.max(1.0);
    let mut values = Vec::with_capacity(expected);
    let mut last_line = 2;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ParseError { line: e.position().map_or(last_line + 1, |p| p.line()), message: e.to_string() })?;
        let line = record.position().map_or(last_line + 1, |p| p.line());
        last_line = line;
        if i >= expected {
            return fail(line, format!("more than N_b·N_t = {expected} rows"));
        }
        if record.len() != COLUMNS.len() {
            return fail(line, format!("expected {} fields, found {}", COLUMNS.len(), record.len()));
        }
        let (j, k) = (i / n_t, i % n_t);
        let index = |c: usize| record[c].trim().parse::<usize>().map_err(|_| ParseError { line, message: format!("`{}` is not an index", COLUMNS[c]) });
        if index(0)? != j || index(1)? != k {
            return fail(line, format!("expected s_index={j}, t_index={k}"));
        }
        let mut reals = [0.0; 6];
        for (c, slot) in reals.iter_mut().enumerate() {
            let raw = record[c + 2].trim();
            *slot = raw
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ParseError { line, message: format!("`{}` = `{raw}` is not a finite number", COLUMNS[c + 2]) })?;
        }
        let p = &samples[j];
        let want = [p.x, p.y, p.nu_x, p.nu_y, head.times.time(k)];
        for c in 0..5 {
            if (reals[c] - want[c]).abs() > tol {
                return fail(line, format!("`{}` = {} does not match the header geometry ({})", COLUMNS[c + 2], reals[c], want[c]));
            }
        }
        values.push(reals[5]);
    }
    if values.len() < expected {
        return fail(last_line + 1, format!("truncated: expected {expected} data rows, found {}", values.len()));
    }
    Ok(BoundaryTrace { domain: head.domain, samples, times: head.times, values, provenance: head.provenance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use wavecauchy_core::synth::{add_noise, exact_trace, Azimuth, GroundTruth, ModeSpec};

    fn sample() -> BoundaryTrace {
        let disk = Domain::disk(1.0).unwrap();
        let gt = GroundTruth::new(disk, &[ModeSpec::Disk { m: 1, k: 2, azimuth: Azimuth::Sin, amplitude: 1.0, phase: 0.1 }]).unwrap();
        exact_trace(&gt, 8, TimeGrid::symmetric(1.0, 5).unwrap()).unwrap()
    }

    fn text(trace: &BoundaryTrace) -> String {
        let mut buf = Vec::new();
        write_trace(trace, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        for trace in [sample(), add_noise(&sample(), 0.01, 7).unwrap()] {
            assert_eq!(read_trace(&text(&trace)).unwrap(), trace);
        }
        let rect = Domain::rectangle(2.0, 1.0).unwrap();
        let gt = GroundTruth::new(rect, &[ModeSpec::Rectangle { n: 1, m: 2, amplitude: 0.5, phase: 0.0 }]).unwrap();
        let trace = exact_trace(&gt, 12, TimeGrid::new(0.0, 2.0, 4).unwrap()).unwrap();
        assert_eq!(read_trace(&text(&trace)).unwrap(), trace);
    }

    #[test]
    fn header_fields() {
        let h = header(&sample());
        assert!(h.starts_with("# wavecauchy-trace v1, kind=disk, R=1.0000000000000000e0, a=, b=, N_b=8,"));
        assert!(h.ends_with("N_t=5, provenance=exact"));
    }

    #[test]
    fn errors_cite_lines() {
        let full = text(&sample());
        let lines: Vec<&str> = full.lines().collect();
        let truncated = lines[..lines.len() - 3].join("\n");
        let e = read_trace(&truncated).unwrap_err();
        assert_eq!(e.line, lines.len() as u64 - 2);
        assert!(e.message.contains("truncated"));

        let mut broken: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
        broken[6] = broken[6].replacen(",", ",x", 2);
        let e = read_trace(&broken.join("\n")).unwrap_err();
        assert_eq!(e.line, 7);

        let mut shifted: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
        let fields: Vec<&str> = lines[4].split(',').collect();
        shifted[4] = format!("{},{},0.5,{}", fields[0], fields[1], fields[3..].join(","));
        let e = read_trace(&shifted.join("\n")).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.message.contains("`x`"));

        assert_eq!(read_trace("garbage").unwrap_err().line, 1);
    }
}
