//! Plain-text metric definition files.
//!
//! A file has three sections; expressions use the grammar of
//! [`crate::parse`] with the declared coordinates, `alpha`, the declared
//! parameters, and (when given) the scale factor bound to `R`:
//!
//! ```text
//! [meta]
//! name = schwarzschild
//! coordinates = q1 q2 q3 q4
//! parameters = M=1
//! # optional: scale_factor = q1^2
//!
//! [domain]
//! q1 = (0.5, 3)
//! ...
//!
//! [metric]
//! g_11 = -(1 - 2*M/q2) * q1^(2*(alpha - 1))
//! ...
//! ```
//!
//! Every diagonal component must be given; off-diagonal slots default to
//! zero, and giving both `g_ij` and `g_ji` with structurally different
//! expressions is rejected.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::chart::Chart;
use crate::domain::DomainBox;
use crate::expr::Expr;
use crate::metric::{MetricSpec, DIM};
use crate::parse::{parse_with_bindings, ParseError};

/// Example definition shipped with the crate; mirrors the builtin
/// Schwarzschild metric with M = 1.
pub const SCHWARZSCHILD_EXAMPLE: &str = include_str!("../data/schwarzschild.metric");

#[derive(Debug, Clone, Error)]
pub enum DslError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {err}")]
    Expression { line: usize, err: ParseError },
    #[error("missing metric component g_{0}{1}")]
    MissingComponent(usize, usize),
    #[error("metric is not symmetric: g_{i}{j} and g_{j}{i} differ")]
    NotSymmetric { i: usize, j: usize },
    #[error("missing [{0}] section")]
    MissingSection(&'static str),
    #[error("missing `{0}` in [meta]")]
    MissingMeta(&'static str),
    #[error("domain interval missing for coordinate `{0}`")]
    MissingDomain(String),
}

/// Parse a metric definition. `overrides` replaces declared parameter
/// values (so one file serves several parameter choices).
pub fn load_metric(
    text: &str,
    overrides: &BTreeMap<String, f64>,
) -> Result<MetricSpec, DslError> {
    let mut section = None;
    let mut meta: BTreeMap<String, (String, usize)> = BTreeMap::new();
    let mut domain_lines: Vec<(String, String, usize)> = Vec::new();
    let mut metric_lines: Vec<(String, String, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = Some(match name {
                "meta" => 0,
                "domain" => 1,
                "metric" => 2,
                other => {
                    return Err(DslError::Malformed {
                        line: lineno,
                        msg: format!("unknown section [{other}]"),
                    })
                }
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(DslError::Malformed {
            line: lineno,
            msg: "expected `key = value`".into(),
        })?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        match section {
            Some(0) => {
                meta.insert(key, (value, lineno));
            }
            Some(1) => domain_lines.push((key, value, lineno)),
            Some(2) => metric_lines.push((key, value, lineno)),
            _ => {
                return Err(DslError::Malformed {
                    line: lineno,
                    msg: "content before the first section header".into(),
                })
            }
        }
    }

    let name = meta
        .get("name")
        .ok_or(DslError::MissingMeta("name"))?
        .0
        .clone();
    let (coords_raw, coords_line) =
        meta.get("coordinates").ok_or(DslError::MissingMeta("coordinates"))?.clone();
    let coord_names: Vec<String> =
        coords_raw.split_whitespace().map(str::to_string).collect();
    if coord_names.len() != DIM {
        return Err(DslError::Malformed {
            line: coords_line,
            msg: format!("expected {DIM} coordinates, found {}", coord_names.len()),
        });
    }
    let chart = Chart::new(coord_names.clone());

    // parameters = M=1 k=0 ...
    let mut params: BTreeMap<String, f64> = BTreeMap::new();
    if let Some((raw, lineno)) = meta.get("parameters") {
        for tok in raw.split_whitespace() {
            let (pname, pval) = tok.split_once('=').ok_or(DslError::Malformed {
                line: *lineno,
                msg: format!("parameter `{tok}` needs the form name=value"),
            })?;
            let v: f64 = pval.parse().map_err(|e| DslError::Malformed {
                line: *lineno,
                msg: format!("bad parameter value `{pval}`: {e}"),
            })?;
            params.insert(pname.to_string(), v);
        }
    }
    for (k, v) in overrides {
        params.insert(k.clone(), *v);
    }

    let mut bindings: BTreeMap<String, Expr> =
        params.iter().map(|(k, v)| (k.clone(), Expr::real(*v))).collect();

    let scale_factor = match meta.get("scale_factor") {
        Some((raw, lineno)) => {
            let e = parse_with_bindings(raw, &chart, &bindings)
                .map_err(|err| DslError::Expression { line: *lineno, err })?;
            bindings.insert("R".into(), e.clone());
            Some(e)
        }
        None => None,
    };

    let mut intervals = vec![None; DIM];
    for (key, value, lineno) in &domain_lines {
        let i = chart.index_of(key).ok_or(DslError::Malformed {
            line: *lineno,
            msg: format!("`{key}` is not a declared coordinate"),
        })?;
        let body = value
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or(DslError::Malformed {
                line: *lineno,
                msg: "expected `(lo, hi)`".into(),
            })?;
        let (lo, hi) = body.split_once(',').ok_or(DslError::Malformed {
            line: *lineno,
            msg: "expected `(lo, hi)`".into(),
        })?;
        let lo: f64 = lo.trim().parse().map_err(|e| DslError::Malformed {
            line: *lineno,
            msg: format!("bad lower bound: {e}"),
        })?;
        let hi: f64 = hi.trim().parse().map_err(|e| DslError::Malformed {
            line: *lineno,
            msg: format!("bad upper bound: {e}"),
        })?;
        intervals[i] = Some((lo, hi));
    }
    let intervals: Vec<(f64, f64)> = intervals
        .into_iter()
        .enumerate()
        .map(|(i, iv)| iv.ok_or_else(|| DslError::MissingDomain(chart.name(i).to_string())))
        .collect::<Result<_, _>>()?;

    let mut slots: Vec<Option<(Expr, usize)>> = vec![None; DIM * DIM];
    for (key, value, lineno) in &metric_lines {
        let idx = key.strip_prefix("g_").ok_or(DslError::Malformed {
            line: *lineno,
            msg: format!("expected g_IJ, found `{key}`"),
        })?;
        let bytes = idx.as_bytes();
        if bytes.len() != 2 || !bytes[0].is_ascii_digit() || !bytes[1].is_ascii_digit() {
            return Err(DslError::Malformed {
                line: *lineno,
                msg: format!("expected two index digits in `{key}`"),
            });
        }
        let (i, j) = ((bytes[0] - b'0') as usize, (bytes[1] - b'0') as usize);
        if !(1..=DIM).contains(&i) || !(1..=DIM).contains(&j) {
            return Err(DslError::Malformed {
                line: *lineno,
                msg: format!("indices out of range in `{key}`"),
            });
        }
        let e = parse_with_bindings(value, &chart, &bindings)
            .map_err(|err| DslError::Expression { line: *lineno, err })?;
        slots[(i - 1) * DIM + (j - 1)] = Some((e, *lineno));
    }

    let mut components = vec![Expr::zero(); DIM * DIM];
    for i in 0..DIM {
        match &slots[i * DIM + i] {
            Some((e, _)) => components[i * DIM + i] = e.clone(),
            None => return Err(DslError::MissingComponent(i + 1, i + 1)),
        }
    }
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            match (&slots[i * DIM + j], &slots[j * DIM + i]) {
                (Some((a, _)), Some((b, _))) => {
                    if a != b {
                        return Err(DslError::NotSymmetric { i: i + 1, j: j + 1 });
                    }
                    components[i * DIM + j] = a.clone();
                    components[j * DIM + i] = a.clone();
                }
                (Some((a, _)), None) | (None, Some((a, _))) => {
                    components[i * DIM + j] = a.clone();
                    components[j * DIM + i] = a.clone();
                }
                (None, None) => {}
            }
        }
    }

    let mut spec = MetricSpec::new(name, components, DomainBox::new(intervals));
    spec.params = params;
    spec.scale_factor = scale_factor;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::schwarzschild;
    use crate::sample::numeric_equal;

    #[test]
    fn shipped_file_matches_builtin() {
        let loaded = load_metric(SCHWARZSCHILD_EXAMPLE, &BTreeMap::new()).unwrap();
        let builtin = schwarzschild(1.0).unwrap();
        for i in 0..DIM {
            for j in 0..DIM {
                let c = numeric_equal(
                    loaded.get(i, j),
                    builtin.get(i, j),
                    &builtin.domain,
                    50,
                    1e-12,
                    99,
                    0.7,
                )
                .unwrap();
                assert!(c.passed, "g[{i}][{j}] residual {}", c.max_residual);
            }
        }
    }

    #[test]
    fn parameter_overrides_apply() {
        let mut ov = BTreeMap::new();
        ov.insert("M".to_string(), 2.0);
        let loaded = load_metric(SCHWARZSCHILD_EXAMPLE, &ov).unwrap();
        let builtin = schwarzschild(2.0).unwrap();
        // compare on the M = 2 exterior domain
        let c = numeric_equal(
            loaded.get(1, 1),
            builtin.get(1, 1),
            &builtin.domain,
            30,
            1e-12,
            7,
            0.7,
        )
        .unwrap();
        assert!(c.passed);
    }

    #[test]
    fn missing_component_names_the_slot() {
        let text = SCHWARZSCHILD_EXAMPLE.replace("g_33", "# g_33");
        match load_metric(&text, &BTreeMap::new()) {
            Err(DslError::MissingComponent(3, 3)) => {}
            other => panic!("expected missing (3,3), got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_files_are_rejected() {
        let text = format!("{SCHWARZSCHILD_EXAMPLE}\ng_12 = q1\ng_21 = q2\n");
        match load_metric(&text, &BTreeMap::new()) {
            Err(DslError::NotSymmetric { i: 1, j: 2 }) => {}
            other => panic!("expected symmetry rejection, got {other:?}"),
        }
    }

    #[test]
    fn expression_errors_carry_location() {
        let text = SCHWARZSCHILD_EXAMPLE.replace("sin(q3)^2", "sine(q3)^2");
        match load_metric(&text, &BTreeMap::new()) {
            Err(DslError::Expression { line, .. }) => assert!(line > 0),
            other => panic!("expected expression error, got {other:?}"),
        }
    }
}
