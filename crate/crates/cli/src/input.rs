//! Input-file and literal parsing: insertion lists, Fock states, complex
//! and rational literals. All errors here are configuration errors and map
//! to exit code 2.

use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;

use svoa::exact::poly::v;
use svoa::exact::rational::{rat_parse, Rational};
use svoa::{FockVector, Insertion, SchottkyConfig};

/// Loads a Schottky configuration and re-checks its invariants (serde alone
/// does not validate).
pub fn load_schottky(path: &Path) -> Result<SchottkyConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg: SchottkyConfig = serde_json::from_str(&text)
        .with_context(|| format!("malformed config {}", path.display()))?;
    cfg.validate()
        .with_context(|| format!("invalid config {}", path.display()))?;
    Ok(cfg)
}

/// Loads an insertion list: a JSON array of `{"state": ..., "point": "y1"}`
/// objects. See docs/cli.md for the state forms.
pub fn load_insertions(path: &Path) -> Result<Vec<Insertion>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read insertions {}", path.display()))?;
    let items: Vec<serde_json::Value> = serde_json::from_str(&text)
        .with_context(|| format!("malformed insertions {}", path.display()))?;
    let mut out = Vec::with_capacity(items.len());
    for (k, item) in items.iter().enumerate() {
        let obj = item
            .as_object()
            .with_context(|| format!("insertion {k} is not an object"))?;
        let state = obj
            .get("state")
            .with_context(|| format!("insertion {k} has no \"state\""))?;
        let point = obj
            .get("point")
            .and_then(|p| p.as_str())
            .with_context(|| format!("insertion {k} has no string \"point\""))?;
        out.push(Insertion::new(
            parse_state(state).with_context(|| format!("insertion {k}"))?,
            v(point),
        ));
    }
    Ok(out)
}

/// A Fock state from JSON: the shorthands "vacuum", "a", "omega", or
/// `{"terms": [{"modes": [3,1], "coeff": "-2/5"}, ...]}` where `modes` lists
/// the created modes k of a(-k) and `coeff` is an exact rational (default 1).
pub fn parse_state(value: &serde_json::Value) -> Result<FockVector> {
    match value {
        serde_json::Value::String(s) => match s.as_str() {
            "vacuum" | "1" => Ok(FockVector::vacuum()),
            "a" => Ok(FockVector::a()),
            "omega" => Ok(FockVector::omega()),
            other => bail!("unknown state shorthand {other:?} (try \"a\", \"omega\", \"vacuum\", or a {{\"terms\": ...}} object)"),
        },
        serde_json::Value::Object(map) => {
            let terms = map
                .get("terms")
                .and_then(|t| t.as_array())
                .context("state object needs a \"terms\" array")?;
            let mut acc = FockVector::zero();
            for (k, term) in terms.iter().enumerate() {
                let tobj = term
                    .as_object()
                    .with_context(|| format!("state term {k} is not an object"))?;
                let modes: Vec<u32> = tobj
                    .get("modes")
                    .and_then(|m| m.as_array())
                    .with_context(|| format!("state term {k} has no \"modes\" array"))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .and_then(|n| u32::try_from(n).ok())
                            .filter(|&n| n > 0)
                            .with_context(|| format!("state term {k}: modes must be positive integers"))
                    })
                    .collect::<Result<_>>()?;
                let coeff = match tobj.get("coeff") {
                    None => Rational::from_integer(1.into()),
                    Some(serde_json::Value::String(s)) => rat_parse(s)
                        .with_context(|| format!("state term {k}: bad coeff"))?,
                    Some(_) => bail!("state term {k}: coeff must be a string like \"-2/5\""),
                };
                acc = acc.add(&FockVector::state(&modes).scale(&coeff));
            }
            if acc.is_zero() {
                bail!("state sums to zero");
            }
            Ok(acc)
        }
        _ => bail!("state must be a string shorthand or a {{\"terms\": ...}} object"),
    }
}

/// A state given inline on the command line: a shorthand name or a JSON
/// object literal.
pub fn parse_state_arg(s: &str) -> Result<FockVector> {
    let trimmed = s.trim();
    if trimmed.starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(trimmed).context("state argument is not valid JSON")?;
        parse_state(&value)
    } else {
        parse_state(&serde_json::Value::String(trimmed.to_string()))
    }
}

/// "re,im" or a bare "re".
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let parse_part = |p: &str| -> Result<f64> {
        p.trim()
            .parse::<f64>()
            .with_context(|| format!("bad float {p:?} in complex literal {s:?}"))
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse_part(re)?, parse_part(im)?)),
        None => Ok(Complex64::new(parse_part(s)?, 0.0)),
    }
}

/// Comma-separated exact rationals, e.g. "0,1,2" or "-1,3/2,7".
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(|tok| rat_parse(tok).map_err(|e| anyhow::anyhow!("bad rational {tok:?}: {e}")))
        .collect()
}
