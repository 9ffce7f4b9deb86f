//! Immersion spec files.
//!
//! Line-oriented `key = value` text. `#` starts a comment line. Keys:
//!
//! ```text
//! name       = free text (or a JSON string)
//! dim_domain = positive integer
//! components = JSON list of expression strings, may span several lines
//! base_point = JSON list of dim_domain numbers      (optional, default origin)
//! max_order  = positive integer                    (optional, default 2)
//! ```

use std::path::Path;

use serde_json::Value;

use super::{Immersion, ImmersionError};

pub const DEFAULT_MAX_ORDER: usize = 2;

/// An immersion together with the point and order it should be analyzed at.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionSpec {
    pub immersion: Immersion,
    pub base_point: Vec<f64>,
    pub max_order: usize,
}

impl ImmersionSpec {
    pub fn at_origin(immersion: Immersion, max_order: usize) -> Self {
        let base_point = vec![0.0; immersion.dim_domain()];
        Self {
            immersion,
            base_point,
            max_order,
        }
    }
}

fn spec_err(line: usize, message: impl Into<String>) -> ImmersionError {
    ImmersionError::Spec {
        line,
        message: message.into(),
    }
}

fn bracket_balance(s: &str) -> i64 {
    // Brackets inside JSON strings do not count.
    let mut depth = 0;
    let mut in_string = false;
    let mut escaped = false;
    for c in s.chars() {
        if in_string {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_string = false,
                _ => {}
            }
        } else {
            match c {
                '"' => in_string = true,
                '[' => depth += 1,
                ']' => depth -= 1,
                _ => {}
            }
        }
    }
    depth
}

fn parse_usize(value: &str, line: usize, key: &str) -> Result<usize, ImmersionError> {
    value.parse::<usize>().map_err(|_| {
        spec_err(
            line,
            format!("{key} must be a non-negative integer, got '{value}'"),
        )
    })
}

/// Parses spec-file text.
pub fn load_spec(text: &str) -> Result<ImmersionSpec, ImmersionError> {
    let mut name: Option<String> = None;
    let mut dim_domain: Option<(usize, usize)> = None;
    let mut components: Option<(usize, Vec<String>)> = None;
    let mut base_point: Option<(usize, Vec<f64>)> = None;
    let mut max_order: Option<usize> = None;

    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let line_no = i + 1;
        let raw = lines[i].trim();
        i += 1;
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let Some((key, value)) = raw.split_once('=') else {
            return Err(spec_err(line_no, "expected 'key = value'"));
        };
        let key = key.trim();
        let mut value = value.trim().to_string();
        if value.starts_with('[') {
            while bracket_balance(&value) > 0 {
                if i >= lines.len() {
                    return Err(spec_err(line_no, format!("unterminated list for '{key}'")));
                }
                value.push('\n');
                value.push_str(lines[i]);
                i += 1;
            }
        }
        let duplicate = || spec_err(line_no, format!("duplicate key '{key}'"));
        match key {
            "name" => {
                if name.is_some() {
                    return Err(duplicate());
                }
                name = Some(if value.starts_with('"') {
                    serde_json::from_str::<String>(&value)
                        .map_err(|e| spec_err(line_no, format!("bad name string: {e}")))?
                } else {
                    value
                });
            }
            "dim_domain" => {
                if dim_domain.is_some() {
                    return Err(duplicate());
                }
                dim_domain = Some((line_no, parse_usize(&value, line_no, key)?));
            }
            "max_order" => {
                if max_order.is_some() {
                    return Err(duplicate());
                }
                let r = parse_usize(&value, line_no, key)?;
                if r == 0 {
                    return Err(spec_err(line_no, "max_order must be at least 1"));
                }
                max_order = Some(r);
            }
            "components" => {
                if components.is_some() {
                    return Err(duplicate());
                }
                let list: Vec<String> = serde_json::from_str(&value).map_err(|e| {
                    spec_err(
                        line_no,
                        format!("components must be a list of strings: {e}"),
                    )
                })?;
                components = Some((line_no, list));
            }
            "base_point" => {
                if base_point.is_some() {
                    return Err(duplicate());
                }
                let parsed: Value = serde_json::from_str(&value)
                    .map_err(|e| spec_err(line_no, format!("base_point must be a list: {e}")))?;
                let Value::Array(items) = parsed else {
                    return Err(spec_err(line_no, "base_point must be a list of numbers"));
                };
                let coords = items
                    .iter()
                    .map(|v| v.as_f64().filter(|x| x.is_finite()))
                    .collect::<Option<Vec<f64>>>()
                    .ok_or_else(|| spec_err(line_no, "base_point must be a list of numbers"))?;
                base_point = Some((line_no, coords));
            }
            other => return Err(spec_err(line_no, format!("unknown key '{other}'"))),
        }
    }

    let end = lines.len().max(1);
    let (dim_line, n) = dim_domain.ok_or_else(|| spec_err(end, "missing key 'dim_domain'"))?;
    let (comp_line, comps) = components.ok_or_else(|| spec_err(end, "missing key 'components'"))?;
    let immersion = Immersion::parse(name.unwrap_or_else(|| "unnamed".into()), n, &comps).map_err(
        |e| match e {
            ImmersionError::Parse { .. } => spec_err(comp_line, e.to_string()),
            other => spec_err(dim_line, other.to_string()),
        },
    )?;
    let base_point = match base_point {
        Some((line, p)) => {
            if p.len() != n {
                return Err(spec_err(
                    line,
                    format!("base_point has {} coordinate(s), expected {n}", p.len()),
                ));
            }
            p
        }
        None => vec![0.0; n],
    };
    Ok(ImmersionSpec {
        immersion,
        base_point,
        max_order: max_order.unwrap_or(DEFAULT_MAX_ORDER),
    })
}

pub fn load_spec_file(path: impl AsRef<Path>) -> Result<ImmersionSpec, ImmersionError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| ImmersionError::Io(format!("{}: {e}", path.display())))?;
    load_spec(&text)
}

/// Renders a spec in the format read by [`load_spec`].
pub fn save_spec(spec: &ImmersionSpec) -> String {
    let im = &spec.immersion;
    let name: String = im
        .name()
        .chars()
        .map(|c| if c.is_control() { ' ' } else { c })
        .collect();
    let mut out = String::new();
    let name = name.trim();
    if name.is_empty() || name.starts_with('"') || name.starts_with('[') {
        out.push_str(&format!("name = {}\n", Value::String(name.to_string())));
    } else {
        out.push_str(&format!("name = {name}\n"));
    }
    out.push_str(&format!("dim_domain = {}\n", im.dim_domain()));
    out.push_str("components = [\n");
    let count = im.components().len();
    for (i, c) in im.components().iter().enumerate() {
        let quoted = Value::String(c.to_string()).to_string();
        let sep = if i + 1 < count { "," } else { "" };
        out.push_str(&format!("  {quoted}{sep}\n"));
    }
    out.push_str("]\n");
    let point: Vec<String> = spec.base_point.iter().map(|x| x.to_string()).collect();
    out.push_str(&format!("base_point = [{}]\n", point.join(", ")));
    out.push_str(&format!("max_order = {}\n", spec.max_order));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::extremal_example;

    #[test]
    fn minimal_file_uses_defaults() {
        let spec = load_spec("dim_domain = 1\ncomponents = [\"u1\", \"u1^2\"]\n").unwrap();
        assert_eq!(spec.immersion.dim_ambient(), 2);
        assert_eq!(spec.base_point, vec![0.0]);
        assert_eq!(spec.max_order, DEFAULT_MAX_ORDER);
    }

    #[test]
    fn missing_components_is_an_error() {
        let err = load_spec("name = x\ndim_domain = 1\n").unwrap_err();
        assert!(err.to_string().contains("components"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "name = x\ndim_domain = 1\ncomponents = [\"u1\",\n \"u2\"]\n";
        match load_spec(text).unwrap_err() {
            ImmersionError::Spec { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("out of range"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        match load_spec("dim_domain = 1\nbogus = 3\n").unwrap_err() {
            ImmersionError::Spec { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(load_spec("dim_domain = 1\ncomponents = [\"u1\"]\nbase_point = [1, 2]\n").is_err());
        assert!(load_spec("dim_domain = 1\ncomponents = [\"u1\"]\nmax_order = 0\n").is_err());
        assert!(load_spec("dim_domain = 1\ncomponents = [\"u1\"\n").is_err());
        assert!(load_spec("dim_domain = 1\ndim_domain = 1\n").is_err());
    }

    #[test]
    fn extremal_round_trips() {
        let spec = ImmersionSpec::at_origin(extremal_example(2, 2, None).unwrap(), 2);
        let text = save_spec(&spec);
        assert_eq!(load_spec(&text).unwrap(), spec);
    }

    #[test]
    fn comments_quoted_names_and_points() {
        let text = "# a helix\nname = \"helix [a=1]\"\ndim_domain = 1\n\ncomponents = [\"cos(u1)\", \"sin(u1)\", \"u1\"]\nbase_point = [0.25]\nmax_order = 3\n";
        let spec = load_spec(text).unwrap();
        assert_eq!(spec.immersion.name(), "helix [a=1]");
        assert_eq!(spec.base_point, vec![0.25]);
        assert_eq!(spec.max_order, 3);
        assert_eq!(load_spec(&save_spec(&spec)).unwrap(), spec);
    }
}
