use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::planar::{VelocityDistribution, VelocityDistributionJson};
use crate::positioning::{ShiftBox, ShiftMethod};

/// `w1` given literally or from a transversal speed `w_ref` at height
/// `h_ref` above the branch point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum W1Spec {
    Literal(f64),
    FromTransversal { w_ref: f64, h_ref: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionConfig {
    pub id: String,
    /// Absent only for glued degree-2 sections after the first.
    pub lower: Option<VelocityDistribution>,
    pub upper: VelocityDistribution,
    pub w1: W1Spec,
    pub degree: u8,
    pub w2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositioningConfig {
    pub method: ShiftMethod,
    pub bounds: Option<ShiftBox>,
    pub partition: Option<usize>,
    /// Height between the two blades of a section.
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignConfig {
    pub sections: Vec<SectionConfig>,
    pub n_boundary: usize,
    pub positioning: PositioningConfig,
    pub output_directory: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
}

impl DesignConfig {
    pub fn degree(&self) -> u8 {
        self.sections[0].degree
    }
}

fn missing(path: &str) -> Error {
    Error::MissingField(path.to_string())
}

fn bad(path: &str, message: impl Into<String>) -> Error {
    Error::BadValue {
        path: path.to_string(),
        message: message.into(),
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| bad(path, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| missing(&format!("{path}/{key}")))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| bad(path, "expected a finite number"))
}

fn count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| bad(path, "expected a non-negative integer"))
}

fn blade(v: &Value, path: &str, base: &Path) -> Result<VelocityDistribution> {
    let wrap = |e: Error| match e {
        e @ (Error::Io { .. } | Error::MissingField(_) | Error::BadValue { .. }) => e,
        other => bad(path, other.to_string()),
    };
    match v {
        Value::String(file) => {
            let p = base.join(file);
            let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            let j: VelocityDistributionJson = serde_json::from_str(&text)
                .map_err(|e| bad(path, format!("{}: {e}", p.display())))?;
            VelocityDistribution::from_json_value(j).map_err(wrap)
        }
        Value::Object(obj) => {
            for key in ["samples", "v_inf", "incidence", "branch_indices"] {
                field(obj, key, path)?;
            }
            let j: VelocityDistributionJson =
                serde_json::from_value(v.clone()).map_err(|e| bad(path, e.to_string()))?;
            VelocityDistribution::from_json_value(j).map_err(wrap)
        }
        _ => Err(bad(
            path,
            "expected a velocity distribution object or a file path",
        )),
    }
}

fn w1_spec(v: &Value, path: &str) -> Result<W1Spec> {
    if v.is_number() {
        return Ok(W1Spec::Literal(number(v, path)?));
    }
    let obj = object(v, path)?;
    let t = field(obj, "from_transversal", path)?;
    let tp = format!("{path}/from_transversal");
    let t = object(t, &tp)?;
    Ok(W1Spec::FromTransversal {
        w_ref: number(field(t, "w_ref", &tp)?, &format!("{tp}/w_ref"))?,
        h_ref: number(field(t, "h_ref", &tp)?, &format!("{tp}/h_ref"))?,
    })
}

fn section(v: &Value, path: &str, base: &Path, chained: bool) -> Result<SectionConfig> {
    let obj = object(v, path)?;
    let id = field(obj, "id", path)?
        .as_str()
        .filter(|s| {
            !s.is_empty()
                && s.chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        })
        .ok_or_else(|| {
            bad(
                &format!("{path}/id"),
                "expected a non-empty name of [A-Za-z0-9_-]",
            )
        })?
        .to_string();
    let degree = match obj.get("degree") {
        None => 1,
        Some(d) => match d.as_u64() {
            Some(1) => 1,
            Some(2) => 2,
            _ => return Err(bad(&format!("{path}/degree"), "degree must be 1 or 2")),
        },
    };
    let lower = match obj.get("lower") {
        Some(l) => Some(blade(l, &format!("{path}/lower"), base)?),
        None if chained && degree == 2 => None,
        None => return Err(missing(&format!("{path}/lower"))),
    };
    let upper = blade(field(obj, "upper", path)?, &format!("{path}/upper"), base)?;
    let w1 = w1_spec(field(obj, "w1", path)?, &format!("{path}/w1"))?;
    let w2 = match obj.get("w2") {
        Some(x) => Some(number(x, &format!("{path}/w2"))?),
        None => None,
    };
    Ok(SectionConfig {
        id,
        lower,
        upper,
        w1,
        degree,
        w2,
    })
}

/// Parses and validates a design configuration. Blade files named by
/// relative paths are resolved against `base`.
pub fn parse_config_str(text: &str, base: &Path) -> Result<DesignConfig> {
    let root: Value = serde_json::from_str(text)?;
    let obj = object(&root, "")?;

    let list = field(obj, "sections", "")?
        .as_array()
        .ok_or_else(|| bad("/sections", "expected an array"))?;
    if list.is_empty() {
        return Err(bad("/sections", "at least one section is required"));
    }
    let mut sections = Vec::with_capacity(list.len());
    for (i, s) in list.iter().enumerate() {
        sections.push(section(s, &format!("/sections/{i}"), base, i > 0)?);
    }
    let degree = sections[0].degree;
    for (i, s) in sections.iter().enumerate() {
        if s.degree != degree {
            return Err(bad(
                &format!("/sections/{i}/degree"),
                "degree must be uniform across sections",
            ));
        }
    }
    if degree == 2 && sections[0].w2.is_none() {
        return Err(missing("/sections/0/w2"));
    }
    let mut ids: Vec<&str> = sections.iter().map(|s| s.id.as_str()).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(bad("/sections", "section ids must be unique"));
    }

    let disc = object(field(obj, "discretization", "")?, "/discretization")?;
    let n_boundary = count(
        field(disc, "n_boundary", "/discretization")?,
        "/discretization/n_boundary",
    )?;
    if !n_boundary.is_power_of_two() {
        return Err(Error::NotPowerOfTwo {
            path: "/discretization/n_boundary".into(),
            value: n_boundary,
        });
    }
    if n_boundary < 64 {
        return Err(bad("/discretization/n_boundary", "must be at least 64"));
    }

    let positioning = match obj.get("positioning") {
        None => PositioningConfig {
            method: ShiftMethod::Lsq,
            bounds: None,
            partition: None,
            spacing: 1.0,
        },
        Some(p) => {
            let p = object(p, "/positioning")?;
            let method = match p.get("method") {
                None => ShiftMethod::Lsq,
                Some(m) => m
                    .as_str()
                    .ok_or_else(|| bad("/positioning/method", "expected a string"))?
                    .parse()
                    .map_err(|_| bad("/positioning/method", "expected lsq, area or lift"))?,
            };
            let bounds = match p.get("box") {
                None => None,
                Some(b) => {
                    let arr = b
                        .as_array()
                        .filter(|a| a.len() == 4)
                        .ok_or_else(|| bad("/positioning/box", "expected [x0, y0, x1, y1]"))?;
                    let c: Vec<f64> = arr
                        .iter()
                        .enumerate()
                        .map(|(i, x)| number(x, &format!("/positioning/box/{i}")))
                        .collect::<Result<_>>()?;
                    Some(ShiftBox::new(c[0], c[1], c[2], c[3])?)
                }
            };
            if method == ShiftMethod::Lift && bounds.is_none() {
                return Err(missing("/positioning/box"));
            }
            let partition = match p.get("partition") {
                None => None,
                Some(k) => Some(count(k, "/positioning/partition")?),
            };
            let spacing = match p.get("spacing") {
                None => 1.0,
                Some(s) => number(s, "/positioning/spacing")?,
            };
            if spacing <= 0.0 {
                return Err(bad("/positioning/spacing", "must be positive"));
            }
            PositioningConfig {
                method,
                bounds,
                partition,
                spacing,
            }
        }
    };

    let (output_directory, formats) = match obj.get("output") {
        None => (
            None,
            vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg],
        ),
        Some(o) => {
            let o = object(o, "/output")?;
            let dir = match o.get("directory") {
                None => None,
                Some(d) => {
                    Some(PathBuf::from(d.as_str().ok_or_else(|| {
                        bad("/output/directory", "expected a string")
                    })?))
                }
            };
            let formats = match o.get("formats") {
                None => vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg],
                Some(f) => f
                    .as_array()
                    .ok_or_else(|| bad("/output/formats", "expected an array"))?
                    .iter()
                    .enumerate()
                    .map(|(i, x)| match x.as_str() {
                        Some("csv") => Ok(OutputFormat::Csv),
                        Some("json") => Ok(OutputFormat::Json),
                        Some("svg") => Ok(OutputFormat::Svg),
                        _ => Err(bad(
                            &format!("/output/formats/{i}"),
                            "expected csv, json or svg",
                        )),
                    })
                    .collect::<Result<_>>()?,
            };
            (dir, formats)
        }
    };

    Ok(DesignConfig {
        sections,
        n_boundary,
        positioning,
        output_directory,
        formats,
    })
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<DesignConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config_str(&text, base)
}

/// `w1` from the section's specification. With `w0(B) = 0`, a transversal
/// speed `w_ref` at height `h_ref` above `B` gives `w1 = w_ref / h_ref`.
pub fn determine_w1(s: &SectionConfig) -> Result<f64> {
    match s.w1 {
        W1Spec::Literal(w) => Ok(w),
        W1Spec::FromTransversal { h_ref, .. } if h_ref == 0.0 => Err(bad(
            "/w1/from_transversal/h_ref",
            "reference height must be nonzero",
        )),
        W1Spec::FromTransversal { w_ref, h_ref } => Ok(w_ref / h_ref),
    }
}
