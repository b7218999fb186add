//! Loading charts, forms, maps and points from the command line.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use bcontact::chart::{Chart, ChartDoc};
use bcontact::contact::ContactError;
use bcontact::exterior::{parse_form, parse_vector, BForm, BMultiVector, ChartMap, ExteriorError};
use bcontact::jacobi::JacobiError;
use bcontact::scalar::{parse_scalar, Point, ScalarExpr};
use bcontact::singular::SingularError;
use serde::Deserialize;
use serde_json::Value;

/// Why a run stopped before producing a verdict.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or input documents (exit 2).
    Input(String),
    /// The computation itself rejected the input on mathematical grounds
    /// (exit 1).
    Math(String),
}

pub type Res<T> = Result<T, Failure>;

pub fn input_err(msg: impl std::fmt::Display) -> Failure {
    Failure::Input(msg.to_string())
}

impl From<ExteriorError> for Failure {
    fn from(e: ExteriorError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ContactError> for Failure {
    fn from(e: ContactError) -> Self {
        match e {
            ContactError::Shape(_) | ContactError::Exterior(_) | ContactError::NotOnZ(_) | ContactError::Invalid(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Math(e.to_string()),
        }
    }
}

impl From<JacobiError> for Failure {
    fn from(e: JacobiError) -> Self {
        match e {
            JacobiError::Contact(c) => c.into(),
            JacobiError::Exterior(x) => x.into(),
            JacobiError::Invalid(_) => Failure::Input(e.to_string()),
            _ => Failure::Math(e.to_string()),
        }
    }
}

impl From<SingularError> for Failure {
    fn from(e: SingularError) -> Self {
        match e {
            SingularError::Contact(c) => c.into(),
            SingularError::Jacobi(j) => j.into(),
            SingularError::Exterior(x) => x.into(),
            SingularError::Invariant { .. }
            | SingularError::Parity { .. }
            | SingularError::Dimension(_)
            | SingularError::Invalid(_) => Failure::Input(e.to_string()),
            _ => Failure::Math(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn chart_from_value(v: Value) -> Res<Chart> {
    let doc: ChartDoc = serde_json::from_value(v).map_err(|e| input_err(format!("chart document: {e}")))?;
    Chart::from_doc(&doc).map_err(input_err)
}

pub fn load_chart(path: &Path) -> Res<Arc<Chart>> {
    let v: Value = serde_json::from_str(&read(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    Ok(Arc::new(chart_from_value(v)?))
}

/// A form literal with the chart it lives on.
pub struct FormInput {
    pub chart: Arc<Chart>,
    pub text: String,
}

/// `--form-file` holds either a bare literal or a form document
/// `{"chart": {...}, "form": "..."}`; an explicit `--chart` wins.
pub fn load_form_input(chart: Option<&Path>, form: Option<&str>, form_file: Option<&Path>) -> Res<FormInput> {
    let (text, doc_chart) = match (form, form_file) {
        (Some(f), None) => (f.to_string(), None),
        (None, Some(path)) => {
            let raw = read(path)?;
            match serde_json::from_str::<Value>(&raw) {
                Ok(Value::Object(mut o)) => {
                    let text = o
                        .remove("form")
                        .and_then(|f| f.as_str().map(str::to_string))
                        .ok_or_else(|| input_err(format!("{}: missing \"form\"", path.display())))?;
                    let c = o.remove("chart").map(chart_from_value).transpose()?;
                    (text, c)
                }
                _ => (raw.trim().to_string(), None),
            }
        }
        (None, None) => return Err(input_err("one of --form or --form-file is required")),
        (Some(_), Some(_)) => return Err(input_err("--form and --form-file are exclusive")),
    };
    let chart = match (chart, doc_chart) {
        (Some(p), _) => load_chart(p)?,
        (None, Some(c)) => Arc::new(c),
        (None, None) => return Err(input_err("--chart is required")),
    };
    Ok(FormInput { chart, text })
}

impl FormInput {
    pub fn form(&self) -> Res<BForm> {
        Ok(parse_form(&self.text, &self.chart)?)
    }

    pub fn one_form(&self) -> Res<BForm> {
        let f = self.form()?;
        if f.degree() != 1 {
            return Err(input_err(format!("expected a 1-form, got degree {}", f.degree())));
        }
        Ok(f)
    }
}

pub fn vector(text: &str, chart: &Arc<Chart>) -> Res<BMultiVector> {
    Ok(parse_vector(text, chart)?)
}

pub fn scalar(text: &str, chart: &Chart) -> Res<ScalarExpr> {
    parse_scalar(text, chart).map_err(|e| input_err(format!("`{text}`: {e}")))
}

/// `name=value,...`; unspecified coordinates take the box midpoint.
pub fn point(text: &str, chart: &Chart) -> Res<Point> {
    let mut pairs = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| input_err(format!("point component `{part}` is not name=value")))?;
        let name = name.trim();
        if chart.index_of(name).is_none() {
            return Err(input_err(format!("`{name}` is not a chart coordinate")));
        }
        let v: f64 = value.trim().parse().map_err(|_| input_err(format!("`{value}` is not a number")))?;
        pairs.push((name.to_string(), v));
    }
    let refs: Vec<(&str, f64)> = pairs.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    Ok(chart.point_from(&refs))
}

#[derive(Deserialize)]
struct MapDoc {
    source: Value,
    components: Vec<String>,
    #[serde(default)]
    defining: Option<DefiningDoc>,
}

#[derive(Deserialize)]
struct DefiningDoc {
    unit: String,
    #[serde(default)]
    unit_inv: Option<String>,
    exponent: i64,
}

/// Map document: `{"source": chart, "components": [...], "defining":
/// {"unit": ..., "unit_inv": ..., "exponent": m}}`, components written in
/// the source coordinates, one per target coordinate.
pub fn load_map(path: &Path, target: &Arc<Chart>) -> Res<ChartMap> {
    let doc: MapDoc =
        serde_json::from_str(&read(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let source = Arc::new(chart_from_value(doc.source)?);
    let comps = doc
        .components
        .iter()
        .map(|c| scalar(c, &source))
        .collect::<Res<Vec<_>>>()?;
    let mut map = ChartMap::new(&source, target, comps)?;
    if let Some(d) = doc.defining {
        let unit = scalar(&d.unit, &source)?;
        let inv = d.unit_inv.as_deref().map(|u| scalar(u, &source)).transpose()?;
        map = map.with_defining(unit, inv, d.exponent);
    }
    Ok(map)
}
