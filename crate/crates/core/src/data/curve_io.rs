//! Curve and summary output in CSV, JSON and SVG.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curve::EffectCurve;
use crate::data::svg::render_svg;
use crate::error::{Error, Result};
use crate::summary::SummaryEffects;

/// Schema tag carried by every JSON curve document.
pub const CURVE_SCHEMA: &str = "bqte.effect-curve/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveFormat {
    Csv,
    Json,
    Svg,
}

impl CurveFormat {
    pub fn extension(self) -> &'static str {
        match self {
            CurveFormat::Csv => "csv",
            CurveFormat::Json => "json",
            CurveFormat::Svg => "svg",
        }
    }
}

impl fmt::Display for CurveFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for CurveFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(CurveFormat::Csv),
            "json" => Ok(CurveFormat::Json),
            "svg" => Ok(CurveFormat::Svg),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Serialize)]
struct CurveDocumentRef<'a> {
    schema: &'a str,
    #[serde(flatten)]
    curve: &'a EffectCurve,
}

#[derive(Deserialize)]
struct CurveDocument {
    schema: String,
    #[serde(flatten)]
    curve: EffectCurve,
}

pub fn serialize_curve(curve: &EffectCurve, format: CurveFormat) -> Result<Vec<u8>> {
    match format {
        CurveFormat::Csv => curve_csv(curve),
        CurveFormat::Json => {
            let doc = CurveDocumentRef {
                schema: CURVE_SCHEMA,
                curve,
            };
            let mut out = serde_json::to_vec_pretty(&doc)?;
            out.push(b'\n');
            Ok(out)
        }
        CurveFormat::Svg => Ok(render_svg(curve).into_bytes()),
    }
}

fn curve_csv(curve: &EffectCurve) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "estimate", "ci_low", "ci_high"])?;
    for p in &curve.points {
        w.write_record([p.x, p.estimate, p.ci_low, p.ci_high].map(|v| v.to_string()))?;
    }
    w.into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Parses a JSON curve document, checking its schema tag.
pub fn parse_curve_json(bytes: &[u8]) -> Result<EffectCurve> {
    let doc: CurveDocument = serde_json::from_slice(bytes)?;
    if doc.schema != CURVE_SCHEMA {
        return Err(Error::Data(format!("unsupported curve schema `{}`", doc.schema)));
    }
    Ok(doc.curve)
}

/// Several curves as one JSON array of curve documents.
pub fn serialize_curve_set(curves: &[EffectCurve]) -> Result<Vec<u8>> {
    let docs: Vec<_> = curves
        .iter()
        .map(|curve| CurveDocumentRef {
            schema: CURVE_SCHEMA,
            curve,
        })
        .collect();
    let mut out = serde_json::to_vec_pretty(&docs)?;
    out.push(b'\n');
    Ok(out)
}

pub fn parse_curve_set_json(bytes: &[u8]) -> Result<Vec<EffectCurve>> {
    let docs: Vec<CurveDocument> = serde_json::from_slice(bytes)?;
    docs.into_iter()
        .map(|d| {
            if d.schema == CURVE_SCHEMA {
                Ok(d.curve)
            } else {
                Err(Error::Data(format!("unsupported curve schema `{}`", d.schema)))
            }
        })
        .collect()
}

/// Schema tag for JSON summary documents.
pub const SUMMARY_SCHEMA: &str = "bqte.summary/v1";

#[derive(Serialize)]
struct SummaryDocumentRef<'a> {
    schema: &'a str,
    #[serde(flatten)]
    summary: &'a SummaryEffects,
}

/// CSV has one row per quantity (`ate`, `rom`, `relative_reduction`).
/// There is no SVG form.
pub fn serialize_summary(summary: &SummaryEffects, format: CurveFormat) -> Result<Vec<u8>> {
    match format {
        CurveFormat::Json => {
            let mut out = serde_json::to_vec_pretty(&SummaryDocumentRef {
                schema: SUMMARY_SCHEMA,
                summary,
            })?;
            out.push(b'\n');
            Ok(out)
        }
        CurveFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["quantity", "estimate", "ci_low", "ci_high"])?;
            for (name, iv) in [
                ("ate", summary.ate),
                ("rom", summary.rom),
                ("relative_reduction", summary.relative_reduction),
            ] {
                w.write_record([
                    name.to_string(),
                    iv.estimate.to_string(),
                    iv.ci_low.to_string(),
                    iv.ci_high.to_string(),
                ])?;
            }
            w.into_inner()
                .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
        }
        CurveFormat::Svg => Err(Error::Unsupported("summaries have no svg form".into())),
    }
}
