//! Run configuration: a JSON file mirroring the command-line flags, with the
//! flags taking precedence over the file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::funcspace::{FieldDescriptor, PotentialDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

/// Configuration file contents. Every field is optional; command-line flags
/// override whatever the file provides.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub potential: Option<PotentialDescriptor>,
    #[serde(default)]
    pub field: Option<FieldDescriptor>,
    #[serde(default)]
    pub n: Option<usize>,
    /// Per-axis sweep range, `lo:hi:step`.
    #[serde(default)]
    pub range: Option<String>,
    #[serde(default)]
    pub quad_points: Option<usize>,
    #[serde(default)]
    pub tol_psd: Option<f64>,
    #[serde(default)]
    pub tol_convex: Option<f64>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("cannot parse config {}: {e}", path.display()))
    }
}

/// A one-axis sweep `lo:hi:step`, reused across all axes of a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl RangeSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range `{text}` is not of the form lo:hi:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("range `{text}`: {e}")))
            .collect::<Result<_, _>>()?;
        let (lo, hi, step) = (nums[0], nums[1], nums[2]);
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err(format!("range `{text}` has non-finite entries"));
        }
        if hi < lo {
            return Err(format!("range `{text}` has hi < lo"));
        }
        if step <= 0.0 {
            return Err(format!("range `{text}` needs a positive step"));
        }
        Ok(Self { lo, hi, step })
    }

    /// Points `lo, lo+step, …` up to `hi` (inclusive, with a small slack so
    /// `0:1:0.25` lands on 1 exactly).
    pub fn axis_points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step * (1.0 + 1e-12)).floor() as usize + 1;
        (0..count).map(|k| self.lo + k as f64 * self.step).collect()
    }

    pub fn count(&self) -> usize {
        self.axis_points().len()
    }
}

/// Parse a comma-separated coordinate list, e.g. `0.3,-0.2`.
pub fn parse_point(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad coordinate `{}` in `{text}`: {e}", p.trim()))
        })
        .collect()
}

/// Parse repeated `key=value` parameter flags.
pub fn parse_params(items: &[String]) -> Result<std::collections::BTreeMap<String, f64>, String> {
    let mut map = std::collections::BTreeMap::new();
    for item in items {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("parameter `{item}` is not of the form key=value"))?;
        let value = v
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("parameter `{item}`: {e}"))?;
        map.insert(k.trim().to_string(), value);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parses_and_lands_on_endpoint() {
        let r = RangeSpec::parse("-1:1:0.5").unwrap();
        assert_eq!(r.axis_points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(RangeSpec::parse("0:1:0.25").unwrap().count(), 5);
    }

    #[test]
    fn range_rejects_malformed_input() {
        assert!(RangeSpec::parse("1:0:0.5").is_err());
        assert!(RangeSpec::parse("0:1:0").is_err());
        assert!(RangeSpec::parse("0:1").is_err());
        assert!(RangeSpec::parse("a:b:c").is_err());
    }

    #[test]
    fn point_and_param_parsing() {
        assert_eq!(parse_point("0.5, -2").unwrap(), vec![0.5, -2.0]);
        assert!(parse_point("0.5,x").is_err());
        let p = parse_params(&["shift=1.5".into(), "c1=2".into()]).unwrap();
        assert_eq!(p["shift"], 1.5);
        assert_eq!(p["c1"], 2.0);
        assert!(parse_params(&["oops".into()]).is_err());
    }

    #[test]
    fn config_round_trip() {
        let cfg = RunConfig {
            potential: Some(PotentialDescriptor::bare("fubini_study", 2)),
            range: Some("-1:1:0.5".into()),
            format: Some(OutputFormat::Json),
            ..Default::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.potential.as_ref().unwrap().kind, "fubini_study");
        assert_eq!(back.range.as_deref(), Some("-1:1:0.5"));
        assert_eq!(back.format, Some(OutputFormat::Json));
    }
}
