//! Plain-text, CSV and JSON emission for profiles and reports.

use std::io::Write;
use std::path::Path;

use crate::orbitvol::OrbitProfile;

/// CSV rendering of an orbit profile. Columns:
/// `x1..xn,H,vol,logvol,ric_min,ric_max,mu1..mun`, rows in grid
/// (lexicographic) order, full-precision scientific notation.
pub fn profile_csv(profile: &OrbitProfile) -> String {
    let n = profile.n;
    let mut out = String::new();
    for j in 1..=n {
        out.push_str(&format!("x{j},"));
    }
    out.push_str("H,vol,logvol,ric_min,ric_max");
    for j in 1..=n {
        out.push_str(&format!(",mu{j}"));
    }
    out.push('\n');
    for row in &profile.rows {
        for v in &row.x {
            out.push_str(&format!("{v:.16e},"));
        }
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            row.density, row.volume, row.log_volume, row.ricci_min, row.ricci_max
        ));
        for v in &row.moment {
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push('\n');
    }
    out
}

pub fn profile_json(profile: &OrbitProfile) -> String {
    let mut s = serde_json::to_string_pretty(profile).expect("profile serialization");
    s.push('\n');
    s
}

/// Write to `path`, or to stdout when no path is given.
pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{make_builtin_potential, PotentialDescriptor};
    use crate::orbitvol::logvol_profile;
    use crate::psh::GridSpec;

    #[test]
    fn csv_has_contracted_header_and_row_count() {
        let p = make_builtin_potential(&PotentialDescriptor::bare("fubini_study", 2)).unwrap();
        let grid = GridSpec::uniform(vec![-0.5, -0.5], vec![0.5, 0.5], 3).unwrap();
        let prof = logvol_profile(&p, &grid).unwrap();
        let csv = profile_csv(&prof);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x1,x2,H,vol,logvol,ric_min,ric_max,mu1,mu2");
        assert_eq!(lines.count(), 9);
        // every data cell is full-precision scientific notation
        for line in csv.lines().skip(1) {
            assert_eq!(line.split(',').count(), 9);
            for cell in line.split(',') {
                assert!(cell.contains('e'), "cell {cell} not scientific");
                cell.parse::<f64>().unwrap();
            }
        }
    }

    #[test]
    fn json_mirror_parses_back() {
        let p = make_builtin_potential(&PotentialDescriptor::bare("flat", 1)).unwrap();
        let grid = GridSpec::uniform(vec![0.0], vec![1.0], 3).unwrap();
        let prof = logvol_profile(&p, &grid).unwrap();
        let v: serde_json::Value = serde_json::from_str(&profile_json(&prof)).unwrap();
        assert_eq!(v["n"], 1);
        assert_eq!(v["rows"].as_array().unwrap().len(), 3);
        let vol0 = v["rows"][0]["volume"].as_f64().unwrap();
        assert!((vol0 - std::f64::consts::TAU).abs() < 1e-10);
    }
}
