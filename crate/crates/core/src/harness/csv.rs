use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::{ExperimentResult, ResultRow};

pub const HEADER: &str = "sweep,solver,trial,seed,power_watts,power_db";

/// Rows in stored order; floats in shortest round-trip scientific notation.
pub fn to_csv_string(result: &ExperimentResult) -> String {
    let mut out = String::with_capacity(64 * (result.rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{:e},{},{},{},{:e},{:e}",
            r.sweep, r.solver, r.trial, r.seed, r.power_watts, r.power_db
        );
    }
    out
}

pub fn emit_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv_string(result))?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == HEADER => {}
        other => return Err(Error::Parse(format!("bad header {other:?}"))),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", i + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad("field count"));
            }
            Ok(ResultRow {
                sweep: f[0].parse().map_err(|_| bad("sweep"))?,
                solver: f[1].to_string(),
                trial: f[2].parse().map_err(|_| bad("trial"))?,
                seed: f[3].parse().map_err(|_| bad("seed"))?,
                power_watts: f[4].parse().map_err(|_| bad("power_watts"))?,
                power_db: f[5].parse().map_err(|_| bad("power_db"))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_result_is_header_only() {
        assert_eq!(to_csv_string(&ExperimentResult::default()), format!("{HEADER}\n"));
        assert!(parse_csv(&format!("{HEADER}\n")).unwrap().is_empty());
    }

    #[test]
    fn zero_power_round_trips() {
        let r = ExperimentResult {
            rows: vec![ResultRow::new(12.0, "pgd", 0, 5, 0.0)],
            ..Default::default()
        };
        let text = to_csv_string(&r);
        assert!(text.contains("-inf"));
        assert_eq!(parse_csv(&text).unwrap(), r.rows);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_csv("a,b\n").is_err());
        assert!(parse_csv(&format!("{HEADER}\n1,pgd,0,1,2\n")).is_err());
        assert!(parse_csv(&format!("{HEADER}\nx,pgd,0,1,2,3\n")).is_err());
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let r = ExperimentResult::default();
        assert!(matches!(
            emit_csv(&r, Path::new("/nonexistent-dir/x.csv")),
            Err(Error::Io(_))
        ));
    }

    proptest! {
        #[test]
        fn round_trip(rows in proptest::collection::vec(
            (any::<f64>().prop_filter("finite", |x| x.is_finite()),
             "[a-z-]{1,12}", 0usize..1000, any::<u64>(), 0.0f64..1e3),
            0..20)) {
            let r = ExperimentResult {
                rows: rows.into_iter().map(|(s, n, t, seed, p)| ResultRow::new(s, &n, t, seed, p)).collect(),
                ..Default::default()
            };
            prop_assert_eq!(parse_csv(&to_csv_string(&r)).unwrap(), r.rows);
        }
    }
}
