use hypercurv_core::cylinders::{rigidity, scalar_ladder};
use serde::{Deserialize, Serialize};

use super::{finish, Outcome};
use crate::cli::LadderArgs;
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{Report, Table};
use crate::schema::Num;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub n: usize,
    pub rows: Vec<LadderRow>,
}

/// Cylinder `R^{n-k} x S^k` with its value of `R / H^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub k: usize,
    pub ratio: Num,
    /// Sphere radius as a multiple of `1/|H|`.
    pub radius_times_h: Num,
    pub rigidity: String,
    pub note: String,
}

pub fn build(n: usize) -> CliResult<LadderReport> {
    let rows = scalar_ladder(n)?
        .into_iter()
        .map(|rung| {
            let rig = rigidity(n, rung.k);
            let radius = hypercurv_core::scalar::rat(rung.k as i64, n as i64);
            LadderRow {
                k: rung.k,
                ratio: Num::exact(&rung.ratio),
                radius_times_h: Num::exact(&radius),
                rigidity: rig.status.as_str().to_string(),
                note: rig.note,
            }
        })
        .collect();
    Ok(LadderReport { n, rows })
}

impl Report for LadderReport {
    fn table(&self) -> Table {
        let mut t = Table::new(["k", "R/H^2", "radius*|H|", "rigidity", "note"]);
        for r in &self.rows {
            t.row([r.k.to_string(), r.ratio.text(), r.radius_times_h.text(), r.rigidity.clone(), r.note.clone()]);
        }
        t
    }
}

pub fn run(args: &LadderArgs, settings: &Settings) -> CliResult<Outcome> {
    finish(&build(args.n)?, settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_rows_ending_at_one() {
        let l = build(5).unwrap();
        let ratios: Vec<String> = l.rows.iter().map(|r| r.ratio.text()).collect();
        assert_eq!(ratios, ["0", "5/8", "5/6", "15/16", "1"]);
        assert_eq!(l.rows[3].rigidity, "rigid");
        assert_eq!(l.rows[2].rigidity, "example-only");
    }

    #[test]
    fn small_dimensions_are_rejected() {
        assert!(build(1).is_err());
    }
}
