//! Protection curves over an income grid.

use serde::{Deserialize, Serialize};
use welfare_core::lab::{linear_grid, log_grid};
use welfare_core::protection::protected_income;
use welfare_core::{Error, Income, SwfFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub y: f64,
    pub protected_income: f64,
    pub collateral_damage: f64,
    pub relative_damage: f64,
}

pub const CSV_HEADER: [&str; 4] = ["y", "protected_income", "collateral_damage", "relative_damage"];

/// One-rival protection at `points` incomes from `y_min` to `y_max`. The lower
/// endpoint of the domain, if on the grid, protects itself with no damage.
pub fn protection_curve(
    family: &SwfFamily,
    y_min: f64,
    y_max: f64,
    points: usize,
    spacing: Spacing,
) -> Result<Vec<CurvePoint>, Error> {
    let grid = match spacing {
        Spacing::Linear => linear_grid(y_min, y_max, points)?,
        Spacing::Log => log_grid(y_min, y_max, points)?,
    };
    let lower = family.lower_bound();
    grid.into_iter()
        .map(|y: Income| {
            if y == lower {
                return Ok(CurvePoint {
                    y: y.get(),
                    protected_income: y.get(),
                    collateral_damage: 0.0,
                    relative_damage: 0.0,
                });
            }
            let p = protected_income(family, y, 1)?;
            Ok(CurvePoint {
                y: y.get(),
                protected_income: p.protected_income.get(),
                collateral_damage: p.collateral_damage,
                relative_damage: p.relative_damage,
            })
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(points: &[CurvePoint], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for p in points {
        w.write_record([
            p.y.to_string(),
            p.protected_income.to_string(),
            p.collateral_damage.to_string(),
            p.relative_damage.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv(points: &[CurvePoint]) -> String {
    let mut buf = Vec::new();
    write_csv(points, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}
