//! Signal interchange format: header `t,v1[,v2,...]`, one row per node,
//! masked nodes written as empty fields.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledSignal};

/// Shortest round-trip decimal form; switches to exponent notation for
/// very small or very large magnitudes.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 {
        "0".to_string()
    } else if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn write_signals<W: Write>(out: W, columns: &[(&str, &SampledSignal)]) -> Result<()> {
    let first = columns
        .first()
        .ok_or_else(|| Error::Domain("nothing to write".into()))?
        .1;
    let grid = *first.grid();
    for (_, s) in columns {
        grid.ensure_same(s.grid())?;
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.to_string()));
    w.write_record(&header)?;
    for k in 0..grid.len() {
        let mut row = vec![format_number(grid.node(k))];
        for (_, s) in columns {
            row.push(s.get(k).map(format_number).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes signals under the default column names `v1, v2, ...`.
pub fn write_path<W: Write>(out: W, signals: &[SampledSignal]) -> Result<()> {
    let names: Vec<String> = (1..=signals.len()).map(|i| format!("v{i}")).collect();
    let cols: Vec<(&str, &SampledSignal)> =
        names.iter().map(String::as_str).zip(signals.iter()).collect();
    write_signals(out, &cols)
}

/// Reads a signal file; the grid is recovered from the `t` column, which
/// must be uniform to 1e-9 relative.
pub fn read_signals<R: Read>(input: R) -> Result<(Grid, Vec<String>, Vec<SampledSignal>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("t") || header.len() < 2 {
        return Err(Error::Parse(
            "expected header `t,v1[,v2,...]`".to_string(),
        ));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut ts = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != names.len() + 1 {
            return Err(Error::Parse(format!("row {} has {} fields", row + 1, rec.len())));
        }
        let t: f64 = rec[0]
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: bad t value `{}`", row + 1, &rec[0])))?;
        ts.push(t);
        for (j, col) in cols.iter_mut().enumerate() {
            let field = &rec[j + 1];
            let v = if field.is_empty() {
                f64::NAN
            } else {
                field.parse().map_err(|_| {
                    Error::Parse(format!("row {}: bad value `{field}`", row + 1))
                })?
            };
            col.push(v);
        }
    }
    if ts.len() < 3 {
        return Err(Error::Parse("need at least 3 rows".into()));
    }
    let n = ts.len() - 1;
    let grid = Grid::new(ts[0], ts[n], n)?;
    let tol = 1e-9 * (grid.b() - grid.a());
    if let Some(k) = (0..=n).find(|&k| (ts[k] - grid.node(k)).abs() > tol) {
        return Err(Error::Parse(format!("t column is not uniform at row {}", k + 1)));
    }
    let signals = cols
        .into_iter()
        .map(|v| SampledSignal::from_values(&grid, v))
        .collect::<Result<Vec<_>>>()?;
    Ok((grid, names, signals))
}
