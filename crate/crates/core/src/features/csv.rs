use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// One row of a feature CSV: frame time in seconds and the raw vector.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRow {
    pub time_s: f64,
    pub values: Vec<f64>,
}

/// Read `t,f1,...,fD` rows. The header fixes `D`.
pub fn read_feature_csv<R: BufRead>(reader: R) -> Result<Vec<FeatureRow>> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Ok(Vec::new()),
    };
    let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    if cols.first() != Some(&"t") || cols.len() < 2 {
        return Err(Error::Parse(format!(
            "feature CSV header must start with t: {header}"
        )));
    }
    for (i, c) in cols[1..].iter().enumerate() {
        if *c != format!("f{}", i + 1) {
            return Err(Error::Parse(format!("unexpected feature column {c}")));
        }
    }
    let dim = cols.len() - 1;
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if fields.len() != dim + 1 {
            return Err(Error::Parse(format!(
                "line {}: expected {} fields, got {}",
                lineno + 2,
                dim + 1,
                fields.len()
            )));
        }
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse(format!(
                "line {}: non-finite value",
                lineno + 2
            )));
        }
        rows.push(FeatureRow {
            time_s: fields[0],
            values: fields[1..].to_vec(),
        });
    }
    Ok(rows)
}

pub fn write_feature_csv<W: Write>(mut out: W, rows: &[FeatureRow]) -> Result<()> {
    let dim = rows.first().map_or(super::FEATURE_DIM, |r| r.values.len());
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=dim).map(|i| format!("f{i}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        write!(out, "{}", row.time_s)?;
        for v in &row.values {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_is_checked() {
        assert!(read_feature_csv("x,f1\n1,2\n".as_bytes()).is_err());
        assert!(read_feature_csv("t,f2\n1,2\n".as_bytes()).is_err());
        assert!(read_feature_csv("t,f1,f2\n0,1\n".as_bytes()).is_err());
        assert!(read_feature_csv("".as_bytes()).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn round_trip(rows in prop::collection::vec(
            (0.0f64..1e4, prop::collection::vec(-1e6f64..1e6, 3)), 0..20)
        ) {
            let rows: Vec<FeatureRow> = rows
                .into_iter()
                .map(|(t, v)| FeatureRow { time_s: t, values: v })
                .collect();
            let mut buf = Vec::new();
            write_feature_csv(&mut buf, &rows).unwrap();
            let back = read_feature_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back, rows);
        }
    }
}
