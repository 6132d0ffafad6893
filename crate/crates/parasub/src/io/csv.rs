//! Dense matrix CSV: one row per line, comma-separated entries.
//!
//! Values are written with Rust's shortest round-trip formatting, so a
//! write/read cycle reproduces every f64 bit-exactly.

use std::io::{BufRead, Write};

use ndarray::Array2;

use super::IoError;

pub fn read_matrix_csv(reader: impl BufRead) -> Result<Array2<f64>, IoError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = trimmed
            .split(',')
            .map(|cell| cell.trim().parse::<f64>())
            .collect();
        let row = row.map_err(|e| IoError::Malformed {
            line: idx + 1,
            message: format!("bad number: {e}"),
        })?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(IoError::RaggedRows {
                    row: idx + 1,
                    got: row.len(),
                    expected: first.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(IoError::EmptyMatrix);
    }
    let (m, n) = (rows.len(), rows[0].len());
    Ok(Array2::from_shape_vec((m, n), rows.into_iter().flatten().collect())
        .expect("row lengths checked above"))
}

pub fn write_matrix_csv(matrix: &Array2<f64>, mut writer: impl Write) -> Result<(), IoError> {
    for row in matrix.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(writer, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn read_matrix_csv_path(path: &std::path::Path) -> Result<Array2<f64>, IoError> {
    let file = std::fs::File::open(path)?;
    read_matrix_csv(std::io::BufReader::new(file))
}

pub fn write_matrix_csv_path(matrix: &Array2<f64>, path: &std::path::Path) -> Result<(), IoError> {
    let file = std::fs::File::create(path)?;
    write_matrix_csv(matrix, std::io::BufWriter::new(file))
}
