//! Matrix files and deterministic JSON output.

use std::io::{self, Write};
use std::path::Path;

use combsim_core::Matrix;
use serde::Serialize;
use serde_json::ser::Formatter;

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}: invalid JSON: {1}")]
    Json(String, serde_json::Error),
    #[error("{0}: invalid CSV: {1}")]
    Csv(String, csv::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] combsim_core::Error),
}

impl InputError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

fn rows_to_matrix(rows: Vec<Vec<f64>>, origin: &str) -> Result<Matrix, InputError> {
    let n = rows.len();
    if n == 0 {
        return Err(InputError::Invalid(format!("{origin}: empty matrix")));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(InputError::Invalid(format!(
            "{origin}: row {} has {} entries, expected {n}",
            i + 1,
            r.len()
        )));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Reads a square matrix: CSV (no header) for `.csv` files, otherwise a JSON
/// array of rows.
pub fn read_matrix(path: &Path) -> Result<Matrix, InputError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| InputError::io(path, e))?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let rows = if is_csv {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        reader
            .deserialize::<Vec<f64>>()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| InputError::Csv(origin.clone(), e))?
    } else {
        serde_json::from_str::<Vec<Vec<f64>>>(&text).map_err(|e| InputError::Json(origin.clone(), e))?
    };
    rows_to_matrix(rows, &origin)
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

pub fn write_matrix_csv(m: &Matrix) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in matrix_rows(m) {
        w.write_record(row.iter().map(|x| fmt_f64(*x))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Seventeen significant digits in scientific notation; `-0` prints as `0`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0.0000000000000000e0".into()
    } else {
        format!("{x:.16e}")
    }
}

/// Pretty JSON with every float in [`fmt_f64`] form.
struct FixedFloats<'a>(serde_json::ser::PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    delegate! {
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats(Default::default()));
    value.serialize(&mut ser).expect("serializable report");
    out.push(b'\n');
    String::from_utf8(out).expect("utf-8")
}
