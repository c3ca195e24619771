//! TSPLIB instance parsing and the integer distance functions used by the benchmarks.
//!
//! Cities are indexed `0..n` everywhere in this crate. TSPLIB files number them
//! `1..=n`; the parser shifts ids down by one.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

/// Coordinate instances at or below this size get a cached full distance matrix.
pub const MATRIX_CACHE_LIMIT: usize = 5_000;

#[allow(clippy::approx_constant)]
const GEO_PI: f64 = 3.141592;
const GEO_EARTH_RADIUS: f64 = 6378.388;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WeightKind {
    #[serde(rename = "EUC_2D")]
    Euc2d,
    #[serde(rename = "CEIL_2D")]
    Ceil2d,
    #[serde(rename = "ATT")]
    Att,
    #[serde(rename = "GEO")]
    Geo,
    #[serde(rename = "EXPLICIT")]
    Explicit,
}

impl WeightKind {
    fn from_keyword(value: &str) -> Option<Self> {
        match value {
            "EUC_2D" => Some(WeightKind::Euc2d),
            "CEIL_2D" => Some(WeightKind::Ceil2d),
            "ATT" => Some(WeightKind::Att),
            "GEO" => Some(WeightKind::Geo),
            "EXPLICIT" => Some(WeightKind::Explicit),
            _ => None,
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WeightKind::Euc2d => "EUC_2D",
            WeightKind::Ceil2d => "CEIL_2D",
            WeightKind::Att => "ATT",
            WeightKind::Geo => "GEO",
            WeightKind::Explicit => "EXPLICIT",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: unsupported {keyword} `{value}`")]
    Unsupported {
        keyword: &'static str,
        value: String,
        line: usize,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: {section} holds {found} entries but DIMENSION implies {expected}")]
    DimensionMismatch {
        section: &'static str,
        expected: usize,
        found: usize,
        line: usize,
    },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("could not read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostError {
    #[error("cost({0}, {0}) is not an edge")]
    SameCity(usize),
    #[error("city {city} is out of range for an instance with {n} cities")]
    OutOfRange { city: usize, n: usize },
}

/// Immutable symmetric TSP instance.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    n: usize,
    weight_kind: WeightKind,
    coords: Option<Vec<(f64, f64)>>,
    /// GEO latitude/longitude in radians, precomputed from the degree.minute input.
    geo: Option<Vec<(f64, f64)>>,
    /// Row-major `n * n` costs: the explicit matrix, or a cache for small coordinate instances.
    matrix: Option<Vec<i32>>,
    known_optimum: Option<i64>,
}

impl Instance {
    /// Builds a coordinate instance directly (used by generators and tests).
    pub fn from_coords(
        name: impl Into<String>,
        weight_kind: WeightKind,
        coords: Vec<(f64, f64)>,
    ) -> Result<Self, ParseError> {
        if weight_kind == WeightKind::Explicit {
            return Err(ParseError::Malformed {
                line: 0,
                message: "EXPLICIT instances need a matrix, not coordinates".into(),
            });
        }
        if coords.len() < 3 {
            return Err(ParseError::Malformed {
                line: 0,
                message: format!("an instance needs at least 3 cities, got {}", coords.len()),
            });
        }
        let n = coords.len();
        let geo = (weight_kind == WeightKind::Geo).then(|| {
            coords
                .iter()
                .map(|&(x, y)| (geo_radians(x), geo_radians(y)))
                .collect()
        });
        let mut inst = Instance {
            name: name.into(),
            n,
            weight_kind,
            coords: Some(coords),
            geo,
            matrix: None,
            known_optimum: None,
        };
        if n <= MATRIX_CACHE_LIMIT {
            let mut m = vec![0i32; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let c = inst.compute(i, j) as i32;
                    m[i * n + j] = c;
                    m[j * n + i] = c;
                }
            }
            inst.matrix = Some(m);
        }
        Ok(inst)
    }

    /// Builds an EXPLICIT instance from a full symmetric matrix.
    pub fn from_matrix(name: impl Into<String>, rows: Vec<Vec<i64>>) -> Result<Self, ParseError> {
        let n = rows.len();
        if n < 3 {
            return Err(ParseError::Malformed {
                line: 0,
                message: format!("an instance needs at least 3 cities, got {n}"),
            });
        }
        let mut m = vec![0i32; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ParseError::Malformed {
                    line: 0,
                    message: format!("matrix row {i} has {} entries, expected {n}", row.len()),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if i != j {
                    m[i * n + j] = checked_weight(v, 0)?;
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if m[i * n + j] != m[j * n + i] {
                    return Err(ParseError::Malformed {
                        line: 0,
                        message: format!("matrix is not symmetric at ({i}, {j})"),
                    });
                }
            }
        }
        Ok(Instance {
            name: name.into(),
            n,
            weight_kind: WeightKind::Explicit,
            coords: None,
            geo: None,
            matrix: Some(m),
            known_optimum: None,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ParseError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ParseError::Io {
            path: path.display().to_string(),
            source,
        })?;
        parse_instance(&text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of cities.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weight_kind(&self) -> WeightKind {
        self.weight_kind
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn known_optimum(&self) -> Option<i64> {
        self.known_optimum
    }

    pub fn with_known_optimum(mut self, optimum: Option<i64>) -> Self {
        self.known_optimum = optimum;
        self
    }

    /// Checked cost between two distinct cities.
    pub fn cost(&self, i: usize, j: usize) -> Result<i64, CostError> {
        for city in [i, j] {
            if city >= self.n {
                return Err(CostError::OutOfRange { city, n: self.n });
            }
        }
        if i == j {
            return Err(CostError::SameCity(i));
        }
        Ok(self.dist(i, j))
    }

    /// Unchecked cost; `dist(i, i)` is 0.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> i64 {
        match &self.matrix {
            Some(m) => m[i * self.n + j] as i64,
            None if i == j => 0,
            None => self.compute(i, j),
        }
    }

    /// Length of the closed tour visiting `order` in sequence.
    pub fn tour_length(&self, order: &[usize]) -> i64 {
        if order.is_empty() {
            return 0;
        }
        let closing = self.dist(order[order.len() - 1], order[0]);
        order
            .windows(2)
            .map(|w| self.dist(w[0], w[1]))
            .sum::<i64>()
            + closing
    }

    fn compute(&self, i: usize, j: usize) -> i64 {
        if let Some(geo) = &self.geo {
            let (lat_i, lon_i) = geo[i];
            let (lat_j, lon_j) = geo[j];
            let q1 = (lon_i - lon_j).cos();
            let q2 = (lat_i - lat_j).cos();
            let q3 = (lat_i + lat_j).cos();
            return (GEO_EARTH_RADIUS * (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).acos() + 1.0)
                as i64;
        }
        let coords = self.coords.as_ref().expect("coordinate instance");
        let (xi, yi) = coords[i];
        let (xj, yj) = coords[j];
        let dx = xi - xj;
        let dy = yi - yj;
        match self.weight_kind {
            WeightKind::Euc2d => nint((dx * dx + dy * dy).sqrt()),
            WeightKind::Ceil2d => (dx * dx + dy * dy).sqrt().ceil() as i64,
            WeightKind::Att => {
                let r = ((dx * dx + dy * dy) / 10.0).sqrt();
                let t = nint(r);
                if (t as f64) < r {
                    t + 1
                } else {
                    t
                }
            }
            WeightKind::Geo | WeightKind::Explicit => unreachable!("handled above"),
        }
    }
}

#[inline]
fn nint(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

fn geo_radians(x: f64) -> f64 {
    let deg = x.trunc();
    let min = x - deg;
    GEO_PI * (deg + 5.0 * min / 3.0) / 180.0
}

fn checked_weight(v: i64, line: usize) -> Result<i32, ParseError> {
    i32::try_from(v)
        .ok()
        .filter(|w| *w >= 0)
        .ok_or_else(|| ParseError::Malformed {
            line,
            message: format!("edge weight {v} is negative or too large"),
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MatrixLayout {
    Full,
    UpperRow,
    LowerRow,
    UpperDiagRow,
    LowerDiagRow,
}

impl MatrixLayout {
    fn from_keyword(value: &str) -> Option<Self> {
        // Column-major layouts of a symmetric matrix read like the opposite row-major triangle.
        match value {
            "FULL_MATRIX" => Some(MatrixLayout::Full),
            "UPPER_ROW" | "LOWER_COL" => Some(MatrixLayout::UpperRow),
            "LOWER_ROW" | "UPPER_COL" => Some(MatrixLayout::LowerRow),
            "UPPER_DIAG_ROW" | "LOWER_DIAG_COL" => Some(MatrixLayout::UpperDiagRow),
            "LOWER_DIAG_ROW" | "UPPER_DIAG_COL" => Some(MatrixLayout::LowerDiagRow),
            _ => None,
        }
    }

    fn entry_count(self, n: usize) -> usize {
        match self {
            MatrixLayout::Full => n * n,
            MatrixLayout::UpperRow | MatrixLayout::LowerRow => n * (n - 1) / 2,
            MatrixLayout::UpperDiagRow | MatrixLayout::LowerDiagRow => n * (n + 1) / 2,
        }
    }

    /// The `(row, col)` cells in file order.
    fn cells(self, n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.entry_count(n));
        for i in 0..n {
            let cols = match self {
                MatrixLayout::Full => 0..n,
                MatrixLayout::UpperRow => (i + 1)..n,
                MatrixLayout::LowerRow => 0..i,
                MatrixLayout::UpperDiagRow => i..n,
                MatrixLayout::LowerDiagRow => 0..(i + 1),
            };
            out.extend(cols.map(|j| (i, j)));
        }
        out
    }
}

fn split_keyword(line: &str) -> (&str, &str) {
    match line.split_once(':') {
        Some((k, v)) => (k.trim(), v.trim()),
        None => (line.trim(), ""),
    }
}

fn is_data_line(line: &str) -> bool {
    line.trim_start()
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+' || c == '.')
}

/// Parses the contents of a symmetric TSPLIB file.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut name = String::new();
    let mut dimension: Option<usize> = None;
    let mut kind: Option<WeightKind> = None;
    let mut layout: Option<MatrixLayout> = None;
    let mut coords: Option<Vec<(f64, f64)>> = None;
    let mut weights: Option<Vec<i64>> = None;
    let mut idx = 0;

    while idx < lines.len() {
        let line_no = idx + 1;
        let raw = lines[idx].trim();
        idx += 1;
        if raw.is_empty() {
            continue;
        }
        let (key, value) = split_keyword(raw);
        match key {
            "NAME" => name = value.to_string(),
            "COMMENT" => {}
            "TYPE" => {
                if value != "TSP" {
                    return Err(ParseError::Unsupported {
                        keyword: "TYPE",
                        value: value.into(),
                        line: line_no,
                    });
                }
            }
            "DIMENSION" => {
                let n: usize = value.parse().map_err(|_| ParseError::Malformed {
                    line: line_no,
                    message: format!("bad DIMENSION `{value}`"),
                })?;
                if n < 3 {
                    return Err(ParseError::Malformed {
                        line: line_no,
                        message: format!("DIMENSION must be at least 3, got {n}"),
                    });
                }
                dimension = Some(n);
            }
            "EDGE_WEIGHT_TYPE" => {
                kind = Some(WeightKind::from_keyword(value).ok_or_else(|| {
                    ParseError::Unsupported {
                        keyword: "EDGE_WEIGHT_TYPE",
                        value: value.into(),
                        line: line_no,
                    }
                })?);
            }
            "EDGE_WEIGHT_FORMAT" => {
                if value == "FUNCTION" {
                    continue;
                }
                layout = Some(MatrixLayout::from_keyword(value).ok_or_else(|| {
                    ParseError::Unsupported {
                        keyword: "EDGE_WEIGHT_FORMAT",
                        value: value.into(),
                        line: line_no,
                    }
                })?);
            }
            "NODE_COORD_TYPE" => {
                if value != "TWOD_COORDS" {
                    return Err(ParseError::Unsupported {
                        keyword: "NODE_COORD_TYPE",
                        value: value.into(),
                        line: line_no,
                    });
                }
            }
            "DISPLAY_DATA_TYPE" => {}
            "NODE_COORD_SECTION" => {
                let n = dimension.ok_or(ParseError::Missing("DIMENSION before NODE_COORD_SECTION"))?;
                let mut pts = vec![None; n];
                let mut found = 0;
                while found < n {
                    let Some(l) = lines.get(idx).filter(|l| is_data_line(l)) else {
                        return Err(ParseError::DimensionMismatch {
                            section: "NODE_COORD_SECTION",
                            expected: n,
                            found,
                            line: idx + 1,
                        });
                    };
                    idx += 1;
                    let fields: Vec<&str> = l.split_whitespace().collect();
                    if fields.len() != 3 {
                        return Err(ParseError::Malformed {
                            line: idx,
                            message: format!("expected `id x y`, got `{}`", l.trim()),
                        });
                    }
                    let bad = |what: &str| ParseError::Malformed {
                        line: idx,
                        message: format!("bad {what} in `{}`", l.trim()),
                    };
                    let id: usize = fields[0].parse().map_err(|_| bad("node id"))?;
                    let x: f64 = fields[1].parse().map_err(|_| bad("x coordinate"))?;
                    let y: f64 = fields[2].parse().map_err(|_| bad("y coordinate"))?;
                    if id == 0 || id > n || pts[id - 1].is_some() {
                        return Err(bad("or duplicate node id"));
                    }
                    pts[id - 1] = Some((x, y));
                    found += 1;
                }
                let extra = lines[idx..].iter().take_while(|l| is_data_line(l)).count();
                if extra > 0 {
                    return Err(ParseError::DimensionMismatch {
                        section: "NODE_COORD_SECTION",
                        expected: n,
                        found: n + extra,
                        line: idx + 1,
                    });
                }
                coords = Some(pts.into_iter().map(|p| p.expect("filled")).collect());
            }
            "EDGE_WEIGHT_SECTION" => {
                let n = dimension.ok_or(ParseError::Missing("DIMENSION before EDGE_WEIGHT_SECTION"))?;
                let lay = layout.ok_or(ParseError::Missing("EDGE_WEIGHT_FORMAT"))?;
                let expected = lay.entry_count(n);
                let mut values = Vec::with_capacity(expected);
                while values.len() < expected {
                    let Some(l) = lines.get(idx).filter(|l| is_data_line(l)) else {
                        return Err(ParseError::DimensionMismatch {
                            section: "EDGE_WEIGHT_SECTION",
                            expected,
                            found: values.len(),
                            line: idx + 1,
                        });
                    };
                    idx += 1;
                    for tok in l.split_whitespace() {
                        let v: f64 = tok.parse().map_err(|_| ParseError::Malformed {
                            line: idx,
                            message: format!("bad edge weight `{tok}`"),
                        })?;
                        values.push(v.round() as i64);
                    }
                }
                if values.len() > expected {
                    return Err(ParseError::DimensionMismatch {
                        section: "EDGE_WEIGHT_SECTION",
                        expected,
                        found: values.len(),
                        line: idx,
                    });
                }
                weights = Some(values);
            }
            "DISPLAY_DATA_SECTION" => {
                while lines.get(idx).is_some_and(|l| is_data_line(l)) {
                    idx += 1;
                }
            }
            "EOF" => break,
            other => {
                let keyword = if other.ends_with("_SECTION") {
                    "section"
                } else {
                    "keyword"
                };
                return Err(ParseError::Unsupported {
                    keyword,
                    value: other.into(),
                    line: line_no,
                });
            }
        }
    }

    let n = dimension.ok_or(ParseError::Missing("DIMENSION"))?;
    let kind = kind.ok_or(ParseError::Missing("EDGE_WEIGHT_TYPE"))?;
    let inst = if kind == WeightKind::Explicit {
        let values = weights.ok_or(ParseError::Missing("EDGE_WEIGHT_SECTION"))?;
        let lay = layout.expect("checked when the section was read");
        let mut rows = vec![vec![0i64; n]; n];
        let mut seen = vec![vec![false; n]; n];
        for ((i, j), v) in lay.cells(n).into_iter().zip(values) {
            if i == j {
                continue;
            }
            if seen[i][j] && rows[i][j] != v {
                return Err(ParseError::Malformed {
                    line: 0,
                    message: format!("FULL_MATRIX is not symmetric at ({}, {})", j + 1, i + 1),
                });
            }
            rows[i][j] = v;
            rows[j][i] = v;
            seen[i][j] = true;
            seen[j][i] = true;
        }
        Instance::from_matrix(name, rows)?
    } else {
        let coords = coords.ok_or(ParseError::Missing("NODE_COORD_SECTION"))?;
        Instance::from_coords(name, kind, coords)?
    };
    Ok(inst)
}

/// Reads a TSPLIB `TOUR_SECTION` into 0-based city order.
pub fn parse_tour(text: &str) -> Result<Vec<usize>, ParseError> {
    let mut in_section = false;
    let mut order = Vec::new();
    let mut dimension = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if !in_section {
            let (key, value) = split_keyword(line);
            match key {
                "DIMENSION" => dimension = value.parse::<usize>().ok(),
                "TOUR_SECTION" => in_section = true,
                _ => {}
            }
            continue;
        }
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| ParseError::Malformed {
                line: i + 1,
                message: format!("bad tour entry `{tok}`"),
            })?;
            if v == -1 {
                in_section = false;
                break;
            }
            if v < 1 {
                return Err(ParseError::Malformed {
                    line: i + 1,
                    message: format!("tour entry {v} is not a city id"),
                });
            }
            order.push(v as usize - 1);
        }
        if line == "EOF" {
            break;
        }
    }
    if order.is_empty() {
        return Err(ParseError::Missing("TOUR_SECTION"));
    }
    if let Some(d) = dimension {
        if d != order.len() {
            return Err(ParseError::DimensionMismatch {
                section: "TOUR_SECTION",
                expected: d,
                found: order.len(),
                line: text.lines().count(),
            });
        }
    }
    Ok(order)
}
