//! Minimal CSV writer with `#` comment lines.

use std::fmt::Write;

/// Fixed-notation decimal with at least 17 significant digits, which
/// reparses to the same `f64`.
pub fn fixed(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000000000".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (17 - exponent).max(1) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fixed(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            for line in c.lines() {
                writeln!(out, "# {line}").unwrap();
            }
        }
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::render).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_notation_round_trips() {
        for x in [
            0.25,
            5.0 / 6.0,
            2.0 / 3.0,
            1.0,
            -120.0,
            3.720075976020836e-44,
            1e-300,
            123456.789,
            1e20,
            -7.5e-9,
        ] {
            let s = fixed(x);
            assert!(!s.contains('e'), "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let digits = s.trim_start_matches('-').replace('.', "");
            assert!(digits.trim_start_matches('0').len() >= 10, "{s}");
        }
    }

    #[test]
    fn zero_has_fixed_form() {
        assert_eq!(fixed(0.0), "0.00000000000000000");
        assert_eq!(fixed(-0.0), "0.00000000000000000");
    }

    #[test]
    fn renders_comments_then_header() {
        let mut t = Table::new(&["a", "b"]);
        t.comment("seed: 1");
        t.row(vec![Cell::from("x"), Cell::from(2u64)]);
        assert_eq!(t.render(), "# seed: 1\na,b\nx,2\n");
    }
}
