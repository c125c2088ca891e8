//! Free-format MPS writer and reader.
//!
//! The writer emits every number with 17 significant digits, which reads back to the same
//! `f64`. Infinite bounds are left out of the BOUNDS section; integer columns are wrapped in
//! `MARKER` lines and always carry explicit bounds.

use std::io::Write;

use crate::error::{MpsError, ProblemError};
use crate::problem::{Row, Sense, SparseProblem};

const OBJ_ROW: &str = "OBJ";

fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

fn check_name(name: &str) -> Result<(), MpsError> {
    if name.is_empty() || name.chars().any(char::is_whitespace) || name == OBJ_ROW {
        return Err(MpsError::parse(0, format!("name {name:?} cannot be written to MPS")));
    }
    Ok(())
}

/// Writes `problem` in free MPS format.
pub fn write_mps<W: Write>(problem: &SparseProblem, out: &mut W) -> Result<(), MpsError> {
    problem.validate()?;
    if problem.rows.is_empty() {
        return Err(ProblemError::NoRows.into());
    }
    for name in problem.col_names.iter().chain(problem.rows.iter().map(|r| &r.name)) {
        check_name(name)?;
    }
    let name = if problem.name.is_empty() { "PROBLEM" } else { problem.name.as_str() };
    check_name(name)?;

    writeln!(out, "NAME {name}")?;
    writeln!(out, "ROWS")?;
    writeln!(out, " N {OBJ_ROW}")?;
    for row in &problem.rows {
        let t = match row.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        writeln!(out, " {t} {}", row.name)?;
    }

    writeln!(out, "COLUMNS")?;
    let cols = problem.columns();
    let mut in_marker = false;
    for (j, col) in cols.iter().enumerate() {
        if problem.integer[j] != in_marker {
            let kind = if in_marker { "INTEND" } else { "INTORG" };
            writeln!(out, " MARKER 'MARKER' '{kind}'")?;
            in_marker = !in_marker;
        }
        let cname = &problem.col_names[j];
        let c = problem.objective[j];
        if c != 0.0 || col.is_empty() {
            writeln!(out, " {cname} {OBJ_ROW} {}", num(c))?;
        }
        for &(i, a) in col {
            writeln!(out, " {cname} {} {}", problem.rows[i].name, num(a))?;
        }
    }
    if in_marker {
        writeln!(out, " MARKER 'MARKER' 'INTEND'")?;
    }

    writeln!(out, "RHS")?;
    if problem.objective_offset != 0.0 {
        writeln!(out, " RHS {OBJ_ROW} {}", num(-problem.objective_offset))?;
    }
    for row in &problem.rows {
        if row.rhs != 0.0 {
            writeln!(out, " RHS {} {}", row.name, num(row.rhs))?;
        }
    }

    writeln!(out, "BOUNDS")?;
    for j in 0..problem.num_vars() {
        let (l, u) = (problem.lower[j], problem.upper[j]);
        let c = &problem.col_names[j];
        if problem.integer[j] && l == 0.0 && u == 1.0 {
            writeln!(out, " BV BND {c}")?;
        } else if l == f64::NEG_INFINITY && u == f64::INFINITY {
            writeln!(out, " FR BND {c}")?;
        } else if l == u {
            writeln!(out, " FX BND {c} {}", num(l))?;
        } else {
            if l == f64::NEG_INFINITY {
                writeln!(out, " MI BND {c}")?;
            } else if l != 0.0 {
                writeln!(out, " LO BND {c} {}", num(l))?;
            }
            if u != f64::INFINITY {
                writeln!(out, " UP BND {c} {}", num(u))?;
            }
        }
    }
    writeln!(out, "ENDATA")?;
    Ok(())
}

pub fn to_mps_string(problem: &SparseProblem) -> Result<String, MpsError> {
    let mut buf = Vec::new();
    write_mps(problem, &mut buf)?;
    Ok(String::from_utf8(buf).expect("MPS output is ASCII"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Start,
    Name,
    Rows,
    Columns,
    Rhs,
    Bounds,
}

fn parse_num(tok: &str, line: usize) -> Result<f64, MpsError> {
    tok.parse::<f64>()
        .map_err(|_| MpsError::parse(line, format!("expected a number, found {tok:?}")))
}

/// Reads a free-format MPS document into a problem. Column and row order follow the file.
pub fn read_mps(text: &str) -> Result<SparseProblem, MpsError> {
    let mut p = SparseProblem::default();
    let mut section = Section::Start;
    let mut obj_row: Option<String> = None;
    let mut row_index: std::collections::HashMap<String, usize> = Default::default();
    let mut col_index: std::collections::HashMap<String, usize> = Default::default();
    let mut integer_block = false;
    let mut seen_end = false;

    let enter = |section: &mut Section, next: Section, line: usize| {
        if next <= *section {
            return Err(MpsError::parse(line, format!("section {next:?} out of order")));
        }
        *section = next;
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        if seen_end {
            return Err(MpsError::parse(line, "content after ENDATA"));
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let header = !raw.starts_with(char::is_whitespace);
        if header {
            match toks[0] {
                "NAME" => {
                    enter(&mut section, Section::Name, line)?;
                    p.name = toks.get(1).copied().unwrap_or_default().to_string();
                }
                "ROWS" => enter(&mut section, Section::Rows, line)?,
                "COLUMNS" => enter(&mut section, Section::Columns, line)?,
                "RHS" => enter(&mut section, Section::Rhs, line)?,
                "BOUNDS" => enter(&mut section, Section::Bounds, line)?,
                "ENDATA" => {
                    if section < Section::Columns {
                        return Err(MpsError::parse(line, "ENDATA before COLUMNS"));
                    }
                    seen_end = true;
                }
                "RANGES" => return Err(MpsError::parse(line, "RANGES section is not supported")),
                other => return Err(MpsError::parse(line, format!("unknown section {other}"))),
            }
            continue;
        }
        match section {
            Section::Start | Section::Name => {
                return Err(MpsError::parse(line, "data line outside a section"));
            }
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(MpsError::parse(line, "ROWS entry needs a type and a name"));
                }
                let name = toks[1].to_string();
                let sense = match toks[0] {
                    "N" => {
                        if obj_row.is_some() {
                            return Err(MpsError::parse(line, "more than one objective row"));
                        }
                        obj_row = Some(name);
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    t => return Err(MpsError::parse(line, format!("unknown row type {t}"))),
                };
                if row_index.insert(name.clone(), p.rows.len()).is_some() {
                    return Err(MpsError::parse(line, format!("duplicate row {name}")));
                }
                p.rows.push(Row { name, sense, rhs: 0.0, coeffs: Vec::new() });
            }
            Section::Columns => {
                if toks.len() >= 3 && toks[1] == "'MARKER'" {
                    match toks[2] {
                        "'INTORG'" => integer_block = true,
                        "'INTEND'" => integer_block = false,
                        m => return Err(MpsError::parse(line, format!("unknown marker {m}"))),
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(MpsError::parse(line, "COLUMNS entry needs 3 or 5 fields"));
                }
                let cname = toks[0];
                let j = match col_index.get(cname) {
                    Some(&j) if j + 1 == p.num_vars() => j,
                    Some(_) => {
                        return Err(MpsError::parse(line, format!("column {cname} is not contiguous")));
                    }
                    None => {
                        col_index.insert(cname.to_string(), p.num_vars());
                        p.col_names.push(cname.to_string());
                        p.lower.push(0.0);
                        p.upper.push(f64::INFINITY);
                        p.objective.push(0.0);
                        p.integer.push(integer_block);
                        p.num_vars() - 1
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair[1], line)?;
                    if obj_row.as_deref() == Some(pair[0]) {
                        p.objective[j] += v;
                        continue;
                    }
                    let Some(&i) = row_index.get(pair[0]) else {
                        return Err(MpsError::parse(line, format!("unknown row {}", pair[0])));
                    };
                    let coeffs = &mut p.rows[i].coeffs;
                    if coeffs.last().is_some_and(|e| e.0 == j) {
                        return Err(MpsError::parse(line, format!("duplicate entry for row {}", pair[0])));
                    }
                    coeffs.push((j, v));
                }
            }
            Section::Rhs => {
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(MpsError::parse(line, "RHS entry needs 3 or 5 fields"));
                }
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair[1], line)?;
                    if obj_row.as_deref() == Some(pair[0]) {
                        p.objective_offset = -v;
                        continue;
                    }
                    let Some(&i) = row_index.get(pair[0]) else {
                        return Err(MpsError::parse(line, format!("RHS for unknown row {}", pair[0])));
                    };
                    p.rows[i].rhs = v;
                }
            }
            Section::Bounds => {
                if toks.len() < 3 {
                    return Err(MpsError::parse(line, "BOUNDS entry needs a type, set and column"));
                }
                let Some(&j) = col_index.get(toks[2]) else {
                    return Err(MpsError::parse(line, format!("bound on unknown column {}", toks[2])));
                };
                let value = || -> Result<f64, MpsError> {
                    toks.get(3)
                        .ok_or_else(|| MpsError::parse(line, "bound value missing"))
                        .and_then(|t| parse_num(t, line))
                };
                match toks[0] {
                    "UP" | "UI" => p.upper[j] = value()?,
                    "LO" | "LI" => p.lower[j] = value()?,
                    "FX" => {
                        let v = value()?;
                        p.lower[j] = v;
                        p.upper[j] = v;
                    }
                    "FR" => {
                        p.lower[j] = f64::NEG_INFINITY;
                        p.upper[j] = f64::INFINITY;
                    }
                    "MI" => p.lower[j] = f64::NEG_INFINITY,
                    "PL" => p.upper[j] = f64::INFINITY,
                    "BV" => {
                        p.lower[j] = 0.0;
                        p.upper[j] = 1.0;
                        p.integer[j] = true;
                    }
                    t => return Err(MpsError::parse(line, format!("unknown bound type {t}"))),
                }
            }
        }
    }
    if !seen_end {
        return Err(MpsError::MissingEndata);
    }
    p.validate()?;
    Ok(p)
}
