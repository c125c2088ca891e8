//! Fixed-width text report of a results bundle.

use std::fmt::Write as _;
use std::path::Path;

use crate::bundle::{read_summary, PRICES};
use crate::error::CliError;

const TOP_HOURS: usize = 10;

/// Columns are as wide as their widest cell and separated by two spaces; numeric columns
/// are right-aligned.
fn table(rows: &[Vec<String>], numeric_from: usize) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c >= numeric_from {
                    format!("{s:>w$}", w = widths[c])
                } else {
                    format!("{s:<w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

struct Price {
    region: String,
    commodity: String,
    t: usize,
    value: f64,
}

fn read_prices(path: &Path) -> Result<Vec<Price>, CliError> {
    let bad = |message: String| CliError::Bundle { path: path.to_path_buf(), message };
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 4 {
            return Err(bad(format!("line {line}: expected 4 fields")));
        }
        out.push(Price {
            region: rec[0].to_string(),
            commodity: rec[1].to_string(),
            t: rec[2].parse().map_err(|_| bad(format!("line {line}: bad step {:?}", &rec[2])))?,
            value: rec[3].parse().map_err(|_| bad(format!("line {line}: bad price {:?}", &rec[3])))?,
        });
    }
    Ok(out)
}

pub fn render_report(dir: &Path) -> Result<String, CliError> {
    let s = read_summary(dir)?;
    let mut out = String::new();
    let tac = s.objective_tac.map_or("n/a".to_string(), |v| format!("{v:.2}"));
    writeln!(out, "model {}  status {}  TAC {tac}", s.model, s.status).unwrap();
    writeln!(out, "input sha256 {}", s.input_hash).unwrap();
    if let Some(m) = &s.message {
        writeln!(out, "note: {m}").unwrap();
    }

    writeln!(out, "\ncapacity (component, location, capacity)").unwrap();
    let rows: Vec<Vec<String>> = s
        .capacities
        .iter()
        .map(|c| vec![c.component.clone(), c.location.clone(), format!("{:.2}", c.value)])
        .collect();
    out.push_str(&table(&rows, 2));

    if !s.build_decisions.is_empty() {
        writeln!(out, "\nbuild decisions (component, location, built)").unwrap();
        let rows: Vec<Vec<String>> = s
            .build_decisions
            .iter()
            .map(|b| vec![b.component.clone(), b.location.clone(), if b.built { "yes" } else { "no" }.into()])
            .collect();
        out.push_str(&table(&rows, 3));
    }

    writeln!(out, "\ncost breakdown (component, invest, fixed opex, variable opex, commodity cost, total)").unwrap();
    let rows: Vec<Vec<String>> = s
        .cost_breakdown
        .iter()
        .map(|c| {
            vec![
                c.component.clone(),
                format!("{:.2}", c.annualized_invest),
                format!("{:.2}", c.fixed_opex),
                format!("{:.2}", c.variable_opex),
                format!("{:.2}", c.commodity_cost),
                format!("{:.2}", c.total()),
            ]
        })
        .collect();
    out.push_str(&table(&rows, 1));

    let prices_path = dir.join(PRICES);
    if !prices_path.exists() {
        writeln!(out, "\nshadow prices: not available (mixed-integer or non-optimal run)").unwrap();
        return Ok(out);
    }
    let prices = read_prices(&prices_path)?;
    let mut commodities: Vec<&str> = Vec::new();
    for p in &prices {
        if !commodities.contains(&p.commodity.as_str()) {
            commodities.push(&p.commodity);
        }
    }
    writeln!(out, "\nshadow prices, top {TOP_HOURS} steps per commodity (region, t, price)").unwrap();
    for c in commodities {
        let mut top: Vec<&Price> = prices.iter().filter(|p| p.commodity == c).collect();
        top.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.t.cmp(&b.t)).then(a.region.cmp(&b.region)));
        top.truncate(TOP_HOURS);
        writeln!(out, "{c}").unwrap();
        let rows: Vec<Vec<String>> =
            top.iter().map(|p| vec![p.region.clone(), p.t.to_string(), format!("{:.2}", p.value)]).collect();
        out.push_str(&table(&rows, 1));
    }
    Ok(out)
}
