use nonbossy::eval::MechanismMetrics;
use nonbossy::verify::PropertyReport;
use nonbossy::Rational;
use serde::Serialize;

#[derive(Clone, Copy, Debug)]
pub struct Style {
    pub decimal: bool,
    pub json: bool,
}

impl Style {
    pub fn num(&self, r: Rational) -> String {
        if self.decimal {
            r.to_decimal_string(6)
        } else {
            r.to_string()
        }
    }

    pub fn metrics(&self, m: &MechanismMetrics) -> String {
        format!(
            "welfare {}  revenue {}",
            self.num(m.expected_welfare),
            self.num(m.expected_revenue)
        )
    }
}

pub fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    print!("{}", nonbossy::io::to_json(value)?);
    Ok(())
}

pub fn mark(holds: bool) -> &'static str {
    if holds {
        "✓"
    } else {
        "✗"
    }
}

pub fn print_report(r: &PropertyReport) {
    println!("{} {r}", mark(r.holds));
}

/// Left-aligned two-column table.
pub fn table(rows: &[(String, String)]) {
    let w = rows.iter().map(|(a, _)| a.chars().count()).max().unwrap_or(0);
    for (a, b) in rows {
        println!("  {a:<w$}  {b}");
    }
}
