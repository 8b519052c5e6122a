use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::noise::ExperimentRow;

pub const SCALING_HEADER: &str =
    "k,epsilon,a00,a01,shots,c00,c01,c10,c11,b00,b01,eps_tilde,err_eps_tilde,cost,err_cost";
pub const RATIO_HEADER: &str = "k,a00,a01,r_in,b00,b01,r_out,err_r_out";

/// `%g` formatting with 6 significant digits.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    strip_zeros(&format!("{x:.decimals$}")).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn scaling_line(row: &ExperimentRow) -> String {
    let mut fields = vec![row.k.to_string()];
    fields.extend([row.epsilon, row.a00, row.a01].map(fmt_g));
    fields.push(row.shots.to_string());
    fields.extend(row.counts.iter().map(u64::to_string));
    fields.extend([row.b00, row.b01, row.eps_tilde, row.err_eps_tilde, row.cost, row.err_cost].map(fmt_g));
    fields.join(",")
}

pub fn ratio_line(row: &ExperimentRow) -> String {
    let mut fields = vec![row.k.to_string()];
    fields
        .extend([row.a00, row.a01, row.ratio_in(), row.b00, row.b01, row.ratio_out(), row.ratio_out_err()].map(fmt_g));
    fields.join(",")
}

fn table(header: &str, lines: impl Iterator<Item = String>) -> String {
    let mut out = String::new();
    writeln!(out, "{header}").unwrap();
    for line in lines {
        writeln!(out, "{line}").unwrap();
    }
    out
}

pub fn scaling_csv(rows: &[ExperimentRow]) -> String {
    table(SCALING_HEADER, rows.iter().map(scaling_line))
}

pub fn ratio_csv(rows: &[ExperimentRow]) -> String {
    table(RATIO_HEADER, rows.iter().map(ratio_line))
}

/// Scaling rows with a leading detuning column.
pub fn detuning_csv(curves: &[(f64, Vec<ExperimentRow>)]) -> String {
    let lines =
        curves.iter().flat_map(|(d, rows)| rows.iter().map(move |r| format!("{},{}", fmt_g(*d), scaling_line(r))));
    table(&format!("detuning,{SCALING_HEADER}"), lines)
}

/// Generic numeric table.
pub fn numeric_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    table(&header.join(","), rows.iter().map(|r| r.iter().map(|&v| fmt_g(v)).collect::<Vec<_>>().join(",")))
}

/// Parses a numeric CSV with a header line into column names and rows.
pub fn parse_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Config("empty CSV".into()))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("CSV line {}: {e}", i + 2)))?;
        if row.len() != header.len() {
            return Err(Error::Config(format!(
                "CSV line {}: {} fields, header has {}",
                i + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Column `name` of a parsed CSV.
pub fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Result<Vec<f64>> {
    let idx =
        header.iter().position(|h| h == name).ok_or_else(|| Error::Config(format!("CSV has no column {name:?}")))?;
    Ok(rows.iter().map(|r| r[idx]).collect())
}

/// Minimal matplotlib script plotting `csv_name` (scaling or ratio schema).
pub fn plot_stub(csv_name: &str, ratio: bool) -> String {
    let body = if ratio {
        "for k in sorted(set(d['k'])):\n    m = d['k'] == k\n    plt.errorbar(d['r_in'][m], d['r_out'][m], yerr=d['err_r_out'][m], fmt='o', label=f'k={int(k)}')\nplt.plot([0, 2], [0, 2], 'k--')\nplt.xlabel('r_in')\nplt.ylabel('r_out')\nplt.legend()\n"
    } else {
        "plt.errorbar(d['epsilon'], d['cost'], yerr=d['err_cost'], fmt='o')\nplt.xscale('log')\nplt.yscale('log')\nplt.xlabel('epsilon')\nplt.ylabel('cost')\n"
    };
    format!(
        "import numpy as np\nimport matplotlib.pyplot as plt\n\nd = np.genfromtxt({csv_name:?}, delimiter=',', names=True)\n{body}plt.savefig({:?})\n",
        format!("{}.png", csv_name.trim_end_matches(".csv"))
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(0.9932), "0.9932");
        assert_eq!(fmt_g(0.27415), "0.27415");
        assert_eq!(fmt_g(3.020541), "3.02054");
        assert_eq!(fmt_g(1600.0), "1600");
        assert_eq!(fmt_g(123456.7), "123457");
        assert_eq!(fmt_g(1234567.0), "1.23457e+06");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(0.00001234), "1.234e-05");
        assert_eq!(fmt_g(-2.5), "-2.5");
        assert_eq!(fmt_g(999999.5), "1e+06");
        assert_eq!(fmt_g(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_round_trip() {
        let text = numeric_csv(&["a", "b"], &[vec![1.0, 0.5], vec![2.0, 0.25]]);
        assert_eq!(text, "a,b\n1,0.5\n2,0.25\n");
        let (h, rows) = parse_numeric_csv(&text).unwrap();
        assert_eq!(column(&h, &rows, "b").unwrap(), vec![0.5, 0.25]);
        assert!(column(&h, &rows, "c").is_err());
        assert!(parse_numeric_csv("a,b\n1\n").is_err());
        assert!(parse_numeric_csv("a\nx\n").is_err());
    }
}
