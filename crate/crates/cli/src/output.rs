use std::path::Path;

use anyhow::{Context, Result};

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn fmt12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn series<'a>(times: &'a [f64], values: &'a [f64]) -> impl Iterator<Item = Vec<String>> + 'a {
    times.iter().zip(values).map(|(t, v)| vec![fmt12(*t), fmt12(*v)])
}

#[cfg(test)]
mod tests {
    use super::fmt12;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(0.001), "0.001");
        assert_eq!(fmt12(20.0), "20");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(fmt12(5.770780163555854), "5.77078016356");
        assert_eq!(fmt12(1.5e-9), "1.5e-9");
        assert_eq!(fmt12(123456789012345.0), "1.23456789012e14");
        for v in [0.1234567890123456, 7.25e-7, 3.0e20, 19.999] {
            let back: f64 = fmt12(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 1e-11);
        }
    }
}
