use cla_core::io::Study;
use cla_core::power::Rate;
use cla_core::AltSet;

pub fn fixed2(x: f64) -> String {
    format!("{x:.2}")
}

/// `100%`, `50%`, `33.33%`.
pub fn percent(successes: usize, trials: usize) -> String {
    let p = 100.0 * successes as f64 / trials as f64;
    let s = format!("{p:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{s}%")
}

pub fn set(study: &Study, s: AltSet) -> String {
    format!("{{{}}}", study.labels_of(s).join(","))
}

pub fn rate(r: &Rate, paper_style: bool) -> String {
    if paper_style && (r.value == 0.0 || r.value == 1.0) {
        format!("{}", r.value)
    } else {
        format!("{} ({}; {})", fixed2(r.value), fixed2(r.ci.0), fixed2(r.ci.1))
    }
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = vec![line(header.to_vec())];
    for row in rows {
        out.push(line(row.iter().map(String::as_str).collect()));
    }
    out.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentages() {
        assert_eq!(percent(1, 1), "100%");
        assert_eq!(percent(1, 2), "50%");
        assert_eq!(percent(1, 3), "33.33%");
        assert_eq!(percent(0, 4), "0%");
    }

    #[test]
    fn aligned_table() {
        let t = table(&["a", "bb"], &[vec!["xyz".into(), "1".into()]]);
        assert_eq!(t, "a    bb\nxyz  1");
    }
}
