//! Self-contained SVG of cumulative delay against packet index.

use std::fmt::Write as _;

use crate::mac::TrafficClass;

use super::RunOutcome;

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub class: TrafficClass,
    /// Cumulative delay in seconds, indexed by arrival order.
    pub points: Vec<f64>,
}

impl Series {
    pub fn from_run(run: &RunOutcome) -> Vec<Series> {
        TrafficClass::BOTH
            .into_iter()
            .map(|class| Series {
                label: run.config.net.scheme.name().to_string(),
                class,
                points: run
                    .summary
                    .class(class)
                    .cumulative_us
                    .iter()
                    .map(|&us| us as f64 / 1e6)
                    .collect(),
            })
            .collect()
    }

    /// Parses a deliveries CSV into one series per class.
    pub fn from_deliveries_csv(label: &str, csv: &str) -> Result<Vec<Series>, String> {
        let mut out: Vec<Series> = TrafficClass::BOTH
            .into_iter()
            .map(|class| Series {
                label: label.to_string(),
                class,
                points: Vec::new(),
            })
            .collect();
        for (i, line) in csv.lines().enumerate().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(format!("line {}: expected 7 fields", i + 1));
            }
            let class = TrafficClass::from_label(f[1]).ok_or_else(|| format!("line {}: bad class `{}`", i + 1, f[1]))?;
            let cum: u64 = f[6].parse().map_err(|e| format!("line {}: {e}", i + 1))?;
            out[class.index()].points.push(cum as f64 / 1e6);
        }
        Ok(out)
    }
}

const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn nice_step(span: f64) -> f64 {
    if span <= 0.0 {
        return 1.0;
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(series: &[Series]) -> String {
    let x_max = series.iter().map(|s| s.points.len()).max().unwrap_or(0).max(1) as f64;
    let y_max = series
        .iter()
        .flat_map(|s| s.points.last().copied())
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let (xs, ys) = (nice_step(x_max), nice_step(y_max));
    let x_top = (x_max / xs).ceil() * xs;
    let y_top = (y_max / ys).ceil() * ys;
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + x / x_top * pw;
    let py = |y: f64| TOP + ph - y / y_top * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let mut x = 0.0;
    while x <= x_top + 1e-9 {
        let _ = writeln!(
            s,
            r##"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="#ddd"/><text x="{0:.1}" y="{3:.1}" text-anchor="middle">{4}</text>"##,
            px(x),
            TOP,
            TOP + ph,
            TOP + ph + 16.0,
            x
        );
        x += xs;
    }
    let mut y = 0.0;
    while y <= y_top + 1e-9 {
        let _ = writeln!(
            s,
            r##"<line x1="{0:.1}" y1="{1:.1}" x2="{2:.1}" y2="{1:.1}" stroke="#ddd"/><text x="{3:.1}" y="{4:.1}" text-anchor="end">{5}</text>"##,
            LEFT,
            py(y),
            LEFT + pw,
            LEFT - 6.0,
            py(y) + 4.0,
            (y * 1e6).round() / 1e6
        );
        y += ys;
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">Number of packets</text>"#,
        LEFT + pw / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">Cumulative end-to-end delay (s)</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (i, sr) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let dash = if sr.class == TrafficClass::ClassII { r#" stroke-dasharray="6 3""# } else { "" };
        let pts: Vec<String> = std::iter::once((0.0, 0.0))
            .chain(sr.points.iter().enumerate().map(|(k, &v)| ((k + 1) as f64, v)))
            .map(|(a, b)| format!("{:.1},{:.1}", px(a), py(b)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.1}" y="{:.1}">{} {}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            esc(&sr.label),
            sr.class
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(label: &str, class: TrafficClass, n: usize) -> Series {
        Series {
            label: label.into(),
            class,
            points: (1..=n).map(|k| k as f64 * 0.5).collect(),
        }
    }

    #[test]
    fn one_curve_per_series() {
        let s: Vec<Series> = ["baseline", "cw"]
            .iter()
            .flat_map(|l| TrafficClass::BOTH.map(|c| series(l, c, 20)))
            .collect();
        let svg = render(&s);
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg, render(&s));
    }

    #[test]
    fn empty_input_renders() {
        let svg = render(&[]);
        assert!(svg.contains("</svg>"));
    }

    #[test]
    fn parses_deliveries() {
        let csv = "h\n1,I,1,0,10,10,10\n1,II,2,0,30,30,30\n2,I,1,5,25,20,30\n";
        let s = Series::from_deliveries_csv("x", csv).unwrap();
        assert_eq!(s[0].points, vec![10e-6, 30e-6]);
        assert_eq!(s[1].points, vec![30e-6]);
        assert!(Series::from_deliveries_csv("x", "h\n1,III,1,0,1,1,1\n").is_err());
    }

    #[test]
    fn steps_are_round() {
        assert_eq!(nice_step(100.0), 20.0);
        assert_eq!(nice_step(7.0), 2.0);
        assert_eq!(nice_step(0.3), 0.1);
    }
}
