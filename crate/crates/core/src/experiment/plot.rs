use std::fmt::Write as _;

use super::config::Variant;
use super::report::ResultSet;
use crate::metrics::FrontPoint;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Clone, Debug, PartialEq)]
pub struct FrontPlot {
    pub digit: u8,
    pub fronts: Vec<(Variant, Vec<FrontPoint>)>,
    pub warnings: Vec<String>,
}

/// Accumulated PO front per variant for `digit`. Both MOEA/D variants are
/// expected; a missing one produces a warning and a partial plot.
pub fn plot_fronts(results: &ResultSet, digit: u8) -> FrontPlot {
    let mut fronts = Vec::new();
    let mut warnings = Vec::new();
    for v in Variant::ALL {
        let front = results.po_front(v, digit);
        if !front.is_empty() {
            fronts.push((v, front));
        } else if matches!(v, Variant::MoeadTch | Variant::MoeadTchSsc) {
            warnings.push(format!("no results for {} on digit {digit}", v.label()));
        }
    }
    FrontPlot {
        digit,
        fronts,
        warnings,
    }
}

/// Staircase vertices under maximization for a front sorted by decreasing
/// TPR: drop from each point to the next point's TNR level, ending on both axes.
pub fn staircase(front: &[FrontPoint]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = front.iter().map(FrontPoint::point).collect();
    pts.sort_by(|a, b| b[0].total_cmp(&a[0]).then(a[1].total_cmp(&b[1])));
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(pts.len() * 2 + 2);
    let mut push = |q: [f64; 2]| {
        if out.last() != Some(&q) {
            out.push(q);
        }
    };
    let mut level = 0.0;
    for p in &pts {
        push([p[0], level]);
        push(*p);
        level = p[1];
    }
    if !pts.is_empty() {
        push([0.0, level]);
    }
    out
}

impl FrontPlot {
    /// `variant,tpr,tnr,run,individual`, one row per front point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variant,tpr,tnr,run,individual\n");
        for (v, front) in &self.fronts {
            for p in front {
                let _ = writeln!(out, "{},{},{},{},{}", v.key(), p.tpr, p.tnr, p.run, p.individual);
            }
        }
        out
    }

    pub fn to_svg(&self) -> String {
        let w = SIZE + 2.0 * MARGIN;
        let x = |tpr: f64| MARGIN + tpr * SIZE;
        let y = |tnr: f64| MARGIN + (1.0 - tnr) * SIZE;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" viewBox="0 0 {w} {w}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
        );
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t:.1}</text>"#,
                x(t),
                y(0.0) + 18.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{t:.1}</text>"#,
                x(0.0) - 6.0,
                y(t) + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">TPR</text>"#,
            x(0.5),
            y(0.0) + 40.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">TNR</text>"#,
            x(0.0) - 40.0,
            y(0.5),
            x(0.0) - 40.0,
            y(0.5)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14">Digit {}</text>"#,
            x(0.5),
            MARGIN - 24.0,
            self.digit
        );
        for (k, (v, front)) in self.fronts.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let path: Vec<String> = staircase(front)
                .iter()
                .map(|p| format!("{:.2},{:.2}", x(p[0]), y(p[1])))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
                path.join(" "),
                v.label()
            );
            for p in front {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                    x(p.tpr),
                    y(p.tnr)
                );
            }
            let ly = MARGIN + 16.0 + 16.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                x(0.05),
                x(0.12),
                x(0.14),
                ly + 4.0,
                v.label()
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_points_staircase() {
        let s = staircase(&[FrontPoint::new(0.0, 1.0), FrontPoint::new(1.0, 0.0)]);
        assert_eq!(s, vec![[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]);
        assert!(s.contains(&[1.0, 0.0]) && s.contains(&[0.0, 1.0]));
    }

    #[test]
    fn knee_staircase() {
        let s = staircase(&[FrontPoint::new(0.5, 0.8), FrontPoint::new(0.9, 0.3)]);
        assert_eq!(s, vec![[0.9, 0.0], [0.9, 0.3], [0.5, 0.3], [0.5, 0.8], [0.0, 0.8]]);
    }

    #[test]
    fn empty_front() {
        assert!(staircase(&[]).is_empty());
    }
}
