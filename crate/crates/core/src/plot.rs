//! Standalone SVG bar charts of topic word scores.

use std::fmt::Write as _;
use std::path::Path;

use crate::topics::WordScoreRow;
use crate::util::write_atomic;
use crate::Result;

pub const MAX_PANELS: usize = 12;
pub const BARS_PER_PANEL: usize = 5;
/// Length of the longest bar in every panel.
pub const BAR_MAX_WIDTH: f64 = 160.0;

const COLUMNS: usize = 4;
const PANEL_W: f64 = 280.0;
const PANEL_H: f64 = 170.0;
const LABEL_W: f64 = 100.0;
const BAR_H: f64 = 18.0;
const BAR_GAP: f64 = 8.0;
const TITLE_H: f64 = 30.0;
const MARGIN: f64 = 20.0;

fn esc(s: &str) -> String {
    html_escape::encode_text(s).replace('"', "&quot;")
}

/// Group rows into panels by topic, keeping first-appearance order.
fn panels(rows: &[WordScoreRow]) -> Vec<(usize, &str, Vec<&WordScoreRow>)> {
    let mut out: Vec<(usize, &str, Vec<&WordScoreRow>)> = Vec::new();
    for row in rows {
        match out.iter_mut().find(|p| p.0 == row.topic_id) {
            Some(panel) => panel.2.push(row),
            None => out.push((row.topic_id, row.label.as_str(), vec![row])),
        }
    }
    out.truncate(MAX_PANELS);
    for panel in &mut out {
        panel.2.sort_by_key(|r| r.rank);
        panel.2.truncate(BARS_PER_PANEL);
    }
    out
}

/// One horizontal bar panel per topic in a grid. Within a panel the bar
/// length is proportional to the weight, the largest weight spanning
/// [`BAR_MAX_WIDTH`].
pub fn render_wordscore_svg(rows: &[WordScoreRow]) -> String {
    let panels = panels(rows);
    let cols = COLUMNS.min(panels.len().max(1));
    let grid_rows = panels.len().div_ceil(COLUMNS).max(1);
    let width = MARGIN * 2.0 + cols as f64 * PANEL_W;
    let height = MARGIN * 2.0 + TITLE_H + grid_rows as f64 * PANEL_H;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{}" font-size="16" font-weight="bold">Topic word scores</text>"#,
        MARGIN + 14.0
    );
    if panels.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text class="notice" x="{MARGIN}" y="{}" font-size="13">No word scores to plot.</text>"#,
            MARGIN + TITLE_H + 20.0
        );
    }
    for (i, (topic_id, label, bars)) in panels.iter().enumerate() {
        let px = MARGIN + (i % COLUMNS) as f64 * PANEL_W;
        let py = MARGIN + TITLE_H + (i / COLUMNS) as f64 * PANEL_H;
        let max = bars.iter().map(|r| r.weight).fold(0.0f64, f64::max);
        let _ = writeln!(svg, r#"<g class="panel" transform="translate({px},{py})">"#);
        let _ = writeln!(
            svg,
            r#"<text x="0" y="14" font-size="12" font-weight="bold">Topic {topic_id}: {}</text>"#,
            esc(label)
        );
        for (j, r) in bars.iter().enumerate() {
            let y = 26.0 + j as f64 * (BAR_H + BAR_GAP);
            let w = if max > 0.0 {
                r.weight / max * BAR_MAX_WIDTH
            } else {
                0.0
            };
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
                LABEL_W - 6.0,
                y + 13.0,
                esc(&r.term)
            );
            let _ = writeln!(
                svg,
                r##"<rect class="bar" x="{LABEL_W}" y="{y}" width="{w}" height="{BAR_H}" fill="#4c78a8"><title>{} {}</title></rect>"##,
                esc(&r.term),
                r.weight
            );
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn save_wordscore_svg(path: &Path, rows: &[WordScoreRow]) -> Result<()> {
    let svg = render_wordscore_svg(rows);
    write_atomic(path, |w| Ok(w.write_all(svg.as_bytes())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(topics: usize, terms: usize) -> Vec<WordScoreRow> {
        (0..topics)
            .flat_map(|t| {
                (0..terms).map(move |r| WordScoreRow {
                    topic_id: t,
                    label: format!("topic{t}"),
                    rank: r + 1,
                    term: format!("w{r}"),
                    weight: (terms - r) as f64,
                })
            })
            .collect()
    }

    fn bar_widths(svg: &str) -> Vec<f64> {
        svg.match_indices(r#"<rect class="bar""#)
            .map(|(i, _)| {
                let rest = &svg[i..];
                let start = rest.find("width=\"").unwrap() + 7;
                let end = start + rest[start..].find('"').unwrap();
                rest[start..end].parse().unwrap()
            })
            .collect()
    }

    #[test]
    fn twelve_panels_sixty_bars() {
        let svg = render_wordscore_svg(&rows(14, 6));
        assert_eq!(svg.matches(r#"<g class="panel""#).count(), 12);
        assert_eq!(bar_widths(&svg).len(), 60);
    }

    #[test]
    fn one_topic_one_panel() {
        let svg = render_wordscore_svg(&rows(1, 5));
        assert_eq!(svg.matches(r#"<g class="panel""#).count(), 1);
    }

    #[test]
    fn bars_proportional() {
        let svg = render_wordscore_svg(&rows(1, 2));
        let w = bar_widths(&svg);
        assert_eq!(w, vec![BAR_MAX_WIDTH, BAR_MAX_WIDTH / 2.0]);
        assert_eq!(w[0], 2.0 * w[1]);
    }

    #[test]
    fn empty_input_gives_notice() {
        let svg = render_wordscore_svg(&[]);
        assert!(svg.contains("No word scores to plot."));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn svg_is_well_formed_xml() {
        let mut r = rows(3, 5);
        r[0].label = "a<b>&\"c\"".into();
        let svg = render_wordscore_svg(&r);
        let mut reader = quick_xml::Reader::from_str(&svg);
        let mut depth = 0i32;
        loop {
            match reader.read_event().unwrap() {
                quick_xml::events::Event::Start(_) => depth += 1,
                quick_xml::events::Event::End(_) => depth -= 1,
                quick_xml::events::Event::Eof => break,
                _ => {}
            }
        }
        assert_eq!(depth, 0);
    }
}
