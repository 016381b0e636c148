//! ASCII and SVG diagrams of vocabularies: word labels over braces, endpoint
//! values under the axis.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::exemplars::InducedVocabulary;
use crate::vocab::{Domain, Rational, Vocabulary};

const ASCII_WIDTH: usize = 80;
const SVG_WIDTH: i64 = 840;
const SVG_MARGIN: i64 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Ascii,
    Svg,
}

/// What to draw. Induced vocabularies are labeled with `words`.
#[derive(Debug, Clone, Copy)]
pub enum Diagram<'a> {
    Vocabulary(&'a Vocabulary),
    Induced {
        vocabulary: &'a InducedVocabulary,
        words: &'a [String],
    },
}

struct Segment {
    label: String,
    left: Rational,
    right: Rational,
    left_closed: bool,
    right_closed: bool,
}

fn segments(diagram: &Diagram<'_>) -> (Domain, Vec<Segment>) {
    match diagram {
        Diagram::Vocabulary(v) => {
            let d = v.domain().clone();
            let segs = v
                .words()
                .iter()
                .zip(v.extents())
                .filter_map(|(w, e)| {
                    e.as_ref().map(|e| Segment {
                        label: w.clone(),
                        left_closed: e.left_closed(&d),
                        left: e.left.clone(),
                        right: e.right.clone(),
                        right_closed: false,
                    })
                })
                .collect();
            (d, segs)
        }
        Diagram::Induced { vocabulary, words } => {
            let d = vocabulary.domain().clone();
            let segs = vocabulary
                .spans()
                .iter()
                .enumerate()
                .filter_map(|(k, s)| {
                    s.as_ref().map(|s| Segment {
                        label: words.get(k).cloned().unwrap_or_else(|| format!("w{}", k + 1)),
                        left: s.left.clone(),
                        right: s.right.clone(),
                        left_closed: s.left_closed,
                        right_closed: s.right_closed,
                    })
                })
                .collect();
            (d, segs)
        }
    }
}

/// Renders deterministically; identical input gives identical bytes.
pub fn render_diagram(diagram: &Diagram<'_>, format: Format) -> String {
    let (domain, segs) = segments(diagram);
    match format {
        Format::Ascii => ascii(&domain, &segs, matches!(diagram, Diagram::Induced { .. })),
        Format::Svg => svg(&domain, &segs, matches!(diagram, Diagram::Induced { .. })),
    }
}

/// `round(scale · (x − lower) / width)`.
fn scaled(domain: &Domain, x: &Rational, scale: i64) -> BigInt {
    ((x - domain.lower()) * Rational::from_integer(BigInt::from(scale)) / domain.width())
        .round()
        .to_integer()
}

fn column(domain: &Domain, x: &Rational) -> usize {
    scaled(domain, x, (ASCII_WIDTH - 1) as i64).to_usize().unwrap_or(0)
}

fn boundary_values(domain: &Domain, segs: &[Segment]) -> Vec<Rational> {
    let mut values = vec![domain.lower().clone(), domain.upper().clone()];
    for s in segs {
        values.push(s.left.clone());
        values.push(s.right.clone());
    }
    values.sort();
    values.dedup();
    values
}

fn place(line: &mut [char], start: usize, text: &str) {
    for (i, ch) in text.chars().enumerate() {
        if let Some(slot) = line.get_mut(start + i) {
            *slot = ch;
        }
    }
}

fn finish(line: &[char]) -> String {
    line.iter().collect::<String>().trim_end().to_string()
}

fn ascii(domain: &Domain, segs: &[Segment], induced: bool) -> String {
    let mut labels = vec![' '; ASCII_WIDTH];
    let mut axis = vec![if induced { '.' } else { ' ' }; ASCII_WIDTH];
    let mut marks: Vec<Option<char>> = vec![None; ASCII_WIDTH];
    let mut mark = |col: usize, ch: char| {
        marks[col] = Some(match marks[col] {
            Some(prev) if prev != ch => '|',
            _ => ch,
        });
    };
    let mut next_label = 0;
    for s in segs {
        let (cl, cr) = (column(domain, &s.left), column(domain, &s.right));
        for slot in &mut axis[cl..=cr] {
            *slot = if induced { '=' } else { '-' };
        }
        mark(cl, if s.left_closed { '[' } else { '(' });
        mark(cr, if s.right_closed { ']' } else { ')' });
        let len = s.label.chars().count();
        let centre = (cl + cr) / 2;
        let start = centre
            .saturating_sub(len / 2)
            .max(next_label)
            .min(ASCII_WIDTH.saturating_sub(len));
        if start >= next_label {
            place(&mut labels, start, &s.label);
            next_label = start + len + 1;
        }
    }
    for (slot, m) in axis.iter_mut().zip(&marks) {
        if let Some(ch) = m {
            *slot = *ch;
        }
    }

    let mut value_rows: Vec<Vec<char>> = Vec::new();
    let mut free_from: Vec<usize> = Vec::new();
    for v in boundary_values(domain, segs) {
        let text = v.to_string();
        let len = text.chars().count();
        let start = column(domain, &v)
            .saturating_sub(len / 2)
            .min(ASCII_WIDTH.saturating_sub(len));
        let row = match free_from.iter().position(|&f| f <= start) {
            Some(r) => r,
            None => {
                value_rows.push(vec![' '; ASCII_WIDTH]);
                free_from.push(0);
                value_rows.len() - 1
            }
        };
        place(&mut value_rows[row], start, &text);
        free_from[row] = start + len + 1;
    }

    let mut out = String::new();
    for line in std::iter::once(&labels)
        .chain(std::iter::once(&axis))
        .chain(value_rows.iter())
    {
        out.push_str(&finish(line));
        out.push('\n');
    }
    out
}

/// `x` scaled to two decimals.
fn coordinate(domain: &Domain, x: &Rational) -> String {
    let span = SVG_WIDTH - 2 * SVG_MARGIN;
    let hundredths = scaled(domain, x, span * 100) + BigInt::from(SVG_MARGIN * 100);
    let (int, frac) = (&hundredths / 100, &hundredths % 100);
    format!("{int}.{frac:0>2}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn svg(domain: &Domain, segs: &[Segment], induced: bool) -> String {
    let mut out = String::new();
    let (x0, x1) = (coordinate(domain, domain.lower()), coordinate(domain, domain.upper()));
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="140" viewBox="0 0 {SVG_WIDTH} 140">"#
    );
    let _ = writeln!(out, r#"<line x1="{x0}" y1="80" x2="{x1}" y2="80" stroke="black"/>"#);
    for s in segs {
        let (xl, xr) = (coordinate(domain, &s.left), coordinate(domain, &s.right));
        let mid = coordinate(
            domain,
            &((&s.left + &s.right) / Rational::from_integer(BigInt::from(2))),
        );
        if induced {
            let _ = writeln!(
                out,
                r#"<line x1="{xl}" y1="80" x2="{xr}" y2="80" stroke="black" stroke-width="5"/>"#
            );
        }
        let _ = writeln!(
            out,
            r#"<path d="M {xl} 70 L {xl} 64 L {mid} 64 L {mid} 58 L {mid} 64 L {xr} 64 L {xr} 70" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{mid}" y="50" text-anchor="middle">{}</text>"#,
            escape(&s.label)
        );
    }
    for v in boundary_values(domain, segs) {
        let x = coordinate(domain, &v);
        let filled = segs
            .iter()
            .any(|s| (s.left == v && s.left_closed) || (s.right == v && s.right_closed));
        let fill = if filled { "black" } else { "white" };
        let _ = writeln!(out, r#"<circle cx="{x}" cy="80" r="3" fill="{fill}" stroke="black"/>"#);
        let _ = writeln!(out, r#"<text x="{x}" y="100" text-anchor="middle">{v}</text>"#);
    }
    out.push_str("</svg>\n");
    out
}
