use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::SweepPoint;
use crate::decode::Algorithm;
use crate::error::{Error, Result};

pub const RESULTS_HEADER: &str = "algorithm,k,K,N,M,trials,successes,failures,p_success,master_seed";

/// Results table, one line per point.
pub fn write_results(points: &[SweepPoint]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.6},{}",
            p.algorithm,
            p.k,
            p.support_size,
            p.n_vars,
            p.n_checks,
            p.trials,
            p.successes,
            p.failures,
            p.p_success(),
            p.master_seed
        )
        .unwrap();
    }
    out
}

pub fn parse_results(text: &str) -> Result<Vec<SweepPoint>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == RESULTS_HEADER => {}
        Some((i, _)) => return Err(Error::parse(i + 1, format!("expected header {RESULTS_HEADER:?}"))),
        None => return Err(Error::parse(1, "empty results file")),
    }
    lines
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 10 {
                return Err(Error::parse(i + 1, format!("expected 10 columns, found {}", f.len())));
            }
            let num = |j: usize| -> Result<u64> {
                f[j].parse()
                    .map_err(|_| Error::parse(i + 1, format!("column {} is not an integer: {:?}", j + 1, f[j])))
            };
            let k: f64 = f[1]
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad sparsity {:?}", f[1])))?;
            let algorithm: Algorithm = f[0].parse().map_err(|_| Error::parse(i + 1, format!("unknown algorithm {:?}", f[0])))?;
            let point = SweepPoint {
                algorithm,
                k,
                support_size: num(2)? as usize,
                n_vars: num(3)? as usize,
                n_checks: num(4)? as usize,
                trials: num(5)?,
                successes: num(6)?,
                failures: num(7)?,
                master_seed: num(9)?,
            };
            if point.successes + point.failures != point.trials {
                return Err(Error::parse(i + 1, "successes + failures differs from trials"));
            }
            Ok(point)
        })
        .collect()
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 130.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 50.0;

fn color(a: Algorithm) -> &'static str {
    match a {
        Algorithm::Ip => "#1f77b4",
        Algorithm::Vb => "#2ca02c",
        Algorithm::Vbip => "#d62728",
    }
}

/// Success probability versus sparsity, one polyline per algorithm, axes
/// `[0, k_max] × [0, 1]`.
pub fn render_plot_svg(points: &[SweepPoint]) -> String {
    let mut curves: BTreeMap<Algorithm, Vec<(f64, f64)>> = BTreeMap::new();
    for p in points {
        curves.entry(p.algorithm).or_default().push((p.k, p.p_success()));
    }
    for c in curves.values_mut() {
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let k_max = points.iter().map(|p| p.k).fold(0.0, f64::max);
    let k_max = if k_max > 0.0 { k_max } else { 1.0 };
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |k: f64| MARGIN_L + k / k_max * plot_w;
    let py = |p: f64| MARGIN_T + (1.0 - p) * plot_h;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<g id="axes" stroke="black" fill="none"><rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}"/></g>"#
    )
    .unwrap();
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{:.3}</text>"#,
            px(t * k_max),
            HEIGHT - MARGIN_B + 18.0,
            t * k_max
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.1}</text>"#,
            MARGIN_L - 6.0,
            py(t) + 4.0,
            t
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">sparsity k = K/N</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 10.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">probability of correct reconstruction</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    )
    .unwrap();
    for (i, (alg, pts)) in curves.iter().enumerate() {
        let path = pts
            .iter()
            .map(|&(k, p)| format!("{:.2},{:.2}", px(k), py(p)))
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(
            s,
            r#"<polyline class="curve" data-algorithm="{alg}" fill="none" stroke="{}" stroke-width="2" points="{path}"/>"#,
            color(*alg)
        )
        .unwrap();
        let ly = MARGIN_T + 20.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_R + 12.0;
        writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            color(*alg),
            lx + 26.0,
            ly + 4.0,
            alg.name().to_uppercase()
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
