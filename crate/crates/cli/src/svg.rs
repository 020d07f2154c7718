//! Dependency-free SVG plots: a module dendrogram and overlaid ROC curves.

use std::fmt::Write;

use fuzzyforest::eval::RocCurve;
use fuzzyforest::wgcna::{Dendrogram, ModulePartition};

/// Module color names are CSS colors except a few R-only ones.
fn css_color(name: &str) -> &str {
    match name {
        "grey60" => "#999999",
        n if n.starts_with("module") => "#cccccc",
        n => n,
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Dendrogram with a module color bar under the leaves and a dashed line
/// at the cut height.
pub fn dendrogram(dend: &Dendrogram, partition: &ModulePartition, cut_height: f64) -> String {
    let (width, height) = (900.0, 460.0);
    let (left, right, top, plot_bottom) = (60.0, 20.0, 30.0, 360.0);
    let bar_top = plot_bottom + 15.0;
    let p = dend.n_leaves.max(1);
    let order = dend.leaf_order();
    let step = (width - left - right) / p as f64;
    let mut x = vec![0.0; p + dend.merges.len()];
    for (slot, &leaf) in order.iter().enumerate() {
        x[leaf] = left + step * (slot as f64 + 0.5);
    }
    let max_h = dend.max_height().max(cut_height).max(f64::MIN_POSITIVE);
    let y = |h: f64| plot_bottom - (plot_bottom - top) * h / max_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">Feature dendrogram and module colors</text>"#,
        width / 2.0
    );
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{plot_bottom}" stroke="black"/>"#
    );
    for i in 0..=4 {
        let h = max_h * f64::from(i) / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{h:.2}</text>"#,
            left - 6.0,
            y(h) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">Height</text>"#,
        (top + plot_bottom) / 2.0
    );
    let _ = writeln!(s, r#"<g stroke="black" fill="none" stroke-width="1">"#);
    for (i, m) in dend.merges.iter().enumerate() {
        let (xl, xr) = (x[m.left], x[m.right]);
        let (yl, yr, ym) = (y(dend.node_height(m.left)), y(dend.node_height(m.right)), y(m.height));
        let _ = writeln!(
            s,
            r#"<path d="M{xl:.2} {yl:.2}V{ym:.2}H{xr:.2}V{yr:.2}"/>"#
        );
        x[dend.n_leaves + i] = (xl + xr) / 2.0;
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{:.2}" x2="{:.1}" y2="{:.2}" stroke="red" stroke-dasharray="6 4"/>"#,
        y(cut_height),
        width - right,
        y(cut_height)
    );
    for (slot, &leaf) in order.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{bar_top}" width="{:.2}" height="24" fill="{}"/>"#,
            left + step * slot as f64,
            step,
            css_color(partition.color_of(leaf))
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">Module colors ({} modules, {} features)</text>"#,
        width / 2.0,
        bar_top + 45.0,
        partition.n_modules(),
        partition.n_features()
    );
    s.push_str("</svg>\n");
    s
}

const CURVE_COLORS: &[&str] = &["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"];

/// ROC curves of several models on shared axes, AUC in the legend.
pub fn roc_plot(curves: &[(&str, &RocCurve)]) -> String {
    let size = 520.0;
    let (left, top, plot) = (70.0, 40.0, 400.0);
    let px = |fpr: f64| left + plot * fpr;
    let py = |tpr: f64| top + plot * (1.0 - tpr);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">ROC curves of the best cross-validation fold</text>"#,
        left + plot / 2.0
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let v = f64::from(i) / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{v:.1}</text>"#,
            px(v),
            top + plot + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.1}</text>"#,
            left - 6.0,
            py(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">False positive rate</text>"#,
        left + plot / 2.0,
        top + plot + 36.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(22 {:.1}) rotate(-90)" text-anchor="middle">True positive rate</text>"#,
        top + plot / 2.0
    );
    let _ = writeln!(
        s,
        r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="grey" stroke-dasharray="4 4"/>"#,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    for (i, (name, curve)) in curves.iter().enumerate() {
        let color = CURVE_COLORS[i % CURVE_COLORS.len()];
        let points: Vec<String> = curve
            .points
            .iter()
            .map(|&(f, t)| format!("{:.2},{:.2}", px(f), py(t)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + plot - 20.0 - 18.0 * (curves.len() - 1 - i) as f64;
        let lx = left + plot - 225.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"/>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}">{} (AUC = {:.3})</text>"#,
            lx + 26.0,
            escape(name),
            curve.auc
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use fuzzyforest::wgcna::Merge;

    #[test]
    fn roc_plot_has_one_curve_per_model() {
        let c = RocCurve {
            points: vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)],
            auc: 1.0,
        };
        let svg = roc_plot(&[("a", &c), ("b", &c), ("c<d", &c)]);
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains("a (AUC = 1.000)"));
        assert!(svg.contains("c&lt;d"));
    }

    #[test]
    fn dendrogram_draws_every_merge_and_leaf() {
        let dend = Dendrogram {
            n_leaves: 3,
            merges: vec![
                Merge { left: 0, right: 1, height: 0.2, size: 2 },
                Merge { left: 2, right: 3, height: 0.9, size: 3 },
            ],
        };
        let part = ModulePartition::from_assignment(vec![1, 1, 0], 2);
        let svg = dendrogram(&dend, &part, 0.5);
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains(r#"fill="turquoise""#));
        assert!(svg.contains(r#"fill="grey""#));
    }
}
