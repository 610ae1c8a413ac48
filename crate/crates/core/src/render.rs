//! Layered SVG rendering of a tree node: partition triangles, spanning
//! tree, arrangement edges, Steiner triangulation, and the subdivision
//! overlay.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::geom::{rat_to_f64, Point, Segment};
use crate::lowcross::{build_arrangement, clip_segment_to_convex};
use crate::subdivision::Subdivision;
use crate::tree::{PartitionTree, Region};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Layer {
    Triangles,
    Tree,
    Arrangement,
    Triangulation,
    Subdivision,
}

impl Layer {
    pub fn all() -> Vec<Layer> {
        vec![
            Layer::Triangles,
            Layer::Tree,
            Layer::Arrangement,
            Layer::Triangulation,
            Layer::Subdivision,
        ]
    }

    pub fn parse(s: &str) -> Result<Layer> {
        match s {
            "triangles" => Ok(Layer::Triangles),
            "tree" => Ok(Layer::Tree),
            "arrangement" => Ok(Layer::Arrangement),
            "triangulation" => Ok(Layer::Triangulation),
            "subdivision" => Ok(Layer::Subdivision),
            _ => Err(Error::Invalid(format!("unknown layer {s:?}"))),
        }
    }

}

const SCALE: f64 = 1000.0;

fn xy(p: &Point) -> (f64, f64) {
    let (x, y) = (rat_to_f64(&p.x), rat_to_f64(&p.y));
    (SCALE * x, SCALE * (1.0 - y))
}

fn path_of(points: &[Point], close: bool) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let (x, y) = xy(p);
        let _ = write!(d, "{}{x:.3} {y:.3} ", if i == 0 { "M" } else { "L" });
    }
    if close {
        d.push('Z');
    }
    d
}

fn seg_line(s: &Segment, class: &str) -> String {
    let (x1, y1) = xy(&s.a);
    let (x2, y2) = xy(&s.b);
    format!(r#"<line class="{class}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#)
}

/// Renders the requested layers for one tree node as a standalone SVG 1.1
/// document. The arrangement layer is recomputed from the stored partition
/// and spanning-tree edges (the construction is deterministic).
pub fn render_node_svg(
    tree: &PartitionTree,
    node: usize,
    g: &Subdivision,
    layers: &[Layer],
) -> Result<String> {
    let Some(n) = tree.nodes.get(node) else {
        return Err(Error::Invalid(format!("node {node} does not exist")));
    };
    let wanted: BTreeSet<Layer> = layers.iter().copied().collect();
    let mut svg = String::new();
    svg.push_str(
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 1000 1000">
<style>
 .boundary { fill: none; stroke: #888; stroke-width: 1; }
 .partition { fill: rgba(70,130,180,0.12); stroke: #4682b4; stroke-width: 2; }
 .treeedge { stroke: #d2691e; stroke-width: 1.6; }
 .arredge { stroke: #999; stroke-width: 0.7; }
 .child { fill: none; stroke: #2e8b57; stroke-width: 0.9; }
 .gedge { stroke: #111; stroke-width: 1.4; }
</style>
"#,
    );
    // Region boundary always drawn for context.
    let region_poly = n.region.polygon();
    svg.push_str(&format!(
        "<path class=\"boundary\" d=\"{}\"/>\n",
        path_of(region_poly.verts(), true)
    ));

    if wanted.contains(&Layer::Subdivision) {
        svg.push_str("<g id=\"subdivision\">\n");
        for s in g.segments() {
            svg.push_str(&seg_line(s, "gedge"));
            svg.push('\n');
        }
        svg.push_str("</g>\n");
    }
    if let Some(level) = &n.level {
        if wanted.contains(&Layer::Triangles) {
            svg.push_str("<g id=\"triangles\">\n");
            for t in level.seq.triangles() {
                svg.push_str(&format!(
                    "<path class=\"partition\" d=\"{}\"/>\n",
                    path_of(t.verts(), true)
                ));
            }
            svg.push_str("</g>\n");
        }
        if wanted.contains(&Layer::Tree) {
            svg.push_str("<g id=\"tree\">\n");
            for s in &level.tree_edges {
                svg.push_str(&seg_line(s, "treeedge"));
                svg.push('\n');
            }
            svg.push_str("</g>\n");
        }
        if wanted.contains(&Layer::Arrangement) {
            let mut segs: Vec<Segment> = Vec::new();
            let rv = region_poly.verts();
            for i in 0..rv.len() {
                segs.push(Segment { a: rv[i].clone(), b: rv[(i + 1) % rv.len()].clone() });
            }
            for t in level.seq.triangles() {
                segs.extend(t.edges());
            }
            segs.extend(level.tree_edges.iter().cloned());
            let clipped: Vec<Segment> = segs
                .iter()
                .filter_map(|s| clip_segment_to_convex(s, &region_poly))
                .collect();
            let arr = build_arrangement(&clipped)?;
            svg.push_str("<g id=\"arrangement\">\n");
            for s in arr.edge_segments() {
                svg.push_str(&seg_line(&s, "arredge"));
                svg.push('\n');
            }
            svg.push_str("</g>\n");
        }
    }
    if wanted.contains(&Layer::Triangulation) {
        svg.push_str("<g id=\"triangulation\">\n");
        for &c in &n.children {
            if let Region::Tri(t) = &tree.nodes[c].region {
                svg.push_str(&format!(
                    "<path class=\"child\" d=\"{}\"/>\n",
                    path_of(t.verts(), true)
                ));
            }
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::subdivision::normalize_unit_square;
    use crate::tree::{build_tree, TreeParams};

    #[test]
    fn svg_has_requested_groups() {
        let (g, d, _) =
            normalize_unit_square(&fixtures::islands(2), &fixtures::islands_skew_measure(2))
                .unwrap();
        let params = TreeParams { r: 4, seed: 1, ..TreeParams::default() };
        let tree = build_tree(&g, &d, &params).unwrap();
        let svg = render_node_svg(&tree, 0, &g, &Layer::all()).unwrap();
        for id in ["triangles", "tree", "arrangement", "triangulation", "subdivision"] {
            assert!(svg.contains(&format!("<g id=\"{id}\">")), "missing layer {id}");
        }
        assert!(svg.starts_with("<svg"));
        let partial = render_node_svg(&tree, 0, &g, &[Layer::Tree]).unwrap();
        assert!(partial.contains("<g id=\"tree\">"));
        assert!(!partial.contains("<g id=\"triangles\">"));
    }

    #[test]
    fn unknown_node_is_an_error() {
        let (g, d, _) =
            normalize_unit_square(&fixtures::tri(), &fixtures::uniform_measure_on_box()).unwrap();
        let params = TreeParams { r: 4, seed: 1, ..TreeParams::default() };
        let tree = build_tree(&g, &d, &params).unwrap();
        assert!(render_node_svg(&tree, 10_000, &g, &Layer::all()).is_err());
    }
}
