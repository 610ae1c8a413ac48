//! wasm-bindgen bindings for the browser demo: build a structure for a
//! built-in fixture, render its layers as SVG, locate clicked points, and
//! run seeded query benchmarks. All results are JSON strings so the page
//! stays plain JavaScript.

use wasm_bindgen::prelude::*;

use entroloc::analysis::run_benchmark;
use entroloc::fixtures;
use entroloc::geom::{rat_to_f64, Point, Rat};
use entroloc::render::{render_node_svg, Layer};
use entroloc::subdivision::normalize_unit_square;
use entroloc::trapmap::TrapMap;
use entroloc::tree::{build_tree, query, NodeKind, PartitionTree, Region, TreeParams};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn js(e: String) -> JsValue {
    JsValue::from_str(&e)
}

#[wasm_bindgen]
pub struct Demo {
    g: entroloc::subdivision::Subdivision,
    d: entroloc::measure::MeasureSpec,
    tree: PartitionTree,
    backup: TrapMap,
}

#[wasm_bindgen]
impl Demo {
    /// Builds a structure for a built-in fixture.
    /// fixtures: tri | islands2 | islands3 | grid256 | grid1024;
    /// measures: uniform | hot | skewed | islands.
    #[wasm_bindgen(constructor)]
    pub fn new(fixture: &str, measure: &str, r: usize, seed: u64) -> Result<Demo, JsValue> {
        Demo::new_impl(fixture, measure, r, seed).map_err(js)
    }

    fn new_impl(fixture: &str, measure: &str, r: usize, seed: u64) -> Result<Demo, String> {
        let g = match fixture {
            "tri" => fixtures::tri(),
            "islands2" => fixtures::islands(2),
            "islands3" => fixtures::islands(3),
            "grid256" => fixtures::grid(256),
            "grid1024" => fixtures::grid(1024),
            other => return Err(err(format!("unknown fixture {other:?}"))),
        };
        let d = match measure {
            "uniform" => fixtures::uniform_measure_on_box(),
            "hot" => fixtures::hot_cell_measure(),
            "skewed" => fixtures::skewed_99_1(),
            "islands" => fixtures::islands_skew_measure(2),
            other => return Err(err(format!("unknown measure {other:?}"))),
        };
        let (g, d, _) = normalize_unit_square(&g, &d).map_err(err)?;
        let params = TreeParams { r, seed, ..TreeParams::default() };
        let tree = build_tree(&g, &d, &params).map_err(err)?;
        let mut backup = TrapMap::build(&g, seed);
        backup.assign_labels(&g);
        Ok(Demo { g, d, tree, backup })
    }

    /// SVG of the root node; `layers` is a comma-separated subset of
    /// triangles,tree,arrangement,triangulation,subdivision (empty = all).
    pub fn render_svg(&self, layers: &str) -> Result<String, JsValue> {
        self.render_impl(layers).map_err(js)
    }

    fn render_impl(&self, layers: &str) -> Result<String, String> {
        let layers = if layers.trim().is_empty() {
            Layer::all()
        } else {
            let mut out = Vec::new();
            for item in layers.split(',') {
                out.push(Layer::parse(item.trim()).map_err(err)?);
            }
            out
        };
        render_node_svg(&self.tree, 0, &self.g, &layers).map_err(err)
    }

    /// Locates a unit-square point; returns JSON with the label and the
    /// query statistics.
    pub fn locate(&self, x: f64, y: f64) -> Result<String, JsValue> {
        self.locate_impl(x, y).map_err(js)
    }

    fn locate_impl(&self, x: f64, y: f64) -> Result<String, String> {
        let (Some(rx), Some(ry)) = (Rat::from_float(x), Rat::from_float(y)) else {
            return Err(err("coordinates must be finite"));
        };
        let p = Point::new(rx, ry);
        let (label, stats) = query(&self.tree, &self.backup, self.g.outer_label(), &p);
        Ok(serde_json::json!({
            "label": label,
            "comparisons": stats.comparisons,
            "depth": stats.depth,
            "terminal": stats.terminal,
            "backup": stats.used_backup,
        })
        .to_string())
    }

    /// Runs a seeded benchmark of D-sampled queries; returns the JSON report.
    pub fn benchmark(&self, queries: usize, seed: u64) -> Result<String, JsValue> {
        self.benchmark_impl(queries, seed).map_err(js)
    }

    fn benchmark_impl(&self, queries: usize, seed: u64) -> Result<String, String> {
        let report =
            run_benchmark("demo", &self.g, &self.d, &self.tree, &self.backup, queries, seed)
                .map_err(err)?;
        serde_json::to_string(&report).map_err(err)
    }

    /// Structure overview for the page header.
    pub fn summary(&self) -> String {
        let terminal_mass: f64 = self
            .tree
            .leaves()
            .filter(|(_, n)| matches!(n.kind, NodeKind::Terminal { .. }))
            .map(|(_, n)| rat_to_f64(&n.mass))
            .sum();
        serde_json::json!({
            "n": self.g.n(),
            "faces": self.g.faces().len(),
            "nodes": self.tree.node_count(),
            "terminal_leaves": self.tree.terminal_leaf_count(),
            "terminal_mass": terminal_mass,
            "depth_cap": self.tree.depth_cap,
            "trapezoids": self.backup.trapezoid_count(),
            "leaf_entropy_bits": entroloc::analysis::leaf_entropy(&self.tree),
            "log2_n": (self.g.n() as f64).log2(),
        })
        .to_string()
    }

    /// Leaf regions as flat [x0,y0,x1,y1,x2,y2,kind] records for custom
    /// drawing; kind: 0 terminal, 1 nonterminal.
    pub fn leaf_triangles(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (_, node) in self.tree.leaves() {
            let Region::Tri(t) = &node.region else { continue };
            for v in t.verts() {
                let (x, y) = v.to_f64();
                out.push(x);
                out.push(y);
            }
            out.push(match node.kind {
                NodeKind::Terminal { .. } => 0.0,
                _ => 1.0,
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_builds_and_answers() {
        let demo = Demo::new_impl("islands2", "islands", 4, 7).unwrap();
        let svg = demo.render_impl("").unwrap();
        assert!(svg.contains("<g id=\"triangulation\">"));
        let ans: serde_json::Value =
            serde_json::from_str(&demo.locate_impl(0.2, 0.2).unwrap()).unwrap();
        assert!(ans["comparisons"].as_u64().unwrap() >= 4);
        let report: serde_json::Value =
            serde_json::from_str(&demo.benchmark_impl(200, 1).unwrap()).unwrap();
        assert!(report["mean_comparisons"].as_f64().unwrap() >= 4.0);
        let summary: serde_json::Value = serde_json::from_str(&demo.summary()).unwrap();
        assert!(summary["nodes"].as_u64().unwrap() >= 2);
        assert!(!demo.leaf_triangles().is_empty());
    }

    #[test]
    fn unknown_fixture_is_an_error() {
        assert!(Demo::new_impl("nope", "uniform", 4, 1).is_err());
        assert!(Demo::new_impl("tri", "nope", 4, 1).is_err());
        assert!(Demo::new_impl("islands2", "islands", 4, 1)
            .unwrap()
            .render_impl("bogus")
            .is_err());
    }
}
