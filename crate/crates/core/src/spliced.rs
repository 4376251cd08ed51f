//! Spliced arrows: operations `w0 - w1 - … - wn` of the spliced-arrow
//! operad of a free category, composed by splicing into the gaps.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeIx, PathArrow, PathFunctor};

/// The pair of objects `(A, B)` framing a gap.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GapType {
    pub left: NodeIx,
    pub right: NodeIx,
}

impl GapType {
    pub fn new(left: NodeIx, right: NodeIx) -> GapType {
        GapType { left, right }
    }

    pub fn of_path(p: &PathArrow) -> GapType {
        GapType::new(p.src(), p.tgt())
    }

    pub fn render(&self, g: &Graph) -> String {
        format!("{},{}", g.node_name(self.left), g.node_name(self.right))
    }
}

/// `n + 1` paths separated by `n` typed gaps. Segment `w_i` runs from the
/// right end of gap `i` to the left end of gap `i + 1`, where the outer
/// type supplies the two ends of the whole arrow.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplicedArrow {
    segments: Vec<PathArrow>,
    gaps: Vec<GapType>,
    outer: GapType,
}

impl SplicedArrow {
    /// Builds a spliced arrow from its segments; gap types are read off the
    /// segment endpoints.
    pub fn new(segments: Vec<PathArrow>) -> Result<SplicedArrow> {
        let first = segments
            .first()
            .ok_or_else(|| Error::Precondition("a spliced arrow has at least one segment".into()))?;
        let last = segments.last().expect("nonempty");
        let outer = GapType::new(first.src(), last.tgt());
        let gaps = segments
            .windows(2)
            .map(|w| GapType::new(w[0].tgt(), w[1].src()))
            .collect();
        Ok(SplicedArrow { segments, gaps, outer })
    }

    /// Builds a spliced arrow with declared gap types, checking that they
    /// agree with the segments.
    pub fn with_types(g: &Graph, segments: Vec<PathArrow>, gaps: Vec<GapType>, outer: GapType) -> Result<SplicedArrow> {
        for s in &segments {
            g.check_path(s)?;
        }
        let f = SplicedArrow::new(segments)?;
        if f.gaps.len() != gaps.len() {
            return Err(Error::ArityMismatch {
                expected: gaps.len(),
                found: f.gaps.len(),
            });
        }
        for (have, want) in f.gaps.iter().zip(&gaps).chain([(&f.outer, &outer)]) {
            if have != want {
                return Err(Error::GapMismatch {
                    expected: want.render(g),
                    found: have.render(g),
                });
            }
        }
        Ok(f)
    }

    /// A constant: a single path.
    pub fn constant(p: PathArrow) -> SplicedArrow {
        SplicedArrow::new(vec![p]).expect("one segment")
    }

    /// The unary identity `id_A - id_B` at gap type `(A, B)`.
    pub fn identity(gap: GapType) -> SplicedArrow {
        SplicedArrow::new(vec![PathArrow::identity(gap.left), PathArrow::identity(gap.right)]).expect("two segments")
    }

    pub fn arity(&self) -> usize {
        self.gaps.len()
    }

    pub fn segments(&self) -> &[PathArrow] {
        &self.segments
    }

    pub fn gap_types(&self) -> &[GapType] {
        &self.gaps
    }

    pub fn outer(&self) -> GapType {
        self.outer
    }

    /// Total number of edges over all segments.
    pub fn len(&self) -> usize {
        self.segments.iter().map(PathArrow::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.iter().all(PathArrow::is_empty)
    }

    /// The path of a constant (arity 0) spliced arrow.
    pub fn as_constant(&self) -> Option<&PathArrow> {
        (self.arity() == 0).then(|| &self.segments[0])
    }

    /// Partial composition `self ∘_i g`: splices `g` into gap `i` (0-indexed).
    pub fn splice_at(&self, i: usize, g: &SplicedArrow) -> Result<SplicedArrow> {
        if i >= self.arity() {
            return Err(Error::IndexOutOfRange {
                index: i,
                arity: self.arity(),
            });
        }
        if self.gaps[i] != g.outer {
            return Err(Error::GapMismatch {
                expected: format!("#{},#{}", self.gaps[i].left.0, self.gaps[i].right.0),
                found: format!("#{},#{}", g.outer.left.0, g.outer.right.0),
            });
        }
        let m = g.arity();
        let mut segments = Vec::with_capacity(self.segments.len() + m);
        segments.extend_from_slice(&self.segments[..i]);
        if m == 0 {
            segments.push(PathArrow::concat_unchecked([
                &self.segments[i],
                &g.segments[0],
                &self.segments[i + 1],
            ]));
        } else {
            segments.push(PathArrow::concat_unchecked([&self.segments[i], &g.segments[0]]));
            segments.extend_from_slice(&g.segments[1..m]);
            segments.push(PathArrow::concat_unchecked([&g.segments[m], &self.segments[i + 1]]));
        }
        segments.extend_from_slice(&self.segments[i + 2..]);
        let mut gaps = Vec::with_capacity(self.arity() + m);
        gaps.extend_from_slice(&self.gaps[..i]);
        gaps.extend_from_slice(&g.gaps);
        gaps.extend_from_slice(&self.gaps[i + 1..]);
        Ok(SplicedArrow {
            segments,
            gaps,
            outer: self.outer,
        })
    }

    /// Parallel composition `self ∘ (g_1, …, g_n)`.
    pub fn splice_full(&self, gs: &[SplicedArrow]) -> Result<SplicedArrow> {
        if gs.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: gs.len(),
            });
        }
        let mut out = self.clone();
        for (i, g) in gs.iter().enumerate().rev() {
            out = out.splice_at(i, g)?;
        }
        Ok(out)
    }

    /// Fills every gap with a path: `w0 · u1 · w1 · … · un · wn`.
    pub fn splice_apply(&self, constants: &[PathArrow]) -> Result<PathArrow> {
        if constants.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: constants.len(),
            });
        }
        for (u, gap) in constants.iter().zip(&self.gaps) {
            if GapType::of_path(u) != *gap {
                return Err(Error::GapMismatch {
                    expected: format!("#{},#{}", gap.left.0, gap.right.0),
                    found: format!("#{},#{}", u.src().0, u.tgt().0),
                });
            }
        }
        Ok(self.splice_apply_unchecked(constants.iter()))
    }

    pub(crate) fn splice_apply_unchecked<'a>(&'a self, constants: impl Iterator<Item = &'a PathArrow>) -> PathArrow {
        let mut parts = Vec::with_capacity(2 * self.segments.len());
        parts.push(&self.segments[0]);
        for (u, w) in constants.zip(&self.segments[1..]) {
            parts.push(u);
            parts.push(w);
        }
        PathArrow::concat_unchecked(parts)
    }

    /// Pushes every segment through a functor of free categories.
    pub fn map(&self, f: &PathFunctor) -> SplicedArrow {
        SplicedArrow {
            segments: self.segments.iter().map(|s| f.apply_unchecked(s)).collect(),
            gaps: self
                .gaps
                .iter()
                .map(|g| GapType::new(f.map_node(g.left), f.map_node(g.right)))
                .collect(),
            outer: GapType::new(f.map_node(self.outer.left), f.map_node(self.outer.right)),
        }
    }

    /// Renders as `seg - seg - …`, each segment as dot-joined edge names.
    pub fn render(&self, g: &Graph) -> String {
        self.segments
            .iter()
            .map(|s| render_segment(g, s))
            .collect::<Vec<_>>()
            .join(" - ")
    }
}

pub(crate) fn render_segment(g: &Graph, s: &PathArrow) -> String {
    if s.is_identity() {
        format!("id[{}]", g.node_name(s.src()))
    } else {
        s.edges().iter().map(|&e| g.edge_name(e)).collect::<Vec<_>>().join("·")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words() -> Graph {
        let letters: Vec<String> = "HeloWrd!, ".chars().map(|c| c.to_string()).collect();
        Graph::bouquet(&letters).unwrap()
    }

    fn word(g: &Graph, text: &str) -> PathArrow {
        let names: Vec<String> = text.chars().map(|c| c.to_string()).collect();
        g.path_from_names("*", &names).unwrap()
    }

    fn spell(g: &Graph, p: &PathArrow) -> String {
        p.edges().iter().map(|&e| g.edge_name(e)).collect()
    }

    #[test]
    fn hello_world() {
        let g = words();
        let f = SplicedArrow::new(vec![word(&g, "Hell"), word(&g, ", "), word(&g, "rld!")]).unwrap();
        let o = SplicedArrow::constant(word(&g, "o"));
        let wo = SplicedArrow::constant(word(&g, "Wo"));
        let step = f.splice_at(0, &o).unwrap();
        assert_eq!(step.arity(), 1);
        let done = step.splice_at(0, &wo).unwrap();
        assert_eq!(spell(&g, done.as_constant().unwrap()), "Hello, World!");
        let applied = f.splice_apply(&[word(&g, "o"), word(&g, "Wo")]).unwrap();
        assert_eq!(spell(&g, &applied), "Hello, World!");
        assert_eq!(f.splice_full(&[o, wo]).unwrap(), done);
    }

    #[test]
    fn splicing_into_middle_gap() {
        let g = Graph::bouquet(&["w0", "w1", "w2", "w3", "u0", "u1", "u2"]).unwrap();
        let seg = |n: &str| g.path_from_names("*", &[n]).unwrap();
        let f = SplicedArrow::new(["w0", "w1", "w2", "w3"].map(seg).to_vec()).unwrap();
        let h = SplicedArrow::new(["u0", "u1", "u2"].map(seg).to_vec()).unwrap();
        let r = f.splice_at(1, &h).unwrap();
        assert_eq!(r.render(&g), "w0 - w1·u0 - u1 - u2·w2 - w3");
        assert_eq!(r.arity(), f.arity() + h.arity() - 1);
    }

    #[test]
    fn identity_is_unit() {
        let g = Graph::bouquet(&["a", "b"]).unwrap();
        let s = g.node("*").unwrap();
        let f = SplicedArrow::new(vec![
            g.path_from_names("*", &["a"]).unwrap(),
            g.path_from_names("*", &["b"]).unwrap(),
        ])
        .unwrap();
        let id = SplicedArrow::identity(GapType::new(s, s));
        assert_eq!(f.splice_at(0, &id).unwrap(), f);
        assert_eq!(id.splice_at(0, &f).unwrap(), f);
        assert_eq!(f.splice_full(std::slice::from_ref(&id)).unwrap(), f);
    }

    #[test]
    fn typing_errors() {
        let g = Graph::new(["A", "B"], vec![("e".into(), "A".into(), "B".into())]).unwrap();
        let (a, b) = (g.node("A").unwrap(), g.node("B").unwrap());
        let f = SplicedArrow::new(vec![PathArrow::identity(a), PathArrow::identity(a)]).unwrap();
        let wrong = SplicedArrow::constant(g.path_from_names("A", &["e"]).unwrap());
        assert!(matches!(f.splice_at(0, &wrong), Err(Error::GapMismatch { .. })));
        assert!(matches!(f.splice_at(3, &wrong), Err(Error::IndexOutOfRange { .. })));
        assert!(f.splice_apply(&[PathArrow::identity(b)]).is_err());
        assert!(SplicedArrow::with_types(&g, vec![PathArrow::identity(a)], vec![], GapType::new(a, b)).is_err());
    }

    #[test]
    fn constant_apply_is_segment() {
        let g = Graph::bouquet(&["a"]).unwrap();
        let p = g.path_from_names("*", &["a", "a"]).unwrap();
        assert_eq!(SplicedArrow::constant(p.clone()).splice_apply(&[]).unwrap(), p);
    }
}
