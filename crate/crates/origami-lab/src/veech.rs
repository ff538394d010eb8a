//! Veech groups of reduced origamis, computed through the orbit graph of the
//! shear action on gluing permutations.
//!
//! The re-tiling rule for a unit shear is derived from the cut-and-paste of
//! the sheared squares and guarded by invariants (inverse cancellation, the
//! torus is fixed, the stratum is preserved) rather than taken on faith:
//! shearing horizontally spills the top-right triangle of each square across
//! its right edge, so `T` keeps `sigma` and replaces `tau` by `tau sigma^-1`,
//! and symmetrically `L` keeps `tau` and replaces `sigma` by `sigma tau^-1`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::origami::{CanonicalForm, Origami};
use crate::sl2::{GroupElement, Letter, Word};

/// Image of an origami under one shear letter. `-I` is handled by expanding
/// it into `(T^-1 L T^-1)^2`, so every rule in use is one of the four
/// derived unit-shear rules.
pub fn generator_action(letter: Letter, origami: &Origami) -> Origami {
    let n = origami.degree();
    let sigma = origami.sigma();
    let tau = origami.tau();
    let (new_sigma, new_tau) = match letter {
        Letter::T => (sigma.clone(), tau.compose(&sigma.inverse())),
        Letter::TInv => (sigma.clone(), tau.compose(sigma)),
        Letter::L => (sigma.compose(&tau.inverse()), tau.clone()),
        Letter::LInv => (sigma.compose(tau), tau.clone()),
        Letter::NegI => {
            let mut o = origami.clone();
            for l in NEG_I_LETTERS {
                o = generator_action(l, &o);
            }
            return o;
        }
    };
    Origami::new(n, new_sigma, new_tau).expect("shear action preserves connectivity")
}

/// `-I = (T^-1 L T^-1)^2` as single letters.
pub const NEG_I_LETTERS: [Letter; 6] = [
    Letter::TInv,
    Letter::L,
    Letter::TInv,
    Letter::TInv,
    Letter::L,
    Letter::TInv,
];

/// Apply a word to an origami. Words multiply as matrices left to right, and
/// the action is a left action, so the rightmost letter acts first.
pub fn word_action(word: &Word, origami: &Origami) -> Origami {
    let letters: Vec<Letter> = word.letters().collect();
    let mut o = origami.clone();
    for &l in letters.iter().rev() {
        o = generator_action(l, &o);
    }
    o
}

/// Orbit of an origami under the shear action, with one `T`- and one
/// `L`-edge per node (inverse letters walk the edges backwards).
#[derive(Debug, Clone)]
pub struct OrbitGraph {
    origamis: Vec<Origami>,
    forms: Vec<CanonicalForm>,
    index_of: HashMap<CanonicalForm, usize>,
    t_succ: Vec<usize>,
    l_succ: Vec<usize>,
    t_pred: Vec<usize>,
    l_pred: Vec<usize>,
}

impl OrbitGraph {
    /// Breadth-first closure from `origami` under `T` and `L`. The node set
    /// is canonical no matter the discovery order. Errors with
    /// `BudgetExceeded` if the orbit grows past `budget` nodes, which for a
    /// correct reduced input never happens at desk scale.
    pub fn compute(origami: &Origami, budget: usize) -> Result<OrbitGraph> {
        let (base_form, _) = origami.canonical_labelling();
        let base = Origami::from_canonical(&base_form);
        let mut origamis = vec![base.clone()];
        let mut forms = vec![base_form.clone()];
        let mut index_of = HashMap::new();
        index_of.insert(base_form, 0usize);
        let mut t_succ: Vec<usize> = Vec::new();
        let mut l_succ: Vec<usize> = Vec::new();
        let mut next = 0usize;
        while next < origamis.len() {
            let cur = origamis[next].clone();
            for (letter, succ) in [(Letter::T, &mut t_succ), (Letter::L, &mut l_succ)] {
                let img = generator_action(letter, &cur);
                let form = img.canonical_form();
                let idx = match index_of.get(&form) {
                    Some(&i) => i,
                    None => {
                        let i = origamis.len();
                        if i >= budget {
                            return Err(Error::BudgetExceeded(format!(
                                "orbit exceeded {budget} origamis"
                            )));
                        }
                        origamis.push(Origami::from_canonical(&form));
                        forms.push(form.clone());
                        index_of.insert(form, i);
                        i
                    }
                };
                debug_assert_eq!(succ.len(), next);
                succ.push(idx);
            }
            next += 1;
        }
        let node_count = origamis.len();
        let mut t_pred = vec![usize::MAX; node_count];
        let mut l_pred = vec![usize::MAX; node_count];
        for (u, &v) in t_succ.iter().enumerate() {
            t_pred[v] = u;
        }
        for (u, &v) in l_succ.iter().enumerate() {
            l_pred[v] = u;
        }
        debug_assert!(t_pred.iter().all(|&u| u != usize::MAX));
        debug_assert!(l_pred.iter().all(|&u| u != usize::MAX));
        Ok(OrbitGraph {
            origamis,
            forms,
            index_of,
            t_succ,
            l_succ,
            t_pred,
            l_pred,
        })
    }

    pub fn node_count(&self) -> usize {
        self.origamis.len()
    }

    pub fn basepoint(&self) -> usize {
        0
    }

    pub fn origami(&self, node: usize) -> &Origami {
        &self.origamis[node]
    }

    pub fn form(&self, node: usize) -> &CanonicalForm {
        &self.forms[node]
    }

    pub fn node_of(&self, form: &CanonicalForm) -> Option<usize> {
        self.index_of.get(form).copied()
    }

    pub fn step(&self, node: usize, letter: Letter) -> usize {
        match letter {
            Letter::T => self.t_succ[node],
            Letter::TInv => self.t_pred[node],
            Letter::L => self.l_succ[node],
            Letter::LInv => self.l_pred[node],
            Letter::NegI => {
                let mut cur = node;
                for l in NEG_I_LETTERS.iter().rev() {
                    cur = self.step(cur, *l);
                }
                cur
            }
        }
    }

    /// Walk a word from `node`; rightmost letter first. Runs step along the
    /// letter's cycle, so large exponents cost at most one cycle length.
    pub fn walk(&self, node: usize, word: &Word) -> usize {
        let mut cur = node;
        for &(letter, count) in word.runs().iter().rev() {
            if letter == Letter::NegI {
                // -I expansion; parity already normalized to 1 in words
                cur = self.step(cur, Letter::NegI);
                continue;
            }
            let cycle = self.letter_cycle_len(cur, letter);
            let steps = count % cycle as u64;
            for _ in 0..steps {
                cur = self.step(cur, letter);
            }
        }
        cur
    }

    fn letter_cycle_len(&self, node: usize, letter: Letter) -> usize {
        let mut len = 1usize;
        let mut cur = self.step(node, letter);
        while cur != node {
            cur = self.step(cur, letter);
            len += 1;
        }
        len
    }

    /// Directed labelled edges `(node, letter, node)` with letters T and L.
    pub fn edges(&self) -> Vec<(usize, Letter, usize)> {
        let mut out = Vec::with_capacity(2 * self.node_count());
        for u in 0..self.node_count() {
            out.push((u, Letter::T, self.t_succ[u]));
            out.push((u, Letter::L, self.l_succ[u]));
        }
        out
    }
}

/// Sign convention for membership and index reporting. The laboratory works
/// in the matrix group by default; `-I` acts on surfaces through its letter
/// expansion, which may or may not fix a given origami.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConvention {
    Matrix,
    Projective,
}

impl std::fmt::Display for SignConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SignConvention::Matrix => write!(f, "matrix"),
            SignConvention::Projective => write!(f, "projective"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VeechData {
    /// Stabilizer generators of the basepoint origami (matrix convention),
    /// each with the Schreier word that produced it.
    pub generators: Vec<(GroupElement, Word)>,
    /// Orbit size = index of the stabilizer in SL2(Z), matrix convention.
    pub index_matrix: usize,
    /// Orbit size after identifying nodes swapped by -I.
    pub index_projective: usize,
    /// Non-tree edge count |E| - |V| + 1 before identity/duplicate pruning
    /// (the Schreier bound on the generator count).
    pub schreier_edge_count: usize,
}

/// Options for `veech_group`. By default the input is required to be
/// reduced (checked by saddle-connection enumeration up to
/// `reducedness_cap`); the Veech group of a non-reduced origami is not the
/// stabilizer of this action, so such inputs are refused rather than
/// guessed at.
#[derive(Debug, Clone)]
pub struct VeechOptions {
    pub orbit_budget: usize,
    pub reducedness_cap: Option<f64>,
}

impl Default for VeechOptions {
    fn default() -> Self {
        VeechOptions {
            orbit_budget: 100_000,
            reducedness_cap: Some(8.0),
        }
    }
}

/// Compute stabilizer generators and orbit data for a reduced origami.
///
/// The orbit graph is closed under `T`, `L`; a breadth-first spanning tree
/// gives coset words, and each non-tree directed edge `(u, a, v)` yields the
/// stabilizer generator `w_v^-1 a w_u` (the action is a left action, so
/// coset words accumulate on the left).
pub fn veech_group(origami: &Origami, opts: &VeechOptions) -> Result<(VeechData, OrbitGraph)> {
    if let Some(cap) = opts.reducedness_cap {
        let verdict = crate::flat::reducedness(origami, cap)?;
        if !verdict.reduced {
            return Err(Error::InvalidInput(
                "origami is not reduced; its Veech group is not computed by this orbit action"
                    .into(),
            ));
        }
    }
    let graph = OrbitGraph::compute(origami, opts.orbit_budget)?;
    let n = graph.node_count();

    // Breadth-first spanning tree over the undirected edge set.
    let mut tree_word: Vec<Option<Word>> = vec![None; n];
    tree_word[0] = Some(Word::empty());
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut tree_edge: Vec<(usize, Letter, usize)> = Vec::new();
    while let Some(u) = queue.pop_front() {
        for letter in [Letter::T, Letter::L, Letter::TInv, Letter::LInv] {
            let v = graph.step(u, letter);
            if tree_word[v].is_none() {
                let mut w = Word::empty();
                w.push(letter, 1);
                tree_word[v] = Some(w.concat(tree_word[u].as_ref().unwrap()));
                tree_edge.push((u, letter, v));
                queue.push_back(v);
            }
        }
    }

    // Non-tree directed edges yield the stabilizer generators.
    let is_tree = |u: usize, letter: Letter, v: usize| {
        tree_edge.iter().any(|&(a, l, b)| {
            (a == u && l == letter && b == v)
                || (a == v && l == letter.inverse() && b == u)
        })
    };
    let mut generators: Vec<(GroupElement, Word)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut schreier_edge_count = 0usize;
    for (u, letter, v) in graph.edges() {
        if is_tree(u, letter, v) {
            continue;
        }
        schreier_edge_count += 1;
        let mut w = Word::empty();
        w.push(letter, 1);
        let word = tree_word[v]
            .as_ref()
            .unwrap()
            .inverse()
            .concat(&w)
            .concat(tree_word[u].as_ref().unwrap());
        let g = word.product()?;
        debug_assert_eq!(graph.walk(graph.basepoint(), &word), graph.basepoint());
        if !g.is_identity() && seen.insert(g) {
            generators.push((g, word));
        }
    }
    generators.sort_by_key(|(g, _)| *g);

    // Projective index: identify nodes swapped by -I.
    let mut proj_seen = vec![false; n];
    let mut index_projective = 0usize;
    for u in 0..n {
        if proj_seen[u] {
            continue;
        }
        proj_seen[u] = true;
        proj_seen[graph.step(u, Letter::NegI)] = true;
        index_projective += 1;
    }

    Ok((
        VeechData {
            generators,
            index_matrix: n,
            index_projective,
            schreier_edge_count,
        },
        graph,
    ))
}

/// Membership test: decompose `g` into letters and walk the orbit graph
/// from the basepoint. Under the projective convention a walk ending at the
/// `-I`-image of the basepoint also counts.
pub fn is_member(g: &GroupElement, graph: &OrbitGraph, convention: SignConvention) -> bool {
    let end = graph.walk(graph.basepoint(), &g.decompose());
    match convention {
        SignConvention::Matrix => end == graph.basepoint(),
        SignConvention::Projective => {
            end == graph.basepoint() || end == graph.step(graph.basepoint(), Letter::NegI)
        }
    }
}
