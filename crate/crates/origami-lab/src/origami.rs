//! Square-tiled surfaces as permutation pairs.
//!
//! A surface of degree `N` is encoded by permutations `(sigma, tau)` of the
//! squares `{1..N}`: `sigma(i) = j` glues the right edge of square `i` to the
//! left edge of square `j`, and `tau(i) = j` glues the top edge of `i` to the
//! bottom edge of `j`. Validation checks that `<sigma, tau>` acts transitively
//! (the surface is connected).

use std::fmt;

use crate::error::{Error, Result};
use crate::perm::{orbit, Perm};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Origami {
    n: usize,
    sigma: Perm,
    tau: Perm,
}

/// Singularity data: one entry `k >= 2` per cone point of angle `2 pi k`,
/// sorted descending; regular vertices are omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub cone_orders: Vec<usize>,
    pub genus: usize,
    /// Number of vertices of the square cell complex (including regular ones).
    pub vertex_count: usize,
}

/// Relabelling-invariant identity of an origami: the lexicographically least
/// `(sigma, tau)` image table over all square relabellings reachable by
/// breadth-first search from each start square.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    key: Vec<u32>,
}

/// One corner of one square. Order: BL, BR, TL, TR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    BottomLeft = 0,
    BottomRight = 1,
    TopLeft = 2,
    TopRight = 3,
}

impl Origami {
    pub fn new(n: usize, sigma: Perm, tau: Perm) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("degree must be positive".into()));
        }
        if sigma.degree() != n || tau.degree() != n {
            return Err(Error::InvalidInput(format!(
                "permutation degree does not match N={n}"
            )));
        }
        let reach = orbit(&[&sigma, &tau], 0);
        if reach.len() != n {
            let missing = (0..n).filter(|i| !reach.contains(i)).map(|i| i + 1).collect();
            return Err(Error::Disconnected { missing });
        }
        Ok(Origami { n, sigma, tau })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    pub fn tau(&self) -> &Perm {
        &self.tau
    }

    /// The square torus: one square, identity gluings.
    pub fn torus() -> Self {
        Origami::new(1, Perm::identity(1), Perm::identity(1)).unwrap()
    }

    /// The 3-square L-origami: sigma = (1 2), tau = (1 3).
    pub fn l_origami() -> Self {
        Origami::new(
            3,
            Perm::parse_cycles("(1 2)", 3).unwrap(),
            Perm::parse_cycles("(1 3)", 3).unwrap(),
        )
        .unwrap()
    }

    /// Parse the origami text format:
    ///
    /// ```text
    /// N 3
    /// sigma (1 2)
    /// tau (1 3)
    /// ```
    ///
    /// `#` starts a comment; the identity permutation is written `()`.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut sigma: Option<String> = None;
        let mut tau: Option<String> = None;
        for raw in text.lines() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("malformed line '{line}'")))?;
            match head {
                "N" => {
                    n = Some(
                        rest.trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad degree '{rest}'")))?,
                    )
                }
                "sigma" => sigma = Some(rest.trim().to_string()),
                "tau" => tau = Some(rest.trim().to_string()),
                other => return Err(Error::Parse(format!("unknown key '{other}'"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing 'N' line".into()))?;
        let sigma = sigma.ok_or_else(|| Error::Parse("missing 'sigma' line".into()))?;
        let tau = tau.ok_or_else(|| Error::Parse("missing 'tau' line".into()))?;
        Origami::new(
            n,
            Perm::parse_cycles(&sigma, n)?,
            Perm::parse_cycles(&tau, n)?,
        )
    }

    pub fn to_file_string(&self) -> String {
        format!("N {}\nsigma {}\ntau {}\n", self.n, self.sigma, self.tau)
    }

    /// Relabel squares by `rho` (square `i` becomes `rho(i)`).
    pub fn relabel(&self, rho: &Perm) -> Origami {
        Origami {
            n: self.n,
            sigma: self.sigma.conjugate(rho),
            tau: self.tau.conjugate(rho),
        }
    }

    /// Corner identification classes of the square cell complex.
    ///
    /// Corners are indexed `4*square + corner`. Two corners are identified
    /// when an edge gluing matches them up. Each class is one vertex of the
    /// complex; its cone angle is `(pi/2) * (class size)`.
    pub fn corner_classes(&self) -> Vec<Vec<usize>> {
        let total = 4 * self.n;
        let mut uf = UnionFind::new(total);
        let cid = |sq: usize, c: Corner| 4 * sq + c as usize;
        for i in 0..self.n {
            let j = self.sigma.apply(i);
            // right edge of i = left edge of j
            uf.union(cid(i, Corner::BottomRight), cid(j, Corner::BottomLeft));
            uf.union(cid(i, Corner::TopRight), cid(j, Corner::TopLeft));
            let k = self.tau.apply(i);
            // top edge of i = bottom edge of k
            uf.union(cid(i, Corner::TopLeft), cid(k, Corner::BottomLeft));
            uf.union(cid(i, Corner::TopRight), cid(k, Corner::BottomRight));
        }
        uf.classes()
    }

    /// Vertex class id for each corner (same indexing as `corner_classes`).
    pub fn corner_class_ids(&self) -> (Vec<usize>, Vec<usize>) {
        let classes = self.corner_classes();
        let mut ids = vec![0usize; 4 * self.n];
        let mut sizes = vec![0usize; classes.len()];
        for (ci, class) in classes.iter().enumerate() {
            sizes[ci] = class.len();
            for &c in class {
                ids[c] = ci;
            }
        }
        (ids, sizes)
    }

    /// Compute the stratum. Cone orders come from the cycles of the
    /// corner-turning permutation `sigma tau sigma^{-1} tau^{-1}`; the genus
    /// comes from the Euler characteristic of the cell complex, with vertices
    /// counted by direct corner identification. The two routes must agree
    /// (Gauss-Bonnet), otherwise an internal inconsistency is reported.
    pub fn stratum(&self) -> Result<Stratum> {
        // Route 1: commutator cycles give the cone orders.
        let c = self
            .sigma
            .compose(&self.tau)
            .compose(&self.sigma.inverse())
            .compose(&self.tau.inverse());
        let mut orders_from_cycles = c.all_cycle_lengths();
        orders_from_cycles.sort_unstable_by(|a, b| b.cmp(a));

        // Route 2: corner identification classes.
        let classes = self.corner_classes();
        let vertex_count = classes.len();
        let mut orders_from_corners: Vec<usize> = Vec::with_capacity(vertex_count);
        for class in &classes {
            if class.len() % 4 != 0 {
                return Err(Error::InternalInconsistency(format!(
                    "corner class of size {} not divisible by 4",
                    class.len()
                )));
            }
            orders_from_corners.push(class.len() / 4);
        }
        orders_from_corners.sort_unstable_by(|a, b| b.cmp(a));

        if orders_from_cycles != orders_from_corners {
            return Err(Error::InternalInconsistency(format!(
                "cone orders disagree: cycles {orders_from_cycles:?} vs corners {orders_from_corners:?}"
            )));
        }

        // Euler characteristic: V - E + F with E = 2N (edges glued in pairs)
        // and F = N.
        let chi = vertex_count as i64 - 2 * self.n as i64 + self.n as i64;
        if (2 - chi) % 2 != 0 || chi > 2 {
            return Err(Error::InternalInconsistency(format!(
                "Euler characteristic {chi} is not 2-2g"
            )));
        }
        let genus = ((2 - chi) / 2) as usize;

        // Gauss-Bonnet: sum (k_i - 1) = 2g - 2 for g >= 1.
        let excess: i64 = orders_from_cycles.iter().map(|&k| k as i64 - 1).sum();
        if excess != 2 * genus as i64 - 2 {
            return Err(Error::InternalInconsistency(format!(
                "Gauss-Bonnet failure: sum(k-1) = {excess}, 2g-2 = {}",
                2 * genus as i64 - 2
            )));
        }

        let cone_orders = orders_from_cycles.into_iter().filter(|&k| k >= 2).collect();
        Ok(Stratum {
            cone_orders,
            genus,
            vertex_count,
        })
    }

    /// Whether the vertex at the bottom-left corner of `square` is singular.
    pub fn is_singular_corner(&self, square: usize) -> bool {
        let (ids, sizes) = self.corner_class_ids();
        sizes[ids[4 * square]] > 4
    }

    /// Deterministic relabelling of this origami obtained by breadth-first
    /// search from `start`, following sigma- then tau-edges.
    fn bfs_labels(&self, start: usize) -> Perm {
        let mut label = vec![u32::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        label[start] = 0;
        queue.push_back(start);
        let mut next = 1u32;
        while let Some(x) = queue.pop_front() {
            for y in [self.sigma.apply(x), self.tau.apply(x)] {
                if label[y] == u32::MAX {
                    label[y] = next;
                    next += 1;
                    queue.push_back(y);
                }
            }
        }
        debug_assert_eq!(next as usize, self.n);
        Perm::from_images(label).expect("BFS labels form a bijection")
    }

    fn key_of(relabelled: &Origami) -> Vec<u32> {
        let mut key = Vec::with_capacity(2 * relabelled.n);
        key.extend((0..relabelled.n).map(|i| relabelled.sigma.apply(i) as u32));
        key.extend((0..relabelled.n).map(|i| relabelled.tau.apply(i) as u32));
        key
    }

    /// Canonical form together with the relabelling that realizes it. When
    /// several relabellings tie (nontrivial automorphisms), the one with the
    /// lexicographically least image table is returned.
    pub fn canonical_labelling(&self) -> (CanonicalForm, Perm) {
        let mut best: Option<(Vec<u32>, Perm)> = None;
        for start in 0..self.n {
            let rho = self.bfs_labels(start);
            let cand = self.relabel(&rho);
            let key = Self::key_of(&cand);
            let better = match &best {
                None => true,
                Some((bk, brho)) => {
                    key < *bk
                        || (key == *bk
                            && (0..self.n).map(|i| rho.apply(i)).collect::<Vec<_>>()
                                < (0..self.n).map(|i| brho.apply(i)).collect::<Vec<_>>())
                }
            };
            if better {
                best = Some((key, rho));
            }
        }
        let (key, rho) = best.unwrap();
        (CanonicalForm { key }, rho)
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        self.canonical_labelling().0
    }

    /// Rebuild the origami named by a canonical form.
    pub fn from_canonical(cf: &CanonicalForm) -> Origami {
        let n = cf.key.len() / 2;
        let sigma = Perm::from_images(cf.key[..n].to_vec()).unwrap();
        let tau = Perm::from_images(cf.key[n..].to_vec()).unwrap();
        Origami { n, sigma, tau }
    }
}

impl fmt::Display for Origami {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} sigma={} tau={}", self.n, self.sigma, self.tau)
    }
}

impl CanonicalForm {
    pub fn degree(&self) -> usize {
        self.key.len() / 2
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for x in 0..n {
            let r = self.find(x);
            by_root.entry(r).or_default().push(x);
        }
        by_root.into_values().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_is_valid() {
        let t = Origami::torus();
        assert_eq!(t.degree(), 1);
    }

    #[test]
    fn l_origami_is_valid() {
        // Oracle: orbit of 1 under <(1 2), (1 3)> is {1, 2, 3}.
        let o = Origami::l_origami();
        assert_eq!(o.degree(), 3);
    }

    #[test]
    fn two_disjoint_tori_rejected() {
        let err = Origami::new(2, Perm::identity(2), Perm::identity(2)).unwrap_err();
        assert!(matches!(err, Error::Disconnected { .. }));
    }

    #[test]
    fn torus_stratum() {
        let s = Origami::torus().stratum().unwrap();
        assert!(s.cone_orders.is_empty());
        assert_eq!(s.genus, 1);
    }

    #[test]
    fn l_origami_stratum() {
        // Oracle: hand computation of corner identifications on the L
        // polygon — all twelve corners form one vertex of angle 6 pi.
        let s = Origami::l_origami().stratum().unwrap();
        assert_eq!(s.cone_orders, vec![3]);
        assert_eq!(s.genus, 2);
        assert_eq!(s.vertex_count, 1);
    }

    #[test]
    fn degree_two_cover_stratum() {
        // Oracle: cell-complex count V - E + F. sigma = tau = (1 2) gives an
        // unbranched double cover of the torus: V = 2, chi = 0, genus 1.
        let o = Origami::new(
            2,
            Perm::parse_cycles("(1 2)", 2).unwrap(),
            Perm::parse_cycles("(1 2)", 2).unwrap(),
        )
        .unwrap();
        let s = o.stratum().unwrap();
        assert_eq!(s.genus, 1);
        assert!(s.cone_orders.is_empty());
        assert_eq!(s.vertex_count, 2);
    }

    #[test]
    fn canonical_form_torus() {
        let t = Origami::torus();
        assert_eq!(t.canonical_form(), t.canonical_form());
        assert_eq!(Origami::from_canonical(&t.canonical_form()), t);
    }

    #[test]
    fn canonical_form_relabelling_invariant() {
        let o = Origami::l_origami();
        let rho = Perm::parse_cycles("(1 2 3)", 3).unwrap();
        assert_eq!(o.canonical_form(), o.relabel(&rho).canonical_form());
    }

    #[test]
    fn canonical_form_separates_non_isomorphic() {
        // Oracle: brute force over all 4! relabellings.
        let a = Origami::new(4, Perm::parse_cycles("(1 2 3 4)", 4).unwrap(), Perm::identity(4))
            .unwrap();
        let b = Origami::new(
            4,
            Perm::parse_cycles("(1 2)(3 4)", 4).unwrap(),
            Perm::parse_cycles("(1 3)(2 4)", 4).unwrap(),
        )
        .unwrap();
        assert_ne!(a.canonical_form(), b.canonical_form());
        // brute-force confirmation that no relabelling maps a to b
        let perms_of_4: Vec<Perm> = {
            let mut out = Vec::new();
            let mut idx = [0usize, 1, 2, 3];
            permutohedron_heap(&mut idx, &mut out);
            out
        };
        for rho in &perms_of_4 {
            assert_ne!(a.relabel(rho), b);
        }
    }

    fn permutohedron_heap(arr: &mut [usize; 4], out: &mut Vec<Perm>) {
        fn heap(k: usize, arr: &mut [usize; 4], out: &mut Vec<Perm>) {
            if k == 1 {
                out.push(Perm::from_images(arr.iter().map(|&x| x as u32).collect()).unwrap());
                return;
            }
            for i in 0..k {
                heap(k - 1, arr, out);
                if k % 2 == 0 {
                    arr.swap(i, k - 1);
                } else {
                    arr.swap(0, k - 1);
                }
            }
        }
        heap(4, arr, out);
    }

    #[test]
    fn file_format_round_trip() {
        let text = "# the L origami\nN 3\nsigma (1 2)\ntau (1 3)\n";
        let o = Origami::parse_str(text).unwrap();
        assert_eq!(o, Origami::l_origami());
        let o2 = Origami::parse_str(&o.to_file_string()).unwrap();
        assert_eq!(o, o2);
    }

    #[test]
    fn torus_file_identity_perm() {
        let text = "N 1\nsigma ()\ntau ()\n";
        assert_eq!(Origami::parse_str(text).unwrap(), Origami::torus());
    }
}
