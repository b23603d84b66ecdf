//! Feynman diagrams for the boundary-extended anomaly recursion.
//!
//! Graphs have vertices labeled (g_v, h_v), three kinds of inner edges
//! and two kinds of outer legs.  Edge ends fill two kinds of slots on a
//! vertex: n-slots (E_2 ends, E_1 tails, Delta^z legs) and m-slots (E_0
//! ends, E_1 heads, Delta legs); the vertex factor is the slot-graded
//! value C~^{(g_v,h_v)}_{n_v:m_v}.  Everything in scope has at most a
//! handful of vertices, so enumeration is exhaustive with canonical-form
//! deduplication and brute-force automorphism counting.

use crate::geometry::EULER_CHI;
use crate::ring::{change_basis, propagators_and_terminators, Basis, RingElement};
use crate::{rat, ratio, Error, Rat, Result};
use num_traits::One;
use std::collections::BTreeMap;
use std::collections::HashSet;

/// Inner edge types, in the order (E_0, E_1, E_2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    E0,
    E1,
    E2,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeynmanGraph {
    /// Vertex labels (g_v, h_v), kept sorted non-decreasingly.
    pub vertices: Vec<(u32, u32)>,
    /// Unordered inner edges of weight -2S (m-slots both ends), pairs sorted.
    pub e0: Vec<(usize, usize)>,
    /// Ordered inner edges of weight -S^z: (tail = n-slot, head = m-slot).
    pub e1: Vec<(usize, usize)>,
    /// Unordered inner edges of weight -S^{zz} (n-slots both ends), pairs sorted.
    pub e2: Vec<(usize, usize)>,
    /// Outer legs of weight Delta (m-slot).
    pub out0: Vec<usize>,
    /// Outer legs of weight Delta^z (n-slot).
    pub out1: Vec<usize>,
}

impl FeynmanGraph {
    /// (n_v, m_v) slot counts for every vertex.
    pub fn slot_counts(&self) -> Vec<(u32, u32)> {
        let mut nm = vec![(0u32, 0u32); self.vertices.len()];
        for &(a, b) in &self.e2 {
            nm[a].0 += 1;
            nm[b].0 += 1;
        }
        for &(a, b) in &self.e0 {
            nm[a].1 += 1;
            nm[b].1 += 1;
        }
        for &(t, h) in &self.e1 {
            nm[t].0 += 1;
            nm[h].1 += 1;
        }
        for &v in &self.out1 {
            nm[v].0 += 1;
        }
        for &v in &self.out0 {
            nm[v].1 += 1;
        }
        nm
    }

    pub fn num_inner(&self) -> usize {
        self.e0.len() + self.e1.len() + self.e2.len()
    }

    pub fn num_loops_02(&self) -> usize {
        self.e0.iter().chain(self.e2.iter()).filter(|(a, b)| a == b).count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut reach = vec![false; n];
        let mut stack = vec![0usize];
        reach[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in self.e0.iter().chain(self.e2.iter()) {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !reach[y] {
                        reach[y] = true;
                        stack.push(y);
                    }
                }
            }
            for &(a, b) in &self.e1 {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !reach[y] {
                        reach[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        reach.into_iter().all(|r| r)
    }

    fn apply_perm(&self, perm: &[usize]) -> FeynmanGraph {
        let map_u = |(a, b): (usize, usize)| {
            let (x, y) = (perm[a], perm[b]);
            (x.min(y), x.max(y))
        };
        let mut g = FeynmanGraph {
            vertices: self.vertices.clone(), // label-preserving perms only
            e0: self.e0.iter().map(|&e| map_u(e)).collect(),
            e1: self.e1.iter().map(|&(t, h)| (perm[t], perm[h])).collect(),
            e2: self.e2.iter().map(|&e| map_u(e)).collect(),
            out0: self.out0.iter().map(|&v| perm[v]).collect(),
            out1: self.out1.iter().map(|&v| perm[v]).collect(),
        };
        g.e0.sort_unstable();
        g.e1.sort_unstable();
        g.e2.sort_unstable();
        g.out0.sort_unstable();
        g.out1.sort_unstable();
        g
    }

    fn label_preserving_perms(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut perms = Vec::new();
        let mut idx: Vec<usize> = (0..n).collect();
        permutations(&mut idx, 0, &mut |p| {
            if (0..n).all(|i| self.vertices[p[i]] == self.vertices[i]) {
                perms.push(p.to_vec());
            }
        });
        perms
    }

    /// Canonical representative under label-preserving vertex relabeling.
    pub fn canonical(&self) -> FeynmanGraph {
        self.label_preserving_perms()
            .iter()
            .map(|p| self.apply_perm(p))
            .min_by(|a, b| a.cmp_key().cmp(&b.cmp_key()))
            .unwrap()
    }

    fn cmp_key(
        &self,
    ) -> (
        &Vec<(usize, usize)>,
        &Vec<(usize, usize)>,
        &Vec<(usize, usize)>,
        &Vec<usize>,
        &Vec<usize>,
    ) {
        (&self.e0, &self.e1, &self.e2, &self.out0, &self.out1)
    }

    /// #A_G = 2^{#L_0 + #L_2} * |Aut(G)|.
    pub fn aut_order(&self) -> u64 {
        let stabilizer = self
            .label_preserving_perms()
            .iter()
            .filter(|p| self.apply_perm(p) == self.apply_perm(&identity(self.vertices.len())))
            .count() as u64;
        let mut mult: u64 = 1;
        for edges in [&self.e0, &self.e1, &self.e2] {
            let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
            for &e in edges.iter() {
                *counts.entry(e).or_default() += 1;
            }
            for c in counts.values() {
                mult *= factorial(*c);
            }
        }
        for legs in [&self.out0, &self.out1] {
            let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
            for &v in legs.iter() {
                *counts.entry(v).or_default() += 1;
            }
            for c in counts.values() {
                mult *= factorial(*c);
            }
        }
        (1u64 << self.num_loops_02()) * stabilizer * mult
    }

    /// One-line debug dump: labels, typed edges, #A_G.
    pub fn dump(&self) -> String {
        let vs: Vec<String> = self.vertices.iter().map(|(g, h)| format!("({g},{h})")).collect();
        let es = |edges: &Vec<(usize, usize)>| {
            edges
                .iter()
                .map(|(a, b)| format!("{a}-{b}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let ls = |legs: &Vec<usize>| {
            legs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        };
        format!(
            "V[{}] E0[{}] E1[{}] E2[{}] out0[{}] out1[{}] #A={}",
            vs.join(" "),
            es(&self.e0),
            es(&self.e1),
            es(&self.e2),
            ls(&self.out0),
            ls(&self.out1),
            self.aut_order()
        )
    }
}

fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn permutations(idx: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == idx.len() {
        f(idx);
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permutations(idx, k + 1, f);
        idx.swap(k, i);
    }
}

/// Is C~^{(g,h)}_{n:m} identically zero?
fn vertex_factor_is_zero(g: u32, h: u32, n: u32, m: u32) -> bool {
    match (g, h) {
        (0, 0) => n <= 2,
        (0, 1) => n <= 1,
        (0, 2) | (1, 0) => n == 0 && m == 0,
        _ => false,
    }
}

/// Exhaustive enumeration of the diagram set for (g, h).
pub fn enumerate_graphs(g: u32, h: u32) -> Result<Vec<FeynmanGraph>> {
    if matches!((g, h), (0, 0) | (1, 0) | (0, 1) | (0, 2)) {
        return Err(Error::ExcludedBase { g, h });
    }
    let budget = 2 * g as i64 - 2 + h as i64;
    assert!(budget >= 1);
    let mut seen: HashSet<FeynmanGraph> = HashSet::new();
    let mut out = Vec::new();
    for nv in 1..=budget.max(1) as usize {
        let mut labels = Vec::new();
        label_sequences(g, h, nv, &mut labels, &mut |labels| {
            let sum_g: u32 = labels.iter().map(|l| l.0).sum();
            let sum_h: u32 = labels.iter().map(|l| l.1).sum();
            let e_in = g as i64 - sum_g as i64 + nv as i64 - 1;
            let e_out = h as i64 - sum_h as i64;
            if e_in < 0 || e_out < 0 {
                return;
            }
            // cheap budget prune: sum over vertices of (2g_v-2+h_v + minimal
            // valence) must not exceed 2g-2+h
            let min_cost: i64 = labels
                .iter()
                .map(|&(gv, hv)| {
                    let c = 2 * gv as i64 - 2 + hv as i64;
                    let min_val = match (gv, hv) {
                        (0, 0) => 3,
                        (0, 1) => 2,
                        _ => 1,
                    };
                    c + min_val
                })
                .sum();
            if min_cost > budget {
                return;
            }
            enumerate_with_labels(labels, e_in as usize, e_out as usize, &mut |graph| {
                let canon = graph.canonical();
                if seen.insert(canon.clone()) {
                    out.push(canon);
                }
            });
        });
    }
    // Deterministic output order.
    out.sort_by(|a, b| {
        (a.vertices.clone(), a.e0.clone(), a.e1.clone(), a.e2.clone(), a.out0.clone(), a.out1.clone())
            .cmp(&(b.vertices.clone(), b.e0.clone(), b.e1.clone(), b.e2.clone(), b.out0.clone(), b.out1.clone()))
    });
    Ok(out)
}

/// Non-decreasing sequences of nv vertex labels with bounded sums.
fn label_sequences(
    g: u32,
    h: u32,
    nv: usize,
    acc: &mut Vec<(u32, u32)>,
    f: &mut impl FnMut(&[(u32, u32)]),
) {
    if acc.len() == nv {
        f(acc);
        return;
    }
    let start = acc.last().copied().unwrap_or((0, 0));
    for gv in 0..=g {
        for hv in 0..=h {
            if (gv, hv) < start {
                continue;
            }
            let sum_g: u32 = acc.iter().map(|l| l.0).sum::<u32>() + gv;
            let sum_h: u32 = acc.iter().map(|l| l.1).sum::<u32>() + hv;
            if sum_g > g || sum_h > h {
                continue;
            }
            acc.push((gv, hv));
            label_sequences(g, h, nv, acc, f);
            acc.pop();
        }
    }
}

/// All inner-edge multisets and outer-leg distributions for fixed labels.
fn enumerate_with_labels(
    labels: &[(u32, u32)],
    e_in: usize,
    e_out: usize,
    f: &mut impl FnMut(&FeynmanGraph),
) {
    let nv = labels.len();
    // Option list for one inner edge; multiset = non-decreasing option indices.
    let mut options: Vec<(EdgeKind, usize, usize)> = Vec::new();
    for a in 0..nv {
        for b in a..nv {
            options.push((EdgeKind::E0, a, b));
            options.push((EdgeKind::E2, a, b));
        }
    }
    for a in 0..nv {
        for b in 0..nv {
            options.push((EdgeKind::E1, a, b));
        }
    }
    let mut choice = vec![0usize; e_in];
    edge_multisets(&options, e_in, 0, 0, &mut choice, &mut |choice| {
        let mut g = FeynmanGraph {
            vertices: labels.to_vec(),
            e0: Vec::new(),
            e1: Vec::new(),
            e2: Vec::new(),
            out0: Vec::new(),
            out1: Vec::new(),
        };
        for &i in choice.iter() {
            let (kind, a, b) = options[i];
            match kind {
                EdgeKind::E0 => g.e0.push((a, b)),
                EdgeKind::E1 => g.e1.push((a, b)),
                EdgeKind::E2 => g.e2.push((a, b)),
            }
        }
        if !g.is_connected() {
            return;
        }
        let base = g.slot_counts();
        distribute_legs(&mut g, labels, &base, 0, e_out, f);
    });
}

fn edge_multisets(
    options: &[(EdgeKind, usize, usize)],
    remaining: usize,
    min_opt: usize,
    pos: usize,
    choice: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if remaining == 0 {
        f(&choice[..pos]);
        return;
    }
    for i in min_opt..options.len() {
        choice[pos] = i;
        edge_multisets(options, remaining - 1, i, pos + 1, choice, f);
    }
}

/// Assign outer legs vertex by vertex, pruning on vanishing vertex factors.
fn distribute_legs(
    g: &mut FeynmanGraph,
    labels: &[(u32, u32)],
    base: &[(u32, u32)],
    v: usize,
    remaining: usize,
    f: &mut impl FnMut(&FeynmanGraph),
) {
    if v == labels.len() {
        if remaining == 0 {
            f(g);
        }
        return;
    }
    for extra_n in 0..=remaining {
        for extra_m in 0..=(remaining - extra_n) {
            let n = base[v].0 + extra_n as u32;
            let m = base[v].1 + extra_m as u32;
            if n + m == 0 {
                continue; // valence condition
            }
            let (gv, hv) = labels[v];
            if vertex_factor_is_zero(gv, hv, n, m) {
                continue;
            }
            for _ in 0..extra_n {
                g.out1.push(v);
            }
            for _ in 0..extra_m {
                g.out0.push(v);
            }
            distribute_legs(g, labels, base, v + 1, remaining - extra_n - extra_m, f);
            for _ in 0..extra_n {
                g.out1.pop();
            }
            for _ in 0..extra_m {
                g.out0.pop();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Vertex factors and amplitude assembly.
// ---------------------------------------------------------------------------

/// Provider of the lower amplitudes F^{(g,h)}_n (I-basis, weights
/// (-n, 2g-2+h)); implemented by the solver's store.
pub trait AmplitudeSource {
    fn amplitude(&self, g: u32, h: u32, n: u32) -> Result<RingElement>;
}

/// C~^{(g,h)}_{n:m} as a ring element in the I-basis.
pub fn vertex_factor(
    g: u32,
    h: u32,
    n: u32,
    m: u32,
    store: &dyn AmplitudeSource,
) -> Result<RingElement> {
    if vertex_factor_is_zero(g, h, n, m) {
        return Ok(RingElement::zero(Basis::I));
    }
    // scalar special rows
    let scalar = |c: Rat| Ok(RingElement::scalar(Basis::I, c));
    if (g, h) == (0, 2) && n == 0 {
        // C~^{(0,2)}_{0:1} = -N/2, then factors (2g-2+h+n+j) = j for j=1..m-1
        return scalar(ratio(-1, 2) * rat(factorial(m as u64 - 1) as i64));
    }
    if (g, h) == (1, 0) && n == 0 {
        // C~^{(1,0)}_{0:1} = chi/24 - 1, factors j for j=1..m-1
        let base = ratio(EULER_CHI, 24) - Rat::one();
        return scalar(base * rat(factorial(m as u64 - 1) as i64));
    }
    let c = 2 * g as i64 - 2 + h as i64 + n as i64;
    assert!(c >= 1, "amplitude row with 2g-2+h+n < 1 must be a special case");
    let mut pre = Rat::one();
    for j in 0..m as i64 {
        pre *= rat(c + j);
    }
    Ok(store.amplitude(g, h, n)?.scale_rat(&pre))
}

/// The Feynman-diagram part F_FD^{(g,h)} = -sum_G F_G/#A_G, in the I-basis
/// with section weights (0, 2g-2+h).
pub fn sum_feynman(g: u32, h: u32, store: &dyn AmplitudeSource) -> Result<RingElement> {
    let graphs = enumerate_graphs(g, h)?;
    let ef = propagators_and_terminators();
    let factors = [
        change_basis(&ef.s, Basis::I)?.scale_rat(&rat(-2)),
        change_basis(&ef.s_z, Basis::I)?.neg(),
        change_basis(&ef.s_zz, Basis::I)?.neg(),
        change_basis(&ef.delta, Basis::I)?,
        change_basis(&ef.delta_z, Basis::I)?,
    ];
    let mut total = RingElement::zero(Basis::I).with_weights(0, 2 * g as i64 - 2 + h as i64);
    for graph in &graphs {
        let nm = graph.slot_counts();
        let mut fg = RingElement::one(Basis::I);
        for (v, &(gv, hv)) in graph.vertices.iter().enumerate() {
            fg = fg.mul(&vertex_factor(gv, hv, nm[v].0, nm[v].1, store)?)?;
        }
        for (factor, count) in [
            (&factors[0], graph.e0.len()),
            (&factors[1], graph.e1.len()),
            (&factors[2], graph.e2.len()),
            (&factors[3], graph.out0.len()),
            (&factors[4], graph.out1.len()),
        ] {
            for _ in 0..count {
                fg = fg.mul(factor)?;
            }
        }
        assert_eq!(
            fg.weights,
            (0, 2 * g as i64 - 2 + h as i64),
            "graph weight closure failed: {}",
            graph.dump()
        );
        let coef = -Rat::one() / rat(graph.aut_order() as i64);
        total = total.add(&fg.scale_rat(&coef))?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_counts_match_appendix() {
        assert_eq!(enumerate_graphs(0, 3).unwrap().len(), 4);
        assert_eq!(enumerate_graphs(1, 1).unwrap().len(), 4);
        assert_eq!(enumerate_graphs(0, 4).unwrap().len(), 19);
        assert_eq!(enumerate_graphs(1, 2).unwrap().len(), 29);
        assert_eq!(enumerate_graphs(0, 5).unwrap().len(), 83);
        assert_eq!(enumerate_graphs(2, 1).unwrap().len(), 97);
    }

    #[test]
    fn excluded_base_set_is_an_error() {
        assert!(enumerate_graphs(0, 0).is_err());
        assert!(enumerate_graphs(0, 2).is_err());
    }

    #[test]
    fn aut_orders() {
        // one vertex, one E2 self-loop
        let g = FeynmanGraph {
            vertices: vec![(0, 0)],
            e0: vec![],
            e1: vec![],
            e2: vec![(0, 0)],
            out0: vec![],
            out1: vec![(0)],
        };
        assert_eq!(g.aut_order(), 2);
        // one vertex, one E1 self-loop: directed, no factor
        let g = FeynmanGraph {
            vertices: vec![(1, 1)],
            e0: vec![],
            e1: vec![(0, 0)],
            e2: vec![],
            out0: vec![],
            out1: vec![],
        };
        assert_eq!(g.aut_order(), 1);
        // two identically-labeled vertices joined by two parallel E2 edges
        let g = FeynmanGraph {
            vertices: vec![(1, 0), (1, 0)],
            e0: vec![],
            e1: vec![],
            e2: vec![(0, 1), (0, 1)],
            out0: vec![],
            out1: vec![],
        };
        assert_eq!(g.aut_order(), 4);
    }

    #[test]
    fn enumerated_graphs_satisfy_conditions() {
        for (g, h) in [(0, 3), (1, 1), (0, 4)] {
            for graph in enumerate_graphs(g, h).unwrap() {
                assert!(graph.is_connected());
                let nm = graph.slot_counts();
                let sum_g: u32 = graph.vertices.iter().map(|l| l.0).sum();
                let sum_h: u32 = graph.vertices.iter().map(|l| l.1).sum();
                assert_eq!(
                    sum_g as i64 + graph.num_inner() as i64 - graph.vertices.len() as i64 + 1,
                    g as i64
                );
                assert_eq!(
                    sum_h as usize + graph.out0.len() + graph.out1.len(),
                    h as usize
                );
                for (v, &(gv, hv)) in graph.vertices.iter().enumerate() {
                    assert!(nm[v].0 + nm[v].1 > 0);
                    assert!(!vertex_factor_is_zero(gv, hv, nm[v].0, nm[v].1));
                }
            }
        }
    }

    #[test]
    fn canonical_is_permutation_invariant() {
        let g = FeynmanGraph {
            vertices: vec![(0, 1), (0, 1), (0, 2)],
            e0: vec![],
            e1: vec![(0, 2)],
            e2: vec![(1, 2)],
            out0: vec![1],
            out1: vec![0, 1],
        };
        // swap the two (0,1) vertices by hand
        let swapped = FeynmanGraph {
            vertices: vec![(0, 1), (0, 1), (0, 2)],
            e0: vec![],
            e1: vec![(1, 2)],
            e2: vec![(0, 2)],
            out0: vec![0],
            out1: vec![0, 1],
        };
        assert_eq!(g.canonical(), swapped.canonical());
    }

    struct ZeroStore;
    impl AmplitudeSource for ZeroStore {
        fn amplitude(&self, _g: u32, _h: u32, _n: u32) -> Result<RingElement> {
            Ok(RingElement::one(Basis::I))
        }
    }

    #[test]
    fn scalar_vertex_factors() {
        let s = ZeroStore;
        let f = vertex_factor(1, 0, 0, 1, &s).unwrap();
        assert_eq!(f, RingElement::scalar(Basis::I, ratio(-28, 3)));
        let f = vertex_factor(0, 2, 0, 1, &s).unwrap();
        assert_eq!(f, RingElement::scalar(Basis::I, ratio(-1, 2)));
        let f = vertex_factor(0, 2, 0, 2, &s).unwrap();
        assert_eq!(f, RingElement::scalar(Basis::I, ratio(-1, 2)));
        assert!(vertex_factor(0, 0, 2, 5, &s).unwrap().is_zero());
    }
}
