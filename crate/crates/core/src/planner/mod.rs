//! Decomposition planning.
//!
//! Starting from a list of atoms `R_0, ..., R_r` (ideally irreducible
//! factors of `P`), the planner
//!
//! 1. builds the coincidence graph, with an edge `{p, q}` whenever
//!    `1 ∉ ⟨R_p, R_q⟩`;
//! 2. regroups the atoms by connected component, which yields the largest
//!    number of pairwise relatively invertible factors;
//! 3. finds `Min(β_P)`, the inclusion-minimal index sets `J` with
//!    `1 ∈ ⟨R_j : j ∈ J⟩`, and the matching `α = Max((β_P)ˡ)`.
//!
//! Irreducibility of the atoms is not checked. The maximality of the
//! regrouping only holds when the atoms are irreducible.

mod setsys;

use serde::Serialize;

pub use setsys::{system, IndexSet, SetSystem, MAX_ENUMERATION_GROUND};

use crate::error::{Error, Result};
use crate::groebner::Buchberger;
use crate::poly::Polynomial;

/// Largest `l` for which the `β_P` search runs.
pub const MAX_BETA_GROUND: usize = 12;

/// Checks that a factor list is nonempty, shares a variable count, and has no zero.
pub fn validate_factors(factors: &[Polynomial]) -> Result<usize> {
    let first = factors
        .first()
        .ok_or_else(|| Error::Precondition("at least one factor is required".into()))?;
    let nvars = first.nvars();
    for (i, f) in factors.iter().enumerate() {
        if f.nvars() != nvars {
            return Err(Error::VariableCountMismatch {
                left: nvars,
                right: f.nvars(),
            });
        }
        if f.is_zero() {
            return Err(Error::ZeroPolynomial(format!("factor {i}")));
        }
    }
    if factors.len() > IndexSet::MAX_ELEMENT + 1 {
        return Err(Error::ResourceLimit {
            what: "number of factors".into(),
            limit: IndexSet::MAX_ELEMENT + 1,
        });
    }
    Ok(nvars)
}

fn restrict(factors: &[Polynomial], set: IndexSet) -> Vec<Polynomial> {
    set.iter().map(|i| factors[i].clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoincidenceGraph {
    pub vertices: usize,
    /// Pairs `(p, q)` with `p < q`, in lexicographic order.
    pub edges: Vec<(usize, usize)>,
}

impl CoincidenceGraph {
    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for &(p, q) in &self.edges {
            let (a, b) = (find(&mut parent, p), find(&mut parent, q));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.vertices];
        for v in 0..self.vertices {
            let r = find(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(v);
        }
        groups
    }

    pub fn is_edgeless(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Edge `{p, q}` iff the pair ideal `⟨atoms[p], atoms[q]⟩` does not contain 1.
pub fn coincidence_graph(atoms: &[Polynomial], engine: &Buchberger) -> Result<CoincidenceGraph> {
    validate_factors(atoms)?;
    let mut edges = Vec::new();
    for p in 0..atoms.len() {
        for q in p + 1..atoms.len() {
            let pair = [atoms[p].clone(), atoms[q].clone()];
            if engine.contains_one(&pair)?.is_none() {
                edges.push((p, q));
            }
        }
    }
    Ok(CoincidenceGraph {
        vertices: atoms.len(),
        edges,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regrouping {
    /// Product of the atoms of each component, in component order.
    pub factors: Vec<Polynomial>,
    pub components: Vec<Vec<usize>>,
}

pub fn regroup(atoms: &[Polynomial], engine: &Buchberger) -> Result<Regrouping> {
    let graph = coincidence_graph(atoms, engine)?;
    Ok(regroup_with(atoms, &graph))
}

fn regroup_with(atoms: &[Polynomial], graph: &CoincidenceGraph) -> Regrouping {
    let nvars = atoms[0].nvars();
    let components = graph.components();
    let factors = components
        .iter()
        .map(|c| Polynomial::product(nvars, c.iter().map(|&i| &atoms[i])))
        .collect();
    Regrouping {
        factors,
        components,
    }
}

/// `Min(β_P)`: inclusion-minimal `J ⊆ L` with `1 ∈ ⟨P_j : j ∈ J⟩`.
///
/// Subsets are visited by increasing size; supersets of a hit are skipped,
/// since membership is inherited upwards. A nonzero constant factor `P_i`
/// gives the hit `{i}`.
pub fn beta_min(factors: &[Polynomial], engine: &Buchberger) -> Result<SetSystem> {
    validate_factors(factors)?;
    let ground = factors.len() - 1;
    if ground > MAX_BETA_GROUND {
        return Err(Error::ResourceLimit {
            what: "factors in the beta search (l)".into(),
            limit: MAX_BETA_GROUND,
        });
    }
    let n = factors.len();
    let mut hits: Vec<IndexSet> = Vec::new();
    for size in 1..=n {
        for bits in 0..1u32 << n {
            let set = IndexSet::from_bits(bits);
            if set.len() != size || hits.iter().any(|h| h.is_subset(set)) {
                continue;
            }
            if engine.contains_one(&restrict(factors, set))?.is_some() {
                hits.push(set);
            }
        }
    }
    SetSystem::new(ground, hits)
}

/// `Max((𝓤(β))ˡ)`, the α-system paired with a dual β-system.
pub fn optimal_alpha(beta_min: &SetSystem) -> Result<SetSystem> {
    if beta_min.contains(IndexSet::empty()) {
        return Err(Error::InvalidSetSystem(
            "the empty set cannot belong to a dual system".into(),
        ));
    }
    Ok(beta_min.alpha_l()?.max_elements())
}

/// Everything the planner learns about a list of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionPlan {
    pub graph: CoincidenceGraph,
    pub regrouping: Regrouping,
    /// `Min(β_P)` over the atoms.
    pub beta_min: SetSystem,
    /// `Max((β_P)ˡ)` over the atoms.
    pub alpha_opt: SetSystem,
}

impl DecompositionPlan {
    /// False when `α = {L}`, i.e. no set of atoms generates the unit ideal.
    pub fn decomposition_available(&self) -> bool {
        !self.alpha_opt.contains(self.alpha_opt.universe())
    }

    /// The regrouped factors give a true decomposition with more than one factor.
    pub fn has_true_decomposition(&self) -> bool {
        self.regrouping.factors.len() > 1
    }
}

pub fn plan(atoms: &[Polynomial], engine: &Buchberger) -> Result<DecompositionPlan> {
    let graph = coincidence_graph(atoms, engine)?;
    let regrouping = regroup_with(atoms, &graph);
    let beta_min = beta_min(atoms, engine)?;
    let alpha_opt = optimal_alpha(&beta_min)?;
    Ok(DecompositionPlan {
        graph,
        regrouping,
        beta_min,
        alpha_opt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Variables;

    fn atoms(vars: &[&str], list: &[&str]) -> Vec<Polynomial> {
        let v = Variables::new(vars).unwrap();
        list.iter().map(|s| v.parse(s).unwrap()).collect()
    }

    fn worked_example() -> Vec<Polynomial> {
        atoms(&["x", "y"], &["x+1", "x*y+y+1", "x", "x^2+x*y+x+y-1"])
    }

    #[test]
    fn coincidence_graph_of_worked_example() {
        let g = coincidence_graph(&worked_example(), &Buchberger::default()).unwrap();
        assert_eq!(g.edges, vec![(1, 2), (1, 3), (2, 3)]);
        assert_eq!(g.components(), vec![vec![0], vec![1, 2, 3]]);
    }

    #[test]
    fn graph_edge_cases() {
        let e = Buchberger::default();
        let g = coincidence_graph(&atoms(&["x"], &["x"]), &e).unwrap();
        assert_eq!((g.vertices, g.edges.len()), (1, 0));
        let g = coincidence_graph(&atoms(&["x"], &["x", "x+1"]), &e).unwrap();
        assert!(g.is_edgeless());
        assert!(coincidence_graph(&atoms(&["x"], &["x", "0"]), &e).is_err());
    }

    #[test]
    fn regroup_worked_example() {
        let a = worked_example();
        let r = regroup(&a, &Buchberger::default()).unwrap();
        assert_eq!(r.components, vec![vec![0], vec![1, 2, 3]]);
        assert_eq!(r.factors[0], a[0]);
        assert_eq!(r.factors[1], &(&a[1] * &a[2]) * &a[3]);
    }

    #[test]
    fn regroup_coprime_and_identical_atoms() {
        let e = Buchberger::default();
        let r = regroup(&atoms(&["x"], &["x", "x+1", "x+2"]), &e).unwrap();
        assert_eq!(r.components, vec![vec![0], vec![1], vec![2]]);
        let r = regroup(&atoms(&["x"], &["x", "x"]), &e).unwrap();
        assert_eq!(r.components, vec![vec![0, 1]]);
    }

    #[test]
    fn beta_min_examples() {
        let e = Buchberger::default();
        assert_eq!(
            beta_min(&worked_example(), &e).unwrap(),
            system(3, &[&[0, 1], &[0, 2], &[0, 3], &[1, 2, 3]])
        );
        assert_eq!(
            beta_min(&atoms(&["x"], &["1"]), &e).unwrap(),
            system(0, &[&[0]])
        );
        assert_eq!(
            beta_min(&atoms(&["x"], &["x", "x+1", "x+2"]), &e).unwrap(),
            system(2, &[&[0, 1], &[0, 2], &[1, 2]])
        );
        assert!(beta_min(&atoms(&["x"], &["x"]), &e).unwrap().is_empty());
    }

    #[test]
    fn beta_search_is_capped() {
        let many = atoms(&["x"], &["x"; 14]);
        assert!(matches!(
            beta_min(&many, &Buchberger::default()),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn optimal_alpha_examples() {
        assert_eq!(
            optimal_alpha(&system(3, &[&[0, 1], &[0, 2], &[0, 3], &[1, 2, 3]])).unwrap(),
            system(3, &[&[0], &[1, 2], &[1, 3], &[2, 3]])
        );
        for ground in 1..6 {
            assert_eq!(
                optimal_alpha(&SetSystem::of_size(ground, 2).unwrap()).unwrap(),
                SetSystem::of_size(ground, 1).unwrap()
            );
        }
        assert_eq!(
            optimal_alpha(&system(1, &[&[0, 1]])).unwrap(),
            system(1, &[&[0], &[1]])
        );
        assert!(optimal_alpha(&system(1, &[&[]])).is_err());
    }

    #[test]
    fn plan_flags() {
        let e = Buchberger::default();
        let p = plan(&atoms(&["x"], &["x"]), &e).unwrap();
        assert!(!p.decomposition_available());
        let p = plan(&atoms(&["x"], &["x", "x+1"]), &e).unwrap();
        assert!(p.decomposition_available() && p.has_true_decomposition());
        assert_eq!(p.alpha_opt, system(1, &[&[0], &[1]]));
    }
}
