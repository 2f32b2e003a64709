//! Domain types for reaction networks and the construction of the matrices
//! `Z`, `D`, `K`, `S`, `L` that define the mass-action dynamics.
//!
//! A network is a list of species, a list of distinct complexes (non-negative
//! integer combinations of species) and a list of directed reactions between
//! complexes, each with a positive rational rate constant. The graph of
//! complexes is the directed multigraph with complexes as vertices and
//! reactions as edges. All types are immutable after construction.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::linalg::RationalMatrix;
use crate::rational::Rational;

/// Structural violations detected while assembling a network.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructuralError {
    #[error("species `{0}` declared twice")]
    DuplicateSpecies(String),
    #[error("complex {0} duplicates complex {1}; complexes must be unique vertices")]
    DuplicateComplex(usize, usize),
    #[error("the all-zero complex is not supported (closed networks only)")]
    ZeroComplex,
    #[error("complex has coefficient for unknown species index {0}")]
    UnknownSpecies(usize),
    #[error("reaction {0} references invalid complex index {1}")]
    InvalidComplexIndex(usize, usize),
    #[error("reaction {0} has identical substrate and product complex")]
    SelfLoop(usize),
    #[error("reaction {0} has non-positive rate constant")]
    NonPositiveRate(usize),
    #[error("network needs at least one {0}")]
    Empty(&'static str),
}

/// Arithmetic regime for the balance verdicts.
///
/// `Exact` decides every multiplicative identity with zero tolerance over
/// the rationals. `Float` is a fallback that compares in `f64` with relative
/// tolerance 1e-9 (for rate data that is genuinely approximate).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArithmeticMode {
    #[default]
    Exact,
    Float,
}

impl ArithmeticMode {
    /// Comparison tolerance, `None` meaning exact equality.
    pub fn tolerance(self) -> Option<f64> {
        match self {
            ArithmeticMode::Exact => None,
            ArithmeticMode::Float => Some(1e-9),
        }
    }
}

/// A chemical species with its 0-based column index in concentration vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Species {
    pub name: String,
    pub index: usize,
}

/// Stoichiometric composition of one complex: coefficient per species.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComplexVector {
    coefficients: Vec<u64>,
}

impl ComplexVector {
    pub fn new(coefficients: Vec<u64>) -> Self {
        ComplexVector { coefficients }
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0)
    }
}

/// A directed reaction between two complexes of the network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    pub substrate: usize,
    pub product: usize,
    pub rate_constant: Rational,
}

/// An immutable reaction network: the source of all derived matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactionNetwork {
    species: Vec<Species>,
    complexes: Vec<ComplexVector>,
    reactions: Vec<Reaction>,
    arithmetic_mode: ArithmeticMode,
}

impl ReactionNetwork {
    /// Validates all invariants: unique species names, unique nonzero
    /// complexes over the declared species, valid reaction endpoints with
    /// `substrate != product` and positive rate constants, and `m, c, r >= 1`.
    pub fn new(
        species: Vec<Species>,
        complexes: Vec<ComplexVector>,
        reactions: Vec<Reaction>,
        arithmetic_mode: ArithmeticMode,
    ) -> Result<Self, StructuralError> {
        if species.is_empty() {
            return Err(StructuralError::Empty("species"));
        }
        if complexes.is_empty() {
            return Err(StructuralError::Empty("complex"));
        }
        if reactions.is_empty() {
            return Err(StructuralError::Empty("reaction"));
        }
        let mut seen = HashMap::new();
        for (i, sp) in species.iter().enumerate() {
            debug_assert_eq!(sp.index, i, "species index must match position");
            if seen.insert(sp.name.clone(), i).is_some() {
                return Err(StructuralError::DuplicateSpecies(sp.name.clone()));
            }
        }
        let mut complex_seen: HashMap<&[u64], usize> = HashMap::new();
        for (i, cx) in complexes.iter().enumerate() {
            if cx.coefficients().len() != species.len() {
                return Err(StructuralError::UnknownSpecies(cx.coefficients().len()));
            }
            if cx.is_zero() {
                return Err(StructuralError::ZeroComplex);
            }
            if let Some(&first) = complex_seen.get(cx.coefficients()) {
                return Err(StructuralError::DuplicateComplex(i, first));
            }
            complex_seen.insert(cx.coefficients(), i);
        }
        for (j, rx) in reactions.iter().enumerate() {
            for endpoint in [rx.substrate, rx.product] {
                if endpoint >= complexes.len() {
                    return Err(StructuralError::InvalidComplexIndex(j, endpoint));
                }
            }
            if rx.substrate == rx.product {
                return Err(StructuralError::SelfLoop(j));
            }
            if !rx.rate_constant.is_positive() {
                return Err(StructuralError::NonPositiveRate(j));
            }
        }
        Ok(ReactionNetwork { species, complexes, reactions, arithmetic_mode })
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn complexes(&self) -> &[ComplexVector] {
        &self.complexes
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn arithmetic_mode(&self) -> ArithmeticMode {
        self.arithmetic_mode
    }

    pub fn with_mode(mut self, mode: ArithmeticMode) -> Self {
        self.arithmetic_mode = mode;
        self
    }

    /// Number of species `m`.
    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    /// Number of complexes `c` (vertices of the graph of complexes).
    pub fn num_complexes(&self) -> usize {
        self.complexes.len()
    }

    /// Number of reactions `r` (edges of the graph of complexes).
    pub fn num_reactions(&self) -> usize {
        self.reactions.len()
    }
}

/// Incremental construction with species interning and complex
/// deduplication: two reactions naming the same composition share a vertex.
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    mode: ArithmeticMode,
    species: Vec<Species>,
    species_by_name: HashMap<String, usize>,
    complexes: Vec<ComplexVector>,
    complex_index: HashMap<Vec<u64>, usize>,
    reactions: Vec<Reaction>,
}

impl NetworkBuilder {
    pub fn new(mode: ArithmeticMode) -> Self {
        NetworkBuilder { mode, ..Default::default() }
    }

    /// Interns a species name, returning its index.
    pub fn species(&mut self, name: &str) -> usize {
        if let Some(&i) = self.species_by_name.get(name) {
            return i;
        }
        let index = self.species.len();
        self.species.push(Species { name: name.to_string(), index });
        self.species_by_name.insert(name.to_string(), index);
        index
    }

    /// Interns a complex given as (species name, coefficient) terms;
    /// repeated species within one complex accumulate.
    pub fn complex(&mut self, terms: &[(&str, u64)]) -> Result<usize, StructuralError> {
        let indices: Vec<(usize, u64)> =
            terms.iter().map(|&(name, coeff)| (self.species(name), coeff)).collect();
        let mut coeffs = vec![0u64; self.species.len()];
        for (i, coeff) in indices {
            coeffs[i] += coeff;
        }
        self.complex_from_coefficients(coeffs)
    }

    /// Interns a complex from an explicit coefficient vector (padded to the
    /// current species count).
    pub fn complex_from_coefficients(
        &mut self,
        mut coeffs: Vec<u64>,
    ) -> Result<usize, StructuralError> {
        if coeffs.len() > self.species.len() {
            return Err(StructuralError::UnknownSpecies(coeffs.len() - 1));
        }
        // Key on the trailing-zero-trimmed vector: species are append-only,
        // so the trimmed form of a composition never changes.
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(StructuralError::ZeroComplex);
        }
        if let Some(&i) = self.complex_index.get(&coeffs) {
            return Ok(i);
        }
        let index = self.complexes.len();
        self.complexes.push(ComplexVector::new(coeffs.clone()));
        self.complex_index.insert(coeffs, index);
        Ok(index)
    }

    /// Coefficients of an interned complex (trailing zeros trimmed).
    pub fn complex_coefficients(&self, index: usize) -> &[u64] {
        self.complexes[index].coefficients()
    }

    pub fn reaction(
        &mut self,
        substrate: usize,
        product: usize,
        rate_constant: Rational,
    ) -> Result<usize, StructuralError> {
        let j = self.reactions.len();
        if substrate == product {
            return Err(StructuralError::SelfLoop(j));
        }
        if !rate_constant.is_positive() {
            return Err(StructuralError::NonPositiveRate(j));
        }
        self.reactions.push(Reaction { substrate, product, rate_constant });
        Ok(j)
    }

    pub fn finish(self) -> Result<ReactionNetwork, StructuralError> {
        let m = self.species.len();
        let complexes = self
            .complexes
            .into_iter()
            .map(|cx| {
                let mut coeffs = cx.coefficients;
                coeffs.resize(m, 0);
                ComplexVector::new(coeffs)
            })
            .collect();
        ReactionNetwork::new(self.species, complexes, self.reactions, self.mode)
    }
}

/// The matrices defining the network dynamics, with shared reaction order:
/// column `j` of `D` and row `j` of `K` refer to reaction `j` in input order.
#[derive(Debug, Clone)]
pub struct MatrixBundle {
    /// m x c complex composition matrix (integer entries).
    pub z: RationalMatrix,
    /// c x r incidence matrix: -1 at the substrate, +1 at the product.
    pub d: RationalMatrix,
    /// r x c rate matrix: row j holds k_j in the substrate column of j.
    pub k: RationalMatrix,
    /// m x r stoichiometric matrix S = Z D.
    pub s: RationalMatrix,
    /// c x c weighted Laplacian L = -D K (zero column sums).
    pub l: RationalMatrix,
}

/// Builds `Z`, `D`, `K`, `S = Z D` and `L = -D K` for a valid network.
pub fn build_matrices(net: &ReactionNetwork) -> MatrixBundle {
    let (m, c, r) = (net.num_species(), net.num_complexes(), net.num_reactions());
    let mut z = RationalMatrix::zeros(m, c);
    for (col, cx) in net.complexes().iter().enumerate() {
        for (row, &coeff) in cx.coefficients().iter().enumerate() {
            z[(row, col)] = Rational::from(BigInt::from(coeff));
        }
    }
    let mut d = RationalMatrix::zeros(c, r);
    let mut k = RationalMatrix::zeros(r, c);
    for (j, rx) in net.reactions().iter().enumerate() {
        d[(rx.substrate, j)] = -Rational::from(BigInt::from(1));
        d[(rx.product, j)] = Rational::from(BigInt::from(1));
        k[(j, rx.substrate)] = rx.rate_constant.clone();
    }
    let s = z.matmul(&d);
    let minus_dk = d.matmul(&k);
    let mut l = RationalMatrix::zeros(c, c);
    for i in 0..c {
        for j in 0..c {
            l[(i, j)] = -minus_dk[(i, j)].clone();
        }
    }
    debug_assert!((0..c).all(|j| (0..c).map(|i| l[(i, j)].clone()).sum::<Rational>().is_zero()));
    MatrixBundle { z, d, k, s, l }
}

/// Reported when a §4-style analysis is requested on a network in which some
/// reaction has no reverse partner. The network itself remains valid.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("reaction {reaction} has no reverse partner; network is not reversible")]
pub struct NotReversible {
    pub reaction: usize,
}

/// One reversible pair in input order: the earlier reaction is forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReversiblePair {
    pub forward: usize,
    pub reverse: usize,
}

/// Reversible skeleton of a network: one oriented edge per reaction pair.
#[derive(Debug, Clone)]
pub struct ReversibleStructure {
    /// c x r_bar incidence matrix of the chosen (forward) orientation.
    pub d_bar: RationalMatrix,
    /// m x r_bar reduced stoichiometric matrix S_bar = Z D_bar.
    pub s_bar: RationalMatrix,
    /// Pairing of reaction indices, in forward input order.
    pub pairs: Vec<ReversiblePair>,
    /// Equilibrium constants k_forward / k_reverse per pair.
    pub k_eq: Vec<Rational>,
}

impl ReversibleStructure {
    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Substrate complex of the forward reaction of pair `alpha`.
    pub fn tail(&self, net: &ReactionNetwork, alpha: usize) -> usize {
        net.reactions()[self.pairs[alpha].forward].substrate
    }

    /// Product complex of the forward reaction of pair `alpha`.
    pub fn head(&self, net: &ReactionNetwork, alpha: usize) -> usize {
        net.reactions()[self.pairs[alpha].forward].product
    }
}

/// Pairs every reaction with a distinct reverse partner (multi-edges paired
/// by multiplicity, earliest-first) and assembles the oriented structure.
pub fn reversible_structure(net: &ReactionNetwork) -> Result<ReversibleStructure, NotReversible> {
    let r = net.num_reactions();
    let mut paired: Vec<Option<usize>> = vec![None; r];
    let mut pairs = Vec::new();
    for j in 0..r {
        if paired[j].is_some() {
            continue;
        }
        let fwd = &net.reactions()[j];
        let partner = (j + 1..r).find(|&j2| {
            paired[j2].is_none() && {
                let rev = &net.reactions()[j2];
                rev.substrate == fwd.product && rev.product == fwd.substrate
            }
        });
        match partner {
            Some(j2) => {
                paired[j] = Some(j2);
                paired[j2] = Some(j);
                pairs.push(ReversiblePair { forward: j, reverse: j2 });
            }
            None => return Err(NotReversible { reaction: j }),
        }
    }

    let c = net.num_complexes();
    let mut d_bar = RationalMatrix::zeros(c, pairs.len());
    let mut k_eq = Vec::with_capacity(pairs.len());
    for (alpha, pair) in pairs.iter().enumerate() {
        let fwd = &net.reactions()[pair.forward];
        let rev = &net.reactions()[pair.reverse];
        d_bar[(fwd.substrate, alpha)] = -Rational::from(BigInt::from(1));
        d_bar[(fwd.product, alpha)] = Rational::from(BigInt::from(1));
        k_eq.push(&fwd.rate_constant / &rev.rate_constant);
    }
    let bundle_z = {
        let mut z = RationalMatrix::zeros(net.num_species(), c);
        for (col, cx) in net.complexes().iter().enumerate() {
            for (row, &coeff) in cx.coefficients().iter().enumerate() {
                z[(row, col)] = Rational::from(BigInt::from(coeff));
            }
        }
        z
    };
    let s_bar = bundle_z.matmul(&d_bar);
    Ok(ReversibleStructure { d_bar, s_bar, pairs, k_eq })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rational_int;

    fn rat(p: i64, q: i64) -> Rational {
        rational_int(p) / rational_int(q)
    }

    /// A -> B with rate k.
    pub(crate) fn single_reaction(k: Rational) -> ReactionNetwork {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let a = b.complex(&[("A", 1)]).unwrap();
        let bb = b.complex(&[("B", 1)]).unwrap();
        b.reaction(a, bb, k).unwrap();
        b.finish().unwrap()
    }

    /// The reversible three-cycle on distinct complexes C1 -> C2 -> C3 -> C1
    /// with forward rates kp and reverse rates km.
    pub(crate) fn reversible_cycle3(kp: [Rational; 3], km: [Rational; 3]) -> ReactionNetwork {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let c1 = b.complex(&[("C1", 1)]).unwrap();
        let c2 = b.complex(&[("C2", 1)]).unwrap();
        let c3 = b.complex(&[("C3", 1)]).unwrap();
        let cycle = [(c1, c2), (c2, c3), (c3, c1)];
        for (i, &(s, p)) in cycle.iter().enumerate() {
            b.reaction(s, p, kp[i].clone()).unwrap();
            b.reaction(p, s, km[i].clone()).unwrap();
        }
        b.finish().unwrap()
    }

    #[test]
    fn single_reaction_matrices_match_definitions() {
        let net = single_reaction(rational_int(2));
        let bundle = build_matrices(&net);
        assert_eq!(bundle.d, RationalMatrix::from_i64_rows(&[vec![-1], vec![1]]));
        assert_eq!(bundle.k, RationalMatrix::from_i64_rows(&[vec![2, 0]]));
        assert_eq!(bundle.l, RationalMatrix::from_i64_rows(&[vec![2, 0], vec![-2, 0]]));
        // Column sums of L vanish.
        for j in 0..2 {
            let sum: Rational = (0..2).map(|i| bundle.l[(i, j)].clone()).sum();
            assert!(sum.is_zero());
        }
    }

    #[test]
    fn cycle3_laplacian_matches_displayed_form() {
        let kp = [rational_int(1), rational_int(2), rational_int(3)];
        let km = [rational_int(4), rational_int(5), rational_int(6)];
        let net = reversible_cycle3(kp.clone(), km.clone());
        let l = build_matrices(&net).l;
        let expect = |p: &Rational| p.clone();
        // Diagonal: total outflow per complex; off-diagonal: -k of the edge
        // from column complex to row complex.
        assert_eq!(l[(0, 0)], &kp[0] + &km[2]);
        assert_eq!(l[(0, 1)], -expect(&km[0]));
        assert_eq!(l[(0, 2)], -expect(&kp[2]));
        assert_eq!(l[(1, 0)], -expect(&kp[0]));
        assert_eq!(l[(1, 1)], &km[0] + &kp[1]);
        assert_eq!(l[(1, 2)], -expect(&km[1]));
        assert_eq!(l[(2, 0)], -expect(&km[2]));
        assert_eq!(l[(2, 1)], -expect(&kp[1]));
        assert_eq!(l[(2, 2)], &kp[2] + &km[1]);
    }

    #[test]
    fn stoichiometric_matrix_of_mixed_composition_cycle() {
        // Complexes X1+X2, X2, 2X1+X2 on the one-directional cycle.
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let c1 = b.complex(&[("X1", 1), ("X2", 1)]).unwrap();
        let c2 = b.complex(&[("X2", 1)]).unwrap();
        let c3 = b.complex(&[("X1", 2), ("X2", 1)]).unwrap();
        b.reaction(c1, c2, rational_int(1)).unwrap();
        b.reaction(c2, c3, rational_int(1)).unwrap();
        b.reaction(c3, c1, rational_int(1)).unwrap();
        let net = b.finish().unwrap();
        let bundle = build_matrices(&net);
        assert_eq!(bundle.z, RationalMatrix::from_i64_rows(&[vec![1, 0, 2], vec![1, 1, 1]]));
        assert_eq!(bundle.s, RationalMatrix::from_i64_rows(&[vec![-1, 2, -1], vec![0, 0, 0]]));
        // Independent multiply.
        assert_eq!(bundle.s, bundle.z.matmul(&bundle.d));
    }

    #[test]
    fn builder_dedupes_complexes() {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let c1 = b.complex(&[("A", 1), ("B", 1)]).unwrap();
        let c2 = b.complex(&[("B", 1), ("A", 1)]).unwrap();
        assert_eq!(c1, c2);
        let c3 = b.complex(&[("A", 1), ("A", 1)]).unwrap();
        let c4 = b.complex(&[("A", 2)]).unwrap();
        assert_eq!(c3, c4);
    }

    #[test]
    fn builder_dedup_survives_later_species() {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let a1 = b.complex(&[("A", 1)]).unwrap();
        let bc = b.complex(&[("B", 1), ("C", 1)]).unwrap();
        let a2 = b.complex(&[("A", 1)]).unwrap();
        assert_eq!(a1, a2);
        b.reaction(a1, bc, rational_int(1)).unwrap();
        let net = b.finish().unwrap();
        assert_eq!(net.num_complexes(), 2);
        assert_eq!(net.complexes()[0].coefficients(), &[1, 0, 0]);
    }

    #[test]
    fn structural_errors_are_reported() {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let a = b.complex(&[("A", 1)]).unwrap();
        assert_eq!(
            b.reaction(a, a, rational_int(1)).unwrap_err(),
            StructuralError::SelfLoop(0)
        );
        assert_eq!(
            b.reaction(a, a + 1, rational_int(0)).unwrap_err(),
            StructuralError::NonPositiveRate(0)
        );
        assert_eq!(b.complex(&[]).unwrap_err(), StructuralError::ZeroComplex);
        assert_eq!(
            NetworkBuilder::new(ArithmeticMode::Exact).finish().unwrap_err(),
            StructuralError::Empty("species")
        );
    }

    #[test]
    fn reversible_pairing_simple() {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let a = b.complex(&[("A", 1)]).unwrap();
        let bb = b.complex(&[("B", 1)]).unwrap();
        b.reaction(a, bb, rational_int(2)).unwrap();
        b.reaction(bb, a, rational_int(3)).unwrap();
        let net = b.finish().unwrap();
        let rs = reversible_structure(&net).unwrap();
        assert_eq!(rs.num_pairs(), 1);
        assert_eq!(rs.d_bar, RationalMatrix::from_i64_rows(&[vec![-1], vec![1]]));
        assert_eq!(rs.k_eq, vec![rat(2, 3)]);
        assert_eq!(rs.pairs[0], ReversiblePair { forward: 0, reverse: 1 });
    }

    #[test]
    fn reversible_cycle_has_three_pairs_with_input_order_k_eq() {
        let kp = [rational_int(1), rational_int(2), rational_int(3)];
        let km = [rational_int(4), rational_int(5), rational_int(6)];
        let net = reversible_cycle3(kp, km);
        let rs = reversible_structure(&net).unwrap();
        assert_eq!(rs.num_pairs(), 3);
        assert_eq!(rs.k_eq, vec![rat(1, 4), rat(2, 5), rat(3, 6)]);
    }

    #[test]
    fn irreversible_cycle_is_not_reversible() {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let c1 = b.complex(&[("X1", 1), ("X2", 1)]).unwrap();
        let c2 = b.complex(&[("X2", 1)]).unwrap();
        let c3 = b.complex(&[("X1", 2), ("X2", 1)]).unwrap();
        b.reaction(c1, c2, rational_int(1)).unwrap();
        b.reaction(c2, c3, rational_int(1)).unwrap();
        b.reaction(c3, c1, rational_int(1)).unwrap();
        let net = b.finish().unwrap();
        assert_eq!(reversible_structure(&net).unwrap_err(), NotReversible { reaction: 0 });
    }

    #[test]
    fn parallel_edges_pair_by_multiplicity() {
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let a = b.complex(&[("A", 1)]).unwrap();
        let bb = b.complex(&[("B", 1)]).unwrap();
        b.reaction(a, bb, rational_int(1)).unwrap();
        b.reaction(a, bb, rational_int(2)).unwrap();
        b.reaction(bb, a, rational_int(3)).unwrap();
        b.reaction(bb, a, rational_int(4)).unwrap();
        let net = b.finish().unwrap();
        let rs = reversible_structure(&net).unwrap();
        assert_eq!(rs.num_pairs(), 2);
        assert_eq!(rs.k_eq, vec![rat(1, 3), rat(2, 4)]);

        // Drop one reverse edge: pairing must fail.
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        let a = b.complex(&[("A", 1)]).unwrap();
        let bb = b.complex(&[("B", 1)]).unwrap();
        b.reaction(a, bb, rational_int(1)).unwrap();
        b.reaction(a, bb, rational_int(2)).unwrap();
        b.reaction(bb, a, rational_int(3)).unwrap();
        let net = b.finish().unwrap();
        assert!(reversible_structure(&net).is_err());
    }

    #[test]
    fn reordering_reactions_as_forward_reverse_blocks_reproduces_l() {
        let kp = [rational_int(1), rational_int(2), rational_int(3)];
        let km = [rational_int(4), rational_int(5), rational_int(6)];
        let net = reversible_cycle3(kp, km);
        let rs = reversible_structure(&net).unwrap();
        let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
        for name in ["C1", "C2", "C3"] {
            b.complex(&[(name, 1)]).unwrap();
        }
        let order: Vec<usize> = rs
            .pairs
            .iter()
            .map(|p| p.forward)
            .chain(rs.pairs.iter().map(|p| p.reverse))
            .collect();
        for &j in &order {
            let rx = &net.reactions()[j];
            b.reaction(rx.substrate, rx.product, rx.rate_constant.clone()).unwrap();
        }
        let reordered = b.finish().unwrap();
        let orig = build_matrices(&net);
        let reord = build_matrices(&reordered);
        assert_eq!(orig.l, reord.l);
        // D of the reordered network is [D_bar | -D_bar].
        let r_bar = rs.num_pairs();
        for i in 0..net.num_complexes() {
            for alpha in 0..r_bar {
                assert_eq!(reord.d[(i, alpha)], rs.d_bar[(i, alpha)]);
                assert_eq!(reord.d[(i, r_bar + alpha)], -rs.d_bar[(i, alpha)].clone());
            }
        }
    }
}
