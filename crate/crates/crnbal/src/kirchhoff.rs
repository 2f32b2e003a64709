//! The Matrix-Tree vector `rho`: for each connected component, entry `i` is
//! the sum of weight products of the component's spanning trees directed
//! toward vertex `i`, computed as a cofactor of the component's Laplacian
//! block. `L rho = 0` exactly, and `rho` is strictly positive on a component
//! exactly when that component is strongly connected.
//!
//! Cofactors are evaluated per component block, not on the full Laplacian:
//! with more than one component every full-size cofactor vanishes, while the
//! block computation stays meaningful. The vector is left unnormalized; only
//! ratios of entries enter the downstream balance conditions.

use num_traits::{Signed, Zero};

use crate::graphkit::{spanning_trees_toward, ComponentPartition, OracleCapExceeded};
use crate::linalg::{determinant, RationalMatrix};
use crate::rational::Rational;

/// Per-component Matrix-Tree cofactor vector, stacked over all complexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KirchhoffVector {
    rho: Vec<Rational>,
    strictly_positive: Vec<bool>,
}

impl KirchhoffVector {
    /// The stacked vector, indexed by complex.
    pub fn rho(&self) -> &[Rational] {
        &self.rho
    }

    /// Per-component strict positivity flags.
    pub fn strictly_positive(&self) -> &[bool] {
        &self.strictly_positive
    }

    pub fn all_positive(&self) -> bool {
        self.strictly_positive.iter().all(|&p| p)
    }
}

fn assemble(partition: &ComponentPartition, rho: Vec<Rational>) -> KirchhoffVector {
    let strictly_positive = partition
        .components()
        .iter()
        .map(|comp| comp.vertices.iter().all(|&v| rho[v].is_positive()))
        .collect();
    KirchhoffVector { rho, strictly_positive }
}

/// Signed cofactor of `block` obtained by deleting `row` and column `col`.
fn cofactor(block: &RationalMatrix, row: usize, col: usize) -> Rational {
    let n = block.rows();
    let rows: Vec<usize> = (0..n).filter(|&i| i != row).collect();
    let cols: Vec<usize> = (0..n).filter(|&j| j != col).collect();
    let minor = determinant(&block.submatrix(&rows, &cols));
    if (row + col) % 2 == 0 {
        minor
    } else {
        -minor
    }
}

/// Production path: `rho` from first-row cofactors of each component's
/// Laplacian block. In debug builds a second cofactor row is computed to
/// assert the row independence that zero column sums guarantee.
pub fn rho_by_cofactor(l: &RationalMatrix, partition: &ComponentPartition) -> KirchhoffVector {
    let mut rho = vec![Rational::zero(); l.rows()];
    for comp in partition.components() {
        let block = l.submatrix(&comp.vertices, &comp.vertices);
        for (local, &vertex) in comp.vertices.iter().enumerate() {
            let value = cofactor(&block, 0, local);
            debug_assert!(
                block.rows() < 2 || cofactor(&block, 1, local) == value,
                "cofactor must not depend on the deleted row"
            );
            debug_assert!(!value.is_negative(), "tree weights sum to a non-negative value");
            rho[vertex] = value;
        }
    }
    assemble(partition, rho)
}

/// Oracle path: `rho_i` as the explicit sum of weight products over all
/// spanning trees directed toward `i`. Fails if any component exceeds the
/// enumeration cap.
pub fn rho_by_trees(partition: &ComponentPartition) -> Result<KirchhoffVector, OracleCapExceeded> {
    let total: usize = partition.components().iter().map(|c| c.vertices.len()).sum();
    let mut rho = vec![Rational::zero(); total];
    for comp in partition.components() {
        for &vertex in &comp.vertices {
            rho[vertex] = spanning_trees_toward(comp, vertex)?
                .iter()
                .map(|t| t.weight.clone())
                .sum();
        }
    }
    Ok(assemble(partition, rho))
}
