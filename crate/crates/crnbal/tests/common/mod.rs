//! Shared test fixtures: seeded random network generators and small
//! rational helpers used by the acceptance and property suites.

#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;

use crnbal::model::{ArithmeticMode, NetworkBuilder, ReactionNetwork};
use crnbal::rational::pow;
use crnbal::Rational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn ri(p: i64) -> Rational {
    rat(p, 1)
}

/// Small positive rational with numerator and denominator in 1..=9.
pub fn random_rate(rng: &mut impl Rng) -> Rational {
    rat(rng.gen_range(1..=9), rng.gen_range(1..=9))
}

/// How the composition matrix of a generated network is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composition {
    /// One distinct species per complex (identity Z, zero deficiency).
    Identity,
    /// Random distinct columns with entries in 0..=2 over up to 4 species.
    Random,
}

/// How the rate constants of a generated reversible network are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateFamily {
    /// Independent random rates (generically unbalanced).
    Random,
    /// Reverse rates from a random vertex potential: formally balanced by
    /// construction.
    VertexPotential,
    /// Reverse rates from a random species potential: detailed-balanced by
    /// construction.
    SpeciesPotential,
}

/// Vertex-disjoint component layouts: 1 or 2 components, each with
/// 2..=max_vertices vertices, and an undirected edge pool of a spanning
/// tree plus random extras (parallel edges allowed), capped per component.
fn component_layouts(
    rng: &mut impl Rng,
    max_vertices: usize,
    max_edges: usize,
) -> Vec<(usize, Vec<(usize, usize)>)> {
    let components = if rng.gen_bool(0.25) { 2 } else { 1 };
    (0..components)
        .map(|_| {
            let n = rng.gen_range(2..=max_vertices);
            let mut edges: Vec<(usize, usize)> = (1..n)
                .map(|v| (rng.gen_range(0..v), v))
                .collect();
            let extras = rng.gen_range(0..=(max_edges.saturating_sub(edges.len())).min(4));
            for _ in 0..extras {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a != b {
                    edges.push((a, b));
                }
            }
            (n, edges)
        })
        .collect()
}

/// Interns species and complexes for `total` vertices and returns the
/// complex index of each vertex.
fn intern_complexes(
    rng: &mut impl Rng,
    builder: &mut NetworkBuilder,
    total: usize,
    composition: Composition,
) -> Vec<usize> {
    match composition {
        Composition::Identity => (0..total)
            .map(|v| builder.complex(&[(format!("S{v}").as_str(), 1)]).unwrap())
            .collect(),
        Composition::Random => {
            // Complexes of total degree at most 2 (X, 2X, X+Y). Higher
            // degrees make equilibrium monomials exponentially large, which
            // puts the float certificate checks outside f64 reach without
            // exercising anything new in the exact verdicts.
            let pool_size = |m: usize| 2 * m + m * (m - 1) / 2;
            let m_min = (1..=4usize)
                .find(|&m| pool_size(m) >= total)
                .expect("at most 12 vertices are generated");
            let m = rng.gen_range(m_min..=4usize);
            for s in 0..m {
                builder.species(&format!("S{s}"));
            }
            let mut pool: Vec<Vec<u64>> = Vec::new();
            for i in 0..m {
                let mut single = vec![0u64; m];
                single[i] = 1;
                pool.push(single.clone());
                single[i] = 2;
                pool.push(single);
                for j in i + 1..m {
                    let mut pair = vec![0u64; m];
                    pair[i] = 1;
                    pair[j] = 1;
                    pool.push(pair);
                }
            }
            for k in (1..pool.len()).rev() {
                pool.swap(k, rng.gen_range(0..=k));
            }
            pool.truncate(total);
            pool.into_iter()
                .map(|coeffs| builder.complex_from_coefficients(coeffs).unwrap())
                .collect()
        }
    }
}

/// Random directed multigraph network: components are weakly connected by
/// construction, orientation per edge is random, so strong connectivity
/// varies. Components have at most 6 vertices and 10 edges.
pub fn random_directed_network(rng: &mut impl Rng, composition: Composition) -> ReactionNetwork {
    let layouts = component_layouts(rng, 6, 10);
    let total: usize = layouts.iter().map(|(n, _)| n).sum();
    let mut builder = NetworkBuilder::new(ArithmeticMode::Exact);
    let vertex_complex = intern_complexes(rng, &mut builder, total, composition);

    let mut offset = 0;
    for (n, edges) in &layouts {
        for &(a, b) in edges {
            let (mut s, mut p) = (vertex_complex[offset + a], vertex_complex[offset + b]);
            if rng.gen_bool(0.5) {
                std::mem::swap(&mut s, &mut p);
            }
            builder.reaction(s, p, random_rate(rng)).unwrap();
        }
        offset += n;
    }
    builder.finish().unwrap()
}

/// Random reversible network with the requested composition and rate
/// family. The reversible skeleton is kept free of parallel pairs so the
/// symmetry reading of the balance conditions applies per matrix entry.
pub fn random_reversible_network(
    rng: &mut impl Rng,
    composition: Composition,
    family: RateFamily,
) -> ReactionNetwork {
    let mut layouts = component_layouts(rng, 5, 8);
    for (_, edges) in &mut layouts {
        let mut seen = std::collections::HashSet::new();
        edges.retain(|&(a, b)| seen.insert((a.min(b), a.max(b))));
    }
    let total: usize = layouts.iter().map(|(n, _)| n).sum();
    let mut builder = NetworkBuilder::new(ArithmeticMode::Exact);
    let vertex_complex = intern_complexes(rng, &mut builder, total, composition);

    // Potentials drawn up front; which one applies depends on the family.
    let vertex_potential: Vec<Rational> = (0..total).map(|_| random_rate(rng)).collect();
    let species_potential: Vec<Rational> = (0..16).map(|_| random_rate(rng)).collect();

    let mut offset = 0;
    for (n, edges) in &layouts {
        for &(a, b) in edges {
            let tail = vertex_complex[offset + a];
            let head = vertex_complex[offset + b];
            let kf = random_rate(rng);
            let kr = match family {
                RateFamily::Random => random_rate(rng),
                // kf/kr = phi_head / phi_tail puts Ln K^eq in im D_bar^T.
                RateFamily::VertexPotential => {
                    &kf * &vertex_potential[offset + a] / &vertex_potential[offset + b]
                }
                // Balance each pair at x*: kf x*^substrate = kr x*^product.
                RateFamily::SpeciesPotential => {
                    let monomial = |complex: usize| -> Rational {
                        builder_complex_monomial(&builder, complex, &species_potential)
                    };
                    &kf * &monomial(tail) / &monomial(head)
                }
            };
            builder.reaction(tail, head, kf).unwrap();
            builder.reaction(head, tail, kr).unwrap();
        }
        offset += n;
    }
    builder.finish().unwrap()
}

fn builder_complex_monomial(
    builder: &NetworkBuilder,
    complex: usize,
    potential: &[Rational],
) -> Rational {
    builder
        .complex_coefficients(complex)
        .iter()
        .enumerate()
        .map(|(s, &e)| pow(&potential[s], &BigInt::from(e)))
        .product()
}
