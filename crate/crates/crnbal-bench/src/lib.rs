//! Deterministic fixture networks for the benchmarks.

use num_bigint::BigInt;

use crnbal::model::{ArithmeticMode, NetworkBuilder};
use crnbal::{Rational, ReactionNetwork};

fn ri(x: i64) -> Rational {
    Rational::from(BigInt::from(x))
}

/// Reversible cycle on `n` distinct complexes with mildly varying rates.
pub fn reversible_cycle(n: usize) -> ReactionNetwork {
    let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
    let v: Vec<usize> = (0..n)
        .map(|i| b.complex(&[(format!("C{i}").as_str(), 1)]).unwrap())
        .collect();
    for i in 0..n {
        let j = (i + 1) % n;
        b.reaction(v[i], v[j], ri(1 + (i as i64 % 3))).unwrap();
        b.reaction(v[j], v[i], ri(2 + (i as i64 % 4))).unwrap();
    }
    b.finish().unwrap()
}

/// Reversible wheel: a hub complex joined to every rim vertex of a cycle.
/// At `rim = 7` this is the largest graph the tree oracle accepts.
pub fn reversible_wheel(rim: usize) -> ReactionNetwork {
    let mut b = NetworkBuilder::new(ArithmeticMode::Exact);
    let hub = b.complex(&[("H", 1)]).unwrap();
    let v: Vec<usize> = (0..rim)
        .map(|i| b.complex(&[(format!("R{i}").as_str(), 1)]).unwrap())
        .collect();
    for i in 0..rim {
        let j = (i + 1) % rim;
        b.reaction(v[i], v[j], ri(1 + (i as i64 % 2))).unwrap();
        b.reaction(v[j], v[i], ri(2)).unwrap();
        b.reaction(hub, v[i], ri(1)).unwrap();
        b.reaction(v[i], hub, ri(3)).unwrap();
    }
    b.finish().unwrap()
}

/// The `.crn` source of a small mixed-composition network.
pub const MIXED_CYCLE_SOURCE: &str = "\
X1 + X2 -> X2 ; k = 2
X2 -> 2 X1 + X2 ; k = 4
2 X1 + X2 -> X1 + X2 ; k = 1
";
