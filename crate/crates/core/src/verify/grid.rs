//! The standard scenario grids.

use std::sync::Arc;

use super::scenario::{rational_variety, Scenario, ScenarioEntry};
use crate::charclass::SeriesSpec;
use crate::equivariant::Block;
use crate::exactnum::{rat, Modulus, Scalar};
use crate::ncseries::DEFAULT_TRUNCATION;

/// Largest twist `|k_i|` in the HRR grid.
pub const HRR_MAX_TWIST: i64 = 4;
/// Largest twist `|k_i|` in the GRR grids.
pub const GRR_MAX_TWIST: i64 = 3;
/// Largest `n` in the equivariant grids on `P^n`.
pub const EQUIVARIANT_MAX_N: u32 = 3;
pub const ATIYAH_BOTT_MAX_K: i64 = 4;
pub const EQUIVARIANT_HRR_MAX_K: i64 = 3;

pub const HRR_VARIETIES: [&[u32]; 5] = [&[1], &[2], &[3], &[1, 1], &[1, 2]];
pub const PROJECTION_VARIETIES: [&[u32]; 2] = [&[1, 1], &[1, 2]];
pub const TODD_VARIETIES: [&[u32]; 8] = [&[], &[1], &[2], &[3], &[1, 1], &[1, 2], &[1, 1, 1], &[2, 2]];

/// All integer vectors of length `len` with entries in `-bound..=bound`,
/// in lexicographic order.
pub fn twists(len: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-bound..=bound).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

fn twist_label(ks: &[i64]) -> String {
    format!("O({})", ks.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
}

pub fn hrr_grid() -> Vec<ScenarioEntry> {
    let mut out = Vec::new();
    for factors in HRR_VARIETIES {
        let x = rational_variety(factors);
        for ks in twists(factors.len(), HRR_MAX_TWIST) {
            let id = format!("hrr/{}/{}", x.name(), twist_label(&ks));
            out.push(ScenarioEntry::new(id, Scenario::Hrr { variety: x.clone(), lines: vec![ks], todd: None }));
        }
    }
    out
}

/// Nonempty subsets of `0..r` as sorted index lists.
fn nonempty_subsets(r: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << r)).map(|mask| (0..r).filter(|i| mask >> i & 1 == 1).collect()).collect()
}

pub fn grr_projection_grid() -> Vec<ScenarioEntry> {
    let mut out = Vec::new();
    for factors in PROJECTION_VARIETIES {
        let x = rational_variety(factors);
        for keep in nonempty_subsets(factors.len()) {
            for ks in twists(factors.len(), GRR_MAX_TWIST) {
                let id = format!("grr_projection/{}/keep{:?}/{}", x.name(), keep, twist_label(&ks));
                out.push(ScenarioEntry::new(
                    id,
                    Scenario::GrrProjection { variety: x.clone(), keep: keep.clone(), line: ks },
                ));
            }
        }
    }
    out
}

pub fn grr_embedding_grid() -> Vec<ScenarioEntry> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for m in 0..n {
            for k in -GRR_MAX_TWIST..=GRR_MAX_TWIST {
                out.push(ScenarioEntry::new(
                    format!("grr_embedding/P{m}inP{n}/O({k})"),
                    Scenario::GrrEmbedding { m, n, k },
                ));
            }
        }
    }
    out
}

/// The field holding every eigenvalue of the equivariant grids: `Q(zeta_12)`,
/// which contains `zeta_3 = zeta_12^4` and `zeta_4 = zeta_12^3`.
pub fn eigenvalue_field() -> Arc<Modulus> {
    Arc::new(Modulus::cyclotomic(12).expect("12 is in range"))
}

/// `2, 3, 1/2, zeta_3, zeta_4`, with labels.
pub fn eigenvalue_pool() -> Vec<(&'static str, Scalar)> {
    let f = eigenvalue_field();
    vec![
        ("2", Scalar::from_rational(&f, rat(2, 1))),
        ("3", Scalar::from_rational(&f, rat(3, 1))),
        ("1/2", Scalar::from_rational(&f, rat(1, 2))),
        ("zeta3", Scalar::root_of_unity(&f, 4)),
        ("zeta4", Scalar::root_of_unity(&f, 3)),
    ]
}

/// The pool with the trivial eigenvalue `1` in front.
fn pool_with_one() -> Vec<(&'static str, Scalar)> {
    let f = eigenvalue_field();
    let mut pool = vec![("1", Scalar::one(&f))];
    pool.extend(eigenvalue_pool());
    pool
}

/// `size`-element subsets of `0..n`, each increasing, in lexicographic order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Ordered compositions of `total` into positive parts.
pub fn compositions(total: u32) -> Vec<Vec<u32>> {
    if total == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=total {
        for rest in compositions(total - first) {
            let mut v = vec![first];
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

fn blocks_label(labels: &[&str], mults: &[u32]) -> String {
    labels.iter().zip(mults).map(|(l, m)| format!("{l}^{m}")).collect::<Vec<_>>().join(",")
}

pub fn atiyah_bott_grid() -> Vec<ScenarioEntry> {
    let pool = eigenvalue_pool();
    let mut out = Vec::new();
    for n in 1..=EQUIVARIANT_MAX_N {
        for combo in combinations(pool.len(), n as usize + 1) {
            let blocks: Vec<Block> = combo.iter().map(|&i| Block::new(pool[i].1.clone(), 1)).collect();
            let labels: Vec<&str> = combo.iter().map(|&i| pool[i].0).collect();
            for k in 0..=ATIYAH_BOTT_MAX_K {
                let id = format!("atiyah_bott/P{n}/[{}]/k{k}", labels.join(","));
                out.push(ScenarioEntry::new(id, Scenario::AtiyahBott { n, blocks: blocks.clone(), k }));
            }
        }
    }
    out
}

/// Atiyah-Bott scenarios with a repeated eigenvalue; each must raise a
/// localization failure.
pub fn atiyah_bott_failure_grid() -> Vec<ScenarioEntry> {
    let pool = pool_with_one();
    let mut out = Vec::new();
    for n in 1..=EQUIVARIANT_MAX_N {
        for (label, a) in &pool {
            let mut blocks = vec![Block::new(a.clone(), 1), Block::new(a.clone(), 1)];
            for (_, other) in pool.iter().filter(|(l, _)| l != label).take(n as usize - 1) {
                blocks.push(Block::new(other.clone(), 1));
            }
            let id = format!("atiyah_bott_repeat/P{n}/{label}");
            out.push(ScenarioEntry::new(id, Scenario::AtiyahBott { n, blocks, k: 1 }));
        }
    }
    out
}

/// Every block pattern (composition of `n + 1`) on `P^n` for `n <= 3`,
/// with distinct eigenvalues drawn from `{1, 2, 3, 1/2, zeta_3, zeta_4}`.
pub fn equivariant_hrr_grid() -> Vec<ScenarioEntry> {
    let pool = pool_with_one();
    let mut out = Vec::new();
    for n in 1..=EQUIVARIANT_MAX_N {
        for mults in compositions(n + 1) {
            for combo in combinations(pool.len(), mults.len()) {
                let blocks: Vec<Block> =
                    combo.iter().zip(&mults).map(|(&i, &m)| Block::new(pool[i].1.clone(), m)).collect();
                let labels: Vec<&str> = combo.iter().map(|&i| pool[i].0).collect();
                for k in 0..=EQUIVARIANT_HRR_MAX_K {
                    let id = format!("equivariant_hrr/P{n}/[{}]/k{k}", blocks_label(&labels, &mults));
                    out.push(ScenarioEntry::new(id, Scenario::EquivariantHrr { n, blocks: blocks.clone(), k }));
                }
            }
        }
    }
    out
}

/// Inclusions of each fixed component for every block pattern on `P^n`,
/// `n <= 3`, with one eigenvalue assignment per pattern.
pub fn equivariant_grr_grid() -> Vec<ScenarioEntry> {
    let pool = pool_with_one();
    let mut out = Vec::new();
    for n in 1..=EQUIVARIANT_MAX_N {
        for mults in compositions(n + 1) {
            let blocks: Vec<Block> = mults.iter().zip(&pool).map(|(&m, (_, a))| Block::new(a.clone(), m)).collect();
            let labels: Vec<&str> = pool.iter().take(mults.len()).map(|(l, _)| *l).collect();
            for component in 0..blocks.len() {
                for k in -1..=2 {
                    let id = format!("equivariant_grr/P{n}/[{}]/F{component}/k{k}", blocks_label(&labels, &mults));
                    out.push(ScenarioEntry::new(
                        id,
                        Scenario::EquivariantGrr { n, blocks: blocks.clone(), component, k, mu: None },
                    ));
                }
            }
        }
    }
    out
}

pub fn todd_consistency_grid() -> Vec<ScenarioEntry> {
    let mut out = Vec::new();
    for factors in TODD_VARIETIES {
        let x = rational_variety(factors);
        let d = x.dimension() as usize;
        for series in [SeriesSpec::todd(d), SeriesSpec::exp(d), SeriesSpec::inv_todd(d)] {
            let id = format!("todd_consistency/{}/{}", x.name(), series.name());
            out.push(ScenarioEntry::new(id, Scenario::ToddConsistency { variety: x.clone(), series, lines: None }));
        }
    }
    out
}

pub fn dexp_grid() -> Vec<ScenarioEntry> {
    (1..=DEFAULT_TRUNCATION)
        .map(|trunc| ScenarioEntry::new(format!("dexp/N{trunc}"), Scenario::DexpWords { trunc }))
        .collect()
}

/// Names accepted by [`grid_by_name`].
pub const GRID_NAMES: [&str; 9] = [
    "hrr",
    "grr_projection",
    "grr_embedding",
    "atiyah_bott",
    "atiyah_bott_repeat",
    "equivariant_hrr",
    "equivariant_grr",
    "todd_consistency",
    "dexp",
];

pub fn grid_by_name(name: &str) -> Option<Vec<ScenarioEntry>> {
    Some(match name {
        "hrr" => hrr_grid(),
        "grr_projection" => grr_projection_grid(),
        "grr_embedding" => grr_embedding_grid(),
        "atiyah_bott" => atiyah_bott_grid(),
        "atiyah_bott_repeat" => atiyah_bott_failure_grid(),
        "equivariant_hrr" => equivariant_hrr_grid(),
        "equivariant_grr" => equivariant_grr_grid(),
        "todd_consistency" => todd_consistency_grid(),
        "dexp" => dexp_grid(),
        _ => return None,
    })
}

/// Every grid whose scenarios are all expected to pass.
pub fn passing_grid() -> Vec<ScenarioEntry> {
    GRID_NAMES
        .iter()
        .filter(|n| **n != "atiyah_bott_repeat")
        .flat_map(|n| grid_by_name(n).expect("listed grid"))
        .collect()
}
