//! Exhaustive sweeps over down-sets of the inner cube `{1,2,3}^4`.
//!
//! Slicing the cube along its first coordinate turns a down-set into a chain
//! of three nested down-sets of `[3]^3`, and `[3]^3` has only 980 down-sets —
//! few enough to list once and sweep completely. Every clause used here has
//! exactly one cell in each slice (its cells differ in every coordinate), so
//! "clause entirely present" is a per-slice bitmask test.
//!
//! Two consumers: the standalone present-set maximisation, whose complement
//! bound seeds the size table, and an exhaustive oracle that double-checks
//! the branch-and-bound on cube-restricted instances.

use std::sync::OnceLock;

use crate::lattice::{self, CellSet, Point};

use super::hitting::{self, HittingInstance};

/// All down-sets of `[3]^3` as 27-bit masks (bit `x + 3y + 9z`), in
/// ascending mask order.
pub fn slice_downsets() -> &'static Vec<u32> {
    static SETS: OnceLock<Vec<u32>> = OnceLock::new();
    SETS.get_or_init(|| {
        // Column heights h[x][y] weakly decreasing in x and y classify the
        // down-sets; 4^9 candidate matrices is nothing.
        let mut masks = Vec::new();
        let mut h = [[0u8; 3]; 3];
        for code in 0..4usize.pow(9) {
            let mut rest = code;
            for x in 0..3 {
                for y in 0..3 {
                    h[x][y] = (rest % 4) as u8;
                    rest /= 4;
                }
            }
            let monotone = (0..3).all(|x| {
                (0..3).all(|y| {
                    (x == 2 || h[x][y] >= h[x + 1][y]) && (y == 2 || h[x][y] >= h[x][y + 1])
                })
            });
            if !monotone {
                continue;
            }
            let mut mask = 0u32;
            for x in 0..3 {
                for y in 0..3 {
                    for z in 0..h[x][y] as usize {
                        mask |= 1 << (x + 3 * y + 9 * z);
                    }
                }
            }
            masks.push(mask);
        }
        masks.sort_unstable();
        masks.dedup();
        assert_eq!(masks.len(), 980);
        masks
    })
}

fn subset_lists() -> &'static Vec<Vec<u16>> {
    static LISTS: OnceLock<Vec<Vec<u16>>> = OnceLock::new();
    LISTS.get_or_init(|| {
        let sets = slice_downsets();
        sets.iter()
            .map(|&sup| {
                let mut subs: Vec<u16> = (0..sets.len() as u16)
                    .filter(|&i| sets[i as usize] & !sup == 0)
                    .collect();
                // Big slices first so good chains show up early.
                subs.sort_by_key(|&i| {
                    (std::cmp::Reverse(sets[i as usize].count_ones()), sets[i as usize])
                });
                subs
            })
            .collect()
    })
}

/// A present-set maximisation over nested slice chains: each slice must
/// contain its required cells, and no clause may be present in full.
pub struct ChainProblem {
    /// Per-slice 27-bit masks of cells that must be present.
    pub required: [u32; 3],
    /// Per clause, its single cell in each slice as a one-bit mask.
    pub clauses: Vec<[u32; 3]>,
}

/// The best chain found by [`sweep_chains`].
pub struct ChainBest {
    pub present_cells: u32,
    pub slices: [u32; 3],
    pub chains_checked: u64,
}

/// Complete sweep of all nested chains, returning a maximum-size present set
/// or `None` when the requirements already force a full clause.
pub fn sweep_chains(problem: &ChainProblem) -> Option<ChainBest> {
    let sets = slice_downsets();
    let subs = subset_lists();
    let n = sets.len();
    let blocks = problem.clauses.len().div_ceil(64);
    // present[w][d]: bitset over clauses whose slice-w cell lies in down-set d.
    let mut present = vec![vec![0u64; n * blocks]; 3];
    for (ci, cl) in problem.clauses.iter().enumerate() {
        for w in 0..3 {
            for (d, &mask) in sets.iter().enumerate() {
                if cl[w] & mask != 0 {
                    present[w][d * blocks + ci / 64] |= 1 << (ci % 64);
                }
            }
        }
    }
    let order: Vec<u16> = {
        let mut idx: Vec<u16> = (0..n as u16).collect();
        idx.sort_by_key(|&i| (std::cmp::Reverse(sets[i as usize].count_ones()), sets[i as usize]));
        idx
    };
    let mut best: Option<ChainBest> = None;
    let mut best_size = 0u32;
    let mut checked = 0u64;
    for &i0 in &order {
        let d0 = sets[i0 as usize];
        let s0 = d0.count_ones();
        if d0 & problem.required[0] != problem.required[0] {
            continue;
        }
        if best.is_some() && 3 * s0 <= best_size {
            break; // slices only shrink from here on
        }
        let p0 = &present[0][i0 as usize * blocks..(i0 as usize + 1) * blocks];
        for &i1 in &subs[i0 as usize] {
            let d1 = sets[i1 as usize];
            let s1 = d1.count_ones();
            if d1 & problem.required[1] != problem.required[1] {
                continue;
            }
            if best.is_some() && s0 + 2 * s1 <= best_size {
                break;
            }
            let p1 = &present[1][i1 as usize * blocks..(i1 as usize + 1) * blocks];
            for &i2 in &subs[i1 as usize] {
                let d2 = sets[i2 as usize];
                let s2 = d2.count_ones();
                if d2 & problem.required[2] != problem.required[2] {
                    continue;
                }
                if best.is_some() && s0 + s1 + s2 <= best_size {
                    break;
                }
                checked += 1;
                let p2 = &present[2][i2 as usize * blocks..(i2 as usize + 1) * blocks];
                let clean = (0..blocks).all(|b| p0[b] & p1[b] & p2[b] == 0);
                if clean {
                    best_size = s0 + s1 + s2;
                    best = Some(ChainBest {
                        present_cells: best_size,
                        slices: [d0, d1, d2],
                        chains_checked: 0,
                    });
                }
            }
        }
    }
    best.map(|mut b| {
        b.chains_checked = checked;
        b
    })
}

/// Convert slice masks back to cells of `[4]^4`.
pub fn chain_to_cells(slices: &[u32; 3]) -> CellSet {
    let mut cells = CellSet::empty(4);
    for (w, &mask) in slices.iter().enumerate() {
        for bit in 0..27 {
            if mask >> bit & 1 == 1 {
                let (x, y, z) = (bit % 3, bit / 3 % 3, bit / 9);
                cells.insert(&Point::new(
                    4,
                    &[w as u8 + 1, x as u8 + 1, y as u8 + 1, z as u8 + 1],
                ));
            }
        }
    }
    cells
}

fn chain_problem_for(inst: &HittingInstance) -> ChainProblem {
    let mut required = [0u32; 3];
    for idx in inst.protected.iter_indices() {
        let p = Point::from_index(4, idx);
        if p.coords.iter().any(|&c| c == 0) {
            continue; // off-cube cells are absent from cube missing sets anyway
        }
        let (w, x, y, z) = (p.coords[0], p.coords[1], p.coords[2], p.coords[3]);
        required[w as usize - 1] |=
            1 << ((x as usize - 1) + 3 * (y as usize - 1) + 9 * (z as usize - 1));
    }
    let clauses = inst
        .clauses
        .iter()
        .map(|cl| {
            let mut slots = [0u32; 3];
            for &c in cl {
                let p = Point::from_index(4, c);
                assert!(p.coords.iter().all(|&v| v >= 1), "clause leaves the cube");
                let w = p.coords[0] as usize - 1;
                let bit = (p.coords[1] as usize - 1)
                    + 3 * (p.coords[2] as usize - 1)
                    + 9 * (p.coords[3] as usize - 1);
                assert_eq!(slots[w], 0, "two clause cells share a slice");
                slots[w] = 1 << bit;
            }
            assert!(slots.iter().all(|&s| s != 0));
            slots
        })
        .collect();
    ChainProblem { required, clauses }
}

/// Exact minimum missing-set size of a cube-restricted instance by complete
/// chain enumeration — no branch-and-bound involved. `None` means infeasible.
pub fn exhaustive_upper_minimum(inst: &HittingInstance) -> Option<u32> {
    sweep_chains(&chain_problem_for(inst)).map(|b| 81 - b.present_cells)
}

/// The standalone cube bound and its witness.
pub struct BlockerReport {
    /// Largest present down-set compatible with the core constraints.
    pub max_present: u32,
    /// Its complement size: every missing set meeting the cube constraints
    /// has at least this many cells there.
    pub min_blocker: u32,
    /// A maximum present set, as cells of `[4]^4`.
    pub witness_present: CellSet,
    pub chains_checked: u64,
}

/// Maximise the present down-set of the inner cube under the core
/// constraints, and recheck the complement with the independent verifier.
pub fn upper_blocker_minimum() -> BlockerReport {
    let restricted = HittingInstance::base().restricted_to_upper();
    let best = sweep_chains(&chain_problem_for(&restricted)).expect("core cube sweep is feasible");
    let witness_present = chain_to_cells(&best.slices);
    assert_eq!(witness_present.len(), best.present_cells);

    // Complement inside the cube = the smallest witnessed missing set.
    let mut missing = CellSet::empty(4);
    for idx in 0..lattice::cell_count(4) {
        let p = Point::from_index(4, idx);
        if p.coords.iter().all(|&c| c >= 1) && !witness_present.contains_index(idx) {
            missing.insert_index(idx);
        }
    }
    assert!(
        hitting::verify_missing_set(&restricted, &missing),
        "blocker complement failed the independent recheck"
    );
    BlockerReport {
        max_present: best.present_cells,
        min_blocker: 81 - best.present_cells,
        witness_present,
        chains_checked: best.chains_checked,
    }
}
