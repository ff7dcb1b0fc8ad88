//! Timing probes for the missing-set searches. All ignored by default; the
//! real suite lives in `notopstar.rs`.

use std::time::Instant;

use quadcert::lattice::SupportedTrace;
use quadcert::notopstar::{self, HittingInstance};

fn probe_trace(support: &[u8], value: &[u8], cap: u32) {
    let trace = SupportedTrace::new(support, value);
    let inst = HittingInstance::for_trace(&trace);
    let start = Instant::now();
    let outcome = notopstar::min_missing(&inst, cap);
    println!(
        "{}: cap={} min={:?} nodes={} elapsed={:.1?}",
        inst.label,
        cap,
        outcome.best.as_ref().map(|(s, _)| *s),
        outcome.nodes,
        start.elapsed()
    );
}

#[test]
#[ignore = "timing probe"]
fn probe_blocker() {
    let start = Instant::now();
    let report = notopstar::upper_blocker_minimum();
    println!(
        "blocker: max_present={} min_blocker={} chains={} elapsed={:.1?}",
        report.max_present,
        report.min_blocker,
        report.chains_checked,
        start.elapsed()
    );
}

#[test]
#[ignore = "timing probe"]
fn probe_bottom_triple() {
    probe_trace(&[0, 1, 2], &[0, 0, 0], 64);
}

#[test]
#[ignore = "timing probe"]
fn probe_bottom_pair() {
    probe_trace(&[0, 1], &[0, 0], 64);
}

#[test]
#[ignore = "timing probe"]
fn probe_low_pair() {
    probe_trace(&[0, 1], &[0, 1], 64);
}

#[test]
#[ignore = "timing probe"]
fn probe_mid_triple() {
    probe_trace(&[0, 1, 2], &[1, 1, 0], 64);
}

#[test]
#[ignore = "timing probe"]
fn probe_thresholds() {
    let start = Instant::now();
    let thresholds = quadcert::notopstar::trace_thresholds();
    for t in &thresholds {
        println!(
            "{}: min={:?} nodes={}",
            t.orbit.rep.label(),
            t.minimum,
            t.nodes
        );
    }
    println!("thresholds total elapsed={:.1?}", start.elapsed());
    let table = quadcert::notopstar::combine_thresholds(&thresholds);
    println!("table rows={} tight={:?}", table.rows.len(), table.tight);
}

#[test]
#[ignore = "timing probe"]
fn probe_assembly() {
    let start = Instant::now();
    let report = notopstar::assemble_no_topstar();
    println!(
        "assembly: tight={:?} mismatches={:?} markers={:?} elapsed={:.1?}",
        report.table.tight,
        report.table.reference_mismatches,
        report.markers(),
        start.elapsed()
    );
}

#[test]
#[ignore = "timing probe"]
fn probe_patterns() {
    let start = Instant::now();
    for check in quadcert::notopstar::critical_pattern_checks() {
        println!(
            "{}: cap={} min={:?} expected={:?} nodes={} ok={}",
            check.name, check.cap, check.minimum, check.expected, check.nodes,
            check.ok()
        );
    }
    println!("patterns total elapsed={:.1?}", start.elapsed());
}

#[test]
#[ignore = "timing probe"]
fn probe_oracle_agreement() {
    for value in [[0u8, 2, 3], [1, 1, 1], [1, 1, 2], [0, 0, 0], [0, 1, 1]] {
        let trace = SupportedTrace::new(&[0, 1, 2], &value);
        let inst = HittingInstance::for_trace(&trace).restricted_to_upper();
        let oracle = quadcert::notopstar::exhaustive_upper_minimum(&inst);
        let cap = oracle.map_or(82, |v| v + 1);
        let bb = quadcert::notopstar::min_missing(&inst, cap);
        println!(
            "{}: oracle={:?} bb={:?} nodes={}",
            inst.label,
            oracle,
            bb.best.as_ref().map(|(s, _)| *s),
            bb.nodes
        );
    }
}

#[test]
#[ignore = "timing probe"]
fn probe_shape_hypotheses() {
    // Which of the three mid classes, added to the m<=48 usable set, admits a
    // legal 26-cell shape?
    let base: Vec<[u8; 3]> = vec![
        [0, 0, 0],
        [0, 0, 1],
        [0, 0, 2],
        [0, 0, 3],
        [0, 1, 1],
        [0, 1, 2],
        [0, 1, 3],
        [0, 2, 2],
    ];
    let mids: Vec<[u8; 3]> = vec![[0, 2, 3], [1, 1, 1], [1, 1, 2]];
    let mask_for = |classes: &[[u8; 3]]| -> u64 {
        let mut mask = 0u64;
        for v in 0..64usize {
            let mut key = [
                (v & 3) as u8,
                ((v >> 2) & 3) as u8,
                ((v >> 4) & 3) as u8,
            ];
            key.sort_unstable();
            if classes.contains(&key) {
                mask |= 1u64 << v;
            }
        }
        mask
    };
    let best = |usable: u64| -> u32 {
        quadcert::ferrers::legal_shapes()
            .triple
            .iter()
            .find(|(m, _)| m & !usable == 0)
            .map(|&(_, s)| s)
            .unwrap_or(0)
    };
    let base_mask = mask_for(&base);
    println!("base(mu<=48): {}", best(base_mask));
    for sel in 1u32..8 {
        let mut classes = base.clone();
        let mut names = Vec::new();
        for (bit, mid) in mids.iter().enumerate() {
            if sel & (1 << bit) != 0 {
                classes.push(*mid);
                names.push(format!("{:?}", mid));
            }
        }
        println!("base+{}: {}", names.join("+"), best(mask_for(&classes)));
    }
}

#[test]
#[ignore = "timing probe"]
fn probe_witness_structure() {
    for value in [[0u8, 2, 3], [1, 1, 1], [1, 1, 2]] {
        let trace = SupportedTrace::new(&[0, 1, 2], &value);
        let inst = HittingInstance::for_trace(&trace);
        let outcome = notopstar::min_missing(&inst, 64);
        let (size, witness) = outcome.best.expect("feasible");
        let mut in_upper = 0;
        let mut by_zero_count = [0u32; 5];
        for idx in witness.iter_indices() {
            let p = quadcert::lattice::Point::from_index(4, idx);
            let zeros = p.coords.iter().filter(|&&c| c == 0).count();
            by_zero_count[zeros] += 1;
            if zeros == 0 {
                in_upper += 1;
            }
        }
        println!(
            "{:?}: size={} in_cube={} by_zero_count={:?}",
            value, size, in_upper, by_zero_count
        );
    }
}

#[test]
#[ignore = "timing probe"]
fn probe_lp_lower_bound() {
    // Independent fractional lower bound on the full-lattice missing-set
    // minimum: prove -sum(x) <= -L over the up-set + protection + clause
    // relaxation, i.e. every feasible set has size >= L.
    use quadcert::lp::{self, Row};
    use quadcert::rat::Rat;

    for (value, target) in [([0u8, 2, 3], 51u32), ([1, 1, 1], 51), ([1, 1, 2], 51)] {
        let trace = SupportedTrace::new(&[0, 1, 2], &value);
        let inst = HittingInstance::for_trace(&trace);
        let n = 256usize;
        let objective = vec![-Rat::one(); n];
        let names: Vec<String> = (0..n).map(|i| format!("x{}", i)).collect();
        let mut sys = lp::RationalSystem::new(
            names,
            objective,
            Rat::from_int(-(target as i64)),
        );
        for (k, clause) in inst.clauses.iter().enumerate() {
            let coeffs = clause.iter().map(|&c| (c, -Rat::one())).collect();
            sys.push_row(Row::new(format!("clause{}", k), coeffs, -Rat::one()));
        }
        let mut e = 0usize;
        for idx in 0..n {
            let p = quadcert::lattice::Point::from_index(4, idx);
            for axis in 0..4 {
                if p.coords[axis] < 3 {
                    let mut q = p.clone();
                    q.coords[axis] += 1;
                    sys.push_row(Row::new(
                        format!("up{}", e),
                        vec![(idx, Rat::one()), (q.index(), -Rat::one())],
                        Rat::zero(),
                    ));
                    e += 1;
                }
            }
        }
        for (k, idx) in inst.protected.iter_indices().enumerate() {
            sys.push_row(Row::new(
                format!("protect{}", k),
                vec![(idx, Rat::one())],
                Rat::zero(),
            ));
        }
        let start = Instant::now();
        let outcome = lp::solve::prove_bound(&mut sys, |_| Vec::new(), 2_000_000)
            .expect("lp run");
        match outcome {
            lp::solve::BoundOutcome::Certified(_) => {
                println!("{:?}: size >= {} certified in {:.1?}", value, target, start.elapsed());
            }
            lp::solve::BoundOutcome::BoundViolated { objective, .. } => {
                println!(
                    "{:?}: relaxation reaches sum(x) = {} (< {}) in {:.1?}",
                    value,
                    -objective.to_f64(),
                    target,
                    start.elapsed()
                );
            }
            lp::solve::BoundOutcome::Infeasible(_) => println!("{:?}: infeasible?!", value),
        }
    }
}

#[test]
#[ignore = "timing probe"]
fn probe_lp_with_cuts() {
    // Strengthen the relaxation for the symmetric trace (1,1,1) with three
    // valid cuts, each certified by exhaustive down-set chain enumeration:
    // the upper-cube blocker bound, and the blocker-type bound on the two
    // residual sub-cubes avoiding one low value per column.
    use quadcert::lattice::{CellSet, Point};
    use quadcert::lp::{self, Row};
    use quadcert::rat::Rat;

    // Blocker-type bound without the unit-top protections.
    let bare = HittingInstance {
        label: "bare-upper".into(),
        protected: CellSet::empty(4),
        clauses: quadcert::clauses::upper_matching_clauses().clone(),
    };
    let b0 = quadcert::notopstar::exhaustive_upper_minimum(&bare).expect("feasible");
    println!("bare 3^4 blocker minimum: {}", b0);

    let sub_cube = |col_vals: [[u8; 4]; 4]| -> CellSet {
        let mut set = CellSet::empty(4);
        for idx in 0..256usize {
            let p = Point::from_index(4, idx);
            let inside = (0..4).all(|j| col_vals[j][..3].contains(&p.coords[j]));
            if inside {
                set.insert_index(idx);
            }
        }
        set
    };
    // residual value sets for trace (1,1,1): seed u in column 3
    let w0 = sub_cube([[0, 2, 3, 0], [0, 2, 3, 0], [0, 2, 3, 0], [1, 2, 3, 0]]);
    let w1 = sub_cube([[0, 2, 3, 0], [0, 2, 3, 0], [0, 2, 3, 0], [0, 2, 3, 0]]);
    let upper = {
        let mut set = CellSet::empty(4);
        for idx in 0..256usize {
            let p = Point::from_index(4, idx);
            if p.coords.iter().all(|&c| c >= 1) {
                set.insert_index(idx);
            }
        }
        set
    };
    assert_eq!(w0.len(), 81);
    assert_eq!(w1.len(), 81);

    let trace = SupportedTrace::new(&[0, 1, 2], &[1, 1, 1]);
    let inst = HittingInstance::for_trace(&trace);
    for target in [51i64, 52, 53, 54, 55, 56] {
        let n = 256usize;
        let names: Vec<String> = (0..n).map(|i| format!("x{}", i)).collect();
        let mut sys =
            lp::RationalSystem::new(names, vec![-Rat::one(); n], Rat::from_int(-target));
        for (k, clause) in inst.clauses.iter().enumerate() {
            let coeffs = clause.iter().map(|&c| (c, -Rat::one())).collect();
            sys.push_row(Row::new(format!("clause{}", k), coeffs, -Rat::one()));
        }
        let mut e = 0usize;
        for idx in 0..n {
            let p = Point::from_index(4, idx);
            for axis in 0..4 {
                if p.coords[axis] < 3 {
                    let mut q = p.clone();
                    q.coords[axis] += 1;
                    sys.push_row(Row::new(
                        format!("up{}", e),
                        vec![(idx, Rat::one()), (q.index(), -Rat::one())],
                        Rat::zero(),
                    ));
                    e += 1;
                }
            }
        }
        for (k, idx) in inst.protected.iter_indices().enumerate() {
            sys.push_row(Row::new(
                format!("protect{}", k),
                vec![(idx, Rat::one())],
                Rat::zero(),
            ));
        }
        for (name, region, bound) in [
            ("cut-upper", &upper, 33i64),
            ("cut-w0", &w0, b0 as i64),
            ("cut-w1", &w1, b0 as i64),
        ] {
            let coeffs = region.iter_indices().map(|i| (i, -Rat::one())).collect();
            sys.push_row(Row::new(name, coeffs, Rat::from_int(-bound)));
        }
        let start = Instant::now();
        let outcome =
            lp::solve::prove_bound(&mut sys, |_| Vec::new(), 2_000_000).expect("lp run");
        match outcome {
            lp::solve::BoundOutcome::Certified(_) => {
                println!("(1,1,1): size >= {} certified in {:.1?}", target, start.elapsed());
            }
            lp::solve::BoundOutcome::BoundViolated { objective, .. } => {
                println!(
                    "(1,1,1): relaxation reaches {} (< {}) in {:.1?}",
                    -objective.to_f64(),
                    target,
                    start.elapsed()
                );
                break;
            }
            lp::solve::BoundOutcome::Infeasible(_) => println!("infeasible?!"),
        }
    }
}

#[test]
#[ignore = "timing probe"]
fn probe_protection_ablations() {
    use quadcert::lattice::CellSet;
    for value in [[0u8, 2, 3], [1, 1, 1], [1, 1, 2]] {
        let trace = SupportedTrace::new(&[0, 1, 2], &value);
        let full = HittingInstance::for_trace(&trace);
        // keep closure extension cells, drop the four unit-top cells
        let mut no_unit_top = full.clone();
        no_unit_top.protected = trace.extension_cells();
        // drop all protection
        let mut bare = full.clone();
        bare.protected = CellSet::empty(4);
        let f = notopstar::min_missing(&full, 64);
        let a = notopstar::min_missing(&no_unit_top, 64);
        let b = notopstar::min_missing(&bare, 64);
        println!(
            "{:?}: full={:?} no_unit_top={:?} bare={:?}",
            value,
            f.best.as_ref().map(|x| x.0),
            a.best.as_ref().map(|x| x.0),
            b.best.as_ref().map(|x| x.0),
        );
    }
}

#[test]
#[ignore = "timing probe"]
fn probe_randomized_restarts() {
    // Re-solve the contested instances under instance automorphisms (support
    // relabelings) and shuffled clause orders; all runs must agree that no
    // set smaller than 56 exists.
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for value in [[0u8, 2, 3], [1, 1, 1], [1, 1, 2]] {
        for support in quadcert::lattice::triple_supports() {
            let trace = SupportedTrace::new(&support, &value);
            let base = HittingInstance::for_trace(&trace);
            for round in 0..6 {
                let mut inst = base.clone();
                inst.clauses.shuffle(&mut rng);
                let outcome = notopstar::min_missing(&inst, 56);
                assert!(
                    outcome.best.is_none(),
                    "{:?} on {:?} round {} found {:?}",
                    value,
                    support,
                    round,
                    outcome.best.map(|x| x.0)
                );
            }
        }
    }
    println!("all restarts agree: nothing below 56");
}

#[test]
#[ignore = "timing probe"]
fn probe_single_seed() {
    // Rebuild the three contested instances keeping only the residual clauses
    // of one seed at a time.
    use quadcert::clauses::{residual_matchings, seeds_for, upper_matching_clauses};
    for value in [[0u8, 2, 3], [1, 1, 1], [1, 1, 2]] {
        let trace = SupportedTrace::new(&[0, 1, 2], &value);
        let full = HittingInstance::for_trace(&trace);
        for seed in seeds_for(&trace) {
            let residual = residual_matchings(&trace, &seed);
            if residual.is_empty() {
                continue;
            }
            let mut inst = full.clone();
            inst.clauses = upper_matching_clauses().clone();
            let mut set: std::collections::BTreeSet<_> =
                inst.clauses.iter().copied().collect();
            set.extend(residual.iter().copied());
            inst.clauses = set.into_iter().collect();
            let outcome = notopstar::min_missing(&inst, 64);
            println!(
                "{:?} seed(col={},u={}): clauses={} min={:?} nodes={}",
                value,
                seed.column,
                seed.low_value,
                inst.clauses.len(),
                outcome.best.as_ref().map(|x| x.0),
                outcome.nodes
            );
        }
    }
}

#[test]
#[ignore = "timing probe"]
fn probe_bb_completeness() {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    let trace = SupportedTrace::new(&[0, 1, 2], &[1, 1, 1]);
    let source = HittingInstance::for_trace(&trace);
    let up = quadcert::lattice::up_closure_table();
    let mut rng = ChaCha8Rng::seed_from_u64(20260813);
    let mut worst_gap = 0i64;
    for round in 0..2000 {
        let k = rng.gen_range(3..=9usize);
        let mut clauses: Vec<_> = source
            .clauses
            .choose_multiple(&mut rng, k)
            .copied()
            .collect();
        clauses.sort_unstable();
        let mut sub = source.clone();
        sub.clauses = clauses.clone();
        // Brute force over one witness cell per clause.
        let mut brute: Option<u32> = None;
        let mut combo = vec![0usize; k];
        'outer: loop {
            let mut union = quadcert::lattice::CellSet::empty(4);
            let mut ok = true;
            for (ci, &pick) in combo.iter().enumerate() {
                let cell = clauses[ci][pick];
                if up[cell].intersects(&sub.protected) {
                    ok = false;
                    break;
                }
                union = union.union(&up[cell]);
            }
            if ok {
                let size = union.len();
                if brute.map_or(true, |b| size < b) {
                    brute = Some(size);
                }
            }
            for slot in combo.iter_mut() {
                *slot += 1;
                if *slot < 3 {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
        let cap = brute.map_or(257, |b| b + 1);
        let bb = notopstar::min_missing(&sub, cap);
        let got = bb.best.as_ref().map(|x| x.0);
        if got != brute {
            println!(
                "round {} k={} brute={:?} bb={:?} clauses={:?}",
                round, k, brute, got, clauses
            );
            worst_gap += 1;
        }
    }
    println!("completeness mismatches: {}", worst_gap);
    assert_eq!(worst_gap, 0);
}

#[test]
#[ignore = "timing probe"]
fn probe_ablations() {
    for value in [[0u8, 2, 3], [1, 1, 1], [1, 1, 2]] {
        let trace = SupportedTrace::new(&[0, 1, 2], &value);
        let full = HittingInstance::for_trace(&trace);
        let residual_only: Vec<_> = full.clauses.clone();
        // (a) keep closure protection, drop residual clauses
        let mut no_residual = full.clone();
        no_residual.clauses = quadcert::clauses::upper_matching_clauses().clone();
        // (b) keep clauses, drop closure protection
        let mut no_closure = full.clone();
        no_closure.protected = HittingInstance::base().protected.clone();
        let a = quadcert::notopstar::min_missing(&no_residual, 64);
        let b = quadcert::notopstar::min_missing(&no_closure, 64);
        let f = quadcert::notopstar::min_missing(&full, 64);
        println!(
            "{:?}: full={:?} no_residual={:?} no_closure={:?} clauses={}",
            value,
            f.best.as_ref().map(|x| x.0),
            a.best.as_ref().map(|x| x.0),
            b.best.as_ref().map(|x| x.0),
            residual_only.len(),
        );
    }
}
