//! End-to-end acceptance gate: one pass/fail line per criterion.

mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use cloops::ext::{build_c, build_cbar, build_pa64, build_theta_doubleprime, build_theta_t};
use cloops::iso::are_isomorphic;
use cloops::modify::{
    build_chmu, group64_classes, DeltaMuParams, Group64, TrilinearForm, E1, E2, E3, M12,
    M13, M23,
};
use cloops::perm::{inn_is_abelian, inn_is_elementary_abelian_2, multiplication_group};
use cloops::report::AnalysisReport;
use cloops::table::{LoopTable, SubloopMask};

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn masks_equal(a: &SubloopMask, b: &SubloopMask) -> bool {
    a.iter().collect::<Vec<_>>() == b.iter().collect::<Vec<_>>()
}

fn elementary_abelian_subloop(q: &LoopTable, s: &SubloopMask) -> bool {
    s.iter().all(|x| q.mul(x, x) == 0)
        && s.iter().all(|x| s.iter().all(|y| q.mul(x, y) == q.mul(y, x)))
}

fn criterion_01() -> Result<(), String> {
    let c = build_c();
    let r = AnalysisReport::analyze(&c, true);
    ensure!(r.order == 128, "order {} != 128", r.order);
    ensure!(r.nilpotency_class == Some(3), "class {:?} != 3", r.nilpotency_class);
    ensure!(r.inn_abelian, "Inn is not abelian");
    let nuclei = c.nuclei();
    ensure!(
        masks_equal(&nuclei.full, &nuclei.right),
        "N differs from the right nucleus"
    );
    ensure!(nuclei.full.len() == 16, "|N| = {} != 16", nuclei.full.len());
    ensure!(
        elementary_abelian_subloop(&c, &nuclei.full),
        "N is not elementary abelian"
    );
    ensure!(nuclei.left.len() == 32, "|N_l| = {} != 32", nuclei.left.len());
    ensure!(nuclei.middle.len() == 32, "|N_m| = {} != 32", nuclei.middle.len());
    let center = c.center();
    ensure!(center.len() == 2, "|Z| = {} != 2", center.len());
    ensure!(
        masks_equal(&center, &c.associator_subloop()),
        "Z differs from the associator subloop"
    );
    ensure!(
        r.mlt_order.as_deref() == Some("8192"),
        "|Mlt| = {:?} != 8192",
        r.mlt_order
    );
    ensure!(r.inn_order.as_deref() == Some("64"), "|Inn| = {:?} != 64", r.inn_order);
    Ok(())
}

fn criterion_02() -> Result<(), String> {
    let cbar = build_cbar();
    let r = AnalysisReport::analyze(&cbar, false);
    ensure!(r.nucleus_size == 16, "|N| = {} != 16", r.nucleus_size);
    for (label, size) in [
        ("left", r.nucleus_left_size),
        ("middle", r.nucleus_middle_size),
        ("right", r.nucleus_right_size),
    ] {
        ensure!(size == 64, "|N_{label}| = {size} != 64");
    }
    ensure!(r.center_size == 2, "|Z| = {} != 2", r.center_size);
    ensure!(r.nilpotency_class == Some(3), "class {:?} != 3", r.nilpotency_class);
    ensure!(r.inn_abelian, "Inn is not abelian");
    ensure!(
        are_isomorphic(&cbar, &build_c()).is_none(),
        "Cbar is isomorphic to C"
    );
    Ok(())
}

fn criterion_03() -> Result<(), String> {
    let classified: Vec<(usize, u8)> = (0..128usize)
        .into_par_iter()
        .map(|t| {
            let q = build_theta_t(t);
            let tag = if q.is_associative() {
                0
            } else if q.nilpotency_class() == Some(3) && inn_is_abelian(&q) {
                1
            } else {
                2
            };
            (t, tag)
        })
        .collect();
    let groups: Vec<usize> =
        classified.iter().filter(|&&(_, c)| c == 0).map(|&(t, _)| t).collect();
    let loops: Vec<usize> =
        classified.iter().filter(|&&(_, c)| c == 1).map(|&(t, _)| t).collect();
    ensure!(groups == vec![32, 34, 40, 42], "group t-values {groups:?}");
    ensure!(loops == vec![1, 3, 9, 11, 33, 35, 41, 43], "loop t-values {loops:?}");
    let g32 = build_theta_t(32);
    let bad: Vec<usize> = groups
        .par_iter()
        .filter(|&&t| are_isomorphic(&build_theta_t(t), &g32).is_none())
        .cloned()
        .collect();
    ensure!(bad.is_empty(), "groups not isomorphic to t=32: {bad:?}");
    let cbar = build_cbar();
    let bad: Vec<usize> = loops
        .par_iter()
        .filter(|&&t| are_isomorphic(&build_theta_t(t), &cbar).is_none())
        .cloned()
        .collect();
    ensure!(bad.is_empty(), "loops not isomorphic to Cbar: {bad:?}");
    Ok(())
}

fn criterion_04() -> Result<(), String> {
    let q = build_theta_doubleprime();
    ensure!(
        q.nilpotency_class() == Some(3),
        "class {:?} != 3",
        q.nilpotency_class()
    );
    ensure!(inn_is_abelian(&q), "Inn is not abelian");
    ensure!(are_isomorphic(&q, &build_c()).is_none(), "isomorphic to C");
    ensure!(are_isomorphic(&q, &build_cbar()).is_none(), "isomorphic to Cbar");
    Ok(())
}

fn criterion_05() -> Result<(), String> {
    let q = build_pa64();
    ensure!(q.order() == 64, "order {} != 64", q.order());
    ensure!(!q.is_associative(), "associative");
    ensure!(q.is_power_associative(), "not power-associative");
    let nuclei = q.nuclei();
    let union = nuclei.left.union(&nuclei.middle).union(&nuclei.right);
    ensure!(union.len() == 64, "nuclei cover {} of 64 elements", union.len());
    ensure!(nuclei.full.len() == 16, "|N| = {} != 16", nuclei.full.len());
    for (label, mask) in
        [("left", &nuclei.left), ("middle", &nuclei.middle), ("right", &nuclei.right)]
    {
        ensure!(mask.len() == 32, "|N_{label}| = {} != 32", mask.len());
    }
    Ok(())
}

fn criterion_06() -> Result<(), String> {
    let classes = group64_classes();
    ensure!(classes.len() == 10, "{} isomorphism classes != 10", classes.len());
    let total: usize = classes.iter().map(|c| c.members.len()).sum();
    ensure!(total == 512, "class members sum to {total} != 512");
    ensure!(
        classes[0].rep.s == [0, 0, 0],
        "class 1 representative {:?}",
        classes[0].rep.s
    );
    // class 1 satisfies the defining presentation
    let t = &classes[0].table;
    for gi in [E1, E2, E3, M12, M13, M23] {
        ensure!(t.mul(gi, gi) == 0, "generator {gi} is not an involution");
    }
    for m in [M12, M13, M23] {
        ensure!((0..64).all(|x| t.mul(m, x) == t.mul(x, m)), "{m} is not central");
    }
    for (a, b, m) in [(E2, E1, M12), (E3, E1, M13), (E3, E2, M23)] {
        let ba = t.mul(a, b);
        ensure!(
            t.mul(t.mul(ba, ba), m) == 0,
            "relation (g g')^2 m = 1 fails for ({a},{b},{m})"
        );
    }
    Ok(())
}

fn criterion_07() -> Result<(), String> {
    let h = Group64::new([0, 0, 0]);
    let q = build_chmu(&h, TrilinearForm { nontrivial: true }, DeltaMuParams::TRIVIAL)
        .map_err(|e| e.to_string())?;
    ensure!(
        are_isomorphic(&q, &build_c()).is_some(),
        "C(H, mu) with trivial parameters is not isomorphic to C"
    );
    Ok(())
}

fn criterion_08() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0DE);
    let f = TrilinearForm { nontrivial: true };
    let mut specs = Vec::new();
    for rep in support::CLASS_REPS {
        for _ in 0..2 {
            let params =
                DeltaMuParams::new(rng.gen_range(0..1 << 21), rng.gen_range(0..1 << 7));
            specs.push((rep, params));
        }
    }
    let failures: Vec<String> = specs
        .par_iter()
        .filter_map(|&(rep, params)| {
            let h = Group64::new(rep);
            let q = match build_chmu(&h, f, params) {
                Ok(q) => q,
                Err(e) => return Some(format!("H = {rep:?}: {e}")),
            };
            if q.order() != 128 {
                return Some(format!("H = {rep:?}: order {}", q.order()));
            }
            let center = q.center();
            if center.len() != 2 || !center.contains(1) {
                return Some(format!("H = {rep:?}: center is not A x 1"));
            }
            if q.nilpotency_class() != Some(3) {
                return Some(format!(
                    "H = {rep:?}: class {:?}",
                    q.nilpotency_class()
                ));
            }
            if !inn_is_elementary_abelian_2(&q) {
                return Some(format!("H = {rep:?}: Inn not elementary abelian 2"));
            }
            None
        })
        .collect();
    ensure!(failures.is_empty(), "{}", failures.join("; "));
    Ok(())
}

fn criterion_09() -> Result<(), String> {
    let h = Group64::new([0, 0, 0]);
    let f = TrilinearForm { nontrivial: true };
    let q0 =
        build_chmu(&h, f, DeltaMuParams::TRIVIAL).map_err(|e| e.to_string())?;
    let m0 = multiplication_group(&q0).order_u64();
    ensure!(m0 == Some(8192), "|Mlt C(H, mu0)| = {m0:?} != 2^13");
    // mu1 flips the single diagonal value mu(t2, t2)
    let q1 =
        build_chmu(&h, f, DeltaMuParams::new(0, 1)).map_err(|e| e.to_string())?;
    let m1 = multiplication_group(&q1).order_u64();
    ensure!(m1 == Some(131072), "|Mlt C(H, mu1)| = {m1:?} != 2^17");
    Ok(())
}

fn criterion_10() -> Result<(), String> {
    let h = Group64::new([0, 0, 0]);
    let f = TrilinearForm { nontrivial: true };
    let loops: Vec<LoopTable> = (0..21u32)
        .into_par_iter()
        .map(|bit| build_chmu(&h, f, DeltaMuParams::new(1 << bit, 0)).unwrap())
        .collect();
    let pairs: Vec<(usize, usize)> =
        (0..21).flat_map(|i| (i + 1..21).map(move |j| (i, j))).collect();
    let iso: Vec<(usize, usize)> = pairs
        .par_iter()
        .filter(|&&(i, j)| are_isomorphic(&loops[i], &loops[j]).is_some())
        .cloned()
        .collect();
    ensure!(iso.is_empty(), "isomorphic pairs {iso:?}");
    Ok(())
}

fn criterion_11() -> Result<(), String> {
    support::lemma_2_1_nuclear_action()?;
    support::theorem_2_2_roundtrip()?;
    support::lemma_3_1_crosshom_equivalence()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    for kind in [0, 1, 2] {
        let ctx = support::seeded_context(&mut rng, kind);
        support::eq7_associator(&ctx)?;
        support::lemma_4_3_translations(&ctx)?;
        support::lemma_4_4_conjugations(&ctx)?;
    }
    support::lemma_4_3_abelian(&support::seeded_context(&mut rng, 0))?;
    let contexts: Vec<_> =
        (0..51).map(|i| support::seeded_context(&mut rng, i % 3)).collect();
    support::inn_class_equivalences(&contexts)?;
    support::associator_mod_nucleus()?;
    support::hall_witt()?;
    support::figure1_block_modification()?;
    Ok(())
}

fn criterion_12() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let h = Group64::new([0, 0, 0]);
    let f = TrilinearForm { nontrivial: true };
    let specs: Vec<(DeltaMuParams, DeltaMuParams)> = (0..50)
        .map(|_| {
            (
                DeltaMuParams::new(rng.gen_range(0..1 << 21), rng.gen_range(0..1 << 7)),
                DeltaMuParams::new(rng.gen_range(0..1 << 21), rng.gen_range(0..1 << 7)),
            )
        })
        .collect();
    let count = specs
        .par_iter()
        .filter(|&&(p1, p2)| {
            let q1 = build_chmu(&h, f, p1).unwrap();
            let q2 = build_chmu(&h, f, p2).unwrap();
            are_isomorphic(&q1, &q2).is_some()
        })
        .count();
    Ok(format!(
        "50 seeded random pairs, {count} isomorphic (reported, not asserted; expected 0)"
    ))
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<String, String>>)> = vec![
        ("C: order 128, class 3, abelian Inn, nuclei 16/32/32, Z = A(Q) of order 2, |Mlt| = 2^13",
         Box::new(|| criterion_01().map(|_| String::new()))),
        ("Cbar: |N| = 16, one-sided nuclei 64, |Z| = 2, class 3, abelian Inn, not isomorphic to C",
         Box::new(|| criterion_02().map(|_| String::new()))),
        ("theta family: groups exactly t in {32,34,40,42}, class-3 abelian-Inn loops exactly t in {1,3,9,11,33,35,41,43}, isomorphic to Gbar / Cbar",
         Box::new(|| criterion_03().map(|_| String::new()))),
        ("theta'': class 3, abelian Inn, isomorphic neither to C nor to Cbar",
         Box::new(|| criterion_04().map(|_| String::new()))),
        ("pa64: order 64, nonassociative, power-associative, nuclei cover Q, |N| = 16, one-sided nuclei 32",
         Box::new(|| criterion_05().map(|_| String::new()))),
        ("groups of order 64: exactly 10 isomorphism classes among 512 squaring vectors; class 1 satisfies the presentation",
         Box::new(|| criterion_06().map(|_| String::new()))),
        ("C(H, mu) with trivial parameters is isomorphic to C",
         Box::new(|| criterion_07().map(|_| String::new()))),
        ("20 seeded random parameter sets across the 10 groups: order 128, Z = A x 1, class 3, Inn elementary abelian 2",
         Box::new(|| criterion_08().map(|_| String::new()))),
        ("|Mlt C(H, mu0)| = 2^13 and |Mlt C(H, mu1)| = 2^17 after flipping mu(t2, t2)",
         Box::new(|| criterion_09().map(|_| String::new()))),
        ("the 21 single-delta-parameter loops are pairwise nonisomorphic",
         Box::new(|| criterion_10().map(|_| String::new()))),
        ("property suites: extension laws, crosshomomorphism equivalence, modified-loop identities, class equivalences, Hall-Witt, block modification",
         Box::new(|| criterion_11().map(|_| String::new()))),
        ("scaled-down random-pairs experiment",
         Box::new(criterion_12)),
    ];
    let mut failed = 0usize;
    for (i, (desc, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(|| f()))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Err(format!("panicked: {msg}"))
            });
        match outcome {
            Ok(note) if note.is_empty() => println!("criterion {:02} PASS — {desc}", i + 1),
            Ok(note) => println!("criterion {:02} PASS — {desc}: {note}", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:02} FAIL — {desc}: {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 12 criteria passed");
}
