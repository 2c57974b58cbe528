//! Development helper: verify the hand-written data files and generate the
//! computed ones (PSL2(11) inside M12, the 144-point coset action, and the
//! degree-6 census extras).

use gelfand::catalog::{coset_action, subsets_action};
use gelfand::perm::{
    alternating_group, symmetric_group, GroupPair, PairFile, PermGroup, Permutation,
};

fn check(name: &str, text: &str, order: u128, transitive: bool) -> PermGroup {
    let pf = PairFile::parse(text).unwrap();
    let g = PermGroup::from_generators(pf.degree, pf.generators).unwrap();
    println!(
        "{}: degree {} order {} transitive {}",
        name,
        g.degree(),
        g.order(),
        g.is_transitive()
    );
    assert_eq!(g.order(), order, "{} order mismatch", name);
    assert_eq!(g.is_transitive(), transitive);
    g
}

fn main() {
    let data = |n: &str| std::fs::read_to_string(format!("crates/gelfand/data/{}", n)).unwrap();

    check("a4", &data("a4_natural.pair"), 12, true);
    check("a5", &data("a5_natural.pair"), 60, true);
    check("a6", &data("a6_natural.pair"), 360, true);
    check("a7", &data("a7_natural.pair"), 2520, true);
    check("psl25", &data("psl25.pair"), 60, true);
    check("pgl25", &data("pgl25.pair"), 120, true);
    check("psl32", &data("psl32.pair"), 168, true);
    let s4f = check("s4_faces", &data("s4_faces.pair"), 24, true);
    println!("  s4_faces stabilizer order {}", s4f.stabilizer(0).unwrap().order());
    check("z2xa4", &data("z2xa4_faces.pair"), 24, true);
    check("t10", &data("t10_deg6.pair"), 36, true);
    check("m11", &data("m11.pair"), 7920, true);
    let m12 = check("m12", &data("m12.pair"), 95040, true);

    // --- PSL2(11) inside M12: an order-11 element and an involution y with
    // |<x, y>| = 660 (any subgroup of M12 containing Z_11 and an involution
    // and of order 660 is PSL2(11))
    let mut state = 0x12d0u64;
    let x = loop {
        let g = m12.random_element(&mut state);
        if g.order() % 11 == 0 {
            let mut p = g.clone();
            let mut pow = g.order() / 11;
            let mut acc = Permutation::identity(12);
            // p^(order/11)
            while pow > 0 {
                if pow & 1 == 1 {
                    acc = acc.compose(&p);
                }
                p = p.compose(&p);
                pow >>= 1;
            }
            if acc.order() == 11 {
                break acc;
            }
        }
    };
    println!("found order-11 element {}", x.cycle_string());
    let mut found = None;
    let mut count = 0u64;
    m12.for_each_element(200_000, &mut |y| {
        if found.is_some() || y.order() != 2 {
            return;
        }
        count += 1;
        let h = PermGroup::from_generators(12, vec![x.clone(), y.clone()]).unwrap();
        if h.order() == 660 {
            found = Some(y.clone());
        }
    });
    let y = found.expect("an involution generating PSL2(11) with x");
    println!("involution {} after scanning {} involutions", y.cycle_string(), count);
    let psl = PermGroup::from_generators(12, vec![x.clone(), y.clone()]).unwrap();
    assert_eq!(psl.order(), 660);
    let psl_file = PairFile {
        degree: 12,
        generators: vec![x.clone(), y.clone()],
        base_point: 0,
    };
    let body = format!(
        "# PSL(2,11) of order 660 inside the shipped M12 generators, located by\n# closure search over the standard generators; validated at load.\n{}",
        psl_file.format()
    );
    std::fs::write("crates/gelfand/data/psl2_11_in_m12.pair", body).unwrap();

    // --- coset action of M12 on the 144 cosets of PSL2(11)
    let pair = coset_action(&m12, &psl).unwrap();
    println!(
        "coset action: degree {} order {} stabilizer {}",
        pair.degree(),
        pair.group().order(),
        pair.stabilizer().order()
    );
    assert_eq!(pair.degree(), 144);
    assert_eq!(pair.group().order(), 95040);
    assert_eq!(pair.stabilizer().order(), 660);
    let coset_file = PairFile {
        degree: 144,
        generators: pair.group().generators().to_vec(),
        base_point: pair.base_point(),
    };
    let body = format!(
        "# M12 acting on the 144 cosets of PSL(2,11): images of the three m12.pair\n# generators under the coset action (regenerate with catalog::coset_action);\n# validated at load by order, transitivity and stabilizer order.\n{}",
        coset_file.format()
    );
    std::fs::write("crates/gelfand/data/m12_psl211_cosets.pair", body).unwrap();

    // --- (diagonal Z_3, Z_3 x S_3) on 6 points
    // Z_3 x S_3 as permutations of 3 + 3 points; H = diagonal Z_3
    let gens = vec![
        Permutation::parse_cycles("(1 2 3)", 6).unwrap(),
        Permutation::parse_cycles("(4 5)", 6).unwrap(),
        Permutation::parse_cycles("(4 5 6)", 6).unwrap(),
    ];
    let z3xs3 = PermGroup::from_generators(6, gens).unwrap();
    assert_eq!(z3xs3.order(), 18);
    let diag = PermGroup::from_generators(
        6,
        vec![Permutation::parse_cycles("(1 2 3)(4 5 6)", 6).unwrap()],
    )
    .unwrap();
    let pair = coset_action(&z3xs3, &diag).unwrap();
    println!(
        "z3xs3: degree {} order {} stabilizer {}",
        pair.degree(),
        pair.group().order(),
        pair.stabilizer().order()
    );
    assert_eq!(pair.degree(), 6);
    assert_eq!(pair.group().order(), 18);
    let f = PairFile {
        degree: 6,
        generators: pair.group().generators().to_vec(),
        base_point: pair.base_point(),
    };
    let body = format!(
        "# Z_3 x S_3 of order 18 acting on the cosets of a diagonal Z_3\n# (regenerate with catalog::coset_action).\n{}",
        f.format()
    );
    std::fs::write("crates/gelfand/data/z3xs3.pair", body).unwrap();

    // --- A_4 on the six 2-subsets of {1..4}
    let pair = subsets_action(&alternating_group(4), 2).unwrap();
    println!(
        "a4_pairs: degree {} order {} stabilizer {}",
        pair.degree(),
        pair.group().order(),
        pair.stabilizer().order()
    );
    assert_eq!(pair.group().order(), 12);
    let f = PairFile {
        degree: 6,
        generators: pair.group().generators().to_vec(),
        base_point: pair.base_point(),
    };
    let body = format!("# A_4 acting on the 2-subsets of its points.\n{}", f.format());
    std::fs::write("crates/gelfand/data/a4_pairs.pair", body).unwrap();

    // --- ({1}, S_3) regular
    let pair = GroupPair::regular(&symmetric_group(3)).unwrap();
    let f = PairFile {
        degree: 6,
        generators: pair.group().generators().to_vec(),
        base_point: pair.base_point(),
    };
    let body = format!(
        "# S_3 acting on itself by left translations (not a Gelfand pair).\n{}",
        f.format()
    );
    std::fs::write("crates/gelfand/data/s3_regular.pair", body).unwrap();

    println!("data files written");
}
