//! Acceptance suite: one test per criterion, every comparison exact, with the
//! stated runtime budgets enforced. Each test prints a `PASS criterion N`
//! line on success (visible with `--nocapture`).

use std::time::{Duration, Instant};

use num::bigint::BigInt;
use num::rational::BigRational;

use gelfand::catalog::{
    dual_recipe, dual_search, instantiate, m11_degree22_pair, m12_psl211_pair, mini_catalog,
    parse_recipe, triple_of_recipe, PairRecipe,
};
use gelfand::cli;
use gelfand::cyclo::CycNum;
use gelfand::perm::{alternating_group, symmetric_group, GroupPair};
use gelfand::scheme::OrbitalScheme;
use gelfand::spectral::{build_triple, CharacterTriple, TripleData};
use gelfand::triples::{
    canonical_order, dual_triple, find_isomorphism, integrality_test, self_duality,
    splitting_field,
};

fn int(v: i64) -> CycNum {
    CycNum::from_int(v)
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Independent construction of an expected triple from an explicit matrix:
/// A and B are read off the first column and row, the involutions by
/// conjugate matching, and the result is canonically ordered.
fn triple_from_matrix(x: usize, c: Vec<Vec<CycNum>>) -> CharacterTriple {
    let r = c.len();
    let xq = rat(x as i64);
    let a: Vec<BigRational> = (0..r)
        .map(|i| c[i][0].as_rational().expect("first column is rational") * &xq)
        .collect();
    let b: Vec<BigRational> = (0..r)
        .map(|j| c[0][j].as_rational().expect("first row is rational"))
        .collect();
    let mut mu = vec![0usize; r];
    let mut pi = vec![0usize; r];
    for i in 0..r {
        let conj_row: Vec<CycNum> = c[i].iter().map(|e| e.conjugate()).collect();
        mu[i] = (0..r).position(|i2| c[i2] == conj_row).expect("mu exists");
    }
    for j in 0..r {
        pi[j] = (0..r)
            .position(|j2| (0..r).all(|i| c[i][j2] == c[i][j].conjugate()))
            .expect("pi exists");
    }
    let data = canonical_order(&TripleData {
        x_size: x,
        a,
        b,
        c,
        mu,
        pi,
    });
    CharacterTriple::from_data(data).expect("expected matrix is a valid triple")
}

fn canonical(t: &CharacterTriple) -> CharacterTriple {
    CharacterTriple::from_data(canonical_order(t.data())).unwrap()
}

fn budget(name: &str, elapsed: Duration, limit: Duration) {
    assert!(
        elapsed <= limit,
        "{} took {:?}, over the {:?} budget",
        name,
        elapsed,
        limit
    );
    println!("PASS {} ({:?})", name, elapsed);
}

#[test]
fn criterion_01_symmetric_family() {
    let start = Instant::now();
    for n in 2..=8usize {
        let t = triple_of_recipe(&PairRecipe::Symmetric(n)).unwrap();
        let m = (n - 1) as i64;
        let expected = triple_from_matrix(
            n,
            vec![vec![int(1), int(m)], vec![int(m), int(-m)]],
        );
        assert_eq!(canonical(&t), expected, "L_{} mismatch", n);
        assert_eq!(t.a(), &[rat(n as i64), rat(n as i64 * m)]);
        assert_eq!(t.b(), &[rat(1), rat(m)]);
    }
    budget(
        "criterion 1: symmetric family (S_{n-1}, S_n), 2 <= n <= 8",
        start.elapsed(),
        Duration::from_secs(1),
    );
}

fn wreath_matrix(n: i64, k: i64) -> Vec<Vec<CycNum>> {
    vec![
        vec![int(1), int(k - 1), int(k * (n - 1))],
        vec![int(n - 1), int((k - 1) * (n - 1)), int(-k * (n - 1))],
        vec![int((k - 1) * n), int((1 - k) * n), int(0)],
    ]
}

#[test]
fn criterion_02_wreath_family() {
    let start = Instant::now();
    for (n, k) in [(2usize, 2usize), (2, 3), (3, 2), (4, 2), (3, 3)] {
        let t = triple_of_recipe(&PairRecipe::Wreath(n, k)).unwrap();
        let expected = triple_from_matrix(n * k, wreath_matrix(n as i64, k as i64));
        assert_eq!(canonical(&t), expected, "M_{{{},{}}} mismatch", n, k);
        // the (4,2) instance is the worked 3×3 example
        if (n, k) == (4, 2) {
            assert_eq!(t.c()[0], vec![int(1), int(1), int(6)]);
            assert_eq!(t.c()[1], vec![int(3), int(3), int(-6)]);
            assert_eq!(t.c()[2], vec![int(4), int(-4), int(0)]);
        }
        // duality swaps the parameters
        let dual = dual_triple(&t);
        let partner = triple_of_recipe(&PairRecipe::Wreath(k, n)).unwrap();
        assert!(
            find_isomorphism(&dual, &partner).is_some(),
            "dual of wreath({},{}) is wreath({},{})",
            n,
            k,
            k,
            n
        );
    }
    budget(
        "criterion 2: wreath family M_{n,k} with parameter-swap duality",
        start.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_03_regular_abelian() {
    let start = Instant::now();
    for n in 1..=12usize {
        let t = triple_of_recipe(&PairRecipe::CyclicRegular(n)).unwrap();
        let c: Vec<Vec<CycNum>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| CycNum::root_of_unity(n as u64, (i * j) as u64))
                    .collect()
            })
            .collect();
        let expected = triple_from_matrix(n, c);
        assert_eq!(canonical(&t), expected, "E_{} mismatch", n);
        let sf = splitting_field(&t);
        assert_eq!(
            sf.galois_order,
            gelfand::cyclo::euler_phi(n as u64),
            "Gal(L/Q) order for E_{}",
            n
        );
    }
    budget(
        "criterion 3: regular abelian E_n for n <= 12 with Galois order phi(n)",
        start.elapsed(),
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_04_semidirect_duality() {
    let start = Instant::now();
    let recipe = parse_recipe("semidirect 7 ; 2").unwrap();
    let t = triple_of_recipe(&recipe).unwrap();
    // the dual recipe's triple is the conjugate transpose up to reindexing
    let dual_r = dual_recipe(&recipe).unwrap();
    let t_dual_pair = triple_of_recipe(&dual_r).unwrap();
    let dual = dual_triple(&t);
    assert!(find_isomorphism(&dual, &t_dual_pair).is_some());
    // the starred |X| = 7 matrix with row sums (7, 0, 0)
    let z = |e: u64| CycNum::root_of_unity(7, e);
    let p1 = int(3) * (z(3) + z(5) + z(6));
    let p2 = int(3) * (z(1) + z(2) + z(4));
    let expected = triple_from_matrix(
        7,
        vec![
            vec![int(1), int(3), int(3)],
            vec![int(3), p1.clone(), p2.clone()],
            vec![int(3), p2, p1],
        ],
    );
    assert_eq!(canonical(&t), expected);
    for (i, want) in [int(7), int(0), int(0)].into_iter().enumerate() {
        let sum = t.c()[i]
            .iter()
            .fold(CycNum::zero(), |acc, e| acc + e.clone());
        assert_eq!(sum, want, "row sum {}", i + 1);
    }
    budget(
        "criterion 4: semidirect (Z_7 x| Z_3) duality and the starred zeta_7 matrix",
        start.elapsed(),
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_05_illustration_pair() {
    let start = Instant::now();
    let faces = triple_of_recipe(&parse_recipe("file s4_faces.pair").unwrap()).unwrap();
    let diag = triple_of_recipe(&parse_recipe("diagonal symmetric 3").unwrap()).unwrap();
    // a/b swap: a(Z_4,S_4) = {1,1,4} = b(S_3,S_3×S_3), and vice versa
    assert_eq!(
        faces.suborbit_sizes(),
        vec![BigInt::from(1), BigInt::from(1), BigInt::from(4)]
    );
    assert_eq!(faces.b(), &[rat(1), rat(2), rat(3)]);
    assert_eq!(
        diag.suborbit_sizes(),
        vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)]
    );
    assert_eq!(diag.b(), &[rat(1), rat(1), rat(4)]);
    // mutual duals
    assert!(find_isomorphism(&dual_triple(&faces), &diag).is_some());
    assert!(find_isomorphism(&dual_triple(&diag), &faces).is_some());
    // dual_search finds each from the other within the mini-catalog
    let sources = mini_catalog();
    let report = dual_search(&faces, &sources);
    assert!(report.integral);
    assert!(report
        .matches
        .iter()
        .any(|(r, _)| r == &parse_recipe("diagonal symmetric 3").unwrap()));
    let report = dual_search(&diag, &sources);
    assert!(report.integral);
    assert!(report
        .matches
        .iter()
        .any(|(r, _)| r == &parse_recipe("file s4_faces.pair").unwrap()));
    budget(
        "criterion 5: (Z_4, S_4) and diagonal S_3 are mutual duals found by search",
        start.elapsed(),
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_06_nonexample() {
    let start = Instant::now();
    // (S_2×S_{n−2}, S_n) for n = 5, 6; the printed formula uses index n−2
    for n in [5usize, 6] {
        let t = triple_of_recipe(&PairRecipe::Young(2, n)).unwrap();
        let m = (n - 2) as i64;
        let expected = triple_from_matrix(
            n * (n - 1) / 2,
            vec![
                vec![int(1), int(m + 1), int((m - 1) * (m + 2) / 2)],
                vec![int(2 * m), int((m - 2) * (m + 1)), int(-(m - 1) * (m + 2))],
                vec![
                    int(m * (m - 1) / 2),
                    int(-(m - 1) * (m + 1)),
                    int((m - 1) * (m + 2) / 2),
                ],
            ],
        );
        assert_eq!(canonical(&t), expected, "C_{} mismatch", m);
        let report = integrality_test(&t);
        assert!(
            report.ratio_integrality.is_err(),
            "ratio integrality must fail for n = {}",
            n
        );
    }
    budget(
        "criterion 6: 2-subset non-example matches the C_n formula and fails integrality",
        start.elapsed(),
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_07_sporadic() {
    let start = Instant::now();
    // M11 on 22 points
    let pair = m11_degree22_pair().unwrap();
    let scheme = OrbitalScheme::build(&pair);
    let t = build_triple(&scheme).unwrap();
    let expected = triple_from_matrix(
        22,
        vec![
            vec![int(1), int(10), int(11)],
            vec![int(1), int(10), int(-11)],
            vec![int(20), int(-20), int(0)],
        ],
    );
    assert_eq!(canonical(&t), expected, "degree-22 M11 matrix");
    // dual search over the twisted-square source
    let sources = vec![
        parse_recipe("twisted_square file m11.pair").unwrap(),
        parse_recipe("symmetric 22").unwrap(),
    ];
    let report = dual_search(&t, &sources);
    assert!(report.integral);
    assert!(
        report
            .matches
            .iter()
            .any(|(r, _)| r == &parse_recipe("twisted_square file m11.pair").unwrap()),
        "twisted square realizes the dual"
    );
    // M12 / PSL2(11) on 144 points
    let pair = m12_psl211_pair().unwrap();
    let scheme = OrbitalScheme::build(&pair);
    let t = build_triple(&scheme).unwrap();
    let expected = triple_from_matrix(
        144,
        vec![
            vec![int(1), int(11), int(11), int(55), int(66)],
            vec![int(11), int(121), int(-11), int(-55), int(-66)],
            vec![int(11), int(-11), int(121), int(-55), int(-66)],
            vec![int(55), int(-55), int(-55), int(385), int(-330)],
            vec![int(66), int(-66), int(-66), int(-330), int(396)],
        ],
    );
    assert!(
        find_isomorphism(&t, &expected).is_some(),
        "M12/PSL2(11) 5×5 matrix"
    );
    let witness = self_duality(&t);
    assert!(witness.is_some(), "M12/PSL2(11) pair is self-dual");
    budget(
        "criterion 7: sporadic pairs (M11 on 22, M12/PSL2(11) on 144)",
        start.elapsed(),
        Duration::from_secs(600),
    );
}

#[test]
fn criterion_08_classification_table() {
    let start = Instant::now();
    let table = cli::classification_table(7, &mini_catalog()).unwrap();
    let z3 = |e: u64| CycNum::root_of_unity(3, e);
    let z5 = |e: u64| CycNum::root_of_unity(5, e);
    let z7 = |e: u64| CycNum::root_of_unity(7, e);
    // expected rows: (x, matrix, galois, realization count, starred)
    let l = |n: i64| {
        vec![
            vec![int(1), int(n - 1)],
            vec![int(n - 1), int(-(n - 1))],
        ]
    };
    let e_matrix = |n: usize| -> Vec<Vec<CycNum>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| CycNum::root_of_unity(n as u64, (i * j) as u64))
                    .collect()
            })
            .collect()
    };
    let expected_rows: Vec<(usize, Vec<Vec<CycNum>>, &str, usize, bool)> = vec![
        (2, l(2), "1", 1, false),
        (3, l(3), "1", 1, false),
        (3, e_matrix(3), "Z2", 1, true),
        (4, l(4), "1", 2, false),
        (4, wreath_matrix(2, 2), "1", 1, false),
        (4, e_matrix(4), "Z2", 1, true),
        (5, l(5), "1", 3, false),
        (
            5,
            vec![
                vec![int(1), int(2), int(2)],
                vec![
                    int(2),
                    int(2) * (z5(3) + z5(2)),
                    int(2) * (z5(4) + z5(1)),
                ],
                vec![
                    int(2),
                    int(2) * (z5(4) + z5(1)),
                    int(2) * (z5(3) + z5(2)),
                ],
            ],
            "Z2",
            1,
            false,
        ),
        (5, e_matrix(5), "Z4", 1, true),
        (6, l(6), "1", 4, false),
        (6, wreath_matrix(2, 3), "1", 3, false),
        (6, wreath_matrix(3, 2), "1", 3, false),
        (
            6,
            vec![
                vec![int(1), int(1), int(1), int(3)],
                vec![int(1), int(1), int(1), int(-3)],
                vec![int(2), int(2) * z3(1), int(2) * z3(2), int(0)],
                vec![int(2), int(2) * z3(2), int(2) * z3(1), int(0)],
            ],
            "Z2",
            2,
            false,
        ),
        (
            6,
            vec![
                vec![int(1), int(1), int(2), int(2)],
                vec![int(1), int(1), int(2) * z3(2), int(2) * z3(1)],
                vec![int(1), int(1), int(2) * z3(1), int(2) * z3(2)],
                vec![int(3), int(-3), int(0), int(0)],
            ],
            "Z2",
            1,
            false,
        ),
        (7, l(7), "1", 4, false),
        (
            7,
            vec![
                vec![int(1), int(3), int(3)],
                vec![
                    int(3),
                    int(3) * (z7(6) + z7(5) + z7(3)),
                    int(3) * (z7(4) + z7(2) + z7(1)),
                ],
                vec![
                    int(3),
                    int(3) * (z7(4) + z7(2) + z7(1)),
                    int(3) * (z7(6) + z7(5) + z7(3)),
                ],
            ],
            "Z2",
            1,
            true,
        ),
        (
            7,
            vec![
                vec![int(1), int(2), int(2), int(2)],
                vec![
                    int(2),
                    int(2) * (z7(4) + z7(3)),
                    int(2) * (z7(5) + z7(2)),
                    int(2) * (z7(6) + z7(1)),
                ],
                vec![
                    int(2),
                    int(2) * (z7(6) + z7(1)),
                    int(2) * (z7(4) + z7(3)),
                    int(2) * (z7(5) + z7(2)),
                ],
                vec![
                    int(2),
                    int(2) * (z7(5) + z7(2)),
                    int(2) * (z7(6) + z7(1)),
                    int(2) * (z7(4) + z7(3)),
                ],
            ],
            "Z3",
            1,
            false,
        ),
        (7, e_matrix(7), "Z6", 1, true),
    ];
    let flat: Vec<(usize, &cli::TableEntry)> = table
        .iter()
        .flat_map(|(x, entries)| entries.iter().map(move |e| (*x, e)))
        .collect();
    assert_eq!(
        flat.len(),
        expected_rows.len(),
        "table row count: {} computed vs {} expected",
        flat.len(),
        expected_rows.len()
    );
    for (x, matrix, gal, count, starred) in expected_rows {
        let expected_triple = triple_from_matrix(x, matrix);
        let found = flat.iter().find(|(fx, e)| {
            *fx == x && find_isomorphism(&e.triple, &expected_triple).is_some()
        });
        let (_, entry) = found.unwrap_or_else(|| {
            panic!("table is missing a row at |X| = {} (Gal {})", x, gal)
        });
        assert_eq!(entry.gal, gal, "Galois entry at |X| = {}", x);
        assert_eq!(
            entry.recipes.len(),
            count,
            "realization count at |X| = {} (Gal {})",
            x,
            gal
        );
        if starred {
            // nontrivial self-duality marked
            assert_eq!(entry.self_dual, Some(false), "star at |X| = {}", x);
        }
    }
    // the |X| = 7 starred entry is present with a nontrivial witness
    let starred = flat
        .iter()
        .find(|(x, e)| *x == 7 && e.triple.rank() == 3 && e.starred)
        .expect("starred zeta_7 entry");
    assert_eq!(starred.1.self_dual, Some(false));
    // M_{2,3} and M_{3,2} are marked as duals of each other
    let m23 = triple_from_matrix(6, wreath_matrix(2, 3));
    let m32 = triple_from_matrix(6, wreath_matrix(3, 2));
    let idx23 = flat
        .iter()
        .position(|(_, e)| find_isomorphism(&e.triple, &m23).is_some())
        .unwrap();
    let idx32 = flat
        .iter()
        .position(|(_, e)| find_isomorphism(&e.triple, &m32).is_some())
        .unwrap();
    assert_eq!(flat[idx23].1.dual_of, Some(idx32));
    assert_eq!(flat[idx32].1.dual_of, Some(idx23));
    budget(
        "criterion 8: classification table |X| = 2..7 from the mini-catalog",
        start.elapsed(),
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_09_validation_sweep() {
    let start = Instant::now();
    let args: Vec<String> = ["gelfand", "validate"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let (code, output) = cli::run(&args);
    assert_eq!(
        code,
        cli::EXIT_OK,
        "validation sweep failed:\n{}",
        output
    );
    assert!(output.contains("validation passed"));
    budget(
        "criterion 9: property suites across the catalog (cmd_validate)",
        start.elapsed(),
        Duration::from_secs(600),
    );
}

#[test]
fn criterion_10_hecke_diagram() {
    let start = Instant::now();
    let nodes = vec![
        (
            "(S_4, PSL(3,2))".to_string(),
            instantiate(&parse_recipe("file psl32.pair").unwrap()).unwrap(),
        ),
        (
            "(A_6, A_7)".to_string(),
            GroupPair::new(alternating_group(7), 0).unwrap(),
        ),
        (
            "(S_6, S_7)".to_string(),
            GroupPair::new(symmetric_group(7), 0).unwrap(),
        ),
        (
            "(Z_6, F_42)".to_string(),
            instantiate(&parse_recipe("semidirect 7 ; 3").unwrap()).unwrap(),
        ),
    ];
    let graph = gelfand::heckemaps::search_equivalences(&nodes, 1_000_000).unwrap();
    assert!(graph.exhausted.is_empty(), "no edge search ran out of budget");
    assert!(graph.is_connected(), "diagram is connected");
    assert_eq!(
        graph.terminals(),
        vec![2],
        "terminal node is (S_6, S_7)"
    );
    // every edge is a verified strong equivalence
    for e in &graph.edges {
        let map = gelfand::heckemaps::PairMap {
            source: nodes[e.from].1.clone(),
            target: nodes[e.to].1.clone(),
            images: e.images.clone(),
        };
        assert_eq!(
            gelfand::heckemaps::verify_map(&map),
            gelfand::heckemaps::MapClass::Strong
        );
    }
    budget(
        "criterion 10: degree-7 Hecke diagram connected with terminal (S_6, S_7)",
        start.elapsed(),
        Duration::from_secs(300),
    );
}
