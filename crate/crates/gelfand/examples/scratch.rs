use gelfand::catalog::{instantiate, parse_recipe, triple_of_recipe};
use gelfand::triples::find_isomorphism;
use std::time::Instant;

fn main() {
    let w42 = triple_of_recipe(&parse_recipe("wreath 4 2").unwrap()).unwrap();
    let tw = triple_of_recipe(&parse_recipe("twisted_square symmetric 4").unwrap()).unwrap();
    println!("triples isomorphic: {}", find_isomorphism(&w42, &tw).is_some());
    let t = Instant::now();
    let nodes = vec![
        ("S_4 wr S_2".to_string(), instantiate(&parse_recipe("wreath 4 2").unwrap()).unwrap()),
        ("(S_4 x S_4) : Z_2".to_string(), instantiate(&parse_recipe("twisted_square symmetric 4").unwrap()).unwrap()),
    ];
    let graph = gelfand::heckemaps::search_equivalences(&nodes, 1_000_000).unwrap();
    print!("{}", graph.format());
    println!("elapsed {:?}", t.elapsed());
}
