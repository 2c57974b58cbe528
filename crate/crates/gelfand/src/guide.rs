//! The book chapters, included here so their code snippets run as doc-tests
//! (`cargo test --doc` keeps the guide in sync with the crate).

#[doc = include_str!("../../../book/src/index.md")]
pub mod overview {}
#[doc = include_str!("../../../book/src/permutation-groups.md")]
pub mod permutation_groups {}
#[doc = include_str!("../../../book/src/cyclotomic-numbers.md")]
pub mod cyclotomic_numbers {}
#[doc = include_str!("../../../book/src/orbital-schemes.md")]
pub mod orbital_schemes {}
#[doc = include_str!("../../../book/src/character-triples.md")]
pub mod character_triples {}
#[doc = include_str!("../../../book/src/duality-and-integrality.md")]
pub mod duality_and_integrality {}
#[doc = include_str!("../../../book/src/catalog-and-search.md")]
pub mod catalog_and_search {}
#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}
