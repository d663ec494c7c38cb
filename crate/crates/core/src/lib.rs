pub mod clifford;
pub mod lattice;
pub mod linops;
pub mod random;
pub mod weakpair;
pub mod wick;

// The book's snippets run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/linops.md")]
    mod linops {}
    #[doc = include_str!("../../../book/src/clifford.md")]
    mod clifford {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/weakpair.md")]
    mod weakpair {}
    #[doc = include_str!("../../../book/src/wick.md")]
    mod wick {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/demo.md")]
    mod demo {}
}
