//! Left divisibility monoids presented by length-2 relations: the axiom
//! check, hypercubes and right normal forms, the normalizing transducer and
//! the biautomatic structure over the hypercube alphabet.
//!
//! ```
//! use divmon_core::{parse_presentation, DivisibilityMonoid};
//!
//! let p = parse_presentation("generators: x y z\nrel: x x = y z\nrel: y x = z z").unwrap();
//! let dm = DivisibilityMonoid::new(p).unwrap();
//! let machine = dm.synthesize().unwrap();
//! let w = dm.presentation().parse_word("yzyxxz").unwrap();
//! let nf = machine.normalize_fast(&w).unwrap();
//! assert_eq!(machine.render_normal(&nf.normal), "[x y].y.y.[y z]");
//! assert_eq!(nf.runs, 4);
//! ```

pub mod automatic;
pub mod axioms;
pub mod error;
pub mod hypercube;
pub mod lattice;
pub mod monoid;
pub mod normal_form;
pub mod presentation;
pub mod report;
pub mod transducer;
pub mod verify;

pub use automatic::{
    convolve_left, convolve_right, FellowTravellerReport, Multiplier, NormalLanguage, PaddedPair,
    Padding, PairAutomaton, SweepReport,
};
pub use axioms::{check_all, CheckReport, Condition, Side, Violation};
pub use error::{Error, Result};
pub use hypercube::{CubeId, DivisibilityMonoid, Hypercube, HypercubeGraph, HypercubeTable};
pub use lattice::DivisorLattice;
pub use monoid::{Element, Monoid, OracleLimits};
pub use normal_form::{Distance, NormalWord};
pub use presentation::{parse_presentation, Letter, Presentation, Word};
pub use report::Report;
pub use transducer::{Alphabet, FastNormalization, Transducer};
pub use verify::{verify, VerifyOptions, VerifyReport};
