//! Vector bundles on finite Zariski sites, computed with exact Laurent
//! polynomial arithmetic over the rationals.

pub mod bundle;
pub mod error;
pub mod json;
pub mod linsolve;
pub mod matrix;
pub mod presheaf;
pub mod projective;
pub mod random;
pub mod ring;
pub mod site;
pub mod verify;

pub use bundle::{BundleMorphism, ExactSequence, StdBundle, Transitions};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use presheaf::{presheaf_pullback, FreePresheaf, PresheafReport, SectionRep};
pub use projective::{ChartRule, ProjSite};
pub use ring::{rat, ratio, Rational, Ring, RingDesc, RingElem, RingHom};
pub use site::{Axiom, FiniteSite, MorId, ObjId, Pullback, Refinement, Sieve, SiteBuilder, SiteMorphism, SiteReport};
