//! Average-rarity toolkit for order-ideal families of functional preorders:
//! normalized degree sum (NDS) statistics on set families, closure systems
//! generated by rooted sets, checked reduction certificates, and exhaustive
//! desk-scale searches for counterexamples.

pub mod error;
pub mod family;
pub mod ideals;
pub mod preorder;
pub mod reduction;
pub mod rooted;
pub mod search;
pub mod suites;

pub use error::{Error, Result};
pub use family::{SetFamily, SubsetMask, MAX_GROUND};
pub use ideals::{count_ideals, ideals_bruteforce, ideals_forest, nds_of_map, IdealFamily};
pub use preorder::{FunctionalMap, Partition, PreorderRelation};
pub use reduction::{certify, verify_certificate, ReductionCertificate};
pub use rooted::{RootedFamily, RootedSet, UniqueRootFamily};
pub use search::{mine_conjecture, verify_main_theorem, MineOptions, ScanOptions, SearchReport};
