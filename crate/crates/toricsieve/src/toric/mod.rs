//! Fans, class groups, graded monomial bases and sections of the homogeneous
//! coordinate ring.

pub mod basis;
pub mod classgroup;
pub mod fan;
pub mod section;
pub mod variety;

pub use basis::{monomial_basis, standard_degree_delta, Monomial};
pub use classgroup::{class_group, ClassGroup, DivisorClass};
pub use fan::{product_fan, projective_space, weighted_projective, Fan};
pub use section::Section;
pub use variety::{variety_from_json, Variety};
