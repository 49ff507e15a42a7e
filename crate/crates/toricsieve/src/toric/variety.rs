//! A variety bundles the fan, its class group and a base field, plus caches
//! for monomial bases. This is the context object threaded through points,
//! jet computations and densities.

use super::basis::{monomial_basis, Monomial};
use super::classgroup::{class_group, ClassGroup, DivisorClass};
use super::fan::{product_fan, projective_space, weighted_projective, Fan};
use crate::error::{Error, Result};
use crate::ff::{FieldElement, Tower};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

pub struct Variety {
    pub fan: Fan,
    pub class_group: ClassGroup,
    pub tower: Arc<Tower>,
    basis_cache: Mutex<HashMap<DivisorClass, Arc<Vec<Monomial>>>>,
}

impl Variety {
    pub fn new(fan: Fan, tower: Arc<Tower>) -> Result<Variety> {
        let cg = class_group(&fan)?;
        Ok(Variety {
            fan,
            class_group: cg,
            tower,
            basis_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn projective(n: usize, tower: Arc<Tower>) -> Result<Variety> {
        Variety::new(projective_space(n), tower)
    }

    pub fn weighted(weights: &[u64], tower: Arc<Tower>) -> Result<Variety> {
        Variety::new(weighted_projective(weights)?, tower)
    }

    pub fn product(n1: usize, n2: usize, tower: Arc<Tower>) -> Result<Variety> {
        Variety::new(product_fan(n1, n2), tower)
    }

    pub fn dim(&self) -> usize {
        self.fan.rank
    }

    pub fn num_vars(&self) -> usize {
        self.fan.num_rays()
    }

    pub fn q(&self) -> u64 {
        self.tower.q()
    }

    pub fn is_smooth(&self) -> bool {
        self.fan.is_smooth()
    }

    pub fn basis(&self, class: &DivisorClass) -> Result<Arc<Vec<Monomial>>> {
        if let Some(b) = self.basis_cache.lock().unwrap().get(class) {
            return Ok(b.clone());
        }
        let b = Arc::new(monomial_basis(&self.class_group, class)?);
        self.basis_cache
            .lock()
            .unwrap()
            .insert(class.clone(), b.clone());
        Ok(b)
    }

    /// Membership in the complement of the irrelevant locus.
    pub fn is_relevant(&self, coords: &[FieldElement]) -> bool {
        assert_eq!(coords.len(), self.num_vars());
        let zero: Vec<bool> = coords.iter().map(FieldElement::is_zero).collect();
        self.fan.is_relevant_pattern(&zero)
    }

    /// Validate a candidate twist class: it must pair strictly positively
    /// with the positivity witness to serve as an ample twist direction.
    pub fn validate_twist(&self, class: &DivisorClass) -> Result<()> {
        if self.class_group.witness_pairing(class)? <= 0 {
            return Err(Error::InvalidTwist);
        }
        Ok(())
    }
}

/// Strict JSON description of a variety, as read from --variety files.
/// Exactly the keys demanded by the mode may appear; "field" is optional and
/// can instead come from the command line.
pub fn variety_from_json(value: &serde_json::Value, cli_field: Option<(u64, usize)>) -> Result<Variety> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Validation("variety file: expected a JSON object".into()))?;
    let mode = obj
        .get("mode")
        .and_then(|m| m.as_str())
        .ok_or_else(|| Error::Validation("variety file: missing \"mode\"".into()))?;
    let required: &[&str] = match mode {
        "fan" => &["rays", "max_cones"],
        "weighted" => &["weights"],
        "product" => &["factors"],
        other => {
            return Err(Error::Validation(format!(
                "variety file: unknown mode {other:?}"
            )))
        }
    };
    let mut allowed: Vec<&str> = vec!["mode", "field"];
    allowed.extend_from_slice(required);
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Validation(format!(
                "variety file: unexpected key {key:?} for mode {mode:?}"
            )));
        }
    }
    for key in required {
        if !obj.contains_key(*key) {
            return Err(Error::Validation(format!(
                "variety file: mode {mode:?} requires key {key:?}"
            )));
        }
    }
    let field = match obj.get("field") {
        Some(f) => {
            let fo = f
                .as_object()
                .ok_or_else(|| Error::Validation("variety file: \"field\" must be an object".into()))?;
            for key in fo.keys() {
                if key != "p" && key != "a" {
                    return Err(Error::Validation(format!(
                        "variety file: unexpected field key {key:?}"
                    )));
                }
            }
            let p = fo
                .get("p")
                .and_then(|v| v.as_u64())
                .ok_or_else(|| Error::Validation("variety file: field.p must be an integer".into()))?;
            let a = fo
                .get("a")
                .and_then(|v| v.as_u64())
                .ok_or_else(|| Error::Validation("variety file: field.a must be an integer".into()))?
                as usize;
            Some((p, a))
        }
        None => None,
    };
    let (p, a) = cli_field.or(field).ok_or_else(|| {
        Error::Validation("no base field given (neither in the file nor via --field)".into())
    })?;
    let tower = Tower::new(p, a)?;
    match mode {
        "fan" => {
            let rays = parse_int_matrix(obj.get("rays").unwrap(), "rays")?;
            let rank = rays.first().map(Vec::len).unwrap_or(0);
            let cones_i64 = parse_int_matrix(obj.get("max_cones").unwrap(), "max_cones")?;
            let max_cones = cones_i64
                .into_iter()
                .map(|c| {
                    c.into_iter()
                        .map(|x| {
                            usize::try_from(x).map_err(|_| {
                                Error::Validation("max_cones entries must be non-negative".into())
                            })
                        })
                        .collect::<Result<Vec<usize>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Variety::new(Fan::new(rank, rays, max_cones)?, tower)
        }
        "weighted" => {
            let weights = obj
                .get("weights")
                .unwrap()
                .as_array()
                .ok_or_else(|| Error::Validation("weights must be an array".into()))?
                .iter()
                .map(|v| {
                    v.as_u64()
                        .ok_or_else(|| Error::Validation("weights must be positive integers".into()))
                })
                .collect::<Result<Vec<u64>>>()?;
            Variety::weighted(&weights, tower)
        }
        "product" => {
            let factors = obj
                .get("factors")
                .unwrap()
                .as_array()
                .ok_or_else(|| Error::Validation("factors must be an array".into()))?;
            if factors.len() != 2 {
                return Err(Error::Validation("factors must have exactly 2 entries".into()));
            }
            let n1 = factors[0]
                .as_u64()
                .ok_or_else(|| Error::Validation("factors must be integers".into()))?
                as usize;
            let n2 = factors[1]
                .as_u64()
                .ok_or_else(|| Error::Validation("factors must be integers".into()))?
                as usize;
            Variety::product(n1, n2, tower)
        }
        _ => unreachable!(),
    }
}

fn parse_int_matrix(value: &serde_json::Value, what: &str) -> Result<Vec<Vec<i64>>> {
    value
        .as_array()
        .ok_or_else(|| Error::Validation(format!("{what} must be an array of arrays")))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Validation(format!("{what} must be an array of arrays")))?
                .iter()
                .map(|v| {
                    v.as_i64()
                        .ok_or_else(|| Error::Validation(format!("{what} entries must be integers")))
                })
                .collect()
        })
        .collect()
}
