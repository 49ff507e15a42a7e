//! The local exponent of a closed point: the F_q-dimension of the stabilized
//! image of graded pieces under the jet map at the point. Ranks are taken
//! along the twist ladder D, D+E, D+2E, ... until they stop moving; hitting
//! the a-priori upper bound degree * (d - codim) certifies the value exactly,
//! otherwise the result is flagged as stabilized heuristically.

use super::{AmbientSubscheme, JetContext};
use crate::error::{Error, Result};
use crate::linalg::RowSpace;
use crate::points::{self, ClosedPoint};
use crate::toric::{DivisorClass, Variety};

#[derive(Debug, Clone, Copy)]
pub struct NuControl {
    /// Consecutive unchanged ranks required before accepting stabilization.
    pub stab_window: usize,
    /// Twist ladder length bound.
    pub k_max: usize,
    /// Disable the smooth-point shortcut in profiles.
    pub force_linear_algebra: bool,
}

impl Default for NuControl {
    fn default() -> Self {
        NuControl {
            stab_window: 3,
            k_max: 40,
            force_linear_algebra: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuCertificate {
    /// The stabilized rank met the upper bound, so it is provably final.
    Exact,
    /// The rank was merely unchanged across the stabilization window.
    Heuristic,
}

impl NuCertificate {
    pub fn as_str(&self) -> &'static str {
        match self {
            NuCertificate::Exact => "exact",
            NuCertificate::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct NuOutcome {
    pub nu: u64,
    pub stabilized_at_k: usize,
    pub certificate: NuCertificate,
    /// F_q-rank of the value block of the image (used by Taylor conditions).
    pub value_rank: u64,
    /// The exponent vanished: no section of any twist is quasismooth here.
    pub nu_zero: bool,
    /// Rank per k, for monotonicity diagnostics.
    pub ranks: Vec<usize>,
}

/// The stabilized F_q-rank of the jet-evaluation map on monomial bases of
/// D + kE at the point's Cox lift.
pub fn nu(
    variety: &Variety,
    point: &ClosedPoint,
    d_class: &DivisorClass,
    e_class: &DivisorClass,
    subscheme: Option<&AmbientSubscheme>,
    control: &NuControl,
) -> Result<NuOutcome> {
    variety.validate_twist(e_class)?;
    let e = point.degree;
    let ctx = JetContext::new(variety, &point.coords, subscheme)?;
    let jet_len = ctx.jet_len();
    let codim = subscheme.map_or(0, |y| y.codim);
    let bound = (e * (variety.num_vars() - codim)) as u64;
    let expansion = variety.tower.base_expansion(e)?;
    let cg = &variety.class_group;

    let mut ranks: Vec<usize> = Vec::new();
    let mut streak = 0usize;
    for k in 0..=control.k_max {
        let class_k = cg.add(d_class, &cg.scale(e_class, k as i64));
        let basis = variety.basis(&class_k)?;
        let powers = ctx.powers_for(&basis);
        let mut space = RowSpace::new();
        for m in basis.iter() {
            let jet = ctx.jet_of_monomial(m, &powers);
            let mut row = Vec::with_capacity(jet_len * e);
            for comp in &jet {
                row.extend(expansion.coords(comp));
            }
            space.insert(row);
            if space.rank() as u64 == bound {
                break;
            }
        }
        let rank = space.rank();
        if rank as u64 == bound {
            ranks.push(rank);
            return Ok(NuOutcome {
                nu: bound,
                stabilized_at_k: k,
                certificate: NuCertificate::Exact,
                value_rank: space.rank_of_leading_columns(e) as u64,
                nu_zero: false,
                ranks,
            });
        }
        if let Some(&prev) = ranks.last() {
            if prev == rank {
                streak += 1;
            } else {
                streak = 0;
            }
        }
        ranks.push(rank);
        if streak >= control.stab_window {
            let stabilized_at_k = k - control.stab_window;
            return Ok(NuOutcome {
                nu: rank as u64,
                stabilized_at_k,
                certificate: NuCertificate::Heuristic,
                value_rank: space.rank_of_leading_columns(e) as u64,
                nu_zero: rank == 0,
                ranks,
            });
        }
    }
    Err(Error::NoStabilization {
        k_max: control.k_max,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfilePoint {
    pub id: String,
    pub degree: usize,
    pub nu: u64,
    pub on_singular_locus: bool,
    pub value_rank: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileClass {
    pub degree: usize,
    pub nu: u64,
    pub count: u128,
}

/// The finite input to every density product: local exponents of all closed
/// points up to a degree bound, either enumerated point by point or
/// synthesized from counts on a smooth variety.
#[derive(Debug, Clone)]
pub struct NuProfile {
    pub q: u64,
    pub dim_y: usize,
    pub max_degree: usize,
    pub classes: Vec<ProfileClass>,
    /// Present when the profile was enumerated.
    pub points: Option<Vec<ProfilePoint>>,
}

impl NuProfile {
    pub fn has_zero_nu(&self) -> bool {
        self.classes.iter().any(|c| c.nu == 0 && c.count > 0)
    }

    pub fn count_of_degree(&self, e: usize) -> u128 {
        self.classes
            .iter()
            .filter(|c| c.degree == e)
            .map(|c| c.count)
            .sum()
    }

    fn from_points(q: u64, dim_y: usize, max_degree: usize, points: Vec<ProfilePoint>) -> Self {
        let mut map = std::collections::BTreeMap::new();
        for p in &points {
            *map.entry((p.degree, p.nu)).or_insert(0u128) += 1;
        }
        let classes = map
            .into_iter()
            .map(|((degree, nu), count)| ProfileClass { degree, nu, count })
            .collect();
        NuProfile {
            q,
            dim_y,
            max_degree,
            classes,
            points: Some(points),
        }
    }

    /// Drop the named points (used for Taylor conditions on a finite set Z).
    pub fn without_points(&self, ids: &[String]) -> Result<NuProfile> {
        let points = self
            .points
            .as_ref()
            .ok_or_else(|| Error::Validation("profile has no per-point data".into()))?;
        let kept: Vec<ProfilePoint> = points
            .iter()
            .filter(|p| !ids.contains(&p.id))
            .cloned()
            .collect();
        Ok(NuProfile::from_points(
            self.q,
            self.dim_y,
            self.max_degree,
            kept,
        ))
    }
}

/// Enumerated profile: every closed point of the subscheme up to the degree
/// bound, with the smooth-locus shortcut nu = deg * (dim Y + 1) unless the
/// control forces the rank computation.
pub fn nu_profile(
    variety: &Variety,
    subscheme: Option<&AmbientSubscheme>,
    d_class: &DivisorClass,
    e_class: &DivisorClass,
    max_degree: usize,
    control: &NuControl,
    table_cap: u64,
) -> Result<NuProfile> {
    variety.validate_twist(e_class)?;
    let codim = subscheme.map_or(0, |y| y.codim);
    let dim_y = variety.dim() - codim;
    let mut points_out = Vec::new();
    for point in points::enumerate_closed_points(variety, max_degree, table_cap)? {
        let point = point?;
        if let Some(y) = subscheme {
            if !y.contains(variety, &point.coords)? {
                continue;
            }
        }
        let on_sing = points::singular_locus_membership(&point, &variety.fan);
        let shortcut_ok = !control.force_linear_algebra && !on_sing && smooth_on_subscheme(
            variety, subscheme, &point,
        )?;
        let (nu_val, value_rank) = if shortcut_ok {
            let nu_val = (point.degree * (dim_y + 1)) as u64;
            // at a smooth point the value coordinate of the jet space is the
            // full residue field
            (nu_val, point.degree as u64)
        } else {
            let outcome = nu(variety, &point, d_class, e_class, subscheme, control)?;
            (outcome.nu, outcome.value_rank)
        };
        points_out.push(ProfilePoint {
            id: point.id(),
            degree: point.degree,
            nu: nu_val,
            on_singular_locus: on_sing,
            value_rank,
        });
    }
    Ok(NuProfile::from_points(
        variety.q(),
        dim_y,
        max_degree,
        points_out,
    ))
}

fn smooth_on_subscheme(
    variety: &Variety,
    subscheme: Option<&AmbientSubscheme>,
    point: &ClosedPoint,
) -> Result<bool> {
    match subscheme {
        None => Ok(true), // ambient point off the singular locus
        Some(_) => {
            // the subscheme is smooth at a smooth ambient point exactly when
            // its Jacobian has full rank there, which JetContext verifies
            match JetContext::new(variety, &point.coords, subscheme) {
                Ok(_) => Ok(true),
                Err(Error::AmbientNotQuasismoothHere) => Err(Error::AmbientNotQuasismoothHere),
                Err(e) => Err(e),
            }
        }
    }
}

/// Synthetic profile for a smooth variety: every closed point of degree e has
/// exponent e * (dim X + 1), and the counts come from Moebius inversion. This
/// is how deep truncations (r = 12 and beyond) stay exact without enumerating
/// millions of points.
pub fn smooth_profile(variety: &Variety, max_degree: usize) -> Result<NuProfile> {
    if !variety.is_smooth() {
        return Err(Error::NotSmooth);
    }
    let q = variety.q();
    let n: Vec<u128> = (1..=max_degree)
        .map(|r| points::count_points(&variety.fan, q, r))
        .collect();
    let a = points::closed_point_counts(&n)?;
    let dim = variety.dim();
    let classes = (1..=max_degree)
        .map(|e| ProfileClass {
            degree: e,
            nu: (e * (dim + 1)) as u64,
            count: a[e - 1],
        })
        .collect();
    Ok(NuProfile {
        q,
        dim_y: dim,
        max_degree,
        classes,
        points: None,
    })
}

#[derive(Debug, Clone)]
pub struct BetaRow {
    pub m: u64,
    /// Raw counts per degree, ascending in degree.
    pub counts: Vec<(usize, u128)>,
    /// Fitted growth exponent of the counts in powers of q.
    pub estimate: Option<f64>,
    /// Whether the estimated dimension stays below m by the margin 1/2.
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct BetaReport {
    pub rows: Vec<BetaRow>,
}

impl BetaReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Per slope m: estimate the dimension of the locus of points with
/// nu = m * deg from the growth of point counts, and flag whether the
/// sieve hypothesis (dimension < m) plausibly holds.
pub fn beta_diagnostic(profile: &NuProfile) -> Result<BetaReport> {
    if profile.max_degree < 3 {
        return Err(Error::Validation(
            "beta diagnostics need a profile of depth at least 3".into(),
        ));
    }
    let mut per_m: std::collections::BTreeMap<u64, std::collections::BTreeMap<usize, u128>> =
        std::collections::BTreeMap::new();
    for c in &profile.classes {
        if c.count == 0 {
            continue;
        }
        if c.nu % c.degree as u64 != 0 {
            return Err(Error::Internal(format!(
                "exponent {} not divisible by degree {}",
                c.nu, c.degree
            )));
        }
        let m = c.nu / c.degree as u64;
        *per_m
            .entry(m)
            .or_default()
            .entry(c.degree)
            .or_insert(0u128) += c.count;
    }
    let lq = (profile.q as f64).ln();
    let rows = per_m
        .into_iter()
        .map(|(m, by_deg)| {
            let counts: Vec<(usize, u128)> = by_deg.into_iter().collect();
            let pts: Vec<(f64, f64)> = counts
                .iter()
                .map(|&(e, c)| (e as f64, (c as f64).ln() / lq))
                .collect();
            let estimate = if pts.len() >= 2 {
                // least-squares slope of log_q(count) against degree
                let n = pts.len() as f64;
                let sx: f64 = pts.iter().map(|p| p.0).sum();
                let sy: f64 = pts.iter().map(|p| p.1).sum();
                let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
                let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
                Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
            } else {
                pts.first().map(|&(e, y)| y / e)
            };
            let holds = match estimate {
                None => true,
                Some(est) => est < m as f64 - 0.5,
            };
            BetaRow {
                m,
                counts,
                estimate,
                holds,
            }
        })
        .collect();
    Ok(BetaReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Tower;
    use crate::points::collect_closed_points;

    const CAP: u64 = 1 << 22;

    #[test]
    fn weighted_singular_point_exponents() {
        // P(1,1,w) at (0:0:1): 0 for l in 2..w, 2 for l = 1, 1 for l = 0
        for w in [3i64, 5] {
            let tower = Tower::new(2, 1).unwrap();
            let v = Variety::weighted(&[1, 1, w as u64], tower).unwrap();
            let points = collect_closed_points(&v, 1, CAP).unwrap();
            let sing = points
                .iter()
                .find(|p| points::singular_locus_membership(p, &v.fan))
                .unwrap();
            let e_class = v.class_group.line(w).unwrap();
            let control = NuControl::default();
            for l in 0..w {
                let d_class = v.class_group.line(l).unwrap();
                let out = nu(&v, sing, &d_class, &e_class, None, &control).unwrap();
                let expected = match l {
                    0 => 1,
                    1 => 2,
                    _ => 0,
                };
                assert_eq!(out.nu, expected, "w={w} l={l}");
                assert_eq!(out.nu_zero, expected == 0);
                // ranks never decrease along the ladder
                assert!(out.ranks.windows(2).all(|x| x[0] <= x[1]));
            }
        }
    }

    #[test]
    fn smooth_law_forced_linear_algebra_small() {
        // P^2 over F_2, degree <= 2: nu = 3 * deg via the rank computation
        let v = Variety::projective(2, Tower::new(2, 1).unwrap()).unwrap();
        let d_class = v.class_group.line(0).unwrap();
        let e_class = v.class_group.line(1).unwrap();
        let control = NuControl::default();
        for p in collect_closed_points(&v, 2, CAP).unwrap() {
            let out = nu(&v, &p, &d_class, &e_class, None, &control).unwrap();
            assert_eq!(out.nu, 3 * p.degree as u64);
            assert_eq!(out.certificate, NuCertificate::Exact);
        }
    }

    #[test]
    fn profile_shortcut_agrees_with_forced_path() {
        let v = Variety::projective(2, Tower::new(3, 1).unwrap()).unwrap();
        let d = v.class_group.line(0).unwrap();
        let e = v.class_group.line(1).unwrap();
        let fast = nu_profile(&v, None, &d, &e, 2, &NuControl::default(), CAP).unwrap();
        let slow = nu_profile(
            &v,
            None,
            &d,
            &e,
            2,
            &NuControl {
                force_linear_algebra: true,
                ..Default::default()
            },
            CAP,
        )
        .unwrap();
        assert_eq!(fast.classes, slow.classes);
    }

    #[test]
    fn smooth_profile_matches_enumerated() {
        let v = Variety::product(1, 1, Tower::new(2, 1).unwrap()).unwrap();
        let d = v.class_group.class_from_free(vec![0, 0]).unwrap();
        let e = v.class_group.class_from_free(vec![1, 1]).unwrap();
        let enumerated = nu_profile(&v, None, &d, &e, 3, &NuControl::default(), CAP).unwrap();
        let synthetic = smooth_profile(&v, 3).unwrap();
        assert_eq!(enumerated.classes, synthetic.classes);
    }

    #[test]
    fn wps_1236_exponent_on_coordinate_line() {
        // every point of V(x0, x1) in P(1,2,3,6) with D = O(1) has nu = deg
        let tower = Tower::new(2, 1).unwrap();
        let v = Variety::weighted(&[1, 2, 3, 6], tower).unwrap();
        let d_class = v.class_group.line(1).unwrap();
        let e_class = v.class_group.line(6).unwrap();
        let control = NuControl::default();
        let mut seen = 0;
        for p in collect_closed_points(&v, 2, CAP).unwrap() {
            if !p.coords[0].is_zero() || !p.coords[1].is_zero() {
                continue;
            }
            seen += 1;
            let out = nu(&v, &p, &d_class, &e_class, None, &control).unwrap();
            assert_eq!(out.nu, p.degree as u64, "at {}", p.id());
        }
        assert!(seen >= 3);
    }

    #[test]
    fn beta_flags_failure_on_wps_1236() {
        let tower = Tower::new(2, 1).unwrap();
        let v = Variety::weighted(&[1, 2, 3, 6], tower).unwrap();
        let d_class = v.class_group.line(1).unwrap();
        let e_class = v.class_group.line(6).unwrap();
        let profile = nu_profile(&v, None, &d_class, &e_class, 3, &NuControl::default(), CAP).unwrap();
        let report = beta_diagnostic(&profile).unwrap();
        let m1 = report.rows.iter().find(|r| r.m == 1).expect("m=1 occupied");
        assert!(!m1.holds, "beta_1 < 1 must be flagged as failing");
        assert!(!report.all_hold());
    }

    #[test]
    fn beta_holds_on_smooth_plane() {
        let v = Variety::projective(2, Tower::new(2, 1).unwrap()).unwrap();
        let profile = smooth_profile(&v, 4).unwrap();
        let report = beta_diagnostic(&profile).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].m, 3);
        assert!(report.rows[0].holds);
        let est = report.rows[0].estimate.unwrap();
        assert!((est - 2.0).abs() < 0.25, "estimate {est} should be near 2");
    }

    #[test]
    fn divisibility_and_upper_bound() {
        // Lemma-style invariants on every computed point
        let tower = Tower::new(2, 1).unwrap();
        let v = Variety::weighted(&[1, 1, 3], tower).unwrap();
        let d_class = v.class_group.line(1).unwrap();
        let e_class = v.class_group.line(3).unwrap();
        let profile = nu_profile(&v, None, &d_class, &e_class, 2, &NuControl::default(), CAP).unwrap();
        let d = v.num_vars() as u64;
        for p in profile.points.as_ref().unwrap() {
            assert_eq!(p.nu % p.degree as u64, 0);
            assert!(p.nu <= p.degree as u64 * d);
        }
    }

    #[test]
    fn shallow_profile_rejected_by_beta() {
        let v = Variety::projective(2, Tower::new(2, 1).unwrap()).unwrap();
        let profile = smooth_profile(&v, 2).unwrap();
        assert!(beta_diagnostic(&profile).is_err());
    }
}
