use super::exact::{Domains, Propagator, Stop};
use super::scalar::{Overflow, Scalar, Small};
use super::{FormulationError, MipModel, Rational};
use crate::cdc::Cdc;
use crate::nodeset::NodeSet;

pub const PROJECTION_NODE_LIMIT: usize = 10;

/// A support on which the model and the CDC disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub support: NodeSet,
    pub labels: Vec<String>,
    pub feasible_in_cdc: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionReport {
    pub supports_checked: usize,
    pub max_support: usize,
    pub counterexample: Option<Counterexample>,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// For every support `T` with at most `max(3, rank + 1)` elements, fixes
/// the multipliers to the uniform point on `T` and decides exactly whether
/// the rest of the model can be completed. Completion must be possible
/// exactly when `T` is feasible for the CDC.
pub fn projection_check(model: &MipModel, cdc: &Cdc) -> Result<ProjectionReport, FormulationError> {
    let jobs = std::thread::available_parallelism().map_or(1, |p| p.get());
    projection_check_with_jobs(model, cdc, jobs)
}

/// [`projection_check`] on at most `jobs` threads.
pub fn projection_check_with_jobs(
    model: &MipModel,
    cdc: &Cdc,
    jobs: usize,
) -> Result<ProjectionReport, FormulationError> {
    let n = cdc.len();
    if n > PROJECTION_NODE_LIMIT {
        return Err(FormulationError::SizeLimit { vars: n, limit: PROJECTION_NODE_LIMIT });
    }
    if model.ground() != cdc.labels() || model.lambda().len() != n {
        return Err(FormulationError::GroundMismatch);
    }
    let max_support = 3.max(cdc.conflict_hypergraph().rank + 1).min(n);
    let mut supports: Vec<u64> = (1u64..1 << n).filter(|m| m.count_ones() as usize <= max_support).collect();
    supports.sort_by_key(|m| (m.count_ones(), *m));

    let workers = jobs.max(1).min(supports.len().max(1));
    let chunk = supports.len().div_ceil(workers);
    let first_bad = std::thread::scope(|s| {
        let handles: Vec<_> = supports
            .chunks(chunk.max(1))
            .map(|part| {
                s.spawn(move || {
                    let fast = Propagator::<Small>::new(model).ok();
                    let exact = Propagator::<Rational>::new(model).expect("rationals do not overflow");
                    part.iter().copied().find(|&mask| {
                        let t = NodeSet::from_mask(mask);
                        let want = cdc.is_feasible(&t).expect("support is inside the ground set");
                        let got = fast
                            .as_ref()
                            .and_then(|p| extends(model, p, &t).ok())
                            .unwrap_or_else(|| extends(model, &exact, &t).expect("rationals do not overflow"));
                        got != want
                    })
                })
            })
            .collect();
        handles.into_iter().filter_map(|h| h.join().expect("worker panicked")).next()
    });
    let counterexample = first_bad.map(|mask| {
        let support = NodeSet::from_mask(mask);
        Counterexample {
            labels: cdc.labels_of(&support),
            feasible_in_cdc: cdc.is_feasible(&support).expect("support is inside the ground set"),
            support,
        }
    });
    Ok(ProjectionReport { supports_checked: supports.len(), max_support, counterexample })
}

/// Whether the uniform point on `t` extends to a solution, computed in
/// the scalar `T`.
fn extends<T: Scalar>(model: &MipModel, prop: &Propagator<T>, t: &NodeSet) -> Result<bool, Overflow> {
    let mut b = Domains::<T>::of(model)?;
    let share = T::one().div(&T::from_rational(&Rational::from_integer((t.len() as i64).into()))?)?;
    for (pos, &v) in model.lambda().iter().enumerate() {
        b.fix(v, if t.contains(pos) { share.clone() } else { T::zero() });
    }
    match prop.run(&mut b, None) {
        Ok(()) => {}
        Err(Stop::Infeasible) => return Ok(false),
        Err(Stop::Overflow) => return Err(Overflow),
    }
    let binaries: Vec<usize> = model.binaries().collect();
    search(prop, &binaries, b)
}

fn search<T: Scalar>(prop: &Propagator<T>, binaries: &[usize], b: Domains<T>) -> Result<bool, Overflow> {
    let Some(&v) = binaries.iter().find(|&&v| !b.is_fixed(v)) else {
        return Ok(prop.lp_feasible(&b)?.is_some());
    };
    for val in [T::one(), T::zero()] {
        let mut child = b.clone();
        child.fix(v, val);
        match prop.run(&mut child, Some(&[v])) {
            Ok(()) => {
                if search(prop, binaries, child)? {
                    return Ok(true);
                }
            }
            Err(Stop::Infeasible) => {}
            Err(Stop::Overflow) => return Err(Overflow),
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::{sos2_gray_cover, BicliqueCover, Level};
    use crate::formulations::int;
    use crate::formulations::{adhoc_disaggregated, encoded_extended, jeroslow, multiway_ib, pairwise_ideal};
    use crate::generators::{cardinality, sos2, sosk};

    #[test]
    fn formulations_project_correctly() {
        let c = sos2(5).unwrap();
        for m in [
            pairwise_ideal(&c, &sos2_gray_cover(5).unwrap()).unwrap(),
            jeroslow(&c).unwrap(),
            encoded_extended(&c, None).unwrap(),
            adhoc_disaggregated(&c).unwrap(),
        ] {
            let r = projection_check(&m, &c).unwrap();
            assert!(r.passed(), "{}: {:?}", m.name, r.counterexample);
        }
        let s = sosk(6, 3).unwrap();
        assert!(projection_check(&adhoc_disaggregated(&s).unwrap(), &s).unwrap().passed());
        let k = cardinality(5, 2).unwrap();
        let scheme = k.cnf_ib_scheme(5).unwrap();
        let r = projection_check(&multiway_ib(&scheme, k.labels()).unwrap(), &k).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_support, 4);
    }

    #[test]
    fn fast_and_exact_scalars_agree() {
        let k = cardinality(6, 3).unwrap();
        let s = sosk(6, 2).unwrap();
        for (m, c) in [
            (encoded_extended(&k, None).unwrap(), &k),
            (adhoc_disaggregated(&k).unwrap(), &k),
            (multiway_ib(&k.cnf_ib_scheme(6).unwrap(), k.labels()).unwrap(), &k),
            (jeroslow(&s).unwrap(), &s),
            (pairwise_ideal(&s, &crate::covers::stars_cover(&s.conflict_graph())).unwrap(), &s),
        ] {
            let fast = Propagator::<Small>::new(&m).unwrap();
            let exact = Propagator::<Rational>::new(&m).unwrap();
            for mask in 1u64..1 << c.len() {
                let t = NodeSet::from_mask(mask);
                assert_eq!(extends(&m, &fast, &t).unwrap(), extends(&m, &exact, &t).unwrap(), "{} {t:?}", m.name);
            }
        }
    }

    #[test]
    fn corrupted_cover_is_caught() {
        let c = sos2(5).unwrap();
        let good = pairwise_ideal(&c, &sos2_gray_cover(5).unwrap()).unwrap();
        // A model for a cover missing an edge, built from the bare rows.
        let weak = BicliqueCover::new(5, vec![Level::new(NodeSet::range(0, 2), NodeSet::range(3, 5))]);
        let mut m = MipModel::new("weak");
        for v in good.variables().iter().take(5) {
            m.add_var(v.name.clone(), v.kind, v.lower.clone(), v.upper.clone(), Some(super::super::Role::Lambda))
                .unwrap();
        }
        m.set_ground(c.labels().to_vec());
        let z = m.add_binary("z_1", super::super::Role::Z).unwrap();
        m.add_constraint("simplex", (0..5).map(|v| (v, int(1))), super::super::Sense::Eq, int(1)).unwrap();
        let lv = &weak.levels[0];
        m.add_constraint(
            "a_1",
            lv.a.iter().map(|v| (v, int(1))).chain([(z, int(-1))]),
            super::super::Sense::Le,
            int(0),
        )
        .unwrap();
        m.add_constraint("b_1", lv.b.iter().map(|v| (v, int(1))).chain([(z, int(1))]), super::super::Sense::Le, int(1))
            .unwrap();
        let r = projection_check(&m, &c).unwrap();
        let bad = r.counterexample.unwrap();
        assert!(!bad.feasible_in_cdc);
        assert_eq!(bad.labels, ["1", "3"]);
    }
}
