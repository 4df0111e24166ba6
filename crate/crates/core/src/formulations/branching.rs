use std::fmt;

use super::exact::{propagate, Bounds, Infeasible};
use super::{int, FormulationError, MipModel, Rational};
use crate::nodeset::NodeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchDirection {
    /// `z <= 0`
    Down,
    /// `z >= 1`
    Up,
}

impl BranchDirection {
    fn value(self) -> Rational {
        match self {
            BranchDirection::Down => int(0),
            BranchDirection::Up => int(1),
        }
    }
}

/// Positions of the multipliers that bound propagation proves zero after
/// fixing the given variables.
pub fn forced_zeros(model: &MipModel, fixes: &[(usize, Rational)]) -> Result<NodeSet, Infeasible> {
    let mut b = Bounds::of(model);
    for (v, x) in fixes {
        b.fix(*v, x.clone());
    }
    propagate(model, &mut b)?;
    Ok(model.lambda().iter().enumerate().filter(|(_, &v)| b.forced_zero(v)).map(|(pos, _)| pos).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingRow {
    /// 1-based level.
    pub level: usize,
    pub direction: BranchDirection,
    pub forced: NodeSet,
    /// The forced set is `A` on the down branch and `B` on the up branch.
    pub matches_level: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingReport {
    pub labels: Vec<String>,
    pub rows: Vec<BranchingRow>,
    /// Every multiplier is forced to zero by some single branch.
    pub covers_ground: bool,
    /// Fixing two branches on distinct levels forces exactly the union of
    /// what each forces alone.
    pub path_independent: bool,
}

impl BranchingReport {
    pub fn row(&self, level: usize, direction: BranchDirection) -> Option<&BranchingRow> {
        self.rows.iter().find(|r| r.level == level && r.direction == direction)
    }

    pub fn holds(&self) -> bool {
        self.covers_ground && self.path_independent && self.rows.iter().all(|r| r.matches_level)
    }
}

impl fmt::Display for BranchingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "level\tbranch\tforced_zero\tmatches")?;
        for r in &self.rows {
            let dir = match r.direction {
                BranchDirection::Down => "z<=0",
                BranchDirection::Up => "z>=1",
            };
            let forced: Vec<&str> = r.forced.iter().map(|v| self.labels[v].as_str()).collect();
            writeln!(f, "{}\t{dir}\t{{{}}}\t{}", r.level, forced.join(","), r.matches_level)?;
        }
        writeln!(f, "covers_ground\t{}", self.covers_ground)?;
        write!(f, "path_independent\t{}", self.path_independent)
    }
}

/// Branches on each level of a pairwise model and records which
/// multipliers are forced to zero.
pub fn branching_report(model: &MipModel) -> Result<BranchingReport, FormulationError> {
    let levels = match model.ib_levels() {
        Some(l) if !l.is_empty() => l,
        _ => return Err(FormulationError::NotIbModel),
    };
    let dirs = [BranchDirection::Down, BranchDirection::Up];
    let single = |z: usize, d: BranchDirection| forced_zeros(model, &[(z, d.value())]).ok();
    let mut rows = Vec::new();
    for (j, tag) in levels.iter().enumerate() {
        for d in dirs {
            let forced = single(tag.z, d).unwrap_or_else(|| NodeSet::full(model.lambda().len()));
            let expected = if d == BranchDirection::Down { &tag.a } else { &tag.b };
            rows.push(BranchingRow { level: j + 1, direction: d, matches_level: forced == *expected, forced });
        }
    }
    let union = rows.iter().fold(NodeSet::new(), |acc, r| acc.union(&r.forced));
    let covers_ground = union == NodeSet::full(model.lambda().len());
    let mut path_independent = true;
    for (i, ti) in levels.iter().enumerate() {
        for tj in &levels[i + 1..] {
            for di in dirs {
                for dj in dirs {
                    let both = forced_zeros(model, &[(ti.z, di.value()), (tj.z, dj.value())]);
                    let (Some(a), Some(b)) = (single(ti.z, di), single(tj.z, dj)) else { continue };
                    // An infeasible pair proves everything zero; the union
                    // must then already be the whole ground set.
                    let both = both.unwrap_or_else(|_| NodeSet::full(model.lambda().len()));
                    path_independent &= both == a.union(&b);
                }
            }
        }
    }
    Ok(BranchingReport { labels: model.ground().to_vec(), rows, covers_ground, path_independent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::{sos2_gray_cover, BicliqueCover, Level};
    use crate::formulations::{encoded_extended, pairwise_ideal};
    use crate::generators::sos2;

    fn set(v: &[usize]) -> NodeSet {
        v.iter().copied().collect()
    }

    /// Levels ({1,2},{4,5}) and ({3},{1,5}) in 0-based indices.
    fn small_cover() -> BicliqueCover {
        BicliqueCover::new(5, vec![Level::new(set(&[0, 1]), set(&[3, 4])), Level::new(set(&[2]), set(&[0, 4]))])
    }

    #[test]
    fn independent_branching() {
        let m = pairwise_ideal(&sos2(5).unwrap(), &small_cover()).unwrap();
        let r = branching_report(&m).unwrap();
        assert_eq!(r.row(2, BranchDirection::Down).unwrap().forced, set(&[2]));
        assert_eq!(r.row(2, BranchDirection::Up).unwrap().forced, set(&[0, 4]));
        assert!(r.holds(), "{r}");
        let g = pairwise_ideal(&sos2(9).unwrap(), &sos2_gray_cover(9).unwrap()).unwrap();
        assert!(branching_report(&g).unwrap().holds());
    }

    #[test]
    fn encoded_model_is_path_dependent() {
        let codes = vec![vec![true, true], vec![true, false], vec![false, true], vec![false, false]];
        let m = encoded_extended(&sos2(5).unwrap(), Some(&codes)).unwrap();
        let (z1, z2) = (m.var("z_1").unwrap(), m.var("z_2").unwrap());
        assert_eq!(forced_zeros(&m, &[(z2, int(0))]).unwrap(), set(&[0]));
        assert_eq!(forced_zeros(&m, &[(z1, int(0))]).unwrap(), set(&[0, 1]));
        assert_eq!(forced_zeros(&m, &[(z1, int(0)), (z2, int(0))]).unwrap(), set(&[0, 1, 2]));
        assert_eq!(branching_report(&m), Err(FormulationError::NotIbModel));
    }

    #[test]
    fn empty_cover_is_rejected() {
        let m = pairwise_ideal(&sos2(2).unwrap(), &BicliqueCover::empty(2)).unwrap();
        assert_eq!(branching_report(&m), Err(FormulationError::NotIbModel));
    }
}
