use std::collections::{BTreeMap, HashSet};

use super::{int, label_fragments, FormulationError, IbLevelTag, MipModel, Rational, Role, Sense, VarKind};
use crate::cdc::Cdc;
use crate::covers::{ceil_log2, validate_cover, BicliqueCover, IbScheme};

/// Declares `lam_<label>` in `[0, 1]` and the row `simplex: sum lam = 1`.
fn with_simplex(name: &str, labels: &[String]) -> Result<(MipModel, Vec<usize>), FormulationError> {
    let mut m = MipModel::new(name);
    let lam = label_fragments(labels)
        .iter()
        .map(|f| m.add_var(format!("lam_{f}"), VarKind::Continuous, Some(int(0)), Some(int(1)), Some(Role::Lambda)))
        .collect::<Result<Vec<_>, _>>()?;
    m.set_ground(labels.to_vec());
    m.add_constraint("simplex", lam.iter().map(|&v| (v, int(1))), Sense::Eq, int(1))?;
    Ok((m, lam))
}

/// `gam_<s>_<label>` for every `v` in every set, indexed `[s][position]`.
fn disaggregated(m: &mut MipModel, cdc: &Cdc) -> Result<Vec<Vec<(usize, usize)>>, FormulationError> {
    let frag = label_fragments(cdc.labels());
    cdc.sets()
        .iter()
        .enumerate()
        .map(|(s, set)| {
            set.iter()
                .map(|v| {
                    let g = m.add_var(
                        format!("gam_{}_{}", s + 1, frag[v]),
                        VarKind::Continuous,
                        Some(int(0)),
                        None,
                        Some(Role::Gamma),
                    )?;
                    Ok((v, g))
                })
                .collect()
        })
        .collect()
}

/// `lam_v = sum of gam^S_v over S containing v`.
fn link_rows(m: &mut MipModel, cdc: &Cdc, lam: &[usize], gam: &[Vec<(usize, usize)>]) -> Result<(), FormulationError> {
    let frag = label_fragments(cdc.labels());
    for (v, &l) in lam.iter().enumerate() {
        let mut terms = vec![(l, int(1))];
        terms.extend(gam.iter().flatten().filter(|(u, _)| *u == v).map(|&(_, g)| (g, int(-1))));
        m.add_constraint(format!("link_{}", frag[v]), terms, Sense::Eq, int(0))?;
    }
    Ok(())
}

/// Disaggregated formulation with one binary per set. The multipliers of
/// each set are only required to be nonnegative; their sum is tied to the
/// set's binary.
pub fn jeroslow(cdc: &Cdc) -> Result<MipModel, FormulationError> {
    let (mut m, lam) = with_simplex("jeroslow", cdc.labels())?;
    let z = (1..=cdc.sets().len()).map(|s| m.add_binary(format!("z_{s}"), Role::Z)).collect::<Result<Vec<_>, _>>()?;
    let gam = disaggregated(&mut m, cdc)?;
    link_rows(&mut m, cdc, &lam, &gam)?;
    for (s, gs) in gam.iter().enumerate() {
        let terms = std::iter::once((z[s], int(1))).chain(gs.iter().map(|&(_, g)| (g, int(-1))));
        m.add_constraint(format!("agg_{}", s + 1), terms, Sense::Eq, int(0))?;
    }
    m.add_constraint("choose", z.iter().map(|&v| (v, int(1))), Sense::Eq, int(1))?;
    Ok(m)
}

/// Codes of set `i` are the binary digits of `i`, most significant first,
/// with width `ceil(log2 d)`.
pub fn binary_codes(d: usize) -> Vec<Vec<bool>> {
    let r = ceil_log2(d);
    (0..d).map(|i| (0..r).rev().map(|b| i >> b & 1 == 1).collect()).collect()
}

/// Disaggregated formulation in which set `S` is selected by the binary
/// vector `codes[S]`. Defaults to [`binary_codes`].
pub fn encoded_extended(cdc: &Cdc, codes: Option<&[Vec<bool>]>) -> Result<MipModel, FormulationError> {
    let d = cdc.sets().len();
    let default;
    let codes = match codes {
        Some(c) => c,
        None => {
            default = binary_codes(d);
            &default
        }
    };
    if codes.len() != d {
        return Err(FormulationError::WidthMismatch { expected: d, found: codes.len() });
    }
    let r = codes.first().map_or(0, Vec::len);
    if let Some(c) = codes.iter().find(|c| c.len() != r) {
        return Err(FormulationError::WidthMismatch { expected: r, found: c.len() });
    }
    if codes.iter().collect::<HashSet<_>>().len() != d {
        return Err(FormulationError::DuplicateCode);
    }
    let (mut m, lam) = with_simplex("encoded", cdc.labels())?;
    let z = (1..=r).map(|i| m.add_binary(format!("z_{i}"), Role::Z)).collect::<Result<Vec<_>, _>>()?;
    let gam = disaggregated(&mut m, cdc)?;
    link_rows(&mut m, cdc, &lam, &gam)?;
    m.add_constraint("convex", gam.iter().flatten().map(|&(_, g)| (g, int(1))), Sense::Eq, int(1))?;
    for (i, &zi) in z.iter().enumerate() {
        let mut terms = vec![(zi, int(-1))];
        for (_, gs) in gam.iter().enumerate().filter(|(s, _)| codes[*s][i]) {
            terms.extend(gs.iter().map(|&(_, g)| (g, int(1))));
        }
        m.add_constraint(format!("code_{}", i + 1), terms, Sense::Eq, int(0))?;
    }
    Ok(m)
}

/// Non-extended formulation `lam_v <= sum of z_S over S containing v`.
pub fn adhoc_disaggregated(cdc: &Cdc) -> Result<MipModel, FormulationError> {
    let (mut m, lam) = with_simplex("adhoc", cdc.labels())?;
    let z = (1..=cdc.sets().len()).map(|s| m.add_binary(format!("z_{s}"), Role::Z)).collect::<Result<Vec<_>, _>>()?;
    let frag = label_fragments(cdc.labels());
    for (v, &l) in lam.iter().enumerate() {
        let mut terms = vec![(l, int(1))];
        terms.extend(cdc.sets().iter().enumerate().filter(|(_, s)| s.contains(v)).map(|(s, _)| (z[s], int(-1))));
        m.add_constraint(format!("cover_{}", frag[v]), terms, Sense::Le, int(0))?;
    }
    m.add_constraint("choose", z.iter().map(|&v| (v, int(1))), Sense::Eq, int(1))?;
    Ok(m)
}

/// One binary per alternative: `sum of lam outside L <= 1 - z` and exactly
/// one alternative per level.
pub fn multiway_ib(scheme: &IbScheme, labels: &[String]) -> Result<MipModel, FormulationError> {
    if labels.len() != scheme.node_count() {
        return Err(FormulationError::GroundMismatch);
    }
    let (mut m, lam) = with_simplex("multiway", labels)?;
    for (j, level) in scheme.levels().iter().enumerate() {
        let mut zs = Vec::new();
        for (i, alt) in level.iter().enumerate() {
            let z = m.add_binary(format!("z_{}_{}", j + 1, i + 1), Role::Z)?;
            let outside = (0..lam.len()).filter(|&v| !alt.contains(v)).map(|v| (lam[v], int(1)));
            m.add_constraint(format!("alt_{}_{}", j + 1, i + 1), outside.chain([(z, int(1))]), Sense::Le, int(1))?;
            zs.push(z);
        }
        m.add_constraint(format!("assign_{}", j + 1), zs.iter().map(|&z| (z, int(1))), Sense::Eq, int(1))?;
    }
    Ok(m)
}

/// Ideal non-extended formulation from a biclique cover of the conflict
/// graph: `sum_A lam <= z_j` and `sum_B lam <= 1 - z_j`. Trivial levels are
/// dropped.
pub fn pairwise_ideal(cdc: &Cdc, cover: &BicliqueCover) -> Result<MipModel, FormulationError> {
    validate_cover(&cdc.conflict_graph(), cover).map_err(FormulationError::InvalidCover)?;
    if !cdc.k_way_representable(2)? {
        return Err(FormulationError::NotPairwise);
    }
    let (mut m, lam) = with_simplex("ideal", cdc.labels())?;
    let mut tags = Vec::new();
    for (j, level) in cover.nontrivial().levels.iter().enumerate() {
        let z = m.add_binary(format!("z_{}", j + 1), Role::Z)?;
        let a = level.a.iter().map(|v| (lam[v], int(1)));
        m.add_constraint(format!("a_{}", j + 1), a.chain([(z, int(-1))]), Sense::Le, int(0))?;
        let b = level.b.iter().map(|v| (lam[v], int(1)));
        m.add_constraint(format!("b_{}", j + 1), b.chain([(z, int(1))]), Sense::Le, int(1))?;
        tags.push(IbLevelTag { z, a: level.a.clone(), b: level.b.clone() });
    }
    m.set_ib_levels(tags);
    Ok(m)
}

/// Appends free outputs `x_i = sum_v values[v][i] lam_v` and, with
/// `extra`, `y_i = sum_v extra[v][i] lam_v`.
pub fn embed_data(
    model: &MipModel,
    values: &BTreeMap<String, Vec<Rational>>,
    extra: Option<&BTreeMap<String, Vec<Rational>>>,
) -> Result<MipModel, FormulationError> {
    if model.lambda().is_empty() {
        return Err(FormulationError::NotCdcModel);
    }
    let mut m = model.clone();
    for (prefix, data) in std::iter::once(("x", values)).chain(extra.map(|e| ("y", e))) {
        let rows: Vec<&Vec<Rational>> = model
            .ground()
            .iter()
            .map(|l| data.get(l).ok_or_else(|| FormulationError::MissingValue(l.clone())))
            .collect::<Result<_, _>>()?;
        let dim = rows[0].len();
        if let Some((l, r)) = model.ground().iter().zip(&rows).find(|(_, r)| r.len() != dim) {
            return Err(FormulationError::DimensionMismatch { label: l.clone(), expected: dim, found: r.len() });
        }
        for i in 0..dim {
            let out = m.add_var(format!("{prefix}_{}", i + 1), VarKind::Continuous, None, None, Some(Role::Output))?;
            let terms = model.lambda().iter().zip(&rows).map(|(&l, r)| (l, -r[i].clone()));
            m.add_constraint(format!("embed_{prefix}_{}", i + 1), terms.chain([(out, int(1))]), Sense::Eq, int(0))?;
        }
    }
    Ok(m)
}
