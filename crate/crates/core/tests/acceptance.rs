//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{all_triangulations, corpus, grid_shapes, set1};
use disjunct::covers::{
    ceil_log2, chromatic_triangulation_cover, multilinear_cover, odd_degree_example, sos2_gray_cover, sosk_cover,
    sosk_cover_bound, sosk_half_cover, stars_cover, triangulation_cover, validate_cover,
};
use disjunct::formulations::{
    adhoc_disaggregated, branching_report, encoded_extended, idealness_check, jeroslow, multiway_ib, pairwise_ideal,
    projection_check, BranchDirection, Idealness, Rational, Sense,
};
use disjunct::generators::{
    cardinality, k1, multilinear_grid, random_triangulation, sos2, sosk, triangulation_to_cdc, union_jack,
};
use disjunct::geometry::{
    partition_rank, random_partition, square_ring, t_junction, triangle_ring, validate_partition, PartitionViolation,
};
use disjunct::search::{
    feasibility_mip, log_lower_bound, min_cover, min_cover_cdc, min_cover_decide, sosk_lower_bound, FeasibilityMip,
    EXACT_NODE_LIMIT,
};
use disjunct::{BicliqueCover, Cdc, ConflictGraph, Level};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn check_cover(graph: &ConflictGraph, cover: &BicliqueCover, what: &str) -> Result<(), String> {
    validate_cover(graph, cover).map_err(|v| format!("{what}: invalid cover {v:?}"))
}

fn gray_covers() -> Outcome {
    for n in 3..=65 {
        let c = sos2_gray_cover(n).map_err(|e| e.to_string())?;
        check_cover(&sos2(n).unwrap().conflict_graph(), &c, &format!("N={n}"))?;
        ensure!(c.depth() == ceil_log2(n - 1), "N={n}: depth {} != {}", c.depth(), ceil_log2(n - 1));
    }
    let nine = sos2_gray_cover(9).unwrap();
    let expected = BicliqueCover::new(
        9,
        vec![
            Level::new(set1(&[1, 5, 9]), set1(&[3, 7])),
            Level::new(set1(&[1, 2, 8, 9]), set1(&[4, 5, 6])),
            Level::new(set1(&[1, 2, 3, 4]), set1(&[6, 7, 8, 9])),
        ],
    );
    ensure!(nine == expected, "N=9 cover differs:\n{}", nine.pretty(sos2(9).unwrap().labels()));
    Ok("N=3..65 validate at depth ceil(log2(N-1)); N=9 matches the three-level display".into())
}

fn exact_sos3() -> Outcome {
    let g = sosk(6, 3).unwrap().conflict_graph();
    let best = min_cover(&g).map_err(|e| e.to_string())?;
    ensure!(best.depth == 3, "min cover depth {}", best.depth);
    check_cover(&g, &best.cover, "min cover")?;
    let two = min_cover_decide(&g, 2).map_err(|e| e.to_string())?;
    ensure!(two.cover.is_none(), "depth 2 reported satisfiable");
    let ten = BicliqueCover::new(
        10,
        vec![
            Level::new(set1(&[1, 8, 9, 10]), set1(&[4, 5])),
            Level::new(set1(&[1, 2, 10]), set1(&[5, 6, 7])),
            Level::new(set1(&[1, 2, 3, 9, 10]), set1(&[6])),
            Level::new(set1(&[1, 2, 3, 4]), set1(&[7, 8, 9, 10])),
        ],
    );
    check_cover(&sosk(10, 3).unwrap().conflict_graph(), &ten, "SOS3(10)")?;
    Ok(format!("SOS3(6) optimum 3, depth 2 unsat after {} nodes; SOS3(10) four-level cover validates", two.explored))
}

fn lower_bounds() -> Outcome {
    let mut checked = 0;
    for (name, cdc) in corpus(10, 16) {
        if !cdc.is_pairwise_representable().unwrap() {
            continue;
        }
        let best = min_cover_cdc(&cdc, EXACT_NODE_LIMIT).map_err(|e| format!("{name}: {e}"))?;
        check_cover(&cdc.conflict_graph(), &best.cover, &name)?;
        let lb = log_lower_bound(&cdc);
        ensure!(best.depth >= lb, "{name}: depth {} < log bound {lb}", best.depth);
        // A search started at 0 must agree, so the log bound never prunes
        // a shallower cover.
        let free = min_cover(&cdc.conflict_graph()).map_err(|e| e.to_string())?;
        ensure!(free.depth == best.depth, "{name}: unseeded depth {} != {}", free.depth, best.depth);
        if let Some((n, k)) = sosk_params(&name) {
            ensure!(best.depth >= sosk_lower_bound(n, k), "{name}: depth {} < min(k, N-k)", best.depth);
        }
        checked += 1;
    }
    let six = min_cover_cdc(&sosk(6, 3).unwrap(), EXACT_NODE_LIMIT).unwrap();
    let c = sosk(6, 3).unwrap();
    ensure!(six.depth == 3 && log_lower_bound(&c) == 2 && sosk_lower_bound(6, 3) == 3, "SOS3(6) bounds");
    Ok(format!("{checked} pairwise-representable CDCs with |J| <= 10; SOS3(6) optimum 3 = min(k, N-k)"))
}

fn sosk_params(name: &str) -> Option<(usize, usize)> {
    let inner = name.strip_prefix("sosk(")?.strip_suffix(')')?;
    let (n, k) = inner.split_once(',')?;
    Some((n.parse().ok()?, k.parse().ok()?))
}

fn multilinear() -> Outcome {
    for dims in [vec![3, 3], vec![9, 9], vec![4, 3], vec![3, 3, 3]] {
        let cdc = multilinear_grid(&dims).unwrap();
        let cover = multilinear_cover(&dims).map_err(|e| e.to_string())?;
        check_cover(&cdc.conflict_graph(), &cover, &format!("{dims:?}"))?;
        let want: usize = dims.iter().map(|&d| ceil_log2(d - 1)).sum();
        ensure!(cover.depth() == want, "{dims:?}: depth {} != {want}", cover.depth());
    }
    let lb = log_lower_bound(&multilinear_grid(&[9, 9]).unwrap());
    ensure!(lb == 6, "(9,9) log bound {lb}");
    Ok("all four grids validate at the summed depth; (9,9) meets the log bound 6".into())
}

fn triangulations() -> Outcome {
    for (m, n) in [(6, 6), (8, 8)] {
        let want = ceil_log2(m - 1) + ceil_log2(n - 1) + 9;
        for seed in 0..20 {
            let t = random_triangulation(m, n, seed).unwrap();
            let cover = triangulation_cover(&t).map_err(|e| e.to_string())?;
            check_cover(&triangulation_to_cdc(&t).unwrap().conflict_graph(), &cover, &format!("{m}x{n} seed {seed}"))?;
            ensure!(cover.levels.len() == want, "{m}x{n} seed {seed}: {} levels != {want}", cover.levels.len());
        }
    }
    for (name, t, want) in [("union_jack", union_jack(3, 3).unwrap(), 3), ("k1", k1(3, 3).unwrap(), 4)] {
        let out = chromatic_triangulation_cover(&t).map_err(|e| e.to_string())?;
        let cover = out.cover.ok_or(format!("{name}: no colouring"))?;
        check_cover(&triangulation_to_cdc(&t).unwrap().conflict_graph(), &cover, name)?;
        ensure!(cover.depth() == want, "{name}: depth {} != {want}", cover.depth());
    }
    let odd = odd_degree_example();
    let out = chromatic_triangulation_cover(&odd).map_err(|e| e.to_string())?;
    ensure!(out.classes.iter().any(|c| !c.even_degree_condition), "degree condition holds everywhere");
    let cover = out.cover.ok_or("odd-degree example: no colouring")?;
    check_cover(&triangulation_to_cdc(&odd).unwrap().conflict_graph(), &cover, "odd-degree example")?;
    Ok("40 random grids at the stated depth; chromatic depths 3 and 4; odd-degree instance still coloured".into())
}

fn sosk_covers() -> Outcome {
    for (n, k) in [(10, 3), (26, 3), (12, 4)] {
        let cover = sosk_cover(n, k).map_err(|e| e.to_string())?;
        check_cover(&sosk(n, k).unwrap().conflict_graph(), &cover, &format!("({n},{k})"))?;
        let bound = sosk_cover_bound(n, k);
        ensure!(cover.levels.len() <= bound, "({n},{k}): {} levels > {bound}", cover.levels.len());
    }
    let levels = sosk_cover(26, 3).unwrap().levels.len();
    ensure!(levels == 12, "(26,3) has {levels} levels");
    let half = sosk_half_cover(6, 3).unwrap();
    let shown = half.pretty(sosk(6, 3).unwrap().labels());
    let want = "({1}, {4, 5, 6})\n({1, 2}, {5, 6})\n({1, 2, 3}, {6})\n";
    ensure!(shown == want, "half cover:\n{shown}");
    Ok("three instances within the bound; (26,3) has 12 levels; SOS3(6) half cover verbatim".into())
}

fn representability() -> Outcome {
    let mut cases = 0;
    for n in 2..=6 {
        for l in 1..n {
            let c = cardinality(n, l).unwrap();
            for k in 2..=n + 1 {
                let got = c.k_way_representable(k).map_err(|e| e.to_string())?;
                ensure!(got == (k > l), "cardinality({n},{l}) k={k}: {got}");
                cases += 1;
            }
        }
    }
    let mut yes: Vec<(String, Cdc)> = Vec::new();
    for n in 2..=20 {
        for k in 1..=n {
            yes.push((format!("sosk({n},{k})"), sosk(n, k).unwrap()));
        }
    }
    for dims in grid_shapes(20, 3) {
        yes.push((format!("multilinear{dims:?}"), multilinear_grid(&dims).unwrap()));
    }
    for m in 2..=10 {
        for n in 2..=20 / m {
            let mut ts: Vec<_> = [union_jack(m, n), k1(m, n)].into_iter().filter_map(Result::ok).collect();
            ts.extend((0..5).map(|s| random_triangulation(m, n, s).unwrap()));
            if (m - 1) * (n - 1) <= 6 {
                ts.extend(all_triangulations(m, n));
            }
            yes.extend(ts.iter().map(|t| (format!("triangulation({m},{n})"), triangulation_to_cdc(t).unwrap())));
        }
    }
    for (name, c) in &yes {
        ensure!(c.is_pairwise_representable().map_err(|e| e.to_string())?, "{name} not pairwise");
    }
    let mut no = 0;
    for n in 3..=12 {
        for l in 2..n {
            let c = cardinality(n, l).unwrap();
            ensure!(!c.is_pairwise_representable().map_err(|e| e.to_string())?, "cardinality({n},{l}) pairwise");
            no += 1;
        }
    }
    Ok(format!("{cases} cardinality k-way cases; {} pairwise instances; {no} cardinality non-pairwise", yes.len()))
}

fn formulations() -> Outcome {
    let mut checked = 0;
    let mut supports = 0;
    for (name, cdc) in corpus(8, 1 << 9) {
        let mut models = vec![
            jeroslow(&cdc),
            encoded_extended(&cdc, None),
            adhoc_disaggregated(&cdc),
            multiway_ib(&cdc.cnf_ib_scheme(cdc.labels().len()).map_err(|e| format!("{name}: {e}"))?, cdc.labels()),
        ];
        if cdc.is_pairwise_representable().unwrap() {
            models.push(pairwise_ideal(&cdc, &stars_cover(&cdc.conflict_graph())));
        }
        for m in models {
            let m = m.map_err(|e| format!("{name}: {e}"))?;
            let start = Instant::now();
            let r = projection_check(&m, &cdc).map_err(|e| format!("{name}/{}: {e}", m.name))?;
            if verbose() {
                eprintln!("{name}/{}: {} supports in {:.2?}", m.name, r.supports_checked, start.elapsed());
            }
            ensure!(r.passed(), "{name}/{}: {:?}", m.name, r.counterexample);
            supports += r.supports_checked;
            checked += 1;
        }
    }
    Ok(format!("{checked} models, {supports} supports"))
}

fn verbose() -> bool {
    std::env::var_os("ACCEPTANCE_VERBOSE").is_some()
}

fn idealness() -> Outcome {
    let models = [
        pairwise_ideal(&sos2(5).unwrap(), &sos2_gray_cover(5).unwrap()),
        pairwise_ideal(&sosk(6, 3).unwrap(), &sosk_half_cover(6, 3).unwrap()),
        jeroslow(&sos2(4).unwrap()),
    ];
    let mut vertices = Vec::new();
    for m in models {
        let m = m.map_err(|e| e.to_string())?;
        match idealness_check(&m).map_err(|e| e.to_string())? {
            Idealness::Ideal { vertices: v } => vertices.push(v),
            Idealness::Fractional { vertex } => return Err(format!("{}: fractional vertex {vertex:?}", m.name)),
        }
    }
    Ok(format!("all three ideal; vertex counts {vertices:?}"))
}

/// Integer image of one model row.
struct Row {
    terms: Vec<(usize, i64)>,
    sense: Sense,
    rhs: i64,
}

impl Row {
    fn holds(&self, x: &[i64]) -> bool {
        let lhs: i64 = self.terms.iter().map(|&(v, c)| c * x[v]).sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Eq => lhs == self.rhs,
            Sense::Ge => lhs >= self.rhs,
        }
    }
}

fn to_i64(r: &Rational) -> i64 {
    assert!(r.is_integer(), "fractional coefficient");
    i64::try_from(r.to_integer()).unwrap()
}

/// One level's `x`, `y` values and the values each of its `z` may take.
struct LevelState {
    xy: Vec<(usize, i64)>,
    z: Vec<(usize, &'static [i64])>,
}

/// Enumerates every binary assignment of the cover-existence model. `x` and
/// `y` range over all pairs with `x + y <= 1`. Rows with a single `z` only
/// involve that level's `x` and `y`, so each level is enumerated on its own
/// and every `z` limited to the values its rows allow; the remaining rows
/// are checked on every combination across levels. Returns the number of
/// feasible assignments, after checking that each decodes to a valid cover.
fn enumerate_assignments(graph: &ConflictGraph, t: usize) -> Result<usize, String> {
    let mip = feasibility_mip(graph, t).map_err(|e| e.to_string())?;
    let m = &mip.model;
    let n = mip.node_count;
    let mut level_of = vec![None; m.variables().len()];
    for r in 0..n {
        for j in 0..t {
            level_of[mip.x[r][j]] = Some(j);
            level_of[mip.y[r][j]] = Some(j);
        }
    }
    let mut is_z = vec![false; m.variables().len()];
    for (_, _, zs) in &mip.z {
        for (j, &v) in zs.iter().enumerate() {
            is_z[v] = true;
            level_of[v] = Some(j);
        }
    }
    let mut local: Vec<Vec<Row>> = (0..m.variables().len()).map(|_| Vec::new()).collect();
    let mut global = Vec::new();
    for c in m.constraints() {
        let row =
            Row { terms: c.terms.iter().map(|(v, q)| (*v, to_i64(q))).collect(), sense: c.sense, rhs: to_i64(&c.rhs) };
        let zs: Vec<usize> = row.terms.iter().map(|&(v, _)| v).filter(|&v| is_z[v]).collect();
        match zs.as_slice() {
            [z] => {
                if row.terms.iter().any(|&(v, _)| level_of[v] != level_of[*z]) {
                    return Err(format!("row {} mixes levels", c.name));
                }
                local[*z].push(row);
            }
            _ => global.push(row),
        }
    }
    let mut values = vec![0i64; m.variables().len()];
    let mut tables: Vec<Vec<LevelState>> = Vec::with_capacity(t);
    for j in 0..t {
        let cells: Vec<(usize, usize)> = (0..n).map(|r| (mip.x[r][j], mip.y[r][j])).collect();
        let zvars: Vec<usize> = mip.z.iter().map(|(_, _, zs)| zs[j]).collect();
        let mut table = Vec::new();
        'states: for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let mut xy = Vec::with_capacity(2 * n);
            for &(xv, yv) in &cells {
                values[xv] = (c % 3 == 1) as i64;
                values[yv] = (c % 3 == 2) as i64;
                xy.push((xv, values[xv]));
                xy.push((yv, values[yv]));
                c /= 3;
            }
            let mut z = Vec::with_capacity(zvars.len());
            for &zv in &zvars {
                let mut ok = |v: i64| {
                    values[zv] = v;
                    local[zv].iter().all(|r| r.holds(&values))
                };
                let allowed: &'static [i64] = match (ok(0), ok(1)) {
                    (true, true) => &[0, 1],
                    (true, false) => &[0],
                    (false, true) => &[1],
                    (false, false) => continue 'states,
                };
                z.push((zv, allowed));
            }
            table.push(LevelState { xy, z });
        }
        tables.push(table);
    }
    if tables.iter().any(Vec::is_empty) {
        return Ok(0);
    }
    let mut feasible = 0;
    let mut idx = vec![0usize; t];
    loop {
        let states: Vec<&LevelState> = idx.iter().zip(&tables).map(|(&i, tab)| &tab[i]).collect();
        for s in &states {
            for &(v, x) in &s.xy {
                values[v] = x;
            }
        }
        let zs: Vec<(usize, &[i64])> = states.iter().flat_map(|s| s.z.iter().copied()).collect();
        let mut pick = vec![0usize; zs.len()];
        loop {
            for (&(v, allowed), &p) in zs.iter().zip(&pick) {
                values[v] = allowed[p];
            }
            if global.iter().all(|r| r.holds(&values)) {
                if feasible == 0 {
                    let exact: Vec<Rational> = values.iter().map(|&v| Rational::from_integer(v.into())).collect();
                    if !m.is_satisfied(&exact) {
                        return Err("integer evaluation disagrees with the model".into());
                    }
                }
                check_cover(graph, &decode(&mip, &values), "decoded assignment")?;
                feasible += 1;
            }
            let Some(i) = (0..pick.len()).find(|&i| pick[i] + 1 < zs[i].1.len()) else { break };
            pick[i] += 1;
            pick[..i].iter_mut().for_each(|p| *p = 0);
        }
        let Some(l) = (0..t).find(|&l| idx[l] + 1 < tables[l].len()) else { break };
        idx[l] += 1;
        idx[..l].iter_mut().for_each(|p| *p = 0);
    }
    Ok(feasible)
}

/// `A^j = {r : x_rj = 1}`, `B^j = {r : y_rj = 1}`.
fn decode(mip: &FeasibilityMip, values: &[i64]) -> BicliqueCover {
    let levels = (0..mip.depth)
        .map(|j| {
            let side = |vars: &[Vec<usize>]| (0..mip.node_count).filter(|&r| values[vars[r][j]] == 1).collect();
            Level::new(side(&mip.x), side(&mip.y))
        })
        .collect();
    BicliqueCover::new(mip.node_count, levels)
}

fn covermip_cross_check() -> Outcome {
    let mut graphs = 0;
    let mut solutions = 0;
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0..1u32 << pairs.len() {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            let g = ConflictGraph::from_edges(n, edges).unwrap();
            for t in 0..=2 {
                let decided = min_cover_decide(&g, t).map_err(|e| e.to_string())?;
                if let Some(c) = &decided.cover {
                    check_cover(&g, c, "search cover")?;
                }
                let brute = if t == 0 { g.edge_count() == 0 } else { enumerate_assignments(&g, t)? > 0 };
                if t > 0 && brute {
                    solutions += 1;
                }
                ensure!(
                    brute == decided.cover.is_some(),
                    "n={n} edges {:?} t={t}: enumeration {brute}, search {}",
                    g.edges(),
                    decided.cover.is_some()
                );
            }
            graphs += 1;
        }
    }
    Ok(format!("{graphs} labelled graphs x t=0..2 agree; {solutions} satisfiable instances decoded"))
}

fn branching() -> Outcome {
    let cover =
        BicliqueCover::new(5, vec![Level::new(set1(&[1, 2]), set1(&[4, 5])), Level::new(set1(&[3]), set1(&[1, 5]))]);
    let m = pairwise_ideal(&sos2(5).unwrap(), &cover).map_err(|e| e.to_string())?;
    let r = branching_report(&m).map_err(|e| e.to_string())?;
    let down = &r.row(2, BranchDirection::Down).ok_or("missing row")?.forced;
    let up = &r.row(2, BranchDirection::Up).ok_or("missing row")?.forced;
    ensure!(*down == set1(&[3]), "z2 down forces {down:?}");
    ensure!(*up == set1(&[1, 5]), "z2 up forces {up:?}");
    ensure!(r.covers_ground, "some multiplier is never forced");
    ensure!(r.holds(), "report:\n{r}");
    Ok("z2 down forces {3}, z2 up forces {1,5}; every multiplier is forced by some branch".into())
}

fn geometry() -> Outcome {
    match validate_partition(&t_junction()) {
        Err(v) if v.iter().any(|x| matches!(x, PartitionViolation::InternalVertex { .. })) => {}
        other => return Err(format!("T-junction: {other:?}")),
    }
    validate_partition(&square_ring()).map_err(|v| format!("square ring: {v:?}"))?;
    validate_partition(&triangle_ring()).map_err(|v| format!("triangle ring: {v:?}"))?;
    let mut valid = 0;
    let mut seed = 0;
    let mut ranks = [0usize; 4];
    while valid < 50 {
        ensure!(seed < 10_000, "only {valid} valid partitions found");
        let p = random_partition(seed);
        seed += 1;
        if validate_partition(&p).is_err() {
            continue;
        }
        let r = partition_rank(&p).map_err(|e| format!("seed {}: {e}", seed - 1))?;
        ensure!(r <= 3, "seed {}: rank {r}", seed - 1);
        ranks[r] += 1;
        valid += 1;
    }
    Ok(format!("T-junction rejected, rings accepted; 50 valid partitions from {seed} seeds, ranks 0..3 {ranks:?}"))
}

/// Name, check, and budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("SOS2 Gray covers", gray_covers, 1),
        ("exact search on SOS3(6)", exact_sos3, 30),
        ("lower bounds", lower_bounds, 60),
        ("multilinear covers", multilinear, 5),
        ("triangulation covers", triangulations, 10),
        ("SOSk covers", sosk_covers, 5),
        ("representability", representability, 30),
        ("formulation correctness", formulations, 120),
        ("idealness", idealness, 120),
        ("cover-existence model cross-check", covermip_cross_check, 120),
        ("branching independence", branching, 1),
        ("geometry", geometry, 30),
    ];
    panic::set_hook(Box::new(|_| {}));
    // Criterion numbers given on the command line restrict the run.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let result = match result {
            Ok(_) if took > Duration::from_secs(*budget) => Err(format!("exceeded {budget}s budget")),
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({:.2}s): {detail}", i + 1, took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({:.2}s): {why}", i + 1, took.as_secs_f64());
            }
        }
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
