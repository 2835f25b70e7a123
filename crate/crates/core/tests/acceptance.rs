//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gmac_core::channel::{Alphabets, ChannelSpec};
use gmac_core::cli::{cmd_region, RegionArgs};
use gmac_core::fixtures;
use gmac_core::infotheory::{AnyScheme, PairTable, SchemeKind, SchemeOneSet, SchemeOneSetOuter, SchemeTwoSet};
use gmac_core::one_set_bounds::{inner_polytope, outer_polytope, secrecy_capacity_value, secrecy_polytope, OneSetTerms};
use gmac_core::optimizer::{
    assemble_region, enumerate_schemes_grid, maximize, maximize_secrecy_capacity, scheme_shape, Bound, SearchConfig,
    Strategy, Variant,
};
use gmac_core::prob::Kernel;
use gmac_core::regions::{RatePolytope, RateRegion};
use gmac_core::two_set_bounds::{
    equivocation_set_explicit, equivocation_set_oracle, mac_polytope, two_set_region_piece, OracleMode,
};
use gmac_core::wiretap_sim::{simulate_one, CodeSizes, Construction, InputDist};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let t: f64 = w.iter().sum();
    w.iter().map(|v| v / t).collect()
}

fn kernel(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Kernel {
    Kernel::new(rows, cols, (0..rows).flat_map(|_| simplex(rng, cols)).collect()).unwrap()
}

fn pair(rng: &mut ChaCha8Rng, q: usize, x2: usize) -> PairTable {
    PairTable::new(q, x2, simplex(rng, q * x2)).unwrap()
}

fn one_set(rng: &mut ChaCha8Rng, q: usize, u: usize, s: Alphabets) -> SchemeOneSet {
    SchemeOneSet::new(pair(rng, q, s.x2), kernel(rng, q, u), kernel(rng, u, s.x1)).unwrap()
}

fn directions(n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect()
}

fn h(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Entropy of the marginal on the tuple positions in `keep`.
fn marginal_entropy(joint: &[(Vec<usize>, f64)], keep: &[usize]) -> f64 {
    let mut m: HashMap<Vec<usize>, f64> = HashMap::new();
    for (k, p) in joint {
        *m.entry(keep.iter().map(|&i| k[i]).collect()).or_default() += p;
    }
    m.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

fn within(t: Instant, limit: Duration) -> std::result::Result<(), String> {
    if t.elapsed() > limit {
        Err(format!("took {:.1?}, limit {limit:?}", t.elapsed()))
    } else {
        Ok(())
    }
}

// Oracle: (U = X1, Re = 0) reduces to the MAC with degraded message sets,
// whose polytope is computed here from its own joint over (Q, X1, X2, Y).
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sizes = Alphabets::new(2, 2, 4, 2, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let ch = ChannelSpec::random(sizes, &mut rng);
        let p_qx2 = pair(&mut rng, 2, 2);
        let p_x1_q = kernel(&mut rng, 2, 2);
        let scheme = SchemeOneSet::with_u_equal_x1(p_qx2.clone(), p_x1_q.clone()).unwrap();

        let mut joint = Vec::new();
        for q in 0..2 {
            for x1 in 0..2 {
                for x2 in 0..2 {
                    for y in 0..4 {
                        let mut py = 0.0;
                        for y1 in 0..2 {
                            for y2 in 0..2 {
                                py += ch.p(x1, x2, y, y1, y2);
                            }
                        }
                        joint.push((vec![q, x1, x2, y], p_qx2.get(q, x2) * p_x1_q.get(q, x1) * py));
                    }
                }
            }
        }
        let hm = |k: &[usize]| marginal_entropy(&joint, k);
        // I(X1;Y|X2,Q) and I(X1,X2;Y)
        let a = hm(&[0, 1, 2]) + hm(&[0, 2, 3]) - hm(&[0, 2]) - hm(&[0, 1, 2, 3]);
        let b = hm(&[1, 2]) + hm(&[3]) - hm(&[1, 2, 3]);
        let mac = [[0.0, 0.0], [b, 0.0], [b - a, a], [0.0, a]];

        let inner = inner_polytope(&scheme, &ch).map_err(|e| e.to_string())?;
        for dir in directions(32) {
            let want = mac.iter().map(|v| v[0] * dir[0] + v[1] * dir[1]).fold(f64::NEG_INFINITY, f64::max);
            let mut got = f64::NEG_INFINITY;
            for piece in inner.pieces() {
                if let Some((v, _)) = piece.optimize(&[dir[0], dir[1], 0.0], true, &[(2, 0.0)]).unwrap() {
                    got = got.max(v);
                }
            }
            worst = worst.max((got - want).abs());
        }
    }
    ensure!(worst <= 1e-9, "max support discrepancy {worst:e}");
    within(start, Duration::from_secs(10))?;
    Ok(format!("max discrepancy {worst:.1e}"))
}

// Oracle: the same grid search over I(U;Y) - I(U;Y2), evaluated with a
// separate entropy routine.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let config = SearchConfig {
        cardinalities: [1, 3, 1],
        strategy: Strategy::Grid,
        grid_resolution: 5,
        ..SearchConfig::default()
    };
    let mut worst: f64 = 0.0;
    for (main, tap) in [(0.0, 0.2), (0.05, 0.3), (0.1, 0.25), (0.15, 0.4), (0.2, 0.2)] {
        let ch = fixtures::binary_wiretap(main, tap);
        let s = ch.sizes();
        ensure!(s.x2 == 1, "fixture has |X2| = {}", s.x2);
        let ours = maximize_secrecy_capacity(&ch, 0.0, &config, Variant::General).map_err(|e| e.to_string())?;
        let shape = scheme_shape(SchemeKind::OneSet, s, &config).unwrap();
        let direct = maximize(&shape, &config, |scheme| {
            let AnyScheme::OneSet(sc) = scheme else { unreachable!() };
            let mut joint = Vec::new();
            for u in 0..3 {
                let pu = sc.p_u_given_q.get(0, u);
                for x1 in 0..s.x1 {
                    for y in 0..s.y {
                        for y1 in 0..s.y1 {
                            for y2 in 0..s.y2 {
                                joint.push((vec![u, y, y2], pu * sc.p_x1_given_u.get(u, x1) * ch.p(x1, 0, y, y1, y2)));
                            }
                        }
                    }
                }
            }
            let hm = |k: &[usize]| marginal_entropy(&joint, k);
            let i_y = hm(&[0]) + hm(&[1]) - hm(&[0, 1]);
            let i_y2 = hm(&[0]) + hm(&[2]) - hm(&[0, 2]);
            Ok(i_y - i_y2)
        })
        .unwrap();
        worst = worst.max((ours.value - direct.value.max(0.0)).abs());
    }
    ensure!(worst <= 0.02, "max gap {worst}");
    within(start, Duration::from_secs(120))?;
    Ok(format!("max gap {worst:.2e} bits"))
}

/// Samples a 2-D polytope at its vertices, along its edges and inside.
fn sample_polygon(piece: &RatePolytope, step: f64) -> Vec<[f64; 2]> {
    let verts: Vec<[f64; 2]> = piece.vertices().unwrap().iter().map(|v| [v[0], v[1]]).collect();
    let mut out = verts.clone();
    let n = verts.len() as f64;
    let c = verts.iter().fold([0.0, 0.0], |acc, v| [acc[0] + v[0] / n, acc[1] + v[1] / n]);
    let mut ring = verts.clone();
    ring.sort_by(|p, q| {
        let ap = (p[1] - c[1]).atan2(p[0] - c[0]);
        let aq = (q[1] - c[1]).atan2(q[0] - c[0]);
        ap.total_cmp(&aq)
    });
    for k in 0..ring.len() {
        let (p, q) = (ring[k], ring[(k + 1) % ring.len()]);
        let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
        let m = (len / (step / 10.0)).ceil() as usize;
        for i in 0..=m {
            let t = i as f64 / m.max(1) as f64;
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    let hi = verts.iter().fold([0.0f64, 0.0f64], |acc, v| [acc[0].max(v[0]), acc[1].max(v[1])]);
    let half = step / 2.0;
    for i in 0..=((hi[0] / half).floor() as usize) {
        for j in 0..=((hi[1] / half).floor() as usize) {
            let p = [i as f64 * half, j as f64 * half];
            if piece.contains(&p, 1e-12).unwrap() {
                out.push(p);
            }
        }
    }
    out
}

/// Nearest-point lookup on a bucket grid.
struct Buckets {
    cell: f64,
    map: HashMap<(i64, i64), Vec<[f64; 2]>>,
}

impl Buckets {
    fn new(points: &[[f64; 2]], cell: f64) -> Self {
        let mut map: HashMap<(i64, i64), Vec<[f64; 2]>> = HashMap::new();
        for p in points {
            map.entry(Self::key(p, cell)).or_default().push(*p);
        }
        Self { cell, map }
    }

    fn key(p: &[f64; 2], cell: f64) -> (i64, i64) {
        ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64)
    }

    /// (L-infinity, Euclidean) distance to the nearest point, searching
    /// `reach` cells around `p`; infinite if none is that close.
    fn nearest(&self, p: &[f64; 2], reach: i64) -> (f64, f64) {
        let (kx, ky) = Self::key(p, self.cell);
        let mut best = (f64::INFINITY, f64::INFINITY);
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                for q in self.map.get(&(kx + dx, ky + dy)).into_iter().flatten() {
                    let (ex, ey) = ((p[0] - q[0]).abs(), (p[1] - q[1]).abs());
                    best.0 = best.0.min(ex.max(ey));
                    best.1 = best.1.min(ex.hypot(ey));
                }
            }
        }
        best
    }
}

/// Hausdorff distances (L-infinity, Euclidean) between an explicit region
/// and an oracle cloud.
fn hausdorff(explicit: &RateRegion, cloud: &[[f64; 2]], step: f64) -> (f64, f64) {
    let samples: Vec<[f64; 2]> = explicit.pieces().iter().flat_map(|p| sample_polygon(p, step)).collect();
    let cloud_index = Buckets::new(cloud, step);
    let sample_index = Buckets::new(&samples, step);
    let mut d = (0.0f64, 0.0f64);
    for s in &samples {
        let n = cloud_index.nearest(s, 3);
        d = (d.0.max(n.0), d.1.max(n.1));
    }
    for c in cloud {
        if !explicit.contains(c, 1e-9).unwrap() {
            let n = sample_index.nearest(c, 3);
            d = (d.0.max(n.0), d.1.max(n.1));
        }
    }
    d
}

// Oracle: brute-force union of rectangles over the auxiliary rate lattice.
fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // a binary-output channel and one with a noiseless destination, so that
    // the MAC polytopes hold rate triples well away from the origin
    let quiet = ChannelSpec::from_marginals(
        2,
        2,
        &Kernel::identity(4),
        &Kernel::from_rows(vec![vec![0.9, 0.1], vec![0.2, 0.8], vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap(),
        &Kernel::from_rows(vec![vec![0.85, 0.15], vec![0.85, 0.15], vec![0.1, 0.9], vec![0.1, 0.9]]).unwrap(),
    )
    .unwrap();
    let channels = [fixtures::leaky_xor(0.05, 0.2, 0.3), quiet];
    let step = 0.01;
    let (mut worst_inf, mut worst_l2, mut triples): (f64, f64, usize) = (0.0, 0.0, 0);
    for n in 0..10 {
        let ch = &channels[n % 2];
        // half the draws use peaked kernels, which reach larger rates
        let power = if n % 4 < 2 { 1 } else { 4 };
        let mut k = || {
            let rows: Vec<Vec<f64>> = (0..2)
                .map(|_| {
                    let w: Vec<f64> = simplex(&mut rng, 2).iter().map(|v| v.powi(power)).collect();
                    let t: f64 = w.iter().sum();
                    w.iter().map(|v| v / t).collect()
                })
                .collect();
            Kernel::from_rows(rows).unwrap()
        };
        let (pu, px1, pv, px2) = (k(), k(), k(), k());
        let scheme = SchemeTwoSet::new(simplex(&mut rng, 2), pu, px1, pv, px2).unwrap();
        let mac = mac_polytope(&scheme, ch).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                for k in 0..40 {
                    let r = [i as f64 * 0.05, j as f64 * 0.05, k as f64 * 0.05];
                    if !mac.contains(&r, 0.0).unwrap() {
                        continue;
                    }
                    triples += 1;
                    let explicit = equivocation_set_explicit(&scheme, ch, r[0], r[1], r[2]).unwrap();
                    let cloud = equivocation_set_oracle(&scheme, ch, r[0], r[1], r[2], step, OracleMode::Coupled).unwrap();
                    ensure!(!cloud.is_empty(), "empty oracle inside the MAC at {r:?}");
                    let (dinf, dl2) = hausdorff(&explicit, &cloud, step);
                    worst_inf = worst_inf.max(dinf);
                    worst_l2 = worst_l2.max(dl2);
                }
            }
        }
    }
    ensure!(triples >= 100, "only {triples} rate triples inside the MAC polytopes");
    ensure!(worst_inf <= step + 1e-9, "L-inf Hausdorff {worst_inf}");
    ensure!(worst_l2 <= 0.02, "Euclidean Hausdorff {worst_l2}");
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "{triples} rate triples, Hausdorff L-inf {worst_inf:.4}, Euclidean {worst_l2:.4}"
    ))
}

// Oracle: every region depends on the channel only through its three
// receiver marginals, so support values cannot move.
fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sizes = Alphabets::new(2, 2, 2, 2, 2);
    let ch = ChannelSpec::random(sizes, &mut rng);
    let inner = one_set(&mut rng, 2, 3, sizes);
    let outer = SchemeOneSetOuter::extend(&inner, kernel(&mut rng, 2, 2)).unwrap();
    let two = SchemeTwoSet::new(
        simplex(&mut rng, 2),
        kernel(&mut rng, 2, 2),
        kernel(&mut rng, 2, 2),
        kernel(&mut rng, 2, 2),
        kernel(&mut rng, 2, 2),
    )
    .unwrap();
    let regions = |c: &ChannelSpec| -> Vec<RateRegion> {
        vec![
            inner_polytope(&inner, c).unwrap(),
            outer_polytope(&outer, c).unwrap(),
            secrecy_polytope(&inner, c).unwrap(),
            two_set_region_piece(&two, c).unwrap(),
        ]
    };
    let supports = |rs: &[RateRegion], rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut out = Vec::new();
        for r in rs {
            let d = r.coords().len();
            for _ in 0..12 {
                let dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                out.push(r.support(&dir).unwrap());
            }
        }
        out
    };
    let base = regions(&ch);
    let dirs_seed = 40;
    let want = supports(&base, &mut ChaCha8Rng::seed_from_u64(dirs_seed));
    let (mut worst, mut moved): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let p = ch.perturb_preserving_marginals(&mut rng, 20);
        moved = moved.max(p.prob().iter().zip(ch.prob()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        let got = supports(&regions(&p), &mut ChaCha8Rng::seed_from_u64(dirs_seed));
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
    }
    ensure!(moved > 1e-3, "perturbations barely changed the channel ({moved:e})");
    ensure!(worst <= 1e-9, "support moved by {worst:e}");
    Ok(format!("max support change {worst:.1e} (joint moved up to {moved:.3})"))
}

// Oracle: uniform X1 is optimal on this symmetric pair, giving
// h(0.1 * 0.9 * 2) - h(0.1).
fn criterion_5() -> Outcome {
    let start = Instant::now();
    let ch = fixtures::binary_degraded(0.1, 0.1);
    let config = SearchConfig {
        cardinalities: [1, 1, 1],
        // multiples of 1/4, so the uniform input is on the grid
        grid_resolution: 5,
        ..SearchConfig::default()
    };
    let got = maximize_secrecy_capacity(&ch, 0.0, &config, Variant::Degraded)
        .map_err(|e| e.to_string())?
        .value;
    let want = h(0.18) - h(0.1);
    ensure!((got - want).abs() <= 0.02, "{got} vs {want}");
    within(start, Duration::from_secs(60))?;
    Ok(format!("{got:.4} vs closed form {want:.4}"))
}

fn distance_to_polyline(p: [f64; 2], line: &[[f64; 2]]) -> f64 {
    line.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
            (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
        })
        .fold(f64::INFINITY, f64::min)
}

// Oracle: on a noiseless MAC with blind users the secrecy region is
// {R1 <= 1, R0 + R1 <= 2}.
fn criterion_6() -> Outcome {
    let ch = fixtures::clean_mac();
    let config = SearchConfig::default();
    let region = assemble_region(&ch, Bound::SecrecyOneSet, &config).map_err(|e| e.to_string())?;
    let frontier: Vec<[f64; 2]> = region
        .region
        .frontier(("R0", "R1"), &[], 33)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|p| p.plane)
        .collect();
    let truth = [[0.0, 1.0], [1.0, 1.0], [2.0, 0.0]];
    let mut gap: f64 = 0.0;
    for p in &frontier {
        gap = gap.max(distance_to_polyline(*p, &truth));
    }
    for k in 0..=200 {
        let t = k as f64 / 100.0;
        let q = if t <= 1.0 { [t, 1.0] } else { [t, 2.0 - t] };
        gap = gap.max(distance_to_polyline(q, &frontier));
    }
    let best = maximize_secrecy_capacity(&ch, 0.0, &config, Variant::General)
        .map_err(|e| e.to_string())?
        .value;
    ensure!(gap <= 0.02, "frontier off by {gap}");
    ensure!(best >= 0.99, "secrecy capacity {best}");
    Ok(format!("frontier gap {gap:.1e}, capacity {best:.4}"))
}

// Oracle: Y2 = X1 makes I(U;Y2|X2,Q) = I(U;Y|X2,Q) for every scheme.
fn criterion_7() -> Outcome {
    let ch = fixtures::noiseless_wiretapper();
    let config = SearchConfig {
        cardinalities: [2, 3, 1],
        grid_resolution: 3,
        ..SearchConfig::default()
    };
    let shape = scheme_shape(SchemeKind::OneSet, ch.sizes(), &config).unwrap();
    let mut count = 0;
    for s in enumerate_schemes_grid(&shape, config.grid_resolution).unwrap() {
        let Ok(AnyScheme::OneSet(s)) = s else {
            return Err("grid produced a non-one-set scheme".into());
        };
        for r0 in [0.0, 0.3, 1.0] {
            let v = secrecy_capacity_value(&s, &ch, r0).unwrap();
            ensure!(v == 0.0, "value {v:e} at R0 = {r0}");
        }
        count += 1;
    }
    let best = maximize_secrecy_capacity(&ch, 0.0, &config, Variant::General).unwrap().value;
    ensure!(best == 0.0, "search returned {best:e}");
    Ok(format!("{count} schemes, all exactly 0"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let uniform = InputDist::uniform(2, 2);
    let sizes = |m: [usize; 3], j: [usize; 2]| CodeSizes {
        n: 4,
        m0: m[0],
        m1: m[1],
        m2: m[2],
        j1: j[0],
        j2: j[1],
    };
    let noise = fixtures::pure_noise_wiretap();
    for seed in 0..5 {
        let r = simulate_one(&noise, sizes([1, 4, 1], [1, 1]), &uniform, seed, Construction::Random).unwrap();
        ensure!(r.equivocation_user2 == 0.5, "equivocation {} (seed {seed})", r.equivocation_user2);
        ensure!((r.joint_mass - 1.0).abs() <= 1e-9, "mass {}", r.joint_mass);
    }
    let blind = fixtures::blind_destination();
    for (m, j) in [([1, 4, 1], [1, 1]), ([2, 2, 2], [2, 1]), ([1, 3, 2], [1, 2])] {
        let r = simulate_one(&blind, sizes(m, j), &uniform, 9, Construction::Random).unwrap();
        let total = (m[0] * m[1] * m[2]) as f64;
        ensure!(r.error_probability == 1.0 - 1.0 / total, "P_e {} for M = {m:?}", r.error_probability);
        ensure!((r.joint_mass - 1.0).abs() <= 1e-9, "mass {}", r.joint_mass);
    }
    within(start, Duration::from_secs(60))?;
    Ok("equivocation 0.5 exactly, P_e = 1 - 1/M exactly, mass 1".into())
}

// Only (scheme, R0) pairs whose secrecy piece is nonempty and with
// R0 <= b - d are drawn, so that (R0, value) is a boundary point.
fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sizes = Alphabets::new(2, 2, 3, 2, 2);
    let (mut checked, mut drawn) = (0, 0);
    while checked < 100 {
        drawn += 1;
        ensure!(drawn < 100_000, "could not draw 100 usable schemes");
        let ch = ChannelSpec::random(sizes, &mut rng);
        let scheme = one_set(&mut rng, 2, 3, sizes);
        let t = OneSetTerms::of_scheme(&scheme, &ch).unwrap();
        if t.a - t.d <= 0.0 || t.b - t.d <= 0.0 {
            continue;
        }
        let r0 = rng.gen_range(0.0..=(t.b - t.d));
        let value = secrecy_capacity_value(&scheme, &ch, r0).unwrap();
        let region = secrecy_polytope(&scheme, &ch).unwrap();
        ensure!(region.contains(&[r0, value], 1e-9).unwrap(), "(R0, value) = ({r0}, {value}) outside");
        ensure!(!region.contains(&[r0, value + 1e-6], 1e-9).unwrap(), "(R0, value + 1e-6) inside at R0 = {r0}");
        checked += 1;
    }
    Ok(format!("{checked} boundary points ({drawn} draws)"))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("search.json");
    std::fs::write(&config, r#"{"cardinalities": [1, 2, 1], "strategy": "random", "sample_count": 40, "seed": 5}"#)
        .unwrap();
    let args = RegionArgs {
        channel: "leaky-xor".into(),
        bound: Bound::SecrecyOneSet,
        config: Some(config),
        plane: Some("R0,R1".into()),
        fix: Vec::new(),
        resolution: 33,
        out: None,
        emit_plot: None,
    };
    let a = cmd_region(&args).map_err(|e| e.to_string())?;
    let b = cmd_region(&args).map_err(|e| e.to_string())?;
    ensure!(a.csv.as_bytes() == b.csv.as_bytes(), "frontier CSVs differ");
    ensure!(a.witnesses == b.witnesses, "witness sidecars differ");
    ensure!(a.csv.lines().count() > 2, "frontier has too few points:\n{}", a.csv);
    Ok(format!("{} frontier rows identical", a.csv.lines().count() - 1))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("degraded-message-set reduction", criterion_1),
        ("wiretap reduction", criterion_2),
        ("oracle equivalence", criterion_3),
        ("marginal invariance", criterion_4),
        ("degraded closed form", criterion_5),
        ("clean MAC", criterion_6),
        ("leakage collapse", criterion_7),
        ("simulator exactness", criterion_8),
        ("secrecy boundary", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.2}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why} [{secs:.2}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
