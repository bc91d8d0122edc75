mod common;

use fcc_core::balls::{diameter, shell, shell_ball, GraphKind, ShellFamily, ShellKind};
use fcc_core::colorings::{
    colors_used, fundamental_window, verify_displacement, verify_window, window_for, ColoringSpec,
};
use fcc_core::lattice::{
    ball_region, bfs_distances_from, distance, read_region, slab_distance, write_region, Metric,
    Region, Site,
};
use fcc_core::search::{
    export_dimacs, k_colorable, parse_dimacs, replay_dimacs, Anchor, Budget, Constraint,
    SearchProblem, SearchVerdict,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn any_site(r: i64) -> impl Strategy<Value = Site> {
    (-r..=r, -r..=r, -r..=r).prop_map(|(x, y, z)| {
        // snap x and y onto the parity class of z
        let fix = |v: i64| if (v - z).rem_euclid(2) == 0 { v } else { v + 1 };
        Site::new(fix(x), fix(y), z).unwrap()
    })
}

proptest! {
    #[test]
    fn distance_is_a_metric(u in any_site(12), v in any_site(12), w in any_site(12)) {
        prop_assert_eq!(distance(u, v), distance(v, u));
        prop_assert_eq!(distance(u, v) == 0, u == v);
        prop_assert!(distance(u, w) <= distance(u, v) + distance(v, w));
    }

    #[test]
    fn distance_is_translation_invariant(u in any_site(8), v in any_site(8), t in any_site(8)) {
        let shift = |s: Site| Site::new(s.x() + t.x(), s.y() + t.y(), s.z() + t.z()).unwrap();
        prop_assert_eq!(distance(shift(u), shift(v)), distance(u, v));
    }

    #[test]
    fn distance_matches_bfs(v in any_site(5)) {
        let bfs = bfs_distances_from(Site::ORIGIN, 12);
        prop_assert_eq!(bfs.get(&v).copied(), Some(distance(Site::ORIGIN, v)));
    }

    #[test]
    fn neighbors_are_at_distance_one(u in any_site(20)) {
        for n in u.neighbors() {
            prop_assert_eq!(distance(u, n), 1);
        }
    }

    #[test]
    fn parity_is_enforced(x in -9i64..9, y in -9i64..9, z in -9i64..9) {
        let valid = (x - z).rem_euclid(2) == 0 && (y - z).rem_euclid(2) == 0;
        prop_assert_eq!(Site::new(x, y, z).is_ok(), valid);
    }

    #[test]
    fn slab_distance_dominates_ambient(
        (x1, y1, z1, x2, y2, z2) in (-6i64..6, -6i64..6, 0i64..3, -6i64..6, -6i64..6, 0i64..3)
    ) {
        let fix = |v: i64, z: i64| if (v - z).rem_euclid(2) == 0 { v } else { v + 1 };
        let u = Site::new(fix(x1, z1), fix(y1, z1), z1).unwrap();
        let v = Site::new(fix(x2, z2), fix(y2, z2), z2).unwrap();
        let slab = slab_distance(u, v, 0, 2).unwrap();
        prop_assert!(slab >= distance(u, v));
    }

    #[test]
    fn builtin_colors_stay_in_palette(s in any_site(40), d in 1u32..7) {
        let specs = [
            ColoringSpec::Power2Mod13,
            ColoringSpec::Power3Mod30,
            ColoringSpec::slab_general(d).unwrap(),
        ];
        for spec in specs {
            prop_assert!(spec.color(s).unwrap() < spec.palette_size());
        }
        let in_slab = |k2: i64| (0..=k2).contains(&s.z());
        for (spec, k2) in [(ColoringSpec::slab01(d).unwrap(), 1), (ColoringSpec::slab02(d).unwrap(), 2)] {
            match spec.color(s) {
                Ok(c) => prop_assert!(in_slab(k2) && c < spec.palette_size()),
                Err(_) => prop_assert!(!in_slab(k2)),
            }
        }
    }

    #[test]
    fn colorings_are_periodic(s in any_site(30), d in 1u32..6) {
        for spec in [
            ColoringSpec::Power2Mod13,
            ColoringSpec::Power3Mod30,
            ColoringSpec::slab_general(d).unwrap(),
        ] {
            let (px, py, pz) = spec.periods().unwrap();
            let pz = pz.unwrap();
            let c = spec.color(s).unwrap();
            for (dx, dy, dz) in [(px, 0, 0), (0, py, 0), (0, 0, pz)] {
                let t = Site::new(s.x() + dx, s.y() + dy, s.z() + dz).unwrap();
                prop_assert_eq!(spec.color(t).unwrap(), c);
            }
        }
    }

    #[test]
    fn region_file_round_trip(c in any_site(6), r in 0u32..3) {
        let region = ball_region(c, r).unwrap();
        let mut buf = Vec::new();
        write_region(&region, &mut buf).unwrap();
        let back = read_region(buf.as_slice()).unwrap();
        prop_assert_eq!(back.sites(), region.sites());
    }

    #[test]
    fn search_agrees_with_enumeration(seed in any::<u64>(), n in 1usize..9, d in 1u32..3, internal in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = common::random_region(&mut rng, n);
        let metric = if internal { Metric::RegionInternal } else { Metric::Ambient };
        for k in 1..=common::max_k(n, 2e5) {
            let p = SearchProblem::new(region.clone(), d, k).with_metric(metric);
            let got = matches!(k_colorable(&p).unwrap().verdict, SearchVerdict::Colorable(_));
            prop_assert_eq!(got, common::naive_colorable(&region, d, k, metric, &[]));
        }
    }

    #[test]
    fn constraints_agree_with_enumeration(seed in any::<u64>(), n in 2usize..8, k in 1u32..4, picks in prop::collection::vec((any::<bool>(), 0usize..8, 0usize..8), 0..4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = common::random_region(&mut rng, n);
        let s = region.sites();
        let constraints: Vec<Constraint> = picks
            .into_iter()
            .filter(|&(_, a, b)| a < n && b < n && a != b)
            .map(|(eq, a, b)| if eq { Constraint::Equal(s[a], s[b]) } else { Constraint::Distinct(s[a], s[b]) })
            .collect();
        let p = SearchProblem::new(region.clone(), 1, k)
            .with_anchor(Anchor::None)
            .with_constraints(constraints.clone());
        let cert = k_colorable(&p).unwrap();
        let got = matches!(cert.verdict, SearchVerdict::Colorable(_));
        prop_assert_eq!(got, common::naive_colorable(&region, 1, k, Metric::Ambient, &constraints));
        let mut buf = Vec::new();
        export_dimacs(&p, &mut buf).unwrap();
        let replay = replay_dimacs(&parse_dimacs(buf.as_slice()).unwrap(), Budget::default()).unwrap();
        prop_assert_eq!(replay.satisfiable, Some(got));
    }

    #[test]
    fn witnesses_verify(seed in any::<u64>(), n in 1usize..30, d in 1u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = common::random_region(&mut rng, n);
        let cert = k_colorable(&SearchProblem::new(region.clone(), d, 20)).unwrap();
        if let SearchVerdict::Colorable(w) = cert.verdict {
            prop_assert!(w.values().all(|&c| c < 20));
            let spec = ColoringSpec::Explicit(w);
            prop_assert!(verify_window(&spec, &region, d, Metric::Ambient).unwrap().is_valid());
        }
    }
}

#[test]
fn displacement_and_window_verifiers_agree() {
    for d in 1..=4 {
        let spec = ColoringSpec::Power2Mod13;
        let window = fundamental_window(&spec, d).unwrap();
        assert_eq!(
            verify_displacement(&spec, d).unwrap().is_valid(),
            verify_window(&spec, &window, d, Metric::Ambient)
                .unwrap()
                .is_valid(),
            "power2 d={d}"
        );
        for e in [2, 4, 6] {
            let spec = ColoringSpec::slab01(e).unwrap();
            let window = fundamental_window(&spec, d).unwrap();
            assert_eq!(
                verify_displacement(&spec, d).unwrap().is_valid(),
                verify_window(&spec, &window, d, Metric::Ambient)
                    .unwrap()
                    .is_valid(),
                "slab01({e}) at d={d}"
            );
        }
    }
}

#[test]
fn power2_window_matches_a_larger_window() {
    let spec = ColoringSpec::Power2Mod13;
    let small = fundamental_window(&spec, 2).unwrap();
    let big = fcc_core::lattice::box_region(-30..=60, -30..=60, -10..=40).unwrap();
    assert!(verify_window(&spec, &small, 2, Metric::Ambient)
        .unwrap()
        .is_valid());
    assert!(verify_window(&spec, &big, 2, Metric::Ambient)
        .unwrap()
        .is_valid());
    assert!(!verify_window(&spec, &big, 3, Metric::Ambient)
        .unwrap()
        .is_valid());
}

#[test]
fn power2_uses_thirteen_colors_on_an_in_layer_path() {
    let path = Region::explicit((0..13).map(|i| Site::new(2 * i, 0, 0).unwrap())).unwrap();
    let map = ColoringSpec::Power2Mod13.to_explicit(path.iter()).unwrap();
    assert_eq!(colors_used(map.values()), 13);
}

#[test]
fn shells_partition_balls() {
    for kind in ShellKind::ALL {
        let mut total = 0;
        for level in 0..=4 {
            let s = shell(ShellFamily { kind, level });
            assert_eq!(s.len() as u64, kind.shell_count(level), "{kind:?} {level}");
            total += s.len();
            assert_eq!(shell_ball(kind, level).len(), total);
        }
    }
}

#[test]
fn slab_balls_have_expected_induced_diameters() {
    for level in 0..=3 {
        for (even, odd) in [
            (ShellKind::ASlab01, ShellKind::DSlab01),
            (ShellKind::ASlab02, ShellKind::BSlab02),
        ] {
            let a = shell_ball(even, level);
            let b = shell_ball(odd, level);
            assert_eq!(diameter(&a, Metric::RegionInternal).unwrap(), 2 * level);
            assert_eq!(diameter(&b, Metric::RegionInternal).unwrap(), 2 * level + 1);
        }
    }
    let _ = GraphKind::F02;
}

#[test]
fn slab_window_for_power2_stays_in_layers() {
    let w = window_for(&ColoringSpec::Power2Mod13, 2, Some((0, 2))).unwrap();
    assert!(w.iter().all(|s| (0..=2).contains(&s.z())));
}
