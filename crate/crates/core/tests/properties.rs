use flatscape::classical_mc::{sa_run, Constraint, Dynamics, SaConfig, Tempering, UpdateMix};
use flatscape::graphs::{generate_star, generate_unit_disk, Graph, GraphKind};
use flatscape::landscape::{
    classical_bound, configuration_graph, independence_polynomial, laplacian_gap, popcount, BoundKind, BoundParams, LandscapeProfile,
};
use flatscape::linalg::LinearOperator;
use flatscape::qmc::Worldlines;
use flatscape::rng;
use flatscape::spectral::{build_terms, lowest_eigenpairs, perturbative_states, resolvent_gap, Couplings, Mode, ResolventConfig, ResolventMode};
use flatscape::star_models::{domain_wall_state, star_level_crossing, star_wavefunction};
use flatscape::tight_binding::{build_chain, bulk_diagnostics, chain_gap_profile, ChainModel};
use flatscape::Chain;
use proptest::prelude::*;

fn graph_from(n: usize, bits: &[bool]) -> Graph {
    let mut edges = Vec::new();
    let mut k = 0;
    for u in 0..n {
        for v in u + 1..n {
            if bits[k % bits.len()] {
                edges.push((u, v));
            }
            k += 1;
        }
    }
    Graph::new(GraphKind::Generic, n, edges).unwrap()
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, prop::collection::vec(prop::bool::weighted(0.3), 1..=120)).prop_map(|(n, bits)| graph_from(n, &bits))
}

fn uniform_on(terms: &flatscape::spectral::Terms, b: usize) -> Vec<f64> {
    let idx = terms.basis.manifold_indices(b);
    let mut v = vec![0.0; terms.dim()];
    idx.iter().for_each(|&i| v[i] = 1.0 / (idx.len() as f64).sqrt());
    v
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn unit_disk_edges_follow_from_coordinates(w in 1usize..7, h in 1usize..7, filling in 0.1f64..1.0, seed in any::<u64>()) {
        let g = generate_unit_disk(w, h, filling, 2.0, seed).unwrap();
        let c = g.coords().unwrap();
        let mut edges = Vec::new();
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let d2 = (c[i][0] - c[j][0]).powi(2) + (c[i][1] - c[j][1]).powi(2);
                if d2 <= 2.0 {
                    edges.push((i, j));
                }
            }
        }
        let mut stored = g.edges().to_vec();
        stored.sort_unstable();
        prop_assert_eq!(stored, edges);
        prop_assert_eq!(g.to_json(), generate_unit_disk(w, h, filling, 2.0, seed).unwrap().to_json());
    }

    #[test]
    fn star_degrees(n_b in 1usize..8, l in 1usize..7) {
        let g = generate_star(n_b, l).unwrap();
        prop_assert_eq!(g.degree(0), n_b);
        for u in 1..g.n() {
            let pos = (u - 1) % l;
            prop_assert_eq!(g.degree(u), if pos == l - 1 { 1 } else { 2 });
        }
    }

    #[test]
    fn profile_matches_subset_enumeration(g in arb_graph(12)) {
        let mut c = vec![0u64; g.n() + 1];
        for z in 0u128..1 << g.n() {
            if g.is_independent(z) {
                c[z.count_ones() as usize] += 1;
            }
        }
        let total: u64 = c.iter().sum();
        while *c.last().unwrap() == 0 {
            c.pop();
        }
        let p = independence_polynomial(&g).unwrap();
        prop_assert_eq!(p.alpha(), c.len() - 1);
        prop_assert_eq!(p.total().to_string(), total.to_string());
        prop_assert_eq!(p, LandscapeProfile::from_u64(g.n(), &c).unwrap());
    }

    #[test]
    fn configuration_graph_edges_are_exchanges(g in arb_graph(11), b in 1usize..5) {
        let alpha = independence_polynomial(&g).unwrap().alpha();
        prop_assume!(b <= alpha);
        let cg = configuration_graph(&g, b).unwrap();
        for (i, nb) in cg.adj.iter().enumerate() {
            for &j in nb {
                let (z, y) = (cg.nodes[i], cg.nodes[j]);
                prop_assert_eq!((z ^ y).count_ones(), 2);
                prop_assert!(g.is_independent(z) && g.is_independent(y));
                prop_assert_eq!((popcount(z), popcount(y)), (b, b));
            }
        }
        let gap = laplacian_gap(&cg).unwrap();
        prop_assert!(gap.gap.value().is_none_or(|v| v >= -1e-12));
    }

    #[test]
    fn sa_bound_monotone_in_eps(g in arb_graph(12), e1 in 0.01f64..0.49, e2 in 0.01f64..0.49) {
        let p = independence_polynomial(&g).unwrap();
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let at = |eps: f64| classical_bound(&p, BoundKind::Sa, &BoundParams { eps, ..Default::default() }).unwrap();
        prop_assert!(at(lo) >= at(hi));
    }

    #[test]
    fn isoenergetic_moves_conserve_total_size(g in arb_graph(10), seed in any::<u64>()) {
        let d = Dynamics::new(&g, UpdateMix::default(), Constraint::Restricted, 1.0).unwrap();
        let mut t = Tempering::new(&d, &g, vec![0.7, 1.3], 0);
        let mut r = rng::stream(seed, 1);
        let mut acc = vec![0; 2];
        for _ in 0..40 {
            t.sweep(&mut r, &mut acc);
            let before = d.energy(t.states[0]) + d.energy(t.states[1]);
            t.isoenergetic(&mut r);
            prop_assert!((d.energy(t.states[0]) + d.energy(t.states[1]) - before).abs() < 1e-12);
            prop_assert!(t.states.iter().all(|&z| g.is_independent(z)));
        }
    }

    #[test]
    fn fixed_seed_reproduces_sa(g in arb_graph(10), seed in any::<u64>()) {
        let cfg = SaConfig { seed, trace_every: Some(7), ..Default::default() };
        let a = serde_json::to_string(&sa_run(&g, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&sa_run(&g, &cfg).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn worldline_weights_positive_and_cyclic(g in arb_graph(5), slices in 2usize..7, shift in 0usize..7, seed in any::<u64>()) {
        let wl = Worldlines::new(&g, 0.9, 1.0, 0.3, 1.7, slices, 0.2).unwrap();
        let mut r = rng::stream(seed, 2);
        let mut w = vec![0usize; slices];
        for _ in 0..200 {
            wl.step(&mut w, &mut r);
            prop_assert!(wl.log_weight(&w).is_finite());
        }
        let mut rot = w.clone();
        rot.rotate_left(shift % slices);
        prop_assert!((wl.log_weight(&w) - wl.log_weight(&rot)).abs() < 1e-10);
    }

    #[test]
    fn chain_couplings_are_manifold_matrix_elements(g in arb_graph(12), omega in 0.1f64..3.0) {
        let p = independence_polynomial(&g).unwrap();
        let chain: Chain = build_chain(&p, omega).unwrap();
        let terms = build_terms(&g, Mode::Restricted, None).unwrap();
        let h = terms.assemble(Couplings::new(omega, 0.0)).unwrap();
        for b in 1..=p.alpha() {
            let element = -h.bilinear(&uniform_on(&terms, b - 1), &uniform_on(&terms, b));
            prop_assert!((element - chain.t(b)).abs() <= 1e-12 * chain.t(b));
        }
    }

    #[test]
    fn delocalizer_annihilates_uniform_states(g in arb_graph(12)) {
        let terms = build_terms(&g, Mode::Restricted, None).unwrap();
        let lap = terms.laplacian();
        let alpha = independence_polynomial(&g).unwrap().alpha();
        for b in 0..=alpha {
            if configuration_graph(&g, b).unwrap().components().len() != 1 {
                continue;
            }
            let s = uniform_on(&terms, b);
            let mut y = vec![0.0; s.len()];
            lap.apply(&s, &mut y);
            prop_assert!(y.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1e-12);
        }
    }

    #[test]
    fn second_order_state_matches_exact_ground_state(g in arb_graph(13)) {
        let terms = build_terms(&g, Mode::Restricted, None).unwrap();
        let Ok(p) = perturbative_states(&terms, None) else { return Ok(()) };
        prop_assume!(!p.g.degenerate);
        let h = terms.hamiltonian(Couplings::new(0.05, 1.0)).unwrap();
        let s = lowest_eigenpairs(&h, 1).unwrap();
        let overlap = s.vectors[0].iter().zip(&p.g.vector).map(|(a, b)| a * b).sum::<f64>().abs();
        // Each of the b removable vertices leaks amplitude ~Ω/δ out of the manifold.
        let inside = terms.basis.manifold_indices(p.g.b).iter().map(|&i| s.vectors[0][i].powi(2)).sum::<f64>().sqrt();
        prop_assert!(overlap / inside >= 0.99, "manifold overlap {}", overlap / inside);
        prop_assert!(overlap >= 1.0 - p.g.b as f64 * 0.05f64.powi(2), "overlap {}", overlap);
    }

    #[test]
    fn bulk_gap_respects_fundamental_bound(w in 3usize..6, h in 3usize..6, seed in any::<u64>()) {
        let g = generate_unit_disk(w, h, 0.8, 2.0, seed).unwrap();
        let p = independence_polynomial(&g).unwrap();
        // At α = 2 the bulk is a single bond and the continuum bound does not apply.
        prop_assume!(p.alpha() >= 3);
        let chain: Chain = build_chain(&p, 1.0).unwrap();
        prop_assert_eq!(bulk_diagnostics(&chain, 32).unwrap().violations, 0);
    }

    #[test]
    fn resonance_locates_weak_link_minimum(bulk in prop::collection::vec(0.8f64..2.0, 3..10), weak in 0.01f64..0.08) {
        let mut couplings = bulk;
        couplings.push(weak);
        let chain = ChainModel::from_couplings(couplings, 1.0).unwrap();
        prop_assert_eq!(chain.weakest(), chain.alpha);
        let points = 64;
        let profile = chain_gap_profile(&chain, None, points).unwrap();
        let cell = (profile.range.1 - profile.range.0) / (points - 1) as f64;
        // The weak link must set the smallest gap: no avoided crossing inside the bulk below it.
        let bulk_min = profile.curve.iter().map(|&(d, _)| chain.bulk_gap(d)).fold(f64::INFINITY, f64::min);
        prop_assume!(4.0 * profile.bj_coupling < bulk_min);
        prop_assert!((profile.delta_star - profile.delta_min).abs() <= cell);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn star_product_state_matches_second_order_block(n_b in 2usize..7) {
        let g = generate_star(n_b, 2).unwrap();
        let terms = build_terms(&g, Mode::Restricted, None).unwrap();
        let p = perturbative_states(&terms, None).unwrap();
        prop_assert_eq!(p.e.b, n_b);
        // Branch i holds vertices 1 + 2i (x = 1) and 2 + 2i (x = 2).
        let mut overlap = 0.0;
        for (&z, a) in terms.basis.states().iter().zip(&p.e.vector) {
            if z & 1 == 1 {
                continue;
            }
            let x: Vec<usize> = (0..n_b).map(|i| if z >> (1 + 2 * i) & 1 == 1 { 1 } else { 2 }).collect();
            overlap += a * star_wavefunction(n_b, 2, &x).unwrap();
        }
        prop_assert!(overlap.abs() >= 1.0 - 10.0 / 3f64.powi(n_b as i32), "overlap {}", overlap);
    }

    #[test]
    fn resolvent_slope_factors_at_least_one(n_b in 3usize..9, l in prop::sample::select(vec![2usize, 4])) {
        prop_assume!(l == 2 || n_b <= 6);
        let g = generate_star(n_b, l).unwrap();
        let terms = build_terms(&g, Mode::StarSymmetric, None).unwrap();
        let p = perturbative_states(&terms, None).unwrap();
        let h = terms.hamiltonian(Couplings::new(p.crossing, 1.0)).unwrap();
        let z0 = lowest_eigenpairs(&h, 1).unwrap().values[0];
        let r = resolvent_gap(&terms, Couplings::new(p.crossing, 1.0), &p.g.vector, &p.e.vector, z0, &ResolventConfig::default(), false).unwrap();
        prop_assert!(r.f_gg >= 1.0 - 1e-9 && r.f_ee >= 1.0 - 1e-9, "f_gg {} f_ee {}", r.f_gg, r.f_ee);
    }

    #[test]
    fn predicted_tilde_gap_matches_resolvent(n_b in 6usize..11) {
        let g = generate_star(n_b, 2).unwrap();
        let terms = build_terms(&g, Mode::Restricted, None).unwrap();
        let embed = |amps: &[(u128, f64)]| {
            let mut v = vec![0.0; terms.dim()];
            for &(z, a) in amps {
                v[terms.basis.locate(z).unwrap().0] = a;
            }
            v
        };
        // |G⟩: center plus every tip; |E⟩: the domain-wall product state.
        let tips = (0..n_b).fold(1u128, |z, i| z | 1 << (2 + 2 * i));
        let gv = embed(&[(tips, 1.0)]);
        let ev = embed(&domain_wall_state(n_b, 2, 1 << 20).unwrap());
        let crossing = 1.0 / ((n_b - 1) as f64).sqrt();
        let pred = star_level_crossing(n_b, 2, crossing).unwrap();
        let c = Couplings::new(crossing, 1.0);
        let z0 = -(n_b as f64 + 1.0);
        let cfg = ResolventConfig { mode: ResolventMode::Series(0), ..ResolventConfig::default() };
        let r = resolvent_gap(&terms, c, &gv, &ev, z0, &cfg, false).unwrap();
        prop_assert!((pred.tilde_gap - r.tilde_gap).abs() <= 0.2 * r.tilde_gap, "{} vs {}", pred.tilde_gap, r.tilde_gap);
    }
}
