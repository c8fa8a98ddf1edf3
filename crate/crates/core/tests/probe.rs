// Exploration probe, run manually with --ignored. Not part of the suite.

use isotower_core::tower::build_tower;
use isotower_core::voltage::{
    choose_bases, compute_assignment, derived_graph, verify_appendix, GroupConvention,
};
use isotower_core::volcano::{build_graph, build_graph_at_degree, Budget, BuildParams};

#[test]
#[ignore]
fn probe_tower_kappa() {
    let t0 = std::time::Instant::now();
    let tg = build_tower(5, 1, 2, 1, 2, "3", 0, &Budget::default()).unwrap();
    println!("tower built in {:?}", t0.elapsed());
    println!("m0 = {}, c = {}", tg.report.m0, tg.report.c);
    for lv in &tg.report.levels {
        println!(
            "m = {}: verts {}, edges {}, Hcomps {}, cover {}/{} deg {:?}, deck {} ok={}, fiber {}, kappa = {}, ord5 = {}",
            lv.m,
            lv.vertices,
            lv.edges,
            lv.h_components,
            lv.consecutive_cover_ok,
            lv.composite_cover_ok,
            lv.composite_degree,
            lv.deck_count,
            lv.deck_ok,
            lv.fiber_ok,
            lv.kappa,
            lv.ord_p_kappa
        );
    }
    println!("fit: {:?}", tg.report.fit);
}

#[test]
#[ignore]
fn probe_appendix() {
    let budget = Budget::default();
    let direct = build_graph(&BuildParams::new(5, 1, 2, 1, 1), &budget).unwrap();
    let base =
        build_graph_at_degree(&BuildParams::new(5, 1, 2, 1, 0), &budget, direct.work_degree).unwrap();
    let (bases, tree) = choose_bases(&base, 1, 0, false).unwrap();
    let vd = compute_assignment(&base, &bases, 1, tree).unwrap();
    for conv in [GroupConvention::Full, GroupConvention::ModSigns] {
        let (der, classes) = derived_graph(&base, &vd, conv);
        let rep = verify_appendix(&base, &der, &classes, &direct, conv);
        println!("{:?}: global {} per-component {:?}", conv, rep.graph_match, rep.per_component);
    }
    // excluding the special j's
    let mut pm = BuildParams::new(5, 1, 2, 1, 1);
    pm.exclude_special_j = true;
    let direct_x = build_graph(&pm, &budget).unwrap();
    let mut p0 = BuildParams::new(5, 1, 2, 1, 0);
    p0.exclude_special_j = true;
    let base_x = build_graph_at_degree(&p0, &budget, direct_x.work_degree).unwrap();
    let (bases, tree) = choose_bases(&base_x, 1, 0, false).unwrap();
    let vd = compute_assignment(&base_x, &bases, 1, tree).unwrap();
    for conv in [GroupConvention::Full, GroupConvention::ModSigns] {
        let (der, classes) = derived_graph(&base_x, &vd, conv);
        let rep = verify_appendix(&base_x, &der, &classes, &direct_x, conv);
        println!("excl {:?}: global {} per-component {:?}", conv, rep.graph_match, rep.per_component);
    }
}

#[test]
#[ignore]
fn probe_deg2_appendix() {
    // over F_25 the t = ±2 component avoids the special j's entirely
    let budget = Budget::default();
    let direct = build_graph(&BuildParams::new(5, 2, 2, 1, 1), &budget).unwrap();
    let base =
        build_graph_at_degree(&BuildParams::new(5, 2, 2, 1, 0), &budget, direct.work_degree).unwrap();
    println!("deg2 base: {} verts, direct: {} verts, D = {}", base.vertex_count(), direct.vertex_count(), direct.work_degree);
    let (bases, tree) = choose_bases(&base, 1, 0, false).unwrap();
    let vd = compute_assignment(&base, &bases, 1, tree).unwrap();
    for conv in [GroupConvention::Full, GroupConvention::ModSigns] {
        let (der, classes) = derived_graph(&base, &vd, conv);
        let rep = verify_appendix(&base, &der, &classes, &direct, conv);
        println!("{:?}: global {}", conv, rep.graph_match);
        for (comp, ok) in &rep.per_component {
            // does this base component contain a special j?
            let special = (0..base.vertex_count()).any(|v| {
                base.graph.verts[v].component == Some(*comp)
                    && base.classes[base.class_of_vertex[v]].special
            });
            println!("  comp {} special={} iso={}", comp, special, ok);
        }
    }
}
