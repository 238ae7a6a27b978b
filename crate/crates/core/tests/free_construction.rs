mod common;

use std::sync::Arc;

use polylab_core::construct::{grid, projective_plane, symplectic_quadrangle};
use polylab_core::free::*;
use polylab_core::morphism::fibers;
use polylab_core::par::with_jobs;
use polylab_core::validate::order_of;
use polylab_core::Element;
use proptest::prelude::*;

fn seed() -> FreeStage {
    seed_from_target(Arc::new(grid(3, 3).unwrap())).unwrap()
}

#[test]
fn hundred_steps_keep_every_invariant() {
    let mut state = seed();
    for _ in 0..100 {
        state = free_step(state).unwrap();
        let r = check_free_invariants(&state);
        assert!(r.all_pass(), "stage {}:\n{r}", state.stage);
    }
    assert_eq!(state.stage, 101);
    assert_eq!((state.num_points, state.rows.len()), (10 + 100, 6 + 100));
    let g = state.geometry().unwrap();
    let (gi, _) = common::girth_and_diameter(&g);
    assert!(gi.is_none_or(|x| x >= 8), "oracle girth {gi:?}");
    let phi = state.morphism().unwrap();
    // the map stays onto a grid of order (2,1): s' = 2
    assert_eq!(order_of(phi.target()), Some((2, 1)));
    let f = fibers(&phi);
    assert!((0..9).all(|p| !f.of(Element::Point(p)).is_empty()));
}

#[test]
fn journals_are_deterministic() {
    let a = run_free(seed(), 60).unwrap().journal_text();
    let b = run_free(seed(), 60).unwrap().journal_text();
    let c = with_jobs(Some(1), || run_free(seed(), 60).unwrap().journal_text());
    let d = with_jobs(Some(3), || run_free(seed(), 60).unwrap().journal_text());
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a, d);
    assert_eq!(a.lines().count(), 60);
    assert!(a.starts_with("step 1: pair (9,0) -> new (10,6), eps(v)=0, eps(V)=0\n"));
}

#[test]
fn restore_replays_the_journal() {
    let state = run_free(seed(), 25).unwrap();
    let back = FreeStage::restore(state.target.clone(), &state.journal_text()).unwrap();
    assert_eq!(back.rows, state.rows);
    assert_eq!(back.point_image, state.point_image);
    assert_eq!(back.queue, state.queue);
    assert_eq!(back.stage, state.stage);
    // a tampered journal is refused
    let bad = state.journal_text().replacen("eps(v)=0", "eps(v)=5", 1);
    assert!(FreeStage::restore(state.target.clone(), &bad).is_err());
}

#[test]
fn corrupted_stage_fails_the_checks() {
    let mut state = run_free(seed(), 10).unwrap();
    state.point_image[0] = 8;
    let r = check_free_invariants(&state);
    assert!(!r.all_pass());
    let mut state = run_free(seed(), 10).unwrap();
    state.queue.pop_front();
    assert!(!check_free_invariants(&state).get("free.queue").unwrap().pass);
}

#[test]
fn seeds_need_a_thin_grid() {
    assert!(seed_from_target(Arc::new(grid(2, 2).unwrap())).is_err());
    assert!(seed_from_target(Arc::new(symplectic_quadrangle(2).unwrap())).is_err());
    assert!(seed_from_target(Arc::new(projective_plane(2).unwrap())).is_err());
    assert!(seed_from_target(Arc::new(grid(4, 4).unwrap())).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stages_grow_by_one_pair(n in 0usize..40) {
        let a = run_free(seed(), n).unwrap();
        let b = free_step(a.clone()).unwrap();
        prop_assert_eq!(b.num_points, a.num_points + 1);
        prop_assert_eq!(b.rows.len(), a.rows.len() + 1);
        // earlier lines only ever gain points
        for (old, new) in a.rows.iter().zip(&b.rows) {
            prop_assert!(old.iter().all(|p| new.contains(p)));
        }
        prop_assert_eq!(&b.journal[..a.journal.len()], &a.journal[..]);
        prop_assert!(check_free_invariants(&b).all_pass());
    }
}
