//! Randomized scenes shared by several criteria.

use pogrid_core::geometry::Point;
use pogrid_core::scenario::{intersection_preset, straight_road_preset, Scene};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One of the built-in scenes with every object moved along its lane and
/// given a random speed and longitudinal acceleration.
pub fn random_scene(rng: &mut ChaCha8Rng) -> Scene {
    let mut scene = if rng.random_bool(0.7) {
        intersection_preset().scene
    } else {
        straight_road_preset().scene
    };
    for k in 0..scene.objects.len() {
        let lane = scene.road.lane(&scene.objects[k].lane).unwrap().clone();
        let line = &lane.centerline;
        let o = &mut scene.objects[k];
        let pr = line.project(Point::new(o.state.x, o.state.y));
        let s = (pr.s + rng.random_range(-8.0..8.0)).clamp(0.0, line.length());
        let h = line.heading_at(s);
        let c = line.point_at(s);
        o.state.x = c.x - pr.lateral * h.sin();
        o.state.y = c.y + pr.lateral * h.cos();
        o.state.psi += h - line.heading_at(pr.s);
        o.state.v = if rng.random_bool(0.1) {
            0.0
        } else {
            rng.random_range(0.5..16.0)
        };
        o.state.ax = rng.random_range(-2.0..1.5);
    }
    scene.validate().unwrap();
    scene
}
