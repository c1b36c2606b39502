//! Drives the simulator by hand: one vulture walks away from a zealot and
//! turns to shoot whenever its weapon is ready.

use kiteneat::sim::{
    ActionCommand, Bounds, Team, UnitId, UnitKind, UnitState, Vec2, WorldState, DEFAULT_DT,
};
use std::collections::BTreeMap;

fn main() {
    let mut world = WorldState::new(Bounds::sized(64.0, 64.0), DEFAULT_DT, 5.0);
    let vulture = UnitId(0);
    world
        .add_unit(UnitState::spawn(
            vulture,
            Team::Ranged,
            Vec2::new(20.0, 32.0),
            UnitKind::Vulture.stats(),
        ))
        .unwrap();
    world
        .add_unit(UnitState::spawn(
            UnitId(1),
            Team::Melee,
            Vec2::new(14.0, 32.0),
            UnitKind::Zealot.stats(),
        ))
        .unwrap();

    while world.frame < 800
        && world.alive_count(Team::Melee) > 0
        && world.alive_count(Team::Ranged) > 0
    {
        let me = world.unit(vulture).unwrap();
        let cmd = if me.weapon_ready() {
            ActionCommand::attack()
        } else {
            ActionCommand::move_by(5.0, 0.0)
        };
        let report = world.step(&BTreeMap::from([(vulture, cmd)])).unwrap();
        for a in &report.attacks {
            let z = world.unit(UnitId(1)).map_or(0.0, |u| u.hp);
            let v = world.unit(vulture).map_or(0.0, |u| u.hp);
            println!(
                "t={:6.3}s  unit {} hits unit {} for {}  (vulture hp {v}, zealot hp {z})",
                world.elapsed_seconds(),
                a.attacker.0,
                a.target.0,
                a.damage
            );
        }
        if world.unit(vulture).is_some_and(|u| u.position.x >= 63.0) {
            println!("vulture reached the map edge");
            break;
        }
    }
    println!(
        "frame {}: {} ranged, {} melee alive",
        world.frame,
        world.alive_count(Team::Ranged),
        world.alive_count(Team::Melee)
    );
}
