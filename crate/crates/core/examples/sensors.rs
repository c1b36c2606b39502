//! Prints the sensor vector one vulture sees at the start of a surrounded
//! scenario, and how a raw network output decodes into a command.

use kiteneat::scenario::{spawn, Formation, Scenario};
use kiteneat::sensors::{decode, encode, encode_action};
use kiteneat::sim::{ActionCommand, Team};

fn main() {
    let scenario = Scenario::new(Formation::Surrounded, 12).with_seed(3);
    let world = spawn(&scenario).unwrap();
    let me = world.team(Team::Ranged).next().unwrap().id;
    let s = encode(&world, me, 0.0).unwrap();

    println!("unit {} at {:?}", me.0, world.unit(me).unwrap().position);
    println!(
        "{:<8} {:>9} {:>9} {:>9} {:>9}",
        "region", "enemy d", "enemy n", "friend d", "friend n"
    );
    for r in 0..8 {
        println!(
            "{:<8} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            r,
            s.enemy_distance(r),
            s.enemy_count(r),
            s.friendly_distance(r),
            s.friendly_count(r)
        );
    }
    println!("boundary N/E/S/W: {:?}", s.boundary());

    for raw in [[0.5, 0.5, 0.2], [1.0, 0.5, 0.2], [0.5, 0.5, 0.9]] {
        let cmd = decode(raw, scenario.move_scale);
        println!("{raw:?} -> {cmd:?}");
    }
    let back = encode_action(ActionCommand::move_by(-2.5, 1.0), scenario.move_scale);
    println!("move_by(-2.5, 1.0) encodes to {back:?}");
}
