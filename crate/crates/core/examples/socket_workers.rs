//! Serves evaluations over TCP on a background thread and scores a
//! population through two remote workers plus one local one.

use kiteneat::eval::{serve, InProcessWorker, SocketWorker, Worker, WorkerPool};
use kiteneat::neat::{seed_population, EvolutionConfig, InnovationRegistry};
use kiteneat::scenario::{Formation, Scenario, TrainingSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::net::TcpListener;

fn main() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let server = std::thread::spawn(move || serve(listener, Some(2)));
    println!("evaluation server on {addr}");

    let workers: Vec<Box<dyn Worker>> = vec![
        Box::new(SocketWorker::connect(addr).unwrap()),
        Box::new(SocketWorker::connect(addr).unwrap()),
        Box::new(InProcessWorker::default()),
    ];
    let mut pool = WorkerPool::new(workers);

    let config = EvolutionConfig {
        population_size: 24,
        initial_connection_probability: 0.3,
        ..EvolutionConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let population = seed_population(&config, &InnovationRegistry::new(40, 3), 40, 3, &mut rng);
    let set = TrainingSet::single(Scenario::new(Formation::Diagonal, 10));

    let remote = pool.evaluate_population(&population, &set).unwrap();
    let local = WorkerPool::in_process(1)
        .evaluate_population(&population, &set)
        .unwrap();
    for (i, (r, l)) in remote.iter().zip(&local).enumerate() {
        println!(
            "genome {i:2}: {r:8.1} {}",
            if r == l { "" } else { "MISMATCH" }
        );
    }
    println!("remote and local scores agree: {}", remote == local);

    drop(pool);
    server.join().unwrap().unwrap();
}
