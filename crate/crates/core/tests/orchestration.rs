use kiteneat::baseline::{Constant, Policy};
use kiteneat::episode::{run_episode, run_genome, Controller, EpisodeOptions};
use kiteneat::eval::{
    evaluate_breakdown, evaluate_genome, read_frame, serve, write_frame, InProcessWorker,
    PoolError, Request, Response, SocketWorker, Worker, WorkerError, WorkerPool, MAX_ATTEMPTS,
};
use kiteneat::neat::{mutate, seed_population, EvolutionConfig, Genome, InnovationRegistry};
use kiteneat::scenario::{spawn_positions, Formation, Scenario, TrainingSet};
use kiteneat::sim::{Team, Vec2};
use kiteneat::sweep::{sweep, sweep_genome, SweepOptions};
use kiteneat::training::{train, Checkpoint, EvolutionState, TrainError, TrainOptions, Trainer};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

fn population(n: usize, seed: u64) -> Vec<Genome> {
    let config = EvolutionConfig {
        population_size: n,
        initial_connection_probability: 0.3,
        p_add_node: 0.5,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut registry = InnovationRegistry::new(40, 3);
    let mut pop = seed_population(&config, &registry, 40, 3, &mut rng);
    for g in &mut pop {
        mutate(g, &mut registry, &config, &mut rng);
    }
    pop
}

fn small_set() -> TrainingSet {
    TrainingSet::new(
        vec![
            Scenario::new(Formation::Diagonal, 6),
            Scenario::new(Formation::Random, 4).with_seed(3),
            Scenario::new(Formation::Surrounded, 8),
        ]
        .into_iter()
        .map(|s| Scenario {
            frame_budget: 400,
            ..s
        })
        .collect(),
    )
    .unwrap()
}

fn idle() -> Constant {
    Constant([0.5, 0.5, 0.0])
}

fn stand_and_fire() -> Constant {
    Constant([0.5, 0.5, 1.0])
}

// Episodes

#[test]
fn zero_budget_returns_the_spawn_state() {
    let s = Scenario {
        frame_budget: 0,
        ..Scenario::new(Formation::Diagonal, 3)
    };
    let r = run_episode(&s, &mut idle(), EpisodeOptions::default()).unwrap();
    assert_eq!(r.frames, 0);
    assert_eq!(r.fitness, 5.0 * 80.0);
    assert!(r
        .survivors
        .iter()
        .all(|&(_, team, hp)| hp == if team == Team::Ranged { 80.0 } else { 100.0 }));
}

#[test]
fn unreachable_zealots_leave_everyone_at_full_hp() {
    let s = Scenario {
        frame_budget: 10,
        ..Scenario::new(Formation::Diagonal, 25)
    };
    let r = run_episode(&s, &mut stand_and_fire(), EpisodeOptions::default()).unwrap();
    assert_eq!(r.frames, 10);
    assert_eq!(r.remaining_melee(), 25);
    assert!(r.inputs.melee_hp.iter().all(|&h| h == 100.0));
    assert!(r.inputs.ranged_hp.iter().all(|&h| h == 80.0));
}

#[test]
fn one_vulture_needs_five_hits_on_a_zealot() {
    // On a 20x20 map the side-by-side groups start 4 apart, inside vulture
    // range; the zealot holds its ground.
    let s = Scenario {
        ranged_count: 1,
        map_width: 20.0,
        map_height: 20.0,
        ..Scenario::new(Formation::SideBySide, 1)
    };
    let (ranged, melee) = spawn_positions(&s).unwrap();
    assert_eq!(ranged[0].distance(melee[0]), 4.0);
    let r = run_episode(
        &s,
        &mut stand_and_fire(),
        EpisodeOptions {
            record: true,
            hold_melee: true,
        },
    )
    .unwrap();
    let replay = r.replay.as_ref().unwrap();
    let fires: Vec<u64> = replay
        .records
        .iter()
        .filter(|x| x.fired)
        .map(|x| x.frame)
        .collect();
    assert_eq!(r.remaining_melee(), 0);
    assert_eq!(r.fitness, 100.0 + 80.0);
    assert_eq!(fires.len(), 5);
    let span = (fires[4] - fires[0]) as f64 * s.dt;
    assert!((5.04..=5.04 + 4.0 * s.dt).contains(&span), "span {span}");
}

#[test]
fn episodes_are_deterministic() {
    for f in Formation::ALL {
        let s = Scenario::new(f, 12).with_seed(77);
        let a = run_episode(
            &s,
            &mut Policy::Random.controller(5),
            EpisodeOptions::recorded(),
        )
        .unwrap();
        let b = run_episode(
            &s,
            &mut Policy::Random.controller(5),
            EpisodeOptions::recorded(),
        )
        .unwrap();
        assert_eq!(a, b, "{f}");
    }
}

// Spawning

#[test]
fn diagonal_groups_sit_in_opposite_corners() {
    let (ranged, melee) = spawn_positions(&Scenario::new(Formation::Diagonal, 25)).unwrap();
    let centroid = |p: &[Vec2]| p.iter().fold(Vec2::ZERO, |a, &b| a + b) * (1.0 / p.len() as f64);
    let (r, m) = (centroid(&ranged), centroid(&melee));
    let quadrant = |p: Vec2| (p.x > 32.0, p.y > 32.0);
    let (qr, qm) = (quadrant(r), quadrant(m));
    assert_eq!((qr.0, qr.1), (!qm.0, !qm.1));
}

#[test]
fn random_spawns_repeat_per_seed() {
    let s = Scenario::new(Formation::Random, 20).with_seed(12);
    assert_eq!(spawn_positions(&s).unwrap(), spawn_positions(&s).unwrap());
    assert_ne!(
        spawn_positions(&s).unwrap(),
        spawn_positions(&s.clone().with_seed(13)).unwrap()
    );
}

#[test]
fn surrounded_zealots_take_the_compass_points() {
    let (ranged, melee) = spawn_positions(&Scenario::new(Formation::Surrounded, 4)).unwrap();
    let c = ranged.iter().fold(Vec2::ZERO, |a, &b| a + b) * (1.0 / ranged.len() as f64);
    let want = [
        Vec2::new(10.0, 0.0),
        Vec2::new(0.0, 10.0),
        Vec2::new(-10.0, 0.0),
        Vec2::new(0.0, -10.0),
    ];
    for (m, w) in melee.iter().zip(want) {
        assert!((*m - c).distance(w) < 1e-9, "{m:?}");
    }
}

// Evaluation

#[test]
fn evaluation_is_additive_over_scenarios() {
    let g = &population(1, 4)[0];
    let s = Scenario::new(Formation::SideBySide, 7);
    let one = evaluate_genome(g, &TrainingSet::single(s.clone())).unwrap();
    assert_eq!(
        one,
        run_genome(g, &s, EpisodeOptions::default())
            .unwrap()
            .fitness
    );
    let two = evaluate_genome(g, &TrainingSet::new(vec![s.clone(), s]).unwrap()).unwrap();
    assert_eq!(two, 2.0 * one);
}

#[test]
fn standard_set_sum_matches_per_scenario_runs() {
    let set = TrainingSet::standard(&Scenario::default());
    let g = Genome::minimal(40, 3);
    let total = evaluate_genome(&g, &set).unwrap();
    let mut sum = 0.0;
    for s in set.scenarios() {
        sum += run_episode(s, &mut idle(), EpisodeOptions::default())
            .unwrap()
            .fitness;
    }
    assert_eq!(total, sum);
    assert_eq!(evaluate_breakdown(&g, &set).unwrap().len(), 10);
}

#[test]
fn pool_results_do_not_depend_on_worker_count() {
    let pop = population(24, 1);
    let set = small_set();
    let one = WorkerPool::in_process(1)
        .evaluate_population(&pop, &set)
        .unwrap();
    let eight = WorkerPool::in_process(8)
        .evaluate_population(&pop, &set)
        .unwrap();
    assert_eq!(one, eight);
    let direct: Vec<f64> = pop
        .iter()
        .map(|g| evaluate_genome(g, &set).unwrap())
        .collect();
    assert_eq!(one, direct);
}

/// Fails jobs or dies according to a schedule, counting every call.
struct Faulty {
    inner: InProcessWorker,
    calls: Arc<AtomicUsize>,
    /// Fail the first attempt at every genome.
    fail_first: bool,
    seen: HashSet<String>,
    die_after: Option<usize>,
    reject_empty: bool,
}

impl Faulty {
    fn new(calls: &Arc<AtomicUsize>) -> Self {
        Faulty {
            inner: InProcessWorker::default(),
            calls: Arc::clone(calls),
            fail_first: false,
            seen: HashSet::new(),
            die_after: None,
            reject_empty: false,
        }
    }
}

impl Worker for Faulty {
    fn setup(&mut self, set: &TrainingSet) -> Result<(), WorkerError> {
        self.inner.setup(set)
    }

    fn evaluate(&mut self, genome: &Genome, scenarios: &[usize]) -> Result<f64, WorkerError> {
        let n = self.calls.fetch_add(1, Ordering::SeqCst) + 1;
        if self.die_after.is_some_and(|d| n > d) {
            return Err(WorkerError::Lost("killed".into()));
        }
        if self.fail_first && self.seen.insert(format!("{:?}", genome.connections)) {
            return Err(WorkerError::Job("flaky".into()));
        }
        if self.reject_empty && genome.connections.is_empty() {
            return Err(WorkerError::Job("rejected".into()));
        }
        self.inner.evaluate(genome, scenarios)
    }
}

#[test]
fn flaky_and_dying_workers_still_give_exact_results() {
    let pop = population(20, 2);
    let set = small_set();
    let want = WorkerPool::in_process(1)
        .evaluate_population(&pop, &set)
        .unwrap();

    let calls = Arc::new(AtomicUsize::new(0));
    let flaky = Faulty {
        fail_first: true,
        ..Faulty::new(&calls)
    };
    let got = WorkerPool::new(vec![Box::new(flaky)])
        .evaluate_population(&pop, &set)
        .unwrap();
    assert_eq!(got, want);
    assert_eq!(calls.load(Ordering::SeqCst), 2 * pop.len());

    let dying = Faulty {
        die_after: Some(4),
        ..Faulty::new(&Arc::new(AtomicUsize::new(0)))
    };
    let healthy = InProcessWorker::default();
    let got = WorkerPool::new(vec![Box::new(dying), Box::new(healthy)])
        .evaluate_population(&pop, &set)
        .unwrap();
    assert_eq!(got, want);
}

#[test]
fn all_workers_dead_is_an_error() {
    let pop = population(5, 3);
    let dead = || Faulty {
        die_after: Some(0),
        ..Faulty::new(&Arc::new(AtomicUsize::new(0)))
    };
    let err = WorkerPool::new(vec![Box::new(dead()), Box::new(dead())])
        .evaluate_population(&pop, &small_set())
        .unwrap_err();
    assert_eq!(err, PoolError::AllWorkersDead { pending: 5 });
    assert_eq!(
        WorkerPool::new(Vec::new()).evaluate_population(&pop, &small_set()),
        Err(PoolError::NoWorkers)
    );
}

#[test]
fn genome_failing_every_attempt_scores_zero() {
    let mut pop = population(6, 4);
    pop[2] = Genome::minimal(40, 3);
    let set = small_set();
    let calls = Arc::new(AtomicUsize::new(0));
    let w = Faulty {
        reject_empty: true,
        ..Faulty::new(&calls)
    };
    let got = WorkerPool::new(vec![Box::new(w)])
        .evaluate_population(&pop, &set)
        .unwrap();
    assert_eq!(got[2], 0.0);
    assert_eq!(calls.load(Ordering::SeqCst), 5 + MAX_ATTEMPTS as usize);
    for (i, g) in pop.iter().enumerate().filter(|&(i, _)| i != 2) {
        assert_eq!(got[i], evaluate_genome(g, &set).unwrap());
    }
}

#[test]
fn socket_workers_match_in_process_evaluation() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let server = std::thread::spawn(move || serve(listener, Some(2)));
    let pop = population(12, 5);
    let set = small_set();
    let want = WorkerPool::in_process(1)
        .evaluate_population(&pop, &set)
        .unwrap();
    {
        let workers: Vec<Box<dyn Worker>> = (0..2)
            .map(|_| Box::new(SocketWorker::connect(addr).unwrap()) as Box<dyn Worker>)
            .collect();
        let mut pool = WorkerPool::new(workers);
        assert_eq!(pool.evaluate_population(&pop, &set).unwrap(), want);
        assert_eq!(
            pool.evaluate_population(&pop[..3], &set).unwrap(),
            want[..3]
        );
    }
    server.join().unwrap().unwrap();
}

#[test]
fn socket_worker_killed_mid_run_is_replaced() {
    // A server that answers setup and then hangs up on the first job.
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let server = std::thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let _: Request = read_frame(&mut stream).unwrap();
        write_frame(&mut stream, &Response::Ready).unwrap();
        let _: Request = read_frame(&mut stream).unwrap();
    });
    let pop = population(8, 6);
    let set = small_set();
    let want = WorkerPool::in_process(1)
        .evaluate_population(&pop, &set)
        .unwrap();
    let workers: Vec<Box<dyn Worker>> = vec![
        Box::new(SocketWorker::connect(addr).unwrap()),
        Box::new(InProcessWorker::default()),
    ];
    assert_eq!(
        WorkerPool::new(workers)
            .evaluate_population(&pop, &set)
            .unwrap(),
        want
    );
    server.join().unwrap();
}

// Training

fn tiny_config(generations: u32) -> EvolutionConfig {
    EvolutionConfig {
        population_size: 12,
        generations,
        seed: 21,
        ..Default::default()
    }
}

#[test]
fn zero_generations_return_the_best_initial_genome() {
    let set = small_set();
    let out = train(tiny_config(0), set.clone(), TrainOptions::default()).unwrap();
    assert_eq!(out.history.len(), 1);
    let initial = EvolutionState::new(tiny_config(0), set.clone())
        .unwrap()
        .population;
    let gen0 = set.for_generation(21, 0);
    let best = initial
        .iter()
        .map(|g| evaluate_genome(g, &gen0).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(out.best.fitness, best);
}

#[test]
fn seeded_training_repeats_exactly() {
    let a = train(tiny_config(4), small_set(), TrainOptions::default()).unwrap();
    let b = train(
        tiny_config(4),
        small_set(),
        TrainOptions {
            workers: 3,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(a, b);
    assert!(a
        .history
        .windows(2)
        .all(|w| w[1].best_so_far >= w[0].best_so_far));
}

#[test]
fn pool_failure_flushes_a_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let state = EvolutionState::new(tiny_config(3), small_set()).unwrap();
    let dead = Faulty {
        die_after: Some(0),
        ..Faulty::new(&Arc::new(AtomicUsize::new(0)))
    };
    let mut trainer = Trainer::new(
        state.clone(),
        WorkerPool::new(vec![Box::new(dead)]),
        TrainOptions {
            checkpoint_dir: Some(dir.path().to_path_buf()),
            ..Default::default()
        },
    );
    match trainer.step() {
        Err(TrainError::Pool { generation: 0, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
    let cp = Checkpoint::load(&dir.path().join(Checkpoint::file_name(0))).unwrap();
    assert_eq!(cp.state, state);
}

#[test]
fn tampered_checkpoints_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.json");
    let state = EvolutionState::new(tiny_config(1), small_set()).unwrap();
    let mut cp = Checkpoint::new(&state);
    cp.state.config.population_size = 13;
    cp.save(&path).unwrap();
    assert!(matches!(
        Checkpoint::load(&path),
        Err(TrainError::Checkpoint { .. })
    ));
}

// Sweeps

#[test]
fn stand_still_controller_loses_everything_to_thirty_zealots() {
    let opts = SweepOptions {
        formations: vec![Formation::Diagonal],
        max_zealots: 30,
        repeats: 1,
        ..Default::default()
    };
    let rows = sweep(|| Box::new(idle()) as Box<dyn Controller>, &opts).unwrap();
    assert_eq!(rows.len(), 30);
    let last = &rows[29];
    assert_eq!(
        (
            last.zealots,
            last.mean_remaining_ranged,
            last.mean_remaining_melee
        ),
        (30, 0.0, 30.0)
    );
    let direct = run_episode(
        &opts.scenario(Formation::Diagonal, 30, 0),
        &mut idle(),
        EpisodeOptions::recorded(),
    )
    .unwrap();
    assert_eq!(
        (direct.remaining_ranged(), direct.remaining_melee()),
        (0, 30)
    );
    assert_eq!(direct.fitness, last.mean_fitness);
}

#[test]
fn sweep_shape_and_boundary() {
    let opts = SweepOptions {
        max_zealots: 1,
        repeats: 1,
        template: Scenario {
            frame_budget: 20,
            ..Scenario::default()
        },
        ..Default::default()
    };
    let rows = sweep(|| Box::new(idle()) as Box<dyn Controller>, &opts).unwrap();
    assert_eq!(rows.len(), Formation::SWEEP_DEFAULT.len());
    assert!(rows.iter().all(|r| r.zealots == 1));
}

#[test]
fn sweep_cells_equal_evaluation_components() {
    let g = &population(1, 8)[0];
    let opts = SweepOptions {
        formations: vec![Formation::Random, Formation::Surround],
        max_zealots: 6,
        repeats: 1,
        base_seed: 40,
        workers: 2,
        template: Scenario {
            frame_budget: 500,
            ..Scenario::default()
        },
    };
    let rows = sweep_genome(g, &opts).unwrap();
    let scenarios: Vec<Scenario> = opts
        .cells()
        .iter()
        .map(|&(f, z)| opts.scenario(f, z, 0))
        .collect();
    let parts = evaluate_breakdown(g, &TrainingSet::new(scenarios).unwrap()).unwrap();
    for (row, part) in rows.iter().zip(&parts) {
        assert_eq!(row.mean_fitness, part.fitness);
        assert_eq!(row.mean_remaining_ranged, part.remaining_ranged() as f64);
        assert_eq!(row.mean_remaining_melee, part.remaining_melee() as f64);
    }
}
