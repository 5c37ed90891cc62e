//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spikeloom::blocks::{build_and_gate, build_pacemaker};
use spikeloom::engine::{run, Circuit, NeuronSpec, NoiseConfig};
use spikeloom::memory::{
    build_memory_cell, cell_index, phase_of_trapped_spike, run_stream, CellActivity, MemorySetup,
    StreamRun,
};
use spikeloom::oracle::{answer_window, compare_answers, AnswerTimeline, RefMemory};
use spikeloom::stream::{
    encode_value, primes_scenario, Attributes, CodeScheme, Operation, StreamOp,
    PRIMES_RETRIEVE_ORDER,
};
use spikeloom::truth::{decoder_truth_table, function_generator_table, selector_truth_table};
use spikeloom::BuildError;
use spikeloom_cli::sweep::{noise_sweep, SweepConfig, DEFAULT_SIGMAS};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn build<T>(r: Result<T, BuildError>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn lif() -> NeuronSpec {
    NeuronSpec::lif()
}

fn selector_equivalence() -> Outcome {
    let start = Instant::now();
    let r = build(selector_truth_table(lif(), 2, 20, NoiseConfig::none()))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(r.rows.len() == 64, format!("{} rows", r.rows.len()))?;
    ensure(r.all_match(), format!("{}/64 rows match", r.matched()))?;
    ensure(secs < 10.0, format!("took {secs:.2} s"))?;
    Ok(format!("64/64 combinations match in {secs:.3} s"))
}

fn decoder_equivalence() -> Outcome {
    let r = build(decoder_truth_table(lif(), 2, 20, NoiseConfig::none()))?;
    ensure(r.rows.len() == 8, format!("{} rows", r.rows.len()))?;
    ensure(r.all_match(), format!("{}/8 rows match", r.matched()))?;
    let widest = r
        .rows
        .iter()
        .map(|row| row.observed.iter().filter(|&&y| y).count())
        .max()
        .unwrap_or(0);
    ensure(widest <= 1, format!("{widest} outputs fired in one cycle"))?;
    Ok("8/8 combinations match, outputs one-hot or silent".into())
}

fn function_generator() -> Outcome {
    let mut evaluations = 0;
    for f in 0..16u8 {
        let table = [f & 1 != 0, f & 2 != 0, f & 4 != 0, f & 8 != 0];
        let r = build(function_generator_table(
            lif(),
            table,
            20,
            NoiseConfig::none(),
        ))?;
        ensure(
            r.all_match(),
            format!("function {f:04b}: {}/4", r.matched()),
        )?;
        evaluations += r.rows.len();
    }
    ensure(evaluations == 64, format!("{evaluations} evaluations"))?;
    Ok("16 functions x 4 evaluations match".into())
}

fn run_checked(ops: &[StreamOp], scheme: CodeScheme) -> Result<StreamRun, String> {
    let run = build(run_stream(
        &MemorySetup::default(),
        ops,
        scheme,
        NoiseConfig::none(),
    ))?;
    let timeline = AnswerTimeline::build(ops, scheme, &run.timing);
    let report = compare_answers(&run.raster, &timeline, run.timing.period());
    ensure(
        report.is_clean(),
        format!("{} mismatches\n{report}", report.mismatches()),
    )?;
    Ok(run)
}

/// Retrieved values whose window holds a spike of each answer neuron.
fn answered(run: &StreamRun, ops: &[StreamOp]) -> (BTreeSet<u8>, BTreeSet<u8>) {
    let mut prime = BTreeSet::new();
    let mut non_prime = BTreeSet::new();
    for (i, op) in ops.iter().enumerate() {
        if op.op != Operation::Retrieve {
            continue;
        }
        let w = answer_window(run.timing.onset(i, 1), run.timing.period());
        if run.raster.fired_in(run.memory.prime_answer, w.clone()) {
            prime.insert(op.value);
        }
        if run.raster.fired_in(run.memory.non_prime_answer, w) {
            non_prime.insert(op.value);
        }
    }
    (prime, non_prime)
}

fn primes(scheme: CodeScheme) -> Result<StreamRun, String> {
    let ops = primes_scenario();
    let run = run_checked(&ops, scheme)?;
    let (prime, non_prime) = answered(&run, &ops);
    let want_prime: BTreeSet<u8> = [3, 7, 2, 5, 11, 13].into();
    let want_non_prime: BTreeSet<u8> = [0, 8, 4, 1, 12, 6, 9].into();
    ensure(prime == want_prime, format!("PiAns answered {prime:?}"))?;
    ensure(
        non_prime == want_non_prime,
        format!("nPiAns answered {non_prime:?}"),
    )?;
    ensure(
        ops.len() == 16 + PRIMES_RETRIEVE_ORDER.len(),
        "unexpected scenario length",
    )?;
    Ok(run)
}

fn primes_binary() -> Outcome {
    primes(CodeScheme::Binary)?;
    Ok("PiAns for {2,3,5,7,11,13}, nPiAns for {0,1,4,6,8,9,12}, 0 mismatches".into())
}

fn primes_gray() -> Outcome {
    let run = primes(CodeScheme::Gray)?;
    let cell = |v| {
        encode_value(v, CodeScheme::Gray)
            .map(cell_index)
            .map_err(|e| e.to_string())
    };
    ensure(cell(2)? == 3, "value 2 not mapped to cell 3")?;
    ensure(cell(3)? == 2, "value 3 not mapped to cell 2")?;
    // stores run in value order, so transaction v stores value v
    for (value, expected_cell) in [(2usize, 3usize), (3, 2)] {
        let onset = run.timing.onset(value, 1);
        let fired: Vec<usize> = (0..16)
            .filter(|&k| {
                run.raster
                    .fired_in(run.memory.select[k], onset..onset + run.timing.period())
            })
            .collect();
        ensure(
            fired == vec![expected_cell],
            format!("store of {value} selected cells {fired:?}"),
        )?;
    }
    Ok("0 mismatches; 2 stored in cell 3, 3 stored in cell 2".into())
}

fn random_ops(rng: &mut ChaCha8Rng) -> Vec<StreamOp> {
    let len = rng.random_range(1..=48);
    let mut ops = Vec::with_capacity(len);
    while ops.len() < len {
        let v = rng.random_range(0..16u8);
        let op = match rng.random_range(0..3) {
            0 => StreamOp::store(v, Attributes::from_prime(rng.random_bool(0.5))),
            1 => StreamOp::retrieve(v),
            _ => StreamOp::erase(v),
        };
        ops.push(op);
        if op.op == Operation::Retrieve && ops.len() < len && rng.random_bool(0.3) {
            ops.push(op);
        }
    }
    ops
}

fn expected_state(mem: &RefMemory) -> Vec<CellActivity> {
    (0..16)
        .map(|k| match mem.get(k) {
            Some(a) => CellActivity {
                kernel: true,
                bits: vec![a.non_prime, a.prime],
            },
            None => CellActivity {
                kernel: false,
                bits: vec![false, false],
            },
        })
        .collect()
}

fn memory_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut double_reads, mut erases) = (0, 0);
    for case in 0..200 {
        let scheme = if case % 2 == 0 {
            CodeScheme::Binary
        } else {
            CodeScheme::Gray
        };
        let ops = random_ops(&mut rng);
        let fail = |m: String| format!("sequence {case}: {m}");
        let run = run_checked(&ops, scheme).map_err(fail)?;
        let period = run.timing.period();
        let dt = run.timing.delta_t as u64;
        let cell_of = |v: u8| cell_index(encode_value(v as u32, scheme).unwrap());

        let mut mem = RefMemory::new();
        for (i, op) in ops.iter().enumerate() {
            mem.apply(op, scheme);
            let onset = run.timing.onset(i, 1);
            let state = run.memory.settled_activity(&run.raster, onset);
            ensure(
                state == expected_state(&mem),
                fail(format!("cell state after op {i} ({op})")),
            )?;

            if i > 0 && op.op == Operation::Retrieve && ops[i - 1] == *op {
                double_reads += 1;
                let answers = |j: usize| {
                    let w = answer_window(run.timing.onset(j, 1), period);
                    [run.memory.prime_answer, run.memory.non_prime_answer].map(|n| {
                        run.raster
                            .spikes_in(n, w.clone())
                            .iter()
                            .map(|t| t - run.timing.onset(j, 1))
                            .collect::<Vec<_>>()
                    })
                };
                ensure(
                    answers(i) == answers(i - 1),
                    fail(format!("double read at op {i} differs")),
                )?;
            }

            if op.op == Operation::Erase {
                erases += 1;
                let k = cell_of(op.value);
                let next_store = ops[i + 1..]
                    .iter()
                    .position(|o| o.op == Operation::Store && cell_of(o.value) == k)
                    .map(|p| run.timing.onset(i + 1 + p, 1) + 5 * dt)
                    .unwrap_or(run.raster.duration_ms());
                let quiet = onset + period..next_store;
                let cell = &run.memory.cells[k];
                for n in cell
                    .neurons()
                    .into_iter()
                    .chain(cell.read_gates.iter().copied())
                {
                    ensure(
                        run.raster.spikes_in(n, quiet.clone()).is_empty(),
                        fail(format!(
                            "{} spiked after erase at op {i}",
                            run.raster.label(n)
                        )),
                    )?;
                }
            }
        }
    }
    Ok(format!(
        "200 sequences match the reference; {double_reads} double reads identical; {erases} erases silent within one period, other cells intact"
    ))
}

fn a_column_phases(phases: usize) -> Result<(Vec<usize>, Vec<usize>), String> {
    let mut c = build(Circuit::new(lif()).map_err(BuildError::from))?;
    let pm = build(build_pacemaker(&mut c, phases, 20))?;
    let cell = build(build_memory_cell(&mut c, &pm, 1))?;
    for port in ["Sel", "M", "I1"] {
        let id = c.port(port).map_err(|e| e.to_string())?;
        c.schedule_external_spike(id, pm.timing.onset(0, 1))
            .map_err(|e| e.to_string())?;
    }
    let r = run(&c, pm.timing.onset(8, 1), NoiseConfig::none()).map_err(|e| e.to_string())?;
    let phase_of = |ts: &[u64]| -> Vec<usize> {
        ts.iter()
            .filter_map(|&t| pm.timing.phase_at(t).map(|p| p.1))
            .collect()
    };
    Ok((
        phase_of(r.spike_times(cell.bits[0].a)),
        phase_of(r.spike_times(cell.bits[0].b)),
    ))
}

fn pacemaker_timing() -> Outcome {
    let mut c = build(Circuit::new(lif()).map_err(BuildError::from))?;
    let pm = build(build_pacemaker(&mut c, 5, 20))?;
    let r = run(&c, 12 * 100 + 2, NoiseConfig::none()).map_err(|e| e.to_string())?;
    let p1 = r.spike_times(pm.phase(1));
    let intervals: Vec<u64> = p1.windows(2).map(|w| w[1] - w[0]).collect();
    ensure(
        intervals.len() >= 10,
        format!("only {} intervals", intervals.len()),
    )?;
    ensure(
        intervals.iter().all(|&d| d == 100),
        format!("intervals {intervals:?}"),
    )?;

    for n in [5, 4] {
        let (a, b) = a_column_phases(n)?;
        ensure(a.len() >= 8, format!("n={n}: {} trapped spikes", a.len()))?;
        let expected: Vec<_> = (0..a.len())
            .map(|k| phase_of_trapped_spike(a[0], k, n))
            .collect();
        ensure(
            a == expected,
            format!("n={n}: a column {a:?}, expected {expected:?}"),
        )?;
        let b_expected: Vec<_> = a.iter().map(|p| p % n + 1).collect();
        ensure(
            b[..a.len().min(b.len())] == b_expected[..a.len().min(b.len())],
            format!("n={n}: b column {b:?}"),
        )?;
    }
    let (a5, b5) = a_column_phases(5)?;
    ensure(
        a5[..3] == [1, 3, 5] && b5[2] == 1,
        format!("n=5 sequence a {a5:?} b {b5:?}"),
    )?;
    let (a4, _) = a_column_phases(4)?;
    ensure(
        a4.iter().all(|p| p % 2 == a4[0] % 2),
        format!("n=4 a column {a4:?}"),
    )?;
    Ok(format!(
        "{} P1 intervals of 100 ms; trapped phases follow bookkeeping for n=5 and n=4",
        intervals.len()
    ))
}

fn noise_robustness() -> Outcome {
    let cfg = SweepConfig {
        setup: MemorySetup::default(),
        ops: primes_scenario(),
        scheme: CodeScheme::Binary,
        sigmas: DEFAULT_SIGMAS.to_vec(),
        seeds: 10,
        base_seed: 0,
    };
    let report = build(noise_sweep(&cfg))?;
    let zero = &report.rows[0];
    ensure(
        zero.sigma == 0.0 && zero.pass_rate == 1.0,
        "sigma 0 does not pass",
    )?;
    let star = report.sigma_star().unwrap_or(0.0);
    ensure(star > 0.0, format!("no noisy level passed\n{report}"))?;
    ensure(
        report.is_monotone(),
        format!("degradation not monotone\n{report}"),
    )?;
    let worst = report.rows.last().map(|r| r.pass_rate).unwrap_or(1.0);
    Ok(format!(
        "sigma* = {star} theta over 10 seeds; pass rate falls monotonically to {worst:.3} at sigma {}",
        report.rows.last().map(|r| r.sigma).unwrap_or(0.0)
    ))
}

fn and_fan_in() -> Outcome {
    let mut c = build(Circuit::new(lif()).map_err(BuildError::from))?;
    ensure(
        matches!(build_and_gate(&mut c, 5), Err(BuildError::AndFanIn(5))),
        "fan-in 5 accepted",
    )?;
    let g = build(build_and_gate(&mut c, 4))?;
    let subsets: Vec<Vec<usize>> = std::iter::once(vec![0, 1, 2, 3])
        .chain((0..4).map(|skip| (0..4).filter(|&i| i != skip).collect()))
        .collect();
    for (k, subset) in subsets.iter().enumerate() {
        for &i in subset {
            c.schedule_external_spike(g.inputs[i], k as u64 * 100)
                .map_err(|e| e.to_string())?;
        }
    }
    let r = run(&c, 500, NoiseConfig::none()).map_err(|e| e.to_string())?;
    let spikes = r.spike_times(g.output);
    ensure(spikes == [20], format!("output spikes {spikes:?}"))?;
    Ok("n=5 rejected; AND-4 fires on 4 coincident inputs, silent on all four 3-subsets".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("selector truth table", selector_equivalence),
        ("decoder truth table", decoder_equivalence),
        ("function generator", function_generator),
        ("primes binary", primes_binary),
        ("primes gray", primes_gray),
        ("memory properties", memory_properties),
        ("pacemaker timing", pacemaker_timing),
        ("noise robustness", noise_robustness),
        ("AND fan-in guard", and_fan_in),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} [{name}]: PASS - {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL - {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
