//! Shared helpers for the integration suites: independent integer and
//! path-enumeration oracles, batch equivalence drivers, and a random
//! netlist generator for property checks.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use forge_core::netlist::{GateKind, MultiEvaluator, Netlist, NetlistBuilder};
use forge_core::timing::DelayModel;

/// Print one verdict line for an acceptance criterion; returns `pass`
/// so callers can still assert on it.
#[allow(dead_code)]
pub fn verdict(id: u32, pass: bool, detail: &str) -> bool {
    println!("criterion {id}: {} - {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

/// Evaluate up to 64 stimuli at once; `stimuli[k]` lists the input bits
/// in port order. Returns each stimulus's output bits in port order.
pub fn eval_chunk(sim: &MultiEvaluator, netlist: &Netlist, stimuli: &[Vec<bool>]) -> Vec<Vec<bool>> {
    assert!(stimuli.len() <= 64);
    let width = netlist.inputs().len();
    let mut words = vec![0u64; width];
    for (lane, stim) in stimuli.iter().enumerate() {
        assert_eq!(stim.len(), width);
        for (j, &bit) in stim.iter().enumerate() {
            words[j] |= u64::from(bit) << lane;
        }
    }
    let mut values = Vec::new();
    sim.run(&words, &mut values);
    stimuli
        .iter()
        .enumerate()
        .map(|(lane, _)| {
            netlist
                .outputs()
                .iter()
                .map(|o| (values[o.index()] >> lane) & 1 == 1)
                .collect()
        })
        .collect()
}

fn to_bits(value: u128, width: usize) -> Vec<bool> {
    (0..width).map(|i| (value >> i) & 1 == 1).collect()
}

fn from_bits(bits: &[bool]) -> u128 {
    bits.iter()
        .enumerate()
        .take(128)
        .fold(0u128, |acc, (i, &b)| acc | (u128::from(b) << i))
}

/// Check an adder netlist (ports a0.., b0.., cin -> s0.., cout) against
/// u128 integer addition for every given case. Returns the first
/// mismatch as (a, b, cin, got) if any.
#[allow(dead_code)]
pub fn check_adder_cases(
    netlist: &Netlist,
    width: usize,
    cases: &[(u128, u128, bool)],
) -> Option<(u128, u128, bool, u128)> {
    assert_eq!(netlist.inputs().len(), 2 * width + 1);
    let sim = MultiEvaluator::new(netlist).unwrap();
    for chunk in cases.chunks(64) {
        let stimuli: Vec<Vec<bool>> = chunk
            .iter()
            .map(|&(a, b, cin)| {
                let mut s = to_bits(a, width);
                s.extend(to_bits(b, width));
                s.push(cin);
                s
            })
            .collect();
        for (&(a, b, cin), got_bits) in
            chunk.iter().zip(eval_chunk(&sim, netlist, &stimuli))
        {
            let got = from_bits(&got_bits);
            let (s, c1) = a.overflowing_add(b);
            let (sum, c2) = s.overflowing_add(u128::from(cin));
            let cout = c1 || c2;
            // Below 128 bits the u128 sum holds the carry-out itself.
            let expect_bits: Vec<bool> = (0..=width)
                .map(|i| if i < 128 { (sum >> i) & 1 == 1 } else { cout })
                .collect();
            if got_bits != expect_bits {
                return Some((a, b, cin, got));
            }
        }
    }
    None
}

/// Check a complete multiplier (ports a0.., b0.. -> p0.., cout) against
/// u128 integer products. Returns the first mismatch as (a, b, got).
#[allow(dead_code)]
pub fn check_mult_cases(
    netlist: &Netlist,
    n: usize,
    cases: &[(u128, u128)],
) -> Option<(u128, u128, u128)> {
    assert_eq!(netlist.inputs().len(), 2 * n);
    let sim = MultiEvaluator::new(netlist).unwrap();
    for chunk in cases.chunks(64) {
        let stimuli: Vec<Vec<bool>> = chunk
            .iter()
            .map(|&(a, b)| {
                let mut s = to_bits(a, n);
                s.extend(to_bits(b, n));
                s
            })
            .collect();
        for (&(a, b), got_bits) in chunk.iter().zip(eval_chunk(&sim, netlist, &stimuli)) {
            let got = from_bits(&got_bits);
            if got != a * b {
                return Some((a, b, got));
            }
        }
    }
    None
}

/// `count` random (a, b, cin) triples plus the four corner patterns.
#[allow(dead_code)]
pub fn adder_stimuli(width: usize, count: usize, seed: u64) -> Vec<(u128, u128, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = if width == 128 { u128::MAX } else { (1 << width) - 1 };
    let alt = {
        let mut v = 0u128;
        for i in (0..width).step_by(2) {
            v |= 1 << i;
        }
        v
    };
    let mut cases = vec![
        (0, 0, false),
        (top, top, true),
        (alt, top ^ alt, false),
        (top ^ alt, alt, true),
    ];
    cases.extend((0..count).map(|_| {
        (
            rand_u128(&mut rng) & top,
            rand_u128(&mut rng) & top,
            rng.next_u32() & 1 == 1,
        )
    }));
    cases
}

/// `count` random (a, b) pairs plus the four corner patterns.
#[allow(dead_code)]
pub fn mult_stimuli(n: usize, count: usize, seed: u64) -> Vec<(u128, u128)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = (1u128 << n) - 1;
    let alt = {
        let mut v = 0u128;
        for i in (0..n).step_by(2) {
            v |= 1 << i;
        }
        v
    };
    let mut cases = vec![(0, 0), (top, top), (alt, top ^ alt), (top ^ alt, alt)];
    cases.extend((0..count).map(|_| (rand_u128(&mut rng) & top, rand_u128(&mut rng) & top)));
    cases
}

fn rand_u128(rng: &mut ChaCha8Rng) -> u128 {
    (u128::from(rng.next_u64()) << 64) | u128::from(rng.next_u64())
}

/// Arrival time of every net by exhaustive path enumeration: walks
/// each input-to-net path separately and keeps the longest total
/// delay, rather than running a dynamic program over the topological
/// order. Exponential, so only for small netlists.
#[allow(dead_code)]
pub fn path_enum_arrivals(netlist: &Netlist, model: &DelayModel) -> Vec<f64> {
    let mut driver = vec![None; netlist.net_count()];
    for gate in netlist.gates() {
        driver[gate.out.index()] = Some(gate);
    }
    fn longest(
        net: usize,
        driver: &[Option<&forge_core::netlist::Gate>],
        model: &DelayModel,
    ) -> f64 {
        match driver[net] {
            // Primary inputs and the constant-zero net arrive at 0.
            None => 0.0,
            Some(gate) => gate
                .fanin
                .iter()
                .map(|f| longest(f.index(), driver, model) + model.delay(gate.kind))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
    (0..netlist.net_count())
        .map(|net| longest(net, &driver, model))
        .collect()
}

/// A random combinational DAG: a few inputs, a random mix of gates
/// drawing fanins from earlier nets, every sink marked as an output.
#[allow(dead_code)]
pub fn random_netlist(seed: u64) -> Netlist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetlistBuilder::new(&format!("random{seed}"));
    let input_count = rng.gen_range(2..=5);
    let mut nets: Vec<_> = (0..input_count)
        .map(|i| b.add_input(&format!("x{i}")))
        .collect();
    let gate_count = rng.gen_range(5..=40);
    let mut read = std::collections::HashSet::new();
    for _ in 0..gate_count {
        let kind = GateKind::ALL[rng.gen_range(0..GateKind::ALL.len())];
        let fanin: Vec<_> = (0..kind.arity())
            .map(|_| nets[rng.gen_range(0..nets.len())])
            .collect();
        for f in &fanin {
            read.insert(f.index());
        }
        nets.push(b.add_gate(kind, &fanin).unwrap());
    }
    // Anything nothing else reads becomes an output, so the whole DAG
    // stays observable.
    let mut has_output = false;
    for &net in &nets[input_count..] {
        if !read.contains(&net.index()) {
            b.add_output(net).unwrap();
            has_output = true;
        }
    }
    if !has_output {
        let last = *nets.last().unwrap();
        b.add_output(last).unwrap();
    }
    b.freeze()
}
