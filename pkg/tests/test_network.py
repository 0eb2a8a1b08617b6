import numpy as np

from eventobs.network import NoiseModel, ZohChannel, held_output
from eventobs.plant import RobotSignals


def test_hold_until_next_event():
    ch = ZohChannel.initial((1, 1), [1.0, 2.0])
    ch2 = ch.transmit(1, [5.0], when=(0.3, 0))
    assert held_output(ch2, 1).tolist() == [5.0]
    assert held_output(ch2, 2).tolist() == [2.0]
    assert ch2.last_tx == ((0.3, 0), None)
    # the old snapshot is untouched
    assert held_output(ch, 1).tolist() == [1.0]


def test_other_node_bit_identical():
    ch = ZohChannel.initial((2, 1), [0.1, 0.2, 1.0 / 3.0])
    before = held_output(ch, 2)
    after = held_output(ch.transmit(1, [7.0, 8.0]), 2)
    assert before.tobytes() == after.tobytes()


def test_held_values_read_only():
    ch = ZohChannel.initial((1,), [1.0])
    assert not ch.held.flags.writeable


def test_noise_bounds_hold_on_samples():
    nm = NoiseModel.from_signals(RobotSignals(), (1, 1))
    assert nm.enabled
    t = np.linspace(0, 100, 5001)
    assert np.all(nm.max_sampled(t, (1, 1)) <= nm.bounds + 1e-15)
    assert not NoiseModel.from_signals(RobotSignals(enable_m=False), (1, 1)).enabled


def test_hold_changes_only_at_own_events(baseline_clean):
    loop, trace = baseline_clean
    jumped = np.nonzero(trace.j[1:] == trace.j[:-1] + 1)[0]
    owner = np.zeros(len(trace.t) - 1, dtype=int)
    owner[jumped] = [n for _, _, n in trace.events]
    changed = trace.hold[1:] != trace.hold[:-1]
    for n in (1, 2):
        assert np.all(owner[changed[:, n - 1]] == n)


def test_integrated_error_matches_definition(baseline_clean):
    loop, trace = baseline_clean
    gap = np.abs(loop.output_errors(trace) - loop.algebraic_error(trace))
    assert gap.max() <= 1e-9


def test_noisy_transmission_samples_noisy_output(baseline_noisy):
    loop, trace = baseline_noisy
    sig = loop.signals
    for t, j, n in trace.events[:20]:
        k = int(np.nonzero(trace.j == j + 1)[0][0])
        x = trace.x[k]
        assert trace.hold[k, n - 1] == (loop.plant.h(x) + sig.m(t))[n - 1]
    gap = np.abs(loop.output_errors(trace) - loop.algebraic_error(trace))
    assert gap.max() <= 1e-9
