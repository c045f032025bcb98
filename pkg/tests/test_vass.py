import json
import random

import pytest

from vasskit.compiler import compile_counter_program
from vasskit.errors import BudgetExceededError, NegativeCounterError, WrongStateError
from vasskit.families import gen_double_exp, gen_exp, gen_weak
from vasskit.vass import (
    Configuration, Run, Transition, Vass, is_flat, simple_cycles, step,
    validate_run, vass_size,
)


def tiny_vass(transitions, dimension=2, source=("p", (0, 0)), target=("q", (0, 0))):
    states = {t.src for t in transitions} | {t.dst for t in transitions}
    states |= {source[0], target[0]}
    return Vass(
        dimension=dimension,
        states=tuple(states),
        transitions=tuple(transitions),
        source=Configuration(*source),
        target=Configuration(*target),
    )


class TestStep:
    def test_moves_counters(self):
        t = Transition("p", (-1, 1), "q")
        assert step(Configuration("p", (2, 0)), t) == Configuration("q", (1, 1))

    def test_underflow_reports_component(self):
        t = Transition("p", (-1, 1), "q")
        with pytest.raises(NegativeCounterError) as err:
            step(Configuration("p", (0, 0)), t)
        assert err.value.component == 0

    def test_self_loop(self):
        t = Transition("p", (3, -1), "p")
        assert step(Configuration("p", (4, 1)), t) == Configuration("p", (7, 0))

    def test_wrong_state(self):
        with pytest.raises(WrongStateError):
            step(Configuration("q", (1, 1)), Transition("p", (0, 0), "q"))


class TestValidateRun:
    def test_empty_run_at_source_equals_target(self):
        v = tiny_vass([Transition("p", (0, 0), "q")], source=("p", (0, 0)), target=("p", (0, 0)))
        report = validate_run(v, Run(Configuration("p", (0, 0)), ()))
        assert report.ok and report.halting

    def test_foreign_transition_rejected_at_index(self):
        v = tiny_vass([Transition("p", (0, 0), "q")])
        alien = Transition("p", (1, 0), "q")
        report = validate_run(v, Run(v.source, (alien,)))
        assert not report.ok and report.failure_index == 0

    def test_wrong_initial(self):
        v = tiny_vass([Transition("p", (0, 0), "q")])
        report = validate_run(v, Run(Configuration("q", (0, 0)), ()))
        assert not report.ok and report.failure_index == -1

    def test_agrees_with_step_replay_on_random_walks(self):
        rng = random.Random(23)
        compiled = compile_counter_program(gen_weak(3))
        v = compiled.vass
        outgoing = {}
        for t in v.transitions:
            outgoing.setdefault(t.src, []).append(t)
        for _ in range(200):
            cfg = v.source
            steps = []
            for _ in range(rng.randint(0, 25)):
                options = outgoing.get(cfg.state, [])
                if not options:
                    break
                t = rng.choice(options)
                try:
                    cfg = step(cfg, t)
                except NegativeCounterError:
                    steps.append(t)  # deliberately keep the illegal step
                    break
                steps.append(t)
            run = Run(v.source, tuple(steps))
            # oracle: replay with step and see whether it survives
            ok = True
            c = v.source
            for t in steps:
                try:
                    c = step(c, t)
                except (NegativeCounterError, WrongStateError):
                    ok = False
                    break
            assert validate_run(v, run).ok == ok


class TestFlatness:
    def test_single_self_loop_is_flat(self):
        v = tiny_vass([Transition("p", (1, 0), "p")], target=("p", (0, 0)))
        assert is_flat(v).is_flat

    def test_two_self_loops_not_flat(self):
        v = tiny_vass(
            [Transition("p", (1, 0), "p"), Transition("p", (0, 1), "p")],
            target=("p", (0, 0)),
        )
        report = is_flat(v)
        assert not report.is_flat
        assert report.witness_state == "p"
        c1, c2 = report.witness_cycles
        assert c1 != c2
        assert {t.src for t in c1} & {t.src for t in c2}

    def test_rotations_do_not_double_count(self):
        # one 2-cycle p -> q -> p: flat, although both p and q are on it
        v = tiny_vass([Transition("p", (0, 0), "q"), Transition("q", (0, 0), "p")])
        cycles = simple_cycles(v)
        assert len(cycles) == 1
        assert is_flat(v).is_flat

    def test_compiled_exp_family_is_flat(self):
        report = is_flat(compile_counter_program(gen_exp(2)).vass)
        assert report.is_flat

    def test_compiled_double_exp_not_flat(self):
        program, _ = gen_double_exp(1)
        report = is_flat(compile_counter_program(program).vass)
        assert not report.is_flat
        c1, c2 = report.witness_cycles
        shared = {t.src for t in c1} & {t.src for t in c2}
        assert report.witness_state in shared
        # the witness pair is an inner-loop cycle nested in the outer cycle
        assert len(c1) != len(c2)

    def test_renaming_invariance(self):
        rng = random.Random(5)
        compiled = compile_counter_program(gen_exp(1))
        v = compiled.vass
        names = list(v.states)
        for _ in range(5):
            permuted = names[:]
            rng.shuffle(permuted)
            mapping = dict(zip(names, permuted))
            renamed = Vass(
                dimension=v.dimension,
                states=tuple(mapping[s] for s in v.states),
                transitions=tuple(
                    Transition(mapping[t.src], t.delta, mapping[t.dst]) for t in v.transitions
                ),
                source=Configuration(mapping[v.source.state], v.source.vector),
                target=Configuration(mapping[v.target.state], v.target.vector),
            )
            assert is_flat(renamed).is_flat == is_flat(v).is_flat

    def test_straight_line_programs_flat(self):
        from vasskit.lang import parse

        compiled = compile_counter_program(parse("counters x\ninit\nx += 1\nx -= 1\nhalt x\n"))
        assert is_flat(compiled.vass).is_flat

    def test_cycle_budget(self):
        # complete digraph on 8 states has far more than 20 simple cycles
        states = [f"s{i}" for i in range(8)]
        transitions = [
            Transition(a, (0, 0), b) for a in states for b in states if a != b
        ]
        v = tiny_vass(transitions, source=("s0", (0, 0)), target=("s1", (0, 0)))
        with pytest.raises(BudgetExceededError):
            is_flat(v, max_cycles=20)


class TestVassSize:
    def test_no_transitions(self):
        v = Vass(1, ("p",), (), Configuration("p", (0,)), Configuration("p", (0,)))
        assert vass_size(v, "unary") == 1
        assert vass_size(v, "binary") == 1

    def test_single_transition_unary(self):
        v = tiny_vass([Transition("p", (2, -1), "q")])
        assert vass_size(v, "unary") == 2 + 1 * 3

    def test_binary_counts_bits(self):
        v = tiny_vass([Transition("p", (5, 0), "q")])
        # |5| has 3 bits, 0 counts one bit
        assert vass_size(v, "binary") == 2 + 1 * 4

    def test_rejects_unknown_encoding(self):
        v = tiny_vass([Transition("p", (1, 0), "q")])
        with pytest.raises(ValueError):
            vass_size(v, "decimal")


class TestJson:
    def test_round_trip_bit_exact(self):
        v = compile_counter_program(gen_exp(2)).vass
        text = v.to_json()
        again = Vass.from_json(text)
        assert again == v
        assert again.to_json() == text

    def test_deltas_are_decimal_strings(self):
        v = tiny_vass([Transition("p", (2, -1), "q")])
        obj = json.loads(v.to_json())
        deltas = {tuple(t["delta"]) for t in obj["transitions"]}
        assert ("2", "-1") in deltas

    def test_validation_on_construction(self):
        with pytest.raises(ValueError):
            Vass(1, ("p",), (Transition("p", (1,), "nowhere"),),
                 Configuration("p", (0,)), Configuration("p", (0,)))
        with pytest.raises(ValueError):
            Vass(2, ("p",), (), Configuration("p", (0,)), Configuration("p", (0, 0)))
        with pytest.raises(NegativeCounterError):
            Configuration("p", (0, -1))
