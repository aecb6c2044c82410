"""Matrix drivers, sweeps, and emission formats."""

import json
import math

import numpy as np
import pytest

from helpers import (
    iid_symbol_series,
    lag2_xor_exact_te,
    lag2_xor_series,
    lag2_xor_word_distribution,
    noisy_copy_series,
)
from renflow import (
    FiniteSampleWarning,
    FlowMatrix,
    HistorySpec,
    NetFlowMatrix,
    SurrogateSpec,
    ValidationError,
    copy_spec,
    emit,
    generate,
    m_sweep,
    net_flow,
    pairwise_matrix,
    parse_matrix_csv,
    q_sweep,
    render,
    renyi_transfer_entropy,
)

H11 = HistorySpec(1, 1)
FAST = SurrogateSpec(ensemble_size=5, rng_seed=3)


def example_matrix() -> FlowMatrix:
    values = np.array(
        [
            [np.nan, 0.5, 0.1],
            [0.2, np.nan, 0.05],
            [0.15, 0.02, np.nan],
        ]
    )
    return FlowMatrix(labels=("A", "B", "C"), values=values, params={"q": 1.0})


class TestFlowMatrixTypes:
    def test_diagonal_must_be_nan(self):
        values = np.zeros((2, 2))
        with pytest.raises(ValidationError):
            FlowMatrix(labels=("A", "B"), values=values)

    def test_labels_unique(self):
        values = np.full((2, 2), np.nan)
        values[0, 1] = values[1, 0] = 0.1
        with pytest.raises(ValidationError):
            FlowMatrix(labels=("A", "A"), values=values)

    def test_net_flow_antisymmetry_enforced(self):
        bad = np.array([[0.0, 0.3], [0.1, 0.0]])
        with pytest.raises(ValidationError):
            NetFlowMatrix(labels=("A", "B"), values=bad)


class TestPairwiseMatrix:
    def test_copy_pair_structure(self):
        x, y = generate(copy_spec(3), 30_000, seed=1)
        matrix = pairwise_matrix([x, y], H11, 1.0, FAST)
        i_x, i_y = matrix.labels.index("X"), matrix.labels.index("Y")
        assert matrix.values[i_x, i_y] == pytest.approx(math.log2(3), abs=0.05)
        assert abs(matrix.values[i_y, i_x]) <= 0.01
        assert math.isnan(matrix.values[i_x, i_x])

    def test_independent_triple_near_zero(self):
        rng = np.random.default_rng(2)
        series = [iid_symbol_series(rng, 30_000, 3, label=f"S{i}") for i in range(3)]
        matrix = pairwise_matrix(series, H11, 1.0, FAST)
        off = ~np.eye(3, dtype=bool)
        assert np.all(np.abs(matrix.values[off]) <= 0.01)

    def test_single_series_rejected(self):
        rng = np.random.default_rng(3)
        with pytest.raises(ValidationError):
            pairwise_matrix([iid_symbol_series(rng, 100, 2)], H11, 1.0, FAST)

    def test_unequal_lengths_rejected(self):
        rng = np.random.default_rng(4)
        series = [
            iid_symbol_series(rng, 100, 2, label="A"),
            iid_symbol_series(rng, 90, 2, label="B"),
        ]
        with pytest.raises(ValidationError):
            pairwise_matrix(series, H11, 1.0, FAST)

    def test_failing_pair_identified(self):
        rng = np.random.default_rng(5)
        series = [
            iid_symbol_series(rng, 4, 2, label="A"),
            iid_symbol_series(rng, 4, 2, label="B"),
        ]
        with pytest.raises(ValidationError, match="pair"):
            pairwise_matrix(series, HistorySpec(3, 3), 1.0, FAST)


class TestNetFlow:
    def test_symmetric_matrix_gives_zeros(self):
        values = np.full((2, 2), np.nan)
        values[0, 1] = values[1, 0] = 0.4
        flows = net_flow(FlowMatrix(labels=("A", "B"), values=values))
        np.testing.assert_array_equal(flows.values, 0.0)

    def test_hand_example(self):
        flows = net_flow(example_matrix())
        assert flows.values[0, 1] == pytest.approx(0.3)
        assert flows.values[1, 0] == pytest.approx(-0.3)

    def test_antisymmetry_identity(self):
        rng = np.random.default_rng(6)
        values = rng.random((4, 4))
        np.fill_diagonal(values, np.nan)
        matrix = FlowMatrix(labels=("A", "B", "C", "D"), values=values)
        flows = net_flow(matrix)
        assert np.max(np.abs(flows.values + flows.values.T)) <= 1e-12
        assert np.all(np.diag(flows.values) == 0.0)


class TestQSweep:
    def test_copy_process_constant_raw_across_orders(self):
        x, y = generate(copy_spec(3), 50_000, seed=7)
        table = q_sweep(x, y, H11, (0.5, 1.0, 1.5), FAST)
        forward = [r for r in table.rows if r.source == "Y"]
        assert len(forward) == 3
        for row in forward:
            assert row.raw == pytest.approx(math.log2(3), abs=0.02)

    def test_q1_row_matches_independent_shannon_run(self):
        from renflow import effective_transfer_entropy

        rng = np.random.default_rng(8)
        x = iid_symbol_series(rng, 20_000, 3, label="X")
        y = iid_symbol_series(rng, 20_000, 3, label="Y")
        table = q_sweep(x, y, H11, (0.5, 1.0), FAST)
        row = next(r for r in table.rows if r.param == 1.0 and r.source == "Y")
        again = effective_transfer_entropy(x, y, H11, 1.0, FAST)
        assert row.effective == pytest.approx(again.effective, abs=1e-10)

    def test_independent_pair_near_zero_across_grid(self):
        rng = np.random.default_rng(9)
        x = iid_symbol_series(rng, 30_000, 3, label="X")
        y = iid_symbol_series(rng, 30_000, 3, label="Y")
        table = q_sweep(x, y, H11, (0.5, 1.0, 1.5), SurrogateSpec(ensemble_size=10, rng_seed=1))
        for row in table.rows:
            assert abs(row.effective) <= 0.01


class TestMSweep:
    def test_copy_process_plateau_from_m1(self):
        x, y = generate(copy_spec(3), 30_000, seed=10)
        table = m_sweep(x, y, (1, 2), 1.0, FAST)
        forward = {int(r.param): r for r in table.rows if r.source == "Y"}
        assert forward[1].raw == pytest.approx(math.log2(3), abs=0.05)
        assert forward[2].raw == pytest.approx(math.log2(3), abs=0.05)

    def test_order_two_chain_rises_then_plateaus(self):
        rng = np.random.default_rng(11)
        x, y = lag2_xor_series(rng, 150_000, flip_probability=0.25)
        table = m_sweep(x, y, (1, 2, 3), 1.5, SurrogateSpec(ensemble_size=5, rng_seed=2))
        forward = {int(r.param): r for r in table.rows if r.source == "Y"}
        exact_plateau = lag2_xor_exact_te(1.5, 0.25, m=2)
        assert forward[1].raw < forward[2].raw
        assert forward[2].raw == pytest.approx(exact_plateau, abs=0.02)
        assert abs(forward[2].raw - forward[3].raw) <= 0.02

    def test_enumeration_oracle_matches_closed_form(self):
        words = lag2_xor_word_distribution(1, 4)
        for q in (0.8, 1.5, 3.0):
            assert renyi_transfer_entropy(words, q).value == pytest.approx(
                lag2_xor_exact_te(q, 0.25, m=2), abs=1e-12
            )

    def test_warns_in_finite_sample_regime(self):
        rng = np.random.default_rng(12)
        x = iid_symbol_series(rng, 60, 2, label="X")
        y = iid_symbol_series(rng, 60, 2, label="Y")
        with pytest.warns(FiniteSampleWarning):
            m_sweep(x, y, (4,), 1.0, SurrogateSpec(ensemble_size=0), min_windows=100)

    def test_m_without_windows_rejected(self):
        rng = np.random.default_rng(13)
        x = iid_symbol_series(rng, 6, 2, label="X")
        y = iid_symbol_series(rng, 6, 2, label="Y")
        with pytest.raises(ValidationError):
            m_sweep(x, y, (5,), 1.0, SurrogateSpec(ensemble_size=0))


class TestEmission:
    def test_matrix_csv_shape(self, tmp_path):
        path = emit(example_matrix(), tmp_path / "m.csv", "csv")
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 4
        assert lines[0] == "target\\source,A,B,C"
        assert lines[1].startswith("A,,")  # blank diagonal cell

    def test_csv_round_trip_12_digits(self, tmp_path):
        rng = np.random.default_rng(14)
        values = rng.random((3, 3)) * 1.7
        np.fill_diagonal(values, np.nan)
        matrix = FlowMatrix(labels=("A", "B", "C"), values=values)
        path = emit(matrix, tmp_path / "m.csv", "csv")
        again = parse_matrix_csv(path)
        assert again.labels == matrix.labels
        off = ~np.eye(3, dtype=bool)
        np.testing.assert_allclose(again.values[off], matrix.values[off], rtol=1e-11)

    def test_emission_is_byte_stable(self, tmp_path):
        matrix = example_matrix()
        a = emit(matrix, tmp_path / "a.csv", "csv").read_bytes()
        b = emit(matrix, tmp_path / "b.csv", "csv").read_bytes()
        assert a == b

    def test_matrix_json_nan_becomes_null(self, tmp_path):
        path = emit(example_matrix(), tmp_path / "m.json", "json")
        payload = json.loads(path.read_text())
        assert payload["kind"] == "flow_matrix"
        assert payload["values"][0][0] is None
        assert payload["values"][0][1] == 0.5

    def test_svg_heat_map(self, tmp_path):
        text = render(example_matrix(), "svg")
        assert text.startswith("<svg")
        assert "min=" in text and "max=" in text

    def test_net_flow_svg_diverging(self):
        flows = net_flow(example_matrix())
        text = render(flows, "svg")
        assert "diverging about 0" in text

    def test_sweep_csv_and_json(self, tmp_path):
        x, y = generate(copy_spec(2), 2_000, seed=15)
        table = q_sweep(x, y, H11, (1.0,), SurrogateSpec(ensemble_size=2, rng_seed=4))
        csv_text = render(table, "csv")
        assert csv_text.splitlines()[0] == (
            "q,source,target,raw,surrogate_mean,surrogate_std,effective,n_windows"
        )
        payload = json.loads(render(table, "json"))
        assert payload["kind"] == "q_sweep"
        assert len(payload["rows"]) == 2

    def test_sweep_svg_rejected(self):
        x, y = generate(copy_spec(2), 2_000, seed=16)
        table = q_sweep(x, y, H11, (1.0,), SurrogateSpec(ensemble_size=0))
        with pytest.raises(ValidationError):
            render(table, "svg")

    def test_directed_fixture_lands_in_target_row_source_column(self):
        rng = np.random.default_rng(17)
        src, tgt = noisy_copy_series(rng, 40_000, 3, fidelity=0.85)
        matrix = pairwise_matrix([src, tgt], H11, 1.0, FAST)
        i_a, i_b = matrix.labels.index("A"), matrix.labels.index("B")
        # information flows A -> B, so the big entry sits at [B][A]
        assert matrix.values[i_b, i_a] > 10 * abs(matrix.values[i_a, i_b])
        csv_text = render(matrix, "csv")
        assert csv_text.splitlines()[0] == "target\\source,A,B"
