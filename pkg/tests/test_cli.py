import json
import subprocess
import sys

import numpy as np
import pytest

from qdchan import serialize
from qdchan.channels import kraus_to_choi
from qdchan.cli import EXIT_INVALID_INPUT, EXIT_NOT_CONVERGED, EXIT_OK, main


def run_cli(args):
    return main(args)


def test_gen_channel_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(["gen-channel", "--dim", "3", "--seed", "1", "--out", str(a)]) == EXIT_OK
    assert run_cli(["gen-channel", "--dim", "3", "--seed", "1", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_gen_channel_validates_on_reload(tmp_path):
    path = tmp_path / "ch.json"
    run_cli(["gen-channel", "--dim", "3", "--seed", "2", "--out", str(path)])
    ch = serialize.channel_from_json(serialize.load(path))
    assert ch.rank == 9
    kraus_to_choi(ch).validate()


def test_gen_channel_env_dim(tmp_path):
    path = tmp_path / "ch.json"
    run_cli(["gen-channel", "--dim", "3", "--seed", "2", "--env-dim", "3", "--out", str(path)])
    assert serialize.channel_from_json(serialize.load(path)).rank == 3


def test_gen_channel_writes_manifest(tmp_path):
    path = tmp_path / "ch.json"
    run_cli(["gen-channel", "--dim", "2", "--seed", "0", "--out", str(path)])
    manifest = json.loads((tmp_path / "ch.json.manifest.json").read_text())
    assert manifest["command"] == "gen-channel"
    assert manifest["parameters"]["seed"] == 0


def test_decompose_unitary_channel(tmp_path):
    ch = tmp_path / "ch.json"
    out = tmp_path / "dec.json"
    from qdchan.channels import KrausChannel
    from qdchan.linalg import haar_unitary

    u = haar_unitary(2, np.random.default_rng(3))
    serialize.dump(serialize.channel_to_json(KrausChannel(2, (u,)).validate()), ch)
    code = run_cli(["decompose", "--in", str(ch), "--epsilon", "0.01",
                    "--seed", "0", "--out", str(out)])
    assert code == EXIT_OK
    res = serialize.decomposition_from_json(serialize.load(out))
    assert res.converged
    assert res.achieved_dt <= 0.005


def test_decompose_budget_exhaustion_status(tmp_path):
    ch = tmp_path / "ch.json"
    out = tmp_path / "dec.json"
    run_cli(["gen-channel", "--dim", "3", "--seed", "5", "--out", str(ch)])
    code = run_cli(["decompose", "--in", str(ch), "--epsilon", "1e-9",
                    "--seed", "0", "--restarts", "1", "--iters", "60",
                    "--out", str(out)])
    assert code == EXIT_NOT_CONVERGED
    assert out.exists()  # best-effort result still written
    res = serialize.decomposition_from_json(serialize.load(out))
    assert not res.converged


def test_decompose_zero_byte_input(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_bytes(b"")
    out = tmp_path / "dec.json"
    code = run_cli(["decompose", "--in", str(empty), "--epsilon", "0.1",
                    "--out", str(out)])
    assert code == EXIT_INVALID_INPUT
    assert not out.exists()


def test_decompose_missing_input(tmp_path):
    code = run_cli(["decompose", "--in", str(tmp_path / "nope.json"),
                    "--epsilon", "0.1", "--out", str(tmp_path / "o.json")])
    assert code == EXIT_INVALID_INPUT


def test_decompose_accepts_choi_input(tmp_path):
    from qdchan.channels import random_channel

    choi = kraus_to_choi(random_channel(2, 4, np.random.default_rng(0)))
    ch = tmp_path / "choi.json"
    serialize.dump(serialize.choi_to_json(choi), ch)
    out = tmp_path / "dec.json"
    assert run_cli(["decompose", "--in", str(ch), "--epsilon", "0.2",
                    "--seed", "1", "--out", str(out)]) == EXIT_OK


@pytest.fixture(scope="module")
def qubit_pipeline(tmp_path_factory):
    """One shared gen->decompose run for the downstream command tests."""
    root = tmp_path_factory.mktemp("pipeline")
    ch = root / "ch.json"
    dec = root / "dec.json"
    assert run_cli(["gen-channel", "--dim", "2", "--seed", "9", "--out", str(ch)]) == EXIT_OK
    assert run_cli(["decompose", "--in", str(ch), "--epsilon", "0.05", "--seed", "1",
                    "--out", str(dec)]) == EXIT_OK
    return root, ch, dec


def test_synth_bundle(qubit_pipeline):
    root, ch, dec = qubit_pipeline
    bundle_path = root / "bundle.json"
    assert run_cli(["synth", "--in", str(dec), "--out", str(bundle_path)]) == EXIT_OK
    bundle = serialize.load(bundle_path)
    assert len(bundle["circuits"]) == 2
    assert sum(bundle["probabilities"]) == pytest.approx(1.0, abs=1e-12)
    for census in bundle["gate_census"]:
        assert census["controlled-swap"] == 3
        assert census["givens"] == 5
    # circuits re-validate and re-simulate
    for cpath in bundle["circuits"]:
        circ = serialize.circuit_from_json(serialize.load(cpath))
        from qdchan.circuits import circuit_unitary

        circuit_unitary(circ)


def test_synth_roundtrip_choi(qubit_pipeline):
    root, ch, dec = qubit_pipeline
    bundle_path = root / "b2.json"
    run_cli(["synth", "--in", str(dec), "--out", str(bundle_path)])
    bundle = serialize.load(bundle_path)
    res = serialize.decomposition_from_json(serialize.load(dec))
    from qdchan.circuits import circuit_unitary
    from qdchan.channels import KrausChannel
    from qdchan.decompose import mixture_choi
    from qdchan.linalg import trace_distance

    acc = np.zeros((4, 4), dtype=complex)
    for prob, cpath in zip(bundle["probabilities"], bundle["circuits"]):
        circ = serialize.circuit_from_json(serialize.load(cpath))
        u = circuit_unitary(circ).reshape(2, 2, 2, 2)
        ops = tuple(u[:, i, :, 0] for i in range(2))
        acc += prob * kraus_to_choi(KrausChannel(2, ops).validate()).matrix
    assert trace_distance(acc, mixture_choi(res.params).matrix) <= 1e-9


def test_verify_self_consistency(qubit_pipeline, capsys):
    root, ch, dec = qubit_pipeline
    assert run_cli(["verify", "--in", str(ch), "--decomp", str(dec)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "trace distance" in out
    assert "distinguishing prob." in out


def test_verify_dim_mismatch(qubit_pipeline, tmp_path):
    root, ch, dec = qubit_pipeline
    other = tmp_path / "ch3.json"
    run_cli(["gen-channel", "--dim", "3", "--seed", "0", "--out", str(other)])
    assert run_cli(["verify", "--in", str(other), "--decomp", str(dec)]) == EXIT_INVALID_INPUT


def test_sample_reproducible(qubit_pipeline, tmp_path):
    root, ch, dec = qubit_pipeline
    o1, o2 = tmp_path / "s1.json", tmp_path / "s2.json"
    for o in (o1, o2):
        assert run_cli(["sample", "--in", str(dec), "--shots", "1000",
                        "--seed", "4", "--out", str(o)]) == EXIT_OK
    assert serialize.load(o1) == serialize.load(o2)


def test_sample_shot_deviation(qubit_pipeline, tmp_path):
    root, ch, dec = qubit_pipeline
    out = tmp_path / "s.json"
    run_cli(["sample", "--in", str(dec), "--shots", "10000", "--seed", "2",
             "--state", "random-pure", "--out", str(out)])
    payload = serialize.load(out)
    assert payload["deviation"] <= 5.0 / np.sqrt(10_000)
    assert sum(payload["empirical_counts"]) == 10_000


def test_sample_single_shot(qubit_pipeline):
    root, ch, dec = qubit_pipeline
    assert run_cli(["sample", "--in", str(dec), "--shots", "1", "--seed", "0"]) == EXIT_OK


def test_info_values(capsys):
    assert run_cli(["info", "--dim", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "92" in out and "72" in out and "15" in out
    assert run_cli(["info", "--dim", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "17" in out and "12" in out
    assert run_cli(["info", "--dim", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "291" in out


def test_info_rejects_bad_dim():
    assert run_cli(["info", "--dim", "1"]) == EXIT_INVALID_INPUT


def test_console_entrypoint_runs():
    out = subprocess.run([sys.executable, "-m", "qdchan.cli", "info", "--dim", "2"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "17" in out.stdout


# --- serialization round trips ------------------------------------------

def test_matrix_json_roundtrip(rng):
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    back = serialize.matrix_from_json(serialize.matrix_to_json(m))
    assert np.array_equal(back, m)


def test_params_json_roundtrip(rng):
    from qdchan.ansatz import random_extreme_params

    p = random_extreme_params(3, rng)
    q = serialize.extreme_params_from_json(serialize.extreme_params_to_json(p))
    assert np.array_equal(p.mux_angles, q.mux_angles)
    assert np.array_equal(p.prior_blocks, q.prior_blocks)
    assert np.array_equal(p.posterior_blocks, q.posterior_blocks)


def test_malformed_payload_rejected():
    with pytest.raises(Exception):
        serialize.channel_from_json({"dim": 2})
