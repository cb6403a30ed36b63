import io as stdio
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ergotropy import io
from ergotropy.cli import COMMANDS, run
from ergotropy.epo import sample_epo_channel
from ergotropy.errors import ValidationError
from ergotropy.qcore import DensityMatrix, Hamiltonian, Spectrum, random_pure, random_state, random_unitary


def call(*argv):
    out = stdio.StringIO()
    status = run(list(argv), out)
    text = out.getvalue()
    return status, json.loads(text), text


def write(tmp_path, name, obj):
    p = tmp_path / name
    io.write_json(p, obj)
    return str(p)


class TestRoundTrip:
    def roundtrip(self, obj, tmp_path):
        p = tmp_path / "x.json"
        io.write_json(p, obj)
        return io.read_json(str(p))

    def test_density(self, rng, tmp_path):
        rho = random_state((2, 3), rng)
        back = io.density_from_json(self.roundtrip(io.density_to_json(rho), tmp_path))
        assert back.dims == (2, 3)
        assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-15

    def test_pure(self, rng, tmp_path):
        psi = random_pure((2, 2), rng)
        back = io.pure_from_json(self.roundtrip(io.pure_to_json(psi), tmp_path))
        assert np.max(np.abs(back.amplitudes - psi.amplitudes)) <= 1e-15

    def test_hamiltonian(self, rng, tmp_path):
        h = Hamiltonian(rng.uniform(-1, 1, 3), random_unitary(3, rng))
        back = io.hamiltonian_from_json(self.roundtrip(io.hamiltonian_to_json(h), tmp_path))
        assert np.max(np.abs(back.energies - h.energies)) <= 1e-15
        assert np.max(np.abs(back.basis - h.basis)) <= 1e-15

    def test_spectrum(self, rng, tmp_path):
        s = Spectrum(rng.dirichlet(np.ones(5)))
        back = io.spectrum_from_json(self.roundtrip(io.spectrum_to_json(s), tmp_path))
        assert np.max(np.abs(back.probs - s.probs)) <= 1e-15

    def test_channel(self, tmp_path):
        c = sample_epo_channel(Hamiltonian([0, 1, 1, 2]), seed=4)
        back = io.channel_from_json(self.roundtrip(io.channel_to_json(c), tmp_path))
        assert len(back.kraus) == len(c.kraus)
        assert max(np.max(np.abs(a - b)) for a, b in zip(back.kraus, c.kraus)) <= 1e-15

    def test_exact_float_text(self):
        assert io.dumps(0.1) == "0.10000000000000001"
        assert io.dumps(1.0) == "1.0"
        assert float(io.dumps(math.pi)) == math.pi
        assert io.dumps({"b": math.inf, "a": -math.inf}) == '{"a": "-inf", "b": "inf"}'

    def test_hamiltonian_forms(self):
        assert io.hamiltonian_from_json([1, 0]).energies.tolist() == [0, 1]
        h = io.hamiltonian_from_json({"re": [[0, 1], [1, 0]]})
        np.testing.assert_allclose(h.energies, [-1, 1])

    def test_load_state_kinds(self):
        assert isinstance(io.load_state([0.5, 0.5]), Spectrum)
        assert isinstance(io.load_state({"re": [1, 0]}), type(random_pure(2, 0)))
        assert isinstance(io.load_state({"re": [[1, 0], [0, 0]]}), DensityMatrix)
        with pytest.raises(ValidationError):
            io.load_state({"x": 1})
        with pytest.raises(ValidationError):
            io.load_state({"re": [["a", 0], [0, 1]]})

    def test_missing_and_bad_files(self, tmp_path):
        with pytest.raises(ValidationError):
            io.read_json(str(tmp_path / "none.json"))
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ValidationError):
            io.read_json(str(bad))

    def test_fixtures_load(self):
        for name in ("example1_rho", "example2_sigma", "bell", "ghz_two_thirds", "w_symmetric"):
            io.load_state(io.read_json(f"fixture:{name}"))


class TestCommands:
    def test_every_command_registered(self):
        assert len(COMMANDS) == 21

    def test_ergotropy_example1(self):
        status, out, _ = call("ergotropy", "--input", "fixture:example1_rho", "--hamiltonian", "fixture:example1_hamiltonian")
        assert status == 0
        assert out["W_e"] == pytest.approx(0.55, abs=1e-12)

    def test_majorize_identical(self):
        status, out, _ = call("majorize", "--input", "fixture:example1_rho", "--input", "fixture:example1_rho")
        assert status == 0 and out["relation"] == "Equal"

    def test_majorize_example2(self):
        _, out, _ = call("majorize", "--input", "fixture:example2_rho", "--input", "fixture:example2_sigma")
        assert out["relation"] == "Incomparable"

    def test_diagram(self):
        status, out, _ = call("diagram", "--input", "fixture:example1_rho", "--hamiltonian", "fixture:example1_hamiltonian")
        assert status == 0
        pts = {p["label"]: p for p in out["points"]}
        assert list(pts) == ["rho", "passive", "gibbs", "ground"]
        assert pts["rho"]["E"] == pytest.approx(0.0, abs=1e-15)
        assert pts["passive"]["E"] == pytest.approx(-0.55, abs=1e-12)
        assert pts["gibbs"]["S_nats"] == pytest.approx(pts["rho"]["S_nats"], abs=1e-10)
        assert pts["gibbs"]["E"] <= pts["passive"]["E"]
        assert pts["ground"]["E"] == -1.0

    def test_wsingle_example2(self):
        _, out, _ = call("wsingle", "--input", "fixture:example2_sigma", "--hamiltonian", "fixture:example2_hamiltonian", "--beta", "1")
        assert out["W_S"] == pytest.approx(math.log1p(math.exp(-3) / (1 + math.exp(-1) + math.exp(-2))), abs=1e-12)

    def test_classify_fixtures(self):
        assert call("classify3", "--input", "fixture:ghz_two_thirds")[1]["label"] == "GHZ"
        assert call("classify3", "--input", "fixture:w_symmetric")[1]["label"] == "W"

    def test_dephased_gap(self):
        _, out, _ = call("dephased-gap", "--input", "fixture:w_symmetric")
        assert out["dephased_gap"] == pytest.approx(1 / 3, abs=1e-10)

    @pytest.mark.parametrize("argv", [
        ["passive", "--input", "fixture:example1_rho", "--hamiltonian", "fixture:example1_hamiltonian"],
        ["gibbs", "--hamiltonian", "fixture:example2_hamiltonian", "--beta", "inf"],
        ["wth", "--input", "fixture:example1_rho", "--hamiltonian", "fixture:example1_hamiltonian"],
        ["renyi", "--input", "fixture:example1_rho", "--alpha", "2"],
        ["divergence", "--input", "fixture:example1_rho", "--input", "fixture:example1_sigma", "--alpha", "0.5"],
        ["epo-sample", "--hamiltonian", "fixture:example2_hamiltonian", "--seed", "3"],
        ["measure", "--input", "fixture:bell", "--hamiltonian", "fixture:qubit_hamiltonian"],
        ["vidal", "--input", "fixture:bell"],
        ["convert-prob", "--input", "fixture:bell", "--input", "fixture:bell"],
        ["egap", "--input", "fixture:bell"],
        ["percopy", "--input", "fixture:bell", "--copies", "3"],
        ["asymptotic", "--input", "fixture:bell"],
        ["cut-gaps", "--input", "fixture:ghz_two_thirds"],
        ["monogamy", "--input", "fixture:w_symmetric"],
    ])
    def test_runs(self, argv):
        status, out, _ = call(*argv)
        assert status == 0, out
        assert "error" not in out

    def test_specific_values(self):
        assert call("measure", "--input", "fixture:bell")[1]["value"] == pytest.approx(0.5)
        assert call("egap", "--input", "fixture:bell")[1]["gap"] == pytest.approx(1.0)
        assert call("percopy", "--input", "fixture:bell", "--copies", "3")[1]["chain"] == pytest.approx([0.5] * 3)
        gibbs = call("gibbs", "--hamiltonian", "fixture:example2_hamiltonian", "--beta", "inf")[1]
        assert gibbs["populations"] == [1.0, 0.0, 0.0, 0.0]
        sig = call("cut-gaps", "--input", "fixture:ghz_two_thirds")[1]
        assert list(sig.values()) == pytest.approx([2 / 3] * 3)

    def test_epo_roundtrip_through_files(self, tmp_path):
        status, chan, _ = call("epo-sample", "--hamiltonian", "fixture:example2_hamiltonian", "--seed", "7")
        assert status == 0 and chan["validation"]["pass"]
        path = write(tmp_path, "chan.json", {"H_S": chan["H_S"], "kraus": chan["kraus"]})
        status, out, _ = call("epo-verify", "--input", path)
        assert status == 0 and out["pass"]
        status, out, _ = call("epo-verify", "--input", "fixture:example2_rho", "--input", path, "--beta", "1")
        assert status == 0 and out["pass"]
        assert len(out["checks"]) == 11

    def test_epo_verify_rejects_invalid_channel(self, tmp_path):
        x = {"dims": [2], "re": [[0, 1], [1, 0]], "im": [[0, 0], [0, 0]]}
        path = write(tmp_path, "flip.json", {"H_S": {"energies": [0, 1]}, "kraus": [x]})
        status, out, _ = call("epo-verify", "--input", path)
        assert status == 0 and not out["pass"]
        assert out["validation"]["failures"] == ["commutation"]
        status, out, _ = call("epo-verify", "--input", "fixture:qubit_hamiltonian", "--input", path)
        assert status == 2

    def test_output_file(self, tmp_path):
        target = tmp_path / "out.json"
        status = run(["vidal", "--input", "fixture:bell", "--output", str(target)], stdio.StringIO())
        assert status == 0
        assert json.loads(target.read_text())["E_k"] == pytest.approx([1.0, 0.5])

    def test_deterministic_bytes(self):
        argv = ["epo-sample", "--hamiltonian", "fixture:example2_hamiltonian", "--seed", "5"]
        assert call(*argv)[2] == call(*argv)[2]
        argv = ["wth", "--input", "fixture:example1_rho", "--hamiltonian", "fixture:example1_hamiltonian"]
        assert call(*argv)[2] == call(*argv)[2]


class TestErrors:
    def test_missing_file(self, tmp_path):
        missing = str(tmp_path / "nope.json")
        status, out, _ = call("ergotropy", "--input", missing)
        assert status == 2
        assert out["error"]["code"] == "validation_error"
        assert out["error"]["path"] == missing
        assert set(out["error"]) == {"code", "message", "path"}

    def test_unparsable(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("[1, 2")
        assert call("renyi", "--input", str(p))[0] == 2

    def test_invalid_state(self, tmp_path):
        path = write(tmp_path, "rho.json", {"re": [[1, 0], [0, 1]]})
        status, out, _ = call("renyi", "--input", path)
        assert status == 2 and "trace" in out["error"]["message"]

    def test_missing_input(self):
        assert call("ergotropy")[0] == 2

    def test_domain_errors(self, tmp_path):
        status, out, _ = call("wsingle", "--input", "fixture:example2_rho", "--hamiltonian", "fixture:example2_hamiltonian", "--beta", "-1")
        assert status == 3 and out["error"]["code"] == "domain_error"
        assert call("percopy", "--input", "fixture:bell", "--copies", "7")[0] == 3
        assert call("renyi", "--input", "fixture:bell", "--alpha", "-2")[0] == 3

    def test_noncommuting_divergence_is_validation(self, tmp_path, rng):
        a = write(tmp_path, "a.json", io.density_to_json(random_state(2, rng)))
        b = write(tmp_path, "b.json", io.density_to_json(random_state(2, rng)))
        assert call("divergence", "--input", a, "--input", b, "--alpha", "0.5")[0] == 2
        assert call("divergence", "--input", a, "--input", b, "--alpha", "1")[0] == 0

    def test_argparse_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run(["ergotropy", "--beta", "abc"], stdio.StringIO())
        assert exc.value.code == 2

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ergotropy", "ergotropy", "--input", "fixture:example1_sigma",
             "--hamiltonian", "fixture:example1_hamiltonian"],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["W_e"] == pytest.approx(0.47)
