"""Batch command line over the library; every subcommand writes one JSON object.

Exit status: 0 on success, 2 for invalid or unreadable input, 3 when a
quantity is undefined for the given input (domain or numerical failure).
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import Callable

import numpy as np

from . import entangle, epo, io, passive, tripartite
from .errors import DomainError, ErgotropyError, NumericalError, ValidationError
from .majorize import compare, majorizes
from .qcore import DensityMatrix, Hamiltonian, PureState, Spectrum

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DOMAIN = 3


class InputError(Exception):
    def __init__(self, error: ErgotropyError, path: str | None):
        super().__init__(str(error))
        self.error = error
        self.path = path


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def _load(path: str, convert: Callable):
    try:
        return convert(io.read_json(path))
    except ErgotropyError as exc:
        raise InputError(exc, path) from None


def _inputs(args, n: int, what: str) -> list[str]:
    paths = args.input or []
    if len(paths) < n:
        raise InputError(ValidationError(f"{args.command} needs {n} --input file(s): {what}"), None)
    return paths


def _state(args, i: int = 0, what: str = "state"):
    path = _inputs(args, i + 1, what)[i]
    obj = _load(path, io.load_state)
    if isinstance(obj, Spectrum):
        obj = DensityMatrix.from_diagonal(obj.probs)
    return obj


def _density(args, i: int = 0) -> DensityMatrix:
    obj = _state(args, i)
    return obj.density() if isinstance(obj, PureState) else obj


def _pure(args, i: int = 0) -> PureState:
    path = _inputs(args, i + 1, "pure state")[i]
    obj = _load(path, io.load_state)
    if not isinstance(obj, PureState):
        raise InputError(ValidationError("expected a pure state (flat 're'/'im' vectors)"), path)
    return obj


def _spectrum(args, i: int):
    path = _inputs(args, i + 1, "two spectra or states")[i]
    obj = _load(path, io.load_state)
    if isinstance(obj, PureState):
        obj = obj.density()
    return obj if isinstance(obj, Spectrum) else obj.spectrum()


def _hamiltonian(args, i: int = 0, default_dim: int | None = None) -> Hamiltonian:
    hs = args.hamiltonian or []
    if i < len(hs):
        return _load(hs[i], io.hamiltonian_from_json)
    if default_dim is None:
        raise InputError(ValidationError(f"{args.command} needs --hamiltonian"), None)
    return Hamiltonian.ladder(default_dim)


def _beta(args, default=None) -> float:
    if args.beta is None:
        if default is None:
            raise InputError(ValidationError(f"{args.command} needs --beta"), None)
        return default
    return args.beta


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_passive(args):
    rho = _density(args)
    h = _hamiltonian(args, default_dim=rho.dim)
    p = passive.passive_state(rho, h)
    return {
        "passive_state": io.density_to_json(p),
        "populations": np.sort(rho.eigvals())[::-1].clip(0),
        "passive_energy": passive.passive_energy(rho, h),
    }


def cmd_ergotropy(args):
    rho = _density(args)
    h = _hamiltonian(args, default_dim=rho.dim)
    e, ep = passive.energy(rho, h), passive.passive_energy(rho, h)
    return {"W_e": e - ep, "E": e, "E_passive": ep}


def cmd_gibbs(args):
    h = _hamiltonian(args)
    t = passive.gibbs_state(h, _beta(args))
    return {
        "beta": t.beta,
        "log_z": t.log_z,
        "populations": t.populations,
        "energy": t.energy,
        "entropy_nats": t.entropy,
        "state": io.density_to_json(t.state),
    }


def cmd_wth(args):
    rho = _density(args)
    h = _hamiltonian(args, default_dim=rho.dim)
    report = passive.work_report(rho, h).to_dict()
    report["W_th"] = report["thermodynamic_work"]
    return report


def cmd_renyi(args):
    rho = _density(args)
    alpha = 1.0 if args.alpha is None else args.alpha
    return {
        "alpha": alpha,
        "S_bits": passive.renyi_entropy(rho, alpha, "bits"),
        "S_nats": passive.renyi_entropy(rho, alpha, "nats"),
    }


def cmd_divergence(args):
    rho, sigma = _density(args, 0), _density(args, 1)
    alpha = 1.0 if args.alpha is None else args.alpha
    return {"alpha": alpha, "D_nats": passive.renyi_divergence(rho, sigma, alpha)}


def cmd_wsingle(args):
    rho = _density(args)
    h = _hamiltonian(args, default_dim=rho.dim)
    beta = _beta(args)
    return {"beta": beta, "W_S": passive.single_shot_work(rho, h, beta)}


def cmd_majorize(args):
    p, q = _spectrum(args, 0), _spectrum(args, 1)
    tol = 1e-12 if args.tol is None else args.tol
    return {
        "relation": compare(p, q, tol).value,
        "first_majorizes_second": majorizes(p, q, tol),
        "second_majorizes_first": majorizes(q, p, tol),
    }


def cmd_epo_sample(args):
    h_s = _hamiltonian(args, 0)
    hs = args.hamiltonian or []
    env_h = _hamiltonian(args, 1) if len(hs) > 1 else epo.default_environment().hamiltonian
    env = epo.EnvironmentSpec(env_h, _beta(args, 1.0))
    c = epo.sample_epo_channel(h_s, env, args.seed)
    out = io.channel_to_json(c)
    out["validation"] = epo.validate_epo(c, args.tol or epo.CHANNEL_TOL).to_dict()
    return out


def cmd_epo_verify(args):
    tol = args.tol or epo.CHANNEL_TOL
    paths = _inputs(args, 1, "channel, or state then channel")
    if len(paths) == 1:
        c = _load(paths[0], io.channel_from_json)
        v = epo.validate_epo(c, tol)
        return {"validation": v.to_dict(), "pass": v.passed}
    rho = _density(args, 0)
    c = _load(paths[1], io.channel_from_json)
    try:
        report = epo.monotone_report(rho, c, _beta(args, 1.0), tol)
    except ValidationError as exc:
        raise InputError(exc, paths[1]) from None
    return {
        "validation": epo.validate_epo(c, tol).to_dict(),
        "checks": report.to_records(),
        "pass": report.passed,
    }


def cmd_measure(args):
    psi = _pure(args)
    h = _hamiltonian(args, default_dim=psi.dims[0])
    return entangle.measure_pure(psi, h).to_dict()


def cmd_vidal(args):
    psi = _pure(args)
    return {"E_k": entangle.vidal_monotones(psi), "schmidt": entangle.schmidt_spectrum(psi).probs}


def cmd_convert_prob(args):
    return {"probability": entangle.conversion_probability(_pure(args, 0), _pure(args, 1))}


def cmd_egap(args):
    state = _state(args)
    dims = state.dims
    if len(dims) != 2 and not args.hamiltonian:
        raise InputError(ValidationError("egap needs a bipartite state (dims of length 2)"), args.input[0])
    h_x = _hamiltonian(args, 0, default_dim=dims[0])
    h_y = _hamiltonian(args, 1, default_dim=int(np.prod(dims[1:])))
    return {"gap": entangle.ergotropic_gap(state, h_x, h_y)}


def cmd_percopy(args):
    psi = _pure(args)
    h = _hamiltonian(args, default_dim=psi.dims[0])
    n = args.copies or 2
    chain = [entangle.per_copy_measure(psi, k, h).value for k in range(1, n + 1)]
    return {"copies": n, "value": chain[-1], "chain": chain}


def cmd_asymptotic(args):
    psi = _pure(args)
    h = _hamiltonian(args, default_dim=psi.dims[0])
    return entangle.asymptotic_measure(psi, h).to_dict()


def _three_party_hamiltonians(args):
    if not args.hamiltonian:
        return None
    return [_hamiltonian(args, i) for i in range(3)]


def cmd_cut_gaps(args):
    psi = _pure(args)
    return tripartite.gap_signature(psi, _three_party_hamiltonians(args)).to_dict()


def cmd_monogamy(args):
    psi = _pure(args)
    return tripartite.monogamy_decompose(psi, _three_party_hamiltonians(args)).to_dict()


def cmd_dephased_gap(args):
    state = _state(args)
    try:
        return {"dephased_gap": tripartite.dephased_gap(state, None, _three_party_hamiltonians(args))}
    except ValidationError as exc:
        raise InputError(exc, args.input[0]) from None


def cmd_classify3(args):
    return tripartite.classify(_pure(args), args.tol or tripartite.GAP_TOL).to_dict()


def cmd_diagram(args):
    rho = _density(args)
    h = _hamiltonian(args, default_dim=rho.dim)
    s = passive.von_neumann_entropy(rho, "nats")
    beta = passive.match_beta_by_entropy(s, h)
    tau = passive.gibbs_state(h, beta)
    s_ground = math.log(h.ground_degeneracy())
    points = [
        ("rho", s, passive.energy(rho, h)),
        ("passive", s, passive.passive_energy(rho, h)),
        ("gibbs", tau.entropy, tau.energy),
        ("ground", s_ground, float(h.energies[0])),
    ]
    return {
        "matched_beta": beta,
        "points": [{"label": lab, "S_nats": sn, "S_bits": sn / passive.LN2, "E": e} for lab, sn, e in points],
    }


COMMANDS: dict[str, tuple[Callable, str]] = {
    "passive": (cmd_passive, "passive state and its energy"),
    "ergotropy": (cmd_ergotropy, "maximal unitary work W_e"),
    "gibbs": (cmd_gibbs, "Gibbs state at --beta (inf / -inf allowed)"),
    "wth": (cmd_wth, "thermodynamic work at the entropy-matched temperature"),
    "renyi": (cmd_renyi, "Renyi entropy of order --alpha"),
    "divergence": (cmd_divergence, "Renyi divergence D_alpha(first || second)"),
    "wsingle": (cmd_wsingle, "single-shot work with a bath at --beta"),
    "majorize": (cmd_majorize, "majorization relation between two spectra"),
    "epo-sample": (cmd_epo_sample, "sample an energy-preserving channel"),
    "epo-verify": (cmd_epo_verify, "validate a channel and check monotones on a state"),
    "measure": (cmd_measure, "passive-energy entanglement of a bipartite pure state"),
    "vidal": (cmd_vidal, "Vidal monotones E_k"),
    "convert-prob": (cmd_convert_prob, "optimal LOCC conversion probability"),
    "egap": (cmd_egap, "ergotropic gap of a bipartite state"),
    "percopy": (cmd_percopy, "per-copy measure for 1..--copies copies"),
    "asymptotic": (cmd_asymptotic, "many-copy limit of the measure"),
    "cut-gaps": (cmd_cut_gaps, "ergotropic gaps across the three one-vs-rest cuts"),
    "monogamy": (cmd_monogamy, "A|BC gap against the A|B and A|C gaps"),
    "dephased-gap": (cmd_dephased_gap, "local-vs-global work difference after dephasing"),
    "classify3": (cmd_classify3, "classify a canonical three-qubit state"),
    "diagram": (cmd_diagram, "energy-entropy diagram points"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ergotropy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", action="append", metavar="PATH",
                       help="state/channel JSON; repeat for two-argument commands; 'fixture:NAME' loads a shipped fixture")
        p.add_argument("--hamiltonian", action="append", metavar="PATH",
                       help="Hamiltonian JSON; repeat for several parties (default: ladder 0,1,2,...)")
        p.add_argument("--alpha", type=_number)
        p.add_argument("--beta", type=_number)
        p.add_argument("--copies", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=_number)
        p.add_argument("--output", metavar="PATH", help="write JSON here instead of stdout")
    return parser


def _error(code: str, message: str, path: str | None) -> dict:
    return {"error": {"code": code, "message": message, "path": path}}


def run(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    status, path = EXIT_OK, None
    try:
        result = handler(args)
    except InputError as exc:
        err, path = exc.error, exc.path
        result = None
    except ErgotropyError as exc:
        err = exc
        result = None
    if result is None:
        if isinstance(err, (DomainError, NumericalError)):
            status, code = EXIT_DOMAIN, "domain_error"
        else:
            status, code = EXIT_VALIDATION, "validation_error"
        stdout.write(io.dumps(_error(code, str(err), path)) + "\n")
        return status
    if args.output:
        io.write_json(args.output, result)
    else:
        stdout.write(io.dumps(result) + "\n")
    return status


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
