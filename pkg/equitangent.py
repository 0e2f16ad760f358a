"""
    Command line driver for framed polygons, chains of circles and equitangent curves.

    python equitangent.py <command> [input] [options]

    Results are JSON on stdout (or --out); CSV and SVG go to --out when its suffix asks for them.
    Status lines go to stderr. Exit codes: 0 ok, 1 input error, 2 precondition violated,
    3 numerical failure.
"""
import json
import logging
import sys
from typing import Optional, Sequence

import numpy as np
from colorama import init, Fore, Style

from arg_parser import get_config
from RunConfig import RunConfig
import geom_core
from framed_polygons import (compute_framing_odd, framing_family_even, framing_obstruction_even, framing_residual_max,
                             random_convex_polygon)
from circle_chains import centers_polygon, chain_to_framed, framed_to_chain, random_generic_chain
from chain_distributions import edge_speeds, kernel_field, rank_certificate
from bigon_space import BigonState, bigon_commutators, form_values, generator_fields, random_state, singular_curve_test
from equitangent_flow import (BicentricConfig, InscribedPolygon, euler_fuss_residual, independence_scan,
                              integrate_flow, monodromy_defect, poncelet_closure, regular_period, regular_polygon,
                              solve_bicentric_outer, solve_bicentric_radius, spectrum, spectrum_eigensolver,
                              triangle_incircle)
from constructions import (chord_framing_residual, chord_schedule, equitangent_locus, is_nested, joint_residuals,
                           locus_residuals, segment_power_residuals, smooth_regular_ngon)
from instance_data import (BicentricData, BigonPathData, ChainData, FramedPolygonData, InscribedPolygonData,
                           PolygonData, load_instance)
from errors import GeometryError, MalformedInstance, UnsupportedN

logger = logging.getLogger(__name__)


def status(message: str, color: str = Fore.GREEN):
    print(Style.BRIGHT + color + message, file=sys.stderr)


def _jsonable(o):
    if hasattr(o, 'tolist'):
        return o.tolist()
    if hasattr(o, 'to_dict'):
        return o.to_dict()
    raise TypeError('Not serializable: {!r}'.format(type(o)))


def emit(cfg: RunConfig, payload: dict, to_file: bool = True):
    text = json.dumps(payload, indent=2, sort_keys=True, default=_jsonable)
    if to_file and cfg.out and cfg.out.endswith('.json'):
        with open(cfg.out, 'w', encoding='utf8') as f:
            f.write(text + '\n')
        status('Wrote {}'.format(cfg.out))
    else:
        print(text)


def _rng(cfg: RunConfig) -> np.random.RandomState:
    return np.random.RandomState(cfg.seed)


def _inscribed(cfg: RunConfig, default_n: int = 5) -> InscribedPolygon:
    if cfg.input_path:
        return load_instance(InscribedPolygonData(cfg.input_path))
    n = cfg.n or default_n
    A = regular_polygon(n)
    if cfg.perturb > 0:
        A = InscribedPolygon(A.psi + _rng(cfg).uniform(-cfg.perturb, cfg.perturb, n) * np.pi / n)
    return A


def cmd_frame(cfg: RunConfig) -> dict:
    if cfg.input_path:
        P = load_instance(PolygonData(cfg.input_path))
    else:
        P = random_convex_polygon(cfg.n or 5, _rng(cfg))
    if P.n % 2 == 1:
        FP = compute_framing_odd(P)
        payload = {"n": P.n, "parity": "odd", "framed": FP.to_dict()}
    else:
        obstruction = framing_obstruction_even(P)
        FP = framing_family_even(P, cfg.family_s)
        payload = {"n": P.n, "parity": "even", "obstruction": obstruction, "s": cfg.family_s, "framed": FP.to_dict()}
    payload["residuals"] = FP.residuals()
    payload["residual_max"] = framing_residual_max(FP)
    status('Framed {}-gon, max residual {:.3e}'.format(P.n, payload["residual_max"]))
    return payload


def _chain_report(chain) -> dict:
    FP = chain_to_framed(chain)
    back = framed_to_chain(FP)
    kernel = kernel_field(chain)
    return {
        "chain": chain.to_dict(),
        "framed": FP.to_dict(),
        "signed_perimeter": centers_polygon(chain).signed_perimeter(),
        "framing_residual_max": framing_residual_max(FP),
        "round_trip": max(float(np.max(np.abs(back.centers - chain.centers))),
                          float(np.max(np.abs(back.signed_radii - chain.signed_radii)))),
        "kernel_vertex_speed": float(np.max(np.abs(edge_speeds(chain, kernel)))),
        "kernel_radius_rates": kernel.radius_rates,
    }


def cmd_chain(cfg: RunConfig) -> dict:
    if cfg.from_framed:
        if not cfg.input_path:
            raise MalformedInstance('--from_framed needs a framed polygon file')
        FP = load_instance(FramedPolygonData(cfg.input_path))
        chain = framed_to_chain(FP)
        status('Reconstructed a chain of {} circles'.format(chain.n))
        return {"chain": chain.to_dict(), "signed_perimeter": centers_polygon(chain).signed_perimeter()}
    if cfg.input_path:
        chains = [load_instance(ChainData(cfg.input_path))]
    else:
        rng = _rng(cfg)
        chains = [random_generic_chain(cfg.n or 5, rng) for _ in range(cfg.count)]
    reports = [_chain_report(c) for c in chains]
    status('Checked {} chain(s), worst round trip {:.3e}'.format(len(reports), max(r["round_trip"] for r in reports)))
    return reports[0] if len(reports) == 1 else {"instances": reports}


def cmd_rank(cfg: RunConfig) -> dict:
    rng = _rng(cfg)
    if cfg.bigon:
        states = [BigonState(*cfg.state)] if cfg.state else [random_state(rng) for _ in range(cfg.count)]
        entries = [bigon_commutators(s, cfg.step, strict=False).to_dict() for s in states]
        target = 5
    else:
        n = cfg.n or 5
        if n < 4:
            raise UnsupportedN('Rank certification needs n >= 4: a chain of three circles has collinear centers '
                               'and its tangency points coincide')
        target = 2 * n
        entries = []
        for _ in range(cfg.count):
            cert = rank_certificate(random_generic_chain(n, rng), cfg.step, strict=False)
            entries.append(cert.to_dict())
    rejected = sum(1 for e in entries if not e["validated"])
    if rejected:
        status('{} certificate(s) failed the Richardson check at step {:g}'.format(rejected, cfg.step), Fore.YELLOW)
    achieved = sum(1 for e in entries if e["rank"] == target and e["validated"])
    summary = '{} achieved {}/{}'.format(target, achieved, len(entries))
    status(summary, Fore.GREEN if achieved == len(entries) else Fore.YELLOW)
    return {"entries": entries, "summary": summary}


def cmd_bigon(cfg: RunConfig) -> dict:
    if cfg.input_path:
        loader = BigonPathData(cfg.input_path)
        states = load_instance(loader)
        verdict = singular_curve_test(loader.times, states, full_check=cfg.full_check)
        status('Path verdict: {}'.format(verdict.verdict))
        return {"verdict": verdict.verdict, "max_phi_rate": verdict.max_phi_rate,
                "max_form_residual": verdict.max_form_residual, "kernel_condition": verdict.kernel_condition}
    s = BigonState(*cfg.state) if cfg.state else random_state(_rng(cfg))
    cert = bigon_commutators(s, cfg.step)
    annihilation = max(float(np.max(np.abs(form_values(s, g)))) for g in generator_fields(s))
    status('Bigon rank {} at {}'.format(cert.rank, s.vector().tolist()))
    payload = cert.to_dict()
    payload.update({"state": s.vector(), "form_annihilation": annihilation})
    return payload


def cmd_flow(cfg: RunConfig) -> dict:
    A0 = _inscribed(cfg)
    T = cfg.T if cfg.T is not None else regular_period(A0.n)
    traj = integrate_flow(A0, T, cfg.steps, cfg.clock, halving_check=cfg.halving)
    payload = {"n": A0.n, "T": T, "steps": cfg.steps, "clock": cfg.clock, "initial": A0.psi,
               "final": traj.final, "halving_defect": traj.halving_defect}
    if A0.n == 3:
        c0, r0 = triangle_incircle(A0.vertices())
        c1, r1 = triangle_incircle(traj.polygon(-1).vertices())
        payload["incircle_drift"] = max(float(np.linalg.norm(c1 - c0)), abs(r1 - r0))
    if cfg.out and cfg.out.endswith('.csv'):
        traj.write_csv(cfg.out)
        status('Wrote {}'.format(cfg.out))
    elif cfg.out and cfg.out.endswith('.svg'):
        from plotting import plot_flow_polygons
        idx = np.linspace(0, len(traj.times) - 1, 6).astype(int)
        plot_flow_polygons([traj.polygon(k) for k in idx], cfg.out, title='{}-gon along the flow'.format(A0.n))
    status('Integrated {}-gon for T={:.6g}'.format(A0.n, T))
    return payload


def cmd_monodromy(cfg: RunConfig) -> dict:
    A0 = _inscribed(cfg)
    T0 = regular_period(A0.n)
    tau, defect = monodromy_defect(A0, cfg.max_periods * T0, cfg.shift, cfg.clock, cfg.steps)
    status('Return time {:.10g} ({:.6g} regular periods), defect {:.3e}'.format(tau, tau / T0, defect))
    return {"n": A0.n, "shift": cfg.shift, "tau": tau, "defect": defect, "regular_period": T0}


def cmd_spectrum(cfg: RunConfig) -> dict:
    n = cfg.n or 5
    formula = spectrum(n)
    numeric = spectrum_eigensolver(n)
    agreement = float(np.max(np.abs(formula - numeric)))
    payload = {"n": n, "magnitudes": formula, "eigensolver": numeric, "agreement": agreement}
    if len(formula) >= 2:
        payload["ratio"] = float(formula[0] / formula[1])
    if n == 5:
        status('|lambda_1| / |lambda_2| = {:.15f}, sqrt(5) - 2 = {:.15f}'.format(payload["ratio"], np.sqrt(5) - 2))
    status('Spectrum of the {}-gon, formula vs eigensolver {:.3e}'.format(n, agreement))
    return payload


def cmd_scan(cfg: RunConfig) -> dict:
    n = cfg.n or 5
    relations = independence_scan(n, cfg.bound)
    status('{} integer relation(s) with |c| <= {}'.format(len(relations), cfg.bound),
           Fore.GREEN if not relations else Fore.YELLOW)
    return {"n": n, "bound": cfg.bound, "relations": [list(c) for c in relations]}


def cmd_bicentric(cfg: RunConfig) -> dict:
    if cfg.input_path:
        config = load_instance(BicentricData(cfg.input_path))
    else:
        n = cfg.n or 3
        if cfg.r is None:
            R = cfg.R if cfg.R is not None else 1.0
            r = solve_bicentric_radius(n, cfg.d, R)
        else:
            r = cfg.r
            R = cfg.R if cfg.R is not None else solve_bicentric_outer(n, r, cfg.d)
        config = BicentricConfig(n, R, r, cfg.d)
    n, R, r, d = config.n, config.R, config.r, config.d
    starts = np.linspace(0.0, 2.0 * np.pi, cfg.starts, endpoint=False)
    defects = [abs(poncelet_closure(config, s).closure_defect) for s in starts]
    try:
        relation = euler_fuss_residual(config)
    except UnsupportedN:
        relation = None
    closes = max(defects) < max(cfg.tol, 1e-9)
    status('n={} R={:.12g} r={:.12g} d={:.12g}: closure defect {:.3e}'.format(n, R, r, d, max(defects)),
           Fore.GREEN if closes else Fore.YELLOW)
    return {"n": n, "R": R, "r": r, "d": d, "closure_defect": max(defects),
            "euler_fuss_residual": relation, "closes": closes}


def cmd_construct(cfg: RunConfig) -> dict:
    n = cfg.n or 8
    curve = smooth_regular_ngon(n, cfg.corner_radius, cfg.side_radius)
    locus = equitangent_locus(curve)
    asymmetry = locus_residuals(curve, locus, cfg.samples)
    schedule = chord_schedule(n)
    payload = {
        "n": n,
        "arcs": len(curve.arcs),
        "joint_residual": float(np.max(joint_residuals(curve))),
        "locus": locus.to_dict(),
        "max_asymmetry": float(np.max(asymmetry)),
        "power_residual": float(np.max(segment_power_residuals(curve, locus))),
        "nested": is_nested(curve, locus),
        "schedule": [m.after.label() for m in schedule],
        "schedule_framing_residual": max(abs(chord_framing_residual(m.after, n)) for m in schedule),
    }
    if cfg.out and cfg.out.endswith('.svg'):
        from plotting import plot_construction
        plot_construction(curve, locus, cfg.out, title='Smoothed {}-gon and its equitangent locus'.format(n))
    status('Equitangent locus of the smoothed {}-gon: {} segments, max |L1 - L2| {:.3e}'.format(
        n, len(locus.vertices), payload["max_asymmetry"]))
    return payload


COMMAND_TABLE = {
    "frame": cmd_frame,
    "chain": cmd_chain,
    "rank": cmd_rank,
    "bigon": cmd_bigon,
    "flow": cmd_flow,
    "monodromy": cmd_monodromy,
    "spectrum": cmd_spectrum,
    "scan": cmd_scan,
    "bicentric": cmd_bicentric,
    "construct": cmd_construct,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    init(autoreset=True)
    cfg = get_config(argv)
    logging.basicConfig(level=logging.DEBUG if cfg.verbose else logging.WARNING, stream=sys.stderr)
    if cfg.verbose:
        print(f"{cfg}\n", file=sys.stderr)
    geom_core.set_tolerance(cfg.tol)
    try:
        payload = COMMAND_TABLE[cfg.command](cfg)
    except GeometryError as e:
        print(json.dumps(e.to_dict(), sort_keys=True))
        status('{}: {}'.format(type(e).__name__, e.message), Fore.RED)
        return e.exit_code
    emit(cfg, payload)
    return 0


if __name__ == '__main__':
    sys.exit(main())
