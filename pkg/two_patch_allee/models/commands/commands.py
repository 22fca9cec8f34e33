from __future__ import annotations

import argparse
import csv
import dataclasses
from typing import Optional, Sequence, TextIO

from two_patch_allee.models.cartography import (
    Axis,
    Classifier,
    Plane,
    SvgStyle,
    SweepSpec,
    containment_report,
    evaluate_certificate,
    export_csv,
    export_nullclines,
    export_svg,
    run_sweep,
    summarize,
)
from two_patch_allee.models.certificates import CertificateId, CertificateVerdict
from two_patch_allee.models.config import RunConfig
from two_patch_allee.models.dynamics import (
    basin_sample,
    integrate,
    perfect_mixing_experiment,
    verify_global_extinction,
)
from two_patch_allee.models.equilibria import EquilibriumSet, find_equilibria
from two_patch_allee.models.logger import Logger
from two_patch_allee.models.patches import (
    PatchParams,
    ReactionKind,
    ReactionTag,
    State,
    denormalize,
)
from two_patch_allee.models.sawtooth import sawtooth_equilibria_exact
from two_patch_allee.utils import constants
from two_patch_allee.utils.errors import UnsupportedError
from two_patch_allee.utils.utils import format_float, parse_float_list, parse_range

# exit codes
OK = 0
ERROR = 1
CERTIFICATE_FAILS = 2


def _writer(out: TextIO):
    return csv.writer(out, lineterminator="\n")


def _physical(config: RunConfig) -> PatchParams:
    """Physical parameters of a config; normalized models are read with D = k1 = 1."""
    if isinstance(config.model, PatchParams):
        return config.model
    a = config.reaction.a if config.reaction.tag is ReactionTag.CUBIC else 0.5
    return denormalize(config.model, 1.0, 1.0, a, a)


def _log_warnings(found: EquilibriumSet) -> None:
    for warning in found.warnings:
        Logger.warning(warning)


def cmd_equilibria(
    config: RunConfig,
    out: TextIO,
    svg_path: Optional[str] = None,
    title: Optional[str] = None,
) -> int:
    """
    List the nonnegative equilibria of the configured system, one CSV row each.

    :param config: run configuration
    :param out: output stream
    :param svg_path: nullcline image output, if any
    :param title: SVG title
    :return: exit code
    """
    n = config.normalized
    if config.reaction.tag is ReactionTag.SAWTOOTH:
        found = sawtooth_equilibria_exact(n)
        _log_warnings(found)
    else:
        found = find_equilibria(n, config.reactions, config.solver)
    if svg_path:
        export_nullclines(n, config.reactions, svg_path, list(found), SvgStyle(title=title or ""))
    writer = _writer(out)
    writer.writerow(
        ["x", "y", "eig1_re", "eig1_im", "eig2_re", "eig2_im", "stability", "region"]
    )
    for e in found:
        eig1, eig2 = e.eigenvalues
        writer.writerow(
            [format_float(v) for v in (e.x, e.y, eig1.real, eig1.imag, eig2.real, eig2.imag)]
            + [e.stability.value, e.region.value]
        )
    return OK


def _applicable(config: RunConfig, certificate: CertificateId) -> None:
    tag = config.reaction.tag
    if certificate is CertificateId.SAWTOOTH_PREDICATE:
        if tag is not ReactionTag.SAWTOOTH:
            raise UnsupportedError(
                "sawtooth-predicate concerns the sawtooth reaction; pass --reaction sawtooth"
            )
    elif tag is not ReactionTag.CUBIC:
        raise UnsupportedError(
            f"{certificate.value} concerns the cubic reaction; pass --reaction cubic"
        )


def write_verdict(verdict: CertificateVerdict, out: TextIO) -> None:
    """
    Write a verdict as a readable report.

    :param verdict: evaluated certificate
    :param out: output stream
    """
    out.write(f"certificate {verdict.certificate_id.value}\n")
    for condition in verdict.conditions:
        mark = "holds" if condition.holds else "FAILS"
        out.write(
            f"  {mark:5}  {condition.name}  "
            f"left={format_float(condition.left)} right={format_float(condition.right)}\n"
        )
    for name, value in verdict.bounds.items():
        out.write(f"bound {name}={format_float(value)}\n")
    for name, value in verdict.flags.items():
        out.write(f"flag {name}={str(value).lower()}\n")
    out.write(f"verdict {'holds' if verdict.holds else 'fails'}\n")


def cmd_check(
    config: RunConfig, certificate: CertificateId, out: TextIO, oracle: bool = False
) -> int:
    """
    Evaluate one certificate on the configured parameters.

    :param config: run configuration
    :param certificate: certificate to evaluate
    :param out: output stream
    :param oracle: numeric upper condition for thm-general-a
    :return: 0 if the certificate holds, 2 if not
    """
    certificate = CertificateId(certificate)
    _applicable(config, certificate)
    normalized = (CertificateId.COROLLARY, CertificateId.SAWTOOTH_PREDICATE)
    params = config.normalized if certificate in normalized else _physical(config)
    verdict = evaluate_certificate(certificate, params, oracle)
    write_verdict(verdict, out)
    return OK if verdict.holds else CERTIFICATE_FAILS


def default_overlays(spec_plane: Plane, reaction: ReactionKind, ratio: float) -> tuple:
    """
    Certificates drawn on a sweep when none are requested.

    :param spec_plane: swept plane
    :param reaction: reaction family
    :param ratio: capacity ratio of the sweep
    :return: tuple of CertificateId
    """
    match reaction.tag:
        case ReactionTag.SAWTOOTH:
            return (CertificateId.SAWTOOTH_PREDICATE,) if 0 < ratio < 0.5 else ()
        case ReactionTag.CUBIC if reaction.a == 0.5:
            if spec_plane is Plane.LAMBDA:
                return (CertificateId.THM_MAIN,)
            return (CertificateId.COROLLARY,)
        case ReactionTag.CUBIC:
            return (CertificateId.THM_GENERAL_A,)
        case _:
            return ()


def sweep_spec(
    config: RunConfig,
    plane: Plane,
    x_axis: Axis,
    y_axis: Axis,
    overlays: Optional[Sequence[CertificateId]] = None,
    classifier: Optional[Classifier] = None,
    oracle: bool = False,
) -> SweepSpec:
    """
    Build a sweep around the configured model.

    The lambda plane keeps D, k1 and k2 of the model; the alpha-beta plane keeps its gamma.

    :param config: run configuration
    :param plane: swept plane
    :param x_axis: first axis
    :param y_axis: second axis
    :param overlays: certificates to draw; None picks the ones that apply
    :param classifier: counting method; None uses the exact one for the sawtooth
    :param oracle: numeric upper condition for thm-general-a overlays
    :return: SweepSpec
    """
    plane = Plane(plane)
    p = _physical(config)
    gamma = config.normalized.gamma
    ratio = p.k2 / p.k1 if plane is Plane.LAMBDA else gamma
    if classifier is None:
        sawtooth = config.reaction.tag is ReactionTag.SAWTOOTH
        classifier = Classifier.SAWTOOTH_EXACT if sawtooth else Classifier.NUMERIC
    if overlays is None:
        overlays = default_overlays(plane, config.reaction, ratio)
    return SweepSpec(
        plane=plane,
        x_axis=x_axis,
        y_axis=y_axis,
        reaction=config.reaction,
        classifier=classifier,
        overlays=tuple(overlays),
        D=p.D,
        k1=p.k1,
        k2=p.k2,
        gamma=None if plane is Plane.LAMBDA else gamma,
        oracle=oracle,
        solver=config.solver,
    )


def cmd_sweep(
    config: RunConfig,
    spec: SweepSpec,
    out: TextIO,
    csv_path: Optional[str] = None,
    svg_path: Optional[str] = None,
    threads: int = 1,
    title: Optional[str] = None,
) -> int:
    """
    Sweep a parameter plane, write the requested files and summarize the map.

    :param config: run configuration
    :param spec: sweep to run
    :param out: stream for the summary
    :param csv_path: CSV output, if any
    :param svg_path: SVG output, if any
    :param threads: worker count
    :param title: SVG title
    :return: exit code
    """
    Logger.debug(f"Sweep {spec.to_dict()} under seed {config.seed}")
    region_map = run_sweep(spec, threads=threads)
    if csv_path:
        export_csv(region_map, csv_path)
    if svg_path:
        export_svg(region_map, svg_path, SvgStyle(title=title or ""))
    writer = _writer(out)
    writer.writerow(["count", "fraction"])
    for count, fraction in summarize(region_map).items():
        writer.writerow([count, format_float(fraction)])
    if spec.overlays:
        writer.writerow(
            ["certificate", "certified", "violations", "inverse_violations", "skipped", "fraction"]
        )
    for certificate in spec.overlays:
        report = containment_report(region_map, certificate)
        writer.writerow(
            [
                certificate.value,
                report.certified,
                len(report.violations),
                len(report.inverse_violations),
                report.skipped,
                "" if report.fraction is None else format_float(report.fraction),
            ]
        )
    return OK


def cmd_simulate(
    config: RunConfig,
    x0: Optional[float],
    y0: Optional[float],
    t_end: Optional[float],
    out: TextIO,
) -> int:
    """
    Integrate one trajectory and write it as CSV with a terminal footer line. Physical
    models given with k2 > k1 run in the canonical patch order; a footer line says so.

    :param config: run configuration
    :param x0: first initial density; defaults to the capacity of patch 1
    :param y0: second initial density; defaults to the capacity of patch 2
    :param t_end: horizon; defaults to the integrator's t_max
    :param out: output stream
    :return: exit code, 0 also for diverged runs
    """
    if isinstance(config.model, PatchParams):
        params, reaction, columns = config.model, config.reaction, ["t", "x1", "x2"]
        start = (config.model.k1, config.model.k2)
    else:
        params, reaction, columns = config.model, config.reactions, ["t", "x", "y"]
        start = (1.0, 1 / config.model.gamma)
    s0 = State(start[0] if x0 is None else x0, start[1] if y0 is None else y0)
    opts = config.integrator
    if t_end is not None:
        opts = dataclasses.replace(opts, t_max=t_end)
    trajectory = integrate(params, reaction, config.coupling, s0, opts)
    writer = _writer(out)
    writer.writerow(columns)
    for t, (x, y) in zip(trajectory.times, trajectory.states):
        writer.writerow([format_float(t), format_float(x), format_float(y)])
    terminal = trajectory.terminal
    if isinstance(params, PatchParams) and params.swapped:
        out.write("# swapped: k2 > k1 as configured, x1 is the configured patch 2\n")
    out.write(
        f"# terminal {terminal.kind.value} at ({format_float(terminal.point.x)}, "
        f"{format_float(terminal.point.y)}) t={format_float(trajectory.duration)}"
        f"{' ' + terminal.message if terminal.message else ''}\n"
    )
    if not trajectory.converged:
        Logger.warning(f"trajectory did not converge: {terminal.message}")
    return OK


def cmd_mixing(config: RunConfig, D_list: Sequence[float], out: TextIO) -> int:
    """
    Run the perfect-mixing experiment for the configured logistic patches.

    :param config: run configuration with the logistic reaction
    :param D_list: strictly increasing diffusion rates
    :param out: output stream
    :return: exit code
    """
    if config.reaction.tag is not ReactionTag.LOGISTIC:
        raise UnsupportedError(
            "the mixing experiment needs the logistic reaction; pass --reaction logistic"
        )
    p = _physical(config)
    entries = perfect_mixing_experiment(
        p.k1, p.k2, p.lambda1, p.lambda2, D_list, config.integrator
    )
    writer = _writer(out)
    writer.writerow(["D", "total", "capacity", "relative_gap", "converged"])
    for entry in entries:
        writer.writerow(
            [
                format_float(entry.D),
                format_float(entry.total),
                format_float(entry.capacity),
                format_float(entry.relative_gap),
                int(entry.converged),
            ]
        )
    return OK


def cmd_extinction(config: RunConfig, n_samples: int, out: TextIO, threads: int = 1) -> int:
    """
    Sample starts in [0, k1]^2 and report how many die out.

    :param config: run configuration with the cubic reaction
    :param n_samples: number of starts
    :param out: output stream
    :param threads: worker count
    :return: exit code
    """
    if config.reaction.tag is not ReactionTag.CUBIC:
        raise UnsupportedError(
            "the extinction check needs the cubic reaction; pass --reaction cubic"
        )
    report = verify_global_extinction(
        _physical(config), n_samples, config.integrator, config.seed, threads
    )
    writer = _writer(out)
    writer.writerow(["seed", "n_samples", "fraction", "worst_residual", "max_time", "certificate"])
    holds = report.certificate_holds
    writer.writerow(
        [
            report.seed,
            report.n_samples,
            "" if report.fraction is None else format_float(report.fraction),
            format_float(report.worst_residual),
            format_float(report.max_time),
            "" if holds is None else int(holds),
        ]
    )
    for survivor in report.survivors:
        out.write(f"# survivor {format_float(survivor.x)} {format_float(survivor.y)}\n")
    return OK


def cmd_basins(config: RunConfig, n_samples: int, out: TextIO, threads: int = 1) -> int:
    """
    Estimate the basin share of every equilibrium by sampling starts.

    :param config: run configuration
    :param n_samples: number of starts
    :param out: output stream
    :param threads: worker count
    :return: exit code
    """
    params = config.model
    reaction = config.reaction if isinstance(params, PatchParams) else config.reactions
    report = basin_sample(
        params, reaction, n_samples, opts=config.integrator, seed=config.seed, threads=threads
    )
    writer = _writer(out)
    writer.writerow(["x", "y", "fraction"])
    for e, fraction in zip(report.equilibria, report.fractions):
        writer.writerow([format_float(e.x), format_float(e.y), format_float(fraction)])
    out.write(f"# unresolved {format_float(report.unresolved)} seed {report.seed}\n")
    return OK


def create_help(cli) -> None:
    """
    Create the help command.

    :param cli: PatchCli to add the help command to
    """

    # name of the help command
    name = "help"

    # description of the help command
    description = "Show a list of all commands."

    def help(config: RunConfig, args: argparse.Namespace, out: TextIO) -> int:
        """Do help command callback."""
        Logger.debug("Running Help Command")
        out.write("List of all commands:\n")
        for command in cli.commands:
            out.write(f"  {command['name']:12} {command['description']}\n")
        return OK

    cli.add_parser(name, description).set_defaults(callback=help)
    # add a command to the list of commands
    cli.add_command(name, description)


def create_equilibria(cli) -> None:
    """
    Create the equilibria command.

    :param cli: PatchCli to add the equilibria command to
    """

    # name of the equilibria command
    name = "equilibria"

    # description of the equilibria command
    description = "List every nonnegative equilibrium with its stability and region."

    def equilibria(config: RunConfig, args: argparse.Namespace, out: TextIO) -> int:
        """Do equilibria command callback."""
        Logger.info("Running Equilibria Command")
        return cmd_equilibria(config, out, args.svg, args.title)

    parser = cli.add_parser(name, description)
    parser.add_argument("--svg", help="nullcline image output file")
    parser.add_argument("--title", help="SVG title")
    parser.set_defaults(callback=equilibria)
    cli.add_command(name, description)


def create_sawtooth(cli) -> None:
    """
    Create the sawtooth command, equilibria under the sawtooth reaction.

    :param cli: PatchCli to add the sawtooth command to
    """

    # name of the sawtooth command
    name = "sawtooth"

    # description of the sawtooth command
    description = "List the exact equilibria of the sawtooth system."

    def sawtooth(config: RunConfig, args: argparse.Namespace, out: TextIO) -> int:
        """Do sawtooth command callback."""
        Logger.info("Running Sawtooth Command")
        return cmd_equilibria(config.replace(reaction=ReactionKind.sawtooth()), out)

    cli.add_parser(name, description).set_defaults(callback=sawtooth)
    cli.add_command(name, description)


def create_check(cli) -> None:
    """
    Create the check command.

    :param cli: PatchCli to add the check command to
    """

    # name of the check command
    name = "check"

    # description of the check command
    description = "Evaluate a certificate; exit 0 if it holds and 2 if not."

    def check(config: RunConfig, args: argparse.Namespace, out: TextIO) -> int:
        """Do check command callback."""
        Logger.info(f"Running Check Command for {args.certificate}")
        return cmd_check(config, CertificateId(args.certificate), out, args.oracle)

    parser = cli.add_parser(name, description)
    parser.add_argument("certificate", choices=[c.value for c in CertificateId])
    parser.add_argument(
        "--oracle", action="store_true", help="numeric upper condition for thm-general-a"
    )
    parser.set_defaults(callback=check)
    cli.add_command(name, description)


def create_sweep(cli) -> None:
    """
    Create the sweep command.

    :param cli: PatchCli to add the sweep command to
    """

    # name of the sweep command
    name = "sweep"

    # description of the sweep command
    description = "Count equilibria over a parameter plane and overlay certificates."

    def sweep(config: RunConfig, args: argparse.Namespace, out: TextIO) -> int:
        """Do sweep command callback."""
        Logger.info("Running Sweep Command")
        low, high = constants.SWEEP_RANGE
        default = args.range or f"{low}:{high}:{constants.SWEEP_STEPS}"
        x_axis = Axis(*parse_range(args.x_range or default))
        y_axis = Axis(*parse_range(args.y_range or default))
        overlays = None
        if args.no_certificates:
            overlays = []
        elif args.certificate is not None:
            overlays = [CertificateId(c) for c in args.certificate]
        classifier = None if args.classifier is None else Classifier(args.classifier)
        spec = sweep_spec(
            config, Plane(args.plane), x_axis, y_axis, overlays, classifier, args.oracle
        )
        return cmd_sweep(config, spec, out, args.csv, args.svg, args.threads, args.title)

    parser = cli.add_parser(name, description)
    parser.add_argument("--plane", choices=[p.value for p in Plane], default=Plane.LAMBDA.value)
    parser.add_argument("--range", help="MIN:MAX:STEPS of both axes")
    parser.add_argument("--x-range", help="MIN:MAX:STEPS of the first axis")
    parser.add_argument("--y-range", help="MIN:MAX:STEPS of the second axis")
    parser.add_argument(
        "--certificate",
        action="append",
        choices=[c.value for c in CertificateId],
        help="overlay to draw; repeatable",
    )
    parser.add_argument("--no-certificates", action="store_true", help="draw no overlay")
    parser.add_argument("--classifier", choices=[c.value for c in Classifier])
    parser.add_argument(
        "--oracle", action="store_true", help="numeric upper condition for thm-general-a"
    )
    parser.add_argument("--csv", help="CSV output file")
    parser.add_argument("--svg", help="SVG output file")
    parser.add_argument("--title", help="SVG title")
    parser.set_defaults(callback=sweep)
    cli.add_command(name, description)


def create_simulate(cli) -> None:
    """
    Create the simulate command.

    :param cli: PatchCli to add the simulate command to
    """

    # name of the simulate command
    name = "simulate"

    # description of the simulate command
    description = "Integrate one trajectory and write it as CSV."

    def simulate(config: RunConfig, args: argparse.Namespace, out: TextIO) -> int:
        """Do simulate command callback."""
        Logger.info("Running Simulate Command")
        return cmd_simulate(config, args.x0, args.y0, args.t_end, out)

    parser = cli.add_parser(name, description)
    parser.add_argument("--x0", type=float, help="initial density of the larger patch")
    parser.add_argument("--y0", type=float, help="initial density of the smaller patch")
    parser.add_argument("--t-end", type=float, help="integration horizon")
    parser.set_defaults(callback=simulate)
    cli.add_command(name, description)


def create_mixing(cli) -> None:
    """
    Create the mixing command.

    :param cli: PatchCli to add the mixing command to
    """

    # name of the mixing command
    name = "mixing"

    # description of the mixing command
    description = "Compare simulated logistic totals with the perfect-mixing capacity."

    def mixing(config: RunConfig, args: argparse.Namespace, out: TextIO) -> int:
        """Do mixing command callback."""
        Logger.info("Running Mixing Command")
        return cmd_mixing(config, parse_float_list(args.D_list), out)

    parser = cli.add_parser(name, description)
    parser.add_argument(
        "--D-list", default=constants.MIXING_D_LIST, help="comma separated diffusion rates"
    )
    parser.set_defaults(callback=mixing)
    cli.add_command(name, description)


def create_extinction(cli) -> None:
    """
    Create the extinction command.

    :param cli: PatchCli to add the extinction command to
    """

    # name of the extinction command
    name = "extinction"

    # description of the extinction command
    description = "Sample starts and report the share that dies out."

    def extinction(config: RunConfig, args: argparse.Namespace, out: TextIO) -> int:
        """Do extinction command callback."""
        Logger.info("Running Extinction Command")
        return cmd_extinction(config, args.samples, out, args.threads)

    parser = cli.add_parser(name, description)
    parser.add_argument("--samples", type=int, default=constants.N_SAMPLES)
    parser.set_defaults(callback=extinction)
    cli.add_command(name, description)


def create_basins(cli) -> None:
    """
    Create the basins command.

    :param cli: PatchCli to add the basins command to
    """

    # name of the basins command
    name = "basins"

    # description of the basins command
    description = "Estimate the basin share of every equilibrium."

    def basins(config: RunConfig, args: argparse.Namespace, out: TextIO) -> int:
        """Do basins command callback."""
        Logger.info("Running Basins Command")
        return cmd_basins(config, args.samples, out, args.threads)

    parser = cli.add_parser(name, description)
    parser.add_argument("--samples", type=int, default=constants.N_SAMPLES)
    parser.set_defaults(callback=basins)
    cli.add_command(name, description)
