"""
Command runners: one method per subcommand, each turning a validated
RunConfig into a report and an optional table.
"""
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from datasource.results_store import load_presets
from forms.assembly import QuadratureSizes
from geometry.fields import PolynomialField
from models.request_models import OutputFormat, RunConfig, SolverKind
from models.response_models import (BaseReport, BranchReport, BranchRow, ClusterRecord, CriticalityReport,
                                    HadamardReport, LemmaReport, RadialityReport, SpectrumReport)
from reference_spectra.clusters import EigenCluster, cluster
from reference_spectra.disk import disk_spectrum
from reference_spectra.rectangle import rectangle_navier_spectrum, stretch_branch, stretch_spectrum
from ritz.basis import ritz_basis
from ritz.solver import ritz_spectrum
from shape_calculus.criticality import criticality_profile
from shape_calculus.finite_difference import (ChartFamily, RectangleStretchFamily, fd_eigen_derivative,
                                              one_sided_slopes, relative_error)
from shape_calculus.hadamard import hadamard_derivative, lagrange_scale
from shape_calculus.lemmas import DEFAULT_STEPS, lemma_check
from shape_calculus.radiality import radiality_profiles
from shape_calculus.symmetric import elementary_symmetric
from system.errors import InvalidParametersError, VerificationError

logger = logging.getLogger(__name__)

HADAMARD_STEPS = (1e-3, 5e-4)
BRANCH_STEPS = (2e-3, 1e-3, 5e-4, 2.5e-4)
DEFAULT_SWEEP = (-0.1, 0.1, 41)

THRESHOLDS = {
    "hadamard": 1e-5,
    "hadamard_ritz": 1e-3,
    "criticality": 1e-6,
    "radiality": 1e-8,
    "lemma": 1e-7,
    "branches": 1e-6,
}
# A derivative that vanishes by symmetry is compared against lambda_F * |boundary|.
ZERO_DERIVATIVE_TOL = 1e-6
# A single member of a degenerate cluster must visibly break radial symmetry.
PARTIAL_VARIATION = 0.1

Table = Tuple[List[str], List[list]]


@dataclass
class CommandOutput:
    """A report plus the rows written when CSV output is requested."""
    report: BaseReport
    table: Optional[Table] = None


@dataclass
class PlateLab:
    """Runs the plate-lab commands for one configuration."""
    config: RunConfig
    _commands: Dict[str, Callable[[], CommandOutput]] = field(init=False, repr=False)

    def __post_init__(self):
        self._commands = {
            "spectrum": self.spectrum,
            "hadamard": self.hadamard,
            "criticality": self.criticality,
            "radiality": self.radiality,
            "lemma": self.lemma,
            "branches": self.branches,
        }

    @property
    def commands(self) -> List[str]:
        return list(self._commands)

    @property
    def quad(self) -> QuadratureSizes:
        c = self.config
        return QuadratureSizes(radial=c.radial_nodes, angular=c.angular_nodes, boundary=c.boundary_nodes)

    def run(self, command: str) -> CommandOutput:
        """Run ``command``; thresholds are enforced separately by ``verify``."""
        if command not in self._commands:
            raise InvalidParametersError(f"Unknown command {command!r}, expected one of {', '.join(self.commands)}")
        logger.info(f"Running {command} for {self.config.problem.value}")
        return self._commands[command]()

    def verify(self, command: str, output: CommandOutput) -> None:
        """Raise VerificationError under --assert when the report did not pass."""
        report = output.report
        if self.config.check and report.passed is False:
            raise VerificationError(f"{command} missed its threshold {report.threshold:.3g}")

    def _threshold(self, name: str) -> float:
        return self.config.threshold if self.config.threshold is not None else THRESHOLDS[name]

    def _clusters(self, count: int) -> List[EigenCluster]:
        c = self.config
        chart = c.star_chart
        problem = c.problem_record
        if c.solver == SolverKind.BESSEL:
            n_max = c.n_max if c.n_max is not None else count + 4
            return disk_spectrum(c.params, problem, chart.base_radius, n_max, count)
        basis = ritz_basis(chart, problem.space_constraint, c.degree)
        return ritz_spectrum(chart, c.params, problem, basis, self.quad, count, c.quotient)

    def _cluster(self) -> EigenCluster:
        clusters = self._clusters(self.config.cluster_index)
        return clusters[self.config.cluster_index - 1]

    def _header(self) -> dict:
        c = self.config
        return {"problem": c.problem.value, "tau": c.tau, "sigma": c.sigma}

    def spectrum(self) -> CommandOutput:
        c = self.config
        if c.rectangle is not None:
            entries = rectangle_navier_spectrum(c.rectangle.a, c.rectangle.b, c.tau, c.count)
            values = [lam for lam, _, _ in entries]
            records = [ClusterRecord(lambda_F=float(np.mean([values[k] for k in group])),
                                     multiplicity=len(group),
                                     indices=[k + 1 for k in group],
                                     eigenvalues=[values[k] for k in group],
                                     labels=[f"({entries[k][1]},{entries[k][2]})" for k in group])
                       for group in cluster(values)]
            solver, disk_radius = "closed_form", None
        else:
            records = [_cluster_record(cl) for cl in self._clusters(c.count)]
            chart = c.star_chart
            solver, disk_radius = c.solver.value, chart.base_radius if chart.is_disk else None
        report = SpectrumReport(**self._header(), R=disk_radius, domain=c.domain_record(), solver=solver,
                                clusters=records)
        rows = [[i + 1, k, lam, label]
                for i, rec in enumerate(records)
                for k, lam, label in zip(rec.indices, rec.eigenvalues, rec.labels or [""] * rec.multiplicity)]
        return CommandOutput(report, (["cluster", "index", "eigenvalue", "label"], rows))

    def hadamard(self) -> CommandOutput:
        c = self.config
        chart = c.star_chart
        problem = c.problem_record
        f = c.normal_speed
        cl = self._cluster()
        s = c.s if c.s is not None else 1
        if s > cl.size:
            raise InvalidParametersError(f"s must be in 1..{cl.size} for cluster {c.cluster_index}")
        formula = hadamard_derivative(problem, c.params, chart, cl, s, f, c.boundary_nodes, self.quad)

        family = ChartFamily(problem=problem, params=c.params, chart=chart, perturbation=f,
                             solver=c.solver.value, degree=c.degree, quad=self.quad, n_max=c.n_max,
                             quotient=c.quotient)
        steps = c.steps or HADAMARD_STEPS
        fd = fd_eigen_derivative(family, cl.indices, s, steps)
        rel_err = relative_error(fd.value, formula)
        scale = abs(cl.lambda_F) ** (s - 1) * lagrange_scale(cl, chart, c.boundary_nodes)
        scaled_err = abs(fd.value - formula) / scale

        threshold = self._threshold("hadamard_ritz" if c.solver == SolverKind.RITZ else "hadamard")
        report = HadamardReport(**self._header(), domain=c.domain_record(), perturbation=c.perturbation,
                                cluster_index=c.cluster_index, F=[k + 1 for k in cl.indices],
                                lambda_F=cl.lambda_F, s=s, formula_value=formula, fd_value=fd.value,
                                rel_err=rel_err, scaled_err=scaled_err, steps=fd.steps,
                                fd_estimates=fd.estimates, threshold=threshold,
                                passed=rel_err <= threshold or scaled_err <= ZERO_DERIVATIVE_TOL)
        rows = [[h, est] for h, est in zip(fd.steps, fd.estimates)]
        return CommandOutput(report, (["step", "central_difference"], rows))

    def criticality(self) -> CommandOutput:
        c = self.config
        cl = self._cluster()
        sample, residual = criticality_profile(c.problem_record, c.params, c.star_chart, cl, c.boundary_nodes)
        threshold = self._threshold("criticality")
        report = CriticalityReport(**self._header(), domain=c.domain_record(), cluster_index=c.cluster_index,
                                   lambda_F=cl.lambda_F, multiplicity=cl.size, residual=residual,
                                   threshold=threshold, passed=residual.rel_residual <= threshold)
        header = ["theta"] + [f"G_{k + 1}" for k in range(cl.size)] + ["G_sum"]
        rows = [[theta, *column, total]
                for theta, column, total in zip(sample.theta, sample.values.T, sample.total)]
        return CommandOutput(report, (header, rows))

    def radiality(self) -> CommandOutput:
        c = self.config
        chart = c.star_chart
        if not chart.is_disk:
            raise InvalidParametersError("Radiality is defined on disks only")
        cl = self._cluster()
        positions = c.member_positions()
        if positions is not None:
            cl = cl.subset(positions)
        radii = [r * chart.base_radius for r in c.radii]
        profiles = radiality_profiles(cl, chart, radii, c.angular_nodes, allow_partial=positions is not None)
        worst = max(p.worst for p in profiles)

        threshold = self._threshold("radiality")
        passed = worst >= PARTIAL_VARIATION if cl.partial else worst <= threshold
        report = RadialityReport(**self._header(), radius=chart.base_radius, cluster_index=c.cluster_index,
                                 members=positions if positions is not None else list(range(cl.size)),
                                 partial=cl.partial, profiles=profiles, threshold=threshold, passed=passed)
        rows = [[p.radius, p.value_sq, p.gradient_sq, p.laplacian_sq, p.hessian_sq] for p in profiles]
        return CommandOutput(report, (["radius", "value_sq", "gradient_sq", "laplacian_sq", "hessian_sq"], rows))

    def lemma(self) -> CommandOutput:
        c = self.config
        if c.preset is not None:
            presets = load_presets(c.lemma)
            if c.preset > len(presets):
                raise InvalidParametersError(f"{c.lemma} has presets 1..{len(presets)}, got {c.preset}")
            preset = presets[c.preset - 1]
            u1, u2, psi, chart = preset.u1, preset.u2, preset.psi, preset.chart
        else:
            u1, u2, psi, chart = c.u1, c.u2, c.psi, c.star_chart
        result = lemma_check(c.lemma, PolynomialField.parse(u1), PolynomialField.parse(u2),
                             PolynomialField.parse(*psi), chart, c.steps or DEFAULT_STEPS, self.quad)
        threshold = self._threshold("lemma")
        domain = {"disk": chart.base_radius} if chart.is_disk else {"chart": chart.model_dump()}
        report = LemmaReport(preset=c.preset, u1=u1, u2=u2, psi=tuple(psi), domain=domain, result=result,
                             threshold=threshold, passed=result.rel_err <= threshold)
        rows = [[result.lemma, result.lhs_fd, result.rhs_formula, result.rel_err]]
        return CommandOutput(report, (["lemma", "lhs_fd", "rhs_formula", "rel_err"], rows))

    def branches(self) -> CommandOutput:
        c = self.config
        positions = _pair_positions(c.pair, c.tau)
        start, stop, samples = c.stretch or DEFAULT_SWEEP
        if samples < 2 or start >= stop:
            raise InvalidParametersError(f"Sweep needs start < stop and two samples, got {c.stretch}")
        count = positions[-1] + 1

        rows = []
        for t in np.linspace(start, stop, int(samples)):
            spectrum = [lam for lam, _, _ in stretch_spectrum(float(t), c.tau, count)]
            members = [spectrum[k] for k in positions]
            rows.append(BranchRow(t=float(t), eigenvalues=members,
                                  symmetric=[elementary_symmetric(members, s)
                                             for s in range(1, len(members) + 1)]))

        family = RectangleStretchFamily(tau=c.tau)
        steps = c.steps or BRANCH_STEPS
        second = [fd_eigen_derivative(family, positions, s, steps, order=2)
                  for s in range(1, len(positions) + 1)]
        left, right = one_sided_slopes(family, positions[0], steps)
        jump = right.value - left.value

        expected_second, expected_jump = _stretch_expectations(c.pair, c.tau)
        errors = [relative_error(est.value, ref) for est, ref in zip(second, expected_second)]
        errors.append(relative_error(jump, expected_jump))
        threshold = self._threshold("branches")
        report = BranchReport(family=family.describe(), tau=c.tau, indices=[k + 1 for k in positions],
                              rows=rows, second_differences=second, slope_jump=jump,
                              expected_second=expected_second, expected_jump=expected_jump,
                              threshold=threshold, passed=max(errors) <= threshold)
        header = ["t"] + [f"lambda_{k + 1}" for k in positions] + [f"Lambda_s{s}" for s in range(1, len(positions) + 1)]
        table_rows = [[row.t] + row.eigenvalues + row.symmetric for row in rows]
        return CommandOutput(report, (header, table_rows))

    def write(self, output: CommandOutput, store) -> None:
        """Send the report, or its table, to ``store``."""
        if self.config.output_format == OutputFormat.CSV and output.table is not None:
            header, rows = output.table
            store.write_table(header, rows)
        else:
            store.write_report(output.report)


def _cluster_record(cl: EigenCluster) -> ClusterRecord:
    disk_modes = [m for m in cl.members if hasattr(m, "parity")]
    return ClusterRecord(lambda_F=cl.lambda_F, multiplicity=cl.size, indices=[k + 1 for k in cl.indices],
                         eigenvalues=list(cl.eigenvalues), n_list=[m.n for m in disk_modes],
                         parities=[m.parity for m in disk_modes], labels=[m.label() for m in disk_modes])


def _symmetric_second(values: Sequence[float], slopes: Sequence[float], curvatures: Sequence[float],
                      s: int) -> float:
    """d^2/dt^2 of e_s(lambda(t)) from the branch values and derivatives."""
    total = 0.0
    n = len(values)
    # e_s = sum over s-subsets of products; differentiate each product twice
    for subset in combinations(range(n), s):
        for i in subset:
            rest = [values[j] for j in subset if j != i]
            total += curvatures[i] * math.prod(rest)
            for j in subset:
                if j != i:
                    others = [values[k] for k in subset if k not in (i, j)]
                    total += slopes[i] * slopes[j] * math.prod(others)
    return total


def _stretch_expectations(pair: Sequence[int], tau: float) -> Tuple[List[float], float]:
    """Closed-form second derivatives of Lambda_{F,s} and the slope jump at t = 0."""
    m, n = pair
    branches = [stretch_branch(m, n, 0.0, tau), stretch_branch(n, m, 0.0, tau)]
    values = [b[0] for b in branches]
    slopes = [b[1] for b in branches]
    curvatures = [b[2] for b in branches]
    second = [_symmetric_second(values, slopes, curvatures, s) for s in (1, 2)]
    # right of t = 0 the lower ordered branch follows the smaller slope, left of it the larger
    return second, min(slopes) - max(slopes)


def _pair_positions(pair: Sequence[int], tau: float) -> List[int]:
    """0-based positions of the modes (m, n) and (n, m) in the square's spectrum."""
    m, n = pair
    if m < 1 or n < 1 or m == n:
        raise InvalidParametersError(f"--pair needs two distinct positive mode numbers, got {m},{n}")
    modes = stretch_spectrum(0.0, tau, (m + n) ** 2 + 2)
    positions = [k for k, (_, p, q) in enumerate(modes) if {p, q} == {m, n}]
    if len(positions) != 2:
        raise InvalidParametersError(f"Modes ({m},{n}) and ({n},{m}) not found among the computed eigenvalues")
    return positions
