import os
import tempfile
from typing import Final
import unittest

import numpy as np

from two_patch_allee.models.cartography import cartography
from two_patch_allee.models.cartography.cartography import (
    Axis,
    Classifier,
    Plane,
    RegionCell,
    RegionMap,
    SvgStyle,
    SweepSpec,
)
from two_patch_allee.models.certificates import CertificateId
from two_patch_allee.models.patches import NormalizedParams, ReactionKind
from two_patch_allee.utils.errors import DomainError, ExportError

cubic: Final = ReactionKind.cubic()

lambda_spec: Final = SweepSpec(
    plane=Plane.LAMBDA,
    x_axis=Axis(0.5, 1.5, 2),
    y_axis=Axis(0.5, 1.5, 2),
    overlays=(CertificateId.THM_MAIN,),
    k2=1 / 3,
)

alpha_beta_spec: Final = SweepSpec(
    plane=Plane.ALPHA_BETA,
    x_axis=Axis(0.0, 4.0, 3),
    y_axis=Axis(0.0, 4.0, 2),
    overlays=(CertificateId.COROLLARY,),
    gamma=1 / 3,
)


class Test_Axis(unittest.TestCase):
    def test_centers(self):
        np.testing.assert_allclose(Axis(0.0, 4.0, 4).centers(), [0.5, 1.5, 2.5, 3.5])
        self.assertEqual(str(Axis(0, 4, 400)), "0:4:400")

    def test_invalid(self):
        with self.assertRaises(DomainError):
            Axis(0.0, 4.0, 1)
        with self.assertRaises(DomainError):
            Axis(2.0, 1.0, 10)
        with self.assertRaises(DomainError):
            Axis(-1.0, 1.0, 10)


class Test_SweepSpec(unittest.TestCase):
    def test_params(self):
        p, n = lambda_spec.cell_params(1.0, 2.0)
        self.assertEqual((p.lambda1, p.lambda2, p.k2), (1.0, 2.0, 1 / 3))
        self.assertAlmostEqual(n.gamma, 1 / 3)
        p, n = alpha_beta_spec.cell_params(2.0, 3.0)
        self.assertEqual((n.alpha, n.beta, n.gamma), (2.0, 3.0, 1 / 3))
        self.assertEqual((p.D, p.k1), (1.0, 1.0))
        self.assertEqual(alpha_beta_spec.axis_names, ("alpha", "beta"))

    def test_invalid(self):
        with self.assertRaises(DomainError):
            SweepSpec(Plane.ALPHA_BETA, Axis(0, 1, 2), Axis(0, 1, 2))
        with self.assertRaises(DomainError):
            SweepSpec(Plane.LAMBDA, Axis(0, 1, 2), Axis(0, 1, 2), k2=2.0)
        with self.assertRaises(DomainError):
            SweepSpec(Plane.LAMBDA, Axis(0, 1, 2), Axis(0, 1, 2), classifier="sawtooth-exact")
        with self.assertRaises(DomainError):
            SweepSpec(
                Plane.LAMBDA,
                Axis(0, 1, 2),
                Axis(0, 1, 2),
                reaction=ReactionKind.cubic(0.3),
                overlays=("thm-main",),
            )
        with self.assertRaises(DomainError):
            SweepSpec(
                Plane.ALPHA_BETA,
                Axis(0, 1, 2),
                Axis(0, 1, 2),
                reaction=ReactionKind.sawtooth(),
                overlays=("sawtooth-predicate",),
                gamma=0.6,
            )
        with self.assertRaises(DomainError):
            SweepSpec(Plane.LAMBDA, Axis(0, 1, 2), Axis(0, 1, 2), overlays=("thm-main", "thm-main"))

    def test_to_dict(self):
        d = lambda_spec.to_dict()
        self.assertEqual(d["plane"], "lambda")
        self.assertEqual(d["x_axis"], "0.5:1.5:2")
        self.assertEqual(d["overlays"], ["thm-main"])


class Test_Sweep(unittest.TestCase):
    def test_lambda_plane(self):
        region_map = cartography.run_sweep(lambda_spec)
        self.assertEqual(len(region_map.cells), 4)
        self.assertEqual([(c.x, c.y) for c in region_map.cells[:2]], [(0.75, 0.75), (1.25, 0.75)])
        self.assertEqual(region_map.counts().shape, (2, 2))
        report = cartography.containment_report(region_map, CertificateId.THM_MAIN)
        assert report.sound
        self.assertEqual(report.certified, 4)
        self.assertEqual(report.fraction, 1.0)

    def test_alpha_beta_plane(self):
        region_map = cartography.run_sweep(alpha_beta_spec)
        self.assertEqual(region_map.counts().shape, (2, 3))
        report = cartography.containment_report(region_map, CertificateId.COROLLARY)
        assert report.sound
        certified = region_map.certified(CertificateId.COROLLARY)
        assert np.all(region_map.counts()[certified] == 1)

    def test_threads(self):
        serial = cartography.run_sweep(alpha_beta_spec, threads=1)
        parallel = cartography.run_sweep(alpha_beta_spec, threads=4)
        self.assertEqual(serial.cells, parallel.cells)

    def test_sawtooth_classifier(self):
        spec = SweepSpec(
            plane=Plane.ALPHA_BETA,
            x_axis=Axis(0.5, 1.5, 2),
            y_axis=Axis(0.5, 1.5, 2),
            reaction=ReactionKind.sawtooth(),
            classifier=Classifier.SAWTOOTH_EXACT,
            gamma=0.4,
        )
        region_map = cartography.run_sweep(spec)
        assert all(c.count >= 1 for c in region_map.cells)
        self.assertEqual(region_map.cells[-1].certificates, ())

    def test_classify_cell(self):
        cell = cartography.classify_cell(alpha_beta_spec, 1.0, 1.0)
        self.assertEqual(cell.count, 1)
        self.assertEqual(cell.certificates, (True,))
        assert not cell.degenerate


class Test_Reports(unittest.TestCase):
    def cells(self, *rows):
        spec = SweepSpec(
            Plane.ALPHA_BETA,
            Axis(0, 1, len(rows)),
            Axis(0, 1, 2),
            reaction=ReactionKind.sawtooth(),
            classifier=Classifier.SAWTOOTH_EXACT,
            overlays=(CertificateId.SAWTOOTH_PREDICATE,),
            gamma=0.4,
        )
        cells = [RegionCell(0.0, 0.0, count, bad, (cert,)) for count, bad, cert in rows]
        return RegionMap(spec, cells + cells)

    def test_containment(self):
        region_map = self.cells(
            (1, False, True), (3, False, True), (1, False, False), (5, True, True)
        )
        report = cartography.containment_report(region_map, CertificateId.SAWTOOTH_PREDICATE)
        self.assertEqual(report.certified, 4)
        self.assertEqual(len(report.violations), 2)
        self.assertEqual(len(report.inverse_violations), 2)
        self.assertEqual(report.skipped, 2)
        self.assertEqual(report.fraction, 0.5)
        assert not report.sound

    def test_empty(self):
        report = cartography.containment_report(cartography.run_sweep(lambda_spec))
        assert report.certificate is None
        assert report.fraction is None
        assert report.sound

    def test_missing_overlay(self):
        with self.assertRaises(DomainError):
            cartography.containment_report(
                cartography.run_sweep(lambda_spec), CertificateId.COROLLARY
            )

    def test_summarize(self):
        region_map = self.cells(
            (1, False, True), (3, False, False), (1, False, True), (1, True, False)
        )
        self.assertEqual(cartography.summarize(region_map), {1: 0.75, 3: 0.25})

    def test_evaluate_certificate(self):
        verdict = cartography.evaluate_certificate(
            CertificateId.COROLLARY, NormalizedParams(1.0, 1.0, 1 / 3)
        )
        assert verdict.holds
        verdict = cartography.evaluate_certificate("thm-main", NormalizedParams(1.0, 1.0, 1 / 3))
        assert verdict.holds


class Test_Export(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.region_map = cartography.run_sweep(alpha_beta_spec)

    def tearDown(self):
        self.directory.cleanup()

    def test_csv(self):
        path = os.path.join(self.directory.name, "map.csv")
        cartography.export_csv(self.region_map, path)
        with open(path, encoding="utf-8") as source:
            lines = source.read().splitlines()
        self.assertEqual(lines[0], "axis1,axis2,count,degenerate,cert_corollary")
        self.assertEqual(len(lines), 7)
        parsed = cartography.parse_csv(path, alpha_beta_spec)
        self.assertEqual(parsed.cells, self.region_map.cells)

    def test_csv_errors(self):
        path = os.path.join(self.directory.name, "map.csv")
        cartography.export_csv(self.region_map, path)
        with self.assertRaises(ExportError):
            cartography.parse_csv(path, lambda_spec)
        with self.assertRaises(ExportError):
            cartography.parse_csv(os.path.join(self.directory.name, "missing.csv"), lambda_spec)
        with self.assertRaises(ExportError):
            cartography.export_csv(self.region_map, self.directory.name)

    def test_svg(self):
        path = os.path.join(self.directory.name, "map.svg")
        cartography.export_svg(self.region_map, path, SvgStyle(title="alpha & beta"))
        with open(path, encoding="utf-8") as source:
            document = source.read()
        assert document.startswith("<?xml")
        assert "<svg" in document and document.rstrip().endswith("</svg>")
        assert 'id="hatch"' in document
        assert "<title>alpha &amp; beta</title>" in document
        self.assertEqual(document.count("<rect x="), 6 + 4)
        assert "corollary" in document

    def test_svg_default_title(self):
        document = cartography.render_svg(self.region_map)
        assert "gamma=0.333333" in document
        with self.assertRaises(DomainError):
            cartography.render_svg(self.region_map, SvgStyle(width=100, legend_width=90))


class Test_Nullclines(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def test_render(self):
        document = cartography.render_nullclines(NormalizedParams(1.0, 1.0, 1.0), cubic)
        assert document.startswith("<?xml")
        assert "<title>Nullclines, alpha=1, beta=1, gamma=1</title>" in document
        assert document.count("<polyline") >= 2
        # origin and (1, 1) attract, (1/2, 1/2) is a saddle
        self.assertEqual(document.count('r="4" fill="#000000"/>'), 2)
        self.assertEqual(document.count('r="4" fill="#ffffff"/>'), 1)
        assert "x nullcline" in document and "stable equilibrium" in document

    def test_markers_given(self):
        n = NormalizedParams(1.0, 1.0, 0.4)
        document = cartography.render_nullclines(n, ReactionKind.sawtooth(), found=[])
        self.assertEqual(document.count('r="4" fill='), 2)
        assert document.count("<polyline") >= 2

    def test_invalid(self):
        n = NormalizedParams(1.0, 1.0, 1.0)
        with self.assertRaises(DomainError):
            cartography.render_nullclines(n, cubic, samples=1)
        with self.assertRaises(DomainError):
            cartography.render_nullclines(n, cubic, style=SvgStyle(width=100, legend_width=90))

    def test_export(self):
        n = NormalizedParams(2.0, 2.0, 0.3)
        path = os.path.join(self.directory.name, "nullclines.svg")
        cartography.export_nullclines(n, cubic, path, style=SvgStyle(title="phase plane"))
        with open(path, encoding="utf-8") as source:
            document = source.read()
        assert "<title>phase plane</title>" in document
        assert document.rstrip().endswith("</svg>")
        with self.assertRaises(ExportError):
            cartography.export_nullclines(n, cubic, self.directory.name)
