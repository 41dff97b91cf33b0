import json
import os
import tempfile

# Keep config and log files out of the user's home before nsdt is imported
os.environ["NSDT_HOME"] = tempfile.mkdtemp(prefix="nsdt-test-")
os.environ.pop("NSDT_SEED", None)

import pytest

from nsdt.fields import Polynomial, zero
from nsdt.metric import (
    build_special_form, dump_metric_spec, generate_sd_family, product_sphere_metric,
    special_form_spec,
)

FAMILY_SEED = 42


def poly(expr) -> Polynomial:
    return Polynomial.from_expr(expr)


@pytest.fixture(scope="session")
def worked_triple():
    """Self-dual but not basic"""
    return poly("-2*x2*x3"), poly("-2*x2*x3"), poly("x2**2 + x3**2")


@pytest.fixture(scope="session")
def worked_metric(worked_triple):
    return build_special_form(*worked_triple, metric_id="worked")


@pytest.fixture(scope="session")
def flat_metric():
    return build_special_form(zero(), zero(), zero(), metric_id="flat")


@pytest.fixture(scope="session")
def dw_triple():
    """Self-dual, basic, with vertical conformal Killing field x2 d2 + x3 d3 and eta = 1"""
    return poly("x0*x2 + x3"), poly("x2 + x1*x3"), poly("-x0*x3 - x1*x2")


@pytest.fixture(scope="session")
def dw_metric(dw_triple):
    return build_special_form(*dw_triple, metric_id="dw")


@pytest.fixture(scope="session")
def dw_killing():
    return poly("x2"), poly("x3")


@pytest.fixture(scope="session")
def perturbed_triple(worked_triple):
    p, q, r = worked_triple
    return p + poly("x2**3"), q, r


@pytest.fixture(scope="session")
def sd_family():
    return generate_sd_family(2, 1, FAMILY_SEED, 20)


@pytest.fixture(scope="session")
def basic_family():
    return generate_sd_family(2, 1, FAMILY_SEED, 5, basic=True)


@pytest.fixture(scope="session")
def sphere_metric():
    return product_sphere_metric()


@pytest.fixture
def spec_dir(tmp_path, worked_triple, dw_triple, dw_killing):
    dump_metric_spec(special_form_spec(zero(), zero(), zero(), metric_id="flat"), tmp_path / "flat.json")
    dump_metric_spec(special_form_spec(*worked_triple, metric_id="worked"), tmp_path / "worked.json")
    dump_metric_spec(special_form_spec(*dw_triple, metric_id="dw", killing=dw_killing), tmp_path / "dw.json")
    (tmp_path / "sphere.json").write_text(json.dumps({"backend": "product-sphere", "id": "std"}))
    (tmp_path / "broken.json").write_text("{\"backend\": \"special-form\", ")
    (tmp_path / "bad-utf8.json").write_bytes(b'{"backend": "special-form", "id": "\xff\xfe"}')
    return tmp_path
