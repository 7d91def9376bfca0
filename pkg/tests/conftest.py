import json

import numpy as np
import pytest

from specstab import Atom, ACPiece, HerglotzMatrix, MatrixMeasure


@pytest.fixture
def single_atom():
    """n=1, unit mass at the origin: M(z) = -1/z."""
    omega = MatrixMeasure(1, [Atom(0.0, [[1.0]])])
    return HerglotzMatrix.from_measure(omega)


@pytest.fixture
def two_atom():
    """n=2, identity masses at -1 and 1: M(z) = -2z/(z^2-1) I."""
    omega = MatrixMeasure(2, [Atom(-1.0, np.eye(2)), Atom(1.0, np.eye(2))])
    return HerglotzMatrix.from_measure(omega)


@pytest.fixture
def mixed_measure():
    """Atoms plus an absolutely continuous piece, n=1."""
    return MatrixMeasure(1, [Atom(2.0, [[1.0]])], [ACPiece(0.0, 1.0, [[1.0]])])


def write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh)
    return str(path)


@pytest.fixture
def single_atom_file(tmp_path):
    return write_json(tmp_path / "single.json",
                      {"n": 1, "atoms": [{"x": 0.0, "W": [[[1, 0]]]}]})


@pytest.fixture
def two_atom_file(tmp_path):
    eye = [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
    return write_json(tmp_path / "two.json",
                      {"n": 2, "atoms": [{"x": -1.0, "W": eye}, {"x": 1.0, "W": eye}]})
