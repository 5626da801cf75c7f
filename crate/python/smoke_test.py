"""Smoke test for the flipkit Python extension.

Build first:  cargo build -p flipkit-py --release
Then run:     python3 python/smoke_test.py [path/to/libflipkit_py.so]
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load(lib):
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / "flipkit.so"
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("flipkit", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    lib = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "target/release/libflipkit_py.so"
    fk = load(lib)

    tet = fk.Map.seed("tetrahedron")
    assert tet.counts() == (4, 6, 4), tet
    assert tet.is_regular() and tet.is_orientable()
    assert tet.barycentric().counts() == (14, 36, 24)

    k7 = fk.Map.seed("k7_torus")
    assert k7.euler_characteristic() == 0
    assert k7.regular_flip_count() == 0

    octa = fk.Map.seed("octahedron")
    other = octa.apply("flip", 0)
    assert other.is_regular() and other != octa
    assert fk.Map.from_json(other.to_json()) == other

    assert fk.enumerate(2, 6) == (156, 2)
    assert fk.thresholds(0) == (9450, 270)

    cert = fk.certify(octa, other)
    assert cert.verify() == (True, None), cert.verify()
    assert fk.Certificate.from_json(cert.to_json()).verify()[0]

    s, script = tet.apply("subdivide", 0).reduce()
    assert s == tet and '"contract"' in script

    try:
        fk.find_path(octa, other, max_nodes=1)
    except fk.ExhaustedError:
        pass
    else:
        raise AssertionError("expected ExhaustedError")
    try:
        fk.Map.from_faces([[0, 1, 2], [0, 2, 3]])
    except fk.FlipkitError as e:
        assert "face sides" in str(e)
    else:
        raise AssertionError("expected FlipkitError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
