import json

import numpy as np
import pytest

from pbdcs.designs import Design, gen_affine_plane, gen_projective_plane, greedy_packing, stats
from pbdcs.frames import (
    CON0,
    CON1,
    MUB_EXT,
    FrameError,
    FrameMatrix,
    build_con0,
    build_con1,
    build_mub_extended,
    expected_columns,
    normalize_rows,
    read_frame,
    write_frame,
)
from pbdcs.unitary import mub_family

TRIPLE = Design(3, ((0, 1, 2),))


def columns_by_point(frame):
    out = {}
    for j, (x, _, _) in enumerate(frame.labels):
        out.setdefault(x, []).append(j)
    return out


def check_support(design, frame):
    incid = design.incidence()
    for j, (x, _, _) in enumerate(frame.labels):
        nz = set(np.flatnonzero(np.abs(frame.matrix[:, j]) > 1e-14))
        assert nz == set(np.flatnonzero(incid[:, x]))


def test_con0_fano(fano):
    fr = build_con0(fano, "dft")
    assert (fr.n, fr.N, fr.tag) == (7, 21, CON0)
    assert np.allclose(np.linalg.norm(fr.matrix, axis=0), 1, atol=1e-15)
    mags = np.abs(fr.matrix)
    assert np.all((mags < 1e-15) | (np.abs(mags - 1 / np.sqrt(3)) < 1e-15))
    check_support(fano, fr)
    assert [lab[0] for lab in fr.labels] == sorted(lab[0] for lab in fr.labels)


def test_con0_single_block():
    fr = build_con0(TRIPLE)
    assert np.array_equal(fr.matrix, [[1, 1, 1]])


def test_con0_ag23_sylvester():
    ag = gen_affine_plane(3)
    fr = build_con0(ag, "sylvester")
    assert (fr.n, fr.N) == (12, 36)
    assert fr.is_real
    vals = set(np.unique(np.round(fr.matrix.real, 15)))
    assert vals == {-0.5, 0.0, 0.5}
    check_support(ag, fr)


def test_con0_sylvester_needs_power_of_two(fano):
    with pytest.raises(FrameError) as err:
        build_con0(fano, "sylvester")
    assert err.value.code == "NO_HADAMARD"
    assert build_con0(fano, "auto") == build_con0(fano, "dft")


def test_con0_rejects_invalid(fano):
    with pytest.raises(FrameError):
        build_con0(Design(7, fano.blocks[1:]))


def test_con1_fano(fano):
    fr = build_con1(fano, "sylvester")
    assert (fr.n, fr.N, fr.tag) == (7, 28, CON1)
    assert np.allclose(np.linalg.norm(fr.matrix, axis=0) ** 2, 0.75, atol=1e-15)
    assert fr.is_real
    check_support(fano, fr)


def test_con1_single_block():
    fr = build_con1(TRIPLE, "dft")
    assert fr.matrix.shape == (1, 6)
    assert np.allclose(np.abs(fr.matrix), 1 / np.sqrt(2))
    assert np.allclose(fr.matrix[0], np.array([1, -1, 1, -1, 1, -1]) / np.sqrt(2))


def test_con1_ag23():
    ag = gen_affine_plane(3)
    fr = build_con1(ag, "dft")
    assert (fr.n, fr.N) == (12, 45)
    assert fr.N == expected_columns(ag, CON1)
    with pytest.raises(FrameError) as err:
        build_con1(ag, "sylvester")
    assert err.value.code == "NO_HADAMARD"


def test_con0_inner_products_brute_force(pbd35):
    """Same-point columns orthogonal; distinct points meet once with |<.,.>| = 1/sqrt(r_x r_y)."""
    fr = build_con0(pbd35)
    r = stats(pbd35).replication
    m = fr.matrix
    for i in range(fr.N):
        for j in range(i + 1, fr.N):
            ip = abs(sum(np.conj(m[k, i]) * m[k, j] for k in range(fr.n)))
            x, y = fr.labels[i][0], fr.labels[j][0]
            if x == y:
                assert ip < 1e-12
            else:
                assert abs(ip - 1 / np.sqrt(r[x] * r[y])) < 1e-12


def test_con1_bibd_equal_inner_products():
    for d in (gen_projective_plane(3), gen_affine_plane(3)):
        fr = build_con1(d, "dft")
        m = fr.matrix / np.linalg.norm(fr.matrix, axis=0)
        g = np.abs(m.conj().T @ m)
        off = g[~np.eye(fr.N, dtype=bool)]
        r = stats(d).replication[0]
        assert np.allclose(off, 1 / r, atol=1e-12)


def test_packing_inner_products():
    pk = greedy_packing(10, {3}, 3)
    fr = build_con0(pk)
    r = stats(pk).replication
    m = fr.matrix
    g = np.abs(m.conj().T @ m)
    for i in range(fr.N):
        for j in range(i + 1, fr.N):
            x, y = fr.labels[i][0], fr.labels[j][0]
            assert g[i, j] <= 1 / np.sqrt(r[x] * r[y]) + 1e-12


def test_mub_extension(fano):
    one = build_mub_extended(fano, 1)
    assert (one.n, one.N, one.tag) == (7, 21, MUB_EXT)
    # e = 1 is CON0 with H = sqrt(3) M_1 at every point
    m1 = mub_family(3)[1]
    blocks_of = fano.point_blocks()
    for x in range(7):
        cols = [j for j, lab in enumerate(one.labels) if lab[0] == x]
        assert np.allclose(one.matrix[np.ix_(blocks_of[x], cols)], m1)
    g1 = np.abs(one.matrix.conj().T @ one.matrix)
    g0 = np.abs(build_con0(fano).matrix.conj().T @ build_con0(fano).matrix)
    assert np.allclose(np.sort(g1.ravel()), np.sort(g0.ravel()), atol=1e-12)

    three = build_mub_extended(fano, 3)
    assert (three.n, three.N) == (7, 63)
    assert {lab[1] for lab in three.labels} == {1, 2, 3}
    assert three.N == expected_columns(fano, MUB_EXT, 3)
    check_support(fano, three)


def test_mub_extension_errors(fano, pbd35):
    with pytest.raises(FrameError) as err:
        build_mub_extended(gen_affine_plane(3), 1)
    assert err.value.code == "NONPRIME_REPLICATION"
    with pytest.raises(FrameError) as err:
        build_mub_extended(fano, 4)
    assert err.value.code == "BAD_E"
    with pytest.raises(FrameError):
        build_mub_extended(fano, 0)
    with pytest.raises(FrameError) as err:
        build_mub_extended(pbd35, 1)
    assert err.value.code == "NONCONSTANT_REPLICATION"


def test_normalize_rows(fano):
    raw = build_con0(fano)
    assert np.allclose(np.linalg.norm(raw.matrix, axis=1), np.sqrt(3))
    fr = normalize_rows(raw, 1.0)
    assert np.allclose(np.linalg.norm(fr.matrix, axis=1), 1, atol=1e-15)
    assert np.max(np.abs(fr.matrix @ fr.matrix.conj().T - np.eye(7))) < 1e-12
    again = normalize_rows(fr, 1.0)
    assert np.allclose(again.matrix, fr.matrix, atol=1e-15)
    two = normalize_rows(raw, 2.0)
    assert np.max(np.abs(two.matrix @ two.matrix.conj().T - 4 * np.eye(7))) < 1e-12
    with pytest.raises(FrameError):
        normalize_rows(raw, 0)
    with pytest.raises(FrameError):
        normalize_rows(FrameMatrix.from_array(np.zeros((2, 3))), 1)


def test_normalize_rows_mixed_block_sizes(pbd35):
    fr = normalize_rows(build_con0(pbd35), 1.0)
    assert np.max(np.abs(fr.matrix @ fr.matrix.conj().T - np.eye(fr.n))) < 1e-10


def test_frame_is_immutable(fano):
    fr = build_con0(fano)
    with pytest.raises(ValueError):
        fr.matrix[0, 0] = 5


def test_fmf_roundtrip(tmp_path, fano):
    for fr in (build_con0(fano), build_con1(fano, "sylvester"), build_mub_extended(fano, 2)):
        path = tmp_path / "f.fmf"
        write_frame(fr, path)
        obj = json.loads(path.read_text())
        assert set(obj) == {"n", "N", "tag", "labels", "re", "im"}
        assert len(obj["re"]) == fr.n * fr.N
        back = read_frame(path)
        assert back == fr
        assert np.array_equal(back.matrix, fr.matrix)
        write_frame(back, tmp_path / "g.fmf")
        assert (tmp_path / "g.fmf").read_text() == path.read_text()


def test_fmf_malformed(tmp_path):
    path = tmp_path / "bad.fmf"
    path.write_text('{"n": 2, "N": 2, "tag": "CUSTOM", "labels": [[0,0,0],[1,0,0]], "re": [1], "im": [0]}')
    with pytest.raises(FrameError):
        read_frame(path)
    path.write_text("not json")
    with pytest.raises(FrameError):
        read_frame(path)
