import numpy as np
import pytest

from primegaps.cutoff3d import (
    CANONICAL_NAMES,
    PiecewiseCutoff,
    Poly3,
    build_partition,
    builtin_cutoff,
    canonical_polytope,
    check_marginals,
    evaluate,
    integrate_I,
    integrate_J,
    integrate_piece_I,
    piece_polynomial,
    verify_theorem_piece,
)
from primegaps.rational import Q

I_EXACT = Q(62082439864241, 507343011840)
J_EXACT = Q(9933190664926733, 40587440947200)
RATIO_EXCESS = Q(286648173, 4966595189139280)


class TestPoly3:
    def test_mul_and_eval(self):
        p = Poly3.affine(1, 2, 0, -1)  # 1 + 2x - z
        q = p * p
        assert q.eval(Q(1, 2), 0, Q(1, 4)) == (1 + 1 - Q(1, 4)) ** 2

    def test_integrate_with_affine_limits(self):
        # int_0^{1-x} z dz = (1-x)^2/2
        z = Poly3.var("z")
        out = z.integrate("z", Poly3.const(0), Poly3.affine(1, -1))
        assert out == Poly3({(0, 0, 0): Q(1, 2), (1, 0, 0): -1, (2, 0, 0): Q(1, 2)})

    def test_permute(self):
        p = Poly3.var("x") * Poly3.var("x") * Poly3.var("y")
        assert p.permute("yzx") == Poly3.var("y") * Poly3.var("y") * Poly3.var("z")


class TestPartition:
    def test_sixty_pieces(self):
        parts = build_partition(Q(1, 4))
        assert len(parts) == 60
        assert len({p.name for p in parts}) == 60

    def test_volume_identity(self):
        total = sum((p.volume() for p in build_partition(Q(1, 4))), Q(0))
        assert total == Q(9, 16)

    def test_nonempty_interiors(self):
        for name in CANONICAL_NAMES:
            assert canonical_polytope(name, Q(1, 4)).volume() > 0

    def test_membership_example(self):
        A = canonical_polytope("A", Q(1, 4))
        assert A.contains((Q(1, 10), Q(1, 20), Q(1, 5)))
        assert not A.contains((Q(1, 20), Q(1, 10), Q(1, 5)))  # wrong order

    def test_random_point_disjointness(self):
        parts = build_partition(Q(1, 4))
        rng = np.random.default_rng(99)
        inside_count = 0
        attempted = 0
        for _ in range(600):
            pt = tuple(Q(int(v), 10**6) for v in rng.integers(0, 1_500_000, 3))
            if sum(pt) >= Q(3, 2):
                continue
            attempted += 1
            hits = [p.name for p in parts if p.contains(pt)]
            assert len(hits) <= 1
            inside_count += len(hits)
        # every interior point off the (null) boundaries lies in one piece
        assert attempted > 50
        assert inside_count >= attempted - 3

    def test_eps_domain(self):
        build_partition(Q(1, 3))
        with pytest.raises(ValueError):
            build_partition(Q(1, 5))


class TestExactValues:
    def test_marginals_vanish(self):
        for label, residual in check_marginals(builtin_cutoff()):
            assert residual.is_zero(), label

    def test_integral_I(self):
        assert integrate_I(builtin_cutoff()) == I_EXACT

    def test_integral_J(self):
        assert integrate_J(builtin_cutoff()) == J_EXACT

    def test_ratio_excess(self):
        f = builtin_cutoff()
        assert integrate_J(f) / integrate_I(f) - 2 == RATIO_EXCESS

    def test_verify_theorem_piece(self):
        assert verify_theorem_piece() is True

    def test_piece_transcription_against_polytope_integration(self):
        # two fully independent evaluation paths per canonical piece
        f = builtin_cutoff()
        for name in CANONICAL_NAMES:
            assert integrate_piece_I(f, name) == integrate_piece_I(f, name, via_polytope=True)


class TestDegenerateCutoffs:
    def test_zero(self):
        zero = PiecewiseCutoff({}, Q(1, 4))
        assert integrate_I(zero) == 0
        assert integrate_J(zero) == 0
        assert all(res.is_zero() for _, res in check_marginals(zero))

    def test_constant_one_gives_volume(self):
        ones = PiecewiseCutoff({n: {(0, 0, 0): 1} for n in CANONICAL_NAMES}, Q(1, 4))
        assert integrate_I(ones) == Q(9, 16)

    def test_nonzero_middle_piece_increases_I_only(self):
        f = builtin_cutoff()
        g = f.with_piece("D", Poly3.const(3))
        assert integrate_I(g) > integrate_I(f)
        assert integrate_J(g) == integrate_J(f)
        assert integrate_J(g) / integrate_I(g) < integrate_J(f) / integrate_I(f)

    def test_perturbed_piece_breaks_marginal(self):
        g = builtin_cutoff().with_piece("H", Poly3({(0, 0, 1): 9}))
        residuals = dict(check_marginals(g))
        assert not residuals["m7"].is_zero()
        assert residuals["m1"].is_zero()  # untouched identities stay intact

    def test_marginals_fail_at_other_eps(self):
        # the built-in coefficients are tuned to eps = 1/4
        g = PiecewiseCutoff(builtin_cutoff().pieces, Q(1, 3))
        assert any(not res.is_zero() for _, res in check_marginals(g))


class TestSymmetry:
    def test_permuted_piece_values(self):
        f = builtin_cutoff()
        poly = piece_polynomial(f, "A", "yzx")
        canon = f.pieces["A"]
        pt = (Q(1, 10), Q(1, 20), Q(1, 5))
        assert poly.eval(*pt) == canon.eval(pt[1], pt[2], pt[0])

    def test_evaluate_respects_symmetry(self):
        f = builtin_cutoff()
        rng = np.random.default_rng(3)
        hits = 0
        attempted = 0
        for _ in range(400):
            pt = [Q(int(v), 10**6) for v in rng.integers(0, 1_400_000, 3)]
            if sum(pt) >= Q(3, 2):
                continue
            attempted += 1
            vals = {evaluate(f, (pt[0], pt[1], pt[2])), evaluate(f, (pt[2], pt[0], pt[1])),
                    evaluate(f, (pt[1], pt[0], pt[2]))}
            assert len(vals) == 1
            if vals != {None}:
                hits += 1
        assert attempted > 40 and hits >= attempted - 3

    def test_unknown_names_rejected(self):
        f = builtin_cutoff()
        with pytest.raises(KeyError):
            piece_polynomial(f, "Q")
        with pytest.raises(KeyError):
            piece_polynomial(f, "A", "xxy")


def _classify_eval(f, pts):
    """Vectorized float evaluation of the symmetric extension at pts (n,3).

    Independent of the transcribed integration programs: points are sorted
    into the canonical sector and located via the inequality chains.
    """
    eps = float(f.eps)
    lo, hi = 1 - eps, 1 + eps
    srt = np.sort(pts, axis=1)
    y, x, z = srt[:, 0], srt[:, 1], srt[:, 2]  # min, mid, max
    vals = np.zeros(len(pts))
    masks = {
        "A": (z + x < lo),
        "B": (y + z < lo) & (z + x > lo) & (z + x < hi),
        "C": (x + y < lo) & (y + z > lo) & (z + x < hi),
        "D": (x + y > lo) & (z + x < hi),
        "E": (y + z < lo) & (z + x > hi),
        "S": (x + y < lo) & (y + z > lo) & (y + z < hi) & (z + x > hi) & (z < 0.5 + eps),
        "T": (x + y < lo) & (y + z > lo) & (y + z < hi) & (z + x > hi)
             & (z > 0.5 + eps) & (x > 0.5 - eps),
        "U": (x + y < lo) & (y + z > lo) & (y + z < hi) & (z + x > hi) & (x < 0.5 - eps),
        "G": (x + y < lo) & (y + z > hi),
        "H": (x + y > lo) & (y + z < hi) & (z + x > hi),
    }
    total = np.zeros(len(pts), dtype=bool)
    for name, mask in masks.items():
        poly = f.pieces[name]
        if poly.is_zero():
            total |= mask
            continue
        acc = np.zeros(len(pts))
        for (i, j, l), c in poly.terms.items():
            acc += float(c) * x**i * y**j * z**l
        vals[mask] = acc[mask]
        assert not np.any(total & mask), f"overlap at {name}"
        total |= mask
    return vals


class TestMonteCarloSanity:
    def test_I_and_J_against_monte_carlo(self):
        f = builtin_cutoff()
        I = float(integrate_I(f))
        J = float(integrate_J(f))
        rng = np.random.default_rng(20240808)
        n_total, chunk = 10_000_000, 1_000_000

        # I: uniform samples in the bounding cube, F^2 averaged
        acc = 0.0
        acc2 = 0.0
        for _ in range(n_total // chunk):
            pts = rng.random((chunk, 3)) * 1.5
            inside = pts.sum(axis=1) <= 1.5
            v = np.zeros(chunk)
            v[inside] = _classify_eval(f, pts[inside]) ** 2
            acc += v.sum()
            acc2 += (v**2).sum()
        vol = 1.5**3
        mean = acc / n_total
        var = acc2 / n_total - mean**2
        est_I = mean * vol
        sigma_I = vol * (var / n_total) ** 0.5
        assert abs(est_I - I) < 3 * sigma_I + 1e-9

        # J: 3 * int over {x+y<=1-eps} of (int F dz)^2; sample (x,y,z,z')
        eps = float(f.eps)
        acc = 0.0
        acc2 = 0.0
        tri = 0
        for _ in range(n_total // chunk):
            xy = rng.random((chunk, 2)) * (1 - eps)
            keep = xy.sum(axis=1) <= 1 - eps
            xy = xy[keep]
            tri += len(xy)
            c = 1.5 - xy.sum(axis=1)
            z1 = rng.random(len(xy)) * c
            z2 = rng.random(len(xy)) * c
            f1 = _classify_eval(f, np.column_stack([xy, z1]))
            f2 = _classify_eval(f, np.column_stack([xy, z2]))
            v = c * c * f1 * f2
            acc += v.sum()
            acc2 += (v**2).sum()
        mean = acc / tri
        var = acc2 / tri - mean**2
        area = (1 - eps) ** 2 / 2
        est_J = 3 * area * mean
        sigma_J = 3 * area * (var / tri) ** 0.5
        assert abs(est_J - J) < 3 * sigma_J
