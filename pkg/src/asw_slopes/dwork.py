"""Operator-side pathway: characteristic series from a nuclear matrix.

Independent of the point-counting route in expsum: here the series comes
from traces of a semilinear operator acting on an overconvergent basis.
Only prime base fields are supported (a = 1); that is all the second
pathway needs to cross-check the first one.

Ring bookkeeping: with w^d equal to the uniformizer of the splitting
series, every basis column j of the operator matrix is divisible by
w^{(p-1)j}.  That single fact bounds the truncation size R, proves the
structural lower bound on the characteristic coefficients, and makes the
matrix entries exactly representable as finite w-expansions with p-adic
integer coefficients.  Matrix products run over Python integers with the
w-lanes Kronecker-packed into fixed-width bit fields, so they are exact.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, InsufficientPrecision
from .gf import factorize
from .padic import PadicInt, binom_pow, vp_factorial
from .series import TruncSeries, compose, exp_from_power_sums, reversion


def _mobius(n: int) -> int:
    mu = 1
    for r in factorize(n):
        if n % (r * r) == 0:
            return 0
        mu = -mu
    return mu


def _teich_zp(p: int, residue: int, digits: int) -> int:
    """Teichmuller lift in Z_p/p^digits of a prime-field residue."""
    mod = p**digits
    w = residue % mod
    for _ in range(digits):
        w = pow(w, p, mod)
    return w


def artin_hasse(p: int, order: int, digits: int) -> TruncSeries:
    """The p-typical exponential as a series mod (x^order, p^digits).

    Product form prod_{p not| i} (1 - x^i)^{-mu(i)/i}: every exponent is a
    p-adic unit multiple of a unit, so each factor is a binomial series of a
    p-adic integer and the guard arithmetic lives inside binom_pow.
    """
    one = PadicInt(p, 1, digits)
    out = TruncSeries("pi", [one] + [PadicInt(p, 0, digits)] * (order - 1))
    for i in range(1, order):
        if i % p == 0:
            continue
        mu = _mobius(i)
        if mu == 0:
            continue
        Di = 1 + (order - 1) // i
        guard = vp_factorial(Di - 1, p) if Di > 1 else 0
        work = p ** (digits + guard)
        alpha = PadicInt(p, (-mu * pow(i, -1, work)) % work, digits + guard)
        B = binom_pow(alpha, Di, digits)
        coeffs = [PadicInt(p, 0, digits)] * order
        for n in range(Di):
            c = B.coeffs[n]
            coeffs[i * n] = -c if n % 2 else c
        out = out * TruncSeries("pi", coeffs)
    if out.min_prec() < digits:
        raise InsufficientPrecision("splitting series lost guard digits")
    return out


def pi_of_T(p: int, order: int, digits: int) -> TruncSeries:
    """Local parameter as a series in T, inverting T = E(pi) - 1.

    Pure reversion: multiplications and one unit inverse, so full precision
    survives.
    """
    E = artin_hasse(p, order, digits)
    F = TruncSeries("pi", [PadicInt(p, 0, digits)] + E.coeffs[1:])
    G = reversion(F)
    return TruncSeries("T", G.coeffs, prec=digits)


# ---------------------------------------------------------------------------
# splitting-function coefficients and the operator matrix

def splitting_coefficients(spec, x_max: int, w_order: int, digits: int):
    """Coefficients c_J (J < x_max) of the product splitting function.

    Returned as an (x_max, w_order) int array: c[J][r] is the w^r digit,
    nonzero only for r >= J and r a multiple of d -- both are asserted, as
    they are the load-bearing facts for nuclearity.
    """
    if spec.a != 1:
        raise ConfigError("operator pathway requires a prime base field (a = 1)")
    p, d = spec.p, spec.d
    mod = p**digits
    n_max = 1 + (w_order - 1) // d
    E = artin_hasse(p, n_max, digits)
    e = [c.value for c in E.coeffs]
    use_numpy = 2 * (mod - 1).bit_length() + n_max.bit_length() < 62
    if use_numpy:
        F = np.zeros((x_max, w_order), dtype=np.int64)
        F[0][0] = 1
        for i, b in spec.monomials():
            bh = _teich_zp(p, b.index, digits)
            G = F
            F = np.zeros_like(G)
            bpow = 1
            for n in range(n_max):
                if i * n >= x_max or d * n >= w_order:
                    break
                g = (e[n] * bpow) % mod
                if g:
                    F[i * n :, d * n :] += g * G[: x_max - i * n, : w_order - d * n]
                bpow = (bpow * bh) % mod
            F %= mod
        rows = [[int(c) for c in row] for row in F]
    else:
        rows = [[0] * w_order for _ in range(x_max)]
        rows[0][0] = 1
        for i, b in spec.monomials():
            bh = _teich_zp(p, b.index, digits)
            prev = rows
            rows = [[0] * w_order for _ in range(x_max)]
            bpow = 1
            for n in range(n_max):
                if i * n >= x_max or d * n >= w_order:
                    break
                g = (e[n] * bpow) % mod
                if g:
                    for x in range(x_max - i * n):
                        src = prev[x]
                        dst = rows[x + i * n]
                        for r in range(w_order - d * n):
                            if src[r]:
                                dst[r + d * n] = (dst[r + d * n] + g * src[r]) % mod
                bpow = (bpow * bh) % mod
    for J in range(x_max):
        for r in range(min(J, w_order)):
            assert rows[J][r] == 0, "splitting coefficient below its w-floor"
        for r in range(w_order):
            if r % d:
                assert rows[J][r] == 0, "w-exponent off the d-grid"
    return rows


class PackedMatrix:
    """Square matrix of w-truncated series, one packed integer per entry."""

    __slots__ = ("size", "lanes", "stride", "mod", "rows")

    def __init__(self, size, lanes, stride, mod, rows):
        self.size = size
        self.lanes = lanes  # number of w-coefficients kept per entry
        self.stride = stride  # bytes per lane
        self.mod = mod
        self.rows = rows


def _pack(coeffs, stride: int) -> int:
    buf = bytearray(len(coeffs) * stride)
    for r, c in enumerate(coeffs):
        if c:
            buf[r * stride : (r + 1) * stride] = int(c).to_bytes(stride, "little")
    return int.from_bytes(buf, "little")


def _unpack(value: int, lanes: int, stride: int, mod: int):
    need = lanes * stride
    data = value.to_bytes(max((value.bit_length() + 7) // 8, need), "little")[:need]
    return [
        int.from_bytes(data[r * stride : (r + 1) * stride], "little") % mod
        for r in range(lanes)
    ]


def nuclear_matrix(spec, s_order: int, t_order: int, digits: int) -> PackedMatrix:
    """Truncated operator matrix, exact mod (w^{d*t_order}, p^digits).

    Size R = s_order + ceil(W/(p-1)) suffices: any path through an index
    beyond R picks up w^{(p-1)R} >= w^W, so the dropped tail cannot touch
    the kept window.
    """
    p, d = spec.p, spec.d
    W = d * t_order
    R = s_order + -(-W // (p - 1))
    w_c = W + R  # entries shift their source down by at most R lanes
    c = splitting_coefficients(spec, p * R, w_c, digits)
    mod = p**digits
    # trace contractions sum R^2 entry products into one packed integer
    lane_bits = 2 * (mod - 1).bit_length() + (R * R * W).bit_length() + 1
    stride = (lane_bits + 7) // 8
    rows = []
    for i in range(R):
        row = []
        for j in range(R):
            J = p * j - i
            if J < 0:
                row.append(0)
                continue
            src = c[J]
            shift = i - j
            entry = [
                src[r - shift] if 0 <= r - shift < w_c else 0 for r in range(W)
            ]
            row.append(_pack(entry, stride))
        rows.append(row)
    return PackedMatrix(R, W, stride, mod, rows)


def _matmul(A: PackedMatrix, B: PackedMatrix) -> PackedMatrix:
    R = A.size
    out = [[0] * R for _ in range(R)]
    for i in range(R):
        Ai = A.rows[i]
        oi = out[i]
        for j in range(R):
            a = Ai[j]
            if not a:
                continue
            Bj = B.rows[j]
            for k in range(R):
                b = Bj[k]
                if b:
                    oi[k] += a * b
    rows = [
        [
            _pack(_unpack(v, A.lanes, A.stride, A.mod), A.stride) if v else 0
            for v in row
        ]
        for row in out
    ]
    return PackedMatrix(R, A.lanes, A.stride, A.mod, rows)


def _trace_pair(A: PackedMatrix, B: PackedMatrix):
    acc = 0
    for i in range(A.size):
        Ai = A.rows[i]
        for j in range(A.size):
            a = Ai[j]
            if a:
                b = B.rows[j][i]
                if b:
                    acc += a * b
    return _unpack(acc, A.lanes, A.stride, A.mod)


def _trace(A: PackedMatrix):
    acc = 0
    for i in range(A.size):
        acc += A.rows[i][i]
    return _unpack(acc, A.lanes, A.stride, A.mod)


def nuclear_traces(spec, s_order: int, t_order: int, digits: int):
    """Traces of the first s_order operator powers as w-coefficient lists."""
    M = nuclear_matrix(spec, s_order, t_order, digits)
    top = -(-s_order // 2)
    powers = {1: M}
    for t in range(2, top + 1):
        powers[t] = _matmul(powers[t - 1], M)
    out = [_trace(M)]
    for k in range(2, s_order + 1):
        out.append(_trace_pair(powers[k // 2], powers[k - k // 2]))
    return out


def _w_to_pi(wcoeffs, spec, t_order: int, digits: int) -> TruncSeries:
    d, p = spec.d, spec.p
    out = []
    for n in range(t_order):
        out.append(PadicInt(p, wcoeffs[d * n] if d * n < len(wcoeffs) else 0, digits))
    for r, cval in enumerate(wcoeffs):
        if r % d:
            assert cval == 0, "trace has w-exponent off the d-grid"
    return TruncSeries("pi", out, prec=digits)


# ---------------------------------------------------------------------------
# public pathway surface

def t_adic_sum_via_operator(spec, k: int, t_order: int, digits: int) -> TruncSeries:
    """Power sum over F_{p^k} points computed purely from operator traces.

    Comparable coefficient-for-coefficient with expsum.t_adic_sum; the two
    sides share no code past TowerSpec, which is the point.
    """
    trs = nuclear_traces(spec, k, t_order, digits)
    tr_pi = _w_to_pi(trs[k - 1], spec, t_order, digits)
    unit = PadicInt(spec.p, spec.p**k - 1, digits)
    scaled = tr_pi.scale(unit)
    return compose(scaled, pi_of_T(spec.p, t_order, digits))


def char_series_via_operator(
    spec, t_order: int, s_order: int, digits: int
) -> TruncSeries:
    """Bivariate characteristic series from operator traces.

    The unit-normalized power sums collapse to minus the traces, so the
    series is a determinant in disguise; exp guard digits are budgeted up
    front and verified on exit.
    """
    inner = digits + vp_factorial(s_order, spec.p)
    trs = nuclear_traces(spec, s_order, t_order, inner)
    sums = [-_w_to_pi(t, spec, t_order, inner) for t in trs]
    C = exp_from_power_sums(sums, "s")
    piT = pi_of_T(spec.p, t_order, inner)
    cols = [compose(a, piT) for a in C.coeffs]
    out = TruncSeries("s", cols)
    if out.min_prec() < digits:
        raise InsufficientPrecision(
            f"operator series certified only to {out.min_prec()} digits"
        )
    return out


def structural_floor(spec, k: int):
    """Certified lower bound (in w-lanes) for the k-th coefficient: the
    column divisibility gives v_w >= (p-1) k(k-1)/2 before any computation."""
    return (spec.p - 1) * k * (k - 1) // 2
