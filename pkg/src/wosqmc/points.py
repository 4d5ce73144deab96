"""Point set constructions: IID, scrambled Sobol', shifted lattices,
Fibonacci lattices, Hammersley sets and stratified 1-D sets.

All randomization is seeded through :func:`derive_rng`, a counter-based
derivation from a master seed, so any randomization in a run can be replayed
independently of every other one.
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .backend import sobol_fill

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
DIRECTION_FILE = os.path.join(DATA_DIR, "new-joe-kuo-6.256.txt")
LATTICE_FILE = os.path.join(DATA_DIR, "lattice-dbd2-order3-16384.256.txt")

OUT_BITS = 53  # digit precision carried for Sobol' points and scrambles
PHI = (1.0 + math.sqrt(5.0)) / 2.0


def derive_rng(seed, *path):
    """Independent generator for (seed, path); counter-based and replayable."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def spawn_seeds(seed, count, *path):
    """``count`` independent 63-bit seeds derived from (seed, path)."""
    return derive_rng(seed, *path).integers(0, 2 ** 63, size=count)


@dataclass(frozen=True)
class RandomizedPointSet:
    """An n-by-s matrix of points in [0,1) with provenance."""

    values: np.ndarray
    construction: str
    seed: int | None = None

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def s(self):
        return self.values.shape[1]


# ---------------------------------------------------------------------------
# Sobol' nets

@dataclass
class DirectionNumberTable:
    """Per-dimension primitive polynomials and initial direction integers.

    Row ``d`` (d >= 2) holds (degree s, coefficient a, m_1..m_s) in the
    Joe-Kuo text format. Dimension 1 is the van der Corput column.
    """

    degrees: list = field(default_factory=list)
    coeffs: list = field(default_factory=list)
    m_init: list = field(default_factory=list)

    @property
    def max_dim(self):
        return len(self.degrees) + 1


def load_direction_table(path=None):
    """Parse a ``d s a m_1 ... m_s`` direction-number file."""
    path = path or DIRECTION_FILE
    table = DirectionNumberTable()
    expected = 2
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts or not parts[0].isdigit():
                continue
            d, s, a = int(parts[0]), int(parts[1]), int(parts[2])
            m = [int(v) for v in parts[3:3 + s]]
            if d != expected or len(m) != s:
                raise ValueError("malformed direction-number row: %r" % line)
            for j, mj in enumerate(m):
                if mj % 2 == 0 or not 0 < mj < (1 << (j + 1)):
                    raise ValueError("direction integer m_%d=%d invalid for "
                                     "dimension %d" % (j + 1, mj, d))
            table.degrees.append(s)
            table.coeffs.append(a)
            table.m_init.append(m)
            expected += 1
    return table


_DEFAULT_TABLE = None


def default_direction_table():
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = load_direction_table()
    return _DEFAULT_TABLE


def _direction_vectors(table, s, nbits):
    """uint64 array (s, nbits); column b holds the 53-bit direction vector
    for input bit b of each dimension."""
    if s > table.max_dim:
        raise ValueError("dimension %d exceeds direction table capacity %d"
                         % (s, table.max_dim))
    vec = np.zeros((s, nbits), dtype=np.uint64)
    for j in range(nbits):
        vec[0, j] = 1 << (OUT_BITS - 1 - j)
    for dim in range(2, s + 1):
        deg = table.degrees[dim - 2]
        a = table.coeffs[dim - 2]
        m = list(table.m_init[dim - 2])
        for j in range(deg, nbits):
            new = m[j - deg] ^ (m[j - deg] << deg)
            for t in range(1, deg):
                if (a >> (deg - 1 - t)) & 1:
                    new ^= m[j - t] << t
            m.append(new)
        for j in range(min(nbits, len(m))):
            vec[dim - 1, j] = m[j] << (OUT_BITS - 1 - j)
    return vec


class SobolNet:
    """First n = 2^m points of the Sobol' sequence in ``s`` dimensions."""

    def __init__(self, n, s, table=None):
        if n < 1 or n & (n - 1):
            raise ValueError("Sobol' point count must be a power of two, got %d" % n)
        m = max(n.bit_length() - 1, 1)
        if m > 31:
            raise ValueError("n = 2^%d exceeds the supported 2^31" % m)
        self.n = n
        self.s = s
        self.nbits = m
        self.vectors = _direction_vectors(table or default_direction_table(), s, m)

    def digits(self):
        """Unrandomized 53-bit digit integers, natural sequence order."""
        return sobol_fill(self.vectors, self.n)

    def points(self):
        return self.digits().astype(np.float64) * 2.0 ** -OUT_BITS

    def scrambled(self, seed):
        """Matousek linear matrix scramble plus digital shift.

        Each dimension gets an independent random nonsingular lower
        triangular bit matrix applied to its digits and an independent
        53-bit XOR shift; net balance is preserved and every point is
        individually uniform.
        """
        svec, shift = scramble_vectors(self.vectors, derive_rng(seed))
        return RandomizedPointSet(fill_scrambled(svec, shift, self.n),
                                  "SobolLMS", seed)


def _scramble_columns(rng):
    """Columns of a random nonsingular lower-triangular bit matrix.

    Column for input digit at bit position p has bit p set (unit diagonal)
    and uniform bits strictly below.
    """
    r = rng.integers(0, 1 << OUT_BITS, size=OUT_BITS, dtype=np.uint64)
    cols = [0] * OUT_BITS
    for p in range(OUT_BITS):
        cols[p] = (1 << p) | (int(r[p]) & ((1 << p) - 1))
    return cols


def scramble_vectors(vectors, rng):
    """Left-multiply each dimension's generating matrix by an independent
    random lower-triangular scramble; returns (scrambled vectors, shifts)."""
    vectors = np.asarray(vectors, dtype=np.uint64)
    s, nbits = vectors.shape
    svec = np.zeros_like(vectors)
    for dim in range(s):
        cols = _scramble_columns(rng)
        for b in range(nbits):
            v = int(vectors[dim, b])
            out = 0
            while v:
                low = v & -v
                out ^= cols[low.bit_length() - 1]
                v ^= low
            svec[dim, b] = out
    shift = rng.integers(0, 1 << OUT_BITS, size=s, dtype=np.uint64)
    return svec, shift


def fill_scrambled(svec, shift, n):
    """Points of the scrambled net as floats in [0,1)."""
    digits = sobol_fill(svec, n)
    digits ^= np.asarray(shift, dtype=np.uint64)[None, :]
    return digits.astype(np.float64) * 2.0 ** -OUT_BITS


def generate_sobol(n, s, table=None):
    """Unrandomized Sobol' net as floats; dimension 1 is van der Corput."""
    return SobolNet(n, s, table).points()


def scramble_matousek(net, seed):
    return net.scrambled(seed)


# ---------------------------------------------------------------------------
# Rank-1 lattices

def load_generating_vector(path=None):
    path = path or LATTICE_FILE
    z = np.loadtxt(path, dtype=np.int64, ndmin=1)
    if z[0] != 1 or (z <= 0).any():
        raise ValueError("generating vector must start with 1 and be positive")
    return z


_DEFAULT_GV = None


def default_generating_vector():
    global _DEFAULT_GV
    if _DEFAULT_GV is None:
        _DEFAULT_GV = load_generating_vector()
    return _DEFAULT_GV


def generate_lattice(n, s, gv=None):
    """Rank-1 lattice points ((i-1) z mod n)/n, i = 1..n."""
    gv = default_generating_vector() if gv is None else np.asarray(gv, dtype=np.int64)
    if s > gv.shape[0]:
        raise ValueError("dimension %d exceeds generating vector length %d"
                         % (s, gv.shape[0]))
    i = np.arange(n, dtype=np.int64)[:, None]
    return (i * gv[None, :s] % n) / float(n)


def random_shift(points, seed):
    """Cranley-Patterson shift: one uniform vector added mod 1 to all rows."""
    points = np.asarray(points, dtype=np.float64)
    delta = derive_rng(seed).random(points.shape[1])
    return RandomizedPointSet(np.mod(points + delta[None, :], 1.0),
                              "ShiftedLattice", seed)


def fibonacci_number(r):
    a, b = 0, 1
    for _ in range(r):
        a, b = b, a + b
    return a


def fibonacci_index(n):
    """r with F_r = n, or raise when n is not a Fibonacci number >= F_3."""
    r = 3
    while fibonacci_number(r) < n:
        r += 1
    if fibonacci_number(r) != n:
        raise ValueError("%d is not a Fibonacci number" % n)
    return r


def smallest_fibonacci_at_least(m):
    """(r, F_r) with the smallest Fibonacci number F_r >= m, r >= 3."""
    r = 3
    while fibonacci_number(r) < m:
        r += 1
    return r, fibonacci_number(r)


def fibonacci_lattice(r):
    """The 2-D lattice x_i = ((i-1)/F_r, {(i-1) F_{r-1} / F_r})."""
    if r < 3:
        raise ValueError("Fibonacci index must be >= 3")
    if r > 85:
        raise ValueError("Fibonacci index too large for exact integers")
    n = fibonacci_number(r)
    return generate_lattice(n, 2, np.array([1, fibonacci_number(r - 1)]))


# ---------------------------------------------------------------------------
# On-the-fly constructions for partially converged ensembles

def coprime_multiplier(m):
    """Golden-ratio multiplier rule: start at max(round(m/phi) mod m, 2) and
    increment, wrapping to 2 at m, until coprime with m."""
    if m <= 2:
        return 1
    a = int(math.floor(m / PHI + 0.5)) % m
    a = max(a, 2)
    for _ in range(m):
        if math.gcd(a, m) == 1:
            return a
        a += 1
        if a >= m:
            a = 2
    return 1


def stratified_shifted_1d(m, seed):
    """One point per interval [j/m,(j+1)/m): ((a(i-1) mod m) + Delta)/m."""
    if m < 1:
        return RandomizedPointSet(np.zeros((0, 1)), "Stratified1D", seed)
    a = coprime_multiplier(m)
    delta = derive_rng(seed).random()
    i = np.arange(m, dtype=np.int64)
    x = ((a * i % m) + delta) / m
    return RandomizedPointSet(x[:, None], "Stratified1D", seed)


HALTON_BASES = (2, 3, 5)


def radical_inverse(i, base, digits):
    """Base-b radical inverse digits of indices ``i``; returns the digit
    array (len(i), digits), most significant first."""
    i = np.asarray(i, dtype=np.int64)
    out = np.zeros((i.shape[0], digits), dtype=np.int64)
    rem = i.copy()
    for t in range(digits):
        out[:, t] = rem % base
        rem //= base
    return out


def van_der_corput(m, base):
    """Unshifted base-b radical inverses of 0..m-1."""
    ndig = max(1, int(math.ceil(math.log(max(m, 2), base))) + 1)
    digs = radical_inverse(np.arange(m), base, ndig)
    scales = base ** -(np.arange(1, ndig + 1, dtype=np.float64))
    return digs @ scales


def _halton_column(m, base, rng):
    """Base-b van der Corput column with a random digital shift."""
    ndig = max(1, int(math.ceil(math.log(max(m, 2), base))) + 1)
    # enough shift digits that the tail is below double precision
    nshift = int(math.ceil(53 * math.log(2) / math.log(base))) + 1
    shift = rng.integers(0, base, size=nshift)
    digs = radical_inverse(np.arange(m), base, ndig)
    digs = (digs + shift[None, :ndig]) % base
    scales = base ** -(np.arange(1, ndig + 1, dtype=np.float64))
    x = digs @ scales
    tail = float((shift[ndig:] * base ** -(np.arange(ndig + 1, nshift + 1,
                                                     dtype=np.float64))).sum())
    return np.mod(x + tail, 1.0)


def hammersley(m, s, seed):
    """Hammersley set: column 1 is (i-1)/m, the rest are digitally shifted
    Halton columns in bases 2, 3, 5."""
    if s - 1 > len(HALTON_BASES):
        raise ValueError("hammersley supports at most %d columns" % (len(HALTON_BASES) + 1))
    rng = derive_rng(seed)
    cols = [np.arange(m, dtype=np.float64) / max(m, 1)]
    for j in range(s - 1):
        cols.append(_halton_column(m, HALTON_BASES[j], rng))
    return RandomizedPointSet(np.column_stack(cols), "Hammersley", seed)


def mc_points(n, s, seed):
    """IID Uniform[0,1)^s rows, reproducible from the seed."""
    return RandomizedPointSet(derive_rng(seed).random((n, s)), "MC", seed)
