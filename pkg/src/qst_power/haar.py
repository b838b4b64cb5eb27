"""Haar sampling on SU(2) and statistical checks of its low moments.

The sampler draws a 2x2 complex Gaussian matrix, orthonormalizes it by QR
with the phase correction that makes the factorization unique, and rescales
the determinant to 1. This gives exactly Haar-distributed SU(2) elements.

Every SU(2) element R defines a rotation frame: the 3x3 real matrix with
rows indexed by l and entries F[l][m] = Tr(R sigma_l R^dag sigma_m)/2, i.e.
row l is the Bloch image of sigma_l under conjugation. With rows-as-images
the map composes in reverse order: frame_of(R1 @ R2) = frame_of(R2) @
frame_of(R1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import NotUnitary, is_unitary, pauli

_SIGMA = np.stack([pauli("x"), pauli("y"), pauli("z")])

GENERATOR_CHUNK = 50_000


@dataclass
class RandomSource:
    """Reproducible random stream keyed by (seed, stream id).

    Two sources with the same key produce bit-identical sample sequences.
    Distinct stream ids give statistically independent streams, so parallel
    workers can sample without overlap. Consumers of many streams (the
    multi-start optimizer, the Monte-Carlo oracle) allocate disjoint stream
    ranges from a single base seed; see OptimizerConfig and mc_average.
    """

    seed: int
    stream: int = 0
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        self._gen = np.random.Generator(np.random.PCG64(seq))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def substream(self, offset: int) -> "RandomSource":
        """Fresh source on stream id ``stream + offset`` with the same seed."""
        return RandomSource(self.seed, self.stream + offset)


def sample_su2(source: RandomSource, n: int | None = None) -> np.ndarray:
    """Draw Haar-distributed SU(2) elements from the source's stream.

    Returns a single 2x2 matrix when n is None, else an (n, 2, 2) stack.
    """
    count = 1 if n is None else int(n)
    rng = source.generator
    z = rng.normal(size=(count, 2, 2)) + 1j * rng.normal(size=(count, 2, 2))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (diag / np.abs(diag))[:, np.newaxis, :]
    # q is now Haar on U(2); divide by a determinant square root to land in SU(2)
    det = q[:, 0, 0] * q[:, 1, 1] - q[:, 0, 1] * q[:, 1, 0]
    q = q / np.sqrt(det)[:, np.newaxis, np.newaxis]
    return q[0] if n is None else q


def frame_of(r: np.ndarray) -> np.ndarray:
    """Rotation frame of a 2x2 unitary: F[l][m] = Tr(R sigma_l R^dag sigma_m)/2.

    The result is real orthogonal with determinant +1.
    """
    r = np.asarray(r, dtype=complex)
    if not is_unitary(r, tol=1e-8):
        raise NotUnitary("frame_of expects a 2x2 unitary")
    return frames_of(r[np.newaxis])[0]


def frames_of(rs: np.ndarray) -> np.ndarray:
    """Vectorized frame_of for a stack of (n, 2, 2) unitaries, no checks."""
    conj = np.einsum("nab,lbc,ndc->nlad", rs, _SIGMA, rs.conj())
    return np.einsum("nlad,mda->nlm", conj, _SIGMA).real * 0.5


def su2_from_angles(theta: float, phi: float, omega: float) -> np.ndarray:
    """SU(2) rotation by omega about the axis (theta, phi) in spherical form.

    Returns exp(-i omega/2 n.sigma) with n = (sin t cos p, sin t sin p, cos t),
    whose rotation frame equals the axis-angle chart used by the optimizer.
    """
    axis = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    n_sigma = axis[0] * _SIGMA[0] + axis[1] * _SIGMA[1] + axis[2] * _SIGMA[2]
    return np.cos(omega / 2) * np.eye(2, dtype=complex) - 1j * np.sin(omega / 2) * n_sigma


@dataclass(frozen=True)
class MomentEstimate:
    """Sample mean(s) with per-component standard errors."""

    mean: np.ndarray
    std_error: np.ndarray
    n_samples: int


class RunningMoments:
    """Streaming mean/variance accumulator with associative merge.

    Tracks (count, mean, M2) per component for an array-valued statistic, so
    chunks can be computed by independent workers and merged in any order;
    merged means agree to ~1e-12 regardless of grouping.
    """

    def __init__(self, shape: tuple[int, ...]):
        self.count = 0
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)

    def update(self, batch: np.ndarray) -> None:
        """Fold in a batch whose leading axis indexes samples."""
        n = batch.shape[0]
        if n == 0:
            return
        batch_mean = batch.mean(axis=0)
        batch_m2 = ((batch - batch_mean) ** 2).sum(axis=0)
        self._combine(n, batch_mean, batch_m2)

    def merge(self, other: "RunningMoments") -> None:
        self._combine(other.count, other.mean, other.m2)

    def _combine(self, n: int, mean: np.ndarray, m2: np.ndarray) -> None:
        if n == 0:
            return
        total = self.count + n
        delta = mean - self.mean
        self.mean = self.mean + delta * (n / total)
        self.m2 = self.m2 + m2 + delta**2 * (self.count * n / total)
        self.count = total

    def estimate(self) -> MomentEstimate:
        if self.count < 1:
            raise ValueError("no samples accumulated")
        if self.count == 1:
            stderr = np.zeros_like(self.mean)
        else:
            stderr = np.sqrt(self.m2 / (self.count - 1) / self.count)
        return MomentEstimate(mean=self.mean, std_error=stderr, n_samples=self.count)


def _frame_z_rows(source: RandomSource, n_samples: int):
    """Yield (chunk of R_z rows, chunk of sampled unitaries) pairs."""
    done = 0
    while done < n_samples:
        take = min(GENERATOR_CHUNK, n_samples - done)
        rs = sample_su2(source, take)
        yield frames_of(rs)[:, 2, :], rs
        done += take


def estimate_first_moment(source: RandomSource, n_samples: int) -> MomentEstimate:
    """Sample means of the frame components R_z^m, m in {x, y, z}.

    The Haar averages vanish; the estimate reports standard errors so the
    deviation can be judged in sigma units.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    acc = RunningMoments((3,))
    for rows, _ in _frame_z_rows(source, n_samples):
        acc.update(rows)
    return acc.estimate()


def estimate_second_moment(source: RandomSource, n_samples: int) -> MomentEstimate:
    """Sample means of the products R_z^m R_z^n as a 3x3 matrix.

    The Haar average is delta_mn / 3; the diagonal sums to 1 pointwise since
    each row of a frame is a unit vector.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    acc = RunningMoments((3, 3))
    for rows, _ in _frame_z_rows(source, n_samples):
        acc.update(rows[:, :, np.newaxis] * rows[:, np.newaxis, :])
    return acc.estimate()


def estimate_twirl(source: RandomSource, n_samples: int) -> MomentEstimate:
    """Sample mean of R P0 R^dag, which converges to I/2.

    Means are complex 2x2; std_error combines the spreads of the real and
    imaginary parts entrywise.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    acc_re = RunningMoments((2, 2))
    acc_im = RunningMoments((2, 2))
    p0 = np.diag([1.0, 0.0]).astype(complex)
    for _, rs in _frame_z_rows(source, n_samples):
        states = np.einsum("nab,bc,ndc->nad", rs, p0, rs.conj())
        acc_re.update(states.real)
        acc_im.update(states.imag)
    re = acc_re.estimate()
    im = acc_im.estimate()
    return MomentEstimate(
        mean=re.mean + 1j * im.mean,
        std_error=np.sqrt(re.std_error**2 + im.std_error**2),
        n_samples=re.n_samples,
    )
