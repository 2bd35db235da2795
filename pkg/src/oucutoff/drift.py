"""Drift matrices with positive spectrum: validation, exponential action,
decay envelopes, and the long-time decomposition of e^{-tQ} x0.

The decomposition splits x0 across generalized eigenspaces, identifies the
slowest activated rate gamma, the largest activated chain index ell, the
rotation frequencies, and the limit vectors.  Numerically we infer block
structure from rank tests on clustered eigenvalues rather than computing an
exact Jordan form, and validate the result through reconstruction residuals.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import NotMPlusError, OUCutoffError

_CLUSTER_TOL = 1e-8
_COMPONENT_TOL = 1e-10


@dataclass
class DriftSpectrum:
    """Validated drift matrix with spectral and envelope data."""

    q: np.ndarray
    eigenvalues: np.ndarray
    clusters: list          # (value, algebraic multiplicity, block sizes)
    diagonalizable: bool
    basis_condition: float
    dim: int
    cluster_bases: list = field(default=None, repr=False)
    _decay: tuple = field(default=None, repr=False)

    @property
    def rate_min(self):
        return float(self.eigenvalues.real.min())

    @property
    def rate_max(self):
        return float(self.eigenvalues.real.max())

    @property
    def is_scalar(self):
        return self.dim == 1

    @property
    def conformal_rate(self):
        """Rate gamma when |e^{-sQ^T} lam| = e^{-gamma s}|lam| exactly.

        Holds iff the symmetric part of Q is gamma * I; returns None
        otherwise.
        """
        sym = 0.5 * (self.q + self.q.T)
        gamma = float(np.trace(sym)) / self.dim
        if np.allclose(sym, gamma * np.eye(self.dim), atol=1e-12 * max(1.0, abs(gamma))):
            return gamma
        return None


def validate_mplus(q, cluster_tol=_CLUSTER_TOL):
    """Check membership in the positive-spectrum class and extract structure.

    Raises NotMPlusError when some eigenvalue has real part <= 1e-12 and
    warns when the generalized-eigenbasis is ill conditioned.  The
    clustering tolerance escalates automatically when a tighter value
    leaves a near-defective basis: defective eigenvalues computed in
    floating point split like eps^(1/k) for a size-k block, far beyond any
    fixed tolerance near machine precision.
    """
    q = np.atleast_2d(np.asarray(q, dtype=float))
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError("drift matrix must be square")
    if not np.all(np.isfinite(q)):
        raise ValueError("drift matrix must be finite")
    eigvals = np.linalg.eigvals(q)
    worst = eigvals[np.argmin(eigvals.real)]
    if worst.real <= 1e-12:
        raise NotMPlusError(worst)

    best = None
    tol = cluster_tol
    while True:
        spec = _build_spectrum(q, eigvals, tol)
        if best is None or spec.basis_condition < best.basis_condition:
            best = spec
        if spec.basis_condition <= 1e6 or tol >= 1e-4:
            break
        tol *= 10.0
    if best.basis_condition > 1e8:
        warnings.warn(
            f"generalized-eigenbasis condition number "
            f"{best.basis_condition:.2e} exceeds 1e8",
            RuntimeWarning,
        )
    return best


def _build_spectrum(q, eigvals, cluster_tol):
    d = q.shape[0]
    scale = max(1.0, float(np.abs(eigvals).max()))
    centers = []
    for ev in eigvals:
        for k, (center, members) in enumerate(centers):
            if abs(ev - center) <= cluster_tol * scale:
                members.append(ev)
                centers[k] = (np.mean(members), members)
                break
        else:
            centers.append((ev, [ev]))

    clusters = []
    bases = []
    diagonalizable = True
    eye = np.eye(d)
    for center, members in centers:
        mult = len(members)
        blocks = _block_sizes(q, center, mult)
        if any(b > 1 for b in blocks):
            diagonalizable = False
        depth = max(blocks) if blocks else 1
        power = np.linalg.matrix_power(q - center * eye, max(depth, 1))
        _, _, vh = np.linalg.svd(power)
        basis = vh.conj().T[:, d - mult:]
        clusters.append((complex(center), mult, blocks))
        bases.append((complex(center), depth, basis))

    stacked = np.hstack([b for _, _, b in bases])
    basis_cond = float(np.linalg.cond(stacked))
    return DriftSpectrum(
        q=q,
        eigenvalues=eigvals,
        clusters=clusters,
        diagonalizable=diagonalizable,
        basis_condition=basis_cond,
        dim=d,
        cluster_bases=bases,
    )


def _block_sizes(q, center, mult):
    """Block sizes at one eigenvalue from nilpotency rank drops."""
    d = q.shape[0]
    shifted = q - center * np.eye(d)
    kernel_dims = [0]
    power = np.eye(d, dtype=complex)
    for _ in range(mult):
        power = power @ shifted
        s = np.linalg.svd(power, compute_uv=False)
        tol = max(1e-10, 1e-8 * s[0]) if s[0] > 0 else 1e-10
        kernel_dims.append(d - int(np.sum(s > tol)))
        if kernel_dims[-1] >= mult:
            break
    # number of blocks with size >= k is kernel_dims[k] - kernel_dims[k-1]
    counts = [kernel_dims[k] - kernel_dims[k - 1] for k in range(1, len(kernel_dims))]
    sizes = []
    for size in range(len(counts), 0, -1):
        at_least = counts[size - 1]
        longer = sum(1 for s_ in sizes if s_ >= size + 1)
        sizes.extend([size] * (at_least - longer))
    return sorted(sizes, reverse=True)


def exp_action(spec, t, x):
    """Apply e^{-tQ} to a vector (or a batch with trailing axis d)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    x = np.asarray(x, dtype=float)
    m = exp_matrix(spec, t)
    return x @ m.T if x.ndim > 1 else m @ x


def exp_matrix(spec, t):
    if spec.is_scalar:
        return np.array([[math.exp(-t * spec.q[0, 0])]])
    return linalg.expm(-t * spec.q)


def decay_constants(spec, n_probes=1000, seed=20240001, max_rounds=5):
    """Envelope constants (c1, c2, c3, c4) for |e^{-tQ^T} lam|.

    They satisfy c4 e^{-c2 t}|lam| <= |e^{-tQ^T} lam| <= c3 e^{-c1 t}|lam|
    on a randomized probe set.  Normal matrices give the tight constants
    (rate_min, rate_max, 1, 1); otherwise c1, c2 are pulled inward by a
    calibrated margin absorbing polynomial transients.
    """
    if spec._decay is not None:
        return spec._decay
    q = spec.q
    gmin, gmax = spec.rate_min, spec.rate_max
    qt = q.T
    if np.allclose(q @ qt, qt @ q, atol=1e-12 * max(1.0, np.linalg.norm(q) ** 2)):
        spec._decay = (gmin, gmax, 1.0, 1.0)
        return spec._decay

    rng = np.random.default_rng(seed)
    delta = min(0.05 * gmin, 0.2)
    for _ in range(max_rounds):
        c1, c2 = gmin - delta, gmax + delta
        ts = np.concatenate(([0.0], np.geomspace(1e-3, 60.0 / gmin, 320)))
        upper, lower = 1.0, 1.0
        for t in ts:
            m = linalg.expm(-t * qt)
            s = np.linalg.svd(m, compute_uv=False)
            upper = max(upper, s[0] * math.exp(c1 * t))
            lower = min(lower, s[-1] * math.exp(c2 * t))
        c3, c4 = upper * 1.05, lower * 0.95
        probe_t = rng.uniform(0.0, 60.0 / gmin, n_probes)
        probe_lam = rng.standard_normal((n_probes, spec.dim))
        ok = True
        for t, lam in zip(probe_t, probe_lam):
            val = np.linalg.norm(linalg.expm(-t * qt) @ lam)
            mag = np.linalg.norm(lam)
            if not (c4 * math.exp(-c2 * t) * mag <= val * (1 + 1e-9)
                    and val <= c3 * math.exp(-c1 * t) * mag * (1 + 1e-9)):
                ok = False
                break
        if ok:
            spec._decay = (c1, c2, c3, c4)
            return spec._decay
        delta *= 2.0
        if delta >= gmin:
            delta = 0.9 * gmin
    raise OUCutoffError("decay-constant calibration failed after max rounds")


@dataclass
class AsymptoticData:
    """Long-time decomposition of e^{-tQ} x0.

    e^{-tQ} x0 ~ t^(ell-1) e^(-gamma t) * sum_k exp(i t freq_k) v_k.

    ``thetas`` are the frequencies reduced to [0, 2pi) for reporting;
    ``freqs`` keep the raw values used in every evaluation (the reduced
    representatives change exp(i t theta) at non-integer t).
    """

    gamma: float
    ell: int
    m: int
    thetas: np.ndarray
    freqs: np.ndarray
    vs: np.ndarray
    x0: np.ndarray
    chain_data: list = field(repr=False)      # (eigenvalue, [terms]) per cluster
    spec: DriftSpectrum = field(repr=False, default=None)

    @property
    def v_sum(self):
        return self.vs.sum(axis=0)

    @property
    def oscillatory(self):
        return bool(np.any(np.abs(self.freqs) > 1e-12))

    def limit_vector(self, t):
        """sum_k exp(i t freq_k) v_k at one or many times t."""
        t = np.asarray(t, dtype=float)
        phases = np.exp(1j * np.multiply.outer(t, self.freqs))
        return phases @ self.vs

    def leading_residual(self, t):
        """|e^{gamma t}/t^{ell-1} e^{-tQ} x0 - limit_vector(t)| at scalar t."""
        actual = exp_action(self.spec, t, self.x0)
        scaled = actual * math.exp(self.gamma * t) / t ** (self.ell - 1)
        return float(np.linalg.norm(scaled - self.limit_vector(t)))

    def reconstruct(self, t):
        """e^{-tQ} x0 rebuilt from the stored chain expansion."""
        out = np.zeros(self.spec.dim, dtype=complex)
        for lam, terms in self.chain_data:
            poly = np.zeros(self.spec.dim, dtype=complex)
            for j, term in enumerate(terms):
                poly += (-t) ** j * term
            out += np.exp(-lam * t) * poly
        return out

    def reconstruction_error(self, t):
        """Relative error of the chain reconstruction against e^{-tQ} x0."""
        actual = exp_action(self.spec, t, self.x0)
        rebuilt = self.reconstruct(t)
        denom = max(np.linalg.norm(actual), 1e-300)
        return float(np.linalg.norm(rebuilt.real - actual) / denom) + float(
            np.linalg.norm(rebuilt.imag) / denom
        )

    def residual_curve(self, n=12):
        ts = np.geomspace(5.0 / self.gamma, 50.0 / self.gamma, n)
        return [(float(t), self.leading_residual(t)) for t in ts]

    def export(self):
        return {
            "gamma": self.gamma,
            "ell": self.ell,
            "thetas": self.thetas.tolist(),
            "vs": [[[v.real, v.imag] for v in row] for row in self.vs],
            "residual_curve": self.residual_curve(),
        }


def asymptotic_decomposition(spec, x0, component_tol=_COMPONENT_TOL,
                             rate_merge_tol=_CLUSTER_TOL):
    """Split e^{-tQ} x0 into generalized-eigen chains and extract the
    leading rate, chain index, frequencies, and limit vectors.

    Rejects x0 = 0: started at the origin the drift term vanishes and no
    abrupt transition can be anchored.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if np.linalg.norm(x0) == 0.0:
        raise ValueError("x0 must be nonzero: no decomposition from the origin")
    eye = np.eye(spec.dim)

    lambdas = [lam for lam, _, _ in spec.cluster_bases]
    heights = [depth for _, depth, _ in spec.cluster_bases]
    bases = [basis for _, _, basis in spec.cluster_bases]
    stacked = np.hstack(bases)
    coefs = np.linalg.solve(stacked, x0.astype(complex))

    chain_data = []
    actives = []
    offset = 0
    for basis, lam, depth in zip(bases, lambdas, heights):
        mult = basis.shape[1]
        y = basis @ coefs[offset:offset + mult]
        offset += mult
        if np.linalg.norm(y) <= component_tol * np.linalg.norm(x0):
            continue
        shifted = spec.q - lam * eye
        terms = [y]
        current = y
        for _ in range(depth - 1):
            current = shifted @ current
            if np.linalg.norm(current) <= component_tol * np.linalg.norm(y):
                break
            terms.append(current / math.factorial(len(terms)))
        # terms[j] = (Q - lam)^j y / j!
        chain_data.append((lam, terms))
        actives.append((lam.real, len(terms), lam, terms))

    rate = min(a[0] for a in actives)
    tied = [a for a in actives if a[0] - rate <= rate_merge_tol * max(1.0, rate)]
    ell = max(a[1] for a in tied)
    leaders = [a for a in tied if a[1] == ell]

    freqs, vecs = [], []
    for _, _, lam, terms in leaders:
        freqs.append(-lam.imag)
        vecs.append((-1.0) ** (ell - 1) * terms[ell - 1])
    freqs = np.array(freqs)
    vecs = np.array(vecs)

    return AsymptoticData(
        gamma=float(rate),
        ell=int(ell),
        m=len(leaders),
        thetas=np.mod(freqs, 2.0 * math.pi),
        freqs=freqs,
        vs=vecs,
        x0=x0,
        chain_data=chain_data,
        spec=spec,
    )


def oscillation_envelope(asym, t_grid=None, dedupe_tol=1e-6):
    """Range of |limit_vector(t)| plus representative limit vectors.

    Non-oscillatory data yields the constant envelope |v_sum| and the single
    representative v_sum.
    """
    if not asym.oscillatory:
        v = asym.v_sum.real
        mag = float(np.linalg.norm(v))
        return mag, mag, [v]
    if t_grid is None:
        base = 2.0 * math.pi / max(np.abs(asym.freqs).max(), 1e-12)
        t_grid = np.linspace(0.0, 23.0 * base, 1024)
    vals = asym.limit_vector(t_grid)
    real_vals = vals.real
    mags = np.linalg.norm(vals, axis=-1)    # complex modulus
    samples = []
    for v in real_vals:
        if not any(np.linalg.norm(v - s) <= dedupe_tol * (1 + np.linalg.norm(v))
                   for s in samples):
            samples.append(v)
        if len(samples) >= 64:
            break
    return float(mags.min()), float(mags.max()), samples
