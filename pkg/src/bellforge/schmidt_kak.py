"""Schmidt analysis across the (1,4)|(2,3) bipartition and two-qubit KAK factoring.

A four-qubit state reachable from the initial Bell pairs by a unitary on the
co-located qubits 2 and 3 is exactly one whose Schmidt decomposition across
systems A=(1,4) and B=(2,3) has rank four with all coefficients equal to 1/2.
``build_converter`` makes the criterion constructive: it Schmidt-decomposes
the target, KAK-factors the A-side basis change, and transfers it onto the
(2,3) side through the transpose trick for maximally entangled pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_RANK_TOL = 1e-8
RECONSTRUCTION_TOL = 1e-9

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
# exp(-i pi/4 X): fixes X, exchanges the Y and Z axes under conjugation.
_SX = np.array([[1, -1j], [-1j, 1]], dtype=complex) / math.sqrt(2)

# Magic basis columns: Phi+, i*Psi+, Psi-, i*Phi-.  Conjugating a tensor
# product of single-qubit unitaries by this basis gives a real orthogonal
# matrix, and the XX/YY/ZZ interaction becomes diagonal.
_MAGIC = np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=complex,
) / math.sqrt(2)

_XX = np.kron(_X, _X)
_YY = np.kron(_Y, _Y)
_ZZ = np.kron(_Z, _Z)


class NotConvertibleError(ValueError):
    """Raised when a target fails the equal-Schmidt-coefficient criterion."""


@dataclass(frozen=True)
class SchmidtData:
    """Schmidt spectrum and bases across the (1,4)|(2,3) bipartition.

    ``coefficients`` are the singular values sorted descending; ``basis_a``
    columns span system A=(1,4) and ``basis_b`` columns span B=(2,3), so the
    state is sum_k c_k |a_k> |b_k|>.
    """

    coefficients: np.ndarray
    rank: int
    basis_a: np.ndarray
    basis_b: np.ndarray

    def to_json(self) -> dict:
        return {
            "coefficients": [float(c) for c in self.coefficients],
            "rank": self.rank,
            "basis_a": _matrix_json(self.basis_a),
            "basis_b": _matrix_json(self.basis_b),
        }


@dataclass(frozen=True)
class KakFactors:
    """Factorization U = phase * (A1 (x) B1) exp[i(t1 XX + t2 YY + t3 ZZ)] (A0 (x) B0).

    ``angles`` are canonicalized into the chamber pi/4 >= t1 >= t2 >= |t3|.
    """

    global_phase: complex
    pre_local_a: np.ndarray
    pre_local_b: np.ndarray
    post_local_a: np.ndarray
    post_local_b: np.ndarray
    angles: tuple[float, float, float]

    def interaction(self) -> np.ndarray:
        return canonical_interaction(*self.angles)

    def reconstruct(self) -> np.ndarray:
        return (
            self.global_phase
            * np.kron(self.post_local_a, self.post_local_b)
            @ self.interaction()
            @ np.kron(self.pre_local_a, self.pre_local_b)
        )

    def to_json(self) -> dict:
        return {
            "global_phase": [self.global_phase.real, self.global_phase.imag],
            "pre_local_a": _matrix_json(self.pre_local_a),
            "pre_local_b": _matrix_json(self.pre_local_b),
            "post_local_a": _matrix_json(self.post_local_a),
            "post_local_b": _matrix_json(self.post_local_b),
            "angles": list(self.angles),
        }


def _matrix_json(m: np.ndarray) -> list:
    return [[[float(c.real), float(c.imag)] for c in row] for row in np.asarray(m)]


def canonical_interaction(t1: float, t2: float, t3: float) -> np.ndarray:
    """exp[i(t1 XX + t2 YY + t3 ZZ)]; the three terms commute."""
    R = np.eye(4, dtype=complex)
    for theta, pauli2 in ((t1, _XX), (t2, _YY), (t3, _ZZ)):
        R = (math.cos(theta) * np.eye(4) + 1j * math.sin(theta) * pauli2) @ R
    return R


def reshape_14_23(amps: np.ndarray) -> np.ndarray:
    """4x4 matrix with row index (s1,s4) and column index (s2,s3)."""
    amps = np.asarray(amps, dtype=complex).reshape(2, 2, 2, 2)
    return np.transpose(amps, (0, 3, 1, 2)).reshape(4, 4)


def schmidt_14_23(psi, tol: float = DEFAULT_RANK_TOL) -> SchmidtData:
    """Schmidt decomposition of a unit-norm four-qubit state across (1,4)|(2,3).

    The phase freedom of each singular pair is fixed by making the
    largest-magnitude entry of the A-side vector real positive.
    """
    amps = np.asarray(psi.amps, dtype=complex)
    if abs(np.linalg.norm(amps) - 1.0) > 1e-10:
        raise ValueError(f"input must be unit-norm, got norm {np.linalg.norm(amps)!r}")
    M = reshape_14_23(amps)
    u, s, vh = np.linalg.svd(M)
    basis_a = u
    basis_b = vh.T  # columns b_k; psi = sum_k s_k a_k (x) b_k without conjugation
    for k in range(4):
        pivot = np.argmax(np.abs(basis_a[:, k]))
        z = basis_a[pivot, k]
        if abs(z) > 0:
            phase = z / abs(z)
            basis_a[:, k] /= phase
            basis_b[:, k] *= phase
    rank = int(np.sum(s > tol))
    return SchmidtData(s, rank, basis_a, basis_b)


def theorem1_convertible(psi, tol: float = DEFAULT_RANK_TOL) -> bool:
    """True iff the Schmidt rank is four with all coefficients equal to 1/2."""
    data = schmidt_14_23(psi, tol)
    return data.rank == 4 and float(np.max(np.abs(data.coefficients - 0.5))) <= tol


# --- KAK decomposition ----------------------------------------------------------


def _diagonalize_symmetric_unitary(M2: np.ndarray):
    """Orthogonal P and phases 2phi with M2 = P diag(exp(i 2phi)) Pᵀ.

    M2 must be complex symmetric and unitary; its real and imaginary parts are
    commuting real symmetric matrices, diagonalized simultaneously: eigh on
    the real part, then eigh of the imaginary part restricted to each
    degenerate cluster.
    """
    X = M2.real.copy()
    Y = M2.imag.copy()
    X = (X + X.T) / 2
    Y = (Y + Y.T) / 2
    w, P = np.linalg.eigh(X)
    # Refine within clusters of the X-spectrum so Y is diagonal there too.
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and abs(w[stop] - w[start]) < 1e-7:
            stop += 1
        if stop - start > 1:
            block = P[:, start:stop]
            _, Q = np.linalg.eigh(block.T @ Y @ block)
            P[:, start:stop] = block @ Q
        start = stop
    cos_phi = np.diag(P.T @ X @ P)
    sin_phi = np.diag(P.T @ Y @ P)
    two_phi = np.arctan2(sin_phi, cos_phi)
    return P, two_phi


def _factor_local_pair(M4: np.ndarray):
    """Split a tensor-product two-qubit unitary into (phase, A, B) with A, B in SU(2)."""
    T = M4.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(T)
    if s[1] > 1e-8:
        raise ValueError("matrix is not a tensor product of single-qubit unitaries")
    A = (u[:, 0] * math.sqrt(s[0])).reshape(2, 2)
    B = (vh[0, :] * math.sqrt(s[0])).reshape(2, 2)
    phase = 1.0 + 0.0j
    detA = np.linalg.det(A)
    A = A / np.sqrt(detA)
    phase *= np.sqrt(detA)
    detB = np.linalg.det(B)
    B = B / np.sqrt(detB)
    phase *= np.sqrt(detB)
    residual = np.max(np.abs(phase * np.kron(A, B) - M4))
    if residual > 1e-8:
        raise ValueError(f"tensor factorization failed (residual {residual:.3e})")
    return phase, A, B


def _canonicalize(left: np.ndarray, thetas: np.ndarray, right: np.ndarray):
    """Move the interaction angles into pi/4 >= t1 >= t2 >= |t3| by absorbing
    Clifford corrections into the local factors."""
    left = left.copy()
    right = right.copy()
    thetas = np.array(thetas, dtype=float)

    paulis = (_X, _Y, _Z)

    def shift(k, n):
        # exp(i t P) = exp(i (t - n pi/2) P) (i P)^n with P = pauli (x) pauli.
        if n == 0:
            return
        thetas[k] -= n * (math.pi / 2)
        PP = np.kron(paulis[k], paulis[k])
        correction = np.linalg.matrix_power(1j * PP, n % 4)
        nonlocal right
        right = correction @ right

    def negate(j, k):
        # Conjugating by the remaining Pauli flips the signs of angles j and k.
        m = 3 - j - k
        F = np.kron(paulis[m], np.eye(2))
        thetas[j] *= -1
        thetas[k] *= -1
        nonlocal left, right
        left = left @ F
        right = F @ right

    def swap(j, k):
        # Local Clifford conjugation exchanging the two Pauli axes.
        if (j, k) in ((0, 1), (1, 0)):
            F = np.kron(_S, _S)  # X <-> Y
        elif (j, k) in ((0, 2), (2, 0)):
            F = np.kron(_H, _H)  # X <-> Z
        else:
            F = np.kron(_SX, _SX)  # Y <-> Z
        thetas[[j, k]] = thetas[[k, j]]
        nonlocal left, right
        left = left @ F.conj().T
        right = F @ right

    for _ in range(24):
        for k in range(3):
            shift(k, round(thetas[k] / (math.pi / 2)))
        negatives = [k for k in (0, 1) if thetas[k] < -1e-15]
        if len(negatives) == 2:
            negate(0, 1)
        elif len(negatives) == 1:
            negate(negatives[0], 2)
        order = np.argsort(-np.abs(thetas))
        if order[0] != 0:
            swap(0, int(order[0]))
        order = np.argsort(-np.abs(thetas[1:])) + 1
        if order[0] != 1:
            swap(1, 2)
        t1, t2, t3 = thetas
        if t1 >= math.pi / 4 - 1e-12 and t3 < -1e-12:
            # Chamber boundary t1 = pi/4: fold t3 positive.
            negate(0, 2)
            shift(0, -1)
            continue
        if (
            t1 >= t2 - 1e-12
            and t2 >= abs(t3) - 1e-12
            and t2 >= -1e-15
            and t1 <= math.pi / 4 + 1e-12
        ):
            break
    else:
        raise RuntimeError(f"angle canonicalization did not converge: {thetas}")
    return left, np.clip(thetas, -math.pi / 4, math.pi / 4), right


def _swap_eigencolumns(P, two_phi, i, j):
    P[:, [i, j]] = P[:, [j, i]]
    two_phi[[i, j]] = two_phi[[j, i]]


def kak_decompose(U: np.ndarray) -> KakFactors:
    """KAK (Cartan) factorization of a two-qubit unitary via the magic basis.

    Returns locals, canonical interaction angles, and a global phase whose
    reconstruction matches the input to RECONSTRUCTION_TOL.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {U.shape}")
    if np.max(np.abs(U.conj().T @ U - np.eye(4))) > 1e-10:
        raise ValueError("input matrix is not unitary")

    det = np.linalg.det(U)
    g0 = det ** 0.25
    Us = U / g0
    m = _MAGIC.conj().T @ Us @ _MAGIC
    P, two_phi = _diagonalize_symmetric_unitary(m @ m.T)
    if np.linalg.det(P) < 0:
        P[:, 0] = -P[:, 0]
    phi = two_phi / 2.0
    # det(m) = 1 forces sum(phi) to a multiple of pi; fold an odd multiple
    # into one phase so that K below has determinant +1.
    n = round(float(np.sum(phi)) / math.pi)
    if n % 2 != 0:
        phi[0] -= math.pi
    # m = P exp(i Lambda) K with both P and K real orthogonal.
    K = np.diag(np.exp(-1j * phi)) @ P.T @ m
    if np.max(np.abs(K.imag)) > 1e-6:
        raise RuntimeError("magic-basis factor is not real orthogonal")
    K = K.real

    # Angles from the diagonal phases in magic order.
    t1 = (phi[0] + phi[1]) / 2
    t2 = (phi[1] + phi[3]) / 2
    t3 = (phi[0] + phi[3]) / 2

    left4 = _MAGIC @ P @ _MAGIC.conj().T
    right4 = _MAGIC @ K @ _MAGIC.conj().T
    left4, thetas, right4 = _canonicalize(left4, np.array([t1, t2, t3]), right4)

    phase_l, post_a, post_b = _factor_local_pair(left4)
    phase_r, pre_a, pre_b = _factor_local_pair(right4)
    global_phase = g0 * phase_l * phase_r
    factors = KakFactors(
        global_phase=complex(global_phase),
        pre_local_a=pre_a,
        pre_local_b=pre_b,
        post_local_a=post_a,
        post_local_b=post_b,
        angles=(float(thetas[0]), float(thetas[1]), float(thetas[2])),
    )
    residual = np.max(np.abs(factors.reconstruct() - U))
    if residual > RECONSTRUCTION_TOL:
        raise RuntimeError(f"KAK reconstruction residual {residual:.3e} exceeds tolerance")
    return factors


# --- constructive converter -----------------------------------------------------


def bell_pair_product_vector() -> np.ndarray:
    """16-vector of the initial state: Bell pairs between nodes (1,2) and (3,4)."""
    amps = np.zeros(16, dtype=complex)
    for a in (0, 1):
        for b in (0, 1):
            amps[8 * a + 4 * a + 2 * b + b] = 0.5
    return amps


def apply_on_23(V: np.ndarray, amps: np.ndarray) -> np.ndarray:
    """Apply a two-qubit unitary on qubits 2 and 3 of a 16-amplitude vector."""
    psi = np.asarray(amps, dtype=complex).reshape(2, 2, 2, 2)
    Vr = np.asarray(V, dtype=complex).reshape(2, 2, 2, 2)
    out = np.einsum("pqst,astb->apqb", Vr, psi)
    return out.reshape(16)


def build_converter(target, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Two-qubit unitary on qubits (2,3) turning the initial Bell pairs into ``target``.

    Construction: the Schmidt bases define basis changes V_a on (1,4) and V_b
    on (2,3); KAK-factor V_a and carry each factor across the maximally
    entangled pairs via the transpose relation, leaving everything on (2,3).
    Raises NotConvertibleError when the equal-coefficient criterion fails.
    """
    data = schmidt_14_23(target, tol)
    deviations = np.abs(data.coefficients - 0.5)
    worst = int(np.argmax(deviations))
    if data.rank != 4 or deviations[worst] > tol:
        raise NotConvertibleError(
            "target is not reachable by a unitary on qubits (2,3): Schmidt "
            f"coefficient {worst} is {data.coefficients[worst]:.6g} (need 1/2), rank {data.rank}"
        )
    V_a = data.basis_a
    V_b = data.basis_b
    kak = kak_decompose(V_a)
    R = kak.interaction()
    V_prime = (
        kak.global_phase
        * V_b
        @ np.kron(kak.pre_local_a.T, kak.pre_local_b.T)
        @ R
        @ np.kron(kak.post_local_a.T, kak.post_local_b.T)
    )
    return V_prime
