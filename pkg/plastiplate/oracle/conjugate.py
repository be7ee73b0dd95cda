"""Grid-search evaluation of sup_ξ {y:ξ − ψ_λ(ξ)} over Sym2."""
import numpy as np

from plastiplate.ops.potentials import TruncationParams, psi_lambda
from plastiplate.ops.sym2 import ArrayLike, as_sym2, frobenius_inner, norm_dual
from plastiplate.utils import OracleError

MAX_LEVELS = 200


def search_radius(y: ArrayLike, P: TruncationParams) -> float:
    """Half-width of a box in (a11, a22, a12) that holds the maximizer.

    The maximizer is DF_λ(y), whose Frobenius norm is at most
    2·max(α₀ t^{1/(N−1)}, t/c_λ) with t = |y|_* and c_λ the capped flow
    factor.
    """
    t = float(norm_dual(y))
    bound = max(P.alpha0 * t**(1.0 / (P.N - 1)), t / P.cap_factor)
    return 2.0 * np.sqrt(3.0) * bound + 1.0


def _box(center: np.ndarray, half: float, n: int) -> np.ndarray:
    axes = [np.linspace(c - half, c + half, n) for c in center]
    mesh = np.meshgrid(*axes, indexing='ij')
    return np.stack(mesh, axis=-1).reshape(-1, 3)


def _on_face(index: int, n: int) -> bool:
    return any(k in (0, n - 1) for k in np.unravel_index(index, (n, n, n)))


def conjugate_sup(y: ArrayLike,
                  P: TruncationParams,
                  R: float = None,
                  n: int = 21,
                  rtol: float = 1e-12) -> float:
    """Brute-force ψ_λ*(y) by a zooming grid search.

    A uniform ``n``³ grid over [−R, R]³ is searched first; the box is then
    re-centred on the best node and shrunk to two grid spacings while the
    best node is interior, and only re-centred when it lies on a face.

    Args:
        y (ArrayLike): A single Sym2.
        P (TruncationParams): Potential parameters.
        R (float, optional): Half-width of the initial box. Defaults to
            :func:`search_radius`.
        n (int): Odd number of nodes per axis. Defaults to 21.

    Raises:
        OracleError: If the best node of the initial grid lies on the box
            boundary, or the zoom does not settle in ``MAX_LEVELS`` levels.
    """
    assert n >= 5 and n % 2 == 1, f'n must be odd and >= 5, got {n}'
    y = as_sym2(y)
    assert y.shape == (3, ), f'expected a single Sym2, got shape {y.shape}'
    if R is None:
        R = search_radius(y, P)

    def values(points):
        return frobenius_inner(points, y) - psi_lambda(points, P)

    center, half = np.zeros(3), float(R)
    points = _box(center, half, n)
    vals = values(points)
    best = int(np.argmax(vals))
    if _on_face(best, n):
        raise OracleError(
            f'maximizer touches the search box of half-width {R:.3e}; '
            'enlarge R')
    best_value = float(vals[best])
    for _ in range(MAX_LEVELS):
        spacing = 2.0 * half / (n - 1)
        if spacing <= rtol * (1.0 + R):
            return best_value
        center = points[best]
        if not _on_face(best, n):
            half = 2.0 * spacing
        points = _box(center, half, n)
        vals = values(points)
        best = int(np.argmax(vals))
        best_value = max(best_value, float(vals[best]))
    raise OracleError(f'conjugate search did not settle in {MAX_LEVELS} '
                      'levels')
