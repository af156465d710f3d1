"""Hot loops behind a single import point.

Both implementations expose the same functions. The compiled numba path is
used unless the environment variable ``COERCIFY_DISABLE_NUMBA`` is set to a
truthy value (``1``, ``true``, ``yes``) or numba cannot be imported, in which
case the pure-numpy path is used. The choice is made once, at import time.

Kernels
-------
form_triplets(lvals, mvals, wdet, dofs)
    Element-local symmetrized form matrices, emitted as COO triplets with
    constrained (negative) DOFs skipped.
tridiagonalize(c)
    Householder reduction of a dense symmetric matrix; returns the diagonal,
    subdiagonal and the reflector vectors.
ql_eigenvalues(d, e, max_iter)
    Implicit-shift QL eigenvalues of a symmetric tridiagonal matrix.
inverse_iteration(d, e, lambdas, starts, tnorm, max_iter)
    Tridiagonal eigenvectors for known eigenvalues, with reorthogonalization
    inside clusters.
apply_householder(v_store, y)
    Back-transform tridiagonal eigenvectors with the stored reflectors.
"""
import os

from . import _numpy

_FLAG = os.environ.get("COERCIFY_DISABLE_NUMBA", "").strip().lower()
_disabled = _FLAG in {"1", "true", "yes", "on"}

if _disabled:
    _impl = _numpy
    BACKEND = "numpy"
else:
    try:
        from . import _numba as _impl
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _impl = _numpy
        BACKEND = "numpy"

form_triplets = _impl.form_triplets
tridiagonalize = _impl.tridiagonalize
ql_eigenvalues = _impl.ql_eigenvalues
inverse_iteration = _impl.inverse_iteration
apply_householder = _impl.apply_householder


def implementations():
    """Return ``{name: module}`` for every backend importable in this process."""
    impls = {"numpy": _numpy}
    try:
        from . import _numba
    except ImportError:  # pragma: no cover
        pass
    else:
        impls["numba"] = _numba
    return impls
