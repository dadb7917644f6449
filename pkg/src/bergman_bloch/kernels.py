"""Backend selection for the hot loops.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
numpy fallback in ``_pykernels`` is imported. Set ``BERGMAN_BLOCH_PURE=1`` to
force the fallback.
"""

import os

if os.environ.get("BERGMAN_BLOCH_PURE", "") not in ("", "0"):
    from ._pykernels import deriv_integrand, hyp2f1_sum, involution, lgamma

    BACKEND = "python"
else:
    try:
        from ._ckernels import deriv_integrand, hyp2f1_sum, involution, lgamma

        BACKEND = "cython"
    except ImportError:
        from ._pykernels import deriv_integrand, hyp2f1_sum, involution, lgamma

        BACKEND = "python"

__all__ = ["BACKEND", "deriv_integrand", "hyp2f1_sum", "involution", "lgamma"]
