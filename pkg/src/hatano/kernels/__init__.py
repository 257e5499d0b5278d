"""Kernel backend selection.

The compiled Cython extension is preferred; the pure numpy twin is used
when the extension is missing or when HATANO_KERNELS=pure is set. Both
expose the same four functions:

    advance_products(v, E, M, logsum)
    transfer_product_scaled(v, E)
    disc_trace_grid(v, E)
    disc_trace_deriv_grid(v, E)
"""

import os

from . import _pure

if os.environ.get("HATANO_KERNELS", "") == "pure":
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _ext as _impl

        BACKEND = "ext"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

advance_products = _impl.advance_products
transfer_product_scaled = _impl.transfer_product_scaled
disc_trace_grid = _impl.disc_trace_grid
disc_trace_deriv_grid = _impl.disc_trace_deriv_grid
