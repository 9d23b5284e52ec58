"""Bilateral trading toward equilibrium in an exchange economy.

Thin Python layer over the C++ core::

    import bilateral_exchange as bx
    cfg = bx.load_config("configs/example2.cfg")
    result = bx.run(cfg, seed=1)
    result["status"], result["prices"]
    bx.solve_walras(cfg)["prices"]
"""

from ._core import (
    CobbDouglas,
    ExperimentConfig,
    SeparableQuadMoney,
    Utility,
    buyer_quantity,
    load_config,
    parse_config,
    preset,
    price_threshold,
    run,
    run_batch,
    seller_quantity,
    solve_walras,
    stdev_stop,
    verify_state,
)

__all__ = [
    "CobbDouglas",
    "ExperimentConfig",
    "SeparableQuadMoney",
    "Utility",
    "buyer_quantity",
    "load_config",
    "parse_config",
    "preset",
    "price_threshold",
    "run",
    "run_batch",
    "seller_quantity",
    "solve_walras",
    "stdev_stop",
    "verify_state",
]
