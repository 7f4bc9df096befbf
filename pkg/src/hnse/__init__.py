import os

_threads = os.environ.get("HNSE_THREADS")
if _threads and "XLA_FLAGS" not in os.environ:
    os.environ["XLA_FLAGS"] = (
        "--xla_cpu_multi_thread_eigen=false "
        f"intra_op_parallelism_threads={int(_threads)}"
    )

import jax  # noqa: E402

jax.config.update("jax_enable_x64", True)
