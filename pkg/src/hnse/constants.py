import math

# Largest exponent accepted by e^{zeta |lambda|} before float64 overflow.
EXP_GUARD = 700.0

ORTHONORMALITY_TOL = 1e-8
S_MEAN_TOL = 1e-12
DIVERGENCE_TOL = 1e-8
RADIUS_FLOOR = 1e-24

# Kernel window in scaled units is sqrt(2M) + KERNEL_WINDOW_PAD.
KERNEL_WINDOW_PAD = 6.5
# Physical Y grids resolve radius sqrt(2M) + PHYSICAL_WINDOW_PAD.
PHYSICAL_WINDOW_PAD = 4.5
MAX_GAUSS_HERMITE_NODES = 300
# Gauss-Legendre nodes per step for the dissipation along the ETD interpolant.
DENSE_QUADRATURE_NODES = 12

SMALL_DATA_AMPLITUDE = 0.05


def plancherel_constant(d: int) -> float:
    """Ratio of the frequency pairing to the physical pairing, pi^{d+1} / 2^{d-1}."""
    return math.pi ** (d + 1) / 2 ** (d - 1)


def inversion_constant(d: int) -> float:
    return 2 ** (d - 1) / math.pi ** (d + 1)


def kernel_window(M: int) -> float:
    return math.sqrt(2 * M) + KERNEL_WINDOW_PAD
