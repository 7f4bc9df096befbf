import jax.numpy as jnp

from hnse.errors import GridMismatchError
from hnse.frequency import HorizontalField, SpectralField
from hnse.operators import LadderSpec, SymbolSpec, apply_ladder, apply_symbol
from hnse.projection import check_divergence_free, friedrichs, leray
from hnse.transform import PhysicalField, PhysicalGrid, forward, inverse


def _horizontal_ladders(d: int) -> list[LadderSpec]:
    return [LadderSpec("X", j) for j in range(1, d + 1)] + [
        LadderSpec("Xi", j) for j in range(1, d + 1)
    ]


def _require_paired(f: SpectralField, pgrid: PhysicalGrid):
    if f.grid.grid_mode != "uniform_periodic":
        raise GridMismatchError("Products need a uniform_periodic grid.")
    if not f.grid.is_compatible(pgrid.fgrid):
        raise GridMismatchError("Field grid is not paired with the physical grid.")


def pointwise_product(f: SpectralField, g: SpectralField, pgrid: PhysicalGrid) -> SpectralField:
    """
    forward(inverse(f) * inverse(g)). The s-mean and the s-frequencies outside
    the band are dropped, and (n, m) are re-truncated to [0, M].
    """
    _require_paired(f, pgrid)
    f.grid.check_compatible(g.grid)
    product = inverse(f, pgrid) * inverse(g, pgrid)
    return forward(product, f.grid, strict=False)


def _transport_terms(
    u: HorizontalField, k: int, pgrid: PhysicalGrid
) -> list[SpectralField]:
    """sum_j u_j P_j (J_k u)_i for every component i, assembled in physical space."""
    d = u.grid.d
    ladders = _horizontal_ladders(d)
    truncated = friedrichs(u, k, "bi")
    velocity = [inverse(c, pgrid).samples for c in u.components()]
    terms = []
    for i in range(2 * d):
        component = truncated.component(i)
        total = jnp.zeros(pgrid.sample_shape, dtype=jnp.complex128)
        for j, ladder in enumerate(ladders):
            total = total + velocity[j] * inverse(apply_ladder(component, ladder), pgrid).samples
        terms.append(forward(PhysicalField(pgrid, total), u.grid, strict=False))
    return terms


def _skew_terms(u: HorizontalField, k: int, pgrid: PhysicalGrid) -> list[SpectralField]:
    """
    1/2 sum_j [u_j P_j w_i + P_j (u_j w_i)] with w = J_k u, for every component i.

    For real u the pairing of this term with w vanishes identically: the
    transforms are adjoint and the ladders skew-adjoint.
    """
    d = u.grid.d
    ladders = _horizontal_ladders(d)
    truncated = friedrichs(u, k, "bi")
    velocity = [inverse(c, pgrid).samples for c in u.components()]
    terms = []
    for i in range(2 * d):
        component = truncated.component(i)
        values = inverse(component, pgrid).samples
        advective = jnp.zeros(pgrid.sample_shape, dtype=jnp.complex128)
        conservative = SpectralField.zeros(u.grid)
        for j, ladder in enumerate(ladders):
            advective = advective + velocity[j] * inverse(apply_ladder(component, ladder), pgrid).samples
            flux = forward(PhysicalField(pgrid, velocity[j] * values), u.grid, strict=False)
            conservative = conservative + apply_ladder(flux, ladder)
        advective_field = forward(PhysicalField(pgrid, advective), u.grid, strict=False)
        terms.append((advective_field + conservative) * 0.5)
    return terms


def convect(
    u: HorizontalField, k: int, pgrid: PhysicalGrid, check: bool = True
) -> HorizontalField:
    """
    P J_k (u . grad_H J_k u) in skew-symmetric form, so that
    <convect(u), u> = 0 for every real divergence-free u.
    """
    _require_paired(u.component(0), pgrid)
    if check:
        check_divergence_free(u)
    skew = HorizontalField.from_components(_skew_terms(u, k, pgrid))
    return leray(friedrichs(skew, k, "bi"))


def transport(u: HorizontalField, k: int, pgrid: PhysicalGrid) -> HorizontalField:
    """u . grad_H (J_k u) without the outer J_k and P."""
    _require_paired(u.component(0), pgrid)
    return HorizontalField.from_components(_transport_terms(u, k, pgrid))


def convect_divergence_form(u: HorizontalField, k: int, pgrid: PhysicalGrid) -> HorizontalField:
    """div_H (J_k u (x) u), i.e. sum_j P_j ((J_k u)_i u_j) for every component i."""
    _require_paired(u.component(0), pgrid)
    d = u.grid.d
    ladders = _horizontal_ladders(d)
    truncated = friedrichs(u, k, "bi")
    components = []
    for i in range(2 * d):
        total = SpectralField.zeros(u.grid)
        for j, ladder in enumerate(ladders):
            flux = pointwise_product(truncated.component(i), u.component(j), pgrid)
            total = total + apply_ladder(flux, ladder)
        components.append(total)
    return HorizontalField.from_components(components)


def m_zeta(A: SpectralField, B: SpectralField, zeta: float, pgrid: PhysicalGrid) -> SpectralField:
    """e^{zeta |D_s|} ((e^{-zeta |D_s|} A)(e^{-zeta |D_s|} B))."""
    damp = SymbolSpec("exp_abs_ds", zeta=-zeta)
    product = pointwise_product(apply_symbol(A, damp), apply_symbol(B, damp), pgrid)
    return apply_symbol(product, SymbolSpec("exp_abs_ds", zeta=zeta))
