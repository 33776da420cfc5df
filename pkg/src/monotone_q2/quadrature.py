"""Independent element-by-element assembly with 3-point Gauss-Lobatto quadrature.

This is the oracle for the stencil assembly: build the element stiffness
``S`` and mass ``M`` of the bilinear form ``(a u', v') + (c u, v)`` with the
quadrature rule placed on the Q2 nodes, check that ``M`` comes out diagonal,
and return ``M⁻¹ S`` on interior rows with identity boundary rows.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .assembly import CoefficientField, SparseOperator

__all__ = ["gauss_lobatto_3", "lagrange_tables", "assemble_via_quadrature"]


def gauss_lobatto_3() -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the 3-point Gauss-Lobatto rule on [-1, 1]."""
    return np.array([-1.0, 0.0, 1.0]), np.array([1.0, 4.0, 1.0]) / 3.0


def lagrange_tables(nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values ``B[q, k] = l_k(x_q)`` and derivatives ``D[q, k] = l_k'(x_q)``
    of the Lagrange basis on ``nodes``, evaluated at the same nodes."""
    m = len(nodes)
    B = np.zeros((m, m))
    D = np.zeros((m, m))
    for k in range(m):
        others = [i for i in range(m) if i != k]
        denom = np.prod([nodes[k] - nodes[i] for i in others])
        for q in range(m):
            B[q, k] = np.prod([nodes[q] - nodes[i] for i in others]) / denom
            D[q, k] = sum(
                np.prod([nodes[q] - nodes[i] for i in others if i != skip]) for skip in others
            ) / denom
    return B, D


def _element_tables(dim: int, h: float):
    """Per-element quadrature weights, basis values and gradients.

    Elements span ``2h``; the reference map has Jacobian ``h`` per axis.
    Local node / quadrature index ``r`` runs over ``{0, 1, 2}^dim`` with the
    first axis fastest.
    """
    xi, w = gauss_lobatto_3()
    B, D = lagrange_tables(xi)
    D = D / h
    w = w * h
    if dim == 1:
        return w, B, [D]
    # q = (q1, q2), k = (k1, k2), both flattened first-axis fastest
    W = np.einsum("a,b->ba", w, w).ravel()
    Phi = np.einsum("ak,bl->balk", B, B).reshape(9, 9)
    Gx = np.einsum("ak,bl->balk", D, B).reshape(9, 9)
    Gy = np.einsum("ak,bl->balk", B, D).reshape(9, 9)
    return W, Phi, [Gx, Gy]


def _element_nodes(grid) -> np.ndarray:
    """Global flat indices of the Q2 nodes of every element, shape (E, 3**dim)."""
    if grid.dim == 1:
        starts = 2 * np.arange(grid.n_cells)
        return starts[:, None] + np.arange(3)[None, :]
    mx, my = grid.n_cells
    stride = grid.nx + 2
    p, q = np.meshgrid(np.arange(mx), np.arange(my), indexing="ij")
    base = (2 * p + 2 * q * stride).ravel(order="F")
    r1, r2 = np.meshgrid(np.arange(3), np.arange(3), indexing="ij")
    local = (r1 + r2 * stride).ravel(order="F")
    return base[:, None] + local[None, :]


def assemble_via_quadrature(grid, coeff: CoefficientField, check_mass: bool = True) -> SparseOperator:
    """``M⁻¹ S`` from element integrals evaluated by Gauss-Lobatto quadrature.

    Coefficients are taken at the quadrature points, which coincide with the
    grid points, so no interpolation is involved.
    """
    W, Phi, grads = _element_tables(grid.dim, grid.h)
    nodes = _element_nodes(grid)
    a = coeff.a.ravel(order="F")[nodes]  # (E, Q)
    c = coeff.c.ravel(order="F")[nodes]

    Se = np.zeros((nodes.shape[0],) + Phi.shape)
    for G in grads:
        Se += np.einsum("eq,qk,ql->ekl", a * W, G, G)
    Se += np.einsum("eq,qk,ql->ekl", c * W, Phi, Phi)
    Me = np.einsum("q,qk,ql->kl", W, Phi, Phi)

    N = grid.size
    rows = np.repeat(nodes, nodes.shape[1], axis=1).ravel()
    cols = np.tile(nodes, (1, nodes.shape[1])).ravel()
    S = sp.csr_matrix((Se.ravel(), (rows, cols)), shape=(N, N))
    Mg = sp.csr_matrix((np.broadcast_to(Me, Se.shape).ravel(), (rows, cols)), shape=(N, N))
    if check_mass:
        off = Mg - sp.diags(Mg.diagonal())
        if off.nnz and np.max(np.abs(off.data)) > 0.0:
            raise AssertionError("Gauss-Lobatto mass matrix is not diagonal")

    interior = ~grid.boundary_mask
    m_inv = np.zeros(N)
    m_inv[interior] = 1.0 / Mg.diagonal()[interior]
    L = sp.diags(m_inv) @ S
    L = L + sp.diags(grid.boundary_mask.astype(float))
    L = L.tocsr()
    L.eliminate_zeros()
    L.sort_indices()
    return SparseOperator(L, grid, coeff)
