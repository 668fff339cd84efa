"""Angular-momentum operators and spherical tensors for a spin-7/2 nucleus.

Builds the operator set, checks the algebra that everything downstream
relies on, and shows the tensor basis the Wigner machinery expands states
over.
"""

import numpy as np

from spinsqueeze import SpinSystem, angular_momentum, spherical_tensor, tensor_basis

spin = SpinSystem(two_i=7)  # I = 7/2, dimension 8
ops = angular_momentum(spin)

print(f"spin I = {spin.i}, Hilbert-space dimension d = {spin.dim}")
print("Jz diagonal:", np.diag(ops.jz).real)

# su(2): [Jx, Jy] = i Jz
comm = ops.jx @ ops.jy - ops.jy @ ops.jx
print("max |[Jx,Jy] - iJz| =", np.abs(comm - 1j * ops.jz).max())

# the Casimir J^2 = I(I+1) identity
print("J^2 / identity =", np.diag(ops.j2).real[0], "= I(I+1) =", spin.i * (spin.i + 1))

# spherical tensors: orthonormal operator basis, (2I+1)^2 = 64 of them
basis = tensor_basis(spin)
print(f"{len(basis)} tensor operators T_KQ, K = 0..{spin.two_i}")

t10 = spherical_tensor(spin, 1, 0)
print("T_10 is Jz normalized:", np.allclose(t10, ops.jz / np.sqrt(42)))

stack = np.array(list(basis.values()))
gram = np.einsum("aij,bij->ab", stack.conj(), stack)
print("orthonormality defect:", np.abs(gram - np.eye(64)).max())

# any Hermitian matrix is a combination of them
rng = np.random.default_rng(0)
m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
m = (m + m.conj().T) / 2
recon = sum(np.trace(m @ t.conj().T) * t for t in basis.values())
print("reconstruction defect for a random Hermitian matrix:", np.abs(recon - m).max())
