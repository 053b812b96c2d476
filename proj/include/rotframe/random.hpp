#pragma once

#include "rotframe/linalg.hpp"

#include <cstdint>
#include <random>

namespace rotframe {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for stream `index` under `master`; independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

cmat ginibre(Index rows, Index cols, Rng &rng);

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
cmat haar_unitary(Index dim, Rng &rng);

/// Haar-random isometry dim_out x dim_in (dim_out >= dim_in).
cmat haar_isometry(Index dim_out, Index dim_in, Rng &rng);

cvec random_pure_state(Index dim, Rng &rng);

/// Full-rank density matrix from the induced (Hilbert-Schmidt) measure.
cmat random_density_matrix(Index dim, Rng &rng);

double uniform01(Rng &rng);

} // namespace rotframe
