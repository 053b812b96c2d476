#include "rotframe/random.hpp"

namespace rotframe {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix_seed(master ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

double uniform01(Rng &rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

cmat ginibre(Index rows, Index cols, Rng &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  cmat g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  return g;
}

cmat haar_isometry(Index dim_out, Index dim_in, Rng &rng) {
  const cmat g = ginibre(dim_out, dim_in, rng);
  Eigen::HouseholderQR<cmat> qr(g);
  cmat q = qr.householderQ() * cmat::Identity(dim_out, dim_in);
  const cmat r = qr.matrixQR().topRows(dim_in).triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim_in; ++k) {
    const cplx d = r(k, k);
    if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

cmat haar_unitary(Index dim, Rng &rng) { return haar_isometry(dim, dim, rng); }

cvec random_pure_state(Index dim, Rng &rng) {
  cvec v = ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

cmat random_density_matrix(Index dim, Rng &rng) {
  const cmat g = ginibre(dim, dim, rng);
  cmat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

} // namespace rotframe
