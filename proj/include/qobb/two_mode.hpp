#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qobb/errors.hpp"
#include "qobb/fock.hpp"

namespace qobb {

/// Two-mode number basis truncated by total photon number:
/// {|n_a, n_b> : n_a + n_b <= n_max}, ordered by total N and then n_a, so
/// every fixed-N subspace occupies a contiguous block. The SU(2) generator
/// conserves N, which makes its exponential block diagonal in this order.
class TwoModeBasis {
 public:
  explicit TwoModeBasis(Eigen::Index n_max_total) : n_max_(n_max_total) {
    if (n_max_ < 0) throw domain_error("TwoModeBasis: n_max must be >= 0");
  }

  Eigen::Index n_max() const { return n_max_; }
  Eigen::Index dim() const { return (n_max_ + 1) * (n_max_ + 2) / 2; }

  /// First flat index of the total-photon-number-N block; the block holds
  /// N + 1 states.
  static Eigen::Index block_start(Eigen::Index total) {
    return total * (total + 1) / 2;
  }

  Eigen::Index index(Eigen::Index n_a, Eigen::Index n_b) const {
    const Eigen::Index total = n_a + n_b;
    if (n_a < 0 || n_b < 0 || total > n_max_)
      throw domain_error("TwoModeBasis: state outside basis");
    return block_start(total) + n_a;
  }

 private:
  Eigen::Index n_max_;
};

/// J_y = -(i/2)(a^dag b - a b^dag) on the two-mode basis. With this sign the
/// single-photon rotation satisfies <10| exp(-i theta J_y) |10> =
/// cos(theta/2), the convention used throughout this project.
template <class Scalar = double>
FockOperator<Scalar> jy_operator(const TwoModeBasis& basis) {
  FockOperator<Scalar> op;
  op.matrix = ComplexMatrix<Scalar>::Zero(basis.dim(), basis.dim());
  const std::complex<Scalar> half_i(0, Scalar(0.5));
  for (Eigen::Index total = 0; total <= basis.n_max(); ++total) {
    for (Eigen::Index n_a = 0; n_a <= total; ++n_a) {
      const Eigen::Index n_b = total - n_a;
      const Eigen::Index col = basis.index(n_a, n_b);
      if (n_b >= 1)  // a^dag b term, weight -i/2 sqrt((n_a+1) n_b)
        op.matrix(basis.index(n_a + 1, n_b - 1), col) -=
            half_i * std::sqrt(Scalar((n_a + 1) * n_b));
      if (n_a >= 1)  // a b^dag term, weight +i/2 sqrt(n_a (n_b+1))
        op.matrix(basis.index(n_a - 1, n_b + 1), col) +=
            half_i * std::sqrt(Scalar(n_a * (n_b + 1)));
    }
  }
  return op;
}

/// Coherent state in mode a, thermal state in mode b, restricted to the
/// total-photon basis. The joint trace deficit is the leakage; the builder
/// fails (reporting a sufficient truncation) rather than renormalize.
template <class Scalar>
FockDensity<Scalar> coherent_thermal_density(
    std::complex<Scalar> beta, Scalar n_bar, const TwoModeBasis& basis,
    Scalar leakage_budget = Scalar(default_leakage_budget)) {
  if (n_bar < Scalar(0) || !std::isfinite(n_bar))
    throw domain_error("coherent_thermal_density: thermal mean must be >= 0");
  const Eigen::Index n_max = basis.n_max();

  // Coherent amplitudes and thermal weights up to the full cutoff.
  std::vector<std::complex<Scalar>> c(n_max + 1);
  std::complex<Scalar> amp =
      std::exp(std::complex<Scalar>(-std::norm(beta) / Scalar(2)));
  for (Eigen::Index n = 0; n <= n_max; ++n) {
    c[n] = amp;
    amp *= beta / std::sqrt(Scalar(n + 1));
  }
  const Scalar q = n_bar / (n_bar + Scalar(1));
  std::vector<Scalar> w(n_max + 1);
  Scalar wt = Scalar(1) / (n_bar + Scalar(1));
  for (Eigen::Index n = 0; n <= n_max; ++n) {
    w[n] = wt;
    wt *= q;
  }

  Scalar mass{0};
  for (Eigen::Index n_a = 0; n_a <= n_max; ++n_a)
    for (Eigen::Index n_b = 0; n_a + n_b <= n_max; ++n_b)
      mass += std::norm(c[n_a]) * w[n_b];
  if (Scalar(1) - mass > leakage_budget) {
    // Grow the cutoff until the joint tail fits the budget.
    Eigen::Index need = n_max;
    Scalar m2 = mass;
    std::vector<std::complex<Scalar>> ce = c;
    std::vector<Scalar> we = w;
    while (Scalar(1) - m2 > leakage_budget && need < 4096) {
      ++need;
      ce.push_back(ce.back() * beta / std::sqrt(Scalar(need)));
      we.push_back(we.back() * q);
      for (Eigen::Index n_a = 0; n_a <= need; ++n_a)
        m2 += std::norm(ce[n_a]) * we[need - n_a];
    }
    throw truncation_error(
        "coherent_thermal_density: leakage " + std::to_string(double(Scalar(1) - mass)) +
            " exceeds budget; need total n_max >= " + std::to_string(need),
        need);
  }

  FockDensity<Scalar> rho;
  rho.matrix = ComplexMatrix<Scalar>::Zero(basis.dim(), basis.dim());
  // <n_a, n_b| rho |m_a, m_b> = c_{n_a} conj(c_{m_a}) w_{n_b} delta_{n_b m_b}
  for (Eigen::Index n_b = 0; n_b <= n_max; ++n_b)
    for (Eigen::Index n_a = 0; n_a + n_b <= n_max; ++n_a)
      for (Eigen::Index m_a = 0; m_a + n_b <= n_max; ++m_a)
        rho.matrix(basis.index(n_a, n_b), basis.index(m_a, n_b)) =
            c[n_a] * std::conj(c[m_a]) * w[n_b];
  return rho;
}

/// Projector onto the basis state |n_a, n_b>.
template <class Scalar = double>
FockOperator<Scalar> basis_projector(const TwoModeBasis& basis, Eigen::Index n_a,
                                     Eigen::Index n_b) {
  FockOperator<Scalar> op;
  op.matrix = ComplexMatrix<Scalar>::Zero(basis.dim(), basis.dim());
  op.matrix(basis.index(n_a, n_b), basis.index(n_a, n_b)) = Scalar(1);
  return op;
}

/// SU(2) rotation exp(-i theta J_y) rho exp(+i theta J_y). J_y conserves the
/// total photon number, so the unitary is computed exactly one fixed-N block
/// at a time (eigendecomposition of the Hermitian block) and applied
/// blockwise; total photon number, trace and Hermiticity are preserved by
/// construction.
template <class Scalar>
FockDensity<Scalar> evolve_su2(const FockDensity<Scalar>& rho, Scalar theta,
                               const TwoModeBasis& basis) {
  if (rho.dim() != basis.dim())
    throw domain_error("evolve_su2: state does not live on the given basis");

  const FockOperator<Scalar> jy = jy_operator<Scalar>(basis);
  const Eigen::Index n_blocks = basis.n_max() + 1;
  std::vector<ComplexMatrix<Scalar>> u(n_blocks);
  for (Eigen::Index total = 0; total < n_blocks; ++total) {
    const Eigen::Index off = TwoModeBasis::block_start(total);
    const Eigen::Index sz = total + 1;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(
        jy.matrix.block(off, off, sz, sz));
    if (es.info() != Eigen::Success)
      throw solver_error("evolve_su2: block eigendecomposition failed");
    ComplexVector<Scalar> phases(sz);
    for (Eigen::Index k = 0; k < sz; ++k)
      phases[k] = std::exp(std::complex<Scalar>(0, -theta * es.eigenvalues()[k]));
    u[total] = es.eigenvectors() * phases.asDiagonal() *
               es.eigenvectors().adjoint();
  }

  FockDensity<Scalar> out;
  out.matrix.resize(basis.dim(), basis.dim());
  for (Eigen::Index bn = 0; bn < n_blocks; ++bn) {
    const Eigen::Index on = TwoModeBasis::block_start(bn), sn = bn + 1;
    for (Eigen::Index bm = 0; bm < n_blocks; ++bm) {
      const Eigen::Index om = TwoModeBasis::block_start(bm), sm = bm + 1;
      out.matrix.block(on, om, sn, sm) =
          u[bn] * rho.matrix.block(on, om, sn, sm) * u[bm].adjoint();
    }
  }
  return out;
}

}  // namespace qobb
