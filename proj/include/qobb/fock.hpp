#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>

#include "qobb/errors.hpp"

namespace qobb {

template <class Scalar>
using ComplexVector = Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic>;
template <class Scalar>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// Default bound on the probability mass a construction may leave outside the
/// retained Fock levels. Constructions that would exceed it throw instead of
/// renormalizing: a silently renormalized oracle hides truncation bias.
inline constexpr double default_leakage_budget = 1e-10;

/// Pure state on a truncated number basis |0..n_max> (or on an externally
/// managed index set such as a two-mode basis).
template <class Scalar = double>
struct FockState {
  ComplexVector<Scalar> amplitudes;

  Eigen::Index n_max() const { return amplitudes.size() - 1; }
  Scalar norm_sq() const { return amplitudes.squaredNorm(); }
  /// Mass outside the retained levels, assuming the untruncated state is
  /// normalized.
  Scalar leakage() const { return Scalar(1) - norm_sq(); }
};

/// Density operator on the same basis.
template <class Scalar = double>
struct FockDensity {
  ComplexMatrix<Scalar> matrix;

  Eigen::Index dim() const { return matrix.rows(); }
  Scalar trace_real() const { return matrix.trace().real(); }
  Scalar leakage() const { return Scalar(1) - trace_real(); }
};

/// Measurement effect or observable.
template <class Scalar = double>
struct FockOperator {
  ComplexMatrix<Scalar> matrix;
  bool hermitian = true;
};

namespace detail {

template <class Scalar>
void check_hermitian(const ComplexMatrix<Scalar>& m, const char* who,
                     Scalar tol = Scalar(1e-12)) {
  const Scalar dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  const Scalar scale = std::max(Scalar(1), m.cwiseAbs().maxCoeff());
  if (dev > tol * scale)
    throw domain_error(std::string(who) + ": matrix is not Hermitian (deviation " +
                       std::to_string(double(dev)) + ")");
}

}  // namespace detail

/// Coherent state |alpha> truncated at n_max. Amplitudes are left exactly as
/// the infinite-dimensional state prescribes (no renormalization); if the
/// missing tail exceeds `leakage_budget` the construction fails and reports
/// the truncation that would suffice.
template <class Scalar>
FockState<Scalar> make_coherent(std::complex<Scalar> alpha, Eigen::Index n_max,
                                Scalar leakage_budget = Scalar(default_leakage_budget)) {
  if (n_max < 0) throw domain_error("make_coherent: n_max must be >= 0");
  FockState<Scalar> s;
  s.amplitudes.resize(n_max + 1);
  std::complex<Scalar> c = std::exp(std::complex<Scalar>(-std::norm(alpha) / Scalar(2)));
  Scalar mass{0};
  for (Eigen::Index n = 0; n <= n_max; ++n) {
    s.amplitudes[n] = c;
    mass += std::norm(c);
    c *= alpha / std::sqrt(Scalar(n + 1));
  }
  if (Scalar(1) - mass > leakage_budget) {
    Eigen::Index need = n_max;
    Scalar tail_amp_sq = std::norm(c);
    Scalar m2 = mass;
    while (Scalar(1) - m2 > leakage_budget && need < (Eigen::Index(1) << 20)) {
      ++need;
      m2 += tail_amp_sq;
      tail_amp_sq *= std::norm(alpha) / Scalar(need + 1);
    }
    throw truncation_error("make_coherent: leakage " +
                               std::to_string(double(Scalar(1) - mass)) +
                               " exceeds budget; need n_max >= " + std::to_string(need),
                           need);
  }
  return s;
}

template <class Scalar>
FockState<Scalar> make_coherent(Scalar alpha, Eigen::Index n_max,
                                Scalar leakage_budget = Scalar(default_leakage_budget)) {
  return make_coherent(std::complex<Scalar>(alpha, Scalar(0)), n_max, leakage_budget);
}

/// Single-mode squeezed vacuum with squeezing parameter r >= 0: only even
/// levels populated, amplitude ratio c_{2m+2}/c_{2m} =
/// -tanh(r) sqrt((2m+1)(2m+2)) / (2(m+1)). Mean photon number sinh^2 r.
template <class Scalar>
FockState<Scalar> make_smsvs(Scalar r, Eigen::Index n_max,
                             Scalar leakage_budget = Scalar(default_leakage_budget)) {
  if (n_max < 0) throw domain_error("make_smsvs: n_max must be >= 0");
  if (!(r >= Scalar(0)) || !std::isfinite(r))
    throw domain_error("make_smsvs: squeezing parameter must be >= 0");
  FockState<Scalar> s;
  s.amplitudes = ComplexVector<Scalar>::Zero(n_max + 1);
  const Scalar th = std::tanh(r);
  Scalar c = Scalar(1) / std::sqrt(std::cosh(r));
  Scalar mass{0};
  for (Eigen::Index m = 0;; ++m) {
    const Eigen::Index level = 2 * m;
    if (level > n_max) break;
    s.amplitudes[level] = c;
    mass += c * c;
    c *= -th * std::sqrt(Scalar((2 * m + 1) * (2 * m + 2))) / Scalar(2 * (m + 1));
  }
  if (Scalar(1) - mass > leakage_budget) {
    Eigen::Index m = (n_max / 2) + 1;
    Scalar cc = c, m2 = mass;
    Eigen::Index need = n_max;
    while (Scalar(1) - m2 > leakage_budget && need < (Eigen::Index(1) << 20)) {
      m2 += cc * cc;
      need = 2 * m;
      cc *= -th * std::sqrt(Scalar((2 * m + 1) * (2 * m + 2))) / Scalar(2 * (m + 1));
      ++m;
    }
    throw truncation_error("make_smsvs: leakage " +
                               std::to_string(double(Scalar(1) - mass)) +
                               " exceeds budget; need n_max >= " + std::to_string(need),
                           need);
  }
  return s;
}

/// Thermal state with mean photon number n_bar: diagonal weights
/// n_bar^n / (n_bar + 1)^{n+1}. The geometric tail gives the leakage in
/// closed form.
template <class Scalar>
FockDensity<Scalar> make_thermal(Scalar n_bar, Eigen::Index n_max,
                                 Scalar leakage_budget = Scalar(default_leakage_budget)) {
  if (n_max < 0) throw domain_error("make_thermal: n_max must be >= 0");
  if (n_bar < Scalar(0) || !std::isfinite(n_bar))
    throw domain_error("make_thermal: mean photon number must be >= 0");
  const Scalar q = n_bar / (n_bar + Scalar(1));
  const Scalar leak = std::pow(q, Scalar(n_max + 1));
  if (leak > leakage_budget) {
    const Eigen::Index need = Eigen::Index(
        std::ceil(std::log(leakage_budget) / std::log(q))); // q^need <= budget
    throw truncation_error("make_thermal: leakage " + std::to_string(double(leak)) +
                               " exceeds budget; need n_max >= " + std::to_string(need - 1),
                           need - 1);
  }
  FockDensity<Scalar> rho;
  rho.matrix = ComplexMatrix<Scalar>::Zero(n_max + 1, n_max + 1);
  Scalar w = Scalar(1) / (n_bar + Scalar(1));
  for (Eigen::Index n = 0; n <= n_max; ++n) {
    rho.matrix(n, n) = w;
    w *= q;
  }
  return rho;
}

/// |psi><psi| as a density operator.
template <class Scalar>
FockDensity<Scalar> to_density(const FockState<Scalar>& psi) {
  FockDensity<Scalar> rho;
  rho.matrix = psi.amplitudes * psi.amplitudes.adjoint();
  return rho;
}

/// |psi><psi| as a measurement effect.
template <class Scalar>
FockOperator<Scalar> projector(const FockState<Scalar>& psi) {
  FockOperator<Scalar> op;
  op.matrix = psi.amplitudes * psi.amplitudes.adjoint();
  op.hermitian = true;
  return op;
}

/// Photon-number operator on |0..n_max>.
template <class Scalar = double>
FockOperator<Scalar> number_operator(Eigen::Index n_max) {
  FockOperator<Scalar> op;
  op.matrix = ComplexMatrix<Scalar>::Zero(n_max + 1, n_max + 1);
  for (Eigen::Index n = 0; n <= n_max; ++n) op.matrix(n, n) = Scalar(n);
  return op;
}

/// Identity effect.
template <class Scalar = double>
FockOperator<Scalar> identity_operator(Eigen::Index dim) {
  return FockOperator<Scalar>{ComplexMatrix<Scalar>::Identity(dim, dim), true};
}

/// Phase encoding exp(i n phi) |psi>: the number distribution is untouched,
/// amplitudes pick up e^{i n phi}.
template <class Scalar>
FockState<Scalar> evolve_phase(const FockState<Scalar>& psi, Scalar phi) {
  FockState<Scalar> out = psi;
  for (Eigen::Index n = 0; n < out.amplitudes.size(); ++n)
    out.amplitudes[n] *= std::exp(std::complex<Scalar>(0, Scalar(n) * phi));
  return out;
}

/// Phase encoding on a density operator: rho_{mn} -> e^{i (m-n) phi} rho_{mn}.
template <class Scalar>
FockDensity<Scalar> evolve_phase(const FockDensity<Scalar>& rho, Scalar phi) {
  const Eigen::Index d = rho.dim();
  FockDensity<Scalar> out;
  out.matrix.resize(d, d);
  for (Eigen::Index m = 0; m < d; ++m)
    for (Eigen::Index n = 0; n < d; ++n)
      out.matrix(m, n) =
          rho.matrix(m, n) * std::exp(std::complex<Scalar>(0, Scalar(m - n) * phi));
  return out;
}

/// Born probability Tr(rho * effect). The result must land in [0, 1] up to a
/// 1e-10 margin; values inside the margin are clamped, anything farther out is
/// an error (it signals an invalid effect or state).
template <class Scalar>
Scalar born_prob(const FockDensity<Scalar>& rho, const FockOperator<Scalar>& effect) {
  if (effect.matrix.rows() != rho.dim())
    throw domain_error("born_prob: dimension mismatch");
  if (!effect.hermitian)
    throw domain_error("born_prob: effect must be Hermitian");
  detail::check_hermitian<Scalar>(effect.matrix, "born_prob");
  // tr(AB) without forming the product.
  const std::complex<Scalar> tr =
      rho.matrix.cwiseProduct(effect.matrix.transpose()).sum();
  if (std::abs(tr.imag()) > Scalar(1e-10))
    throw domain_error("born_prob: trace has a non-real part of " +
                       std::to_string(double(tr.imag())));
  const Scalar p = tr.real();
  const Scalar margin = Scalar(1e-10);
  if (p < -margin || p > Scalar(1) + margin)
    throw domain_error("born_prob: probability " + std::to_string(double(p)) +
                       " outside [0,1]");
  return std::min(std::max(p, Scalar(0)), Scalar(1));
}

/// Tr(rho * op) for a Hermitian observable.
template <class Scalar>
Scalar expectation(const FockDensity<Scalar>& rho, const FockOperator<Scalar>& op) {
  if (op.matrix.rows() != rho.dim())
    throw domain_error("expectation: dimension mismatch");
  detail::check_hermitian<Scalar>(op.matrix, "expectation");
  return rho.matrix.cwiseProduct(op.matrix.transpose()).sum().real();
}

/// <psi| op |psi> for a Hermitian observable.
template <class Scalar>
Scalar expectation(const FockState<Scalar>& psi, const FockOperator<Scalar>& op) {
  if (op.matrix.rows() != psi.amplitudes.size())
    throw domain_error("expectation: dimension mismatch");
  detail::check_hermitian<Scalar>(op.matrix, "expectation");
  return (psi.amplitudes.adjoint() * op.matrix * psi.amplitudes)(0).real();
}

/// Quantum Fisher information of a pure probe under the unitary family
/// generated by h: 4 (<h^2> - <h>^2).
template <class Scalar>
Scalar qfi_pure(const FockState<Scalar>& psi, const FockOperator<Scalar>& h) {
  if (h.matrix.rows() != psi.amplitudes.size())
    throw domain_error("qfi_pure: dimension mismatch");
  detail::check_hermitian<Scalar>(h.matrix, "qfi_pure");
  const ComplexVector<Scalar> hpsi = h.matrix * psi.amplitudes;
  const Scalar h_sq = hpsi.squaredNorm();
  const Scalar h_mean = (psi.amplitudes.adjoint() * hpsi)(0).real();
  return Scalar(4) * (h_sq - h_mean * h_mean);
}

/// Quantum Fisher information for a general state from the spectral formula
///
///   F = 2 sum_{ij} (l_i - l_j)^2 |<i|h|j>|^2 / (l_i + l_j),
///
/// skipping eigenvalue pairs whose sum is below 1e-12 (null directions of the
/// truncated state carry no information and would only amplify noise).
template <class Scalar>
Scalar qfi_mixed(const FockDensity<Scalar>& rho, const FockOperator<Scalar>& h) {
  if (h.matrix.rows() != rho.dim())
    throw domain_error("qfi_mixed: dimension mismatch");
  detail::check_hermitian<Scalar>(h.matrix, "qfi_mixed");
  detail::check_hermitian<Scalar>(rho.matrix, "qfi_mixed(state)");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(rho.matrix);
  if (es.info() != Eigen::Success)
    throw solver_error("qfi_mixed: eigendecomposition failed");
  const auto& lam = es.eigenvalues();
  const ComplexMatrix<Scalar> ht =
      es.eigenvectors().adjoint() * h.matrix * es.eigenvectors();

  const Eigen::Index d = rho.dim();
  Scalar f{0};
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const Scalar sum = lam[i] + lam[j];
      if (sum <= Scalar(1e-12)) continue;
      const Scalar diff = lam[i] - lam[j];
      f += Scalar(2) * diff * diff / sum * std::norm(ht(i, j));
    }
  }
  return f;
}

/// True when `op` is Hermitian with spectrum inside [-tol, 1+tol]; the
/// property every POVM effect must satisfy.
template <class Scalar>
bool is_valid_effect(const FockOperator<Scalar>& op, Scalar tol = Scalar(1e-10)) {
  const Scalar dev = (op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff();
  if (dev > Scalar(1e-12) * std::max(Scalar(1), op.matrix.cwiseAbs().maxCoeff()))
    return false;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(op.matrix,
                                                          Eigen::EigenvaluesOnly);
  return es.info() == Eigen::Success &&
         es.eigenvalues().minCoeff() >= -tol &&
         es.eigenvalues().maxCoeff() <= Scalar(1) + tol;
}

}  // namespace qobb
