#pragma once

#include <cmath>
#include <limits>

#include "qobb/errors.hpp"

namespace qobb {

/// Uniform prior supported on [0, width], density 1/width. This is the only
/// prior the closed-form bounds support; the BVP solver accepts sampled
/// priors.
template <class Scalar = double>
struct PriorWindow {
  Scalar width;

  explicit PriorWindow(Scalar w) : width(w) {
    if (!(w > Scalar(0)) || !std::isfinite(w))
      throw domain_error("PriorWindow: width must be positive and finite");
  }

  Scalar density() const { return Scalar(1) / width; }
};

/// Per-probe scalar moments of the encoding generator plus the repetition
/// count. Everything the closed-form bounds need.
template <class Scalar = double>
struct MomentSet {
  Scalar h_mean;     ///< <H> per probe
  Scalar h_sq_mean;  ///< <H^2> per probe
  Scalar qfi;        ///< quantum Fisher information per probe
  long shots = 1;    ///< independent repetitions

  Scalar variance() const { return h_sq_mean - h_mean * h_mean; }

  /// Rate fed to the original bound: F per probe.
  Scalar rate_qfi() const { return qfi; }
  /// Rate fed to the first variant: 4<H^2> per probe.
  Scalar rate_second_moment() const { return Scalar(4) * h_sq_mean; }
  /// Rate fed to the second variant: 4 Var(H) per probe (uniform prior).
  Scalar rate_variance() const { return Scalar(4) * variance(); }

  void validate() const {
    if (!std::isfinite(h_mean) || !std::isfinite(h_sq_mean) || !std::isfinite(qfi))
      throw domain_error("MomentSet: non-finite moment");
    if (shots < 1) throw domain_error("MomentSet: shots must be >= 1");
    if (qfi < Scalar(0)) throw domain_error("MomentSet: qfi must be >= 0");
    // Allow rounding-level slack in the physical inequalities
    // <H^2> >= <H>^2 and F <= 4 Var(H).
    const Scalar scale =
        std::max({std::abs(h_sq_mean), h_mean * h_mean, Scalar(1)});
    const Scalar slack = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * scale;
    if (variance() < -slack)
      throw domain_error("MomentSet: <H^2> < <H>^2");
    if (qfi > rate_variance() + Scalar(4) * slack)
      throw domain_error("MomentSet: qfi exceeds 4*Var(H)");
  }
};

/// The four bounds for one scenario point, in squared parameter units.
template <class Scalar = double>
struct BoundReport {
  Scalar qcrb;
  Scalar qobb0;
  Scalar qobb1;
  Scalar qobb2;
};

/// Sentinel for a bound that carries no information (QCRB at zero Fisher
/// information).
template <class Scalar = double>
inline constexpr Scalar unbounded = std::numeric_limits<Scalar>::infinity();

/// Optimal-biased-bound kernel shared by all three variants:
///
///   1/K - 2/(a K^{3/2}) tanh(a sqrt(K)/2)  ==  (1/K) (1 - tanh(t)/t),
///
/// with t = a sqrt(K)/2 and K the information rate (F, 4<H^2> or 4 Var(H),
/// already multiplied by the shot count). Direct evaluation cancels
/// catastrophically as K -> 0, so small t switches to the series
/// (a^2/4)(1/3 - 2 t^2/15 + 17 t^4/315); at K = 0 this returns a^2/12, the
/// variance of the uniform prior.
template <class Scalar>
Scalar qobb_closed_form(Scalar rate, Scalar width) {
  if (!(width > Scalar(0)) || !std::isfinite(width))
    throw domain_error("qobb_closed_form: width must be positive");
  if (rate < Scalar(0) || !std::isfinite(rate))
    throw domain_error("qobb_closed_form: rate must be >= 0 and finite");

  const Scalar t = width * std::sqrt(rate) / Scalar(2);
  if (t < Scalar(1e-2)) {
    const Scalar t2 = t * t;
    return width * width / Scalar(4) *
           (Scalar(1) / Scalar(3) - Scalar(2) * t2 / Scalar(15) +
            Scalar(17) * t2 * t2 / Scalar(315));
  }
  return (Scalar(1) - std::tanh(t) / t) / rate;
}

/// Quantum Cramer-Rao bound 1/(shots * F). Zero Fisher information yields the
/// `unbounded` sentinel rather than an exception: the Bayesian bounds stay
/// finite there and callers may still want the report.
template <class Scalar>
Scalar qcrb(const MomentSet<Scalar>& m) {
  m.validate();
  if (m.qfi == Scalar(0)) return unbounded<Scalar>;
  return Scalar(1) / (Scalar(m.shots) * m.qfi);
}

/// All four bounds for `m` observed `m.shots` times under a uniform prior.
/// Each rate scales linearly with the shot count (Fisher information and
/// variances of independent repetitions add).
template <class Scalar>
BoundReport<Scalar> bound_report(const MomentSet<Scalar>& m,
                                 const PriorWindow<Scalar>& w) {
  m.validate();
  const Scalar v = Scalar(m.shots);
  BoundReport<Scalar> r;
  r.qcrb = qcrb(m);
  r.qobb0 = qobb_closed_form(v * m.rate_qfi(), w.width);
  r.qobb1 = qobb_closed_form(v * m.rate_second_moment(), w.width);
  r.qobb2 = qobb_closed_form(v * m.rate_variance(), w.width);
  return r;
}

/// Coherent probe under phase encoding with the photon-number generator:
/// <n> = N, <n^2> = N(N+1), F = 4N.
template <class Scalar = double>
MomentSet<Scalar> moments_phase_cs(Scalar n_mean) {
  if (!(n_mean > Scalar(0)) || !std::isfinite(n_mean))
    throw domain_error("moments_phase_cs: mean photon number must be > 0");
  MomentSet<Scalar> m;
  m.h_mean = n_mean;
  m.h_sq_mean = n_mean * (n_mean + Scalar(1));
  // Pure probe: F = 4 Var(H). Evaluating it through the same expression the
  // report uses keeps the F-based and variance-based bounds bit-identical.
  m.qfi = m.rate_variance();
  m.shots = 1;
  return m;
}

/// Squeezed-vacuum probe under phase encoding, N = sinh^2 r:
/// <n> = N, <n^2> = N(3N+2), F = 8N(N+1).
template <class Scalar = double>
MomentSet<Scalar> moments_phase_smsvs(Scalar n_mean) {
  if (!(n_mean > Scalar(0)) || !std::isfinite(n_mean))
    throw domain_error("moments_phase_smsvs: mean photon number must be > 0");
  MomentSet<Scalar> m;
  m.h_mean = n_mean;
  m.h_sq_mean = n_mean * (Scalar(3) * n_mean + Scalar(2));
  m.qfi = m.rate_variance();
  m.shots = 1;
  return m;
}

/// Coherent (x) thermal input of an SU(2) interferometer generated by J_y:
/// <J_y> = 0, <J_y^2> = (|beta|^2 + n_th + 2 |beta|^2 n_th)/4,
/// F = n_th + |beta|^2/(2 n_th + 1).
template <class Scalar = double>
MomentSet<Scalar> moments_su2(Scalar beta_sq, Scalar n_th) {
  if (!(beta_sq > Scalar(0)) || !std::isfinite(beta_sq))
    throw domain_error("moments_su2: |beta|^2 must be > 0");
  if (n_th < Scalar(0) || !std::isfinite(n_th))
    throw domain_error("moments_su2: thermal photon number must be >= 0");
  MomentSet<Scalar> m;
  m.h_mean = Scalar(0);
  m.h_sq_mean =
      (beta_sq + n_th + Scalar(2) * beta_sq * n_th) / Scalar(4);
  m.qfi = n_th + beta_sq / (Scalar(2) * n_th + Scalar(1));
  m.shots = 1;
  return m;
}

/// Single qubit prepared in (|0> + |1>)/sqrt(2) with the number generator:
/// <n> = <n^2> = 1/2, F = 1 per shot.
template <class Scalar = double>
MomentSet<Scalar> moments_qubit_plus() {
  MomentSet<Scalar> m;
  m.h_mean = Scalar(0.5);
  m.h_sq_mean = Scalar(0.5);
  m.qfi = Scalar(1);
  m.shots = 1;
  return m;
}

}  // namespace qobb
