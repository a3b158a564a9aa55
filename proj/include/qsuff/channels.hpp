#pragma once

#include <cstdint>
#include <functional>

#include "qsuff/algebra.hpp"
#include "qsuff/quantum_channel.hpp"
#include "qsuff/random.hpp"

namespace qsuff {

// ---- Positivity ----

using LinearMap = std::function<Mat(const Mat&)>;

// Choi matrix of an arbitrary linear map on in_dim x in_dim matrices.
Mat choi_of(const LinearMap& map, int in_dim);

/// Choi positivity (complete positivity) plus a Schwarz spot-check a*a -> map(a*a) - map(a)* map(a).
bool is_2_positive(const LinearMap& heisenberg, int in_dim, std::uint64_t seed = kDefaultSeed);
bool is_2_positive(const QuantumChannel& ch, std::uint64_t seed = kDefaultSeed);

// ---- State-weighted dual ----

/// Heisenberg map b -> rho_{w.s}^{-1/2} T(rho_w^{1/2} b rho_w^{1/2}) rho_{w.s}^{-1/2}, returned as a
/// channel from the output system of ch back to its input system. Both omega and ch(omega)
/// must be faithful.
QuantumChannel petz_dual(const QuantumChannel& ch, const DensityMatrix& omega);

// Largest violation of Tr(s(a)* w^{1/2} b w^{1/2}) = Tr(a* t^{1/2} P(b) t^{1/2}) over random pairs,
// with t = ch(omega) and P the state-weighted dual.
double petz_duality_residual(const QuantumChannel& ch, const DensityMatrix& omega, int samples = 8,
                             std::uint64_t seed = kDefaultSeed);

// ---- Multiplicative domain and fixed points ----

/// {a : s(a*a) = s(a)* s(a), s(aa*) = s(a) s(a)*} for the Heisenberg map s of ch,
/// as a subalgebra of the output-system observables.
StarSubalgebra multiplicative_domain(const QuantumChannel& ch, std::uint64_t seed = kDefaultSeed);

// Max over random a in the domain and random b of |s(ab) - s(a)s(b)| and |s(ba) - s(b)s(a)|.
double multiplicative_rule_residual(const QuantumChannel& ch, const StarSubalgebra& domain, int samples = 6,
                                    std::uint64_t seed = kDefaultSeed);

struct FixedPointAnalysis {
    StarSubalgebra output_fixed;  // fixed points of dual o s, output-system observables
    OperatorSpan input_fixed;     // fixed points of s o dual, input-system observables
    double isomorphism_residual = 0.0;
};

FixedPointAnalysis fixed_point_analysis(const QuantumChannel& ch, const DensityMatrix& omega,
                                        std::uint64_t seed = kDefaultSeed);
StarSubalgebra fixed_point_subalgebra_N1(const QuantumChannel& ch, const DensityMatrix& omega,
                                         std::uint64_t seed = kDefaultSeed);

// ---- Support compression ----

struct CompressedChannel {
    QuantumChannel channel;  // corner of ch between the supports
    Mat p_iso;               // in_dim x rank(p), orthonormal basis of supp omega
    Mat q_iso;               // out_dim x rank(q), orthonormal basis of supp ch(omega)
    DensityMatrix omega;     // omega restricted to the p corner

    Mat p() const { return p_iso * p_iso.adjoint(); }
    Mat q() const { return q_iso * q_iso.adjoint(); }
    Mat compress_input(const Mat& rho) const { return p_iso.adjoint() * rho * p_iso; }
    Mat compress_output(const Mat& tau) const { return q_iso.adjoint() * tau * q_iso; }
};

CompressedChannel compress_to_support(const QuantumChannel& ch, const DensityMatrix& omega);

/// Extends a recovery map between the corners to the full systems:
/// b(a) = b~(p a p) + omega(a)(1 - q) in the Heisenberg picture.
QuantumChannel extend_recovery(const CompressedChannel& cc, const QuantumChannel& corner_recovery,
                               const DensityMatrix& omega);

}  // namespace qsuff
