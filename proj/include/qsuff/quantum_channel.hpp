#pragma once

#include <functional>
#include <vector>

#include "qsuff/operator_core.hpp"

namespace qsuff {

enum class Picture { Schrodinger, Heisenberg };

/// Completely positive trace-preserving map stored as Kraus operators K (out x in),
/// acting as rho -> sum K rho K* on states and a -> sum K* a K on observables.
class QuantumChannel {
public:
    QuantumChannel() = default;
    QuantumChannel(std::vector<Mat> kraus, Picture constructed_from = Picture::Schrodinger);

    // Choi convention: sum_ij E_ij (x) T(E_ij) with the input factor first.
    static QuantumChannel from_choi(const Mat& choi, int in_dim);
    static QuantumChannel from_schrodinger_map(const std::function<Mat(const Mat&)>& map, int in_dim, int out_dim);
    static QuantumChannel from_heisenberg_map(const std::function<Mat(const Mat&)>& map, int in_dim, int out_dim);

    static QuantumChannel identity(int n);
    static QuantumChannel unitary(const Mat& u);
    static QuantumChannel depolarizing(int n, double eps);
    // Keeps the listed tensor factors and discards the rest.
    static QuantumChannel partial_trace(const std::vector<int>& dims, const std::vector<int>& keep);
    // rho -> rho (x) tau.
    static QuantumChannel append_state(int in_dim, const Mat& tau);

    int in_dim() const { return in_; }
    int out_dim() const { return out_; }
    Picture picture() const { return picture_; }
    const std::vector<Mat>& kraus() const { return kraus_; }

    Mat schrodinger(const Mat& rho) const;
    Mat heisenberg(const Mat& a) const;
    Mat choi() const;
    // Schrodinger superoperator on column-major vec.
    Mat superoperator() const;
    double trace_preservation_defect() const;

    // this first, then next.
    QuantumChannel then(const QuantumChannel& next) const;

private:
    std::vector<Mat> kraus_;
    int in_ = 0;
    int out_ = 0;
    Picture picture_ = Picture::Schrodinger;
};

HermitianOperator heisenberg_apply(const QuantumChannel& ch, const HermitianOperator& a);
DensityMatrix schrodinger_apply(const QuantumChannel& ch, const DensityMatrix& rho);

}  // namespace qsuff
