#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jointspec/matrix_core.hpp"

namespace jointspec {

/// d pairwise commuting n x n matrices, with the commutator residual that certified them.
class CommutingTuple {
public:
  /// Default commutativity tolerance 1e-8 * (1 + max_j ||T_j||_F).
  static double default_tolerance(std::span<const CMatrix> mats) {
    double m = 0.0;
    for (const auto& a : mats) m = std::max(m, a.norm());
    return 1e-8 * (1.0 + m);
  }

  /// Validates shape, finiteness and commutativity. Throws InputError on failure.
  static CommutingTuple make(std::vector<CMatrix> mats, std::optional<double> tol = std::nullopt) {
    if (mats.empty()) throw InputError("CommutingTuple: need at least one matrix");
    const auto n = mats.front().rows();
    for (std::size_t j = 0; j < mats.size(); ++j) {
      const std::string what = "CommutingTuple matrix " + std::to_string(j);
      require_square(mats[j], what.c_str());
      require_finite(mats[j], what.c_str());
      if (mats[j].rows() != n) throw InputError("CommutingTuple: matrices have different sizes");
    }
    const double limit = tol.value_or(default_tolerance(mats));
    double residual = 0.0;
    for (std::size_t i = 0; i < mats.size(); ++i) {
      for (std::size_t j = i + 1; j < mats.size(); ++j) {
        residual = std::max(residual, (mats[i] * mats[j] - mats[j] * mats[i]).norm());
      }
    }
    if (residual > limit) {
      throw InputError("CommutingTuple: commutator residual " + std::to_string(residual) +
                       " exceeds tolerance " + std::to_string(limit));
    }
    return CommutingTuple(std::move(mats), residual);
  }

  std::size_t d() const noexcept { return mats_.size(); }
  Eigen::Index n() const noexcept { return mats_.front().rows(); }
  const std::vector<CMatrix>& mats() const noexcept { return mats_; }
  const CMatrix& operator[](std::size_t j) const { return mats_[j]; }
  double comm_residual() const noexcept { return comm_residual_; }

  /// max_j ||T_j||_F
  double max_frobenius() const {
    double m = 0.0;
    for (const auto& a : mats_) m = std::max(m, a.norm());
    return m;
  }

  /// max_j ||T_j||_2
  double max_norm2() const {
    double m = 0.0;
    for (const auto& a : mats_) m = std::max(m, norm2(a));
    return m;
  }

  /// (T_1 - l_1 I, ..., T_d - l_d I); commutativity is preserved exactly.
  CommutingTuple shifted(const CPoint& lambda) const {
    if (static_cast<std::size_t>(lambda.size()) != d()) {
      throw InputError("CommutingTuple::shifted: point dimension mismatch");
    }
    std::vector<CMatrix> out = mats_;
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j].diagonal().array() -= lambda(static_cast<Eigen::Index>(j));
    }
    return CommutingTuple(std::move(out), comm_residual_);
  }

  CommutingTuple adjoint() const {
    std::vector<CMatrix> out;
    out.reserve(mats_.size());
    for (const auto& a : mats_) out.push_back(a.adjoint());
    return CommutingTuple(std::move(out), comm_residual_);
  }

  /// Joint conjugation Q* T_j Q.
  CommutingTuple conjugated(const CMatrix& q) const {
    std::vector<CMatrix> out;
    out.reserve(mats_.size());
    for (const auto& a : mats_) out.push_back(q.adjoint() * a * q);
    return make(std::move(out));
  }

private:
  CommutingTuple(std::vector<CMatrix> mats, double residual)
      : mats_(std::move(mats)), comm_residual_(residual) {}

  std::vector<CMatrix> mats_;
  double comm_residual_ = 0.0;
};

}  // namespace jointspec
