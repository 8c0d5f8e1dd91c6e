#pragma once

// Support of a polynomial ideal, decided through the common zero set, and the
// three-way identity between joint eigenvalues, support and Taylor spectrum
// inside the closed polydisk.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jointspec/cayley_hamilton.hpp"
#include "jointspec/commuting_tuple.hpp"
#include "jointspec/mpoly.hpp"
#include "jointspec/tuple_spectrum.hpp"

namespace jointspec {

class PolyIdeal {
public:
  static PolyIdeal make(std::size_t nvars, std::vector<MPoly> generators) {
    if (nvars == 0) throw InputError("PolyIdeal: nvars must be positive");
    if (generators.empty()) throw InputError("PolyIdeal: need at least one generator");
    for (const auto& g : generators) {
      if (g.nvars() != nvars) throw InputError("PolyIdeal: generator has the wrong number of variables");
    }
    return PolyIdeal(nvars, std::move(generators));
  }

  static PolyIdeal from_family(const AnnihilatorFamily& fam) { return make(fam.alphas.d, fam.polys); }

  std::size_t nvars() const noexcept { return nvars_; }
  const std::vector<MPoly>& generators() const noexcept { return gens_; }

  PolyIdeal with(MPoly g) const {
    auto gens = gens_;
    gens.push_back(std::move(g));
    return make(nvars_, std::move(gens));
  }

private:
  PolyIdeal(std::size_t nvars, std::vector<MPoly> gens) : nvars_(nvars), gens_(std::move(gens)) {}

  std::size_t nvars_;
  std::vector<MPoly> gens_;
};

/// max_g |g(l)| / (1 + ||g||_1 (1 + |l|)^deg g). The zero generator contributes 0.
inline double support_ratio(const PolyIdeal& j, const CPoint& lambda) {
  if (static_cast<std::size_t>(lambda.size()) != j.nvars()) throw InputError("support_ratio: point dimension mismatch");
  const double growth = 1.0 + lambda.norm();
  double worst = 0.0;
  for (const auto& g : j.generators()) {
    if (g.is_zero()) continue;
    const double scale = 1.0 + g.norm1() * std::pow(growth, static_cast<double>(g.total_degree()));
    worst = std::max(worst, std::abs(g(lambda)) / scale);
  }
  return worst;
}

/// lambda is in supp(J) iff every generator vanishes there.
inline bool support_membership(const PolyIdeal& j, const CPoint& lambda, double tol = 1e-9) {
  return support_ratio(j, lambda) <= tol;
}

enum class Tri { No, Yes, Inconclusive };

inline const char* to_string(Tri t) { return t == Tri::Yes ? "yes" : t == Tri::No ? "no" : "inconclusive"; }

/// Membership with an undecided band (tol/10, 10 tol) around the cut.
inline Tri support_verdict(const PolyIdeal& j, const CPoint& lambda, double tol = 1e-9) {
  const double r = support_ratio(j, lambda);
  if (r > tol / 10.0 && r < 10.0 * tol) return Tri::Inconclusive;
  return r <= tol ? Tri::Yes : Tri::No;
}

struct SupportIdentityOptions {
  double support_tol = 1e-9;
  double koszul_tol = 1e-8;
  double spectrum_tol = 1e-6;  // distance to a computed joint eigenvalue
  double polydisk_slack = 1e-12;
};

struct SupportIdentityPoint {
  CPoint lambda;
  bool is_eigenvalue = false;  // drawn from the spectrum rather than the probes
  bool in_spectrum = false;
  Tri in_support = Tri::No;
  Tri taylor_singular = Tri::No;
  double ratio = 0.0;
};

struct SupportIdentityReport {
  std::vector<SupportIdentityPoint> points;  // spectrum points then probes, inside the closed polydisk
  std::size_t outside_polydisk = 0;
  std::size_t inconclusive = 0;
  std::size_t agreements = 0;
  std::vector<SupportIdentityPoint> disagreements;
  bool pass = false;
};

inline bool in_closed_polydisk(const CPoint& x, double slack = 1e-12) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::abs(x(i)) > 1.0 + slack) return false;
  return true;
}

/// Joint eigenvalue membership, support membership and Koszul singularity must
/// agree at every joint eigenvalue and probe inside the closed polydisk.
inline SupportIdentityReport support_spectrum_identity_check(const CommutingTuple& t, const AnnihilatorFamily& fam,
                                                             std::span<const CPoint> probes,
                                                             const SupportIdentityOptions& opt = {}) {
  if (fam.alphas.d != t.d()) throw InputError("support_spectrum_identity_check: family dimension mismatch");
  const PolyIdeal ideal = PolyIdeal::from_family(fam);
  const JointSpectrum spec = joint_eigenvalues(t);
  std::vector<std::pair<CPoint, bool>> candidates;
  for (const auto& l : spec.points) candidates.emplace_back(l, true);
  for (const auto& p : probes) {
    if (static_cast<std::size_t>(p.size()) != t.d()) throw InputError("support_spectrum_identity_check: probe dimension");
    candidates.emplace_back(p, false);
  }
  SupportIdentityReport rep;
  for (auto& [x, from_spectrum] : candidates) {
    if (!in_closed_polydisk(x, opt.polydisk_slack)) {
      ++rep.outside_polydisk;
      continue;
    }
    SupportIdentityPoint pt{x, from_spectrum, distance_to_spectrum(spec, x) <= opt.spectrum_tol,
                            support_verdict(ideal, x, opt.support_tol), Tri::No, support_ratio(ideal, x)};
    try {
      pt.taylor_singular = taylor_singular_at(t, x, opt.koszul_tol) ? Tri::Yes : Tri::No;
    } catch (const InconclusiveError&) {
      pt.taylor_singular = Tri::Inconclusive;
    }
    if (pt.in_support == Tri::Inconclusive || pt.taylor_singular == Tri::Inconclusive) {
      ++rep.inconclusive;
    } else {
      const Tri spec_tri = pt.in_spectrum ? Tri::Yes : Tri::No;
      if (pt.in_support == spec_tri && pt.taylor_singular == spec_tri) {
        ++rep.agreements;
      } else {
        rep.disagreements.push_back(pt);
      }
    }
    rep.points.push_back(std::move(pt));
  }
  rep.pass = rep.disagreements.empty();
  return rep;
}

}  // namespace jointspec
